//! Flat `key = value` run configuration.
//!
//! One run per file, `#` starts a comment. Unknown keys are errors.
//!
//! ```text
//! problem = quad-bilinear
//! dim = 10
//! mu = 20
//! algorithm = spfw
//! rule = adaptive
//! max_iters = 500
//! seed = 7
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::constants::RateCase;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::objectives::SaddleMode;
use crate::solver::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    QuadBilinear,
    MatrixGame,
    BallGame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleName {
    Adaptive,
    Universal,
    Harmonic,
    StronglyConvexSet,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartKind {
    /// The oracle's tie-break vertex pair.
    Vertex,
    /// Centre of each block (SP-FW on cubes and balls only).
    Center,
}

/// Deliberate defects used to show that the verification suite bites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Pick the away atom with the wrong sign (argmin instead of argmax).
    FlipAwaySign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub dim: usize,
    pub rows: usize,
    pub cols: usize,
    pub mu: f64,
    pub matrix_scale: Option<f64>,
    pub matrix: Option<Matrix>,
    pub saddle: SaddleMode,
    pub radius: f64,
    pub margin: f64,
    pub algorithm: Algorithm,
    pub rule: RuleName,
    pub case: Option<RateCase>,
    pub nu: Option<f64>,
    pub c: Option<f64>,
    pub c_delta: Option<f64>,
    pub c_tilde: Option<f64>,
    pub start: StartKind,
    pub eps: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub fault: Option<Fault>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::QuadBilinear,
            dim: 10,
            rows: 3,
            cols: 3,
            mu: 1.0,
            matrix_scale: None,
            matrix: None,
            saddle: SaddleMode::Interior,
            radius: 1.0,
            margin: 0.5,
            algorithm: Algorithm::SpFw,
            rule: RuleName::Universal,
            case: None,
            nu: None,
            c: None,
            c_delta: None,
            c_tilde: None,
            start: StartKind::Vertex,
            eps: 1e-8,
            max_iters: 1000,
            seed: 0,
            out: None,
            fault: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("`{key}`: cannot parse `{value}`")))
}

fn bad_choice(key: &str, value: &str, options: &str) -> Error {
    Error::invalid(format!("`{key}`: `{value}` is not one of {options}"))
}

/// `"1,-1;-1,1"` → 2×2 matrix (rows split by `;`).
pub fn parse_matrix(value: &str) -> Result<Matrix> {
    let rows = value
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| parse_num::<f64>("matrix", v.trim()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(k.trim(), v.trim())?;
            seen = true;
        }
        if !seen {
            return Err(Error::invalid("configuration is empty"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key; used by the parser and by command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "problem" => {
                self.problem = match value {
                    "quad-bilinear" => ProblemKind::QuadBilinear,
                    "matrix-game" => ProblemKind::MatrixGame,
                    "ball-game" => ProblemKind::BallGame,
                    _ => return Err(bad_choice(key, value, "quad-bilinear, matrix-game, ball-game")),
                }
            }
            "dim" => self.dim = parse_num(key, value)?,
            "rows" => self.rows = parse_num(key, value)?,
            "cols" => self.cols = parse_num(key, value)?,
            "mu" => self.mu = parse_num(key, value)?,
            "matrix_scale" => self.matrix_scale = Some(parse_num(key, value)?),
            "matrix" => self.matrix = Some(parse_matrix(value)?),
            "saddle" => {
                self.saddle = match value {
                    "interior" => SaddleMode::Interior,
                    "vertex" => SaddleMode::Vertex,
                    _ => return Err(bad_choice(key, value, "interior, vertex")),
                }
            }
            "radius" => self.radius = parse_num(key, value)?,
            "margin" => self.margin = parse_num(key, value)?,
            "algorithm" => {
                self.algorithm = match value {
                    "spfw" => Algorithm::SpFw,
                    "spafw" => Algorithm::SpAfw,
                    "sppfw" => Algorithm::SpPfw,
                    "fp" => Algorithm::FictitiousPlay,
                    _ => return Err(bad_choice(key, value, "spfw, spafw, sppfw, fp")),
                }
            }
            "rule" => {
                self.rule = match value {
                    "adaptive" => RuleName::Adaptive,
                    "universal" => RuleName::Universal,
                    "harmonic" => RuleName::Harmonic,
                    "strongly-convex-set" => RuleName::StronglyConvexSet,
                    "heuristic" => RuleName::Heuristic,
                    _ => {
                        return Err(bad_choice(
                            key,
                            value,
                            "adaptive, universal, harmonic, strongly-convex-set, heuristic",
                        ))
                    }
                }
            }
            "case" => {
                self.case = Some(match value {
                    "interior" => RateCase::Interior,
                    "polytope" => RateCase::Polytope,
                    _ => return Err(bad_choice(key, value, "interior, polytope")),
                })
            }
            "nu" => self.nu = Some(parse_num(key, value)?),
            "c" => self.c = Some(parse_num(key, value)?),
            "c_delta" => self.c_delta = Some(parse_num(key, value)?),
            "c_tilde" => self.c_tilde = Some(parse_num(key, value)?),
            "start" => {
                self.start = match value {
                    "vertex" => StartKind::Vertex,
                    "center" => StartKind::Center,
                    _ => return Err(bad_choice(key, value, "vertex, center")),
                }
            }
            "eps" => self.eps = parse_num(key, value)?,
            "max_iters" | "iters" => self.max_iters = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "fault" => {
                self.fault = match value {
                    "none" => None,
                    "flip-away-sign" => Some(Fault::FlipAwaySign),
                    _ => return Err(bad_choice(key, value, "none, flip-away-sign")),
                }
            }
            _ => return Err(Error::invalid(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Rejects combinations that cannot run.
    pub fn validate(&self) -> Result<()> {
        use Algorithm::*;
        use ProblemKind::*;
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::invalid("eps must be finite and nonnegative"));
        }
        match (self.problem, self.algorithm) {
            (BallGame, SpAfw | SpPfw) => {
                return Err(Error::invalid(format!(
                    "{} needs polytope domains; ball-game uses l2-balls",
                    self.algorithm.as_str()
                )))
            }
            (QuadBilinear | BallGame, FictitiousPlay) => {
                return Err(Error::invalid("fp runs on matrix-game only"))
            }
            _ => {}
        }
        match (self.problem, self.rule) {
            (MatrixGame, RuleName::Adaptive) if self.nu.is_none()  => {
                return Err(Error::invalid(
                    "rule `adaptive` needs nu > 0; matrix games have mu = 0 and no computable nu",
                ))
            }
            (MatrixGame, RuleName::Heuristic) if self.c_tilde.is_none() => {
                return Err(Error::invalid(format!(
                    "rule `{}` needs strong convex-concavity; matrix games have mu = 0",
                    self.rule.as_str()
                )))
            }
            (QuadBilinear | MatrixGame, RuleName::StronglyConvexSet) if self.c_delta.is_none() => {
                return Err(Error::invalid(
                    "strongly-convex-set rule needs strongly convex domains (ball-game)",
                ))
            }
            _ => {}
        }
        if self.algorithm == FictitiousPlay && self.max_iters == 0 {
            return Err(Error::invalid("fp needs at least one round"));
        }
        if self.fault.is_some() && !matches!(self.algorithm, SpAfw | SpPfw) {
            return Err(Error::invalid("fault injection targets the away-step variants"));
        }
        Ok(())
    }
}

impl RuleName {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleName::Adaptive => "adaptive",
            RuleName::Universal => "universal",
            RuleName::Harmonic => "harmonic",
            RuleName::StronglyConvexSet => "strongly-convex-set",
            RuleName::Heuristic => "heuristic",
        }
    }
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::QuadBilinear => "quad-bilinear",
            ProblemKind::MatrixGame => "matrix-game",
            ProblemKind::BallGame => "ball-game",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let cfg = RunConfig::parse(
            "# toy run\nproblem = matrix-game\nmatrix = 1,-1; -1,1  # pennies\nalgorithm = fp\nmax_iters = 10\n",
        )
        .unwrap();
        assert_eq!(cfg.problem, ProblemKind::MatrixGame);
        assert_eq!(cfg.matrix.as_ref().unwrap().get(1, 0), -1.0);
        assert_eq!(cfg.max_iters, 10);
    }

    #[test]
    fn rejects_unknown_keys_and_empty_files() {
        assert!(RunConfig::parse("colour = blue").is_err());
        assert!(RunConfig::parse("# nothing\n\n").is_err());
        assert!(RunConfig::parse("dim 10").is_err());
    }

    #[test]
    fn rejects_incompatible_combinations() {
        assert!(RunConfig::parse("problem = ball-game\nalgorithm = spafw").is_err());
        assert!(RunConfig::parse("problem = quad-bilinear\nalgorithm = fp").is_err());
        assert!(RunConfig::parse("problem = matrix-game\nrule = adaptive").is_err());
    }
}
