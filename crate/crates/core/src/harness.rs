//! Builds problems from a [`RunConfig`], runs them and fits observed rates.

use std::collections::BTreeMap;

use crate::config::{Fault, ProblemKind, RuleName, RunConfig, StartKind};
use crate::constants::{ProblemConstants, RateCase};
use crate::domains::{DomainKind, ProductDomain};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::objectives::{
    BallGameProblem, MatrixGameProblem, PointPair, QuadBilinearProblem, SaddleMode, SaddleObjective,
};
use crate::oracles::fictitious_play;
use crate::rng::SeededRng;
use crate::solver::{
    self, compute_gaps, Algorithm, IterationRecord, SolverOptions, SolverTrace, Status, StepKind,
    StepRule,
};

/// Exit status of a run: converged.
pub const EXIT_CONVERGED: i32 = 0;
/// Exit status of a run: error of any kind.
pub const EXIT_ERROR: i32 = 1;
/// Exit status of a run: iteration budget used up.
pub const EXIT_BUDGET: i32 = 2;

/// A generated benchmark instance.
#[derive(Debug, Clone)]
pub enum Problem {
    Quad(QuadBilinearProblem),
    Game(MatrixGameProblem),
    Ball(BallGameProblem),
}

impl Problem {
    /// Draws the instance; the seed fully determines it.
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        let mut rng = SeededRng::new(cfg.seed);
        Ok(match cfg.problem {
            ProblemKind::QuadBilinear => {
                if cfg.matrix.is_some() {
                    return Err(Error::invalid("explicit matrices are only read for matrix-game"));
                }
                Problem::Quad(QuadBilinearProblem::generate(
                    cfg.dim,
                    cfg.mu,
                    cfg.matrix_scale.unwrap_or(0.1),
                    cfg.saddle,
                    &mut rng,
                )?)
            }
            ProblemKind::MatrixGame => {
                let g = match &cfg.matrix {
                    Some(m) => MatrixGameProblem::new(m.clone())?,
                    None => MatrixGameProblem::random(
                        cfg.rows,
                        cfg.cols,
                        cfg.matrix_scale.unwrap_or(1.0),
                        &mut rng,
                    )?,
                };
                Problem::Game(g)
            }
            ProblemKind::BallGame => {
                if cfg.matrix.is_some() {
                    return Err(Error::invalid("explicit matrices are only read for matrix-game"));
                }
                Problem::Ball(BallGameProblem::random(
                    cfg.dim,
                    cfg.radius,
                    cfg.matrix_scale.unwrap_or(0.5),
                    cfg.margin,
                    &mut rng,
                )?)
            }
        })
    }

    pub fn objective(&self) -> &dyn SaddleObjective {
        match self {
            Problem::Quad(p) => p,
            Problem::Game(p) => p,
            Problem::Ball(p) => p,
        }
    }

    pub fn domain(&self) -> &ProductDomain {
        match self {
            Problem::Quad(p) => p.domain(),
            Problem::Game(p) => p.domain(),
            Problem::Ball(p) => p.domain(),
        }
    }

    pub fn constants(&self, case: RateCase) -> Result<ProblemConstants> {
        match self {
            Problem::Quad(p) => ProblemConstants::quad_bilinear(p, case),
            Problem::Game(p) => ProblemConstants::matrix_game(p),
            Problem::Ball(p) => ProblemConstants::ball_game(p),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        match self {
            Problem::Quad(p) => p.matrix(),
            Problem::Game(p) => p.matrix(),
            Problem::Ball(p) => p.matrix(),
        }
    }
}

/// Rate case used when the configuration does not name one.
pub fn default_case(cfg: &RunConfig) -> RateCase {
    match (cfg.algorithm, cfg.saddle) {
        (Algorithm::SpFw, SaddleMode::Interior) => RateCase::Interior,
        _ => RateCase::Polytope,
    }
}

/// Turns the configured rule name into a rule with constants, preferring overrides.
pub fn build_rule(cfg: &RunConfig, constants: Option<&ProblemConstants>) -> Result<StepRule> {
    let missing = |what: &str| Error::invalid(format!("{what} is unavailable for this problem"));
    match cfg.rule {
        RuleName::Universal => Ok(StepRule::Universal),
        RuleName::Harmonic => Ok(StepRule::Harmonic),
        RuleName::Adaptive => {
            let nu = cfg
                .nu
                .or_else(|| constants.and_then(|k| k.nu))
                .ok_or_else(|| missing("nu"))?;
            let c = cfg.c.or_else(|| constants.map(|k| k.c)).ok_or_else(|| missing("C"))?;
            StepRule::adaptive(nu, c)
        }
        RuleName::StronglyConvexSet => {
            let c_delta = cfg
                .c_delta
                .or_else(|| constants.and_then(|k| k.c_delta))
                .ok_or_else(|| missing("C_delta"))?;
            StepRule::strongly_convex_set(c_delta)
        }
        RuleName::Heuristic => {
            let c_tilde = cfg
                .c_tilde
                .or_else(|| constants.and_then(|k| k.c_tilde))
                .ok_or_else(|| missing("C_tilde"))?;
            StepRule::heuristic(c_tilde)
        }
    }
}

fn center_start(pd: &ProductDomain) -> Result<PointPair> {
    let center = |d: &crate::domains::Domain| -> Result<Vec<f64>> {
        Ok(match d.kind() {
            DomainKind::UnitCube => vec![0.5; d.dim()],
            DomainKind::Simplex => vec![1.0 / d.dim() as f64; d.dim()],
            DomainKind::L1Ball { center, .. } | DomainKind::L2Ball { center, .. } => center.clone(),
            DomainKind::VertexPolytope { .. } => {
                return Err(Error::invalid("vertex-listed polytopes have no centre start"))
            }
        })
    };
    Ok(PointPair::new(center(&pd.x)?, center(&pd.y)?))
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: SolverTrace,
    pub header: Vec<(String, String)>,
    pub constants: Option<ProblemConstants>,
    pub csv: String,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        match self.trace.status {
            Status::Converged => EXIT_CONVERGED,
            Status::BudgetExhausted => EXIT_BUDGET,
        }
    }
}

fn fp_trace(problem: &Problem, cfg: &RunConfig) -> Result<SolverTrace> {
    let Problem::Game(game) = problem else {
        return Err(Error::invalid("fp runs on matrix-game only"));
    };
    let seq = fictitious_play(game.matrix(), cfg.max_iters, (0, 0))?;
    let pd = game.domain();
    let mut records = Vec::new();
    for (t, z) in seq.iter().enumerate() {
        let report = compute_gaps(game, pd, z, None)?.report;
        if report.g_fw <= cfg.eps || t == cfg.max_iters {
            return Ok(SolverTrace {
                algorithm: Algorithm::FictitiousPlay,
                rule: "harmonic".into(),
                records,
                final_point: z.clone(),
                final_gaps: report,
                final_k: t,
                final_active_sizes: None,
                status: if report.g_fw <= cfg.eps {
                    Status::Converged
                } else {
                    Status::BudgetExhausted
                },
            });
        }
        let s = pd.linmin(&crate::objectives::vip_field(game, z))?;
        records.push(IterationRecord {
            t,
            k_t: t,
            step_kind: StepKind::Fw,
            gamma: 1.0 / (1.0 + t as f64),
            gamma_max: 1.0,
            gaps: report,
            active_sizes: None,
            fw_distance: s.sub(z).block_norm(),
            iterate: None,
        });
    }
    unreachable!("the sequence always reaches max_iters")
}

fn fmt_f(v: f64) -> String {
    format!("{v:.17e}")
}

/// Runs a configuration in memory.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let problem = Problem::build(cfg)?;
    let case = cfg.case.unwrap_or_else(|| default_case(cfg));
    let constants = match problem.constants(case) {
        Ok(k) => Some(k),
        Err(e) if cfg.rule == RuleName::Adaptive && cfg.nu.is_none() => return Err(e),
        Err(_) => None,
    };

    let (dx, dy) = problem.domain().dims();
    let mut header: Vec<(String, String)> = vec![
        ("problem".into(), cfg.problem.as_str().into()),
        ("dim_x".into(), dx.to_string()),
        ("dim_y".into(), dy.to_string()),
        ("seed".into(), cfg.seed.to_string()),
        ("eps".into(), fmt_f(cfg.eps)),
        ("max_iters".into(), cfg.max_iters.to_string()),
    ];
    if cfg.problem == ProblemKind::QuadBilinear {
        header.push(("mu".into(), fmt_f(cfg.mu)));
        header.push((
            "saddle".into(),
            match cfg.saddle {
                SaddleMode::Interior => "interior".into(),
                SaddleMode::Vertex => "vertex".into(),
            },
        ));
    }
    if let Some(k) = &constants {
        header.extend(k.header_lines());
    }

    let trace = if cfg.algorithm == Algorithm::FictitiousPlay {
        fp_trace(&problem, cfg)?
    } else {
        let rule = build_rule(cfg, constants.as_ref())?;
        let mut opts = SolverOptions::new(cfg.eps, cfg.max_iters);
        if cfg.start == StartKind::Center {
            if cfg.algorithm != Algorithm::SpFw {
                return Err(Error::invalid("start = center is only valid for spfw"));
            }
            opts.start = Some(center_start(problem.domain())?);
        }
        opts.flip_away_sign = cfg.fault == Some(Fault::FlipAwaySign);
        match rule {
            StepRule::Adaptive { nu, c } => {
                header.push(("step_nu".into(), fmt_f(nu)));
                header.push(("step_C".into(), fmt_f(c)));
            }
            StepRule::StronglyConvexSet { c_delta } => header.push(("step_C_delta".into(), fmt_f(c_delta))),
            StepRule::Heuristic { c_tilde } => header.push(("step_C_tilde".into(), fmt_f(c_tilde))),
            StepRule::Universal | StepRule::Harmonic => {}
        }
        solver::run(problem.objective(), problem.domain(), rule, cfg.algorithm, &opts)?
    };

    let w0 = trace.iterate_gaps().first().and_then(|g| g.w);
    if let (Some(k), Some(w0)) = (&constants, w0) {
        header.push((
            "C_sub".into(),
            k.sublinear(w0).map(fmt_f).unwrap_or_else(|| "none".into()),
        ));
    }
    if cfg.fault.is_some() {
        header.push(("fault".into(), "flip-away-sign".into()));
    }
    let csv = trace.to_csv(&header);
    Ok(RunOutput {
        trace,
        header,
        constants,
        csv,
    })
}

/// Runs a configuration and writes the trace to `cfg.out` when set.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let out = execute(cfg)?;
    if let Some(path) = &cfg.out {
        std::fs::write(path, &out.csv)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(out)
}

/// Least-squares rate estimates over the tail half of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub rows: usize,
    /// Slope of `ln w_t` against `k(t)`.
    pub slope_w: Option<f64>,
    /// `ln(1 − ρ)` from the trace header.
    pub theory_log_rate: Option<f64>,
    /// Slope of `ln h_t` against `ln t`.
    pub exponent_h: Option<f64>,
}

impl RateFit {
    /// Whether the fitted decay is at least as fast as the proven one.
    pub fn meets_theory(&self) -> Option<bool> {
        Some(self.slope_w? <= self.theory_log_rate? + 1e-12)
    }

    pub fn report(&self) -> String {
        let o = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "n/a".into());
        let verdict = match self.meets_theory() {
            Some(true) => "yes",
            Some(false) => "no",
            None => "n/a",
        };
        format!(
            "rows={}\nslope_log_w_vs_k={}\ntheory_log_1_minus_rho={}\nexponent_log_h_vs_log_t={}\nat_least_theoretical_rate={}\n",
            self.rows,
            o(self.slope_w),
            o(self.theory_log_rate),
            o(self.exponent_h),
            verdict
        )
    }
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Fits rates from the CSV text of a trace.
pub fn ratefit(text: &str) -> Result<RateFit> {
    let mut meta = BTreeMap::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
        match &columns {
            None => columns = Some(cells),
            Some(cols) => {
                if cells.len() != cols.len() {
                    return Err(Error::invalid("trace row has the wrong number of columns"));
                }
                rows.push(cells);
            }
        }
    }
    let cols = columns.ok_or_else(|| Error::invalid("trace has no column header"))?;
    if rows.len() < 10 {
        return Err(Error::invalid(format!("rate fit needs at least 10 rows, got {}", rows.len())));
    }
    let idx = |name: &str| {
        cols.iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::invalid(format!("trace lacks column `{name}`")))
    };
    let (it, ik, iw, ih) = (idx("t")?, idx("k_t")?, idx("w")?, idx("h")?);
    let num = |s: &str| -> Option<f64> { s.parse::<f64>().ok().filter(|v| v.is_finite()) };
    let tail = &rows[rows.len() / 2..];
    let w_pts: Vec<(f64, f64)> = tail
        .iter()
        .filter_map(|r| Some((num(&r[ik])?, num(&r[iw]).filter(|w| *w > 0.0)?.ln())))
        .collect();
    let h_pts: Vec<(f64, f64)> = tail
        .iter()
        .filter_map(|r| {
            let t = num(&r[it]).filter(|t| *t > 0.0)?;
            Some((t.ln(), num(&r[ih]).filter(|h| *h > 0.0)?.ln()))
        })
        .collect();
    let theory = meta
        .get("rho")
        .and_then(|v| v.parse::<f64>().ok())
        .filter(|r| *r > 0.0 && *r < 1.0)
        .map(|r| (1.0 - r).ln());
    Ok(RateFit {
        rows: rows.len(),
        slope_w: least_squares_slope(&w_pts),
        theory_log_rate: theory,
        exponent_h: least_squares_slope(&h_pts),
    })
}

/// Exit code for a finished or failed run.
pub fn exit_code(result: &Result<RunOutput>) -> i32 {
    match result {
        Ok(out) => out.exit_code(),
        Err(_) => EXIT_ERROR,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(w: impl Fn(f64) -> f64, h: impl Fn(f64) -> f64, n: usize) -> String {
        let mut s = String::from("# rho=0.05\nt,k_t,step_kind,gamma,gamma_max,gap_fw,gap_away,gap_pfw,w,h,active_x,active_y\n");
        for t in 0..n {
            let tf = t as f64;
            s.push_str(&format!("{t},{t},fw,0,1,1,,,{:e},{:e},,\n", w(tf), h(tf.max(1.0))));
        }
        s
    }

    #[test]
    fn geometric_series_slope() {
        let fit = ratefit(&synthetic(|t| 0.9f64.powf(t), |t| 1.0 / t, 200)).unwrap();
        assert!((fit.slope_w.unwrap() - 0.9f64.ln()).abs() < 1e-6);
        assert!((fit.exponent_h.unwrap() + 1.0).abs() < 1e-6);
        assert_eq!(fit.meets_theory(), Some(true));
    }

    #[test]
    fn too_few_rows() {
        assert!(ratefit(&synthetic(|t| 0.9f64.powf(t), |t| 1.0 / t, 9)).is_err());
    }

    #[test]
    fn fp_on_pennies_has_one_row_per_round() {
        let cfg = RunConfig::parse("problem = matrix-game\nmatrix = 1,-1;-1,1\nalgorithm = fp\nmax_iters = 10\neps = 0").unwrap();
        let out = execute(&cfg).unwrap();
        let t: Vec<usize> = out.trace.records.iter().map(|r| r.t).collect();
        assert_eq!(t, (0..10).collect::<Vec<_>>());
        assert_eq!(out.exit_code(), EXIT_BUDGET);
    }

    #[test]
    fn adaptive_with_negative_nu_is_refused() {
        let cfg = RunConfig::parse(
            "problem = quad-bilinear\ndim = 10\nmu = 0.5\nsaddle = vertex\nalgorithm = spafw\nrule = adaptive\nseed = 1",
        )
        .unwrap();
        let err = execute(&cfg).unwrap_err().to_string();
        assert!(err.contains("nu"), "{err}");
    }

    #[test]
    fn identical_configs_give_identical_csv() {
        let cfg = RunConfig::parse("problem = quad-bilinear\ndim = 4\nmu = 5\nalgorithm = spafw\nmax_iters = 50\nseed = 9").unwrap();
        assert_eq!(execute(&cfg).unwrap().csv, execute(&cfg).unwrap().csv);
    }
}
