//! Per-iteration records and their CSV form.

use std::fmt::Write as _;

use crate::objectives::PointPair;

/// Gap certificates at one iterate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GapReport {
    pub g_x: f64,
    pub g_y: f64,
    /// `g_x + g_y`
    pub g_fw: f64,
    pub g_away: Option<f64>,
    /// `g_fw + g_away`
    pub g_pfw: Option<f64>,
    pub w: Option<f64>,
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Fw,
    Away,
    Pairwise,
    Drop,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Fw => "fw",
            StepKind::Away => "away",
            StepKind::Pairwise => "pairwise",
            StepKind::Drop => "drop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    SpFw,
    SpAfw,
    SpPfw,
    FictitiousPlay,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::SpFw => "spfw",
            Algorithm::SpAfw => "spafw",
            Algorithm::SpPfw => "sppfw",
            Algorithm::FictitiousPlay => "fp",
        }
    }
}

/// One step taken from `z^(t)`. Gaps and merits are those of `z^(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    /// Non-drop steps among the first `t`.
    pub k_t: usize,
    pub step_kind: StepKind,
    pub gamma: f64,
    pub gamma_max: f64,
    pub gaps: GapReport,
    pub active_sizes: Option<(usize, usize)>,
    /// `‖s − z‖` in the block norm `‖·‖_X + ‖·‖_Y`.
    pub fw_distance: f64,
    /// `z^(t)`, kept only when requested.
    pub iterate: Option<PointPair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// `g^FW ≤ eps` at the final iterate.
    Converged,
    BudgetExhausted,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub algorithm: Algorithm,
    pub rule: String,
    pub records: Vec<IterationRecord>,
    pub final_point: PointPair,
    pub final_gaps: GapReport,
    pub final_k: usize,
    pub final_active_sizes: Option<(usize, usize)>,
    pub status: Status,
}

pub const CSV_HEADER: &str =
    "t,k_t,step_kind,gamma,gamma_max,gap_fw,gap_away,gap_pfw,w,h,active_x,active_y";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl SolverTrace {
    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn drop_count(&self) -> usize {
        self.records.iter().filter(|r| r.step_kind == StepKind::Drop).count()
    }

    /// Gaps of `z^(0), …, z^(T)`, the final iterate included.
    pub fn iterate_gaps(&self) -> Vec<GapReport> {
        self.records
            .iter()
            .map(|r| r.gaps)
            .chain(std::iter::once(self.final_gaps))
            .collect()
    }

    /// `k(t)` for `t = 0, …, T`.
    pub fn k_sequence(&self) -> Vec<usize> {
        self.records
            .iter()
            .map(|r| r.k_t)
            .chain(std::iter::once(self.final_k))
            .collect()
    }

    /// `min_{s ≤ t} g^FW_s` for `t = 0, …, T`.
    pub fn best_gap_sequence(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.iterate_gaps()
            .iter()
            .map(|g| {
                best = best.min(g.g_fw);
                best
            })
            .collect()
    }

    /// CSV with `# key=value` header lines; the final iterate's certificates
    /// follow as trailing comment lines.
    pub fn to_csv(&self, header: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in header {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "# algorithm={}", self.algorithm.as_str());
        let _ = writeln!(out, "# rule={}", self.rule);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let (ax, ay) = r
                .active_sizes
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.k_t,
                r.step_kind.as_str(),
                num(r.gamma),
                num(r.gamma_max),
                num(r.gaps.g_fw),
                opt(r.gaps.g_away),
                opt(r.gaps.g_pfw),
                opt(r.gaps.w),
                opt(r.gaps.h),
                ax,
                ay
            );
        }
        let _ = writeln!(out, "# status={}", self.status.as_str());
        let _ = writeln!(out, "# final_t={}", self.records.len());
        let _ = writeln!(out, "# final_k={}", self.final_k);
        let _ = writeln!(out, "# final_gap_fw={}", num(self.final_gaps.g_fw));
        if let Some(w) = self.final_gaps.w {
            let _ = writeln!(out, "# final_w={}", num(w));
        }
        if let Some(h) = self.final_gaps.h {
            let _ = writeln!(out, "# final_h={}", num(h));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: usize, kind: StepKind) -> IterationRecord {
        IterationRecord {
            t,
            k_t: t,
            step_kind: kind,
            gamma: 0.5,
            gamma_max: 1.0,
            gaps: GapReport {
                g_fw: 1.0 / (t as f64 + 1.0),
                ..Default::default()
            },
            active_sizes: None,
            fw_distance: 1.0,
            iterate: None,
        }
    }

    #[test]
    fn csv_layout() {
        let trace = SolverTrace {
            algorithm: Algorithm::SpFw,
            rule: "universal".into(),
            records: vec![record(0, StepKind::Fw), record(1, StepKind::Fw)],
            final_point: PointPair::new(vec![0.0], vec![0.0]),
            final_gaps: GapReport::default(),
            final_k: 2,
            final_active_sizes: None,
            status: Status::BudgetExhausted,
        };
        let csv = trace.to_csv(&[("seed".into(), "3".into())]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# seed=3");
        assert_eq!(lines[3], CSV_HEADER);
        assert_eq!(
            lines[4],
            "0,0,fw,5.0000000000000000e-1,1.0000000000000000e0,1.0000000000000000e0,,,,,,"
        );
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 3);
        assert_eq!(trace.best_gap_sequence(), vec![1.0, 0.5, 0.0]);
    }
}
