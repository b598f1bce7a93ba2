//! SP-FW, SP-AFW and SP-PFW.
//!
//! All three share one loop: evaluate `r = F(z)`, call the product oracle,
//! form the gap certificates, stop on `g^FW ≤ eps`, otherwise pick a
//! direction and a step and record what happened.

mod active_set;
mod step;
mod trace;

pub use active_set::{
    away_gamma_max, pairwise_gamma_max, ActiveSet, ActiveSetPair, RECONSTRUCTION_TOL,
    RENORMALIZE_EVERY, WEIGHT_DRIFT_TOL,
};
pub use step::{step_size, StepContext, StepRule};
pub use trace::{
    Algorithm, GapReport, IterationRecord, SolverTrace, Status, StepKind, CSV_HEADER,
};

use crate::domains::{DomainKind, ProductDomain, MEMBERSHIP_TOL};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::objectives::{merit_w, suboptimality_h, vip_field, PointPair, SaddleObjective};

/// Gaps below this are treated as a bookkeeping error, not rounding.
pub const GAP_FLOOR: f64 = -1e-10;

/// A gap report together with the atoms it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct GapEval {
    pub report: GapReport,
    /// `r = F(z)`
    pub field: PointPair,
    /// Frank-Wolfe atom `s = LMO(r)`.
    pub s: PointPair,
    /// Away atom and its block weights, when an active set was given.
    pub away: Option<(PointPair, f64, f64)>,
}

fn optional(v: Result<f64>) -> Result<Option<f64>> {
    match v {
        Ok(x) => Ok(Some(x)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn gaps_with_field(
    obj: &dyn SaddleObjective,
    pd: &ProductDomain,
    z: &PointPair,
    field: PointPair,
    active: Option<&ActiveSetPair>,
    flip_away_sign: bool,
) -> Result<GapEval> {
    let s = pd.linmin(&field)?;
    let g_x = dot(&crate::linalg::sub(&z.x, &s.x), &field.x);
    let g_y = dot(&crate::linalg::sub(&z.y, &s.y), &field.y);
    let g_fw = g_x + g_y;
    let mut report = GapReport {
        g_x,
        g_y,
        g_fw,
        g_away: None,
        g_pfw: None,
        w: optional(merit_w(obj, z))?,
        h: optional(suboptimality_h(obj, z))?,
    };
    let away = match active {
        Some(a) => {
            a.check_represents(z)?;
            let (v, ax, ay) = if flip_away_sign {
                a.away_atom(&field.neg())
            } else {
                a.away_atom(&field)
            };
            // ⟨−r, z − v⟩
            let g_away = field.dot(&v.sub(z));
            report.g_away = Some(g_away);
            report.g_pfw = Some(g_fw + g_away);
            Some((v, ax, ay))
        }
        None => None,
    };
    let away_floor = if flip_away_sign { None } else { report.g_away };
    for (name, g) in [("g_fw", Some(g_fw)), ("g_away", away_floor)] {
        if let Some(g) = g {
            if g < GAP_FLOOR {
                return Err(Error::InvariantViolation(format!("{name} = {g:e} is negative")));
            }
        }
    }
    Ok(GapEval {
        report,
        field,
        s,
        away,
    })
}

/// Gap certificates at `z`; with an active set also the away and pairwise gaps.
pub fn compute_gaps(
    obj: &dyn SaddleObjective,
    pd: &ProductDomain,
    z: &PointPair,
    active: Option<&ActiveSetPair>,
) -> Result<GapEval> {
    check_dims(obj, pd, z)?;
    gaps_with_field(obj, pd, z, vip_field(obj, z), active, false)
}

fn check_dims(obj: &dyn SaddleObjective, pd: &ProductDomain, z: &PointPair) -> Result<()> {
    if obj.dims() != pd.dims() {
        return Err(Error::invalid(format!(
            "objective dimensions {:?} do not match domain dimensions {:?}",
            obj.dims(),
            pd.dims()
        )));
    }
    if z.dims() != pd.dims() {
        return Err(Error::invalid("point dimensions do not match the domain"));
    }
    Ok(())
}

/// Run controls shared by all three algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Stop once `g^FW ≤ eps`.
    pub eps: f64,
    pub max_iters: usize,
    /// Starting point; the oracle's tie-break vertex pair when absent.
    pub start: Option<PointPair>,
    /// Keep `z^(t)` in every record.
    pub record_iterates: bool,
    /// Fault injection for exercising the verification suite: choose the
    /// away atom with the wrong sign. Never set this in real runs.
    pub flip_away_sign: bool,
}

impl SolverOptions {
    pub fn new(eps: f64, max_iters: usize) -> Self {
        Self {
            eps,
            max_iters,
            start: None,
            record_iterates: false,
            flip_away_sign: false,
        }
    }

    pub fn with_start(mut self, start: PointPair) -> Self {
        self.start = Some(start);
        self
    }

    pub fn recording_iterates(mut self) -> Self {
        self.record_iterates = true;
        self
    }
}

/// Algorithm 2 (SP-FW).
pub fn run_spfw(
    obj: &dyn SaddleObjective,
    pd: &ProductDomain,
    rule: StepRule,
    eps: f64,
    max_iters: usize,
) -> Result<SolverTrace> {
    run(obj, pd, rule, Algorithm::SpFw, &SolverOptions::new(eps, max_iters))
}

/// Algorithm 3 (SP-AFW).
pub fn run_spafw(
    obj: &dyn SaddleObjective,
    pd: &ProductDomain,
    rule: StepRule,
    eps: f64,
    max_iters: usize,
) -> Result<SolverTrace> {
    run(obj, pd, rule, Algorithm::SpAfw, &SolverOptions::new(eps, max_iters))
}

/// Algorithm 4 (SP-PFW).
pub fn run_sppfw(
    obj: &dyn SaddleObjective,
    pd: &ProductDomain,
    rule: StepRule,
    eps: f64,
    max_iters: usize,
) -> Result<SolverTrace> {
    run(obj, pd, rule, Algorithm::SpPfw, &SolverOptions::new(eps, max_iters))
}

fn start_point(pd: &ProductDomain, algo: Algorithm, opts: &SolverOptions) -> Result<PointPair> {
    let Some(z) = opts.start.clone() else {
        return Ok(pd.tiebreak_vertex());
    };
    if z.dims() != pd.dims() {
        return Err(Error::invalid("start point dimensions do not match the domain"));
    }
    let vertex = pd.x.is_vertex(&z.x) && pd.y.is_vertex(&z.y);
    if algo != Algorithm::SpFw {
        if !vertex {
            return Err(Error::invalid(
                "away and pairwise variants must start from a vertex pair",
            ));
        }
        return Ok(z);
    }
    let polytope_listed = |k: &DomainKind| matches!(k, DomainKind::VertexPolytope { .. });
    if !vertex {
        if polytope_listed(pd.x.kind()) || polytope_listed(pd.y.kind()) {
            return Err(Error::invalid(
                "start inside a vertex-listed polytope must be one of its vertices",
            ));
        }
        if !pd.contains(&z, MEMBERSHIP_TOL)? {
            return Err(Error::invalid("start point lies outside the domain"));
        }
    }
    Ok(z)
}

/// Runs one of the three algorithms with full options.
pub fn run(
    obj: &dyn SaddleObjective,
    pd: &ProductDomain,
    rule: StepRule,
    algo: Algorithm,
    opts: &SolverOptions,
) -> Result<SolverTrace> {
    rule.validate()?;
    if !(opts.eps.is_finite() && opts.eps >= 0.0) {
        return Err(Error::invalid(format!("eps must be finite and nonnegative, got {}", opts.eps)));
    }
    match algo {
        Algorithm::SpFw => {}
        Algorithm::SpAfw | Algorithm::SpPfw => {
            if !(pd.x.is_polytope() && pd.y.is_polytope()) {
                return Err(Error::unsupported(format!(
                    "{} needs polytope domains in both blocks",
                    algo.as_str()
                )));
            }
        }
        Algorithm::FictitiousPlay => {
            return Err(Error::unsupported(
                "fictitious play is SP-FW with the harmonic rule on simplices",
            ))
        }
    }
    let mut z = start_point(pd, algo, opts)?;
    check_dims(obj, pd, &z)?;
    let mut active = (algo != Algorithm::SpFw).then(|| ActiveSetPair::singleton(&z));
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut k = 0usize;
    let mut t = 0usize;

    loop {
        let field = vip_field(obj, &z);
        if !z.is_finite() || !field.is_finite() || !obj.value(&z).is_finite() {
            let trace = SolverTrace {
                algorithm: algo,
                rule: rule.name().into(),
                records,
                final_point: z,
                final_gaps: GapReport::default(),
                final_k: k,
                final_active_sizes: active.as_ref().map(ActiveSetPair::sizes),
                status: Status::BudgetExhausted,
            };
            return Err(Error::NumericalFailure {
                iteration: t,
                message: "objective or gradient is not finite".into(),
                trace: Box::new(trace),
            });
        }
        let eval = gaps_with_field(obj, pd, &z, field, active.as_ref(), opts.flip_away_sign)?;
        let converged = eval.report.g_fw <= opts.eps;
        if converged || t >= opts.max_iters {
            return Ok(SolverTrace {
                algorithm: algo,
                rule: rule.name().into(),
                records,
                final_point: z,
                final_gaps: eval.report,
                final_k: k,
                final_active_sizes: active.as_ref().map(ActiveSetPair::sizes),
                status: if converged {
                    Status::Converged
                } else {
                    Status::BudgetExhausted
                },
            });
        }

        let fw_dir = eval.s.sub(&z);
        let fw_distance = fw_dir.block_norm();
        let mut ctx = StepContext {
            g: eval.report.g_fw,
            g_pfw: eval.report.g_pfw,
            k_t: k,
            t,
            dist_sq: Some(fw_distance * fw_distance),
            gamma_max: 1.0,
        };
        let sizes = active.as_ref().map(ActiveSetPair::sizes);
        let iterate = opts.record_iterates.then(|| z.clone());

        let (kind, gamma, z_next) = match (algo, active.as_mut(), eval.away.as_ref()) {
            (Algorithm::SpFw, _, _) => {
                let gamma = step_size(&rule, &ctx)?;
                (StepKind::Fw, gamma, z.lerp(&eval.s, gamma))
            }
            (Algorithm::SpAfw, Some(act), Some((v, ax, ay))) => {
                let g_away = eval.report.g_away.unwrap_or(0.0);
                if eval.report.g_fw >= g_away {
                    let gamma = step_size(&rule, &ctx)?;
                    act.x.fw_update(&eval.s.x, gamma);
                    act.y.fw_update(&eval.s.y, gamma);
                    (StepKind::Fw, gamma, z.lerp(&eval.s, gamma))
                } else {
                    ctx.gamma_max = away_gamma_max(*ax, *ay);
                    let gamma = step_size(&rule, &ctx)?;
                    let drop = gamma == ctx.gamma_max && ctx.gamma_max < 1.0;
                    let hits = |a: f64| drop && away_gamma_max(a, 1.0) == ctx.gamma_max;
                    act.x.away_update(&v.x, gamma, hits(*ax));
                    act.y.away_update(&v.y, gamma, hits(*ay));
                    let kind = if drop { StepKind::Drop } else { StepKind::Away };
                    (kind, gamma, z.axpy(&z.sub(v), gamma))
                }
            }
            (Algorithm::SpPfw, Some(act), Some((v, ax, ay))) => {
                ctx.gamma_max = pairwise_gamma_max(*ax, *ay);
                let gamma = step_size(&rule, &ctx)?;
                let full = gamma == ctx.gamma_max;
                act.x.pairwise_update(&eval.s.x, &v.x, gamma, full && *ax == gamma);
                act.y.pairwise_update(&eval.s.y, &v.y, gamma, full && *ay == gamma);
                (StepKind::Pairwise, gamma, z.axpy(&eval.s.sub(v), gamma))
            }
            _ => unreachable!("active-set variants always carry an active set"),
        };

        records.push(IterationRecord {
            t,
            k_t: k,
            step_kind: kind,
            gamma,
            gamma_max: ctx.gamma_max,
            gaps: eval.report,
            active_sizes: sizes,
            fw_distance,
            iterate,
        });
        if kind != StepKind::Drop {
            k += 1;
        }
        z = z_next;
        t += 1;
        if let Some(act) = active.as_mut() {
            act.maintain(t);
            act.check_represents(&z)?;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::Domain;
    use crate::linalg::Matrix;
    use crate::objectives::{MatrixGameProblem, QuadBilinearProblem};

    fn decoupled_1d() -> QuadBilinearProblem {
        QuadBilinearProblem::new(1.0, Matrix::zeros(1, 1), vec![0.5], vec![0.5]).unwrap()
    }

    fn pennies() -> MatrixGameProblem {
        MatrixGameProblem::new(Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap())
            .unwrap()
    }

    #[test]
    fn gaps_at_origin() {
        let p = decoupled_1d();
        let z = PointPair::new(vec![0.0], vec![0.0]);
        let e = compute_gaps(&p, p.domain(), &z, None).unwrap();
        assert_eq!(e.field, PointPair::new(vec![-0.5], vec![-0.5]));
        assert_eq!(e.s, PointPair::new(vec![1.0], vec![1.0]));
        assert_eq!((e.report.g_x, e.report.g_y, e.report.g_fw), (0.5, 0.5, 1.0));
    }

    #[test]
    fn pennies_singleton_gaps() {
        let p = pennies();
        let z = PointPair::new(vec![1.0, 0.0], vec![0.0, 1.0]);
        let act = ActiveSetPair::singleton(&z);
        let e = compute_gaps(&p, p.domain(), &z, Some(&act)).unwrap();
        assert_eq!(e.away.as_ref().unwrap().0, z);
        assert_eq!(e.report.g_away, Some(0.0));
        assert_eq!(e.report.g_fw, 2.0);
        assert_eq!(e.report.g_pfw, Some(2.0));
    }

    #[test]
    fn inconsistent_active_set_is_rejected() {
        let p = pennies();
        let z = PointPair::new(vec![1.0, 0.0], vec![0.0, 1.0]);
        let act = ActiveSetPair::singleton(&PointPair::new(vec![0.0, 1.0], vec![0.0, 1.0]));
        assert!(matches!(
            compute_gaps(&p, p.domain(), &z, Some(&act)),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn two_universal_iterations_by_hand() {
        let p = decoupled_1d();
        let opts = SolverOptions::new(0.0, 2)
            .with_start(PointPair::new(vec![0.0], vec![0.0]))
            .recording_iterates();
        let tr = run(&p, p.domain(), StepRule::Universal, Algorithm::SpFw, &opts).unwrap();
        assert_eq!(tr.records[0].gamma, 1.0);
        assert_eq!(tr.records[1].iterate, Some(PointPair::new(vec![1.0], vec![1.0])));
        assert!((tr.records[1].gamma - 2.0 / 3.0).abs() < 1e-15);
        assert!((tr.final_point.x[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((tr.final_point.y[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn start_at_saddle_stops_immediately() {
        let p = decoupled_1d();
        let opts = SolverOptions::new(0.0, 10).with_start(p.saddle().clone());
        let tr = run(&p, p.domain(), StepRule::Universal, Algorithm::SpFw, &opts).unwrap();
        assert_eq!(tr.status, Status::Converged);
        assert!(tr.records.is_empty());
    }

    #[test]
    fn singleton_pairwise_equals_fw_step() {
        let mut rng = crate::rng::SeededRng::new(5);
        let p = QuadBilinearProblem::generate(
            2,
            1.0,
            0.1,
            crate::objectives::SaddleMode::Interior,
            &mut rng,
        )
        .unwrap();
        let start = PointPair::new(vec![0.0, 1.0], vec![1.0, 0.0]);
        let one = |algo| {
            let opts = SolverOptions::new(0.0, 1).with_start(start.clone());
            run(&p, p.domain(), StepRule::Universal, algo, &opts).unwrap()
        };
        let fw = one(Algorithm::SpFw);
        let pw = one(Algorithm::SpPfw);
        assert_eq!(pw.records[0].gamma_max, 1.0);
        assert!(fw.final_point.max_abs_diff(&pw.final_point) < 1e-15);
    }

    #[test]
    fn away_variants_reject_balls_and_interior_starts() {
        let ball = Domain::l2_ball(vec![0.0], 1.0).unwrap();
        let pd = ProductDomain::new(ball.clone(), ball);
        let p = crate::objectives::BallGameProblem::new(
            vec![2.0],
            vec![2.0],
            Matrix::zeros(1, 1),
            pd.x.clone(),
            pd.y.clone(),
        )
        .unwrap();
        assert!(matches!(
            run_spafw(&p, &pd, StepRule::Universal, 1e-6, 10),
            Err(Error::Unsupported(_))
        ));
        let q = decoupled_1d();
        let opts = SolverOptions::new(1e-6, 10).with_start(PointPair::new(vec![0.3], vec![0.0]));
        assert!(run(&q, q.domain(), StepRule::Universal, Algorithm::SpAfw, &opts).is_err());
    }

    #[test]
    fn adaptive_rule_refused_for_nonpositive_nu() {
        let p = decoupled_1d();
        let rule = StepRule::Adaptive { nu: -0.2, c: 1.0 };
        assert!(run_spfw(&p, p.domain(), rule, 1e-6, 10).is_err());
    }
}
