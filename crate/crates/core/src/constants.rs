//! Step-size and rate constants computed from Lipschitz, strong-convexity
//! and geometric primitives.
//!
//! The affine-invariant quantities (curvature, interior/geometric strong
//! convex-concavity, bilinearity, primal relation constant) are never
//! evaluated directly; every function here returns the computable bound.

use crate::error::{Error, Result};
use crate::objectives::{BallGameProblem, MatrixGameProblem, QuadBilinearProblem, SaddleObjective};

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

fn require_nonnegative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be nonnegative, got {v}")))
    }
}

/// `C = L (D_X² + D_Y²) / 2`.
pub fn curvature_bound(l: f64, d_x: f64, d_y: f64) -> Result<f64> {
    require_positive("L", l)?;
    require_nonnegative("D_X", d_x)?;
    require_nonnegative("D_Y", d_y)?;
    if d_x == 0.0 && d_y == 0.0 {
        return Err(Error::invalid("at least one block must have positive diameter"));
    }
    Ok(0.5 * l * (d_x * d_x + d_y * d_y))
}

/// `½ (L_XX D_X² + L_YY D_Y²)`, the tighter per-block curvature bound.
/// Reported alongside [`curvature_bound`] but not used by the step rules.
pub fn curvature_partial(l_xx: f64, l_yy: f64, d_x: f64, d_y: f64) -> Result<f64> {
    require_nonnegative("L_XX", l_xx)?;
    require_nonnegative("L_YY", l_yy)?;
    require_nonnegative("D_X", d_x)?;
    require_nonnegative("D_Y", d_y)?;
    Ok(0.5 * (l_xx * d_x * d_x + l_yy * d_y * d_y))
}

#[allow(clippy::too_many_arguments)]
fn nu_common(
    a: f64,
    width_x: f64,
    width_y: f64,
    mu_x: f64,
    mu_y: f64,
    d_x: f64,
    d_y: f64,
    l_xy: f64,
    l_yx: f64,
) -> Result<(f64, f64)> {
    require_positive("mu_X", mu_x)?;
    require_positive("mu_Y", mu_y)?;
    require_positive("width of X", width_x)?;
    require_positive("width of Y", width_y)?;
    require_nonnegative("L_XY", l_xy)?;
    require_nonnegative("L_YX", l_yx)?;
    let delta_mu = (mu_x * width_x * width_x).min(mu_y * width_y * width_y).sqrt();
    let coupling = (d_x * l_xy / mu_y.sqrt()).max(d_y * l_yx / mu_x.sqrt());
    let nu = a - std::f64::consts::SQRT_2 / delta_mu * coupling;
    Ok((delta_mu, nu))
}

/// Interior-saddle case: `δ_μ = √min(μ_X δ_X², μ_Y δ_Y²)` and
/// `ν = 1 − (√2/δ_μ) max{D_X L_XY/√μ_Y, D_Y L_YX/√μ_X}`.
///
/// `ν` may come out nonpositive; that is reported, not rejected.
#[allow(clippy::too_many_arguments)]
pub fn nu_interior(
    delta_x: f64,
    delta_y: f64,
    mu_x: f64,
    mu_y: f64,
    d_x: f64,
    d_y: f64,
    l_xy: f64,
    l_yx: f64,
) -> Result<(f64, f64)> {
    nu_common(1.0, delta_x, delta_y, mu_x, mu_y, d_x, d_y, l_xy, l_yx)
}

/// Polytope case: as [`nu_interior`] with pyramidal widths in place of
/// border distances and leading term `½`.
#[allow(clippy::too_many_arguments)]
pub fn nu_polytope(
    delta_a: Option<f64>,
    delta_b: Option<f64>,
    mu_x: f64,
    mu_y: f64,
    d_x: f64,
    d_y: f64,
    l_xy: f64,
    l_yx: f64,
) -> Result<(f64, f64)> {
    let (Some(wa), Some(wb)) = (delta_a, delta_b) else {
        return Err(Error::unsupported(
            "pyramidal width is unknown for this domain; supply it explicitly",
        ));
    };
    nu_common(0.5, wa, wb, mu_x, mu_y, d_x, d_y, l_xy, l_yx)
}

/// Geometric rate `ρ = ν² δ_μ² / (2C)`; `None` unless `ν > 0`.
pub fn geometric_rate(nu: f64, delta_mu: f64, c: f64) -> Option<f64> {
    (nu > 0.0 && delta_mu > 0.0 && c > 0.0).then(|| nu * nu * delta_mu * delta_mu / (2.0 * c))
}

/// Sublinear constant `2 max(w₀, 2C_L/(2ν−1))`; `None` unless `ν > ½`.
pub fn sublinear_constant(w0: f64, c_l: f64, nu: f64) -> Option<f64> {
    (nu > 0.5).then(|| 2.0 * w0.max(2.0 * c_l / (2.0 * nu - 1.0)))
}

/// Both rates at once: `(ρ, C_sub)`.
pub fn rates(nu: f64, delta_mu: f64, c: f64, w0: f64) -> (Option<f64>, Option<f64>) {
    (geometric_rate(nu, delta_mu, c), sublinear_constant(w0, c, nu))
}

/// Strongly-convex-set constants `C_δ = 2L + 8L²/(βδ)` and `ρ = βδ/(16 C_δ)`.
pub fn ball_constants(l: f64, beta: f64, delta: f64) -> Result<(f64, f64)> {
    require_positive("L", l)?;
    require_positive("beta", beta)?;
    require_positive("delta", delta)?;
    let c_delta = 2.0 * l + 8.0 * l * l / (beta * delta);
    Ok((c_delta, beta * delta / (16.0 * c_delta)))
}

/// `P_L ≤ √2 max{sup‖∇ₓL‖/√μ_X, sup‖∇ᵧL‖/√μ_Y}`.
pub fn p_l_bound(mu_x: f64, mu_y: f64, grad_sup_x: f64, grad_sup_y: f64) -> Result<f64> {
    require_positive("mu_X", mu_x)?;
    require_positive("mu_Y", mu_y)?;
    require_nonnegative("sup ‖∇ₓL‖", grad_sup_x)?;
    require_nonnegative("sup ‖∇ᵧL‖", grad_sup_y)?;
    Ok(std::f64::consts::SQRT_2 * (grad_sup_x / mu_x.sqrt()).max(grad_sup_y / mu_y.sqrt()))
}

/// Gradient-norm supremum bound from a reference point:
/// `‖∇(z̄)‖ + L_self D_self + L_cross D_other`.
pub fn grad_sup_bound(grad_norm_at_ref: f64, l_self: f64, d_self: f64, l_cross: f64, d_other: f64) -> f64 {
    grad_norm_at_ref + l_self * d_self + l_cross * d_other
}

/// `M_XY ≤ √(2/μ_Y) L_XY D_X` and `M_YX ≤ √(2/μ_X) L_YX D_Y`;
/// `None` when either `μ` is not positive.
pub fn m_bounds(mu_x: f64, mu_y: f64, d_x: f64, d_y: f64, l_xy: f64, l_yx: f64) -> Option<(f64, f64)> {
    (mu_x > 0.0 && mu_y > 0.0).then(|| {
        (
            (2.0 / mu_y).sqrt() * l_xy * d_x,
            (2.0 / mu_x).sqrt() * l_yx * d_y,
        )
    })
}

/// `C̃ = L D_X² + L D_Y² + L_XY L_YX (D_X²/μ_X + D_Y²/μ_Y)`.
#[allow(clippy::too_many_arguments)]
pub fn heuristic_c_tilde(l: f64, d_x: f64, d_y: f64, l_xy: f64, l_yx: f64, mu_x: f64, mu_y: f64) -> Result<f64> {
    require_positive("mu_X", mu_x)?;
    require_positive("mu_Y", mu_y)?;
    require_nonnegative("L", l)?;
    Ok(l * d_x * d_x + l * d_y * d_y + l_xy * l_yx * (d_x * d_x / mu_x + d_y * d_y / mu_y))
}

/// Gradient Lipschitz constants in the Euclidean product norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub l: f64,
    pub l_xx: f64,
    pub l_xy: f64,
    pub l_yx: f64,
    pub l_yy: f64,
}

impl Lipschitz {
    pub fn new(l: f64, l_xx: f64, l_xy: f64, l_yx: f64, l_yy: f64) -> Result<Self> {
        for (name, v) in [("L_XX", l_xx), ("L_XY", l_xy), ("L_YX", l_yx), ("L_YY", l_yy)] {
            require_nonnegative(name, v)?;
        }
        require_positive("L", l)?;
        let partial_max = l_xx.max(l_xy).max(l_yx).max(l_yy);
        if l < partial_max {
            return Err(Error::invalid(format!(
                "global L = {l} is below the largest partial constant {partial_max}"
            )));
        }
        Ok(Self { l, l_xx, l_xy, l_yx, l_yy })
    }
}

/// Which convergence regime the constants are assembled for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateCase {
    /// Saddle strictly inside the domain (border distances).
    Interior,
    /// Polytope domains (pyramidal widths).
    Polytope,
}

impl RateCase {
    pub fn as_str(self) -> &'static str {
        match self {
            RateCase::Interior => "interior",
            RateCase::Polytope => "polytope",
        }
    }
}

/// Every constant appearing in the step rules and the proven bounds.
/// Quantities that do not apply to a problem are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConstants {
    pub case: Option<RateCase>,
    pub lip: Lipschitz,
    pub mu_x: f64,
    pub mu_y: f64,
    pub d_x: f64,
    pub d_y: f64,
    /// Border distances of the saddle (interior case).
    pub delta_x: Option<f64>,
    pub delta_y: Option<f64>,
    /// Pyramidal widths (polytope case).
    pub delta_a: Option<f64>,
    pub delta_b: Option<f64>,
    pub delta_mu: Option<f64>,
    pub nu: Option<f64>,
    pub c: f64,
    pub c_partial: f64,
    pub rho: Option<f64>,
    pub p_l_bound: Option<f64>,
    pub m_xy_bound: Option<f64>,
    pub m_yx_bound: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub c_delta: Option<f64>,
    pub rho_ball: Option<f64>,
    pub c_tilde: Option<f64>,
}

impl ProblemConstants {
    fn base(lip: Lipschitz, mu_x: f64, mu_y: f64, d_x: f64, d_y: f64) -> Result<Self> {
        let c = curvature_bound(lip.l, d_x, d_y)?;
        let c_partial = curvature_partial(lip.l_xx, lip.l_yy, d_x, d_y)?;
        let (m_xy_bound, m_yx_bound) = match m_bounds(mu_x, mu_y, d_x, d_y, lip.l_xy, lip.l_yx) {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        let c_tilde = heuristic_c_tilde(lip.l, d_x, d_y, lip.l_xy, lip.l_yx, mu_x, mu_y).ok();
        Ok(Self {
            case: None,
            lip,
            mu_x,
            mu_y,
            d_x,
            d_y,
            delta_x: None,
            delta_y: None,
            delta_a: None,
            delta_b: None,
            delta_mu: None,
            nu: None,
            c,
            c_partial,
            rho: None,
            p_l_bound: None,
            m_xy_bound,
            m_yx_bound,
            beta: None,
            delta: None,
            c_delta: None,
            rho_ball: None,
            c_tilde,
        })
    }

    /// Constants for the quadratic-bilinear cube problem.
    ///
    /// Uses `L_XX = L_YY = μ`, `L_XY = L_YX = ‖M‖₂`, `L = μ + ‖M‖₂`, and
    /// the reference-point gradient bound at the saddle (where `∇L = 0`).
    pub fn quad_bilinear(p: &QuadBilinearProblem, case: RateCase) -> Result<Self> {
        let mu = p.mu();
        let sigma = p.matrix().spectral_norm();
        let lip = Lipschitz::new(mu + sigma, mu, sigma, sigma, mu)?;
        let dom = p.domain();
        let (d_x, d_y) = (dom.x.diameter(), dom.y.diameter());
        let mut k = Self::base(lip, mu, mu, d_x, d_y)?;
        k.case = Some(case);
        let (delta_mu, nu) = match case {
            RateCase::Interior => {
                let dx = dom.x.border_distance(&p.saddle().x)?;
                let dy = dom.y.border_distance(&p.saddle().y)?;
                k.delta_x = Some(dx);
                k.delta_y = Some(dy);
                nu_interior(dx, dy, mu, mu, d_x, d_y, sigma, sigma)?
            }
            RateCase::Polytope => {
                k.delta_a = dom.x.pyramidal_width();
                k.delta_b = dom.y.pyramidal_width();
                nu_polytope(k.delta_a, k.delta_b, mu, mu, d_x, d_y, sigma, sigma)?
            }
        };
        k.delta_mu = Some(delta_mu);
        k.nu = Some(nu);
        k.rho = geometric_rate(nu, delta_mu, k.c);
        let sup_x = grad_sup_bound(0.0, lip.l_xx, d_x, lip.l_xy, d_y);
        let sup_y = grad_sup_bound(0.0, lip.l_yy, d_y, lip.l_yx, d_x);
        k.p_l_bound = Some(p_l_bound(mu, mu, sup_x, sup_y)?);
        Ok(k)
    }

    /// Constants for the strongly-convex-set ball game (`μ = 0`).
    pub fn ball_game(p: &BallGameProblem) -> Result<Self> {
        let sigma = p.matrix().spectral_norm();
        let lip = Lipschitz::new(sigma, 0.0, sigma, sigma, 0.0)?;
        let dom = p.domain();
        let mut k = Self::base(lip, 0.0, 0.0, dom.x.diameter(), dom.y.diameter())?;
        let beta = dom
            .x
            .strong_convexity()
            .zip(dom.y.strong_convexity())
            .map(|(a, b)| a.min(b))
            .ok_or_else(|| Error::unsupported("ball game domains must be strongly convex"))?;
        let (c_delta, rho_ball) = ball_constants(sigma, beta, p.delta())?;
        k.beta = Some(beta);
        k.delta = Some(p.delta());
        k.c_delta = Some(c_delta);
        k.rho_ball = Some(rho_ball);
        Ok(k)
    }

    /// Constants for a bilinear matrix game (no strong convex-concavity, so
    /// only the curvature bound applies; `C = 0` for a zero matrix is
    /// reported as `L = 0` and rejected by the adaptive rule downstream).
    pub fn matrix_game(p: &MatrixGameProblem) -> Result<Self> {
        let sigma = p.matrix().spectral_norm().max(f64::MIN_POSITIVE);
        let lip = Lipschitz::new(sigma, 0.0, sigma, sigma, 0.0)?;
        let (dx, dy) = (p.domain().x.diameter(), p.domain().y.diameter());
        if dx == 0.0 && dy == 0.0 {
            return Err(Error::invalid("both simplices are single points"));
        }
        Self::base(lip, 0.0, 0.0, dx, dy)
    }

    /// Sublinear constant for a trace starting at merit `w0`.
    pub fn sublinear(&self, w0: f64) -> Option<f64> {
        self.nu.and_then(|nu| sublinear_constant(w0, self.c, nu))
    }

    /// Ordered `key=value` pairs for self-describing trace headers.
    pub fn header_lines(&self) -> Vec<(String, String)> {
        let f = |v: f64| format!("{v:.17e}");
        let o = |v: Option<f64>| v.map(f).unwrap_or_else(|| "none".into());
        vec![
            ("case".into(), self.case.map(|c| c.as_str().to_string()).unwrap_or_else(|| "none".into())),
            ("L".into(), f(self.lip.l)),
            ("L_XX".into(), f(self.lip.l_xx)),
            ("L_XY".into(), f(self.lip.l_xy)),
            ("L_YX".into(), f(self.lip.l_yx)),
            ("L_YY".into(), f(self.lip.l_yy)),
            ("mu_X".into(), f(self.mu_x)),
            ("mu_Y".into(), f(self.mu_y)),
            ("D_X".into(), f(self.d_x)),
            ("D_Y".into(), f(self.d_y)),
            ("delta_X".into(), o(self.delta_x)),
            ("delta_Y".into(), o(self.delta_y)),
            ("delta_A".into(), o(self.delta_a)),
            ("delta_B".into(), o(self.delta_b)),
            ("delta_mu".into(), o(self.delta_mu)),
            ("nu".into(), o(self.nu)),
            ("C".into(), f(self.c)),
            ("C_partial".into(), f(self.c_partial)),
            ("rho".into(), o(self.rho)),
            ("P_L_bound".into(), o(self.p_l_bound)),
            ("M_XY_bound".into(), o(self.m_xy_bound)),
            ("M_YX_bound".into(), o(self.m_yx_bound)),
            ("beta".into(), o(self.beta)),
            ("delta".into(), o(self.delta)),
            ("C_delta".into(), o(self.c_delta)),
            ("rho_ball".into(), o(self.rho_ball)),
            ("C_tilde".into(), o(self.c_tilde)),
        ]
    }
}

/// Convenience: the gradient norms at a point, used for sampling checks.
pub fn gradient_norms(obj: &dyn SaddleObjective, z: &crate::objectives::PointPair) -> (f64, f64) {
    (crate::linalg::norm(&obj.grad_x(z)), crate::linalg::norm(&obj.grad_y(z)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::objectives::SaddleMode;
    use crate::rng::SeededRng;

    #[test]
    fn curvature_examples() {
        assert_eq!(curvature_bound(1.0, 2.0, 2.0).unwrap(), 4.0);
        assert_eq!(curvature_bound(3.0, 2.0, 0.0).unwrap(), 6.0);
        assert!(curvature_bound(0.0, 1.0, 1.0).is_err());
        assert!(curvature_bound(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn nu_examples() {
        let (_, nu) = nu_interior(0.3, 0.2, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(nu, 1.0);
        let (_, nu) = nu_polytope(Some(0.5), Some(0.5), 1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(nu, 0.5);
        assert!(matches!(
            nu_polytope(None, Some(0.5), 1.0, 1.0, 1.0, 1.0, 0.0, 0.0),
            Err(Error::Unsupported(_))
        ));
        assert!(nu_interior(0.3, 0.2, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0).is_err());
        // μ → 0⁺ drives ν to −∞
        let (_, tiny) = nu_interior(0.3, 0.3, 1e-8, 1e-8, 1.0, 1.0, 0.1, 0.1).unwrap();
        assert!(tiny < -1e6);
    }

    #[test]
    fn nu_polytope_scaling_in_mu() {
        let (dm1, nu1) = nu_polytope(Some(0.2), Some(0.2), 1.0, 1.0, 2.0, 2.0, 0.1, 0.1).unwrap();
        let (dm4, nu4) = nu_polytope(Some(0.2), Some(0.2), 4.0, 4.0, 2.0, 2.0, 0.1, 0.1).unwrap();
        assert!((dm4 - 2.0 * dm1).abs() < 1e-15);
        // coupling/δ_μ scales as 1/μ: (½ − ν₄) = (½ − ν₁)/4
        assert!(((0.5 - nu4) - (0.5 - nu1) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn rate_examples() {
        assert_eq!(geometric_rate(1.0, 1.0, 2.0), Some(0.25));
        assert_eq!(sublinear_constant(1.0, 2.0, 0.75), Some(16.0));
        assert_eq!(sublinear_constant(1.0, 2.0, 0.4), None);
        assert_eq!(sublinear_constant(1.0, 2.0, 0.5), None);
        assert_eq!(geometric_rate(-0.1, 1.0, 2.0), None);
    }

    #[test]
    fn ball_constant_examples() {
        let (c, rho) = ball_constants(1.0, 1.0, 1.0).unwrap();
        assert_eq!(c, 10.0);
        assert!((rho - 1.0 / 160.0).abs() < 1e-18);
        let (c_big, _) = ball_constants(1.0, 1.0, 1e12).unwrap();
        assert!((c_big - 2.0).abs() < 1e-10);
        assert!(ball_constants(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn p_l_examples() {
        let b = p_l_bound(1.0, 1.0, 0.5, 0.5).unwrap();
        assert!((b - 2f64.sqrt() * 0.5).abs() < 1e-15);
        let b4 = p_l_bound(4.0, 4.0, 0.5, 0.5).unwrap();
        assert!((b4 - b / 2.0).abs() < 1e-15);
        assert!(p_l_bound(0.0, 1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn m_bound_examples() {
        assert_eq!(m_bounds(1.0, 1.0, 1.0, 1.0, 0.0, 0.0), Some((0.0, 0.0)));
        let (mxy, _) = m_bounds(1.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((mxy - 1.0).abs() < 1e-15);
        assert_eq!(m_bounds(0.0, 0.0, 1.0, 1.0, 1.0, 1.0), None);
    }

    #[test]
    fn c_tilde_examples() {
        assert_eq!(heuristic_c_tilde(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap(), 4.0);
        assert_eq!(heuristic_c_tilde(1.0, 2.0, 2.0, 0.5, 0.5, 1.0, 1.0).unwrap(), 10.0);
        let c = curvature_bound(3.0, 1.5, 0.5).unwrap();
        assert_eq!(heuristic_c_tilde(3.0, 1.5, 0.5, 0.0, 0.0, 1.0, 1.0).unwrap(), 2.0 * c);
        assert!(heuristic_c_tilde(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn lipschitz_ordering_enforced() {
        assert!(Lipschitz::new(1.0, 2.0, 0.0, 0.0, 0.0).is_err());
        assert!(Lipschitz::new(2.0, 1.0, 1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn decoupled_quad_bilinear_nu() {
        let p = QuadBilinearProblem::new(2.0, Matrix::zeros(3, 3), vec![0.5; 3], vec![0.4; 3]).unwrap();
        let ki = ProblemConstants::quad_bilinear(&p, RateCase::Interior).unwrap();
        assert_eq!(ki.nu, Some(1.0));
        let rho = ki.rho.unwrap();
        assert!(rho > 0.0 && rho < 1.0);
        let kp = ProblemConstants::quad_bilinear(&p, RateCase::Polytope).unwrap();
        assert_eq!(kp.nu, Some(0.5));
        assert_eq!(kp.delta_a, Some(1.0 / 3f64.sqrt()));
    }

    #[test]
    fn vertex_saddle_has_no_interior_constants() {
        let mut rng = SeededRng::new(2);
        let p = QuadBilinearProblem::generate(4, 1.0, 0.1, SaddleMode::Vertex, &mut rng).unwrap();
        assert!(ProblemConstants::quad_bilinear(&p, RateCase::Interior).is_err());
        assert!(ProblemConstants::quad_bilinear(&p, RateCase::Polytope).is_ok());
    }

    #[test]
    fn curvature_homogeneity() {
        let c1 = curvature_bound(1.5, 2.0, 3.0).unwrap();
        let c2 = curvature_bound(4.5, 2.0, 3.0).unwrap();
        assert!((c2 - 3.0 * c1).abs() < 1e-12);
    }
}
