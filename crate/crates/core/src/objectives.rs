//! Convex-concave objectives `L(x, y)` and the three benchmark problems.

use crate::domains::{Domain, ProductDomain};
use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm, Matrix};
use crate::rng::SeededRng;

/// A joint point `z = (x, y)` of the product domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PointPair {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    pub fn dot(&self, other: &PointPair) -> f64 {
        dot(&self.x, &other.x) + dot(&self.y, &other.y)
    }

    pub fn sub(&self, other: &PointPair) -> PointPair {
        PointPair::new(linalg::sub(&self.x, &other.x), linalg::sub(&self.y, &other.y))
    }

    pub fn neg(&self) -> PointPair {
        PointPair::new(
            self.x.iter().map(|v| -v).collect(),
            self.y.iter().map(|v| -v).collect(),
        )
    }

    /// `(1 − γ) self + γ other`, blockwise.
    pub fn lerp(&self, other: &PointPair, gamma: f64) -> PointPair {
        PointPair::new(
            linalg::lerp(&self.x, &other.x, gamma),
            linalg::lerp(&self.y, &other.y, gamma),
        )
    }

    /// `self + γ d`
    pub fn axpy(&self, d: &PointPair, gamma: f64) -> PointPair {
        PointPair::new(linalg::axpy(&self.x, &d.x, gamma), linalg::axpy(&self.y, &d.y, gamma))
    }

    /// Euclidean norm on the stacked vector.
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `‖x‖ + ‖y‖`, the product norm used for the strongly-convex-set analysis.
    pub fn block_norm(&self) -> f64 {
        norm(&self.x) + norm(&self.y)
    }

    pub fn is_finite(&self) -> bool {
        linalg::all_finite(&self.x) && linalg::all_finite(&self.y)
    }

    pub fn max_abs_diff(&self, other: &PointPair) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.y.iter().zip(&other.y))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Smooth convex-concave objective, minimised over `x` and maximised over `y`.
pub trait SaddleObjective: Send + Sync {
    fn dims(&self) -> (usize, usize);

    fn value(&self, z: &PointPair) -> f64;

    fn grad_x(&self, z: &PointPair) -> Vec<f64>;

    fn grad_y(&self, z: &PointPair) -> Vec<f64>;

    /// `argmin_{x ∈ X} L(x, y)`, when available in closed form.
    fn best_response_x(&self, _y: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// `argmax_{y ∈ Y} L(x, y)`, when available in closed form.
    fn best_response_y(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn known_saddle(&self) -> Option<&PointPair> {
        None
    }

    /// `L* = L(x*, y*)`.
    fn known_value(&self) -> Option<f64> {
        self.known_saddle().map(|s| self.value(s))
    }
}

/// `F(z) = (∇ₓL(z), −∇ᵧL(z))`, the direction handed to the oracle.
pub fn vip_field(obj: &dyn SaddleObjective, z: &PointPair) -> PointPair {
    let gx = obj.grad_x(z);
    let gy = obj.grad_y(z).into_iter().map(|v| -v).collect();
    PointPair::new(gx, gy)
}

/// `h(z) = L(x, ŷ(x)) − L(x̂(y), y)`.
pub fn suboptimality_h(obj: &dyn SaddleObjective, z: &PointPair) -> Result<f64> {
    let (Some(bx), Some(by)) = (obj.best_response_x(&z.y), obj.best_response_y(&z.x)) else {
        return Err(Error::unsupported("objective provides no best responses"));
    };
    let upper = obj.value(&PointPair::new(z.x.clone(), by));
    let lower = obj.value(&PointPair::new(bx, z.y.clone()));
    Ok(upper - lower)
}

/// `w(z) = L(x, y*) − L(x*, y)`.
pub fn merit_w(obj: &dyn SaddleObjective, z: &PointPair) -> Result<f64> {
    let s = obj
        .known_saddle()
        .ok_or_else(|| Error::unsupported("objective has no known saddle point"))?;
    let upper = obj.value(&PointPair::new(z.x.clone(), s.y.clone()));
    let lower = obj.value(&PointPair::new(s.x.clone(), z.y.clone()));
    Ok(upper - lower)
}

/// Where the constructed saddle of a [`QuadBilinearProblem`] sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleMode {
    /// Uniform in `[0.25, 0.75]^{2d}`.
    Interior,
    /// A random vertex of the cube pair.
    Vertex,
}

/// `(μ/2)‖x−x*‖² + (x−x*)ᵀM(y−y*) − (μ/2)‖y−y*‖²` over `[0,1]^d × [0,1]^d`.
#[derive(Debug, Clone)]
pub struct QuadBilinearProblem {
    mu: f64,
    m: Matrix,
    saddle: PointPair,
    domain: ProductDomain,
}

impl QuadBilinearProblem {
    pub fn new(mu: f64, m: Matrix, x_star: Vec<f64>, y_star: Vec<f64>) -> Result<Self> {
        let d = x_star.len();
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid(format!("mu must be positive, got {mu}")));
        }
        if m.rows() != d || m.cols() != d || y_star.len() != d {
            return Err(Error::invalid("M must be d×d with x*, y* of length d"));
        }
        let domain = ProductDomain::new(Domain::unit_cube(d)?, Domain::unit_cube(d)?);
        let saddle = PointPair::new(x_star, y_star);
        if !domain.contains(&saddle, 0.0)? {
            return Err(Error::invalid("saddle point must lie in the unit cube pair"));
        }
        Ok(Self { mu, m, saddle, domain })
    }

    /// Random instance: `M ~ U([−scale, scale]^{d×d})` drawn row-major, then the
    /// saddle coordinates (x* then y*).
    ///
    /// Vertex saddles are certified by first-order optimality; a failing
    /// draw is discarded and regenerated.
    pub fn generate(
        d: usize,
        mu: f64,
        matrix_scale: f64,
        mode: SaddleMode,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        for _ in 0..100 {
            let m = Matrix::from_fn(d, d, |_, _| rng.uniform_in(-matrix_scale, matrix_scale));
            let (xs, ys) = match mode {
                SaddleMode::Interior => (rng.uniform_vec(d, 0.25, 0.75), rng.uniform_vec(d, 0.25, 0.75)),
                SaddleMode::Vertex => (
                    (0..d).map(|_| rng.below(2) as f64).collect(),
                    (0..d).map(|_| rng.below(2) as f64).collect(),
                ),
            };
            let p = Self::new(mu, m, xs, ys)?;
            if mode == SaddleMode::Interior || p.certify_saddle(rng)? {
                return Ok(p);
            }
        }
        Err(Error::InvariantViolation(
            "could not generate a certified vertex saddle".into(),
        ))
    }

    /// First-order optimality `⟨F(z*), v − z*⟩ ≥ 0` over all vertex pairs
    /// (exhaustive for `d ≤ 8`, 10⁴ random vertex pairs otherwise).
    pub fn certify_saddle(&self, rng: &mut SeededRng) -> Result<bool> {
        let f = vip_field(self, &self.saddle);
        let d = self.dim();
        let tol = 1e-12;
        // The blocks separate: the inequality holds for all pairs iff it
        // holds for each block's worst vertex.
        let check_block = |fb: &[f64], zb: &[f64], rng: &mut SeededRng| -> Result<bool> {
            let cube = Domain::unit_cube(d)?;
            if d <= 8 {
                for v in cube.enumerate_vertices(256)? {
                    if dot(fb, &linalg::sub(&v, zb)) < -tol {
                        return Ok(false);
                    }
                }
            } else {
                for _ in 0..10_000 {
                    let v: Vec<f64> = (0..d).map(|_| rng.below(2) as f64).collect();
                    if dot(fb, &linalg::sub(&v, zb)) < -tol {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        };
        Ok(check_block(&f.x, &self.saddle.x, rng)? && check_block(&f.y, &self.saddle.y, rng)?)
    }

    pub fn dim(&self) -> usize {
        self.saddle.x.len()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn saddle(&self) -> &PointPair {
        &self.saddle
    }

    pub fn domain(&self) -> &ProductDomain {
        &self.domain
    }
}

impl SaddleObjective for QuadBilinearProblem {
    fn dims(&self) -> (usize, usize) {
        (self.dim(), self.dim())
    }

    // Allocation-free: brute-force oracles call this ~10^8 times.
    fn value(&self, z: &PointPair) -> f64 {
        let (xs, ys) = (&self.saddle.x, &self.saddle.y);
        let mut sq_x = 0.0;
        let mut cross = 0.0;
        for i in 0..xs.len() {
            let dxi = z.x[i] - xs[i];
            sq_x += dxi * dxi;
            let mut row = 0.0;
            for (j, m) in self.m.row(i).iter().enumerate() {
                row += m * (z.y[j] - ys[j]);
            }
            cross += dxi * row;
        }
        let sq_y: f64 = z.y.iter().zip(ys).map(|(a, b)| (a - b) * (a - b)).sum();
        0.5 * self.mu * sq_x + cross - 0.5 * self.mu * sq_y
    }

    fn grad_x(&self, z: &PointPair) -> Vec<f64> {
        let dx = linalg::sub(&z.x, &self.saddle.x);
        let dy = linalg::sub(&z.y, &self.saddle.y);
        let mdy = self.m.mul_vec(&dy);
        dx.iter().zip(mdy).map(|(a, b)| self.mu * a + b).collect()
    }

    fn grad_y(&self, z: &PointPair) -> Vec<f64> {
        let dx = linalg::sub(&z.x, &self.saddle.x);
        let dy = linalg::sub(&z.y, &self.saddle.y);
        let mtdx = self.m.mul_t_vec(&dx);
        mtdx.iter().zip(dy).map(|(a, b)| a - self.mu * b).collect()
    }

    fn best_response_x(&self, y: &[f64]) -> Option<Vec<f64>> {
        // The x-part is (μ/2)‖x − x* + M(y−y*)/μ‖² + const; box projection is exact.
        let dy = linalg::sub(y, &self.saddle.y);
        let mdy = self.m.mul_vec(&dy);
        Some(
            self.saddle
                .x
                .iter()
                .zip(mdy)
                .map(|(xs, v)| (xs - v / self.mu).clamp(0.0, 1.0))
                .collect(),
        )
    }

    fn best_response_y(&self, x: &[f64]) -> Option<Vec<f64>> {
        let dx = linalg::sub(x, &self.saddle.x);
        let mtdx = self.m.mul_t_vec(&dx);
        Some(
            self.saddle
                .y
                .iter()
                .zip(mtdx)
                .map(|(ys, v)| (ys + v / self.mu).clamp(0.0, 1.0))
                .collect(),
        )
    }

    fn known_saddle(&self) -> Option<&PointPair> {
        Some(&self.saddle)
    }
}

/// `xᵀMy` over `Δ_p × Δ_q`.
#[derive(Debug, Clone)]
pub struct MatrixGameProblem {
    m: Matrix,
    domain: ProductDomain,
    saddle: Option<PointPair>,
}

impl MatrixGameProblem {
    pub fn new(m: Matrix) -> Result<Self> {
        let domain = ProductDomain::new(Domain::simplex(m.rows())?, Domain::simplex(m.cols())?);
        Ok(Self { m, domain, saddle: None })
    }

    /// Entries `U([−scale, scale])`, row-major.
    pub fn random(p: usize, q: usize, scale: f64, rng: &mut SeededRng) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::invalid("game dimensions must be positive"));
        }
        Self::new(Matrix::from_fn(p, q, |_, _| rng.uniform_in(-scale, scale)))
    }

    /// Attach an equilibrium known from outside (enables the merit `w`).
    pub fn with_saddle(mut self, saddle: PointPair) -> Result<Self> {
        if !self.domain.contains(&saddle, 1e-12)? {
            return Err(Error::invalid("equilibrium must lie on the simplices"));
        }
        self.saddle = Some(saddle);
        Ok(self)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn domain(&self) -> &ProductDomain {
        &self.domain
    }
}

impl SaddleObjective for MatrixGameProblem {
    fn dims(&self) -> (usize, usize) {
        (self.m.rows(), self.m.cols())
    }

    fn value(&self, z: &PointPair) -> f64 {
        self.m.bilinear(&z.x, &z.y)
    }

    fn grad_x(&self, z: &PointPair) -> Vec<f64> {
        self.m.mul_vec(&z.y)
    }

    fn grad_y(&self, z: &PointPair) -> Vec<f64> {
        self.m.mul_t_vec(&z.x)
    }

    // Both inner problems are linear, so the simplex oracle answers them exactly.
    fn best_response_x(&self, y: &[f64]) -> Option<Vec<f64>> {
        self.domain.x.linmin(&self.m.mul_vec(y)).ok()
    }

    fn best_response_y(&self, x: &[f64]) -> Option<Vec<f64>> {
        let neg: Vec<f64> = self.m.mul_t_vec(x).into_iter().map(|v| -v).collect();
        self.domain.y.linmin(&neg).ok()
    }

    fn known_saddle(&self) -> Option<&PointPair> {
        self.saddle.as_ref()
    }
}

/// `aᵀx + xᵀMy − bᵀy` over a pair of Euclidean balls, with gradients
/// bounded away from zero.
#[derive(Debug, Clone)]
pub struct BallGameProblem {
    a: Vec<f64>,
    b: Vec<f64>,
    m: Matrix,
    domain: ProductDomain,
    delta: f64,
}

impl BallGameProblem {
    /// Fails unless `δ = min(‖a‖ − ‖M‖·max‖y‖, ‖b‖ − ‖M‖·max‖x‖) > 0`.
    pub fn new(a: Vec<f64>, b: Vec<f64>, m: Matrix, x_ball: Domain, y_ball: Domain) -> Result<Self> {
        for dom in [&x_ball, &y_ball] {
            if !matches!(dom.kind(), crate::domains::DomainKind::L2Ball { .. }) {
                return Err(Error::invalid("ball game domains must be l2-balls"));
            }
        }
        if a.len() != x_ball.dim() || b.len() != y_ball.dim() || m.rows() != a.len() || m.cols() != b.len() {
            return Err(Error::invalid("dimensions of a, b, M and the balls disagree"));
        }
        let sigma = m.spectral_norm();
        let delta = (norm(&a) - sigma * y_ball.max_norm()).min(norm(&b) - sigma * x_ball.max_norm());
        if !(delta > 0.0) {
            return Err(Error::invalid(format!(
                "gradient lower bound must be positive, got δ = {delta}"
            )));
        }
        Ok(Self {
            a,
            b,
            m,
            domain: ProductDomain::new(x_ball, y_ball),
            delta,
        })
    }

    /// Random instance on two centred balls of radius `radius`: `M ~
    /// U([−scale, scale]^{d×d})`, then `a` and `b` along random directions
    /// with norm `‖M‖·radius + margin`, so `δ = margin`.
    pub fn random(d: usize, radius: f64, matrix_scale: f64, margin: f64, rng: &mut SeededRng) -> Result<Self> {
        if !(margin > 0.0) {
            return Err(Error::invalid("margin must be positive"));
        }
        let m = Matrix::from_fn(d, d, |_, _| rng.uniform_in(-matrix_scale, matrix_scale));
        let target = m.spectral_norm() * radius + margin;
        let dir = |rng: &mut SeededRng| {
            let g: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
            let n = norm(&g);
            g.into_iter().map(|v| target * v / n).collect::<Vec<f64>>()
        };
        let a = dir(rng);
        let b = dir(rng);
        Self::new(
            a,
            b,
            m,
            Domain::l2_ball(vec![0.0; d], radius)?,
            Domain::l2_ball(vec![0.0; d], radius)?,
        )
    }

    /// The certified gradient-norm lower bound `δ`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn domain(&self) -> &ProductDomain {
        &self.domain
    }
}

impl SaddleObjective for BallGameProblem {
    fn dims(&self) -> (usize, usize) {
        (self.a.len(), self.b.len())
    }

    fn value(&self, z: &PointPair) -> f64 {
        dot(&self.a, &z.x) + self.m.bilinear(&z.x, &z.y) - dot(&self.b, &z.y)
    }

    fn grad_x(&self, z: &PointPair) -> Vec<f64> {
        self.a.iter().zip(self.m.mul_vec(&z.y)).map(|(a, v)| a + v).collect()
    }

    fn grad_y(&self, z: &PointPair) -> Vec<f64> {
        self.m.mul_t_vec(&z.x).into_iter().zip(&self.b).map(|(v, b)| v - b).collect()
    }

    fn best_response_x(&self, y: &[f64]) -> Option<Vec<f64>> {
        let c: Vec<f64> = self.a.iter().zip(self.m.mul_vec(y)).map(|(a, v)| a + v).collect();
        self.domain.x.linmin(&c).ok()
    }

    fn best_response_y(&self, x: &[f64]) -> Option<Vec<f64>> {
        let c: Vec<f64> = self.m.mul_t_vec(x).into_iter().zip(&self.b).map(|(v, b)| b - v).collect();
        self.domain.y.linmin(&c).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pennies() -> MatrixGameProblem {
        MatrixGameProblem::new(Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()).unwrap()
    }

    fn decoupled_1d() -> QuadBilinearProblem {
        QuadBilinearProblem::new(1.0, Matrix::zeros(1, 1), vec![0.5], vec![0.5]).unwrap()
    }

    #[test]
    fn matching_pennies_field() {
        let z = PointPair::new(vec![1.0, 0.0], vec![0.0, 1.0]);
        let r = vip_field(&pennies(), &z);
        assert_eq!(r, PointPair::new(vec![-1.0, 1.0], vec![-1.0, 1.0]));
    }

    #[test]
    fn field_vanishes_at_quad_saddle() {
        let mut rng = SeededRng::new(5);
        let p = QuadBilinearProblem::generate(4, 2.0, 0.1, SaddleMode::Interior, &mut rng).unwrap();
        let r = vip_field(&p, p.saddle());
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn ball_game_with_zero_matrix_has_constant_field() {
        let a = vec![1.0, 2.0];
        let b = vec![-3.0, 0.5];
        let ball = Domain::l2_ball(vec![0.0, 0.0], 1.0).unwrap();
        let g = BallGameProblem::new(a.clone(), b.clone(), Matrix::zeros(2, 2), ball.clone(), ball).unwrap();
        let r = vip_field(&g, &PointPair::new(vec![0.3, -0.2], vec![0.1, 0.4]));
        assert_eq!(r, PointPair::new(a, b));
    }

    #[test]
    fn ball_game_requires_positive_delta() {
        let ball = Domain::l2_ball(vec![0.0], 1.0).unwrap();
        let m = Matrix::from_rows(&[vec![2.0]]).unwrap();
        assert!(BallGameProblem::new(vec![1.0], vec![1.0], m, ball.clone(), ball).is_err());
    }

    #[test]
    fn best_responses() {
        let br = pennies().best_response_y(&[1.0, 0.0]).unwrap();
        assert_eq!(br, vec![1.0, 0.0]);
        let q = decoupled_1d();
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(q.best_response_y(&[x]).unwrap(), vec![0.5]);
        }
        let coupled = QuadBilinearProblem::new(1.0, Matrix::from_rows(&[vec![2.0]]).unwrap(), vec![0.5], vec![0.5]).unwrap();
        assert_eq!(coupled.best_response_y(&[1.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn coupled_best_response_matches_grid_search() {
        // closed-form clamp vs. brute force over [0,1] at 1e-4 resolution
        let q = QuadBilinearProblem::new(1.0, Matrix::from_rows(&[vec![0.7]]).unwrap(), vec![0.5], vec![0.4]).unwrap();
        for x in [0.0, 0.25, 0.9] {
            let closed = q.best_response_y(&[x]).unwrap()[0];
            let grid = (0..=10_000)
                .map(|i| i as f64 * 1e-4)
                .max_by(|a, b| {
                    let va = q.value(&PointPair::new(vec![x], vec![*a]));
                    let vb = q.value(&PointPair::new(vec![x], vec![*b]));
                    va.partial_cmp(&vb).unwrap()
                })
                .unwrap();
            assert!((closed - grid).abs() <= 1e-4, "x={x}: {closed} vs {grid}");
        }
    }

    #[test]
    fn suboptimality_examples() {
        let q = decoupled_1d();
        let z0 = PointPair::new(vec![0.0], vec![0.0]);
        assert!((suboptimality_h(&q, &z0).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(suboptimality_h(&q, q.saddle()).unwrap(), 0.0);
        let z = PointPair::new(vec![1.0, 0.0], vec![0.0, 1.0]);
        assert_eq!(suboptimality_h(&pennies(), &z).unwrap(), 2.0);
    }

    #[test]
    fn merit_examples() {
        let q = decoupled_1d();
        let z0 = PointPair::new(vec![0.0], vec![0.0]);
        assert!((merit_w(&q, &z0).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(merit_w(&q, q.saddle()).unwrap(), 0.0);
        let uniform = PointPair::new(vec![0.5, 0.5], vec![0.5, 0.5]);
        let game = pennies().with_saddle(uniform).unwrap();
        let z = PointPair::new(vec![1.0, 0.0], vec![0.0, 1.0]);
        assert_eq!(merit_w(&game, &z).unwrap(), 0.0);
        assert!(matches!(merit_w(&pennies(), &z), Err(Error::Unsupported(_))));
    }

    #[test]
    fn vertex_saddle_generation_is_certified() {
        let mut rng = SeededRng::new(11);
        let p = QuadBilinearProblem::generate(5, 1.0, 0.1, SaddleMode::Vertex, &mut rng).unwrap();
        assert!(p.saddle().x.iter().chain(&p.saddle().y).all(|&v| v == 0.0 || v == 1.0));
        assert!(p.certify_saddle(&mut rng).unwrap());
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = QuadBilinearProblem::generate(6, 1.0, 0.1, SaddleMode::Interior, &mut SeededRng::new(9)).unwrap();
        let b = QuadBilinearProblem::generate(6, 1.0, 0.1, SaddleMode::Interior, &mut SeededRng::new(9)).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert_eq!(a.saddle(), b.saddle());
    }
}
