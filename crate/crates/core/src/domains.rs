//! Constraint sets accessed only through a linear minimization oracle.
//!
//! Every domain answers `linmin(r) ∈ argmin_{s ∈ D} ⟨s, r⟩`. Ties resolve to
//! the lowest coordinate / vertex index so runs are reproducible and the
//! fictitious-play correspondence on simplices holds exactly.

use crate::error::{Error, Result};
use crate::linalg::{dist, dot, norm};
use crate::objectives::PointPair;
use crate::rng::SeededRng;

/// Default ceiling for [`Domain::enumerate_vertices`].
pub const DEFAULT_VERTEX_CAP: usize = 1 << 16;

/// Membership tolerance used by feasibility checks.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    /// `[0, 1]^d`
    UnitCube,
    /// Probability simplex `{x ≥ 0, Σx = 1}`.
    Simplex,
    L1Ball { center: Vec<f64>, radius: f64 },
    L2Ball { center: Vec<f64>, radius: f64 },
    /// Convex hull of an explicit, deduplicated vertex list.
    VertexPolytope { vertices: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    kind: DomainKind,
    dim: usize,
    diameter: f64,
    strong_convexity: Option<f64>,
    pyramidal_width: Option<f64>,
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::invalid("domain dimension must be positive"))
    } else {
        Ok(())
    }
}

fn check_radius(center: &[f64], radius: f64) -> Result<()> {
    check_dim(center.len())?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(format!("radius must be positive and finite, got {radius}")));
    }
    if center.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("center must have finite coordinates"));
    }
    Ok(())
}

impl Domain {
    /// `[0,1]^d`, with its known pyramidal width `1/√d`.
    pub fn unit_cube(d: usize) -> Result<Self> {
        check_dim(d)?;
        let df = d as f64;
        Ok(Self {
            kind: DomainKind::UnitCube,
            dim: d,
            diameter: df.sqrt(),
            strong_convexity: None,
            pyramidal_width: Some(1.0 / df.sqrt()),
        })
    }

    pub fn simplex(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self {
            kind: DomainKind::Simplex,
            dim: d,
            // Δ₁ is the single point {1}.
            diameter: if d == 1 { 0.0 } else { std::f64::consts::SQRT_2 },
            strong_convexity: None,
            pyramidal_width: None,
        })
    }

    pub fn l1_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_radius(&center, radius)?;
        Ok(Self {
            dim: center.len(),
            diameter: 2.0 * radius,
            kind: DomainKind::L1Ball { center, radius },
            strong_convexity: None,
            pyramidal_width: None,
        })
    }

    /// Euclidean ball; strongly convex with `β = 1/R`.
    pub fn l2_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_radius(&center, radius)?;
        Ok(Self {
            dim: center.len(),
            diameter: 2.0 * radius,
            kind: DomainKind::L2Ball { center, radius },
            strong_convexity: Some(1.0 / radius),
            pyramidal_width: None,
        })
    }

    /// Convex hull of `vertices`; duplicates are dropped keeping first occurrences.
    pub fn vertex_polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::invalid("vertex list must be nonempty"));
        };
        let d = first.len();
        check_dim(d)?;
        let mut uniq: Vec<Vec<f64>> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if v.len() != d {
                return Err(Error::invalid("all vertices must share one dimension"));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("vertex coordinates must be finite"));
            }
            if !uniq.contains(&v) {
                uniq.push(v);
            }
        }
        let mut diameter: f64 = 0.0;
        for (i, a) in uniq.iter().enumerate() {
            for b in &uniq[i + 1..] {
                diameter = diameter.max(dist(a, b));
            }
        }
        Ok(Self {
            kind: DomainKind::VertexPolytope { vertices: uniq },
            dim: d,
            diameter,
            strong_convexity: None,
            pyramidal_width: None,
        })
    }

    /// Attach a pyramidal width. Only the cube carries one by default; other
    /// polytopes need the caller to supply it.
    pub fn with_pyramidal_width(mut self, width: f64) -> Result<Self> {
        if !self.is_polytope() {
            return Err(Error::unsupported("pyramidal width is defined for polytopes only"));
        }
        if !(width > 0.0 && width <= self.diameter) {
            return Err(Error::invalid(format!(
                "pyramidal width must lie in (0, diameter = {}], got {width}",
                self.diameter
            )));
        }
        self.pyramidal_width = Some(width);
        Ok(self)
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn strong_convexity(&self) -> Option<f64> {
        self.strong_convexity
    }

    pub fn pyramidal_width(&self) -> Option<f64> {
        self.pyramidal_width
    }

    pub fn is_polytope(&self) -> bool {
        !matches!(self.kind, DomainKind::L2Ball { .. })
    }

    /// Largest Euclidean norm of a point of the set.
    pub fn max_norm(&self) -> f64 {
        match &self.kind {
            DomainKind::UnitCube => (self.dim as f64).sqrt(),
            DomainKind::Simplex => 1.0,
            DomainKind::L1Ball { center, radius } => {
                // convex norm is maximised at one of the 2d vertices c ± R e_i
                let c2: f64 = dot(center, center);
                (0..self.dim)
                    .map(|i| (c2 + 2.0 * radius * center[i].abs() + radius * radius).sqrt())
                    .fold(0.0, f64::max)
            }
            DomainKind::L2Ball { center, radius } => norm(center) + radius,
            DomainKind::VertexPolytope { vertices } => {
                vertices.iter().map(|v| norm(v)).fold(0.0, f64::max)
            }
        }
    }

    fn check_direction(&self, direction: &[f64]) -> Result<()> {
        if direction.len() != self.dim {
            return Err(Error::invalid(format!(
                "direction has dimension {}, domain has {}",
                direction.len(),
                self.dim
            )));
        }
        if direction.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("direction contains NaN or infinite entries"));
        }
        Ok(())
    }

    /// Linear minimization oracle.
    pub fn linmin(&self, direction: &[f64]) -> Result<Vec<f64>> {
        self.check_direction(direction)?;
        let s = match &self.kind {
            // A zero component ties between 0 and 1; 0 is lexicographically smaller.
            DomainKind::UnitCube => direction
                .iter()
                .map(|&r| if r < 0.0 { 1.0 } else { 0.0 })
                .collect(),
            DomainKind::Simplex => {
                let i = argmin_first(direction.iter().copied());
                unit(self.dim, i)
            }
            DomainKind::L1Ball { center, radius } => {
                let i = argmin_first(direction.iter().map(|r| -r.abs()));
                let mut s = center.clone();
                // For r_i = 0 every vertex ties; c − R e_i is the smaller one.
                if direction[i] > 0.0 || direction[i] == 0.0 {
                    s[i] -= radius;
                } else {
                    s[i] += radius;
                }
                s
            }
            DomainKind::L2Ball { center, radius } => {
                let n = norm(direction);
                if n == 0.0 {
                    let mut s = center.clone();
                    s[0] += radius;
                    s
                } else {
                    center
                        .iter()
                        .zip(direction)
                        .map(|(c, r)| c - radius * r / n)
                        .collect()
                }
            }
            DomainKind::VertexPolytope { vertices } => {
                let i = argmin_first(vertices.iter().map(|v| dot(v, direction)));
                vertices[i].clone()
            }
        };
        Ok(s)
    }

    /// Whether `p` is exactly one of the extreme points returned by the oracle.
    pub fn is_vertex(&self, p: &[f64]) -> bool {
        if p.len() != self.dim {
            return false;
        }
        match &self.kind {
            DomainKind::UnitCube => p.iter().all(|&v| v == 0.0 || v == 1.0),
            DomainKind::Simplex => {
                p.iter().filter(|&&v| v == 1.0).count() == 1
                    && p.iter().all(|&v| v == 0.0 || v == 1.0)
            }
            DomainKind::L1Ball { center, radius } => {
                let moved: Vec<usize> = (0..self.dim).filter(|&i| p[i] != center[i]).collect();
                moved.len() == 1 && {
                    let i = moved[0];
                    p[i] == center[i] + radius || p[i] == center[i] - radius
                }
            }
            DomainKind::L2Ball { .. } => false,
            DomainKind::VertexPolytope { vertices } => vertices.iter().any(|v| v.as_slice() == p),
        }
    }

    /// Exact vertex set in a stable order; fails when it would exceed `cap`.
    pub fn enumerate_vertices(&self, cap: usize) -> Result<Vec<Vec<f64>>> {
        let d = self.dim;
        let count = match &self.kind {
            DomainKind::UnitCube => {
                if d >= usize::BITS as usize - 1 {
                    usize::MAX
                } else {
                    1usize << d
                }
            }
            DomainKind::Simplex => d,
            DomainKind::L1Ball { .. } => 2 * d,
            DomainKind::L2Ball { .. } => {
                return Err(Error::unsupported("an l2-ball has no finite vertex set"))
            }
            DomainKind::VertexPolytope { vertices } => vertices.len(),
        };
        if count > cap {
            return Err(Error::Capacity(format!("{count} vertices exceed the cap of {cap}")));
        }
        let out = match &self.kind {
            DomainKind::UnitCube => (0..count)
                .map(|k| {
                    (0..d)
                        .map(|i| ((k >> (d - 1 - i)) & 1) as f64)
                        .collect()
                })
                .collect(),
            DomainKind::Simplex => (0..d).map(|i| unit(d, i)).collect(),
            DomainKind::L1Ball { center, radius } => {
                let mut out = Vec::with_capacity(2 * d);
                for i in 0..d {
                    for sign in [1.0, -1.0] {
                        let mut v = center.clone();
                        v[i] += sign * radius;
                        out.push(v);
                    }
                }
                out
            }
            DomainKind::VertexPolytope { vertices } => vertices.clone(),
            DomainKind::L2Ball { .. } => unreachable!(),
        };
        Ok(out)
    }

    /// Membership test with absolute tolerance `tol`.
    pub fn contains(&self, p: &[f64], tol: f64) -> Result<bool> {
        if p.len() != self.dim {
            return Err(Error::invalid("point dimension does not match the domain"));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Ok(false);
        }
        Ok(match &self.kind {
            DomainKind::UnitCube => p.iter().all(|&v| v >= -tol && v <= 1.0 + tol),
            DomainKind::Simplex => {
                p.iter().all(|&v| v >= -tol) && (p.iter().sum::<f64>() - 1.0).abs() <= tol
            }
            DomainKind::L1Ball { center, radius } => {
                p.iter().zip(center).map(|(a, c)| (a - c).abs()).sum::<f64>() <= radius + tol
            }
            DomainKind::L2Ball { center, radius } => dist(p, center) <= radius + tol,
            DomainKind::VertexPolytope { .. } => {
                return Err(Error::unsupported(
                    "membership in a vertex-described polytope needs an LP solver",
                ))
            }
        })
    }

    /// Distance from `p` to the boundary of the set (the border distance of
    /// an interior point). Zero for points on the boundary.
    pub fn border_distance(&self, p: &[f64]) -> Result<f64> {
        if !self.contains(p, 0.0)? {
            return Err(Error::invalid("point is outside the domain"));
        }
        match &self.kind {
            DomainKind::UnitCube => Ok(p
                .iter()
                .map(|&v| v.min(1.0 - v))
                .fold(f64::INFINITY, f64::min)),
            DomainKind::L2Ball { center, radius } => Ok(radius - dist(p, center)),
            DomainKind::L1Ball { center, radius } => {
                let l1: f64 = p.iter().zip(center).map(|(a, c)| (a - c).abs()).sum();
                // Facet normals are sign vectors of Euclidean length √d.
                Ok((radius - l1) / (self.dim as f64).sqrt())
            }
            DomainKind::Simplex | DomainKind::VertexPolytope { .. } => Err(Error::unsupported(
                "border distance is only computed for full-dimensional cube and ball domains",
            )),
        }
    }

    /// A random point of the set.
    pub fn sample(&self, rng: &mut SeededRng) -> Vec<f64> {
        let d = self.dim;
        match &self.kind {
            DomainKind::UnitCube => rng.uniform_vec(d, 0.0, 1.0),
            DomainKind::Simplex => dirichlet_ones(d, rng),
            DomainKind::L1Ball { center, radius } => {
                let w = dirichlet_ones(d, rng);
                let scale = radius * rng.uniform().powf(1.0 / d as f64);
                center
                    .iter()
                    .zip(w)
                    .map(|(c, wi)| {
                        let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
                        c + sign * scale * wi
                    })
                    .collect()
            }
            DomainKind::L2Ball { center, radius } => {
                let dir = random_unit(d, rng);
                let r = radius * rng.uniform().powf(1.0 / d as f64);
                center.iter().zip(dir).map(|(c, u)| c + r * u).collect()
            }
            DomainKind::VertexPolytope { vertices } => {
                let w = dirichlet_ones(vertices.len(), rng);
                let mut p = vec![0.0; d];
                for (v, wi) in vertices.iter().zip(w) {
                    for (pj, vj) in p.iter_mut().zip(v) {
                        *pj += wi * vj;
                    }
                }
                p
            }
        }
    }

    /// Sampled check that the ball of radius `γ(1−γ)(β/2)‖x−y‖²` centred at
    /// `γx + (1−γ)y` lies in the set.
    ///
    /// Probes the centre-outward direction and every ± coordinate axis in
    /// addition to `samples` random directions on the ball's sphere.
    pub fn ball_inclusion_check(
        &self,
        x: &[f64],
        y: &[f64],
        gamma: f64,
        samples: usize,
        rng: &mut SeededRng,
    ) -> Result<bool> {
        let beta = self
            .strong_convexity
            .ok_or_else(|| Error::unsupported("domain has no strong-convexity constant"))?;
        self.ball_inclusion_check_with(beta, x, y, gamma, samples, rng)
    }

    /// As [`Domain::ball_inclusion_check`] with an explicit `β`.
    pub fn ball_inclusion_check_with(
        &self,
        beta: f64,
        x: &[f64],
        y: &[f64],
        gamma: f64,
        samples: usize,
        rng: &mut SeededRng,
    ) -> Result<bool> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid(format!("gamma must lie in [0, 1], got {gamma}")));
        }
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::invalid("point dimension does not match the domain"));
        }
        let d = self.dim;
        let dxy = dist(x, y);
        let radius = gamma * (1.0 - gamma) * 0.5 * beta * dxy * dxy;
        let centre: Vec<f64> = x
            .iter()
            .zip(y)
            .map(|(a, b)| gamma * a + (1.0 - gamma) * b)
            .collect();
        let mut directions: Vec<Vec<f64>> = Vec::with_capacity(2 * d + 1 + samples);
        let anchor = match &self.kind {
            DomainKind::L2Ball { center, .. } | DomainKind::L1Ball { center, .. } => center.clone(),
            _ => vec![0.5; d],
        };
        let outward: Vec<f64> = centre.iter().zip(&anchor).map(|(c, a)| c - a).collect();
        let n_out = norm(&outward);
        if n_out > 0.0 {
            directions.push(outward.iter().map(|v| v / n_out).collect());
        }
        for i in 0..d {
            directions.push(unit(d, i));
            directions.push(unit(d, i).into_iter().map(|v| -v).collect());
        }
        for _ in 0..samples {
            directions.push(random_unit(d, rng));
        }
        for u in directions {
            let p: Vec<f64> = centre.iter().zip(&u).map(|(c, ui)| c + radius * ui).collect();
            if !self.contains(&p, MEMBERSHIP_TOL)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `X × Y`; the oracle decomposes blockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDomain {
    pub x: Domain,
    pub y: Domain,
}

impl ProductDomain {
    pub fn new(x: Domain, y: Domain) -> Self {
        Self { x, y }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x.dim(), self.y.dim())
    }

    pub fn linmin(&self, r: &PointPair) -> Result<PointPair> {
        Ok(PointPair::new(self.x.linmin(&r.x)?, self.y.linmin(&r.y)?))
    }

    pub fn contains(&self, z: &PointPair, tol: f64) -> Result<bool> {
        Ok(self.x.contains(&z.x, tol)? && self.y.contains(&z.y, tol)?)
    }

    pub fn sample(&self, rng: &mut SeededRng) -> PointPair {
        let x = self.x.sample(rng);
        let y = self.y.sample(rng);
        PointPair::new(x, y)
    }

    /// The tie-break vertex pair, i.e. the oracle answer for a zero direction.
    pub fn tiebreak_vertex(&self) -> PointPair {
        let (dx, dy) = self.dims();
        self.linmin(&PointPair::new(vec![0.0; dx], vec![0.0; dy]))
            .expect("zero direction is always valid")
    }
}

/// Free-function form of [`Domain::linmin`].
pub fn linmin(domain: &Domain, direction: &[f64]) -> Result<Vec<f64>> {
    domain.linmin(direction)
}

/// Free-function form of [`ProductDomain::linmin`].
pub fn linmin_product(pd: &ProductDomain, r: &PointPair) -> Result<PointPair> {
    pd.linmin(r)
}

fn argmin_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = f64::INFINITY;
    let mut idx = 0;
    for (i, v) in values.enumerate() {
        if i == 0 || v < best {
            best = v;
            idx = i;
        }
    }
    idx
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

fn dirichlet_ones(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.uniform()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn random_unit(d: usize, rng: &mut SeededRng) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        let n = norm(&g);
        if n > 1e-12 {
            return g.into_iter().map(|v| v / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_linmin_sign_rule() {
        let cube = Domain::unit_cube(3).unwrap();
        assert_eq!(cube.linmin(&[2.0, -3.0, 1.0]).unwrap(), vec![0.0, 1.0, 0.0]);
        // zero component resolves to 0
        assert_eq!(cube.linmin(&[0.0, -1.0, 0.0]).unwrap(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn simplex_linmin_picks_smallest_coefficient() {
        let s = Domain::simplex(3).unwrap();
        assert_eq!(s.linmin(&[0.5, -0.2, 0.1]).unwrap(), vec![0.0, 1.0, 0.0]);
        assert_eq!(s.linmin(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn l2_ball_linmin() {
        let b = Domain::l2_ball(vec![0.0, 0.0], 1.0).unwrap();
        let s = b.linmin(&[3.0, 4.0]).unwrap();
        assert!((s[0] + 0.6).abs() < 1e-15 && (s[1] + 0.8).abs() < 1e-15);
        assert_eq!(b.linmin(&[0.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn l1_ball_linmin() {
        let b = Domain::l1_ball(vec![0.0; 3], 2.0).unwrap();
        assert_eq!(b.linmin(&[1.0, -4.0, 2.0]).unwrap(), vec![0.0, 2.0, 0.0]);
        assert_eq!(b.linmin(&[0.0, 0.0, 0.0]).unwrap(), vec![-2.0, 0.0, 0.0]);
    }

    #[test]
    fn linmin_rejects_bad_directions() {
        let cube = Domain::unit_cube(2).unwrap();
        assert!(matches!(cube.linmin(&[1.0]), Err(Error::InvalidArgument(_))));
        assert!(matches!(cube.linmin(&[f64::NAN, 1.0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn diameters() {
        assert!((Domain::unit_cube(4).unwrap().diameter() - 2.0).abs() < 1e-15);
        assert!((Domain::simplex(5).unwrap().diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Domain::l1_ball(vec![0.0; 2], 1.5).unwrap().diameter(), 3.0);
        assert_eq!(Domain::l2_ball(vec![1.0; 2], 1.5).unwrap().diameter(), 3.0);
        let p = Domain::vertex_polytope(vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(p.diameter(), 5.0);
        assert_eq!(p.enumerate_vertices(10).unwrap().len(), 2);
    }

    #[test]
    fn vertex_enumeration_orders() {
        let cube = Domain::unit_cube(2).unwrap();
        assert_eq!(
            cube.enumerate_vertices(DEFAULT_VERTEX_CAP).unwrap(),
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]
        );
        let s = Domain::simplex(3).unwrap();
        assert_eq!(
            s.enumerate_vertices(DEFAULT_VERTEX_CAP).unwrap(),
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]
        );
        let l1 = Domain::l1_ball(vec![0.0; 2], 1.0).unwrap();
        assert_eq!(
            l1.enumerate_vertices(DEFAULT_VERTEX_CAP).unwrap(),
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]
        );
    }

    #[test]
    fn vertex_enumeration_errors() {
        assert!(matches!(
            Domain::unit_cube(20).unwrap().enumerate_vertices(1000),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            Domain::l2_ball(vec![0.0], 1.0).unwrap().enumerate_vertices(1000),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn pyramidal_width_validation() {
        let cube = Domain::unit_cube(30).unwrap();
        assert!((cube.pyramidal_width().unwrap() - 1.0 / 30f64.sqrt()).abs() < 1e-15);
        assert!(Domain::simplex(3).unwrap().pyramidal_width().is_none());
        assert!(Domain::simplex(3).unwrap().with_pyramidal_width(2.0).is_err());
        assert!(Domain::simplex(3).unwrap().with_pyramidal_width(0.5).is_ok());
        assert!(Domain::l2_ball(vec![0.0], 1.0).unwrap().with_pyramidal_width(0.5).is_err());
    }

    #[test]
    fn ball_inclusion_examples() {
        let b = Domain::l2_ball(vec![0.0, 0.0], 1.0).unwrap();
        let mut rng = SeededRng::new(1);
        let (x, y) = ([1.0, 0.0], [-1.0, 0.0]);
        assert!(b.ball_inclusion_check(&x, &y, 0.5, 100, &mut rng).unwrap());
        assert!(b.ball_inclusion_check(&x, &y, 0.0, 100, &mut rng).unwrap());
        assert!(!b.ball_inclusion_check_with(10.0, &x, &y, 0.5, 100, &mut rng).unwrap());
        let cube = Domain::unit_cube(2).unwrap();
        assert!(matches!(
            cube.ball_inclusion_check(&[0.0, 0.0], &[1.0, 1.0], 0.5, 10, &mut rng),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn border_distance_of_cube_point() {
        let cube = Domain::unit_cube(3).unwrap();
        assert!((cube.border_distance(&[0.3, 0.9, 0.5]).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn samples_are_members() {
        let mut rng = SeededRng::new(3);
        for dom in [
            Domain::unit_cube(4).unwrap(),
            Domain::simplex(4).unwrap(),
            Domain::l1_ball(vec![0.5; 4], 2.0).unwrap(),
            Domain::l2_ball(vec![-1.0; 4], 0.5).unwrap(),
        ] {
            for _ in 0..200 {
                let p = dom.sample(&mut rng);
                assert!(dom.contains(&p, 1e-12).unwrap(), "{dom:?} {p:?}");
            }
        }
    }
}
