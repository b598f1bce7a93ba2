//! Independent reference computations used to check the solvers.
//!
//! Nothing in [`crate::solver`] calls into this module.

use crate::domains::{Domain, DomainKind, ProductDomain};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::objectives::{vip_field, PointPair, SaddleObjective};
use crate::rng::SeededRng;

/// Largest number of grid points (both blocks together) the brute-force search accepts.
pub const GRID_CAP: usize = 10_000_000;

/// Empirical play of both players.
#[derive(Debug, Clone, PartialEq)]
pub struct FictitiousPlayState {
    pub counts_x: Vec<u64>,
    pub counts_y: Vec<u64>,
    pub t: usize,
    pub avg_x: Vec<f64>,
    pub avg_y: Vec<f64>,
}

impl FictitiousPlayState {
    /// Averages start at `(e_i, e_j)`; the start carries no weight once play begins.
    pub fn new(p: usize, q: usize, start: (usize, usize)) -> Self {
        let mut avg_x = vec![0.0; p];
        let mut avg_y = vec![0.0; q];
        avg_x[start.0] = 1.0;
        avg_y[start.1] = 1.0;
        Self {
            counts_x: vec![0; p],
            counts_y: vec![0; q],
            t: 0,
            avg_x,
            avg_y,
        }
    }

    /// Both players best-respond simultaneously to the opponent's average.
    pub fn step(&mut self, m: &Matrix) {
        let (p, q) = (m.rows(), m.cols());
        // x minimises xᵀ(M ȳ); y maximises (Mᵀ x̄)ᵀ y.
        let mut loss_x = vec![0.0; p];
        for (i, l) in loss_x.iter_mut().enumerate() {
            for j in 0..q {
                *l += m.get(i, j) * self.avg_y[j];
            }
        }
        let mut loss_y = vec![0.0; q];
        for i in 0..p {
            for (j, l) in loss_y.iter_mut().enumerate() {
                *l += m.get(i, j) * self.avg_x[i];
            }
        }
        let bx = lowest_argmin(&loss_x);
        let by = lowest_argmin(&loss_y.iter().map(|v| -v).collect::<Vec<_>>());
        self.counts_x[bx] += 1;
        self.counts_y[by] += 1;
        self.t += 1;
        let g = 1.0 / self.t as f64;
        for (i, a) in self.avg_x.iter_mut().enumerate() {
            let e = if i == bx { 1.0 } else { 0.0 };
            *a = (1.0 - g) * *a + g * e;
        }
        for (j, a) in self.avg_y.iter_mut().enumerate() {
            let e = if j == by { 1.0 } else { 0.0 };
            *a = (1.0 - g) * *a + g * e;
        }
    }

    pub fn average(&self) -> PointPair {
        PointPair::new(self.avg_x.clone(), self.avg_y.clone())
    }
}

fn lowest_argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] < v[best] {
            best = i;
        }
    }
    best
}

/// Fictitious play for `T` rounds from the pure pair `start`.
///
/// Returns the averages before round 1 through after round `T` (`T + 1` entries).
pub fn fictitious_play(m: &Matrix, rounds: usize, start: (usize, usize)) -> Result<Vec<PointPair>> {
    if rounds == 0 {
        return Err(Error::invalid("fictitious play needs at least one round"));
    }
    if start.0 >= m.rows() || start.1 >= m.cols() {
        return Err(Error::invalid("start action out of range"));
    }
    let mut state = FictitiousPlayState::new(m.rows(), m.cols(), start);
    let mut out = Vec::with_capacity(rounds + 1);
    out.push(state.average());
    for _ in 0..rounds {
        state.step(m);
        out.push(state.average());
    }
    Ok(out)
}

/// Result of the brute-force minimax search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSaddle {
    /// Grid `x` attaining `min_x max_y`, grid `y` attaining `max_y min_x`.
    pub point: PointPair,
    /// `min_x max_y L`
    pub upper: f64,
    /// `max_y min_x L`
    pub lower: f64,
}

impl GridSaddle {
    /// `upper − lower ≥ 0`.
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn value(&self) -> f64 {
        0.5 * (self.upper + self.lower)
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

fn grid_size(domain: &Domain, steps: usize) -> Result<usize> {
    let d = domain.dim() as u32;
    Ok(match domain.kind() {
        DomainKind::Simplex => binomial(steps + domain.dim() - 1, domain.dim() - 1),
        DomainKind::UnitCube | DomainKind::L1Ball { .. } | DomainKind::L2Ball { .. } => {
            (steps + 1).checked_pow(d).unwrap_or(usize::MAX)
        }
        DomainKind::VertexPolytope { .. } => {
            return Err(Error::unsupported("grid search over a vertex-listed polytope"))
        }
    })
}

fn tensor_grid(d: usize, steps: usize, lo: &[f64], width: f64) -> Vec<Vec<f64>> {
    let total = (steps + 1).pow(d as u32);
    (0..total)
        .map(|mut k| {
            let mut p = vec![0.0; d];
            for i in (0..d).rev() {
                p[i] = lo[i] + width * (k % (steps + 1)) as f64 / steps as f64;
                k /= steps + 1;
            }
            p
        })
        .collect()
}

fn compositions(d: usize, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
    if prefix.len() == d - 1 {
        let used: usize = prefix.iter().sum();
        let mut p: Vec<f64> = prefix.iter().map(|&c| c as f64 / n as f64).collect();
        p.push((n - used) as f64 / n as f64);
        out.push(p);
        return;
    }
    let used: usize = prefix.iter().sum();
    for c in (0..=n - used).rev() {
        prefix.push(c);
        compositions(d, n, prefix, out);
        prefix.pop();
    }
}

/// Grid over a domain with spacing `1/steps` of its bounding box side.
pub fn domain_grid(domain: &Domain, steps: usize) -> Result<Vec<Vec<f64>>> {
    let d = domain.dim();
    Ok(match domain.kind() {
        DomainKind::UnitCube => tensor_grid(d, steps, &vec![0.0; d], 1.0),
        DomainKind::Simplex => {
            let mut out = Vec::new();
            compositions(d, steps, &mut Vec::new(), &mut out);
            out
        }
        DomainKind::L1Ball { center, radius } | DomainKind::L2Ball { center, radius } => {
            let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
            tensor_grid(d, steps, &lo, 2.0 * radius)
                .into_iter()
                .filter(|p| domain.contains(p, 1e-12).unwrap_or(false))
                .collect()
        }
        DomainKind::VertexPolytope { .. } => {
            return Err(Error::unsupported("grid search over a vertex-listed polytope"))
        }
    })
}

/// Brute-force `min_x max_y` and `max_y min_x` over tensor grids of spacing `resolution`.
pub fn grid_saddle_search(
    obj: &dyn SaddleObjective,
    pd: &ProductDomain,
    resolution: f64,
) -> Result<GridSaddle> {
    if !(resolution.is_finite() && resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::invalid(format!("resolution must lie in (0, 1], got {resolution}")));
    }
    let steps = (1.0 / resolution).round().max(1.0) as usize;
    let total = grid_size(&pd.x, steps)?.saturating_add(grid_size(&pd.y, steps)?);
    if total > GRID_CAP {
        return Err(Error::Capacity(format!(
            "grid would hold {total} points, above the cap of {GRID_CAP}"
        )));
    }
    let gx = domain_grid(&pd.x, steps)?;
    let gy = domain_grid(&pd.y, steps)?;
    let mut z = PointPair::new(gx[0].clone(), gy[0].clone());
    let mut col_min = vec![f64::INFINITY; gy.len()];
    let mut upper = f64::INFINITY;
    let mut best_x = 0;
    for (i, x) in gx.iter().enumerate() {
        z.x.copy_from_slice(x);
        let mut row_max = f64::NEG_INFINITY;
        for (j, y) in gy.iter().enumerate() {
            z.y.copy_from_slice(y);
            let v = obj.value(&z);
            row_max = row_max.max(v);
            if v < col_min[j] {
                col_min[j] = v;
            }
        }
        if row_max < upper {
            upper = row_max;
            best_x = i;
        }
    }
    let mut lower = f64::NEG_INFINITY;
    let mut best_y = 0;
    for (j, &v) in col_min.iter().enumerate() {
        if v > lower {
            lower = v;
            best_y = j;
        }
    }
    Ok(GridSaddle {
        point: PointPair::new(gx[best_x].clone(), gy[best_y].clone()),
        upper,
        lower,
    })
}

fn margin(domain: &Domain, p: &[f64]) -> Result<f64> {
    match domain.kind() {
        // Relative interior of the simplex: distance to the nearest facet.
        DomainKind::Simplex => Ok(p.iter().copied().fold(f64::INFINITY, f64::min)),
        _ => domain.border_distance(p),
    }
}

/// Central differences of both partial gradients.
pub fn finite_diff_gradient(
    obj: &dyn SaddleObjective,
    pd: &ProductDomain,
    z: &PointPair,
    h: f64,
) -> Result<PointPair> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid(format!("step h must be positive, got {h}")));
    }
    let mx = margin(&pd.x, &z.x)?;
    let my = margin(&pd.y, &z.y)?;
    if mx <= h || my <= h {
        return Err(Error::invalid(format!(
            "point is within {} of the boundary, step is {h}",
            mx.min(my)
        )));
    }
    let mut probe = z.clone();
    let mut gx = vec![0.0; z.x.len()];
    for (i, g) in gx.iter_mut().enumerate() {
        probe.x[i] = z.x[i] + h;
        let up = obj.value(&probe);
        probe.x[i] = z.x[i] - h;
        let down = obj.value(&probe);
        probe.x[i] = z.x[i];
        *g = (up - down) / (2.0 * h);
    }
    let mut gy = vec![0.0; z.y.len()];
    for (j, g) in gy.iter_mut().enumerate() {
        probe.y[j] = z.y[j] + h;
        let up = obj.value(&probe);
        probe.y[j] = z.y[j] - h;
        let down = obj.value(&probe);
        probe.y[j] = z.y[j];
        *g = (up - down) / (2.0 * h);
    }
    Ok(PointPair::new(gx, gy))
}

/// Largest `‖f(z) − f(z′)‖ / ‖z − z′‖` over random pairs, in the block norm `‖·‖_X + ‖·‖_Y`.
pub fn sampled_lipschitz_ratio(
    map: &dyn Fn(&PointPair) -> PointPair,
    pd: &ProductDomain,
    n_pairs: usize,
    rng: &mut SeededRng,
) -> Result<f64> {
    if n_pairs == 0 {
        return Err(Error::invalid("need at least one pair"));
    }
    let mut worst: f64 = 0.0;
    for _ in 0..n_pairs {
        let a = pd.sample(rng);
        let b = pd.sample(rng);
        let denom = a.sub(&b).block_norm();
        if denom == 0.0 {
            continue;
        }
        worst = worst.max(map(&a).sub(&map(&b)).block_norm() / denom);
    }
    Ok(worst)
}

/// `z ↦ LMO(F(z))`, the Frank-Wolfe corner map.
pub fn fw_corner(obj: &dyn SaddleObjective, pd: &ProductDomain, z: &PointPair) -> Result<PointPair> {
    pd.linmin(&vip_field(obj, z))
}
