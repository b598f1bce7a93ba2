//! Per-block convex-combination bookkeeping for the away and pairwise variants.

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::objectives::PointPair;

/// Weight-sum drift that triggers an immediate renormalisation.
pub const WEIGHT_DRIFT_TOL: f64 = 1e-10;

/// Allowed gap between the stored iterate and `Σ α_v v`.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Iterations between unconditional renormalisations.
pub const RENORMALIZE_EVERY: usize = 100;

/// Atoms with strictly positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSet {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl ActiveSet {
    pub fn singleton(vertex: Vec<f64>) -> Self {
        Self {
            atoms: vec![vertex],
            weights: vec![1.0],
        }
    }

    /// Builds a set from explicit pairs; weights must be positive and sum to one.
    pub fn from_weighted(pairs: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("active set needs at least one atom"));
        }
        let mut set = Self {
            atoms: Vec::new(),
            weights: Vec::new(),
        };
        for (v, w) in pairs {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!("atom weight must be positive, got {w}")));
            }
            set.add(&v, w);
        }
        if (set.weight_sum() - 1.0).abs() > WEIGHT_DRIFT_TOL {
            return Err(Error::invalid("atom weights must sum to one"));
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn position(&self, v: &[f64]) -> Option<usize> {
        self.atoms.iter().position(|a| a.as_slice() == v)
    }

    /// Weight of `v`, zero when absent.
    pub fn weight_of(&self, v: &[f64]) -> f64 {
        self.position(v).map_or(0.0, |i| self.weights[i])
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn add(&mut self, v: &[f64], w: f64) {
        match self.position(v) {
            Some(i) => self.weights[i] += w,
            None => {
                self.atoms.push(v.to_vec());
                self.weights.push(w);
            }
        }
    }

    fn evict_nonpositive(&mut self) {
        let mut i = 0;
        while i < self.weights.len() {
            if self.weights[i] <= 0.0 {
                self.weights.remove(i);
                self.atoms.remove(i);
            } else {
                i += 1;
            }
        }
    }

    /// First atom maximising `⟨r, v⟩`, with its weight.
    pub fn away_atom(&self, r: &[f64]) -> (&[f64], f64) {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, a) in self.atoms.iter().enumerate() {
            let val = dot(a, r);
            if val > best_val {
                best_val = val;
                best = i;
            }
        }
        (&self.atoms[best], self.weights[best])
    }

    /// `α ← (1−γ)α`, then `α_s += γ`.
    pub fn fw_update(&mut self, s: &[f64], gamma: f64) {
        if gamma >= 1.0 {
            self.atoms = vec![s.to_vec()];
            self.weights = vec![1.0];
            return;
        }
        for w in &mut self.weights {
            *w *= 1.0 - gamma;
        }
        self.add(s, gamma);
        self.evict_nonpositive();
    }

    /// `α ← (1+γ)α`, then `α_v −= γ`; `drop` forces `α_v` to exactly zero.
    pub fn away_update(&mut self, v: &[f64], gamma: f64, drop: bool) {
        let i = self.position(v).expect("away atom belongs to the active set");
        for w in &mut self.weights {
            *w *= 1.0 + gamma;
        }
        if drop {
            self.weights[i] = 0.0;
        } else {
            self.weights[i] -= gamma;
        }
        self.evict_nonpositive();
    }

    /// `α_v −= γ`, `α_s += γ`; `drop` forces `α_v` to exactly zero.
    pub fn pairwise_update(&mut self, s: &[f64], v: &[f64], gamma: f64, drop: bool) {
        if s == v {
            return;
        }
        let i = self.position(v).expect("away atom belongs to the active set");
        if drop {
            self.weights[i] = 0.0;
        } else {
            self.weights[i] -= gamma;
        }
        self.add(s, gamma);
        self.evict_nonpositive();
    }

    pub fn renormalize(&mut self) {
        let total = self.weight_sum();
        for w in &mut self.weights {
            *w /= total;
        }
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        let d = self.atoms.first().map_or(0, Vec::len);
        let mut out = vec![0.0; d];
        for (a, w) in self.atoms.iter().zip(&self.weights) {
            for (o, v) in out.iter_mut().zip(a) {
                *o += w * v;
            }
        }
        out
    }
}

/// The two independent block active sets `(S_x, α)` and `(S_y, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSetPair {
    pub x: ActiveSet,
    pub y: ActiveSet,
}

impl ActiveSetPair {
    pub fn singleton(z: &PointPair) -> Self {
        Self {
            x: ActiveSet::singleton(z.x.clone()),
            y: ActiveSet::singleton(z.y.clone()),
        }
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    pub fn reconstruct(&self) -> PointPair {
        PointPair::new(self.x.reconstruct(), self.y.reconstruct())
    }

    /// Blockwise away atom `v = argmax_{S_x × S_y} ⟨r, v⟩` and its weights.
    pub fn away_atom(&self, r: &PointPair) -> (PointPair, f64, f64) {
        let (vx, ax) = self.x.away_atom(&r.x);
        let (vy, ay) = self.y.away_atom(&r.y);
        (PointPair::new(vx.to_vec(), vy.to_vec()), ax, ay)
    }

    /// Renormalises on schedule or when the weight sums drift.
    pub fn maintain(&mut self, iteration: usize) {
        let drifted = (self.x.weight_sum() - 1.0).abs() > WEIGHT_DRIFT_TOL
            || (self.y.weight_sum() - 1.0).abs() > WEIGHT_DRIFT_TOL;
        if drifted || (iteration > 0 && iteration % RENORMALIZE_EVERY == 0) {
            self.x.renormalize();
            self.y.renormalize();
        }
    }

    /// Fails when `Σ α_v v` has wandered away from `z`.
    pub fn check_represents(&self, z: &PointPair) -> Result<()> {
        let err = self.reconstruct().max_abs_diff(z);
        if err.is_nan() || err > RECONSTRUCTION_TOL {
            return Err(Error::InvariantViolation(format!(
                "active set reconstructs the iterate only to {err:e}"
            )));
        }
        Ok(())
    }
}

/// `γ_max` of an away step: `min{α/(1−α)}` over blocks, `∞` for a block at weight one.
pub fn away_gamma_max(alpha_x: f64, alpha_y: f64) -> f64 {
    let term = |a: f64| if a >= 1.0 { f64::INFINITY } else { a / (1.0 - a) };
    term(alpha_x).min(term(alpha_y))
}

/// `γ_max` of a pairwise step: `min{α_{v_x}, α_{v_y}}`.
pub fn pairwise_gamma_max(alpha_x: f64, alpha_y: f64) -> f64 {
    alpha_x.min(alpha_y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atoms() -> ActiveSet {
        ActiveSet::from_weighted(vec![(vec![1.0, 0.0], 0.5), (vec![0.0, 1.0], 0.5)]).unwrap()
    }

    #[test]
    fn fw_update_keeps_simplex() {
        let mut s = two_atoms();
        s.fw_update(&[1.0, 1.0], 0.3);
        assert_eq!(s.len(), 3);
        assert!((s.weight_sum() - 1.0).abs() < 1e-15);
        assert!((s.weight_of(&[1.0, 1.0]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn gamma_max_examples() {
        assert!((away_gamma_max(0.5, 0.25) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(away_gamma_max(1.0, 1.0), f64::INFINITY);
        assert_eq!(pairwise_gamma_max(0.2, 0.7), 0.2);
    }

    #[test]
    fn drop_step_evicts_atom() {
        let mut s = two_atoms();
        let gmax = away_gamma_max(0.5, 1.0);
        s.away_update(&[1.0, 0.0], gmax, true);
        assert_eq!(s.len(), 1);
        assert_eq!(s.weights(), &[1.0]);
    }

    #[test]
    fn pairwise_moves_weight() {
        let mut s = two_atoms();
        s.pairwise_update(&[0.0, 1.0], &[1.0, 0.0], 0.2, false);
        assert!((s.weight_of(&[1.0, 0.0]) - 0.3).abs() < 1e-15);
        assert!((s.weight_of(&[0.0, 1.0]) - 0.7).abs() < 1e-15);
        s.pairwise_update(&[0.0, 1.0], &[1.0, 0.0], 0.3, true);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn away_atom_is_first_maximiser() {
        let s = two_atoms();
        let (v, w) = s.away_atom(&[1.0, 1.0]);
        assert_eq!(v, &[1.0, 0.0]);
        assert_eq!(w, 0.5);
    }

    #[test]
    fn reconstruction_check() {
        let pair = ActiveSetPair {
            x: two_atoms(),
            y: ActiveSet::singleton(vec![0.0]),
        };
        assert!(pair
            .check_represents(&PointPair::new(vec![0.5, 0.5], vec![0.0]))
            .is_ok());
        assert!(matches!(
            pair.check_represents(&PointPair::new(vec![0.6, 0.5], vec![0.0])),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(ActiveSet::from_weighted(vec![(vec![1.0], 0.4)]).is_err());
        assert!(ActiveSet::from_weighted(vec![(vec![1.0], 1.5), (vec![0.0], -0.5)]).is_err());
    }
}
