//! Step-size rules.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// `γ = min(γ_max, ν/(2C)·g)`, with `g = g^PFW` for the away and pairwise variants.
    Adaptive { nu: f64, c: f64 },
    /// `γ = min(γ_max, 2/(2 + k(t)))`.
    Universal,
    /// `γ = min(γ_max, 1/(1 + t))`; with SP-FW on simplices this is fictitious play.
    Harmonic,
    /// `γ = min(1, g^FW/(‖s − z‖² C_δ))` for strongly convex domains.
    StronglyConvexSet { c_delta: f64 },
    /// `γ = min(γ_max, g/C̃)`.
    Heuristic { c_tilde: f64 },
}

impl StepRule {
    /// Adaptive rule; refuses `ν ≤ 0` because the rate theory needs `ν > 0`.
    pub fn adaptive(nu: f64, c: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::invalid(format!(
                "adaptive step needs nu > 0, computed nu = {nu}; use the heuristic or universal rule"
            )));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(format!("adaptive step needs C > 0, got {c}")));
        }
        Ok(StepRule::Adaptive { nu, c })
    }

    pub fn strongly_convex_set(c_delta: f64) -> Result<Self> {
        if !(c_delta.is_finite() && c_delta > 0.0) {
            return Err(Error::invalid(format!("C_delta must be positive, got {c_delta}")));
        }
        Ok(StepRule::StronglyConvexSet { c_delta })
    }

    pub fn heuristic(c_tilde: f64) -> Result<Self> {
        if !(c_tilde.is_finite() && c_tilde > 0.0) {
            return Err(Error::invalid(format!("C_tilde must be positive, got {c_tilde}")));
        }
        Ok(StepRule::Heuristic { c_tilde })
    }

    /// Re-checks constants of a rule built by hand.
    pub fn validate(&self) -> Result<()> {
        match *self {
            StepRule::Adaptive { nu, c } => Self::adaptive(nu, c).map(drop),
            StepRule::StronglyConvexSet { c_delta } => Self::strongly_convex_set(c_delta).map(drop),
            StepRule::Heuristic { c_tilde } => Self::heuristic(c_tilde).map(drop),
            StepRule::Universal | StepRule::Harmonic => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StepRule::Adaptive { .. } => "adaptive",
            StepRule::Universal => "universal",
            StepRule::Harmonic => "harmonic",
            StepRule::StronglyConvexSet { .. } => "strongly-convex-set",
            StepRule::Heuristic { .. } => "heuristic",
        }
    }
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything a rule may look at.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepContext {
    /// `g^FW` at the current iterate.
    pub g: f64,
    /// `g^PFW`, present for the away and pairwise variants.
    pub g_pfw: Option<f64>,
    pub k_t: usize,
    pub t: usize,
    /// `‖s − z‖²` in the block norm.
    pub dist_sq: Option<f64>,
    pub gamma_max: f64,
}

/// `0 ≤ γ ≤ γ_max` for the given rule.
pub fn step_size(rule: &StepRule, ctx: &StepContext) -> Result<f64> {
    if !(ctx.gamma_max >= 0.0) {
        return Err(Error::invalid("gamma_max must be nonnegative"));
    }
    let gap = ctx.g_pfw.unwrap_or(ctx.g).max(0.0);
    let raw = match *rule {
        StepRule::Adaptive { nu, c } => nu / (2.0 * c) * gap,
        StepRule::Universal => 2.0 / (2.0 + ctx.k_t as f64),
        StepRule::Harmonic => 1.0 / (1.0 + ctx.t as f64),
        StepRule::StronglyConvexSet { c_delta } => {
            let dist_sq = ctx
                .dist_sq
                .ok_or_else(|| Error::invalid("strongly-convex-set step needs ‖s − z‖²"))?;
            if dist_sq > 0.0 {
                (ctx.g.max(0.0) / (dist_sq * c_delta)).min(1.0)
            } else {
                0.0
            }
        }
        StepRule::Heuristic { c_tilde } => gap / c_tilde,
    };
    Ok(raw.min(ctx.gamma_max).max(0.0))
}
