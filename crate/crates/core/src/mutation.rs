//! Fault injection for the verification suite.
//!
//! A mutation perturbs one constant on the ladder side of a check (the
//! recurrence coefficients, the lattice eigenvalues, the sampled
//! wavefunctions) while leaving the reference side (Casimir eigenvalues,
//! closed forms) untouched. Sector constants and the ladder scale are shifted
//! additively by `delta`; single ladder coefficients are scaled by
//! `1 + delta`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationTarget {
    Alpha1,
    Alpha2,
    Beta1,
    Beta2,
    Delta1,
    Delta2,
    Omega,
    Raise1,
    Lower1,
    Raise2,
    Lower2,
}

impl MutationTarget {
    pub const ALL: [MutationTarget; 11] = [
        MutationTarget::Alpha1,
        MutationTarget::Alpha2,
        MutationTarget::Beta1,
        MutationTarget::Beta2,
        MutationTarget::Delta1,
        MutationTarget::Delta2,
        MutationTarget::Omega,
        MutationTarget::Raise1,
        MutationTarget::Lower1,
        MutationTarget::Raise2,
        MutationTarget::Lower2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MutationTarget::Alpha1 => "alpha1",
            MutationTarget::Alpha2 => "alpha2",
            MutationTarget::Beta1 => "beta1",
            MutationTarget::Beta2 => "beta2",
            MutationTarget::Delta1 => "delta1",
            MutationTarget::Delta2 => "delta2",
            MutationTarget::Omega => "omega",
            MutationTarget::Raise1 => "raise1",
            MutationTarget::Lower1 => "lower1",
            MutationTarget::Raise2 => "raise2",
            MutationTarget::Lower2 => "lower2",
        }
    }
}

impl fmt::Display for MutationTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MutationTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MutationTarget::ALL
            .iter()
            .copied()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownMutation(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mutation {
    pub target: MutationTarget,
    pub delta: f64,
}

impl Mutation {
    pub fn new(target: MutationTarget, delta: f64) -> Self {
        Mutation { target, delta }
    }

    /// Additive shift applied to the sector constant `alpha` of mode `i`
    /// (0-based) for the given model, if this mutation touches it.
    pub(crate) fn alpha_shift(&self, mode: usize, delta_weight: f64) -> f64 {
        use MutationTarget::*;
        match (self.target, mode) {
            (Alpha1, 0) | (Alpha2, 1) => self.delta,
            // α depends on δ through α = wδ + const
            (Delta1, 0) | (Delta2, 1) => delta_weight * self.delta,
            _ => 0.0,
        }
    }

    pub(crate) fn centrifugal_shift(&self, mode: usize) -> f64 {
        match (self.target, mode) {
            (MutationTarget::Beta1, 0) | (MutationTarget::Beta2, 1) => self.delta,
            _ => 0.0,
        }
    }

    pub(crate) fn scale_shift(&self) -> f64 {
        if self.target == MutationTarget::Omega {
            self.delta
        } else {
            0.0
        }
    }

    /// Multiplicative factor on the ladder coefficient of mode `i` in the
    /// given direction (`raise = true` for `D⁺`).
    pub(crate) fn coefficient_factor(&self, mode: usize, raise: bool) -> f64 {
        use MutationTarget::*;
        match (self.target, mode, raise) {
            (Raise1, 0, true) | (Lower1, 0, false) | (Raise2, 1, true) | (Lower2, 1, false) => {
                1.0 + self.delta
            }
            _ => 1.0,
        }
    }
}
