//! Ladder operators as differential operators on sampled radial functions.
//!
//! Both radial Hamiltonians share the form
//! `H̃ᵢ = k·{−∂² + q r² + C/r²}` with
//! `(k, q, C) = (½, ω′², βᵢ)` for the oscillator and `(¼, γ², α′ᵢ² − ¼)` for
//! Kepler–Coulomb. The ladder operators are
//!
//! * oscillator: `D̃± = −2H̃ ∓ 2ω′ r∂ᵣ + 2ω′² r² ∓ ω′`
//! * Kepler–Coulomb: `D̃± = 4H̃ ± 2γ r∂ᵣ − 2γ² r² ± γ`
//!
//! All derivatives of `X_n` are analytic, so the recurrences hold to
//! roundoff on any grid that avoids `r = 0` and the underflowing tail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laguerre::RadialWavefunction;
use crate::lattice::Direction;
use crate::params::ModelKind;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, points: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {points}")));
        }
        Ok(RadialGrid {
            r_min,
            r_max,
            points,
        })
    }

    /// `[0.2/√s, R_cut]` with 4001 points, where `R_cut` is the tail radius of
    /// the given wavefunction.
    pub fn default_for(w: &RadialWavefunction) -> Self {
        Self::default_with_points(w, 4001)
    }

    pub fn default_with_points(w: &RadialWavefunction, points: usize) -> Self {
        RadialGrid {
            r_min: 0.2 / w.scale.sqrt(),
            r_max: w.tail_radius(),
            points: points.max(2),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = (self.r_max - self.r_min) / (self.points - 1) as f64;
        (0..self.points).map(move |j| self.r_min + j as f64 * h)
    }
}

/// Radial differential operator data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialOperator {
    pub model: ModelKind,
    /// `ω′` or `γ`.
    pub scale: f64,
    /// Numerator `C` of the `1/r²` term.
    pub centrifugal: f64,
}

impl RadialOperator {
    fn kinetic(&self) -> f64 {
        match self.model {
            ModelKind::Dso => 0.5,
            ModelKind::Kc => 0.25,
        }
    }

    /// `H̃ᵢ f` from the jet `(f, f′, f″)`.
    pub fn hamiltonian(&self, r: f64, jet: (f64, f64, f64)) -> f64 {
        let (f, _, f2) = jet;
        let s = self.scale;
        self.kinetic() * (-f2 + s * s * r * r * f + self.centrifugal * f / (r * r))
    }

    /// `D̃±` from the jet.
    pub fn ladder(&self, dir: Direction, r: f64, jet: (f64, f64, f64)) -> f64 {
        let (f, f1, _) = jet;
        let s = self.scale;
        let sign = dir.step() as f64;
        let h = self.hamiltonian(r, jet);
        match self.model {
            ModelKind::Dso => -2.0 * h - sign * 2.0 * s * r * f1 + 2.0 * s * s * r * r * f - sign * s * f,
            ModelKind::Kc => 4.0 * h + sign * 2.0 * s * r * f1 - 2.0 * s * s * r * r * f + sign * s * f,
        }
    }
}

/// `D̃ᵢ±` of one mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffLadder {
    pub direction: Direction,
    pub operator: RadialOperator,
}

impl DiffLadder {
    pub fn new(model: ModelKind, direction: Direction, scale: f64, centrifugal: f64) -> Self {
        DiffLadder {
            direction,
            operator: RadialOperator {
                model,
                scale,
                centrifugal,
            },
        }
    }
}

fn check_consistent(op: &RadialOperator, w: &RadialWavefunction) -> Result<()> {
    if op.model != w.model {
        return Err(Error::ParameterMismatch("model"));
    }
    if op.scale != w.scale {
        return Err(Error::ParameterMismatch("scale"));
    }
    Ok(())
}

/// Samples `(D̃± X_n)(r)` on the grid.
pub fn apply_diff_ladder(op: &DiffLadder, w: &RadialWavefunction, grid: &RadialGrid) -> Result<Vec<f64>> {
    check_consistent(&op.operator, w)?;
    Ok(grid
        .nodes()
        .map(|r| op.operator.ladder(op.direction, r, w.jet(r)))
        .collect())
}

/// One radial mode: the data of `X_n` and of its Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub model: ModelKind,
    pub scale: f64,
    pub alpha: f64,
    pub centrifugal: f64,
}

impl ModeSpec {
    /// Mode whose centrifugal term is the one implied by `alpha`.
    pub fn consistent(model: ModelKind, scale: f64, alpha: f64) -> Self {
        ModeSpec {
            model,
            scale,
            alpha,
            centrifugal: alpha * alpha - 0.25,
        }
    }

    pub fn wavefunction(&self, n: u32) -> Result<RadialWavefunction> {
        RadialWavefunction::new(self.model, n, self.alpha, self.scale)
    }

    pub fn operator(&self) -> RadialOperator {
        RadialOperator {
            model: self.model,
            scale: self.scale,
            centrifugal: self.centrifugal,
        }
    }

    /// Recurrence coefficient of `D̃±` on `X_n`.
    pub fn ladder_coefficient(&self, dir: Direction, n: u32) -> f64 {
        let n = n as f64;
        let factor = match dir {
            Direction::Raise => n + 1.0,
            Direction::Lower => n + self.alpha,
        };
        match self.model {
            ModelKind::Dso => -4.0 * self.scale * factor,
            ModelKind::Kc => 4.0 * self.scale * factor,
        }
    }

    pub fn eigenvalue(&self, n: u32) -> f64 {
        let n = n as f64;
        match self.model {
            ModelKind::Dso => self.scale * (2.0 * n + self.alpha + 1.0),
            ModelKind::Kc => (n + self.alpha / 2.0 + 0.5) * self.scale,
        }
    }

    /// Default grid covering `X_n` and `X_{n+1}`.
    pub fn default_grid(&self, n: u32, points: usize) -> Result<RadialGrid> {
        Ok(RadialGrid::default_with_points(&self.wavefunction(n + 1)?, points))
    }
}

/// `max|applied − expected| / max|expected|` for `D̃± X_n = c X_{n±1}`.
///
/// `coefficient_factor` scales the expected coefficient (fault injection).
/// When the expected function is identically zero the residual is taken
/// relative to `scale · max|X_n|`.
pub fn recurrence_residual(
    mode: &ModeSpec,
    dir: Direction,
    n: u32,
    grid: &RadialGrid,
    coefficient_factor: f64,
) -> Result<f64> {
    let w = mode.wavefunction(n)?;
    let op = DiffLadder {
        direction: dir,
        operator: mode.operator(),
    };
    let applied = apply_diff_ladder(&op, &w, grid)?;
    let coefficient = coefficient_factor * mode.ladder_coefficient(dir, n);
    let shift = dir.step();
    let mut max_diff = 0.0f64;
    let mut max_expected = 0.0f64;
    let mut max_source = 0.0f64;
    for (r, a) in grid.nodes().zip(&applied) {
        let expected = coefficient * w.shifted_value(shift, r);
        max_diff = max_diff.max((a - expected).abs());
        max_expected = max_expected.max(expected.abs());
        max_source = max_source.max(w.shifted_value(0, r).abs());
    }
    if max_expected > 0.0 {
        Ok(max_diff / max_expected)
    } else {
        Ok(max_diff / (mode.scale * max_source))
    }
}

/// `max|H̃X_n − λX_n| / max|λX_n|`.
pub fn hamiltonian_residual(mode: &ModeSpec, n: u32, grid: &RadialGrid) -> Result<f64> {
    let w = mode.wavefunction(n)?;
    let op = mode.operator();
    check_consistent(&op, &w)?;
    let lambda = mode.eigenvalue(n);
    let mut max_diff = 0.0f64;
    let mut max_expected = 0.0f64;
    for r in grid.nodes() {
        let jet = w.jet(r);
        max_diff = max_diff.max((op.hamiltonian(r, jet) - lambda * jet.0).abs());
        max_expected = max_expected.max((lambda * jet.0).abs());
    }
    Ok(max_diff / max_expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64) -> RadialGrid {
        RadialGrid::new(lo, hi, 4001).unwrap()
    }

    #[test]
    fn dso_bottom_rung_annihilated() {
        let mode = ModeSpec::consistent(ModelKind::Dso, 1.0, 0.0);
        let w = mode.wavefunction(0).unwrap();
        let g = RadialGrid::default_for(&w);
        let op = DiffLadder::new(ModelKind::Dso, Direction::Lower, 1.0, mode.centrifugal);
        let out = apply_diff_ladder(&op, &w, &g).unwrap();
        let max_w = g.nodes().map(|r| w.shifted_value(0, r).abs()).fold(0.0, f64::max);
        assert!(out.iter().all(|v| v.abs() <= 1e-10 * max_w));
        assert!(recurrence_residual(&mode, Direction::Lower, 0, &g, 1.0).unwrap() <= 1e-10);
    }

    #[test]
    fn dso_raise_example() {
        let mode = ModeSpec::consistent(ModelKind::Dso, 1.0, 1.5);
        assert_eq!(mode.ladder_coefficient(Direction::Raise, 2), -12.0);
        let res = recurrence_residual(&mode, Direction::Raise, 2, &grid(0.2, 6.0), 1.0).unwrap();
        assert!(res <= 1e-8, "{res}");
    }

    #[test]
    fn kc_raise_example() {
        let mode = ModeSpec::consistent(ModelKind::Kc, 0.7, 2.0 * 2f64.sqrt());
        assert!((mode.ladder_coefficient(Direction::Raise, 1) - 8.0 * 0.7).abs() < 1e-15);
        let g = mode.default_grid(1, 4001).unwrap();
        assert!(recurrence_residual(&mode, Direction::Raise, 1, &g, 1.0).unwrap() <= 1e-8);
    }

    #[test]
    fn mutated_coefficient_detected() {
        let mode = ModeSpec::consistent(ModelKind::Dso, 1.0, 1.5);
        let g = mode.default_grid(3, 4001).unwrap();
        let res = recurrence_residual(&mode, Direction::Lower, 3, &g, 1.001).unwrap();
        assert!(res >= 1e-4);
    }

    #[test]
    fn hamiltonian_examples() {
        let cases = [
            (ModelKind::Dso, 1.0, 0.0, 0, 1.0),
            (ModelKind::Dso, 1.7, 2.3, 4, 1.7 * 11.3),
            (ModelKind::Kc, 0.9, 1.8, 2, 3.4 * 0.9),
        ];
        for (model, s, a, n, lambda) in cases {
            let mode = ModeSpec::consistent(model, s, a);
            assert!((mode.eigenvalue(n) - lambda).abs() < 1e-12);
            let g = mode.default_grid(n, 4001).unwrap();
            assert!(hamiltonian_residual(&mode, n, &g).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn mismatch_is_an_error() {
        let w = RadialWavefunction::new(ModelKind::Dso, 1, 1.0, 1.0).unwrap();
        let g = grid(0.2, 5.0);
        let op = DiffLadder::new(ModelKind::Kc, Direction::Raise, 1.0, 0.75);
        assert_eq!(apply_diff_ladder(&op, &w, &g), Err(Error::ParameterMismatch("model")));
        let op = DiffLadder::new(ModelKind::Dso, Direction::Raise, 2.0, 0.75);
        assert_eq!(apply_diff_ladder(&op, &w, &g), Err(Error::ParameterMismatch("scale")));
    }

    #[test]
    fn bad_grids() {
        assert!(RadialGrid::new(0.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(2.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(0.1, 1.0, 1).is_err());
    }

    #[test]
    fn gauge_conjugation_preserves_coefficients() {
        // f = μX with μ = r^k. Writing D̃ in terms of f:
        // μ ∂ μ⁻¹ f = f′ − (k/r) f,
        // μ ∂² μ⁻¹ f = f″ − (2k/r) f′ + k(k+1)/r² f.
        let k = -1.5;
        for model in [ModelKind::Dso, ModelKind::Kc] {
            let mode = ModeSpec::consistent(model, 0.8, 1.3);
            let op = mode.operator();
            let w = mode.wavefunction(3).unwrap();
            for dir in Direction::BOTH {
                for &r in &[0.4, 1.0, 1.7, 2.9] {
                    let (x, x1, x2) = w.jet(r);
                    let mu = r.powf(k);
                    let dmu = k * r.powf(k - 1.0);
                    let ddmu = k * (k - 1.0) * r.powf(k - 2.0);
                    let f = mu * x;
                    let f1 = dmu * x + mu * x1;
                    let f2 = ddmu * x + 2.0 * dmu * x1 + mu * x2;
                    let g1 = f1 - k / r * f;
                    let g2 = f2 - 2.0 * k / r * f1 + k * (k + 1.0) / (r * r) * f;
                    let conjugated = op.ladder(dir, r, (f, g1, g2));
                    let direct = mu * op.ladder(dir, r, (x, x1, x2));
                    assert!((conjugated - direct).abs() <= 1e-12 * direct.abs().max(mu * x.abs()));
                }
            }
        }
    }
}
