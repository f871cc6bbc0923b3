//! Deformed-oscillator realization of the cubic algebras.
//!
//! With `ℵ = B̃/c` (`c = 4ω′` or `2γ`), `b† = L̃₁`, `b = L̃₂` the algebra takes
//! the form `b†b = Φ(ℵ)`, `bb† = Φ(ℵ+1)`. The structure function is a
//! product of four brackets in `x + u` with the Hamiltonian replaced by its
//! eigenvalue. Finite `(p+1)`-dimensional unirreps need `Φ(0) = Φ(p+1) = 0`
//! and `Φ(x) > 0` on `1..=p`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Scalar;
use crate::lattice::ModelConstants;
use crate::params::{lattice_multiplicity, DsoParams, DsoSector, KcParams, KcSector, ModelKind};

/// Sign choice `(ε₁, ε₂)` or `(k₁, k₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub k1: i8,
    pub k2: i8,
}

impl Branch {
    pub const PHYSICAL: Branch = Branch { k1: 1, k2: 1 };

    pub const ALL: [Branch; 4] = [
        Branch { k1: 1, k2: 1 },
        Branch { k1: 1, k2: -1 },
        Branch { k1: -1, k2: 1 },
        Branch { k1: -1, k2: -1 },
    ];

    pub fn new(k1: i8, k2: i8) -> Result<Self> {
        if k1.abs() != 1 || k2.abs() != 1 {
            return Err(Error::InvalidArgument(format!("branch signs must be +1 or -1, got ({k1}, {k2})")));
        }
        Ok(Branch { k1, k2 })
    }

    pub fn is_physical(&self) -> bool {
        *self == Branch::PHYSICAL
    }

    fn signs<S: Scalar>(&self) -> (S, S) {
        (S::from_i64(self.k1 as i64), S::from_i64(self.k2 as i64))
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |k: i8| if k > 0 { '+' } else { '-' };
        write!(f, "({},{})", s(self.k1), s(self.k2))
    }
}

/// `Φ(x; u, E)` for one sector.
#[derive(Clone, Debug)]
pub struct StructureFunction<S> {
    pub model: ModelKind,
    pub scale: S,
    pub alpha: [S; 2],
    pub u: S,
    /// `Ẽ′` or `ε̃`, standing in for `H̃`.
    pub energy: S,
}

impl<S: Scalar> StructureFunction<S> {
    /// The four bracket values at `x`.
    pub fn brackets(&self, x: &S) -> [S; 4] {
        let one = S::one();
        let two = S::from_i64(2);
        let s = self.scale.clone();
        let [a1, a2] = self.alpha.clone();
        let (lead, unit) = match self.model {
            ModelKind::Dso => (S::from_i64(4) * s.clone(), two * s),
            ModelKind::Kc => (two * s.clone(), s),
        };
        let t = lead * (x.clone() + self.u.clone());
        let e = self.energy.clone();
        [
            t.clone() + e.clone() - unit.clone() * (one.clone() - a1.clone()),
            t.clone() + e.clone() - unit.clone() * (one.clone() + a1),
            t.clone() - e.clone() - unit.clone() * (one.clone() - a2.clone()),
            t - e - unit * (one + a2),
        ]
    }

    fn prefactor(&self) -> S {
        match self.model {
            ModelKind::Dso => S::one(),
            ModelKind::Kc => S::from_i64(16),
        }
    }

    pub fn eval(&self, x: &S) -> S {
        let [b1, b2, b3, b4] = self.brackets(x);
        self.prefactor() * b1 * b2 * b3 * b4
    }

    /// Magnitude floor `pref · Π(sum of |addends|)` for relative residuals.
    pub fn magnitude(&self, x: f64) -> f64 {
        let s = self.scale.to_f64().abs();
        let a = [self.alpha[0].to_f64().abs(), self.alpha[1].to_f64().abs()];
        let (lead, unit) = match self.model {
            ModelKind::Dso => (4.0 * s, 2.0 * s),
            ModelKind::Kc => (2.0 * s, s),
        };
        let t = lead * (x.abs() + self.u.to_f64().abs()) + self.energy.to_f64().abs();
        self.prefactor().to_f64() * (0..4).map(|i| t + unit * (1.0 + a[i / 2])).product::<f64>()
    }

    /// Coefficients `[c₀, …, c₄]` of `Φ` as a polynomial in `x`.
    pub fn coefficients(&self) -> [S; 5] {
        let mut poly = vec![self.prefactor()];
        let lead = match self.model {
            ModelKind::Dso => S::from_i64(4) * self.scale.clone(),
            ModelKind::Kc => S::from_i64(2) * self.scale.clone(),
        };
        // each bracket is lead·x + (bracket at x = 0)
        for constant in self.brackets(&S::zero()) {
            poly = poly_mul(&poly, &[constant, lead.clone()]);
        }
        [0, 1, 2, 3, 4].map(|i| poly[i].clone())
    }
}

fn poly_mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

pub fn build_structure_function<S: Scalar>(
    constants: &ModelConstants<S>,
    u: S,
    energy: S,
) -> StructureFunction<S> {
    StructureFunction {
        model: constants.model,
        scale: constants.scale.clone(),
        alpha: constants.alpha.clone(),
        u,
        energy,
    }
}

/// Closed-form `(u, energy)` solving `Φ(0) = Φ(p+1) = 0` on a branch.
///
/// Oscillator: `Ẽ′ = (2+2p+ε₁α₁+ε₂α₂)ω′`, `u = (−Ẽ′ + 2ω′(1+ε₁α₁))/(4ω′)`.
/// Kepler–Coulomb: `ε̃ = (γ/2)(2+2p+k₁α′₁+k₂α′₂)`, `u = (−ε̃ + γ(1+k₁α′₁))/(2γ)`.
pub fn constraint_solution<S: Scalar>(constants: &ModelConstants<S>, p: u32, branch: Branch) -> (S, S) {
    let (k1, k2) = branch.signs::<S>();
    let [a1, a2] = constants.alpha.clone();
    let s = constants.scale.clone();
    let two = S::from_i64(2);
    let core = S::from_i64(2 + 2 * p as i64) + k1.clone() * a1.clone() + k2 * a2;
    let shifted = S::one() + k1 * a1;
    match constants.model {
        ModelKind::Dso => {
            let energy = core * s.clone();
            let u = (two * s.clone() * shifted - energy.clone()) / (S::from_i64(4) * s);
            (u, energy)
        }
        ModelKind::Kc => {
            let energy = s.clone() * core / two.clone();
            let u = (s.clone() * shifted - energy.clone()) / (two * s);
            (u, energy)
        }
    }
}

/// `256 s⁴ x (x + k₁α₁)(1+p−x)(1+p−x+k₂α₂)` with `s = ω′` or `γ`.
pub fn phi_closed_form<S: Scalar>(constants: &ModelConstants<S>, p: u32, branch: Branch, x: &S) -> S {
    let (k1, k2) = branch.signs::<S>();
    let [a1, a2] = constants.alpha.clone();
    let s2 = constants.scale.clone() * constants.scale.clone();
    let rest = S::from_i64(1 + p as i64) - x.clone();
    S::from_i64(256) * s2.clone() * s2 * x.clone() * (x.clone() + k1 * a1) * rest.clone() * (rest + k2 * a2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Unirrep {
    pub p: u32,
    pub branch: Branch,
    pub u: f64,
    /// `Ẽ′` or `ε̃`.
    pub energy: f64,
    /// `Φ(x)` for `x = 0..=p+1`.
    pub phi: Vec<f64>,
    /// `max(|Φ(0)|, |Φ(p+1)|)` relative to the magnitude of `Φ` on the rep.
    pub constraint_residual: f64,
    pub constraints_hold: bool,
    /// `Φ(x) > 0` for `1 ≤ x ≤ p`.
    pub positive: bool,
    pub physical: bool,
}

/// Tolerance on `Φ(0)`, `Φ(p+1)` relative to the size of `Φ`.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Solves the constraints on every branch and classifies the results.
pub fn solve_constraints<S: Scalar>(constants: &ModelConstants<S>, p: u32) -> Vec<Unirrep> {
    Branch::ALL
        .iter()
        .map(|&branch| {
            let (u, energy) = constraint_solution(constants, p, branch);
            let phi = build_structure_function(constants, u.clone(), energy.clone());
            let values: Vec<S> = (0..=p as i64 + 1).map(|x| phi.eval(&S::from_i64(x))).collect();
            let floats: Vec<f64> = values.iter().map(Scalar::to_f64).collect();
            let interior = floats[1..=p as usize].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let scale = interior
                .max(phi.magnitude(0.0))
                .max(phi.magnitude(p as f64 + 1.0));
            let ends = [&values[0], &values[p as usize + 1]];
            let constraint_residual = ends.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max) / scale;
            let constraints_hold = if S::is_exact() {
                ends.iter().all(|v| v.is_zero())
            } else {
                constraint_residual <= CONSTRAINT_TOL
            };
            let positive = floats[1..=p as usize].iter().all(|v| *v > 0.0);
            Unirrep {
                p,
                branch,
                u: u.to_f64(),
                energy: energy.to_f64(),
                phi: floats,
                constraint_residual,
                constraints_hold,
                positive,
                physical: branch.is_physical() && constraints_hold && positive,
            }
        })
        .collect()
}

/// One row of a spectrum table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub p: u32,
    /// `None` when the branch has no finite energy.
    pub energy: Option<f64>,
    pub multiplicity: u32,
    pub branch: Branch,
    pub physical: bool,
    /// Why a branch was classified non-physical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `E = ħ²Ẽ′` on branch `(+,+)` for `p = 0..=p_max`.
pub fn dso_spectrum(params: &DsoParams, sector: &DsoSector, p_max: u32) -> Vec<SpectrumEntry> {
    let constants = ModelConstants::dso(params, sector);
    let h2 = params.hbar * params.hbar;
    (0..=p_max)
        .map(|p| {
            let (_, energy) = constraint_solution(&constants, p, Branch::PHYSICAL);
            SpectrumEntry {
                p,
                energy: Some(h2 * energy),
                multiplicity: lattice_multiplicity(p),
                branch: Branch::PHYSICAL,
                physical: true,
                note: None,
            }
        })
        .collect()
}

/// `E = −c₀² / (ħ² (p + 1 + (k₁α′₁ + k₂α′₂)/2)²)`.
pub fn kc_energy_branch(sector: &KcSector, p: u32, branch: Branch, params: &KcParams) -> Result<f64> {
    let denominator = p as f64
        + 1.0
        + (branch.k1 as f64 * sector.alphap1 + branch.k2 as f64 * sector.alphap2) / 2.0;
    if !(denominator > 0.0) {
        return Err(Error::DegenerateDenominator {
            p,
            k1: branch.k1,
            k2: branch.k2,
            denominator,
        });
    }
    Ok(-params.c0 * params.c0 / (params.hbar * params.hbar * denominator * denominator))
}

/// All four branches for `p = 0..=p_max`, with the non-physical ones labelled.
pub fn kc_spectrum(params: &KcParams, sector: &KcSector, p_max: u32) -> Vec<SpectrumEntry> {
    // positivity of Φ does not depend on γ; any positive value will do
    let constants = ModelConstants::kc(params, sector, 1.0);
    let mut out = Vec::new();
    for p in 0..=p_max {
        let reps = solve_constraints(&constants, p);
        for branch in Branch::ALL {
            let rep = reps.iter().find(|r| r.branch == branch).expect("every branch solved");
            let (energy, mut note) = match kc_energy_branch(sector, p, branch, params) {
                Ok(e) => (Some(e), None),
                Err(e) => (None, Some(e.to_string())),
            };
            if !rep.positive && note.is_none() {
                note = Some("structure function not positive on 1..=p".to_string());
            }
            let physical = rep.physical && energy.is_some();
            if !physical && note.is_none() {
                note = Some("sign branch does not reproduce the separated spectrum".to_string());
            }
            out.push(SpectrumEntry {
                p,
                energy,
                multiplicity: lattice_multiplicity(p),
                branch,
                physical,
                note,
            });
        }
    }
    out
}

/// Slope of `ε̃(γ)` on branch `(+,+)`: `(2 + 2p + α′₁ + α′₂)/2`.
pub fn ccm_slope(sector: &KcSector, p: u32) -> f64 {
    (2.0 + 2.0 * p as f64 + sector.alphap1 + sector.alphap2) / 2.0
}

/// Energy obtained from a slope by trading `ε̃ ↔ β₀` and `γ² ↔ −E/ħ²`.
pub fn ccm_energy(slope: f64, params: &KcParams) -> f64 {
    -params.c0 * params.c0 / (params.hbar * params.hbar * slope * slope)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub p: u32,
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|fit − sample| / |sample|`.
    pub fit_residual: f64,
    pub expected_slope: f64,
}

/// Least-squares line through `(γ, ε̃)` samples.
pub fn fit_line(p: u32, samples: &[(f64, f64)], expected_slope: f64) -> Result<SlopeFit> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("slope fit needs at least two samples".into()));
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("slope fit needs distinct gamma samples".into()));
    }
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let fit_residual = samples
        .iter()
        .map(|&(x, y)| (slope * x + intercept - y).abs() / y.abs())
        .fold(0.0, f64::max);
    Ok(SlopeFit {
        p,
        slope,
        intercept,
        fit_residual,
        expected_slope,
    })
}

/// Measures `ε̃(γ)` of level `p` with the radial oracle at each `γ` and fits
/// a line.
pub fn ccm_slope_check(
    params: &KcParams,
    sector: &KcSector,
    p: u32,
    gamma_samples: &[f64],
    points: usize,
) -> Result<SlopeFit> {
    let mut samples = Vec::with_capacity(gamma_samples.len());
    for &gamma in gamma_samples {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be finite and positive",
            });
        }
        let levels = crate::oracle::kc_combined_levels(params, sector, gamma, p as usize + 1, points)?;
        let level = levels.get(p as usize).ok_or_else(|| {
            Error::InvalidArgument(format!("oracle returned fewer than {} levels", p + 1))
        })?;
        samples.push((gamma, level.energy));
    }
    fit_line(p, &samples, ccm_slope(sector, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_dso_sector, derive_kc_sector};

    fn dso_constants(alpha: [f64; 2], w: f64) -> ModelConstants<f64> {
        ModelConstants {
            model: ModelKind::Dso,
            scale: w,
            alpha,
            casimir: [alpha[0] * alpha[0], alpha[1] * alpha[1]],
        }
    }

    #[test]
    fn generic_dso_structure_function() {
        let c = dso_constants([1.0, 2.0], 1.0);
        let phi = build_structure_function(&c, 0.3, 5.0);
        // brackets at x = 1: 4·1.3 ± 5 − 2(1∓α)
        let t = 4.0 * 1.3;
        let expected = (t + 5.0 - 0.0) * (t + 5.0 - 4.0) * (t - 5.0 + 2.0) * (t - 5.0 - 6.0);
        assert!((phi.eval(&1.0) - expected).abs() < 1e-12 * expected.abs());
    }

    #[test]
    fn oscillator_limit_energy() {
        let c = dso_constants([0.0, 0.0], 1.5);
        let (_, e) = constraint_solution(&c, 2, Branch::PHYSICAL);
        assert_eq!(e, 6.0 * 1.5);
    }

    #[test]
    fn negative_branch_not_positive() {
        let c = dso_constants([5.0, 0.5], 1.0);
        let reps = solve_constraints(&c, 1);
        let rep = reps.iter().find(|r| r.branch == Branch::new(-1, 1).unwrap()).unwrap();
        assert!(rep.constraints_hold);
        assert!(!rep.positive && !rep.physical);
        let phi1 = phi_closed_form(&c, 1, rep.branch, &1.0);
        assert_eq!(phi1, 256.0 * (1.0 - 5.0) * 1.0 * 1.5);
    }

    #[test]
    fn physical_branch_positive() {
        let c = dso_constants([3f64.sqrt(), 0.5], 0.7);
        for p in 0..=6 {
            let reps = solve_constraints(&c, p);
            assert!(reps.iter().all(|r| r.constraints_hold));
            assert!(reps.iter().find(|r| r.branch.is_physical()).unwrap().physical);
        }
    }

    #[test]
    fn dso_spectrum_oscillator_limit() {
        let p = DsoParams::new(4, 2, 0.0, 0.0, 1.0, 1.0).unwrap();
        let s = derive_dso_sector(&p, 0, 0).unwrap();
        let e: Vec<f64> = dso_spectrum(&p, &s, 2).iter().map(|x| x.energy.unwrap()).collect();
        assert_eq!(e, vec![2.0, 4.0, 6.0]);
    }

    #[test]
    fn kc_energy_examples() {
        let params = KcParams::new(3, 1.0, 0.0, 0.0, 1.0).unwrap();
        let s = KcSector {
            alphap1: 1.0,
            alphap2: 1.0,
            ..derive_kc_sector(&params, 0).unwrap()
        };
        assert_eq!(kc_energy_branch(&s, 0, Branch::PHYSICAL, &params).unwrap(), -0.25);
        let s = KcSector {
            alphap1: 4.0,
            alphap2: 1.0,
            ..s
        };
        let err = kc_energy_branch(&s, 0, Branch::new(-1, 1).unwrap(), &params).unwrap_err();
        assert!(matches!(err, Error::DegenerateDenominator { denominator, .. } if denominator == -0.5));
    }

    #[test]
    fn kc_spectrum_hydrogen_limit() {
        let params = KcParams::new(3, 1.0, 0.0, 0.0, 1.0).unwrap();
        let s = derive_kc_sector(&params, 0).unwrap();
        let table = kc_spectrum(&params, &s, 1);
        assert_eq!(table.len(), 8);
        let physical: Vec<f64> = table.iter().filter(|e| e.physical).map(|e| e.energy.unwrap()).collect();
        assert_eq!(physical, vec![-1.0, -0.25]);
    }

    #[test]
    fn branch_validation() {
        assert!(Branch::new(2, 1).is_err());
        assert_eq!(Branch::new(-1, 1).unwrap().to_string(), "(-,+)");
    }

    #[test]
    fn line_fit() {
        let f = fit_line(0, &[(0.5, 1.0), (1.0, 2.0), (2.0, 4.0)], 2.0).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && f.intercept.abs() < 1e-14);
        assert!(fit_line(0, &[(1.0, 1.0)], 1.0).is_err());
        assert!(fit_line(0, &[(1.0, 1.0), (1.0, 2.0)], 1.0).is_err());
    }
}
