//! Physical parameters of the two models and the constants of a fixed angular
//! sector.
//!
//! * Double singular oscillator of type `(n, N−n)`:
//!   `H = p²/2 + ω²r²/2 + c₁/(x₁²+…+x_n²) + c₂/(x_{n+1}²+…+x_N²)`.
//! * Kepler–Coulomb system with non-central terms:
//!   `H = p²/2 − c₀/r + c₁/(r(r+x_N)) + c₂/(r(r−x_N))`.
//!
//! Angular Casimirs only enter through their eigenvalues `l(l+D−2)ħ²` on the
//! relevant sphere. Coupling constants may be zero (closure of the positive
//! domain), which recovers the isotropic oscillator and Coulomb spectra.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational_from_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Dso,
    Kc,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Dso => "dso",
            ModelKind::Kc => "kc",
        })
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}

fn check_coupling(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}

pub(crate) fn quantum_number(name: &'static str, value: i64) -> Result<u32> {
    u32::try_from(value).map_err(|_| Error::NegativeQuantumNumber { name, value })
}

/// Parameters of the double singular oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsoParams {
    /// Total dimension `N`.
    pub dim: u32,
    /// Size `n` of the first block.
    pub split: u32,
    pub c1: f64,
    pub c2: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl DsoParams {
    pub fn new(dim: u32, split: u32, c1: f64, c2: f64, omega: f64, hbar: f64) -> Result<Self> {
        let p = DsoParams {
            dim,
            split,
            c1,
            c2,
            omega,
            hbar,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter {
                name: "N",
                value: self.dim as f64,
                reason: "dimension must be at least 2",
            });
        }
        if self.split < 1 || self.split >= self.dim {
            return Err(Error::InvalidParameter {
                name: "n",
                value: self.split as f64,
                reason: "split must satisfy 1 <= n <= N-1",
            });
        }
        check_coupling("c1", self.c1)?;
        check_coupling("c2", self.c2)?;
        check_positive("omega", self.omega)?;
        check_positive("hbar", self.hbar)
    }

    /// `ω′ = ω/ħ`.
    pub fn omega_prime(&self) -> f64 {
        self.omega / self.hbar
    }

    /// `c′ᵢ = cᵢ/ħ²`.
    pub fn c_prime(&self) -> [f64; 2] {
        let h2 = self.hbar * self.hbar;
        [self.c1 / h2, self.c2 / h2]
    }

    /// Block dimensions `n` and `N−n`.
    pub fn block_dims(&self) -> [u32; 2] {
        [self.split, self.dim - self.split]
    }
}

/// Parameters of the Kepler–Coulomb system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcParams {
    /// Total dimension `N`.
    pub dim: u32,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub hbar: f64,
}

impl KcParams {
    pub fn new(dim: u32, c0: f64, c1: f64, c2: f64, hbar: f64) -> Result<Self> {
        let p = KcParams {
            dim,
            c0,
            c1,
            c2,
            hbar,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 3 {
            return Err(Error::InvalidParameter {
                name: "N",
                value: self.dim as f64,
                reason: "dimension must be at least 3",
            });
        }
        check_coupling("c0", self.c0)?;
        check_coupling("c1", self.c1)?;
        check_coupling("c2", self.c2)?;
        check_positive("hbar", self.hbar)
    }

    /// `βᵢ = cᵢ/ħ²` for `i = 0, 1, 2`.
    pub fn betas(&self) -> [f64; 3] {
        let h2 = self.hbar * self.hbar;
        [self.c0 / h2, self.c1 / h2, self.c2 / h2]
    }
}

/// Eigenvalue of the squared angular momentum on the sphere in `d`
/// dimensions, in units of `ħ²`.
pub fn angular_casimir(l: u32, d: u32) -> f64 {
    let l = l as f64;
    l * (l + d as f64 - 2.0)
}

/// Constants of a fixed `(l₁, l₂)` sector of the oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsoSector {
    pub l1: u32,
    pub l2: u32,
    pub delta1: f64,
    pub delta2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl DsoSector {
    pub fn alphas(&self) -> [f64; 2] {
        [self.alpha1, self.alpha2]
    }

    pub fn betas(&self) -> [f64; 2] {
        [self.beta1, self.beta2]
    }
}

pub fn derive_dso_sector(params: &DsoParams, l1: i64, l2: i64) -> Result<DsoSector> {
    params.validate()?;
    let l = [quantum_number("l1", l1)?, quantum_number("l2", l2)?];
    let dims = params.block_dims();
    let cp = params.c_prime();
    let mut delta = [0.0; 2];
    let mut alpha = [0.0; 2];
    let mut beta = [0.0; 2];
    for i in 0..2 {
        let d = dims[i] as f64;
        let li = l[i] as f64;
        let offset = (d - 2.0) / 4.0;
        delta[i] = ((li / 2.0 + offset).powi(2) + cp[i] / 2.0).sqrt() - offset - li / 2.0;
        alpha[i] = 2.0 * delta[i] + li + (d - 2.0) / 2.0;
        beta[i] = (d - 1.0) * (d - 3.0) / 4.0 + 2.0 * cp[i] + angular_casimir(l[i], dims[i]);
    }
    Ok(DsoSector {
        l1: l[0],
        l2: l[1],
        delta1: delta[0],
        delta2: delta[1],
        alpha1: alpha[0],
        alpha2: alpha[1],
        beta1: beta[0],
        beta2: beta[1],
    })
}

/// Constants of a fixed angular sector `l` of the Kepler–Coulomb system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcSector {
    pub l: u32,
    pub delta1: f64,
    pub delta2: f64,
    pub alphap1: f64,
    pub alphap2: f64,
    /// Numerators of the `1/r²` terms of the gauge-rotated radial operators,
    /// `(N−2)(N−4)/4 + 4βᵢ + l(l+N−3)`.
    pub centrifugal1: f64,
    pub centrifugal2: f64,
}

impl KcSector {
    pub fn alphas(&self) -> [f64; 2] {
        [self.alphap1, self.alphap2]
    }

    pub fn centrifugals(&self) -> [f64; 2] {
        [self.centrifugal1, self.centrifugal2]
    }
}

pub fn derive_kc_sector(params: &KcParams, l: i64) -> Result<KcSector> {
    params.validate()?;
    let l = quantum_number("l", l)?;
    let n = params.dim as f64;
    let lf = l as f64;
    let b = params.betas();
    let offset = (n - 3.0) / 2.0;
    let mut delta = [0.0; 2];
    let mut alpha = [0.0; 2];
    let mut centrifugal = [0.0; 2];
    for i in 0..2 {
        delta[i] = ((lf + offset).powi(2) + 4.0 * b[i + 1]).sqrt() - offset - lf;
        alpha[i] = delta[i] + lf + offset;
        centrifugal[i] = (n - 2.0) * (n - 4.0) / 4.0
            + 4.0 * b[i + 1]
            + angular_casimir(l, params.dim - 1);
    }
    Ok(KcSector {
        l,
        delta1: delta[0],
        delta2: delta[1],
        alphap1: alpha[0],
        alphap2: alpha[1],
        centrifugal1: centrifugal[0],
        centrifugal2: centrifugal[1],
    })
}

/// Basis label `|n₁, n₂⟩` together with its level `p = n₁ + n₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumLevel {
    pub n1: u32,
    pub n2: u32,
}

impl QuantumLevel {
    pub fn new(n1: u32, n2: u32) -> Self {
        QuantumLevel { n1, n2 }
    }

    pub fn p(&self) -> u32 {
        self.n1 + self.n2
    }

    /// All `(n₁, n₂)` with `n₁ + n₂ = p`.
    pub fn on_level(p: u32) -> impl Iterator<Item = QuantumLevel> {
        (0..=p).map(move |n1| QuantumLevel::new(n1, p - n1))
    }
}

/// `E = 2ħω(p + 1 + (α₁+α₂)/2)`.
pub fn dso_energy(sector: &DsoSector, p: u32, params: &DsoParams) -> f64 {
    2.0 * params.hbar * params.omega * (p as f64 + 1.0 + (sector.alpha1 + sector.alpha2) / 2.0)
}

/// Kepler–Coulomb level from the separated quantum numbers,
/// `E = −c₀² / (ħ² {n₁ + n₂ + (δ₁+δ₂+2l+N−1)/2}²)`.
pub fn kc_energy_quantum_numbers(sector: &KcSector, n1: u32, n2: u32, params: &KcParams) -> f64 {
    let denom = (n1 + n2) as f64
        + 0.5
            * (sector.delta1 + sector.delta2 + 2.0 * sector.l as f64 + params.dim as f64 - 1.0);
    -params.c0 * params.c0 / (params.hbar * params.hbar * denom * denom)
}

/// Dimension of the unirrep at level `p` within one sector.
pub fn lattice_multiplicity(p: u32) -> u32 {
    p + 1
}

/// Rational constants of an oscillator sector, derived from the exact binary
/// values of the float inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDsoSector {
    /// `ω′`.
    pub scale: BigRational,
    /// `αᵢ² = (lᵢ + (Dᵢ−2)/2)² + 2c′ᵢ`.
    pub alpha_squared: [BigRational; 2],
    /// `{Casimir + 2c′ᵢħ² + (Dᵢ−2)²ħ²/4}/ħ²` with the Casimir replaced by
    /// `lᵢ(lᵢ+Dᵢ−2)ħ²`.
    pub casimir_term: [BigRational; 2],
    pub beta: [BigRational; 2],
}

/// Rational constants of a Kepler–Coulomb sector at a chosen `γ = √(−ω′)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactKcSector {
    /// `γ`.
    pub scale: BigRational,
    /// `α′ᵢ² = (l + (N−3)/2)² + 4βᵢ`.
    pub alpha_squared: [BigRational; 2],
    /// `{Casimir + 4c′ᵢħ² + (N−3)²ħ²/4}/ħ²` with the `so(N−1)` Casimir
    /// replaced by `l(l+N−3)ħ²`.
    pub casimir_term: [BigRational; 2],
    pub centrifugal: [BigRational; 2],
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn half_int(v: i64) -> BigRational {
    BigRational::new(BigInt::from(v), BigInt::from(2))
}

pub fn exact_dso_sector(params: &DsoParams, l1: u32, l2: u32) -> Result<ExactDsoSector> {
    params.validate()?;
    let hbar = rational_from_f64(params.hbar);
    let h2 = &hbar * &hbar;
    let scale = rational_from_f64(params.omega) / &hbar;
    let c = [
        rational_from_f64(params.c1) / &h2,
        rational_from_f64(params.c2) / &h2,
    ];
    let dims = params.block_dims();
    let l = [l1, l2];
    let build = |i: usize| {
        let d = dims[i] as i64;
        let li = int(l[i] as i64);
        let shift = half_int(d - 2);
        let alpha_sq = (&li + &shift) * (&li + &shift) + int(2) * &c[i];
        let casimir = &li * (&li + int(d - 2));
        let term = &casimir + int(2) * &c[i] + &shift * &shift;
        let beta = BigRational::new(BigInt::from((d - 1) * (d - 3)), BigInt::from(4))
            + int(2) * &c[i]
            + casimir;
        (alpha_sq, term, beta)
    };
    let (a0, t0, b0) = build(0);
    let (a1, t1, b1) = build(1);
    Ok(ExactDsoSector {
        scale,
        alpha_squared: [a0, a1],
        casimir_term: [t0, t1],
        beta: [b0, b1],
    })
}

pub fn exact_kc_sector(params: &KcParams, l: u32, gamma: f64) -> Result<ExactKcSector> {
    params.validate()?;
    check_positive("gamma", gamma)?;
    let hbar = rational_from_f64(params.hbar);
    let h2 = &hbar * &hbar;
    let c = [
        rational_from_f64(params.c1) / &h2,
        rational_from_f64(params.c2) / &h2,
    ];
    let n = params.dim as i64;
    let li = int(l as i64);
    let shift = half_int(n - 3);
    let casimir = &li * (&li + int(n - 3));
    let build = |i: usize| {
        let alpha_sq = (&li + &shift) * (&li + &shift) + int(4) * &c[i];
        let term = &casimir + int(4) * &c[i] + &shift * &shift;
        let centrifugal = BigRational::new(BigInt::from((n - 2) * (n - 4)), BigInt::from(4))
            + int(4) * &c[i]
            + &casimir;
        (alpha_sq, term, centrifugal)
    };
    let (a0, t0, k0) = build(0);
    let (a1, t1, k1) = build(1);
    Ok(ExactKcSector {
        scale: rational_from_f64(gamma),
        alpha_squared: [a0, a1],
        casimir_term: [t0, t1],
        centrifugal: [k0, k1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn isotropic_limit_has_zero_alpha() {
        let p = DsoParams::new(4, 2, 0.0, 0.0, 1.0, 1.0).unwrap();
        let s = derive_dso_sector(&p, 0, 0).unwrap();
        assert_eq!(s.delta1, 0.0);
        assert_eq!(s.alpha1, 0.0);
    }

    #[test]
    fn irrational_alpha_sector() {
        // α₁ = √((1 + 0)² + 2) = √3, δ₁ = √(¼+½) − ½
        let p = DsoParams::new(5, 2, 1.0, 1.0, 1.0, 1.0).unwrap();
        let s = derive_dso_sector(&p, 1, 0).unwrap();
        assert!(close(s.delta1, (0.75f64).sqrt() - 0.5, 1e-15));
        assert!(close(s.alpha1, 3f64.sqrt(), 1e-15));
        let via_identity = ((1.0f64 + 0.0).powi(2) + 2.0).sqrt();
        assert!(close(s.alpha1, via_identity, 1e-15));
        assert!(close(s.delta1, 0.3660254037844386, 1e-15));
    }

    #[test]
    fn beta_matches_alpha_identity() {
        let p = DsoParams::new(6, 3, 2.0, 0.5, 1.0, 1.0).unwrap();
        let s = derive_dso_sector(&p, 0, 0).unwrap();
        assert!(close(s.beta1, 4.0, 1e-15));
        assert!(close(s.alpha1, 4.25f64.sqrt(), 1e-15));
        assert!(close(s.alpha1 * s.alpha1 - s.beta1, 0.25, 1e-14));
    }

    #[test]
    fn kc_sector_examples() {
        let p = KcParams::new(3, 1.0, 0.0, 0.0, 1.0).unwrap();
        let s = derive_kc_sector(&p, 0).unwrap();
        assert_eq!((s.delta1, s.alphap1), (0.0, 0.0));

        let p = KcParams::new(4, 1.0, 0.25, 0.25, 1.0).unwrap();
        let s = derive_kc_sector(&p, 0).unwrap();
        assert!(close(s.alphap1, 1.25f64.sqrt(), 1e-15));

        let p = KcParams::new(5, 1.0, 1.0, 2.0, 1.0).unwrap();
        let s = derive_kc_sector(&p, 1).unwrap();
        assert!(close(s.alphap1, 2.0 * 2f64.sqrt(), 1e-15));
        assert!(close(s.alphap2, 2.0 * 3f64.sqrt(), 1e-15));
        assert!(close(s.centrifugal1, s.alphap1 * s.alphap1 - 0.25, 1e-14));
    }

    #[test]
    fn dso_energy_values() {
        let p = DsoParams::new(4, 2, 0.0, 0.0, 1.0, 1.0).unwrap();
        let s = derive_dso_sector(&p, 0, 0).unwrap();
        assert_eq!(dso_energy(&s, 0, &p), 2.0);

        let p = DsoParams::new(4, 2, 0.0, 0.0, 2.0, 1.0).unwrap();
        let s = DsoSector {
            alpha1: 1.0,
            alpha2: 2.0,
            ..derive_dso_sector(&p, 0, 0).unwrap()
        };
        assert_eq!(dso_energy(&s, 3, &p), 22.0);
    }

    #[test]
    fn kc_energy_values() {
        let p = KcParams::new(3, 1.0, 0.0, 0.0, 1.0).unwrap();
        let s = derive_kc_sector(&p, 0).unwrap();
        assert_eq!(kc_energy_quantum_numbers(&s, 0, 0, &p), -1.0);

        let p = KcParams::new(4, 1.0, 0.0, 0.0, 1.0).unwrap();
        let s = KcSector {
            delta1: 0.5,
            delta2: 0.5,
            ..derive_kc_sector(&p, 0).unwrap()
        };
        assert!(close(kc_energy_quantum_numbers(&s, 1, 0, &p), -1.0 / 9.0, 1e-15));
    }

    #[test]
    fn multiplicity_counts_level_states() {
        assert_eq!(lattice_multiplicity(0), 1);
        assert_eq!(lattice_multiplicity(5), 6);
        for p in 0..12 {
            assert_eq!(QuantumLevel::on_level(p).count() as u32, lattice_multiplicity(p));
        }
    }

    #[test]
    fn domain_errors() {
        assert!(DsoParams::new(1, 1, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DsoParams::new(4, 4, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DsoParams::new(4, 0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DsoParams::new(4, 2, -1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DsoParams::new(4, 2, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(DsoParams::new(4, 2, 1.0, 1.0, 1.0, f64::NAN).is_err());
        assert!(KcParams::new(2, 1.0, 1.0, 1.0, 1.0).is_err());
        let p = DsoParams::new(4, 2, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(
            derive_dso_sector(&p, -1, 0),
            Err(Error::NegativeQuantumNumber {
                name: "l1",
                value: -1
            })
        );
        let k = KcParams::new(4, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(derive_kc_sector(&k, -2).is_err());
    }

    #[test]
    fn exact_constants_agree_with_float_route() {
        let p = DsoParams::new(7, 3, 0.7, 1.3, 1.5, 0.9).unwrap();
        let s = derive_dso_sector(&p, 2, 1).unwrap();
        let e = exact_dso_sector(&p, 2, 1).unwrap();
        for i in 0..2 {
            assert_eq!(e.alpha_squared[i], e.casimir_term[i]);
            let a2 = crate::exact::rational_to_f64(&e.alpha_squared[i]);
            assert!(close(a2.sqrt(), s.alphas()[i], 1e-14));
        }
        let k = KcParams::new(6, 1.0, 0.3, 2.2, 1.1).unwrap();
        let ks = derive_kc_sector(&k, 2).unwrap();
        let ke = exact_kc_sector(&k, 2, 0.75).unwrap();
        for i in 0..2 {
            assert_eq!(ke.alpha_squared[i], ke.casimir_term[i]);
            let a2 = crate::exact::rational_to_f64(&ke.alpha_squared[i]);
            assert!(close(a2.sqrt(), ks.alphas()[i], 1e-14));
        }
    }
}
