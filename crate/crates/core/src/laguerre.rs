//! Generalized Laguerre polynomials and the radial factors of the separated
//! eigenfunctions.
//!
//! Both models share the radial form
//! `X_n(r) = exp(−s r²/2) · r^{α+½} · L^α_n(s r²)` with `s = ω′` for the
//! oscillator and `s = γ = √(−ω′)` for the Kepler–Coulomb Stäckel partner.
//! Wavefunctions are kept unnormalized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelKind;

/// `L^α_n(x)` by the ascending three-term recurrence. `n < 0` gives the zero
/// polynomial.
pub(crate) fn laguerre(n: i64, alpha: f64, x: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn check_degree(n: i64, alpha: f64) -> Result<()> {
    if n < 0 {
        return Err(Error::NegativeQuantumNumber { name: "n", value: n });
    }
    if !(alpha > -1.0) {
        return Err(Error::LaguerreAlpha(alpha));
    }
    Ok(())
}

pub fn laguerre_eval(n: i64, alpha: f64, x: f64) -> Result<f64> {
    check_degree(n, alpha)?;
    Ok(laguerre(n, alpha, x))
}

/// `d/dx L^α_n(x) = −L^{α+1}_{n−1}(x)`.
pub fn laguerre_derivative(n: i64, alpha: f64, x: f64) -> Result<f64> {
    check_degree(n, alpha)?;
    Ok(-laguerre(n - 1, alpha + 1.0, x))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialWavefunction {
    pub model: ModelKind,
    pub n: u32,
    pub alpha: f64,
    /// `ω′` for the oscillator, `γ` for Kepler–Coulomb.
    pub scale: f64,
}

impl RadialWavefunction {
    pub fn new(model: ModelKind, n: u32, alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::LaguerreAlpha(alpha));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter {
                name: "scale",
                value: scale,
                reason: "must be finite and positive",
            });
        }
        Ok(RadialWavefunction {
            model,
            n,
            alpha,
            scale,
        })
    }

    /// The same wavefunction one rung up or down (`n` may become −1, the zero
    /// function).
    pub(crate) fn shifted_value(&self, shift: i64, r: f64) -> f64 {
        let n = self.n as i64 + shift;
        if n < 0 {
            return 0.0;
        }
        let x = self.scale * r * r;
        (-x / 2.0).exp() * r.powf(self.alpha + 0.5) * laguerre(n, self.alpha, x)
    }

    /// `(X, X′, X″)` at `r > 0`.
    pub(crate) fn jet(&self, r: f64) -> (f64, f64, f64) {
        let s = self.scale;
        let a = self.alpha;
        let n = self.n as i64;
        let x = s * r * r;
        let prefactor = (-x / 2.0).exp() * r.powf(a + 0.5);
        // log-derivative of the prefactor and its derivative
        let g = -s * r + (a + 0.5) / r;
        let dg = -s - (a + 0.5) / (r * r);
        let l0 = laguerre(n, a, x);
        let l1 = -laguerre(n - 1, a + 1.0, x);
        let l2 = laguerre(n - 2, a + 2.0, x);
        let q = l0;
        let dq = 2.0 * s * r * l1;
        let ddq = 2.0 * s * l1 + 4.0 * s * s * r * r * l2;
        let value = prefactor * q;
        let first = prefactor * (g * q + dq);
        let second = prefactor * ((g * g + dg) * q + 2.0 * g * dq + ddq);
        (value, first, second)
    }

    /// `ln|X(r)|`, finite far into the tail where `X` itself underflows.
    pub(crate) fn ln_abs(&self, r: f64) -> f64 {
        let x = self.scale * r * r;
        -x / 2.0 + (self.alpha + 0.5) * r.ln() + laguerre(self.n as i64, self.alpha, x).abs().ln()
    }

    /// Radius beyond which `|X(r)| ≤ 1e−12 · max|X|`.
    ///
    /// Past `r_t = √((4n+2α+3)/s)` the point lies in the classically forbidden
    /// region of the radial operator for every centrifugal coefficient
    /// `≥ −¼`, so `|X|` decreases monotonically there; the cut is found by
    /// bisection on `ln|X|`.
    pub fn tail_radius(&self) -> f64 {
        self.tail_radius_with(1e-12)
    }

    pub fn tail_radius_with(&self, ratio: f64) -> f64 {
        let s = self.scale;
        let turn = ((4.0 * self.n as f64 + 2.0 * self.alpha + 3.0) / s).sqrt();
        let samples = 4000;
        let ln_max = (1..=samples)
            .map(|k| self.ln_abs(turn * k as f64 / samples as f64))
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let target = ln_max + ratio.ln();
        if self.ln_abs(turn) <= target {
            return turn;
        }
        let mut lo = turn;
        let mut hi = 2.0 * turn;
        while self.ln_abs(hi) > target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.ln_abs(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 * hi {
                break;
            }
        }
        hi
    }
}

pub fn radial_eval(w: &RadialWavefunction, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    Ok(w.shifted_value(0, r))
}

pub fn radial_derivative(w: &RadialWavefunction, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    Ok(w.jet(r).1)
}

/// Analytic second derivative, used to apply the radial Hamiltonians.
pub fn radial_second_derivative(w: &RadialWavefunction, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    Ok(w.jet(r).2)
}
