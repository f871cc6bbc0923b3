use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use superint_core::exact::{rational_from_f64, rational_to_f64};
use superint_core::{
    laguerre_derivative, laguerre_eval, radial_derivative, radial_eval, ModelKind,
    RadialWavefunction,
};

/// Coefficients of `Σ_k (−1)^k C(n+α, n−k) x^k / k!` over the rationals.
fn series_coefficients(n: u32, alpha: f64) -> Vec<BigRational> {
    let a = rational_from_f64(alpha);
    (0..=n)
        .map(|k| {
            // C(n+α, n−k) = Π_{j=k+1..n} (j+α) / (n−k)!
            let mut c = BigRational::one();
            for j in (k + 1)..=n {
                c *= BigRational::from_integer(BigInt::from(j)) + &a;
            }
            for j in 1..=(n - k) {
                c /= BigRational::from_integer(BigInt::from(j));
            }
            for j in 1..=k {
                c /= BigRational::from_integer(BigInt::from(j));
            }
            if k % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect()
}

fn horner(coefficients: &[BigRational], x: f64) -> f64 {
    let x = rational_from_f64(x);
    let mut acc = BigRational::zero();
    for c in coefficients.iter().rev() {
        acc = acc * &x + c;
    }
    rational_to_f64(&acc)
}

fn series(n: u32, alpha: f64, x: f64) -> f64 {
    horner(&series_coefficients(n, alpha), x)
}

#[test]
fn recurrence_matches_series() {
    for &alpha in &[0.3, 1.0, 2.5] {
        for n in 0..=12u32 {
            let xs: Vec<f64> = (0..=80).map(|k| k as f64 * 0.25).collect();
            let coefficients = series_coefficients(n, alpha);
            let exact: Vec<f64> = xs.iter().map(|&x| horner(&coefficients, x)).collect();
            // near a root the relative error is measured against the
            // polynomial's size on [0, 20]
            let peak = exact.iter().fold(0.0f64, |m, y| m.max(y.abs()));
            for (x, e) in xs.iter().zip(&exact) {
                let v = laguerre_eval(n as i64, alpha, *x).unwrap();
                let reference = e.abs().max(1e-6 * peak);
                assert!((v - e).abs() <= 1e-10 * reference, "n={n} alpha={alpha} x={x}: {v} vs {e}");
            }
        }
    }
}

#[test]
fn spec_series_example() {
    let v = laguerre_eval(5, 0.7, 1.3).unwrap();
    let e = series(5, 0.7, 1.3);
    assert!((v - e).abs() <= 1e-13 * e.abs());
}

#[test]
fn derivative_matches_central_difference() {
    let (n, a, x) = (4, 1.5, 0.8);
    let h = 1e-5;
    let fd = (laguerre_eval(n, a, x + h).unwrap() - laguerre_eval(n, a, x - h).unwrap()) / (2.0 * h);
    assert!((laguerre_derivative(n, a, x).unwrap() - fd).abs() <= 1e-8);
}

#[test]
fn kc_radial_recomposes() {
    let w = RadialWavefunction::new(ModelKind::Kc, 2, 1.2, 0.7).unwrap();
    let r: f64 = 1.1;
    let x = 0.7 * r * r;
    let expected = (-x / 2.0).exp() * r.powf(1.7) * series(2, 1.2, x);
    assert!((radial_eval(&w, r).unwrap() - expected).abs() <= 1e-14 * expected.abs());
}

fn five_point<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

#[test]
fn radial_derivative_matches_central_difference() {
    let cases = [
        RadialWavefunction::new(ModelKind::Dso, 3, 1.5, 2.0).unwrap(),
        RadialWavefunction::new(ModelKind::Dso, 0, 0.0, 1.0).unwrap(),
        RadialWavefunction::new(ModelKind::Kc, 5, 2.0 * 2f64.sqrt(), 0.6).unwrap(),
    ];
    for w in &cases {
        for k in 0..=99 {
            let r = 0.1 + k as f64 * 0.1;
            let fd = five_point(|t| radial_eval(w, t).unwrap(), r, 1e-3 * r);
            let d = radial_derivative(w, r).unwrap();
            assert!((d - fd).abs() <= 1e-7, "{w:?} r={r}: {d} vs {fd}");
        }
    }
    let w = &cases[0];
    let r = 0.9;
    let h = 1e-5;
    let fd = (radial_eval(w, r + h).unwrap() - radial_eval(w, r - h).unwrap()) / (2.0 * h);
    assert!((radial_derivative(w, r).unwrap() - fd).abs() <= 1e-7);
}

/// Adaptive Simpson on `[a, b]`.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[test]
fn orthogonality() {
    for &alpha in &[0.3, 1.0, 2.5] {
        let norm = |n: i64| -> f64 {
            let f = |x: f64| x.powf(alpha) * (-x).exp() * laguerre_eval(n, alpha, x).unwrap().powi(2);
            simpson(&f, 0.0, 120.0, 1e-13)
        };
        for m in 0..=6i64 {
            for n in (m + 1)..=6 {
                let f = |x: f64| {
                    x.powf(alpha) * (-x).exp() * laguerre_eval(m, alpha, x).unwrap() * laguerre_eval(n, alpha, x).unwrap()
                };
                let v = simpson(&f, 0.0, 120.0, 1e-13);
                let scale = (norm(m) * norm(n)).sqrt();
                assert!(v.abs() <= 1e-8 * scale, "alpha={alpha} m={m} n={n}: {v} vs {scale}");
            }
        }
    }
}
