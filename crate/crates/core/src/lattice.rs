//! Ladder operators as exact coefficient maps on the `(n₁, n₂)` lattice.
//!
//! Within a fixed angular sector the product states `Z = X_{n₁} X_{n₂} y₁ y₂`
//! form a two-dimensional lattice. The ladder operators `D̃ᵢ±` shift one index
//! by ±1 with a known coefficient, `H̃ = H̃₁ + H̃₂` and `B̃ = H̃₁ − H̃₂` are
//! diagonal, and the integrals `L̃₁ = D̃₁⁺D̃₂⁻`, `L̃₂ = D̃₁⁻D̃₂⁺` preserve
//! `p = n₁ + n₂`. States with a negative index are the zero vector.
//!
//! Operators are generic over [`Scalar`]: with [`Surd`] every identity of the
//! cubic algebra is checked as an exact zero test.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{adjoin_alphas, Scalar, Surd};
use crate::mutation::Mutation;
use crate::params::{
    angular_casimir, DsoParams, DsoSector, ExactDsoSector, ExactKcSector, KcParams, KcSector,
    ModelKind,
};

/// Relative tolerance for identities checked in floating point.
pub const FLOAT_IDENTITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeState {
    pub n1: i64,
    pub n2: i64,
}

impl LatticeState {
    pub fn new(n1: i64, n2: i64) -> Self {
        LatticeState { n1, n2 }
    }

    /// False for the zero vector (any negative index).
    pub fn is_valid(&self) -> bool {
        self.n1 >= 0 && self.n2 >= 0
    }

    pub fn shifted(&self, shift: (i64, i64)) -> Self {
        LatticeState::new(self.n1 + shift.0, self.n2 + shift.1)
    }

    /// All states with `n₁ + n₂ ≤ max_level`.
    pub fn up_to_level(max_level: u32) -> impl Iterator<Item = LatticeState> {
        (0..=max_level as i64).flat_map(|p| (0..=p).map(move |n1| LatticeState::new(n1, p - n1)))
    }
}

impl fmt::Display for LatticeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}>", self.n1, self.n2)
    }
}

pub type WeightedStates<S> = BTreeMap<LatticeState, S>;

type CoefficientFn<S> = Arc<dyn Fn(LatticeState) -> S + Send + Sync>;

#[derive(Clone)]
struct Term<S> {
    shift: (i64, i64),
    coefficient: CoefficientFn<S>,
}

/// Finite formal sum of shifts with state-dependent coefficients.
#[derive(Clone)]
pub struct LatticeOperator<S> {
    terms: Vec<Term<S>>,
}

impl<S> fmt::Debug for LatticeOperator<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shifts: Vec<_> = self.terms.iter().map(|t| t.shift).collect();
        f.debug_struct("LatticeOperator")
            .field("shifts", &shifts)
            .finish()
    }
}

impl<S: Scalar + 'static> LatticeOperator<S> {
    pub fn zero() -> Self {
        LatticeOperator { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::diagonal(move |_| c.clone())
    }

    pub fn diagonal<F>(f: F) -> Self
    where
        F: Fn(LatticeState) -> S + Send + Sync + 'static,
    {
        Self::shift((0, 0), f)
    }

    pub fn shift<F>(shift: (i64, i64), f: F) -> Self
    where
        F: Fn(LatticeState) -> S + Send + Sync + 'static,
    {
        LatticeOperator {
            terms: vec![Term {
                shift,
                coefficient: Arc::new(f),
            }],
        }
    }

    pub fn shifts(&self) -> Vec<(i64, i64)> {
        self.terms.iter().map(|t| t.shift).collect()
    }

    fn push(&mut self, term: Term<S>) {
        if let Some(existing) = self.terms.iter_mut().find(|t| t.shift == term.shift) {
            let a = existing.coefficient.clone();
            let b = term.coefficient;
            existing.coefficient = Arc::new(move |s| a(s) + b(s));
        } else {
            self.terms.push(term);
        }
    }

    pub fn apply(&self, state: LatticeState) -> WeightedStates<S> {
        let mut out = WeightedStates::new();
        if !state.is_valid() {
            return out;
        }
        for term in &self.terms {
            let target = state.shifted(term.shift);
            if !target.is_valid() {
                continue;
            }
            let c = (term.coefficient)(state);
            accumulate(&mut out, target, c);
        }
        out
    }

    pub fn apply_sum(&self, states: &WeightedStates<S>) -> WeightedStates<S> {
        let mut out = WeightedStates::new();
        for (state, weight) in states {
            for (target, c) in self.apply(*state) {
                accumulate(&mut out, target, weight.clone() * c);
            }
        }
        out
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for inner in &other.terms {
            for outer in &self.terms {
                let (ci, co) = (inner.coefficient.clone(), outer.coefficient.clone());
                let mid_shift = inner.shift;
                out.push(Term {
                    shift: (inner.shift.0 + outer.shift.0, inner.shift.1 + outer.shift.1),
                    coefficient: Arc::new(move |s: LatticeState| {
                        let mid = s.shifted(mid_shift);
                        if mid.is_valid() {
                            ci(s) * co(mid)
                        } else {
                            S::zero()
                        }
                    }),
                });
            }
        }
        out
    }

    pub fn scaled(&self, c: S) -> Self {
        let mut out = Self::zero();
        for t in &self.terms {
            let f = t.coefficient.clone();
            let c = c.clone();
            out.push(Term {
                shift: t.shift,
                coefficient: Arc::new(move |s| c.clone() * f(s)),
            });
        }
        out
    }

    fn combined(&self, other: &Self, sign: S) -> Self {
        let mut out = self.clone();
        for t in &other.terms {
            let f = t.coefficient.clone();
            let sign = sign.clone();
            out.push(Term {
                shift: t.shift,
                coefficient: Arc::new(move |s| sign.clone() * f(s)),
            });
        }
        out
    }

    pub fn squared(&self) -> Self {
        self.compose(self)
    }
}

fn accumulate<S: Scalar>(out: &mut WeightedStates<S>, target: LatticeState, c: S) {
    if c.is_zero() {
        return;
    }
    match out.remove(&target) {
        Some(prev) => {
            let sum = prev + c;
            if !sum.is_zero() {
                out.insert(target, sum);
            }
        }
        None => {
            out.insert(target, c);
        }
    }
}

pub fn compose<S: Scalar + 'static>(
    a: &LatticeOperator<S>,
    b: &LatticeOperator<S>,
) -> LatticeOperator<S> {
    a.compose(b)
}

/// `[a, b] = a∘b − b∘a`.
pub fn commutator<S: Scalar + 'static>(
    a: &LatticeOperator<S>,
    b: &LatticeOperator<S>,
) -> LatticeOperator<S> {
    &a.compose(b) - &b.compose(a)
}

impl<S: Scalar + 'static> Add for &LatticeOperator<S> {
    type Output = LatticeOperator<S>;
    fn add(self, rhs: Self) -> LatticeOperator<S> {
        self.combined(rhs, S::one())
    }
}

impl<S: Scalar + 'static> Sub for &LatticeOperator<S> {
    type Output = LatticeOperator<S>;
    fn sub(self, rhs: Self) -> LatticeOperator<S> {
        self.combined(rhs, -S::one())
    }
}

impl<S: Scalar + 'static> Mul for &LatticeOperator<S> {
    type Output = LatticeOperator<S>;
    fn mul(self, rhs: Self) -> LatticeOperator<S> {
        self.compose(rhs)
    }
}

impl<S: Scalar + 'static> Neg for &LatticeOperator<S> {
    type Output = LatticeOperator<S>;
    fn neg(self) -> LatticeOperator<S> {
        self.scaled(-S::one())
    }
}

/// Radial mode: `1` acts on `n₁`, `2` on `n₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::One, Mode::Two];

    pub fn index(&self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 1,
        }
    }

    fn unit_shift(&self, step: i64) -> (i64, i64) {
        match self {
            Mode::One => (step, 0),
            Mode::Two => (0, step),
        }
    }

    fn quantum_number(&self, s: LatticeState) -> i64 {
        match self {
            Mode::One => s.n1,
            Mode::Two => s.n2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Raise,
    Lower,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Raise, Direction::Lower];

    pub fn step(&self) -> i64 {
        match self {
            Direction::Raise => 1,
            Direction::Lower => -1,
        }
    }

    pub fn symbol(&self) -> char {
        match self {
            Direction::Raise => '+',
            Direction::Lower => '-',
        }
    }
}

/// The sector data the lattice algebra needs, in a given scalar backend.
#[derive(Clone, Debug)]
pub struct ModelConstants<S> {
    pub model: ModelKind,
    /// `ω′` (oscillator) or `γ` (Kepler–Coulomb).
    pub scale: S,
    pub alpha: [S; 2],
    /// Casimir-side value of `αᵢ²`, computed from `l`, `cᵢ` and the dimension.
    pub casimir: [S; 2],
}

impl ModelConstants<f64> {
    pub fn dso(params: &DsoParams, sector: &DsoSector) -> Self {
        let dims = params.block_dims();
        let cp = params.c_prime();
        let l = [sector.l1, sector.l2];
        let casimir = [0, 1].map(|i| {
            let shift = (dims[i] as f64 - 2.0) / 2.0;
            angular_casimir(l[i], dims[i]) + 2.0 * cp[i] + shift * shift
        });
        ModelConstants {
            model: ModelKind::Dso,
            scale: params.omega_prime(),
            alpha: sector.alphas(),
            casimir,
        }
    }

    pub fn kc(params: &KcParams, sector: &KcSector, gamma: f64) -> Self {
        let b = params.betas();
        let shift = (params.dim as f64 - 3.0) / 2.0;
        let cas = angular_casimir(sector.l, params.dim - 1);
        ModelConstants {
            model: ModelKind::Kc,
            scale: gamma,
            alpha: sector.alphas(),
            casimir: [cas + 4.0 * b[1] + shift * shift, cas + 4.0 * b[2] + shift * shift],
        }
    }
}

impl ModelConstants<Surd> {
    pub fn dso_exact(sector: &ExactDsoSector) -> Self {
        Self::exact(ModelKind::Dso, &sector.scale, &sector.alpha_squared, &sector.casimir_term)
    }

    pub fn kc_exact(sector: &ExactKcSector) -> Self {
        Self::exact(ModelKind::Kc, &sector.scale, &sector.alpha_squared, &sector.casimir_term)
    }

    fn exact(
        model: ModelKind,
        scale: &BigRational,
        alpha_squared: &[BigRational; 2],
        casimir: &[BigRational; 2],
    ) -> Self {
        let (a1, a2) = adjoin_alphas(&alpha_squared[0], &alpha_squared[1]);
        ModelConstants {
            model,
            scale: Surd::rational(scale.clone()),
            alpha: [a1, a2],
            casimir: [
                Surd::rational(casimir[0].clone()),
                Surd::rational(casimir[1].clone()),
            ],
        }
    }
}

impl<S: Scalar> ModelConstants<S> {
    fn int(v: i64) -> S {
        S::from_i64(v)
    }

    /// Eigenvalue of `H̃ᵢ` on `X_n`: `ω′(2n+α+1)` or `(n+α′/2+½)γ`.
    pub fn mode_energy(&self, mode: Mode, n: i64) -> S {
        let a = self.alpha[mode.index()].clone();
        let core = Self::int(2 * n + 1) + a;
        match self.model {
            ModelKind::Dso => self.scale.clone() * core,
            ModelKind::Kc => self.scale.clone() * core / Self::int(2),
        }
    }

    /// Step of `B̃` under `L̃₁`: `[L̃₁, B̃] = −c·L̃₁` with `c = 4ω′` or `2γ`.
    pub fn b_step(&self) -> S {
        match self.model {
            ModelKind::Dso => Self::int(4) * self.scale.clone(),
            ModelKind::Kc => Self::int(2) * self.scale.clone(),
        }
    }

    /// Coefficient of `D̃ᵢ±` acting on `X_n`.
    pub fn ladder_coefficient(&self, mode: Mode, dir: Direction, n: i64) -> S {
        let a = self.alpha[mode.index()].clone();
        let factor = match dir {
            Direction::Raise => Self::int(n + 1),
            Direction::Lower => Self::int(n) + a,
        };
        let prefactor = match self.model {
            ModelKind::Dso => Self::int(-4) * self.scale.clone(),
            ModelKind::Kc => Self::int(4) * self.scale.clone(),
        };
        prefactor * factor
    }

    fn product_prefactor(&self) -> S {
        let s2 = self.scale.clone() * self.scale.clone();
        Self::int(256) * s2.clone() * s2
    }

    /// Closed form of the `L̃₁L̃₂` eigenvalue on `|n₁,n₂⟩`.
    pub fn product_l1l2(&self, n1: i64, n2: i64) -> S {
        let [a1, a2] = self.alpha.clone();
        self.product_prefactor()
            * Self::int(n1)
            * Self::int(n2 + 1)
            * (Self::int(n1) + a1)
            * (Self::int(n2 + 1) + a2)
    }

    /// Closed form of the `L̃₂L̃₁` eigenvalue on `|n₁,n₂⟩`.
    pub fn product_l2l1(&self, n1: i64, n2: i64) -> S {
        let [a1, a2] = self.alpha.clone();
        self.product_prefactor()
            * Self::int(n2)
            * Self::int(n1 + 1)
            * (Self::int(n2) + a2)
            * (Self::int(n1 + 1) + a1)
    }

    /// Constant shift `q` and prefactor of the factorized quartics
    /// `pref · [(B̃+H̃∓q)² − q²κ₁][(B̃−H̃∓q)² − q²κ₂]`.
    fn quartic_shape(&self) -> (S, S) {
        match self.model {
            ModelKind::Dso => (Self::int(2) * self.scale.clone(), S::one()),
            ModelKind::Kc => (self.scale.clone(), Self::int(16)),
        }
    }

    pub(crate) fn with_mutation(&self, m: &Mutation) -> Self {
        let mut out = self.clone();
        let delta_weight = match self.model {
            ModelKind::Dso => 2.0,
            ModelKind::Kc => 1.0,
        };
        for i in 0..2 {
            let shift = m.alpha_shift(i, delta_weight);
            if shift != 0.0 {
                out.alpha[i] = out.alpha[i].clone() + S::from_f64(shift);
            }
        }
        let ds = m.scale_shift();
        if ds != 0.0 {
            out.scale = out.scale.clone() + S::from_f64(ds);
        }
        out
    }
}

/// One identity checked state by state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
    /// Largest relative residual; `0` when every difference is an exact zero.
    pub max_residual: f64,
    /// State carrying the largest residual, when nonzero.
    pub witness: Option<LatticeState>,
    pub states_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub model: ModelKind,
    pub max_level: u32,
    pub exact: bool,
    pub checks: Vec<IdentityCheck>,
}

impl AlgebraReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

fn sup_norm<S: Scalar>(states: &WeightedStates<S>) -> f64 {
    states.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
}

/// Compares two operators on every state with `n₁ + n₂ ≤ max_level`.
/// `scale` (if given) supplies a magnitude floor for identities whose
/// right-hand side vanishes.
pub fn check_identity<S: Scalar + 'static>(
    name: &str,
    lhs: &LatticeOperator<S>,
    rhs: &LatticeOperator<S>,
    scale: Option<&LatticeOperator<S>>,
    max_level: u32,
) -> IdentityCheck {
    let mut max_residual = 0.0f64;
    let mut witness = None;
    let mut exact_violation = false;
    let mut states_checked = 0;
    for state in LatticeState::up_to_level(max_level) {
        states_checked += 1;
        let l = lhs.apply(state);
        let r = rhs.apply(state);
        let mut magnitude = sup_norm(&l).max(sup_norm(&r));
        if let Some(op) = scale {
            magnitude = magnitude.max(sup_norm(&op.apply(state)));
        }
        let mut keys: Vec<_> = l.keys().chain(r.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        for key in keys {
            let diff = match (l.get(&key), r.get(&key)) {
                (Some(a), Some(b)) => a.clone() - b.clone(),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => -b.clone(),
                (None, None) => continue,
            };
            if diff.is_zero() {
                continue;
            }
            exact_violation = true;
            let abs = diff.to_f64().abs();
            let rel = if magnitude > 0.0 { abs / magnitude } else { abs };
            // a nonzero exact difference must never report as zero
            let rel = if S::is_exact() && rel == 0.0 {
                f64::MIN_POSITIVE
            } else {
                rel
            };
            if rel > max_residual || witness.is_none() {
                max_residual = max_residual.max(rel);
                witness = Some(state);
            }
        }
    }
    let holds = if S::is_exact() {
        !exact_violation
    } else {
        max_residual <= FLOAT_IDENTITY_TOL
    };
    IdentityCheck {
        name: name.to_string(),
        holds,
        max_residual,
        witness: if max_residual > 0.0 { witness } else { None },
        states_checked,
    }
}

/// Ladder operators and integrals of one sector.
///
/// Holds two copies of the constants: `reference` feeds the Casimir side of
/// the factorized relations and the closed product formulas, `ladder` feeds
/// the recurrence coefficients and diagonal eigenvalues. They differ only
/// under an injected [`Mutation`].
#[derive(Clone, Debug)]
pub struct LadderAlgebra<S> {
    reference: ModelConstants<S>,
    ladder: ModelConstants<S>,
    coefficient_factor: [[S; 2]; 2],
}

impl<S: Scalar + 'static> LadderAlgebra<S> {
    pub fn new(constants: ModelConstants<S>) -> Self {
        LadderAlgebra {
            ladder: constants.clone(),
            reference: constants,
            coefficient_factor: [[S::one(), S::one()], [S::one(), S::one()]],
        }
    }

    pub fn with_mutation(constants: ModelConstants<S>, mutation: Option<&Mutation>) -> Self {
        let mut algebra = Self::new(constants);
        if let Some(m) = mutation {
            algebra.ladder = algebra.reference.with_mutation(m);
            for i in 0..2 {
                for (j, raise) in [true, false].into_iter().enumerate() {
                    let f = m.coefficient_factor(i, raise);
                    if f != 1.0 {
                        algebra.coefficient_factor[i][j] = S::from_f64(f);
                    }
                }
            }
        }
        algebra
    }

    pub fn model(&self) -> ModelKind {
        self.reference.model
    }

    pub fn reference(&self) -> &ModelConstants<S> {
        &self.reference
    }

    /// `D̃ᵢ±` as a lattice operator.
    pub fn ladder_operator(&self, mode: Mode, dir: Direction) -> LatticeOperator<S> {
        let constants = self.ladder.clone();
        let factor = self.coefficient_factor[mode.index()][match dir {
            Direction::Raise => 0,
            Direction::Lower => 1,
        }]
        .clone();
        LatticeOperator::shift(mode.unit_shift(dir.step()), move |s| {
            factor.clone() * constants.ladder_coefficient(mode, dir, mode.quantum_number(s))
        })
    }

    pub fn mode_hamiltonian(&self, mode: Mode) -> LatticeOperator<S> {
        let constants = self.ladder.clone();
        LatticeOperator::diagonal(move |s| constants.mode_energy(mode, mode.quantum_number(s)))
    }

    /// `H̃ = H̃₁ + H̃₂`.
    pub fn hamiltonian(&self) -> LatticeOperator<S> {
        &self.mode_hamiltonian(Mode::One) + &self.mode_hamiltonian(Mode::Two)
    }

    /// `B̃ = H̃₁ − H̃₂`.
    pub fn asymmetry(&self) -> LatticeOperator<S> {
        &self.mode_hamiltonian(Mode::One) - &self.mode_hamiltonian(Mode::Two)
    }

    /// `L̃₁ = D̃₁⁺D̃₂⁻`.
    pub fn l1(&self) -> LatticeOperator<S> {
        self.ladder_operator(Mode::One, Direction::Raise)
            .compose(&self.ladder_operator(Mode::Two, Direction::Lower))
    }

    /// `L̃₂ = D̃₁⁻D̃₂⁺`.
    pub fn l2(&self) -> LatticeOperator<S> {
        self.ladder_operator(Mode::One, Direction::Lower)
            .compose(&self.ladder_operator(Mode::Two, Direction::Raise))
    }

    fn factorized(&self, sign: i64) -> LatticeOperator<S> {
        let (q, prefactor) = self.reference.quartic_shape();
        let q = q * S::from_i64(sign);
        let h = self.hamiltonian();
        let b = self.asymmetry();
        let shift = LatticeOperator::constant(q.clone());
        let q2 = q.clone() * q;
        let first = &(&(&b + &h) - &shift).squared()
            - &LatticeOperator::constant(q2.clone() * self.reference.casimir[0].clone());
        let second = &(&(&b - &h) - &shift).squared()
            - &LatticeOperator::constant(q2 * self.reference.casimir[1].clone());
        first.compose(&second).scaled(prefactor)
    }

    /// Size of the individual terms of the factorized quartic, used as the
    /// residual scale where the product itself cancels to zero.
    fn factorized_magnitude(&self) -> LatticeOperator<S> {
        let (q, prefactor) = self.reference.quartic_shape();
        let q = q.to_f64().abs();
        let pref = prefactor.to_f64().abs();
        let kappa = [0, 1].map(|i| self.reference.casimir[i].to_f64().abs());
        let c = self.ladder.clone();
        LatticeOperator::diagonal(move |s| {
            let e1 = c.mode_energy(Mode::One, s.n1).to_f64().abs();
            let e2 = c.mode_energy(Mode::Two, s.n2).to_f64().abs();
            let t = (2.0 * (e1 + e2) + q).powi(2);
            S::from_f64(pref * (t + q * q * kappa[0]) * (t + q * q * kappa[1]))
        })
    }

    /// Right-hand side of the `L̃₁L̃₂` relation with the Casimirs replaced by
    /// their sector eigenvalues.
    pub fn factorized_l1l2(&self) -> LatticeOperator<S> {
        self.factorized(1)
    }

    pub fn factorized_l2l1(&self) -> LatticeOperator<S> {
        self.factorized(-1)
    }

    pub fn product_formula_l1l2(&self) -> LatticeOperator<S> {
        let c = self.reference.clone();
        LatticeOperator::diagonal(move |s| c.product_l1l2(s.n1, s.n2))
    }

    pub fn product_formula_l2l1(&self) -> LatticeOperator<S> {
        let c = self.reference.clone();
        LatticeOperator::diagonal(move |s| c.product_l2l1(s.n1, s.n2))
    }

    /// Checks the cubic algebra on every state with `n₁ + n₂ ≤ max_level`.
    pub fn verify(&self, max_level: u32) -> Result<AlgebraReport> {
        if max_level < 1 {
            return Err(Error::InvalidArgument("max_level must be at least 1".into()));
        }
        let l1 = self.l1();
        let l2 = self.l2();
        let h = self.hamiltonian();
        let b = self.asymmetry();
        let c = self.reference.b_step();
        let checks = vec![
            check_identity("[L1,H] = 0", &commutator(&l1, &h), &LatticeOperator::zero(), Some(&(&l1 * &h)), max_level),
            check_identity("[L2,H] = 0", &commutator(&l2, &h), &LatticeOperator::zero(), Some(&(&l2 * &h)), max_level),
            check_identity("[L1,B] = -c L1", &commutator(&l1, &b), &l1.scaled(-c.clone()), Some(&(&l1 * &b)), max_level),
            check_identity("[L2,B] = c L2", &commutator(&l2, &b), &l2.scaled(c), Some(&(&l2 * &b)), max_level),
            check_identity("L1 L2 = factorized quartic", &(&l1 * &l2), &self.factorized_l1l2(), Some(&self.factorized_magnitude()), max_level),
            check_identity("L2 L1 = factorized quartic", &(&l2 * &l1), &self.factorized_l2l1(), Some(&self.factorized_magnitude()), max_level),
            check_identity("L1 L2 = product formula", &(&l1 * &l2), &self.product_formula_l1l2(), None, max_level),
            check_identity("L2 L1 = product formula", &(&l2 * &l1), &self.product_formula_l2l1(), None, max_level),
        ];
        Ok(AlgebraReport {
            model: self.model(),
            max_level,
            exact: S::is_exact(),
            checks,
        })
    }
}

/// Single ladder action `D̃ᵢ±|n₁,n₂⟩`.
pub fn ladder_action<S: Scalar + 'static>(
    constants: &ModelConstants<S>,
    mode: Mode,
    dir: Direction,
    state: LatticeState,
) -> WeightedStates<S> {
    LadderAlgebra::new(constants.clone())
        .ladder_operator(mode, dir)
        .apply(state)
}

/// Eigenvalue of `H̃` or `B̃` on a basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalKind {
    Hamiltonian,
    Asymmetry,
}

pub fn diagonal_action<S: Scalar>(
    constants: &ModelConstants<S>,
    which: DiagonalKind,
    state: LatticeState,
) -> S {
    let e1 = constants.mode_energy(Mode::One, state.n1);
    let e2 = constants.mode_energy(Mode::Two, state.n2);
    match which {
        DiagonalKind::Hamiltonian => e1 + e2,
        DiagonalKind::Asymmetry => e1 - e2,
    }
}

pub fn verify_cubic_algebra<S: Scalar + 'static>(
    constants: ModelConstants<S>,
    max_level: u32,
) -> Result<AlgebraReport> {
    LadderAlgebra::new(constants).verify(max_level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational_from_f64;
    use crate::mutation::MutationTarget;
    use crate::params::{derive_dso_sector, exact_dso_sector, exact_kc_sector};

    fn float_dso(alpha: [f64; 2], w: f64) -> ModelConstants<f64> {
        ModelConstants {
            model: ModelKind::Dso,
            scale: w,
            alpha,
            casimir: [alpha[0] * alpha[0], alpha[1] * alpha[1]],
        }
    }

    fn float_kc(alpha: [f64; 2], gamma: f64) -> ModelConstants<f64> {
        ModelConstants {
            model: ModelKind::Kc,
            ..float_dso(alpha, gamma)
        }
    }

    fn single(states: WeightedStates<f64>) -> (LatticeState, f64) {
        assert_eq!(states.len(), 1);
        states.into_iter().next().unwrap()
    }

    #[test]
    fn dso_raise_coefficient() {
        let c = float_dso([0.5, 0.5], 1.0);
        let (s, v) = single(ladder_action(&c, Mode::One, Direction::Raise, LatticeState::new(2, 0)));
        assert_eq!(s, LatticeState::new(3, 0));
        assert_eq!(v, -12.0);
    }

    #[test]
    fn lowering_the_bottom_rung_is_empty() {
        let c = float_dso([0.5, 0.5], 1.0);
        assert!(ladder_action(&c, Mode::Two, Direction::Lower, LatticeState::new(0, 0)).is_empty());
    }

    #[test]
    fn kc_lower_coefficient() {
        let a = 2.0 * 2f64.sqrt();
        let c = float_kc([a, 1.0], 1.0);
        let (s, v) = single(ladder_action(&c, Mode::One, Direction::Lower, LatticeState::new(1, 3)));
        assert_eq!(s, LatticeState::new(0, 3));
        assert!((v - 4.0 * (1.0 + a)).abs() < 1e-14);
    }

    #[test]
    fn diagonal_examples() {
        let c = float_dso([0.0, 0.0], 1.0);
        assert_eq!(diagonal_action(&c, DiagonalKind::Hamiltonian, LatticeState::new(0, 0)), 2.0);
        let c = float_dso([2.0, 1.0], 1.0);
        assert_eq!(diagonal_action(&c, DiagonalKind::Asymmetry, LatticeState::new(1, 0)), 3.0);
        let c = float_kc([1.0, 1.0], 2.0);
        assert_eq!(diagonal_action(&c, DiagonalKind::Hamiltonian, LatticeState::new(1, 1)), 8.0);
    }

    #[test]
    fn identity_composition() {
        let alg = LadderAlgebra::new(float_dso([0.7, 1.9], 1.3));
        let l1 = alg.l1();
        let id = LatticeOperator::identity();
        for s in LatticeState::up_to_level(5) {
            assert_eq!((&id * &l1).apply(s), l1.apply(s));
            assert_eq!((&l1 * &id).apply(s), l1.apply(s));
        }
    }

    #[test]
    fn dso_l1_example() {
        // L̃₁ on |0,1⟩ with α₂ = 3, ω′ = 1: (−4·1)(−4·(1+3)) = 64
        let alg = LadderAlgebra::new(float_dso([0.5, 3.0], 1.0));
        let (s, v) = single(alg.l1().apply(LatticeState::new(0, 1)));
        assert_eq!(s, LatticeState::new(1, 0));
        assert_eq!(v, 64.0);
    }

    #[test]
    fn kc_product_example() {
        // L̃₁L̃₂ on |1,0⟩, α′ = (2, 3), γ = 1: 256·1·1·3·4
        let alg = LadderAlgebra::new(float_kc([2.0, 3.0], 1.0));
        let (s, v) = single((&alg.l1() * &alg.l2()).apply(LatticeState::new(1, 0)));
        assert_eq!(s, LatticeState::new(1, 0));
        assert_eq!(v, 3072.0);
    }

    #[test]
    fn self_commutator_vanishes() {
        let alg = LadderAlgebra::new(float_dso([0.7, 1.9], 1.3));
        let l1 = alg.l1();
        let zero = commutator(&l1, &l1);
        for s in LatticeState::up_to_level(6) {
            assert!(zero.apply(s).is_empty());
        }
    }

    #[test]
    fn commutator_with_asymmetry_dso() {
        let alg = LadderAlgebra::new(float_dso([0.7, 1.9], 1.3));
        let check = check_identity(
            "[L1,B]",
            &commutator(&alg.l1(), &alg.asymmetry()),
            &alg.l1().scaled(-4.0 * 1.3),
            None,
            8,
        );
        assert!(check.holds, "{check:?}");
    }

    #[test]
    fn commutator_with_asymmetry_kc() {
        let gamma = 0.8;
        let alg = LadderAlgebra::new(float_kc([1.1, 2.4], gamma));
        let check = check_identity(
            "[L2,B]",
            &commutator(&alg.l2(), &alg.asymmetry()),
            &alg.l2().scaled(2.0 * gamma),
            None,
            8,
        );
        assert!(check.holds, "{check:?}");
    }

    #[test]
    fn composition_is_associative() {
        let alg = LadderAlgebra::new(float_kc([1.1, 2.4], 0.8));
        let a = alg.ladder_operator(Mode::One, Direction::Lower);
        let b = alg.ladder_operator(Mode::Two, Direction::Raise);
        let c = alg.ladder_operator(Mode::One, Direction::Lower);
        let left = (&a * &b).compose(&c);
        let right = a.compose(&(&b * &c));
        for s in LatticeState::up_to_level(6) {
            let (l, r) = (left.apply(s), right.apply(s));
            assert_eq!(l.keys().collect::<Vec<_>>(), r.keys().collect::<Vec<_>>());
            for (k, v) in &l {
                assert!((v - r[k]).abs() <= 1e-12 * v.abs());
            }
        }
    }

    #[test]
    fn exact_dso_algebra_holds() {
        let p = DsoParams::new(5, 2, 1.0, 2.0, 1.0, 1.0).unwrap();
        let e = exact_dso_sector(&p, 1, 0).unwrap();
        let report = verify_cubic_algebra(ModelConstants::dso_exact(&e), 6).unwrap();
        assert!(report.exact);
        for c in &report.checks {
            assert!(c.holds, "{c:?}");
            assert_eq!(c.max_residual, 0.0);
        }
    }

    #[test]
    fn exact_kc_algebra_holds() {
        let p = KcParams::new(5, 1.0, 1.0, 2.0, 1.0).unwrap();
        let e = exact_kc_sector(&p, 1, 0.75).unwrap();
        let report = verify_cubic_algebra(ModelConstants::kc_exact(&e), 6).unwrap();
        assert!(report.all_hold(), "{report:?}");
    }

    #[test]
    fn float_algebra_holds() {
        let p = DsoParams::new(5, 2, 1.0, 2.0, 1.0, 1.0).unwrap();
        let s = derive_dso_sector(&p, 1, 0).unwrap();
        let report = verify_cubic_algebra(ModelConstants::dso(&p, &s), 6).unwrap();
        assert!(!report.exact);
        assert!(report.all_hold(), "{report:?}");
    }

    #[test]
    fn mutated_alpha_is_detected() {
        let p = DsoParams::new(5, 2, 1.0, 2.0, 1.0, 1.0).unwrap();
        let e = exact_dso_sector(&p, 1, 0).unwrap();
        let m = Mutation::new(MutationTarget::Alpha1, 1e-3);
        let alg = LadderAlgebra::with_mutation(ModelConstants::dso_exact(&e), Some(&m));
        let report = alg.verify(6).unwrap();
        assert!(!report.all_hold());
        let failed: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"L1 L2 = factorized quartic"), "{failed:?}");
        assert!(report.failures().all(|c| c.witness.is_some() && c.max_residual > 0.0));
    }

    #[test]
    fn max_level_zero_rejected() {
        let alg = LadderAlgebra::new(float_dso([1.0, 1.0], 1.0));
        assert!(alg.verify(0).is_err());
    }

    #[test]
    fn exact_mode_scale_is_rational() {
        let p = DsoParams::new(5, 2, 1.0, 2.0, 0.3, 1.0).unwrap();
        let e = exact_dso_sector(&p, 1, 0).unwrap();
        assert_eq!(e.scale, rational_from_f64(0.3));
    }
}
