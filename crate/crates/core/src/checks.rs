//! Verification suites shared by the command-line tool and the test targets.
//!
//! Every check produces a [`CheckResult`] with the largest residual seen and
//! the offending state or parameters when it fails. An optional
//! [`Mutation`] perturbs the ladder side of each comparison.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use num_traits::Zero;

use crate::exact::{Scalar, Surd};
use crate::grid::{hamiltonian_residual, recurrence_residual, ModeSpec, RadialGrid};
use crate::lattice::{
    AlgebraReport, Direction, LadderAlgebra, LatticeState, ModelConstants,
};
use crate::mutation::Mutation;
use crate::oracle::{
    combine_levels, convergence_orders, solve_lowest_detailed, RadialProblem,
    DEFAULT_ORACLE_POINTS,
};
use crate::oscillator::{
    build_structure_function, ccm_energy, ccm_slope_check, dso_spectrum, kc_energy_branch,
    phi_closed_form, solve_constraints, Branch, SpectrumEntry,
};
use crate::params::{
    derive_dso_sector, derive_kc_sector, dso_energy, exact_dso_sector, exact_kc_sector,
    kc_energy_quantum_numbers, DsoParams, DsoSector, KcParams, KcSector, ModelKind, QuantumLevel,
};

pub const RECURRENCE_TOL: f64 = 1e-8;
pub const HAMILTONIAN_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-6;
pub const SLOPE_TOL: f64 = 1e-6;
pub const EN_IDENTITY_TOL: f64 = 1e-12;
/// Accepted band around the expected convergence order 2.
pub const ORDER_BAND: (f64, f64) = (1.8, 2.2);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub max_residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn from_parts(name: impl Into<String>, ok: bool, max_residual: f64, tolerance: f64, witness: Option<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            max_residual,
            tolerance,
            witness: if ok { None } else { witness },
        }
    }

    fn error(name: impl Into<String>, err: &Error) -> Self {
        CheckResult {
            name: name.into(),
            status: Status::Fail,
            max_residual: f64::INFINITY,
            tolerance: 0.0,
            witness: Some(err.to_string()),
        }
    }
}

/// Tracks the largest residual and where it occurred.
#[derive(Default)]
struct Worst {
    value: f64,
    witness: Option<String>,
}

impl Worst {
    fn record(&mut self, value: f64, witness: impl FnOnce() -> String) {
        let value = if value.is_nan() { f64::INFINITY } else { value };
        if self.witness.is_none() || value > self.value {
            self.value = value.max(self.value);
            self.witness = Some(witness());
        }
    }

    fn finish(self, name: impl Into<String>, tolerance: f64) -> CheckResult {
        let ok = self.value <= tolerance;
        CheckResult::from_parts(name, ok, self.value, tolerance, self.witness)
    }
}

/// A model together with its angular sector (and `γ` for Kepler–Coulomb).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelConfig {
    Dso { params: DsoParams, l1: u32, l2: u32 },
    Kc { params: KcParams, l: u32, gamma: f64 },
}

/// Derived constants of the configured sector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SectorInfo {
    Dso(DsoSector),
    Kc { #[serde(flatten)] sector: KcSector, gamma: f64 },
}

impl ModelConfig {
    /// Oscillator defaults: `N = 5`, `n = 2`, `c = (1, 2)`, `ω = ħ = 1`,
    /// `(l₁, l₂) = (1, 0)`, which gives `α₁ = √3`.
    pub fn default_dso() -> Self {
        ModelConfig::Dso {
            params: DsoParams {
                dim: 5,
                split: 2,
                c1: 1.0,
                c2: 2.0,
                omega: 1.0,
                hbar: 1.0,
            },
            l1: 1,
            l2: 0,
        }
    }

    /// Kepler–Coulomb defaults: `N = 5`, `c = (1, 1, 2)`, `ħ = 1`, `l = 1`,
    /// `γ = 1`, which gives `α′ = (2√2, 2√3)`.
    pub fn default_kc() -> Self {
        ModelConfig::Kc {
            params: KcParams {
                dim: 5,
                c0: 1.0,
                c1: 1.0,
                c2: 2.0,
                hbar: 1.0,
            },
            l: 1,
            gamma: 1.0,
        }
    }

    pub fn model(&self) -> ModelKind {
        match self {
            ModelConfig::Dso { .. } => ModelKind::Dso,
            ModelConfig::Kc { .. } => ModelKind::Kc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sector().map(|_| ())
    }

    pub fn sector(&self) -> Result<SectorInfo> {
        match *self {
            ModelConfig::Dso { params, l1, l2 } => {
                Ok(SectorInfo::Dso(derive_dso_sector(&params, l1 as i64, l2 as i64)?))
            }
            ModelConfig::Kc { params, l, gamma } => {
                if !(gamma.is_finite() && gamma > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "gamma",
                        value: gamma,
                        reason: "must be finite and positive",
                    });
                }
                Ok(SectorInfo::Kc {
                    sector: derive_kc_sector(&params, l as i64)?,
                    gamma,
                })
            }
        }
    }

    pub fn float_constants(&self) -> Result<ModelConstants<f64>> {
        match (self, self.sector()?) {
            (ModelConfig::Dso { params, .. }, SectorInfo::Dso(s)) => Ok(ModelConstants::dso(params, &s)),
            (ModelConfig::Kc { params, .. }, SectorInfo::Kc { sector, gamma }) => {
                Ok(ModelConstants::kc(params, &sector, gamma))
            }
            _ => unreachable!("sector matches model"),
        }
    }

    pub fn exact_constants(&self) -> Result<ModelConstants<Surd>> {
        match *self {
            ModelConfig::Dso { params, l1, l2 } => {
                Ok(ModelConstants::dso_exact(&exact_dso_sector(&params, l1, l2)?))
            }
            ModelConfig::Kc { params, l, gamma } => {
                self.validate()?;
                Ok(ModelConstants::kc_exact(&exact_kc_sector(&params, l, gamma)?))
            }
        }
    }

    /// The two radial modes, with their natural centrifugal terms.
    pub fn modes(&self) -> Result<[ModeSpec; 2]> {
        Ok(match (self, self.sector()?) {
            (ModelConfig::Dso { params, .. }, SectorInfo::Dso(s)) => {
                let w = params.omega_prime();
                let beta = s.betas();
                [0, 1].map(|i| ModeSpec {
                    model: ModelKind::Dso,
                    scale: w,
                    alpha: s.alphas()[i],
                    centrifugal: beta[i],
                })
            }
            (ModelConfig::Kc { .. }, SectorInfo::Kc { sector, gamma }) => {
                let c = sector.centrifugals();
                [0, 1].map(|i| ModeSpec {
                    model: ModelKind::Kc,
                    scale: gamma,
                    alpha: sector.alphas()[i],
                    centrifugal: c[i],
                })
            }
            _ => unreachable!("sector matches model"),
        })
    }

    /// Spectrum table for `p = 0..=p_max`.
    pub fn spectrum(&self, p_max: u32) -> Result<Vec<SpectrumEntry>> {
        Ok(match (self, self.sector()?) {
            (ModelConfig::Dso { params, .. }, SectorInfo::Dso(s)) => dso_spectrum(params, &s, p_max),
            (ModelConfig::Kc { params, .. }, SectorInfo::Kc { sector, .. }) => {
                crate::oscillator::kc_spectrum(params, &sector, p_max)
            }
            _ => unreachable!("sector matches model"),
        })
    }
}

/// Settings of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub max_level: u32,
    pub p_max: u32,
    /// Highest radial quantum number in the recurrence sweep.
    pub n_max: u32,
    pub grid_points: usize,
    /// Overrides the tail-radius upper end of the recurrence grid.
    pub r_max: Option<f64>,
    pub oracle_points: usize,
    /// Number of levels compared against the oracle.
    pub oracle_levels: usize,
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_level: 6,
            p_max: 10,
            n_max: 8,
            grid_points: 4001,
            r_max: None,
            oracle_points: DEFAULT_ORACLE_POINTS,
            oracle_levels: 6,
            mutation: None,
        }
    }
}

impl SuiteConfig {
    /// Doubles every grid.
    pub fn refined(&self) -> Self {
        SuiteConfig {
            grid_points: 2 * self.grid_points - 1,
            oracle_points: 2 * self.oracle_points,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_level < 1 {
            return Err(Error::InvalidArgument("max-level must be at least 1".into()));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidGrid(format!("grid-points must be at least 2, got {}", self.grid_points)));
        }
        if let Some(r) = self.r_max {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidGrid(format!("rmax must be positive, got {r}")));
            }
        }
        if self.oracle_levels == 0 {
            return Err(Error::InvalidArgument("oracle needs at least one level".into()));
        }
        Ok(())
    }
}

fn prefixed(model: ModelKind, name: &str) -> String {
    format!("{model}: {name}")
}

fn algebra_results(report: &AlgebraReport, model: ModelKind) -> Vec<CheckResult> {
    report
        .checks
        .iter()
        .map(|c| {
            CheckResult::from_parts(
                prefixed(model, &format!("cubic algebra {}", c.name)),
                c.holds,
                c.max_residual,
                if report.exact { 0.0 } else { crate::lattice::FLOAT_IDENTITY_TOL },
                c.witness.map(|w| format!("state {w}")),
            )
        })
        .collect()
}

/// Cubic algebra on all states with `n₁ + n₂ ≤ max_level`, in exact arithmetic.
pub fn algebra_checks(cfg: &ModelConfig, max_level: u32, mutation: Option<&Mutation>) -> Result<Vec<CheckResult>> {
    let algebra = LadderAlgebra::with_mutation(cfg.exact_constants()?, mutation);
    Ok(algebra_results(&algebra.verify(max_level)?, cfg.model()))
}

/// The same identities in floating point.
pub fn algebra_checks_float(cfg: &ModelConfig, max_level: u32, mutation: Option<&Mutation>) -> Result<Vec<CheckResult>> {
    let algebra = LadderAlgebra::with_mutation(cfg.float_constants()?, mutation);
    Ok(algebra_results(&algebra.verify(max_level)?, cfg.model()))
}

fn mode_label(i: usize, dir: Option<Direction>) -> String {
    match dir {
        Some(d) => format!("D{}{}", i + 1, d.symbol()),
        None => format!("H{}", i + 1),
    }
}

/// The recurrence sweep `D̃ᵢ± X_n = c X_{n±1}` for `n ≤ n_max` and the
/// eigenvalue equation `H̃ᵢ X_n = λ X_n`, sampled on the default grids.
pub fn recurrence_checks(cfg: &ModelConfig, suite: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let modes = cfg.modes()?;
    let model = cfg.model();
    let delta_weight = if model == ModelKind::Dso { 2.0 } else { 1.0 };
    let mut out = Vec::new();
    for (i, reference) in modes.iter().enumerate() {
        // a mutated α moves the sampled functions and expected coefficients,
        // a mutated β moves the operator; either breaks the recurrence
        let mut ladder = *reference;
        if let Some(m) = &suite.mutation {
            ladder.alpha += m.alpha_shift(i, delta_weight);
            ladder.centrifugal += m.centrifugal_shift(i);
        }
        let grid_for = |n: u32| -> Result<RadialGrid> {
            let g = ladder.default_grid(n, suite.grid_points)?;
            match suite.r_max {
                Some(r) => RadialGrid::new(g.r_min, r, suite.grid_points),
                None => Ok(g),
            }
        };
        for dir in Direction::BOTH {
            let name = prefixed(model, &format!("recurrence {}", mode_label(i, Some(dir))));
            let factor = suite
                .mutation
                .map_or(1.0, |m| m.coefficient_factor(i, dir == Direction::Raise));
            let mut worst = Worst::default();
            for n in 0..=suite.n_max {
                let residual = grid_for(n).and_then(|g| recurrence_residual(&ladder, dir, n, &g, factor));
                match residual {
                    Ok(r) => worst.record(r, || format!("n = {n}")),
                    Err(e) => return Ok(vec![CheckResult::error(name, &e)]),
                }
            }
            out.push(worst.finish(name, RECURRENCE_TOL));
        }
        let name = prefixed(model, &format!("eigenvalue equation {}", mode_label(i, None)));
        let mut worst = Worst::default();
        for n in 0..=suite.n_max {
            let residual = grid_for(n).and_then(|g| hamiltonian_residual(&ladder, n, &g));
            match residual {
                Ok(r) => worst.record(r, || format!("n = {n}")),
                Err(e) => return Ok(vec![CheckResult::error(name, &e)]),
            }
        }
        out.push(worst.finish(name, HAMILTONIAN_TOL));
    }
    Ok(out)
}

/// `Φ(0) = Φ(p+1) = 0` on every branch and positivity of `(+,+)` for
/// `p ≤ p_max`.
pub fn constraint_checks(cfg: &ModelConfig, p_max: u32) -> Result<Vec<CheckResult>> {
    let constants = cfg.float_constants()?;
    let model = cfg.model();
    let mut zeros = Worst::default();
    let mut positivity_failure = None;
    for p in 0..=p_max {
        for rep in solve_constraints(&constants, p) {
            zeros.record(rep.constraint_residual, || format!("p = {p}, branch {}", rep.branch));
            if rep.branch.is_physical() && !rep.positive && positivity_failure.is_none() {
                let x = (1..=p as usize).find(|&x| rep.phi[x] <= 0.0).unwrap_or(0);
                positivity_failure = Some(format!("p = {p}, x = {x}, phi = {}", rep.phi[x]));
            }
        }
    }
    Ok(vec![
        zeros.finish(prefixed(model, "structure function zeros at 0 and p+1"), crate::oscillator::CONSTRAINT_TOL),
        CheckResult::from_parts(
            prefixed(model, "structure function positive on branch (+,+)"),
            positivity_failure.is_none(),
            if positivity_failure.is_none() { 0.0 } else { 1.0 },
            0.0,
            positivity_failure,
        ),
    ])
}

fn exact_mismatch(a: &Surd, b: &Surd) -> Option<f64> {
    let d = a.clone() - b.clone();
    if d.is_zero() {
        None
    } else {
        let scale = a.to_f64().abs().max(b.to_f64().abs()).max(f64::MIN_POSITIVE);
        Some((d.to_f64().abs() / scale).max(f64::MIN_POSITIVE))
    }
}

/// `Φ(n₁)` against the lattice eigenvalue of `L̃₁L̃₂` on `|n₁, p−n₁⟩`, both
/// through the closed form and through the four-bracket structure function
/// evaluated at the eigenvalues of `ℵ` and `H̃`. Exact arithmetic.
pub fn phi_lattice_checks(cfg: &ModelConfig, p_max: u32, mutation: Option<&Mutation>) -> Result<Vec<CheckResult>> {
    let reference = cfg.exact_constants()?;
    let algebra = LadderAlgebra::with_mutation(reference.clone(), mutation);
    let product = algebra.l1().compose(&algebra.l2());
    let h = algebra.hamiltonian();
    let b = algebra.asymmetry();
    let step = reference.b_step();
    let model = cfg.model();
    let mut closed = Worst::default();
    let mut brackets = Worst::default();
    for p in 0..=p_max {
        for q in QuantumLevel::on_level(p) {
            let state = LatticeState::new(q.n1 as i64, q.n2 as i64);
            let lattice = product.apply(state).remove(&state).unwrap_or_else(Surd::zero);
            let x = Surd::from_i64(q.n1 as i64);
            let phi = phi_closed_form(&reference, p, Branch::PHYSICAL, &x);
            if let Some(r) = exact_mismatch(&phi, &lattice) {
                closed.record(r, || format!("state {state}"));
            } else {
                closed.record(0.0, || format!("state {state}"));
            }
            let eig = |op: &crate::lattice::LatticeOperator<Surd>| {
                op.apply(state).remove(&state).unwrap_or_else(Surd::zero)
            };
            let aleph = eig(&b) / step.clone();
            let sf = build_structure_function(&reference, Surd::zero(), eig(&h));
            let via_brackets = sf.eval(&aleph);
            let r = exact_mismatch(&via_brackets, &lattice).unwrap_or(0.0);
            brackets.record(r, || format!("state {state}"));
        }
    }
    Ok(vec![
        closed.finish(prefixed(model, "closed-form phi equals lattice L1 L2"), 0.0),
        brackets.finish(prefixed(model, "structure function at aleph equals lattice L1 L2"), 0.0),
    ])
}

/// `Φ` from the closed form against the expanded four-bracket product, as
/// polynomials in `x`, on every branch.
pub fn phi_polynomial_checks(cfg: &ModelConfig, p_max: u32) -> Result<CheckResult> {
    let c = cfg.exact_constants()?;
    let mut worst = Worst::default();
    for p in 0..=p_max {
        for branch in Branch::ALL {
            let (u, e) = crate::oscillator::constraint_solution(&c, p, branch);
            let sf = build_structure_function(&c, u, e);
            // five points determine a quartic
            for x in 0..5 {
                let x = Surd::from_i64(x);
                let r = exact_mismatch(&sf.eval(&x), &phi_closed_form(&c, p, branch, &x)).unwrap_or(0.0);
                worst.record(r, || format!("p = {p}, branch {branch}"));
            }
        }
    }
    Ok(worst.finish(prefixed(cfg.model(), "closed-form phi equals solved structure function"), 0.0))
}

/// Algebraic spectrum against the closed form and the radial oracle.
pub fn spectrum_checks(cfg: &ModelConfig, suite: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let model = cfg.model();
    let modes = oracle_modes(cfg, suite.mutation.as_ref())?;
    let mut out = Vec::new();
    match (cfg, cfg.sector()?) {
        (ModelConfig::Dso { params, .. }, SectorInfo::Dso(sector)) => {
            out.push(dso_closed_form_check(cfg, params, suite.p_max)?);
            out.push(oracle_level_check(
                model,
                &modes,
                suite,
                params.hbar * params.hbar,
                |p| mutated_dso_energy(params, &sector, p, suite.mutation.as_ref()),
            ));
        }
        (ModelConfig::Kc { params, .. }, SectorInfo::Kc { sector, gamma }) => {
            let mut worst = Worst::default();
            for p in 0..=20u32 {
                let four = kc_energy_branch(&sector, p, Branch::PHYSICAL, params);
                for q in QuantumLevel::on_level(p) {
                    let two = kc_energy_quantum_numbers(&sector, q.n1, q.n2, params);
                    let r = match &four {
                        Ok(e) => ((e - two) / two).abs(),
                        Err(_) => f64::INFINITY,
                    };
                    worst.record(r, || format!("p = {p}, (n1, n2) = ({}, {})", q.n1, q.n2));
                }
            }
            out.push(worst.finish(prefixed(model, "branch (+,+) energy equals separated spectrum"), EN_IDENTITY_TOL));
            let alpha = [0, 1].map(|i| modes[i].alpha_closed);
            out.push(oracle_level_check(model, &modes, suite, 1.0, |p| {
                gamma * (2.0 + 2.0 * p as f64 + alpha[0] + alpha[1]) / 2.0
            }));
            out.extend(ccm_checks(params, &sector, suite)?);
        }
        _ => unreachable!("sector matches model"),
    }
    out.push(convergence_check(model, &modes, suite));
    Ok(out)
}

/// `ħ²Ẽ′` on branch `(+,+)` against `2ħω(p+1+(α₁+α₂)/2)`, exactly.
fn dso_closed_form_check(cfg: &ModelConfig, params: &DsoParams, p_max: u32) -> Result<CheckResult> {
    let c = cfg.exact_constants()?;
    let hbar = Surd::from_f64(params.hbar);
    let omega = Surd::from_f64(params.omega);
    let half_sum = (c.alpha[0].clone() + c.alpha[1].clone()) / Surd::from_i64(2);
    let mut worst = Worst::default();
    for p in 0..=p_max {
        let (_, e) = crate::oscillator::constraint_solution(&c, p, Branch::PHYSICAL);
        let algebraic = hbar.clone() * hbar.clone() * e;
        let closed = Surd::from_i64(2) * hbar.clone() * omega.clone() * (Surd::from_i64(p as i64 + 1) + half_sum.clone());
        let r = exact_mismatch(&algebraic, &closed).unwrap_or(0.0);
        worst.record(r, || format!("p = {p}"));
    }
    Ok(worst.finish(prefixed(ModelKind::Dso, "algebraic spectrum equals closed form"), 0.0))
}

fn mutated_dso_energy(params: &DsoParams, sector: &DsoSector, p: u32, mutation: Option<&Mutation>) -> f64 {
    let mut s = *sector;
    if let Some(m) = mutation {
        s.alpha1 += m.alpha_shift(0, 2.0);
        s.alpha2 += m.alpha_shift(1, 2.0);
    }
    let omega = params.omega + mutation.map_or(0.0, |m| m.scale_shift()) * params.hbar;
    dso_energy(&s, p, &DsoParams { omega, ..*params })
}

/// One oracle mode: the radial problem data and the closed-form data it is
/// compared with (the latter possibly mutated).
struct OracleMode {
    model: ModelKind,
    scale: f64,
    centrifugal: f64,
    alpha_closed: f64,
    scale_closed: f64,
}

impl OracleMode {
    fn exact(&self, k: usize) -> f64 {
        ModeSpec {
            model: self.model,
            scale: self.scale_closed,
            alpha: self.alpha_closed,
            centrifugal: 0.0,
        }
        .eigenvalue(k as u32)
    }
}

fn oracle_modes(cfg: &ModelConfig, mutation: Option<&Mutation>) -> Result<Vec<OracleMode>> {
    let modes = cfg.modes()?;
    let delta_weight = if cfg.model() == ModelKind::Dso { 2.0 } else { 1.0 };
    let mut out = Vec::with_capacity(2);
    for (i, m) in modes.iter().enumerate() {
        out.push(OracleMode {
            model: m.model,
            scale: m.scale,
            centrifugal: m.centrifugal + mutation.map_or(0.0, |x| x.centrifugal_shift(i)),
            alpha_closed: m.alpha + mutation.map_or(0.0, |x| x.alpha_shift(i, delta_weight)),
            scale_closed: m.scale + mutation.map_or(0.0, |x| x.scale_shift()),
        });
    }
    Ok(out)
}

fn sized_problem(mode: &OracleMode, levels: usize, points: usize) -> Result<RadialProblem> {
    RadialProblem::for_mode(mode.model, mode.scale, mode.centrifugal, levels, points)
}

fn oracle_level_check(
    model: ModelKind,
    modes: &[OracleMode],
    suite: &SuiteConfig,
    energy_unit: f64,
    closed: impl Fn(u32) -> f64,
) -> CheckResult {
    let name = prefixed(model, &format!("lowest {} levels match radial oracle", suite.oracle_levels));
    let levels = suite.oracle_levels;
    let mut single = Vec::with_capacity(2);
    for mode in modes {
        match sized_problem(mode, levels, suite.oracle_points).and_then(|p| solve_lowest_detailed(&p, levels)) {
            Ok(sol) => single.push(sol.eigenvalues),
            Err(e) => return CheckResult::error(name, &e),
        }
    }
    let combined = combine_levels(&single[0], &single[1], levels);
    let mut worst = Worst::default();
    for (p, level) in combined.iter().enumerate() {
        let expected = closed(p as u32);
        let got = energy_unit * level.energy;
        worst.record(((got - expected) / expected).abs(), || {
            format!("p = {p}: oracle {got}, algebraic {expected}")
        });
        if level.multiplicity != p as u32 + 1 {
            worst.record(f64::INFINITY, || {
                format!("p = {p}: oracle multiplicity {} instead of {}", level.multiplicity, p + 1)
            });
        }
    }
    if combined.len() < levels {
        worst.record(f64::INFINITY, || format!("oracle produced only {} levels", combined.len()));
    }
    worst.finish(name, ORACLE_TOL)
}

/// Second-order convergence of the raw eigenvalues over `M`, `2M`, `4M` and
/// extrapolated error, for every mode.
fn convergence_check(model: ModelKind, modes: &[OracleMode], suite: &SuiteConfig) -> CheckResult {
    let name = prefixed(model, "oracle second-order convergence");
    let levels = suite.oracle_levels.min(3);
    let mut worst = Worst::default();
    let mut order_failure: Option<String> = None;
    for (i, mode) in modes.iter().enumerate() {
        let sol = match sized_problem(mode, levels, suite.oracle_points).and_then(|p| solve_lowest_detailed(&p, levels)) {
            Ok(s) => s,
            Err(e) => return CheckResult::error(name, &e),
        };
        let exact: Vec<f64> = (0..levels).map(|k| mode.exact(k)).collect();
        for (k, orders) in convergence_orders(&sol.raw, &exact).into_iter().enumerate() {
            if let (Some((a, b)), None) = (orders, &order_failure) {
                for order in [a, b] {
                    if !(order >= ORDER_BAND.0 && order <= ORDER_BAND.1) {
                        order_failure = Some(format!("mode {}, level {k}: observed order {order:.3}", i + 1));
                    }
                }
            }
            let rel = ((sol.eigenvalues[k] - exact[k]) / exact[k]).abs();
            worst.record(rel, || format!("mode {}, level {k}: extrapolated {}", i + 1, sol.eigenvalues[k]));
        }
    }
    let mut result = worst.finish(name, ORACLE_TOL);
    if let Some(w) = order_failure {
        result.status = Status::Fail;
        result.witness = Some(w);
    }
    result
}

/// γ values used by the slope check.
pub const CCM_GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];

/// Linearity of `ε̃(γ)` for `p = 0..=3` with the expected slope and unit
/// increments, and the energy recovered from each slope.
pub fn ccm_checks(params: &KcParams, sector: &KcSector, suite: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let mut fit = Worst::default();
    let mut slope = Worst::default();
    let mut energy = Worst::default();
    let mut previous: Option<f64> = None;
    let points = suite.oracle_points;
    let closed_shift = suite
        .mutation
        .map_or(0.0, |m| (m.alpha_shift(0, 1.0) + m.alpha_shift(1, 1.0)) / 2.0);
    for p in 0..=3u32 {
        let f = match ccm_slope_check(params, sector, p, &CCM_GAMMAS, points) {
            Ok(f) => f,
            Err(e) => return Ok(vec![CheckResult::error("kc: coupling constant metamorphosis slope", &e)]),
        };
        fit.record(f.fit_residual, || format!("p = {p}"));
        let expected = f.expected_slope + closed_shift;
        slope.record(((f.slope - expected) / expected).abs(), || {
            format!("p = {p}: fitted slope {}, expected {expected}", f.slope)
        });
        if let Some(prev) = previous {
            slope.record((f.slope - prev - 1.0).abs(), || format!("p = {p}: slope increment {}", f.slope - prev));
        }
        previous = Some(f.slope);
        let e_ccm = ccm_energy(f.slope, params);
        let e4 = kc_energy_branch(sector, p, Branch::PHYSICAL, params)?;
        energy.record(((e_ccm - e4) / e4).abs(), || format!("p = {p}: {e_ccm} vs {e4}"));
    }
    Ok(vec![
        fit.finish("kc: epsilon(gamma) linear fit", SLOPE_TOL),
        slope.finish("kc: epsilon(gamma) slope and unit increments", SLOPE_TOL),
        energy.finish("kc: energy recovered from slope", SLOPE_TOL),
    ])
}

/// Everything `verify` runs: algebra, recurrences, constraints, `Φ`–lattice
/// matching and the oracle comparison.
pub fn verify_suite(cfg: &ModelConfig, suite: &SuiteConfig) -> Result<Vec<CheckResult>> {
    suite.validate()?;
    cfg.validate()?;
    let m = suite.mutation.as_ref();
    let mut out = algebra_checks(cfg, suite.max_level, m)?;
    out.extend(recurrence_checks(cfg, suite)?);
    out.extend(constraint_checks(cfg, suite.p_max)?);
    out.push(phi_polynomial_checks(cfg, suite.p_max)?);
    out.extend(phi_lattice_checks(cfg, suite.p_max, m)?);
    out.extend(spectrum_checks(cfg, suite)?);
    Ok(out)
}

/// What `oracle` runs: spectrum/oracle agreement, convergence, and for
/// Kepler–Coulomb the slope check.
pub fn oracle_suite(cfg: &ModelConfig, suite: &SuiteConfig) -> Result<Vec<CheckResult>> {
    suite.validate()?;
    cfg.validate()?;
    spectrum_checks(cfg, suite)
}

/// Per-mode oracle residual tables: raw eigenvalues on each grid, the
/// extrapolated value and the closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub mode: u32,
    pub level: u32,
    pub exact: f64,
    pub extrapolated: f64,
    pub relative_error: f64,
    pub raw: [f64; 3],
}

pub fn oracle_table(cfg: &ModelConfig, suite: &SuiteConfig) -> Result<Vec<OracleRow>> {
    let modes = oracle_modes(cfg, None)?;
    let levels = suite.oracle_levels;
    let mut rows = Vec::new();
    for (i, mode) in modes.iter().enumerate() {
        let sol = solve_lowest_detailed(&sized_problem(mode, levels, suite.oracle_points)?, levels)?;
        for k in 0..levels {
            let exact = mode.exact(k);
            rows.push(OracleRow {
                mode: i as u32 + 1,
                level: k as u32,
                exact,
                extrapolated: sol.eigenvalues[k],
                relative_error: ((sol.eigenvalues[k] - exact) / exact).abs(),
                raw: [sol.raw[0][k], sol.raw[1][k], sol.raw[2][k]],
            });
        }
    }
    Ok(rows)
}
