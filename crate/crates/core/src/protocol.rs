//! The distillation protocol on the α, β, γ, κ pair-of-pairs space.
//!
//! Each side holds a pair state `[[a, c], [c*, b]]`; the joint state is their
//! tensor product. Bob flips his L-side spins (a relabeling only), then sends
//! one pair at a time through a 50/50 splitter and keeps the outcomes allowed
//! by the particle statistics. Each kept pass acts on the joint state as
//! `ρ → D ρ D / tr(D ρ D)` with `D = diag(1/√2, 1, 1, 1/√2)`, the factors
//! coming from the [`fock`](crate::fock) oracle.

use num_complex::Complex64;
use thiserror::Error;

use crate::basis::Basis;
use crate::fock::{self, Statistics};
use crate::linalg::{tensor, DensityMatrix4, Matrix, Matrix2, Matrix4};
use crate::measures;

/// Tolerance for every probability and normalization comparison.
pub const PROB_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_STEPS: u32 = 64;
/// Step probabilities at or below this are treated as a vanished branch.
pub const DEGENERATE_STEP_PROB: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("NotNormalized: a + b = {sum} differs from 1 by more than {PROB_TOL:e}")]
    NotNormalized { sum: f64 },
    #[error("Negative weight: {name} = {value}")]
    NegativeWeight { name: &'static str, value: f64 },
    #[error("NotPSD: |c|^2 = {c_abs_sq} exceeds a*b = {ab}")]
    NotPsd { c_abs_sq: f64, ab: f64 },
    #[error("NonFinite: parameter {0} is not a finite number")]
    NonFinite(&'static str),
    #[error("basis is already spin-flipped ({0})")]
    AlreadyFlipped(Basis),
    #[error("DegenerateStep: step probability {0:e} vanished below precision")]
    DegenerateStep(f64),
    #[error("TooManySteps: {requested} exceeds the configured maximum {max}")]
    TooManySteps { requested: u32, max: u32 },
    #[error(transparent)]
    Measure(#[from] measures::MeasureError),
}

/// The state `[[a, c], [c*, b]]` shared by Alice and Bob on one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharedPairState {
    a: f64,
    b: f64,
    c: Complex64,
}

impl SharedPairState {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn ab(&self) -> f64 {
        self.a * self.b
    }

    /// `|c|² = ab`, i.e. a pure state.
    pub fn is_pure(&self) -> bool {
        (self.c.norm_sqr() - self.ab()).abs() <= PROB_TOL
    }

    pub fn matrix(&self) -> Matrix2 {
        Matrix([
            [Complex64::new(self.a, 0.0), self.c],
            [self.c.conj(), Complex64::new(self.b, 0.0)],
        ])
    }
}

pub fn make_pair_state(a: f64, b: f64, c: Complex64) -> Result<SharedPairState, ProtocolError> {
    for (name, v) in [("a", a), ("b", b), ("c_re", c.re), ("c_im", c.im)] {
        if !v.is_finite() {
            return Err(ProtocolError::NonFinite(name));
        }
    }
    for (name, value) in [("a", a), ("b", b)] {
        if value < 0.0 {
            return Err(ProtocolError::NegativeWeight { name, value });
        }
    }
    if (a + b - 1.0).abs() > PROB_TOL {
        return Err(ProtocolError::NotNormalized { sum: a + b });
    }
    let c_abs_sq = c.norm_sqr();
    if c_abs_sq > a * b + PROB_TOL {
        return Err(ProtocolError::NotPsd { c_abs_sq, ab: a * b });
    }
    Ok(SharedPairState { a, b, c })
}

/// `ρ_L ⊗ ρ_R` for two copies of `pair`, labeled α, β, γ, κ.
pub fn make_total_state(pair: &SharedPairState) -> DensityMatrix4 {
    let m = pair.matrix();
    DensityMatrix4::new(tensor(&m, &m), Basis::Initial)
}

/// Relabels the basis for Bob's L-side spin flip. Entries are untouched.
pub fn apply_spin_flip(rho: &DensityMatrix4) -> Result<DensityMatrix4, ProtocolError> {
    match rho.basis() {
        Basis::Initial => Ok(rho.clone().with_basis(Basis::SpinFlipped)),
        other => Err(ProtocolError::AlreadyFlipped(other)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub pair: SharedPairState,
    pub n_steps: u32,
    pub statistics: Statistics,
    pub max_steps: u32,
}

impl ProtocolConfig {
    pub fn new(pair: SharedPairState, n_steps: u32, statistics: Statistics) -> Self {
        ProtocolConfig {
            pair,
            n_steps,
            statistics,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: DensityMatrix4,
    pub step_prob: f64,
    pub cumulative_prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub final_state: DensityMatrix4,
    pub p_f: f64,
    pub per_step: Vec<StepOutcome>,
    /// Concurrence after 0, 1, …, n steps.
    pub concurrence_series: Vec<f64>,
}

impl ProtocolResult {
    pub fn final_concurrence(&self) -> f64 {
        *self.concurrence_series.last().expect("series always holds the initial state")
    }
}

fn steps_done(basis: Basis) -> u32 {
    match basis {
        Basis::PostSelected { steps, .. } | Basis::Final { steps, .. } => steps,
        _ => 0,
    }
}

fn filtered_step(
    rho: &DensityMatrix4,
    factors: &[f64; 4],
    statistics: Statistics,
) -> Result<StepOutcome, ProtocolError> {
    let m = rho.entries();
    let sigma = Matrix4::from_fn(|i, j| m[(i, j)] * (factors[i] * factors[j]));
    let step_prob = sigma.trace().re;
    if !(step_prob > DEGENERATE_STEP_PROB) {
        return Err(ProtocolError::DegenerateStep(step_prob));
    }
    let basis = Basis::PostSelected {
        steps: steps_done(rho.basis()) + 1,
        statistics,
    };
    Ok(StepOutcome {
        state: DensityMatrix4::new(sigma.scale(1.0 / step_prob), basis),
        step_prob,
        cumulative_prob: step_prob,
    })
}

/// One splitter pass with post-selection. `cumulative_prob` equals
/// `step_prob` here; [`distill`] chains it across steps.
pub fn distill_step(rho: &DensityMatrix4, statistics: Statistics) -> Result<StepOutcome, ProtocolError> {
    filtered_step(rho, &fock::derive_step_factors(statistics), statistics)
}

pub fn distill(config: &ProtocolConfig) -> Result<ProtocolResult, ProtocolError> {
    if config.n_steps > config.max_steps {
        return Err(ProtocolError::TooManySteps {
            requested: config.n_steps,
            max: config.max_steps,
        });
    }
    let initial = make_total_state(&config.pair);
    let mut concurrence_series = vec![measures::concurrence(&initial)?];
    if config.n_steps == 0 {
        return Ok(ProtocolResult {
            final_state: initial,
            p_f: 1.0,
            per_step: Vec::new(),
            concurrence_series,
        });
    }

    let factors = fock::derive_step_factors(config.statistics);
    let mut state = apply_spin_flip(&initial)?;
    let mut cumulative = 1.0;
    let mut per_step = Vec::with_capacity(config.n_steps as usize);
    for _ in 0..config.n_steps {
        let mut outcome = filtered_step(&state, &factors, config.statistics)?;
        cumulative *= outcome.step_prob;
        outcome.cumulative_prob = cumulative;
        concurrence_series.push(measures::concurrence(&outcome.state)?);
        state = outcome.state.clone();
        per_step.push(outcome);
    }

    let final_state = state.with_basis(Basis::Final {
        steps: config.n_steps,
        statistics: config.statistics,
    });
    Ok(ProtocolResult {
        final_state,
        p_f: cumulative,
        per_step,
        concurrence_series,
    })
}

/// `(1/2)ⁿ a² + (1/2)ⁿ b² + 2ab`.
pub fn success_probability(pair: &SharedPairState, n: u32) -> f64 {
    let h = 0.5f64.powi(n as i32);
    h * (pair.a * pair.a + pair.b * pair.b) + 2.0 * pair.ab()
}

/// The n-step state written down directly: corner entries carry `(1/2)ⁿ`,
/// the α/κ-to-β/γ couplings carry `(1/√2)ⁿ`, the β/γ block is untouched,
/// and the whole matrix is divided by [`success_probability`].
pub fn final_state_closed_form(pair: &SharedPairState, n: u32) -> (DensityMatrix4, f64) {
    let p_f = success_probability(pair, n);
    let h = 0.5f64.powi(n as i32);
    let f = std::f64::consts::FRAC_1_SQRT_2.powi(n as i32);
    let (a, b, c) = (pair.a, pair.b, pair.c);
    let re = |x: f64| Complex64::new(x, 0.0);

    let mut m = Matrix4::zeros();
    m[(0, 0)] = re(h * a * a);
    m[(0, 1)] = c * (f * a);
    m[(0, 2)] = c * (f * a);
    m[(0, 3)] = c * c * h;
    m[(1, 1)] = re(a * b);
    m[(1, 2)] = re(c.norm_sqr());
    m[(1, 3)] = c * (f * b);
    m[(2, 2)] = re(a * b);
    m[(2, 3)] = c * (f * b);
    m[(3, 3)] = re(h * b * b);
    for i in 0..4 {
        for j in 0..i {
            m[(i, j)] = m[(j, i)].conj();
        }
    }

    let basis = if n == 0 {
        Basis::Initial
    } else {
        Basis::Final {
            steps: n,
            statistics: Statistics::Fermion,
        }
    };
    (DensityMatrix4::new(m.scale(1.0 / p_f), basis), p_f)
}
