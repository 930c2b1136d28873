//! Second-quantized model of one Bob pair at a 50/50 beam splitter.
//!
//! Four single-particle modes (port L or R, spin up or down) are addressed in
//! the fixed canonical order `(L,↑) < (L,↓) < (R,↑) < (R,↓)`. A [`FockVector`]
//! stores amplitudes on normalized occupation states
//! `|n⟩ = Π_m (a†_m)^{n_m} / √(n_m!) |0⟩`, operators taken in canonical order,
//! so fermionic signs are absorbed when a state is built and bosonic
//! `√(n!)` factors are folded in on expansion.
//!
//! The beam splitter is a linear map on creation operators. Expanding the
//! transformed monomials and re-sorting them into canonical order is done by
//! brute force, which is cheap at two particles and leaves no room for
//! hand-derived sign errors. The outputs are the post-selection factors the
//! protocol uses for its per-step map.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix4;

pub const NUM_MODES: usize = 4;
/// Particle-number cap for beam-splitter inputs.
pub const MAX_PARTICLES: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("fermionic state has {count} particles in mode {mode}")]
    DoubleOccupancy { mode: Mode, count: u8 },
    #[error("state has {0} particles; at most {MAX_PARTICLES} are supported")]
    TooManyParticles(usize),
    #[error("cannot combine fermionic and bosonic states")]
    MixedStatistics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Fermion,
    Boson,
}

impl Statistics {
    pub const ALL: [Statistics; 2] = [Statistics::Fermion, Statistics::Boson];

    pub fn as_str(self) -> &'static str {
        match self {
            Statistics::Fermion => "fermion",
            Statistics::Boson => "boson",
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn arrow(self) -> char {
        match self {
            Spin::Up => '↑',
            Spin::Down => '↓',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub side: Side,
    pub spin: Spin,
}

impl Mode {
    /// Modes in canonical operator order.
    pub const ALL: [Mode; NUM_MODES] = [
        Mode::new(Side::L, Spin::Up),
        Mode::new(Side::L, Spin::Down),
        Mode::new(Side::R, Spin::Up),
        Mode::new(Side::R, Spin::Down),
    ];

    pub const fn new(side: Side, spin: Spin) -> Mode {
        Mode { side, spin }
    }

    pub fn index(self) -> usize {
        let side = match self.side {
            Side::L => 0,
            Side::R => 2,
        };
        let spin = match self.spin {
            Spin::Up => 0,
            Spin::Down => 1,
        };
        side + spin
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.side, self.spin.arrow())
    }
}

/// Occupation numbers indexed by [`Mode::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Occupation(pub [u8; NUM_MODES]);

impl Occupation {
    pub fn of(modes: &[Mode]) -> Occupation {
        let mut counts = [0u8; NUM_MODES];
        for m in modes {
            counts[m.index()] += 1;
        }
        Occupation(counts)
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn on_side(&self, side: Side) -> usize {
        Mode::ALL
            .iter()
            .filter(|m| m.side == side)
            .map(|m| self.0[m.index()] as usize)
            .sum()
    }

    /// Both particles leave through the same port.
    pub fn is_bunched(&self) -> bool {
        self.total() >= 2 && (self.on_side(Side::L) == self.total() || self.on_side(Side::R) == self.total())
    }

    /// Creation operators in canonical order, repeated by occupation.
    fn creators(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(m, &n)| std::iter::repeat_n(m, n as usize))
            .collect()
    }

    fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| (1..=n as u32).product::<u32>() as f64).product()
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Mode::ALL
            .iter()
            .filter(|m| self.0[m.index()] > 0)
            .map(|m| match self.0[m.index()] {
                1 => m.to_string(),
                n => format!("{n}×{m}"),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("|0⟩")
        } else {
            write!(f, "|{}⟩", parts.join(" "))
        }
    }
}

/// Superposition of occupation states.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    terms: BTreeMap<Occupation, Complex64>,
    statistics: Statistics,
}

impl FockVector {
    pub fn vacuum(statistics: Statistics) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Occupation::default(), Complex64::new(1.0, 0.0));
        FockVector { terms, statistics }
    }

    pub fn zero(statistics: Statistics) -> Self {
        FockVector {
            terms: BTreeMap::new(),
            statistics,
        }
    }

    /// `a†_{m0} a†_{m1} … |0⟩`, operators applied right to left.
    pub fn from_creators(modes: &[Mode], statistics: Statistics) -> Self {
        let mut v = Self::vacuum(statistics);
        for &m in modes.iter().rev() {
            v = v.create(m);
        }
        v
    }

    /// Builds a vector from `(occupation, amplitude)` pairs on normalized
    /// occupation states.
    pub fn from_terms(
        statistics: Statistics,
        terms: impl IntoIterator<Item = (Occupation, Complex64)>,
    ) -> Self {
        let mut v = Self::zero(statistics);
        for (occ, amp) in terms {
            v.add_term(occ, amp);
        }
        v
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.terms.get(occ).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.terms
            .iter()
            .map(|(occ, a)| a.conj() * other.amplitude(occ))
            .sum()
    }

    pub fn scaled(&self, s: Complex64) -> FockVector {
        FockVector::from_terms(self.statistics, self.terms.iter().map(|(o, a)| (*o, a * s)))
    }

    pub fn normalized(&self) -> FockVector {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    /// Keeps only the terms whose occupation satisfies `keep`.
    pub fn project(&self, keep: impl Fn(&Occupation) -> bool) -> FockVector {
        FockVector::from_terms(
            self.statistics,
            self.terms.iter().filter(|(o, _)| keep(o)).map(|(o, a)| (*o, *a)),
        )
    }

    pub fn max_particles(&self) -> usize {
        self.terms.keys().map(Occupation::total).max().unwrap_or(0)
    }

    /// Largest amplitude difference over the union of supports.
    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|o| (self.amplitude(o) - other.amplitude(o)).norm())
            .fold(0.0, f64::max)
    }

    fn add_term(&mut self, occ: Occupation, amp: Complex64) {
        let slot = self.terms.entry(occ).or_default();
        *slot += amp;
        if *slot == Complex64::default() {
            self.terms.remove(&occ);
        }
    }

    fn create(&self, mode: Mode) -> FockVector {
        let idx = mode.index();
        let mut out = FockVector::zero(self.statistics);
        for (occ, amp) in &self.terms {
            let mut next = *occ;
            let factor = match self.statistics {
                Statistics::Fermion => {
                    if occ.0[idx] > 0 {
                        continue;
                    }
                    let before: u8 = occ.0[..idx].iter().sum();
                    if before.is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    }
                }
                Statistics::Boson => f64::from(occ.0[idx] + 1).sqrt(),
            };
            next.0[idx] += 1;
            out.add_term(next, amp * factor);
        }
        out
    }

    fn check_input(&self) -> Result<(), FockError> {
        let n = self.max_particles();
        if n > MAX_PARTICLES {
            return Err(FockError::TooManyParticles(n));
        }
        if self.statistics == Statistics::Fermion {
            for occ in self.terms.keys() {
                for m in Mode::ALL {
                    if occ.0[m.index()] > 1 {
                        return Err(FockError::DoubleOccupancy {
                            mode: m,
                            count: occ.0[m.index()],
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(o, a)| format!("({:.6}{:+.6}i){}", a.re, a.im, o))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Sorts mode indices into canonical order, returning the permutation sign.
fn sort_with_parity(seq: &mut [usize]) -> f64 {
    let mut sign = 1.0;
    for i in 1..seq.len() {
        let mut j = i;
        while j > 0 && seq[j - 1] > seq[j] {
            seq.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

/// Applies a single-particle mode transformation `a†_m → Σ_k u[k][m] a†_k`
/// to every creation operator of `psi`.
pub fn apply_mode_map(psi: &FockVector, u: &Matrix4) -> Result<FockVector, FockError> {
    psi.check_input()?;
    let stats = psi.statistics;
    let mut out = FockVector::zero(stats);

    for (occ, amp) in &psi.terms {
        let ops = occ.creators();
        let k = ops.len();
        let input_norm = occ.factorial_product().sqrt();
        // every choice of output mode for each operator
        for choice in 0..NUM_MODES.pow(k as u32) {
            let mut targets: Vec<usize> = (0..k)
                .map(|p| (choice / NUM_MODES.pow(p as u32)) % NUM_MODES)
                .collect();
            let coeff: Complex64 = ops
                .iter()
                .zip(&targets)
                .map(|(&src, &dst)| u.0[dst][src])
                .product();
            if coeff == Complex64::default() {
                continue;
            }
            let sign = match stats {
                Statistics::Fermion => {
                    let s = sort_with_parity(&mut targets);
                    if targets.windows(2).any(|w| w[0] == w[1]) {
                        continue;
                    }
                    s
                }
                Statistics::Boson => {
                    targets.sort_unstable();
                    1.0
                }
            };
            let mut counts = [0u8; NUM_MODES];
            for &t in &targets {
                counts[t] += 1;
            }
            let target = Occupation(counts);
            let output_norm = target.factorial_product().sqrt();
            out.add_term(target, amp * coeff * (sign * output_norm / input_norm));
        }
    }
    Ok(out)
}

/// Mode matrix of the 50/50 splitter: `a†_{L,σ} → (a†_{L,σ} + i a†_{R,σ})/√2`,
/// `a†_{R,σ} → (i a†_{L,σ} + a†_{R,σ})/√2`, spin untouched.
pub fn beam_splitter_matrix() -> Matrix4 {
    let t = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let r = Complex64::new(0.0, FRAC_1_SQRT_2);
    let mut u = Matrix4::zeros();
    for spin in [Spin::Up, Spin::Down] {
        let l = Mode::new(Side::L, spin).index();
        let rr = Mode::new(Side::R, spin).index();
        u[(l, l)] = t;
        u[(rr, rr)] = t;
        u[(rr, l)] = r;
        u[(l, rr)] = r;
    }
    u
}

pub fn apply_beam_splitter(psi: &FockVector) -> Result<FockVector, FockError> {
    apply_mode_map(psi, &beam_splitter_matrix())
}

/// Result of sending one particle per port through the splitter and sorting
/// the output by port.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSplit {
    pub bunch_prob: f64,
    pub antibunch_prob: f64,
    /// Renormalized branch that survives post-selection: antibunched for
    /// fermions, bunched for bosons.
    pub kept_state: FockVector,
    /// Same branch before renormalization.
    pub kept_unnormalized: FockVector,
}

impl OutcomeSplit {
    pub fn kept_prob(&self) -> f64 {
        self.kept_unnormalized.norm_sqr()
    }
}

/// Input `a†_{L,σ_L} a†_{R,σ_R} |0⟩` through the splitter, split by outcome.
pub fn outcome_split(spins: (Spin, Spin), statistics: Statistics) -> OutcomeSplit {
    let input = FockVector::from_creators(
        &[Mode::new(Side::L, spins.0), Mode::new(Side::R, spins.1)],
        statistics,
    );
    let out = apply_beam_splitter(&input).expect("one particle per port is always admissible");
    let bunched = out.project(Occupation::is_bunched);
    let antibunched = out.project(|o| !o.is_bunched());
    let kept = match statistics {
        Statistics::Fermion => antibunched.clone(),
        Statistics::Boson => bunched.clone(),
    };
    OutcomeSplit {
        bunch_prob: bunched.norm_sqr(),
        antibunch_prob: antibunched.norm_sqr(),
        kept_state: kept.normalized(),
        kept_unnormalized: kept,
    }
}

/// Pair-1 spins `(σ_L, σ_R)` entering the splitter for the basis components
/// α, β, γ, κ once Bob's L-side spins have been flipped.
pub fn component_spins() -> [(Spin, Spin); 4] {
    // pre-flip Bob spins: α (↓,↓), β (↓,↑), γ (↑,↓), κ (↑,↑)
    let pre = [
        (Spin::Down, Spin::Down),
        (Spin::Down, Spin::Up),
        (Spin::Up, Spin::Down),
        (Spin::Up, Spin::Up),
    ];
    pre.map(|(l, r)| (l.flipped(), r))
}

/// Oracle-derived effect of one post-selected splitter pass on each basis
/// component.
#[derive(Debug, Clone)]
pub struct StepDerivation {
    pub statistics: Statistics,
    pub splits: [OutcomeSplit; 4],
}

impl StepDerivation {
    /// Amplitude attenuation `√(kept probability)` per component.
    pub fn factors(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.splits[i].kept_prob().sqrt())
    }

    /// `⟨kept_α | kept_κ⟩` of the normalized kept states. The α–κ coherence
    /// survives post-selection only if this has unit modulus.
    pub fn alpha_kappa_overlap(&self) -> Complex64 {
        self.splits[0].kept_state.inner(&self.splits[3].kept_state)
    }

    /// Largest deviation between the per-component global phases of the kept
    /// branches, measured against the α branch. Zero means the kept branches
    /// add no relative phase and the step map is a real diagonal filter.
    pub fn relative_phase_spread(&self) -> f64 {
        let phase = |s: &OutcomeSplit| {
            s.kept_unnormalized
                .terms()
                .map(|(_, a)| *a)
                .find(|a| a.norm() > 0.0)
                .map(|a| a / a.norm())
                .unwrap_or_default()
        };
        let reference = phase(&self.splits[0]);
        self.splits
            .iter()
            .map(|s| (phase(s) - reference).norm())
            .fold(0.0, f64::max)
    }
}

pub fn derive_step(statistics: Statistics) -> StepDerivation {
    StepDerivation {
        statistics,
        splits: component_spins().map(|spins| outcome_split(spins, statistics)),
    }
}

/// `(1/√2, 1, 1, 1/√2)` in exact arithmetic; derived here from the oracle.
pub fn derive_step_factors(statistics: Statistics) -> [f64; 4] {
    derive_step(statistics).factors()
}

/// Kept-branch norms after `steps` Bob pairs have each passed their own
/// splitter. Pairs are independent, so each component's kept state is the
/// tensor product of per-pair kept states and its norm is the product of
/// per-pair norms.
pub fn kept_norms_after(steps: u32, statistics: Statistics) -> [f64; 4] {
    let per_pair = derive_step_factors(statistics);
    std::array::from_fn(|i| (0..steps).map(|_| per_pair[i]).product())
}

fn occ(modes: &[Mode]) -> Occupation {
    Occupation::of(modes)
}

const LU: Mode = Mode::new(Side::L, Spin::Up);
const LD: Mode = Mode::new(Side::L, Spin::Down);
const RU: Mode = Mode::new(Side::R, Spin::Up);
const RD: Mode = Mode::new(Side::R, Spin::Down);

/// The published post-splitter state of the α component, written in
/// canonical order:
/// `(i/2)(|L↑ L↓⟩ + |R↑ R↓⟩) + (1/2)(|L↑ R↓⟩ + |L↓ R↑⟩)`.
pub fn reference_b1() -> FockVector {
    let i_half = Complex64::new(0.0, 0.5);
    let half = Complex64::new(0.5, 0.0);
    FockVector::from_terms(
        Statistics::Fermion,
        [
            (occ(&[LU, LD]), i_half),
            (occ(&[RU, RD]), i_half),
            (occ(&[LU, RD]), half),
            (occ(&[LD, RU]), half),
        ],
    )
}

/// The published post-splitter state of the κ component, kets taken in the
/// order printed: `-(i/2)(|L↑ L↓⟩ + |R↑ R↓⟩) + (1/2)(|L↓ R↑⟩ + |L↑ R↓⟩)`.
pub fn reference_b2() -> FockVector {
    let minus_i_half = Complex64::new(0.0, -0.5);
    let half = Complex64::new(0.5, 0.0);
    FockVector::from_terms(
        Statistics::Fermion,
        [
            (occ(&[LU, LD]), minus_i_half),
            (occ(&[RU, RD]), minus_i_half),
            (occ(&[LD, RU]), half),
            (occ(&[LU, RD]), half),
        ],
    )
}

/// `(|L↑ R↓⟩ + |L↓ R↑⟩)/√2`.
pub fn reference_triplet() -> FockVector {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    FockVector::from_terms(Statistics::Fermion, [(occ(&[LU, RD]), s), (occ(&[LD, RU]), s)])
}

/// Splitter output for the α and κ inputs compared with the printed states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCheck {
    pub b1_deviation: f64,
    pub b2_deviation: f64,
}

pub fn check_reference_states() -> ReferenceCheck {
    let [alpha, _, _, kappa] = component_spins();
    let run = |(l, r): (Spin, Spin)| {
        let input = FockVector::from_creators(
            &[Mode::new(Side::L, l), Mode::new(Side::R, r)],
            Statistics::Fermion,
        );
        apply_beam_splitter(&input).expect("admissible input")
    };
    ReferenceCheck {
        b1_deviation: run(alpha).max_abs_diff(&reference_b1()),
        b2_deviation: run(kappa).max_abs_diff(&reference_b2()),
    }
}
