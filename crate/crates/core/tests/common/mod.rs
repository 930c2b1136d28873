//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's numerical routines; these are
//! written directly from the defining formulas.

#![allow(dead_code)]

use num_complex::Complex64;
use statdistill::protocol::{make_pair_state, SharedPairState};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Admissible pair with `|c| = frac * √(ab)` and the given phase.
pub fn pair(a: f64, frac: f64, phase: f64) -> SharedPairState {
    let b = 1.0 - a;
    let c_abs = frac * (a * b).sqrt();
    make_pair_state(a, b, Complex64::from_polar(c_abs, phase)).expect("admissible by construction")
}

/// Grid of admissible pairs: `a` in the open unit interval, `|c|` from zero to
/// the pure-state boundary, a few phases.
pub fn pair_grid(na: usize, nc: usize) -> Vec<SharedPairState> {
    let mut out = Vec::new();
    for i in 0..na {
        let a = (i as f64 + 0.5) / na as f64;
        for j in 0..nc {
            let frac = j as f64 / (nc - 1).max(1) as f64;
            let phase = 0.7 * (i + 2 * j) as f64;
            out.push(pair(a, frac, phase));
        }
    }
    out
}

/// Entry (row, col) of `ρ_L ⊗ ρ_R` written element by element from the
/// pair matrix `[[a, c], [c*, b]]`.
pub fn joint_entry(p: &SharedPairState, row: usize, col: usize) -> Complex64 {
    let m = |i: usize, j: usize| match (i, j) {
        (0, 0) => c(p.a(), 0.0),
        (1, 1) => c(p.b(), 0.0),
        (0, 1) => p.c(),
        _ => p.c().conj(),
    };
    m(row >> 1, col >> 1) * m(row & 1, col & 1)
}

/// `p_f = (1/2)^n (a² + b²) + 2ab`.
pub fn p_f(p: &SharedPairState, n: u32) -> f64 {
    let h = 0.5f64.powi(n as i32);
    h * (p.a() * p.a() + p.b() * p.b()) + 2.0 * p.a() * p.b()
}

/// Concurrence of the n-step state from its X-part, written in terms of the
/// pair parameters: `2 max(0, |c|² − ab/2ⁿ, |c|²/2ⁿ − ab) / p_f`.
pub fn concurrence_n(p: &SharedPairState, n: u32) -> f64 {
    let h = 0.5f64.powi(n as i32);
    let c2 = p.c().norm_sqr();
    let ab = p.a() * p.b();
    2.0 * (c2 - ab * h).max(c2 * h - ab).max(0.0) / p_f(p, n)
}

/// `2|ψ₀₀ψ₁₁ − ψ₀₁ψ₁₀|` for a normalized two-qubit pure state.
pub fn pure_concurrence(psi: [Complex64; 4]) -> f64 {
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm() / norm
}
