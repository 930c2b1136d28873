//! Concurrence and the distillation figures of merit.
//!
//! The general Wootters concurrence is evaluated as the singular values of
//! `τ = Vᵀ F V`, where `ρ = V V†` and `F` is the two-qubit spin flip. These
//! equal the square roots of the eigenvalues of `ρ F ρ* F`, but come out of a
//! Jacobi SVD with absolute accuracy near machine epsilon instead of the
//! `√ε` that taking square roots of tiny computed eigenvalues would give.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    eig_nonneg4, hermitian_eigen, singular_values, DensityMatrix4, DensityReport, LinalgError,
    Matrix4, TOL_PSD,
};
use crate::protocol::SharedPairState;

/// Largest non-X entry tolerated by [`concurrence_x`].
pub const X_SHAPE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    InvalidState(#[from] DensityReport),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("matrix is not X-shaped: entry ({row},{col}) has modulus {modulus:e}")]
    NotXShaped { row: usize, col: usize, modulus: f64 },
}

/// `σ_y ⊗ σ_y` written out: −1 at (1,4) and (4,1), +1 at (2,3) and (3,2).
pub fn spin_flip_matrix() -> Matrix4 {
    let mut f = Matrix4::zeros();
    f[(0, 3)] = Complex64::new(-1.0, 0.0);
    f[(1, 2)] = Complex64::new(1.0, 0.0);
    f[(2, 1)] = Complex64::new(1.0, 0.0);
    f[(3, 0)] = Complex64::new(-1.0, 0.0);
    f
}

/// `ρ̃ = F ρ* F`.
pub fn spin_flipped(rho: &Matrix4) -> Matrix4 {
    let f = spin_flip_matrix();
    &(&f * &rho.conj()) * &f
}

/// Eigenvalues of `ρ ρ̃`, descending, through the general eigen-solver.
pub fn wootters_eigenvalues(rho: &DensityMatrix4) -> Result<[f64; 4], MeasureError> {
    rho.validate(TOL_PSD)?;
    let m = rho.entries();
    Ok(eig_nonneg4(&(m * &spin_flipped(m)))?)
}

/// Square roots of the eigenvalues of `ρ ρ̃`, descending.
pub fn wootters_roots(rho: &DensityMatrix4) -> Result<[f64; 4], MeasureError> {
    rho.validate(TOL_PSD)?;
    let (weights, vectors) = hermitian_eigen(rho.entries());
    let v = Matrix4::from_fn(|i, k| vectors[(i, k)] * weights[k].max(0.0).sqrt());
    let tau = &(&v.transpose() * &spin_flip_matrix()) * &v;
    Ok(singular_values(&tau))
}

/// Wootters concurrence `max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄)`.
pub fn concurrence(rho: &DensityMatrix4) -> Result<f64, MeasureError> {
    let r = wootters_roots(rho)?;
    Ok((r[0] - r[1] - r[2] - r[3]).clamp(0.0, 1.0))
}

fn x_formula(m: &Matrix4) -> f64 {
    let d = m.diagonal().map(|z| z.re.max(0.0));
    let outer = m[(0, 3)].norm() - (d[1] * d[2]).sqrt();
    let inner = m[(1, 2)].norm() - (d[0] * d[3]).sqrt();
    2.0 * outer.max(inner).max(0.0)
}

/// Closed-form concurrence of an X-shaped state,
/// `2 max(0, |ρ₁₄| − √(ρ₂₂ρ₃₃), |ρ₂₃| − √(ρ₁₁ρ₄₄))`.
///
/// Rejects input whose entries off the diagonal and anti-diagonal exceed
/// [`X_SHAPE_TOL`].
pub fn concurrence_x(rho: &DensityMatrix4) -> Result<f64, MeasureError> {
    let m = rho.entries();
    for (row, col) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
        let modulus = m[(row, col)].norm().max(m[(col, row)].norm());
        if modulus > X_SHAPE_TOL {
            return Err(MeasureError::NotXShaped { row, col, modulus });
        }
    }
    Ok(x_formula(m))
}

/// The X-state closed form applied to the diagonal and anti-diagonal only,
/// ignoring the other entries.
///
/// Protocol states `D (ρ_L ⊗ ρ_R) D` are not X-shaped once `c ≠ 0`, yet their
/// concurrence still equals this expression; callers comparing it against
/// [`concurrence`] on such states are the intended users.
pub fn concurrence_x_part(rho: &DensityMatrix4) -> f64 {
    x_formula(rho.entries())
}

/// A single side's pair state placed in the middle block of a two-qubit
/// density matrix.
pub fn embed_pair_state(pair: &SharedPairState) -> DensityMatrix4 {
    let m = pair.matrix();
    let mut out = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[(i + 1, j + 1)] = m[(i, j)];
        }
    }
    DensityMatrix4::computational(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistillationSummary {
    pub initial_concurrence: f64,
    /// `|c|²/ab`; `None` when `ab = 0`.
    pub asymptotic_concurrence: Option<f64>,
    pub asymptotic_probability: f64,
    pub distillable: bool,
    pub gain: Option<f64>,
}

pub fn summarize(pair: &SharedPairState) -> DistillationSummary {
    let c_abs = pair.c().norm();
    let ab = pair.ab();
    let initial = 2.0 * c_abs;
    let asymptotic = (ab > 0.0).then(|| c_abs * c_abs / ab);
    DistillationSummary {
        initial_concurrence: initial,
        asymptotic_concurrence: asymptotic,
        asymptotic_probability: 2.0 * ab,
        distillable: c_abs > 2.0 * ab,
        gain: asymptotic.map(|x| x - initial),
    }
}

/// Maximum of the asymptotic success probability `2a(1−a)` over
/// `a = k/resolution`, returned as `(value, a)`.
pub fn efficiency_grid_max(resolution: u32) -> (f64, f64) {
    let resolution = resolution.max(1);
    (0..=resolution)
        .map(|k| {
            let a = f64::from(k) / f64::from(resolution);
            (2.0 * a * (1.0 - a), a)
        })
        .fold((f64::NEG_INFINITY, 0.0), |best, cur| if cur.0 > best.0 { cur } else { best })
}
