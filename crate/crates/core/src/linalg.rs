//! Dense complex matrices at fixed small dimension.
//!
//! Everything the protocol touches lives in a 2- or 4-dimensional space, so
//! matrices are plain `[[Complex64; N]; N]` arrays behind a const-generic
//! newtype. Three spectral routines are provided:
//!
//! * [`hermitian_eigen`]: cyclic complex Jacobi, used for PSD checks and for
//!   factoring density matrices as `V V†`.
//! * [`singular_values`]: one-sided (Hestenes) Jacobi, which keeps small
//!   singular values accurate to machine precision in absolute terms.
//! * [`eigenvalues`] / [`eig_nonneg4`]: Hessenberg reduction followed by
//!   Wilkinson-shifted complex QR, for non-Hermitian products such as `ρ ρ̃`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::basis::Basis;

/// Complex amplitude used for matrix entries and Fock-state coefficients.
pub type ComplexAmplitude = Complex64;

/// Structural tolerance for Hermiticity and unit trace.
pub const TOL_HERMITIAN: f64 = 1e-12;
/// Smallest eigenvalue accepted as "nonnegative".
pub const TOL_PSD: f64 = 1e-10;
/// Largest imaginary or negative part clamped away by [`eig_nonneg4`].
pub const TOL_SPECTRUM: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("eigenvalue {re:e}{im:+e}i is not real and nonnegative within {tol:e}")]
    NonRealSpectrum { re: f64, im: f64, tol: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("iteration did not converge after {0} steps")]
    NoConvergence(usize),
}

/// Square complex matrix of fixed dimension `N`, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize>(pub [[Complex64; N]; N]);

pub type Matrix2 = Matrix<2>;
pub type Matrix4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros();
        for (i, row) in m.0.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diagonal(diag: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = Complex64::new(diag[i], 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        N
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn diagonal(&self) -> [Complex64; N] {
        std::array::from_fn(|i| self.0[i][i])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|m[j][k] - conj(m[k][j])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..N {
            for k in j..N {
                worst = worst.max((self.0[j][k] - self.0[k][j].conj()).norm());
            }
        }
        worst
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> fmt::Debug for Matrix<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix<{N}> [")?;
        for row in &self.0 {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>11.3e}{:+.3e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Mul for &Matrix<N> {
    type Output = Matrix<N>;

    fn mul(self, rhs: &Matrix<N>) -> Matrix<N> {
        Matrix::from_fn(|i, j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Matrix<N>;

    fn mul(self, rhs: Matrix<N>) -> Matrix<N> {
        &self * &rhs
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Matrix<N>;

    fn add(self, rhs: Matrix<N>) -> Matrix<N> {
        Matrix::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Matrix<N>;

    fn sub(self, rhs: Matrix<N>) -> Matrix<N> {
        Matrix::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

/// Kronecker product with row-major block layout:
/// `out[j*P + r][k*P + s] = a[j][k] * b[r][s]`.
///
/// The output dimension is a separate parameter because stable Rust cannot
/// spell `M * P` in a type; it is checked at compile time.
pub fn tensor<const M: usize, const P: usize, const MP: usize>(
    a: &Matrix<M>,
    b: &Matrix<P>,
) -> Matrix<MP> {
    const { assert!(M * P == MP, "tensor output dimension must be M * P") };
    Matrix::from_fn(|row, col| a.0[row / P][col / P] * b.0[row % P][col % P])
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the unitary whose columns are
/// the matching eigenvectors. Only the Hermitian part of `m` is used.
pub fn hermitian_eigen<const N: usize>(m: &Matrix<N>) -> ([f64; N], Matrix<N>) {
    let mut a = Matrix::<N>::from_fn(|i, j| 0.5 * (m.0[i][j] + m.0[j][i].conj()));
    let mut v = Matrix::<N>::identity();
    let scale = a.norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.0[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * scale {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a.0[p][q];
                let r = apq.norm();
                if r <= f64::EPSILON * 1e-3 * scale {
                    a.0[p][q] = ZERO;
                    a.0[q][p] = ZERO;
                    continue;
                }
                let phase = apq / r;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let zeta = (aqq - app) / (2.0 * r);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on (p, q)
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                for k in 0..N {
                    let akp = a.0[k][p];
                    let akq = a.0[k][q];
                    a.0[k][p] = akp * g_pp + akq * g_qp;
                    a.0[k][q] = akp * g_pq + akq * g_qq;
                }
                for k in 0..N {
                    let apk = a.0[p][k];
                    let aqk = a.0[q][k];
                    a.0[p][k] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a.0[q][k] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                for k in 0..N {
                    let vkp = v.0[k][p];
                    let vkq = v.0[k][q];
                    v.0[k][p] = vkp * g_pp + vkq * g_qp;
                    v.0[k][q] = vkp * g_pq + vkq * g_qq;
                }
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p].im = 0.0;
                a.0[q][q].im = 0.0;
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a.0[j][j].re.total_cmp(&a.0[i][i].re));
    let values = std::array::from_fn(|k| a.0[order[k]][order[k]].re);
    let vectors = Matrix::from_fn(|row, k| v.0[row][order[k]]);
    (values, vectors)
}

/// Singular values, descending, by one-sided Jacobi on the columns.
pub fn singular_values<const N: usize>(m: &Matrix<N>) -> [f64; N] {
    let mut a = *m;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..N {
            for q in p + 1..N {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for k in 0..N {
                    alpha += a.0[k][p].norm_sqr();
                    beta += a.0[k][q].norm_sqr();
                    gamma += a.0[k][p].conj() * a.0[k][q];
                }
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..N {
                    let x = a.0[k][p];
                    let y = a.0[k][q] * phase.conj();
                    a.0[k][p] = x * c - y * s;
                    a.0[k][q] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut values: [f64; N] =
        std::array::from_fn(|j| (0..N).map(|k| a.0[k][j].norm_sqr()).sum::<f64>().sqrt());
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// Unitary Givens rotation `[[c, s], [-conj(s), c]]` with real `c` that maps
/// `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn rotate_rows<const N: usize>(
    h: &mut Matrix<N>,
    (a, b): (usize, usize),
    (c, s): (f64, Complex64),
    cols: std::ops::Range<usize>,
) {
    for k in cols {
        let x = h.0[a][k];
        let y = h.0[b][k];
        h.0[a][k] = x * c + s * y;
        h.0[b][k] = -s.conj() * x + y * c;
    }
}

fn rotate_cols_adjoint<const N: usize>(
    h: &mut Matrix<N>,
    (a, b): (usize, usize),
    (c, s): (f64, Complex64),
    rows: std::ops::Range<usize>,
) {
    for k in rows {
        let x = h.0[k][a];
        let y = h.0[k][b];
        h.0[k][a] = x * c + y * s.conj();
        h.0[k][b] = -x * s + y * c;
    }
}

/// All eigenvalues of a general complex matrix (unordered).
pub fn eigenvalues<const N: usize>(m: &Matrix<N>) -> Result<[Complex64; N], LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let mut h = *m;

    // Upper Hessenberg form by Givens similarity transforms.
    for k in 0..N.saturating_sub(2) {
        for i in k + 2..N {
            let rot = givens(h.0[k + 1][k], h.0[i][k]);
            rotate_rows(&mut h, (k + 1, i), rot, 0..N);
            rotate_cols_adjoint(&mut h, (k + 1, i), rot, 0..N);
            h.0[i][k] = ZERO;
        }
    }

    let scale = h.norm();
    if N == 0 || scale == 0.0 {
        return Ok([ZERO; N]);
    }

    let max_iter = 60 * N;
    let mut iter = 0;
    let mut hi = N - 1;
    while hi > 0 {
        // Find the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h.0[lo][lo - 1].norm();
            let diag = h.0[lo][lo].norm() + h.0[lo - 1][lo - 1].norm();
            if sub <= f64::EPSILON * diag || sub <= f64::EPSILON * 1e-3 * scale {
                h.0[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(LinalgError::NoConvergence(max_iter));
        }

        let shift = if iter % 11 == 0 {
            // exceptional shift to break cycles
            h.0[hi][hi] + h.0[hi][hi - 1].norm() * 0.75
        } else {
            let a = h.0[hi - 1][hi - 1];
            let b = h.0[hi - 1][hi];
            let c = h.0[hi][hi - 1];
            let d = h.0[hi][hi];
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let mean = (a + d) * 0.5;
            let mu1 = mean + disc;
            let mu2 = mean - disc;
            if (mu1 - d).norm() <= (mu2 - d).norm() {
                mu1
            } else {
                mu2
            }
        };

        for k in lo..=hi {
            h.0[k][k] -= shift;
        }
        let mut rotations = [(1.0, ZERO); N];
        for k in lo..hi {
            let rot = givens(h.0[k][k], h.0[k + 1][k]);
            rotations[k] = rot;
            rotate_rows(&mut h, (k, k + 1), rot, lo..hi + 1);
            h.0[k + 1][k] = ZERO;
        }
        for k in lo..hi {
            let last = (k + 2).min(hi);
            rotate_cols_adjoint(&mut h, (k, k + 1), rotations[k], lo..last + 1);
        }
        for k in lo..=hi {
            h.0[k][k] += shift;
        }
    }

    Ok(h.diagonal())
}

/// Eigenvalues of a 4×4 matrix whose spectrum is known to be real and
/// nonnegative (such as `ρ ρ̃` for a density matrix `ρ`), sorted descending.
///
/// Imaginary and negative parts up to [`TOL_SPECTRUM`] are clamped to zero;
/// anything larger means the input was not of the promised form.
pub fn eig_nonneg4(m: &Matrix4) -> Result<[f64; 4], LinalgError> {
    let raw = eigenvalues(m)?;
    let mut out = [0.0; 4];
    for (slot, z) in out.iter_mut().zip(raw) {
        if z.im.abs() > TOL_SPECTRUM || z.re < -TOL_SPECTRUM {
            return Err(LinalgError::NonRealSpectrum {
                re: z.re,
                im: z.im,
                tol: TOL_SPECTRUM,
            });
        }
        *slot = z.re.max(0.0);
    }
    out.sort_by(|x, y| y.total_cmp(x));
    Ok(out)
}

/// Which density-matrix property failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityProperty {
    Finite,
    Hermitian,
    UnitTrace,
    PositiveSemidefinite,
}

impl fmt::Display for DensityProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityProperty::Finite => "finite entries",
            DensityProperty::Hermitian => "Hermitian",
            DensityProperty::UnitTrace => "unit trace",
            DensityProperty::PositiveSemidefinite => "positive semidefinite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub property: DensityProperty,
    /// Worst observed deviation (for PSD: magnitude of the most negative
    /// eigenvalue).
    pub worst: f64,
}

/// Every property a matrix failed in [`validate_density`].
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}", self.describe())]
pub struct DensityReport {
    pub tol: f64,
    pub violations: Vec<Violation>,
}

impl DensityReport {
    fn describe(&self) -> String {
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("not {} (worst deviation {:e})", v.property, v.worst))
            .collect();
        format!("invalid density matrix at tol {:e}: {}", self.tol, parts.join("; "))
    }

    pub fn failed(&self, property: DensityProperty) -> Option<&Violation> {
        self.violations.iter().find(|v| v.property == property)
    }
}

/// Checks that `m` is Hermitian, has unit trace, and is positive
/// semidefinite, all within `tol`.
pub fn validate_density<const N: usize>(m: &Matrix<N>, tol: f64) -> Result<(), DensityReport> {
    let mut violations = Vec::new();
    if !m.is_finite() {
        violations.push(Violation {
            property: DensityProperty::Finite,
            worst: f64::INFINITY,
        });
        return Err(DensityReport { tol, violations });
    }

    let herm = m.hermitian_deviation();
    if herm > tol {
        violations.push(Violation {
            property: DensityProperty::Hermitian,
            worst: herm,
        });
    }
    let tr = m.trace();
    let tr_dev = (tr - ONE).norm();
    if tr_dev > tol {
        violations.push(Violation {
            property: DensityProperty::UnitTrace,
            worst: tr_dev,
        });
    }
    let (values, _) = hermitian_eigen(m);
    let min = values[N - 1];
    if min < -tol {
        violations.push(Violation {
            property: DensityProperty::PositiveSemidefinite,
            worst: -min,
        });
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(DensityReport { tol, violations })
    }
}

/// Normalized 4×4 density matrix together with the basis its rows refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    entries: Matrix4,
    basis: Basis,
}

impl DensityMatrix4 {
    pub fn new(entries: Matrix4, basis: Basis) -> Self {
        DensityMatrix4 { entries, basis }
    }

    pub fn computational(entries: Matrix4) -> Self {
        Self::new(entries, Basis::Computational)
    }

    pub fn entries(&self) -> &Matrix4 {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries.0[row][col]
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn labels(&self) -> [String; 4] {
        self.basis.labels()
    }

    pub fn with_basis(self, basis: Basis) -> Self {
        DensityMatrix4 { basis, ..self }
    }

    pub fn validate(&self, tol: f64) -> Result<(), DensityReport> {
        validate_density(&self.entries, tol)
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }
}
