//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GkError, Result};
use crate::scalar::{lit, Cplx, Real};

/// Condition number above which an inversion is refused.
pub const CONDITION_LIMIT: f64 = 1e12;

pub fn sym<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * lit::<T>(0.5)
}

pub fn anti<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m - m.transpose()) * lit::<T>(0.5)
}

pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c<T: Real>(m: &DMatrix<Cplx<T>>) -> T {
    m.iter()
        .fold(T::zero(), |acc, x| acc.max((x.re * x.re + x.im * x.im).sqrt()))
}

pub fn point_f64<T: Real>(mu: &DVector<T>) -> Vec<f64> {
    mu.iter().map(|x| x.to_f64_lossy()).collect()
}

/// 2-norm condition number from the singular values.
pub fn condition_number<T: Real>(m: &DMatrix<T>) -> T {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    let min = sv.iter().fold(T::max_value().unwrap(), |a, &b| a.min(b));
    if min == T::zero() {
        T::max_value().unwrap()
    } else {
        max / min
    }
}

/// Inverse through LU with a condition-number guard.
pub fn guarded_inverse<T: Real>(m: &DMatrix<T>, what: &'static str) -> Result<DMatrix<T>> {
    let cond = condition_number(m);
    if !(cond <= lit(CONDITION_LIMIT)) {
        return Err(GkError::IllConditioned {
            what,
            condition: cond.to_f64_lossy(),
        });
    }
    m.clone().lu().try_inverse().ok_or(GkError::IllConditioned {
        what,
        condition: f64::INFINITY,
    })
}

pub fn is_antisymmetric<T: Real>(m: &DMatrix<T>) -> bool {
    m.is_square() && (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| m[(i, j)] == -m[(j, i)]))
}

/// Assembles `[[a, b], [c, d]]` from four equally sized square blocks.
pub fn block2<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>, c: &DMatrix<T>, d: &DMatrix<T>) -> DMatrix<T> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((0, n), (n, n)).copy_from(b);
    out.view_mut((n, 0), (n, n)).copy_from(c);
    out.view_mut((n, n), (n, n)).copy_from(d);
    out
}

/// The constant matrix `[[0, -I], [I, 0]]` of `ω = Σ dμ_i ∧ dθ_i` in the
/// basis `(∂θ, ∂μ)`.
pub fn standard_omega<T: Real>(n: usize) -> DMatrix<T> {
    let z = DMatrix::zeros(n, n);
    let id = DMatrix::identity(n, n);
    block2(&z, &(-&id), &id, &z)
}

pub fn complexify<T: Real>(re: &DMatrix<T>, im: &DMatrix<T>) -> DMatrix<Cplx<T>> {
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Cplx::new(re[(i, j)], im[(i, j)]))
}

pub fn to_complex<T: Real>(re: &DMatrix<T>) -> DMatrix<Cplx<T>> {
    re.map(|x| Cplx::new(x, T::zero()))
}

/// `S^{-1/2}` for a symmetric positive-definite `S`.
pub fn spd_inv_sqrt<T: Real>(s: &DMatrix<T>) -> DMatrix<T> {
    let eig = SymmetricEigen::new(s.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| T::one() / l.sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

pub fn min_sym_eigenvalue<T: Real>(s: &DMatrix<T>) -> T {
    let eig = SymmetricEigen::new(sym(s));
    eig.eigenvalues.iter().fold(T::max_value().unwrap(), |a, &b| a.min(b))
}

pub fn is_positive_definite<T: Real>(s: &DMatrix<T>) -> bool {
    s.clone().cholesky().is_some()
}

pub fn trace_product<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    let n = a.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
