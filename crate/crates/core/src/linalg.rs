//! Small dense helpers shared by the modules. Nothing here is public API.

use alloc::vec::Vec;

use nalgebra::{Schur, SymmetricEigen, SVD};

use crate::{CMatrix, CVector, Error, Result, C64};

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[inline]
pub(crate) fn cabs(z: C64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// `e^{iθ}`
#[inline]
pub(crate) fn phase(theta: f64) -> C64 {
    C64::new(libm::cos(theta), libm::sin(theta))
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(cabs(*z)))
}

pub(crate) fn vec_norm(v: &CVector) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

pub(crate) fn frobenius(m: &CMatrix) -> f64 {
    libm::sqrt(m.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Largest entry of `m − m†`.
pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max(cabs(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    worst
}

pub(crate) fn ensure_square(m: &CMatrix, n: usize) -> Result<()> {
    if m.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
    }
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
    }
    Ok(())
}

pub(crate) fn ensure_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Hermiticity within `tol` relative to the largest entry (absolute below 1).
pub(crate) fn ensure_hermitian(m: &CMatrix, what: &'static str, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let defect = hermiticity_defect(m);
    if defect > tol * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { what, defect });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending order.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    // Symmetrize first so roundoff in the input cannot leak into the solver.
    let sym = (m + m.adjoint()) * re(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Right eigenpairs of a general square matrix from its complex Schur form.
///
/// Eigenvectors are unit-normalized and ordered by (Re E, Im E).
pub(crate) fn general_eigen(m: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    ensure_finite(m)?;
    let n = m.nrows();
    let (q, t) = Schur::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or(Error::IllConditioned { what: "Schur iteration", condition: f64::INFINITY })?
        .unpack();
    let scale = max_abs(&t).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;

    // Back-substitution on the triangular factor, one eigenvector per column.
    let mut y = CMatrix::zeros(n, n);
    for j in 0..n {
        let lambda = t[(j, j)];
        y[(j, j)] = re(1.0);
        for i in (0..j).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for l in (i + 1)..=j {
                acc += t[(i, l)] * y[(l, j)];
            }
            let mut denom = t[(i, i)] - lambda;
            if cabs(denom) < tiny {
                denom = re(tiny);
            }
            y[(i, j)] = -acc / denom;
        }
    }
    let mut vecs = q * y;
    for j in 0..n {
        let norm = vec_norm(&vecs.column(j).into_owned());
        vecs.column_mut(j).scale_mut(1.0 / norm);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (t[(a, a)], t[(b, b)]);
        ea.re.total_cmp(&eb.re).then(ea.im.total_cmp(&eb.im)).then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| t[(i, i)]).collect();
    let sorted = CMatrix::from_fn(n, n, |r, col| vecs[(r, order[col])]);
    Ok((values, sorted))
}

/// Ratio of extreme singular values; infinite for singular input.
pub(crate) fn condition_number(m: &CMatrix) -> f64 {
    let sv = SVD::new(m.clone(), false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub(crate) fn inverse(m: &CMatrix) -> Option<CMatrix> {
    m.clone().lu().try_inverse()
}

/// Frobenius norm restricted to the given row/column index set.
pub(crate) fn restricted_norm(m: &CMatrix, idx: &[usize]) -> f64 {
    let mut acc = 0.0;
    for &i in idx {
        for &j in idx {
            acc += m[(i, j)].norm_sqr();
        }
    }
    libm::sqrt(acc)
}

pub(crate) fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Apply `V diag(f(λ)) V†` to `x`.
pub(crate) fn spectral_apply(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> C64, x: &CVector) -> CVector {
    let mut coeff = vectors.adjoint() * x;
    for (k, z) in coeff.iter_mut().enumerate() {
        *z *= f(values[k]);
    }
    vectors * coeff
}
