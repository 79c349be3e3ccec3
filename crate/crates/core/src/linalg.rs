//! Small dense linear-algebra helpers shared by the engine, the protocol and
//! the oracle.
//!
//! Qubit ordering is big-endian: in `a ⊗ b` the first factor owns the most
//! significant index bit, and `|↑⟩` is index 0.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Nonzero entries of a single-qubit Pauli matrix, one per row, as
/// `(column, value)`. Index 0 is the identity, then X, Y, Z.
pub fn pauli_monomial(index: usize) -> [(usize, Complex64); 2] {
    match index {
        0 => [(0, ONE), (1, ONE)],
        1 => [(1, ONE), (0, ONE)],
        2 => [(1, -I), (0, I)],
        3 => [(0, ONE), (1, -ONE)],
        _ => panic!("Pauli index {index} out of range"),
    }
}

/// Single-qubit Pauli matrix (0 = identity, 1..=3 = X, Y, Z).
pub fn pauli(index: usize) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    for (row, (col, value)) in pauli_monomial(index).into_iter().enumerate() {
        m[(row, col)] = value;
    }
    m
}

/// Two-qubit Pauli string `σ_{index / 4} ⊗ σ_{index % 4}`.
pub fn pauli_pair(index: usize) -> CMatrix {
    assert!(index < 16, "two-qubit Pauli index {index} out of range");
    pauli(index / 4).kronecker(&pauli(index % 4))
}

/// Row-by-row `(column, value)` form of the two-qubit Pauli string `index`.
///
/// Each string is either purely real or purely imaginary, which the engine
/// exploits to work in real arithmetic.
pub fn pauli_pair_monomial(index: usize) -> [(usize, Complex64); 4] {
    let first = pauli_monomial(index / 4);
    let second = pauli_monomial(index % 4);
    let mut out = [(0, ZERO); 4];
    for (ra, &(ca, va)) in first.iter().enumerate() {
        for (rb, &(cb, vb)) in second.iter().enumerate() {
            out[2 * ra + rb] = (2 * ca + cb, va * vb);
        }
    }
    out
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Reduced operator on the subsystems with `keep[k] == true`.
///
/// `dims` lists the local dimensions in tensor order; the kept factors stay in
/// their original relative order.
pub fn partial_trace(rho: &CMatrix, dims: &[usize], keep: &[bool]) -> CMatrix {
    assert_eq!(dims.len(), keep.len());
    let total: usize = dims.iter().product();
    assert_eq!(rho.nrows(), total);
    assert_eq!(rho.ncols(), total);

    let kept_dim: usize = dims.iter().zip(keep).filter(|(_, &k)| k).map(|(d, _)| d).product();
    let traced_dim = total / kept_dim;

    // Split a full index into (kept, traced) indices.
    let split = |mut index: usize| {
        let (mut kept, mut traced) = (0, 0);
        let (mut kept_stride, mut traced_stride) = (1, 1);
        for (d, &k) in dims.iter().zip(keep).rev() {
            let digit = index % d;
            index /= d;
            if k {
                kept += digit * kept_stride;
                kept_stride *= d;
            } else {
                traced += digit * traced_stride;
                traced_stride *= d;
            }
        }
        (kept, traced)
    };

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    let parts: Vec<(usize, usize)> = (0..total).map(split).collect();
    for row in 0..total {
        let (kr, tr) = parts[row];
        for col in 0..total {
            let (kc, tc) = parts[col];
            if tr == tc {
                out[(kr, kc)] += rho[(row, col)];
            }
        }
    }
    debug_assert!(traced_dim >= 1);
    out
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |M - M†|`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending and
/// eigenvectors in the matching columns.
pub fn symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let dim = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Uses the real symmetric embedding `[[A, -B], [B, A]]` of `A + iB`, whose
/// spectrum is that of the Hermitian matrix with every eigenvalue doubled.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let embedded = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = m[(r % n, c % n)];
        // The Hermitian part keeps the embedding exactly symmetric.
        let w = m[(c % n, r % n)].conj();
        let z = (z + w) * 0.5;
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let (values, _) = symmetric_eigen(embedded);
    values.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let x = pauli(1);
        let y = pauli(2);
        let z = pauli(3);
        assert!(max_abs_diff(&(&x * &y), &(&z * I)) < 1e-15);
        for k in 1..4 {
            let p = pauli(k);
            assert!(max_abs_diff(&(&p * &p), &identity(2)) < 1e-15);
        }
    }

    #[test]
    fn monomial_matches_dense_pair() {
        for index in 0..16 {
            let dense = pauli_pair(index);
            let mut rebuilt = CMatrix::zeros(4, 4);
            for (row, (col, v)) in pauli_pair_monomial(index).into_iter().enumerate() {
                rebuilt[(row, col)] = v;
            }
            assert_eq!(dense, rebuilt, "pair {index}");
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let a = CMatrix::from_fn(2, 2, |r, c| Complex64::new((r + 2 * c) as f64, r as f64 - c as f64));
        let b = CMatrix::from_fn(3, 3, |r, c| Complex64::new(if r == c { 1.0 } else { 0.25 }, 0.0));
        let ab = a.kronecker(&b);
        let tr_b = trace(&b);
        let tr_a = trace(&a);
        assert!(max_abs_diff(&partial_trace(&ab, &[2, 3], &[true, false]), &(&a * tr_b)) < 1e-14);
        assert!(max_abs_diff(&partial_trace(&ab, &[2, 3], &[false, true]), &(&b * tr_a)) < 1e-14);
    }

    #[test]
    fn partial_trace_middle_factor() {
        let a = pauli(1);
        let b = pauli(3) + identity(2);
        let c = pauli(2);
        let abc = a.kronecker(&b).kronecker(&c);
        let expected = a.kronecker(&c) * Complex64::new(2.0, 0.0);
        assert!(max_abs_diff(&partial_trace(&abc, &[2, 2, 2], &[true, false, true]), &expected) < 1e-14);
    }

    #[test]
    fn hermitian_spectrum_via_embedding() {
        // σ_y has eigenvalues ±1.
        let values = hermitian_eigenvalues(&pauli(2));
        assert_eq!(values.len(), 2);
        assert!((values[0] + 1.0).abs() < 1e-14);
        assert!((values[1] - 1.0).abs() < 1e-14);
    }
}
