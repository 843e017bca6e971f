//! Truncated-SVD pseudo-inverse solve for ill-conditioned linear systems.
//!
//! Given A (real or complex), a right-hand side b, and a threshold ε > 0, the
//! solver keeps exactly the singular triplets with σ ≥ ε and discards the
//! rest: x_k = V Σ_k† Uᴴ b. Dropping the sub-threshold directions trades a
//! residual of order ε·‖x‖ for an enormous gain in stability when A's
//! trailing singular values are fueled by noise — the regime the power-basis
//! collocation systems of this crate live in.

use crate::numerics::{svd_double, Scalar};
use crate::{Error, Result};

/// Diagnostics of one truncated solve.
///
/// Invariants: `sigma_k ≥ eps ≥ sigma_k1` (with σ̂_{k+1} defined as 0 past the
/// end of the spectrum, and σ̂_0 as +∞ when everything was truncated), k ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsvdReport {
    /// Number of singular triplets kept.
    pub k: usize,
    /// Smallest kept singular value σ̂_k (+∞ when k = 0).
    pub sigma_k: f64,
    /// Largest discarded singular value σ̂_{k+1} (0 when nothing is left).
    pub sigma_k1: f64,
    /// ‖x̂_k‖₂.
    pub solution_norm: f64,
    /// ‖A·x̂_k − b‖₂.
    pub residual_norm: f64,
}

/// Solves A·x ≈ b by the k-truncated SVD pseudo-inverse, k = max{j : σ_j ≥ eps}
/// (ties at σ_j = eps are kept; k = 0 yields the zero vector).
pub fn tsvd_solve<T: Scalar>(a: &[Vec<T>], b: &[T], eps: f64) -> Result<(Vec<T>, TsvdReport)> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Parameter(format!(
            "tsvd_solve: threshold must be finite and positive, got {eps}"
        )));
    }
    if b.len() != a.len() {
        return Err(Error::Parameter(format!(
            "tsvd_solve: b has {} entries but A has {} rows",
            b.len(),
            a.len()
        )));
    }
    if b.iter().any(|x| !x.is_finite_scalar()) {
        return Err(Error::Parameter(
            "tsvd_solve: non-finite entry in b".into(),
        ));
    }
    let svd = svd_double(a)?;
    let n = a[0].len();
    let k = svd.s.iter().take_while(|s| **s >= eps).count();

    let mut x = vec![T::ZERO; n];
    for j in 0..k {
        // coefficient ⟨u_j, b⟩/σ_j
        let mut c = T::ZERO;
        for (up, bp) in svd.u[j].iter().zip(b) {
            c = c + up.conj() * *bp;
        }
        c = c.scale(1.0 / svd.s[j]);
        for (xi, vi) in x.iter_mut().zip(&svd.v[j]) {
            *xi = *xi + c * *vi;
        }
    }

    let solution_norm = norm2(&x);
    let mut residual = 0.0f64;
    for (row, bp) in a.iter().zip(b) {
        let mut acc = T::ZERO;
        for (ap, xp) in row.iter().zip(&x) {
            acc = acc + *ap * *xp;
        }
        let dev = (acc - *bp).modulus();
        residual += dev * dev;
    }
    let report = TsvdReport {
        k,
        sigma_k: if k > 0 { svd.s[k - 1] } else { f64::INFINITY },
        sigma_k1: svd.s.get(k).copied().unwrap_or(0.0),
        solution_norm,
        residual_norm: residual.sqrt(),
    };
    Ok((x, report))
}

fn norm2<T: Scalar>(v: &[T]) -> f64 {
    let mut acc = 0.0f64;
    for x in v {
        let m = x.modulus();
        acc += m * m;
    }
    acc.sqrt()
}
