//! Dense symmetric eigensolver: cyclic Jacobi rotations at extended precision.

use crate::mp::{big_i, Big};
use crate::{Error, Result};
use rug::ops::CompleteRound;

/// Eigendecomposition of a symmetric matrix: eigenvalues descending, columns of
/// `eigenvectors` orthonormal and aligned with `eigenvalues` by index.
#[derive(Debug, Clone)]
pub struct SymEigResult {
    pub eigenvalues: Vec<Big>,
    /// `eigenvectors[i]` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<Big>>,
}

fn check_symmetric(s: &[Vec<Big>], bits: u32) -> Result<usize> {
    let n = s.len();
    if n == 0 || s.iter().any(|row| row.len() != n) {
        return Err(Error::Parameter("sym_eig: matrix must be square and nonempty".into()));
    }
    let mut scale = big_i(bits, 0);
    for row in s {
        for e in row {
            let a = e.clone().abs();
            if a > scale {
                scale = a;
            }
        }
    }
    // Asymmetry tolerance: half the working precision, relative to the largest entry.
    let mut tol = scale.clone();
    tol >>= bits / 2;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (&s[i][j] - &s[j][i]).complete(bits).abs();
            if d > tol {
                return Err(Error::Parameter(format!(
                    "sym_eig: entries ({i},{j}) and ({j},{i}) differ beyond tolerance"
                )));
            }
        }
    }
    Ok(n)
}

/// Sum of squares of the strict upper triangle (convergence measure).
fn off_norm2(a: &[Vec<Big>], bits: u32) -> Big {
    let n = a.len();
    let mut acc = big_i(bits, 0);
    for i in 0..n {
        for j in (i + 1)..n {
            acc += (&a[i][j] * &a[i][j]).complete(bits);
        }
    }
    acc
}

fn jacobi(s: &[Vec<Big>], with_vectors: bool) -> Result<(Vec<Big>, Option<Vec<Vec<Big>>>)> {
    let bits = s[0][0].prec();
    let n = check_symmetric(s, bits)?;
    let mut a: Vec<Vec<Big>> = s.to_vec();
    let mut v: Option<Vec<Vec<Big>>> = with_vectors.then(|| {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| big_i(bits, (i == j) as i64))
                    .collect()
            })
            .collect()
    });

    let norm2 = {
        let mut acc = big_i(bits, 0);
        for row in &a {
            for e in row {
                acc += (e * e).complete(bits);
            }
        }
        acc
    };
    // Converged when off(A)² ≤ ‖A‖_F² · 2^(−2·(bits−6)).
    let mut stop = norm2;
    stop >>= 2 * (bits - 6);
    // Rotations below this size cannot affect the result; skipping them keeps
    // the sweep count finite in exact arithmetic corner cases.
    let mut one = big_i(bits, 1);
    one >>= 4 * bits;
    let skip_tiny = one;

    let max_sweeps = 50;
    for _sweep in 0..max_sweeps {
        if off_norm2(&a, bits) <= stop {
            let (vals, vecs) = sort_descending(a, v, bits, n);
            return Ok((vals, vecs));
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p][q].clone();
                if apq.clone().abs() <= skip_tiny {
                    continue;
                }
                // Symmetric Schur rotation annihilating a_pq.
                let tau: Big = ((&a[q][q] - &a[p][p]).complete(bits)) / (apq.clone() * 2u32);
                let t = {
                    let mut den = (&tau * &tau).complete(bits);
                    den += 1;
                    den = den.sqrt();
                    den += tau.clone().abs();
                    let t = den.recip();
                    if tau < 0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = {
                    let mut c2 = (&t * &t).complete(bits);
                    c2 += 1;
                    c2.sqrt().recip()
                };
                let srot = (&t * &c).complete(bits);

                // Diagonal and pivot updates.
                let tapq = (&t * &apq).complete(bits);
                a[p][p] -= &tapq;
                a[q][q] += &tapq;
                a[p][q] = big_i(bits, 0);
                a[q][p] = big_i(bits, 0);
                // Rows/columns k ≠ p, q.
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k][p].clone();
                    let akq = a[k][q].clone();
                    let mut np = (&c * &akp).complete(bits);
                    np -= (&srot * &akq).complete(bits);
                    let mut nq = (&srot * &akp).complete(bits);
                    nq += (&c * &akq).complete(bits);
                    a[k][p] = np.clone();
                    a[p][k] = np;
                    a[k][q] = nq.clone();
                    a[q][k] = nq;
                }
                if let Some(vm) = v.as_mut() {
                    for row in vm.iter_mut() {
                        let vp = row[p].clone();
                        let vq = row[q].clone();
                        let mut np = (&c * &vp).complete(bits);
                        np -= (&srot * &vq).complete(bits);
                        let mut nq = (&srot * &vp).complete(bits);
                        nq += (&c * &vq).complete(bits);
                        row[p] = np;
                        row[q] = nq;
                    }
                }
            }
        }
    }
    Err(Error::Precision(
        "sym_eig: Jacobi sweeps did not converge; raise working precision".into(),
    ))
}

fn sort_descending(
    a: Vec<Vec<Big>>,
    v: Option<Vec<Vec<Big>>>,
    _bits: u32,
    n: usize,
) -> (Vec<Big>, Option<Vec<Vec<Big>>>) {
    let mut order: Vec<usize> = (0..n).collect();
    // Stable by construction: ties keep the lower original index first.
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let vals = order.iter().map(|&i| a[i][i].clone()).collect();
    let vecs = v.map(|vm| {
        order
            .iter()
            .map(|&col| vm.iter().map(|row| row[col].clone()).collect())
            .collect()
    });
    (vals, vecs)
}

/// Full eigendecomposition of a symmetric matrix of `Big` values.
///
/// Eigenvalues are returned in descending order with orthonormal eigenvectors;
/// the rotation order is fixed, so results are deterministic at fixed precision.
pub fn sym_eig(s: &[Vec<Big>]) -> Result<SymEigResult> {
    let (vals, vecs) = jacobi(s, true)?;
    Ok(SymEigResult {
        eigenvalues: vals,
        eigenvectors: vecs.expect("vectors requested"),
    })
}

/// Eigenvalues only (descending). Roughly a third cheaper than `sym_eig`; used
/// for mesh-refinement cross-checks where eigenvectors are not needed.
pub fn sym_eig_values(s: &[Vec<Big>]) -> Result<Vec<Big>> {
    Ok(jacobi(s, false)?.0)
}
