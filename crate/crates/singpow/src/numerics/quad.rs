//! Gauss-Legendre quadrature at extended precision.

use crate::mp::{big, big_i, Big};
use crate::{Error, Result};
use rug::ops::CompleteRound;

/// A quadrature rule on (lo, hi): strictly increasing interior nodes with
/// strictly positive weights summing to hi−lo.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<Big>,
    pub weights: Vec<Big>,
    pub lo: f64,
    pub hi: f64,
}

/// Legendre P_n(x) and P'_n(x) by the three-term recurrence.
fn legendre_pair(n: usize, x: &Big, bits: u32) -> (Big, Big) {
    let mut p_prev = big_i(bits, 1); // P_0
    let mut p = x.clone(); // P_1
    if n == 0 {
        return (p_prev, big_i(bits, 0));
    }
    for k in 1..n {
        // (k+1) P_{k+1} = (2k+1) x P_k − k P_{k−1}
        let mut next = (x * &p).complete(bits);
        next *= 2 * k as i64 + 1;
        next -= (&p_prev * (k as i64)).complete(bits);
        next /= k as i64 + 1;
        p_prev = std::mem::replace(&mut p, next);
    }
    // P'_n(x) = n (x P_n − P_{n−1}) / (x² − 1)
    let mut num = (x * &p).complete(bits);
    num -= &p_prev;
    num *= n as i64;
    let mut den = (x * x).complete(bits);
    den -= 1;
    (p.clone(), num / den)
}

/// Gauss-Legendre rule with `n` points on [lo, hi], computed at `bits` working
/// precision. Nodes are refined by Newton iteration on P_n from Chebyshev-type
/// initial guesses; the iteration is deterministic at fixed precision.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64, bits: u32) -> Result<QuadRule> {
    if n < 1 {
        return Err(Error::Parameter("gauss_legendre: n must be >= 1".into()));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Parameter(format!(
            "gauss_legendre: degenerate interval [{lo}, {hi}]"
        )));
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    // Newton converges quadratically from the Chebyshev guess; stop once the
    // update is below the relative tail of the working precision.
    let tol = {
        let mut t = big_i(bits, 1);
        t >>= bits.saturating_sub(16);
        t
    };
    for k in 0..n {
        let guess = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = big(bits, guess);
        for _ in 0..40 {
            let (p, d) = legendre_pair(n, &x, bits);
            let step = p / d;
            let done = {
                let bound = (tol.clone() * x.clone().abs()).max(&tol);
                step.clone().abs() <= bound
            };
            x -= &step;
            if done {
                break;
            }
        }
        // Refresh P'_n at the converged node so the weight carries full precision.
        let (_, dp) = legendre_pair(n, &x, bits);
        // w = 2 / ((1 − x²) P'_n(x)²) on [−1, 1]
        let mut one_mx2 = (&x * &x).complete(bits);
        one_mx2 = big_i(bits, 1) - one_mx2;
        let mut w = (&dp * &dp).complete(bits);
        w *= one_mx2;
        let w = big_i(bits, 2) / w;
        nodes.push(x);
        weights.push(w);
    }
    // The cosine guesses run right-to-left; flip to ascending order.
    nodes.reverse();
    weights.reverse();
    // Affine map [−1, 1] -> [lo, hi].
    let half = big(bits, 0.5 * (hi - lo));
    let mid = big(bits, 0.5 * (hi + lo));
    for x in nodes.iter_mut() {
        *x *= &half;
        *x += &mid;
    }
    for w in weights.iter_mut() {
        *w *= &half;
    }
    Ok(QuadRule {
        nodes,
        weights,
        lo,
        hi,
    })
}

impl QuadRule {
    /// Σ w_i f(x_i).
    pub fn integrate(&self, bits: u32, mut f: impl FnMut(&Big) -> Big) -> Big {
        let mut acc = big_i(bits, 0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(x) * w;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::{bits_for_digits, pow10};
    use rug::ops::Pow;

    #[test]
    fn one_point_rule_is_midpoint() {
        let r = gauss_legendre(1, -1.0, 1.0, 192).unwrap();
        assert_eq!(r.nodes.len(), 1);
        assert!(r.nodes[0].clone().abs().to_f64() < 1e-50);
        assert!((r.weights[0].to_f64() - 2.0).abs() < 1e-50);
    }

    #[test]
    fn two_point_rule_hits_legendre_roots() {
        let r = gauss_legendre(2, -1.0, 1.0, 192).unwrap();
        let target = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0].to_f64() + target).abs() < 1e-15);
        assert!((r.nodes[1].to_f64() - target).abs() < 1e-15);
        assert!((r.weights[0].to_f64() - 1.0).abs() < 1e-15);
        assert!((r.weights[1].to_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sixteen_points_integrate_t20_on_unit_interval() {
        // ∫₀¹ t²⁰ dt = 1/21, and a 16-point rule (exact through degree 31)
        // must reproduce it to well below 1e-30 at 60-digit precision.
        let bits = bits_for_digits(60);
        let r = gauss_legendre(16, 0.0, 1.0, bits).unwrap();
        let got = r.integrate(bits, |x| x.clone().pow(20u32));
        let want = big_i(bits, 1) / big_i(bits, 21);
        let err = (got - want).abs();
        assert!(err < pow10(bits, -30), "error {:e}", err.to_f64());
    }

    #[test]
    fn exactness_through_degree_2n_minus_1() {
        let bits = bits_for_digits(60);
        let n = 12;
        let r = gauss_legendre(n, 0.0, 1.0, bits).unwrap();
        for deg in [0usize, 7, 15, 23] {
            let got = r.integrate(bits, |x| x.clone().pow(deg as u32));
            let want = big_i(bits, 1) / big_i(bits, deg as i64 + 1);
            let rel = ((got - &want) / want).abs();
            assert!(rel < pow10(bits, -55), "degree {deg}: rel {:e}", rel.to_f64());
        }
    }

    #[test]
    fn weights_positive_nodes_increasing_interior() {
        let bits = 256;
        let r = gauss_legendre(40, 0.0, 1.0, bits).unwrap();
        let mut sum = big_i(bits, 0);
        for i in 0..40 {
            assert!(r.weights[i] > 0);
            assert!(r.nodes[i] > 0 && r.nodes[i] < 1);
            if i > 0 {
                assert!(r.nodes[i] > r.nodes[i - 1]);
            }
            sum += &r.weights[i];
        }
        assert!((sum - 1u32).abs() < pow10(bits, -70));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_legendre(0, 0.0, 1.0, 128).is_err());
        assert!(gauss_legendre(4, 1.0, 1.0, 128).is_err());
        assert!(gauss_legendre(4, 2.0, 1.0, 128).is_err());
    }
}
