//! Bracketed root finding for smooth scalar functions at extended precision.

use crate::mp::{digits_for_bits, Big};
use crate::{Error, Result};

/// All roots of `f` on `(lo, hi)` when the caller knows how many there are.
///
/// The interval is scanned on a uniform mesh of `100·max(expected, 1)` points
/// for sign changes; the mesh is doubled (up to six times) if fewer brackets
/// than `expected` turn up. Each bracket is then refined by pure bisection to
/// relative tolerance `1e-(digits-10)`, where `digits` is the decimal
/// precision implied by `lo`. Finding more sign changes than `expected`, or
/// fewer even on the finest mesh, is a root-count error.
///
/// The returned roots are strictly increasing, and the whole procedure is
/// deterministic: identical inputs give bitwise-identical outputs.
pub fn find_roots<F>(f: F, lo: &Big, hi: &Big, expected: usize) -> Result<Vec<Big>>
where
    F: Fn(&Big) -> Big,
{
    let bits = lo.prec();
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::Parameter(
            "find_roots: need finite lo < hi".into(),
        ));
    }
    if expected == 0 {
        return Ok(Vec::new());
    }

    let base_mesh = 100 * expected;
    let mut mesh = base_mesh;
    for refinement in 0..=6 {
        let brackets = scan(&f, lo, hi, mesh, bits)?;
        let count = brackets.len();
        if count > expected {
            return Err(Error::RootCount(format!(
                "find_roots: {count} sign changes on a {mesh}-point mesh, expected {expected}"
            )));
        }
        if count == expected {
            let mut roots = Vec::with_capacity(expected);
            for b in brackets {
                roots.push(match b {
                    Bracket::Exact(x) => x,
                    Bracket::Change(a, b, fa_neg) => bisect(&f, a, b, fa_neg, bits),
                });
            }
            return Ok(roots);
        }
        if refinement < 6 {
            mesh *= 2;
        }
    }
    Err(Error::RootCount(format!(
        "find_roots: fewer than {expected} sign changes even on a {mesh}-point mesh"
    )))
}

enum Bracket {
    /// The mesh landed on an exact zero.
    Exact(Big),
    /// Sign change on (a, b); the flag records whether f(a) < 0.
    Change(Big, Big, bool),
}

fn scan<F>(f: &F, lo: &Big, hi: &Big, mesh: usize, bits: u32) -> Result<Vec<Bracket>>
where
    F: Fn(&Big) -> Big,
{
    let width = Big::with_val(bits, hi - lo);
    let mut brackets = Vec::new();
    let mut prev_x: Option<Big> = None;
    let mut prev_sign = 0i8;
    for k in 0..=mesh {
        let mut x = Big::with_val(bits, &width);
        x *= k as u32;
        x /= mesh as u32;
        x += lo;
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::Parameter(format!(
                "find_roots: non-finite function value at x = {}",
                x.to_f64()
            )));
        }
        let sign = if v.is_zero() {
            0
        } else if v.is_sign_negative() {
            -1
        } else {
            1
        };
        if sign == 0 {
            brackets.push(Bracket::Exact(x.clone()));
        } else if prev_sign != 0 && sign != prev_sign {
            let a = prev_x.clone().expect("previous point recorded");
            brackets.push(Bracket::Change(a, x.clone(), prev_sign < 0));
        }
        prev_sign = sign;
        prev_x = Some(x);
    }
    Ok(brackets)
}

fn bisect<F>(f: &F, mut a: Big, mut b: Big, fa_neg: bool, bits: u32) -> Big
where
    F: Fn(&Big) -> Big,
{
    let digits = digits_for_bits(bits);
    let rel_tol = crate::mp::pow10(bits, -(digits.saturating_sub(10) as i64));
    // Width halves every step, so `bits + 64` steps reach ulp scale even if
    // the relative test never triggers (e.g. a root at 0).
    for _ in 0..(bits + 64) {
        let mut scale = a.clone().abs();
        let b_abs = b.clone().abs();
        if b_abs > scale {
            scale = b_abs;
        }
        let gap = Big::with_val(bits, &b - &a);
        if gap <= Big::with_val(bits, &rel_tol * &scale) {
            break;
        }
        let mut mid = Big::with_val(bits, &a + &b);
        mid /= 2u32;
        if mid <= a || mid >= b {
            break; // interval no longer splittable at this precision
        }
        let v = f(&mid);
        if v.is_zero() {
            return mid;
        }
        if v.is_sign_negative() == fa_neg {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mut mid = Big::with_val(bits, &a + &b);
    mid /= 2u32;
    mid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::{big, bits_for_digits};

    #[test]
    fn cosine_roots_on_one_period() {
        let bits = bits_for_digits(60);
        let two_pi = Big::with_val(bits, rug::float::Constant::Pi) * 2u32;
        let roots = find_roots(
            |x| x.clone().cos(),
            &big(bits, 0.0),
            &Big::with_val(bits, &two_pi),
            2,
        )
        .unwrap();
        let half_pi = Big::with_val(bits, &two_pi) / 4u32;
        let d0 = Big::with_val(bits, &roots[0] - &half_pi).abs();
        let d1 = Big::with_val(bits, &roots[1] - Big::with_val(bits, &half_pi * 3u32)).abs();
        let tol = crate::mp::pow10(bits, -45);
        assert!(d0 < tol, "root 0 off by {}", d0.to_f64());
        assert!(d1 < tol, "root 1 off by {}", d1.to_f64());
    }

    #[test]
    fn degree_two_legendre_roots() {
        let bits = bits_for_digits(60);
        // P₂(x) = (3x² − 1)/2 has roots ±1/√3.
        let p2 = |x: &Big| {
            let mut v = Big::with_val(bits, x * x);
            v *= 3u32;
            v -= 1u32;
            v / 2u32
        };
        let roots = find_roots(p2, &big(bits, -1.0), &big(bits, 1.0), 2).unwrap();
        let r = Big::with_val(bits, 3u32).sqrt().recip();
        let tol = crate::mp::pow10(bits, -45);
        assert!(Big::with_val(bits, &roots[0] + &r).abs() < tol);
        assert!(Big::with_val(bits, &roots[1] - &r).abs() < tol);
    }

    #[test]
    fn missing_roots_is_an_error() {
        let bits = bits_for_digits(40);
        let err = find_roots(
            |x| Big::with_val(bits, x * x) + 1u32,
            &big(bits, 0.0),
            &big(bits, 1.0),
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::RootCount(_)));
    }

    #[test]
    fn surplus_roots_is_an_error() {
        let bits = bits_for_digits(40);
        // sin(5πx) crosses zero at x = 0.2, 0.4, 0.6, 0.8 inside (0,1).
        let five_pi = Big::with_val(bits, rug::float::Constant::Pi) * 5u32;
        let err = find_roots(
            |x| Big::with_val(bits, x * &five_pi).sin(),
            &big(bits, 1e-3),
            &big(bits, 0.999),
            2,
        )
        .unwrap_err();
        assert!(matches!(err, Error::RootCount(_)));
    }

    #[test]
    fn deterministic_output() {
        let bits = bits_for_digits(50);
        let run = || {
            find_roots(
                |x| x.clone().sin(),
                &big(bits, 1.0),
                &big(bits, 4.0),
                1,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a[0], b[0]);
        assert_eq!(a[0].prec(), b[0].prec());
    }

    #[test]
    fn zero_expected_returns_empty() {
        let bits = bits_for_digits(40);
        let r = find_roots(|x| x.clone(), &big(bits, 1.0), &big(bits, 2.0), 0).unwrap();
        assert!(r.is_empty());
    }
}
