//! Principal-branch complex powers z^t with a normalized real lane.
//!
//! One code path serves both real points and genuine arc points: a real input
//! (imaginary part exactly zero, of either sign) is routed through a literal
//! zero imaginary part, so a degenerate arc reproduces the real computation
//! bit for bit — products and sums downstream see identical operands.

use crate::{Error, Result};
use num_complex::Complex64;

/// Principal logarithm. The imaginary part of the logarithm of a positive
/// real input is normalized to +0 regardless of the sign of the input's zero
/// imaginary part, keeping downstream trigonometry sign-stable.
pub(crate) fn principal_log(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        if z.re > 0.0 {
            return Ok(Complex64::new(z.re.ln(), 0.0));
        }
        return Err(Error::Branch(format!(
            "principal power at z = {} on the branch cut (negative real axis)",
            z.re
        )));
    }
    Ok(Complex64::new(z.norm().ln(), z.im.atan2(z.re)))
}

/// e^w computed as e^re·(cos im, sin im). For im = +0 this yields exactly
/// (e^re, +0), which is what keeps the real lane bitwise clean.
pub(crate) fn cexp(w: Complex64) -> Complex64 {
    let r = w.re.exp();
    Complex64::new(r * w.im.cos(), r * w.im.sin())
}

/// z^t on the principal branch, with the convention 0^t := 0 (callers only
/// pass t > 0).
pub(crate) fn pow_ct(z: Complex64, t: f64) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let l = principal_log(z)?;
    Ok(pow_from_log(l, t))
}

/// z^t = e^{t·log z} from a precomputed principal logarithm, for evaluating
/// many exponents at one point.
pub(crate) fn pow_from_log(l: Complex64, t: f64) -> Complex64 {
    cexp(Complex64::new(t * l.re, t * l.im))
}
