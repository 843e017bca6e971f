//! Extended-precision scalar plumbing.
//!
//! `Big` is an arbitrary-precision binary float. Precision is carried by each
//! value (every constructor takes a bit count), arithmetic is deterministic at
//! fixed precision, and conversion to `f64` rounds to nearest.

pub use rug::Float as Big;
use rug::ops::CompleteRound;

/// Bits needed to represent `digits` decimal digits, plus guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

/// Inverse of [`bits_for_digits`]: the decimal-digit count a precision
/// produced by that helper corresponds to.
pub fn digits_for_bits(bits: u32) -> u32 {
    ((bits.saturating_sub(8)) as f64 / std::f64::consts::LOG2_10).round() as u32
}

/// A new `Big` with the given bit precision and `f64` value.
pub fn big(bits: u32, v: f64) -> Big {
    Big::with_val(bits, v)
}

/// A new `Big` from an integer.
pub fn big_i(bits: u32, v: i64) -> Big {
    Big::with_val(bits, v)
}

/// 10^exp at the given precision (exp may be negative).
pub fn pow10(bits: u32, exp: i64) -> Big {
    let p = Big::with_val(bits, rug::Float::i_pow_u(10, exp.unsigned_abs() as u32));
    if exp < 0 {
        p.recip()
    } else {
        p
    }
}

/// Dot product Σ x_i·y_i at the precision of the accumulator.
pub fn dot(bits: u32, xs: &[Big], ys: &[Big]) -> Big {
    debug_assert_eq!(xs.len(), ys.len());
    let mut acc = Big::with_val(bits, 0);
    for (x, y) in xs.iter().zip(ys) {
        acc += (x * y).complete(bits);
    }
    acc
}
