//! Bracketed bisection shared by the scalar root finders.

use crate::error::{Error, Result};

/// Bisect `f` on `[lo, hi]` down to adjacent floating-point values.
///
/// The bracket must have `f(lo) < 0 < f(hi)` or `f(lo) > 0 > f(hi)`; the sign
/// pattern is checked rather than assumed.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo.signum() * f_hi.signum() < 0.0) {
        return Err(Error::DomainError(format!(
            "root not bracketed: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}"
        )));
    }
    let rising = f_lo < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if (v < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if f(lo).abs() <= f(hi).abs() { lo } else { hi })
}
