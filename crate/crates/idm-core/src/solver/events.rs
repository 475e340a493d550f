//! Root location on scalar event functions.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LocateError {
    #[error("event function does not change sign over the bracket")]
    NoSignChange,
}

/// Locate a root of `f` inside `bracket` by bisection, to within `tol` in
/// the abscissa.
///
/// Requires `f(lo) * f(hi) <= 0`. If `f(lo) == 0` the left endpoint is
/// returned (leftmost convention, which also covers an identically zero
/// function).
pub fn locate_event<F>(f: F, bracket: (f64, f64), tol: f64) -> Result<f64, LocateError>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = bracket;
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_lo * f_hi > 0.0 {
        return Err(LocateError::NoSignChange);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket already at floating-point resolution
        }
        let f_mid = f(mid);
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
