use crate::specfun::{with_precision, Mp};
use crate::{Error, Result};

pub(crate) const MAX_BITS: u32 = 32_768;

/// Evaluates `f` at increasing MPFR precision until two successive results
/// agree to `rel_tol` (or to `abs_floor` in absolute terms).
pub(crate) fn converge(start_bits: u32, rel_tol: f64, abs_floor: f64, f: impl Fn() -> Mp) -> Result<f64> {
    let mut bits = start_bits.clamp(64, MAX_BITS);
    let mut previous: Option<f64> = None;
    loop {
        let value = with_precision(bits, || crate::specfun::Real::to_f64(&f()));
        if let Some(prev) = previous {
            if value.is_finite() && (value - prev).abs() <= (rel_tol * value.abs()).max(abs_floor) {
                return Ok(value);
            }
        }
        if bits >= MAX_BITS {
            return Err(Error::IllConditioned {
                precision_bits: bits,
                previous: previous.unwrap_or(f64::NAN),
                last: value,
            });
        }
        previous = Some(value);
        bits = (bits + (bits / 2).max(64)).min(MAX_BITS);
    }
}
