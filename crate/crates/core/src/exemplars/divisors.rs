use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::gcd;

pub const MAX_ARGUMENT: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivisorIdentity {
    pub gcd: u64,
    pub lcm: u64,
    /// `lcm · gcd == p · q`, checked in integers.
    pub product_matches: bool,
    /// `|ln lcm − ln p − ln q + ln gcd|`
    pub log_residual: f64,
}

pub fn divisor_log_identity(p: u64, q: u64) -> Result<DivisorIdentity> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument("arguments must be positive".into()));
    }
    if p > MAX_ARGUMENT || q > MAX_ARGUMENT {
        return Err(Error::Range(format!(
            "arguments must not exceed 2^31, got ({p}, {q})"
        )));
    }
    let g = gcd(p, q);
    let l = p / g * q;
    let product_matches = u128::from(l) * u128::from(g) == u128::from(p) * u128::from(q);
    let ln = |x: u64| (x as f64).ln();
    let log_residual = ((ln(l) + ln(g)) - (ln(p) + ln(q))).abs();
    Ok(DivisorIdentity {
        gcd: g,
        lcm: l,
        product_matches,
        log_residual,
    })
}
