//! Rational-approximation screens for rotation parameters.

use crate::error::{Error, Result};
use crate::measures::circle_dist;

/// Largest denominator screened by [`check_irrational`].
pub const MAX_DENOMINATOR: u64 = 1_000_000;
const RATIONAL_TOL: f64 = 1e-14;

/// Rejects `alpha` if it lies within 1e-14 of a rational `p/q` with `q <= 1e6`.
///
/// Any such rational is a continued-fraction convergent of `alpha`, so only
/// convergents are examined.
pub fn check_irrational(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::invalid("rotation number must be finite"));
    }
    if let Some((p, q)) = rational_witness(alpha) {
        return Err(Error::invalid(format!(
            "rotation number {alpha} is numerically rational ({p}/{q})"
        )));
    }
    Ok(())
}

fn rational_witness(alpha: f64) -> Option<(i64, u64)> {
    let (mut h0, mut h1) = (1i64, alpha.floor() as i64);
    let (mut k0, mut k1) = (0u64, 1u64);
    let mut rest = alpha - alpha.floor();
    loop {
        if (alpha - h1 as f64 / k1 as f64).abs() < RATIONAL_TOL {
            return Some((h1, k1));
        }
        if rest < 1e-300 {
            return None;
        }
        let inv = 1.0 / rest;
        let a = inv.floor();
        rest = inv - a;
        if a > MAX_DENOMINATOR as f64 {
            return None;
        }
        let a = a as u64;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DENOMINATOR {
            return None;
        }
        let h2 = (a as i64).checked_mul(h1)?.checked_add(h0)?;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
}

/// Smallest nonzero `(a, b)` with `|a|, |b| <= bound` and
/// `dist(a x + b y, Z) <= tol`, if any.
pub fn integer_relation(x: f64, y: f64, bound: i64, tol: f64) -> Option<(i64, i64)> {
    for a in 0..=bound {
        let lo = if a == 0 { 1 } else { -bound };
        for b in lo..=bound {
            if circle_dist(a as f64 * x + b as f64 * y) <= tol {
                return Some((a, b));
            }
        }
    }
    None
}
