//! Exact rational helpers on top of `num::BigRational`.
//!
//! Canonical text form is `"a/b"` with `b > 0` and `gcd(a, b) = 1`; the
//! denominator is always written, so round trips are byte-stable.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::str::FromStr;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"a/b"` or a bare integer `"a"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    Rat::from_str(s.trim()).map_err(|e| Error::invalid(format!("rational `{s}`: {e}")))
}

/// Formats with an explicit denominator, e.g. `3 -> "3/1"`.
pub fn fmt_rat(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Representative of `q` modulo 1 lying in `[0, 1)`.
pub fn frac_mod1(q: &Rat) -> Rat {
    let f = q.fract();
    if f.is_negative() {
        f + Rat::one()
    } else {
        f
    }
}

pub fn is_int(q: &Rat) -> bool {
    q.denom().is_one()
}

/// Denominator as `u64`; the forms in scope keep these far below that range.
pub fn denom_u64(q: &Rat) -> u64 {
    use num::ToPrimitive;
    q.denom().to_u64().expect("denominator exceeds u64")
}

pub fn rat_is_zero(q: &Rat) -> bool {
    q.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        assert_eq!(fmt_rat(&parse_rat("3/4").unwrap()), "3/4");
        assert_eq!(fmt_rat(&parse_rat("7").unwrap()), "7/1");
        assert_eq!(fmt_rat(&parse_rat("-6/8").unwrap()), "-3/4");
        assert_eq!(fmt_rat(&parse_rat("0/5").unwrap()), "0/1");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn frac_mod1_lands_in_unit_interval() {
        assert_eq!(frac_mod1(&rat(7, 4)), rat(3, 4));
        assert_eq!(frac_mod1(&rat(-1, 3)), rat(2, 3));
        assert_eq!(frac_mod1(&rat(-8, 4)), rat(0, 1));
        assert_eq!(frac_mod1(&rat(5, 1)), rat(0, 1));
    }
}
