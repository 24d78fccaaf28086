//! Overflow-checked `i128` for the dense integer coefficient layer.
//!
//! The hot paths (representation matrices, Gauss sums) work over cyclic
//! integer polynomials whose coefficients are bounded well below 2^120 for
//! every operation this crate performs; an overflow therefore signals a bug,
//! not a data-dependent condition, and panics with a recognizable message.

use num::{One, Zero};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Hash)]
pub struct C128(pub i128);

const OVERFLOW: &str = "exact integer layer overflow (i128)";

impl Add for C128 {
    type Output = C128;
    fn add(self, rhs: C128) -> C128 {
        C128(self.0.checked_add(rhs.0).expect(OVERFLOW))
    }
}

impl Sub for C128 {
    type Output = C128;
    fn sub(self, rhs: C128) -> C128 {
        C128(self.0.checked_sub(rhs.0).expect(OVERFLOW))
    }
}

impl Mul for C128 {
    type Output = C128;
    fn mul(self, rhs: C128) -> C128 {
        C128(self.0.checked_mul(rhs.0).expect(OVERFLOW))
    }
}

impl Neg for C128 {
    type Output = C128;
    fn neg(self) -> C128 {
        C128(self.0.checked_neg().expect(OVERFLOW))
    }
}

impl AddAssign for C128 {
    fn add_assign(&mut self, rhs: C128) {
        self.0 = self.0.checked_add(rhs.0).expect(OVERFLOW);
    }
}

impl SubAssign for C128 {
    fn sub_assign(&mut self, rhs: C128) {
        self.0 = self.0.checked_sub(rhs.0).expect(OVERFLOW);
    }
}

impl Zero for C128 {
    fn zero() -> Self {
        C128(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for C128 {
    fn one() -> Self {
        C128(1)
    }
}

impl From<i64> for C128 {
    fn from(v: i64) -> Self {
        C128(v as i128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_i128() {
        assert_eq!((C128(7) * C128(-3) + C128(1)).0, -20);
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn multiplication_overflow_panics() {
        let big = C128(1 << 100);
        let _ = big * big;
    }
}
