//! Generic kernels for cyclic polynomial arithmetic mod `x^m - 1` and
//! canonical reduction mod `Phi_m`, shared by the rational, i128 and BigInt
//! coefficient layers.

use num::{One, Zero};
use std::ops::{AddAssign, Mul, Sub, SubAssign};

pub trait Coeff:
    Clone + Zero + One + AddAssign + SubAssign + Sub<Output = Self> + Mul<Output = Self>
{
    fn from_i64(v: i64) -> Self;
}

impl Coeff for super::checked::C128 {
    fn from_i64(v: i64) -> Self {
        Self::from(v)
    }
}

impl Coeff for num::BigInt {
    fn from_i64(v: i64) -> Self {
        num::BigInt::from(v)
    }
}

impl Coeff for num::BigRational {
    fn from_i64(v: i64) -> Self {
        num::BigRational::from_integer(num::BigInt::from(v))
    }
}

/// Cyclic convolution mod `x^m - 1`; inputs must both have length `m`.
/// Skips zero coefficients, so sparse operands cost what they should.
pub fn conv_cyclic<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    let m = a.len();
    assert_eq!(b.len(), m);
    let mut out = vec![T::zero(); m];
    // Drive the loop from the sparser operand.
    let nz = |v: &[T]| v.iter().filter(|c| !c.is_zero()).count();
    let (lead, other) = if nz(a) <= nz(b) { (a, b) } else { (b, a) };
    for (i, ci) in lead.iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        for (j, cj) in other.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let k = (i + j) % m;
            out[k] += ci.clone() * cj.clone();
        }
    }
    out
}

/// Adds `scale * x^shift * b` into `acc`, cyclically.
pub fn add_shifted<T: Coeff>(acc: &mut [T], b: &[T], shift: usize, scale: &T) {
    let m = acc.len();
    for (j, cj) in b.iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        let k = (j + shift) % m;
        acc[k] += scale.clone() * cj.clone();
    }
}

/// In-place canonical reduction mod `Phi_m` (constant-first, monic).
/// Afterwards every coefficient at index >= deg(Phi_m) is zero.
pub fn reduce_mod_phi<T: Coeff>(c: &mut [T], phi: &[i64]) {
    let deg = phi.len() - 1;
    for i in (deg..c.len()).rev() {
        if c[i].is_zero() {
            continue;
        }
        let lead = std::mem::replace(&mut c[i], T::zero());
        // Subtract lead * x^(i-deg) * Phi; the monic top cancels c[i].
        for (j, &pc) in phi.iter().enumerate().take(deg) {
            if pc == 0 {
                continue;
            }
            c[i - deg + j] -= lead.clone() * T::from_i64(pc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::checked::C128;
    use crate::exactnum::cyclo::cyclotomic_poly;

    fn c(v: &[i64]) -> Vec<C128> {
        v.iter().map(|&x| C128(x as i128)).collect()
    }

    #[test]
    fn convolution_wraps_cyclically() {
        // (1 + x^3) * x^2 mod x^4 - 1 = x^2 + x^5 = x + x^2
        let a = c(&[1, 0, 0, 1]);
        let b = c(&[0, 0, 1, 0]);
        assert_eq!(conv_cyclic(&a, &b), c(&[0, 1, 1, 0]));
    }

    #[test]
    fn reduction_kills_high_powers() {
        // zeta_4^2 = -1: x^2 mod Phi_4 = x^2 + 1 gives -1.
        let mut v = c(&[0, 0, 1, 0]);
        reduce_mod_phi(&mut v, &cyclotomic_poly(4));
        assert_eq!(v, c(&[-1, 0, 0, 0]));

        // zeta_3^2 = -1 - zeta_3.
        let mut w = c(&[0, 0, 1]);
        reduce_mod_phi(&mut w, &cyclotomic_poly(3));
        assert_eq!(w, c(&[-1, -1, 0]));
    }

    #[test]
    fn sum_of_all_roots_of_unity_vanishes() {
        for m in [3usize, 4, 6, 8, 12] {
            let mut v = c(&vec![1; m]);
            reduce_mod_phi(&mut v, &cyclotomic_poly(m as u32));
            assert!(v.iter().all(|x| x.is_zero()), "m = {m}");
        }
    }
}
