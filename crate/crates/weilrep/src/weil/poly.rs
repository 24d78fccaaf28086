//! Scaled integer-polynomial vectors and matrices.
//!
//! Generator matrices have entries of the form `scale * zeta^k` with a scale
//! shared across the whole matrix, so words act on vectors by index shifts
//! and accumulations over `Z[x]/(x^M - 1)` with `i128` coefficients. The
//! shared `CycNumber` scale absorbs the `1/sqrt(|D|)` normalizations; the
//! coefficient layer stays integral and overflow-checked.
//!
//! Semantic equality clears both scales to integer polynomials and compares
//! mod `Phi_M`, so representatives produced along different letter paths
//! compare correctly.

use crate::exactnum::{
    checked::C128,
    cyclotomic_poly,
    polyops::{add_shifted, conv_cyclic, reduce_mod_phi},
    CycNumber, Rat,
};
use num::{BigInt, Integer, One, ToPrimitive, Zero};

/// Clears denominators of two scales at conductor `m`: returns integer
/// coefficient vectors of `c*s1` and `c*s2` for the least common `c > 0`.
fn cleared_pair(s1: &CycNumber, s2: &CycNumber, m: u32) -> (Vec<C128>, Vec<C128>) {
    let z1 = s1.embed(m).expect("scale embeds in the working conductor");
    let z2 = s2.embed(m).expect("scale embeds in the working conductor");
    let mut c = BigInt::one();
    for z in [&z1, &z2] {
        for q in z.coeffs() {
            c = c.lcm(q.denom());
        }
    }
    let clear = |z: &CycNumber| -> Vec<C128> {
        z.coeffs()
            .iter()
            .map(|q| {
                let v = q.numer() * &c / q.denom();
                C128(v.to_i128().expect("cleared scale fits the integer layer"))
            })
            .collect()
    };
    (clear(&z1), clear(&z2))
}

fn zero_poly(m: u32) -> Vec<C128> {
    vec![C128(0); m as usize]
}

fn poly_to_cyc(p: &[C128], scale: &CycNumber, m: u32) -> CycNumber {
    let raw: Vec<i128> = p.iter().map(|c| c.0).collect();
    CycNumber::from_integer_coeffs(&raw, m)
        .mul(&scale.embed(m).expect("scale embeds"))
        .canonical_reduce()
}

/// `conj(poly)`: sends `zeta^k` to `zeta^(m-k)`.
fn conj_poly(p: &[C128]) -> Vec<C128> {
    let m = p.len();
    let mut out = vec![C128(0); m];
    for (k, c) in p.iter().enumerate() {
        if !c.is_zero() {
            out[(m - k) % m] += *c;
        }
    }
    out
}

/// One value `scale * poly(zeta_m)`, kept in cleared form.
#[derive(Clone, Debug)]
pub struct ScaledPoly {
    pub m: u32,
    pub scale: CycNumber,
    pub poly: Vec<C128>,
}

impl ScaledPoly {
    pub fn to_cyc(&self) -> CycNumber {
        poly_to_cyc(&self.poly, &self.scale, self.m)
    }

    pub fn eq_value(&self, other: &ScaledPoly) -> bool {
        assert_eq!(self.m, other.m, "conductor mismatch");
        let (a, b) = cleared_pair(&self.scale, &other.scale, self.m);
        let mut lhs = conv_cyclic(&self.poly, &a);
        let mut rhs = conv_cyclic(&other.poly, &b);
        let phi = cyclotomic_poly(self.m);
        reduce_mod_phi(&mut lhs, &phi);
        reduce_mod_phi(&mut rhs, &phi);
        lhs == rhs
    }

    pub fn is_zero(&self) -> bool {
        let phi = cyclotomic_poly(self.m);
        let mut p = self.poly.clone();
        reduce_mod_phi(&mut p, &phi);
        p.iter().all(|c| c.is_zero()) || self.scale.is_zero()
    }
}

/// Vector over the group algebra with one shared scale: entry `i` has value
/// `scale * coords[i](zeta_m)`.
#[derive(Clone, Debug)]
pub struct PolyVec {
    pub m: u32,
    pub scale: CycNumber,
    pub coords: Vec<Vec<C128>>,
}

impl PolyVec {
    pub fn zero(dim: usize, m: u32) -> PolyVec {
        PolyVec {
            m,
            scale: CycNumber::one(m),
            coords: vec![zero_poly(m); dim],
        }
    }

    pub fn with_scale(dim: usize, m: u32, scale: CycNumber) -> PolyVec {
        PolyVec {
            m,
            scale,
            coords: vec![zero_poly(m); dim],
        }
    }

    pub fn basis(dim: usize, m: u32, idx: usize) -> PolyVec {
        let mut v = PolyVec::zero(dim, m);
        v.coords[idx][0] = C128(1);
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Adds `coeff * zeta^power` to entry `idx`.
    pub fn add_monomial(&mut self, idx: usize, power: u32, coeff: i64) {
        self.coords[idx][(power % self.m) as usize] += C128::from(coeff);
    }

    /// Multiplies the whole vector by `zeta^k`.
    pub fn shift_all(&mut self, k: u32) {
        let k = k % self.m;
        if k == 0 {
            return;
        }
        for p in &mut self.coords {
            let src = std::mem::replace(p, zero_poly(self.m));
            add_shifted(p, &src, k as usize, &C128(1));
        }
    }

    /// Folds an exact scalar into the shared scale.
    pub fn scalar_mul(&mut self, c: &CycNumber) {
        self.scale = self
            .scale
            .mul(&c.embed(self.m).expect("scalar embeds"))
            .canonical_reduce();
    }

    /// Adds `zeta^shift * other`; the scales must agree exactly.
    pub fn add_shifted_vec(&mut self, other: &PolyVec, shift: u32) {
        assert_eq!(self.m, other.m, "conductor mismatch");
        assert!(
            self.scale.sub(&other.scale).is_zero(),
            "summands must share the scale"
        );
        for (dst, src) in self.coords.iter_mut().zip(&other.coords) {
            add_shifted(dst, src, (shift % self.m) as usize, &C128(1));
        }
    }

    pub fn entry(&self, idx: usize) -> CycNumber {
        poly_to_cyc(&self.coords[idx], &self.scale, self.m)
    }

    pub fn to_cyc(&self) -> Vec<CycNumber> {
        (0..self.dim()).map(|i| self.entry(i)).collect()
    }

    /// Re-indexes into the conductor `m2` (a multiple of `m`).
    pub fn embed(&self, m2: u32) -> PolyVec {
        assert_eq!(m2 % self.m, 0, "target conductor must be a multiple");
        let k = (m2 / self.m) as usize;
        let mut out = PolyVec::with_scale(
            self.dim(),
            m2,
            self.scale.embed(m2).expect("scale embeds"),
        );
        for (dst, src) in out.coords.iter_mut().zip(&self.coords) {
            for (j, c) in src.iter().enumerate() {
                if !c.is_zero() {
                    dst[j * k] += *c;
                }
            }
        }
        out
    }

    pub fn eq_value(&self, other: &PolyVec) -> bool {
        assert_eq!(self.m, other.m, "conductor mismatch");
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let (a, b) = cleared_pair(&self.scale, &other.scale, self.m);
        let phi = cyclotomic_poly(self.m);
        for (p, q) in self.coords.iter().zip(&other.coords) {
            let mut lhs = conv_cyclic(p, &a);
            let mut rhs = conv_cyclic(q, &b);
            reduce_mod_phi(&mut lhs, &phi);
            reduce_mod_phi(&mut rhs, &phi);
            if lhs != rhs {
                return false;
            }
        }
        true
    }

    pub fn is_zero(&self) -> bool {
        if self.scale.is_zero() {
            return true;
        }
        let phi = cyclotomic_poly(self.m);
        self.coords.iter().all(|p| {
            let mut q = p.clone();
            reduce_mod_phi(&mut q, &phi);
            q.iter().all(|c| c.is_zero())
        })
    }

    /// Indices with a nonzero polynomial (pre-reduction zeros are skipped).
    pub fn support(&self) -> Vec<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, p)| p.iter().any(|c| !c.is_zero()))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Hermitian pairing `<u, v> = sum_i u_i * conj(v_i)` in cleared form.
pub fn inner_poly(u: &PolyVec, v: &PolyVec) -> ScaledPoly {
    assert_eq!(u.m, v.m, "conductor mismatch");
    assert_eq!(u.dim(), v.dim(), "dimension mismatch");
    let mut acc = zero_poly(u.m);
    for (p, q) in u.coords.iter().zip(&v.coords) {
        let c = conj_poly(q);
        for (k, x) in conv_cyclic(p, &c).into_iter().enumerate() {
            acc[k] += x;
        }
    }
    let scale = u
        .scale
        .mul(&v.scale.conj())
        .canonical_reduce();
    ScaledPoly {
        m: u.m,
        scale,
        poly: acc,
    }
}

/// Column-major matrix with one shared scale.
#[derive(Clone, Debug)]
pub struct PolyMat {
    pub m: u32,
    pub scale: CycNumber,
    pub cols: Vec<Vec<Vec<C128>>>,
}

impl PolyMat {
    pub fn identity(dim: usize, m: u32) -> PolyMat {
        let mut cols = vec![vec![zero_poly(m); dim]; dim];
        for (j, col) in cols.iter_mut().enumerate() {
            col[j][0] = C128(1);
        }
        PolyMat {
            m,
            scale: CycNumber::one(m),
            cols,
        }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn scalar_mul(&mut self, c: &CycNumber) {
        self.scale = self
            .scale
            .mul(&c.embed(self.m).expect("scalar embeds"))
            .canonical_reduce();
    }

    pub fn column(&self, j: usize) -> PolyVec {
        PolyVec {
            m: self.m,
            scale: self.scale.clone(),
            coords: self.cols[j].clone(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> CycNumber {
        poly_to_cyc(&self.cols[j][i], &self.scale, self.m)
    }

    pub fn eq_value(&self, other: &PolyMat) -> bool {
        assert_eq!(self.m, other.m, "conductor mismatch");
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let (a, b) = cleared_pair(&self.scale, &other.scale, self.m);
        let phi = cyclotomic_poly(self.m);
        for (pc, qc) in self.cols.iter().zip(&other.cols) {
            for (p, q) in pc.iter().zip(qc) {
                let mut lhs = conv_cyclic(p, &a);
                let mut rhs = conv_cyclic(q, &b);
                reduce_mod_phi(&mut lhs, &phi);
                reduce_mod_phi(&mut rhs, &phi);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Equality against `c * I`.
    pub fn is_scalar_identity(&self, c: &CycNumber) -> bool {
        let mut id = PolyMat::identity(self.dim(), self.m);
        id.scalar_mul(c);
        self.eq_value(&id)
    }
}

/// Exponent of `e(r)` at conductor `m`; requires `m*r` integral.
pub fn exponent_of(r: &Rat, m: u32) -> u32 {
    let scaled = r * Rat::from_integer(BigInt::from(m));
    assert!(scaled.is_integer(), "conductor must clear the denominator");
    let k = scaled.to_integer().mod_floor(&BigInt::from(m));
    k.to_u32().expect("reduced exponent fits")
}

/// Splits a scale into `(integer poly, denominator)` with value `poly/den`,
/// for integrality tests of `poly_value * scale`.
pub fn scale_parts(scale: &CycNumber, m: u32) -> (Vec<C128>, BigInt) {
    let z = scale
        .embed(m)
        .expect("scale embeds")
        .canonical_reduce();
    let mut den = BigInt::one();
    for q in z.coeffs() {
        den = den.lcm(q.denom());
    }
    let num = z
        .coeffs()
        .iter()
        .map(|q| {
            let v = q.numer() * &den / q.denom();
            C128(v.to_i128().expect("cleared scale fits the integer layer"))
        })
        .collect();
    (num, den)
}

/// Whether `poly(zeta) * num/den` lies in `Z[zeta_m]`.
pub fn integral_with_parts(poly: &[C128], num: &[C128], den: &BigInt, m: u32) -> bool {
    let mut prod = conv_cyclic(poly, num);
    reduce_mod_phi(&mut prod, &cyclotomic_poly(m));
    let den = den.to_i128().expect("denominator fits the integer layer");
    prod.iter().all(|c| c.0.rem_euclid(den) == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_basis_entries() {
        let mut v = PolyVec::basis(3, 8, 1);
        v.shift_all(10);
        assert!(v.entry(0).is_zero());
        assert!(v
            .entry(1)
            .sub(&CycNumber::root_of_unity(2, 8))
            .is_zero());
    }

    #[test]
    fn value_equality_across_scales() {
        // sqrt(2) * (e_0 * zeta_8) equals (2/sqrt(2)) * zeta_8 * e_0.
        let s2 = CycNumber::sqrt_nat(2, 8).unwrap();
        let mut u = PolyVec::basis(1, 8, 0);
        u.shift_all(1);
        u.scalar_mul(&s2);
        let mut v = PolyVec::basis(1, 8, 0);
        v.shift_all(1);
        v.scalar_mul(&CycNumber::from_int(2, 8).mul(&s2.inv().unwrap()));
        assert!(u.eq_value(&v));
        v.shift_all(1);
        assert!(!u.eq_value(&v));
    }

    #[test]
    fn inner_product_is_hermitian() {
        let mut u = PolyVec::basis(2, 8, 0);
        u.add_monomial(1, 3, 2);
        let mut v = PolyVec::basis(2, 8, 1);
        v.shift_all(5);
        let uv = inner_poly(&u, &v).to_cyc();
        let vu = inner_poly(&v, &u).to_cyc();
        assert!(uv.sub(&vu.conj()).is_zero());
        // <u, v> = 2 zeta^3 * conj(zeta^5) = 2 zeta^6.
        let expect = CycNumber::root_of_unity(6, 8).scale(&Rat::from_integer(2.into()));
        assert!(uv.sub(&expect).is_zero());
    }

    #[test]
    fn matrix_scalar_identity() {
        let mut a = PolyMat::identity(3, 8);
        a.scalar_mul(&CycNumber::root_of_unity(2, 8));
        assert!(a.is_scalar_identity(&CycNumber::root_of_unity(2, 8)));
        assert!(!a.is_scalar_identity(&CycNumber::one(8)));
    }

    #[test]
    fn integrality_with_cleared_scale() {
        // (1 + zeta_8^2) / sqrt(2) = zeta_8 is integral; 1/sqrt(2) is not.
        let inv_s2 = CycNumber::sqrt_nat(2, 8).unwrap().inv().unwrap();
        let (num, den) = scale_parts(&inv_s2, 8);
        let mut p = zero_poly(8);
        p[0] = C128(1);
        p[2] = C128(1);
        assert!(integral_with_parts(&p, &num, &den, 8));
        let mut q = zero_poly(8);
        q[0] = C128(1);
        assert!(!integral_with_parts(&q, &num, &den, 8));
    }

    #[test]
    fn conductor_embedding_preserves_values() {
        let mut v = PolyVec::basis(2, 4, 0);
        v.shift_all(1);
        let w = v.embed(8);
        assert!(w.entry(0).sub(&CycNumber::root_of_unity(2, 8)).is_zero());
    }
}
