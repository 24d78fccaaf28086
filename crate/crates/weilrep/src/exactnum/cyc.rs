//! Exact elements of cyclotomic fields `Q(zeta_M)`.
//!
//! A `CycNumber` stores `M` rational coefficients for the powers
//! `zeta_M^0 .. zeta_M^(M-1)`, i.e. a representative mod `x^M - 1`, so that
//! multiplication is a cyclic convolution. Canonical reduction mod `Phi_M`
//! happens lazily: equality, integrality, inversion and serialization reduce;
//! sums and products do not. Binary operations between different conductors
//! auto-embed into the lcm.
//!
//! Invariant: the coefficient vector always has length exactly `M`.

use super::cyclo::{cyclotomic_poly, euler_phi, prime_factors};
use super::polyops::{conv_cyclic, reduce_mod_phi};
use super::rational::{fmt_rat, parse_rat, Rat};
use crate::error::{Error, Result};
use num::{BigInt, Integer, One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug)]
pub struct CycNumber {
    m: u32,
    c: Vec<Rat>,
}

impl CycNumber {
    pub fn zero(m: u32) -> Self {
        assert!(m >= 1);
        CycNumber {
            m,
            c: vec![Rat::zero(); m as usize],
        }
    }

    pub fn one(m: u32) -> Self {
        Self::from_rat(Rat::one(), m)
    }

    pub fn from_rat(q: Rat, m: u32) -> Self {
        let mut z = Self::zero(m);
        z.c[0] = q;
        z
    }

    pub fn from_int(v: i64, m: u32) -> Self {
        Self::from_rat(Rat::from_integer(BigInt::from(v)), m)
    }

    /// `zeta_M^k` (k taken mod M).
    pub fn root_of_unity(k: i64, m: u32) -> Self {
        let mut z = Self::zero(m);
        let idx = k.rem_euclid(m as i64) as usize;
        z.c[idx] = Rat::one();
        z
    }

    /// `e(q) = exp(2 pi i q)` as an element of `Q(zeta_M)`; requires that the
    /// denominator of `q` divides `M`.
    pub fn e(q: &Rat, m: u32) -> Result<Self> {
        use num::ToPrimitive;
        let exp = q * Rat::from_integer(BigInt::from(m));
        if !exp.denom().is_one() {
            return Err(Error::invalid(format!(
                "e({}) does not lie in conductor {} (denominator {})",
                fmt_rat(q),
                m,
                q.denom()
            )));
        }
        let k = exp
            .numer()
            .mod_floor(&BigInt::from(m))
            .to_i64()
            .expect("exponent fits i64");
        Ok(Self::root_of_unity(k, m))
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn from_coeffs(c: Vec<Rat>, m: u32) -> Self {
        assert_eq!(c.len(), m as usize);
        CycNumber { m, c }
    }

    pub fn from_integer_coeffs(coeffs: &[i128], m: u32) -> Self {
        assert_eq!(coeffs.len(), m as usize);
        CycNumber {
            m,
            c: coeffs
                .iter()
                .map(|&v| Rat::from_integer(BigInt::from(v)))
                .collect(),
        }
    }

    /// Embeds into conductor `m2`, which must be a multiple of the current
    /// conductor: `zeta_m^i` maps to `zeta_m2^(i * m2/m)`.
    pub fn embed(&self, m2: u32) -> Result<Self> {
        if m2 % self.m != 0 {
            return Err(Error::invalid(format!(
                "cannot embed conductor {} into {}",
                self.m, m2
            )));
        }
        let k = (m2 / self.m) as usize;
        let mut z = Self::zero(m2);
        for (i, q) in self.c.iter().enumerate() {
            if !q.is_zero() {
                z.c[i * k] = q.clone();
            }
        }
        Ok(z)
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        if a.m == b.m {
            return (a.clone(), b.clone());
        }
        let m = num::integer::lcm(a.m, b.m);
        (a.embed(m).unwrap(), b.embed(m).unwrap())
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = Self::aligned(self, other);
        for (x, y) in a.c.iter_mut().zip(b.c.iter()) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (mut a, b) = Self::aligned(self, other);
        for (x, y) in a.c.iter_mut().zip(b.c.iter()) {
            *x -= y;
        }
        a
    }

    pub fn neg(&self) -> Self {
        let mut a = self.clone();
        for x in a.c.iter_mut() {
            *x = -x.clone();
        }
        a
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        CycNumber {
            m: a.m,
            c: conv_cyclic(&a.c, &b.c),
        }
    }

    pub fn scale(&self, q: &Rat) -> Self {
        let mut a = self.clone();
        for x in a.c.iter_mut() {
            if !x.is_zero() {
                *x = x.clone() * q;
            }
        }
        a
    }

    /// Complex conjugation: `zeta^i -> zeta^(M-i)`.
    pub fn conj(&self) -> Self {
        let m = self.m as usize;
        let mut z = Self::zero(self.m);
        z.c[0] = self.c[0].clone();
        for i in 1..m {
            z.c[m - i] = self.c[i].clone();
        }
        z
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.m);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Canonical representative: coefficients reduced mod `Phi_M`, so all
    /// indices `>= phi(M)` are zero.
    pub fn canonical_reduce(&self) -> Self {
        let mut z = self.clone();
        z.reduce_in_place();
        z
    }

    fn reduce_in_place(&mut self) {
        let phi = cyclotomic_poly(self.m);
        reduce_mod_phi(&mut self.c, &phi);
    }

    pub fn is_zero(&self) -> bool {
        if self.c.iter().all(|q| q.is_zero()) {
            return true;
        }
        self.canonical_reduce().c.iter().all(|q| q.is_zero())
    }

    /// True when the canonical coordinates are all integers, i.e. the number
    /// lies in `Z[zeta_M]` (the full ring of integers of `Q(zeta_M)`).
    pub fn is_integral(&self) -> bool {
        self.canonical_reduce()
            .c
            .iter()
            .all(|q| q.denom().is_one())
    }

    /// Returns the value as a rational if it is one.
    pub fn to_rat(&self) -> Option<Rat> {
        let z = self.canonical_reduce();
        if z.c[1..].iter().all(|q| q.is_zero()) {
            Some(z.c[0].clone())
        } else {
            None
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let z = self.canonical_reduce();
        if z.c.iter().all(|q| q.is_zero()) {
            return Err(Error::invalid("division by zero".to_string()));
        }
        if let Some(q) = z.to_rat() {
            return Ok(Self::from_rat(Rat::one() / q, self.m));
        }
        let phi = cyclotomic_poly(self.m);
        let phi_rat: Vec<Rat> = phi.iter().map(|&v| Rat::from_integer(v.into())).collect();
        let deg = phi.len() - 1;
        let mut zp: Vec<Rat> = z.c[..deg].to_vec();
        trim(&mut zp);
        let u = poly_modular_inverse(&zp, &phi_rat).ok_or_else(|| {
            Error::internal("no inverse mod an irreducible cyclotomic polynomial".to_string())
        })?;
        let mut c = vec![Rat::zero(); self.m as usize];
        c[..u.len()].clone_from_slice(&u);
        Ok(CycNumber { m: self.m, c })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let (a, b) = Self::aligned(self, other);
        Ok(a.mul(&b.inv()?))
    }

    /// Exact square root of a natural number, e.g. `sqrt(8) = 2 sqrt(2)`.
    /// The result is the positive root. Requires the conductor to contain the
    /// needed subfields: `zeta_8` when 2 divides the squarefree part, `zeta_p`
    /// for odd primes `p` in it, and `zeta_4` when such a `p` is 3 mod 4.
    pub fn sqrt_nat(n: u64, m: u32) -> Result<Self> {
        if n == 0 {
            return Ok(Self::zero(m));
        }
        let mut square_root: u64 = 1;
        let mut squarefree: Vec<u64> = Vec::new();
        for (p, e) in prime_factors(n) {
            square_root *= p.pow(e / 2);
            if e % 2 == 1 {
                squarefree.push(p);
            }
        }
        let mut required: u32 = 1;
        for &p in &squarefree {
            let need = if p == 2 {
                8
            } else if p % 4 == 3 {
                4 * p as u32
            } else {
                p as u32
            };
            required = num::integer::lcm(required, need);
        }
        if m % required != 0 {
            return Err(Error::invalid(format!(
                "sqrt({n}) needs conductor divisible by {required}, got {m}"
            )));
        }
        let mut acc = Self::from_rat(Rat::from_integer(BigInt::from(square_root)), m);
        for &p in &squarefree {
            let factor = if p == 2 {
                // sqrt(2) = zeta_8 + zeta_8^-1
                let k = (m / 8) as i64;
                Self::root_of_unity(k, m).add(&Self::root_of_unity(-k, m))
            } else {
                // Quadratic Gauss sum: sum_x (x|p) zeta_p^x equals sqrt(p) for
                // p = 1 mod 4 and i sqrt(p) for p = 3 mod 4 (with the positive
                // sign), so the latter case needs a twist by -i = zeta_4^3.
                let step = (m / p as u32) as i64;
                let mut g = Self::zero(m);
                for x in 1..p {
                    let ls = legendre(x as i64, p);
                    let idx = ((x as i64 * step).rem_euclid(m as i64)) as usize;
                    g.c[idx] = Rat::from_integer(BigInt::from(ls));
                }
                if p % 4 == 3 {
                    g = g.mul(&Self::root_of_unity(3 * (m / 4) as i64, m));
                }
                g
            };
            acc = acc.mul(&factor);
        }
        Ok(acc)
    }

    /// Canonical JSON form: conductor plus the first `phi(M)` canonical
    /// coordinates as `"a/b"` strings.
    pub fn to_json(&self) -> CycJson {
        let z = self.canonical_reduce();
        let deg = euler_phi(self.m) as usize;
        CycJson {
            conductor: self.m,
            coeffs: z.c[..deg].iter().map(fmt_rat).collect(),
        }
    }

    pub fn from_json(j: &CycJson) -> Result<Self> {
        if j.conductor == 0 {
            return Err(Error::invalid("conductor must be positive"));
        }
        let deg = euler_phi(j.conductor) as usize;
        if j.coeffs.len() != deg {
            return Err(Error::invalid(format!(
                "conductor {} needs exactly {} canonical coefficients, got {}",
                j.conductor,
                deg,
                j.coeffs.len()
            )));
        }
        let mut c = vec![Rat::zero(); j.conductor as usize];
        for (i, s) in j.coeffs.iter().enumerate() {
            c[i] = parse_rat(s)?;
        }
        Ok(CycNumber {
            m: j.conductor,
            c,
        })
    }
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

/// Serialized shape of a `CycNumber`.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CycJson {
    pub conductor: u32,
    pub coeffs: Vec<String>,
}

/// Legendre symbol `(a|p)` for odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i64 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    // Euler's criterion by fast modular exponentiation.
    let mut base = a % p;
    let mut exp = (p - 1) / 2;
    let mut acc: u64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    if acc == 1 {
        1
    } else if acc == p - 1 {
        -1
    } else {
        0
    }
}

fn trim(v: &mut Vec<Rat>) {
    while v.len() > 1 && v.last().map(|q| q.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

fn poly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    let mut rem = num.to_vec();
    if rem.len() <= dd {
        return (vec![Rat::zero()], rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone() / lead.clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dd] = c.clone();
        for (j, dc) in den.iter().enumerate() {
            let t = rem[i - dd + j].clone() - c.clone() * dc.clone();
            rem[i - dd + j] = t;
        }
    }
    let mut r = rem[..dd.max(1)].to_vec();
    trim(&mut r);
    (quot, r)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let t = out[i + j].clone() + x.clone() * y.clone();
            out[i + j] = t;
        }
    }
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] = x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        let t = out[i].clone() - y.clone();
        out[i] = t;
    }
    let mut out = out;
    trim(&mut out);
    out
}

/// Inverse of `z` mod the irreducible `modulus` via the extended Euclidean
/// algorithm over `Q[x]`; returns `None` only if `gcd != 1`.
fn poly_modular_inverse(z: &[Rat], modulus: &[Rat]) -> Option<Vec<Rat>> {
    let mut r0 = modulus.to_vec();
    let mut r1 = z.to_vec();
    let mut s0: Vec<Rat> = vec![Rat::zero()];
    let mut s1: Vec<Rat> = vec![Rat::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if r0.len() != 1 || r0[0].is_zero() {
        return None;
    }
    // Normalize gcd to 1.
    let g = r0[0].clone();
    let mut inv: Vec<Rat> = s0.into_iter().map(|c| c / g.clone()).collect();
    // Reduce mod the modulus to keep the degree below deg(modulus).
    let (_, rem) = poly_divmod(&inv, modulus);
    inv = rem;
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    fn approx(z: &CycNumber) -> (f64, f64) {
        use num::ToPrimitive;
        let m = z.conductor() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, q) in z.coeffs().iter().enumerate() {
            let v = q.to_f64().unwrap();
            let ang = 2.0 * std::f64::consts::PI * (i as f64) / m;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }

    #[test]
    fn roots_of_unity_multiply_by_exponent_addition() {
        let a = CycNumber::root_of_unity(5, 12);
        let b = CycNumber::root_of_unity(9, 12);
        assert_eq!(a.mul(&b), CycNumber::root_of_unity(2, 12));
        assert_eq!(a.mul(&a.conj()), CycNumber::one(12));
    }

    #[test]
    fn canonical_reduction_of_zeta3_squared() {
        // zeta_3^2 has canonical coordinates (-1, -1).
        let z = CycNumber::root_of_unity(2, 3).canonical_reduce();
        assert_eq!(z.coeffs()[0], rat(-1, 1));
        assert_eq!(z.coeffs()[1], rat(-1, 1));
        assert_eq!(z.coeffs()[2], rat(0, 1));
    }

    #[test]
    fn embedding_round_trips_through_equality() {
        let z = CycNumber::root_of_unity(1, 3);
        let w = z.embed(12).unwrap();
        assert_eq!(w, CycNumber::root_of_unity(4, 12));
        assert_eq!(z, w);
        // Mixed-conductor arithmetic auto-embeds.
        let s = z.add(&CycNumber::root_of_unity(1, 4));
        assert_eq!(s.conductor(), 12);
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let r = CycNumber::sqrt_nat(2, 8).unwrap();
        assert_eq!(r.mul(&r), CycNumber::from_int(2, 8));
        let (re, im) = approx(&r);
        assert!((re - std::f64::consts::SQRT_2).abs() < 1e-9 && im.abs() < 1e-9);
    }

    #[test]
    fn sqrt_of_odd_primes_squares_back_and_is_positive() {
        for (p, m) in [(5u64, 5u32), (13, 13), (3, 12), (7, 28), (11, 44)] {
            let r = CycNumber::sqrt_nat(p, m).unwrap();
            assert_eq!(r.mul(&r), CycNumber::from_int(p as i64, m), "p = {p}");
            let (re, im) = approx(&r);
            assert!((re - (p as f64).sqrt()).abs() < 1e-9, "p = {p}, re = {re}");
            assert!(im.abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn sqrt_of_composite_and_square() {
        let r = CycNumber::sqrt_nat(8, 8).unwrap();
        assert_eq!(r.mul(&r), CycNumber::from_int(8, 8));
        assert_eq!(
            CycNumber::sqrt_nat(144, 8).unwrap(),
            CycNumber::from_int(12, 8)
        );
        let r6 = CycNumber::sqrt_nat(6, 24).unwrap();
        assert_eq!(r6.mul(&r6), CycNumber::from_int(6, 24));
    }

    #[test]
    fn sqrt_conductor_errors_name_the_minimal_conductor() {
        let err = CycNumber::sqrt_nat(2, 4).unwrap_err().to_string();
        assert!(err.contains("divisible by 8"), "{err}");
        let err = CycNumber::sqrt_nat(3, 3).unwrap_err().to_string();
        assert!(err.contains("divisible by 12"), "{err}");
        let err = CycNumber::sqrt_nat(5, 8).unwrap_err().to_string();
        assert!(err.contains("divisible by 5"), "{err}");
    }

    #[test]
    fn inversion_and_division() {
        let z = CycNumber::root_of_unity(1, 8)
            .add(&CycNumber::from_int(2, 8));
        let inv = z.inv().unwrap();
        assert_eq!(z.mul(&inv), CycNumber::one(8));
        assert!(CycNumber::zero(8).inv().is_err());
        // 1/sqrt(2) = sqrt(2)/2.
        let s = CycNumber::sqrt_nat(2, 8).unwrap();
        assert_eq!(s.inv().unwrap(), s.scale(&rat(1, 2)));
    }

    #[test]
    fn integrality_detects_denominators() {
        assert!(CycNumber::sqrt_nat(2, 8).unwrap().is_integral());
        assert!(!CycNumber::from_rat(rat(1, 2), 8).is_integral());
        // zeta_8 + zeta_8^3 + 1/1 is integral; dividing by 2 is not.
        let z = CycNumber::root_of_unity(1, 8).add(&CycNumber::root_of_unity(3, 8));
        assert!(z.is_integral());
        assert!(!z.scale(&rat(1, 2)).is_integral());
        // (1 + zeta_8)/sqrt(2) is not integral, but sqrt(2)*zeta_8 is.
        let s = CycNumber::sqrt_nat(2, 8).unwrap();
        let w = CycNumber::one(8).add(&CycNumber::root_of_unity(1, 8));
        assert!(!w.div(&s).unwrap().is_integral() || w.div(&s).unwrap().mul(&s) != w);
        assert!(s.mul(&CycNumber::root_of_unity(1, 8)).is_integral());
    }

    #[test]
    fn e_of_rationals() {
        assert_eq!(
            CycNumber::e(&rat(3, 8), 8).unwrap(),
            CycNumber::root_of_unity(3, 8)
        );
        assert_eq!(
            CycNumber::e(&rat(-1, 3), 24).unwrap(),
            CycNumber::root_of_unity(16, 24)
        );
        assert!(CycNumber::e(&rat(1, 5), 8).is_err());
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let z = CycNumber::root_of_unity(5, 8).scale(&rat(3, 2));
        let j = z.to_json();
        assert_eq!(j.conductor, 8);
        assert_eq!(j.coeffs.len(), 4);
        // zeta_8^5 = -zeta_8.
        assert_eq!(j.coeffs, vec!["0/1", "-3/2", "0/1", "0/1"]);
        let back = CycNumber::from_json(&j).unwrap();
        assert_eq!(back, z);
        assert!(CycNumber::from_json(&CycJson {
            conductor: 8,
            coeffs: vec!["1/1".into(); 3],
        })
        .is_err());
    }

    #[test]
    fn legendre_symbol_basics() {
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(3, 7), -1);
        assert_eq!(legendre(14, 7), 0);
        let squares: Vec<i64> = (1..13).map(|a| legendre(a, 13)).collect();
        assert_eq!(squares.iter().filter(|&&s| s == 1).count(), 6);
        assert_eq!(squares.iter().filter(|&&s| s == -1).count(), 6);
    }
}
