//! Finite quadratic modules (discriminant forms).
//!
//! A `DiscForm` is a finite abelian group `D = ⊕ Z/n_i` with a quadratic form
//! `q: D -> Q/Z` whose polarization `(x, y) = q(x+y) - q(x) - q(y)` is a
//! nondegenerate symmetric pairing. Construction validates denominators,
//! nondegeneracy, and the oddity relation: the Gauss sum `Σ e(q(γ))` must
//! equal `e(sgn/8) √|D|` for a unique residue `sgn` mod 8, which is cached as
//! the signature.
//!
//! Elements are coordinate vectors (`Vec<u32>`), one entry per ambient order,
//! each reduced mod its order; the fixed enumeration of `D` used for matrix
//! indexing is lexicographic in these coordinates, first coordinate most
//! significant.

use crate::error::{Error, Result};
use crate::exactnum::{
    denom_u64, fmt_rat, frac_mod1, parse_rat, rat, CycNumber, Rat,
};
use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};

pub type Elem = Vec<u32>;

#[derive(Clone, Debug)]
pub struct DiscForm {
    orders: Vec<u32>,
    q_diag: Vec<Rat>,
    bil: Vec<Vec<Rat>>,
    order: u64,
    level: u32,
    conductor: u32,
    signature: u8,
    gauss: CycNumber,
}

/// Hard cap on the group order accepted at construction; everything in scope
/// sits far below it and validation enumerates all of `D`.
pub const MAX_ORDER: u64 = 65536;

impl DiscForm {
    /// Builds and fully validates a finite quadratic module.
    ///
    /// `b_off` lists the off-diagonal pairings `(i, j, (e_i, e_j))` with
    /// `i < j`; omitted pairs are zero. Diagonal pairings are implied by
    /// `(e_i, e_i) = 2 q(e_i)`.
    pub fn construct(
        orders_in: &[u32],
        q_diag_in: &[Rat],
        b_off: &[(usize, usize, Rat)],
    ) -> Result<DiscForm> {
        if orders_in.len() != q_diag_in.len() {
            return Err(Error::invalid("orders and q_diag lengths differ"));
        }
        if orders_in.iter().any(|&n| n == 0) {
            return Err(Error::invalid("orders must be positive"));
        }
        // Drop trivial factors, keeping the survivors' positions.
        let keep: Vec<usize> = (0..orders_in.len()).filter(|&i| orders_in[i] > 1).collect();
        let orders: Vec<u32> = keep.iter().map(|&i| orders_in[i]).collect();
        let mut q_diag: Vec<Rat> = keep.iter().map(|&i| frac_mod1(&q_diag_in[i])).collect();
        let k = orders.len();
        let mut order: u64 = 1;
        for &n in &orders {
            order = order
                .checked_mul(n as u64)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| Error::invalid(format!("group order exceeds {MAX_ORDER}")))?;
        }
        for (i, &n) in orders.iter().enumerate() {
            let den = denom_u64(&q_diag[i]);
            let allowed = if n % 2 == 1 { n as u64 } else { 2 * n as u64 };
            if allowed % den != 0 {
                return Err(Error::invalid(format!(
                    "q value {} invalid on a generator of order {}",
                    fmt_rat(&q_diag[i]),
                    n
                )));
            }
        }
        let mut bil = vec![vec![Rat::zero(); k]; k];
        let old_to_new = |idx: usize| keep.iter().position(|&i| i == idx);
        for (i0, j0, v) in b_off {
            if *i0 >= orders_in.len() || *j0 >= orders_in.len() || i0 >= j0 {
                return Err(Error::invalid(format!(
                    "b_off index pair ({i0}, {j0}) out of range or not i < j"
                )));
            }
            let (i, j) = match (old_to_new(*i0), old_to_new(*j0)) {
                (Some(i), Some(j)) => (i, j),
                _ => {
                    if !v.is_zero() && !frac_mod1(v).is_zero() {
                        return Err(Error::invalid(
                            "nonzero pairing against a trivial factor",
                        ));
                    }
                    continue;
                }
            };
            if !bil[i][j].is_zero() {
                return Err(Error::invalid(format!("duplicate b_off entry ({i0}, {j0})")));
            }
            let v = frac_mod1(v);
            let g = num::integer::gcd(orders[i] as u64, orders[j] as u64);
            if g % denom_u64(&v) != 0 {
                return Err(Error::invalid(format!(
                    "pairing {} invalid between generators of orders {} and {}",
                    fmt_rat(&v),
                    orders[i],
                    orders[j]
                )));
            }
            bil[i][j] = v.clone();
            bil[j][i] = v;
        }
        for i in 0..k {
            bil[i][i] = frac_mod1(&(q_diag[i].clone() + q_diag[i].clone()));
        }
        for q in q_diag.iter_mut() {
            *q = frac_mod1(q);
        }

        let mut d = DiscForm {
            orders,
            q_diag,
            bil,
            order,
            level: 1,
            conductor: 8,
            signature: 0,
            gauss: CycNumber::one(8),
        };
        d.level = d.compute_level();
        d.conductor = num::integer::lcm(8, d.level);
        d.check_nondegenerate()?;
        let (sig, gauss) = d.compute_signature()?;
        d.signature = sig;
        d.gauss = gauss;
        Ok(d)
    }

    pub fn trivial() -> DiscForm {
        DiscForm::construct(&[], &[], &[]).expect("trivial form is valid")
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(&self, other: &DiscForm) -> Result<DiscForm> {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        let mut q = self.q_diag.clone();
        q.extend_from_slice(&other.q_diag);
        let mut off = Vec::new();
        let k = self.orders.len();
        for i in 0..self.orders.len() {
            for j in (i + 1)..self.orders.len() {
                if !self.bil[i][j].is_zero() {
                    off.push((i, j, self.bil[i][j].clone()));
                }
            }
        }
        for i in 0..other.orders.len() {
            for j in (i + 1)..other.orders.len() {
                if !other.bil[i][j].is_zero() {
                    off.push((k + i, k + j, other.bil[i][j].clone()));
                }
            }
        }
        DiscForm::construct(&orders, &q, &off)
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Conductor of the cyclotomic field all representation data lives in:
    /// `lcm(8, level)`.
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn signature(&self) -> u8 {
        self.signature
    }

    pub fn gauss_sum(&self) -> &CycNumber {
        &self.gauss
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn zero_elem(&self) -> Elem {
        vec![0; self.orders.len()]
    }

    pub fn num_elements(&self) -> usize {
        self.order as usize
    }

    /// Lexicographic enumeration, first coordinate most significant.
    pub fn elem_at(&self, idx: usize) -> Elem {
        let mut rem = idx;
        let mut e = vec![0u32; self.orders.len()];
        for i in (0..self.orders.len()).rev() {
            let n = self.orders[i] as usize;
            e[i] = (rem % n) as u32;
            rem /= n;
        }
        assert_eq!(rem, 0, "element index out of range");
        e
    }

    pub fn elem_index(&self, e: &Elem) -> usize {
        let mut idx = 0usize;
        for (i, &n) in self.orders.iter().enumerate() {
            debug_assert!(e[i] < n);
            idx = idx * n as usize + e[i] as usize;
        }
        idx
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.num_elements()).map(|i| self.elem_at(i))
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.orders
            .iter()
            .enumerate()
            .map(|(i, &n)| (a[i] + b[i]) % n)
            .collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.orders
            .iter()
            .enumerate()
            .map(|(i, &n)| (a[i] + n - b[i]) % n)
            .collect()
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        self.orders
            .iter()
            .enumerate()
            .map(|(i, &n)| (n - a[i]) % n)
            .collect()
    }

    pub fn scale(&self, k: i64, a: &Elem) -> Elem {
        self.orders
            .iter()
            .enumerate()
            .map(|(i, &n)| (k.rem_euclid(n as i64) as u64 * a[i] as u64 % n as u64) as u32)
            .collect()
    }

    pub fn elem_order(&self, a: &Elem) -> u32 {
        let mut ord = 1u32;
        for (i, &n) in self.orders.iter().enumerate() {
            if a[i] != 0 {
                ord = num::integer::lcm(ord, n / num::integer::gcd(n, a[i]));
            }
        }
        ord
    }

    /// `q(x)` as a rational in `[0, 1)`.
    pub fn q_value(&self, x: &Elem) -> Rat {
        let mut acc = Rat::zero();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            let xi_sq = Rat::from_integer(BigInt::from(xi as u64 * xi as u64));
            acc += xi_sq * self.q_diag[i].clone();
            for (j, &xj) in x.iter().enumerate().skip(i + 1) {
                if xj != 0 && !self.bil[i][j].is_zero() {
                    let f = Rat::from_integer(BigInt::from(xi as u64 * xj as u64));
                    acc += f * self.bil[i][j].clone();
                }
            }
        }
        frac_mod1(&acc)
    }

    /// Polarization `(x, y) = q(x+y) - q(x) - q(y)` in `[0, 1)`.
    pub fn bilinear(&self, x: &Elem, y: &Elem) -> Rat {
        let mut acc = Rat::zero();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 && !self.bil[i][j].is_zero() {
                    let f = Rat::from_integer(BigInt::from(xi as u64 * yj as u64));
                    acc += f * self.bil[i][j].clone();
                }
            }
        }
        frac_mod1(&acc)
    }

    /// `e(r)` in the form's cyclotomic field.
    pub fn e_q(&self, r: &Rat) -> CycNumber {
        CycNumber::e(r, self.conductor)
            .expect("level divides the conductor, so all form values embed")
    }

    /// The same module with the quadratic form multiplied by `l`.
    pub fn rescaled(&self, l: i64) -> Result<DiscForm> {
        let lr = Rat::from_integer(BigInt::from(l));
        let q: Vec<Rat> = self.q_diag.iter().map(|v| frac_mod1(&(v * lr.clone()))).collect();
        let mut off = Vec::new();
        for i in 0..self.orders.len() {
            for j in (i + 1)..self.orders.len() {
                if !self.bil[i][j].is_zero() {
                    off.push((i, j, frac_mod1(&(self.bil[i][j].clone() * lr.clone()))));
                }
            }
        }
        DiscForm::construct(&self.orders, &q, &off)
    }

    fn compute_level(&self) -> u32 {
        let mut level: u64 = 1;
        for x in self.elements() {
            level = num::integer::lcm(level, denom_u64(&self.q_value(&x)));
        }
        level as u32
    }

    fn check_nondegenerate(&self) -> Result<()> {
        let gens: Vec<Elem> = (0..self.orders.len())
            .map(|i| {
                let mut e = self.zero_elem();
                e[i] = 1;
                e
            })
            .collect();
        for x in self.elements() {
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            if gens.iter().all(|g| self.bilinear(&x, g).is_zero()) {
                return Err(Error::invalid(format!(
                    "degenerate pairing: {x:?} is orthogonal to everything"
                )));
            }
        }
        Ok(())
    }

    fn compute_signature(&self) -> Result<(u8, CycNumber)> {
        let m = self.conductor;
        let mut gauss = CycNumber::zero(m);
        for x in self.elements() {
            gauss = gauss.add(&self.e_q(&self.q_value(&x)));
        }
        let root = CycNumber::sqrt_nat(self.order, m).map_err(|e| {
            Error::internal(format!("conductor misses sqrt of the group order: {e}"))
        })?;
        for s in 0u8..8 {
            let cand = CycNumber::e(&rat(s as i64, 8), m)
                .expect("8 divides the conductor")
                .mul(&root);
            if gauss == cand {
                return Ok((s, gauss));
            }
        }
        Err(Error::invalid(
            "Gauss sum fails the oddity relation; not a discriminant form".to_string(),
        ))
    }

    pub fn to_json(&self) -> FormJson {
        let mut b_off = Vec::new();
        for i in 0..self.orders.len() {
            for j in (i + 1)..self.orders.len() {
                if !self.bil[i][j].is_zero() {
                    b_off.push((i, j, fmt_rat(&self.bil[i][j])));
                }
            }
        }
        FormJson {
            orders: self.orders.clone(),
            q_diag: self.q_diag.iter().map(fmt_rat).collect(),
            b_off,
        }
    }

    pub fn from_json(j: &FormJson) -> Result<DiscForm> {
        let q: Result<Vec<Rat>> = j.q_diag.iter().map(|s| parse_rat(s)).collect();
        let off: Result<Vec<(usize, usize, Rat)>> = j
            .b_off
            .iter()
            .map(|(i, jx, s)| Ok((*i, *jx, parse_rat(s)?)))
            .collect();
        DiscForm::construct(&j.orders, &q?, &off?)
    }
}

/// Serialized shape of a `DiscForm`.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FormJson {
    pub orders: Vec<u32>,
    pub q_diag: Vec<String>,
    pub b_off: Vec<(usize, usize, String)>,
}

impl PartialEq for DiscForm {
    fn eq(&self, other: &Self) -> bool {
        self.orders == other.orders
            && self.q_diag == other.q_diag
            && self.bil == other.bil
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_three_has_signature_two() {
        let d = DiscForm::construct(&[3], &[rat(1, 3)], &[]).unwrap();
        assert_eq!(d.signature(), 2);
        assert_eq!(d.level(), 3);
        assert_eq!(d.conductor(), 24);
        assert_eq!(d.order(), 3);
    }

    #[test]
    fn order_two_block_has_signature_one() {
        let d = DiscForm::construct(&[2], &[rat(1, 4)], &[]).unwrap();
        assert_eq!(d.signature(), 1);
        assert_eq!(d.level(), 4);
    }

    #[test]
    fn hyperbolic_plane_mod_six() {
        let d = DiscForm::construct(
            &[6, 6],
            &[rat(0, 1), rat(0, 1)],
            &[(0, 1, rat(1, 6))],
        )
        .unwrap();
        assert_eq!(d.signature(), 0);
        assert_eq!(d.order(), 36);
        assert_eq!(d.level(), 6);
        // q(a e + b f) = ab/6.
        assert_eq!(d.q_value(&vec![2, 3]), rat(0, 1));
        assert_eq!(d.q_value(&vec![1, 1]), rat(1, 6));
        assert_eq!(d.bilinear(&vec![1, 0], &vec![0, 1]), rat(1, 6));
    }

    #[test]
    fn degenerate_and_non_oddity_forms_rejected() {
        // q = 0 on Z/2 pairs trivially with everything.
        assert!(DiscForm::construct(&[2], &[rat(0, 1)], &[]).is_err());
        // Bad denominator.
        assert!(DiscForm::construct(&[3], &[rat(1, 7)], &[]).is_err());
        // Bad q denominator for odd order: 1/6 needs an even-order generator.
        assert!(DiscForm::construct(&[3], &[rat(1, 6)], &[]).is_err());
    }

    #[test]
    fn element_arithmetic_and_indexing() {
        let d = DiscForm::construct(
            &[2, 3],
            &[rat(1, 4), rat(1, 3)],
            &[],
        )
        .unwrap();
        assert_eq!(d.num_elements(), 6);
        for i in 0..6 {
            assert_eq!(d.elem_index(&d.elem_at(i)), i);
        }
        let a = vec![1, 2];
        let b = vec![1, 2];
        assert_eq!(d.add(&a, &b), vec![0, 1]);
        assert_eq!(d.neg(&a), vec![1, 1]);
        assert_eq!(d.elem_order(&a), 6);
        assert_eq!(d.scale(5, &a), vec![1, 1]);
    }

    #[test]
    fn trivial_factors_are_dropped() {
        let d = DiscForm::construct(&[1, 5, 1], &[rat(0, 1), rat(1, 5), rat(0, 1)], &[]).unwrap();
        assert_eq!(d.orders(), &[5]);
        assert_eq!(d.rank(), 1);
        let t = DiscForm::trivial();
        assert_eq!(t.order(), 1);
        assert_eq!(t.signature(), 0);
        assert_eq!(t.num_elements(), 1);
    }

    #[test]
    fn json_round_trip() {
        let d = DiscForm::construct(
            &[2, 2, 3],
            &[rat(0, 1), rat(0, 1), rat(1, 3)],
            &[(0, 1, rat(1, 2))],
        )
        .unwrap();
        let j = d.to_json();
        let back = DiscForm::from_json(&j).unwrap();
        assert_eq!(d, back);
        assert_eq!(j.q_diag, vec!["0/1", "0/1", "1/3"]);
        assert_eq!(j.b_off, vec![(0, 1, "1/2".to_string())]);
    }

    #[test]
    fn rescaling_multiplies_q() {
        let d = DiscForm::construct(&[5], &[rat(1, 5)], &[]).unwrap();
        let d2 = d.rescaled(2).unwrap();
        assert_eq!(d2.q_value(&vec![1]), rat(2, 5));
        // Rescaling by the order denominator degenerates.
        assert!(d.rescaled(5).is_err());
    }
}
