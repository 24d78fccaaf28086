//! Quotient forms `upper/lower` with explicit projection and section maps.
//!
//! The carried form is `l·q` for a chosen integer scale (`l = 1` for the
//! plain quotient); it must vanish on `lower`, which must pair trivially
//! with `upper` under the scaled polarization, so that the form descends.
//! The quotient group is rebuilt as a `DiscForm` on a constructive cyclic
//! decomposition; `proj` sends an ambient element of `upper` to its
//! quotient coordinates and `section` returns the lexicographically least
//! ambient representative.

use crate::error::{Error, Result};
use crate::exactnum::{frac_mod1, Rat};
use crate::fqm::abgroup::{self, GroupOps};
use crate::fqm::form::{DiscForm, Elem};
use crate::fqm::subgroup::Subgroup;
use num::{BigInt, Zero};
use std::collections::BTreeMap;

pub struct QuotientForm {
    pub form: DiscForm,
    rep_of: BTreeMap<Elem, Elem>,
    coords_of_rep: BTreeMap<Elem, Elem>,
    section_of: Vec<Elem>,
}

struct RepOps<'a> {
    d: &'a DiscForm,
    rep_of: &'a BTreeMap<Elem, Elem>,
}

impl GroupOps for RepOps<'_> {
    fn zero(&self) -> Elem {
        self.rep_of[&self.d.zero_elem()].clone()
    }
    fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.rep_of[&self.d.add(a, b)].clone()
    }
    fn neg(&self, a: &Elem) -> Elem {
        self.rep_of[&self.d.neg(a)].clone()
    }
}

impl QuotientForm {
    /// Quotient coordinates of an ambient element of `upper`.
    pub fn proj(&self, x: &Elem) -> Result<Elem> {
        let rep = self
            .rep_of
            .get(x)
            .ok_or_else(|| Error::invalid("element lies outside the quotiented subgroup"))?;
        Ok(self.coords_of_rep[rep].clone())
    }

    /// Lexicographically least ambient representative of a quotient element.
    pub fn section(&self, coords: &Elem) -> Elem {
        self.section_of[self.form.elem_index(coords)].clone()
    }

    /// All ambient representatives, indexed by quotient element enumeration.
    pub fn sections(&self) -> &[Elem] {
        &self.section_of
    }
}

pub fn quotient_form(
    d: &DiscForm,
    upper: &Subgroup,
    lower: &Subgroup,
) -> Result<QuotientForm> {
    quotient_form_scaled(d, upper, lower, 1)
}

/// Quotient carrying `l·q` instead of `q`. The scaled form must vanish on
/// `lower` and its polarization must pair `lower` trivially with `upper`;
/// the result must still be nondegenerate.
pub fn quotient_form_scaled(
    d: &DiscForm,
    upper: &Subgroup,
    lower: &Subgroup,
    l: i64,
) -> Result<QuotientForm> {
    let lr = Rat::from_integer(BigInt::from(l));
    let scaled_q = |x: &Elem| frac_mod1(&(d.q_value(x) * lr.clone()));
    let scaled_b = |x: &Elem, y: &Elem| frac_mod1(&(d.bilinear(x, y) * lr.clone()));
    if !lower.is_subgroup_of(upper) {
        return Err(Error::invalid("quotient requires lower ⊆ upper"));
    }
    if !lower.elems().iter().all(|x| scaled_q(x).is_zero()) {
        return Err(Error::invalid(
            "quotient requires the scaled form to vanish on the lower subgroup",
        ));
    }
    // l·q descends iff lower pairs trivially with upper under l·(,).
    for low in lower.gens() {
        for u in upper.gens() {
            if !scaled_b(low, u).is_zero() {
                return Err(Error::invalid(
                    "quotient requires lower ⊆ upper⊥ so that q descends",
                ));
            }
        }
    }

    let mut rep_of: BTreeMap<Elem, Elem> = BTreeMap::new();
    let mut reps: Vec<Elem> = Vec::new();
    for x in upper.elems() {
        if rep_of.contains_key(x) {
            continue;
        }
        let rep = lower
            .elems()
            .iter()
            .map(|l| d.add(x, l))
            .min()
            .expect("subgroups are nonempty");
        for l in lower.elems() {
            rep_of.insert(d.add(x, l), rep.clone());
        }
        reps.push(rep);
    }
    reps.sort();

    let ops = RepOps { d, rep_of: &rep_of };
    let basis = abgroup::decompose(&ops, &reps);

    let q_diag: Vec<_> = basis.gens.iter().map(&scaled_q).collect();
    let mut b_off = Vec::new();
    for i in 0..basis.gens.len() {
        for j in (i + 1)..basis.gens.len() {
            let v = scaled_b(&basis.gens[i], &basis.gens[j]);
            if !v.is_zero() {
                b_off.push((i, j, v));
            }
        }
    }
    let form = DiscForm::construct(&basis.orders, &q_diag, &b_off)
        .map_err(|e| Error::internal(format!("quotient form fails validation: {e}")))?;

    // The constructed orders equal basis.orders with any trivial factors
    // dropped; build coordinate maps against the constructed form.
    let kept: Vec<usize> =
        (0..basis.orders.len()).filter(|&i| basis.orders[i] > 1).collect();
    let mut coords_of_rep: BTreeMap<Elem, Elem> = BTreeMap::new();
    let mut section_of: Vec<Elem> = vec![Elem::new(); form.num_elements()];
    for rep in &reps {
        let full = &basis.coords[rep];
        let coords: Elem = kept.iter().map(|&i| full[i]).collect();
        section_of[form.elem_index(&coords)] = rep.clone();
        coords_of_rep.insert(rep.clone(), coords);
    }

    // The scaled q must be constant on cosets; the pairing checks above
    // guarantee it, and this asserts it element by element.
    for x in upper.elems() {
        assert_eq!(
            scaled_q(x),
            scaled_q(&rep_of[x]),
            "q is not constant on cosets"
        );
    }

    Ok(QuotientForm { form, rep_of, coords_of_rep, section_of })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::fqm::symbol::parse_symbol;

    #[test]
    fn hyperbolic_four_quotient_is_hyperbolic_two() {
        let d = parse_symbol("U(4)").unwrap();
        let h = Subgroup::generated(&d, &[vec![2, 0]]);
        let hp = h.orthogonal_complement(&d);
        assert_eq!(hp.order(), 8);
        let q = quotient_form(&d, &hp, &h).unwrap();
        assert_eq!(q.form.order(), 4);
        assert_eq!(q.form.signature(), 0);
        // Two isotropic lines: the quotient is the hyperbolic plane mod 2.
        let iso_count = q
            .form
            .elements()
            .filter(|x| q.form.q_value(x).is_integer())
            .count();
        assert_eq!(iso_count, 3);
    }

    #[test]
    fn projection_section_round_trip() {
        let d = parse_symbol("U(4)").unwrap();
        let h = Subgroup::generated(&d, &[vec![2, 2]]);
        assert!(h.is_isotropic(&d));
        let hp = h.orthogonal_complement(&d);
        let q = quotient_form(&d, &hp, &h).unwrap();
        for x in hp.elems() {
            let c = q.proj(x).unwrap();
            let back = q.section(&c);
            // Same coset and same q value.
            assert_eq!(q.proj(&back).unwrap(), c);
            assert_eq!(d.q_value(x), q.form.q_value(&c));
        }
        // Additivity through the projection.
        for x in hp.elems().iter().take(6) {
            for y in hp.elems().iter().take(6) {
                let lhs = q.proj(&d.add(x, y)).unwrap();
                let rhs = q.form.add(&q.proj(x).unwrap(), &q.proj(y).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
        assert!(!hp.contains(&vec![1, 0]));
        assert!(q.proj(&vec![1, 0]).is_err());
    }

    #[test]
    fn self_dual_quotient_is_trivial() {
        let d = parse_symbol("U(2)").unwrap();
        let h = Subgroup::generated(&d, &[vec![1, 0]]);
        let q = quotient_form(&d, &h, &h).unwrap();
        assert!(q.form.is_trivial());
        assert_eq!(q.proj(&vec![1, 0]).unwrap(), Vec::<u32>::new());
    }

    #[test]
    fn rejects_bad_pairs() {
        let d = parse_symbol("U(2)").unwrap();
        let full = Subgroup::full(&d);
        let e = Subgroup::generated(&d, &[vec![1, 0]]);
        // lower not isotropic:
        let bad = Subgroup::generated(&d, &[vec![1, 1]]);
        assert!(quotient_form(&d, &full, &bad).is_err());
        // q does not descend: (e, f) ≠ 0.
        assert!(quotient_form(&d, &full, &e).is_err());
    }

    #[test]
    fn scaled_quotient_of_non_isotropic_lower() {
        // H = <(2,0)> has q(2,0) = 1/2, so the plain quotient is refused,
        // but 2·q vanishes on H and descends to H⊥/H ≅ Z/3.
        let d = parse_symbol("4_1^+1 ⊕ 3^+1").unwrap();
        let h = Subgroup::generated(&d, &[vec![2, 0]]);
        let hp = h.orthogonal_complement(&d);
        assert!(quotient_form(&d, &hp, &h).is_err());
        let q = quotient_form_scaled(&d, &hp, &h, 2).unwrap();
        assert_eq!(q.form.orders(), &[3]);
        assert_eq!(q.form.q_value(&vec![1]), rat(2, 3));
        assert_eq!(q.form.signature(), 6);
    }

    #[test]
    fn cyclic_27_quotient_is_cyclic_3() {
        let d = DiscForm::construct(&[27], &[rat(1, 27)], &[]).unwrap();
        let h = Subgroup::generated(&d, &[vec![9]]);
        assert!(h.is_isotropic(&d));
        let hp = h.orthogonal_complement(&d);
        assert_eq!(hp.order(), 9);
        let q = quotient_form(&d, &hp, &h).unwrap();
        assert_eq!(q.form.orders(), &[3]);
        assert_eq!(q.form.signature(), 2);
        assert_eq!(q.form.q_value(&vec![1]), rat(1, 3));
    }
}
