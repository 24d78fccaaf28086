//! Subgroups of a finite quadratic module: canonical representation,
//! orthogonal complements, isotropy classification, and the linearizing
//! elements attached to quasi-isotropic subgroups.

use crate::error::{Error, Result};
use crate::exactnum::{frac_mod1, Rat};
use crate::fqm::abgroup::{self, GroupOps};
use crate::fqm::form::{DiscForm, Elem};
use num::{BigInt, Zero};

impl GroupOps for DiscForm {
    fn zero(&self) -> Elem {
        self.zero_elem()
    }
    fn add(&self, a: &Elem, b: &Elem) -> Elem {
        DiscForm::add(self, a, b)
    }
    fn neg(&self, a: &Elem) -> Elem {
        DiscForm::neg(self, a)
    }
    fn scale(&self, k: i64, a: &Elem) -> Elem {
        DiscForm::scale(self, k, a)
    }
    fn elem_order(&self, a: &Elem) -> u32 {
        DiscForm::elem_order(self, a)
    }
}

/// A subgroup, canonically identified by its sorted element list. Generators
/// are the greedy minimal set: scanning elements in lexicographic order,
/// keeping each one outside the span of those already kept.
#[derive(Clone, Debug)]
pub struct Subgroup {
    elems: Vec<Elem>,
    gens: Vec<Elem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubgroupKind {
    Isotropic,
    QuasiIsotropic,
    NonIsotropic,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elems == other.elems
    }
}
impl Eq for Subgroup {}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.elems.cmp(&other.elems)
    }
}

impl Subgroup {
    pub fn generated(d: &DiscForm, gens: &[Elem]) -> Subgroup {
        Subgroup::from_elems(d, abgroup::closure(d, gens))
    }

    /// Wraps a sorted, closed element list.
    pub(crate) fn from_elems(d: &DiscForm, elems: Vec<Elem>) -> Subgroup {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        let mut gens: Vec<Elem> = Vec::new();
        let mut span = vec![d.zero_elem()];
        for e in &elems {
            if span.binary_search(e).is_err() {
                gens.push(e.clone());
                span = abgroup::closure(d, &gens);
            }
        }
        Subgroup { elems, gens }
    }

    pub fn trivial(d: &DiscForm) -> Subgroup {
        Subgroup { elems: vec![d.zero_elem()], gens: Vec::new() }
    }

    pub fn full(d: &DiscForm) -> Subgroup {
        Subgroup::from_elems(d, d.elements().collect())
    }

    pub fn order(&self) -> u64 {
        self.elems.len() as u64
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn gens(&self) -> &[Elem] {
        &self.gens
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.elems.binary_search(e).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elems.iter().all(|e| other.contains(e))
    }

    pub fn join(&self, d: &DiscForm, other: &Subgroup) -> Subgroup {
        let mut gens = self.gens.clone();
        gens.extend_from_slice(&other.gens);
        Subgroup::generated(d, &gens)
    }

    /// `H⊥ = {x : (x, h) = 0 for all h in H}`. Nondegeneracy forces
    /// `|H|·|H⊥| = |D|`, which is asserted.
    pub fn orthogonal_complement(&self, d: &DiscForm) -> Subgroup {
        let elems: Vec<Elem> = d
            .elements()
            .filter(|x| self.gens.iter().all(|g| d.bilinear(x, g).is_zero()))
            .collect();
        let c = Subgroup::from_elems(d, elems);
        assert_eq!(
            self.order() * c.order(),
            d.order(),
            "complement size contradicts nondegeneracy"
        );
        c
    }

    /// Isotropic: `q ≡ 0` on `H`. Quasi-isotropic: `H ⊆ H⊥` but `q` is not
    /// identically zero (its values then lie in `{0, 1/2}` and are linear on
    /// `H`). Anything else is non-isotropic.
    pub fn classify(&self, d: &DiscForm) -> SubgroupKind {
        for (i, g) in self.gens.iter().enumerate() {
            for h in &self.gens[i..] {
                if !d.bilinear(g, h).is_zero() {
                    return SubgroupKind::NonIsotropic;
                }
            }
        }
        if self.gens.iter().all(|g| d.q_value(g).is_zero()) {
            SubgroupKind::Isotropic
        } else {
            SubgroupKind::QuasiIsotropic
        }
    }

    pub fn is_isotropic(&self, d: &DiscForm) -> bool {
        self.classify(d) == SubgroupKind::Isotropic
    }

    pub fn is_quasi_isotropic(&self, d: &DiscForm) -> bool {
        self.classify(d) != SubgroupKind::NonIsotropic
    }

    /// The lexicographically least `ξ` with `(h, ξ) = l·q(h)` for all
    /// `h ∈ H`; defined whenever `l·q` is linear on `H` (equivalently
    /// `l·(γ, δ) ∈ Z` on `H × H`), unique mod `H⊥`. For quasi-isotropic
    /// `H` every `l` qualifies.
    pub fn xi(&self, d: &DiscForm, l: i64) -> Result<Elem> {
        let lr = Rat::from_integer(BigInt::from(l));
        for (i, g) in self.gens.iter().enumerate() {
            for h in &self.gens[i..] {
                if !(d.bilinear(g, h) * lr.clone()).is_integer() {
                    return Err(Error::invalid(
                        "linearizer requires l·q to be linear on the subgroup",
                    ));
                }
            }
        }
        let targets: Vec<Rat> = self
            .gens
            .iter()
            .map(|g| frac_mod1(&(d.q_value(g) * Rat::from_integer(BigInt::from(l)))))
            .collect();
        d.elements()
            .find(|xi| {
                self.gens
                    .iter()
                    .zip(&targets)
                    .all(|(g, t)| d.bilinear(g, xi) == *t)
            })
            .ok_or_else(|| Error::internal("nondegeneracy guarantees a linearizer"))
    }

    /// `H₀ = {h ∈ H : q(h) = 0}` for quasi-isotropic `H`; a subgroup of
    /// index 1 or 2.
    pub fn maximal_isotropic_part(&self, d: &DiscForm) -> Result<Subgroup> {
        if !self.is_quasi_isotropic(d) {
            return Err(Error::invalid(
                "isotropic part requires a quasi-isotropic subgroup",
            ));
        }
        let elems: Vec<Elem> = self
            .elems
            .iter()
            .filter(|h| d.q_value(h).is_zero())
            .cloned()
            .collect();
        let h0 = Subgroup::from_elems(d, elems);
        let index = self.order() / h0.order();
        assert!(index <= 2, "isotropic part has index 1 or 2");
        Ok(h0)
    }

    /// For quasi-isotropic `H` whose quotient `H⊥/H` has prime exponent `p`
    /// (or is trivial), returns a lifted complement: a subgroup `L ≤ H⊥`
    /// with `L ∩ H = H₀` and `L + H = H⊥`, together with the
    /// lexicographically least `ξ` pairing as `q` on `H` and trivially on
    /// `L`. For odd `p` the complement is the set of elements of `H⊥`
    /// whose image in `H⊥/H₀` has odd order; for `p = 2` that quotient has
    /// exponent 2 and the complement is grown greedily in lexicographic
    /// order. `ξ` represents the linearizer of `H`; `2ξ ∈ H` and
    /// `8·q(ξ) ∈ Z`.
    pub fn lift_complement(&self, d: &DiscForm) -> Result<(Subgroup, Elem)> {
        if !self.is_quasi_isotropic(d) {
            return Err(Error::invalid(
                "lifted complement requires a quasi-isotropic subgroup",
            ));
        }
        let h0 = self.maximal_isotropic_part(d)?;
        let hp = self.orthogonal_complement(d);
        let a_order = hp.order() / self.order();
        let lifted = if a_order == 1 {
            h0.clone()
        } else {
            let p = (2..).find(|p| a_order % p == 0).expect("a_order > 1");
            for x in hp.elems() {
                if !self.contains(&d.scale(p as i64, x)) {
                    return Err(Error::invalid(
                        "lifted complement requires H⊥/H of prime exponent",
                    ));
                }
            }
            if p % 2 == 1 {
                let elems: Vec<Elem> = hp
                    .elems()
                    .iter()
                    .filter(|x| {
                        let mut y = (*x).clone();
                        let mut n = 1u64;
                        while !h0.contains(&y) {
                            y = d.add(&y, x);
                            n += 1;
                        }
                        n % 2 == 1
                    })
                    .cloned()
                    .collect();
                Subgroup::from_elems(d, elems)
            } else {
                let mut u = h0.clone();
                for x in hp.elems() {
                    if !u.join(d, self).contains(x) {
                        u = u.join(d, &Subgroup::generated(d, std::slice::from_ref(x)));
                    }
                }
                u
            }
        };
        assert_eq!(
            lifted.order() * self.order() / h0.order(),
            hp.order(),
            "complement dimensions"
        );
        assert!(lifted
            .elems()
            .iter()
            .all(|x| !self.contains(x) || h0.contains(x)));
        let xi = d
            .elements()
            .find(|xi| {
                self.gens.iter().all(|g| d.bilinear(g, xi) == d.q_value(g))
                    && lifted.gens().iter().all(|g| d.bilinear(g, xi).is_zero())
            })
            .ok_or_else(|| Error::internal("nondegeneracy guarantees a linearizer"))?;
        assert!(self.contains(&d.scale(2, &xi)));
        assert!((d.q_value(&xi) * Rat::from_integer(BigInt::from(8))).is_integer());
        Ok((lifted, xi))
    }

    /// Lexicographically least representative per coset of `self` in `D`,
    /// in lexicographic order.
    pub fn coset_reps(&self, d: &DiscForm) -> Vec<Elem> {
        let mut marked = vec![false; d.num_elements()];
        let mut reps = Vec::with_capacity(d.num_elements() / self.elems.len());
        for x in d.elements() {
            if marked[d.elem_index(&x)] {
                continue;
            }
            for h in &self.elems {
                marked[d.elem_index(&d.add(&x, h))] = true;
            }
            reps.push(x);
        }
        reps
    }

    /// Splits `x` as `rep + delta` with `rep` the lexicographically least
    /// element of `x + H` and `delta ∈ H`.
    pub fn decompose_coset(&self, d: &DiscForm, x: &Elem) -> (Elem, Elem) {
        let rep = self
            .elems
            .iter()
            .map(|h| d.add(x, h))
            .min()
            .expect("subgroups are nonempty");
        let delta = d.sub(x, &rep);
        debug_assert!(self.contains(&delta));
        (rep, delta)
    }
}

/// All subgroups; refuses groups larger than `bound`.
pub fn enumerate_subgroups(d: &DiscForm, bound: u64) -> Result<Vec<Subgroup>> {
    if d.order() > bound {
        return Err(Error::invalid(format!(
            "subgroup enumeration capped at order {bound}, got {}",
            d.order()
        )));
    }
    let universe: Vec<Elem> = d.elements().collect();
    Ok(abgroup::subgroups_grown(d, &universe, |_, _| true)
        .into_iter()
        .map(|elems| Subgroup::from_elems(d, elems))
        .collect())
}

/// All isotropic subgroups. Subgroups of isotropic subgroups are isotropic,
/// so growth by isotropic-compatible elements visits every one.
pub fn isotropic_subgroups(d: &DiscForm) -> Vec<Subgroup> {
    let universe: Vec<Elem> = d.elements().collect();
    abgroup::subgroups_grown(d, &universe, |cur, cand| {
        d.q_value(cand).is_zero()
            && cur.iter().all(|h| d.bilinear(h, cand).is_zero())
    })
    .into_iter()
    .map(|elems| Subgroup::from_elems(d, elems))
    .collect()
}

/// All quasi-isotropic subgroups (isotropic ones included).
pub fn quasi_isotropic_subgroups(d: &DiscForm) -> Vec<Subgroup> {
    let universe: Vec<Elem> = d.elements().collect();
    abgroup::subgroups_grown(d, &universe, |cur, cand| {
        (d.q_value(cand) + d.q_value(cand)).is_integer()
            && cur.iter().all(|h| d.bilinear(h, cand).is_zero())
    })
    .into_iter()
    .map(|elems| Subgroup::from_elems(d, elems))
    .collect()
}

/// Maximal quasi-isotropic subgroup under the ordering: largest order first,
/// then largest isotropic part, then lexicographically least element list.
pub fn max_quasi_isotropic(d: &DiscForm) -> Subgroup {
    let mut best: Option<(u64, u64, Subgroup)> = None;
    for h in quasi_isotropic_subgroups(d) {
        let h0 = h
            .maximal_isotropic_part(d)
            .expect("enumerated subgroups are quasi-isotropic");
        let key = (h.order(), h0.order());
        let better = match &best {
            None => true,
            Some((o, o0, b)) => {
                key.0 > *o
                    || (key.0 == *o && key.1 > *o0)
                    || (key.0 == *o && key.1 == *o0 && h.elems() < b.elems())
            }
        };
        if better {
            best = Some((key.0, key.1, h));
        }
    }
    best.expect("the trivial subgroup is always quasi-isotropic").2
}

/// Order-`p` subgroups of `h0` (assumed isotropic), sorted.
pub fn isotropic_lines(d: &DiscForm, h0: &Subgroup, p: u32) -> Vec<Subgroup> {
    let mut lines: Vec<Subgroup> = Vec::new();
    for gamma in h0.elems() {
        if d.elem_order(gamma) == p {
            let line = Subgroup::generated(d, std::slice::from_ref(gamma));
            if !lines.contains(&line) {
                lines.push(line);
            }
        }
    }
    lines.sort();
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqm::symbol::parse_symbol;

    #[test]
    fn hyperbolic_two_lattice() {
        let d = parse_symbol("U(2)").unwrap();
        let subs = enumerate_subgroups(&d, 256).unwrap();
        assert_eq!(subs.len(), 5);
        let iso = isotropic_subgroups(&d);
        // trivial, <e>, <f>
        assert_eq!(iso.len(), 3);
        let h = max_quasi_isotropic(&d);
        assert_eq!(h.order(), 2);
        assert_eq!(h.elems(), &[vec![0, 0], vec![0, 1]]);
        assert_eq!(h.orthogonal_complement(&d), h);
    }

    #[test]
    fn complement_involution() {
        let d = parse_symbol("3^+1 ⊕ 3^-1").unwrap();
        let h = Subgroup::generated(&d, &[vec![1, 0]]);
        let c = h.orthogonal_complement(&d);
        assert_eq!(c.order(), 3);
        assert!(c.contains(&vec![0, 1]));
        assert_eq!(c.orthogonal_complement(&d), h);
    }

    #[test]
    fn classification_and_linearizer() {
        let d = parse_symbol("2_II^-2").unwrap();
        let h = Subgroup::generated(&d, &[vec![1, 0]]);
        assert_eq!(h.classify(&d), SubgroupKind::QuasiIsotropic);
        let h0 = h.maximal_isotropic_part(&d).unwrap();
        assert_eq!(h0.order(), 1);
        assert_eq!(h.xi(&d, 1).unwrap(), vec![0, 1]);
        // Even multiples of q vanish on H, so xi_2 is the least element of
        // the kernel of pairing with H.
        assert_eq!(h.xi(&d, 2).unwrap(), vec![0, 0]);
        let full = Subgroup::full(&d);
        assert_eq!(full.classify(&d), SubgroupKind::NonIsotropic);
        assert!(full.xi(&d, 1).is_err());
    }

    #[test]
    fn linearizer_represents_q_on_all_of_h() {
        let d = parse_symbol("U(4) ⊕ 2_1^+1").unwrap();
        for h in quasi_isotropic_subgroups(&d) {
            let xi = h.xi(&d, 1).unwrap();
            for elem in h.elems() {
                assert_eq!(d.bilinear(elem, &xi), d.q_value(elem));
            }
            let h0 = h.maximal_isotropic_part(&d).unwrap();
            assert!(h.order() / h0.order() <= 2);
        }
    }

    #[test]
    fn coset_machinery() {
        let d = parse_symbol("U(2)").unwrap();
        let h = Subgroup::generated(&d, &[vec![0, 1]]);
        let reps = h.coset_reps(&d);
        assert_eq!(reps, vec![vec![0, 0], vec![1, 0]]);
        let (rep, delta) = h.decompose_coset(&d, &vec![1, 1]);
        assert_eq!(rep, vec![1, 0]);
        assert_eq!(delta, vec![0, 1]);
    }

    #[test]
    fn lifted_complement_isotropic_case() {
        let d = parse_symbol("U(4)").unwrap();
        let h = Subgroup::generated(&d, &[vec![2, 0]]);
        let (lifted, xi) = h.lift_complement(&d).unwrap();
        assert_eq!(lifted, h.orthogonal_complement(&d));
        assert_eq!(xi, vec![0, 0]);
    }

    #[test]
    fn lifted_complement_odd_quotient() {
        let d = parse_symbol("4_1^+1 ⊕ 3^+1").unwrap();
        let h = Subgroup::generated(&d, &[vec![2, 0]]);
        assert_eq!(h.classify(&d), SubgroupKind::QuasiIsotropic);
        let (lifted, xi) = h.lift_complement(&d).unwrap();
        // Odd-order part of H⊥ = {0,2} × Z/3.
        assert_eq!(lifted.elems(), &[vec![0, 0], vec![0, 1], vec![0, 2]]);
        assert_eq!(xi, vec![1, 0]);
    }

    #[test]
    fn lifted_complement_even_quotient() {
        let d = parse_symbol("4_1^+1 ⊕ 2_1^+1 ⊕ 2_1^+1").unwrap();
        let h = Subgroup::generated(&d, &[vec![2, 0, 0]]);
        assert_eq!(h.classify(&d), SubgroupKind::QuasiIsotropic);
        let (lifted, xi) = h.lift_complement(&d).unwrap();
        assert_eq!(lifted.order(), 4);
        assert!(lifted.contains(&vec![0, 1, 0]));
        assert!(lifted.contains(&vec![0, 0, 1]));
        assert_eq!(xi, vec![1, 0, 0]);
        // xi pairs as q on H and trivially on the complement.
        assert_eq!(d.bilinear(&vec![2, 0, 0], &xi), d.q_value(&vec![2, 0, 0]));
        assert!(lifted.elems().iter().all(|x| d.bilinear(x, &xi).is_zero()));
    }

    #[test]
    fn lifted_complement_rejects_composite_exponent() {
        let d = parse_symbol("4_1^+1 ⊕ 4_7^+1").unwrap();
        let h = Subgroup::generated(&d, &[vec![2, 0]]);
        // H⊥/H is cyclic of order 4 here.
        assert!(h.lift_complement(&d).is_err());
    }

    #[test]
    fn lifted_complement_self_dual() {
        let d = parse_symbol("2_II^-2").unwrap();
        let h = Subgroup::generated(&d, &[vec![1, 0]]);
        let (lifted, xi) = h.lift_complement(&d).unwrap();
        assert_eq!(lifted.order(), 1);
        assert_eq!(xi, vec![0, 1]);
    }

    #[test]
    fn isotropic_line_selection() {
        let d = parse_symbol("U(4)").unwrap();
        let h = Subgroup::generated(&d, &[vec![2, 0]]);
        assert!(h.is_isotropic(&d));
        let lines = isotropic_lines(&d, &h, 2);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0], h);
    }
}
