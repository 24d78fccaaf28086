//! Generic finite abelian group machinery: closures, subgroup enumeration,
//! and constructive structure decomposition. Everything is element-list based
//! and sized for groups of order a few hundred.

use crate::fqm::form::Elem;
use num::Integer;
use std::collections::{BTreeMap, BTreeSet};

/// Group operations on coordinate-vector elements. Implementors provide the
/// ambient arithmetic; quotient groups provide rep-normalized arithmetic.
pub trait GroupOps {
    fn zero(&self) -> Elem;
    fn add(&self, a: &Elem, b: &Elem) -> Elem;
    fn neg(&self, a: &Elem) -> Elem;

    fn scale(&self, k: i64, a: &Elem) -> Elem {
        let mut k = k;
        let mut base = if k < 0 {
            k = -k;
            self.neg(a)
        } else {
            a.clone()
        };
        let mut acc = self.zero();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    fn elem_order(&self, a: &Elem) -> u32 {
        let zero = self.zero();
        let mut x = a.clone();
        let mut n = 1u32;
        while x != zero {
            x = self.add(&x, a);
            n += 1;
        }
        n
    }
}

/// Subgroup generated by `gens`, as a sorted element list.
pub fn closure<G: GroupOps>(g: &G, gens: &[Elem]) -> Vec<Elem> {
    let mut seen: BTreeSet<Elem> = BTreeSet::new();
    seen.insert(g.zero());
    let mut stack = vec![g.zero()];
    while let Some(x) = stack.pop() {
        for gen in gens {
            let y = g.add(&x, gen);
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// All subgroups of the group whose sorted element list is `universe`,
/// optionally restricted to a grow-closed family: a subgroup is visited iff
/// it is reachable from the trivial subgroup by repeatedly adjoining single
/// elements accepted by `grow(current elements, candidate)`. Passing a
/// predicate that always accepts enumerates every subgroup.
pub fn subgroups_grown<G, F>(g: &G, universe: &[Elem], grow: F) -> Vec<Vec<Elem>>
where
    G: GroupOps,
    F: Fn(&[Elem], &Elem) -> bool,
{
    let mut seen: BTreeSet<Vec<Elem>> = BTreeSet::new();
    let trivial = vec![g.zero()];
    seen.insert(trivial.clone());
    let mut stack = vec![(trivial, Vec::<Elem>::new())];
    while let Some((elems, gens)) = stack.pop() {
        for cand in universe {
            if elems.binary_search(cand).is_ok() || !grow(&elems, cand) {
                continue;
            }
            let mut new_gens = gens.clone();
            new_gens.push(cand.clone());
            let new_elems = closure(g, &new_gens);
            if seen.insert(new_elems.clone()) {
                stack.push((new_elems, new_gens));
            }
        }
    }
    seen.into_iter().collect()
}

/// Constructive decomposition of a finite abelian group (given as a sorted,
/// closed element list) into cyclic factors of weakly decreasing orders.
pub struct GroupBasis {
    /// Generators of the cyclic factors.
    pub gens: Vec<Elem>,
    /// Their orders; `orders[i+1]` divides `orders[i]`.
    pub orders: Vec<u32>,
    /// Coordinates of every element with respect to `gens`.
    pub coords: BTreeMap<Elem, Vec<u32>>,
}

pub fn decompose<G: GroupOps>(g: &G, elems: &[Elem]) -> GroupBasis {
    if elems.len() == 1 {
        let mut coords = BTreeMap::new();
        coords.insert(g.zero(), Vec::new());
        return GroupBasis { gens: Vec::new(), orders: Vec::new(), coords };
    }
    let exponent = elems.iter().map(|x| g.elem_order(x)).max().unwrap();
    let lead = elems
        .iter()
        .find(|x| g.elem_order(x) == exponent)
        .expect("some element realizes the exponent")
        .clone();
    let chi = retraction(g, elems, &lead, exponent);
    let kernel: Vec<Elem> = elems.iter().filter(|x| chi[*x] == 0).cloned().collect();
    let rest = decompose(g, &kernel);
    if let Some(&first_rest) = rest.orders.first() {
        assert!(
            exponent % first_rest == 0,
            "factor orders must form a divisibility chain"
        );
    }
    let mut gens = vec![lead.clone()];
    gens.extend(rest.gens);
    let mut orders = vec![exponent];
    orders.extend(rest.orders);
    let mut coords = BTreeMap::new();
    for x in elems {
        let c = chi[x];
        let residue = g.add(x, &g.scale(-(c as i64), &lead));
        let mut v = vec![c];
        v.extend(rest.coords[&residue].iter().copied());
        coords.insert(x.clone(), v);
    }
    assert_eq!(
        orders.iter().map(|&o| o as u64).product::<u64>(),
        elems.len() as u64,
        "factor orders must multiply to the group order"
    );
    GroupBasis { gens, orders, coords }
}

/// Homomorphism `χ: A -> Z/e` with `χ(lead) = 1`, where `e` is the exponent
/// of `A` and `lead` has order `e`. Then `A = ⟨lead⟩ ⊕ ker χ`. Built by
/// extending from `⟨lead⟩` one element at a time; each extension equation
/// `k·v ≡ χ(k·x) (mod e)` is solvable because `e` is the exponent.
fn retraction<G: GroupOps>(
    g: &G,
    elems: &[Elem],
    lead: &Elem,
    exponent: u32,
) -> BTreeMap<Elem, u32> {
    let e = exponent as i64;
    let mut chi: BTreeMap<Elem, u32> = BTreeMap::new();
    let mut multiple = g.zero();
    for k in 0..exponent {
        chi.insert(multiple.clone(), k);
        multiple = g.add(&multiple, lead);
    }
    for x in elems {
        if chi.contains_key(x) {
            continue;
        }
        let mut k = 1i64;
        let mut kx = x.clone();
        while !chi.contains_key(&kx) {
            kx = g.add(&kx, x);
            k += 1;
        }
        let target = chi[&kx] as i64;
        let gcd_ext = k.extended_gcd(&e);
        let d = gcd_ext.gcd;
        assert!(target % d == 0, "retraction extension must be solvable");
        let v = ((target / d) * gcd_ext.x).rem_euclid(e / d);
        let current: Vec<(Elem, u32)> = chi.iter().map(|(a, &b)| (a.clone(), b)).collect();
        for j in 1..k {
            let jx = g.scale(j, x);
            for (s, val) in &current {
                let key = g.add(s, &jx);
                let value = ((*val as i64 + j * v).rem_euclid(e)) as u32;
                chi.insert(key, value);
            }
        }
    }
    chi
}
