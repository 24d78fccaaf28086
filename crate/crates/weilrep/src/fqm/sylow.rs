//! Sylow decomposition of a finite quadratic module. The `p`-parts of a form
//! are mutually orthogonal, so `D` is the orthogonal direct sum of its Sylow
//! forms; `split` and `combine` translate elements both ways.

use crate::fqm::form::{DiscForm, Elem};
use num::Integer;

pub struct SylowPart {
    pub p: u64,
    pub form: DiscForm,
    /// Positions of the ambient coordinates with nontrivial `p`-part, in
    /// order; `form.orders()[k] = p^v` where `v = v_p(orders[pos[k]])`.
    pos: Vec<usize>,
    /// CRT multipliers: the ambient image of the `k`-th part generator is
    /// `mult[k] · e_{pos[k]}`.
    mult: Vec<u32>,
}

pub struct SylowDecomp {
    pub parts: Vec<SylowPart>,
}

fn p_val(mut n: u32, p: u64) -> (u32, u32) {
    let mut pw = 1u32;
    while n as u64 % p == 0 {
        n /= p as u32;
        pw *= p as u32;
    }
    (pw, n)
}

impl SylowPart {
    /// Component of an ambient element in this part.
    pub fn project(&self, d: &DiscForm, x: &Elem) -> Elem {
        let _ = d;
        self.pos
            .iter()
            .zip(self.form.orders())
            .map(|(&i, &pk)| x[i] % pk)
            .collect()
    }

    /// Ambient image of a part element.
    pub fn embed(&self, d: &DiscForm, a: &Elem) -> Elem {
        let mut out = d.zero_elem();
        for (k, &i) in self.pos.iter().enumerate() {
            let n = d.orders()[i] as u64;
            out[i] = ((a[k] as u64 * self.mult[k] as u64) % n) as u32;
        }
        out
    }
}

impl SylowDecomp {
    pub fn split(&self, d: &DiscForm, x: &Elem) -> Vec<Elem> {
        self.parts.iter().map(|p| p.project(d, x)).collect()
    }

    pub fn combine(&self, d: &DiscForm, parts: &[Elem]) -> Elem {
        let mut out = d.zero_elem();
        for (part, a) in self.parts.iter().zip(parts) {
            out = d.add(&out, &part.embed(d, a));
        }
        out
    }
}

pub fn sylow_decompose(d: &DiscForm) -> SylowDecomp {
    let mut primes: Vec<u64> = Vec::new();
    for &n in d.orders() {
        for (p, _) in crate::exactnum::prime_factors(n as u64) {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort_unstable();

    let mut parts = Vec::new();
    for p in primes {
        let mut pos = Vec::new();
        let mut mult = Vec::new();
        let mut orders = Vec::new();
        for (i, &n) in d.orders().iter().enumerate() {
            let (pk, cof) = p_val(n, p);
            if pk == 1 {
                continue;
            }
            // c ≡ 1 mod p^v, c ≡ 0 mod n/p^v.
            let inv = mod_inverse(cof as i64, pk as i64);
            let c = (cof as u64 * inv as u64 % n as u64) as u32;
            pos.push(i);
            mult.push(c);
            orders.push(pk);
        }
        let gens: Vec<Elem> = (0..pos.len())
            .map(|k| {
                let mut e = d.zero_elem();
                e[pos[k]] = mult[k];
                e
            })
            .collect();
        let q_diag: Vec<_> = gens.iter().map(|g| d.q_value(g)).collect();
        let mut b_off = Vec::new();
        for i in 0..gens.len() {
            for j in (i + 1)..gens.len() {
                let v = d.bilinear(&gens[i], &gens[j]);
                if !num::Zero::is_zero(&v) {
                    b_off.push((i, j, v));
                }
            }
        }
        let form = DiscForm::construct(&orders, &q_diag, &b_off)
            .expect("Sylow parts of a valid form are valid");
        parts.push(SylowPart { p, form, pos, mult });
    }
    SylowDecomp { parts }
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    let g = a.extended_gcd(&m);
    assert_eq!(g.gcd, 1, "CRT multiplier must be invertible");
    g.x.rem_euclid(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::frac_mod1;
    use crate::fqm::symbol::parse_symbol;
    use num::Zero;

    #[test]
    fn hyperbolic_six_splits_into_two_and_three_parts() {
        let d = parse_symbol("U(6)").unwrap();
        let s = sylow_decompose(&d);
        assert_eq!(s.parts.len(), 2);
        assert_eq!(s.parts[0].p, 2);
        assert_eq!(s.parts[0].form.order(), 4);
        assert_eq!(s.parts[1].p, 3);
        assert_eq!(s.parts[1].form.order(), 9);
        assert_eq!(s.parts[0].form, parse_symbol("U(2)").unwrap());

        for x in d.elements() {
            let split = s.split(&d, &x);
            assert_eq!(s.combine(&d, &split), x);
            // q is additive across parts.
            let mut total = d.q_value(&x);
            for (part, a) in s.parts.iter().zip(&split) {
                total -= part.form.q_value(a);
            }
            assert!(frac_mod1(&total).is_zero());
        }
    }

    #[test]
    fn signatures_add_over_parts() {
        let d = parse_symbol("4_1^+1 ⊕ 3^-1 ⊕ 5^+1").unwrap();
        let s = sylow_decompose(&d);
        let total: u32 = s.parts.iter().map(|p| p.form.signature() as u32).sum();
        assert_eq!(total % 8, d.signature() as u32);
        assert_eq!(s.parts.iter().map(|p| p.form.order()).product::<u64>(), d.order());
    }

    #[test]
    fn prime_power_form_has_single_part() {
        let d = parse_symbol("3^+1 ⊕ 3^-1").unwrap();
        let s = sylow_decompose(&d);
        assert_eq!(s.parts.len(), 1);
        assert_eq!(s.parts[0].form, d);
        let t = sylow_decompose(&DiscForm::trivial());
        assert!(t.parts.is_empty());
    }
}
