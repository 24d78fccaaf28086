//! The recursive integral-basis construction.
//!
//! Recursion shape: a form with several prime parts is the tensor of its
//! Sylow parts. A prime-power part either carries a self-dual
//! quasi-isotropic subgroup (coset vectors span everything), or a smaller
//! isotropic subgroup J (lift a basis of J-perp/J and complete with twisted
//! vectors), or is anisotropic, where an orthogonal cyclic summand splits
//! off until the rank-one base cases remain.

use super::{BasisSpec, BasisTag};
use crate::error::{Error, Result};
use crate::exactnum::{legendre, polyops::conv_cyclic, rat, C128, CycNumber, Rat};
use crate::fqm::{
    isotropic_lines, max_quasi_isotropic, parse_symbol, quotient_form, DiscForm, QuotientForm,
    Subgroup,
};
use crate::weil::vectors::coset_reps_in;
use crate::weil::{a_vector, a_vector_sym, arrow_up, b_vector, Letter, PolyVec, WeilContext};
use num::{BigInt, Integer, ToPrimitive};

/// Construction cap; above this the subgroup searches are impractical.
const MAX_ORDER: u64 = 4096;

pub fn integral_basis(d: &DiscForm) -> Result<BasisSpec> {
    if d.order() > MAX_ORDER {
        return Err(Error::invalid(format!(
            "basis construction capped at module order {MAX_ORDER}, got {}",
            d.order()
        )));
    }
    let ctx = WeilContext::new(d.clone());
    let (vectors, coords) = build_basis(&ctx)?;
    assert_eq!(
        coords.len(),
        d.order() as usize,
        "construction must emit one column per module element"
    );
    Ok(BasisSpec {
        form: d.clone(),
        vectors,
        coords,
    })
}

/// The standard basis `{e_gamma}`, used as the negative control in
/// integrality verification.
pub fn natural_basis(d: &DiscForm) -> BasisSpec {
    let ctx = WeilContext::new(d.clone());
    let n = ctx.dim();
    BasisSpec {
        form: d.clone(),
        vectors: (0..n).map(|index| BasisTag::Natural { index }).collect(),
        coords: (0..n).map(|i| PolyVec::basis(n, ctx.m(), i)).collect(),
    }
}

/// Basis of the rank-one module of odd prime order `p` with sign `sign`.
pub fn prime_basis(p: u64, sign: i8) -> Result<BasisSpec> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::invalid("sign must be +1 or -1"));
    }
    let t = if sign == 1 { 1 } else { least_nonresidue(p) };
    let d = DiscForm::construct(&[p as u32], &[rat(t, p as i64)], &[])?;
    let ctx = WeilContext::new(d.clone());
    let (vectors, coords) = prime_columns(&ctx)?;
    Ok(BasisSpec {
        form: d,
        vectors,
        coords,
    })
}

/// Basis of a rank-one 2-adic module `2_t`.
pub fn two_adic_basis(symbol: &str) -> Result<BasisSpec> {
    let d = parse_symbol(symbol)?;
    if d.order() != 2 {
        return Err(Error::invalid(format!(
            "unsupported symbol {symbol:?}: expected a rank-one 2-adic module"
        )));
    }
    let ctx = WeilContext::new(d.clone());
    let (vectors, coords) = two_adic_columns(&ctx)?;
    Ok(BasisSpec {
        form: d,
        vectors,
        coords,
    })
}

fn is_prime(n: u64) -> bool {
    crate::exactnum::prime_factors(n) == vec![(n, 1)]
}

fn least_nonresidue(p: u64) -> i64 {
    (2..p as i64)
        .find(|&t| legendre(t, p) == -1)
        .expect("odd primes have non-residues")
}

type Columns = (Vec<BasisTag>, Vec<PolyVec>);

fn build_basis(ctx: &WeilContext) -> Result<Columns> {
    let d = ctx.form();
    let n = d.order();
    if n == 1 {
        let h = Subgroup::trivial(d);
        let zero = d.zero_elem();
        let col = a_vector(ctx, &h, &zero, &zero).coords;
        let tag = BasisTag::SelfDualA {
            h,
            eta: zero.clone(),
            lambda: zero,
        };
        return Ok((vec![tag], vec![col]));
    }
    let primes = crate::exactnum::prime_factors(n);
    if primes.len() > 1 {
        let subs: Vec<Subgroup> = primes
            .iter()
            .map(|&(p, _)| {
                let gens: Vec<_> = d
                    .elements()
                    .filter(|x| {
                        let o = u64::from(d.elem_order(x));
                        o > 1 && is_power_of(o, p)
                    })
                    .collect();
                Subgroup::generated(d, &gens)
            })
            .collect();
        return tensor_parts(ctx, &subs);
    }
    let p = primes[0].0;
    let h = max_quasi_isotropic(d);
    let hp = h.orthogonal_complement(d);
    if hp.order() == h.order() {
        return a_basis(ctx, &h);
    }
    let h0 = h.maximal_isotropic_part(d)?;
    if h0.order() > 1 {
        return lift_and_complete(ctx, &h, &hp, &h0, p);
    }
    // No isotropic reduction is available: the module is anisotropic.
    if n == 2 {
        two_adic_columns(ctx)
    } else if n == p {
        prime_columns(ctx)
    } else {
        split_orthogonal(ctx)
    }
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

/// Coset vectors over a self-dual quasi-isotropic subgroup.
fn a_basis(ctx: &WeilContext, h: &Subgroup) -> Result<Columns> {
    let d = ctx.form();
    let hp = h.orthogonal_complement(d);
    let iso = h.is_isotropic(d);
    let mut tags = Vec::new();
    let mut cols = Vec::new();
    for eta in hp.coset_reps(d) {
        for lambda in h.coset_reps(d) {
            let v = a_vector(ctx, h, &eta, &lambda);
            cols.push(v.coords);
            tags.push(if iso {
                BasisTag::SelfDualA {
                    h: h.clone(),
                    eta: eta.clone(),
                    lambda,
                }
            } else {
                BasisTag::QuasiA {
                    h: h.clone(),
                    eta: eta.clone(),
                    lambda,
                }
            });
        }
    }
    Ok((tags, cols))
}

/// Basis through an order-`p` isotropic subgroup `J <= H`: the lift of a
/// basis of `J-perp/J` plus the twisted vectors indexed off `J-perp`.
fn lift_and_complete(
    ctx: &WeilContext,
    h: &Subgroup,
    hp: &Subgroup,
    h0: &Subgroup,
    p: u64,
) -> Result<Columns> {
    let d = ctx.form();
    let j = isotropic_lines(d, h0, p as u32)
        .into_iter()
        .next()
        .ok_or_else(|| Error::internal("nontrivial isotropic part carries no line"))?;
    let jp = j.orthogonal_complement(d);
    let quot = quotient_form(d, &jp, &j)?;
    let inner = integral_basis(&quot.form)?;
    let mut tags = Vec::new();
    let mut cols = Vec::new();
    for (tag, col) in inner.vectors.iter().zip(&inner.coords) {
        cols.push(arrow_up(ctx, &j, &quot, col)?);
        tags.push(BasisTag::Arrow {
            j: j.clone(),
            inner: Box::new(tag.clone()),
        });
    }
    // eta off J-perp, lambda inside it: these stay plain coset vectors.
    for eta in hp.coset_reps(d) {
        if jp.contains(&eta) {
            continue;
        }
        for lambda in coset_reps_in(d, &jp, h) {
            let v = b_vector(ctx, h, &j, &eta, &lambda)?;
            cols.push(v.coords);
            tags.push(BasisTag::BVec {
                h: h.clone(),
                j: j.clone(),
                eta: eta.clone(),
                lambda,
            });
        }
    }
    // lambda off J-perp: the genuinely twisted vectors.
    for eta in h.coset_reps(d) {
        for lambda in hp.coset_reps(d) {
            if jp.contains(&lambda) {
                continue;
            }
            let v = b_vector(ctx, h, &j, &eta, &lambda)?;
            cols.push(v.coords);
            tags.push(BasisTag::BVec {
                h: h.clone(),
                j: j.clone(),
                eta: eta.clone(),
                lambda,
            });
        }
    }
    Ok((tags, cols))
}

/// `rho(T)^l` images of the two symmetrized coset vectors on `Z/p`.
fn prime_columns(ctx: &WeilContext) -> Result<Columns> {
    let d = ctx.form();
    let p = d.order();
    let g = d
        .elements()
        .find(|x| u64::from(d.elem_order(x)) == p)
        .ok_or_else(|| Error::internal("prime-order module has a generator"))?;
    let t = (d.q_value(&g) * Rat::from_integer(BigInt::from(p)))
        .to_integer()
        .mod_floor(&BigInt::from(p))
        .to_i64()
        .expect("residue fits");
    let sign = legendre(t, p) as i8;
    let full = Subgroup::full(d);
    let zero = d.zero_elem();
    let mut tags = Vec::new();
    let mut cols = Vec::new();
    let even = a_vector_sym(ctx, &full, &zero, &zero, 1);
    let mut col = even.coords;
    for l in 0..=(p - 1) / 2 {
        if l > 0 {
            col = ctx.apply_letter(Letter::T, &col);
        }
        cols.push(col.clone());
        tags.push(BasisTag::PrimeEven {
            p,
            sign,
            l: l as u32,
        });
    }
    let odd = a_vector_sym(ctx, &full, &g, &zero, -1);
    let mut col = odd.coords;
    for l in 0..=(p - 3) / 2 {
        if l > 0 {
            col = ctx.apply_letter(Letter::T, &col);
        }
        cols.push(col.clone());
        tags.push(BasisTag::PrimeOdd {
            p,
            sign,
            l: l as u32,
        });
    }
    Ok((tags, cols))
}

/// The coset vector over the full module and its `rho(T)` image on `2_t`.
fn two_adic_columns(ctx: &WeilContext) -> Result<Columns> {
    let d = ctx.form();
    let one = d.elem_at(d.num_elements() - 1);
    let t = (d.q_value(&one) * Rat::from_integer(BigInt::from(4)))
        .to_integer()
        .mod_floor(&BigInt::from(8))
        .to_i64()
        .expect("residue fits");
    let sign = if t == 1 || t == 7 { "+1" } else { "-1" };
    let symbol = format!("2_{t}^{sign}");
    let full = Subgroup::full(d);
    let zero = d.zero_elem();
    let a = a_vector(ctx, &full, &zero, &zero);
    let ta = ctx.apply_letter(Letter::T, &a.coords);
    let tags = (0..2)
        .map(|l| BasisTag::TwoAdic {
            symbol: symbol.clone(),
            l,
        })
        .collect();
    Ok((tags, vec![a.coords, ta]))
}

/// Splits off the first orthogonal cyclic summand and tensors the halves.
fn split_orthogonal(ctx: &WeilContext) -> Result<Columns> {
    let d = ctx.form();
    for x in d.elements() {
        if x == d.zero_elem() {
            continue;
        }
        let cyc = Subgroup::generated(d, std::slice::from_ref(&x));
        if cyc.order() == d.order() {
            continue;
        }
        let comp = cyc.orthogonal_complement(d);
        if cyc.order() * comp.order() != d.order() {
            continue;
        }
        if cyc.elems().iter().filter(|e| comp.contains(e)).count() != 1 {
            continue;
        }
        return tensor_parts(ctx, &[cyc, comp]);
    }
    Err(Error::internal(
        "anisotropic module admits no orthogonal cyclic summand",
    ))
}

/// Basis of a direct sum as entrywise products of the parts' columns.
fn tensor_parts(ctx: &WeilContext, subs: &[Subgroup]) -> Result<Columns> {
    let d = ctx.form();
    let trivial = Subgroup::trivial(d);
    let mut parts: Vec<(QuotientForm, BasisSpec)> = Vec::with_capacity(subs.len());
    for s in subs {
        let q = quotient_form(d, s, &trivial)?;
        let b = integral_basis(&q.form)?;
        parts.push((q, b));
    }
    let sizes: Vec<usize> = parts.iter().map(|(_, b)| b.dim()).collect();
    let total: usize = sizes.iter().product();
    assert_eq!(total as u64, d.order(), "parts must exhaust the module");
    let mut tags = Vec::with_capacity(total);
    let mut cols = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut idx = vec![0usize; sizes.len()];
        for k in 0..sizes.len() {
            let stride: usize = sizes[k + 1..].iter().product();
            idx[k] = rem / stride;
            rem %= stride;
        }
        tags.push(BasisTag::Tensor {
            children: parts
                .iter()
                .zip(&idx)
                .map(|((_, b), &i)| b.vectors[i].clone())
                .collect(),
        });
        cols.push(tensor_column(ctx, &parts, &idx));
    }
    Ok((tags, cols))
}

fn tensor_column(ctx: &WeilContext, parts: &[(QuotientForm, BasisSpec)], idx: &[usize]) -> PolyVec {
    let d = ctx.form();
    let m = ctx.m();
    let mut one = vec![C128(0); m as usize];
    one[0] = C128(1);
    let mut scale = CycNumber::one(m);
    let mut entries: Vec<(crate::fqm::Elem, Vec<C128>)> = vec![(d.zero_elem(), one)];
    for ((q, b), &i) in parts.iter().zip(idx) {
        let col = b.coords[i].embed(m);
        scale = scale.mul(&col.scale);
        let mut next = Vec::with_capacity(entries.len() * col.support().len());
        for s in col.support() {
            let amb = q.section(&q.form.elem_at(s));
            for (e, poly) in &entries {
                next.push((d.add(e, &amb), conv_cyclic(poly, &col.coords[s])));
            }
        }
        entries = next;
    }
    let mut out = PolyVec::with_scale(d.num_elements(), m, scale.canonical_reduce());
    for (e, poly) in entries {
        let k = d.elem_index(&e);
        debug_assert!(
            out.coords[k].iter().all(|c| c.0 == 0),
            "tensor components must hit distinct module elements"
        );
        out.coords[k] = poly;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weil::inner_poly;

    fn count_tags(tags: &[BasisTag], pred: impl Fn(&BasisTag) -> bool) -> usize {
        tags.iter().filter(|t| pred(t)).count()
    }

    #[test]
    fn trivial_module_basis() {
        let d = DiscForm::construct(&[], &[], &[]).unwrap();
        let b = integral_basis(&d).unwrap();
        assert_eq!(b.dim(), 1);
        let c = b.coords[0].to_cyc();
        assert!(c[0].sub(&CycNumber::one(8)).is_zero());
    }

    #[test]
    fn hyperbolic_two_is_four_coset_vectors() {
        let d = parse_symbol("U(2)").unwrap();
        let b = integral_basis(&d).unwrap();
        assert_eq!(b.dim(), 4);
        for tag in &b.vectors {
            match tag {
                BasisTag::SelfDualA { h, .. } => assert_eq!(h.order(), 2),
                other => panic!("expected coset vectors, got {other:?}"),
            }
        }
        // Self-dual coset vectors form an orthonormal family.
        for i in 0..4 {
            for k in 0..4 {
                let g = inner_poly(&b.coords[i], &b.coords[k]).to_cyc();
                let expect = CycNumber::from_int(i64::from(i == k), 8);
                assert!(g.sub(&expect).is_zero());
            }
        }
    }

    #[test]
    fn cyclic_27_lifts_three_and_twists_24() {
        let d = DiscForm::construct(&[27], &[rat(1, 27)], &[]).unwrap();
        let b = integral_basis(&d).unwrap();
        assert_eq!(b.dim(), 27);
        let lifted = count_tags(&b.vectors, |t| matches!(t, BasisTag::Arrow { .. }));
        let twisted = count_tags(&b.vectors, |t| matches!(t, BasisTag::BVec { .. }));
        assert_eq!((lifted, twisted), (3, 24));
        // The quotient by the order-3 isotropic line is the odd prime module,
        // so the lifted tags carry the rank-one construction.
        for tag in &b.vectors {
            if let BasisTag::Arrow { j, inner } = tag {
                assert_eq!(j.order(), 3);
                assert!(matches!(
                    **inner,
                    BasisTag::PrimeEven { p: 3, .. } | BasisTag::PrimeOdd { p: 3, .. }
                ));
            }
        }
    }

    #[test]
    fn quasi_self_dual_four_adic() {
        let d = parse_symbol("4_1^+1").unwrap();
        let b = integral_basis(&d).unwrap();
        assert_eq!(b.dim(), 4);
        assert_eq!(
            count_tags(&b.vectors, |t| matches!(t, BasisTag::QuasiA { .. })),
            4
        );
    }

    #[test]
    fn prime_basis_counts_and_rank() {
        let b3 = prime_basis(3, 1).unwrap();
        assert_eq!(b3.dim(), 3);
        assert_eq!(
            count_tags(&b3.vectors, |t| matches!(t, BasisTag::PrimeEven { .. })),
            2
        );
        assert_eq!(
            count_tags(&b3.vectors, |t| matches!(t, BasisTag::PrimeOdd { .. })),
            1
        );
        for sign in [1, -1] {
            let b5 = prime_basis(5, sign).unwrap();
            assert_eq!(b5.dim(), 5);
            assert_eq!(b5.coords_matrix().rank(), 5);
        }
        assert!(prime_basis(4, 1).is_err());
        assert!(prime_basis(2, 1).is_err());
    }

    #[test]
    fn prime_even_part_t_eigenvalues_distinct() {
        // rho(T) is diagonal on e_gamma; the symmetric subspace has the
        // (p+1)/2 eigenvalues e(q(j)) = zeta^(j^2), pairwise distinct.
        let p = 5u64;
        let d = parse_symbol("5^+1").unwrap();
        let mut eigen = Vec::new();
        for j in 0..=(p - 1) / 2 {
            let q = d.q_value(&vec![j as u32]);
            eigen.push(q);
        }
        eigen.sort();
        eigen.dedup();
        assert_eq!(eigen.len(), ((p + 1) / 2) as usize);
    }

    #[test]
    fn two_adic_basis_identities() {
        let b = two_adic_basis("2_1^+1").unwrap();
        assert_eq!(b.dim(), 2);
        let ctx = WeilContext::new(b.form.clone());
        let m = ctx.m();
        let i = CycNumber::root_of_unity(i64::from(m / 4), m);
        let one_plus_i = CycNumber::one(m).add(&i);
        let one_minus_i = CycNumber::one(m).sub(&i);
        let a = &b.coords[0];
        let ta = &b.coords[1];
        // rho(T)^2 a = (1+i) rho(T) a - i a
        let tta = ctx.apply_letter(Letter::T, ta);
        let mut rhs1 = ta.to_cyc();
        let a_cyc = a.to_cyc();
        for (k, v) in rhs1.iter_mut().enumerate() {
            *v = v.mul(&one_plus_i).sub(&a_cyc[k].mul(&i));
        }
        let lhs1 = tta.to_cyc();
        assert!(lhs1.iter().zip(&rhs1).all(|(x, y)| x.sub(y).is_zero()));
        // rho(S) rho(T) a = (1-i) a + i rho(T) a
        let sta = ctx.apply_letter(Letter::S, ta);
        let ta_cyc = ta.to_cyc();
        let lhs2 = sta.to_cyc();
        for (k, x) in lhs2.iter().enumerate() {
            let y = a_cyc[k].mul(&one_minus_i).add(&ta_cyc[k].mul(&i));
            assert!(x.sub(&y).is_zero());
        }
        // rho(S) a = rho(T) a - i a
        let sa = ctx.apply_letter(Letter::S, a);
        let lhs3 = sa.to_cyc();
        for (k, x) in lhs3.iter().enumerate() {
            let y = ta_cyc[k].sub(&a_cyc[k].mul(&i));
            assert!(x.sub(&y).is_zero());
        }
        assert!(two_adic_basis("2_II^+2").is_err());
        assert!(two_adic_basis("3^+1").is_err());
    }

    #[test]
    fn tensor_matches_part_products() {
        let d = parse_symbol("2_1^+1 ⊕ 3^+1").unwrap();
        let b = integral_basis(&d).unwrap();
        assert_eq!(b.dim(), 6);
        let d2 = parse_symbol("2_1^+1").unwrap();
        let d3 = parse_symbol("3^+1").unwrap();
        let b2 = integral_basis(&d2).unwrap();
        let b3 = integral_basis(&d3).unwrap();
        let m = WeilContext::new(d.clone()).m();
        for (flat, col) in b.coords.iter().enumerate() {
            let (i2, i3) = (flat / 3, flat % 3);
            let c2 = b2.coords[i2].embed(m).to_cyc();
            let c3 = b3.coords[i3].embed(m).to_cyc();
            let full = col.to_cyc();
            for (x2, v2) in c2.iter().enumerate() {
                for (x3, v3) in c3.iter().enumerate() {
                    let amb = d.elem_index(&vec![x2 as u32, x3 as u32]);
                    assert!(full[amb].sub(&v2.mul(v3)).is_zero());
                }
            }
        }
    }

    #[test]
    fn eight_adic_tower_counts() {
        let d = DiscForm::construct(&[8], &[rat(1, 16)], &[]).unwrap();
        let b = integral_basis(&d).unwrap();
        assert_eq!(b.dim(), 8);
        let lifted = count_tags(&b.vectors, |t| matches!(t, BasisTag::Arrow { .. }));
        let twisted = count_tags(&b.vectors, |t| matches!(t, BasisTag::BVec { .. }));
        assert_eq!((lifted, twisted), (2, 6));
    }

    #[test]
    fn anisotropic_split_tensors() {
        // 2_1 + 4_1 has no isotropic vector and no self-dual quasi-isotropic
        // subgroup; the construction must split it orthogonally.
        let d = parse_symbol("2_1^+1 ⊕ 4_1^+1").unwrap();
        let b = integral_basis(&d).unwrap();
        assert_eq!(b.dim(), 8);
        assert!(b
            .vectors
            .iter()
            .all(|t| matches!(t, BasisTag::Tensor { .. })));
        assert_eq!(b.coords_matrix().rank(), 8);
    }

    #[test]
    fn natural_basis_is_standard() {
        let d = parse_symbol("3^+1").unwrap();
        let b = natural_basis(&d);
        assert!(b.coords_matrix().is_identity());
    }

    #[test]
    fn bound_is_enforced() {
        let d = parse_symbol("U(128)").unwrap();
        assert!(integral_basis(&d).is_err());
    }
}
