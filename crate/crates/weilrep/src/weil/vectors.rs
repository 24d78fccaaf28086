//! The indexed vector families the representation permutes up to scalars:
//! averaged characteristic functions of subgroup cosets, their symmetrized
//! variants, the twisted sums attached to a distinguished order-p subgroup,
//! and the isometric lift from a quotient module.

use super::poly::PolyVec;
use super::rep::WeilContext;
use super::word::Letter;
use crate::error::{Error, Result};
use crate::exactnum::{frac_mod1, CycNumber, Rat};
use crate::fqm::{Elem, QuotientForm, Subgroup};
use num::{BigInt, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorKind {
    /// `(1/sqrt|H|) sum_{gamma in H} e((gamma, eta)) e_{lambda + gamma}`.
    Plain,
    /// Symmetrization of `Plain` over negation, with sign `psi`.
    Symmetrized,
    /// Twisted sum over `H-perp/H` attached to an order-p subgroup `J <= H`.
    Twisted,
}

#[derive(Clone, Debug)]
pub struct IndexedVector {
    pub kind: VectorKind,
    pub h: Subgroup,
    pub j: Option<Subgroup>,
    pub eta: Elem,
    pub lambda: Elem,
    pub psi: i8,
    /// Set when the symmetrization collapses to nothing.
    pub is_zero: bool,
    pub coords: PolyVec,
}

/// Representatives of `within / sub`, lex-least in each coset.
pub fn coset_reps_in(
    d: &crate::fqm::DiscForm,
    within: &Subgroup,
    sub: &Subgroup,
) -> Vec<Elem> {
    let mut reps: Vec<Elem> = Vec::with_capacity(within.elems().len() / sub.elems().len());
    let mut seen: Vec<Elem> = Vec::new();
    for x in within.elems() {
        if seen.binary_search(x).is_ok() {
            continue;
        }
        reps.push(x.clone());
        for s in sub.elems() {
            seen.push(d.add(x, s));
        }
        seen.sort();
        seen.dedup();
    }
    reps
}

fn inv_sqrt(n: u64, m: u32) -> CycNumber {
    CycNumber::sqrt_nat(n, m)
        .expect("conductor carries the square root")
        .inv()
        .expect("positive order")
}

/// Whether `x` pairs integrally with every element of `sub`.
pub fn in_orthogonal(ctx: &WeilContext, sub: &Subgroup, x: &Elem) -> bool {
    sub.gens()
        .iter()
        .all(|g| ctx.form().bilinear(g, x).is_integer())
}

pub fn a_vector(ctx: &WeilContext, h: &Subgroup, eta: &Elem, lambda: &Elem) -> IndexedVector {
    let d = ctx.form();
    let mut coords = PolyVec::with_scale(ctx.dim(), ctx.m(), inv_sqrt(h.order(), ctx.m()));
    for g in h.elems() {
        let idx = d.elem_index(&d.add(lambda, g));
        coords.add_monomial(idx, ctx.exponent(&d.bilinear(g, eta)), 1);
    }
    IndexedVector {
        kind: VectorKind::Plain,
        h: h.clone(),
        j: None,
        eta: eta.clone(),
        lambda: lambda.clone(),
        psi: 0,
        is_zero: false,
        coords,
    }
}

/// Averages the pair `(eta, lambda)`, `(-eta, -lambda)` with sign `psi`.
/// When negation stabilizes the index pair the vector either collapses to
/// the plain one or vanishes; vanishing is reported rather than an error.
pub fn a_vector_sym(
    ctx: &WeilContext,
    h: &Subgroup,
    eta: &Elem,
    lambda: &Elem,
    psi: i8,
) -> IndexedVector {
    assert!(psi == 1 || psi == -1, "sign must be +1 or -1");
    let d = ctx.form();
    let hp = h.orthogonal_complement(d);
    let two_lambda_in_h = h.contains(&d.scale(2, lambda));
    let two_eta_in_hp = hp.contains(&d.scale(2, eta));
    if two_lambda_in_h && two_eta_in_hp {
        // The stabilizer is all of {+-1}; the average is the plain vector
        // times (1 + psi * e((2 lambda, eta))) / 2.
        let s = frac_mod1(&d.bilinear(&d.scale(2, lambda), eta));
        let fixed_sign = if s.is_zero() {
            1
        } else {
            assert_eq!(s, Rat::new(BigInt::from(1), BigInt::from(2)));
            -1
        };
        let mut v = a_vector(ctx, h, eta, lambda);
        v.kind = VectorKind::Symmetrized;
        v.psi = psi;
        if fixed_sign != psi {
            v.is_zero = true;
            v.coords = PolyVec::zero(ctx.dim(), ctx.m());
        }
        return v;
    }
    let mut coords = PolyVec::with_scale(
        ctx.dim(),
        ctx.m(),
        inv_sqrt(2 * h.order(), ctx.m()),
    );
    let neg_eta = d.neg(eta);
    let neg_lambda = d.neg(lambda);
    for g in h.elems() {
        coords.add_monomial(
            d.elem_index(&d.add(lambda, g)),
            ctx.exponent(&d.bilinear(g, eta)),
            1,
        );
        coords.add_monomial(
            d.elem_index(&d.add(&neg_lambda, g)),
            ctx.exponent(&d.bilinear(g, &neg_eta)),
            i64::from(psi),
        );
    }
    IndexedVector {
        kind: VectorKind::Symmetrized,
        h: h.clone(),
        j: None,
        eta: eta.clone(),
        lambda: lambda.clone(),
        psi,
        is_zero: false,
        coords,
    }
}

/// Least `l >= 0` with `eta - l*lambda` orthogonal to `j`; `p` bounds the
/// search because the pairings take values in `(1/p)Z`.
pub fn twist_power(
    ctx: &WeilContext,
    j: &Subgroup,
    eta: &Elem,
    lambda: &Elem,
    p: u64,
) -> Result<u64> {
    let d = ctx.form();
    for l in 0..p {
        let shifted = d.sub(eta, &d.scale(l as i64, lambda));
        if in_orthogonal(ctx, j, &shifted) {
            return Ok(l);
        }
    }
    Err(Error::internal(
        "no twist power below the exponent; the pairing with J is degenerate",
    ))
}

/// The twisted vector attached to `H`, an order-p subgroup `J <= H`, and an
/// index pair `(eta, lambda)`. For `lambda` orthogonal to `J` this is the
/// plain vector; otherwise it resums the plain family over `H-perp/H`
/// against the linearizing element of the lifted complement.
pub fn b_vector(
    ctx: &WeilContext,
    h: &Subgroup,
    j: &Subgroup,
    eta: &Elem,
    lambda: &Elem,
) -> Result<IndexedVector> {
    let d = ctx.form();
    let (_lifted, xi) = h.lift_complement(d)?;
    let hp = h.orthogonal_complement(d);
    let a_order = hp.order() / h.order();
    if a_order == 1 {
        return Err(Error::invalid(
            "twisted vectors need a nontrivial quotient H-perp/H",
        ));
    }
    let p = (2..).find(|q| a_order % q == 0).expect("a_order > 1");
    if !j.is_subgroup_of(h) || j.order() != p {
        return Err(Error::invalid(
            "the twisting subgroup must sit in H with order the exponent of H-perp/H",
        ));
    }
    let mut out = IndexedVector {
        kind: VectorKind::Twisted,
        h: h.clone(),
        j: Some(j.clone()),
        eta: eta.clone(),
        lambda: lambda.clone(),
        psi: 0,
        is_zero: false,
        coords: PolyVec::zero(ctx.dim(), ctx.m()),
    };
    if in_orthogonal(ctx, j, lambda) {
        out.coords = a_vector(ctx, h, eta, lambda).coords;
        return Ok(out);
    }
    let l = twist_power(ctx, j, eta, lambda, p)?;
    let xi_l = if l % 2 == 0 { d.zero_elem() } else { xi.clone() };
    let eta_shift = d.sub(eta, &xi_l);
    let mut coords = PolyVec::with_scale(
        ctx.dim(),
        ctx.m(),
        inv_sqrt(a_order * h.order(), ctx.m()),
    );
    for tau in coset_reps_in(d, &hp, h) {
        let pref = ctx.exponent(
            &(d.bilinear(&tau, &eta_shift)
                + d.q_value(&tau) * Rat::from_integer(BigInt::from(l))),
        );
        let base = d.add(lambda, &tau);
        for g in h.elems() {
            coords.add_monomial(
                d.elem_index(&d.add(&base, g)),
                (pref + ctx.exponent(&d.bilinear(g, eta))) % ctx.m(),
                1,
            );
        }
    }
    debug_assert!(
        {
            // The same vector arises by twisting the plain vector on H-perp
            // with l powers of T.
            let start = a_vector(
                ctx,
                &hp,
                &d.sub(&d.sub(eta, &d.scale(l as i64, lambda)), &xi_l),
                lambda,
            );
            let mut v = start.coords;
            for _ in 0..l {
                v = ctx.apply_letter(Letter::T, &v);
            }
            v.scalar_mul(&ctx.e(&(-d.q_value(lambda) * Rat::from_integer(BigInt::from(l)))));
            v.eq_value(&coords)
        },
        "twisted vector disagrees with its T-power form"
    );
    out.coords = coords;
    Ok(out)
}

/// Isometric lift along an isotropic subgroup `J`: a coset basis vector of
/// `J-perp/J` goes to the normalized sum over its preimage in `D`.
pub fn arrow_up(
    ctx: &WeilContext,
    j: &Subgroup,
    quot: &QuotientForm,
    v: &PolyVec,
) -> Result<PolyVec> {
    let d = ctx.form();
    if !j.is_isotropic(d) {
        return Err(Error::invalid("lifts require an isotropic subgroup"));
    }
    let jp = j.orthogonal_complement(d);
    assert_eq!(
        v.dim(),
        quot.form.num_elements(),
        "input must live on the quotient module"
    );
    assert_eq!(
        quot.form.order() * j.order(),
        jp.order(),
        "quotient does not match the subgroup"
    );
    let emb = v.embed(ctx.m());
    let mut out = PolyVec::with_scale(
        ctx.dim(),
        ctx.m(),
        emb.scale.mul(&inv_sqrt(j.order(), ctx.m())).canonical_reduce(),
    );
    for (mu, poly) in emb.coords.iter().enumerate() {
        if poly.iter().all(|c| c.is_zero()) {
            continue;
        }
        let section = quot.section(&quot.form.elem_at(mu));
        for g in j.elems() {
            let idx = d.elem_index(&d.add(&section, g));
            for (k, c) in poly.iter().enumerate() {
                if !c.is_zero() {
                    out.coords[idx][k] += *c;
                }
            }
        }
    }
    debug_assert!(
        super::poly::inner_poly(&out, &out).eq_value(&super::poly::inner_poly(&emb, &emb)),
        "the lift must preserve norms"
    );
    Ok(out)
}
