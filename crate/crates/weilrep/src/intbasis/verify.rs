//! Independent verification that a basis conjugates the representation into
//! algebraic-integer matrices.
//!
//! For a word `w` the conjugated matrix is `C = G⁻¹ B† ρ(w) B` where
//! `G = B† B`. The construction keeps all columns orthonormal except inside
//! the anisotropic base-case families, so `G` is the identity outside small
//! diagonal blocks; those blocks are found from the computed Gram matrix
//! itself, never from the construction tags. `B† ρ(w) B` stays in the
//! integer polynomial layer, and each block inverse enters as a cleared
//! integer numerator with one denominator, so the integrality test per entry
//! is a single exact divisibility check.
//!
//! The letters shift polynomial exponents by multiples of `M/level` only,
//! and basis coordinates occupy the same lattice, so all convolutions run at
//! the compressed modulus `L = M/g` where `g` divides every populated index.
//! Only the per-entry scale multiplications return to the full conductor.

use super::modinv::integer_block_inverse;
use super::BasisSpec;
use crate::exactnum::{
    cyclotomic_poly,
    polyops::{add_shifted, conv_cyclic, reduce_mod_phi},
    C128, CycNumber, Rat,
};
use crate::fqm::DiscForm;
use crate::linalg::CycMatrix;
use crate::weil::poly::scale_parts;
use crate::weil::{Letter, MpWord, PolyVec, WeilContext};
use num::{BigInt, Integer, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RANDOM_WORDS: usize = 50;
const MAX_WORD_LEN: usize = 10;
const WORD_SEED: u64 = 0x2026_0819;

#[derive(Clone, Debug)]
pub struct IntegralityReport {
    pub words: Vec<MpWord>,
    /// Least common denominator over the entries of each conjugated matrix.
    pub worst_denominators: Vec<BigInt>,
    pub verdict: bool,
}

/// Rows of one non-identity Gram block, with the block inverse cleared to
/// integer numerators over one denominator per row.
struct GramBlock {
    rows: Vec<usize>,
    num: Vec<Vec<Vec<C128>>>,
    den: Vec<BigInt>,
}

fn find(uf: &mut [usize], mut i: usize) -> usize {
    while uf[i] != i {
        uf[i] = uf[uf[i]];
        i = uf[i];
    }
    i
}

/// Keeps every populated index on the stride lattice and drops the rest.
fn compress(poly: &[C128], g: usize) -> Vec<C128> {
    let mut out = vec![C128(0); poly.len() / g];
    for (idx, c) in poly.iter().enumerate() {
        if c.0 == 0 {
            continue;
        }
        assert!(idx % g == 0, "coefficient off the stride lattice");
        out[idx / g] = *c;
    }
    out
}

fn expand(poly: &[C128], g: usize, m: u32) -> Vec<C128> {
    let mut out = vec![C128(0); m as usize];
    for (t, c) in poly.iter().enumerate() {
        out[t * g] = *c;
    }
    out
}

fn conj_comp(p: &[C128]) -> Vec<C128> {
    let lm = p.len();
    let mut out = vec![C128(0); lm];
    out[0] = p[0];
    for (k, c) in p.iter().enumerate().skip(1) {
        out[lm - k] = *c;
    }
    out
}

/// Hermitian pairing of compressed coordinate vectors, reduced once.
fn inner_comp(u: &[Vec<C128>], v: &[Vec<C128>], lm: u32, phi_l: &[i64]) -> Vec<C128> {
    let mut acc = vec![C128(0); lm as usize];
    for (p, q) in u.iter().zip(v) {
        if p.iter().all(|c| c.0 == 0) || q.iter().all(|c| c.0 == 0) {
            continue;
        }
        let c = conj_comp(q);
        for (k, x) in conv_cyclic(p, &c).into_iter().enumerate() {
            acc[k] += x;
        }
    }
    reduce_mod_phi(&mut acc, phi_l);
    acc
}

fn raw_i128(poly: &[C128]) -> Vec<i128> {
    poly.iter().map(|c| c.0).collect()
}

/// Block inverse rows via modular evaluation; `None` falls back to row
/// reduction. The Gram block is `norm` times the integer matrix `raw`.
fn fast_block_rows(
    raw: &[Vec<Vec<i128>>],
    lm: u32,
    norm: &Rat,
) -> Option<(Vec<Vec<Vec<C128>>>, Vec<BigInt>)> {
    let rows = integer_block_inverse(raw, lm)?;
    let k = raw.len();
    let mut num = Vec::with_capacity(k);
    let mut den = Vec::with_capacity(k);
    for a in 0..k {
        let mut d: BigInt = &rows.den[a] * norm.numer();
        let mut row: Vec<Vec<BigInt>> = rows.num[a]
            .iter()
            .map(|p| p.iter().map(|c| c * norm.denom()).collect())
            .collect();
        let mut shared = d.clone();
        for p in &row {
            for c in p {
                if !c.is_zero() {
                    shared = shared.gcd(c);
                }
            }
        }
        if !shared.is_one() {
            d /= &shared;
            for p in row.iter_mut() {
                for c in p.iter_mut() {
                    *c /= &shared;
                }
            }
        }
        let crow: Option<Vec<Vec<C128>>> = row
            .iter()
            .map(|p| p.iter().map(|c| c.to_i128().map(C128)).collect())
            .collect();
        num.push(crow?);
        den.push(d);
    }
    Some((num, den))
}

/// Generic block inverse through field row reduction, cleared per row.
fn slow_block_rows(
    raw: &[Vec<Vec<i128>>],
    lm: u32,
    norm: &Rat,
) -> (Vec<Vec<Vec<C128>>>, Vec<BigInt>) {
    let k = raw.len();
    let gb = CycMatrix::from_fn(k, k, |a, b| {
        CycNumber::from_integer_coeffs(&raw[a][b], lm).scale(norm)
    });
    let ginv = gb.inverse().expect("basis Gram block must be invertible");
    let mut num = Vec::with_capacity(k);
    let mut den = Vec::with_capacity(k);
    for a in 0..k {
        let parts: Vec<(Vec<C128>, BigInt)> =
            (0..k).map(|b| scale_parts(ginv.at(a, b), lm)).collect();
        let row_den = parts
            .iter()
            .fold(BigInt::one(), |acc, (_, dn)| acc.lcm(dn));
        let row_num: Vec<Vec<C128>> = parts
            .iter()
            .map(|(np, dn)| {
                let f = (&row_den / dn).to_i128().expect("block denominator fits");
                np.iter().map(|c| C128(c.0 * f)).collect()
            })
            .collect();
        num.push(row_num);
        den.push(row_den);
    }
    (num, den)
}

/// Whether `(compressed poly) * snum / den` lies in `Z[zeta_m]`.
fn integral_sparse(
    poly: &[C128],
    g: usize,
    snum: &[C128],
    den: &BigInt,
    phi_m: &[i64],
    m: u32,
) -> bool {
    let Some(den) = den.to_i128() else {
        return false;
    };
    let mut prod = vec![C128(0); m as usize];
    for (t, c) in poly.iter().enumerate() {
        if c.0 == 0 {
            continue;
        }
        add_shifted(&mut prod, snum, t * g, c);
    }
    reduce_mod_phi(&mut prod, phi_m);
    prod.iter().all(|c| c.0.rem_euclid(den) == 0)
}

/// Least common denominator of the canonical form of `scale * poly / den`.
fn canonical_denominator(poly: &[C128], scale: &CycNumber, den: &BigInt, m: u32) -> BigInt {
    let value = CycNumber::from_integer_coeffs(&raw_i128(poly), m)
        .mul(&scale.embed(m).expect("scale embeds"))
        .scale(&crate::exactnum::Rat::new(BigInt::one(), den.clone()))
        .canonical_reduce();
    let mut out = BigInt::one();
    for q in value.coeffs() {
        out = out.lcm(q.denom());
    }
    out
}

pub fn verify_integrality(d: &DiscForm, basis: &BasisSpec) -> IntegralityReport {
    let ctx = WeilContext::new(d.clone());
    let n = ctx.dim();
    let m = ctx.m();
    let cols = &basis.coords;
    assert_eq!(cols.len(), n, "basis must have one column per element");

    // T and S shift exponents by multiples of m/level; the basis columns
    // narrow the lattice further or not at all.
    let mut g = (m / d.level().max(1)) as usize;
    'stride: for c in cols.iter() {
        for p in &c.coords {
            for (idx, v) in p.iter().enumerate() {
                if v.0 != 0 {
                    g = g.gcd(&idx);
                    if g == 1 {
                        break 'stride;
                    }
                }
            }
        }
    }
    let g = g.max(1);
    let lm = (m as usize / g) as u32;
    let phi_m = cyclotomic_poly(m);
    let phi_l = cyclotomic_poly(lm);
    let comp: Vec<Vec<Vec<C128>>> = cols
        .iter()
        .map(|c| c.coords.iter().map(|p| compress(p, g)).collect())
        .collect();
    let scales: Vec<CycNumber> = cols.iter().map(|c| c.scale.clone()).collect();

    let t_phase = std::time::Instant::now();
    // Gram matrix in the compressed polynomial layer, reduced once.
    let mut gram: Vec<Vec<Vec<C128>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(inner_comp(&comp[i], &comp[j], lm, &phi_l));
        }
        gram.push(row);
    }

    eprintln!("[timing] gram: {:?}", t_phase.elapsed());
    let t_phase = std::time::Instant::now();
    // Non-identity structure decomposes into connected components. Column
    // scales never vanish, so a zero compressed poly means a zero entry.
    let mut uf: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if gram[i][j].iter().any(|c| c.0 != 0) {
                let (a, b) = (find(&mut uf, i), find(&mut uf, j));
                uf[a] = b;
            }
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut uf, i);
        members[r].push(i);
    }
    let mut blocks: Vec<GramBlock> = Vec::new();
    let mut block_row: Vec<Option<(usize, usize)>> = vec![None; n];
    for comp_rows in members.into_iter().filter(|c| !c.is_empty()) {
        if comp_rows.len() == 1 {
            let i = comp_rows[0];
            let val = CycNumber::from_integer_coeffs(&raw_i128(&gram[i][i]), lm)
                .embed(m)
                .expect("compressed values embed")
                .mul(&scales[i].mul(&scales[i].conj()));
            assert!(
                val.sub(&CycNumber::one(m)).is_zero(),
                "basis column {i} must have unit norm"
            );
            continue;
        }
        // The scale-factored path below needs one shared column scale; its
        // square norm is rational, so the block values live at the
        // compressed conductor.
        let s0 = &scales[comp_rows[0]];
        for &i in &comp_rows[1..] {
            assert!(
                scales[i].sub(s0).is_zero(),
                "columns of one Gram block must share the normalization"
            );
        }
        let norm = s0
            .mul(&s0.conj())
            .to_rat()
            .expect("block normalization has a rational square norm");
        let k = comp_rows.len();
        let raw: Vec<Vec<Vec<i128>>> = comp_rows
            .iter()
            .map(|&a| {
                comp_rows
                    .iter()
                    .map(|&b| raw_i128(&gram[a][b]))
                    .collect()
            })
            .collect();
        let (num, den) =
            fast_block_rows(&raw, lm, &norm).unwrap_or_else(|| slow_block_rows(&raw, lm, &norm));
        for (a, &i) in comp_rows.iter().enumerate() {
            block_row[i] = Some((blocks.len(), a));
        }
        blocks.push(GramBlock {
            rows: comp_rows,
            num,
            den,
        });
    }

    // Scales repeat across columns; group them so each word reuses one
    // cleared numerator/denominator pair per class and column.
    let mut class_reps: Vec<usize> = Vec::new();
    let mut scale_class = vec![0usize; n];
    for i in 0..n {
        let found = class_reps
            .iter()
            .position(|&r| scales[i].sub(&scales[r]).is_zero());
        scale_class[i] = match found {
            Some(c) => c,
            None => {
                class_reps.push(i);
                class_reps.len() - 1
            }
        };
    }

    // Generator letters first, then the seeded random words.
    let mut words: Vec<MpWord> = [Letter::T, Letter::TInv, Letter::S, Letter::SInv]
        .into_iter()
        .map(|l| MpWord::from_letters(vec![l]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(WORD_SEED);
    let alphabet = [Letter::T, Letter::TInv, Letter::S, Letter::SInv];
    for _ in 0..RANDOM_WORDS {
        let len = rng.random_range(1..=MAX_WORD_LEN);
        let letters: Vec<Letter> = (0..len)
            .map(|_| alphabet[rng.random_range(0..alphabet.len())])
            .collect();
        words.push(MpWord::from_letters(letters));
    }

    let ws = WorkSet {
        g,
        lm,
        phi_m,
        phi_l,
        comp,
        scales,
        blocks,
        block_row,
        scale_class,
        n_classes: class_reps.len(),
    };
    eprintln!("[timing] blocks total: {:?}", t_phase.elapsed());
    let t_phase = std::time::Instant::now();
    let mut worst_denominators = Vec::with_capacity(words.len());
    let mut verdict = true;
    for w in &words {
        let (ok, den) = check_word(&ctx, &ws, cols, w);
        verdict &= ok;
        worst_denominators.push(den);
    }
    eprintln!("[timing] words: {:?}", t_phase.elapsed());

    IntegralityReport {
        words,
        worst_denominators,
        verdict,
    }
}

/// Per-form state shared by every word check.
struct WorkSet {
    g: usize,
    lm: u32,
    phi_m: std::sync::Arc<Vec<i64>>,
    phi_l: std::sync::Arc<Vec<i64>>,
    comp: Vec<Vec<Vec<C128>>>,
    scales: Vec<CycNumber>,
    blocks: Vec<GramBlock>,
    block_row: Vec<Option<(usize, usize)>>,
    scale_class: Vec<usize>,
    n_classes: usize,
}

/// Checks integrality of `G⁻¹ B† ρ(w) B` and returns the matrix denominator.
fn check_word(ctx: &WeilContext, ws: &WorkSet, cols: &[PolyVec], w: &MpWord) -> (bool, BigInt) {
    let n = cols.len();
    let m = ctx.m();
    let mut rho: Vec<Vec<Vec<C128>>> = Vec::with_capacity(n);
    let mut rho_scale: Vec<CycNumber> = Vec::with_capacity(n);
    for c in cols {
        let pv = ctx.apply_word(w, c);
        rho.push(pv.coords.iter().map(|p| compress(p, ws.g)).collect());
        rho_scale.push(pv.scale);
    }
    let mut inner: Vec<Vec<Vec<C128>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for rc in &rho {
            row.push(inner_comp(&ws.comp[i], rc, ws.lm, &ws.phi_l));
        }
        inner.push(row);
    }
    let mut ok = true;
    let mut worst = BigInt::one();
    for j in 0..n {
        let mut cache: Vec<Option<(Vec<C128>, BigInt)>> = vec![None; ws.n_classes];
        for i in 0..n {
            // src points at the row whose scale carries the entry's value.
            let (poly, src, extra_den): (Vec<C128>, usize, BigInt) = match ws.block_row[i] {
                None => {
                    if inner[i][j].iter().all(|c| c.0 == 0) {
                        continue;
                    }
                    (inner[i][j].clone(), i, BigInt::one())
                }
                Some((b, a)) => {
                    let blk = &ws.blocks[b];
                    let mut acc = vec![C128(0); ws.lm as usize];
                    for (t, &k) in blk.rows.iter().enumerate() {
                        if inner[k][j].iter().all(|c| c.0 == 0) {
                            continue;
                        }
                        let term = conv_cyclic(&blk.num[a][t], &inner[k][j]);
                        for (acc_c, t_c) in acc.iter_mut().zip(&term) {
                            acc_c.0 += t_c.0;
                        }
                    }
                    reduce_mod_phi(&mut acc, &ws.phi_l);
                    if acc.iter().all(|c| c.0 == 0) {
                        continue;
                    }
                    (acc, blk.rows[0], blk.den[a].clone())
                }
            };
            let cls = ws.scale_class[src];
            if cache[cls].is_none() {
                let s = ws.scales[src].mul(&rho_scale[j].conj()).canonical_reduce();
                cache[cls] = Some(scale_parts(&s, m));
            }
            let (snum, sden) = cache[cls].as_ref().expect("cache entry was just filled");
            let full_den = sden * &extra_den;
            if !integral_sparse(&poly, ws.g, snum, &full_den, &ws.phi_m, m) {
                ok = false;
                let s = ws.scales[src].mul(&rho_scale[j].conj());
                let d = canonical_denominator(&expand(&poly, ws.g, m), &s, &extra_den, m);
                worst = worst.lcm(&d);
            }
        }
    }
    (ok, worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::fqm::parse_symbol;
    use crate::intbasis::{integral_basis, natural_basis};

    fn verify_symbol(sym: &str) -> IntegralityReport {
        let d = parse_symbol(sym).unwrap();
        let b = integral_basis(&d).unwrap();
        verify_integrality(&d, &b)
    }

    #[test]
    fn trivial_module_is_integral() {
        let d = DiscForm::construct(&[], &[], &[]).unwrap();
        let b = integral_basis(&d).unwrap();
        let r = verify_integrality(&d, &b);
        assert!(r.verdict);
        assert_eq!(r.words.len(), 4 + RANDOM_WORDS);
        assert!(r.worst_denominators.iter().all(|d| d.is_one()));
    }

    #[test]
    fn coset_basis_families_are_integral() {
        for sym in ["U(2)", "4_1^+1", "2_II^-2"] {
            let r = verify_symbol(sym);
            assert!(r.verdict, "{sym} basis must be integral");
            assert!(r.worst_denominators.iter().all(|d| d.is_one()));
        }
    }

    #[test]
    fn prime_bases_are_integral() {
        for sym in ["3^+1", "5^-1", "2_1^+1"] {
            let r = verify_symbol(sym);
            assert!(r.verdict, "{sym} basis must be integral");
        }
    }

    #[test]
    fn lifted_tower_is_integral() {
        let d = DiscForm::construct(&[9], &[rat(1, 9)], &[]).unwrap();
        let b = integral_basis(&d).unwrap();
        assert!(verify_integrality(&d, &b).verdict);
    }

    #[test]
    fn tensor_basis_is_integral() {
        let r = verify_symbol("2_1^+1 ⊕ 3^+1");
        assert!(r.verdict);
    }

    #[test]
    fn natural_basis_fails_with_root_denominators() {
        let d = parse_symbol("2_1^+1").unwrap();
        let b = natural_basis(&d);
        let r = verify_integrality(&d, &b);
        assert!(!r.verdict);
        // The S-matrix has entries with 1/sqrt(2) = (zeta8 + zeta8^-1)/2.
        let s_word = &r.worst_denominators[2];
        assert!(s_word > &BigInt::one());
    }
}
