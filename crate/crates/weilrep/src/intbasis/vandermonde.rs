//! Vandermonde LU support and the coefficient systems behind the odd prime
//! bases.
//!
//! The node matrix factors as L*U with U unipotent upper; L splits further
//! into the sparse chain N_1 D_1 ... N_{n-1} D_{n-1}. Applying the inverted
//! chain to the column of root-of-unity difference quotients produces the
//! f-recursion values, whose finiteness at the degenerate node z = 1 is what
//! forces the solutions of `c_coefficients` into the integer ring.

use std::collections::HashMap;

use num::BigInt;

use crate::error::{Error, Result};
use crate::exactnum::{prime_factors, rat_int, CycNumber, Rat};
use crate::linalg::CycMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Factors the Vandermonde matrix of `xs` (first column all ones) as `L*U`
/// plus the chain `(N_h, D_h)` whose ordered product is `L`.
///
/// `U[i][j]` is the complete homogeneous symmetric polynomial of degree
/// `j - i` in the first `i + 1` nodes; `L[i][j]` is the product of
/// `xs[i] - xs[t]` over `t < j`. `N_h` is unipotent with ones below the
/// diagonal of column `h - 1`; `D_h` rescales the rows past `h` by
/// `xs[i] - xs[h-1]`.
pub fn vandermonde_lu(
    xs: &[CycNumber],
) -> Result<(CycMatrix, CycMatrix, Vec<(CycMatrix, CycMatrix)>)> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::invalid("factorization needs at least one node"));
    }
    for i in 0..n {
        for j in i + 1..n {
            if xs[i].sub(&xs[j]).is_zero() {
                return Err(Error::invalid(format!(
                    "repeated nodes at positions {i} and {j}"
                )));
            }
        }
    }

    // h_k table: row i holds h_k(xs[0..=i]); adding a node updates in place.
    let mut table: Vec<Vec<CycNumber>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        row.push(CycNumber::one(1));
        for k in 1..n {
            let carried = if i == 0 {
                CycNumber::zero(1)
            } else {
                table[i - 1][k].clone()
            };
            let next = carried.add(&xs[i].mul(&row[k - 1]));
            row.push(next);
        }
        table.push(row);
    }

    let u = CycMatrix::from_fn(n, n, |i, j| {
        if j < i {
            CycNumber::zero(1)
        } else {
            table[i][j - i].clone()
        }
    });
    let l = CycMatrix::from_fn(n, n, |i, j| {
        if i < j {
            CycNumber::zero(1)
        } else {
            let mut prod = CycNumber::one(1);
            for t in 0..j {
                prod = prod.mul(&xs[i].sub(&xs[t]));
            }
            prod
        }
    });

    let mut chain = Vec::with_capacity(n.saturating_sub(1));
    for h in 1..n {
        let nh = CycMatrix::from_fn(n, n, |i, j| {
            if i == j || (j == h - 1 && i >= h) {
                CycNumber::one(1)
            } else {
                CycNumber::zero(1)
            }
        });
        let dh = CycMatrix::from_fn(n, n, |i, j| {
            if i != j {
                CycNumber::zero(1)
            } else if i < h {
                CycNumber::one(1)
            } else {
                xs[i].sub(&xs[h - 1])
            }
        });
        chain.push((nh, dh));
    }
    Ok((l, u, chain))
}

/// Solves the coefficient system at an odd prime `p` and shift `k`.
///
/// Odd parity: c_l for `0 <= l <= (p-3)/2` with
/// `sum_l (z^{2m} - z^{-2m}) z^{l m^2} c_l = z^{2km} - z^{-2km}` for
/// `1 <= m <= (p-1)/2`. Even parity replaces the differences by sums and
/// runs both ranges from 0 to `(p-1)/2`. Every solution entry lies in the
/// integer ring, and this is asserted.
pub fn c_coefficients(p: u64, k: u64, parity: Parity) -> Result<Vec<CycNumber>> {
    if p < 3 || p % 2 == 0 || prime_factors(p) != vec![(p, 1)] {
        return Err(Error::invalid(format!(
            "coefficient system needs an odd prime, got {p}"
        )));
    }
    if k == 0 || k >= p {
        return Err(Error::invalid(format!(
            "shift must satisfy 1 <= k <= {}, got {k}",
            p - 1
        )));
    }
    let pc = p as u32;
    let zp = |e: i64| CycNumber::root_of_unity(e, pc);
    let pair = |a: i64| match parity {
        Parity::Odd => zp(a).sub(&zp(-a)),
        Parity::Even => zp(a).add(&zp(-a)),
    };
    let half = ((p - 1) / 2) as i64;
    let ms: Vec<i64> = match parity {
        Parity::Odd => (1..=half).collect(),
        Parity::Even => (0..=half).collect(),
    };
    let size = ms.len();
    let a = CycMatrix::from_fn(size, size, |row, l| {
        let m = ms[row];
        pair(2 * m).mul(&zp(l as i64 * m * m))
    });
    let rhs: Vec<CycNumber> = ms.iter().map(|&m| pair(2 * k as i64 * m)).collect();
    let sol = a.solve(&rhs)?;
    for (l, c) in sol.iter().enumerate() {
        assert!(c.is_integral(), "coefficient c_{l} must be integral");
    }
    Ok(sol)
}

/// The recursive f value: base `f_{m,0} = binom(m+r, 2r+1)`, step
/// `f_{m,h} = f_{m,h-1} - phi_{m,h} f_{h,h-1}`.
///
/// With `zeta = None` the recursion is evaluated in the limit at 1, where
/// `phi_{m,h}` collapses to `binom(m+h-1, 2h-1)`; the result stays the base
/// binomial for `h <= r` and vanishes for `h > r`. With a concrete `zeta`
/// the multiplier is the product formula, and a vanishing denominator is an
/// error.
pub fn f_recursion(m: u64, h: u64, r: u64, zeta: Option<&CycNumber>) -> Result<CycNumber> {
    if m == 0 {
        return Err(Error::invalid("row index must be positive"));
    }
    match zeta {
        None => Ok(CycNumber::from_rat(f_at_one(m, h, r), 1)),
        Some(z) => {
            let mut memo = HashMap::new();
            f_spec(m, h, r, z, &mut memo)
        }
    }
}

fn f_at_one(m: u64, h: u64, r: u64) -> Rat {
    if h == 0 {
        return binom_rat(m + r, 2 * r + 1);
    }
    f_at_one(m, h - 1, r) - binom_rat(m + h - 1, 2 * h - 1) * f_at_one(h, h - 1, r)
}

fn f_spec(
    m: u64,
    h: u64,
    r: u64,
    z: &CycNumber,
    memo: &mut HashMap<(u64, u64), CycNumber>,
) -> Result<CycNumber> {
    if let Some(v) = memo.get(&(m, h)) {
        return Ok(v.clone());
    }
    let v = if h == 0 {
        CycNumber::from_rat(binom_rat(m + r, 2 * r + 1), z.conductor())
    } else {
        let keep = f_spec(m, h - 1, r, z, memo)?;
        let drop = f_spec(h, h - 1, r, z, memo)?;
        keep.sub(&phi(m, h, z)?.mul(&drop))
    };
    memo.insert((m, h), v.clone());
    Ok(v)
}

/// `phi_{m,h}(z) = (z^{2m}-z^{-2m})/(z^{2h}-z^{-2h}) *
/// prod_{j<h} (z^{m^2}-z^{j^2})/(z^{h^2}-z^{j^2})`.
fn phi(m: u64, h: u64, z: &CycNumber) -> Result<CycNumber> {
    let mut num = cyc_pow(z, 2 * m as i64)?.sub(&cyc_pow(z, -2 * (m as i64))?);
    let mut den = cyc_pow(z, 2 * h as i64)?.sub(&cyc_pow(z, -2 * (h as i64))?);
    let xm = cyc_pow(z, (m * m) as i64)?;
    let xh = cyc_pow(z, (h * h) as i64)?;
    for j in 1..h {
        let xj = cyc_pow(z, (j * j) as i64)?;
        num = num.mul(&xm.sub(&xj));
        den = den.mul(&xh.sub(&xj));
    }
    num.div(&den)
}

fn cyc_pow(z: &CycNumber, e: i64) -> Result<CycNumber> {
    let mag = u32::try_from(e.unsigned_abs())
        .map_err(|_| Error::invalid("exponent out of range".to_string()))?;
    if e >= 0 {
        Ok(z.pow(mag))
    } else {
        Ok(z.inv()?.pow(mag))
    }
}

/// Checks, for every entry `m > h`, that applying the inverted chain
/// `D_h^{-1} N_h^{-1} ... D_1^{-1} N_1^{-1}` to the difference-quotient
/// column at nodes `z^{m^2}` reproduces the closed f-recursion form.
pub fn f_chain_identity(p: u32, k: u32, h: usize) -> Result<bool> {
    let pu = p as u64;
    if pu < 3 || pu % 2 == 0 || prime_factors(pu) != vec![(pu, 1)] {
        return Err(Error::invalid(format!(
            "chain identity needs an odd prime, got {p}"
        )));
    }
    if k == 0 || k >= p {
        return Err(Error::invalid(format!(
            "shift must satisfy 1 <= k <= {}, got {k}",
            p - 1
        )));
    }
    let n = ((p - 1) / 2) as usize;
    if h >= n {
        return Err(Error::invalid(format!(
            "chain depth must stay below {n}, got {h}"
        )));
    }
    let zp = |e: i64| CycNumber::root_of_unity(e, p);
    let nodes: Vec<CycNumber> = (1..=n as i64).map(|m| zp(m * m)).collect();
    let mut v: Vec<CycNumber> = Vec::with_capacity(n);
    for m in 1..=n as i64 {
        let num = zp(2 * k as i64 * m).sub(&zp(-2 * (k as i64) * m));
        let den = zp(2 * m).sub(&zp(-2 * m));
        v.push(num.div(&den)?);
    }
    for t in 1..=h {
        let pivot = v[t - 1].clone();
        for i in t..n {
            let shifted = v[i].sub(&pivot);
            v[i] = shifted.div(&nodes[i].sub(&nodes[t - 1]))?;
        }
    }

    let zeta = zp(1);
    let eta_sq = {
        let eta = zp(k as i64).sub(&zp(-(k as i64)));
        eta.mul(&eta)
    };
    let lead = zp(2 * k as i64).sub(&zp(-2 * (k as i64)));
    for m in h + 1..=n {
        let mut sum = CycNumber::zero(p);
        let mut pw = CycNumber::one(p);
        for r in 0..m as u64 {
            let f = f_recursion(m as u64, h as u64, r, Some(&zeta))?;
            sum = sum.add(&f.mul(&pw));
            pw = pw.mul(&eta_sq);
        }
        let mut den = zp(2 * m as i64).sub(&zp(-2 * (m as i64)));
        for j in 1..=h {
            den = den.mul(&nodes[m - 1].sub(&nodes[j - 1]));
        }
        let expected = lead.mul(&sum).div(&den)?;
        if !v[m - 1].sub(&expected).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn binom_rat(n: u64, k: u64) -> Rat {
    if k > n {
        return rat_int(0);
    }
    let k = k.min(n - k);
    let mut v = BigInt::from(1);
    for t in 1..=k {
        v = v * BigInt::from(n - k + t) / BigInt::from(t);
    }
    Rat::from_integer(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn z(e: i64, m: u32) -> CycNumber {
        CycNumber::root_of_unity(e, m)
    }

    #[test]
    fn two_node_factors_match_direct_expansion() {
        let x1 = z(1, 5);
        let x2 = z(2, 5);
        let (l, u, chain) = vandermonde_lu(&[x1.clone(), x2.clone()]).unwrap();
        let one = CycNumber::one(5);
        assert!(l.at(0, 0).sub(&one).is_zero());
        assert!(l.at(0, 1).is_zero());
        assert!(l.at(1, 0).sub(&one).is_zero());
        assert!(l.at(1, 1).sub(&x2.sub(&x1)).is_zero());
        assert!(u.at(0, 0).sub(&one).is_zero());
        assert!(u.at(0, 1).sub(&x1).is_zero());
        assert!(u.at(1, 0).is_zero());
        assert!(u.at(1, 1).sub(&one).is_zero());
        assert_eq!(chain.len(), 1);
        assert!(chain[0].0.mul(&chain[0].1).sub(&l).is_zero());
    }

    #[test]
    fn chain_product_equals_lower_factor() {
        let xs = vec![
            z(1, 7).add(&CycNumber::from_int(1, 7)),
            z(3, 7).scale(&rat(2, 1)).sub(&z(2, 7)),
            z(4, 7),
            z(5, 7).sub(&CycNumber::from_int(3, 7)),
        ];
        let (l, _u, chain) = vandermonde_lu(&xs).unwrap();
        let mut prod = CycMatrix::identity(4, 7);
        for (nh, dh) in &chain {
            prod = prod.mul(nh).mul(dh);
        }
        assert!(prod.sub(&l).is_zero());
    }

    #[test]
    fn lu_reconstructs_node_powers() {
        for n in 1..=6usize {
            let xs: Vec<CycNumber> = (1..=n as i64).map(|m| z(m * m, 13)).collect();
            let (l, u, _) = vandermonde_lu(&xs).unwrap();
            let direct = CycMatrix::from_fn(n, n, |i, j| xs[i].pow(j as u32));
            assert!(l.mul(&u).sub(&direct).is_zero(), "n = {n}");
        }
    }

    #[test]
    fn repeated_nodes_are_rejected() {
        assert!(vandermonde_lu(&[z(1, 5), z(1, 5)]).is_err());
        assert!(vandermonde_lu(&[z(0, 5), CycNumber::one(1)]).is_err());
        assert!(vandermonde_lu(&[]).is_err());
    }

    #[test]
    fn smallest_prime_coefficients_match_hand_values() {
        let c1 = c_coefficients(3, 1, Parity::Odd).unwrap();
        assert_eq!(c1.len(), 1);
        assert!(c1[0].sub(&CycNumber::one(3)).is_zero());
        let c2 = c_coefficients(3, 2, Parity::Odd).unwrap();
        assert!(c2[0].add(&CycNumber::one(3)).is_zero());
    }

    #[test]
    fn coefficient_systems_solve_and_stay_integral() {
        for &p in &[3u64, 5, 7, 11, 13] {
            let half = ((p - 1) / 2) as i64;
            for k in 1..p {
                for parity in [Parity::Odd, Parity::Even] {
                    let c = c_coefficients(p, k, parity).unwrap();
                    let (m_lo, len) = match parity {
                        Parity::Odd => (1, half as usize),
                        Parity::Even => (0, half as usize + 1),
                    };
                    assert_eq!(c.len(), len);
                    assert!(c.iter().all(|x| x.is_integral()));
                    let pair = |a: i64| {
                        let u = z(a, p as u32);
                        let w = z(-a, p as u32);
                        match parity {
                            Parity::Odd => u.sub(&w),
                            Parity::Even => u.add(&w),
                        }
                    };
                    for m in m_lo..=half {
                        let mut lhs = CycNumber::zero(p as u32);
                        for (l, cl) in c.iter().enumerate() {
                            let node_pow = z(l as i64 * m * m, p as u32);
                            lhs = lhs.add(&pair(2 * m).mul(&node_pow).mul(cl));
                        }
                        assert!(
                            lhs.sub(&pair(2 * k as i64 * m)).is_zero(),
                            "p={p} k={k} m={m}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn shallow_recursion_keeps_the_binomial_constant() {
        for m in 1..=6u64 {
            for r in 0..=4u64 {
                let base = f_recursion(m, 0, r, None).unwrap();
                assert_eq!(base.to_rat().unwrap(), binom_rat(m + r, 2 * r + 1));
                for h in 1..=r {
                    let f = f_recursion(m, h, r, None).unwrap();
                    assert!(f.sub(&base).is_zero(), "m={m} h={h} r={r}");
                }
            }
        }
    }

    #[test]
    fn deep_recursion_vanishes_at_the_degenerate_node() {
        for m in 1..=6u64 {
            for r in 0..=3u64 {
                for h in r + 1..=5 {
                    let f = f_recursion(m, h, r, None).unwrap();
                    assert!(f.is_zero(), "m={m} h={h} r={r}");
                }
            }
        }
    }

    #[test]
    fn chain_entries_match_the_closed_form() {
        for h in 0..2 {
            assert!(f_chain_identity(5, 2, h).unwrap(), "p=5 h={h}");
        }
        for h in 0..3 {
            assert!(f_chain_identity(7, 3, h).unwrap(), "p=7 h={h}");
        }
    }

    #[test]
    fn inverse_lower_factor_entries_use_the_deepest_chain_step() {
        let p = 7u32;
        let k = 2i64;
        let n = 3usize;
        let zp = |e: i64| z(e, p);
        let nodes: Vec<CycNumber> = (1..=n as i64).map(|m| zp(m * m)).collect();
        let (l, _u, _) = vandermonde_lu(&nodes).unwrap();
        let eps: Vec<CycNumber> = (1..=n as i64)
            .map(|m| {
                let num = zp(2 * k * m).sub(&zp(-2 * k * m));
                num.div(&zp(2 * m).sub(&zp(-2 * m))).unwrap()
            })
            .collect();
        let linv_eps = l.inverse().unwrap().mul_vec(&eps);
        let zeta = zp(1);
        let eta_sq = zp(k).sub(&zp(-k)).pow(2);
        let lead = zp(2 * k).sub(&zp(-2 * k));
        for m in 1..=n {
            let deepest = (m - 1) as u64;
            let mut sum = CycNumber::zero(p);
            let mut pw = CycNumber::one(p);
            for r in 0..m as u64 {
                let f = f_recursion(m as u64, deepest, r, Some(&zeta)).unwrap();
                sum = sum.add(&f.mul(&pw));
                pw = pw.mul(&eta_sq);
            }
            let mut den = zp(2 * m as i64).sub(&zp(-2 * (m as i64)));
            for j in 1..m {
                den = den.mul(&nodes[m - 1].sub(&nodes[j - 1]));
            }
            let expected = lead.mul(&sum).div(&den).unwrap();
            assert!(linv_eps[m - 1].sub(&expected).is_zero(), "m={m}");
        }
    }

    #[test]
    fn degenerate_inputs_surface_as_errors() {
        let i = z(1, 4);
        assert!(f_recursion(2, 1, 0, Some(&i)).is_err());
        assert!(f_recursion(0, 0, 0, None).is_err());
        assert!(f_chain_identity(9, 1, 0).is_err());
        assert!(f_chain_identity(5, 2, 2).is_err());
        assert!(c_coefficients(9, 1, Parity::Odd).is_err());
        assert!(c_coefficients(5, 5, Parity::Odd).is_err());
        assert!(c_coefficients(5, 0, Parity::Even).is_err());
    }
}
