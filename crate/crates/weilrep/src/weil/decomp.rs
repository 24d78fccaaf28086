//! Canonical decomposition of the representation attached to a cyclic
//! module into components indexed by an isotropic-subgroup level and a sign
//! character of the automorphism group.
//!
//! All subspaces here are rational: eigenspaces of permutation operators,
//! images of averaging maps over isotropic subgroups, and orthogonal
//! complements thereof. The blocks are computed as integer bases and the
//! direct-sum identities are asserted on the way out.

use crate::error::{Error, Result};
use crate::exactnum::{frac_mod1, prime_factors, CycNumber, Rat};
use crate::fqm::{DiscForm, Elem, Subgroup};
use crate::linalg::{integerize, RowReducer};
use num::{BigInt, One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct CyclicComponent {
    /// Order of the isotropic subgroup the block factors through.
    pub level_div: u64,
    /// Sign character on the nontrivial automorphism factors, keyed by prime.
    pub psi: Vec<(u64, i8)>,
    /// Integer basis vectors in the standard coordinates of the module.
    pub basis: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug)]
pub struct CyclicDecomposition {
    /// A generator of the module, fixed for the whole decomposition.
    pub generator: Elem,
    /// Units generating the nontrivial sign factors, keyed by prime.
    pub factor_units: Vec<(u64, u64)>,
    pub components: Vec<CyclicComponent>,
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Splits the representation space of a cyclic module into its canonical
/// blocks. Non-cyclic modules are rejected.
pub fn cyclic_decomposition(d: &DiscForm) -> Result<CyclicDecomposition> {
    let n = d.order();
    let generator = d
        .elements()
        .find(|g| u64::from(d.elem_order(g)) == n)
        .ok_or_else(|| Error::invalid("the module is not cyclic"))?;
    let qg = d.q_value(&generator);
    // Element index of x * generator.
    let idx_of: Vec<usize> = (0..n)
        .map(|x| d.elem_index(&d.scale(x as i64, &generator)))
        .collect();

    // Units acting on the module by automorphisms: (u^2 - 1) q must vanish.
    let units: Vec<u64> = (1..n)
        .filter(|&u| gcd(u, n) == 1)
        .filter(|&u| frac_mod1(&(qg.clone() * Rat::from_integer(BigInt::from((u * u) as i64 - 1)))).is_zero())
        .collect();
    let primes: Vec<u64> = prime_factors(n).into_iter().map(|(p, _)| p).collect();
    let label = |u: u64, p: u64| -> i8 {
        let pv = p.pow(valuation(n, p));
        if u % pv == 1 {
            1
        } else {
            -1
        }
    };
    let nontrivial: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| units.iter().any(|&u| label(u, p) == -1))
        .collect();
    let mut factor_units = Vec::new();
    for &p in &nontrivial {
        let u = units
            .iter()
            .copied()
            .find(|&u| {
                nontrivial
                    .iter()
                    .all(|&q| label(u, q) == if q == p { -1 } else { 1 })
            })
            .ok_or_else(|| Error::invalid("the sign factors do not split"))?;
        factor_units.push((p, u));
    }

    // Isotropic levels: the order-M subgroup generated by (N/M) g.
    let mut levels = Vec::new();
    for m_div in 1..=n {
        if n % m_div != 0 || n % (m_div * m_div) != 0 {
            continue;
        }
        let h = Subgroup::generated(d, &[d.scale((n / m_div) as i64, &generator)]);
        if h.order() == m_div && h.is_isotropic(d) {
            levels.push((m_div, h));
        }
    }

    // Averaging images: columns sum an H-coset, indexed over H-perp / H.
    let m = d.conductor();
    let span_of = |h: &Subgroup| -> Vec<Vec<CycNumber>> {
        let hp = h.orthogonal_complement(d);
        super::vectors::coset_reps_in(d, &hp, h)
            .iter()
            .map(|lam| {
                let mut col = vec![CycNumber::zero(m); n as usize];
                for g in h.elems() {
                    let i = d.elem_index(&d.add(lam, g));
                    col[i] = CycNumber::from_int(1, m);
                }
                col
            })
            .collect()
    };

    let admissible = |m_div: u64, psi: &[(u64, i8)]| -> bool {
        let rest = n / (m_div * m_div);
        psi.iter().all(|&(p, s)| {
            if s == 1 {
                return true;
            }
            if rest % p != 0 {
                return false;
            }
            if p == 2 && n % 4 == 0 && rest % 4 != 0 {
                return false;
            }
            true
        })
    };

    let mut components = Vec::new();
    for (m_div, h) in &levels {
        let cols = span_of(h);
        let width = cols.len();
        for mask in 0..(1u32 << factor_units.len()) {
            let psi: Vec<(u64, i8)> = factor_units
                .iter()
                .enumerate()
                .map(|(j, &(p, _))| (p, if mask >> j & 1 == 1 { -1 } else { 1 }))
                .collect();
            if !admissible(*m_div, &psi) {
                continue;
            }
            let mut red = RowReducer::new(width);
            // Eigenvector conditions for each factor unit.
            for (j, &(_, u)) in factor_units.iter().enumerate() {
                let sign: i64 = if mask >> j & 1 == 1 { -1 } else { 1 };
                let uinv = (1..n).find(|v| (v * u) % n == 1).unwrap();
                for x in 0..n as usize {
                    let src = idx_of[(x as u64 * uinv % n) as usize];
                    let here = idx_of[x];
                    let row: Vec<CycNumber> = cols
                        .iter()
                        .map(|c| c[src].sub(&c[here].mul(&CycNumber::from_int(sign, m))))
                        .collect();
                    red.push(row);
                }
            }
            // Orthogonality to every coarser averaging image.
            for (l_div, hl) in &levels {
                if l_div <= m_div || l_div % m_div != 0 {
                    continue;
                }
                for w in span_of(hl) {
                    let row: Vec<CycNumber> = cols
                        .iter()
                        .map(|c| {
                            (0..n as usize).fold(CycNumber::zero(m), |acc, x| {
                                acc.add(&w[x].mul(&c[x]))
                            })
                        })
                        .collect();
                    red.push(row);
                }
            }
            let mut basis = Vec::new();
            for coeffs in red.kernel_basis() {
                let vec: Vec<CycNumber> = (0..n as usize)
                    .map(|x| {
                        cols.iter().zip(&coeffs).fold(CycNumber::zero(m), |acc, (c, t)| {
                            acc.add(&c[x].mul(t))
                        })
                    })
                    .collect();
                let ints = integerize(&vec)
                    .ok_or_else(|| Error::invalid("block vectors must be rational"))?;
                basis.push(ints);
            }
            if !basis.is_empty() {
                components.push(CyclicComponent {
                    level_div: *m_div,
                    psi,
                    basis,
                });
            }
        }
    }

    let total: usize = components.iter().map(|c| c.basis.len()).sum();
    assert_eq!(total as u64, n, "block dimensions must fill the space");
    for (i, a) in components.iter().enumerate() {
        for b in components.iter().skip(i + 1) {
            for u in &a.basis {
                for v in &b.basis {
                    let dot: BigInt = u.iter().zip(v).map(|(x, y)| x * y).sum();
                    assert!(dot.is_zero(), "blocks must be pairwise orthogonal");
                }
            }
        }
    }
    for c in &components {
        for u in &c.basis {
            assert!(u.iter().any(|x| !x.is_zero()));
            let g = u.iter().fold(BigInt::zero(), |acc, x| {
                num::Integer::gcd(&acc, &x.abs())
            });
            assert!(g.is_one(), "block vectors are primitive");
        }
    }

    Ok(CyclicDecomposition {
        generator,
        factor_units,
        components,
    })
}
