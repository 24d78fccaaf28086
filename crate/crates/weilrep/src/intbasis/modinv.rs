//! Fast exact inverses of matrices over `Z[zeta_m]`.
//!
//! The Gram blocks that integrality verification inverts have integer
//! cyclotomic entries, and row reduction over `Q(zeta_m)` on them is slow:
//! entry coefficients are quotients of minors, so every field operation
//! drags large rationals through gcd normalization. This module inverts
//! such a matrix by evaluation instead: pick word-size primes
//! `q = 1 (mod m)`, where `x^m - 1` splits into distinct linear factors,
//! invert the evaluated scalar matrices at the primitive points,
//! interpolate back, and lift the coefficients by CRT plus rational
//! reconstruction. The candidate inverse is then certified over enough
//! fresh primes to exceed a rigorous coefficient bound, so a failed lift
//! costs time, never correctness.

use crate::exactnum::{cyclotomic_poly, prime_factors};
use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

/// Rows of the inverse, cleared to one positive denominator per row.
/// Numerator polynomials are canonical mod `Phi_m`, padded to length `m`.
pub struct InverseRows {
    pub num: Vec<Vec<Vec<BigInt>>>,
    pub den: Vec<BigInt>,
}

const START_PRIMES: usize = 3;
const MAX_PRIMES: usize = 24;
/// An invertible matrix is singular mod `q` only when `q` divides the norm
/// of its determinant, which has far fewer than this many 61-bit factors.
const MAX_SKIPPED: usize = 12;

/// Exact inverse of a square matrix whose entries are integer coefficient
/// vectors mod `x^m - 1`, understood as elements of `Q(zeta_m)`. Returns
/// `None` when the matrix is singular or the lift does not converge within
/// the prime budget; callers keep a generic slow path for that case.
pub fn integer_block_inverse(g: &[Vec<Vec<i128>>], m: u32) -> Option<InverseRows> {
    let k = g.len();
    let mm = m as usize;
    if k == 0 {
        return Some(InverseRows {
            num: Vec::new(),
            den: Vec::new(),
        });
    }
    let phi = cyclotomic_poly(m);
    let deg = phi.len() - 1;
    let nodes: Vec<usize> = (0..mm).filter(|&j| j.gcd(&mm) == 1).collect();
    debug_assert_eq!(nodes.len(), deg);

    let mut gen = PrimeGen::descending_from(1u64 << 62, m as u64);
    let mut primes: Vec<u64> = Vec::new();
    let mut residues: Vec<Vec<u64>> = Vec::new();
    let mut skipped = 0usize;
    let mut target = START_PRIMES;
    loop {
        while primes.len() < target {
            let q = gen.next_prime()?;
            match invert_mod_prime(g, mm, deg, &nodes, &phi, q) {
                Some(r) => {
                    skipped = 0;
                    primes.push(q);
                    residues.push(r);
                }
                None => {
                    skipped += 1;
                    if skipped > MAX_SKIPPED {
                        return None;
                    }
                }
            }
        }
        if let Some(rows) = reconstruct(&residues, &primes, k, mm, deg) {
            if certify(g, &rows, mm, &phi) {
                return Some(rows);
            }
        }
        if target >= MAX_PRIMES {
            return None;
        }
        target = (target * 2).min(MAX_PRIMES);
    }
}

/// Generates primes `q = t*step + 1` with `q` descending from `start`.
struct PrimeGen {
    step: u64,
    t: u64,
}

impl PrimeGen {
    fn descending_from(start: u64, step: u64) -> PrimeGen {
        PrimeGen {
            step,
            t: start / step,
        }
    }

    fn next_prime(&mut self) -> Option<u64> {
        while self.t > 1 {
            let q = self.t * self.step + 1;
            self.t -= 1;
            if is_prime_u64(q) {
                return Some(q);
            }
        }
        None
    }
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, q);
        }
        b = mulmod(b, b, q);
        e >>= 1;
    }
    acc
}

/// Inverse mod a prime `q`.
fn invmod(a: u64, q: u64) -> u64 {
    powmod(a, q - 2, q)
}

/// Deterministic Miller-Rabin for u64.
fn is_prime_u64(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in SMALL {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A root of unity of exact order `m` in `F_q`; needs `q = 1 (mod m)`.
fn root_of_order(q: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    let parts: Vec<u64> = prime_factors(m).into_iter().map(|(p, _)| p).collect();
    for g in 2..200u64 {
        let w = powmod(g, (q - 1) / m, q);
        if w == 1 {
            continue;
        }
        if parts.iter().all(|&p| powmod(w, m / p, q) != 1) {
            return Some(w);
        }
    }
    None
}

/// Inverts the matrix mod one prime. Returns the flat coefficient array
/// `[row][col][coeff < deg]` of the canonical inverse entries, or `None`
/// when some evaluation of the matrix is singular mod `q`.
fn invert_mod_prime(
    g: &[Vec<Vec<i128>>],
    mm: usize,
    deg: usize,
    nodes: &[usize],
    phi: &[i64],
    q: u64,
) -> Option<Vec<u64>> {
    let k = g.len();
    let w = root_of_order(q, mm as u64)?;
    let mut wpow = vec![1u64; mm];
    for i in 1..mm {
        wpow[i] = mulmod(wpow[i - 1], w, q);
    }
    let qi = q as i128;

    // Evaluate every entry at every primitive point.
    let mut evals = vec![0u64; nodes.len() * k * k];
    for (t, &jn) in nodes.iter().enumerate() {
        for a in 0..k {
            for b in 0..k {
                let mut acc = 0u64;
                for (c, &coeff) in g[a][b].iter().enumerate() {
                    if coeff == 0 {
                        continue;
                    }
                    let r = coeff.rem_euclid(qi) as u64;
                    acc = (acc + mulmod(r, wpow[(jn * c) % mm], q)) % q;
                }
                evals[(t * k + a) * k + b] = acc;
            }
        }
    }

    // Scalar Gauss-Jordan inverse at each point.
    let mut point_inv = vec![0u64; nodes.len() * k * k];
    for t in 0..nodes.len() {
        let mut a: Vec<u64> = evals[t * k * k..(t + 1) * k * k].to_vec();
        let mut inv = vec![0u64; k * k];
        for i in 0..k {
            inv[i * k + i] = 1;
        }
        for col in 0..k {
            let piv = (col..k).find(|&r| a[r * k + col] != 0)?;
            if piv != col {
                for j in 0..k {
                    a.swap(col * k + j, piv * k + j);
                    inv.swap(col * k + j, piv * k + j);
                }
            }
            let pinv = invmod(a[col * k + col], q);
            for j in 0..k {
                a[col * k + j] = mulmod(a[col * k + j], pinv, q);
                inv[col * k + j] = mulmod(inv[col * k + j], pinv, q);
            }
            for r in 0..k {
                if r == col || a[r * k + col] == 0 {
                    continue;
                }
                let f = a[r * k + col];
                for j in 0..k {
                    let s = mulmod(f, a[col * k + j], q);
                    a[r * k + j] = (a[r * k + j] + q - s) % q;
                    let s = mulmod(f, inv[col * k + j], q);
                    inv[r * k + j] = (inv[r * k + j] + q - s) % q;
                }
            }
        }
        point_inv[t * k * k..(t + 1) * k * k].copy_from_slice(&inv);
    }

    // Lagrange interpolation through the primitive points: with
    // d_t = Phi/(x - y_t), the basis polynomial is d_t / d_t(y_t).
    let phin: Vec<u64> = phi
        .iter()
        .map(|&c| (c as i128).rem_euclid(qi) as u64)
        .collect();
    let mut basis = vec![0u64; nodes.len() * deg];
    for (t, &jn) in nodes.iter().enumerate() {
        let y = wpow[jn];
        // Synthetic division of the monic Phi by (x - y).
        let mut dt = vec![0u64; deg];
        let mut carry = 1u64;
        for i in (0..deg).rev() {
            dt[i] = carry;
            carry = (phin[i] + mulmod(y, carry, q)) % q;
        }
        // carry is now Phi(y), which vanishes at a primitive point.
        debug_assert_eq!(carry, 0);
        let mut dy = 0u64;
        for i in (0..deg).rev() {
            dy = (mulmod(dy, y, q) + dt[i]) % q;
        }
        let s = invmod(dy, q);
        for i in 0..deg {
            basis[t * deg + i] = mulmod(dt[i], s, q);
        }
    }

    let mut out = vec![0u64; k * k * deg];
    for a in 0..k {
        for b in 0..k {
            let dst = &mut out[(a * k + b) * deg..(a * k + b + 1) * deg];
            for t in 0..nodes.len() {
                let v = point_inv[(t * k + a) * k + b];
                if v == 0 {
                    continue;
                }
                for (i, d) in dst.iter_mut().enumerate() {
                    *d = (*d + mulmod(v, basis[t * deg + i], q)) % q;
                }
            }
        }
    }
    Some(out)
}

/// CRT-combines the per-prime images and reconstructs rational entries,
/// then clears each row to a single positive denominator.
fn reconstruct(
    residues: &[Vec<u64>],
    primes: &[u64],
    k: usize,
    mm: usize,
    deg: usize,
) -> Option<InverseRows> {
    let big_q: BigInt = primes.iter().fold(BigInt::one(), |acc, &q| acc * BigInt::from(q));
    // CRT basis elements e_i = (Q/q_i) * ((Q/q_i)^-1 mod q_i).
    let crt: Vec<BigInt> = primes
        .iter()
        .map(|&q| {
            let qb = BigInt::from(q);
            let rest = &big_q / &qb;
            let r = rest.mod_floor(&qb).to_u64().expect("residue fits u64");
            &rest * BigInt::from(invmod(r, q))
        })
        .collect();

    let mut num: Vec<Vec<Vec<BigInt>>> = Vec::with_capacity(k);
    let mut den: Vec<BigInt> = Vec::with_capacity(k);
    for a in 0..k {
        let mut row_entries: Vec<(Vec<BigInt>, BigInt)> = Vec::with_capacity(k);
        for b in 0..k {
            let mut numer = vec![BigInt::zero(); deg];
            let mut entry_den = BigInt::one();
            for i in 0..deg {
                let mut x = BigInt::zero();
                for (r, e) in residues.iter().zip(&crt) {
                    let v = r[(a * k + b) * deg + i];
                    if v != 0 {
                        x += e * BigInt::from(v);
                    }
                }
                x = x.mod_floor(&big_q);
                let (p, d) = rational_reconstruct(&x, &big_q)?;
                if !d.is_one() {
                    let l = entry_den.lcm(&d);
                    if l != entry_den {
                        let f = &l / &entry_den;
                        for c in numer.iter_mut().take(i) {
                            *c *= &f;
                        }
                        entry_den = l;
                    }
                }
                numer[i] = p * (&entry_den / &d);
            }
            row_entries.push((numer, entry_den));
        }
        let row_den = row_entries
            .iter()
            .fold(BigInt::one(), |acc, (_, d)| acc.lcm(d));
        let row: Vec<Vec<BigInt>> = row_entries
            .into_iter()
            .map(|(mut numer, d)| {
                let f = &row_den / d;
                for c in numer.iter_mut() {
                    *c *= &f;
                }
                numer.resize(mm, BigInt::zero());
                numer
            })
            .collect();
        num.push(row);
        den.push(row_den);
    }
    Some(InverseRows { num, den })
}

/// Wang rational reconstruction of `x mod q` with both sides bounded by
/// `sqrt(q/2)`; the congruence is re-checked before accepting.
fn rational_reconstruct(x: &BigInt, q: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (q / 2u8).sqrt();
    let (mut r0, mut r1) = (q.clone(), x.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1.abs() > bound {
        if r1.is_zero() {
            return None;
        }
        let quot = &r0 / &r1;
        let r2 = &r0 - &quot * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &quot * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (mut n, mut d) = (r1, t1);
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    let g = n.gcd(&d);
    if !g.is_one() {
        n /= &g;
        d /= &g;
    }
    if (&n - x * &d).mod_floor(q).is_zero() {
        Some((n, d))
    } else {
        None
    }
}

/// Certifies `X G = diag(den) mod Phi_m` exactly: the residue is checked
/// mod enough fresh primes to exceed a rigorous bound on its coefficients,
/// so agreement everywhere forces the integer residue to vanish.
fn certify(g: &[Vec<Vec<i128>>], rows: &InverseRows, mm: usize, phi: &[i64]) -> bool {
    let k = g.len();
    let deg = phi.len() - 1;
    let xmax = rows
        .num
        .iter()
        .flatten()
        .flatten()
        .map(|c| c.abs())
        .fold(BigInt::one(), |a, b| a.max(b));
    let gmax = g
        .iter()
        .flatten()
        .flatten()
        .map(|&c| BigInt::from(c).abs())
        .fold(BigInt::one(), |a, b| a.max(b));
    let denmax = rows
        .den
        .iter()
        .map(|d| d.abs())
        .fold(BigInt::one(), |a, b| a.max(b));
    // Raw convolution coefficients, plus the subtracted diagonal.
    let raw_bound = BigInt::from(k) * BigInt::from(mm) * xmax * gmax + denmax;
    // Each reduction step mod the monic Phi scales the sup norm by at most
    // (1 + max |phi_j|).
    let phimax = phi.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    let growth_bits = (mm - deg) as u64 * (u64::BITS - (1 + phimax).leading_zeros()) as u64;
    let need_bits = raw_bound.bits() + growth_bits + 2;
    let n_primes = (need_bits / 60 + 1) as usize;

    let mut gen = PrimeGen::descending_from((1u64 << 62) - 1, 2);
    for _ in 0..n_primes {
        let q = match gen.next_prime() {
            Some(q) => q,
            None => return false,
        };
        if !certify_mod(g, rows, mm, phi, q) {
            return false;
        }
    }
    true
}

fn certify_mod(g: &[Vec<Vec<i128>>], rows: &InverseRows, mm: usize, phi: &[i64], q: u64) -> bool {
    let k = g.len();
    let deg = phi.len() - 1;
    let qi = q as i128;
    let qb = BigInt::from(q);
    let gres: Vec<Vec<Vec<u64>>> = g
        .iter()
        .map(|r| {
            r.iter()
                .map(|p| p.iter().map(|&c| c.rem_euclid(qi) as u64).collect())
                .collect()
        })
        .collect();
    let xres: Vec<Vec<Vec<u64>>> = rows
        .num
        .iter()
        .map(|r| {
            r.iter()
                .map(|p| {
                    p.iter()
                        .map(|c| c.mod_floor(&qb).to_u64().expect("residue fits u64"))
                        .collect()
                })
                .collect()
        })
        .collect();
    let dres: Vec<u64> = rows
        .den
        .iter()
        .map(|d| d.mod_floor(&qb).to_u64().expect("residue fits u64"))
        .collect();
    let phin: Vec<u64> = phi
        .iter()
        .map(|&c| (c as i128).rem_euclid(qi) as u64)
        .collect();

    for a in 0..k {
        for c in 0..k {
            let mut acc = vec![0u64; mm];
            for b in 0..k {
                let x = &xres[a][b];
                let y = &gres[b][c];
                if x.iter().all(|&v| v == 0) || y.iter().all(|&v| v == 0) {
                    continue;
                }
                for (i, &xi) in x.iter().enumerate() {
                    if xi == 0 {
                        continue;
                    }
                    for (j, &yj) in y.iter().enumerate() {
                        if yj == 0 {
                            continue;
                        }
                        let t = (i + j) % mm;
                        acc[t] = (acc[t] + mulmod(xi, yj, q)) % q;
                    }
                }
            }
            // Reduce mod Phi over F_q.
            for i in (deg..mm).rev() {
                let lead = acc[i];
                if lead == 0 {
                    continue;
                }
                acc[i] = 0;
                for (j, &pc) in phin.iter().enumerate().take(deg) {
                    if pc == 0 {
                        continue;
                    }
                    let s = mulmod(lead, pc, q);
                    acc[i - deg + j] = (acc[i - deg + j] + q - s) % q;
                }
            }
            let want = if a == c { dres[a] } else { 0 };
            if acc[0] != want || acc[1..].iter().any(|&v| v != 0) {
                return false;
            }
        }
    }
    true
}
