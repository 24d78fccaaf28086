//! Cyclotomic polynomials with a process-wide cache.
//!
//! `cyclotomic_poly(m)` returns the monic `Phi_m` as integer coefficients,
//! constant term first, length `phi(m) + 1`. Computed by exact division of
//! `x^m - 1` by all `Phi_d` for proper divisors `d | m`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub fn euler_phi(m: u32) -> u32 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn divisors(m: u32) -> Vec<u32> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            small.push(d);
            if d != m / d {
                large.push(m / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn phi_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Monic `Phi_m`, constant term first. Coefficients stay tiny for the
/// conductors in scope; checked i64 arithmetic guards the computation.
pub fn cyclotomic_poly(m: u32) -> Arc<Vec<i64>> {
    assert!(m >= 1, "conductor must be positive");
    if let Some(hit) = phi_cache().lock().unwrap().get(&m) {
        return hit.clone();
    }
    let poly = if m == 1 {
        vec![-1, 1]
    } else {
        // x^m - 1
        let mut f = vec![0i64; m as usize + 1];
        f[0] = -1;
        f[m as usize] = 1;
        for d in divisors(m) {
            if d == m {
                continue;
            }
            let phi_d = cyclotomic_poly(d);
            f = divide_exact(&f, &phi_d);
        }
        f
    };
    debug_assert_eq!(poly.len() as u32, euler_phi(m) + 1);
    let arc = Arc::new(poly);
    phi_cache().lock().unwrap().insert(m, arc.clone());
    arc
}

/// Exact division of integer polynomials; `divisor` must be monic and divide
/// `num` exactly.
fn divide_exact(num: &[i64], divisor: &[i64]) -> Vec<i64> {
    let dn = num.len() - 1;
    let dd = divisor.len() - 1;
    assert_eq!(divisor[dd], 1, "divisor must be monic");
    assert!(dn >= dd);
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; dn - dd + 1];
    for i in (dd..=dn).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        quot[i - dd] = c;
        for (j, &dc) in divisor.iter().enumerate() {
            rem[i - dd + j] = rem[i - dd + j]
                .checked_sub(c.checked_mul(dc).expect("cyclotomic overflow"))
                .expect("cyclotomic overflow");
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "inexact cyclotomic division");
    quot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(8), 4);
        assert_eq!(euler_phi(9), 6);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(248), 120);
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(*cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn degree_matches_phi_for_composite_conductors() {
        for m in [24u32, 40, 56, 88, 104, 120, 136, 152, 184, 216, 232, 248] {
            assert_eq!(cyclotomic_poly(m).len() as u32, euler_phi(m) + 1);
        }
    }

    #[test]
    fn product_over_divisors_is_x_pow_m_minus_one() {
        // Multiply all Phi_d for d | 24 and compare against x^24 - 1.
        let m = 24u32;
        let mut prod = vec![1i64];
        for d in divisors(m) {
            let phi_d = cyclotomic_poly(d);
            let mut next = vec![0i64; prod.len() + phi_d.len() - 1];
            for (i, &a) in prod.iter().enumerate() {
                for (j, &b) in phi_d.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            prod = next;
        }
        let mut expect = vec![0i64; 25];
        expect[0] = -1;
        expect[24] = 1;
        assert_eq!(prod, expect);
    }
}
