//! Symbol grammar for builtin forms.
//!
//! A symbol is one or more atoms joined by `⊕` or ` + `:
//!
//! * `p^+k` / `p^-k` for an odd prime `p`: orthogonal sum of `k` blocks
//!   `Z/p` with `q(x) = t x²/p`, where `t = 1` on all blocks except that the
//!   last uses the least positive non-residue when the sign is `-`.
//! * `2_t^+1` / `2_t^-1` with `t` odd: `Z/2` with `q(x) = t x²/4`. The sign
//!   must satisfy `+ ⟺ t ≡ ±1 (mod 8)`.
//! * `4_t^+1` / `4_t^-1` with `t` odd: `Z/4` with `q(x) = t x²/8`, same sign
//!   rule.
//! * `2_II^+2k` / `2_II^-2k`: even 2-adic blocks on `(Z/2)²`; `+` gives `k`
//!   hyperbolic blocks, `-` replaces one of them by the block with all three
//!   nonzero values `1/2`.
//! * `U(N)`: `Z/N ⊕ Z/N` with `q(a e + b f) = ab/N`.
//! * `UG(n_1,...,n_k)`: shorthand for `U(n_1) ⊕ … ⊕ U(n_k)`.

use crate::error::{Error, Result};
use crate::exactnum::{legendre, rat, Rat};
use crate::fqm::form::DiscForm;
use num::Zero;

struct Blocks {
    orders: Vec<u32>,
    q_diag: Vec<Rat>,
    b_off: Vec<(usize, usize, Rat)>,
}

impl Blocks {
    fn new() -> Blocks {
        Blocks { orders: Vec::new(), q_diag: Vec::new(), b_off: Vec::new() }
    }

    fn push_cyclic(&mut self, n: u32, q: Rat) {
        self.orders.push(n);
        self.q_diag.push(q);
    }

    fn push_pair(&mut self, n: u32, q0: Rat, q1: Rat, b: Rat) {
        let i = self.orders.len();
        self.orders.push(n);
        self.orders.push(n);
        self.q_diag.push(q0);
        self.q_diag.push(q1);
        if !b.is_zero() {
            self.b_off.push((i, i + 1, b));
        }
    }
}

fn is_odd_prime(p: u32) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn least_nonresidue(p: u32) -> u32 {
    (2..p).find(|&t| legendre(t as i64, p as u64) == -1).expect("odd primes have non-residues")
}

fn parse_sign_rank(s: &str) -> Result<(i32, u32)> {
    let sign = match s.chars().next() {
        Some('+') => 1,
        Some('-') => -1,
        _ => return Err(Error::invalid(format!("exponent must start with a sign: {s:?}"))),
    };
    let rank: u32 = s[1..]
        .parse()
        .map_err(|_| Error::invalid(format!("bad rank in exponent {s:?}")))?;
    if rank == 0 {
        return Err(Error::invalid("rank must be positive"));
    }
    Ok((sign, rank))
}

fn two_adic_sign_ok(t: u32, sign: i32) -> bool {
    let r = t % 8;
    (sign == 1) == (r == 1 || r == 7)
}

fn parse_atom(atom: &str, out: &mut Blocks) -> Result<()> {
    let atom = atom.trim();
    if atom.is_empty() {
        return Err(Error::invalid("empty symbol component"));
    }
    if let Some(rest) = atom.strip_prefix("UG(") {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::invalid(format!("unterminated UG(...): {atom:?}")))?;
        for part in inner.split(',') {
            let n: u32 = part
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad order in {atom:?}")))?;
            if n == 0 {
                return Err(Error::invalid("orders in UG(...) must be positive"));
            }
            if n > 1 {
                out.push_pair(n, rat(0, 1), rat(0, 1), rat(1, n as i64));
            }
        }
        return Ok(());
    }
    if let Some(rest) = atom.strip_prefix("U(") {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::invalid(format!("unterminated U(...): {atom:?}")))?;
        let n: u32 = inner
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad order in {atom:?}")))?;
        if n == 0 {
            return Err(Error::invalid("U(N) requires N ≥ 1"));
        }
        if n > 1 {
            out.push_pair(n, rat(0, 1), rat(0, 1), rat(1, n as i64));
        }
        return Ok(());
    }
    let (base, exp) = atom
        .split_once('^')
        .ok_or_else(|| Error::invalid(format!("unrecognized symbol component {atom:?}")))?;
    let (sign, rank) = parse_sign_rank(exp.trim())?;
    let base = base.trim();
    if base == "2_II" {
        if rank % 2 != 0 {
            return Err(Error::invalid("2_II blocks have even rank"));
        }
        let pairs = rank / 2;
        for i in 0..pairs {
            if sign == -1 && i == pairs - 1 {
                out.push_pair(2, rat(1, 2), rat(1, 2), rat(1, 2));
            } else {
                out.push_pair(2, rat(0, 1), rat(0, 1), rat(1, 2));
            }
        }
        return Ok(());
    }
    if let Some((head, t_str)) = base.split_once('_') {
        let t: u32 = t_str
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad subscript in {atom:?}")))?;
        if t % 2 == 0 {
            return Err(Error::invalid(format!("subscript must be odd in {atom:?}")));
        }
        if rank != 1 {
            return Err(Error::invalid(format!(
                "{head}_t components are rank 1; combine with ⊕ instead"
            )));
        }
        if !two_adic_sign_ok(t, sign) {
            return Err(Error::invalid(format!(
                "sign does not match subscript {t} mod 8 in {atom:?}"
            )));
        }
        match head.trim() {
            "2" => out.push_cyclic(2, rat(t as i64, 4)),
            "4" => out.push_cyclic(4, rat(t as i64, 8)),
            other => {
                return Err(Error::invalid(format!("unknown 2-adic family {other:?}")))
            }
        }
        return Ok(());
    }
    let p: u32 = base
        .parse()
        .map_err(|_| Error::invalid(format!("unrecognized symbol component {atom:?}")))?;
    if !is_odd_prime(p) {
        return Err(Error::invalid(format!(
            "{p} is not an odd prime; 2-adic components need a subscript"
        )));
    }
    for i in 0..rank {
        let t = if sign == -1 && i == rank - 1 { least_nonresidue(p) } else { 1 };
        out.push_cyclic(p, rat(t as i64, p as i64));
    }
    Ok(())
}

/// Parses a symbol string into a validated form.
pub fn parse_symbol(sym: &str) -> Result<DiscForm> {
    let normalized = sym.replace('⊕', "\u{1}").replace(" + ", "\u{1}");
    let mut blocks = Blocks::new();
    for atom in normalized.split('\u{1}') {
        parse_atom(atom, &mut blocks)?;
    }
    DiscForm::construct(&blocks.orders, &blocks.q_diag, &blocks.b_off)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(sym: &str) -> u8 {
        parse_symbol(sym).unwrap().signature()
    }

    #[test]
    fn odd_prime_signatures() {
        assert_eq!(sig("3^+1"), 2);
        assert_eq!(sig("3^-1"), 6);
        assert_eq!(sig("5^+1"), 0);
        assert_eq!(sig("5^-1"), 4);
        assert_eq!(sig("7^+1"), 2);
        assert_eq!(sig("7^-1"), 6);
        assert_eq!(sig("31^-1"), 6);
    }

    #[test]
    fn two_adic_signatures() {
        assert_eq!(sig("2_1^+1"), 1);
        assert_eq!(sig("2_7^+1"), 7);
        assert_eq!(sig("2_3^-1"), 7);
        assert_eq!(sig("2_5^-1"), 1);
        assert_eq!(sig("4_1^+1"), 1);
        assert_eq!(sig("4_3^-1"), 3);
        assert_eq!(sig("4_5^-1"), 5);
        assert_eq!(sig("4_7^+1"), 7);
        assert_eq!(sig("2_II^+2"), 0);
        assert_eq!(sig("2_II^-2"), 4);
        assert_eq!(sig("2_II^-4"), 4);
    }

    #[test]
    fn subscript_aliases_give_equal_forms() {
        assert_eq!(parse_symbol("2_5^-1").unwrap(), parse_symbol("2_1^+1").unwrap());
        assert_eq!(parse_symbol("2_3^-1").unwrap(), parse_symbol("2_7^+1").unwrap());
    }

    #[test]
    fn higher_rank_odd_atoms() {
        let d = parse_symbol("3^-4").unwrap();
        assert_eq!(d.orders(), &[3, 3, 3, 3]);
        assert_eq!(d.signature(), 4);
        assert_eq!(sig("3^+2"), 4);
    }

    #[test]
    fn hyperbolic_symbols() {
        let u6 = parse_symbol("U(6)").unwrap();
        assert_eq!(u6.signature(), 0);
        assert_eq!(u6.order(), 36);
        assert_eq!(parse_symbol("U(1)").unwrap().order(), 1);
        let ug = parse_symbol("UG(2,3)").unwrap();
        assert_eq!(ug.orders(), &[2, 2, 3, 3]);
        assert_eq!(ug, parse_symbol("U(2) ⊕ U(3)").unwrap());
    }

    #[test]
    fn sums_and_separators() {
        let a = parse_symbol("2_1^+1 ⊕ 3^+1").unwrap();
        let b = parse_symbol("2_1^+1 + 3^+1").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.signature(), 3);
        assert_eq!(a.order(), 6);
    }

    #[test]
    fn rejects_malformed_symbols() {
        assert!(parse_symbol("2_2^+1").is_err());
        assert!(parse_symbol("2_1^-1").is_err());
        assert!(parse_symbol("4_3^+1").is_err());
        assert!(parse_symbol("6^+1").is_err());
        assert!(parse_symbol("2_II^+3").is_err());
        assert!(parse_symbol("U(0)").is_err());
        assert!(parse_symbol("3^0").is_err());
        assert!(parse_symbol("junk").is_err());
    }
}
