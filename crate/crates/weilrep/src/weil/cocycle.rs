//! The quadratic cocycle on index pairs, the twisted star action, and the
//! character of the subgroup generated by `S` and `T^2`.
//!
//! That subgroup has index 3; its cosets are tracked by a three-state
//! automaton, and the character value of a word is accumulated through the
//! Schreier transversal `{1, T, TS}`. The only nonobvious table entry is the
//! loop at the `TS`-coset under `T`, which the braid relation pins to
//! `Z^-1 S T^-2`, hence to character exponent -1.

use super::word::{Letter, MpWord};
use crate::exactnum::{frac_mod1, Rat};
use crate::fqm::{DiscForm, Elem};
use num::BigInt;

/// Left coset of the subgroup generated by `S` and `T^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coset {
    Id,
    T,
    ST,
}

fn perm_of(l: Letter) -> [usize; 3] {
    match l {
        // Both involutions, so each letter and its inverse permute alike.
        Letter::T | Letter::TInv => [1, 0, 2],
        Letter::S | Letter::SInv => [0, 2, 1],
        Letter::Z => [0, 1, 2],
    }
}

/// Detects which coset a word lies in by running the letters right to left
/// over the coset states.
pub fn gamma_odd_coset(w: &MpWord) -> Coset {
    let mut state = 0usize;
    for l in w.letters().iter().rev() {
        state = perm_of(*l)[state];
    }
    match state {
        0 => Coset::Id,
        1 => Coset::T,
        _ => Coset::ST,
    }
}

pub fn is_gamma_odd(w: &MpWord) -> bool {
    gamma_odd_coset(w) == Coset::Id
}

/// Schreier value at a state for a forward letter, as a multiple of the
/// character value at `S`.
fn schreier(state: usize, l: Letter) -> i64 {
    match l {
        Letter::T => [0, 0, 7][state],
        Letter::S => [1, 0, 2][state],
        Letter::Z => 2,
        _ => unreachable!("inverse letters are folded outside"),
    }
}

fn transduce(state: &mut usize, l: Letter) -> i64 {
    let next = perm_of(l)[*state];
    let val = match l {
        Letter::T | Letter::S | Letter::Z => schreier(*state, l),
        Letter::TInv => -schreier(next, Letter::T),
        Letter::SInv => -schreier(next, Letter::S),
    };
    *state = next;
    val
}

/// Exponent `k` with `chi(w) = chi(S)^k`, for the character killing the free
/// part of the subgroup and extended to the other cosets by dropping a left
/// `T` and converting a left `ST` into one factor of `chi(S)`.
pub fn chi_exponent(w: &MpWord) -> i64 {
    let coset = gamma_odd_coset(w);
    let (prefix, offset): (&[Letter], i64) = match coset {
        Coset::Id => (&[], 0),
        Coset::T => (&[Letter::TInv], 0),
        Coset::ST => (&[Letter::TInv, Letter::SInv], 1),
    };
    let mut state = 0usize;
    let mut k = 0i64;
    for l in prefix.iter().chain(w.letters()) {
        k += transduce(&mut state, *l);
    }
    assert_eq!(state, 0, "the reduced word must close at the base coset");
    (k + offset).rem_euclid(8)
}

/// `Q(M, v) = ac q(eta) + bd q(lambda) + bc (lambda, eta)` mod 1.
pub fn q_cocycle(d: &DiscForm, m: [i64; 4], eta: &Elem, lambda: &Elem) -> Rat {
    let [a, b, c, dd] = m;
    let int = |v: i64| Rat::from_integer(BigInt::from(v));
    frac_mod1(
        &(int(a * c) * d.q_value(eta)
            + int(b * dd) * d.q_value(lambda)
            + int(b * c) * d.bilinear(lambda, eta)),
    )
}

/// Applies the matrix to the index pair: `(a eta + b lambda, c eta + d lambda)`.
pub fn mat_apply(d: &DiscForm, m: [i64; 4], eta: &Elem, lambda: &Elem) -> (Elem, Elem) {
    let [a, b, c, dd] = m;
    (
        d.add(&d.scale(a, eta), &d.scale(b, lambda)),
        d.add(&d.scale(c, eta), &d.scale(dd, lambda)),
    )
}

/// The star action: the matrix action with the linearizing element added to
/// the first index on the `T` coset and to the second on the `ST` coset.
pub fn star_action(
    d: &DiscForm,
    w: &MpWord,
    eta: &Elem,
    lambda: &Elem,
    xi: &Elem,
) -> (Elem, Elem) {
    let (me, ml) = mat_apply(d, w.matrix(), eta, lambda);
    match gamma_odd_coset(w) {
        Coset::Id => (me, ml),
        Coset::T => (d.add(&me, xi), ml),
        Coset::ST => (me, d.add(&ml, xi)),
    }
}

/// The twisted cocycle: equals `Q` off the `ST` coset and gains the pairing
/// of the linearizer with the transformed first index there.
pub fn q_tilde(
    d: &DiscForm,
    w: &MpWord,
    eta: &Elem,
    lambda: &Elem,
    xi: &Elem,
) -> Rat {
    let base = q_cocycle(d, w.matrix(), eta, lambda);
    match gamma_odd_coset(w) {
        Coset::Id | Coset::T => base,
        Coset::ST => {
            let [a, b, _, _] = w.matrix();
            let first = d.add(&d.scale(a, eta), &d.scale(b, lambda));
            frac_mod1(&(base + d.bilinear(xi, &first)))
        }
    }
}
