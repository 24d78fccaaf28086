//! Words in the metaplectic double cover of `SL2(Z)`.
//!
//! Elements are handled as words over `T`, `T^-1`, `S`, `S^-1`, `Z` rather
//! than as matrices: a matrix determines a metaplectic element only up to the
//! central `Z^2`, which acts nontrivially when the signature is odd. Each
//! word carries its integer matrix projection, with `Z` projecting to `-I`.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    T,
    TInv,
    S,
    SInv,
    Z,
}

impl Letter {
    pub fn inverse(self) -> Vec<Letter> {
        match self {
            Letter::T => vec![Letter::TInv],
            Letter::TInv => vec![Letter::T],
            Letter::S => vec![Letter::SInv],
            Letter::SInv => vec![Letter::S],
            // Z has order 4 in the cover.
            Letter::Z => vec![Letter::Z, Letter::Z, Letter::Z],
        }
    }

    fn matrix(self) -> [i64; 4] {
        match self {
            Letter::T => [1, 1, 0, 1],
            Letter::TInv => [1, -1, 0, 1],
            Letter::S => [0, -1, 1, 0],
            Letter::SInv => [0, 1, -1, 0],
            Letter::Z => [-1, 0, 0, -1],
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Letter::T => "T",
            Letter::TInv => "T^-1",
            Letter::S => "S",
            Letter::SInv => "S^-1",
            Letter::Z => "Z",
        };
        write!(f, "{s}")
    }
}

fn mat_mul(a: [i64; 4], b: [i64; 4]) -> [i64; 4] {
    let p = |x: i64, y: i64| x.checked_mul(y).expect("word matrix overflow");
    let s = |x: i64, y: i64| x.checked_add(y).expect("word matrix overflow");
    [
        s(p(a[0], b[0]), p(a[1], b[2])),
        s(p(a[0], b[1]), p(a[1], b[3])),
        s(p(a[2], b[0]), p(a[3], b[2])),
        s(p(a[2], b[1]), p(a[3], b[3])),
    ]
}

/// A word `l_1 l_2 ... l_n`, acting on vectors by applying `l_n` first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpWord {
    letters: Vec<Letter>,
    mat: [i64; 4],
}

impl MpWord {
    pub fn identity() -> MpWord {
        MpWord {
            letters: Vec::new(),
            mat: [1, 0, 0, 1],
        }
    }

    pub fn from_letters(letters: Vec<Letter>) -> MpWord {
        let mat = letters
            .iter()
            .fold([1, 0, 0, 1], |acc, l| mat_mul(acc, l.matrix()));
        MpWord { letters, mat }
    }

    /// Parses whitespace-separated tokens `T`, `T^-1`, `S`, `S^-1`, `Z`.
    pub fn parse(text: &str) -> Result<MpWord> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let l = match tok {
                "T" => Letter::T,
                "T^-1" | "T-1" | "t^-1" => Letter::TInv,
                "S" => Letter::S,
                "S^-1" | "S-1" | "s^-1" => Letter::SInv,
                "Z" => Letter::Z,
                _ => {
                    return Err(Error::invalid(format!(
                        "unknown letter {tok:?}; expected T, T^-1, S, S^-1 or Z"
                    )))
                }
            };
            letters.push(l);
        }
        Ok(MpWord::from_letters(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The `SL2(Z)` projection `[a, b, c, d]`.
    pub fn matrix(&self) -> [i64; 4] {
        self.mat
    }

    pub fn mul(&self, other: &MpWord) -> MpWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        MpWord {
            letters,
            mat: mat_mul(self.mat, other.mat),
        }
    }

    pub fn inverse(&self) -> MpWord {
        let mut letters = Vec::with_capacity(self.letters.len());
        for l in self.letters.iter().rev() {
            letters.extend(l.inverse());
        }
        MpWord::from_letters(letters)
    }

    pub fn pow_t(exp: i64) -> MpWord {
        let l = if exp >= 0 { Letter::T } else { Letter::TInv };
        MpWord::from_letters(vec![l; exp.unsigned_abs() as usize])
    }
}

impl fmt::Display for MpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Writes `m` as `Z^e T^(a_1) S T^(a_2) S ... T^(a_k)` by Euclidean
/// reduction on the first column, with each quotient chosen by floored
/// division. The result is one fixed preimage of `m` in the cover.
pub fn matrix_to_word(m: [i64; 4]) -> Result<MpWord> {
    let det = m[0]
        .checked_mul(m[3])
        .zip(m[1].checked_mul(m[2]))
        .map(|(ad, bc)| ad - bc);
    if det != Some(1) {
        return Err(Error::invalid("matrix must have determinant one"));
    }
    // Invariant: word.matrix() * cur == m.
    let mut word = MpWord::identity();
    let mut cur = m;
    while cur[2] != 0 {
        let q = cur[0].div_euclid(cur[2]);
        // cur <- S^-1 T^-q cur, so the word gains T^q S on the right.
        let r = [cur[2], cur[3], -(cur[0] - q * cur[2]), -(cur[1] - q * cur[3])];
        word = word.mul(&MpWord::pow_t(q));
        word = word.mul(&MpWord::from_letters(vec![Letter::S]));
        cur = r;
    }
    // cur is now upper triangular with unit diagonal.
    if cur[0] == 1 {
        word = word.mul(&MpWord::pow_t(cur[1]));
    } else {
        debug_assert_eq!(cur[0], -1);
        word = word.mul(&MpWord::from_letters(vec![Letter::Z]));
        word = word.mul(&MpWord::pow_t(-cur[1]));
    }
    debug_assert_eq!(word.matrix(), m);
    Ok(word)
}

/// Lifts a matrix over `Z/n` with unit determinant to an integer matrix of
/// determinant one reducing to it, keeping entries of size `O(n^2)`.
pub fn sl2_lift(m: [i64; 4], n: i64) -> Result<[i64; 4]> {
    assert!(n >= 1);
    if n == 1 {
        return Ok([1, 0, 0, 1]);
    }
    let red = |x: i64| x.rem_euclid(n);
    let (a, b, c, d) = (red(m[0]), red(m[1]), red(m[2]), red(m[3]));
    if red(a * d - b * c) != 1 {
        return Err(Error::invalid("matrix must have determinant one mod n"));
    }
    // Fix a coprime bottom row congruent to (c, d).
    let (mut c1, mut d1) = (c, d);
    if c1 == 0 && d1 == 0 {
        return Err(Error::invalid("bottom row vanishes mod n"));
    }
    if c1 == 0 {
        c1 = n;
    }
    if d1 == 0 {
        d1 = n;
    }
    let g = gcd(c1, d1);
    if g != 1 {
        // c1 + kn and d1 coprime for a suitable k: take k the product of the
        // primes of d1 not dividing c1... a direct search stays tiny here.
        let mut k = 1;
        while gcd(c1 + k * n, d1) != 1 {
            k += 1;
        }
        c1 += k * n;
    }
    // Solve a1*d1 - b1*c1 = 1 with (a1, b1) congruent to (a, b).
    let (x, y) = bezout(d1, c1);
    // x*d1 + y*c1 = 1, so (a1, b1) = (x, -y) works mod adjustment:
    // determinant defect (a - x*?) handled by shifting along (c1, d1).
    let a0 = x;
    let b0 = -y;
    // a0*d1 - b0*c1 = 1. Adjust by t*(c1, d1) to hit the right residues:
    // (a0 + t*c1) = a mod n requires t = (a - a0) / c1 mod n when c1 unit;
    // solve the congruence on whichever coordinate is solvable.
    for t in 0..n {
        let a1 = a0 + t * c1;
        let b1 = b0 + t * d1;
        if red(a1) == a && red(b1) == b {
            return Ok([a1, b1, c1, d1]);
        }
    }
    Err(Error::internal(
        "no lift along the bottom row; determinant hypothesis violated",
    ))
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Returns `(x, y)` with `x*a + y*b = gcd(a, b)`.
fn bezout(a: i64, b: i64) -> (i64, i64) {
    if b == 0 {
        return (a.signum(), 0);
    }
    let (x, y) = bezout(b, a % b);
    (y, x - (a / b) * y)
}
