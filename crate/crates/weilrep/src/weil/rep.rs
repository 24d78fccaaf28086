//! Generator matrices and the action of words on group-algebra vectors.
//!
//! `T` acts diagonally by `e(q(gamma))`, `S` by the normalized discrete
//! Fourier kernel `e(-sgn/8)/sqrt(|D|) * e(-(gamma, delta))`, and `Z = S^2`
//! by `e(-sgn/4)` times the sign flip of the index. All exponents are cached
//! as integers at the conductor `M = lcm(8, level)` so letters act on the
//! polynomial layer by shifts.

use super::poly::{exponent_of, PolyMat, PolyVec};
use super::word::{Letter, MpWord};
use crate::exactnum::{checked::C128, polyops::add_shifted, CycNumber, Rat};
use crate::fqm::{DiscForm, Elem};
use crate::linalg::CycMatrix;
use num::Zero;

pub struct WeilContext {
    form: DiscForm,
    m: u32,
    elems: Vec<Elem>,
    t_exp: Vec<u32>,
    pair_exp: Vec<Vec<u32>>,
    neg: Vec<usize>,
    z_shift: u32,
    s_scale: CycNumber,
    s_inv_scale: CycNumber,
}

impl WeilContext {
    pub fn new(form: DiscForm) -> WeilContext {
        let m = form.conductor();
        let n = form.num_elements();
        let elems: Vec<Elem> = form.elements().collect();
        let t_exp: Vec<u32> = elems
            .iter()
            .map(|g| exponent_of(&form.q_value(g), m))
            .collect();
        let pair_exp: Vec<Vec<u32>> = elems
            .iter()
            .map(|g| {
                elems
                    .iter()
                    .map(|h| exponent_of(&form.bilinear(g, h), m))
                    .collect()
            })
            .collect();
        let neg: Vec<usize> = elems.iter().map(|g| form.elem_index(&form.neg(g))).collect();
        let sgn = i64::from(form.signature());
        let eighth =
            |k: i64| CycNumber::root_of_unity((k * (m as i64) / 8).rem_euclid(m as i64), m);
        let inv_sqrt = CycNumber::sqrt_nat(form.order(), m)
            .expect("the conductor carries sqrt(|D|)")
            .inv()
            .expect("|D| > 0");
        let s_scale = eighth(-sgn).mul(&inv_sqrt).canonical_reduce();
        let s_inv_scale = s_scale.conj().canonical_reduce();
        let z_shift = ((-sgn * (m as i64) / 4).rem_euclid(m as i64)) as u32;
        let ctx = WeilContext {
            form,
            m,
            elems,
            t_exp,
            pair_exp,
            neg,
            z_shift,
            s_scale,
            s_inv_scale,
        };
        debug_assert!(
            {
                let zz = ctx.rho_word(&MpWord::from_letters(vec![Letter::Z, Letter::Z]));
                let sign = if sgn % 2 == 0 { 1 } else { -1 };
                zz.is_scalar_identity(&CycNumber::from_int(sign, m))
            },
            "the square of the center must act by the parity of the signature"
        );
        let _ = n;
        ctx
    }

    pub fn form(&self) -> &DiscForm {
        &self.form
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn index(&self, g: &Elem) -> usize {
        self.form.elem_index(g)
    }

    /// `e(r)` at the working conductor.
    pub fn e(&self, r: &Rat) -> CycNumber {
        CycNumber::root_of_unity(i64::from(exponent_of(r, self.m)), self.m)
    }

    pub fn exponent(&self, r: &Rat) -> u32 {
        exponent_of(r, self.m)
    }

    pub fn basis_vec(&self, idx: usize) -> PolyVec {
        PolyVec::basis(self.dim(), self.m, idx)
    }

    pub fn apply_letter(&self, l: Letter, v: &PolyVec) -> PolyVec {
        assert_eq!(v.dim(), self.dim(), "dimension mismatch");
        assert_eq!(v.m, self.m, "conductor mismatch");
        let mut out = PolyVec::with_scale(self.dim(), self.m, v.scale.clone());
        match l {
            Letter::T | Letter::TInv => {
                for (i, p) in v.coords.iter().enumerate() {
                    let k = if l == Letter::T {
                        self.t_exp[i]
                    } else {
                        (self.m - self.t_exp[i]) % self.m
                    };
                    add_shifted(&mut out.coords[i], p, k as usize, &C128(1));
                }
            }
            Letter::S | Letter::SInv => {
                for (g, p) in v.coords.iter().enumerate() {
                    if p.iter().all(|c| c.is_zero()) {
                        continue;
                    }
                    for (d, row) in out.coords.iter_mut().enumerate() {
                        let k = if l == Letter::S {
                            (self.m - self.pair_exp[g][d]) % self.m
                        } else {
                            self.pair_exp[g][d]
                        };
                        add_shifted(row, p, k as usize, &C128(1));
                    }
                }
                let s = if l == Letter::S {
                    &self.s_scale
                } else {
                    &self.s_inv_scale
                };
                out.scalar_mul(s);
            }
            Letter::Z => {
                for (d, row) in out.coords.iter_mut().enumerate() {
                    add_shifted(
                        row,
                        &v.coords[self.neg[d]],
                        self.z_shift as usize,
                        &C128(1),
                    );
                }
            }
        }
        out
    }

    /// Applies the word to a vector; the rightmost letter acts first.
    pub fn apply_word(&self, w: &MpWord, v: &PolyVec) -> PolyVec {
        let mut cur = v.clone();
        for l in w.letters().iter().rev() {
            cur = self.apply_letter(*l, &cur);
        }
        cur
    }

    pub fn rho_word(&self, w: &MpWord) -> PolyMat {
        let mut mat = PolyMat::identity(self.dim(), self.m);
        for l in w.letters().iter().rev() {
            mat = self.apply_letter_mat(*l, &mat);
        }
        mat
    }

    fn apply_letter_mat(&self, l: Letter, mat: &PolyMat) -> PolyMat {
        let mut cols = Vec::with_capacity(mat.dim());
        let mut scale = mat.scale.clone();
        let mut scale_done = false;
        for j in 0..mat.dim() {
            let col = PolyVec {
                m: mat.m,
                scale: mat.scale.clone(),
                coords: mat.cols[j].clone(),
            };
            let out = self.apply_letter(l, &col);
            if !scale_done {
                scale = out.scale.clone();
                scale_done = true;
            }
            cols.push(out.coords);
        }
        PolyMat {
            m: mat.m,
            scale,
            cols,
        }
    }

    pub fn rho_t(&self) -> CycMatrix {
        self.to_matrix(&self.rho_word(&MpWord::from_letters(vec![Letter::T])))
    }

    pub fn rho_s(&self) -> CycMatrix {
        self.to_matrix(&self.rho_word(&MpWord::from_letters(vec![Letter::S])))
    }

    pub fn rho_word_matrix(&self, w: &MpWord) -> CycMatrix {
        self.to_matrix(&self.rho_word(w))
    }

    pub fn to_matrix(&self, mat: &PolyMat) -> CycMatrix {
        CycMatrix::from_fn(mat.dim(), mat.dim(), |i, j| mat.entry(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqm::parse_symbol;
    use num::One;

    fn ctx(sym: &str) -> WeilContext {
        WeilContext::new(parse_symbol(sym).unwrap())
    }

    #[test]
    fn generator_matrices_on_a_two_element_module() {
        let c = ctx("2_1^+1");
        let t = c.rho_t();
        assert!(t.at(0, 0).to_rat().unwrap().is_one());
        assert!(t.at(1, 0).is_zero());
        // q(1) = 1/4.
        assert!(t.at(1, 1).sub(&CycNumber::root_of_unity(2, 8)).is_zero());
        let s = c.rho_s();
        let w = CycNumber::root_of_unity(7, 8)
            .mul(&CycNumber::sqrt_nat(2, 8).unwrap().inv().unwrap());
        assert!(s.at(0, 0).sub(&w).is_zero());
        assert!(s.at(0, 1).sub(&w).is_zero());
        assert!(s.at(1, 0).sub(&w).is_zero());
        assert!(s.at(1, 1).add(&w).is_zero());
    }

    #[test]
    fn trivial_module_representation_is_trivial() {
        let c = WeilContext::new(DiscForm::trivial());
        let s = c.rho_s();
        assert_eq!(s.rows(), 1);
        assert!(s.at(0, 0).to_rat().unwrap().is_one());
    }

    #[test]
    fn defining_relations_hold() {
        for sym in ["2_1^+1", "3^+1", "5^-1", "U(2)", "2_II^-2", "4_3^-1 + 3^-1"] {
            let c = ctx(sym);
            let s2 = c.rho_word(&MpWord::parse("S S").unwrap());
            let st3 = c.rho_word(&MpWord::parse("S T S T S T").unwrap());
            assert!(s2.eq_value(&st3), "braid relation on {sym}");
            let z = c.rho_word(&MpWord::parse("Z").unwrap());
            assert!(s2.eq_value(&z), "center on {sym}");
            let s4 = c.rho_word(&MpWord::parse("S S S S").unwrap());
            let sign = if c.form().signature() % 2 == 0 { 1 } else { -1 };
            assert!(
                s4.is_scalar_identity(&CycNumber::from_int(sign, c.m())),
                "fourth power of S on {sym}"
            );
        }
    }

    #[test]
    fn words_compose_and_invert() {
        let c = ctx("3^+1");
        let w = MpWord::parse("T S T T S^-1 T^-1 S").unwrap();
        let wi = w.inverse();
        let prod = c.rho_word(&w.mul(&wi));
        assert!(prod.is_scalar_identity(&CycNumber::one(c.m())));
        // Applying the word to a basis vector picks out the matrix column.
        let v = c.basis_vec(1);
        let u = c.apply_word(&w, &v);
        let col = c.rho_word(&w).column(1);
        assert!(u.eq_value(&col));
    }

    #[test]
    fn unitarity_of_s_on_a_sample() {
        let c = ctx("U(3)");
        let s = c.rho_s();
        assert!(s.gram().is_identity());
    }
}
