//! Integral bases for the Weil representation and their machine verification.
//!
//! `integral_basis` runs the recursive construction: split off Sylow parts
//! and tensor, reduce along isotropic subgroups, and bottom out in the
//! anisotropic bases of `prime_basis` and `two_adic_basis`. The claim that
//! every representation matrix has algebraic-integer entries on such a basis
//! is not assumed anywhere: `verify_integrality` recomputes the conjugated
//! generator matrices from scratch and reports what it finds.

mod construct;
mod modinv;
mod vandermonde;
mod verify;

pub use construct::{integral_basis, natural_basis, prime_basis, two_adic_basis};
pub use vandermonde::{c_coefficients, f_chain_identity, f_recursion, vandermonde_lu, Parity};
pub use verify::{verify_integrality, IntegralityReport};

use crate::fqm::{DiscForm, Elem, Subgroup};
use crate::linalg::CycMatrix;
use crate::weil::PolyVec;
use serde_json::{json, Value};

/// How one basis column was constructed.
#[derive(Clone, Debug)]
pub enum BasisTag {
    /// Coset vector over an isotropic self-dual subgroup.
    SelfDualA {
        h: Subgroup,
        eta: Elem,
        lambda: Elem,
    },
    /// Coset vector over a quasi-isotropic self-dual subgroup.
    QuasiA {
        h: Subgroup,
        eta: Elem,
        lambda: Elem,
    },
    /// Twisted vector completing a lifted basis to the whole space.
    BVec {
        h: Subgroup,
        j: Subgroup,
        eta: Elem,
        lambda: Elem,
    },
    /// Isometric lift along an isotropic subgroup of a column built on the
    /// quotient module.
    Arrow { j: Subgroup, inner: Box<BasisTag> },
    /// `rho(T)^l` of the symmetric coset vector on an odd prime module.
    PrimeEven { p: u64, sign: i8, l: u32 },
    /// `rho(T)^l` of the antisymmetric coset vector on an odd prime module.
    PrimeOdd { p: u64, sign: i8, l: u32 },
    /// `rho(T)^l` of the full-module coset vector on a 2-adic module.
    TwoAdic { symbol: String, l: u32 },
    /// Entrywise product of columns of the orthogonal summands.
    Tensor { children: Vec<BasisTag> },
    /// Standard basis vector `e_gamma`; only the negative control uses this.
    Natural { index: usize },
}

fn gens_json(s: &Subgroup) -> Value {
    json!(s.gens())
}

impl BasisTag {
    pub fn to_json(&self) -> Value {
        match self {
            BasisTag::SelfDualA { h, eta, lambda } => json!({
                "tag": "self_dual_a", "h": gens_json(h), "eta": eta, "lambda": lambda,
            }),
            BasisTag::QuasiA { h, eta, lambda } => json!({
                "tag": "quasi_a", "h": gens_json(h), "eta": eta, "lambda": lambda,
            }),
            BasisTag::BVec { h, j, eta, lambda } => json!({
                "tag": "b_vec", "h": gens_json(h), "j": gens_json(j),
                "eta": eta, "lambda": lambda,
            }),
            BasisTag::Arrow { j, inner } => json!({
                "tag": "arrow", "j": gens_json(j), "inner": inner.to_json(),
            }),
            BasisTag::PrimeEven { p, sign, l } => json!({
                "tag": "prime_even", "p": p, "sign": sign, "l": l,
            }),
            BasisTag::PrimeOdd { p, sign, l } => json!({
                "tag": "prime_odd", "p": p, "sign": sign, "l": l,
            }),
            BasisTag::TwoAdic { symbol, l } => json!({
                "tag": "two_adic", "symbol": symbol, "l": l,
            }),
            BasisTag::Tensor { children } => json!({
                "tag": "tensor",
                "children": children.iter().map(BasisTag::to_json).collect::<Vec<_>>(),
            }),
            BasisTag::Natural { index } => json!({ "tag": "natural", "index": index }),
        }
    }
}

/// A full basis of `C[D]` together with the construction tag of each column.
#[derive(Clone, Debug)]
pub struct BasisSpec {
    pub form: DiscForm,
    pub vectors: Vec<BasisTag>,
    pub coords: Vec<PolyVec>,
}

impl BasisSpec {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Columns in the natural `e_gamma` coordinates.
    pub fn coords_matrix(&self) -> CycMatrix {
        let cols: Vec<Vec<_>> = self.coords.iter().map(PolyVec::to_cyc).collect();
        CycMatrix::from_columns(&cols).expect("basis columns share the dimension")
    }

    pub fn to_json(&self) -> Value {
        let coords: Vec<Vec<_>> = self
            .coords
            .iter()
            .map(|c| {
                c.to_cyc()
                    .iter()
                    .map(|v| v.clone().canonical_reduce().to_json())
                    .collect::<Vec<_>>()
            })
            .collect();
        json!({
            "order": self.form.order(),
            "conductor": self.coords.first().map(|c| c.m),
            "vectors": self.vectors.iter().map(BasisTag::to_json).collect::<Vec<_>>(),
            "columns": coords,
        })
    }
}
