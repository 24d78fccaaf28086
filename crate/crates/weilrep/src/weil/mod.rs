//! The representation attached to a finite quadratic module: generator
//! matrices, words in the metaplectic group, the indexed vector families the
//! group permutes up to scalars, and the predicted actions with their
//! machine-checked cross-validation against the matrices.

pub mod cocycle;
pub mod decomp;
pub mod poly;
pub mod action;
pub mod rep;
pub mod vectors;
pub mod word;

pub use action::{expansion_oracles, milgram_twisted, milgram_twisted_with, predicted_action, Expansion, ExpansionOracles, PredictedAction};
pub use decomp::{cyclic_decomposition, CyclicComponent, CyclicDecomposition};
pub use cocycle::{chi_exponent, gamma_odd_coset, is_gamma_odd, q_cocycle, q_tilde, star_action, Coset};
pub use poly::{inner_poly, PolyMat, PolyVec, ScaledPoly};
pub use rep::WeilContext;
pub use vectors::{a_vector, a_vector_sym, arrow_up, b_vector, IndexedVector, VectorKind};
pub use word::{matrix_to_word, sl2_lift, Letter, MpWord};
