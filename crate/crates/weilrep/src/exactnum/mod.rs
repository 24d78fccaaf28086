//! Exact arithmetic: rationals, cyclotomic integers and the cyclotomic
//! fields `Q(zeta_M)` every other module computes in.
//!
//! No floating point is consulted anywhere in this module tree; float
//! embeddings exist only inside tests as sanity oracles.

pub mod checked;
pub mod cyc;
pub mod cyclo;
pub mod polyops;
pub mod rational;

pub use checked::C128;
pub use cyc::{legendre, CycJson, CycNumber};
pub use cyclo::{cyclotomic_poly, divisors, euler_phi, prime_factors};
pub use rational::{denom_u64, fmt_rat, frac_mod1, is_int, parse_rat, rat, rat_int, Rat};
