//! Individual attacks on BB84 with the Fuchs–Peres–Brandt (FPB) entangling
//! probe, followed by a generalized state-discrimination measurement that
//! interpolates between the Helstrom and unambiguous (IDP) schemes.
//!
//! The crate is organised bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`linalg`] | exact-size complex vectors/matrices (dims 1–4), closed-form Hermitian spectra |
//! | [`probe`] | probe geometry as a function of the induced error rate `P_E` |
//! | [`discrimination`] | three-outcome POVM, outcome probabilities, error lower bound |
//! | [`entropy`] | Shannon/Rényi entropies, conditional variants, mutual-information measures |
//! | [`uncertainty`] | Naimark extensions, Maassen–Uffink, Coles–Piani and majorization bounds |
//! | [`simulator`] | seeded Monte-Carlo protocol sessions used as a statistical oracle |
//!
//! All entropies are in bits.

pub mod discrimination;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod probe;
pub mod simulator;
pub mod uncertainty;

pub use error::{Error, Result};

/// Tolerance for structural checks (unitarity, PSD, normalization).
pub const STRUCTURAL_TOL: f64 = 1e-10;
