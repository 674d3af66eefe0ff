//! Entanglement certification.

mod entanglement;
pub mod optim;
mod sdp;
mod sle;
mod witness;
mod xshape;


pub use entanglement::{min_eig_after_pt, negativity};
pub use sdp::{ppt_mixer_witness, CertifiedSign, Decomposition, SolverConfig, WitnessResult};
pub use sle::{evaluate as sle_evaluate, localized_state as sle_localized_state, sle_quantify, Quantifier, SleResult};
pub use witness::{
    exact_expectation, fidelity_from_settings, ghz_witness_expectation, m_operator, setting_operator,
    w_witness_expectation, FidelityTarget, Setting,
};
pub use xshape::{gme_concurrence_terms, gme_concurrence_x, x_shape_view, XShapeView, X_SHAPE_LEAKAGE_LIMIT};
