//! Real-argument Airy and Scorer kernel.

mod eval;
mod scorer;
mod zeros;

pub(crate) use eval::{
    ai_aip, airy_unchecked, neg_modulus_phase, scaled_unchecked, zeta, zeta_gap, AI0, AIP0, BI0, BIP0,
};
pub use eval::{airy_eval, airy_eval_scaled, AiryValues, ScaledAiryValues};
pub use scorer::{
    ai_primitive, phi_by_asymptotic, phi_by_integral, phi_of_k, scorer_hi, HI_ASYMPTOTIC_BELOW, PHI_CROSSOVER_K,
};
pub use zeros::{
    airy_zero, airy_zero_asymptotic, shared_asymptotic_table, shared_zero_table, zero_location, zero_seed,
    zero_seed_real, zero_slope_asymptotic, ZeroRecord, ZeroTable, MAX_ZERO_INDEX,
};

/// `Ai(0) = 3^{−2/3}/Γ(2/3)`
pub const AI_ZERO: f64 = AI0;
/// `Ai′(0) = −3^{−1/3}/Γ(1/3)`
pub const AIP_ZERO: f64 = AIP0;
/// `Bi(0) = √3·Ai(0)`
pub const BI_ZERO: f64 = BI0;
/// `Bi′(0) = −√3·Ai′(0)`
pub const BIP_ZERO: f64 = BIP0;
