//! Oscillating boundary profiles, the maps between perturbed and reference
//! domains, and the spectral-stability criterion.

mod heps;
mod profile;
mod stability;
mod trig;
mod vertical;

pub use heps::HEpsMap;
pub use profile::{atlas_profile_distance, FlatProfile, OscillatingProfile, ProfileDifference, ProfileFunction};
pub use stability::{
    classify_stability, criterion_rates, fit_loglog_slope, predicted_rate, RateRow, RatesReport, Regime,
    StabilityVerdict,
};
pub use trig::{sup_abs_periodic, sup_periodic, TrigPolynomial};
pub use vertical::{pullback_jet, ChainMatrix, VerticalJets, VerticalMap};
