//! Secrecy analytics: Gamma approximation of the wiretap gain, ergodic and
//! effective secrecy rates, and adaptive coding-rate selection.

mod capacity;
mod coding;
mod gamma_fit;

pub use capacity::{
    ergodic_secrecy_rate, ergodic_wiretap_capacity, ergodic_wiretap_capacity_with,
    instantaneous_secrecy_rate, measure_main_ergodic_capacity, sample_legitimate, GainPool,
};
pub use coding::{
    effective_secrecy_rate, golden_section_max, optimal_coding_rate, outage_probability,
    CodingDecision, CodingPolicy,
};
pub use gamma_fit::{
    cdf_sup_distance, gamma_fit, pdf_divergence, sample_wiretap_gain, wiretap_gain_cdf,
    wiretap_gain_pdf, GammaFit, MIN_DIVERGENCE_SAMPLES,
};
