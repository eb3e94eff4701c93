//! Index bookkeeping, the handle's linearized flow and its asymptotic
//! operator.

pub mod flow;
pub mod formulas;
pub mod spectrum;

pub use flow::{flow_report, weinstein_flow, FlowReport, FlowSample};
pub use formulas::{
    check_adjunction, check_index_inequality, cz_elliptic, cz_hyperbolic, cz_iterate, cz_total, ech_index,
    ech_index_of, fredholm_index, linking_bound_check, presets, reclass_q, retrivialize_c, retrivialize_q,
    self_pairing, CurveData, End, IndexInequality, LinkingViolation, Trivialization,
};
pub use spectrum::{asymptotic_spectrum, check_spectrum, spectrum_csv, Eigenpair, SpectrumChecks};
