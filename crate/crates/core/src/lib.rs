//! Periodic orbits, Arnol'd tongues and period-doubling cascades of the
//! kicked accelerator map
//!
//! ```text
//! θ' = θ + J,   J' = J + k̃ sin θ' + 2πΩ   (both mod 2π)
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`map`]: the map, its inverse, involutions, tangent and monodromy.
//! * [`number_theory`]: Gauss sums and their closed-form phases.
//! * [`perturbative`]: first-order predictions in k̃.
//! * [`finder`]: involution-method and Newton orbit finders.
//! * [`tracer`]: tongue boundaries, stability borders and orbit census.
//! * [`cascade`]: period-doubling cascades and Feigenbaum estimates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cascade;
pub mod error;
pub mod finder;
pub mod map;
pub mod number_theory;
pub mod perturbative;
pub mod roots;
pub mod tracer;

pub use cascade::{
    follow_cascade, follow_cascade_from, universality_check, CascadeReport, ALPHA_UNIVERSAL,
    DELTA_UNIVERSAL,
};
pub use error::{Error, Result};
pub use finder::{
    construct_zero_kick_orbit, construct_zero_kick_orbit_at, find_case_orbits,
    find_involution_orbits, find_non_involution_orbit, find_orbits_from_line, involution_pairing,
    j0_from_case, line_seeds, residuals, zero_kick_momentum, FinderConfig, ResidualSample,
    ZeroKickOrbit,
};
pub use map::{
    classify_stability, flip_momentum, free_flight, involution_a, involution_b,
    involution_fixed_line, involution_line_distance, iterate_lifted, monodromy, reversor, step,
    step_inverse, tangent, torus_distance, wrap_angle, wrap_signed, InvolutionCase, Jacobian2x2,
    LiftedRun, MapParams, OrbitRecord, Stability, TorusPoint, CLOSURE_TOL, MARGINAL_TOL, TWO_PI,
};
pub use number_theory::{
    gauss_sum, gauss_sum_direct, weighted_gauss_sum_direct, xi_phase, xi_phase_rational,
    GaussSumResult, WindingRatio,
};
pub use perturbative::{
    coalescence_gap, half_width, p1_boundary, p1_stability_border, perturbative_trace,
    predict_orbits, resonance3_eta, solve_vartheta, tongue_edges, winding_s, PerturbativeOrbit,
    Resonance3Params, TongueSpec,
};
pub use roots::{bracketed_root, golden_min};
pub use tracer::{
    census, extremum_of_residual, trace_stability_border, trace_tongue_boundary, BorderCurve,
    BorderSample, BoundaryCurve, CensusCell, CensusEntry, CensusGrid, Side,
};
