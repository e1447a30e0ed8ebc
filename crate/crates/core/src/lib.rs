//! Time evolution of truncated moment sequences.
//!
//! A truncated multisequence `s = (s_α)_{|α| ≤ d}` is evolved under the heat
//! equation `∂_t u = νΔu`, the transport equation `∂_t u = a x·∇u`, or their
//! sum. Every evolved moment is an exponential polynomial in `t` whose
//! coefficients depend only on the initial moments, so the flows are computed
//! exactly in time (see [`exppoly`]) and then evaluated.
//!
//! On top of the flows the crate locates the heat distance of an interior
//! one-dimensional sequence to the boundary of the moment cone
//! ([`boundary`]) and recovers a Gaussian-mixture representing measure from
//! the boundary point it reaches ([`recovery`]).
//!
//! Independent moment oracles (closed-form Gaussian moments, point masses,
//! adaptive quadrature, a Runge–Kutta reference integrator) live in
//! [`oracle`] so that each result can be cross-checked by a route that does
//! not share code with the implementation.

pub mod boundary;
pub mod error;
pub mod exppoly;
pub mod flows;
pub mod hankel;
pub mod json;
pub mod measure;
pub mod multi_index;
pub mod oracle;
pub mod recovery;
pub mod sequence;

pub use boundary::{
    boundary_project, distance_upper_bound, heat_distance_1d, BoundaryOptions, BoundaryReport,
    UpperBound,
};
pub use error::{Error, Result};
pub use exppoly::{ExpPoly, Term};
pub use flows::{
    combined_flow, evaluate_flow, evolve_gaussian_mixture, heat_dual_poly, heat_flow,
    heat_flow_1d_closed, resonance_gap, transport_atomic, transport_dual_poly, transport_flow,
    FlowKind, FlowParams, MomentFlow,
};
pub use hankel::{
    build_hankel, classify_psd, kernel_polynomial, HankelMatrix, PsdReport, PsdStatus,
};
pub use measure::{Atom, AtomicMeasure, GaussianComponent, GaussianMixture};
pub use multi_index::{enumerate_multiindices, MultiIndex};
pub use recovery::{
    atoms_from_kernel, augment_odd, recover_gaussian_mixture, weights_from_atoms, RecoveryOptions,
    RecoveryResult,
};
pub use sequence::{riesz_apply, MomentSequence, Polynomial};
