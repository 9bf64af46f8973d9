//! Toric generalized Kähler structures of symplectic type on Delzant
//! polytopes: frame assembly, connections, scalar curvature, a Clifford
//! bispinor kernel, and a constant-curvature search.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases fix `f64`.

// NaN must fail every positivity guard, and index loops mirror tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod clifford;
pub mod connection;
pub mod csc;
pub mod curvature;
pub mod error;
pub mod frame;
pub mod linalg;
pub mod polytope;
pub mod potential;
pub mod sampling;
pub mod scalar;
pub mod tensor;

pub use connection::{
    bismut_curvature, canonical_scalar_curvature, christoffel, connection_report, covariant_constancy_residuals,
    epsilon_section_residual, integrability_residuals, torsion_h, BismutSign, ChristoffelField, ConnectionFlavor,
    ConnectionReport, CurvatureTensor, TorsionH,
};
pub use csc::{csc_objective, optimize, BasisTerm, OptReport, PerturbationBasis};
pub use curvature::{
    det_identity_residuals, equivalence_scan, kappa_boulanger, kappa_from_ricci, kappa_goto, ricci_form,
    CurvatureSample, EquivalenceScan, RicciFormSample,
};
pub use error::{GkError, Result};
pub use frame::{assemble_frame, validate_params, AdmissibilityReport, FrameTensors, GkParams};
pub use polytope::{interior_grid, Facet, GridSpec, MomentPolytope};
pub use potential::{
    guillemin_potential, perturbed_potential, quadratic_potential, Monomial, PotentialKind, PotentialModel,
};
pub use scalar::{Cplx, Real};
pub use tensor::SymTensor;

pub type Polytope64 = MomentPolytope<f64>;
pub type Potential64 = PotentialModel<f64>;
pub type Params64 = GkParams<f64>;
pub type Frame64 = FrameTensors<f64>;
pub type Christoffel64 = ChristoffelField<f64>;
pub type Curvature64 = CurvatureTensor<f64>;
