//! Finite-dimensional Clifford algebra, spinor and bi-spinor kernel for
//! `ℝ^{2n}`, `n ∈ {1, 2, 3}`.

pub mod algebra;
pub mod bispinor;
mod blade;
pub mod forms;
pub mod selftest;
pub mod spinor;

pub use algebra::{clifford_multiply, Ambient, CliffordElement};
pub use bispinor::{
    annihilator_residual, bispinor_to_form, intertwiner_p, representation_inverse, trace_metrics, Intertwiner,
};
pub use forms::{chevalley_pairing, j_iso, j_iso_inverse, FormElement, GenVector};
pub use selftest::{clifford_selftest, clifford_selftest_for, SelfTestCheck, SelfTestReport};
pub use spinor::{ComplexStructure, Spinor, SpinorModel};
