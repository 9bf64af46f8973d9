//! Bi-spinors as forms, trace metrics, and the intertwiner between the
//! spinor models of two complex structures.

use nalgebra::{DMatrix, DVector};

use super::algebra::CliffordElement;
use super::forms::{j_iso, FormElement, GenVector};
use super::spinor::{Spinor, SpinorModel};
use crate::error::{GkError, Result};
use crate::scalar::{lit, Cplx, Real};

fn czero<T: Real>() -> Cplx<T> {
    Cplx::new(T::zero(), T::zero())
}

/// `ρ⁻¹(E)` by solving the linear system over the monomial basis.
pub fn representation_inverse<T: Real>(model: &SpinorModel<T>, endo: &DMatrix<Cplx<T>>) -> Result<CliffordElement<T>> {
    let d = model.dim();
    if endo.shape() != (d, d) {
        return Err(GkError::DimensionMismatch(format!(
            "endomorphism is {:?}",
            endo.shape()
        )));
    }
    let size = model.ambient().size();
    let mut sys = DMatrix::from_element(d * d, size, czero::<T>());
    for mask in 0..size {
        let r = model.monomial_matrix(mask);
        for (k, c) in r.iter().enumerate() {
            sys[(k, mask)] = *c;
        }
    }
    let rhs = DVector::from_iterator(d * d, endo.iter().copied());
    let sol = sys.lu().solve(&rhs).ok_or(GkError::SingularRepresentation)?;
    CliffordElement::from_coeffs(model.ambient(), sol.iter().copied().collect())
}

/// `[φ ⊗ ψ] = 𝔍(ρ⁻¹(χ ↦ q(ψ, χ) φ))`.
pub fn bispinor_to_form<T: Real>(model: &SpinorModel<T>, phi: &Spinor<T>, psi: &Spinor<T>) -> Result<FormElement<T>> {
    model.check(phi)?;
    model.check(psi)?;
    let col = DMatrix::from_column_slice(model.dim(), 1, phi.coeffs().as_slice());
    let endo = col * model.pairing_functional(psi);
    Ok(j_iso(&representation_inverse(model, &endo)?))
}

/// `(h_R(a, b), h_R'(a, b))`: the degree-0 part of `𝔍(a†b)` and the trace of
/// `ρ(a†b)`. They differ by the factor `2ⁿ`.
pub fn trace_metrics<T: Real>(
    model: &SpinorModel<T>,
    a: &CliffordElement<T>,
    b: &CliffordElement<T>,
) -> Result<(Cplx<T>, Cplx<T>)> {
    let prod = a.dagger().multiply(b)?;
    let hr = j_iso(&prod).coeff(0);
    let hr_prime = model.representation(&prod)?.trace();
    Ok((hr, hr_prime))
}

/// Clifford-equivariant unitary map from the spinor model of `source` to
/// that of `target`.
#[derive(Debug, Clone)]
pub struct Intertwiner<T: Real> {
    pub matrix: DMatrix<Cplx<T>>,
    /// `max |p†p − I|`.
    pub unitarity_defect: T,
    /// `max_a |ρ_t(e_a) p − p ρ_s(e_a)|`.
    pub equivariance_defect: T,
}

impl<T: Real> Intertwiner<T> {
    pub fn apply(&self, target: &SpinorModel<T>, psi: &Spinor<T>) -> Result<Spinor<T>> {
        target.spinor(&self.matrix * psi.coeffs())
    }
}

/// Solves `ρ_target(v) ∘ p = p ∘ ρ_source(v)` for all generators `v`.
///
/// Phase convention: the first component of `p(1)` with modulus above `1e-8`
/// is made real and positive.
pub fn intertwiner_p<T: Real>(target: &SpinorModel<T>, source: &SpinorModel<T>) -> Result<Intertwiner<T>> {
    target.ambient().check(source.ambient())?;
    let d = target.dim();
    let m = target.ambient().dim();
    let id = DMatrix::<Cplx<T>>::identity(d, d);
    let mut sys = DMatrix::from_element(m * d * d, d * d, czero::<T>());
    for a in 0..m {
        let rt = target.monomial_matrix(1 << a);
        let rs = source.monomial_matrix(1 << a);
        let block = id.kronecker(rt) - rs.transpose().kronecker(&id);
        sys.view_mut((a * d * d, 0), (d * d, d * d)).copy_from(&block);
    }
    let svd = sys.svd(false, true);
    let v_t = svd.v_t.ok_or(GkError::Equivariance(f64::NAN))?;
    let sv = &svd.singular_values;
    let (imin, smin) =
        sv.iter().enumerate().fold(
            (0, T::max_value().unwrap()),
            |(bi, bv), (i, v)| if *v < bv { (i, *v) } else { (bi, bv) },
        );
    let smax = sv.iter().fold(T::zero(), |a, v| a.max(*v));
    let second = sv
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != imin)
        .fold(T::max_value().unwrap(), |a, (_, v)| a.min(*v));
    let scale = T::one().max(smax);
    if smin > lit::<T>(1e-8) * scale || (sv.len() > 1 && second < lit::<T>(1e-6) * scale) {
        return Err(GkError::Equivariance(smin.to_f64_lossy()));
    }
    let null = v_t.row(imin).map(|c| c.conj());
    let mut p = DMatrix::from_iterator(d, d, null.iter().copied());
    let gram = p.adjoint() * &p;
    let lambda = gram.trace().re / T::from_usize(d).unwrap();
    p /= Cplx::new(lambda.sqrt(), T::zero());

    let image = p.column(0).into_owned();
    if let Some(c) = image.iter().find(|c| c.norm_sqr().sqrt() > lit(1e-8)) {
        let phase = c / Cplx::new(c.norm_sqr().sqrt(), T::zero());
        p /= phase;
    }

    let unitarity_defect = (p.adjoint() * &p - &id)
        .iter()
        .fold(T::zero(), |acc, c| acc.max(c.norm_sqr().sqrt()));
    let equivariance_defect = (0..m).fold(T::zero(), |acc, a| {
        let r = target.monomial_matrix(1 << a) * &p - &p * source.monomial_matrix(1 << a);
        r.iter().fold(acc, |x, c| x.max(c.norm_sqr().sqrt()))
    });
    Ok(Intertwiner {
        matrix: p,
        unitarity_defect,
        equivariance_defect,
    })
}

/// Largest `|w·[φ ⊗ p(ψ)]|` over a basis of
/// `(Id + g) T₊^{0,1} ⊕ (Id − g) T₋^{0,1}`, with `φ`, `ψ` the degree-0
/// generators of the `J₊` and `J₋` models.
pub fn annihilator_residual<T: Real>(plus: &SpinorModel<T>, minus: &SpinorModel<T>) -> Result<T> {
    let p = intertwiner_p(plus, minus)?;
    let phi = plus.vacuum();
    let psi = p.apply(plus, &minus.vacuum())?;
    let form = bispinor_to_form(plus, &phi, &psi)?;
    let amb = plus.ambient();
    let mut worst = T::zero();
    for (model, sign) in [(plus, true), (minus, false)] {
        for f in model.frame() {
            let w: Vec<Cplx<T>> = f.iter().map(|c| c.conj()).collect();
            let v = GenVector::lift(amb, &w, sign);
            worst = worst.max(form.act(&v).max_abs());
        }
    }
    Ok(worst)
}
