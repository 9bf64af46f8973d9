//! Symplectic potentials on the interior of a moment polytope, with closed-form
//! derivatives up to fourth order.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GkError, Result};
use crate::linalg::{is_positive_definite, point_f64};
use crate::polytope::MomentPolytope;
use crate::scalar::{lit, Real};
use crate::tensor::SymTensor;

/// Highest derivative order the models provide.
pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Guillemin,
    GuilleminPlusPolynomial,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Base {
    /// `½ Σ_k ℓ_k log ℓ_k`
    Guillemin,
    /// `½ |μ|²`
    Quadratic,
}

/// A single term `coeff · Π μ_i^{powers_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial<T: Real> {
    pub powers: Vec<u32>,
    pub coeff: T,
}

impl<T: Real> Monomial<T> {
    pub fn new(powers: Vec<u32>, coeff: T) -> Self {
        Self { powers, coeff }
    }

    /// Mixed partial derivative along the listed coordinate indices.
    fn derivative(&self, mu: &DVector<T>, along: &[usize]) -> T {
        let mut counts = vec![0u32; self.powers.len()];
        for &i in along {
            counts[i] += 1;
        }
        let mut acc = self.coeff;
        for (i, (&p, &a)) in self.powers.iter().zip(&counts).enumerate() {
            if a > p {
                return T::zero();
            }
            let falling: u64 = ((p - a + 1)..=p).map(u64::from).product();
            acc *= lit::<T>(falling as f64);
            acc *= mu[i].powi((p - a) as i32);
        }
        acc
    }
}

/// Evaluator of `τ` and its symmetric derivative tensors.
///
/// Immutable after construction; convexity of the Hessian is re-checked at
/// every evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialModel<T: Real> {
    polytope: MomentPolytope<T>,
    base: Base,
    perturbation: Vec<Monomial<T>>,
}

/// Second through fourth derivatives at one point, arranged as matrices.
#[derive(Debug, Clone)]
pub struct PotentialJet<T: Real> {
    pub mu: DVector<T>,
    /// `φ_s`, the Hessian of `τ`.
    pub hessian: DMatrix<T>,
    /// `third[k] = ∂_k φ_s`.
    pub third: Vec<DMatrix<T>>,
    /// `fourth[k][l] = ∂_k ∂_l φ_s`.
    pub fourth: Vec<Vec<DMatrix<T>>>,
}

/// The canonical potential `τ = ½ Σ_k ℓ_k log ℓ_k` of a polytope.
pub fn guillemin_potential<T: Real>(polytope: &MomentPolytope<T>) -> PotentialModel<T> {
    PotentialModel {
        polytope: polytope.clone(),
        base: Base::Guillemin,
        perturbation: Vec::new(),
    }
}

/// The flat potential `τ = ½ |μ|²` restricted to a polytope.
pub fn quadratic_potential<T: Real>(polytope: &MomentPolytope<T>) -> PotentialModel<T> {
    PotentialModel {
        polytope: polytope.clone(),
        base: Base::Quadratic,
        perturbation: Vec::new(),
    }
}

/// Adds polynomial terms to an existing model.
pub fn perturbed_potential<T: Real>(
    base: &PotentialModel<T>,
    perturbation: &[Monomial<T>],
) -> Result<PotentialModel<T>> {
    let n = base.dim();
    if let Some(m) = perturbation.iter().find(|m| m.powers.len() != n) {
        return Err(GkError::DimensionMismatch(format!(
            "monomial with {} exponents on a {n}-dimensional polytope",
            m.powers.len()
        )));
    }
    let mut out = base.clone();
    out.perturbation.extend(perturbation.iter().cloned());
    Ok(out)
}

impl<T: Real> PotentialModel<T> {
    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn polytope(&self) -> &MomentPolytope<T> {
        &self.polytope
    }

    pub fn perturbation(&self) -> &[Monomial<T>] {
        &self.perturbation
    }

    pub fn kind(&self) -> PotentialKind {
        match (self.base, self.perturbation.is_empty()) {
            (Base::Quadratic, _) => PotentialKind::Quadratic,
            (Base::Guillemin, true) => PotentialKind::Guillemin,
            (Base::Guillemin, false) => PotentialKind::GuilleminPlusPolynomial,
        }
    }

    fn base_derivative(&self, mu: &DVector<T>, along: &[usize]) -> T {
        match self.base {
            Base::Quadratic => match along {
                [] => mu.norm_squared() * lit(0.5),
                [i] => mu[*i],
                [i, j] => {
                    if i == j {
                        T::one()
                    } else {
                        T::zero()
                    }
                }
                _ => T::zero(),
            },
            Base::Guillemin => {
                let mut acc = T::zero();
                for f in self.polytope.facets() {
                    let l = f.eval(mu);
                    let prod = along.iter().fold(T::one(), |p, &i| p * f.normal[i]);
                    // d^m/dl^m of ½ l log l
                    let radial = match along.len() {
                        0 => l * l.ln() * lit(0.5),
                        1 => (l.ln() + T::one()) * lit(0.5),
                        2 => lit::<T>(0.5) / l,
                        3 => -lit::<T>(0.5) / (l * l),
                        _ => T::one() / (l * l * l),
                    };
                    acc += prod * radial;
                }
                acc
            }
        }
    }

    fn derivative_unchecked(&self, mu: &DVector<T>, along: &[usize]) -> T {
        self.perturbation
            .iter()
            .fold(self.base_derivative(mu, along), |acc, m| acc + m.derivative(mu, along))
    }

    fn hessian_unchecked(&self, mu: &DVector<T>) -> DMatrix<T> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.derivative_unchecked(mu, &[i, j]))
    }

    fn check_point(&self, mu: &DVector<T>) -> Result<DMatrix<T>> {
        self.polytope.check_interior(mu)?;
        let h = self.hessian_unchecked(mu);
        if !is_positive_definite(&h) {
            return Err(GkError::ConvexityViolation { point: point_f64(mu) });
        }
        Ok(h)
    }

    /// The order-`order` derivative tensor of `τ` at an interior point.
    pub fn tau_derivatives(&self, mu: &DVector<T>, order: usize) -> Result<SymTensor<T>> {
        if order > MAX_ORDER {
            return Err(GkError::UnsupportedOrder(order));
        }
        self.check_point(mu)?;
        Ok(SymTensor::from_fn(self.dim(), order, |idx| {
            self.derivative_unchecked(mu, idx)
        }))
    }

    /// `φ_s(μ)` after the interior and convexity checks.
    pub fn hessian(&self, mu: &DVector<T>) -> Result<DMatrix<T>> {
        self.check_point(mu)
    }

    /// Hessian together with its first and second μ-derivatives.
    pub fn jet(&self, mu: &DVector<T>) -> Result<PotentialJet<T>> {
        let hessian = self.check_point(mu)?;
        let n = self.dim();
        let third = (0..n)
            .map(|k| DMatrix::from_fn(n, n, |i, j| self.derivative_unchecked(mu, &[i, j, k])))
            .collect();
        let fourth = (0..n)
            .map(|k| {
                (0..n)
                    .map(|l| DMatrix::from_fn(n, n, |i, j| self.derivative_unchecked(mu, &[i, j, k, l])))
                    .collect()
            })
            .collect();
        Ok(PotentialJet {
            mu: mu.clone(),
            hessian,
            third,
            fourth,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment() -> PotentialModel<f64> {
        guillemin_potential(&MomentPolytope::interval(0.0, 1.0).unwrap())
    }

    fn at(x: &[f64]) -> DVector<f64> {
        DVector::from_vec(x.to_vec())
    }

    #[test]
    fn segment_values_at_midpoint() {
        let m = segment();
        let tau = m.tau_derivatives(&at(&[0.5]), 0).unwrap().scalar();
        assert!((tau - 0.5 * 0.5f64.ln()).abs() < 1e-15);
        assert!((tau + 0.34657359027997264).abs() < 1e-14);
        assert!((m.tau_derivatives(&at(&[0.5]), 2).unwrap().scalar() - 2.0).abs() < 1e-15);
        assert_eq!(m.tau_derivatives(&at(&[0.5]), 3).unwrap().scalar(), 0.0);
    }

    #[test]
    fn segment_hessian_closed_form() {
        let m = segment();
        for x in [0.1, 0.25, 0.7] {
            let h = m.hessian(&at(&[x])).unwrap()[(0, 0)];
            assert!((h - 1.0 / (2.0 * x * (1.0 - x))).abs() < 1e-13);
        }
        let h = m.hessian(&at(&[0.25])).unwrap()[(0, 0)];
        assert!((h - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn square_hessian_is_diagonal() {
        let m = guillemin_potential(&MomentPolytope::<f64>::unit_cube(2).unwrap());
        let h = m.hessian(&at(&[0.5, 0.5])).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]));
    }

    #[test]
    fn quadratic_derivatives() {
        let m = quadratic_potential(&MomentPolytope::<f64>::unit_cube(3).unwrap());
        let mu = at(&[0.2, 0.3, 0.4]);
        assert_eq!(m.hessian(&mu).unwrap(), DMatrix::identity(3, 3));
        assert_eq!(m.tau_derivatives(&mu, 3).unwrap().max_abs(), 0.0);
        assert_eq!(m.tau_derivatives(&mu, 4).unwrap().max_abs(), 0.0);
        assert_eq!(m.kind(), PotentialKind::Quadratic);
    }

    #[test]
    fn quartic_perturbation_adds_constant_fourth_derivative() {
        let c = 0.37;
        let base = segment();
        let p = perturbed_potential(&base, &[Monomial::new(vec![4], c)]).unwrap();
        assert_eq!(p.kind(), PotentialKind::GuilleminPlusPolynomial);
        for x in [0.2, 0.5, 0.8] {
            let d4 = p.tau_derivatives(&at(&[x]), 4).unwrap().scalar()
                - base.tau_derivatives(&at(&[x]), 4).unwrap().scalar();
            assert!((d4 - 24.0 * c).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_perturbation_shifts_hessian() {
        let p = perturbed_potential(&segment(), &[Monomial::new(vec![2], 0.1)]).unwrap();
        assert!((p.hessian(&at(&[0.5])).unwrap()[(0, 0)] - 2.2).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        let m = segment();
        assert!(matches!(m.hessian(&at(&[1.0])), Err(GkError::OutsideInterior { .. })));
        assert!(matches!(m.hessian(&at(&[-0.2])), Err(GkError::OutsideInterior { .. })));
        assert_eq!(
            m.tau_derivatives(&at(&[0.5]), 5).unwrap_err(),
            GkError::UnsupportedOrder(5)
        );
        let bad = perturbed_potential(&m, &[Monomial::new(vec![2], -2.0)]).unwrap();
        assert!(matches!(
            bad.hessian(&at(&[0.5])),
            Err(GkError::ConvexityViolation { .. })
        ));
        assert!(perturbed_potential(&m, &[Monomial::new(vec![2, 1], 1.0)]).is_err());
    }
}
