//! Least-squares search for constant scalar curvature within a finite
//! polynomial slice of symplectic potentials.
//!
//! The objective is the grid variance of `κ_B`, a finite-dimensional
//! surrogate for the moment-map picture; nothing here claims existence.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::kappa_boulanger;
use crate::error::{GkError, Result};
use crate::frame::GkParams;
use crate::potential::{perturbed_potential, Monomial, PotentialModel};
use crate::scalar::{lit, Real};

/// Central-difference step on coefficients.
pub const GRADIENT_STEP: f64 = 1e-5;
/// Objective below which the search stops.
pub const OBJECTIVE_TARGET: f64 = 1e-10;
/// Step length below which the search stops.
pub const MIN_STEP: f64 = 1e-12;
const ARMIJO: f64 = 1e-4;

/// One perturbation direction: a monomial `μ^powers` with coefficient bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisTerm {
    pub powers: Vec<u32>,
    #[serde(default = "default_lower")]
    pub lower: f64,
    #[serde(default = "default_upper")]
    pub upper: f64,
}

fn default_lower() -> f64 {
    -1.0
}

fn default_upper() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationBasis {
    pub terms: Vec<BasisTerm>,
}

impl PerturbationBasis {
    pub fn new(terms: Vec<BasisTerm>) -> Result<Self> {
        let b = Self { terms };
        b.validate()?;
        Ok(b)
    }

    /// Single monomial with symmetric bounds.
    pub fn single(powers: Vec<u32>, bound: f64) -> Result<Self> {
        Self::new(vec![BasisTerm {
            powers,
            lower: -bound,
            upper: bound,
        }])
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(GkError::InvalidOptimizer("perturbation basis is empty".into()));
        }
        for (k, t) in self.terms.iter().enumerate() {
            if !(t.lower <= 0.0 && 0.0 <= t.upper) {
                return Err(GkError::InvalidOptimizer(format!(
                    "bounds of term {k} must contain zero, got [{}, {}]",
                    t.lower, t.upper
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn clamp(&self, x: &mut [f64]) {
        for (v, t) in x.iter_mut().zip(&self.terms) {
            *v = v.clamp(t.lower, t.upper);
        }
    }

    fn monomials<T: Real>(&self, coeffs: &[f64]) -> Vec<Monomial<T>> {
        self.terms
            .iter()
            .zip(coeffs)
            .map(|(t, c)| Monomial::new(t.powers.clone(), lit(*c)))
            .collect()
    }
}

fn kappa_values<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    grid: &[DVector<T>],
    basis: &PerturbationBasis,
    coeffs: &[f64],
) -> Option<Vec<f64>> {
    let m = perturbed_potential(model, &basis.monomials(coeffs)).ok()?;
    let vals: Vec<Option<f64>> = grid
        .par_iter()
        .map(|mu| kappa_boulanger(&m, params, mu).ok().map(|k| k.to_f64_lossy()))
        .collect();
    vals.into_iter()
        .collect::<Option<Vec<f64>>>()
        .filter(|v| v.iter().all(|k| k.is_finite()))
}

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|k| (k - mean) * (k - mean)).sum::<f64>() / n
}

/// Grid variance of `κ_B` for the potential perturbed by `Σ coeffs_k μ^{powers_k}`;
/// `+∞` when convexity or admissibility fails anywhere on the grid.
pub fn csc_objective<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    grid: &[DVector<T>],
    basis: &PerturbationBasis,
    coeffs: &[f64],
) -> f64 {
    if grid.is_empty() || coeffs.len() != basis.len() {
        return f64::INFINITY;
    }
    kappa_values(model, params, grid, basis, coeffs).map_or(f64::INFINITY, |v| variance(&v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ObjectiveTarget,
    StepTooSmall,
    Budget,
    /// No finite objective in any probed direction.
    Stalled,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptReport {
    pub coefficients: Vec<f64>,
    /// Objective at the start and after each accepted step.
    pub objective_history: Vec<f64>,
    pub final_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// `max κ_B − min κ_B` over the grid at the final coefficients.
    pub kappa_range: f64,
}

/// Projected gradient descent with central-difference gradients and
/// backtracking (Armijo) line search; the trial step grows after each
/// accepted step. Deterministic for fixed inputs.
pub fn optimize<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    grid: &[DVector<T>],
    basis: &PerturbationBasis,
    budget: usize,
) -> Result<OptReport> {
    basis.validate()?;
    if budget == 0 {
        return Err(GkError::InvalidOptimizer("iteration budget must be at least 1".into()));
    }
    if grid.is_empty() {
        return Err(GkError::InvalidGrid("grid is empty".into()));
    }
    let obj = |x: &[f64]| csc_objective(model, params, grid, basis, x);
    let k = basis.len();
    let mut x = vec![0.0; k];
    let mut f = obj(&x);
    let mut history = vec![f];
    let mut trial = 1.0f64;
    let mut iterations = 0;
    let stop = loop {
        if f < OBJECTIVE_TARGET {
            break StopReason::ObjectiveTarget;
        }
        if !f.is_finite() {
            break StopReason::Stalled;
        }
        if iterations >= budget {
            break StopReason::Budget;
        }
        let mut grad = vec![0.0; k];
        for i in 0..k {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += GRADIENT_STEP;
            xm[i] -= GRADIENT_STEP;
            let (fp, fm) = (obj(&xp), obj(&xm));
            grad[i] = match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * GRADIENT_STEP),
                (true, false) => (fp - f) / GRADIENT_STEP,
                (false, true) => (f - fm) / GRADIENT_STEP,
                (false, false) => 0.0,
            };
        }
        if grad.iter().all(|g| *g == 0.0) {
            break StopReason::Stalled;
        }
        let mut t = trial;
        let accepted = loop {
            let mut cand: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - t * gi).collect();
            basis.clamp(&mut cand);
            let moved: f64 = cand.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if moved < MIN_STEP {
                break None;
            }
            let decrease: f64 = grad
                .iter()
                .zip(cand.iter().zip(&x))
                .map(|(g, (c, xi))| g * (xi - c))
                .sum();
            let fc = obj(&cand);
            if fc.is_finite() && fc <= f - ARMIJO * decrease {
                break Some((cand, fc));
            }
            t *= 0.5;
        };
        match accepted {
            Some((cand, fc)) => {
                x = cand;
                f = fc;
                history.push(f);
                iterations += 1;
                trial = t * 2.0;
            }
            None => break StopReason::StepTooSmall,
        }
    };
    let kappa_range = kappa_values(model, params, grid, basis, &x).map_or(f64::INFINITY, |v| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    });
    Ok(OptReport {
        coefficients: x,
        objective_history: history,
        final_objective: f,
        iterations,
        converged: stop == StopReason::ObjectiveTarget,
        stop_reason: stop,
        kappa_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{interior_grid, GridSpec, MomentPolytope};
    use crate::potential::{guillemin_potential, quadratic_potential};

    fn cp1() -> PotentialModel<f64> {
        guillemin_potential(&MomentPolytope::interval(0.0, 1.0).unwrap())
    }

    fn grid() -> Vec<DVector<f64>> {
        interior_grid(cp1().polytope(), &GridSpec::new(21, 0.05).unwrap()).unwrap()
    }

    #[test]
    fn constant_curvature_has_zero_objective() {
        let b = PerturbationBasis::single(vec![4], 0.1).unwrap();
        let p = GkParams::kahler(1);
        assert!(csc_objective(&cp1(), &p, &grid(), &b, &[0.0]) < 1e-16);
        let flat = quadratic_potential(&MomentPolytope::interval(0.0, 1.0).unwrap());
        assert_eq!(csc_objective(&flat, &p, &grid(), &b, &[0.0]), 0.0);
        assert!(csc_objective(&cp1(), &p, &grid(), &b, &[0.01]) > 0.0);
    }

    #[test]
    fn non_convex_is_barrier() {
        let b = PerturbationBasis::single(vec![2], 10.0).unwrap();
        assert_eq!(
            csc_objective(&cp1(), &GkParams::kahler(1), &grid(), &b, &[-5.0]),
            f64::INFINITY
        );
    }

    #[test]
    fn starts_converged_at_minimum() {
        let b = PerturbationBasis::single(vec![4], 0.1).unwrap();
        let r = optimize(&cp1(), &GkParams::kahler(1), &grid(), &b, 10).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.coefficients, vec![0.0]);
    }

    #[test]
    fn rejects_bad_setup() {
        let b = PerturbationBasis::single(vec![4], 0.1).unwrap();
        assert!(matches!(
            optimize(&cp1(), &GkParams::kahler(1), &grid(), &b, 0),
            Err(GkError::InvalidOptimizer(_))
        ));
        assert!(PerturbationBasis::new(vec![]).is_err());
        assert!(PerturbationBasis::new(vec![BasisTerm {
            powers: vec![4],
            lower: 0.1,
            upper: 1.0
        }])
        .is_err());
    }
}
