//! Scalar curvature of a toric GK structure by two independent routes, the
//! Ricci form, and the determinant identities tying them together.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GkError, Result};
use crate::frame::{admissibility_eigenvalue, frame_derivatives, frame_from_hessian, GkParams};
use crate::linalg::{complexify, guarded_inverse, max_abs_c, point_f64, standard_omega, to_complex, trace_product};
use crate::potential::{PotentialJet, PotentialModel};
use crate::scalar::{lit, Cplx, Real};

/// `Ξ⁻¹` with its first and second μ-derivatives, plus the log-det gradient
/// `v_j = ∂_j ½ log det(φ_s Ξ)` and its Jacobian.
#[derive(Debug, Clone)]
pub struct XiJet<T: Real> {
    pub xi_inv: DMatrix<T>,
    pub d_xi_inv: Vec<DMatrix<T>>,
    pub dd_xi_inv: Vec<Vec<DMatrix<T>>>,
    pub log_det_grad: DVector<T>,
    pub log_det_hess: DMatrix<T>,
}

impl<T: Real> XiJet<T> {
    pub fn new(jet: &PotentialJet<T>, f: &DMatrix<T>) -> Result<Self> {
        let n = jet.hessian.nrows();
        let quarter: T = lit(0.25);
        let half: T = lit(0.5);
        let s = &jet.hessian;
        let s_inv = guarded_inverse(s, "phi_s")?;
        let sandwich = |m: &DMatrix<T>| f * m * f * quarter;

        let ds_inv: Vec<DMatrix<T>> = jet.third.iter().map(|sk| -(&s_inv * sk * &s_inv)).collect();
        let xi = s + sandwich(&s_inv);
        let xi_inv = guarded_inverse(&xi, "xi")?;
        let d_xi: Vec<DMatrix<T>> = (0..n).map(|k| &jet.third[k] + sandwich(&ds_inv[k])).collect();
        let d_xi_inv: Vec<DMatrix<T>> = d_xi.iter().map(|xk| -(&xi_inv * xk * &xi_inv)).collect();

        let mut dd_xi_inv = vec![Vec::with_capacity(n); n];
        let mut dd_xi = vec![Vec::with_capacity(n); n];
        for k in 0..n {
            for l in 0..n {
                let sk = &jet.third[k];
                let sl = &jet.third[l];
                let dd_s_inv = &s_inv * sl * &s_inv * sk * &s_inv + &s_inv * sk * &s_inv * sl * &s_inv
                    - &s_inv * &jet.fourth[k][l] * &s_inv;
                let xkl = &jet.fourth[k][l] + sandwich(&dd_s_inv);
                let xk = &d_xi[k];
                let xl = &d_xi[l];
                dd_xi_inv[k].push(
                    &xi_inv * xl * &xi_inv * xk * &xi_inv + &xi_inv * xk * &xi_inv * xl * &xi_inv
                        - &xi_inv * &xkl * &xi_inv,
                );
                dd_xi[k].push(xkl);
            }
        }

        let log_det_grad = DVector::from_fn(n, |j, _| {
            (trace_product(&s_inv, &jet.third[j]) + trace_product(&xi_inv, &d_xi[j])) * half
        });
        let log_det_hess = DMatrix::from_fn(n, n, |i, j| {
            let si = &s_inv * &jet.third[i];
            let sj = &s_inv * &jet.third[j];
            let xi_i = &xi_inv * &d_xi[i];
            let xi_j = &xi_inv * &d_xi[j];
            (-trace_product(&si, &sj) + trace_product(&s_inv, &jet.fourth[i][j]) - trace_product(&xi_i, &xi_j)
                + trace_product(&xi_inv, &dd_xi[i][j]))
                * half
        });
        Ok(Self {
            xi_inv,
            d_xi_inv,
            dd_xi_inv,
            log_det_grad,
            log_det_hess,
        })
    }
}

fn checked_jet<T: Real>(model: &PotentialModel<T>, params: &GkParams<T>, mu: &DVector<T>) -> Result<PotentialJet<T>> {
    let jet = model.jet(mu)?;
    if params.dim() != jet.hessian.nrows() {
        return Err(GkError::DimensionMismatch(format!(
            "parameters are {0}x{0} but the polytope has dimension {1}",
            params.dim(),
            jet.hessian.nrows()
        )));
    }
    let eig = admissibility_eigenvalue(&jet.hessian, params.f());
    if !(eig > T::zero()) {
        return Err(GkError::InadmissibleParams {
            point: point_f64(mu),
            eigenvalue: eig.to_f64_lossy(),
        });
    }
    Ok(jet)
}

fn boulanger_from<T: Real>(x: &XiJet<T>) -> T {
    let n = x.xi_inv.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc -= x.dd_xi_inv[i][j][(i, j)];
        }
    }
    acc
}

fn goto_from<T: Real>(x: &XiJet<T>) -> T {
    let n = x.xi_inv.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc += x.log_det_hess[(i, j)] * x.xi_inv[(i, j)] + x.log_det_grad[j] * x.d_xi_inv[i][(i, j)];
        }
    }
    acc
}

/// `κ = −Σ_ij ∂_i ∂_j (Ξ⁻¹)_ij`.
pub fn kappa_boulanger<T: Real>(model: &PotentialModel<T>, params: &GkParams<T>, mu: &DVector<T>) -> Result<T> {
    let jet = checked_jet(model, params, mu)?;
    Ok(boulanger_from(&XiJet::new(&jet, params.f())?))
}

/// `κ = Σ_ij ∂_i [ ∂_j log det(φ_s Ξ)^{1/2} (Ξ⁻¹)_ij ]`.
pub fn kappa_goto<T: Real>(model: &PotentialModel<T>, params: &GkParams<T>, mu: &DVector<T>) -> Result<T> {
    let jet = checked_jet(model, params, mu)?;
    Ok(goto_from(&XiJet::new(&jet, params.f())?))
}

/// Components `P1(e_a, e_b)` of the Ricci-type 2-form in the chart basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciFormSample<T: Real> {
    pub p1: DMatrix<T>,
}

impl<T: Real> RicciFormSample<T> {
    pub fn new(p1: DMatrix<T>) -> Result<Self> {
        if !p1.is_square() || !p1.nrows().is_multiple_of(2) {
            return Err(GkError::DimensionMismatch(format!("2-form of shape {:?}", p1.shape())));
        }
        if !crate::linalg::is_antisymmetric(&p1) {
            return Err(GkError::NotAntisymmetric("P1"));
        }
        Ok(Self { p1 })
    }

    pub fn dim(&self) -> usize {
        self.p1.nrows() / 2
    }
}

/// `P1 = dα` with `α = (J₊* + J₋*)⁻¹ d log det(φ_s Ξ)^{1/2}`.
pub fn ricci_form<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<RicciFormSample<T>> {
    let jet = checked_jet(model, params, mu)?;
    let x = XiJet::new(&jet, params.f())?;
    let frame = frame_from_hessian(&jet.hessian, params, mu)?;
    let derivs = frame_derivatives(&frame, &jet, params);
    let n = frame.dim();
    let half: T = lit(0.5);
    let a = &frame.a_half_inv;
    let w = standard_omega::<T>(n);

    // α_a = ½ Σ_j A[a][μ_j] v_j; ∂_k A = −A (∂_k g · ω) A.
    let mut d_alpha = DMatrix::<T>::zeros(n, 2 * n);
    for k in 0..n {
        let da = -(a * &derivs.d_metric[k] * &w * a);
        for r in 0..2 * n {
            let mut acc = T::zero();
            for j in 0..n {
                acc += da[(r, n + j)] * x.log_det_grad[j] + a[(r, n + j)] * x.log_det_hess[(k, j)];
            }
            d_alpha[(k, r)] = acc * half;
        }
    }
    let mut p1 = DMatrix::<T>::zeros(2 * n, 2 * n);
    for k in 0..n {
        for r in 0..2 * n {
            let v = d_alpha[(k, r)];
            p1[(n + k, r)] += v;
            p1[(r, n + k)] -= v;
        }
    }
    Ok(RicciFormSample { p1 })
}

/// Symplectic trace `Σ_i 2 P1(∂μ_i, ∂θ_i)`, normalized so that `ω` gives `2n`.
pub fn kappa_from_ricci<T: Real>(sample: &RicciFormSample<T>) -> T {
    let n = sample.dim();
    (0..n).fold(T::zero(), |acc, i| acc + sample.p1[(n + i, i)] * lit(2.0))
}

/// Residuals of `det(φ_s ± (i/2)F) = (det φ_s det Ξ)^{1/2}` (relative, worse
/// sign) and of `Ξ⁻¹ = (φ_s − (i/2)F)⁻¹ φ_s (φ_s + (i/2)F)⁻¹` (max-abs).
pub fn det_identity_residuals<T: Real>(phi_s: &DMatrix<T>, f: &DMatrix<T>) -> Result<(T, T)> {
    if phi_s.shape() != f.shape() || !phi_s.is_square() {
        return Err(GkError::DimensionMismatch(format!(
            "phi_s is {:?} and F is {:?}",
            phi_s.shape(),
            f.shape()
        )));
    }
    if !crate::linalg::is_positive_definite(phi_s) {
        return Err(GkError::ConvexityViolation { point: Vec::new() });
    }
    let eig = admissibility_eigenvalue(phi_s, f);
    if !(eig > T::zero()) {
        return Err(GkError::InadmissibleParams {
            point: Vec::new(),
            eigenvalue: eig.to_f64_lossy(),
        });
    }
    let half: T = lit(0.5);
    let s_inv = guarded_inverse(phi_s, "phi_s")?;
    let xi = phi_s + f * &s_inv * f * lit::<T>(0.25);
    let xi_inv = guarded_inverse(&xi, "xi")?;
    let rhs = (phi_s.determinant() * xi.determinant()).sqrt();
    let plus = complexify(phi_s, &(f * half));
    let minus = complexify(phi_s, &(f * -half));
    let rhs_c = Cplx::new(rhs, T::zero());
    let rel = |d: Cplx<T>| {
        let e = d - rhs_c;
        (e.re * e.re + e.im * e.im).sqrt() / rhs
    };
    let r1 = rel(plus.determinant()).max(rel(minus.determinant()));
    let singular = || GkError::IllConditioned {
        what: "phi_s +- i F/2",
        condition: f64::INFINITY,
    };
    let plus_inv = plus.lu().try_inverse().ok_or_else(singular)?;
    let minus_inv = minus.lu().try_inverse().ok_or_else(singular)?;
    let r2 = max_abs_c(&(minus_inv * to_complex(phi_s) * plus_inv - to_complex(&xi_inv)));
    Ok((r1, r2))
}

/// Both curvature formulas and the Ricci-form contraction at one point.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureSample {
    pub mu: Vec<f64>,
    pub kappa_boulanger: f64,
    pub kappa_goto: f64,
    pub kappa_from_ricci: f64,
    pub abs_diff: f64,
}

/// Evaluates all three curvature routes at `mu`.
pub fn curvature_sample<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<CurvatureSample> {
    let jet = checked_jet(model, params, mu)?;
    let x = XiJet::new(&jet, params.f())?;
    let kb = boulanger_from(&x).to_f64_lossy();
    let kg = goto_from(&x).to_f64_lossy();
    let kr = kappa_from_ricci(&ricci_form(model, params, mu)?).to_f64_lossy();
    Ok(CurvatureSample {
        mu: point_f64(mu),
        kappa_boulanger: kb,
        kappa_goto: kg,
        kappa_from_ricci: kr,
        abs_diff: (kb - kg).abs(),
    })
}

/// A point where evaluation failed.
#[derive(Debug, Clone, Serialize)]
pub struct ScanFailure {
    pub mu: Vec<f64>,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub points: usize,
    pub failures: usize,
    /// `max |κ_B − κ_G| / (1 + |κ_B|)`.
    pub max_relative_discrepancy: f64,
    pub max_abs_discrepancy: f64,
    /// `max |κ_from_ricci − κ_G| / (1 + |κ_G|)`.
    pub max_ricci_discrepancy: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceScan {
    pub samples: Vec<CurvatureSample>,
    pub failed_points: Vec<ScanFailure>,
    pub summary: ScanSummary,
}

/// Evaluates every grid point in parallel; output order follows `grid`.
pub fn equivalence_scan<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    grid: &[DVector<T>],
    tolerance: f64,
) -> EquivalenceScan {
    let results: Vec<Result<CurvatureSample>> = grid.par_iter().map(|mu| curvature_sample(model, params, mu)).collect();
    let mut samples = Vec::with_capacity(grid.len());
    let mut failed_points = Vec::new();
    for (mu, r) in grid.iter().zip(results) {
        match r {
            Ok(s) => samples.push(s),
            Err(e) => failed_points.push(ScanFailure {
                mu: point_f64(mu),
                error: e.to_string(),
            }),
        }
    }
    let mut rel = 0.0f64;
    let mut abs = 0.0f64;
    let mut ric = 0.0f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in &samples {
        rel = rel.max(s.abs_diff / (1.0 + s.kappa_boulanger.abs()));
        abs = abs.max(s.abs_diff);
        ric = ric.max((s.kappa_from_ricci - s.kappa_goto).abs() / (1.0 + s.kappa_goto.abs()));
        lo = lo.min(s.kappa_boulanger);
        hi = hi.max(s.kappa_boulanger);
    }
    let all_finite = samples
        .iter()
        .all(|s| s.kappa_boulanger.is_finite() && s.kappa_goto.is_finite());
    let summary = ScanSummary {
        points: grid.len(),
        failures: failed_points.len(),
        max_relative_discrepancy: rel,
        max_abs_discrepancy: abs,
        max_ricci_discrepancy: ric,
        kappa_min: lo,
        kappa_max: hi,
        tolerance,
        passed: failed_points.is_empty() && !samples.is_empty() && all_finite && rel <= tolerance,
    };
    EquivalenceScan {
        samples,
        failed_points,
        summary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::MomentPolytope;
    use crate::potential::{guillemin_potential, quadratic_potential};

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_vec(x.to_vec())
    }

    fn f2(a: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, a, -a, 0.0])
    }

    #[test]
    fn cp1_is_four() {
        let m = guillemin_potential(&MomentPolytope::interval(0.0, 1.0).unwrap());
        let p = GkParams::kahler(1);
        for mu in [0.1, 0.37, 0.5, 0.9] {
            let mu = v(&[mu]);
            assert!((kappa_boulanger(&m, &p, &mu).unwrap() - 4.0).abs() < 1e-8);
            assert!((kappa_goto(&m, &p, &mu).unwrap() - 4.0).abs() < 1e-8);
        }
    }

    #[test]
    fn square_is_eight() {
        let m = guillemin_potential(&MomentPolytope::unit_cube(2).unwrap());
        let p = GkParams::kahler(2);
        let mu = v(&[0.3, 0.8]);
        assert!((kappa_boulanger(&m, &p, &mu).unwrap() - 8.0).abs() < 1e-8);
        assert!((kappa_goto(&m, &p, &mu).unwrap() - 8.0).abs() < 1e-8);
    }

    #[test]
    fn flat_potential_has_zero_curvature() {
        let m = quadratic_potential(&MomentPolytope::unit_cube(2).unwrap());
        let p = GkParams::new(f2(0.4), f2(0.9)).unwrap();
        let mu = v(&[0.5, 0.5]);
        assert_eq!(kappa_boulanger(&m, &p, &mu).unwrap(), 0.0);
        assert_eq!(kappa_goto(&m, &p, &mu).unwrap(), 0.0);
        assert_eq!(ricci_form(&m, &p, &mu).unwrap().p1, DMatrix::zeros(4, 4));
    }

    #[test]
    fn ricci_anchors() {
        let w = standard_omega::<f64>(3);
        let s = RicciFormSample::new(w).unwrap();
        assert_eq!(kappa_from_ricci(&s), 6.0);

        let m = guillemin_potential(&MomentPolytope::interval(0.0, 1.0).unwrap());
        let r = ricci_form(&m, &GkParams::kahler(1), &v(&[0.3])).unwrap();
        assert!((r.p1[(1, 0)] - 2.0).abs() < 1e-10);
        assert!((r.p1[(0, 1)] + 2.0).abs() < 1e-10);
        assert!((kappa_from_ricci(&r) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn three_routes_agree_off_kahler() {
        let m = guillemin_potential(&MomentPolytope::unit_cube(2).unwrap());
        let p = GkParams::new(f2(0.6), f2(0.8)).unwrap();
        let s = curvature_sample(&m, &p, &v(&[0.35, 0.6])).unwrap();
        assert!(s.abs_diff < 1e-9, "{s:?}");
        assert!((s.kappa_from_ricci - s.kappa_goto).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn det_identity_examples() {
        let (r1, r2) = det_identity_residuals(&DMatrix::identity(2, 2), &f2(1.0)).unwrap();
        assert!(r1 <= 1e-15 && r2 <= 1e-15);
        let s = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        assert_eq!(det_identity_residuals(&s, &DMatrix::zeros(2, 2)).unwrap().0, 0.0);
        assert!(matches!(
            det_identity_residuals(&DMatrix::identity(2, 2), &f2(3.0)),
            Err(GkError::InadmissibleParams { .. })
        ));
    }

    #[test]
    fn scan_records_failures() {
        let m = guillemin_potential(&MomentPolytope::interval(0.0, 1.0).unwrap());
        let grid = vec![v(&[0.5]), v(&[1.5])];
        let scan = equivalence_scan(&m, &GkParams::kahler(1), &grid, 1e-9);
        assert_eq!(scan.samples.len(), 1);
        assert_eq!(scan.failed_points.len(), 1);
        assert!(!scan.summary.passed);
    }
}
