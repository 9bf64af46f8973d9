//! Pointwise matrices of a toric GK structure of symplectic type in the
//! admissible frame `(∂θ_1..∂θ_n, ∂μ_1..∂μ_n)`.
//!
//! Endomorphisms (`J±`, `((J₊+J₋)/2)⁻¹`) are stored row-wise: row `a` holds
//! the components of `J e_a`, i.e. `J e_a = Σ_b J[a][b] e_b`. In this layout
//! composition `ω ∘ J` is the product `J · ω` and the Gualtieri identities read
//! `g = −½ (J₊ + J₋) ω`, `b = −½ (J₊ − J₋) ω`. Bilinear forms are stored as
//! `g[a][b] = g(e_a, e_b)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GkError, Result};
use crate::linalg::{
    anti, block2, complexify, guarded_inverse, is_antisymmetric, max_abs, min_sym_eigenvalue, point_f64, spd_inv_sqrt,
    standard_omega, sym,
};
use crate::potential::{PotentialJet, PotentialModel};
use crate::scalar::{lit, Cplx, Real};

/// The constant antisymmetric matrices `C = φ_a` and `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct GkParams<T: Real> {
    c: DMatrix<T>,
    f: DMatrix<T>,
}

impl<T: Real> GkParams<T> {
    pub fn new(c: DMatrix<T>, f: DMatrix<T>) -> Result<Self> {
        if c.shape() != f.shape() || !c.is_square() {
            return Err(GkError::DimensionMismatch(format!(
                "C is {:?} and F is {:?}",
                c.shape(),
                f.shape()
            )));
        }
        if !is_antisymmetric(&c) {
            return Err(GkError::NotAntisymmetric("C"));
        }
        if !is_antisymmetric(&f) {
            return Err(GkError::NotAntisymmetric("F"));
        }
        Ok(Self { c, f })
    }

    /// `C = F = 0`: the toric Kähler case.
    pub fn kahler(n: usize) -> Self {
        Self {
            c: DMatrix::zeros(n, n),
            f: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn c(&self) -> &DMatrix<T> {
        &self.c
    }

    pub fn f(&self) -> &DMatrix<T> {
        &self.f
    }

    pub fn with_c(&self, c: DMatrix<T>) -> Result<Self> {
        Self::new(c, self.f.clone())
    }
}

/// Smallest eigenvalue of `I + ¼ [φ_s^{-1/2} F φ_s^{-1/2}]²`.
pub fn admissibility_eigenvalue<T: Real>(phi_s: &DMatrix<T>, f: &DMatrix<T>) -> T {
    let n = phi_s.nrows();
    let r = spd_inv_sqrt(phi_s);
    let m = &r * f * &r;
    let a = DMatrix::identity(n, n) + &m * &m * lit::<T>(0.25);
    min_sym_eigenvalue(&a)
}

/// `Ξ = φ_s + ¼ F φ_s⁻¹ F`.
pub fn xi_matrix<T: Real>(phi_s: &DMatrix<T>, phi_s_inv: &DMatrix<T>, f: &DMatrix<T>) -> DMatrix<T> {
    phi_s + f * phi_s_inv * f * lit::<T>(0.25)
}

/// Every matrix of the structure at one interior point.
#[derive(Debug, Clone)]
pub struct FrameTensors<T: Real> {
    pub mu: DVector<T>,
    pub phi_s: DMatrix<T>,
    pub phi: DMatrix<T>,
    pub phi_inv: DMatrix<T>,
    pub xi: DMatrix<T>,
    /// `Q = 2 φᵀ (φ_s − (i/2) F)⁻¹ φ`.
    pub q: DMatrix<Cplx<T>>,
    pub j_plus: DMatrix<T>,
    pub j_minus: DMatrix<T>,
    pub g: DMatrix<T>,
    pub b: DMatrix<T>,
    pub omega: DMatrix<T>,
    /// `((J₊ + J₋)/2)⁻¹` from its closed form.
    pub a_half_inv: DMatrix<T>,
}

/// Builds all frame matrices at `mu`.
pub fn assemble_frame<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<FrameTensors<T>> {
    let phi_s = model.hessian(mu)?;
    frame_from_hessian(&phi_s, params, mu)
}

pub(crate) fn frame_from_hessian<T: Real>(
    phi_s: &DMatrix<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<FrameTensors<T>> {
    let n = phi_s.nrows();
    if params.dim() != n {
        return Err(GkError::DimensionMismatch(format!(
            "parameters are {}x{} but the polytope has dimension {n}",
            params.dim(),
            params.dim()
        )));
    }
    let f = params.f();
    let c = params.c();
    let eig = admissibility_eigenvalue(phi_s, f);
    if !(eig > T::zero()) {
        return Err(GkError::InadmissibleParams {
            point: point_f64(mu),
            eigenvalue: eig.to_f64_lossy(),
        });
    }
    let half: T = lit(0.5);
    let quarter: T = lit(0.25);
    let phi = phi_s + c;
    let phi_t = phi.transpose();
    let phi_inv = guarded_inverse(&phi, "phi")?;
    let phi_t_inv = phi_inv.transpose();
    let phi_s_inv = guarded_inverse(phi_s, "phi_s")?;
    let xi = xi_matrix(phi_s, &phi_s_inv, f);
    let xi_inv = guarded_inverse(&xi, "xi")?;

    let j_plus = block2(
        &(&phi_inv * f * half),
        &(-&phi_inv),
        &(&phi + f * &phi_inv * f * quarter),
        &(-(f * &phi_inv) * half),
    );
    let j_minus = block2(
        &(-(&phi_t_inv * f) * half),
        &(-&phi_t_inv),
        &(&phi_t + f * &phi_t_inv * f * quarter),
        &(f * &phi_t_inv * half),
    );
    let pi_s = sym(&phi_inv);
    let pi_a = anti(&phi_inv);
    let g = block2(
        &pi_s,
        &(&pi_a * f * half),
        &(f * &pi_a * half),
        &(phi_s + f * &pi_s * f * quarter),
    );
    let b = block2(
        &pi_a,
        &(&pi_s * f * half),
        &(f * &pi_s * half),
        &(c + f * &pi_a * f * quarter),
    );
    let phi0 = &phi_s_inv * c;
    let phi0_t = phi0.transpose();
    let a_half_inv = block2(
        &(&xi_inv * f * &phi0 * half),
        &xi_inv,
        &(-(&phi_t * &phi_s_inv * &phi) + &phi0_t * f * &xi_inv * f * &phi0 * quarter),
        &(&phi0_t * f * &xi_inv * half),
    );

    let zero = DMatrix::zeros(n, n);
    let m = complexify(phi_s, &(f * -half));
    let m_inv = m.clone().lu().try_inverse().ok_or(GkError::IllConditioned {
        what: "phi_s - i F/2",
        condition: f64::INFINITY,
    })?;
    let phi_c = complexify(&phi, &zero);
    let q = phi_c.transpose() * m_inv * &phi_c * Cplx::new(lit::<T>(2.0), T::zero());

    Ok(FrameTensors {
        mu: mu.clone(),
        phi_s: phi_s.clone(),
        phi,
        phi_inv,
        xi,
        q,
        j_plus,
        j_minus,
        g,
        b,
        omega: standard_omega(n),
        a_half_inv,
    })
}

/// Residuals of the algebraic identities every frame must satisfy.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrameResiduals {
    pub j_plus_square: f64,
    pub j_minus_square: f64,
    pub gualtieri_metric: f64,
    pub gualtieri_b: f64,
    pub symplectic_adjoint: f64,
    pub metric_symmetry: f64,
    pub b_antisymmetry: f64,
    /// Relative error of `det g = det (φ⁻¹)_s · det Ξ`.
    pub det_metric: f64,
    /// `φᵀ (φ⁻¹)_s φ − φ_s`.
    pub phi_sandwich: f64,
    /// `((J₊+J₋)/2) · A − I` for the closed-form inverse `A`.
    pub half_sum_inverse: f64,
    pub min_metric_eigenvalue: f64,
    pub min_xi_eigenvalue: f64,
}

impl FrameResiduals {
    /// Largest residual among the identities (eigenvalues excluded).
    pub fn max_identity_residual(&self) -> f64 {
        [
            self.j_plus_square,
            self.j_minus_square,
            self.gualtieri_metric,
            self.gualtieri_b,
            self.symplectic_adjoint,
            self.metric_symmetry,
            self.b_antisymmetry,
            self.det_metric,
            self.phi_sandwich,
            self.half_sum_inverse,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_identity_residual() <= tol && self.min_metric_eigenvalue > 0.0 && self.min_xi_eigenvalue > 0.0
    }
}

impl<T: Real> FrameTensors<T> {
    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    /// `J` as an ordinary column-acting matrix: `(J v)^a = Σ_b col[a][b] v^b`.
    pub fn j_plus_columns(&self) -> DMatrix<T> {
        self.j_plus.transpose()
    }

    pub fn j_minus_columns(&self) -> DMatrix<T> {
        self.j_minus.transpose()
    }

    pub fn residuals(&self) -> FrameResiduals {
        let n2 = 2 * self.dim();
        let id = DMatrix::<T>::identity(n2, n2);
        let half: T = lit(0.5);
        let w = &self.omega;
        let w_inv = -w;
        let f64_of = |x: T| x.to_f64_lossy();
        let pi_s = sym(&self.phi_inv);
        let det_g = self.g.determinant();
        let det_rhs = pi_s.determinant() * self.xi.determinant();
        FrameResiduals {
            j_plus_square: f64_of(max_abs(&(&self.j_plus * &self.j_plus + &id))),
            j_minus_square: f64_of(max_abs(&(&self.j_minus * &self.j_minus + &id))),
            gualtieri_metric: f64_of(max_abs(&(-(&self.j_plus + &self.j_minus) * w * half - &self.g))),
            gualtieri_b: f64_of(max_abs(&(-(&self.j_plus - &self.j_minus) * w * half - &self.b))),
            symplectic_adjoint: f64_of(max_abs(&(-(&w_inv * self.j_plus.transpose() * w) - &self.j_minus))),
            metric_symmetry: f64_of(max_abs(&(&self.g - self.g.transpose()))),
            b_antisymmetry: f64_of(max_abs(&(&self.b + self.b.transpose()))),
            det_metric: f64_of(((det_g - det_rhs) / det_rhs).abs()),
            phi_sandwich: f64_of(max_abs(&(self.phi.transpose() * &pi_s * &self.phi - &self.phi_s))),
            half_sum_inverse: f64_of(max_abs(
                &((&self.j_plus + &self.j_minus) * half * &self.a_half_inv - &id),
            )),
            min_metric_eigenvalue: f64_of(min_sym_eigenvalue(&self.g)),
            min_xi_eigenvalue: f64_of(min_sym_eigenvalue(&self.xi)),
        }
    }
}

/// First μ-derivatives of the frame blocks that the connection needs.
#[derive(Debug, Clone)]
pub struct FrameDerivatives<T: Real> {
    /// `d_phi_inv[k] = ∂_k φ⁻¹`.
    pub d_phi_inv: Vec<DMatrix<T>>,
    /// `d_metric[k] = ∂_{μ_k} g` (2n × 2n).
    pub d_metric: Vec<DMatrix<T>>,
    /// `d_b[k] = ∂_{μ_k} b` (2n × 2n).
    pub d_b: Vec<DMatrix<T>>,
}

pub fn frame_derivatives<T: Real>(
    frame: &FrameTensors<T>,
    jet: &PotentialJet<T>,
    params: &GkParams<T>,
) -> FrameDerivatives<T> {
    let f = params.f();
    let half: T = lit(0.5);
    let quarter: T = lit(0.25);
    let n = frame.dim();
    let zero = DMatrix::<T>::zeros(n, n);
    let mut d_phi_inv = Vec::with_capacity(n);
    let mut d_metric = Vec::with_capacity(n);
    let mut d_b = Vec::with_capacity(n);
    for s_k in &jet.third {
        let dp = -(&frame.phi_inv * s_k * &frame.phi_inv);
        let dps = sym(&dp);
        let dpa = anti(&dp);
        d_metric.push(block2(
            &dps,
            &(&dpa * f * half),
            &(f * &dpa * half),
            &(s_k + f * &dps * f * quarter),
        ));
        d_b.push(block2(
            &dpa,
            &(&dps * f * half),
            &(f * &dps * half),
            &(&zero + f * &dpa * f * quarter),
        ));
        d_phi_inv.push(dp);
    }
    FrameDerivatives {
        d_phi_inv,
        d_metric,
        d_b,
    }
}

/// Outcome of checking admissibility over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub min_eigenvalue: f64,
    pub argmin: Option<Vec<f64>>,
    pub points_checked: usize,
    /// Points where the potential itself could not be evaluated.
    pub evaluation_failures: Vec<String>,
    pub passed: bool,
}

/// Minimum of the admissibility eigenvalue over `grid`; failures are reported,
/// never raised.
pub fn validate_params<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    grid: &[DVector<T>],
) -> AdmissibilityReport {
    let mut min = f64::INFINITY;
    let mut argmin = None;
    let mut failures = Vec::new();
    for mu in grid {
        match model.hessian(mu) {
            Ok(h) => {
                let e = if params.dim() == h.nrows() {
                    admissibility_eigenvalue(&h, params.f()).to_f64_lossy()
                } else {
                    f64::NAN
                };
                if e.is_nan() {
                    failures.push(format!("dimension mismatch at {:?}", point_f64(mu)));
                } else if e < min {
                    min = e;
                    argmin = Some(point_f64(mu));
                }
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    AdmissibilityReport {
        min_eigenvalue: min,
        argmin,
        points_checked: grid.len(),
        passed: failures.is_empty() && min > 0.0 && !grid.is_empty(),
        evaluation_failures: failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{interior_grid, GridSpec, MomentPolytope};
    use crate::potential::{guillemin_potential, quadratic_potential};

    fn mat(n: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(n, n, v)
    }

    fn flat2() -> PotentialModel<f64> {
        quadratic_potential(&MomentPolytope::unit_cube(2).unwrap())
    }

    fn centre() -> DVector<f64> {
        DVector::from_vec(vec![0.5, 0.5])
    }

    #[test]
    fn flat_kahler_frame() {
        let fr = assemble_frame(&flat2(), &GkParams::kahler(2), &centre()).unwrap();
        let i = DMatrix::<f64>::identity(2, 2);
        let z = DMatrix::<f64>::zeros(2, 2);
        let j = block2(&z, &(-&i), &i, &z);
        assert_eq!(fr.j_plus, j);
        assert_eq!(fr.j_minus, j);
        assert_eq!(fr.g, DMatrix::identity(4, 4));
        assert_eq!(fr.b, DMatrix::zeros(4, 4));
        assert_eq!(fr.xi, i);
    }

    #[test]
    fn unit_f_gives_three_quarters_xi() {
        let f = mat(2, &[0.0, 1.0, -1.0, 0.0]);
        let params = GkParams::new(DMatrix::zeros(2, 2), f.clone()).unwrap();
        let fr = assemble_frame(&flat2(), &params, &centre()).unwrap();
        assert!(max_abs(&(&fr.xi - DMatrix::identity(2, 2) * 0.75)) < 1e-15);
        assert!(max_abs(&fr.b.view((0, 0), (2, 2)).into_owned()) == 0.0);
        assert!(max_abs(&(fr.b.view((0, 2), (2, 2)).into_owned() - &f * 0.5)) < 1e-15);
        assert!(fr.residuals().passes(1e-12));
    }

    #[test]
    fn admissibility_examples() {
        let id = DMatrix::<f64>::identity(2, 2);
        assert!((admissibility_eigenvalue(&id, &DMatrix::zeros(2, 2)) - 1.0).abs() < 1e-15);
        let f1 = mat(2, &[0.0, 1.0, -1.0, 0.0]);
        assert!((admissibility_eigenvalue(&id, &f1) - 0.75).abs() < 1e-15);
        let f3 = mat(2, &[0.0, 3.0, -3.0, 0.0]);
        assert!((admissibility_eigenvalue(&id, &f3) - (1.0 - 2.25)).abs() < 1e-14);

        let model = flat2();
        let grid = interior_grid(model.polytope(), &GridSpec::new(3, 0.1).unwrap()).unwrap();
        let ok = validate_params(&model, &GkParams::new(DMatrix::zeros(2, 2), f1).unwrap(), &grid);
        assert!(ok.passed);
        assert!((ok.min_eigenvalue - 0.75).abs() < 1e-14);
        let bad = validate_params(&model, &GkParams::new(DMatrix::zeros(2, 2), f3.clone()).unwrap(), &grid);
        assert!(!bad.passed);
        assert!(bad.min_eigenvalue < 0.0);

        let err = assemble_frame(&model, &GkParams::new(DMatrix::zeros(2, 2), f3).unwrap(), &centre());
        assert!(matches!(err, Err(GkError::InadmissibleParams { .. })));
    }

    #[test]
    fn params_must_be_antisymmetric() {
        let s = mat(2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(
            GkParams::new(s.clone(), DMatrix::zeros(2, 2)).unwrap_err(),
            GkError::NotAntisymmetric("C")
        );
        assert_eq!(
            GkParams::new(DMatrix::zeros(2, 2), s).unwrap_err(),
            GkError::NotAntisymmetric("F")
        );
        assert!(GkParams::new(DMatrix::<f64>::zeros(2, 2), DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn generic_frame_identities() {
        let model = guillemin_potential(&MomentPolytope::<f64>::unit_cube(2).unwrap());
        let params = GkParams::new(mat(2, &[0.0, 0.7, -0.7, 0.0]), mat(2, &[0.0, 0.9, -0.9, 0.0])).unwrap();
        let fr = assemble_frame(&model, &params, &DVector::from_vec(vec![0.3, 0.65])).unwrap();
        let r = fr.residuals();
        assert!(r.passes(1e-12), "{r:?}");
    }

    #[test]
    fn kahler_reduction_has_equal_structures() {
        let model = guillemin_potential(&MomentPolytope::<f64>::unit_cube(2).unwrap());
        let fr = assemble_frame(&model, &GkParams::kahler(2), &DVector::from_vec(vec![0.2, 0.7])).unwrap();
        assert!(max_abs(&(&fr.j_plus - &fr.j_minus)) < 1e-15);
        assert_eq!(max_abs(&fr.b), 0.0);
    }

    #[test]
    fn conditioning_guard_near_boundary() {
        let model = guillemin_potential(&MomentPolytope::<f64>::interval(0.0, 1.0).unwrap());
        let err = assemble_frame(&model, &GkParams::kahler(1), &DVector::from_vec(vec![1e-13]));
        assert!(matches!(err, Err(GkError::IllConditioned { .. })) || err.is_ok());
    }
}
