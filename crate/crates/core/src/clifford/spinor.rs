//! Spinor model `Λ·V*_{0,1}` attached to a compatible complex structure.

use nalgebra::{DMatrix, DVector};

use super::algebra::{Ambient, CliffordElement};
use super::blade::{bits_below, reorder_sign, reversal_sign};
use crate::error::{GkError, Result};
use crate::linalg::max_abs;
use crate::scalar::{lit, Cplx, Real};

/// Orthogonal complex structure on the ambient space, acting on columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure<T: Real> {
    ambient: Ambient<T>,
    j: DMatrix<T>,
}

impl<T: Real> ComplexStructure<T> {
    pub fn new(ambient: &Ambient<T>, j: DMatrix<T>) -> Result<Self> {
        let m = ambient.dim();
        if j.shape() != (m, m) {
            return Err(GkError::DimensionMismatch(format!(
                "J is {:?}, expected {m}x{m}",
                j.shape()
            )));
        }
        let tol: T = lit(1e-10);
        let id = DMatrix::<T>::identity(m, m);
        let g = DMatrix::from_diagonal(&DVector::from_column_slice(ambient.metric()));
        if max_abs(&(&j * &j + &id)) > tol {
            return Err(GkError::IncompatibleStructure("J² ≠ −1".into()));
        }
        if max_abs(&(j.transpose() * &g * &j - &g)) > tol {
            return Err(GkError::IncompatibleStructure("J is not g-orthogonal".into()));
        }
        Ok(Self {
            ambient: ambient.clone(),
            j,
        })
    }

    /// `J e_{2k} = e_{2k+1}`.
    pub fn standard(ambient: &Ambient<T>) -> Result<Self> {
        let m = ambient.dim();
        let g = ambient.metric();
        let mut j = DMatrix::zeros(m, m);
        for k in 0..ambient.n() {
            let (a, b) = (2 * k, 2 * k + 1);
            let r = (g[a] / g[b]).sqrt();
            j[(b, a)] = r;
            j[(a, b)] = -T::one() / r;
        }
        Self::new(ambient, j)
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.j
    }

    pub fn ambient(&self) -> &Ambient<T> {
        &self.ambient
    }

    pub fn negated(&self) -> Self {
        Self {
            ambient: self.ambient.clone(),
            j: -&self.j,
        }
    }
}

/// Spinor coefficients over the monomials `f̄^A`, `A ⊂ {1..n}`, tagged with
/// the structure that produced the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Spinor<T: Real> {
    structure: DMatrix<T>,
    coeffs: DVector<Cplx<T>>,
}

impl<T: Real> Spinor<T> {
    pub fn coeffs(&self) -> &DVector<Cplx<T>> {
        &self.coeffs
    }

    pub fn scale(&self, c: Cplx<T>) -> Self {
        Self {
            structure: self.structure.clone(),
            coeffs: &self.coeffs * c,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            structure: self.structure.clone(),
            coeffs: &self.coeffs + &other.coeffs,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (&self.coeffs - &other.coeffs)
            .iter()
            .fold(T::zero(), |m, c| m.max(c.norm_sqr().sqrt()))
    }
}

fn czero<T: Real>() -> Cplx<T> {
    Cplx::new(T::zero(), T::zero())
}

fn cone<T: Real>() -> Cplx<T> {
    Cplx::new(T::one(), T::zero())
}

/// Creation `f̄^i ∧` on the `2^n`-dimensional model.
fn creation<T: Real>(n: usize, i: usize) -> DMatrix<Cplx<T>> {
    let d = 1 << n;
    let mut m = DMatrix::from_element(d, d, czero());
    for a in 0..d {
        if a & (1 << i) == 0 {
            let s = if bits_below(a, i).is_multiple_of(2) {
                T::one()
            } else {
                -T::one()
            };
            m[(a | (1 << i), a)] = Cplx::new(s, T::zero());
        }
    }
    m
}

/// Spinor representation built from a unitary frame of `V^{1,0}`.
#[derive(Debug, Clone)]
pub struct SpinorModel<T: Real> {
    structure: ComplexStructure<T>,
    frame: Vec<DVector<Cplx<T>>>,
    monomials: Vec<DMatrix<Cplx<T>>>,
}

impl<T: Real> SpinorModel<T> {
    pub fn new(structure: &ComplexStructure<T>) -> Result<Self> {
        let amb = structure.ambient();
        let n = amb.n();
        let m = amb.dim();
        let g = amb.metric();
        let herm = |u: &DVector<Cplx<T>>, w: &DVector<Cplx<T>>| {
            (0..m).fold(czero::<T>(), |acc, a| acc + u[a].conj() * w[a] * g[a])
        };
        let jm = &structure.j;
        let mut frame: Vec<DVector<Cplx<T>>> = Vec::with_capacity(n);
        for k in 0..m {
            if frame.len() == n {
                break;
            }
            let mut u = DVector::from_fn(m, |a, _| {
                let e = if a == k { T::one() } else { T::zero() };
                Cplx::new(e, -jm[(a, k)])
            });
            for f in &frame {
                let c = herm(f, &u);
                u -= f * c;
            }
            let norm = herm(&u, &u).re.sqrt();
            if norm > lit(1e-8) {
                frame.push(u / Cplx::new(norm, T::zero()));
            }
        }
        if frame.len() != n {
            return Err(GkError::IncompatibleStructure("could not build a unitary frame".into()));
        }
        let mut model = Self {
            structure: structure.clone(),
            frame,
            monomials: Vec::new(),
        };
        let gens: Vec<DMatrix<Cplx<T>>> = (0..m)
            .map(|a| {
                let mut v = vec![czero::<T>(); m];
                v[a] = cone();
                model.vector_action(&v)
            })
            .collect();
        let d = 1 << n;
        model.monomials = (0..amb.size())
            .map(|mask| {
                (0..m)
                    .filter(|a| mask & (1 << a) != 0)
                    .fold(DMatrix::identity(d, d), |acc, a| acc * &gens[a])
            })
            .collect();
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.structure.ambient.n()
    }

    pub fn dim(&self) -> usize {
        1 << self.n()
    }

    pub fn ambient(&self) -> &Ambient<T> {
        &self.structure.ambient
    }

    pub fn structure(&self) -> &ComplexStructure<T> {
        &self.structure
    }

    /// Unitary frame `{f_i}` of `V^{1,0}` with `g(f_i, f̄_j) = δ_ij`.
    pub fn frame(&self) -> &[DVector<Cplx<T>>] {
        &self.frame
    }

    /// `ρ(v) = √2 Σ_i [g(v, f̄_i) f̄^i∧ + g(v, f_i) ι_{f̄_i}]` for `v ∈ V ⊗ ℂ`.
    pub fn vector_action(&self, v: &[Cplx<T>]) -> DMatrix<Cplx<T>> {
        let n = self.n();
        let g = self.ambient().metric();
        let d = 1 << n;
        let root2: T = lit(std::f64::consts::SQRT_2);
        let mut out = DMatrix::from_element(d, d, czero());
        for (i, f) in self.frame.iter().enumerate() {
            let mut c_bar = czero::<T>();
            let mut c = czero::<T>();
            for a in 0..v.len() {
                c_bar += v[a] * f[a].conj() * g[a];
                c += v[a] * f[a] * g[a];
            }
            let cr = creation::<T>(n, i);
            let an = cr.adjoint();
            out += cr * (c_bar * root2) + an * (c * root2);
        }
        out
    }

    /// `ρ(a)` on the spinor model.
    pub fn representation(&self, a: &CliffordElement<T>) -> Result<DMatrix<Cplx<T>>> {
        self.ambient().check(a.ambient())?;
        let d = self.dim();
        let mut out = DMatrix::from_element(d, d, czero());
        for (mask, c) in a.coeffs().iter().enumerate() {
            if *c != czero() {
                out += &self.monomials[mask] * *c;
            }
        }
        Ok(out)
    }

    /// `ρ(e_A)` for the monomial with bitmask `mask`.
    pub fn monomial_matrix(&self, mask: usize) -> &DMatrix<Cplx<T>> {
        &self.monomials[mask]
    }

    pub fn spinor(&self, coeffs: DVector<Cplx<T>>) -> Result<Spinor<T>> {
        if coeffs.len() != self.dim() {
            return Err(GkError::DimensionMismatch(format!(
                "spinor of length {} in a {}-dimensional model",
                coeffs.len(),
                self.dim()
            )));
        }
        Ok(Spinor {
            structure: self.structure.j.clone(),
            coeffs,
        })
    }

    /// The degree-0 generator `1 ∈ Λ⁰`.
    pub fn vacuum(&self) -> Spinor<T> {
        let mut c = DVector::from_element(self.dim(), czero());
        c[0] = cone();
        Spinor {
            structure: self.structure.j.clone(),
            coeffs: c,
        }
    }

    pub fn check(&self, s: &Spinor<T>) -> Result<()> {
        if s.structure == self.structure.j && s.coeffs.len() == self.dim() {
            Ok(())
        } else {
            Err(GkError::FrameMismatch)
        }
    }

    pub fn act(&self, a: &CliffordElement<T>, phi: &Spinor<T>) -> Result<Spinor<T>> {
        self.check(phi)?;
        Ok(Spinor {
            structure: phi.structure.clone(),
            coeffs: self.representation(a)? * &phi.coeffs,
        })
    }

    /// Hermitian metric, conjugate-linear in the first slot.
    pub fn hermitian(&self, phi: &Spinor<T>, psi: &Spinor<T>) -> Result<Cplx<T>> {
        self.check(phi)?;
        self.check(psi)?;
        Ok(phi.coeffs.dotc(&psi.coeffs))
    }

    /// `q(f̄^A, f̄^B)`: top coefficient of `reverse(f̄^A) ∧ f̄^B`.
    fn pairing_sign(&self, a: usize, b: usize) -> i32 {
        let top = self.dim() - 1;
        if a & b != 0 || a | b != top {
            0
        } else {
            reversal_sign(a) * reorder_sign(a, b)
        }
    }

    /// Bilinear pairing `q(φ, ψ) = (reverse(φ) ∧ ψ)_top`.
    pub fn pairing_q(&self, phi: &Spinor<T>, psi: &Spinor<T>) -> Result<Cplx<T>> {
        self.check(phi)?;
        self.check(psi)?;
        let top = self.dim() - 1;
        Ok((0..self.dim()).fold(czero(), |acc, a| {
            let b = top ^ a;
            acc + phi.coeffs[a] * psi.coeffs[b] * T::from_i32(self.pairing_sign(a, b)).unwrap()
        }))
    }

    /// Row vector of the functional `q(ψ, ·)`.
    pub(crate) fn pairing_functional(&self, psi: &Spinor<T>) -> DMatrix<Cplx<T>> {
        let top = self.dim() - 1;
        DMatrix::from_fn(1, self.dim(), |_, b| {
            let a = top ^ b;
            psi.coeffs[a] * T::from_i32(self.pairing_sign(a, b)).unwrap()
        })
    }

    /// `φᶜ` with `q(φ, ·) = h(φᶜ, ·)`.
    pub fn charge_conjugate(&self, phi: &Spinor<T>) -> Result<Spinor<T>> {
        self.check(phi)?;
        let row = self.pairing_functional(phi);
        Ok(Spinor {
            structure: phi.structure.clone(),
            coeffs: DVector::from_fn(self.dim(), |b, _| row[(0, b)].conj()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model1() -> SpinorModel<f64> {
        let a = Ambient::euclidean(1).unwrap();
        SpinorModel::new(&ComplexStructure::standard(&a).unwrap()).unwrap()
    }

    #[test]
    fn n1_generator_is_swap() {
        let m = model1();
        let r = m.monomial_matrix(0b01);
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]).map(|x| Cplx::new(x, 0.0));
        assert!((r - &swap).iter().all(|c| c.norm() < 1e-15));
        assert!((r * r - DMatrix::identity(2, 2)).iter().all(|c| c.norm() < 1e-15));
        assert_eq!(m.monomial_matrix(0), &DMatrix::identity(2, 2));
    }

    #[test]
    fn n1_pairing_and_conjugation() {
        let m = model1();
        let one = m.vacuum();
        let fbar = m
            .spinor(DVector::from_vec(vec![Cplx::new(0.0, 0.0), Cplx::new(1.0, 0.0)]))
            .unwrap();
        assert_eq!(m.pairing_q(&one, &fbar).unwrap(), Cplx::new(1.0, 0.0));
        assert_eq!(m.pairing_q(&one, &one).unwrap(), Cplx::new(0.0, 0.0));
        assert_eq!(m.charge_conjugate(&one).unwrap(), fbar);
    }

    #[test]
    fn rejects_incompatible_structures() {
        let a = Ambient::<f64>::euclidean(1).unwrap();
        let not_complex = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(
            ComplexStructure::new(&a, not_complex),
            Err(GkError::IncompatibleStructure(_))
        ));
        let not_orthogonal = DMatrix::from_row_slice(2, 2, &[0.0, -0.5, 2.0, 0.0]);
        assert!(ComplexStructure::new(&a, not_orthogonal).is_err());
    }

    #[test]
    fn frame_mismatch_detected() {
        let m = model1();
        let other = SpinorModel::new(&m.structure().negated()).unwrap();
        assert_eq!(
            m.pairing_q(&other.vacuum(), &m.vacuum()).unwrap_err(),
            GkError::FrameMismatch
        );
    }
}
