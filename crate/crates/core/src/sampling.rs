//! Seeded random generators for tests, self-checks and the CLI.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{Ambient, CliffordElement, ComplexStructure, Spinor, SpinorModel};
use crate::error::Result;
use crate::frame::{admissibility_eigenvalue, GkParams};
use crate::potential::PotentialModel;
use crate::scalar::{lit, Cplx, Real};

pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform<T: Real>(rng: &mut SampleRng, scale: f64) -> T {
    lit(rng.random_range(-scale..=scale))
}

pub fn random_complex<T: Real>(rng: &mut SampleRng) -> Cplx<T> {
    Cplx::new(uniform(rng, 1.0), uniform(rng, 1.0))
}

pub fn random_antisymmetric<T: Real>(rng: &mut SampleRng, n: usize, scale: f64) -> DMatrix<T> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v: T = uniform(rng, scale);
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
    }
    m
}

/// Random symmetric positive-definite matrix `AᵀA + shift·I`.
pub fn random_spd<T: Real>(rng: &mut SampleRng, n: usize, shift: f64) -> DMatrix<T> {
    let a = DMatrix::from_fn(n, n, |_, _| uniform::<T>(rng, 1.0));
    a.transpose() * &a + DMatrix::identity(n, n) * lit::<T>(shift)
}

/// Random antisymmetric `F` admissible for `phi_s`, shrunk until it is.
pub fn random_admissible_f<T: Real>(rng: &mut SampleRng, phi_s: &DMatrix<T>, scale: f64) -> DMatrix<T> {
    let mut f = random_antisymmetric(rng, phi_s.nrows(), scale);
    while !(admissibility_eigenvalue(phi_s, &f) > lit(0.05)) {
        f *= lit::<T>(0.5);
    }
    f
}

/// Random `C`, `F` with `F` admissible at every point of `grid`.
pub fn random_params<T: Real>(
    rng: &mut SampleRng,
    model: &PotentialModel<T>,
    grid: &[DVector<T>],
    scale: f64,
) -> Result<GkParams<T>> {
    let n = model.dim();
    let c = random_antisymmetric(rng, n, scale);
    let mut f = random_antisymmetric(rng, n, scale);
    let hessians = grid.iter().map(|mu| model.hessian(mu)).collect::<Result<Vec<_>>>()?;
    while hessians.iter().any(|h| !(admissibility_eigenvalue(h, &f) > lit(0.05))) {
        f *= lit::<T>(0.5);
    }
    GkParams::new(c, f)
}

/// Random orthogonal matrix from the QR factorization of a uniform matrix.
pub fn random_orthogonal<T: Real>(rng: &mut SampleRng, m: usize) -> DMatrix<T> {
    let a = DMatrix::from_fn(m, m, |_, _| uniform::<T>(rng, 1.0));
    a.qr().q()
}

/// `G^{-1/2} O J₀ Oᵀ G^{1/2}` for a random orthogonal `O`.
pub fn random_complex_structure<T: Real>(rng: &mut SampleRng, ambient: &Ambient<T>) -> Result<ComplexStructure<T>> {
    let m = ambient.dim();
    let o = random_orthogonal::<T>(rng, m);
    let mut j0 = DMatrix::zeros(m, m);
    for k in 0..ambient.n() {
        j0[(2 * k + 1, 2 * k)] = T::one();
        j0[(2 * k, 2 * k + 1)] = -T::one();
    }
    let s = DMatrix::from_diagonal(&DVector::from_iterator(m, ambient.metric().iter().map(|g| g.sqrt())));
    let s_inv = DMatrix::from_diagonal(&DVector::from_iterator(
        m,
        ambient.metric().iter().map(|g| T::one() / g.sqrt()),
    ));
    ComplexStructure::new(ambient, s_inv * &o * j0 * o.transpose() * s)
}

pub fn random_clifford<T: Real>(rng: &mut SampleRng, ambient: &Ambient<T>) -> CliffordElement<T> {
    let coeffs = (0..ambient.size()).map(|_| random_complex(rng)).collect();
    CliffordElement::from_coeffs(ambient, coeffs).expect("sizes agree")
}

pub fn random_real_vector<T: Real>(rng: &mut SampleRng, m: usize) -> Vec<Cplx<T>> {
    (0..m).map(|_| Cplx::new(uniform(rng, 1.0), T::zero())).collect()
}

pub fn random_spinor<T: Real>(rng: &mut SampleRng, model: &SpinorModel<T>) -> Spinor<T> {
    let c = DVector::from_fn(model.dim(), |_, _| random_complex(rng));
    model.spinor(c).expect("sizes agree")
}
