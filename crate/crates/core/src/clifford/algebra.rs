//! Complexified Clifford algebra of `(ℝ^{2n}, g)` with diagonal `g`.

use std::ops::{Add, Mul, Sub};

use super::blade::{reorder_sign, reversal_sign};
use crate::error::{GkError, Result};
use crate::scalar::{Cplx, Real};

/// Real vector space `ℝ^{2n}` with a diagonal positive metric in the
/// standard basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Ambient<T: Real> {
    n: usize,
    metric: Vec<T>,
}

impl<T: Real> Ambient<T> {
    /// Euclidean `ℝ^{2n}`.
    pub fn euclidean(n: usize) -> Result<Self> {
        Self::diagonal(n, vec![T::one(); 2 * n])
    }

    pub fn diagonal(n: usize, metric: Vec<T>) -> Result<Self> {
        if n == 0 || n > 3 {
            return Err(GkError::DimensionMismatch(format!("half-dimension {n} outside 1..=3")));
        }
        if metric.len() != 2 * n || metric.iter().any(|g| !(*g > T::zero())) {
            return Err(GkError::DimensionMismatch(
                "metric must have 2n positive diagonal entries".into(),
            ));
        }
        Ok(Self { n, metric })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Number of basis monomials, `2^{2n}`.
    pub fn size(&self) -> usize {
        1 << self.dim()
    }

    pub fn metric(&self) -> &[T] {
        &self.metric
    }

    /// `Π_{a ∈ A} g_aa`.
    pub(crate) fn metric_product(&self, mask: usize) -> T {
        (0..self.dim())
            .filter(|a| mask & (1 << a) != 0)
            .fold(T::one(), |p, a| p * self.metric[a])
    }

    pub(crate) fn check(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(GkError::AmbientMismatch)
        }
    }
}

/// Element of `Cl(V, g) ⊗ ℂ`; coefficient `k` multiplies the monomial whose
/// generators are the set bits of `k`, in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement<T: Real> {
    ambient: Ambient<T>,
    coeffs: Vec<Cplx<T>>,
}

impl<T: Real> CliffordElement<T> {
    pub fn zero(ambient: &Ambient<T>) -> Self {
        Self {
            ambient: ambient.clone(),
            coeffs: vec![Cplx::new(T::zero(), T::zero()); ambient.size()],
        }
    }

    pub fn scalar(ambient: &Ambient<T>, c: Cplx<T>) -> Self {
        Self::monomial(ambient, 0, c)
    }

    pub fn one(ambient: &Ambient<T>) -> Self {
        Self::scalar(ambient, Cplx::new(T::one(), T::zero()))
    }

    pub fn monomial(ambient: &Ambient<T>, mask: usize, c: Cplx<T>) -> Self {
        let mut e = Self::zero(ambient);
        e.coeffs[mask] = c;
        e
    }

    /// Generator `e_a`.
    pub fn generator(ambient: &Ambient<T>, a: usize) -> Self {
        Self::monomial(ambient, 1 << a, Cplx::new(T::one(), T::zero()))
    }

    /// `Σ_a v^a e_a`.
    pub fn vector(ambient: &Ambient<T>, v: &[Cplx<T>]) -> Result<Self> {
        if v.len() != ambient.dim() {
            return Err(GkError::DimensionMismatch(format!(
                "vector of length {} in dimension {}",
                v.len(),
                ambient.dim()
            )));
        }
        let mut e = Self::zero(ambient);
        for (a, c) in v.iter().enumerate() {
            e.coeffs[1 << a] = *c;
        }
        Ok(e)
    }

    pub fn from_coeffs(ambient: &Ambient<T>, coeffs: Vec<Cplx<T>>) -> Result<Self> {
        if coeffs.len() != ambient.size() {
            return Err(GkError::DimensionMismatch(format!(
                "{} coefficients for a {}-dimensional algebra",
                coeffs.len(),
                ambient.size()
            )));
        }
        Ok(Self {
            ambient: ambient.clone(),
            coeffs,
        })
    }

    pub fn ambient(&self) -> &Ambient<T> {
        &self.ambient
    }

    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> Cplx<T> {
        self.coeffs[mask]
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.ambient.check(&other.ambient)?;
        let mut out = Self::zero(&self.ambient);
        let zero = Cplx::new(T::zero(), T::zero());
        for (a, ca) in self.coeffs.iter().enumerate() {
            if *ca == zero {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if *cb == zero {
                    continue;
                }
                let s = T::from_i32(reorder_sign(a, b)).unwrap() * self.ambient.metric_product(a & b);
                out.coeffs[a ^ b] += *ca * *cb * s;
            }
        }
        Ok(out)
    }

    /// Order reversal `e_{a1}⋯e_{ak} ↦ e_{ak}⋯e_{a1}`.
    pub fn reverse(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| *c * T::from_i32(reversal_sign(m)).unwrap())
            .collect();
        Self {
            ambient: self.ambient.clone(),
            coeffs,
        }
    }

    /// Conjugate-linear extension of order reversal.
    pub fn dagger(&self) -> Self {
        let mut r = self.reverse();
        r.coeffs.iter_mut().for_each(|c| *c = c.conj());
        r
    }

    pub fn scale(&self, c: Cplx<T>) -> Self {
        Self {
            ambient: self.ambient.clone(),
            coeffs: self.coeffs.iter().map(|x| *x * c).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm_sqr().sqrt()))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Cplx<T>, Cplx<T>) -> Cplx<T>) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        Self {
            ambient: self.ambient.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

impl<T: Real> Add for &CliffordElement<T> {
    type Output = CliffordElement<T>;
    fn add(self, rhs: Self) -> CliffordElement<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &CliffordElement<T> {
    type Output = CliffordElement<T>;
    fn sub(self, rhs: Self) -> CliffordElement<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Panics on ambient mismatch; use [`CliffordElement::multiply`] to get an error.
impl<T: Real> Mul for &CliffordElement<T> {
    type Output = CliffordElement<T>;
    fn mul(self, rhs: Self) -> CliffordElement<T> {
        self.multiply(rhs).expect("ambient mismatch")
    }
}

/// Alias used where the product is read as the Clifford product.
pub fn clifford_multiply<T: Real>(a: &CliffordElement<T>, b: &CliffordElement<T>) -> Result<CliffordElement<T>> {
    a.multiply(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amb(n: usize) -> Ambient<f64> {
        Ambient::euclidean(n).unwrap()
    }

    #[test]
    fn generator_relations() {
        let a = amb(2);
        let one = CliffordElement::one(&a);
        for i in 0..4 {
            let ei = CliffordElement::generator(&a, i);
            assert_eq!(&ei * &ei, one);
            for j in 0..4 {
                if i != j {
                    let ej = CliffordElement::generator(&a, j);
                    let anti = &(&ei * &ej) + &(&ej * &ei);
                    assert_eq!(anti, CliffordElement::zero(&a));
                }
            }
        }
    }

    #[test]
    fn bivector_squares_to_minus_one() {
        let a = amb(1);
        let e12 = &CliffordElement::generator(&a, 0) * &CliffordElement::generator(&a, 1);
        assert_eq!(&e12 * &e12, CliffordElement::one(&a).scale(Cplx::new(-1.0, 0.0)));
    }

    #[test]
    fn weighted_metric() {
        let a = Ambient::diagonal(1, vec![2.0, 3.0]).unwrap();
        let e2 = CliffordElement::generator(&a, 1);
        assert_eq!((&e2 * &e2).coeff(0), Cplx::new(3.0, 0.0));
    }

    #[test]
    fn mismatch_is_an_error() {
        let x = CliffordElement::one(&amb(1));
        let y = CliffordElement::one(&amb(2));
        assert_eq!(x.multiply(&y).unwrap_err(), GkError::AmbientMismatch);
        assert!(Ambient::<f64>::euclidean(4).is_err());
        assert!(Ambient::diagonal(1, vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn reverse_and_dagger() {
        let a = amb(1);
        let e12 = CliffordElement::monomial(&a, 0b11, Cplx::new(0.0, 1.0));
        let d = e12.dagger();
        assert_eq!(d.coeff(0b11), Cplx::new(0.0, 1.0));
        assert_eq!(e12.reverse().coeff(0b11), Cplx::new(0.0, -1.0));
    }
}
