//! Exterior algebra `Λ·(V* ⊗ ℂ)`, the symbol map from the Clifford algebra,
//! the generalized `(X + ξ)` action and the Chevalley pairing.

use nalgebra::DMatrix;

use super::algebra::{Ambient, CliffordElement};
use super::blade::{bits_below, parity_sign, reorder_sign, reversal_sign};
use crate::error::{GkError, Result};
use crate::scalar::{Cplx, Real};

/// Form with coefficient `k` on `e^{a1}∧⋯∧e^{ak}` for the set bits of `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormElement<T: Real> {
    ambient: Ambient<T>,
    coeffs: Vec<Cplx<T>>,
}

/// Element `X + ξ` of `(V ⊕ V*) ⊗ ℂ`; `xi[a]` is the coefficient of `e^a`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenVector<T: Real> {
    pub x: Vec<Cplx<T>>,
    pub xi: Vec<Cplx<T>>,
}

impl<T: Real> GenVector<T> {
    /// `v ± g(v)`.
    pub fn lift(ambient: &Ambient<T>, v: &[Cplx<T>], plus: bool) -> Self {
        let s = if plus { T::one() } else { -T::one() };
        Self {
            x: v.to_vec(),
            xi: v.iter().zip(ambient.metric()).map(|(c, g)| *c * (*g * s)).collect(),
        }
    }

    /// `ξ(X)`.
    pub fn pairing(&self) -> Cplx<T> {
        self.x
            .iter()
            .zip(&self.xi)
            .fold(Cplx::new(T::zero(), T::zero()), |a, (x, k)| a + *x * *k)
    }
}

impl<T: Real> FormElement<T> {
    pub fn zero(ambient: &Ambient<T>) -> Self {
        Self {
            ambient: ambient.clone(),
            coeffs: vec![Cplx::new(T::zero(), T::zero()); ambient.size()],
        }
    }

    pub fn monomial(ambient: &Ambient<T>, mask: usize, c: Cplx<T>) -> Self {
        let mut f = Self::zero(ambient);
        f.coeffs[mask] = c;
        f
    }

    pub fn from_coeffs(ambient: &Ambient<T>, coeffs: Vec<Cplx<T>>) -> Result<Self> {
        if coeffs.len() != ambient.size() {
            return Err(GkError::DimensionMismatch(format!(
                "{} coefficients for a {}-dimensional exterior algebra",
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

    /// Coefficient of the volume form.
    pub fn top(&self) -> Cplx<T> {
        self.coeffs[self.ambient.size() - 1]
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.ambient.check(&other.ambient)?;
        let zero = Cplx::new(T::zero(), T::zero());
        let mut out = Self::zero(&self.ambient);
        for (a, ca) in self.coeffs.iter().enumerate() {
            if *ca == zero {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if *cb == zero || a & b != 0 {
                    continue;
                }
                out.coeffs[a | b] += *ca * *cb * T::from_i32(reorder_sign(a, b)).unwrap();
            }
        }
        Ok(out)
    }

    /// `ι_X`, with `e^a(e_b) = δ_ab`.
    pub fn contract(&self, x: &[Cplx<T>]) -> Self {
        let mut out = Self::zero(&self.ambient);
        for (m, c) in self.coeffs.iter().enumerate() {
            for (i, xi) in x.iter().enumerate() {
                if m & (1 << i) != 0 {
                    let s = if bits_below(m, i).is_multiple_of(2) {
                        T::one()
                    } else {
                        -T::one()
                    };
                    out.coeffs[m ^ (1 << i)] += *c * *xi * s;
                }
            }
        }
        out
    }

    /// `ξ ∧`, with `ξ = Σ ξ_a e^a`.
    pub fn covector_wedge(&self, xi: &[Cplx<T>]) -> Self {
        let mut out = Self::zero(&self.ambient);
        for (m, c) in self.coeffs.iter().enumerate() {
            for (i, k) in xi.iter().enumerate() {
                if m & (1 << i) == 0 {
                    let s = if bits_below(m, i).is_multiple_of(2) {
                        T::one()
                    } else {
                        -T::one()
                    };
                    out.coeffs[m | (1 << i)] += *c * *k * s;
                }
            }
        }
        out
    }

    /// `(X + ξ)·Φ = ι_X Φ + ξ ∧ Φ`.
    pub fn act(&self, v: &GenVector<T>) -> Self {
        let a = self.contract(&v.x);
        let b = self.covector_wedge(&v.xi);
        a.zip(&b, |p, q| p + q)
    }

    /// `(−1)^{deg}` on each homogeneous part.
    pub fn parity_twist(&self) -> Self {
        self.map_masks(parity_sign)
    }

    /// Order reversal `(−1)^{k(k−1)/2}` on degree `k`.
    pub fn reverse(&self) -> Self {
        self.map_masks(reversal_sign)
    }

    pub fn scale(&self, c: Cplx<T>) -> Self {
        Self {
            ambient: self.ambient.clone(),
            coeffs: self.coeffs.iter().map(|x| *x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm_sqr().sqrt()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.sub(other).max_abs()
    }

    /// `Σ_A |Φ_A|² / Π_{a∈A} g_aa`, the metric induced from `𝔍`.
    pub fn norm_sqr(&self) -> T {
        self.coeffs.iter().enumerate().fold(T::zero(), |acc, (m, c)| {
            acc + c.norm_sqr() / self.ambient.metric_product(m)
        })
    }

    /// Matrix of a linear operator on forms given by its action on monomials.
    pub fn operator_matrix(ambient: &Ambient<T>, f: impl Fn(&Self) -> Self) -> DMatrix<Cplx<T>> {
        let s = ambient.size();
        let mut out = DMatrix::zeros(s, s);
        for m in 0..s {
            let img = f(&Self::monomial(ambient, m, Cplx::new(T::one(), T::zero())));
            for (r, c) in img.coeffs.iter().enumerate() {
                out[(r, m)] = *c;
            }
        }
        out
    }

    pub fn apply(&self, op: &DMatrix<Cplx<T>>) -> Self {
        let v = nalgebra::DVector::from_column_slice(&self.coeffs);
        Self {
            ambient: self.ambient.clone(),
            coeffs: (op * v).iter().copied().collect(),
        }
    }

    fn map_masks(&self, sign: impl Fn(usize) -> i32) -> Self {
        Self {
            ambient: self.ambient.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| *c * T::from_i32(sign(m)).unwrap())
                .collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(Cplx<T>, Cplx<T>) -> Cplx<T>) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        Self {
            ambient: self.ambient.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

/// Symbol map `Cl(V) → Λ·V*`: `e_{a1}⋯e_{ak} ↦ g(e_{a1})∧⋯∧g(e_{ak})` for
/// orthogonal generators.
pub fn j_iso<T: Real>(a: &CliffordElement<T>) -> FormElement<T> {
    let amb = a.ambient();
    FormElement {
        ambient: amb.clone(),
        coeffs: a
            .coeffs()
            .iter()
            .enumerate()
            .map(|(m, c)| *c * amb.metric_product(m))
            .collect(),
    }
}

/// Inverse of [`j_iso`].
pub fn j_iso_inverse<T: Real>(f: &FormElement<T>) -> CliffordElement<T> {
    let amb = f.ambient();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| *c / amb.metric_product(m))
        .collect();
    CliffordElement::from_coeffs(amb, coeffs).expect("sizes agree")
}

/// `(Φ ∧ reverse(Ψ))_top`.
pub fn chevalley_pairing<T: Real>(phi: &FormElement<T>, psi: &FormElement<T>) -> Result<Cplx<T>> {
    Ok(phi.wedge(&psi.reverse())?.top())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Cplx<f64> {
        Cplx::new(re, 0.0)
    }

    #[test]
    fn symbol_map_examples() {
        let a = Ambient::<f64>::euclidean(1).unwrap();
        let e12 = CliffordElement::monomial(&a, 0b11, c(1.0));
        assert_eq!(j_iso(&e12), FormElement::monomial(&a, 0b11, c(1.0)));
        assert_eq!(j_iso(&CliffordElement::one(&a)), FormElement::monomial(&a, 0, c(1.0)));
        let e1 = CliffordElement::generator(&a, 0);
        let prod = &e1 * &e12;
        assert_eq!(j_iso(&prod), FormElement::monomial(&a, 0b10, c(1.0)));
        let v = GenVector::lift(&a, &[c(1.0), c(0.0)], true);
        assert_eq!(j_iso(&e12).act(&v), j_iso(&prod));
    }

    #[test]
    fn chevalley_examples() {
        let a = Ambient::<f64>::euclidean(1).unwrap();
        let one = FormElement::monomial(&a, 0, c(1.0));
        let vol = FormElement::monomial(&a, 0b11, c(1.0));
        assert_eq!(chevalley_pairing(&vol, &one).unwrap(), c(1.0));
        assert_eq!(chevalley_pairing(&one, &vol).unwrap(), c(-1.0));
        let e1 = FormElement::monomial(&a, 0b01, c(1.0));
        assert_eq!(chevalley_pairing(&e1, &e1).unwrap(), c(0.0));
    }

    #[test]
    fn generalized_action_squares_to_pairing() {
        let a = Ambient::<f64>::euclidean(2).unwrap();
        let v = GenVector {
            x: vec![c(0.3), c(-1.0), c(0.2), c(0.5)],
            xi: vec![c(1.1), c(0.4), c(-0.7), c(0.0)],
        };
        let phi = FormElement::from_coeffs(&a, (0..16).map(|k| Cplx::new(k as f64, 1.0 - k as f64)).collect()).unwrap();
        let twice = phi.act(&v).act(&v);
        assert!(twice.max_abs_diff(&phi.scale(v.pairing())) < 1e-12);
    }
}
