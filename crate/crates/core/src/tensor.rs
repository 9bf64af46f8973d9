//! Dense derivative tensors of shape `n^order`.

use crate::scalar::Real;

/// Row-major tensor with `order` indices each ranging over `0..dim`.
///
/// Derivative tensors of the symplectic potential are fully symmetric; the
/// storage does not exploit that so that symmetry can be asserted.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor<T> {
    dim: usize,
    order: usize,
    data: Vec<T>,
}

impl<T: Real> SymTensor<T> {
    pub fn zeros(dim: usize, order: usize) -> Self {
        Self {
            dim,
            order,
            data: vec![T::zero(); dim.pow(order as u32)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.order, "tensor index has wrong arity");
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: T) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Scalar value of an order-0 tensor.
    pub fn scalar(&self) -> T {
        self.data[0]
    }

    /// All multi-indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.data.len()).map(move |mut flat| {
            let mut idx = vec![0; self.order];
            for slot in idx.iter_mut().rev() {
                *slot = flat % self.dim;
                flat /= self.dim;
            }
            idx
        })
    }

    /// Largest deviation between an entry and any permutation of its indices.
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for idx in self.indices() {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            worst = worst.max((self.get(&idx) - self.get(&sorted)).abs());
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, x| a.max(x.abs()))
    }

    pub(crate) fn from_fn(dim: usize, order: usize, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let mut t = Self::zeros(dim, order);
        let idx: Vec<Vec<usize>> = t.indices().collect();
        for (k, i) in idx.iter().enumerate() {
            t.data[k] = f(i);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_layout() {
        let t = SymTensor::<f64>::from_fn(3, 2, |i| (i[0] * 10 + i[1]) as f64);
        assert_eq!(t.get(&[2, 1]), 21.0);
        assert_eq!(t.data()[7], 21.0);
        assert_eq!(t.symmetry_defect(), 18.0);
    }
}
