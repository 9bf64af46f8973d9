//! Moment polytopes `P = { μ : ⟨ν_k, μ⟩ − c_k ≥ 0 }` and interior sampling grids.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{GkError, Result};
use crate::scalar::{lit, Real};

/// One affine inequality `ℓ(μ) = ⟨normal, μ⟩ − offset ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet<T: Real> {
    pub normal: DVector<T>,
    pub offset: T,
}

impl<T: Real> Facet<T> {
    pub fn new(normal: Vec<T>, offset: T) -> Self {
        Self {
            normal: DVector::from_vec(normal),
            offset,
        }
    }

    #[inline]
    pub fn eval(&self, mu: &DVector<T>) -> T {
        self.normal.dot(mu) - self.offset
    }
}

/// A bounded polytope with nonempty interior.
///
/// Validity is established once at construction by linear programs along
/// `±e_i` (bounding box) and a Chebyshev-ball program (inradius).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentPolytope<T: Real> {
    dim: usize,
    facets: Vec<Facet<T>>,
    lower: DVector<T>,
    upper: DVector<T>,
    inradius: T,
    center: DVector<T>,
}

fn lp_free_vars(problem: &mut Problem, obj: &[f64]) -> Vec<minilp::Variable> {
    obj.iter()
        .map(|&c| problem.add_var(c, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect()
}

impl<T: Real> MomentPolytope<T> {
    pub fn new(dim: usize, facets: Vec<Facet<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(GkError::InvalidPolytope("dimension must be at least 1".into()));
        }
        for (k, f) in facets.iter().enumerate() {
            if f.normal.len() != dim {
                return Err(GkError::InvalidPolytope(format!(
                    "facet {k} has a normal of length {} (expected {dim})",
                    f.normal.len()
                )));
            }
            if f.normal.iter().all(|x| *x == T::zero()) {
                return Err(GkError::InvalidPolytope(format!("facet {k} has a zero normal")));
            }
        }
        let normals: Vec<Vec<f64>> = facets
            .iter()
            .map(|f| f.normal.iter().map(|x| x.to_f64_lossy()).collect())
            .collect();
        let offsets: Vec<f64> = facets.iter().map(|f| f.offset.to_f64_lossy()).collect();

        let mut lower = DVector::zeros(dim);
        let mut upper = DVector::zeros(dim);
        for axis in 0..dim {
            for (dir, slot) in [
                (OptimizationDirection::Minimize, 0),
                (OptimizationDirection::Maximize, 1),
            ] {
                let mut p = Problem::new(dir);
                let mut obj = vec![0.0; dim];
                obj[axis] = 1.0;
                let vars = lp_free_vars(&mut p, &obj);
                for (nk, ck) in normals.iter().zip(&offsets) {
                    let expr: Vec<_> = vars.iter().copied().zip(nk.iter().copied()).collect();
                    p.add_constraint(expr.as_slice(), ComparisonOp::Ge, *ck);
                }
                match p.solve() {
                    Ok(sol) if !sol.objective().is_finite() => {
                        return Err(GkError::InvalidPolytope(format!(
                            "unbounded along coordinate axis {axis}"
                        )))
                    }
                    Ok(sol) => {
                        if slot == 0 {
                            lower[axis] = lit(sol.objective());
                        } else {
                            upper[axis] = lit(sol.objective());
                        }
                    }
                    Err(minilp::Error::Unbounded) => {
                        return Err(GkError::InvalidPolytope(format!(
                            "unbounded along coordinate axis {axis}"
                        )))
                    }
                    Err(minilp::Error::Infeasible) => return Err(GkError::InvalidPolytope("empty polytope".into())),
                }
            }
        }

        // Chebyshev ball: maximize r subject to ⟨ν_k, μ⟩ − r|ν_k| ≥ c_k.
        let mut p = Problem::new(OptimizationDirection::Maximize);
        let vars = lp_free_vars(&mut p, &vec![0.0; dim]);
        let r = p.add_var(1.0, (0.0, f64::INFINITY));
        for (nk, ck) in normals.iter().zip(&offsets) {
            let norm = nk.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut expr: Vec<_> = vars.iter().copied().zip(nk.iter().copied()).collect();
            expr.push((r, -norm));
            p.add_constraint(expr.as_slice(), ComparisonOp::Ge, *ck);
        }
        let sol = p
            .solve()
            .map_err(|e| GkError::InvalidPolytope(format!("inradius program failed: {e}")))?;
        let inradius = sol[r];
        if !(inradius > 1e-12) {
            return Err(GkError::InvalidPolytope("interior is empty".into()));
        }
        let center = DVector::from_iterator(dim, vars.iter().map(|v| lit::<T>(sol[*v])));

        Ok(Self {
            dim,
            facets,
            lower,
            upper,
            inradius: lit(inradius),
            center,
        })
    }

    /// The interval `[a, b]`.
    pub fn interval(a: T, b: T) -> Result<Self> {
        Self::new(1, vec![Facet::new(vec![T::one()], a), Facet::new(vec![-T::one()], -b)])
    }

    /// The unit cube `[0, 1]^n`.
    pub fn unit_cube(n: usize) -> Result<Self> {
        let mut facets = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            facets.push(Facet::new(e.clone(), T::zero()));
            facets.push(Facet::new(e.iter().map(|x| -*x).collect(), -T::one()));
        }
        Self::new(n, facets)
    }

    /// The standard simplex `{ μ ≥ 0, Σ μ_i ≤ 1 }`.
    pub fn standard_simplex(n: usize) -> Result<Self> {
        let mut facets: Vec<Facet<T>> = (0..n)
            .map(|i| {
                let mut e = vec![T::zero(); n];
                e[i] = T::one();
                Facet::new(e, T::zero())
            })
            .collect();
        facets.push(Facet::new(vec![-T::one(); n], -T::one()));
        Self::new(n, facets)
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let n = self.dim + other.dim;
        let mut facets = Vec::new();
        for f in &self.facets {
            let mut v = f.normal.iter().copied().collect::<Vec<_>>();
            v.resize(n, T::zero());
            facets.push(Facet::new(v, f.offset));
        }
        for f in &other.facets {
            let mut v = vec![T::zero(); self.dim];
            v.extend(f.normal.iter().copied());
            facets.push(Facet::new(v, f.offset));
        }
        Self::new(n, facets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet<T>] {
        &self.facets
    }

    pub fn inradius(&self) -> T {
        self.inradius
    }

    pub fn chebyshev_center(&self) -> &DVector<T> {
        &self.center
    }

    pub fn bounding_box(&self) -> (&DVector<T>, &DVector<T>) {
        (&self.lower, &self.upper)
    }

    /// Values `ℓ_k(μ)` of every facet function.
    pub fn facet_values(&self, mu: &DVector<T>) -> Vec<T> {
        self.facets.iter().map(|f| f.eval(mu)).collect()
    }

    /// Fails with the first facet that is not strictly positive at `mu`.
    pub fn check_interior(&self, mu: &DVector<T>) -> Result<()> {
        if mu.len() != self.dim {
            return Err(GkError::DimensionMismatch(format!(
                "point has {} coordinates, polytope has dimension {}",
                mu.len(),
                self.dim
            )));
        }
        for (k, f) in self.facets.iter().enumerate() {
            let v = f.eval(mu);
            if !(v > T::zero()) {
                return Err(GkError::OutsideInterior {
                    point: mu.iter().map(|x| x.to_f64_lossy()).collect(),
                    facet: k,
                    value: v.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    pub fn contains_interior(&self, mu: &DVector<T>) -> bool {
        self.check_interior(mu).is_ok()
    }
}

/// Tensor-product sampling grid kept a margin away from `∂P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: usize,
    pub margin: f64,
}

impl GridSpec {
    pub fn new(resolution: usize, margin: f64) -> Result<Self> {
        let spec = Self { resolution, margin };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 {
            return Err(GkError::InvalidGrid("resolution must be positive".into()));
        }
        if !(self.margin > 0.0 && self.margin < 0.5) {
            return Err(GkError::InvalidGrid(format!(
                "margin {} is outside (0, 0.5)",
                self.margin
            )));
        }
        Ok(())
    }
}

/// Lexicographic tensor grid over the bounding box, inset on each axis by
/// `margin × extent`, keeping only points with `ℓ_k(μ) ≥ margin × inradius`.
/// The first coordinate varies slowest.
pub fn interior_grid<T: Real>(polytope: &MomentPolytope<T>, spec: &GridSpec) -> Result<Vec<DVector<T>>> {
    spec.validate()?;
    let n = polytope.dim();
    let margin: T = lit(spec.margin);
    let (lo, hi) = polytope.bounding_box();
    let axes: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let extent = hi[i] - lo[i];
            let a = lo[i] + margin * extent;
            let b = hi[i] - margin * extent;
            if spec.resolution == 1 {
                vec![(a + b) * lit(0.5)]
            } else {
                let steps: T = lit((spec.resolution - 1) as f64);
                (0..spec.resolution)
                    .map(|j| a + (b - a) * lit::<T>(j as f64) / steps)
                    .collect()
            }
        })
        .collect();
    let floor = margin * polytope.inradius();
    let total = spec.resolution.pow(n as u32);
    let mut out = Vec::new();
    for flat in 0..total {
        let mut rem = flat;
        let mut coords = vec![T::zero(); n];
        for i in (0..n).rev() {
            coords[i] = axes[i][rem % spec.resolution];
            rem /= spec.resolution;
        }
        let mu = DVector::from_vec(coords);
        if polytope.facets().iter().all(|f| f.eval(&mu) >= floor) {
            out.push(mu);
        }
    }
    if out.is_empty() {
        return Err(GkError::GridTooCoarse);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_grid_is_evenly_spaced() {
        let p = MomentPolytope::<f64>::interval(0.0, 1.0).unwrap();
        assert!((p.inradius() - 0.5).abs() < 1e-12);
        let grid = interior_grid(&p, &GridSpec::new(5, 0.1).unwrap()).unwrap();
        let xs: Vec<f64> = grid.iter().map(|m| m[0]).collect();
        let expect = [0.1, 0.3, 0.5, 0.7, 0.9];
        assert_eq!(xs.len(), 5);
        for (x, e) in xs.iter().zip(expect) {
            assert!((x - e).abs() < 1e-15);
        }
    }

    #[test]
    fn square_grid_has_nine_points_in_lex_order() {
        let p = MomentPolytope::<f64>::unit_cube(2).unwrap();
        let grid = interior_grid(&p, &GridSpec::new(3, 0.1).unwrap()).unwrap();
        assert_eq!(grid.len(), 9);
        assert_eq!((grid[1][0], grid[1][1]), (0.1, 0.5));
        assert_eq!((grid[3][0], grid[3][1]), (0.5, 0.1));
    }

    #[test]
    fn simplex_with_large_margin_is_too_coarse() {
        let p = MomentPolytope::<f64>::standard_simplex(2).unwrap();
        let err = interior_grid(&p, &GridSpec::new(3, 0.45).unwrap()).unwrap_err();
        assert_eq!(err, GkError::GridTooCoarse);
    }

    #[test]
    fn grid_respects_margin_floor() {
        let p = MomentPolytope::<f64>::standard_simplex(2).unwrap();
        let spec = GridSpec::new(9, 0.1).unwrap();
        let floor = 0.1 * p.inradius();
        for mu in interior_grid(&p, &spec).unwrap() {
            assert!(p.facet_values(&mu).iter().all(|v| *v >= floor));
        }
    }

    #[test]
    fn rejects_unbounded_and_empty() {
        let half = MomentPolytope::<f64>::new(1, vec![Facet::new(vec![1.0], 0.0)]);
        assert!(matches!(half, Err(GkError::InvalidPolytope(_))));
        let empty = MomentPolytope::<f64>::interval(1.0, 0.0);
        assert!(matches!(empty, Err(GkError::InvalidPolytope(_))));
        let flat = MomentPolytope::<f64>::interval(0.5, 0.5);
        assert!(matches!(flat, Err(GkError::InvalidPolytope(_))));
        let strip = MomentPolytope::<f64>::new(
            2,
            vec![
                Facet::new(vec![1.0, 0.0], 0.0),
                Facet::new(vec![-1.0, 0.0], -1.0),
                Facet::new(vec![0.0, 1.0], 0.0),
            ],
        );
        assert!(matches!(strip, Err(GkError::InvalidPolytope(_))));
        let zero = MomentPolytope::<f64>::new(1, vec![Facet::new(vec![0.0], 0.0)]);
        assert!(matches!(zero, Err(GkError::InvalidPolytope(_))));
        assert!(matches!(
            MomentPolytope::<f64>::new(0, vec![]),
            Err(GkError::InvalidPolytope(_))
        ));
    }

    #[test]
    fn invalid_grid_specs() {
        assert!(GridSpec::new(0, 0.1).is_err());
        assert!(GridSpec::new(3, 0.5).is_err());
        assert!(GridSpec::new(3, 0.0).is_err());
    }

    #[test]
    fn interior_check_reports_facet() {
        let p = MomentPolytope::<f64>::interval(0.0, 1.0).unwrap();
        let err = p.check_interior(&DVector::from_vec(vec![1.0])).unwrap_err();
        assert!(matches!(err, GkError::OutsideInterior { facet: 1, .. }));
    }
}
