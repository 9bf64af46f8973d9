//! Levi-Civita and Bismut connections in the admissible chart.
//!
//! Christoffel symbols are stored as `Γ[i][j][k] = Γᵏᵢⱼ`, meaning
//! `∇_{e_i} e_j = Σ_k Γᵏᵢⱼ e_k`. Only μ-derivatives of chart data are nonzero.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frame::{frame_derivatives, frame_from_hessian, FrameDerivatives, FrameTensors, GkParams};
use crate::linalg::{guarded_inverse, max_abs};
use crate::potential::{PotentialJet, PotentialModel};
use crate::scalar::{lit, Cplx, Real};

/// Finite-difference step for `∂J` and `dω±`.
pub const STRUCTURE_FD_STEP: f64 = 1e-5;
/// Finite-difference step for `∂Γ` inside curvature tensors.
pub const CURVATURE_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionFlavor {
    LeviCivita,
    BismutPlus,
    BismutMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BismutSign {
    Plus,
    Minus,
}

impl BismutSign {
    pub fn flavor(self) -> ConnectionFlavor {
        match self {
            BismutSign::Plus => ConnectionFlavor::BismutPlus,
            BismutSign::Minus => ConnectionFlavor::BismutMinus,
        }
    }
}

/// Dense `m × m × m` array with row-major layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> Tensor3<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> T {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: T) {
        self.data[(a * self.dim + b) * self.dim + c] = v;
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    /// The `m × m` slice with the first index fixed.
    pub fn slice(&self, a: usize) -> DMatrix<T> {
        DMatrix::from_fn(self.dim, self.dim, |b, c| self.get(a, b, c))
    }

    fn map2(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

/// Connection coefficients of one flavor at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelField<T: Real> {
    pub flavor: ConnectionFlavor,
    pub gamma: Tensor3<T>,
}

impl<T: Real> ChristoffelField<T> {
    /// Matrix `M[j][k] = Γᵏᵢⱼ` for a fixed direction `i`.
    pub fn along(&self, i: usize) -> DMatrix<T> {
        self.gamma.slice(i)
    }

    /// `max |Γᵏᵢⱼ − Γᵏⱼᵢ|`.
    pub fn lower_asymmetry(&self) -> T {
        let m = self.gamma.dim();
        let mut worst = T::zero();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    worst = worst.max((self.gamma.get(i, j, k) - self.gamma.get(j, i, k)).abs());
                }
            }
        }
        worst
    }
}

/// The closed 3-form `H = db`, as components `H(e_a, e_b, e_c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionH<T: Real> {
    pub h: Tensor3<T>,
}

impl<T: Real> TorsionH<T> {
    /// Largest violation of antisymmetry under any transposition.
    pub fn alternation_defect(&self) -> T {
        let m = self.h.dim();
        let mut worst = T::zero();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let v = self.h.get(a, b, c);
                    worst = worst
                        .max((v + self.h.get(b, a, c)).abs())
                        .max((v + self.h.get(a, c, b)).abs())
                        .max((v + self.h.get(c, b, a)).abs());
                }
            }
        }
        worst
    }
}

/// Chart data needed for connection coefficients at one point.
struct Local<T: Real> {
    jet: PotentialJet<T>,
    frame: FrameTensors<T>,
    derivs: FrameDerivatives<T>,
    g_inv: DMatrix<T>,
}

impl<T: Real> Local<T> {
    fn at(model: &PotentialModel<T>, params: &GkParams<T>, mu: &DVector<T>) -> Result<Self> {
        let jet = model.jet(mu)?;
        let frame = frame_from_hessian(&jet.hessian, params, mu)?;
        let derivs = frame_derivatives(&frame, &jet, params);
        let g_inv = guarded_inverse(&frame.g, "metric")?;
        Ok(Self {
            jet,
            frame,
            derivs,
            g_inv,
        })
    }

    fn n(&self) -> usize {
        self.frame.dim()
    }

    /// `∂_a X` for chart index `a`, given μ-derivatives `dx`.
    fn partial<'a>(&self, dx: &'a [DMatrix<T>], a: usize) -> Option<&'a DMatrix<T>> {
        a.checked_sub(self.n()).map(|k| &dx[k])
    }

    fn torsion(&self) -> TorsionH<T> {
        let m = 2 * self.n();
        let db = &self.derivs.d_b;
        let term = |a: usize, b: usize, c: usize| self.partial(db, a).map_or(T::zero(), |d| d[(b, c)]);
        let mut h = Tensor3::zeros(m);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    h.set(a, b, c, term(a, b, c) + term(b, c, a) + term(c, a, b));
                }
            }
        }
        TorsionH { h }
    }

    fn christoffel(&self, flavor: ConnectionFlavor) -> ChristoffelField<T> {
        let m = 2 * self.n();
        let half: T = lit(0.5);
        let dg = &self.derivs.d_metric;
        let dgv = |a: usize, b: usize, c: usize| self.partial(dg, a).map_or(T::zero(), |d| d[(b, c)]);
        let torsion_sign = match flavor {
            ConnectionFlavor::LeviCivita => None,
            ConnectionFlavor::BismutPlus => Some(T::one()),
            ConnectionFlavor::BismutMinus => Some(-T::one()),
        };
        let h = torsion_sign.map(|_| self.torsion());
        let mut gamma = Tensor3::zeros(m);
        for i in 0..m {
            for j in 0..m {
                let lowered: Vec<T> = (0..m)
                    .map(|l| {
                        let mut v = (dgv(j, i, l) + dgv(i, j, l) - dgv(l, i, j)) * half;
                        if let (Some(s), Some(h)) = (torsion_sign, &h) {
                            v += s * half * h.h.get(i, j, l);
                        }
                        v
                    })
                    .collect();
                for k in 0..m {
                    let v = (0..m).fold(T::zero(), |acc, l| acc + self.g_inv[(k, l)] * lowered[l]);
                    gamma.set(i, j, k, v);
                }
            }
        }
        ChristoffelField { flavor, gamma }
    }
}

/// `H = db` computed from analytic μ-derivatives of `b`.
pub fn torsion_h<T: Real>(model: &PotentialModel<T>, params: &GkParams<T>, mu: &DVector<T>) -> Result<TorsionH<T>> {
    Ok(Local::at(model, params, mu)?.torsion())
}

/// Connection coefficients; Bismut flavors are `∇^{LC} ± ½ g⁻¹H`.
pub fn christoffel<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
    flavor: ConnectionFlavor,
) -> Result<ChristoffelField<T>> {
    Ok(Local::at(model, params, mu)?.christoffel(flavor))
}

fn shifted<T: Real>(mu: &DVector<T>, k: usize, h: T) -> DVector<T> {
    let mut p = mu.clone();
    p[k] += h;
    p
}

/// Central difference of a chart-valued function along each `μ_k`.
fn central_diff<T: Real, V>(
    mu: &DVector<T>,
    step: f64,
    f: impl Fn(&DVector<T>) -> Result<V>,
    sub: impl Fn(V, V, T) -> V,
) -> Result<Vec<V>> {
    let h: T = lit(step);
    (0..mu.len())
        .map(|k| Ok(sub(f(&shifted(mu, k, h))?, f(&shifted(mu, k, -h))?, h + h)))
        .collect()
}

fn matrix_fd<T: Real>(
    mu: &DVector<T>,
    step: f64,
    f: impl Fn(&DVector<T>) -> Result<DMatrix<T>>,
) -> Result<Vec<DMatrix<T>>> {
    central_diff(mu, step, f, |a, b, h| (a - b) / h)
}

/// `(∇_i J)` as a column-acting matrix, from analytic `Γ` and the supplied `∂J`.
fn covariant_derivative_of_endomorphism<T: Real>(
    gamma: &ChristoffelField<T>,
    j_cols: &DMatrix<T>,
    d_j_cols: &[DMatrix<T>],
    i: usize,
) -> DMatrix<T> {
    let n = d_j_cols.len();
    let g = gamma.along(i);
    let partial = if i >= n {
        d_j_cols[i - n].clone()
    } else {
        DMatrix::zeros(2 * n, 2 * n)
    };
    partial + g.transpose() * j_cols - j_cols * g.transpose()
}

/// Max-abs residuals of parallel transport identities at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstancyResiduals {
    pub nabla_plus_j_plus: f64,
    pub nabla_minus_j_minus: f64,
    pub nabla_plus_metric: f64,
    pub nabla_minus_metric: f64,
    pub levi_civita_metric: f64,
}

impl ConstancyResiduals {
    pub fn max(&self) -> f64 {
        [
            self.nabla_plus_j_plus,
            self.nabla_minus_j_minus,
            self.nabla_plus_metric,
            self.nabla_minus_metric,
            self.levi_civita_metric,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn metric_residual<T: Real>(local: &Local<T>, gamma: &ChristoffelField<T>) -> T {
    let m = 2 * local.n();
    let g = &local.frame.g;
    let mut worst = T::zero();
    for i in 0..m {
        let gi = gamma.along(i);
        let partial = local
            .partial(&local.derivs.d_metric, i)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(m, m));
        // (∇_i g)_jk = ∂_i g_jk − Γˡᵢⱼ g_lk − Γˡᵢₖ g_jl
        let r = partial - &gi * g - g * gi.transpose();
        worst = worst.max(max_abs(&r));
    }
    worst
}

/// `∇⁺J₊`, `∇⁻J₋` (finite-difference `∂J`) and metricity of all connections.
pub fn covariant_constancy_residuals<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<ConstancyResiduals> {
    let local = Local::at(model, params, mu)?;
    let m = 2 * local.n();
    let plus = local.christoffel(ConnectionFlavor::BismutPlus);
    let minus = local.christoffel(ConnectionFlavor::BismutMinus);
    let lc = local.christoffel(ConnectionFlavor::LeviCivita);
    let frame_at = |p: &DVector<T>| {
        let h = model.hessian(p)?;
        frame_from_hessian(&h, params, p)
    };
    let d_jp = matrix_fd(mu, STRUCTURE_FD_STEP, |p| Ok(frame_at(p)?.j_plus_columns()))?;
    let d_jm = matrix_fd(mu, STRUCTURE_FD_STEP, |p| Ok(frame_at(p)?.j_minus_columns()))?;
    let jp = local.frame.j_plus_columns();
    let jm = local.frame.j_minus_columns();
    let mut rp = T::zero();
    let mut rm = T::zero();
    for i in 0..m {
        rp = rp.max(max_abs(&covariant_derivative_of_endomorphism(&plus, &jp, &d_jp, i)));
        rm = rm.max(max_abs(&covariant_derivative_of_endomorphism(&minus, &jm, &d_jm, i)));
    }
    Ok(ConstancyResiduals {
        nabla_plus_j_plus: rp.to_f64_lossy(),
        nabla_minus_j_minus: rm.to_f64_lossy(),
        nabla_plus_metric: metric_residual(&local, &plus).to_f64_lossy(),
        nabla_minus_metric: metric_residual(&local, &minus).to_f64_lossy(),
        levi_civita_metric: metric_residual(&local, &lc).to_f64_lossy(),
    })
}

/// Covariant curvature `R(X, Y, Z, W) = g(R(X, Y) Z, W)` in the chart basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor<T: Real> {
    dim: usize,
    data: Vec<T>,
    /// Endomorphisms `R(e_i, e_j)` as column-acting matrices.
    endo: Vec<DMatrix<T>>,
}

impl<T: Real> CurvatureTensor<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize, w: usize) -> T {
        let m = self.dim;
        self.data[((x * m + y) * m + z) * m + w]
    }

    /// `R(e_x, e_y)` acting on column vectors.
    pub fn endomorphism(&self, x: usize, y: usize) -> &DMatrix<T> {
        &self.endo[x * self.dim + y]
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Evaluates on arbitrary vectors by multilinearity.
    pub fn eval(&self, x: &DVector<T>, y: &DVector<T>, z: &DVector<T>, w: &DVector<T>) -> T {
        let m = self.dim;
        let mut acc = T::zero();
        for a in 0..m {
            if x[a] == T::zero() {
                continue;
            }
            for b in 0..m {
                if y[b] == T::zero() {
                    continue;
                }
                for c in 0..m {
                    if z[c] == T::zero() {
                        continue;
                    }
                    let xyz = x[a] * y[b] * z[c];
                    for d in 0..m {
                        acc += xyz * w[d] * self.get(a, b, c, d);
                    }
                }
            }
        }
        acc
    }

    /// `max |R(X,Y,Z,W) + R(Y,X,Z,W)|` and `max |R(X,Y,Z,W) + R(X,Y,W,Z)|`.
    pub fn antisymmetry_defects(&self) -> (T, T) {
        let m = self.dim;
        let mut first = T::zero();
        let mut second = T::zero();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let v = self.get(a, b, c, d);
                        first = first.max((v + self.get(b, a, c, d)).abs());
                        second = second.max((v + self.get(a, b, d, c)).abs());
                    }
                }
            }
        }
        (first, second)
    }
}

fn curvature_from<T: Real>(
    gamma: &ChristoffelField<T>,
    d_gamma: &[Tensor3<T>],
    metric: &DMatrix<T>,
) -> CurvatureTensor<T> {
    let m = gamma.gamma.dim();
    let n = d_gamma.len();
    let dg = |a: usize, i: usize, j: usize, k: usize| {
        if a >= n {
            d_gamma[a - n].get(i, j, k)
        } else {
            T::zero()
        }
    };
    let g = &gamma.gamma;
    let mut data = vec![T::zero(); m * m * m * m];
    let mut endo = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            // R(e_i,e_j)e_l = (∂_iΓᵐⱼₗ − ∂_jΓᵐᵢₗ + Γᵖⱼₗ Γᵐᵢₚ − Γᵖᵢₗ Γᵐⱼₚ) e_m
            let r = DMatrix::from_fn(m, m, |mm, l| {
                let mut v = dg(i, j, l, mm) - dg(j, i, l, mm);
                for p in 0..m {
                    v += g.get(j, l, p) * g.get(i, p, mm) - g.get(i, l, p) * g.get(j, p, mm);
                }
                v
            });
            let lowered = metric * &r;
            for l in 0..m {
                for w in 0..m {
                    data[((i * m + j) * m + l) * m + w] = lowered[(w, l)];
                }
            }
            endo.push(r);
        }
    }
    CurvatureTensor { dim: m, data, endo }
}

/// Curvature of `∇^±` from analytic `Γ` and a central difference of `Γ`.
pub fn bismut_curvature<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
    sign: BismutSign,
) -> Result<CurvatureTensor<T>> {
    connection_curvature(model, params, mu, sign.flavor())
}

/// Curvature of any of the three connections.
pub fn connection_curvature<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
    flavor: ConnectionFlavor,
) -> Result<CurvatureTensor<T>> {
    let local = Local::at(model, params, mu)?;
    let gamma = local.christoffel(flavor);
    let d_gamma = central_diff(
        mu,
        CURVATURE_FD_STEP,
        |p| Ok(Local::at(model, params, p)?.christoffel(flavor).gamma),
        |a, b, h| a.map2(&b, |x, y| (x - y) / h),
    )?;
    Ok(curvature_from(&gamma, &d_gamma, &local.frame.g))
}

fn canonical_from<T: Real>(frame: &FrameTensors<T>, r_plus: &CurvatureTensor<T>) -> Result<T> {
    let m = 2 * frame.dim();
    let half: T = lit(0.5);
    let jp = frame.j_plus_columns();
    let jm = frame.j_minus_columns();
    let g_inv = guarded_inverse(&frame.g, "metric")?;
    let rho = DMatrix::from_fn(m, m, |a, c| (&jp * r_plus.endomorphism(a, c)).trace() * half);
    // κ_c = Σ g^{ab} ρ(e_a, J₋ e_b); the sign is fixed by the Kähler case.
    let mut acc = T::zero();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                acc += g_inv[(a, b)] * rho[(a, c)] * jm[(c, b)];
            }
        }
    }
    Ok(acc)
}

/// Trace of the `K₊⁻¹` curvature of `∇⁺` against the `J₋`-Hermitian form.
pub fn canonical_scalar_curvature<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<T> {
    let r = bismut_curvature(model, params, mu, BismutSign::Plus)?;
    let local = Local::at(model, params, mu)?;
    canonical_from(&local.frame, &r)
}

/// Complex chart vector `½(e ∓ i J e)` for a real chart vector `e`.
fn type_projection<T: Real>(j_cols: &DMatrix<T>, e: &DVector<T>, sign: T) -> DVector<Cplx<T>> {
    let half: T = lit(0.5);
    let je = j_cols * e;
    DVector::from_fn(e.len(), |a, _| Cplx::new(e[a] * half, -sign * je[a] * half))
}

fn unit<T: Real>(m: usize, a: usize) -> DVector<T> {
    let mut v = DVector::zeros(m);
    v[a] = T::one();
    v
}

/// `∂_{z_j}` of the `J₊` admissible coordinates: `½(∂θ_j − i J₊ ∂θ_j)`.
pub fn holomorphic_plus<T: Real>(frame: &FrameTensors<T>, j: usize) -> DVector<Cplx<T>> {
    type_projection(&frame.j_plus_columns(), &unit(2 * frame.dim(), j), T::one())
}

/// `∂_{z̄_j}` of the `J₋` admissible coordinates: `½(∂θ_j + i J₋ ∂θ_j)`.
pub fn antiholomorphic_minus<T: Real>(frame: &FrameTensors<T>, j: usize) -> DVector<Cplx<T>> {
    type_projection(&frame.j_minus_columns(), &unit(2 * frame.dim(), j), -T::one())
}

fn complex_bilinear<T: Real>(g: &DMatrix<T>, x: &DVector<Cplx<T>>, y: &DVector<Cplx<T>>) -> Cplx<T> {
    let m = g.nrows();
    let mut acc = Cplx::new(T::zero(), T::zero());
    for a in 0..m {
        for b in 0..m {
            acc += x[a] * y[b] * g[(a, b)];
        }
    }
    acc
}

/// `∇⁺_{e_i} ∂_{z_j}` for each chart direction `i` and each `j`.
fn nabla_holomorphic<T: Real>(frame: &FrameTensors<T>, plus: &ChristoffelField<T>) -> Vec<Vec<DVector<Cplx<T>>>> {
    let m = 2 * frame.dim();
    let n = frame.dim();
    let jp = frame.j_plus_columns();
    (0..m)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let u = DVector::from_fn(m, |k, _| plus.gamma.get(i, j, k));
                    type_projection(&jp, &u, T::one())
                })
                .collect()
        })
        .collect()
}

/// Connection form of `∇⁺` on `K₊⁻¹` in the frame `∂z_1 ∧ … ∧ ∂z_n`, for
/// each real chart direction. Coefficients are read off through the inverse
/// Hermitian Gram matrix `Q`, `Q = [g(∂z_k, ∂z̄_l)]⁻¹`, carried by the frame.
fn connection_form_via_gram<T: Real>(frame: &FrameTensors<T>, plus: &ChristoffelField<T>) -> Vec<Cplx<T>> {
    let m = 2 * frame.dim();
    let n = frame.dim();
    let nab = nabla_holomorphic(frame, plus);
    let zbar: Vec<DVector<Cplx<T>>> = (0..n).map(|l| holomorphic_plus(frame, l).map(|c| c.conj())).collect();
    (0..m)
        .map(|i| {
            let mut acc = Cplx::new(T::zero(), T::zero());
            for j in 0..n {
                for l in 0..n {
                    acc += complex_bilinear(&frame.g, &nab[i][j], &zbar[l]) * frame.q[(l, j)];
                }
            }
            acc
        })
        .collect()
}

/// Same connection form by decomposing `∇⁺ ∂z_j` directly in the real basis
/// `{∂θ_m, J₊∂θ_m}`. Used to cross-check the Gram route.
pub fn connection_form_direct<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<Vec<Cplx<T>>> {
    let local = Local::at(model, params, mu)?;
    let frame = &local.frame;
    let plus = local.christoffel(ConnectionFlavor::BismutPlus);
    let n = frame.dim();
    let m = 2 * n;
    let jp = frame.j_plus_columns();
    let mut basis = DMatrix::<T>::zeros(m, m);
    for k in 0..n {
        basis[(k, k)] = T::one();
        basis.set_column(n + k, &jp.column(k));
    }
    let lu = basis.lu();
    Ok((0..m)
        .map(|i| {
            let mut acc = Cplx::new(T::zero(), T::zero());
            for j in 0..n {
                let u = DVector::from_fn(m, |k, _| plus.gamma.get(i, j, k));
                let coef = lu.solve(&u).unwrap_or_else(|| DVector::zeros(m));
                acc += Cplx::new(coef[j], coef[n + j]);
            }
            acc
        })
        .collect())
}

/// `∂_{μ_p} log ε` for `ε = [det(φ_s Ξ)/(det φ)²]^{-1/2}`.
fn log_epsilon_gradient<T: Real>(jet: &PotentialJet<T>, frame: &FrameTensors<T>, f: &DMatrix<T>) -> Result<DVector<T>> {
    let n = frame.dim();
    let s_inv = guarded_inverse(&frame.phi_s, "phi_s")?;
    let xi_inv = guarded_inverse(&frame.xi, "xi")?;
    let quarter: T = lit(0.25);
    let half: T = lit(0.5);
    Ok(DVector::from_fn(n, |p, _| {
        let sp = &jet.third[p];
        let dxi = sp - f * (&s_inv * sp * &s_inv) * f * quarter;
        let tr = |a: &DMatrix<T>, b: &DMatrix<T>| (a * b).trace();
        -(tr(&s_inv, sp) + tr(&xi_inv, &dxi)) * half + tr(&frame.phi_inv, sp)
    }))
}

fn epsilon_residual_from<T: Real>(frame: &FrameTensors<T>, sigma: &[Cplx<T>], dlog_eps: &DVector<T>) -> T {
    let n = frame.dim();
    let mut worst = T::zero();
    for k in 0..n {
        let x = antiholomorphic_minus(frame, k);
        let mut v = Cplx::new(T::zero(), T::zero());
        for (a, s) in sigma.iter().enumerate() {
            v += x[a] * *s;
        }
        for p in 0..n {
            v += x[n + p] * dlog_eps[p];
        }
        worst = worst.max(v.norm_sqr().sqrt());
    }
    worst
}

/// `max_k |σ(∂_{z̄_k⁻}) + ∂_{z̄_k⁻} log ε|`, with `σ` the `∇⁺` connection form
/// on `K₊⁻¹`. Vanishes when `ε s₀` is a `J₋`-holomorphic section.
pub fn epsilon_section_residual<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<T> {
    let local = Local::at(model, params, mu)?;
    let plus = local.christoffel(ConnectionFlavor::BismutPlus);
    let sigma = connection_form_via_gram(&local.frame, &plus);
    let dle = log_epsilon_gradient(&local.jet, &local.frame, params.f())?;
    Ok(epsilon_residual_from(&local.frame, &sigma, &dle))
}

/// Same residual with the connection form from [`connection_form_direct`].
pub fn epsilon_section_residual_direct<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<T> {
    let local = Local::at(model, params, mu)?;
    let sigma = connection_form_direct(model, params, mu)?;
    let dle = log_epsilon_gradient(&local.jet, &local.frame, params.f())?;
    Ok(epsilon_residual_from(&local.frame, &sigma, &dle))
}

/// `ω±(X, Y) = g(J± X, Y)` as a form matrix.
fn fundamental_forms<T: Real>(frame: &FrameTensors<T>) -> (DMatrix<T>, DMatrix<T>) {
    (&frame.j_plus * &frame.g, &frame.j_minus * &frame.g)
}

fn exterior_derivative_2form<T: Real>(d_form: &[DMatrix<T>], m: usize) -> Tensor3<T> {
    let n = d_form.len();
    let term = |a: usize, b: usize, c: usize| if a >= n { d_form[a - n][(b, c)] } else { T::zero() };
    let mut out = Tensor3::zeros(m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                out.set(a, b, c, term(a, b, c) + term(b, c, a) + term(c, a, b));
            }
        }
    }
    out
}

/// `dω(J·, J·, J·)` with `J` in row layout.
fn twist<T: Real>(d_omega: &Tensor3<T>, j_rows: &DMatrix<T>) -> Tensor3<T> {
    let m = d_omega.dim();
    let mut step1 = Tensor3::zeros(m);
    for a in 0..m {
        for q in 0..m {
            for r in 0..m {
                let v = (0..m).fold(T::zero(), |acc, p| acc + j_rows[(a, p)] * d_omega.get(p, q, r));
                step1.set(a, q, r, v);
            }
        }
    }
    let mut step2 = Tensor3::zeros(m);
    for a in 0..m {
        for b in 0..m {
            for r in 0..m {
                let v = (0..m).fold(T::zero(), |acc, q| acc + j_rows[(b, q)] * step1.get(a, q, r));
                step2.set(a, b, r, v);
            }
        }
    }
    let mut out = Tensor3::zeros(m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let v = (0..m).fold(T::zero(), |acc, r| acc + j_rows[(c, r)] * step2.get(a, b, r));
                out.set(a, b, c, v);
            }
        }
    }
    out
}

/// Residuals of the integrability relations between `H` and `d^c_± ω_±`,
/// where `d^c ω = −dω(J·, J·, J·)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegrabilityResiduals {
    /// `max |d^c₊ω₊ + d^c₋ω₋|`.
    pub dc_sum: f64,
    /// `max |H + d^c₊ω₊|`.
    pub torsion_plus: f64,
    /// `max |H − d^c₋ω₋|`.
    pub torsion_minus: f64,
}

pub fn integrability_residuals<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<IntegrabilityResiduals> {
    let local = Local::at(model, params, mu)?;
    let m = 2 * local.n();
    let frame_at = |p: &DVector<T>| {
        let h = model.hessian(p)?;
        frame_from_hessian(&h, params, p)
    };
    let d_wp = matrix_fd(mu, STRUCTURE_FD_STEP, |p| Ok(fundamental_forms(&frame_at(p)?).0))?;
    let d_wm = matrix_fd(mu, STRUCTURE_FD_STEP, |p| Ok(fundamental_forms(&frame_at(p)?).1))?;
    let neg = |t: Tensor3<T>| t.map2(&Tensor3::zeros(m), |a, _| -a);
    let dc_plus = neg(twist(&exterior_derivative_2form(&d_wp, m), &local.frame.j_plus));
    let dc_minus = neg(twist(&exterior_derivative_2form(&d_wm, m), &local.frame.j_minus));
    let h = local.torsion().h;
    let zero = Tensor3::zeros(m);
    let sum = dc_plus.map2(&dc_minus, |a, b| a + b);
    let hp = h.map2(&dc_plus, |a, b| a + b);
    let hm = h.map2(&dc_minus, |a, b| a - b);
    Ok(IntegrabilityResiduals {
        dc_sum: sum.max_abs_diff(&zero).to_f64_lossy(),
        torsion_plus: hp.max_abs_diff(&zero).to_f64_lossy(),
        torsion_minus: hm.max_abs_diff(&zero).to_f64_lossy(),
    })
}

/// Everything the connection layer can verify at one point.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectionReport {
    pub mu: Vec<f64>,
    pub constancy: ConstancyResiduals,
    pub integrability: IntegrabilityResiduals,
    pub torsion_alternation: f64,
    /// `max |R⁺(X,Y,Z,W) − R⁻(Z,W,X,Y)|`.
    pub pair_symmetry: f64,
    /// `max |R⁺(J₋X, J₋Y, Z, W) − R⁺(X,Y,Z,W)|`.
    pub j_minus_invariance: f64,
    /// Antisymmetry of `R⁺` in its first and in its last pair.
    pub curvature_antisymmetry: f64,
    pub canonical_scalar_curvature: f64,
    pub epsilon_residual: f64,
}

/// `max |R⁺(X,Y,Z,W) − R⁻(Z,W,X,Y)|` over basis vectors.
pub fn pair_symmetry_defect<T: Real>(r_plus: &CurvatureTensor<T>, r_minus: &CurvatureTensor<T>) -> T {
    let m = r_plus.dim();
    let mut worst = T::zero();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    worst = worst.max((r_plus.get(a, b, c, d) - r_minus.get(c, d, a, b)).abs());
                }
            }
        }
    }
    worst
}

/// `max |R(JX, JY, Z, W) − R(X,Y,Z,W)|` over basis vectors, `J` column-acting.
pub fn first_pair_invariance_defect<T: Real>(r: &CurvatureTensor<T>, j_cols: &DMatrix<T>) -> T {
    let m = r.dim();
    let mut worst = T::zero();
    for a in 0..m {
        let ja = j_cols.column(a).into_owned();
        for b in 0..m {
            let jb = j_cols.column(b).into_owned();
            for c in 0..m {
                for d in 0..m {
                    let v = r.eval(&ja, &jb, &unit(m, c), &unit(m, d));
                    worst = worst.max((v - r.get(a, b, c, d)).abs());
                }
            }
        }
    }
    worst
}

pub fn connection_report<T: Real>(
    model: &PotentialModel<T>,
    params: &GkParams<T>,
    mu: &DVector<T>,
) -> Result<ConnectionReport> {
    let local = Local::at(model, params, mu)?;
    let constancy = covariant_constancy_residuals(model, params, mu)?;
    let integrability = integrability_residuals(model, params, mu)?;
    let r_plus = bismut_curvature(model, params, mu, BismutSign::Plus)?;
    let r_minus = bismut_curvature(model, params, mu, BismutSign::Minus)?;
    let (a1, a2) = r_plus.antisymmetry_defects();
    Ok(ConnectionReport {
        mu: crate::linalg::point_f64(mu),
        constancy,
        integrability,
        torsion_alternation: local.torsion().alternation_defect().to_f64_lossy(),
        pair_symmetry: pair_symmetry_defect(&r_plus, &r_minus).to_f64_lossy(),
        j_minus_invariance: first_pair_invariance_defect(&r_plus, &local.frame.j_minus_columns()).to_f64_lossy(),
        curvature_antisymmetry: a1.max(a2).to_f64_lossy(),
        canonical_scalar_curvature: canonical_from(&local.frame, &r_plus)?.to_f64_lossy(),
        epsilon_residual: epsilon_section_residual(model, params, mu)?.to_f64_lossy(),
    })
}
