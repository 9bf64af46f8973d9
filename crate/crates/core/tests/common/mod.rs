//! Independent finite-difference oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};
use toric_gk::{
    assemble_frame, guillemin_potential, perturbed_potential, Frame64, Monomial, Params64, Polytope64, Potential64,
};

pub fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_vec(x.to_vec())
}

pub fn anti2(a: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, a, -a, 0.0])
}

pub fn shift(mu: &DVector<f64>, k: usize, h: f64) -> DVector<f64> {
    let mut p = mu.clone();
    p[k] += h;
    p
}

/// Central difference of a matrix-valued function along `μ_k`.
pub fn fd_matrix(f: impl Fn(&DVector<f64>) -> DMatrix<f64>, mu: &DVector<f64>, k: usize, h: f64) -> DMatrix<f64> {
    (f(&shift(mu, k, h)) - f(&shift(mu, k, -h))) / (2.0 * h)
}

pub fn fd_scalar(f: impl Fn(&DVector<f64>) -> f64, mu: &DVector<f64>, k: usize, h: f64) -> f64 {
    (f(&shift(mu, k, h)) - f(&shift(mu, k, -h))) / (2.0 * h)
}

pub fn frame(model: &Potential64, params: &Params64, mu: &DVector<f64>) -> Frame64 {
    assemble_frame(model, params, mu).unwrap()
}

pub fn square() -> Potential64 {
    guillemin_potential(&Polytope64::unit_cube(2).unwrap())
}

pub fn perturbed_square(c: [f64; 4]) -> Potential64 {
    perturbed_potential(
        &square(),
        &[
            Monomial::new(vec![3, 0], c[0]),
            Monomial::new(vec![1, 2], c[1]),
            Monomial::new(vec![2, 2], c[2]),
            Monomial::new(vec![0, 4], c[3]),
        ],
    )
    .unwrap()
}

/// Christoffel symbols `Γ[i][j][k] = Γᵏᵢⱼ` of `∇^{LC} + s·½g⁻¹H`, with every
/// metric and `b` derivative taken by central differences of step `h`.
pub fn fd_christoffel(model: &Potential64, params: &Params64, mu: &DVector<f64>, s: f64, h: f64) -> Vec<Vec<Vec<f64>>> {
    let n = mu.len();
    let m = 2 * n;
    let fr = frame(model, params, mu);
    let gi = fr.g.clone().try_inverse().unwrap();
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|k| fd_matrix(|p| frame(model, params, p).g, mu, k, h))
        .collect();
    let db: Vec<DMatrix<f64>> = (0..n)
        .map(|k| fd_matrix(|p| frame(model, params, p).b, mu, k, h))
        .collect();
    let d = |x: &[DMatrix<f64>], a: usize, b: usize, c: usize| if a >= n { x[a - n][(b, c)] } else { 0.0 };
    let hh = |a: usize, b: usize, c: usize| d(&db, a, b, c) + d(&db, b, c, a) + d(&db, c, a, b);
    let mut out = vec![vec![vec![0.0; m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut acc = 0.0;
                for l in 0..m {
                    let low = 0.5 * (d(&dg, j, i, l) + d(&dg, i, j, l) - d(&dg, l, i, j)) + s * 0.5 * hh(i, j, l);
                    acc += gi[(k, l)] * low;
                }
                out[i][j][k] = acc;
            }
        }
    }
    out
}
