//! Randomized verification of every Clifford/spinor identity, returning a
//! structured report.

use nalgebra::DMatrix;
use serde::Serialize;

use super::algebra::{Ambient, CliffordElement};
use super::bispinor::{annihilator_residual, bispinor_to_form, intertwiner_p, trace_metrics};
use super::forms::{chevalley_pairing, j_iso, j_iso_inverse, FormElement, GenVector};
use super::spinor::SpinorModel;
use crate::error::Result;
use crate::sampling::{
    random_clifford, random_complex, random_complex_structure, random_real_vector, random_spinor, seeded, SampleRng,
};

#[derive(Debug, Clone, Serialize)]
pub struct SelfTestCheck {
    pub name: String,
    pub n: usize,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<SelfTestCheck>,
    pub passed: bool,
}

impl SelfTestReport {
    pub fn failures(&self) -> impl Iterator<Item = &SelfTestCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str, n: usize) -> Option<&SelfTestCheck> {
        self.checks.iter().find(|c| c.name == name && c.n == n)
    }
}

type C = num_complex::Complex<f64>;

fn cabs(c: C) -> f64 {
    c.norm()
}

fn mat_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().fold(0.0, |m, c| m.max(c.norm()))
}

struct Run<'a> {
    rng: SampleRng,
    amb: Ambient<f64>,
    model: SpinorModel<f64>,
    other: SpinorModel<f64>,
    samples: usize,
    out: &'a mut Vec<SelfTestCheck>,
}

impl Run<'_> {
    fn record(&mut self, name: &str, value: f64, tolerance: f64) {
        self.out.push(SelfTestCheck {
            name: name.to_string(),
            n: self.amb.n(),
            value,
            tolerance,
            passed: value.is_finite() && value <= tolerance,
        });
    }

    fn worst(&mut self, mut f: impl FnMut(&mut Self) -> Result<f64>) -> Result<f64> {
        let mut w = 0.0f64;
        for _ in 0..self.samples {
            w = w.max(f(self)?);
        }
        Ok(w)
    }

    fn all(&mut self) -> Result<()> {
        let amb = self.amb.clone();
        let m = amb.dim();
        let pow = (1usize << amb.n()) as f64;

        let mut gen = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                let ea = CliffordElement::generator(&amb, a);
                let eb = CliffordElement::generator(&amb, b);
                let lhs = &(&ea * &eb) + &(&eb * &ea);
                let g = if a == b { 2.0 * amb.metric()[a] } else { 0.0 };
                gen = gen.max(lhs.max_abs_diff(&CliffordElement::scalar(&amb, C::new(g, 0.0))));
            }
        }
        self.record("generator_relation", gen, 0.0);

        let v = self.worst(|s| {
            let a = random_clifford(&mut s.rng, &s.amb);
            let b = random_clifford(&mut s.rng, &s.amb);
            let c = random_clifford(&mut s.rng, &s.amb);
            Ok((&(&a * &b) * &c).max_abs_diff(&(&a * &(&b * &c))))
        })?;
        self.record("associativity", v, 1e-12);

        let v = self.worst(|s| {
            let a = random_clifford(&mut s.rng, &s.amb);
            Ok(j_iso_inverse(&j_iso(&a)).max_abs_diff(&a))
        })?;
        self.record("symbol_map_bijective", v, 1e-14);

        let v = self.worst(|s| {
            let a = random_clifford(&mut s.rng, &s.amb);
            let x = random_real_vector(&mut s.rng, m);
            let vx = CliffordElement::vector(&s.amb, &x)?;
            let lhs = j_iso(&(&vx * &a));
            let rhs = j_iso(&a).act(&GenVector::lift(&s.amb, &x, true));
            Ok(lhs.max_abs_diff(&rhs))
        })?;
        self.record("symbol_map_left_action", v, 1e-12);

        let v = self.worst(|s| {
            let a = random_clifford(&mut s.rng, &s.amb);
            let b = random_clifford(&mut s.rng, &s.amb);
            let lhs = s.model.representation(&(&a * &b))?;
            let rhs = s.model.representation(&a)? * s.model.representation(&b)?;
            Ok(mat_diff(&lhs, &rhs))
        })?;
        self.record("representation_multiplicative", v, 1e-11);

        let v = self.worst(|s| {
            let x = random_real_vector(&mut s.rng, m);
            let r = s.model.vector_action(&x);
            let g: f64 = x.iter().zip(s.amb.metric()).map(|(c, g)| c.re * c.re * g).sum();
            let d = s.model.dim();
            Ok(mat_diff(&(&r * &r), &(DMatrix::identity(d, d) * C::new(g, 0.0))))
        })?;
        self.record("vector_square", v, 1e-12);

        let v = self.worst(|s| {
            let a = random_clifford(&mut s.rng, &s.amb);
            let phi = random_spinor(&mut s.rng, &s.model);
            let psi = random_spinor(&mut s.rng, &s.model);
            let lhs = s.model.hermitian(&s.model.act(&a, &phi)?, &psi)?;
            let rhs = s.model.hermitian(&phi, &s.model.act(&a.dagger(), &psi)?)?;
            Ok(cabs(lhs - rhs))
        })?;
        self.record("hermitian_adjoint", v, 1e-11);

        let v = self.worst(|s| {
            let a = random_clifford(&mut s.rng, &s.amb);
            let phi = random_spinor(&mut s.rng, &s.model);
            let th = random_spinor(&mut s.rng, &s.model);
            let lhs = s.model.pairing_q(&s.model.act(&a, &phi)?, &th)?;
            let rhs = s.model.pairing_q(&phi, &s.model.act(&a.reverse(), &th)?)?;
            Ok(cabs(lhs - rhs))
        })?;
        self.record("pairing_adjunction", v, 1e-11);

        let v = self.worst(|s| {
            let phi = random_spinor(&mut s.rng, &s.model);
            let pc = s.model.charge_conjugate(&phi)?;
            Ok(cabs(s.model.hermitian(&pc, &pc)? - s.model.hermitian(&phi, &phi)?))
        })?;
        self.record("charge_conjugate_isometry", v, 1e-12);

        let v = self.worst(|s| {
            let phi = random_spinor(&mut s.rng, &s.model);
            let lhs = s.model.charge_conjugate(&phi.scale(C::new(0.0, 1.0)))?;
            let rhs = s.model.charge_conjugate(&phi)?.scale(C::new(0.0, -1.0));
            Ok(lhs.max_abs_diff(&rhs))
        })?;
        self.record("charge_conjugate_antilinear", v, 1e-14);

        let v = self.worst(|s| {
            let phi = random_spinor(&mut s.rng, &s.model);
            let psi = random_spinor(&mut s.rng, &s.model);
            let x = random_real_vector(&mut s.rng, m);
            let vx = CliffordElement::vector(&s.amb, &x)?;
            let lhs = bispinor_to_form(&s.model, &s.model.act(&vx, &phi)?, &psi)?;
            let rhs = bispinor_to_form(&s.model, &phi, &psi)?.act(&GenVector::lift(&s.amb, &x, true));
            Ok(lhs.max_abs_diff(&rhs))
        })?;
        self.record("bispinor_left_action", v, 1e-12);

        let v = self.worst(|s| {
            let phi = random_spinor(&mut s.rng, &s.model);
            let psi = random_spinor(&mut s.rng, &s.model);
            let x = random_real_vector(&mut s.rng, m);
            let vx = CliffordElement::vector(&s.amb, &x)?;
            let lhs = bispinor_to_form(&s.model, &phi, &s.model.act(&vx, &psi)?)?;
            let rhs = bispinor_to_form(&s.model, &phi, &psi)?
                .parity_twist()
                .act(&GenVector::lift(&s.amb, &x, false))
                .scale(C::new(-1.0, 0.0));
            Ok(lhs.max_abs_diff(&rhs))
        })?;
        self.record("bispinor_right_action", v, 1e-12);

        let v = self.worst(|s| {
            let phi = random_spinor(&mut s.rng, &s.model);
            let psi = random_spinor(&mut s.rng, &s.model);
            let x = random_real_vector(&mut s.rng, m);
            let y = random_real_vector(&mut s.rng, m);
            let vx = CliffordElement::vector(&s.amb, &x)?;
            let vy = CliffordElement::vector(&s.amb, &y)?;
            let lhs = bispinor_to_form(&s.model, &s.model.act(&vx, &phi)?, &s.model.act(&vy, &psi)?)?;
            let rhs = bispinor_to_form(&s.model, &phi, &psi)?
                .parity_twist()
                .act(&GenVector::lift(&s.amb, &y, false))
                .scale(C::new(-1.0, 0.0))
                .act(&GenVector::lift(&s.amb, &x, true));
            Ok(lhs.max_abs_diff(&rhs))
        })?;
        self.record("graded_tensor_action", v, 1e-12);

        let v = self.worst(|s| {
            let phi = random_spinor(&mut s.rng, &s.model);
            let psi = random_spinor(&mut s.rng, &s.model);
            let f = bispinor_to_form(&s.model, &phi, &psi)?;
            let lhs = pow * f.norm_sqr();
            let rhs = s.model.hermitian(&phi, &phi)?.re * s.model.hermitian(&psi, &psi)?.re;
            Ok((lhs - rhs).abs() / rhs.max(1.0))
        })?;
        self.record("bispinor_isometry", v, 1e-12);

        let v = self.worst(|s| {
            let a = random_clifford(&mut s.rng, &s.amb);
            let b = random_clifford(&mut s.rng, &s.amb);
            let (hr, hp) = trace_metrics(&s.model, &a, &b)?;
            Ok(cabs(hp - hr * pow))
        })?;
        self.record("trace_relation", v, 1e-11);

        let v = self.worst(|s| {
            let gv = GenVector {
                x: (0..m).map(|_| random_complex(&mut s.rng)).collect(),
                xi: (0..m).map(|_| random_complex(&mut s.rng)).collect(),
            };
            let phi =
                FormElement::from_coeffs(&s.amb, (0..s.amb.size()).map(|_| random_complex(&mut s.rng)).collect())?;
            Ok(phi.act(&gv).act(&gv).max_abs_diff(&phi.scale(gv.pairing())))
        })?;
        self.record("generalized_clifford_relation", v, 1e-12);

        let v = self.worst(|s| {
            let real_gen = |rng: &mut SampleRng| GenVector {
                x: random_real_vector(rng, m),
                xi: random_real_vector(rng, m),
            };
            let u = real_gen(&mut s.rng);
            let w = real_gen(&mut s.rng);
            let op_u = FormElement::operator_matrix(&s.amb, |f| f.act(&u));
            let op_w = FormElement::operator_matrix(&s.amb, |f| f.act(&w));
            let gen = (&op_u * &op_w - &op_w * &op_u) * C::new(0.25, 0.0);
            let g = gen.exp();
            let rand_form = |rng: &mut SampleRng, amb: &Ambient<f64>| {
                FormElement::from_coeffs(amb, (0..amb.size()).map(|_| random_complex(rng)).collect())
            };
            let a = rand_form(&mut s.rng, &s.amb)?;
            let b = rand_form(&mut s.rng, &s.amb)?;
            let before = chevalley_pairing(&a, &b)?;
            let after = chevalley_pairing(&a.apply(&g), &b.apply(&g))?;
            Ok(cabs(after - before) / before.norm().max(1.0))
        })?;
        self.record("chevalley_invariance", v, 1e-10);

        let p = intertwiner_p(&self.model, &self.other)?;
        self.record("intertwiner_unitarity", p.unitarity_defect, 1e-12);
        self.record("intertwiner_equivariance", p.equivariance_defect, 1e-11);
        let same = intertwiner_p(&self.model, &self.model)?;
        let d = self.model.dim();
        self.record(
            "intertwiner_identity",
            mat_diff(&same.matrix, &DMatrix::identity(d, d)),
            1e-12,
        );
        let ann = annihilator_residual(&self.model, &self.other)?;
        self.record("pure_spinor_annihilator", ann, 1e-12);
        Ok(())
    }
}

/// Runs every identity for `n = 1, 2, 3` with `samples` random draws each
/// (a single draw at `n = 3`).
pub fn clifford_selftest(seed: u64, samples: usize) -> Result<SelfTestReport> {
    clifford_selftest_for(seed, samples, &[1, 2, 3])
}

/// As [`clifford_selftest`], restricted to the listed half-dimensions.
pub fn clifford_selftest_for(seed: u64, samples: usize, dims: &[usize]) -> Result<SelfTestReport> {
    let mut checks = Vec::new();
    let mut rng = seeded(seed);
    for &n in dims {
        let amb = Ambient::euclidean(n)?;
        let plus = random_complex_structure(&mut rng, &amb)?;
        let minus = random_complex_structure(&mut rng, &amb)?;
        let mut run = Run {
            rng: seeded(seed.wrapping_add(n as u64)),
            model: SpinorModel::new(&plus)?,
            other: SpinorModel::new(&minus)?,
            amb,
            samples: if n == 3 { 1 } else { samples.max(1) },
            out: &mut checks,
        };
        run.all()?;
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(SelfTestReport {
        seed,
        samples,
        checks,
        passed,
    })
}
