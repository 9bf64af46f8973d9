//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DVector;
use toric_gk::clifford::clifford_selftest_for;
use toric_gk::connection::epsilon_section_residual;
use toric_gk::sampling::{random_admissible_f, random_antisymmetric, random_params, random_spd, seeded, uniform};
use toric_gk::*;

type Outcome = (bool, String);

fn cp1() -> Potential64 {
    guillemin_potential(&Polytope64::interval(0.0, 1.0).unwrap())
}

fn constant_anchor(model: &Potential64, res: usize, expected: f64) -> (f64, usize, f64) {
    let grid = interior_grid(model.polytope(), &GridSpec::new(res, 0.05).unwrap()).unwrap();
    let params = GkParams::kahler(model.dim());
    let t = Instant::now();
    let scan = equivalence_scan(model, &params, &grid, 1e-8);
    let secs = t.elapsed().as_secs_f64();
    let err = scan
        .samples
        .iter()
        .map(|s| {
            (s.kappa_boulanger - expected)
                .abs()
                .max((s.kappa_goto - expected).abs())
        })
        .fold(
            if scan.failed_points.is_empty() {
                0.0
            } else {
                f64::INFINITY
            },
            f64::max,
        );
    (err, grid.len(), secs)
}

fn abreu_anchor() -> Outcome {
    let (err, points, secs) = constant_anchor(&cp1(), 101, 4.0);
    (
        err <= 1e-8 && secs < 1.0,
        format!("{points} points, max |κ − 4| = {err:.2e}, {secs:.3} s"),
    )
}

fn product_anchor() -> Outcome {
    let p = Polytope64::interval(0.0, 1.0).unwrap();
    let model = guillemin_potential(&p.product(&p).unwrap());
    let (err, points, _) = constant_anchor(&model, 21, 8.0);
    (err <= 1e-8, format!("{points} points, max |κ − 8| = {err:.2e}"))
}

fn constant_hessian() -> Outcome {
    let mut rng = seeded(3);
    let mut worst = 0.0f64;
    let mut draws = 0;
    for n in [2, 3] {
        let model = quadratic_potential(&Polytope64::unit_cube(n).unwrap());
        let mu = DVector::from_element(n, 0.5);
        for _ in 0..20 {
            let h = model.hessian(&mu).unwrap();
            let f = random_admissible_f(&mut rng, &h, 2.0);
            let params = GkParams::new(random_antisymmetric(&mut rng, n, 2.0), f).unwrap();
            let kb = kappa_boulanger(&model, &params, &mu).unwrap();
            let kg = kappa_goto(&model, &params, &mu).unwrap();
            worst = worst.max(kb.abs()).max(kg.abs());
            draws += 1;
        }
    }
    (worst == 0.0, format!("{draws} draws, max |κ| = {worst:e}"))
}

struct SquareScans {
    rel: f64,
    ricci: f64,
    frame: f64,
    failures: usize,
    secs: f64,
}

fn perturbed_square(rng: &mut toric_gk::sampling::SampleRng) -> Potential64 {
    let terms = [[3, 0], [1, 2], [2, 2], [0, 4], [2, 1]]
        .iter()
        .map(|p| Monomial::new(p.to_vec(), uniform::<f64>(rng, 0.08)))
        .collect::<Vec<_>>();
    perturbed_potential(&guillemin_potential(&Polytope64::unit_cube(2).unwrap()), &terms).unwrap()
}

fn square_scans() -> SquareScans {
    let mut rng = seeded(11);
    let spec = GridSpec::new(9, 0.05).unwrap();
    let mut out = SquareScans {
        rel: 0.0,
        ricci: 0.0,
        frame: 0.0,
        failures: 0,
        secs: 0.0,
    };
    for _ in 0..100 {
        let model = perturbed_square(&mut rng);
        let grid = interior_grid(model.polytope(), &spec).unwrap();
        let params = random_params(&mut rng, &model, &grid, 2.0).unwrap();
        let t = Instant::now();
        let scan = equivalence_scan(&model, &params, &grid, 1e-7);
        out.secs += t.elapsed().as_secs_f64();
        out.rel = out.rel.max(scan.summary.max_relative_discrepancy);
        out.ricci = out.ricci.max(scan.summary.max_ricci_discrepancy);
        out.failures += scan.summary.failures;
        for mu in &grid {
            match assemble_frame(&model, &params, mu) {
                Ok(fr) => {
                    let r = fr.residuals();
                    let worst = if r.passes(f64::INFINITY) {
                        r.max_identity_residual()
                    } else {
                        f64::INFINITY
                    };
                    out.frame = out.frame.max(worst);
                }
                Err(_) => out.frame = f64::INFINITY,
            }
        }
    }
    out
}

fn main_theorem(s: &SquareScans) -> Outcome {
    (
        s.rel <= 1e-7 && s.failures == 0 && s.secs < 30.0,
        format!(
            "100 configs x 81 points, max relative discrepancy {:.2e}, {} failures, {:.2} s",
            s.rel, s.failures, s.secs
        ),
    )
}

fn determinant_suite() -> Outcome {
    let mut rng = seeded(5);
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let n = 1 + k % 4;
        let s = random_spd::<f64>(&mut rng, n, 0.2);
        let f = random_admissible_f(&mut rng, &s, 3.0);
        match det_identity_residuals(&s, &f) {
            Ok((r1, r2)) => worst = worst.max(r1).max(r2),
            Err(_) => worst = f64::INFINITY,
        }
    }
    (worst <= 1e-10, format!("1000 draws, max residual {worst:.2e}"))
}

fn frame_algebra(s: &SquareScans) -> Outcome {
    (
        s.frame <= 1e-9,
        format!("8100 points, max identity residual {:.2e}", s.frame),
    )
}

fn connection_suite() -> Outcome {
    let mut rng = seeded(7);
    let (mut constancy, mut symmetry, mut eps) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let model = perturbed_square(&mut rng);
        let mu = DVector::from_fn(2, |_, _| 0.5 + uniform::<f64>(&mut rng, 0.3));
        let params = random_params(&mut rng, &model, std::slice::from_ref(&mu), 2.0).unwrap();
        match connection_report(&model, &params, &mu) {
            Ok(r) => {
                constancy = constancy.max(r.constancy.max());
                symmetry = symmetry.max(r.pair_symmetry).max(r.j_minus_invariance);
                eps = eps.max(r.epsilon_residual);
            }
            Err(_) => constancy = f64::INFINITY,
        }
        eps = eps.max(epsilon_section_residual(&model, &params, &mu).unwrap_or(f64::INFINITY));
    }
    (
        constancy <= 1e-5 && symmetry <= 1e-4 && eps <= 1e-7,
        format!("10 configs, constancy {constancy:.2e}, curvature symmetries {symmetry:.2e}, section {eps:.2e}"),
    )
}

fn ricci_consistency(s: &SquareScans) -> Outcome {
    (s.ricci <= 1e-7, format!("max relative |κ_ricci − κ_G| {:.2e}", s.ricci))
}

fn clifford() -> Outcome {
    let t = Instant::now();
    let report = clifford_selftest_for(2024, 8, &[1, 2]);
    let secs = t.elapsed().as_secs_f64();
    match report {
        Ok(r) => {
            let loose: Vec<_> = r
                .checks
                .iter()
                .filter(|c| c.value.is_nan() || c.value > 1e-12)
                .map(|c| format!("{}@{}", c.name, c.n))
                .collect();
            let worst = r.checks.iter().map(|c| c.value).fold(0.0, f64::max);
            (
                loose.is_empty() && r.passed && secs < 5.0,
                format!(
                    "{} checks, worst {worst:.2e}, {secs:.3} s{}",
                    r.checks.len(),
                    if loose.is_empty() {
                        String::new()
                    } else {
                        format!(", above 1e-12: {loose:?}")
                    }
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn csc_restoration() -> Outcome {
    let base = perturbed_potential(&cp1(), &[Monomial::new(vec![4], 0.01)]).unwrap();
    let grid = interior_grid(base.polytope(), &GridSpec::new(21, 0.05).unwrap()).unwrap();
    let basis = PerturbationBasis::single(vec![4], 0.1).unwrap();
    match optimize(&base, &GkParams::kahler(1), &grid, &basis, 200) {
        Ok(r) => (
            r.final_objective <= 1e-8 && r.iterations <= 200 && r.kappa_range <= 1e-4,
            format!(
                "objective {:.2e} after {} iterations, κ range {:.2e}, coefficient {:.6}",
                r.final_objective, r.iterations, r.kappa_range, r.coefficients[0]
            ),
        ),
        Err(e) => (false, e.to_string()),
    }
}

fn c_independence() -> Outcome {
    let mut rng = seeded(13);
    let model = perturbed_square(&mut rng);
    let grid = interior_grid(model.polytope(), &GridSpec::new(9, 0.05).unwrap()).unwrap();
    let base = random_params(&mut rng, &model, &grid, 2.0).unwrap();
    let reference: Vec<u64> = grid
        .iter()
        .map(|mu| kappa_boulanger(&model, &base, mu).unwrap().to_bits())
        .collect();
    let mut mismatches = 0;
    for _ in 0..10 {
        let p = base.with_c(random_antisymmetric(&mut rng, 2, 5.0)).unwrap();
        for (mu, r) in grid.iter().zip(&reference) {
            if kappa_boulanger(&model, &p, mu).map(f64::to_bits).ok() != Some(*r) {
                mismatches += 1;
            }
        }
    }
    (
        mismatches == 0,
        format!("10 draws x {} points, {mismatches} bitwise mismatches", grid.len()),
    )
}

fn main() -> ExitCode {
    let scans = square_scans();
    let results: Vec<(&str, Outcome)> = vec![
        ("CP1 curvature equals 4", abreu_anchor()),
        ("CP1 x CP1 curvature equals 8", product_anchor()),
        ("constant Hessian gives zero curvature", constant_hessian()),
        ("two scalar curvatures agree", main_theorem(&scans)),
        ("determinant identities", determinant_suite()),
        ("frame algebra", frame_algebra(&scans)),
        ("connection suite", connection_suite()),
        ("Ricci contraction matches", ricci_consistency(&scans)),
        ("Clifford self-test", clifford()),
        ("constant curvature restored", csc_restoration()),
        ("curvature independent of C", c_independence()),
    ];
    let mut ok = true;
    for (i, (name, (pass, detail))) in results.iter().enumerate() {
        ok &= pass;
        println!(
            "[{}] {:>2}. {name}: {detail}",
            if *pass { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
