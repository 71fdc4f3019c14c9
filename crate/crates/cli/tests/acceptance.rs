//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Tolerances and thresholds are pinned in code. Run with
//! `cargo test -p lieopt-cli --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::Instant;

use lieopt_core::adjoint::{adjoint_table, general_adjoint_matrix, NumericAdjoint};
use lieopt_core::algebra::LieAlgebra;
use lieopt_core::equivalence::{
    verify_optimal_system, EquivalenceConfig, EquivalenceContext, EquivalenceVerdict, PairOutcome,
};
use lieopt_core::exppoly::{ep_equal, parse_element_with, parse_with, ExpPoly};
use lieopt_core::expr::parse_expr;
use lieopt_core::fd::{
    convergence_order_check, ns_residual, reduced_ode_residual, GridSpec, OdeGrid, ReducedOde,
};
use lieopt_core::fixtures::{
    builtin_algebra, case_registry, named_invariants, optimal_system, registered_invariant,
    sign_classifiers, NsSolution, OdeSolution,
};
use lieopt_core::invariants::{
    assemble_rational_invariants, check_invariant, discover_semi_invariants, flow_constancy,
    invariant_pde_system, CheckConfig,
};
use lieopt_core::poly::Poly;
use lieopt_core::subalgebra::{
    determined_equations, resolve_ab, sample_constrained_pairs, LambdaMode,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lieopt"))
}

fn eps_resolver(name: &str) -> Option<usize> {
    if name == "eps" {
        return Some(0);
    }
    name.strip_prefix("eps")
        .and_then(|d| d.parse::<usize>().ok())
        .and_then(|i| i.checked_sub(1))
}

fn heat() -> LieAlgebra {
    builtin_algebra("heat6").unwrap()
}

fn ns() -> LieAlgebra {
    builtin_algebra("ns4").unwrap()
}

mod tables_data;
use tables_data::*;

// --- criterion 1: golden tables -------------------------------------------------

#[test]
fn acceptance_01_golden_tables() {
    // CLI renders both tables for both algebras in under a second
    for name in ["heat6", "ns4"] {
        let t0 = Instant::now();
        let out = bin().args(["tables", "--algebra", name]).output().unwrap();
        let elapsed = t0.elapsed();
        assert!(out.status.success(), "tables --algebra {name} failed");
        assert!(
            elapsed.as_secs_f64() < 1.0,
            "tables --algebra {name} took {elapsed:?}"
        );
    }

    // cell-for-cell content after parsing normalization
    let alg = heat();
    let table = alg.commutator_table();
    for (i, row) in HEAT_TABLE1.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got: Vec<ExpPoly> = table[i][j]
                .0
                .iter()
                .map(|c| ExpPoly::constant(c.clone()))
                .collect();
            let want = parse_element_with(want, 6, &eps_resolver).unwrap();
            for k in 0..6 {
                assert!(ep_equal(&got[k], &want[k]), "Table 1 ({},{})", i + 1, j + 1);
            }
        }
    }
    let adj = adjoint_table(&alg).unwrap();
    for (i, row) in HEAT_TABLE2.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got: Vec<ExpPoly> = adj[i][j].iter().map(|e| e.rename_var(i, 0)).collect();
            let want = parse_element_with(want, 6, &eps_resolver).unwrap();
            for k in 0..6 {
                assert!(ep_equal(&got[k], &want[k]), "Table 2 ({},{})", i + 1, j + 1);
            }
        }
    }
    let alg = ns();
    let table = alg.commutator_table();
    for (i, row) in NS_TABLE3.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got: Vec<ExpPoly> = table[i][j]
                .0
                .iter()
                .map(|c| ExpPoly::constant(c.clone()))
                .collect();
            let want = parse_element_with(want, 4, &eps_resolver).unwrap();
            for k in 0..4 {
                assert!(ep_equal(&got[k], &want[k]), "Table 3 ({},{})", i + 1, j + 1);
            }
        }
    }
    let adj = adjoint_table(&alg).unwrap();
    for (i, row) in NS_TABLE4.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got: Vec<ExpPoly> = adj[i][j].iter().map(|e| e.rename_var(i, 0)).collect();
            let want = parse_element_with(want, 4, &eps_resolver).unwrap();
            for k in 0..4 {
                assert!(ep_equal(&got[k], &want[k]), "Table 4 ({},{})", i + 1, j + 1);
            }
        }
    }
    println!("CRITERION 1: PASS — Tables 1-4 reproduced cell-for-cell, CLI < 1 s");
}

// --- criterion 2: golden adjoint matrices ---------------------------------------

#[test]
fn acceptance_02_golden_adjoint_matrix() {
    let t0 = Instant::now();
    let a = general_adjoint_matrix(&heat(), None).unwrap();
    for r in 0..6 {
        for c in 0..6 {
            let want = parse_with(HEAT_PRODUCT[r][c], &eps_resolver).unwrap();
            assert!(
                ep_equal(&a.matrix[r][c], &want),
                "heat a_{}{} mismatch",
                r + 1,
                c + 1
            );
        }
    }
    let a = general_adjoint_matrix(&ns(), None).unwrap();
    for r in 0..4 {
        for c in 0..4 {
            let want = parse_with(NS_PRODUCT[r][c], &eps_resolver).unwrap();
            assert!(
                ep_equal(&a.matrix[r][c], &want),
                "ns a_{}{} mismatch",
                r + 1,
                c + 1
            );
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "CRITERION 2: PASS — 36 heat entries and 16 ns entries exact in {:.2} s",
        elapsed.as_secs_f64()
    );
}

// --- criterion 3: determined equations ------------------------------------------

#[test]
fn acceptance_03_determined_equations() {
    let check = |alg: &LieAlgebra, want: &[&str], n: usize| {
        let sys = determined_equations(alg);
        assert_eq!(sys.equations.len(), want.len());
        let mut got: Vec<Poly> = sys
            .equations
            .iter()
            .map(|(_, p)| p.primitive_normalized())
            .collect();
        for w in want {
            let wp = parse_expr(w)
                .unwrap()
                .to_poly(&|s| resolve_ab(s, n))
                .unwrap()
                .primitive_normalized();
            let pos = got
                .iter()
                .position(|g| *g == wp)
                .unwrap_or_else(|| panic!("missing equation {w}"));
            got.remove(pos);
        }
    };
    check(&heat(), &HEAT_DETERMINED, 6);
    check(&ns(), &NS_DETERMINED, 4);
    println!("CRITERION 3: PASS — determined equations match exactly up to order/sign");
}

// --- criterion 4: invariant PDE systems ------------------------------------------

#[test]
fn acceptance_04_invariant_pde_systems() {
    let check = |alg: &LieAlgebra, mode: LambdaMode, expected: &[Vec<Poly>]| {
        let fields = invariant_pde_system(alg, mode);
        assert_eq!(fields.len(), expected.len(), "equation count");
        let mut got: Vec<Vec<Poly>> = fields.iter().map(|f| f.normalized_coeffs()).collect();
        for want in expected {
            let wf = lieopt_core::invariants::VectorFieldPDE {
                kind: lieopt_core::invariants::FieldKind::ScaleA11,
                label: String::new(),
                coeffs: want.clone(),
            }
            .normalized_coeffs();
            let pos = got
                .iter()
                .position(|g| *g == wf)
                .expect("missing PDE equation");
            got.remove(pos);
        }
    };
    let heat8: Vec<Vec<Poly>> = heat_eqs8();
    let mut heat9 = heat8.clone();
    heat9.push(heat_eq1());
    check(&heat(), LambdaMode::Nonzero, &heat8);
    check(&heat(), LambdaMode::Zero, &heat9);
    let ns6 = ns_eqs6();
    let mut ns7 = ns6.clone();
    ns7.push(ns_eq1());
    check(&ns(), LambdaMode::Nonzero, &ns6);
    check(&ns(), LambdaMode::Zero, &ns7);
    println!("CRITERION 4: PASS — 9/8 heat and 7/6 ns PDE equations coefficient-for-coefficient");
}

// --- criterion 5: invariant verification -----------------------------------------

#[test]
fn acceptance_05_invariant_verification() {
    let t0 = Instant::now();
    let jobs = [
        ("heat6", "delta1", "3"),
        ("heat6", "delta2", "4"),
        ("ns4", "delta3", "3"),
        ("ns4", "delta4", "4"),
    ];
    for (alg_name, inv_name, case_name) in jobs {
        let alg = builtin_algebra(alg_name).unwrap();
        let reg = registered_invariant(alg_name, inv_name).unwrap();
        let case = case_registry(alg_name)
            .unwrap()
            .into_iter()
            .find(|c| c.name() == case_name)
            .unwrap()
            .constraint;
        let cfg = CheckConfig {
            samples: 100,
            seed: 7,
            ..CheckConfig::default()
        };
        let report = check_invariant(&alg, &reg.invariant, reg.mode, Some(&case), &cfg).unwrap();
        assert!(report.pass, "{inv_name} check failed: {report:?}");
        // 200 seeded flow trials across 20 sampled pairs
        let pairs = sample_constrained_pairs(&alg, &case, 20, 7).unwrap();
        let mut worst: f64 = 0.0;
        for (i, pair) in pairs.iter().enumerate() {
            let dev =
                flow_constancy(&alg, &reg.invariant, pair, reg.mode, 10, 7 + i as u64).unwrap();
            worst = worst.max(dev);
        }
        assert!(
            worst < 1e-8,
            "{inv_name}: flow deviation {worst:e} over 200 trials"
        );
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "CRITERION 5: PASS — Delta1..Delta4 verified on their case sets, flow < 1e-8, {:.2} s",
        elapsed.as_secs_f64()
    );
}

// --- criterion 6: semi-invariant discovery ----------------------------------------

#[test]
fn acceptance_06_semi_invariant_discovery() {
    let t0 = Instant::now();
    let alg = ns();
    let semis = discover_semi_invariants(&alg, LambdaMode::Nonzero, 2);
    let ratios = assemble_rational_invariants(&alg, LambdaMode::Nonzero, &semis);
    let delta3 = registered_invariant("ns4", "delta3").unwrap().invariant;
    let found = ratios.iter().any(|r| {
        (r.num.proportional_to(&delta3.num) && r.den.proportional_to(&delta3.den))
            || (r.num.proportional_to(&delta3.den) && r.den.proportional_to(&delta3.num))
    });
    assert!(found, "Delta3 not among assembled invariants");
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "CRITERION 6: PASS — (b1b4-b2b3)/b1^2 assembled from the exact nullspace in {:.2} s",
        elapsed.as_secs_f64()
    );
}

// --- criterion 7: case-to-representative coverage ----------------------------------

#[test]
fn acceptance_07_case_coverage() {
    let t0 = Instant::now();
    let mut total_cases = 0;
    for alg_name in ["heat6", "ns4"] {
        let alg = builtin_algebra(alg_name).unwrap();
        let ctx = EquivalenceContext::new(&alg).unwrap();
        let system = optimal_system(alg_name).unwrap();
        let cfg = EquivalenceConfig::default();
        for case in case_registry(alg_name).unwrap() {
            total_cases += 1;
            let samples = sample_constrained_pairs(&alg, &case.constraint, 50, 42).unwrap();
            let family = system
                .reps
                .iter()
                .find(|r| r.name == case.representative)
                .unwrap();
            let mut reached = 0;
            for sample in &samples {
                let (sa, sb) = sample.to_f64();
                let target = match &case.rep_param {
                    None => family.instantiate(None).unwrap(),
                    Some(rule) => {
                        let x: Vec<f64> = sa.iter().chain(sb.iter()).copied().collect();
                        let val = rule.eval_f64(&x).unwrap();
                        family
                            .instantiate(Some(&lieopt_core::equivalence::approximate_rat(val)))
                            .unwrap()
                    }
                };
                let privileged: Vec<(Vec<f64>, [f64; 4])> =
                    (case.witness)(&sa, &sb).into_iter().collect();
                if let EquivalenceVerdict::Equivalent { residual, .. } =
                    ctx.solve(sample, &target, &privileged, &cfg).unwrap()
                {
                    assert!(residual < 1e-10);
                    reached += 1;
                }
            }
            assert!(
                reached * 100 >= 95 * samples.len(),
                "{alg_name} case {}: {reached}/{} below 95%",
                case.name(),
                samples.len()
            );
        }
    }
    assert_eq!(total_cases, 19, "12 heat + 7 ns registered cases");
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "CRITERION 7: PASS — {total_cases} cases x 50 samples reach their representatives, {:.1} s",
        elapsed.as_secs_f64()
    );
}

// --- criterion 8: optimal-system verification ---------------------------------------

#[test]
fn acceptance_08_optimal_system_verification() {
    let t0 = Instant::now();
    for alg_name in ["heat6", "ns4"] {
        let alg = builtin_algebra(alg_name).unwrap();
        let ctx = EquivalenceContext::new(&alg).unwrap();
        let system = optimal_system(alg_name).unwrap();
        let report = verify_optimal_system(
            &ctx,
            &system,
            &case_registry(alg_name).unwrap(),
            &named_invariants(alg_name),
            &sign_classifiers(alg_name),
            &EquivalenceConfig::default(),
        )
        .unwrap();
        assert!(report.pass, "{alg_name} system verification failed");
        for p in &report.pairs {
            assert!(
                !matches!(p.outcome, PairOutcome::Equivalent { .. }),
                "off-diagonal Equivalent: {} vs {}",
                p.left,
                p.right
            );
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "CRITERION 8: PASS — heat 11-element and ns 7-element systems verified in {:.1} s",
        elapsed.as_secs_f64()
    );
}

// --- criterion 9: sign-classifier stability ------------------------------------------

/// Stability of the case-splitting signs under random adjoint actions and
/// valid mixings, 500 seeded trials each, zero violations required.
///
/// sign(Lambda1) on case (ii) and sign(4a2a6-a4^2) on case (iii) are stable.
/// sign(2a1a6-a4a5) on case (iiic) is NOT: on the 4a2a6=a4^2 cone the adjoint
/// flow rescales 2a1a6-a4a5 by e^{-eps4} + eps6 e^{eps4}(a4/a6 - 4 eps2),
/// whose sign is unconstrained — an explicit consequence is that {v1+v6, v3}
/// and {-v1+v6, v3} are joined by a composite transformation (apply the
/// adjoint flow with eps=(0.3,1,0,0.2,-0.4,1), then the case-(iiic-) closed
/// form). The clause is therefore expected to fail; it is asserted anyway
/// because the criterion demands zero violations.
#[test]
fn acceptance_09_sign_classifier_stability() {
    use rand::Rng;
    use rand::SeedableRng;
    let alg = heat();
    let numeric = NumericAdjoint::new(&alg, None).unwrap();
    let classifiers = sign_classifiers("heat6");
    let jobs = [
        ("lambda1", "iia", "iib"),
        ("disc", "iiia", "iiib"),
        ("p1", "iiic+", "iiic-"),
    ];
    let mut failures = Vec::new();
    for (clf_name, case_pos, case_neg) in jobs {
        let clf = classifiers.iter().find(|c| c.name == clf_name).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(500);
        let mut flips = 0;
        let mut trials = 0;
        // half the trials from each sign branch of the case
        for case_name in [case_pos, case_neg] {
            let case = case_registry("heat6")
                .unwrap()
                .into_iter()
                .find(|c| c.name() == case_name)
                .unwrap()
                .constraint;
            let pairs = sample_constrained_pairs(&alg, &case, 25, 500).unwrap();
            for pair in &pairs {
                let (a, b) = pair.to_f64();
                let x0: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
                let v0 = clf.poly.eval_f64(&x0);
                if v0.abs() < 1e-9 {
                    continue;
                }
                for _ in 0..10 {
                    trials += 1;
                    let eps: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    let (ta, tb) = numeric.transform_pair(&a, &b, &eps);
                    let (k1, k2, k3, k4) = loop {
                        let k1: f64 = rng.gen_range(-2.0..2.0);
                        let k2: f64 = rng.gen_range(-2.0..2.0);
                        let k3: f64 = rng.gen_range(-2.0..2.0);
                        let k4: f64 = rng.gen_range(-2.0..2.0);
                        if (k1 * k4 - k2 * k3).abs() > 0.2 {
                            break (k1, k2, k3, k4);
                        }
                    };
                    let na: Vec<f64> = ta.iter().zip(&tb).map(|(x, y)| k1 * x + k2 * y).collect();
                    let nb: Vec<f64> = ta.iter().zip(&tb).map(|(x, y)| k3 * x + k4 * y).collect();
                    let x1: Vec<f64> = na.iter().chain(nb.iter()).copied().collect();
                    let v1 = clf.poly.eval_f64(&x1);
                    if v0.signum() != v1.signum() && v1.abs() > 1e-9 {
                        flips += 1;
                    }
                }
            }
        }
        let line = format!("sign({clf_name}): {flips} flips over {trials} trials");
        println!("  {line}");
        if flips > 0 {
            failures.push(line);
        }
    }
    if failures.is_empty() {
        println!("CRITERION 9: PASS — all three classifier signs stable");
    } else {
        println!("CRITERION 9: FAIL — {}", failures.join("; "));
    }
    assert!(
        failures.is_empty(),
        "zero violations required, but: {} (the case-(iiic) split is not \
         adjoint-stable; {{v1+v6,v3}} and {{-v1+v6,v3}} are equivalent via a \
         composite transformation — see the verification notes in the README)",
        failures.join("; ")
    );
}

// --- criterion 10: NS solution residuals ----------------------------------------------

#[test]
fn acceptance_10_ns_solution_residuals() {
    let t0 = Instant::now();
    for gamma in [0.5, 1.0] {
        let sol = NsSolution::Radial {
            gamma,
            c: [1.0, 1.0, 1.0, 1.0],
        };
        let grid = GridSpec {
            lo: vec![0.75, -0.35, 1.0],
            hi: vec![1.25, 0.35, 2.0],
            n: vec![4, 4, 3],
            h: 1e-2,
            acc: 6,
            richardson: true,
        };
        let r = ns_residual(&sol, &grid).unwrap();
        assert!(r < 1e-4, "ns_radial gamma={gamma}: {r:e}");

        let sol = NsSolution::Tanh {
            gamma,
            c0: 0.0,
            c1: 0.0,
        };
        let grid = GridSpec {
            lo: vec![0.8, -0.4, 1.0],
            hi: vec![1.4, 0.4, 1.5],
            n: vec![4, 4, 2],
            h: 1e-2,
            acc: 6,
            richardson: true,
        };
        let r = ns_residual(&sol, &grid).unwrap();
        assert!(r < 1e-4, "ns_tanh gamma={gamma}: {r:e}");
    }

    let ode_grid_red1 = OdeGrid {
        lo: 2.0,
        hi: 4.0,
        n: 31,
        h: 5e-2,
        acc: 6,
    };
    for branch in ["red1_plus", "red1_minus"] {
        let cand = OdeSolution::by_name(branch, 1.0).unwrap();
        let r = reduced_ode_residual(ReducedOde::Red1, &cand, 1.0, 0.0, &ode_grid_red1).unwrap();
        assert!(r < 1e-6, "{branch}: {r:e}");
    }
    let ode_grid_red2 = OdeGrid {
        lo: -2.0,
        hi: 2.0,
        n: 41,
        h: 1e-2,
        acc: 6,
    };
    let cand = OdeSolution::Red2G {
        gamma: 1.0,
        c0: 0.0,
    };
    let r = reduced_ode_residual(ReducedOde::Red2, &cand, 1.0, 0.0, &ode_grid_red2).unwrap();
    assert!(r < 1e-6, "red2 sech: {r:e}");
    let r = reduced_ode_residual(
        ReducedOde::Red2,
        &OdeSolution::Red2Zero,
        1.0,
        0.0,
        &ode_grid_red2,
    )
    .unwrap();
    assert_eq!(r, 0.0, "red2 zero candidate");

    // convergence-order sanity at accuracy 4 where truncation dominates
    let sol = NsSolution::Radial {
        gamma: 1.0,
        c: [1.0, 1.0, 1.0, 1.0],
    };
    let grid = GridSpec {
        lo: vec![0.75, -0.35, 1.0],
        hi: vec![1.25, 0.35, 2.0],
        n: vec![3, 3, 2],
        h: 0.04,
        acc: 4,
        richardson: false,
    };
    let (coarse, fine, ok) = convergence_order_check(&sol, &grid).unwrap();
    assert!(
        ok,
        "convergence factor {:.2} below 2^(acc-1) = 8",
        coarse / fine
    );
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "CRITERION 10: PASS — residuals under thresholds, convergence factor {:.1}, {:.1} s",
        coarse / fine,
        elapsed.as_secs_f64()
    );
}

// --- criterion 11: negative controls ---------------------------------------------------

#[test]
fn acceptance_11_negative_controls() {
    // corrupt one structure constant: C_25^1 from 2 to 3
    let doc = heat().to_json_string();
    let corrupted = doc.replacen("\"1\": \"2\"", "\"1\": \"3\"", 1);
    assert_ne!(doc, corrupted);
    let dir = std::env::temp_dir().join("lieopt-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let bad_path = dir.join("heat6-corrupt.json");
    std::fs::write(&bad_path, &corrupted).unwrap();
    let out = bin()
        .args(["tables", "--algebra", bad_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "corrupted algebra must exit 2: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Jacobi"), "stderr: {stderr}");

    // removing g1 fails coverage: case-i samples reach no representative
    let out = bin()
        .args([
            "verify-optimal-system",
            "--algebra",
            "heat6",
            "--exclude",
            "g1",
            "--coverage-samples",
            "5",
            "--starts",
            "16",
            "--seed",
            "42",
        ])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(1),
        "coverage gap must exit 1: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("case i: 0/5") && stdout.contains("FAIL"),
        "stdout: {stdout}"
    );
    println!(
        "CRITERION 11: PASS — corrupted constants exit 2, missing g1 fails coverage with exit 1"
    );
}
