//! Golden comparisons for the four-dimensional NS subalgebra: Tables 3 and 4,
//! the printed factors and 4x4 product, the determined equations and the
//! invariant PDE systems.

use lieopt_core::adjoint::{adjoint_factor, adjoint_table, general_adjoint_matrix};
use lieopt_core::algebra::LieAlgebra;
use lieopt_core::exppoly::{ep_equal, parse_element_with, parse_with, ExpPoly};
use lieopt_core::expr::parse_expr;
use lieopt_core::fixtures::builtin_algebra;
use lieopt_core::invariants::{invariant_pde_system, FieldKind, VectorFieldPDE};
use lieopt_core::poly::Poly;
use lieopt_core::subalgebra::{determined_equations, resolve_ab, LambdaMode};

fn ns() -> LieAlgebra {
    builtin_algebra("ns4").unwrap()
}

fn eps_resolver(name: &str) -> Option<usize> {
    if name == "eps" {
        return Some(0);
    }
    name.strip_prefix("eps")
        .and_then(|d| d.parse::<usize>().ok())
        .and_then(|i| i.checked_sub(1))
}

const TABLE3: [[&str; 4]; 4] = [
    ["0", "-v2", "v3", "0"],
    ["v2", "0", "v4", "0"],
    ["-v3", "-v4", "0", "0"],
    ["0", "0", "0", "0"],
];

#[test]
fn table3_commutator_cells() {
    let alg = ns();
    let table = alg.commutator_table();
    for (i, row) in TABLE3.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got: Vec<ExpPoly> = table[i][j]
                .0
                .iter()
                .map(|c| ExpPoly::constant(c.clone()))
                .collect();
            let want = parse_element_with(want, 4, &eps_resolver).unwrap();
            for k in 0..4 {
                assert!(
                    ep_equal(&got[k], &want[k]),
                    "Table 3 cell ({},{}) coordinate {}",
                    i + 1,
                    j + 1,
                    k + 1
                );
            }
        }
    }
}

const TABLE4: [[&str; 4]; 4] = [
    ["v1", "exp(eps)*v2", "exp(-eps)*v3", "v4"],
    ["v1 - eps*v2", "v2", "v3 - eps*v4", "v4"],
    ["v1 + eps*v3", "v2 + eps*v4", "v3", "v4"],
    ["v1", "v2", "v3", "v4"],
];

#[test]
fn table4_adjoint_cells() {
    let alg = ns();
    let table = adjoint_table(&alg).unwrap();
    for (i, row) in TABLE4.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got: Vec<ExpPoly> = table[i][j].iter().map(|e| e.rename_var(i, 0)).collect();
            let want = parse_element_with(want, 4, &eps_resolver).unwrap();
            for k in 0..4 {
                assert!(
                    ep_equal(&got[k], &want[k]),
                    "Table 4 cell ({},{}) coordinate {}",
                    i + 1,
                    j + 1,
                    k + 1
                );
            }
        }
    }
}

#[test]
fn printed_factors_and_product() {
    let alg = ns();
    let a1: [[&str; 4]; 4] = [
        ["1", "0", "0", "0"],
        ["0", "exp(eps1)", "0", "0"],
        ["0", "0", "exp(-eps1)", "0"],
        ["0", "0", "0", "1"],
    ];
    let a2: [[&str; 4]; 4] = [
        ["1", "-eps2", "0", "0"],
        ["0", "1", "0", "0"],
        ["0", "0", "1", "-eps2"],
        ["0", "0", "0", "1"],
    ];
    let a3: [[&str; 4]; 4] = [
        ["1", "0", "eps3", "0"],
        ["0", "1", "0", "eps3"],
        ["0", "0", "1", "0"],
        ["0", "0", "0", "1"],
    ];
    let a4: [[&str; 4]; 4] = [
        ["1", "0", "0", "0"],
        ["0", "1", "0", "0"],
        ["0", "0", "1", "0"],
        ["0", "0", "0", "1"],
    ];
    for (gen, want) in [(0, a1), (1, a2), (2, a3), (3, a4)] {
        let f = adjoint_factor(&alg, gen).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let w = parse_with(want[r][c], &eps_resolver).unwrap();
                assert!(
                    ep_equal(&f.matrix[r][c], &w),
                    "A{} entry ({},{})",
                    gen + 1,
                    r + 1,
                    c + 1
                );
            }
        }
    }

    let product: [[&str; 4]; 4] = [
        ["1", "-eps2", "eps3", "-eps2*eps3"],
        ["0", "exp(eps1)", "0", "exp(eps1)*eps3"],
        ["0", "0", "exp(-eps1)", "-exp(-eps1)*eps2"],
        ["0", "0", "0", "1"],
    ];
    let a = general_adjoint_matrix(&alg, None).unwrap();
    for r in 0..4 {
        for c in 0..4 {
            let want = parse_with(product[r][c], &eps_resolver).unwrap();
            assert!(
                ep_equal(&a.matrix[r][c], &want),
                "product entry ({},{}): got {}",
                r + 1,
                c + 1,
                a.matrix[r][c]
            );
        }
    }
}

#[test]
fn determined_equations_match_nsfengbi() {
    let alg = ns();
    let sys = determined_equations(&alg);
    let want = [
        "lambda*a1",
        "a2*b1 - a1*b2 - lambda*a2",
        "a1*b3 - a3*b1 - lambda*a3",
        "a2*b3 - a3*b2 - lambda*a4",
    ];
    assert_eq!(sys.equations.len(), want.len());
    let mut got: Vec<Poly> = sys
        .equations
        .iter()
        .map(|(_, p)| p.primitive_normalized())
        .collect();
    for w in want {
        let wp = parse_expr(w)
            .unwrap()
            .to_poly(&|s| resolve_ab(s, 4))
            .unwrap()
            .primitive_normalized();
        let pos = got
            .iter()
            .position(|g| *g == wp)
            .unwrap_or_else(|| panic!("equation '{w}' not generated"));
        got.remove(pos);
    }
    assert!(got.is_empty());
}

type EqTerms<'a> = &'a [(&'a str, &'a str)];

fn field_from_terms(terms: EqTerms, n: usize) -> Vec<Poly> {
    let mut coeffs = vec![Poly::zero(); 2 * n];
    for (c, var) in terms {
        let idx = resolve_ab(var, n).unwrap();
        coeffs[idx] = coeffs[idx].add(
            &parse_expr(c)
                .unwrap()
                .to_poly(&|s| resolve_ab(s, n))
                .unwrap(),
        );
    }
    coeffs
}

#[test]
fn invariant_pdes_match_ns8eqs_and_ns1eq() {
    let alg = ns();
    let eqs6: [EqTerms; 6] = [
        &[("a1", "a1"), ("a2", "a2"), ("a3", "a3"), ("a4", "a4")],
        &[("a1", "b1"), ("a2", "b2"), ("a3", "b3"), ("a4", "b4")],
        &[("b1", "b1"), ("b2", "b2"), ("b3", "b3"), ("b4", "b4")],
        &[("a2", "a2"), ("-a3", "a3"), ("b2", "b2"), ("-b3", "b3")],
        &[("a1", "a2"), ("a3", "a4"), ("b1", "b2"), ("b3", "b4")],
        &[("a1", "a3"), ("a2", "a4"), ("b1", "b3"), ("b2", "b4")],
    ];
    let eq1: EqTerms = &[("b1", "a1"), ("b2", "a2"), ("b3", "a3"), ("b4", "a4")];

    let check = |mode: LambdaMode, expected: Vec<Vec<Poly>>| {
        let fields = invariant_pde_system(&alg, mode);
        assert_eq!(fields.len(), expected.len());
        let mut got: Vec<Vec<Poly>> = fields
            .iter()
            .map(VectorFieldPDE::normalized_coeffs)
            .collect();
        for want_raw in &expected {
            let want = VectorFieldPDE {
                kind: FieldKind::ScaleA11,
                label: String::new(),
                coeffs: want_raw.clone(),
            }
            .normalized_coeffs();
            let pos = got
                .iter()
                .position(|g| *g == want)
                .expect("expected equation not generated");
            got.remove(pos);
        }
    };

    let expected6: Vec<Vec<Poly>> = eqs6.iter().map(|t| field_from_terms(t, 4)).collect();
    check(LambdaMode::Nonzero, expected6.clone());
    let mut expected7 = expected6;
    expected7.push(field_from_terms(eq1, 4));
    check(LambdaMode::Zero, expected7);
}
