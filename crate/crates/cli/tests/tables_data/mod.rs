//! Golden data transcribed for the acceptance suite: commutator and adjoint
//! tables, general adjoint matrices, determined equations and invariant PDE
//! term lists for both built-in algebras.

use lieopt_core::expr::parse_expr;
use lieopt_core::poly::Poly;
use lieopt_core::subalgebra::resolve_ab;

pub const HEAT_TABLE1: [[&str; 6]; 6] = [
    ["0", "0", "0", "v1", "-v3", "2*v5"],
    ["0", "0", "0", "2*v2", "2*v1", "4*v4 - 2*v3"],
    ["0", "0", "0", "0", "0", "0"],
    ["-v1", "-2*v2", "0", "0", "v5", "2*v6"],
    ["v3", "-2*v1", "0", "-v5", "0", "0"],
    ["-2*v5", "2*v3 - 4*v4", "0", "-2*v6", "0", "0"],
];

pub const HEAT_TABLE2: [[&str; 6]; 6] = [
    [
        "v1",
        "v2",
        "v3",
        "v4 - eps*v1",
        "v5 + eps*v3",
        "v6 - 2*eps*v5 - eps^2*v3",
    ],
    [
        "v1",
        "v2",
        "v3",
        "v4 - 2*eps*v2",
        "v5 - 2*eps*v1",
        "v6 - 4*eps*v4 + 2*eps*v3 + 4*eps^2*v2",
    ],
    ["v1", "v2", "v3", "v4", "v5", "v6"],
    [
        "exp(eps)*v1",
        "exp(2*eps)*v2",
        "v3",
        "v4",
        "exp(-eps)*v5",
        "exp(-2*eps)*v6",
    ],
    [
        "v1 - eps*v3",
        "v2 + 2*eps*v1 - eps^2*v3",
        "v3",
        "v4 + eps*v5",
        "v5",
        "v6",
    ],
    [
        "v1 + 2*eps*v5",
        "v2 - 2*eps*v3 + 4*eps*v4 + 4*eps^2*v6",
        "v3",
        "v4 + 2*eps*v6",
        "v5",
        "v6",
    ],
];

pub const NS_TABLE3: [[&str; 4]; 4] = [
    ["0", "-v2", "v3", "0"],
    ["v2", "0", "v4", "0"],
    ["-v3", "-v4", "0", "0"],
    ["0", "0", "0", "0"],
];

pub const NS_TABLE4: [[&str; 4]; 4] = [
    ["v1", "exp(eps)*v2", "exp(-eps)*v3", "v4"],
    ["v1 - eps*v2", "v2", "v3 - eps*v4", "v4"],
    ["v1 + eps*v3", "v2 + eps*v4", "v3", "v4"],
    ["v1", "v2", "v3", "v4"],
];

pub const HEAT_PRODUCT: [[&str; 6]; 6] = [
    [
        "exp(eps4)",
        "0",
        "-eps5*exp(eps4)",
        "0",
        "2*eps6*exp(eps4)",
        "0",
    ],
    [
        "2*eps5*exp(2*eps4)",
        "exp(2*eps4)",
        "-(eps5^2 + 2*eps6)*exp(2*eps4)",
        "4*eps6*exp(2*eps4)",
        "4*eps5*eps6*exp(2*eps4)",
        "4*eps6^2*exp(2*eps4)",
    ],
    ["0", "0", "1", "0", "0", "0"],
    [
        "-exp(eps4)*(eps1 + 4*eps2*eps5*exp(eps4))",
        "-2*eps2*exp(2*eps4)",
        "4*eps2*eps6*exp(2*eps4) + eps5*exp(eps4)*(eps1 + 2*eps2*eps5*exp(eps4))",
        "1 - 8*eps2*eps6*exp(2*eps4)",
        "eps5 - 2*eps6*exp(eps4)*(eps1 + 4*eps2*eps5*exp(eps4))",
        "2*eps6*(1 - 4*eps2*eps6*exp(2*eps4))",
    ],
    [
        "-2*eps2*exp(eps4)",
        "0",
        "eps1 + 2*eps2*eps5*exp(eps4)",
        "0",
        "exp(-eps4)*(1 - 4*eps2*eps6*exp(2*eps4))",
        "0",
    ],
    [
        "4*eps2*exp(eps4)*(eps1 + 2*eps2*eps5*exp(eps4))",
        "4*eps2^2*exp(2*eps4)",
        "-(eps1 + 2*eps2*eps5*exp(eps4))^2 + 2*eps2*(1 - 4*eps2*eps6*exp(2*eps4))",
        "-4*eps2*(1 - 4*eps2*eps6*exp(2*eps4))",
        "8*eps2*eps6*exp(eps4)*(eps1 + 2*eps2*eps5*exp(eps4)) - 4*eps2*eps5 - 2*eps1*exp(-eps4)",
        "exp(-2*eps4)*(1 - 4*eps2*eps6*exp(2*eps4))^2",
    ],
];

pub const NS_PRODUCT: [[&str; 4]; 4] = [
    ["1", "-eps2", "eps3", "-eps2*eps3"],
    ["0", "exp(eps1)", "0", "exp(eps1)*eps3"],
    ["0", "0", "exp(-eps1)", "-exp(-eps1)*eps2"],
    ["0", "0", "0", "1"],
];

pub const HEAT_DETERMINED: [&str; 6] = [
    "a1*b4 + 2*a2*b5 - a4*b1 - 2*a5*b2 - lambda*a1",
    "2*a2*b4 - 2*a4*b2 - lambda*a2",
    "-a1*b5 - 2*a2*b6 + a5*b1 + 2*a6*b2 - lambda*a3",
    "2*a1*b6 + a4*b5 - a5*b4 - 2*a6*b1 - lambda*a5",
    "4*a2*b6 - 4*a6*b2 - lambda*a4",
    "2*a4*b6 - 2*a6*b4 - lambda*a6",
];

pub const NS_DETERMINED: [&str; 4] = [
    "lambda*a1",
    "a2*b1 - a1*b2 - lambda*a2",
    "a1*b3 - a3*b1 - lambda*a3",
    "a2*b3 - a3*b2 - lambda*a4",
];

type Terms<'a> = &'a [(&'a str, &'a str)];

fn field(terms: Terms, n: usize) -> Vec<Poly> {
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

pub fn heat_eqs8() -> Vec<Vec<Poly>> {
    let eqs: [Terms; 8] = [
        &[
            ("a1", "a1"),
            ("a2", "a2"),
            ("a3", "a3"),
            ("a4", "a4"),
            ("a5", "a5"),
            ("a6", "a6"),
        ],
        &[
            ("a1", "b1"),
            ("a2", "b2"),
            ("a3", "b3"),
            ("a4", "b4"),
            ("a5", "b5"),
            ("a6", "b6"),
        ],
        &[
            ("b1", "b1"),
            ("b2", "b2"),
            ("b3", "b3"),
            ("b4", "b4"),
            ("b5", "b5"),
            ("b6", "b6"),
        ],
        &[
            ("2*a2", "a1"),
            ("2*b2", "b1"),
            ("-a1", "a3"),
            ("-b1", "b3"),
            ("a4", "a5"),
            ("b4", "b5"),
        ],
        &[
            ("-a4", "a1"),
            ("-b4", "b1"),
            ("a5", "a3"),
            ("b5", "b3"),
            ("-2*a6", "a5"),
            ("-2*b6", "b5"),
        ],
        &[
            ("a1", "a1"),
            ("b1", "b1"),
            ("2*a2", "a2"),
            ("2*b2", "b2"),
            ("-a5", "a5"),
            ("-b5", "b5"),
            ("-2*a6", "a6"),
            ("-2*b6", "b6"),
        ],
        &[
            ("-a5", "a1"),
            ("-b5", "b1"),
            ("-a4", "a2"),
            ("-b4", "b2"),
            ("a6", "a3"),
            ("b6", "b3"),
            ("-2*a6", "a4"),
            ("-2*b6", "b4"),
        ],
        &[
            ("-a2", "a3"),
            ("-b2", "b3"),
            ("2*a2", "a4"),
            ("2*b2", "b4"),
            ("a1", "a5"),
            ("b1", "b5"),
            ("a4", "a6"),
            ("b4", "b6"),
        ],
    ];
    eqs.iter().map(|t| field(t, 6)).collect()
}

pub fn heat_eq1() -> Vec<Poly> {
    field(
        &[
            ("b1", "a1"),
            ("b2", "a2"),
            ("b3", "a3"),
            ("b4", "a4"),
            ("b5", "a5"),
            ("b6", "a6"),
        ],
        6,
    )
}

pub fn ns_eqs6() -> Vec<Vec<Poly>> {
    let eqs: [Terms; 6] = [
        &[("a1", "a1"), ("a2", "a2"), ("a3", "a3"), ("a4", "a4")],
        &[("a1", "b1"), ("a2", "b2"), ("a3", "b3"), ("a4", "b4")],
        &[("b1", "b1"), ("b2", "b2"), ("b3", "b3"), ("b4", "b4")],
        &[("a2", "a2"), ("-a3", "a3"), ("b2", "b2"), ("-b3", "b3")],
        &[("a1", "a2"), ("a3", "a4"), ("b1", "b2"), ("b3", "b4")],
        &[("a1", "a3"), ("a2", "a4"), ("b1", "b3"), ("b2", "b4")],
    ];
    eqs.iter().map(|t| field(t, 4)).collect()
}

pub fn ns_eq1() -> Vec<Poly> {
    field(&[("b1", "a1"), ("b2", "a2"), ("b3", "a3"), ("b4", "a4")], 4)
}
