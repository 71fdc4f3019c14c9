//! `lieopt`: batch CLI over the optimal-system machinery. One operation per
//! subcommand, deterministic output for a fixed (argv, seed).

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lieopt_core::adjoint::{format_adjoint_table, general_adjoint_matrix};
use lieopt_core::algebra::{format_commutator_table, LieAlgebra};
use lieopt_core::equivalence::{
    verify_optimal_system, EquivalenceConfig, EquivalenceContext, EquivalenceVerdict, OptimalSystem,
};
use lieopt_core::error::LieError;
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
    invariant_pde_system, CheckConfig, RationalInvariant,
};
use lieopt_core::poly::ab_lambda_names;
use lieopt_core::ratio::parse_rat;
use lieopt_core::subalgebra::{
    determined_equations, resolve_ab, sample_constrained_pairs, AlgebraPair, LambdaMode,
};

#[derive(Parser)]
#[command(
    name = "lieopt",
    version,
    about = "Two-dimensional optimal systems of Lie subalgebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Zero,
    Nonzero,
}

impl From<ModeArg> for LambdaMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Zero => LambdaMode::Zero,
            ModeArg::Nonzero => LambdaMode::Nonzero,
        }
    }
}

#[derive(Args)]
struct AlgebraArg {
    /// built-in name (heat6, ns4) or a path to an algebra JSON document
    #[arg(long)]
    algebra: String,
}

impl AlgebraArg {
    fn load(&self) -> Result<LieAlgebra, LieError> {
        if lieopt_core::fixtures::builtin_algebra_names().contains(&self.algebra.as_str()) {
            builtin_algebra(&self.algebra)
        } else {
            let text = std::fs::read_to_string(&self.algebra)
                .map_err(|e| LieError::Parse(format!("cannot read '{}': {e}", self.algebra)))?;
            LieAlgebra::from_json_str(&text)
        }
    }

    fn registry_name(&self) -> Option<&str> {
        lieopt_core::fixtures::builtin_algebra_names()
            .iter()
            .copied()
            .find(|n| *n == self.algebra)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the commutator table and the adjoint representation table
    Tables {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// The general adjoint transformation matrix A = A_1 ... A_n
    AdjointMatrix {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// factor order as 1-based comma list, e.g. 2,1,3,4,5,6
        #[arg(long)]
        order: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Determined equations of [w1,w2] = lambda w1
    DeterminedEqs {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// The linear PDE system defining invariants for a lambda class
    InvariantPdes {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Verify a rational invariant exactly or on a case set
    CheckInvariant {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// registered invariant name (delta1..delta4)
        #[arg(long, conflicts_with_all = ["num", "den"])]
        invariant: Option<String>,
        /// numerator expression for a custom invariant
        #[arg(long, requires = "den")]
        num: Option<String>,
        /// denominator expression for a custom invariant
        #[arg(long, requires = "num")]
        den: Option<String>,
        /// constraint case; omitted means the exact unconstrained check
        #[arg(long)]
        case: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// extra direct-flow trials on the first sampled pair
        #[arg(long, default_value_t = 200)]
        flow_trials: usize,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Discover polynomial semi-invariants and assemble weight-zero ratios
    DiscoverInvariants {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Decide adjoint equivalence of two pairs
    CheckEquivalent {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// source pair as JSON {"a": [...], "b": [...]} (rational strings)
        #[arg(long, conflicts_with = "query")]
        source: Option<String>,
        /// target pair as JSON {"a": [...], "b": [...]}
        #[arg(long, conflicts_with = "query")]
        target: Option<String>,
        /// path to a query file {"source": .., "target": ..}
        #[arg(long)]
        query: Option<String>,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Sample pairs satisfying a registered case parametrization exactly
    SampleCase {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long)]
        case: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Verify a whole two-dimensional optimal system
    VerifyOptimalSystem {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// "builtin" or a path to a system JSON document
        #[arg(long, default_value = "builtin")]
        system: String,
        /// drop a representative family by name (negative-control runs)
        #[arg(long)]
        exclude: Option<String>,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        coverage_samples: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Finite-difference residual of a closed-form NS solution
    NsResidual {
        /// ns_radial | ns_tanh | constant
        #[arg(long)]
        solution: String,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        #[arg(long, default_value_t = 6)]
        acc: u32,
        /// fail (exit 1) if the residual exceeds this bound
        #[arg(long)]
        threshold: Option<f64>,
        /// also run the convergence-order sanity check
        #[arg(long, default_value_t = false)]
        convergence: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Finite-difference residual of a reduced-ODE candidate
    OdeResidual {
        /// red1 | red2
        #[arg(long)]
        ode: String,
        /// red1_plus | red1_minus | red2_sech | red2_zero
        #[arg(long)]
        candidate: String,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// the c parameter of red2
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version as "errors" with successful exit
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, LieError> {
    match cmd {
        Command::Tables { algebra, format } => {
            let alg = algebra.load()?;
            match format {
                Format::Text => {
                    println!("commutator table:");
                    print!("{}", format_commutator_table(&alg));
                    println!();
                    println!("adjoint representation table:");
                    print!("{}", format_adjoint_table(&alg)?);
                }
                Format::Json => {
                    let commutator: Vec<Vec<String>> = alg
                        .commutator_table()
                        .iter()
                        .map(|row| row.iter().map(|e| alg.format_element(e)).collect())
                        .collect();
                    let table = lieopt_core::adjoint::adjoint_table(&alg)?;
                    let adjoint: Vec<Vec<String>> = table
                        .iter()
                        .enumerate()
                        .map(|(i, row)| {
                            row.iter()
                                .map(|coords| {
                                    let renamed: Vec<_> =
                                        coords.iter().map(|e| e.rename_var(i, 0)).collect();
                                    lieopt_core::exppoly::format_element(
                                        &renamed,
                                        alg.basis_names(),
                                    )
                                    .replace("eps1", "eps")
                                })
                                .collect()
                        })
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "commutator": commutator,
                            "adjoint": adjoint,
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(0)
        }
        Command::AdjointMatrix {
            algebra,
            order,
            format,
        } => {
            let alg = algebra.load()?;
            let order_vec: Option<Vec<usize>> = match order {
                None => None,
                Some(text) => Some(
                    text.split(',')
                        .map(|t| {
                            t.trim()
                                .parse::<usize>()
                                .map_err(|_| LieError::Parse(format!("bad order entry '{t}'")))
                                .and_then(|i| {
                                    i.checked_sub(1)
                                        .ok_or(LieError::Parse("order entries are 1-based".into()))
                                })
                        })
                        .collect::<Result<_, _>>()?,
                ),
            };
            let a = general_adjoint_matrix(&alg, order_vec.as_deref())?;
            let entries: Vec<Vec<String>> = a
                .matrix
                .iter()
                .map(|row| row.iter().map(|e| e.to_string()).collect())
                .collect();
            match format {
                Format::Text => {
                    let order_text: Vec<String> =
                        a.order.iter().map(|i| (i + 1).to_string()).collect();
                    println!("factor order: {}", order_text.join(","));
                    for (r, row) in entries.iter().enumerate() {
                        for (c, e) in row.iter().enumerate() {
                            println!("a_{}{} = {}", r + 1, c + 1, e);
                        }
                    }
                }
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "order": a.order.iter().map(|i| i + 1).collect::<Vec<_>>(),
                            "entries": entries,
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(0)
        }
        Command::DeterminedEqs { algebra, format } => {
            let alg = algebra.load()?;
            let sys = determined_equations(&alg);
            match format {
                Format::Text => {
                    for line in sys.render() {
                        println!("{line}");
                    }
                }
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "equations": sys.render(),
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(0)
        }
        Command::InvariantPdes {
            algebra,
            mode,
            format,
        } => {
            let alg = algebra.load()?;
            let fields = invariant_pde_system(&alg, mode.into());
            let n = alg.dim();
            match format {
                Format::Text => {
                    println!("{} equations:", fields.len());
                    for f in &fields {
                        println!("[{}] {}", f.label, f.render(n));
                    }
                }
                Format::Json => {
                    let eqs: Vec<_> = fields
                        .iter()
                        .map(|f| json!({"label": f.label, "equation": f.render(n)}))
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(
                            &json!({"count": fields.len(), "equations": eqs})
                        )
                        .unwrap()
                    );
                }
            }
            Ok(0)
        }
        Command::CheckInvariant {
            algebra,
            mode,
            invariant,
            num,
            den,
            case,
            samples,
            seed,
            flow_trials,
            tolerance,
            format,
        } => {
            let alg = algebra.load()?;
            let n = alg.dim();
            let phi: RationalInvariant = match (&invariant, &num, &den) {
                (Some(name), _, _) => {
                    let reg = algebra.registry_name().ok_or_else(|| {
                        LieError::Invalid(
                            "registered invariants exist only for built-in algebras".into(),
                        )
                    })?;
                    registered_invariant(reg, name)?.invariant
                }
                (None, Some(numer), Some(denom)) => RationalInvariant {
                    num: parse_expr(numer)?.to_poly(&|s| resolve_ab(s, n))?,
                    den: parse_expr(denom)?.to_poly(&|s| resolve_ab(s, n))?,
                },
                _ => {
                    return Err(LieError::Invalid(
                        "pass --invariant NAME or --num EXPR --den EXPR".into(),
                    ))
                }
            };
            let constraint = match &case {
                None => None,
                Some(name) => {
                    let reg = algebra.registry_name().ok_or_else(|| {
                        LieError::Invalid("cases exist only for built-in algebras".into())
                    })?;
                    Some(
                        case_registry(reg)?
                            .into_iter()
                            .find(|c| c.name() == name.as_str())
                            .ok_or_else(|| LieError::UnknownFixture(name.clone()))?
                            .constraint,
                    )
                }
            };
            let cfg = CheckConfig {
                samples,
                seed,
                tolerance,
                ..CheckConfig::default()
            };
            let report = check_invariant(&alg, &phi, mode.into(), constraint.as_ref(), &cfg)?;
            // a dedicated long flow run on the first sampled pair
            let flow = match &constraint {
                Some(c) if flow_trials > 0 => {
                    let pairs = sample_constrained_pairs(&alg, c, 1, seed)?;
                    Some(flow_constancy(
                        &alg,
                        &phi,
                        &pairs[0],
                        c.mode,
                        flow_trials,
                        seed,
                    )?)
                }
                _ => None,
            };
            match format {
                Format::Text => {
                    println!("invariant: {}", phi.render(n));
                    println!("seed: {seed}");
                    if let Some(per_field) = &report.exact {
                        for (label, ok) in per_field {
                            println!(
                                "  field {label}: {}",
                                if *ok { "annihilates" } else { "FAILS" }
                            );
                        }
                    }
                    if let Some(d) = report.max_directional {
                        println!("  max directional derivative: {d:.3e}");
                    }
                    if let Some(d) = report.max_flow {
                        println!("  max flow deviation: {d:.3e}");
                    }
                    if let Some(f) = flow {
                        println!("  flow constancy over {flow_trials} trials: {f:.3e}");
                    }
                    println!("result: {}", if report.pass { "PASS" } else { "FAIL" });
                }
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "invariant": phi.render(n),
                            "seed": seed,
                            "exact": report.exact,
                            "max_directional": report.max_directional,
                            "max_flow": report.max_flow,
                            "flow_constancy": flow,
                            "samples": report.samples,
                            "pass": report.pass,
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::DiscoverInvariants {
            algebra,
            mode,
            degree,
            format,
        } => {
            let alg = algebra.load()?;
            let n = alg.dim();
            let mode: LambdaMode = mode.into();
            let semis = discover_semi_invariants(&alg, mode, degree);
            let ratios = assemble_rational_invariants(&alg, mode, &semis);
            let names = ab_lambda_names(n);
            match format {
                Format::Text => {
                    println!("semi-invariants (degree <= {degree}):");
                    for s in &semis {
                        let ws: Vec<String> = s
                            .weights
                            .iter()
                            .map(|(l, w)| format!("{l}:{}", lieopt_core::ratio::format_rat(w)))
                            .collect();
                        println!(
                            "  {}  [bidegree ({},{}); weights {}]",
                            s.poly.to_string_with(&names),
                            s.bidegree.0,
                            s.bidegree.1,
                            ws.join(" ")
                        );
                    }
                    println!("rational invariants:");
                    for r in &ratios {
                        println!("  {}", r.render(n));
                    }
                }
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "semi_invariants": semis
                                .iter()
                                .map(|s| json!({
                                    "poly": s.poly.to_string_with(&names),
                                    "bidegree": [s.bidegree.0, s.bidegree.1],
                                }))
                                .collect::<Vec<_>>(),
                            "rational_invariants": ratios
                                .iter()
                                .map(|r| r.render(n))
                                .collect::<Vec<_>>(),
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(0)
        }
        Command::CheckEquivalent {
            algebra,
            source,
            target,
            query,
            starts,
            tolerance,
            seed,
            format,
        } => {
            let alg = algebra.load()?;
            let (src, tgt) = match (&source, &target, &query) {
                (Some(s), Some(t), None) => (
                    parse_pair_json(s, alg.dim())?,
                    parse_pair_json(t, alg.dim())?,
                ),
                (None, None, Some(path)) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| LieError::Parse(format!("cannot read '{path}': {e}")))?;
                    let v: serde_json::Value = serde_json::from_str(&text)
                        .map_err(|e| LieError::Parse(format!("bad query: {e}")))?;
                    (
                        parse_pair_value(&v["source"], alg.dim())?,
                        parse_pair_value(&v["target"], alg.dim())?,
                    )
                }
                _ => {
                    return Err(LieError::Invalid(
                        "pass --source and --target, or --query FILE".into(),
                    ))
                }
            };
            let ctx = EquivalenceContext::new(&alg)?;
            let cfg = EquivalenceConfig {
                starts,
                tolerance,
                seed,
                ..EquivalenceConfig::default()
            };
            let verdict = ctx.solve(&src, &tgt, &[], &cfg)?;
            match format {
                Format::Text => {
                    println!("seed: {seed}  starts: {starts}  tolerance: {tolerance:e}");
                    match &verdict {
                        EquivalenceVerdict::Equivalent { eps, ks, residual } => {
                            println!("verdict: EQUIVALENT (residual {residual:.3e})");
                            let eps_s: Vec<String> =
                                eps.iter().map(|e| format!("{e:.12}")).collect();
                            println!("  eps = [{}]", eps_s.join(", "));
                            println!(
                                "  k' = [{:.12}, {:.12}, {:.12}, {:.12}]",
                                ks[0], ks[1], ks[2], ks[3]
                            );
                        }
                        EquivalenceVerdict::Unknown {
                            best_residual,
                            starts_used,
                        } => {
                            println!(
                                "verdict: UNKNOWN after {starts_used} starts \
                                 (best residual {best_residual:.3e}); not a proof of inequivalence"
                            );
                        }
                    }
                }
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "seed": seed,
                            "starts": starts,
                            "tolerance": tolerance,
                            "verdict": verdict,
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(0)
        }
        Command::SampleCase {
            algebra,
            case,
            count,
            seed,
            format,
        } => {
            let alg = algebra.load()?;
            let reg = algebra.registry_name().ok_or_else(|| {
                LieError::Invalid("cases exist only for built-in algebras".into())
            })?;
            let constraint = case_registry(reg)?
                .into_iter()
                .find(|c| c.name() == case)
                .ok_or_else(|| LieError::UnknownFixture(case.clone()))?
                .constraint;
            let pairs = sample_constrained_pairs(&alg, &constraint, count, seed)?;
            match format {
                Format::Text => {
                    println!("case {case}, seed {seed}: {} pairs", pairs.len());
                    for p in &pairs {
                        println!("  a = {}  b = {}", fmt_vec(&p.a), fmt_vec(&p.b));
                    }
                }
                Format::Json => {
                    let items: Vec<_> = pairs
                        .iter()
                        .map(|p| {
                            json!({
                                "a": p.a.iter().map(lieopt_core::ratio::format_rat).collect::<Vec<_>>(),
                                "b": p.b.iter().map(lieopt_core::ratio::format_rat).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "case": case, "seed": seed, "pairs": items,
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(0)
        }
        Command::VerifyOptimalSystem {
            algebra,
            system,
            exclude,
            starts,
            tolerance,
            seed,
            coverage_samples,
            format,
        } => {
            let alg = algebra.load()?;
            let reg = algebra.registry_name().ok_or_else(|| {
                LieError::Invalid("optimal systems exist only for built-in algebras".into())
            })?;
            let mut sys: OptimalSystem = if system == "builtin" {
                optimal_system(reg)?
            } else {
                let text = std::fs::read_to_string(&system)
                    .map_err(|e| LieError::Parse(format!("cannot read '{system}': {e}")))?;
                serde_json::from_str(&text)
                    .map_err(|e| LieError::Parse(format!("bad system document: {e}")))?
            };
            if let Some(name) = &exclude {
                let before = sys.reps.len();
                sys.reps.retain(|r| &r.name != name);
                if sys.reps.len() == before {
                    return Err(LieError::UnknownFixture(format!(
                        "representative '{name}' not in the system"
                    )));
                }
            }
            let ctx = EquivalenceContext::new(&alg)?;
            let cases = case_registry(reg)?;
            let invariants = named_invariants(reg);
            let classifiers = sign_classifiers(reg);
            let cfg = EquivalenceConfig {
                starts,
                tolerance,
                seed,
                coverage_samples,
                ..EquivalenceConfig::default()
            };
            let report =
                verify_optimal_system(&ctx, &sys, &cases, &invariants, &classifiers, &cfg)?;
            match format {
                Format::Text => {
                    println!("seed: {seed}  starts: {starts}");
                    print!("{}", report.summary());
                }
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "seed": seed,
                            "pass": report.pass,
                            "summary": report.summary(),
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::NsResidual {
            solution,
            gamma,
            step,
            acc,
            threshold,
            convergence,
            format,
        } => {
            let sol = NsSolution::by_name(&solution, gamma)?;
            let grid = default_grid(&sol, step, acc);
            let max = ns_residual(&sol, &grid)?;
            let conv = if convergence {
                let coarse_grid = GridSpec {
                    h: 0.04,
                    acc: 4,
                    richardson: false,
                    ..grid.clone()
                };
                Some(convergence_order_check(&sol, &coarse_grid)?)
            } else {
                None
            };
            let pass =
                threshold.map(|t| max < t).unwrap_or(true) && conv.map(|c| c.2).unwrap_or(true);
            match format {
                Format::Text => {
                    println!("solution: {solution} (gamma = {gamma})");
                    println!("max |residual| = {max:.6e} (step {step}, order {acc})");
                    if let Some((coarse, fine, ok)) = conv {
                        println!(
                            "convergence: {coarse:.3e} -> {fine:.3e} on halving, \
                             factor {:.1} (needs >= 8) -> {}",
                            coarse / fine,
                            if ok { "pass" } else { "FAIL" }
                        );
                    }
                    if let Some(t) = threshold {
                        println!("threshold {t:e}: {}", if pass { "PASS" } else { "FAIL" });
                    }
                }
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "solution": solution,
                            "gamma": gamma,
                            "max_residual": max,
                            "grid": {"h": step, "acc": acc},
                            "convergence": conv.map(|c| json!({
                                "coarse": c.0, "fine": c.1, "pass": c.2})),
                            "pass": pass,
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(if pass { 0 } else { 1 })
        }
        Command::OdeResidual {
            ode,
            candidate,
            gamma,
            c,
            threshold,
            format,
        } => {
            let which = match ode.as_str() {
                "red1" => ReducedOde::Red1,
                "red2" => ReducedOde::Red2,
                other => return Err(LieError::UnknownFixture(other.into())),
            };
            let cand = OdeSolution::by_name(&candidate, gamma)?;
            let grid = match which {
                ReducedOde::Red1 => OdeGrid {
                    lo: 2.0,
                    hi: 4.0,
                    n: 31,
                    h: 5e-2,
                    acc: 6,
                },
                ReducedOde::Red2 => OdeGrid {
                    lo: -2.0,
                    hi: 2.0,
                    n: 41,
                    h: 1e-2,
                    acc: 6,
                },
            };
            let max = reduced_ode_residual(which, &cand, gamma, c, &grid)?;
            let pass = threshold.map(|t| max < t).unwrap_or(true);
            match format {
                Format::Text => {
                    println!("ode: {ode}  candidate: {candidate}  gamma = {gamma}  c = {c}");
                    println!("max |residual| = {max:.6e}");
                    if let Some(t) = threshold {
                        println!("threshold {t:e}: {}", if pass { "PASS" } else { "FAIL" });
                    }
                }
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "ode": ode, "candidate": candidate, "gamma": gamma, "c": c,
                            "max_residual": max, "pass": pass,
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn default_grid(sol: &NsSolution, h: f64, acc: u32) -> GridSpec {
    match sol {
        NsSolution::Radial { .. } | NsSolution::Constant(_) => GridSpec {
            lo: vec![0.75, -0.35, 1.0],
            hi: vec![1.25, 0.35, 2.0],
            n: vec![4, 4, 3],
            h,
            acc,
            richardson: true,
        },
        NsSolution::Tanh { .. } => GridSpec {
            lo: vec![0.8, -0.4, 1.0],
            hi: vec![1.4, 0.4, 1.5],
            n: vec![4, 4, 2],
            h,
            acc,
            richardson: true,
        },
    }
}

fn fmt_vec(v: &[lieopt_core::ratio::Rat]) -> String {
    let items: Vec<String> = v.iter().map(lieopt_core::ratio::format_rat).collect();
    format!("[{}]", items.join(", "))
}

fn parse_pair_json(text: &str, dim: usize) -> Result<AlgebraPair, LieError> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| LieError::Parse(format!("bad pair JSON: {e}")))?;
    parse_pair_value(&v, dim)
}

fn parse_pair_value(v: &serde_json::Value, dim: usize) -> Result<AlgebraPair, LieError> {
    let get = |key: &str| -> Result<Vec<lieopt_core::ratio::Rat>, LieError> {
        let arr = v[key]
            .as_array()
            .ok_or_else(|| LieError::Parse(format!("pair field '{key}' must be an array")))?;
        if arr.len() != dim {
            return Err(LieError::DimensionMismatch {
                expected: dim,
                got: arr.len(),
            });
        }
        arr.iter()
            .map(|x| match x {
                serde_json::Value::String(s) => parse_rat(s),
                serde_json::Value::Number(n) => parse_rat(&n.to_string()),
                other => Err(LieError::Parse(format!("bad coefficient {other}"))),
            })
            .collect()
    };
    AlgebraPair::new(get("a")?, get("b")?)
}
