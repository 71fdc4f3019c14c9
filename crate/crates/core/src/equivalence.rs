//! Deciding adjoint equivalence of subalgebra pairs by multi-start damped
//! least squares on the 2n algebraic equations, separating pairs by
//! invariants and sign classifiers, and verifying whole optimal systems.
//!
//! An `Equivalent` verdict carries a numeric witness that is re-verified
//! through the exact symbolic adjoint matrix. `Unknown` is an honest verdict:
//! the solver cannot prove inequivalence; only invariant or lambda-class
//! separation does.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::adjoint::{row_mul, GeneralAdjointMatrix, NumericAdjoint};
use crate::algebra::LieAlgebra;
use crate::error::{LieError, Result};
use crate::exppoly::Assignment;
use crate::expr::parse_expr;
use crate::invariants::{sign_with_floor, RationalInvariant};
use crate::poly::Poly;
use crate::ratio::{rat_to_f64, Rat};
use crate::solver::{multi_start_least_squares, SolverConfig};
use crate::subalgebra::{
    classify_pair, lambda_mode_of, sample_constrained_pairs, AlgebraPair, CaseConstraint,
    LambdaMode, PairClass,
};

#[derive(Clone, Debug)]
pub struct EquivalenceConfig {
    pub starts: usize,
    /// squared-norm residual threshold for Equivalent
    pub tolerance: f64,
    pub seed: u64,
    /// |k1 k4 - k2 k3| must clear this floor
    pub singular_floor: f64,
    pub coverage_samples: usize,
    pub coverage_rate: f64,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            tolerance: 1e-10,
            seed: 42,
            singular_floor: 1e-8,
            coverage_samples: 50,
            coverage_rate: 0.95,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum EquivalenceVerdict {
    Equivalent {
        eps: Vec<f64>,
        ks: [f64; 4],
        residual: f64,
    },
    Unknown {
        best_residual: f64,
        starts_used: usize,
    },
}

impl EquivalenceVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceVerdict::Equivalent { .. })
    }
}

/// Shared per-algebra state: the compiled numeric evaluator and the exact
/// symbolic matrix used to re-verify witnesses.
pub struct EquivalenceContext<'a> {
    pub alg: &'a LieAlgebra,
    numeric: NumericAdjoint,
    symbolic: GeneralAdjointMatrix,
}

impl<'a> EquivalenceContext<'a> {
    pub fn new(alg: &'a LieAlgebra) -> Result<Self> {
        Ok(Self {
            alg,
            numeric: NumericAdjoint::new(alg, None)?,
            symbolic: crate::adjoint::general_adjoint_matrix(alg, None)?,
        })
    }

    pub fn numeric(&self) -> &NumericAdjoint {
        &self.numeric
    }

    pub fn symbolic(&self) -> &GeneralAdjointMatrix {
        &self.symbolic
    }

    /// Solves the equivalence equations `(a)A = k1 a' + k2 b'`,
    /// `(b)A = k3 a' + k4 b'` for the group parameters and mixing constants.
    /// In the lambda != 0 class the mixing is constrained upper-triangular
    /// (k2 = 0). Privileged starts (closed-form witnesses) run first.
    pub fn solve(
        &self,
        source: &AlgebraPair,
        target: &AlgebraPair,
        privileged: &[(Vec<f64>, [f64; 4])],
        cfg: &EquivalenceConfig,
    ) -> Result<EquivalenceVerdict> {
        let mode = self.mode_gate(source, target)?;
        let n = self.alg.dim();
        let with_k2 = mode == LambdaMode::Zero;
        let nvars = n + if with_k2 { 4 } else { 3 };
        let nres = 2 * n + 1;

        let (sa, sb) = source.to_f64();
        let (ta, tb) = target.to_f64();
        let floor = cfg.singular_floor;
        let residual = |x: &[f64], out: &mut Vec<f64>| {
            let eps = &x[..n];
            let (k1, k2, k3, k4) = unpack_ks(x, n, with_k2);
            let m = self.numeric.matrix_at(eps);
            let ra = row_mul(&sa, &m);
            let rb = row_mul(&sb, &m);
            for j in 0..n {
                out[j] = ra[j] - (k1 * ta[j] + k2 * tb[j]);
                out[n + j] = rb[j] - (k3 * ta[j] + k4 * tb[j]);
            }
            let det = (k1 * k4 - k2 * k3).abs();
            // keep the optimizer away from degenerate mixings; the boundary
            // e^eps -> 0 otherwise fakes solutions with det ~ sqrt(cost)
            out[2 * n] = (1e-3 - det).max(0.0) * 1e4;
        };

        let mut starts: Vec<Vec<f64>> = Vec::new();
        // the trivial start covers source == target immediately
        starts.push(pack_start(&vec![0.0; n], &[1.0, 0.0, 0.0, 1.0], with_k2));
        for (eps, ks) in privileged {
            starts.push(pack_start(eps, ks, with_k2));
        }

        let scfg = SolverConfig {
            starts: cfg.starts,
            seed: cfg.seed,
            range: (-3.0, 3.0),
            max_iterations: 60,
            cost_target: 1e-26,
        };
        let outcome = multi_start_least_squares(&residual, nvars, nres, &starts, &scfg);

        // pure residual without the penalty row
        let mut r = vec![0.0; nres];
        residual(&outcome.x, &mut r);
        let pure: f64 = r[..2 * n].iter().map(|v| v * v).sum();
        let (k1, k2, k3, k4) = unpack_ks(&outcome.x, n, with_k2);
        let det = (k1 * k4 - k2 * k3).abs();

        if pure < cfg.tolerance && det > floor {
            let eps = outcome.x[..n].to_vec();
            let ks = [k1, k2, k3, k4];
            // near-singular boundary escapes pass the raw thresholds but fail
            // the exact-matrix check; they are not witnesses
            if self.verify_witness(source, target, &eps, &ks)? {
                return Ok(EquivalenceVerdict::Equivalent {
                    eps,
                    ks,
                    residual: pure,
                });
            }
        }
        Ok(EquivalenceVerdict::Unknown {
            best_residual: pure,
            starts_used: outcome.starts_used,
        })
    }

    /// Both pairs must be normalizer-form and in the same lambda class
    /// (Remark-1 gate: lambda = 0 never maps to lambda != 0).
    fn mode_gate(&self, source: &AlgebraPair, target: &AlgebraPair) -> Result<LambdaMode> {
        let ms = pair_mode(self.alg, source)?;
        let mt = pair_mode(self.alg, target)?;
        if ms != mt {
            return Err(LieError::ModeMismatch);
        }
        Ok(ms)
    }

    /// Substitutes a witness back through the exact symbolic matrix; every
    /// coordinate must reproduce the target combination to 1e-9.
    fn verify_witness(
        &self,
        source: &AlgebraPair,
        target: &AlgebraPair,
        eps: &[f64],
        ks: &[f64; 4],
    ) -> Result<bool> {
        let n = self.alg.dim();
        let at = Assignment::from_slice(eps);
        let (sa, sb) = source.to_f64();
        let (ta, tb) = target.to_f64();
        let ra = self.symbolic.apply(&sa, &at)?;
        let rb = self.symbolic.apply(&sb, &at)?;
        for j in 0..n {
            let want_a = ks[0] * ta[j] + ks[1] * tb[j];
            let want_b = ks[2] * ta[j] + ks[3] * tb[j];
            let tol_a = 1e-9 * (1.0 + want_a.abs());
            let tol_b = 1e-9 * (1.0 + want_b.abs());
            if (ra[j] - want_a).abs() > tol_a || (rb[j] - want_b).abs() > tol_b {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn unpack_ks(x: &[f64], n: usize, with_k2: bool) -> (f64, f64, f64, f64) {
    if with_k2 {
        (x[n], x[n + 1], x[n + 2], x[n + 3])
    } else {
        (x[n], 0.0, x[n + 1], x[n + 2])
    }
}

fn pack_start(eps: &[f64], ks: &[f64; 4], with_k2: bool) -> Vec<f64> {
    let mut v = eps.to_vec();
    if with_k2 {
        v.extend_from_slice(ks);
    } else {
        v.extend_from_slice(&[ks[0], ks[2], ks[3]]);
    }
    v
}

pub fn pair_mode(alg: &LieAlgebra, pair: &AlgebraPair) -> Result<LambdaMode> {
    let class = classify_pair(alg, pair)?;
    lambda_mode_of(&class).ok_or_else(|| LieError::NotNormalizerForm(format!("{class:?}")))
}

// --- separation -------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct NamedInvariant {
    pub name: String,
    pub mode: LambdaMode,
    pub invariant: RationalInvariant,
}

#[derive(Clone, Debug)]
pub struct SignClassifier {
    pub name: String,
    pub mode: LambdaMode,
    pub poly: Poly,
}

#[derive(Clone, Debug)]
pub enum SeparationEvidence {
    /// lambda classes differ; certified by the Remark-1 gate
    ModeClass(LambdaMode, LambdaMode),
    InvariantValue {
        name: String,
        left: f64,
        right: f64,
    },
    /// sign classifier differs; reported but not upgraded to certified
    ClassifierSign {
        name: String,
        left: i32,
        right: i32,
    },
}

#[derive(Clone, Debug, Default)]
pub struct Separation {
    pub evidence: Vec<SeparationEvidence>,
    pub notes: Vec<String>,
}

impl Separation {
    pub fn separated(&self) -> bool {
        !self.evidence.is_empty()
    }
}

/// Evaluates invariants and registered sign classifiers at both pairs.
pub fn separation_report(
    alg: &LieAlgebra,
    left: &AlgebraPair,
    right: &AlgebraPair,
    invariants: &[NamedInvariant],
    classifiers: &[SignClassifier],
) -> Result<Separation> {
    let mut out = Separation::default();
    let ml = pair_mode(alg, left)?;
    let mr = pair_mode(alg, right)?;
    if ml != mr {
        out.evidence.push(SeparationEvidence::ModeClass(ml, mr));
        return Ok(out);
    }
    let xl = coords_f64(left);
    let xr = coords_f64(right);
    for inv in invariants {
        if inv.mode != ml {
            continue;
        }
        match (inv.invariant.eval_f64(&xl), inv.invariant.eval_f64(&xr)) {
            (Some(vl), Some(vr)) => {
                let scale = vl.abs().max(vr.abs()).max(1.0);
                if (vl - vr).abs() > 1e-6 * scale {
                    out.evidence.push(SeparationEvidence::InvariantValue {
                        name: inv.name.clone(),
                        left: vl,
                        right: vr,
                    });
                }
            }
            _ => out
                .notes
                .push(format!("{}: pole at one of the pairs; skipped", inv.name)),
        }
    }
    for clf in classifiers {
        if clf.mode != ml {
            continue;
        }
        let vl = clf.poly.eval_f64(&xl);
        let vr = clf.poly.eval_f64(&xr);
        let floor = 1e-9;
        let (sl, sr) = (sign_with_floor(vl, floor), sign_with_floor(vr, floor));
        if sl != 0 && sr != 0 && sl != sr {
            out.evidence.push(SeparationEvidence::ClassifierSign {
                name: clf.name.clone(),
                left: sl,
                right: sr,
            });
        }
    }
    Ok(out)
}

fn coords_f64(p: &AlgebraPair) -> Vec<f64> {
    let (a, b) = p.to_f64();
    a.into_iter().chain(b).collect()
}

// --- optimal systems ---------------------------------------------------------

/// One representative family of an optimal system; coefficient expressions may
/// reference a single real parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Representative {
    pub name: String,
    pub a: Vec<String>,
    pub b: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
}

impl Representative {
    pub fn fixed(name: &str, a: Vec<String>, b: Vec<String>) -> Self {
        Self {
            name: name.into(),
            a,
            b,
            param: None,
        }
    }

    pub fn instantiate(&self, value: Option<&Rat>) -> Result<AlgebraPair> {
        let lookup = |s: &str| -> Option<Rat> {
            match (&self.param, value) {
                (Some(p), Some(v)) if p == s => Some(v.clone()),
                _ => None,
            }
        };
        let eval = |exprs: &[String]| -> Result<Vec<Rat>> {
            exprs
                .iter()
                .map(|e| parse_expr(e)?.eval_rat(&lookup))
                .collect()
        };
        AlgebraPair::new(eval(&self.a)?, eval(&self.b)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimalSystem {
    pub algebra: String,
    pub reps: Vec<Representative>,
    /// parameter values used to instantiate parametrized families for the
    /// pairwise checks
    pub param_samples: Vec<String>,
}

/// Affine map of a registered invariant fixing the representative parameter:
/// `param = offset + scale * invariant(sample)`.
#[derive(Clone, Debug)]
pub struct ParamRule {
    pub invariant: RationalInvariant,
    pub scale: Rat,
    pub offset: Rat,
}

impl ParamRule {
    pub fn eval_f64(&self, x: &[f64]) -> Option<f64> {
        self.invariant
            .eval_f64(x)
            .map(|v| rat_to_f64(&self.offset) + rat_to_f64(&self.scale) * v)
    }
}

/// Closed-form witness evaluator: (a, b) coordinates to (eps, k').
pub type WitnessFn = fn(&[f64], &[f64]) -> Option<(Vec<f64>, [f64; 4])>;

/// A registered case: constraint set, designated representative and its
/// parameter rule, plus the closed-form witness evaluated at samples.
pub struct CaseSpec {
    pub constraint: CaseConstraint,
    pub representative: String,
    /// rule picking the representative parameter from a sample
    pub rep_param: Option<ParamRule>,
    /// closed-form witness (eps, k') as a privileged solver start
    pub witness: WitnessFn,
}

impl CaseSpec {
    pub fn name(&self) -> &str {
        &self.constraint.name
    }
}

#[derive(Clone, Debug)]
pub struct RepInstance {
    pub label: String,
    pub family: String,
    pub pair: AlgebraPair,
    pub mode: LambdaMode,
    pub lambda: Rat,
}

#[derive(Clone, Debug)]
pub enum PairOutcome {
    ModeSeparated,
    Separated(String),
    SolverUnknown { best_residual: f64 },
    Equivalent { residual: f64 },
}

#[derive(Clone, Debug)]
pub struct PairEntry {
    pub left: String,
    pub right: String,
    pub outcome: PairOutcome,
}

#[derive(Clone, Debug)]
pub struct CoverageEntry {
    pub case: String,
    pub samples: usize,
    pub reached: usize,
    pub pass: bool,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct OptimalSystemReport {
    pub rep_checks: Vec<(String, bool, String)>,
    pub pairs: Vec<PairEntry>,
    pub coverage: Vec<CoverageEntry>,
    pub pass: bool,
}

impl OptimalSystemReport {
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str("representatives:\n");
        for (label, ok, info) in &self.rep_checks {
            out.push_str(&format!(
                "  {label}: {} ({info})\n",
                if *ok { "normalizer-form" } else { "INVALID" }
            ));
        }
        out.push_str("pairwise:\n");
        for p in &self.pairs {
            let line = match &p.outcome {
                PairOutcome::ModeSeparated => "separated by lambda class".to_string(),
                PairOutcome::Separated(ev) => format!("separated ({ev})"),
                PairOutcome::SolverUnknown { best_residual } => {
                    format!("solver-unknown (best residual {best_residual:.3e})")
                }
                PairOutcome::Equivalent { residual } => {
                    format!("EQUIVALENT (residual {residual:.3e})")
                }
            };
            out.push_str(&format!("  {} vs {}: {}\n", p.left, p.right, line));
        }
        out.push_str("coverage:\n");
        for c in &self.coverage {
            out.push_str(&format!(
                "  case {}: {}/{} reached{} -> {}\n",
                c.case,
                c.reached,
                c.samples,
                if c.note.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", c.note)
                },
                if c.pass { "pass" } else { "FAIL" }
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

/// Full optimal-system verification: per-representative subalgebra checks,
/// pairwise separation escalating to the solver, and case-to-representative
/// coverage with the registry's closed-form witnesses as privileged starts.
pub fn verify_optimal_system(
    ctx: &EquivalenceContext,
    system: &OptimalSystem,
    cases: &[CaseSpec],
    invariants: &[NamedInvariant],
    classifiers: &[SignClassifier],
    cfg: &EquivalenceConfig,
) -> Result<OptimalSystemReport> {
    let alg = ctx.alg;
    // 1. instantiate
    let mut instances: Vec<RepInstance> = Vec::new();
    let param_values: Vec<Rat> = system
        .param_samples
        .iter()
        .map(|s| crate::ratio::parse_rat(s))
        .collect::<Result<_>>()?;
    for rep in &system.reps {
        let values: Vec<Option<Rat>> = if rep.param.is_some() {
            param_values.iter().cloned().map(Some).collect()
        } else {
            vec![None]
        };
        for v in values {
            let pair = rep.instantiate(v.as_ref())?;
            let class = classify_pair(alg, &pair)?;
            let (mode, lambda) = match &class {
                PairClass::NormalizerForm(l) => (
                    if l.is_zero() {
                        LambdaMode::Zero
                    } else {
                        LambdaMode::Nonzero
                    },
                    l.clone(),
                ),
                other => {
                    return Err(LieError::NotNormalizerForm(format!(
                        "representative {}: {other:?}",
                        rep.name
                    )))
                }
            };
            let label = match &v {
                Some(val) => format!(
                    "{}[{}={}]",
                    rep.name,
                    rep.param.as_deref().unwrap_or("t"),
                    crate::ratio::format_rat(val)
                ),
                None => rep.name.clone(),
            };
            instances.push(RepInstance {
                label,
                family: rep.name.clone(),
                pair,
                mode,
                lambda,
            });
        }
    }

    let mut pass = true;
    let rep_checks: Vec<(String, bool, String)> = instances
        .iter()
        .map(|inst| {
            (
                inst.label.clone(),
                true,
                format!("lambda = {}", crate::ratio::format_rat(&inst.lambda)),
            )
        })
        .collect();

    // 2. pairwise
    let mut pairs = Vec::new();
    for i in 0..instances.len() {
        for j in (i + 1)..instances.len() {
            let (l, r) = (&instances[i], &instances[j]);
            let outcome = if l.mode != r.mode {
                PairOutcome::ModeSeparated
            } else {
                let sep = separation_report(alg, &l.pair, &r.pair, invariants, classifiers)?;
                if sep.separated() {
                    let ev = sep
                        .evidence
                        .iter()
                        .map(|e| match e {
                            SeparationEvidence::ModeClass(..) => "lambda class".to_string(),
                            SeparationEvidence::InvariantValue { name, left, right } => {
                                format!("{name}: {left:.6} vs {right:.6}")
                            }
                            SeparationEvidence::ClassifierSign { name, left, right } => {
                                format!("sign({name}): {left} vs {right}")
                            }
                        })
                        .collect::<Vec<_>>()
                        .join("; ");
                    PairOutcome::Separated(ev)
                } else {
                    match ctx.solve(&l.pair, &r.pair, &[], cfg)? {
                        EquivalenceVerdict::Equivalent { residual, .. } => {
                            pass = false;
                            PairOutcome::Equivalent { residual }
                        }
                        EquivalenceVerdict::Unknown { best_residual, .. } => {
                            PairOutcome::SolverUnknown { best_residual }
                        }
                    }
                }
            };
            pairs.push(PairEntry {
                left: l.label.clone(),
                right: r.label.clone(),
                outcome,
            });
        }
    }

    // 3. coverage
    let mut coverage = Vec::new();
    for case in cases {
        let samples =
            sample_constrained_pairs(alg, &case.constraint, cfg.coverage_samples, cfg.seed)?;
        let designated: Vec<&RepInstance> = instances
            .iter()
            .filter(|inst| inst.family == case.representative)
            .collect();
        let mut reached = 0usize;
        let mut note = String::new();
        for sample in &samples {
            let (sa, sb) = sample.to_f64();
            // designated representative, instantiated at the sample's
            // invariant value when the family is parametrized
            let target: Option<AlgebraPair> = if designated.is_empty() {
                None
            } else if let Some(rule) = &case.rep_param {
                let x: Vec<f64> = sa.iter().chain(sb.iter()).copied().collect();
                let val = rule.eval_f64(&x).ok_or_else(|| {
                    LieError::PoleEncountered(format!(
                        "representative parameter rule poles on case {}",
                        case.name()
                    ))
                })?;
                let family = system
                    .reps
                    .iter()
                    .find(|r| r.name == case.representative)
                    .expect("designated family present");
                let val_rat = approximate_rat(val);
                Some(family.instantiate(Some(&val_rat))?)
            } else {
                Some(designated[0].pair.clone())
            };
            match target {
                Some(tgt) => {
                    let privileged: Vec<(Vec<f64>, [f64; 4])> =
                        (case.witness)(&sa, &sb).into_iter().collect();
                    if let EquivalenceVerdict::Equivalent { .. } =
                        ctx.solve(sample, &tgt, &privileged, cfg)?
                    {
                        reached += 1;
                    }
                }
                None => {
                    // designated representative missing: try the remaining
                    // same-mode instances; reached only if one is hit
                    let mode = pair_mode(alg, sample)?;
                    let mut hit = false;
                    for inst in instances.iter().filter(|i| i.mode == mode) {
                        if let EquivalenceVerdict::Equivalent { .. } =
                            ctx.solve(sample, &inst.pair, &[], cfg)?
                        {
                            hit = true;
                            break;
                        }
                    }
                    if hit {
                        reached += 1;
                    }
                    note = format!(
                        "designated representative '{}' absent from the system",
                        case.representative
                    );
                }
            }
        }
        let rate_ok = (reached as f64) >= cfg.coverage_rate * samples.len() as f64;
        if !rate_ok {
            pass = false;
        }
        coverage.push(CoverageEntry {
            case: case.name().to_string(),
            samples: samples.len(),
            reached,
            pass: rate_ok,
            note,
        });
    }

    Ok(OptimalSystemReport {
        rep_checks,
        pairs,
        coverage,
        pass,
    })
}

/// Best small-denominator rational approximation used to instantiate
/// parametrized representatives at sampled invariant values. Case parameter
/// rules are rational functions of rational samples, so the value is exact up
/// to f64 rounding; a continued-fraction reconstruction recovers it.
pub fn approximate_rat(v: f64) -> Rat {
    if !v.is_finite() {
        return Rat::zero();
    }
    let mut x = v - v.floor();
    let (mut p_prev, mut q_prev) = (1i64, 0i64);
    let (mut p, mut q) = (v.floor() as i64, 1i64);
    for _ in 0..30 {
        if (p as f64 / q as f64 - v).abs() <= 1e-12 * (1.0 + v.abs()) || x.abs() < 1e-14 {
            break;
        }
        x = 1.0 / x;
        let a = x.floor();
        if !a.is_finite() || a.abs() > 1e15 {
            break;
        }
        let ai = a as i64;
        let np = ai.checked_mul(p).and_then(|t| t.checked_add(p_prev));
        let nq = ai.checked_mul(q).and_then(|t| t.checked_add(q_prev));
        let (Some(np), Some(nq)) = (np, nq) else {
            break;
        };
        (p_prev, q_prev) = (p, q);
        (p, q) = (np, nq);
        x -= a;
    }
    Rat::new(p.into(), q.into())
}
