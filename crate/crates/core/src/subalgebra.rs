//! The refined two-dimensional subalgebra condition `[w1,w2] = lambda*w1`:
//! determined equations, pair classification and seeded sampling of the
//! per-case constraint parametrizations.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, LieAlgebra};
use crate::error::{LieError, Result};
use crate::expr::{ab_symbol_index, parse_expr, Expr};
use crate::linalg::RatMatrix;
use crate::poly::{ab_lambda_names, Mono, Poly};
use crate::ratio::{rat_sign, Rat};

/// A candidate two-dimensional subalgebra span {w1, w2}; the two coefficient
/// vectors must be linearly independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPair {
    pub a: Vec<Rat>,
    pub b: Vec<Rat>,
}

impl AlgebraPair {
    pub fn new(a: Vec<Rat>, b: Vec<Rat>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(LieError::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        let m = RatMatrix::from_rows(vec![a.clone(), b.clone()]);
        if m.rank() < 2 {
            return Err(LieError::DegeneratePair);
        }
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn w1(&self) -> AlgebraElement {
        AlgebraElement(self.a.clone())
    }

    pub fn w2(&self) -> AlgebraElement {
        AlgebraElement(self.b.clone())
    }

    pub fn to_f64(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.a.iter().map(crate::ratio::rat_to_f64).collect(),
            self.b.iter().map(crate::ratio::rat_to_f64).collect(),
        )
    }

    /// Concatenated (a, b) coordinates for polynomial evaluation.
    pub fn coords(&self) -> Vec<Rat> {
        self.a.iter().chain(self.b.iter()).cloned().collect()
    }
}

/// Classification of `[w1, w2]` against span{w1, w2}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairClass {
    /// `[w1,w2] = lambda*w1` — the refined normalizer condition.
    NormalizerForm(Rat),
    /// `[w1,w2] = lambda*w1 + mu*w2` with `mu != 0`.
    GeneralClosed(Rat, Rat),
    /// `[w1,w2]` lies outside the span: not a subalgebra.
    NotClosed,
}

/// Whether a pair's lambda is zero; the two classes are never adjoint-mixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LambdaMode {
    Zero,
    Nonzero,
}

/// Polynomial system in the symbols a_1..a_n, b_1..b_n, lambda.
#[derive(Clone, Debug)]
pub struct PolynomialSystem {
    pub dim: usize,
    /// (coordinate index k, polynomial that must vanish)
    pub equations: Vec<(usize, Poly)>,
}

impl PolynomialSystem {
    pub fn lambda_var(&self) -> usize {
        2 * self.dim
    }

    /// Exact residuals at a pair with a given lambda.
    pub fn eval_at(&self, pair: &AlgebraPair, lambda: &Rat) -> Vec<Rat> {
        let mut vals = pair.coords();
        vals.push(lambda.clone());
        self.equations
            .iter()
            .map(|(_, p)| p.eval_rat(&vals))
            .collect()
    }

    pub fn render(&self) -> Vec<String> {
        let names = ab_lambda_names(self.dim);
        self.equations
            .iter()
            .map(|(_, p)| format!("{} = 0", p.to_string_with(&names)))
            .collect()
    }
}

/// The determined equations of `[w1,w2] = lambda*w1`: for each coordinate k,
/// `sum_ij a_i b_j C_ij^k - lambda*a_k = 0`. Identically-zero coordinates are
/// dropped; ordering follows k.
pub fn determined_equations(alg: &LieAlgebra) -> PolynomialSystem {
    let n = alg.dim();
    let lambda = 2 * n;
    let mut eqs = Vec::new();
    for k in 0..n {
        let mut p = Poly::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let c = alg.bracket_basis(i, j).0[k].clone();
                if c.is_zero() {
                    continue;
                }
                // a_i b_j - a_j b_i times C_ij^k
                let m1 = Mono(vec![(i, 1), (n + j, 1)]);
                let m2 = Mono(vec![(j, 1), (n + i, 1)]);
                p = p.add(&Poly::from_terms([(m1, c.clone()), (m2, -c)]));
            }
        }
        // - lambda * a_k
        let ml = Mono(vec![(k, 1), (lambda, 1)]);
        p = p.add(&Poly::from_terms([(ml, -Rat::from_integer(1.into()))]));
        if !p.is_zero() {
            eqs.push((k, p));
        }
    }
    PolynomialSystem {
        dim: n,
        equations: eqs,
    }
}

/// Computes `[w1,w2]` exactly and solves for (lambda, mu) in span{w1,w2}.
pub fn classify_pair(alg: &LieAlgebra, pair: &AlgebraPair) -> Result<PairClass> {
    let c = alg.bracket(&pair.w1(), &pair.w2())?;
    let n = alg.dim();
    let mut m = RatMatrix::zeros(n, 2);
    for i in 0..n {
        m[(i, 0)] = pair.a[i].clone();
        m[(i, 1)] = pair.b[i].clone();
    }
    match m.solve(&c.0) {
        None => Ok(PairClass::NotClosed),
        Some(sol) => {
            let (lambda, mu) = (sol[0].clone(), sol[1].clone());
            if mu.is_zero() {
                Ok(PairClass::NormalizerForm(lambda))
            } else {
                Ok(PairClass::GeneralClosed(lambda, mu))
            }
        }
    }
}

pub fn lambda_mode_of(class: &PairClass) -> Option<LambdaMode> {
    match class {
        PairClass::NormalizerForm(l) => Some(if l.is_zero() {
            LambdaMode::Zero
        } else {
            LambdaMode::Nonzero
        }),
        _ => None,
    }
}

/// A case parametrization: ordered substitutions defining the dependent
/// coordinates plus sign/nonzero filters on the free draw. Serializable so
/// user constraints can come in as JSON substitution lists.
#[derive(Clone, Debug)]
pub struct CaseConstraint {
    pub name: String,
    pub mode: LambdaMode,
    /// symbols forced to zero, e.g. ["a2", "a4", "a6"]
    pub zeros: Vec<String>,
    /// ordered substitutions sym := expr(free syms and earlier syms)
    pub subs: Vec<(String, Expr)>,
    /// expressions that must be nonzero on samples
    pub nonzero: Vec<Expr>,
    /// expressions that must be strictly positive / negative
    pub positive: Vec<Expr>,
    pub negative: Vec<Expr>,
}

#[derive(Serialize, Deserialize)]
struct SubstitutionEntry {
    sym: String,
    expr: String,
}

impl CaseConstraint {
    pub fn empty(name: &str, mode: LambdaMode) -> Self {
        Self {
            name: name.into(),
            mode,
            zeros: vec![],
            subs: vec![],
            nonzero: vec![],
            positive: vec![],
            negative: vec![],
        }
    }

    /// Parses the JSON substitution-list form:
    /// `[{"sym":"a1","expr":"a4*a5/(2*a6)"}, ...]`.
    pub fn from_json_subs(name: &str, mode: LambdaMode, json: &str) -> Result<Self> {
        let entries: Vec<SubstitutionEntry> = serde_json::from_str(json)
            .map_err(|e| LieError::Parse(format!("bad substitution list: {e}")))?;
        let mut subs = Vec::new();
        for e in entries {
            subs.push((e.sym, parse_expr(&e.expr)?));
        }
        Ok(Self {
            name: name.into(),
            mode,
            zeros: vec![],
            subs,
            nonzero: vec![],
            positive: vec![],
            negative: vec![],
        })
    }

    fn bound_symbols(&self) -> Vec<String> {
        self.zeros
            .iter()
            .cloned()
            .chain(self.subs.iter().map(|(s, _)| s.clone()))
            .collect()
    }
}

/// Draws one rational from the bounded set {±1..±9}/{1..4}.
fn draw_rat(rng: &mut ChaCha8Rng) -> Rat {
    let num: i64 = loop {
        let v = rng.gen_range(-9..=9);
        if v != 0 {
            break v;
        }
    };
    let den: i64 = rng.gen_range(1..=4);
    crate::ratio::rat2(num, den)
}

/// Deterministic sampling of pairs satisfying a case parametrization exactly;
/// every returned pair is re-verified against the determined equations.
pub fn sample_constrained_pairs(
    alg: &LieAlgebra,
    constraint: &CaseConstraint,
    count: usize,
    seed: u64,
) -> Result<Vec<AlgebraPair>> {
    let n = alg.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = constraint.bound_symbols();
    let all_syms: Vec<String> = (1..=n)
        .map(|i| format!("a{i}"))
        .chain((1..=n).map(|i| format!("b{i}")))
        .collect();
    let free: Vec<String> = all_syms
        .iter()
        .filter(|s| !bound.contains(s))
        .cloned()
        .collect();

    let system = determined_equations(alg);
    let mut out = Vec::with_capacity(count);
    let max_retries = 500 + 200 * count;
    let mut retries = 0;
    while out.len() < count {
        if retries > max_retries {
            return Err(LieError::ConstraintUnsatisfiable {
                name: constraint.name.clone(),
                retries,
            });
        }
        retries += 1;

        let mut vals: BTreeMap<String, Rat> = BTreeMap::new();
        for z in &constraint.zeros {
            vals.insert(z.clone(), Rat::zero());
        }
        for s in &free {
            vals.insert(s.clone(), draw_rat(&mut rng));
        }
        let mut ok = true;
        for (sym, expr) in &constraint.subs {
            match expr.eval_rat(&|s| vals.get(s).cloned()) {
                Ok(v) => {
                    vals.insert(sym.clone(), v);
                }
                Err(_) => {
                    ok = false; // hit a case denominator zero; redraw
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let lk = |s: &str| vals.get(s).cloned();
        let filters_hold = constraint
            .nonzero
            .iter()
            .all(|e| e.eval_rat(&lk).map(|v| !v.is_zero()).unwrap_or(false))
            && constraint
                .positive
                .iter()
                .all(|e| e.eval_rat(&lk).map(|v| rat_sign(&v) > 0).unwrap_or(false))
            && constraint
                .negative
                .iter()
                .all(|e| e.eval_rat(&lk).map(|v| rat_sign(&v) < 0).unwrap_or(false));
        if !filters_hold {
            continue;
        }

        let a: Vec<Rat> = (1..=n).map(|i| vals[&format!("a{i}")].clone()).collect();
        let b: Vec<Rat> = (1..=n).map(|i| vals[&format!("b{i}")].clone()).collect();
        let Ok(pair) = AlgebraPair::new(a, b) else {
            continue;
        };

        // re-substitution: the pair must satisfy its determined equations
        // exactly, with lambda from the classification
        let class = classify_pair(alg, &pair)?;
        let Some(mode) = lambda_mode_of(&class) else {
            continue;
        };
        if mode != constraint.mode {
            continue;
        }
        let PairClass::NormalizerForm(lambda) = &class else {
            unreachable!()
        };
        let residuals = system.eval_at(&pair, lambda);
        if residuals.iter().any(|r| !r.is_zero()) {
            return Err(LieError::Invalid(format!(
                "case '{}' produced a pair violating its determined equations",
                constraint.name
            )));
        }
        out.push(pair);
    }
    Ok(out)
}

/// Exact symbolic lambda of a case at a sampled pair, when needed by callers.
pub fn pair_lambda(alg: &LieAlgebra, pair: &AlgebraPair) -> Result<Rat> {
    match classify_pair(alg, pair)? {
        PairClass::NormalizerForm(l) => Ok(l),
        other => Err(LieError::NotNormalizerForm(format!("{other:?}"))),
    }
}

/// Normalizes an equation to a canonical primitive representative and renders
/// it; used by golden tests that compare up to overall scale and sign.
pub fn normalized_equation_string(p: &Poly, n: usize) -> String {
    p.primitive_normalized().to_string_with(&ab_lambda_names(n))
}

/// Resolves "a3"/"b1"/"lambda" to the polynomial variable index.
pub fn resolve_ab(name: &str, n: usize) -> Option<usize> {
    ab_symbol_index(name, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{builtin_algebra, heat_case, ns_case};
    use crate::ratio::rat;

    #[test]
    fn determined_equations_heat_count_and_sample() {
        let alg = builtin_algebra("heat6").unwrap();
        let sys = determined_equations(&alg);
        assert_eq!(sys.equations.len(), 6);
        // contains 2 a2 b4 - 2 a4 b2 - lambda a2 = 0 (coordinate k = 2)
        let names = ab_lambda_names(6);
        let rendered: Vec<String> = sys
            .equations
            .iter()
            .map(|(_, p)| p.to_string_with(&names))
            .collect();
        assert!(
            rendered
                .iter()
                .any(|s| s.contains("a2*b4") && s.contains("a4*b2")),
            "{rendered:?}"
        );
    }

    #[test]
    fn determined_equations_ns() {
        let alg = builtin_algebra("ns4").unwrap();
        let sys = determined_equations(&alg);
        assert_eq!(sys.equations.len(), 4);
        // first equation is -lambda a1 = 0 (overall sign free)
        let first = normalized_equation_string(&sys.equations[0].1, 4);
        assert_eq!(first, "a1*lambda");
    }

    #[test]
    fn abelian_determined_equations() {
        let alg = LieAlgebra::new(3, vec!["v1".into(), "v2".into(), "v3".into()], &[]).unwrap();
        let sys = determined_equations(&alg);
        assert_eq!(sys.equations.len(), 3);
        for (k, p) in &sys.equations {
            assert_eq!(
                normalized_equation_string(p, 3),
                format!("a{}*lambda", k + 1)
            );
        }
    }

    #[test]
    fn classify_examples() {
        let heat = builtin_algebra("heat6").unwrap();
        let e = |i: usize| {
            let mut v = vec![Rat::zero(); 6];
            v[i - 1] = rat(1);
            v
        };
        // {v6, v3}: [v6,v3] = 0
        let p = AlgebraPair::new(e(6), e(3)).unwrap();
        assert_eq!(
            classify_pair(&heat, &p).unwrap(),
            PairClass::NormalizerForm(rat(0))
        );
        // {v1, v2}: commuting
        let p = AlgebraPair::new(e(1), e(2)).unwrap();
        assert_eq!(
            classify_pair(&heat, &p).unwrap(),
            PairClass::NormalizerForm(rat(0))
        );
        // NS {v2, v1 + c v4}: [w1,w2] = [v2, v1] = -[v1,v2] = v2 -> lambda = 1
        let ns = builtin_algebra("ns4").unwrap();
        let a = vec![rat(0), rat(1), rat(0), rat(0)];
        let b = vec![rat(1), rat(0), rat(0), rat(2)];
        let p = AlgebraPair::new(a, b).unwrap();
        assert_eq!(
            classify_pair(&ns, &p).unwrap(),
            PairClass::NormalizerForm(rat(1))
        );
        // degenerate pair rejected
        assert!(matches!(
            AlgebraPair::new(e(1), e(1)),
            Err(LieError::DegeneratePair)
        ));
        // a pair that is not closed: heat {v1, v6}: [v1,v6] = 2v5
        let p = AlgebraPair::new(e(1), e(6)).unwrap();
        assert_eq!(classify_pair(&heat, &p).unwrap(), PairClass::NotClosed);
        // {v4, v2}: [v4,v2] = -2*v2 = 0*w1 - 2*w2, a general closed pair
        let p = AlgebraPair::new(e(4), e(2)).unwrap();
        assert_eq!(
            classify_pair(&heat, &p).unwrap(),
            PairClass::GeneralClosed(rat(0), rat(-2))
        );
    }

    #[test]
    fn sampling_heat_case_i_is_exact() {
        let alg = builtin_algebra("heat6").unwrap();
        let case = heat_case("i").unwrap();
        let pairs = sample_constrained_pairs(&alg, &case, 12, 7).unwrap();
        assert_eq!(pairs.len(), 12);
        for p in &pairs {
            // a1 = a4 a5 / (2 a6) holds exactly
            let lhs = &p.a[0] * &p.a[5] * rat(2);
            let rhs = &p.a[3] * &p.a[4];
            assert_eq!(lhs, rhs);
            assert_eq!(
                classify_pair(&alg, p).unwrap(),
                PairClass::NormalizerForm(rat(0))
            );
        }
    }

    #[test]
    fn sampling_ns_case_3_lambda_matches() {
        let alg = builtin_algebra("ns4").unwrap();
        let case = ns_case("3").unwrap();
        let pairs = sample_constrained_pairs(&alg, &case, 12, 11).unwrap();
        for p in &pairs {
            // lambda = b1 != 0 and a3 = 0, a4 = a2 b3 / b1
            let lambda = pair_lambda(&alg, p).unwrap();
            assert_eq!(lambda, p.b[0]);
            assert!(!lambda.is_zero());
            assert!(p.a[2].is_zero());
            assert_eq!(&p.a[3] * &p.b[0], &p.a[1] * &p.b[2]);
        }
    }

    #[test]
    fn abelian_empty_constraint_samples() {
        let alg = LieAlgebra::new(3, vec!["e1".into(), "e2".into(), "e3".into()], &[]).unwrap();
        let case = CaseConstraint::empty("any", LambdaMode::Zero);
        let pairs = sample_constrained_pairs(&alg, &case, 8, 3).unwrap();
        for p in &pairs {
            assert_eq!(
                classify_pair(&alg, p).unwrap(),
                PairClass::NormalizerForm(rat(0))
            );
        }
    }

    #[test]
    fn user_substitution_list_round_trip() {
        let c = CaseConstraint::from_json_subs(
            "user",
            LambdaMode::Zero,
            r#"[{"sym":"a1","expr":"a4*a5/(2*a6)"},{"sym":"a2","expr":"a4^2/(4*a6)"}]"#,
        )
        .unwrap();
        assert_eq!(c.subs.len(), 2);
        assert_eq!(c.subs[0].0, "a1");
    }
}
