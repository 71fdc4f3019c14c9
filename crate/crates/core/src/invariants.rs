//! Invariants of two-dimensional subalgebras: the defining linear PDE system,
//! exact and sampled verification of candidate rational invariants, and
//! discovery of polynomial semi-invariants by exact nullspace computation.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adjoint::NumericAdjoint;
use crate::algebra::LieAlgebra;
use crate::error::{LieError, Result};
use crate::linalg::RatMatrix;
use crate::poly::{ab_lambda_names, monomials_of_degree, Mono, Poly};
use crate::ratio::{rat, rat_to_f64, Rat};
use crate::subalgebra::{sample_constrained_pairs, AlgebraPair, CaseConstraint, LambdaMode};

/// Role of a field in the defining system. Mixing fields come from the
/// combination coefficients a12/a21 of the invariance definition; scaling
/// fields a11/a22 grade polynomials by bidegree and carry semi-invariant
/// weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Generator(usize),
    ScaleA11,
    MixA21,
    ScaleA22,
    MixA12,
}

/// First-order linear differential operator in the 2n coordinates
/// (a_1..a_n, b_1..b_n); entry m is the coefficient of d/dx_m.
#[derive(Clone, Debug)]
pub struct VectorFieldPDE {
    pub kind: FieldKind,
    pub label: String,
    pub coeffs: Vec<Poly>,
}

impl VectorFieldPDE {
    /// X(P) for a polynomial P over the same coordinates.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = p.derivative(m);
            if !d.is_zero() {
                out = out.add(&c.mul(&d));
            }
        }
        out
    }

    /// Numeric field vector at a point.
    pub fn direction_at(&self, x: &[f64]) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.eval_f64(x)).collect()
    }

    /// Rendering as `sum coeff * phi_{x_m} = 0`.
    pub fn render(&self, n: usize) -> String {
        let names = ab_lambda_names(n);
        let mut parts: Vec<String> = Vec::new();
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let var = names(m);
            let cs = c.to_string_with(&names);
            let body = if cs == "1" {
                format!("phi_{var}")
            } else if cs == "-1" {
                format!("-phi_{var}")
            } else if c.num_terms() == 1 {
                format!("{cs}*phi_{var}")
            } else {
                format!("({cs})*phi_{var}")
            };
            parts.push(body);
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(stripped) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        out.push_str(" = 0");
        out
    }

    /// Canonical primitive form for duplicate detection and golden tests:
    /// joint content across all coefficient polynomials divided out, first
    /// nonzero leading coefficient made positive.
    pub fn normalized_coeffs(&self) -> Vec<Poly> {
        use num_bigint::BigInt;
        use num_integer::Integer;
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        let mut lead_sign: Option<bool> = None;
        for c in &self.coeffs {
            for (_, coeff) in c.terms() {
                num_gcd = num_gcd.gcd(coeff.numer());
                den_lcm = den_lcm.lcm(coeff.denom());
            }
            if lead_sign.is_none() {
                if let Some((_, coeff)) = c.terms().next_back() {
                    lead_sign = Some(coeff.is_negative());
                }
            }
        }
        if num_gcd.is_zero() {
            return self.coeffs.clone();
        }
        let mut scale = Rat::new(den_lcm, num_gcd);
        if lead_sign == Some(true) {
            scale = -scale;
        }
        self.coeffs.iter().map(|c| c.scale(&scale)).collect()
    }
}

/// A rational invariant candidate phi = num/den.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInvariant {
    pub num: Poly,
    pub den: Poly,
}

impl RationalInvariant {
    pub fn constant_one() -> Self {
        Self {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> Option<f64> {
        let d = self.den.eval_f64(x);
        if d.abs() < 1e-12 {
            return None;
        }
        Some(self.num.eval_f64(x) / d)
    }

    pub fn eval_rat(&self, x: &[Rat]) -> Option<Rat> {
        let d = self.den.eval_rat(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_rat(x) / d)
    }

    pub fn render(&self, n: usize) -> String {
        let names = ab_lambda_names(n);
        if self.den.is_constant() && self.den.coeff(&Mono::one()).is_one() {
            self.num.to_string_with(&names)
        } else {
            format!(
                "({})/({})",
                self.num.to_string_with(&names),
                self.den.to_string_with(&names)
            )
        }
    }
}

/// The invariant-defining PDE system for a lambda class. Generator fields come
/// from the theta coefficients of the commutator table; scaling/mixing fields
/// from the combination coefficients; the a12 mixing field exists only in the
/// lambda = 0 class. Zero and duplicate fields are dropped.
pub fn invariant_pde_system(alg: &LieAlgebra, mode: LambdaMode) -> Vec<VectorFieldPDE> {
    let n = alg.dim();
    let mut fields = Vec::new();
    for k in 0..n {
        let mut coeffs = vec![Poly::zero(); 2 * n];
        // d/da_i coefficient: -sum_j a_j C_kj^i; same with b for d/db_i
        for j in 0..n {
            let br = alg.bracket_basis(k, j);
            for (i, c) in br.0.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                coeffs[i] = coeffs[i].add(&Poly::from_terms([(Mono::var(j), -c.clone())]));
                coeffs[n + i] =
                    coeffs[n + i].add(&Poly::from_terms([(Mono::var(n + j), -c.clone())]));
            }
        }
        if coeffs.iter().all(Poly::is_zero) {
            continue;
        }
        fields.push(VectorFieldPDE {
            kind: FieldKind::Generator(k),
            label: format!("c{}", k + 1),
            coeffs,
        });
    }

    let mut scale = |kind: FieldKind, label: &str, src_b: bool, dst_b: bool| {
        let mut coeffs = vec![Poly::zero(); 2 * n];
        for i in 0..n {
            let src = if src_b { n + i } else { i };
            let dst = if dst_b { n + i } else { i };
            coeffs[dst] = Poly::var(src);
        }
        fields.push(VectorFieldPDE {
            kind,
            label: label.into(),
            coeffs,
        });
    };
    scale(FieldKind::ScaleA11, "a11", false, false); // sum a_i d/da_i
    scale(FieldKind::MixA21, "a21", false, true); // sum a_i d/db_i
    scale(FieldKind::ScaleA22, "a22", true, true); // sum b_i d/db_i
    if mode == LambdaMode::Zero {
        scale(FieldKind::MixA12, "a12", true, false); // sum b_i d/da_i
    }

    // drop duplicates after canonical normalization
    let mut seen: Vec<Vec<Poly>> = Vec::new();
    fields.retain(|f| {
        let norm = f.normalized_coeffs();
        if seen.contains(&norm) {
            false
        } else {
            seen.push(norm);
            true
        }
    });
    fields
}

/// Report of an invariant check.
#[derive(Clone, Debug)]
pub struct CheckReport {
    /// per-field exact annihilation (unconstrained mode only)
    pub exact: Option<Vec<(String, bool)>>,
    /// constrained numeric mode: max |directional derivative| over samples
    pub max_directional: Option<f64>,
    /// constrained numeric mode: max |phi(transformed) - phi(original)|
    pub max_flow: Option<f64>,
    pub samples: usize,
    pub pass: bool,
}

pub struct CheckConfig {
    pub samples: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub flow_trials_per_sample: usize,
    pub tolerance: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 2024,
            fd_step: 1e-5,
            flow_trials_per_sample: 2,
            tolerance: 1e-8,
        }
    }
}

/// Verifies a rational invariant: exactly when unconstrained, numerically on
/// the case set otherwise.
pub fn check_invariant(
    alg: &LieAlgebra,
    phi: &RationalInvariant,
    mode: LambdaMode,
    constraint: Option<&CaseConstraint>,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let fields = invariant_pde_system(alg, mode);
    match constraint {
        None => {
            if phi.den.is_zero() {
                return Err(LieError::PoleEncountered("zero denominator".into()));
            }
            let mut per_field = Vec::new();
            let mut all = true;
            for f in &fields {
                let lhs = f.apply(&phi.num).mul(&phi.den);
                let rhs = phi.num.mul(&f.apply(&phi.den));
                let ok = lhs.sub(&rhs).is_zero();
                all &= ok;
                per_field.push((f.label.clone(), ok));
            }
            Ok(CheckReport {
                exact: Some(per_field),
                max_directional: None,
                max_flow: None,
                samples: 0,
                pass: all,
            })
        }
        Some(case) => {
            let pairs = sample_constrained_pairs(alg, case, cfg.samples.max(100), cfg.seed)?;
            let mut max_dir: f64 = 0.0;
            let mut max_flow: f64 = 0.0;
            let mut evaluated = 0usize;
            let numeric = NumericAdjoint::new(alg, None)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e3779b97f4a7c15);
            for pair in &pairs {
                let (af, bf) = pair.to_f64();
                let x: Vec<f64> = af.iter().chain(bf.iter()).copied().collect();
                let Some(v0) = phi.eval_f64(&x) else {
                    continue; // pole at the sample itself: skip
                };
                evaluated += 1;
                // central difference along each field direction
                for f in &fields {
                    let dir = f.direction_at(&x);
                    let scale = dir.iter().map(|d| d.abs()).fold(0.0, f64::max).max(1.0);
                    let h = cfg.fd_step / scale;
                    let xp: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + h * di).collect();
                    let xm: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi - h * di).collect();
                    if let (Some(vp), Some(vm)) = (phi.eval_f64(&xp), phi.eval_f64(&xm)) {
                        max_dir = max_dir.max(((vp - vm) / (2.0 * h)).abs());
                    }
                }
                // direct flow
                let dev = flow_deviation(
                    &numeric,
                    phi,
                    &af,
                    &bf,
                    v0,
                    case.mode,
                    cfg.flow_trials_per_sample,
                    &mut rng,
                )?;
                max_flow = max_flow.max(dev);
            }
            if evaluated == 0 {
                return Err(LieError::PoleEncountered(
                    "denominator vanishes on every sampled point of the constraint set".into(),
                ));
            }
            let pass = max_dir < cfg.tolerance.max(1e-6) && max_flow < cfg.tolerance;
            Ok(CheckReport {
                exact: None,
                max_directional: Some(max_dir),
                max_flow: Some(max_flow),
                samples: evaluated,
                pass,
            })
        }
    }
}

/// One flow-constancy experiment: random group element + valid mixing, then
/// |phi(transformed) - phi(original)|. Transformed vectors are renormalized to
/// unit max-norm (itself a valid diagonal mixing) and near-pole transforms are
/// resampled up to a retry bound.
#[allow(clippy::too_many_arguments)]
fn flow_deviation(
    numeric: &NumericAdjoint,
    phi: &RationalInvariant,
    a: &[f64],
    b: &[f64],
    v0: f64,
    mode: LambdaMode,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let n = numeric.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let mut found = false;
        for _attempt in 0..60 {
            let eps: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let (ta, tb) = numeric.transform_pair(a, b, &eps);
            let (k1, k2, k3, k4) = loop {
                let k1: f64 = rng.gen_range(-2.0..2.0);
                let k4: f64 = rng.gen_range(-2.0..2.0);
                let k3: f64 = rng.gen_range(-2.0..2.0);
                let k2: f64 = match mode {
                    LambdaMode::Nonzero => 0.0,
                    LambdaMode::Zero => rng.gen_range(-2.0..2.0),
                };
                if (k1 * k4 - k2 * k3).abs() > 0.2 {
                    break (k1, k2, k3, k4);
                }
            };
            let mut na: Vec<f64> = ta.iter().zip(&tb).map(|(x, y)| k1 * x + k2 * y).collect();
            let mut nb: Vec<f64> = ta.iter().zip(&tb).map(|(x, y)| k3 * x + k4 * y).collect();
            let na_max = na.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let nb_max = nb.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if na_max < 1e-9 || nb_max < 1e-9 {
                continue;
            }
            na.iter_mut().for_each(|v| *v /= na_max);
            nb.iter_mut().for_each(|v| *v /= nb_max);
            let x: Vec<f64> = na.iter().chain(nb.iter()).copied().collect();
            if phi.den.eval_f64(&x).abs() < 1e-6 {
                continue; // near-pole transform: resample
            }
            let v1 = phi.num.eval_f64(&x) / phi.den.eval_f64(&x);
            worst = worst.max((v1 - v0).abs());
            found = true;
            break;
        }
        if !found {
            return Err(LieError::PoleEncountered(
                "could not find a pole-free transform within the retry bound".into(),
            ));
        }
    }
    Ok(worst)
}

/// Maximum deviation of phi along random adjoint flows from one pair.
pub fn flow_constancy(
    alg: &LieAlgebra,
    phi: &RationalInvariant,
    pair: &AlgebraPair,
    mode: LambdaMode,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let numeric = NumericAdjoint::new(alg, None)?;
    let (a, b) = pair.to_f64();
    let x: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let v0 = phi
        .eval_f64(&x)
        .ok_or_else(|| LieError::PoleEncountered("pole at the base pair".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    flow_deviation(&numeric, phi, &a, &b, v0, mode, trials, &mut rng)
}

/// A polynomial rescaled by constant weights under the scaling fields and
/// annihilated by the rest of the imposed system.
#[derive(Clone, Debug)]
pub struct SemiInvariant {
    pub poly: Poly,
    /// (field label, weight); generator and mixing entries are zero, the
    /// scaling fields a11/a22 carry the bidegree
    pub weights: Vec<(String, Rat)>,
    pub bidegree: (u32, u32),
}

/// Discovers semi-invariants of degree <= d by exact linear algebra, one
/// bidegree block at a time. Generator fields must annihilate; in the
/// lambda=0 class the mixing fields a12/a21 must annihilate as well (they are
/// valid infinitesimal combinations there); the scaling fields a11/a22 act
/// diagonally on a bidegree block with integer weights (p, q).
pub fn discover_semi_invariants(
    alg: &LieAlgebra,
    mode: LambdaMode,
    degree: u32,
) -> Vec<SemiInvariant> {
    let n = alg.dim();
    let fields = invariant_pde_system(alg, mode);
    let imposed: Vec<&VectorFieldPDE> = fields
        .iter()
        .filter(|f| {
            matches!(f.kind, FieldKind::Generator(_))
                || (mode == LambdaMode::Zero
                    && matches!(f.kind, FieldKind::MixA12 | FieldKind::MixA21))
        })
        .collect();
    let a_vars: Vec<usize> = (0..n).collect();
    let b_vars: Vec<usize> = (n..2 * n).collect();

    let mut out = Vec::new();
    for total in 0..=degree {
        for p in 0..=total {
            let q = total - p;
            let basis: Vec<Mono> = monomials_of_degree(&a_vars, p)
                .into_iter()
                .flat_map(|ma| {
                    monomials_of_degree(&b_vars, q)
                        .into_iter()
                        .map(move |mb| ma.mul(&mb))
                })
                .collect();
            if basis.is_empty() {
                continue;
            }
            // rows: coordinates of X(m) over all output monomials, per field
            let mut rows: Vec<Vec<Rat>> = Vec::new();
            for f in &imposed {
                let images: Vec<Poly> = basis
                    .iter()
                    .map(|m| f.apply(&Poly::from_terms([(m.clone(), Rat::one())])))
                    .collect();
                let mut out_monos: Vec<Mono> = images
                    .iter()
                    .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
                    .collect();
                out_monos.sort();
                out_monos.dedup();
                for om in &out_monos {
                    rows.push(
                        basis
                            .iter()
                            .zip(&images)
                            .map(|(_, img)| img.coeff(om))
                            .collect(),
                    );
                }
            }
            let kernel = if rows.is_empty() {
                // no constraints: the whole block survives
                (0..basis.len())
                    .map(|i| {
                        let mut v = vec![Rat::zero(); basis.len()];
                        v[i] = Rat::one();
                        v
                    })
                    .collect()
            } else {
                RatMatrix::from_rows(rows).nullspace()
            };
            for vec in kernel {
                let poly = Poly::from_terms(
                    basis
                        .iter()
                        .cloned()
                        .zip(vec.iter().cloned())
                        .filter(|(_, c)| !c.is_zero()),
                )
                .primitive_normalized();
                let mut weights: Vec<(String, Rat)> = Vec::new();
                for f in &fields {
                    let w = match f.kind {
                        FieldKind::ScaleA11 => rat(p as i64),
                        FieldKind::ScaleA22 => rat(q as i64),
                        _ => Rat::zero(),
                    };
                    weights.push((f.label.clone(), w));
                }
                out.push(SemiInvariant {
                    poly,
                    weights,
                    bidegree: (p, q),
                });
            }
        }
    }
    out
}

/// Forms weight-balanced ratios P^s / Q^r of discovered semi-invariants with
/// s*w(P) = r*w(Q); verifies annihilation by the generator (and lambda=0
/// mixing) fields exactly; deduplicates up to rational scalar and inversion.
pub fn assemble_rational_invariants(
    alg: &LieAlgebra,
    mode: LambdaMode,
    semis: &[SemiInvariant],
) -> Vec<RationalInvariant> {
    let fields = invariant_pde_system(alg, mode);
    let imposed: Vec<&VectorFieldPDE> = fields
        .iter()
        .filter(|f| {
            matches!(f.kind, FieldKind::Generator(_))
                || (mode == LambdaMode::Zero
                    && matches!(f.kind, FieldKind::MixA12 | FieldKind::MixA21))
        })
        .collect();

    let mut out: Vec<RationalInvariant> = Vec::new();
    let mut push_unique = |cand: RationalInvariant| {
        let canon =
            |ri: &RationalInvariant| (ri.num.primitive_normalized(), ri.den.primitive_normalized());
        let (cn, cd) = canon(&cand);
        for existing in out.iter() {
            let (en, ed) = canon(existing);
            if (en == cn && ed == cd) || (en == cd && ed == cn) {
                return;
            }
        }
        out.push(cand);
    };

    for (i, p) in semis.iter().enumerate() {
        for (j, q) in semis.iter().enumerate() {
            if i == j {
                continue;
            }
            let (wp, wq) = (&p.bidegree, &q.bidegree);
            if (wp.0 + wp.1) == 0 || (wq.0 + wq.1) == 0 {
                continue; // constants make no informative ratio
            }
            // find small positive s, r with s*wp == r*wq
            let mut found: Option<(u32, u32)> = None;
            'search: for s in 1..=3u32 {
                for r in 1..=3u32 {
                    if s * wp.0 == r * wq.0 && s * wp.1 == r * wq.1 {
                        found = Some((s, r));
                        break 'search;
                    }
                }
            }
            let Some((s, r)) = found else { continue };
            let mut num = p.poly.pow(s);
            let mut den = q.poly.pow(r);
            if num.proportional_to(&den) {
                continue; // constant ratio
            }
            // canonical orientation: larger leading monomial upstairs
            let lead = |p: &Poly| p.terms().next_back().map(|(m, _)| m.clone());
            if lead(&num) < lead(&den) {
                std::mem::swap(&mut num, &mut den);
            }
            let cand = RationalInvariant { num, den };
            // exact verification against the imposed subsystem
            let ok = imposed.iter().all(|f| {
                f.apply(&cand.num)
                    .mul(&cand.den)
                    .sub(&cand.num.mul(&f.apply(&cand.den)))
                    .is_zero()
            });
            if ok {
                push_unique(cand);
            }
        }
    }
    out
}

/// Convenience: the numeric value of a polynomial expression at a pair.
pub fn eval_poly_at_pair(p: &Poly, pair: &AlgebraPair) -> Rat {
    p.eval_rat(&pair.coords())
}

pub fn eval_poly_at_f64(p: &Poly, a: &[f64], b: &[f64]) -> f64 {
    let x: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    p.eval_f64(&x)
}

/// f64 coordinate scale guard used by sign classifiers.
pub fn sign_with_floor(v: f64, floor: f64) -> i32 {
    if v.abs() <= floor {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

pub fn rat_to_f64_vec(v: &[Rat]) -> Vec<f64> {
    v.iter().map(rat_to_f64).collect()
}
