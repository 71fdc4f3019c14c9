//! Finite-dimensional Lie algebras over the rationals: structure constants,
//! brackets, adjoint matrices, the Jacobi gate and the Killing form.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{LieError, Result};
use crate::linalg::RatMatrix;
use crate::ratio::{format_rat, parse_rat, rat_to_f64, Rat};

/// Element coordinates in the algebra basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement(pub Vec<Rat>);

impl AlgebraElement {
    pub fn zero(dim: usize) -> Self {
        Self(vec![Rat::zero(); dim])
    }

    pub fn basis(i: usize, dim: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = Rat::from_integer(1.into());
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Self(self.0.iter().map(|a| a * s).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rat_to_f64).collect()
    }
}

/// A Lie algebra given by sparse structure constants `[v_i, v_j] = sum_k C_ij^k v_k`
/// stored for `i < j` only; the antisymmetric completion is implicit, which makes
/// antisymmetry hold by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    basis_names: Vec<String>,
    brackets: BTreeMap<(usize, usize), BTreeMap<usize, Rat>>,
}

/// One sparse 1-based bracket: (i, j, [(k, C_ij^k)]) with i < j.
pub type SparseBracket = (usize, usize, Vec<(usize, Rat)>);

/// One Jacobi violation: the 1-based triple and the nonzero residual element.
#[derive(Clone, Debug)]
pub struct JacobiViolation {
    pub triple: (usize, usize, usize),
    pub residual: AlgebraElement,
}

// --- JSON document ---------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct AlgebraDoc {
    dim: usize,
    basis: Vec<String>,
    brackets: Vec<BracketEntry>,
}

#[derive(Serialize, Deserialize)]
struct BracketEntry {
    i: usize,
    j: usize,
    coeffs: BTreeMap<String, String>,
}

impl LieAlgebra {
    /// Builds an algebra from 1-based sparse brackets and runs the Jacobi gate.
    pub fn new(dim: usize, basis_names: Vec<String>, entries: &[SparseBracket]) -> Result<Self> {
        if basis_names.len() != dim {
            return Err(LieError::DimensionMismatch {
                expected: dim,
                got: basis_names.len(),
            });
        }
        let mut brackets: BTreeMap<(usize, usize), BTreeMap<usize, Rat>> = BTreeMap::new();
        for (i, j, coeffs) in entries {
            let (i, j) = (*i, *j);
            if i == 0 || j == 0 || i > dim || j > dim {
                return Err(LieError::Invalid(format!(
                    "bracket index ({i},{j}) out of range 1..{dim}"
                )));
            }
            if i == j {
                return Err(LieError::Invalid(format!(
                    "bracket ({i},{i}) is forbidden; diagonal entries are zero by antisymmetry"
                )));
            }
            if i > j {
                return Err(LieError::Invalid(format!(
                    "bracket ({i},{j}) must be stored with i < j; the completion is implicit"
                )));
            }
            if brackets.contains_key(&(i - 1, j - 1)) {
                return Err(LieError::Invalid(format!("duplicate bracket ({i},{j})")));
            }
            let mut m = BTreeMap::new();
            for (k, c) in coeffs {
                if *k == 0 || *k > dim {
                    return Err(LieError::Invalid(format!(
                        "bracket ({i},{j}) target index {k} out of range"
                    )));
                }
                if !c.is_zero() {
                    m.insert(*k - 1, c.clone());
                }
            }
            if !m.is_empty() {
                brackets.insert((i - 1, j - 1), m);
            }
        }
        let alg = Self {
            dim,
            basis_names,
            brackets,
        };
        let violations = alg.jacobi_check();
        if let Some(v) = violations.first() {
            return Err(LieError::JacobiViolation {
                i: v.triple.0,
                j: v.triple.1,
                k: v.triple.2,
                residual: alg.format_element(&v.residual),
            });
        }
        Ok(alg)
    }

    /// Loads the UTF-8 JSON algebra-definition document.
    pub fn from_json_str(doc: &str) -> Result<Self> {
        let doc: AlgebraDoc =
            serde_json::from_str(doc).map_err(|e| LieError::Parse(format!("bad document: {e}")))?;
        let mut entries = Vec::new();
        for e in &doc.brackets {
            let mut coeffs = Vec::new();
            for (k, lit) in &e.coeffs {
                let k: usize = k
                    .parse()
                    .map_err(|_| LieError::Parse(format!("bad coefficient index '{k}'")))?;
                coeffs.push((k, parse_rat(lit)?));
            }
            entries.push((e.i, e.j, coeffs));
        }
        Self::new(doc.dim, doc.basis, &entries)
    }

    /// Serializes back to the document format (exact round trip).
    pub fn to_json_string(&self) -> String {
        let doc = AlgebraDoc {
            dim: self.dim,
            basis: self.basis_names.clone(),
            brackets: self
                .brackets
                .iter()
                .map(|(&(i, j), coeffs)| BracketEntry {
                    i: i + 1,
                    j: j + 1,
                    coeffs: coeffs
                        .iter()
                        .map(|(&k, c)| ((k + 1).to_string(), format_rat(c)))
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("document serialization")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    /// Structure constants of `[v_i, v_j]` for 0-based `i, j`, with the
    /// antisymmetric completion applied.
    pub fn bracket_basis(&self, i: usize, j: usize) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.dim);
        if i == j {
            return out;
        }
        let (key, sign) = if i < j { ((i, j), 1) } else { ((j, i), -1) };
        if let Some(coeffs) = self.brackets.get(&key) {
            for (&k, c) in coeffs {
                out.0[k] = if sign > 0 { c.clone() } else { -c.clone() };
            }
        }
        out
    }

    /// Exact bilinear bracket of two coordinate vectors.
    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_len(x)?;
        self.check_len(y)?;
        let mut out = AlgebraElement::zero(self.dim);
        for (&(i, j), coeffs) in &self.brackets {
            let factor = &x.0[i] * &y.0[j] - &x.0[j] * &y.0[i];
            if factor.is_zero() {
                continue;
            }
            for (&k, c) in coeffs {
                out.0[k] += c * &factor;
            }
        }
        Ok(out)
    }

    /// Matrix of `w -> [x, w]`; column j holds the coordinates of `[x, v_j]`.
    pub fn ad_matrix(&self, x: &AlgebraElement) -> Result<RatMatrix> {
        self.check_len(x)?;
        let mut m = RatMatrix::zeros(self.dim, self.dim);
        for (&(i, j), coeffs) in &self.brackets {
            // [x, v_j] picks up x_i * C_ij^k; [x, v_i] picks up -x_j * C_ij^k
            for (&k, c) in coeffs {
                if !x.0[i].is_zero() {
                    let add = &x.0[i] * c;
                    m[(k, j)] += add;
                }
                if !x.0[j].is_zero() {
                    let sub = &x.0[j] * c;
                    m[(k, i)] -= sub;
                }
            }
        }
        Ok(m)
    }

    /// All Jacobi violations over triples i < j < k; empty iff the data is a
    /// Lie algebra.
    pub fn jacobi_check(&self) -> Vec<JacobiViolation> {
        let mut out = Vec::new();
        let basis: Vec<AlgebraElement> = (0..self.dim)
            .map(|i| AlgebraElement::basis(i, self.dim))
            .collect();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                for k in (j + 1)..self.dim {
                    let t1 = self
                        .bracket(&self.bracket_basis(i, j), &basis[k])
                        .expect("dims");
                    let t2 = self
                        .bracket(&self.bracket_basis(j, k), &basis[i])
                        .expect("dims");
                    let t3 = self
                        .bracket(&self.bracket_basis(k, i), &basis[j])
                        .expect("dims");
                    let sum = t1.add(&t2).add(&t3);
                    if !sum.is_zero() {
                        out.push(JacobiViolation {
                            triple: (i + 1, j + 1, k + 1),
                            residual: sum,
                        });
                    }
                }
            }
        }
        out
    }

    /// trace(ad x . ad y): the Killing form.
    pub fn killing_form(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<Rat> {
        let ax = self.ad_matrix(x)?;
        let ay = self.ad_matrix(y)?;
        Ok(ax.mul(&ay).trace())
    }

    /// The n x n commutator table as exact elements.
    pub fn commutator_table(&self) -> Vec<Vec<AlgebraElement>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.bracket_basis(i, j)).collect())
            .collect()
    }

    /// Renders an element against the basis names, e.g. `-2*v3 + 4*v4`.
    pub fn format_element(&self, x: &AlgebraElement) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (k, c) in x.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rat::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            let lit = format_rat(&abs);
            let body = if lit == "1" {
                self.basis_names[k].clone()
            } else {
                format!("{}*{}", lit, self.basis_names[k])
            };
            parts.push((neg, body));
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (neg, body)) in parts.iter().enumerate() {
            if i == 0 {
                if *neg {
                    out.push('-');
                }
            } else {
                out.push_str(if *neg { " - " } else { " + " });
            }
            out.push_str(body);
        }
        out
    }

    fn check_len(&self, x: &AlgebraElement) -> Result<()> {
        if x.dim() != self.dim {
            return Err(LieError::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(())
    }
}

/// Renders the commutator table as an aligned text grid.
pub fn format_commutator_table(alg: &LieAlgebra) -> String {
    let table = alg.commutator_table();
    let names = alg.basis_names();
    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    cells.push(header);
    for (i, row) in table.iter().enumerate() {
        let mut line = vec![names[i].clone()];
        line.extend(row.iter().map(|e| alg.format_element(e)));
        cells.push(line);
    }
    align_grid(&cells)
}

pub(crate) fn align_grid(cells: &[Vec<String>]) -> String {
    let cols = cells.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in cells {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in cells {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{:width$}", cell, width = widths[c]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::builtin_algebra;
    use crate::ratio::rat;

    fn heat() -> LieAlgebra {
        builtin_algebra("heat6").unwrap()
    }

    #[test]
    fn heat_loads_and_passes_jacobi() {
        let alg = heat();
        assert_eq!(alg.dim(), 6);
        assert!(alg.jacobi_check().is_empty());
    }

    #[test]
    fn abelian_algebra_is_accepted() {
        let alg = LieAlgebra::new(3, vec!["v1".into(), "v2".into(), "v3".into()], &[]).unwrap();
        assert!(alg.jacobi_check().is_empty());
        let t = alg.commutator_table();
        assert!(t.iter().flatten().all(|e| e.is_zero()));
    }

    #[test]
    fn corrupted_heat_fails_jacobi_at_256() {
        // change C_25^1 from 2 to 3; brute force shows the violated triple is
        // (2,5,6) with residual 2*v5
        let mut entries = crate::fixtures::heat_entries();
        let slot = entries
            .iter_mut()
            .find(|(i, j, _)| (*i, *j) == (2, 5))
            .unwrap();
        slot.2 = vec![(1, rat(3))];
        let names: Vec<String> = (1..=6).map(|i| format!("v{i}")).collect();
        let err = LieAlgebra::new(6, names.clone(), &entries).unwrap_err();
        match err {
            LieError::JacobiViolation { i, j, k, residual } => {
                assert_eq!((i, j, k), (1, 2, 6));
                assert_eq!(residual, "2*v1");
            }
            other => panic!("expected Jacobi violation, got {other}"),
        }
        // the full check also flags (2,5,6) with residual 2*v5
        let raw = LieAlgebra {
            dim: 6,
            basis_names: names,
            brackets: entries
                .iter()
                .map(|(i, j, coeffs)| {
                    (
                        (*i - 1, *j - 1),
                        coeffs.iter().map(|(k, c)| (*k - 1, c.clone())).collect(),
                    )
                })
                .collect(),
        };
        let violations = raw.jacobi_check();
        let triples: Vec<_> = violations.iter().map(|v| v.triple).collect();
        assert_eq!(triples, vec![(1, 2, 6), (2, 5, 6)]);
        assert_eq!(raw.format_element(&violations[1].residual), "2*v5");
    }

    #[test]
    fn bracket_examples_from_table1() {
        let alg = heat();
        let v = |i: usize| AlgebraElement::basis(i - 1, 6);
        let b14 = alg.bracket(&v(1), &v(4)).unwrap();
        assert_eq!(alg.format_element(&b14), "v1");
        let b26 = alg.bracket(&v(2), &v(6)).unwrap();
        assert_eq!(alg.format_element(&b26), "-2*v3 + 4*v4");
        // [x, x] = 0
        let x = AlgebraElement(vec![rat(1), rat(-2), rat(3), rat(0), rat(5), rat(7)]);
        assert!(alg.bracket(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn ad_matrix_examples() {
        let alg = heat();
        let v3 = AlgebraElement::basis(2, 6);
        assert!(alg.ad_matrix(&v3).unwrap().is_zero());
        // eigenvalues of ad(v4) are {-2,-1,0,0,1,2}: computed from the exact
        // characteristic polynomial
        let v4 = AlgebraElement::basis(3, 6);
        let m = alg.ad_matrix(&v4).unwrap();
        let (roots, rest) = crate::linalg::integer_roots(&m.char_poly());
        assert_eq!(roots, vec![-2, -1, 0, 0, 1, 2]);
        assert_eq!(rest, vec![rat(1)]);
    }

    #[test]
    fn killing_form_examples() {
        let alg = heat();
        let v3 = AlgebraElement::basis(2, 6);
        assert!(alg.killing_form(&v3, &v3).unwrap().is_zero());
        // brute force: trace(ad(v4)^2)
        let v4 = AlgebraElement::basis(3, 6);
        let m = alg.ad_matrix(&v4).unwrap();
        let brute = m.mul(&m).trace();
        assert_eq!(alg.killing_form(&v4, &v4).unwrap(), brute);
        assert_eq!(brute, rat(10));
    }

    #[test]
    fn document_round_trip_is_exact() {
        let alg = heat();
        let doc = alg.to_json_string();
        let again = LieAlgebra::from_json_str(&doc).unwrap();
        assert_eq!(alg, again);
    }

    #[test]
    fn loader_rejects_bad_documents() {
        assert!(LieAlgebra::from_json_str("{").is_err());
        // i == j
        let doc = r#"{"dim":2,"basis":["v1","v2"],"brackets":[{"i":1,"j":1,"coeffs":{"1":"1"}}]}"#;
        assert!(LieAlgebra::from_json_str(doc).is_err());
        // dimension mismatch
        let doc = r#"{"dim":3,"basis":["v1","v2"],"brackets":[]}"#;
        assert!(matches!(
            LieAlgebra::from_json_str(doc),
            Err(LieError::DimensionMismatch { .. })
        ));
    }
}
