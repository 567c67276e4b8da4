//! JSON input schema for algebras and a deterministic JSON emitter.
//!
//! Input files describe an algebra by its nonzero brackets:
//!
//! ```json
//! {
//!   "dim": 3,
//!   "brackets": [ { "i": 1, "j": 2, "k": 3, "c": 1.0 } ],
//!   "name": "heisenberg3",
//!   "metric": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
//! }
//! ```
//!
//! Indices are 1-based with `i < j`; `name` and `metric` are optional.
//! Unknown keys are rejected so that typos fail loudly.
//!
//! Output goes through [`Jv`], a tiny JSON value type that renders
//! byte-reproducibly: objects keep insertion order, every float is printed
//! with 17 significant digits (`{:.16e}`), non-finite values become `null`,
//! indentation is two spaces, and lines end with LF.

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};

/// One bracket relation `[e_i, e_j] = c e_k` with 1-based indices, `i < j`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketRecord {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

/// On-disk description of an algebra with an optional metric in the same basis.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim: usize,
    pub brackets: Vec<BracketRecord>,
    #[serde(default)]
    pub name: Option<String>,
    /// Row-major `dim x dim` symmetric positive-definite matrix.
    #[serde(default)]
    pub metric: Option<Vec<Vec<f64>>>,
}

/// Parse an [`AlgebraFile`] from JSON text.
pub fn parse_algebra_file(text: &str) -> Result<AlgebraFile> {
    serde_json::from_str(text).map_err(|e| Error::Schema(format!("invalid algebra file: {e}")))
}

impl AlgebraFile {
    /// Build the structure constants without checking the Jacobi identity.
    pub fn algebra(&self) -> Result<LieAlgebra> {
        if self.dim < 1 || self.dim > 64 {
            return Err(Error::Schema(format!(
                "dim must be between 1 and 64, got {}",
                self.dim
            )));
        }
        let mut alg = LieAlgebra::zero(self.dim);
        let mut seen = std::collections::HashSet::new();
        for b in &self.brackets {
            let bad = |reason: &str| Error::BadBracket {
                i: b.i,
                j: b.j,
                k: b.k,
                reason: reason.to_string(),
            };
            if b.i < 1 || b.j < 1 || b.k < 1 || b.i > self.dim || b.j > self.dim || b.k > self.dim {
                return Err(bad("index out of range"));
            }
            if b.i >= b.j {
                return Err(bad("indices must satisfy i < j"));
            }
            if !b.c.is_finite() {
                return Err(bad("coefficient must be finite"));
            }
            if !seen.insert((b.i, b.j, b.k)) {
                return Err(bad("duplicate bracket entry"));
            }
            alg.set(b.k - 1, b.i - 1, b.j - 1, b.c);
        }
        Ok(alg)
    }

    /// Build the structure constants and insist on the Jacobi identity.
    pub fn validated_algebra(&self) -> Result<LieAlgebra> {
        let alg = self.algebra()?;
        let report = alg.validate();
        if !report.ok {
            return Err(Error::JacobiViolation {
                residual: report.max_residual,
                worst: report.worst,
            });
        }
        Ok(alg)
    }

    /// The optional metric as a matrix, checked for shape and symmetry.
    pub fn metric_matrix(&self) -> Result<Option<DMatrix<f64>>> {
        let Some(rows) = &self.metric else {
            return Ok(None);
        };
        let n = self.dim;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Schema(format!("metric must be a {n} x {n} matrix")));
        }
        let g = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Schema("metric entries must be finite".into()));
        }
        let asym = (&g - g.transpose()).amax();
        if asym > 1e-9 * g.amax().max(1.0) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(Some(g))
    }
}

/// Serialize an algebra (and optionally a metric) into the input schema, so
/// emitted algebras can be piped straight back in.
pub fn algebra_to_json(alg: &LieAlgebra, name: Option<&str>, metric: Option<&DMatrix<f64>>) -> Jv {
    let mut obj = Jv::object();
    obj.set("dim", Jv::Int(alg.dim() as i64));
    let mut brackets = Vec::new();
    for e in alg.bracket_entries() {
        let mut b = Jv::object();
        b.set("i", Jv::Int(e.i as i64));
        b.set("j", Jv::Int(e.j as i64));
        b.set("k", Jv::Int(e.k as i64));
        b.set("c", Jv::F(e.c));
        brackets.push(b);
    }
    obj.set("brackets", Jv::Arr(brackets));
    if let Some(name) = name {
        obj.set("name", Jv::Str(name.to_string()));
    }
    if let Some(g) = metric {
        obj.set("metric", matrix_to_json(g));
    }
    obj
}

/// A matrix as an array of row arrays.
pub fn matrix_to_json(m: &DMatrix<f64>) -> Jv {
    Jv::Arr(
        (0..m.nrows())
            .map(|i| Jv::Arr((0..m.ncols()).map(|j| Jv::F(m[(i, j)])).collect()))
            .collect(),
    )
}

/// Deterministic JSON value. Objects preserve insertion order.
#[derive(Debug, Clone)]
pub enum Jv {
    Null,
    Bool(bool),
    Int(i64),
    F(f64),
    Str(String),
    Arr(Vec<Jv>),
    Obj(Vec<(String, Jv)>),
}

impl Jv {
    /// An empty object to fill with [`Jv::set`].
    pub fn object() -> Jv {
        Jv::Obj(Vec::new())
    }

    /// Append a key (objects only). Later values win on duplicate keys.
    pub fn set(&mut self, key: &str, value: Jv) {
        let Jv::Obj(entries) = self else {
            panic!("Jv::set on a non-object");
        };
        if let Some(slot) = entries.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value;
        } else {
            entries.push((key.to_string(), value));
        }
    }

    /// Render with two-space indentation and a trailing LF.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        match self {
            Jv::Null => out.push_str("null"),
            Jv::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Jv::Int(v) => out.push_str(&v.to_string()),
            Jv::F(x) => {
                if x.is_finite() {
                    out.push_str(&format!("{x:.16e}"));
                } else {
                    out.push_str("null");
                }
            }
            Jv::Str(s) => write_escaped(out, s),
            Jv::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (idx, item) in items.iter().enumerate() {
                    if idx > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    indent(out, depth + 1);
                    item.write(out, depth + 1);
                }
                out.push('\n');
                indent(out, depth);
                out.push(']');
            }
            Jv::Obj(entries) => {
                if entries.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (idx, (key, value)) in entries.iter().enumerate() {
                    if idx > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    indent(out, depth + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    value.write(out, depth + 1);
                }
                out.push('\n');
                indent(out, depth);
                out.push('}');
            }
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}
