//! JSON problem files, angular-operator files and family files.
//!
//! Complex entries are `[re, im]` pairs; a bare number is accepted on input
//! as a real entry. Problem files are written with a fixed key order and
//! 17 significant digits so that `parse(serialize(p))` is bit-exact and
//! serialization is byte-stable.

use std::fmt::Write as _;

use blockdiag_core::bounds::{FamilyCoupling, FamilySpec};
use blockdiag_core::subspace::Selector;
use blockdiag_core::{BlockProblem, ComplexMatrix, C64};
use serde::Deserialize;
use serde_json::{Map, Value};
use thiserror::Error;

/// `field` is empty for syntax errors.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}{}: {message}", field_suffix(.field))]
pub struct ParseError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

fn field_suffix(field: &str) -> String {
    if field.is_empty() {
        String::new()
    } else {
        format!(", field {field}")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Core(#[from] blockdiag_core::Error),
}

/// A problem together with its optional default split.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub problem: BlockProblem,
    pub sigma0: Option<Selector>,
}

impl From<BlockProblem> for ProblemFile {
    fn from(problem: BlockProblem) -> Self {
        ProblemFile { problem, sigma0: None }
    }
}

struct Document<'a> {
    text: &'a str,
}

impl Document<'_> {
    fn line_of(&self, field: &str) -> usize {
        let needle = format!("\"{field}\"");
        match self.text.find(&needle) {
            Some(pos) => self.text[..pos].matches('\n').count() + 1,
            None => 1,
        }
    }

    fn error(&self, field: &str, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line_of(field),
            field: field.to_owned(),
            message: message.into(),
        }
    }

    fn parse_root(&self) -> Result<Value, ParseError> {
        serde_json::from_str(self.text).map_err(|e| ParseError {
            line: e.line(),
            field: String::new(),
            message: e.to_string(),
        })
    }
}

fn syntax_error(message: &str) -> ParseError {
    ParseError {
        line: 1,
        field: String::new(),
        message: message.to_owned(),
    }
}

fn root_object(value: &Value) -> Result<&Map<String, Value>, ParseError> {
    value.as_object().ok_or_else(|| syntax_error("expected a JSON object"))
}

fn entry(value: &Value) -> Option<C64> {
    match value {
        Value::Number(n) => Some(C64::new(n.as_f64()?, 0.0)),
        Value::Array(pair) if pair.len() == 2 => Some(C64::new(pair[0].as_f64()?, pair[1].as_f64()?)),
        _ => None,
    }
}

/// Reads a list of rows. An empty list is returned as `None`.
fn matrix_rows(doc: &Document, field: &str, value: &Value) -> Result<Option<ComplexMatrix>, FormatError> {
    let rows = value
        .as_array()
        .ok_or_else(|| doc.error(field, "expected an array of rows"))?;
    if rows.is_empty() {
        return Ok(None);
    }
    let mut data = Vec::new();
    let mut cols = None;
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| doc.error(field, format!("row {i} is not an array")))?;
        if *cols.get_or_insert(row.len()) != row.len() {
            return Err(doc.error(field, format!("row {i} has {} entries, expected {}", row.len(), cols.unwrap())).into());
        }
        for (j, v) in row.iter().enumerate() {
            data.push(entry(v).ok_or_else(|| {
                doc.error(field, format!("entry ({i}, {j}) is neither a number nor an [re, im] pair"))
            })?);
        }
    }
    Ok(Some(ComplexMatrix::from_vec(rows.len(), cols.unwrap_or(0), data)?))
}

fn required<'v>(doc: &Document, obj: &'v Map<String, Value>, field: &str) -> Result<&'v Value, ParseError> {
    obj.get(field).ok_or_else(|| doc.error(field, format!("missing field {field}")))
}

fn dimension(doc: &Document, obj: &Map<String, Value>, field: &str) -> Result<usize, ParseError> {
    required(doc, obj, field)?
        .as_u64()
        .filter(|&n| n > 0)
        .map(|n| n as usize)
        .ok_or_else(|| doc.error(field, "expected a positive integer"))
}

fn shaped(
    doc: &Document,
    obj: &Map<String, Value>,
    field: &'static str,
    shape: (usize, usize),
    empty_is_zero: bool,
) -> Result<ComplexMatrix, FormatError> {
    match matrix_rows(doc, field, required(doc, obj, field)?)? {
        Some(m) if m.shape() == shape => Ok(m),
        Some(m) => Err(blockdiag_core::Error::DimensionMismatch {
            context: field,
            expected: shape,
            found: m.shape(),
        }
        .into()),
        None if empty_is_zero => Ok(ComplexMatrix::zeros(shape.0, shape.1)),
        None => Err(doc.error(field, "matrix has no rows").into()),
    }
}

fn selector(doc: &Document, value: &Value) -> Result<Selector, ParseError> {
    let bad = || doc.error("sigma0", r#"expected {"type": "threshold", "value": x} or {"type": "indices", "values": [..]}"#);
    let obj = value.as_object().ok_or_else(bad)?;
    match obj.get("type").and_then(Value::as_str) {
        Some("threshold") => Ok(Selector::Threshold(obj.get("value").and_then(Value::as_f64).ok_or_else(bad)?)),
        Some("indices") => {
            let values = obj.get("values").and_then(Value::as_array).ok_or_else(bad)?;
            values
                .iter()
                .map(|v| v.as_u64().map(|i| i as usize).ok_or_else(bad))
                .collect::<Result<_, _>>()
                .map(Selector::Indices)
        }
        _ => Err(bad()),
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, FormatError> {
    let doc = Document { text };
    let root = doc.parse_root()?;
    let obj = root_object(&root)?;
    let n0 = dimension(&doc, obj, "n0")?;
    let n1 = dimension(&doc, obj, "n1")?;
    let hermitian = required(&doc, obj, "hermitian")?
        .as_bool()
        .ok_or_else(|| doc.error("hermitian", "expected a boolean"))?;
    let a0 = shaped(&doc, obj, "A0", (n0, n0), false)?;
    let a1 = shaped(&doc, obj, "A1", (n1, n1), false)?;
    let w = shaped(&doc, obj, "W", (n0, n1), true)?;
    let sigma0 = match obj.get("sigma0") {
        None | Some(Value::Null) => None,
        Some(v) => Some(selector(&doc, v)?),
    };
    Ok(ProblemFile {
        problem: BlockProblem::assemble(a0, a1, w, hermitian)?,
        sigma0,
    })
}

fn write_float(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").unwrap();
}

fn write_matrix(out: &mut String, m: &ComplexMatrix) {
    out.push_str("[\n");
    for i in 0..m.rows() {
        out.push_str("    [");
        for j in 0..m.cols() {
            if j > 0 {
                out.push_str(", ");
            }
            out.push('[');
            write_float(out, m[(i, j)].re);
            out.push_str(", ");
            write_float(out, m[(i, j)].im);
            out.push(']');
        }
        out.push(']');
        if i + 1 < m.rows() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]");
}

pub fn serialize_problem(file: &ProblemFile) -> String {
    let p = &file.problem;
    let mut out = String::new();
    write!(out, "{{\n  \"n0\": {},\n  \"n1\": {},\n  \"hermitian\": {},\n", p.n0(), p.n1(), p.hermitian_mode()).unwrap();
    for (key, m) in [("A0", p.a0()), ("A1", p.a1()), ("W", p.w())] {
        write!(out, "  \"{key}\": ").unwrap();
        write_matrix(&mut out, m);
        out.push_str(",\n");
    }
    match &file.sigma0 {
        None => {
            out.truncate(out.len() - 2);
            out.push('\n');
        }
        Some(Selector::Threshold(c)) => {
            out.push_str("  \"sigma0\": {\"type\": \"threshold\", \"value\": ");
            write_float(&mut out, *c);
            out.push_str("}\n");
        }
        Some(Selector::Indices(ix)) => {
            let list: Vec<String> = ix.iter().map(usize::to_string).collect();
            writeln!(out, "  \"sigma0\": {{\"type\": \"indices\", \"values\": [{}]}}", list.join(", ")).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// A bare matrix, or an object with the matrix under `"X"`.
pub fn parse_angular(text: &str) -> Result<ComplexMatrix, FormatError> {
    let doc = Document { text };
    let root = doc.parse_root()?;
    let value = match &root {
        Value::Object(obj) => required(&doc, obj, "X")?,
        other => other,
    };
    matrix_rows(&doc, "X", value)?.ok_or_else(|| doc.error("X", "matrix has no rows").into())
}

pub fn serialize_angular(x: &ComplexMatrix) -> String {
    let mut out = String::from("{\n  \"X\": ");
    write_matrix(&mut out, x);
    out.push_str("\n}\n");
    out
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum CouplingKind {
    #[default]
    Identity,
    Banded,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum FamilyDocument {
    DiagPower {
        p: f64,
        q: f64,
        #[serde(default)]
        coupling: CouplingKind,
        #[serde(default = "default_band")]
        band: usize,
        #[serde(default = "default_scale")]
        scale: f64,
    },
}

fn default_band() -> usize {
    1
}

fn default_scale() -> f64 {
    1.0
}

/// `{"kind": "diag-power", "p", "q", "coupling": "identity" | "banded",
/// "band", "scale"}`; `coupling`, `band` and `scale` default to
/// `"identity"`, 1 and 1.
pub fn parse_family(text: &str) -> Result<FamilySpec, FormatError> {
    let doc: FamilyDocument = serde_json::from_str(text).map_err(|e| ParseError {
        line: e.line(),
        field: String::new(),
        message: e.to_string(),
    })?;
    let FamilyDocument::DiagPower { p, q, coupling, band, scale } = doc;
    let spec = FamilySpec {
        p,
        q,
        coupling: match coupling {
            CouplingKind::Identity => FamilyCoupling::Identity,
            CouplingKind::Banded => FamilyCoupling::Banded { band },
        },
        scale,
    };
    spec.validate()?;
    Ok(spec)
}
