//! JSON files for games, correlations, strategies and discrimination instances,
//! plus the canonical writer used for every artifact.
//!
//! Canonical form: object keys sorted, two-space indentation, arrays of numbers
//! (and arrays of such arrays) on one line, every real printed with 17
//! significant digits. Complex entries are `[re, im]`; matrices are arrays of
//! rows. Parsing a canonical file and writing it back is byte-identical.
//!
//! ```text
//! game:        {"h": [a][b][x][y], "q": [a][b], "sizes": {"a","b","x","y"}}
//!              ("labels": {"a": [..], "b": [..], "x": [..], "y": [..]} may replace or accompany "sizes")
//! correlation: {"p": [a][b][x][y], "sizes": {..}}
//! strategy:    {"R": [a][x] matrix, "S": [b][y] matrix, "dD": n, "dE": m, "gamma": matrix}
//! dist:        {"states": [matrix, ..]}
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::games::{Alphabets, Correlation, Game};
use crate::linalg::{Complex64, ComplexMatrix, DensityOperator, HermitianOperator};
use crate::strategies::{PovmFamily, PovmResiduals, Strategy};

/// Rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Labels {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub x: Vec<String>,
    pub y: Vec<String>,
}

impl Labels {
    fn sizes(&self) -> Result<Alphabets> {
        Alphabets::new(self.a.len(), self.b.len(), self.x.len(), self.y.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Alphabets>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Labels>,
    /// `q[a][b]`.
    pub q: Vec<Vec<f64>>,
    /// `h[a][b][x][y]`.
    pub h: Vec<Vec<Vec<Vec<f64>>>>,
}

impl GameFile {
    pub fn from_game(g: &Game) -> Self {
        let s = g.sizes();
        Self {
            sizes: Some(s),
            labels: None,
            q: nest2(g.q_flat(), s.a, s.b),
            h: nest4(g.h_flat(), s),
        }
    }

    pub fn to_game(&self) -> Result<Game> {
        let sizes = declared_sizes(self.sizes, self.labels.as_ref())?;
        let q = flatten2(&self.q, sizes.a, sizes.b, "q")?;
        let h = flatten4(&self.h, sizes, "h")?;
        Game::new(sizes, q, h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Alphabets>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Labels>,
    /// `p[a][b][x][y]`.
    pub p: Vec<Vec<Vec<Vec<f64>>>>,
}

impl CorrelationFile {
    pub fn from_correlation(c: &Correlation) -> Self {
        Self {
            sizes: Some(c.sizes()),
            labels: None,
            p: nest4(c.as_slice(), c.sizes()),
        }
    }

    pub fn to_correlation(&self) -> Result<Correlation> {
        let sizes = declared_sizes(self.sizes, self.labels.as_ref())?;
        Correlation::new(sizes, flatten4(&self.p, sizes, "p")?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    #[serde(rename = "dD")]
    pub d_alice: usize,
    #[serde(rename = "dE")]
    pub d_bob: usize,
    #[serde(rename = "R")]
    pub alice: Vec<Vec<MatrixJson>>,
    #[serde(rename = "S")]
    pub bob: Vec<Vec<MatrixJson>>,
    pub gamma: MatrixJson,
}

/// A parsed strategy together with the measurement residuals found on load.
#[derive(Debug, Clone)]
pub struct LoadedStrategy {
    pub strategy: Strategy,
    pub alice_residuals: PovmResiduals,
    pub bob_residuals: PovmResiduals,
}

impl StrategyFile {
    pub fn from_strategy(s: &Strategy) -> Self {
        let family = |f: &PovmFamily| -> Vec<Vec<MatrixJson>> {
            f.settings()
                .iter()
                .map(|setting| setting.iter().map(|e| matrix_to_json(e.matrix())).collect())
                .collect()
        };
        Self {
            d_alice: s.dim_alice(),
            d_bob: s.dim_bob(),
            alice: family(s.alice()),
            bob: family(s.bob()),
            gamma: matrix_to_json(s.gamma().matrix()),
        }
    }

    pub fn to_strategy(&self) -> Result<LoadedStrategy> {
        let family = |name: &str, sets: &[Vec<MatrixJson>], dim: usize| -> Result<PovmFamily> {
            let settings = sets
                .iter()
                .enumerate()
                .map(|(i, setting)| {
                    setting
                        .iter()
                        .enumerate()
                        .map(|(o, m)| {
                            let m = matrix_from_json(m, &format!("{name}[{i}][{o}]"))?;
                            if m.rows() != dim {
                                return Err(Error::Shape(format!(
                                    "{name}[{i}][{o}] is {}x{}, declared dimension is {dim}",
                                    m.rows(),
                                    m.cols()
                                )));
                            }
                            HermitianOperator::new(m)
                        })
                        .collect()
                })
                .collect::<Result<Vec<Vec<_>>>>()?;
            PovmFamily::new(settings)
        };
        let alice = family("R", &self.alice, self.d_alice)?;
        let bob = family("S", &self.bob, self.d_bob)?;
        let gamma = DensityOperator::from_matrix(matrix_from_json(&self.gamma, "gamma")?)?;
        let (alice_residuals, bob_residuals) = (alice.residuals(), bob.residuals());
        Ok(LoadedStrategy {
            strategy: Strategy::new(alice, bob, gamma)?,
            alice_residuals,
            bob_residuals,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistFile {
    pub states: Vec<MatrixJson>,
}

impl DistFile {
    pub fn from_states(states: &[HermitianOperator]) -> Self {
        Self {
            states: states.iter().map(|s| matrix_to_json(s.matrix())).collect(),
        }
    }

    pub fn to_states(&self) -> Result<Vec<HermitianOperator>> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, m)| HermitianOperator::new(matrix_from_json(m, &format!("states[{i}]"))?))
            .collect()
    }
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson, what: &str) -> Result<ComplexMatrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Shape(format!("{what}: rows have different lengths")));
    }
    if n == 0 || cols != n {
        return Err(Error::Shape(format!("{what}: expected a nonempty square matrix, got {n}x{cols}")));
    }
    let data = rows
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    ComplexMatrix::from_vec(n, cols, data)
}

fn declared_sizes(sizes: Option<Alphabets>, labels: Option<&Labels>) -> Result<Alphabets> {
    match (sizes, labels) {
        (Some(s), None) => Alphabets::new(s.a, s.b, s.x, s.y),
        (None, Some(l)) => l.sizes(),
        (Some(s), Some(l)) => {
            let from_labels = l.sizes()?;
            if from_labels != s {
                return Err(Error::Shape(format!("sizes {s:?} disagree with labels {from_labels:?}")));
            }
            Ok(s)
        }
        (None, None) => Err(Error::Shape("either \"sizes\" or \"labels\" is required".into())),
    }
}

fn nest2(flat: &[f64], n: usize, m: usize) -> Vec<Vec<f64>> {
    debug_assert_eq!(flat.len(), n * m);
    flat.chunks(m).map(<[f64]>::to_vec).collect()
}

fn nest4(flat: &[f64], s: Alphabets) -> Vec<Vec<Vec<Vec<f64>>>> {
    flat.chunks(s.b * s.x * s.y)
        .map(|ab| ab.chunks(s.x * s.y).map(|xy| nest2(xy, s.x, s.y)).collect())
        .collect()
}

fn check_len(len: usize, want: usize, what: &str) -> Result<()> {
    if len != want {
        return Err(Error::Shape(format!("{what} has length {len}, expected {want}")));
    }
    Ok(())
}

fn flatten2(v: &[Vec<f64>], n: usize, m: usize, what: &str) -> Result<Vec<f64>> {
    check_len(v.len(), n, what)?;
    let mut out = Vec::with_capacity(n * m);
    for (i, row) in v.iter().enumerate() {
        check_len(row.len(), m, &format!("{what}[{i}]"))?;
        out.extend_from_slice(row);
    }
    Ok(out)
}

fn flatten4(v: &[Vec<Vec<Vec<f64>>>], s: Alphabets, what: &str) -> Result<Vec<f64>> {
    check_len(v.len(), s.a, what)?;
    let mut out = Vec::with_capacity(s.len());
    for (a, row) in v.iter().enumerate() {
        check_len(row.len(), s.b, &format!("{what}[{a}]"))?;
        for (b, block) in row.iter().enumerate() {
            out.extend(flatten2(block, s.x, s.y, &format!("{what}[{a}][{b}]"))?);
        }
    }
    Ok(out)
}

/// Reads a JSON file into `T`. Syntax errors, schema violations and failed
/// validation all become [`Error::Parse`] naming the file.
pub fn load<T, U>(path: &Path, convert: impl FnOnce(&T) -> Result<U>) -> Result<U>
where
    T: DeserializeOwned,
{
    let text = std::fs::read_to_string(path)?;
    let parsed: T = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    convert(&parsed).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_game(path: &Path) -> Result<Game> {
    load(path, GameFile::to_game)
}

pub fn load_correlation(path: &Path) -> Result<Correlation> {
    load(path, CorrelationFile::to_correlation)
}

pub fn load_strategy(path: &Path) -> Result<LoadedStrategy> {
    load(path, StrategyFile::to_strategy)
}

pub fn load_dist(path: &Path) -> Result<Vec<HermitianOperator>> {
    load(path, DistFile::to_states)
}

/// Canonical JSON text (with trailing newline) for any serializable value.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

pub fn write_canonical<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_canonical_string(value)?)?;
    Ok(())
}

/// Seventeen significant digits: plain decimal for moderate exponents, scientific otherwise.
pub fn format_real(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..=15).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = mantissa.strip_prefix('-').map_or(("", mantissa), |m| ("-", m));
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    if exp >= 0 {
        let split = exp as usize + 1;
        format!("{sign}{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| match i {
            Value::Array(inner) => inner.iter().all(|j| !j.is_array() && !j.is_object()),
            Value::Object(_) => false,
            _ => true,
        }),
        _ => true,
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => write!(out, "{u}").expect("write to string"),
            (None, Some(i)) => write!(out, "{i}").expect("write to string"),
            _ => out.push_str(&format_real(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if is_flat(v) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                push_indent(out, indent + 2);
                write_value(out, item, indent + 2);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            push_indent(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (k, key) in keys.iter().enumerate() {
                push_indent(out, indent + 2);
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push_str(": ");
                write_value(out, &map[*key], indent + 2);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            push_indent(out, indent);
            out.push('}');
        }
    }
}

fn push_indent(out: &mut String, n: usize) {
    out.extend(std::iter::repeat_n(' ', n));
}
