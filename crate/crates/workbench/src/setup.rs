//! `.setup` files: a TOML document naming the variables and operators.
//!
//! ```toml
//! independent = ["x"]
//! dependent = ["u"]
//!
//! [operators]
//! J1 = "D"
//! J2 = "D^3 + 2/3*u*D + 1/3*u_x"
//! B = [["0", "D"], ["D", "0"]]
//!
//! [options]
//! max_degree = 3
//! max_order = 2
//! seed = 7
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use jetcalc_core::diffops::DiffOperator;
use jetcalc_core::Signature;
use serde::Deserialize;

use crate::parse::{is_reserved, parse_operator, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum SetupError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema: {0}")]
    Schema(String),
    #[error("operator {name}: {source}")]
    Operator { name: String, source: ParseError },
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum OperatorSource {
    Scalar(String),
    Matrix(Vec<Vec<String>>),
}

impl OperatorSource {
    /// The text handed to the operator parser.
    pub fn text(&self) -> String {
        match self {
            OperatorSource::Scalar(s) => s.clone(),
            OperatorSource::Matrix(rows) => {
                let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(", "))).collect();
                format!("[{}]", rows.join(", "))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    pub max_degree: u32,
    pub max_order: u32,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_degree: 3, max_order: 2, seed: 0 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetup {
    independent: Vec<String>,
    dependent: Vec<String>,
    #[serde(default)]
    operators: BTreeMap<String, OperatorSource>,
    #[serde(default)]
    options: Options,
}

#[derive(Clone, Debug)]
pub struct Setup {
    pub signature: Signature,
    pub operators: BTreeMap<String, DiffOperator>,
    pub sources: BTreeMap<String, String>,
    pub options: Options,
}

impl Setup {
    /// A setup with no named operators.
    pub fn bare(signature: Signature) -> Self {
        Setup { signature, operators: BTreeMap::new(), sources: BTreeMap::new(), options: Options::default() }
    }
}

fn check_name(kind: &str, name: &str) -> Result<(), SetupError> {
    let mut chars = name.chars();
    let ok = chars.next().is_some_and(char::is_alphabetic) && chars.all(char::is_alphanumeric);
    if !ok {
        return Err(SetupError::Schema(format!("{kind} name '{name}' is not an identifier")));
    }
    if is_reserved(name) {
        return Err(SetupError::Schema(format!("{kind} name '{name}' is reserved for total derivatives")));
    }
    Ok(())
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse_setup(text: &str) -> Result<Setup, SetupError> {
    let raw: RawSetup = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        SetupError::Syntax { line, column, message: e.message().to_string() }
    })?;
    if raw.independent.is_empty() {
        return Err(SetupError::Schema("independent variable list is empty".into()));
    }
    if raw.dependent.is_empty() {
        return Err(SetupError::Schema("dependent variable list is empty".into()));
    }
    for n in &raw.independent {
        check_name("independent", n)?;
    }
    for n in &raw.dependent {
        check_name("dependent", n)?;
    }
    let signature = Signature::new(raw.independent.iter().map(String::as_str), raw.dependent.iter().map(String::as_str))
        .map_err(|e| SetupError::Schema(e.to_string()))?;
    let mut operators = BTreeMap::new();
    let mut sources = BTreeMap::new();
    for (name, src) in raw.operators {
        check_name("operator", &name)?;
        if signature.independent_id(&name).is_some() || signature.dependent_id(&name).is_some() {
            return Err(SetupError::Schema(format!("operator name '{name}' clashes with a variable")));
        }
        if let OperatorSource::Matrix(rows) = &src {
            if rows.is_empty() || rows.iter().any(Vec::is_empty) {
                return Err(SetupError::Schema(format!("operator {name}: empty matrix")));
            }
        }
        let text = src.text();
        let op = parse_operator(&text, &signature).map_err(|source| SetupError::Operator { name: name.clone(), source })?;
        operators.insert(name.clone(), op);
        sources.insert(name, text);
    }
    Ok(Setup { signature, operators, sources, options: raw.options })
}

pub fn load_setup(path: impl AsRef<Path>) -> Result<Setup, SetupError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SetupError::Io { path: path.to_path_buf(), source })?;
    parse_setup(&text)
}
