//! The shipped corpus: named operators with locked verdicts.
//!
//! The files are compiled into the binary so `jetcalc corpus` works from
//! any directory. `corpus.toml` lists the entries; each verdict in it was
//! produced by this tool and is kept as regression data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use jetcalc_core::poisson::PoissonSetup;

use crate::assess::{assess, corroborate, jacobi_verdict_name, verdict_name};
use crate::setup::{parse_setup, Setup, SetupError};

pub const FILES: &[(&str, &str)] = &[
    ("kdv.setup", include_str!("../corpus/kdv.setup")),
    ("hydrodynamic.setup", include_str!("../corpus/hydrodynamic.setup")),
    ("pair.setup", include_str!("../corpus/pair.setup")),
];

pub const MANIFEST: &str = include_str!("../corpus/corpus.toml");

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Locked {
    pub verdict: String,
    pub sufficient: bool,
    pub universal: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub name: String,
    pub setup: String,
    pub operator: String,
    /// Random triples checked with the direct Jacobi residual.
    #[serde(default)]
    pub corroborate: usize,
    pub locked: Locked,
}

#[derive(Debug, Deserialize)]
struct Manifest {
    entry: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub name: String,
    pub operator: String,
    pub skew_adjoint: bool,
    pub found: Locked,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    pub corroborated: usize,
    pub corroboration_failures: usize,
    pub matches: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("{file}: {source}")]
    Setup { file: String, source: SetupError },
    #[error("{0}")]
    Missing(String),
}

pub fn entries() -> Result<Vec<Entry>, CorpusError> {
    let m: Manifest = toml::from_str(MANIFEST).map_err(|e| CorpusError::Manifest(e.to_string()))?;
    Ok(m.entry)
}

pub fn setup(file: &str) -> Result<Setup, CorpusError> {
    let text = FILES
        .iter()
        .find(|(n, _)| *n == file)
        .map(|(_, t)| *t)
        .ok_or_else(|| CorpusError::Missing(format!("no corpus file {file}")))?;
    parse_setup(text).map_err(|source| CorpusError::Setup { file: file.into(), source })
}

pub fn run_entry(entry: &Entry) -> Result<Outcome, CorpusError> {
    run_entry_seeded(entry, None)
}

/// As [`run_entry`], with the corroboration seed overridden.
pub fn run_entry_seeded(entry: &Entry, seed: Option<u64>) -> Result<Outcome, CorpusError> {
    let setup = setup(&entry.setup)?;
    let op = setup
        .operators
        .get(&entry.operator)
        .ok_or_else(|| CorpusError::Missing(format!("{} has no operator {}", entry.setup, entry.operator)))?
        .clone();
    let sig = setup.signature.clone();
    let display = op.display(&sig).to_string();
    let Ok(poisson) = PoissonSetup::new(sig.clone(), op) else {
        return Ok(Outcome {
            name: entry.name.clone(),
            operator: display,
            skew_adjoint: false,
            found: Locked { verdict: "not-skew-adjoint".into(), sufficient: false, universal: "n/a".into() },
            witness: None,
            corroborated: 0,
            corroboration_failures: 0,
            matches: entry.locked.verdict == "not-skew-adjoint",
        });
    };
    let opts = setup.options;
    let a = assess(&poisson, opts.max_degree, opts.max_order, true);
    let found = Locked {
        verdict: verdict_name(&a.verdict).into(),
        sufficient: a.sufficient,
        universal: jacobi_verdict_name(a.universal).into(),
    };
    let failures = if entry.corroborate > 0 { corroborate(&poisson, entry.corroborate, seed.unwrap_or(opts.seed)) } else { 0 };
    let hamiltonian = found.verdict == "hamiltonian";
    Ok(Outcome {
        name: entry.name.clone(),
        operator: display,
        skew_adjoint: true,
        matches: found == entry.locked && (!hamiltonian || failures == 0),
        found,
        witness: a.witness.map(|w| w.iter().map(|f| f.display(&sig).to_string()).collect()),
        corroborated: entry.corroborate,
        corroboration_failures: failures,
    })
}

/// Every entry, evaluated in parallel and reported in manifest order.
pub fn run_all() -> Result<Vec<Outcome>, CorpusError> {
    entries()?.par_iter().map(run_entry).collect()
}
