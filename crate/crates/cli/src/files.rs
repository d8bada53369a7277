//! JSON input and output formats.

use std::fs;
use std::path::Path;

use normforge_core::{ApproxElement, ApproxNorm, Functional, NormSpec, VertexConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{core_error, CliError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseEntry {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseEntry {
    pub fn from_functional(f: &Functional) -> Self {
        let (indices, values) = f.entries().iter().copied().unzip();
        Self { indices, values }
    }

    /// Sorts by index and drops explicit zeros before validating.
    pub fn to_functional(&self, dim: usize) -> Result<Functional, String> {
        if self.indices.len() != self.values.len() {
            return Err(format!(
                "{} indices but {} values",
                self.indices.len(),
                self.values.len()
            ));
        }
        let mut entries: Vec<(usize, f64)> = self
            .indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .filter(|&(_, v)| v != 0.0)
            .collect();
        entries.sort_by_key(|&(i, _)| i);
        Functional::new(dim, entries).map_err(|e| e.to_string())
    }
}

/// `{"dim", "name", "boundary": [{"indices", "values"}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSpecFile {
    pub dim: usize,
    pub name: String,
    pub boundary: Vec<SparseEntry>,
}

impl NormSpecFile {
    pub fn from_spec(spec: &NormSpec) -> Self {
        Self {
            dim: spec.dim(),
            name: spec.name().to_string(),
            boundary: spec.boundary().iter().map(SparseEntry::from_functional).collect(),
        }
    }

    pub fn to_spec(&self, config: VertexConfig) -> Result<NormSpec, CliError> {
        let boundary = self
            .boundary
            .iter()
            .enumerate()
            .map(|(i, e)| {
                e.to_functional(self.dim)
                    .map_err(|msg| CliError::Parse(format!("boundary[{i}]: {msg}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        NormSpec::with_config(self.name.clone(), self.dim, boundary, config).map_err(|e| core_error("norm", e))
    }
}

/// `{"dim", "indices", "values"}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalFile {
    pub dim: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl FunctionalFile {
    pub fn to_functional(&self) -> Result<Functional, CliError> {
        SparseEntry {
            indices: self.indices.clone(),
            values: self.values.clone(),
        }
        .to_functional(self.dim)
        .map_err(|msg| CliError::Parse(format!("functional: {msg}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementEntry {
    pub source_index: usize,
    pub r: u32,
    pub n: usize,
    pub m: usize,
    pub scale: f64,
    /// The scaled functional.
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

/// An approximating norm: its induced boundary in [`NormSpecFile`] layout,
/// plus the elements it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxFile {
    pub dim: usize,
    pub name: String,
    pub boundary: Vec<SparseEntry>,
    pub epsilon: f64,
    pub source_name: String,
    pub elements: Vec<ElementEntry>,
}

impl ApproxFile {
    pub fn from_approx(approx: &ApproxNorm) -> Self {
        let induced = NormSpecFile::from_spec(approx.induced());
        Self {
            dim: induced.dim,
            name: induced.name,
            boundary: induced.boundary,
            epsilon: approx.epsilon(),
            source_name: approx.source().name().to_string(),
            elements: approx
                .elements()
                .iter()
                .map(|e| {
                    let scaled = SparseEntry::from_functional(&e.scaled);
                    ElementEntry {
                        source_index: e.source_index,
                        r: e.r,
                        n: e.n,
                        m: e.m,
                        scale: e.scale,
                        indices: scaled.indices,
                        values: scaled.values,
                    }
                })
                .collect(),
        }
    }

    /// Elements bound to the boundary of `source`.
    pub fn elements_for(&self, source: &NormSpec) -> Result<Vec<ApproxElement>, CliError> {
        if self.dim != source.dim() {
            return Err(CliError::Parse(format!(
                "approximation has dim {} but the norm has dim {}",
                self.dim,
                source.dim()
            )));
        }
        self.elements
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let f_source = source.boundary().get(e.source_index).ok_or_else(|| {
                    CliError::Parse(format!("elements[{i}]: source_index {} out of range", e.source_index))
                })?;
                let scaled = SparseEntry {
                    indices: e.indices.clone(),
                    values: e.values.clone(),
                }
                .to_functional(self.dim)
                .map_err(|msg| CliError::Parse(format!("elements[{i}]: {msg}")))?;
                if !(e.scale.is_finite() && e.scale > 0.0) {
                    return Err(CliError::Parse(format!("elements[{i}]: scale must be positive")));
                }
                Ok(ApproxElement {
                    source_index: e.source_index,
                    f_source: f_source.clone(),
                    r: e.r,
                    n: e.n,
                    m: e.m,
                    scale: e.scale,
                    scaled,
                })
            })
            .collect()
    }

    /// The stored induced boundary.
    pub fn boundary_functionals(&self) -> Result<Vec<Functional>, CliError> {
        self.boundary
            .iter()
            .enumerate()
            .map(|(i, e)| {
                e.to_functional(self.dim)
                    .map_err(|msg| CliError::Parse(format!("boundary[{i}]: {msg}")))
            })
            .collect()
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_spec(path: &Path, config: VertexConfig) -> Result<NormSpec, CliError> {
    let file: NormSpecFile = read_json(path)?;
    file.to_spec(config)
        .map_err(|e| e.with_context(&path.display().to_string()))
}
