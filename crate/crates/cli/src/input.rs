//! Input files: channel sets, codes and simulation configs.

use std::path::{Path, PathBuf};

use avqc::channels::{ChannelDescriptor, DensityOperator, QuantumChannel};
use avqc::coding_sim::{ClassicalCode, CodePair, RandomCode};
use avqc::numerics::{ComplexMatrix, HermitianMatrix, C64};
use avqc::symmetrizability::{Avqc, Povm};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Raw bytes of an input file, kept for the report digest.
pub struct Loaded<T> {
    pub value: T,
    pub bytes: Vec<u8>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<Loaded<T>> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value = serde_json::from_slice(&bytes).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(Loaded { value, bytes })
}

/// SHA-256 over the given inputs, each prefixed by its length.
pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSetFile {
    pub schema_version: u32,
    pub channels: Vec<ChannelDescriptor>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

impl ChannelSetFile {
    /// Builds the AVQC, naming the first offending channel on failure.
    pub fn to_avqc(&self, path: &Path) -> CliResult<Avqc> {
        let schema = |message: String| CliError::Schema {
            path: path.to_path_buf(),
            message,
        };
        if self.schema_version != SCHEMA_VERSION {
            return Err(schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.channels.is_empty() {
            return Err(schema("channel list is empty".into()));
        }
        let mut channels: Vec<QuantumChannel> = Vec::with_capacity(self.channels.len());
        for (i, d) in self.channels.iter().enumerate() {
            let ch = d.to_channel().map_err(|source| CliError::Invalid {
                path: path.to_path_buf(),
                context: format!("channels[{i}]"),
                source,
            })?;
            if let Some(first) = channels.first() {
                if (ch.dim_in(), ch.dim_out()) != (first.dim_in(), first.dim_out()) {
                    return Err(schema(format!(
                        "channels[{i}] maps {}→{} but channels[0] maps {}→{}",
                        ch.dim_in(),
                        ch.dim_out(),
                        first.dim_in(),
                        first.dim_out()
                    )));
                }
            }
            channels.push(ch);
        }
        let avqc = match &self.labels {
            Some(labels) => Avqc::with_labels(channels, labels.clone()),
            None => Avqc::new(channels),
        };
        avqc.map_err(|source| CliError::Invalid {
            path: path.to_path_buf(),
            context: "channel set".into(),
            source,
        })
    }
}

pub fn load_avqc(path: &Path) -> CliResult<Loaded<Avqc>> {
    let file: Loaded<ChannelSetFile> = read_json(path)?;
    Ok(Loaded {
        value: file.value.to_avqc(path)?,
        bytes: file.bytes,
    })
}

/// Matrix as rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

fn matrix(m: &MatrixJson, what: &str) -> avqc::Result<ComplexMatrix> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != cols) {
        return Err(avqc::Error::Shape(format!("{what} has ragged rows")));
    }
    ComplexMatrix::from_vec(rows, cols, m.iter().flatten().map(|z| C64::new(z[0], z[1])).collect())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedCode {
    pub encoder: ChannelDescriptor,
    pub decoder: ChannelDescriptor,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeFile {
    Quantum {
        encoder: ChannelDescriptor,
        decoder: ChannelDescriptor,
    },
    Random {
        codes: Vec<WeightedCode>,
    },
    Classical {
        states: Vec<MatrixJson>,
        povm: Vec<MatrixJson>,
    },
}

/// A parsed code file.
pub enum Code {
    Random(RandomCode),
    Classical(ClassicalCode),
}

fn code_pair(encoder: &ChannelDescriptor, decoder: &ChannelDescriptor) -> avqc::Result<CodePair> {
    CodePair::new(encoder.to_channel()?, decoder.to_channel()?)
}

impl CodeFile {
    pub fn to_code(&self, path: &Path) -> CliResult<Code> {
        let wrap = |context: &str| {
            let path: PathBuf = path.to_path_buf();
            let context = context.to_string();
            move |source| CliError::Invalid { path, context, source }
        };
        Ok(match self {
            Self::Quantum { encoder, decoder } => {
                Code::Random(RandomCode::point_mass(code_pair(encoder, decoder).map_err(wrap("code"))?))
            }
            Self::Random { codes } => {
                let mut entries = Vec::with_capacity(codes.len());
                for (i, c) in codes.iter().enumerate() {
                    entries.push((code_pair(&c.encoder, &c.decoder).map_err(wrap(&format!("codes[{i}]")))?, c.weight));
                }
                Code::Random(RandomCode::new(entries).map_err(wrap("codes"))?)
            }
            Self::Classical { states, povm } => {
                let mut rho = Vec::with_capacity(states.len());
                for (i, s) in states.iter().enumerate() {
                    let m = matrix(s, "state").map_err(wrap(&format!("states[{i}]")))?;
                    rho.push(DensityOperator::from_matrix(m).map_err(wrap(&format!("states[{i}]")))?);
                }
                let mut elems = Vec::with_capacity(povm.len());
                for (i, e) in povm.iter().enumerate() {
                    let m = matrix(e, "povm element").map_err(wrap(&format!("povm[{i}]")))?;
                    elems.push(HermitianMatrix::new(m).map_err(wrap(&format!("povm[{i}]")))?);
                }
                let povm = Povm::new(elems).map_err(wrap("povm"))?;
                Code::Classical(ClassicalCode::new(rho, povm).map_err(wrap("code"))?)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    HaarTwirl,
    Lipschitz,
    Robustification,
    InnerProduct,
    RandomCode,
    Reduce,
    Derandomize,
    Equivalence,
    TypeBound,
}

/// `simulate` experiment description.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub check: CheckName,
    #[serde(default)]
    pub avqc: Option<ChannelSetFile>,
    #[serde(default)]
    pub l: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub code: Option<CodeFile>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub n_samples: Option<usize>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub retries: Option<usize>,
    /// Noise level of the synthetic shift-noise channel set.
    #[serde(default)]
    pub eta: Option<f64>,
    /// Alphabet size for checks that need no channels.
    #[serde(default)]
    pub alphabet: Option<usize>,
}
