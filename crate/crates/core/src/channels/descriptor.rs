//! JSON descriptors for channels.
//!
//! Explicit form: `{"dim_in":2,"dim_out":2,"kraus":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}`
//! where each Kraus operator is a list of rows of `[re, im]` pairs.
//! Builtin form: `{"builtin":"erasure","p":0.3,"d":2}`,
//! `{"builtin":"depolarizing","lambda":0.1,"d":2}`, `{"builtin":"identity","d":2}`,
//! `{"builtin":"dephasing","p":0.2,"d":2}`.

use serde::{Deserialize, Serialize};

use super::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::matrix::{ComplexMatrix, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuiltinChannel {
    Erasure { p: f64, d: usize },
    Depolarizing { lambda: f64, d: usize },
    Identity { d: usize },
    Dephasing { p: f64, d: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitChannel {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelDescriptor {
    Builtin(BuiltinChannel),
    Explicit(ExplicitChannel),
}

impl ChannelDescriptor {
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        match self {
            Self::Builtin(b) => match *b {
                BuiltinChannel::Erasure { p, d } => QuantumChannel::erasure(p, d),
                BuiltinChannel::Depolarizing { lambda, d } => QuantumChannel::depolarizing(lambda, d),
                BuiltinChannel::Identity { d } => {
                    if d == 0 {
                        return Err(Error::Domain("dimension must be positive".into()));
                    }
                    Ok(QuantumChannel::identity(d))
                }
                BuiltinChannel::Dephasing { p, d } => QuantumChannel::dephasing(p, d),
            },
            Self::Explicit(e) => {
                let mut kraus = Vec::with_capacity(e.kraus.len());
                for (n, k) in e.kraus.iter().enumerate() {
                    if k.len() != e.dim_out || k.iter().any(|row| row.len() != e.dim_in) {
                        return Err(Error::Shape(format!(
                            "kraus[{n}] is not a {}x{} matrix",
                            e.dim_out, e.dim_in
                        )));
                    }
                    let data = k
                        .iter()
                        .flat_map(|row| row.iter().map(|z| C64::new(z[0], z[1])))
                        .collect();
                    kraus.push(ComplexMatrix::from_vec(e.dim_out, e.dim_in, data)?);
                }
                QuantumChannel::from_kraus(e.dim_in, e.dim_out, kraus)
            }
        }
    }

    pub fn explicit(ch: &QuantumChannel) -> Self {
        let kraus = ch
            .kraus()
            .iter()
            .map(|k| {
                (0..k.rows())
                    .map(|r| (0..k.cols()).map(|c| [k[(r, c)].re, k[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        Self::Explicit(ExplicitChannel {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus,
        })
    }
}
