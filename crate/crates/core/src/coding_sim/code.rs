use crate::channels::{check_distribution, DensityOperator, QuantumChannel};
use crate::error::{Error, Result};
use crate::numerics::matrix::{ComplexMatrix, ZERO};
use crate::symmetrizability::{Avqc, Povm};

/// Encoder `P: F → H^{⊗l}` and decoder `R: K^{⊗l} → F'` with `F ⊆ F'`.
#[derive(Clone, Debug)]
pub struct CodePair {
    encoder: QuantumChannel,
    decoder: QuantumChannel,
}

impl CodePair {
    pub fn new(encoder: QuantumChannel, decoder: QuantumChannel) -> Result<Self> {
        if decoder.dim_out() < encoder.dim_in() {
            return Err(Error::Shape(format!(
                "decoder output {} smaller than code space {}",
                decoder.dim_out(),
                encoder.dim_in()
            )));
        }
        Ok(Self { encoder, decoder })
    }

    /// Identity encoder and decoder on `C^d`.
    pub fn identity(d: usize) -> Self {
        Self {
            encoder: QuantumChannel::identity(d),
            decoder: QuantumChannel::identity(d),
        }
    }

    /// Isometric encoder `V: F → H`; the decoder applies `V†` on the code
    /// subspace and sends its complement to `|0⟩`.
    pub fn isometric(v: &ComplexMatrix) -> Result<Self> {
        let (h, f) = (v.rows(), v.cols());
        let encoder = QuantumChannel::isometry(v)?;
        // decoder: V† on the code subspace, everything else mapped to e_0
        let proj = v.matmul(&v.adjoint());
        let mut kraus = vec![v.adjoint()];
        let comp = &ComplexMatrix::identity(h) - &proj;
        for c in 0..h {
            let col = comp.column_vec(c);
            if col.iter().all(|z| z.norm() < 1e-14) {
                continue;
            }
            let mut k = ComplexMatrix::zeros(f, h);
            for x in 0..h {
                k[(0, x)] = comp[(x, c)].conj();
            }
            kraus.push(k);
        }
        let decoder = QuantumChannel::from_kraus(h, f, kraus)?;
        Self::new(encoder, decoder)
    }

    pub fn encoder(&self) -> &QuantumChannel {
        &self.encoder
    }

    pub fn decoder(&self) -> &QuantumChannel {
        &self.decoder
    }

    /// Code-space dimension `dim F`.
    pub fn f_dim(&self) -> usize {
        self.encoder.dim_in()
    }

    /// `F_e(π_F, R ∘ N ∘ P)` evaluated from Kraus products without building
    /// the composite channel.
    pub fn fidelity(&self, channel: &QuantumChannel) -> Result<f64> {
        if channel.dim_in() != self.encoder.dim_out() || channel.dim_out() != self.decoder.dim_in() {
            return Err(Error::Shape(format!(
                "code expects a {}→{} channel, got {}→{}",
                self.encoder.dim_out(),
                self.decoder.dim_in(),
                channel.dim_in(),
                channel.dim_out()
            )));
        }
        let f = self.f_dim();
        let mut total = 0.0;
        for p in self.encoder.kraus() {
            for n in channel.kraus() {
                let np = n.matmul(p);
                for r in self.decoder.kraus() {
                    let k = r.matmul(&np);
                    let mut tr = ZERO;
                    for i in 0..f {
                        tr += k[(i, i)];
                    }
                    total += tr.norm_sqr();
                }
            }
        }
        Ok((total / (f * f) as f64).clamp(0.0, 1.0))
    }
}

/// Finite-support random code `Σ_i w_i δ_{(P_i, R_i)}`.
#[derive(Clone, Debug)]
pub struct RandomCode {
    entries: Vec<(CodePair, f64)>,
}

impl RandomCode {
    pub fn new(entries: Vec<(CodePair, f64)>) -> Result<Self> {
        let w: Vec<f64> = entries.iter().map(|e| e.1).collect();
        check_distribution(&w, w.len())?;
        if let Some(first) = entries.first() {
            let dims = |c: &CodePair| (c.f_dim(), c.encoder.dim_out(), c.decoder.dim_in());
            if entries.iter().any(|e| dims(&e.0) != dims(&first.0)) {
                return Err(Error::Shape("random code entries differ in dimensions".into()));
            }
        }
        Ok(Self { entries })
    }

    pub fn point_mass(code: CodePair) -> Self {
        Self {
            entries: vec![(code, 1.0)],
        }
    }

    pub fn uniform(codes: Vec<CodePair>) -> Result<Self> {
        let w = 1.0 / codes.len() as f64;
        Self::new(codes.into_iter().map(|c| (c, w)).collect())
    }

    pub fn entries(&self) -> &[(CodePair, f64)] {
        &self.entries
    }

    /// `Σ_i w_i F_e(π_F, R_i ∘ N ∘ P_i)`.
    pub fn expected_fidelity(&self, channel: &QuantumChannel) -> Result<f64> {
        self.entries
            .iter()
            .map(|(c, w)| Ok(w * c.fidelity(channel)?))
            .sum()
    }
}

/// Message code: input states `ρ_i` on `H^{⊗l}` with decoding POVM `{D_i}`.
#[derive(Clone, Debug)]
pub struct ClassicalCode {
    states: Vec<DensityOperator>,
    decoder: Povm,
}

impl ClassicalCode {
    pub fn new(states: Vec<DensityOperator>, decoder: Povm) -> Result<Self> {
        if states.len() != decoder.len() {
            return Err(Error::Shape(format!(
                "{} codewords but {} decoding operators",
                states.len(),
                decoder.len()
            )));
        }
        if let Some(first) = states.first() {
            if states.iter().any(|s| s.dim() != first.dim()) {
                return Err(Error::Shape("codewords differ in dimension".into()));
            }
        }
        Ok(Self { states, decoder })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn decoder(&self) -> &Povm {
        &self.decoder
    }

    /// `tr(D_j N(ρ_i))` as a row-major `M×M` table indexed `[i][j]`.
    pub fn transition(&self, channel: &QuantumChannel) -> Result<Vec<Vec<f64>>> {
        if channel.dim_out() != self.decoder.dim() {
            return Err(Error::Shape(format!(
                "decoder acts on {}, channel outputs {}",
                self.decoder.dim(),
                channel.dim_out()
            )));
        }
        self.states
            .iter()
            .map(|r| Ok(self.decoder.probabilities(channel.apply(r)?.matrix())))
            .collect()
    }
}

/// Adversary sequence `s^l` over an index set of a given size.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSequence {
    symbols: Vec<usize>,
}

impl StateSequence {
    pub fn new(symbols: Vec<usize>, alphabet: usize) -> Result<Self> {
        if let Some(s) = symbols.iter().find(|&&s| s >= alphabet) {
            return Err(Error::Domain(format!("symbol {s} outside alphabet of size {alphabet}")));
        }
        Ok(Self { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    /// Letter counts, i.e. `l` times the type.
    pub fn counts(&self, alphabet: usize) -> Vec<usize> {
        let mut c = vec![0; alphabet];
        for &s in &self.symbols {
            c[s] += 1;
        }
        c
    }

    pub fn channel(&self, avqc: &Avqc) -> Result<QuantumChannel> {
        avqc.sequence_channel(&self.symbols)
    }
}
