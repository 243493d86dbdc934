//! Frequency-guided adapter mathematics at toy scale.
//!
//! A deterministic transformer block produces the attended/MLP token
//! matrices; selected frequency windows rasterize into a per-token prior;
//! the prior gates a copy of the tokens; and a dual-branch bottleneck
//! adapter injects both the gated and ungated features back residually:
//!
//! ```text
//! x_bar = MHSA(LN(x)) + x
//! x_hat = MLP(LN(x_bar))            (no MLP residual unless enabled)
//! x_f   = x_hat (.) prior
//! out   = Up_f(gelu(Down_f(x_f))) + Up_s(gelu(Down_s(x_hat))) + x_hat
//! ```

use crate::error::{Error, Result};
use crate::fps::SelectedWindows;
use crate::rng::SplitMix64;
use crate::tensor::FeatureGrid;

const LN_EPS: f64 = 1e-5;

/// Token matrix, `n_tokens x dim`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenMatrix {
    pub n_tokens: usize,
    pub dim: usize,
    pub data: Vec<f64>,
}

impl TokenMatrix {
    pub fn new(n_tokens: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_tokens * dim {
            return Err(Error::dimension(format!(
                "token data length {} does not match {n_tokens}x{dim}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("token matrix contains non-finite value".into()));
        }
        Ok(Self {
            n_tokens,
            dim,
            data,
        })
    }

    pub fn zeros(n_tokens: usize, dim: usize) -> Self {
        Self {
            n_tokens,
            dim,
            data: vec![0.0; n_tokens * dim],
        }
    }

    pub fn seeded(n_tokens: usize, dim: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        Self {
            n_tokens,
            dim,
            data: (0..n_tokens * dim).map(|_| rng.next_uniform(-1.0, 1.0)).collect(),
        }
    }

    pub fn get(&self, token: usize, d: usize) -> f64 {
        self.data[token * self.dim + d]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Token-matrix view as a 1-channel feature grid for tensor IO.
    pub fn to_feature_grid(&self) -> FeatureGrid {
        FeatureGrid {
            height: self.n_tokens,
            width: self.dim,
            channels: 1,
            data: self.data.clone(),
        }
    }
}

/// GELU with the tanh approximation.
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + ((2.0 / std::f64::consts::PI).sqrt() * (x + 0.044715 * x * x * x)).tanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Gelu,
    /// Test hook: replaces the nonlinearity so linearity properties of the
    /// surrounding maps can be asserted exactly.
    Identity,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Self::Gelu => gelu(x),
            Self::Identity => x,
        }
    }
}

/// Transformer-block parameters: two layer norms, multi-head attention
/// projections (no biases), and a two-layer MLP with biases.
#[derive(Debug, Clone)]
pub struct BlockWeights {
    pub dim: usize,
    pub heads: usize,
    pub mlp_hidden: usize,
    pub ln1_gamma: Vec<f64>,
    pub ln1_beta: Vec<f64>,
    pub ln2_gamma: Vec<f64>,
    pub ln2_beta: Vec<f64>,
    /// All `dim x dim`, row-major, applied as `x . W`.
    pub w_q: Vec<f64>,
    pub w_k: Vec<f64>,
    pub w_v: Vec<f64>,
    pub w_o: Vec<f64>,
    pub w_mlp1: Vec<f64>,
    pub b_mlp1: Vec<f64>,
    pub w_mlp2: Vec<f64>,
    pub b_mlp2: Vec<f64>,
    /// Adds the conventional residual around the MLP; off by default to
    /// match the block equations as given.
    pub mlp_residual: bool,
}

impl BlockWeights {
    pub fn zeros(dim: usize, heads: usize) -> Result<Self> {
        if heads == 0 || dim % heads != 0 {
            return Err(Error::dimension(format!(
                "head count {heads} must divide dim {dim}"
            )));
        }
        let hidden = 4 * dim;
        Ok(Self {
            dim,
            heads,
            mlp_hidden: hidden,
            ln1_gamma: vec![1.0; dim],
            ln1_beta: vec![0.0; dim],
            ln2_gamma: vec![1.0; dim],
            ln2_beta: vec![0.0; dim],
            w_q: vec![0.0; dim * dim],
            w_k: vec![0.0; dim * dim],
            w_v: vec![0.0; dim * dim],
            w_o: vec![0.0; dim * dim],
            w_mlp1: vec![0.0; dim * hidden],
            b_mlp1: vec![0.0; hidden],
            w_mlp2: vec![0.0; hidden * dim],
            b_mlp2: vec![0.0; dim],
            mlp_residual: false,
        })
    }

    /// Demo/test initialization: uniform weights in [-0.02, 0.02], zero
    /// biases, unit layer-norm gains.
    pub fn seeded(dim: usize, heads: usize, seed: u64) -> Result<Self> {
        let mut w = Self::zeros(dim, heads)?;
        let mut rng = SplitMix64::derive(seed, 0x11);
        for mat in [&mut w.w_q, &mut w.w_k, &mut w.w_v, &mut w.w_o, &mut w.w_mlp1, &mut w.w_mlp2]
        {
            for v in mat.iter_mut() {
                *v = rng.next_uniform(-0.02, 0.02);
            }
        }
        Ok(w)
    }
}

fn layer_norm_rows(x: &TokenMatrix, gamma: &[f64], beta: &[f64]) -> TokenMatrix {
    let mut out = TokenMatrix::zeros(x.n_tokens, x.dim);
    for t in 0..x.n_tokens {
        let row = &x.data[t * x.dim..(t + 1) * x.dim];
        let mean = row.iter().sum::<f64>() / x.dim as f64;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / x.dim as f64;
        let inv = 1.0 / (var + LN_EPS).sqrt();
        for d in 0..x.dim {
            out.data[t * x.dim + d] = gamma[d] * (row[d] - mean) * inv + beta[d];
        }
    }
    out
}

/// `x . w` for row-major `w: in_dim x out_dim`, plus an optional bias.
fn matmul(x: &TokenMatrix, w: &[f64], out_dim: usize, bias: Option<&[f64]>) -> TokenMatrix {
    let mut out = TokenMatrix::zeros(x.n_tokens, out_dim);
    for t in 0..x.n_tokens {
        for j in 0..out_dim {
            let mut acc = bias.map_or(0.0, |b| b[j]);
            for i in 0..x.dim {
                acc += x.data[t * x.dim + i] * w[i * out_dim + j];
            }
            out.data[t * out_dim + j] = acc;
        }
    }
    out
}

fn multi_head_attention(y: &TokenMatrix, w: &BlockWeights) -> TokenMatrix {
    let (n, d, heads) = (y.n_tokens, y.dim, w.heads);
    let dh = d / heads;
    let q = matmul(y, &w.w_q, d, None);
    let k = matmul(y, &w.w_k, d, None);
    let v = matmul(y, &w.w_v, d, None);
    let scale = 1.0 / (dh as f64).sqrt();
    let mut concat = TokenMatrix::zeros(n, d);
    let mut scores = vec![0.0; n];
    for h in 0..heads {
        let off = h * dh;
        for i in 0..n {
            for (j, slot) in scores.iter_mut().enumerate() {
                let mut dot = 0.0;
                for e in 0..dh {
                    dot += q.data[i * d + off + e] * k.data[j * d + off + e];
                }
                *slot = dot * scale;
            }
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut denom = 0.0;
            for s in scores.iter_mut() {
                *s = (*s - max).exp();
                denom += *s;
            }
            for e in 0..dh {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += scores[j] * v.data[j * d + off + e];
                }
                concat.data[i * d + off + e] = acc / denom;
            }
        }
    }
    matmul(&concat, &w.w_o, d, None)
}

/// One block: returns `(x_bar, x_hat)` per the equations in the module docs.
pub fn transformer_block_forward(
    x: &TokenMatrix,
    w: &BlockWeights,
) -> Result<(TokenMatrix, TokenMatrix)> {
    if x.dim != w.dim {
        return Err(Error::dimension(format!(
            "token dim {} vs block dim {}",
            x.dim, w.dim
        )));
    }
    let y = layer_norm_rows(x, &w.ln1_gamma, &w.ln1_beta);
    let attn = multi_head_attention(&y, w);
    let mut x_bar = x.clone();
    for (o, a) in x_bar.data.iter_mut().zip(&attn.data) {
        *o += a;
    }
    let z = layer_norm_rows(&x_bar, &w.ln2_gamma, &w.ln2_beta);
    let mut hidden = matmul(&z, &w.w_mlp1, w.mlp_hidden, Some(&w.b_mlp1));
    for v in hidden.data.iter_mut() {
        *v = gelu(*v);
    }
    let mut x_hat = matmul(&hidden, &w.w_mlp2, w.dim, Some(&w.b_mlp2));
    if w.mlp_residual {
        for (o, b) in x_hat.data.iter_mut().zip(&x_bar.data) {
            *o += b;
        }
    }
    Ok((x_bar, x_hat))
}

/// Rasterizes selected windows (already in image space) into a binary image
/// mask, max-pools by `patch`, and flattens row-major into one bit per
/// token. A token is set iff its patch overlaps any window.
pub fn prior_mask_from_windows(
    windows: &SelectedWindows,
    image_h: usize,
    image_w: usize,
    patch: usize,
) -> Result<Vec<u8>> {
    if patch == 0 || image_h % patch != 0 || image_w % patch != 0 {
        return Err(Error::dimension(format!(
            "patch {patch} does not divide image {image_h}x{image_w}"
        )));
    }
    let mut mask = vec![0u8; image_h * image_w];
    for win in &windows.entries {
        if win.row + win.size > image_h || win.col + win.size > image_w {
            return Err(Error::coordinate(format!(
                "window at ({}, {}) size {} leaves the {image_h}x{image_w} image",
                win.row, win.col, win.size
            )));
        }
        for r in win.row..win.row + win.size {
            for c in win.col..win.col + win.size {
                mask[r * image_w + c] = 1;
            }
        }
    }
    let (th, tw) = (image_h / patch, image_w / patch);
    let mut bits = vec![0u8; th * tw];
    for tr in 0..th {
        for tc in 0..tw {
            let mut bit = 0u8;
            'scan: for r in tr * patch..(tr + 1) * patch {
                for c in tc * patch..(tc + 1) * patch {
                    if mask[r * image_w + c] == 1 {
                        bit = 1;
                        break 'scan;
                    }
                }
            }
            bits[tr * tw + tc] = bit;
        }
    }
    Ok(bits)
}

/// Zeroes the rows of tokens whose prior bit is 0.
pub fn frequency_gate(x_hat: &TokenMatrix, prior: &[u8]) -> Result<TokenMatrix> {
    if prior.len() != x_hat.n_tokens {
        return Err(Error::dimension(format!(
            "prior length {} does not match {} tokens",
            prior.len(),
            x_hat.n_tokens
        )));
    }
    let mut out = x_hat.clone();
    for (t, &bit) in prior.iter().enumerate() {
        if bit == 0 {
            for d in 0..x_hat.dim {
                out.data[t * x_hat.dim + d] = 0.0;
            }
        }
    }
    Ok(out)
}

/// Dual-branch bottleneck adapter weights. `bottleneck` is the reduced
/// width; the default reduction ratio of 4 gives `dim / 4`.
#[derive(Debug, Clone)]
pub struct AdapterWeights {
    pub dim: usize,
    pub bottleneck: usize,
    pub w_down_s: Vec<f64>,
    pub w_up_s: Vec<f64>,
    pub w_down_f: Vec<f64>,
    pub w_up_f: Vec<f64>,
}

/// The reduction ratio applied to the embedding width.
pub const ADAPTER_REDUCTION_RATIO: usize = 4;

impl AdapterWeights {
    pub fn default_bottleneck(dim: usize) -> usize {
        (dim / ADAPTER_REDUCTION_RATIO).max(1)
    }

    pub fn zeros(dim: usize, bottleneck: usize) -> Self {
        Self {
            dim,
            bottleneck,
            w_down_s: vec![0.0; dim * bottleneck],
            w_up_s: vec![0.0; bottleneck * dim],
            w_down_f: vec![0.0; dim * bottleneck],
            w_up_f: vec![0.0; bottleneck * dim],
        }
    }

    pub fn seeded(dim: usize, bottleneck: usize, seed: u64) -> Self {
        let mut w = Self::zeros(dim, bottleneck);
        let mut rng = SplitMix64::derive(seed, 0x22);
        for mat in [&mut w.w_down_s, &mut w.w_up_s, &mut w.w_down_f, &mut w.w_up_f] {
            for v in mat.iter_mut() {
                *v = rng.next_uniform(-0.02, 0.02);
            }
        }
        w
    }
}

/// Adapter injection with GELU.
pub fn adapter_inject(
    x_hat: &TokenMatrix,
    x_hat_f: &TokenMatrix,
    w: &AdapterWeights,
) -> Result<TokenMatrix> {
    adapter_inject_with(x_hat, x_hat_f, w, Activation::Gelu)
}

pub fn adapter_inject_with(
    x_hat: &TokenMatrix,
    x_hat_f: &TokenMatrix,
    w: &AdapterWeights,
    act: Activation,
) -> Result<TokenMatrix> {
    if x_hat.dim != w.dim || x_hat_f.dim != w.dim || x_hat.n_tokens != x_hat_f.n_tokens {
        return Err(Error::dimension(format!(
            "adapter shapes disagree: x_hat {}x{}, x_hat_f {}x{}, dim {}",
            x_hat.n_tokens, x_hat.dim, x_hat_f.n_tokens, x_hat_f.dim, w.dim
        )));
    }
    let branch = |x: &TokenMatrix, down: &[f64], up: &[f64]| -> TokenMatrix {
        let mut mid = matmul(x, down, w.bottleneck, None);
        for v in mid.data.iter_mut() {
            *v = act.apply(*v);
        }
        matmul(&mid, up, w.dim, None)
    };
    let freq = branch(x_hat_f, &w.w_down_f, &w.w_up_f);
    let spatial = branch(x_hat, &w.w_down_s, &w.w_up_s);
    let mut out = x_hat.clone();
    for i in 0..out.data.len() {
        out.data[i] += freq.data[i] + spatial.data[i];
    }
    Ok(out)
}
