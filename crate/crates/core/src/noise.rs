//! Seeded synthetic noise for robustness stress tests.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::tensor::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// Additive: `x + n`.
    Gaussian,
    /// Multiplicative: `x + x * n`.
    Speckle,
}

impl NoiseKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "speckle" => Ok(Self::Speckle),
            other => Err(Error::parameter(
                "noise",
                format!("unknown noise kind {other:?}, expected gaussian or speckle"),
            )),
        }
    }
}

/// Adds noise with `n ~ N(0, sigma^2)` drawn per element from a seeded
/// stream, clamping the result to `[0, 1]`. `sigma = 0` is the identity.
pub fn add_noise(img: &Image, kind: NoiseKind, sigma: f64, seed: u64) -> Result<Image> {
    if !(sigma >= 0.0) {
        return Err(Error::parameter(
            "sigma",
            format!("noise strength must be nonnegative, got {sigma}"),
        ));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let mut rng = SplitMix64::new(seed);
    let data = img
        .data
        .iter()
        .map(|&x| {
            let n = sigma * rng.next_gaussian();
            let y = match kind {
                NoiseKind::Gaussian => x + n,
                NoiseKind::Speckle => x + x * n,
            };
            y.clamp(0.0, 1.0)
        })
        .collect();
    Ok(Image {
        height: img.height,
        width: img.width,
        channels: img.channels,
        data,
    })
}
