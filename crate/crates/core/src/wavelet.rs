//! Level-1 Discrete Haar Wavelet Transform and the derived frequency map.
//!
//! The transform is orthonormal: each 2x2 block `[[a, b], [c, d]]` maps to
//!
//! ```text
//! ll = (a + b + c + d) / 2      lh = (a + b - c - d) / 2
//! hl = (a - b + c - d) / 2      hh = (a - b - c + d) / 2
//! ```
//!
//! so energy is conserved and the inverse is exact. Images with odd
//! dimensions are padded by edge replication before the transform; the
//! original size is recorded in the output and restored by the inverse.

use crate::error::{Error, Result};
use crate::tensor::Image;

/// The four half-resolution sub-bands of a level-1 transform.
#[derive(Debug, Clone, PartialEq)]
pub struct SubBands {
    /// Band dims: `ceil(src / 2)` per axis.
    pub height: usize,
    pub width: usize,
    pub ll: Vec<f64>,
    pub lh: Vec<f64>,
    pub hl: Vec<f64>,
    pub hh: Vec<f64>,
    /// Pre-padding source dimensions.
    pub src_height: usize,
    pub src_width: usize,
}

/// Half-resolution map of high-frequency response.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMap {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

/// How the three high-frequency bands are averaged into the frequency map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HighFreqConvention {
    /// Average of absolute values: a nonnegative edge-energy map. Default;
    /// a signed average cancels oriented edges.
    Magnitude,
    /// Plain signed average of the three bands.
    Signed,
}

impl FrequencyMap {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::dimension(format!(
                "frequency map data length {} does not match {height}x{width}",
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// Level-1 DHWT of an image. Multi-channel inputs are first converted to
/// grayscale with the standard luma weights.
pub fn dhwt(img: &Image) -> Result<SubBands> {
    if img.height == 0 || img.width == 0 {
        return Err(Error::dimension("cannot transform an empty image"));
    }
    let gray = img.to_gray();
    let (src_h, src_w) = (gray.height, gray.width);
    let (pad_h, pad_w) = (src_h + src_h % 2, src_w + src_w % 2);
    let bh = pad_h / 2;
    let bw = pad_w / 2;

    // Edge replication keeps the padded row/col equal to the last real one.
    let at = |r: usize, c: usize| gray.data[r.min(src_h - 1) * src_w + c.min(src_w - 1)];

    let mut bands = SubBands {
        height: bh,
        width: bw,
        ll: vec![0.0; bh * bw],
        lh: vec![0.0; bh * bw],
        hl: vec![0.0; bh * bw],
        hh: vec![0.0; bh * bw],
        src_height: src_h,
        src_width: src_w,
    };
    for r in 0..bh {
        for c in 0..bw {
            let a = at(2 * r, 2 * c);
            let b = at(2 * r, 2 * c + 1);
            let cc = at(2 * r + 1, 2 * c);
            let d = at(2 * r + 1, 2 * c + 1);
            let i = r * bw + c;
            bands.ll[i] = (a + b + cc + d) / 2.0;
            bands.lh[i] = (a + b - cc - d) / 2.0;
            bands.hl[i] = (a - b + cc - d) / 2.0;
            bands.hh[i] = (a - b - cc + d) / 2.0;
        }
    }
    Ok(bands)
}

/// Exact inverse of [`dhwt`]. The result is cropped to the recorded source
/// dimensions and clamped to `[0, 1]`; bands produced by `dhwt` on a valid
/// image reconstruct inside that range up to rounding.
pub fn idhwt(bands: &SubBands) -> Result<Image> {
    let n = bands.height * bands.width;
    if bands.ll.len() != n || bands.lh.len() != n || bands.hl.len() != n || bands.hh.len() != n {
        return Err(Error::dimension("sub-band sizes disagree"));
    }
    if bands.src_height > 2 * bands.height || bands.src_width > 2 * bands.width {
        return Err(Error::dimension("source dims exceed band capacity"));
    }
    let (pad_h, pad_w) = (2 * bands.height, 2 * bands.width);
    let mut padded = vec![0.0; pad_h * pad_w];
    for r in 0..bands.height {
        for c in 0..bands.width {
            let i = r * bands.width + c;
            let (ll, lh, hl, hh) = (bands.ll[i], bands.lh[i], bands.hl[i], bands.hh[i]);
            padded[(2 * r) * pad_w + 2 * c] = (ll + lh + hl + hh) / 2.0;
            padded[(2 * r) * pad_w + 2 * c + 1] = (ll + lh - hl - hh) / 2.0;
            padded[(2 * r + 1) * pad_w + 2 * c] = (ll - lh + hl - hh) / 2.0;
            padded[(2 * r + 1) * pad_w + 2 * c + 1] = (ll - lh - hl + hh) / 2.0;
        }
    }
    let mut data = Vec::with_capacity(bands.src_height * bands.src_width);
    for r in 0..bands.src_height {
        for c in 0..bands.src_width {
            data.push(padded[r * pad_w + c].clamp(0.0, 1.0));
        }
    }
    Image::new(bands.src_height, bands.src_width, 1, data)
}

/// Frequency map `M^h` with the default magnitude convention.
pub fn high_freq_map(bands: &SubBands) -> FrequencyMap {
    high_freq_map_with(bands, HighFreqConvention::Magnitude)
}

pub fn high_freq_map_with(bands: &SubBands, convention: HighFreqConvention) -> FrequencyMap {
    let data = bands
        .lh
        .iter()
        .zip(&bands.hl)
        .zip(&bands.hh)
        .map(|((&lh, &hl), &hh)| match convention {
            HighFreqConvention::Magnitude => (lh.abs() + hl.abs() + hh.abs()) / 3.0,
            HighFreqConvention::Signed => (lh + hl + hh) / 3.0,
        })
        .collect();
    FrequencyMap {
        height: bands.height,
        width: bands.width,
        data,
    }
}

/// Elementwise soft threshold `sign(x) * max(|x| - thresh, 0)`.
pub fn soft_threshold(map: &FrequencyMap, thresh: f64) -> Result<FrequencyMap> {
    if !(thresh >= 0.0) {
        return Err(Error::parameter(
            "thresh",
            format!("soft threshold must be nonnegative, got {thresh}"),
        ));
    }
    let data = map
        .data
        .iter()
        .map(|&x| x.signum() * (x.abs() - thresh).max(0.0))
        .collect();
    Ok(FrequencyMap {
        height: map.height,
        width: map.width,
        data,
    })
}
