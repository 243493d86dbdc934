//! Dense value types for images, masks, and feature grids.
//!
//! All grids are row-major; multi-channel data is channel-interleaved, so the
//! element at `(row, col, ch)` lives at `(row * width + col) * channels + ch`.
//! Types are immutable values after construction and every operation here is
//! a pure function, so concurrent use over disjoint inputs is safe.

use crate::error::{Error, Result};

/// Dense image with values in `[0, 1]`, one or three channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

/// Probability map in `[0, 1]`, one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMask {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

/// Mask with values in `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    pub height: usize,
    pub width: usize,
    pub data: Vec<u8>,
}

/// Feature map with `height x width` cells of `channels` finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGrid {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

/// Block pooling reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolMode {
    Mean,
    Max,
}

impl Image {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::dimension(format!(
                "image channels must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(Error::dimension(format!(
                "image data length {} does not match {height}x{width}x{channels}",
                data.len()
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::Numeric(format!(
                    "image value {v} at index {i} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn get(&self, row: usize, col: usize, ch: usize) -> f64 {
        self.data[(row * self.width + col) * self.channels + ch]
    }

    /// Grayscale view: identity for single-channel images, luma weights
    /// 0.299 / 0.587 / 0.114 for RGB.
    pub fn to_gray(&self) -> Image {
        if self.channels == 1 {
            return self.clone();
        }
        let mut data = Vec::with_capacity(self.height * self.width);
        for px in self.data.chunks_exact(3) {
            data.push((0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]).clamp(0.0, 1.0));
        }
        Image {
            height: self.height,
            width: self.width,
            channels: 1,
            data,
        }
    }

    pub fn block_pool(&self, factor: usize, mode: PoolMode) -> Result<Image> {
        let data = block_pool_raw(
            self.height,
            self.width,
            self.channels,
            &self.data,
            factor,
            mode,
        )?;
        Ok(Image {
            height: self.height / factor,
            width: self.width / factor,
            channels: self.channels,
            data,
        })
    }

    pub fn resize_bilinear(&self, out_h: usize, out_w: usize) -> Result<Image> {
        let data = resize_bilinear_raw(
            self.height,
            self.width,
            self.channels,
            &self.data,
            out_h,
            out_w,
        )?;
        Ok(Image {
            height: out_h,
            width: out_w,
            channels: self.channels,
            data,
        })
    }
}

impl ProbMask {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::dimension(format!(
                "mask data length {} does not match {height}x{width}",
                data.len()
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::Numeric(format!(
                    "mask value {v} at index {i} outside [0, 1]"
                )));
            }
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

    pub fn block_pool(&self, factor: usize, mode: PoolMode) -> Result<ProbMask> {
        let data = block_pool_raw(self.height, self.width, 1, &self.data, factor, mode)?;
        Ok(ProbMask {
            height: self.height / factor,
            width: self.width / factor,
            data,
        })
    }

    pub fn resize_bilinear(&self, out_h: usize, out_w: usize) -> Result<ProbMask> {
        let data = resize_bilinear_raw(self.height, self.width, 1, &self.data, out_h, out_w)?;
        Ok(ProbMask {
            height: out_h,
            width: out_w,
            data,
        })
    }

    /// Single-channel image with the same payload.
    pub fn to_image(&self) -> Image {
        Image {
            height: self.height,
            width: self.width,
            channels: 1,
            data: self.data.clone(),
        }
    }
}

impl BinaryMask {
    pub fn new(height: usize, width: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::dimension(format!(
                "mask data length {} does not match {height}x{width}",
                data.len()
            )));
        }
        if let Some(&v) = data.iter().find(|&&v| v > 1) {
            return Err(Error::Numeric(format!("binary mask value {v} not in {{0, 1}}")));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }
}

impl FeatureGrid {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width * channels {
            return Err(Error::dimension(format!(
                "feature data length {} does not match {height}x{width}x{channels}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("feature grid contains non-finite value".into()));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Self {
            height,
            width,
            channels,
            data: vec![0.0; height * width * channels],
        }
    }

    pub fn get(&self, row: usize, col: usize, ch: usize) -> f64 {
        self.data[(row * self.width + col) * self.channels + ch]
    }

    pub fn set(&mut self, row: usize, col: usize, ch: usize, v: f64) {
        self.data[(row * self.width + col) * self.channels + ch] = v;
    }
}

fn block_pool_raw(
    height: usize,
    width: usize,
    channels: usize,
    data: &[f64],
    factor: usize,
    mode: PoolMode,
) -> Result<Vec<f64>> {
    if factor == 0 {
        return Err(Error::parameter("factor", "pooling factor must be positive"));
    }
    if height % factor != 0 || width % factor != 0 {
        return Err(Error::dimension(format!(
            "pool factor {factor} does not divide {height}x{width}"
        )));
    }
    let (oh, ow) = (height / factor, width / factor);
    let mut out = vec![0.0; oh * ow * channels];
    let norm = 1.0 / (factor * factor) as f64;
    for r in 0..oh {
        for c in 0..ow {
            for ch in 0..channels {
                let mut acc = match mode {
                    PoolMode::Mean => 0.0,
                    PoolMode::Max => f64::NEG_INFINITY,
                };
                for dr in 0..factor {
                    for dc in 0..factor {
                        let v = data[((r * factor + dr) * width + c * factor + dc) * channels + ch];
                        match mode {
                            PoolMode::Mean => acc += v,
                            PoolMode::Max => acc = acc.max(v),
                        }
                    }
                }
                out[(r * ow + c) * channels + ch] = match mode {
                    PoolMode::Mean => acc * norm,
                    PoolMode::Max => acc,
                };
            }
        }
    }
    Ok(out)
}

/// Bilinear resampling with half-pixel center alignment; source coordinates
/// are clamped at the borders. Resizing to the input size is the identity.
fn resize_bilinear_raw(
    height: usize,
    width: usize,
    channels: usize,
    data: &[f64],
    out_h: usize,
    out_w: usize,
) -> Result<Vec<f64>> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::dimension("resize target must be at least 1x1"));
    }
    if out_h == height && out_w == width {
        return Ok(data.to_vec());
    }
    let scale_r = height as f64 / out_h as f64;
    let scale_c = width as f64 / out_w as f64;
    let mut out = vec![0.0; out_h * out_w * channels];
    for r in 0..out_h {
        let src_r = ((r as f64 + 0.5) * scale_r - 0.5).clamp(0.0, (height - 1) as f64);
        let r0 = src_r.floor() as usize;
        let r1 = (r0 + 1).min(height - 1);
        let fr = src_r - r0 as f64;
        for c in 0..out_w {
            let src_c = ((c as f64 + 0.5) * scale_c - 0.5).clamp(0.0, (width - 1) as f64);
            let c0 = src_c.floor() as usize;
            let c1 = (c0 + 1).min(width - 1);
            let fc = src_c - c0 as f64;
            for ch in 0..channels {
                let at = |rr: usize, cc: usize| data[(rr * width + cc) * channels + ch];
                let top = at(r0, c0) * (1.0 - fc) + at(r0, c1) * fc;
                let bot = at(r1, c0) * (1.0 - fc) + at(r1, c1) * fc;
                out[(r * out_w + c) * channels + ch] = top * (1.0 - fr) + bot * fr;
            }
        }
    }
    Ok(out)
}
