//! Boundary-weighted training losses.
//!
//! Both losses share a weight map `w = 1 + 5 * |avgpool31(gt) - gt|`, where
//! the pooling is a 31x31 sliding mean with stride 1 and zero padding
//! (border windows divide by the full 961 regardless of clipping). The map
//! is 1 away from mask boundaries and rises toward them.

use crate::error::{Error, Result};
use crate::tensor::{BinaryMask, ProbMask};

const POOL_RADIUS: usize = 15;
const POOL_AREA: f64 = (2 * POOL_RADIUS + 1) as f64 * (2 * POOL_RADIUS + 1) as f64;
const CLAMP_EPS: f64 = 1e-7;

/// Per-pixel loss weights, `>= 1` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

/// Boundary weight map for a ground-truth mask.
pub fn weight_map(gt: &BinaryMask) -> WeightMap {
    let (h, w) = (gt.height, gt.width);
    // Summed-area table over the zero-padded mask.
    let mut sat = vec![0.0f64; (h + 1) * (w + 1)];
    for r in 0..h {
        for c in 0..w {
            sat[(r + 1) * (w + 1) + c + 1] = f64::from(gt.data[r * w + c])
                + sat[r * (w + 1) + c + 1]
                + sat[(r + 1) * (w + 1) + c]
                - sat[r * (w + 1) + c];
        }
    }
    let window_sum = |r0: isize, c0: isize, r1: isize, c1: isize| {
        // Clip to the image; zero padding contributes nothing.
        let r0 = r0.max(0) as usize;
        let c0 = c0.max(0) as usize;
        let r1 = (r1.min(h as isize - 1)) as usize;
        let c1 = (c1.min(w as isize - 1)) as usize;
        sat[(r1 + 1) * (w + 1) + c1 + 1] - sat[r0 * (w + 1) + c1 + 1]
            - sat[(r1 + 1) * (w + 1) + c0]
            + sat[r0 * (w + 1) + c0]
    };
    let rad = POOL_RADIUS as isize;
    let mut data = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let sum = window_sum(
                r as isize - rad,
                c as isize - rad,
                r as isize + rad,
                c as isize + rad,
            );
            let pooled = sum / POOL_AREA;
            data[r * w + c] = 1.0 + 5.0 * (pooled - f64::from(gt.data[r * w + c])).abs();
        }
    }
    WeightMap {
        height: h,
        width: w,
        data,
    }
}

fn check_dims(pred: &ProbMask, gt: &BinaryMask, w: &WeightMap) -> Result<()> {
    if pred.height != gt.height
        || pred.width != gt.width
        || w.height != gt.height
        || w.width != gt.width
    {
        return Err(Error::dimension(format!(
            "loss inputs disagree: pred {}x{}, gt {}x{}, w {}x{}",
            pred.height, pred.width, gt.height, gt.width, w.height, w.width
        )));
    }
    Ok(())
}

/// Weighted binary cross-entropy, normalized by the total weight so the
/// value is resolution-independent. Predictions are clamped away from
/// {0, 1} before the logs.
pub fn wbce(pred: &ProbMask, gt: &BinaryMask, w: &WeightMap) -> Result<f64> {
    check_dims(pred, gt, w)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..pred.data.len() {
        let p = pred.data[i].clamp(CLAMP_EPS, 1.0 - CLAMP_EPS);
        let g = f64::from(gt.data[i]);
        num += w.data[i] * (-g * p.ln() - (1.0 - g) * (1.0 - p).ln());
        den += w.data[i];
    }
    Ok(num / den)
}

/// Weighted IoU loss with +1 smoothing on both sides of the ratio.
pub fn wiou(pred: &ProbMask, gt: &BinaryMask, w: &WeightMap) -> Result<f64> {
    check_dims(pred, gt, w)?;
    let mut inter = 0.0;
    let mut total = 0.0;
    for i in 0..pred.data.len() {
        let p = pred.data[i];
        let g = f64::from(gt.data[i]);
        inter += w.data[i] * p * g;
        total += w.data[i] * (p + g);
    }
    Ok(1.0 - (inter + 1.0) / (total - inter + 1.0))
}

/// Combined loss `wbce + lambda * wiou` over a single shared weight map.
pub fn total_loss(pred: &ProbMask, gt: &BinaryMask, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::parameter(
            "lambda",
            format!("loss weight must be nonnegative, got {lambda}"),
        ));
    }
    let w = weight_map(gt);
    Ok(wbce(pred, gt, &w)? + lambda * wiou(pred, gt, &w)?)
}
