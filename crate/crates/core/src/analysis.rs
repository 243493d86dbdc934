//! Prompt-error analysis against ground truth.
//!
//! A positive point is wrong when the ground truth is background at its
//! coordinate; a negative point is wrong when it is foreground. A window
//! fails when the IoU of the binarized coarse mask against the ground
//! truth, restricted to the window, falls below 0.5. All inputs must share
//! image-space coordinates (scale frequency-map windows first).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fps::{Polarity, PromptSet, SelectedWindows};
use crate::tensor::BinaryMask;

/// Threshold on per-window IoU below which a window counts as failing.
pub const WINDOW_FAILURE_IOU: f64 = 0.5;

/// Raw per-image tallies, poolable across a corpus.
#[derive(Debug, Clone, Copy, Default)]
pub struct ErrorCounts {
    pub failing_windows: usize,
    pub total_windows: usize,
    pub point_errors: usize,
    pub total_points: usize,
    pub positive_errors: usize,
    pub total_positives: usize,
    pub negative_errors: usize,
    pub total_negatives: usize,
}

impl ErrorCounts {
    pub fn any_failure(&self) -> bool {
        self.failing_windows > 0 || self.point_errors > 0
    }
}

/// Pooled error rates; every field lies in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub grid_error_rate: f64,
    pub point_error_rate: f64,
    pub positive_fp_rate: f64,
    pub negative_fn_rate: f64,
    pub images_with_any_failure: f64,
}

fn rate(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Tallies one image. `windows` must already be in image space.
pub fn prompt_error_counts(
    prompts: &PromptSet,
    windows: &SelectedWindows,
    coarse_bin: &BinaryMask,
    gt: &BinaryMask,
) -> Result<ErrorCounts> {
    if coarse_bin.height != gt.height || coarse_bin.width != gt.width {
        return Err(Error::dimension(format!(
            "coarse {}x{} vs gt {}x{}",
            coarse_bin.height, coarse_bin.width, gt.height, gt.width
        )));
    }
    let mut counts = ErrorCounts::default();
    for win in &windows.entries {
        if win.row >= gt.height || win.col >= gt.width {
            return Err(Error::coordinate(format!(
                "window at ({}, {}) outside the {}x{} image",
                win.row, win.col, gt.height, gt.width
            )));
        }
        counts.total_windows += 1;
        let r1 = (win.row + win.size).min(gt.height);
        let c1 = (win.col + win.size).min(gt.width);
        let mut inter = 0usize;
        let mut union = 0usize;
        for r in win.row..r1 {
            for c in win.col..c1 {
                let cb = coarse_bin.get(r, c) == 1;
                let g = gt.get(r, c) == 1;
                inter += usize::from(cb && g);
                union += usize::from(cb || g);
            }
        }
        let iou = if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        };
        if iou < WINDOW_FAILURE_IOU {
            counts.failing_windows += 1;
        }
    }
    for p in &prompts.points {
        if p.row >= gt.height || p.col >= gt.width {
            return Err(Error::coordinate(format!(
                "point ({}, {}) outside the {}x{} image",
                p.row, p.col, gt.height, gt.width
            )));
        }
        counts.total_points += 1;
        let fg = gt.get(p.row, p.col) == 1;
        match p.polarity {
            Polarity::Positive => {
                counts.total_positives += 1;
                if !fg {
                    counts.point_errors += 1;
                    counts.positive_errors += 1;
                }
            }
            Polarity::Negative => {
                counts.total_negatives += 1;
                if fg {
                    counts.point_errors += 1;
                    counts.negative_errors += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Pools per-image tallies into corpus-level rates.
pub fn aggregate_error_counts(counts: &[ErrorCounts]) -> ErrorReport {
    let mut total = ErrorCounts::default();
    let mut failing_images = 0usize;
    for c in counts {
        total.failing_windows += c.failing_windows;
        total.total_windows += c.total_windows;
        total.point_errors += c.point_errors;
        total.total_points += c.total_points;
        total.positive_errors += c.positive_errors;
        total.total_positives += c.total_positives;
        total.negative_errors += c.negative_errors;
        total.total_negatives += c.total_negatives;
        failing_images += usize::from(c.any_failure());
    }
    ErrorReport {
        grid_error_rate: rate(total.failing_windows, total.total_windows),
        point_error_rate: rate(total.point_errors, total.total_points),
        positive_fp_rate: rate(total.positive_errors, total.total_positives),
        negative_fn_rate: rate(total.negative_errors, total.total_negatives),
        images_with_any_failure: rate(failing_images, counts.len()),
    }
}

/// Single-image report.
pub fn prompt_error_analysis(
    prompts: &PromptSet,
    windows: &SelectedWindows,
    coarse_bin: &BinaryMask,
    gt: &BinaryMask,
) -> Result<ErrorReport> {
    let counts = prompt_error_counts(prompts, windows, coarse_bin, gt)?;
    Ok(aggregate_error_counts(&[counts]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::{PromptPoint, WindowEntry};

    fn point(row: usize, col: usize, polarity: Polarity) -> PromptPoint {
        PromptPoint {
            row,
            col,
            polarity,
            window: 0,
        }
    }

    #[test]
    fn consistent_prompts_report_zero() {
        let gt = BinaryMask::new(4, 4, {
            let mut d = vec![0; 16];
            d[5] = 1;
            d[6] = 1;
            d
        })
        .unwrap();
        let coarse = gt.clone();
        let windows = SelectedWindows {
            entries: vec![WindowEntry {
                row: 0,
                col: 0,
                size: 4,
                score: 1.0,
            }],
            fallback_mask_only: false,
        };
        let prompts = PromptSet {
            points: vec![
                point(1, 1, Polarity::Positive),
                point(0, 0, Polarity::Negative),
            ],
            scale: 2,
        };
        let report = prompt_error_analysis(&prompts, &windows, &coarse, &gt).unwrap();
        assert_eq!(report.grid_error_rate, 0.0);
        assert_eq!(report.point_error_rate, 0.0);
        assert_eq!(report.positive_fp_rate, 0.0);
        assert_eq!(report.negative_fn_rate, 0.0);
        assert_eq!(report.images_with_any_failure, 0.0);
    }

    #[test]
    fn single_bad_positive_among_ten() {
        let gt = BinaryMask::new(8, 8, vec![0; 64]).unwrap();
        let coarse = gt.clone();
        let windows = SelectedWindows {
            entries: vec![],
            fallback_mask_only: false,
        };
        let mut points: Vec<PromptPoint> =
            (0..9).map(|i| point(i / 8, i % 8, Polarity::Negative)).collect();
        points.push(point(7, 7, Polarity::Positive));
        let prompts = PromptSet { points, scale: 2 };
        let report = prompt_error_analysis(&prompts, &windows, &coarse, &gt).unwrap();
        assert!((report.point_error_rate - 0.1).abs() < 1e-12);
        assert_eq!(report.positive_fp_rate, 1.0);
        assert_eq!(report.negative_fn_rate, 0.0);
        assert_eq!(report.images_with_any_failure, 1.0);
    }

    #[test]
    fn window_failure_uses_restricted_iou() {
        // gt: left half foreground. Coarse agrees on the left window but
        // claims all background on the right one.
        let mut gt_data = vec![0u8; 64];
        for r in 0..8 {
            for c in 0..4 {
                gt_data[r * 8 + c] = 1;
            }
        }
        let gt = BinaryMask::new(8, 8, gt_data).unwrap();
        let mut coarse_data = vec![0u8; 64];
        for r in 0..8 {
            for c in 0..4 {
                coarse_data[r * 8 + c] = 1;
            }
        }
        // Corrupt the right half: coarse claims foreground where gt has none.
        for r in 0..8 {
            for c in 4..8 {
                coarse_data[r * 8 + c] = 1;
            }
        }
        let coarse = BinaryMask::new(8, 8, coarse_data).unwrap();
        let windows = SelectedWindows {
            entries: vec![
                WindowEntry {
                    row: 0,
                    col: 0,
                    size: 4,
                    score: 1.0,
                },
                WindowEntry {
                    row: 0,
                    col: 4,
                    size: 4,
                    score: 0.5,
                },
            ],
            fallback_mask_only: false,
        };
        let prompts = PromptSet {
            points: vec![],
            scale: 2,
        };
        let report = prompt_error_analysis(&prompts, &windows, &coarse, &gt).unwrap();
        assert!((report.grid_error_rate - 0.5).abs() < 1e-12);
        assert_eq!(report.images_with_any_failure, 1.0);
    }

    #[test]
    fn aggregation_pools_counts() {
        let a = ErrorCounts {
            point_errors: 1,
            total_points: 10,
            ..Default::default()
        };
        let b = ErrorCounts {
            point_errors: 0,
            total_points: 10,
            ..Default::default()
        };
        let report = aggregate_error_counts(&[a, b]);
        assert!((report.point_error_rate - 0.05).abs() < 1e-12);
        assert!((report.images_with_any_failure - 0.5).abs() < 1e-12);
    }

    #[test]
    fn out_of_bounds_point_rejected() {
        let gt = BinaryMask::new(4, 4, vec![0; 16]).unwrap();
        let prompts = PromptSet {
            points: vec![point(4, 0, Polarity::Positive)],
            scale: 2,
        };
        let windows = SelectedWindows {
            entries: vec![],
            fallback_mask_only: false,
        };
        assert!(matches!(
            prompt_error_analysis(&prompts, &windows, &gt, &gt),
            Err(Error::Coordinate(_))
        ));
    }
}
