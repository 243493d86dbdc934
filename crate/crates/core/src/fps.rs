//! Frequency-aware point selection.
//!
//! Windows are scored on the half-resolution frequency map, the top-k are
//! kept (optionally filtered by coarse-mask confidence), and each surviving
//! window contributes its `t` highest and `t` lowest cells as candidate
//! points. Candidates become positive or negative prompts according to the
//! binarized coarse mask. Everything here is deterministic; all ties break
//! by row-major coordinate order.
//!
//! Coordinates: window rows/cols and sizes live in frequency-map space;
//! emitted prompt points are scaled into image space (factor 2, since the
//! map is half resolution).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{BinaryMask, ProbMask};
use crate::wavelet::FrequencyMap;

/// Scale between the frequency map and image space.
pub const FREQ_TO_IMAGE_SCALE: usize = 2;

/// Per-window mean scores over a sliding grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowGrid {
    pub window_size: usize,
    pub stride: usize,
    pub rows: usize,
    pub cols: usize,
    /// Row-major; `scores[r * cols + c]` belongs to the window whose
    /// top-left corner is `(r * stride, c * stride)`.
    pub scores: Vec<f64>,
}

/// One selected window in frequency-map coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowEntry {
    pub row: usize,
    pub col: usize,
    pub size: usize,
    pub score: f64,
}

/// Top-k windows in descending score order.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedWindows {
    pub entries: Vec<WindowEntry>,
    /// Set when confidence gating dropped every window; downstream stages
    /// then emit no points and prompt with the coarse mask alone.
    pub fallback_mask_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

/// A prompt point in image space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromptPoint {
    pub row: usize,
    pub col: usize,
    pub polarity: Polarity,
    /// Index into the selected-window list this point was sampled from.
    pub window: usize,
}

/// Final prompt set. Points are ordered window-major; within a window the
/// `t` maxima come first (descending value) then the `t` minima (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct PromptSet {
    pub points: Vec<PromptPoint>,
    pub scale: usize,
}

impl SelectedWindows {
    /// Windows scaled by `factor` into a finer coordinate space.
    pub fn scaled(&self, factor: usize) -> SelectedWindows {
        SelectedWindows {
            entries: self
                .entries
                .iter()
                .map(|w| WindowEntry {
                    row: w.row * factor,
                    col: w.col * factor,
                    size: w.size * factor,
                    score: w.score,
                })
                .collect(),
            fallback_mask_only: self.fallback_mask_only,
        }
    }
}

impl PromptSet {
    pub fn positives(&self) -> impl Iterator<Item = &PromptPoint> {
        self.points
            .iter()
            .filter(|p| p.polarity == Polarity::Positive)
    }

    pub fn negatives(&self) -> impl Iterator<Item = &PromptPoint> {
        self.points
            .iter()
            .filter(|p| p.polarity == Polarity::Negative)
    }
}

/// Mean frequency response of every fully contained window at the given
/// stride. The default stride equals the window size (disjoint tiling).
pub fn window_scores(map: &FrequencyMap, window_size: usize, stride: usize) -> Result<WindowGrid> {
    if stride == 0 {
        return Err(Error::parameter("stride", "stride must be at least 1"));
    }
    if window_size == 0 || window_size > map.height || window_size > map.width {
        return Err(Error::dimension(format!(
            "window {window_size} does not fit a {}x{} map",
            map.height, map.width
        )));
    }
    let rows = (map.height - window_size) / stride + 1;
    let cols = (map.width - window_size) / stride + 1;
    let norm = 1.0 / (window_size * window_size) as f64;
    let mut scores = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let mut sum = 0.0;
            for dr in 0..window_size {
                let base = (r * stride + dr) * map.width + c * stride;
                for dc in 0..window_size {
                    sum += map.data[base + dc];
                }
            }
            scores.push(sum * norm);
        }
    }
    Ok(WindowGrid {
        window_size,
        stride,
        rows,
        cols,
        scores,
    })
}

/// Keeps the k highest-scoring windows, ties broken by row-major order of
/// the top-left corner. Fewer than k windows means all are returned.
pub fn select_top_k(grid: &WindowGrid, k: usize) -> Result<SelectedWindows> {
    if k == 0 {
        return Err(Error::parameter("k", "top-k count must be at least 1"));
    }
    let mut order: Vec<usize> = (0..grid.scores.len()).collect();
    // Score-index pairs: row-major index order is exactly the tie-break.
    order.sort_by(|&a, &b| {
        grid.scores[b]
            .total_cmp(&grid.scores[a])
            .then_with(|| a.cmp(&b))
    });
    let entries = order
        .iter()
        .take(k)
        .map(|&i| WindowEntry {
            row: (i / grid.cols) * grid.stride,
            col: (i % grid.cols) * grid.stride,
            size: grid.window_size,
            score: grid.scores[i],
        })
        .collect();
    Ok(SelectedWindows {
        entries,
        fallback_mask_only: false,
    })
}

/// Binarizes a coarse probability mask at `tau` (strictly greater than).
pub fn binarize(coarse: &ProbMask, tau: f64) -> Result<BinaryMask> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::parameter(
            "tau",
            format!("threshold must lie in (0, 1), got {tau}"),
        ));
    }
    let data = coarse.data.iter().map(|&v| u8::from(v > tau)).collect();
    BinaryMask::new(coarse.height, coarse.width, data)
}

/// Per-window candidate points: the `t` highest cells (descending value),
/// then the `t` lowest of the remaining cells (ascending value), so the 2t
/// coordinates are always distinct. Value ties break row-major.
pub fn sample_points(
    map: &FrequencyMap,
    windows: &SelectedWindows,
    t: usize,
) -> Result<Vec<Vec<(usize, usize)>>> {
    if t == 0 {
        return Err(Error::parameter("t", "points per extremum must be at least 1"));
    }
    if windows.fallback_mask_only {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(windows.entries.len());
    for win in &windows.entries {
        let area = win.size * win.size;
        if 2 * t > area {
            return Err(Error::parameter(
                "t",
                format!("2t = {} exceeds window area {area}", 2 * t),
            ));
        }
        if win.row + win.size > map.height || win.col + win.size > map.width {
            return Err(Error::coordinate(format!(
                "window at ({}, {}) size {} leaves the {}x{} map",
                win.row, win.col, win.size, map.height, map.width
            )));
        }
        let mut cells: Vec<(f64, usize, usize)> = Vec::with_capacity(area);
        for dr in 0..win.size {
            for dc in 0..win.size {
                let (r, c) = (win.row + dr, win.col + dc);
                cells.push((map.get(r, c), r, c));
            }
        }
        // Highest first; the push order above is row-major, so a stable
        // sort by descending value keeps the tie-break.
        let mut by_desc = cells.clone();
        by_desc.sort_by(|a, b| b.0.total_cmp(&a.0));
        let highs: Vec<(usize, usize)> = by_desc[..t].iter().map(|&(_, r, c)| (r, c)).collect();

        let mut by_asc: Vec<(f64, usize, usize)> = cells
            .into_iter()
            .filter(|&(_, r, c)| !highs.contains(&(r, c)))
            .collect();
        by_asc.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points = highs;
        points.extend(by_asc[..t].iter().map(|&(_, r, c)| (r, c)));
        out.push(points);
    }
    Ok(out)
}

/// Assigns positive/negative polarity to candidates by looking up the
/// binary mask at the scaled coordinate, and emits points in image space.
pub fn assign_polarity(
    candidates: &[Vec<(usize, usize)>],
    mask: &BinaryMask,
    scale: usize,
) -> Result<PromptSet> {
    if scale == 0 {
        return Err(Error::parameter("scale", "scale factor must be at least 1"));
    }
    let mut points = Vec::new();
    for (w, cands) in candidates.iter().enumerate() {
        for &(r, c) in cands {
            let (ir, ic) = (r * scale, c * scale);
            if ir >= mask.height || ic >= mask.width {
                return Err(Error::coordinate(format!(
                    "candidate ({r}, {c}) scales to ({ir}, {ic}) outside the {}x{} mask",
                    mask.height, mask.width
                )));
            }
            let polarity = if mask.get(ir, ic) == 1 {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            points.push(PromptPoint {
                row: ir,
                col: ic,
                polarity,
                window: w,
            });
        }
    }
    Ok(PromptSet { points, scale })
}

/// Drops windows whose coarse-mask confidence falls below `gamma`.
///
/// Confidence is the mean of `max(M^c, 1 - M^c)` over the window's pixels in
/// coarse-mask space (windows are scaled by `scale`, clipped to the mask).
/// If nothing survives, the fallback flag is set and downstream point
/// sampling yields an empty prompt set.
pub fn gate_windows(
    windows: &SelectedWindows,
    coarse: &ProbMask,
    gamma: f64,
    scale: usize,
) -> Result<SelectedWindows> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::parameter(
            "gamma",
            format!("confidence gate must lie in [0, 1], got {gamma}"),
        ));
    }
    let mut kept = Vec::new();
    for win in &windows.entries {
        if window_confidence(win, coarse, scale) >= gamma {
            kept.push(*win);
        }
    }
    let fallback = kept.is_empty();
    Ok(SelectedWindows {
        entries: kept,
        fallback_mask_only: fallback,
    })
}

/// Mean of `max(M^c, 1 - M^c)` over the window region in mask space.
pub fn window_confidence(win: &WindowEntry, coarse: &ProbMask, scale: usize) -> f64 {
    let r0 = win.row * scale;
    let c0 = win.col * scale;
    let r1 = (r0 + win.size * scale).min(coarse.height);
    let c1 = (c0 + win.size * scale).min(coarse.width);
    if r0 >= r1 || c0 >= c1 {
        return 0.0;
    }
    let mut sum = 0.0;
    for r in r0..r1 {
        for c in c0..c1 {
            let v = coarse.get(r, c);
            sum += v.max(1.0 - v);
        }
    }
    sum / ((r1 - r0) * (c1 - c0)) as f64
}

/// Configuration for the end-to-end selection pipeline.
#[derive(Debug, Clone, Copy)]
pub struct FpsParams {
    pub window_size: usize,
    pub stride: usize,
    pub k: usize,
    pub t: usize,
    pub tau: f64,
    /// Confidence gate; `None` disables gating.
    pub gamma: Option<f64>,
}

/// Full pipeline: score windows, keep top-k, gate, binarize the coarse
/// mask, sample extremum candidates, assign polarity.
pub fn run_fps(
    map: &FrequencyMap,
    coarse: &ProbMask,
    params: &FpsParams,
) -> Result<(SelectedWindows, PromptSet)> {
    let grid = window_scores(map, params.window_size, params.stride)?;
    let mut windows = select_top_k(&grid, params.k)?;
    if let Some(gamma) = params.gamma {
        windows = gate_windows(&windows, coarse, gamma, FREQ_TO_IMAGE_SCALE)?;
    }
    let mask = binarize(coarse, params.tau)?;
    let candidates = sample_points(map, &windows, params.t)?;
    let prompts = assign_polarity(&candidates, &mask, FREQ_TO_IMAGE_SCALE)?;
    Ok((windows, prompts))
}

#[derive(Debug, Serialize, Deserialize)]
struct PointJson {
    row: usize,
    col: usize,
    polarity: Polarity,
}

/// Serialized artifact with fixed keys and ordering for fixture comparison:
/// `{"windows":[{"row","col","size","score"}],"points":[{"row","col",
/// "polarity"}],"fallback_mask_only":bool}`. Windows are in frequency-map
/// coordinates, points in image space.
#[derive(Debug, Serialize, Deserialize)]
pub struct PromptArtifact {
    windows: Vec<WindowEntry>,
    points: Vec<PointJson>,
    fallback_mask_only: bool,
}

impl PromptArtifact {
    pub fn new(windows: &SelectedWindows, prompts: &PromptSet) -> Self {
        Self {
            windows: windows.entries.clone(),
            points: prompts
                .points
                .iter()
                .map(|p| PointJson {
                    row: p.row,
                    col: p.col,
                    polarity: p.polarity,
                })
                .collect(),
            fallback_mask_only: windows.fallback_mask_only,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("prompt artifact serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map_from(h: usize, w: usize, data: Vec<f64>) -> FrequencyMap {
        FrequencyMap::new(h, w, data).unwrap()
    }

    fn flat_mask(h: usize, w: usize, v: u8) -> BinaryMask {
        BinaryMask::new(h, w, vec![v; h * w]).unwrap()
    }

    #[test]
    fn constant_map_scores_constant() {
        let m = map_from(8, 8, vec![0.7; 64]);
        let grid = window_scores(&m, 4, 4).unwrap();
        assert_eq!((grid.rows, grid.cols), (2, 2));
        assert!(grid.scores.iter().all(|&s| (s - 0.7).abs() < 1e-12));
    }

    #[test]
    fn hot_cell_window_mean() {
        let mut data = vec![0.0; 16];
        data[5] = 16.0; // cell (1,1) -> block (0,0) for 2x2 tiling
        let m = map_from(4, 4, data);
        let grid = window_scores(&m, 2, 2).unwrap();
        assert_eq!(grid.scores, vec![4.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn oversized_window_rejected() {
        let m = map_from(4, 4, vec![0.0; 16]);
        assert!(matches!(window_scores(&m, 5, 1), Err(Error::Dimension(_))));
    }

    #[test]
    fn window_scores_match_bruteforce() {
        let mut rng = crate::rng::SplitMix64::new(40);
        let (h, w) = (64, 64);
        let m = map_from(h, w, (0..h * w).map(|_| rng.next_f64()).collect());
        let grid = window_scores(&m, 8, 8).unwrap();
        for r in 0..grid.rows {
            for c in 0..grid.cols {
                let mut sum = 0.0;
                for dr in 0..8 {
                    for dc in 0..8 {
                        sum += m.get(r * 8 + dr, c * 8 + dc);
                    }
                }
                assert!((grid.scores[r * grid.cols + c] - sum / 64.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn top_k_tie_break_is_row_major() {
        let grid = WindowGrid {
            window_size: 2,
            stride: 2,
            rows: 2,
            cols: 3,
            scores: vec![1.0; 6],
        };
        let sel = select_top_k(&grid, 3).unwrap();
        let corners: Vec<(usize, usize)> = sel.entries.iter().map(|w| (w.row, w.col)).collect();
        assert_eq!(corners, vec![(0, 0), (0, 2), (0, 4)]);
    }

    #[test]
    fn top_k_orders_by_score() {
        let grid = WindowGrid {
            window_size: 1,
            stride: 1,
            rows: 1,
            cols: 4,
            scores: vec![1.0, 9.0, 5.0, 7.0],
        };
        let sel = select_top_k(&grid, 2).unwrap();
        assert_eq!(sel.entries[0].score, 9.0);
        assert_eq!(sel.entries[1].score, 7.0);
        assert_eq!(sel.entries[0].col, 1);
        assert_eq!(sel.entries[1].col, 3);
    }

    #[test]
    fn top_k_truncates_to_available() {
        let grid = WindowGrid {
            window_size: 1,
            stride: 1,
            rows: 1,
            cols: 2,
            scores: vec![0.5, 0.25],
        };
        assert_eq!(select_top_k(&grid, 10).unwrap().entries.len(), 2);
    }

    #[test]
    fn top_k_matches_sort_oracle() {
        let mut rng = crate::rng::SplitMix64::new(41);
        let scores: Vec<f64> = (0..25).map(|_| (rng.next_f64() * 8.0).floor()).collect();
        let grid = WindowGrid {
            window_size: 2,
            stride: 2,
            rows: 5,
            cols: 5,
            scores: scores.clone(),
        };
        for k in [1, 3, 7, 25] {
            let got = select_top_k(&grid, k).unwrap();
            let mut oracle: Vec<(f64, usize)> =
                scores.iter().cloned().zip(0..).collect();
            oracle.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
            for (entry, &(score, idx)) in got.entries.iter().zip(oracle.iter().take(k)) {
                assert_eq!(entry.score, score);
                assert_eq!((entry.row, entry.col), ((idx / 5) * 2, (idx % 5) * 2));
            }
        }
    }

    #[test]
    fn binarize_is_strict() {
        let coarse = ProbMask::new(1, 3, vec![0.6, 0.5, 0.4]).unwrap();
        let mask = binarize(&coarse, 0.5).unwrap();
        assert_eq!(mask.data, vec![1, 0, 0]);
        assert!(binarize(&coarse, 0.0).is_err());
        assert!(binarize(&coarse, 1.0).is_err());
    }

    #[test]
    fn sample_points_picks_extrema() {
        let m = map_from(2, 2, vec![0.9, 0.1, 0.5, 0.3]);
        let wins = SelectedWindows {
            entries: vec![WindowEntry {
                row: 0,
                col: 0,
                size: 2,
                score: 0.45,
            }],
            fallback_mask_only: false,
        };
        let pts = sample_points(&m, &wins, 1).unwrap();
        assert_eq!(pts, vec![vec![(0, 0), (0, 1)]]);
    }

    #[test]
    fn sample_points_tie_break_row_major() {
        let m = map_from(2, 2, vec![0.5; 4]);
        let wins = SelectedWindows {
            entries: vec![WindowEntry {
                row: 0,
                col: 0,
                size: 2,
                score: 0.5,
            }],
            fallback_mask_only: false,
        };
        let pts = sample_points(&m, &wins, 1).unwrap();
        // All values equal: the max is the first cell, the min the next
        // remaining cell in row-major order.
        assert_eq!(pts, vec![vec![(0, 0), (0, 1)]]);
    }

    #[test]
    fn sample_points_matches_sort_oracle() {
        let mut rng = crate::rng::SplitMix64::new(42);
        let m = map_from(4, 4, (0..16).map(|_| rng.next_f64()).collect());
        let wins = SelectedWindows {
            entries: vec![WindowEntry {
                row: 0,
                col: 0,
                size: 4,
                score: 0.0,
            }],
            fallback_mask_only: false,
        };
        let got = &sample_points(&m, &wins, 2).unwrap()[0];
        let mut cells: Vec<(f64, usize, usize)> = (0..16)
            .map(|i| (m.data[i], i / 4, i % 4))
            .collect();
        cells.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| (a.1, a.2).cmp(&(b.1, b.2))));
        let highs: Vec<(usize, usize)> = cells[..2].iter().map(|&(_, r, c)| (r, c)).collect();
        let mut rest = cells[2..].to_vec();
        rest.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| (a.1, a.2).cmp(&(b.1, b.2))));
        let mut expect = highs;
        expect.extend(rest[..2].iter().map(|&(_, r, c)| (r, c)));
        assert_eq!(got, &expect);
    }

    #[test]
    fn sample_points_rejects_oversubscription() {
        let m = map_from(2, 2, vec![0.0; 4]);
        let wins = SelectedWindows {
            entries: vec![WindowEntry {
                row: 0,
                col: 0,
                size: 2,
                score: 0.0,
            }],
            fallback_mask_only: false,
        };
        assert!(sample_points(&m, &wins, 3).is_err());
    }

    #[test]
    fn polarity_follows_mask() {
        let cands = vec![vec![(0usize, 0usize), (0, 1)]];
        let mut mask = flat_mask(2, 4, 0);
        mask.data[0] = 1; // image (0,0) <- freq (0,0) at scale 2... (0,0)*2 = (0,0)
        let set = assign_polarity(&cands, &mask, 2).unwrap();
        assert_eq!(set.points[0].polarity, Polarity::Positive);
        assert_eq!(set.points[1].polarity, Polarity::Negative);
        assert_eq!((set.points[1].row, set.points[1].col), (0, 2));
    }

    #[test]
    fn polarity_out_of_bounds_rejected() {
        let cands = vec![vec![(3usize, 0usize)]];
        let mask = flat_mask(4, 4, 1);
        assert!(matches!(
            assign_polarity(&cands, &mask, 2),
            Err(Error::Coordinate(_))
        ));
    }

    #[test]
    fn polarity_partition_matches_lookup_oracle() {
        let mut rng = crate::rng::SplitMix64::new(43);
        let mask = BinaryMask::new(
            20,
            20,
            (0..400).map(|_| u8::from(rng.next_f64() > 0.5)).collect(),
        )
        .unwrap();
        let cands: Vec<Vec<(usize, usize)>> = (0..10)
            .map(|w| vec![(w, (w * 3) % 10), ((w + 2) % 10, w)])
            .collect();
        let set = assign_polarity(&cands, &mask, 2).unwrap();
        assert_eq!(set.points.len(), 20);
        for p in &set.points {
            let expect = if mask.get(p.row, p.col) == 1 {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            assert_eq!(p.polarity, expect);
        }
        let n_pos = set.positives().count();
        let n_neg = set.negatives().count();
        assert_eq!(n_pos + n_neg, 20);
    }

    #[test]
    fn gating_confidence_cases() {
        let win = WindowEntry {
            row: 0,
            col: 0,
            size: 2,
            score: 0.0,
        };
        let sure = ProbMask::new(4, 4, vec![1.0; 16]).unwrap();
        assert!((window_confidence(&win, &sure, 2) - 1.0).abs() < 1e-12);
        let unsure = ProbMask::new(4, 4, vec![0.5; 16]).unwrap();
        assert!((window_confidence(&win, &unsure, 2) - 0.5).abs() < 1e-12);

        let wins = SelectedWindows {
            entries: vec![win],
            fallback_mask_only: false,
        };
        let kept = gate_windows(&wins, &sure, 0.8, 2).unwrap();
        assert_eq!(kept.entries.len(), 1);
        assert!(!kept.fallback_mask_only);
        let dropped = gate_windows(&wins, &unsure, 0.8, 2).unwrap();
        assert!(dropped.entries.is_empty());
        assert!(dropped.fallback_mask_only);
        // Fallback: no candidates, empty prompt set.
        let m = map_from(2, 2, vec![0.0; 4]);
        let cands = sample_points(&m, &dropped, 1).unwrap();
        assert!(cands.is_empty());
        let set = assign_polarity(&cands, &binarize(&unsure, 0.5).unwrap(), 2).unwrap();
        assert!(set.points.is_empty());
    }

    #[test]
    fn gating_is_monotone_in_gamma() {
        let mut rng = crate::rng::SplitMix64::new(44);
        let coarse = ProbMask::new(
            16,
            16,
            (0..256).map(|_| rng.next_f64()).collect(),
        )
        .unwrap();
        let wins = SelectedWindows {
            entries: (0..4)
                .flat_map(|r| {
                    (0..4).map(move |c| WindowEntry {
                        row: r * 2,
                        col: c * 2,
                        size: 2,
                        score: 0.0,
                    })
                })
                .collect(),
            fallback_mask_only: false,
        };
        let mut prev: Option<Vec<(usize, usize)>> = None;
        for gamma in [0.0, 0.3, 0.5, 0.7, 0.9, 1.0] {
            let kept = gate_windows(&wins, &coarse, gamma, 2).unwrap();
            let set: Vec<(usize, usize)> =
                kept.entries.iter().map(|w| (w.row, w.col)).collect();
            if let Some(prev) = &prev {
                assert!(set.iter().all(|w| prev.contains(w)), "gamma {gamma}");
            }
            prev = Some(set);
        }
    }

    #[test]
    fn point_count_invariant() {
        let mut rng = crate::rng::SplitMix64::new(45);
        let m = map_from(16, 16, (0..256).map(|_| rng.next_f64()).collect());
        let coarse = ProbMask::new(
            32,
            32,
            (0..1024).map(|_| rng.next_f64()).collect(),
        )
        .unwrap();
        for t in [1usize, 2] {
            let params = FpsParams {
                window_size: 4,
                stride: 4,
                k: 5,
                t,
                tau: 0.5,
                gamma: None,
            };
            let (wins, prompts) = run_fps(&m, &coarse, &params).unwrap();
            assert_eq!(prompts.points.len(), 2 * t * wins.entries.len());
        }
    }

    #[test]
    fn selection_is_scale_invariant() {
        let mut rng = crate::rng::SplitMix64::new(46);
        let data: Vec<f64> = (0..256).map(|_| rng.next_f64()).collect();
        let coarse = ProbMask::new(32, 32, (0..1024).map(|_| rng.next_f64()).collect()).unwrap();
        let params = FpsParams {
            window_size: 8,
            stride: 8,
            k: 3,
            t: 2,
            tau: 0.5,
            gamma: None,
        };
        let base = run_fps(&map_from(16, 16, data.clone()), &coarse, &params).unwrap();
        for factor in [0.25, 3.0, 1e6] {
            let scaled: Vec<f64> = data.iter().map(|v| v * factor).collect();
            let got = run_fps(&map_from(16, 16, scaled), &coarse, &params).unwrap();
            let corners: Vec<_> = got.0.entries.iter().map(|w| (w.row, w.col)).collect();
            let base_corners: Vec<_> = base.0.entries.iter().map(|w| (w.row, w.col)).collect();
            assert_eq!(corners, base_corners);
            assert_eq!(got.1.points, base.1.points);
        }
    }

    #[test]
    fn artifact_json_shape() {
        let wins = SelectedWindows {
            entries: vec![WindowEntry {
                row: 2,
                col: 4,
                size: 2,
                score: 0.5,
            }],
            fallback_mask_only: false,
        };
        let set = PromptSet {
            points: vec![PromptPoint {
                row: 4,
                col: 8,
                polarity: Polarity::Positive,
                window: 0,
            }],
            scale: 2,
        };
        let json = PromptArtifact::new(&wins, &set).to_json();
        assert_eq!(
            json,
            r#"{"windows":[{"row":2,"col":4,"size":2,"score":0.5}],"points":[{"row":4,"col":8,"polarity":"positive"}],"fallback_mask_only":false}"#
        );
    }
}
