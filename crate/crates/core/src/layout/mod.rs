//! Panel placement on the comic canvas and node-link layouts inside a panel.
//!
//! Panels fill tiers (rows) top to bottom, left to right in time order. The
//! tier count is `round(√n)` and panels are split into tiers so that the
//! timespan totals per tier are as even as an order-preserving split allows.

mod graph;

pub use graph::{
    compact_layout, force_layout, layout_graph, LayoutMode, NodePosition, Viewport,
    FORCE_ITERATIONS,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LayoutError {
    #[error("cannot lay out zero panels")]
    NoPanels,
    #[error("panel {0} has a zero timespan")]
    ZeroTimespan(usize),
    #[error("node `{0}` is missing from the fixed layout basis")]
    MissingFromBasis(String),
    #[error("fixed layout requested without a basis layout")]
    NoBasis,
    #[error("unknown layout mode `{0}`; use force, compact or fixed")]
    UnknownMode(String),
    #[error("canvas is too small: {0}")]
    Canvas(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PanelLayout {
    pub tier: usize,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl PanelLayout {
    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.height
    }

    /// Open-interior overlap test; touching edges do not count.
    pub fn overlaps(&self, other: &PanelLayout) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }
}

/// Canvas geometry. With `max_height` unset the canvas grows by one
/// `tier_height` per tier; with it set, tiers share that height and the tier
/// count is reduced until every tier is at least `max_height / 6` tall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanvasConfig {
    pub width: f64,
    pub tier_height: f64,
    pub gutter: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_height: Option<f64>,
}

impl Default for CanvasConfig {
    fn default() -> Self {
        Self {
            width: 1200.0,
            tier_height: 360.0,
            gutter: 16.0,
            max_height: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageLayout {
    pub width: f64,
    pub height: f64,
    pub tiers: usize,
    pub panels: Vec<PanelLayout>,
}

/// `max(1, round(√n))`.
pub fn tier_count(n: usize) -> usize {
    ((n as f64).sqrt().round() as usize).max(1)
}

/// Split `timespans` into exactly `tiers` non-empty contiguous runs. The
/// runs minimise the spread between the largest and smallest run total, then
/// the sum of squared totals; earlier split points win remaining ties.
/// Returns the run lengths.
pub fn partition_tiers(timespans: &[usize], tiers: usize) -> Vec<usize> {
    let n = timespans.len();
    let tiers = tiers.clamp(1, n.max(1));
    if n == 0 {
        return Vec::new();
    }
    let mut prefix = vec![0u64; n + 1];
    for (i, t) in timespans.iter().enumerate() {
        prefix[i + 1] = prefix[i] + *t as u64;
    }
    let total = prefix[n];
    let spread = |sizes: &[usize]| {
        let mut at = 0;
        let sums: Vec<u64> = sizes
            .iter()
            .map(|s| {
                at += s;
                prefix[at] - prefix[at - s]
            })
            .collect();
        sums.iter().max().unwrap() - sums.iter().min().unwrap()
    };

    let mut best = min_squares(&prefix, tiers, 0, u64::MAX).expect("unbounded split exists");
    let mut best_spread = spread(&best);
    // The smallest run of an optimal split is some run total no larger than
    // the mean; try each, largest first, and stop once none can beat the best.
    let mut lows: Vec<u64> = (0..n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .map(|(i, j)| prefix[j] - prefix[i])
        .filter(|s| s * tiers as u64 <= total)
        .collect();
    lows.sort_unstable_by(|a, b| b.cmp(a));
    lows.dedup();
    let mut winners = Vec::new();
    for low in lows {
        if total - low * tiers as u64 > tiers as u64 * best_spread {
            break;
        }
        let Some(high) = min_max(&prefix, tiers, low) else { continue };
        match (high - low).cmp(&best_spread) {
            std::cmp::Ordering::Less => {
                best_spread = high - low;
                winners = vec![(low, high)];
            }
            std::cmp::Ordering::Equal => winners.push((low, high)),
            std::cmp::Ordering::Greater => {}
        }
    }
    let mut best_cost = squares(&prefix, &best);
    if spread(&best) > best_spread {
        best_cost = u128::MAX;
    }
    for (low, high) in winners {
        if let Some(sizes) = min_squares(&prefix, tiers, low, high) {
            let cost = squares(&prefix, &sizes);
            if cost < best_cost {
                best_cost = cost;
                best = sizes;
            }
        }
    }
    best
}

fn squares(prefix: &[u64], sizes: &[usize]) -> u128 {
    let mut at = 0;
    sizes
        .iter()
        .map(|s| {
            at += s;
            let x = (prefix[at] - prefix[at - s]) as u128;
            x * x
        })
        .sum()
}

/// Smallest possible largest run total when every run is at least `low`.
fn min_max(prefix: &[u64], tiers: usize, low: u64) -> Option<u64> {
    let n = prefix.len() - 1;
    let mut best = vec![vec![None::<u64>; n + 1]; tiers + 1];
    best[0][0] = Some(0);
    for k in 1..=tiers {
        for j in k..=n - (tiers - k) {
            for i in (k - 1)..j {
                let s = prefix[j] - prefix[i];
                if s < low {
                    break;
                }
                if let Some(prev) = best[k - 1][i] {
                    let c = prev.max(s);
                    if best[k][j].is_none_or(|b| c < b) {
                        best[k][j] = Some(c);
                    }
                }
            }
        }
    }
    best[tiers][n]
}

/// Run lengths minimising the sum of squared totals with every total in
/// `[low, high]`.
fn min_squares(prefix: &[u64], tiers: usize, low: u64, high: u64) -> Option<Vec<usize>> {
    let n = prefix.len() - 1;
    let inf = u128::MAX;
    // cost[k][j]: best cost of the first j panels in k tiers
    let mut cost = vec![vec![inf; n + 1]; tiers + 1];
    let mut cut = vec![vec![0usize; n + 1]; tiers + 1];
    cost[0][0] = 0;
    for k in 1..=tiers {
        for j in k..=n - (tiers - k) {
            for i in (k - 1)..j {
                let s = prefix[j] - prefix[i];
                if cost[k - 1][i] == inf || s < low || s > high {
                    continue;
                }
                let c = cost[k - 1][i] + (s as u128) * (s as u128);
                // strict: earlier split points win ties
                if c < cost[k][j] {
                    cost[k][j] = c;
                    cut[k][j] = i;
                }
            }
        }
    }
    if cost[tiers][n] == inf {
        return None;
    }
    let mut sizes = vec![0; tiers];
    let mut j = n;
    for k in (1..=tiers).rev() {
        let i = cut[k][j];
        sizes[k - 1] = j - i;
        j = i;
    }
    Some(sizes)
}

/// Place panels with the given timespans (in snapshots) on the canvas.
pub fn layout_panels(timespans: &[usize], config: &CanvasConfig) -> Result<PageLayout, LayoutError> {
    if timespans.is_empty() {
        return Err(LayoutError::NoPanels);
    }
    if let Some(i) = timespans.iter().position(|t| *t == 0) {
        return Err(LayoutError::ZeroTimespan(i));
    }
    let g = config.gutter;
    let mut tiers = tier_count(timespans.len());
    let (tier_height, height) = match config.max_height {
        None => (config.tier_height, tiers as f64 * (config.tier_height + g) + g),
        Some(h) => {
            let floor = h / 6.0;
            let per_tier = |t: usize| (h - (t as f64 + 1.0) * g) / t as f64;
            while tiers > 1 && per_tier(tiers) < floor {
                tiers -= 1;
            }
            (per_tier(tiers), h)
        }
    };
    if tier_height <= 0.0 {
        return Err(LayoutError::Canvas(format!("tier height {tier_height}")));
    }

    let mut panels = Vec::with_capacity(timespans.len());
    let mut start = 0;
    for (tier, size) in partition_tiers(timespans, tiers).into_iter().enumerate() {
        let row = &timespans[start..start + size];
        let total: usize = row.iter().sum();
        let free = config.width - (size as f64 + 1.0) * g;
        if free <= 0.0 {
            return Err(LayoutError::Canvas(format!("width {} for {size} panels", config.width)));
        }
        let y = g + tier as f64 * (tier_height + g);
        let mut x = g;
        for t in row {
            let width = free * *t as f64 / total as f64;
            panels.push(PanelLayout {
                tier,
                x,
                y,
                width,
                height: tier_height,
            });
            x += width + g;
        }
        start += size;
    }
    Ok(PageLayout {
        width: config.width,
        height,
        tiers,
        panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tier_counts() {
        assert_eq!(tier_count(1), 1);
        assert_eq!(tier_count(2), 1);
        assert_eq!(tier_count(3), 2);
        assert_eq!(tier_count(16), 4);
        assert_eq!(tier_count(100), 10);
    }

    #[test]
    fn heavy_first_panel_gets_its_own_tier() {
        assert_eq!(partition_tiers(&[10, 1, 1], 2), [1, 2]);
        // sums 8,12,10 rather than the greedy 12,12,6
        assert_eq!(partition_tiers(&[4, 4, 4, 4, 4, 4, 4, 1, 1], 3), [2, 3, 4]);
        assert_eq!(partition_tiers(&[1, 1, 1, 1], 2), [2, 2]);
    }

    #[test]
    fn spread_beats_squares() {
        // least squares alone gives 15,12,10,8: a spread of 7 over a widest panel of 6
        let spans = [2, 3, 4, 6, 2, 6, 4, 2, 2, 6, 2, 5, 1];
        let sizes = partition_tiers(&spans, 4);
        let mut at = 0;
        let sums: Vec<usize> = sizes
            .iter()
            .map(|s| {
                at += s;
                spans[at - s..at].iter().sum()
            })
            .collect();
        assert_eq!(sizes.iter().sum::<usize>(), spans.len());
        assert!(sums.iter().max().unwrap() - sums.iter().min().unwrap() <= 6, "{sums:?}");
    }

    #[test]
    fn single_panel_spans_width() {
        let c = CanvasConfig::default();
        let p = layout_panels(&[5], &c).unwrap();
        assert_eq!(p.tiers, 1);
        assert_eq!(p.panels[0].x, c.gutter);
        assert_eq!(p.panels[0].width, c.width - 2.0 * c.gutter);
    }

    #[test]
    fn widths_follow_timespans() {
        let p = layout_panels(&[1, 3], &CanvasConfig::default()).unwrap();
        let (a, b) = (p.panels[0], p.panels[1]);
        assert!((b.width - 3.0 * a.width).abs() < 1e-9);
        assert!(a.right() < b.x);
    }

    #[test]
    fn sixteen_panels() {
        let p = layout_panels(&[1; 16], &CanvasConfig::default()).unwrap();
        assert_eq!(p.tiers, 4);
        assert!(p.panels.iter().all(|x| x.height == 360.0));
        assert_eq!(p.panels.iter().filter(|x| x.tier == 3).count(), 4);
    }

    #[test]
    fn height_floor_reduces_tiers() {
        let c = CanvasConfig {
            max_height: Some(1200.0),
            ..CanvasConfig::default()
        };
        let p = layout_panels(&[1; 64], &c).unwrap();
        assert!(p.tiers < 8);
        assert!(p.panels[0].height >= 200.0);
        assert!(p.panels.iter().all(|x| x.bottom() <= 1200.0));
    }

    #[test]
    fn errors() {
        let c = CanvasConfig::default();
        assert_eq!(layout_panels(&[], &c), Err(LayoutError::NoPanels));
        assert_eq!(layout_panels(&[1, 0], &c), Err(LayoutError::ZeroTimespan(1)));
    }
}
