use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LayoutError;
use crate::graph::Graph;

pub const FORCE_ITERATIONS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutMode {
    #[default]
    Force,
    Compact,
    /// Positions come from one layout of the whole dynamic graph.
    Fixed,
}

impl FromStr for LayoutMode {
    type Err = LayoutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "force" => Ok(Self::Force),
            "compact" => Ok(Self::Compact),
            "fixed" | "global" => Ok(Self::Fixed),
            _ => Err(LayoutError::UnknownMode(s.to_owned())),
        }
    }
}

impl fmt::Display for LayoutMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Force => "force",
            Self::Compact => "compact",
            Self::Fixed => "fixed",
        })
    }
}

/// Drawing area of a panel's graph, before the panel transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub width: f64,
    pub height: f64,
    /// Distance kept between node centres and the viewport border.
    pub margin: f64,
}

impl Default for Viewport {
    fn default() -> Self {
        Self {
            width: 400.0,
            height: 300.0,
            margin: 20.0,
        }
    }
}

impl Viewport {
    fn center(&self) -> (f64, f64) {
        (self.width / 2.0, self.height / 2.0)
    }

    fn clamp(&self, p: (f64, f64)) -> (f64, f64) {
        let mx = self.margin.min(self.width / 2.0);
        let my = self.margin.min(self.height / 2.0);
        (p.0.clamp(mx, self.width - mx), p.1.clamp(my, self.height - my))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodePosition {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Seed position in `[-1, 1]²` from the node id alone.
fn seed(id: &str) -> (f64, f64) {
    let h = fnv1a(id.as_bytes());
    let unit = |bits: u64| (bits & 0xffff_ffff) as f64 / u32::MAX as f64 * 2.0 - 1.0;
    (unit(h), unit(h >> 32))
}

/// Force-directed layout: inverse-square repulsion between all pairs,
/// attraction along links proportional to weight, and the mean position
/// re-centred on the viewport after every step.
pub fn force_layout(g: &Graph, view: &Viewport) -> Vec<NodePosition> {
    let ids: Vec<&str> = g.node_ids().collect();
    let n = ids.len();
    if n == 0 {
        return Vec::new();
    }
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let max_w = g.links().map(|l| l.weight()).fold(0.0, f64::max);
    let edges: Vec<(usize, usize, f64)> = g
        .links()
        .filter(|l| l.source != l.target)
        .map(|l| (index[l.source.as_str()], index[l.target.as_str()], l.weight() / max_w))
        .collect();

    let (cx, cy) = view.center();
    let k = ((view.width - 2.0 * view.margin).max(1.0) * (view.height - 2.0 * view.margin).max(1.0)
        / n as f64)
        .sqrt()
        * 0.6;
    let mut pos: Vec<(f64, f64)> = ids
        .iter()
        .map(|id| {
            let (sx, sy) = seed(id);
            (cx + sx * view.width / 4.0, cy + sy * view.height / 4.0)
        })
        .collect();

    let start_temp = view.width.min(view.height) / 8.0;
    for step in 0..FORCE_ITERATIONS {
        let mut disp = vec![(0.0, 0.0); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let (mut dx, mut dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                let mut d2 = dx * dx + dy * dy;
                if d2 < 1e-9 {
                    // coincident nodes: push apart along a fixed direction
                    dx = (i as f64 + 1.0) * 1e-3;
                    dy = (j as f64 + 1.0) * 1e-3;
                    d2 = dx * dx + dy * dy;
                }
                let d = d2.sqrt();
                let f = k * k * k / d2;
                let (fx, fy) = (dx / d * f, dy / d * f);
                disp[i].0 += fx;
                disp[i].1 += fy;
                disp[j].0 -= fx;
                disp[j].1 -= fy;
            }
        }
        for &(a, b, w) in &edges {
            let (dx, dy) = (pos[a].0 - pos[b].0, pos[a].1 - pos[b].1);
            let d = (dx * dx + dy * dy).sqrt();
            if d < 1e-12 {
                continue;
            }
            let f = w * d * d / k;
            let (fx, fy) = (dx / d * f, dy / d * f);
            disp[a].0 -= fx;
            disp[a].1 -= fy;
            disp[b].0 += fx;
            disp[b].1 += fy;
        }
        let temp = start_temp * (1.0 - step as f64 / FORCE_ITERATIONS as f64);
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = (d.0 * d.0 + d.1 * d.1).sqrt();
            if len > 0.0 {
                let s = len.min(temp) / len;
                *p = view.clamp((p.0 + d.0 * s, p.1 + d.1 * s));
            }
        }
        let mx = pos.iter().map(|p| p.0).sum::<f64>() / n as f64;
        let my = pos.iter().map(|p| p.1).sum::<f64>() / n as f64;
        for p in pos.iter_mut() {
            *p = view.clamp((p.0 + cx - mx, p.1 + cy - my));
        }
    }
    collect(&ids, &pos)
}

fn collect(ids: &[&str], pos: &[(f64, f64)]) -> Vec<NodePosition> {
    ids.iter()
        .zip(pos)
        .map(|(id, p)| NodePosition {
            id: (*id).to_owned(),
            x: p.0,
            y: p.1,
        })
        .collect()
}

/// Minimum distance between node centres kept by the compact layout.
pub const COMPACT_MIN_DISTANCE: f64 = 10.0;

/// Force layout uniformly scaled so its bounding box fills the viewport up to
/// a 5% margin, then relaxed so no two nodes sit closer than
/// [`COMPACT_MIN_DISTANCE`].
pub fn compact_layout(g: &Graph, view: &Viewport) -> Vec<NodePosition> {
    let base = force_layout(g, view);
    if base.len() < 2 {
        return base;
    }
    let (x0, x1) = min_max(base.iter().map(|p| p.x));
    let (y0, y1) = min_max(base.iter().map(|p| p.y));
    let (mx, my) = (view.width * 0.05, view.height * 0.05);
    let (aw, ah) = (view.width - 2.0 * mx, view.height - 2.0 * my);
    let scale = match (x1 - x0 > 1e-12, y1 - y0 > 1e-12) {
        (true, true) => (aw / (x1 - x0)).min(ah / (y1 - y0)),
        (true, false) => aw / (x1 - x0),
        (false, true) => ah / (y1 - y0),
        (false, false) => 1.0,
    };
    let (bx, by) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let (cx, cy) = view.center();
    let inner = Viewport {
        margin: mx.min(my),
        ..*view
    };
    let mut pos: Vec<(f64, f64)> = base
        .iter()
        .map(|p| inner.clamp((cx + (p.x - bx) * scale, cy + (p.y - by) * scale)))
        .collect();

    for _ in 0..100 {
        let mut moved = false;
        for i in 0..pos.len() {
            for j in (i + 1)..pos.len() {
                let (dx, dy) = (pos[j].0 - pos[i].0, pos[j].1 - pos[i].1);
                let d = (dx * dx + dy * dy).sqrt();
                if d + 1e-9 >= COMPACT_MIN_DISTANCE {
                    continue;
                }
                let (ux, uy) = if d > 1e-12 { (dx / d, dy / d) } else { (1.0, 0.0) };
                let push = (COMPACT_MIN_DISTANCE - d) / 2.0 + 1e-6;
                pos[i] = inner.clamp((pos[i].0 - ux * push, pos[i].1 - uy * push));
                pos[j] = inner.clamp((pos[j].0 + ux * push, pos[j].1 + uy * push));
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    let ids: Vec<&str> = base.iter().map(|p| p.id.as_str()).collect();
    collect(&ids, &pos)
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

/// Layout of `g` in the given mode. `basis` is the fixed-mode lookup table,
/// normally the force layout of the union of every snapshot.
pub fn layout_graph(
    g: &Graph,
    mode: LayoutMode,
    basis: Option<&BTreeMap<String, (f64, f64)>>,
    view: &Viewport,
) -> Result<Vec<NodePosition>, LayoutError> {
    match mode {
        LayoutMode::Force => Ok(force_layout(g, view)),
        LayoutMode::Compact => Ok(compact_layout(g, view)),
        LayoutMode::Fixed => {
            let basis = basis.ok_or(LayoutError::NoBasis)?;
            g.node_ids()
                .map(|id| {
                    let (x, y) = *basis
                        .get(id)
                        .ok_or_else(|| LayoutError::MissingFromBasis(id.to_owned()))?;
                    Ok(NodePosition { id: id.to_owned(), x, y })
                })
                .collect()
        }
    }
}
