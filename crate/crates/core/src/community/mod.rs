//! Community detection per snapshot and community evolution over time.
//!
//! Communities at adjacent times are linked when their member sets overlap
//! (Jaccard ≥ θ). The successor edges then classify six evolution events:
//! birth, death, growth, contraction, merge and split.

pub mod louvain;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::{DynamicGraph, Graph};
use louvain::{louvain, WeightedGraph};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CommunityError {
    #[error("node `{node}` at time {time} has no attribute `{key}`")]
    MissingAttribute { node: String, time: usize, key: String },
    #[error("unknown community method `{0}`; use `louvain` or `attribute:<key>`")]
    UnknownMethod(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CommunityMethod {
    Louvain,
    /// Group nodes by the value of a categorical (or numeric) attribute.
    Attribute(String),
}

impl FromStr for CommunityMethod {
    type Err = CommunityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "louvain" => Ok(Self::Louvain),
            _ => match s.strip_prefix("attribute:") {
                Some(key) if !key.is_empty() => Ok(Self::Attribute(key.to_owned())),
                _ => Err(CommunityError::UnknownMethod(s.to_owned())),
            },
        }
    }
}

impl fmt::Display for CommunityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Louvain => f.write_str("louvain"),
            Self::Attribute(k) => write!(f, "attribute:{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Community {
    pub id: String,
    pub members: Vec<String>,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    pub time: usize,
    /// Largest first, then by smallest member id.
    pub communities: Vec<Community>,
}

impl CommunityPartition {
    /// Build from member groups; empty groups are dropped.
    pub fn from_groups(time: usize, groups: impl IntoIterator<Item = BTreeSet<String>>) -> Self {
        let mut communities: Vec<Community> = groups
            .into_iter()
            .filter(|g| !g.is_empty())
            .map(|members| Community {
                id: community_id(time, members.first().unwrap()),
                size: members.len(),
                members: members.into_iter().collect(),
            })
            .collect();
        communities.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| a.members[0].cmp(&b.members[0])));
        Self { time, communities }
    }

    pub fn community_of(&self, node: &str) -> Option<&Community> {
        self.communities
            .iter()
            .find(|c| c.members.binary_search_by(|m| m.as_str().cmp(node)).is_ok())
    }

    pub fn get(&self, id: &str) -> Option<&Community> {
        self.communities.iter().find(|c| c.id == id)
    }
}

/// Stable id derived from the time index and the smallest member id.
pub fn community_id(time: usize, min_member: &str) -> String {
    let digest = Sha256::digest(format!("{time}\u{1f}{min_member}").as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub const DEFAULT_RESOLUTION: f64 = 1.0;

/// Louvain communities of one graph (directed links are symmetrised by sum).
pub fn louvain_partition(time: usize, g: &Graph, resolution: f64) -> CommunityPartition {
    let ids: Vec<&str> = g.node_ids().collect();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let wg = WeightedGraph::new(
        ids.len(),
        g.links()
            .map(|l| (index[l.source.as_str()], index[l.target.as_str()], l.weight())),
    );
    let result = louvain(&wg, resolution);
    let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, c) in result.membership.iter().enumerate() {
        groups.entry(*c).or_default().insert(ids[i].to_owned());
    }
    CommunityPartition::from_groups(time, groups.into_values())
}

fn attribute_value(g: &Graph, node: &str, key: &str) -> Option<String> {
    let n = g.node(node)?;
    if let Some(v) = n.categories.get(key) {
        return Some(v.clone());
    }
    n.attrs.keys().any(|k| k == key).then(|| n.attrs.get(key).to_string())
}

pub fn detect_communities(
    dg: &DynamicGraph,
    method: &CommunityMethod,
) -> Result<Vec<CommunityPartition>, CommunityError> {
    dg.snapshots()
        .iter()
        .map(|s| match method {
            CommunityMethod::Louvain => Ok(louvain_partition(s.time, &s.graph, DEFAULT_RESOLUTION)),
            CommunityMethod::Attribute(key) => {
                let mut groups: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
                for id in s.graph.node_ids() {
                    let value = attribute_value(&s.graph, id, key).ok_or_else(|| {
                        CommunityError::MissingAttribute {
                            node: id.to_owned(),
                            time: s.time,
                            key: key.clone(),
                        }
                    })?;
                    groups.entry(value).or_default().insert(id.to_owned());
                }
                Ok(CommunityPartition::from_groups(s.time, groups.into_values()))
            }
        })
        .collect()
}

/// Overlap edge between communities at `time` and `time + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Succession {
    pub time: usize,
    pub from: String,
    pub to: String,
    pub jaccard: f64,
}

fn jaccard(a: &[String], b: &[String]) -> f64 {
    let a: BTreeSet<&String> = a.iter().collect();
    let b: BTreeSet<&String> = b.iter().collect();
    let inter = a.intersection(&b).count();
    let union = a.union(&b).count();
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn match_communities(
    earlier: &CommunityPartition,
    later: &CommunityPartition,
    theta: f64,
) -> Vec<Succession> {
    let mut out = Vec::new();
    for a in &earlier.communities {
        for b in &later.communities {
            let j = jaccard(&a.members, &b.members);
            if j >= theta && j > 0.0 {
                out.push(Succession {
                    time: earlier.time,
                    from: a.id.clone(),
                    to: b.id.clone(),
                    jaccard: j,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Archetype {
    Birth,
    Death,
    Growth,
    Contraction,
    Merge,
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CommunityEvent {
    pub time: usize,
    pub community: String,
    pub archetype: Archetype,
}

/// Matching threshold and growth/contraction sensitivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub theta: f64,
    pub delta: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self { theta: 0.1, delta: 0.2 }
    }
}

/// Events from partitions and their successor edges.
///
/// A death is reported at the last time the community exists. Births need a
/// predecessor-less community after the first time index, deaths a
/// successor-less community before the last one.
pub fn classify_events(
    partitions: &[CommunityPartition],
    successions: &[Succession],
    delta: f64,
) -> Vec<CommunityEvent> {
    let last = partitions.len().saturating_sub(1);
    let mut events = Vec::new();
    let mut push = |time: usize, community: &str, archetype| {
        events.push(CommunityEvent {
            time,
            community: community.to_owned(),
            archetype,
        })
    };
    for p in partitions {
        for c in &p.communities {
            let preds: Vec<&Succession> = successions
                .iter()
                .filter(|s| s.time + 1 == p.time && s.to == c.id)
                .collect();
            let succs = successions
                .iter()
                .filter(|s| s.time == p.time && s.from == c.id)
                .count();
            if p.time > 0 && preds.is_empty() {
                push(p.time, &c.id, Archetype::Birth);
            }
            if p.time < last && succs == 0 {
                push(p.time, &c.id, Archetype::Death);
            }
            if preds.len() >= 2 {
                push(p.time, &c.id, Archetype::Merge);
            }
            if succs >= 2 {
                push(p.time, &c.id, Archetype::Split);
            }
            // growth and contraction need a one-to-one continuation; the
            // pieces of a split are not contractions
            let sole_heir = |pred: &Succession| {
                successions
                    .iter()
                    .filter(|s| s.time == pred.time && s.from == pred.from)
                    .count()
                    == 1
            };
            if let [pred] = preds.as_slice() {
                if !sole_heir(pred) {
                    continue;
                }
                let before = partitions[pred.time].get(&pred.from).map_or(0, |x| x.size) as f64;
                let change = (c.size as f64 - before) / before;
                if change >= delta {
                    push(p.time, &c.id, Archetype::Growth);
                } else if change <= -delta {
                    push(p.time, &c.id, Archetype::Contraction);
                }
            }
        }
    }
    events.sort();
    events
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityTimeline {
    pub partitions: Vec<CommunityPartition>,
    pub successions: Vec<Succession>,
    pub events: Vec<CommunityEvent>,
}

impl CommunityTimeline {
    pub fn build(partitions: Vec<CommunityPartition>, config: EvolutionConfig) -> Self {
        let successions: Vec<Succession> = partitions
            .windows(2)
            .flat_map(|w| match_communities(&w[0], &w[1], config.theta))
            .collect();
        let events = classify_events(&partitions, &successions, config.delta);
        Self {
            partitions,
            successions,
            events,
        }
    }

    pub fn detect(
        dg: &DynamicGraph,
        method: &CommunityMethod,
        config: EvolutionConfig,
    ) -> Result<Self, CommunityError> {
        Ok(Self::build(detect_communities(dg, method)?, config))
    }

    /// Grid cells for a community view: vertical rank by size and a
    /// size-quantile color bucket in `0..COLOR_BUCKETS`.
    pub fn grid(&self) -> Vec<GridCell> {
        let mut sizes: Vec<usize> = self
            .partitions
            .iter()
            .flat_map(|p| p.communities.iter().map(|c| c.size))
            .collect();
        sizes.sort_unstable();
        let total = sizes.len().max(1);
        self.partitions
            .iter()
            .flat_map(|p| {
                let sizes = &sizes;
                p.communities.iter().enumerate().map(move |(row, c)| {
                    let below = sizes.partition_point(|s| *s < c.size);
                    GridCell {
                        time: p.time,
                        community: c.id.clone(),
                        row,
                        size: c.size,
                        color_bucket: (below * COLOR_BUCKETS / total).min(COLOR_BUCKETS - 1),
                    }
                })
            })
            .collect()
    }
}

pub const COLOR_BUCKETS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub time: usize,
    pub community: String,
    pub row: usize,
    pub size: usize,
    pub color_bucket: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub time: usize,
    pub community: String,
}

/// For each character, the community holding it at every time it is
/// present; absent times are skipped, leaving gaps.
pub fn character_paths<'a>(
    timeline: &CommunityTimeline,
    characters: impl IntoIterator<Item = &'a str>,
) -> BTreeMap<String, Vec<PathStep>> {
    characters
        .into_iter()
        .map(|ch| {
            let steps = timeline
                .partitions
                .iter()
                .filter_map(|p| {
                    p.community_of(ch).map(|c| PathStep {
                        time: p.time,
                        community: c.id.clone(),
                    })
                })
                .collect();
            (ch.to_owned(), steps)
        })
        .collect()
}
