//! Response shapes shared by the command line and the HTTP service, so both
//! produce byte-identical JSON for the same request.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clustering::{build_dendrogram, group_for_span, ClusterError, CutCriterion, Dendrogram, Scope};
use crate::comic::children_of;
use crate::community::{
    character_paths, CommunityError, CommunityMethod, CommunityTimeline, EvolutionConfig, GridCell, PathStep,
};
use crate::graph::{node_metric_series, AggregationPolicy, DynamicGraph, EgoLevel, MetricKind, Span};
use crate::narrative::{main_characters, strongest_characters, CharacterScore};
use crate::similarity::consecutive_dissimilarity;

/// Rows of the main-character table per cluster.
pub const CANDIDATES_PER_CLUSTER: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DendrogramView {
    pub scope: String,
    pub labels: Vec<String>,
    #[serde(flatten)]
    pub dendrogram: Dendrogram,
}

pub fn dendrogram_view(
    dg: &DynamicGraph,
    scope: &Scope,
    agg: AggregationPolicy,
) -> Result<DendrogramView, ClusterError> {
    Ok(DendrogramView {
        scope: scope.to_string(),
        labels: dg.labels().map(str::to_owned).collect(),
        dendrogram: build_dendrogram(dg, scope, agg)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterView {
    pub span: Span,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub children: Option<[Span; 2]>,
    /// Ranked main-character candidates.
    pub mains: Vec<CharacterScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutView {
    pub criterion: CutCriterion,
    pub clusters: Vec<ClusterView>,
}

pub fn cut_view(
    dg: &DynamicGraph,
    dendrogram: &Dendrogram,
    criterion: CutCriterion,
    ego: EgoLevel,
    agg: AggregationPolicy,
) -> Result<CutView, ClusterError> {
    let cut = match criterion {
        CutCriterion::Level(l) => dendrogram.cut(l)?,
        CutCriterion::K(k) => dendrogram.cut_k(k)?,
    };
    let clusters = cut
        .clusters
        .iter()
        .map(|&span| {
            let children = children_of(dendrogram, span);
            let mains = match children {
                Some((a, b)) => main_characters(
                    &group_for_span(dg, a, agg)?.graph,
                    &group_for_span(dg, b, agg)?.graph,
                    ego,
                    CANDIDATES_PER_CLUSTER,
                    agg,
                ),
                None => strongest_characters(&group_for_span(dg, span, agg)?.graph, CANDIDATES_PER_CLUSTER),
            };
            Ok(ClusterView {
                span,
                label: dg.span_label(span),
                children: children.map(|(a, b)| [a, b]),
                mains,
            })
        })
        .collect::<Result<_, ClusterError>>()?;
    Ok(CutView { criterion, clusters })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsView {
    pub node: String,
    pub metric: MetricKind,
    pub labels: Vec<String>,
    /// `null` where the node is absent.
    pub series: Vec<Option<f64>>,
    /// Ego-network distance between consecutive snapshots.
    pub dissimilarity: Vec<f64>,
}

pub fn metrics_view(dg: &DynamicGraph, node: &str, metric: MetricKind, level: EgoLevel) -> MetricsView {
    MetricsView {
        node: node.to_owned(),
        metric,
        labels: dg.labels().map(str::to_owned).collect(),
        series: node_metric_series(dg, node, metric),
        dissimilarity: consecutive_dissimilarity(dg, node, level),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityView {
    pub method: String,
    pub labels: Vec<String>,
    #[serde(flatten)]
    pub timeline: CommunityTimeline,
    pub grid: Vec<GridCell>,
    pub paths: BTreeMap<String, Vec<PathStep>>,
}

pub fn community_view(
    dg: &DynamicGraph,
    method: &CommunityMethod,
    characters: &[String],
) -> Result<CommunityView, CommunityError> {
    let timeline = CommunityTimeline::detect(dg, method, EvolutionConfig::default())?;
    Ok(community_view_from(dg, method, timeline, characters))
}

/// Like [`community_view`] for an already computed timeline.
pub fn community_view_from(
    dg: &DynamicGraph,
    method: &CommunityMethod,
    timeline: CommunityTimeline,
    characters: &[String],
) -> CommunityView {
    CommunityView {
        method: method.to_string(),
        labels: dg.labels().map(str::to_owned).collect(),
        grid: timeline.grid(),
        paths: character_paths(&timeline, characters.iter().map(String::as_str)),
        timeline,
    }
}
