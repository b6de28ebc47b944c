//! End-to-end comic construction: dendrogram cut → characters → panel
//! graphs with change status → captions → layouts → [`ComicTemplate`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::clustering::{group_for_span, ClusterError, CutCriterion, Dendrogram};
use crate::graph::{diff, ego_graph, AggregationPolicy, DynamicGraph, EgoLevel, Span};
use crate::layout::{
    force_layout, layout_graph, layout_panels, CanvasConfig, LayoutError, LayoutMode, Viewport,
};
use crate::narrative::{
    generate_caption, main_characters, strongest_characters, supporting_characters, CaptionInput,
    CaptionTemplates, NarrativeError,
};
use crate::render::{
    Change, ComicTemplate, HullOverlay, Panel, PanelLink, PanelNode, StyleSpec, SCHEMA,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ComicError {
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Narrative(#[from] NarrativeError),
    #[error("main character `{0}` does not occur in the dataset")]
    UnknownMain(String),
    #[error("panel spans must be non-overlapping and in time order: {0} after {1}")]
    SpanOrder(Span, Span),
    #[error("at least one main character per panel is required")]
    NoMains,
}

/// Everything that shapes a comic besides the data and the dendrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComicOptions {
    pub ego: EgoLevel,
    /// Fixed main characters; when empty they are picked per panel.
    pub mains: Vec<String>,
    pub mains_per_panel: usize,
    pub top: f64,
    pub highlight: f64,
    pub layout: LayoutMode,
    pub aggregation: AggregationPolicy,
    pub canvas: CanvasConfig,
    pub viewport: Viewport,
    pub hidden: BTreeSet<String>,
    pub style: StyleSpec,
    pub hulls: Vec<HullOverlay>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
}

impl Default for ComicOptions {
    fn default() -> Self {
        Self {
            ego: EgoLevel::OneAndHalf,
            mains: Vec::new(),
            mains_per_panel: 1,
            top: 15.0,
            highlight: 5.0,
            layout: LayoutMode::Force,
            aggregation: AggregationPolicy::Sum,
            canvas: CanvasConfig::default(),
            viewport: Viewport::default(),
            hidden: BTreeSet::new(),
            style: StyleSpec::default(),
            hulls: Vec::new(),
            title: None,
        }
    }
}

/// Cut the dendrogram and build the comic for the resulting clusters.
pub fn generate_comic(
    dg: &DynamicGraph,
    dendrogram: &Dendrogram,
    cut: CutCriterion,
    options: &ComicOptions,
    templates: &CaptionTemplates,
) -> Result<ComicTemplate, ComicError> {
    let cut = match cut {
        CutCriterion::Level(l) => dendrogram.cut(l)?,
        CutCriterion::K(k) => dendrogram.cut_k(k)?,
    };
    assemble_comic(dg, dendrogram, &cut.clusters, options, templates)
}

/// Earlier and later child of a multi-snapshot span: the dendrogram's split
/// when the span is one of its clusters, otherwise the span halved.
pub fn children_of(dendrogram: &Dendrogram, span: Span) -> Option<(Span, Span)> {
    if span.start == span.end {
        return None;
    }
    Some(match dendrogram.merge_for_span(span) {
        Some(m) => dendrogram.children_spans(m),
        None => {
            let mid = span.start + (span.end - span.start) / 2;
            (Span::new(span.start, mid), Span::new(mid + 1, span.end))
        }
    })
}

/// Build panels for arbitrary time-ordered spans.
pub fn assemble_comic(
    dg: &DynamicGraph,
    dendrogram: &Dendrogram,
    spans: &[Span],
    options: &ComicOptions,
    templates: &CaptionTemplates,
) -> Result<ComicTemplate, ComicError> {
    for w in spans.windows(2) {
        if w[1].start <= w[0].end {
            return Err(ComicError::SpanOrder(w[1], w[0]));
        }
    }
    if options.mains.is_empty() && options.mains_per_panel == 0 {
        return Err(ComicError::NoMains);
    }
    let known = dg.all_node_ids();
    if let Some(m) = options.mains.iter().find(|m| !known.contains(m.as_str())) {
        return Err(ComicError::UnknownMain(m.clone()));
    }

    let page = layout_panels(&spans.iter().map(|s| s.len()).collect::<Vec<_>>(), &options.canvas)?;
    let basis = match options.layout {
        LayoutMode::Fixed => {
            let all = group_for_span(dg, dg.full_span(), options.aggregation)?;
            let pos = force_layout(&all.graph, &options.viewport);
            Some(pos.into_iter().map(|p| (p.id, (p.x, p.y))).collect::<BTreeMap<_, _>>())
        }
        _ => None,
    };

    let mut panels = Vec::with_capacity(spans.len());
    for (span, layout) in spans.iter().zip(page.panels) {
        let mut panel = build_panel(dg, dendrogram, *span, options, templates, basis.as_ref())?;
        panel.layout = layout;
        panels.push(panel);
    }
    Ok(ComicTemplate {
        schema: SCHEMA.to_owned(),
        title: options.title.clone(),
        width: page.width,
        height: page.height,
        layout_mode: options.layout,
        viewport: options.viewport,
        style: options.style.clone(),
        panels,
    })
}

fn build_panel(
    dg: &DynamicGraph,
    dendrogram: &Dendrogram,
    span: Span,
    o: &ComicOptions,
    templates: &CaptionTemplates,
    basis: Option<&BTreeMap<String, (f64, f64)>>,
) -> Result<Panel, ComicError> {
    let agg = o.aggregation;
    let whole = group_for_span(dg, span, agg)?.graph;
    let children = children_of(dendrogram, span);
    let sides = match children {
        Some((a, b)) => Some((group_for_span(dg, a, agg)?.graph, group_for_span(dg, b, agg)?.graph)),
        None => None,
    };

    let mains: Vec<String> = if o.mains.is_empty() {
        let ranked = match &sides {
            Some((before, after)) => {
                main_characters(before, after, o.ego, usize::MAX, agg)
            }
            None => strongest_characters(&whole, usize::MAX),
        };
        ranked
            .into_iter()
            .filter(|c| !o.hidden.contains(&c.node))
            .take(o.mains_per_panel)
            .map(|c| c.node)
            .collect()
    } else {
        o.mains.iter().filter(|m| whole.contains_node(m)).cloned().collect()
    };
    let main_set: BTreeSet<String> = mains.iter().cloned().collect();

    let ego = ego_graph(&whole, mains.iter().map(String::as_str), o.ego);
    let supporters = supporting_characters(&ego, &main_set, o.top, o.highlight)?;
    let keep: BTreeSet<String> = supporters
        .visible
        .iter()
        .filter(|id| !o.hidden.contains(*id))
        .cloned()
        .collect();
    let shown = ego.induced(&keep);

    let status = sides.as_ref().map(|(before, after)| diff(before, after));
    let node_status = |id: &str| match &status {
        Some(d) if d.added_nodes.contains(id) => Change::Added,
        Some(d) if d.deleted_nodes.contains(id) => Change::Deleted,
        _ => Change::Preserved,
    };

    let positions = layout_graph(&shown, o.layout, basis, &o.viewport)?;
    let nodes = positions
        .into_iter()
        .map(|p| {
            let node = shown.node(&p.id).expect("layout covers the panel graph");
            PanelNode {
                label: node.label().to_owned(),
                weight: shown.total_link_weight(&p.id),
                status: node_status(&p.id),
                id: p.id,
                x: p.x,
                y: p.y,
            }
        })
        .collect();
    let links = shown
        .links()
        .map(|l| {
            let key = l.key();
            PanelLink {
                source: l.source.clone(),
                target: l.target.clone(),
                weight: l.weight(),
                status: match &status {
                    Some(d) if d.added_links.contains(&key) => Change::Added,
                    Some(d) if d.deleted_links.contains(&key) => Change::Deleted,
                    _ => Change::Preserved,
                },
            }
        })
        .collect();

    let label = dg.span_label(span);
    let caption = match (&sides, children) {
        (Some((before, after)), Some((a, b))) => {
            let (from, to) = (dg.span_label(a), dg.span_label(b));
            generate_caption(
                &CaptionInput {
                    mains: &mains,
                    before: Some(before),
                    after,
                    level: o.ego,
                    span_start: &from,
                    span_end: &to,
                },
                templates,
            )
        }
        _ => generate_caption(
            &CaptionInput {
                mains: &mains,
                before: None,
                after: &whole,
                level: o.ego,
                span_start: &label,
                span_end: &label,
            },
            templates,
        ),
    };

    let hulls = o
        .hulls
        .iter()
        .filter_map(|h| {
            let members: Vec<String> = h.members.iter().filter(|m| shown.contains_node(m)).cloned().collect();
            (!members.is_empty()).then(|| HullOverlay {
                members,
                ..h.clone()
            })
        })
        .collect();

    let highlighted = supporters
        .ranking
        .iter()
        .map(|(id, _)| id)
        .filter(|id| supporters.highlighted.contains(*id) && shown.contains_node(id))
        .cloned()
        .collect();
    Ok(Panel {
        span,
        label,
        children: children.map(|(a, b)| [a, b]),
        layout: Default::default(),
        mains: mains.into_iter().filter(|m| shown.contains_node(m)).collect(),
        highlighted,
        nodes,
        links,
        caption,
        hulls,
    })
}

/// Spans after replacing panel `index` with one single-time panel per
/// entry of `times` (`replace`) or inserting those panels next to it (`add`).
/// Inserted times that an existing panel already covers are rejected.
pub fn edit_timeline(
    spans: &[Span],
    index: usize,
    times: &[usize],
    replace: bool,
    last_time: usize,
) -> Result<Vec<Span>, TimelineError> {
    if index >= spans.len() {
        return Err(TimelineError::NoPanel(index));
    }
    if times.is_empty() {
        return Err(TimelineError::NoTimes);
    }
    let mut out: Vec<Span> = spans.to_vec();
    if replace {
        out.remove(index);
    }
    for &t in times {
        if t > last_time {
            return Err(TimelineError::OutOfRange(t));
        }
        if out.iter().any(|s| s.contains(t)) {
            return Err(TimelineError::Covered(t));
        }
        out.push(Span::point(t));
    }
    out.sort_by_key(|s| (s.start, s.end));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TimelineError {
    #[error("there is no panel {0}")]
    NoPanel(usize),
    #[error("no time points given")]
    NoTimes,
    #[error("time index {0} is outside the dataset")]
    OutOfRange(usize),
    #[error("time index {0} is already shown by another panel")]
    Covered(usize),
}
