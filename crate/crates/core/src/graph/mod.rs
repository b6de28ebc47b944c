//! Dynamic graph data model.
//!
//! A [`DynamicGraph`] is an ordered sequence of [`Snapshot`]s. Contiguous runs
//! of snapshots collapse into a [`SnapshotGroup`] whose graph is the
//! attribute-aggregated union of its constituents; a single snapshot is the
//! degenerate group with `start == end`.

mod metrics;
mod ops;

pub use metrics::{eigenvector_centrality, node_metric_series, pagerank, MetricKind};
pub use ops::{
    diff, ego_network, union_graphs, union_group, AggregationPolicy, EgoLevel, GraphDiff,
};
pub use ops::ego_graph;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Key of the mandatory link attribute holding the link weight.
pub const WEIGHT: &str = "weight";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("attribute `{name}` has negative or non-finite value {value}")]
    InvalidAttribute { name: String, value: f64 },
    #[error("attribute names must be non-empty")]
    EmptyAttributeName,
    #[error("node ids must be non-empty")]
    EmptyNodeId,
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("duplicate link {0}")]
    DuplicateLink(LinkKey),
    #[error("link {link} references undeclared node `{node}`")]
    MissingEndpoint { link: LinkKey, node: String },
    #[error("link {0} needs a positive `weight` attribute")]
    MissingWeight(LinkKey),
    #[error("spans {left} and {right} are not adjacent")]
    NonAdjacentSpans { left: Span, right: Span },
    #[error("node `{0}` is not present at any time")]
    UnknownNode(String),
    #[error("dynamic graph has no snapshots")]
    Empty,
}

/// Non-negative attribute values keyed by name. An absent name reads as 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, f64>", into = "BTreeMap<String, f64>")]
pub struct AttributeVector(BTreeMap<String, f64>);

impl AttributeVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn weighted(weight: f64) -> Result<Self, GraphError> {
        let mut v = Self::new();
        v.set(WEIGHT, weight)?;
        Ok(v)
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) -> Result<(), GraphError> {
        let name = name.into();
        if name.is_empty() {
            return Err(GraphError::EmptyAttributeName);
        }
        if !value.is_finite() || value < 0.0 {
            return Err(GraphError::InvalidAttribute { name, value });
        }
        self.0.insert(name, value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when no entry is positive, i.e. the vector equals the zero vector.
    pub fn is_zero(&self) -> bool {
        self.0.values().all(|v| *v == 0.0)
    }

    /// Multiply every value by `factor` (which must be non-negative).
    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|(k, v)| (k.clone(), v * factor)).collect())
    }

    pub(crate) fn map_values(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let keys: BTreeSet<&String> = self.0.keys().chain(other.0.keys()).collect();
        Self(
            keys.into_iter()
                .map(|k| (k.clone(), f(self.get(k), other.get(k))))
                .collect(),
        )
    }
}

impl TryFrom<BTreeMap<String, f64>> for AttributeVector {
    type Error = GraphError;

    fn try_from(map: BTreeMap<String, f64>) -> Result<Self, Self::Error> {
        let mut v = Self::new();
        for (k, x) in map {
            v.set(k, x)?;
        }
        Ok(v)
    }
}

impl From<AttributeVector> for BTreeMap<String, f64> {
    fn from(v: AttributeVector) -> Self {
        v.0
    }
}

impl<K: Into<String>, const N: usize> TryFrom<[(K, f64); N]> for AttributeVector {
    type Error = GraphError;

    fn try_from(entries: [(K, f64); N]) -> Result<Self, Self::Error> {
        let mut v = Self::new();
        for (k, x) in entries {
            v.set(k, x)?;
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    #[serde(default, skip_serializing_if = "AttributeVector::is_empty")]
    pub attrs: AttributeVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display_name: Option<String>,
    /// Categorical attributes (e.g. affiliation). They never enter distances;
    /// community detection can group by them.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub categories: BTreeMap<String, String>,
}

impl Node {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            attrs: AttributeVector::new(),
            display_name: None,
            categories: BTreeMap::new(),
        }
    }

    pub fn with_attrs(mut self, attrs: AttributeVector) -> Self {
        self.attrs = attrs;
        self
    }

    pub fn with_category(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.categories.insert(key.into(), value.into());
        self
    }

    pub fn label(&self) -> &str {
        self.display_name.as_deref().unwrap_or(&self.id)
    }
}

/// Identity of a link. Undirected keys store their endpoints sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkKey {
    pub source: String,
    pub target: String,
}

impl LinkKey {
    pub fn new(source: impl Into<String>, target: impl Into<String>, directed: bool) -> Self {
        let (source, target) = (source.into(), target.into());
        if !directed && target < source {
            Self { source: target, target: source }
        } else {
            Self { source, target }
        }
    }

    pub fn touches(&self, node: &str) -> bool {
        self.source == node || self.target == node
    }

    /// The endpoint opposite `node`, if `node` is an endpoint.
    pub fn other(&self, node: &str) -> Option<&str> {
        if self.source == node {
            Some(&self.target)
        } else if self.target == node {
            Some(&self.source)
        } else {
            None
        }
    }
}

impl fmt::Display for LinkKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.source, self.target)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub source: String,
    pub target: String,
    pub directed: bool,
    pub attrs: AttributeVector,
}

impl Link {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        directed: bool,
        weight: f64,
    ) -> Result<Self, GraphError> {
        Ok(Self {
            source: source.into(),
            target: target.into(),
            directed,
            attrs: AttributeVector::weighted(weight)?,
        })
    }

    pub fn key(&self) -> LinkKey {
        LinkKey::new(&self.source, &self.target, self.directed)
    }

    pub fn weight(&self) -> f64 {
        self.attrs.get(WEIGHT)
    }
}

/// Element of a graph addressed by label: a node id or a link key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementKey {
    Node(String),
    Link(LinkKey),
}

impl fmt::Display for ElementKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementKey::Node(id) => f.write_str(id),
            ElementKey::Link(k) => k.fmt(f),
        }
    }
}

/// Node and link sets of one (possibly aggregated) graph.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Graph {
    pub directed: bool,
    nodes: BTreeMap<String, Node>,
    links: BTreeMap<LinkKey, Link>,
}

impl Graph {
    pub fn new(directed: bool) -> Self {
        Self {
            directed,
            ..Self::default()
        }
    }

    pub fn add_node(&mut self, node: Node) -> Result<(), GraphError> {
        if node.id.is_empty() {
            return Err(GraphError::EmptyNodeId);
        }
        if self.nodes.contains_key(&node.id) {
            return Err(GraphError::DuplicateNode(node.id));
        }
        self.nodes.insert(node.id.clone(), node);
        Ok(())
    }

    /// Add a link; both endpoints must already be present.
    pub fn add_link(&mut self, mut link: Link) -> Result<(), GraphError> {
        link.directed = self.directed;
        let key = link.key();
        for end in [&key.source, &key.target] {
            if !self.nodes.contains_key(end) {
                return Err(GraphError::MissingEndpoint {
                    link: key.clone(),
                    node: end.clone(),
                });
            }
        }
        if link.weight() <= 0.0 {
            return Err(GraphError::MissingWeight(key));
        }
        if self.links.contains_key(&key) {
            return Err(GraphError::DuplicateLink(key));
        }
        self.links.insert(key, link);
        Ok(())
    }

    /// Convenience builder used by fixtures: adds missing endpoints on the fly.
    pub fn connect(&mut self, a: &str, b: &str, weight: f64) -> Result<(), GraphError> {
        for id in [a, b] {
            if !self.nodes.contains_key(id) {
                self.add_node(Node::new(id))?;
            }
        }
        self.add_link(Link::new(a, b, self.directed, weight)?)
    }

    pub(crate) fn insert_node_unchecked(&mut self, node: Node) {
        self.nodes.insert(node.id.clone(), node);
    }

    pub(crate) fn insert_link_unchecked(&mut self, link: Link) {
        self.links.insert(link.key(), link);
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn link(&self, key: &LinkKey) -> Option<&Link> {
        self.links.get(key)
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    /// Links in ascending key order.
    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.values()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    pub fn link_keys(&self) -> impl Iterator<Item = &LinkKey> {
        self.links.keys()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Links incident to `id`, in key order.
    pub fn incident(&self, id: &str) -> impl Iterator<Item = &Link> + '_ {
        let id = id.to_owned();
        self.links.values().filter(move |l| l.key().touches(&id))
    }

    /// Neighbours of `id` regardless of link direction.
    pub fn neighbors(&self, id: &str) -> BTreeSet<&str> {
        self.links
            .keys()
            .filter_map(|k| k.other(id))
            .filter(|other| *other != id)
            .collect()
    }

    /// Sum of weights of links incident to `id`.
    pub fn total_link_weight(&self, id: &str) -> f64 {
        self.incident(id).map(Link::weight).sum()
    }

    /// Attribute vector of a node or link, if present.
    pub fn attrs(&self, key: &ElementKey) -> Option<&AttributeVector> {
        match key {
            ElementKey::Node(id) => self.nodes.get(id).map(|n| &n.attrs),
            ElementKey::Link(k) => self.links.get(k).map(|l| &l.attrs),
        }
    }

    /// Every element (nodes first, then links) in a stable order.
    pub fn elements(&self) -> impl Iterator<Item = ElementKey> + '_ {
        self.nodes
            .keys()
            .cloned()
            .map(ElementKey::Node)
            .chain(self.links.keys().cloned().map(ElementKey::Link))
    }

    /// Subgraph induced by the given node set.
    pub fn induced(&self, keep: &BTreeSet<String>) -> Graph {
        let mut g = Graph::new(self.directed);
        for n in self.nodes.values().filter(|n| keep.contains(&n.id)) {
            g.insert_node_unchecked(n.clone());
        }
        for l in self.links.values() {
            let k = l.key();
            if keep.contains(&k.source) && keep.contains(&k.target) {
                g.insert_link_unchecked(l.clone());
            }
        }
        g
    }

    /// Same topology with every link weight multiplied by `factor`.
    pub fn scale_weights(&self, factor: f64) -> Graph {
        let mut g = self.clone();
        for l in g.links.values_mut() {
            let w = l.weight() * factor;
            l.attrs.set(WEIGHT, w).expect("scaled weight stays non-negative");
        }
        g
    }
}

/// Inclusive interval of time indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn point(t: usize) -> Self {
        Self { start: t, end: t }
    }

    /// Number of time points covered.
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: usize) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn times(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// State of the dynamic graph at one time index.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: usize,
    pub label: String,
    pub graph: Graph,
}

/// Contiguous run of snapshots treated as one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotGroup {
    pub span: Span,
    pub graph: Graph,
}

impl SnapshotGroup {
    pub fn new(span: Span, graph: Graph) -> Self {
        Self { span, graph }
    }

    pub fn empty(span: Span, directed: bool) -> Self {
        Self {
            span,
            graph: Graph::new(directed),
        }
    }
}

impl From<&Snapshot> for SnapshotGroup {
    fn from(s: &Snapshot) -> Self {
        Self {
            span: Span::point(s.time),
            graph: s.graph.clone(),
        }
    }
}

/// Ordered sequence of snapshots at time indices `0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicGraph {
    pub name: Option<String>,
    directed: bool,
    snapshots: Vec<Snapshot>,
}

impl DynamicGraph {
    /// Build from graphs in time order. Time indices are assigned densely.
    pub fn new(
        directed: bool,
        snapshots: impl IntoIterator<Item = (String, Graph)>,
    ) -> Result<Self, GraphError> {
        let snapshots: Vec<Snapshot> = snapshots
            .into_iter()
            .enumerate()
            .map(|(time, (label, mut graph))| {
                graph.directed = directed;
                Snapshot { time, label, graph }
            })
            .collect();
        if snapshots.is_empty() {
            return Err(GraphError::Empty);
        }
        Ok(Self {
            name: None,
            directed,
            snapshots,
        })
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn snapshot(&self, t: usize) -> Option<&Snapshot> {
        self.snapshots.get(t)
    }

    /// Number of snapshots, `T + 1`.
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Index of the last snapshot, `T`.
    pub fn last_time(&self) -> usize {
        self.snapshots.len() - 1
    }

    pub fn full_span(&self) -> Span {
        Span::new(0, self.last_time())
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.snapshots.iter().map(|s| s.label.as_str())
    }

    pub fn time_of_label(&self, label: &str) -> Option<usize> {
        self.snapshots.iter().position(|s| s.label == label)
    }

    /// "2006" for a point span, "2006–2011" otherwise.
    pub fn span_label(&self, span: Span) -> String {
        let a = &self.snapshots[span.start].label;
        if span.start == span.end {
            a.clone()
        } else {
            format!("{a}\u{2013}{}", self.snapshots[span.end].label)
        }
    }

    /// Every node id that appears at any time, ascending.
    pub fn all_node_ids(&self) -> BTreeSet<&str> {
        self.snapshots
            .iter()
            .flat_map(|s| s.graph.node_ids())
            .collect()
    }
}

/// The three-snapshot fixture used across the docs and tests:
/// `t0{A,B;(A,B,1)}`, `t1{A,B,C;(A,B,2),(A,C,1)}`, `t2{A,C;(A,C,1)}`.
pub fn tri_fixture() -> DynamicGraph {
    let mut t0 = Graph::new(false);
    t0.connect("A", "B", 1.0).unwrap();
    let mut t1 = Graph::new(false);
    t1.connect("A", "B", 2.0).unwrap();
    t1.connect("A", "C", 1.0).unwrap();
    let mut t2 = Graph::new(false);
    t2.connect("A", "C", 1.0).unwrap();
    DynamicGraph::new(
        false,
        [("0".to_string(), t0), ("1".to_string(), t1), ("2".to_string(), t2)],
    )
    .unwrap()
}
