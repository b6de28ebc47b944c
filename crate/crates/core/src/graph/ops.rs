use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AttributeVector, ElementKey, Graph, GraphError, LinkKey, Node, SnapshotGroup, Span};

/// How attributes of an element present in both operands of a union combine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregationPolicy {
    /// Per-key sum.
    #[default]
    Sum,
    /// Per-key maximum.
    Max,
    /// The later operand's vector wins.
    Last,
}

impl AggregationPolicy {
    fn combine(self, earlier: &AttributeVector, later: &AttributeVector) -> AttributeVector {
        match self {
            AggregationPolicy::Sum => earlier.map_values(later, |a, b| a + b),
            AggregationPolicy::Max => earlier.map_values(later, f64::max),
            AggregationPolicy::Last => later.clone(),
        }
    }
}

impl FromStr for AggregationPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(Self::Sum),
            "max" => Ok(Self::Max),
            "last" => Ok(Self::Last),
            other => Err(format!("unknown aggregation policy `{other}`")),
        }
    }
}

/// Union of two graphs; `later` wins ties under [`AggregationPolicy::Last`].
pub fn union_graphs(earlier: &Graph, later: &Graph, agg: AggregationPolicy) -> Graph {
    let mut out = Graph::new(earlier.directed || later.directed);
    for n in earlier.nodes() {
        match later.node(&n.id) {
            Some(m) => {
                let mut merged = n.clone();
                merged.attrs = agg.combine(&n.attrs, &m.attrs);
                if merged.display_name.is_none() {
                    merged.display_name = m.display_name.clone();
                }
                for (k, v) in &m.categories {
                    merged.categories.insert(k.clone(), v.clone());
                }
                out.insert_node_unchecked(merged);
            }
            None => out.insert_node_unchecked(n.clone()),
        }
    }
    for m in later.nodes().filter(|m| !earlier.contains_node(&m.id)) {
        out.insert_node_unchecked(m.clone());
    }
    for l in earlier.links() {
        match later.link(&l.key()) {
            Some(r) => {
                let mut merged = l.clone();
                merged.attrs = agg.combine(&l.attrs, &r.attrs);
                out.insert_link_unchecked(merged);
            }
            None => out.insert_link_unchecked(l.clone()),
        }
    }
    for r in later.links().filter(|r| earlier.link(&r.key()).is_none()) {
        out.insert_link_unchecked(r.clone());
    }
    out
}

/// Merge two temporally adjacent groups (in either argument order).
pub fn union_group(
    a: &SnapshotGroup,
    b: &SnapshotGroup,
    agg: AggregationPolicy,
) -> Result<SnapshotGroup, GraphError> {
    let (earlier, later) = if a.span.end + 1 == b.span.start {
        (a, b)
    } else if b.span.end + 1 == a.span.start {
        (b, a)
    } else {
        return Err(GraphError::NonAdjacentSpans {
            left: a.span,
            right: b.span,
        });
    };
    Ok(SnapshotGroup {
        span: Span::new(earlier.span.start, later.span.end),
        graph: union_graphs(&earlier.graph, &later.graph, agg),
    })
}

/// Set difference between two graphs keyed by labels.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GraphDiff {
    pub added_nodes: BTreeSet<String>,
    pub deleted_nodes: BTreeSet<String>,
    pub preserved_nodes: BTreeSet<String>,
    pub added_links: BTreeSet<LinkKey>,
    pub deleted_links: BTreeSet<LinkKey>,
    pub preserved_links: BTreeSet<LinkKey>,
    #[serde(skip)]
    pub attr_changes: BTreeMap<ElementKey, (AttributeVector, AttributeVector)>,
}

impl GraphDiff {
    pub fn is_unchanged(&self) -> bool {
        self.added_nodes.is_empty()
            && self.deleted_nodes.is_empty()
            && self.added_links.is_empty()
            && self.deleted_links.is_empty()
            && self.attr_changes.is_empty()
    }
}

/// `added = after ∖ before`, `deleted = before ∖ after`, `preserved = before ∩ after`.
pub fn diff(before: &Graph, after: &Graph) -> GraphDiff {
    let mut d = GraphDiff::default();
    for id in before.node_ids() {
        match after.node(id) {
            Some(n) => {
                d.preserved_nodes.insert(id.to_owned());
                let prev = &before.node(id).unwrap().attrs;
                if prev != &n.attrs {
                    d.attr_changes.insert(
                        ElementKey::Node(id.to_owned()),
                        (prev.clone(), n.attrs.clone()),
                    );
                }
            }
            None => {
                d.deleted_nodes.insert(id.to_owned());
            }
        }
    }
    d.added_nodes = after
        .node_ids()
        .filter(|id| !before.contains_node(id))
        .map(str::to_owned)
        .collect();
    for l in before.links() {
        let key = l.key();
        match after.link(&key) {
            Some(r) => {
                if l.attrs != r.attrs {
                    d.attr_changes.insert(
                        ElementKey::Link(key.clone()),
                        (l.attrs.clone(), r.attrs.clone()),
                    );
                }
                d.preserved_links.insert(key);
            }
            None => {
                d.deleted_links.insert(key);
            }
        }
    }
    d.added_links = after
        .link_keys()
        .filter(|k| before.link(k).is_none())
        .cloned()
        .collect();
    d
}

/// Ego-network radius: 1.0 keeps ego–alter ties, 1.5 adds alter–alter ties.
/// Serialised as the number `1.0` or `1.5`; strings are accepted too.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum EgoLevel {
    One,
    #[default]
    OneAndHalf,
}

impl Serialize for EgoLevel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(match self {
            EgoLevel::One => 1.0,
            EgoLevel::OneAndHalf => 1.5,
        })
    }
}

impl<'de> Deserialize<'de> for EgoLevel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(1.0) => Ok(EgoLevel::One),
            Raw::Number(1.5) => Ok(EgoLevel::OneAndHalf),
            Raw::Number(v) => Err(serde::de::Error::custom(format!("ego level must be 1.0 or 1.5, got {v}"))),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl FromStr for EgoLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "1.0" => Ok(EgoLevel::One),
            "1.5" => Ok(EgoLevel::OneAndHalf),
            other => Err(format!("ego level must be 1.0 or 1.5, got `{other}`")),
        }
    }
}

impl fmt::Display for EgoLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EgoLevel::One => "1.0",
            EgoLevel::OneAndHalf => "1.5",
        })
    }
}

/// Union of the ego networks of every id in `egos` that is present in `g`.
pub fn ego_network<'a, I>(g: &SnapshotGroup, egos: I, level: EgoLevel) -> SnapshotGroup
where
    I: IntoIterator<Item = &'a str>,
{
    SnapshotGroup {
        span: g.span,
        graph: ego_graph(&g.graph, egos, level),
    }
}

/// Ego network of plain graph `g`; see [`ego_network`].
pub fn ego_graph<'a, I>(g: &Graph, egos: I, level: EgoLevel) -> Graph
where
    I: IntoIterator<Item = &'a str>,
{
    let mut out = Graph::new(g.directed);
    let mut keep: BTreeSet<&str> = BTreeSet::new();
    let mut links: BTreeSet<&LinkKey> = BTreeSet::new();
    for ego in egos {
        if !g.contains_node(ego) {
            continue;
        }
        let alters = g.neighbors(ego);
        keep.insert(ego);
        keep.extend(alters.iter().copied());
        for key in g.link_keys() {
            let ego_tie = key.touches(ego);
            let alter_tie = level == EgoLevel::OneAndHalf
                && alters.contains(key.source.as_str())
                && alters.contains(key.target.as_str());
            if ego_tie || alter_tie {
                links.insert(key);
            }
        }
    }
    for id in keep {
        out.insert_node_unchecked(g.node(id).cloned().unwrap_or_else(|| Node::new(id)));
    }
    for key in links {
        out.insert_link_unchecked(g.link(key).unwrap().clone());
    }
    out
}
