use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::graph::{diff, ego_graph, EgoLevel, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Summary {
    Expanded,
    Contracted,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeKind {
    Added,
    Deleted,
    Preserved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Obtained,
    Lost,
    Strengthened,
    Weakened,
    /// Same weight before and after.
    Maintained,
    /// Single-time-point panels only report the strongest tie.
    Strongest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorChange {
    pub kind: ChangeKind,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationClause {
    pub partner: String,
    pub relation: Relation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub before: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub after: Option<f64>,
}

/// Caption content for one main character.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptionClauses {
    pub main: String,
    /// Absent for single-time-point panels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub major_change: Option<MajorChange>,
    pub strongest_relation: Vec<RelationClause>,
}

/// Links incident to `main` with their weights, keyed by partner.
fn ties(g: &Graph, main: &str) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for l in g.incident(main) {
        let key = l.key();
        if let Some(other) = key.other(main) {
            *out.entry(other.to_owned()).or_insert(0.0) += l.weight();
        }
    }
    out
}

fn strongest(ties: &BTreeMap<String, f64>) -> Vec<(&String, f64)> {
    let max = ties.values().copied().fold(f64::NEG_INFINITY, f64::max);
    ties.iter().filter(|(_, w)| **w == max).map(|(p, w)| (p, *w)).collect()
}

/// Clauses for one main, given the main's ego networks before and after.
/// `before = None` marks a single-time-point panel.
pub fn caption_clauses(main: &str, before: Option<&Graph>, after: &Graph) -> CaptionClauses {
    let after_ties = ties(after, main);
    let Some(before) = before else {
        return CaptionClauses {
            main: main.to_owned(),
            summary: None,
            major_change: None,
            strongest_relation: strongest(&after_ties)
                .into_iter()
                .map(|(p, w)| RelationClause {
                    partner: p.clone(),
                    relation: Relation::Strongest,
                    before: None,
                    after: Some(w),
                })
                .collect(),
        };
    };

    let d = diff(before, after);
    let (added, deleted, preserved) = (
        d.added_nodes.len(),
        d.deleted_nodes.len(),
        d.preserved_nodes.len(),
    );
    let summary = match added.cmp(&deleted) {
        std::cmp::Ordering::Greater => Summary::Expanded,
        std::cmp::Ordering::Less => Summary::Contracted,
        std::cmp::Ordering::Equal => Summary::Constant,
    };
    // ties resolve added > deleted > preserved
    let mut major = MajorChange { kind: ChangeKind::Added, count: added };
    for (kind, count) in [(ChangeKind::Deleted, deleted), (ChangeKind::Preserved, preserved)] {
        if count > major.count {
            major = MajorChange { kind, count };
        }
    }

    let before_ties = ties(before, main);
    let mut relations: Vec<RelationClause> = strongest(&after_ties)
        .into_iter()
        .map(|(p, w)| {
            let prev = before_ties.get(p).copied();
            let relation = match prev {
                None => Relation::Obtained,
                Some(b) if w > b => Relation::Strengthened,
                Some(b) if w < b => Relation::Weakened,
                Some(_) => Relation::Maintained,
            };
            RelationClause {
                partner: p.clone(),
                relation,
                before: prev,
                after: Some(w),
            }
        })
        .collect();
    relations.extend(
        strongest(&before_ties)
            .into_iter()
            .filter(|(p, _)| !after_ties.contains_key(*p))
            .map(|(p, w)| RelationClause {
                partner: p.clone(),
                relation: Relation::Lost,
                before: Some(w),
                after: None,
            }),
    );

    CaptionClauses {
        main: main.to_owned(),
        summary: Some(summary),
        major_change: Some(major),
        strongest_relation: relations,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TemplateError {
    #[error("cannot read caption templates: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid caption templates: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("template `{template}` uses unknown slot `{{{slot}}}`")]
    UnknownSlot { template: &'static str, slot: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryVerbs {
    pub expanded: String,
    pub contracted: String,
    pub constant: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangeVerbs {
    pub added: String,
    pub deleted: String,
    pub preserved: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeWords {
    pub one: String,
    pub many: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationVerbs {
    pub obtained: String,
    pub lost: String,
    pub strengthened: String,
    pub weakened: String,
    pub maintained: String,
}

/// Localisable caption wording. See `templates/captions.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaptionTemplates {
    pub summary: String,
    pub major_change: String,
    pub relation: String,
    pub strongest: String,
    pub conjunction: String,
    pub summary_verbs: SummaryVerbs,
    pub change_verbs: ChangeVerbs,
    pub node_words: NodeWords,
    pub relation_verbs: RelationVerbs,
}

const DEFAULT_TEMPLATES: &str = include_str!("../../templates/captions.toml");

const SLOTS: &[&str] = &[
    "main",
    "span",
    "span_start",
    "span_end",
    "summary_verb",
    "change_verb",
    "count",
    "nodes",
    "relation_verb",
    "partner",
];

impl Default for CaptionTemplates {
    fn default() -> Self {
        Self::from_toml(DEFAULT_TEMPLATES).expect("bundled caption templates are valid")
    }
}

impl CaptionTemplates {
    pub fn from_toml(text: &str) -> Result<Self, TemplateError> {
        let t: Self = toml::from_str(text)?;
        for (name, template) in [
            ("summary", &t.summary),
            ("major_change", &t.major_change),
            ("relation", &t.relation),
            ("strongest", &t.strongest),
        ] {
            for slot in slots_of(template) {
                if !SLOTS.contains(&slot) {
                    return Err(TemplateError::UnknownSlot {
                        template: name,
                        slot: slot.to_owned(),
                    });
                }
            }
        }
        Ok(t)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, TemplateError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn join(&self, names: &[&str]) -> String {
        match names {
            [] => String::new(),
            [one] => (*one).to_owned(),
            [init @ .., last] => format!("{} {} {last}", init.join(", "), self.conjunction),
        }
    }
}

fn slots_of(template: &str) -> impl Iterator<Item = &str> {
    template.split('{').skip(1).filter_map(|s| s.split_once('}').map(|(slot, _)| slot))
}

fn fill(template: &str, slots: &[(&str, &str)]) -> String {
    let mut out = template.to_owned();
    for (name, value) in slots {
        out = out.replace(&format!("{{{name}}}"), value);
    }
    out
}

/// What a panel's caption is about.
#[derive(Debug, Clone)]
pub struct CaptionInput<'a> {
    pub mains: &'a [String],
    /// Earlier child; `None` for a single-time-point panel.
    pub before: Option<&'a Graph>,
    pub after: &'a Graph,
    pub level: EgoLevel,
    pub span_start: &'a str,
    pub span_end: &'a str,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Caption {
    pub clauses: Vec<CaptionClauses>,
    /// One line per clause.
    pub text: String,
}

/// Clauses per main (each restricted to the main's ego network) plus text.
pub fn generate_caption(input: &CaptionInput<'_>, templates: &CaptionTemplates) -> Caption {
    let clauses: Vec<CaptionClauses> = input
        .mains
        .iter()
        .map(|m| {
            let after = ego_graph(input.after, [m.as_str()], input.level);
            let before = input.before.map(|b| ego_graph(b, [m.as_str()], input.level));
            caption_clauses(m, before.as_ref(), &after)
        })
        .collect();
    // the text speaks of display names, the clauses keep ids
    let name = |id: &str| {
        input
            .after
            .node(id)
            .or_else(|| input.before.and_then(|b| b.node(id)))
            .map_or(id, |n| n.label())
            .to_owned()
    };
    let named: Vec<CaptionClauses> = clauses
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.main = name(&c.main);
            for r in &mut c.strongest_relation {
                r.partner = name(&r.partner);
            }
            c
        })
        .collect();
    let text = render_caption(&named, input.span_start, input.span_end, templates);
    Caption { clauses, text }
}

/// Group mains whose clause content is identical, keeping first-seen order.
fn group_by<'c, K: PartialEq>(
    clauses: &'c [CaptionClauses],
    key: impl Fn(&'c CaptionClauses) -> Option<K>,
) -> Vec<(K, Vec<&'c str>)> {
    let mut groups: Vec<(K, Vec<&str>)> = Vec::new();
    for c in clauses {
        let Some(k) = key(c) else { continue };
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, mains)) => mains.push(&c.main),
            None => groups.push((k, vec![&c.main])),
        }
    }
    groups
}

pub fn render_caption(
    clauses: &[CaptionClauses],
    span_start: &str,
    span_end: &str,
    t: &CaptionTemplates,
) -> String {
    let span = if span_start == span_end {
        span_start.to_owned()
    } else {
        format!("{span_start}\u{2013}{span_end}")
    };
    let mut lines = Vec::new();

    for (summary, mains) in group_by(clauses, |c| c.summary) {
        let verb = match summary {
            Summary::Expanded => &t.summary_verbs.expanded,
            Summary::Contracted => &t.summary_verbs.contracted,
            Summary::Constant => &t.summary_verbs.constant,
        };
        lines.push(fill(
            &t.summary,
            &[
                ("main", &t.join(&mains)),
                ("span", &span),
                ("span_start", span_start),
                ("span_end", span_end),
                ("summary_verb", verb),
            ],
        ));
    }

    for (major, mains) in group_by(clauses, |c| c.major_change) {
        let verb = match major.kind {
            ChangeKind::Added => &t.change_verbs.added,
            ChangeKind::Deleted => &t.change_verbs.deleted,
            ChangeKind::Preserved => &t.change_verbs.preserved,
        };
        let nodes = if major.count == 1 { &t.node_words.one } else { &t.node_words.many };
        lines.push(fill(
            &t.major_change,
            &[
                ("main", &t.join(&mains)),
                ("span", &span),
                ("change_verb", verb),
                ("count", &major.count.to_string()),
                ("nodes", nodes),
            ],
        ));
    }

    let relation_key = |c: &CaptionClauses| {
        (!c.strongest_relation.is_empty()).then(|| {
            c.strongest_relation
                .iter()
                .map(|r| (r.partner.clone(), r.relation))
                .collect::<Vec<_>>()
        })
    };
    for (relations, mains) in group_by(clauses, relation_key) {
        let subject = t.join(&mains);
        // one sentence per verb, partners joined
        let mut by_verb: Vec<(Relation, Vec<&str>)> = Vec::new();
        for (partner, relation) in &relations {
            match by_verb.iter_mut().find(|(r, _)| r == relation) {
                Some((_, ps)) => ps.push(partner),
                None => by_verb.push((*relation, vec![partner])),
            }
        }
        for (relation, partners) in by_verb {
            let partner = t.join(&partners);
            let line = match relation {
                Relation::Strongest => fill(
                    &t.strongest,
                    &[("main", &subject), ("span", &span), ("partner", &partner)],
                ),
                other => {
                    let verb = match other {
                        Relation::Obtained => &t.relation_verbs.obtained,
                        Relation::Lost => &t.relation_verbs.lost,
                        Relation::Strengthened => &t.relation_verbs.strengthened,
                        Relation::Weakened => &t.relation_verbs.weakened,
                        _ => &t.relation_verbs.maintained,
                    };
                    fill(
                        &t.relation,
                        &[
                            ("main", &subject),
                            ("span", &span),
                            ("relation_verb", verb),
                            ("partner", &partner),
                        ],
                    )
                }
            };
            lines.push(line);
        }
    }
    lines.join("\n")
}
