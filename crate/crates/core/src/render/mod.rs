//! Comic template data model, styling, validation and SVG output.

pub mod hull;
mod svg;

pub use svg::{node_radius, render, render_community_hull};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::Span;
use crate::layout::{LayoutMode, PanelLayout, Viewport};
use crate::narrative::Caption;

pub const SCHEMA: &str = "dgcomic/1";

/// Diverging palette handed out to main characters in rank order.
pub const DIVERGING_PALETTE: [&str; 8] = [
    "#b2182b", "#2166ac", "#d6604d", "#4393c3", "#f4a582", "#92c5de", "#8c510a", "#01665e",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Change {
    Added,
    Deleted,
    Preserved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Main,
    Supporter,
    Default,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleStyle {
    pub fill: String,
    pub stroke: String,
    pub stroke_width: f64,
    pub label: bool,
}

/// Per-node override applied on top of the role style.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StyleOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fill: Option<String>,
    /// Radius multiplier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opacity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StyleSpec {
    pub palette: Vec<String>,
    pub main: RoleStyle,
    pub supporter: RoleStyle,
    pub default: RoleStyle,
    pub link_color: String,
    pub glow_color: String,
    pub glow_blur: f64,
    pub dash: String,
    pub font_family: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, StyleOverride>,
}

impl Default for StyleSpec {
    fn default() -> Self {
        Self {
            palette: DIVERGING_PALETTE.iter().map(|c| c.to_string()).collect(),
            main: RoleStyle {
                fill: "#b2182b".into(),
                stroke: "#111111".into(),
                stroke_width: 3.0,
                label: true,
            },
            supporter: RoleStyle {
                fill: "#f1a340".into(),
                stroke: "#333333".into(),
                stroke_width: 1.5,
                label: true,
            },
            default: RoleStyle {
                fill: "#bdbdbd".into(),
                stroke: "#555555".into(),
                stroke_width: 1.0,
                label: false,
            },
            link_color: "#7a7a7a".into(),
            glow_color: "#39ff14".into(),
            glow_blur: 2.5,
            dash: "4 3".into(),
            font_family: "sans-serif".into(),
            overrides: BTreeMap::new(),
        }
    }
}

impl StyleSpec {
    /// Fill colour of the `rank`-th main character.
    pub fn main_color(&self, rank: usize) -> &str {
        if self.palette.is_empty() {
            &self.main.fill
        } else {
            &self.palette[rank % self.palette.len()]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelNode {
    pub id: String,
    pub label: String,
    pub x: f64,
    pub y: f64,
    /// Total link weight in the panel graph; drives the radius.
    pub weight: f64,
    pub status: Change,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelLink {
    pub source: String,
    pub target: String,
    pub weight: f64,
    pub status: Change,
}

/// Community overlay drawn behind its members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HullOverlay {
    pub community: String,
    pub color: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Panel {
    pub span: Span,
    pub label: String,
    /// Earlier and later child spans for panels that show a change.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<[Span; 2]>,
    pub layout: PanelLayout,
    /// Main characters in rank order.
    pub mains: Vec<String>,
    pub highlighted: Vec<String>,
    pub nodes: Vec<PanelNode>,
    pub links: Vec<PanelLink>,
    pub caption: Caption,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hulls: Vec<HullOverlay>,
}

impl Panel {
    pub fn role_of(&self, id: &str) -> Role {
        if self.mains.iter().any(|m| m == id) {
            Role::Main
        } else if self.highlighted.iter().any(|h| h == id) {
            Role::Supporter
        } else {
            Role::Default
        }
    }

    pub fn node(&self, id: &str) -> Option<&PanelNode> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComicTemplate {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub width: f64,
    pub height: f64,
    pub layout_mode: LayoutMode,
    pub viewport: Viewport,
    pub style: StyleSpec,
    pub panels: Vec<Panel>,
}

/// One problem found by [`ComicTemplate::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemplateIssue {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panel: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    pub message: String,
}

impl fmt::Display for TemplateIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.panel {
            write!(f, "panels[{p}]")?;
            if let Some(e) = &self.element {
                write!(f, ".{e}")?;
            }
            f.write_str(": ")?;
        } else if let Some(e) = &self.element {
            write!(f, "{e}: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid comic template: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidTemplate(pub Vec<TemplateIssue>);

impl ComicTemplate {
    /// Pretty JSON with a trailing newline; the exchange format of templates.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("template serialises");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<(), InvalidTemplate> {
        let mut issues = Vec::new();
        let mut top = |element: &str, message: String| {
            issues.push(TemplateIssue {
                panel: None,
                element: Some(element.to_owned()),
                message,
            })
        };
        if self.schema != SCHEMA {
            top("schema", format!("expected `{SCHEMA}`, found `{}`", self.schema));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            top("width", format!("canvas must be positive, found {}x{}", self.width, self.height));
        }
        if self.panels.is_empty() {
            top("panels", "at least one panel is required".into());
        }
        for (i, p) in self.panels.iter().enumerate() {
            let mut issue = |element: String, message: String| {
                issues.push(TemplateIssue {
                    panel: Some(i),
                    element: Some(element),
                    message,
                })
            };
            if i > 0 && self.panels[i - 1].span.end >= p.span.start {
                issue("span".into(), format!("{} is not after the previous panel", p.span));
            }
            let l = &p.layout;
            if !(l.width > 0.0 && l.height > 0.0 && l.x >= 0.0 && l.y >= 0.0)
                || l.right() > self.width + 1e-6
                || l.bottom() > self.height + 1e-6
            {
                issue("layout".into(), "panel rectangle lies outside the canvas".into());
            }
            let mut ids = BTreeSet::new();
            for n in &p.nodes {
                if !ids.insert(n.id.as_str()) {
                    issue(format!("nodes[{}]", n.id), "duplicate node".into());
                }
                if !(n.x.is_finite() && n.y.is_finite() && n.weight.is_finite() && n.weight >= 0.0) {
                    issue(format!("nodes[{}]", n.id), "non-finite position or weight".into());
                }
            }
            for (k, link) in p.links.iter().enumerate() {
                for end in [&link.source, &link.target] {
                    if !ids.contains(end.as_str()) {
                        issue(format!("links[{k}]"), format!("endpoint `{end}` is not a panel node"));
                    }
                }
                if !(link.weight.is_finite() && link.weight >= 0.0) {
                    issue(format!("links[{k}]"), "weight must be finite and non-negative".into());
                }
            }
            for m in p.mains.iter().chain(&p.highlighted) {
                if !ids.contains(m.as_str()) {
                    issue(format!("characters[{m}]"), "character is not a panel node".into());
                }
            }
            for (k, h) in p.hulls.iter().enumerate() {
                for m in &h.members {
                    if !ids.contains(m.as_str()) {
                        issue(format!("hulls[{k}]"), format!("member `{m}` is not a panel node"));
                    }
                }
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(InvalidTemplate(issues))
        }
    }
}
