use std::fmt::Write;

use super::hull::{padded_hull, HULL_PADDING};
use super::{Change, ComicTemplate, InvalidTemplate, Panel, Role, RoleStyle};

const HEADER: f64 = 20.0;
const LINE: f64 = 14.0;
const PAD: f64 = 6.0;

/// `4 + 3·√(w / max)` clamped to `[4, 16]`.
pub fn node_radius(weight: f64, max_weight: f64) -> f64 {
    let r = if max_weight > 0.0 {
        4.0 + 3.0 * (weight / max_weight).max(0.0).sqrt()
    } else {
        4.0
    };
    r.clamp(4.0, 16.0)
}

/// Short fixed-precision number: two decimals, trailing zeros trimmed.
fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Translucent padded hull around the given member positions, or `None`
/// for an empty member list.
pub fn render_community_hull(points: &[(f64, f64)], color: &str) -> Option<String> {
    match points {
        [] => None,
        [p] => Some(format!(
            r#"<circle class="hull" cx="{}" cy="{}" r="{}" fill="{}" fill-opacity="0.18" stroke="{}" stroke-opacity="0.5"/>"#,
            num(p.0),
            num(p.1),
            num(HULL_PADDING),
            esc(color),
            esc(color)
        )),
        _ => {
            let poly = padded_hull(points, HULL_PADDING);
            let mut d = String::new();
            for (i, p) in poly.iter().enumerate() {
                let _ = write!(d, "{}{},{}", if i == 0 { "M" } else { " L" }, num(p.0), num(p.1));
            }
            d.push_str(" Z");
            Some(format!(
                r#"<path class="hull" d="{d}" fill="{}" fill-opacity="0.18" stroke="{}" stroke-opacity="0.5" stroke-linejoin="round"/>"#,
                esc(color),
                esc(color)
            ))
        }
    }
}

/// Approximate advance of one caption character at font size 11.
const CHAR_WIDTH: f64 = 6.0;

/// Caption lines greedily wrapped to the panel width.
fn caption_lines(p: &Panel) -> Vec<String> {
    let max = (((p.layout.width - 2.0 * PAD) / CHAR_WIDTH).floor() as usize).max(8);
    let mut out = Vec::new();
    for line in p.caption.text.lines().filter(|l| !l.trim().is_empty()) {
        let mut cur = String::new();
        for word in line.split_whitespace() {
            if !cur.is_empty() && cur.chars().count() + 1 + word.chars().count() > max {
                out.push(std::mem::take(&mut cur));
            }
            if !cur.is_empty() {
                cur.push(' ');
            }
            cur.push_str(word);
        }
        out.push(cur);
    }
    out
}

/// Serialise a validated template to an SVG 1.1 document.
pub fn render(t: &ComicTemplate) -> Result<String, InvalidTemplate> {
    t.validate()?;
    let s = &t.style;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="{f}">"#,
        w = num(t.width),
        h = num(t.height),
        f = esc(&s.font_family)
    );
    if let Some(title) = &t.title {
        let _ = writeln!(out, "<title>{}</title>", esc(title));
    }
    let _ = writeln!(
        out,
        r#"<defs><filter id="glow" x="-50%" y="-50%" width="200%" height="200%"><feGaussianBlur in="SourceGraphic" stdDeviation="{}" result="blur"/><feFlood flood-color="{}" result="tint"/><feComposite in="tint" in2="blur" operator="in" result="neon"/><feMerge><feMergeNode in="neon"/><feMergeNode in="SourceGraphic"/></feMerge></filter></defs>"#,
        num(s.glow_blur),
        esc(&s.glow_color)
    );
    let _ = writeln!(
        out,
        r##"<rect class="background" x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##,
        num(t.width),
        num(t.height)
    );
    for (i, p) in t.panels.iter().enumerate() {
        render_panel(&mut out, t, i, p);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_panel(out: &mut String, t: &ComicTemplate, index: usize, p: &Panel) {
    let s = &t.style;
    let l = &p.layout;
    let lines = caption_lines(p);
    let caption_h = if lines.is_empty() { 0.0 } else { lines.len() as f64 * LINE + PAD };
    let _ = writeln!(out, r#"<g class="panel" id="panel-{index}">"#);
    let _ = writeln!(
        out,
        r##"<rect class="border" x="{}" y="{}" width="{}" height="{}" fill="#ffffff" stroke="#222222" stroke-width="2"/>"##,
        num(l.x),
        num(l.y),
        num(l.width),
        num(l.height)
    );
    let _ = writeln!(
        out,
        r#"<text class="timespan" x="{}" y="{}" font-size="12" font-weight="bold">{}</text>"#,
        num(l.x + PAD),
        num(l.y + HEADER - PAD),
        esc(&p.label)
    );

    // fit the graph viewport into the space between header and caption;
    // positions are mapped, radii and strokes keep their size
    let v = &t.viewport;
    let (aw, ah) = (l.width - 2.0 * PAD, l.height - HEADER - caption_h - PAD);
    let scale = (aw / v.width).min(ah / v.height).max(0.01);
    let tx = l.x + PAD + (aw - v.width * scale) / 2.0;
    let ty = l.y + HEADER + (ah - v.height * scale).max(0.0) / 2.0;
    let at = |x: f64, y: f64| (tx + x * scale, ty + y * scale);
    out.push_str("<g class=\"graph\">\n");

    if !p.hulls.is_empty() {
        out.push_str("<g class=\"hulls\">\n");
        for h in &p.hulls {
            let pts: Vec<(f64, f64)> = h
                .members
                .iter()
                .filter_map(|m| p.node(m))
                .map(|n| at(n.x, n.y))
                .collect();
            if let Some(svg) = render_community_hull(&pts, &h.color) {
                let _ = writeln!(out, "{svg}");
            }
        }
        out.push_str("</g>\n");
    }

    let max_link = p.links.iter().map(|k| k.weight).fold(0.0, f64::max);
    out.push_str("<g class=\"links\">\n");
    for k in &p.links {
        let (Some(a), Some(b)) = (p.node(&k.source), p.node(&k.target)) else {
            continue;
        };
        let ((x1, y1), (x2, y2)) = (at(a.x, a.y), at(b.x, b.y));
        let width = if max_link > 0.0 { 1.0 + 3.0 * k.weight / max_link } else { 1.0 };
        let _ = write!(
            out,
            r#"<line class="link {}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="{}""#,
            status_class(k.status),
            num(x1),
            num(y1),
            num(x2),
            num(y2),
            esc(&s.link_color),
            num(width)
        );
        status_attrs(out, k.status, s);
        let _ = writeln!(out, "><title>{} \u{2013} {}</title></line>", esc(&k.source), esc(&k.target));
    }
    out.push_str("</g>\n");

    let max_node = p.nodes.iter().map(|n| n.weight).fold(0.0, f64::max);
    let mut labels = String::new();
    out.push_str("<g class=\"nodes\">\n");
    for n in &p.nodes {
        let role = p.role_of(&n.id);
        let base: &RoleStyle = match role {
            Role::Main => &s.main,
            Role::Supporter => &s.supporter,
            Role::Default => &s.default,
        };
        let mut fill = match role {
            Role::Main => s.main_color(p.mains.iter().position(|m| *m == n.id).unwrap_or(0)),
            _ => &base.fill,
        };
        let (cx, cy) = at(n.x, n.y);
        let mut r = node_radius(n.weight, max_node);
        let mut opacity = None;
        let mut label = base.label;
        if let Some(o) = s.overrides.get(&n.id) {
            if let Some(f) = &o.fill {
                fill = f;
            }
            if let Some(k) = o.size {
                r = (r * k).clamp(4.0, 16.0);
            }
            opacity = o.opacity;
            label = o.label.unwrap_or(label);
        }
        let _ = write!(
            out,
            r#"<circle class="node {} {}" cx="{}" cy="{}" r="{}" fill="{}" stroke="{}" stroke-width="{}""#,
            role_class(role),
            status_class(n.status),
            num(cx),
            num(cy),
            num(r),
            esc(fill),
            esc(&base.stroke),
            num(base.stroke_width)
        );
        if let Some(o) = opacity {
            let _ = write!(out, r#" opacity="{}""#, num(o));
        }
        status_attrs(out, n.status, s);
        let _ = writeln!(out, "><title>{}</title></circle>", esc(&n.id));
        if label {
            let _ = writeln!(
                labels,
                r#"<text class="label" x="{}" y="{}" font-size="10" text-anchor="middle">{}</text>"#,
                num(cx),
                num(cy - r - 2.0),
                esc(&n.label)
            );
        }
    }
    out.push_str("</g>\n");
    if !labels.is_empty() {
        let _ = write!(out, "<g class=\"labels\">\n{labels}</g>\n");
    }
    out.push_str("</g>\n");

    if !lines.is_empty() {
        let _ = write!(
            out,
            r#"<text class="caption" x="{}" y="{}" font-size="11">"#,
            num(l.x + PAD),
            num(l.bottom() - caption_h + LINE - 2.0)
        );
        for (k, line) in lines.iter().enumerate() {
            let dy = if k == 0 { "0".to_owned() } else { num(LINE) };
            let _ = write!(out, r#"<tspan x="{}" dy="{}">{}</tspan>"#, num(l.x + PAD), dy, esc(line));
        }
        out.push_str("</text>\n");
    }
    out.push_str("</g>\n");
}

fn role_class(r: Role) -> &'static str {
    match r {
        Role::Main => "main",
        Role::Supporter => "supporter",
        Role::Default => "default",
    }
}

fn status_class(c: Change) -> &'static str {
    match c {
        Change::Added => "added",
        Change::Deleted => "deleted",
        Change::Preserved => "preserved",
    }
}

fn status_attrs(out: &mut String, c: Change, s: &super::StyleSpec) {
    match c {
        Change::Added => out.push_str(r#" filter="url(#glow)""#),
        Change::Deleted => {
            let _ = write!(out, r#" stroke-dasharray="{}""#, esc(&s.dash));
        }
        Change::Preserved => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_scale() {
        assert_eq!(node_radius(0.0, 0.0), 4.0);
        assert_eq!(node_radius(4.0, 4.0), 7.0);
        assert_eq!(node_radius(1.0, 4.0), 5.5);
    }

    #[test]
    fn numbers() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(-0.001), "0");
        assert_eq!(num(2.345678), "2.35");
    }

    #[test]
    fn escapes() {
        assert_eq!(esc("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn hull_noop_without_members() {
        assert!(render_community_hull(&[], "#000").is_none());
        assert!(render_community_hull(&[(1.0, 1.0)], "#000").unwrap().starts_with("<circle"));
    }
}
