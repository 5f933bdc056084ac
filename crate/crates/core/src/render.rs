//! SVG and ANSI terminal output for laid-out diagrams.
//!
//! Every SVG element carries `data-path` (the slash-joined source path of
//! the node it belongs to) and `data-label` (the full identifier or class
//! name). Clients use these two attributes for hover inspection.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::{LayoutNode, NodeKind};
use crate::palette::{ansi256, parse_hex};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Full,
    /// Color blocks only, no text.
    Compact,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theme {
    #[default]
    Screen,
    Print,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    /// Pixels per layout unit.
    pub scale: f64,
    pub mode: Mode,
    pub theme: Theme,
    /// Text drawn under the extended area in full mode.
    pub legend: Option<String>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { scale: 28.0, mode: Mode::Full, theme: Theme::Screen, legend: None }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("scale must be positive")]
    BadScale,
    #[error("terminal too narrow: need {required} columns, have {available}")]
    WidthOverflow { required: usize, available: usize },
}

const LEGEND_HEIGHT: f64 = 0.6;
const LABEL_SIZE: f64 = 0.42;

struct Style {
    stroke: &'static str,
    stroke_width: f64,
    fill_opacity: Option<&'static str>,
    frame: &'static str,
    highlight: &'static str,
}

fn style(theme: Theme) -> Style {
    match theme {
        Theme::Screen => Style {
            stroke: "#FFFFFF",
            stroke_width: 0.03,
            fill_opacity: Some("0.92"),
            frame: "#5A5A5A",
            highlight: "#FF2D55",
        },
        Theme::Print => Style {
            stroke: "#1A1A1A",
            stroke_width: 0.04,
            fill_opacity: None,
            frame: "#000000",
            highlight: "#C00000",
        },
    }
}

fn num(v: f64) -> String {
    let s = format!("{:.2}", v);
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Readable text color on top of `fill`.
fn ink_for(fill: &str) -> &'static str {
    let (r, g, b) = parse_hex(fill).unwrap_or((0, 0, 0));
    let lum = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    if lum > 150.0 {
        "#000000"
    } else {
        "#FFFFFF"
    }
}

struct Svg<'a> {
    out: String,
    s: f64,
    o: &'a RenderOptions,
    st: Style,
}

impl Svg<'_> {
    fn c(&self, v: f64) -> String {
        num(v * self.s)
    }

    fn meta(&self, n: &LayoutNode, label: &str) -> String {
        format!(r#" data-path="{}" data-label="{}""#, n.source_path, escape(label))
    }

    fn notched(&self, n: &LayoutNode, notch: f64) -> String {
        let r = n.rect;
        let pts = [
            (r.x + notch, r.y),
            (r.right(), r.y),
            (r.right(), r.bottom()),
            (r.x, r.bottom()),
            (r.x, r.y + notch),
        ];
        pts.iter().map(|(x, y)| format!("{},{}", self.c(*x), self.c(*y))).collect::<Vec<_>>().join(" ")
    }

    fn fill_attrs(&self, fill: &str) -> String {
        let mut a = format!(r#" fill="{fill}" stroke="{}" stroke-width="{}""#, self.st.stroke, self.c(self.st.stroke_width));
        if let Some(op) = self.st.fill_opacity {
            let _ = write!(a, r#" fill-opacity="{op}""#);
        }
        a
    }

    fn node(&mut self, n: &LayoutNode) {
        let r = n.rect;
        let notch = 0.25_f64.min(r.width / 2.0).min(r.height / 2.0);
        match n.node_kind {
            NodeKind::Cell | NodeKind::ConstructorCell => {
                let fill = n.color.clone().unwrap_or_else(|| "#CCCCCC".into());
                let _ = writeln!(
                    self.out,
                    r#"<polygon class="{}" points="{}"{}{}/>"#,
                    if n.node_kind == NodeKind::Cell { "cell" } else { "constructor" },
                    self.notched(n, notch),
                    self.fill_attrs(&fill),
                    self.meta(n, &n.name)
                );
                if self.o.mode == Mode::Full && !n.label.is_empty() {
                    let ty = r.bottom() - 0.12;
                    let _ = writeln!(
                        self.out,
                        r#"<text class="label" x="{}" y="{}" font-family="monospace" font-size="{}" fill="{}"{}>{}</text>"#,
                        self.c(r.x + 0.08),
                        self.c(ty),
                        self.c(LABEL_SIZE),
                        ink_for(&fill),
                        self.meta(n, &n.name),
                        escape(&n.label)
                    );
                }
            }
            NodeKind::FunctionCell => {
                let _ = writeln!(
                    self.out,
                    r#"<rect class="function" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{}" stroke-width="{}"{}/>"#,
                    self.c(r.x),
                    self.c(r.y),
                    self.c(r.width),
                    self.c(r.height),
                    self.st.frame,
                    self.c(self.st.stroke_width),
                    self.meta(n, &n.name)
                );
                if let Some((ix, iy)) = n.indicator {
                    let mut d = String::new();
                    for k in 0..3 {
                        let x0 = ix - 0.27 + k as f64 * 0.18;
                        let _ = write!(
                            d,
                            "M{},{} L{},{} L{},{} ",
                            self.c(x0),
                            self.c(iy - 0.1),
                            self.c(x0 + 0.1),
                            self.c(iy),
                            self.c(x0),
                            self.c(iy + 0.1)
                        );
                    }
                    let _ = writeln!(
                        self.out,
                        r#"<path class="indicator" d="{}" fill="none" stroke="{}" stroke-width="{}"{}/>"#,
                        d.trim_end(),
                        self.st.frame,
                        self.c(0.05),
                        self.meta(n, &n.name)
                    );
                }
            }
            NodeKind::KindHole => {
                let _ = writeln!(
                    self.out,
                    r#"<rect class="kind-hole" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{}" stroke-width="{}" stroke-dasharray="{},{}"{}/>"#,
                    self.c(r.x + 0.04),
                    self.c(r.y + 0.04),
                    self.c(r.width - 0.08),
                    self.c(r.height - 0.08),
                    self.st.frame,
                    self.c(self.st.stroke_width),
                    self.c(0.08),
                    self.c(0.06),
                    self.meta(n, "kind hole")
                );
            }
        }
        for c in &n.children {
            self.node(c);
        }
    }

    fn badges(&mut self, n: &LayoutNode) {
        for b in &n.badges {
            let row_top = b.row_y;
            let meta = self.meta(n, &b.class_name);
            if b.qualified {
                let _ = writeln!(
                    self.out,
                    r#"<path class="band" d="M{},{} L{},{}" stroke="{}" stroke-width="{}"{}/>"#,
                    self.c(b.span.0),
                    self.c(row_top + 0.02),
                    self.c(b.span.0 + b.span.1),
                    self.c(row_top + 0.02),
                    b.color,
                    self.c(0.03),
                    meta
                );
            }
            let (x, y, sz) = (b.x, b.y, b.size);
            let fill = format!(r#" fill="{}""#, b.color);
            let el = match b.shape_index % 4 {
                0 => format!(
                    r#"<rect class="badge" x="{}" y="{}" width="{}" height="{}"{fill}{meta}/>"#,
                    self.c(x),
                    self.c(y),
                    self.c(sz),
                    self.c(sz)
                ),
                1 => {
                    let rad = sz / 2.0;
                    format!(
                        r#"<path class="badge" d="M{},{} A{},{} 0 1,0 {},{} A{},{} 0 1,0 {},{} Z"{fill}{meta}/>"#,
                        self.c(x),
                        self.c(y + rad),
                        self.c(rad),
                        self.c(rad),
                        self.c(x + sz),
                        self.c(y + rad),
                        self.c(rad),
                        self.c(rad),
                        self.c(x),
                        self.c(y + rad)
                    )
                }
                2 => format!(
                    r#"<polygon class="badge" points="{},{} {},{} {},{}"{fill}{meta}/>"#,
                    self.c(x + sz / 2.0),
                    self.c(y),
                    self.c(x + sz),
                    self.c(y + sz),
                    self.c(x),
                    self.c(y + sz)
                ),
                _ => format!(
                    r#"<polygon class="badge" points="{},{} {},{} {},{} {},{}"{fill}{meta}/>"#,
                    self.c(x + sz / 2.0),
                    self.c(y),
                    self.c(x + sz),
                    self.c(y + sz / 2.0),
                    self.c(x + sz / 2.0),
                    self.c(y + sz),
                    self.c(x),
                    self.c(y + sz / 2.0)
                ),
            };
            self.out.push_str(&el);
            self.out.push('\n');
        }
        for c in &n.children {
            self.badges(c);
        }
    }

    fn highlights(&mut self, n: &LayoutNode, parent_lit: bool) {
        if n.highlight && !parent_lit {
            let r = n.rect;
            let _ = writeln!(
                self.out,
                r#"<rect class="highlight" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{}" stroke-width="{}"{}/>"#,
                self.c(r.x),
                self.c(r.y),
                self.c(r.width),
                self.c(r.height),
                self.st.highlight,
                self.c(0.08),
                self.meta(n, &n.name)
            );
        }
        for c in &n.children {
            self.highlights(c, n.highlight || parent_lit);
        }
    }
}

/// Serializes a diagram as a standalone SVG document.
pub fn to_svg(n: &LayoutNode, o: &RenderOptions) -> String {
    let extended = n.extended_bottom();
    let legend = o.legend.as_ref().filter(|_| o.mode == Mode::Full);
    let height = extended + if legend.is_some() { LEGEND_HEIGHT } else { 0.0 };
    let mut svg = Svg { out: String::new(), s: o.scale, o, st: style(o.theme) };
    let (w, h) = (svg.c(n.rect.right()), svg.c(height));
    let _ = writeln!(
        svg.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    svg.node(n);
    svg.badges(n);
    svg.highlights(n, false);
    if let Some(text) = legend {
        let _ = writeln!(
            svg.out,
            r#"<text class="legend" x="0.00" y="{}" font-family="monospace" font-size="{}" fill="{}"{}>{}</text>"#,
            svg.c(extended + LEGEND_HEIGHT - 0.15),
            svg.c(LABEL_SIZE),
            svg.st.frame,
            svg.meta(n, text),
            escape(text)
        );
    }
    svg.out.push_str("</svg>\n");
    svg.out
}

pub fn try_to_svg(n: &LayoutNode, o: &RenderOptions) -> Result<String, RenderError> {
    if o.scale.is_nan() || o.scale <= 0.0 {
        return Err(RenderError::BadScale);
    }
    Ok(to_svg(n, o))
}

/// Terminal columns needed for `n` at two characters per layout unit.
pub fn ansi_columns(n: &LayoutNode) -> usize {
    (n.rect.right() * 2.0 - 1e-9).ceil().max(0.0) as usize
}

#[derive(Clone)]
enum Glyph {
    Blank,
    Plain(char),
    Colored(char, u8),
}

/// Renders with 256-color block characters: one row per layer, one per
/// badge row, and a label row in full mode.
pub fn to_ansi(n: &LayoutNode, o: &RenderOptions, term_width: usize) -> Result<String, RenderError> {
    let cols = ansi_columns(n);
    if term_width < cols || term_width == 0 {
        return Err(RenderError::WidthOverflow { required: cols.max(1), available: term_width });
    }
    let layers = n.rect.height.round() as usize;
    let badge_rows = n.extended_rows();
    let mut grid = vec![vec![Glyph::Blank; cols]; layers + badge_rows];
    let nodes = n.walk();

    for (row, line) in grid.iter_mut().enumerate().take(layers) {
        let y = row as f64 + 0.5;
        for (col, g) in line.iter_mut().enumerate() {
            let x = (col as f64 + 0.5) / 2.0;
            let hit = nodes.iter().rev().find(|m| {
                m.rect.x <= x && x < m.rect.right() && m.rect.y <= y && y < m.rect.bottom()
            });
            *g = match hit {
                Some(m) => match m.node_kind {
                    NodeKind::Cell | NodeKind::ConstructorCell => {
                        let code = ansi256(m.color.as_deref().unwrap_or("#808080"));
                        let top_left = (m.rect.y - row as f64).abs() < 1e-9 && (m.rect.x * 2.0).round() as usize == col;
                        let ch = if m.highlight {
                            '▓'
                        } else if top_left {
                            '▟'
                        } else {
                            '█'
                        };
                        Glyph::Colored(ch, code)
                    }
                    NodeKind::KindHole => Glyph::Plain('░'),
                    NodeKind::FunctionCell => Glyph::Blank,
                },
                None => Glyph::Blank,
            };
        }
    }
    for m in &nodes {
        if let Some((ix, iy)) = m.indicator {
            let row = iy.floor() as usize;
            let start = ((ix * 2.0).round() as usize).saturating_sub(1);
            for (k, ch) in ">>>".chars().enumerate() {
                if let Some(g) = grid.get_mut(row).and_then(|l| l.get_mut(start + k)) {
                    *g = Glyph::Plain(ch);
                }
            }
        }
        if o.mode == Mode::Full && m.node_kind == NodeKind::ConstructorCell {
            let row = m.rect.y.round() as usize;
            let start = (m.rect.x * 2.0).round() as usize + 1;
            let code = ansi256(m.color.as_deref().unwrap_or("#808080"));
            for (k, ch) in m.label.chars().enumerate() {
                if let Some(g) = grid.get_mut(row).and_then(|l| l.get_mut(start + k)) {
                    *g = Glyph::Colored(ch, code);
                }
            }
        }
        for b in &m.badges {
            let line = &mut grid[layers + b.row];
            let code = ansi256(&b.color);
            if b.qualified {
                let from = (b.span.0 * 2.0).round() as usize;
                let to = ((b.span.0 + b.span.1) * 2.0).round() as usize;
                for g in line.iter_mut().take(to.min(cols)).skip(from) {
                    if matches!(g, Glyph::Blank) {
                        *g = Glyph::Colored('─', code);
                    }
                }
            }
            let col = ((b.x * 2.0).round() as usize).min(cols - 1);
            let ch = ['■', '●', '▲', '◆'][b.shape_index % 4];
            line[col] = Glyph::Colored(ch, code);
        }
    }

    let mut out = String::new();
    for line in &grid {
        push_line(&mut out, line);
    }
    if o.mode == Mode::Full {
        let mut labels = vec![Glyph::Blank; cols];
        for m in &nodes {
            if m.node_kind == NodeKind::Cell {
                let start = (m.rect.x * 2.0).round() as usize;
                for (k, ch) in m.label.chars().enumerate() {
                    if let Some(g) = labels.get_mut(start + k) {
                        *g = Glyph::Plain(ch);
                    }
                }
            }
        }
        push_line(&mut out, &labels);
    }
    Ok(out)
}

fn push_line(out: &mut String, line: &[Glyph]) {
    let end = line.iter().rposition(|g| !matches!(g, Glyph::Blank)).map_or(0, |i| i + 1);
    for g in &line[..end] {
        match g {
            Glyph::Blank => out.push(' '),
            Glyph::Plain(c) => out.push(*c),
            Glyph::Colored(c, code) => {
                let _ = write!(out, "\x1b[38;5;{code}m{c}\x1b[0m");
            }
        }
    }
    out.push('\n');
}

/// Removes SGR escape sequences; handy for asserting on terminal output.
pub fn strip_ansi(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\x1b' {
            for d in chars.by_ref() {
                if d == 'm' {
                    break;
                }
            }
        } else {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{layout, LayoutOptions};
    use crate::syntax::parse_scheme;

    fn lay(src: &str) -> LayoutNode {
        layout(&parse_scheme(src).unwrap(), &LayoutOptions::default())
    }

    #[test]
    fn single_cell_svg() {
        let svg = to_svg(&lay("a"), &RenderOptions::default());
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert!(svg.contains(r#"data-path="0" data-label="a""#));
        assert!(svg.contains(">a</text>"));
    }

    #[test]
    fn eq_badges_in_svg() {
        let svg = to_svg(&lay("Eq a => a -> a -> Bool"), &RenderOptions::default());
        assert_eq!(svg.matches(r#"class="badge""#).count(), 2);
        assert_eq!(svg.matches(r#"data-label="Eq""#).count(), 2);
    }

    #[test]
    fn compact_mode_drops_text() {
        let o = RenderOptions { mode: Mode::Compact, legend: Some("a -> b".into()), ..Default::default() };
        let svg = to_svg(&lay("a -> b"), &o);
        assert!(!svg.contains("<text"));
        assert!(svg.contains("<polygon"));
        assert!(svg.contains(r#"class="indicator""#));
    }

    #[test]
    fn number_format() {
        assert_eq!(num(1.0), "1.00");
        assert_eq!(num(-0.0001), "0.00");
        assert_eq!(num(2.345_6), "2.35");
    }

    #[test]
    fn ansi_single_cell() {
        let out = to_ansi(&lay("a"), &RenderOptions::default(), 80).unwrap();
        let plain = strip_ansi(&out);
        assert_eq!(plain, "▟█\na\n");
        assert!(out.contains("\x1b[38;5;"));
    }

    #[test]
    fn ansi_width_overflow() {
        let err = to_ansi(&lay("a -> b"), &RenderOptions::default(), 0).unwrap_err();
        assert_eq!(err, RenderError::WidthOverflow { required: 5, available: 0 });
    }

    #[test]
    fn bad_scale() {
        let o = RenderOptions { scale: 0.0, ..Default::default() };
        assert_eq!(try_to_svg(&lay("a"), &o), Err(RenderError::BadScale));
    }
}
