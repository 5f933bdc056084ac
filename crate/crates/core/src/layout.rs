//! Geometry of the notation.
//!
//! A [`Scheme`] becomes a tree of [`LayoutNode`]s measured in layout units
//! (lu). Coordinates are absolute, with `y` growing downward from the top of
//! the bounding box. Every node is bottom-aligned inside its parent, so the
//! diagram only ever grows upward.
//!
//! - A variable or constructor is a 1×1 notched cell.
//! - An application `T a b` is a constructor cell: a column for `T` on the
//!   left plus one layer on top, half-enclosing its arguments. More
//!   arguments grow it wider; nested arguments grow it taller.
//! - An arrow adds one layer with a `>>>` indicator in its top strip. A
//!   curried chain shares that layer, so its indicators line up on one row;
//!   a function in argument position has its indicator one layer lower.
//! - A variable whose kind is not `*` becomes a constructor cell over
//!   dotted kind holes for each argument it is not applied to.
//! - Constraints become badges in the extended area under every
//!   occurrence of the constrained type.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::palette::{assign_colors, ColorAssignment, Palette};
use crate::path::SourcePath;
use crate::syntax::{tuple_arity, Constraint, Scheme, TypeExpr, LIST_CON, UNIT_CON};

/// Unit sizes in layout units. Missing fields take the defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutOptions {
    pub cell_width: f64,
    pub layer_height: f64,
    pub column_width: f64,
    pub notch: f64,
    pub indicator_strip: f64,
    pub badge_row: f64,
    pub badge_size: f64,
    pub gap: f64,
    #[serde(skip)]
    pub palette: Palette,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions {
            cell_width: 1.0,
            layer_height: 1.0,
            column_width: 0.5,
            notch: 0.25,
            indicator_strip: 0.3,
            badge_row: 0.35,
            badge_size: 0.25,
            gap: 0.08,
            palette: Palette::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.height
    }

    pub fn contains(&self, other: &Rect) -> bool {
        const EPS: f64 = 1e-9;
        other.x >= self.x - EPS
            && other.y >= self.y - EPS
            && other.right() <= self.right() + EPS
            && other.bottom() <= self.bottom() + EPS
    }

    pub fn overlaps(&self, other: &Rect) -> bool {
        const EPS: f64 = 1e-9;
        self.x < other.right() - EPS
            && other.x < self.right() - EPS
            && self.y < other.bottom() - EPS
            && other.y < self.bottom() - EPS
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Cell,
    ConstructorCell,
    FunctionCell,
    KindHole,
}

/// Badge glyphs for multi-parameter class positions, in order.
pub const BADGE_SHAPES: [&str; 4] = ["square", "circle", "triangle", "diamond"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintBadge {
    pub class_name: String,
    pub class_color_slot: usize,
    pub color: String,
    /// 0 is a square; higher values mark later parameters of a class.
    pub shape_index: usize,
    /// Horizontal extent `(x, width)` of the occurrence the badge sits under.
    pub span: (f64, f64),
    pub qualified: bool,
    /// Row of the extended area, counted downward from the baseline.
    pub row: usize,
    /// Top-left corner of the badge glyph.
    pub x: f64,
    pub y: f64,
    pub size: f64,
    /// Top of the badge row.
    pub row_y: f64,
    pub row_height: f64,
}

impl ConstraintBadge {
    pub fn shape(&self) -> &'static str {
        BADGE_SHAPES[self.shape_index % BADGE_SHAPES.len()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayoutNode {
    pub rect: Rect,
    pub notch: bool,
    /// One or two characters shown in the cell.
    pub label: String,
    /// Full identifier behind the label.
    pub name: String,
    pub color_slot: Option<usize>,
    pub color: Option<String>,
    pub node_kind: NodeKind,
    /// Anchor of the `>>>` glyph, centered in the top strip.
    pub indicator: Option<(f64, f64)>,
    pub badges: Vec<ConstraintBadge>,
    pub source_path: SourcePath,
    pub highlight: bool,
    pub children: Vec<LayoutNode>,
}

impl LayoutNode {
    fn translate(&mut self, dx: f64, dy: f64) {
        self.rect.x += dx;
        self.rect.y += dy;
        if let Some((x, y)) = &mut self.indicator {
            *x += dx;
            *y += dy;
        }
        for b in &mut self.badges {
            b.span.0 += dx;
            b.x += dx;
        }
        for c in &mut self.children {
            c.translate(dx, dy);
        }
    }

    /// Pre-order traversal.
    pub fn walk(&self) -> Vec<&LayoutNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut LayoutNode)) {
        f(self);
        for c in &mut self.children {
            c.walk_mut(f);
        }
    }

    pub fn find(&self, path: &SourcePath) -> Option<&LayoutNode> {
        self.walk().into_iter().find(|n| n.source_path == *path && n.node_kind != NodeKind::KindHole)
    }

    pub fn width(&self) -> f64 {
        self.rect.width
    }

    pub fn height(&self) -> f64 {
        self.rect.height
    }

    /// Number of badge rows in the extended area below the cells.
    pub fn extended_rows(&self) -> usize {
        self.walk().iter().flat_map(|n| n.badges.iter().map(|b| b.row + 1)).max().unwrap_or(0)
    }

    /// Bottom edge of the extended area, or of the cells when it is empty.
    pub fn extended_bottom(&self) -> f64 {
        self.walk()
            .iter()
            .flat_map(|n| n.badges.iter().map(|b| b.row_y + b.row_height))
            .fold(self.rect.bottom(), f64::max)
    }

    pub fn badges(&self) -> Vec<&ConstraintBadge> {
        self.walk().into_iter().flat_map(|n| n.badges.iter()).collect()
    }
}

/// Lays out `s`. Total on well-formed schemes.
pub fn layout(s: &Scheme, opts: &LayoutOptions) -> LayoutNode {
    let colors = assign_colors(&identifiers(s), &opts.palette);
    let b = Builder { opts, kinds: &s.kinds, colors: &colors };
    let mut root = b.node(&s.body, SourcePath::body());
    b.attach_badges(&mut root, s);
    root
}

/// Identifiers of `s` in printed first-appearance order: context, then body.
pub fn identifiers(s: &Scheme) -> Vec<String> {
    fn collect_type(t: &TypeExpr, out: &mut Vec<String>) {
        match t {
            TypeExpr::Var(n) | TypeExpr::Con(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            TypeExpr::App(a, b) | TypeExpr::Fun(a, b) => {
                collect_type(a, out);
                collect_type(b, out);
            }
        }
    }
    fn collect_constraint(c: &Constraint, out: &mut Vec<String>) {
        for inner in &c.context {
            collect_constraint(inner, out);
        }
        if !out.contains(&c.class) {
            out.push(c.class.clone());
        }
        for p in &c.params {
            collect_type(p, out);
        }
    }
    let mut out = Vec::new();
    for c in &s.context {
        collect_constraint(c, &mut out);
    }
    collect_type(&s.body, &mut out);
    out
}

/// First one or two characters of an identifier.
pub fn short_label(name: &str) -> String {
    if let Some(n) = tuple_arity(name) {
        return if n > 0 { ",".into() } else { String::new() };
    }
    name.chars().take(2).collect()
}

struct Builder<'a> {
    opts: &'a LayoutOptions,
    kinds: &'a BTreeMap<String, crate::kind::Kind>,
    colors: &'a ColorAssignment,
}

impl Builder<'_> {
    fn colored(&self, name: &str) -> (Option<usize>, Option<String>) {
        let slot = self.colors.slot(name);
        (Some(slot), Some(self.opts.palette.color(slot).to_string()))
    }

    fn cell(&self, name: &str, path: SourcePath) -> LayoutNode {
        let (color_slot, color) = self.colored(name);
        LayoutNode {
            rect: Rect { x: 0.0, y: 0.0, width: self.opts.cell_width, height: self.opts.layer_height },
            notch: true,
            label: short_label(name),
            name: name.to_string(),
            color_slot,
            color,
            node_kind: NodeKind::Cell,
            indicator: None,
            badges: Vec::new(),
            source_path: path,
            highlight: false,
            children: Vec::new(),
        }
    }

    fn hole(&self, path: SourcePath) -> LayoutNode {
        LayoutNode {
            rect: Rect { x: 0.0, y: 0.0, width: self.opts.cell_width, height: self.opts.layer_height },
            notch: false,
            label: String::new(),
            name: String::new(),
            color_slot: None,
            color: None,
            node_kind: NodeKind::KindHole,
            indicator: None,
            badges: Vec::new(),
            source_path: path,
            highlight: false,
            children: Vec::new(),
        }
    }

    fn node(&self, t: &TypeExpr, path: SourcePath) -> LayoutNode {
        match t {
            TypeExpr::Fun(..) => self.function(t, path),
            TypeExpr::App(..) => {
                let (head, args) = t.spine();
                let m = args.len();
                let head_path = (0..m).fold(path.clone(), |p, _| p.child(0));
                let arg_nodes = args
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let p = (0..m - 1 - i).fold(path.clone(), |p, _| p.child(0)).child(1);
                        self.node(a, p)
                    })
                    .collect();
                self.constructor(head, head_path, arg_nodes)
            }
            TypeExpr::Var(v) => {
                let arity = self.kinds.get(v).map_or(0, |k| k.arity());
                if arity > 0 {
                    self.constructor(t, path, Vec::new())
                } else {
                    self.cell(v, path)
                }
            }
            TypeExpr::Con(c) => self.cell(c, path),
        }
    }

    /// Constructor cell for `head` applied to `args`, padded with kind holes
    /// when `head` is a variable of higher kind than its uses supply.
    fn constructor(&self, head: &TypeExpr, head_path: SourcePath, mut args: Vec<LayoutNode>) -> LayoutNode {
        let name = head.leaf_name().unwrap_or("");
        if let TypeExpr::Var(v) = head {
            let arity = self.kinds.get(v).map_or(0, |k| k.arity());
            for _ in args.len()..arity {
                args.push(self.hole(head_path.clone()));
            }
        }
        let o = self.opts;
        let content_h = args.iter().map(|a| a.rect.height).fold(0.0, f64::max);
        let height = o.layer_height + content_h;
        let mut x = o.column_width;
        for (i, a) in args.iter_mut().enumerate() {
            if i > 0 {
                x += o.gap;
            }
            let dy = height - a.rect.height;
            a.translate(x, dy);
            x += a.rect.width;
        }
        let (color_slot, color) = self.colored(name);
        LayoutNode {
            rect: Rect { x: 0.0, y: 0.0, width: x, height },
            notch: true,
            label: short_label(name),
            name: name.to_string(),
            color_slot,
            color,
            node_kind: NodeKind::ConstructorCell,
            indicator: None,
            badges: Vec::new(),
            source_path: head_path,
            highlight: false,
            children: args,
        }
    }

    fn function(&self, t: &TypeExpr, path: SourcePath) -> LayoutNode {
        let o = self.opts;
        let mut segments = Vec::new();
        let mut cur = t;
        let mut p = path;
        while let TypeExpr::Fun(d, c) = cur {
            segments.push((self.node(d, p.child(0)), p.clone()));
            cur = c;
            p = p.child(1);
        }
        let result = self.node(cur, p);
        let content_h = segments
            .iter()
            .map(|(n, _)| n.rect.height)
            .chain(std::iter::once(result.rect.height))
            .fold(0.0, f64::max);
        let height = o.layer_height + content_h;

        // Place every element left to right along the shared baseline.
        let mut x = 0.0;
        let mut doms = Vec::new();
        for (mut n, fun_path) in segments {
            n.translate(x, height - n.rect.height);
            x += n.rect.width + o.gap;
            doms.push((n, fun_path));
        }
        let mut acc = result;
        acc.translate(x, height - acc.rect.height);
        let right = x + acc.rect.width;

        // Fold from the right so each arrow encloses the rest of the chain.
        while let Some((dom, fun_path)) = doms.pop() {
            let left = dom.rect.x;
            let ind_x = dom.rect.right() + o.gap / 2.0;
            acc = LayoutNode {
                rect: Rect { x: left, y: 0.0, width: right - left, height },
                notch: false,
                label: String::new(),
                name: "->".into(),
                color_slot: None,
                color: None,
                node_kind: NodeKind::FunctionCell,
                indicator: Some((ind_x, o.indicator_strip / 2.0)),
                badges: Vec::new(),
                source_path: fun_path,
                highlight: false,
                children: vec![dom, acc],
            };
        }
        acc
    }

    fn attach_badges(&self, root: &mut LayoutNode, s: &Scheme) {
        let baseline = root.rect.bottom();
        let mut next_band_row = 1;
        for c in &s.context {
            if c.is_qualified() {
                let row = next_band_row;
                next_band_row += 1;
                self.badges_for(root, &s.body, c, true, row, baseline);
                for inner in &c.context {
                    self.badges_for(root, &s.body, inner, true, row, baseline);
                }
            } else {
                self.badges_for(root, &s.body, c, false, 0, baseline);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn badges_for(
        &self,
        root: &mut LayoutNode,
        body: &TypeExpr,
        c: &Constraint,
        qualified: bool,
        row: usize,
        baseline: f64,
    ) {
        let o = self.opts;
        let row_y = baseline + row as f64 * o.badge_row;
        let (slot, color) = self.colored(&c.class);
        let multi = c.params.len() > 1;
        for (j, param) in c.params.iter().enumerate() {
            let mut occurrences = Vec::new();
            find_occurrences(body, param, SourcePath::body(), &mut occurrences);
            for occ in occurrences {
                let target = node_path_for(body, &occ);
                root.walk_mut(&mut |n| {
                    if n.source_path == target && n.node_kind != NodeKind::KindHole {
                        let stacked = n.badges.iter().filter(|b| b.row == row).count();
                        let step = self.opts.badge_size + self.opts.gap;
                        let x = n.rect.right() - self.opts.gap - self.opts.badge_size - stacked as f64 * step;
                        n.badges.push(ConstraintBadge {
                            class_name: c.class.clone(),
                            class_color_slot: slot.unwrap_or(0),
                            color: color.clone().unwrap_or_default(),
                            shape_index: if multi { j } else { 0 },
                            span: (n.rect.x, n.rect.width),
                            qualified,
                            row,
                            x,
                            y: row_y + (o.badge_row - o.badge_size) / 2.0,
                            size: o.badge_size,
                            row_y,
                            row_height: o.badge_row,
                        });
                    }
                });
            }
        }
    }
}

/// Paths of every subtree of `t` structurally equal to `needle`.
fn find_occurrences(t: &TypeExpr, needle: &TypeExpr, path: SourcePath, out: &mut Vec<SourcePath>) {
    if t == needle {
        out.push(path.clone());
    }
    if let TypeExpr::App(a, b) | TypeExpr::Fun(a, b) = t {
        find_occurrences(a, needle, path.child(0), out);
        find_occurrences(b, needle, path.child(1), out);
    }
}

/// Layout node path representing the type at `path`: an application is
/// drawn by the constructor cell of its head.
fn node_path_for(body: &TypeExpr, path: &SourcePath) -> SourcePath {
    let mut p = path.clone();
    let mut t = body.at(&path.indices()[1..]);
    while let Some(TypeExpr::App(h, _)) = t {
        p = p.child(0);
        t = Some(h);
    }
    p
}

/// Geometry with labels and colors erased.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeDescriptor {
    pub rect: Rect,
    pub node_kind: NodeKind,
    pub notch: bool,
    pub indicator: Option<(f64, f64)>,
    pub badges: Vec<(usize, usize, f64, f64, bool)>,
    pub children: Vec<ShapeDescriptor>,
}

pub fn shape_of(n: &LayoutNode) -> ShapeDescriptor {
    ShapeDescriptor {
        rect: n.rect,
        node_kind: n.node_kind,
        notch: n.notch,
        indicator: n.indicator,
        badges: n.badges.iter().map(|b| (b.shape_index, b.row, b.x, b.y, b.qualified)).collect(),
        children: n.children.iter().map(shape_of).collect(),
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("the diagram root has no function indicator")]
    NotAFunction,
}

/// Counts the horizontally connected indicators on the root's top strip.
pub fn arity_by_indicators(n: &LayoutNode) -> Result<usize, LayoutError> {
    let (_, y) = n.indicator.ok_or(LayoutError::NotAFunction)?;
    let mut count = 1;
    let mut cur = n;
    while let Some(next) = cur.children.get(1) {
        match next.indicator {
            Some((_, ny)) if next.node_kind == NodeKind::FunctionCell && ny == y => {
                count += 1;
                cur = next;
            }
            _ => break,
        }
    }
    Ok(count)
}

/// Is `name` drawn with built-in glyphs rather than a letter label?
pub fn is_builtin(name: &str) -> bool {
    name == LIST_CON || name == UNIT_CON || tuple_arity(name).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_scheme;

    fn lay(src: &str) -> LayoutNode {
        layout(&parse_scheme(src).unwrap(), &LayoutOptions::default())
    }

    #[test]
    fn atomic_cell() {
        let n = lay("a");
        assert_eq!(n.node_kind, NodeKind::Cell);
        assert_eq!((n.rect.width, n.rect.height), (1.0, 1.0));
        assert_eq!(n.label, "a");
        assert!(n.notch);
        assert!(n.children.is_empty());
    }

    #[test]
    fn application_geometry() {
        let n = lay("T a b");
        assert_eq!(n.node_kind, NodeKind::ConstructorCell);
        assert_eq!(n.rect.height, 2.0);
        assert!((n.rect.width - (0.5 + 1.0 + 0.08 + 1.0)).abs() < 1e-9);
        assert_eq!(n.source_path.to_string(), "0/0/0");
        let paths: Vec<_> = n.children.iter().map(|c| c.source_path.to_string()).collect();
        assert_eq!(paths, ["0/0/1", "0/1"]);
        for c in &n.children {
            assert_eq!(c.rect.bottom(), 2.0);
        }
    }

    #[test]
    fn curried_indicators_connect() {
        let n = lay("a -> b -> c");
        assert_eq!(arity_by_indicators(&n), Ok(2));
        let inner = &n.children[1];
        assert_eq!(inner.node_kind, NodeKind::FunctionCell);
        assert_eq!(inner.rect.y, n.rect.y);
        assert_eq!(inner.indicator.unwrap().1, n.indicator.unwrap().1);
        assert_eq!(n.rect.height, 2.0);
    }

    #[test]
    fn arity_counts() {
        assert_eq!(arity_by_indicators(&lay("a -> b")), Ok(1));
        assert_eq!(arity_by_indicators(&lay("a -> b -> c -> d")), Ok(3));
        assert_eq!(arity_by_indicators(&lay("(a -> b) -> c")), Ok(1));
        assert_eq!(arity_by_indicators(&lay("Maybe a")), Err(LayoutError::NotAFunction));
    }

    #[test]
    fn higher_order_indicator_is_lower() {
        let n = lay("(a -> b) -> c");
        let inner = &n.children[0];
        assert_eq!(inner.node_kind, NodeKind::FunctionCell);
        let (_, outer_y) = n.indicator.unwrap();
        let (_, inner_y) = inner.indicator.unwrap();
        assert!((inner_y - outer_y - 1.0).abs() < 1e-9);
        assert_eq!(n.rect.height, 3.0);
    }

    #[test]
    fn badges_under_each_occurrence() {
        let n = lay("Eq a => a -> a -> Bool");
        let eq: Vec<_> = n.badges().into_iter().filter(|b| b.class_name == "Eq").collect();
        assert_eq!(eq.len(), 2);
        let a_cells: Vec<_> = n.walk().into_iter().filter(|c| c.name == "a").collect();
        for (b, cell) in eq.iter().zip(&a_cells) {
            assert_eq!(b.span, (cell.rect.x, cell.rect.width));
            assert!(b.x >= cell.rect.x && b.x + 0.25 <= cell.rect.right());
        }
    }

    #[test]
    fn multi_param_shapes() {
        let n = lay("A a b => a b");
        let shapes: Vec<_> = n.badges().iter().map(|b| b.shape_index).collect();
        assert_eq!(shapes.len(), 2);
        assert!(shapes.contains(&0) && shapes.contains(&1));
        let slots: Vec<_> = n.badges().iter().map(|b| b.class_color_slot).collect();
        assert_eq!(slots[0], slots[1]);
    }

    #[test]
    fn qualified_band_spans_subexpression() {
        let n = lay("(forall b. A (a b)) => a b -> a b");
        let bands: Vec<_> = n.badges().into_iter().filter(|b| b.qualified).collect();
        assert_eq!(bands.len(), 2);
        for b in &bands {
            assert_eq!(b.row, 1);
            assert_eq!(b.span.1, 1.5);
        }
    }

    #[test]
    fn multiple_classes_stack_right_to_left() {
        let n = lay("(A a, B a) => a");
        assert_eq!(n.badges.len(), 2);
        assert_eq!(n.badges[0].class_name, "A");
        assert!(n.badges[0].x > n.badges[1].x);
    }

    #[test]
    fn kind_hole_for_unapplied_higher_kinded_variable() {
        let n = lay("T a -> a b");
        let applied = &n.children[1];
        assert_eq!(applied.node_kind, NodeKind::ConstructorCell);
        assert_eq!(applied.name, "a");
        assert_eq!(applied.children[0].node_kind, NodeKind::Cell);
        let bare = &n.children[0].children[0];
        assert_eq!(bare.node_kind, NodeKind::ConstructorCell);
        assert_eq!(bare.name, "a");
        assert_eq!(bare.children.len(), 1);
        assert_eq!(bare.children[0].node_kind, NodeKind::KindHole);
        assert_eq!(bare.children[0].source_path, bare.source_path);
    }

    #[test]
    fn foldable_shape_matches_list() {
        assert_eq!(shape_of(&lay("[a]")), shape_of(&lay("t a")));
        assert_eq!(shape_of(&lay("a -> b")), shape_of(&lay("c -> d")));
        assert_ne!(shape_of(&lay("T a (U b)")), shape_of(&lay("T a b c")));
    }

    #[test]
    fn labels_truncate() {
        assert_eq!(short_label("a"), "a");
        assert_eq!(short_label("Zero"), "Ze");
        assert_eq!(short_label("(,,)"), ",");
        assert_eq!(short_label("()"), "()");
        assert_eq!(short_label("[]"), "[]");
    }
}
