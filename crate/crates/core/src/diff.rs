//! Structural comparison of two signatures.
//!
//! Both sides are walked top-down in lockstep. Arrow spines are compared by
//! length before their segments, so an arity difference is reported once at
//! the spine root. Variables are compared structurally, never by name: a
//! variable against another variable or a constructor is not a mismatch.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::infer::{skolemize, subsumes, unify_in, Subst};
use crate::layout::{layout, LayoutNode, LayoutOptions};
use crate::path::SourcePath;
use crate::syntax::{print_constraint, Scheme, TypeExpr};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MismatchKind {
    LeafVsStructure,
    ArityMismatch { left_arity: usize, right_arity: usize },
    LayerMismatch { left_depth: usize, right_depth: usize },
    IdentifierMismatch,
    ConstraintMismatch,
}

impl MismatchKind {
    pub fn name(&self) -> &'static str {
        match self {
            MismatchKind::LeafVsStructure => "leaf_vs_structure",
            MismatchKind::ArityMismatch { .. } => "arity_mismatch",
            MismatchKind::LayerMismatch { .. } => "layer_mismatch",
            MismatchKind::IdentifierMismatch => "identifier_mismatch",
            MismatchKind::ConstraintMismatch => "constraint_mismatch",
        }
    }

    fn mirrored(&self) -> MismatchKind {
        match *self {
            MismatchKind::ArityMismatch { left_arity, right_arity } => {
                MismatchKind::ArityMismatch { left_arity: right_arity, right_arity: left_arity }
            }
            MismatchKind::LayerMismatch { left_depth, right_depth } => {
                MismatchKind::LayerMismatch { left_depth: right_depth, right_depth: left_depth }
            }
            ref k => k.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    /// `None` when the region only exists on the right (an extra constraint).
    pub lpath: Option<SourcePath>,
    pub rpath: Option<SourcePath>,
    #[serde(flatten)]
    pub kind: MismatchKind,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffReport {
    pub left: Scheme,
    pub right: Scheme,
    pub regions: Vec<Region>,
    pub summary: BTreeMap<String, usize>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Layout nesting depth: one per application spine and one per arrow spine.
pub fn nesting_depth(t: &TypeExpr) -> usize {
    match t {
        TypeExpr::Var(_) | TypeExpr::Con(_) => 0,
        TypeExpr::App(..) => {
            let (head, args) = t.spine();
            1 + args.into_iter().chain(std::iter::once(head)).map(nesting_depth).max().unwrap_or(0)
        }
        TypeExpr::Fun(..) => {
            let (args, res) = t.arrow_spine();
            1 + args.into_iter().chain(std::iter::once(res)).map(nesting_depth).max().unwrap_or(0)
        }
    }
}

pub fn diff(left: &Scheme, right: &Scheme) -> DiffReport {
    let mut regions = Vec::new();
    compare(&left.body, &right.body, SourcePath::body(), SourcePath::body(), &mut regions);
    compare_contexts(left, right, &mut regions);
    let mut summary = BTreeMap::new();
    for r in &regions {
        *summary.entry(r.kind.name().to_string()).or_insert(0) += 1;
    }
    DiffReport { left: left.clone(), right: right.clone(), regions, summary }
}

fn region(l: &SourcePath, r: &SourcePath, kind: MismatchKind, detail: String) -> Region {
    Region { lpath: Some(l.clone()), rpath: Some(r.clone()), kind, detail }
}

fn compare(l: &TypeExpr, r: &TypeExpr, lp: SourcePath, rp: SourcePath, out: &mut Vec<Region>) {
    use TypeExpr::*;
    match (l, r) {
        (Fun(..), Fun(..)) => {
            let (la, lres) = l.arrow_spine();
            let (ra, rres) = r.arrow_spine();
            if la.len() != ra.len() {
                out.push(region(
                    &lp,
                    &rp,
                    MismatchKind::ArityMismatch { left_arity: la.len(), right_arity: ra.len() },
                    format!("{} vs {} arguments", la.len(), ra.len()),
                ));
                return;
            }
            let (mut lcur, mut rcur) = (lp, rp);
            for (a, b) in la.into_iter().zip(ra) {
                compare(a, b, lcur.child(0), rcur.child(0), out);
                lcur = lcur.child(1);
                rcur = rcur.child(1);
            }
            compare(lres, rres, lcur, rcur, out);
        }
        (Fun(..), _) | (_, Fun(..)) => {
            let (la, ra) = (l.arity(), r.arity());
            let other = if la == 0 { l } else { r };
            let kind = if matches!(other, Var(_)) {
                MismatchKind::LeafVsStructure
            } else {
                MismatchKind::ArityMismatch { left_arity: la, right_arity: ra }
            };
            out.push(region(&lp, &rp, kind, format!("`{l}` vs `{r}`")));
        }
        (App(..), App(..)) => compare_apps(l, r, lp, rp, out),
        (App(..), _) | (_, App(..)) => {
            out.push(region(&lp, &rp, MismatchKind::LeafVsStructure, format!("`{l}` vs `{r}`")));
        }
        (Con(a), Con(b)) if a != b => {
            out.push(region(&lp, &rp, MismatchKind::IdentifierMismatch, format!("`{a}` vs `{b}`")));
        }
        _ => {}
    }
}

fn compare_apps(l: &TypeExpr, r: &TypeExpr, lp: SourcePath, rp: SourcePath, out: &mut Vec<Region>) {
    let (lh, largs) = l.spine();
    let (rh, rargs) = r.spine();
    let head_path = |p: &SourcePath, n: usize| (0..n).fold(p.clone(), |p, _| p.child(0));
    let arg_path = |p: &SourcePath, n: usize, i: usize| (0..n - 1 - i).fold(p.clone(), |p, _| p.child(0)).child(1);

    if largs.len() != rargs.len() {
        out.push(region(
            &lp,
            &rp,
            MismatchKind::IdentifierMismatch,
            format!("`{lh}` applied to {} arguments vs `{rh}` applied to {}", largs.len(), rargs.len()),
        ));
        return;
    }
    let n = largs.len();
    let heads_differ = matches!((lh, rh), (TypeExpr::Con(a), TypeExpr::Con(b)) if a != b);
    if heads_differ {
        out.push(region(
            &head_path(&lp, n),
            &head_path(&rp, n),
            MismatchKind::IdentifierMismatch,
            format!("`{lh}` vs `{rh}`"),
        ));
    } else {
        let (ld, rd) = (nesting_depth(l), nesting_depth(r));
        if ld != rd {
            out.push(region(
                &lp,
                &rp,
                MismatchKind::LayerMismatch { left_depth: ld, right_depth: rd },
                format!("{ld} vs {rd} layers"),
            ));
            return;
        }
    }
    for (i, (a, b)) in largs.into_iter().zip(rargs).enumerate() {
        compare(a, b, arg_path(&lp, n, i), arg_path(&rp, n, i), out);
    }
}

/// Contexts are compared as sets of printed constraints, after renaming
/// each side's variables canonically so that alpha-equivalent contexts match.
fn compare_contexts(left: &Scheme, right: &Scheme, out: &mut Vec<Region>) {
    let keys = |s: &Scheme| -> Vec<String> { s.canonical().context.iter().map(print_constraint).collect() };
    let (lk, rk) = (keys(left), keys(right));
    for (i, k) in lk.iter().enumerate() {
        if !rk.contains(k) {
            out.push(Region {
                lpath: Some(SourcePath::constraint(i)),
                rpath: None,
                kind: MismatchKind::ConstraintMismatch,
                detail: format!("`{k}` only on the left"),
            });
        }
    }
    for (i, k) in rk.iter().enumerate() {
        if !lk.contains(k) {
            out.push(Region {
                lpath: None,
                rpath: Some(SourcePath::constraint(i)),
                kind: MismatchKind::ConstraintMismatch,
                detail: format!("`{k}` only on the right"),
            });
        }
    }
}

/// Like [`diff`], but also explains failures that are invisible to a purely
/// structural comparison: `actual` may have the target's shape yet bind its
/// variables differently (`Hero b a` against `Hero b b`). The first arrow
/// segment whose variable bindings conflict is reported as an identifier
/// mismatch.
pub fn signature_diff(actual: &Scheme, target: &Scheme) -> DiffReport {
    let mut report = diff(actual, target);
    if report.regions.iter().any(|r| r.lpath.as_ref().is_some_and(|p| p.starts_with(&SourcePath::body())))
        || subsumes(actual, target)
    {
        return report;
    }
    if let Some(path) = binding_conflict(actual, target) {
        let show = |s: &Scheme| match s.resolve(&path) {
            Some(crate::syntax::SchemeNode::Type(t)) => t.to_string(),
            _ => String::new(),
        };
        let detail = format!("`{}` vs `{}`", show(actual), show(target));
        report.regions.push(region(&path, &path, MismatchKind::IdentifierMismatch, detail));
        *report.summary.entry(MismatchKind::IdentifierMismatch.name().to_string()).or_insert(0) += 1;
    }
    report
}

/// Path of the first arrow segment that cannot be matched against the
/// rigid target once earlier segments have fixed their variables.
fn binding_conflict(actual: &Scheme, target: &Scheme) -> Option<SourcePath> {
    let rigid = skolemize(&target.body);
    let (aargs, ares) = actual.body.arrow_spine();
    let (targs, tres) = rigid.arrow_spine();
    if aargs.len() != targs.len() {
        return None;
    }
    let mut s = Subst::new();
    let mut path = SourcePath::body();
    for (a, t) in aargs.into_iter().zip(targs) {
        if unify_in(&mut s, a, t).is_err() {
            return Some(path.child(0));
        }
        path = path.child(1);
    }
    unify_in(&mut s, ares, tres).is_err().then_some(path)
}

/// Swaps the sides of a report; used to check classification symmetry.
pub fn mirror(report: &DiffReport) -> DiffReport {
    DiffReport {
        left: report.right.clone(),
        right: report.left.clone(),
        regions: report
            .regions
            .iter()
            .map(|r| Region {
                lpath: r.rpath.clone(),
                rpath: r.lpath.clone(),
                kind: r.kind.mirrored(),
                detail: r.detail.clone(),
            })
            .collect(),
        summary: report.summary.clone(),
    }
}

/// Lays out both sides and flags every node inside a mismatch region.
pub fn annotate(report: &DiffReport) -> (LayoutNode, LayoutNode) {
    annotate_with(report, &LayoutOptions::default())
}

pub fn annotate_with(report: &DiffReport, opts: &LayoutOptions) -> (LayoutNode, LayoutNode) {
    let mark = |s: &Scheme, paths: Vec<&SourcePath>| {
        let mut root = layout(s, opts);
        root.walk_mut(&mut |n| {
            if paths.iter().any(|p| n.source_path.starts_with(p)) {
                n.highlight = true;
            }
        });
        root
    };
    let lpaths = report.regions.iter().filter_map(|r| r.lpath.as_ref()).collect();
    let rpaths = report.regions.iter().filter_map(|r| r.rpath.as_ref()).collect();
    (mark(&report.left, lpaths), mark(&report.right, rpaths))
}

/// Number of maximal highlighted subtrees.
pub fn highlighted_regions(n: &LayoutNode) -> usize {
    fn go(n: &LayoutNode, parent_lit: bool) -> usize {
        let own = usize::from(n.highlight && !parent_lit);
        own + n.children.iter().map(|c| go(c, n.highlight || parent_lit)).sum::<usize>()
    }
    go(n, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_scheme;

    fn d(l: &str, r: &str) -> DiffReport {
        diff(&parse_scheme(l).unwrap(), &parse_scheme(r).unwrap())
    }

    #[test]
    fn char_vs_foldable() {
        let r = d("Char", "t0 a0");
        assert_eq!(r.regions.len(), 1);
        assert_eq!(r.regions[0].kind, MismatchKind::LeafVsStructure);
    }

    #[test]
    fn identical() {
        assert!(d("Zero a b", "Zero a b").is_empty());
        assert!(d("Zero a b -> Hero b b", "Zero x y -> Hero y y").is_empty());
    }

    #[test]
    fn arity_at_root() {
        let r = d("Int -> Int -> Int", "Int -> Int");
        assert_eq!(r.regions.len(), 1);
        assert_eq!(r.regions[0].kind, MismatchKind::ArityMismatch { left_arity: 2, right_arity: 1 });
        assert_eq!(r.regions[0].lpath, Some(SourcePath::body()));
    }

    #[test]
    fn layers() {
        let r = d("Maybe a", "Maybe (Maybe a)");
        assert_eq!(r.regions.len(), 1);
        assert_eq!(r.regions[0].kind, MismatchKind::LayerMismatch { left_depth: 1, right_depth: 2 });
    }

    #[test]
    fn variables_are_structural() {
        assert!(d("a -> b", "Int -> c").is_empty());
        let r = d("Maybe Int", "Maybe Bool");
        assert_eq!(r.regions[0].kind, MismatchKind::IdentifierMismatch);
        assert_eq!(r.regions[0].lpath.as_ref().unwrap().to_string(), "0/1");
    }

    #[test]
    fn head_mismatch_points_at_constructor() {
        let r = d("Hero b a", "Zero b a");
        assert_eq!(r.regions.len(), 1);
        assert_eq!(r.regions[0].lpath.as_ref().unwrap().to_string(), "0/0/0");
    }

    #[test]
    fn contexts_as_sets() {
        let r = d("(Eq a, Show a) => a", "(Show b, Eq b) => b");
        assert!(r.is_empty());
        let r = d("Eq a => a", "Ord a => a");
        assert_eq!(r.summary["constraint_mismatch"], 2);
    }

    #[test]
    fn annotate_counts() {
        let (l, r) = annotate(&d("Zero a", "Zero a"));
        assert_eq!(highlighted_regions(&l) + highlighted_regions(&r), 0);
        let (l, r) = annotate(&d("Char", "t0 a0"));
        assert_eq!((highlighted_regions(&l), highlighted_regions(&r)), (1, 1));
        let (l, r) = annotate(&d("Int -> Int -> Int", "Int -> Int"));
        assert!(r.walk().iter().all(|n| n.highlight));
        assert!(l.walk().iter().all(|n| n.highlight));
    }

    #[test]
    fn binding_conflicts_are_located() {
        let actual = parse_scheme("Zero a b -> Hero b a").unwrap();
        let target = parse_scheme("Zero a b -> Hero b b").unwrap();
        assert!(diff(&actual, &target).is_empty());
        let r = signature_diff(&actual, &target);
        assert_eq!(r.regions.len(), 1);
        assert_eq!(r.regions[0].lpath.as_ref().unwrap().to_string(), "0/1");
        assert_eq!(r.regions[0].detail, "`Hero b a` vs `Hero b b`");
        assert!(signature_diff(&target, &target).is_empty());
    }

    #[test]
    fn json_shape() {
        let v = d("Char", "t0 a0").to_json();
        assert_eq!(v["regions"][0]["kind"], "leaf_vs_structure");
        assert_eq!(v["regions"][0]["lpath"], "0");
        assert_eq!(v["left"], "Char");
        assert_eq!(v["summary"]["leaf_vs_structure"], 1);
    }
}
