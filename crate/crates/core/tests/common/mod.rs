//! Generators and independent oracles shared by the property suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use geckograph::syntax::{Constraint, Scheme, TypeExpr};
use proptest::prelude::*;

/// Case count, without writing regression files next to the sources.
pub fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

/// Kind-consistent random types: `a`–`d` are always `*`, `f` and `m` are
/// only ever applied to one argument (or passed to `Fix`), and every
/// constructor is used at a single arity.
pub fn arb_type(depth: u32) -> impl Strategy<Value = TypeExpr> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(TypeExpr::var),
        2 => prop::sample::select(vec!["Int", "Bool", "Char", "()"]).prop_map(TypeExpr::con),
        1 => prop::sample::select(vec!["f", "m"]).prop_map(|v| TypeExpr::app(TypeExpr::con("Fix"), TypeExpr::var(v))),
    ];
    leaf.prop_recursive(depth, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TypeExpr::fun(a, b)),
            inner.clone().prop_map(|a| TypeExpr::app(TypeExpr::con("Maybe"), a)),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| TypeExpr::apply_all(TypeExpr::con("Either"), [a, b])),
            inner.clone().prop_map(TypeExpr::list),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TypeExpr::tuple(vec![a, b])),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(a, b, c)| TypeExpr::tuple(vec![a, b, c])),
            (prop::sample::select(vec!["f", "m"]), inner.clone())
                .prop_map(|(v, a)| TypeExpr::app(TypeExpr::var(v), a)),
        ]
    })
}

fn star_vars(t: &TypeExpr) -> Vec<String> {
    t.vars().into_iter().filter(|v| v != "f" && v != "m").collect()
}

/// Schemes with up to three single-parameter constraints on variables of
/// the body, and sometimes one two-parameter constraint.
pub fn arb_scheme(depth: u32) -> impl Strategy<Value = Scheme> {
    (arb_type(depth), prop::collection::vec((0usize..3, 0usize..8), 0..3), any::<bool>(), 0usize..8, 0usize..8)
        .prop_map(|(body, picks, multi, i, j)| {
            let vars = star_vars(&body);
            let mut context: Vec<Constraint> = Vec::new();
            if !vars.is_empty() {
                for (class, v) in picks {
                    let c = Constraint::simple(["Eq", "Show", "Ord"][class], vec![TypeExpr::var(&vars[v % vars.len()])]);
                    if !context.contains(&c) {
                        context.push(c);
                    }
                }
                if multi && vars.len() > 1 {
                    let (a, b) = (&vars[i % vars.len()], &vars[j % vars.len()]);
                    if a != b {
                        context.push(Constraint::simple("Convert", vec![TypeExpr::var(a), TypeExpr::var(b)]));
                    }
                }
            }
            Scheme::new(Vec::new(), context, body).expect("generator is kind-consistent")
        })
}

/// Independent height oracle: a nested application or arrow spine adds one
/// layer, and so does a higher-kinded variable drawn over kind holes.
pub fn expected_height(s: &Scheme) -> usize {
    fn depth(s: &Scheme, t: &TypeExpr) -> usize {
        match t {
            TypeExpr::Var(v) if s.kind_of(v).arity() > 0 => 1,
            TypeExpr::Var(_) | TypeExpr::Con(_) => 0,
            TypeExpr::App(..) => {
                let (_, args) = t.spine();
                1 + args.iter().map(|a| depth(s, a)).max().unwrap_or(0)
            }
            TypeExpr::Fun(..) => {
                let (args, res) = t.arrow_spine();
                1 + args.iter().chain([&res]).map(|a| depth(s, a)).max().unwrap_or(0)
            }
        }
    }
    1 + depth(s, &s.body)
}

/// Number of subtrees of `t` equal to `needle`.
pub fn occurrences(t: &TypeExpr, needle: &TypeExpr) -> usize {
    let here = usize::from(t == needle);
    here + match t {
        TypeExpr::App(a, b) | TypeExpr::Fun(a, b) => occurrences(a, needle) + occurrences(b, needle),
        _ => 0,
    }
}

/// Badges the notation calls for: one per occurrence of each parameter of
/// each constraint.
pub fn expected_badges(s: &Scheme) -> usize {
    s.context.iter().flat_map(|c| c.params.iter()).map(|p| occurrences(&s.body, p)).sum()
}

/// Renames every variable by appending a suffix (consistent and injective).
pub fn suffixed(s: &Scheme, suffix: &str) -> Scheme {
    s.rename_vars(&|v: &str| format!("{v}{suffix}"))
}

/// Paths (relative to the body) of leaves whose replacement by a `*`-kinded
/// type keeps the scheme well-kinded: not application heads, not `Fix`
/// arguments.
pub fn star_leaf_paths(t: &TypeExpr) -> Vec<Vec<u32>> {
    fn go(t: &TypeExpr, path: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        match t {
            TypeExpr::Var(v) if v == "f" || v == "m" => {}
            TypeExpr::Var(_) | TypeExpr::Con(_) => out.push(path.clone()),
            TypeExpr::App(h, a) => {
                if matches!(**h, TypeExpr::Con(ref c) if c == "Fix") {
                    return;
                }
                // heads are never `*`; only descend into heads that are themselves applications
                if matches!(**h, TypeExpr::App(..)) {
                    path.push(0);
                    go(h, path, out);
                    path.pop();
                }
                path.push(1);
                go(a, path, out);
                path.pop();
            }
            TypeExpr::Fun(d, c) => {
                path.push(0);
                go(d, path, out);
                path.pop();
                path.push(1);
                go(c, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    if out.is_empty() {
        // e.g. a bare `Fix f`: grow the whole body instead
        out.push(Vec::new());
    }
    out
}

pub fn replace_at(t: &TypeExpr, path: &[u32], with: &dyn Fn(&TypeExpr) -> TypeExpr) -> TypeExpr {
    match path.split_first() {
        None => with(t),
        Some((&i, rest)) => match t {
            TypeExpr::App(a, b) if i == 0 => TypeExpr::app(replace_at(a, rest, with), (**b).clone()),
            TypeExpr::App(a, b) => TypeExpr::app((**a).clone(), replace_at(b, rest, with)),
            TypeExpr::Fun(a, b) if i == 0 => TypeExpr::fun(replace_at(a, rest, with), (**b).clone()),
            TypeExpr::Fun(a, b) => TypeExpr::fun((**a).clone(), replace_at(b, rest, with)),
            _ => t.clone(),
        },
    }
}

// ---- unification corpus ----

/// Small types over variables `a`–`c`, constants `A`/`B`, a unary
/// constructor `F` and arrows; depth ≤ 4.
pub fn arb_small_type() -> impl Strategy<Value = TypeExpr> {
    let leaf = prop_oneof![
        3 => prop::sample::select(vec!["a", "b", "c"]).prop_map(TypeExpr::var),
        2 => prop::sample::select(vec!["A", "B"]).prop_map(TypeExpr::con),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| TypeExpr::app(TypeExpr::con("F"), a)),
            (inner.clone(), inner).prop_map(|(a, b)| TypeExpr::fun(a, b)),
        ]
    })
}

/// Ground types over `{A, B}` built with `F` and `->`, up to `depth`
/// constructor levels.
pub fn ground_universe(depth: u32) -> Vec<TypeExpr> {
    let mut all = vec![TypeExpr::con("A"), TypeExpr::con("B")];
    for _ in 0..depth {
        let prev = all.clone();
        let mut next: BTreeSet<TypeExpr> = prev.iter().cloned().collect();
        for a in &prev {
            next.insert(TypeExpr::app(TypeExpr::con("F"), a.clone()));
            for b in &prev {
                next.insert(TypeExpr::fun(a.clone(), b.clone()));
            }
        }
        all = next.into_iter().collect();
    }
    all
}

fn ground(t: &TypeExpr, vars: &[String], vals: &[&TypeExpr]) -> TypeExpr {
    match t {
        TypeExpr::Var(v) => vals[vars.iter().position(|x| x == v).unwrap()].clone(),
        TypeExpr::Con(_) => t.clone(),
        TypeExpr::App(a, b) => TypeExpr::app(ground(a, vars, vals), ground(b, vars, vals)),
        TypeExpr::Fun(a, b) => TypeExpr::fun(ground(a, vars, vals), ground(b, vars, vals)),
    }
}

/// Brute force: a ground assignment from `universe` making both sides
/// equal, if any. Knows nothing about unification.
pub fn ground_unifiable(a: &TypeExpr, b: &TypeExpr, universe: &[TypeExpr]) -> Option<Vec<(String, TypeExpr)>> {
    let mut vars = a.vars();
    for v in b.vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let n = vars.len();
    let mut idx = vec![0usize; n];
    loop {
        let vals: Vec<&TypeExpr> = idx.iter().map(|&i| &universe[i]).collect();
        if ground(a, &vars, &vals) == ground(b, &vars, &vals) {
            return Some(vars.iter().cloned().zip(vals.into_iter().cloned()).collect());
        }
        let mut k = 0;
        loop {
            if k == n {
                return None;
            }
            idx[k] += 1;
            if idx[k] < universe.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Random substitution over `a`–`c` into small types.
pub fn arb_small_subst() -> impl Strategy<Value = Vec<(String, TypeExpr)>> {
    prop::collection::vec((prop::sample::select(vec!["a", "b", "c"]), arb_small_type()), 0..3)
        .prop_map(|v| v.into_iter().map(|(k, t)| (k.to_string(), t)).collect())
}

pub fn apply_pairs(t: &TypeExpr, pairs: &[(String, TypeExpr)]) -> TypeExpr {
    match t {
        TypeExpr::Var(v) => pairs.iter().find(|(k, _)| k == v).map_or_else(|| t.clone(), |(_, r)| r.clone()),
        TypeExpr::Con(_) => t.clone(),
        TypeExpr::App(a, b) => TypeExpr::app(apply_pairs(a, pairs), apply_pairs(b, pairs)),
        TypeExpr::Fun(a, b) => TypeExpr::fun(apply_pairs(a, pairs), apply_pairs(b, pairs)),
    }
}

pub fn mono(t: TypeExpr) -> Scheme {
    Scheme { quantified: t.vars(), context: Vec::new(), body: t, kinds: Default::default() }
}

// ---- golden fixtures ----

/// One signature per notation feature.
pub const GOLDEN: [(&str, &str); 12] = [
    ("simple", "Bool"),
    ("applied", "Maybe a"),
    ("nested", "Zero (Hero a) b"),
    ("curried", "a -> b -> c"),
    ("higher_order", "(a -> b) -> [a] -> [b]"),
    ("constrained", "Eq a => a -> a -> Bool"),
    ("multi_param", "Convert a b => a -> b -> a"),
    ("qualified", "(forall b. A (a b)) => a b"),
    ("kind_hole", "T a -> a b"),
    ("tuple", "(a, b) -> a"),
    ("list", "[a] -> Int"),
    ("unit", "a -> ()"),
];

/// Resolves from any crate under `crates/`.
pub fn golden_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap().join("core/tests/golden")
}

// ---- checks shared by the property suites and the acceptance run ----

pub mod checks {
    use std::sync::OnceLock;

    use geckograph::diff::diff;
    use geckograph::infer::{subsumes, unify, UnifyError};
    use geckograph::layout::{layout, shape_of, LayoutNode, LayoutOptions};
    use geckograph::syntax::{Scheme, TypeExpr};
    use proptest::prelude::*;

    use super::*;

    const EPS: f64 = 1e-9;

    fn lay(s: &Scheme) -> LayoutNode {
        layout(s, &LayoutOptions::default())
    }

    /// The brute-force universe: depth ≤ 2 (74 types) for up to two
    /// variables, depth ≤ 1 (8 types) for three, to bound the search.
    fn universe(vars: usize) -> &'static [TypeExpr] {
        static SMALL: OnceLock<Vec<TypeExpr>> = OnceLock::new();
        static LARGE: OnceLock<Vec<TypeExpr>> = OnceLock::new();
        if vars >= 3 {
            SMALL.get_or_init(|| ground_universe(1))
        } else {
            LARGE.get_or_init(|| ground_universe(2))
        }
    }

    /// Success means a real, idempotent unifier through which every ground
    /// solution factors; failure means brute force finds no solution.
    pub fn unifier_sound(a: &TypeExpr, b: &TypeExpr) -> Result<(), TestCaseError> {
        let mut vars = a.vars();
        for v in b.vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let witness = ground_unifiable(a, b, universe(vars.len()));
        match unify(a, b) {
            Ok(s) => {
                prop_assert_eq!(s.apply(a), s.apply(b));
                prop_assert!(s.is_idempotent());
                for t in [a, b] {
                    prop_assert_eq!(s.apply(&s.apply(t)), s.apply(t));
                }
                if let Some(g) = witness {
                    for v in &vars {
                        let direct = apply_pairs(&TypeExpr::var(v), &g);
                        let through = apply_pairs(&s.apply(&TypeExpr::var(v)), &g);
                        prop_assert_eq!(direct, through, "ground solution does not factor through the unifier at {}", v);
                    }
                }
            }
            Err(_) => prop_assert!(witness.is_none(), "unify failed but {:?} solves it", witness),
        }
        Ok(())
    }

    pub fn occurs_rejected(t: &TypeExpr, wrap: bool) -> Result<(), TestCaseError> {
        let inner = if t.contains_var("a") { t.clone() } else { TypeExpr::fun(t.clone(), TypeExpr::var("a")) };
        let cyclic =
            if wrap { TypeExpr::app(TypeExpr::con("F"), inner) } else { TypeExpr::fun(inner, TypeExpr::con("A")) };
        let r = unify(&TypeExpr::var("a"), &cyclic);
        prop_assert!(matches!(r, Err(UnifyError::OccursCheck { .. })), "{:?}", r);
        Ok(())
    }

    pub fn subsumption_preorder(
        t: &TypeExpr,
        s1: &[(String, TypeExpr)],
        s2: &[(String, TypeExpr)],
    ) -> Result<(), TestCaseError> {
        let a = mono(t.clone());
        let b = mono(apply_pairs(t, s1));
        let c = mono(apply_pairs(&b.body, s2));
        prop_assert!(subsumes(&a, &a));
        prop_assert!(subsumes(&a, &b));
        prop_assert!(subsumes(&b, &c));
        prop_assert!(subsumes(&a, &c));
        Ok(())
    }

    pub fn height_matches(s: &Scheme) -> Result<(), TestCaseError> {
        let n = lay(s);
        prop_assert!((n.height() - expected_height(s) as f64).abs() < EPS, "{} vs {}", n.height(), expected_height(s));
        Ok(())
    }

    pub fn on_baseline(s: &Scheme) -> Result<(), TestCaseError> {
        let n = lay(s);
        let base = n.rect.bottom();
        for m in n.walk() {
            prop_assert!((m.rect.bottom() - base).abs() < EPS, "{} at {}", m.source_path, m.rect.bottom());
            prop_assert!(n.rect.contains(&m.rect));
        }
        Ok(())
    }

    pub fn shape_alpha_invariant(s: &Scheme) -> Result<(), TestCaseError> {
        prop_assert_eq!(shape_of(&lay(s)), shape_of(&lay(&suffixed(s, "x"))));
        Ok(())
    }

    pub fn list_like_unary(t: &TypeExpr) -> Result<(), TestCaseError> {
        let list = Scheme::mono(TypeExpr::list(t.clone())).unwrap();
        let applied = Scheme::mono(TypeExpr::app(TypeExpr::var("t"), t.clone())).unwrap();
        prop_assert_eq!(shape_of(&lay(&list)), shape_of(&lay(&applied)));
        Ok(())
    }

    pub fn badges_per_occurrence(s: &Scheme) -> Result<(), TestCaseError> {
        prop_assert_eq!(lay(s).badges().len(), expected_badges(s));
        Ok(())
    }

    pub fn no_self_diff(s: &Scheme) -> Result<(), TestCaseError> {
        prop_assert!(diff(s, s).is_empty());
        prop_assert!(diff(s, &suffixed(s, "x")).is_empty());
        Ok(())
    }
}
