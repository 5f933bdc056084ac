//! Exhaustive search for a solution term, used to audit level files.
//!
//! Terms are built bottom-up by application count. Two closed terms with the
//! same type (up to renaming) are interchangeable in any context, so only the
//! cheapest term per type is kept; that keeps the search exact while the
//! pool stays small. Parameters get rigid types taken from the target, so a
//! witness is any term whose type can be instantiated to the target's result.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use super::levels::{Level, DEFINITION_NAME};
use crate::infer::{infer, parse_definition, skolemize, subsumes, unify, unify_then_resolve, Definition, Expr};
use crate::syntax::TypeExpr;

/// Soft cap on candidate applications examined per search.
pub const DEFAULT_BUDGET: usize = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget exceeded after {explored} candidate applications")]
    BudgetExceeded { explored: usize },
    #[error("max depth must be at least 1")]
    ZeroDepth,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "as_string")]
    pub definition: Definition,
    /// Application nodes in the witness body.
    pub depth: usize,
}

fn as_string<S: serde::Serializer>(d: &Definition, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub witness: Option<Witness>,
    pub explored: usize,
    /// Distinct term types retained per application count.
    pub pool_sizes: Vec<usize>,
}

struct Term {
    expr: Expr,
    /// The type with variables renamed apart for use as function and as argument.
    as_fn: TypeExpr,
    as_arg: TypeExpr,
}

/// Necessary condition for unification that allocates nothing; rejects
/// most candidate pairs before the real unifier runs.
fn may_unify(a: &TypeExpr, b: &TypeExpr) -> bool {
    use TypeExpr::*;
    match (a, b) {
        (Var(_), _) | (_, Var(_)) => true,
        (Con(x), Con(y)) => x == y,
        (App(f1, a1), App(f2, a2)) | (Fun(f1, a1), Fun(f2, a2)) => may_unify(f1, f2) && may_unify(a1, a2),
        _ => false,
    }
}

/// Renames variables to `v0`, `v1`, … in first-occurrence order.
fn normalize(t: &TypeExpr) -> TypeExpr {
    let vars = t.vars();
    let map: BTreeMap<&str, String> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), format!("v{i}"))).collect();
    t.rename_vars(&|v: &str| map[v].clone())
}

fn prefixed(t: &TypeExpr, p: &str) -> TypeExpr {
    t.rename_vars(&|v: &str| format!("{p}{v}"))
}

/// Parameter names: the reference solution's when it binds the right number.
fn param_names(level: &Level, arity: usize) -> Vec<String> {
    let from_solution = level
        .reference_solution
        .as_deref()
        .and_then(|code| parse_definition(code, &level.fixities()).ok())
        .map(|d| d.params)
        .filter(|p| p.len() == arity);
    from_solution.unwrap_or_else(|| match arity {
        1 => vec!["z".to_string()],
        n => (1..=n).map(|i| format!("x{i}")).collect(),
    })
}

/// Searches for a definition of at most `max_depth` applications.
pub fn solvability_oracle(level: &Level, max_depth: usize) -> Result<Option<Witness>, OracleError> {
    search(level, max_depth, DEFAULT_BUDGET).map(|r| r.witness)
}

pub fn search(level: &Level, max_depth: usize, budget: usize) -> Result<SearchReport, OracleError> {
    if max_depth == 0 {
        return Err(OracleError::ZeroDepth);
    }
    let (args, result) = level.target.body.arrow_spine();
    let goal = skolemize(result);
    let params = param_names(level, args.len());

    let mut seen: HashSet<TypeExpr> = HashSet::new();
    let mut layers: Vec<Vec<Term>> = vec![Vec::new()];
    let mut explored = 0;
    let mut found: Option<Expr> = None;

    let mut admit = |layer: &mut Vec<Term>, expr: Expr, ty: TypeExpr, found: &mut Option<Expr>| {
        let ty = normalize(&ty);
        if found.is_none() && may_unify(&ty, &goal) && unify(&ty, &goal).is_ok() {
            *found = Some(expr.clone());
        }
        if seen.insert(ty.clone()) {
            layer.push(Term { expr, as_fn: prefixed(&ty, "f"), as_arg: prefixed(&ty, "x") });
        }
    };

    let mut base = Vec::new();
    for (name, t) in params.iter().zip(&args) {
        admit(&mut base, Expr::var(name), skolemize(t), &mut found);
    }
    for (name, s) in &level.available {
        admit(&mut base, Expr::var(name), s.body.clone(), &mut found);
    }
    layers[0] = base;

    let mut cost = 0;
    while found.is_none() && cost < max_depth {
        cost += 1;
        let mut layer = Vec::new();
        for cf in 0..cost {
            let cx = cost - 1 - cf;
            for f in &layers[cf] {
                let dom = match &f.as_fn {
                    TypeExpr::Fun(dom, _) => Some(&**dom),
                    TypeExpr::Var(_) => None,
                    _ => continue,
                };
                for x in &layers[cx] {
                    explored += 1;
                    if explored > budget {
                        return Err(OracleError::BudgetExceeded { explored });
                    }
                    if dom.is_some_and(|d| !may_unify(d, &x.as_arg)) {
                        continue;
                    }
                    let res = TypeExpr::var("r");
                    let want = TypeExpr::fun(x.as_arg.clone(), res.clone());
                    if let Some(ty) = unify_then_resolve(&f.as_fn, &want, &res) {
                        admit(&mut layer, Expr::apply(f.expr.clone(), x.expr.clone()), ty, &mut found);
                    }
                }
            }
        }
        layers.push(layer);
    }

    let witness = found.map(|body| {
        let definition = Definition { name: DEFINITION_NAME.to_string(), params: params.clone(), body };
        let depth = definition.body.applications();
        Witness { definition, depth }
    });
    if let Some(w) = &witness {
        let checked = infer(&w.definition, &level.env()).is_ok_and(|s| subsumes(&s, &level.target));
        debug_assert!(checked, "oracle witness `{}` fails inference", w.definition);
    }
    Ok(SearchReport { witness, explored, pool_sizes: layers.iter().map(Vec::len).collect() })
}

/// Application count of a solution once `$` and `.` are read as plain
/// application and composition, the measure the search uses.
pub fn solution_depth(e: &Expr) -> usize {
    desugar(e).applications()
}

fn desugar(e: &Expr) -> Expr {
    match e {
        Expr::Var(_) => e.clone(),
        Expr::Paren(inner) => desugar(inner),
        Expr::Apply(f, x) => apply(desugar(f), desugar(x)),
        Expr::Infix(op, l, r) if op == "$" => apply(desugar(l), desugar(r)),
        Expr::Infix(op, l, r) if op == "." => Expr::infix(".", desugar(l), desugar(r)),
        Expr::Infix(op, l, r) => Expr::apply(Expr::apply(Expr::var(op.clone()), desugar(l)), desugar(r)),
    }
}

fn apply(f: Expr, x: Expr) -> Expr {
    match f {
        Expr::Infix(op, g, h) if op == "." => apply(*g, apply(*h, x)),
        f => Expr::apply(f, x),
    }
}
