//! Abstract syntax for Haskell-style type signatures, with a parser and a
//! minimal-parenthesis printer.
//!
//! ```
//! use geckograph::syntax::{parse_scheme, print_scheme};
//!
//! let s = parse_scheme("zeroToHero :: Zero a b -> Hero b b").unwrap();
//! assert_eq!(s.quantified, ["a", "b"]);
//! assert_eq!(print_scheme(&s), "Zero a b -> Hero b b");
//! ```

pub(crate) mod lexer;
mod parser;
mod print;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use crate::kind::{kind_infer, Kind, KindError};
pub use parser::{parse_scheme, parse_type};
pub use print::{print_constraint, print_scheme, print_type};

use crate::path::SourcePath;

/// Name of the list type constructor, written `[a]`.
pub const LIST_CON: &str = "[]";
/// Name of the unit type, written `()`.
pub const UNIT_CON: &str = "()";
/// Largest tuple arity accepted by the parser.
pub const MAX_TUPLE_ARITY: usize = 7;

/// Name of the tuple constructor of the given arity, e.g. `(,)` for pairs.
pub fn tuple_con(arity: usize) -> String {
    format!("({})", ",".repeat(arity.saturating_sub(1)))
}

/// Arity of a tuple constructor name, or `None` for anything else.
pub fn tuple_arity(name: &str) -> Option<usize> {
    let inner = name.strip_prefix('(')?.strip_suffix(')')?;
    if !inner.is_empty() && inner.bytes().all(|b| b == b',') {
        Some(inner.len() + 1)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Var(String),
    Con(String),
    App(Box<TypeExpr>, Box<TypeExpr>),
    Fun(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn var(name: impl Into<String>) -> Self {
        TypeExpr::Var(name.into())
    }

    pub fn con(name: impl Into<String>) -> Self {
        TypeExpr::Con(name.into())
    }

    pub fn app(head: TypeExpr, arg: TypeExpr) -> Self {
        TypeExpr::App(Box::new(head), Box::new(arg))
    }

    pub fn fun(dom: TypeExpr, cod: TypeExpr) -> Self {
        TypeExpr::Fun(Box::new(dom), Box::new(cod))
    }

    /// Left-nested application of `head` to `args`.
    pub fn apply_all(head: TypeExpr, args: impl IntoIterator<Item = TypeExpr>) -> Self {
        args.into_iter().fold(head, TypeExpr::app)
    }

    /// Right-nested arrow chain ending in `result`.
    pub fn arrows(args: impl IntoIterator<Item = TypeExpr>, result: TypeExpr) -> Self {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter().rev().fold(result, |acc, a| TypeExpr::fun(a, acc))
    }

    pub fn list(elem: TypeExpr) -> Self {
        TypeExpr::app(TypeExpr::con(LIST_CON), elem)
    }

    pub fn tuple(items: Vec<TypeExpr>) -> Self {
        TypeExpr::apply_all(TypeExpr::con(tuple_con(items.len())), items)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TypeExpr::Var(_) | TypeExpr::Con(_))
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&TypeExpr, Vec<&TypeExpr>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let TypeExpr::App(h, a) = cur {
            args.push(a.as_ref());
            cur = h;
        }
        args.reverse();
        (cur, args)
    }

    /// Splits a right-nested arrow chain into its argument types and result.
    pub fn arrow_spine(&self) -> (Vec<&TypeExpr>, &TypeExpr) {
        let mut args = Vec::new();
        let mut cur = self;
        while let TypeExpr::Fun(d, c) = cur {
            args.push(d.as_ref());
            cur = c;
        }
        (args, cur)
    }

    /// Number of arrows on the top-level spine.
    pub fn arity(&self) -> usize {
        self.arrow_spine().0.len()
    }

    /// Variables in first-occurrence (left to right) order, without duplicates.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            TypeExpr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            TypeExpr::Con(_) => {}
            TypeExpr::App(a, b) | TypeExpr::Fun(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            TypeExpr::Var(v) => v == name,
            TypeExpr::Con(_) => false,
            TypeExpr::App(a, b) | TypeExpr::Fun(a, b) => a.contains_var(name) || b.contains_var(name),
        }
    }

    /// Number of `Var`/`Con` leaves.
    pub fn leaf_count(&self) -> usize {
        match self {
            TypeExpr::Var(_) | TypeExpr::Con(_) => 1,
            TypeExpr::App(a, b) | TypeExpr::Fun(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    /// Renames variables through `f`; constructors are untouched.
    pub fn rename_vars(&self, f: &impl Fn(&str) -> String) -> TypeExpr {
        match self {
            TypeExpr::Var(v) => TypeExpr::Var(f(v)),
            TypeExpr::Con(c) => TypeExpr::Con(c.clone()),
            TypeExpr::App(a, b) => TypeExpr::app(a.rename_vars(f), b.rename_vars(f)),
            TypeExpr::Fun(a, b) => TypeExpr::fun(a.rename_vars(f), b.rename_vars(f)),
        }
    }

    /// Child subtree at `index` (`0`/`1`), if any.
    pub fn child(&self, index: u32) -> Option<&TypeExpr> {
        match (self, index) {
            (TypeExpr::App(a, _) | TypeExpr::Fun(a, _), 0) => Some(a),
            (TypeExpr::App(_, b) | TypeExpr::Fun(_, b), 1) => Some(b),
            _ => None,
        }
    }

    /// Follows relative child indices.
    pub fn at(&self, indices: &[u32]) -> Option<&TypeExpr> {
        indices.iter().try_fold(self, |t, &i| t.child(i))
    }

    /// Identifier shown for a leaf: variable or constructor name.
    pub fn leaf_name(&self) -> Option<&str> {
        match self {
            TypeExpr::Var(n) | TypeExpr::Con(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub class: String,
    pub params: Vec<TypeExpr>,
    /// Locally bound variables of a qualified constraint.
    pub quantified: Vec<String>,
    /// Premises of a qualified constraint.
    pub context: Vec<Constraint>,
}

impl Constraint {
    pub fn simple(class: impl Into<String>, params: Vec<TypeExpr>) -> Self {
        Constraint { class: class.into(), params, quantified: Vec::new(), context: Vec::new() }
    }

    pub fn is_qualified(&self) -> bool {
        !self.quantified.is_empty() || !self.context.is_empty()
    }

    /// Free variables in first-occurrence order (inner context first, as printed).
    pub fn free_vars(&self) -> Vec<String> {
        let mut all = Vec::new();
        for c in &self.context {
            for v in c.free_vars() {
                if !all.contains(&v) {
                    all.push(v);
                }
            }
        }
        for p in &self.params {
            p.collect_vars(&mut all);
        }
        all.retain(|v| !self.quantified.contains(v));
        all
    }

    pub fn rename_vars(&self, f: &impl Fn(&str) -> String) -> Constraint {
        Constraint {
            class: self.class.clone(),
            params: self.params.iter().map(|p| p.rename_vars(f)).collect(),
            quantified: self.quantified.iter().map(|v| f(v)).collect(),
            context: self.context.iter().map(|c| c.rename_vars(f)).collect(),
        }
    }
}

/// A polymorphic type: quantified variables, constraint context and body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme {
    pub quantified: Vec<String>,
    pub context: Vec<Constraint>,
    pub body: TypeExpr,
    pub kinds: BTreeMap<String, Kind>,
}

/// A node reached through a [`SourcePath`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchemeNode<'a> {
    Type(&'a TypeExpr),
    Constraint(&'a Constraint),
}

impl Scheme {
    /// Builds a scheme from a body and context, quantifying free variables
    /// after `explicit` in first-appearance order and inferring kinds.
    pub fn new(explicit: Vec<String>, context: Vec<Constraint>, body: TypeExpr) -> Result<Self, KindError> {
        let mut quantified = explicit;
        for v in implicit_order(&context, &body) {
            if !quantified.contains(&v) {
                quantified.push(v);
            }
        }
        let mut s = Scheme { quantified, context, body, kinds: BTreeMap::new() };
        s.kinds = kind_infer(&s)?;
        Ok(s)
    }

    /// Unconstrained scheme quantified over the body's variables.
    pub fn mono(body: TypeExpr) -> Result<Self, KindError> {
        Scheme::new(Vec::new(), Vec::new(), body)
    }

    /// Variables in the order an unannotated signature would quantify them.
    pub fn implicit_order(&self) -> Vec<String> {
        implicit_order(&self.context, &self.body)
    }

    pub fn kind_of(&self, var: &str) -> Kind {
        self.kinds.get(var).cloned().unwrap_or(Kind::Star)
    }

    pub fn resolve(&self, path: &SourcePath) -> Option<SchemeNode<'_>> {
        let (&first, rest) = path.indices().split_first()?;
        if first == 0 {
            return self.body.at(rest).map(SchemeNode::Type);
        }
        let mut c = self.context.get(first as usize - 1)?;
        let mut rest = rest;
        loop {
            let Some((&i, tail)) = rest.split_first() else {
                return Some(SchemeNode::Constraint(c));
            };
            let i = i as usize;
            if i < c.params.len() {
                return c.params[i].at(tail).map(SchemeNode::Type);
            }
            c = c.context.get(i - c.params.len())?;
            rest = tail;
        }
    }

    /// Consistently renames every variable, including kind entries.
    pub fn rename_vars(&self, f: &impl Fn(&str) -> String) -> Scheme {
        Scheme {
            quantified: self.quantified.iter().map(|v| f(v)).collect(),
            context: self.context.iter().map(|c| c.rename_vars(f)).collect(),
            body: self.body.rename_vars(f),
            kinds: self.kinds.iter().map(|(k, v)| (f(k), v.clone())).collect(),
        }
    }

    /// Renames quantified variables to `a`, `b`, … in first-occurrence
    /// order of the printed body, so alpha-equivalent schemes compare equal.
    pub fn canonical(&self) -> Scheme {
        let mut order = self.body.vars();
        for v in self.implicit_order().into_iter().chain(self.quantified.iter().cloned()) {
            if !order.contains(&v) {
                order.push(v);
            }
        }
        let map: BTreeMap<String, String> =
            order.iter().enumerate().map(|(i, v)| (v.clone(), var_name(i))).collect();
        let renamed = self.rename_vars(&|v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_string()));
        Scheme { quantified: renamed.implicit_order_with(&renamed.quantified), ..renamed }
    }

    fn implicit_order_with(&self, existing: &[String]) -> Vec<String> {
        let mut out = self.implicit_order();
        for v in existing {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn alpha_eq(&self, other: &Scheme) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_scheme(self))
    }
}

impl Serialize for Scheme {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_scheme(&s).map_err(serde::de::Error::custom)
    }
}

impl Serialize for TypeExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TypeExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_type(&s).map_err(serde::de::Error::custom)
    }
}

/// `a`, `b`, …, `z`, `a1`, `b1`, …
pub fn var_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    match i / 26 {
        0 => letter.to_string(),
        n => format!("{letter}{n}"),
    }
}

fn implicit_order(context: &[Constraint], body: &TypeExpr) -> Vec<String> {
    let mut out = Vec::new();
    for c in context {
        for v in c.free_vars() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    body.collect_vars(&mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Unexpected { offset: usize, expected: Vec<String>, found: String },
    #[error("syntax error at byte {offset}: {message}")]
    Unsupported { offset: usize, message: String },
    #[error(transparent)]
    Kind(#[from] KindError),
}

impl SyntaxError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            SyntaxError::Unexpected { offset, .. } | SyntaxError::Unsupported { offset, .. } => Some(*offset),
            SyntaxError::Kind(_) => None,
        }
    }

    pub fn expected(&self) -> &[String] {
        match self {
            SyntaxError::Unexpected { expected, .. } => expected,
            _ => &[],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_names() {
        assert_eq!(tuple_con(2), "(,)");
        assert_eq!(tuple_arity("(,,)"), Some(3));
        assert_eq!(tuple_arity("()"), None);
        assert_eq!(tuple_arity("Zero"), None);
    }

    #[test]
    fn spines() {
        let t = parse_type("T a b -> c -> d").unwrap();
        let (args, res) = t.arrow_spine();
        assert_eq!(args.len(), 2);
        assert_eq!(res, &TypeExpr::var("d"));
        let (head, args) = args[0].spine();
        assert_eq!(head, &TypeExpr::con("T"));
        assert_eq!(args, [&TypeExpr::var("a"), &TypeExpr::var("b")]);
    }

    #[test]
    fn resolve_paths() {
        let s = parse_scheme("Eq a => a -> Bool").unwrap();
        assert_eq!(s.resolve(&SourcePath::body().child(1)), Some(SchemeNode::Type(&TypeExpr::con("Bool"))));
        assert_eq!(
            s.resolve(&SourcePath::constraint(0).child(0)),
            Some(SchemeNode::Type(&TypeExpr::var("a")))
        );
        assert!(s.resolve(&SourcePath::constraint(1)).is_none());
        assert!(s.resolve(&SourcePath::body().child(2)).is_none());
    }

    #[test]
    fn canonical_renaming() {
        let s = parse_scheme("x -> y -> x").unwrap();
        assert_eq!(print_scheme(&s.canonical()), "a -> b -> a");
        assert!(s.alpha_eq(&parse_scheme("q -> r -> q").unwrap()));
        assert!(!s.alpha_eq(&parse_scheme("q -> r -> r").unwrap()));
    }

    #[test]
    fn var_names() {
        assert_eq!(var_name(0), "a");
        assert_eq!(var_name(25), "z");
        assert_eq!(var_name(26), "a1");
    }
}
