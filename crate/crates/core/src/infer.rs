//! Hindley–Milner inference for the game's one-line definitions.
//!
//! The expression language is tiny: variables, application, parentheses and
//! infix operators. There is no `let`, so generalization happens once, at
//! the definition boundary.
//!
//! ```
//! use std::collections::BTreeMap;
//! use geckograph::infer::{infer, parse_definition, default_fixities};
//! use geckograph::parse_scheme;
//!
//! let env = BTreeMap::from([("f".to_string(), parse_scheme("Zero a -> Hero a").unwrap())]);
//! let def = parse_definition("zeroToHero z = f z", &default_fixities()).unwrap();
//! assert_eq!(infer(&def, &env).unwrap().to_string(), "Zero a -> Hero a");
//! ```

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::path::SourcePath;
use crate::syntax::lexer::{tokenize, Spanned, Tok};
use crate::syntax::{print_constraint, Constraint, Scheme, SyntaxError, TypeExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Apply(Box<Expr>, Box<Expr>),
    Paren(Box<Expr>),
    Infix(String, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn apply(f: Expr, x: Expr) -> Expr {
        Expr::Apply(Box::new(f), Box::new(x))
    }

    pub fn infix(op: impl Into<String>, l: Expr, r: Expr) -> Expr {
        Expr::Infix(op.into(), Box::new(l), Box::new(r))
    }

    /// Number of application nodes, counting each infix use as two.
    pub fn applications(&self) -> usize {
        match self {
            Expr::Var(_) => 0,
            Expr::Apply(f, x) => 1 + f.applications() + x.applications(),
            Expr::Paren(e) => e.applications(),
            Expr::Infix(_, l, r) => 2 + l.applications() + r.applications(),
        }
    }

    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Apply(a, b) | Expr::Infix(_, a, b) => {
                if let Expr::Infix(op, ..) = self {
                    out.insert(op.clone());
                }
                a.collect_names(out);
                b.collect_names(out);
            }
            Expr::Paren(e) => e.collect_names(out),
        }
    }
}

fn is_operator(name: &str) -> bool {
    name.bytes().all(crate::syntax::lexer::is_op_char)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) if is_operator(v) => write!(f, "({v})"),
            Expr::Var(v) => f.write_str(v),
            Expr::Apply(g, x) => {
                match **g {
                    Expr::Infix(..) => write!(f, "({g})")?,
                    _ => write!(f, "{g}")?,
                }
                match **x {
                    Expr::Apply(..) | Expr::Infix(..) => write!(f, " ({x})"),
                    _ => write!(f, " {x}"),
                }
            }
            Expr::Paren(e) => write!(f, "({e})"),
            Expr::Infix(op, l, r) => write!(f, "{l} {op} {r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub params: Vec<String>,
    pub body: Expr,
}

impl fmt::Display for Definition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for p in &self.params {
            write!(f, " {p}")?;
        }
        write!(f, " = {}", self.body)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Assoc {
    Left,
    Right,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Fixity {
    pub assoc: Assoc,
    pub prec: u8,
}

pub type Fixities = BTreeMap<String, Fixity>;

/// Haskell's fixities for the operators the levels use.
pub fn default_fixities() -> Fixities {
    let fx = |assoc, prec| Fixity { assoc, prec };
    BTreeMap::from([
        ("$".to_string(), fx(Assoc::Right, 0)),
        (".".to_string(), fx(Assoc::Right, 9)),
        ("<$>".to_string(), fx(Assoc::Left, 4)),
        ("<*>".to_string(), fx(Assoc::Left, 4)),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown operator `{op}` at byte {offset}")]
    UnknownOperator { op: String, offset: usize },
    #[error("parameter `{name}` is bound twice")]
    DuplicateParam { name: String },
}

impl ExprError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ExprError::Syntax(e) => e.offset(),
            ExprError::UnknownOperator { offset, .. } => Some(*offset),
            ExprError::DuplicateParam { .. } => None,
        }
    }
}

struct ExprParser<'f> {
    toks: Vec<Spanned>,
    pos: usize,
    fixities: &'f Fixities,
}

impl ExprParser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ExprError {
        ExprError::Syntax(SyntaxError::Unexpected {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn definition(&mut self) -> Result<Definition, ExprError> {
        let Tok::Lower(name) = self.bump() else {
            self.pos = self.pos.saturating_sub(1);
            return Err(self.unexpected(&["a function name"]));
        };
        let mut params = Vec::new();
        while let Tok::Lower(p) = self.peek().clone() {
            if params.contains(&p) {
                return Err(ExprError::DuplicateParam { name: p });
            }
            params.push(p);
            self.bump();
        }
        if *self.peek() != Tok::Op("=".into()) {
            return Err(self.unexpected(&["a parameter", "`=`"]));
        }
        self.bump();
        let body = self.expr(0)?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected(&["an operator", "end of input"]));
        }
        Ok(Definition { name, params, body })
    }

    fn expr(&mut self, min_prec: u8) -> Result<Expr, ExprError> {
        let mut lhs = self.application()?;
        loop {
            let Tok::Op(op) = self.peek().clone() else { break };
            let fx = *self
                .fixities
                .get(&op)
                .ok_or_else(|| ExprError::UnknownOperator { op: op.clone(), offset: self.offset() })?;
            if fx.prec < min_prec {
                break;
            }
            self.bump();
            let next = if fx.assoc == Assoc::Right { fx.prec } else { fx.prec + 1 };
            let rhs = self.expr(next)?;
            lhs = Expr::infix(op, lhs, rhs);
            if fx.assoc == Assoc::None {
                if let Tok::Op(again) = self.peek() {
                    if self.fixities.get(again).is_some_and(|f| f.prec == fx.prec) {
                        return Err(self.unexpected(&["parentheses around a non-associative operator"]));
                    }
                }
            }
        }
        Ok(lhs)
    }

    fn application(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.atom()?;
        while matches!(self.peek(), Tok::Lower(_) | Tok::LParen) {
            e = Expr::apply(e, self.atom()?);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().clone() {
            Tok::Lower(v) => {
                self.bump();
                Ok(Expr::Var(v))
            }
            Tok::LParen => {
                self.bump();
                if let Tok::Op(op) = self.peek().clone() {
                    if self.toks[self.pos + 1].tok == Tok::RParen {
                        self.bump();
                        self.bump();
                        return Ok(Expr::Var(op));
                    }
                }
                let inner = self.expr(0)?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["`)`"]));
                }
                self.bump();
                Ok(Expr::Paren(Box::new(inner)))
            }
            Tok::Upper(_) => Err(ExprError::Syntax(SyntaxError::Unsupported {
                offset: self.offset(),
                message: "constructors are not available; use the provided functions".into(),
            })),
            _ => Err(self.unexpected(&["a name", "`(`"])),
        }
    }
}

/// Parses `name params = body`.
pub fn parse_definition(text: &str, fixities: &Fixities) -> Result<Definition, ExprError> {
    let toks = tokenize(text)?;
    ExprParser { toks, pos: 0, fixities }.definition()
}

/// Parses a bare expression.
pub fn parse_expr(text: &str, fixities: &Fixities) -> Result<Expr, ExprError> {
    let toks = tokenize(text)?;
    let mut p = ExprParser { toks, pos: 0, fixities };
    let e = p.expr(0)?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["an operator", "end of input"]));
    }
    Ok(e)
}

/// Substitution from inference variables to types, kept idempotent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst(BTreeMap<String, TypeExpr>);

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn singleton(var: impl Into<String>, t: TypeExpr) -> Self {
        Subst(BTreeMap::from([(var.into(), t)]))
    }

    pub fn get(&self, var: &str) -> Option<&TypeExpr> {
        self.0.get(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &TypeExpr)> {
        self.0.iter()
    }

    pub fn apply(&self, t: &TypeExpr) -> TypeExpr {
        if self.0.is_empty() {
            return t.clone();
        }
        match t {
            TypeExpr::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            TypeExpr::Con(_) => t.clone(),
            TypeExpr::App(a, b) => TypeExpr::app(self.apply(a), self.apply(b)),
            TypeExpr::Fun(a, b) => TypeExpr::fun(self.apply(a), self.apply(b)),
        }
    }

    /// Applies to constraint parameters, leaving inner-quantified names alone.
    pub fn apply_constraint(&self, c: &Constraint) -> Constraint {
        let mut inner = self.clone();
        for q in &c.quantified {
            inner.0.remove(q);
        }
        Constraint {
            class: c.class.clone(),
            params: c.params.iter().map(|p| inner.apply(p)).collect(),
            quantified: c.quantified.clone(),
            context: c.context.iter().map(|k| inner.apply_constraint(k)).collect(),
        }
    }

    /// `self.compose(other)` applies `other` first, then `self`.
    pub fn compose(&self, other: &Subst) -> Subst {
        let mut out: BTreeMap<String, TypeExpr> = other.0.iter().map(|(k, v)| (k.clone(), self.apply(v))).collect();
        for (k, v) in &self.0 {
            out.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Subst(out)
    }

    pub fn is_idempotent(&self) -> bool {
        self.0.values().all(|t| self.apply(t) == *t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("cannot construct the infinite type `{var} ~ {ty}`")]
    OccursCheck { var: String, ty: TypeExpr },
    #[error("cannot match `{left}` with `{right}`")]
    Mismatch { left: TypeExpr, right: TypeExpr },
}

/// Most general unifier of `a` and `b`.
pub fn unify(a: &TypeExpr, b: &TypeExpr) -> Result<Subst, UnifyError> {
    let mut s = Subst::new();
    unify_in(&mut s, a, b)?;
    Ok(s)
}

/// Extends `s` so that it also unifies `a` and `b`. On failure `s` is left
/// unchanged.
pub fn unify_in(s: &mut Subst, a: &TypeExpr, b: &TypeExpr) -> Result<(), UnifyError> {
    // Bindings are accumulated triangularly (a bound variable may map to a
    // type mentioning other bound variables) and flattened once at the end.
    let mut tri = s.0.clone();
    let before = tri.len();
    unify_tri(&mut tri, a, b).map_err(|e| match e {
        UnifyError::Mismatch { left, right } => {
            UnifyError::Mismatch { left: resolve_all(&tri, &left), right: resolve_all(&tri, &right) }
        }
        UnifyError::OccursCheck { var, ty } => UnifyError::OccursCheck { var, ty: resolve_all(&tri, &ty) },
    })?;
    if tri.len() != before {
        let flat: BTreeMap<String, TypeExpr> = tri.iter().map(|(k, v)| (k.clone(), resolve_all(&tri, v))).collect();
        s.0 = flat;
    }
    Ok(())
}

fn walk<'t>(tri: &'t BTreeMap<String, TypeExpr>, mut t: &'t TypeExpr) -> &'t TypeExpr {
    while let TypeExpr::Var(v) = t {
        match tri.get(v) {
            Some(next) => t = next,
            None => break,
        }
    }
    t
}

fn resolve_all(tri: &BTreeMap<String, TypeExpr>, t: &TypeExpr) -> TypeExpr {
    match walk(tri, t) {
        TypeExpr::App(a, b) => TypeExpr::app(resolve_all(tri, a), resolve_all(tri, b)),
        TypeExpr::Fun(a, b) => TypeExpr::fun(resolve_all(tri, a), resolve_all(tri, b)),
        leaf => leaf.clone(),
    }
}

fn occurs(tri: &BTreeMap<String, TypeExpr>, var: &str, t: &TypeExpr) -> bool {
    match walk(tri, t) {
        TypeExpr::Var(v) => v == var,
        TypeExpr::Con(_) => false,
        TypeExpr::App(a, b) | TypeExpr::Fun(a, b) => occurs(tri, var, a) || occurs(tri, var, b),
    }
}

/// Follows variable bindings; clones only what came out of `tri`, so the
/// result never borrows the map being extended.
fn walk_owned<'t>(tri: &BTreeMap<String, TypeExpr>, t: &'t TypeExpr) -> Cow<'t, TypeExpr> {
    match t {
        TypeExpr::Var(v) => match tri.get(v) {
            Some(next) => Cow::Owned(walk(tri, next).clone()),
            None => Cow::Borrowed(t),
        },
        _ => Cow::Borrowed(t),
    }
}

fn unify_tri(tri: &mut BTreeMap<String, TypeExpr>, a: &TypeExpr, b: &TypeExpr) -> Result<(), UnifyError> {
    use TypeExpr::*;
    let (wa, wb) = (walk_owned(tri, a), walk_owned(tri, b));
    match (&*wa, &*wb) {
        (Var(x), Var(y)) if x == y => Ok(()),
        (Var(x), t) | (t, Var(x)) => {
            if occurs(tri, x, t) {
                return Err(UnifyError::OccursCheck { var: x.clone(), ty: t.clone() });
            }
            tri.insert(x.clone(), t.clone());
            Ok(())
        }
        (Con(x), Con(y)) if x == y => Ok(()),
        (App(f1, a1), App(f2, a2)) | (Fun(f1, a1), Fun(f2, a2)) => {
            unify_tri(tri, f1, f2)?;
            unify_tri(tri, a1, a2)
        }
        _ => Err(UnifyError::Mismatch { left: wa.into_owned(), right: wb.into_owned() }),
    }
}

/// Unifies `a` with `b` and returns `t` under the unifier, without building
/// the full substitution. Used by the solution search's inner loop.
pub(crate) fn unify_then_resolve(a: &TypeExpr, b: &TypeExpr, t: &TypeExpr) -> Option<TypeExpr> {
    let mut tri = BTreeMap::new();
    unify_tri(&mut tri, a, b).ok()?;
    Some(resolve_all(&tri, t))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InferError {
    #[error("variable not in scope: `{name}`")]
    UnboundName { name: String, path: SourcePath },
    #[error("couldn't match expected type `{expected}` with actual type `{actual}`: {cause}")]
    Type { path: SourcePath, expected: TypeExpr, actual: TypeExpr, cause: UnifyError },
}

impl InferError {
    pub fn kind(&self) -> &'static str {
        match self {
            InferError::UnboundName { .. } => "unbound_name",
            InferError::Type { cause: UnifyError::OccursCheck { .. }, .. } => "occurs_check",
            InferError::Type { .. } => "mismatch",
        }
    }

    pub fn path(&self) -> &SourcePath {
        match self {
            InferError::UnboundName { path, .. } | InferError::Type { path, .. } => path,
        }
    }

    /// `{kind, path, left, right}`; `left` is the expected side.
    pub fn to_json(&self) -> serde_json::Value {
        let (left, right, detail) = match self {
            InferError::UnboundName { name, .. } => (name.clone(), String::new(), self.to_string()),
            InferError::Type { expected, actual, cause, .. } => {
                (expected.to_string(), actual.to_string(), cause.to_string())
            }
        };
        serde_json::json!({
            "kind": self.kind(),
            "path": self.path().to_string(),
            "left": left,
            "right": right,
            "message": detail,
        })
    }
}

impl Serialize for InferError {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

pub type Env = BTreeMap<String, Scheme>;

struct Infer<'e> {
    env: &'e Env,
    locals: BTreeMap<String, TypeExpr>,
    subst: Subst,
    next: usize,
}

impl Infer<'_> {
    fn fresh(&mut self) -> TypeExpr {
        let v = TypeExpr::Var(format!("t{}", self.next));
        self.next += 1;
        v
    }

    fn instantiate(&mut self, s: &Scheme) -> TypeExpr {
        let map: BTreeMap<String, TypeExpr> = s
            .body
            .vars()
            .into_iter()
            .chain(s.quantified.iter().cloned())
            .map(|v| (v, self.fresh()))
            .collect();
        Subst(map).apply(&s.body)
    }

    fn lookup(&mut self, name: &str, path: &SourcePath) -> Result<TypeExpr, InferError> {
        if let Some(t) = self.locals.get(name) {
            return Ok(t.clone());
        }
        match self.env.get(name) {
            Some(s) => Ok(self.instantiate(s)),
            None => Err(InferError::UnboundName { name: name.to_string(), path: path.clone() }),
        }
    }

    fn unify_at(&mut self, expected: &TypeExpr, actual: &TypeExpr, path: &SourcePath) -> Result<(), InferError> {
        unify_in(&mut self.subst, expected, actual).map_err(|cause| InferError::Type {
            path: path.clone(),
            expected: self.subst.apply(expected),
            actual: self.subst.apply(actual),
            cause,
        })
    }

    /// Applies a function of type `tf` (at `fpath`) to arguments, reporting
    /// argument mismatches at the argument's own path.
    fn apply(&mut self, tf: TypeExpr, fpath: &SourcePath, args: &[(TypeExpr, SourcePath)]) -> Result<TypeExpr, InferError> {
        let mut tf = tf;
        for (ta, apath) in args {
            tf = match self.subst.apply(&tf) {
                TypeExpr::Fun(dom, cod) => {
                    self.unify_at(&dom, ta, apath)?;
                    *cod
                }
                other => {
                    let res = self.fresh();
                    self.unify_at(&other, &TypeExpr::fun(ta.clone(), res.clone()), fpath)?;
                    res
                }
            };
        }
        Ok(tf)
    }

    fn expr(&mut self, e: &Expr, path: SourcePath) -> Result<TypeExpr, InferError> {
        match e {
            Expr::Var(v) => self.lookup(v, &path),
            Expr::Paren(inner) => self.expr(inner, path.child(0)),
            Expr::Apply(f, x) => {
                let tf = self.expr(f, path.child(0))?;
                let tx = self.expr(x, path.child(1))?;
                self.apply(tf, &path.child(0), &[(tx, path.child(1))])
            }
            Expr::Infix(op, l, r) => {
                let top = self.lookup(op, &path)?;
                let tl = self.expr(l, path.child(0))?;
                let tr = self.expr(r, path.child(1))?;
                self.apply(top, &path, &[(tl, path.child(0)), (tr, path.child(1))])
            }
        }
    }
}

/// Monomorphic type of a definition before generalization, with the
/// fresh-variable names used during inference.
pub fn infer_type(def: &Definition, env: &Env) -> Result<TypeExpr, InferError> {
    let mut st = Infer { env, locals: BTreeMap::new(), subst: Subst::new(), next: 0 };
    let mut params = Vec::new();
    for p in &def.params {
        let t = st.fresh();
        st.locals.insert(p.clone(), t.clone());
        params.push(t);
    }
    let body = st.expr(&def.body, SourcePath::body())?;
    let t = TypeExpr::arrows(params, body);
    Ok(st.subst.apply(&t))
}

/// Principal scheme of `def`, canonically renamed.
pub fn infer(def: &Definition, env: &Env) -> Result<Scheme, InferError> {
    Ok(generalize(infer_type(def, env)?))
}

/// Quantifies every variable of `t`. Kinds are inferred when consistent;
/// inference itself is kind-agnostic, so an ill-kinded result keeps `*`.
pub fn generalize(t: TypeExpr) -> Scheme {
    let s = Scheme::mono(t.clone()).unwrap_or_else(|_| Scheme {
        quantified: t.vars(),
        context: Vec::new(),
        body: t,
        kinds: BTreeMap::new(),
    });
    s.canonical()
}

pub const SKOLEM_PREFIX: char = '!';

/// Replaces every variable with a rigid constant of the same name.
pub fn skolemize(t: &TypeExpr) -> TypeExpr {
    match t {
        TypeExpr::Var(v) => TypeExpr::Con(format!("{SKOLEM_PREFIX}{v}")),
        TypeExpr::Con(_) => t.clone(),
        TypeExpr::App(a, b) => TypeExpr::app(skolemize(a), skolemize(b)),
        TypeExpr::Fun(a, b) => TypeExpr::fun(skolemize(a), skolemize(b)),
    }
}

fn skolemize_constraint(c: &Constraint) -> Constraint {
    let bound = |t: &TypeExpr| -> TypeExpr {
        // inner-quantified variables stay variables
        fn go(t: &TypeExpr, keep: &[String]) -> TypeExpr {
            match t {
                TypeExpr::Var(v) if keep.contains(v) => t.clone(),
                TypeExpr::Var(_) | TypeExpr::Con(_) => skolemize(t),
                TypeExpr::App(a, b) => TypeExpr::app(go(a, keep), go(b, keep)),
                TypeExpr::Fun(a, b) => TypeExpr::fun(go(a, keep), go(b, keep)),
            }
        }
        go(t, &c.quantified)
    };
    Constraint {
        class: c.class.clone(),
        params: c.params.iter().map(bound).collect(),
        quantified: c.quantified.clone(),
        context: c.context.iter().map(skolemize_constraint).collect(),
    }
}

/// True iff `specific` is an instance of `general`.
pub fn subsumes(general: &Scheme, specific: &Scheme) -> bool {
    let rigid = skolemize(&specific.body);
    let given: BTreeSet<String> =
        specific.context.iter().map(|c| print_constraint(&skolemize_constraint(c))).collect();
    let fresh: Subst = Subst(
        general
            .body
            .vars()
            .into_iter()
            .chain(general.quantified.iter().cloned())
            .chain(general.context.iter().flat_map(|c| c.free_vars()))
            .enumerate()
            .map(|(i, v)| (v, TypeExpr::Var(format!("g{i}"))))
            .collect(),
    );
    let Ok(s) = unify(&fresh.apply(&general.body), &rigid) else {
        return false;
    };
    general.context.iter().all(|c| {
        let wanted = s.apply_constraint(&fresh.apply_constraint(c));
        given.contains(&print_constraint(&wanted))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_scheme, parse_type};

    fn ty(s: &str) -> TypeExpr {
        parse_type(s).unwrap()
    }

    fn sch(s: &str) -> Scheme {
        parse_scheme(s).unwrap()
    }

    fn env(entries: &[(&str, &str)]) -> Env {
        entries.iter().map(|(n, t)| (n.to_string(), sch(t))).collect()
    }

    fn level4() -> Env {
        env(&[
            ("f1", "Zero a b -> Hero b a"),
            ("f2", "Zero a a -> Hero a a"),
            ("f3", "Zero a b -> Zero b a"),
            ("f4", "Zero a b -> Zero b b"),
            ("$", "(a -> b) -> a -> b"),
            (".", "(b -> c) -> (a -> b) -> a -> c"),
        ])
    }

    fn def(s: &str) -> Definition {
        parse_definition(s, &default_fixities()).unwrap()
    }

    #[test]
    fn parses_application() {
        let d = def("zeroToHero z = f z");
        assert_eq!(d.params, ["z"]);
        assert_eq!(d.body, Expr::apply(Expr::var("f"), Expr::var("z")));
    }

    #[test]
    fn fixities_shape_the_tree() {
        let d = def("zeroToHero z = f3 . f1 $ z");
        let expected = Expr::infix("$", Expr::infix(".", Expr::var("f3"), Expr::var("f1")), Expr::var("z"));
        assert_eq!(d.body, expected);

        let d = def("zeroToHero z = f2 z <*> (f1 z <*> f3 z)");
        let Expr::Infix(op, l, r) = &d.body else { panic!() };
        assert_eq!(op, "<*>");
        assert_eq!(**l, Expr::apply(Expr::var("f2"), Expr::var("z")));
        assert!(matches!(&**r, Expr::Paren(inner) if matches!(**inner, Expr::Infix(..))));

        let e = parse_expr("a <*> b <*> c", &default_fixities()).unwrap();
        let Expr::Infix(_, l, _) = e else { panic!() };
        assert!(matches!(*l, Expr::Infix(..)));
    }

    #[test]
    fn operator_sections_and_errors() {
        let e = parse_expr("($) f x", &default_fixities()).unwrap();
        assert_eq!(e, Expr::apply(Expr::apply(Expr::var("$"), Expr::var("f")), Expr::var("x")));
        assert_eq!(e.to_string(), "($) f x");
        let err = parse_expr("f >>= g", &default_fixities()).unwrap_err();
        assert_eq!(err, ExprError::UnknownOperator { op: ">>=".into(), offset: 2 });
        assert_eq!(parse_definition("zeroToHero z z = z", &default_fixities()).unwrap_err(), ExprError::DuplicateParam {
            name: "z".into()
        });
        assert_eq!(parse_definition("zeroToHero z = (f z", &default_fixities()).unwrap_err().offset(), Some(19));
    }

    #[test]
    fn unify_examples() {
        let s = unify(&ty("a"), &ty("Int")).unwrap();
        assert_eq!(s.get("a"), Some(&ty("Int")));
        assert_eq!(unify(&ty("a -> a"), &ty("Int -> Bool")), Err(UnifyError::Mismatch {
            left: ty("Int"),
            right: ty("Bool")
        }));
        assert!(matches!(unify(&ty("a"), &ty("[a]")), Err(UnifyError::OccursCheck { .. })));
    }

    #[test]
    fn bind_keeps_idempotence() {
        let s = unify(&ty("a -> b -> c"), &ty("b -> c -> Int")).unwrap();
        assert!(s.is_idempotent());
        assert_eq!(s.apply(&ty("a")), ty("Int"));
    }

    #[test]
    fn compose_order() {
        let s1 = Subst::singleton("a", ty("b"));
        let s2 = Subst::singleton("b", ty("Int"));
        assert_eq!(s2.compose(&s1).apply(&ty("a")), ty("Int"));
    }

    #[test]
    fn level_one() {
        let e = env(&[("f", "Zero a -> Hero a")]);
        assert_eq!(infer(&def("zeroToHero z = f z"), &e).unwrap().to_string(), "Zero a -> Hero a");
    }

    #[test]
    fn level_four() {
        let e = level4();
        assert_eq!(infer(&def("zeroToHero z = f2 (f4 z)"), &e).unwrap().to_string(), "Zero a b -> Hero b b");
        assert_eq!(infer(&def("zeroToHero z = f1 z"), &e).unwrap().to_string(), "Zero a b -> Hero b a");
        assert_eq!(infer(&def("zeroToHero z = f2 . f4 $ z"), &e).unwrap().to_string(), "Zero a b -> Hero b b");
    }

    #[test]
    fn unbound_names() {
        let err = infer(&def("zeroToHero z = g z"), &level4()).unwrap_err();
        assert_eq!(err, InferError::UnboundName { name: "g".into(), path: "0/0".parse().unwrap() });
        let err = infer(&def("zeroToHero z = f1 <*> z"), &level4()).unwrap_err();
        assert_eq!(err.kind(), "unbound_name");
    }

    #[test]
    fn type_errors_carry_both_sides() {
        let err = infer(&def("zeroToHero z = f1 (f1 z)"), &level4()).unwrap_err();
        let InferError::Type { path, expected, actual, .. } = &err else { panic!("{err}") };
        assert_eq!(path.to_string(), "0/1");
        assert_eq!(expected.spine().0, &TypeExpr::con("Zero"));
        assert_eq!(actual.spine().0, &TypeExpr::con("Hero"));
        let j = err.to_json();
        assert_eq!(j["kind"], "mismatch");
        assert_eq!(j["path"], "0/1");
        assert!(j["left"].as_str().unwrap().starts_with("Zero t"));
    }

    #[test]
    fn occurs_in_inference() {
        let e = env(&[("dup", "a -> (a, a)")]);
        let err = infer(&def("w x = x x"), &e).unwrap_err();
        assert_eq!(err.kind(), "occurs_check");
    }

    #[test]
    fn subsumption() {
        assert!(subsumes(&sch("a -> a"), &sch("Int -> Int")));
        assert!(!subsumes(&sch("Int -> Int"), &sch("a -> a")));
        assert!(subsumes(&sch("Zero a b -> Hero b b"), &sch("Zero x y -> Hero y y")));
        assert!(!subsumes(&sch("Zero a b -> Hero b a"), &sch("Zero a b -> Hero b b")));
        assert!(subsumes(&sch("a -> b"), &sch("a -> a")));
        assert!(!subsumes(&sch("a -> a"), &sch("a -> b")));
    }

    #[test]
    fn subsumption_with_contexts() {
        assert!(subsumes(&sch("Eq a => a -> a"), &sch("Eq b => b -> b")));
        assert!(!subsumes(&sch("Eq a => a -> a"), &sch("b -> b")));
        assert!(subsumes(&sch("a -> a"), &sch("Eq b => b -> b")));
        assert!(subsumes(&sch("Eq a => a -> a"), &sch("Eq Int => Int -> Int")));
    }

    #[test]
    fn stable_under_env_renaming() {
        let e = level4();
        let renamed: Env = e.iter().map(|(k, s)| (k.clone(), s.rename_vars(&|v: &str| format!("{v}x")))).collect();
        let d = def("zeroToHero z = f2 (f4 z)");
        assert_eq!(infer(&d, &e).unwrap(), infer(&d, &renamed).unwrap());
    }
}
