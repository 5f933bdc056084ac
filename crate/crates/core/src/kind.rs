//! Kind inference for type variables.
//!
//! Every variable, constructor and class parameter position starts with an
//! unknown kind; uses add equations which are solved by unification. Kinds
//! left open default to `*`, so a variable only gets an arrow kind when an
//! application forces one.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{tuple_arity, Constraint, Scheme, TypeExpr, LIST_CON, UNIT_CON};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Star,
    Arrow(Box<Kind>, Box<Kind>),
}

impl Kind {
    pub fn arrow(from: Kind, to: Kind) -> Kind {
        Kind::Arrow(Box::new(from), Box::new(to))
    }

    /// `* -> * -> … -> *` with `n` arrows.
    pub fn of_arity(n: usize) -> Kind {
        (0..n).fold(Kind::Star, |k, _| Kind::arrow(Kind::Star, k))
    }

    /// Number of arguments a type of this kind accepts.
    pub fn arity(&self) -> usize {
        match self {
            Kind::Star => 0,
            Kind::Arrow(_, to) => 1 + to.arity(),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Star => f.write_str("*"),
            Kind::Arrow(a, b) if matches!(**a, Kind::Arrow(..)) => write!(f, "({a}) -> {b}"),
            Kind::Arrow(a, b) => write!(f, "{a} -> {b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KindError {
    #[error("kind mismatch for `{name}`: used both as {first} and as {second}")]
    KindMismatch { name: String, first: String, second: String },
    #[error("infinite kind for `{name}`")]
    Infinite { name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum K {
    Star,
    Var(usize),
    Arrow(Box<K>, Box<K>),
}

#[derive(Default)]
struct Solver {
    bindings: Vec<Option<K>>,
    names: BTreeMap<String, usize>,
}

impl Solver {
    fn fresh(&mut self) -> K {
        self.bindings.push(None);
        K::Var(self.bindings.len() - 1)
    }

    fn named(&mut self, key: String) -> K {
        if let Some(&i) = self.names.get(&key) {
            return K::Var(i);
        }
        let K::Var(i) = self.fresh() else { unreachable!() };
        self.names.insert(key, i);
        K::Var(i)
    }

    fn resolve(&self, k: &K) -> K {
        match k {
            K::Var(i) => match &self.bindings[*i] {
                Some(b) => self.resolve(b),
                None => k.clone(),
            },
            K::Arrow(a, b) => K::Arrow(Box::new(self.resolve(a)), Box::new(self.resolve(b))),
            K::Star => K::Star,
        }
    }

    fn occurs(&self, v: usize, k: &K) -> bool {
        match self.resolve(k) {
            K::Var(i) => i == v,
            K::Arrow(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
            K::Star => false,
        }
    }

    fn unify(&mut self, a: &K, b: &K, who: &str) -> Result<(), KindError> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (K::Star, K::Star) => Ok(()),
            (K::Var(i), K::Var(j)) if i == j => Ok(()),
            (K::Var(i), other) | (other, K::Var(i)) => {
                if self.occurs(*i, other) {
                    return Err(KindError::Infinite { name: who.to_string() });
                }
                self.bindings[*i] = Some(other.clone());
                Ok(())
            }
            (K::Arrow(a1, b1), K::Arrow(a2, b2)) => {
                self.unify(a1, a2, who)?;
                self.unify(b1, b2, who)
            }
            _ => Err(KindError::KindMismatch {
                name: who.to_string(),
                first: self.display(&a),
                second: self.display(&b),
            }),
        }
    }

    fn display(&self, k: &K) -> String {
        self.finish(k).to_string()
    }

    fn finish(&self, k: &K) -> Kind {
        match self.resolve(k) {
            K::Star | K::Var(_) => Kind::Star,
            K::Arrow(a, b) => Kind::arrow(self.finish(&a), self.finish(&b)),
        }
    }

    fn leaf_kind(&mut self, t: &TypeExpr) -> K {
        match t {
            TypeExpr::Var(v) => self.named(format!("v:{v}")),
            TypeExpr::Con(c) if c == LIST_CON => K::Arrow(Box::new(K::Star), Box::new(K::Star)),
            TypeExpr::Con(c) if c == UNIT_CON => K::Star,
            TypeExpr::Con(c) => match tuple_arity(c) {
                Some(n) => to_k(&Kind::of_arity(n)),
                None => self.named(format!("c:{c}")),
            },
            _ => unreachable!("leaf_kind on a compound type"),
        }
    }

    /// Returns the kind of `t`, recording constraints along the way.
    fn infer(&mut self, t: &TypeExpr) -> Result<K, KindError> {
        match t {
            TypeExpr::Var(_) | TypeExpr::Con(_) => Ok(self.leaf_kind(t)),
            TypeExpr::Fun(d, c) => {
                self.expect_star(d)?;
                self.expect_star(c)?;
                Ok(K::Star)
            }
            TypeExpr::App(..) => {
                let (head, args) = t.spine();
                let who = head.leaf_name().unwrap_or("->").to_string();
                let mut k = self.infer(head)?;
                for a in args {
                    let ka = self.infer(a)?;
                    let res = self.fresh();
                    self.unify(&k, &K::Arrow(Box::new(ka), Box::new(res.clone())), &who)?;
                    k = res;
                }
                Ok(k)
            }
        }
    }

    fn expect_star(&mut self, t: &TypeExpr) -> Result<(), KindError> {
        let k = self.infer(t)?;
        let who = t.spine().0.leaf_name().unwrap_or("->").to_string();
        self.unify(&k, &K::Star, &who)
    }

    fn constraint(&mut self, c: &Constraint) -> Result<(), KindError> {
        for (i, p) in c.params.iter().enumerate() {
            let k = self.infer(p)?;
            let slot = self.named(format!("k:{}:{i}", c.class));
            self.unify(&k, &slot, &c.class)?;
        }
        for inner in &c.context {
            self.constraint(inner)?;
        }
        Ok(())
    }
}

fn to_k(k: &Kind) -> K {
    match k {
        Kind::Star => K::Star,
        Kind::Arrow(a, b) => K::Arrow(Box::new(to_k(a)), Box::new(to_k(b))),
    }
}

/// Infers the minimal kind of every variable in `s`.
pub fn kind_infer(s: &Scheme) -> Result<BTreeMap<String, Kind>, KindError> {
    let mut solver = Solver::default();
    solver.expect_star(&s.body)?;
    for c in &s.context {
        solver.constraint(c)?;
    }
    let mut vars: Vec<String> = s.quantified.clone();
    for c in &s.context {
        for q in &c.quantified {
            if !vars.contains(q) {
                vars.push(q.clone());
            }
        }
    }
    let mut out = BTreeMap::new();
    for v in vars {
        let k = solver.named(format!("v:{v}"));
        out.insert(v, solver.finish(&k));
    }
    Ok(out)
}
