use super::{tuple_arity, Constraint, Scheme, TypeExpr, LIST_CON};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    /// Left of an arrow: arrows need parentheses.
    ArrowLhs,
    /// Argument position: applications need parentheses too.
    Arg,
}

/// Prints a type with the fewest parentheses that re-parse to the same tree.
pub fn print_type(t: &TypeExpr) -> String {
    let mut out = String::new();
    write_type(t, Prec::Top, &mut out);
    out
}

fn write_type(t: &TypeExpr, prec: Prec, out: &mut String) {
    match t {
        TypeExpr::Var(n) | TypeExpr::Con(n) => out.push_str(n),
        TypeExpr::Fun(d, c) => {
            let paren = prec > Prec::Top;
            if paren {
                out.push('(');
            }
            write_type(d, Prec::ArrowLhs, out);
            out.push_str(" -> ");
            write_type(c, Prec::Top, out);
            if paren {
                out.push(')');
            }
        }
        TypeExpr::App(..) => {
            let (head, args) = t.spine();
            if let TypeExpr::Con(name) = head {
                if name == LIST_CON && args.len() == 1 {
                    out.push('[');
                    write_type(args[0], Prec::Top, out);
                    out.push(']');
                    return;
                }
                if tuple_arity(name) == Some(args.len()) {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        write_type(a, Prec::Top, out);
                    }
                    out.push(')');
                    return;
                }
            }
            let paren = prec == Prec::Arg;
            if paren {
                out.push('(');
            }
            write_type(head, Prec::Arg, out);
            for a in args {
                out.push(' ');
                write_type(a, Prec::Arg, out);
            }
            if paren {
                out.push(')');
            }
        }
    }
}

pub fn print_constraint(c: &Constraint) -> String {
    let mut out = String::new();
    write_constraint(c, &mut out);
    out
}

fn write_constraint(c: &Constraint, out: &mut String) {
    if c.is_qualified() {
        out.push_str("forall");
        for v in &c.quantified {
            out.push(' ');
            out.push_str(v);
        }
        out.push_str(". ");
        if !c.context.is_empty() {
            write_context(&c.context, out);
            out.push_str(" => ");
        }
    }
    out.push_str(&c.class);
    for p in &c.params {
        out.push(' ');
        write_type(p, Prec::Arg, out);
    }
}

fn write_context(ctx: &[Constraint], out: &mut String) {
    let paren = ctx.len() != 1 || ctx[0].is_qualified();
    if paren {
        out.push('(');
    }
    for (i, c) in ctx.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_constraint(c, out);
    }
    if paren {
        out.push(')');
    }
}

/// Prints a scheme; `forall` appears only when the quantifier order differs
/// from the implicit first-appearance order.
pub fn print_scheme(s: &Scheme) -> String {
    let mut out = String::new();
    if s.quantified != s.implicit_order() {
        out.push_str("forall");
        for v in &s.quantified {
            out.push(' ');
            out.push_str(v);
        }
        out.push_str(". ");
    }
    if !s.context.is_empty() {
        write_context(&s.context, &mut out);
        out.push_str(" => ");
    }
    write_type(&s.body, Prec::Top, &mut out);
    out
}
