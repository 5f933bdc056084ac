use super::lexer::{tokenize, Spanned, Tok};
use super::{tuple_con, Constraint, Scheme, SyntaxError, TypeExpr, LIST_CON, MAX_TUPLE_ARITY, UNIT_CON};

/// Parses a signature such as `(==) :: Eq a => a -> a -> Bool`.
///
/// A leading `name ::` is discarded. Free variables are quantified in
/// first-appearance order and kinds are inferred.
pub fn parse_scheme(text: &str) -> Result<Scheme, SyntaxError> {
    let mut p = Parser::new(text)?;
    p.skip_name_prefix();
    let explicit = if p.eat_lower("forall") { p.forall_binders()? } else { Vec::new() };
    let context = p.try_context()?.unwrap_or_default();
    let body = p.ty()?;
    p.expect_eof()?;
    Ok(Scheme::new(explicit, context, body)?)
}

/// Parses a bare type expression with no context or quantifier.
pub fn parse_type(text: &str) -> Result<TypeExpr, SyntaxError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Parser { toks: tokenize(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> SyntaxError {
        SyntaxError::Unexpected {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if o == op)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.is_op(op) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_lower(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Tok::Lower(w) if w == word) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["`->`", "a type", "end of input"]))
        }
    }

    /// Drops `name ::` or `(op) ::` when present.
    fn skip_name_prefix(&mut self) {
        let skip = match (self.peek_at(0), self.peek_at(1), self.peek_at(2), self.peek_at(3)) {
            (Tok::Lower(_), Tok::Op(o), _, _) if o == "::" => 2,
            (Tok::LParen, Tok::Op(_), Tok::RParen, Tok::Op(o)) if o == "::" => 4,
            _ => 0,
        };
        for _ in 0..skip {
            self.bump();
        }
    }

    fn forall_binders(&mut self) -> Result<Vec<String>, SyntaxError> {
        let mut vars = Vec::new();
        while let Tok::Lower(v) = self.peek() {
            if v == "forall" {
                break;
            }
            vars.push(v.clone());
            self.bump();
        }
        if vars.is_empty() {
            return Err(self.unexpected(&["a type variable"]));
        }
        if !self.eat_op(".") {
            return Err(self.unexpected(&["a type variable", "`.`"]));
        }
        Ok(vars)
    }

    /// Parses `context =>` if the upcoming tokens form one; otherwise
    /// rewinds and returns `None`.
    fn try_context(&mut self) -> Result<Option<Vec<Constraint>>, SyntaxError> {
        let save = self.pos;
        match self.context(0) {
            Ok(ctx) if self.is_op("=>") => {
                self.bump();
                Ok(Some(ctx))
            }
            Err(e @ SyntaxError::Unsupported { .. }) => Err(e),
            _ => {
                self.pos = save;
                Ok(None)
            }
        }
    }

    fn context(&mut self, depth: usize) -> Result<Vec<Constraint>, SyntaxError> {
        if *self.peek() != Tok::LParen {
            return Ok(vec![self.constraint(depth)?]);
        }
        self.bump();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(Vec::new());
        }
        let mut out = vec![self.constraint(depth)?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.constraint(depth)?);
        }
        self.expect(Tok::RParen, "`,` or `)`")?;
        Ok(out)
    }

    /// `(forall vs. (context =>)?)? Class atype+`; qualification is only
    /// accepted at the outermost level.
    fn constraint(&mut self, depth: usize) -> Result<Constraint, SyntaxError> {
        let mut quantified = Vec::new();
        let mut inner = Vec::new();
        if matches!(self.peek(), Tok::Lower(w) if w == "forall") {
            if depth > 0 {
                return Err(SyntaxError::Unsupported {
                    offset: self.offset(),
                    message: "nested qualified constraints are not supported".into(),
                });
            }
            self.bump();
            quantified = self.forall_binders()?;
            let save = self.pos;
            match self.context(depth + 1) {
                Ok(ctx) if self.is_op("=>") => {
                    self.bump();
                    inner = ctx;
                }
                Err(e @ SyntaxError::Unsupported { .. }) => return Err(e),
                _ => self.pos = save,
            }
        }
        let Tok::Upper(class) = self.peek().clone() else {
            return Err(self.unexpected(&["a class name"]));
        };
        self.bump();
        let mut params = Vec::new();
        while let Some(t) = self.atype_opt()? {
            params.push(t);
        }
        if params.is_empty() {
            return Err(self.unexpected(&["a class argument"]));
        }
        Ok(Constraint { class, params, quantified, context: inner })
    }

    fn ty(&mut self) -> Result<TypeExpr, SyntaxError> {
        let lhs = self.btype()?;
        if self.eat_op("->") {
            let rhs = self.ty()?;
            Ok(TypeExpr::fun(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn btype(&mut self) -> Result<TypeExpr, SyntaxError> {
        let Some(head) = self.atype_opt()? else {
            return Err(self.unexpected(&["a type"]));
        };
        let mut t = head;
        while let Some(arg) = self.atype_opt()? {
            t = TypeExpr::app(t, arg);
        }
        Ok(t)
    }

    fn atype_opt(&mut self) -> Result<Option<TypeExpr>, SyntaxError> {
        let t = match self.peek().clone() {
            Tok::Lower(v) => {
                if v == "forall" {
                    return Err(SyntaxError::Unsupported {
                        offset: self.offset(),
                        message: "`forall` is only allowed at the start of a signature or constraint".into(),
                    });
                }
                self.bump();
                TypeExpr::Var(v)
            }
            Tok::Upper(c) => {
                self.bump();
                TypeExpr::Con(c)
            }
            Tok::LBracket => {
                self.bump();
                if *self.peek() == Tok::RBracket {
                    self.bump();
                    return Ok(Some(TypeExpr::con(LIST_CON)));
                }
                let elem = self.ty()?;
                self.expect(Tok::RBracket, "`]`")?;
                TypeExpr::list(elem)
            }
            Tok::LParen => self.paren_type()?,
            _ => return Ok(None),
        };
        Ok(Some(t))
    }

    fn paren_type(&mut self) -> Result<TypeExpr, SyntaxError> {
        let open = self.offset();
        self.bump();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(TypeExpr::con(UNIT_CON));
        }
        if *self.peek() == Tok::Comma {
            let mut commas = 0;
            while *self.peek() == Tok::Comma {
                self.bump();
                commas += 1;
            }
            self.expect(Tok::RParen, "`)`")?;
            return tuple_check(open, commas + 1).map(|n| TypeExpr::con(tuple_con(n)));
        }
        let first = self.ty()?;
        let mut items = vec![first];
        while *self.peek() == Tok::Comma {
            self.bump();
            items.push(self.ty()?);
        }
        self.expect(Tok::RParen, if items.len() > 1 { "`,` or `)`" } else { "`)`" })?;
        if items.len() == 1 {
            return Ok(items.pop().unwrap());
        }
        tuple_check(open, items.len())?;
        Ok(TypeExpr::tuple(items))
    }
}

fn tuple_check(offset: usize, arity: usize) -> Result<usize, SyntaxError> {
    if arity > MAX_TUPLE_ARITY {
        Err(SyntaxError::Unsupported {
            offset,
            message: format!("tuples are limited to {MAX_TUPLE_ARITY} components, found {arity}"),
        })
    } else {
        Ok(arity)
    }
}
