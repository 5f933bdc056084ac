use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Lower(String),
    Upper(String),
    /// Symbolic operator, including `->`, `=>`, `::` and `.`.
    Op(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
            Tok::Op(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub offset: usize,
}

pub(crate) fn is_op_char(c: u8) -> bool {
    b"!#$%&*+./<=>?@\\^|-~:".contains(&c)
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'\''
}

/// Tokenizes ASCII source. Shared by the type and expression parsers.
pub(crate) fn tokenize(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if !c.is_ascii() {
            return Err(SyntaxError::Unsupported { offset: i, message: "non-ASCII character".into() });
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'[' => {
                i += 1;
                Tok::LBracket
            }
            b']' => {
                i += 1;
                Tok::RBracket
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && is_ident_char(bytes[i]) {
                    i += 1;
                }
                let word = src[start..i].to_string();
                if c.is_ascii_uppercase() {
                    Tok::Upper(word)
                } else {
                    Tok::Lower(word)
                }
            }
            c if is_op_char(c) => {
                while i < bytes.len() && is_op_char(bytes[i]) {
                    i += 1;
                }
                Tok::Op(src[start..i].to_string())
            }
            _ => {
                return Err(SyntaxError::Unexpected {
                    offset: i,
                    expected: vec!["a token".into()],
                    found: format!("`{}`", c as char),
                })
            }
        };
        out.push(Spanned { tok, offset: start });
    }
    out.push(Spanned { tok: Tok::Eof, offset: bytes.len() });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_offsets() {
        let toks = tokenize("f :: (a, b) -> [c]").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Lower("f".into()),
                Tok::Op("::".into()),
                Tok::LParen,
                Tok::Lower("a".into()),
                Tok::Comma,
                Tok::Lower("b".into()),
                Tok::RParen,
                Tok::Op("->".into()),
                Tok::LBracket,
                Tok::Lower("c".into()),
                Tok::RBracket,
                Tok::Eof,
            ]
        );
        assert_eq!(toks[7].offset, 12);
    }

    #[test]
    fn glued_arrow() {
        // `c->` appears verbatim in one of the shipped levels
        let toks = tokenize("c-> d").unwrap();
        assert_eq!(toks[1].tok, Tok::Op("->".into()));
    }

    #[test]
    fn rejects_unicode() {
        let err = tokenize("a → b").unwrap_err();
        assert_eq!(err.offset(), Some(2));
    }
}
