//! Small line/column tracking lexer shared by the model, formula and prophecy
//! grammars.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(u64),
    Sym(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

// Longest symbols first.
const SYMBOLS: &[&str] = &[
    "<->", "->", "&&", "||", "!", "(", ")", "[", "]", "{", "}", ":", ";", ",", ".",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '+' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (lineno, raw) in src.lines().enumerate() {
        let line = lineno + 1;
        let text = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if is_ident_start(c) {
                let start = i;
                while i < chars.len() && is_ident_continue(chars[i]) {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token {
                    kind: TokenKind::Ident(s),
                    line,
                    col,
                });
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s
                    .parse::<u64>()
                    .map_err(|_| ParseError::new(line, col, format!("integer out of range: {s}")))?;
                out.push(Token {
                    kind: TokenKind::Int(n),
                    line,
                    col,
                });
                continue;
            }
            let rest: String = chars[i..].iter().take(3).collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(sym) => {
                    out.push(Token {
                        kind: TokenKind::Sym(sym),
                        line,
                        col,
                    });
                    i += sym.len();
                }
                None => {
                    return Err(ParseError::new(
                        line,
                        col,
                        format!("unexpected character '{c}'"),
                    ))
                }
            }
        }
    }
    Ok(out)
}

/// Cursor over a token stream with position-aware error helpers.
pub struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(src)?;
        let lines = src.lines().count().max(1);
        let last_len = src.lines().last().map(|l| l.chars().count()).unwrap_or(0);
        Ok(Cursor {
            tokens,
            pos: 0,
            end: (lines, last_len + 1),
        })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    pub fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    pub fn peek_nth(&self, n: usize) -> Option<&Token> {
        self.tokens.get(self.pos + n)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = match self.peek() {
            Some(t) => (t.line, t.col),
            None => self.end,
        };
        ParseError::new(line, col, msg)
    }

    pub fn is_sym(&self, sym: &str) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Sym(s)) if *s == sym)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Ident(s)) if s == kw)
    }

    pub fn eat_sym(&mut self, sym: &str) -> bool {
        if self.is_sym(sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected '{sym}'{}", self.found())))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected '{kw}'{}", self.found())))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        match self.peek().cloned() {
            Some(Token {
                kind: TokenKind::Ident(s),
                line,
                col,
            }) => {
                self.pos += 1;
                Ok((s, line, col))
            }
            _ => Err(self.error_here(format!("expected identifier{}", self.found()))),
        }
    }

    pub fn expect_int(&mut self) -> Result<u64, ParseError> {
        match self.peek_kind() {
            Some(TokenKind::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error_here(format!("expected integer{}", self.found()))),
        }
    }

    fn found(&self) -> String {
        match self.peek_kind() {
            None => ", found end of input".to_string(),
            Some(TokenKind::Ident(s)) => format!(", found '{s}'"),
            Some(TokenKind::Int(n)) => format!(", found '{n}'"),
            Some(TokenKind::Sym(s)) => format!(", found '{s}'"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_carry_positions() {
        let toks = tokenize("aps: a;\n  state s_A+ {").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Ident("aps".into()));
        let st = toks.iter().find(|t| t.kind == TokenKind::Ident("s_A+".into())).unwrap();
        assert_eq!((st.line, st.col), (2, 9));
    }

    #[test]
    fn comments_and_longest_symbols() {
        let toks = tokenize("a <-> b # ignored -> x\n->").unwrap();
        let kinds: Vec<_> = toks.into_iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Sym("<->"),
                TokenKind::Ident("b".into()),
                TokenKind::Sym("->"),
            ]
        );
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("a $ b").unwrap_err();
        assert_eq!((err.line, err.col), (1, 3));
    }
}
