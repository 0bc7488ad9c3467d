use std::fmt;

use super::ParseError;

/// Byte range plus 1-based line/column of both ends.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl SourceSpan {
    /// Smallest span covering both.
    pub fn join(self, other: SourceSpan) -> SourceSpan {
        let (first, _) = if self.start <= other.start { (self, other) } else { (other, self) };
        let last = if self.end >= other.end { self } else { other };
        SourceSpan {
            start: first.start,
            start_line: first.start_line,
            start_col: first.start_col,
            end: last.end,
            end_line: last.end_line,
            end_col: last.end_col,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Numeric literal text: `12`, `0.75` or `3/4`.
    Number(String),
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
    Plus,
    Minus,
    Star,
    Slash,
    Amp,
    Bar,
    Bang,
    Arrow,
    Eq,
    Geq,
    Leq,
    Lt,
    Gt,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) | Tok::Number(s) => return write!(f, "`{s}`"),
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Bang => "!",
            Tok::Arrow => "->",
            Tok::Eq => "=",
            Tok::Geq => ">=",
            Tok::Leq => "<=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn mark(&self) -> (usize, usize, usize) {
        (self.pos, self.line, self.col)
    }

    fn span_from(&self, (start, line, col): (usize, usize, usize)) -> SourceSpan {
        SourceSpan {
            start,
            end: self.pos,
            start_line: line,
            start_col: col,
            end_line: self.line,
            end_col: self.col,
        }
    }
}

/// Splits `src` into tokens. `#` starts a comment running to end of line.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor { src, pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '#' {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let start = cur.mark();
        let Some(c) = cur.bump() else {
            out.push(Token { tok: Tok::Eof, span: cur.span_from(start) });
            return Ok(out);
        };
        let tok = match c {
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '!' => Tok::Bang,
            '=' => Tok::Eq,
            '-' => {
                if cur.peek() == Some('>') {
                    cur.bump();
                    Tok::Arrow
                } else {
                    Tok::Minus
                }
            }
            '>' => {
                if cur.peek() == Some('=') {
                    cur.bump();
                    Tok::Geq
                } else {
                    Tok::Gt
                }
            }
            '<' => {
                if cur.peek() == Some('=') {
                    cur.bump();
                    Tok::Leq
                } else {
                    Tok::Lt
                }
            }
            c if c.is_ascii_digit() => {
                let mut text = String::from(c);
                while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
                    text.push(d);
                    cur.bump();
                }
                let next_is_digit = cur.peek2().is_some_and(|d| d.is_ascii_digit());
                if cur.peek() == Some('.') && next_is_digit {
                    text.push('.');
                    cur.bump();
                    while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
                        text.push(d);
                        cur.bump();
                    }
                } else if cur.peek() == Some('/') && next_is_digit {
                    text.push('/');
                    cur.bump();
                    while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
                        text.push(d);
                        cur.bump();
                    }
                }
                Tok::Number(text)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::from(c);
                while let Some(d) = cur.peek().filter(|d| d.is_ascii_alphanumeric() || *d == '_') {
                    text.push(d);
                    cur.bump();
                }
                Tok::Ident(text)
            }
            other => {
                return Err(ParseError::Lex {
                    message: format!("unexpected character `{other}`"),
                    span: cur.span_from(start),
                })
            }
        };
        out.push(Token { tok, span: cur.span_from(start) });
    }
}
