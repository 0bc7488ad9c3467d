//! Concrete text syntax: parsing into the AST and printing back.
//!
//! ```text
//! object pred Bird/1;
//! object pred Fly/1;
//! [Fly(x) | Bird(x)]{x} > 9/10;
//! ```
//!
//! A source text is a header of declarations followed by items (formulas
//! or terms), each terminated by `;` (optional on the last one).

mod lexer;
mod parse;
mod print;

use thiserror::Error;

pub use lexer::SourceSpan;
pub use print::{print_ast, print_formula, print_term};

use crate::syntax::{Formula, NodePath, SortError, Term, VocabError, Vocabulary};
use parse::Parser;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{span}: lexical error: {message}")]
    Lex { message: String, span: SourceSpan },
    #[error("{span}: syntax error: {message}")]
    Syntax { message: String, span: SourceSpan },
    #[error("{span}: {error}")]
    Sort { error: SortError, span: SourceSpan },
    #[error("{span}: {error}")]
    Vocab { error: VocabError, span: SourceSpan },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Lex { span, .. }
            | ParseError::Syntax { span, .. }
            | ParseError::Sort { span, .. }
            | ParseError::Vocab { span, .. } => *span,
        }
    }
}

/// A parsed item: sentences and formulas, or bare terms.
#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Formula(Formula),
    Term(Term),
}

/// Source spans mirroring the shape of a parsed node: `children[i]` is the
/// span tree of the node's `i`-th child in [`crate::syntax::Node::children`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanTree {
    pub span: SourceSpan,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    pub fn new(span: SourceSpan, children: Vec<SpanTree>) -> Self {
        SpanTree { span, children }
    }

    pub fn leaf(span: SourceSpan) -> Self {
        SpanTree { span, children: Vec::new() }
    }

    /// Span of the node at `path`, or of its deepest existing ancestor.
    pub fn lookup(&self, path: &NodePath) -> SourceSpan {
        let mut cur = self;
        for &i in &path.0 {
            match cur.children.get(i) {
                Some(c) => cur = c,
                None => break,
            }
        }
        cur.span
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Parsed<T> {
    pub node: T,
    pub spans: SpanTree,
}

/// A whole `.lp` text: its declarations merged into the base vocabulary,
/// and its items in order.
#[derive(Clone, Debug)]
pub struct LpFile {
    pub vocab: Vocabulary,
    pub items: Vec<Parsed<Ast>>,
}

impl LpFile {
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.items.iter().filter_map(|p| match &p.node {
            Ast::Formula(f) => Some(f),
            Ast::Term(_) => None,
        })
    }
}

pub fn parse_file(text: &str, base: &Vocabulary) -> Result<LpFile, ParseError> {
    let mut vocab = base.clone();
    let mut items = Vec::new();
    {
        let mut p = Parser::new(text, &mut vocab)?;
        while !p.at_eof() {
            if p.at_declaration() {
                p.declaration()?;
            } else {
                items.push(p.item()?);
            }
        }
    }
    Ok(LpFile { vocab, items })
}

/// Parses exactly one item, optionally preceded by declarations.
pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Parsed<Ast>, ParseError> {
    let mut vocab = vocab.clone();
    let mut p = Parser::new(text, &mut vocab)?;
    while p.at_declaration() {
        p.declaration()?;
    }
    if p.at_eof() {
        return Err(ParseError::Syntax {
            message: "empty input".into(),
            span: SourceSpan::default(),
        });
    }
    let item = p.item()?;
    if !p.at_eof() {
        return Err(ParseError::Syntax {
            message: "expected exactly one sentence or term".into(),
            span: item.spans.span,
        });
    }
    Ok(item)
}

pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Parsed<Formula>, ParseError> {
    let parsed = parse(text, vocab)?;
    match parsed.node {
        Ast::Formula(f) => Ok(Parsed { node: f, spans: parsed.spans }),
        Ast::Term(_) => Err(ParseError::Syntax {
            message: "expected a formula, found a term".into(),
            span: parsed.spans.span,
        }),
    }
}

pub fn parse_term(text: &str, vocab: &Vocabulary) -> Result<Parsed<Term>, ParseError> {
    let parsed = parse(text, vocab)?;
    match parsed.node {
        Ast::Term(t) => Ok(Parsed { node: t, spans: parsed.spans }),
        Ast::Formula(_) => Err(ParseError::Syntax {
            message: "expected a term, found a formula".into(),
            span: parsed.spans.span,
        }),
    }
}

#[cfg(test)]
mod tests;
