//! Recursive-descent parser.
//!
//! Formula precedence, loosest first: `->` (right), `|`/`or`, `&`, `!`,
//! comparisons. Term precedence: `+ -` then `* /`. Quantifiers extend as
//! far right as possible. Inside `[ .. ]` a bare `|` separates the
//! conditioning formula, so disjunction there must be written `or`.

use super::lexer::{tokenize, SourceSpan, Tok, Token};
use super::{Ast, ParseError, Parsed, SpanTree};
use crate::rational::Rational;
use crate::syntax::{
    well_formed, ArithOp, Formula, FuncKind, Node, Sort, Symbol, Term, Var, Vocabulary, RESERVED,
};

pub(super) struct Parser<'v> {
    toks: Vec<Token>,
    pos: usize,
    pub(super) vocab: &'v mut Vocabulary,
    scope: Vec<Var>,
    bracket_depth: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'v> Parser<'v> {
    pub(super) fn new(text: &str, vocab: &'v mut Vocabulary) -> PResult<Self> {
        Ok(Parser { toks: tokenize(text)?, pos: 0, vocab, scope: Vec::new(), bracket_depth: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax { message: message.into(), span: self.span() })
    }

    fn expect(&mut self, tok: &Tok) -> PResult<SourceSpan> {
        if self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.syntax(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            other => self.syntax(format!("expected {what}, found {other}")),
        }
    }

    pub(super) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    // ----- declarations -------------------------------------------------

    pub(super) fn at_declaration(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) if s == "measure" => true,
            Tok::Ident(s) if s == "object" || s == "field" => {
                matches!(self.peek_at(1), Tok::Ident(k) if ["pred", "func", "const", "var"].contains(&k.as_str()))
            }
            _ => false,
        }
    }

    /// `object pred Bird/1;`, `field var y;`, `measure weight/1;` ...
    pub(super) fn declaration(&mut self) -> PResult<()> {
        let start = self.span();
        let (head, _) = match self.peek().clone() {
            Tok::Ident(s) => (s, self.bump().span),
            other => return self.syntax(format!("expected declaration, found {other}")),
        };
        let symbol_for = |p: &mut Self, sort: Option<Sort>| -> PResult<(String, Symbol)> {
            let kind = match sort {
                None => "measure".to_string(),
                Some(_) => match p.peek().clone() {
                    Tok::Ident(k) => {
                        p.bump();
                        k
                    }
                    other => return p.syntax(format!("expected pred/func/const/var, found {other}")),
                },
            };
            let (name, _) = p.ident("symbol name")?;
            let arity = |p: &mut Self| -> PResult<usize> {
                p.expect(&Tok::Slash)?;
                match p.peek().clone() {
                    Tok::Number(n) if n.chars().all(|c| c.is_ascii_digit()) => {
                        p.bump();
                        n.parse().map_err(|_| ParseError::Syntax {
                            message: "arity too large".into(),
                            span: p.prev_span(),
                        })
                    }
                    other => p.syntax(format!("expected arity, found {other}")),
                }
            };
            let sym = match (sort, kind.as_str()) {
                (None, _) => Symbol::Measure { arity: arity(p)? },
                (Some(s), "pred") => Symbol::Predicate { sort: s, arity: arity(p)? },
                (Some(s), "func") => Symbol::Function { sort: s, arity: arity(p)? },
                (Some(s), "const") => Symbol::Constant(s),
                (Some(s), "var") => Symbol::Variable(s),
                _ => return p.syntax(format!("unknown declaration kind `{kind}`")),
            };
            Ok((name, sym))
        };
        let (name, sym) = match head.as_str() {
            "measure" => symbol_for(self, None)?,
            "object" => symbol_for(self, Some(Sort::Object))?,
            "field" => symbol_for(self, Some(Sort::Field))?,
            _ => return self.syntax(format!("expected declaration, found `{head}`")),
        };
        self.expect(&Tok::Semi)?;
        let span = start.join(self.prev_span());
        self.vocab.declare(&name, sym).map_err(|error| ParseError::Vocab { error, span })
    }

    // ----- items ----------------------------------------------------------

    /// A formula, or failing that a term, followed by `;` or end of input.
    pub(super) fn item(&mut self) -> PResult<Parsed<Ast>> {
        let start = self.pos;
        let scope = self.scope.len();
        let formula_err = match self.formula_then_end() {
            Ok((f, spans)) => return self.checked(Ast::Formula(f), spans),
            Err(e) => e,
        };
        self.pos = start;
        self.scope.truncate(scope);
        self.bracket_depth = 0;
        match self.term().and_then(|t| self.end_of_item().map(|_| t)) {
            Ok((t, spans)) => self.checked(Ast::Term(t), spans),
            Err(term_err) => {
                if term_err.span().start > formula_err.span().start {
                    Err(term_err)
                } else {
                    Err(formula_err)
                }
            }
        }
    }

    fn formula_then_end(&mut self) -> PResult<(Formula, SpanTree)> {
        let r = self.formula()?;
        self.end_of_item()?;
        Ok(r)
    }

    fn end_of_item(&mut self) -> PResult<()> {
        if self.eat(&Tok::Semi) || self.at_eof() {
            Ok(())
        } else {
            self.syntax(format!("expected `;` or end of input, found {}", self.peek()))
        }
    }

    fn checked(&self, node: Ast, spans: SpanTree) -> PResult<Parsed<Ast>> {
        let res = match &node {
            Ast::Formula(f) => well_formed(Node::Formula(f), self.vocab),
            Ast::Term(t) => well_formed(Node::Term(t), self.vocab),
        };
        match res {
            Ok(()) => Ok(Parsed { node, spans }),
            Err(error) => {
                let span = spans.lookup(error.path());
                Err(ParseError::Sort { error, span })
            }
        }
    }

    // ----- formulas -------------------------------------------------------

    pub(super) fn formula(&mut self) -> PResult<(Formula, SpanTree)> {
        let (lhs, ls) = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let (rhs, rs) = self.formula()?;
            let span = ls.span.join(rs.span);
            return Ok((Formula::implies(lhs, rhs), SpanTree::new(span, vec![ls, rs])));
        }
        Ok((lhs, ls))
    }

    fn at_disjunction(&self) -> bool {
        self.is_keyword("or") || (self.bracket_depth == 0 && *self.peek() == Tok::Bar)
    }

    fn disjunction(&mut self) -> PResult<(Formula, SpanTree)> {
        let (mut lhs, mut ls) = self.conjunction()?;
        while self.at_disjunction() {
            self.bump();
            let (rhs, rs) = self.conjunction()?;
            let span = ls.span.join(rs.span);
            lhs = Formula::or(lhs, rhs);
            ls = SpanTree::new(span, vec![ls, rs]);
        }
        Ok((lhs, ls))
    }

    fn conjunction(&mut self) -> PResult<(Formula, SpanTree)> {
        let (mut lhs, mut ls) = self.unary()?;
        while self.eat(&Tok::Amp) {
            let (rhs, rs) = self.unary()?;
            let span = ls.span.join(rs.span);
            lhs = Formula::and(lhs, rhs);
            ls = SpanTree::new(span, vec![ls, rs]);
        }
        Ok((lhs, ls))
    }

    fn unary(&mut self) -> PResult<(Formula, SpanTree)> {
        if *self.peek() == Tok::Bang {
            let start = self.bump().span;
            let (inner, is) = self.unary()?;
            let span = start.join(is.span);
            return Ok((Formula::not(inner), SpanTree::new(span, vec![is])));
        }
        if self.is_keyword("forall") || self.is_keyword("exists") {
            return self.quantifier();
        }
        self.atomic()
    }

    fn quantifier(&mut self) -> PResult<(Formula, SpanTree)> {
        let start = self.span();
        let universal = matches!(self.bump().tok, Tok::Ident(ref s) if s == "forall");
        let mut vars = Vec::new();
        loop {
            let (name, _) = self.ident("variable")?;
            let sort = if self.eat(&Tok::Colon) {
                let sort = match self.peek() {
                    Tok::Ident(s) if s == "object" => Sort::Object,
                    Tok::Ident(s) if s == "field" => Sort::Field,
                    other => {
                        return self.syntax(format!("expected `object` or `field`, found {other}"))
                    }
                };
                self.bump();
                sort
            } else {
                match self.vocab.get(&name) {
                    Some(Symbol::Variable(s)) => *s,
                    _ => Sort::Object,
                }
            };
            vars.push(Var { name, sort });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::Dot)?;
        let n = self.scope.len();
        self.scope.extend(vars.iter().cloned());
        let body = self.formula();
        self.scope.truncate(n);
        let (mut f, mut tree) = body?;
        let span = start.join(tree.span);
        for v in vars.into_iter().rev() {
            f = if universal { Formula::forall(v, f) } else { Formula::exists(v, f) };
            tree = SpanTree::new(span, vec![tree]);
        }
        Ok((f, tree))
    }

    fn at_predicate(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => {
                !self.scope.iter().any(|v| &v.name == s)
                    && matches!(self.vocab.get(s), Some(Symbol::Predicate { .. }))
            }
            _ => false,
        }
    }

    fn atomic(&mut self) -> PResult<(Formula, SpanTree)> {
        if self.at_predicate() {
            return self.predicate();
        }
        if *self.peek() == Tok::LParen {
            let start = self.pos;
            let scope = self.scope.len();
            let depth = self.bracket_depth;
            let cmp_err = match self.comparison() {
                Ok(r) => return Ok(r),
                Err(e) => e,
            };
            self.pos = start;
            self.scope.truncate(scope);
            self.bracket_depth = depth;
            let open = self.bump().span;
            let inner = self.formula().and_then(|r| {
                if *self.peek() == Tok::Bar {
                    return self.syntax("`|` inside probability brackets is conditioning; write `or` for disjunction");
                }
                self.expect(&Tok::RParen).map(|close| (r, close))
            });
            return match inner {
                Ok(((f, mut tree), close)) => {
                    tree.span = open.join(close);
                    Ok((f, tree))
                }
                Err(e) => Err(if e.span().start >= cmp_err.span().start { e } else { cmp_err }),
            };
        }
        self.comparison()
    }

    fn predicate(&mut self) -> PResult<(Formula, SpanTree)> {
        let (name, start) = self.ident("predicate")?;
        let (args, trees, end) = if *self.peek() == Tok::LParen {
            self.arguments()?
        } else {
            (Vec::new(), Vec::new(), start)
        };
        Ok((Formula::Pred { name, args }, SpanTree::new(start.join(end), trees)))
    }

    fn arguments(&mut self) -> PResult<(Vec<Term>, Vec<SpanTree>, SourceSpan)> {
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        let mut trees = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let (t, tree) = self.term()?;
                args.push(t);
                trees.push(tree);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        let end = self.expect(&Tok::RParen)?;
        Ok((args, trees, end))
    }

    fn comparison(&mut self) -> PResult<(Formula, SpanTree)> {
        let (lhs, ls) = self.term()?;
        if self.is_keyword("in") {
            self.bump();
            self.expect(&Tok::LBracket)?;
            let (lo, los) = self.term()?;
            self.expect(&Tok::Comma)?;
            let (hi, his) = self.term()?;
            let end = self.expect(&Tok::RBracket)?;
            let span = ls.span.join(end);
            return Ok((Formula::InInterval(lhs, lo, hi), SpanTree::new(span, vec![ls, los, his])));
        }
        let op = self.peek().clone();
        let make: fn(Term, Term) -> Formula = match op {
            Tok::Eq => |l, r| Formula::Eq { sort: l.sort(), lhs: l, rhs: r },
            Tok::Geq => Formula::Geq,
            Tok::Leq => Formula::Leq,
            Tok::Lt => Formula::Lt,
            Tok::Gt => Formula::Gt,
            other => return self.syntax(format!("expected a comparison, found {other}")),
        };
        self.bump();
        let (rhs, rs) = self.term()?;
        let span = ls.span.join(rs.span);
        Ok((make(lhs, rhs), SpanTree::new(span, vec![ls, rs])))
    }

    // ----- terms ----------------------------------------------------------

    pub(super) fn term(&mut self) -> PResult<(Term, SpanTree)> {
        let (mut lhs, mut ls) = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => break,
            };
            self.bump();
            let (rhs, rs) = self.product()?;
            let span = ls.span.join(rs.span);
            lhs = Term::arith(op, lhs, rhs);
            ls = SpanTree::new(span, vec![ls, rs]);
        }
        Ok((lhs, ls))
    }

    fn product(&mut self) -> PResult<(Term, SpanTree)> {
        let (mut lhs, mut ls) = self.primary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                _ => break,
            };
            self.bump();
            let (rhs, rs) = self.primary()?;
            let span = ls.span.join(rs.span);
            lhs = Term::arith(op, lhs, rhs);
            ls = SpanTree::new(span, vec![ls, rs]);
        }
        Ok((lhs, ls))
    }

    fn number(&mut self, negative: bool, start: SourceSpan) -> PResult<(Term, SpanTree)> {
        let tok = self.bump();
        let Tok::Number(text) = tok.tok else { unreachable!("checked by caller") };
        let span = start.join(tok.span);
        let mut value: Rational = text.parse().map_err(|e| ParseError::Lex {
            message: format!("bad numeric literal: {e}"),
            span,
        })?;
        if negative {
            value = -value;
        }
        Ok((Term::Num(value), SpanTree::leaf(span)))
    }

    fn primary(&mut self) -> PResult<(Term, SpanTree)> {
        match self.peek().clone() {
            Tok::Number(_) => {
                let start = self.span();
                self.number(false, start)
            }
            Tok::Minus if matches!(self.peek_at(1), Tok::Number(_)) => {
                let start = self.bump().span;
                self.number(true, start)
            }
            Tok::LParen => {
                let open = self.bump().span;
                let (t, mut tree) = self.term()?;
                let close = self.expect(&Tok::RParen)?;
                tree.span = open.join(close);
                Ok((t, tree))
            }
            Tok::LBracket => self.probability(),
            Tok::Ident(_) => self.identifier_term(),
            other => self.syntax(format!("expected a term, found {other}")),
        }
    }

    fn probability(&mut self) -> PResult<(Term, SpanTree)> {
        let open = self.expect(&Tok::LBracket)?;
        // Binder variables come after the body, so scan ahead for `]{..}`.
        let vars = self.lookahead_binders()?;
        let n = self.scope.len();
        self.scope.extend(vars.iter().map(|v| Var::object(v.clone())));
        self.bracket_depth += 1;
        let body = self.probability_body();
        self.bracket_depth -= 1;
        self.scope.truncate(n);
        let (body, bs, given) = body?;
        self.expect(&Tok::RBracket)?;
        self.expect(&Tok::LBrace)?;
        let mut parsed_vars = Vec::new();
        if *self.peek() != Tok::RBrace {
            loop {
                parsed_vars.push(self.ident("variable")?.0);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        let close = self.expect(&Tok::RBrace)?;
        debug_assert_eq!(parsed_vars, vars);
        let span = open.join(close);
        Ok(match given {
            None => (Term::Prob { body: Box::new(body), vars }, SpanTree::new(span, vec![bs])),
            Some((g, gs)) => (
                Term::CondProb { body: Box::new(body), given: Box::new(g), vars },
                SpanTree::new(span, vec![bs, gs]),
            ),
        })
    }

    #[allow(clippy::type_complexity)]
    fn probability_body(&mut self) -> PResult<(Formula, SpanTree, Option<(Formula, SpanTree)>)> {
        let (body, bs) = self.formula()?;
        let given = if self.eat(&Tok::Bar) { Some(self.formula()?) } else { None };
        Ok((body, bs, given))
    }

    /// Finds the `]{x, y}` closing the bracket opened just before `self.pos`.
    fn lookahead_binders(&self) -> PResult<Vec<String>> {
        let mut depth = 1usize;
        let mut i = self.pos;
        while i < self.toks.len() {
            match &self.toks[i].tok {
                Tok::LBracket => depth += 1,
                Tok::RBracket => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                Tok::Eof => break,
                _ => {}
            }
            i += 1;
        }
        let err = |span: SourceSpan, message: &str| ParseError::Syntax { message: message.into(), span };
        if i >= self.toks.len() || self.toks[i].tok != Tok::RBracket {
            return Err(err(self.toks[i.min(self.toks.len() - 1)].span, "unclosed probability bracket"));
        }
        i += 1;
        if self.toks.get(i).map(|t| &t.tok) != Some(&Tok::LBrace) {
            let span = self.toks[i.min(self.toks.len() - 1)].span;
            return Err(err(span, "probability term needs a variable list `{x, ..}` after `]`"));
        }
        i += 1;
        let mut vars = Vec::new();
        loop {
            match self.toks.get(i).map(|t| &t.tok) {
                Some(Tok::Ident(s)) if !RESERVED.contains(&s.as_str()) => vars.push(s.clone()),
                Some(Tok::RBrace) if vars.is_empty() => break,
                _ => {
                    let span = self.toks[i.min(self.toks.len() - 1)].span;
                    return Err(err(span, "expected a variable in the binder list"));
                }
            }
            i += 1;
            match self.toks.get(i).map(|t| &t.tok) {
                Some(Tok::Comma) => i += 1,
                Some(Tok::RBrace) => break,
                _ => {
                    let span = self.toks[i.min(self.toks.len() - 1)].span;
                    return Err(err(span, "expected `,` or `}` in the binder list"));
                }
            }
        }
        Ok(vars)
    }

    fn identifier_term(&mut self) -> PResult<(Term, SpanTree)> {
        let (name, span) = self.ident("a term")?;
        if let Some(v) = self.scope.iter().rev().find(|v| v.name == name) {
            return Ok((Term::Var(v.clone()), SpanTree::leaf(span)));
        }
        let unknown = || ParseError::Sort {
            error: crate::syntax::SortError::UnknownSymbol {
                name: name.clone(),
                path: Default::default(),
            },
            span,
        };
        let sym = self.vocab.get(&name).cloned().ok_or_else(unknown)?;
        let kind = match sym {
            Symbol::Variable(sort) => {
                return Ok((Term::Var(Var { name, sort }), SpanTree::leaf(span)))
            }
            Symbol::Constant(Sort::Object) => return Ok((Term::ObjectConst(name), SpanTree::leaf(span))),
            Symbol::Constant(Sort::Field) => return Ok((Term::FieldConst(name), SpanTree::leaf(span))),
            Symbol::Function { sort: Sort::Object, .. } => FuncKind::Object,
            Symbol::Function { sort: Sort::Field, .. } => FuncKind::Field,
            Symbol::Measure { .. } => FuncKind::Measure,
            Symbol::Predicate { .. } => {
                return Err(ParseError::Syntax {
                    message: format!("predicate `{name}` used where a term is expected"),
                    span,
                })
            }
        };
        let (args, trees, end) = self.arguments()?;
        Ok((Term::App { kind, name, args }, SpanTree::new(span.join(end), trees)))
    }
}
