//! Canonical printer. Output reparses to the identical AST and uses the
//! fewest parentheses the precedence table allows.

use super::Ast;
use crate::syntax::{ArithOp, Formula, Sort, Term, Var};

pub fn print_formula(f: &Formula) -> String {
    let mut p = Printer { out: String::new(), in_bracket: 0 };
    p.formula(f, 0, true);
    p.out
}

pub fn print_term(t: &Term) -> String {
    let mut p = Printer { out: String::new(), in_bracket: 0 };
    p.term(t, 0);
    p.out
}

pub fn print_ast(a: &Ast) -> String {
    match a {
        Ast::Formula(f) => print_formula(f),
        Ast::Term(t) => print_term(t),
    }
}

// Formula levels.
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;

// Term levels.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const PRIMARY: u8 = 3;

struct Printer {
    out: String,
    in_bracket: usize,
}

impl Printer {
    fn push(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn wrap(&mut self, parens: bool, body: impl FnOnce(&mut Self)) {
        if parens {
            self.push("(");
        }
        body(self);
        if parens {
            self.push(")");
        }
    }

    /// `min` is the loosest level allowed without parentheses; `rightmost`
    /// says nothing follows within the enclosing group, so a quantifier
    /// body may run to its end.
    fn formula(&mut self, f: &Formula, min: u8, rightmost: bool) {
        match f {
            Formula::Implies(a, b) => {
                let parens = min > IMPLIES;
                let tail = parens || rightmost;
                self.wrap(parens, |p| {
                    p.formula(a, OR, false);
                    p.push(" -> ");
                    p.formula(b, IMPLIES, tail);
                });
            }
            Formula::Or(a, b) => {
                let parens = min > OR;
                let tail = parens || rightmost;
                let sep = if self.in_bracket > 0 { " or " } else { " | " };
                self.wrap(parens, |p| {
                    p.formula(a, OR, false);
                    p.push(sep);
                    p.formula(b, AND, tail);
                });
            }
            Formula::And(a, b) => {
                let parens = min > AND;
                let tail = parens || rightmost;
                self.wrap(parens, |p| {
                    p.formula(a, AND, false);
                    p.push(" & ");
                    p.formula(b, NOT, tail);
                });
            }
            Formula::Not(a) => {
                self.push("!");
                self.formula(a, NOT, rightmost);
            }
            Formula::Forall(..) | Formula::Exists(..) => {
                let parens = min > 0 && !rightmost;
                self.wrap(parens, |p| p.quantifier(f));
            }
            Formula::Pred { name, args } => {
                self.push(name);
                if !args.is_empty() {
                    self.args(args);
                }
            }
            Formula::Eq { lhs, rhs, .. } => self.comparison(lhs, "=", rhs),
            Formula::Geq(l, r) => self.comparison(l, ">=", r),
            Formula::Leq(l, r) => self.comparison(l, "<=", r),
            Formula::Lt(l, r) => self.comparison(l, "<", r),
            Formula::Gt(l, r) => self.comparison(l, ">", r),
            Formula::InInterval(t, lo, hi) => {
                self.term(t, SUM);
                self.push(" in [");
                self.term(lo, SUM);
                self.push(", ");
                self.term(hi, SUM);
                self.push("]");
            }
        }
    }

    fn quantifier(&mut self, f: &Formula) {
        let universal = matches!(f, Formula::Forall(..));
        self.push(if universal { "forall " } else { "exists " });
        let mut cur = f;
        let mut first = true;
        loop {
            let (v, body) = match (universal, cur) {
                (true, Formula::Forall(v, b)) | (false, Formula::Exists(v, b)) => (v, b),
                _ => break,
            };
            if !first {
                self.push(", ");
            }
            first = false;
            self.binder(v);
            cur = body;
        }
        self.push(". ");
        self.formula(cur, 0, true);
    }

    fn binder(&mut self, v: &Var) {
        self.push(&v.name);
        if v.sort == Sort::Field {
            self.push(":field");
        }
    }

    fn comparison(&mut self, l: &Term, op: &str, r: &Term) {
        self.term(l, SUM);
        self.push(" ");
        self.push(op);
        self.push(" ");
        self.term(r, SUM);
    }

    fn args(&mut self, args: &[Term]) {
        self.push("(");
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.push(", ");
            }
            self.term(a, 0);
        }
        self.push(")");
    }

    fn term(&mut self, t: &Term, min: u8) {
        match t {
            Term::Var(v) => self.push(&v.name),
            Term::ObjectConst(n) | Term::FieldConst(n) => self.push(n),
            Term::Num(r) => self.push(&r.to_string()),
            Term::App { name, args, .. } => {
                self.push(name);
                self.args(args);
            }
            Term::Arith(op, l, r) => {
                let (level, right) = match op {
                    ArithOp::Add | ArithOp::Sub => (SUM, PRODUCT),
                    ArithOp::Mul | ArithOp::Div => (PRODUCT, PRIMARY),
                };
                self.wrap(min > level, |p| {
                    p.term(l, level);
                    p.push(" ");
                    p.push(op.symbol());
                    p.push(" ");
                    p.term(r, right);
                });
            }
            Term::Prob { body, vars } => {
                self.push("[");
                self.in_bracket += 1;
                self.formula(body, 0, true);
                self.in_bracket -= 1;
                self.push("]");
                self.binders(vars);
            }
            Term::CondProb { body, given, vars } => {
                self.push("[");
                self.in_bracket += 1;
                self.formula(body, 0, true);
                self.push(" | ");
                self.formula(given, 0, true);
                self.in_bracket -= 1;
                self.push("]");
                self.binders(vars);
            }
        }
    }

    fn binders(&mut self, vars: &[String]) {
        self.push("{");
        self.push(&vars.join(", "));
        self.push("}");
    }
}
