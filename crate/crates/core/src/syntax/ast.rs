use std::fmt;

use crate::rational::Rational;

/// The two sorts of the language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Object,
    Field,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Object => f.write_str("object"),
            Sort::Field => f.write_str("field"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn object(name: impl Into<String>) -> Self {
        Var { name: name.into(), sort: Sort::Object }
    }

    pub fn field(name: impl Into<String>) -> Self {
        Var { name: name.into(), sort: Sort::Field }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FuncKind {
    /// Objects to an object.
    Object,
    /// Field values to a field value.
    Field,
    /// Objects to a field value.
    Measure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    ObjectConst(String),
    /// Named field constant, interpreted by the structure.
    FieldConst(String),
    /// Field literal.
    Num(Rational),
    App { kind: FuncKind, name: String, args: Vec<Term> },
    Arith(ArithOp, Box<Term>, Box<Term>),
    /// `[body]{vars}`: measure of the tuples satisfying `body`.
    Prob { body: Box<Formula>, vars: Vec<String> },
    /// `[body | given]{vars}`, sugar for `[body & given]{vars} / [given]{vars}`.
    CondProb { body: Box<Formula>, given: Box<Formula>, vars: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Pred { name: String, args: Vec<Term> },
    Eq { sort: Sort, lhs: Term, rhs: Term },
    Geq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    // Derived forms, removed by `desugar`.
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Leq(Term, Term),
    Lt(Term, Term),
    Gt(Term, Term),
    /// `t in [lo, hi]`
    InInterval(Term, Term, Term),
}

impl Term {
    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    pub fn object_var(name: &str) -> Term {
        Term::Var(Var::object(name))
    }

    pub fn num(r: Rational) -> Term {
        Term::Num(r)
    }

    pub fn prob(body: Formula, vars: &[&str]) -> Term {
        Term::Prob { body: Box::new(body), vars: vars.iter().map(|s| s.to_string()).collect() }
    }

    pub fn cond_prob(body: Formula, given: Formula, vars: &[&str]) -> Term {
        Term::CondProb {
            body: Box::new(body),
            given: Box::new(given),
            vars: vars.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn arith(op: ArithOp, lhs: Term, rhs: Term) -> Term {
        Term::Arith(op, Box::new(lhs), Box::new(rhs))
    }

    /// The sort is determined by the node shape alone.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort,
            Term::ObjectConst(_) => Sort::Object,
            Term::App { kind: FuncKind::Object, .. } => Sort::Object,
            Term::FieldConst(_)
            | Term::Num(_)
            | Term::App { .. }
            | Term::Arith(..)
            | Term::Prob { .. }
            | Term::CondProb { .. } => Sort::Field,
        }
    }
}

impl Formula {
    pub fn pred(name: &str, args: Vec<Term>) -> Formula {
        Formula::Pred { name: name.to_string(), args }
    }

    /// Unary predicate applied to an object variable.
    pub fn atom(name: &str, var: &str) -> Formula {
        Formula::pred(name, vec![Term::object_var(var)])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    /// Field-sorted equality; use [`Formula::Eq`] directly for objects.
    pub fn field_eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Eq { sort: Sort::Field, lhs, rhs }
    }

    /// Left-nested conjunction of a nonempty list.
    pub fn conjunction(mut parts: Vec<Formula>) -> Option<Formula> {
        if parts.is_empty() {
            return None;
        }
        let first = parts.remove(0);
        Some(parts.into_iter().fold(first, Formula::and))
    }

    /// True when only core connectives and plain probability terms remain.
    pub fn is_core(&self) -> bool {
        let mut ok = true;
        visit_formula(self, &mut |n| {
            if let Node::Formula(
                Formula::Or(..)
                | Formula::Implies(..)
                | Formula::Exists(..)
                | Formula::Leq(..)
                | Formula::Lt(..)
                | Formula::Gt(..)
                | Formula::InInterval(..),
            )
            | Node::Term(Term::CondProb { .. }) = n
            {
                ok = false;
            }
        });
        ok
    }
}

/// Borrowed view of either kind of syntax node.
#[derive(Clone, Copy, Debug)]
pub enum Node<'a> {
    Term(&'a Term),
    Formula(&'a Formula),
}

impl<'a> Node<'a> {
    /// Children in the fixed order used by node paths.
    pub fn children(self) -> Vec<Node<'a>> {
        match self {
            Node::Term(t) => match t {
                Term::Var(_) | Term::ObjectConst(_) | Term::FieldConst(_) | Term::Num(_) => vec![],
                Term::App { args, .. } => args.iter().map(Node::Term).collect(),
                Term::Arith(_, l, r) => vec![Node::Term(l), Node::Term(r)],
                Term::Prob { body, .. } => vec![Node::Formula(body)],
                Term::CondProb { body, given, .. } => {
                    vec![Node::Formula(body), Node::Formula(given)]
                }
            },
            Node::Formula(f) => match f {
                Formula::Pred { args, .. } => args.iter().map(Node::Term).collect(),
                Formula::Eq { lhs, rhs, .. } => vec![Node::Term(lhs), Node::Term(rhs)],
                Formula::Geq(l, r) | Formula::Leq(l, r) | Formula::Lt(l, r) | Formula::Gt(l, r) => {
                    vec![Node::Term(l), Node::Term(r)]
                }
                Formula::InInterval(t, lo, hi) => {
                    vec![Node::Term(t), Node::Term(lo), Node::Term(hi)]
                }
                Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => {
                    vec![Node::Formula(a)]
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    vec![Node::Formula(a), Node::Formula(b)]
                }
            },
        }
    }
}

/// Pre-order visit of every node below (and including) `f`.
pub fn visit_formula<'a>(f: &'a Formula, visit: &mut impl FnMut(Node<'a>)) {
    visit_node(Node::Formula(f), visit)
}

pub fn visit_term<'a>(t: &'a Term, visit: &mut impl FnMut(Node<'a>)) {
    visit_node(Node::Term(t), visit)
}

fn visit_node<'a>(n: Node<'a>, visit: &mut impl FnMut(Node<'a>)) {
    visit(n);
    for c in n.children() {
        visit_node(c, visit);
    }
}

/// Path from a root to a node, as child indices in [`Node::children`] order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn child(&self, i: usize) -> NodePath {
        let mut v = self.0.clone();
        v.push(i);
        NodePath(v)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("root")?;
        for i in &self.0 {
            write!(f, ".{i}")?;
        }
        Ok(())
    }
}
