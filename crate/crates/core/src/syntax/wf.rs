//! Sort checking against a vocabulary.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{Formula, FuncKind, Node, NodePath, Sort, Term, Var};
use super::vocab::{Symbol, Vocabulary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("sort mismatch at `{node}`: expected {expected}, found {found}")]
    SortMismatch { node: String, path: NodePath, expected: Sort, found: Sort },
    #[error("unknown symbol `{name}`")]
    UnknownSymbol { name: String, path: NodePath },
    #[error("`{name}` is declared as a {declared}, used as a {used}")]
    WrongKind { name: String, path: NodePath, declared: &'static str, used: &'static str },
    #[error("`{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch { name: String, path: NodePath, expected: usize, found: usize },
    #[error("variable `{var}` repeated in probability term `{node}`")]
    DuplicateBoundVariable { var: String, node: String, path: NodePath },
    #[error("probability term `{node}` binds no variables")]
    EmptyBinder { node: String, path: NodePath },
}

impl SortError {
    pub fn path(&self) -> &NodePath {
        match self {
            SortError::SortMismatch { path, .. }
            | SortError::UnknownSymbol { path, .. }
            | SortError::WrongKind { path, .. }
            | SortError::ArityMismatch { path, .. }
            | SortError::DuplicateBoundVariable { path, .. }
            | SortError::EmptyBinder { path, .. } => path,
        }
    }
}

pub fn well_formed(node: Node<'_>, vocab: &Vocabulary) -> Result<(), SortError> {
    let mut checker = Checker { vocab, bound: Vec::new() };
    checker.node(node, &NodePath::default())
}

pub fn well_formed_formula(f: &Formula, vocab: &Vocabulary) -> Result<(), SortError> {
    well_formed(Node::Formula(f), vocab)
}

pub fn well_formed_term(t: &Term, vocab: &Vocabulary) -> Result<(), SortError> {
    well_formed(Node::Term(t), vocab)
}

struct Checker<'v> {
    vocab: &'v Vocabulary,
    bound: Vec<Var>,
}

fn show(node: Node<'_>) -> String {
    match node {
        Node::Term(t) => crate::parser::print_term(t),
        Node::Formula(f) => crate::parser::print_formula(f),
    }
}

impl Checker<'_> {
    fn expect_sort(&self, t: &Term, expected: Sort, path: NodePath) -> Result<(), SortError> {
        let found = t.sort();
        if found != expected {
            return Err(SortError::SortMismatch { node: show(Node::Term(t)), path, expected, found });
        }
        Ok(())
    }

    fn check_binder(&self, v: &Var, path: &NodePath) -> Result<(), SortError> {
        match self.vocab.get(&v.name) {
            None => Ok(()),
            Some(Symbol::Variable(s)) if *s == v.sort => Ok(()),
            Some(Symbol::Variable(s)) => Err(SortError::SortMismatch {
                node: v.name.clone(),
                path: path.clone(),
                expected: *s,
                found: v.sort,
            }),
            Some(other) => Err(SortError::WrongKind {
                name: v.name.clone(),
                path: path.clone(),
                declared: other.kind_name(),
                used: "variable",
            }),
        }
    }

    fn with_bound<R>(&mut self, vars: &[Var], f: impl FnOnce(&mut Self) -> R) -> R {
        let n = self.bound.len();
        self.bound.extend(vars.iter().cloned());
        let r = f(self);
        self.bound.truncate(n);
        r
    }

    fn symbol(&self, name: &str, path: &NodePath) -> Result<&Symbol, SortError> {
        self.vocab
            .get(name)
            .ok_or_else(|| SortError::UnknownSymbol { name: name.to_string(), path: path.clone() })
    }

    fn args(&mut self, args: &[Term], sort: Sort, path: &NodePath) -> Result<(), SortError> {
        for (i, a) in args.iter().enumerate() {
            self.expect_sort(a, sort, path.child(i))?;
            self.term(a, &path.child(i))?;
        }
        Ok(())
    }

    fn node(&mut self, node: Node<'_>, path: &NodePath) -> Result<(), SortError> {
        match node {
            Node::Term(t) => self.term(t, path),
            Node::Formula(f) => self.formula(f, path),
        }
    }

    fn term(&mut self, t: &Term, path: &NodePath) -> Result<(), SortError> {
        match t {
            Term::Var(v) => {
                if self.bound.iter().rev().any(|b| b == v) {
                    return Ok(());
                }
                if let Some(b) = self.bound.iter().rev().find(|b| b.name == v.name) {
                    return Err(SortError::SortMismatch {
                        node: v.name.clone(),
                        path: path.clone(),
                        expected: b.sort,
                        found: v.sort,
                    });
                }
                match self.symbol(&v.name, path)? {
                    Symbol::Variable(s) if *s == v.sort => Ok(()),
                    Symbol::Variable(s) => Err(SortError::SortMismatch {
                        node: v.name.clone(),
                        path: path.clone(),
                        expected: *s,
                        found: v.sort,
                    }),
                    other => Err(SortError::WrongKind {
                        name: v.name.clone(),
                        path: path.clone(),
                        declared: other.kind_name(),
                        used: "variable",
                    }),
                }
            }
            Term::ObjectConst(name) | Term::FieldConst(name) => {
                let want = t.sort();
                match self.symbol(name, path)? {
                    Symbol::Constant(s) if *s == want => Ok(()),
                    Symbol::Constant(s) => Err(SortError::SortMismatch {
                        node: name.clone(),
                        path: path.clone(),
                        expected: *s,
                        found: want,
                    }),
                    other => Err(SortError::WrongKind {
                        name: name.clone(),
                        path: path.clone(),
                        declared: other.kind_name(),
                        used: "constant",
                    }),
                }
            }
            Term::Num(_) => Ok(()),
            Term::App { kind, name, args } => {
                let sym = self.symbol(name, path)?.clone();
                let (arity, arg_sort) = match (kind, &sym) {
                    (FuncKind::Object, Symbol::Function { sort: Sort::Object, arity }) => {
                        (*arity, Sort::Object)
                    }
                    (FuncKind::Field, Symbol::Function { sort: Sort::Field, arity }) => {
                        (*arity, Sort::Field)
                    }
                    (FuncKind::Measure, Symbol::Measure { arity }) => (*arity, Sort::Object),
                    (_, other) => {
                        return Err(SortError::WrongKind {
                            name: name.clone(),
                            path: path.clone(),
                            declared: other.kind_name(),
                            used: match kind {
                                FuncKind::Measure => "measuring function",
                                _ => "function",
                            },
                        })
                    }
                };
                if args.len() != arity {
                    return Err(SortError::ArityMismatch {
                        name: name.clone(),
                        path: path.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                self.args(args, arg_sort, path)
            }
            Term::Arith(_, l, r) => {
                self.expect_sort(l, Sort::Field, path.child(0))?;
                self.expect_sort(r, Sort::Field, path.child(1))?;
                self.term(l, &path.child(0))?;
                self.term(r, &path.child(1))
            }
            Term::Prob { body, vars } => {
                let bound = self.binder_vars(t, vars, path)?;
                self.with_bound(&bound, |c| c.formula(body, &path.child(0)))
            }
            Term::CondProb { body, given, vars } => {
                let bound = self.binder_vars(t, vars, path)?;
                self.with_bound(&bound, |c| {
                    c.formula(body, &path.child(0))?;
                    c.formula(given, &path.child(1))
                })
            }
        }
    }

    fn binder_vars(&self, t: &Term, vars: &[String], path: &NodePath) -> Result<Vec<Var>, SortError> {
        if vars.is_empty() {
            return Err(SortError::EmptyBinder { node: show(Node::Term(t)), path: path.clone() });
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(vars.len());
        for v in vars {
            if !seen.insert(v.as_str()) {
                return Err(SortError::DuplicateBoundVariable {
                    var: v.clone(),
                    node: show(Node::Term(t)),
                    path: path.clone(),
                });
            }
            let var = Var::object(v.clone());
            self.check_binder(&var, path)?;
            out.push(var);
        }
        Ok(out)
    }

    fn formula(&mut self, f: &Formula, path: &NodePath) -> Result<(), SortError> {
        match f {
            Formula::Pred { name, args } => {
                let (sort, arity) = match self.symbol(name, path)? {
                    Symbol::Predicate { sort, arity } => (*sort, *arity),
                    other => {
                        return Err(SortError::WrongKind {
                            name: name.clone(),
                            path: path.clone(),
                            declared: other.kind_name(),
                            used: "predicate",
                        })
                    }
                };
                if args.len() != arity {
                    return Err(SortError::ArityMismatch {
                        name: name.clone(),
                        path: path.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                self.args(args, sort, path)
            }
            Formula::Eq { sort, lhs, rhs } => {
                self.expect_sort(lhs, *sort, path.child(0))?;
                self.expect_sort(rhs, *sort, path.child(1))?;
                self.term(lhs, &path.child(0))?;
                self.term(rhs, &path.child(1))
            }
            Formula::Geq(l, r) | Formula::Leq(l, r) | Formula::Lt(l, r) | Formula::Gt(l, r) => {
                self.args(&[l.clone(), r.clone()], Sort::Field, path)
            }
            Formula::InInterval(t, lo, hi) => {
                self.args(&[t.clone(), lo.clone(), hi.clone()], Sort::Field, path)
            }
            Formula::Not(a) => self.formula(a, &path.child(0)),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                self.formula(a, &path.child(0))?;
                self.formula(b, &path.child(1))
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                self.check_binder(v, path)?;
                self.with_bound(std::slice::from_ref(v), |c| c.formula(body, &path.child(0)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn vocab() -> Vocabulary {
        Vocabulary::new().object_pred("Bird", 1).object_pred("Fly", 1)
    }

    #[test]
    fn prob_comparison_is_ok() {
        let f = Formula::Geq(
            Term::prob(Formula::atom("Bird", "x"), &["x"]),
            Term::Num(Rational::frac(9, 10)),
        );
        assert_eq!(well_formed_formula(&f, &vocab()), Ok(()));
    }

    #[test]
    fn object_predicate_on_field_term() {
        let v = vocab().with("y", Symbol::Variable(Sort::Field));
        let f = Formula::pred("Bird", vec![Term::Var(Var::field("y"))]);
        match well_formed_formula(&f, &v) {
            Err(SortError::SortMismatch { expected: Sort::Object, found: Sort::Field, path, .. }) => {
                assert_eq!(path, NodePath(vec![0]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn repeated_binder_variable() {
        let t = Term::prob(Formula::atom("Fly", "x"), &["x", "x"]);
        assert!(matches!(
            well_formed_term(&t, &vocab()),
            Err(SortError::DuplicateBoundVariable { .. })
        ));
    }

    #[test]
    fn empty_binder_rejected() {
        let t = Term::prob(Formula::atom("Fly", "x"), &[]);
        assert!(matches!(well_formed_term(&t, &vocab()), Err(SortError::EmptyBinder { .. })));
    }

    #[test]
    fn free_undeclared_variable_is_unknown() {
        let f = Formula::atom("Bird", "x");
        assert!(matches!(well_formed_formula(&f, &vocab()), Err(SortError::UnknownSymbol { .. })));
        let bound = Formula::forall(Var::object("x"), f);
        assert_eq!(well_formed_formula(&bound, &vocab()), Ok(()));
    }

    #[test]
    fn arity_and_kind() {
        let f = Formula::pred("Bird", vec![]);
        assert!(matches!(well_formed_formula(&f, &vocab()), Err(SortError::ArityMismatch { .. })));
        let t = Term::App { kind: FuncKind::Measure, name: "Bird".into(), args: vec![] };
        assert!(matches!(well_formed_term(&t, &vocab()), Err(SortError::WrongKind { .. })));
    }
}
