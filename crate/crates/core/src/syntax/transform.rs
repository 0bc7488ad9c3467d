//! Desugaring, free variables and capture-avoiding substitution.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::{visit_formula, visit_term, ArithOp, Formula, Node, Term, Var};
use super::wf::SortError;

impl Formula {
    /// Rewrites derived connectives, comparisons and conditional probability
    /// terms into `!`, `&`, `forall`, `=`, `>=`, arithmetic and `[..]{..}`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Pred { name, args } => {
                Formula::Pred { name: name.clone(), args: args.iter().map(Term::desugar).collect() }
            }
            Formula::Eq { sort, lhs, rhs } => {
                Formula::Eq { sort: *sort, lhs: lhs.desugar(), rhs: rhs.desugar() }
            }
            Formula::Geq(l, r) => Formula::Geq(l.desugar(), r.desugar()),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.desugar()),
            Formula::Or(a, b) => {
                Formula::not(Formula::and(Formula::not(a.desugar()), Formula::not(b.desugar())))
            }
            Formula::Implies(a, b) => {
                Formula::not(Formula::and(a.desugar(), Formula::not(b.desugar())))
            }
            Formula::Exists(v, a) => {
                Formula::not(Formula::forall(v.clone(), Formula::not(a.desugar())))
            }
            Formula::Leq(l, r) => Formula::Geq(r.desugar(), l.desugar()),
            Formula::Lt(l, r) => Formula::not(Formula::Geq(l.desugar(), r.desugar())),
            Formula::Gt(l, r) => Formula::not(Formula::Geq(r.desugar(), l.desugar())),
            Formula::InInterval(t, lo, hi) => Formula::and(
                Formula::Geq(t.desugar(), lo.desugar()),
                Formula::Geq(hi.desugar(), t.desugar()),
            ),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        free_formula(self, &mut Vec::new(), &mut out);
        out
    }

    /// True when the formula has no free variables.
    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Simultaneous capture-avoiding substitution of terms for variables.
    pub fn substitute(&self, mapping: &BTreeMap<Var, Term>) -> Result<Formula, SortError> {
        let map = check_mapping(mapping)?;
        Ok(Subst::new(self.all_names(), &map).formula(self, &map))
    }

    /// Replaces every occurrence of the object constant `name` by `var`,
    /// renaming binders that would capture it.
    pub fn generalize_constant(&self, name: &str, var: &Var) -> Formula {
        let mut map = BTreeMap::new();
        map.insert(Key::Const(name.to_string()), Term::Var(var.clone()));
        Subst::new(self.all_names(), &map).formula(self, &map)
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut names = BTreeSet::new();
        visit_formula(self, &mut |n| collect_names(n, &mut names));
        names
    }

    /// Object constants occurring in the formula.
    pub fn object_constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        visit_formula(self, &mut |n| {
            if let Node::Term(Term::ObjectConst(c)) = n {
                out.insert(c.clone());
            }
        });
        out
    }
}

impl Term {
    pub fn desugar(&self) -> Term {
        match self {
            Term::Var(_) | Term::ObjectConst(_) | Term::FieldConst(_) | Term::Num(_) => self.clone(),
            Term::App { kind, name, args } => Term::App {
                kind: *kind,
                name: name.clone(),
                args: args.iter().map(Term::desugar).collect(),
            },
            Term::Arith(op, l, r) => Term::arith(*op, l.desugar(), r.desugar()),
            Term::Prob { body, vars } => {
                Term::Prob { body: Box::new(body.desugar()), vars: vars.clone() }
            }
            Term::CondProb { body, given, vars } => {
                let given = given.desugar();
                let joint = Term::Prob {
                    body: Box::new(Formula::and(body.desugar(), given.clone())),
                    vars: vars.clone(),
                };
                let marginal = Term::Prob { body: Box::new(given), vars: vars.clone() };
                Term::arith(ArithOp::Div, joint, marginal)
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        free_term(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn substitute(&self, mapping: &BTreeMap<Var, Term>) -> Result<Term, SortError> {
        let map = check_mapping(mapping)?;
        let mut names = BTreeSet::new();
        visit_term(self, &mut |n| collect_names(n, &mut names));
        Ok(Subst::new(names, &map).term(self, &map))
    }
}

fn collect_names(n: Node<'_>, names: &mut BTreeSet<String>) {
    match n {
        Node::Term(Term::Var(v)) => {
            names.insert(v.name.clone());
        }
        Node::Term(Term::Prob { vars, .. } | Term::CondProb { vars, .. }) => {
            names.extend(vars.iter().cloned());
        }
        Node::Formula(Formula::Forall(v, _) | Formula::Exists(v, _)) => {
            names.insert(v.name.clone());
        }
        _ => {}
    }
}

fn free_term(t: &Term, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        }
        Term::ObjectConst(_) | Term::FieldConst(_) | Term::Num(_) => {}
        Term::App { args, .. } => args.iter().for_each(|a| free_term(a, bound, out)),
        Term::Arith(_, l, r) => {
            free_term(l, bound, out);
            free_term(r, bound, out);
        }
        Term::Prob { body, vars } => {
            let n = bound.len();
            bound.extend(vars.iter().map(|v| Var::object(v.clone())));
            free_formula(body, bound, out);
            bound.truncate(n);
        }
        Term::CondProb { body, given, vars } => {
            let n = bound.len();
            bound.extend(vars.iter().map(|v| Var::object(v.clone())));
            free_formula(body, bound, out);
            free_formula(given, bound, out);
            bound.truncate(n);
        }
    }
}

fn free_formula(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Pred { args, .. } => args.iter().for_each(|a| free_term(a, bound, out)),
        Formula::Eq { lhs, rhs, .. } => {
            free_term(lhs, bound, out);
            free_term(rhs, bound, out);
        }
        Formula::Geq(l, r) | Formula::Leq(l, r) | Formula::Lt(l, r) | Formula::Gt(l, r) => {
            free_term(l, bound, out);
            free_term(r, bound, out);
        }
        Formula::InInterval(t, lo, hi) => {
            free_term(t, bound, out);
            free_term(lo, bound, out);
            free_term(hi, bound, out);
        }
        Formula::Not(a) => free_formula(a, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            free_formula(a, bound, out);
            free_formula(b, bound, out);
        }
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            bound.push(v.clone());
            free_formula(a, bound, out);
            bound.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Var(Var),
    Const(String),
}

fn check_mapping(mapping: &BTreeMap<Var, Term>) -> Result<BTreeMap<Key, Term>, SortError> {
    let mut map = BTreeMap::new();
    for (v, t) in mapping {
        if t.sort() != v.sort {
            return Err(SortError::SortMismatch {
                node: v.name.clone(),
                path: Default::default(),
                expected: v.sort,
                found: t.sort(),
            });
        }
        map.insert(Key::Var(v.clone()), t.clone());
    }
    Ok(map)
}

/// Names that a fresh variable must avoid: everything in the input plus the
/// free variables of every replacement term.
struct Subst {
    avoid: BTreeSet<String>,
}

impl Subst {
    fn new(mut avoid: BTreeSet<String>, map: &BTreeMap<Key, Term>) -> Self {
        for t in map.values() {
            avoid.extend(t.free_vars().into_iter().map(|v| v.name));
            let mut names = BTreeSet::new();
            visit_term(t, &mut |n| collect_names(n, &mut names));
            avoid.extend(names);
        }
        Subst { avoid }
    }

    /// `base` followed by the smallest unused numeric suffix.
    fn fresh(&mut self, base: &str) -> String {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { base } else { stem };
        let name = (1..)
            .map(|i| format!("{stem}{i}"))
            .find(|n| !self.avoid.contains(n))
            .expect("unbounded suffixes");
        self.avoid.insert(name.clone());
        name
    }

    /// Adjusts `map` for entering a binder over `vars`, returning the
    /// (possibly renamed) binder variables and the map for the body.
    fn enter(
        &mut self,
        vars: &[Var],
        body_free: &BTreeSet<Var>,
        body_consts: &BTreeSet<String>,
        map: &BTreeMap<Key, Term>,
    ) -> (Vec<Var>, BTreeMap<Key, Term>) {
        let mut inner: BTreeMap<Key, Term> = map
            .iter()
            .filter(|(k, _)| match k {
                Key::Var(v) => !vars.contains(v) && body_free.contains(v),
                Key::Const(c) => body_consts.contains(c),
            })
            .map(|(k, t)| (k.clone(), t.clone()))
            .collect();
        let incoming: BTreeSet<Var> = inner.values().flat_map(|t| t.free_vars()).collect();
        let mut renamed = Vec::with_capacity(vars.len());
        for v in vars {
            if incoming.iter().any(|w| w.name == v.name) {
                let fresh = Var { name: self.fresh(&v.name), sort: v.sort };
                inner.insert(Key::Var(v.clone()), Term::Var(fresh.clone()));
                renamed.push(fresh);
            } else {
                renamed.push(v.clone());
            }
        }
        (renamed, inner)
    }

    fn term(&mut self, t: &Term, map: &BTreeMap<Key, Term>) -> Term {
        if map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => map.get(&Key::Var(v.clone())).cloned().unwrap_or_else(|| t.clone()),
            Term::ObjectConst(c) => {
                map.get(&Key::Const(c.clone())).cloned().unwrap_or_else(|| t.clone())
            }
            Term::FieldConst(_) | Term::Num(_) => t.clone(),
            Term::App { kind, name, args } => Term::App {
                kind: *kind,
                name: name.clone(),
                args: args.iter().map(|a| self.term(a, map)).collect(),
            },
            Term::Arith(op, l, r) => Term::arith(*op, self.term(l, map), self.term(r, map)),
            Term::Prob { body, vars } => {
                let bvars: Vec<Var> = vars.iter().map(|v| Var::object(v.clone())).collect();
                let (free, consts) = (body.free_vars(), body.object_constants());
                let (renamed, inner) = self.enter(&bvars, &free, &consts, map);
                Term::Prob {
                    body: Box::new(self.formula(body, &inner)),
                    vars: renamed.into_iter().map(|v| v.name).collect(),
                }
            }
            Term::CondProb { body, given, vars } => {
                let bvars: Vec<Var> = vars.iter().map(|v| Var::object(v.clone())).collect();
                let mut free = body.free_vars();
                free.extend(given.free_vars());
                let mut consts = body.object_constants();
                consts.extend(given.object_constants());
                let (renamed, inner) = self.enter(&bvars, &free, &consts, map);
                Term::CondProb {
                    body: Box::new(self.formula(body, &inner)),
                    given: Box::new(self.formula(given, &inner)),
                    vars: renamed.into_iter().map(|v| v.name).collect(),
                }
            }
        }
    }

    fn formula(&mut self, f: &Formula, map: &BTreeMap<Key, Term>) -> Formula {
        if map.is_empty() {
            return f.clone();
        }
        let b = |s: &mut Self, x: &Formula| Box::new(s.formula(x, map));
        match f {
            Formula::Pred { name, args } => Formula::Pred {
                name: name.clone(),
                args: args.iter().map(|a| self.term(a, map)).collect(),
            },
            Formula::Eq { sort, lhs, rhs } => {
                Formula::Eq { sort: *sort, lhs: self.term(lhs, map), rhs: self.term(rhs, map) }
            }
            Formula::Geq(l, r) => Formula::Geq(self.term(l, map), self.term(r, map)),
            Formula::Leq(l, r) => Formula::Leq(self.term(l, map), self.term(r, map)),
            Formula::Lt(l, r) => Formula::Lt(self.term(l, map), self.term(r, map)),
            Formula::Gt(l, r) => Formula::Gt(self.term(l, map), self.term(r, map)),
            Formula::InInterval(t, lo, hi) => {
                Formula::InInterval(self.term(t, map), self.term(lo, map), self.term(hi, map))
            }
            Formula::Not(a) => Formula::Not(b(self, a)),
            Formula::And(x, y) => Formula::And(b(self, x), b(self, y)),
            Formula::Or(x, y) => Formula::Or(b(self, x), b(self, y)),
            Formula::Implies(x, y) => Formula::Implies(b(self, x), b(self, y)),
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                let (renamed, inner) =
                    self.enter(std::slice::from_ref(v), &a.free_vars(), &a.object_constants(), map);
                let body = Box::new(self.formula(a, &inner));
                let v = renamed.into_iter().next().expect("one binder");
                match f {
                    Formula::Forall(..) => Formula::Forall(v, body),
                    _ => Formula::Exists(v, body),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::syntax::ast::Sort;

    fn x() -> Term {
        Term::object_var("x")
    }

    #[test]
    fn conditional_probability_desugars_to_quotient() {
        let t = Term::cond_prob(Formula::atom("Fly", "x"), Formula::atom("Bird", "x"), &["x"]);
        let expected = Term::arith(
            ArithOp::Div,
            Term::prob(Formula::and(Formula::atom("Fly", "x"), Formula::atom("Bird", "x")), &["x"]),
            Term::prob(Formula::atom("Bird", "x"), &["x"]),
        );
        assert_eq!(t.desugar(), expected);
    }

    #[test]
    fn disjunction_is_de_morgan() {
        let a = Formula::atom("A", "x");
        let b = Formula::atom("B", "x");
        assert_eq!(
            Formula::or(a.clone(), b.clone()).desugar(),
            Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
        );
    }

    #[test]
    fn interval_is_two_comparisons() {
        let (t, lo, hi) = (Term::FieldConst("h".into()), Term::Num(Rational::zero()), Term::Num(Rational::one()));
        assert_eq!(
            Formula::InInterval(t.clone(), lo.clone(), hi.clone()).desugar(),
            Formula::and(Formula::Geq(t.clone(), lo), Formula::Geq(hi, t))
        );
    }

    #[test]
    fn free_vars_respect_probability_binders() {
        let f = Formula::and(
            Formula::pred("Have", vec![Term::object_var("y"), x()]),
            Formula::atom("Zoo", "x"),
        );
        let t = Term::prob(f, &["x"]);
        assert_eq!(t.free_vars(), BTreeSet::from([Var::object("y")]));
        let closed = Formula::forall(Var::object("y"), Formula::atom("Fly", "y"));
        assert!(closed.free_vars().is_empty());
    }

    #[test]
    fn field_quantified_example_is_closed() {
        let y = Term::Var(Var::field("y"));
        let w = Term::App { kind: crate::syntax::FuncKind::Measure, name: "weight".into(), args: vec![x()] };
        let lhs = Term::cond_prob(
            Formula::atom("fly", "x"),
            Formula::and(Formula::atom("bird", "x"), Formula::Lt(w.clone(), y.clone())),
            &["x"],
        );
        let rhs = Term::cond_prob(
            Formula::atom("fly", "x"),
            Formula::and(Formula::atom("bird", "x"), Formula::Gt(w, y)),
            &["x"],
        );
        let f = Formula::forall(Var::field("y"), Formula::Gt(lhs, rhs));
        assert!(f.free_vars().is_empty());
    }

    #[test]
    fn constant_generalization() {
        let f = Formula::pred("Fly", vec![Term::ObjectConst("Tweety".into())]);
        assert_eq!(f.generalize_constant("Tweety", &Var::object("x")), Formula::atom("Fly", "x"));
    }

    #[test]
    fn empty_substitution_is_identity() {
        let f = Formula::forall(Var::object("x"), Formula::atom("P", "x"));
        assert_eq!(f.substitute(&BTreeMap::new()).unwrap(), f);
    }

    #[test]
    fn bound_variable_untouched() {
        let t = Term::prob(Formula::atom("P", "x"), &["x"]);
        let map = BTreeMap::from([(Var::object("x"), Term::ObjectConst("c".into()))]);
        assert_eq!(t.substitute(&map).unwrap(), t);
    }

    #[test]
    fn capture_is_avoided_with_numeric_suffix() {
        // [R(x, y)]{x} with y := x must rename the binder.
        let t = Term::prob(Formula::pred("R", vec![x(), Term::object_var("y")]), &["x"]);
        let map = BTreeMap::from([(Var::object("y"), x())]);
        let out = t.substitute(&map).unwrap();
        let expected =
            Term::prob(Formula::pred("R", vec![Term::object_var("x1"), x()]), &["x1"]);
        assert_eq!(out, expected);
    }

    #[test]
    fn substitution_is_simultaneous() {
        let f = Formula::pred("R", vec![x(), Term::object_var("y")]);
        let map = BTreeMap::from([
            (Var::object("x"), Term::object_var("y")),
            (Var::object("y"), x()),
        ]);
        assert_eq!(
            f.substitute(&map).unwrap(),
            Formula::pred("R", vec![Term::object_var("y"), x()])
        );
    }

    #[test]
    fn ill_sorted_mapping() {
        let f = Formula::atom("P", "x");
        let map = BTreeMap::from([(Var::object("x"), Term::Num(Rational::one()))]);
        assert!(matches!(
            f.substitute(&map),
            Err(SortError::SortMismatch { expected: Sort::Object, .. })
        ));
    }
}
