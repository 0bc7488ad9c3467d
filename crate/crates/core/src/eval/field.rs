//! Deciding quantifiers over field variables.
//!
//! If `y` occurs in the body only as one side of a comparison `t ⋈ y`
//! whose other side `t` does not mention `y`, the body's truth can change
//! only at values of such `t`. Collecting those values (under every
//! binding of object variables bound inside the body) and testing each
//! value, each midpoint between neighbours, and one point beyond either
//! end decides the quantifier exactly.

use std::collections::BTreeSet;

use super::{Env, EvalError, Evaluator};
use crate::rational::Rational;
use crate::syntax::{Formula, Sort, Term, Var};

struct Collector<'a> {
    var: &'a str,
    inner_objects: Vec<&'a str>,
    inner_fields: Vec<&'a str>,
    values: BTreeSet<Rational>,
}

fn mentions(t: &Term, name: &str) -> bool {
    t.free_vars().iter().any(|v| v.name == name && v.sort == Sort::Field)
}

fn is_var(t: &Term, name: &str) -> bool {
    matches!(t, Term::Var(v) if v.name == name && v.sort == Sort::Field)
}

impl<'m> Evaluator<'m> {
    pub(super) fn field_quantifier<'a>(
        &self,
        env: &mut Env<'a>,
        v: &'a Var,
        body: &'a Formula,
        universal: bool,
    ) -> Result<bool, EvalError> {
        let mut c = Collector { var: &v.name, inner_objects: Vec::new(), inner_fields: Vec::new(), values: BTreeSet::new() };
        self.collect_formula(env, &mut c, body)?;
        for p in test_points(&c.values) {
            env.fields.push((&v.name, p));
            let r = self.eval_formula(env, body);
            env.fields.pop();
            if r? != universal {
                return Ok(!universal);
            }
        }
        Ok(universal)
    }

    fn unsupported(&self, c: &Collector<'_>, reason: impl Into<String>) -> EvalError {
        EvalError::FieldQuantifierUnsupported { var: c.var.to_string(), reason: reason.into() }
    }

    fn collect_formula<'a>(&self, env: &mut Env<'a>, c: &mut Collector<'a>, f: &'a Formula) -> Result<(), EvalError> {
        match f {
            Formula::Pred { name, args } => {
                if args.iter().any(|a| mentions(a, c.var)) {
                    return Err(self.unsupported(c, format!("used as an argument of `{name}`")));
                }
                Ok(())
            }
            Formula::Eq { sort: Sort::Object, .. } => Ok(()),
            Formula::Eq { lhs: l, rhs: r, .. }
            | Formula::Geq(l, r)
            | Formula::Leq(l, r)
            | Formula::Lt(l, r)
            | Formula::Gt(l, r) => self.collect_comparison(env, c, l, r),
            Formula::InInterval(t, lo, hi) => {
                self.collect_comparison(env, c, t, lo)?;
                self.collect_comparison(env, c, hi, t)
            }
            Formula::Not(a) => self.collect_formula(env, c, a),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                self.collect_formula(env, c, a)?;
                self.collect_formula(env, c, b)
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                if v.name == c.var {
                    return Ok(());
                }
                let stack = match v.sort {
                    Sort::Object => &mut c.inner_objects,
                    Sort::Field => &mut c.inner_fields,
                };
                stack.push(&v.name);
                let r = self.collect_formula(env, c, body);
                match v.sort {
                    Sort::Object => c.inner_objects.pop(),
                    Sort::Field => c.inner_fields.pop(),
                };
                r
            }
        }
    }

    fn collect_comparison<'a>(
        &self,
        env: &mut Env<'a>,
        c: &mut Collector<'a>,
        l: &'a Term,
        r: &'a Term,
    ) -> Result<(), EvalError> {
        for (side, other) in [(l, r), (r, l)] {
            if is_var(side, c.var) {
                if is_var(other, c.var) {
                    return Ok(());
                }
                if mentions(other, c.var) {
                    return Err(self.unsupported(c, "compared against a term that depends on it"));
                }
                return self.collect_values(env, c, other);
            }
        }
        self.collect_term(env, c, l)?;
        self.collect_term(env, c, r)
    }

    fn collect_term<'a>(&self, env: &mut Env<'a>, c: &mut Collector<'a>, t: &'a Term) -> Result<(), EvalError> {
        match t {
            Term::Var(v) if v.sort == Sort::Field && v.name == c.var => {
                Err(self.unsupported(c, "used inside an arithmetic or function term"))
            }
            Term::App { args, .. } => args.iter().try_for_each(|a| self.collect_term(env, c, a)),
            Term::Arith(_, a, b) => {
                self.collect_term(env, c, a)?;
                self.collect_term(env, c, b)
            }
            Term::Prob { body, vars } => {
                let depth = c.inner_objects.len();
                c.inner_objects.extend(vars.iter().map(String::as_str));
                let r = self.collect_formula(env, c, body);
                c.inner_objects.truncate(depth);
                r
            }
            Term::CondProb { body, given, vars } => {
                let depth = c.inner_objects.len();
                c.inner_objects.extend(vars.iter().map(String::as_str));
                let r = self.collect_formula(env, c, body).and_then(|_| self.collect_formula(env, c, given));
                c.inner_objects.truncate(depth);
                r
            }
            _ => Ok(()),
        }
    }

    /// Adds the values `t` takes under every binding of the inner object
    /// variables it mentions. Bindings where `t` is undefined are skipped:
    /// evaluating the body there fails regardless of the test point.
    fn collect_values<'a>(&self, env: &mut Env<'a>, c: &mut Collector<'a>, t: &'a Term) -> Result<(), EvalError> {
        let free = t.free_vars();
        if free.iter().any(|v| v.sort == Sort::Field && c.inner_fields.contains(&v.name.as_str())) {
            return Err(self.unsupported(c, "compared against a term over another quantified field variable"));
        }
        let mut names: Vec<&'a str> = Vec::new();
        for &n in c.inner_objects.iter().rev() {
            if !names.contains(&n) && free.iter().any(|v| v.sort == Sort::Object && v.name == n) {
                names.push(n);
            }
        }
        let count = self.check_cap(names.len())?;
        let base = env.objects.len();
        env.objects.extend(names.iter().map(|&n| (n, 0)));
        let mut tuple = vec![0; names.len()];
        for k in 0..count {
            self.model.nth_tuple(names.len(), k, &mut tuple);
            for (slot, &a) in env.objects[base..].iter_mut().zip(&tuple) {
                slot.1 = a;
            }
            if let Ok(v) = self.field_term(env, t) {
                c.values.insert(v);
            }
        }
        env.objects.truncate(base);
        Ok(())
    }
}

/// Every value, every midpoint between neighbours, and one point past each end.
pub(crate) fn test_points(values: &BTreeSet<Rational>) -> Vec<Rational> {
    let (Some(lo), Some(hi)) = (values.first(), values.last()) else {
        return vec![Rational::zero()];
    };
    let mut points = vec![lo - &Rational::one()];
    let mut prev: Option<&Rational> = None;
    for v in values {
        if let Some(p) = prev {
            points.push(p.midpoint(v));
        }
        points.push(v.clone());
        prev = Some(v);
    }
    points.push(hi + &Rational::one());
    points
}
