//! Truth and value of formulas and terms over a finite structure.
//!
//! Probability terms are computed by enumerating every tuple of
//! individuals for the bound variables and summing the product weights of
//! those that satisfy the body. Conjunction evaluates left to right and
//! stops at the first false conjunct, so `[b]{x} > 0 & [a | b]{x} > 1/2`
//! is false rather than an error when `b` has measure zero.
//!
//! Quantifiers over field variables are decided only when the variable is
//! compared directly against field terms that do not mention it; see
//! [`EvalError::FieldQuantifierUnsupported`].

mod field;
mod suite;

use std::collections::BTreeMap;

use thiserror::Error;

pub use suite::{axiom_suite, Check, CheckTally, Failure, SuiteParams, SuiteReport};

use crate::model::{Individual, LpStructure};
use crate::par::{self, Parallelism};
use crate::parser::print_term;
use crate::rational::Rational;
use crate::syntax::{ArithOp, FieldHook, Formula, FuncKind, Sort, Symbol, Term, Var, Vocabulary};

/// Default bound on the tuples enumerated for one probability term.
pub const DEFAULT_MAX_ENUM: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("division by zero in `{term}`")]
    DivisionByZero { term: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("cannot decide quantifier over field variable `{var}`: {reason}")]
    FieldQuantifierUnsupported { var: String, reason: String },
    #[error("enumeration of {domain}^{arity} tuples exceeds the cap of {cap}")]
    EnumerationCapExceeded { domain: usize, arity: usize, cap: u64 },
    #[error("`{0}` has no interpretation in the structure")]
    Uninterpreted(String),
    #[error("field symbol `{name}` failed: {message}")]
    Hook { name: String, message: String },
}

/// Values for free variables, by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    objects: BTreeMap<String, Individual>,
    fields: BTreeMap<String, Rational>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// A copy differing only in `name`.
    pub fn with_object(&self, name: &str, a: Individual) -> Self {
        let mut s = self.clone();
        s.objects.insert(name.to_string(), a);
        s
    }

    pub fn with_field(&self, name: &str, v: Rational) -> Self {
        let mut s = self.clone();
        s.fields.insert(name.to_string(), v);
        s
    }

    pub fn object(&self, name: &str) -> Option<Individual> {
        self.objects.get(name).copied()
    }

    pub fn field(&self, name: &str) -> Option<&Rational> {
        self.fields.get(name)
    }
}

/// Value of a term or formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Object(Individual),
    Field(Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub max_enum: u64,
    pub parallelism: Parallelism,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { max_enum: DEFAULT_MAX_ENUM, parallelism: Parallelism::default() }
    }
}

/// Tuples below this count are never split across threads.
const PAR_MIN_TUPLES: u64 = 512;

/// Variable bindings introduced during evaluation, innermost last.
#[derive(Clone)]
struct Env<'a> {
    objects: Vec<(&'a str, Individual)>,
    fields: Vec<(&'a str, Rational)>,
    base: &'a Assignment,
}

impl<'a> Env<'a> {
    fn new(base: &'a Assignment) -> Self {
        Env { objects: Vec::new(), fields: Vec::new(), base }
    }

    fn object(&self, name: &str) -> Option<Individual> {
        self.objects.iter().rev().find(|(n, _)| *n == name).map(|(_, a)| *a).or_else(|| self.base.object(name))
    }

    fn field(&self, name: &str) -> Option<&Rational> {
        self.fields.iter().rev().find(|(n, _)| *n == name).map(|(_, v)| v).or_else(|| self.base.field(name))
    }
}

/// Evaluates syntax against one structure.
#[derive(Clone, Copy)]
pub struct Evaluator<'m> {
    model: &'m LpStructure,
    vocab: &'m Vocabulary,
    opts: EvalOptions,
}

pub fn eval_formula(
    model: &LpStructure,
    vocab: &Vocabulary,
    sigma: &Assignment,
    f: &Formula,
) -> Result<bool, EvalError> {
    Evaluator::new(model, vocab).formula(sigma, f)
}

pub fn eval_term(model: &LpStructure, vocab: &Vocabulary, sigma: &Assignment, t: &Term) -> Result<Value, EvalError> {
    Evaluator::new(model, vocab).term(sigma, t)
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m LpStructure, vocab: &'m Vocabulary) -> Self {
        Evaluator { model, vocab, opts: EvalOptions::default() }
    }

    pub fn with_options(mut self, opts: EvalOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn model(&self) -> &'m LpStructure {
        self.model
    }

    pub fn options(&self) -> EvalOptions {
        self.opts
    }

    pub fn formula(&self, sigma: &Assignment, f: &Formula) -> Result<bool, EvalError> {
        self.eval_formula(&mut Env::new(sigma), f)
    }

    pub fn term(&self, sigma: &Assignment, t: &Term) -> Result<Value, EvalError> {
        let mut env = Env::new(sigma);
        Ok(match t.sort() {
            Sort::Object => Value::Object(self.object_term(&mut env, t)?),
            Sort::Field => Value::Field(self.field_term(&mut env, t)?),
        })
    }

    /// Value of a field-sorted term.
    pub fn field(&self, sigma: &Assignment, t: &Term) -> Result<Rational, EvalError> {
        self.field_term(&mut Env::new(sigma), t)
    }

    /// `[body]{vars}` under `sigma`.
    pub fn probability(&self, sigma: &Assignment, body: &Formula, vars: &[String]) -> Result<Rational, EvalError> {
        Ok(self.measure(&Env::new(sigma), vars, body, None)?.0)
    }

    fn eval_formula<'a>(&self, env: &mut Env<'a>, f: &'a Formula) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::Pred { name, args } => match self.vocab.get(name) {
                Some(Symbol::Predicate { sort: Sort::Field, .. }) => {
                    let vals = args.iter().map(|a| self.field_term(env, a)).collect::<Result<Vec<_>, _>>()?;
                    match self.vocab.hook(name) {
                        Some(FieldHook::Relation(rel)) => rel(&vals),
                        _ => return Err(EvalError::Uninterpreted(name.clone())),
                    }
                }
                _ => {
                    if self.model.extension(name).is_none() {
                        return Err(EvalError::Uninterpreted(name.clone()));
                    }
                    let vals = args.iter().map(|a| self.object_term(env, a)).collect::<Result<Vec<_>, _>>()?;
                    self.model.holds(name, &vals)
                }
            },
            Formula::Eq { sort: Sort::Object, lhs, rhs } => self.object_term(env, lhs)? == self.object_term(env, rhs)?,
            Formula::Eq { sort: Sort::Field, lhs, rhs } => self.field_term(env, lhs)? == self.field_term(env, rhs)?,
            Formula::Geq(l, r) => self.field_term(env, l)? >= self.field_term(env, r)?,
            Formula::Leq(l, r) => self.field_term(env, l)? <= self.field_term(env, r)?,
            Formula::Lt(l, r) => self.field_term(env, l)? < self.field_term(env, r)?,
            Formula::Gt(l, r) => self.field_term(env, l)? > self.field_term(env, r)?,
            Formula::InInterval(t, lo, hi) => {
                let v = self.field_term(env, t)?;
                v >= self.field_term(env, lo)? && self.field_term(env, hi)? >= v
            }
            Formula::Not(a) => !self.eval_formula(env, a)?,
            Formula::And(a, b) => self.eval_formula(env, a)? && self.eval_formula(env, b)?,
            Formula::Or(a, b) => self.eval_formula(env, a)? || self.eval_formula(env, b)?,
            Formula::Implies(a, b) => !self.eval_formula(env, a)? || self.eval_formula(env, b)?,
            Formula::Forall(v, body) => self.quantifier(env, v, body, true)?,
            Formula::Exists(v, body) => self.quantifier(env, v, body, false)?,
        })
    }

    fn quantifier<'a>(&self, env: &mut Env<'a>, v: &'a Var, body: &'a Formula, universal: bool) -> Result<bool, EvalError> {
        if v.sort == Sort::Field {
            return self.field_quantifier(env, v, body, universal);
        }
        for a in 0..self.model.size() {
            env.objects.push((&v.name, a));
            let r = self.eval_formula(env, body);
            env.objects.pop();
            if r? != universal {
                return Ok(!universal);
            }
        }
        Ok(universal)
    }

    fn object_term<'a>(&self, env: &mut Env<'a>, t: &'a Term) -> Result<Individual, EvalError> {
        match t {
            Term::Var(v) => env.object(&v.name).ok_or_else(|| EvalError::UnboundVariable(v.name.clone())),
            Term::ObjectConst(c) => self.model.object_constant(c).ok_or_else(|| EvalError::Uninterpreted(c.clone())),
            Term::App { kind: FuncKind::Object, name, args } => {
                let vals = args.iter().map(|a| self.object_term(env, a)).collect::<Result<Vec<_>, _>>()?;
                self.model.apply(name, &vals).ok_or_else(|| EvalError::Uninterpreted(name.clone()))
            }
            other => unreachable!("field term `{}` in object position", print_term(other)),
        }
    }

    fn field_term<'a>(&self, env: &mut Env<'a>, t: &'a Term) -> Result<Rational, EvalError> {
        match t {
            Term::Var(v) => env.field(&v.name).cloned().ok_or_else(|| EvalError::UnboundVariable(v.name.clone())),
            Term::FieldConst(c) => {
                self.model.field_constant(c).cloned().ok_or_else(|| EvalError::Uninterpreted(c.clone()))
            }
            Term::Num(r) => Ok(r.clone()),
            Term::App { kind: FuncKind::Measure, name, args } => {
                let vals = args.iter().map(|a| self.object_term(env, a)).collect::<Result<Vec<_>, _>>()?;
                self.model.measuring(name, &vals).cloned().ok_or_else(|| EvalError::Uninterpreted(name.clone()))
            }
            Term::App { kind: FuncKind::Field, name, args } => {
                let vals = args.iter().map(|a| self.field_term(env, a)).collect::<Result<Vec<_>, _>>()?;
                match self.vocab.hook(name) {
                    Some(FieldHook::Function(f)) => {
                        f(&vals).map_err(|message| EvalError::Hook { name: name.clone(), message })
                    }
                    _ => Err(EvalError::Uninterpreted(name.clone())),
                }
            }
            Term::Arith(op, l, r) => {
                let a = self.field_term(env, l)?;
                let b = self.field_term(env, r)?;
                Ok(match op {
                    ArithOp::Add => a + b,
                    ArithOp::Sub => a - b,
                    ArithOp::Mul => a * b,
                    ArithOp::Div => a
                        .checked_div(&b)
                        .map_err(|_| EvalError::DivisionByZero { term: print_term(t) })?,
                })
            }
            Term::Prob { body, vars } => Ok(self.measure(env, vars, body, None)?.0),
            Term::CondProb { body, given, vars } => {
                let (joint, cond) = self.measure(env, vars, body, Some(given))?;
                joint.checked_div(&cond).map_err(|_| EvalError::DivisionByZero { term: print_term(t) })
            }
            other => unreachable!("object term `{}` in field position", print_term(other)),
        }
    }

    fn check_cap(&self, arity: usize) -> Result<u64, EvalError> {
        let err = || EvalError::EnumerationCapExceeded { domain: self.model.size(), arity, cap: self.opts.max_enum };
        let count = self.model.tuple_count(arity).ok_or_else(err)?;
        if count > self.opts.max_enum {
            return Err(err());
        }
        Ok(count)
    }

    /// Measures of `body ∧ given` and `given` over all tuples for `vars`;
    /// without `given` the second component is 1.
    fn measure<'a>(
        &self,
        env: &Env<'a>,
        vars: &'a [String],
        body: &'a Formula,
        given: Option<&'a Formula>,
    ) -> Result<(Rational, Rational), EvalError> {
        let n = vars.len();
        let count = self.check_cap(n)?;
        let chunk = |lo: u64, hi: u64| -> Result<(Rational, Rational), EvalError> {
            let mut env = env.clone();
            let base = env.objects.len();
            env.objects.extend(vars.iter().map(|v| (v.as_str(), 0)));
            let mut tuple = vec![0; n];
            let mut joint = Rational::zero();
            let mut cond = Rational::zero();
            for k in lo..hi {
                self.model.nth_tuple(n, k, &mut tuple);
                for (slot, &a) in env.objects[base..].iter_mut().zip(&tuple) {
                    slot.1 = a;
                }
                let holds = self.eval_formula(&mut env, body)?;
                let conditioned = match given {
                    Some(g) => self.eval_formula(&mut env, g)?,
                    None => true,
                };
                if conditioned {
                    let w = self.model.tuple_weight(&tuple);
                    if holds {
                        joint = joint + &w;
                    }
                    cond = cond + w;
                }
            }
            Ok((joint, cond))
        };

        let (joint, cond) = if self.opts.parallelism.is_parallel() && count >= PAR_MIN_TUPLES {
            let pieces = (par::threads(self.opts.parallelism) as u64 * 4).min(count / 64).max(1);
            let size = count.div_ceil(pieces);
            let parts = par::map_range(self.opts.parallelism, pieces as usize, |i| {
                let lo = i as u64 * size;
                chunk(lo, (lo + size).min(count))
            });
            let mut joint = Rational::zero();
            let mut cond = Rational::zero();
            for p in parts {
                let (j, c) = p?;
                joint = joint + j;
                cond = cond + c;
            }
            (joint, cond)
        } else {
            chunk(0, count)?
        };
        Ok(if given.is_some() { (joint, cond) } else { (joint, Rational::one()) })
    }
}

#[cfg(test)]
mod tests;
