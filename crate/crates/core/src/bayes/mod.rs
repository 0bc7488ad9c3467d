//! Bayes nets over binary variables, read as unary predicates.
//!
//! A net compiles to sentences: one stating that the joint of all
//! variables factors along the net, and one per CPT row. The joint
//! structure has one individual per truth assignment, weighted by the
//! net's probability of that assignment, so the sentences can be checked
//! by evaluation.

mod file;

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

pub use file::{load, parse_net, render_net};

use crate::eval::{EvalError, Evaluator};
use crate::eval::Assignment;
use crate::model::{LpStructure, StructureBuilder};
use crate::rational::Rational;
use crate::syntax::{ArithOp, Formula, Term, Vocabulary};

/// Largest net for which a joint is built.
pub const MAX_JOINT_VARS: usize = 20;
/// Largest net for the signed-equation check (`2^n` sentences).
pub const MAX_SIGNED_VARS: usize = 12;

#[derive(Debug, Error)]
pub enum BayesError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("`{0}` is not a variable of the net")]
    UnknownVariable(String),
    #[error("parent `{parent}` of `{child}` must be declared before it")]
    ParentNotEarlier { child: String, parent: String },
    #[error("`{var}` is missing the CPT row for {row}")]
    MissingRow { var: String, row: String },
    #[error("`{var}` has two CPT rows for {row}")]
    DuplicateRow { var: String, row: String },
    #[error("probability {value} for `{var}` is outside [0, 1]")]
    OutOfRange { var: String, value: Rational },
    #[error("{count} variables exceed the limit of {limit}")]
    TooManyVariables { count: usize, limit: usize },
    #[error("the evidence has probability zero")]
    ZeroProbabilityEvidence,
    #[error("`{0}` is not a valid variable name")]
    BadName(String),
}

/// A variable or its negation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: &str) -> Self {
        Literal { var: var.to_string(), positive: true }
    }

    pub fn neg(var: &str) -> Self {
        Literal { var: var.to_string(), positive: false }
    }

    /// The formula `X(x)` or `!X(x)`.
    pub fn formula(&self, x: &str) -> Formula {
        let a = Formula::atom(&self.var, x);
        if self.positive {
            a
        } else {
            Formula::not(a)
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        f.write_str(&self.var)
    }
}

impl std::str::FromStr for Literal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (positive, name) = match s.strip_prefix('!') {
            Some(rest) => (false, rest.trim()),
            None => (true, s),
        };
        if !crate::syntax::is_identifier(name) {
            return Err(format!("`{s}` is not a literal"));
        }
        Ok(Literal { var: name.to_string(), positive })
    }
}

/// A validated net. Parents precede their children in variable order, so
/// the graph is acyclic by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BayesNet {
    vars: Vec<String>,
    parents: Vec<Vec<usize>>,
    /// `cpt[i][r]`: probability that variable `i` is true when its parents
    /// take assignment `r`; bit `j` of `r` is set when parent `j` is false.
    cpt: Vec<Vec<Rational>>,
}

fn row_label(parents: &[String], row: usize) -> String {
    if parents.is_empty() {
        return "the prior".into();
    }
    parents
        .iter()
        .enumerate()
        .map(|(j, p)| if row >> j & 1 == 1 { format!("!{p}") } else { p.clone() })
        .collect::<Vec<_>>()
        .join(", ")
}

impl BayesNet {
    /// `cpt[i]` maps parent truth values (in `parents[i]` order) to the
    /// probability that variable `i` is true.
    pub fn new(
        vars: Vec<String>,
        parents: Vec<Vec<String>>,
        cpt: Vec<BTreeMap<Vec<bool>, Rational>>,
    ) -> Result<Self, BayesError> {
        assert_eq!(vars.len(), parents.len());
        assert_eq!(vars.len(), cpt.len());
        let mut index = BTreeMap::new();
        for (i, v) in vars.iter().enumerate() {
            if !crate::syntax::is_identifier(v) || crate::syntax::RESERVED.contains(&v.as_str()) {
                return Err(BayesError::BadName(v.clone()));
            }
            if index.insert(v.clone(), i).is_some() {
                return Err(BayesError::DuplicateVariable(v.clone()));
            }
        }
        let mut parent_idx = Vec::new();
        for (i, ps) in parents.iter().enumerate() {
            let mut idx = Vec::new();
            for p in ps {
                let j = *index.get(p).ok_or_else(|| BayesError::UnknownVariable(p.clone()))?;
                if j >= i {
                    return Err(BayesError::ParentNotEarlier { child: vars[i].clone(), parent: p.clone() });
                }
                if idx.contains(&j) {
                    return Err(BayesError::DuplicateVariable(p.clone()));
                }
                idx.push(j);
            }
            parent_idx.push(idx);
        }
        let mut table = Vec::new();
        for (i, rows) in cpt.into_iter().enumerate() {
            let m = parents[i].len();
            let mut col = vec![None; 1 << m];
            for (assign, value) in rows {
                if assign.len() != m {
                    return Err(BayesError::MissingRow { var: vars[i].clone(), row: format!("{assign:?}") });
                }
                if value.is_negative() || value > Rational::one() {
                    return Err(BayesError::OutOfRange { var: vars[i].clone(), value });
                }
                let r = assign.iter().enumerate().fold(0, |r, (j, &t)| if t { r } else { r | 1 << j });
                col[r] = Some(value);
            }
            let mut full = Vec::with_capacity(col.len());
            for (r, v) in col.into_iter().enumerate() {
                full.push(v.ok_or_else(|| BayesError::MissingRow {
                    var: vars[i].clone(),
                    row: row_label(&parents[i], r),
                })?);
            }
            table.push(full);
        }
        Ok(BayesNet { vars, parents: parent_idx, cpt: table })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn parents(&self, i: usize) -> impl Iterator<Item = &str> {
        self.parents[i].iter().map(|&j| self.vars[j].as_str())
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    fn index(&self, var: &str) -> Result<usize, BayesError> {
        self.vars.iter().position(|v| v == var).ok_or_else(|| BayesError::UnknownVariable(var.to_string()))
    }

    /// Probability that variable `i` is true given parent row `r`.
    pub fn entry(&self, i: usize, r: usize) -> &Rational {
        &self.cpt[i][r]
    }

    /// Probability of a full assignment; bit `i` of `a` is variable `i`.
    pub fn probability(&self, a: u64) -> Rational {
        let mut p = Rational::one();
        for i in 0..self.len() {
            let r = self.parents[i]
                .iter()
                .enumerate()
                .fold(0, |r, (j, &pj)| if a >> pj & 1 == 1 { r } else { r | 1 << j });
            let t = &self.cpt[i][r];
            let f = if a >> i & 1 == 1 { t.clone() } else { Rational::one() - t };
            if f.is_zero() {
                return Rational::zero();
            }
            p = p * f;
        }
        p
    }

    /// One unary object predicate per variable.
    pub fn vocabulary(&self) -> Vocabulary {
        self.vars.iter().fold(Vocabulary::new(), |v, name| v.object_pred(name, 1))
    }
}

const X: &str = "x";

fn conj(parts: Vec<Formula>) -> Formula {
    Formula::conjunction(parts).expect("nonempty")
}

/// The factorization sentence with each variable replaced by its literal
/// under `signs` (true keeps the variable positive).
pub fn signed_product_sentence(net: &BayesNet, signs: &[bool]) -> Formula {
    let (lhs, rhs) = signed_product_terms(net, signs);
    Formula::field_eq(lhs, rhs)
}

fn signed_product_terms(net: &BayesNet, signs: &[bool]) -> (Term, Term) {
    let lit = |i: usize| Literal { var: net.vars[i].clone(), positive: signs[i] }.formula(X);
    let lhs = Term::prob(conj((0..net.len()).map(lit).collect()), &[X]);
    let factors = (0..net.len()).rev().map(|i| {
        if net.parents[i].is_empty() {
            Term::prob(lit(i), &[X])
        } else {
            let given = conj(net.parents[i].iter().rev().map(|&j| lit(j)).collect());
            Term::cond_prob(lit(i), given, &[X])
        }
    });
    let rhs = factors.reduce(|acc, f| Term::arith(ArithOp::Mul, acc, f)).expect("nonempty net");
    (lhs, rhs)
}

/// The product sentence followed by one sentence per CPT row.
pub fn net_to_lp(net: &BayesNet) -> Vec<Formula> {
    let mut out = vec![signed_product_sentence(net, &vec![true; net.len()])];
    for i in 0..net.len() {
        let m = net.parents[i].len();
        for r in 0..1usize << m {
            let target = Formula::atom(&net.vars[i], X);
            let term = if m == 0 {
                Term::prob(target, &[X])
            } else {
                let given = conj(
                    net.parents[i]
                        .iter()
                        .enumerate()
                        .map(|(j, &pj)| Literal { var: net.vars[pj].clone(), positive: r >> j & 1 == 0 }.formula(X))
                        .collect(),
                );
                Term::cond_prob(target, given, &[X])
            };
            out.push(Formula::field_eq(term, Term::Num(net.cpt[i][r].clone())));
        }
    }
    out
}

/// `net_to_lp` as an `.lp` file: declarations, then one sentence per line.
pub fn compile_to_lp(net: &BayesNet) -> String {
    let mut out = net.vocabulary().render_declarations();
    out.push('\n');
    for f in net_to_lp(net) {
        out.push_str(&crate::parser::print_formula(&f));
        out.push_str(";\n");
    }
    out
}

/// The joint as a structure: individual `w<bits>` stands for the
/// assignment whose `i`-th bit character gives variable `i`.
#[derive(Clone, Debug)]
pub struct Joint {
    pub vocab: Vocabulary,
    pub model: LpStructure,
}

pub fn assignment_name(n: usize, a: u64) -> String {
    let bits: String = (0..n).map(|i| if a >> i & 1 == 1 { '1' } else { '0' }).collect();
    format!("w{bits}")
}

pub fn build_joint(net: &BayesNet) -> Result<Joint, BayesError> {
    let n = net.len();
    if n > MAX_JOINT_VARS {
        return Err(BayesError::TooManyVariables { count: n, limit: MAX_JOINT_VARS });
    }
    let vocab = net.vocabulary();
    let names: Vec<String> = (0..1u64 << n).map(|a| assignment_name(n, a)).collect();
    let mut b = StructureBuilder::new(&names);
    for v in &net.vars {
        b.predicate(v);
    }
    for (a, name) in names.iter().enumerate() {
        b.weight(name, net.probability(a as u64));
        for (i, v) in net.vars.iter().enumerate() {
            if a >> i & 1 == 1 {
                b.fact(v, &[name]);
            }
        }
    }
    let model = b.build(&vocab).expect("joint of a valid net is a valid structure");
    Ok(Joint { vocab, model })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignedOutcome {
    Holds,
    Fails { lhs: Rational, rhs: Rational },
    /// Some conditioning event has probability zero.
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedRow {
    pub signs: Vec<bool>,
    pub sentence: Formula,
    pub outcome: SignedOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedReport {
    pub rows: Vec<SignedRow>,
}

impl SignedReport {
    pub fn count(&self, pred: impl Fn(&SignedOutcome) -> bool) -> usize {
        self.rows.iter().filter(|r| pred(&r.outcome)).count()
    }

    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| !matches!(r.outcome, SignedOutcome::Fails { .. }))
    }
}

/// Checks every signed product sentence on the net's own joint.
pub fn verify_negation_uniform(net: &BayesNet) -> Result<SignedReport, BayesError> {
    verify_negation_uniform_on(net, &build_joint(net)?)
}

/// Checks every signed product sentence on a given structure, e.g. a
/// perturbed joint.
pub fn verify_negation_uniform_on(net: &BayesNet, joint: &Joint) -> Result<SignedReport, BayesError> {
    let n = net.len();
    if n > MAX_SIGNED_VARS {
        return Err(BayesError::TooManyVariables { count: n, limit: MAX_SIGNED_VARS });
    }
    let ev = Evaluator::new(&joint.model, &joint.vocab);
    let sigma = Assignment::new();
    let mut rows = Vec::new();
    for s in 0..1u64 << n {
        // Signs run from all-positive downwards.
        let signs: Vec<bool> = (0..n).map(|i| s >> i & 1 == 0).collect();
        let (lhs, rhs) = signed_product_terms(net, &signs);
        let outcome = match (ev.field(&sigma, &lhs), ev.field(&sigma, &rhs)) {
            (_, Err(EvalError::DivisionByZero { .. })) => SignedOutcome::Undefined,
            (Ok(l), Ok(r)) if l == r => SignedOutcome::Holds,
            (Ok(lhs), Ok(rhs)) => SignedOutcome::Fails { lhs, rhs },
            (Err(e), _) | (_, Err(e)) => unreachable!("joint evaluation failed: {e}"),
        };
        rows.push(SignedRow { signs, sentence: Formula::field_eq(lhs, rhs), outcome });
    }
    Ok(SignedReport { rows })
}

/// `P(target | evidence)` by summing the joint.
pub fn query(net: &BayesNet, target: &Literal, evidence: &[Literal]) -> Result<Rational, BayesError> {
    let n = net.len();
    if n > 63 {
        return Err(BayesError::TooManyVariables { count: n, limit: 63 });
    }
    let lit = |l: &Literal| -> Result<(usize, bool), BayesError> { Ok((net.index(&l.var)?, l.positive)) };
    let t = lit(target)?;
    let ev = evidence.iter().map(lit).collect::<Result<Vec<_>, _>>()?;
    let holds = |a: u64, (i, pos): (usize, bool)| (a >> i & 1 == 1) == pos;
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for a in 0..1u64 << n {
        if ev.iter().all(|&l| holds(a, l)) {
            let p = net.probability(a);
            if holds(a, t) {
                num = num + &p;
            }
            den = den + p;
        }
    }
    num.checked_div(&den).map_err(|_| BayesError::ZeroProbabilityEvidence)
}

/// The probability term a query corresponds to: `[t(x) | e(x)]{x}`.
pub fn query_term(target: &Literal, evidence: &[Literal]) -> Term {
    let body = target.formula(X);
    match Formula::conjunction(evidence.iter().map(|l| l.formula(X)).collect()) {
        None => Term::prob(body, &[X]),
        Some(given) => Term::cond_prob(body, given, &[X]),
    }
}

/// A random net on `n` variables `X1..Xn` with at most `max_parents`
/// parents each. Entries come from a small set including 0 and 1.
pub fn random_net<R: Rng>(rng: &mut R, n: usize, max_parents: usize) -> BayesNet {
    let values = [(0, 1), (1, 5), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)];
    let vars: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
    let mut parents = Vec::new();
    let mut cpt = Vec::new();
    for i in 0..n {
        let mut ps: Vec<usize> = (0..i).filter(|_| rng.gen_bool(0.5)).collect();
        while ps.len() > max_parents {
            ps.remove(rng.gen_range(0..ps.len()));
        }
        let m = ps.len();
        let mut rows = BTreeMap::new();
        for r in 0..1usize << m {
            let assign: Vec<bool> = (0..m).map(|j| r >> j & 1 == 0).collect();
            let (p, q) = values[rng.gen_range(0..values.len())];
            rows.insert(assign, Rational::frac(p, q));
        }
        parents.push(ps.iter().map(|&j| vars[j].clone()).collect());
        cpt.push(rows);
    }
    BayesNet::new(vars, parents, cpt).expect("generated nets are valid")
}
