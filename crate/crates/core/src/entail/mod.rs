//! Probabilistic entailment over monadic propositional bases.
//!
//! A possible world is a truth assignment to the atoms. Each base
//! statement constrains the total weight of the worlds satisfying its
//! formula; the tightest bounds on the query are the minimum and maximum
//! of its weight over that polytope, computed exactly by simplex.
//!
//! A conditional statement `[a | b] ⋈ c` becomes `[a & b] - c*[b] ⋈ 0`
//! together with the strict `[b] > 0`. A conditional query `[a | b]` is a
//! ratio of linear forms and is optimized after the Charnes–Cooper change
//! of variables `y = p / [b]`, `t = 1 / [b]`.
//!
//! Strict constraints are relaxed for optimization. An endpoint is
//! reported open when no point of the face attaining it satisfies every
//! strict constraint strictly.

mod simplex;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use simplex::{Lp, LpOutcome, Sense};

use crate::parser::{print_formula, print_term};
use crate::rational::Rational;
use crate::syntax::{Formula, Sort, Term};

/// Most atoms accepted; the world table has `2^MAX_ATOMS` entries.
pub const MAX_ATOMS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EntailError {
    #[error("{count} atoms exceed the limit of {MAX_ATOMS}")]
    TooManyAtoms { count: usize },
    #[error("outside the monadic fragment: {reason} in `{text}`")]
    OutsideFragment { text: String, reason: String },
    #[error("`{0}` is not one of the problem's atoms")]
    UnknownAtom(String),
}

fn outside(text: String, reason: impl Into<String>) -> EntailError {
    EntailError::OutsideFragment { text, reason: reason.into() }
}

/// A constraint on the value of a probability term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    Eq(Rational),
    Geq(Rational),
    Leq(Rational),
    Gt(Rational),
    Lt(Rational),
    Within(Rational, Rational),
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Eq(v) => write!(f, "= {v}"),
            Constraint::Geq(v) => write!(f, ">= {v}"),
            Constraint::Leq(v) => write!(f, "<= {v}"),
            Constraint::Gt(v) => write!(f, "> {v}"),
            Constraint::Lt(v) => write!(f, "< {v}"),
            Constraint::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

/// `[body | given] ⋈ c`, or `[body] ⋈ c` without `given`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub body: Formula,
    pub given: Option<Formula>,
    pub constraint: Constraint,
}

/// Formulas are quantifier-free combinations of unary atoms `A(x)`, all
/// over one variable per formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntailmentProblem {
    pub atoms: Vec<String>,
    pub base: Vec<Statement>,
    pub query: Formula,
    pub query_given: Option<Formula>,
}

/// A subinterval of `[0, 1]` with possibly open ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        let above = if self.lo_open { *v > self.lo } else { *v >= self.lo };
        let below = if self.hi_open { *v < self.hi } else { *v <= self.hi };
        above && below
    }

    pub fn is_vacuous(&self) -> bool {
        self.lo.is_zero() && self.hi.is_one() && !self.lo_open && !self.hi_open
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_open { '(' } else { '[' };
        let close = if self.hi_open { ')' } else { ']' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entailment {
    Bounds(Interval),
    /// The base constraints have no common solution.
    Infeasible,
    /// The query's condition has probability zero under every solution.
    QueryUndefined,
}

/// Relation of a row to its right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
    Lt,
    Gt,
}

impl Rel {
    fn is_strict(self) -> bool {
        matches!(self, Rel::Lt | Rel::Gt)
    }

    fn closed(self) -> Sense {
        match self {
            Rel::Le | Rel::Lt => Sense::Le,
            Rel::Ge | Rel::Gt => Sense::Ge,
            Rel::Eq => Sense::Eq,
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Le => "<=",
            Rel::Ge => ">=",
            Rel::Eq => "=",
            Rel::Lt => "<",
            Rel::Gt => ">",
        })
    }
}

/// Where a row of the program comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSource {
    Normalization,
    Base(usize),
    /// `[given] > 0` for the conditional base statement at this index.
    Positive(usize),
}

/// Coefficients over all worlds, stored as indices into a small palette.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coeffs {
    palette: Vec<Rational>,
    index: Vec<u8>,
}

impl Coeffs {
    fn from_fn(worlds: usize, mut f: impl FnMut(usize) -> Rational) -> Self {
        let mut palette: Vec<Rational> = Vec::new();
        let mut index = Vec::with_capacity(worlds);
        for w in 0..worlds {
            let v = f(w);
            let i = match palette.iter().position(|p| *p == v) {
                Some(i) => i,
                None => {
                    palette.push(v);
                    palette.len() - 1
                }
            };
            index.push(u8::try_from(i).expect("few distinct coefficients"));
        }
        Coeffs { palette, index }
    }

    pub fn get(&self, world: usize) -> &Rational {
        &self.palette[self.index[world] as usize]
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn to_vec(&self) -> Vec<Rational> {
        (0..self.len()).map(|w| self.get(w).clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpRow {
    pub coeffs: Coeffs,
    pub rel: Rel,
    pub rhs: Rational,
    pub source: RowSource,
}

/// The program over world weights `p_w`: rows, and the query as the
/// worlds satisfying its body and (for a conditional query) its condition.
/// World `w` makes atom `i` true iff bit `i` of `w` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub atoms: Vec<String>,
    pub rows: Vec<LpRow>,
    pub objective: Vec<bool>,
    pub condition: Option<Vec<bool>>,
}

impl LinearProgram {
    pub fn worlds(&self) -> usize {
        1 << self.atoms.len()
    }

    /// `P & !Q`-style description of a world.
    pub fn world_label(&self, w: usize) -> String {
        self.atoms
            .iter()
            .enumerate()
            .map(|(i, a)| if w >> i & 1 == 1 { a.clone() } else { format!("!{a}") })
            .collect::<Vec<_>>()
            .join(" & ")
    }
}

/// Propositional form of a fragment formula, atoms by index.
#[derive(Clone, Debug)]
enum Prop {
    Atom(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Implies(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn eval(&self, w: usize) -> bool {
        match self {
            Prop::Atom(i) => w >> i & 1 == 1,
            Prop::Not(a) => !a.eval(w),
            Prop::And(a, b) => a.eval(w) && b.eval(w),
            Prop::Or(a, b) => a.eval(w) || b.eval(w),
            Prop::Implies(a, b) => !a.eval(w) || b.eval(w),
        }
    }
}

/// Checks `f` is a boolean combination of `A(var)` atoms; appends new
/// atom names to `atoms` when `grow` is set. An unset `var` is fixed by the
/// first atom.
fn compile(f: &Formula, var: &mut Option<String>, atoms: &mut Vec<String>, grow: bool) -> Result<Prop, EntailError> {
    let text = || print_formula(f);
    Ok(match f {
        Formula::Pred { name, args } => {
            let [Term::Var(v)] = args.as_slice() else {
                return Err(outside(text(), "atoms must be unary predicates applied to the bound variable"));
            };
            if v.sort != Sort::Object || var.as_ref().is_some_and(|x| *x != v.name) {
                return Err(outside(text(), format!("variable `{}` is not the bound variable", v.name)));
            }
            var.get_or_insert_with(|| v.name.clone());
            let i = match atoms.iter().position(|a| a == name) {
                Some(i) => i,
                None if grow => {
                    atoms.push(name.clone());
                    atoms.len() - 1
                }
                None => return Err(EntailError::UnknownAtom(name.clone())),
            };
            Prop::Atom(i)
        }
        Formula::Not(a) => Prop::Not(Box::new(compile(a, var, atoms, grow)?)),
        Formula::And(a, b) => Prop::And(Box::new(compile(a, var, atoms, grow)?), Box::new(compile(b, var, atoms, grow)?)),
        Formula::Or(a, b) => Prop::Or(Box::new(compile(a, var, atoms, grow)?), Box::new(compile(b, var, atoms, grow)?)),
        Formula::Implies(a, b) => {
            Prop::Implies(Box::new(compile(a, var, atoms, grow)?), Box::new(compile(b, var, atoms, grow)?))
        }
        Formula::Forall(..) | Formula::Exists(..) => return Err(outside(text(), "quantifiers are not allowed")),
        _ => return Err(outside(text(), "only predicates and connectives are allowed inside the term")),
    })
}

fn world_set(worlds: usize, body: &Prop, given: Option<&Prop>) -> Vec<bool> {
    (0..worlds).map(|w| body.eval(w) && given.map_or(true, |g| g.eval(w))).collect()
}

/// Builds the program over all `2^k` worlds.
pub fn build_lp(problem: &EntailmentProblem) -> Result<LinearProgram, EntailError> {
    let k = problem.atoms.len();
    if k > MAX_ATOMS {
        return Err(EntailError::TooManyAtoms { count: k });
    }
    let worlds = 1usize << k;
    let mut atoms = problem.atoms.clone();
    let mut c = |f: &Formula, var: &mut Option<String>| compile(f, var, &mut atoms, false);

    let mut rows = vec![LpRow {
        coeffs: Coeffs::from_fn(worlds, |_| Rational::one()),
        rel: Rel::Eq,
        rhs: Rational::one(),
        source: RowSource::Normalization,
    }];
    for (i, s) in problem.base.iter().enumerate() {
        let mut var = None;
        let body = c(&s.body, &mut var)?;
        let given = s.given.as_ref().map(|g| c(g, &mut var)).transpose()?;
        let mut push = |rel: Rel, value: &Rational| {
            let coeffs = match &given {
                None => Coeffs::from_fn(worlds, |w| if body.eval(w) { Rational::one() } else { Rational::zero() }),
                Some(g) => Coeffs::from_fn(worlds, |w| {
                    if !g.eval(w) {
                        Rational::zero()
                    } else if body.eval(w) {
                        Rational::one() - value
                    } else {
                        -value.clone()
                    }
                }),
            };
            let rhs = if given.is_some() { Rational::zero() } else { value.clone() };
            rows.push(LpRow { coeffs, rel, rhs, source: RowSource::Base(i) });
        };
        match &s.constraint {
            Constraint::Eq(v) => push(Rel::Eq, v),
            Constraint::Geq(v) => push(Rel::Ge, v),
            Constraint::Leq(v) => push(Rel::Le, v),
            Constraint::Gt(v) => push(Rel::Gt, v),
            Constraint::Lt(v) => push(Rel::Lt, v),
            Constraint::Within(lo, hi) => {
                push(Rel::Ge, lo);
                push(Rel::Le, hi);
            }
        }
        if let Some(g) = &given {
            rows.push(LpRow {
                coeffs: Coeffs::from_fn(worlds, |w| if g.eval(w) { Rational::one() } else { Rational::zero() }),
                rel: Rel::Gt,
                rhs: Rational::zero(),
                source: RowSource::Positive(i),
            });
        }
    }
    let mut var = None;
    let body = c(&problem.query, &mut var)?;
    let given = problem.query_given.as_ref().map(|g| c(g, &mut var)).transpose()?;
    let objective = world_set(worlds, &body, given.as_ref());
    let condition = given.as_ref().map(|g| world_set(worlds, g, None));
    Ok(LinearProgram { atoms: problem.atoms.clone(), rows, objective, condition })
}

/// The program with identical world columns merged and, for a conditional
/// query, the Charnes–Cooper variables. Columns are the merged world
/// weights followed by `t` when conditional.
struct Reduced {
    vars: usize,
    rows: Vec<(Vec<Rational>, Rel, Rational)>,
    objective: Vec<Rational>,
}

fn reduce(lp: &LinearProgram) -> Reduced {
    let worlds = lp.worlds();
    let mut groups: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut rep = Vec::new();
    for w in 0..worlds {
        let mut sig: Vec<u8> = lp.rows.iter().map(|r| r.coeffs.index[w]).collect();
        sig.push(lp.objective[w] as u8);
        if let Some(c) = &lp.condition {
            sig.push(c[w] as u8);
        }
        groups.entry(sig).or_insert_with(|| {
            rep.push(w);
            rep.len() - 1
        });
    }
    let g = rep.len();
    let conditional = lp.condition.is_some();
    let vars = g + conditional as usize;
    let mut rows = Vec::new();
    for r in &lp.rows {
        let mut coeffs: Vec<Rational> = rep.iter().map(|&w| r.coeffs.get(w).clone()).collect();
        if conditional {
            // a·p ⋈ b  becomes  a·y - b·t ⋈ 0
            coeffs.push(-r.rhs.clone());
            rows.push((coeffs, r.rel, Rational::zero()));
        } else {
            rows.push((coeffs, r.rel, r.rhs.clone()));
        }
    }
    let indicator = |set: &[bool]| -> Vec<Rational> {
        let mut v: Vec<Rational> =
            rep.iter().map(|&w| if set[w] { Rational::one() } else { Rational::zero() }).collect();
        if conditional {
            v.push(Rational::zero());
        }
        v
    };
    if let Some(c) = &lp.condition {
        rows.push((indicator(c), Rel::Eq, Rational::one()));
    }
    Reduced { vars, rows, objective: indicator(&lp.objective) }
}

impl Reduced {
    fn closed_lp(&self) -> Lp {
        let mut lp = Lp::new(self.vars);
        for (c, rel, rhs) in &self.rows {
            lp.row(c.clone(), rel.closed(), rhs.clone());
        }
        lp
    }

    /// Whether some point satisfies every strict row strictly, optionally on
    /// the face where the objective equals `on_face`.
    fn strictly_feasible(&self, on_face: Option<&Rational>) -> Option<bool> {
        let strict: Vec<_> = self.rows.iter().filter(|r| r.1.is_strict()).collect();
        let n = self.vars + 1;
        let mut lp = Lp::new(n);
        let extend = |c: &[Rational], eps: Rational| {
            let mut v = c.to_vec();
            v.push(eps);
            v
        };
        for (c, rel, rhs) in &self.rows {
            let eps = match rel {
                Rel::Gt => -Rational::one(),
                Rel::Lt => Rational::one(),
                _ => Rational::zero(),
            };
            lp.row(extend(c, eps), rel.closed(), rhs.clone());
        }
        if let Some(v) = on_face {
            lp.row(extend(&self.objective, Rational::zero()), Sense::Eq, v.clone());
        }
        let mut cap = vec![Rational::zero(); n];
        cap[n - 1] = Rational::one();
        lp.row(cap.clone(), Sense::Le, Rational::one());
        lp.objective = cap;
        match lp.maximize() {
            LpOutcome::Optimal { value, .. } => Some(strict.is_empty() || !value.is_zero()),
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded => unreachable!("epsilon is capped"),
        }
    }
}

/// Tightest bounds on the query given the base.
pub fn bounds(problem: &EntailmentProblem) -> Result<Entailment, EntailError> {
    let lp = build_lp(problem)?;
    let base_only = LinearProgram { condition: None, ..lp.clone() };
    match reduce(&base_only).strictly_feasible(None) {
        Some(true) => {}
        _ => return Ok(Entailment::Infeasible),
    }
    let red = reduce(&lp);
    if lp.condition.is_some() && red.strictly_feasible(None) != Some(true) {
        return Ok(Entailment::QueryUndefined);
    }
    let mut closed = red.closed_lp();
    closed.objective = red.objective.clone();
    let value = |o: LpOutcome| match o {
        LpOutcome::Optimal { value, .. } => value,
        other => unreachable!("nonempty bounded program gave {other:?}"),
    };
    let lo = value(closed.minimize());
    let hi = value(closed.maximize());
    let open = |v: &Rational| red.strictly_feasible(Some(v)) != Some(true);
    Ok(Entailment::Bounds(Interval { lo_open: open(&lo), hi_open: open(&hi), lo, hi }))
}

/// `(body, given, variable)` of a probability term in the fragment.
/// Splits a one-variable probability term into body, condition and variable.
pub fn fragment_term(t: &Term) -> Result<(&Formula, Option<&Formula>, &str), EntailError> {
    match t {
        Term::Prob { body, vars } if vars.len() == 1 => Ok((body, None, &vars[0])),
        Term::CondProb { body, given, vars } if vars.len() == 1 => Ok((body, Some(given), &vars[0])),
        Term::Prob { .. } | Term::CondProb { .. } => {
            Err(outside(print_term(t), "probability terms must bind exactly one variable"))
        }
        _ => Err(outside(print_term(t), "expected a probability term")),
    }
}

fn literal(t: &Term) -> Option<Rational> {
    match t {
        Term::Num(v) => Some(v.clone()),
        _ => None,
    }
}

/// Splits a sentence `term ⋈ c` (either side order) into its parts.
pub fn fragment_sentence(f: &Formula) -> Result<(&Term, Constraint), EntailError> {
    let text = || print_formula(f);
    let (l, r, rel) = match f {
        Formula::Eq { sort: Sort::Field, lhs, rhs } => (lhs, rhs, Rel::Eq),
        Formula::Geq(l, r) => (l, r, Rel::Ge),
        Formula::Leq(l, r) => (l, r, Rel::Le),
        Formula::Gt(l, r) => (l, r, Rel::Gt),
        Formula::Lt(l, r) => (l, r, Rel::Lt),
        Formula::InInterval(t, lo, hi) => {
            let (Some(lo), Some(hi)) = (literal(lo), literal(hi)) else {
                return Err(outside(text(), "interval endpoints must be numeric literals"));
            };
            return Ok((t, Constraint::Within(lo, hi)));
        }
        _ => return Err(outside(text(), "expected `[..]{x} ⋈ c`")),
    };
    let (term, value, rel) = match (literal(l), literal(r)) {
        (None, Some(v)) => (l, v, rel),
        (Some(v), None) => {
            let flipped = match rel {
                Rel::Ge => Rel::Le,
                Rel::Le => Rel::Ge,
                Rel::Gt => Rel::Lt,
                Rel::Lt => Rel::Gt,
                Rel::Eq => Rel::Eq,
            };
            (r, v, flipped)
        }
        _ => return Err(outside(text(), "one side must be a numeric literal")),
    };
    let c = match rel {
        Rel::Eq => Constraint::Eq(value),
        Rel::Ge => Constraint::Geq(value),
        Rel::Le => Constraint::Leq(value),
        Rel::Gt => Constraint::Gt(value),
        Rel::Lt => Constraint::Lt(value),
    };
    Ok((term, c))
}

/// Reads Lp sentences and a query term into a problem. Atoms are ordered
/// by first occurrence, base sentences first.
pub fn problem_from_sentences(sentences: &[Formula], query: &Term) -> Result<EntailmentProblem, EntailError> {
    let mut atoms = Vec::new();
    let mut base = Vec::new();
    for s in sentences {
        let (term, constraint) = fragment_sentence(s)?;
        let (body, given, var) = fragment_term(term)?;
        let mut var = Some(var.to_string());
        compile(body, &mut var, &mut atoms, true)?;
        if let Some(g) = given {
            compile(g, &mut var, &mut atoms, true)?;
        }
        base.push(Statement { body: body.clone(), given: given.cloned(), constraint });
    }
    let (body, given, var) = fragment_term(query)?;
    let mut var = Some(var.to_string());
    compile(body, &mut var, &mut atoms, true)?;
    if let Some(g) = given {
        compile(g, &mut var, &mut atoms, true)?;
    }
    if atoms.len() > MAX_ATOMS {
        return Err(EntailError::TooManyAtoms { count: atoms.len() });
    }
    Ok(EntailmentProblem { atoms, base, query: body.clone(), query_given: given.cloned() })
}

pub fn entail_lp_sentences(sentences: &[Formula], query: &Term) -> Result<Entailment, EntailError> {
    bounds(&problem_from_sentences(sentences, query)?)
}

#[cfg(test)]
mod tests;
