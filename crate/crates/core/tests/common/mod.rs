//! Shared test oracles.
//!
//! The entailment oracle enumerates every vertex of the polytope of world
//! distributions allowed by a base, using fraction arithmetic on `i128`
//! and no code from the library's LP. Bounds, openness and feasibility
//! all follow from the vertex list:
//!
//! - the closure of the feasible set is the polytope, so its extremes are
//!   the interval endpoints;
//! - a strict row `r > 0` (with `r >= 0` on the polytope) can hold
//!   together with the others iff each is positive at some vertex, since
//!   averaging those vertices makes all of them positive at once;
//! - an endpoint is attained iff the same holds on the face where the
//!   query takes that value.

#![allow(dead_code)]

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lp_logic::entail::{Entailment, Interval};
use lp_logic::eval::{axiom_suite, Assignment, EvalError, EvalOptions, Evaluator, SuiteParams, SuiteReport};
use lp_logic::model::{generate_random, GenParams, LpStructure, StructureBuilder, WeightStyle};
use lp_logic::parser::parse_file;
use lp_logic::syntax::{Formula, Term, Vocabulary};
use lp_logic::Rational;

pub type Q = Ratio<i128>;

pub fn to_q(r: &Rational) -> Q {
    Q::new(r.numer().to_i128().expect("small numerator"), r.denom().to_i128().expect("small denominator"))
}

pub fn from_q(q: &Q) -> Rational {
    format!("{}/{}", q.numer(), q.denom()).parse().expect("valid rational")
}

fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

/// `{p : eqs hold, ineqs hold}` with rows `a·p = b` and `a·p >= b`.
#[derive(Clone, Debug, Default)]
pub struct Polytope {
    pub dim: usize,
    pub eqs: Vec<(Vec<Q>, Q)>,
    pub ineqs: Vec<(Vec<Q>, Q)>,
}

/// Reduced row echelon form built one row at a time.
#[derive(Clone)]
struct Echelon {
    rows: Vec<(Vec<Q>, Q, usize)>,
}

impl Echelon {
    /// Adds a row; `None` if it is dependent on the rows so far (and
    /// `Some(false)` if it makes the system inconsistent).
    fn push(&mut self, a: &[Q], b: &Q) -> Option<bool> {
        let mut a = a.to_vec();
        let mut b = *b;
        for (row, rb, pivot) in &self.rows {
            let f = a[*pivot];
            if !f.is_zero() {
                for (x, y) in a.iter_mut().zip(row) {
                    *x -= f * y;
                }
                b -= f * rb;
            }
        }
        let Some(pivot) = a.iter().position(|x| !x.is_zero()) else {
            return if b.is_zero() { None } else { Some(false) };
        };
        let inv = a[pivot].recip();
        for x in a.iter_mut() {
            *x *= inv;
        }
        b *= inv;
        for (row, rb, _) in self.rows.iter_mut() {
            let f = row[pivot];
            if !f.is_zero() {
                for (x, y) in row.iter_mut().zip(&a) {
                    *x -= f * y;
                }
                *rb -= f * b;
            }
        }
        self.rows.push((a, b, pivot));
        Some(true)
    }

    fn solution(&self, dim: usize) -> Vec<Q> {
        let mut x = vec![Q::zero(); dim];
        for (_, b, p) in &self.rows {
            x[*p] = *b;
        }
        x
    }
}

fn dot(a: &[Q], x: &[Q]) -> Q {
    a.iter().zip(x).map(|(u, v)| u * v).sum()
}

impl Polytope {
    pub fn satisfies(&self, x: &[Q]) -> bool {
        self.eqs.iter().all(|(a, b)| dot(a, x) == *b) && self.ineqs.iter().all(|(a, b)| dot(a, x) >= *b)
    }

    /// Every vertex, assuming the polytope is bounded.
    pub fn vertices(&self) -> Vec<Vec<Q>> {
        let mut base = Echelon { rows: Vec::new() };
        for (a, b) in &self.eqs {
            if base.push(a, b) == Some(false) {
                return Vec::new();
            }
        }
        let mut out: Vec<Vec<Q>> = Vec::new();
        self.extend(&base, 0, &mut out);
        out
    }

    fn extend(&self, ech: &Echelon, from: usize, out: &mut Vec<Vec<Q>>) {
        if ech.rows.len() == self.dim {
            let x = ech.solution(self.dim);
            if self.satisfies(&x) && !out.contains(&x) {
                out.push(x);
            }
            return;
        }
        // Not enough rows left to reach full rank.
        if self.ineqs.len() - from < self.dim - ech.rows.len() {
            return;
        }
        for i in from..self.ineqs.len() {
            let mut next = ech.clone();
            let (a, b) = &self.ineqs[i];
            if next.push(a, b) == Some(true) {
                self.extend(&next, i + 1, out);
            }
        }
    }
}

pub const ATOMS: [&str; 3] = ["P", "Q", "R"];

/// Truth of a quantifier-free monadic formula in world `w` (bit `i` is
/// `ATOMS[i]`).
pub fn holds(f: &Formula, w: usize) -> bool {
    match f {
        Formula::Pred { name, .. } => w >> ATOMS.iter().position(|a| a == name).expect("known atom") & 1 == 1,
        Formula::Not(g) => !holds(g, w),
        Formula::And(a, b) => holds(a, w) && holds(b, w),
        Formula::Or(a, b) => holds(a, w) || holds(b, w),
        Formula::Implies(a, b) => !holds(a, w) || holds(b, w),
        other => panic!("outside the oracle's fragment: {other:?}"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Eq,
    Geq,
    Leq,
    Gt,
    Lt,
    Within,
}

#[derive(Clone, Debug)]
pub struct Stat {
    pub body: Formula,
    pub given: Option<Formula>,
    pub kind: Kind,
    pub lo: Q,
    pub hi: Q,
}

impl Stat {
    pub fn term(&self) -> Term {
        match &self.given {
            None => Term::prob(self.body.clone(), &["x"]),
            Some(g) => Term::cond_prob(self.body.clone(), g.clone(), &["x"]),
        }
    }

    pub fn sentence(&self) -> Formula {
        let t = self.term();
        let num = |v: &Q| Term::Num(from_q(v));
        match self.kind {
            Kind::Eq => Formula::field_eq(t, num(&self.lo)),
            Kind::Geq => Formula::Geq(t, num(&self.lo)),
            Kind::Gt => Formula::Gt(t, num(&self.lo)),
            Kind::Leq => Formula::Leq(t, num(&self.hi)),
            Kind::Lt => Formula::Lt(t, num(&self.hi)),
            Kind::Within => Formula::InInterval(t, num(&self.lo), num(&self.hi)),
        }
    }
}

/// A base of statistics over `k` atoms plus a query term.
#[derive(Clone, Debug)]
pub struct Sample {
    pub k: usize,
    pub base: Vec<Stat>,
    pub query: Formula,
    pub query_given: Option<Formula>,
}

impl Sample {
    pub fn sentences(&self) -> Vec<Formula> {
        self.base.iter().map(Stat::sentence).collect()
    }

    pub fn query_term(&self) -> Term {
        match &self.query_given {
            None => Term::prob(self.query.clone(), &["x"]),
            Some(g) => Term::cond_prob(self.query.clone(), g.clone(), &["x"]),
        }
    }

    fn indicator(&self, f: &Formula, g: Option<&Formula>) -> Vec<Q> {
        (0..1usize << self.k)
            .map(|w| if holds(f, w) && g.is_none_or(|g| holds(g, w)) { Q::one() } else { Q::zero() })
            .collect()
    }

    /// The closed polytope and the strict rows `a·p > b`.
    pub fn polytope(&self) -> (Polytope, Vec<(Vec<Q>, Q)>) {
        let n = 1usize << self.k;
        let mut p = Polytope { dim: n, ..Default::default() };
        p.eqs.push((vec![Q::one(); n], Q::one()));
        for w in 0..n {
            let mut e = vec![Q::zero(); n];
            e[w] = Q::one();
            p.ineqs.push((e, Q::zero()));
        }
        let mut strict = Vec::new();
        for s in &self.base {
            // Rows `row(c) ⋈ 0` compare the term with the constant c.
            let row = |c: &Q| -> (Vec<Q>, Q) {
                match &s.given {
                    None => (self.indicator(&s.body, None), *c),
                    Some(g) => {
                        let joint = self.indicator(&s.body, Some(g));
                        let cond = self.indicator(g, None);
                        (joint.iter().zip(&cond).map(|(j, d)| j - c * d).collect(), Q::zero())
                    }
                }
            };
            let neg = |(a, b): (Vec<Q>, Q)| (a.iter().map(|x| -x).collect::<Vec<_>>(), -b);
            match s.kind {
                Kind::Eq => p.eqs.push(row(&s.lo)),
                Kind::Geq => p.ineqs.push(row(&s.lo)),
                Kind::Leq => p.ineqs.push(neg(row(&s.hi))),
                Kind::Within => {
                    p.ineqs.push(row(&s.lo));
                    p.ineqs.push(neg(row(&s.hi)));
                }
                Kind::Gt => {
                    p.ineqs.push(row(&s.lo));
                    strict.push(row(&s.lo));
                }
                Kind::Lt => {
                    p.ineqs.push(neg(row(&s.hi)));
                    strict.push(neg(row(&s.hi)));
                }
            }
            if let Some(g) = &s.given {
                strict.push((self.indicator(g, None), Q::zero()));
            }
        }
        (p, strict)
    }
}

#[derive(Clone, Debug)]
pub struct Oracle {
    pub result: Entailment,
    pub vertices: usize,
}

/// Whether all strict rows can hold at once somewhere in the convex hull
/// of `points`, together with `den > 0` when given.
fn strictly_feasible(points: &[&Vec<Q>], strict: &[(Vec<Q>, Q)], den: Option<&[Q]>) -> bool {
    let positive = |a: &[Q], b: &Q| points.iter().any(|v| dot(a, v) > *b);
    strict.iter().all(|(a, b)| positive(a, b)) && den.is_none_or(|d| positive(d, &Q::zero()))
}

pub fn oracle(s: &Sample) -> Oracle {
    let (poly, strict) = s.polytope();
    let verts = poly.vertices();
    let all: Vec<&Vec<Q>> = verts.iter().collect();
    if verts.is_empty() || !strictly_feasible(&all, &strict, None) {
        return Oracle { result: Entailment::Infeasible, vertices: verts.len() };
    }
    let num = s.indicator(&s.query, s.query_given.as_ref());
    let den = match &s.query_given {
        None => vec![Q::one(); 1 << s.k],
        Some(g) => s.indicator(g, None),
    };
    if !strictly_feasible(&all, &strict, Some(&den)) {
        return Oracle { result: Entailment::QueryUndefined, vertices: verts.len() };
    }
    let ratios: Vec<Q> = verts.iter().filter(|v| dot(&den, v) > Q::zero()).map(|v| dot(&num, v) / dot(&den, v)).collect();
    let lo = *ratios.iter().min().expect("some vertex has positive condition");
    let hi = *ratios.iter().max().expect("some vertex has positive condition");
    // The face where the ratio equals `c` is where `num - c·den` vanishes.
    let open = |c: &Q| {
        let face: Vec<&Vec<Q>> = verts
            .iter()
            .filter(|v| (dot(&num, v) - c * dot(&den, v)).is_zero())
            .collect();
        !strictly_feasible(&face, &strict, Some(&den))
    };
    let interval = Interval { lo: from_q(&lo), hi: from_q(&hi), lo_open: open(&lo), hi_open: open(&hi) };
    Oracle { result: Entailment::Bounds(interval), vertices: verts.len() }
}

pub fn atom_vocab() -> Vocabulary {
    parse_file("object pred P/1; object pred Q/1; object pred R/1;", &Vocabulary::new()).unwrap().vocab
}

pub fn random_formula<R: Rng>(rng: &mut R, k: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        let a = Formula::atom(ATOMS[rng.gen_range(0..k)], "x");
        return if rng.gen_bool(0.3) { Formula::not(a) } else { a };
    }
    let a = random_formula(rng, k, depth - 1);
    match rng.gen_range(0..4) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_formula(rng, k, depth - 1)),
        2 => Formula::or(a, random_formula(rng, k, depth - 1)),
        _ => Formula::implies(a, random_formula(rng, k, depth - 1)),
    }
}

/// A model over `P`, `Q`, `R` with up to six individuals and random
/// integer weights.
pub fn random_model<R: Rng>(rng: &mut R, k: usize, vocab: &Vocabulary) -> LpStructure {
    let n = rng.gen_range(1..=6);
    let names: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
    let mut b = StructureBuilder::new(&names);
    for a in ATOMS {
        b.predicate(a);
    }
    let mut weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    for (i, name) in names.iter().enumerate() {
        b.weight(name, Rational::frac(weights[i], total));
        for a in &ATOMS[..k] {
            if rng.gen_bool(0.5) {
                b.fact(a, &[name]);
            }
        }
    }
    b.build(vocab).expect("valid model")
}

const CONSTANTS: [(i128, i128); 7] = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)];

/// A base read off `model` (so the model satisfies it) or, with some
/// probability, with arbitrary constants that may make it infeasible.
pub fn random_sample<R: Rng>(rng: &mut R, k: usize, model: &LpStructure, vocab: &Vocabulary) -> Sample {
    let ev = Evaluator::new(model, vocab);
    let arbitrary = rng.gen_bool(0.2);
    let count = rng.gen_range(1..=3);
    let slacks = [q(0, 1), q(1, 10), q(1, 4), q(1, 2)];
    let mut base = Vec::new();
    for _ in 0..count {
        let body = random_formula(rng, k, 2);
        let mut given = rng.gen_bool(0.4).then(|| random_formula(rng, k, 1));
        let mut stat = Stat { body, given: given.clone(), kind: Kind::Eq, lo: Q::zero(), hi: Q::zero() };
        let value = match ev.field(&Assignment::new(), &stat.term()) {
            Ok(v) => to_q(&v),
            Err(EvalError::DivisionByZero { .. }) => {
                given = None;
                stat.given = None;
                to_q(&ev.field(&Assignment::new(), &stat.term()).unwrap())
            }
            Err(e) => panic!("{e}"),
        };
        let value = if arbitrary {
            let (n, d) = *CONSTANTS.choose(rng).unwrap();
            q(n, d)
        } else {
            value
        };
        let kinds = [Kind::Eq, Kind::Geq, Kind::Leq, Kind::Gt, Kind::Lt, Kind::Within];
        stat.kind = *kinds.choose(rng).unwrap();
        let s1 = *slacks.choose(rng).unwrap();
        let s2 = *slacks.choose(rng).unwrap();
        let strict_slack = *slacks[1..].choose(rng).unwrap();
        (stat.lo, stat.hi) = match stat.kind {
            Kind::Eq => (value, value),
            Kind::Geq => (value - s1, value),
            Kind::Leq => (value, value + s1),
            Kind::Gt => (value - strict_slack, value),
            Kind::Lt => (value, value + strict_slack),
            Kind::Within => (value - s1, value + s2),
        };
        let _ = given;
        base.push(stat);
    }
    let query = random_formula(rng, k, 2);
    let query_given = rng.gen_bool(0.4).then(|| random_formula(rng, k, 1));
    Sample { k, base, query, query_given }
}

/// Sample number `i` of a seeded stream: `(sample, witness model)`.
pub fn entailment_case(seed: u64, i: u64) -> (Sample, LpStructure) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let vocab = atom_vocab();
    let k = rng.gen_range(1..=3);
    let model = random_model(&mut rng, k, &vocab);
    let sample = random_sample(&mut rng, k, &model, &vocab);
    (sample, model)
}

/// Checks one sample against the library; `Err` describes a mismatch.
pub fn check_entailment(sample: &Sample, model: &LpStructure) -> Result<(), String> {
    let vocab = atom_vocab();
    let sentences = sample.sentences();
    let query = sample.query_term();
    let text = || {
        let base: Vec<String> = sentences.iter().map(lp_logic::parser::print_formula).collect();
        format!("base {base:?}, query {}", lp_logic::parser::print_term(&query))
    };
    let got = lp_logic::entail::entail_lp_sentences(&sentences, &query).map_err(|e| format!("{e}: {}", text()))?;
    let want = oracle(sample).result;
    if got != want {
        return Err(format!("got {got:?}, oracle {want:?}: {}", text()));
    }
    let ev = Evaluator::new(model, &vocab);
    let sigma = Assignment::new();
    let satisfied = sentences.iter().all(|s| ev.formula(&sigma, s).unwrap_or(false));
    if satisfied {
        match (&got, ev.field(&sigma, &query)) {
            (Entailment::Infeasible, _) => return Err(format!("a model satisfies an infeasible base: {}", text())),
            (Entailment::Bounds(i), Ok(v)) if !i.contains(&v) => {
                return Err(format!("model value {v} outside {i}: {}", text()))
            }
            (Entailment::QueryUndefined, Ok(v)) => return Err(format!("model defines the query as {v}: {}", text())),
            _ => {}
        }
    }
    Ok(())
}

/// Generation parameters for the `i`-th model of an axiom run.
pub fn suite_model_params(i: usize, sizes: &[usize]) -> GenParams {
    let style = if i % 2 == 0 { WeightStyle::Random } else { WeightStyle::Uniform };
    GenParams::new(sizes[i % sizes.len()], vec![1, 1, 2], style).with_extras()
}

pub fn within(q: &Q, lo: &Q, hi: &Q) -> bool {
    q >= lo && q <= hi && !q.is_negative()
}

/// One axiom run over `count` generated models, as the CLI does it.
pub fn run_suite(seed: u64, count: usize, pairs: usize, opts: EvalOptions, broken: bool) -> SuiteReport {
    let sizes: Vec<usize> = (1..=6).collect();
    let mut report = SuiteReport::default();
    for i in 0..count {
        let model_seed = seed.wrapping_add(i as u64);
        let (vocab, mut model) = generate_random(model_seed, &suite_model_params(i, &sizes));
        if broken {
            let doubled = model.weights().iter().map(|w| w * &Rational::from_integer(2)).collect();
            model = model.with_weights_unchecked(doubled);
        }
        let params = SuiteParams { pairs, seed: model_seed, depth: 3 };
        report.merge(axiom_suite(&model, &vocab, &params, opts));
    }
    report
}
