//! Executable probability axioms: each check draws formulas, evaluates
//! both sides exactly on one structure, and tallies the outcome.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Assignment, EvalError, EvalOptions, Evaluator};
use crate::gen::SemanticGen;
use crate::model::LpStructure;
use crate::par;
use crate::parser::print_formula;
use crate::rational::Rational;
use crate::syntax::{Formula, Term, Var, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    P1,
    P2,
    P3,
    P4,
    P5,
    Lemma1a,
    Lemma1b,
    Bayes,
    Tautology,
    Permutation,
    ZeroOne,
    Monotonicity,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::P1,
        Check::P2,
        Check::P3,
        Check::P4,
        Check::P5,
        Check::Lemma1a,
        Check::Lemma1b,
        Check::Bayes,
        Check::Tautology,
        Check::Permutation,
        Check::ZeroOne,
        Check::Monotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::P1 => "P1 universal implies measure one",
            Check::P2 => "P2 nonnegativity",
            Check::P3 => "P3 complement",
            Check::P4 => "P4 subadditivity",
            Check::P5 => "P5 disjoint additivity",
            Check::Lemma1a => "L1a equivalent formulas",
            Check::Lemma1b => "L1b inclusion-exclusion",
            Check::Bayes => "L2 Bayes rule",
            Check::Tautology => "tautology irrelevance",
            Check::Permutation => "variable permutation",
            Check::ZeroOne => "zero-one law",
            Check::Monotonicity => "monotonicity",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckTally {
    pub pass: u64,
    pub fail: u64,
    /// Instances whose statement involves an undefined quotient.
    pub undefined: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub check: Check,
    pub alpha: String,
    pub beta: String,
    pub vars: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub tallies: BTreeMap<Check, CheckTally>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: SuiteReport) {
        for (c, t) in other.tallies {
            let e = self.tallies.entry(c).or_default();
            e.pass += t.pass;
            e.fail += t.fail;
            e.undefined += t.undefined;
        }
        self.failures.extend(other.failures);
    }

    pub fn total(&self) -> CheckTally {
        let mut sum = CheckTally::default();
        for t in self.tallies.values() {
            sum.pass += t.pass;
            sum.fail += t.fail;
            sum.undefined += t.undefined;
        }
        sum
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteParams {
    /// Formula pairs drawn per structure.
    pub pairs: usize,
    pub seed: u64,
    pub depth: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { pairs: 20, seed: 0, depth: 3 }
    }
}

const FREE: [&str; 3] = ["x", "y", "z"];

/// Runs every check on `pairs` random formula pairs over `model`.
pub fn axiom_suite(model: &LpStructure, vocab: &Vocabulary, params: &SuiteParams, opts: EvalOptions) -> SuiteReport {
    let gen = SemanticGen::from_vocab(vocab, &FREE);
    let ev = Evaluator::new(model, vocab).with_options(opts);
    let reports = par::map_range(opts.parallelism, params.pairs, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        run_pair(&ev, &gen, params.depth, &mut rng)
    });
    let mut out = SuiteReport::default();
    for c in Check::ALL {
        out.tallies.insert(c, CheckTally::default());
    }
    for r in reports {
        out.merge(r);
    }
    out
}

struct Pair<'e, 'm> {
    ev: &'e Evaluator<'m>,
    sigma: Assignment,
    alpha: Formula,
    beta: Formula,
    vars: Vec<String>,
    report: SuiteReport,
}

enum Outcome {
    Pass,
    Fail(String),
    Undefined,
}

impl Pair<'_, '_> {
    fn p(&self, f: &Formula) -> Result<Rational, EvalError> {
        self.p_over(f, &self.vars)
    }

    fn p_over(&self, f: &Formula, vars: &[String]) -> Result<Rational, EvalError> {
        self.ev.probability(&self.sigma, f, vars)
    }

    fn record(&mut self, check: Check, alpha: &Formula, beta: &Formula, outcome: Result<Outcome, EvalError>) {
        let tally = self.report.tallies.entry(check).or_default();
        let detail = match outcome {
            Ok(Outcome::Pass) => {
                tally.pass += 1;
                return;
            }
            Ok(Outcome::Undefined) => {
                tally.undefined += 1;
                return;
            }
            Ok(Outcome::Fail(d)) => d,
            Err(e) => format!("evaluation error: {e}"),
        };
        tally.fail += 1;
        self.report.failures.push(Failure {
            check,
            alpha: print_formula(alpha),
            beta: print_formula(beta),
            vars: self.vars.clone(),
            detail,
        });
    }
}

fn verdict(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(detail())
    }
}

fn run_pair(ev: &Evaluator<'_>, gen: &SemanticGen, depth: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
    let model = ev.model();
    let mut sigma = Assignment::new();
    for v in FREE {
        sigma = sigma.with_object(v, rng.gen_range(0..model.size()));
    }
    let mut vars: Vec<String> = FREE[..2].iter().map(|s| s.to_string()).collect();
    if model.size() <= 4 && rng.gen_bool(0.3) {
        vars.push(FREE[2].to_string());
    }
    vars.shuffle(rng);
    vars.truncate(rng.gen_range(1..=vars.len()));

    let alpha = gen.formula(rng, depth);
    let beta = gen.formula(rng, depth);
    let closed = gen.sentence(rng, depth);
    let gamma = gen.formula(rng, 1);
    let mut pair = Pair { ev, sigma, alpha, beta, vars, report: SuiteReport::default() };
    let (a, b) = (pair.alpha.clone(), pair.beta.clone());

    // P1 on the drawn formula and on a tautology, whose antecedent always holds.
    for f in [a.clone(), Formula::or(a.clone(), Formula::not(a.clone()))] {
        let out = p1(&pair, &f);
        pair.record(Check::P1, &f, &b, out);
    }
    for f in [&a, &b] {
        let out = pair.p(f).map(|v| verdict(!v.is_negative(), || format!("measure {v} < 0")));
        pair.record(Check::P2, f, &b, out);
    }
    let out = (|| {
        let (x, y) = (pair.p(&a)?, pair.p(&Formula::not(a.clone()))?);
        Ok(verdict((&x + &y).is_one(), || format!("{x} + {y} != 1")))
    })();
    pair.record(Check::P3, &a, &b, out);

    let out = (|| {
        let (x, y, u) = (pair.p(&a)?, pair.p(&b)?, pair.p(&Formula::or(a.clone(), b.clone()))?);
        Ok(verdict(&x + &y >= u, || format!("{x} + {y} < {u}")))
    })();
    pair.record(Check::P4, &a, &b, out);

    // P5 on the drawn pair and on a pair disjoint by construction.
    let disjoint = Formula::and(Formula::not(a.clone()), b.clone());
    for (f, g) in [(a.clone(), b.clone()), (a.clone(), disjoint)] {
        let out = (|| {
            if !pair.p(&Formula::and(f.clone(), g.clone()))?.is_zero() {
                return Ok(Outcome::Pass);
            }
            let (x, y, u) = (pair.p(&f)?, pair.p(&g)?, pair.p(&Formula::or(f.clone(), g.clone()))?);
            Ok(verdict(&x + &y == u, || format!("{x} + {y} != {u}")))
        })();
        pair.record(Check::P5, &f, &g, out);
    }

    // Lemma 1a on the drawn pair and on an equivalent rewriting of alpha.
    let equivalent = Formula::or(a.clone(), Formula::and(a.clone(), b.clone()));
    for (f, g) in [(a.clone(), b.clone()), (a.clone(), equivalent)] {
        let out = (|| {
            let fg = pair.p(&Formula::implies(f.clone(), g.clone()))?;
            let gf = pair.p(&Formula::implies(g.clone(), f.clone()))?;
            if !(fg.is_one() && gf.is_one()) {
                return Ok(Outcome::Pass);
            }
            let (x, y) = (pair.p(&f)?, pair.p(&g)?);
            Ok(verdict(x == y, || format!("{x} != {y}")))
        })();
        pair.record(Check::Lemma1a, &f, &g, out);
    }

    let out = (|| {
        let u = pair.p(&Formula::or(a.clone(), b.clone()))?;
        let (x, y, i) = (pair.p(&a)?, pair.p(&b)?, pair.p(&Formula::and(a.clone(), b.clone()))?);
        let rhs = &(&x + &y) - &i;
        Ok(verdict(u == rhs, || format!("{u} != {x} + {y} - {i}")))
    })();
    pair.record(Check::Lemma1b, &a, &b, out);

    let out = bayes(&pair, &a, &b);
    pair.record(Check::Bayes, &a, &b, out);

    let out = tautology(&pair, &a, &gamma);
    pair.record(Check::Tautology, &a, &gamma, out);

    let out = (|| {
        let mut reversed = pair.vars.clone();
        reversed.reverse();
        let (x, y) = (pair.p(&a)?, pair.p_over(&a, &reversed)?);
        Ok(verdict(x == y, || format!("{x} != {y} after reordering")))
    })();
    pair.record(Check::Permutation, &a, &b, out);

    let out = pair.p(&closed).map(|v| verdict(v.is_zero() || v.is_one(), || format!("closed formula has measure {v}")));
    pair.record(Check::ZeroOne, &closed, &b, out);

    let out = (|| {
        let lo = pair.p(&Formula::and(a.clone(), b.clone()))?;
        let mid = pair.p(&a)?;
        let hi = pair.p(&Formula::or(a.clone(), b.clone()))?;
        Ok(verdict(lo <= mid && mid <= hi, || format!("not {lo} <= {mid} <= {hi}")))
    })();
    pair.record(Check::Monotonicity, &a, &b, out);

    pair.report
}

fn p1(pair: &Pair<'_, '_>, f: &Formula) -> Result<Outcome, EvalError> {
    let mut closure = f.clone();
    for v in pair.vars.iter().rev() {
        closure = Formula::forall(Var::object(v.clone()), closure);
    }
    if !pair.ev.formula(&pair.sigma, &closure)? {
        return Ok(Outcome::Pass);
    }
    let v = pair.p(f)?;
    Ok(verdict(v.is_one(), || format!("holds everywhere but has measure {v}")))
}

/// `[b|a] = [a|b] * [b] / [a]`, using conditional terms where defined.
fn bayes(pair: &Pair<'_, '_>, a: &Formula, b: &Formula) -> Result<Outcome, EvalError> {
    let pa = pair.p(a)?;
    let pb = pair.p(b)?;
    if pa.is_zero() || pb.is_zero() {
        return Ok(Outcome::Undefined);
    }
    let vars: Vec<&str> = pair.vars.iter().map(String::as_str).collect();
    let b_given_a = pair.ev.field(&pair.sigma, &Term::cond_prob(b.clone(), a.clone(), &vars))?;
    let a_given_b = pair.ev.field(&pair.sigma, &Term::cond_prob(a.clone(), b.clone(), &vars))?;
    let rhs = (&a_given_b * &pb).checked_div(&pa).expect("nonzero");
    Ok(verdict(b_given_a == rhs, || format!("{b_given_a} != {a_given_b} * {pb} / {pa}")))
}

/// `[a & (g or !g)]{vars, w} = [a]{vars}` for a variable `w` new to `a`.
fn tautology(pair: &Pair<'_, '_>, a: &Formula, gamma: &Formula) -> Result<Outcome, EvalError> {
    let fresh = "w0".to_string();
    let mut mapping = BTreeMap::new();
    for v in gamma.free_vars() {
        mapping.insert(v, Term::object_var(&fresh));
    }
    let g = gamma.substitute(&mapping).expect("object variable for object variable");
    let taut = Formula::and(a.clone(), Formula::or(g.clone(), Formula::not(g)));
    let mut extended = pair.vars.clone();
    extended.push(fresh);
    let (x, y) = (pair.p_over(&taut, &extended)?, pair.p(a)?);
    Ok(verdict(x == y, || format!("{x} != {y} after adding a tautology")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_random, GenParams, WeightStyle};

    #[test]
    fn generated_structures_pass() {
        for seed in 0..12 {
            let params = GenParams::new(1 + seed as usize % 5, vec![1, 2], WeightStyle::Random).with_extras();
            let (v, m) = generate_random(seed, &params);
            let r = axiom_suite(&m, &v, &SuiteParams { pairs: 6, seed, depth: 3 }, EvalOptions::default());
            assert!(r.passed(), "{:#?}", r.failures);
            assert!(r.total().pass > 0);
        }
    }

    #[test]
    fn unnormalized_measure_fails() {
        let (v, m) = generate_random(5, &GenParams::new(3, vec![1, 1], WeightStyle::Uniform));
        let broken = m.with_weights_unchecked(vec![Rational::frac(1, 2); 3]);
        let r = axiom_suite(&broken, &v, &SuiteParams::default(), EvalOptions::default());
        assert!(!r.passed());
        assert!(r.tallies[&Check::P3].fail > 0);
    }
}
