//! Direct inference: a degree of belief about an individual is bounded by
//! the statistics of the class of things known to share its properties.
//!
//! What is known about a constant is looked up literally among the ground
//! facts; there is no deductive closure. The reference class is always
//! the conjunction of every fact about the constant.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::path::Path;

use thiserror::Error;

use crate::entail::{
    bounds, fragment_sentence, fragment_term, problem_from_sentences, EntailError, Entailment,
};
use crate::parser::{parse_file, print_formula, ParseError};
use crate::syntax::{visit_formula, Formula, Node, Sort, Symbol, Term, Var, Vocabulary};

#[derive(Debug, Error)]
pub enum BeliefError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("`{text}` is neither a statistical sentence nor a ground literal")]
    NotKnowledge { text: String },
    #[error("bad target `{text}`: {reason}")]
    BadTarget { text: String, reason: String },
    #[error("`{0}` is not a declared object constant")]
    UnknownConstant(String),
    #[error("nothing is known about `{0}`")]
    NoGroundFacts(String),
    #[error("no statistical sentence mentions the predicates of `{term}`; the bound would be [0, 1]")]
    NoReferenceClass { term: String },
    #[error(transparent)]
    Entail(#[from] EntailError),
}

/// Statistical sentences plus ground literals over one vocabulary.
#[derive(Clone, Debug)]
pub struct KnowledgeBase {
    vocab: Vocabulary,
    statistical: Vec<Formula>,
    facts: Vec<Formula>,
}

fn is_ground_literal(f: &Formula) -> bool {
    match f {
        Formula::Not(inner) => is_ground_literal(inner) && matches!(**inner, Formula::Pred { .. }),
        Formula::Pred { args, .. } => args.iter().all(|a| matches!(a, Term::ObjectConst(_))),
        _ => false,
    }
}

fn predicates(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    visit_formula(f, &mut |n| {
        if let Node::Formula(Formula::Pred { name, .. }) = n {
            out.insert(name.clone());
        }
    });
    out
}

fn conjuncts(f: &Formula, out: &mut HashSet<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => {
            out.insert(other.clone());
        }
    }
}

fn conjunct_set(f: &Formula) -> HashSet<Formula> {
    let mut out = HashSet::new();
    conjuncts(f, &mut out);
    out
}

impl KnowledgeBase {
    /// Sorts sentences into statistical ones (`[..]{x} ⋈ c`) and ground
    /// literals; anything else is rejected.
    pub fn new(vocab: Vocabulary, sentences: Vec<Formula>) -> Result<Self, BeliefError> {
        let mut statistical = Vec::new();
        let mut facts = Vec::new();
        for s in sentences {
            if is_ground_literal(&s) {
                facts.push(s);
            } else if fragment_sentence(&s).is_ok() {
                statistical.push(s);
            } else {
                return Err(BeliefError::NotKnowledge { text: print_formula(&s) });
            }
        }
        Ok(KnowledgeBase { vocab, statistical, facts })
    }

    /// Reads a `.lp` file whose items are all sentences.
    pub fn parse(text: &str, base: &Vocabulary) -> Result<Self, BeliefError> {
        let file = parse_file(text, base)?;
        let sentences: Vec<Formula> = file.formulas().cloned().collect();
        if sentences.len() != file.items.len() {
            return Err(BeliefError::NotKnowledge { text: "a bare term".into() });
        }
        KnowledgeBase::new(file.vocab, sentences)
    }

    pub fn load(path: impl AsRef<Path>, base: &Vocabulary) -> Result<Self, BeliefError> {
        KnowledgeBase::parse(&std::fs::read_to_string(path)?, base)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn statistical(&self) -> &[Formula] {
        &self.statistical
    }

    pub fn facts(&self) -> &[Formula] {
        &self.facts
    }
}

/// The conjunction of every ground literal mentioning `c`, in file order.
pub fn known_about(kb: &KnowledgeBase, c: &str) -> Result<Formula, BeliefError> {
    if kb.vocab.get(c) != Some(&Symbol::Constant(Sort::Object)) {
        return Err(BeliefError::UnknownConstant(c.to_string()));
    }
    let facts: Vec<Formula> = kb.facts.iter().filter(|f| f.object_constants().contains(c)).cloned().collect();
    Formula::conjunction(facts).ok_or_else(|| BeliefError::NoGroundFacts(c.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BeliefFlag {
    /// The bound is `[0, 1]`.
    Vacuous,
    /// No statistical sentence is about exactly the reference class.
    ReferenceClassNotMatched,
}

impl BeliefFlag {
    pub fn name(self) -> &'static str {
        match self {
            BeliefFlag::Vacuous => "vacuous",
            BeliefFlag::ReferenceClassNotMatched => "reference-class-not-matched",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeliefResult {
    pub bounds: Entailment,
    /// The statistical term that was bounded, `[target(x) | class(x)]{x}`.
    pub term: Term,
    pub reference_class: Formula,
    /// Statistical sentences sharing predicates, directly or through other
    /// sentences, with the term.
    pub provenance: Vec<Formula>,
    pub flags: Vec<BeliefFlag>,
}

fn fresh_var(kb: &KnowledgeBase, f: &Formula) -> String {
    let used = f.all_names();
    (0..)
        .map(|i| if i == 0 { "x".to_string() } else { format!("x{i}") })
        .find(|n| kb.vocab.get(n).is_none() && !used.contains(n))
        .expect("unbounded supply")
}

/// Bounds the belief in a ground literal about a single constant.
pub fn believe(kb: &KnowledgeBase, target: &Formula) -> Result<BeliefResult, BeliefError> {
    let bad = |reason: &str| BeliefError::BadTarget { text: print_formula(target), reason: reason.into() };
    if !is_ground_literal(target) {
        return Err(bad("expected a ground literal"));
    }
    let constants = target.object_constants();
    let c = match constants.len() {
        1 => constants.into_iter().next().expect("one constant"),
        _ => return Err(bad("must mention exactly one object constant")),
    };
    let class = known_about(kb, &c)?;
    let x = fresh_var(kb, &Formula::and(target.clone(), class.clone()));
    let var = Var::object(&x);
    let body = target.generalize_constant(&c, &var);
    let given = class.generalize_constant(&c, &var);
    let term = Term::cond_prob(body.clone(), given.clone(), &[&x]);

    let provenance = connected(&kb.statistical, predicates(&Formula::and(body.clone(), given.clone())));
    if provenance.is_empty() {
        return Err(BeliefError::NoReferenceClass { term: crate::parser::print_term(&term) });
    }
    let problem = problem_from_sentences(&kb.statistical, &term)?;
    let outcome = bounds(&problem)?;

    let mut flags = Vec::new();
    if matches!(&outcome, Entailment::Bounds(i) if i.is_vacuous()) {
        flags.push(BeliefFlag::Vacuous);
    }
    if !kb.statistical.iter().any(|s| matches_class(s, &body, &given, &x)) {
        flags.push(BeliefFlag::ReferenceClassNotMatched);
    }
    Ok(BeliefResult { bounds: outcome, term, reference_class: given, provenance, flags })
}

/// Sentences reachable from `seed` predicates through shared predicates.
fn connected(sentences: &[Formula], seed: BTreeSet<String>) -> Vec<Formula> {
    let preds: Vec<BTreeSet<String>> = sentences.iter().map(predicates).collect();
    let mut reached = seed;
    let mut taken = vec![false; sentences.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    loop {
        for (i, p) in preds.iter().enumerate() {
            if !taken[i] && !p.is_disjoint(&reached) {
                taken[i] = true;
                queue.push_back(i);
            }
        }
        let Some(i) = queue.pop_front() else { break };
        reached.extend(preds[i].iter().cloned());
    }
    sentences.iter().zip(taken).filter(|(_, t)| *t).map(|(s, _)| s.clone()).collect()
}

/// Whether `s` constrains `[body | given]{x}` itself, up to renaming its
/// variable and reordering conjuncts of the condition.
fn matches_class(s: &Formula, body: &Formula, given: &Formula, x: &str) -> bool {
    let Ok((term, _)) = fragment_sentence(s) else { return false };
    let Ok((b, Some(g), v)) = fragment_term(term) else { return false };
    let rename = |f: &Formula| {
        let mut map = std::collections::BTreeMap::new();
        map.insert(Var::object(v), Term::object_var(x));
        f.substitute(&map).ok()
    };
    match (rename(b), rename(g)) {
        (Some(b), Some(g)) => b == *body && conjunct_set(&g) == conjunct_set(given),
        _ => false,
    }
}
