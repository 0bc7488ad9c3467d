//! Finite structures: a domain of named individuals, interpretations for
//! the vocabulary, and a base measure whose n-fold product weighs tuples.

mod file;
mod generate;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use file::{load, parse_model, render_model, save};
pub use generate::{generate_random, GenParams, WeightStyle};

use crate::rational::Rational;
use crate::syntax::{is_identifier, Sort, Symbol, Vocabulary};

/// Index of an individual in its structure's domain.
pub type Individual = usize;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("base measure sums to {sum}, not 1")]
    MeasureNotNormalized { sum: Rational },
    #[error("negative weight {weight} for `{individual}`")]
    NegativeWeight { individual: String, weight: Rational },
    #[error("domain must be nonempty")]
    EmptyDomain,
    #[error("individual `{0}` declared twice")]
    DuplicateIndividual(String),
    #[error("`{0}` is not a valid individual name")]
    BadIndividualName(String),
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
    #[error("`{name}` expects {expected}-tuples, got {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("`{0}` is not declared with a matching kind")]
    Undeclared(String),
    #[error("`{symbol}` is not interpreted on {missing}")]
    NotTotal { symbol: String, missing: String },
    #[error("`{symbol}` assigned twice on {at}")]
    Conflict { symbol: String, at: String },
}

/// An immutable finite structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpStructure {
    domain: Vec<String>,
    weights: Vec<Rational>,
    predicates: BTreeMap<String, BTreeSet<Vec<Individual>>>,
    functions: BTreeMap<String, BTreeMap<Vec<Individual>, Individual>>,
    object_constants: BTreeMap<String, Individual>,
    field_constants: BTreeMap<String, Rational>,
    measuring: BTreeMap<String, BTreeMap<Vec<Individual>, Rational>>,
}

impl LpStructure {
    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn individual(&self, name: &str) -> Option<Individual> {
        self.domain.iter().position(|d| d == name)
    }

    pub fn name(&self, a: Individual) -> &str {
        &self.domain[a]
    }

    /// The base measure on single individuals.
    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, a: Individual) -> &Rational {
        &self.weights[a]
    }

    pub fn holds(&self, pred: &str, args: &[Individual]) -> bool {
        self.predicates.get(pred).is_some_and(|s| s.contains(args))
    }

    pub fn extension(&self, pred: &str) -> Option<&BTreeSet<Vec<Individual>>> {
        self.predicates.get(pred)
    }

    pub fn apply(&self, func: &str, args: &[Individual]) -> Option<Individual> {
        self.functions.get(func)?.get(args).copied()
    }

    pub fn object_constant(&self, name: &str) -> Option<Individual> {
        self.object_constants.get(name).copied()
    }

    pub fn field_constant(&self, name: &str) -> Option<&Rational> {
        self.field_constants.get(name)
    }

    pub fn measuring(&self, func: &str, args: &[Individual]) -> Option<&Rational> {
        self.measuring.get(func)?.get(args)
    }

    /// Product weight of one tuple.
    pub fn tuple_weight(&self, tuple: &[Individual]) -> Rational {
        let mut w = Rational::one();
        for &a in tuple {
            let wa = &self.weights[a];
            if wa.is_zero() {
                return Rational::zero();
            }
            w = w * wa;
        }
        w
    }

    /// The product measure of a set of `n`-tuples.
    pub fn measure<'a, I>(&self, n: usize, tuples: I) -> Result<Rational, ModelError>
    where
        I: IntoIterator<Item = &'a [Individual]>,
    {
        let mut total = Rational::zero();
        for t in tuples {
            if t.len() != n || t.iter().any(|&a| a >= self.size()) {
                return Err(ModelError::ArityMismatch {
                    name: "measure".into(),
                    expected: n,
                    found: t.len(),
                });
            }
            total = total + self.tuple_weight(t);
        }
        Ok(total)
    }

    /// Number of `n`-tuples, or `None` on overflow.
    pub fn tuple_count(&self, n: usize) -> Option<u64> {
        (self.size() as u64).checked_pow(u32::try_from(n).ok()?)
    }

    /// The `k`-th `n`-tuple in lexicographic order.
    pub fn nth_tuple(&self, n: usize, mut k: u64, out: &mut [Individual]) {
        let d = self.size() as u64;
        for slot in out[..n].iter_mut().rev() {
            *slot = (k % d) as Individual;
            k /= d;
        }
    }

    /// Replaces the base measure without checking normalization. Only for
    /// negative-control fixtures that need a broken measure.
    #[doc(hidden)]
    pub fn with_weights_unchecked(mut self, weights: Vec<Rational>) -> Self {
        assert_eq!(weights.len(), self.size());
        self.weights = weights;
        self
    }
}

/// Incremental construction of an [`LpStructure`], validated on `build`.
#[derive(Clone, Debug, Default)]
pub struct StructureBuilder {
    domain: Vec<String>,
    weights: BTreeMap<String, Rational>,
    predicates: BTreeMap<String, BTreeSet<Vec<String>>>,
    functions: BTreeMap<String, BTreeMap<Vec<String>, String>>,
    object_constants: BTreeMap<String, String>,
    field_constants: BTreeMap<String, Rational>,
    measuring: BTreeMap<String, BTreeMap<Vec<String>, Rational>>,
    conflicts: Vec<(String, String)>,
}

fn show_tuple(t: &[String]) -> String {
    format!("({})", t.join(", "))
}

impl StructureBuilder {
    pub fn new<S: AsRef<str>>(domain: impl IntoIterator<Item = S>) -> Self {
        StructureBuilder {
            domain: domain.into_iter().map(|s| s.as_ref().to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn weight(&mut self, individual: &str, w: Rational) -> &mut Self {
        if self.weights.insert(individual.to_string(), w).is_some() {
            self.conflicts.push(("measure".into(), individual.to_string()));
        }
        self
    }

    pub fn fact<S: AsRef<str>>(&mut self, pred: &str, args: &[S]) -> &mut Self {
        self.predicates
            .entry(pred.to_string())
            .or_default()
            .insert(args.iter().map(|s| s.as_ref().to_string()).collect());
        self
    }

    /// Declares that `pred` is interpreted (possibly as the empty set).
    pub fn predicate(&mut self, pred: &str) -> &mut Self {
        self.predicates.entry(pred.to_string()).or_default();
        self
    }

    pub fn function<S: AsRef<str>>(&mut self, func: &str, args: &[S], value: &str) -> &mut Self {
        let key: Vec<String> = args.iter().map(|s| s.as_ref().to_string()).collect();
        let prev = self.functions.entry(func.to_string()).or_default().insert(key.clone(), value.into());
        if prev.is_some() {
            self.conflicts.push((func.to_string(), show_tuple(&key)));
        }
        self
    }

    pub fn object_constant(&mut self, name: &str, individual: &str) -> &mut Self {
        if self.object_constants.insert(name.into(), individual.into()).is_some() {
            self.conflicts.push((name.to_string(), "constant".into()));
        }
        self
    }

    pub fn field_constant(&mut self, name: &str, value: Rational) -> &mut Self {
        if self.field_constants.insert(name.into(), value).is_some() {
            self.conflicts.push((name.to_string(), "constant".into()));
        }
        self
    }

    pub fn measuring<S: AsRef<str>>(&mut self, func: &str, args: &[S], value: Rational) -> &mut Self {
        let key: Vec<String> = args.iter().map(|s| s.as_ref().to_string()).collect();
        let prev = self.measuring.entry(func.to_string()).or_default().insert(key.clone(), value);
        if prev.is_some() {
            self.conflicts.push((func.to_string(), show_tuple(&key)));
        }
        self
    }

    /// Validates against `vocab`. Omitted weights mean the uniform measure.
    pub fn build(&self, vocab: &Vocabulary) -> Result<LpStructure, ModelError> {
        if let Some((symbol, at)) = self.conflicts.first() {
            return Err(ModelError::Conflict { symbol: symbol.clone(), at: at.clone() });
        }
        if self.domain.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        let mut index = BTreeMap::new();
        for (i, d) in self.domain.iter().enumerate() {
            if !is_identifier(d) {
                return Err(ModelError::BadIndividualName(d.clone()));
            }
            if index.insert(d.as_str(), i).is_some() {
                return Err(ModelError::DuplicateIndividual(d.clone()));
            }
        }
        let lookup = |name: &str| {
            index.get(name).copied().ok_or_else(|| ModelError::UnknownIndividual(name.to_string()))
        };
        let tuple = |t: &[String]| t.iter().map(|s| lookup(s)).collect::<Result<Vec<_>, _>>();

        let weights = if self.weights.is_empty() {
            let n = self.domain.len() as i64;
            vec![Rational::frac(1, n); self.domain.len()]
        } else {
            for name in self.weights.keys() {
                lookup(name)?;
            }
            let mut w = Vec::with_capacity(self.domain.len());
            for d in &self.domain {
                let v = self.weights.get(d).cloned().ok_or_else(|| ModelError::NotTotal {
                    symbol: "measure".into(),
                    missing: d.clone(),
                })?;
                if v.is_negative() {
                    return Err(ModelError::NegativeWeight { individual: d.clone(), weight: v });
                }
                w.push(v);
            }
            let sum: Rational = w.iter().sum();
            if !sum.is_one() {
                return Err(ModelError::MeasureNotNormalized { sum });
            }
            w
        };

        let mut predicates = BTreeMap::new();
        for (name, sym) in vocab.iter() {
            if let Symbol::Predicate { sort: Sort::Object, .. } = sym {
                predicates.insert(name.to_string(), BTreeSet::new());
            }
        }
        for (name, facts) in &self.predicates {
            let arity = match vocab.get(name) {
                Some(Symbol::Predicate { sort: Sort::Object, arity }) => *arity,
                _ => return Err(ModelError::Undeclared(name.clone())),
            };
            let set = predicates.get_mut(name).expect("inserted above");
            for f in facts {
                if f.len() != arity {
                    return Err(ModelError::ArityMismatch { name: name.clone(), expected: arity, found: f.len() });
                }
                set.insert(tuple(f)?);
            }
        }

        let n = self.domain.len();
        let all_tuples = |arity: usize| -> Vec<Vec<Individual>> {
            let mut out = vec![vec![]];
            for _ in 0..arity {
                out = out
                    .into_iter()
                    .flat_map(|t| (0..n).map(move |a| {
                        let mut t = t.clone();
                        t.push(a);
                        t
                    }))
                    .collect();
            }
            out
        };

        let mut functions = BTreeMap::new();
        let mut measuring = BTreeMap::new();
        let mut object_constants = BTreeMap::new();
        let mut field_constants = BTreeMap::new();
        for (name, sym) in vocab.iter() {
            match sym {
                Symbol::Function { sort: Sort::Object, arity } => {
                    let given = self.functions.get(name).cloned().unwrap_or_default();
                    let mut table = BTreeMap::new();
                    for (args, v) in &given {
                        if args.len() != *arity {
                            return Err(ModelError::ArityMismatch { name: name.into(), expected: *arity, found: args.len() });
                        }
                        table.insert(tuple(args)?, lookup(v)?);
                    }
                    for t in all_tuples(*arity) {
                        if !table.contains_key(&t) {
                            let names: Vec<String> = t.iter().map(|&a| self.domain[a].clone()).collect();
                            return Err(ModelError::NotTotal { symbol: name.into(), missing: show_tuple(&names) });
                        }
                    }
                    functions.insert(name.to_string(), table);
                }
                Symbol::Measure { arity } => {
                    let given = self.measuring.get(name).cloned().unwrap_or_default();
                    let mut table = BTreeMap::new();
                    for (args, v) in &given {
                        if args.len() != *arity {
                            return Err(ModelError::ArityMismatch { name: name.into(), expected: *arity, found: args.len() });
                        }
                        table.insert(tuple(args)?, v.clone());
                    }
                    for t in all_tuples(*arity) {
                        if !table.contains_key(&t) {
                            let names: Vec<String> = t.iter().map(|&a| self.domain[a].clone()).collect();
                            return Err(ModelError::NotTotal { symbol: name.into(), missing: show_tuple(&names) });
                        }
                    }
                    measuring.insert(name.to_string(), table);
                }
                Symbol::Constant(Sort::Object) => {
                    let v = self.object_constants.get(name).ok_or_else(|| ModelError::NotTotal {
                        symbol: name.into(),
                        missing: "()".into(),
                    })?;
                    object_constants.insert(name.to_string(), lookup(v)?);
                }
                Symbol::Constant(Sort::Field) => {
                    let v = self.field_constants.get(name).ok_or_else(|| ModelError::NotTotal {
                        symbol: name.into(),
                        missing: "()".into(),
                    })?;
                    field_constants.insert(name.to_string(), v.clone());
                }
                _ => {}
            }
        }
        let declared = |name: &str, ok: fn(&Symbol) -> bool| match vocab.get(name) {
            Some(s) if ok(s) => Ok(()),
            _ => Err(ModelError::Undeclared(name.to_string())),
        };
        for name in self.functions.keys() {
            declared(name, |s| matches!(s, Symbol::Function { sort: Sort::Object, .. }))?;
        }
        for name in self.measuring.keys() {
            declared(name, |s| matches!(s, Symbol::Measure { .. }))?;
        }
        for name in self.object_constants.keys() {
            declared(name, |s| matches!(s, Symbol::Constant(Sort::Object)))?;
        }
        for name in self.field_constants.keys() {
            declared(name, |s| matches!(s, Symbol::Constant(Sort::Field)))?;
        }

        Ok(LpStructure {
            domain: self.domain.clone(),
            weights,
            predicates,
            functions,
            object_constants,
            field_constants,
            measuring,
        })
    }
}
