use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::ast::Sort;
use crate::rational::Rational;

/// A declared, non-distinguished symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symbol {
    Constant(Sort),
    Variable(Sort),
    Function { sort: Sort, arity: usize },
    Predicate { sort: Sort, arity: usize },
    /// Objects to a field value.
    Measure { arity: usize },
}

impl Symbol {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Symbol::Constant(_) => "constant",
            Symbol::Variable(_) => "variable",
            Symbol::Function { .. } => "function",
            Symbol::Predicate { .. } => "predicate",
            Symbol::Measure { .. } => "measuring function",
        }
    }
}

/// Words the grammar claims for itself.
pub const RESERVED: &[&str] = &[
    "forall", "exists", "or", "in", "object", "field", "pred", "func", "const", "var", "measure",
];

pub type FieldFn = Arc<dyn Fn(&[Rational]) -> Result<Rational, String> + Send + Sync>;
pub type FieldRel = Arc<dyn Fn(&[Rational]) -> bool + Send + Sync>;

/// Evaluation hook for a field function or field predicate symbol.
#[derive(Clone)]
pub enum FieldHook {
    Function(FieldFn),
    Relation(FieldRel),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VocabError {
    #[error("symbol `{0}` is already declared")]
    Duplicate(String),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
    #[error("`{0}` is not a valid identifier")]
    BadName(String),
    #[error("hook for `{0}` does not match its declaration")]
    HookMismatch(String),
}

/// Declared symbols in declaration order, plus evaluation hooks for field
/// functions and field predicates.
#[derive(Clone, Default)]
pub struct Vocabulary {
    order: Vec<String>,
    symbols: BTreeMap<String, Symbol>,
    hooks: BTreeMap<String, FieldHook>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.symbols == other.symbols
    }
}

impl fmt::Debug for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.order.iter().map(|n| (n, &self.symbols[n])))
            .finish()
    }
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, symbol: Symbol) -> Result<(), VocabError> {
        if RESERVED.contains(&name) {
            return Err(VocabError::Reserved(name.to_string()));
        }
        if !is_identifier(name) {
            return Err(VocabError::BadName(name.to_string()));
        }
        if self.symbols.contains_key(name) {
            return Err(VocabError::Duplicate(name.to_string()));
        }
        self.order.push(name.to_string());
        self.symbols.insert(name.to_string(), symbol);
        Ok(())
    }

    /// Builder-style declare for fixtures; panics on conflicts.
    pub fn with(mut self, name: &str, symbol: Symbol) -> Self {
        self.declare(name, symbol).expect("valid declaration");
        self
    }

    pub fn object_pred(self, name: &str, arity: usize) -> Self {
        self.with(name, Symbol::Predicate { sort: Sort::Object, arity })
    }

    pub fn object_const(self, name: &str) -> Self {
        self.with(name, Symbol::Constant(Sort::Object))
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    /// Symbols in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Symbol)> {
        self.order.iter().map(move |n| (n.as_str(), &self.symbols[n]))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Registers the evaluation hook for a declared field function or field
    /// predicate. Hooks must be total over the declared arity.
    pub fn register_hook(&mut self, name: &str, hook: FieldHook) -> Result<(), VocabError> {
        let ok = matches!(
            (self.symbols.get(name), &hook),
            (Some(Symbol::Function { sort: Sort::Field, .. }), FieldHook::Function(_))
                | (Some(Symbol::Predicate { sort: Sort::Field, .. }), FieldHook::Relation(_))
        );
        if !ok {
            return Err(VocabError::HookMismatch(name.to_string()));
        }
        self.hooks.insert(name.to_string(), hook);
        Ok(())
    }

    pub fn hook(&self, name: &str) -> Option<&FieldHook> {
        self.hooks.get(name)
    }

    /// Merges `other` into `self`; identical redeclarations are accepted.
    pub fn extend(&mut self, other: &Vocabulary) -> Result<(), VocabError> {
        for (name, sym) in other.iter() {
            match self.symbols.get(name) {
                Some(existing) if existing == sym => {}
                Some(_) => return Err(VocabError::Duplicate(name.to_string())),
                None => self.declare(name, sym.clone())?,
            }
        }
        for (name, hook) in &other.hooks {
            self.hooks.insert(name.clone(), hook.clone());
        }
        Ok(())
    }

    /// One declaration per line in the header syntax shared by `.lp` and model files.
    pub fn render_declarations(&self) -> String {
        let mut out = String::new();
        for (name, sym) in self.iter() {
            let line = match sym {
                Symbol::Constant(s) => format!("{s} const {name};"),
                Symbol::Variable(s) => format!("{s} var {name};"),
                Symbol::Function { sort, arity } => format!("{sort} func {name}/{arity};"),
                Symbol::Predicate { sort, arity } => format!("{sort} pred {name}/{arity};"),
                Symbol::Measure { arity } => format!("measure {name}/{arity};"),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}
