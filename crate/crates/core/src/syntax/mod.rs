//! Two-sorted abstract syntax, vocabularies and syntactic operations.

mod ast;
mod transform;
mod vocab;
mod wf;

pub use ast::{
    visit_formula, visit_term, ArithOp, Formula, FuncKind, Node, NodePath, Sort, Term, Var,
};
pub use vocab::{is_identifier, FieldFn, FieldHook, FieldRel, Symbol, VocabError, Vocabulary, RESERVED};
pub use wf::{well_formed, well_formed_formula, well_formed_term, SortError};
