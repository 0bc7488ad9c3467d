//! Model files.
//!
//! ```text
//! # declarations, same syntax as an .lp header
//! object pred Bird/1;
//! object pred Fly/1;
//! object const Tweety;
//! measure weight/1;
//!
//! [domain]
//! tweety, robin
//!
//! [measure]          # optional; uniform when absent
//! tweety = 1/4
//! robin = 3/4
//!
//! [predicates]
//! Bird(tweety)
//! Bird(robin)
//! Fly(robin)
//!
//! [functions]
//! mother(tweety) = robin
//!
//! [constants]
//! Tweety = tweety    # object constants name an individual
//! h = 0.75           # field constants take a rational
//!
//! [measuring]
//! weight(tweety) = 3/2
//! ```
//!
//! Rationals are written `p`, `p/q` or as decimals. Sections may appear in
//! any order, each at most once. [`render_model`] writes every section in
//! the order above with `p/q` rationals, so saving and loading is exact.

use std::path::Path;

use super::{LpStructure, ModelError, StructureBuilder};
use crate::parser::parse_file;
use crate::rational::Rational;
use crate::syntax::{Sort, Symbol, Vocabulary};

const SECTIONS: [&str; 6] = ["domain", "measure", "predicates", "functions", "constants", "measuring"];

pub fn load(path: impl AsRef<Path>) -> Result<(Vocabulary, LpStructure), ModelError> {
    let text = std::fs::read_to_string(path)?;
    parse_model(&text)
}

pub fn save(vocab: &Vocabulary, model: &LpStructure, path: impl AsRef<Path>) -> Result<(), ModelError> {
    std::fs::write(path, render_model(vocab, model))?;
    Ok(())
}

fn format_err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Format { line, message: message.into() }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn section_name(line: &str) -> Option<&str> {
    let inner = strip_comment(line).strip_prefix('[')?.strip_suffix(']')?.trim();
    SECTIONS.contains(&inner).then_some(inner)
}

/// Splits `name(a, b)` into `("name", ["a", "b"])`; a bare `name` has no arguments.
fn application(text: &str, line: usize) -> Result<(String, Vec<String>), ModelError> {
    let text = text.trim();
    let Some(open) = text.find('(') else {
        return Ok((text.to_string(), Vec::new()));
    };
    let inner = text[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| format_err(line, format!("expected `)` at end of `{text}`")))?;
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(|a| a.trim().to_string()).collect()
    };
    if args.iter().any(String::is_empty) {
        return Err(format_err(line, format!("empty argument in `{text}`")));
    }
    Ok((text[..open].trim().to_string(), args))
}

fn equation(text: &str, line: usize) -> Result<(&str, &str), ModelError> {
    let (l, r) = text
        .split_once('=')
        .ok_or_else(|| format_err(line, format!("expected `lhs = value`, found `{text}`")))?;
    Ok((l.trim(), r.trim()))
}

fn rational(text: &str, line: usize) -> Result<Rational, ModelError> {
    text.parse().map_err(|e| format_err(line, format!("{e}")))
}

pub fn parse_model(text: &str) -> Result<(Vocabulary, LpStructure), ModelError> {
    let lines: Vec<&str> = text.lines().collect();
    let header_end = lines.iter().position(|l| section_name(l).is_some()).unwrap_or(lines.len());
    let header = lines[..header_end].join("\n");
    let file = parse_file(&header, &Vocabulary::new()).map_err(|e| {
        let span = e.span();
        format_err(span.start_line.max(1), e.to_string())
    })?;
    if let Some(item) = file.items.first() {
        return Err(format_err(item.spans.span.start_line, "model header may only contain declarations"));
    }
    let vocab = file.vocab;

    let mut seen = Vec::new();
    let mut section: Option<&str> = None;
    let mut domain = Vec::new();
    let mut entries: Vec<(&str, usize, &str)> = Vec::new();
    for (i, raw) in lines.iter().enumerate().skip(header_end) {
        let line_no = i + 1;
        if let Some(name) = section_name(raw) {
            if seen.contains(&name) {
                return Err(format_err(line_no, format!("section [{name}] appears twice")));
            }
            seen.push(name);
            section = Some(name);
            continue;
        }
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        match section {
            Some("domain") => domain.extend(
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::to_string),
            ),
            Some(s) => entries.push((s, line_no, line)),
            None => unreachable!("header ends at the first section"),
        }
    }
    if !seen.contains(&"domain") {
        return Err(format_err(lines.len().max(1), "missing [domain] section"));
    }

    let mut b = StructureBuilder::new(&domain);
    for (sec, line_no, line) in entries {
        match sec {
            "measure" => {
                let (name, value) = equation(line, line_no)?;
                b.weight(name, rational(value, line_no)?);
            }
            "predicates" => {
                let (name, args) = application(line, line_no)?;
                b.fact(&name, &args);
            }
            "functions" => {
                let (lhs, value) = equation(line, line_no)?;
                let (name, args) = application(lhs, line_no)?;
                b.function(&name, &args, value);
            }
            "constants" => {
                let (name, value) = equation(line, line_no)?;
                match vocab.get(name) {
                    Some(Symbol::Constant(Sort::Object)) => {
                        b.object_constant(name, value);
                    }
                    Some(Symbol::Constant(Sort::Field)) => {
                        b.field_constant(name, rational(value, line_no)?);
                    }
                    _ => return Err(format_err(line_no, format!("`{name}` is not a declared constant"))),
                }
            }
            "measuring" => {
                let (lhs, value) = equation(line, line_no)?;
                let (name, args) = application(lhs, line_no)?;
                b.measuring(&name, &args, rational(value, line_no)?);
            }
            _ => unreachable!(),
        }
    }
    let model = b.build(&vocab)?;
    Ok((vocab, model))
}

/// Canonical text of a model: declarations, then every section.
pub fn render_model(vocab: &Vocabulary, model: &LpStructure) -> String {
    let names = |t: &[usize]| t.iter().map(|&a| model.name(a)).collect::<Vec<_>>().join(", ");
    let mut out = vocab.render_declarations();
    out.push_str("\n[domain]\n");
    out.push_str(&model.domain().join(", "));
    out.push_str("\n\n[measure]\n");
    for (d, w) in model.domain().iter().zip(model.weights()) {
        out.push_str(&format!("{d} = {w}\n"));
    }
    let mut preds = String::new();
    let mut funcs = String::new();
    let mut consts = String::new();
    let mut measuring = String::new();
    for (name, sym) in vocab.iter() {
        match sym {
            Symbol::Predicate { sort: Sort::Object, arity } => {
                for t in model.extension(name).into_iter().flatten() {
                    if *arity == 0 {
                        preds.push_str(&format!("{name}\n"));
                    } else {
                        preds.push_str(&format!("{name}({})\n", names(t)));
                    }
                }
            }
            Symbol::Function { sort: Sort::Object, .. } => {
                for (args, v) in model.functions.get(name).into_iter().flatten() {
                    funcs.push_str(&format!("{name}({}) = {}\n", names(args), model.name(*v)));
                }
            }
            Symbol::Constant(Sort::Object) => {
                if let Some(a) = model.object_constant(name) {
                    consts.push_str(&format!("{name} = {}\n", model.name(a)));
                }
            }
            Symbol::Constant(Sort::Field) => {
                if let Some(v) = model.field_constant(name) {
                    consts.push_str(&format!("{name} = {v}\n"));
                }
            }
            Symbol::Measure { .. } => {
                for (args, v) in model.measuring.get(name).into_iter().flatten() {
                    measuring.push_str(&format!("{name}({}) = {v}\n", names(args)));
                }
            }
            _ => {}
        }
    }
    for (title, body) in [
        ("predicates", preds),
        ("functions", funcs),
        ("constants", consts),
        ("measuring", measuring),
    ] {
        out.push_str(&format!("\n[{title}]\n{body}"));
    }
    out
}
