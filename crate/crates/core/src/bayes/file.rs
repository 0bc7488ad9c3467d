//! Net files.
//!
//! ```text
//! [var]
//! X1, X2, X3
//!
//! [parents]
//! X2: X1
//! X3: X1, X2
//!
//! [cpt]
//! X1 = 1/2
//! X2 | X1 = 3/4
//! X2 | !X1 = 1/5
//! X3 | X1, !X2 = 0.3
//! ...
//! ```
//!
//! A CPT row names every parent exactly once, in any order. Variables
//! without a `[parents]` line are roots.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{BayesError, BayesNet, Literal};
use crate::rational::Rational;

fn err(line: usize, message: impl Into<String>) -> BayesError {
    BayesError::Format { line, message: message.into() }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

pub fn load(path: impl AsRef<Path>) -> Result<BayesNet, BayesError> {
    parse_net(&std::fs::read_to_string(path)?)
}

pub fn parse_net(text: &str) -> Result<BayesNet, BayesError> {
    let mut section: Option<&str> = None;
    let mut seen = BTreeSet::new();
    let mut vars: Vec<String> = Vec::new();
    let mut parents: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut rows: Vec<(usize, String, Vec<Literal>, Rational)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            let name = match name {
                "var" | "parents" | "cpt" => name,
                _ => return Err(err(line_no, format!("unknown section `[{name}]`"))),
            };
            if !seen.insert(name) {
                return Err(err(line_no, format!("section `[{name}]` appears twice")));
            }
            section = Some(name);
            continue;
        }
        match section {
            None => return Err(err(line_no, "expected a section header")),
            Some("var") => vars.extend(split_list(line).map(str::to_string)),
            Some("parents") => {
                let (child, ps) = line
                    .split_once(':')
                    .ok_or_else(|| err(line_no, "expected `child: parent, ...`"))?;
                let child = child.trim().to_string();
                if parents.contains_key(&child) {
                    return Err(err(line_no, format!("parents of `{child}` given twice")));
                }
                parents.insert(child, split_list(ps).map(str::to_string).collect());
            }
            Some(_) => {
                let (lhs, value) =
                    line.rsplit_once('=').ok_or_else(|| err(line_no, "expected `var | parents = p`"))?;
                let value: Rational = value
                    .trim()
                    .parse()
                    .map_err(|_| err(line_no, format!("`{}` is not a rational", value.trim())))?;
                let (var, cond) = match lhs.split_once('|') {
                    Some((v, c)) => (v.trim(), c),
                    None => (lhs.trim(), ""),
                };
                let lits = cond
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<Literal>().map_err(|m| err(line_no, m)))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push((line_no, var.to_string(), lits, value));
            }
        }
    }
    for child in parents.keys() {
        if !vars.contains(child) {
            return Err(BayesError::UnknownVariable(child.clone()));
        }
    }
    let parent_lists: Vec<Vec<String>> = vars.iter().map(|v| parents.get(v).cloned().unwrap_or_default()).collect();
    let mut cpt: Vec<BTreeMap<Vec<bool>, Rational>> = vec![BTreeMap::new(); vars.len()];
    for (line_no, var, lits, value) in rows {
        let i = vars.iter().position(|v| *v == var).ok_or_else(|| BayesError::UnknownVariable(var.clone()))?;
        let ps = &parent_lists[i];
        if lits.len() != ps.len() {
            return Err(err(line_no, format!("a row for `{var}` must name each of its {} parents", ps.len())));
        }
        let mut assign = Vec::with_capacity(ps.len());
        for p in ps {
            let l = lits
                .iter()
                .find(|l| l.var == *p)
                .ok_or_else(|| err(line_no, format!("row for `{var}` does not mention parent `{p}`")))?;
            assign.push(l.positive);
        }
        if cpt[i].insert(assign, value).is_some() {
            let row = lits.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
            return Err(BayesError::DuplicateRow { var, row });
        }
    }
    BayesNet::new(vars, parent_lists, cpt)
}

/// Canonical text: rows in the order of the compiled CPT sentences.
pub fn render_net(net: &BayesNet) -> String {
    let mut out = String::from("[var]\n");
    out.push_str(&net.vars().join(", "));
    out.push_str("\n\n[parents]\n");
    for (i, v) in net.vars().iter().enumerate() {
        let ps: Vec<&str> = net.parents(i).collect();
        if !ps.is_empty() {
            out.push_str(&format!("{v}: {}\n", ps.join(", ")));
        }
    }
    out.push_str("\n[cpt]\n");
    for (i, v) in net.vars().iter().enumerate() {
        let ps: Vec<&str> = net.parents(i).collect();
        for r in 0..1usize << ps.len() {
            if ps.is_empty() {
                out.push_str(&format!("{v} = {}\n", net.entry(i, r)));
            } else {
                let cond: Vec<String> = ps
                    .iter()
                    .enumerate()
                    .map(|(j, p)| if r >> j & 1 == 1 { format!("!{p}") } else { p.to_string() })
                    .collect();
                out.push_str(&format!("{v} | {} = {}\n", cond.join(", "), net.entry(i, r)));
            }
        }
    }
    out
}
