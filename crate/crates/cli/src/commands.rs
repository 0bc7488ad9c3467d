//! Subcommand implementations. Each writes to in-memory buffers so that
//! `reproduce` can run them in-process and compare their output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use lp_logic::bayes::{self, BayesError, Literal, SignedOutcome};
use lp_logic::belief::{believe, BeliefError, KnowledgeBase};
use lp_logic::entail::{entail_lp_sentences, Entailment};
use lp_logic::eval::{axiom_suite, Assignment, EvalError, EvalOptions, Evaluator, SuiteParams, SuiteReport, Value as EvalValue};
use lp_logic::model::{self, generate_random, GenParams, WeightStyle};
use lp_logic::par::Parallelism;
use lp_logic::parser::{parse_file, parse_formula, parse_term, print_formula, print_term, Ast, LpFile, ParseError};
use lp_logic::syntax::Vocabulary;
use lp_logic::Rational;

use crate::output::{document, entailment_json, entailment_text, Format};
use crate::{BayesAction, Cli, Command};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub struct Ctx {
    /// Relative input paths are resolved against this directory.
    pub base: PathBuf,
    pub format: Format,
    pub opts: EvalOptions,
}

impl Ctx {
    pub fn new(base: PathBuf, cli: &Cli) -> Self {
        let parallelism = if cli.sequential { Parallelism::Sequential } else { Parallelism::Parallel };
        Ctx { base, format: cli.format, opts: EvalOptions { max_enum: cli.max_enum, parallelism } }
    }

    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn read(&self, p: &Path) -> Result<String, Fail> {
        std::fs::read_to_string(self.path(p)).map_err(|e| Fail::usage(format!("cannot read {}: {e}", p.display())))
    }

    fn structured(&self) -> bool {
        self.format == Format::Structured
    }
}

/// A command that could not produce its normal output.
pub struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    pub fn usage(message: impl Into<String>) -> Self {
        Fail { code: EXIT_USAGE, message: message.into() }
    }

    fn failure(message: impl Into<String>) -> Self {
        Fail { code: EXIT_FAILURE, message: message.into() }
    }
}

#[derive(Default)]
struct Io {
    out: String,
    err: String,
}

/// Runs a command, returning the exit code, stdout and stderr.
pub fn run(ctx: &Ctx, command: &Command) -> (u8, String, String) {
    let mut io = Io::default();
    let result = match command {
        Command::Parse { file } => cmd_parse(ctx, &mut io, file),
        Command::Eval { model, sentences } => cmd_eval(ctx, &mut io, model, sentences),
        Command::Entail { sentences, query } => cmd_entail(ctx, &mut io, sentences, query),
        Command::Bayes { action } => cmd_bayes(ctx, &mut io, action),
        Command::Believe { sentences, query } => cmd_believe(ctx, &mut io, sentences, query),
        Command::CheckAxioms { seed, count, sizes, pairs, depth, inject_bug } => {
            cmd_check_axioms(ctx, &mut io, *seed, *count, sizes, *pairs, *depth, *inject_bug)
        }
        Command::Reproduce { dir, update } => crate::reproduce::run(ctx, &mut io.out, dir, *update),
    };
    let code = match result {
        Ok(code) => code,
        Err(fail) => {
            let _ = writeln!(io.err, "error: {}", fail.message);
            fail.code
        }
    };
    (code, io.out, io.err)
}

/// `path:line:col: message` followed by the offending line and a caret.
fn diagnostic(path: &Path, text: &str, e: &ParseError) -> String {
    let span = e.span();
    let mut msg = format!("{}:{e}", path.display());
    if let Some(line) = text.lines().nth(span.start_line.saturating_sub(1)) {
        let width = if span.end_line == span.start_line { span.end_col.saturating_sub(span.start_col).max(1) } else { 1 };
        let _ = write!(msg, "\n  | {line}\n  | {}{}", " ".repeat(span.start_col.saturating_sub(1)), "^".repeat(width));
    }
    msg
}

fn load_lp(ctx: &Ctx, path: &Path, base: &Vocabulary) -> Result<(String, LpFile), Fail> {
    let text = ctx.read(path)?;
    let file = parse_file(&text, base).map_err(|e| Fail::usage(diagnostic(path, &text, &e)))?;
    Ok((text, file))
}

fn item_text(item: &Ast) -> String {
    match item {
        Ast::Formula(f) => print_formula(f),
        Ast::Term(t) => print_term(t),
    }
}

fn cmd_parse(ctx: &Ctx, io: &mut Io, file: &Path) -> Result<u8, Fail> {
    let (_, parsed) = load_lp(ctx, file, &Vocabulary::new())?;
    if parsed.items.is_empty() {
        return Err(Fail::usage(format!("{}: no sentences or terms", file.display())));
    }
    let decls = parsed.vocab.render_declarations();
    let items: Vec<String> = parsed.items.iter().map(|p| item_text(&p.node)).collect();
    if ctx.structured() {
        let kinds: Vec<Value> = parsed
            .items
            .iter()
            .zip(&items)
            .map(|(p, text)| {
                let kind = match p.node {
                    Ast::Formula(_) => "formula",
                    Ast::Term(_) => "term",
                };
                json!({ "kind": kind, "text": text })
            })
            .collect();
        let decls: Vec<&str> = decls.lines().collect();
        io.out.push_str(&document("parse", json!({ "declarations": decls, "items": kinds })));
    } else {
        io.out.push_str(&decls);
        if !decls.is_empty() {
            io.out.push('\n');
        }
        for text in items {
            let _ = writeln!(io.out, "{text};");
        }
    }
    Ok(EXIT_OK)
}

fn eval_error_kind(e: &EvalError) -> &'static str {
    match e {
        EvalError::DivisionByZero { .. } => "division-by-zero",
        EvalError::UnboundVariable(_) => "unbound-variable",
        EvalError::FieldQuantifierUnsupported { .. } => "field-quantifier-unsupported",
        EvalError::EnumerationCapExceeded { .. } => "enumeration-cap-exceeded",
        EvalError::Uninterpreted(_) => "uninterpreted",
        EvalError::Hook { .. } => "hook",
    }
}

fn cmd_eval(ctx: &Ctx, io: &mut Io, model_path: &Path, sentences: &Path) -> Result<u8, Fail> {
    let (vocab, model) =
        model::load(ctx.path(model_path)).map_err(|e| Fail::usage(format!("{}: {e}", model_path.display())))?;
    let (_, file) = load_lp(ctx, sentences, &vocab)?;
    let ev = Evaluator::new(&model, &file.vocab).with_options(ctx.opts);
    let sigma = Assignment::new();
    let mut code = EXIT_OK;
    let mut results = Vec::new();
    for item in &file.items {
        let text = item_text(&item.node);
        let value = match &item.node {
            Ast::Formula(f) => ev.formula(&sigma, f).map(EvalValue::Bool),
            Ast::Term(t) => ev.term(&sigma, t),
        };
        match value {
            Ok(v) => {
                let shown = match &v {
                    EvalValue::Bool(b) => b.to_string(),
                    EvalValue::Object(a) => model.name(*a).to_string(),
                    EvalValue::Field(r) => r.to_string(),
                };
                if ctx.structured() {
                    let value = match v {
                        EvalValue::Bool(b) => json!(b),
                        _ => json!(shown),
                    };
                    results.push(json!({ "item": text, "value": value }));
                } else {
                    let sep = if matches!(item.node, Ast::Formula(_)) { ":" } else { " =" };
                    let _ = writeln!(io.out, "{text}{sep} {shown}");
                }
            }
            Err(e) => {
                code = EXIT_FAILURE;
                if ctx.structured() {
                    results.push(json!({
                        "item": text,
                        "error": { "kind": eval_error_kind(&e), "message": e.to_string() },
                    }));
                } else {
                    let _ = writeln!(io.out, "{text}: error: {e}");
                }
            }
        }
    }
    if ctx.structured() {
        io.out.push_str(&document("eval", json!({ "results": results })));
    }
    Ok(code)
}

fn entailment_code(e: &Entailment) -> u8 {
    match e {
        Entailment::Bounds(_) => EXIT_OK,
        Entailment::Infeasible | Entailment::QueryUndefined => EXIT_FAILURE,
    }
}

fn cmd_entail(ctx: &Ctx, io: &mut Io, sentences: &Path, query: &str) -> Result<u8, Fail> {
    let (_, file) = load_lp(ctx, sentences, &Vocabulary::new())?;
    let base: Vec<_> = file.formulas().cloned().collect();
    if base.len() != file.items.len() {
        return Err(Fail::usage(format!("{}: base must contain only sentences", sentences.display())));
    }
    let q = parse_term(query, &file.vocab).map_err(|e| Fail::usage(diagnostic(Path::new("--query"), query, &e)))?;
    let result = entail_lp_sentences(&base, &q.node).map_err(|e| Fail::usage(e.to_string()))?;
    let code = entailment_code(&result);
    if ctx.structured() {
        let mut fields = entailment_json(&result);
        fields["query"] = json!(print_term(&q.node));
        io.out.push_str(&document("entail", fields));
    } else {
        let _ = writeln!(io.out, "{}: {}", print_term(&q.node), entailment_text(&result));
    }
    Ok(code)
}

fn parse_literal(s: &str) -> Result<Literal, Fail> {
    s.parse::<Literal>().map_err(Fail::usage)
}

fn bayes_fail(e: BayesError) -> Fail {
    match e {
        BayesError::ZeroProbabilityEvidence => Fail::failure(e.to_string()),
        other => Fail::usage(other.to_string()),
    }
}

fn cmd_bayes(ctx: &Ctx, io: &mut Io, action: &BayesAction) -> Result<u8, Fail> {
    let (BayesAction::Compile { net } | BayesAction::Query { net, .. } | BayesAction::Verify { net }) = action;
    let text = ctx.read(net)?;
    let bn = bayes::parse_net(&text).map_err(|e| Fail::usage(format!("{}: {e}", net.display())))?;
    match action {
        BayesAction::Compile { .. } => {
            if ctx.structured() {
                let sentences: Vec<String> = bayes::net_to_lp(&bn).iter().map(print_formula).collect();
                let decls: Vec<String> = bn.vocabulary().render_declarations().lines().map(String::from).collect();
                io.out.push_str(&document("bayes-compile", json!({ "declarations": decls, "sentences": sentences })));
            } else {
                io.out.push_str(&bayes::compile_to_lp(&bn));
            }
            Ok(EXIT_OK)
        }
        BayesAction::Query { query, .. } => {
            let (target, evidence) = match query.split_once('|') {
                Some((t, e)) => (t, e),
                None => (query.as_str(), ""),
            };
            let target = parse_literal(target)?;
            let evidence = evidence
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(parse_literal)
                .collect::<Result<Vec<_>, _>>()?;
            let value = bayes::query(&bn, &target, &evidence).map_err(bayes_fail)?;
            let term = print_term(&bayes::query_term(&target, &evidence));
            if ctx.structured() {
                let evidence: Vec<String> = evidence.iter().map(ToString::to_string).collect();
                io.out.push_str(&document(
                    "bayes-query",
                    json!({ "target": target.to_string(), "evidence": evidence, "term": term, "value": value.to_string() }),
                ));
            } else {
                let _ = writeln!(io.out, "{term} = {value}");
            }
            Ok(EXIT_OK)
        }
        BayesAction::Verify { .. } => {
            let report = bayes::verify_negation_uniform(&bn).map_err(bayes_fail)?;
            let holds = report.count(|o| *o == SignedOutcome::Holds);
            let undefined = report.count(|o| *o == SignedOutcome::Undefined);
            let fails = report.rows.len() - holds - undefined;
            if ctx.structured() {
                let rows: Vec<Value> = report
                    .rows
                    .iter()
                    .map(|r| {
                        let mut row = json!({ "sentence": print_formula(&r.sentence) });
                        match &r.outcome {
                            SignedOutcome::Holds => row["outcome"] = json!("holds"),
                            SignedOutcome::Undefined => row["outcome"] = json!("undefined"),
                            SignedOutcome::Fails { lhs, rhs } => {
                                row["outcome"] = json!("fails");
                                row["lhs"] = json!(lhs.to_string());
                                row["rhs"] = json!(rhs.to_string());
                            }
                        }
                        row
                    })
                    .collect();
                io.out.push_str(&document(
                    "bayes-verify",
                    json!({ "holds": holds, "undefined": undefined, "fails": fails, "rows": rows }),
                ));
            } else {
                for r in &report.rows {
                    let label = match &r.outcome {
                        SignedOutcome::Holds => "holds    ".to_string(),
                        SignedOutcome::Undefined => "undefined".to_string(),
                        SignedOutcome::Fails { lhs, rhs } => format!("FAILS ({lhs} vs {rhs})"),
                    };
                    let _ = writeln!(io.out, "{label} {}", print_formula(&r.sentence));
                }
                let _ = writeln!(io.out, "{holds} hold, {undefined} undefined, {fails} fail");
            }
            Ok(if fails == 0 { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

fn belief_fail(e: BeliefError) -> Fail {
    match e {
        BeliefError::NoGroundFacts(_) | BeliefError::NoReferenceClass { .. } => Fail::failure(e.to_string()),
        other => Fail::usage(other.to_string()),
    }
}

fn cmd_believe(ctx: &Ctx, io: &mut Io, sentences: &Path, query: &str) -> Result<u8, Fail> {
    let text = ctx.read(sentences)?;
    let kb = KnowledgeBase::parse(&text, &Vocabulary::new()).map_err(|e| match e {
        BeliefError::Parse(p) => Fail::usage(diagnostic(sentences, &text, &p)),
        other => Fail::usage(format!("{}: {other}", sentences.display())),
    })?;
    let target = parse_formula(query, kb.vocab()).map_err(|e| Fail::usage(diagnostic(Path::new("--query"), query, &e)))?;
    let res = believe(&kb, &target.node).map_err(belief_fail)?;
    let target = print_formula(&target.node);
    let provenance: Vec<String> = res.provenance.iter().map(print_formula).collect();
    let flags: Vec<&str> = res.flags.iter().map(|f| f.name()).collect();
    for f in &flags {
        let _ = writeln!(io.err, "warning: {f}");
    }
    if ctx.structured() {
        let mut fields = entailment_json(&res.bounds);
        fields["target"] = json!(target);
        fields["term"] = json!(print_term(&res.term));
        fields["reference_class"] = json!(print_formula(&res.reference_class));
        fields["provenance"] = json!(provenance);
        fields["flags"] = json!(flags);
        io.out.push_str(&document("believe", fields));
    } else {
        let _ = writeln!(io.out, "belief in {target}: {}", entailment_text(&res.bounds));
        let _ = writeln!(io.out, "term: {}", print_term(&res.term));
        let _ = writeln!(io.out, "reference class: {}", print_formula(&res.reference_class));
        for p in &provenance {
            let _ = writeln!(io.out, "from: {p}");
        }
        if !flags.is_empty() {
            let _ = writeln!(io.out, "flags: {}", flags.join(", "));
        }
    }
    Ok(entailment_code(&res.bounds))
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, Fail> {
    let bad = || Fail::usage(format!("bad --sizes `{s}`: expected `lo-hi` or a comma list of positive sizes"));
    let sizes: Vec<usize> = match s.split_once('-') {
        Some((lo, hi)) => {
            let (lo, hi) = (lo.trim().parse::<usize>().map_err(|_| bad())?, hi.trim().parse::<usize>().map_err(|_| bad())?);
            (lo..=hi).collect()
        }
        None => s.split(',').map(|p| p.trim().parse::<usize>().map_err(|_| bad())).collect::<Result<_, _>>()?,
    };
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(bad());
    }
    Ok(sizes)
}

/// Generation parameters for the `i`-th model of an axiom run.
pub fn suite_model_params(i: usize, sizes: &[usize]) -> GenParams {
    let style = if i % 2 == 0 { WeightStyle::Random } else { WeightStyle::Uniform };
    GenParams::new(sizes[i % sizes.len()], vec![1, 1, 2], style).with_extras()
}

#[allow(clippy::too_many_arguments)]
fn cmd_check_axioms(
    ctx: &Ctx,
    io: &mut Io,
    seed: u64,
    count: usize,
    sizes: &str,
    pairs: usize,
    depth: usize,
    inject_bug: bool,
) -> Result<u8, Fail> {
    let sizes = parse_sizes(sizes)?;
    if count == 0 {
        return Err(Fail::usage("--count must be positive"));
    }
    let mut report = SuiteReport::default();
    for i in 0..count {
        let model_seed = seed.wrapping_add(i as u64);
        let (vocab, mut model) = generate_random(model_seed, &suite_model_params(i, &sizes));
        if inject_bug {
            // Doubling every weight leaves a measure of total mass 2.
            let doubled = model.weights().iter().map(|w| w * &Rational::from_integer(2)).collect();
            model = model.with_weights_unchecked(doubled);
        }
        let params = SuiteParams { pairs, seed: model_seed, depth };
        report.merge(axiom_suite(&model, &vocab, &params, ctx.opts));
    }
    let total = report.total();
    if ctx.structured() {
        let tallies: serde_json::Map<String, Value> = report
            .tallies
            .iter()
            .map(|(c, t)| (c.name().to_string(), json!({ "pass": t.pass, "fail": t.fail, "undefined": t.undefined })))
            .collect();
        let failures: Vec<Value> = report
            .failures
            .iter()
            .map(|f| json!({ "check": f.check.name(), "alpha": f.alpha, "beta": f.beta, "vars": f.vars, "detail": f.detail }))
            .collect();
        io.out.push_str(&document(
            "check-axioms",
            json!({
                "seed": seed,
                "models": count,
                "pairs": pairs,
                "passed": report.passed(),
                "tallies": tallies,
                "failures": failures,
            }),
        ));
    } else {
        let _ = writeln!(io.out, "{count} models, {pairs} pairs each, seed {seed}");
        let _ = writeln!(io.out, "{:<34}{:>8}{:>8}{:>11}", "check", "pass", "fail", "undefined");
        for (c, t) in &report.tallies {
            let _ = writeln!(io.out, "{:<34}{:>8}{:>8}{:>11}", c.name(), t.pass, t.fail, t.undefined);
        }
        let _ = writeln!(io.out, "{:<34}{:>8}{:>8}{:>11}", "total", total.pass, total.fail, total.undefined);
        for f in report.failures.iter().take(10) {
            let _ = writeln!(io.out, "FAIL {}: alpha = {}, beta = {}, vars = {{{}}}: {}", f.check.name(), f.alpha, f.beta, f.vars.join(", "), f.detail);
        }
        if report.failures.len() > 10 {
            let _ = writeln!(io.out, "... and {} more failures", report.failures.len() - 10);
        }
        let _ = writeln!(io.out, "{}", if report.passed() { "all checks passed" } else { "FAILED" });
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}
