//! Runs the cases listed in `<dir>/manifest.json` and compares each one's
//! exit code and stdout with `<dir>/expected/<name>.txt`.
//!
//! ```json
//! [{ "name": "entail-two-atoms", "args": ["entail", "--sentences", "a.lp", "--query", "[Q(x)]{x}"], "exit": 0 }]
//! ```

use std::fmt::Write as _;
use std::path::Path;

use clap::Parser;
use serde_json::Value;

use crate::commands::{self, Ctx, Fail, EXIT_FAILURE, EXIT_OK};
use crate::{Cli, Command};

struct Case {
    name: String,
    args: Vec<String>,
    exit: u8,
}

fn manifest(dir: &Path) -> Result<Vec<Case>, Fail> {
    let path = dir.join("manifest.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Fail::usage(format!("cannot read {}: {e}", path.display())))?;
    let bad = |m: &str| Fail::usage(format!("{}: {m}", path.display()));
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    let entries = value.as_array().ok_or_else(|| bad("expected an array of cases"))?;
    entries
        .iter()
        .map(|e| {
            let name = e["name"].as_str().ok_or_else(|| bad("case without a name"))?.to_string();
            let args = e["args"]
                .as_array()
                .ok_or_else(|| bad(&format!("{name}: missing args")))?
                .iter()
                .map(|a| a.as_str().map(String::from).ok_or_else(|| bad(&format!("{name}: args must be strings"))))
                .collect::<Result<Vec<_>, _>>()?;
            let exit = e["exit"].as_u64().unwrap_or(0) as u8;
            Ok(Case { name, args, exit })
        })
        .collect()
}

fn first_difference(want: &str, got: &str) -> String {
    for (i, (w, g)) in want.lines().zip(got.lines()).enumerate() {
        if w != g {
            return format!("line {}: expected `{w}`, got `{g}`", i + 1);
        }
    }
    format!("expected {} lines, got {}", want.lines().count(), got.lines().count())
}

pub fn run(ctx: &Ctx, out: &mut String, dir: &Path, update: bool) -> Result<u8, Fail> {
    let dir = if dir.is_absolute() { dir.to_path_buf() } else { ctx.base.join(dir) };
    let cases = manifest(&dir)?;
    let expected_dir = dir.join("expected");
    if update {
        std::fs::create_dir_all(&expected_dir).map_err(|e| Fail::usage(e.to_string()))?;
    }
    let mut failed = 0;
    for case in &cases {
        let argv = std::iter::once("lp".to_string()).chain(case.args.iter().cloned());
        let cli = Cli::try_parse_from(argv).map_err(|e| Fail::usage(format!("{}: {e}", case.name)))?;
        if matches!(cli.command, Command::Reproduce { .. }) {
            return Err(Fail::usage(format!("{}: cases cannot run `reproduce`", case.name)));
        }
        let case_ctx = Ctx::new(dir.clone(), &cli);
        let (code, stdout, _) = commands::run(&case_ctx, &cli.command);
        let golden = expected_dir.join(format!("{}.txt", case.name));
        if update {
            std::fs::write(&golden, &stdout).map_err(|e| Fail::usage(e.to_string()))?;
            let _ = writeln!(out, "wrote {} (exit {code})", case.name);
            continue;
        }
        let want = std::fs::read_to_string(&golden).unwrap_or_default();
        let verdict = if code != case.exit {
            Some(format!("exit code {code}, expected {}", case.exit))
        } else if stdout != want {
            Some(first_difference(&want, &stdout))
        } else {
            None
        };
        match verdict {
            None => {
                let _ = writeln!(out, "PASS {}", case.name);
            }
            Some(why) => {
                failed += 1;
                let _ = writeln!(out, "FAIL {}: {why}", case.name);
            }
        }
    }
    if !update {
        let _ = writeln!(out, "{} of {} examples reproduced", cases.len() - failed, cases.len());
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}
