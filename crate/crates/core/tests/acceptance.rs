//! End-to-end acceptance run: one PASS/FAIL line per criterion. Runs
//! without the libtest harness so the lines are always printed.

use std::process::Command;
use std::time::{Duration, Instant};

use quiverflow::selfcheck::{criteria, CheckResult};

const SEED: u64 = 7;

/// Wall-clock budgets, where one applies. Criterion 3 covers two flows
/// with a five second budget each.
fn budget(id: usize) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(10)),
        3 => Some(Duration::from_secs(10)),
        6 => Some(Duration::from_secs(60)),
        7 => Some(Duration::from_secs(120)),
        _ => None,
    }
}

fn run_criterion(id: usize, check: fn(u64) -> CheckResult) -> (bool, String) {
    let start = Instant::now();
    let r = check(SEED);
    let elapsed = start.elapsed();
    let mut passed = r.passed;
    let mut detail = format!("{}: {} ({:.2?})", r.title, r.detail, elapsed);
    if let Some(limit) = budget(id) {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!(", over the {limit:?} budget"));
        }
    }
    (passed, detail)
}

fn selfcheck_report() -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_quiverflow"))
        .args(["selfcheck", "--seed", &SEED.to_string()])
        .env_remove("QUIVERFLOW_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit status {}", out.status));
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    Ok(text.lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n"))
}

fn determinism() -> (bool, String) {
    match (selfcheck_report(), selfcheck_report()) {
        (Ok(a), Ok(b)) if a == b => (true, format!("two selfcheck runs agree ({} bytes)", a.len())),
        (Ok(a), Ok(b)) => {
            let line = a.lines().zip(b.lines()).position(|(x, y)| x != y).unwrap_or(0);
            (false, format!("reports differ from line {}", line + 1))
        }
        (Err(e), _) | (_, Err(e)) => (false, format!("selfcheck failed: {e}")),
    }
}

fn main() {
    let mut lines = Vec::new();
    for (id, check) in criteria() {
        let (passed, detail) = run_criterion(id, check);
        lines.push((id, passed, detail));
    }
    let (passed, detail) = determinism();
    lines.push((11, passed, detail));

    for (id, passed, detail) in &lines {
        println!("criterion {id}: {} - {detail}", if *passed { "PASS" } else { "FAIL" });
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
