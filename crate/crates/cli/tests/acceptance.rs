//! One line per acceptance criterion. Criteria 1 to 11 run in-process;
//! criterion 12 runs the binary twice and compares the bytes.
//!
//! Checks 6 and 7 are known to fail as stated (see the project notes): the
//! gap ratio misses its threshold at p = 2 and p = 3, and at p = 2 the set
//! also carries a vertical line. The run fails if any other check fails,
//! or if either of these starts passing.

use std::process::{Command, ExitCode};

use kakeya::checks::{run_checks, CheckOutcome};

const KNOWN_FAILURES: [usize; 2] = [6, 7];
const SEED: u64 = 7;

fn check_all_bytes() -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_kakeya-lab"))
        .args(["check-all", "--level", "desk", "--seed", &SEED.to_string()])
        .output()
        .expect("binary runs");
    assert!(matches!(out.status.code(), Some(0 | 1)), "check-all exited with {:?}", out.status);
    out.stdout
}

fn main() -> ExitCode {
    let mut outcomes = run_checks(kakeya::checks::Level::Desk, SEED);
    let first = check_all_bytes();
    let second = check_all_bytes();
    let same = first == second && !first.is_empty();
    outcomes.push(CheckOutcome {
        id: 12,
        name: "determinism",
        passed: same,
        detail: format!("check-all --level desk twice: {} bytes, identical {same}", first.len()),
    });
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failing: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("{}/{} passed; failing {failing:?}, expected {KNOWN_FAILURES:?}", outcomes.len() - failing.len(), outcomes.len());
    if failing == KNOWN_FAILURES {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
