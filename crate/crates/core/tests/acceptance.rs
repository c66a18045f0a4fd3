//! Acceptance run: evaluates every numbered criterion of the full validation
//! suite and prints one pass/fail line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use ppv_core::validate::{run, Check, Level, Report};

const CRITERIA: [(&str, &str); 9] = [
    ("c1.", "integral vs oracle |d ln P| <= 1e-8, n in {4,8,16,64,256}, both kinds"),
    ("c2.", "auto series error within first neglected term, matching sign, when certified"),
    ("c3.", "c0 and g1 closed-form identities to 1e-10 on a 100-point grid"),
    ("c4.", "converse rate at n=1e7, 0 dB, Pe=1e-5 in [0.495, 0.5]"),
    ("c5.", "minimum Eb/N0 gaps 1.2/0.6/0.3 dB +- 0.1 at n=1e4/1e5/1e6"),
    ("c6.", "excess power at 0 dB crosses 0.1 dB between n=1e5 and n=1e6"),
    ("c7.", "high-SNR asymptote vs excess power at 40 dB within 0.02 dB"),
    ("c8.", "kappa-beta <= converse, certified rate bracket, error below single-term"),
    ("c9.", "monotonicity, majorants, closed-form rate bracket, oracle complementarity"),
];

fn detail(checks: &[&Check]) -> String {
    if checks.len() > 3 {
        return String::new();
    }
    let parts: Vec<String> = checks.iter().map(|c| format!("{}={:.6}", short(&c.name), c.got)).collect();
    format!(" [{}]", parts.join(", "))
}

fn short(name: &str) -> &str {
    name.rsplit_once('.').map_or(name, |(_, t)| t)
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let report = run(Level::Full);
    let elapsed = t0.elapsed();
    let mut ok = true;
    for (i, (prefix, what)) in CRITERIA.iter().enumerate() {
        let (passed, total) = report.tally(prefix);
        let pass = total > 0 && passed == total;
        ok &= pass;
        let sel: Vec<&Check> = report.checks.iter().filter(|c| c.required && c.name.starts_with(prefix)).collect();
        let skipped = report
            .checks
            .iter()
            .filter(|c| !c.required && c.name.starts_with(prefix))
            .count();
        let note = if skipped > 0 { format!(", {skipped} observations") } else { String::new() };
        println!(
            "criterion {} {}: {what} ({passed}/{total}{note}){}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            detail(&sel)
        );
    }
    let round_trip = Report::parse(&report.emit()).is_ok_and(|r| r.emit() == report.emit());
    ok &= round_trip;
    println!("report round-trip {}", if round_trip { "PASS" } else { "FAIL" });
    for c in report.failures() {
        println!("  failed {} expected={} got={} tol={}", c.name, c.expected, c.got, c.tolerance);
    }
    for c in report.checks.iter().filter(|c| c.name.starts_with("finding.") && !c.pass) {
        println!("  finding {} converse={} normal={}", c.name, c.expected, c.got);
    }
    println!("elapsed {:.1} s", elapsed.as_secs_f64());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
