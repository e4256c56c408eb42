//! Acceptance criteria, one line each. Runs `ncwig verify --suite all --seed 7`
//! twice: the two outputs must match byte for byte, and the reports of the
//! first run are re-checked here against tolerances pinned below (not the
//! tolerances the binary reports).

use std::process::{Command, ExitCode};

struct Report {
    name: String,
    passed: bool,
    metric: f64,
}

fn parse(stdout: &str) -> Vec<Report> {
    stdout
        .lines()
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            let status = it.next()?;
            let name = it.next()?.to_string();
            let metric = it.find_map(|t| t.strip_prefix("metric="))?.parse().unwrap_or(f64::NAN);
            Some(Report { name, passed: status == "PASS", metric })
        })
        .collect()
}

/// `(report name or `prefix*`, pinned tolerance)`.
type Pins = &'static [(&'static str, f64)];

const CRITERIA: [(&str, Pins); 7] = [
    ("qm sector equivalence", &[("qm-equivalence*", 1e-6)]),
    (
        "marginal identities",
        &[("marginals:momentum", 1e-6), ("marginals:position", 1e-6), ("marginals:prefactor", 1e-6)],
    ),
    ("reduced star-product marginals", &[("star-marginals:position", 1e-4), ("star-marginals:momentum", 1e-4)]),
    (
        "isometry constants",
        &[
            ("isometry:generic", 1e-4),
            ("isometry:tau0", 1e-4),
            ("isometry:qm", 1e-4),
            ("isometry:generic:doubling", 1e-3),
            ("isometry:tau0:doubling", 1e-3),
            ("isometry:qm:doubling", 1e-3),
            ("isometry:generic:constant", 1e-3),
            ("isometry:tau0:constant", 1e-3),
            ("isometry:qm:constant", 1e-3),
            ("isometry:generic:raw16", 1e-3),
            ("isometry:tau0:raw16", 1e-3),
            ("isometry:qm:raw16", 1e-3),
        ],
    ),
    ("qm limit", &[("qm-limit:monotone", 0.0), ("qm-limit:final", 1e-3)]),
    (
        "oracle equivalence",
        &[
            ("oracle:generic", 1e-8),
            ("oracle:tau0", 1e-8),
            ("oracle:qm", 1e-8),
            ("oracle:star-hbar", 1e-6),
            ("oracle:star-general", 1e-6),
        ],
    ),
    (
        "structural invariants",
        &[
            ("structure:associativity", 1e-12),
            ("structure:homomorphism", 1e-10),
            ("structure:unitarity", 1e-10),
            ("structure:reality", 1e-10),
            ("structure:hermiticity", 1e-10),
            ("structure:sesquilinearity", 1e-10),
        ],
    ),
];

fn check(reports: &[Report], pins: Pins) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for &(pattern, tol) in pins {
        let hits: Vec<&Report> = match pattern.strip_suffix('*') {
            Some(prefix) => reports.iter().filter(|r| r.name.starts_with(prefix)).collect(),
            None => reports.iter().filter(|r| r.name == pattern).collect(),
        };
        if hits.is_empty() {
            ok = false;
            notes.push(format!("{pattern}: missing"));
        }
        for r in hits {
            let good = r.passed && r.metric.is_finite() && r.metric <= tol;
            ok &= good;
            notes.push(format!("{}={:.3e}{}", r.name, r.metric, if good { "" } else { "!" }));
        }
    }
    (ok, notes.join(" "))
}

fn verify() -> (Option<i32>, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_ncwig"))
        .args(["verify", "--suite", "all", "--seed", "7"])
        .output()
        .expect("spawn ncwig");
    (o.status.code(), o.stdout)
}

fn main() -> ExitCode {
    let (code1, first) = verify();
    let (code2, second) = verify();
    let reports = parse(&String::from_utf8_lossy(&first));

    let mut all = true;
    for (i, (title, pins)) in CRITERIA.iter().enumerate() {
        let (ok, notes) = check(&reports, pins);
        all &= ok;
        println!("criterion {} {title}: {} {notes}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    let same = first == second && !first.is_empty();
    let ok = same && code1 == code2;
    all &= ok;
    println!(
        "criterion 8 determinism: {} runs={} bytes={} exit={:?}/{:?}",
        if ok { "PASS" } else { "FAIL" },
        if same { "identical" } else { "differ" },
        first.len(),
        code1,
        code2
    );
    all &= code1 == Some(0);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
