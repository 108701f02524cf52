//! Acceptance batteries: one line per criterion, with pinned time bounds.
//!
//! Every battery is exact (rational and integer arithmetic), so there are no
//! numeric tolerances; a criterion passes when its battery reports `pass`
//! and it finishes within its time bound.

use std::process::ExitCode;
use std::time::Duration;

use tnnflag::suite::{self, CheckReport, SuiteConfig, Verdict};

/// Seed shared by all randomized batteries.
const SEED: u64 = 20_240_601;

struct Criterion {
    number: u32,
    title: &'static str,
    bound: Duration,
    run: fn(&SuiteConfig) -> CheckReport,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        number: 1,
        title: "order sanity",
        bound: Duration::from_secs(10),
        run: suite::order_sanity,
    },
    Criterion {
        number: 2,
        title: "Weyl interval shellability",
        bound: Duration::from_secs(120),
        run: suite::weyl_shellable,
    },
    Criterion {
        number: 3,
        title: "twisted parametrization",
        bound: Duration::from_secs(300),
        run: suite::twisted_parametrization,
    },
    Criterion {
        number: 4,
        title: "inclusion and product structure",
        bound: Duration::from_secs(300),
        run: suite::inclusion_product,
    },
    Criterion {
        number: 5,
        title: "Demazure oracles",
        bound: Duration::from_secs(30),
        run: suite::demazure_oracles,
    },
    Criterion {
        number: 6,
        title: "thickening order embedding",
        bound: Duration::from_secs(60),
        run: suite::thickening_embedding,
    },
    Criterion {
        number: 7,
        title: "Q-hat and link battery",
        bound: Duration::from_secs(180),
        run: suite::q_battery,
    },
    Criterion {
        number: 8,
        title: "Z parametrization",
        bound: Duration::from_secs(120),
        run: suite::z_battery,
    },
    Criterion {
        number: 9,
        title: "TNN monoid",
        bound: Duration::from_secs(60),
        run: suite::tnn_monoid,
    },
];

fn main() -> ExitCode {
    let cfg = SuiteConfig {
        seed: SEED,
        ..SuiteConfig::default()
    };
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|s| s.parse().ok());
    let mut all_ok = true;
    for c in CRITERIA
        .iter()
        .filter(|c| only.is_none_or(|n| n == c.number))
    {
        let report = (c.run)(&cfg);
        let elapsed = Duration::from_millis(report.elapsed_ms.unwrap_or(u64::MAX));
        let in_time = elapsed <= c.bound;
        let ok = report.verdict == Verdict::Pass && in_time;
        all_ok &= ok;
        println!(
            "criterion {} ({}): {} [{:?}, {} cases, {} failures, {} inconclusive, {:.1}s of {}s]{}",
            c.number,
            c.title,
            if ok { "PASS" } else { "FAIL" },
            report.verdict,
            report.cases,
            report.failures,
            report.inconclusive,
            elapsed.as_secs_f64(),
            c.bound.as_secs(),
            report
                .detail
                .map(|d| format!(" first issue: {d}"))
                .unwrap_or_default(),
        );
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
