//! Runs every acceptance criterion once and prints one line per criterion.
//! Exits non-zero when a criterion fails or exceeds its time budget.

use std::time::Instant;

use rothcheck::cli::suite::CRITERIA;

const SEED: u64 = 7;
const PRECISION: u32 = 128;

fn main() {
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let rep = (c.run)(SEED, PRECISION);
        let secs = start.elapsed().as_secs_f64();
        let in_budget = secs < c.budget_secs as f64;
        let ok = rep.passed && in_budget;
        failed += usize::from(!ok);
        println!(
            "{} criterion {:>2} {:<26} cases={:<6} failures={:<3} time={:.2}s budget={}s",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            rep.cases,
            rep.failure_count,
            secs,
            c.budget_secs
        );
        for f in &rep.failures {
            println!("     {f}");
        }
        if !in_budget {
            println!("     over budget");
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
