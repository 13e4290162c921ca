//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use bubble_tower::acceptance::{run_all, Profile};

fn main() {
    let report = run_all(Profile::Full);
    for c in &report.criteria {
        println!("{}", c.line());
    }
    let failed: Vec<u32> = report.criteria.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", report.criteria.len());
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
