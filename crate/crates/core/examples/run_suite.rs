//! Runs the default suite and prints failing records and a summary.
use std::time::Instant;

use regurec::suite::{default_suite, run_suite, summarize, SuiteOptions};

fn main() {
    let t = Instant::now();
    let recs = run_suite(&default_suite(), &SuiteOptions::default());
    for r in recs.iter().filter(|r| !r.ok()) {
        println!("{}", serde_json::to_string(r).unwrap());
    }
    println!("{:?} in {:.2?}", summarize(&recs), t.elapsed());
}
