//! Runs every check on the catalog and prints a one-line summary per instance.
//!
//! `cargo run --example sweep -- qsA2-v11` restricts the sweep to named instances.

use igklo_core::relcheck::{run_all, CheckOptions};
use igklo_core::satake::build_catalog;

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).collect();
    for inst in build_catalog() {
        if !filter.is_empty() && !filter.contains(&inst.name) {
            continue;
        }
        let rep = run_all(&inst, &CheckOptions::default()).expect("image");
        let fails: Vec<_> = rep.failures().collect();
        println!(
            "{}: {} entries, {} failures, {} ms",
            inst.name,
            rep.entries.len(),
            fails.len(),
            rep.millis
        );
        for e in fails.iter().take(12) {
            println!("  {}", e);
        }
    }
}
