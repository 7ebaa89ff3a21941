//! Simulates every integer corner of every capacity region on a lattice.
//! Set LDBFN_THREADS to cap the worker threads.

use std::time::Instant;

use ldbfn::simulator::verify_corner_sweep;

fn main() -> ldbfn::Result<()> {
    let max = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let start = Instant::now();
    let summary = verify_corner_sweep(max, 8)?;
    println!(
        "[0,{max}]^4: {} tuples, {} corner runs, {} failures in {:.2?}",
        summary.tuples,
        summary.runs,
        summary.failures.len(),
        start.elapsed()
    );
    for f in &summary.failures {
        println!("  {} corner {}: {}", f.params, f.corner, f.detail);
    }
    Ok(())
}
