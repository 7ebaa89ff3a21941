//! Runs the feedback corner of the toy network bit by bit and prints the
//! first channel uses of the trace.

use ldbfn::schemes::{allocate, build_scheme};
use ldbfn::simulator::run;
use ldbfn::ChannelParams;

fn main() -> ldbfn::Result<()> {
    let p = ChannelParams::new(2, 3, 1, 1);
    let scheme = build_scheme(&p, &allocate(&p, (2, 1))?)?;
    let (trace, report) = run(&scheme, 16, 42)?;
    for line in trace.lines().iter().take(24) {
        println!("{line}");
    }
    println!("...");
    println!("{}", serde_json::to_string_pretty(&report.to_json())?);
    Ok(())
}
