//! Builds the single-strategy schemes, prints each transmitter's levels and
//! checks them under simulation.

use ldbfn::gf2signal::ChannelParams;
use ldbfn::rate_region::regime_of;
use ldbfn::schemes::{build_scheme, RateAllocation, Tx};
use ldbfn::simulator::run;

fn main() -> ldbfn::Result<()> {
    let cases: [(&str, ChannelParams, &[(&str, i64)]); 5] = [
        ("neutralization", ChannelParams::new(1, 2, 1, 0), &[("Rn", 1)]),
        ("compute-forward", ChannelParams::new(1, 1, 2, 0), &[("Rc1", 1)]),
        ("symmetric feedback", ChannelParams::new(2, 1, 0, 1), &[("Rf_bar", 1)]),
        ("asymmetric feedback", ChannelParams::new(1, 1, 0, 1), &[("R1f", 1)]),
        ("decode-forward", ChannelParams::new(2, 2, 2, 0), &[("R1d", 1), ("R2d", 1)]),
    ];
    for (name, p, pairs) in cases {
        let alloc = RateAllocation::from_pairs(regime_of(&p), pairs)?;
        let scheme = build_scheme(&p, &alloc)?;
        println!("{name} at {p}, regime {}", scheme.regime());
        for tx in Tx::ALL {
            println!("  {tx:<3} {}", scheme.level_map(tx).join(" | "));
        }
        let (_, report) = run(&scheme, 8, 1)?;
        println!(
            "  N=8: delivered {:?} bits in {} uses, {} errors",
            report.delivered_bits,
            report.total_uses(),
            report.errors.len()
        );
    }
    Ok(())
}
