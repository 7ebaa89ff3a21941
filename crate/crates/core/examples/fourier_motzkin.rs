//! Projects each regime's component-rate system onto (R1, R2) and checks
//! the result against brute-force enumeration.

use std::collections::BTreeSet;

use ldbfn::fourier_motzkin::{enumerate_integer_projection, natural_bound, parse_fixture, project_to_rates};
use ldbfn::rate_region::{outer_bound_region, Regime};
use ldbfn::schemes::{constraint_system, rate_definitions};
use ldbfn::ChannelParams;

fn main() -> ldbfn::Result<()> {
    let examples = [
        (Regime::A, ChannelParams::new(2, 1, 3, 0)),
        (Regime::B, ChannelParams::new(1, 2, 3, 0)),
        (Regime::C, ChannelParams::new(6, 3, 1, 1)),
        (Regime::D, ChannelParams::new(2, 3, 1, 1)),
    ];
    for (regime, p) in examples {
        let system = constraint_system(regime, &p)?;
        let (r1, r2) = rate_definitions(regime);
        let projected = project_to_rates(&system, &r1, &r2)?;
        let fm: BTreeSet<_> = projected.integer_points().into_iter().collect();
        let oracle = enumerate_integer_projection(&system, &r1, &r2, natural_bound(&system))?;
        println!("regime {regime} at {p}");
        for row in system.inequalities() {
            println!("    {row}");
        }
        println!("  projection  {projected}");
        println!("  outer bound {}", outer_bound_region(&p));
        println!("  oracle      {}", if fm == oracle { "agrees" } else { "DISAGREES" });
    }

    let text = "vars x y\nx + y <= 3\nx <= 2\nR1 = x + y\nR2 = y\n";
    let fx = parse_fixture(text, [None; 4])?;
    println!("text fixture projects to {}", project_to_rates(&fx.system, &fx.r1, &fx.r2)?);
    Ok(())
}
