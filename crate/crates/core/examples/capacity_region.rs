//! Outer bound, regime and corners for a tuple given on the command line.
//!
//! `cargo run --example capacity_region -- 2 3 1 1` (n_c n_s n_r n_f)

use ldbfn::rate_region::{corner_points, lemma_region, outer_bound_region, regime_of, regions_equal, sum_capacity};
use ldbfn::ChannelParams;

fn main() {
    let gains: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("gains are non-negative integers"))
        .collect();
    let p = match gains[..] {
        [nc, ns, nr, nf] => ChannelParams::new(nc, ns, nr, nf),
        [] => ChannelParams::new(2, 3, 1, 1),
        _ => panic!("expected four gains: n_c n_s n_r n_f"),
    };
    let outer = outer_bound_region(&p);
    println!("{p} is in regime {}", regime_of(&p));
    println!("outer bound   {outer}");
    println!("achievable    {}", lemma_region(&p));
    println!("equal         {}", regions_equal(&outer, &lemma_region(&p)));
    println!("sum capacity  {}", sum_capacity(&outer));
    let corners: Vec<String> = corner_points(&outer).iter().map(ToString::to_string).collect();
    println!("corners       {}", corners.join(" "));
}
