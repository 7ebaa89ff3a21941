//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its runtime; the test fails if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use ldbfn::cli::{achievable_equals_outer, sum_capacity_scheme};
use ldbfn::fourier_motzkin::{enumerate_integer_projection, natural_bound, project_to_rates};
use ldbfn::rate_region::{
    net_gain, outer_bound_region, regime_of, regions_equal, sum_capacity, Halfspace,
    Rational, RateRegion,
};
use ldbfn::schemes::{build_scheme, rate_definitions, RateAllocation, Tx};
use ldbfn::simulator::{run, verify_corner_sweep};
use ldbfn::ChannelParams;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(id: usize, what: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took <= limit;
    let pass = out.pass && in_time;
    let mut line = format!(
        "{} criterion {id}: {what} [{:.3?} of {:?}] {}\n",
        if pass { "PASS" } else { "FAIL" },
        took,
        limit,
        out.detail
    );
    if !in_time {
        line.push_str("      over the time limit\n");
    }
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    pass
}

fn region(hs: &[(i64, i64, i64)]) -> RateRegion {
    RateRegion::new(hs.iter().map(|&(a, b, c)| Halfspace::int(a, b, c)).collect())
}

fn toy_regions() -> Outcome {
    let without = outer_bound_region(&ChannelParams::new(2, 3, 1, 0));
    let with = outer_bound_region(&ChannelParams::new(2, 3, 1, 1));
    let a = regions_equal(&without, &region(&[(1, 0, 1), (0, 1, 1)]));
    let b = regions_equal(&with, &region(&[(1, 0, 2), (0, 1, 2), (1, 1, 3)]));
    Outcome {
        pass: a && b,
        detail: format!("n_f=0 -> {without}, n_f=1 -> {with}"),
    }
}

fn feedback_gain() -> Outcome {
    let base = ChannelParams::new(6, 3, 1, 0);
    let fed = base.with_nf(1);
    let c0 = sum_capacity(&outer_bound_region(&base));
    let c1 = sum_capacity(&outer_bound_region(&fed));
    let eta = net_gain(&base, 1, Rational::from(1));
    let scheme = build_scheme(&fed, &ldbfn::schemes::allocate(&fed, (2, 2)).unwrap()).unwrap();
    let (_, report) = run(&scheme, 16, 0).unwrap();
    let levels = scheme.feedback_levels();
    let balanced = sum_capacity_scheme(&fed).map(|s| s.rates()).ok();
    let pass = c0 == Rational::from(2)
        && c1 == Rational::from(4)
        && eta.as_ref().ok() == Some(&Rational::from(2))
        && levels == 1
        && report.feedback_levels_used == 1
        && report.is_error_free()
        && report.delivered_bits == [32, 32]
        && balanced == Some((2, 2));
    Outcome {
        pass,
        detail: format!(
            "C: {c0} -> {c1}, eta={eta:?}, r_f={levels}, simulated errors={}",
            report.errors.len()
        ),
    }
}

fn constructive_achievability() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for p in ChannelParams::lattice(5) {
        count += 1;
        match achievable_equals_outer(&p) {
            Ok(true) => {}
            Ok(false) => failures.push(p.to_string()),
            Err(e) => failures.push(format!("{p}: {e}")),
        }
    }
    Outcome {
        pass: count == 1296 && failures.is_empty(),
        detail: format!("{count} tuples, {} mismatches {:?}", failures.len(), &failures[..failures.len().min(5)]),
    }
}

fn zero_error_corners() -> Outcome {
    let s = verify_corner_sweep(3, 8).unwrap();
    Outcome {
        pass: s.tuples == 256 && s.passed(),
        detail: format!("{} tuples, {} corner runs, {} failures", s.tuples, s.runs, s.failures.len()),
    }
}

fn fm_matches_enumeration() -> Outcome {
    let mut systems = 0;
    let mut failures = Vec::new();
    for p in ChannelParams::lattice(4) {
        let regime = regime_of(&p);
        let (r1, r2) = rate_definitions(regime);
        for (k, system) in common::systems_of(&p).into_iter().enumerate() {
            systems += 1;
            let fm: BTreeSet<(i64, i64)> = match project_to_rates(&system, &r1, &r2) {
                Ok(region) => region.integer_points().into_iter().collect(),
                Err(e) => {
                    failures.push(format!("{p} system {k}: {e}"));
                    continue;
                }
            };
            let oracle = enumerate_integer_projection(&system, &r1, &r2, natural_bound(&system)).unwrap();
            if fm != oracle {
                failures.push(format!("{p} system {k}"));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{systems} systems, {} mismatches {:?}", failures.len(), &failures[..failures.len().min(5)]),
    }
}

struct MicroFixture {
    name: &'static str,
    params: ChannelParams,
    allocation: &'static [(&'static str, i64)],
    levels: [&'static [&'static str]; 4],
    rates: (usize, usize),
}

/// Single-use pictures of each strategy, one bit per source per use.
const MICRO_FIXTURES: [MicroFixture; 5] = [
    MicroFixture {
        name: "neutralization",
        params: ChannelParams::new(1, 2, 1, 0),
        allocation: &[("Rn", 1)],
        levels: [
            &["u1n(i)", "u1n(i+1)"],
            &["u2n(i)", "u2n(i+1)"],
            &["nsum(i)", "0"],
            &["0", "0"],
        ],
        rates: (1, 1),
    },
    MicroFixture {
        name: "compute-forward",
        params: ChannelParams::new(1, 1, 2, 0),
        allocation: &[("Rc1", 1)],
        levels: [
            &["u1c[1](i)", "0"],
            &["u2c[1](i)", "0"],
            &["csum[1](i-1)", "0"],
            &["0", "0"],
        ],
        rates: (1, 1),
    },
    MicroFixture {
        name: "symmetric feedback",
        params: ChannelParams::new(2, 1, 0, 1),
        allocation: &[("Rf_bar", 1)],
        levels: [
            &["u1fbar(i)", "u2fbar(i-2)"],
            &["u2fbar(i)", "u1fbar(i-2)"],
            &["0", "0"],
            &["fbarsum(i-1)", "0"],
        ],
        rates: (1, 1),
    },
    MicroFixture {
        name: "asymmetric feedback",
        params: ChannelParams::new(1, 1, 0, 1),
        allocation: &[("R1f", 1)],
        levels: [&["u1f(i)"], &["u1f(i-2)"], &["0"], &["fsum(i-1)"]],
        rates: (1, 0),
    },
    MicroFixture {
        name: "decode-forward",
        params: ChannelParams::new(2, 2, 2, 0),
        allocation: &[("R1d", 1), ("R2d", 1)],
        levels: [
            &["u1d(i)#1", "u1d(i)#2"],
            &["u2d(i)#1", "u2d(i)#2"],
            &["dsum(i-1)#1", "dsum(i-1)#2"],
            &["0", "0"],
        ],
        rates: (1, 1),
    },
];

fn strategy_micro_fixtures() -> Outcome {
    let mut failures = Vec::new();
    for fx in &MICRO_FIXTURES {
        let alloc = RateAllocation::from_pairs(regime_of(&fx.params), fx.allocation).unwrap();
        let scheme = build_scheme(&fx.params, &alloc).unwrap();
        for (tx, want) in Tx::ALL.iter().zip(fx.levels) {
            let got = scheme.level_map(*tx);
            if got != want {
                failures.push(format!("{} {tx}: {got:?}", fx.name));
            }
        }
        let (_, report) = run(&scheme, 8, 0).unwrap();
        if !report.is_error_free() || report.delivered_bits != [8 * fx.rates.0, 8 * fx.rates.1] {
            failures.push(format!("{}: delivered {:?}", fx.name, report.delivered_bits));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{} fixtures, failures {failures:?}", MICRO_FIXTURES.len()),
    }
}

fn property_suites() -> Outcome {
    let mut failures: Vec<String> = Vec::new();
    let mut note = |r: common::Check| {
        if let Err(e) = r {
            failures.push(e);
        }
    };
    let mut rng = common::rng(7);
    for i in 0..1000 {
        let p = common::random_params(&mut rng, 8);
        note(common::channel_is_linear(&p, i));
    }
    let schemes = common::corner_schemes(3);
    for (i, scheme) in schemes.iter().enumerate() {
        note(common::layouts_round_trip(scheme, i as u64));
    }
    for (i, p) in ChannelParams::lattice(4).enumerate() {
        note(common::elimination_order_is_irrelevant(&p, 3, i as u64));
        note(common::regions_grow_with_every_gain(&p));
        note(common::regions_are_symmetric(&p));
    }
    note(common::cross_gain_can_shrink_the_region());
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "1000 linearity cases, {} scheme layouts, 625 tuples x 3 orders; monotone in n_s, n_r, n_f; failures {:?}",
            schemes.len() * 4,
            &failures[..failures.len().min(3)]
        ),
    }
}

#[test]
fn acceptance() {
    let results = [
        check(1, "toy regions with and without feedback", Duration::from_millis(1), toy_regions),
        check(2, "two bits of sum capacity per feedback bit", Duration::from_secs(1), feedback_gain),
        check(3, "scheme projections meet the outer bound on [0,5]^4", Duration::from_secs(30), constructive_achievability),
        check(4, "zero-error corners on [0,3]^4 with N=8", Duration::from_secs(120), zero_error_corners),
        check(5, "elimination matches enumeration on [0,4]^4", Duration::from_secs(120), fm_matches_enumeration),
        check(6, "strategy micro-fixtures", Duration::from_secs(5), strategy_micro_fixtures),
        check(7, "property suites", Duration::from_secs(60), property_suites),
    ];
    assert!(results.iter().all(|&r| r), "some acceptance criteria failed");
}
