use rayon::prelude::*;
use serde::Serialize;

use super::run;
use crate::error::{Error, Result};
use crate::gf2signal::ChannelParams;
use crate::rate_region::{corner_points, outer_bound_region};
use crate::schemes::{allocate, build_scheme};

/// Environment variable capping the sweep's worker threads.
pub const THREADS_VAR: &str = "LDBFN_THREADS";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepFailure {
    pub params: ChannelParams,
    pub corner: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub tuples: usize,
    pub runs: usize,
    pub failures: Vec<SweepFailure>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check_corner(p: &ChannelParams, r1: i64, r2: i64, n_blocks: usize, seed: u64) -> Option<String> {
    let scheme = match allocate(p, (r1, r2)).and_then(|a| build_scheme(p, &a)) {
        Ok(s) => s,
        Err(e) => return Some(e.to_string()),
    };
    match run(&scheme, n_blocks, seed) {
        Err(e) => Some(e.to_string()),
        Ok((_, report)) if !report.is_error_free() => Some(
            report
                .errors
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ),
        Ok((_, report)) => {
            let want = [r1 as usize * n_blocks, r2 as usize * n_blocks];
            (report.delivered_bits != want).then(|| {
                format!("delivered {:?} bits, expected {want:?}", report.delivered_bits)
            })
        }
    }
}

/// Allocates, builds and simulates every corner of every tuple's capacity
/// region, in parallel across (tuple, corner) jobs.
pub fn verify_corners(params: &[ChannelParams], n_blocks: usize, seed: u64) -> Result<SweepSummary> {
    let jobs: Vec<(ChannelParams, String, Option<(i64, i64)>)> = params
        .iter()
        .flat_map(|p| {
            corner_points(&outer_bound_region(p))
                .into_iter()
                .map(move |c| (*p, c.to_string(), c.as_integers()))
        })
        .collect();
    let work = || {
        jobs.par_iter()
            .filter_map(|(p, label, corner)| {
                let detail = match corner {
                    None => Some("corner is not an integer point".to_string()),
                    Some((r1, r2)) => check_corner(p, *r1, *r2, n_blocks, seed),
                };
                detail.map(|detail| SweepFailure {
                    params: *p,
                    corner: label.clone(),
                    detail,
                })
            })
            .collect::<Vec<_>>()
    };
    let failures = match std::env::var(THREADS_VAR).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Parameter(format!("{THREADS_VAR}: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(SweepSummary {
        tuples: params.len(),
        runs: jobs.len(),
        failures,
    })
}

/// [`verify_corners`] over the lattice `[0, max]^4`.
pub fn verify_corner_sweep(max: usize, n_blocks: usize) -> Result<SweepSummary> {
    let params: Vec<ChannelParams> = ChannelParams::lattice(max).collect();
    verify_corners(&params, n_blocks, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_lattice_has_one_corner() {
        let s = verify_corner_sweep(0, 3).unwrap();
        assert_eq!((s.tuples, s.runs), (1, 1));
        assert!(s.passed());
    }

    #[test]
    fn single_tuple_checks_five_corners() {
        let s = verify_corners(&[ChannelParams::new(2, 3, 1, 1)], 8, 3).unwrap();
        assert_eq!(s.runs, 5);
        assert!(s.passed(), "{:?}", s.failures);
    }
}
