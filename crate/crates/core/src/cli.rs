//! Command-line front end.
//!
//! Exit codes: 0 success, 1 infeasible target or failed verification,
//! 2 usage error. Flags are long-only so channel gains are never positional.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fourier_motzkin::{enumerate_integer_projection, natural_bound, parse_fixture, project_to_rates};
use crate::gf2signal::ChannelParams;
use crate::rate_region::{
    corner_points, lemma_region, outer_bound_region, rational_json, regime_of, regions_equal,
    sum_capacity, Rational,
};
use crate::schemes::{allocate, build_scheme, constraint_system, rate_definitions, Scheme};
use crate::simulator::run;

/// Header of the `sweep` CSV.
pub const SWEEP_HEADER: [&str; 9] = [
    "nc",
    "ns",
    "nr",
    "nf",
    "regime",
    "sum_capacity",
    "net_gain",
    "thm2_equal",
    "corners",
];

const SWEEP_CAP: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "ldbfn", version, about = "Capacity regions, coding schemes and zero-error simulation for the linear deterministic butterfly network with relay-source feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Gains {
    /// Cross-link gain, source j to the other pair's destination.
    #[arg(long, default_value_t = 0)]
    nc: usize,
    /// Source-to-relay gain.
    #[arg(long, default_value_t = 0)]
    ns: usize,
    /// Relay-to-destination gain.
    #[arg(long, default_value_t = 0)]
    nr: usize,
    /// Relay-to-source feedback gain.
    #[arg(long, default_value_t = 0)]
    nf: usize,
}

impl Gains {
    fn params(self) -> ChannelParams {
        ChannelParams::new(self.nc, self.ns, self.nr, self.nf)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Outer bound, achievable region, regime and their equality.
    Region {
        #[command(flatten)]
        gains: Gains,
    },
    /// Build the scheme for an integer rate pair and run it bit by bit.
    Simulate {
        #[command(flatten)]
        gains: Gains,
        #[arg(long)]
        r1: i64,
        #[arg(long)]
        r2: i64,
        #[arg(long, default_value_t = 64)]
        blocks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the channel and decoder trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Dump a scheme's layouts, schedule and decode plans as JSON.
    Scheme {
        #[command(flatten)]
        gains: Gains,
        #[arg(long)]
        r1: i64,
        #[arg(long)]
        r2: i64,
        #[arg(long, default_value_t = 64)]
        blocks: usize,
    },
    /// One CSV row per tuple of the lattice [0, max]^4.
    Sweep {
        #[arg(long, default_value_t = 2)]
        max: usize,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add a column comparing each projection with brute-force enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Sum capacity and net gain per feedback level for a range of n_f.
    Netgain {
        #[arg(long, default_value_t = 0)]
        nc: usize,
        #[arg(long, default_value_t = 0)]
        ns: usize,
        #[arg(long, default_value_t = 0)]
        nr: usize,
        /// Inclusive range such as `0..4` or a single value.
        #[arg(long = "nf-range", default_value = "0..3")]
        nf_range: String,
    },
    /// Project a fixture system and compare with brute-force enumeration.
    FmCheck {
        #[arg(long)]
        system: PathBuf,
        /// Largest value tried per component; the largest right-hand side by default.
        #[arg(long = "oracle-bound")]
        oracle_bound: Option<i64>,
        #[arg(long)]
        nc: Option<usize>,
        #[arg(long)]
        ns: Option<usize>,
        #[arg(long)]
        nr: Option<usize>,
        #[arg(long)]
        nf: Option<usize>,
    },
}

/// One line of the `netgain` table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetGainRow {
    pub nf: usize,
    pub sum_capacity: Rational,
    /// Feedback levels the sum-capacity scheme occupies per use.
    pub rf: usize,
    /// `None` when `n_f = 0`.
    pub eta: Option<Rational>,
}

/// Builds the scheme for the most balanced corner on the dominant face.
pub fn sum_capacity_scheme(p: &ChannelParams) -> Result<Scheme> {
    let region = outer_bound_region(p);
    let best = sum_capacity(&region);
    let corner = corner_points(&region)
        .into_iter()
        .filter(|c| c.sum() == best)
        .min_by_key(|c| (if c.r1 > c.r2 { c.r1 - c.r2 } else { c.r2 - c.r1 }, c.r2))
        .and_then(|c| c.as_integers())
        .ok_or_else(|| Error::Structural(format!("no integer sum-capacity corner at {p}")))?;
    build_scheme(p, &allocate(p, corner)?)
}

/// Net gain using the scheme's actual feedback usage as `r_f`. With `n_f > 0`
/// and no feedback level in use, nothing was gained and `η = 0`.
pub fn net_gain_row(baseline: &ChannelParams, nf: usize) -> Result<NetGainRow> {
    let p = baseline.with_nf(nf);
    let capacity = sum_capacity(&outer_bound_region(&p));
    let base = sum_capacity(&outer_bound_region(&baseline.with_nf(0)));
    let rf = sum_capacity_scheme(&p)?.feedback_levels();
    let eta = match (nf, rf) {
        (0, _) => None,
        (_, 0) => {
            if capacity != base {
                return Err(Error::Scheme(format!(
                    "{p} gains {} without using feedback",
                    capacity - base
                )));
            }
            Some(Rational::from(0))
        }
        (_, rf) => Some(crate::rate_region::net_gain(baseline, nf, Rational::from(rf as i64))?),
    };
    Ok(NetGainRow {
        nf,
        sum_capacity: capacity,
        rf,
        eta,
    })
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parameter(format!("bad range {s:?}, expected `a..b` or `a`"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim_start_matches('=').trim()),
        None => (s.trim(), s.trim()),
    };
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn ratio_text(r: Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        r.to_string()
    }
}

fn corners_text(p: &ChannelParams) -> String {
    corner_points(&outer_bound_region(p))
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

/// Achievable region equals the outer bound, both as the closed-form region and
/// as the projection of the scheme constraints.
pub fn achievable_equals_outer(p: &ChannelParams) -> Result<bool> {
    let outer = outer_bound_region(p);
    let regime = regime_of(p);
    let (r1, r2) = rate_definitions(regime);
    let projected = project_to_rates(&constraint_system(regime, p)?, &r1, &r2)?;
    Ok(regions_equal(&lemma_region(p), &outer) && regions_equal(&projected, &outer))
}

/// Integer points of the projected region equal the enumerated ones.
pub fn oracle_agrees(p: &ChannelParams) -> Result<bool> {
    let regime = regime_of(p);
    let (r1, r2) = rate_definitions(regime);
    let system = constraint_system(regime, p)?;
    let projected = project_to_rates(&system, &r1, &r2)?;
    let enumerated = enumerate_integer_projection(&system, &r1, &r2, natural_bound(&system))?;
    Ok(projected.integer_points().into_iter().collect::<std::collections::BTreeSet<_>>() == enumerated)
}

struct Outcome {
    ok: bool,
}

fn cmd_region(gains: Gains, out: &mut dyn Write) -> Result<Outcome> {
    let p = gains.params();
    let outer = outer_bound_region(&p);
    let lemma = lemma_region(&p);
    let equal = regions_equal(&outer, &lemma);
    let report = json!({
        "params": p,
        "regime": regime_of(&p),
        "outer_bound": outer.to_json(),
        "achievable": lemma.to_json(),
        "sum_capacity": rational_json(sum_capacity(&outer)),
        "equal": equal,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(Outcome { ok: equal })
}

fn cmd_simulate(
    gains: Gains,
    target: (i64, i64),
    blocks: usize,
    seed: u64,
    trace: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Outcome> {
    let p = gains.params();
    let scheme = build_scheme(&p, &allocate(&p, target)?)?;
    let (t, report) = run(&scheme, blocks, seed)?;
    if let Some(path) = trace {
        let mut text = t.lines().join("\n");
        text.push('\n');
        std::fs::write(path, text)?;
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&report.to_json())?)?;
    for e in &report.errors {
        writeln!(err, "decode error: {e}")?;
    }
    Ok(Outcome {
        ok: report.is_error_free(),
    })
}

fn cmd_scheme(gains: Gains, target: (i64, i64), blocks: usize, out: &mut dyn Write) -> Result<Outcome> {
    let p = gains.params();
    let scheme = build_scheme(&p, &allocate(&p, target)?)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&scheme.to_json(blocks))?)?;
    Ok(Outcome { ok: true })
}

fn cmd_sweep(max: usize, path: Option<PathBuf>, oracle: bool, out: &mut dyn Write) -> Result<Outcome> {
    if max > SWEEP_CAP {
        return Err(Error::Parameter(format!("--max is capped at {SWEEP_CAP}, got {max}")));
    }
    let params: Vec<ChannelParams> = ChannelParams::lattice(max).collect();
    let rows: Vec<Result<(Vec<String>, bool)>> = {
        use rayon::prelude::*;
        params
            .par_iter()
            .map(|p| {
                let equal = achievable_equals_outer(p)?;
                let gain = net_gain_row(p, p.nf)?;
                let mut row = vec![
                    p.nc.to_string(),
                    p.ns.to_string(),
                    p.nr.to_string(),
                    p.nf.to_string(),
                    regime_of(p).to_string(),
                    ratio_text(gain.sum_capacity),
                    gain.eta.map_or("-".to_string(), ratio_text),
                    equal.to_string(),
                    corners_text(p),
                ];
                let mut ok = equal;
                if oracle {
                    let agrees = oracle_agrees(p)?;
                    row.push(agrees.to_string());
                    ok &= agrees;
                }
                Ok((row, ok))
            })
            .collect()
    };
    let sink: Box<dyn Write + '_> = match &path {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(out),
    };
    let mut writer = csv::Writer::from_writer(sink);
    let mut header: Vec<&str> = SWEEP_HEADER.to_vec();
    if oracle {
        header.push("fm_oracle_equal");
    }
    writer.write_record(&header)?;
    let mut ok = true;
    for row in rows {
        let (row, row_ok) = row?;
        ok &= row_ok;
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(Outcome { ok })
}

fn cmd_netgain(nc: usize, ns: usize, nr: usize, range: &str, out: &mut dyn Write) -> Result<Outcome> {
    let (lo, hi) = parse_range(range)?;
    let baseline = ChannelParams::new(nc, ns, nr, 0);
    writeln!(out, "{:>4} {:>8} {:>4} {:>6}", "n_f", "C", "r_f", "eta")?;
    for nf in lo..=hi {
        let row = net_gain_row(&baseline, nf)?;
        writeln!(
            out,
            "{:>4} {:>8} {:>4} {:>6}",
            row.nf,
            ratio_text(row.sum_capacity),
            row.rf,
            row.eta.map_or("-".to_string(), ratio_text)
        )?;
    }
    Ok(Outcome { ok: true })
}

fn cmd_fm_check(
    path: PathBuf,
    bound: Option<i64>,
    overrides: [Option<usize>; 4],
    out: &mut dyn Write,
) -> Result<Outcome> {
    let text = std::fs::read_to_string(&path)?;
    let fixture = parse_fixture(&text, overrides)?;
    let bound = bound.unwrap_or_else(|| natural_bound(&fixture.system));
    let enumerated =
        enumerate_integer_projection(&fixture.system, &fixture.r1, &fixture.r2, bound)?;
    let (projected, points) = match project_to_rates(&fixture.system, &fixture.r1, &fixture.r2) {
        Ok(region) => {
            let points = region.integer_points();
            (region.to_string(), points)
        }
        Err(Error::Infeasible(why)) => (format!("empty ({why})"), Vec::new()),
        Err(e) => return Err(e),
    };
    let equal = points.iter().copied().collect::<std::collections::BTreeSet<_>>() == enumerated;
    writeln!(out, "params     {}", fixture.params)?;
    writeln!(out, "projection {projected}")?;
    writeln!(out, "fm points  {points:?}")?;
    writeln!(out, "enumerated {:?}", enumerated.iter().collect::<Vec<_>>())?;
    writeln!(out, "verdict    {}", if equal { "equal" } else { "unequal" })?;
    Ok(Outcome { ok: equal })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Region { gains } => cmd_region(gains, out),
        Command::Simulate {
            gains,
            r1,
            r2,
            blocks,
            seed,
            trace,
        } => cmd_simulate(gains, (r1, r2), blocks, seed, trace, out, err),
        Command::Scheme {
            gains,
            r1,
            r2,
            blocks,
        } => cmd_scheme(gains, (r1, r2), blocks, out),
        Command::Sweep { max, out: path, oracle } => cmd_sweep(max, path, oracle, out),
        Command::Netgain { nc, ns, nr, nf_range } => cmd_netgain(nc, ns, nr, &nf_range, out),
        Command::FmCheck {
            system,
            oracle_bound,
            nc,
            ns,
            nr,
            nf,
        } => cmd_fm_check(system, oracle_bound, [nc, ns, nr, nf], out),
    };
    match result {
        Ok(Outcome { ok: true }) => 0,
        Ok(Outcome { ok: false }) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Parameter(_) | Error::Parse { .. } => 2,
                _ => 1,
            }
        }
    }
}
