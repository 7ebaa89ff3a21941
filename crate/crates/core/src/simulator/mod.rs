//! Bit-exact execution of a [`Scheme`] over `N + δ` channel uses.
//!
//! Encoders run forward: at use `t` every transmitter packs its layout from
//! its own messages and what it decoded at uses `t-2` and `t-1`, then the
//! relay and the sources run their plans on what they just received.
//! Destinations run afterwards, backwards from the last use to the first,
//! so a plan may consume anything decoded at a later use. Every decoded
//! value is checked against the value implied by the messages.

mod messages;
mod sweep;

pub use messages::MessageSet;
pub use sweep::{verify_corner_sweep, verify_corners, SweepFailure, SweepSummary};

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf2signal::{channel_step, BitVector, ChannelParams, NetworkInputs, NetworkOutputs};
use crate::rate_region::{rational_json, Rational, Regime};
use crate::schemes::{block_window, DPlacement, Kind, Part, Scheme, Signal, SlotRef, Step, Tx, User};

/// How many uses back an encoder may remember a decoded block.
const ENCODER_MEMORY: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UseRecord {
    pub index: usize,
    pub inputs: NetworkInputs,
    pub outputs: NetworkOutputs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Decoded {
        use_index: usize,
        node: usize,
        name: String,
        block: i64,
        ok: bool,
    },
    /// The received vector after a subtraction step.
    Residual {
        use_index: usize,
        node: usize,
        bits: BitVector,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Decoded {
                use_index,
                node,
                name,
                block,
                ok,
            } => {
                let verdict = if *ok { "ok" } else { "FAIL" };
                write!(f, "use={use_index} node={node} decode {name}({block}) {verdict}")
            }
            TraceEvent::Residual {
                use_index,
                node,
                bits,
            } => write!(f, "use={use_index} node={node} residual {bits}"),
        }
    }
}

/// Every transmitted and received vector plus the decoder events, in the
/// order they happened.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub uses: Vec<UseRecord>,
    pub events: Vec<TraceEvent>,
}

impl Trace {
    /// Channel lines per use, then decoder events in processing order.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for u in &self.uses {
            let i = u.index;
            out.push(format!("use={i} node=1 tx {}", u.inputs.x1));
            out.push(format!("use={i} node=2 tx {}", u.inputs.x2));
            out.push(format!("use={i} node=0 tx_r {}", u.inputs.xr));
            out.push(format!("use={i} node=0 tx_f {}", u.inputs.xf));
            for (node, y) in [
                &u.outputs.y0,
                &u.outputs.y1,
                &u.outputs.y2,
                &u.outputs.y3,
                &u.outputs.y4,
            ]
            .into_iter()
            .enumerate()
            {
                out.push(format!("use={i} node={node} rx {y}"));
            }
        }
        out.extend(self.events.iter().map(ToString::to_string));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeError {
    pub use_index: usize,
    pub node: usize,
    pub signal: String,
    pub block: i64,
    /// `false` when a wanted block was never decoded at all.
    pub decoded: bool,
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.decoded {
            write!(
                f,
                "use {} node {}: {} block {} decoded wrongly",
                self.use_index, self.node, self.signal, self.block
            )
        } else {
            write!(
                f,
                "node {}: {} block {} never decoded",
                self.node, self.signal, self.block
            )
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub params: ChannelParams,
    pub regime: Regime,
    pub placement: DPlacement,
    pub n_blocks: usize,
    pub delta: usize,
    pub seed: u64,
    pub target: (i64, i64),
    pub delivered_bits: [usize; 2],
    pub achieved: [Rational; 2],
    pub errors: Vec<DecodeError>,
    /// Feedback levels the layout occupies per use.
    pub feedback_levels: usize,
    /// Most feedback levels carrying an in-window block in any single use.
    pub feedback_levels_used: usize,
}

impl RunReport {
    pub fn is_error_free(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn total_uses(&self) -> usize {
        self.n_blocks + self.delta
    }

    pub fn to_json(&self) -> Value {
        json!({
            "params": self.params,
            "regime": self.regime,
            "placement": self.placement,
            "blocks": self.n_blocks,
            "delta": self.delta,
            "total_uses": self.total_uses(),
            "seed": self.seed,
            "target": [self.target.0, self.target.1],
            "delivered_bits": self.delivered_bits,
            "achieved": [rational_json(self.achieved[0]), rational_json(self.achieved[1])],
            "error_count": self.errors.len(),
            "errors": self.errors,
            "feedback_levels": self.feedback_levels,
            "feedback_levels_used": self.feedback_levels_used,
        })
    }
}

/// Decoded blocks of one node, keyed by signal, part and absolute block.
#[derive(Default)]
struct Store {
    entries: HashMap<(Signal, Part, i64), (BitVector, usize)>,
}

struct Sim<'a> {
    scheme: &'a Scheme,
    msgs: MessageSet,
    n_blocks: usize,
    stores: [Store; 5],
    errors: Vec<DecodeError>,
    trace: Trace,
}

fn node_of(tx: Tx) -> usize {
    match tx {
        Tx::Source1 => 1,
        Tx::Source2 => 2,
        Tx::Relay | Tx::Feedback => 0,
    }
}

fn source_user(node: usize) -> Option<User> {
    match node {
        1 => Some(User::One),
        2 => Some(User::Two),
        _ => None,
    }
}

fn slot_name(signal: Signal, part: Part) -> String {
    let part = match part {
        Part::Whole => "",
        Part::Upper => "[1]",
        Part::Lower => "[2]",
    };
    format!("{signal}{part}")
}

impl Sim<'_> {
    fn in_window(&self, kind: Kind, b: i64) -> bool {
        let (lo, hi) = block_window(kind, self.n_blocks);
        lo <= b && b <= hi
    }

    fn stored(&self, node: usize, signal: Signal, part: Part, b: i64, now: usize) -> Option<BitVector> {
        let store = &self.stores[node];
        let fresh = |learned: usize| node > 2 || now - learned <= ENCODER_MEMORY;
        let get = |p: Part| {
            store
                .entries
                .get(&(signal, p, b))
                .filter(|(_, learned)| fresh(*learned))
                .map(|(v, _)| v.clone())
        };
        if let Some(v) = get(part) {
            return Some(v);
        }
        let upper = self.scheme.dims.upper_len(signal.kind());
        match part {
            Part::Whole => {
                let (hi, lo) = (get(Part::Upper)?, get(Part::Lower)?);
                Some(BitVector::concat(&[&hi, &lo]))
            }
            Part::Upper => get(Part::Whole).map(|w| w.slice(0, upper)),
            Part::Lower => get(Part::Whole).map(|w| w.slice(upper, w.len() - upper)),
        }
    }

    /// What `node` knows about `slot` at use `t`.
    fn lookup(&self, node: usize, slot: &SlotRef, t: usize) -> Result<BitVector> {
        let b = t as i64 + slot.offset;
        let len = self.scheme.part_len(slot);
        if len == 0 || !self.in_window(slot.signal.kind(), b) {
            return Ok(BitVector::zeros(len));
        }
        if let (Some(me), Signal::Own(_, u)) = (source_user(node), slot.signal) {
            if me == u {
                return Ok(self.msgs.truth(slot.signal, slot.part, b));
            }
        }
        self.stored(node, slot.signal, slot.part, b, t).ok_or_else(|| {
            Error::Scheme(format!(
                "node {node} needs {} block {b} at use {t} but does not know it",
                slot_name(slot.signal, slot.part)
            ))
        })
    }

    fn encode(&self, tx: Tx, t: usize) -> Result<BitVector> {
        let node = node_of(tx);
        self.scheme
            .layout(tx)
            .pack_with(|slot| self.lookup(node, slot, t))
    }

    /// Received index of the slot's first level, and how many of its levels
    /// clear the receiver's noise floor.
    fn locate(&self, node: usize, tx: Tx, slot: &SlotRef) -> Result<(usize, usize, usize)> {
        let gain = self.scheme.gain(node, tx).ok_or_else(|| {
            Error::Scheme(format!("node {node} does not hear {tx}"))
        })?;
        let Some((start, len)) = self.scheme.layout(tx).position_of(slot) else {
            if self.scheme.part_len(slot) == 0 {
                return Ok((0, 0, 0));
            }
            return Err(Error::Scheme(format!("{tx} carries no {slot}")));
        };
        let q = self.scheme.params.q();
        let visible = len.min(gain.saturating_sub(start));
        Ok((q - gain + start, visible, len))
    }

    fn record(&mut self, node: usize, t: usize, out: &SlotRef, value: BitVector) {
        let b = t as i64 + out.offset;
        let truth = self.msgs.truth(out.signal, out.part, b);
        let ok = truth == value;
        let name = slot_name(out.signal, out.part);
        if !ok {
            self.errors.push(DecodeError {
                use_index: t,
                node,
                signal: name.clone(),
                block: b,
                decoded: true,
            });
        }
        self.trace.events.push(TraceEvent::Decoded {
            use_index: t,
            node,
            name,
            block: b,
            ok,
        });
        self.stores[node]
            .entries
            .insert((out.signal, out.part, b), (value, t));
    }

    fn receive(&mut self, node: usize, t: usize, y: &BitVector) -> Result<()> {
        let mut residual = y.clone();
        let scheme = self.scheme;
        for step in scheme.plan(node) {
            match step {
                Step::Subtract { value, at } => {
                    let v = self.lookup(node, value, t)?;
                    let (start, visible, len) = self.locate(node, at.tx, &at.slot)?;
                    if v.len() != len {
                        return Err(Error::Scheme(format!(
                            "subtracting {value} ({} bits) at {} ({len} levels)",
                            v.len(),
                            at.slot
                        )));
                    }
                    if visible > 0 {
                        residual.xor_at(start, &v.slice(0, visible));
                    }
                    self.trace.events.push(TraceEvent::Residual {
                        use_index: t,
                        node,
                        bits: residual.clone(),
                    });
                }
                Step::Decode { out, at } => {
                    let (start, visible, len) = self.locate(node, at.tx, &at.slot)?;
                    let want = scheme.part_len(out);
                    if len != want {
                        return Err(Error::Scheme(format!(
                            "{out} has {want} bits but is read from {len} levels of {}",
                            at.slot
                        )));
                    }
                    if visible < len {
                        return Err(Error::Scheme(format!(
                            "node {node} reads {out} below its noise floor"
                        )));
                    }
                    let v = residual.slice(start, len);
                    self.record(node, t, out, v);
                }
                Step::Combine { out, inputs } => {
                    let mut acc = BitVector::zeros(0);
                    for input in inputs {
                        acc = acc.xor_padded(&self.lookup(node, input, t)?);
                    }
                    let v = acc.resized(scheme.part_len(out));
                    self.record(node, t, out, v);
                }
                Step::Mask { out, from, keep } => {
                    let src = self.lookup(node, from, t)?;
                    let bits = src
                        .bits()
                        .iter()
                        .enumerate()
                        .map(|(i, b)| *b && keep.0 <= i && i < keep.1)
                        .collect();
                    self.record(node, t, out, BitVector::from_bits(bits));
                }
            }
        }
        Ok(())
    }

    /// Checks every wanted block reached its destination and counts bits.
    fn deliveries(&mut self) -> [usize; 2] {
        let total = self.scheme.total_uses(self.n_blocks);
        let mut delivered = [0; 2];
        for me in User::BOTH {
            let node = 2 + me.index();
            for kind in Kind::ALL {
                let info = self.scheme.dims.info_len(kind, me);
                if info == 0 {
                    continue;
                }
                let (lo, hi) = block_window(kind, self.n_blocks);
                for b in lo..=hi {
                    let signal = Signal::Own(kind, me);
                    match self.stored(node, signal, Part::Whole, b, total) {
                        Some(v) if v == self.msgs.truth(signal, Part::Whole, b) => {
                            delivered[me.index() - 1] += info;
                        }
                        Some(_) => {}
                        None => self.errors.push(DecodeError {
                            use_index: 0,
                            node,
                            signal: signal.to_string(),
                            block: b,
                            decoded: false,
                        }),
                    }
                }
            }
        }
        delivered
    }

    fn feedback_levels_used(&self) -> usize {
        let layout = self.scheme.layout(Tx::Feedback);
        (1..=self.scheme.total_uses(self.n_blocks))
            .map(|t| {
                layout
                    .placements()
                    .iter()
                    .filter(|pl| self.in_window(pl.key.signal.kind(), t as i64 + pl.key.offset))
                    .map(|pl| pl.len)
                    .sum()
            })
            .max()
            .unwrap_or(0)
    }
}

/// Runs `scheme` over `n_blocks` blocks with messages drawn from `seed`.
///
/// Decode mismatches are collected in the report; a plan that reads a
/// block its node cannot know yet, or levels it cannot hear, is an error.
pub fn run(scheme: &Scheme, n_blocks: usize, seed: u64) -> Result<(Trace, RunReport)> {
    if n_blocks < 3 {
        return Err(Error::Parameter(format!(
            "need at least 3 blocks to reach steady state, got {n_blocks}"
        )));
    }
    let mut sim = Sim {
        scheme,
        msgs: MessageSet::generate(&scheme.dims, n_blocks, seed),
        n_blocks,
        stores: Default::default(),
        errors: Vec::new(),
        trace: Trace::default(),
    };
    let total = scheme.total_uses(n_blocks);
    for t in 1..=total {
        let inputs = NetworkInputs {
            x1: sim.encode(Tx::Source1, t)?,
            x2: sim.encode(Tx::Source2, t)?,
            xr: sim.encode(Tx::Relay, t)?,
            xf: sim.encode(Tx::Feedback, t)?,
        };
        let outputs = channel_step(&inputs, &scheme.params)?;
        sim.receive(0, t, &outputs.y0)?;
        sim.receive(1, t, &outputs.y1)?;
        sim.receive(2, t, &outputs.y2)?;
        sim.trace.uses.push(UseRecord {
            index: t,
            inputs,
            outputs,
        });
    }
    for t in (1..=total).rev() {
        let outputs = sim.trace.uses[t - 1].outputs.clone();
        sim.receive(3, t, &outputs.y3)?;
        sim.receive(4, t, &outputs.y4)?;
    }
    let delivered = sim.deliveries();
    let per_use = |bits: usize| Rational::new(bits as i64, total as i64);
    let report = RunReport {
        params: scheme.params,
        regime: scheme.regime(),
        placement: scheme.placement,
        n_blocks,
        delta: scheme.delta,
        seed,
        target: scheme.rates(),
        delivered_bits: delivered,
        achieved: [per_use(delivered[0]), per_use(delivered[1])],
        errors: std::mem::take(&mut sim.errors),
        feedback_levels: scheme.feedback_levels(),
        feedback_levels_used: sim.feedback_levels_used(),
    };
    Ok((sim.trace, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{allocate, build_scheme, RateAllocation};

    fn simulate(p: (usize, usize, usize, usize), r: (i64, i64), n: usize) -> RunReport {
        let p = ChannelParams::new(p.0, p.1, p.2, p.3);
        let s = build_scheme(&p, &allocate(&p, r).unwrap()).unwrap();
        run(&s, n, 11).unwrap().1
    }

    #[test]
    fn feedback_corner_is_error_free() {
        let r = simulate((2, 3, 1, 1), (2, 1), 16);
        assert!(r.is_error_free(), "{:?}", r.errors);
        assert_eq!(r.achieved, [Rational::new(32, 18), Rational::new(16, 18)]);
    }

    #[test]
    fn compute_forward_corner_is_error_free() {
        let r = simulate((6, 3, 1, 0), (1, 1), 16);
        assert!(r.is_error_free(), "{:?}", r.errors);
        assert_eq!(r.achieved, [Rational::new(16, 17), Rational::new(16, 17)]);
    }

    #[test]
    fn zero_allocation_delivers_nothing() {
        let p = ChannelParams::new(2, 3, 1, 1);
        let s = build_scheme(&p, &RateAllocation::zero(Regime::D)).unwrap();
        let (_, r) = run(&s, 5, 0).unwrap();
        assert!(r.is_error_free());
        assert_eq!(r.delivered_bits, [0, 0]);
    }

    #[test]
    fn short_runs_are_rejected() {
        let p = ChannelParams::new(1, 1, 1, 0);
        let s = build_scheme(&p, &allocate(&p, (1, 0)).unwrap()).unwrap();
        assert!(matches!(run(&s, 2, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn identical_seeds_give_identical_traces() {
        let p = ChannelParams::new(1, 3, 3, 1);
        let s = build_scheme(&p, &allocate(&p, (3, 1)).unwrap()).unwrap();
        let (a, _) = run(&s, 6, 5).unwrap();
        let (b, _) = run(&s, 6, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.lines().iter().any(|l| l.starts_with("use=7 node=3 decode")));
    }

    #[test]
    fn shared_d_stacking_reaches_the_outer_corner() {
        let r = simulate((3, 2, 2, 0), (0, 2), 8);
        assert_eq!(r.placement, DPlacement::Shared);
        assert!(r.is_error_free(), "{:?}", r.errors);
        assert_eq!(r.delivered_bits, [0, 16]);
    }
}
