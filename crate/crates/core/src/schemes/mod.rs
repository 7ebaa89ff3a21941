//! Capacity-achieving coding schemes, one per regime.
//!
//! A [`Scheme`] is pure data: four [`SignalLayout`]s saying which block sits
//! on which level of each transmitted vector, and per-node decode plans
//! saying which received levels to read, subtract or combine. The same plan
//! runs at every channel use; block indices are relative to the use.
//!
//! Nodes are numbered 0 (relay), 1 and 2 (sources), 3 and 4 (destinations).
//! Destination 3 hears source 2 and wants user 1's message; destination 4
//! mirrors it.

mod layouts;
mod signals;
mod systems;

pub use signals::{block_window, Dims, Kind, Part, Signal, SlotRef, User};
pub use systems::{
    allocate, allocate_in, constraint_system, constraint_system_unchecked, rate_definitions,
    placement_systems, regime_vars, DPlacement, RateAllocation,
};

use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf2signal::{ChannelParams, SignalLayout};
use crate::rate_region::Regime;

/// A transmitted signal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Tx {
    Source1,
    Source2,
    Relay,
    Feedback,
}

impl Tx {
    pub const ALL: [Tx; 4] = [Tx::Source1, Tx::Source2, Tx::Relay, Tx::Feedback];

    fn index(self) -> usize {
        match self {
            Tx::Source1 => 0,
            Tx::Source2 => 1,
            Tx::Relay => 2,
            Tx::Feedback => 3,
        }
    }
}

impl fmt::Display for Tx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tx::Source1 => "x1",
            Tx::Source2 => "x2",
            Tx::Relay => "xr",
            Tx::Feedback => "xf",
        })
    }
}

/// The received levels where `slot` of transmitter `tx` lands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Locator {
    pub tx: Tx,
    pub slot: SlotRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    /// XOR a known value onto the residual. Levels below the receiver's
    /// noise floor are skipped.
    Subtract { value: SlotRef, at: Locator },
    /// Read the residual; every level must be above the noise floor.
    Decode { out: SlotRef, at: Locator },
    /// XOR of the inputs, zero padded, then cut to the output length.
    Combine { out: SlotRef, inputs: Vec<SlotRef> },
    /// Copy of `from` with every level outside `keep` zeroed.
    Mask {
        out: SlotRef,
        from: SlotRef,
        keep: (usize, usize),
    },
}

impl Step {
    pub fn output(&self) -> Option<SlotRef> {
        match self {
            Step::Subtract { .. } => None,
            Step::Decode { out, .. } | Step::Combine { out, .. } | Step::Mask { out, .. } => {
                Some(*out)
            }
        }
    }
}

/// The simple strategies a scheme composes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Strategy {
    DecodeForward,
    ComputeForward,
    Neutralize,
    FeedbackSymmetric,
    FeedbackAsymmetric,
}

#[derive(Clone, Debug, Serialize)]
pub struct Scheme {
    pub params: ChannelParams,
    pub allocation: RateAllocation,
    pub dims: Dims,
    pub placement: DPlacement,
    layouts: [SignalLayout<SlotRef>; 4],
    plans: [Vec<Step>; 5],
    pub delta: usize,
}

pub fn build_scheme(params: &ChannelParams, alloc: &RateAllocation) -> Result<Scheme> {
    let Some(placement) = alloc.placement(params) else {
        return Err(Error::Scheme(format!(
            "allocation {:?} violates the regime {} constraints at {params}",
            alloc.values, alloc.regime
        )));
    };
    let dims = Dims::from_allocation(alloc);
    let built = layouts::build(alloc.regime, params, &dims, placement)?;
    Ok(Scheme {
        params: *params,
        allocation: alloc.clone(),
        dims,
        placement,
        layouts: built.layouts,
        plans: built.plans,
        delta: 1,
    }
    .with_derived_delta())
}

impl Scheme {
    /// Extra uses past the last block: the latest any layout sends a block,
    /// and at least one for the relay to forward.
    fn with_derived_delta(mut self) -> Self {
        let late = self
            .layouts
            .iter()
            .flat_map(|l| l.placements())
            .map(|pl| -pl.key.offset)
            .max()
            .unwrap_or(0);
        self.delta = late.max(1) as usize;
        self
    }

    pub fn regime(&self) -> Regime {
        self.allocation.regime
    }

    pub fn layout(&self, tx: Tx) -> &SignalLayout<SlotRef> {
        &self.layouts[tx.index()]
    }

    /// Decode plan of node 0..=4.
    pub fn plan(&self, node: usize) -> &[Step] {
        &self.plans[node]
    }

    pub fn rates(&self) -> (i64, i64) {
        self.allocation.rates()
    }

    pub fn total_uses(&self, n_blocks: usize) -> usize {
        n_blocks + self.delta
    }

    /// Receiver gain of `node` for transmitter `tx`, if it hears it at all.
    pub fn gain(&self, node: usize, tx: Tx) -> Option<usize> {
        let p = &self.params;
        match (node, tx) {
            (0, Tx::Source1 | Tx::Source2) => Some(p.ns),
            (1 | 2, Tx::Feedback) => Some(p.nf),
            (3, Tx::Source2) | (4, Tx::Source1) => Some(p.nc),
            (3 | 4, Tx::Relay) => Some(p.nr),
            _ => None,
        }
    }

    pub fn part_len(&self, slot: &SlotRef) -> usize {
        self.dims.part_len(slot.signal, slot.part)
    }

    /// Uses `1..=N+delta` in which `tx` carries at least one in-window block.
    pub fn active_uses(&self, tx: Tx, n_blocks: usize) -> Vec<usize> {
        let layout = self.layout(tx);
        (1..=self.total_uses(n_blocks))
            .filter(|&t| {
                layout.placements().iter().any(|pl| {
                    let (lo, hi) = block_window(pl.key.signal.kind(), n_blocks);
                    let b = t as i64 + pl.key.offset;
                    lo <= b && b <= hi
                })
            })
            .collect()
    }

    /// Feedback levels occupied per use.
    pub fn feedback_levels(&self) -> usize {
        self.layout(Tx::Feedback).occupied_depth()
    }

    /// Label of every level of `tx`, top first: `"0"` for padding, slot
    /// labels such as `u1n(i+1)` otherwise, joined by `+` where they overlap.
    pub fn level_map(&self, tx: Tx) -> Vec<String> {
        let layout = self.layout(tx);
        let mut labels: Vec<Vec<String>> = vec![Vec::new(); layout.q()];
        for pl in layout.placements() {
            for (k, level) in labels[pl.start..pl.start + pl.len].iter_mut().enumerate() {
                let name = if pl.len == 1 {
                    pl.key.label()
                } else {
                    format!("{}#{}", pl.key.label(), k + 1)
                };
                level.push(name);
            }
        }
        labels
            .into_iter()
            .map(|l| if l.is_empty() { "0".to_string() } else { l.join("+") })
            .collect()
    }

    pub fn strategies(&self) -> Vec<Strategy> {
        let d = &self.dims;
        let mut out = Vec::new();
        if d.d_total() + d.dbar_total() > 0 {
            out.push(Strategy::DecodeForward);
        }
        if d.c > 0 {
            out.push(Strategy::ComputeForward);
        }
        if d.n > 0 {
            out.push(Strategy::Neutralize);
        }
        if d.fbar > 0 {
            out.push(Strategy::FeedbackSymmetric);
        }
        if d.f[0] + d.f[1] > 0 {
            out.push(Strategy::FeedbackAsymmetric);
        }
        out
    }

    /// Layouts, schedule windows and decode plans as JSON.
    pub fn to_json(&self, n_blocks: usize) -> Value {
        let layouts: serde_json::Map<String, Value> = Tx::ALL
            .iter()
            .map(|tx| {
                (
                    tx.to_string(),
                    json!({
                        "levels": self.level_map(*tx),
                        "blocks": self.layout(*tx).blocks(),
                        "active_uses": self.active_uses(*tx, n_blocks),
                    }),
                )
            })
            .collect();
        json!({
            "params": self.params,
            "regime": self.regime(),
            "allocation": self.allocation.values,
            "rates": [self.rates().0, self.rates().1],
            "blocks": n_blocks,
            "delta": self.delta,
            "total_uses": self.total_uses(n_blocks),
            "strategies": self.strategies(),
            "layouts": layouts,
            "plans": {
                "relay": self.plans[0],
                "source1": self.plans[1],
                "source2": self.plans[2],
                "destination3": self.plans[3],
                "destination4": self.plans[4],
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_region::{corner_points, lemma_region};

    fn scheme(p: ChannelParams, r: (i64, i64)) -> Scheme {
        build_scheme(&p, &allocate(&p, r).unwrap()).unwrap()
    }

    #[test]
    fn durations() {
        let a = scheme(ChannelParams::new(2, 1, 3, 0), (1, 1));
        assert_eq!(a.delta, 1);
        assert_eq!(a.active_uses(Tx::Relay, 4), vec![2, 3, 4, 5]);
        assert_eq!(a.active_uses(Tx::Source1, 4), vec![1, 2, 3, 4]);
        let d = scheme(ChannelParams::new(2, 3, 1, 1), (2, 1));
        assert_eq!(d.total_uses(16), 18);
        let c = scheme(ChannelParams::new(6, 3, 1, 1), (2, 2));
        assert_eq!(c.total_uses(16), 18);
        assert_eq!(c.feedback_levels(), 1);
    }

    #[test]
    fn zero_allocation_sends_nothing() {
        let p = ChannelParams::new(2, 3, 1, 1);
        let s = build_scheme(&p, &RateAllocation::zero(Regime::D)).unwrap();
        for tx in Tx::ALL {
            assert!(s.layout(tx).placements().is_empty());
            assert!(s.active_uses(tx, 8).is_empty());
        }
    }

    #[test]
    fn infeasible_allocation_is_rejected() {
        let p = ChannelParams::new(2, 3, 1, 1);
        let a = RateAllocation::from_pairs(Regime::D, &[("R1d", 2)]).unwrap();
        assert!(matches!(build_scheme(&p, &a), Err(Error::Scheme(_))));
    }

    #[test]
    fn every_corner_builds_with_consistent_accounting() {
        for p in ChannelParams::lattice(4) {
            for c in corner_points(&lemma_region(&p)) {
                let (r1, r2) = c.as_integers().unwrap();
                let s = scheme(p, (r1, r2));
                assert_eq!(s.rates(), (r1, r2));
                for tx in Tx::ALL {
                    assert_eq!(s.layout(tx).q(), p.q());
                }
                assert!(s.layout(Tx::Relay).occupied_depth() <= p.nr, "{p}");
                assert!(s.feedback_levels() <= p.nf, "{p}");
            }
        }
    }

    #[test]
    fn level_map_of_neutralization() {
        let p = ChannelParams::new(1, 2, 1, 0);
        let a = RateAllocation::from_pairs(Regime::B, &[("Rn", 1)]).unwrap();
        let s = build_scheme(&p, &a).unwrap();
        assert_eq!(s.level_map(Tx::Source1), ["u1n(i)", "u1n(i+1)"]);
        assert_eq!(s.level_map(Tx::Relay), ["nsum(i)", "0"]);
        assert_eq!(s.strategies(), vec![Strategy::Neutralize]);
    }
}
