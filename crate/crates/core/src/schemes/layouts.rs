//! Per-regime stacking of every transmitter and the matching decode plans.

use super::signals::{Dims, Kind, Part, SlotRef, User};
use super::systems::DPlacement;
use super::{Locator, Step, Tx};
use crate::error::{Error, Result};
use crate::gf2signal::{Block, ChannelParams, SignalLayout};
use crate::rate_region::Regime;

pub(crate) struct Built {
    pub layouts: [SignalLayout<SlotRef>; 4],
    /// Relay, source 1, source 2, destination 3, destination 4.
    pub plans: [Vec<Step>; 5],
}

fn sub(a: usize, b: usize, what: &str) -> Result<usize> {
    a.checked_sub(b)
        .ok_or_else(|| Error::Layout(format!("{what}: {b} levels requested, {a} available")))
}

fn seg(key: SlotRef, len: usize) -> Block<SlotRef> {
    Block::Segment { key, len }
}

fn own(k: Kind, u: User, off: i64) -> SlotRef {
    SlotRef::own(k, u, off)
}

fn own_part(k: Kind, u: User, part: Part, off: i64) -> SlotRef {
    SlotRef::own(k, u, off).with_part(part)
}

fn sum(k: Kind, off: i64) -> SlotRef {
    SlotRef::sum(k, off)
}

fn sum_part(k: Kind, part: Part, off: i64) -> SlotRef {
    SlotRef::sum(k, off).with_part(part)
}

fn source_tx(u: User) -> Tx {
    match u {
        User::One => Tx::Source1,
        User::Two => Tx::Source2,
    }
}

fn at(tx: Tx, slot: SlotRef) -> Locator {
    Locator { tx, slot }
}

fn decode(out: SlotRef, tx: Tx, slot: SlotRef) -> Step {
    Step::Decode {
        out,
        at: at(tx, slot),
    }
}

/// Decode a relay or feedback block at the position it is sent from.
fn decode_same(out: SlotRef, tx: Tx) -> Step {
    decode(out, tx, out)
}

fn subtract(value: SlotRef, tx: Tx, slot: SlotRef) -> Step {
    Step::Subtract {
        value,
        at: at(tx, slot),
    }
}

/// Both users' D-type blocks recovered from their decoded sum.
fn unpad(kind: Kind, offset: i64, dims: &Dims) -> Vec<Step> {
    User::BOTH
        .iter()
        .map(|&u| Step::Mask {
            out: own(kind, u, offset),
            from: sum(kind, offset),
            keep: dims.info_range(kind, u),
        })
        .collect()
}

/// The partner's F-type blocks extracted from the feedback signal.
fn extract_partner(me: User, kinds: &[Kind]) -> Vec<Step> {
    kinds
        .iter()
        .map(|&k| Step::Combine {
            out: own(k, me.partner(), -1),
            inputs: vec![sum(k, -1), own(k, me, -1)],
        })
        .collect()
}

pub(crate) fn build(
    regime: Regime,
    p: &ChannelParams,
    dims: &Dims,
    placement: DPlacement,
) -> Result<Built> {
    match regime {
        Regime::A => regime_a(p, dims),
        Regime::B => regime_b(p, dims),
        Regime::C => regime_c(p, dims, placement),
        Regime::D => regime_d(p, dims),
    }
}

fn silent(q: usize) -> Result<SignalLayout<SlotRef>> {
    SignalLayout::new(vec![Block::Zeros(q)], q)
}

/// Compute-forward with a split C sum plus padded decode-forward.
fn regime_a(p: &ChannelParams, d: &Dims) -> Result<Built> {
    let q = p.q();
    let (c1, c2, dt) = (d.c_upper, d.c - d.c_upper, d.d_total());
    let source = |u: User| -> Result<SignalLayout<SlotRef>> {
        SignalLayout::new(
            vec![
                seg(own_part(Kind::C, u, Part::Upper, 0), c1),
                seg(own_part(Kind::C, u, Part::Lower, 0), c2),
                seg(own(Kind::D, u, 0), dt),
                Block::Zeros(sub(p.nc, d.c + dt, "source levels")?),
                Block::Zeros(q - p.nc),
            ],
            q,
        )
    };
    let relay = SignalLayout::new(
        vec![
            Block::Zeros(sub(sub(p.nr, p.nc, "relay headroom")?, c1, "upper C sum")?),
            seg(sum_part(Kind::C, Part::Upper, -1), c1),
            Block::Zeros(d.c),
            seg(sum(Kind::D, -1), dt),
            seg(sum_part(Kind::C, Part::Lower, -1), c2),
            Block::Zeros(sub(p.nc, c1 + 2 * c2 + dt, "lower C sum")?),
            Block::Zeros(q - p.nr),
        ],
        q,
    )?;
    let relay_plan = vec![
        decode(
            sum_part(Kind::C, Part::Upper, 0),
            Tx::Source1,
            own_part(Kind::C, User::One, Part::Upper, 0),
        ),
        decode(
            sum_part(Kind::C, Part::Lower, 0),
            Tx::Source1,
            own_part(Kind::C, User::One, Part::Lower, 0),
        ),
        decode(sum(Kind::D, 0), Tx::Source1, own(Kind::D, User::One, 0)),
    ];
    let dest = |me: User| -> Vec<Step> {
        let other = me.partner();
        let tx = source_tx(other);
        let mut steps = vec![
            subtract(own(Kind::D, other, 0), tx, own(Kind::D, other, 0)),
            decode_same(sum(Kind::D, -1), Tx::Relay),
            decode_same(sum_part(Kind::C, Part::Upper, -1), Tx::Relay),
            decode_same(sum_part(Kind::C, Part::Lower, -1), Tx::Relay),
            decode_same(own_part(Kind::C, other, Part::Upper, 0), tx),
            decode_same(own_part(Kind::C, other, Part::Lower, 0), tx),
            Step::Combine {
                out: own(Kind::C, me, 0),
                inputs: vec![sum(Kind::C, 0), own(Kind::C, other, 0)],
            },
        ];
        steps.extend(unpad(Kind::D, -1, d));
        steps
    };
    Ok(Built {
        layouts: [source(User::One)?, source(User::Two)?, relay, silent(q)?],
        plans: [relay_plan, vec![], vec![], dest(User::One), dest(User::Two)],
    })
}

/// Neutralization, compute-forward and decode-forward, with the relay-only
/// levels shared by the future N block and the D-bar block.
fn regime_b(p: &ChannelParams, d: &Dims) -> Result<Built> {
    let q = p.q();
    let (dt, db) = (d.d_total(), d.dbar_total());
    let window = sub(p.ns, p.nc, "relay-only window")?;
    let source = |u: User| -> Result<SignalLayout<SlotRef>> {
        SignalLayout::new(
            vec![
                Block::Zeros(sub(p.nc, d.c + dt + d.n, "source levels")?),
                seg(own(Kind::C, u, 0), d.c),
                seg(own(Kind::D, u, 0), dt),
                Block::Overlay {
                    len: window,
                    layers: vec![
                        vec![
                            seg(own(Kind::N, u, 0), d.n),
                            Block::Zeros(sub(window, d.n, "present N block")?),
                        ],
                        vec![
                            Block::Zeros(sub(window, db, "D-bar block")?),
                            seg(own(Kind::DBar, u, 0), db),
                        ],
                    ],
                },
                seg(own(Kind::N, u, 1), d.n),
                Block::Zeros(q - p.ns),
            ],
            q,
        )
    };
    let relay = SignalLayout::new(
        vec![
            Block::Zeros(sub(p.nr, db + 2 * d.c + dt + d.n, "relay levels")?),
            seg(sum(Kind::DBar, -1), db),
            seg(sum(Kind::C, -1), d.c),
            Block::Zeros(d.c),
            seg(sum(Kind::D, -1), dt),
            seg(sum(Kind::N, 0), d.n),
            Block::Zeros(q - p.nr),
        ],
        q,
    )?;
    let relay_plan = vec![
        subtract(sum(Kind::N, 0), Tx::Source1, own(Kind::N, User::One, 0)),
        decode(sum(Kind::C, 0), Tx::Source1, own(Kind::C, User::One, 0)),
        decode(sum(Kind::D, 0), Tx::Source1, own(Kind::D, User::One, 0)),
        decode(sum(Kind::DBar, 0), Tx::Source1, own(Kind::DBar, User::One, 0)),
        decode(sum(Kind::N, 1), Tx::Source1, own(Kind::N, User::One, 1)),
    ];
    let dest = |me: User| -> Vec<Step> {
        let other = me.partner();
        let tx = source_tx(other);
        let mut steps = vec![
            subtract(own(Kind::D, other, 0), tx, own(Kind::D, other, 0)),
            subtract(own(Kind::DBar, other, 0), tx, own(Kind::DBar, other, 0)),
            decode_same(sum(Kind::D, -1), Tx::Relay),
            decode_same(sum(Kind::DBar, -1), Tx::Relay),
            decode_same(sum(Kind::C, -1), Tx::Relay),
            decode_same(own(Kind::C, other, 0), tx),
            decode(own(Kind::N, me, 0), tx, own(Kind::N, other, 0)),
            Step::Combine {
                out: own(Kind::C, me, 0),
                inputs: vec![sum(Kind::C, 0), own(Kind::C, other, 0)],
            },
        ];
        steps.extend(unpad(Kind::D, -1, d));
        steps.extend(unpad(Kind::DBar, -1, d));
        steps
    };
    Ok(Built {
        layouts: [source(User::One)?, source(User::Two)?, relay, silent(q)?],
        plans: [relay_plan, vec![], vec![], dest(User::One), dest(User::Two)],
    })
}

/// The F slot pair: user 1's block first, each user sending its own block
/// now and its partner's block from two uses ago.
fn f_pair(me: User, d: &Dims) -> Vec<Block<SlotRef>> {
    User::BOTH
        .iter()
        .map(|&u| {
            let off = if u == me { 0 } else { -2 };
            seg(own(Kind::F, u, off), d.f[u.index() - 1])
        })
        .collect()
}

fn feedback_relay_steps(parts: &[Part]) -> Vec<Step> {
    let mut steps = vec![
        subtract(own(Kind::F, User::One, -2), Tx::Source2, own(Kind::F, User::One, -2)),
        subtract(own(Kind::F, User::Two, -2), Tx::Source1, own(Kind::F, User::Two, -2)),
        decode_same(own(Kind::F, User::One, 0), Tx::Source1),
        decode_same(own(Kind::F, User::Two, 0), Tx::Source2),
    ];
    for &part in parts {
        steps.push(decode(
            sum_part(Kind::FBar, part, 0),
            Tx::Source1,
            own_part(Kind::FBar, User::One, part, 0),
        ));
    }
    steps
}

fn fsum_step() -> Step {
    Step::Combine {
        out: sum(Kind::F, 0),
        inputs: vec![own(Kind::F, User::One, 0), own(Kind::F, User::Two, 0)],
    }
}

fn source_feedback_plan(me: User, parts: &[Part]) -> Vec<Step> {
    let mut steps = vec![decode_same(sum(Kind::F, -1), Tx::Feedback)];
    for &part in parts {
        steps.push(decode_same(sum_part(Kind::FBar, part, -1), Tx::Feedback));
    }
    steps.extend(extract_partner(me, &[Kind::F, Kind::FBar]));
    steps
}

/// Compute-forward and decode-forward through the relay plus both F
/// strategies over the feedback link.
fn regime_c(p: &ChannelParams, d: &Dims, placement: DPlacement) -> Result<Built> {
    let q = p.q();
    let dt = d.d_total();
    let used = d.c + dt + d.f[0] + d.f[1] + 2 * d.fbar;
    let shared = placement == DPlacement::Shared;
    if shared {
        sub(p.ns, used, "relay-visible levels")?;
        // The relay's D sum may reach only into the partner's D block.
        sub(p.nc, d.c + used, "cross-link levels")?;
    } else {
        sub(p.ns, used - d.fbar, "relay-visible levels")?;
        sub(p.nc, d.c + dt + used, "cross-link levels")?;
    }
    let source = |u: User| -> Result<SignalLayout<SlotRef>> {
        let mut blocks = vec![seg(own(Kind::C, u, 0), d.c)];
        if !shared {
            blocks.push(seg(own(Kind::D, u, 0), dt));
        }
        blocks.extend(f_pair(u, d));
        blocks.push(seg(own(Kind::FBar, u, 0), d.fbar));
        blocks.push(seg(own(Kind::FBar, u.partner(), -2), d.fbar));
        if shared {
            blocks.push(seg(own(Kind::D, u, 0), dt));
        }
        blocks.push(Block::Zeros(sub(q, used, "source levels")?));
        SignalLayout::new(blocks, q)
    };
    let relay = SignalLayout::new(
        vec![
            Block::Zeros(sub(p.nr, d.c + dt, "relay levels")?),
            seg(sum(Kind::D, -1), dt),
            seg(sum(Kind::C, -1), d.c),
            Block::Zeros(q - p.nr),
        ],
        q,
    )?;
    let feedback = SignalLayout::new(
        vec![
            seg(sum(Kind::F, -1), d.f_max()),
            seg(sum(Kind::FBar, -1), d.fbar),
            Block::Zeros(sub(q, d.f_max() + d.fbar, "feedback levels")?),
        ],
        q,
    )?;
    let mut relay_plan = feedback_relay_steps(&[Part::Whole]);
    relay_plan.extend([
        decode(sum(Kind::C, 0), Tx::Source1, own(Kind::C, User::One, 0)),
        decode(sum(Kind::D, 0), Tx::Source1, own(Kind::D, User::One, 0)),
        fsum_step(),
    ]);
    let dest = |me: User| -> Vec<Step> {
        let other = me.partner();
        let tx = source_tx(other);
        let mut steps = Vec::new();
        if shared {
            steps.push(subtract(own(Kind::D, other, 0), tx, own(Kind::D, other, 0)));
        }
        steps.extend([
            decode_same(sum(Kind::D, -1), Tx::Relay),
            decode_same(sum(Kind::C, -1), Tx::Relay),
            decode_same(own(Kind::C, other, 0), tx),
            decode_same(own(Kind::F, me, -2), tx),
            decode_same(own(Kind::FBar, me, -2), tx),
            Step::Combine {
                out: own(Kind::C, me, 0),
                inputs: vec![sum(Kind::C, 0), own(Kind::C, other, 0)],
            },
        ]);
        steps.extend(unpad(Kind::D, -1, d));
        steps
    };
    Ok(Built {
        layouts: [source(User::One)?, source(User::Two)?, relay, feedback],
        plans: [
            relay_plan,
            source_feedback_plan(User::One, &[Part::Whole]),
            source_feedback_plan(User::Two, &[Part::Whole]),
            dest(User::One),
            dest(User::Two),
        ],
    })
}

/// Neutralization and decode-forward through the relay plus both F
/// strategies, with parts of the F-bar and N blocks placed on levels only
/// the relay hears.
fn regime_d(p: &ChannelParams, d: &Dims) -> Result<Built> {
    let q = p.q();
    let dt = d.d_total();
    let (b1, b2) = (d.fbar_upper, d.fbar - d.fbar_upper);
    let (n1, n2) = (d.n_upper, d.n - d.n_upper);
    let visible = d.f[0] + d.f[1] + 2 * b1 + b2 + dt + 2 * n1 + n2;
    let window = sub(p.ns, p.nc, "relay-only window")?;
    let (up, lo) = (Part::Upper, Part::Lower);
    let source = |u: User| -> Result<SignalLayout<SlotRef>> {
        let other = u.partner();
        let mut blocks = vec![Block::Zeros(sub(p.nc, visible, "source levels")?)];
        blocks.extend(f_pair(u, d));
        blocks.extend([
            seg(own_part(Kind::FBar, other, up, -2), b1),
            seg(own_part(Kind::FBar, other, lo, -2), b2),
            seg(own_part(Kind::FBar, u, up, 0), b1),
            seg(own_part(Kind::N, u, up, 1), n1),
            seg(own(Kind::D, u, 0), dt),
            seg(own_part(Kind::N, u, up, 0), n1),
            seg(own_part(Kind::N, u, lo, 0), n2),
            seg(own_part(Kind::FBar, u, lo, 0), b2),
            seg(own_part(Kind::N, u, lo, 1), n2),
            Block::Zeros(sub(window, b2 + n2, "relay-only levels")?),
            Block::Zeros(q - p.ns),
        ]);
        SignalLayout::new(blocks, q)
    };
    let relay = SignalLayout::new(
        vec![
            Block::Zeros(sub(p.nr, dt + d.n, "relay levels")?),
            seg(sum(Kind::D, -1), dt),
            seg(sum_part(Kind::N, up, 0), n1),
            seg(sum_part(Kind::N, lo, 0), n2),
            Block::Zeros(q - p.nr),
        ],
        q,
    )?;
    let feedback = SignalLayout::new(
        vec![
            seg(sum(Kind::F, -1), d.f_max()),
            seg(sum_part(Kind::FBar, up, -1), b1),
            seg(sum_part(Kind::FBar, lo, -1), b2),
            Block::Zeros(sub(q, d.f_max() + d.fbar, "feedback levels")?),
        ],
        q,
    )?;
    let mut relay_plan = feedback_relay_steps(&[up, lo]);
    relay_plan.extend([
        decode(sum(Kind::D, 0), Tx::Source1, own(Kind::D, User::One, 0)),
        decode(sum_part(Kind::N, up, 1), Tx::Source1, own_part(Kind::N, User::One, up, 1)),
        decode(sum_part(Kind::N, lo, 1), Tx::Source1, own_part(Kind::N, User::One, lo, 1)),
        fsum_step(),
    ]);
    let dest = |me: User| -> Vec<Step> {
        let other = me.partner();
        let tx = source_tx(other);
        let mut steps = vec![
            subtract(own(Kind::D, other, 0), tx, own(Kind::D, other, 0)),
            decode_same(sum(Kind::D, -1), Tx::Relay),
            decode(own_part(Kind::N, me, up, 0), tx, own_part(Kind::N, other, up, 0)),
            decode(own_part(Kind::N, me, lo, 0), tx, own_part(Kind::N, other, lo, 0)),
            decode_same(own(Kind::F, me, -2), tx),
            decode_same(own_part(Kind::FBar, me, up, -2), tx),
            decode_same(own_part(Kind::FBar, me, lo, -2), tx),
        ];
        steps.extend(unpad(Kind::D, -1, d));
        steps
    };
    Ok(Built {
        layouts: [source(User::One)?, source(User::Two)?, relay, feedback],
        plans: [
            relay_plan,
            source_feedback_plan(User::One, &[up, lo]),
            source_feedback_plan(User::Two, &[up, lo]),
            dest(User::One),
            dest(User::Two),
        ],
    })
}
