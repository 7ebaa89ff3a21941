//! Names and sizes of every signal a scheme moves around.

use std::fmt;

use serde::Serialize;

use super::systems::RateAllocation;
use crate::rate_region::Regime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];

    pub fn index(self) -> usize {
        match self {
            User::One => 1,
            User::Two => 2,
        }
    }

    pub fn partner(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }
}

/// Message families of one user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Kind {
    /// Compute-forward: the relay only learns the sum.
    C,
    /// Decode-forward, zero padded so both users share one relay block.
    D,
    /// Decode-forward on the levels only the relay hears.
    DBar,
    /// Neutralization: sent one use early so the relay can cancel it.
    N,
    /// Exchanged through the feedback link, one direction per user.
    F,
    /// Exchanged through the feedback link in both directions at once.
    FBar,
}

impl Kind {
    pub const ALL: [Kind; 6] = [Kind::C, Kind::D, Kind::DBar, Kind::N, Kind::F, Kind::FBar];

    fn label(self) -> &'static str {
        match self {
            Kind::C => "c",
            Kind::D => "d",
            Kind::DBar => "dbar",
            Kind::N => "n",
            Kind::F => "f",
            Kind::FBar => "fbar",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Signal {
    Own(Kind, User),
    /// XOR of both users' blocks, the shorter zero padded at the bottom.
    Sum(Kind),
}

impl Signal {
    pub fn kind(self) -> Kind {
        match self {
            Signal::Own(k, _) | Signal::Sum(k) => k,
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::Own(k, u) => write!(f, "u{}{}", u.index(), k.label()),
            Signal::Sum(k) => write!(f, "{}sum", k.label()),
        }
    }
}

/// A signal may travel as two pieces placed on different levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Part {
    Whole,
    Upper,
    Lower,
}

/// A signal part relative to the current channel use: `offset = -1` is the
/// block of the previous use, `+1` the block of the next one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SlotRef {
    pub signal: Signal,
    pub part: Part,
    pub offset: i64,
}

impl SlotRef {
    pub fn own(kind: Kind, user: User, offset: i64) -> Self {
        Self {
            signal: Signal::Own(kind, user),
            part: Part::Whole,
            offset,
        }
    }

    pub fn sum(kind: Kind, offset: i64) -> Self {
        Self {
            signal: Signal::Sum(kind),
            part: Part::Whole,
            offset,
        }
    }

    pub fn with_part(self, part: Part) -> Self {
        Self { part, ..self }
    }

    pub fn shifted(self, by: i64) -> Self {
        Self {
            offset: self.offset + by,
            ..self
        }
    }

    /// Label such as `u1n[2](i+1)` or `csum(i-1)`.
    pub fn label(&self) -> String {
        let part = match self.part {
            Part::Whole => "",
            Part::Upper => "[1]",
            Part::Lower => "[2]",
        };
        let when = match self.offset {
            0 => "i".to_string(),
            o if o > 0 => format!("i+{o}"),
            o => format!("i{o}"),
        };
        format!("{}{part}({when})", self.signal)
    }
}

impl fmt::Display for SlotRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Block lengths implied by an allocation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Dims {
    pub c: usize,
    pub c_upper: usize,
    pub d: [usize; 2],
    pub dbar: [usize; 2],
    pub n: usize,
    pub n_upper: usize,
    pub f: [usize; 2],
    pub fbar: usize,
    pub fbar_upper: usize,
}

impl Dims {
    pub fn from_allocation(a: &RateAllocation) -> Self {
        let g = |k: &str| a.get(k);
        match a.regime {
            Regime::A => Dims {
                c: g("Rc1") + g("Rc2"),
                c_upper: g("Rc1"),
                d: [g("R1d"), g("R2d")],
                ..Dims::default()
            },
            Regime::B => Dims {
                c: g("Rc"),
                c_upper: g("Rc"),
                d: [g("R1d"), g("R2d")],
                dbar: [g("R1d_bar"), g("R2d_bar")],
                n: g("Rn"),
                n_upper: g("Rn"),
                ..Dims::default()
            },
            Regime::C => Dims {
                c: g("Rc"),
                c_upper: g("Rc"),
                d: [g("R1d"), g("R2d")],
                f: [g("R1f"), g("R2f")],
                fbar: g("Rf_bar"),
                fbar_upper: g("Rf_bar"),
                ..Dims::default()
            },
            Regime::D => Dims {
                d: [g("R1d"), g("R2d")],
                f: [g("R1f"), g("R2f")],
                fbar: g("Rf_bar1") + g("Rf_bar2"),
                fbar_upper: g("Rf_bar1"),
                n: g("Rn1") + g("Rn2"),
                n_upper: g("Rn1"),
                ..Dims::default()
            },
        }
    }

    pub fn d_total(&self) -> usize {
        self.d[0] + self.d[1]
    }

    pub fn dbar_total(&self) -> usize {
        self.dbar[0] + self.dbar[1]
    }

    pub fn f_max(&self) -> usize {
        self.f[0].max(self.f[1])
    }

    /// Message bits carried by one block of `kind` for `user`.
    pub fn info_len(&self, kind: Kind, user: User) -> usize {
        let u = user.index() - 1;
        match kind {
            Kind::C => self.c,
            Kind::D => self.d[u],
            Kind::DBar => self.dbar[u],
            Kind::N => self.n,
            Kind::F => self.f[u],
            Kind::FBar => self.fbar,
        }
    }

    /// Length of the transmitted block, including zero padding.
    pub fn whole_len(&self, signal: Signal) -> usize {
        match signal {
            Signal::Own(Kind::D, _) | Signal::Sum(Kind::D) => self.d_total(),
            Signal::Own(Kind::DBar, _) | Signal::Sum(Kind::DBar) => self.dbar_total(),
            Signal::Sum(Kind::F) => self.f_max(),
            Signal::Own(k, u) => self.info_len(k, u),
            Signal::Sum(k) => self.info_len(k, User::One),
        }
    }

    /// Length of the upper piece of a split signal.
    pub fn upper_len(&self, kind: Kind) -> usize {
        match kind {
            Kind::C => self.c_upper,
            Kind::N => self.n_upper,
            Kind::FBar => self.fbar_upper,
            _ => 0,
        }
    }

    pub fn part_len(&self, signal: Signal, part: Part) -> usize {
        let whole = self.whole_len(signal);
        match part {
            Part::Whole => whole,
            Part::Upper => self.upper_len(signal.kind()),
            Part::Lower => whole - self.upper_len(signal.kind()),
        }
    }

    /// Levels of the padded D (or D-bar) block that carry `user`'s bits.
    pub fn info_range(&self, kind: Kind, user: User) -> (usize, usize) {
        let lens = if kind == Kind::DBar { self.dbar } else { self.d };
        match user {
            User::One => (0, lens[0]),
            User::Two => (lens[0], lens[0] + lens[1]),
        }
    }
}

/// Blocks of `kind` exist for these indices; all others are known zeros.
/// Neutralization blocks run one index later so the first use can carry
/// the first future block.
pub fn block_window(kind: Kind, n_blocks: usize) -> (i64, i64) {
    match kind {
        Kind::N => (2, n_blocks as i64 + 1),
        _ => (1, n_blocks as i64),
    }
}
