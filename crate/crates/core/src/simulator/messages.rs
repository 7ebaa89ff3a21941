use std::collections::BTreeMap;

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::gf2signal::BitVector;
use crate::schemes::{block_window, Dims, Kind, Part, Signal, User};

/// Every message block of both users for one run.
///
/// Bits come from xoshiro256++ seeded through SplitMix64
/// (`Xoshiro256PlusPlus::seed_from_u64`); each bit is the top bit of one
/// `next_u64()`. Blocks are drawn for index `b = 1..=N+1`, user 1 before
/// user 2, kinds in the order C, D, D-bar, N, F, F-bar, skipping blocks
/// outside the kind's window. D-type blocks only draw their own info bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageSet {
    pub seed: u64,
    pub n_blocks: usize,
    dims: Dims,
    blocks: BTreeMap<(Kind, User, i64), BitVector>,
}

impl MessageSet {
    pub fn generate(dims: &Dims, n_blocks: usize, seed: u64) -> Self {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut blocks = BTreeMap::new();
        for b in 1..=n_blocks as i64 + 1 {
            for user in User::BOTH {
                for kind in Kind::ALL {
                    let (lo, hi) = block_window(kind, n_blocks);
                    if b < lo || b > hi {
                        continue;
                    }
                    let whole = dims.whole_len(Signal::Own(kind, user));
                    let (start, end) = match kind {
                        Kind::D | Kind::DBar => dims.info_range(kind, user),
                        _ => (0, whole),
                    };
                    let mut bits = vec![false; whole];
                    for bit in &mut bits[start..end] {
                        *bit = rng.next_u64() >> 63 == 1;
                    }
                    blocks.insert((kind, user, b), BitVector::from_bits(bits));
                }
            }
        }
        Self {
            seed,
            n_blocks,
            dims: *dims,
            blocks,
        }
    }

    /// Block `b` of `user`'s `kind` messages; zeros outside the window.
    pub fn block(&self, kind: Kind, user: User, b: i64) -> BitVector {
        self.blocks
            .get(&(kind, user, b))
            .cloned()
            .unwrap_or_else(|| BitVector::zeros(self.dims.whole_len(Signal::Own(kind, user))))
    }

    /// What `signal`'s `part` of block `b` must decode to.
    pub fn truth(&self, signal: Signal, part: Part, b: i64) -> BitVector {
        let whole = match signal {
            Signal::Own(kind, user) => self.block(kind, user, b),
            Signal::Sum(kind) => self
                .block(kind, User::One, b)
                .xor_padded(&self.block(kind, User::Two, b))
                .resized(self.dims.whole_len(signal)),
        };
        let upper = self.dims.upper_len(signal.kind());
        match part {
            Part::Whole => whole,
            Part::Upper => whole.slice(0, upper),
            Part::Lower => whole.slice(upper, whole.len() - upper),
        }
    }

    /// Number of message bits drawn for `user`.
    pub fn bits_of(&self, user: User) -> usize {
        self.blocks
            .iter()
            .filter(|((_, u, _), _)| *u == user)
            .map(|((kind, u, _), _)| self.dims.info_len(*kind, *u))
            .sum()
    }
}
