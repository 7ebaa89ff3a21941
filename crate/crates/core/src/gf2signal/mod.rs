//! Physical layer of the symmetric linear deterministic butterfly network.
//!
//! Every signal is a column vector over GF(2) of length `q`. Level 1 is the
//! most significant level and is drawn at the top; a link of gain `n` delivers
//! the top `n` levels of its input to the bottom `n` levels of the receiver
//! (the shift `S^(q-n)`), everything below the receiver's noise floor is lost.
//!
//! ```text
//!            n_s             n_c (cross)        n_r
//!   X1 ─────────► relay ◄───────── X2     relay ─────► Y3, Y4
//!   X1 ─────────────────────────────────────────────► Y4
//!   X2 ─────────────────────────────────────────────► Y3
//!   relay ══ n_f (out-of-band feedback) ══► Y1 = Y2
//! ```

mod layout;

pub use layout::{Block, Placement, SignalLayout};

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A length-`q` vector over GF(2), top level first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Builds a vector from 0/1 integers; anything nonzero is a 1.
    pub fn from_u8s(bits: &[u8]) -> Self {
        Self {
            bits: bits.iter().map(|&b| b != 0).collect(),
        }
    }

    /// Unit vector with a single 1 at 1-based `level`.
    pub fn unit(len: usize, level: usize) -> Self {
        let mut v = Self::zeros(len);
        v.bits[level - 1] = true;
        v
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit at 1-based `level` (level 1 is the top).
    pub fn level(&self, level: usize) -> bool {
        self.bits[level - 1]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Copy of the 0-based half-open range `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        Self {
            bits: self.bits[start..start + len].to_vec(),
        }
    }

    /// XORs `src` into positions `start..start + src.len()` (0-based).
    pub fn xor_at(&mut self, start: usize, src: &BitVector) {
        for (dst, s) in self.bits[start..start + src.len()].iter_mut().zip(&src.bits) {
            *dst ^= *s;
        }
    }

    /// XOR of two vectors of possibly different lengths; the shorter one is
    /// zero padded at the bottom.
    pub fn xor_padded(&self, other: &BitVector) -> BitVector {
        let len = self.len().max(other.len());
        let mut out = BitVector::zeros(len);
        out.xor_at(0, self);
        out.xor_at(0, other);
        out
    }

    /// Truncates or zero pads (at the bottom) to exactly `len` levels.
    pub fn resized(&self, len: usize) -> BitVector {
        let mut bits = self.bits.clone();
        bits.resize(len, false);
        Self { bits }
    }

    pub fn concat(parts: &[&BitVector]) -> BitVector {
        Self {
            bits: parts.iter().flat_map(|p| p.bits.iter().copied()).collect(),
        }
    }

    pub fn try_xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.len() != other.len() {
            return Err(Error::Parameter(format!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Self {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        })
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    /// Panics on a length mismatch; use [`BitVector::try_xor`] for the checked form.
    fn bitxor(self, rhs: &BitVector) -> BitVector {
        self.try_xor(rhs).expect("xor of vectors with different lengths")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parameter(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }
}

/// Level counts of the symmetric network: cross `n_c`, source-relay `n_s`,
/// relay-destination `n_r` and feedback `n_f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChannelParams {
    pub nc: usize,
    pub ns: usize,
    pub nr: usize,
    pub nf: usize,
}

impl ChannelParams {
    pub const fn new(nc: usize, ns: usize, nr: usize, nf: usize) -> Self {
        Self { nc, ns, nr, nf }
    }

    /// Signal length. Never zero, so the all-zero network still has 1-level vectors.
    pub fn q(&self) -> usize {
        self.nc.max(self.ns).max(self.nr).max(self.nf).max(1)
    }

    pub fn with_nf(&self, nf: usize) -> Self {
        Self { nf, ..*self }
    }

    /// Every tuple in `[0, max]^4`, ordered by `(nc, ns, nr, nf)`.
    pub fn lattice(max: usize) -> impl Iterator<Item = ChannelParams> {
        let side = max + 1;
        (0..side.pow(4)).map(move |i| {
            ChannelParams::new(i / side.pow(3), (i / side.pow(2)) % side, (i / side) % side, i % side)
        })
    }
}

impl fmt::Display for ChannelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(n_c={}, n_s={}, n_r={}, n_f={})",
            self.nc, self.ns, self.nr, self.nf
        )
    }
}

/// Transmit signals of one channel use: sources 1 and 2, the relay's in-band
/// signal and its out-of-band feedback signal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkInputs {
    pub x1: BitVector,
    pub x2: BitVector,
    pub xr: BitVector,
    pub xf: BitVector,
}

impl NetworkInputs {
    pub fn zeros(q: usize) -> Self {
        Self {
            x1: BitVector::zeros(q),
            x2: BitVector::zeros(q),
            xr: BitVector::zeros(q),
            xf: BitVector::zeros(q),
        }
    }

    pub fn xor(&self, other: &NetworkInputs) -> NetworkInputs {
        NetworkInputs {
            x1: &self.x1 ^ &other.x1,
            x2: &self.x2 ^ &other.x2,
            xr: &self.xr ^ &other.xr,
            xf: &self.xf ^ &other.xf,
        }
    }
}

/// Received signals: relay `y0`, feedback at the sources `y1`/`y2`, and the
/// destinations `y3`/`y4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkOutputs {
    pub y0: BitVector,
    pub y1: BitVector,
    pub y2: BitVector,
    pub y3: BitVector,
    pub y4: BitVector,
}

impl NetworkOutputs {
    pub fn xor(&self, other: &NetworkOutputs) -> NetworkOutputs {
        NetworkOutputs {
            y0: &self.y0 ^ &other.y0,
            y1: &self.y1 ^ &other.y1,
            y2: &self.y2 ^ &other.y2,
            y3: &self.y3 ^ &other.y3,
            y4: &self.y4 ^ &other.y4,
        }
    }
}

/// `S^(q-n) x`: the top `n` levels of `x` land on the bottom `n` levels.
pub fn shift_receive(x: &BitVector, n: usize) -> Result<BitVector> {
    let q = x.len();
    if n > q {
        return Err(Error::Parameter(format!(
            "link gain {n} exceeds signal length {q}"
        )));
    }
    let mut out = BitVector::zeros(q);
    out.xor_at(q - n, &x.slice(0, n));
    Ok(out)
}

/// Componentwise XOR of all inputs.
pub fn superpose(xs: &[&BitVector]) -> Result<BitVector> {
    let (first, rest) = xs
        .split_first()
        .ok_or_else(|| Error::Parameter("superpose of an empty list".into()))?;
    rest.iter()
        .try_fold((*first).clone(), |acc, x| acc.try_xor(x))
}

pub fn channel_step(inputs: &NetworkInputs, params: &ChannelParams) -> Result<NetworkOutputs> {
    let q = params.q();
    for (name, v) in [
        ("x1", &inputs.x1),
        ("x2", &inputs.x2),
        ("xr", &inputs.xr),
        ("xf", &inputs.xf),
    ] {
        if v.len() != q {
            return Err(Error::Parameter(format!(
                "{name} has length {}, expected q = {q}",
                v.len()
            )));
        }
    }
    let feedback = shift_receive(&inputs.xf, params.nf)?;
    let relay_in = shift_receive(&inputs.xr, params.nr)?;
    Ok(NetworkOutputs {
        y0: shift_receive(&superpose(&[&inputs.x1, &inputs.x2])?, params.ns)?,
        y1: feedback.clone(),
        y2: feedback,
        y3: &shift_receive(&inputs.x2, params.nc)? ^ &relay_in,
        y4: &shift_receive(&inputs.x1, params.nc)? ^ &relay_in,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn shift_identity_and_annihilation() {
        assert_eq!(shift_receive(&bv("101"), 3).unwrap(), bv("101"));
        assert_eq!(shift_receive(&bv("111"), 0).unwrap(), bv("000"));
    }

    #[test]
    fn shift_by_hand() {
        // S^2 (1,0,1)^T: first S gives (0,1,0), second gives (0,0,1).
        assert_eq!(shift_receive(&bv("101"), 1).unwrap(), bv("001"));
    }

    #[test]
    fn shift_rejects_gain_above_q() {
        assert!(matches!(
            shift_receive(&bv("10"), 3),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn superpose_examples() {
        assert_eq!(superpose(&[&bv("10"), &bv("11")]).unwrap(), bv("01"));
        let x = bv("1101");
        assert!(superpose(&[&x, &x]).unwrap().is_zero());
        assert_eq!(
            superpose(&[&bv("101"), &bv("011"), &bv("110")]).unwrap(),
            bv("000")
        );
        assert!(superpose(&[]).is_err());
        assert!(superpose(&[&bv("1"), &bv("10")]).is_err());
    }

    #[test]
    fn q_has_floor_of_one() {
        assert_eq!(ChannelParams::new(0, 0, 0, 0).q(), 1);
        assert_eq!(ChannelParams::new(2, 3, 1, 1).q(), 3);
    }

    #[test]
    fn channel_zero_in_zero_out() {
        let p = ChannelParams::new(2, 3, 1, 1);
        let out = channel_step(&NetworkInputs::zeros(3), &p).unwrap();
        for y in [&out.y0, &out.y1, &out.y2, &out.y3, &out.y4] {
            assert!(y.is_zero());
        }
    }

    #[test]
    fn channel_single_top_bit_from_source_one() {
        let p = ChannelParams::new(2, 3, 1, 1);
        let q = p.q();
        let mut inputs = NetworkInputs::zeros(q);
        inputs.x1 = BitVector::unit(q, 1);
        let out = channel_step(&inputs, &p).unwrap();
        assert_eq!(out.y0, BitVector::unit(q, q - 3 + 1));
        assert_eq!(out.y4, BitVector::unit(q, q - 2 + 1));
        assert!(out.y3.is_zero());
    }

    #[test]
    fn equal_sources_cancel_at_relay() {
        let p = ChannelParams::new(2, 3, 1, 0);
        let x = bv("110");
        let inputs = NetworkInputs {
            x1: x.clone(),
            x2: x.clone(),
            xr: BitVector::zeros(3),
            xf: BitVector::zeros(3),
        };
        let out = channel_step(&inputs, &p).unwrap();
        assert!(out.y0.is_zero());
        assert_eq!(out.y3, shift_receive(&x, 2).unwrap());
        assert_eq!(out.y4, shift_receive(&x, 2).unwrap());
    }

    #[test]
    fn channel_rejects_wrong_length() {
        let p = ChannelParams::new(2, 3, 1, 1);
        let mut inputs = NetworkInputs::zeros(3);
        inputs.xf = BitVector::zeros(2);
        assert!(channel_step(&inputs, &p).is_err());
    }

    #[test]
    fn lattice_enumerates_all_tuples() {
        let all: Vec<_> = ChannelParams::lattice(2).collect();
        assert_eq!(all.len(), 81);
        assert_eq!(all[0], ChannelParams::new(0, 0, 0, 0));
        assert_eq!(all[80], ChannelParams::new(2, 2, 2, 2));
        assert_eq!(all[1], ChannelParams::new(0, 0, 0, 1));
    }
}
