//! Declarative stacking of named fragments into one length-`q` signal.

use std::fmt::Debug;

use serde::Serialize;

use super::BitVector;
use crate::error::{Error, Result};

/// One entry of a [`SignalLayout`], top to bottom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Block<K> {
    Segment { key: K, len: usize },
    Zeros(usize),
    /// `len` levels carrying the XOR of several stacked layers. Each layer is
    /// itself a list of blocks whose lengths sum to `len`.
    Overlay { len: usize, layers: Vec<Vec<Block<K>>> },
}

impl<K> Block<K> {
    pub fn len(&self) -> usize {
        match self {
            Block::Segment { len, .. } | Block::Zeros(len) | Block::Overlay { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Where a segment lands: 0-based start level and length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Placement<K> {
    pub key: K,
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignalLayout<K> {
    blocks: Vec<Block<K>>,
    q: usize,
}

impl<K: Clone + PartialEq + Debug> SignalLayout<K> {
    pub fn new(blocks: Vec<Block<K>>, q: usize) -> Result<Self> {
        check_lengths(&blocks, q, "layout")?;
        Ok(Self { blocks, q })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn blocks(&self) -> &[Block<K>] {
        &self.blocks
    }

    /// Every non-empty segment with its absolute position, in layout order.
    pub fn placements(&self) -> Vec<Placement<K>> {
        let mut out = Vec::new();
        flatten(&self.blocks, 0, &mut out);
        out
    }

    /// Position of the segment named `key`, or `None` when it is absent or empty.
    pub fn position_of(&self, key: &K) -> Option<(usize, usize)> {
        self.placements()
            .into_iter()
            .find(|p| &p.key == key)
            .map(|p| (p.start, p.len))
    }

    pub fn has_overlap(&self) -> bool {
        let mut used = vec![false; self.q];
        for p in self.placements() {
            for slot in &mut used[p.start..p.start + p.len] {
                if *slot {
                    return true;
                }
                *slot = true;
            }
        }
        false
    }

    /// Number of levels, counted from the top, down to the lowest occupied one.
    pub fn occupied_depth(&self) -> usize {
        self.placements()
            .iter()
            .map(|p| p.start + p.len)
            .max()
            .unwrap_or(0)
    }

    pub fn pack(&self, segments: &[(K, BitVector)]) -> Result<BitVector> {
        self.pack_with(|key| {
            segments
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::Layout(format!("no value for segment {key:?}")))
        })
    }

    /// Packs with a fallible lookup; overlapping segments are XORed together.
    pub fn pack_with<F>(&self, mut value: F) -> Result<BitVector>
    where
        F: FnMut(&K) -> Result<BitVector>,
    {
        let mut out = BitVector::zeros(self.q);
        for p in self.placements() {
            let v = value(&p.key)?;
            if v.len() != p.len {
                return Err(Error::Layout(format!(
                    "segment {:?} has {} bits, layout reserves {}",
                    p.key,
                    v.len(),
                    p.len
                )));
            }
            out.xor_at(p.start, &v);
        }
        Ok(out)
    }

    /// Recovers every segment of a layout without overlaps.
    pub fn unpack(&self, v: &BitVector) -> Result<Vec<(K, BitVector)>> {
        self.unpack_known(v, |_| None)
    }

    /// Removes the segments `known` can supply, then reads the remaining
    /// ones. Fails if two unknown segments share a level.
    pub fn unpack_known<F>(&self, v: &BitVector, known: F) -> Result<Vec<(K, BitVector)>>
    where
        F: Fn(&K) -> Option<BitVector>,
    {
        if v.len() != self.q {
            return Err(Error::Layout(format!(
                "vector has {} levels, layout expects {}",
                v.len(),
                self.q
            )));
        }
        let mut residual = v.clone();
        let mut unknown = Vec::new();
        for p in self.placements() {
            match known(&p.key) {
                Some(k) if k.len() == p.len => residual.xor_at(p.start, &k),
                Some(_) => {
                    return Err(Error::Layout(format!("known value for {:?} has wrong length", p.key)))
                }
                None => unknown.push(p),
            }
        }
        let mut used = vec![false; self.q];
        for p in &unknown {
            for slot in &mut used[p.start..p.start + p.len] {
                if *slot {
                    return Err(Error::Layout(format!(
                        "segment {:?} overlaps another unknown segment",
                        p.key
                    )));
                }
                *slot = true;
            }
        }
        Ok(unknown
            .into_iter()
            .map(|p| {
                let bits = residual.slice(p.start, p.len);
                (p.key, bits)
            })
            .collect())
    }
}

fn check_lengths<K: Debug>(blocks: &[Block<K>], expected: usize, context: &str) -> Result<()> {
    let total: usize = blocks.iter().map(Block::len).sum();
    if total != expected {
        return Err(Error::Layout(format!(
            "{context} blocks sum to {total} levels, expected {expected}"
        )));
    }
    for b in blocks {
        if let Block::Overlay { len, layers } = b {
            if layers.is_empty() {
                return Err(Error::Layout("overlay without layers".into()));
            }
            for layer in layers {
                check_lengths(layer, *len, "overlay layer")?;
            }
        }
    }
    Ok(())
}

fn flatten<K: Clone>(blocks: &[Block<K>], mut start: usize, out: &mut Vec<Placement<K>>) {
    for b in blocks {
        match b {
            Block::Segment { key, len } if *len > 0 => out.push(Placement {
                key: key.clone(),
                start,
                len: *len,
            }),
            Block::Overlay { layers, .. } => {
                for layer in layers {
                    flatten(layer, start, out);
                }
            }
            _ => {}
        }
        start += b.len();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(key: &'static str, len: usize) -> Block<&'static str> {
        Block::Segment { key, len }
    }

    #[test]
    fn pack_single_bit_with_padding() {
        let layout = SignalLayout::new(vec![seg("a", 1), Block::Zeros(2)], 3).unwrap();
        let v = layout.pack(&[("a", BitVector::from_u8s(&[1]))]).unwrap();
        assert_eq!(v, BitVector::from_u8s(&[1, 0, 0]));
    }

    #[test]
    fn wrong_total_is_layout_error() {
        let err = SignalLayout::new(vec![seg("a", 2), Block::Zeros(2)], 3).unwrap_err();
        assert!(matches!(err, Error::Layout(_)));
    }

    #[test]
    fn round_trip_without_overlap() {
        let layout =
            SignalLayout::new(vec![seg("a", 2), Block::Zeros(1), seg("b", 3)], 6).unwrap();
        let a = BitVector::from_u8s(&[1, 1]);
        let b = BitVector::from_u8s(&[0, 1, 1]);
        let v = layout.pack(&[("a", a.clone()), ("b", b.clone())]).unwrap();
        assert_eq!(v.to_string(), "110011");
        assert_eq!(layout.unpack(&v).unwrap(), vec![("a", a), ("b", b)]);
    }

    #[test]
    fn six_level_overlay_is_xor_of_padded_fragments() {
        // Two levels of C, then a 3-level window shared by a top-aligned
        // 2-bit N fragment and a bottom-aligned 2-bit D-bar fragment, then
        // one level of padding.
        let layout = SignalLayout::new(
            vec![
                seg("c", 2),
                Block::Overlay {
                    len: 3,
                    layers: vec![
                        vec![seg("n", 2), Block::Zeros(1)],
                        vec![Block::Zeros(1), seg("dbar", 2)],
                    ],
                },
                Block::Zeros(1),
            ],
            6,
        )
        .unwrap();
        assert!(layout.has_overlap());
        let v = layout
            .pack(&[
                ("c", BitVector::from_u8s(&[1, 0])),
                ("n", BitVector::from_u8s(&[1, 1])),
                ("dbar", BitVector::from_u8s(&[1, 1])),
            ])
            .unwrap();
        // window: (1,1,0) xor (0,1,1) = (1,0,1)
        assert_eq!(v.to_string(), "101010");
        assert!(layout.unpack(&v).is_err());
        let got = layout
            .unpack_known(&v, |k| (*k == "n").then(|| BitVector::from_u8s(&[1, 1])))
            .unwrap();
        assert_eq!(
            got,
            vec![
                ("c", BitVector::from_u8s(&[1, 0])),
                ("dbar", BitVector::from_u8s(&[1, 1]))
            ]
        );
    }

    #[test]
    fn overlay_layer_length_checked() {
        let err = SignalLayout::new(
            vec![Block::Overlay {
                len: 2,
                layers: vec![vec![seg("a", 1)]],
            }],
            2,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Layout(_)));
    }

    #[test]
    fn placements_skip_empty_segments() {
        let layout = SignalLayout::new(vec![seg("a", 0), seg("b", 1)], 1).unwrap();
        assert_eq!(layout.placements().len(), 1);
        assert_eq!(layout.position_of(&"b"), Some((0, 1)));
        assert_eq!(layout.position_of(&"a"), None);
        assert_eq!(layout.occupied_depth(), 1);
    }
}
