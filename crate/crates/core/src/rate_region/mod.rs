//! Capacity regions of the network as exact 2-D polytopes.
//!
//! A [`RateRegion`] is a list of halfspaces `a1*R1 + a2*R2 <= b`, always
//! intersected with the non-negative quadrant.

mod geometry;

use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf2signal::ChannelParams;
use geometry::LpOutcome;

pub type Rational = Ratio<i64>;

pub(crate) fn int(v: usize) -> Rational {
    Rational::from_integer(v as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatePoint {
    pub r1: Rational,
    pub r2: Rational,
}

impl RatePoint {
    pub fn new(r1: Rational, r2: Rational) -> Self {
        Self { r1, r2 }
    }

    pub fn int(r1: i64, r2: i64) -> Self {
        Self::new(r1.into(), r2.into())
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.r2, self.r1)
    }

    pub fn sum(&self) -> Rational {
        self.r1 + self.r2
    }

    /// Integer coordinates, if both are integral.
    pub fn as_integers(&self) -> Option<(i64, i64)> {
        (self.r1.is_integer() && self.r2.is_integer())
            .then(|| (self.r1.to_integer(), self.r2.to_integer()))
    }
}

impl fmt::Display for RatePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.r1, self.r2)
    }
}

/// `a1*R1 + a2*R2 <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub a1: Rational,
    pub a2: Rational,
    pub b: Rational,
}

impl Halfspace {
    pub fn new(a1: Rational, a2: Rational, b: Rational) -> Self {
        Self { a1, a2, b }
    }

    pub fn int(a1: i64, a2: i64, b: i64) -> Self {
        Self::new(a1.into(), a2.into(), b.into())
    }

    pub fn contains(&self, p: &RatePoint) -> bool {
        self.a1 * p.r1 + self.a2 * p.r2 <= self.b
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.a2, self.a1, self.b)
    }
}

impl fmt::Display for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (c, name) in [(self.a1, "R1"), (self.a2, "R2")] {
            if c.is_zero() {
                continue;
            }
            let coeff = if c == Rational::from(1) {
                String::new()
            } else if c == Rational::from(-1) {
                "-".to_string()
            } else {
                format!("{c}*")
            };
            terms.push(format!("{coeff}{name}"));
        }
        write!(f, "{} <= {}", terms.join(" + ").replace("+ -", "- "), self.b)
    }
}

/// Which capacity-achieving scheme applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    /// `n_s <= n_c <= n_r`
    A,
    /// `n_c <= min{n_s, n_r}`
    B,
    /// `max{n_r, n_s} < n_c`
    C,
    /// `n_r < n_c <= n_s`
    D,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::A, Regime::B, Regime::C, Regime::D];

    /// True iff `params` satisfies this regime's defining inequalities,
    /// ignoring tie-breaks.
    pub fn admits(&self, p: &ChannelParams) -> bool {
        match self {
            Regime::A => p.ns <= p.nc && p.nc <= p.nr,
            Regime::B => p.nc <= p.ns.min(p.nr),
            Regime::C => p.nr.max(p.ns) < p.nc,
            Regime::D => p.nr < p.nc && p.nc <= p.ns,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Bounded polytope in the non-negative `(R1, R2)` quadrant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RateRegion {
    halfspaces: Vec<Halfspace>,
}

impl RateRegion {
    /// Wraps raw halfspaces without any checks; see [`canonicalize`].
    pub fn new(halfspaces: Vec<Halfspace>) -> Self {
        Self { halfspaces }
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn contains(&self, p: &RatePoint) -> bool {
        geometry::contains(&self.halfspaces, p)
    }

    /// First halfspace (or quadrant side) violated by `p`.
    pub fn violated_by(&self, p: &RatePoint) -> Option<Halfspace> {
        if p.r1.is_negative() {
            return Some(Halfspace::int(-1, 0, 0));
        }
        if p.r2.is_negative() {
            return Some(Halfspace::int(0, -1, 0));
        }
        self.halfspaces.iter().find(|h| !h.contains(p)).copied()
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.halfspaces.iter().map(Halfspace::swapped).collect())
    }

    /// True iff every point of `self` lies in `other`. Both must be bounded.
    pub fn is_subset_of(&self, other: &RateRegion) -> bool {
        geometry::vertices(&self.halfspaces)
            .iter()
            .all(|p| other.contains(p))
    }

    /// Integer points of the region, for regions with bounded coordinates.
    pub fn integer_points(&self) -> Vec<(i64, i64)> {
        let verts = geometry::vertices(&self.halfspaces);
        let max1 = verts.iter().map(|p| p.r1.floor().to_integer()).max().unwrap_or(-1);
        let max2 = verts.iter().map(|p| p.r2.floor().to_integer()).max().unwrap_or(-1);
        let mut out = Vec::new();
        for r1 in 0..=max1 {
            for r2 in 0..=max2 {
                if self.contains(&RatePoint::int(r1, r2)) {
                    out.push((r1, r2));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "halfspaces": self.halfspaces.iter().map(|h| json!({
                "a1": rational_json(h.a1),
                "a2": rational_json(h.a2),
                "b": rational_json(h.b),
            })).collect::<Vec<_>>(),
            "corners": corner_points(self).iter()
                .map(|p| json!([rational_json(p.r1), rational_json(p.r2)]))
                .collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for RateRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.halfspaces.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Integers as JSON numbers, everything else as a `"p/q"` string.
pub fn rational_json(r: Rational) -> Value {
    if r.is_integer() {
        json!(r.to_integer())
    } else {
        json!(format!("{}/{}", r.numer(), r.denom()))
    }
}

fn pos(a: usize, b: usize) -> usize {
    a.saturating_sub(b)
}

pub fn outer_bound_region(p: &ChannelParams) -> RateRegion {
    let single = int(p.ns.min(p.nr + p.nf).min(p.nc.max(p.nr)));
    let m = p.nr.max(p.nc);
    let raw = vec![
        Halfspace::new(1.into(), 0.into(), single),
        Halfspace::new(0.into(), 1.into(), single),
        Halfspace::new(1.into(), 1.into(), int(m + p.nc)),
        Halfspace::new(1.into(), 1.into(), int(m + pos(p.ns, p.nc))),
        Halfspace::new(1.into(), 1.into(), int(p.ns + p.nc)),
    ];
    canonicalize(&RateRegion::new(raw)).expect("outer bound is bounded and non-empty")
}

/// Tests the regimes in the order A, B, D, C; the first match wins.
pub fn regime_of(p: &ChannelParams) -> Regime {
    [Regime::A, Regime::B, Regime::D, Regime::C]
        .into_iter()
        .find(|r| r.admits(p))
        .expect("the four regimes cover every tuple")
}

/// Achievable region of `regime`'s scheme, evaluated at `p` regardless of
/// whether `p` belongs to that regime.
pub fn lemma_region_for(regime: Regime, p: &ChannelParams) -> RateRegion {
    let (single, sum) = match regime {
        Regime::A => (p.ns, p.nr),
        Regime::B => (
            p.ns.min(p.nr),
            (p.ns + p.nc).min(p.nr + p.nc).min(pos(p.nr + p.ns, p.nc)),
        ),
        Regime::C => (p.ns.min(p.nr + p.nf), p.nc),
        Regime::D => ((p.nr + p.nf).min(p.nc), p.ns),
    };
    let raw = vec![
        Halfspace::new(1.into(), 0.into(), int(single)),
        Halfspace::new(0.into(), 1.into(), int(single)),
        Halfspace::new(1.into(), 1.into(), int(sum)),
    ];
    canonicalize(&RateRegion::new(raw)).expect("lemma regions are bounded and non-empty")
}

pub fn lemma_region(p: &ChannelParams) -> RateRegion {
    lemma_region_for(regime_of(p), p)
}

/// Minimal, deterministic representation: coprime integer coefficients,
/// sorted by `(a1, a2, b)`, with every implied halfspace removed.
pub fn canonicalize(region: &RateRegion) -> Result<RateRegion> {
    let mut hs: Vec<Halfspace> = Vec::new();
    for h in region.halfspaces() {
        if h.a1.is_zero() && h.a2.is_zero() {
            if h.b.is_negative() {
                return Err(Error::Structural(format!("contradictory halfspace {h}")));
            }
            continue;
        }
        hs.push(geometry::normalize(h));
    }
    hs.sort();
    hs.dedup();
    for (c1, c2) in [(1, 0), (0, 1)] {
        match geometry::lp_max(&hs, c1.into(), c2.into()) {
            LpOutcome::Empty => return Err(Error::Structural("empty region".into())),
            LpOutcome::Unbounded => return Err(Error::Structural("unbounded region".into())),
            LpOutcome::Max(_) => {}
        }
    }
    let mut i = 0;
    while i < hs.len() {
        let h = hs[i];
        let others: Vec<Halfspace> = hs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| *g)
            .collect();
        match geometry::lp_max(&others, h.a1, h.a2) {
            LpOutcome::Max(m) if m <= h.b => {
                hs.remove(i);
            }
            _ => i += 1,
        }
    }
    Ok(RateRegion::new(hs))
}

pub fn regions_equal(a: &RateRegion, b: &RateRegion) -> bool {
    a.is_subset_of(b) && b.is_subset_of(a)
}

/// Vertices of the region, walking the boundary clockwise from the
/// lexicographically smallest one. For a region anchored at the origin this
/// runs up the `R2` axis, across the dominant face and back down the `R1` axis.
pub fn corner_points(region: &RateRegion) -> Vec<RatePoint> {
    geometry::order_clockwise(geometry::vertices(region.halfspaces()))
}

pub fn sum_capacity(region: &RateRegion) -> Rational {
    corner_points(region)
        .iter()
        .map(RatePoint::sum)
        .max()
        .unwrap_or_else(Rational::zero)
}

/// `(C_{n_f} - C_0) / r_f`, the sum-capacity gained per feedback level spent.
pub fn net_gain(baseline: &ChannelParams, nf: usize, rf: Rational) -> Result<Rational> {
    if !rf.is_positive() {
        return Err(Error::Parameter(format!(
            "feedback usage r_f must be positive, got {rf}"
        )));
    }
    let with = sum_capacity(&outer_bound_region(&baseline.with_nf(nf)));
    let without = sum_capacity(&outer_bound_region(&baseline.with_nf(0)));
    Ok((with - without) / rf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(nc: usize, ns: usize, nr: usize, nf: usize) -> ChannelParams {
        ChannelParams::new(nc, ns, nr, nf)
    }

    fn region(hs: &[(i64, i64, i64)]) -> RateRegion {
        RateRegion::new(hs.iter().map(|&(a, b, c)| Halfspace::int(a, b, c)).collect())
    }

    fn pts(v: &[(i64, i64)]) -> Vec<RatePoint> {
        v.iter().map(|&(a, b)| RatePoint::int(a, b)).collect()
    }

    #[test]
    fn toy_regions() {
        assert_eq!(outer_bound_region(&p(2, 3, 1, 0)), region(&[(0, 1, 1), (1, 0, 1)]));
        assert_eq!(
            outer_bound_region(&p(2, 3, 1, 1)),
            region(&[(0, 1, 2), (1, 0, 2), (1, 1, 3)])
        );
        assert_eq!(
            outer_bound_region(&p(6, 3, 1, 1)),
            region(&[(0, 1, 2), (1, 0, 2)])
        );
        assert_eq!(corner_points(&outer_bound_region(&p(0, 0, 0, 0))), pts(&[(0, 0)]));
    }

    #[test]
    fn regimes() {
        assert_eq!(regime_of(&p(2, 3, 1, 0)), Regime::D);
        assert_eq!(regime_of(&p(6, 3, 1, 0)), Regime::C);
        assert_eq!(regime_of(&p(2, 1, 3, 0)), Regime::A);
        assert_eq!(regime_of(&p(2, 2, 3, 0)), Regime::A);
        assert_eq!(regime_of(&p(1, 2, 3, 0)), Regime::B);
        assert_eq!(regime_of(&p(0, 0, 0, 0)), Regime::A);
    }

    #[test]
    fn achievable_region_examples() {
        assert_eq!(lemma_region(&p(2, 1, 3, 0)), region(&[(0, 1, 1), (1, 0, 1)]));
        assert_eq!(
            lemma_region(&p(2, 3, 1, 1)),
            region(&[(0, 1, 2), (1, 0, 2), (1, 1, 3)])
        );
        assert_eq!(lemma_region(&p(6, 3, 1, 0)), region(&[(0, 1, 1), (1, 0, 1)]));
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(
            canonicalize(&region(&[(1, 0, 1), (1, 0, 2), (0, 1, 1)])).unwrap(),
            region(&[(0, 1, 1), (1, 0, 1)])
        );
        assert_eq!(
            canonicalize(&region(&[(1, 0, 2), (0, 1, 2), (1, 1, 5)])).unwrap(),
            region(&[(0, 1, 2), (1, 0, 2)])
        );
        assert_eq!(
            canonicalize(&region(&[(2, 0, 4), (0, 3, 6)])).unwrap(),
            region(&[(0, 1, 2), (1, 0, 2)])
        );
        let raw = region(&[(1, 0, 2), (0, 1, 2), (1, 1, 4), (1, 1, 3), (1, 1, 5)]);
        assert_eq!(canonicalize(&raw).unwrap().halfspaces().len(), 3);
    }

    #[test]
    fn canonicalize_rejects_unbounded_and_empty() {
        assert!(matches!(
            canonicalize(&region(&[(1, 0, 1)])),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            canonicalize(&region(&[(1, 0, 1), (0, 1, 1), (-1, 0, -2)])),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let c = canonicalize(&region(&[(1, 2, 7), (3, 1, 9), (1, 1, 4), (1, 0, 5)])).unwrap();
        assert_eq!(canonicalize(&c).unwrap(), c);
    }

    #[test]
    fn equality_examples() {
        let box1 = region(&[(1, 0, 1), (0, 1, 1)]);
        assert!(regions_equal(&box1, &box1));
        assert!(regions_equal(&box1, &region(&[(1, 0, 1), (0, 1, 1), (1, 1, 2)])));
        assert!(!regions_equal(&box1, &region(&[(1, 0, 1), (0, 1, 1), (1, 1, 1)])));
        let q = p(2, 3, 1, 1);
        assert!(regions_equal(&lemma_region(&q), &outer_bound_region(&q)));
    }

    #[test]
    fn corner_examples() {
        let pentagon = region(&[(1, 0, 2), (0, 1, 2), (1, 1, 3)]);
        assert_eq!(
            corner_points(&pentagon),
            pts(&[(0, 0), (0, 2), (1, 2), (2, 1), (2, 0)])
        );
        assert_eq!(
            corner_points(&region(&[(1, 0, 1), (0, 1, 1)])),
            pts(&[(0, 0), (0, 1), (1, 1), (1, 0)])
        );
        let frac = region(&[(2, 1, 2), (1, 2, 2)]);
        let third = Rational::new(2, 3);
        assert_eq!(
            corner_points(&frac),
            vec![
                RatePoint::int(0, 0),
                RatePoint::int(0, 1),
                RatePoint::new(third, third),
                RatePoint::int(1, 0)
            ]
        );
    }

    #[test]
    fn sum_capacity_and_gain() {
        assert_eq!(sum_capacity(&outer_bound_region(&p(6, 3, 1, 0))), 2.into());
        assert_eq!(sum_capacity(&outer_bound_region(&p(6, 3, 1, 1))), 4.into());
        assert_eq!(sum_capacity(&outer_bound_region(&p(0, 0, 0, 0))), 0.into());
        assert_eq!(net_gain(&p(6, 3, 1, 0), 1, 1.into()).unwrap(), 2.into());
        assert_eq!(net_gain(&p(6, 3, 1, 0), 0, 1.into()).unwrap(), 0.into());
        for nf in 0..4 {
            assert_eq!(net_gain(&p(2, 1, 3, 0), nf, 1.into()).unwrap(), 0.into());
        }
        assert!(matches!(
            net_gain(&p(6, 3, 1, 0), 1, 0.into()),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn json_shape() {
        let v = region(&[(2, 1, 2), (1, 2, 2)]).to_json();
        assert_eq!(v["halfspaces"][0]["a1"], 2);
        assert_eq!(v["corners"][2][0], "2/3");
    }

    #[test]
    fn violated_halfspace_is_reported() {
        let r = outer_bound_region(&p(2, 3, 1, 1));
        assert_eq!(r.violated_by(&RatePoint::int(3, 0)), Some(Halfspace::int(1, 0, 2)));
        assert_eq!(r.violated_by(&RatePoint::int(2, 1)), None);
    }
}
