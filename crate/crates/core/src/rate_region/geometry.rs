//! Exact 2-D polyhedral helpers on the non-negative quadrant.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{Halfspace, RatePoint, Rational};

pub(crate) enum LpOutcome {
    Empty,
    Unbounded,
    Max(Rational),
}

/// All constraint lines including the two axes.
fn with_axes(hs: &[Halfspace]) -> Vec<Halfspace> {
    let mut all = hs.to_vec();
    all.push(Halfspace::int(-1, 0, 0));
    all.push(Halfspace::int(0, -1, 0));
    all
}

pub(crate) fn contains(hs: &[Halfspace], p: &RatePoint) -> bool {
    !p.r1.is_negative() && !p.r2.is_negative() && hs.iter().all(|h| h.contains(p))
}

/// Vertices of `hs ∩ quadrant`, deduplicated, in no particular order.
pub(crate) fn vertices(hs: &[Halfspace]) -> Vec<RatePoint> {
    let lines = with_axes(hs);
    let mut out: Vec<RatePoint> = Vec::new();
    for (i, g) in lines.iter().enumerate() {
        for h in &lines[i + 1..] {
            let det = g.a1 * h.a2 - g.a2 * h.a1;
            if det.is_zero() {
                continue;
            }
            let p = RatePoint {
                r1: (g.b * h.a2 - g.a2 * h.b) / det,
                r2: (g.a1 * h.b - g.b * h.a1) / det,
            };
            if contains(hs, &p) && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Maximises `c1*R1 + c2*R2` over `hs ∩ quadrant`.
pub(crate) fn lp_max(hs: &[Halfspace], c1: Rational, c2: Rational) -> LpOutcome {
    let verts = vertices(hs);
    if verts.is_empty() {
        return LpOutcome::Empty;
    }
    // The recession cone is generated by rays along the axes or along
    // constraint lines, so it suffices to test those candidates.
    let mut rays = vec![
        (Rational::from(1), Rational::zero()),
        (Rational::zero(), Rational::from(1)),
    ];
    for h in hs {
        rays.push((h.a2, -h.a1));
        rays.push((-h.a2, h.a1));
    }
    let unbounded = rays.iter().any(|&(d1, d2)| {
        !d1.is_negative()
            && !d2.is_negative()
            && hs.iter().all(|h| !(h.a1 * d1 + h.a2 * d2).is_positive())
            && (c1 * d1 + c2 * d2).is_positive()
    });
    if unbounded {
        return LpOutcome::Unbounded;
    }
    let best = verts
        .iter()
        .map(|p| c1 * p.r1 + c2 * p.r2)
        .max()
        .expect("non-empty vertex list");
    LpOutcome::Max(best)
}

/// Scales to coprime integer coefficients with the same orientation.
pub(crate) fn normalize(h: &Halfspace) -> Halfspace {
    let l = h.a1.denom().lcm(h.a2.denom()).lcm(h.b.denom());
    let (a1, a2, b) = (
        (h.a1 * l).to_integer(),
        (h.a2 * l).to_integer(),
        (h.b * l).to_integer(),
    );
    let g = a1.gcd(&a2).gcd(&b).max(1);
    Halfspace::int(a1 / g, a2 / g, b / g)
}

/// Clockwise walk starting from the lexicographically smallest vertex.
pub(crate) fn order_clockwise(mut pts: Vec<RatePoint>) -> Vec<RatePoint> {
    pts.sort_by(|a, b| (a.r1, a.r2).cmp(&(b.r1, b.r2)));
    if pts.len() <= 2 {
        return pts;
    }
    let origin = pts[0];
    let mut rest = pts.split_off(1);
    rest.sort_by(|a, b| {
        let (ax, ay) = (a.r1 - origin.r1, a.r2 - origin.r2);
        let (bx, by) = (b.r1 - origin.r1, b.r2 - origin.r2);
        let cross = ax * by - ay * bx;
        if cross.is_negative() {
            Ordering::Less
        } else if cross.is_positive() {
            Ordering::Greater
        } else {
            (ax * ax + ay * ay).cmp(&(bx * bx + by * by))
        }
    });
    pts.extend(rest);
    pts
}
