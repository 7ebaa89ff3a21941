//! Per-regime component-rate constraints, rate definitions and allocation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier_motzkin::{rate_def, IneqSystem, LinearIneq, RateDef};
use crate::gf2signal::ChannelParams;
use crate::rate_region::{lemma_region, regime_of, RatePoint, Regime};

/// Component-rate variables of each regime, in declaration order.
pub fn regime_vars(regime: Regime) -> &'static [&'static str] {
    match regime {
        Regime::A => &["Rc1", "Rc2", "R1d", "R2d"],
        Regime::B => &["Rc", "R1d", "R2d", "Rn", "R1d_bar", "R2d_bar"],
        Regime::C => &["Rc", "R1d", "R2d", "R1f", "R2f", "Rf_bar"],
        Regime::D => &["R1f", "R2f", "Rf_bar1", "Rf_bar2", "R1d", "R2d", "Rn1", "Rn2"],
    }
}

/// The regime's inequalities at `p`. Fails when `p` lies outside the regime.
pub fn constraint_system(regime: Regime, p: &ChannelParams) -> Result<IneqSystem> {
    if !regime.admits(p) {
        return Err(Error::Parameter(format!("{p} does not belong to regime {regime}")));
    }
    constraint_system_unchecked(regime, p)
}

/// As [`constraint_system`] without the regime check; right-hand sides such
/// as `n_s - n_c` may then be negative.
pub fn constraint_system_unchecked(regime: Regime, p: &ChannelParams) -> Result<IneqSystem> {
    let (nc, ns, nr, nf) = (p.nc as i64, p.ns as i64, p.nr as i64, p.nf as i64);
    let rows: Vec<(Vec<(&str, i64)>, i64)> = match regime {
        Regime::A => vec![
            (vec![("Rc1", 1), ("Rc2", 1), ("R1d", 1), ("R2d", 1)], ns),
            (vec![("Rc1", 1), ("Rc2", 2), ("R1d", 1), ("R2d", 1)], nc),
            (vec![("Rc1", 1)], nr - nc),
        ],
        Regime::B => vec![
            (vec![("Rc", 1), ("R1d", 1), ("R2d", 1), ("Rn", 1)], nc),
            (vec![("R1d_bar", 1), ("R2d_bar", 1)], ns - nc),
            (vec![("Rn", 1)], ns - nc),
            (
                vec![
                    ("R1d_bar", 1),
                    ("R2d_bar", 1),
                    ("Rc", 2),
                    ("R1d", 1),
                    ("R2d", 1),
                    ("Rn", 1),
                ],
                nr,
            ),
        ],
        Regime::C => vec![
            (
                vec![("Rc", 1), ("R1d", 1), ("R2d", 1), ("R1f", 1), ("R2f", 1), ("Rf_bar", 1)],
                ns,
            ),
            (vec![("Rc", 1), ("R1d", 1), ("R2d", 1)], nr),
            (vec![("R1f", 1), ("Rf_bar", 1)], nf),
            (vec![("R2f", 1), ("Rf_bar", 1)], nf),
            (
                vec![("Rc", 2), ("R1d", 1), ("R2d", 1), ("R1f", 1), ("R2f", 1), ("Rf_bar", 2)],
                nc,
            ),
        ],
        Regime::D => vec![
            (
                vec![
                    ("R1f", 1),
                    ("R2f", 1),
                    ("Rf_bar1", 2),
                    ("Rf_bar2", 1),
                    ("R1d", 1),
                    ("R2d", 1),
                    ("Rn1", 2),
                    ("Rn2", 1),
                ],
                nc,
            ),
            (vec![("Rf_bar2", 1), ("Rn2", 1)], ns - nc),
            (vec![("R1d", 1), ("R2d", 1), ("Rn1", 1), ("Rn2", 1)], nr),
            (vec![("R1f", 1), ("Rf_bar1", 1), ("Rf_bar2", 1)], nf),
            (vec![("R2f", 1), ("Rf_bar1", 1), ("Rf_bar2", 1)], nf),
        ],
    };
    let mut system = IneqSystem::new(regime_vars(regime))?;
    for (terms, bound) in rows {
        system.push(LinearIneq::int(&terms, bound))?;
    }
    Ok(system)
}

/// Where regime C stacks the D block inside each source signal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DPlacement {
    /// Directly below the C block; the relay's D sum gets levels of its own
    /// at the destinations.
    Separate,
    /// Lowest block, so the relay's D sum lands on the partner's D block and
    /// is recovered by subtracting it. The partner's F-bar block then has to
    /// stay above the relay's noise floor.
    Shared,
}

/// The systems of the concrete stackings. Every regime but C has one; the
/// union of C's two reaches every integer point of [`constraint_system`].
pub fn placement_systems(regime: Regime, p: &ChannelParams) -> Result<Vec<(DPlacement, IneqSystem)>> {
    if regime != Regime::C {
        return Ok(vec![(DPlacement::Separate, constraint_system_unchecked(regime, p)?)]);
    }
    let mut out = Vec::new();
    for (placement, fbar_relay, d_cross) in [(DPlacement::Separate, 1, 2), (DPlacement::Shared, 2, 1)] {
        let base = constraint_system_unchecked(regime, p)?;
        let mut system = IneqSystem::new(base.vars())?;
        for ineq in base.inequalities() {
            let mut ineq = ineq.clone();
            if ineq.coefficient("Rc") == 2.into() {
                for v in ["R1d", "R2d"] {
                    ineq.coefficients.insert(v.to_string(), d_cross.into());
                }
            } else if ineq.coefficient("R1f") == 1.into() && ineq.coefficient("R2f") == 1.into() {
                ineq.coefficients.insert("Rf_bar".into(), fbar_relay.into());
            }
            system.push(ineq)?;
        }
        out.push((placement, system));
    }
    Ok(out)
}

/// `(R1, R2)` as linear maps of the regime's component rates.
pub fn rate_definitions(regime: Regime) -> (RateDef, RateDef) {
    let (r1, r2): (&[(&str, i64)], &[(&str, i64)]) = match regime {
        Regime::A => (
            &[("Rc1", 1), ("Rc2", 1), ("R1d", 1)],
            &[("Rc1", 1), ("Rc2", 1), ("R2d", 1)],
        ),
        Regime::B => (
            &[("R1d", 1), ("R1d_bar", 1), ("Rc", 1), ("Rn", 1)],
            &[("R2d", 1), ("R2d_bar", 1), ("Rc", 1), ("Rn", 1)],
        ),
        Regime::C => (
            &[("Rc", 1), ("R1d", 1), ("R1f", 1), ("Rf_bar", 1)],
            &[("Rc", 1), ("R2d", 1), ("R2f", 1), ("Rf_bar", 1)],
        ),
        Regime::D => (
            &[("R1f", 1), ("Rf_bar1", 1), ("Rf_bar2", 1), ("R1d", 1), ("Rn1", 1), ("Rn2", 1)],
            &[("R2f", 1), ("Rf_bar1", 1), ("Rf_bar2", 1), ("R2d", 1), ("Rn1", 1), ("Rn2", 1)],
        ),
    };
    (rate_def(r1), rate_def(r2))
}

/// Integer component rates for one regime.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RateAllocation {
    pub regime: Regime,
    pub values: BTreeMap<String, i64>,
}

impl RateAllocation {
    pub fn zero(regime: Regime) -> Self {
        Self {
            regime,
            values: regime_vars(regime).iter().map(|v| (v.to_string(), 0)).collect(),
        }
    }

    /// Builds from `(name, value)` pairs; unnamed variables are 0.
    pub fn from_pairs(regime: Regime, pairs: &[(&str, i64)]) -> Result<Self> {
        let mut alloc = Self::zero(regime);
        for (k, v) in pairs {
            match alloc.values.get_mut(*k) {
                Some(slot) if *v >= 0 => *slot = *v,
                Some(_) => return Err(Error::Parameter(format!("{k} must be non-negative"))),
                None => {
                    return Err(Error::Parameter(format!(
                        "{k} is not a component rate of regime {regime}"
                    )))
                }
            }
        }
        Ok(alloc)
    }

    pub fn get(&self, var: &str) -> usize {
        self.values.get(var).copied().unwrap_or(0).max(0) as usize
    }

    /// `(R1, R2)` induced through the regime's rate definitions.
    pub fn rates(&self) -> (i64, i64) {
        let (r1, r2) = rate_definitions(self.regime);
        let eval = |d: &RateDef| d.iter().map(|(v, c)| c * self.get(v) as i64).sum();
        (eval(&r1), eval(&r2))
    }

    /// True iff some concrete stacking carries the allocation at `p`.
    pub fn is_feasible(&self, p: &ChannelParams) -> bool {
        self.placement(p).is_some()
    }

    /// The first stacking whose system holds at `p`.
    pub fn placement(&self, p: &ChannelParams) -> Option<DPlacement> {
        let systems = placement_systems(self.regime, p).ok()?;
        systems
            .into_iter()
            .find(|(_, system)| {
                system.inequalities().iter().all(|ineq| {
                    let lhs: i64 = ineq
                        .coefficients
                        .iter()
                        .map(|(v, c)| c.to_integer() * self.get(v) as i64)
                        .sum();
                    num_rational::Ratio::from(lhs) <= ineq.bound
                })
            })
            .map(|(placement, _)| placement)
    }
}

/// Preference key, smaller is better. D-type components are used only when
/// nothing else reaches the target; the remaining order is regime specific.
fn preference(regime: Regime, v: &BTreeMap<&str, i64>) -> Vec<i64> {
    let g = |k: &str| v[k];
    let mut key = match regime {
        Regime::A => vec![g("R1d") + g("R2d"), g("R1d"), g("R2d"), -g("Rc1")],
        Regime::B => vec![
            g("R1d") + g("R2d") + g("R1d_bar") + g("R2d_bar"),
            g("R1d"),
            g("R2d"),
            g("R1d_bar"),
            g("R2d_bar"),
            -g("Rc"),
            -g("Rn"),
        ],
        Regime::C => vec![g("R1d") + g("R2d"), g("R1d"), g("R2d"), -g("Rc"), -g("Rf_bar")],
        Regime::D => vec![
            g("R1d") + g("R2d"),
            g("R1d"),
            g("R2d"),
            -(g("Rf_bar1") + g("Rf_bar2")),
            -(g("Rn1") + g("Rn2")),
            -g("Rf_bar2"),
            -g("Rn2"),
        ],
    };
    key.extend(regime_vars(regime).iter().map(|k| v[*k]));
    key
}

/// Integer allocation reaching `target` exactly in the regime of `p`.
///
/// Searches every assignment with each component at most the largest link
/// gain and keeps the one with the smallest preference key.
pub fn allocate(p: &ChannelParams, target: (i64, i64)) -> Result<RateAllocation> {
    let regime = regime_of(p);
    let point = RatePoint::int(target.0, target.1);
    let region = lemma_region(p);
    if let Some(h) = region.violated_by(&point) {
        return Err(Error::InfeasibleTarget {
            r1: target.0,
            r2: target.1,
            reason: format!("violates {h}"),
        });
    }
    allocate_in(regime, p, target)
}

/// As [`allocate`] for an explicit regime and without the region pre-check.
pub fn allocate_in(regime: Regime, p: &ChannelParams, target: (i64, i64)) -> Result<RateAllocation> {
    let vars = regime_vars(regime);
    let (r1, r2) = rate_definitions(regime);
    let bound = p.nc.max(p.ns).max(p.nr).max(p.nf) as i64;
    let mut best: Option<(Vec<i64>, Vec<i64>)> = None;
    for (rank, (_, system)) in placement_systems(regime, p)?.into_iter().enumerate() {
        // Rows as integer vectors, with the two target equalities appended.
        let mut rows: Vec<(Vec<i64>, i64)> = system
            .inequalities()
            .iter()
            .map(|i| {
                (
                    vars.iter().map(|v| i.coefficient(v).to_integer()).collect(),
                    i.bound.to_integer(),
                )
            })
            .collect();
        for (def, t) in [(&r1, target.0), (&r2, target.1)] {
            let coeffs: Vec<i64> = vars.iter().map(|v| *def.get(*v).unwrap_or(&0)).collect();
            rows.push((coeffs.iter().map(|c| -c).collect(), -t));
            rows.push((coeffs, t));
        }
        let mut values = vec![0i64; vars.len()];
        search(&rows, bound, 0, &mut values, &mut |vals| {
            let named: BTreeMap<&str, i64> =
                vars.iter().copied().zip(vals.iter().copied()).collect();
            let mut key = preference(regime, &named);
            key.push(rank as i64);
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, vals.to_vec()));
            }
        });
    }
    let (_, vals) = best.ok_or_else(|| Error::InfeasibleTarget {
        r1: target.0,
        r2: target.1,
        reason: format!("no integer allocation in regime {regime} at {p}"),
    })?;
    Ok(RateAllocation {
        regime,
        values: vars.iter().map(|v| v.to_string()).zip(vals).collect(),
    })
}

fn search(
    rows: &[(Vec<i64>, i64)],
    bound: i64,
    depth: usize,
    values: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64]),
) {
    let ok = rows.iter().all(|(coeffs, b)| {
        let lhs: i64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i < depth {
                    c * values[i]
                } else if *c < 0 {
                    c * bound
                } else {
                    0
                }
            })
            .sum();
        lhs <= *b
    });
    if !ok {
        return;
    }
    if depth == values.len() {
        visit(values);
        return;
    }
    for x in 0..=bound {
        values[depth] = x;
        search(rows, bound, depth + 1, values, visit);
    }
    values[depth] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(nc: usize, ns: usize, nr: usize, nf: usize) -> ChannelParams {
        ChannelParams::new(nc, ns, nr, nf)
    }

    #[test]
    fn system_sizes() {
        assert_eq!(
            constraint_system(Regime::A, &p(2, 1, 3, 0)).unwrap().inequalities().len(),
            3
        );
        let c = constraint_system(Regime::C, &p(6, 3, 1, 1)).unwrap();
        assert_eq!(c.inequalities().len(), 5);
        assert_eq!(
            c.inequalities()[2],
            LinearIneq::int(&[("R1f", 1), ("Rf_bar", 1)], 1)
        );
        assert!(matches!(
            constraint_system(Regime::C, &p(2, 1, 3, 0)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn equal_source_and_cross_gains_shut_the_private_window() {
        let s = constraint_system(Regime::B, &p(2, 2, 3, 0)).unwrap();
        assert!(s
            .inequalities()
            .iter()
            .any(|i| i.coefficient("Rn") == 1.into() && i.bound == 0.into()));
        let a = allocate_in(Regime::B, &p(2, 2, 3, 0), (1, 1)).unwrap();
        assert_eq!(a.get("Rn") + a.get("R1d_bar") + a.get("R2d_bar"), 0);
    }

    #[test]
    fn rate_definitions_are_user_symmetric() {
        for regime in Regime::ALL {
            let (r1, r2) = rate_definitions(regime);
            let swap = |k: &str| k.replace('1', "#").replace('2', "1").replace('#', "2");
            let mapped: RateDef = r1
                .iter()
                .map(|(k, v)| {
                    let s = swap(k);
                    // Split indices such as Rc1/Rf_bar2 are not user indices.
                    if r2.contains_key(&s) { (s, *v) } else { (k.clone(), *v) }
                })
                .collect();
            assert_eq!(mapped, r2, "{regime}");
        }
        let (r1, _) = rate_definitions(Regime::D);
        assert_eq!(r1.len(), 6);
    }

    #[test]
    fn allocation_examples() {
        let a = allocate(&p(2, 3, 1, 1), (2, 1)).unwrap();
        assert_eq!(a.regime, Regime::D);
        assert_eq!(a.get("Rn2"), 1);
        assert_eq!(a.get("R1f"), 1);
        assert_eq!(a.values.values().sum::<i64>(), 2);

        let c = allocate(&p(6, 3, 1, 1), (2, 2)).unwrap();
        assert_eq!(c.regime, Regime::C);
        assert_eq!((c.get("Rc"), c.get("Rf_bar")), (1, 1));
        assert_eq!(c.values.values().sum::<i64>(), 2);

        let z = allocate(&p(3, 2, 1, 2), (0, 0)).unwrap();
        assert!(z.values.values().all(|v| *v == 0));
    }

    #[test]
    fn out_of_region_target_is_rejected() {
        match allocate(&p(2, 3, 1, 1), (3, 0)) {
            Err(Error::InfeasibleTarget { reason, .. }) => assert!(reason.contains("R1 <= 2")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
