//! Property checks shared by the proptest suites and the acceptance run.

#![allow(dead_code)]

use ldbfn::fourier_motzkin::{project_to_rates, project_to_rates_in_order, IneqSystem};
use ldbfn::gf2signal::{channel_step, NetworkInputs};
use ldbfn::rate_region::{corner_points, lemma_region, outer_bound_region, regime_of, regions_equal, RateRegion};
use ldbfn::schemes::{allocate, build_scheme, constraint_system, placement_systems, rate_definitions, Scheme, Tx};
use ldbfn::{BitVector, ChannelParams};
use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut impl Rng, len: usize) -> BitVector {
    BitVector::from_bits((0..len).map(|_| rng.next_u64() >> 63 == 1).collect())
}

pub fn random_params(rng: &mut impl Rng, max: usize) -> ChannelParams {
    let mut g = || (rng.next_u64() % (max as u64 + 1)) as usize;
    ChannelParams::new(g(), g(), g(), g())
}

fn random_inputs(rng: &mut impl Rng, q: usize) -> NetworkInputs {
    NetworkInputs {
        x1: random_bits(rng, q),
        x2: random_bits(rng, q),
        xr: random_bits(rng, q),
        xf: random_bits(rng, q),
    }
}

/// The channel is GF(2)-linear: outputs of a sum are the sum of outputs.
pub fn channel_is_linear(p: &ChannelParams, seed: u64) -> Check {
    let mut rng = rng(seed);
    let q = p.q();
    let (a, b) = (random_inputs(&mut rng, q), random_inputs(&mut rng, q));
    let step = |x: &NetworkInputs| channel_step(x, p).map_err(|e| e.to_string());
    let sum = step(&a.xor(&b))?;
    let parts = step(&a)?.xor(&step(&b)?);
    if sum != parts {
        return Err(format!("{p}: channel_step(a ^ b) != channel_step(a) ^ channel_step(b)"));
    }
    if step(&NetworkInputs::zeros(q))? != step(&a.xor(&a))? {
        return Err(format!("{p}: zero input does not map to zero output"));
    }
    Ok(())
}

/// Packs random segments into every layout of `scheme` and reads them back.
/// Where segments overlap, the first one on a level is read and the rest are
/// supplied as known, which is how the decoders use overlapping layouts.
pub fn layouts_round_trip(scheme: &Scheme, seed: u64) -> Check {
    let mut rng = rng(seed);
    for tx in Tx::ALL {
        let layout = scheme.layout(tx);
        let placements = layout.placements();
        let values: Vec<BitVector> = placements.iter().map(|pl| random_bits(&mut rng, pl.len)).collect();
        let packed = layout
            .pack_with(|key| {
                let i = placements.iter().position(|pl| pl.key == *key).unwrap();
                Ok(values[i].clone())
            })
            .map_err(|e| e.to_string())?;
        let mut claimed = vec![false; layout.q()];
        let mut unknown = vec![false; placements.len()];
        for (i, pl) in placements.iter().enumerate() {
            let levels = pl.start..pl.start + pl.len;
            if claimed[levels.clone()].iter().all(|c| !c) {
                unknown[i] = true;
                claimed[levels].iter_mut().for_each(|c| *c = true);
            }
        }
        let read = layout
            .unpack_known(&packed, |key| {
                let i = placements.iter().position(|pl| pl.key == *key).unwrap();
                (!unknown[i]).then(|| values[i].clone())
            })
            .map_err(|e| format!("{tx}: {e}"))?;
        for (key, got) in read {
            let i = placements.iter().position(|pl| pl.key == key).unwrap();
            if got != values[i] {
                return Err(format!("{tx}: segment {} read back wrong", key.label()));
            }
        }
    }
    Ok(())
}

/// Scheme of every integer corner of every tuple in `[0, max]^4`.
pub fn corner_schemes(max: usize) -> Vec<Scheme> {
    ChannelParams::lattice(max)
        .flat_map(|p| {
            corner_points(&outer_bound_region(&p))
                .into_iter()
                .filter_map(move |c| c.as_integers().map(|t| (p, t)))
        })
        .map(|(p, t)| build_scheme(&p, &allocate(&p, t).unwrap()).unwrap())
        .collect()
}

/// The scheme system of `p`'s regime and, where there are several, the
/// systems of its concrete stackings.
pub fn systems_of(p: &ChannelParams) -> Vec<IneqSystem> {
    let regime = regime_of(p);
    let mut out = vec![constraint_system(regime, p).unwrap()];
    let stackings = placement_systems(regime, p).unwrap();
    if stackings.len() > 1 {
        out.extend(stackings.into_iter().map(|(_, s)| s));
    }
    out
}

pub fn shuffled(rng: &mut impl Rng, items: &[String]) -> Vec<String> {
    let mut v = items.to_vec();
    for i in (1..v.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        v.swap(i, j);
    }
    v
}

/// Projection is the same under `orders` random elimination orders.
pub fn elimination_order_is_irrelevant(p: &ChannelParams, orders: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let (r1, r2) = rate_definitions(regime_of(p));
    for system in systems_of(p) {
        let base = project_to_rates(&system, &r1, &r2).map_err(|e| e.to_string())?;
        for _ in 0..orders {
            let order = shuffled(&mut rng, system.vars());
            let refs: Vec<&str> = order.iter().map(String::as_str).collect();
            let other = project_to_rates_in_order(&system, &r1, &r2, &refs).map_err(|e| e.to_string())?;
            if !regions_equal(&base, &other) {
                return Err(format!("{p}: order {order:?} gives {other}, declared order gives {base}"));
            }
        }
    }
    Ok(())
}

fn bumped(p: &ChannelParams, k: usize) -> ChannelParams {
    let mut v = [p.nc, p.ns, p.nr, p.nf];
    v[k] += 1;
    ChannelParams::new(v[0], v[1], v[2], v[3])
}

/// Raising `n_s`, `n_r` or `n_f` never shrinks the outer bound or the
/// achievable region. `n_c` is excluded: a stronger cross link is also
/// stronger interference, see [`cross_gain_can_shrink_the_region`].
pub fn regions_grow_with_every_gain(p: &ChannelParams) -> Check {
    for k in 1..4 {
        let q = bumped(p, k);
        for (name, f) in [
            ("outer bound", outer_bound_region as fn(&ChannelParams) -> RateRegion),
            ("achievable", lemma_region),
        ] {
            if !f(p).is_subset_of(&f(&q)) {
                return Err(format!("{name} at {p} is not inside {name} at {q}"));
            }
        }
    }
    Ok(())
}

/// Swapping the users maps each region onto itself.
pub fn regions_are_symmetric(p: &ChannelParams) -> Check {
    for (name, r) in [("outer bound", outer_bound_region(p)), ("achievable", lemma_region(p))] {
        if !regions_equal(&r, &r.swapped()) {
            return Err(format!("{name} at {p} is not symmetric: {r}"));
        }
    }
    Ok(())
}

/// `(1,2,2,0) -> (2,2,2,0)` lowers the sum bound `max{n_r,n_c} + (n_s-n_c)^+`
/// from 3 to 2.
pub fn cross_gain_can_shrink_the_region() -> Check {
    let (weak, strong) = (ChannelParams::new(1, 2, 2, 0), ChannelParams::new(2, 2, 2, 0));
    if outer_bound_region(&weak).is_subset_of(&outer_bound_region(&strong)) {
        return Err(format!("outer bound at {weak} is inside the one at {strong}"));
    }
    Ok(())
}
