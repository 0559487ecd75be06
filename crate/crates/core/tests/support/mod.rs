//! Random small instances: coset vertex orbits, induced monomial arrow orbits and
//! orbit-summed potentials.

use std::sync::Arc;

use qpskew::action::MonomialAction;
use qpskew::group::{characters_of, AbelianGroup, GroupElement, Subgroup};
use qpskew::quiver::{Potential, Quiver};
use qpskew::scalar::Scalar;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct CorpusInstance {
    pub name: String,
    pub act: MonomialAction,
    pub w: Potential,
}

pub const GROUPS: [&[u32]; 4] = [&[2], &[3], &[2, 2], &[3, 3]];

pub fn subgroups(g: &Arc<AbelianGroup>) -> Vec<Arc<Subgroup>> {
    let mut out: Vec<Arc<Subgroup>> = Vec::new();
    for a in g.elements() {
        for b in g.elements() {
            let h = Subgroup::generated(g, &[a, b]);
            if !out.iter().any(|x| x.elements() == h.elements()) {
                out.push(h);
            }
        }
    }
    out
}

fn coset_reps(g: &AbelianGroup, h: &Subgroup) -> Vec<GroupElement> {
    let mut reps: Vec<GroupElement> = Vec::new();
    for x in g.elements() {
        if !reps.iter().any(|&r| h.contains(g.op(x, g.inverse(r)))) {
            reps.push(x);
        }
    }
    reps
}

/// Index of the coset of `x` and the element `s ∈ h` with `x = reps[k] + s`.
fn split(g: &AbelianGroup, h: &Subgroup, reps: &[GroupElement], x: GroupElement) -> (usize, GroupElement) {
    reps.iter()
        .enumerate()
        .find_map(|(k, &r)| {
            let s = g.op(x, g.inverse(r));
            h.contains(s).then_some((k, s))
        })
        .expect("cosets cover the group")
}

struct Orbit {
    stab: Arc<Subgroup>,
    reps: Vec<GroupElement>,
    first: usize,
}

pub fn random_instance(rng: &mut ChaCha8Rng, factors: &[u32], name: String) -> CorpusInstance {
    let g = AbelianGroup::new(factors.to_vec());
    let subs = subgroups(&g);
    let mut orbits: Vec<Orbit> = Vec::new();
    let mut vertices = Vec::new();
    let mut budget = 4;
    while budget > 0 && (orbits.is_empty() || rng.gen_bool(0.6)) {
        let fits: Vec<&Arc<Subgroup>> = subs.iter().filter(|h| g.order() / h.order() <= budget).collect();
        let h = (*fits.choose(rng).expect("whole group fits")).clone();
        let reps = coset_reps(&g, &h);
        budget -= reps.len();
        let o = orbits.len();
        orbits.push(Orbit { stab: h, reps: reps.clone(), first: vertices.len() });
        for k in 0..reps.len() {
            vertices.push(format!("v{o}_{k}"));
        }
    }
    let vertex_at = |o: usize, x: GroupElement| -> usize {
        let orb = &orbits[o];
        orb.first + split(&g, &orb.stab, &orb.reps, x).0
    };

    // arrow orbits: arrows t·u → t·v for t in G/S, with g(arrow_t) = χ(s)·arrow_{t'} when g + t = t' + s
    struct ArrowOrbit {
        stab: Arc<Subgroup>,
        reps: Vec<GroupElement>,
        chi: qpskew::group::Character,
        first: usize,
    }
    let mut arrow_orbits: Vec<ArrowOrbit> = Vec::new();
    let mut arrows: Vec<(String, String, String)> = Vec::new();
    let mut left = 6;
    for _ in 0..rng.gen_range(1..=4) {
        let o1 = rng.gen_range(0..orbits.len());
        let o2 = rng.gen_range(0..orbits.len());
        let c = *orbits[o2].reps.choose(rng).expect("nonempty orbit");
        let stab = orbits[o1].stab.intersection(&orbits[o2].stab);
        let reps = coset_reps(&g, &stab);
        if reps.len() > left {
            continue;
        }
        left -= reps.len();
        let chars = characters_of(&stab);
        let chi = chars.choose(rng).expect("trivial character exists").clone();
        let n = arrow_orbits.len();
        for (k, &t) in reps.iter().enumerate() {
            let s = vertex_at(o1, t);
            let e = vertex_at(o2, g.op(t, c));
            arrows.push((format!("a{n}_{k}"), vertices[s].clone(), vertices[e].clone()));
        }
        let first = arrows.len() - reps.len();
        arrow_orbits.push(ArrowOrbit { stab, reps, chi, first });
    }
    let q = Quiver::new(&vertices, &arrows).expect("generated ids are unique");

    let mut generators = Vec::new();
    for k in 0..factors.len() {
        let x = g.generator(k);
        let mut vperm = vec![0; vertices.len()];
        for (o, orb) in orbits.iter().enumerate() {
            for (i, &r) in orb.reps.iter().enumerate() {
                vperm[orb.first + i] = vertex_at(o, g.op(x, r));
            }
        }
        let mut images = vec![(Scalar::zero(), 0); arrows.len()];
        for ao in &arrow_orbits {
            for (i, &t) in ao.reps.iter().enumerate() {
                let (j, s) = split(&g, &ao.stab, &ao.reps, g.op(x, t));
                images[ao.first + i] = (ao.chi.at(s), ao.first + j);
            }
        }
        generators.push((vperm, images));
    }
    let act = MonomialAction::from_generators(&g, &q, &generators).expect("induced actions are homomorphisms");

    let cycles = q.cycle_classes(4);
    let mut w = Potential::zero(&q);
    if !cycles.is_empty() {
        for _ in 0..rng.gen_range(0..=3) {
            let c = cycles.choose(rng).expect("nonempty");
            let coeff = Scalar::from_int(*[1i64, 2, -1, 3].choose(rng).expect("nonempty"));
            let mut single = Potential::zero(&q);
            single.add_cycle(c, coeff).expect("cycle");
            for x in g.elements() {
                w = w.add(&act.apply_potential(x, &single));
            }
        }
    }
    CorpusInstance { name, act, w }
}

/// The fixed randomized corpus: `count` instances cycling through the four groups.
pub fn corpus(count: usize) -> Vec<CorpusInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_9a11);
    (0..count)
        .map(|n| {
            let factors = GROUPS[n % GROUPS.len()];
            random_instance(&mut rng, factors, format!("corpus#{n} Z{factors:?}"))
        })
        .collect()
}
