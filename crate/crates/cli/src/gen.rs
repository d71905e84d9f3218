//! Seeded random instance generators.
//!
//! Every generator draws from a caller-supplied ChaCha stream, so a campaign
//! seed determines each instance byte for byte. Regions use at most four
//! boxes with endpoints on the 1/8 grid in [0, 2]; functions use at most
//! eight breakpoints with values on the same grid. Hypothesis-satisfying
//! instances are produced by rejection with a bounded attempt count and a
//! deterministic fallback.

use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wbk_core::plfn::PlFunction;
use wbk_core::poset::FinitePoset;
use wbk_core::region::{Block, Interval, Region, Space};
use wbk_core::scalar::{rat, Rat};

const REJECTION_CAP: usize = 200;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-instance stream split deterministically from the campaign seed.
pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(
        seed ^ (index as u64).wrapping_mul(0xA076_1D64_78BD_642F),
    ))
}

fn grid(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rat {
    rat(rng.gen_range(lo..=hi), 8)
}

/// A compact 1D space: one or two disjoint closed intervals on the grid.
pub fn compact_space(rng: &mut ChaCha8Rng) -> Space {
    let blocks = if rng.gen_bool(0.7) {
        let a = rng.gen_range(0..=8);
        let w = rng.gen_range(1..=8);
        vec![Block::new(vec![Interval::closed(rat(a, 8), rat(a + w, 8))]).unwrap()]
    } else {
        let a = rng.gen_range(0..=4);
        let w1 = rng.gen_range(1..=4);
        let gap = rng.gen_range(1..=3);
        let w2 = rng.gen_range(1..=4);
        vec![
            Block::new(vec![Interval::closed(rat(a, 8), rat(a + w1, 8))]).unwrap(),
            Block::new(vec![Interval::closed(
                rat(a + w1 + gap, 8),
                rat(a + w1 + gap + w2, 8),
            )])
            .unwrap(),
        ]
    };
    Space::new(Region::from_blocks(1, blocks).unwrap()).unwrap()
}

/// A random open subset of `K`: the trace of a union of up to two open grid
/// intervals. Open in the subspace topology by construction.
pub fn open_in(rng: &mut ChaCha8Rng, k: &Space) -> Region {
    let mut open = Region::empty(1);
    for _ in 0..rng.gen_range(1..=2) {
        let a = rng.gen_range(0..=15);
        let w = rng.gen_range(1..=(16 - a));
        let iv = Region::from_interval(Interval::open(rat(a, 8), rat(a + w, 8)));
        open = open.union(&iv).unwrap();
    }
    open.intersect(k.region()).unwrap()
}

/// `(U, V, K)` with `U`, `V` open in `K`, `U` inside `V`, and the compact
/// containment verdict equal to `positive`; rejection with a deterministic
/// fallback.
pub fn region_triple(rng: &mut ChaCha8Rng, positive: bool) -> (Region, Region, Space) {
    for _ in 0..REJECTION_CAP {
        let k = compact_space(rng);
        let v = open_in(rng, &k);
        let u = open_in(rng, &k).intersect(&v).unwrap();
        if k.compactly_contained(&u, &v).unwrap() == positive {
            return (u, v, k);
        }
    }
    // Shrinkage fallbacks with known verdicts.
    if positive {
        let k = Space::new(Region::from_interval(Interval::closed(rat(0, 1), rat(2, 1))))
            .unwrap();
        let v = Region::from_interval(Interval::open(rat(0, 1), rat(2, 1)));
        let u = Region::from_interval(Interval::open(rat(1, 4), rat(3, 4)));
        (u, v, k)
    } else {
        let k = Space::new(Region::from_interval(Interval::closed(rat(0, 1), rat(1, 1))))
            .unwrap();
        let v = Region::from_interval(Interval::open(rat(0, 1), rat(1, 1)));
        (v.clone(), v, k)
    }
}

/// Builds a function from interior knots, padding every component endpoint
/// with an explicit (possibly zero) value.
pub fn pl_from_knots(space: &Space, knots: &[(Rat, Rat)]) -> PlFunction {
    let mut points: Vec<(Rat, Rat)> = knots.to_vec();
    for b in space.region().boxes() {
        let iv = &b.intervals()[0];
        for end in [iv.lo(), iv.hi()] {
            let x = end.as_finite().expect("compact space").clone();
            if !points.iter().any(|(px, _)| px == &x) {
                points.push((x, Rat::zero()));
            }
        }
    }
    points.sort_by(|a, b| a.0.cmp(&b.0));
    points.dedup_by(|a, b| a.0 == b.0);
    let (bp, val): (Vec<Rat>, Vec<Rat>) = points.into_iter().unzip();
    PlFunction::new(space.clone(), bp, val).expect("generated knots are valid")
}

/// A random function on `K`: up to eight breakpoints, values on the grid
/// with a bias toward zero so supports have boundaries inside the space.
pub fn pl_function(rng: &mut ChaCha8Rng, space: &Space) -> PlFunction {
    let mut knots: Vec<(Rat, Rat)> = Vec::new();
    // Keep the total breakpoint count within eight: component endpoints are
    // mandatory, inner knots fill the rest of the budget.
    let inner_cap = if space.region().boxes().len() > 1 { 2 } else { 5 };
    for b in space.region().boxes() {
        let iv = &b.intervals()[0];
        let lo = iv.lo().as_finite().unwrap().clone();
        let hi = iv.hi().as_finite().unwrap().clone();
        if lo == hi {
            if rng.gen_bool(0.5) {
                knots.push((lo, grid(rng, 0, 16)));
            }
            continue;
        }
        for _ in 0..rng.gen_range(0..=inner_cap) {
            let t = rat(rng.gen_range(1..=7), 8);
            let x = &lo + (&hi - &lo) * t;
            let v = if rng.gen_bool(0.35) { Rat::zero() } else { grid(rng, 0, 16) };
            knots.push((x, v));
        }
        for end in [lo, hi] {
            if rng.gen_bool(0.3) {
                knots.push((end, grid(rng, 1, 16)));
            }
        }
    }
    knots.sort_by(|a, b| a.0.cmp(&b.0));
    knots.dedup_by(|a, b| a.0 == b.0);
    pl_from_knots(space, &knots)
}

pub fn pl_nonzero(rng: &mut ChaCha8Rng, space: &Space) -> PlFunction {
    for _ in 0..REJECTION_CAP {
        let f = pl_function(rng, space);
        if !f.is_zero() {
            return f;
        }
    }
    // Fallback: a tent over the first non-degenerate component, or an
    // indicator of an isolated point.
    let b = &space.region().boxes()[0];
    let iv = &b.intervals()[0];
    let lo = iv.lo().as_finite().unwrap().clone();
    let hi = iv.hi().as_finite().unwrap().clone();
    if lo == hi {
        pl_from_knots(space, &[(lo, rat(1, 1))])
    } else {
        let mid = (&lo + &hi) / rat(2, 1);
        pl_from_knots(space, &[(mid, rat(1, 1))])
    }
}

/// `(a, b)` on a shared space with `[a]` way-below `[b]` by construction: a
/// tent strictly inside one block of the support of `b`, or zero.
pub fn way_below_pair(rng: &mut ChaCha8Rng, space: &Space) -> (PlFunction, PlFunction) {
    let b = pl_nonzero(rng, space);
    let supp = b.open_support();
    let blocks = supp.boxes();
    let pick = &blocks[rng.gen_range(0..blocks.len())];
    let iv = &pick.intervals()[0];
    let lo = iv.lo().as_finite().unwrap().clone();
    let hi = iv.hi().as_finite().unwrap().clone();
    let a = if lo == hi {
        pl_from_knots(space, &[(lo, grid(rng, 1, 16))])
    } else {
        let margin = (&hi - &lo) / rat(8, 1);
        let left = &lo + &margin;
        let right = &hi - &margin;
        let peak = (&left + &right) / rat(2, 1);
        pl_from_knots(
            space,
            &[
                (left, Rat::zero()),
                (peak, grid(rng, 1, 16)),
                (right, Rat::zero()),
            ],
        )
    };
    (a, b)
}

/// Adversarial pair: the support of `a` shares an endpoint with the support
/// of `b`, so closure containment fails right at the boundary.
pub fn boundary_touching_pair(rng: &mut ChaCha8Rng, space: &Space) -> (PlFunction, PlFunction) {
    let b = pl_nonzero(rng, space);
    let supp = b.open_support();
    let pick = supp
        .boxes()
        .iter()
        .find(|bl| {
            let iv = &bl.intervals()[0];
            iv.lo() != iv.hi()
        })
        .cloned();
    let a = match pick {
        Some(block) => {
            let iv = &block.intervals()[0];
            let lo = iv.lo().as_finite().unwrap().clone();
            let hi = iv.hi().as_finite().unwrap().clone();
            let mid = (&lo + &hi) / rat(2, 1);
            if rng.gen_bool(0.5) {
                // Share the left endpoint.
                let peak = (&lo + &mid) / rat(2, 1);
                pl_from_knots(
                    space,
                    &[(lo, Rat::zero()), (peak, grid(rng, 1, 16)), (mid, Rat::zero())],
                )
            } else {
                // Share the right endpoint.
                let peak = (&mid + &hi) / rat(2, 1);
                pl_from_knots(
                    space,
                    &[(mid, Rat::zero()), (peak, grid(rng, 1, 16)), (hi, Rat::zero())],
                )
            }
        }
        // Support is a union of isolated points; reuse b itself, whose
        // support trivially shares endpoints with itself.
        None => b.clone(),
    };
    (a, b)
}

/// A random pair for the decider-agreement campaign; mixes unconstrained,
/// constructed-positive, and equal-support cases.
pub fn agreement_pair(rng: &mut ChaCha8Rng, space: &Space) -> (PlFunction, PlFunction) {
    match rng.gen_range(0..4) {
        0 => way_below_pair(rng, space),
        1 => {
            let b = pl_nonzero(rng, space);
            let a = b.scale(&rat(rng.gen_range(1..=4), 2)).unwrap();
            (a, b)
        }
        _ => (pl_function(rng, space), pl_function(rng, space)),
    }
}

/// A validated random poset: the reflexive-transitive closure of a random
/// relation, rejected when antisymmetry breaks.
pub fn poset(rng: &mut ChaCha8Rng, max_n: usize) -> FinitePoset {
    loop {
        let n = rng.gen_range(1..=max_n);
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = i == j || rng.gen_bool(0.3);
            }
        }
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if !leq[i][j] {
                        continue;
                    }
                    let row_j = leq[j].clone();
                    for (l, reach) in row_j.iter().enumerate() {
                        if *reach && !leq[i][l] {
                            leq[i][l] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if let Ok(p) = FinitePoset::new(n, leq) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let mut a = instance_rng(7, 3);
        let mut b = instance_rng(7, 3);
        let ta = region_triple(&mut a, true);
        let tb = region_triple(&mut b, true);
        assert_eq!(ta.0, tb.0);
        assert_eq!(ta.1, tb.1);
        assert_eq!(ta.2.region(), tb.2.region());
    }

    #[test]
    fn triples_meet_their_verdicts() {
        for i in 0..40 {
            let mut rng = instance_rng(11, i);
            let want = i % 2 == 0;
            let (u, v, k) = region_triple(&mut rng, want);
            assert!(k.is_open_in(&u).unwrap());
            assert!(k.is_open_in(&v).unwrap());
            assert!(u.is_subset(&v).unwrap());
            assert_eq!(k.compactly_contained(&u, &v).unwrap(), want);
        }
    }

    #[test]
    fn way_below_pairs_hold() {
        for i in 0..40 {
            let mut rng = instance_rng(5, i);
            let space = compact_space(&mut rng);
            let (a, b) = way_below_pair(&mut rng, &space);
            let cl = space.relative_closure(&a.open_support()).unwrap();
            assert!(cl.is_subset(&b.open_support()).unwrap(), "instance {}", i);
        }
    }

    #[test]
    fn boundary_pairs_share_an_endpoint() {
        let mut shared = 0;
        for i in 0..40 {
            let mut rng = instance_rng(9, i);
            let space = compact_space(&mut rng);
            let (a, b) = boundary_touching_pair(&mut rng, &space);
            let sa = a.open_support();
            let sb = b.open_support();
            assert!(sa.is_subset(&sb).unwrap(), "support containment holds");
            // Shared endpoint: some endpoint of a support block of a equals
            // an endpoint of a support block of b.
            let ends = |r: &Region| -> Vec<Rat> {
                r.boxes()
                    .iter()
                    .flat_map(|bl| {
                        let iv = &bl.intervals()[0];
                        [
                            iv.lo().as_finite().unwrap().clone(),
                            iv.hi().as_finite().unwrap().clone(),
                        ]
                    })
                    .collect()
            };
            if ends(&sa).iter().any(|x| ends(&sb).contains(x)) {
                shared += 1;
            }
        }
        assert_eq!(shared, 40);
    }

    #[test]
    fn pl_functions_stay_within_breakpoint_budget() {
        for i in 0..60 {
            let mut rng = instance_rng(21, i);
            let space = compact_space(&mut rng);
            let f = pl_function(&mut rng, &space);
            assert!(f.breakpoints().len() <= 8, "instance {}", i);
        }
    }

    #[test]
    fn random_posets_are_valid() {
        for i in 0..30 {
            let mut rng = instance_rng(13, i);
            let p = poset(&mut rng, 7);
            assert!(!p.is_empty() && p.len() <= 7);
        }
    }
}
