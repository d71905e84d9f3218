//! Verification campaigns: seeded random instances, one verifier per
//! statement, deterministic parallel execution, reproducible reports.

use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use wbk_core::cuntz::{
    tensor_way_below, way_below_epsilon, way_below_margin, way_below_support, AuditConfig,
    CuntzClass,
};
use wbk_core::ideal::{vanishing_locus, Ideal};
use wbk_core::plfn::{urysohn, PlFunction};
use wbk_core::region::Space;
use wbk_core::scalar::Rat;
use wbk_core::Error;

use crate::gen;
use crate::instance::Instance;

/// The statements that can be verified in bulk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TheoremId {
    /// Products of compactly contained open pairs stay compactly contained,
    /// and closures factor through products.
    Prop32,
    /// Multiplier witnesses exist exactly when containment is compact, and
    /// tensors of witnesses are witnesses.
    Thm41,
    /// Tensor way-below certificates with eps = eps1 * eps2 and a sampling
    /// audit.
    Thm42,
    /// Properness of generated ideals agrees with the vanishing locus and
    /// with strict positivity of the generator sum.
    #[value(name = "appendixA", alias = "appendixa")]
    AppendixA,
    /// Erosion exhaustion captures exactly the compactly contained pairs.
    Exhaustion,
    /// The three way-below deciders return identical verdicts.
    Agreement,
}

impl TheoremId {
    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::Prop32 => "prop32",
            TheoremId::Thm41 => "thm41",
            TheoremId::Thm42 => "thm42",
            TheoremId::AppendixA => "appendixA",
            TheoremId::Exhaustion => "exhaustion",
            TheoremId::Agreement => "agreement",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CampaignConfig {
    pub count: usize,
    pub seed: u64,
    pub jobs: Option<usize>,
    /// Omit wall time so report bytes are reproducible.
    pub no_timestamp: bool,
}

/// Campaign outcome; with `no_timestamp` the serialized form is a pure
/// function of `(theorem, count, seed)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignReport {
    pub theorem: String,
    pub seed: u64,
    pub count: usize,
    pub passes: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_counterexample: Option<Instance>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<u128>,
}

struct Outcome {
    instance: Instance,
    passed: bool,
}

fn fail(instance: Instance) -> Outcome {
    Outcome { instance, passed: false }
}

fn outcome(instance: Instance, passed: bool) -> Outcome {
    Outcome { instance, passed }
}

/// Runs one campaign. Instances are generated and verified independently
/// under per-index seeds, so results do not depend on the parallel schedule.
pub fn run_campaign(theorem: TheoremId, config: CampaignConfig) -> CampaignReport {
    let started = Instant::now();
    let verify = |index: usize| -> Outcome {
        let mut rng = gen::instance_rng(config.seed, index);
        match theorem {
            TheoremId::Prop32 => verify_product_containment(&mut rng),
            TheoremId::Thm41 => verify_tensor_witness(&mut rng, index),
            TheoremId::Thm42 => verify_tensor_way_below(&mut rng, config.seed, index),
            TheoremId::AppendixA => verify_ideal_properness(&mut rng),
            TheoremId::Exhaustion => verify_exhaustion(&mut rng, index),
            TheoremId::Agreement => verify_decider_agreement(&mut rng, index),
        }
    };

    let run = || -> Vec<Outcome> { (0..config.count).into_par_iter().map(verify).collect() };
    let outcomes = match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    };

    let passes = outcomes.iter().filter(|o| o.passed).count();
    let failures = config.count - passes;
    let first_counterexample = outcomes
        .into_iter()
        .find(|o| !o.passed)
        .map(|o| o.instance);
    CampaignReport {
        theorem: theorem.name().to_string(),
        seed: config.seed,
        count: config.count,
        passes,
        failures,
        first_counterexample,
        wall_ms: if config.no_timestamp {
            None
        } else {
            Some(started.elapsed().as_millis())
        },
    }
}

/// Two compactly contained 1D pairs; their product must be compactly
/// contained in the product space, and closure must factor through the
/// product exactly, for both the inner and outer pair.
fn verify_product_containment(rng: &mut rand_chacha::ChaCha8Rng) -> Outcome {
    let (u1, v1, k1) = gen::region_triple(rng, true);
    let (u2, v2, k2) = gen::region_triple(rng, true);
    let u = u1.product(&u2);
    let v = v1.product(&v2);
    let instance = Instance::Region {
        u: u.clone(),
        v: v.clone(),
        k: k1.region().product(k2.region()),
    };
    let k12 = match k1.product(&k2) {
        Ok(k) => k,
        Err(_) => return fail(instance),
    };
    let passed = k12.compactly_contained(&u, &v).unwrap_or(false)
        && u.closure() == u1.closure().product(&u2.closure())
        && v.closure() == v1.closure().product(&v2.closure());
    outcome(instance, passed)
}

/// Even indices: a positive instance, where the witness must exist, satisfy
/// its postconditions exactly, and square to a tensor witness. Odd indices:
/// a negative instance, where construction must fail with the dedicated
/// error.
fn verify_tensor_witness(rng: &mut rand_chacha::ChaCha8Rng, index: usize) -> Outcome {
    let positive = index.is_multiple_of(2);
    let (u, v, k) = gen::region_triple(rng, positive);
    let instance = Instance::Region {
        u: u.clone(),
        v: v.clone(),
        k: k.region().clone(),
    };
    let passed = match (positive, urysohn(&u, &v, &k)) {
        (true, Ok(e)) => witness_postconditions(&e, &u, &v, &k).unwrap_or(false),
        (false, Err(Error::NotCompactlyContained)) => true,
        _ => false,
    };
    outcome(instance, passed)
}

fn witness_postconditions(
    e: &PlFunction,
    u: &wbk_core::Region,
    v: &wbk_core::Region,
    k: &Space,
) -> wbk_core::Result<bool> {
    use num_traits::One;
    let cl_u = k.relative_closure(u)?;
    if !cl_u.is_empty() && e.min_over(&cl_u)? != Rat::one() {
        return Ok(false);
    }
    if e.max_value() > Rat::one() {
        return Ok(false);
    }
    let supp_cl = k.relative_closure(&e.open_support())?;
    if !(supp_cl.is_compact() && supp_cl.is_subset(v)?) {
        return Ok(false);
    }
    wbk_core::cuntz::tensor_witness_check(e, u, v, e, u, v, k, k)
}

/// A factor quadruple with both factors way-below by construction (one in
/// ten uses a zero first factor); the certificate must affirm with
/// eps = eps1 * eps2 exactly and a clean ten-thousand-point audit.
fn verify_tensor_way_below(
    rng: &mut rand_chacha::ChaCha8Rng,
    seed: u64,
    index: usize,
) -> Outcome {
    let space1 = gen::compact_space(rng);
    let space2 = gen::compact_space(rng);
    let (a1, b1) = if index % 10 == 3 {
        let b = gen::pl_nonzero(rng, &space1);
        (PlFunction::zero(&space1).expect("compact"), b)
    } else {
        gen::way_below_pair(rng, &space1)
    };
    let (a2, b2) = gen::way_below_pair(rng, &space2);
    let instance = Instance::Tensor {
        a1: a1.clone(),
        b1: b1.clone(),
        a2: a2.clone(),
        b2: b2.clone(),
    };
    let audit = AuditConfig {
        seed: gen::splitmix64(seed ^ index as u64),
        samples: 10_000,
    };
    let cert = match tensor_way_below(
        &CuntzClass::from_scalar(a1),
        &CuntzClass::from_scalar(b1),
        &CuntzClass::from_scalar(a2),
        &CuntzClass::from_scalar(b2),
        &space1,
        &space2,
        audit,
    ) {
        Ok(c) => c,
        Err(_) => return fail(instance),
    };
    let eps_product = match (&cert.factors[0].epsilon, &cert.factors[1].epsilon, &cert.epsilon) {
        (Some(e1), Some(e2), Some(e)) => &(e1 * e2) == e,
        _ => false,
    };
    let passed = cert.verdict
        && eps_product
        && cert.audit.as_ref().map(|a| a.violations == 0).unwrap_or(false)
        && cert.reverify().unwrap_or(false);
    outcome(instance, passed)
}

/// Random generator sets: properness of the generated ideal, emptiness of
/// the vanishing locus, and strict positivity of the generator sum must
/// agree three ways, and every generator must vanish on the locus exactly.
fn verify_ideal_properness(rng: &mut rand_chacha::ChaCha8Rng) -> Outcome {
    use num_traits::{Signed, Zero};
    use rand::Rng;
    let k = gen::compact_space(rng);
    let n = rng.gen_range(0..=3);
    let gens: Vec<PlFunction> = (0..n).map(|_| gen::pl_function(rng, &k)).collect();

    let ideal = match Ideal::from_generators(&k, gens.clone()) {
        Ok(i) => i,
        Err(_) => {
            return fail(Instance::Ideal {
                i: Ideal::zero(&k).expect("compact ambient"),
                j: Ideal::zero(&k).expect("compact ambient"),
            })
        }
    };
    let instance = Instance::Ideal {
        i: ideal.clone(),
        j: Ideal::zero(&k).expect("compact ambient"),
    };

    let locus = match vanishing_locus(&gens, &k) {
        Ok(f) => f,
        Err(_) => return fail(instance),
    };
    // is_proper internally cross-checks carrier, locus, and strict
    // positivity of the generator sum.
    let proper = match ideal.is_proper() {
        Ok(p) => p,
        Err(_) => return fail(instance),
    };
    let mut sum = PlFunction::zero(&k).expect("compact");
    for g in &gens {
        sum = match sum.add(g) {
            Ok(s) => s,
            Err(_) => return fail(instance),
        };
    }
    let strictly_positive = if k.region().is_empty() {
        true
    } else {
        match sum.min_over(k.region()) {
            Ok(m) => m.is_positive(),
            Err(_) => return fail(instance),
        }
    };

    let mut passed = proper == !locus.is_empty() && proper == !strictly_positive;
    // Exact vanishing on the locus, at the locus box endpoints.
    for b in locus.boxes() {
        for end in [b.intervals()[0].lo(), b.intervals()[0].hi()] {
            let x = end.as_finite().expect("compact locus");
            for g in &gens {
                if !g.eval(x).map(|v| v.is_zero()).unwrap_or(false) {
                    passed = false;
                }
            }
        }
    }
    outcome(instance, passed)
}

/// Erosion exhaustion with 64 stages must agree with the direct verdict on
/// both positive and negative instances.
fn verify_exhaustion(rng: &mut rand_chacha::ChaCha8Rng, index: usize) -> Outcome {
    let positive = index.is_multiple_of(2);
    let (u, v, k) = gen::region_triple(rng, positive);
    let instance = Instance::Region {
        u: u.clone(),
        v: v.clone(),
        k: k.region().clone(),
    };
    let passed = match k.exhaustion_consistency(&u, &v, 64) {
        Ok(out) => out.consistent && out.compactly_contained == positive,
        Err(_) => false,
    };
    outcome(instance, passed)
}

/// The support, margin, and epsilon deciders must return identical verdicts;
/// every tenth instance is an adversarial boundary-touching pair.
fn verify_decider_agreement(rng: &mut rand_chacha::ChaCha8Rng, index: usize) -> Outcome {
    let space = gen::compact_space(rng);
    let (a, b) = if index.is_multiple_of(10) {
        gen::boundary_touching_pair(rng, &space)
    } else {
        gen::agreement_pair(rng, &space)
    };
    let instance = Instance::Cuntz { a: a.clone(), b: b.clone() };
    let (ca, cb) = (CuntzClass::from_scalar(a), CuntzClass::from_scalar(b));
    let passed = match (
        way_below_support(&ca, &cb, &space),
        way_below_margin(&ca, &cb, &space),
        way_below_epsilon(&ca, &cb, &space),
    ) {
        (Ok(s), Ok(m), Ok(e)) => s == m.is_some() && s == e.is_some(),
        _ => false,
    };
    outcome(instance, passed)
}
