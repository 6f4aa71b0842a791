//! Reference implementations used as test oracles.
//!
//! Everything here is a direct transcription of the definitions: plain double
//! loops over type profiles with `BigRational` sums, conditioning by explicit
//! division, no scaling and no shared code with the library's search kernel.
//! Only the data accessors of `GameSpec` and `Mechanism` are used.

#![allow(dead_code)]

use std::path::PathBuf;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use revelation::{parse_game_file, GameFile, GameSpec, Mechanism, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> GameFile {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    parse_game_file(&text).expect("fixture parses")
}

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// All type profiles, first agent most significant.
pub fn type_profiles(spec: &GameSpec) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for i in 0..spec.num_agents() {
        let mut next = Vec::new();
        for prefix in &out {
            for t in 0..spec.type_space(i).len() {
                let mut p = prefix.clone();
                p.push(t);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub fn marginal(spec: &GameSpec, agent: usize, own_type: usize) -> Rational {
    let mut sum = Rational::zero();
    for theta in type_profiles(spec) {
        if theta[agent] == own_type {
            sum += spec.prior(&theta).clone();
        }
    }
    sum
}

/// Interim expected utility of `agent` of type `own_type` playing `strategy`
/// while everyone else follows `maps`. `order`, if given, permutes the order
/// in which type profiles are summed.
pub fn interim_eu(
    spec: &GameSpec,
    mech: &Mechanism,
    maps: &[Vec<usize>],
    agent: usize,
    own_type: usize,
    strategy: usize,
    order: Option<&[usize]>,
) -> Rational {
    let profiles = type_profiles(spec);
    let idx: Vec<usize> = match order {
        Some(o) => o.to_vec(),
        None => (0..profiles.len()).collect(),
    };
    let mut sum = Rational::zero();
    for k in idx {
        let theta = &profiles[k];
        if theta[agent] != own_type {
            continue;
        }
        let play: Vec<usize> = (0..spec.num_agents())
            .map(|j| {
                if j == agent {
                    strategy
                } else {
                    maps[j][theta[j]]
                }
            })
            .collect();
        let x = mech.outcome(&play);
        sum += spec.prior(theta).clone() * spec.utility(agent, x, own_type).clone();
    }
    sum / marginal(spec, agent, own_type)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleDeviation {
    pub agent: usize,
    pub own_type: usize,
    pub prescribed: usize,
    pub deviation: usize,
    pub prescribed_eu: Rational,
    pub deviation_eu: Rational,
}

/// First strictly profitable deviation in (agent, type, strategy) order.
pub fn first_deviation(
    spec: &GameSpec,
    mech: &Mechanism,
    maps: &[Vec<usize>],
    order: Option<&[usize]>,
) -> Option<OracleDeviation> {
    for i in 0..spec.num_agents() {
        for t in 0..spec.type_space(i).len() {
            let prescribed = maps[i][t];
            let base = interim_eu(spec, mech, maps, i, t, prescribed, order);
            for s in 0..mech.strategy_set(i).len() {
                let eu = interim_eu(spec, mech, maps, i, t, s, order);
                if eu > base {
                    return Some(OracleDeviation {
                        agent: i,
                        own_type: t,
                        prescribed,
                        deviation: s,
                        prescribed_eu: base,
                        deviation_eu: eu,
                    });
                }
            }
        }
    }
    None
}

/// Every pure BNE in lexicographic order of the (agent, type) digit string.
pub fn enumerate(spec: &GameSpec, mech: &Mechanism) -> Vec<Vec<Vec<usize>>> {
    let slots: Vec<(usize, usize)> = (0..spec.num_agents())
        .flat_map(|i| (0..spec.type_space(i).len()).map(move |t| (i, t)))
        .collect();
    let mut digits = vec![0usize; slots.len()];
    let mut out = Vec::new();
    loop {
        let mut maps: Vec<Vec<usize>> = (0..spec.num_agents())
            .map(|i| vec![0; spec.type_space(i).len()])
            .collect();
        for (k, &(i, t)) in slots.iter().enumerate() {
            maps[i][t] = digits[k];
        }
        if first_deviation(spec, mech, &maps, None).is_none() {
            out.push(maps);
        }
        let mut k = slots.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < mech.strategy_set(slots[k].0).len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Expected utility and exposure of `agent` with true type `true_type` using
/// plan `(report, action)` in the multistage game, others following `plans`.
/// The outcome is `g` applied to the performed actions.
pub fn multistage_value(
    spec: &GameSpec,
    mech: &Mechanism,
    plans: &[Vec<(usize, usize)>],
    agent: usize,
    true_type: usize,
    plan: (usize, usize),
) -> (Rational, u8) {
    let mut sum = Rational::zero();
    for theta in type_profiles(spec) {
        if theta[agent] != true_type {
            continue;
        }
        let actions: Vec<usize> = (0..spec.num_agents())
            .map(|j| {
                if j == agent {
                    plan.1
                } else {
                    plans[j][theta[j]].1
                }
            })
            .collect();
        let x = mech.outcome(&actions);
        sum += spec.prior(&theta).clone() * spec.utility(agent, x, true_type).clone();
    }
    let eu = sum / marginal(spec, agent, true_type);
    (eu, u8::from(plan.0 == true_type))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleMultistageDeviation {
    pub agent: usize,
    pub true_type: usize,
    pub deviation: (usize, usize),
    pub prescribed_eu: Rational,
    pub deviation_eu: Rational,
    pub prescribed_exposure: u8,
    pub deviation_exposure: u8,
}

/// First strictly preferred deviation in (agent, true type, report, action)
/// order. Under `privacy`, ties in expected utility are broken by lower
/// exposure.
pub fn multistage_first_deviation(
    spec: &GameSpec,
    mech: &Mechanism,
    plans: &[Vec<(usize, usize)>],
    privacy: bool,
) -> Option<OracleMultistageDeviation> {
    for i in 0..spec.num_agents() {
        for t in 0..spec.type_space(i).len() {
            let (base_eu, base_x) = multistage_value(spec, mech, plans, i, t, plans[i][t]);
            for rep in 0..spec.type_space(i).len() {
                for a in 0..mech.strategy_set(i).len() {
                    let (eu, x) = multistage_value(spec, mech, plans, i, t, (rep, a));
                    let better = eu > base_eu || (privacy && eu == base_eu && x < base_x);
                    if better {
                        return Some(OracleMultistageDeviation {
                            agent: i,
                            true_type: t,
                            deviation: (rep, a),
                            prescribed_eu: base_eu,
                            deviation_eu: eu,
                            prescribed_exposure: base_x,
                            deviation_exposure: x,
                        });
                    }
                }
            }
        }
    }
    None
}

/// Every fixed-point-free map on `0..n`.
pub fn fixed_point_free_maps(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for t in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for image in (0..n).filter(|&x| x != t) {
                let mut m: Vec<usize> = prefix.clone();
                m.push(image);
                next.push(m);
            }
        }
        out = next;
    }
    out
}
