//! Seeded generation of random well-formed instances for property tests and
//! the acceptance corpus.

use std::ops::RangeInclusive;

use num_traits::Zero;
use rand::Rng;

use crate::game::{Format, GameSpec, LabelSet, Mechanism, StrategyProfile};
use crate::rational::{ratio, Rational};

#[derive(Debug, Clone)]
pub struct InstanceConfig {
    pub agents: RangeInclusive<usize>,
    pub types: RangeInclusive<usize>,
    pub strategies: RangeInclusive<usize>,
    pub outcomes: RangeInclusive<usize>,
    /// Denominators of prior weights and utilities are drawn from `1..=max_denominator`.
    pub max_denominator: i64,
    /// Utility numerators are drawn from `-max_numerator..=max_numerator`.
    pub max_numerator: i64,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        Self {
            agents: 2..=3,
            types: 2..=3,
            strategies: 2..=4,
            outcomes: 2..=4,
            max_denominator: 12,
            max_numerator: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub spec: GameSpec,
    pub mech: Mechanism,
}

fn labels(prefix: &str, n: usize) -> LabelSet {
    LabelSet::new((0..n).map(|i| format!("{prefix}{i}"))).expect("distinct labels")
}

fn positive_rational(rng: &mut impl Rng, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(1..=max_den);
    ratio(num, den)
}

/// Random instance with a full-support (generally correlated) prior.
pub fn random_instance(rng: &mut impl Rng, cfg: &InstanceConfig, format: Format) -> Instance {
    let n_agents = rng.gen_range(cfg.agents.clone());
    let n_outcomes = rng.gen_range(cfg.outcomes.clone());
    let type_spaces: Vec<LabelSet> = (0..n_agents)
        .map(|_| labels("t", rng.gen_range(cfg.types.clone())))
        .collect();
    let n_profiles: usize = type_spaces.iter().map(LabelSet::len).product();

    let weights: Vec<Rational> = (0..n_profiles)
        .map(|_| positive_rational(rng, cfg.max_denominator))
        .collect();
    let total = weights.iter().fold(Rational::zero(), |a, w| a + w);
    let prior = weights.into_iter().map(|w| w / &total).collect();

    let utilities = type_spaces
        .iter()
        .map(|ts| {
            (0..n_outcomes)
                .map(|_| {
                    (0..ts.len())
                        .map(|_| {
                            let num = rng.gen_range(-cfg.max_numerator..=cfg.max_numerator);
                            ratio(num, rng.gen_range(1..=cfg.max_denominator))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let spec = GameSpec::new(
        labels("a", n_agents),
        type_spaces,
        labels("x", n_outcomes),
        prior,
        utilities,
    )
    .expect("consistent shapes");

    let strategy_sets: Vec<LabelSet> = (0..n_agents)
        .map(|_| labels("s", rng.gen_range(cfg.strategies.clone())))
        .collect();
    let size: usize = strategy_sets.iter().map(LabelSet::len).product();
    let table = (0..size).map(|_| rng.gen_range(0..n_outcomes)).collect();
    let mech = Mechanism::new(format, strategy_sets, table).expect("consistent shapes");
    Instance { spec, mech }
}

/// Uniformly random pure strategy profile.
pub fn random_profile(rng: &mut impl Rng, spec: &GameSpec, mech: &Mechanism) -> StrategyProfile {
    StrategyProfile::from_fn(spec, |i, _| rng.gen_range(0..mech.strategy_set(i).len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::validate_game;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, &InstanceConfig::default(), Format::Action);
            assert!(validate_game(&inst.spec).is_ok());
            assert!(inst.mech.check_compatible(&inst.spec).is_ok());
            let p = random_profile(&mut rng, &inst.spec, &inst.mech);
            assert!(p.validate(&inst.spec, &inst.mech).is_ok());
        }
    }
}
