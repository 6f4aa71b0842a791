//! Interim expected utilities and pure-strategy Bayesian Nash equilibria.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{conditional, GameSpec, Mechanism, SocialChoiceFunction, StrategyProfile};
use crate::kernel::{FlatLayout, Kernel};
use crate::rational::{format_rational, Rational};

/// Default bound on `Π_i |S_i|^{|Θ_i|}` for exhaustive enumeration.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// A profitable unilateral deviation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeviationWitness {
    pub agent: usize,
    pub own_type: usize,
    pub prescribed: usize,
    pub deviation: usize,
    #[serde(with = "crate::rational::as_string")]
    pub prescribed_eu: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub deviation_eu: Rational,
}

impl fmt::Display for DeviationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "agent #{} at type #{} gains by playing strategy #{} instead of #{} ({} > {})",
            self.agent,
            self.own_type,
            self.deviation,
            self.prescribed,
            format_rational(&self.deviation_eu),
            format_rational(&self.prescribed_eu)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BneVerdict {
    Equilibrium,
    Deviation(DeviationWitness),
}

impl BneVerdict {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, BneVerdict::Equilibrium)
    }

    pub fn witness(&self) -> Option<&DeviationWitness> {
        match self {
            BneVerdict::Equilibrium => None,
            BneVerdict::Deviation(w) => Some(w),
        }
    }
}

/// `E_{θ_-i}[u_i(g(ŝ, s_-i(θ_-i)), θ_i) | θ_i]` where `ŝ` is `deviation` if
/// given, else the profile's own prescription.
pub fn interim_expected_utility(
    spec: &GameSpec,
    mech: &Mechanism,
    profile: &StrategyProfile,
    agent: usize,
    own_type: usize,
    deviation: Option<usize>,
) -> Result<Rational> {
    profile.validate(spec, mech)?;
    spec.check_agent_type(agent, own_type)?;
    let own = match deviation {
        Some(s) if s >= mech.strategy_set(agent).len() => {
            return Err(Error::UnknownStrategy { agent, index: s })
        }
        Some(s) => s,
        None => profile.strategy(agent, own_type),
    };
    let mut eu = Rational::zero();
    let mut strategies = vec![0; spec.num_agents()];
    for (opponents, weight) in conditional(spec, agent, own_type)? {
        let mut rest = opponents.iter();
        for (j, slot) in strategies.iter_mut().enumerate() {
            *slot = if j == agent {
                own
            } else {
                profile.strategy(j, *rest.next().expect("opponent entry"))
            };
        }
        eu += weight * spec.utility(agent, mech.outcome(&strategies), own_type);
    }
    Ok(eu)
}

pub(crate) fn witness_for(
    spec: &GameSpec,
    mech: &Mechanism,
    profile: &StrategyProfile,
    (agent, own_type, deviation): (usize, usize, usize),
) -> Result<DeviationWitness> {
    Ok(DeviationWitness {
        agent,
        own_type,
        prescribed: profile.strategy(agent, own_type),
        deviation,
        prescribed_eu: interim_expected_utility(spec, mech, profile, agent, own_type, None)?,
        deviation_eu: interim_expected_utility(
            spec,
            mech,
            profile,
            agent,
            own_type,
            Some(deviation),
        )?,
    })
}

pub(crate) fn is_bne_with(
    kernel: &Kernel,
    spec: &GameSpec,
    mech: &Mechanism,
    profile: &StrategyProfile,
) -> Result<BneVerdict> {
    let view = |i: usize, t: usize| profile.strategy(i, t);
    match kernel.first_deviation(mech, &view) {
        None => Ok(BneVerdict::Equilibrium),
        Some(found) => Ok(BneVerdict::Deviation(witness_for(
            spec, mech, profile, found,
        )?)),
    }
}

/// Checks every (agent, type, deviation) against the weak inequality; the
/// witness of a negative verdict is the lexicographically first profitable one.
pub fn is_bne(spec: &GameSpec, mech: &Mechanism, profile: &StrategyProfile) -> Result<BneVerdict> {
    profile.validate(spec, mech)?;
    let kernel = Kernel::new(spec)?;
    is_bne_with(&kernel, spec, mech, profile)
}

/// Number of candidate pure profiles, `Π_i |S_i|^{|Θ_i|}`.
pub fn search_space_size(spec: &GameSpec, mech: &Mechanism) -> BigUint {
    (0..spec.num_agents())
        .map(|i| BigUint::from(mech.strategy_set(i).len()).pow(spec.type_space(i).len() as u32))
        .product()
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub cap: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            workers: None,
        }
    }
}

/// Every pure BNE, in lexicographic order of the profile encoding.
pub fn enumerate_bne(spec: &GameSpec, mech: &Mechanism, cap: u64) -> Result<Vec<StrategyProfile>> {
    enumerate_bne_with(
        spec,
        mech,
        &SearchOptions {
            cap,
            ..SearchOptions::default()
        },
    )
}

pub fn enumerate_bne_with(
    spec: &GameSpec,
    mech: &Mechanism,
    options: &SearchOptions,
) -> Result<Vec<StrategyProfile>> {
    mech.check_compatible(spec)?;
    let kernel = Kernel::new(spec)?;
    enumerate_with_kernel(&kernel, spec, mech, options)
}

pub(crate) fn enumerate_with_kernel(
    kernel: &Kernel,
    spec: &GameSpec,
    mech: &Mechanism,
    options: &SearchOptions,
) -> Result<Vec<StrategyProfile>> {
    let size = search_space_size(spec, mech);
    let total = match size.to_u64() {
        Some(n) if n <= options.cap => n,
        _ => {
            return Err(Error::SearchSpace {
                size,
                cap: options.cap,
            })
        }
    };
    let layout = FlatLayout::new(spec, mech);
    let workers = options
        .workers
        .unwrap_or_else(rayon::current_num_threads)
        .max(1);
    let partitions = prefix_partitions(&layout, total, workers);

    let run = || -> Vec<Vec<Vec<usize>>> {
        partitions
            .par_iter()
            .map(|&(start, end)| kernel.scan(mech, &layout, start, end))
            .collect()
    };
    let chunks = match options.workers {
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::WorkerPool(e.to_string()))?
            .install(run),
    };
    Ok(chunks
        .into_iter()
        .flatten()
        .map(|digits| StrategyProfile::new(layout.split(&digits)))
        .collect())
}

/// Splits `[0, total)` into the contiguous ranges sharing a fixed-length
/// prefix of the encoding. The prefix grows until there are enough ranges to
/// keep `workers` busy.
fn prefix_partitions(layout: &FlatLayout, total: u64, workers: usize) -> Vec<(u64, u64)> {
    let target = (workers as u64).saturating_mul(8);
    let mut count = 1u64;
    for &r in &layout.radices {
        if count >= target {
            break;
        }
        count *= r;
    }
    let block = total / count;
    (0..count).map(|p| (p * block, (p + 1) * block)).collect()
}

/// Outcome of checking `(mech, profile)` against a social choice function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Implementation {
    Implements,
    NotEquilibrium(DeviationWitness),
    /// First type profile (lexicographic) where `g(s(θ)) ≠ f(θ)`.
    OutcomeMismatch {
        profile: Vec<usize>,
        expected: usize,
        actual: usize,
    },
}

impl Implementation {
    pub fn holds(&self) -> bool {
        matches!(self, Implementation::Implements)
    }
}

pub fn implements(
    spec: &GameSpec,
    mech: &Mechanism,
    profile: &StrategyProfile,
    scf: &SocialChoiceFunction,
) -> Result<Implementation> {
    if let BneVerdict::Deviation(w) = is_bne(spec, mech, profile)? {
        return Ok(Implementation::NotEquilibrium(w));
    }
    Ok(outcome_mismatch(spec, mech, profile, scf).unwrap_or(Implementation::Implements))
}

pub(crate) fn outcome_mismatch(
    spec: &GameSpec,
    mech: &Mechanism,
    profile: &StrategyProfile,
    scf: &SocialChoiceFunction,
) -> Option<Implementation> {
    spec.type_profiles()
        .iter()
        .zip(scf.table())
        .find_map(|(theta, &expected)| {
            let actual = mech.outcome(&profile.play(&theta));
            (actual != expected).then_some(Implementation::OutcomeMismatch {
                profile: theta,
                expected,
                actual,
            })
        })
}

/// `f(θ) := g(s(θ))`.
pub fn derive_scf(
    mech: &Mechanism,
    profile: &StrategyProfile,
    spec: &GameSpec,
) -> Result<SocialChoiceFunction> {
    profile.validate(spec, mech)?;
    SocialChoiceFunction::from_fn(spec, |theta| mech.outcome(&profile.play(theta)))
}
