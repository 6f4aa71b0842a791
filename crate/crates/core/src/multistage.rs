//! The multistage direct game of an action-format direct mechanism.
//!
//! 1. every agent reports a type `θ̂_i` (honestly or not);
//! 2. the mechanism suggests `a*_i(θ̂_i)`, a message describing an action;
//! 3. every agent performs an action `â_i` (obediently or not);
//! 4. the outcome is the source outcome table applied to the performed
//!    actions. Disobedience is observed but never punished.
//!
//! An agent's information at step 3 is its true type and its own report, and
//! the suggestion is a deterministic function of the report, so a strategy
//! maps each true type to a `(report, action)` pair.
//!
//! Under [`PreferenceModel::PrivacyLexicographic`] agents compare interim
//! expected outcome utility first and, at exact ties, prefer the plan whose
//! report exposes less of their type. Exposure is 1 for a truthful report and
//! 0 otherwise; it depends on the report only.

use rayon::prelude::*;
use serde::Serialize;

use crate::direct::{compose, RevelationVerdict};
use crate::equilibrium::{
    enumerate_with_kernel, interim_expected_utility, outcome_mismatch, SearchOptions,
};
use crate::error::{Error, Result};
use crate::game::{Format, GameSpec, Mechanism, SocialChoiceFunction, StrategyProfile};
use crate::kernel::Kernel;
use crate::rational::Rational;
use crate::DirectMechanism;

/// Wording attached to every report that uses the privacy model.
pub const PRIVACY_MODEL_NOTE: &str = "privacy_lexicographic is one formalization of a privacy preference: \
exposure is binary (1 iff the report equals the true type), compared only at exact ties in expected utility, \
and performed actions are treated as revealing nothing";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PreferenceModel {
    Standard,
    PrivacyLexicographic,
}

impl PreferenceModel {
    /// 1 iff the report discloses the true type.
    pub fn exposure(true_type: usize, report: usize) -> u8 {
        u8::from(report == true_type)
    }
}

impl std::fmt::Display for PreferenceModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Standard => "standard",
            Self::PrivacyLexicographic => "privacy_lexicographic",
        })
    }
}

fn require_action(dm: &DirectMechanism) -> Result<()> {
    match dm.format() {
        Format::Action => Ok(()),
        found => Err(Error::Format {
            expected: Format::Action,
            found,
        }),
    }
}

/// Per agent and true type, the `(report, action)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultistageStrategy {
    plans: Vec<Vec<(usize, usize)>>,
}

impl MultistageStrategy {
    pub fn new(plans: Vec<Vec<(usize, usize)>>) -> Self {
        Self { plans }
    }

    pub fn plan(&self, agent: usize, true_type: usize) -> (usize, usize) {
        self.plans[agent][true_type]
    }

    pub fn plans(&self) -> &[Vec<(usize, usize)>] {
        &self.plans
    }

    /// The action components as a profile of the source game.
    pub fn actions(&self) -> StrategyProfile {
        StrategyProfile::new(
            self.plans
                .iter()
                .map(|m| m.iter().map(|&(_, a)| a).collect())
                .collect(),
        )
    }

    pub fn validate(&self, dm: &DirectMechanism) -> Result<()> {
        let types = dm.as_mechanism().strategy_sets();
        let source = dm.source_mechanism();
        if self.plans.len() != types.len() {
            return Err(Error::Shape(format!(
                "strategy covers {} agents, mechanism has {}",
                self.plans.len(),
                types.len()
            )));
        }
        for (agent, plan) in self.plans.iter().enumerate() {
            if plan.len() != types[agent].len() {
                return Err(Error::Shape(format!(
                    "plan of agent {agent} is not total over its types"
                )));
            }
            for &(report, action) in plan {
                if report >= types[agent].len() {
                    return Err(Error::UnknownType {
                        agent,
                        index: report,
                    });
                }
                if action >= source.strategy_set(agent).len() {
                    return Err(Error::UnknownStrategy {
                        agent,
                        index: action,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Message-format description of the action `a*_i(θ̂_i)` sent at step 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Suggestion {
    pub agent: usize,
    pub described_action: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayTrace {
    pub true_types: Vec<usize>,
    pub reports: Vec<usize>,
    pub suggestions: Vec<Suggestion>,
    pub actions: Vec<usize>,
    pub outcome: usize,
    pub honesty: Vec<bool>,
    pub obedience: Vec<bool>,
}

/// Plays steps 1–4 once for the given true types.
pub fn play_multistage(
    dm: &DirectMechanism,
    strat: &MultistageStrategy,
    true_types: &[usize],
) -> Result<PlayTrace> {
    require_action(dm)?;
    strat.validate(dm)?;
    let types = dm.as_mechanism().profiles();
    if !types.contains(true_types) {
        return Err(Error::Shape("true type profile out of range".into()));
    }
    let (reports, actions): (Vec<usize>, Vec<usize>) = true_types
        .iter()
        .enumerate()
        .map(|(i, &t)| strat.plan(i, t))
        .unzip();
    let suggestions: Vec<Suggestion> = reports
        .iter()
        .enumerate()
        .map(|(agent, &r)| Suggestion {
            agent,
            described_action: dm.prescribed(agent, r),
        })
        .collect();
    let outcome = dm.source_mechanism().outcome(&actions);
    let honesty = reports
        .iter()
        .zip(true_types)
        .map(|(r, t)| r == t)
        .collect();
    let obedience = actions
        .iter()
        .zip(&suggestions)
        .map(|(a, s)| *a == s.described_action)
        .collect();
    Ok(PlayTrace {
        true_types: true_types.to_vec(),
        reports,
        suggestions,
        actions,
        outcome,
        honesty,
        obedience,
    })
}

/// `θ_i ↦ (θ_i, a*_i(θ_i))`.
pub fn honest_obedient(dm: &DirectMechanism) -> Result<MultistageStrategy> {
    require_action(dm)?;
    let plans = dm
        .as_mechanism()
        .strategy_sets()
        .iter()
        .enumerate()
        .map(|(i, types)| (0..types.len()).map(|t| (t, dm.prescribed(i, t))).collect())
        .collect();
    Ok(MultistageStrategy::new(plans))
}

/// Per-agent fixed-point-free self-maps on types, `d_i: Θ_i → Θ_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Deceptions {
    maps: Vec<Vec<usize>>,
}

impl Deceptions {
    /// Checks every map is total and fixed-point free.
    pub fn new(type_counts: &[usize], maps: Vec<Vec<usize>>) -> Result<Self> {
        if maps.len() != type_counts.len() {
            return Err(Error::Shape(format!(
                "{} deception maps for {} agents",
                maps.len(),
                type_counts.len()
            )));
        }
        for (agent, (map, &n)) in maps.iter().zip(type_counts).enumerate() {
            if n < 2 {
                return Err(Error::SingleType { agent });
            }
            if map.len() != n {
                return Err(Error::Shape(format!(
                    "deception of agent {agent} is not total over its types"
                )));
            }
            for (t, &r) in map.iter().enumerate() {
                if r >= n {
                    return Err(Error::UnknownType { agent, index: r });
                }
                if r == t {
                    return Err(Error::DeceptionFixedPoint {
                        agent,
                        type_index: t,
                    });
                }
            }
        }
        Ok(Self { maps })
    }

    /// Each type reports its successor in declaration order, wrapping around.
    pub fn cyclic(type_counts: &[usize]) -> Result<Self> {
        let maps = type_counts
            .iter()
            .map(|&n| (0..n).map(|t| (t + 1) % n).collect())
            .collect();
        Self::new(type_counts, maps)
    }

    pub fn map(&self, agent: usize) -> &[usize] {
        &self.maps[agent]
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }
}

fn type_counts(dm: &DirectMechanism) -> Vec<usize> {
    dm.as_mechanism().profiles().radices().to_vec()
}

/// `θ_i ↦ (d_i(θ_i), a*_i(θ_i))`: lie about the type, then perform the action
/// the true type calls for.
pub fn dishonest_disobedient(
    dm: &DirectMechanism,
    deceptions: &Deceptions,
) -> Result<MultistageStrategy> {
    require_action(dm)?;
    let deceptions = Deceptions::new(&type_counts(dm), deceptions.maps.clone())?;
    let plans = deceptions
        .maps
        .iter()
        .enumerate()
        .map(|(i, d)| {
            d.iter()
                .enumerate()
                .map(|(t, &r)| (r, dm.prescribed(i, t)))
                .collect()
        })
        .collect();
    Ok(MultistageStrategy::new(plans))
}

/// Honest-obedient for everyone except `agent`, who plays
/// `θ_i ↦ (deception(θ_i), a*_i(θ_i))`.
pub fn unilateral_dishonest(
    dm: &DirectMechanism,
    agent: usize,
    deception: &[usize],
) -> Result<MultistageStrategy> {
    let base = honest_obedient(dm)?;
    let counts = type_counts(dm);
    if agent >= counts.len() {
        return Err(Error::UnknownAgent(agent));
    }
    let n = counts[agent];
    let single = Deceptions::new(&[n], vec![deception.to_vec()]).map_err(|e| match e {
        Error::SingleType { .. } => Error::SingleType { agent },
        Error::DeceptionFixedPoint { type_index, .. } => {
            Error::DeceptionFixedPoint { agent, type_index }
        }
        Error::UnknownType { index, .. } => Error::UnknownType { agent, index },
        other => other,
    })?;
    let mut plans = base.plans;
    for (t, &r) in single.maps[0].iter().enumerate() {
        plans[agent][t] = (r, dm.prescribed(agent, t));
    }
    Ok(MultistageStrategy::new(plans))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultistageWitness {
    pub agent: usize,
    pub true_type: usize,
    /// `(report, action)` prescribed by the strategy.
    pub prescribed: (usize, usize),
    pub deviation: (usize, usize),
    #[serde(with = "crate::rational::as_string")]
    pub prescribed_eu: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub deviation_eu: Rational,
    pub prescribed_exposure: u8,
    pub deviation_exposure: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultistageVerdict {
    Equilibrium,
    Deviation(MultistageWitness),
}

impl MultistageVerdict {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, MultistageVerdict::Equilibrium)
    }

    pub fn witness(&self) -> Option<&MultistageWitness> {
        match self {
            MultistageVerdict::Equilibrium => None,
            MultistageVerdict::Deviation(w) => Some(w),
        }
    }
}

/// Interim check of `strat` against every `(report, action)` deviation.
///
/// Standard preferences: a deviation is profitable iff its expected utility is
/// strictly higher. Privacy-lexicographic: iff its expected utility is strictly
/// higher, or exactly equal with strictly lower exposure. The witness is the
/// first profitable deviation in (agent, true type, report, action) order.
pub fn is_bne_multistage(
    spec: &GameSpec,
    dm: &DirectMechanism,
    strat: &MultistageStrategy,
    prefs: PreferenceModel,
) -> Result<MultistageVerdict> {
    require_action(dm)?;
    strat.validate(dm)?;
    dm.source_mechanism().check_compatible(spec)?;
    let kernel = Kernel::new(spec)?;
    is_bne_multistage_with(&kernel, spec, dm, strat, prefs)
}

pub(crate) fn is_bne_multistage_with(
    kernel: &Kernel,
    spec: &GameSpec,
    dm: &DirectMechanism,
    strat: &MultistageStrategy,
    prefs: PreferenceModel,
) -> Result<MultistageVerdict> {
    let source = dm.source_mechanism();
    let view = |j: usize, t: usize| strat.plan(j, t).1;
    for agent in 0..spec.num_agents() {
        for true_type in 0..spec.type_space(agent).len() {
            let ranks = kernel.ranks(source, &view, agent, true_type);
            let (r0, a0) = strat.plan(agent, true_type);
            let key0 = (ranks[a0], PreferenceModel::exposure(true_type, r0));
            for report in 0..spec.type_space(agent).len() {
                let exposure = PreferenceModel::exposure(true_type, report);
                let found = (0..ranks.len()).find(|&a| match prefs {
                    PreferenceModel::Standard => ranks[a] > key0.0,
                    PreferenceModel::PrivacyLexicographic => {
                        ranks[a] > key0.0 || (ranks[a] == key0.0 && exposure < key0.1)
                    }
                });
                if let Some(action) = found {
                    let actions = strat.actions();
                    return Ok(MultistageVerdict::Deviation(MultistageWitness {
                        agent,
                        true_type,
                        prescribed: (r0, a0),
                        deviation: (report, action),
                        prescribed_eu: interim_expected_utility(
                            spec, source, &actions, agent, true_type, None,
                        )?,
                        deviation_eu: interim_expected_utility(
                            spec,
                            source,
                            &actions,
                            agent,
                            true_type,
                            Some(action),
                        )?,
                        prescribed_exposure: key0.1,
                        deviation_exposure: exposure,
                    }));
                }
            }
        }
    }
    Ok(MultistageVerdict::Equilibrium)
}

/// Outcome of a multistage strategy at every true type profile, by index.
pub fn induced_outcomes(dm: &DirectMechanism, strat: &MultistageStrategy) -> Result<Vec<usize>> {
    dm.as_mechanism()
        .profiles()
        .iter()
        .map(|theta| play_multistage(dm, strat, &theta).map(|t| t.outcome))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EquilibriumVerdict {
    /// Honest-obedient is an equilibrium under the chosen preferences.
    Holds,
    /// Honest-obedient is not, while dishonest-disobedient is an equilibrium
    /// that implements the social choice function.
    Fails,
    Inapplicable,
    Inconsistent,
}

impl std::fmt::Display for EquilibriumVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Holds => "HOLDS",
            Self::Fails => "FAILS",
            Self::Inapplicable => "INAPPLICABLE",
            Self::Inconsistent => "INCONSISTENT",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ActionEquilibriumRecord {
    /// Position of the equilibrium in the enumeration order.
    pub index: usize,
    pub equilibrium: StrategyProfile,
    pub direct: DirectMechanism,
    /// Honest-obedient under standard preferences.
    pub honest_obedient_standard: MultistageVerdict,
    /// Honest-obedient under the requested preferences.
    pub honest_obedient: MultistageVerdict,
    /// Dishonest-disobedient under the requested preferences, when a full
    /// deception profile exists.
    pub dishonest_disobedient: Option<MultistageVerdict>,
    /// Whether dishonest-disobedient play yields `f(θ)` at every `θ`.
    pub dishonest_implements_scf: Option<bool>,
    /// Per agent: a lone deviation to `(d_i(θ_i), a*_i(θ_i))` leaves the outcome
    /// at `g(a*(θ))` for every `θ`. `None` for single-type agents.
    pub unilateral_invariance: Vec<Option<bool>>,
    /// Per agent: whether `a*_i` is injective, in which case the performed
    /// action alone would reveal the type to an observer.
    pub injective_actions: Vec<bool>,
    pub verdict: EquilibriumVerdict,
}

#[derive(Debug, Clone)]
pub struct ActionRevelationReport {
    pub prefs: PreferenceModel,
    pub equilibria_found: usize,
    pub deceptions: Option<Deceptions>,
    /// Agents with a single type (no false report exists for them).
    pub single_type_agents: Vec<usize>,
    pub records: Vec<ActionEquilibriumRecord>,
    pub verdict: RevelationVerdict,
}

/// Runs the full action-format pipeline for every equilibrium implementing
/// `scf`. `deceptions` defaults to the cyclic profile.
pub fn check_revelation_action(
    spec: &GameSpec,
    mech: &Mechanism,
    scf: &SocialChoiceFunction,
    cap: u64,
    prefs: PreferenceModel,
    deceptions: Option<&Deceptions>,
) -> Result<ActionRevelationReport> {
    if mech.format() != Format::Action {
        return Err(Error::Format {
            expected: Format::Action,
            found: mech.format(),
        });
    }
    mech.check_compatible(spec)?;
    let counts: Vec<usize> = spec.type_spaces().iter().map(|t| t.len()).collect();
    let single_type_agents: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] < 2).collect();
    let deceptions = if single_type_agents.is_empty() {
        Some(match deceptions {
            Some(d) => Deceptions::new(&counts, d.maps.clone())?,
            None => Deceptions::cyclic(&counts)?,
        })
    } else {
        None
    };

    let kernel = Kernel::new(spec)?;
    let options = SearchOptions {
        cap,
        ..SearchOptions::default()
    };
    let equilibria = enumerate_with_kernel(&kernel, spec, mech, &options)?;
    let equilibria_found = equilibria.len();
    let records = equilibria
        .into_par_iter()
        .enumerate()
        .filter(|(_, eq)| outcome_mismatch(spec, mech, eq, scf).is_none())
        .map(|(index, eq)| {
            analyse_equilibrium(
                &kernel,
                spec,
                mech,
                scf,
                index,
                eq,
                prefs,
                deceptions.as_ref(),
                &counts,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let verdict = if records.is_empty() {
        RevelationVerdict::Vacuous
    } else if deceptions.is_none() {
        RevelationVerdict::Inapplicable
    } else if records
        .iter()
        .all(|r| r.verdict == EquilibriumVerdict::Holds)
    {
        RevelationVerdict::Holds
    } else if records
        .iter()
        .all(|r| r.verdict == EquilibriumVerdict::Fails)
    {
        RevelationVerdict::Fails
    } else {
        RevelationVerdict::Inconsistent
    };
    Ok(ActionRevelationReport {
        prefs,
        equilibria_found,
        deceptions,
        single_type_agents,
        records,
        verdict,
    })
}

#[allow(clippy::too_many_arguments)]
fn analyse_equilibrium(
    kernel: &Kernel,
    spec: &GameSpec,
    mech: &Mechanism,
    scf: &SocialChoiceFunction,
    index: usize,
    equilibrium: StrategyProfile,
    prefs: PreferenceModel,
    deceptions: Option<&Deceptions>,
    counts: &[usize],
) -> Result<ActionEquilibriumRecord> {
    let direct = compose(spec, mech, &equilibrium)?;
    let honest = honest_obedient(&direct)?;
    let honest_obedient_standard =
        is_bne_multistage_with(kernel, spec, &direct, &honest, PreferenceModel::Standard)?;
    let honest_obedient = if prefs == PreferenceModel::Standard {
        honest_obedient_standard.clone()
    } else {
        is_bne_multistage_with(kernel, spec, &direct, &honest, prefs)?
    };

    let baseline: Vec<usize> = spec
        .type_profiles()
        .iter()
        .map(|theta| mech.outcome(&equilibrium.play(&theta)))
        .collect();

    let (dishonest_disobedient, dishonest_implements_scf) = match deceptions {
        Some(d) => {
            let strat = self::dishonest_disobedient(&direct, d)?;
            let verdict = is_bne_multistage_with(kernel, spec, &direct, &strat, prefs)?;
            let implemented = induced_outcomes(&direct, &strat)? == scf.table();
            (Some(verdict), Some(implemented))
        }
        None => (None, None),
    };

    let unilateral_invariance = (0..spec.num_agents())
        .map(|agent| {
            if counts[agent] < 2 {
                return Ok(None);
            }
            let map = match deceptions {
                Some(d) => d.map(agent).to_vec(),
                None => (0..counts[agent])
                    .map(|t| (t + 1) % counts[agent])
                    .collect(),
            };
            let strat = unilateral_dishonest(&direct, agent, &map)?;
            Ok(Some(induced_outcomes(&direct, &strat)? == baseline))
        })
        .collect::<Result<Vec<_>>>()?;

    let injective_actions = equilibrium
        .maps()
        .iter()
        .map(|m| {
            let mut seen = m.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == m.len()
        })
        .collect();

    let verdict = if honest_obedient.is_equilibrium() {
        EquilibriumVerdict::Holds
    } else if deceptions.is_none() {
        EquilibriumVerdict::Inapplicable
    } else if dishonest_disobedient
        .as_ref()
        .is_some_and(MultistageVerdict::is_equilibrium)
        && dishonest_implements_scf == Some(true)
    {
        EquilibriumVerdict::Fails
    } else {
        EquilibriumVerdict::Inconsistent
    };

    Ok(ActionEquilibriumRecord {
        index,
        equilibrium,
        direct,
        honest_obedient_standard,
        honest_obedient,
        dishonest_disobedient,
        dishonest_implements_scf,
        unilateral_invariance,
        injective_actions,
        verdict,
    })
}
