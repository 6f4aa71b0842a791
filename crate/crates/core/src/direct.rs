//! Direct mechanisms built from an implementing equilibrium, and the
//! one-stage message-format direct game.
//!
//! The outcome function of a [`DirectMechanism`] is always the composition
//! `θ̂ ↦ g(s*(θ̂))` of the source outcome table with the equilibrium. It is
//! never replaced by a social choice function table, even where the two agree
//! extensionally.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::{
    enumerate_with_kernel, is_bne_with, outcome_mismatch, BneVerdict, SearchOptions,
};
use crate::error::{Error, Result};
use crate::game::{Format, GameSpec, Mechanism, SocialChoiceFunction, StrategyProfile};
use crate::kernel::Kernel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectMechanism {
    source: Mechanism,
    equilibrium: StrategyProfile,
    // strategy sets are the type spaces; outcome table is g(s*(·))
    compound: Mechanism,
}

impl DirectMechanism {
    pub fn source_mechanism(&self) -> &Mechanism {
        &self.source
    }

    pub fn equilibrium(&self) -> &StrategyProfile {
        &self.equilibrium
    }

    pub fn format(&self) -> Format {
        self.source.format()
    }

    /// The direct game as a one-stage mechanism over reported types.
    pub fn as_mechanism(&self) -> &Mechanism {
        &self.compound
    }

    /// `g(s*(θ̂))` for a reported type profile, without bounds checks.
    pub fn compound_outcome(&self, reports: &[usize]) -> usize {
        self.compound.outcome(reports)
    }

    /// `s*_i(θ̂_i)`: the strategy the mechanism computes (or suggests) for a report.
    pub fn prescribed(&self, agent: usize, report: usize) -> usize {
        self.equilibrium.strategy(agent, report)
    }
}

pub(crate) fn compose(
    spec: &GameSpec,
    mech: &Mechanism,
    equilibrium: &StrategyProfile,
) -> Result<DirectMechanism> {
    let compound = Mechanism::from_fn(mech.format(), spec.type_spaces().to_vec(), |reports| {
        mech.outcome(&equilibrium.play(reports))
    })?;
    Ok(DirectMechanism {
        source: mech.clone(),
        equilibrium: equilibrium.clone(),
        compound,
    })
}

/// Builds `(Θ_1, …, Θ_I, g(s*(·)))`; `equilibrium` must be a BNE of `mech`.
pub fn build_direct(
    spec: &GameSpec,
    mech: &Mechanism,
    equilibrium: &StrategyProfile,
) -> Result<DirectMechanism> {
    equilibrium.validate(spec, mech)?;
    let kernel = Kernel::new(spec)?;
    if let BneVerdict::Deviation(w) = is_bne_with(&kernel, spec, mech, equilibrium)? {
        return Err(Error::NotEquilibrium(Box::new(w)));
    }
    compose(spec, mech, equilibrium)
}

/// Outcome of the one-stage direct game for the given reports.
pub fn direct_game_outcome(dm: &DirectMechanism, reports: &[usize]) -> Result<usize> {
    let space = dm.compound.profiles();
    if reports.len() != space.radices().len() {
        return Err(Error::Shape(format!(
            "{} reports for {} agents",
            reports.len(),
            space.radices().len()
        )));
    }
    for (agent, (&r, &n)) in reports.iter().zip(space.radices()).enumerate() {
        if r >= n {
            return Err(Error::UnknownType { agent, index: r });
        }
    }
    Ok(dm.compound_outcome(reports))
}

/// Whether truth-telling is a BNE of the one-stage direct game. Standard
/// utilities only; no privacy term applies to the message case.
pub fn check_truthful(spec: &GameSpec, dm: &DirectMechanism) -> Result<BneVerdict> {
    let kernel = Kernel::new(spec)?;
    check_truthful_with(&kernel, spec, dm)
}

pub(crate) fn check_truthful_with(
    kernel: &Kernel,
    spec: &GameSpec,
    dm: &DirectMechanism,
) -> Result<BneVerdict> {
    let truth = StrategyProfile::identity(spec);
    truth.validate(spec, &dm.compound)?;
    is_bne_with(kernel, spec, &dm.compound, &truth)
}

/// Overall answer to "is the social choice function truthfully implemented
/// by the direct mechanism?".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RevelationVerdict {
    Holds,
    Fails,
    /// No equilibrium of the mechanism implements the social choice function.
    Vacuous,
    /// Some agent has a single type, so no false report exists.
    Inapplicable,
    /// Per-equilibrium results disagree or contradict each other.
    Inconsistent,
}

impl fmt::Display for RevelationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Holds => "HOLDS",
            Self::Fails => "FAILS",
            Self::Vacuous => "VACUOUS",
            Self::Inapplicable => "INAPPLICABLE",
            Self::Inconsistent => "INCONSISTENT",
        })
    }
}

#[derive(Debug, Clone)]
pub struct MessageEquilibriumRecord {
    /// Position of the equilibrium in the enumeration order.
    pub index: usize,
    pub equilibrium: StrategyProfile,
    pub direct: DirectMechanism,
    pub truthful: BneVerdict,
}

#[derive(Debug, Clone)]
pub struct MessageRevelationReport {
    pub equilibria_found: usize,
    pub records: Vec<MessageEquilibriumRecord>,
    pub verdict: RevelationVerdict,
}

impl MessageRevelationReport {
    pub fn all_truthful(&self) -> bool {
        self.records.iter().all(|r| r.truthful.is_equilibrium())
    }
}

/// For every equilibrium of `mech` implementing `scf`, builds the direct
/// mechanism and checks truth-telling.
pub fn check_revelation_message(
    spec: &GameSpec,
    mech: &Mechanism,
    scf: &SocialChoiceFunction,
    cap: u64,
) -> Result<MessageRevelationReport> {
    if mech.format() != Format::Message {
        return Err(Error::Format {
            expected: Format::Message,
            found: mech.format(),
        });
    }
    mech.check_compatible(spec)?;
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
        .map(|(index, equilibrium)| {
            let direct = compose(spec, mech, &equilibrium)?;
            let truthful = check_truthful_with(&kernel, spec, &direct)?;
            Ok(MessageEquilibriumRecord {
                index,
                equilibrium,
                direct,
                truthful,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = if records.is_empty() {
        RevelationVerdict::Vacuous
    } else if records.iter().all(|r| r.truthful.is_equilibrium()) {
        RevelationVerdict::Holds
    } else {
        RevelationVerdict::Fails
    };
    Ok(MessageRevelationReport {
        equilibria_found,
        records,
        verdict,
    })
}
