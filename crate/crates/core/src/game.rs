//! The finite Bayesian environment: agents, types, prior, outcomes, utilities,
//! social choice functions, mechanisms and pure strategy profiles.
//!
//! Labels are kept in declaration order and addressed internally by index.
//! Full profiles (of types or of strategies) are encoded in mixed radix with
//! the first agent as the most significant digit, so index order is
//! lexicographic order.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// Strategy format of a mechanism: an informational message or a performed action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Message,
    Action,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Message => "message",
            Format::Action => "action",
        })
    }
}

/// Ordered set of distinct string labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl LabelSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Mixed-radix encoding of the Cartesian product of per-agent index ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileSpace {
    radices: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl ProfileSpace {
    pub fn new(radices: Vec<usize>) -> Self {
        let mut strides = vec![0; radices.len()];
        let mut size = 1usize;
        for (i, &r) in radices.iter().enumerate().rev() {
            strides[i] = size;
            size = size.checked_mul(r).expect("profile space overflows usize");
        }
        Self {
            radices,
            strides,
            size,
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.radices.len());
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        for (i, &s) in self.strides.iter().enumerate() {
            out[i] = index / s;
            index %= s;
        }
        out
    }

    pub fn contains(&self, digits: &[usize]) -> bool {
        digits.len() == self.radices.len() && digits.iter().zip(&self.radices).all(|(d, r)| d < r)
    }

    /// All profiles in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.size).map(|i| self.digits(i))
    }
}

/// The Bayesian environment: agents, type spaces, joint prior, outcomes and
/// per-agent utilities `u_i(x, θ_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    agents: LabelSet,
    type_spaces: Vec<LabelSet>,
    outcomes: LabelSet,
    profiles: ProfileSpace,
    prior: Vec<Rational>,
    // [agent][outcome][type]
    utilities: Vec<Vec<Vec<Rational>>>,
}

impl GameSpec {
    /// Builds a spec from dense tables. `prior` is indexed by type-profile
    /// index; `utilities[i][x][t]` is agent `i`'s payoff for outcome `x` at
    /// own type `t`. Only shapes are checked here; see [`validate_game`] for the
    /// probabilistic invariants.
    pub fn new(
        agents: LabelSet,
        type_spaces: Vec<LabelSet>,
        outcomes: LabelSet,
        prior: Vec<Rational>,
        utilities: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self> {
        if type_spaces.len() != agents.len() {
            return Err(Error::Shape(format!(
                "{} agents but {} type spaces",
                agents.len(),
                type_spaces.len()
            )));
        }
        let profiles = ProfileSpace::new(type_spaces.iter().map(LabelSet::len).collect());
        if prior.len() != profiles.len() {
            return Err(Error::Shape(format!(
                "prior has {} entries, expected {}",
                prior.len(),
                profiles.len()
            )));
        }
        if utilities.len() != agents.len() {
            return Err(Error::Shape("one utility table per agent required".into()));
        }
        for (i, table) in utilities.iter().enumerate() {
            if table.len() != outcomes.len()
                || table.iter().any(|row| row.len() != type_spaces[i].len())
            {
                return Err(Error::Shape(format!(
                    "utility table of agent {} must be {} outcomes x {} types",
                    agents.label(i),
                    outcomes.len(),
                    type_spaces[i].len()
                )));
            }
        }
        Ok(Self {
            agents,
            type_spaces,
            outcomes,
            profiles,
            prior,
            utilities,
        })
    }

    /// Independent prior from per-agent marginals.
    pub fn independent(
        agents: LabelSet,
        type_spaces: Vec<LabelSet>,
        outcomes: LabelSet,
        marginals: &[Vec<Rational>],
        utilities: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self> {
        let space = ProfileSpace::new(type_spaces.iter().map(LabelSet::len).collect());
        if marginals.len() != type_spaces.len()
            || marginals
                .iter()
                .zip(&type_spaces)
                .any(|(m, t)| m.len() != t.len())
        {
            return Err(Error::Shape("marginals must match type spaces".into()));
        }
        let prior = space
            .iter()
            .map(|theta| {
                theta
                    .iter()
                    .enumerate()
                    .fold(Rational::one(), |acc, (i, &t)| acc * &marginals[i][t])
            })
            .collect();
        Self::new(agents, type_spaces, outcomes, prior, utilities)
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &LabelSet {
        &self.agents
    }

    pub fn type_space(&self, agent: usize) -> &LabelSet {
        &self.type_spaces[agent]
    }

    pub fn type_spaces(&self) -> &[LabelSet] {
        &self.type_spaces
    }

    pub fn outcomes(&self) -> &LabelSet {
        &self.outcomes
    }

    pub fn type_profiles(&self) -> &ProfileSpace {
        &self.profiles
    }

    pub fn prior(&self, theta: &[usize]) -> &Rational {
        &self.prior[self.profiles.index(theta)]
    }

    pub fn prior_table(&self) -> &[Rational] {
        &self.prior
    }

    pub fn utility(&self, agent: usize, outcome: usize, own_type: usize) -> &Rational {
        &self.utilities[agent][outcome][own_type]
    }

    pub(crate) fn utility_tables(&self) -> &[Vec<Vec<Rational>>] {
        &self.utilities
    }

    pub(crate) fn check_agent_type(&self, agent: usize, own_type: usize) -> Result<()> {
        if agent >= self.num_agents() {
            return Err(Error::UnknownAgent(agent));
        }
        if own_type >= self.type_spaces[agent].len() {
            return Err(Error::UnknownType {
                agent,
                index: own_type,
            });
        }
        Ok(())
    }

    /// Renders a type profile with labels, e.g. `(L, H)`.
    pub fn describe_types(&self, theta: &[usize]) -> String {
        let parts: Vec<&str> = theta
            .iter()
            .enumerate()
            .map(|(i, &t)| self.type_spaces[i].label(t))
            .collect();
        format!("({})", parts.join(", "))
    }
}

/// One violated [`GameSpec`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    NoAgents,
    EmptyTypeSpace { agent: String },
    NoOutcomes,
    NegativeProbability { profile: String, value: Rational },
    PriorMass { mass: Rational },
    ZeroMarginal { agent: String, type_label: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoAgents => f.write_str("no agents declared"),
            Self::EmptyTypeSpace { agent } => write!(f, "agent {agent} has an empty type space"),
            Self::NoOutcomes => f.write_str("outcome set is empty"),
            Self::NegativeProbability { profile, value } => write!(
                f,
                "prior probability of {profile} is negative ({})",
                format_rational(value)
            ),
            Self::PriorMass { mass } => write!(f, "prior mass {} ≠ 1", format_rational(mass)),
            Self::ZeroMarginal { agent, type_label } => write!(
                f,
                "agent {agent} type {type_label} has zero marginal probability"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Lists every violated invariant of `spec`; an empty report means well formed.
pub fn validate_game(spec: &GameSpec) -> ValidationReport {
    let mut issues = Vec::new();
    if spec.num_agents() == 0 {
        issues.push(ValidationIssue::NoAgents);
    }
    for (i, ts) in spec.type_spaces.iter().enumerate() {
        if ts.is_empty() {
            issues.push(ValidationIssue::EmptyTypeSpace {
                agent: spec.agents.label(i).to_string(),
            });
        }
    }
    if spec.outcomes.is_empty() {
        issues.push(ValidationIssue::NoOutcomes);
    }
    let mut mass = Rational::zero();
    for (idx, p) in spec.prior.iter().enumerate() {
        if p.is_negative() {
            issues.push(ValidationIssue::NegativeProbability {
                profile: spec.describe_types(&spec.profiles.digits(idx)),
                value: p.clone(),
            });
        }
        mass += p;
    }
    if !mass.is_one() {
        issues.push(ValidationIssue::PriorMass { mass });
    }
    for agent in 0..spec.num_agents() {
        for t in 0..spec.type_spaces[agent].len() {
            if !marginal_unchecked(spec, agent, t).is_positive() {
                issues.push(ValidationIssue::ZeroMarginal {
                    agent: spec.agents.label(agent).to_string(),
                    type_label: spec.type_spaces[agent].label(t).to_string(),
                });
            }
        }
    }
    ValidationReport { issues }
}

fn marginal_unchecked(spec: &GameSpec, agent: usize, own_type: usize) -> Rational {
    spec.profiles
        .iter()
        .zip(&spec.prior)
        .filter(|(theta, _)| theta[agent] == own_type)
        .fold(Rational::zero(), |acc, (_, p)| acc + p)
}

/// `Σ_{θ_-i} φ(θ_i, θ_-i)`.
pub fn marginal(spec: &GameSpec, agent: usize, own_type: usize) -> Result<Rational> {
    spec.check_agent_type(agent, own_type)?;
    Ok(marginal_unchecked(spec, agent, own_type))
}

/// Conditional distribution of opponents' types given `agent` has `own_type`.
///
/// Entries are `(θ_-i, φ(θ_i, θ_-i) / marginal)` for every opponent profile in
/// lexicographic order, zero-weight profiles included.
pub fn conditional(
    spec: &GameSpec,
    agent: usize,
    own_type: usize,
) -> Result<Vec<(Vec<usize>, Rational)>> {
    let m = marginal(spec, agent, own_type)?;
    if !m.is_positive() {
        return Err(Error::ZeroMarginal {
            agent,
            type_index: own_type,
        });
    }
    Ok(spec
        .profiles
        .iter()
        .zip(&spec.prior)
        .filter(|(theta, _)| theta[agent] == own_type)
        .map(|(mut theta, p)| {
            theta.remove(agent);
            (theta, p / &m)
        })
        .collect())
}

/// `f: Θ → X`, stored densely by type-profile index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialChoiceFunction {
    assignment: Vec<usize>,
}

impl SocialChoiceFunction {
    pub fn new(spec: &GameSpec, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != spec.type_profiles().len() {
            return Err(Error::Shape(format!(
                "social choice function has {} entries, expected {}",
                assignment.len(),
                spec.type_profiles().len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&x| x >= spec.outcomes().len()) {
            return Err(Error::UnknownOutcome(bad));
        }
        Ok(Self { assignment })
    }

    pub fn from_fn(spec: &GameSpec, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        let assignment = spec.type_profiles().iter().map(|t| f(&t)).collect();
        Self::new(spec, assignment)
    }

    pub fn constant(spec: &GameSpec, outcome: usize) -> Result<Self> {
        Self::new(spec, vec![outcome; spec.type_profiles().len()])
    }

    pub fn outcome(&self, spec: &GameSpec, theta: &[usize]) -> usize {
        self.assignment[spec.type_profiles().index(theta)]
    }

    /// Outcomes by type-profile index.
    pub fn table(&self) -> &[usize] {
        &self.assignment
    }
}

/// `Γ = (S_1, …, S_I, g)` with its strategy format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mechanism {
    format: Format,
    strategy_sets: Vec<LabelSet>,
    space: ProfileSpace,
    outcome_table: Vec<usize>,
}

impl Mechanism {
    /// `outcome_table` is indexed by strategy-profile index and must be total.
    pub fn new(
        format: Format,
        strategy_sets: Vec<LabelSet>,
        outcome_table: Vec<usize>,
    ) -> Result<Self> {
        if let Some(i) = strategy_sets.iter().position(LabelSet::is_empty) {
            return Err(Error::Shape(format!("agent {i} has an empty strategy set")));
        }
        let space = ProfileSpace::new(strategy_sets.iter().map(LabelSet::len).collect());
        if outcome_table.len() != space.len() {
            return Err(Error::Shape(format!(
                "outcome table has {} entries, expected {}",
                outcome_table.len(),
                space.len()
            )));
        }
        Ok(Self {
            format,
            strategy_sets,
            space,
            outcome_table,
        })
    }

    pub fn from_fn(
        format: Format,
        strategy_sets: Vec<LabelSet>,
        g: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        let space = ProfileSpace::new(strategy_sets.iter().map(LabelSet::len).collect());
        let table = space.iter().map(|s| g(&s)).collect();
        Self::new(format, strategy_sets, table)
    }

    pub fn format(&self) -> Format {
        self.format
    }

    /// Same strategy sets and outcome table under the other format tag.
    pub fn with_format(&self, format: Format) -> Self {
        Self {
            format,
            ..self.clone()
        }
    }

    pub fn num_agents(&self) -> usize {
        self.strategy_sets.len()
    }

    pub fn strategy_set(&self, agent: usize) -> &LabelSet {
        &self.strategy_sets[agent]
    }

    pub fn strategy_sets(&self) -> &[LabelSet] {
        &self.strategy_sets
    }

    pub fn profiles(&self) -> &ProfileSpace {
        &self.space
    }

    pub fn outcome(&self, strategies: &[usize]) -> usize {
        self.outcome_table[self.space.index(strategies)]
    }

    pub fn outcome_table(&self) -> &[usize] {
        &self.outcome_table
    }

    /// Checks that the mechanism is playable in `spec`.
    pub fn check_compatible(&self, spec: &GameSpec) -> Result<()> {
        if self.num_agents() != spec.num_agents() {
            return Err(Error::Shape(format!(
                "mechanism has {} agents, game has {}",
                self.num_agents(),
                spec.num_agents()
            )));
        }
        if let Some(&bad) = self
            .outcome_table
            .iter()
            .find(|&&x| x >= spec.outcomes().len())
        {
            return Err(Error::UnknownOutcome(bad));
        }
        Ok(())
    }
}

/// Pure strategy functions `s_i: Θ_i → S_i`, stored as `maps[i][θ_i]`.
///
/// The derived ordering is the lexicographic order of the profile encoding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrategyProfile {
    maps: Vec<Vec<usize>>,
}

impl StrategyProfile {
    pub fn new(maps: Vec<Vec<usize>>) -> Self {
        Self { maps }
    }

    pub fn from_fn(spec: &GameSpec, mut s: impl FnMut(usize, usize) -> usize) -> Self {
        let maps = (0..spec.num_agents())
            .map(|i| (0..spec.type_space(i).len()).map(|t| s(i, t)).collect())
            .collect();
        Self { maps }
    }

    /// Every agent plays strategy index `strategy` at every type.
    pub fn constant(spec: &GameSpec, strategy: usize) -> Self {
        Self::from_fn(spec, |_, _| strategy)
    }

    /// `S_i = Θ_i`, `s_i(θ_i) = θ_i`.
    pub fn identity(spec: &GameSpec) -> Self {
        Self::from_fn(spec, |_, t| t)
    }

    pub fn strategy(&self, agent: usize, own_type: usize) -> usize {
        self.maps[agent][own_type]
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    /// Strategy profile played at type profile `theta`.
    pub fn play(&self, theta: &[usize]) -> Vec<usize> {
        theta
            .iter()
            .enumerate()
            .map(|(i, &t)| self.maps[i][t])
            .collect()
    }

    pub fn validate(&self, spec: &GameSpec, mech: &Mechanism) -> Result<()> {
        mech.check_compatible(spec)?;
        if self.maps.len() != spec.num_agents() {
            return Err(Error::Shape(format!(
                "profile covers {} agents, game has {}",
                self.maps.len(),
                spec.num_agents()
            )));
        }
        for (agent, map) in self.maps.iter().enumerate() {
            if map.len() != spec.type_space(agent).len() {
                return Err(Error::Shape(format!(
                    "strategy function of agent {agent} is not total over its types"
                )));
            }
            if let Some(&bad) = map.iter().find(|&&s| s >= mech.strategy_set(agent).len()) {
                return Err(Error::UnknownStrategy { agent, index: bad });
            }
        }
        Ok(())
    }

    /// Renders as `agent: type->strategy, ...; ...`.
    pub fn describe(&self, spec: &GameSpec, mech: &Mechanism) -> String {
        self.maps
            .iter()
            .enumerate()
            .map(|(i, map)| {
                let parts: Vec<String> = map
                    .iter()
                    .enumerate()
                    .map(|(t, &s)| {
                        format!(
                            "{}->{}",
                            spec.type_space(i).label(t),
                            mech.strategy_set(i).label(s)
                        )
                    })
                    .collect();
                format!("{}: {}", spec.agents().label(i), parts.join(", "))
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}
