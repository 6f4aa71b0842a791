//! Label-resolved reports shared by the table and structured (JSON) outputs.
//!
//! Both renderings are produced from the same report value, so they always
//! carry the same verdicts and the same exact rationals.

use std::fmt::Write as _;

use serde::Serialize;

use crate::direct::{MessageRevelationReport, RevelationVerdict};
use crate::equilibrium::{interim_expected_utility, BneVerdict, DeviationWitness};
use crate::error::Result;
use crate::game::{GameSpec, Mechanism, SocialChoiceFunction, StrategyProfile};
use crate::multistage::{
    ActionRevelationReport, EquilibriumVerdict, MultistageVerdict, MultistageWitness,
    PreferenceModel, PRIVACY_MODEL_NOTE,
};
use crate::rational::format_rational;
use crate::DirectMechanism;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeStrategy {
    #[serde(rename = "type")]
    pub own_type: String,
    pub strategy: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgentStrategy {
    pub agent: String,
    pub map: Vec<TypeStrategy>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutcomeRow {
    pub profile: Vec<String>,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UtilityRow {
    pub agent: String,
    #[serde(rename = "type")]
    pub own_type: String,
    pub strategy: String,
    pub prescribed: bool,
    pub expected_utility: String,
}

fn profile_out(spec: &GameSpec, mech: &Mechanism, profile: &StrategyProfile) -> Vec<AgentStrategy> {
    (0..spec.num_agents())
        .map(|i| AgentStrategy {
            agent: spec.agents().label(i).to_string(),
            map: (0..spec.type_space(i).len())
                .map(|t| TypeStrategy {
                    own_type: spec.type_space(i).label(t).to_string(),
                    strategy: mech
                        .strategy_set(i)
                        .label(profile.strategy(i, t))
                        .to_string(),
                })
                .collect(),
        })
        .collect()
}

fn type_names(spec: &GameSpec, theta: &[usize]) -> Vec<String> {
    theta
        .iter()
        .enumerate()
        .map(|(i, &t)| spec.type_space(i).label(t).to_string())
        .collect()
}

fn induced_rows(spec: &GameSpec, outcome_at: impl Fn(&[usize]) -> usize) -> Vec<OutcomeRow> {
    spec.type_profiles()
        .iter()
        .map(|theta| OutcomeRow {
            outcome: spec.outcomes().label(outcome_at(&theta)).to_string(),
            profile: type_names(spec, &theta),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SolvedEquilibrium {
    pub index: usize,
    pub profile: Vec<AgentStrategy>,
    pub induced_outcomes: Vec<OutcomeRow>,
    /// `None` when the file declares no social choice function.
    pub implements_scf: Option<bool>,
    pub interim_utilities: Vec<UtilityRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub format: String,
    pub search_space: String,
    pub equilibria_found: usize,
    pub equilibria: Vec<SolvedEquilibrium>,
}

pub fn solve_report(
    spec: &GameSpec,
    mech: &Mechanism,
    scf: Option<&SocialChoiceFunction>,
    equilibria: &[StrategyProfile],
) -> Result<SolveReport> {
    let mut out = Vec::with_capacity(equilibria.len());
    for (index, eq) in equilibria.iter().enumerate() {
        let mut interim = Vec::new();
        for i in 0..spec.num_agents() {
            for t in 0..spec.type_space(i).len() {
                for s in 0..mech.strategy_set(i).len() {
                    let eu = interim_expected_utility(spec, mech, eq, i, t, Some(s))?;
                    interim.push(UtilityRow {
                        agent: spec.agents().label(i).to_string(),
                        own_type: spec.type_space(i).label(t).to_string(),
                        strategy: mech.strategy_set(i).label(s).to_string(),
                        prescribed: eq.strategy(i, t) == s,
                        expected_utility: format_rational(&eu),
                    });
                }
            }
        }
        let implements_scf = scf.map(|f| {
            spec.type_profiles()
                .iter()
                .all(|theta| mech.outcome(&eq.play(&theta)) == f.outcome(spec, &theta))
        });
        out.push(SolvedEquilibrium {
            index,
            profile: profile_out(spec, mech, eq),
            induced_outcomes: induced_rows(spec, |theta| mech.outcome(&eq.play(theta))),
            implements_scf,
            interim_utilities: interim,
        });
    }
    Ok(SolveReport {
        format: mech.format().to_string(),
        search_space: crate::equilibrium::search_space_size(spec, mech).to_string(),
        equilibria_found: equilibria.len(),
        equilibria: out,
    })
}

pub fn render_solve(r: &SolveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} equilibria found (format {}, {} candidate profiles)",
        r.equilibria_found, r.format, r.search_space
    );
    for eq in &r.equilibria {
        let _ = writeln!(s, "\nequilibrium #{}", eq.index);
        write_profile(&mut s, &eq.profile);
        write_outcomes(&mut s, "induced outcomes", &eq.induced_outcomes);
        match eq.implements_scf {
            Some(true) => s.push_str("  implements scf: yes\n"),
            Some(false) => s.push_str("  implements scf: no\n"),
            None => s.push_str("  implements scf: n/a (no scf declared)\n"),
        }
        s.push_str("  interim expected utilities:\n");
        for u in &eq.interim_utilities {
            let _ = writeln!(
                s,
                "    {:<8} {:<8} {:<8} {:>12}{}",
                u.agent,
                u.own_type,
                u.strategy,
                u.expected_utility,
                if u.prescribed { "  *" } else { "" }
            );
        }
    }
    s
}

fn write_profile(s: &mut String, profile: &[AgentStrategy]) {
    for a in profile {
        let parts: Vec<String> = a
            .map
            .iter()
            .map(|m| format!("{} -> {}", m.own_type, m.strategy))
            .collect();
        let _ = writeln!(s, "  agent {}: {}", a.agent, parts.join(", "));
    }
}

fn write_outcomes(s: &mut String, title: &str, rows: &[OutcomeRow]) {
    let _ = writeln!(s, "  {title}:");
    for r in rows {
        let _ = writeln!(s, "    ({}) -> {}", r.profile.join(", "), r.outcome);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectEntry {
    pub index: usize,
    pub equilibrium: Vec<AgentStrategy>,
    pub compound_outcomes: Vec<OutcomeRow>,
    pub implements_scf: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildDirectReport {
    pub format: String,
    pub direct_mechanisms: Vec<DirectEntry>,
}

pub fn build_direct_report(
    spec: &GameSpec,
    mech: &Mechanism,
    scf: Option<&SocialChoiceFunction>,
    directs: &[(usize, DirectMechanism)],
) -> BuildDirectReport {
    BuildDirectReport {
        format: mech.format().to_string(),
        direct_mechanisms: directs
            .iter()
            .map(|(index, dm)| DirectEntry {
                index: *index,
                equilibrium: profile_out(spec, mech, dm.equilibrium()),
                compound_outcomes: induced_rows(spec, |theta| dm.compound_outcome(theta)),
                implements_scf: scf.map(|f| {
                    spec.type_profiles()
                        .iter()
                        .all(|theta| dm.compound_outcome(&theta) == f.outcome(spec, &theta))
                }),
            })
            .collect(),
    }
}

pub fn render_build_direct(r: &BuildDirectReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} direct mechanism(s) built (format {})",
        r.direct_mechanisms.len(),
        r.format
    );
    for d in &r.direct_mechanisms {
        let _ = writeln!(s, "\ndirect mechanism from equilibrium #{}", d.index);
        write_profile(&mut s, &d.equilibrium);
        write_outcomes(
            &mut s,
            "compound outcome g(s*(reports))",
            &d.compound_outcomes,
        );
        if let Some(b) = d.implements_scf {
            let _ = writeln!(
                s,
                "  equals scf on every report profile: {}",
                if b { "yes" } else { "no" }
            );
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeviationOut {
    pub agent: String,
    #[serde(rename = "type")]
    pub own_type: String,
    pub prescribed: String,
    pub deviation: String,
    pub prescribed_eu: String,
    pub deviation_eu: String,
}

impl DeviationOut {
    fn new(spec: &GameSpec, strategies: &[crate::game::LabelSet], w: &DeviationWitness) -> Self {
        Self {
            agent: spec.agents().label(w.agent).to_string(),
            own_type: spec.type_space(w.agent).label(w.own_type).to_string(),
            prescribed: strategies[w.agent].label(w.prescribed).to_string(),
            deviation: strategies[w.agent].label(w.deviation).to_string(),
            prescribed_eu: format_rational(&w.prescribed_eu),
            deviation_eu: format_rational(&w.deviation_eu),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Plan {
    pub report: String,
    pub action: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultistageDeviationOut {
    pub agent: String,
    pub true_type: String,
    pub prescribed: Plan,
    pub deviation: Plan,
    pub prescribed_eu: String,
    pub deviation_eu: String,
    pub prescribed_exposure: u8,
    pub deviation_exposure: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultistageCheck {
    pub equilibrium: bool,
    pub witness: Option<MultistageDeviationOut>,
}

impl MultistageCheck {
    fn new(spec: &GameSpec, mech: &Mechanism, v: &MultistageVerdict) -> Self {
        let plan = |agent: usize, (r, a): (usize, usize)| Plan {
            report: spec.type_space(agent).label(r).to_string(),
            action: mech.strategy_set(agent).label(a).to_string(),
        };
        Self {
            equilibrium: v.is_equilibrium(),
            witness: v
                .witness()
                .map(|w: &MultistageWitness| MultistageDeviationOut {
                    agent: spec.agents().label(w.agent).to_string(),
                    true_type: spec.type_space(w.agent).label(w.true_type).to_string(),
                    prescribed: plan(w.agent, w.prescribed),
                    deviation: plan(w.agent, w.deviation),
                    prescribed_eu: format_rational(&w.prescribed_eu),
                    deviation_eu: format_rational(&w.deviation_eu),
                    prescribed_exposure: w.prescribed_exposure,
                    deviation_exposure: w.deviation_exposure,
                }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MessageRow {
    pub index: usize,
    pub equilibrium: Vec<AgentStrategy>,
    pub truthful: bool,
    pub witness: Option<DeviationOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AgentFlag {
    pub agent: String,
    pub value: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionRow {
    pub index: usize,
    pub equilibrium: Vec<AgentStrategy>,
    pub honest_obedient_standard: MultistageCheck,
    pub honest_obedient: MultistageCheck,
    pub dishonest_disobedient: Option<MultistageCheck>,
    pub dishonest_implements_scf: Option<bool>,
    pub unilateral_lie_keeps_outcome: Vec<AgentFlag>,
    pub injective_actions: Vec<AgentFlag>,
    pub verdict: EquilibriumVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeceptionOut {
    pub agent: String,
    pub map: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "format", rename_all = "lowercase")]
pub enum RevelationReport {
    Message {
        verdict: RevelationVerdict,
        equilibria_found: usize,
        implementing_equilibria: usize,
        rows: Vec<MessageRow>,
        notes: Vec<String>,
    },
    Action {
        verdict: RevelationVerdict,
        preferences: PreferenceModel,
        equilibria_found: usize,
        implementing_equilibria: usize,
        deceptions: Option<Vec<DeceptionOut>>,
        single_type_agents: Vec<String>,
        rows: Vec<ActionRow>,
        notes: Vec<String>,
    },
}

impl RevelationReport {
    pub fn verdict(&self) -> RevelationVerdict {
        match self {
            RevelationReport::Message { verdict, .. }
            | RevelationReport::Action { verdict, .. } => *verdict,
        }
    }
}

pub fn message_revelation_report(
    spec: &GameSpec,
    mech: &Mechanism,
    r: &MessageRevelationReport,
) -> RevelationReport {
    let rows = r
        .records
        .iter()
        .map(|rec| MessageRow {
            index: rec.index,
            equilibrium: profile_out(spec, mech, &rec.equilibrium),
            truthful: rec.truthful.is_equilibrium(),
            witness: match &rec.truthful {
                BneVerdict::Equilibrium => None,
                BneVerdict::Deviation(w) => Some(DeviationOut::new(spec, spec.type_spaces(), w)),
            },
        })
        .collect();
    let mut notes = vec!["message format: truth-telling checked in the one-stage direct game under standard utilities".to_string()];
    if r.verdict == RevelationVerdict::Vacuous {
        notes.push("no equilibrium of the mechanism implements the scf".to_string());
    }
    RevelationReport::Message {
        verdict: r.verdict,
        equilibria_found: r.equilibria_found,
        implementing_equilibria: r.records.len(),
        rows,
        notes,
    }
}

pub fn action_revelation_report(
    spec: &GameSpec,
    mech: &Mechanism,
    r: &ActionRevelationReport,
) -> RevelationReport {
    let agent = |i: usize| spec.agents().label(i).to_string();
    let rows = r
        .records
        .iter()
        .map(|rec| ActionRow {
            index: rec.index,
            equilibrium: profile_out(spec, mech, &rec.equilibrium),
            honest_obedient_standard: MultistageCheck::new(
                spec,
                mech,
                &rec.honest_obedient_standard,
            ),
            honest_obedient: MultistageCheck::new(spec, mech, &rec.honest_obedient),
            dishonest_disobedient: rec
                .dishonest_disobedient
                .as_ref()
                .map(|v| MultistageCheck::new(spec, mech, v)),
            dishonest_implements_scf: rec.dishonest_implements_scf,
            unilateral_lie_keeps_outcome: rec
                .unilateral_invariance
                .iter()
                .enumerate()
                .map(|(i, &value)| AgentFlag {
                    agent: agent(i),
                    value,
                })
                .collect(),
            injective_actions: rec
                .injective_actions
                .iter()
                .enumerate()
                .map(|(i, &b)| AgentFlag {
                    agent: agent(i),
                    value: Some(b),
                })
                .collect(),
            verdict: rec.verdict,
        })
        .collect();
    let mut notes = Vec::new();
    if r.prefs == PreferenceModel::PrivacyLexicographic {
        notes.push(PRIVACY_MODEL_NOTE.to_string());
    }
    if !r.single_type_agents.is_empty() {
        let names: Vec<String> = r.single_type_agents.iter().map(|&i| agent(i)).collect();
        notes.push(format!(
            "no full deception profile exists: agent(s) {} have a single type, so the dishonest-disobedient analysis is inapplicable",
            names.join(", ")
        ));
    }
    if r.records
        .iter()
        .any(|rec| rec.injective_actions.iter().any(|&b| b))
    {
        notes.push(
            "where an equilibrium action map is injective, the performed action alone identifies the true type to an observer"
                .to_string(),
        );
    }
    if r.verdict == RevelationVerdict::Vacuous {
        notes.push("no equilibrium of the mechanism implements the scf".to_string());
    }
    RevelationReport::Action {
        verdict: r.verdict,
        preferences: r.prefs,
        equilibria_found: r.equilibria_found,
        implementing_equilibria: r.records.len(),
        deceptions: r.deceptions.as_ref().map(|d| {
            d.maps()
                .iter()
                .enumerate()
                .map(|(i, m)| DeceptionOut {
                    agent: agent(i),
                    map: m
                        .iter()
                        .enumerate()
                        .map(|(t, &r)| {
                            (
                                spec.type_space(i).label(t).to_string(),
                                spec.type_space(i).label(r).to_string(),
                            )
                        })
                        .collect(),
                })
                .collect()
        }),
        single_type_agents: r.single_type_agents.iter().map(|&i| agent(i)).collect(),
        rows,
        notes,
    }
}

fn check_cell(c: &MultistageCheck) -> String {
    match &c.witness {
        None => "BNE".to_string(),
        Some(w) => format!(
            "not BNE: agent {} type {} prefers ({}, {}) [eu {} vs {}, exposure {} vs {}]",
            w.agent,
            w.true_type,
            w.deviation.report,
            w.deviation.action,
            w.deviation_eu,
            w.prescribed_eu,
            w.deviation_exposure,
            w.prescribed_exposure
        ),
    }
}

fn flags(fs: &[AgentFlag]) -> String {
    fs.iter()
        .map(|f| {
            let v = match f.value {
                Some(true) => "yes",
                Some(false) => "no",
                None => "n/a",
            };
            format!("{}={}", f.agent, v)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn render_revelation(r: &RevelationReport) -> String {
    let mut s = String::new();
    match r {
        RevelationReport::Message {
            verdict,
            equilibria_found,
            implementing_equilibria,
            rows,
            notes,
        } => {
            let _ = writeln!(
                s,
                "format message: {equilibria_found} equilibria, {implementing_equilibria} implement the scf"
            );
            for row in rows {
                let _ = writeln!(s, "\nequilibrium #{}", row.index);
                write_profile(&mut s, &row.equilibrium);
                match &row.witness {
                    None => s.push_str("  truth-telling: BNE\n"),
                    Some(w) => {
                        let _ = writeln!(
                            s,
                            "  truth-telling: not BNE: agent {} type {} misreports {} [eu {} vs {}]",
                            w.agent, w.own_type, w.deviation, w.deviation_eu, w.prescribed_eu
                        );
                    }
                }
            }
            write_notes(&mut s, notes);
            let _ = writeln!(s, "\nverdict: {verdict}");
        }
        RevelationReport::Action {
            verdict,
            preferences,
            equilibria_found,
            implementing_equilibria,
            deceptions,
            rows,
            notes,
            ..
        } => {
            let _ = writeln!(
                s,
                "format action, preferences {preferences}: {equilibria_found} equilibria, {implementing_equilibria} implement the scf"
            );
            if let Some(ds) = deceptions {
                for d in ds {
                    let parts: Vec<String> =
                        d.map.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
                    let _ = writeln!(s, "deception of agent {}: {}", d.agent, parts.join(", "));
                }
            }
            for row in rows {
                let _ = writeln!(s, "\nequilibrium #{}", row.index);
                write_profile(&mut s, &row.equilibrium);
                let _ = writeln!(
                    s,
                    "  honest-obedient, standard prefs  : {}",
                    check_cell(&row.honest_obedient_standard)
                );
                let _ = writeln!(
                    s,
                    "  honest-obedient, chosen prefs    : {}",
                    check_cell(&row.honest_obedient)
                );
                let _ = writeln!(
                    s,
                    "  unilateral lie keeps outcome     : {}",
                    flags(&row.unilateral_lie_keeps_outcome)
                );
                match &row.dishonest_disobedient {
                    Some(c) => {
                        let _ =
                            writeln!(s, "  dishonest-disobedient            : {}", check_cell(c));
                    }
                    None => s.push_str(
                        "  dishonest-disobedient            : n/a (no full deception profile)\n",
                    ),
                }
                if let Some(b) = row.dishonest_implements_scf {
                    let _ = writeln!(
                        s,
                        "  dishonest-disobedient gives scf  : {}",
                        if b { "yes" } else { "no" }
                    );
                }
                let _ = writeln!(
                    s,
                    "  injective action maps            : {}",
                    flags(&row.injective_actions)
                );
                let _ = writeln!(s, "  equilibrium verdict              : {}", row.verdict);
            }
            write_notes(&mut s, notes);
            let _ = writeln!(s, "\nverdict: {verdict}");
        }
    }
    s
}

fn write_notes(s: &mut String, notes: &[String]) {
    if notes.is_empty() {
        return;
    }
    s.push_str("\nnotes:\n");
    for n in notes {
        let _ = writeln!(s, "  - {n}");
    }
}
