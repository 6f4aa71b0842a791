//! TOML game-definition files.
//!
//! ```toml
//! agents = ["1", "2"]
//! outcomes = ["x0", "x1"]
//!
//! [[types]]
//! agent = "1"
//! labels = ["L", "H"]
//!
//! [[prior]]
//! profile = ["L", "H"]
//! probability = "1/4"
//!
//! [[utilities]]
//! agent = "1"
//! entries = [{ outcome = "x0", type = "L", value = "1" }]
//!
//! [[scf]]                      # optional
//! profile = ["L", "H"]
//! outcome = "x0"
//!
//! [mechanism]
//! format = "action"            # or "message"
//!
//! [[mechanism.strategy_sets]]
//! agent = "1"
//! labels = ["p", "q"]
//!
//! [[mechanism.outcome_table]]
//! profile = ["p", "q"]
//! outcome = "x0"
//! ```
//!
//! Numbers are rational strings (`"p/q"` or an integer). Prior profiles that
//! are not listed have probability 0; utilities, the social choice function and
//! the outcome table must be total. Label order is declaration order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::ops::Range;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::game::{
    validate_game, Format, GameSpec, LabelSet, Mechanism, ProfileSpace, SocialChoiceFunction,
    ValidationIssue,
};
use crate::multistage::Deceptions;
use crate::rational::{format_rational, parse_rational, Rational};

/// A parse or validation problem at a position in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: Option<String>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )?;
        if let Some(tok) = &self.token {
            write!(f, " (at `{tok}`)")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameFileError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for GameFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for GameFileError {}

/// The validated contents of a game file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameFile {
    pub spec: GameSpec,
    pub scf: Option<SocialChoiceFunction>,
    pub mechanism: Mechanism,
}

type Label = Spanned<String>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    agents: Spanned<Vec<Label>>,
    outcomes: Spanned<Vec<Label>>,
    types: Spanned<Vec<Spanned<RawLabels>>>,
    prior: Spanned<Vec<Spanned<RawPrior>>>,
    utilities: Spanned<Vec<Spanned<RawUtilities>>>,
    scf: Option<Spanned<Vec<Spanned<RawAssignment>>>>,
    mechanism: Spanned<RawMechanism>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLabels {
    agent: Label,
    labels: Spanned<Vec<Label>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrior {
    profile: Spanned<Vec<Label>>,
    probability: Label,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUtilities {
    agent: Label,
    entries: Vec<Spanned<RawUtility>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUtility {
    outcome: Label,
    #[serde(rename = "type")]
    own_type: Label,
    value: Label,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAssignment {
    profile: Spanned<Vec<Label>>,
    outcome: Label,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMechanism {
    format: Label,
    strategy_sets: Spanned<Vec<Spanned<RawLabels>>>,
    outcome_table: Spanned<Vec<Spanned<RawAssignment>>>,
}

struct Ctx<'a> {
    text: &'a str,
    diagnostics: Vec<Diagnostic>,
}

impl<'a> Ctx<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text,
            diagnostics: Vec::new(),
        }
    }

    fn position(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.text.len());
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        (line, before[line_start..].chars().count() + 1)
    }

    fn push(&mut self, span: Range<usize>, message: impl Into<String>) {
        let (line, column) = self.position(span.start);
        let token = self
            .text
            .get(span.clone())
            .map(|t| t.lines().next().unwrap_or("").trim().to_string())
            .filter(|t| !t.is_empty());
        self.diagnostics.push(Diagnostic {
            line,
            column,
            message: message.into(),
            token,
        });
    }

    fn label_set(&mut self, what: &str, raw: &Spanned<Vec<Label>>) -> Option<LabelSet> {
        let mut seen = HashSet::new();
        let mut ok = true;
        for label in raw.get_ref() {
            if !seen.insert(label.get_ref().as_str()) {
                self.push(
                    label.span(),
                    format!("duplicate {what} label {:?}", label.get_ref()),
                );
                ok = false;
            }
        }
        if raw.get_ref().is_empty() {
            self.push(raw.span(), format!("{what} list is empty"));
            ok = false;
        }
        ok.then(|| {
            LabelSet::new(raw.get_ref().iter().map(|l| l.get_ref().clone())).expect("checked")
        })
    }

    fn rational(&mut self, raw: &Label) -> Option<Rational> {
        match parse_rational(raw.get_ref()) {
            Ok(r) => Some(r),
            Err(e) => {
                self.push(raw.span(), e.to_string());
                None
            }
        }
    }

    fn resolve(&mut self, set: &LabelSet, raw: &Label, what: &str) -> Option<usize> {
        let found = set.position(raw.get_ref());
        if found.is_none() {
            self.push(raw.span(), format!("unknown {what} {:?}", raw.get_ref()));
        }
        found
    }

    /// Per-agent label sets keyed by agent label, in agent order.
    fn per_agent_sets(
        &mut self,
        what: &str,
        agents: &LabelSet,
        agents_span: Range<usize>,
        raw: &Spanned<Vec<Spanned<RawLabels>>>,
    ) -> Option<Vec<LabelSet>> {
        let mut sets: Vec<Option<LabelSet>> = vec![None; agents.len()];
        let mut ok = true;
        for entry in raw.get_ref() {
            let e = entry.get_ref();
            let Some(i) = self.resolve(agents, &e.agent, "agent") else {
                ok = false;
                continue;
            };
            if sets[i].is_some() {
                self.push(
                    e.agent.span(),
                    format!("{what} of agent {:?} declared twice", e.agent.get_ref()),
                );
                ok = false;
                continue;
            }
            match self.label_set(what, &e.labels) {
                Some(s) => sets[i] = Some(s),
                None => ok = false,
            }
        }
        for (i, s) in sets.iter().enumerate() {
            if s.is_none() && ok {
                self.push(
                    agents_span.clone(),
                    format!("no {what} declared for agent {:?}", agents.label(i)),
                );
                ok = false;
            }
        }
        ok.then(|| sets.into_iter().map(Option::unwrap).collect())
    }

    fn profile(
        &mut self,
        sets: &[LabelSet],
        raw: &Spanned<Vec<Label>>,
        what: &str,
    ) -> Option<Vec<usize>> {
        if raw.get_ref().len() != sets.len() {
            self.push(
                raw.span(),
                format!(
                    "{what} profile has {} entries, expected {}",
                    raw.get_ref().len(),
                    sets.len()
                ),
            );
            return None;
        }
        let mut out = Vec::with_capacity(sets.len());
        let mut ok = true;
        for (set, label) in sets.iter().zip(raw.get_ref()) {
            match self.resolve(set, label, what) {
                Some(i) => out.push(i),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    /// Dense table of outcomes from `{profile, outcome}` rows; must be total.
    fn assignment_table(
        &mut self,
        what: &str,
        sets: &[LabelSet],
        outcomes: &LabelSet,
        raw: &Spanned<Vec<Spanned<RawAssignment>>>,
    ) -> Option<Vec<usize>> {
        let space = ProfileSpace::new(sets.iter().map(LabelSet::len).collect());
        let mut table: Vec<Option<usize>> = vec![None; space.len()];
        let mut ok = true;
        let kind = if what == "outcome_table" {
            "strategy"
        } else {
            "type"
        };
        for row in raw.get_ref() {
            let r = row.get_ref();
            let profile = self.profile(sets, &r.profile, kind);
            let outcome = self.resolve(outcomes, &r.outcome, "outcome");
            let (Some(profile), Some(outcome)) = (profile, outcome) else {
                ok = false;
                continue;
            };
            let slot = &mut table[space.index(&profile)];
            if slot.is_some() {
                self.push(r.profile.span(), format!("duplicate {what} row"));
                ok = false;
            }
            *slot = Some(outcome);
        }
        if !ok {
            return None;
        }
        let missing: Vec<usize> = (0..table.len()).filter(|&i| table[i].is_none()).collect();
        for &i in &missing {
            let digits = space.digits(i);
            let names: Vec<&str> = digits.iter().zip(sets).map(|(&d, s)| s.label(d)).collect();
            self.push(
                raw.span(),
                format!("{what} is missing {kind} profile ({})", names.join(", ")),
            );
        }
        missing
            .is_empty()
            .then(|| table.into_iter().map(Option::unwrap).collect())
    }
}

fn toml_error(ctx: &mut Ctx<'_>, err: toml::de::Error) {
    let span = err.span().unwrap_or(0..0);
    ctx.push(span, err.message().trim().to_string());
}

/// Parses and validates a game file. On failure every diagnostic found is
/// returned; no partially built objects escape.
pub fn parse_game_file(text: &str) -> Result<GameFile, GameFileError> {
    let mut ctx = Ctx::new(text);
    let raw: RawGame = match toml::from_str(text) {
        Ok(raw) => raw,
        Err(e) => {
            toml_error(&mut ctx, e);
            return Err(GameFileError {
                diagnostics: ctx.diagnostics,
            });
        }
    };
    match build(&mut ctx, &raw) {
        Some(file) if ctx.diagnostics.is_empty() => Ok(file),
        _ => Err(GameFileError {
            diagnostics: ctx.diagnostics,
        }),
    }
}

fn build(ctx: &mut Ctx<'_>, raw: &RawGame) -> Option<GameFile> {
    let agents = ctx.label_set("agent", &raw.agents);
    let outcomes = ctx.label_set("outcome", &raw.outcomes);
    let (agents, outcomes) = (agents?, outcomes?);
    let types = ctx.per_agent_sets("types", &agents, raw.agents.span(), &raw.types)?;
    let space = ProfileSpace::new(types.iter().map(LabelSet::len).collect());

    let mut prior = vec![Rational::zero(); space.len()];
    let mut seen = HashSet::new();
    let mut ok = true;
    for entry in raw.prior.get_ref() {
        let e = entry.get_ref();
        let profile = ctx.profile(&types, &e.profile, "type");
        let p = ctx.rational(&e.probability);
        let (Some(profile), Some(p)) = (profile, p) else {
            ok = false;
            continue;
        };
        let idx = space.index(&profile);
        if !seen.insert(idx) {
            ctx.push(e.profile.span(), "duplicate prior entry");
            ok = false;
        }
        prior[idx] = p;
    }

    let mut utilities: Vec<Option<Vec<Vec<Option<Rational>>>>> = vec![None; agents.len()];
    for block in raw.utilities.get_ref() {
        let b = block.get_ref();
        let Some(i) = ctx.resolve(&agents, &b.agent, "agent") else {
            ok = false;
            continue;
        };
        if utilities[i].is_some() {
            ctx.push(
                b.agent.span(),
                format!("utilities of agent {:?} declared twice", b.agent.get_ref()),
            );
            ok = false;
            continue;
        }
        let mut table = vec![vec![None; types[i].len()]; outcomes.len()];
        for entry in &b.entries {
            let e = entry.get_ref();
            let x = ctx.resolve(&outcomes, &e.outcome, "outcome");
            let t = ctx.resolve(&types[i], &e.own_type, "type");
            let v = ctx.rational(&e.value);
            let (Some(x), Some(t), Some(v)) = (x, t, v) else {
                ok = false;
                continue;
            };
            if table[x][t].is_some() {
                ctx.push(entry.span(), "duplicate utility entry");
                ok = false;
            }
            table[x][t] = Some(v);
        }
        for (x, row) in table.iter().enumerate() {
            for (t, v) in row.iter().enumerate() {
                if v.is_none() {
                    ctx.push(
                        block.span(),
                        format!(
                            "utility of agent {:?} missing for outcome {:?}, type {:?}",
                            agents.label(i),
                            outcomes.label(x),
                            types[i].label(t)
                        ),
                    );
                    ok = false;
                }
            }
        }
        utilities[i] = Some(table);
    }
    for (i, u) in utilities.iter().enumerate() {
        if u.is_none() && ok {
            ctx.push(
                raw.utilities.span(),
                format!("no utilities declared for agent {:?}", agents.label(i)),
            );
            ok = false;
        }
    }

    let scf_table = match &raw.scf {
        Some(s) => {
            let t = ctx.assignment_table("scf", &types, &outcomes, s);
            ok &= t.is_some();
            t
        }
        None => None,
    };

    let m = raw.mechanism.get_ref();
    let format = match m.format.get_ref().as_str() {
        "message" => Some(Format::Message),
        "action" => Some(Format::Action),
        _ => {
            ctx.push(m.format.span(), "format must be \"message\" or \"action\"");
            None
        }
    };
    let strategy_sets = ctx.per_agent_sets(
        "strategy_sets",
        &agents,
        raw.agents.span(),
        &m.strategy_sets,
    );
    let table = match &strategy_sets {
        Some(sets) => ctx.assignment_table("outcome_table", sets, &outcomes, &m.outcome_table),
        None => None,
    };
    if !ok {
        return None;
    }
    let (format, strategy_sets, table) = (format?, strategy_sets?, table?);

    let utilities = utilities
        .into_iter()
        .map(|u| {
            u.expect("checked")
                .into_iter()
                .map(|row| row.into_iter().map(|v| v.expect("checked")).collect())
                .collect()
        })
        .collect();
    let spec = GameSpec::new(agents, types, outcomes, prior, utilities).ok()?;
    for issue in validate_game(&spec).issues {
        let span = match issue {
            ValidationIssue::NoOutcomes => raw.outcomes.span(),
            ValidationIssue::NoAgents | ValidationIssue::EmptyTypeSpace { .. } => raw.types.span(),
            _ => raw.prior.span(),
        };
        ctx.push(span, issue.to_string());
    }
    if !ctx.diagnostics.is_empty() {
        return None;
    }
    let scf = scf_table.map(|t| SocialChoiceFunction::new(&spec, t).expect("resolved"));
    let mechanism = Mechanism::new(format, strategy_sets, table).ok()?;
    Some(GameFile {
        spec,
        scf,
        mechanism,
    })
}

#[derive(Serialize)]
struct OutGame {
    agents: Vec<String>,
    outcomes: Vec<String>,
    types: Vec<OutLabels>,
    prior: Vec<OutPrior>,
    utilities: Vec<OutUtilities>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scf: Option<Vec<OutAssignment>>,
    mechanism: OutMechanism,
}

#[derive(Serialize)]
struct OutLabels {
    agent: String,
    labels: Vec<String>,
}

#[derive(Serialize)]
struct OutPrior {
    profile: Vec<String>,
    probability: String,
}

#[derive(Serialize)]
struct OutUtilities {
    agent: String,
    entries: Vec<OutUtility>,
}

#[derive(Serialize)]
struct OutUtility {
    outcome: String,
    #[serde(rename = "type")]
    own_type: String,
    value: String,
}

#[derive(Serialize)]
struct OutAssignment {
    profile: Vec<String>,
    outcome: String,
}

#[derive(Serialize)]
struct OutMechanism {
    format: Format,
    strategy_sets: Vec<OutLabels>,
    outcome_table: Vec<OutAssignment>,
}

fn names(sets: &[LabelSet], digits: &[usize]) -> Vec<String> {
    digits
        .iter()
        .zip(sets)
        .map(|(&d, s)| s.label(d).to_string())
        .collect()
}

/// Writes a game file that [`parse_game_file`] reads back to identical objects.
pub fn serialize_game_file(file: &GameFile) -> String {
    let spec = &file.spec;
    let agents = spec.agents();
    let per_agent = |sets: &[LabelSet]| -> Vec<OutLabels> {
        sets.iter()
            .enumerate()
            .map(|(i, s)| OutLabels {
                agent: agents.label(i).to_string(),
                labels: s.labels().to_vec(),
            })
            .collect()
    };
    let assignments =
        |sets: &[LabelSet], space: &ProfileSpace, table: &[usize]| -> Vec<OutAssignment> {
            space
                .iter()
                .zip(table)
                .map(|(d, &x)| OutAssignment {
                    profile: names(sets, &d),
                    outcome: spec.outcomes().label(x).to_string(),
                })
                .collect()
        };
    let out = OutGame {
        agents: agents.labels().to_vec(),
        outcomes: spec.outcomes().labels().to_vec(),
        types: per_agent(spec.type_spaces()),
        prior: spec
            .type_profiles()
            .iter()
            .zip(spec.prior_table())
            .map(|(d, p)| OutPrior {
                profile: names(spec.type_spaces(), &d),
                probability: format_rational(p),
            })
            .collect(),
        utilities: (0..spec.num_agents())
            .map(|i| OutUtilities {
                agent: agents.label(i).to_string(),
                entries: (0..spec.outcomes().len())
                    .flat_map(|x| (0..spec.type_space(i).len()).map(move |t| (x, t)))
                    .map(|(x, t)| OutUtility {
                        outcome: spec.outcomes().label(x).to_string(),
                        own_type: spec.type_space(i).label(t).to_string(),
                        value: format_rational(spec.utility(i, x, t)),
                    })
                    .collect(),
            })
            .collect(),
        scf: file
            .scf
            .as_ref()
            .map(|f| assignments(spec.type_spaces(), spec.type_profiles(), f.table())),
        mechanism: OutMechanism {
            format: file.mechanism.format(),
            strategy_sets: per_agent(file.mechanism.strategy_sets()),
            outcome_table: assignments(
                file.mechanism.strategy_sets(),
                file.mechanism.profiles(),
                file.mechanism.outcome_table(),
            ),
        },
    };
    toml::to_string(&out).expect("game file serializes")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDeceptionFile {
    deception: Vec<Spanned<RawDeception>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDeception {
    agent: Label,
    map: Spanned<BTreeMap<String, Label>>,
}

/// Parses an explicit deception profile:
///
/// ```toml
/// [[deception]]
/// agent = "1"
/// map = { L = "H", H = "L" }
/// ```
pub fn parse_deception_file(text: &str, spec: &GameSpec) -> Result<Deceptions, GameFileError> {
    let mut ctx = Ctx::new(text);
    let raw: RawDeceptionFile = match toml::from_str(text) {
        Ok(raw) => raw,
        Err(e) => {
            toml_error(&mut ctx, e);
            return Err(GameFileError {
                diagnostics: ctx.diagnostics,
            });
        }
    };
    let agents = spec.agents();
    let mut maps: Vec<Option<Vec<usize>>> = vec![None; agents.len()];
    for entry in &raw.deception {
        let e = entry.get_ref();
        let Some(i) = ctx.resolve(agents, &e.agent, "agent") else {
            continue;
        };
        let types = spec.type_space(i);
        let mut by_type: HashMap<usize, usize> = HashMap::new();
        for (from, to) in e.map.get_ref() {
            let Some(t) = types.position(from) else {
                ctx.push(e.map.span(), format!("unknown type {from:?}"));
                continue;
            };
            let Some(r) = ctx.resolve(types, to, "type") else {
                continue;
            };
            if r == t {
                ctx.push(
                    to.span(),
                    format!(
                        "deception of agent {:?} fixes type {from:?}",
                        agents.label(i)
                    ),
                );
                continue;
            }
            by_type.insert(t, r);
        }
        for t in 0..types.len() {
            if !by_type.contains_key(&t) && !e.map.get_ref().contains_key(types.label(t)) {
                ctx.push(
                    e.map.span(),
                    format!(
                        "deception of agent {:?} does not map type {:?}",
                        agents.label(i),
                        types.label(t)
                    ),
                );
            }
        }
        maps[i] = Some(
            (0..types.len())
                .map(|t| by_type.get(&t).copied().unwrap_or(t))
                .collect(),
        );
    }
    for (i, m) in maps.iter().enumerate() {
        if m.is_none() {
            ctx.push(
                0..0,
                format!("no deception declared for agent {:?}", agents.label(i)),
            );
        }
    }
    if !ctx.diagnostics.is_empty() {
        return Err(GameFileError {
            diagnostics: ctx.diagnostics,
        });
    }
    let counts: Vec<usize> = spec.type_spaces().iter().map(LabelSet::len).collect();
    Deceptions::new(&counts, maps.into_iter().map(Option::unwrap).collect()).map_err(|e| {
        GameFileError {
            diagnostics: vec![Diagnostic {
                line: 1,
                column: 1,
                message: e.to_string(),
                token: None,
            }],
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
agents = ["1", "2"]
outcomes = ["x0", "x1"]

[[types]]
agent = "1"
labels = ["L", "H"]

[[types]]
agent = "2"
labels = ["L", "H"]

[[prior]]
profile = ["L", "L"]
probability = "1/2"

[[prior]]
profile = ["H", "H"]
probability = "1/2"

[[utilities]]
agent = "1"
entries = [
  { outcome = "x0", type = "L", value = "1" },
  { outcome = "x0", type = "H", value = "0" },
  { outcome = "x1", type = "L", value = "0" },
  { outcome = "x1", type = "H", value = "1" },
]

[[utilities]]
agent = "2"
entries = [
  { outcome = "x0", type = "L", value = "1" },
  { outcome = "x0", type = "H", value = "0" },
  { outcome = "x1", type = "L", value = "0" },
  { outcome = "x1", type = "H", value = "-3/2" },
]

[mechanism]
format = "action"

[[mechanism.strategy_sets]]
agent = "1"
labels = ["p"]

[[mechanism.strategy_sets]]
agent = "2"
labels = ["p", "q"]

[[mechanism.outcome_table]]
profile = ["p", "p"]
outcome = "x0"

[[mechanism.outcome_table]]
profile = ["p", "q"]
outcome = "x1"
"#;

    #[test]
    fn parses_small_file() {
        let file = parse_game_file(SMALL).unwrap();
        assert_eq!(file.spec.num_agents(), 2);
        assert_eq!(file.spec.prior(&[0, 1]), &Rational::zero());
        assert_eq!(file.spec.utility(1, 1, 1), &crate::rational::ratio(-3, 2));
        assert_eq!(file.mechanism.outcome(&[0, 1]), 1);
        assert!(file.scf.is_none());
    }

    #[test]
    fn round_trips() {
        let file = parse_game_file(SMALL).unwrap();
        let text = serialize_game_file(&file);
        assert_eq!(parse_game_file(&text).unwrap(), file);
    }

    #[test]
    fn zero_denominator_is_positioned() {
        let text = SMALL.replacen("\"1/2\"", "\"1/0\"", 1);
        let err = parse_game_file(&text).unwrap_err();
        let d = &err.diagnostics[0];
        assert_eq!(d.message, "zero denominator");
        assert_eq!(d.token.as_deref(), Some("\"1/0\""));
        assert_eq!(d.line, 15);
        assert_eq!(d.column, 15);
    }

    #[test]
    fn missing_outcome_row_names_profile() {
        let text = SMALL.replace(
            "[[mechanism.outcome_table]]\nprofile = [\"p\", \"q\"]\noutcome = \"x1\"\n",
            "",
        );
        let err = parse_game_file(&text).unwrap_err();
        assert_eq!(err.diagnostics.len(), 1);
        assert!(err.diagnostics[0]
            .message
            .contains("outcome_table is missing strategy profile (p, q)"));
    }

    #[test]
    fn unknown_label_is_reported() {
        let text = SMALL.replacen("profile = [\"H\", \"H\"]", "profile = [\"H\", \"M\"]", 1);
        let err = parse_game_file(&text).unwrap_err();
        assert!(err
            .diagnostics
            .iter()
            .any(|d| d.message == "unknown type \"M\"" && d.token.as_deref() == Some("\"M\"")));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_game_file("agents = [\"1\"\noutcomes = ").unwrap_err();
        assert_eq!(err.diagnostics.len(), 1);
        assert!(err.diagnostics[0].line >= 1);
    }

    #[test]
    fn missing_utility_is_reported() {
        let text = SMALL.replacen(
            "  { outcome = \"x1\", type = \"H\", value = \"1\" },\n",
            "",
            1,
        );
        let err = parse_game_file(&text).unwrap_err();
        assert!(err.diagnostics[0]
            .message
            .contains("missing for outcome \"x1\", type \"H\""));
    }

    #[test]
    fn invariant_violation_is_delegated() {
        let text = SMALL.replacen("\"1/2\"", "\"1/4\"", 1);
        let err = parse_game_file(&text).unwrap_err();
        assert!(err
            .diagnostics
            .iter()
            .any(|d| d.message == "prior mass 3/4 ≠ 1"));
    }

    #[test]
    fn deception_file() {
        let file = parse_game_file(SMALL).unwrap();
        let good = "[[deception]]\nagent = \"1\"\nmap = { L = \"H\", H = \"L\" }\n\n[[deception]]\nagent = \"2\"\nmap = { L = \"H\", H = \"L\" }\n";
        let d = parse_deception_file(good, &file.spec).unwrap();
        assert_eq!(d.map(0), &[1, 0]);
        let fixed = good.replacen("H = \"L\"", "H = \"H\"", 1);
        let err = parse_deception_file(&fixed, &file.spec).unwrap_err();
        assert!(err.diagnostics[0].message.contains("fixes type \"H\""));
    }
}
