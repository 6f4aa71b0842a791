//! Finite Bayesian mechanism design with exact rational arithmetic.
//!
//! The crate models a finite Bayesian environment ([`GameSpec`]), mechanisms in
//! either strategy format ([`Mechanism`], [`Format`]), and pure strategy
//! profiles. On top of that it provides:
//!
//! * interim expected utilities, Bayesian Nash equilibrium checks and an
//!   exhaustive, deterministic, parallel equilibrium enumerator
//!   ([`equilibrium`]);
//! * direct mechanisms built from the compound map `g(s*(·))` and the
//!   truth-telling check for the one-stage message-format direct game
//!   ([`direct`]);
//! * the multistage report/suggest/act/outcome game played by an
//!   action-format direct mechanism, with standard and privacy-lexicographic
//!   preferences ([`multistage`]);
//! * a TOML game-file format with positioned diagnostics ([`format`]) and the
//!   report types shared by the command-line tool ([`report`]).
//!
//! Every probability and payoff is a [`Rational`]; there is no floating point
//! and no tolerance anywhere in the evaluation path.

pub mod direct;
pub mod equilibrium;
pub mod error;
pub mod format;
pub mod game;
pub mod multistage;
pub mod random;
pub mod rational;
pub mod report;

mod kernel;

pub use direct::{
    build_direct, check_revelation_message, check_truthful, direct_game_outcome, DirectMechanism,
    MessageEquilibriumRecord, MessageRevelationReport, RevelationVerdict,
};
pub use equilibrium::{
    derive_scf, enumerate_bne, enumerate_bne_with, implements, interim_expected_utility, is_bne,
    search_space_size, BneVerdict, DeviationWitness, Implementation, SearchOptions, DEFAULT_CAP,
};
pub use error::{Error, Result};
pub use format::{parse_game_file, serialize_game_file, Diagnostic, GameFile, GameFileError};
pub use game::{
    conditional, marginal, validate_game, Format, GameSpec, LabelSet, Mechanism, ProfileSpace,
    SocialChoiceFunction, StrategyProfile, ValidationIssue, ValidationReport,
};
pub use multistage::{
    check_revelation_action, dishonest_disobedient, honest_obedient, induced_outcomes,
    is_bne_multistage, play_multistage, unilateral_dishonest, ActionEquilibriumRecord,
    ActionRevelationReport, Deceptions, EquilibriumVerdict, MultistageStrategy, MultistageVerdict,
    MultistageWitness, PlayTrace, PreferenceModel, Suggestion,
};
pub use rational::Rational;
