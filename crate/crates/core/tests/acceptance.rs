//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use revelation::random::{random_instance, random_profile, Instance, InstanceConfig};
use revelation::{
    build_direct, check_revelation_action, check_truthful, derive_scf, dishonest_disobedient,
    enumerate_bne, enumerate_bne_with, honest_obedient, induced_outcomes, is_bne,
    is_bne_multistage, search_space_size, unilateral_dishonest, Deceptions, Format,
    PreferenceModel, RevelationVerdict, SearchOptions, StrategyProfile, DEFAULT_CAP,
};

const CORPUS_SIZE: usize = 500;
const CORPUS_SEED: u64 = 0x5eed_0001;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// 2–3 agents, 2–3 types, 2–4 strategies, full-support rational priors.
fn corpus() -> Vec<Instance> {
    let mut rng = common::rng(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|_| random_instance(&mut rng, &InstanceConfig::default(), Format::Message))
        .collect()
}

fn as_action(inst: &Instance) -> Instance {
    Instance {
        spec: inst.spec.clone(),
        mech: inst.mech.with_format(Format::Action),
    }
}

fn criterion_1(corpus: &[Instance]) -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    for (k, inst) in corpus.iter().enumerate() {
        for eq in enumerate_bne(&inst.spec, &inst.mech, DEFAULT_CAP).map_err(|e| e.to_string())? {
            let scf = derive_scf(&inst.mech, &eq, &inst.spec).map_err(|e| e.to_string())?;
            let dm = build_direct(&inst.spec, &inst.mech, &eq).map_err(|e| e.to_string())?;
            for theta in inst.spec.type_profiles().iter() {
                ensure!(
                    dm.compound_outcome(&theta) == scf.outcome(&inst.spec, &theta),
                    "instance {k}: direct mechanism differs from derived scf"
                );
            }
            let v = check_truthful(&inst.spec, &dm).map_err(|e| e.to_string())?;
            ensure!(
                v.is_equilibrium(),
                "instance {k}: truth-telling not a BNE: {v:?}"
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(checked > 0, "no equilibria found in the corpus");
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!(
        "{} instances, {checked} implementing equilibria truthful, {:.1?}",
        corpus.len(),
        elapsed
    ))
}

/// Every implementing equilibrium of the action-format corpus, grouped by the
/// scf it derives, analysed through the full pipeline.
fn criterion_2_and_3(corpus: &[Instance]) -> (Outcome, Outcome) {
    let mut privacy_checked = 0usize;
    let mut standard_checked = 0usize;
    let mut fail2 = None;
    let mut fail3 = None;
    'outer: for (k, inst) in corpus.iter().map(as_action).enumerate() {
        let eqs = match enumerate_bne(&inst.spec, &inst.mech, DEFAULT_CAP) {
            Ok(e) => e,
            Err(e) => {
                fail2 = Some(e.to_string());
                break;
            }
        };
        let mut scfs = BTreeMap::new();
        for eq in &eqs {
            let scf = derive_scf(&inst.mech, eq, &inst.spec).unwrap();
            scfs.entry(scf.table().to_vec()).or_insert(scf);
        }
        for scf in scfs.values() {
            let privacy = check_revelation_action(
                &inst.spec,
                &inst.mech,
                scf,
                DEFAULT_CAP,
                PreferenceModel::PrivacyLexicographic,
                None,
            )
            .unwrap();
            if privacy.verdict != RevelationVerdict::Fails {
                fail2 = Some(format!("instance {k}: overall verdict {}", privacy.verdict));
                break 'outer;
            }
            for rec in &privacy.records {
                let dm = &rec.direct;
                let ho = honest_obedient(dm).unwrap();
                let dd =
                    dishonest_disobedient(dm, &Deceptions::cyclic(&type_counts(&inst)).unwrap())
                        .unwrap();
                let ho_v =
                    is_bne_multistage(&inst.spec, dm, &ho, PreferenceModel::PrivacyLexicographic)
                        .unwrap();
                let dd_v =
                    is_bne_multistage(&inst.spec, dm, &dd, PreferenceModel::PrivacyLexicographic)
                        .unwrap();
                let oracle_ho =
                    common::multistage_first_deviation(&inst.spec, &inst.mech, ho.plans(), true);
                let oracle_dd =
                    common::multistage_first_deviation(&inst.spec, &inst.mech, dd.plans(), true);
                let outcomes = induced_outcomes(dm, &dd).unwrap();
                let expected: Vec<usize> = inst
                    .spec
                    .type_profiles()
                    .iter()
                    .map(|t| scf.outcome(&inst.spec, &t))
                    .collect();
                if ho_v.is_equilibrium() || oracle_ho.is_none() {
                    fail2 = Some(format!(
                        "instance {k}: honest-obedient survives privacy preferences"
                    ));
                    break 'outer;
                }
                if !dd_v.is_equilibrium() || oracle_dd.is_some() {
                    fail2 = Some(format!(
                        "instance {k}: dishonest-disobedient is not an equilibrium: {dd_v:?}"
                    ));
                    break 'outer;
                }
                if outcomes != expected || rec.dishonest_implements_scf != Some(true) {
                    fail2 = Some(format!(
                        "instance {k}: dishonest-disobedient outcomes differ from the scf"
                    ));
                    break 'outer;
                }
                privacy_checked += 1;
            }

            let standard = check_revelation_action(
                &inst.spec,
                &inst.mech,
                scf,
                DEFAULT_CAP,
                PreferenceModel::Standard,
                None,
            )
            .unwrap();
            for rec in &standard.records {
                let ho = honest_obedient(&rec.direct).unwrap();
                let oracle =
                    common::multistage_first_deviation(&inst.spec, &inst.mech, ho.plans(), false);
                if !rec.honest_obedient.is_equilibrium() || oracle.is_some() {
                    fail3.get_or_insert(format!(
                        "instance {k}: honest-obedient not a BNE under standard preferences"
                    ));
                }
                standard_checked += 1;
            }
        }
    }
    let c2 = match fail2 {
        Some(e) => Err(e),
        None if privacy_checked == 0 => Err("no implementing equilibria checked".into()),
        None => Ok(format!("{privacy_checked} implementing equilibria: honest-obedient fails, dishonest-disobedient holds and implements")),
    };
    let c3 = match fail3 {
        Some(e) => Err(e),
        None if standard_checked == 0 => Err("no implementing equilibria checked".into()),
        None => Ok(format!(
            "{standard_checked} implementing equilibria: honest-obedient is a BNE"
        )),
    };
    (c2, c3)
}

fn type_counts(inst: &Instance) -> Vec<usize> {
    inst.spec.type_spaces().iter().map(|t| t.len()).collect()
}

fn criterion_4(corpus: &[Instance]) -> Outcome {
    let mut traces = 0usize;
    for (k, inst) in corpus.iter().map(as_action).enumerate() {
        for eq in enumerate_bne(&inst.spec, &inst.mech, DEFAULT_CAP).map_err(|e| e.to_string())? {
            let dm = build_direct(&inst.spec, &inst.mech, &eq).map_err(|e| e.to_string())?;
            let expected: Vec<usize> = inst
                .spec
                .type_profiles()
                .iter()
                .map(|theta| inst.mech.outcome(&eq.play(&theta)))
                .collect();
            for (i, n) in type_counts(&inst).into_iter().enumerate() {
                for d in common::fixed_point_free_maps(n) {
                    let strat = unilateral_dishonest(&dm, i, &d).map_err(|e| e.to_string())?;
                    let got = induced_outcomes(&dm, &strat).map_err(|e| e.to_string())?;
                    ensure!(
                        got == expected,
                        "instance {k}, agent {i}, deception {d:?}: outcome changed"
                    );
                    traces += 1;
                }
            }
        }
    }
    ensure!(traces > 0, "no deviations traced");
    Ok(format!(
        "{traces} unilateral deceptions leave every outcome unchanged"
    ))
}

fn compare_with_oracle(
    inst: &Instance,
    p: &StrategyProfile,
    order: Option<&[usize]>,
) -> Result<(), String> {
    let got = is_bne(&inst.spec, &inst.mech, p).map_err(|e| e.to_string())?;
    let want = common::first_deviation(&inst.spec, &inst.mech, p.maps(), order);
    match (got.witness(), &want) {
        (None, None) => Ok(()),
        (Some(w), Some(o))
            if (w.agent, w.own_type, w.prescribed, w.deviation)
                == (o.agent, o.own_type, o.prescribed, o.deviation)
                && w.prescribed_eu == o.prescribed_eu
                && w.deviation_eu == o.deviation_eu =>
        {
            Ok(())
        }
        (g, o) => Err(format!("library {g:?} vs oracle {o:?} on {:?}", p.maps())),
    }
}

fn criterion_5() -> Outcome {
    let mut rng = common::rng(0x5eed_0005);
    let cfg = InstanceConfig::default();
    let mut pairs = 0usize;
    let mut bne_pairs = 0usize;
    while pairs < 1000 {
        let inst = random_instance(&mut rng, &cfg, Format::Message);
        let p = if pairs % 2 == 1 {
            let eqs =
                enumerate_bne(&inst.spec, &inst.mech, DEFAULT_CAP).map_err(|e| e.to_string())?;
            match eqs.choose(&mut rng) {
                Some(eq) => {
                    bne_pairs += 1;
                    eq.clone()
                }
                None => random_profile(&mut rng, &inst.spec, &inst.mech),
            }
        } else {
            random_profile(&mut rng, &inst.spec, &inst.mech)
        };
        compare_with_oracle(&inst, &p, None)?;
        pairs += 1;
    }
    ensure!(bne_pairs > 0, "no equilibrium profiles among the pairs");

    let limit = num_bigint::BigUint::from(100_000u32);
    let mut enumerated = 0usize;
    let mut total_eqs = 0usize;
    let mut largest = num_bigint::BigUint::from(0u32);
    while enumerated < 100 {
        let inst = random_instance(&mut rng, &cfg, Format::Message);
        let size = search_space_size(&inst.spec, &inst.mech);
        if size > limit {
            continue;
        }
        let got: Vec<Vec<Vec<usize>>> = enumerate_bne(&inst.spec, &inst.mech, DEFAULT_CAP)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|e| e.maps().to_vec())
            .collect();
        let want = common::enumerate(&inst.spec, &inst.mech);
        ensure!(
            got == want,
            "enumeration differs on instance {enumerated}: {got:?} vs {want:?}"
        );
        total_eqs += got.len();
        largest = largest.max(size);
        enumerated += 1;
    }
    ensure!(total_eqs > 0, "oracle enumeration found nothing to compare");
    Ok(format!(
        "{pairs} (instance, profile) pairs ({bne_pairs} equilibria) and {enumerated} enumerations ({total_eqs} equilibria, largest space {largest}) agree"
    ))
}

fn criterion_6() -> Outcome {
    let cfg = InstanceConfig {
        max_denominator: 1_000_000,
        max_numerator: 1_000_000,
        ..InstanceConfig::default()
    };
    let mut rng = common::rng(0x5eed_0006);
    let mut verdicts = 0usize;
    for k in 0..40 {
        let inst = random_instance(&mut rng, &cfg, Format::Message);
        let reference =
            enumerate_bne(&inst.spec, &inst.mech, DEFAULT_CAP).map_err(|e| e.to_string())?;
        for workers in [1, 2, 3, 8] {
            let again = enumerate_bne_with(
                &inst.spec,
                &inst.mech,
                &SearchOptions {
                    cap: DEFAULT_CAP,
                    workers: Some(workers),
                },
            )
            .map_err(|e| e.to_string())?;
            ensure!(
                again == reference,
                "instance {k}: {workers} workers changed the equilibrium set"
            );
        }
        let n = inst.spec.type_profiles().len();
        let mut profiles: Vec<StrategyProfile> = reference.iter().take(3).cloned().collect();
        profiles.extend((0..3).map(|_| random_profile(&mut rng, &inst.spec, &inst.mech)));
        for p in &profiles {
            for _ in 0..3 {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                if rng.gen_bool(0.5) {
                    order.reverse();
                }
                compare_with_oracle(&inst, p, Some(&order))
                    .map_err(|e| format!("instance {k}: {e}"))?;
                verdicts += 1;
            }
        }
        let action = as_action(&inst);
        if let Some(eq) = reference.first() {
            let scf = derive_scf(&inst.mech, eq, &inst.spec).map_err(|e| e.to_string())?;
            let a = check_revelation_action(
                &action.spec,
                &action.mech,
                &scf,
                DEFAULT_CAP,
                PreferenceModel::PrivacyLexicographic,
                None,
            )
            .map_err(|e| e.to_string())?;
            ensure!(
                a.verdict == RevelationVerdict::Fails,
                "instance {k}: action verdict {}",
                a.verdict
            );
            let m = revelation::check_revelation_message(&inst.spec, &inst.mech, &scf, DEFAULT_CAP)
                .map_err(|e| e.to_string())?;
            ensure!(
                m.verdict == RevelationVerdict::Holds,
                "instance {k}: message verdict {}",
                m.verdict
            );
            verdicts += 2;
        }
    }

    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("src");
    for entry in std::fs::read_dir(&src).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        for (n, line) in text.lines().enumerate() {
            let tokens = line.split(|c: char| !c.is_alphanumeric() && c != '_');
            for tok in tokens {
                let lower = tok.to_ascii_lowercase();
                ensure!(
                    !(tok == "f32" || tok == "f64" || lower.contains("epsilon")),
                    "{}:{}: floating point or tolerance token `{tok}`",
                    path.display(),
                    n + 1
                );
            }
        }
    }
    Ok(format!("{verdicts} verdicts identical across worker counts and summation orders; no float types in the sources"))
}

fn criterion_7() -> Outcome {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let run = |file: &str, workers: &str| -> Result<(String, Option<i32>), String> {
        let out = Command::new(env!("CARGO_BIN_EXE_revelation"))
            .args([
                "check-revelation",
                "--output",
                "structured",
                "--workers",
                workers,
            ])
            .arg(fixtures.join(file))
            .output()
            .map_err(|e| e.to_string())?;
        Ok((
            String::from_utf8(out.stdout).map_err(|e| e.to_string())?,
            out.status.code(),
        ))
    };
    for (file, expected) in [("g1.toml", "FAILS"), ("g1_messages.toml", "HOLDS")] {
        let (first, code) = run(file, "1")?;
        ensure!(code == Some(0), "{file}: exit code {code:?}");
        let json: serde_json::Value = serde_json::from_str(&first).map_err(|e| e.to_string())?;
        ensure!(
            json["verdict"] == expected,
            "{file}: verdict {}",
            json["verdict"]
        );
        for workers in ["1", "2", "8"] {
            let (again, _) = run(file, workers)?;
            ensure!(again == first, "{file}: report differs between runs");
        }
    }
    Ok("G1 action FAILS, G1 messages HOLDS, reports byte-identical across runs".into())
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let guard = |f: &dyn Fn() -> Outcome| -> Outcome {
        catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        })
    };
    let corpus = corpus();
    results.push((
        "1 message-format truthful revelation",
        guard(&|| criterion_1(&corpus)),
    ));
    let (c2, c3) = catch_unwind(AssertUnwindSafe(|| criterion_2_and_3(&corpus)))
        .unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into())));
    results.push(("2 action format under privacy preferences", c2));
    results.push(("3 action format under standard preferences", c3));
    results.push((
        "4 unilateral deception invariance",
        guard(&|| criterion_4(&corpus)),
    ));
    results.push(("5 oracle equivalence", guard(&criterion_5)));
    results.push(("6 exactness", guard(&criterion_6)));
    results.push(("7 golden fixtures", guard(&criterion_7)));

    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
