//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use provability::harness::{
    generate_corpus, run_suite, CorpusParams, CrosscheckReport, Suite, SuiteConfig,
};
use provability::modal_provers::{prove, Budget, Logic};
use provability::prop_provers::{prove_prop, PropLogic};
use provability::provability_semantics::{
    canonical_witness, expansions, interpret, is_expansion, translate_bhk, translate_k4_to_gl,
    witness_check, Flavor, TranslationT, Witness,
};
use provability::syntax::{parse_modal, parse_prop, Formula};

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const MAX_EXHAUSTED_FRACTION: f64 = 0.01;
const ORACLE_NODES: usize = 6;
const SEMANTIC_NODES: usize = 5;
const T_MAX: u64 = 3;
const RELATIVIZATION_DEGREE: usize = 2;
const MIN_UNWINDING_INSTANCES: usize = 200;
const UNWINDING_LIMIT: Duration = Duration::from_secs(120);
const EXPANSION_PAIRS: usize = 100;
const RANDOM_SEQUENCES: usize = 1000;

type Outcome = Result<String, String>;

fn f(s: &str) -> Formula {
    parse_modal(s).expect("fixture parses")
}

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn config() -> SuiteConfig {
    SuiteConfig {
        oracle_nodes: ORACLE_NODES,
        semantic_nodes: SEMANTIC_NODES,
        t_max: T_MAX,
        relativization_max_degree: RELATIVIZATION_DEGREE,
        unwinding_instances: MIN_UNWINDING_INSTANCES,
        ..SuiteConfig::default()
    }
}

fn first_failure(report: &CrosscheckReport) -> String {
    report
        .failures()
        .next()
        .map(|r| {
            format!(
                "; first: {} ({})",
                r.formula,
                r.detail.as_deref().unwrap_or("")
            )
        })
        .unwrap_or_default()
}

fn golden() -> Outcome {
    let start = Instant::now();
    // Expansion pair.
    let a = f("[]~[][]p");
    let b = f("[](~[]([]p \\/ []p) \\/ ~[][](p \\/ p))");
    ensure(is_expansion(&b, &a), "expansion pair rejected")?;
    ensure(!is_expansion(&a, &b), "reverse expansion accepted")?;
    // Witness condition.
    let w = f("[](p -> q) \\/ [](~[]p -> []q)");
    let wit = |s: &str| witness_check(&s.parse::<Witness>().unwrap(), &w).unwrap();
    ensure(wit("5,3,1,2"), "(5,3,1,2) rejected")?;
    for bad in ["5,1,3,2", "5,2,1,2", "5,3,3,2", "5,2,2,3"] {
        ensure(!wit(bad), format!("({bad}) accepted"))?;
    }
    // Rendering.
    let term =
        interpret(&w, &"5,3,1,2".parse().unwrap(), &BTreeMap::new()).map_err(|e| e.to_string())?;
    let expected = "Pr_5(sigma(p) -> sigma(q)) \\/ Pr_3(~Pr_1(sigma(p)) -> Pr_2(sigma(q)))";
    ensure(term.to_string() == expected, format!("rendering `{term}`"))?;
    // Relativizing translation.
    let t = translate_k4_to_gl(&f("[]p -> [][]p"), &TranslationT(vec![1, 2, 1]))
        .map_err(|e| e.to_string())?;
    ensure(
        t == f("[](q0 /\\ q1 -> p) -> [](q0 /\\ q1 /\\ q2 -> [](q0 /\\ q1 -> p))"),
        format!("t-translation `{t}`"),
    )?;
    // Clauses of b, w and g.
    let clauses: [(&str, Flavor, &str); 18] = [
        ("p", Flavor::B, "[]p"),
        ("bot", Flavor::B, "[]bot"),
        ("p /\\ q", Flavor::B, "[]p /\\ []q"),
        ("p \\/ q", Flavor::B, "[]p \\/ []q"),
        ("p -> q", Flavor::B, "[]([]p -> []q)"),
        ("~p", Flavor::B, "[]([]p -> []bot)"),
        ("p", Flavor::W, "[]p"),
        ("bot", Flavor::W, "[]qw"),
        ("p /\\ q", Flavor::W, "[]p /\\ []q"),
        ("p \\/ q", Flavor::W, "[]p \\/ []q"),
        ("p -> q", Flavor::W, "[]([]p -> []q)"),
        ("~p", Flavor::W, "[]([]p -> []qw)"),
        ("p", Flavor::G, "[]p"),
        ("bot", Flavor::G, "bot"),
        ("p /\\ q", Flavor::G, "[]p /\\ []q"),
        ("p \\/ q", Flavor::G, "[]p \\/ []q"),
        ("p -> q", Flavor::G, "[]([]p -> []q)"),
        ("~p", Flavor::G, "[]~[]p"),
    ];
    for (src, flavor, want) in clauses {
        let got = translate_bhk(&parse_prop(src).unwrap(), flavor);
        ensure(got == f(want), format!("{flavor} of {src}: `{got}`"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < GOLDEN_LIMIT, format!("took {elapsed:?}"))?;
    Ok(format!("all golden outputs match in {elapsed:?}"))
}

/// Runs the four oracle suites once; criteria 2 and 3 read the same reports.
fn oracle_reports() -> Vec<(Logic, CrosscheckReport, Duration)> {
    let corpus = generate_corpus(&CorpusParams::default());
    [Logic::K4, Logic::KD4, Logic::S4, Logic::GL]
        .into_iter()
        .map(|logic| {
            let start = Instant::now();
            let report = run_suite(Suite::Oracle(logic), &corpus, &config());
            (logic, report, start.elapsed())
        })
        .collect()
}

fn evidence_soundness(reports: &[(Logic, CrosscheckReport, Duration)]) -> Outcome {
    let mut parts = Vec::new();
    for (logic, report, _) in reports {
        let s = &report.summary;
        ensure(
            s.items == 2000,
            format!("{logic}: corpus has {} items", s.items),
        )?;
        ensure(
            s.evidence_failures == 0,
            format!(
                "{logic}: {} evidence failures{}",
                s.evidence_failures,
                first_failure(report)
            ),
        )?;
        let limit = (s.items as f64 * MAX_EXHAUSTED_FRACTION).floor() as usize;
        ensure(
            s.exhausted <= limit,
            format!("{logic}: {} exhausted > {limit}", s.exhausted),
        )?;
        parts.push(format!(
            "{logic} {}/{} checked, {} exhausted",
            s.items - s.exhausted,
            s.items,
            s.exhausted
        ));
    }
    Ok(parts.join("; "))
}

fn oracle_agreement(reports: &[(Logic, CrosscheckReport, Duration)]) -> Outcome {
    let mut parts = Vec::new();
    for (logic, report, elapsed) in reports {
        let s = &report.summary;
        ensure(
            s.disagreements == 0,
            format!(
                "{logic}: {} provable yet refuted{}",
                s.disagreements,
                first_failure(report)
            ),
        )?;
        ensure(
            report.max_nodes > 0 && report.config.oracle_nodes == ORACLE_NODES,
            "oracle bound not pinned",
        )?;
        parts.push(format!(
            "{logic} 0 conflicts in {:.1}s",
            elapsed.as_secs_f64()
        ));
    }
    Ok(parts.join("; "))
}

fn translation_suites() -> Outcome {
    let corpus = generate_corpus(&CorpusParams::box_free());
    let mut parts = Vec::new();
    for logic in [
        PropLogic::Bpc,
        PropLogic::Ebpc,
        PropLogic::Ipc,
        PropLogic::Fpl,
        PropLogic::Mpc,
        PropLogic::Cpc,
    ] {
        let report = run_suite(Suite::Translation(logic), &corpus, &config());
        let s = &report.summary;
        ensure(
            s.items == corpus.len(),
            format!("{logic}: only {} of {} items", s.items, corpus.len()),
        )?;
        ensure(
            s.disagreements == 0 && s.evidence_failures == 0 && s.exhausted == 0,
            format!(
                "{logic}: {} disagreements, {} evidence failures, {} exhausted{}",
                s.disagreements,
                s.evidence_failures,
                s.exhausted,
                first_failure(&report)
            ),
        )?;
        parts.push(format!("{logic} {}/{}", s.agreements, s.items));
    }
    Ok(parts.join(", "))
}

fn relativization_suite() -> Outcome {
    let corpus = generate_corpus(&CorpusParams::default());
    let report = run_suite(Suite::Relativization, &corpus, &config());
    let s = &report.summary;
    let eligible = corpus
        .formulas()
        .filter(|a| a.modal_degree() <= RELATIVIZATION_DEGREE)
        .count();
    ensure(
        s.items == eligible,
        format!("{} of {eligible} formulas ran", s.items),
    )?;
    ensure(
        s.disagreements == 0 && s.evidence_failures == 0 && s.exhausted == 0,
        format!(
            "{} violations, {} evidence failures, {} exhausted{}",
            s.disagreements,
            s.evidence_failures,
            s.exhausted,
            first_failure(&report)
        ),
    )?;
    Ok(format!(
        "{} formulas, {} translations, 0 violations",
        s.items, s.checks
    ))
}

fn unwinding_suite() -> Outcome {
    let corpus = generate_corpus(&CorpusParams::default());
    let start = Instant::now();
    let report = run_suite(Suite::Unwinding, &corpus, &config());
    let elapsed = start.elapsed();
    let s = &report.summary;
    ensure(
        s.items >= MIN_UNWINDING_INSTANCES,
        format!("only {} instances", s.items),
    )?;
    ensure(
        s.agreements == s.items,
        format!(
            "{} failures, {} errors{}",
            s.disagreements,
            s.evidence_failures + s.exhausted,
            first_failure(&report)
        ),
    )?;
    ensure(elapsed < UNWINDING_LIMIT, format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} instances, {} transfer checks in {elapsed:.2?}",
        s.items, s.checks
    ))
}

fn known_theorems() -> Outcome {
    let budget = Budget::default();
    let modal: [(Logic, &str, bool); 7] = [
        (Logic::K4, "[]p -> [][]p", true),
        (Logic::KD4, "~[]bot", true),
        (Logic::S4, "[]p -> p", true),
        (Logic::S4, "~[](~[]p /\\ p)", true),
        (Logic::GL, "[]([]p -> p) -> []p", true),
        (Logic::GLS, "[]p -> p", true),
        (Logic::GL, "[]p -> p", false),
    ];
    for (logic, text, want) in modal {
        let got = prove(logic, &provability::syntax::Sequent::goal(f(text)), &budget)
            .map_err(|e| format!("{logic} {text}: {e}"))?
            .is_provable();
        ensure(got == want, format!("{logic} on {text}: got {got}"))?;
    }
    let prop: [(PropLogic, &str, bool); 6] = [
        (PropLogic::Ipc, "bot -> p", true),
        (PropLogic::Mpc, "bot -> p", false),
        (PropLogic::Ipc, "p \\/ ~p", false),
        (PropLogic::Cpc, "p \\/ ~p", true),
        (PropLogic::Bpc, "p /\\ (p -> q) -> q", false),
        (PropLogic::Ipc, "p /\\ (p -> q) -> q", true),
    ];
    for (logic, text, want) in prop {
        let got = prove_prop(logic, &[], &parse_prop(text).unwrap(), &budget)
            .map_err(|e| format!("{logic} {text}: {e}"))?
            .provable;
        ensure(got == want, format!("{logic} on {text}: got {got}"))?;
    }
    let mut parts = vec!["13 panel verdicts".to_string()];
    for params in [CorpusParams::default(), CorpusParams::box_free()] {
        let corpus = generate_corpus(&params);
        let report = run_suite(Suite::Lattice, &corpus, &config());
        let s = &report.summary;
        ensure(
            s.disagreements == 0 && s.evidence_failures == 0 && s.exhausted == 0,
            format!(
                "lattice: {} violations, {} exhausted{}",
                s.disagreements,
                s.exhausted,
                first_failure(&report)
            ),
        )?;
        parts.push(format!(
            "lattice {} inclusion checks on {} formulas",
            s.checks, s.items
        ));
    }
    Ok(parts.join(", "))
}

fn semantic_invariants() -> Outcome {
    let corpus = generate_corpus(&CorpusParams::default());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for a in corpus.formulas() {
        for start in [0, 1, 5] {
            let w = canonical_witness(a, start);
            ensure(
                witness_check(&w, a) == Ok(true),
                format!("canonical witness {w} rejected for {a}"),
            )?;
        }
    }
    // Expansion pairs are K4-equivalent.
    let boxed: Vec<&Formula> = corpus.formulas().filter(|a| a.box_count() > 0).collect();
    let budget = Budget::default();
    let mut pairs = 0;
    let mut attempts = 0;
    while pairs < EXPANSION_PAIRS {
        attempts += 1;
        ensure(
            attempts < 100 * EXPANSION_PAIRS,
            "too few formulas with proper expansions",
        )?;
        let a = *boxed.choose(&mut rng).expect("corpus has boxed formulas");
        let all = expansions(a, 2, a.size() + 8);
        let Some(b) = all
            .iter()
            .filter(|b| *b != a)
            .collect::<Vec<_>>()
            .choose(&mut rng)
            .copied()
        else {
            continue;
        };
        ensure(
            is_expansion(b, a),
            format!("{b} listed but not an expansion of {a}"),
        )?;
        let goal = provability::syntax::Sequent::goal(Formula::iff(b.clone(), a.clone()));
        let ok = prove(Logic::K4, &goal, &budget).map_err(|e| format!("{b} <-> {a}: {e}"))?;
        ensure(ok.is_provable(), format!("K4 does not prove {b} <-> {a}"))?;
        pairs += 1;
    }
    // Witness and translation validators coincide.
    let mut valid = 0;
    for _ in 0..RANDOM_SEQUENCES {
        let a = *boxed.choose(&mut rng).unwrap();
        let mut len = a.box_count();
        if rng.gen_ratio(1, 20) {
            len += 1;
        }
        let seq: Vec<u64> = (0..len).map(|_| rng.gen_range(0..4)).collect();
        let as_witness = witness_check(&Witness(seq.clone()), a);
        let as_translation = translate_k4_to_gl(a, &TranslationT(seq.clone()));
        let agree = match (&as_witness, &as_translation) {
            (Ok(true), Ok(_)) => {
                valid += 1;
                true
            }
            (Ok(false), Err(_)) | (Err(_), Err(_)) => true,
            _ => false,
        };
        ensure(agree, format!("validators differ on {a} with {seq:?}"))?;
    }
    Ok(format!(
        "{} canonical witnesses, {EXPANSION_PAIRS} expansion pairs, {RANDOM_SEQUENCES} sequences ({valid} valid)",
        3 * corpus.len()
    ))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, outcome: Outcome| match outcome {
        Ok(msg) => println!("criterion {n} PASS {name}: {msg}"),
        Err(msg) => {
            failed += 1;
            println!("criterion {n} FAIL {name}: {msg}");
        }
    };
    report(1, "golden examples", golden());
    let oracles = oracle_reports();
    report(2, "evidence soundness", evidence_soundness(&oracles));
    report(3, "oracle agreement", oracle_agreement(&oracles));
    report(4, "translation suites", translation_suites());
    report(5, "relativization", relativization_suite());
    report(6, "unwinding", unwinding_suite());
    report(7, "known theorems and lattice", known_theorems());
    report(8, "semantic invariants", semantic_invariants());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
