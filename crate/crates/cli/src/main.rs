//! `provlab`: command-line front end to the provability workbench.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use provability::harness::{generate_corpus, run_suite, CorpusParams, Suite, SuiteConfig};
use provability::kripke::{find_refutation, to_dot, Countermodel, FrameClass, KripkeModel};
use provability::modal_provers::{prove, Budget, Derivation, Logic, ProveResult};
use provability::prop_provers::{prove_prop, PropEvidence, PropLogic};
use provability::provability_semantics::{
    canonical_witness, expansions, interpret, is_expansion, translate_bhk, translate_k4_to_gl,
    witness_check, Flavor, TranslationT, Witness,
};
use provability::syntax::{parse_modal, parse_prop, parse_sequent, PropFormula, Sequent};
use provability::transform::{transfer_report, unwind};

#[derive(Parser)]
#[command(
    name = "provlab",
    version,
    about = "Provers, Kripke models and provability translations for K4, KD4, S4, GL, GLS and BPC, EBPC, FPL, IPC, MPC, CPC"
)]
struct Cli {
    /// Print structured JSON on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Also write a Graphviz rendering of the resulting model to this path.
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Proof-search expansion budget.
    #[arg(long, global = true)]
    budget_steps: Option<u64>,
    /// Node bound for countermodel enumeration.
    #[arg(long, global = true)]
    max_nodes: Option<usize>,
    /// Seed for corpus sampling and sampled suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a formula or sequent `A, B => C` in a modal or propositional logic.
    Prove {
        #[arg(long)]
        logic: String,
        sequent: String,
    },
    /// Search for a countermodel up to the node bound.
    Countermodel {
        #[arg(long)]
        logic: String,
        sequent: String,
    },
    /// Apply a translation: b, w, g (propositional input) or k4gl (needs --t).
    Translate {
        #[arg(long)]
        flavor: TranslateFlavor,
        formula: String,
        /// Numbers for the boxes, e.g. "1,2,1".
        #[arg(long)]
        t: Option<String>,
    },
    /// List expansions of a formula, or test one with --check.
    Expand {
        formula: String,
        #[arg(long, default_value_t = 2)]
        max_disjuncts: usize,
        #[arg(long, default_value_t = 64)]
        max_size: usize,
        #[arg(long)]
        limit: Option<usize>,
        /// Candidate expansion to test instead of listing.
        #[arg(long)]
        check: Option<String>,
    },
    /// Check a witness or build the canonical one.
    Witness {
        #[command(subcommand)]
        action: WitnessAction,
    },
    /// Render the interpretation of a formula under a witness.
    Render {
        formula: String,
        #[arg(long)]
        witness: String,
        /// Atom substitution, `p=phi`; repeatable.
        #[arg(long = "sigma", value_name = "ATOM=TEXT")]
        sigma: Vec<String>,
    },
    /// Unwind the reflexive clusters of a model for a formula and translation.
    Unwind {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        t: String,
        /// Also check the transfer property at every node.
        #[arg(long)]
        verify: bool,
    },
    /// Run a cross-validation suite; exits with status 1 on any disagreement.
    Crosscheck {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Number of sampled instances for l34.
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Print a corpus.
    Corpus {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
}

#[derive(Subcommand)]
enum WitnessAction {
    Check {
        formula: String,
        #[arg(long)]
        witness: String,
    },
    Canonical {
        formula: String,
        #[arg(long, default_value_t = 0)]
        start: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TranslateFlavor {
    B,
    W,
    G,
    K4gl,
}

#[derive(Args)]
struct CorpusArgs {
    /// Comma-separated atoms.
    #[arg(long)]
    atoms: Option<String>,
    #[arg(long)]
    max_connectives: Option<usize>,
    #[arg(long)]
    max_degree: Option<usize>,
    /// Sample size; 0 keeps the whole enumeration.
    #[arg(long)]
    sample: Option<usize>,
}

impl CorpusArgs {
    fn params(&self, base: CorpusParams, seed: Option<u64>) -> CorpusParams {
        let mut p = base;
        if let Some(a) = &self.atoms {
            p.atoms = a
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
        }
        if let Some(c) = self.max_connectives {
            p.max_connectives = c;
        }
        if let Some(d) = self.max_degree {
            p.max_degree = d;
        }
        if let Some(s) = self.sample {
            p.sample = (s > 0).then_some(s);
        }
        if let Some(s) = seed {
            p.seed = s;
        }
        p
    }
}

enum AnyLogic {
    Modal(Logic),
    Prop(PropLogic),
}

fn parse_logic(name: &str) -> Result<AnyLogic> {
    if let Ok(l) = name.parse::<Logic>() {
        return Ok(AnyLogic::Modal(l));
    }
    name.parse::<PropLogic>()
        .map(AnyLogic::Prop)
        .map_err(|_| anyhow!("unknown logic `{name}`; expected one of K4, KD4, S4, GL, GLS, BPC, EBPC, FPL, IPC, MPC, CPC"))
}

fn prop_sequent(text: &str) -> Result<(Vec<PropFormula>, PropFormula)> {
    let s = parse_sequent(text)?;
    if s.succedent.len() != 1 {
        bail!("a propositional sequent needs exactly one formula on the right");
    }
    let gamma = s
        .antecedent
        .into_iter()
        .map(PropFormula::new)
        .collect::<Result<Vec<_>, _>>()?;
    let a = PropFormula::new(s.succedent.into_iter().next().expect("one formula"))?;
    Ok((gamma, a))
}

/// Writes a line to stdout; a closed pipe (e.g. `| head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

struct Ctx {
    json: bool,
    dot: Option<PathBuf>,
    budget: Budget,
    seed: Option<u64>,
}

impl Ctx {
    fn emit(&self, value: &Value, text: impl FnOnce() -> String) {
        if self.json {
            say!(
                "{}",
                serde_json::to_string_pretty(value).expect("JSON values print")
            );
        } else {
            say!("{}", text());
        }
    }

    fn write_dot(&self, model: &KripkeModel, highlight: Option<usize>) -> Result<()> {
        if let Some(path) = &self.dot {
            fs::write(path, to_dot(model, highlight))
                .with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

fn render_derivation(d: &Derivation) -> String {
    fn go(d: &Derivation, depth: usize, out: &mut String) {
        out.push_str(&format!(
            "{}{}   [{}]\n",
            "  ".repeat(depth),
            d.sequent,
            d.rule.name()
        ));
        for p in &d.premises {
            go(p, depth + 1, out);
        }
    }
    let mut out = String::new();
    go(d, 0, &mut out);
    out.trim_end().to_string()
}

fn countermodel_text(cm: &Countermodel) -> String {
    let m = &cm.model;
    let mut lines = vec![format!("countermodel, refuted at {}:", m.name(cm.node))];
    for k in 0..m.len() {
        let succ: Vec<&str> = m.successors(k).iter().map(|&l| m.name(l)).collect();
        let atoms: Vec<&str> = m
            .valuation()
            .iter()
            .filter(|(_, set)| set.contains(&k))
            .map(|(a, _)| a.as_str())
            .collect();
        lines.push(format!(
            "  {} sees {{{}}}, forces {{{}}}",
            m.name(k),
            succ.join(", "),
            atoms.join(", ")
        ));
    }
    lines.join("\n")
}

fn cmd_prove(ctx: &Ctx, logic: &str, text: &str) -> Result<ExitCode> {
    match parse_logic(logic)? {
        AnyLogic::Modal(l) => {
            let s = parse_sequent(text)?;
            let r = prove(l, &s, &ctx.budget)?;
            let mut v = json!({
                "logic": l.to_string(),
                "sequent": s.to_string(),
                "verdict": if r.is_provable() { "provable" } else { "not_provable" },
            });
            if let Some(red) = r.reduced() {
                v["reduced"] = json!(red.to_string());
            }
            match &r {
                ProveResult::Provable { derivation, .. } => {
                    v["derivation"] = serde_json::to_value(derivation.to_json())?;
                    ctx.emit(&v, || {
                        format!("{l} proves {s}\n{}", render_derivation(derivation))
                    });
                }
                ProveResult::NotProvable { countermodel, .. } => {
                    v["countermodel"] = serde_json::to_value(countermodel)?;
                    ctx.write_dot(&countermodel.model, Some(countermodel.node))?;
                    ctx.emit(&v, || {
                        format!(
                            "{l} does not prove {s}\n{}",
                            countermodel_text(countermodel)
                        )
                    });
                }
            }
        }
        AnyLogic::Prop(l) => {
            let (gamma, a) = prop_sequent(text)?;
            let verdict = prove_prop(l, &gamma, &a, &ctx.budget)?;
            let v = serde_json::to_value(&verdict)?;
            let shown = Sequent::new(
                gamma.iter().map(|g| g.formula().clone()).collect(),
                vec![a.formula().clone()],
            );
            match &verdict.evidence {
                PropEvidence::Derivation(d) => ctx.emit(&v, || {
                    format!(
                        "{l} proves {shown}\nvia {} on {}\n{}",
                        verdict.modal_logic,
                        verdict.translated,
                        render_derivation(d)
                    )
                }),
                PropEvidence::Semantic(cm) | PropEvidence::Modal(cm) => {
                    ctx.write_dot(&cm.model, Some(cm.node))?;
                    ctx.emit(&v, || {
                        format!(
                            "{l} does not prove {shown}\nvia {} on {}\n{}",
                            verdict.modal_logic,
                            verdict.translated,
                            countermodel_text(cm)
                        )
                    })
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_countermodel(ctx: &Ctx, logic: &str, text: &str) -> Result<ExitCode> {
    let (class, ant, suc) = match parse_logic(logic)? {
        AnyLogic::Modal(l) => {
            let s = parse_sequent(text)?;
            let s = if l == Logic::GLS {
                Sequent::goal(provability::modal_provers::gls_reduce(&s.as_formula()))
            } else {
                s
            };
            (l.frame_class(), s.antecedent, s.succedent)
        }
        AnyLogic::Prop(l) => {
            let flavor = l
                .semantics()
                .ok_or_else(|| anyhow!("{l} has no direct Kripke semantics"))?;
            let (gamma, a) = prop_sequent(text)?;
            (
                FrameClass::IntFrame(flavor),
                gamma.into_iter().map(PropFormula::into_formula).collect(),
                vec![a.into_formula()],
            )
        }
    };
    let mut budget = ctx.budget.model_evals;
    let found = find_refutation(&ant, &suc, class, 1, ctx.budget.max_nodes, &mut budget)?;
    let v = json!({
        "class": class.to_string(),
        "max_nodes": ctx.budget.max_nodes,
        "found": found.is_some(),
        "countermodel": found,
    });
    if let Some(cm) = &found {
        ctx.write_dot(&cm.model, Some(cm.node))?;
    }
    ctx.emit(&v, || match &found {
        Some(cm) => countermodel_text(cm),
        None => format!(
            "no {class} countermodel with at most {} nodes",
            ctx.budget.max_nodes
        ),
    });
    Ok(ExitCode::SUCCESS)
}

fn cmd_translate(
    ctx: &Ctx,
    flavor: TranslateFlavor,
    text: &str,
    t: Option<&str>,
) -> Result<ExitCode> {
    let (name, out) = match flavor {
        TranslateFlavor::K4gl => {
            let f = parse_modal(text)?;
            let t: TranslationT = t.ok_or_else(|| anyhow!("k4gl needs --t"))?.parse()?;
            ("k4gl", translate_k4_to_gl(&f, &t)?)
        }
        other => {
            let fl = match other {
                TranslateFlavor::B => Flavor::B,
                TranslateFlavor::W => Flavor::W,
                _ => Flavor::G,
            };
            let p = parse_prop(text)?;
            (
                match fl {
                    Flavor::B => "b",
                    Flavor::W => "w",
                    Flavor::G => "g",
                },
                translate_bhk(&p, fl),
            )
        }
    };
    let v = json!({ "flavor": name, "input": text, "output": out.to_string() });
    ctx.emit(&v, || out.to_string());
    Ok(ExitCode::SUCCESS)
}

fn cmd_expand(
    ctx: &Ctx,
    text: &str,
    k: usize,
    size: usize,
    limit: Option<usize>,
    check: Option<&str>,
) -> Result<ExitCode> {
    let a = parse_modal(text)?;
    if let Some(b) = check {
        let b = parse_modal(b)?;
        let ok = is_expansion(&b, &a);
        ctx.emit(
            &json!({ "formula": a.to_string(), "candidate": b.to_string(), "is_expansion": ok }),
            || (if ok { "expansion" } else { "not an expansion" }).to_string(),
        );
        return Ok(if ok {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }
    if k == 0 {
        bail!("--max-disjuncts must be at least 1");
    }
    let all = expansions(&a, k, size);
    let shown: Vec<String> = all
        .iter()
        .take(limit.unwrap_or(usize::MAX))
        .map(|f| f.to_string())
        .collect();
    ctx.emit(
        &json!({ "formula": a.to_string(), "total": all.len(), "expansions": shown }),
        || shown.join("\n"),
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_witness(ctx: &Ctx, action: &WitnessAction) -> Result<ExitCode> {
    match action {
        WitnessAction::Check { formula, witness } => {
            let f = parse_modal(formula)?;
            let w: Witness = witness.parse()?;
            let ok = witness_check(&w, &f)?;
            ctx.emit(
                &json!({ "formula": f.to_string(), "witness": w.to_string(), "valid": ok }),
                || (if ok { "valid witness" } else { "not a witness" }).to_string(),
            );
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        WitnessAction::Canonical { formula, start } => {
            let f = parse_modal(formula)?;
            let w = canonical_witness(&f, *start);
            ctx.emit(
                &json!({ "formula": f.to_string(), "start": start, "witness": w.to_string() }),
                || w.to_string(),
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_render(ctx: &Ctx, text: &str, witness: &str, sigma: &[String]) -> Result<ExitCode> {
    let f = parse_modal(text)?;
    let w: Witness = witness.parse()?;
    let mut map = BTreeMap::new();
    for entry in sigma {
        let (atom, value) = entry
            .split_once('=')
            .ok_or_else(|| anyhow!("--sigma expects ATOM=TEXT, got `{entry}`"))?;
        map.insert(atom.trim().to_string(), value.trim().to_string());
    }
    let term = interpret(&f, &w, &map)?;
    ctx.emit(&json!({ "formula": f.to_string(), "witness": w.to_string(), "interpretation": term.to_string() }), || {
        term.to_string()
    });
    Ok(ExitCode::SUCCESS)
}

fn cmd_unwind(
    ctx: &Ctx,
    model: &PathBuf,
    formula: &str,
    t: &str,
    verify: bool,
) -> Result<ExitCode> {
    let text = fs::read_to_string(model).with_context(|| format!("reading {}", model.display()))?;
    let m = KripkeModel::from_json_str(&text)?;
    let f = parse_modal(formula)?;
    let t: TranslationT = t.parse()?;
    let u = unwind(&m, &f, &t)?;
    ctx.write_dot(&u.model, None)?;
    let mut v = json!({ "n": u.n, "model": u.model.to_json() });
    let mut code = ExitCode::SUCCESS;
    if verify {
        let nodes: Vec<usize> = (0..m.len()).collect();
        let report = transfer_report(&m, &f, &t, &nodes)?;
        if !report.ok() {
            code = ExitCode::from(1);
        }
        v["transfer"] = serde_json::to_value(&report)?;
    }
    ctx.emit(&v, || {
        serde_json::to_string_pretty(&v).expect("JSON values print")
    });
    Ok(code)
}

fn cmd_crosscheck(
    ctx: &Ctx,
    suite: &str,
    args: &CorpusArgs,
    instances: Option<usize>,
) -> Result<ExitCode> {
    let suite: Suite = suite.parse()?;
    let base = if matches!(suite, Suite::Translation(_)) {
        CorpusParams::box_free()
    } else {
        CorpusParams::default()
    };
    let corpus = generate_corpus(&args.params(base, ctx.seed));
    let mut config = SuiteConfig {
        budget: ctx.budget,
        ..SuiteConfig::default()
    };
    if let Some(seed) = ctx.seed {
        config.seed = seed;
    }
    if let Some(n) = instances {
        config.unwinding_instances = n;
    }
    let report = run_suite(suite, &corpus, &config);
    let s = &report.summary;
    eprintln!(
        "{suite}: {} items, {} agree, {} disagree, {} exhausted, {} evidence failures",
        s.items, s.agreements, s.disagreements, s.exhausted, s.evidence_failures
    );
    if ctx.json {
        say!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for r in report.failures() {
            say!(
                "{} {}: {}",
                r.index,
                r.formula,
                r.detail.as_deref().unwrap_or("")
            );
        }
    }
    Ok(if report.success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_corpus(ctx: &Ctx, args: &CorpusArgs) -> Result<ExitCode> {
    let corpus = generate_corpus(&args.params(CorpusParams::default(), ctx.seed));
    if ctx.json {
        let items: Vec<Value> = corpus
            .entries
            .iter()
            .map(|e| json!({ "index": e.index.to_string(), "formula": e.formula.to_string() }))
            .collect();
        say!(
            "{}",
            serde_json::to_string_pretty(&json!({ "params": corpus.params, "formulas": items }))?
        );
    } else {
        for e in &corpus.entries {
            say!("{}", e.formula);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut budget = Budget::default();
    if let Some(s) = cli.budget_steps {
        budget.steps = s;
    }
    if let Some(n) = cli.max_nodes {
        budget.max_nodes = n;
        budget.escalate_nodes = budget.escalate_nodes.max(n);
    }
    let ctx = Ctx {
        json: cli.json,
        dot: cli.dot,
        budget,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Prove { logic, sequent } => cmd_prove(&ctx, logic, sequent),
        Command::Countermodel { logic, sequent } => cmd_countermodel(&ctx, logic, sequent),
        Command::Translate { flavor, formula, t } => {
            cmd_translate(&ctx, *flavor, formula, t.as_deref())
        }
        Command::Expand {
            formula,
            max_disjuncts,
            max_size,
            limit,
            check,
        } => cmd_expand(
            &ctx,
            formula,
            *max_disjuncts,
            *max_size,
            *limit,
            check.as_deref(),
        ),
        Command::Witness { action } => cmd_witness(&ctx, action),
        Command::Render {
            formula,
            witness,
            sigma,
        } => cmd_render(&ctx, formula, witness, sigma),
        Command::Unwind {
            model,
            formula,
            t,
            verify,
        } => cmd_unwind(&ctx, model, formula, t, *verify),
        Command::Crosscheck {
            suite,
            corpus,
            instances,
        } => cmd_crosscheck(&ctx, suite, corpus, *instances),
        Command::Corpus { corpus } => cmd_corpus(&ctx, corpus),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
