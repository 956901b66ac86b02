//! `ionet` — liveness and structural liveness of immediate-observation nets.
//!
//! Exit codes: 0 when the question was decided, 2 on invalid input, 3 when
//! a budget was exceeded before a verdict.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use ionet_core::gen::{generate_seeded, ClassKind, GenParams};
use ionet_core::liveness::{
    check_witness, reach_graph, GraphLiveness, PathStep, Variant, Witness, WitnessError, WitnessOptions,
    WitnessSearch, DEFAULT_SUBSET_CAP,
};
use ionet_core::net::parse_marking;
use ionet_core::ordinarize::{embed_marking, ordinarize};
use ionet_core::reduce_lba::{
    build_stage, parse_word, reduction_correctness_check, LbaSpec, ReductionBudgets, ReductionError, Stage,
};
use ionet_core::slp::{
    decide_slp, is_nonlive, slp_01_shortcut, truncate, LivenessVerdict, NonLiveOptions, SlpError, SlpMethod,
    SlpOptions, DEFAULT_CANDIDATE_BUDGET, DEFAULT_CONFIG_BUDGET,
};
use ionet_core::{classify, parse_net, serialize_net, Marking, Net};

const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "ionet", version, about = "Liveness analysis for immediate-observation Petri nets")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// States explored per liveness decision.
    #[arg(long, global = true, env = "IONET_BUDGET", default_value_t = DEFAULT_CONFIG_BUDGET as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Candidate markings tested by the structural liveness search.
    #[arg(long, global = true, default_value_t = DEFAULT_CANDIDATE_BUDGET as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    candidates: u64,
    /// Largest number of places enumerated as crucial-set candidates.
    #[arg(long, global = true, default_value_t = DEFAULT_SUBSET_CAP as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    subset_cap: u64,
    /// Seed for random generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
}

impl RunConfig {
    fn liveness(&self) -> NonLiveOptions {
        NonLiveOptions {
            node_budget: self.budget as usize,
            subset_cap: self.subset_cap as usize,
            ..NonLiveOptions::default()
        }
    }

    fn slp(&self, method: SlpMethod) -> SlpOptions {
        SlpOptions {
            liveness: self.liveness(),
            candidate_budget: self.candidates as usize,
            method,
            ..SlpOptions::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Class flags, maximum weight and size of a net.
    Classify { file: PathBuf },
    /// Decide liveness of a marking.
    Live(MarkedArgs),
    /// Decide structural liveness, printing a live marking if one exists.
    Slp {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Only try {0,1}-markings (complete for ordinary IMO nets).
        #[arg(long)]
        zero_one: bool,
    },
    /// Search for a non-liveness witness at the marking itself.
    Witness(MarkedArgs),
    /// The truncated marking with the same liveness.
    Truncate(MarkedArgs),
    /// Print the ordinary version of a weighted net.
    Ordinarize { file: PathBuf },
    /// Print the net simulating a linear bounded automaton on a word.
    Lba {
        spec: PathBuf,
        word: String,
        #[arg(long, default_value = "closed", value_parser = parse_stage)]
        stage: Stage,
    },
    /// Compare acceptance, liveness and structural liveness on a word.
    CheckReduction { spec: PathBuf, word: String },
    /// Print a random net of a given class.
    Gen {
        #[arg(long, value_parser = parse_class)]
        class: ClassKind,
        #[arg(long, default_value_t = 4)]
        places: usize,
        #[arg(long = "trans", default_value_t = 4)]
        transitions: usize,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        wmax: u32,
    },
}

#[derive(Args, Debug)]
struct MarkedArgs {
    file: PathBuf,
    /// Comma-separated token counts; defaults to the marking in the file.
    #[arg(long)]
    marking: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum MethodArg {
    Auto,
    Capped,
    Exact,
}

impl From<MethodArg> for SlpMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => SlpMethod::Auto,
            MethodArg::Capped => SlpMethod::Capped,
            MethodArg::Exact => SlpMethod::Exact,
        }
    }
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    s.parse()
}

fn parse_class(s: &str) -> Result<ClassKind, String> {
    s.parse()
}

#[derive(Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum VerdictKind {
    Live,
    Nonlive,
    StructurallyLive,
    NotStructurallyLive,
    BudgetExceeded,
}

#[derive(Serialize, Debug, Default)]
struct Stats {
    configs_explored: usize,
    candidates_tested: usize,
    wall_ms: u64,
}

#[derive(Serialize, Debug)]
struct WitnessReport {
    m_wit: Marking,
    p_cruc: Vec<String>,
    t_dead: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<Vec<String>>,
}

impl WitnessReport {
    fn new(net: &Net, w: &Witness) -> Self {
        WitnessReport {
            m_wit: w.m_wit.clone(),
            p_cruc: w.p_cruc.iter().map(|&p| net.place_name(p).to_string()).collect(),
            t_dead: w.t_dead.iter().map(|&t| net.transition_name(t).to_string()).collect(),
            path: w.path.as_ref().map(|steps| {
                steps
                    .iter()
                    .map(|s| match *s {
                        PathStep::Fire(t) => net.transition_name(t).to_string(),
                        PathStep::Increment(p) => format!("+{}", net.place_name(p)),
                    })
                    .collect()
            }),
        }
    }
}

#[derive(Serialize, Debug)]
struct Verdict {
    verdict: VerdictKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Marking>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessReport>,
    stats: Stats,
}

impl Verdict {
    fn exit_code(&self) -> ExitCode {
        if self.verdict == VerdictKind::BudgetExceeded {
            ExitCode::from(EXIT_BUDGET)
        } else {
            ExitCode::SUCCESS
        }
    }

    fn print(&self, json: bool) -> Result<ExitCode> {
        if json {
            println!("{}", serde_json::to_string_pretty(self)?);
        } else {
            let label = serde_json::to_value(self.verdict)?;
            println!("verdict: {}", label.as_str().unwrap_or_default());
            if let Some(c) = &self.certificate {
                println!("certificate: {c}");
            }
            if let Some(w) = &self.witness {
                println!("witness marking: {}", w.m_wit);
                println!("crucial places: {}", w.p_cruc.join(" "));
                println!("dead transitions: {}", w.t_dead.join(" "));
                if let Some(path) = &w.path {
                    println!("path: {}", path.join(" "));
                }
            }
            println!(
                "explored {} configurations, {} candidates in {} ms",
                self.stats.configs_explored, self.stats.candidates_tested, self.stats.wall_ms
            );
        }
        Ok(self.exit_code())
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_net(path: &Path) -> Result<(Net, Option<Marking>)> {
    parse_net(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_marked(args: &MarkedArgs) -> Result<(Net, Marking)> {
    let (net, file_marking) = load_net(&args.file)?;
    let marking = match (&args.marking, file_marking) {
        (Some(text), _) => parse_marking(&net, text).context("--marking")?,
        (None, Some(m)) => m,
        (None, None) => bail!("{} has no marking; pass --marking", args.file.display()),
    };
    Ok((net, marking))
}

fn load_spec(path: &Path) -> Result<LbaSpec> {
    LbaSpec::parse(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn budget_verdict(explored: usize, candidates: usize, start: Instant) -> Verdict {
    Verdict {
        verdict: VerdictKind::BudgetExceeded,
        certificate: None,
        witness: None,
        stats: Stats {
            configs_explored: explored,
            candidates_tested: candidates,
            wall_ms: elapsed_ms(start),
        },
    }
}

fn cmd_classify(file: &Path, json: bool) -> Result<ExitCode> {
    let (net, _) = load_net(file)?;
    let class = classify(&net);
    if json {
        let report = json!({
            "class": class.label(),
            "ordinary": class.ordinary,
            "conservative": class.conservative,
            "bimo": class.bimo,
            "bio": class.bio,
            "imo": class.imo,
            "io": class.io,
            "max_weight": class.max_weight,
            "places": net.num_places(),
            "transitions": net.num_transitions(),
        });
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        let flags: Vec<&str> = [
            ("bimo", class.bimo),
            ("bio", class.bio),
            ("imo", class.imo),
            ("io", class.io),
            ("ordinary", class.ordinary),
            ("conservative", class.conservative),
        ]
        .iter()
        .filter(|(_, on)| *on)
        .map(|(name, _)| *name)
        .collect();
        println!("class: {}", class.label());
        println!("flags: {}", flags.join(" "));
        println!("max weight: {}", class.max_weight);
        println!("places: {}, transitions: {}", net.num_places(), net.num_transitions());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_live(args: &MarkedArgs, cfg: &RunConfig) -> Result<ExitCode> {
    let (net, m0) = load_marked(args)?;
    let start = Instant::now();
    let opts = cfg.liveness();
    // Conservative nets have finite reachability sets: decide exactly when
    // the set fits the budget, and only use the capped search for a witness.
    let mut exact = None;
    let mut explored = 0;
    if net.is_conservative() {
        if let Ok(graph) = reach_graph(&net, &m0, opts.node_budget) {
            explored = graph.len();
            exact = Some(GraphLiveness::new(&net, &graph).is_live(0));
        }
    }
    let capped = match exact {
        Some(true) => None,
        _ => Some(is_nonlive(&net, &m0, &opts)),
    };
    let verdict = match (exact, capped) {
        (Some(true), _) => Verdict {
            verdict: VerdictKind::Live,
            certificate: None,
            witness: None,
            stats: Stats {
                configs_explored: explored,
                ..Stats::default()
            },
        },
        (_, Some(Ok(out))) => {
            let witness = match &out.verdict {
                LivenessVerdict::NonLive(w) => Some(WitnessReport::new(&net, w)),
                LivenessVerdict::Live => None,
            };
            if let Some(exact) = exact {
                // The exact and the capped decisions must agree.
                if exact != witness.is_none() {
                    bail!("internal error: exact and capped liveness decisions disagree");
                }
            }
            Verdict {
                verdict: if witness.is_some() {
                    VerdictKind::Nonlive
                } else {
                    VerdictKind::Live
                },
                certificate: None,
                witness,
                stats: Stats {
                    configs_explored: explored.max(out.stats.configs_explored),
                    ..Stats::default()
                },
            }
        }
        (Some(false), _) => Verdict {
            verdict: VerdictKind::Nonlive,
            certificate: None,
            witness: None,
            stats: Stats {
                configs_explored: explored,
                ..Stats::default()
            },
        },
        (None, Some(Err(e))) => match budget_of(&e) {
            Some(n) => budget_verdict(n, 0, start),
            None => return Err(e.into()),
        },
        (None, None) => unreachable!("the capped decision runs without an exact verdict"),
    };
    let verdict = Verdict {
        stats: Stats {
            wall_ms: elapsed_ms(start),
            ..verdict.stats
        },
        ..verdict
    };
    verdict.print(cfg.json)
}

/// States explored when `e` is a budget overrun.
fn budget_of(e: &SlpError) -> Option<usize> {
    match e {
        SlpError::Budget(b) => Some(b.explored),
        SlpError::CandidateBudgetExceeded { .. } => Some(0),
        SlpError::Witness(WitnessError::SubsetCapExceeded { .. }) => Some(0),
        _ => None,
    }
}

fn cmd_slp(file: &Path, method: MethodArg, zero_one: bool, cfg: &RunConfig) -> Result<ExitCode> {
    let (net, _) = load_net(file)?;
    let start = Instant::now();
    let opts = cfg.slp(method.into());
    let result = if zero_one {
        slp_01_shortcut(&net, &opts)
    } else {
        decide_slp(&net, &opts)
    };
    let verdict = match result {
        Ok(out) => Verdict {
            verdict: if out.certificate.is_some() {
                VerdictKind::StructurallyLive
            } else {
                VerdictKind::NotStructurallyLive
            },
            certificate: out.certificate,
            witness: None,
            stats: Stats {
                configs_explored: out.configs_explored,
                candidates_tested: out.candidates_tested,
                wall_ms: elapsed_ms(start),
            },
        },
        Err(SlpError::CandidateBudgetExceeded { budget }) => budget_verdict(0, budget, start),
        Err(e) => match budget_of(&e) {
            Some(n) => budget_verdict(n, 0, start),
            None => return Err(e.into()),
        },
    };
    verdict.print(cfg.json)
}

fn cmd_witness(args: &MarkedArgs, cfg: &RunConfig) -> Result<ExitCode> {
    let (net, m) = load_marked(args)?;
    let search = WitnessSearch::new(
        &net,
        WitnessOptions {
            subset_cap: cfg.subset_cap as usize,
            ..WitnessOptions::default()
        },
    );
    let found = match search.search(&m) {
        Ok(found) => found,
        Err(WitnessError::SubsetCapExceeded { places, cap }) => {
            eprintln!("error: {places} candidate places exceed the subset cap {cap}");
            return Ok(ExitCode::from(EXIT_BUDGET));
        }
        Err(e) => return Err(e.into()),
    };
    let variant = if net.is_ordinary() {
        Variant::Ordinary
    } else {
        Variant::Weighted
    };
    let report = match &found {
        Some(w) => {
            let check = check_witness(&net, w, variant, cfg.budget as usize)?;
            json!({
                "found": true,
                "witness": WitnessReport::new(&net, w),
                "conditions": check,
            })
        }
        None => json!({ "found": false }),
    };
    if cfg.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else if let Some(w) = &found {
        let w = WitnessReport::new(&net, w);
        println!("witness at {}", w.m_wit);
        println!("crucial places: {}", w.p_cruc.join(" "));
        println!("dead transitions: {}", w.t_dead.join(" "));
        println!("conditions: {}", report["conditions"]);
    } else {
        println!("no witness at {m}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_truncate(args: &MarkedArgs, json: bool) -> Result<ExitCode> {
    let (net, m) = load_marked(args)?;
    let out = truncate(&net, &m);
    if json {
        println!("{}", serde_json::to_string_pretty(&json!({ "marking": out }))?);
    } else {
        println!("{out}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_ordinarize(file: &Path) -> Result<ExitCode> {
    let (net, marking) = load_net(file)?;
    let (ord, map) = ordinarize(&net)?;
    let marking = marking.map(|m| embed_marking(&map, &m)).transpose()?;
    print!("{}", serialize_net(&ord, marking.as_ref()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_lba(spec: &Path, word: &str, stage: Stage) -> Result<ExitCode> {
    let spec = load_spec(spec)?;
    let word = parse_word(word)?;
    let (net, m0) = build_stage(&spec, &word, stage)?;
    print!("{}", serialize_net(&net, Some(&m0)));
    Ok(ExitCode::SUCCESS)
}

fn cmd_check_reduction(spec: &Path, word: &str, cfg: &RunConfig) -> Result<ExitCode> {
    let spec = load_spec(spec)?;
    let word = parse_word(word)?;
    let budgets = ReductionBudgets {
        nodes: cfg.budget as usize,
        slp: cfg.slp(SlpMethod::Auto),
        ..ReductionBudgets::default()
    };
    let report = match reduction_correctness_check(&spec, &word, &budgets) {
        Ok(r) => r,
        Err(e @ (ReductionError::SimulationBudget(_) | ReductionError::Budget(_))) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_BUDGET));
        }
        Err(ReductionError::Slp(e)) if budget_of(&e).is_some() => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_BUDGET));
        }
        Err(e) => return Err(e.into()),
    };
    if cfg.json {
        let out = json!({
            "accepted": report.accepted,
            "live": report.live,
            "structurally_live": report.structurally_live,
            "agree": report.agree(),
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("accepted: {}", report.accepted);
        println!("live: {}", report.live);
        println!("structurally live: {}", report.structurally_live);
        println!("agree: {}", report.agree());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(class: ClassKind, places: usize, transitions: usize, wmax: u32, seed: u64) -> Result<ExitCode> {
    if places == 0 && transitions > 0 {
        bail!("transitions need at least one place");
    }
    let net = generate_seeded(&GenParams::new(class, places, transitions, wmax), seed);
    print!("{}", serialize_net(&net, None));
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Classify { file } => cmd_classify(file, cfg.json),
        Command::Live(args) => cmd_live(args, cfg),
        Command::Slp {
            file,
            method,
            zero_one,
        } => cmd_slp(file, *method, *zero_one, cfg),
        Command::Witness(args) => cmd_witness(args, cfg),
        Command::Truncate(args) => cmd_truncate(args, cfg.json),
        Command::Ordinarize { file } => cmd_ordinarize(file),
        Command::Lba { spec, word, stage } => cmd_lba(spec, word, *stage),
        Command::CheckReduction { spec, word } => cmd_check_reduction(spec, word, cfg),
        Command::Gen {
            class,
            places,
            transitions,
            wmax,
        } => cmd_gen(*class, *places, *transitions, *wmax, cfg.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
