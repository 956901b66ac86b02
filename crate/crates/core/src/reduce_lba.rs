//! Nets simulating a deterministic linear bounded automaton on a fixed word.
//!
//! Four stages are built, each from the previous one:
//!
//! * [`Stage::Base`] — one place per (state, head position) and per
//!   (cell, symbol), one transition per instruction and head position;
//! * [`Stage::Split`] — every instruction transition split into three
//!   ordinary IO transitions through an intermediate place;
//! * [`Stage::Free`] — a `p_run`/`p_free` pair: once the accepting state is
//!   reached at cell 1 the run token may move to `p_free`, which lets any
//!   configuration be installed freely;
//! * [`Stage::Closed`] — the way back from `p_free` to `p_run` is replaced by
//!   a chain that re-installs the initial configuration, with abort
//!   transitions along it.
//!
//! The automaton accepts the word iff the initial marking of the closed stage
//! is live, iff the closed stage is structurally live.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::liveness::is_live_exact;
use crate::net::{Marking, Net, NetError};
use crate::slp::{decide_slp, SlpError, SlpOptions};
use crate::BudgetExceeded;

/// Tape symbols; the alphabet is fixed to two letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Symbol {
    A,
    B,
}

impl Symbol {
    pub const ALL: [Symbol; 2] = [Symbol::A, Symbol::B];

    fn parse(s: &str) -> Option<Symbol> {
        match s {
            "a" => Some(Symbol::A),
            "b" => Some(Symbol::B),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::A => "a",
            Symbol::B => "b",
        })
    }
}

/// Parses a nonempty word over `{a, b}`.
pub fn parse_word(s: &str) -> Result<Vec<Symbol>, LbaError> {
    let word: Option<Vec<Symbol>> = s
        .trim()
        .chars()
        .map(|c| Symbol::parse(&c.to_string()))
        .collect();
    match word {
        Some(w) if !w.is_empty() => Ok(w),
        _ => Err(LbaError::BadWord(s.to_string())),
    }
}

/// Head movement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Move {
    Left,
    Right,
}

impl Move {
    fn offset(self) -> isize {
        match self {
            Move::Left => -1,
            Move::Right => 1,
        }
    }
}

/// An instruction: in `state` reading `read`, go to `next`, write `write`, move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub state: String,
    pub read: Symbol,
    pub next: String,
    pub write: Symbol,
    pub movement: Move,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LbaSpec {
    pub states: Vec<String>,
    pub init: String,
    pub accept: String,
    pub reject: String,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LbaError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("two rules for state `{state}` reading `{read}`")]
    NonDeterministic { state: String, read: Symbol },
    #[error("rule from halting state `{0}`")]
    RuleFromHaltingState(String),
    #[error("rule re-enters the initial state `{0}`")]
    ReturnsToInitial(String),
    #[error("accepting and rejecting states coincide")]
    HaltingStatesCoincide,
    #[error("invalid word `{0}`: expected a nonempty word over a, b")]
    BadWord(String),
    #[error("{0}")]
    ConventionViolated(String),
    #[error("no rule for state `{state}` reading `{read}`")]
    Stuck { state: String, read: Symbol },
}

impl LbaSpec {
    /// Parses the line format: `states ...`, `init q`, `accept q`,
    /// `reject q`, `rule q x q' x' L|R`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<LbaSpec, LbaError> {
        let mut states = None;
        let (mut init, mut accept, mut reject) = (None, None, None);
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            let err = |message: &str| LbaError::Syntax {
                line,
                message: message.to_string(),
            };
            let single = |slot: &mut Option<String>, what: &str| -> Result<(), LbaError> {
                if words.len() != 2 {
                    return Err(err(&format!("`{what}` takes one state")));
                }
                if slot.is_some() {
                    return Err(err(&format!("duplicate `{what}`")));
                }
                *slot = Some(words[1].to_string());
                Ok(())
            };
            match words[0] {
                "states" => {
                    if states.is_some() {
                        return Err(err("duplicate `states`"));
                    }
                    if words.len() < 2 {
                        return Err(err("`states` needs at least one state"));
                    }
                    let list: Vec<String> = words[1..].iter().map(|s| s.to_string()).collect();
                    for s in &list {
                        if !s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                            return Err(err(&format!("invalid state name `{s}`")));
                        }
                    }
                    let mut sorted = list.clone();
                    sorted.sort();
                    sorted.dedup();
                    if sorted.len() != list.len() {
                        return Err(err("repeated state"));
                    }
                    states = Some(list);
                }
                "init" => single(&mut init, "init")?,
                "accept" => single(&mut accept, "accept")?,
                "reject" => single(&mut reject, "reject")?,
                "rule" => {
                    if words.len() != 6 {
                        return Err(err("expected `rule q x q' x' L|R`"));
                    }
                    let sym = |s: &str| Symbol::parse(s).ok_or_else(|| err(&format!("invalid symbol `{s}`")));
                    let movement = match words[5] {
                        "L" => Move::Left,
                        "R" => Move::Right,
                        other => return Err(err(&format!("invalid move `{other}`"))),
                    };
                    rules.push(Rule {
                        state: words[1].to_string(),
                        read: sym(words[2])?,
                        next: words[3].to_string(),
                        write: sym(words[4])?,
                        movement,
                    });
                }
                other => return Err(err(&format!("unknown directive `{other}`"))),
            }
        }
        let missing = |what: &str| LbaError::Syntax {
            line: 0,
            message: format!("missing `{what}`"),
        };
        let spec = LbaSpec {
            states: states.ok_or_else(|| missing("states"))?,
            init: init.ok_or_else(|| missing("init"))?,
            accept: accept.ok_or_else(|| missing("accept"))?,
            reject: reject.ok_or_else(|| missing("reject"))?,
            rules,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the static invariants.
    pub fn validate(&self) -> Result<(), LbaError> {
        let known = |s: &String| {
            if self.states.contains(s) {
                Ok(())
            } else {
                Err(LbaError::UnknownState(s.clone()))
            }
        };
        known(&self.init)?;
        known(&self.accept)?;
        known(&self.reject)?;
        if self.accept == self.reject {
            return Err(LbaError::HaltingStatesCoincide);
        }
        let mut seen = HashMap::new();
        for r in &self.rules {
            known(&r.state)?;
            known(&r.next)?;
            if r.state == self.accept || r.state == self.reject {
                return Err(LbaError::RuleFromHaltingState(r.state.clone()));
            }
            if r.next == self.init {
                return Err(LbaError::ReturnsToInitial(r.next.clone()));
            }
            if seen.insert((r.state.clone(), r.read), ()).is_some() {
                return Err(LbaError::NonDeterministic {
                    state: r.state.clone(),
                    read: r.read,
                });
            }
        }
        Ok(())
    }

    fn rule_for(&self, state: &str, read: Symbol) -> Option<&Rule> {
        self.rules.iter().find(|r| r.state == state && r.read == read)
    }
}

impl FromStr for LbaSpec {
    type Err = LbaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LbaSpec::parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LbaOutcome {
    Accept,
    Reject,
    BudgetExceeded,
}

/// Runs the automaton on `word` for at most `step_budget` steps.
pub fn simulate_lba(spec: &LbaSpec, word: &[Symbol], step_budget: usize) -> Result<LbaOutcome, LbaError> {
    spec.validate()?;
    if word.is_empty() {
        return Err(LbaError::BadWord(String::new()));
    }
    let mut tape = word.to_vec();
    let mut state = spec.init.as_str();
    let mut head = 0usize;
    for _ in 0..=step_budget {
        if state == spec.accept || state == spec.reject {
            if head != 0 {
                return Err(LbaError::ConventionViolated(format!(
                    "halted in `{state}` at cell {} instead of cell 1",
                    head + 1
                )));
            }
            return Ok(if state == spec.accept {
                LbaOutcome::Accept
            } else {
                LbaOutcome::Reject
            });
        }
        let rule = spec.rule_for(state, tape[head]).ok_or_else(|| LbaError::Stuck {
            state: state.to_string(),
            read: tape[head],
        })?;
        let target = head as isize + rule.movement.offset();
        if target < 0 || target >= tape.len() as isize {
            return Err(LbaError::ConventionViolated(format!(
                "head leaves the tape at cell {}",
                head + 1
            )));
        }
        tape[head] = rule.write;
        head = target as usize;
        state = rule.next.as_str();
    }
    Ok(LbaOutcome::BudgetExceeded)
}

/// Construction stages, each extending the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Instruction transitions on state-position and cell places.
    Base,
    /// Instructions split into ordinary IO transitions.
    Split,
    /// Run/free places with free reshuffling of configurations.
    Free,
    /// Free stage with the initial configuration hard-wired.
    Closed,
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" | "n" => Ok(Stage::Base),
            "split" | "nprime" => Ok(Stage::Split),
            "free" | "ndprime" => Ok(Stage::Free),
            "closed" | "nbar" => Ok(Stage::Closed),
            other => Err(format!("unknown stage `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Keep the cell-rewriting transition of split instructions even when
    /// the written symbol equals the read one.
    pub force_move: bool,
}

/// Accumulates places and transitions by name.
struct Builder {
    places: Vec<String>,
    index: HashMap<String, usize>,
    transitions: Vec<(String, Vec<(String, u32)>, Vec<(String, u32)>)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            places: Vec::new(),
            index: HashMap::new(),
            transitions: Vec::new(),
        }
    }

    fn place(&mut self, name: String) {
        self.index.insert(name.clone(), self.places.len());
        self.places.push(name);
    }

    fn trans(&mut self, name: String, pre: &[&str], post: &[&str]) {
        let arcs = |xs: &[&str]| xs.iter().map(|p| (p.to_string(), 1)).collect();
        self.transitions.push((name, arcs(pre), arcs(post)));
    }

    /// An IO transition: source, optional observed place, destination.
    fn io(&mut self, name: String, source: &str, observed: Option<&str>, dest: &str) {
        match observed {
            Some(o) => self.trans(name, &[source, o], &[dest, o]),
            None => self.trans(name, &[source], &[dest]),
        }
    }
}

fn state_place(q: &str, i: usize) -> String {
    format!("p_{q}_{i}")
}

fn cell_place(i: usize, x: Symbol) -> String {
    format!("p_{i}_{x}")
}

/// Builds the requested stage for `spec` on `word`, with its initial marking.
pub fn build_stage(spec: &LbaSpec, word: &[Symbol], stage: Stage) -> Result<(Net, Marking), LbaError> {
    build_stage_with(spec, word, stage, BuildOptions::default())
}

pub fn build_stage_with(
    spec: &LbaSpec,
    word: &[Symbol],
    stage: Stage,
    opts: BuildOptions,
) -> Result<(Net, Marking), LbaError> {
    spec.validate()?;
    if word.is_empty() {
        return Err(LbaError::BadWord(String::new()));
    }
    let n = word.len();
    let mut b = Builder::new();
    for q in &spec.states {
        for i in 1..=n {
            b.place(state_place(q, i));
        }
    }
    for i in 1..=n {
        for x in Symbol::ALL {
            b.place(cell_place(i, x));
        }
    }

    // Instruction transitions, for head positions whose move stays on the tape.
    for (k, r) in spec.rules.iter().enumerate() {
        let k = k + 1;
        for i in 1..=n {
            let j = i as isize + r.movement.offset();
            if j < 1 || j > n as isize {
                continue;
            }
            let (from, to) = (state_place(&r.state, i), state_place(&r.next, j as usize));
            let (read, write) = (cell_place(i, r.read), cell_place(i, r.write));
            let name = format!("t_ins{k}_{i}");
            if stage == Stage::Base {
                b.trans(name, &[&from, &read], &[&to, &write]);
                continue;
            }
            let mid = format!("p_ins{k}_{i}");
            b.place(mid.clone());
            b.io(format!("{name}_begin"), &from, Some(&read), &mid);
            if r.read != r.write || opts.force_move {
                b.io(format!("{name}_move"), &read, Some(&mid), &write);
            }
            b.io(format!("{name}_end"), &mid, Some(&write), &to);
        }
    }

    if stage >= Stage::Free {
        let acc = state_place(&spec.accept, 1);
        b.place("p_run".into());
        b.place("p_free".into());
        b.io("t_acc".into(), "p_run", Some(&acc), "p_free");
        if stage == Stage::Free {
            b.io("t_acc_back".into(), "p_free", Some(&acc), "p_run");
        }
        let heads: Vec<(String, usize)> = spec
            .states
            .iter()
            .flat_map(|q| (1..=n).map(move |i| (q.clone(), i)))
            .collect();
        for (q, i) in &heads {
            for (q2, i2) in &heads {
                if (q, i) != (q2, i2) {
                    b.io(
                        format!("t_{q}_{i}_{q2}_{i2}"),
                        &state_place(q, *i),
                        Some("p_free"),
                        &state_place(q2, *i2),
                    );
                }
            }
        }
        for i in 1..=n {
            for x in Symbol::ALL {
                for y in Symbol::ALL {
                    if x != y {
                        b.io(
                            format!("t_{i}_{x}_{i}_{y}"),
                            &cell_place(i, x),
                            Some("p_free"),
                            &cell_place(i, y),
                        );
                    }
                }
            }
        }
    }

    if stage == Stage::Closed {
        for i in 1..=n {
            b.place(format!("p_init_{i}"));
        }
        for i in 1..=n {
            let from = if i == 1 {
                "p_free".to_string()
            } else {
                format!("p_init_{}", i - 1)
            };
            b.io(
                format!("t_init_{i}"),
                &from,
                Some(&cell_place(i, word[i - 1])),
                &format!("p_init_{i}"),
            );
        }
        for i in 1..=n {
            b.io(format!("t_rev_{i}"), &format!("p_init_{i}"), None, "p_free");
        }
        b.io(
            "t_run".into(),
            &format!("p_init_{n}"),
            Some(&state_place(&spec.init, 1)),
            "p_run",
        );
    }

    let mut m0 = Marking::zero(b.places.len());
    m0[b.index[&state_place(&spec.init, 1)]] = 1;
    for (i, &x) in word.iter().enumerate() {
        m0[b.index[&cell_place(i + 1, x)]] = 1;
    }
    if stage >= Stage::Free {
        m0[b.index["p_run"]] = 1;
    }
    let name = format!("lba_{}", word.iter().map(ToString::to_string).collect::<String>());
    let net = Net::new(name, b.places, b.transitions).map_err(|e: NetError| LbaError::Syntax {
        line: 0,
        message: e.to_string(),
    })?;
    Ok((net, m0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub accepted: bool,
    pub live: bool,
    pub structurally_live: bool,
}

impl ReductionReport {
    pub fn agree(&self) -> bool {
        self.accepted == self.live && self.live == self.structurally_live
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Lba(#[from] LbaError),
    #[error("simulation did not halt within {0} steps")]
    SimulationBudget(usize),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Slp(#[from] SlpError),
}

/// Budgets for [`reduction_correctness_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionBudgets {
    pub steps: usize,
    pub nodes: usize,
    pub slp: SlpOptions,
}

impl Default for ReductionBudgets {
    fn default() -> Self {
        ReductionBudgets {
            steps: 100_000,
            nodes: 2_000_000,
            slp: SlpOptions::default(),
        }
    }
}

/// Compares acceptance with liveness of the closed stage's initial marking
/// and with structural liveness of the closed stage.
pub fn reduction_correctness_check(
    spec: &LbaSpec,
    word: &[Symbol],
    budgets: &ReductionBudgets,
) -> Result<ReductionReport, ReductionError> {
    let accepted = match simulate_lba(spec, word, budgets.steps)? {
        LbaOutcome::Accept => true,
        LbaOutcome::Reject => false,
        LbaOutcome::BudgetExceeded => return Err(ReductionError::SimulationBudget(budgets.steps)),
    };
    let (net, m0) = build_stage(spec, word, Stage::Closed)?;
    let live = is_live_exact(&net, &m0, budgets.nodes)?;
    let structurally_live = decide_slp(&net, &budgets.slp)?.certificate.is_some();
    Ok(ReductionReport {
        accepted,
        live,
        structurally_live,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;

    const FLIP: &str = "\
states s0 s1 acc rej
init s0
accept acc
reject rej
rule s0 a s1 b R
rule s0 b rej b R
rule s1 a acc a L
rule s1 b acc b L
";

    #[test]
    fn parses_and_validates() {
        let spec = LbaSpec::parse(FLIP).unwrap();
        assert_eq!(spec.rules.len(), 4);
        assert!(matches!(
            LbaSpec::parse("states a b\ninit a\naccept a\nreject a\n"),
            Err(LbaError::HaltingStatesCoincide)
        ));
        assert!(matches!(
            LbaSpec::parse(&format!("{FLIP}rule s0 a s1 a R\n")),
            Err(LbaError::NonDeterministic { .. })
        ));
        assert!(matches!(
            LbaSpec::parse(&format!("{FLIP}rule s1 a s0 a R\n")),
            Err(LbaError::NonDeterministic { .. }) | Err(LbaError::ReturnsToInitial(_))
        ));
    }

    #[test]
    fn simulation() {
        let spec = LbaSpec::parse(FLIP).unwrap();
        assert_eq!(simulate_lba(&spec, &parse_word("ab").unwrap(), 100).unwrap(), LbaOutcome::Accept);
        // Rejects only after moving right: the halting position is checked.
        assert!(matches!(
            simulate_lba(&spec, &parse_word("bb").unwrap(), 100),
            Err(LbaError::ConventionViolated(_))
        ));
        assert!(matches!(
            simulate_lba(&spec, &parse_word("a").unwrap(), 100),
            Err(LbaError::ConventionViolated(_))
        ));
    }

    #[test]
    fn stage_shapes() {
        let spec = LbaSpec::parse(FLIP).unwrap();
        let word = parse_word("ab").unwrap();
        let (base, m0) = build_stage(&spec, &word, Stage::Base).unwrap();
        assert_eq!(base.num_places(), 4 * 2 + 2 * 2);
        assert!(base.num_transitions() <= spec.rules.len() * 2);
        assert!(base.is_conservative());
        assert_eq!(m0.total(), 3);
        for stage in [Stage::Split, Stage::Free, Stage::Closed] {
            let (net, _) = build_stage(&spec, &word, stage).unwrap();
            let class = classify(&net);
            assert!(class.io && class.ordinary, "{stage:?}");
        }
    }
}
