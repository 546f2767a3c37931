//! Termination proofs by recursive tree orderings, and loop search for disproofs.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::RewriteSystem;
use crate::oracle::enumerate_ground_terms;
use crate::rewrite::{ReductionGraph, Trace};
use crate::symbol::{Base, Symbol};
use crate::term::Term;
use crate::tree::{search_tree_reduction, LabeledTree, TreeDerivation, TreeSearch, DEFAULT_TREE_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TerminationError {
    #[error("no weight for symbol `{0}`")]
    MissingWeight(String),
    #[error("weights line {line}: {message}")]
    BadWeights { line: usize, message: String },
}

/// Natural-number weight per function symbol. Variables always map to a leaf labeled 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightAssignment {
    weights: BTreeMap<Symbol, u32>,
}

impl Serialize for WeightAssignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.weights.iter().map(|(k, v)| (k.name(), v)))
    }
}

impl WeightAssignment {
    pub fn new() -> WeightAssignment {
        WeightAssignment::default()
    }

    pub fn set(&mut self, s: Symbol, w: u32) {
        self.weights.insert(s, w);
    }

    pub fn get(&self, s: Symbol) -> Option<u32> {
        self.weights.get(&s).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, u32)> + '_ {
        self.weights.iter().map(|(s, w)| (*s, *w))
    }

    /// The natural binary append layering: digits 0, appends 2, S 3, + 4, times 5.
    pub fn natural() -> WeightAssignment {
        let mut w = WeightAssignment::new();
        w.set(Symbol::Digit(0), 0);
        w.set(Symbol::Digit(1), 0);
        w.set(Symbol::Append(Base::Binary, 0), 2);
        w.set(Symbol::Append(Base::Binary, 1), 2);
        w.set(Symbol::Succ, 3);
        w.set(Symbol::Plus, 4);
        w.set(Symbol::Times, 5);
        w
    }

    /// The same layering over every symbol: negation 1, digit constructors 2, S and P 3.
    pub fn extended() -> WeightAssignment {
        let mut w = WeightAssignment::new();
        for s in Symbol::all() {
            let weight = match s {
                Symbol::Digit(_) => 0,
                Symbol::Neg => 1,
                Symbol::Append(..) | Symbol::Tree(_) => 2,
                Symbol::Succ | Symbol::Pred => 3,
                Symbol::Plus => 4,
                Symbol::Times => 5,
            };
            w.set(s, weight);
        }
        w
    }

    /// Digits weighted by their value, with the other layers shifted above them: negation 10,
    /// digit constructors 11, S and P 12, + 13, times 14. Orients rules that step a digit
    /// argument down, such as `x * 3 -> (x * 2) + x`.
    pub fn graded() -> WeightAssignment {
        let mut w = WeightAssignment::new();
        for s in Symbol::all() {
            let weight = match s {
                Symbol::Digit(d) => d as u32,
                Symbol::Neg => 10,
                Symbol::Append(..) | Symbol::Tree(_) => 11,
                Symbol::Succ | Symbol::Pred => 12,
                Symbol::Plus => 13,
                Symbol::Times => 14,
            };
            w.set(s, weight);
        }
        w
    }

    /// Built-in assignments by name: `natural`, `default` and `graded`. `table7` is accepted
    /// as another name for `natural`.
    pub fn named(name: &str) -> Option<WeightAssignment> {
        match name {
            "natural" | "table7" => Some(WeightAssignment::natural()),
            "default" | "extended" => Some(WeightAssignment::extended()),
            "graded" => Some(WeightAssignment::graded()),
            _ => None,
        }
    }

    /// Reads `symbol=weight` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<WeightAssignment, TerminationError> {
        let mut w = WeightAssignment::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| TerminationError::BadWeights { line: k + 1, message };
            let (sym, val) = line.rsplit_once('=').ok_or_else(|| bad("expected `symbol=weight`".into()))?;
            let sym = Symbol::from_name(sym.trim()).map_err(|e| bad(e.to_string()))?;
            let val: u32 = val.trim().parse().map_err(|_| bad(format!("`{}` is not a natural number", val.trim())))?;
            w.set(sym, val);
        }
        Ok(w)
    }
}

/// Translates a term into a tree: variables become leaf 0, symbols their weight.
pub fn term_to_tree(t: &Term, w: &WeightAssignment) -> Result<LabeledTree, TerminationError> {
    match t {
        Term::Var(_) => Ok(LabeledTree::leaf(0)),
        Term::App(s, args) => {
            let label = w.get(*s).ok_or_else(|| TerminationError::MissingWeight(s.name()))?;
            let children = args.iter().map(|a| term_to_tree(a, w)).collect::<Result<_, _>>()?;
            Ok(LabeledTree::node(label, children))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleDerivation {
    pub rule: String,
    pub lhs: LabeledTree,
    pub rhs: LabeledTree,
    pub derivation: TreeDerivation,
}

/// A reachable cycle: the path from the seed to the cycle, then the cycle itself.
#[derive(Clone, Debug, Serialize)]
pub struct LoopWitness {
    pub seed: Term,
    pub prefix: Trace,
    pub cycle: Trace,
}

impl LoopWitness {
    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    pub fn cycle_rules(&self) -> Vec<&str> {
        self.cycle.rule_names()
    }

    /// The whole path, seed first, with the index where the cycle starts.
    pub fn full_trace(&self) -> (Trace, usize) {
        let mut t = self.prefix.clone();
        let start = t.len();
        t.steps.extend(self.cycle.steps.iter().cloned());
        (t, start)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum TerminationVerdict {
    /// Every rule has a tree derivation, in rule order.
    ProvenRto { derivations: Vec<RuleDerivation> },
    DisprovenLoop { witness: LoopWitness },
    /// Rules without a tree derivation. Never a disproof.
    Unknown { failed_rules: Vec<String>, budget_exhausted: Vec<String> },
}

impl TerminationVerdict {
    pub fn is_proven(&self) -> bool {
        matches!(self, TerminationVerdict::ProvenRto { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            TerminationVerdict::ProvenRto { .. } => "proven-rto",
            TerminationVerdict::DisprovenLoop { .. } => "disproven-loop",
            TerminationVerdict::Unknown { .. } => "unknown",
        }
    }
}

impl fmt::Display for TerminationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TerminationVerdict::ProvenRto { derivations } => {
                let pairs = distinct_tree_pairs(derivations);
                writeln!(f, "ProvenRTO: {} rules, {} distinct tree derivations", derivations.len(), pairs.len())?;
                for (lhs, rhs, rules) in pairs {
                    let d = &derivations.iter().find(|d| d.rule == rules[0]).expect("listed rule").derivation;
                    writeln!(f, "  [{}] {lhs} ->> {rhs}", rules.join(", "))?;
                    writeln!(f, "      {d}")?;
                }
                Ok(())
            }
            TerminationVerdict::DisprovenLoop { witness } => {
                writeln!(f, "DisprovenLoop: period {} from seed {}", witness.period(), witness.seed)?;
                let (trace, start) = witness.full_trace();
                write!(f, "{trace}")?;
                writeln!(f, "(cycle starts at step {start})")
            }
            TerminationVerdict::Unknown { failed_rules, budget_exhausted } => {
                writeln!(f, "Unknown: no tree derivation for {}", failed_rules.join(", "))?;
                if !budget_exhausted.is_empty() {
                    writeln!(f, "  (budget exhausted for {})", budget_exhausted.join(", "))?;
                }
                Ok(())
            }
        }
    }
}

/// Distinct (lhs tree, rhs tree) pairs up to commutativity, with the rules sharing each,
/// in order of first occurrence.
pub fn distinct_tree_pairs(derivations: &[RuleDerivation]) -> Vec<(LabeledTree, LabeledTree, Vec<String>)> {
    let mut out: Vec<(LabeledTree, LabeledTree, Vec<String>)> = Vec::new();
    for d in derivations {
        match out.iter_mut().find(|(l, r, _)| *l == d.lhs && *r == d.rhs) {
            Some((_, _, rules)) => rules.push(d.rule.clone()),
            None => out.push((d.lhs.canonical(), d.rhs.canonical(), vec![d.rule.clone()])),
        }
    }
    out
}

/// Tries to derive `lhs ->> rhs` in the tree calculus for every rule. Rules sharing a tree
/// pair share one search.
pub fn prove_termination_rto(sys: &RewriteSystem, w: &WeightAssignment, budget: usize) -> Result<TerminationVerdict, TerminationError> {
    let pairs: Vec<(String, LabeledTree, LabeledTree)> = sys
        .rules()
        .iter()
        .map(|r| Ok((r.name.clone(), term_to_tree(&r.lhs, w)?, term_to_tree(&r.rhs, w)?)))
        .collect::<Result<_, TerminationError>>()?;
    let mut unique: Vec<(LabeledTree, LabeledTree)> = Vec::new();
    let mut slot: HashMap<(LabeledTree, LabeledTree), usize> = HashMap::new();
    for (_, l, r) in &pairs {
        slot.entry((l.clone(), r.clone())).or_insert_with(|| {
            unique.push((l.clone(), r.clone()));
            unique.len() - 1
        });
    }
    let results: Vec<TreeSearch> = unique.par_iter().map(|(l, r)| search_tree_reduction(l, r, budget)).collect();
    let mut derivations = Vec::new();
    let mut failed = Vec::new();
    let mut exhausted = Vec::new();
    for (name, l, r) in pairs {
        match &results[slot[&(l.clone(), r.clone())]] {
            TreeSearch::Derivable(d) => derivations.push(RuleDerivation { rule: name, lhs: l, rhs: r, derivation: d.clone() }),
            TreeSearch::NotDerivable => failed.push(name),
            TreeSearch::BudgetExhausted => {
                exhausted.push(name.clone());
                failed.push(name);
            }
        }
    }
    Ok(if failed.is_empty() {
        TerminationVerdict::ProvenRto { derivations }
    } else {
        TerminationVerdict::Unknown { failed_rules: failed, budget_exhausted: exhausted }
    })
}

/// Result of a loop search over many seeds.
#[derive(Clone, Debug)]
pub struct LoopSearch {
    pub witness: Option<LoopWitness>,
    pub seeds_tried: usize,
    /// Seeds whose reduction graph exceeded the node budget without showing a cycle.
    pub incomplete_seeds: usize,
}

/// Explores the reduction graph of each seed in turn and returns the first reachable cycle.
/// Terms whose whole reduction graph was explored without finding a cycle are remembered
/// and not expanded again for later seeds.
pub fn search_loops(sys: &RewriteSystem, seeds: impl IntoIterator<Item = Term>, max_nodes: usize) -> LoopSearch {
    let mut settled: HashSet<Term> = HashSet::new();
    let mut tried = 0;
    let mut incomplete = 0;
    for seed in seeds {
        tried += 1;
        if settled.contains(&seed) {
            continue;
        }
        let g = ReductionGraph::explore_except(sys, &seed, max_nodes, |t| settled.contains(t));
        if let Some(cyc) = g.first_cycle_from(0) {
            let prefix = g.path_trace(sys, &cyc.prefix);
            let entry = cyc.prefix.last().map_or(0, |&e| g.edges[e].to);
            let cycle = g.path_trace_from(sys, entry, &cyc.cycle);
            return LoopSearch { witness: Some(LoopWitness { seed, prefix, cycle }), seeds_tried: tried, incomplete_seeds: incomplete };
        }
        if g.complete {
            settled.extend(g.nodes);
        } else {
            incomplete += 1;
        }
    }
    LoopSearch { witness: None, seeds_tried: tried, incomplete_seeds: incomplete }
}

/// First cycle reachable from any seed, if one is found within `max_nodes` per seed.
pub fn find_loop(sys: &RewriteSystem, seeds: &[Term], max_nodes: usize) -> Option<LoopWitness> {
    search_loops(sys, seeds.iter().cloned(), max_nodes).witness
}

/// Loop search over every ground term up to `max_size`.
pub fn find_ground_loop(sys: &RewriteSystem, max_size: usize, max_nodes: usize) -> LoopSearch {
    search_loops(sys, enumerate_ground_terms(sys.signature(), max_size), max_nodes)
}

#[derive(Clone, Debug)]
pub struct TerminationOptions {
    pub tree_budget: usize,
    pub loop_size: usize,
    pub loop_nodes: usize,
}

impl Default for TerminationOptions {
    fn default() -> Self {
        TerminationOptions { tree_budget: DEFAULT_TREE_BUDGET, loop_size: 4, loop_nodes: 500 }
    }
}

/// System-level verdict: a tree-ordering proof if one exists, otherwise a loop found among
/// ground seeds, otherwise Unknown naming the rules without a derivation.
pub fn assess_termination(sys: &RewriteSystem, w: &WeightAssignment, opts: &TerminationOptions) -> Result<TerminationVerdict, TerminationError> {
    let rto = prove_termination_rto(sys, w, opts.tree_budget)?;
    if rto.is_proven() {
        return Ok(rto);
    }
    match find_ground_loop(sys, opts.loop_size, opts.loop_nodes).witness {
        Some(witness) => Ok(TerminationVerdict::DisprovenLoop { witness }),
        None => Ok(rto),
    }
}
