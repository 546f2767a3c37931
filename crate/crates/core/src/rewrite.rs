//! One-step and multi-step rewriting under explicit strategies.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::RewriteSystem;
use crate::schema::Rule;
use crate::symbol::{Symbol, SYMBOL_COUNT};
use crate::term::{Position, Term, Var};

pub const DEFAULT_MAX_STEPS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    LeftmostInnermost,
    LeftmostOutermost,
    RandomSeeded(u64),
    /// Breadth-first exploration of all one-step successors.
    FullBreadth,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::LeftmostInnermost => f.write_str("innermost"),
            Strategy::LeftmostOutermost => f.write_str("outermost"),
            Strategy::RandomSeeded(s) => write!(f, "random:{s}"),
            Strategy::FullBreadth => f.write_str("breadth"),
        }
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "innermost" => Ok(Strategy::LeftmostInnermost),
            "outermost" => Ok(Strategy::LeftmostOutermost),
            "breadth" | "full-breadth" => Ok(Strategy::FullBreadth),
            "random" => Ok(Strategy::RandomSeeded(0)),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed.parse().map(Strategy::RandomSeeded).map_err(|_| format!("bad seed in `{s}`")),
                None => Err(format!("unknown strategy `{s}` (innermost, outermost, random[:SEED], breadth)")),
            },
        }
    }
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RewriteStep {
    pub rule: String,
    pub position: Position,
    pub before: Term,
    pub after: Term,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trace {
    pub start: Term,
    pub steps: Vec<RewriteStep>,
}

impl Trace {
    pub fn new(start: Term) -> Trace {
        Trace { start, steps: Vec::new() }
    }

    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.after)
    }

    /// `terms()[k]` is the term after `k` steps.
    pub fn terms(&self) -> Vec<&Term> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.after)).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rule_names(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.rule.as_str()).collect()
    }

    /// True if each step starts where the previous one ended.
    pub fn chains(&self) -> bool {
        let mut cur = &self.start;
        for s in &self.steps {
            if &s.before != cur {
                return false;
            }
            cur = &s.after;
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut items = vec![serde_json::json!({"rule": null, "position": [], "term": self.start.to_string()})];
        items.extend(self.steps.iter().map(|s| {
            serde_json::json!({"rule": s.rule, "position": s.position.path(), "term": s.after.to_string()})
        }));
        serde_json::Value::Array(items)
    }
}

impl Serialize for Trace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "   {}", self.start)?;
        for s in &self.steps {
            writeln!(f, "-> {}    [{} at {}]", s.after, s.rule, s.position)?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NormalizeOutcome {
    NormalForm { term: Term, trace: Trace },
    StepLimit { trace: Trace },
    /// The term after the last step equals the term after `cycle_start` steps.
    Cycle { trace: Trace, cycle_start: usize },
}

impl NormalizeOutcome {
    pub fn trace(&self) -> &Trace {
        match self {
            NormalizeOutcome::NormalForm { trace, .. }
            | NormalizeOutcome::StepLimit { trace }
            | NormalizeOutcome::Cycle { trace, .. } => trace,
        }
    }

    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            NormalizeOutcome::NormalForm { term, .. } => Some(term),
            _ => None,
        }
    }

    pub fn kind(&self) -> OutcomeKind {
        match self {
            NormalizeOutcome::NormalForm { .. } => OutcomeKind::NormalForm,
            NormalizeOutcome::StepLimit { .. } => OutcomeKind::StepLimit,
            NormalizeOutcome::Cycle { .. } => OutcomeKind::Cycle,
        }
    }

    /// Period of a cycle outcome.
    pub fn period(&self) -> Option<usize> {
        match self {
            NormalizeOutcome::Cycle { trace, cycle_start } => Some(trace.len() - cycle_start),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeKind {
    NormalForm,
    StepLimit,
    Cycle,
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeKind::NormalForm => "normal-form",
            OutcomeKind::StepLimit => "step-limit",
            OutcomeKind::Cycle => "cycle",
        })
    }
}

/// Outcome without a recorded trace.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum QuickOutcome {
    NormalForm(Term, usize),
    StepLimit(Term),
    Cycle(Term),
}

impl QuickOutcome {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            QuickOutcome::NormalForm(..) => OutcomeKind::NormalForm,
            QuickOutcome::StepLimit(_) => OutcomeKind::StepLimit,
            QuickOutcome::Cycle(_) => OutcomeKind::Cycle,
        }
    }

    pub fn term(&self) -> &Term {
        match self {
            QuickOutcome::NormalForm(t, _) | QuickOutcome::StepLimit(t) | QuickOutcome::Cycle(t) => t,
        }
    }
}

#[derive(Debug)]
enum Pat {
    Var(usize),
    App(Symbol, Vec<Pat>),
}

#[derive(Debug)]
struct CompiledRule {
    lhs: Pat,
    rhs: Pat,
}

fn compile(t: &Term, vars: &mut Vec<Var>) -> Pat {
    match t {
        Term::Var(v) => {
            let k = match vars.iter().position(|w| w == v) {
                Some(k) => k,
                None => {
                    vars.push(v.clone());
                    vars.len() - 1
                }
            };
            Pat::Var(k)
        }
        Term::App(s, args) => Pat::App(*s, args.iter().map(|a| compile(a, vars)).collect()),
    }
}

fn key_of(t: &Term) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::App(s, _) => s.index() + 1,
    }
}

const KEYS: usize = SYMBOL_COUNT + 1;
const INLINE_VARS: usize = 8;

/// Rules indexed by head symbol and the heads of the first two arguments.
#[derive(Debug)]
pub struct RuleIndex {
    compiled: Vec<CompiledRule>,
    /// Candidate rules in rule order for each (head, first argument key, second argument key).
    /// Key 0 stands for a variable or a missing argument.
    cells: Vec<Vec<u32>>,
    max_vars: usize,
}

fn cell(head: usize, a: usize, b: usize) -> usize {
    (head * KEYS + a) * KEYS + b
}

impl RuleIndex {
    pub fn build(rules: &[Rule]) -> RuleIndex {
        let mut compiled = Vec::with_capacity(rules.len());
        let mut cells: Vec<Vec<u32>> = vec![Vec::new(); SYMBOL_COUNT * KEYS * KEYS];
        let mut max_vars = 0;
        for (k, r) in rules.iter().enumerate() {
            let mut vars = Vec::new();
            let lhs = compile(&r.lhs, &mut vars);
            let rhs = compile(&r.rhs, &mut vars);
            max_vars = max_vars.max(vars.len());
            compiled.push(CompiledRule { lhs, rhs });
            let head = r.lhs.head().expect("lhs is not a variable").index();
            let args = r.lhs.args();
            let ra = args.first().map_or(0, key_of);
            let rb = args.get(1).map_or(0, key_of);
            for a in (0..KEYS).filter(|&a| ra == 0 || a == ra) {
                for b in (0..KEYS).filter(|&b| rb == 0 || b == rb) {
                    cells[cell(head, a, b)].push(k as u32);
                }
            }
        }
        RuleIndex { compiled, cells, max_vars }
    }

    /// Rules that may match at the root of `t`, in rule order.
    fn candidates(&self, t: &Term) -> &[u32] {
        let Term::App(s, args) = t else { return &[] };
        let a = args.first().map_or(0, key_of);
        let b = args.get(1).map_or(0, key_of);
        &self.cells[cell(s.index(), a, b)]
    }

    /// Contractum of rule `r` at the root of `t`, if it matches.
    fn contract(&self, r: usize, t: &Term) -> Option<Term> {
        let rule = &self.compiled[r];
        let n = self.max_vars;
        if n <= INLINE_VARS {
            let mut slots = [None; INLINE_VARS];
            pmatch(&rule.lhs, t, &mut slots[..n]).then(|| build(&rule.rhs, &slots[..n]))
        } else {
            let mut slots = vec![None; n];
            pmatch(&rule.lhs, t, &mut slots).then(|| build(&rule.rhs, &slots))
        }
    }

    fn matches(&self, r: usize, t: &Term) -> bool {
        let n = self.max_vars;
        if n <= INLINE_VARS {
            pmatch(&self.compiled[r].lhs, t, &mut [None; INLINE_VARS][..n])
        } else {
            pmatch(&self.compiled[r].lhs, t, &mut vec![None; n])
        }
    }

    /// First rule (in order) whose lhs matches `t`, with its contractum.
    fn first_match(&self, t: &Term) -> Option<(usize, Term)> {
        self.candidates(t).iter().find_map(|&r| self.contract(r as usize, t).map(|c| (r as usize, c)))
    }

    fn has_match(&self, t: &Term) -> bool {
        self.candidates(t).iter().any(|&r| self.matches(r as usize, t))
    }
}

fn pmatch<'a>(p: &Pat, t: &'a Term, slots: &mut [Option<&'a Term>]) -> bool {
    match p {
        Pat::Var(k) => match slots[*k] {
            Some(bound) => bound == t,
            None => {
                slots[*k] = Some(t);
                true
            }
        },
        Pat::App(f, pargs) => match t {
            Term::App(g, targs) if f == g => pargs.iter().zip(targs).all(|(a, b)| pmatch(a, b, slots)),
            _ => false,
        },
    }
}

fn build(p: &Pat, slots: &[Option<&Term>]) -> Term {
    match p {
        Pat::Var(k) => slots[*k].expect("rhs variables occur in lhs").clone(),
        Pat::App(f, args) => Term::App(*f, args.iter().map(|a| build(a, slots)).collect()),
    }
}

fn subterm_mut<'a>(t: &'a mut Term, path: &[usize]) -> &'a mut Term {
    match path.split_first() {
        None => t,
        Some((&i, rest)) => match t {
            Term::App(_, args) => subterm_mut(&mut args[i - 1], rest),
            Term::Var(_) => unreachable!("paths address existing subterms"),
        },
    }
}

fn subterm<'a>(t: &'a Term, path: &[usize]) -> &'a Term {
    path.iter().fold(t, |cur, &i| &cur.args()[i - 1])
}

fn replaced(t: &Term, path: &[usize], r: Term) -> Term {
    let mut out = t.clone();
    *subterm_mut(&mut out, path) = r;
    out
}

fn outermost(idx: &RuleIndex, t: &Term, path: &mut Vec<usize>) -> Option<(usize, Term)> {
    if let Some(found) = idx.first_match(t) {
        return Some(found);
    }
    for (i, a) in t.args().iter().enumerate() {
        path.push(i + 1);
        if let Some(found) = outermost(idx, a, path) {
            return Some(found);
        }
        path.pop();
    }
    None
}

fn innermost(idx: &RuleIndex, t: &Term, path: &mut Vec<usize>) -> Option<(usize, Term)> {
    for (i, a) in t.args().iter().enumerate() {
        path.push(i + 1);
        if let Some(found) = innermost(idx, a, path) {
            return Some(found);
        }
        path.pop();
    }
    idx.first_match(t)
}

/// Every (path, rule) redex, by position in pre-order then rule order.
fn collect_redexes(idx: &RuleIndex, t: &Term, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, usize)>) {
    out.extend(idx.candidates(t).iter().filter(|&&r| idx.matches(r as usize, t)).map(|&r| (path.clone(), r as usize)));
    for (i, a) in t.args().iter().enumerate() {
        path.push(i + 1);
        collect_redexes(idx, a, path, out);
        path.pop();
    }
}

/// All one-step reducts as (path, rule index, result), ordered by position then rule.
fn all_reducts(sys: &RewriteSystem, t: &Term) -> Vec<(Vec<usize>, usize, Term)> {
    let idx = sys.index();
    let mut redexes = Vec::new();
    collect_redexes(idx, t, &mut Vec::new(), &mut redexes);
    redexes
        .into_iter()
        .map(|(p, r)| {
            let c = idx.contract(r, subterm(t, &p)).expect("collected redexes match");
            let after = replaced(t, &p, c);
            (p, r, after)
        })
        .collect()
}

/// True if no rule applies anywhere in `t`.
pub fn is_normal_form(sys: &RewriteSystem, t: &Term) -> bool {
    fn go(idx: &RuleIndex, t: &Term) -> bool {
        !idx.has_match(t) && t.args().iter().all(|a| go(idx, a))
    }
    go(sys.index(), t)
}

fn step_with(sys: &RewriteSystem, t: &Term, strat: Strategy, rng: &mut ChaCha8Rng) -> Option<(Vec<usize>, usize, Term)> {
    let idx = sys.index();
    let mut path = Vec::new();
    let found = match strat {
        Strategy::LeftmostInnermost => innermost(idx, t, &mut path),
        Strategy::LeftmostOutermost | Strategy::FullBreadth => outermost(idx, t, &mut path),
        Strategy::RandomSeeded(_) => {
            let mut all = Vec::new();
            collect_redexes(idx, t, &mut path, &mut all);
            if all.is_empty() {
                return None;
            }
            let k = rng.gen_range(0..all.len());
            let (p, r) = all.swap_remove(k);
            let c = idx.contract(r, subterm(t, &p)).expect("collected redexes match");
            let after = replaced(t, &p, c);
            return Some((p, r, after));
        }
    };
    found.map(|(r, c)| {
        let after = replaced(t, &path, c);
        (path, r, after)
    })
}

fn rng_for(strat: Strategy) -> ChaCha8Rng {
    match strat {
        Strategy::RandomSeeded(seed) => ChaCha8Rng::seed_from_u64(seed),
        _ => ChaCha8Rng::seed_from_u64(0),
    }
}

/// One rewrite step chosen by the strategy. `FullBreadth` returns the first successor.
pub fn rewrite_once(sys: &RewriteSystem, t: &Term, strat: Strategy) -> Option<RewriteStep> {
    let mut rng = rng_for(strat);
    step_with(sys, t, strat, &mut rng).map(|(p, r, after)| RewriteStep {
        rule: sys.rules()[r].name.clone(),
        position: Position::new(p),
        before: t.clone(),
        after,
    })
}

/// Every one-step reduct, by position (lexicographic) then rule order.
pub fn successors(sys: &RewriteSystem, t: &Term) -> Vec<RewriteStep> {
    all_reducts(sys, t)
        .into_iter()
        .map(|(p, r, after)| RewriteStep {
            rule: sys.rules()[r].name.clone(),
            position: Position::new(p),
            before: t.clone(),
            after,
        })
        .collect()
}

/// Rewrites until a normal form, a repeated term, or the step budget.
pub fn normalize(sys: &RewriteSystem, t: &Term, strat: Strategy, max_steps: usize) -> NormalizeOutcome {
    if strat == Strategy::FullBreadth {
        return normalize_breadth(sys, t, max_steps);
    }
    let mut rng = rng_for(strat);
    let mut trace = Trace::new(t.clone());
    let mut seen: HashMap<Term, usize> = HashMap::new();
    seen.insert(t.clone(), 0);
    let mut cur = t.clone();
    loop {
        let Some((p, r, after)) = step_with(sys, &cur, strat, &mut rng) else {
            return NormalizeOutcome::NormalForm { term: cur, trace };
        };
        if trace.len() >= max_steps {
            return NormalizeOutcome::StepLimit { trace };
        }
        trace.steps.push(RewriteStep {
            rule: sys.rules()[r].name.clone(),
            position: Position::new(p),
            before: cur,
            after: after.clone(),
        });
        if let Some(&k) = seen.get(&after) {
            return NormalizeOutcome::Cycle { trace, cycle_start: k };
        }
        seen.insert(after.clone(), trace.len());
        cur = after;
    }
}

/// Step counter for the in-place normalizers.
struct Budget {
    used: usize,
    max: usize,
}

impl Budget {
    fn take(&mut self) -> bool {
        if self.used >= self.max {
            return false;
        }
        self.used += 1;
        true
    }
}

/// Leftmost-innermost normalization in place: children first, then the root, and the
/// contractum's children again after each root step. False when the budget runs out.
fn innermost_in_place(idx: &RuleIndex, t: &mut Term, budget: &mut Budget) -> bool {
    if let Term::App(_, args) = t {
        for a in args.iter_mut() {
            if !innermost_in_place(idx, a, budget) {
                return false;
            }
        }
    }
    while let Some((_, c)) = idx.first_match(t) {
        if !budget.take() {
            return false;
        }
        *t = c;
        if let Term::App(_, args) = t {
            for a in args.iter_mut() {
                if !innermost_in_place(idx, a, budget) {
                    return false;
                }
            }
        }
    }
    true
}

/// Collects (pre-order node, rule) redexes and folds the pre-order symbol sequence into `h`.
fn preorder_redexes(idx: &RuleIndex, t: &Term, node: &mut usize, out: &mut Vec<(usize, usize)>, h: &mut u64) {
    let here = *node;
    let code = match t {
        Term::App(s, _) => s.index() as u64 + 1,
        Term::Var(v) => v.name().len() as u64 + 0x100,
    };
    *h = (h.rotate_left(7) ^ code).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    out.extend(idx.candidates(t).iter().filter(|&&r| idx.matches(r as usize, t)).map(|&r| (here, r as usize)));
    *node += 1;
    for a in t.args() {
        preorder_redexes(idx, a, node, out, h);
    }
}

/// Path to the `k`-th node in pre-order, counting from `*seen`.
fn preorder_path(t: &Term, k: usize, seen: &mut usize, path: &mut Vec<usize>) -> bool {
    if *seen == k {
        return true;
    }
    *seen += 1;
    for (i, a) in t.args().iter().enumerate() {
        path.push(i + 1);
        if preorder_path(a, k, seen, path) {
            return true;
        }
        path.pop();
    }
    false
}

/// History-free normalization. Returns the normal form and step count, or None when the
/// budget ran out or (for random walks) a term may have repeated.
fn normalize_fast(sys: &RewriteSystem, t: &Term, strat: Strategy, max_steps: usize) -> Option<(Term, usize)> {
    let idx = sys.index();
    let mut budget = Budget { used: 0, max: max_steps };
    let mut cur = t.clone();
    match strat {
        Strategy::LeftmostInnermost => innermost_in_place(idx, &mut cur, &mut budget).then_some((cur, budget.used)),
        Strategy::LeftmostOutermost => loop {
            let mut path = Vec::new();
            let Some((_, c)) = outermost(idx, &cur, &mut path) else { return Some((cur, budget.used)) };
            if !budget.take() {
                return None;
            }
            *subterm_mut(&mut cur, &path) = c;
        },
        Strategy::RandomSeeded(_) => {
            // Terms are remembered by fingerprint only. A collision just sends the term to the
            // traced normalizer, which compares terms exactly.
            let mut rng = rng_for(strat);
            let mut seen = rustc_hash::FxHashSet::default();
            let mut redexes = Vec::new();
            loop {
                redexes.clear();
                let mut h = 0;
                preorder_redexes(idx, &cur, &mut 0, &mut redexes, &mut h);
                if !seen.insert(h) {
                    return None;
                }
                if redexes.is_empty() {
                    return Some((cur, budget.used));
                }
                if !budget.take() {
                    return None;
                }
                let (node, r) = redexes[rng.gen_range(0..redexes.len())];
                let mut path = Vec::new();
                preorder_path(&cur, node, &mut 0, &mut path);
                let at = subterm_mut(&mut cur, &path);
                *at = idx.contract(r, at).expect("collected redexes match");
            }
        }
        Strategy::FullBreadth => None,
    }
}

/// Like `normalize` but without building a trace. Only outcomes other than a normal form
/// fall back to the traced normalizer, so both always agree.
pub fn normalize_quick(sys: &RewriteSystem, t: &Term, strat: Strategy, max_steps: usize) -> QuickOutcome {
    if let Some((nf, n)) = normalize_fast(sys, t, strat, max_steps) {
        return QuickOutcome::NormalForm(nf, n);
    }
    match normalize(sys, t, strat, max_steps) {
        NormalizeOutcome::NormalForm { term, trace } => QuickOutcome::NormalForm(term, trace.len()),
        NormalizeOutcome::StepLimit { trace } => QuickOutcome::StepLimit(trace.last().clone()),
        NormalizeOutcome::Cycle { trace, .. } => QuickOutcome::Cycle(trace.last().clone()),
    }
}

/// Breadth-first: a cycle reachable from `t` wins, otherwise the nearest normal form of a
/// fully explored graph.
fn normalize_breadth(sys: &RewriteSystem, t: &Term, max_nodes: usize) -> NormalizeOutcome {
    let graph = ReductionGraph::explore(sys, t, max_nodes);
    if let Some(cyc) = graph.first_cycle_from(0) {
        let mut trace = graph.path_trace(sys, &cyc.prefix);
        let start = trace.len();
        trace.steps.extend(graph.path_trace_from(sys, cyc.prefix.last().map_or(0, |e| graph.edges[*e].to), &cyc.cycle).steps);
        return NormalizeOutcome::Cycle { trace, cycle_start: start };
    }
    if !graph.complete {
        return NormalizeOutcome::StepLimit { trace: Trace::new(t.clone()) };
    }
    let target = (0..graph.nodes.len()).find(|&n| graph.out[n].is_empty()).expect("finite acyclic graph has a sink");
    let path = graph.shortest_path(0, target).expect("reachable");
    let trace = graph.path_trace(sys, &path);
    NormalizeOutcome::NormalForm { term: graph.nodes[target].clone(), trace }
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub rule: usize,
    pub position: Vec<usize>,
}

/// The part of the rewrite graph reachable from a seed, explored breadth-first.
#[derive(Clone, Debug)]
pub struct ReductionGraph {
    pub nodes: Vec<Term>,
    pub ids: HashMap<Term, usize>,
    pub edges: Vec<Edge>,
    /// Outgoing edge indices per node, in successor order.
    pub out: Vec<Vec<usize>>,
    pub expanded: Vec<bool>,
    /// True if every reachable node was expanded.
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct CycleWitness {
    /// Edge indices from the seed to the cycle entry.
    pub prefix: Vec<usize>,
    /// Edge indices of the cycle, returning to its entry.
    pub cycle: Vec<usize>,
}

impl ReductionGraph {
    pub fn explore(sys: &RewriteSystem, seed: &Term, max_nodes: usize) -> ReductionGraph {
        ReductionGraph::explore_except(sys, seed, max_nodes, |_| false)
    }

    /// Like `explore`, but terms for which `settled` holds are kept as leaves. Callers use it
    /// to skip terms already known to reach no cycle.
    pub fn explore_except(sys: &RewriteSystem, seed: &Term, max_nodes: usize, settled: impl Fn(&Term) -> bool) -> ReductionGraph {
        let mut g = ReductionGraph {
            nodes: vec![seed.clone()],
            ids: HashMap::from([(seed.clone(), 0)]),
            edges: Vec::new(),
            out: vec![Vec::new()],
            expanded: vec![false],
            complete: true,
        };
        let mut next = 0;
        while next < g.nodes.len() {
            if next >= max_nodes {
                g.complete = false;
                break;
            }
            let t = g.nodes[next].clone();
            if next > 0 && settled(&t) {
                next += 1;
                continue;
            }
            for (p, r, after) in all_reducts(sys, &t) {
                let to = match g.ids.get(&after) {
                    Some(&id) => id,
                    None => {
                        g.nodes.push(after.clone());
                        g.out.push(Vec::new());
                        g.expanded.push(false);
                        g.ids.insert(after, g.nodes.len() - 1);
                        g.nodes.len() - 1
                    }
                };
                g.edges.push(Edge { from: next, to, rule: r, position: p });
                g.out[next].push(g.edges.len() - 1);
            }
            g.expanded[next] = true;
            next += 1;
        }
        g
    }

    /// Shortest edge path between two nodes.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        self.shortest_path_within(from, to, |_| true, false)
    }

    fn shortest_path_within(&self, from: usize, to: usize, allowed: impl Fn(usize) -> bool, nonempty: bool) -> Option<Vec<usize>> {
        if from == to && !nonempty {
            return Some(Vec::new());
        }
        let mut pred: HashMap<usize, usize> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([from]);
        let mut visited = vec![false; self.nodes.len()];
        visited[from] = true;
        while let Some(n) = queue.pop_front() {
            for &e in &self.out[n] {
                let m = self.edges[e].to;
                if !allowed(m) {
                    continue;
                }
                if m == to {
                    let mut path = vec![e];
                    let mut cur = n;
                    while cur != from {
                        let pe = pred[&cur];
                        path.push(pe);
                        cur = self.edges[pe].from;
                    }
                    path.reverse();
                    return Some(path);
                }
                if !visited[m] {
                    visited[m] = true;
                    pred.insert(m, e);
                    queue.push_back(m);
                }
            }
        }
        None
    }

    /// Strongly connected component id per node (Tarjan, iterative).
    pub fn components(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut ncomp = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut work: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut k)) = work.last_mut() {
                if *k < self.out[v].len() {
                    let w = self.edges[self.out[v][*k]].to;
                    *k += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        work.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    work.pop();
                    if let Some(&(parent, _)) = work.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp[w] = ncomp;
                            if w == v {
                                break;
                            }
                        }
                        ncomp += 1;
                    }
                }
            }
        }
        comp
    }

    /// A cycle reachable from `seed`: the first cyclic component met in breadth-first order,
    /// entered at its smallest term (by size, then text), with the shortest cycle through it.
    pub fn first_cycle_from(&self, seed: usize) -> Option<CycleWitness> {
        let comp = self.components();
        let mut size = vec![0usize; self.nodes.len()];
        for &c in &comp {
            size[c] += 1;
        }
        let cyclic = |n: usize| size[comp[n]] > 1 || self.out[n].iter().any(|&e| self.edges[e].to == n);
        let mut order = vec![seed];
        let mut seen = vec![false; self.nodes.len()];
        seen[seed] = true;
        let mut k = 0;
        let mut hit = None;
        while k < order.len() {
            let n = order[k];
            if cyclic(n) {
                hit = Some(n);
                break;
            }
            for &e in &self.out[n] {
                let m = self.edges[e].to;
                if !seen[m] {
                    seen[m] = true;
                    order.push(m);
                }
            }
            k += 1;
        }
        let hit = hit?;
        let c = comp[hit];
        let members: Vec<usize> = (0..self.nodes.len()).filter(|&n| comp[n] == c).collect();
        let entry = if members.contains(&seed) {
            seed
        } else {
            *members
                .iter()
                .min_by_key(|&&n| (self.nodes[n].size(), self.nodes[n].to_string()))
                .expect("component is nonempty")
        };
        let prefix = self.shortest_path(seed, entry)?;
        let cycle = self.shortest_path_within(entry, entry, |m| comp[m] == c, true)?;
        Some(CycleWitness { prefix, cycle })
    }

    pub fn path_trace(&self, sys: &RewriteSystem, path: &[usize]) -> Trace {
        self.path_trace_from(sys, 0, path)
    }

    pub fn path_trace_from(&self, sys: &RewriteSystem, start: usize, path: &[usize]) -> Trace {
        let mut trace = Trace::new(self.nodes[path.first().map_or(start, |&e| self.edges[e].from)].clone());
        for &e in path {
            let edge = &self.edges[e];
            trace.steps.push(RewriteStep {
                rule: sys.rules()[edge.rule].name.clone(),
                position: Position::new(edge.position.clone()),
                before: self.nodes[edge.from].clone(),
                after: self.nodes[edge.to].clone(),
            });
        }
        trace
    }
}

/// Re-checks that a step is a legal application of the named rule.
pub fn validate_step(sys: &RewriteSystem, step: &RewriteStep) -> bool {
    let Some(rule) = sys.rule(&step.rule) else { return false };
    let Ok(redex) = step.before.subterm_at(&step.position) else { return false };
    let Some(sigma) = crate::unify::match_term(&rule.lhs, redex) else { return false };
    step.before.replace_at(&step.position, sigma.apply(&rule.rhs)).as_ref() == Ok(&step.after)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin_system, SystemId, Variant};
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn sys(id: SystemId, v: Variant) -> RewriteSystem {
        builtin_system(id, v).unwrap()
    }

    #[test]
    fn one_step_examples() {
        let z = sys(SystemId::ZBud, Variant::Edited);
        let s = rewrite_once(&z, &t("S(1)"), Strategy::LeftmostInnermost).unwrap();
        assert_eq!((s.rule.as_str(), s.position.clone(), s.after.clone()), ("b3", Position::root(), t("1 :b0")));
        assert!(rewrite_once(&z, &t("0"), Strategy::LeftmostOutermost).is_none());
        let inner = rewrite_once(&z, &t("S(0 :b0)"), Strategy::LeftmostInnermost).unwrap();
        assert_eq!((inner.rule.as_str(), inner.position.path()), ("b1.0", &[1][..]));
        let outer = rewrite_once(&z, &t("S(0 :b0)"), Strategy::LeftmostOutermost).unwrap();
        assert_eq!((outer.rule.as_str(), outer.position.is_root()), ("b4", true));
    }

    #[test]
    fn successor_sets() {
        let r = sys(SystemId::ZR, Variant::Edited);
        let afters: Vec<Term> = successors(&r, &t("-(-(x)) + -(y)")).into_iter().map(|s| s.after).collect();
        assert!(afters.contains(&t("x + -(y)")));
        assert!(afters.contains(&t("-(-(x) + y)")));
        assert!(successors(&r, &t("x")).is_empty());
        let bt = sys(SystemId::ZBt, Variant::Edited);
        let s = successors(&bt, &t("(0 ^b x)"));
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].rule.as_str(), &s[0].after), ("bt1", &t("x")));
    }

    #[test]
    fn normalizes_and_detects_cycles() {
        let z = sys(SystemId::ZBud, Variant::Edited);
        let out = normalize(&z, &t("S(S(S(0)))"), Strategy::LeftmostInnermost, DEFAULT_MAX_STEPS);
        assert_eq!(out.normal_form(), Some(&t("1 :b1")));
        assert!(out.trace().chains());
        let zero = normalize(&z, &t("0"), Strategy::LeftmostInnermost, 1);
        assert_eq!(zero.normal_form(), Some(&t("0")));
        assert!(zero.trace().is_empty());
        let small = normalize(&z, &t("S(S(S(0)))"), Strategy::LeftmostInnermost, 1);
        assert_eq!(small.kind(), OutcomeKind::StepLimit);
    }

    #[test]
    fn breadth_finds_reachable_cycle() {
        let d = sys(SystemId::ZDub, Variant::Unedited);
        let out = normalize(&d, &t("1 + 0"), Strategy::FullBreadth, 1000);
        assert_eq!(out.period(), Some(2));
        let nf = normalize(&d, &t("1 + 0"), Strategy::LeftmostOutermost, 1000);
        assert_eq!(nf.normal_form(), Some(&t("1")));
    }

    #[test]
    fn steps_validate() {
        let z = sys(SystemId::ZDub, Variant::Edited);
        let out = normalize(&z, &t("(1 :d2) * -(7)"), Strategy::RandomSeeded(7), DEFAULT_MAX_STEPS);
        assert!(out.trace().steps.iter().all(|s| validate_step(&z, s)));
        assert_eq!(out.normal_form(), Some(&t("-(8 :d4)")));
    }

    #[test]
    fn strategy_names() {
        for s in ["innermost", "outermost", "random:42", "breadth"] {
            assert_eq!(s.parse::<Strategy>().unwrap().to_string(), s);
        }
        assert!("sideways".parse::<Strategy>().is_err());
    }
}
