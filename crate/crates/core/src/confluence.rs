//! Critical pairs, joinability, confluence verdicts and bounded completion.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{CatalogError, RewriteSystem};
use crate::rewrite::{normalize, successors, NormalizeOutcome, RewriteStep, Strategy, Trace, DEFAULT_MAX_STEPS};
use crate::schema::Rule;
use crate::term::{canonical_renaming, Position, Substitution, Term};
use crate::termination::{term_to_tree, TerminationVerdict, WeightAssignment};
use crate::tree::{search_tree_reduction, TreeSearch, DEFAULT_TREE_BUDGET};
use crate::unify::unify;

/// Suffix used to rename the inner rule apart from the outer one.
const APART: &str = "'";

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPair {
    pub outer: String,
    pub inner: String,
    /// Non-variable position of the outer left-hand side where the inner one overlaps.
    pub position: Position,
    pub mgu: Substitution,
    pub peak: Term,
    /// Reduct by the outer rule at the root.
    pub left: Term,
    /// Reduct by the inner rule at `position`.
    pub right: Term,
}

impl CriticalPair {

    /// Peak and both reducts with variables renamed by first occurrence in the peak.
    fn normalized_vars(mut self) -> CriticalPair {
        let r = canonical_renaming(&self.peak.vars());
        self.peak = r.apply(&self.peak);
        self.left = r.apply(&self.left);
        self.right = r.apply(&self.right);
        self
    }

    /// Brings terms written over the variables of `peak` into this pair's naming. None unless
    /// `peak` is this pair's peak up to renaming.
    pub fn rename_like(&self, peak: &Term, terms: &[&Term]) -> Option<Vec<Term>> {
        let r = canonical_renaming(&peak.vars());
        (r.apply(peak) == self.peak).then(|| terms.iter().map(|t| r.apply(t)).collect())
    }

    /// True if the peak is `peak` and the reducts are `a` and `b` in either order, all up to
    /// one shared renaming.
    pub fn is_overlap(&self, peak: &Term, a: &Term, b: &Term) -> bool {
        match self.rename_like(peak, &[a, b]).as_deref() {
            Some([a, b]) => (self.left == *a && self.right == *b) || (self.left == *b && self.right == *a),
            _ => false,
        }
    }
}

impl fmt::Display for CriticalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-[{}]- {} -[{} at {}]-> {}", self.left, self.outer, self.peak, self.inner, self.position, self.right)
    }
}

/// Every overlap of an inner rule into a non-variable position of an outer rule, in rule
/// order, without the trivial root overlap of a rule with itself. Pairs equal up to variable
/// renaming are reported once.
pub fn critical_pairs(sys: &RewriteSystem) -> Vec<CriticalPair> {
    let rules = sys.rules();
    let mut by_head: HashMap<crate::symbol::Symbol, Vec<usize>> = HashMap::new();
    for (k, r) in rules.iter().enumerate() {
        by_head.entry(r.lhs.head().expect("lhs is not a variable")).or_default().push(k);
    }
    let renamed: Vec<(Term, Term)> = rules.iter().map(|r| (r.lhs.rename(APART), r.rhs.rename(APART))).collect();
    let per_outer: Vec<Vec<CriticalPair>> = (0..rules.len())
        .into_par_iter()
        .map(|o| {
            let outer = &rules[o];
            let mut found = Vec::new();
            for pos in outer.lhs.positions(true) {
                let sub = outer.lhs.subterm_at(&pos).expect("own position");
                let Some(cands) = sub.head().and_then(|h| by_head.get(&h)) else { continue };
                for &i in cands {
                    if i == o && pos.is_root() {
                        continue;
                    }
                    let (ilhs, irhs) = &renamed[i];
                    let Some(mgu) = unify(sub, ilhs) else { continue };
                    let peak = mgu.apply(&outer.lhs);
                    let left = mgu.apply(&outer.rhs);
                    let right = peak.replace_at(&pos, mgu.apply(irhs)).expect("position of the peak");
                    found.push(
                        CriticalPair { outer: outer.name.clone(), inner: rules[i].name.clone(), position: pos.clone(), mgu, peak, left, right }
                            .normalized_vars(),
                    );
                }
            }
            found
        })
        .collect();
    let mut seen = HashSet::new();
    // Rule-list order of the outer rule, then preorder position, then inner rule.
    per_outer
        .into_iter()
        .flatten()
        .filter(|cp| seen.insert((cp.peak.clone(), cp.left.clone(), cp.right.clone())))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Joinability {
    Joinable { witness: Term, left_trace: Trace, right_trace: Trace },
    /// Both sides reach these distinct irreducible terms.
    NotJoinable { left_nf: Term, right_nf: Term, left_trace: Trace, right_trace: Trace },
    Unknown { budget_spent: usize },
}

impl Joinability {
    pub fn is_joinable(&self) -> bool {
        matches!(self, Joinability::Joinable { .. })
    }

    pub fn is_not_joinable(&self) -> bool {
        matches!(self, Joinability::NotJoinable { .. })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct JoinBudget {
    pub depth: usize,
    /// Maximum number of distinct reducts kept per side.
    pub cap: usize,
    pub max_steps: usize,
}

impl Default for JoinBudget {
    fn default() -> Self {
        JoinBudget { depth: 10, cap: 50_000, max_steps: DEFAULT_MAX_STEPS }
    }
}

/// Decides whether the two reducts of `cp` meet. A terminating system normalizes both sides;
/// otherwise both reduct sets are grown breadth-first up to `budget.depth`.
pub fn joinable(sys: &RewriteSystem, cp: &CriticalPair, budget: JoinBudget, terminating: bool) -> Joinability {
    join_terms(sys, &cp.left, &cp.right, budget, terminating)
}

pub fn join_terms(sys: &RewriteSystem, left: &Term, right: &Term, budget: JoinBudget, terminating: bool) -> Joinability {
    if left == right {
        return Joinability::Joinable { witness: left.clone(), left_trace: Trace::new(left.clone()), right_trace: Trace::new(right.clone()) };
    }
    if terminating {
        let l = normalize(sys, left, Strategy::LeftmostInnermost, budget.max_steps);
        let r = normalize(sys, right, Strategy::LeftmostInnermost, budget.max_steps);
        return match (l, r) {
            (NormalizeOutcome::NormalForm { term: a, trace: ta }, NormalizeOutcome::NormalForm { term: b, trace: tb }) => {
                if a == b {
                    Joinability::Joinable { witness: a, left_trace: ta, right_trace: tb }
                } else {
                    Joinability::NotJoinable { left_nf: a, right_nf: b, left_trace: ta, right_trace: tb }
                }
            }
            (l, r) => Joinability::Unknown { budget_spent: l.trace().len() + r.trace().len() },
        };
    }
    breadth_join(sys, left, right, budget)
}

/// Reducts of one side, each with the step that first reached it.
struct Reach {
    parent: HashMap<Term, Option<RewriteStep>>,
    frontier: Vec<Term>,
    normal: Vec<Term>,
}

impl Reach {
    fn new(t: &Term) -> Reach {
        Reach { parent: HashMap::from([(t.clone(), None)]), frontier: vec![t.clone()], normal: Vec::new() }
    }

    fn grow(&mut self, sys: &RewriteSystem, cap: usize) {
        let mut next = Vec::new();
        for t in std::mem::take(&mut self.frontier) {
            let succ = successors(sys, &t);
            if succ.is_empty() {
                self.normal.push(t);
                continue;
            }
            for s in succ {
                if self.parent.len() >= cap {
                    break;
                }
                if !self.parent.contains_key(&s.after) {
                    next.push(s.after.clone());
                    self.parent.insert(s.after.clone(), Some(s));
                }
            }
        }
        self.frontier = next;
    }

    fn trace_to(&self, t: &Term) -> Trace {
        let mut steps = Vec::new();
        let mut cur = t.clone();
        while let Some(Some(step)) = self.parent.get(&cur) {
            steps.push(step.clone());
            cur = step.before.clone();
        }
        steps.reverse();
        Trace { start: cur, steps }
    }
}

fn smallest<'a>(it: impl Iterator<Item = &'a Term>) -> Option<&'a Term> {
    it.min_by_key(|t| (t.size(), t.to_string()))
}

fn breadth_join(sys: &RewriteSystem, left: &Term, right: &Term, budget: JoinBudget) -> Joinability {
    let mut l = Reach::new(left);
    let mut r = Reach::new(right);
    for _ in 0..=budget.depth {
        let common = smallest(l.parent.keys().filter(|t| r.parent.contains_key(*t)));
        if let Some(w) = common {
            return Joinability::Joinable { witness: w.clone(), left_trace: l.trace_to(w), right_trace: r.trace_to(w) };
        }
        if l.frontier.is_empty() && r.frontier.is_empty() {
            break;
        }
        l.grow(sys, budget.cap);
        r.grow(sys, budget.cap);
    }
    // Leaves found on the last level are classified too.
    l.normal.extend(l.frontier.iter().filter(|t| successors(sys, t).is_empty()).cloned());
    r.normal.extend(r.frontier.iter().filter(|t| successors(sys, t).is_empty()).cloned());
    match (smallest(l.normal.iter()), smallest(r.normal.iter())) {
        (Some(a), Some(b)) if a != b => Joinability::NotJoinable {
            left_nf: a.clone(),
            right_nf: b.clone(),
            left_trace: l.trace_to(a),
            right_trace: r.trace_to(b),
        },
        _ => Joinability::Unknown { budget_spent: l.parent.len() + r.parent.len() },
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConfluenceVerdict {
    Confluent { pair_count: usize },
    /// The first failing pair in report order, plus every other failing pair.
    NonConfluent { pair: Box<CriticalPair>, result: Joinability, others: Vec<(CriticalPair, Joinability)> },
    Unknown { reason: String },
}

impl ConfluenceVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            ConfluenceVerdict::Confluent { .. } => "confluent",
            ConfluenceVerdict::NonConfluent { .. } => "non-confluent",
            ConfluenceVerdict::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfluenceReport {
    pub system: String,
    pub verdict: ConfluenceVerdict,
    pub pairs_total: usize,
    pub pairs_checked: usize,
    pub joinable: usize,
    pub undecided: usize,
}

fn pair_json(cp: &CriticalPair, j: &Joinability) -> serde_json::Value {
    let mut ce = serde_json::json!({
        "peak": cp.peak.to_string(),
        "left": cp.left.to_string(),
        "right": cp.right.to_string(),
        "rules": [cp.outer, cp.inner],
        "position": cp.position.path(),
    });
    if let Joinability::NotJoinable { left_nf, right_nf, .. } = j {
        ce["left_nf"] = left_nf.to_string().into();
        ce["right_nf"] = right_nf.to_string().into();
    }
    ce
}

impl ConfluenceReport {
    /// JSON view: system, variant, verdict, counterexamples, pair counts.
    pub fn to_json(&self, sys: &RewriteSystem) -> serde_json::Value {
        let mut v = serde_json::json!({
            "system": sys.name,
            "variant": sys.variant.to_string(),
            "verdict": self.verdict.name(),
            "pairs_checked": self.pairs_checked,
            "pairs_joinable": self.joinable,
            "pairs_undecided": self.undecided,
        });
        match &self.verdict {
            ConfluenceVerdict::NonConfluent { pair, result, .. } => {
                v["counterexample"] = pair_json(pair, result);
                v["counterexamples"] = self.counterexamples().into_iter().map(|(c, j)| pair_json(c, j)).collect();
            }
            ConfluenceVerdict::Unknown { reason } => v["reason"] = reason.clone().into(),
            ConfluenceVerdict::Confluent { .. } => {}
        }
        v
    }
}

impl fmt::Display for ConfluenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            ConfluenceVerdict::Confluent { pair_count } => writeln!(f, "Confluent: all {pair_count} critical pairs joinable, termination established"),
            ConfluenceVerdict::NonConfluent { pair, result, others } => {
                writeln!(f, "NonConfluent: {} of {} critical pairs reach distinct normal forms", others.len() + 1, self.pairs_total)?;
                writeln!(f, "  peak:  {}", pair.peak)?;
                writeln!(f, "  left:  {}    [{} at root]", pair.left, pair.outer)?;
                writeln!(f, "  right: {}    [{} at {}]", pair.right, pair.inner, pair.position)?;
                if let Joinability::NotJoinable { left_nf, right_nf, .. } = result {
                    writeln!(f, "  normal forms: {left_nf}  vs  {right_nf}")?;
                }
                if !others.is_empty() {
                    writeln!(f, "other failing peaks:")?;
                }
                for (cp, _) in others {
                    writeln!(f, "  {}    [{} / {} at {}]", cp.peak, cp.outer, cp.inner, cp.position)?;
                }
                Ok(())
            }
            ConfluenceVerdict::Unknown { reason } => writeln!(
                f,
                "Unknown: {reason} ({} pairs, {} joinable, {} undecided)",
                self.pairs_total, self.joinable, self.undecided
            ),
        }
    }
}

/// Checks every critical pair. Any pair whose sides reach distinct normal forms makes the
/// system non-confluent; Confluent needs all pairs joinable and a termination proof.
pub fn check_confluence(sys: &RewriteSystem, termination: &TerminationVerdict, budget: JoinBudget) -> ConfluenceReport {
    check_confluence_with(sys, termination.is_proven(), budget)
}

pub fn check_confluence_with(sys: &RewriteSystem, terminating: bool, budget: JoinBudget) -> ConfluenceReport {
    let pairs = critical_pairs(sys);
    let total = pairs.len();
    let results: Vec<Joinability> = pairs.par_iter().map(|cp| joinable(sys, cp, budget, terminating)).collect();
    let joined = results.iter().filter(|j| j.is_joinable()).count();
    let undecided = results.iter().filter(|j| matches!(j, Joinability::Unknown { .. })).count();
    let mut failing = pairs.into_iter().zip(results).filter(|(_, j)| j.is_not_joinable());
    let verdict = if let Some((cp, result)) = failing.next() {
        ConfluenceVerdict::NonConfluent { pair: Box::new(cp), result, others: failing.collect() }
    } else if undecided > 0 {
        ConfluenceVerdict::Unknown { reason: format!("{undecided} critical pairs undecided within budget") }
    } else if !terminating {
        ConfluenceVerdict::Unknown { reason: "all critical pairs joinable but termination is not established".into() }
    } else {
        ConfluenceVerdict::Confluent { pair_count: total }
    };
    ConfluenceReport { system: sys.label(), verdict, pairs_total: total, pairs_checked: total, joinable: joined, undecided }
}

impl ConfluenceReport {
    /// Failing pairs in report order; empty unless the verdict is NonConfluent.
    pub fn counterexamples(&self) -> Vec<(&CriticalPair, &Joinability)> {
        match &self.verdict {
            ConfluenceVerdict::NonConfluent { pair, result, others } => {
                std::iter::once((pair.as_ref(), result)).chain(others.iter().map(|(c, j)| (c, j))).collect()
            }
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum GiveUp {
    /// Neither orientation of the equation decreases in the tree ordering.
    UnorientablePair { left: Term, right: Term },
    /// A side did not reach a normal form within the step budget.
    NonNormalizing { term: Term },
    IterationLimit { iterations: usize },
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum CompletionResult {
    Completed { new_rules: Vec<Rule>, iterations: usize },
    GaveUp { why: GiveUp, new_rules: Vec<Rule>, iterations: usize },
}

impl CompletionResult {
    pub fn new_rules(&self) -> &[Rule] {
        match self {
            CompletionResult::Completed { new_rules, .. } | CompletionResult::GaveUp { new_rules, .. } => new_rules,
        }
    }
}

impl fmt::Display for CompletionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (head, rules) = match self {
            CompletionResult::Completed { new_rules, iterations } => {
                (format!("Completed after {iterations} iteration(s) with {} new rule(s)", new_rules.len()), new_rules)
            }
            CompletionResult::GaveUp { why, new_rules, iterations } => {
                let why = match why {
                    GiveUp::UnorientablePair { left, right } => format!("cannot orient {left} = {right}"),
                    GiveUp::NonNormalizing { term } => format!("{term} does not normalize"),
                    GiveUp::IterationLimit { iterations } => format!("no fixpoint after {iterations} iterations"),
                };
                (format!("GaveUp after {iterations} iteration(s): {why}; {} rule(s) added so far", new_rules.len()), new_rules)
            }
        };
        writeln!(f, "{head}")?;
        for r in rules {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

/// Orients `s = t` as a rule if the tree ordering under `w` strictly decreases in that direction.
fn orient(s: &Term, t: &Term, w: &WeightAssignment) -> Option<(Term, Term)> {
    let decreasing = |a: &Term, b: &Term| -> bool {
        if a.is_var() || !b.vars().iter().all(|v| a.contains_var(v)) {
            return false;
        }
        let (Ok(ta), Ok(tb)) = (term_to_tree(a, w), term_to_tree(b, w)) else { return false };
        ta != tb && matches!(search_tree_reduction(&ta, &tb, DEFAULT_TREE_BUDGET), TreeSearch::Derivable(_))
    };
    if decreasing(s, t) {
        Some((s.clone(), t.clone()))
    } else if decreasing(t, s) {
        Some((t.clone(), s.clone()))
    } else {
        None
    }
}

/// Knuth-Bendix completion: each round normalizes every critical pair and adds the oriented
/// non-trivial ones as rules; a round that adds nothing ends the run.
pub fn complete(sys: &RewriteSystem, w: &WeightAssignment, max_iter: usize) -> Result<CompletionResult, CatalogError> {
    let mut cur = sys.clone();
    let mut added: Vec<Rule> = Vec::new();
    for iter in 1..=max_iter {
        let pairs = critical_pairs(&cur);
        let mut round = 0;
        for cp in pairs {
            let nf = |t: &Term, s: &RewriteSystem| match normalize(s, t, Strategy::LeftmostInnermost, DEFAULT_MAX_STEPS) {
                NormalizeOutcome::NormalForm { term, .. } => Ok(term),
                other => Err(other.trace().last().clone()),
            };
            let (a, b) = match (nf(&cp.left, &cur), nf(&cp.right, &cur)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(term), _) | (_, Err(term)) => {
                    return Ok(CompletionResult::GaveUp { why: GiveUp::NonNormalizing { term }, new_rules: added, iterations: iter });
                }
            };
            if a == b {
                continue;
            }
            let Some((lhs, rhs)) = orient(&a, &b, w) else {
                return Ok(CompletionResult::GaveUp { why: GiveUp::UnorientablePair { left: a, right: b }, new_rules: added, iterations: iter });
            };
            let r = canonical_renaming(&lhs.vars());
            let rule = Rule::new(format!("c{}", added.len() + 1), r.apply(&lhs), r.apply(&rhs))?;
            cur = cur.extended(vec![rule.clone()])?;
            added.push(rule);
            round += 1;
        }
        if round == 0 {
            return Ok(CompletionResult::Completed { new_rules: added, iterations: iter });
        }
    }
    Ok(CompletionResult::GaveUp { why: GiveUp::IterationLimit { iterations: max_iter }, new_rules: added, iterations: max_iter })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin_system, SystemId, Variant};
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn peaks_are_sound() {
        let sys = builtin_system(SystemId::ZBud, Variant::Edited).unwrap();
        for cp in critical_pairs(&sys) {
            let outer = sys.rule(&cp.outer).unwrap();
            let inner = sys.rule(&cp.inner).unwrap();
            let s = crate::unify::match_term(&outer.lhs, &cp.peak).unwrap();
            assert_eq!(s.apply(&outer.rhs), cp.left);
            let redex = cp.peak.subterm_at(&cp.position).unwrap();
            let s = crate::unify::match_term(&inner.lhs, redex).unwrap();
            assert_eq!(cp.peak.replace_at(&cp.position, s.apply(&inner.rhs)).unwrap(), cp.right);
        }
    }

    #[test]
    fn binary_append_integers_not_confluent() {
        let sys = builtin_system(SystemId::ZBud, Variant::Edited).unwrap();
        let cps = critical_pairs(&sys);
        let cp = cps.iter().find(|cp| cp.is_overlap(&t("P(-(-(x)))"), &t("P(x)"), &t("-(S(-(x)))"))).expect("P(-(-x)) peak");
        let j = joinable(&sys, cp, JoinBudget::default(), true);
        assert!(j.is_not_joinable());
    }

    #[test]
    fn ring_first_failure() {
        let sys = builtin_system(SystemId::ZR, Variant::Edited).unwrap();
        let rep = check_confluence_with(&sys, false, JoinBudget::default());
        assert_eq!(rep.verdict.name(), "non-confluent", "{rep}");
        assert!(rep.counterexamples().iter().any(|(cp, _)| cp.peak == t("(-(-(x))) + (-(y))")));
    }

    #[test]
    fn completion_outcomes() {
        let ring = builtin_system(SystemId::ZR, Variant::Edited).unwrap();
        assert!(matches!(complete(&ring, &WeightAssignment::extended(), 25).unwrap(), CompletionResult::GaveUp { .. }));
        let nat = builtin_system(SystemId::NBud, Variant::Edited).unwrap();
        let r = complete(&nat, &WeightAssignment::natural(), 1).unwrap();
        assert!(matches!(r, CompletionResult::Completed { ref new_rules, .. } if new_rules.is_empty()), "{r}");
    }

    #[test]
    fn empty_system_completes() {
        let sys = RewriteSystem::new("empty", Variant::Edited, vec![]).unwrap();
        let r = complete(&sys, &WeightAssignment::extended(), 1).unwrap();
        assert!(matches!(r, CompletionResult::Completed { ref new_rules, .. } if new_rules.is_empty()));
    }
}
