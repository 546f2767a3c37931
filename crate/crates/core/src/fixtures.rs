//! Known results about the built-in systems, with functions that replay them.
//!
//! Each replay returns one [`FixtureCheck`] per item so callers can print a self-test report.

use std::fmt;

use serde::Serialize;

use crate::catalog::{builtin_system, RewriteSystem, SystemId, Variant};
use crate::confluence::{check_confluence_with, critical_pairs, joinable, JoinBudget, Joinability};
use crate::rewrite::{normalize, NormalizeOutcome, Strategy, DEFAULT_MAX_STEPS};
use crate::syntax::parse;
use crate::term::Term;
use crate::termination::{find_loop, prove_termination_rto, TerminationVerdict, WeightAssignment};
use crate::tree::{exhaustive_reaches, parse_tree, search_tree_reduction, TreeSearch, DEFAULT_TREE_BUDGET};

#[derive(Clone, Debug, Serialize)]
pub struct FixtureCheck {
    pub group: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for FixtureCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "ok  " } else { "FAIL" };
        write!(f, "{mark} {:<12} {}: {}", self.group, self.name, self.detail)
    }
}

fn term(s: &str) -> Term {
    parse(s).unwrap_or_else(|e| panic!("fixture term `{s}`: {e}"))
}

fn system(id: SystemId, v: Variant) -> RewriteSystem {
    builtin_system(id, v).expect("built-in system")
}

/// A rewrite loop reachable from a seed, with the rule labels of one period.
pub struct LoopFixture {
    pub system: SystemId,
    pub variant: Variant,
    pub seed: &'static str,
    pub cycle: &'static [&'static str],
}

pub const LOOPS: &[LoopFixture] = &[
    LoopFixture { system: SystemId::ZDub, variant: Variant::Unedited, seed: "1 + 0", cycle: &["d9.0", "d2.0"] },
    LoopFixture { system: SystemId::ZDub, variant: Variant::Unedited, seed: "-(1) + 0", cycle: &["d28.0", "d17", "d15"] },
    LoopFixture { system: SystemId::ZDt, variant: Variant::Unedited, seed: "-(1) + 0", cycle: &["dt29.0", "dt15", "dt13"] },
];

pub fn replay_loops() -> Vec<FixtureCheck> {
    LOOPS
        .iter()
        .map(|fx| {
            let sys = system(fx.system, fx.variant);
            let name = format!("{} from {}", sys.label(), fx.seed);
            match find_loop(&sys, &[term(fx.seed)], 10_000) {
                Some(w) => {
                    let got = w.cycle_rules();
                    FixtureCheck {
                        group: "loop",
                        name,
                        passed: got == fx.cycle && w.cycle.start == *w.cycle.last(),
                        detail: format!("period {} via [{}]", w.period(), got.join(", ")),
                    }
                }
                None => FixtureCheck { group: "loop", name, passed: false, detail: "no cycle found".into() },
            }
        })
        .collect()
}

/// An overlap whose two reducts reach distinct normal forms.
pub struct CounterexampleFixture {
    pub system: SystemId,
    pub variant: Variant,
    pub peak: &'static str,
    /// Expected one-step reducts, in either order, when they are pinned.
    pub reducts: Option<(&'static str, &'static str)>,
    /// Expected distinct normal forms, in either order, when they are pinned.
    pub normal_forms: Option<(&'static str, &'static str)>,
}

pub const COUNTEREXAMPLES: &[CounterexampleFixture] = &[
    CounterexampleFixture { system: SystemId::ZBud, variant: Variant::Edited, peak: "P(-(-(x)))", reducts: Some(("P(x)", "-(S(-(x)))")), normal_forms: None },
    CounterexampleFixture { system: SystemId::ZDub, variant: Variant::Edited, peak: "P(-(-(x)))", reducts: Some(("P(x)", "-(S(-(x)))")), normal_forms: None },
    CounterexampleFixture {
        system: SystemId::ZBt,
        variant: Variant::Edited,
        peak: "x ^b (y ^b (z ^b w))",
        reducts: None,
        normal_forms: Some(("((x + y) + z) ^b w", "(x + (y + z)) ^b w")),
    },
    CounterexampleFixture { system: SystemId::ZDt, variant: Variant::Edited, peak: "0 ^d (x ^d y)", reducts: None, normal_forms: None },
    CounterexampleFixture { system: SystemId::NDt, variant: Variant::Edited, peak: "0 ^d (x ^d y)", reducts: None, normal_forms: None },
    CounterexampleFixture { system: SystemId::ZR, variant: Variant::Edited, peak: "(-(-(x))) + (-(y))", reducts: Some(("x + (-(y))", "-((-(x)) + y)")), normal_forms: None },
];

pub fn replay_counterexamples() -> Vec<FixtureCheck> {
    COUNTEREXAMPLES
        .iter()
        .map(|fx| {
            let sys = system(fx.system, fx.variant);
            let peak = term(fx.peak);
            let report = check_confluence_with(&sys, true, JoinBudget::default());
            let hit = report.counterexamples().into_iter().find(|(cp, j)| {
                let reducts_ok = match fx.reducts {
                    Some((a, b)) => cp.is_overlap(&peak, &term(a), &term(b)),
                    None => cp.rename_like(&peak, &[]).is_some(),
                };
                let nfs_ok = match (fx.normal_forms, j) {
                    (Some((a, b)), Joinability::NotJoinable { left_nf, right_nf, .. }) => {
                        match cp.rename_like(&peak, &[&term(a), &term(b)]).as_deref() {
                            Some([a, b]) => (left_nf == a && right_nf == b) || (left_nf == b && right_nf == a),
                            _ => false,
                        }
                    }
                    (None, _) => true,
                    _ => false,
                };
                reducts_ok && nfs_ok
            });
            let name = format!("{} peak {}", sys.label(), fx.peak);
            match hit {
                Some((cp, Joinability::NotJoinable { left_nf, right_nf, .. })) => FixtureCheck {
                    group: "overlap",
                    name,
                    passed: true,
                    detail: format!("{} / {}: {} vs {}", cp.outer, cp.inner, left_nf, right_nf),
                },
                _ => FixtureCheck { group: "overlap", name, passed: false, detail: format!("not among failing pairs ({})", report.verdict.name()) },
            }
        })
        .collect()
}

/// An overlap of the edited natural binary append system and the common reduct both sides reach.
pub struct JoinFixture {
    pub case: &'static str,
    pub peak: &'static str,
    pub common: &'static str,
}

pub const BINARY_APPEND_JOINS: &[JoinFixture] = &[
    JoinFixture { case: "i", peak: "S(0 :b0)", common: "1" },
    JoinFixture { case: "ii", peak: "S(0 :b1)", common: "1 :b0" },
    JoinFixture { case: "iii", peak: "0 + 0", common: "0" },
    JoinFixture { case: "iv", peak: "0 + 1", common: "1" },
    JoinFixture { case: "v", peak: "1 + 0", common: "1" },
    JoinFixture { case: "vi", peak: "1 + 1", common: "S(1)" },
    JoinFixture { case: "vii", peak: "0 :b0 + y :b0", common: "y :b0" },
    JoinFixture { case: "vii", peak: "x :b0 + 0 :b0", common: "x :b0" },
    JoinFixture { case: "viii", peak: "0 :b0 + y :b1", common: "y :b1" },
    JoinFixture { case: "ix", peak: "0 :b1 + y :b0", common: "y :b1" },
    JoinFixture { case: "x", peak: "0 :b1 + y :b1", common: "S(y) :b0" },
    JoinFixture { case: "x", peak: "x :b1 + 0 :b1", common: "S(x) :b0" },
    JoinFixture { case: "xi", peak: "x * (0 :b0)", common: "0" },
    JoinFixture { case: "xii", peak: "x * (0 :b1)", common: "x" },
];

/// Every listed peak is a computed critical pair, joinable, and its witness is the normal
/// form of the listed common reduct.
pub fn replay_joins() -> Vec<FixtureCheck> {
    let sys = system(SystemId::NBud, Variant::Edited);
    let pairs = critical_pairs(&sys);
    BINARY_APPEND_JOINS
        .iter()
        .map(|fx| {
            let peak = term(fx.peak);
            let name = format!("case {} {}", fx.case, fx.peak);
            let Some((cp, common)) = pairs.iter().find_map(|cp| cp.rename_like(&peak, &[&term(fx.common)]).map(|v| (cp, v[0].clone()))) else {
                return FixtureCheck { group: "join", name, passed: false, detail: "peak not among critical pairs".into() };
            };
            let nf = |t: &Term| match normalize(&sys, t, Strategy::LeftmostInnermost, DEFAULT_MAX_STEPS) {
                NormalizeOutcome::NormalForm { term, .. } => term,
                other => other.trace().last().clone(),
            };
            match joinable(&sys, cp, JoinBudget::default(), true) {
                Joinability::Joinable { witness, .. } => FixtureCheck {
                    group: "join",
                    name,
                    passed: nf(&witness) == nf(&common),
                    detail: format!("{} / {} meet at {witness}", cp.outer, cp.inner),
                },
                other => FixtureCheck { group: "join", name, passed: false, detail: format!("{other:?}") },
            }
        })
        .collect()
}

/// Endpoints of tree derivations: the first twelve under the natural binary weights, the
/// rest under the extended weights used for the integer system.
pub const TREE_DERIVATIONS: &[(&str, &str)] = &[
    ("2(0)", "0"),
    ("3(0)", "0"),
    ("3(0)", "2(0)"),
    ("3(2(0))", "2(0)"),
    ("3(2(0))", "2(3(0))"),
    ("4(0,0)", "0"),
    ("4(0,0)", "3(0)"),
    ("4(2(0),2(0))", "2(4(0,0))"),
    ("4(2(0),2(0))", "2(3(4(0,0)))"),
    ("5(0,0)", "0"),
    ("5(0,2(0))", "2(5(0,0))"),
    ("5(0,2(0))", "4(2(5(0,0)),0)"),
    ("1(0)", "0"),
    ("1(1(0))", "0"),
    ("3(0)", "1(0)"),
    ("3(0)", "0"),
    ("3(2(0))", "2(3(0))"),
    ("3(2(0))", "2(0)"),
    ("3(1(0))", "1(3(0))"),
    ("3(1(0))", "0"),
    ("3(1(2(0)))", "1(2(3(0)))"),
    ("3(1(2(0)))", "1(2(0))"),
    ("4(0,1(0))", "3(0)"),
    ("4(1(0),0)", "3(0)"),
    ("4(2(0),1(2(0)))", "2(4(0,1(0)))"),
    ("4(2(0),1(2(0)))", "2(3(4(0,1(0))))"),
    ("4(1(0),1(0))", "1(4(0,0))"),
    ("5(0,1(0))", "1(5(0,0))"),
];

/// The tree pair of the unedited natural binary addition rule, which has no derivation.
pub const UNDERIVABLE_TREE: (&str, &str) = ("4(2(0),2(0))", "4(2(4(0,0)),0)");

pub fn replay_tree_derivations() -> Vec<FixtureCheck> {
    let mut out: Vec<FixtureCheck> = TREE_DERIVATIONS
        .iter()
        .enumerate()
        .map(|(k, (from, to))| {
            let (a, b) = (parse_tree(from).expect("fixture tree"), parse_tree(to).expect("fixture tree"));
            let name = format!("({}) {from} ->> {to}", k + 1);
            match search_tree_reduction(&a, &b, DEFAULT_TREE_BUDGET) {
                TreeSearch::Derivable(d) => FixtureCheck { group: "tree", name, passed: d.proves(&a, &b), detail: format!("{} steps", d.len()) },
                other => FixtureCheck { group: "tree", name, passed: false, detail: format!("{other:?}") },
            }
        })
        .collect();
    let (a, b) = (parse_tree(UNDERIVABLE_TREE.0).expect("fixture tree"), parse_tree(UNDERIVABLE_TREE.1).expect("fixture tree"));
    let decided = matches!(search_tree_reduction(&a, &b, DEFAULT_TREE_BUDGET), TreeSearch::NotDerivable);
    // Intermediate trees up to one node larger than the goal, lifts with at most two copies.
    let explored = !exhaustive_reaches(&a, &b, b.size() + 1, 2);
    out.push(FixtureCheck {
        group: "tree",
        name: format!("{} ->> {} impossible", UNDERIVABLE_TREE.0, UNDERIVABLE_TREE.1),
        passed: decided && explored,
        detail: format!("decision {}, bounded exhaustive search {}", if decided { "refutes" } else { "does not refute" }, if explored { "refutes" } else { "finds a path" }),
    });
    out
}

/// Proven, disproven, or neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    Proven,
    Disproven,
    Undecided,
}

impl Polarity {
    /// Exit code the command line reports for a verdict of this polarity.
    pub fn exit_code(self) -> i32 {
        match self {
            Polarity::Proven => 0,
            Polarity::Disproven => 1,
            Polarity::Undecided => 2,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Proven => "proven",
            Polarity::Disproven => "disproven",
            Polarity::Undecided => "undecided",
        })
    }
}

/// Published confluence and termination status of one system.
pub struct StatusRow {
    pub system: SystemId,
    pub variant: Variant,
    pub confluence: Polarity,
    pub termination: Polarity,
    /// Weight assignment name used for the termination row.
    pub weights: &'static str,
}

pub const STATUS_TABLE: &[StatusRow] = &[
    StatusRow { system: SystemId::NBud, variant: Variant::Unedited, confluence: Polarity::Proven, termination: Polarity::Proven, weights: "natural" },
    StatusRow { system: SystemId::NBud, variant: Variant::Edited, confluence: Polarity::Proven, termination: Polarity::Proven, weights: "natural" },
    StatusRow { system: SystemId::ZBud, variant: Variant::Edited, confluence: Polarity::Disproven, termination: Polarity::Proven, weights: "default" },
    StatusRow { system: SystemId::NDub, variant: Variant::Unedited, confluence: Polarity::Proven, termination: Polarity::Disproven, weights: "graded" },
    StatusRow { system: SystemId::NDub, variant: Variant::Edited, confluence: Polarity::Proven, termination: Polarity::Proven, weights: "graded" },
    StatusRow { system: SystemId::ZDub, variant: Variant::Edited, confluence: Polarity::Disproven, termination: Polarity::Proven, weights: "graded" },
    StatusRow { system: SystemId::ZBt, variant: Variant::Edited, confluence: Polarity::Disproven, termination: Polarity::Proven, weights: "default" },
    StatusRow { system: SystemId::ZDt, variant: Variant::Unedited, confluence: Polarity::Disproven, termination: Polarity::Disproven, weights: "default" },
    StatusRow { system: SystemId::NDt, variant: Variant::Edited, confluence: Polarity::Disproven, termination: Polarity::Proven, weights: "default" },
    StatusRow { system: SystemId::ZDt, variant: Variant::Edited, confluence: Polarity::Disproven, termination: Polarity::Undecided, weights: "default" },
    StatusRow { system: SystemId::ZR, variant: Variant::Edited, confluence: Polarity::Disproven, termination: Polarity::Proven, weights: "default" },
];

pub fn termination_polarity(v: &TerminationVerdict) -> Polarity {
    match v {
        TerminationVerdict::ProvenRto { .. } => Polarity::Proven,
        TerminationVerdict::DisprovenLoop { .. } => Polarity::Disproven,
        TerminationVerdict::Unknown { .. } => Polarity::Undecided,
    }
}

/// Tree-ordering proofs expected to succeed with the weights that go with them.
pub fn replay_rto_proofs() -> Vec<FixtureCheck> {
    [(SystemId::NBud, "natural"), (SystemId::NDub, "graded")]
        .into_iter()
        .map(|(id, w)| {
            let sys = system(id, Variant::Edited);
            let v = prove_termination_rto(&sys, &WeightAssignment::named(w).expect("named weights"), DEFAULT_TREE_BUDGET).expect("total weights");
            FixtureCheck { group: "rto", name: format!("{} with {w} weights", sys.label()), passed: v.is_proven(), detail: v.name().into() }
        })
        .collect()
}

/// Every fixture group in a fixed order.
pub fn replay_all() -> Vec<FixtureCheck> {
    let mut out = replay_loops();
    out.extend(replay_counterexamples());
    out.extend(replay_joins());
    out.extend(replay_tree_derivations());
    out.extend(replay_rto_proofs());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_terms_parse() {
        for fx in COUNTEREXAMPLES {
            term(fx.peak);
        }
        for fx in BINARY_APPEND_JOINS {
            term(fx.peak);
            term(fx.common);
        }
        for (a, b) in TREE_DERIVATIONS {
            parse_tree(a).unwrap();
            parse_tree(b).unwrap();
        }
    }

    #[test]
    fn loops_replay() {
        for c in replay_loops() {
            assert!(c.passed, "{c}");
        }
    }
}
