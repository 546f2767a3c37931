//! Commutative labeled trees and the starred reduction calculus used for termination proofs.
//!
//! A tree node carries a natural label and an optional star. The one-step moves are:
//! mark (`n(t) -> n*(t)`), lift (`n*(t) -> m(n*(t), ..., n*(t))` for `m < n`),
//! descend (`n*(s, t) -> n(s*, t)`) and project (`n*(t1..tk) -> ti`), each allowed at any
//! position inside a tree.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use crate::term::Position;

pub const DEFAULT_TREE_BUDGET: usize = 10_000;

#[derive(Clone, Debug)]
pub struct LabeledTree {
    pub label: u32,
    pub star: bool,
    pub children: Vec<LabeledTree>,
}

fn raw_cmp(a: &LabeledTree, b: &LabeledTree) -> Ordering {
    a.label
        .cmp(&b.label)
        .then(a.star.cmp(&b.star))
        .then_with(|| {
            for (x, y) in a.children.iter().zip(&b.children) {
                match raw_cmp(x, y) {
                    Ordering::Equal => {}
                    o => return o,
                }
            }
            a.children.len().cmp(&b.children.len())
        })
}

fn raw_hash<H: Hasher>(t: &LabeledTree, h: &mut H) {
    t.label.hash(h);
    t.star.hash(h);
    t.children.len().hash(h);
    for c in &t.children {
        raw_hash(c, h);
    }
}

impl LabeledTree {
    pub fn leaf(label: u32) -> LabeledTree {
        LabeledTree { label, star: false, children: Vec::new() }
    }

    pub fn node(label: u32, children: Vec<LabeledTree>) -> LabeledTree {
        LabeledTree { label, star: false, children }
    }

    pub fn starred(mut self) -> LabeledTree {
        self.star = true;
        self
    }

    pub fn arity(&self) -> usize {
        self.children.len()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(LabeledTree::size).sum::<usize>()
    }

    pub fn max_arity(&self) -> usize {
        self.children.iter().map(LabeledTree::max_arity).fold(self.children.len(), usize::max)
    }

    pub fn is_star_free(&self) -> bool {
        !self.star && self.children.iter().all(LabeledTree::is_star_free)
    }

    /// The same tree with children sorted recursively; equal trees have identical canonical forms.
    pub fn canonical(&self) -> LabeledTree {
        let mut children: Vec<LabeledTree> = self.children.iter().map(LabeledTree::canonical).collect();
        children.sort_by(raw_cmp);
        LabeledTree { label: self.label, star: self.star, children }
    }

    pub fn subtree_at(&self, path: &[usize]) -> Option<&LabeledTree> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get(i.checked_sub(1)?)?.subtree_at(rest),
        }
    }

    fn subtree_mut(&mut self, path: &[usize]) -> Option<&mut LabeledTree> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get_mut(i.checked_sub(1)?)?.subtree_mut(rest),
        }
    }
}

/// A tree already in canonical form, compared structurally.
#[derive(Clone, Debug)]
struct Canon(LabeledTree);

impl Canon {
    fn of(t: &LabeledTree) -> Canon {
        Canon(t.canonical())
    }
}

impl PartialEq for Canon {
    fn eq(&self, other: &Self) -> bool {
        raw_cmp(&self.0, &other.0) == Ordering::Equal
    }
}

impl Eq for Canon {}

impl Hash for Canon {
    fn hash<H: Hasher>(&self, state: &mut H) {
        raw_hash(&self.0, state);
    }
}

impl PartialEq for LabeledTree {
    fn eq(&self, other: &Self) -> bool {
        raw_cmp(&self.canonical(), &other.canonical()) == Ordering::Equal
    }
}

impl Eq for LabeledTree {}

impl Hash for LabeledTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        raw_hash(&self.canonical(), state);
    }
}

impl PartialOrd for LabeledTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LabeledTree {
    fn cmp(&self, other: &Self) -> Ordering {
        raw_cmp(&self.canonical(), &other.canonical())
    }
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if self.star {
            f.write_str("*")?;
        }
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Serialize for LabeledTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad tree syntax at offset {offset}: {message}")]
pub struct TreeParseError {
    pub offset: usize,
    pub message: String,
}

/// Reads trees written as `4(2(0), 5*(0,0))`.
pub fn parse_tree(text: &str) -> Result<LabeledTree, TreeParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let t = parse_node(&chars, &mut pos)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(TreeParseError { offset: pos, message: "trailing input".into() });
    }
    Ok(t)
}

fn skip_ws(c: &[char], pos: &mut usize) {
    while *pos < c.len() && c[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_node(c: &[char], pos: &mut usize) -> Result<LabeledTree, TreeParseError> {
    skip_ws(c, pos);
    let start = *pos;
    while *pos < c.len() && c[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(TreeParseError { offset: start, message: "expected a label".into() });
    }
    let label: u32 = c[start..*pos]
        .iter()
        .collect::<String>()
        .parse()
        .map_err(|_| TreeParseError { offset: start, message: "label out of range".into() })?;
    skip_ws(c, pos);
    let mut node = LabeledTree::leaf(label);
    if *pos < c.len() && c[*pos] == '*' {
        node.star = true;
        *pos += 1;
        skip_ws(c, pos);
    }
    if *pos < c.len() && c[*pos] == '(' {
        *pos += 1;
        loop {
            node.children.push(parse_node(c, pos)?);
            skip_ws(c, pos);
            match c.get(*pos) {
                Some(',') => *pos += 1,
                Some(')') => {
                    *pos += 1;
                    break;
                }
                _ => return Err(TreeParseError { offset: *pos, message: "expected `,` or `)`".into() }),
            }
        }
    }
    Ok(node)
}

/// One move of the calculus, applied at a position of the current tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "kebab-case")]
pub enum TreeMove {
    /// `n(t) -> n*(t)`
    Mark,
    /// `n*(t) -> m(n*(t), ..., n*(t))` with `m < n`
    Lift { label: u32, copies: usize },
    /// `n*(.., s, ..) -> n(.., s*, ..)`, child is 1-based
    Descend { child: usize },
    /// `n*(t1..tk) -> ti`, child is 1-based
    Project { child: usize },
}

impl TreeMove {
    /// Number of the calculus rule this move instantiates; moves below the root also use
    /// the context rule.
    pub fn rule_number(&self) -> u8 {
        match self {
            TreeMove::Mark => 1,
            TreeMove::Lift { .. } => 2,
            TreeMove::Descend { .. } => 3,
            TreeMove::Project { .. } => 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeStep {
    #[serde(flatten)]
    pub action: TreeMove,
    pub at: Position,
    /// Whole tree after the move.
    pub tree: LabeledTree,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeDerivation {
    pub start: LabeledTree,
    pub steps: Vec<TreeStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {step}: no node at {at}")]
    BadPosition { step: usize, at: String },
    #[error("step {step}: {reason}")]
    Illegal { step: usize, reason: String },
    #[error("step {step}: recorded tree {recorded} but the move gives {actual}")]
    Mismatch { step: usize, recorded: String, actual: String },
}

/// Applies one move at `at`, checking its side conditions.
pub fn apply_move(tree: &LabeledTree, action: &TreeMove, at: &Position) -> Result<LabeledTree, String> {
    let mut out = tree.clone();
    let node = out.subtree_mut(at.path()).ok_or_else(|| format!("no node at {at}"))?;
    match *action {
        TreeMove::Mark => {
            if node.star {
                return Err("mark on a starred node".into());
            }
            node.star = true;
        }
        TreeMove::Lift { label, copies } => {
            if !node.star {
                return Err("lift needs a starred node".into());
            }
            if label >= node.label {
                return Err(format!("lift to {label} is not below {}", node.label));
            }
            let inner = node.clone();
            *node = LabeledTree::node(label, vec![inner; copies]);
        }
        TreeMove::Descend { child } => {
            if !node.star {
                return Err("descend needs a starred node".into());
            }
            let c = child.checked_sub(1).and_then(|k| node.children.get_mut(k)).ok_or("descend to a missing child")?;
            if c.star {
                return Err("descend onto a starred child".into());
            }
            c.star = true;
            node.star = false;
        }
        TreeMove::Project { child } => {
            if !node.star {
                return Err("project needs a starred node".into());
            }
            let c = child.checked_sub(1).and_then(|k| node.children.get(k)).ok_or("project to a missing child")?.clone();
            *node = c;
        }
    }
    Ok(out)
}

impl TreeDerivation {
    pub fn end(&self) -> &LabeledTree {
        self.steps.last().map_or(&self.start, |s| &s.tree)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Re-applies every move from the start and checks the recorded trees.
    pub fn replay(&self) -> Result<LabeledTree, ReplayError> {
        let mut cur = self.start.clone();
        for (k, s) in self.steps.iter().enumerate() {
            if cur.subtree_at(s.at.path()).is_none() {
                return Err(ReplayError::BadPosition { step: k + 1, at: s.at.to_string() });
            }
            let next = apply_move(&cur, &s.action, &s.at).map_err(|reason| ReplayError::Illegal { step: k + 1, reason })?;
            if raw_cmp(&next, &s.tree) != Ordering::Equal {
                return Err(ReplayError::Mismatch { step: k + 1, recorded: s.tree.to_string(), actual: next.to_string() });
            }
            cur = next;
        }
        Ok(cur)
    }

    /// True if the derivation replays and ends star-free in a tree equal to `goal`.
    pub fn proves(&self, from: &LabeledTree, goal: &LabeledTree) -> bool {
        &self.start == from && self.replay().is_ok_and(|end| end.is_star_free() && end == *goal)
    }
}

impl fmt::Display for TreeDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for s in &self.steps {
            write!(f, " -> {}", s.tree)?;
        }
        Ok(())
    }
}

/// Outcome of a bounded derivation search.
#[derive(Clone, Debug)]
pub enum TreeSearch {
    Derivable(TreeDerivation),
    NotDerivable,
    BudgetExhausted,
}

struct BudgetOut;

/// Goal-directed decision procedure with memo tables keyed by canonical trees.
struct Searcher {
    plain: HashMap<(Canon, Canon), bool>,
    starred: HashMap<(Canon, Canon), bool>,
    misses: usize,
    budget: usize,
}

type Found = Result<bool, BudgetOut>;

impl Searcher {
    fn tick(&mut self) -> Result<(), BudgetOut> {
        self.misses += 1;
        if self.misses > self.budget {
            Err(BudgetOut)
        } else {
            Ok(())
        }
    }

    /// `s ->> t` for unstarred `s` and star-free `t`.
    fn reach(&mut self, s: &LabeledTree, t: &LabeledTree) -> Found {
        let key = (Canon::of(s), Canon::of(t));
        if let Some(&v) = self.plain.get(&key) {
            return Ok(v);
        }
        self.tick()?;
        let v = s == t || self.children_match(s, t, false)?.is_some() || self.reach_star(s, t)?;
        self.plain.insert(key, v);
        Ok(v)
    }

    /// `s* ->> t`: `s` is read as if its root were starred.
    fn reach_star(&mut self, s: &LabeledTree, t: &LabeledTree) -> Found {
        let key = (Canon::of(s), Canon::of(t));
        if let Some(&v) = self.starred.get(&key) {
            return Ok(v);
        }
        self.tick()?;
        let v = self.star_choice(s, t)?.is_some();
        self.starred.insert(key, v);
        Ok(v)
    }

    fn star_choice(&mut self, s: &LabeledTree, t: &LabeledTree) -> Result<Option<StarChoice>, BudgetOut> {
        for (i, c) in s.children.iter().enumerate() {
            if self.reach(c, t)? {
                return Ok(Some(StarChoice::Project(i)));
            }
        }
        if s.label > t.label {
            let mut all = true;
            for tc in &t.children {
                if !self.reach_star(s, tc)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(Some(StarChoice::Lift));
            }
        }
        if let Some(m) = self.children_match(s, t, true)? {
            return Ok(Some(StarChoice::Descend(m)));
        }
        Ok(None)
    }

    /// A bijection from the children of `s` to those of `t` (same label and arity) where every
    /// child reaches its image. With `strict`, at least one child is starred first. Returns
    /// the image of each child and, when strict, the index of the starred child.
    fn children_match(&mut self, s: &LabeledTree, t: &LabeledTree, strict: bool) -> Result<Option<Matching>, BudgetOut> {
        if s.label != t.label || s.arity() != t.arity() || (strict && s.arity() == 0) {
            return Ok(None);
        }
        let k = s.arity();
        let mut image = vec![usize::MAX; k];
        let mut used = vec![false; k];
        self.assign(s, t, 0, &mut image, &mut used, strict)
    }

    fn assign(
        &mut self,
        s: &LabeledTree,
        t: &LabeledTree,
        i: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        strict: bool,
    ) -> Result<Option<Matching>, BudgetOut> {
        if i == s.arity() {
            if !strict {
                return Ok(Some(Matching { image: image.clone(), starred: None }));
            }
            for (a, &b) in image.iter().enumerate() {
                if self.reach_star(&s.children[a], &t.children[b])? {
                    return Ok(Some(Matching { image: image.clone(), starred: Some(a) }));
                }
            }
            return Ok(None);
        }
        for j in 0..t.arity() {
            if used[j] || !self.reach(&s.children[i], &t.children[j])? {
                continue;
            }
            used[j] = true;
            image[i] = j;
            let found = self.assign(s, t, i + 1, image, used, strict)?;
            used[j] = false;
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    /// Moves (relative to the root of `s`) taking `s` to `t`; only called when reachable.
    fn derive(&mut self, s: &LabeledTree, t: &LabeledTree, out: &mut Vec<(Vec<usize>, TreeMove)>) -> Result<(), BudgetOut> {
        if s == t {
            return Ok(());
        }
        if let Some(m) = self.children_match(s, t, false)? {
            for (i, &j) in m.image.iter().enumerate() {
                self.derive_under(i + 1, &s.children[i], &t.children[j], false, out)?;
            }
            return Ok(());
        }
        out.push((Vec::new(), TreeMove::Mark));
        self.derive_star(s, t, out)
    }

    fn derive_star(&mut self, s: &LabeledTree, t: &LabeledTree, out: &mut Vec<(Vec<usize>, TreeMove)>) -> Result<(), BudgetOut> {
        match self.star_choice(s, t)?.expect("derive_star is only called on reachable pairs") {
            StarChoice::Project(i) => {
                out.push((Vec::new(), TreeMove::Project { child: i + 1 }));
                self.derive(&s.children[i], t, out)
            }
            StarChoice::Lift => {
                out.push((Vec::new(), TreeMove::Lift { label: t.label, copies: t.arity() }));
                for (j, tc) in t.children.iter().enumerate() {
                    self.derive_under(j + 1, s, tc, true, out)?;
                }
                Ok(())
            }
            StarChoice::Descend(m) => {
                let a = m.starred.expect("strict matching names a starred child");
                out.push((Vec::new(), TreeMove::Descend { child: a + 1 }));
                for (i, &j) in m.image.iter().enumerate() {
                    self.derive_under(i + 1, &s.children[i], &t.children[j], i == a, out)?;
                }
                Ok(())
            }
        }
    }

    fn derive_under(
        &mut self,
        child: usize,
        s: &LabeledTree,
        t: &LabeledTree,
        starred: bool,
        out: &mut Vec<(Vec<usize>, TreeMove)>,
    ) -> Result<(), BudgetOut> {
        let mut inner = Vec::new();
        if starred {
            self.derive_star(s, t, &mut inner)?;
        } else {
            self.derive(s, t, &mut inner)?;
        }
        out.extend(inner.into_iter().map(|(mut p, mv)| {
            p.insert(0, child);
            (p, mv)
        }));
        Ok(())
    }
}

struct Matching {
    image: Vec<usize>,
    starred: Option<usize>,
}

enum StarChoice {
    Project(usize),
    Lift,
    Descend(Matching),
}

/// Searches for a derivation `from ->> to` in the starred calculus. `budget` bounds the number
/// of distinct subproblems examined.
pub fn search_tree_reduction(from: &LabeledTree, to: &LabeledTree, budget: usize) -> TreeSearch {
    if !from.is_star_free() || !to.is_star_free() {
        return TreeSearch::NotDerivable;
    }
    let mut s = Searcher { plain: HashMap::new(), starred: HashMap::new(), misses: 0, budget };
    match s.reach(from, to) {
        Err(BudgetOut) => TreeSearch::BudgetExhausted,
        Ok(false) => TreeSearch::NotDerivable,
        Ok(true) => {
            let mut moves = Vec::new();
            s.budget = usize::MAX;
            if s.derive(from, to, &mut moves).is_err() {
                return TreeSearch::BudgetExhausted;
            }
            let mut cur = from.clone();
            let mut steps = Vec::with_capacity(moves.len());
            for (path, action) in moves {
                let at = Position::new(path);
                cur = apply_move(&cur, &action, &at).expect("constructed moves are legal");
                steps.push(TreeStep { action, at, tree: cur.clone() });
            }
            TreeSearch::Derivable(TreeDerivation { start: from.clone(), steps })
        }
    }
}

/// A derivation `from ->> to`, if one is found within budget.
pub fn tree_reduces(from: &LabeledTree, to: &LabeledTree, budget: usize) -> Option<TreeDerivation> {
    match search_tree_reduction(from, to, budget) {
        TreeSearch::Derivable(d) => Some(d),
        _ => None,
    }
}

/// Every single move from `t`. Lifts use labels from `labels` below the node's label and at
/// most `max_copies` copies.
pub fn one_step_moves(t: &LabeledTree, labels: &[u32], max_copies: usize) -> Vec<(Position, TreeMove)> {
    fn go(t: &LabeledTree, path: &mut Vec<usize>, labels: &[u32], max_copies: usize, out: &mut Vec<(Position, TreeMove)>) {
        let here = Position::new(path.clone());
        if t.star {
            for &label in labels.iter().filter(|&&l| l < t.label) {
                for copies in 0..=max_copies {
                    out.push((here.clone(), TreeMove::Lift { label, copies }));
                }
            }
            for (i, c) in t.children.iter().enumerate() {
                if !c.star {
                    out.push((here.clone(), TreeMove::Descend { child: i + 1 }));
                }
                out.push((here.clone(), TreeMove::Project { child: i + 1 }));
            }
        } else {
            out.push((here, TreeMove::Mark));
        }
        for (i, c) in t.children.iter().enumerate() {
            path.push(i + 1);
            go(c, path, labels, max_copies, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), labels, max_copies, &mut out);
    out
}

fn labels_of(t: &LabeledTree, out: &mut Vec<u32>) {
    out.push(t.label);
    for c in &t.children {
        labels_of(c, out);
    }
}

/// Exhaustive breadth-first search over every tree of at most `max_size` nodes reachable
/// from `from`, with lift copies bounded by `max_copies` and lift labels drawn from the goal.
/// Independent of the goal-directed procedure and used to cross-check it.
pub fn exhaustive_reaches(from: &LabeledTree, goal: &LabeledTree, max_size: usize, max_copies: usize) -> bool {
    let mut labels = Vec::new();
    labels_of(goal, &mut labels);
    labels.sort_unstable();
    labels.dedup();
    let goal = Canon::of(goal);
    let mut seen: HashSet<Canon> = HashSet::new();
    let mut queue = VecDeque::new();
    let start = Canon::of(from);
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(Canon(t)) = queue.pop_front() {
        if raw_cmp(&t, &goal.0) == Ordering::Equal {
            return true;
        }
        for (at, mv) in one_step_moves(&t, &labels, max_copies) {
            let Ok(next) = apply_move(&t, &mv, &at) else { continue };
            if next.size() > max_size {
                continue;
            }
            let next = Canon::of(&next);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(s: &str) -> LabeledTree {
        parse_tree(s).unwrap()
    }

    fn derivable(a: &str, b: &str) -> bool {
        match search_tree_reduction(&tr(a), &tr(b), DEFAULT_TREE_BUDGET) {
            TreeSearch::Derivable(d) => {
                assert!(d.proves(&tr(a), &tr(b)), "derivation {d} does not replay");
                true
            }
            TreeSearch::NotDerivable => false,
            TreeSearch::BudgetExhausted => panic!("budget exhausted"),
        }
    }

    #[test]
    fn parse_and_print() {
        let t = tr("5*(0, 2(0))");
        assert_eq!(t.to_string(), "5*(0,2(0))");
        assert_eq!(tr("4(2(0),0)"), tr("4(0,2(0))"));
        assert!(parse_tree("4(").is_err());
    }

    #[test]
    fn known_reductions() {
        assert!(derivable("2(0)", "0"));
        assert!(derivable("3(0)", "2(0)"));
        assert!(derivable("5(0,2(0))", "4(2(5(0,0)),0)"));
        assert!(derivable("3(1(2(0)))", "1(2(3(0)))"));
        assert!(derivable("4(2(0),2(0))", "2(4(0,0))"));
        assert!(derivable("4(2(0),2(0))", "2(3(4(0,0)))"));
        assert!(!derivable("4(2(0),2(0))", "4(2(4(0,0)),0)"));
        assert!(!derivable("2(0)", "2(0,0)"));
        assert!(!derivable("0", "1"));
    }

    #[test]
    fn replay_rejects_bad_steps() {
        let d = tree_reduces(&tr("2(0)"), &tr("0"), 100).unwrap();
        assert_eq!(d.end(), &tr("0"));
        let mut bad = d.clone();
        bad.steps[0].action = TreeMove::Lift { label: 3, copies: 1 };
        assert!(bad.replay().is_err());
    }

    #[test]
    fn exhaustive_agrees_on_examples() {
        assert!(exhaustive_reaches(&tr("3(0)"), &tr("2(0)"), 6, 2));
        assert!(exhaustive_reaches(&tr("4(0,0)"), &tr("3(0)"), 6, 2));
        assert!(!exhaustive_reaches(&tr("2(0)"), &tr("2(0,0)"), 6, 2));
        assert!(!exhaustive_reaches(&tr("4(2(0),2(0))"), &tr("4(2(4(0,0)),0)"), 6, 2));
    }
}
