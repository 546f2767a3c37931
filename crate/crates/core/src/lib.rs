//! A rewriting workbench for rewrite systems that define integer datatypes.
//!
//! The crate covers terms and their syntax, a catalog of built-in systems, strategy-driven
//! rewriting, critical-pair confluence analysis with bounded completion, a tree-ordering
//! termination prover with loop search, and an exact integer oracle for ground terms.

pub mod catalog;
pub mod confluence;
pub mod fixtures;
pub mod oracle;
pub mod rewrite;
pub mod schema;
pub mod symbol;
pub mod syntax;
pub mod term;
pub mod termination;
pub mod tree;
pub mod unify;

pub use catalog::{builtin_system, export_trs, import_trs, CatalogError, RewriteSystem, SystemId, Variant};
pub use confluence::{check_confluence, complete, critical_pairs, CompletionResult, ConfluenceReport, ConfluenceVerdict, CriticalPair, Joinability};
pub use oracle::{canonical, eval, Representation};
pub use rewrite::{normalize, rewrite_once, successors, NormalizeOutcome, RewriteStep, Strategy, Trace};
pub use schema::{expand_schema, DigitExpr, Rule, RuleSchema};
pub use symbol::{Base, Signature, Symbol, SymbolKind};
pub use syntax::{parse, ParseError};
pub use term::{Position, Substitution, Term, Var};
pub use unify::{match_term, unify};
pub use termination::{assess_termination, prove_termination_rto, TerminationVerdict, WeightAssignment};
pub use tree::{parse_tree, search_tree_reduction, LabeledTree, TreeDerivation, TreeSearch};
