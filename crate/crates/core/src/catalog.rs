//! Built-in integer rewrite systems and the rule-file format.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::rewrite::RuleIndex;
use crate::schema::{expand_schema, Meta, MetaRange, Rule, RuleSchema, SchemaError};
use crate::symbol::{Base, Signature};
use crate::syntax::{parse_rule, parse_rule_templates, ParseError};
use crate::term::{Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SystemId {
    #[serde(rename = "N_bud")]
    NBud,
    #[serde(rename = "Z_bud")]
    ZBud,
    #[serde(rename = "N_dub")]
    NDub,
    #[serde(rename = "Z_dub")]
    ZDub,
    #[serde(rename = "N_bt")]
    NBt,
    #[serde(rename = "Z_bt")]
    ZBt,
    #[serde(rename = "N_dt")]
    NDt,
    #[serde(rename = "Z_dt")]
    ZDt,
    #[serde(rename = "Z_r")]
    ZR,
}

impl SystemId {
    pub const ALL: [SystemId; 9] = [
        SystemId::NBud,
        SystemId::ZBud,
        SystemId::NDub,
        SystemId::ZDub,
        SystemId::NBt,
        SystemId::ZBt,
        SystemId::NDt,
        SystemId::ZDt,
        SystemId::ZR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemId::NBud => "N_bud",
            SystemId::ZBud => "Z_bud",
            SystemId::NDub => "N_dub",
            SystemId::ZDub => "Z_dub",
            SystemId::NBt => "N_bt",
            SystemId::ZBt => "Z_bt",
            SystemId::NDt => "N_dt",
            SystemId::ZDt => "Z_dt",
            SystemId::ZR => "Z_r",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            SystemId::NBud => "naturals, binary append",
            SystemId::ZBud => "integers, binary append",
            SystemId::NDub => "naturals, decimal append",
            SystemId::ZDub => "integers, decimal append",
            SystemId::NBt => "naturals, binary tree constructor",
            SystemId::ZBt => "integers, binary tree constructor",
            SystemId::NDt => "naturals, decimal tree constructor",
            SystemId::ZDt => "integers, decimal tree constructor",
            SystemId::ZR => "integers, ring operations over 0 and 1",
        }
    }

    /// Whether an older rule set differing from the current one exists.
    pub fn has_unedited(self) -> bool {
        matches!(self, SystemId::NBud | SystemId::ZBud | SystemId::NDub | SystemId::ZDub | SystemId::ZDt)
    }

    fn table(self) -> (&'static str, Base, &'static [&'static str]) {
        match self {
            SystemId::NBud => (BUD, Base::Binary, &BUD_NAT),
            SystemId::ZBud => (BUD, Base::Binary, &[]),
            SystemId::NDub => (DUB, Base::Decimal, &DUB_NAT),
            SystemId::ZDub => (DUB, Base::Decimal, &[]),
            SystemId::NBt => (BT, Base::Binary, &BT_NAT),
            SystemId::ZBt => (BT, Base::Binary, &[]),
            SystemId::NDt => (DT, Base::Decimal, &DT_NAT),
            SystemId::ZDt => (DT, Base::Decimal, &[]),
            SystemId::ZR => (RING, Base::Binary, &[]),
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemId {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SystemId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s) || id.name().replace('_', "").eq_ignore_ascii_case(s))
            .ok_or_else(|| CatalogError::UnknownSystem(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Edited,
    Unedited,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Edited => "edited",
            Variant::Unedited => "unedited",
        })
    }
}

impl FromStr for Variant {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "edited" => Ok(Variant::Edited),
            "unedited" => Ok(Variant::Unedited),
            _ => Err(CatalogError::UnknownVariant(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("unknown variant `{0}` (expected edited or unedited)")]
    UnknownVariant(String),
    #[error("duplicate rule name `{0}`")]
    DuplicateRule(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// An ordered rule list with its signature and a rule index for fast redex search.
#[derive(Clone)]
pub struct RewriteSystem {
    pub id: Option<SystemId>,
    pub name: String,
    pub variant: Variant,
    rules: Arc<Vec<Rule>>,
    signature: Signature,
    index: Arc<RuleIndex>,
}

impl fmt::Debug for RewriteSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RewriteSystem")
            .field("name", &self.name)
            .field("variant", &self.variant)
            .field("rules", &self.rules.len())
            .finish()
    }
}

impl RewriteSystem {
    pub fn new(name: impl Into<String>, variant: Variant, rules: Vec<Rule>) -> Result<RewriteSystem, CatalogError> {
        let mut seen = std::collections::HashSet::new();
        for r in &rules {
            if !seen.insert(r.name.clone()) {
                return Err(CatalogError::DuplicateRule(r.name.clone()));
            }
            Rule::new(r.name.clone(), r.lhs.clone(), r.rhs.clone())?;
        }
        let mut syms = Vec::new();
        for r in &rules {
            r.lhs.symbols(&mut syms);
            r.rhs.symbols(&mut syms);
        }
        let index = RuleIndex::build(&rules);
        Ok(RewriteSystem {
            id: None,
            name: name.into(),
            variant,
            rules: Arc::new(rules),
            signature: Signature::new(syms),
            index: Arc::new(index),
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn index(&self) -> &RuleIndex {
        &self.index
    }

    pub fn label(&self) -> String {
        match self.id {
            Some(id) if id.has_unedited() => format!("{} ({})", self.name, self.variant),
            _ => self.name.clone(),
        }
    }

    /// A new system with extra rules appended.
    pub fn extended(&self, extra: Vec<Rule>) -> Result<RewriteSystem, CatalogError> {
        let mut rules = self.rules.to_vec();
        rules.extend(extra);
        let mut sys = RewriteSystem::new(self.name.clone(), self.variant, rules)?;
        sys.id = self.id;
        Ok(sys)
    }
}

/// Expands the catalog entry for `id`.
pub fn builtin_system(id: SystemId, variant: Variant) -> Result<RewriteSystem, CatalogError> {
    let (table, base, nat_prefix) = id.table();
    let variant_eff = if id.has_unedited() { variant } else { Variant::Edited };
    let mut rules = Vec::new();
    for (lineno, line) in table.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let entry = parse_table_line(line, lineno + 1, base)?;
        let keep_variant = match entry.tag {
            Tag::Both => true,
            Tag::Edited => variant_eff == Variant::Edited,
            Tag::Unedited => variant_eff == Variant::Unedited,
        };
        let family = entry.schema.name.as_str();
        let keep_family = nat_prefix.is_empty() || nat_prefix.contains(&family);
        if keep_variant && keep_family {
            rules.extend(expand_schema(&entry.schema)?);
        }
    }
    let mut sys = RewriteSystem::new(id.name(), variant, rules)?;
    sys.id = Some(id);
    Ok(sys)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tag {
    Both,
    Edited,
    Unedited,
}

struct TableEntry {
    tag: Tag,
    schema: RuleSchema,
}

fn parse_table_line(line: &str, lineno: usize, base: Base) -> Result<TableEntry, CatalogError> {
    let malformed = |m: &str| CatalogError::Malformed { line: lineno, message: m.to_string() };
    let parts: Vec<&str> = line.splitn(3, '|').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(malformed("expected `name | counters | rule`"));
    }
    let (tag, name) = match parts[0].split_once(' ') {
        Some(("E", n)) => (Tag::Edited, n.trim()),
        Some(("U", n)) => (Tag::Unedited, n.trim()),
        _ => (Tag::Both, parts[0]),
    };
    let mut metas = Vec::new();
    for spec in parts[1].split_whitespace() {
        let (names, range) = spec.split_once('=').ok_or_else(|| malformed("bad counter range"))?;
        let (lo, hi) = range.split_once("..").ok_or_else(|| malformed("bad counter range"))?;
        let lo: u8 = lo.parse().map_err(|_| malformed("bad counter bound"))?;
        let hi: u8 = hi.parse().map_err(|_| malformed("bad counter bound"))?;
        for n in names.split(',') {
            let meta = match n {
                "i" => Meta::I,
                "j" => Meta::J,
                _ => return Err(malformed("counter must be i or j")),
            };
            metas.push(MetaRange { meta, lo, hi });
        }
    }
    let (lhs, rhs) = parse_rule_templates(parts[2]).map_err(|source| CatalogError::Parse { line: lineno, source })?;
    Ok(TableEntry { tag, schema: RuleSchema { name: name.to_string(), metas, lhs, rhs, base } })
}

// Each line: `[E|U ]name | counters | lhs -> rhs`. `E` lines belong only to the current
// rule set, `U` lines only to the older one.

const BUD_NAT: [&str; 13] = ["b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8", "b9", "b10", "b11", "b12", "b13"];

const BUD: &str = r"
b1 | i=0..1 | 0 :b{i} -> {i}
b2 | | S(0) -> 1
b3 | | S(1) -> 1 :b0
b4 | | S(x :b0) -> x :b1
b5 | | S(x :b1) -> S(x) :b0
b6 | | x + 0 -> x
b7 | | 0 + x -> x
b8 | | x + 1 -> S(x)
b9 | | 1 + x -> S(x)
E b10 | i=0..1 j=0..1 | x :b{i} + y :b{j} -> S^{j}((x + y) :b{i})
U b10 | i=0..1 j=0..1 | x :b{i} + y :b{j} -> ((x + y) :b{i}) + {j}
b11 | | x * 0 -> 0
b12 | | x * 1 -> x
b13 | i=0..1 | x * y :b{i} -> ((x * y) :b0) + (x * {i})
b16 | | -(0) -> 0
b17 | | -(-(x)) -> x
b18 | | P(0) -> -(1)
b19 | | P(1) -> 0
b20 | | P(x :b0) -> P(x) :b1
b21 | | P(x :b1) -> x :b0
b22 | | P(-(x)) -> -(S(x))
b23 | | S(-(1)) -> 0
b24 | | S(-(x :b0)) -> -(P(x) :b1)
b25 | | S(-(x :b1)) -> -(x :b0)
b26 | | -(x) :b0 -> -(x :b0)
b27 | | -(x) :b1 -> -(P(x) :b1)
b28 | | x + -(1) -> P(x)
b29 | | -(1) + x -> P(x)
b30 | i=0..1 j=0..1 | x :b{i} + -(y :b{j}) -> P^{j}((x + -(y)) :b{i})
b31 | i=0..1 j=0..1 | -(y :b{j}) + x :b{i} -> P^{j}((x + -(y)) :b{i})
b32 | | -(x) + -(y) -> -(x + y)
b33 | | x * -(y) -> -(x * y)
";

const DUB_NAT: [&str; 13] = ["d1", "d2", "d3", "d4", "d5", "d6", "d7", "d8", "d9", "d10", "d11", "d12", "d13"];

const DUB: &str = r"
d1 | i=0..9 | 0 :d{i} -> {i}
d2 | i=0..8 | S({i}) -> {i'}
d3 | | S(9) -> 1 :d0
d4 | i=0..8 | S(x :d{i}) -> x :d{i'}
d5 | | S(x :d9) -> S(x) :d0
d6 | | x + 0 -> x
d7 | | 0 + x -> x
E d8 | i=1..9 | x + {i} -> S^{i}(x)
U d8 | i=0..8 | x + {i'} -> S(x) + {i}
E d9 | i=1..9 | {i} + x -> S^{i}(x)
U d9 | i=0..8 | {i'} + x -> S(x) + {i}
E d10 | i=0..9 j=0..9 | x :d{i} + y :d{j} -> S^{j}((x + y) :d{i})
U d10 | i=0..9 j=0..9 | x :d{i} + y :d{j} -> ((x + y) :d{i}) + {j}
d11 | | x * 0 -> 0
d12 | i=0..8 | x * {i'} -> (x * {i}) + x
d13 | i=0..9 | x * y :d{i} -> ((x * y) :d0) + (x * {i})
d15 | | -(0) -> 0
d16 | | -(-(x)) -> x
d17 | | P(0) -> -(1)
d18 | i=0..8 | P({i'}) -> {i}
d19 | | P(x :d0) -> P(x) :d9
d20 | i=0..8 | P(x :d{i'}) -> x :d{i}
d21 | | P(-(x)) -> -(S(x))
d22 | i=0..8 | S(-({i'})) -> -({i})
d23 | | S(-(x :d0)) -> -(P(x) :d9)
d24 | i=0..8 | S(-(x :d{i'})) -> -(x :d{i})
d25 | | -(x) :d0 -> -(x :d0)
d26 | i=1..9 | -(x) :d{i} -> -(P(x) :d{i*})
E d27 | i=1..9 | x + -({i}) -> P^{i}(x)
U d27 | i=0..8 | x + -({i'}) -> P(x) + -({i})
E d28 | i=1..9 | -({i}) + x -> P^{i}(x)
U d28 | i=0..8 | -({i'}) + x -> P(x) + -({i})
E d29 | i=0..9 j=0..9 | x :d{i} + -(y :d{j}) -> P^{j}((x + -(y)) :d{i})
U d29 | i=0..9 j=0..9 | x :d{i} + -(y :d{j}) -> ((x + -(y)) :d{i}) + -({j})
E d30 | i=0..9 j=0..9 | -(y :d{j}) + x :d{i} -> P^{j}((x + -(y)) :d{i})
U d30 | i=0..9 j=0..9 | -(y :d{j}) + x :d{i} -> ((x + -(y)) :d{i}) + -({j})
d31 | | -(x) + -(y) -> -(x + y)
d32 | | x * -(y) -> -(x * y)
";

const BT_NAT: [&str; 12] =
    ["bt1", "bt2", "bt3", "bt4", "bt5", "bt6", "bt7", "bt8", "bt9", "bt10", "bt11", "bt12"];

const BT: &str = r"
bt1 | | (0 ^b x) -> x
bt2 | | (x ^b (y ^b z)) -> ((x + y) ^b z)
bt3 | | 0 + x -> x
bt4 | | x + 0 -> x
bt5 | | 1 + 1 -> (1 ^b 0)
bt6 | | x + (y ^b z) -> (y ^b (x + z))
bt7 | | (x ^b y) + z -> (x ^b (y + z))
bt8 | | x * 0 -> 0
bt9 | | 0 * x -> 0
bt10 | | 1 * 1 -> 1
bt11 | | x * (y ^b z) -> ((x * y) ^b (x * z))
bt12 | | (x ^b y) * z -> ((x * z) ^b (y * z))
bt13 | | -(0) -> 0
bt14 | | -(-(x)) -> x
bt15 | | (1 ^b -(1)) -> 1
bt16 | | ((x ^b 0) ^b -(1)) -> ((x ^b -(1)) ^b 1)
bt17 | | ((x ^b 1) ^b -(1)) -> ((x ^b 0) ^b 1)
bt18 | | (x ^b -((y ^b z))) -> -(((y + -(x)) ^b z))
bt19 | | (-(x) ^b y) -> -((x ^b -(y)))
bt20 | | 1 + -(1) -> 0
bt21 | | -(1) + 1 -> 0
bt22 | | -(1) + -(1) -> -((1 ^b 0))
bt23 | | x + -((y ^b z)) -> -((y ^b (z + -(x))))
bt24 | | -((x ^b y)) + z -> -((x ^b (y + -(z))))
bt25 | | x * -(y) -> -(x * y)
bt26 | | -(x) * y -> -(x * y)
";

const DT_NAT: [&str; 12] =
    ["dt1", "dt2", "dt3", "dt4", "dt5", "dt6", "dt7", "dt8", "dt9", "dt10", "dt11", "dt12"];

const DT: &str = r"
dt1 | | (0 ^d x) -> x
dt2 | | (x ^d (y ^d z)) -> ((x + y) ^d z)
dt3 | i=0..8 | S({i}) -> {i'}
dt4 | | S(9) -> (1 ^d 0)
dt5 | i=0..8 | S((x ^d {i})) -> (x ^d {i'})
dt6 | | S((x ^d 9)) -> (S(x) ^d 0)
dt7 | | x + 0 -> x
dt8 | i=0..8 | x + {i'} -> S(x) + {i}
dt9 | i=0..9 | x + (y ^d {i}) -> (y ^d x) + {i}
dt10 | | x * 0 -> 0
dt11 | i=0..8 | x * {i'} -> x + (x * {i})
dt12 | i=0..9 | x * (y ^d {i}) -> ((x * y) ^d 0) + (x * {i})
dt13 | | -(0) -> 0
dt14 | | -(-(x)) -> x
dt15 | | P(0) -> -(1)
dt16 | i=0..8 | P({i'}) -> {i}
dt17 | | P((x ^d 0)) -> (P(x) ^d 9)
dt18 | i=0..8 | P((x ^d {i'})) -> (x ^d {i})
dt19 | | P(-(x)) -> -(S(x))
dt20 | i=0..8 | S(-({i'})) -> -({i})
dt21 | | S(-((x ^d 0))) -> -((P(x) ^d 9))
dt22 | i=0..8 | S(-((x ^d {i'}))) -> -((x ^d {i}))
dt23 | | (-(x) ^d y) -> -((x ^d -(y)))
dt24 | i=1..9 j=1..9 | ({i} ^d -({j})) -> (P({i}) ^d {j*})
dt25 | i=1..9 | ((x ^d y) ^d -({i})) -> (P((x ^d y)) ^d {i*})
dt26 | | (x ^d -((y ^d z))) -> -(((y + -(x)) ^d z))
E dt27 | i=1..9 | x + -({i}) -> P^{i}(x)
U dt27 | i=0..8 | x + -({i'}) -> P(x) + -({i})
dt28 | | x + -((y ^d z)) -> -((y ^d (z + -(x))))
E dt29 | i=1..9 | -({i}) + x -> P^{i}(x)
U dt29 | i=0..8 | -({i'}) + x -> P(x) + -({i})
dt30 | | -((x ^d y)) + z -> -((x ^d (y + -(z))))
dt31 | | x * -(y) -> -(x * y)
dt32 | | -(x) * y -> -(x * y)
";

const RING: &str = r"
r1 | | -(0) -> 0
r2 | | -(-(x)) -> x
r3 | | x + (y + z) -> (x + y) + z
r4 | | x + 0 -> x
r5 | | 1 + -(1) -> 0
r6 | | (x + 1) + -(1) -> x
r7 | | x + -(y + 1) -> (x + -(y)) + -(1)
r8 | | 0 + x -> x
r9 | | -(1) + 1 -> 0
r10 | | -(x + 1) + 1 -> -(x)
r11 | | -(x) + -(y) -> -(x + y)
r12 | | x * 0 -> 0
r13 | | x * 1 -> x
r14 | | x * -(y) -> -(x) * y
r15 | | x * (y + z) -> (x * y) + (x * z)
";

/// Writes the rule-file format: a `(VAR ...)` block then a `(RULES ...)` block.
pub fn export_trs(sys: &RewriteSystem) -> String {
    let mut vars: Vec<Var> = Vec::new();
    for r in sys.rules() {
        for v in r.lhs.vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    vars.sort();
    let mut out = String::new();
    let names: Vec<&str> = vars.iter().map(|v| v.name()).collect();
    out.push_str(&format!("(VAR {})\n", names.join(" ")));
    out.push_str("(RULES\n");
    for r in sys.rules() {
        out.push_str(&format!("  {} -> {}\n", r.lhs, r.rhs));
    }
    out.push_str(")\n");
    out
}

/// Reads the rule-file format. Rules are named `rule1`, `rule2`, ...
pub fn import_trs(text: &str, name: &str) -> Result<RewriteSystem, CatalogError> {
    let mut declared: Option<Vec<String>> = None;
    let mut in_rules = false;
    let mut closed = false;
    let mut rules = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.trim();
        let malformed = |m: &str| CatalogError::Malformed { line: lineno, message: m.to_string() };
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if closed {
            return Err(malformed("content after the RULES block"));
        }
        if let Some(rest) = line.strip_prefix("(VAR") {
            let body = rest.trim().strip_suffix(')').ok_or_else(|| malformed("unterminated VAR block"))?;
            declared = Some(body.split_whitespace().map(str::to_string).collect());
            continue;
        }
        if line == "(RULES" {
            in_rules = true;
            continue;
        }
        if line == ")" && in_rules {
            in_rules = false;
            closed = true;
            continue;
        }
        if !in_rules {
            return Err(malformed("expected `(VAR ...)` or `(RULES`"));
        }
        let (lhs, rhs) = parse_rule(line).map_err(|source| CatalogError::Parse { line: lineno, source })?;
        if let Some(decl) = &declared {
            for v in lhs.vars().iter().chain(rhs.vars().iter()) {
                if !decl.iter().any(|d| d == v.name()) {
                    return Err(malformed(&format!("variable `{v}` not declared in VAR")));
                }
            }
        }
        rules.push(Rule::new(format!("rule{}", rules.len() + 1), lhs, rhs)?);
    }
    if in_rules {
        return Err(CatalogError::Malformed { line: text.lines().count(), message: "unterminated RULES block".into() });
    }
    RewriteSystem::new(name, Variant::Edited, rules)
}

/// Parses a term and checks it only uses symbols of `sys`.
pub fn parse_term_for(sys: &RewriteSystem, text: &str) -> Result<Term, String> {
    let t = crate::syntax::parse(text).map_err(|e| e.to_string())?;
    let mut syms = Vec::new();
    t.symbols(&mut syms);
    if let Some(s) = syms.iter().find(|s| !sys.signature().contains(**s)) {
        return Err(format!("symbol `{s}` is not part of {}", sys.name));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn count(id: SystemId, v: Variant) -> usize {
        builtin_system(id, v).unwrap().rules().len()
    }

    #[test]
    fn rule_counts() {
        assert_eq!(count(SystemId::NBud, Variant::Edited), 18);
        assert_eq!(count(SystemId::ZBud, Variant::Edited), 42);
        assert_eq!(count(SystemId::NDub, Variant::Edited), 170);
        assert_eq!(count(SystemId::ZDub, Variant::Edited), 442);
        assert_eq!(count(SystemId::NBt, Variant::Edited), 12);
        assert_eq!(count(SystemId::ZBt, Variant::Edited), 26);
        assert_eq!(count(SystemId::NDt, Variant::Edited), 62);
        assert_eq!(count(SystemId::ZDt, Variant::Edited), 218);
        assert_eq!(count(SystemId::ZR, Variant::Edited), 15);
        for id in SystemId::ALL {
            assert_eq!(count(id, Variant::Edited), count(id, Variant::Unedited), "{id}");
        }
    }

    #[test]
    fn schema_instances() {
        let z = builtin_system(SystemId::ZBud, Variant::Edited).unwrap();
        let b1 = z.rule("b1.1").unwrap();
        assert_eq!((b1.lhs.clone(), b1.rhs.clone()), (parse("0 :b1").unwrap(), parse("1").unwrap()));
        assert_eq!(z.rule("b10.1.1").unwrap().rhs, parse("S((x + y) :b1)").unwrap());
        assert_eq!(z.rule("b10.1.0").unwrap().rhs, parse("(x + y) :b1").unwrap());
        let d = builtin_system(SystemId::ZDub, Variant::Edited).unwrap();
        assert_eq!(d.rule("d26.1").unwrap().rhs, parse("-(P(x) :d9)").unwrap());
    }

    #[test]
    fn unedited_differs_in_expected_families() {
        let fam = |n: &str| n.split('.').next().unwrap().to_string();
        let diff = |id| {
            let e = builtin_system(id, Variant::Edited).unwrap();
            let u = builtin_system(id, Variant::Unedited).unwrap();
            let mut fams = std::collections::BTreeSet::new();
            let mut changed = 0;
            for r in e.rules() {
                if !u.rules().contains(r) {
                    fams.insert(fam(&r.name));
                    changed += 1;
                }
            }
            (fams.into_iter().collect::<Vec<_>>(), changed)
        };
        assert_eq!(diff(SystemId::NBud), (vec!["b10".to_string()], 4));
        assert_eq!(diff(SystemId::ZBud).0, vec!["b10"]);
        assert_eq!(diff(SystemId::ZDub).0, vec!["d10", "d27", "d28", "d29", "d30", "d8", "d9"]);
        assert_eq!(diff(SystemId::ZDt).0, vec!["dt27", "dt29"]);
        assert_eq!(diff(SystemId::ZR).1, 0);
    }

    #[test]
    fn trs_round_trip() {
        let z = builtin_system(SystemId::ZR, Variant::Edited).unwrap();
        let text = export_trs(&z);
        assert!(text.starts_with("(VAR x y z)\n(RULES\n"));
        let back = import_trs(&text, "Z_r").unwrap();
        assert_eq!(back.rules().len(), 15);
        for (a, b) in z.rules().iter().zip(back.rules()) {
            assert_eq!((&a.lhs, &a.rhs), (&b.lhs, &b.rhs));
        }
        assert!(import_trs("(VAR x y)\n(RULES\n  S(x) -> y\n)\n", "bad").is_err());
        assert!(import_trs("(VAR x)\n(RULES\n  S(x) -> x\n", "bad").is_err());
    }

    #[test]
    fn system_names_parse() {
        assert_eq!("Z_bud".parse::<SystemId>().unwrap(), SystemId::ZBud);
        assert_eq!("zdub".parse::<SystemId>().unwrap(), SystemId::ZDub);
        assert!("Q".parse::<SystemId>().is_err());
        assert!("old".parse::<Variant>().is_err());
    }
}
