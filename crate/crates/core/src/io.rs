//! Text formats: JSON instance documents, edge lists and DIMACS CNF.

use std::fmt::Write as _;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::cnf::{CnfFormula, Literal, MAX_CLAUSE_LEN};
use crate::error::{Error, Result};
use crate::model::{Arc, ArcRole, Budget, Digraph, Instance, NeighborhoodKind, RecoveryRule};
use crate::rational::{self, Rational};
use crate::reductions::SimpleDigraph;

/// A rational written as a `"p/q"` or integer string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalString(pub Rational);

impl Serialize for RationalString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        rational::parse(&text)
            .map(RationalString)
            .ok_or_else(|| de::Error::custom(format!("invalid rational {text:?}")))
    }
}

fn deserialize_from_str<'de, D, T>(d: D) -> std::result::Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: std::str::FromStr<Err = String>,
{
    let text = String::deserialize(d)?;
    text.parse().map_err(de::Error::custom)
}

fn deserialize_role<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<ArcRole>, D::Error> {
    let text = String::deserialize(d)?;
    text.parse().map(Some).map_err(de::Error::custom)
}

fn serialize_kind<S: Serializer>(kind: &NeighborhoodKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(kind.as_str())
}

fn serialize_role<S: Serializer>(role: &Option<ArcRole>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match role {
        Some(r) => s.serialize_str(r.as_str()),
        None => s.serialize_none(),
    }
}

/// On-disk form of an [`Instance`]. Fields are declared in alphabetical
/// order so serialization emits sorted keys.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub arcs: Vec<ArcDocument>,
    pub budget: BudgetDocument,
    pub nodes: usize,
    pub rule: RuleDocument,
    pub sink: usize,
    pub source: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDocument {
    pub c1: RationalString,
    pub chat: RationalString,
    pub delta: RationalString,
    pub head: usize,
    pub id: u32,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_role",
        deserialize_with = "deserialize_role"
    )]
    pub role: Option<ArcRole>,
    pub tail: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetDocument {
    pub gamma: RationalString,
    pub kind: BudgetKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetKind {
    Continuous,
    Discrete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDocument {
    pub k: usize,
    #[serde(serialize_with = "serialize_kind", deserialize_with = "deserialize_from_str")]
    pub kind: NeighborhoodKind,
}

impl InstanceDocument {
    pub fn from_instance(inst: &Instance) -> Self {
        let g = &inst.graph;
        let (kind, gamma) = match &inst.budget {
            Budget::Continuous(gamma) => (BudgetKind::Continuous, gamma.clone()),
            Budget::Discrete(gamma) => (BudgetKind::Discrete, rational::from_usize(*gamma)),
        };
        InstanceDocument {
            arcs: g
                .arcs()
                .iter()
                .map(|a| ArcDocument {
                    c1: RationalString(a.first_stage_cost.clone()),
                    chat: RationalString(a.nominal.clone()),
                    delta: RationalString(a.deviation_cap.clone()),
                    head: a.head,
                    id: a.id.0,
                    role: a.role,
                    tail: a.tail,
                })
                .collect(),
            budget: BudgetDocument {
                gamma: RationalString(gamma),
                kind,
            },
            nodes: g.node_count(),
            rule: RuleDocument {
                k: inst.rule.k,
                kind: inst.rule.kind,
            },
            sink: g.sink(),
            source: g.source(),
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        let budget = match self.budget.kind {
            BudgetKind::Continuous => Budget::Continuous(self.budget.gamma.0),
            BudgetKind::Discrete => {
                let gamma = &self.budget.gamma.0;
                let value = if gamma.is_integer() { usize::try_from(gamma.to_integer()).ok() } else { None };
                Budget::Discrete(value.ok_or_else(|| {
                    Error::InvalidInstance(vec![format!("discrete budget {gamma} is not a nonnegative integer")])
                })?)
            }
        };
        let arcs = self
            .arcs
            .into_iter()
            .map(|a| {
                let arc = Arc::new(a.id, a.tail, a.head).with_costs(a.c1.0, a.chat.0, a.delta.0);
                match a.role {
                    Some(role) => arc.with_role(role),
                    None => arc,
                }
            })
            .collect();
        let graph = Digraph::new(self.nodes, arcs, self.source, self.sink)?;
        Ok(Instance::new(graph, RecoveryRule::new(self.rule.kind, self.rule.k), budget))
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(e.line(), e.column(), e.to_string())
}

/// Parses an instance document. Errors carry the line and column of the
/// offending token.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDocument = serde_json::from_str(text).map_err(json_error)?;
    doc.into_instance()
}

/// Canonical text: sorted keys, arcs by id, reduced rationals, two-space
/// indentation and a trailing newline.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut text = serde_json::to_string_pretty(&InstanceDocument::from_instance(inst)).expect("documents serialize");
    text.push('\n');
    text
}

/// Rewrites any well-formed document into canonical text without building
/// an [`Instance`].
pub fn canonicalize_document(text: &str) -> Result<String> {
    let mut value: Value = serde_json::from_str(text).map_err(json_error)?;
    if let Some(arcs) = value.get_mut("arcs").and_then(Value::as_array_mut) {
        arcs.sort_by_key(|a| a.get("id").and_then(Value::as_u64));
        for arc in arcs.iter_mut() {
            for key in ["c1", "chat", "delta"] {
                normalize_rational(arc.get_mut(key));
            }
        }
    }
    normalize_rational(value.get_mut("budget").and_then(|b| b.get_mut("gamma")));
    // serde_json's default map keeps keys sorted.
    let mut out = serde_json::to_string_pretty(&value).expect("values serialize");
    out.push('\n');
    Ok(out)
}

fn normalize_rational(value: Option<&mut Value>) {
    if let Some(v) = value {
        if let Some(q) = v.as_str().and_then(rational::parse) {
            *v = Value::String(rational::format(&q));
        }
    }
}

/// Edge list: one `u v` pair of 1-based node ids per line, `#` starts a
/// comment, and an optional `nodes N` line fixes the node count (otherwise
/// the largest id used).
pub fn parse_edge_list(text: &str) -> Result<SimpleDigraph> {
    let mut declared: Option<usize> = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "nodes" {
            if declared.is_some() || !pairs.is_empty() {
                return Err(Error::parse(line_no, 1, "the nodes line must come first and only once"));
            }
            let [_, count] = fields[..] else {
                return Err(Error::parse(line_no, 1, "expected `nodes N`"));
            };
            declared = Some(count.parse().map_err(|_| Error::parse(line_no, 7, format!("invalid node count {count:?}")))?);
            continue;
        }
        let [u, v] = fields[..] else {
            return Err(Error::parse(line_no, 1, format!("expected two node ids, found {}", fields.len())));
        };
        let id = |s: &str, column: usize| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(x) if x >= 1 => Ok(x),
                _ => Err(Error::parse(line_no, column, format!("invalid node id {s:?} (ids start at 1)"))),
            }
        };
        let column_v = raw.find(v).map_or(1, |c| c + 1);
        let (u, v) = (id(u, raw.find(u).map_or(1, |c| c + 1))?, id(v, column_v)?);
        if u == v {
            return Err(Error::parse(line_no, 1, format!("self-loop at node {u}")));
        }
        pairs.push((u - 1, v - 1));
    }
    let used = pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let nodes = match declared {
        Some(n) if n < used => {
            return Err(Error::parse(0, 0, format!("node id {used} exceeds the declared count {n}")));
        }
        Some(n) => n,
        None => used,
    };
    SimpleDigraph::new(nodes, pairs)
}

pub fn format_edge_list(g: &SimpleDigraph) -> String {
    let mut out = format!("nodes {}\n", g.node_count());
    for (u, v) in g.arcs() {
        writeln!(out, "{} {}", u + 1, v + 1).expect("writing to a string");
    }
    out
}

/// DIMACS CNF: `c` comment lines, a `p cnf n m` header, then clauses as
/// signed integers each terminated by `0`.
pub fn parse_dimacs_cnf(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, 1, "duplicate problem line"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields[..] {
                ["p", "cnf", n, m] => n.parse().ok().zip(m.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| Error::parse(line_no, 1, "expected `p cnf <variables> <clauses>`"))?);
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::parse(line_no, 1, "clause before the `p cnf` header"));
        };
        for token in line.split_whitespace() {
            let column = raw.find(token).map_or(1, |c| c + 1);
            let value: i32 = token
                .parse()
                .map_err(|_| Error::parse(line_no, column, format!("invalid literal {token:?}")))?;
            if value == 0 {
                if current.is_empty() {
                    return Err(Error::parse(line_no, column, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let lit = Literal::from_dimacs(value).expect("nonzero");
            if lit.var() > n {
                return Err(Error::parse(
                    line_no,
                    column,
                    format!("variable {} exceeds the declared count {n}", lit.var()),
                ));
            }
            if current.is_empty() {
                current_line = line_no;
            }
            current.push(lit);
            if current.len() > MAX_CLAUSE_LEN {
                return Err(Error::parse(
                    current_line,
                    1,
                    format!("clause {} has more than {MAX_CLAUSE_LEN} literals", clauses.len() + 1),
                ));
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(Error::parse(0, 0, "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(Error::parse(current_line, 1, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::parse(0, 0, format!("header declares {m} clauses, found {}", clauses.len())));
    }
    CnfFormula::new(n, clauses)
}

pub fn format_dimacs(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.variable_count(), f.clause_count());
    for clause in f.clauses() {
        for lit in clause {
            write!(out, "{} ", lit.dimacs()).expect("writing to a string");
        }
        out.push_str("0\n");
    }
    out
}
