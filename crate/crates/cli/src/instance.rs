//! The `mif-instance/1` JSON format: digraph, sink, and source model in one
//! file.
//!
//! ```json
//! {
//!   "format": "mif-instance/1",
//!   "nodes": ["1", "2", "t"],
//!   "sink": "t",
//!   "edges": [{ "tail": "1", "head": "t", "capacity": "3/5" }],
//!   "source": {
//!     "bits": [{ "name": "a", "entropy": "0.2" }],
//!     "observes": { "1": ["a"], "2": ["a"] }
//!   },
//!   "candidates": ["t"]
//! }
//! ```
//!
//! Instead of `source`, an `entropy_table` may map comma-joined source labels
//! to `H` values (`""` is the empty set and defaults to 0). Numbers are exact:
//! strings such as `"0.6"` or `"3/5"`, or JSON integers.

use std::collections::BTreeMap;

use mif_core::source::{Bit, BitSharingSource, EntropyTable, Restricted, BRUTE_FORCE_LIMIT};
use mif_core::{Digraph, Edge, EntropyOracle, NodeId, Rational, SourceSet};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const INSTANCE_FORMAT: &str = "mif-instance/1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    format: String,
    nodes: Vec<String>,
    sink: String,
    edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<SourceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entropy_table: Option<BTreeMap<String, Rational>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    candidates: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    tail: String,
    head: String,
    capacity: Rational,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceDoc {
    bits: Vec<BitDoc>,
    observes: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BitDoc {
    name: String,
    entropy: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceModel {
    /// Bits observed by any node, sink included; positions are node indices.
    Bits(BitSharingSource),
    /// `H` over the sources, by source position.
    Table(EntropyTable),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Digraph,
    pub model: SourceModel,
    pub candidates: Vec<NodeId>,
}

fn node(g: &Digraph, label: &str) -> Result<NodeId, CliError> {
    g.node_by_name(label)
        .ok_or_else(|| CliError::input(format!("unknown node {label:?}")))
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let doc: InstanceDoc =
            serde_json::from_str(text).map_err(|e| CliError::input(format!("invalid instance: {e}")))?;
        if doc.format != INSTANCE_FORMAT {
            return Err(CliError::input(format!(
                "unsupported instance format {:?}, expected {INSTANCE_FORMAT:?}",
                doc.format
            )));
        }
        let labels = doc.nodes.clone();
        let sink = labels
            .iter()
            .position(|l| *l == doc.sink)
            .ok_or_else(|| CliError::input(format!("sink {:?} is not a node", doc.sink)))?;
        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in &doc.edges {
            let find = |l: &str| {
                labels
                    .iter()
                    .position(|x| x == l)
                    .map(NodeId)
                    .ok_or_else(|| CliError::input(format!("edge endpoint {l:?} is not a node")))
            };
            edges.push(Edge {
                tail: find(&e.tail)?,
                head: find(&e.head)?,
                capacity: e.capacity,
            });
        }
        let graph = Digraph::new(labels, NodeId(sink), edges).map_err(|e| CliError::from_core(e, &[]))?;

        let model = match (doc.source, doc.entropy_table) {
            (Some(src), None) => SourceModel::Bits(parse_bits(&graph, src)?),
            (None, Some(table)) => SourceModel::Table(parse_table(&graph, table)?),
            _ => {
                return Err(CliError::input(
                    "instance needs exactly one of \"source\" and \"entropy_table\"",
                ))
            }
        };
        let candidates = doc
            .candidates
            .iter()
            .map(|l| node(&graph, l))
            .collect::<Result<_, _>>()?;
        Ok(Instance {
            graph,
            model,
            candidates,
        })
    }

    pub fn to_json(&self) -> String {
        let g = &self.graph;
        let (source, entropy_table) = match &self.model {
            SourceModel::Bits(b) => {
                let mut observes = BTreeMap::new();
                for v in 0..g.node_count() {
                    let seen = b.observed(v);
                    if !seen.is_empty() {
                        observes.insert(
                            g.name(NodeId(v)).to_string(),
                            seen.iter().map(|&k| b.bits()[k].name.clone()).collect(),
                        );
                    }
                }
                let bits = b
                    .bits()
                    .iter()
                    .map(|bit| BitDoc {
                        name: bit.name.clone(),
                        entropy: bit.entropy,
                    })
                    .collect();
                (Some(SourceDoc { bits, observes }), None)
            }
            SourceModel::Table(t) => {
                let values = t.table();
                let map = SourceSet::all_subsets(g.source_count())
                    .map(|s| {
                        let key: Vec<&str> = g.set_nodes(s).into_iter().map(|v| g.name(v)).collect();
                        (key.join(","), values[s.0 as usize])
                    })
                    .collect();
                (None, Some(map))
            }
        };
        let doc = InstanceDoc {
            format: INSTANCE_FORMAT.to_string(),
            nodes: g.names().to_vec(),
            sink: g.name(g.sink()).to_string(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    tail: g.name(e.tail).to_string(),
                    head: g.name(e.head).to_string(),
                    capacity: e.capacity,
                })
                .collect(),
            source,
            entropy_table,
            candidates: self.candidates.iter().map(|&v| g.name(v).to_string()).collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("instance serializes");
        text.push('\n');
        text
    }

    /// Labels of the sources, by position.
    pub fn source_labels(&self) -> Vec<String> {
        self.graph
            .sources()
            .iter()
            .map(|&v| self.graph.name(v).to_string())
            .collect()
    }

    /// `H` over the sources, tabulated.
    pub fn oracle(&self) -> Result<EntropyTable, CliError> {
        let table = match &self.model {
            SourceModel::Bits(b) => {
                let keep = self.graph.sources().iter().map(|v| v.0).collect();
                let r = Restricted::new(b, keep).map_err(|e| CliError::from_core(e, &[]))?;
                EntropyTable::of(&r)
            }
            SourceModel::Table(t) => Ok(t.clone()),
        };
        table.map_err(|e| CliError::from_core(e, &self.source_labels()))
    }

    /// `H` over every node, as needed when the sink is not fixed.
    pub fn all_node_model(&self) -> Result<&BitSharingSource, CliError> {
        match &self.model {
            SourceModel::Bits(b) => Ok(b),
            SourceModel::Table(_) => Err(CliError::input(
                "sink selection needs a bit-sharing \"source\" model covering every node",
            )),
        }
    }
}

fn parse_bits(g: &Digraph, doc: SourceDoc) -> Result<BitSharingSource, CliError> {
    let mut index = BTreeMap::new();
    for (k, b) in doc.bits.iter().enumerate() {
        if index.insert(b.name.as_str(), k).is_some() {
            return Err(CliError::input(format!("duplicate bit name {:?}", b.name)));
        }
    }
    let mut observes = vec![Vec::new(); g.node_count()];
    for (label, bits) in &doc.observes {
        let v = node(g, label)?;
        for name in bits {
            let k = *index
                .get(name.as_str())
                .ok_or_else(|| CliError::input(format!("node {label:?} observes unknown bit {name:?}")))?;
            observes[v.0].push(k);
        }
    }
    let bits = doc
        .bits
        .into_iter()
        .map(|b| Bit {
            name: b.name,
            entropy: b.entropy,
        })
        .collect();
    BitSharingSource::new(bits, observes).map_err(|e| CliError::input(e.to_string()))
}

fn parse_table(g: &Digraph, table: BTreeMap<String, Rational>) -> Result<EntropyTable, CliError> {
    let n = g.source_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(CliError::input(format!(
            "entropy table over {n} sources exceeds the limit of {BRUTE_FORCE_LIMIT}"
        )));
    }
    let mut values: Vec<Option<Rational>> = vec![None; 1 << n];
    values[0] = Some(Rational::ZERO);
    let mut empty_given = false;
    for (key, value) in table {
        let mut set = SourceSet::EMPTY;
        for label in key.split(',').map(str::trim).filter(|l| !l.is_empty()) {
            let v = node(g, label)?;
            let p = g
                .position(v)
                .ok_or_else(|| CliError::input(format!("entropy table key {key:?} names the sink")))?;
            if set.contains(p) {
                return Err(CliError::input(format!("entropy table key {key:?} repeats {label:?}")));
            }
            set = set.with(p);
        }
        let slot = &mut values[set.0 as usize];
        if set.is_empty() {
            if empty_given {
                return Err(CliError::input("entropy table lists the empty set twice"));
            }
            empty_given = true;
        } else if slot.is_some() {
            return Err(CliError::input(format!(
                "entropy table lists {} twice",
                g.format_set(set)
            )));
        }
        *slot = Some(value);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(mask, v)| {
            v.ok_or_else(|| {
                CliError::input(format!(
                    "entropy table is missing H({})",
                    g.format_set(SourceSet(mask as u64))
                ))
            })
        })
        .collect::<Result<_, _>>()?;
    EntropyTable::new(n, values).map_err(|e| CliError::input(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: &str = r#"{
        "format": "mif-instance/1",
        "nodes": ["a", "b", "t"],
        "sink": "t",
        "edges": [{"tail": "a", "head": "t", "capacity": 1}, {"tail": "b", "head": "t", "capacity": "1/2"}],
        "entropy_table": {"a": "1", "b": "1", "b,a": "1.5"}
    }"#;

    #[test]
    fn entropy_tables_accept_any_key_order() {
        let inst = Instance::from_json(TABLE).unwrap();
        let o = inst.oracle().unwrap();
        assert_eq!(o.value(SourceSet::full(2)), Rational::new(3, 2));
        assert_eq!(o.value(SourceSet::EMPTY), Rational::ZERO);
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn schema_errors() {
        let cases = [
            TABLE.replace("mif-instance/1", "mif-instance/2"),
            TABLE.replace("\"1/2\"", "0.5"),
            TABLE.replace("\"b,a\": \"1.5\"", "\"a,b,a\": \"1.5\""),
            TABLE.replace(", \"b,a\": \"1.5\"", ""),
            TABLE.replace("\"sink\": \"t\"", "\"sink\": \"u\""),
            TABLE.replace("\"entropy_table\"", "\"extra\": 1, \"entropy_table\""),
            TABLE.replace("\"a\": \"1\"", "\"t\": \"1\""),
        ];
        for text in cases {
            let err = Instance::from_json(&text).unwrap_err();
            assert_eq!(err.status, crate::error::ExitStatus::Input, "{text}");
        }
    }
}
