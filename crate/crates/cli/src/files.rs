//! `mif-flow/1` and `mif-trace/1` documents.

use std::collections::BTreeMap;

use mif_core::solver::augment;
use mif_core::{ArcKind, AugmentingPath, AuxArc, Digraph, Flow, IterationRecord, NodeId, Rational, SolveResult};
use mif_distsim::{MessageKind, SimStats};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FLOW_FORMAT: &str = "mif-flow/1";
pub const TRACE_FORMAT: &str = "mif-trace/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFlow {
    pub tail: String,
    pub head: String,
    pub flow: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeValue {
    pub node: String,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowDoc {
    pub format: String,
    pub flows: Vec<EdgeFlow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDoc {
    pub tail: String,
    pub head: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationDoc {
    pub index: usize,
    pub source: String,
    pub path: Vec<String>,
    pub arcs: Vec<ArcDoc>,
    pub beta: Rational,
    pub saturation: Vec<NodeValue>,
    pub rates: Vec<NodeValue>,
    pub flows: Vec<EdgeFlow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDoc {
    pub value: Rational,
    pub termination: String,
    pub rates: Vec<NodeValue>,
    pub flows: Vec<EdgeFlow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeliveryDoc {
    pub round: u64,
    pub from: String,
    pub to: String,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationDoc {
    pub rounds: u64,
    pub messages: BTreeMap<String, u64>,
    pub sfm_calls: Vec<NodeCount>,
    pub log: Vec<DeliveryDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeCount {
    pub node: String,
    pub calls: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDoc {
    pub format: String,
    pub algorithm: String,
    pub iterations: Vec<IterationDoc>,
    pub result: ResultDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationDoc>,
}

pub fn edge_flows(g: &Digraph, f: &Flow) -> Vec<EdgeFlow> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(id, e)| EdgeFlow {
            tail: g.name(e.tail).to_string(),
            head: g.name(e.head).to_string(),
            flow: f.get(id),
        })
        .collect()
}

fn node_values(g: &Digraph, values: &[Rational]) -> Vec<NodeValue> {
    g.sources()
        .iter()
        .zip(values)
        .map(|(&v, &value)| NodeValue {
            node: g.name(v).to_string(),
            value,
        })
        .collect()
}

fn lookup(g: &Digraph, label: &str) -> Result<NodeId, CliError> {
    g.node_by_name(label)
        .ok_or_else(|| CliError::input(format!("unknown node {label:?}")))
}

/// Builds a flow from per-edge entries; edges not listed carry no flow.
pub fn flow_from_entries(g: &Digraph, entries: &[EdgeFlow]) -> Result<Flow, CliError> {
    let mut f = Flow::zero(g);
    let mut given = vec![false; g.edges().len()];
    for e in entries {
        let (tail, head) = (lookup(g, &e.tail)?, lookup(g, &e.head)?);
        let id = g
            .edge_between(tail, head)
            .ok_or_else(|| CliError::input(format!("no edge ({}, {}) in the instance", e.tail, e.head)))?;
        if std::mem::replace(&mut given[id], true) {
            return Err(CliError::input(format!("flow on ({}, {}) given twice", e.tail, e.head)));
        }
        f.set(id, e.flow);
    }
    Ok(f)
}

pub fn flow_to_json(g: &Digraph, f: &Flow) -> String {
    let doc = FlowDoc {
        format: FLOW_FORMAT.to_string(),
        flows: edge_flows(g, f),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("flow serializes");
    text.push('\n');
    text
}

fn arc_doc(g: &Digraph, a: &AuxArc) -> ArcDoc {
    ArcDoc {
        tail: g.name(a.tail).to_string(),
        head: g.name(a.head).to_string(),
        kind: a.kind.as_str().to_string(),
        capacity: a.capacity,
    }
}

fn iteration_doc(g: &Digraph, rec: &IterationRecord) -> IterationDoc {
    IterationDoc {
        index: rec.index,
        source: g.name(rec.source).to_string(),
        path: rec.path.nodes().iter().map(|&v| g.name(v).to_string()).collect(),
        arcs: rec.path.arcs.iter().map(|a| arc_doc(g, a)).collect(),
        beta: rec.beta,
        saturation: node_values(g, &rec.saturation),
        rates: node_values(g, rec.rates_after.as_slice()),
        flows: edge_flows(g, &rec.flow_after),
    }
}

pub fn trace_doc(g: &Digraph, result: &SolveResult, integral: bool, stats: Option<&SimStats>) -> TraceDoc {
    let simulation = stats.map(|s| SimulationDoc {
        rounds: s.rounds,
        messages: MessageKind::ALL
            .iter()
            .map(|&k| (k.as_str().to_string(), s.messages.get(k)))
            .collect(),
        sfm_calls: s
            .sfm_calls
            .iter()
            .enumerate()
            .map(|(v, &calls)| NodeCount {
                node: g.name(NodeId(v)).to_string(),
                calls,
            })
            .collect(),
        log: s
            .log
            .iter()
            .map(|m| DeliveryDoc {
                round: m.round,
                from: g.name(m.from).to_string(),
                to: g.name(m.to).to_string(),
                kind: m.kind.as_str().to_string(),
            })
            .collect(),
    });
    TraceDoc {
        format: TRACE_FORMAT.to_string(),
        algorithm: if integral { "imif" } else { "mif" }.to_string(),
        iterations: result.trace.iter().map(|r| iteration_doc(g, r)).collect(),
        result: ResultDoc {
            value: result.value,
            termination: result.termination.as_str().to_string(),
            rates: node_values(g, result.rates.as_slice()),
            flows: edge_flows(g, &result.flow),
        },
        simulation,
    }
}

pub fn trace_to_json(doc: &TraceDoc) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("trace serializes");
    text.push('\n');
    text
}

/// A flow read from either a flow file or a trace file.
#[derive(Debug, Clone)]
pub enum FlowSource {
    Flow(Flow),
    Trace { doc: Box<TraceDoc>, flow: Flow },
}

impl FlowSource {
    pub fn flow(&self) -> &Flow {
        match self {
            FlowSource::Flow(f) | FlowSource::Trace { flow: f, .. } => f,
        }
    }
}

pub fn read_flow_or_trace(g: &Digraph, text: &str) -> Result<FlowSource, CliError> {
    #[derive(Deserialize)]
    struct Header {
        format: String,
    }
    let header: Header = serde_json::from_str(text).map_err(|e| CliError::input(format!("invalid flow file: {e}")))?;
    match header.format.as_str() {
        FLOW_FORMAT => {
            let doc: FlowDoc =
                serde_json::from_str(text).map_err(|e| CliError::input(format!("invalid flow file: {e}")))?;
            Ok(FlowSource::Flow(flow_from_entries(g, &doc.flows)?))
        }
        TRACE_FORMAT => {
            let doc: TraceDoc =
                serde_json::from_str(text).map_err(|e| CliError::input(format!("invalid trace file: {e}")))?;
            let flow = flow_from_entries(g, &doc.result.flows)?;
            Ok(FlowSource::Trace {
                doc: Box::new(doc),
                flow,
            })
        }
        other => Err(CliError::input(format!(
            "unsupported format {other:?}, expected {FLOW_FORMAT:?} or {TRACE_FORMAT:?}"
        ))),
    }
}

fn parse_kind(kind: &str) -> Result<ArcKind, CliError> {
    match kind {
        "forward" => Ok(ArcKind::Forward),
        "backward" => Ok(ArcKind::Backward),
        "dependence" => Ok(ArcKind::Dependence),
        other => Err(CliError::input(format!("unknown arc kind {other:?}"))),
    }
}

/// Result of re-applying every recorded augmentation from the zero flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Replay {
    Consistent,
    /// 1-based iteration whose recorded flow differs, or 0 for the final flow.
    Mismatch(usize),
    Invalid(String),
}

pub fn replay(g: &Digraph, doc: &TraceDoc) -> Result<Replay, CliError> {
    let mut f = Flow::zero(g);
    for it in &doc.iterations {
        let mut arcs = Vec::with_capacity(it.arcs.len());
        for a in &it.arcs {
            let (tail, head) = (lookup(g, &a.tail)?, lookup(g, &a.head)?);
            let kind = parse_kind(&a.kind)?;
            let edge = match kind {
                ArcKind::Forward => g.edge_between(tail, head),
                ArcKind::Backward => g.edge_between(head, tail),
                ArcKind::Dependence => None,
            };
            arcs.push(AuxArc {
                tail,
                head,
                kind,
                capacity: a.capacity,
                edge,
            });
        }
        let path = AugmentingPath {
            source: lookup(g, &it.source)?,
            arcs,
        };
        f = match augment(g, &f, &path, it.beta) {
            Ok(next) => next,
            Err(e) => return Ok(Replay::Invalid(format!("iteration {}: {e}", it.index))),
        };
        if f != flow_from_entries(g, &it.flows)? {
            return Ok(Replay::Mismatch(it.index));
        }
    }
    if f != flow_from_entries(g, &doc.result.flows)? {
        return Ok(Replay::Mismatch(0));
    }
    Ok(Replay::Consistent)
}
