use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use mif_core::graph::check_capacity_feasible;
use mif_core::intersection::{in_flow_polyhedron, max_independent_value, sink_select as rank_sinks};
use mif_core::sfm::SlackTable;
use mif_core::solver::local_capacities;
use mif_core::source::{polyhedron_member, slepian_wolf_feasible, validate_oracle, Membership, Violation};
use mif_core::{
    auxiliary::build_auxiliary, rate_vector, solve_imif, solve_mif, Digraph, Flow, NodeId, Rational, SolveResult,
};
use mif_distsim::{run_distributed, MessageKind, SimConfig, SimStats};

use crate::dot;
use crate::error::{CliError, ExitStatus};
use crate::files::{self, FlowSource, Replay, TraceDoc};
use crate::instance::Instance;

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Instance::from_json(&read_file(path)?).map_err(|e| CliError {
        message: format!("{}: {}", path.display(), e.message),
        ..e
    })
}

/// `(a, b, c)` in source order.
pub fn format_vector(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(Rational::to_string).collect();
    format!("({})", parts.join(", "))
}

fn format_flow(out: &mut String, g: &Digraph, f: &Flow) {
    out.push_str("flow:\n");
    for (id, e) in g.edges().iter().enumerate() {
        writeln!(
            out,
            "  {} -> {}  {}/{}",
            g.name(e.tail),
            g.name(e.head),
            f.get(id),
            e.capacity
        )
        .unwrap();
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub integral: bool,
    pub distributed: bool,
    /// Keep the per-delivery message log of a distributed run.
    pub record_log: bool,
}

#[derive(Debug, Clone)]
pub struct Solved {
    pub result: SolveResult,
    pub stats: Option<SimStats>,
    pub report: String,
    pub trace: TraceDoc,
}

pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<Solved, CliError> {
    let g = &inst.graph;
    let labels = inst.source_labels();
    let core = |e| CliError::from_core(e, &labels);
    let oracle = inst.oracle()?;
    validate_oracle(&oracle).map_err(core)?;
    let (result, stats) = match (opts.integral, opts.distributed) {
        (true, true) => {
            return Err(CliError::input(
                "--distributed runs the fractional solver; drop --integral",
            ))
        }
        (true, false) => (solve_imif(g, &oracle).map_err(core)?, None),
        (false, false) => (solve_mif(g, &oracle, &Flow::zero(g)).map_err(core)?, None),
        (false, true) => {
            let config = SimConfig {
                record_log: opts.record_log,
            };
            let (r, s) = run_distributed(g, &oracle, &config).map_err(core)?;
            (r, Some(s))
        }
    };

    let mut out = String::new();
    writeln!(out, "value: {}", result.value).unwrap();
    writeln!(out, "termination: {}", result.termination.as_str()).unwrap();
    writeln!(out, "iterations: {}", result.trace.len()).unwrap();
    writeln!(out, "sources: ({})", labels.join(", ")).unwrap();
    writeln!(out, "rates: {}", format_vector(result.rates.as_slice())).unwrap();
    format_flow(&mut out, g, &result.flow);
    if let Some(s) = &stats {
        out.push_str("simulation:\n");
        writeln!(out, "  rounds: {}", s.rounds).unwrap();
        for kind in MessageKind::ALL {
            writeln!(out, "  {}: {}", kind.as_str(), s.messages.get(kind)).unwrap();
        }
        let calls: Vec<String> = s
            .sfm_calls
            .iter()
            .enumerate()
            .map(|(v, c)| format!("{}={c}", g.name(NodeId(v))))
            .collect();
        writeln!(out, "  sfm calls: {}", calls.join(" ")).unwrap();
    }
    let trace = files::trace_doc(g, &result, opts.integral, stats.as_ref());
    Ok(Solved {
        result,
        stats,
        report: out,
        trace,
    })
}

fn describe(g: &Digraph, v: &Violation, relation: &str, bound_name: &str) -> String {
    let set = g.format_set(v.set);
    match v.kind {
        mif_core::source::BoundKind::NonNegative => format!("x({set}) = {} is negative", v.value),
        _ => format!("x({set}) = {} {relation} {bound_name}({set}) = {}", v.value, v.bound),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verified {
    pub report: String,
    pub status: ExitStatus,
}

/// Checks a flow against the instance. Slepian-Wolf is reported, and only
/// counts as a failure when `require_slepian_wolf` is set.
pub fn verify(inst: &Instance, flow_text: &str, require_slepian_wolf: bool) -> Result<Verified, CliError> {
    let g = &inst.graph;
    let labels = inst.source_labels();
    let oracle = inst.oracle()?;
    validate_oracle(&oracle).map_err(|e| CliError::from_core(e, &labels))?;
    let source = files::read_flow_or_trace(g, flow_text)?;
    let f = source.flow();
    let x = rate_vector(g, f);
    let mut out = String::new();
    let mut ok = true;

    writeln!(out, "rates: {}", format_vector(x.as_slice())).unwrap();
    writeln!(out, "value: {}", x.total()).unwrap();

    let violations = check_capacity_feasible(g, f);
    if violations.is_empty() {
        out.push_str("capacity: ok\n");
    } else {
        ok = false;
        for v in violations {
            let e = g.edge(v.edge);
            writeln!(
                out,
                "capacity: FAIL f({},{}) = {} outside [0, {}]",
                g.name(e.tail),
                g.name(e.head),
                v.value,
                v.capacity
            )
            .unwrap();
        }
    }

    let err = |e| CliError::from_core(e, &labels);
    match polyhedron_member(&oracle, &x).map_err(err)? {
        Membership::Inside => out.push_str("source polyhedron: ok\n"),
        Membership::Outside(v) => {
            ok = false;
            writeln!(out, "source polyhedron: FAIL {}", describe(g, &v, ">", "H")).unwrap();
        }
    }
    match in_flow_polyhedron(g, &x).map_err(err)? {
        Membership::Inside => out.push_str("flow polyhedron: ok\n"),
        Membership::Outside(v) => {
            ok = false;
            writeln!(out, "flow polyhedron: FAIL {}", describe(g, &v, ">", "f")).unwrap();
        }
    }
    let sw = slepian_wolf_feasible(&oracle, &x).map_err(err)?;
    match sw.membership.violation() {
        None => out.push_str("slepian-wolf: ok\n"),
        Some(v) => {
            if require_slepian_wolf {
                ok = false;
            }
            let tag = if require_slepian_wolf { "FAIL" } else { "not met" };
            let set = g.format_set(v.set);
            writeln!(
                out,
                "slepian-wolf: {tag} x({set}) = {} < H({set} | rest) = {}",
                v.value, v.bound
            )
            .unwrap();
        }
    }
    if let FlowSource::Trace { doc, .. } = &source {
        match files::replay(g, doc)? {
            Replay::Consistent => out.push_str("replay: ok\n"),
            Replay::Mismatch(0) => {
                ok = false;
                out.push_str("replay: FAIL final flow differs from the replayed augmentations\n");
            }
            Replay::Mismatch(i) => {
                ok = false;
                writeln!(out, "replay: FAIL flow after iteration {i} differs").unwrap();
            }
            Replay::Invalid(msg) => {
                ok = false;
                writeln!(out, "replay: FAIL {msg}").unwrap();
            }
        }
    }
    Ok(Verified {
        report: out,
        status: if ok {
            ExitStatus::Success
        } else {
            ExitStatus::CheckFailed
        },
    })
}

pub fn max_value(inst: &Instance) -> Result<String, CliError> {
    let labels = inst.source_labels();
    let oracle = inst.oracle()?;
    validate_oracle(&oracle).map_err(|e| CliError::from_core(e, &labels))?;
    let (value, witness) = max_independent_value(&inst.graph, &oracle).map_err(|e| CliError::from_core(e, &labels))?;
    Ok(format!("value: {value}\nwitness: {}\n", inst.graph.format_set(witness)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportMode {
    Dot,
    Auxiliary,
    Json,
}

pub fn export(inst: &Instance, flow_text: Option<&str>, mode: ExportMode) -> Result<String, CliError> {
    let g = &inst.graph;
    let flow = flow_text
        .map(|t| files::read_flow_or_trace(g, t).map(|s| s.flow().clone()))
        .transpose()?;
    match mode {
        ExportMode::Json => Ok(inst.to_json()),
        ExportMode::Dot => Ok(dot::network(g, flow.as_ref())),
        ExportMode::Auxiliary => {
            let labels = inst.source_labels();
            let err = |e| CliError::from_core(e, &labels);
            let f = flow.unwrap_or_else(|| Flow::zero(g));
            let oracle = inst.oracle()?;
            validate_oracle(&oracle).map_err(err)?;
            let x = rate_vector(g, &f);
            if !check_capacity_feasible(g, &f).is_empty() || !polyhedron_member(&oracle, &x).map_err(err)?.is_inside() {
                return Err(CliError::input("auxiliary digraph needs a feasible flow"));
            }
            let table = SlackTable::new(&oracle, &x).map_err(err)?;
            let mut deps = BTreeMap::new();
            for pos in 0..g.source_count() {
                if let Some(info) = local_capacities(g.sources(), &table, &x, pos).dependence {
                    deps.insert(g.source_at(pos), info);
                }
            }
            Ok(dot::auxiliary(g, &build_auxiliary(g, &f, &deps)))
        }
    }
}

/// Ranked candidate sinks; `candidates` overrides the instance's list, and
/// every node is a candidate when neither names any.
pub fn sink_select(inst: &Instance, candidates: &[String]) -> Result<String, CliError> {
    let g = &inst.graph;
    let model = inst.all_node_model()?;
    let all_labels: Vec<String> = g.names().to_vec();
    validate_oracle(model).map_err(|e| CliError::from_core(e, &all_labels))?;
    let chosen: Vec<NodeId> = if !candidates.is_empty() {
        candidates
            .iter()
            .map(|l| {
                g.node_by_name(l)
                    .ok_or_else(|| CliError::input(format!("unknown candidate {l:?}")))
            })
            .collect::<Result<_, _>>()?
    } else if !inst.candidates.is_empty() {
        inst.candidates.clone()
    } else {
        (0..g.node_count()).map(NodeId).collect()
    };
    let ranked = rank_sinks(g, model, &chosen).map_err(|e| CliError::from_core(e, &all_labels))?;
    let mut out = String::from("rank  node  value\n");
    for (k, (v, value)) in ranked.iter().enumerate() {
        writeln!(out, "{:<4}  {:<4}  {}", k + 1, g.name(*v), value).unwrap();
    }
    Ok(out)
}
