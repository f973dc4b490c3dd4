//! Synchronous message-passing simulation of the decentralized maximum
//! independent flow computation.
//!
//! Every node, the sink included, runs an [`Agent`] that sees only its
//! incident edges, a replica of the global rate vector, and the shared model
//! descriptor. One solver iteration is four phases, each run until the
//! network is quiet:
//!
//! 1. every source computes its own capacities and floods a `CapacityReport`;
//! 2. a level-synchronized search sends `PathProbe`s along auxiliary arcs;
//! 3. the sink floods the elected path in a `PathReport`;
//! 4. the chosen source sends an `AugmentCommit` hop by hop along the path.
//!
//! Messages move only along links of the undirected topology. Hops along a
//! dependence arc between non-adjacent nodes are flooded with a destination.

mod agent;
mod message;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use mif_core::source::BRUTE_FORCE_LIMIT;
use mif_core::{
    rate_vector, AuxiliaryGraph, Digraph, EntropyOracle, Error, Flow, IterationRecord, NodeId, Result, SolveResult,
    Termination,
};

pub use agent::{Agent, Descriptor, LocalEdge};
pub use message::{Envelope, FloodId, Message, MessageCounts, MessageKind, Payload, Routing};

#[derive(Debug, Clone, Default)]
pub struct SimConfig {
    /// Keep a per-delivery log in [`SimStats::log`].
    pub record_log: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LoggedMessage {
    pub round: u64,
    pub from: NodeId,
    pub to: NodeId,
    pub kind: MessageKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimStats {
    pub rounds: u64,
    pub messages: MessageCounts,
    /// Constrained minimizations performed by each node, by node index.
    pub sfm_calls: Vec<usize>,
    pub log: Vec<LoggedMessage>,
}

struct Network {
    agents: Vec<Agent>,
    links: BTreeSet<(NodeId, NodeId)>,
    in_flight: Vec<Envelope>,
    stats: SimStats,
    record_log: bool,
}

impl Network {
    fn post(&mut self, out: Vec<Envelope>) {
        for env in out {
            assert!(
                self.links.contains(&(env.from, env.to)),
                "message from {} to {} does not follow a link",
                env.from,
                env.to
            );
            self.stats.messages.bump(env.message.payload.kind());
            self.in_flight.push(env);
        }
    }

    fn round(&mut self) {
        self.stats.rounds += 1;
        let mut batch = std::mem::take(&mut self.in_flight);
        // Stable, so each link stays FIFO.
        batch.sort_by_key(|e| (e.to, e.from));
        for env in batch {
            if self.record_log {
                self.stats.log.push(LoggedMessage {
                    round: self.stats.rounds,
                    from: env.from,
                    to: env.to,
                    kind: env.message.payload.kind(),
                });
            }
            let out = self.agents[env.to.0].handle(env.from, env.message);
            self.post(out);
        }
        self.assert_replicas_agree();
    }

    fn settle(&mut self) {
        while !self.in_flight.is_empty() {
            self.round();
        }
    }

    fn phase(&mut self, mut step: impl FnMut(&mut Agent) -> Vec<Envelope>) {
        let mut out = Vec::new();
        for a in &mut self.agents {
            out.extend(step(a));
        }
        self.post(out);
        self.settle();
    }

    fn assert_replicas_agree(&self) {
        let first = self.agents[0].replica();
        for a in &self.agents[1..] {
            assert_eq!(a.replica(), first, "replica of {} diverged", a.id());
        }
    }

    /// Global flow from the agents' edge copies; both endpoints must agree.
    fn flow(&self, g: &Digraph) -> Flow {
        let values = g
            .edges()
            .iter()
            .enumerate()
            .map(|(id, e)| {
                let at_tail = self.agents[e.tail.0].edges()[&id].flow;
                let at_head = self.agents[e.head.0].edges()[&id].flow;
                assert_eq!(at_tail, at_head, "endpoints disagree on edge {id}");
                at_tail
            })
            .collect();
        Flow::from_values(g, values).expect("one value per edge")
    }
}

fn build_network(g: &Digraph, o: &dyn EntropyOracle, record_log: bool) -> Network {
    let shared = Descriptor {
        sources: Arc::from(g.sources()),
        entropy: Arc::from(o.table()),
        node_count: g.node_count(),
        sink: g.sink(),
    };
    let mut links = BTreeSet::new();
    for e in g.edges() {
        links.insert((e.tail, e.head));
        links.insert((e.head, e.tail));
    }
    let agents = (0..g.node_count())
        .map(|v| {
            let v = NodeId(v);
            let edges: BTreeMap<_, _> = g
                .incident_edges(v)
                .into_iter()
                .map(|id| {
                    let e = g.edge(id);
                    let local = LocalEdge {
                        tail: e.tail,
                        head: e.head,
                        capacity: e.capacity,
                        flow: mif_core::Rational::ZERO,
                    };
                    (id, local)
                })
                .collect();
            Agent::new(v, shared.clone(), g.neighbors(v).into_iter().collect(), edges)
        })
        .collect();
    Network {
        agents,
        links,
        in_flight: Vec::new(),
        stats: SimStats::default(),
        record_log,
    }
}

/// Runs the distributed protocol from the zero flow. The result, including
/// the iteration trace, is identical to the centralized solver's.
pub fn run_distributed(g: &Digraph, o: &dyn EntropyOracle, config: &SimConfig) -> Result<(SolveResult, SimStats)> {
    let n = g.source_count();
    if o.ground_size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: o.ground_size(),
        });
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::GroundSetTooLarge {
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut net = build_network(g, o, config.record_log);
    let limit = 64 * n.pow(3) + 1024;
    let mut trace = Vec::new();
    let termination = loop {
        let done = net.agents[0].sees_total_entropy();
        assert!(net.agents.iter().all(|a| a.sees_total_entropy() == done));
        if done {
            break Termination::ReachedTotalEntropy;
        }
        if trace.len() >= limit {
            return Err(Error::IterationLimit(trace.len()));
        }

        net.phase(Agent::begin_iteration);
        let reports = net.agents[0].reports().clone();
        assert_eq!(reports.len(), n, "capacity reports did not reach everyone");
        assert!(net.agents.iter().all(|a| *a.reports() == reports));
        for a in &mut net.agents {
            a.build_out_arcs();
        }

        let sink = g.sink().0;
        for level in 1..g.node_count() {
            net.phase(|a| a.expand(level));
            net.phase(Agent::close_level);
            if net.agents[sink].decision().is_some() {
                break;
            }
        }
        let decision = net.agents[sink]
            .decision()
            .cloned()
            .expect("sink decides within |V| levels");
        assert!(net.agents.iter().all(|a| a.decision() == Some(&decision)));
        let Some((path, beta)) = decision else {
            break Termination::NoAugmentingPath;
        };

        let auxiliary =
            AuxiliaryGraph::from_arcs(net.agents.iter().flat_map(|a| a.out_arcs().iter().cloned()).collect());
        let saturation = g.sources().iter().map(|s| reports[s].0).collect();
        net.phase(Agent::begin_commit);
        let flow_after = net.flow(g);
        let rates_after = rate_vector(g, &flow_after);
        assert_eq!(
            net.agents[0].replica(),
            &rates_after,
            "replicas miss the committed flow"
        );
        trace.push(IterationRecord {
            index: trace.len() + 1,
            source: path.source,
            path,
            beta,
            saturation,
            auxiliary,
            flow_after,
            rates_after,
        });
    };

    let flow = net.flow(g);
    let rates = rate_vector(g, &flow);
    let value = rates.total();
    net.stats.sfm_calls = net.agents.iter().map(Agent::sfm_calls).collect();
    let result = SolveResult {
        flow,
        rates,
        value,
        termination,
        trace,
    };
    Ok((result, net.stats))
}
