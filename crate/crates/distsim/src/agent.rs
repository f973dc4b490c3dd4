use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use mif_core::sfm::SlackTable;
use mif_core::solver::local_capacities;
use mif_core::{ArcKind, AugmentingPath, AuxArc, DependenceInfo, EdgeId, NodeId, RateVector, Rational};

use crate::message::{Envelope, FloodId, Message, Payload, Routing};

/// An agent's copy of one incident edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalEdge {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: Rational,
    pub flow: Rational,
}

/// Knowledge every agent receives at start-up: the source set, the entropy
/// table of the model, and the size of the network.
#[derive(Debug, Clone)]
pub struct Descriptor {
    pub sources: Arc<[NodeId]>,
    pub entropy: Arc<[Rational]>,
    pub node_count: usize,
    pub sink: NodeId,
}

type Report = (Rational, Option<DependenceInfo>);
type Probe = (Vec<AuxArc>, Option<Rational>);

#[derive(Debug, Clone)]
pub struct Agent {
    id: NodeId,
    position: Option<usize>,
    shared: Descriptor,
    neighbors: BTreeSet<NodeId>,
    edges: BTreeMap<EdgeId, LocalEdge>,
    replica: RateVector,
    sfm_calls: usize,
    serial: u64,
    seen: BTreeSet<FloodId>,

    // Per-iteration state.
    reports: BTreeMap<NodeId, Report>,
    out_arcs: Vec<AuxArc>,
    visited: BTreeSet<NodeId>,
    arrivals: BTreeMap<NodeId, Probe>,
    frontier: Vec<(NodeId, Probe)>,
    levels_closed: usize,
    decision: Option<Option<(AugmentingPath, Rational)>>,
    applied: bool,
}

impl Agent {
    pub fn new(
        id: NodeId,
        shared: Descriptor,
        neighbors: BTreeSet<NodeId>,
        edges: BTreeMap<EdgeId, LocalEdge>,
    ) -> Self {
        let position = shared.sources.iter().position(|&s| s == id);
        let replica = RateVector::zero(shared.sources.len());
        Agent {
            id,
            position,
            shared,
            neighbors,
            edges,
            replica,
            sfm_calls: 0,
            serial: 0,
            seen: BTreeSet::new(),
            reports: BTreeMap::new(),
            out_arcs: Vec::new(),
            visited: BTreeSet::new(),
            arrivals: BTreeMap::new(),
            frontier: Vec::new(),
            levels_closed: 0,
            decision: None,
            applied: false,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn replica(&self) -> &RateVector {
        &self.replica
    }

    pub fn edges(&self) -> &BTreeMap<EdgeId, LocalEdge> {
        &self.edges
    }

    pub fn sfm_calls(&self) -> usize {
        self.sfm_calls
    }

    pub fn reports(&self) -> &BTreeMap<NodeId, Report> {
        &self.reports
    }

    pub fn out_arcs(&self) -> &[AuxArc] {
        &self.out_arcs
    }

    pub fn decision(&self) -> Option<&Option<(AugmentingPath, Rational)>> {
        self.decision.as_ref()
    }

    fn is_sink(&self) -> bool {
        self.id == self.shared.sink
    }

    /// True once the replica says every bit of source entropy is delivered.
    pub fn sees_total_entropy(&self) -> bool {
        let total = *self.shared.entropy.last().expect("entropy table is nonempty");
        self.replica.total() == total
    }

    fn flood(&mut self, dest: Option<NodeId>, payload: Payload) -> Vec<Envelope> {
        let id = FloodId {
            origin: self.id,
            serial: self.serial,
        };
        self.serial += 1;
        self.seen.insert(id);
        let message = Message {
            routing: Routing::Flood { id, dest },
            payload,
        };
        self.neighbors
            .iter()
            .map(|&to| Envelope {
                from: self.id,
                to,
                message: message.clone(),
            })
            .collect()
    }

    /// One hop if `to` is a neighbour, otherwise a flood addressed to `to`.
    fn send(&mut self, to: NodeId, payload: Payload) -> Vec<Envelope> {
        if self.neighbors.contains(&to) {
            vec![Envelope {
                from: self.id,
                to,
                message: Message {
                    routing: Routing::Direct,
                    payload,
                },
            }]
        } else {
            self.flood(Some(to), payload)
        }
    }

    /// Computes the node's own capacities from its replica and floods them.
    pub fn begin_iteration(&mut self) -> Vec<Envelope> {
        self.reports.clear();
        self.out_arcs.clear();
        self.visited.clear();
        self.arrivals.clear();
        self.frontier.clear();
        self.seen.clear();
        self.levels_closed = 0;
        self.decision = None;
        self.applied = false;
        let Some(pos) = self.position else {
            return Vec::new();
        };
        let table = SlackTable::from_entropy(&self.shared.entropy, &self.replica);
        let local = local_capacities(&self.shared.sources, &table, &self.replica, pos);
        self.sfm_calls += local.sfm_calls;
        self.reports
            .insert(self.id, (local.saturation, local.dependence.clone()));
        self.flood(
            None,
            Payload::CapacityReport {
                origin: self.id,
                saturation: local.saturation,
                dependence: local.dependence,
            },
        )
    }

    pub fn handle(&mut self, from: NodeId, message: Message) -> Vec<Envelope> {
        let mut out = Vec::new();
        if let Routing::Flood { id, dest } = message.routing {
            if !self.seen.insert(id) {
                return out;
            }
            if dest != Some(self.id) {
                for &to in self.neighbors.iter().filter(|&&n| n != from) {
                    out.push(Envelope {
                        from: self.id,
                        to,
                        message: message.clone(),
                    });
                }
            }
            if dest.is_some_and(|d| d != self.id) {
                return out;
            }
        }
        out.extend(self.consume(message.payload));
        out
    }

    fn consume(&mut self, payload: Payload) -> Vec<Envelope> {
        match payload {
            Payload::CapacityReport {
                origin,
                saturation,
                dependence,
            } => {
                self.reports.insert(origin, (saturation, dependence));
                Vec::new()
            }
            Payload::PathProbe {
                source,
                arcs,
                bottleneck,
            } => {
                if self.visited.contains(&source) {
                    return Vec::new();
                }
                let nodes = |a: &[AuxArc]| a.iter().map(|x| x.head).collect::<Vec<_>>();
                let better = match self.arrivals.get(&source) {
                    None => true,
                    Some((best, _)) => nodes(&arcs) < nodes(best),
                };
                if better {
                    self.arrivals.insert(source, (arcs, bottleneck));
                }
                Vec::new()
            }
            Payload::PathReport { chosen } => {
                self.decision = Some(chosen);
                Vec::new()
            }
            Payload::AugmentCommit { path, beta, hop } => self.commit_hop(path, beta, hop),
        }
    }

    /// Out-arcs of this node in the auxiliary digraph: residual arcs of its
    /// incident edges and dependence arcs announced by saturated sources.
    pub fn build_out_arcs(&mut self) {
        let mut arcs = Vec::new();
        for (&id, e) in &self.edges {
            if e.tail == self.id && e.flow < e.capacity {
                arcs.push(AuxArc {
                    tail: self.id,
                    head: e.head,
                    kind: ArcKind::Forward,
                    capacity: Some(e.capacity - e.flow),
                    edge: Some(id),
                });
            }
            if e.head == self.id && e.flow.is_positive() {
                arcs.push(AuxArc {
                    tail: self.id,
                    head: e.tail,
                    kind: ArcKind::Backward,
                    capacity: Some(e.flow),
                    edge: Some(id),
                });
            }
        }
        for (&i, (_, dep)) in &self.reports {
            let Some(info) = dep else { continue };
            for &(j, cap) in &info.exchange {
                if j == self.id && j != i && cap.is_positive() {
                    arcs.push(AuxArc {
                        tail: self.id,
                        head: i,
                        kind: ArcKind::Dependence,
                        capacity: Some(cap),
                        edge: None,
                    });
                }
            }
        }
        arcs.sort_by_key(|a| (a.head, a.kind));
        self.out_arcs = arcs;
    }

    /// Sends probes one level further. At level 1 unsaturated sources start
    /// their own search.
    pub fn expand(&mut self, level: usize) -> Vec<Envelope> {
        if level == 1 {
            let unsaturated = self.reports.get(&self.id).is_some_and(|(sat, _)| sat.is_positive());
            if unsaturated {
                self.visited.insert(self.id);
                self.frontier.push((self.id, (Vec::new(), None)));
            }
        }
        if self.is_sink() {
            self.frontier.clear();
            return Vec::new();
        }
        let mut heads: Vec<AuxArc> = Vec::new();
        for arc in &self.out_arcs {
            if heads.last().is_none_or(|prev| prev.head != arc.head) {
                heads.push(arc.clone());
            }
        }
        let mut out = Vec::new();
        for (source, (arcs, bottleneck)) in std::mem::take(&mut self.frontier) {
            for arc in &heads {
                let mut next = arcs.clone();
                next.push(arc.clone());
                let b = match (bottleneck, arc.capacity) {
                    (Some(a), Some(c)) => Some(a.min(c)),
                    (a, c) => a.or(c),
                };
                out.extend(self.send(
                    arc.head,
                    Payload::PathProbe {
                        source,
                        arcs: next,
                        bottleneck: b,
                    },
                ));
            }
        }
        out
    }

    /// Settles the probes that arrived during the level. The sink decides
    /// as soon as any search reaches it, or after the longest possible
    /// simple path has been explored.
    pub fn close_level(&mut self) -> Vec<Envelope> {
        self.levels_closed += 1;
        let arrivals = std::mem::take(&mut self.arrivals);
        for source in arrivals.keys() {
            self.visited.insert(*source);
        }
        if !self.is_sink() {
            self.frontier.extend(arrivals);
            return Vec::new();
        }
        if self.decision.is_some() {
            return Vec::new();
        }
        // Sources are numbered in position order, so the first key wins.
        let chosen = arrivals.into_iter().next().map(|(source, (arcs, bottleneck))| {
            let own = self.reports[&source].0;
            let beta = bottleneck.map_or(own, |b| b.min(own));
            (AugmentingPath { source, arcs }, beta)
        });
        if chosen.is_none() && self.levels_closed < self.shared.node_count - 1 {
            return Vec::new();
        }
        self.decision = Some(chosen.clone());
        self.flood(None, Payload::PathReport { chosen })
    }

    /// Applies the decided augmentation to the replica; the chosen source
    /// also starts the commit along the path.
    pub fn begin_commit(&mut self) -> Vec<Envelope> {
        let Some(Some((path, beta))) = self.decision.clone() else {
            return Vec::new();
        };
        if !self.applied {
            self.applied = true;
            for arc in path.arcs.iter().filter(|a| a.kind != ArcKind::Dependence) {
                for (node, delta) in [(arc.tail, beta), (arc.head, -beta)] {
                    if let Some(p) = self.shared.sources.iter().position(|&s| s == node) {
                        self.replica.set(p, self.replica.get(p) + delta);
                    }
                }
            }
        }
        if path.source == self.id {
            self.commit_hop(path, beta, 0)
        } else {
            Vec::new()
        }
    }

    fn apply(&mut self, arc: &AuxArc, beta: Rational) {
        let delta = match arc.kind {
            ArcKind::Forward => beta,
            ArcKind::Backward => -beta,
            ArcKind::Dependence => return,
        };
        let id = arc.edge.expect("residual arc carries its edge");
        let edge = self
            .edges
            .get_mut(&id)
            .unwrap_or_else(|| panic!("agent {} tried to write non-incident edge {id}", arc.tail));
        edge.flow += delta;
    }

    fn commit_hop(&mut self, path: AugmentingPath, beta: Rational, hop: usize) -> Vec<Envelope> {
        let nodes = path.nodes();
        assert_eq!(nodes[hop], self.id, "commit delivered to the wrong node");
        if hop > 0 {
            self.apply(&path.arcs[hop - 1], beta);
        }
        if hop == path.arcs.len() {
            return Vec::new();
        }
        self.apply(&path.arcs[hop], beta);
        let next = nodes[hop + 1];
        self.send(
            next,
            Payload::AugmentCommit {
                path,
                beta,
                hop: hop + 1,
            },
        )
    }
}
