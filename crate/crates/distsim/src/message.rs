use mif_core::{AugmentingPath, AuxArc, DependenceInfo, NodeId, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageKind {
    CapacityReport,
    PathProbe,
    PathReport,
    AugmentCommit,
}

impl MessageKind {
    pub const ALL: [MessageKind; 4] = [
        MessageKind::CapacityReport,
        MessageKind::PathProbe,
        MessageKind::PathReport,
        MessageKind::AugmentCommit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MessageKind::CapacityReport => "capacity-report",
            MessageKind::PathProbe => "path-probe",
            MessageKind::PathReport => "path-report",
            MessageKind::AugmentCommit => "augment-commit",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Per-kind message tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct MessageCounts([u64; 4]);

impl MessageCounts {
    pub fn get(&self, kind: MessageKind) -> u64 {
        self.0[kind.index()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub(crate) fn bump(&mut self, kind: MessageKind) {
        self.0[kind.index()] += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    /// A source's own saturation capacity and, when saturated, its dependence
    /// set with exchange capacities.
    CapacityReport {
        origin: NodeId,
        saturation: Rational,
        dependence: Option<DependenceInfo>,
    },
    /// Partial path of the search started at `source`, ending at the
    /// receiver.
    PathProbe {
        source: NodeId,
        arcs: Vec<AuxArc>,
        bottleneck: Option<Rational>,
    },
    /// The sink's decision for this iteration.
    PathReport { chosen: Option<(AugmentingPath, Rational)> },
    /// Tells `path.nodes()[hop]` to apply its part of the augmentation.
    AugmentCommit {
        path: AugmentingPath,
        beta: Rational,
        hop: usize,
    },
}

impl Payload {
    pub fn kind(&self) -> MessageKind {
        match self {
            Payload::CapacityReport { .. } => MessageKind::CapacityReport,
            Payload::PathProbe { .. } => MessageKind::PathProbe,
            Payload::PathReport { .. } => MessageKind::PathReport,
            Payload::AugmentCommit { .. } => MessageKind::AugmentCommit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FloodId {
    pub origin: NodeId,
    pub serial: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Routing {
    /// One hop to a neighbour.
    Direct,
    /// Flooded through the topology; consumed by every agent
    /// (`dest = None`) or only by `dest`.
    Flood { id: FloodId, dest: Option<NodeId> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub routing: Routing,
    pub payload: Payload,
}

/// A message in transit over one link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub from: NodeId,
    pub to: NodeId,
    pub message: Message,
}
