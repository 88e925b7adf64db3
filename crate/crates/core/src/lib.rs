//! Deterministic availability simulator for a super-peer based decentralized
//! social-network storage architecture.
//!
//! The pipeline: build a friendship graph, render two-week uptime traces,
//! run the storekeeper placement protocol, replay replica synchronization,
//! and report total-time / friend-time availability distributions.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod placement;
pub mod replication;
pub mod rng;
pub mod slots;
pub mod trace;

pub use error::{ConfigError, GraphError, ReplicationError, TraceError};
pub use graph::{generate_synthetic, load_edge_list, NodeId, Role, SocialGraph};
pub use metrics::{availability_ft, availability_tt, categorize, AvailabilityReport, Category};
pub use placement::{
    sample_acceptances, AcceptanceTables, Mode, PlacementParameters, StorekeeperSet, Strategy,
    SuperPeerRegistry,
};
pub use replication::{LogicalStamp, PendingUpdate, ReplicaState};
pub use slots::{SlotSet, TimeGrid};
pub use trace::{
    apply_deviation, assign_behaviors, render_trace, super_peer_trace, BehaviorAssignment,
    DeviationClass, UptimeTrace,
};
