//! Cluster topology, in-network aggregation and transmission accounting.
//!
//! Node ids index the position list. One node is the aggregator (tree root); every other
//! node is a device holding one scalar reading per round. Devices are ordered by ascending
//! node id, and device `k` in that order owns column `k` of the encoder matrix.

mod aggregate;
mod deploy;
mod io;
mod ledger;
mod topology;

pub use aggregate::{
    aggregate_compressed, aggregate_compressed_per_device, aggregate_raw, cluster_to_edge_cost,
    distribute_columns, distribute_encoder, record_edge_upload, EncoderShard, Payload,
};
pub use deploy::{chain_positions, random_deployment, star_positions};
pub use ledger::{Direction, Endpoint, LedgerEntry, TransmissionLedger};
pub use topology::{build_tree, ClusterTopology, Point};
