use serde::{Deserialize, Serialize};

use super::{ClusterTopology, Direction, Endpoint, TransmissionLedger};
use crate::codec::Autoencoder;
use crate::nn::{ActivationKind, Matrix2};
use crate::{Error, Result, Scalar};

const UNICAST_COLUMNS: &str = "encoder columns sent as one M-scalar unicast per device";

/// Column of `W_e` held by one device.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderShard<T> {
    /// Node id of the device.
    pub device: usize,
    pub column: Vec<T>,
}

/// What the aggregator forwards to the edge server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    Raw,
    Compressed,
}

/// Leaf-to-root forwarding of raw readings (`readings[k]` belongs to device `k` in
/// device order). Each link carries one scalar per device in the sender's subtree.
/// Returns the readings as assembled at the aggregator.
pub fn aggregate_raw<T: Scalar>(topology: &ClusterTopology, readings: &[T]) -> Result<(Vec<T>, TransmissionLedger)> {
    if readings.len() != topology.n_devices() {
        return Err(Error::dims("raw readings", topology.n_devices(), readings.len()));
    }
    let mut buffers: Vec<Vec<(usize, T)>> = vec![Vec::new(); topology.node_count()];
    for (k, &node) in topology.devices().iter().enumerate() {
        buffers[node].push((k, readings[k]));
    }
    let mut ledger = TransmissionLedger::new();
    for node in topology.upward_order() {
        let parent = topology.parent(node).expect("device has a parent");
        let packet = std::mem::take(&mut buffers[node]);
        ledger.record(Endpoint::Node(node), Endpoint::Node(parent), Direction::Uplink, packet.len() as u64);
        buffers[parent].extend(packet);
    }
    let mut assembled = std::mem::take(&mut buffers[topology.aggregator()]);
    assembled.sort_by_key(|&(k, _)| k);
    Ok((assembled.into_iter().map(|(_, v)| v).collect(), ledger))
}

/// Hands device `k` column `k` of `W_e`. The bias stays at the aggregator. The ledger
/// counts one M-scalar downlink message per device.
pub fn distribute_encoder<T: Scalar>(
    ae: &Autoencoder<T>,
    topology: &ClusterTopology,
) -> Result<(Vec<EncoderShard<T>>, TransmissionLedger)> {
    distribute_columns(ae.encoder().weights(), topology)
}

/// [`distribute_encoder`] for a bare `M×N` weight matrix.
pub fn distribute_columns<T: Scalar>(
    weights: &Matrix2<T>,
    topology: &ClusterTopology,
) -> Result<(Vec<EncoderShard<T>>, TransmissionLedger)> {
    if weights.cols() != topology.n_devices() {
        return Err(Error::dims("encoder columns vs devices", topology.n_devices(), weights.cols()));
    }
    let mut ledger = TransmissionLedger::with_cost_model(UNICAST_COLUMNS);
    let root = Endpoint::Node(topology.aggregator());
    let shards = topology
        .devices()
        .iter()
        .enumerate()
        .map(|(k, &node)| {
            ledger.record(root, Endpoint::Node(node), Direction::Downlink, weights.rows() as u64);
            EncoderShard {
                device: node,
                column: weights.column(k),
            }
        })
        .collect();
    Ok((shards, ledger))
}

fn shard_table<'a, T: Scalar>(
    topology: &ClusterTopology,
    shards: &'a [EncoderShard<T>],
    readings: &[T],
) -> Result<(Vec<Option<&'a EncoderShard<T>>>, usize)> {
    if readings.len() != topology.n_devices() {
        return Err(Error::dims("compressed readings", topology.n_devices(), readings.len()));
    }
    let mut table = vec![None; topology.node_count()];
    for s in shards {
        if topology.device_index(s.device).is_none() {
            return Err(Error::invalid(format!("shard for unknown device {}", s.device)));
        }
        table[s.device] = Some(s);
    }
    let missing: Vec<usize> = topology
        .devices()
        .iter()
        .copied()
        .filter(|&d| table[d].is_none())
        .collect();
    if !missing.is_empty() {
        return Err(Error::invalid(format!("missing encoder shards for devices {missing:?}")));
    }
    let m = shards[0].column.len();
    if let Some(bad) = shards.iter().find(|s| s.column.len() != m) {
        return Err(Error::dims("encoder shard", m, bad.column.len()));
    }
    Ok((table, m))
}

fn sum_up_tree<T: Scalar>(
    topology: &ClusterTopology,
    mut partial: Vec<Vec<T>>,
    m: usize,
) -> (Vec<T>, TransmissionLedger) {
    let mut ledger = TransmissionLedger::new();
    for node in topology.upward_order() {
        let parent = topology.parent(node).expect("device has a parent");
        let packet = std::mem::take(&mut partial[node]);
        ledger.record(Endpoint::Node(node), Endpoint::Node(parent), Direction::Uplink, m as u64);
        for (acc, v) in partial[parent].iter_mut().zip(packet) {
            *acc += v;
        }
    }
    (std::mem::take(&mut partial[topology.aggregator()]), ledger)
}

/// Partial-sum compressed aggregation. Device `i` computes `column_i · x_i`; every node
/// adds its children's sums to its own and forwards exactly M scalars. The aggregator
/// finishes with `Y = σ(Σ_i column_i·x_i + b_e)`, which equals the centralized encoder
/// output up to summation order.
pub fn aggregate_compressed<T: Scalar>(
    topology: &ClusterTopology,
    shards: &[EncoderShard<T>],
    bias: &[T],
    activation: ActivationKind,
    readings: &[T],
) -> Result<(Vec<T>, TransmissionLedger)> {
    let (table, m) = shard_table(topology, shards, readings)?;
    if bias.len() != m {
        return Err(Error::dims("encoder bias", m, bias.len()));
    }
    let mut partial = vec![vec![T::zero(); m]; topology.node_count()];
    for (k, &node) in topology.devices().iter().enumerate() {
        let shard = table[node].expect("checked");
        partial[node] = shard.column.iter().map(|&w| w * readings[k]).collect();
    }
    let (sum, ledger) = sum_up_tree(topology, partial, m);
    let y = sum
        .iter()
        .zip(bias)
        .map(|(&s, &b)| activation.apply(s + b))
        .collect();
    Ok((y, ledger))
}

/// Literal per-device variant: each device applies the activation to its own term,
/// `σ(column_i·x_i + b_e/N)`, and the tree sums those vectors. Only equal to the
/// centralized encoder for the identity activation.
pub fn aggregate_compressed_per_device<T: Scalar>(
    topology: &ClusterTopology,
    shards: &[EncoderShard<T>],
    bias: &[T],
    activation: ActivationKind,
    readings: &[T],
) -> Result<(Vec<T>, TransmissionLedger)> {
    let (table, m) = shard_table(topology, shards, readings)?;
    if bias.len() != m {
        return Err(Error::dims("encoder bias", m, bias.len()));
    }
    let share = T::one() / T::lit(topology.n_devices() as f64);
    let mut partial = vec![vec![T::zero(); m]; topology.node_count()];
    for (k, &node) in topology.devices().iter().enumerate() {
        let shard = table[node].expect("checked");
        partial[node] = shard
            .column
            .iter()
            .zip(bias)
            .map(|(&w, &b)| activation.apply(w * readings[k] + b * share))
            .collect();
    }
    Ok(sum_up_tree(topology, partial, m))
}

/// Scalars on the aggregator → edge link: N per round for raw data, M for latents.
pub fn cluster_to_edge_cost(payload: Payload, n_devices: usize, latent_dim: usize, rounds: u64) -> u64 {
    let per_round = match payload {
        Payload::Raw => n_devices,
        Payload::Compressed => latent_dim,
    };
    per_round as u64 * rounds
}

/// Adds the aggregator → edge traffic of `rounds` uploads to `ledger`.
pub fn record_edge_upload(
    ledger: &mut TransmissionLedger,
    topology: &ClusterTopology,
    payload: Payload,
    latent_dim: usize,
    rounds: u64,
) {
    let scalars = cluster_to_edge_cost(payload, topology.n_devices(), latent_dim, rounds);
    ledger.record(
        Endpoint::Node(topology.aggregator()),
        Endpoint::EdgeServer,
        Direction::ClusterToEdge,
        scalars,
    );
}
