use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Device towards aggregator, inside the cluster.
    Uplink,
    /// Aggregator towards devices (encoder distribution).
    Downlink,
    /// Aggregator towards the edge server.
    ClusterToEdge,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Uplink => "uplink",
            Direction::Downlink => "downlink",
            Direction::ClusterToEdge => "cluster_to_edge",
        }
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uplink" => Ok(Direction::Uplink),
            "downlink" => Ok(Direction::Downlink),
            "cluster_to_edge" => Ok(Direction::ClusterToEdge),
            other => Err(Error::format("ledger", format!("unknown direction {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Node(usize),
    EdgeServer,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Node(id) => write!(f, "{id}"),
            Endpoint::EdgeServer => f.write_str("edge"),
        }
    }
}

impl FromStr for Endpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "edge" {
            return Ok(Endpoint::EdgeServer);
        }
        s.parse()
            .map(Endpoint::Node)
            .map_err(|_| Error::format("ledger", format!("bad endpoint {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerEntry {
    pub src: Endpoint,
    pub dst: Endpoint,
    pub direction: Direction,
    pub scalars: u64,
}

/// Scalars sent per directed link, accumulated over any number of rounds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransmissionLedger {
    links: BTreeMap<(Direction, Endpoint, Endpoint), u64>,
    cost_model: Option<String>,
}

impl TransmissionLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cost_model(model: impl Into<String>) -> Self {
        Self {
            links: BTreeMap::new(),
            cost_model: Some(model.into()),
        }
    }

    /// Free-form note on how the counts were modelled (e.g. broadcast as unicast).
    pub fn cost_model(&self) -> Option<&str> {
        self.cost_model.as_deref()
    }

    pub fn record(&mut self, src: Endpoint, dst: Endpoint, direction: Direction, scalars: u64) {
        *self.links.entry((direction, src, dst)).or_insert(0) += scalars;
    }

    pub fn merge(&mut self, other: &TransmissionLedger) {
        for (&(d, s, t), &n) in &other.links {
            self.record(s, t, d, n);
        }
        if self.cost_model.is_none() {
            self.cost_model.clone_from(&other.cost_model);
        }
    }

    pub fn link(&self, src: Endpoint, dst: Endpoint, direction: Direction) -> u64 {
        self.links.get(&(direction, src, dst)).copied().unwrap_or(0)
    }

    pub fn total(&self, direction: Direction) -> u64 {
        self.links
            .iter()
            .filter(|((d, _, _), _)| *d == direction)
            .map(|(_, &n)| n)
            .sum()
    }

    pub fn grand_total(&self) -> u64 {
        self.links.values().sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = LedgerEntry> + '_ {
        self.links.iter().map(|(&(direction, src, dst), &scalars)| LedgerEntry {
            src,
            dst,
            direction,
            scalars,
        })
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// CSV with columns `link_src,link_dst,direction,scalars`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["link_src", "link_dst", "direction", "scalars"])?;
        for e in self.entries() {
            w.write_record([
                e.src.to_string(),
                e.dst.to_string(),
                e.direction.as_str().to_string(),
                e.scalars.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut ledger = TransmissionLedger::new();
        for row in r.records() {
            let row = row?;
            if row.len() != 4 {
                return Err(Error::format("ledger", format!("expected 4 columns, got {}", row.len())));
            }
            let scalars = row[3]
                .parse()
                .map_err(|_| Error::format("ledger", format!("bad scalar count {:?}", &row[3])))?;
            ledger.record(row[0].parse()?, row[1].parse()?, row[2].parse()?, scalars);
        }
        Ok(ledger)
    }
}
