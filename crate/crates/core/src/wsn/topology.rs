use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Aggregation tree rooted at the aggregator, spanning every device.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTopology {
    positions: Vec<Point>,
    radio_range: f64,
    aggregator: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    children: Vec<Vec<usize>>,
    devices: Vec<usize>,
}

/// Breadth-first shortest-hop spanning tree over the unit-disk graph (`distance ≤ range`).
/// Each node's parent is the lowest-id neighbour one hop closer to the aggregator.
pub fn build_tree(positions: &[Point], radio_range: f64, aggregator_id: usize) -> Result<ClusterTopology> {
    check_geometry(positions, radio_range, aggregator_id)?;
    let n = positions.len();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && positions[i].distance(&positions[j]) <= radio_range)
                .collect()
        })
        .collect();

    let mut hops = vec![usize::MAX; n];
    hops[aggregator_id] = 0;
    let mut queue = VecDeque::from([aggregator_id]);
    while let Some(u) = queue.pop_front() {
        for &v in &neighbours[u] {
            if hops[v] == usize::MAX {
                hops[v] = hops[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let unreachable: Vec<usize> = (0..n).filter(|&i| hops[i] == usize::MAX).collect();
    if !unreachable.is_empty() {
        return Err(Error::Disconnected { unreachable });
    }

    let parent = (0..n)
        .map(|v| {
            (v != aggregator_id).then(|| {
                *neighbours[v]
                    .iter()
                    .find(|&&u| hops[u] + 1 == hops[v])
                    .expect("a BFS predecessor exists")
            })
        })
        .collect();
    ClusterTopology::from_parents(positions.to_vec(), radio_range, aggregator_id, parent)
}

fn check_geometry(positions: &[Point], radio_range: f64, aggregator: usize) -> Result<()> {
    if positions.len() < 2 {
        return Err(Error::invalid("a cluster needs an aggregator and at least one device"));
    }
    if aggregator >= positions.len() {
        return Err(Error::invalid(format!("aggregator id {aggregator} out of range")));
    }
    if !(radio_range > 0.0 && radio_range.is_finite()) {
        return Err(Error::invalid("radio range must be positive and finite"));
    }
    if positions.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err(Error::NonFinite("node positions"));
    }
    Ok(())
}

impl ClusterTopology {
    /// Builds a topology from an explicit parent array and checks that it is a valid
    /// aggregation tree.
    pub fn from_parents(
        positions: Vec<Point>,
        radio_range: f64,
        aggregator: usize,
        parent: Vec<Option<usize>>,
    ) -> Result<Self> {
        check_geometry(&positions, radio_range, aggregator)?;
        let n = positions.len();
        if parent.len() != n {
            return Err(Error::dims("parent array", n, parent.len()));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            match (v == aggregator, p) {
                (true, None) => {}
                (true, Some(_)) => return Err(Error::invalid("the aggregator cannot have a parent")),
                (false, None) => return Err(Error::invalid(format!("device {v} has no parent"))),
                (false, Some(p)) => {
                    if *p >= n || *p == v {
                        return Err(Error::invalid(format!("device {v} has invalid parent {p}")));
                    }
                    if positions[v].distance(&positions[*p]) > radio_range {
                        return Err(Error::invalid(format!(
                            "link {v}->{p} is longer than the radio range"
                        )));
                    }
                    children[*p].push(v);
                }
            }
        }
        // depths by walking down from the root; anything not reached sits on a cycle
        let mut depth = vec![usize::MAX; n];
        depth[aggregator] = 0;
        let mut queue = VecDeque::from([aggregator]);
        while let Some(u) = queue.pop_front() {
            for &c in &children[u] {
                depth[c] = depth[u] + 1;
                queue.push_back(c);
            }
        }
        let detached: Vec<usize> = (0..n).filter(|&i| depth[i] == usize::MAX).collect();
        if !detached.is_empty() {
            return Err(Error::Disconnected { unreachable: detached });
        }
        let devices = (0..n).filter(|&i| i != aggregator).collect();
        Ok(Self {
            positions,
            radio_range,
            aggregator,
            parent,
            depth,
            children,
            devices,
        })
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn radio_range(&self) -> f64 {
        self.radio_range
    }

    pub fn aggregator(&self) -> usize {
        self.aggregator
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn n_devices(&self) -> usize {
        self.devices.len()
    }

    /// Device node ids in ascending order.
    pub fn devices(&self) -> &[usize] {
        &self.devices
    }

    /// Position of `node` in the device order, `None` for the aggregator.
    pub fn device_index(&self, node: usize) -> Option<usize> {
        self.devices.binary_search(&node).ok()
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    /// Tree links as `(child, parent)`, ordered by child id.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.devices
            .iter()
            .map(|&v| (v, self.parent[v].expect("devices have parents")))
            .collect()
    }

    /// Number of nodes in the subtree rooted at `node`, itself included.
    pub fn subtree_size(&self, node: usize) -> usize {
        1 + self.children[node].iter().map(|&c| self.subtree_size(c)).sum::<usize>()
    }

    /// Devices ordered deepest first (ties by id), so every child precedes its parent.
    pub fn upward_order(&self) -> Vec<usize> {
        let mut order = self.devices.clone();
        order.sort_by(|a, b| self.depth[*b].cmp(&self.depth[*a]).then(a.cmp(b)));
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, spacing: f64) -> Vec<Point> {
        (0..n).map(|i| Point::new(i as f64 * spacing, 0.0)).collect()
    }

    #[test]
    fn single_device_star() {
        let t = build_tree(&line(2, 1.0), 2.0, 0).unwrap();
        assert_eq!(t.edges(), vec![(1, 0)]);
        assert_eq!(t.max_depth(), 1);
    }

    #[test]
    fn chain_at_exact_range() {
        let t = build_tree(&line(4, 5.0), 5.0, 0).unwrap();
        assert_eq!(t.edges(), vec![(1, 0), (2, 1), (3, 2)]);
        assert_eq!((t.depth(1), t.depth(2), t.depth(3)), (1, 2, 3));
        assert_eq!(t.subtree_size(1), 3);
        assert_eq!(t.upward_order(), vec![3, 2, 1]);
    }

    #[test]
    fn disconnected_reports_unreachable() {
        let mut pts = line(3, 1.0);
        pts.push(Point::new(50.0, 50.0));
        match build_tree(&pts, 1.0, 0) {
            Err(Error::Disconnected { unreachable }) => assert_eq!(unreachable, vec![3]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn equal_hop_parent_prefers_lowest_id() {
        // nodes 1 and 2 are both one hop from the root and both reach node 3
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.5),
            Point::new(1.0, -0.5),
            Point::new(2.0, 0.0),
        ];
        let t = build_tree(&pts, 1.2, 0).unwrap();
        assert_eq!(t.parent(3), Some(1));
    }

    #[test]
    fn nonzero_aggregator_id() {
        let t = build_tree(&line(3, 1.0), 1.0, 1).unwrap();
        assert_eq!(t.devices(), &[0, 2]);
        assert_eq!(t.device_index(2), Some(1));
        assert_eq!(t.device_index(1), None);
        assert_eq!(t.edges(), vec![(0, 1), (2, 1)]);
    }

    #[test]
    fn from_parents_rejects_cycles_and_long_links() {
        let pts = line(3, 1.0);
        assert!(ClusterTopology::from_parents(pts.clone(), 1.0, 0, vec![None, Some(2), Some(1)]).is_err());
        assert!(ClusterTopology::from_parents(pts.clone(), 1.0, 0, vec![None, Some(0), Some(0)]).is_err());
        assert!(ClusterTopology::from_parents(pts, 1.0, 0, vec![None, Some(0), Some(1)]).is_ok());
    }
}
