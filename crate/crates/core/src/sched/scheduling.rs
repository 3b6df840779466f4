use std::collections::BTreeMap;

use crate::{Error, Result, Scalar};

/// Channel assignment for a set of uploads.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSchedule<T> {
    /// Device id → channel index.
    pub assignment: BTreeMap<usize, usize>,
    pub loads: Vec<T>,
    pub makespan: T,
}

impl<T: Scalar> ChannelSchedule<T> {
    /// Builds loads and makespan from an explicit assignment.
    pub fn from_assignment(jobs: &[(usize, T)], assignment: BTreeMap<usize, usize>, channels: usize) -> Result<Self> {
        let mut loads = vec![T::zero(); channels];
        for &(id, t) in jobs {
            let m = *assignment
                .get(&id)
                .ok_or_else(|| Error::invalid(format!("device {id} has no channel")))?;
            if m >= channels {
                return Err(Error::invalid(format!("channel {m} out of range")));
            }
            loads[m] += t;
        }
        let makespan = loads.iter().copied().fold(T::zero(), T::max);
        Ok(Self {
            assignment,
            loads,
            makespan,
        })
    }
}

/// Longest-upload-first list scheduling of `(id, upload_time)` jobs.
///
/// Jobs go in nonincreasing upload time (ties by lowest id), each onto the currently
/// least loaded channel (ties by lowest index). An empty job list yields makespan 0.
pub fn cd_scheduling<T: Scalar>(jobs: &[(usize, T)], channels: usize) -> Result<ChannelSchedule<T>> {
    if channels == 0 {
        return Err(Error::invalid("at least one channel is required"));
    }
    let mut order = jobs.to_vec();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    let mut loads = vec![T::zero(); channels];
    let mut assignment = BTreeMap::new();
    for (id, t) in order {
        let mut best = 0;
        for m in 1..channels {
            if loads[m] < loads[best] {
                best = m;
            }
        }
        loads[best] += t;
        if assignment.insert(id, best).is_some() {
            return Err(Error::invalid(format!("device {id} scheduled twice")));
        }
    }
    let makespan = loads.iter().copied().fold(T::zero(), T::max);
    Ok(ChannelSchedule {
        assignment,
        loads,
        makespan,
    })
}

/// `Σ t / channels + max t`, an upper bound on any list-scheduling makespan.
pub fn makespan_bound<T: Scalar>(jobs: &[(usize, T)], channels: usize) -> T {
    let total: T = jobs.iter().map(|j| j.1).sum();
    let longest = jobs.iter().map(|j| j.1).fold(T::zero(), T::max);
    total / T::from_usize(channels.max(1)).unwrap() + longest
}
