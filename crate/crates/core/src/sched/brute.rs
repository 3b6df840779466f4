use std::collections::BTreeMap;

use super::instance::{ScheduleSolution, TrainInstance};
use super::scheduling::{cd_scheduling, ChannelSchedule};
use crate::{Error, Result, Scalar};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 10;
pub const MAX_BRUTE_FORCE_CHANNELS: usize = 3;

/// Exact minimum makespan by depth-first search over channel assignments.
///
/// Jobs are placed longest first, a job never opens a second empty channel, and branches
/// whose partial makespan cannot beat the incumbent are cut.
pub fn optimal_makespan<T: Scalar>(jobs: &[(usize, T)], channels: usize) -> Result<ChannelSchedule<T>> {
    let lpt = cd_scheduling(jobs, channels)?;
    let mut order = jobs.to_vec();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

    struct Search<'a, T> {
        order: &'a [(usize, T)],
        loads: Vec<T>,
        slots: Vec<usize>,
        best: T,
        best_slots: Option<Vec<usize>>,
    }
    impl<T: Scalar> Search<'_, T> {
        fn go(&mut self, k: usize, current: T) {
            if k == self.order.len() {
                if current < self.best {
                    self.best = current;
                    self.best_slots = Some(self.slots.clone());
                }
                return;
            }
            let t = self.order[k].1;
            let mut tried_empty = false;
            for m in 0..self.loads.len() {
                if self.loads[m] == T::zero() {
                    if tried_empty {
                        continue;
                    }
                    tried_empty = true;
                }
                let before = self.loads[m];
                let next = before + t;
                if next >= self.best {
                    continue;
                }
                self.loads[m] = next;
                self.slots.push(m);
                self.go(k + 1, current.max(next));
                self.slots.pop();
                self.loads[m] = before;
            }
        }
    }

    let mut search = Search {
        order: &order,
        loads: vec![T::zero(); channels],
        slots: Vec::with_capacity(order.len()),
        best: lpt.makespan,
        best_slots: None,
    };
    search.go(0, T::zero());
    match search.best_slots {
        None => Ok(lpt),
        Some(slots) => {
            let assignment: BTreeMap<usize, usize> = order.iter().zip(slots).map(|(j, m)| (j.0, m)).collect();
            ChannelSchedule::from_assignment(jobs, assignment, channels)
        }
    }
}

/// Exhaustive optimum over all subsets of devices that pass the skew filter.
///
/// Ties go to the smaller makespan, then the lexicographically smallest id set.
pub fn brute_force<T: Scalar>(instance: &TrainInstance<T>, cap: usize) -> Result<ScheduleSolution<T>> {
    instance.validate()?;
    if instance.devices.len() > cap {
        return Err(Error::CapExceeded {
            what: "devices",
            actual: instance.devices.len(),
            cap,
        });
    }
    if instance.channels > MAX_BRUTE_FORCE_CHANNELS {
        return Err(Error::CapExceeded {
            what: "channels",
            actual: instance.channels,
            cap: MAX_BRUTE_FORCE_CHANNELS,
        });
    }
    let mut eligible: Vec<_> = instance
        .devices
        .iter()
        .filter(|d| d.skewness <= instance.skew_threshold)
        .collect();
    eligible.sort_by_key(|d| d.id);

    let mut best: Option<ScheduleSolution<T>> = None;
    for mask in 0u32..(1u32 << eligible.len()) {
        let subset: Vec<_> = (0..eligible.len())
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| eligible[k])
            .collect();
        let data: u64 = subset.iter().map(|d| d.data_quantity).sum();
        if data < instance.data_requirement {
            continue;
        }
        let ids: Vec<usize> = subset.iter().map(|d| d.id).collect();
        let cost: T = subset.iter().map(|d| d.cost).sum();
        let longest = subset.iter().map(|d| d.upload_time).fold(T::zero(), T::max);
        if let Some(b) = &best {
            // Makespan is at least the longest job, so this subset cannot win.
            if instance.alpha * cost + instance.beta * longest > b.objective {
                continue;
            }
        }
        let schedule = optimal_makespan(&instance.jobs(&ids)?, instance.channels)?;
        let sol = ScheduleSolution::from_schedule(instance, &ids, schedule)?;
        let better = match &best {
            None => true,
            Some(b) => {
                sol.objective < b.objective
                    || (sol.objective == b.objective
                        && (sol.makespan < b.makespan || (sol.makespan == b.makespan && sol.selected < b.selected)))
            }
        };
        if better {
            best = Some(sol);
        }
    }
    best.ok_or_else(|| Error::Infeasible("no subset meets the data requirement".into()))
}
