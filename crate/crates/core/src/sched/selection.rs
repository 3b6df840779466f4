use std::cmp::Ordering;

use super::gathering::{cd_gathering, DualState};
use super::grouping::{cd_grouping, DeviceGroup};
use super::instance::{ScheduleSolution, TrainInstance};
use super::scheduling::{cd_scheduling, ChannelSchedule};
use crate::{Error, Result, Scalar};

/// A gathered and scheduled subset from one group.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<T> {
    pub group: usize,
    /// Selected ids, ascending.
    pub selected: Vec<usize>,
    pub data: u64,
    pub schedule: ChannelSchedule<T>,
    pub expenditure: T,
    /// `β·τ + α·Σ c(i)`.
    pub cost: T,
}

impl<T: Scalar> Candidate<T> {
    pub fn new(instance: &TrainInstance<T>, group: usize, selected: &[usize]) -> Result<Self> {
        let mut ids = selected.to_vec();
        ids.sort_unstable();
        let schedule = cd_scheduling(&instance.jobs(&ids)?, instance.channels)?;
        let expenditure = instance.cost_of(&ids)?;
        Ok(Self {
            group,
            data: instance.data_of(&ids)?,
            cost: instance.beta * schedule.makespan + instance.alpha * expenditure,
            selected: ids,
            schedule,
            expenditure,
        })
    }
}

/// Picks the cheapest candidate meeting the data requirement.
///
/// Ties go to the smaller makespan, then to the lexicographically smallest id set.
pub fn fs_selection<T: Scalar>(candidates: &[Candidate<T>], instance: &TrainInstance<T>) -> Result<ScheduleSolution<T>> {
    let best = candidates
        .iter()
        .filter(|c| c.data >= instance.data_requirement)
        .min_by(|a, b| {
            a.cost
                .partial_cmp(&b.cost)
                .unwrap_or(Ordering::Equal)
                .then(a.schedule.makespan.partial_cmp(&b.schedule.makespan).unwrap_or(Ordering::Equal))
                .then_with(|| a.selected.cmp(&b.selected))
        })
        .ok_or_else(|| Error::Infeasible("no candidate meets the data requirement".into()))?;
    ScheduleSolution::from_schedule(instance, &best.selected, best.schedule.clone())
}

/// Every intermediate product of [`solve_primal_dual`].
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualRun<T> {
    pub groups: Vec<DeviceGroup<T>>,
    /// Dual trace per kept group, keyed by group index.
    pub duals: Vec<(usize, DualState<T>)>,
    pub candidates: Vec<Candidate<T>>,
    pub solution: ScheduleSolution<T>,
}

/// Runs grouping, gathering, scheduling and selection, keeping all intermediate results.
pub fn primal_dual_run<T: Scalar>(instance: &TrainInstance<T>) -> Result<PrimalDualRun<T>> {
    instance.validate()?;
    let groups = cd_grouping(instance)?;
    let mut duals = Vec::new();
    let mut candidates = Vec::new();
    for g in groups.iter().filter(|g| g.kept) {
        let state = cd_gathering(g, instance)?;
        candidates.push(Candidate::new(instance, g.index, &state.selected)?);
        duals.push((g.index, state));
    }
    let solution = fs_selection(&candidates, instance)?;
    Ok(PrimalDualRun {
        groups,
        duals,
        candidates,
        solution,
    })
}

/// Selects and schedules devices with the primal-dual grouping algorithm.
pub fn solve_primal_dual<T: Scalar>(instance: &TrainInstance<T>) -> Result<ScheduleSolution<T>> {
    primal_dual_run(instance).map(|r| r.solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sched::{example1, DeviceProfile};

    #[test]
    fn worked_example() {
        let inst = example1::<f64>();
        let run = primal_dual_run(&inst).unwrap();
        let s = &run.solution;
        assert_eq!(s.selected, vec![2, 3, 5]);
        assert!((s.makespan - 0.6).abs() < 1e-12);
        assert!((s.expenditure - 1.737).abs() < 1e-12);
        assert!((s.objective - 1.1685).abs() < 1e-12);
        assert_eq!(s.data_quantity, 900);
        s.check_feasible(&inst).unwrap();
        let sets: Vec<Vec<usize>> = run.candidates.iter().map(|c| c.selected.clone()).collect();
        assert_eq!(sets[0], vec![2, 3, 5]);
        assert_eq!(sets[1], vec![1, 3, 5]);
        // G4's subset: C = 1.896, loads {0.6, 0.6} → 0.5·(1.896 + 0.6).
        assert!((run.candidates[1].cost - 1.248).abs() < 1e-12);
    }

    #[test]
    fn zero_requirement() {
        let mut inst = example1::<f64>();
        inst.data_requirement = 0;
        let s = solve_primal_dual(&inst).unwrap();
        assert!(s.selected.is_empty());
        assert_eq!(s.objective, 0.0);
    }

    #[test]
    fn identical_devices_fill_channels_evenly() {
        for (k, m) in [(1usize, 1usize), (3, 2), (5, 2), (6, 3), (7, 3), (4, 1)] {
            let inst = TrainInstance {
                devices: (0..9).map(|i| DeviceProfile::new(i, 1.0, 1, 0.0, 1.0)).collect(),
                channels: m,
                data_requirement: k as u64,
                skew_threshold: f64::INFINITY,
                alpha: 0.5,
                beta: 0.5,
                deadline: f64::INFINITY,
            };
            let s = solve_primal_dual(&inst).unwrap();
            assert_eq!(s.selected.len(), k);
            assert_eq!(s.makespan, k.div_ceil(m) as f64);
        }
    }

    #[test]
    fn single_candidate_is_returned() {
        let inst = example1::<f64>();
        let c = Candidate::new(&inst, 3, &[5, 3, 2]).unwrap();
        let s = fs_selection(std::slice::from_ref(&c), &inst).unwrap();
        assert_eq!(s.selected, c.selected);
        assert_eq!(s.objective, c.cost);
    }

    #[test]
    fn equal_cost_prefers_shorter_makespan() {
        let inst = example1::<f64>();
        let mut a = Candidate::new(&inst, 1, &[1]).unwrap();
        let mut b = Candidate::new(&inst, 2, &[2]).unwrap();
        a.schedule.makespan = 0.6;
        b.schedule.makespan = 0.5;
        a.cost = 1.0;
        b.cost = 1.0;
        a.data = 800;
        b.data = 800;
        let s = fs_selection(&[a, b], &inst).unwrap();
        assert_eq!(s.selected, vec![2]);
    }

    #[test]
    fn no_feasible_candidate() {
        let inst = example1::<f64>();
        let c = Candidate::new(&inst, 1, &[5]).unwrap();
        assert!(matches!(fs_selection(&[c], &inst), Err(Error::Infeasible(_))));
        assert!(fs_selection::<f64>(&[], &inst).is_err());
    }

    #[test]
    fn skew_filter_respected() {
        let mut inst = example1::<f64>();
        inst.devices[2].skewness = 2.0;
        inst.skew_threshold = 1.0;
        let s = solve_primal_dual(&inst).unwrap();
        assert!(!s.selected.contains(&3));
        assert!(s.passes_skew_filter(&inst));
    }

    #[test]
    fn f32_agrees() {
        let s = solve_primal_dual(&example1::<f32>()).unwrap();
        assert_eq!(s.selected, vec![2, 3, 5]);
        assert!((s.objective - 1.1685).abs() < 1e-5);
    }
}
