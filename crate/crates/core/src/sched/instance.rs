use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scheduling::{makespan_bound, ChannelSchedule};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct DeviceProfile<T> {
    pub id: usize,
    /// Seconds to upload one model update.
    pub upload_time: T,
    /// Number of local training samples.
    pub data_quantity: u64,
    /// Distribution skewness (earth mover's distance to the global distribution).
    pub skewness: T,
    /// Expenditure for recruiting the device (computation plus data access).
    pub cost: T,
}

impl<T: Scalar> DeviceProfile<T> {
    pub fn new(id: usize, upload_time: T, data_quantity: u64, skewness: T, cost: T) -> Self {
        Self {
            id,
            upload_time,
            data_quantity,
            skewness,
            cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct TrainInstance<T> {
    pub devices: Vec<DeviceProfile<T>>,
    pub channels: usize,
    pub data_requirement: u64,
    pub skew_threshold: T,
    pub alpha: T,
    pub beta: T,
    /// Upload deadline. Carried for completeness; no solver enforces it.
    pub deadline: T,
}

impl<T: Scalar> TrainInstance<T> {
    pub fn validate(&self) -> Result<()> {
        if self.channels == 0 {
            return Err(Error::invalid("at least one channel is required"));
        }
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if !unit(self.alpha) || !unit(self.beta) {
            return Err(Error::invalid("alpha and beta must lie in [0, 1]"));
        }
        if self.skew_threshold.is_nan() {
            return Err(Error::invalid("skew threshold is NaN"));
        }
        let mut ids: Vec<usize> = self.devices.iter().map(|d| d.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("device ids must be unique"));
        }
        for d in &self.devices {
            if !(d.upload_time > T::zero() && d.upload_time.is_finite()) {
                return Err(Error::invalid(format!("device {} needs a positive upload time", d.id)));
            }
            if !(d.cost >= T::zero() && d.cost.is_finite()) {
                return Err(Error::invalid(format!("device {} has a negative or non-finite cost", d.id)));
            }
            if !(d.skewness >= T::zero()) {
                return Err(Error::invalid(format!("device {} has negative skewness", d.id)));
            }
        }
        Ok(())
    }

    pub fn device(&self, id: usize) -> Option<&DeviceProfile<T>> {
        self.devices.iter().find(|d| d.id == id)
    }

    pub(crate) fn lookup(&self, id: usize) -> Result<&DeviceProfile<T>> {
        self.device(id)
            .ok_or_else(|| Error::invalid(format!("unknown device id {id}")))
    }

    pub fn total_data(&self) -> u64 {
        self.devices.iter().map(|d| d.data_quantity).sum()
    }

    pub fn data_of(&self, ids: &[usize]) -> Result<u64> {
        ids.iter().map(|&i| Ok(self.lookup(i)?.data_quantity)).sum()
    }

    pub fn cost_of(&self, ids: &[usize]) -> Result<T> {
        ids.iter().map(|&i| Ok(self.lookup(i)?.cost)).sum()
    }

    /// `(id, upload_time)` pairs for the given devices.
    pub fn jobs(&self, ids: &[usize]) -> Result<Vec<(usize, T)>> {
        ids.iter().map(|&i| Ok((i, self.lookup(i)?.upload_time))).collect()
    }

    /// Returns a copy with every cost and upload time multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        for d in &mut out.devices {
            d.cost *= factor;
            d.upload_time *= factor;
        }
        out
    }
}

/// `ℜ = α·Σ c(i) + β·makespan` over `selected`.
pub fn objective<T: Scalar>(instance: &TrainInstance<T>, selected: &[usize], makespan: T) -> Result<T> {
    Ok(instance.alpha * instance.cost_of(selected)? + instance.beta * makespan)
}

/// A selected device set with its channel assignment and costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ScheduleSolution<T> {
    /// Selected device ids, ascending.
    pub selected: Vec<usize>,
    /// Device id → channel index.
    pub assignment: BTreeMap<usize, usize>,
    pub channel_loads: Vec<T>,
    pub makespan: T,
    pub expenditure: T,
    pub objective: T,
    pub data_quantity: u64,
}

impl<T: Scalar> ScheduleSolution<T> {
    pub fn from_schedule(instance: &TrainInstance<T>, selected: &[usize], schedule: ChannelSchedule<T>) -> Result<Self> {
        let mut ids = selected.to_vec();
        ids.sort_unstable();
        let expenditure = instance.cost_of(&ids)?;
        Ok(Self {
            objective: instance.alpha * expenditure + instance.beta * schedule.makespan,
            data_quantity: instance.data_of(&ids)?,
            selected: ids,
            assignment: schedule.assignment,
            channel_loads: schedule.loads,
            makespan: schedule.makespan,
            expenditure,
        })
    }

    /// Data requirement met and every selected device on exactly one valid channel.
    pub fn check_feasible(&self, instance: &TrainInstance<T>) -> Result<()> {
        let data = instance.data_of(&self.selected)?;
        if data < instance.data_requirement {
            return Err(Error::Infeasible(format!(
                "selected data {data} is below the requirement {}",
                instance.data_requirement
            )));
        }
        let assigned: Vec<usize> = self.assignment.keys().copied().collect();
        if assigned != self.selected {
            return Err(Error::Infeasible("assignment does not cover exactly the selected devices".into()));
        }
        if self.assignment.values().any(|&m| m >= instance.channels) {
            return Err(Error::Infeasible("assignment uses a channel that does not exist".into()));
        }
        Ok(())
    }

    /// Every selected device passes the per-device filter `E(i) ≤ ℰ`.
    pub fn passes_skew_filter(&self, instance: &TrainInstance<T>) -> bool {
        self.selected
            .iter()
            .all(|&i| instance.device(i).is_some_and(|d| d.skewness <= instance.skew_threshold))
    }

    /// The aggregate form `Σ E(i) ≤ ℰ` over the selection.
    pub fn aggregate_skew_ok(&self, instance: &TrainInstance<T>) -> bool {
        let total: T = self
            .selected
            .iter()
            .filter_map(|&i| instance.device(i))
            .map(|d| d.skewness)
            .sum();
        total <= instance.skew_threshold
    }

    /// `Σ t(i)/|M| + max t(i)` over the selection.
    pub fn makespan_bound(&self, instance: &TrainInstance<T>) -> Result<T> {
        Ok(makespan_bound(&instance.jobs(&self.selected)?, instance.channels))
    }
}

/// The five-device, two-channel worked example (`α = β = 0.5`, `𝒟 = 800`). Skewness is
/// zero and the skew threshold infinite because the example does not use them.
pub fn example1<T: Scalar>() -> TrainInstance<T> {
    let rows: [(usize, f64, u64, f64); 5] = [
        (1, 0.6, 450, 0.817),
        (2, 0.5, 350, 0.658),
        (3, 0.4, 300, 0.579),
        (4, 1.9, 550, 0.975),
        (5, 0.2, 250, 0.5),
    ];
    TrainInstance {
        devices: rows
            .iter()
            .map(|&(id, t, d, c)| DeviceProfile::new(id, T::lit(t), d, T::zero(), T::lit(c)))
            .collect(),
        channels: 2,
        data_requirement: 800,
        skew_threshold: T::infinity(),
        alpha: T::lit(0.5),
        beta: T::lit(0.5),
        deadline: T::infinity(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_values() {
        let inst = example1::<f64>();
        let r = objective(&inst, &[2, 3, 5], 0.6).unwrap();
        assert!((r - 1.1685).abs() < 1e-12);
        let mut only_cost = inst.clone();
        only_cost.alpha = 1.0;
        only_cost.beta = 0.0;
        assert!((objective(&only_cost, &[2, 3, 5], 0.6).unwrap() - 1.737).abs() < 1e-12);
        let mut only_time = inst;
        only_time.alpha = 0.0;
        only_time.beta = 1.0;
        assert_eq!(objective(&only_time, &[2, 3, 5], 0.6).unwrap(), 0.6);
    }

    #[test]
    fn validation() {
        let mut inst = example1::<f64>();
        assert!(inst.validate().is_ok());
        inst.channels = 0;
        assert!(inst.validate().is_err());
        let mut inst = example1::<f64>();
        inst.devices[0].upload_time = 0.0;
        assert!(inst.validate().is_err());
        let mut inst = example1::<f64>();
        inst.devices[1].id = 1;
        assert!(inst.validate().is_err());
        let mut inst = example1::<f64>();
        inst.alpha = 1.5;
        assert!(inst.validate().is_err());
    }
}
