use std::collections::BTreeMap;

use super::grouping::DeviceGroup;
use super::instance::{DeviceProfile, TrainInstance};
use crate::{Error, Result, Scalar};

/// One iteration of the covering loop.
#[derive(Debug, Clone, PartialEq)]
pub struct DualRound<T> {
    pub chosen: usize,
    /// The minimum ratio `y_δ` that was paid in this round.
    pub y: T,
    /// Residual demand `𝒟 − D(δ)` before the round.
    pub residual: u64,
    /// Potentials of the devices still open at the start of the round, after the update.
    pub potentials: BTreeMap<usize, T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualState<T> {
    /// Chosen devices in selection order.
    pub selected: Vec<usize>,
    /// Final potential of every group member; frozen once a device is chosen.
    pub potentials: BTreeMap<usize, T>,
    pub rounds: Vec<DualRound<T>>,
}

impl<T: Scalar> DualState<T> {
    /// Selected ids, ascending.
    pub fn selected_sorted(&self) -> Vec<usize> {
        let mut s = self.selected.clone();
        s.sort_unstable();
        s
    }
}

/// `ĉ(i) = α·c(i) + β·t(i)/|M|`.
pub fn reduced_cost<T: Scalar>(instance: &TrainInstance<T>, device: &DeviceProfile<T>) -> T {
    instance.alpha * device.cost
        + instance.beta * device.upload_time / T::from_usize(instance.channels).unwrap()
}

/// Primal-dual covering of the data requirement within one group.
///
/// Each round picks the open device minimising `(ĉ(i) − b(i)) / s(i)` with
/// `s(i) = min(D(i), 𝒟 − D(δ))`, lowest id on ties, then raises every open potential
/// (the chosen one included) by `s(i)·y` before closing the chosen device. Devices with
/// `s(i) = 0` are never chosen.
pub fn cd_gathering<T: Scalar>(group: &DeviceGroup<T>, instance: &TrainInstance<T>) -> Result<DualState<T>> {
    if instance.channels == 0 {
        return Err(Error::invalid("at least one channel is required"));
    }
    let requirement = instance.data_requirement;
    let mut open: Vec<(&DeviceProfile<T>, T)> = group
        .members
        .iter()
        .map(|&id| instance.lookup(id).map(|d| (d, reduced_cost(instance, d))))
        .collect::<Result<_>>()?;
    let available: u64 = open.iter().map(|(d, _)| d.data_quantity).sum();
    if available < requirement {
        return Err(Error::Infeasible(format!(
            "group {} holds {available} samples, below the requirement {requirement}",
            group.index
        )));
    }
    open.sort_by_key(|(d, _)| d.id);

    let mut potentials: BTreeMap<usize, T> = open.iter().map(|(d, _)| (d.id, T::zero())).collect();
    let mut selected = Vec::new();
    let mut rounds = Vec::new();
    let mut gathered = 0u64;

    while gathered < requirement {
        let residual = requirement - gathered;
        let mut best: Option<(usize, T)> = None;
        for (k, (d, c_hat)) in open.iter().enumerate() {
            let s = d.data_quantity.min(residual);
            if s == 0 {
                continue;
            }
            let y = (*c_hat - potentials[&d.id]) / T::from_u64(s).unwrap();
            if best.is_none_or(|(_, b)| y < b) {
                best = Some((k, y));
            }
        }
        let Some((k, y)) = best else {
            return Err(Error::Infeasible("open devices carry no data".into()));
        };
        for (d, _) in &open {
            let s = d.data_quantity.min(residual);
            *potentials.get_mut(&d.id).unwrap() += T::from_u64(s).unwrap() * y;
        }
        let (chosen, _) = open.remove(k);
        gathered += chosen.data_quantity;
        selected.push(chosen.id);
        rounds.push(DualRound {
            chosen: chosen.id,
            y,
            residual,
            potentials: std::iter::once(chosen.id)
                .chain(open.iter().map(|(d, _)| d.id))
                .map(|id| (id, potentials[&id]))
                .collect(),
        });
    }

    Ok(DualState {
        selected,
        potentials,
        rounds,
    })
}
