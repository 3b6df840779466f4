use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use super::instance::{ScheduleSolution, TrainInstance};
use super::scheduling::cd_scheduling;
use crate::{Error, Result, Scalar};

fn take_prefix<T: Scalar>(instance: &TrainInstance<T>, order: &[usize]) -> Result<ScheduleSolution<T>> {
    instance.validate()?;
    let mut selected = Vec::new();
    let mut gathered = 0u64;
    for &id in order {
        if gathered >= instance.data_requirement {
            break;
        }
        gathered += instance.lookup(id)?.data_quantity;
        selected.push(id);
    }
    if gathered < instance.data_requirement {
        return Err(Error::Infeasible(format!(
            "devices hold {gathered} samples, below the requirement {}",
            instance.data_requirement
        )));
    }
    let schedule = cd_scheduling(&instance.jobs(&selected)?, instance.channels)?;
    ScheduleSolution::from_schedule(instance, &selected, schedule)
}

/// Takes devices in a uniformly random order until the data requirement is met.
pub fn random_fill<T: Scalar, R: Rng + ?Sized>(instance: &TrainInstance<T>, rng: &mut R) -> Result<ScheduleSolution<T>> {
    let mut order: Vec<usize> = instance.devices.iter().map(|d| d.id).collect();
    order.shuffle(rng);
    take_prefix(instance, &order)
}

/// [`random_fill`] with the device order given explicitly.
pub fn random_fill_with_order<T: Scalar>(instance: &TrainInstance<T>, order: &[usize]) -> Result<ScheduleSolution<T>> {
    take_prefix(instance, order)
}

/// Takes devices by data per unit cost, highest first, until the data requirement is met.
///
/// Zero-cost devices come first; ties go to the lowest id.
pub fn greedy_ratio<T: Scalar>(instance: &TrainInstance<T>) -> Result<ScheduleSolution<T>> {
    let mut devices: Vec<_> = instance.devices.iter().collect();
    devices.sort_by(|a, b| {
        let free = |c: T| c == T::zero();
        match (free(a.cost), free(b.cost)) {
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (true, true) => Ordering::Equal,
            (false, false) => {
                let ra = T::from_u64(a.data_quantity).unwrap() / a.cost;
                let rb = T::from_u64(b.data_quantity).unwrap() / b.cost;
                rb.partial_cmp(&ra).unwrap_or(Ordering::Equal)
            }
        }
        .then(a.id.cmp(&b.id))
    });
    let order: Vec<usize> = devices.iter().map(|d| d.id).collect();
    take_prefix(instance, &order)
}
