use super::instance::TrainInstance;
use crate::{Error, Result, Scalar};

/// Devices whose upload time is at most `level` and whose skewness passes the filter.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceGroup<T> {
    /// One-based position in level order.
    pub index: usize,
    pub level: T,
    /// Member ids ordered by upload time, then id.
    pub members: Vec<usize>,
    pub data: u64,
    /// `false` when the members cannot meet the data requirement.
    pub kept: bool,
}

/// Builds one group per distinct upload time, in ascending level order.
///
/// Discarded groups are returned with `kept == false` so callers can inspect them; an
/// error is returned when every group is discarded.
pub fn cd_grouping<T: Scalar>(instance: &TrainInstance<T>) -> Result<Vec<DeviceGroup<T>>> {
    if instance.devices.is_empty() {
        return Err(Error::Infeasible("no devices".into()));
    }
    let mut levels: Vec<T> = instance.devices.iter().map(|d| d.upload_time).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("upload times are finite"));
    levels.dedup();

    let mut sorted: Vec<_> = instance.devices.iter().collect();
    sorted.sort_by(|a, b| {
        a.upload_time
            .partial_cmp(&b.upload_time)
            .expect("upload times are finite")
            .then(a.id.cmp(&b.id))
    });

    let groups: Vec<DeviceGroup<T>> = levels
        .into_iter()
        .enumerate()
        .map(|(h, level)| {
            let members: Vec<_> = sorted
                .iter()
                .filter(|d| d.upload_time <= level && d.skewness <= instance.skew_threshold)
                .collect();
            let data = members.iter().map(|d| d.data_quantity).sum();
            DeviceGroup {
                index: h + 1,
                level,
                members: members.iter().map(|d| d.id).collect(),
                data,
                kept: data >= instance.data_requirement,
            }
        })
        .collect();

    if groups.iter().all(|g| !g.kept) {
        return Err(Error::Infeasible(format!(
            "no group reaches the data requirement {}",
            instance.data_requirement
        )));
    }
    Ok(groups)
}
