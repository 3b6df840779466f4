//! Device selection and upload scheduling.
//!
//! Given devices with upload time `t(i)`, data quantity `D(i)`, distribution skewness
//! `E(i)` and expenditure `c(i)`, choose a subset with `Σ D(i) ≥ 𝒟` and assign it to `|M|`
//! upload channels so as to minimise `ℜ = α·C + β·T`, where `C` is the summed expenditure
//! and `T` the makespan over channels.
//!
//! [`solve_primal_dual`] runs four phases:
//!
//! 1. [`cd_grouping`]: one candidate group per distinct upload time `l`, holding the
//!    devices with `t(i) ≤ l` and `E(i) ≤ ℰ`; groups that cannot reach `𝒟` are discarded.
//! 2. [`cd_gathering`]: primal-dual covering inside each group. With reduced cost
//!    `ĉ(i) = α·c(i) + β·t(i)/|M|` and residual contribution `s(i) = min(D(i), 𝒟 − D(δ))`,
//!    repeatedly pick the device minimising `(ĉ(i) − b(i)) / s(i)` and raise every open
//!    potential `b(i)` by `s(i)` times that minimum.
//! 3. [`cd_scheduling`]: longest-upload-first list scheduling onto the least loaded channel.
//! 4. [`fs_selection`]: keep the candidate with the lowest `β·τ + α·Σc(i)`.
//!
//! The result is within a factor 3 of the optimum, which [`brute_force`] checks on small
//! instances.

mod baselines;
mod brute;
mod gathering;
mod grouping;
mod instance;
mod io;
mod scheduling;
mod selection;

pub use baselines::{greedy_ratio, random_fill, random_fill_with_order};
pub use brute::{brute_force, optimal_makespan, DEFAULT_BRUTE_FORCE_CAP, MAX_BRUTE_FORCE_CHANNELS};
pub use gathering::{cd_gathering, reduced_cost, DualRound, DualState};
pub use grouping::{cd_grouping, DeviceGroup};
pub use instance::{example1, objective, DeviceProfile, ScheduleSolution, TrainInstance};
pub use scheduling::{cd_scheduling, makespan_bound, ChannelSchedule};
pub use selection::{fs_selection, primal_dual_run, solve_primal_dual, Candidate, PrimalDualRun};
