use std::fs;
use std::path::Path;

use rand::Rng;

use super::config::{ExperimentConfig, ScheduleSpec};
use super::metrics::MetricsRecord;
use super::run::{check, rng_for, stream, HResult, ScenarioOutput};
use crate::sched::{
    brute_force, example1 as example1_instance, greedy_ratio, primal_dual_run, random_fill, random_fill_with_order,
    DeviceProfile, ScheduleSolution, TrainInstance, MAX_BRUTE_FORCE_CHANNELS,
};
use crate::Error;

/// Random instance with `|K|` and `|M|` drawn from the spec's bounds, `t ∈ (0, 2]`,
/// `D ∈ [1, 100]`, `c ∈ (0, 1]`, `α, β ∈ [0, 1]`, `𝒟 ∈ [1, Σ D]` and no skew filter.
pub fn random_instance<R: Rng + ?Sized>(spec: &ScheduleSpec, rng: &mut R) -> TrainInstance<f64> {
    let k = rng.random_range(spec.min_devices..=spec.max_devices);
    let devices: Vec<_> = (0..k)
        .map(|i| {
            let t = 2.0 - rng.random_range(0.0..2.0);
            let c = 1.0 - rng.random_range(0.0..1.0);
            DeviceProfile::new(i, t, rng.random_range(1..=100), 0.0, c)
        })
        .collect();
    let total: u64 = devices.iter().map(|d| d.data_quantity).sum();
    TrainInstance {
        devices,
        channels: rng.random_range(1..=spec.max_channels),
        data_requirement: rng.random_range(1..=total),
        skew_threshold: f64::INFINITY,
        alpha: rng.random_range(0.0..=1.0),
        beta: rng.random_range(0.0..=1.0),
        deadline: f64::INFINITY,
    }
}

fn solution_record(scenario: &str, variant: impl Into<String>, s: &ScheduleSolution<f64>) -> MetricsRecord {
    MetricsRecord {
        objective: Some(s.objective),
        makespan: Some(s.makespan),
        expenditure: Some(s.expenditure),
        ..MetricsRecord::new(scenario, variant)
    }
}

/// Feasibility and the list-scheduling bound, checked on every written solution.
fn assert_solution(name: &str, s: &ScheduleSolution<f64>, inst: &TrainInstance<f64>) -> HResult<()> {
    s.check_feasible(inst)
        .map_err(|e| super::HarnessError::Assertion(format!("{name}: {e}")))?;
    let bound = s.makespan_bound(inst)?;
    check(s.makespan <= bound + 1e-12, || {
        format!("{name}: makespan {} exceeds the bound {bound}", s.makespan)
    })
}

fn within_caps(inst: &TrainInstance<f64>, spec: &ScheduleSpec) -> bool {
    inst.devices.len() <= spec.brute_force_cap && inst.channels <= MAX_BRUTE_FORCE_CHANNELS
}

pub(crate) fn schedule(config: &ExperimentConfig, out: &Path) -> HResult<ScenarioOutput> {
    let spec = &config.schedule;
    let mut o = ScenarioOutput::default();
    if !spec.instance.is_empty() {
        let inst = TrainInstance::<f64>::read_from(&spec.instance)?;
        let pd = primal_dual_run(&inst)?.solution;
        check(pd.passes_skew_filter(&inst), || "primal-dual selected a device above the skew threshold".into())?;
        let mut solutions = vec![
            ("primal-dual", pd),
            ("greedy-ratio", greedy_ratio(&inst)?),
            ("random-fill", random_fill(&inst, &mut rng_for(config.seed, stream::SCHEDULE))?),
        ];
        if within_caps(&inst, spec) {
            solutions.push(("optimum", brute_force(&inst, spec.brute_force_cap)?));
        }
        let opt = solutions.iter().find(|s| s.0 == "optimum").map(|s| s.1.objective);
        for (name, s) in &solutions {
            assert_solution(name, s, &inst)?;
            let mut r = solution_record("schedule", *name, s);
            r.ratio = opt.filter(|&v| v > 0.0).map(|v| s.objective / v);
            if *name == "primal-dual" {
                if let Some(ratio) = r.ratio {
                    check(ratio <= 3.0 + 1e-9, || format!("approximation ratio {ratio} exceeds 3"))?;
                }
            }
            o.records.push(r);
            let file = format!("solution-{name}.json");
            fs::write(out.join(&file), s.to_json()?).map_err(Error::from)?;
            o.files.push(file);
            o.summary.push(format!(
                "{name}: selected {:?}, T = {}, C = {}, objective = {}",
                s.selected, s.makespan, s.expenditure, s.objective
            ));
        }
        o.notes.push(format!("aggregate skew constraint holds for primal-dual: {}", solutions[0].1.aggregate_skew_ok(&inst)));
        return Ok(o);
    }

    let mut rng = rng_for(config.seed, stream::SCHEDULE);
    let mut worst = 0.0f64;
    for i in 0..spec.random_instances {
        let inst = random_instance(spec, &mut rng);
        let pd = primal_dual_run(&inst)?.solution;
        let opt = brute_force(&inst, spec.brute_force_cap)?;
        assert_solution("primal-dual", &pd, &inst)?;
        assert_solution("optimum", &opt, &inst)?;
        let ratio = if opt.objective > 0.0 { pd.objective / opt.objective } else { 1.0 };
        check(ratio <= 3.0 + 1e-9, || format!("instance {i}: approximation ratio {ratio} exceeds 3"))?;
        worst = worst.max(ratio);
        let mut r = solution_record("schedule", "instance", &pd);
        r.step = Some(i as u64);
        r.ratio = Some(ratio);
        o.records.push(r);
    }
    o.records.push(MetricsRecord {
        ratio: Some(worst),
        value: Some(spec.random_instances as f64),
        ..MetricsRecord::new("schedule", "max-ratio")
    });
    o.summary.push(format!("max approximation ratio {worst} over {} instances", spec.random_instances));
    Ok(o)
}

/// Pinned device order for the random-fill baseline.
const PINNED_ORDER: [usize; 5] = [4, 2, 1, 3, 5];

struct Golden {
    name: &'static str,
    selected: &'static [usize],
    makespan: Option<f64>,
    expenditure: Option<f64>,
    objective: f64,
}

const GOLDEN: [Golden; 3] = [
    Golden {
        name: "primal-dual",
        selected: &[2, 3, 5],
        makespan: Some(0.6),
        expenditure: Some(1.737),
        objective: 1.1685,
    },
    Golden {
        name: "greedy-ratio",
        selected: &[1, 4],
        makespan: Some(1.9),
        expenditure: Some(1.792),
        objective: 1.846,
    },
    Golden {
        name: "random-fill-pinned",
        selected: &[2, 4],
        makespan: Some(1.9),
        expenditure: Some(1.633),
        objective: 1.7665,
    },
];

const GROUP_LEVELS: [f64; 5] = [0.2, 0.4, 0.5, 0.6, 1.9];
const GROUP_MEMBERS: [&[usize]; 5] = [&[5], &[5, 3], &[5, 3, 2], &[5, 3, 2, 1], &[5, 3, 2, 1, 4]];

pub(crate) fn example1(config: &ExperimentConfig, out: &Path) -> HResult<ScenarioOutput> {
    const TOL: f64 = 1e-9;
    let inst = example1_instance::<f64>();
    inst.write_to(out.join("example1-instance.csv"))?;
    let run = primal_dual_run(&inst)?;
    let mut o = ScenarioOutput::default();
    o.files.push("example1-instance.csv".into());

    for g in &run.groups {
        let h = g.index - 1;
        check(g.level == GROUP_LEVELS[h] && g.members == GROUP_MEMBERS[h], || {
            format!("group {} is {:?} at level {}", g.index, g.members, g.level)
        })?;
        o.records.push(MetricsRecord {
            step: Some(g.index as u64),
            value: Some(g.level),
            ..MetricsRecord::new("example1", format!("group-{}:{}", g.index, if g.kept { "kept" } else { "discarded" }))
        });
        o.summary.push(format!(
            "G{}: level {} members {:?} data {} {}",
            g.index,
            g.level,
            g.members,
            g.data,
            if g.kept { "kept" } else { "discarded" }
        ));
    }
    for c in &run.candidates {
        let mut r = MetricsRecord::new("example1", format!("candidate-{}", c.group));
        r.objective = Some(c.cost);
        r.makespan = Some(c.schedule.makespan);
        r.expenditure = Some(c.expenditure);
        o.records.push(r);
        o.summary.push(format!("G{} gathers {:?}: cost {}", c.group, c.selected, c.cost));
    }

    let solutions = [
        run.solution.clone(),
        greedy_ratio(&inst)?,
        random_fill_with_order(&inst, &PINNED_ORDER)?,
    ];
    for (golden, s) in GOLDEN.iter().zip(&solutions) {
        assert_solution(golden.name, s, &inst)?;
        let close = |a: f64, b: Option<f64>| b.is_none_or(|b| (a - b).abs() <= TOL);
        check(
            s.selected == golden.selected
                && close(s.makespan, golden.makespan)
                && close(s.expenditure, golden.expenditure)
                && close(s.objective, Some(golden.objective)),
            || format!("{}: got {:?} with objective {}", golden.name, s.selected, s.objective),
        )?;
        o.records.push(solution_record("example1", golden.name, s));
        fs::write(out.join(format!("solution-{}.json", golden.name)), s.to_json()?).map_err(Error::from)?;
        o.files.push(format!("solution-{}.json", golden.name));
        o.summary.push(format!(
            "{}: selected {:?}, T = {:.4}, C = {:.4}, objective = {:.4}",
            golden.name, s.selected, s.makespan, s.expenditure, s.objective
        ));
    }
    let seeded = random_fill(&inst, &mut rng_for(config.seed, stream::SCHEDULE))?;
    assert_solution("random-fill", &seeded, &inst)?;
    o.records.push(solution_record("example1", "random-fill-seeded", &seeded));
    Ok(o)
}
