//! Batch scenario runner behind the command-line tool.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::anticipated::{expected_price_random, TwoStageSolver};
use crate::config::{ConfigError, ConfigFile};
use crate::equilibrium::{
    default_horizon, fmt12, lq_spectrum, no_habits_path, path, steady_state_lq, Grid, Trajectory,
};
use crate::error::ModelError;
use crate::labor_shift::{compare_with_margin, decompose, run_shift};
use crate::lockdown::{run_unanticipated, EpisodePaths, LockdownEpisode, SimSettings};
use crate::params::{compute_thresholds, Model, SectorRegime};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scenario `{scenario}` is infeasible: {source}")]
    Infeasible { scenario: String, source: ModelError },
    #[error("output error at {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Infeasible { .. } => 3,
            RunError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Scenario {
    NoLockdown,
    Unanticipated { t_tilde: f64 },
    Anticipated { horizon: f64 },
    Random { delta: f64 },
    LaborShift { xi_new: f64, t_tilde: f64 },
    NoHabits { t_tilde: f64 },
}

impl Scenario {
    /// Directory name of the scenario's outputs.
    pub fn name(&self) -> String {
        match self {
            Scenario::NoLockdown => "no_lockdown".into(),
            Scenario::Unanticipated { t_tilde } => format!("unanticipated_t{t_tilde}"),
            Scenario::Anticipated { horizon } => format!("anticipated_T{horizon}"),
            Scenario::Random { delta } => format!("random_delta{delta}"),
            Scenario::LaborShift { xi_new, t_tilde } => format!("labor_shift_xi{xi_new}_t{t_tilde}"),
            Scenario::NoHabits { t_tilde } => format!("no_habits_t{t_tilde}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_path: PathBuf,
    pub config: ConfigFile,
    pub scenarios: Vec<Scenario>,
    pub outdir: PathBuf,
    pub settings: SimSettings,
}

impl RunManifest {
    pub fn from_config(
        config_path: PathBuf,
        config: ConfigFile,
        outdir: PathBuf,
        settings: SimSettings,
    ) -> Result<Self, ConfigError> {
        let mut scenarios = vec![Scenario::NoLockdown];
        let durations = &config.lockdown.durations;
        scenarios.extend(durations.iter().map(|&t_tilde| Scenario::Unanticipated { t_tilde }));
        if let Some(a) = &config.anticipated {
            scenarios.extend(a.horizons.iter().map(|&horizon| Scenario::Anticipated { horizon }));
            scenarios.extend(a.deltas.iter().map(|&delta| Scenario::Random { delta }));
        }
        if let Some(xi_new) = config.shift_target() {
            scenarios.extend(durations.iter().map(|&t_tilde| Scenario::LaborShift { xi_new, t_tilde }));
        }
        if config.lockdown.no_habits_baseline {
            let t_tilde = durations.last().copied().unwrap_or(1.0);
            scenarios.push(Scenario::NoHabits { t_tilde });
        }
        let manifest = Self {
            config_path,
            config,
            scenarios,
            outdir,
            settings,
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.scenarios.is_empty() {
            return Err(ConfigError::Scenario("at least one scenario is required".into()));
        }
        if !(self.settings.dt > 0.0 && self.settings.dt.is_finite()) {
            return Err(ConfigError::Scenario("dt must be positive".into()));
        }
        if let Some(h) = self.settings.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(ConfigError::Scenario("horizon must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Named point sets for external plotting.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct FigureData {
    pub sets: Vec<PointSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PointSet {
    pub fn new(name: impl Into<String>, mut pts: Vec<(f64, f64)>) -> Self {
        pts.retain(|(x, y)| x.is_finite() && y.is_finite());
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            name: name.into(),
            x: pts.iter().map(|p| p.0).collect(),
            y: pts.iter().map(|p| p.1).collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y\n");
        for (x, y) in self.x.iter().zip(&self.y) {
            let _ = writeln!(s, "{},{}", fmt12(*x), fmt12(*y));
        }
        s
    }
}

/// State entering the inverse demand for good 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemandState {
    pub c1: f64,
    pub h: f64,
    pub lambda: f64,
}

impl DemandState {
    /// Two-sector state at `t`; during the lockdown the lockdown-path habits
    /// and consumption are paired with the two-sector shadow price.
    pub fn at(paths: &EpisodePaths, t: f64) -> Self {
        let lambda = paths.after.steady.lambda;
        let pt = if t < paths.t_reopen {
            paths.lockdown.at(t)
        } else {
            paths.after.at(t)
        };
        Self {
            c1: pt.c1,
            h: pt.h,
            lambda,
        }
    }

    pub fn before(paths: &EpisodePaths) -> Self {
        let pt = paths.no_lockdown.at(paths.no_lockdown.t0);
        Self {
            c1: pt.c1,
            h: pt.h,
            lambda: paths.no_lockdown.steady.lambda,
        }
    }

    pub fn steady(paths: &EpisodePaths) -> Self {
        let ss = &paths.no_lockdown.steady;
        Self {
            c1: ss.c1_star,
            h: ss.h_star,
            lambda: ss.lambda,
        }
    }

    pub fn inverse_demand(&self, m: &Model, c2: f64) -> f64 {
        let u = &m.utility;
        (u.a_c2 + u.a_c2c2 * c2 + u.a_c1c2 * self.c1 + u.a_c2h * self.h) / self.lambda
    }

    /// Quantity demanded at price `p`.
    pub fn demand(&self, m: &Model, p: f64) -> f64 {
        let u = &m.utility;
        (p * self.lambda - u.a_c2 - u.a_c1c2 * self.c1 - u.a_c2h * self.h) / u.a_c2c2
    }
}

const DEMAND_POINTS: usize = 101;
const SUPPLY_POINTS: usize = 11;

/// Inverse demand around y2 at `state` and the vertical supply at y2 starting
/// from the price floor.
pub fn demand_supply_snapshot(m: &Model, state: &DemandState, label: &str) -> FigureData {
    let y2 = m.outputs(SectorRegime::TwoSector).y2;
    let p_min = crate::equilibrium::two_sector_floor(m);
    let demand: Vec<(f64, f64)> = (0..DEMAND_POINTS)
        .map(|k| {
            let c2 = y2 * (0.5 + k as f64 / (DEMAND_POINTS - 1) as f64);
            (c2, state.inverse_demand(m, c2))
        })
        .collect();
    let top = demand.iter().map(|p| p.1).fold(p_min, f64::max);
    let supply = (0..SUPPLY_POINTS)
        .map(|k| (y2, p_min + (top - p_min) * k as f64 / (SUPPLY_POINTS - 1) as f64))
        .collect();
    FigureData {
        sets: vec![
            PointSet::new(format!("demand_{label}"), demand),
            PointSet::new(format!("supply_{label}"), supply),
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub summary: Value,
    pub figures: FigureData,
    pub files: Vec<PathBuf>,
}

struct Writer {
    files: Vec<PathBuf>,
}

impl Writer {
    fn write(&mut self, path: &Path, body: &str) -> Result<(), RunError> {
        let io = |source| RunError::Io {
            path: path.display().to_string(),
            source,
        };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io)?;
        }
        fs::write(path, body).map_err(io)?;
        self.files.push(path.to_path_buf());
        Ok(())
    }

    fn trajectory(&mut self, dir: &Path, segment: &str, tr: &Trajectory) -> Result<(), RunError> {
        self.write(&dir.join(format!("{segment}.csv")), &tr.to_csv())
    }
}

fn infeasible(s: &Scenario) -> impl Fn(ModelError) -> RunError + '_ {
    move |source| RunError::Infeasible {
        scenario: s.name(),
        source,
    }
}

/// Runs every scenario of the manifest and writes CSVs, figures and
/// `summary.json` under the output directory.
pub fn run(manifest: &RunManifest) -> Result<RunReport, RunError> {
    manifest.validate()?;
    let m = manifest.config.model();
    m.validate().map_err(ConfigError::from)?;
    let settings = manifest.settings;
    let out = &manifest.outdir;
    let mut w = Writer { files: vec![] };

    let first = manifest.scenarios.first().cloned().unwrap_or(Scenario::NoLockdown);
    let sd = lq_spectrum(&m).map_err(infeasible(&first))?;
    let thresholds = compute_thresholds(&m, sd.psi1).map_err(infeasible(&first))?;
    let horizon = settings.horizon.unwrap_or_else(|| default_horizon(sd.psi1));
    let mut figures = FigureData::default();
    let mut records = Vec::new();
    let mut solver: Option<TwoStageSolver> = None;

    for sc in &manifest.scenarios {
        let dir = out.join(sc.name());
        let fail = infeasible(sc);
        let record = match *sc {
            Scenario::NoLockdown => {
                let (b0, h0) = (m.initial.b0, m.initial.h0);
                let ss = steady_state_lq(&m, m.outputs(SectorRegime::TwoSector), sd.psi1, b0, h0)
                    .map_err(&fail)?;
                let tr = path(&m, &ss, b0, h0, &Grid::new(0.0, horizon, settings.dt));
                w.trajectory(&dir, "two_sector", &tr)?;
                figures.sets.push(PointSet::new(
                    "price_no_lockdown",
                    tr.t.iter().zip(&tr.p).filter_map(|(t, p)| p.map(|p| (*t, p))).collect(),
                ));
                figures
                    .sets
                    .push(PointSet::new("habit_no_lockdown", tr.t.iter().copied().zip(tr.h.iter().copied()).collect()));
                json!({ "steady_state": ss })
            }
            Scenario::Unanticipated { t_tilde } => {
                let ep = LockdownEpisode::new(t_tilde);
                let res = run_unanticipated(&m, &ep, &settings).map_err(&fail)?;
                for seg in &res.segments {
                    w.trajectory(&dir, &seg.name, &seg.trajectory)?;
                }
                let tag = format!("t{t_tilde}");
                let after = &res.segment("after").expect("after segment").trajectory;
                let lock = &res.segment("lockdown").expect("lockdown segment").trajectory;
                let p_star = res.paths.p_star();
                let p_pts: Vec<(f64, f64)> =
                    after.t.iter().zip(&after.p).filter_map(|(t, p)| p.map(|p| (*t, p))).collect();
                figures.sets.push(PointSet::new(
                    format!("price_deviation_{tag}"),
                    p_pts.iter().map(|(t, p)| (*t, p - p_star)).collect(),
                ));
                figures.sets.push(PointSet::new(format!("price_{tag}"), p_pts));
                let mut habit: Vec<(f64, f64)> = lock.t.iter().copied().zip(lock.h.iter().copied()).collect();
                habit.extend(after.t.iter().copied().zip(after.h.iter().copied()).skip(1));
                figures.sets.push(PointSet::new(format!("habit_{tag}"), habit));
                if let Some(shut) = res.segment("shutdown") {
                    let tr = &shut.trajectory;
                    figures.sets.push(PointSet::new(
                        format!("habit_shutdown_{tag}"),
                        tr.t.iter().copied().zip(tr.h.iter().copied()).collect(),
                    ));
                }
                let before = demand_supply_snapshot(&m, &DemandState::before(&res.paths), "before");
                let after_snap = demand_supply_snapshot(
                    &m,
                    &DemandState::at(&res.paths, res.paths.t_reopen),
                    &format!("reopening_{tag}"),
                );
                for set in before.sets.into_iter().chain(after_snap.sets) {
                    if !figures.sets.iter().any(|s| s.name == set.name) {
                        figures.sets.push(set);
                    }
                }
                let curve: Vec<(f64, f64)> = (1..=40)
                    .filter_map(|k| {
                        let d = t_tilde * 2.0 * k as f64 / 40.0;
                        EpisodePaths::build(&m, &LockdownEpisode::new(d))
                            .ok()
                            .map(|p| (d, crate::lockdown::PentUpMetrics::from_paths(&m, &p).dc2_pct))
                    })
                    .collect();
                figures.sets.push(PointSet::new(format!("demand_shift_{tag}"), curve));
                json!({
                    "t_tilde": t_tilde,
                    "classification": res.classification.case,
                    "t_underline": res.t_underline,
                    "reopens": res.reopens,
                    "p_at_reopen": res.p_at_reopen,
                    "p_min": res.p_min,
                    "p_star": p_star,
                    "h_reopen": res.paths.h_reopen,
                    "b_reopen": res.paths.b_reopen,
                    "h_star_lockdown": res.paths.lockdown.steady.h_star,
                    "h_star_after": res.paths.after.steady.h_star,
                    "lambda_after": res.paths.after.steady.lambda,
                    "pent_up": res.pent_up,
                    "policy": res.policy.as_ref().map(|p| json!({
                        "t_reopen": p.t_reopen,
                        "duration": p.duration,
                        "total_reduction": p.total_reduction,
                    })),
                })
            }
            Scenario::Anticipated { horizon: t } => {
                let s = match &solver {
                    Some(s) => *s,
                    None => {
                        let s = TwoStageSolver::new(&m).map_err(&fail)?;
                        solver = Some(s);
                        s
                    }
                };
                let sol = s.solve(t, &settings).map_err(&fail)?;
                w.trajectory(&dir, "during", &sol.during)?;
                w.trajectory(&dir, "after", &sol.after)?;
                let constants = serde_json::to_string_pretty(&sol.constants).unwrap_or_default();
                w.write(&dir.join("constants.json"), &(constants + "\n"))?;
                json!({
                    "horizon": t,
                    "p_reopen": sol.p_reopen,
                    "b_T": sol.b_t,
                    "h_T": sol.h_t,
                    "condition": sol.condition,
                    "value_function": s.value,
                    "constants": sol.constants,
                })
            }
            Scenario::Random { delta } => {
                let s = match &solver {
                    Some(s) => *s,
                    None => {
                        let s = TwoStageSolver::new(&m).map_err(&fail)?;
                        solver = Some(s);
                        s
                    }
                };
                match expected_price_random(&s, delta, &QuadratureSpec::default()) {
                    Ok(rep) => {
                        let body = serde_json::to_string_pretty(&rep).unwrap_or_default();
                        w.write(&dir.join("expected_price.json"), &(body + "\n"))?;
                        json!({ "delta": delta, "status": "ok", "report": rep })
                    }
                    Err(e) => json!({ "delta": delta, "status": "undefined", "reason": e.to_string() }),
                }
            }
            Scenario::LaborShift { xi_new, t_tilde } => {
                let ep = LockdownEpisode::new(t_tilde);
                let margin = manifest
                    .config
                    .labor_shift
                    .as_ref()
                    .map(|l| l.satiation_margin)
                    .unwrap_or(0.0);
                let xi_old = m.technology.xi;
                let cmp = compare_with_margin(&m, xi_old, xi_new, margin).map_err(&fail)?;
                let run = run_shift(&m, &ep, xi_new, &settings).map_err(&fail)?;
                let dec = decompose(&m, &ep, xi_old, xi_new, ep.reopening_time(), 0.0).map_err(&fail)?;
                w.trajectory(&dir, "after", &run.after)?;
                json!({
                    "xi_old": xi_old,
                    "xi_new": xi_new,
                    "t_tilde": t_tilde,
                    "comparison": cmp,
                    "p_reopen": run.p_reopen,
                    "p_star_after_shift": run.p_star_al,
                    "convergence": run.direction,
                    "decomposition": dec,
                })
            }
            Scenario::NoHabits { t_tilde } => {
                let mut mh = m;
                mh.utility.a_h = 0.0;
                mh.utility.a_hh = 0.0;
                mh.utility.a_c1h = 0.0;
                mh.utility.a_c2h = 0.0;
                let b0 = m.initial.b0;
                let before = no_habits_path(&mh, SectorRegime::TwoSector, b0, &Grid::new(0.0, t_tilde, settings.dt))
                    .map_err(&fail)?;
                let during = no_habits_path(&mh, SectorRegime::Lockdown, b0, &Grid::new(0.0, t_tilde, settings.dt))
                    .map_err(&fail)?;
                let after = no_habits_path(&mh, SectorRegime::TwoSector, b0, &Grid::new(t_tilde, horizon, settings.dt))
                    .map_err(&fail)?;
                w.trajectory(&dir, "no_lockdown", &before)?;
                w.trajectory(&dir, "lockdown", &during)?;
                w.trajectory(&dir, "after", &after)?;
                json!({
                    "t_tilde": t_tilde,
                    "c1_before": before.c1[0],
                    "c1_after": after.c1[0],
                    "p_before": before.p[0],
                    "p_after": after.p[0],
                })
            }
        };
        records.push(json!({ "name": sc.name(), "kind": sc, "result": record }));
    }

    let p_min = thresholds.p_min;
    let t_end = figures
        .sets
        .iter()
        .filter(|s| s.name.starts_with("price_"))
        .filter_map(|s| s.x.last().copied())
        .fold(horizon, f64::max);
    figures
        .sets
        .push(PointSet::new("price_floor", vec![(0.0, p_min), (t_end, p_min)]));
    for set in &figures.sets {
        w.write(&out.join("figures").join(format!("{}.csv", set.name)), &set.to_csv())?;
    }

    let summary = json!({
        "config": manifest.config_path.display().to_string(),
        "settings": { "dt": settings.dt, "horizon": horizon },
        "model": m,
        "spectrum": sd,
        "thresholds": thresholds,
        "scenarios": records,
    });
    let body = serde_json::to_string_pretty(&summary).unwrap_or_default();
    w.write(&out.join("summary.json"), &(body + "\n"))?;
    Ok(RunReport {
        summary,
        figures,
        files: w.files,
    })
}

/// One line per scenario for `--list-scenarios`.
pub fn list_scenarios(manifest: &RunManifest) -> String {
    manifest
        .scenarios
        .iter()
        .map(|s| s.name() + "\n")
        .collect()
}
