//! Orchestration of the analysis subcommands: resolve the configuration,
//! run the core computation, and emit the CSV artifacts plus manifest.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use phasetip_core::basin::{bi_region, find_separatrix, unstable_arcs, BiFlag};
use phasetip_core::cycles::{find_stable_cycle, LimitCycle, Stability};
use phasetip_core::exec::Executor;
use phasetip_core::forcing::ShiftKind;
use phasetip_core::integrate::{integrate_autonomous, integrate_nonautonomous, Trajectory};
use phasetip_core::models::{Model, ModelParams, ParamKey, State};
use phasetip_core::phase::{build_phased_cycle, PhasedCycle};
use phasetip_core::regions::{scan_one_param, scan_two_param, window_folds};
use phasetip_core::tipping::{
    critical_rates, instability_magnitude, pace_vs_phase, series_demo, tc_sweep, tipping_diagram,
    Outcome, TippingGrid, TippingSetup,
};

use crate::config::{ConfigError, RunConfig};
use crate::exec::RayonExecutor;
use crate::output::{fmt_f64, OutputDir};

/// Top-level failure: configuration (exit 1) or numerics/IO (exit 2).
#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerics(phasetip_core::Error),
    Io(std::io::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Numerics(e) => write!(f, "{}: {e}", e.name()),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<phasetip_core::Error> for RunError {
    fn from(e: phasetip_core::Error) -> Self {
        RunError::Numerics(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

pub type RunResult = Result<(), RunError>;

/// Executor that logs one line per whole percent of completed cells.
struct Progress<'a> {
    inner: &'a RayonExecutor,
    label: &'a str,
}

impl<'a> Executor for Progress<'a> {
    fn run_cells<T: Send>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        let done = AtomicUsize::new(0);
        let wrapped = |i: usize| -> T {
            let out = f(i);
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            if n >= 100 && k % n.div_ceil(100) == 0 {
                eprintln!("{}: {}%", self.label, 100 * k / n);
            }
            out
        };
        self.inner.run_cells(n, &wrapped)
    }
}

fn cycle_rows(name: &str, cycle: &LimitCycle, rows: &mut Vec<String>) {
    let n = cycle.samples.len();
    for (idx, s) in cycle.samples.iter().enumerate() {
        let phi = core::f64::consts::TAU * idx as f64 / n as f64;
        rows.push(format!("{name},{idx},{},{},{}", fmt_f64(s.x), fmt_f64(s.y), fmt_f64(phi)));
    }
}

fn summary_row(name: &str, cycle: &LimitCycle) -> String {
    let stability = match cycle.stability {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
    };
    format!(
        "{name},{},{},{},{},{stability}",
        fmt_f64(cycle.period),
        fmt_f64(cycle.amplitude()),
        fmt_f64(cycle.max_x()),
        fmt_f64(cycle.min_x()),
    )
}

/// Find the configured base cycle and its phase parametrisation.
fn base_cycle(cfg: &RunConfig, params: &ModelParams) -> Result<PhasedCycle, RunError> {
    let icfg = cfg.integrator()?;
    let ccfg = cfg.cycle_search();
    let cycle = find_stable_cycle(params, cfg.base_seed()?, &icfg, &ccfg)?;
    Ok(build_phased_cycle(&cycle)?)
}

fn outcome_row(prefix: &str, o: &Outcome) -> String {
    format!(
        "{prefix},{},{},{},{}",
        o.kind.name(),
        o.attractor.name(),
        fmt_f64(o.dist_gamma1),
        fmt_f64(o.dist_gamma2)
    )
}

fn tipping_grid_rows(grid: &TippingGrid) -> Vec<String> {
    let mut rows = Vec::with_capacity(grid.outcomes.len());
    for (i, &b) in grid.b_axis.iter().enumerate() {
        for (j, &r) in grid.r_axis.iter().enumerate() {
            rows.push(outcome_row(
                &format!("{},{}", fmt_f64(b), fmt_f64(r)),
                grid.outcome(i, j),
            ));
        }
    }
    rows
}

pub fn run_simulate(cfg: &RunConfig, out: &OutputDir) -> RunResult {
    let params = cfg.model_params()?;
    let sim = cfg
        .simulate
        .as_ref()
        .ok_or(ConfigError("simulate requires a [simulate] section".into()))?;
    let icfg = cfg.integrator()?;
    let x0 = State::new(sim.x0[0], sim.x0[1]);
    let traj: Trajectory = if sim.with_shift {
        let path = cfg.parameter_path()?;
        let level = path
            .driver
            .get(&params)
            .ok_or(ConfigError("path.param does not belong to the model".into()))?;
        let base_period = match cfg.shift.as_ref().and_then(|s| s.t_c) {
            Some(_) => 1.0, // absolute t_c given; period is not needed
            None => base_cycle(cfg, &params)?.cycle.period,
        };
        let shift = cfg.build_shift(level, base_period)?;
        integrate_nonautonomous(&params, &path, &shift, x0, (0.0, sim.t_span), &icfg)?
    } else {
        integrate_autonomous(&params, x0, (0.0, sim.t_span), &icfg)?
    };
    let mut rows = Vec::new();
    let mut t = 0.0;
    while t < sim.t_span {
        let s = traj.state_at(t);
        rows.push(format!("{},{},{}", fmt_f64(t), fmt_f64(s.x), fmt_f64(s.y)));
        t += sim.stride;
    }
    let end = traj.end_state();
    rows.push(format!("{},{},{}", fmt_f64(traj.end_time()), fmt_f64(end.x), fmt_f64(end.y)));
    out.write_csv("trajectory.csv", "t,x,y", &rows)?;
    Ok(())
}

pub fn run_cycles(cfg: &RunConfig, out: &OutputDir) -> RunResult {
    let params = cfg.model_params()?;
    let icfg = cfg.integrator()?;
    let ccfg = cfg.cycle_search();
    let probe = phasetip_core::regions::attractor_census(&params, &icfg, &ccfg)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    match probe.cycles.len() {
        2 => {
            let pc2 = build_phased_cycle(&probe.cycles[0])?;
            let pc1 = build_phased_cycle(&probe.cycles[1])?;
            cycle_rows("gamma2", &pc2.cycle, &mut rows);
            cycle_rows("gamma1", &pc1.cycle, &mut rows);
            summary.push(summary_row("gamma2", &pc2.cycle));
            summary.push(summary_row("gamma1", &pc1.cycle));
            if let Ok(boundary) = find_separatrix(&params, &icfg, &ccfg) {
                let theta = build_phased_cycle(&boundary.theta)?;
                cycle_rows("theta", &theta.cycle, &mut rows);
                summary.push(summary_row("theta", &theta.cycle));
            }
        }
        1 => {
            let pc = build_phased_cycle(&probe.cycles[0])?;
            cycle_rows("gamma1", &pc.cycle, &mut rows);
            summary.push(summary_row("gamma1", &pc.cycle));
        }
        _ => {}
    }
    let eq = probe.equilibrium;
    out.write_csv("cycles.csv", "cycle,idx,x,y,phi", &rows)?;
    out.write_csv("summary.csv", "cycle,period,amplitude,max_x,min_x,stability", &summary)?;
    out.write_csv(
        "equilibrium.csv",
        "x,y,stability,eig1_re,eig1_im,eig2_re,eig2_im",
        &[format!(
            "{},{},{},{},{},{},{}",
            fmt_f64(eq.location.x),
            fmt_f64(eq.location.y),
            if eq.stability == Stability::Stable { "stable" } else { "unstable" },
            fmt_f64(eq.eigenvalues[0].re),
            fmt_f64(eq.eigenvalues[0].im),
            fmt_f64(eq.eigenvalues[1].re),
            fmt_f64(eq.eigenvalues[1].im),
        )],
    )?;
    if let ModelParams::Vdp(p) = &params {
        let roots = phasetip_core::cycles::amplitude_roots(p);
        let root_rows: Vec<String> = roots
            .iter()
            .enumerate()
            .map(|(i, a)| format!("{i},{}", fmt_f64(*a)))
            .collect();
        out.write_csv("amplitude_roots.csv", "root_index,amplitude", &root_rows)?;
    }
    Ok(())
}

pub fn run_scan1d(cfg: &RunConfig, out: &OutputDir) -> RunResult {
    let params = cfg.model_params()?;
    let scan = cfg.scan.as_ref().ok_or(ConfigError("scan1d requires a [scan] section".into()))?;
    let key = ParamKey::parse(&scan.param)
        .ok_or_else(|| ConfigError(format!("unknown scan.param `{}`", scan.param)))?;
    let values = scan.values.values()?;
    let icfg = cfg.integrator()?;
    let ccfg = cfg.cycle_search();
    let exec = Progress { inner: &RayonExecutor, label: "scan1d" };
    let points = scan_one_param(&params, key, &values, &icfg, &ccfg, &exec);
    let mut rows = Vec::new();
    for point in points.iter().flatten() {
        let v = fmt_f64(point.value);
        for (branch, data) in
            [("gamma1", point.gamma1), ("gamma2", point.gamma2), ("theta", point.theta)]
        {
            if let Some((max, min, period)) = data {
                rows.push(format!("{v},{branch}_max,{}", fmt_f64(max)));
                rows.push(format!("{v},{branch}_min,{}", fmt_f64(min)));
                rows.push(format!("{v},{branch}_period,{}", fmt_f64(period)));
            }
        }
        rows.push(format!("{v},eq_x,{}", fmt_f64(point.eq_x)));
        rows.push(format!("{v},eq_stable,{}", u8::from(point.eq_stable)));
    }
    out.write_csv("branches.csv", "param,branch,value", &rows)?;
    let (f_l1, f_l2) = window_folds(&params, key, &values, &points, &icfg, &ccfg);
    let mut fold_rows = Vec::new();
    if let Some(f) = f_l1 {
        fold_rows.push(format!("F_l1,{}", fmt_f64(f)));
    }
    if let Some(f) = f_l2 {
        fold_rows.push(format!("F_l2,{}", fmt_f64(f)));
    }
    out.write_csv("folds.csv", "fold,param", &fold_rows)?;
    Ok(())
}

fn scan_axes(cfg: &RunConfig) -> Result<(ParamKey, Vec<f64>, ParamKey, Vec<f64>), RunError> {
    let scan = cfg.scan.as_ref().ok_or(ConfigError("this analysis requires a [scan] section".into()))?;
    let key1 = ParamKey::parse(&scan.param)
        .ok_or_else(|| ConfigError(format!("unknown scan.param `{}`", scan.param)))?;
    let values1 = scan.values.values()?;
    let p2 = scan
        .param2
        .as_ref()
        .ok_or(ConfigError("this analysis requires scan.param2".into()))?;
    let key2 = ParamKey::parse(p2)
        .ok_or_else(|| ConfigError(format!("unknown scan.param2 `{p2}`")))?;
    let values2 = scan
        .values2
        .as_ref()
        .ok_or(ConfigError("this analysis requires scan.values2".into()))?
        .values()?;
    Ok((key1, values1, key2, values2))
}

pub fn run_scan2d(cfg: &RunConfig, out: &OutputDir) -> RunResult {
    let params = cfg.model_params()?;
    let (key1, values1, key2, values2) = scan_axes(cfg)?;
    let icfg = cfg.integrator()?;
    let ccfg = cfg.cycle_search();
    let exec = Progress { inner: &RayonExecutor, label: "scan2d" };
    let scan = scan_two_param(&params, (key1, key2), &values1, &values2, &icfg, &ccfg, &exec);
    let mut rows = Vec::new();
    for (i, &p1) in scan.axis1.iter().enumerate() {
        for (j, &p2) in scan.axis2.iter().enumerate() {
            rows.push(format!(
                "{},{},{}",
                fmt_f64(p1),
                fmt_f64(p2),
                scan.labels[i * scan.axis2.len() + j].name()
            ));
        }
    }
    out.write_csv("regions.csv", "p1,p2,region", &rows)?;
    for (name, points) in [
        ("curve_h.csv", &scan.h_points),
        ("curve_fl1.csv", &scan.fl1_points),
        ("curve_fl2.csv", &scan.fl2_points),
    ] {
        let mut point_rows: Vec<String> =
            points.iter().map(|(a, b)| format!("{},{}", fmt_f64(*a), fmt_f64(*b))).collect();
        point_rows.sort_unstable();
        out.write_csv(name, "p1,p2", &point_rows)?;
    }
    let gh_rows: Vec<String> = scan
        .gh
        .iter()
        .map(|((p1, p2), d)| format!("{},{},{}", fmt_f64(*p1), fmt_f64(*p2), fmt_f64(*d)))
        .collect();
    out.write_csv("gh.csv", "p1,p2,approach_distance", &gh_rows)?;
    Ok(())
}

pub fn run_basin_region(cfg: &RunConfig, out: &OutputDir) -> RunResult {
    let params = cfg.model_params()?;
    let (key1, values1, key2, values2) = scan_axes(cfg)?;
    let side = cfg.base_side()?;
    let base = base_cycle(cfg, &params)?;
    let icfg = cfg.integrator()?;
    let ccfg = cfg.cycle_search();
    let exec = Progress { inner: &RayonExecutor, label: "basin-region" };
    let region =
        bi_region(&base, side, &params, (key1, key2), &values1, &values2, &icfg, &ccfg, &exec);
    let mut rows = Vec::new();
    for (i, &p1) in region.axis1.iter().enumerate() {
        for (j, &p2) in region.axis2.iter().enumerate() {
            let flag = match region.flags[i * region.axis2.len() + j] {
                BiFlag::None => "none",
                BiFlag::Partial => "partial",
                BiFlag::Total => "total",
                BiFlag::MarginalBand => "marginal-band",
            };
            rows.push(format!("{},{},{flag}", fmt_f64(p1), fmt_f64(p2)));
        }
    }
    out.write_csv("bi_region.csv", "p1,p2,flag", &rows)?;
    Ok(())
}

pub fn run_arcs(cfg: &RunConfig, out: &OutputDir) -> RunResult {
    let params = cfg.model_params()?;
    let path = cfg.parameter_path()?;
    let side = cfg.base_side()?;
    let base = base_cycle(cfg, &params)?;
    let icfg = cfg.integrator()?;
    let ccfg = cfg.cycle_search();
    let arcs_cfg =
        cfg.arcs.as_ref().ok_or(ConfigError("arcs requires an [arcs] section".into()))?;

    if let Some(theta_at) = arcs_cfg.theta_at {
        let far = path
            .params_at(&params, theta_at)
            .ok_or(ConfigError("path.param does not belong to the model".into()))?;
        let boundary = find_separatrix(&far, &icfg, &ccfg)?;
        let arcs = unstable_arcs(&base, side, &boundary);
        let rows: Vec<String> = arcs
            .arcs
            .iter()
            .zip(&arcs.phases)
            .map(|(&(t1, t2), &(f1, f2))| {
                format!("{},{},{},{}", fmt_f64(t1), fmt_f64(t2), fmt_f64(f1), fmt_f64(f2))
            })
            .collect();
        out.write_csv("arcs.csv", "t_start,t_end,phi_start,phi_end", &rows)?;
        eprintln!(
            "arcs at {theta_at}: {:?}, band touched: {}",
            arcs.classification, arcs.band_touched
        );
    }
    if let (Some(from), Some(to)) = (arcs_cfg.onset_from, arcs_cfg.onset_to) {
        let onset = phasetip_core::basin::marginal_parameter(
            &base, side, &params, &path, from, to, &icfg, &ccfg,
        )?;
        out.write_csv("onset.csv", "param,value", &[format!(
            "{},{}",
            path.driver.name(),
            fmt_f64(onset)
        )])?;
    }
    Ok(())
}

/// Resolve the tipping x0: an explicit state or a phase on the base cycle.
fn resolve_x0(cfg: &RunConfig, base: &PhasedCycle) -> Result<State, RunError> {
    let init =
        cfg.init.as_ref().ok_or(ConfigError("this analysis requires an [init] section".into()))?;
    match (init.x0, init.phase) {
        (Some(x0), None) => Ok(State::new(x0[0], x0[1])),
        (None, Some(phi)) => Ok(base.point_at_phase(phi)),
        _ => Err(ConfigError("init requires exactly one of x0 or phase".into()).into()),
    }
}

struct TippingPieces {
    params: ModelParams,
    base: PhasedCycle,
    t_c: f64,
    kind: ShiftKind,
    b_axis: Vec<f64>,
    r_axis: Vec<f64>,
}

fn tipping_pieces(cfg: &RunConfig) -> Result<TippingPieces, RunError> {
    let params = cfg.model_params()?;
    let base = base_cycle(cfg, &params)?;
    let t_c = cfg.resolve_t_c(base.cycle.period)?;
    let kind = cfg.shift_kind()?;
    let grid = cfg.grid.as_ref().ok_or(ConfigError("this analysis requires a [grid] section".into()))?;
    let b_axis =
        grid.b.as_ref().ok_or(ConfigError("grid.b is required".into()))?.values()?;
    let r_axis =
        grid.r.as_ref().ok_or(ConfigError("grid.r is required".into()))?.values()?;
    Ok(TippingPieces { params, base, t_c, kind, b_axis, r_axis })
}

pub fn run_tipping_diagram(cfg: &RunConfig, out: &OutputDir) -> RunResult {
    let pieces = tipping_pieces(cfg)?;
    let path = cfg.parameter_path()?;
    let side = cfg.base_side()?;
    let icfg = cfg.integrator()?;
    let ccfg = cfg.cycle_search();
    let setup = TippingSetup {
        base_params: &pieces.params,
        path: &path,
        base_side: side,
        base_period: pieces.base.cycle.period,
    };
    let x0 = resolve_x0(cfg, &pieces.base)?;
    let exec = Progress { inner: &RayonExecutor, label: "tipping-diagram" };
    let grid = tipping_diagram(
        &setup,
        pieces.kind,
        x0,
        &pieces.b_axis,
        &pieces.r_axis,
        pieces.t_c,
        &icfg,
        &ccfg,
        &exec,
    );
    out.write_csv(
        "grid.csv",
        "b,r,outcome,attractor,dist_gamma1,dist_gamma2",
        &tipping_grid_rows(&grid),
    )?;

    if let Some(bs) = cfg.grid.as_ref().and_then(|g| g.critical_b.clone()) {
        let mut rows = Vec::new();
        for b in bs {
            let rcs = critical_rates(
                &setup,
                pieces.kind,
                x0,
                &pieces.r_axis,
                b,
                pieces.t_c,
                &icfg,
                &ccfg,
            )?;
            for (i, rc) in rcs.iter().enumerate() {
                rows.push(format!("{},{i},{}", fmt_f64(b), fmt_f64(*rc)));
            }
        }
        out.write_csv("critical_rates.csv", "b,rc_index,rc", &rows)?;
    }

    // Reference magnitude at which the initial condition leaves its home
    // basin in the frozen far system.
    // Stay clear of the fold itself, where no separatrix exists.
    let b_hi = 0.95 * pieces.b_axis.last().copied().unwrap_or(1.0);
    if let Ok(b_bi) =
        instability_magnitude(&pieces.params, &path, side, x0, 1e-3, b_hi, &icfg, &ccfg)
    {
        out.write_csv("b_bi.csv", "b_bi", &[fmt_f64(b_bi)])?;
    }
    Ok(())
}

pub fn run_tc_sweep(cfg: &RunConfig, out: &OutputDir) -> RunResult {
    let pieces = tipping_pieces(cfg)?;
    let path = cfg.parameter_path()?;
    let side = cfg.base_side()?;
    let icfg = cfg.integrator()?;
    let ccfg = cfg.cycle_search();
    let setup = TippingSetup {
        base_params: &pieces.params,
        path: &path,
        base_side: side,
        base_period: pieces.base.cycle.period,
    };
    let x0 = resolve_x0(cfg, &pieces.base)?;
    let offsets = cfg
        .grid
        .as_ref()
        .and_then(|g| g.tc_offsets.clone())
        .unwrap_or_else(|| match pieces.params.model() {
            Model::Vdp => vec![-0.11, 0.0, 0.11, 0.22, 0.33, 0.44],
            Model::Gly => vec![-45.0, -30.0, -15.0, 0.0, 15.0, 30.0, 45.0],
        });
    let t_c_list: Vec<f64> = offsets.iter().map(|o| pieces.t_c + o).collect();
    let exec = Progress { inner: &RayonExecutor, label: "tc-sweep" };
    let grids = tc_sweep(
        &setup,
        pieces.kind,
        x0,
        &pieces.b_axis,
        &pieces.r_axis,
        &t_c_list,
        &icfg,
        &ccfg,
        &exec,
    );
    let mut index_rows = Vec::new();
    for (i, grid) in grids.iter().enumerate() {
        index_rows.push(format!("{i},{}", fmt_f64(grid.t_c)));
        out.write_csv(
            &format!("grid_{i:02}.csv"),
            "b,r,outcome,attractor,dist_gamma1,dist_gamma2",
            &tipping_grid_rows(grid),
        )?;
    }
    out.write_csv("tc_index.csv", "index,t_c", &index_rows)?;
    Ok(())
}

pub fn run_pace_phase(cfg: &RunConfig, out: &OutputDir) -> RunResult {
    let params = cfg.model_params()?;
    let base = base_cycle(cfg, &params)?;
    let path = cfg.parameter_path()?;
    let side = cfg.base_side()?;
    let icfg = cfg.integrator()?;
    let ccfg = cfg.cycle_search();
    let t_c = cfg.resolve_t_c(base.cycle.period)?;
    let kind = cfg.shift_kind()?;
    let shift_b = cfg
        .shift
        .as_ref()
        .and_then(|s| s.b)
        .ok_or(ConfigError("pace-phase requires shift.b".into()))?;
    let grid_cfg =
        cfg.grid.as_ref().ok_or(ConfigError("pace-phase requires a [grid] section".into()))?;
    let r_axis = grid_cfg
        .r
        .as_ref()
        .ok_or(ConfigError("grid.r is required".into()))?
        .values()?;
    let phi_n = grid_cfg.phi_n.unwrap_or(128);
    let phi_axis: Vec<f64> =
        (0..phi_n).map(|k| core::f64::consts::TAU * k as f64 / phi_n as f64).collect();
    let setup = TippingSetup {
        base_params: &params,
        path: &path,
        base_side: side,
        base_period: base.cycle.period,
    };
    let exec = Progress { inner: &RayonExecutor, label: "pace-phase" };
    let grid =
        pace_vs_phase(&setup, &base, kind, shift_b, &r_axis, &phi_axis, t_c, &icfg, &ccfg, &exec)?;
    let mut rows = Vec::with_capacity(grid.outcomes.len());
    for (i, &phi) in grid.phi_axis.iter().enumerate() {
        for (j, &r) in grid.r_axis.iter().enumerate() {
            rows.push(outcome_row(&format!("{},{}", fmt_f64(phi), fmt_f64(r)), grid.outcome(i, j)));
        }
    }
    out.write_csv("grid.csv", "phi,r,outcome,attractor,dist_gamma1,dist_gamma2", &rows)?;
    let phi_u_rows: Vec<String> = grid
        .phi_u
        .arcs
        .iter()
        .zip(&grid.phi_u.phases)
        .map(|(&(t1, t2), &(f1, f2))| {
            format!("{},{},{},{}", fmt_f64(t1), fmt_f64(t2), fmt_f64(f1), fmt_f64(f2))
        })
        .collect();
    out.write_csv("phi_u.csv", "t_start,t_end,phi_start,phi_end", &phi_u_rows)?;
    Ok(())
}

pub fn run_series(cfg: &RunConfig, out: &OutputDir) -> RunResult {
    let params = cfg.model_params()?;
    let path = cfg.parameter_path()?;
    let icfg = cfg.integrator()?;
    let ccfg = cfg.cycle_search();
    let series =
        cfg.series.as_ref().ok_or(ConfigError("series requires a [series] section".into()))?;
    let level = path
        .driver
        .get(&params)
        .ok_or(ConfigError("path.param does not belong to the model".into()))?;
    let shift = cfg.build_shift(level, 1.0)?;
    if shift.kind != ShiftKind::Impulse {
        return Err(ConfigError("series requires shift.kind = \"impulse\"".into()).into());
    }
    let x0s: Vec<State> = series.x0_list.iter().map(|p| State::new(p[0], p[1])).collect();
    let outcomes = series_demo(&params, &path, &shift, &x0s, &icfg, &ccfg)?;
    let labels: Vec<String> = match &series.labels {
        Some(ls) if ls.len() == x0s.len() => ls.clone(),
        _ => (0..x0s.len()).map(|i| format!("x{i}")).collect(),
    };
    let rows: Vec<String> = outcomes
        .iter()
        .zip(&labels)
        .map(|(o, label)| {
            format!(
                "{label},{},{},{},{}",
                fmt_f64(o.x0.x),
                fmt_f64(o.x0.y),
                o.after_first.name(),
                o.after_second.name()
            )
        })
        .collect();
    out.write_csv("series.csv", "label,x0_x,x0_y,after_first,after_second", &rows)?;
    Ok(())
}

/// Dispatch table of the subcommands.
pub fn run_analysis(subcommand: &str, cfg: &RunConfig, out: &OutputDir) -> RunResult {
    out.write_manifest(subcommand, cfg)?;
    match subcommand {
        "simulate" => run_simulate(cfg, out),
        "cycles" => run_cycles(cfg, out),
        "scan1d" => run_scan1d(cfg, out),
        "scan2d" => run_scan2d(cfg, out),
        "basin-region" => run_basin_region(cfg, out),
        "arcs" => run_arcs(cfg, out),
        "tipping-diagram" => run_tipping_diagram(cfg, out),
        "tc-sweep" => run_tc_sweep(cfg, out),
        "pace-phase" => run_pace_phase(cfg, out),
        "series" => run_series(cfg, out),
        other => Err(ConfigError(format!("unknown analysis `{other}`")).into()),
    }
}
