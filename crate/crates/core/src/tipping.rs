//! Track/tip classification of non-autonomous runs and the sweep engines
//! built on it: tipping diagrams over (magnitude, rate), switch-time sweeps,
//! pace-vs-phase grids, and the impulse series demonstration.
//!
//! Every sweep cell is an independent pure computation; grids are assembled
//! in index order so the output is identical for any executor.

use alloc::vec::Vec;

use crate::basin::{find_separatrix, unstable_arcs, BaseSide, BasinBoundary, Membership, UnstableArcSet};
use crate::cycles::{CycleSearchCfg, LimitCycle};
use crate::exec::Executor;
use crate::forcing::{InputShift, ParameterPath, ShiftKind};
use crate::integrate::{integrate_nonautonomous_final, IntegratorConfig};
use crate::models::{ModelParams, State};
use crate::phase::PhasedCycle;
use crate::regions::two_seed_probe;
use crate::{Error, Result};

/// Residual at which the input is considered settled before the final
/// basin test.
pub const SETTLE_EPS: f64 = 1e-8;
/// Future-cycle periods integrated past the settled time.
pub const SETTLE_PERIODS: f64 = 5.0;

/// How a non-autonomous run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    /// Ended in the basin of the base cycle's continuation.
    Track,
    /// Ended in the alternative cycle's basin.
    Tip,
    /// Ended in the boundary band, or the cell failed with the recorded
    /// error.
    Indeterminate,
}

impl OutcomeKind {
    pub fn name(&self) -> &'static str {
        match self {
            OutcomeKind::Track => "Track",
            OutcomeKind::Tip => "Tip",
            OutcomeKind::Indeterminate => "Indeterminate",
        }
    }
}

/// Identity of the attractor owning the end state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttractorId {
    Gamma1,
    Gamma2,
    Undecided,
}

impl AttractorId {
    pub fn name(&self) -> &'static str {
        match self {
            AttractorId::Gamma1 => "Gamma1",
            AttractorId::Gamma2 => "Gamma2",
            AttractorId::Undecided => "none",
        }
    }
}

/// Outcome of one classified run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub attractor: AttractorId,
    /// Distance of the end state to the future large cycle.
    pub dist_gamma1: f64,
    /// Distance of the end state to the future small cycle.
    pub dist_gamma2: f64,
    /// Error name for cells that failed instead of classifying.
    pub reason: Option<&'static str>,
}

impl Outcome {
    fn failed(e: Error) -> Outcome {
        Outcome {
            kind: OutcomeKind::Indeterminate,
            attractor: AttractorId::Undecided,
            dist_gamma1: f64::NAN,
            dist_gamma2: f64::NAN,
            reason: Some(e.name()),
        }
    }
}

/// Static description of one tipping study: the frozen base system, the
/// parameter path the input moves along, and which side of the separatrix
/// the base cycle lives on.
#[derive(Debug, Clone, Copy)]
pub struct TippingSetup<'a> {
    pub base_params: &'a ModelParams,
    pub path: &'a ParameterPath,
    pub base_side: BaseSide,
    /// Period of the base cycle at the reference level (sets t_c = 4T).
    pub base_period: f64,
}

/// Frozen-system data at the future limit of a shift: the separatrix and
/// both stable cycles, shared by every cell with the same future level.
#[derive(Debug, Clone)]
pub struct FutureContext {
    pub params: ModelParams,
    pub boundary: BasinBoundary,
    pub gamma1: LimitCycle,
    pub gamma2: LimitCycle,
}

impl FutureContext {
    /// Build the frozen-system context at driving value `p`.
    pub fn build(
        base_params: &ModelParams,
        path: &ParameterPath,
        p: f64,
        icfg: &IntegratorConfig,
        ccfg: &CycleSearchCfg,
    ) -> Result<FutureContext> {
        let params = path.params_at(base_params, p).ok_or(Error::NoSeparatrix)?;
        let probe = two_seed_probe(&params, icfg, ccfg)?;
        if !probe.birhythmic() {
            return Err(Error::NoSeparatrix);
        }
        let gamma2 = probe.inner.clone().expect("birhythmic probe has both cycles");
        let gamma1 = probe.outer.clone().expect("birhythmic probe has both cycles");
        let boundary = find_separatrix(&params, icfg, ccfg)?;
        Ok(FutureContext { params, boundary, gamma1, gamma2 })
    }

    fn outcome_of_state(&self, s: State, base_side: BaseSide) -> Outcome {
        let m = self.boundary.membership(s);
        let kind = match (m, base_side) {
            (Membership::BoundaryBand, _) => OutcomeKind::Indeterminate,
            (Membership::Inner, BaseSide::Inner) | (Membership::Outer, BaseSide::Outer) => {
                OutcomeKind::Track
            }
            _ => OutcomeKind::Tip,
        };
        let attractor = match m {
            Membership::Inner => AttractorId::Gamma2,
            Membership::Outer => AttractorId::Gamma1,
            Membership::BoundaryBand => AttractorId::Undecided,
        };
        Outcome {
            kind,
            attractor,
            dist_gamma1: self.gamma1.dist_to(s),
            dist_gamma2: self.gamma2.dist_to(s),
            reason: None,
        }
    }

    /// Period of the base cycle's continuation in this frozen system.
    pub fn base_continuation_period(&self, side: BaseSide) -> f64 {
        match side {
            BaseSide::Inner => self.gamma2.period,
            BaseSide::Outer => self.gamma1.period,
        }
    }
}

/// Classify one non-autonomous run: integrate from `x0` at t = 0 until the
/// input has settled plus five future-cycle periods, then test basin
/// membership in the future frozen system.
pub fn classify(
    setup: &TippingSetup<'_>,
    shift: &InputShift,
    x0: State,
    icfg: &IntegratorConfig,
    future: &FutureContext,
) -> Result<Outcome> {
    if let Some(b_max) = setup.path.b_max {
        if shift.b > b_max {
            return Err(Error::PathOutOfRegion);
        }
    }
    let t_end = shift.settled_time(SETTLE_EPS)
        + SETTLE_PERIODS * future.base_continuation_period(setup.base_side);
    let (_t, end) = integrate_nonautonomous_final(
        setup.base_params,
        setup.path,
        shift,
        x0,
        (0.0, t_end.max(0.0)),
        icfg,
    )?;
    Ok(future.outcome_of_state(end, setup.base_side))
}

/// Construct the shift of the given kind at magnitude `b` and rate `r`.
pub fn make_shift(kind: ShiftKind, level: f64, b: f64, r: f64, t_c: f64) -> InputShift {
    match kind {
        ShiftKind::Monotone => InputShift::monotone(level, b, r, t_c),
        ShiftKind::Nonmonotone => InputShift::nonmonotone(level, b, r, t_c),
        ShiftKind::Impulse => InputShift::impulse(level, b, r, t_c, t_c),
    }
}

/// Rectangular outcome grid over (magnitude, rate) for a fixed switch time.
#[derive(Debug, Clone)]
pub struct TippingGrid {
    pub b_axis: Vec<f64>,
    pub r_axis: Vec<f64>,
    /// Row-major: index = i_b * r_axis.len() + j_r.
    pub outcomes: Vec<Outcome>,
    pub t_c: f64,
    pub x0: State,
}

impl TippingGrid {
    pub fn outcome(&self, i_b: usize, j_r: usize) -> &Outcome {
        &self.outcomes[i_b * self.r_axis.len() + j_r]
    }
}

/// Reference level of the shift: the driving-parameter value at the base
/// point of the path.
fn reference_level(setup: &TippingSetup<'_>) -> f64 {
    setup
        .path
        .driver
        .get(setup.base_params)
        .expect("path driver belongs to the base model")
}

/// Future driving value of a shift of `kind` with magnitude `b`.
fn future_level(kind: ShiftKind, level: f64, b: f64) -> f64 {
    match kind {
        ShiftKind::Monotone => level - b,
        ShiftKind::Nonmonotone => level,
        ShiftKind::Impulse => level,
    }
}

/// Classify every (b, r) cell. Monotone shifts get one future context per
/// magnitude; the other kinds share a single context at the reference level.
/// Failed cells record their error and classify as indeterminate.
#[allow(clippy::too_many_arguments)]
pub fn tipping_diagram<E: Executor>(
    setup: &TippingSetup<'_>,
    kind: ShiftKind,
    x0: State,
    b_axis: &[f64],
    r_axis: &[f64],
    t_c: f64,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
    exec: &E,
) -> TippingGrid {
    let level = reference_level(setup);
    let contexts: Vec<Result<FutureContext>> = match kind {
        ShiftKind::Monotone => exec.run_cells(b_axis.len(), &|i| {
            FutureContext::build(
                setup.base_params,
                setup.path,
                future_level(kind, level, b_axis[i]),
                icfg,
                ccfg,
            )
        }),
        _ => alloc::vec![FutureContext::build(setup.base_params, setup.path, level, icfg, ccfg)],
    };
    let n_r = r_axis.len();
    let outcomes = exec.run_cells(b_axis.len() * n_r, &|idx| {
        let (i, j) = (idx / n_r, idx % n_r);
        let ctx = match kind {
            ShiftKind::Monotone => &contexts[i],
            _ => &contexts[0],
        };
        match ctx {
            Ok(ctx) => {
                let shift = make_shift(kind, level, b_axis[i], r_axis[j], t_c);
                classify(setup, &shift, x0, icfg, ctx).unwrap_or_else(Outcome::failed)
            }
            Err(e) => Outcome::failed(*e),
        }
    });
    TippingGrid { b_axis: b_axis.into(), r_axis: r_axis.into(), outcomes, t_c, x0 }
}

/// All track/tip boundary rates along the rate axis at magnitude `b`, each
/// refined by bisection to 1e-3 relative in r.
#[allow(clippy::too_many_arguments)]
pub fn critical_rates(
    setup: &TippingSetup<'_>,
    kind: ShiftKind,
    x0: State,
    r_axis: &[f64],
    b: f64,
    t_c: f64,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<Vec<f64>> {
    let level = reference_level(setup);
    let future =
        FutureContext::build(setup.base_params, setup.path, future_level(kind, level, b), icfg, ccfg)?;
    let outcome_at = |r: f64| -> Result<OutcomeKind> {
        let shift = make_shift(kind, level, b, r, t_c);
        Ok(classify(setup, &shift, x0, icfg, &future)?.kind)
    };
    let kinds: Vec<OutcomeKind> =
        r_axis.iter().map(|&r| outcome_at(r)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for w in 0..r_axis.len().saturating_sub(1) {
        let (ka, kb) = (kinds[w], kinds[w + 1]);
        if ka == kb || ka == OutcomeKind::Indeterminate || kb == OutcomeKind::Indeterminate {
            continue;
        }
        let (mut lo, mut hi) = (r_axis[w], r_axis[w + 1]);
        let k_lo = ka;
        while hi - lo > 1e-3 * lo {
            let mid = crate::math::sqrt(lo * hi);
            match outcome_at(mid)? {
                k if k == k_lo => lo = mid,
                OutcomeKind::Indeterminate => {
                    // A sliver of the boundary band; settle for the bracket
                    // midpoint.
                    break;
                }
                _ => hi = mid,
            }
        }
        out.push(crate::math::sqrt(lo * hi));
    }
    Ok(out)
}

/// One tipping diagram per switch time.
#[allow(clippy::too_many_arguments)]
pub fn tc_sweep<E: Executor>(
    setup: &TippingSetup<'_>,
    kind: ShiftKind,
    x0: State,
    b_axis: &[f64],
    r_axis: &[f64],
    t_c_list: &[f64],
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
    exec: &E,
) -> Vec<TippingGrid> {
    t_c_list
        .iter()
        .map(|&t_c| tipping_diagram(setup, kind, x0, b_axis, r_axis, t_c, icfg, ccfg, exec))
        .collect()
}

/// Outcome grid over (initial phase, rate) at fixed magnitude, with the
/// basin-unstable phase set of the path's far point attached for comparison.
#[derive(Debug, Clone)]
pub struct PacePhaseGrid {
    pub phi_axis: Vec<f64>,
    pub r_axis: Vec<f64>,
    /// Row-major: index = i_phi * r_axis.len() + j_r.
    pub outcomes: Vec<Outcome>,
    pub t_c: f64,
    pub b: f64,
    pub phi_u: UnstableArcSet,
}

impl PacePhaseGrid {
    pub fn outcome(&self, i_phi: usize, j_r: usize) -> &Outcome {
        &self.outcomes[i_phi * self.r_axis.len() + j_r]
    }
}

/// Classify runs started at every phase of the base cycle for every rate.
#[allow(clippy::too_many_arguments)]
pub fn pace_vs_phase<E: Executor>(
    setup: &TippingSetup<'_>,
    base: &PhasedCycle,
    kind: ShiftKind,
    b: f64,
    r_axis: &[f64],
    phi_axis: &[f64],
    t_c: f64,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
    exec: &E,
) -> Result<PacePhaseGrid> {
    let level = reference_level(setup);
    let future =
        FutureContext::build(setup.base_params, setup.path, future_level(kind, level, b), icfg, ccfg)?;
    // Basin-unstable phases against the separatrix at the far point of the
    // path (the extreme level the shift reaches).
    let far = FutureContext::build(setup.base_params, setup.path, level - b, icfg, ccfg)?;
    let phi_u = unstable_arcs(base, setup.base_side, &far.boundary);

    let n_r = r_axis.len();
    let outcomes = exec.run_cells(phi_axis.len() * n_r, &|idx| {
        let (i, j) = (idx / n_r, idx % n_r);
        let x0 = base.point_at_phase(phi_axis[i]);
        let shift = make_shift(kind, level, b, r_axis[j], t_c);
        classify(setup, &shift, x0, icfg, &future).unwrap_or_else(Outcome::failed)
    });
    Ok(PacePhaseGrid {
        phi_axis: phi_axis.into(),
        r_axis: r_axis.into(),
        outcomes,
        t_c,
        b,
        phi_u,
    })
}

/// Basin outcome of one initial condition at the two checkpoints of an
/// impulse run: after the first switch has settled (tested in the frozen
/// plateau system) and after the second (tested in the frozen base system).
#[derive(Debug, Clone, Copy)]
pub struct SeriesOutcome {
    pub x0: State,
    pub after_first: AttractorId,
    pub after_second: AttractorId,
}

/// Run the impulse input from each initial condition and record which basin
/// the trajectory occupies after each switch.
#[allow(clippy::too_many_arguments)]
pub fn series_demo(
    base_params: &ModelParams,
    path: &ParameterPath,
    shift: &InputShift,
    x0s: &[State],
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<Vec<SeriesOutcome>> {
    debug_assert_eq!(shift.kind, ShiftKind::Impulse);
    let level = shift.level;
    let plateau = FutureContext::build(base_params, path, level + shift.b, icfg, ccfg)?;
    let base_ctx = FutureContext::build(base_params, path, level, icfg, ccfg)?;

    // First checkpoint: late in the plateau, just before the second
    // transition window opens.
    let window = 40.0 / shift.rate;
    let t1 = (shift.t_c2 - 1.5 * window).max(shift.t_c1 + window);
    // Second checkpoint: input settled back plus a few base periods.
    let t2 = shift.settled_time(SETTLE_EPS) + SETTLE_PERIODS * base_ctx.gamma1.period.max(base_ctx.gamma2.period);

    let mut out = Vec::with_capacity(x0s.len());
    for &x0 in x0s {
        let (_t, s1) = integrate_nonautonomous_final(base_params, path, shift, x0, (0.0, t1), icfg)?;
        let after_first = match plateau.boundary.membership(s1) {
            Membership::Inner => AttractorId::Gamma2,
            Membership::Outer => AttractorId::Gamma1,
            Membership::BoundaryBand => AttractorId::Undecided,
        };
        let (_t, s2) = integrate_nonautonomous_final(base_params, path, shift, s1, (t1, t2), icfg)?;
        let after_second = match base_ctx.boundary.membership(s2) {
            Membership::Inner => AttractorId::Gamma2,
            Membership::Outer => AttractorId::Gamma1,
            Membership::BoundaryBand => AttractorId::Undecided,
        };
        out.push(SeriesOutcome { x0, after_first, after_second });
    }
    Ok(out)
}

/// Smallest shift magnitude at which `x0` leaves its home basin in the
/// frozen system at the path's far level, by bisection on strict membership.
#[allow(clippy::too_many_arguments)]
pub fn instability_magnitude(
    base_params: &ModelParams,
    path: &ParameterPath,
    side: BaseSide,
    x0: State,
    b_lo: f64,
    b_hi: f64,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<f64> {
    let level = path.driver.get(base_params).ok_or(Error::NoSeparatrix)?;
    let unstable_at = |b: f64| -> Result<bool> {
        let params = path.params_at(base_params, level - b).ok_or(Error::NoSeparatrix)?;
        let boundary = find_separatrix(&params, icfg, ccfg)?;
        let inside = boundary.contains(x0);
        Ok(match side {
            BaseSide::Outer => inside,
            BaseSide::Inner => !inside,
        })
    };
    if unstable_at(b_lo)? || !unstable_at(b_hi)? {
        return Err(Error::NoOnset);
    }
    let (mut lo, mut hi) = (b_lo, b_hi);
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if unstable_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::find_stable_cycle;
    use crate::exec::SerialExecutor;
    use crate::models::{ParamKey, VdpParams};

    fn vdp_base() -> ModelParams {
        ModelParams::Vdp(VdpParams { mu: 1.52, alpha: 0.0936, beta: 0.001945, d: -0.03 })
    }

    fn setup_ctx() -> (ModelParams, ParameterPath, f64) {
        let base = vdp_base();
        let path = ParameterPath::new(ParamKey::Mu).with_b_max(1.4725);
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let cycle = find_stable_cycle(&base, State::new(9.0, 0.0), &icfg, &ccfg).unwrap();
        (base, path, cycle.period)
    }

    #[test]
    fn golden_monotone_classifications() {
        let (base, path, period) = setup_ctx();
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let setup = TippingSetup {
            base_params: &base,
            path: &path,
            base_side: BaseSide::Outer,
            base_period: period,
        };
        let t_c = 4.0 * period;
        let x0 = State::new(4.0, 1.89);
        let future = FutureContext::build(&base, &path, 1.52 - 1.0, &icfg, &ccfg).unwrap();
        let slow = classify(&setup, &InputShift::monotone(1.52, 1.0, 4.0, t_c), x0, &icfg, &future)
            .unwrap();
        assert_eq!(slow.kind, OutcomeKind::Track, "{slow:?}");
        assert_eq!(slow.attractor, AttractorId::Gamma1);
        let fast =
            classify(&setup, &InputShift::monotone(1.52, 1.0, 13.0, t_c), x0, &icfg, &future)
                .unwrap();
        assert_eq!(fast.kind, OutcomeKind::Tip, "{fast:?}");
        assert_eq!(fast.attractor, AttractorId::Gamma2);
        // Tracking runs end close to the large cycle, tipped runs close to
        // the small one.
        assert!(slow.dist_gamma1 < slow.dist_gamma2);
        assert!(fast.dist_gamma2 < fast.dist_gamma1);
    }

    #[test]
    fn golden_nonmonotone_classifications() {
        let (base, path, period) = setup_ctx();
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let setup = TippingSetup {
            base_params: &base,
            path: &path,
            base_side: BaseSide::Outer,
            base_period: period,
        };
        let t_c = 4.0 * period;
        let x0 = State::new(4.503, 2.33);
        let future = FutureContext::build(&base, &path, 1.52, &icfg, &ccfg).unwrap();
        let expect = [
            (0.5, OutcomeKind::Track),
            (1.0, OutcomeKind::Tip),
            (2.0, OutcomeKind::Track),
            (6.0, OutcomeKind::Tip),
            (12.0, OutcomeKind::Track),
        ];
        for (r, kind) in expect {
            let shift = InputShift::nonmonotone(1.52, 1.25, r, t_c);
            let got = classify(&setup, &shift, x0, &icfg, &future).unwrap();
            assert_eq!(got.kind, kind, "r = {r}: {got:?}");
        }
    }

    #[test]
    fn zero_magnitude_always_tracks() {
        let (base, path, period) = setup_ctx();
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let setup = TippingSetup {
            base_params: &base,
            path: &path,
            base_side: BaseSide::Outer,
            base_period: period,
        };
        let future = FutureContext::build(&base, &path, 1.52, &icfg, &ccfg).unwrap();
        for r in [0.5, 5.0, 50.0] {
            let shift = InputShift::monotone(1.52, 0.0, r, 4.0 * period);
            let got =
                classify(&setup, &shift, State::new(4.0, 1.89), &icfg, &future).unwrap();
            assert_eq!(got.kind, OutcomeKind::Track);
        }
    }

    #[test]
    fn magnitude_beyond_fold_cap_errors() {
        let (base, path, period) = setup_ctx();
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let setup = TippingSetup {
            base_params: &base,
            path: &path,
            base_side: BaseSide::Outer,
            base_period: period,
        };
        let future = FutureContext::build(&base, &path, 1.52, &icfg, &ccfg).unwrap();
        let shift = InputShift::monotone(1.52, 1.51, 4.0, 4.0 * period);
        let res = classify(&setup, &shift, State::new(4.0, 1.89), &icfg, &future);
        assert!(matches!(res, Err(Error::PathOutOfRegion)));
    }

    #[test]
    fn small_grid_is_deterministic_and_ordered() {
        let (base, path, period) = setup_ctx();
        let icfg = IntegratorConfig::with_tols(1e-7, 1e-9);
        let ccfg = CycleSearchCfg::default();
        let setup = TippingSetup {
            base_params: &base,
            path: &path,
            base_side: BaseSide::Outer,
            base_period: period,
        };
        let b_axis = [0.5, 1.0];
        let r_axis = [4.0, 13.0];
        let grid = tipping_diagram(
            &setup,
            ShiftKind::Monotone,
            State::new(4.0, 1.89),
            &b_axis,
            &r_axis,
            4.0 * period,
            &icfg,
            &ccfg,
            &SerialExecutor,
        );
        let again = tipping_diagram(
            &setup,
            ShiftKind::Monotone,
            State::new(4.0, 1.89),
            &b_axis,
            &r_axis,
            4.0 * period,
            &icfg,
            &ccfg,
            &SerialExecutor,
        );
        assert_eq!(grid.outcomes, again.outcomes);
        assert_eq!(grid.outcome(1, 0).kind, OutcomeKind::Track);
        assert_eq!(grid.outcome(1, 1).kind, OutcomeKind::Tip);
    }

    #[test]
    fn critical_rate_between_golden_rates() {
        let (base, path, period) = setup_ctx();
        let icfg = IntegratorConfig::with_tols(1e-7, 1e-9);
        let ccfg = CycleSearchCfg::default();
        let setup = TippingSetup {
            base_params: &base,
            path: &path,
            base_side: BaseSide::Outer,
            base_period: period,
        };
        let r_axis: Vec<f64> = (0..9).map(|k| 2.0 * (16.0_f64 / 2.0).powf(k as f64 / 8.0)).collect();
        let rcs = critical_rates(
            &setup,
            ShiftKind::Monotone,
            State::new(4.0, 1.89),
            &r_axis,
            1.0,
            4.0 * period,
            &icfg,
            &ccfg,
        )
        .unwrap();
        assert_eq!(rcs.len(), 1, "critical rates: {rcs:?}");
        assert!(rcs[0] > 4.0 && rcs[0] < 13.0, "r_c = {}", rcs[0]);
        // The reported rate is genuinely critical: outcomes flip across it.
        let future = FutureContext::build(&base, &path, 0.52, &icfg, &ccfg).unwrap();
        let x0 = State::new(4.0, 1.89);
        let t_c = 4.0 * period;
        let below = classify(
            &setup,
            &InputShift::monotone(1.52, 1.0, rcs[0] * (1.0 - 2e-3), t_c),
            x0,
            &icfg,
            &future,
        )
        .unwrap();
        let above = classify(
            &setup,
            &InputShift::monotone(1.52, 1.0, rcs[0] * (1.0 + 2e-3), t_c),
            x0,
            &icfg,
            &future,
        )
        .unwrap();
        assert_ne!(below.kind, above.kind);
    }

    #[test]
    fn instability_magnitude_matches_regression() {
        let base = vdp_base();
        let path = ParameterPath::new(ParamKey::Mu);
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let b = instability_magnitude(
            &base,
            &path,
            BaseSide::Outer,
            State::new(4.0, 1.89),
            0.3,
            1.4,
            &icfg,
            &ccfg,
        )
        .unwrap();
        assert!((b - 0.6163).abs() < 5e-3, "b_BI = {b}");
    }
}
