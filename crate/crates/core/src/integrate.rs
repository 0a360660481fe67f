//! Adaptive embedded Runge-Kutta 5(4) integration with dense output and
//! section-crossing detection, for autonomous and non-autonomous planar
//! systems.
//!
//! The stepper is the classical Dormand-Prince pair with the first-same-as-last
//! property, PI step-size control, and the standard order-4 continuous
//! extension. Input shifts are evaluated at every internal stage, and during
//! the transition window of a shift the step size is additionally capped so
//! fast shifts are resolved.

use alloc::vec::Vec;

use crate::forcing::{InputShift, ParameterPath};
use crate::math;
use crate::models::{ModelParams, State};
use crate::{Error, Result};

#[inline(always)]
fn sq(x: f64) -> f64 {
    x * x
}

/// Tolerances and budgets of one integration run.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Total time budget of a single driver call.
    pub max_time: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rel_tol: 1e-9, abs_tol: 1e-11, max_step: f64::INFINITY, max_time: 1e6 }
    }
}

impl IntegratorConfig {
    pub fn with_tols(rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorConfig { rel_tol, abs_tol, ..Default::default() }
    }
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Error coefficients (5th order weights minus embedded 4th order weights).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous-extension coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// Step-size controller constants.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const MAX_GROW: f64 = 10.0;
const MAX_SHRINK: f64 = 5.0;

/// Dense-output record of one accepted step on [t0, t0 + h].
#[derive(Debug, Clone, Copy)]
pub struct DenseSeg {
    pub t0: f64,
    pub h: f64,
    cont: [State; 5],
}

impl DenseSeg {
    /// Interpolated state at absolute time `t` (clamped to the segment).
    pub fn eval(&self, t: f64) -> State {
        let theta = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        let c = &self.cont;
        c[0] + (c[1] + (c[2] + (c[3] + c[4] * theta1) * theta) * theta1) * theta
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }
}

/// A solution with step points and, normally, dense output between them.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    dense: Vec<DenseSeg>,
    pub interpolation_order: u32,
}

impl Trajectory {
    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn end_state(&self) -> State {
        *self.states.last().expect("trajectory is never empty")
    }

    pub fn has_dense_output(&self) -> bool {
        !self.dense.is_empty()
    }

    /// Interpolated state at time `t` within the trajectory span.
    pub fn state_at(&self, t: f64) -> State {
        if self.dense.is_empty() {
            return self.states[0];
        }
        let idx = self.dense.partition_point(|seg| seg.t_end() < t).min(self.dense.len() - 1);
        self.dense[idx].eval(t)
    }

    /// `n` states uniformly spaced on [ta, tb] (endpoint excluded).
    pub fn sample_uniform(&self, ta: f64, tb: f64, n: usize) -> Vec<State> {
        let dt = (tb - ta) / n as f64;
        let mut out = Vec::with_capacity(n);
        let mut seg = 0usize;
        for j in 0..n {
            let t = ta + dt * j as f64;
            while seg + 1 < self.dense.len() && self.dense[seg].t_end() < t {
                seg += 1;
            }
            out.push(self.dense[seg].eval(t));
        }
        out
    }
}

/// Low-level adaptive stepper over a generic right-hand side.
pub(crate) struct Stepper<'f> {
    rhs: &'f dyn Fn(f64, State) -> Result<State>,
    /// Extra time-dependent cap on the step size (shift windows).
    step_cap: Option<&'f dyn Fn(f64) -> f64>,
    cfg: IntegratorConfig,
    t: f64,
    y: State,
    k1: State,
    h: f64,
    facold: f64,
    t_start: f64,
    t_end: f64,
}

impl<'f> Stepper<'f> {
    pub fn new(
        rhs: &'f dyn Fn(f64, State) -> Result<State>,
        x0: State,
        t_span: (f64, f64),
        cfg: &IntegratorConfig,
        step_cap: Option<&'f dyn Fn(f64) -> f64>,
    ) -> Result<Self> {
        debug_assert!(t_span.1 >= t_span.0, "spans run forward");
        let k1 = rhs(t_span.0, x0)?;
        let mut s = Stepper {
            rhs,
            step_cap,
            cfg: *cfg,
            t: t_span.0,
            y: x0,
            k1,
            h: 0.0,
            facold: 1e-4,
            t_start: t_span.0,
            t_end: t_span.1,
        };
        s.h = s.initial_step()?;
        Ok(s)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> State {
        self.y
    }

    pub fn done(&self) -> bool {
        self.t >= self.t_end
    }

    fn scale(&self, a: State, b: State) -> (f64, f64) {
        (
            self.cfg.abs_tol + self.cfg.rel_tol * math::fabs(a.x).max(math::fabs(b.x)),
            self.cfg.abs_tol + self.cfg.rel_tol * math::fabs(a.y).max(math::fabs(b.y)),
        )
    }

    /// Standard two-evaluation starting-step heuristic.
    fn initial_step(&self) -> Result<f64> {
        let span = self.t_end - self.t_start;
        if span == 0.0 {
            return Ok(0.0);
        }
        let (scx, scy) = self.scale(self.y, self.y);
        let d0 = math::sqrt(0.5 * (sq(self.y.x / scx) + sq(self.y.y / scy)));
        let d1 = math::sqrt(0.5 * (sq(self.k1.x / scx) + sq(self.k1.y / scy)));
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(span).min(self.effective_max_step(self.t_start));
        // Probe the derivative curvature with an explicit Euler trial step;
        // if the trial leaves the model domain, fall back to the slope alone.
        let d2 = match (self.rhs)(self.t_start + h0, self.y + self.k1 * h0) {
            Ok(f1) => {
                math::sqrt(0.5 * (sq((f1.x - self.k1.x) / scx) + sq((f1.y - self.k1.y) / scy)))
                    / h0
            }
            Err(_) => d1,
        };
        let d = d1.max(d2);
        let h1 = if d <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { math::pow(0.01 / d, 0.2) };
        Ok((100.0 * h0).min(h1).min(span).min(self.effective_max_step(self.t_start)))
    }

    fn effective_max_step(&self, t: f64) -> f64 {
        let mut cap = self.cfg.max_step;
        if let Some(f) = self.step_cap {
            cap = cap.min(f(t));
        }
        cap
    }

    /// Advance by one accepted step, returning its dense-output record.
    pub fn step(&mut self) -> Result<DenseSeg> {
        debug_assert!(!self.done(), "step called past the end of the span");
        if self.t - self.t_start > self.cfg.max_time {
            return Err(Error::MaxTimeExceeded { t: self.t });
        }
        let floor = 1e-12 * (self.t_end - self.t_start).max(math::fabs(self.t));
        let mut h = self.h.min(self.effective_max_step(self.t)).min(self.t_end - self.t);
        loop {
            if h <= floor || !(h > 0.0) {
                return Err(Error::StepSizeUnderflow { t: self.t });
            }
            match self.try_step(h) {
                Ok((seg, err, k7)) => {
                    if err <= 1.0 {
                        // Accepted: PI controller proposes the next step.
                        let fac11 = math::pow(err.max(1e-10), EXPO1);
                        let fac = (fac11 / math::pow(self.facold, BETA) / SAFETY)
                            .max(1.0 / MAX_GROW)
                            .min(MAX_SHRINK);
                        self.facold = err.max(1e-4);
                        self.t = seg.t_end();
                        self.y = seg.eval(self.t);
                        self.k1 = k7;
                        self.h = h / fac;
                        return Ok(seg);
                    }
                    // Rejected on accuracy.
                    let fac11 = math::pow(err, EXPO1);
                    h /= (fac11 / SAFETY).min(MAX_SHRINK);
                }
                Err(Error::DomainEscape { state, .. }) => {
                    // A trial stage poked outside the domain; resolve the
                    // approach with smaller steps before giving up.
                    if h * 0.25 <= floor {
                        return Err(Error::DomainEscape { t: self.t, state });
                    }
                    h *= 0.25;
                }
                Err(e) => return Err(e),
            }
        }
    }

    /// One trial step of size `h`: returns the dense record, the scaled error
    /// norm, and the derivative at the step end.
    fn try_step(&self, h: f64) -> Result<(DenseSeg, f64, State)> {
        let t = self.t;
        let y = self.y;
        let k1 = self.k1;
        let k2 = (self.rhs)(t + C2 * h, y + k1 * (A21 * h))?;
        let k3 = (self.rhs)(t + C3 * h, y + (k1 * A31 + k2 * A32) * h)?;
        let k4 = (self.rhs)(t + C4 * h, y + (k1 * A41 + k2 * A42 + k3 * A43) * h)?;
        let k5 = (self.rhs)(t + C5 * h, y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * h)?;
        let k6 = (self.rhs)(
            t + h,
            y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * h,
        )?;
        let y1 = y + (k1 * A71 + k3 * A73 + k4 * A74 + k5 * A75 + k6 * A76) * h;
        if !y1.is_finite() {
            // Blow-up inside the trial step behaves like an accuracy
            // rejection at maximal error.
            return Ok((DenseSeg { t0: t, h, cont: [y; 5] }, f64::INFINITY, k1));
        }
        let k7 = (self.rhs)(t + h, y1)?;
        let err_vec = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * h;
        let (scx, scy) = self.scale(y, y1);
        let err = math::sqrt(0.5 * (sq(err_vec.x / scx) + sq(err_vec.y / scy)));

        let ydiff = y1 - y;
        let bspl = k1 * h - ydiff;
        let cont = [
            y,
            ydiff,
            bspl,
            ydiff - k7 * h - bspl,
            (k1 * D1 + k3 * D3 + k4 * D4 + k5 * D5 + k6 * D6 + k7 * D7) * h,
        ];
        Ok((DenseSeg { t0: t, h, cont }, err, k7))
    }
}

fn trivial_trajectory(t0: f64, x0: State) -> Trajectory {
    Trajectory {
        times: alloc::vec![t0],
        states: alloc::vec![x0],
        dense: Vec::new(),
        interpolation_order: 4,
    }
}

fn run_dense(
    rhs: &dyn Fn(f64, State) -> Result<State>,
    x0: State,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    step_cap: Option<&dyn Fn(f64) -> f64>,
) -> Result<Trajectory> {
    if t_span.1 == t_span.0 {
        return Ok(trivial_trajectory(t_span.0, x0));
    }
    let mut stepper = Stepper::new(rhs, x0, t_span, cfg, step_cap)?;
    let mut traj = trivial_trajectory(t_span.0, x0);
    while !stepper.done() {
        let seg = stepper.step()?;
        traj.times.push(stepper.t());
        traj.states.push(stepper.y());
        traj.dense.push(seg);
    }
    Ok(traj)
}

/// Integrate the frozen (autonomous) system over `t_span` with dense output.
pub fn integrate_autonomous(
    params: &ModelParams,
    x0: State,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let p = *params;
    let rhs = move |_t: f64, s: State| p.rhs(s);
    run_dense(&rhs, x0, t_span, cfg, None)
}

/// Step cap keeping shift transitions resolved: within 40/r of a switch time
/// the step is held below 0.1/r, and the approach to a window cannot
/// overshoot it.
pub(crate) fn shift_step_cap(shift: &InputShift) -> impl Fn(f64) -> f64 {
    let r = shift.rate;
    let (tc_a, tc_b) = shift.switch_times();
    let window = 40.0 / r;
    let cap = 0.1 / r;
    let b = shift.b;
    move |t: f64| {
        if b == 0.0 {
            return f64::INFINITY;
        }
        let mut allowed = f64::INFINITY;
        for tc in [Some(tc_a), tc_b].into_iter().flatten() {
            if math::fabs(t - tc) < window {
                allowed = allowed.min(cap);
            } else if t < tc {
                allowed = allowed.min((tc - window - t).max(cap));
            }
        }
        allowed
    }
}

pub(crate) fn nonautonomous_rhs<'a>(
    params_base: &'a ModelParams,
    path: &'a ParameterPath,
    shift: &'a InputShift,
) -> impl Fn(f64, State) -> Result<State> + 'a {
    debug_assert!(
        path.params_at(params_base, shift.eval(0.0)).is_some(),
        "path parameter keys must belong to the model"
    );
    move |t: f64, s: State| {
        let p = shift.eval(t);
        let mp = path
            .params_at(params_base, p)
            .expect("path parameter keys must belong to the model");
        mp.rhs(s)
    }
}

/// Integrate the non-autonomous system: the path's driving parameter follows
/// `shift` at every internal stage evaluation.
pub fn integrate_nonautonomous(
    params_base: &ModelParams,
    path: &ParameterPath,
    shift: &InputShift,
    x0: State,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let rhs = nonautonomous_rhs(params_base, path, shift);
    let cap = shift_step_cap(shift);
    run_dense(&rhs, x0, t_span, cfg, Some(&cap))
}

/// Non-autonomous integration keeping only the final state.
pub fn integrate_nonautonomous_final(
    params_base: &ModelParams,
    path: &ParameterPath,
    shift: &InputShift,
    x0: State,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<(f64, State)> {
    if t_span.1 == t_span.0 {
        return Ok((t_span.0, x0));
    }
    let rhs = nonautonomous_rhs(params_base, path, shift);
    let cap = shift_step_cap(shift);
    let mut stepper = Stepper::new(&rhs, x0, t_span, cfg, Some(&cap))?;
    while !stepper.done() {
        stepper.step()?;
    }
    Ok((stepper.t(), stepper.y()))
}

/// Crossing direction filter of a section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingDirection {
    Increasing,
    Decreasing,
    Any,
}

/// A signed scalar event function of the state, with a direction filter and
/// an optional acceptance gate (e.g. restrict crossings of y = 0 to x > 0).
pub struct Section<'a> {
    pub value: &'a dyn Fn(State) -> f64,
    pub direction: CrossingDirection,
    pub gate: Option<&'a dyn Fn(State) -> bool>,
}

impl<'a> Section<'a> {
    fn matches(&self, g_left: f64, g_right: f64) -> bool {
        match self.direction {
            CrossingDirection::Decreasing => g_left > 0.0 && g_right <= 0.0,
            CrossingDirection::Increasing => g_left < 0.0 && g_right >= 0.0,
            CrossingDirection::Any => {
                (g_left > 0.0 && g_right <= 0.0) || (g_left < 0.0 && g_right >= 0.0)
            }
        }
    }
}

/// Subdivisions of each step scanned for sign changes of the event function.
const EVENT_SUBSAMPLES: usize = 8;

/// Locate a crossing within one dense segment, if any, by scanning
/// subintervals for sign changes and bisecting each candidate.
pub(crate) fn crossing_in_segment(
    seg: &DenseSeg,
    section: &Section<'_>,
    t_tol: f64,
    t_after: f64,
) -> Option<(f64, State)> {
    let n = EVENT_SUBSAMPLES;
    let mut g_prev = (section.value)(seg.eval(seg.t0));
    let mut t_prev = seg.t0;
    for i in 1..=n {
        let t_i = seg.t0 + seg.h * i as f64 / n as f64;
        let g_i = (section.value)(seg.eval(t_i));
        if section.matches(g_prev, g_i) && t_i > t_after {
            // Bisect the bracket to the requested time tolerance.
            let (mut lo, mut hi) = (t_prev, t_i);
            let mut g_lo = g_prev;
            let mut iter = 0;
            while hi - lo > t_tol && iter < 80 {
                let mid = 0.5 * (lo + hi);
                let g_mid = (section.value)(seg.eval(mid));
                // Keep the bracket that still contains the sign change.
                if (g_lo > 0.0) == (g_mid > 0.0) && g_mid != 0.0 {
                    lo = mid;
                    g_lo = g_mid;
                } else {
                    hi = mid;
                }
                iter += 1;
            }
            let t_hit = 0.5 * (lo + hi);
            let s_hit = seg.eval(t_hit);
            let accept = section.gate.map(|g| g(s_hit)).unwrap_or(true);
            if accept && t_hit > t_after {
                return Some((t_hit, s_hit));
            }
        }
        g_prev = g_i;
        t_prev = t_i;
    }
    None
}

/// All directional crossings of `section` along the trajectory, located by
/// bisection on the dense-output interpolant.
pub fn find_section_crossings(
    traj: &Trajectory,
    section: &Section<'_>,
) -> Result<Vec<(f64, State)>> {
    let duration = traj.end_time() - traj.start_time();
    let t_tol = 1e-10 * duration.max(1.0);
    let mut out = Vec::new();
    let mut t_after = f64::NEG_INFINITY;
    for seg in &traj.dense {
        // A segment can hold several crossings; rescan it after each hit.
        let mut local_after = t_after;
        while let Some((t, s)) = crossing_in_segment(seg, section, t_tol, local_after) {
            out.push((t, s));
            local_after = t + t_tol.max(1e-14 * math::fabs(t));
        }
        t_after = local_after;
    }
    if out.is_empty() {
        return Err(Error::NoCrossing);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Model, VdpParams};
    use core::f64::consts::PI;

    fn vdp_p8() -> ModelParams {
        ModelParams::Vdp(VdpParams { mu: 1.52, alpha: 0.093, beta: 0.0019, d: -0.03 })
    }

    #[test]
    fn zero_span_returns_initial_state() {
        let traj =
            integrate_autonomous(&vdp_p8(), State::new(4.0, 0.0), (0.0, 0.0), &Default::default())
                .unwrap();
        assert_eq!(traj.states, alloc::vec![State::new(4.0, 0.0)]);
        assert_eq!(traj.state_at(0.0), State::new(4.0, 0.0));
    }

    #[test]
    fn harmonic_oscillator_crossing_at_two_pi() {
        // x' = y, y' = -x from (1, 0): first downward crossing of y = 0 with
        // x > 0 happens exactly at t = 2 pi.
        let rhs = |_t: f64, s: State| Ok(State::new(s.y, -s.x));
        let cfg = IntegratorConfig::default();
        let traj = run_dense(&rhs, State::new(1.0, 0.0), (0.0, 10.0), &cfg, None).unwrap();
        let value = |s: State| s.y;
        let gate = |s: State| s.x > 0.0;
        let section =
            Section { value: &value, direction: CrossingDirection::Decreasing, gate: Some(&gate) };
        let crossings = find_section_crossings(&traj, &section).unwrap();
        assert_eq!(crossings.len(), 1);
        assert!((crossings[0].0 - 2.0 * PI).abs() < 1e-8, "t = {}", crossings[0].0);
        assert!((crossings[0].1.x - 1.0).abs() < 1e-8);
    }

    #[test]
    fn constant_sign_event_has_no_crossing() {
        let rhs = |_t: f64, s: State| Ok(State::new(s.y, -s.x));
        let traj =
            run_dense(&rhs, State::new(1.0, 0.0), (0.0, 10.0), &Default::default(), None).unwrap();
        let value = |s: State| s.x * s.x + s.y * s.y + 1.0;
        let section = Section { value: &value, direction: CrossingDirection::Any, gate: None };
        assert!(matches!(find_section_crossings(&traj, &section), Err(Error::NoCrossing)));
    }

    #[test]
    fn dense_output_matches_analytic_solution() {
        let rhs = |_t: f64, s: State| Ok(State::new(s.y, -s.x));
        let traj =
            run_dense(&rhs, State::new(1.0, 0.0), (0.0, 7.0), &Default::default(), None).unwrap();
        for k in 0..700 {
            let t = 0.01 * k as f64;
            let s = traj.state_at(t);
            assert!((s.x - t.cos()).abs() < 1e-8, "x({t})");
            assert!((s.y + t.sin()).abs() < 1e-8, "y({t})");
        }
    }

    #[test]
    fn self_convergence_under_tightened_tolerance() {
        let x0 = State::new(4.0, 0.0);
        let run = |rel: f64, abs: f64| {
            let cfg = IntegratorConfig::with_tols(rel, abs);
            integrate_autonomous(&vdp_p8(), x0, (0.0, 100.0), &cfg).unwrap().end_state()
        };
        let a = run(1e-8, 1e-10);
        let b = run(1e-9, 1e-11);
        assert!(a.dist(b) < 1e-6, "drift {}", a.dist(b));
    }

    #[test]
    fn time_reversal_returns_to_start() {
        // Weakly damped parameters so the span is non-stiff in both time
        // directions; strong dissipation amplifies backward errors by the
        // inverse of the forward contraction and is out of scope here.
        let p = ModelParams::Vdp(VdpParams { mu: 0.02, alpha: 0.093, beta: 0.0019, d: -0.01 });
        let x0 = State::new(2.0, 0.0);
        let cfg = IntegratorConfig::default();
        let span = 19.0; // about three periods
        let fwd = integrate_autonomous(&p, x0, (0.0, span), &cfg).unwrap();
        let end = fwd.end_state();
        let reversed = move |_t: f64, s: State| p.rhs(s).map(|f| -f);
        let back = run_dense(&reversed, end, (0.0, span), &cfg, None).unwrap();
        let ret = back.end_state();
        let scale = x0.norm().max(1.0);
        assert!(ret.dist(x0) < 10.0 * cfg.rel_tol * scale, "gap {}", ret.dist(x0));
    }

    #[test]
    fn zero_magnitude_shift_is_bitwise_autonomous() {
        let base = vdp_p8();
        let path = ParameterPath::new(crate::models::ParamKey::Mu);
        let shift = InputShift::monotone(1.52, 0.0, 4.0, 28.0);
        let cfg = IntegratorConfig::default();
        let x0 = State::new(4.0, 1.89);
        let auto = integrate_autonomous(&base, x0, (0.0, 50.0), &cfg).unwrap();
        let non = integrate_nonautonomous(&base, &path, &shift, x0, (0.0, 50.0), &cfg).unwrap();
        assert_eq!(auto.end_state(), non.end_state());
        assert_eq!(base.model(), Model::Vdp);
    }

    #[test]
    fn settled_fast_shift_matches_frozen_future_system() {
        // After the switch has settled, a fast monotone shift run matches an
        // autonomous run at the future level started from the same state.
        let base = vdp_p8();
        let path = ParameterPath::new(crate::models::ParamKey::Mu);
        let shift = InputShift::monotone(1.52, 1.0, 1e3, 5.0);
        let cfg = IntegratorConfig::default();
        let x0 = State::new(4.0, 1.89);
        let t0 = 6.0; // past t_c: shift already settled at 0.52
        let non =
            integrate_nonautonomous(&base, &path, &shift, x0, (t0, t0 + 20.0), &cfg).unwrap();
        let frozen = ModelParams::Vdp(VdpParams { mu: 0.52, alpha: 0.093, beta: 0.0019, d: -0.03 });
        let auto = integrate_autonomous(&frozen, x0, (t0, t0 + 20.0), &cfg).unwrap();
        assert!(non.end_state().dist(auto.end_state()) < 1e-6);
    }

    #[test]
    fn domain_guard_propagates_for_escaping_orbit() {
        // Reversed-time glycolysis flow near the y axis exits the quadrant.
        let p = ModelParams::Gly(crate::models::GlyParams {
            v: 0.275,
            sigma_i: 1.226,
            k_half: 10.0,
            l: 3.6e6,
            sigma_m: 10.0,
            n: 5,
            q: 1.0,
            k_s: 0.06,
        });
        let reversed = move |_t: f64, s: State| p.rhs(s).map(|f| -f);
        let res = run_dense(&reversed, State::new(0.05, 0.05), (0.0, 50.0), &Default::default(), None);
        assert!(matches!(res, Err(Error::DomainEscape { .. })), "{res:?}");
    }
}
