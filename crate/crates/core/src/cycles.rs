//! Equilibria and limit cycles of the frozen systems.
//!
//! Stable cycles are found by iterating a Poincaré return map until
//! consecutive returns coincide; the repelling cycle is found the same way in
//! reversed time, which turns it into an attractor because the systems are
//! planar. Cycles are resampled onto a uniform time grid anchored at the
//! point of maximal x.

use alloc::vec::Vec;

use crate::integrate::{
    crossing_in_segment, CrossingDirection, IntegratorConfig, Section, Stepper,
};
use crate::math;
use crate::models::{
    eigenvalues_2x2, jacobian, Eigenvalue, Model, ModelParams, State,
};
use crate::{Error, Result};

/// Convergence settings of the return-map search.
#[derive(Debug, Clone, Copy)]
pub struct CycleSearchCfg {
    /// Consecutive returns must agree to this tolerance, scaled by the state
    /// magnitude, before the orbit counts as periodic.
    pub return_tol: f64,
    /// Give up after this many returns.
    pub max_returns: usize,
    /// Number of uniform samples the cycle is resampled onto.
    pub samples: usize,
    /// Time allowed before the first section crossing.
    pub first_return_budget: f64,
    /// States beyond this norm count as escaped.
    pub escape_radius: f64,
}

impl Default for CycleSearchCfg {
    fn default() -> Self {
        CycleSearchCfg {
            return_tol: 1e-9,
            max_returns: 500,
            samples: 2048,
            first_return_budget: 3000.0,
            escape_radius: 1e4,
        }
    }
}

/// Attractor/repeller flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// A densely sampled periodic orbit.
///
/// Samples are uniformly spaced in time over one period and the anchor (the
/// point of maximal x, refined by quadratic interpolation) sits at index 0.
#[derive(Debug, Clone)]
pub struct LimitCycle {
    pub samples: Vec<State>,
    pub period: f64,
    pub angular_frequency: f64,
    pub stability: Stability,
    pub anchor_index: usize,
    pub params: ModelParams,
}

impl LimitCycle {
    pub fn max_x(&self) -> f64 {
        self.samples.iter().fold(f64::NEG_INFINITY, |m, s| m.max(s.x))
    }

    pub fn min_x(&self) -> f64 {
        self.samples.iter().fold(f64::INFINITY, |m, s| m.min(s.x))
    }

    /// Half the x-extent of the orbit.
    pub fn amplitude(&self) -> f64 {
        0.5 * (self.max_x() - self.min_x())
    }

    /// Bounding box as (lower-left, upper-right).
    pub fn bbox(&self) -> (State, State) {
        let mut lo = State::new(f64::INFINITY, f64::INFINITY);
        let mut hi = State::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for s in &self.samples {
            lo.x = lo.x.min(s.x);
            lo.y = lo.y.min(s.y);
            hi.x = hi.x.max(s.x);
            hi.y = hi.y.max(s.y);
        }
        (lo, hi)
    }

    /// Diagonal of the bounding box.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bbox();
        lo.dist(hi)
    }

    /// Spacing of the uniform time grid.
    pub fn sample_dt(&self) -> f64 {
        self.period / self.samples.len() as f64
    }

    /// Minimal distance from `s` to the sample set, refined on the two
    /// segments adjacent to the nearest sample.
    pub fn dist_to(&self, s: State) -> f64 {
        let n = self.samples.len();
        let mut best = f64::INFINITY;
        let mut best_i = 0usize;
        for (i, p) in self.samples.iter().enumerate() {
            let d = p.dist(s);
            if d < best {
                best = d;
                best_i = i;
            }
        }
        let prev = self.samples[(best_i + n - 1) % n];
        let here = self.samples[best_i];
        let next = self.samples[(best_i + 1) % n];
        best.min(point_segment_dist(s, prev, here)).min(point_segment_dist(s, here, next))
    }
}

pub(crate) fn point_segment_dist(p: State, a: State, b: State) -> f64 {
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// An equilibrium with its local linearisation.
#[derive(Debug, Clone, Copy)]
pub struct Equilibrium {
    pub location: State,
    pub eigenvalues: [Eigenvalue; 2],
    pub stability: Stability,
}

/// Damped Newton iteration on the vector field from `seed`.
pub fn find_equilibrium(params: &ModelParams, seed: State) -> Result<Equilibrium> {
    let mut x = seed;
    let mut f = params.rhs(x)?;
    for _ in 0..100 {
        let scale = x.max_abs().max(1.0);
        if f.norm() < 1e-12 * scale {
            let j = jacobian(params, x)?;
            let eigenvalues = eigenvalues_2x2(&j);
            let stability = if eigenvalues[0].re < 0.0 && eigenvalues[1].re < 0.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            return Ok(Equilibrium { location: x, eigenvalues, stability });
        }
        let j = jacobian(params, x)?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if math::fabs(det) < 1e-300 {
            return Err(Error::NoConvergence);
        }
        let dx = State::new(
            (-f.x * j[1][1] + f.y * j[0][1]) / det,
            (-j[0][0] * f.y + j[1][0] * f.x) / det,
        );
        // Backtracking line search on the residual norm.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..16 {
            let trial = x + dx * lambda;
            if let Ok(ft) = params.rhs(trial) {
                if ft.norm() <= (1.0 - 0.5 * lambda) * f.norm() || ft.norm() < 1e-13 {
                    x = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence);
        }
    }
    Err(Error::NoConvergence)
}

/// Equilibrium from a model-aware default seed: the origin for the van der
/// Pol system; for the glycolysis model the product level is fixed by the
/// mass balance (y = q v / k_s) and the substrate coordinate is bracketed on
/// a log grid before Newton refinement.
pub fn default_equilibrium(params: &ModelParams) -> Result<Equilibrium> {
    match params {
        ModelParams::Vdp(_) => find_equilibrium(params, State::new(0.0, 0.0)),
        ModelParams::Gly(p) => {
            let y_e = p.q * p.v / p.k_s;
            let xdot = |x: f64| -> Result<f64> {
                Ok(params.rhs(State::new(x, y_e))?.x)
            };
            let mut lo = 1e-6;
            let mut g_lo = xdot(lo)?;
            let mut hi = lo;
            let mut found = false;
            while hi < 1e9 {
                hi *= 2.0;
                let g_hi = xdot(hi)?;
                if (g_lo > 0.0) != (g_hi > 0.0) {
                    found = true;
                    break;
                }
                lo = hi;
                g_lo = g_hi;
            }
            if !found {
                return Err(Error::NoConvergence);
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let g_mid = xdot(mid)?;
                if (g_lo > 0.0) == (g_mid > 0.0) {
                    lo = mid;
                    g_lo = g_mid;
                } else {
                    hi = mid;
                }
            }
            find_equilibrium(params, State::new(0.5 * (lo + hi), y_e))
        }
    }
}

/// Section used by the return map, chosen to be transversal to all three
/// cycles: the max-x event (y = 0, x > 0, y decreasing) for the van der Pol
/// system, and the vertical line through the equilibrium with x increasing
/// for the glycolysis model. `reversed` flips the crossing direction so the
/// same geometric section works in reversed time.
pub(crate) struct ModelSection {
    kind: Model,
    x_e: f64,
    reversed: bool,
}

impl ModelSection {
    pub fn new(params: &ModelParams, reversed: bool) -> Result<ModelSection> {
        let x_e = match params {
            ModelParams::Vdp(_) => 0.0,
            ModelParams::Gly(_) => default_equilibrium(params)?.location.x,
        };
        Ok(ModelSection { kind: params.model(), x_e, reversed })
    }

    pub fn value(&self, s: State) -> f64 {
        match self.kind {
            Model::Vdp => s.y,
            Model::Gly => s.x - self.x_e,
        }
    }

    pub fn direction(&self) -> CrossingDirection {
        let fwd = match self.kind {
            Model::Vdp => CrossingDirection::Decreasing,
            Model::Gly => CrossingDirection::Increasing,
        };
        if !self.reversed {
            return fwd;
        }
        match fwd {
            CrossingDirection::Decreasing => CrossingDirection::Increasing,
            CrossingDirection::Increasing => CrossingDirection::Decreasing,
            CrossingDirection::Any => CrossingDirection::Any,
        }
    }

    pub fn gate(&self, s: State) -> bool {
        match self.kind {
            Model::Vdp => s.x > 0.0,
            Model::Gly => true,
        }
    }
}

/// Outcome of the return-map iteration.
struct ConvergedOrbit {
    x_star: State,
    period: f64,
}

/// What the orbit did instead of settling on a cycle.
enum SearchMode {
    Stable,
    Reversed,
}

/// Early-exit hint: crossings spiralling into this point are equilibrium
/// bound and the search stops without waiting for full degeneration.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EquilibriumExit {
    pub location: State,
    /// Crossings closer than this radius count as captured.
    pub capture_radius: f64,
}

/// Iterate the return map until consecutive crossings coincide.
fn run_to_periodic(
    rhs: &dyn Fn(f64, State) -> Result<State>,
    seed: State,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
    section: &ModelSection,
    mode: &SearchMode,
    eq_exit: Option<EquilibriumExit>,
) -> Result<ConvergedOrbit> {
    let eq_error = || match mode {
        SearchMode::Stable => Error::NotPeriodic,
        SearchMode::Reversed => Error::WrongBasin,
    };
    let value = |s: State| section.value(s);
    let gate = |s: State| section.gate(s);
    let sec = Section { value: &value, direction: section.direction(), gate: Some(&gate) };

    let mut stepper = Stepper::new(rhs, seed, (0.0, icfg.max_time), icfg, None).map_err(|e| {
        match e {
            Error::DomainEscape { .. } => Error::NotPeriodic,
            other => other,
        }
    })?;

    let mut crossings: Vec<(f64, State)> = Vec::new();
    let mut converged_streak = 0usize;
    let mut drought_start = 0.0_f64;
    // Orbit extent since the first crossing, used to scale the return
    // tolerance to the size of the cycle.
    let mut lo = State::new(f64::INFINITY, f64::INFINITY);
    let mut hi = State::new(f64::NEG_INFINITY, f64::NEG_INFINITY);

    while !stepper.done() {
        let seg = match stepper.step() {
            Ok(seg) => seg,
            // Leaving the domain or stalling means the orbit is not heading
            // to a cycle of this search.
            Err(Error::DomainEscape { .. }) | Err(Error::StepSizeUnderflow { .. }) => {
                return Err(Error::NotPeriodic)
            }
            Err(Error::MaxTimeExceeded { .. }) => return Err(Error::NotPeriodic),
            Err(e) => return Err(e),
        };
        let y = stepper.y();
        if y.max_abs() > ccfg.escape_radius {
            return Err(Error::NotPeriodic);
        }
        if !crossings.is_empty() {
            lo.x = lo.x.min(y.x);
            lo.y = lo.y.min(y.y);
            hi.x = hi.x.max(y.x);
            hi.y = hi.y.max(y.y);
        }
        let t_tol = 1e-12_f64.max(stepper.t() * 1e-15);
        let t_after = crossings.last().map(|c| c.0 + 1e-9).unwrap_or(f64::NEG_INFINITY);
        if let Some((t, x)) = crossing_in_segment(&seg, &sec, t_tol, t_after) {
            // Converging to an equilibrium shows up as a vanishing field at
            // the crossings (the return map degenerates).
            let f_here = rhs(t, x)?;
            if f_here.norm() < 1e-8 * x.max_abs().max(1.0) {
                return Err(eq_error());
            }
            if let Some(eq) = eq_exit {
                // A crossing captured near the equilibrium means the orbit
                // is spiralling in; cycles smaller than the capture radius
                // are below the census resolution.
                let radius = x.dist(eq.location);
                if radius < eq.capture_radius {
                    return Err(eq_error());
                }
            }
            if let Some(&(_, prev)) = crossings.last() {
                let diam = if lo.x.is_finite() { lo.dist(hi) } else { 0.0 };
                let scale = diam.max(1.0);
                if prev.dist(x) < ccfg.return_tol * scale {
                    converged_streak += 1;
                } else {
                    converged_streak = 0;
                }
            }
            crossings.push((t, x));
            drought_start = t;
            // The period is the mean of the last five return intervals, so
            // every interval in that window must already be converged.
            if converged_streak >= 5 && crossings.len() >= 6 {
                let k = crossings.len() - 1;
                let period = (crossings[k].0 - crossings[k - 5].0) / 5.0;
                return Ok(ConvergedOrbit { x_star: crossings[k].1, period });
            }
            if crossings.len() > ccfg.max_returns {
                return Err(Error::NotPeriodic);
            }
        }
        // Returns ceased: either a drought before the first crossing or the
        // orbit left the rotating regime.
        let budget = if crossings.len() < 2 {
            ccfg.first_return_budget
        } else {
            let mean = (crossings[crossings.len() - 1].0 - crossings[0].0)
                / (crossings.len() - 1) as f64;
            20.0 * mean
        };
        if stepper.t() - drought_start > budget {
            return Err(Error::NotPeriodic);
        }
    }
    Err(Error::NotPeriodic)
}

/// Resample the orbit through `x_star` onto a uniform grid of `n` samples
/// anchored at the refined max-x point. Returns samples in integration-time
/// order.
fn resample_anchored(
    rhs: &dyn Fn(f64, State) -> Result<State>,
    x_star: State,
    period: f64,
    icfg: &IntegratorConfig,
    n: usize,
) -> Result<Vec<State>> {
    let span = 2.05 * period;
    let mut stepper = Stepper::new(rhs, x_star, (0.0, span), icfg, None)?;
    let mut segs = Vec::new();
    while !stepper.done() {
        segs.push(stepper.step()?);
    }
    let eval = |t: f64| -> State {
        let idx = segs.partition_point(|seg| seg.t_end() < t).min(segs.len() - 1);
        segs[idx].eval(t)
    };

    // Coarse argmax of x over one period, with a tie check between distinct
    // local maxima.
    let m = 4 * n;
    let dt = period / m as f64;
    let xs: Vec<f64> = (0..m).map(|j| eval(dt * j as f64).x).collect();
    let mut best_j = 0;
    for (j, &x) in xs.iter().enumerate() {
        if x > xs[best_j] {
            best_j = j;
        }
    }
    let mut second_best = f64::NEG_INFINITY;
    for j in 0..m {
        let prev = xs[(j + m - 1) % m];
        let next = xs[(j + 1) % m];
        if xs[j] >= prev && xs[j] >= next {
            let far = {
                let d = (j as i64 - best_j as i64).rem_euclid(m as i64);
                d.min(m as i64 - d) > (m / 64) as i64
            };
            if far && xs[j] > second_best {
                second_best = xs[j];
            }
        }
    }
    if (xs[best_j] - second_best).abs() < 1e-8 {
        return Err(Error::AmbiguousAnchor);
    }

    // Refine the anchor time to the zero of dx/dt. The x-derivative of the
    // orbit comes from the vector field itself, which locates the flat
    // maximum far more sharply than fitting x values.
    let mut t_a = dt * best_j as f64;
    if t_a < dt {
        // Keep the refinement bracket inside the integrated span by using
        // the same point one period later.
        t_a += period;
    }
    let g = |t: f64| -> Result<f64> { Ok(rhs(t, eval(t))?.x) };
    let (mut t_lo, mut t_hi) = (t_a - dt, t_a + dt);
    let mut refined = false;
    for widen in 0..2 {
        let w = dt * (1 << widen) as f64;
        t_lo = t_a - w;
        t_hi = t_a + w;
        let (g_lo, g_hi) = (g(t_lo.max(0.0))?, g(t_hi)?);
        if g_lo > 0.0 && g_hi < 0.0 {
            refined = true;
            break;
        }
    }
    if refined {
        let mut g_lo = g(t_lo.max(0.0))?;
        for _ in 0..60 {
            let mid = 0.5 * (t_lo + t_hi);
            let g_mid = g(mid.max(0.0))?;
            if (g_lo > 0.0) == (g_mid > 0.0) && g_mid != 0.0 {
                t_lo = mid;
                g_lo = g_mid;
            } else {
                t_hi = mid;
            }
        }
        t_a = 0.5 * (t_lo + t_hi);
    } else {
        // Fall back to a single quadratic fit through the coarse neighbours.
        let (xm, x0, xp) = (eval(t_a - dt).x, eval(t_a).x, eval(t_a + dt).x);
        let denom = xm - 2.0 * x0 + xp;
        if denom.abs() > 0.0 {
            let shift = 0.5 * (xm - xp) / denom * dt;
            t_a += shift.clamp(-dt, dt);
        }
    }
    t_a = math::rem_euclid(t_a, period);

    let sample_dt = period / n as f64;
    let mut samples = Vec::with_capacity(n);
    for j in 0..n {
        samples.push(eval(t_a + sample_dt * j as f64));
    }
    // Closure check against the point one full period after the anchor.
    let gap = eval(t_a + period).dist(samples[0]);
    let mut diam = 0.0_f64;
    let (mut lo, mut hi) = (samples[0], samples[0]);
    for s in &samples {
        lo.x = lo.x.min(s.x);
        lo.y = lo.y.min(s.y);
        hi.x = hi.x.max(s.x);
        hi.y = hi.y.max(s.y);
    }
    diam = diam.max(lo.dist(hi));
    if diam == 0.0 || gap > 1e-6 * diam {
        return Err(Error::NotPeriodic);
    }
    Ok(samples)
}

/// Find the stable limit cycle whose basin contains `seed`.
pub fn find_stable_cycle(
    params: &ModelParams,
    seed: State,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<LimitCycle> {
    find_stable_cycle_with_exit(params, seed, icfg, ccfg, None)
}

pub(crate) fn find_stable_cycle_with_exit(
    params: &ModelParams,
    seed: State,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
    eq_exit: Option<EquilibriumExit>,
) -> Result<LimitCycle> {
    let p = *params;
    let rhs = move |_t: f64, s: State| p.rhs(s);
    let section = ModelSection::new(params, false)?;
    let orbit = run_to_periodic(&rhs, seed, icfg, ccfg, &section, &SearchMode::Stable, eq_exit)?;
    let samples = resample_anchored(&rhs, orbit.x_star, orbit.period, icfg, ccfg.samples)?;
    Ok(LimitCycle {
        samples,
        period: orbit.period,
        angular_frequency: 2.0 * core::f64::consts::PI / orbit.period,
        stability: Stability::Stable,
        anchor_index: 0,
        params: *params,
    })
}

/// Coordinate of a cycle on the model section, used to place seeds between
/// nested cycles: the max-x for the van der Pol system, the y value of the
/// upward crossing of the vertical line through the equilibrium for the
/// glycolysis model.
pub(crate) fn section_coordinate(params: &ModelParams, cycle: &LimitCycle) -> f64 {
    match params.model() {
        Model::Vdp => cycle.max_x(),
        Model::Gly => {
            let x_e = match default_equilibrium(params) {
                Ok(eq) => eq.location.x,
                Err(_) => return cycle.samples[0].y,
            };
            let n = cycle.samples.len();
            for i in 0..n {
                let a = cycle.samples[i];
                let b = cycle.samples[(i + 1) % n];
                if a.x <= x_e && b.x > x_e {
                    let w = (x_e - a.x) / (b.x - a.x);
                    return a.y + w * (b.y - a.y);
                }
            }
            cycle.samples[0].y
        }
    }
}

/// State on the model section at section coordinate `c`.
pub(crate) fn seed_from_section_coordinate(params: &ModelParams, c: f64) -> State {
    match params.model() {
        Model::Vdp => State::new(c, 0.0),
        Model::Gly => {
            let x_e = default_equilibrium(params).map(|eq| eq.location.x).unwrap_or(c);
            State::new(x_e, c)
        }
    }
}

/// Find the repelling cycle separating the two stable ones, by integrating
/// the negated vector field from a seed in the annulus between them. The
/// returned cycle carries forward time orientation.
pub fn find_unstable_cycle(
    params: &ModelParams,
    seed: State,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<LimitCycle> {
    let p = *params;
    let rhs = move |_t: f64, s: State| p.rhs(s).map(|f| -f);
    let section = ModelSection::new(params, true)?;
    let orbit = run_to_periodic(&rhs, seed, icfg, ccfg, &section, &SearchMode::Reversed, None)?;
    let reversed_samples = resample_anchored(&rhs, orbit.x_star, orbit.period, icfg, ccfg.samples)?;
    // Restore forward orientation: sample j of the forward cycle is sample
    // (n - j) mod n of the reversed-time traversal.
    let n = reversed_samples.len();
    let mut samples = Vec::with_capacity(n);
    samples.push(reversed_samples[0]);
    for j in 1..n {
        samples.push(reversed_samples[n - j]);
    }
    Ok(LimitCycle {
        samples,
        period: orbit.period,
        angular_frequency: 2.0 * core::f64::consts::PI / orbit.period,
        stability: Stability::Unstable,
        anchor_index: 0,
        params: *params,
    })
}

/// Positive real roots, in ascending order, of the amplitude polynomial
/// mu (1 - A^2/4 + alpha A^4/8 - 5 beta A^6/64) - d of the van der Pol
/// system. At most three roots exist.
pub fn amplitude_roots(p: &crate::models::VdpParams) -> Vec<f64> {
    let f = |a: f64| -> f64 {
        let a2 = a * a;
        p.mu * (1.0 - 0.25 * a2 + p.alpha / 8.0 * a2 * a2 - 5.0 * p.beta / 64.0 * a2 * a2 * a2)
            - p.d
    };
    // Cauchy root bound of the cubic in u = A^2.
    let c = [p.mu - p.d, -0.25 * p.mu, p.alpha / 8.0 * p.mu, -5.0 * p.beta / 64.0 * p.mu];
    let mut lead = 0usize;
    for (i, ci) in c.iter().enumerate() {
        if *ci != 0.0 {
            lead = i;
        }
    }
    if lead == 0 {
        return Vec::new();
    }
    let mut bound = 0.0_f64;
    for ci in c.iter().take(lead) {
        bound = bound.max(math::fabs(*ci));
    }
    let u_max = 1.0 + bound / math::fabs(c[lead]);
    let a_max = math::sqrt(u_max);

    let n = 4096;
    let da = a_max / n as f64;
    let mut roots = Vec::new();
    let mut a_prev = da * 1e-6;
    let mut f_prev = f(a_prev);
    for j in 1..=n {
        let a_j = da * j as f64;
        let f_j = f(a_j);
        if f_j == 0.0 {
            roots.push(a_j);
        } else if (f_prev > 0.0) != (f_j > 0.0) {
            let (mut lo, mut hi, mut f_lo) = (a_prev, a_j, f_prev);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let f_mid = f(mid);
                if (f_lo > 0.0) == (f_mid > 0.0) && f_mid != 0.0 {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a_prev = a_j;
        f_prev = f_j;
    }
    roots.truncate(3);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{GlyParams, VdpParams};

    fn vdp(mu: f64, d: f64) -> ModelParams {
        ModelParams::Vdp(VdpParams { mu, alpha: 0.093, beta: 0.0019, d })
    }

    fn gly(v: f64, sigma_i: f64) -> ModelParams {
        ModelParams::Gly(GlyParams {
            v,
            sigma_i,
            k_half: 10.0,
            l: 3.6e6,
            sigma_m: 10.0,
            n: 5,
            q: 1.0,
            k_s: 0.06,
        })
    }

    #[test]
    fn vdp_equilibrium_at_origin() {
        let eq = find_equilibrium(&vdp(1.0, -0.03), State::new(0.1, 0.1)).unwrap();
        assert!(eq.location.norm() < 1e-10);
        assert_eq!(eq.stability, Stability::Unstable);
    }

    #[test]
    fn gly_equilibrium_stability_by_region() {
        // Stable focus where only the point attractor exists.
        let eq = default_equilibrium(&gly(0.34, 1.6)).unwrap();
        assert_eq!(eq.stability, Stability::Stable);
        assert!(eq.eigenvalues[0].re < 0.0 && eq.eigenvalues[1].re < 0.0);
        // Unstable inside the birhythmic region.
        let eq = default_equilibrium(&gly(0.29, 1.15)).unwrap();
        assert_eq!(eq.stability, Stability::Unstable);
        // Mass balance pins the product coordinate.
        assert!((eq.location.y - 0.29 / 0.06).abs() < 1e-6);
    }

    #[test]
    fn amplitude_classical_root() {
        let p = VdpParams { mu: 1.0, alpha: 0.0, beta: 0.0, d: 0.0 };
        let roots = amplitude_roots(&p);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn amplitude_three_roots_at_birhythmic_point() {
        let p = VdpParams { mu: 0.6, alpha: 0.114, beta: 0.003, d: -0.1 };
        let roots = amplitude_roots(&p);
        assert_eq!(roots.len(), 3, "roots: {roots:?}");
        assert!(roots[0] < roots[1] && roots[1] < roots[2]);
    }

    #[test]
    fn amplitude_roots_match_dense_scan_oracle() {
        // Brute-force sign scan of the polynomial with one million points.
        let p = VdpParams { mu: 0.6, alpha: 0.114, beta: 0.003, d: -0.1 };
        let f = |a: f64| {
            p.mu * (1.0 - a.powi(2) / 4.0 + p.alpha * a.powi(4) / 8.0
                - 5.0 * p.beta * a.powi(6) / 64.0)
                - p.d
        };
        let mut oracle = alloc::vec::Vec::new();
        let a_max = 20.0;
        let n = 1_000_000;
        for j in 1..=n {
            let a0 = a_max * (j - 1) as f64 / n as f64;
            let a1 = a_max * j as f64 / n as f64;
            if (f(a0.max(1e-9)) > 0.0) != (f(a1) > 0.0) {
                oracle.push(0.5 * (a0 + a1));
            }
        }
        let roots = amplitude_roots(&p);
        assert_eq!(roots.len(), oracle.len());
        for (r, o) in roots.iter().zip(&oracle) {
            assert!((r - o).abs() < 2.0 * a_max / n as f64, "root {r} vs oracle {o}");
        }
    }

    #[test]
    fn vdp_stable_cycle_anchor_and_sampling() {
        let params = vdp(1.52, -0.03);
        let cycle = find_stable_cycle(
            &params,
            State::new(9.0, 0.0),
            &IntegratorConfig::default(),
            &CycleSearchCfg::default(),
        )
        .unwrap();
        // Regression value for the outer cycle at these parameters.
        assert!((cycle.period - 7.0953).abs() < 1e-3, "T = {}", cycle.period);
        assert_eq!(cycle.samples.len(), 2048);
        // The anchor is the max-x point; since x' = y there, its y vanishes.
        assert!(cycle.samples[0].y.abs() < 1e-4, "anchor y = {}", cycle.samples[0].y);
        let max_x = cycle.max_x();
        assert!((cycle.samples[0].x - max_x).abs() < 1e-8);
    }

    #[test]
    fn vdp_cycle_is_symmetric_and_seed_independent() {
        let params = vdp(1.52, -0.03);
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let a = find_stable_cycle(&params, State::new(9.0, 0.0), &icfg, &ccfg).unwrap();
        let b = find_stable_cycle(&params, State::new(-8.0, 1.0), &icfg, &ccfg).unwrap();
        assert!((a.period - b.period).abs() < 1e-6 * a.period);
        // Sample set invariant under s -> -s within sampling tolerance.
        let tol = 1e-3 * a.diameter();
        for j in (0..a.samples.len()).step_by(97) {
            let mirrored = -a.samples[j];
            assert!(a.dist_to(mirrored) < tol, "asymmetry {} at {j}", a.dist_to(mirrored));
        }
    }

    #[test]
    fn gly_stable_cycle_period_golden() {
        let params = gly(0.275, 1.226);
        let cycle = find_stable_cycle(
            &params,
            State::new(75.71, 2.76),
            &IntegratorConfig::default(),
            &CycleSearchCfg::default(),
        )
        .unwrap();
        assert!((cycle.period - 308.266).abs() < 0.5, "T = {}", cycle.period);
    }

    #[test]
    fn unstable_cycle_sits_between_the_stable_ones() {
        let params = ModelParams::Vdp(VdpParams { mu: 0.6, alpha: 0.114, beta: 0.003, d: -0.1 });
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let inner = find_stable_cycle(&params, State::new(0.5, 0.0), &icfg, &ccfg).unwrap();
        let outer = find_stable_cycle(&params, State::new(6.0, 0.0), &icfg, &ccfg).unwrap();
        assert!(inner.amplitude() < outer.amplitude());
        let seed = State::new(0.5 * (inner.max_x() + outer.max_x()), 0.0);
        let theta = find_unstable_cycle(&params, seed, &icfg, &ccfg).unwrap();
        assert_eq!(theta.stability, Stability::Unstable);
        assert!(inner.amplitude() < theta.amplitude() && theta.amplitude() < outer.amplitude());
    }

    #[test]
    fn unstable_cycle_is_a_genuine_forward_orbit() {
        let params = ModelParams::Vdp(VdpParams { mu: 0.6, alpha: 0.114, beta: 0.003, d: -0.1 });
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let inner = find_stable_cycle(&params, State::new(0.5, 0.0), &icfg, &ccfg).unwrap();
        let outer = find_stable_cycle(&params, State::new(6.0, 0.0), &icfg, &ccfg).unwrap();
        let seed = State::new(0.5 * (inner.max_x() + outer.max_x()), 0.0);
        let theta = find_unstable_cycle(&params, seed, &icfg, &ccfg).unwrap();
        // Re-integrate forward for one period from a few samples; each must
        // come back to itself within a small fraction of the diameter.
        let tol = 1e-4 * theta.diameter();
        for j in [0usize, 512, 1024, 1536] {
            let traj = crate::integrate::integrate_autonomous(
                &params,
                theta.samples[j],
                (0.0, theta.period),
                &icfg,
            )
            .unwrap();
            let gap = traj.end_state().dist(theta.samples[j]);
            assert!(gap < tol, "sample {j} drifts {gap}");
        }
    }

    #[test]
    fn no_separatrix_outside_birhythmic_region() {
        // Only the large cycle exists here; the reversed search cannot find a
        // repelling cycle.
        let params = vdp(0.05, -0.15);
        let res = find_unstable_cycle(
            &params,
            State::new(2.0, 0.0),
            &IntegratorConfig::default(),
            &CycleSearchCfg::default(),
        );
        assert!(
            matches!(res, Err(Error::WrongBasin) | Err(Error::NotPeriodic)),
            "unexpected: {res:?}"
        );
    }

    #[test]
    fn stable_search_from_equilibrium_basin_reports_not_periodic() {
        // In the stable-point region every orbit spirals into the
        // equilibrium and the return map degenerates.
        let params = vdp(0.05, 0.15);
        let res = find_stable_cycle(
            &params,
            State::new(1.0, 0.0),
            &IntegratorConfig::default(),
            &CycleSearchCfg::default(),
        );
        assert!(matches!(res, Err(Error::NotPeriodic)), "unexpected: {res:?}");
    }
}
