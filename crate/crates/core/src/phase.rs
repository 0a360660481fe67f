//! Phase parametrisation of limit cycles: every cycle point carries the
//! phase 2 pi t / T of its time offset t from the anchor, and the maps
//! between phase, time-along-cycle, and state.

use alloc::vec::Vec;

use crate::cycles::LimitCycle;
use crate::models::State;
use crate::{Error, Result};

use core::f64::consts::TAU;

/// A limit cycle with its samples rotated so the anchor sits at index 0 and
/// a phase value attached to every sample.
#[derive(Debug, Clone)]
pub struct PhasedCycle {
    pub cycle: LimitCycle,
    /// Phase of each sample: exactly 2 pi j / N on the uniform grid.
    pub phases: Vec<f64>,
}

/// Rotate the cycle to its anchor and attach the uniform phase grid.
pub fn build_phased_cycle(cycle: &LimitCycle) -> Result<PhasedCycle> {
    let n = cycle.samples.len();
    let a = cycle.anchor_index % n;
    let mut samples = Vec::with_capacity(n);
    samples.extend_from_slice(&cycle.samples[a..]);
    samples.extend_from_slice(&cycle.samples[..a]);

    // Two distinct local maxima of x tying at the anchor tolerance make the
    // anchor ill-defined.
    let xs: Vec<f64> = samples.iter().map(|s| s.x).collect();
    let best = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let guard = n / 64;
    let mut second = f64::NEG_INFINITY;
    for j in 0..n {
        let prev = xs[(j + n - 1) % n];
        let next = xs[(j + 1) % n];
        if xs[j] >= prev && xs[j] >= next && j > guard && j < n - guard && xs[j] > second {
            second = xs[j];
        }
    }
    if (best - second).abs() < 1e-8 {
        return Err(Error::AmbiguousAnchor);
    }

    let mut rotated = cycle.clone();
    rotated.samples = samples;
    rotated.anchor_index = 0;
    let phases = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    Ok(PhasedCycle { cycle: rotated, phases })
}

/// Catmull-Rom interpolation of the cycle at time-along-cycle `t` (wrapped).
pub fn cycle_point_at_time(cycle: &LimitCycle, t: f64) -> State {
    interpolate(cycle, t)
}

fn interpolate(cycle: &LimitCycle, t: f64) -> State {
    let n = cycle.samples.len();
    let dt = cycle.sample_dt();
    let pos = crate::math::rem_euclid(t / dt, n as f64);
    let j = pos as usize % n;
    let u = pos - crate::math::floor(pos);
    let p0 = cycle.samples[(j + n - 1) % n];
    let p1 = cycle.samples[j];
    let p2 = cycle.samples[(j + 1) % n];
    let p3 = cycle.samples[(j + 2) % n];
    let u2 = u * u;
    let u3 = u2 * u;
    (p1 * 2.0
        + (p2 - p0) * u
        + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * u2
        + ((p1 - p2) * 3.0 + p3 - p0) * u3)
        * 0.5
}

impl PhasedCycle {
    pub fn anchor(&self) -> State {
        self.cycle.samples[0]
    }

    /// State at phase `phi` by cubic interpolation on the uniform grid.
    pub fn point_at_phase(&self, phi: f64) -> State {
        let t = crate::math::rem_euclid(phi, TAU) / TAU * self.cycle.period;
        interpolate(&self.cycle, t)
    }

    /// Phase in [0, 2 pi) of a point on (or within 1e-3 of the diameter of)
    /// the cycle: 2 pi t / T at the nearest interpolated cycle point.
    pub fn phase_of_point(&self, s: State) -> Result<f64> {
        let dt = self.cycle.sample_dt();
        let mut best = f64::INFINITY;
        let mut best_j = 0usize;
        for (j, p) in self.cycle.samples.iter().enumerate() {
            let d = p.dist(s);
            if d < best {
                best = d;
                best_j = j;
            }
        }
        // Golden-section refinement over the two segments adjacent to the
        // nearest sample.
        let golden = 0.5 * (3.0 - crate::math::sqrt(5.0));
        let mut best_t = best_j as f64 * dt;
        let mut best_d = best;
        for seg in [best_j as i64 - 1, best_j as i64] {
            let t0 = seg as f64 * dt;
            let (mut lo, mut hi) = (t0, t0 + dt);
            for _ in 0..64 {
                let m1 = lo + golden * (hi - lo);
                let m2 = hi - golden * (hi - lo);
                let d1 = interpolate(&self.cycle, m1).dist(s);
                let d2 = interpolate(&self.cycle, m2).dist(s);
                if d1 < d2 {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let t = 0.5 * (lo + hi);
            let d = interpolate(&self.cycle, t).dist(s);
            if d < best_d {
                best_d = d;
                best_t = t;
            }
        }
        if best_d > 1e-3 * self.cycle.diameter() {
            return Err(Error::NotOnCycle);
        }
        Ok(crate::math::rem_euclid(TAU * best_t / self.cycle.period, TAU))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{find_stable_cycle, CycleSearchCfg, Stability};
    use crate::integrate::{integrate_autonomous, IntegratorConfig};
    use crate::models::{ModelParams, VdpParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circle_cycle(n: usize) -> LimitCycle {
        // Clockwise unit circle traversed as (cos t, -sin t).
        let samples = (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                State::new(crate::math::cos(t), -crate::math::sin(t))
            })
            .collect();
        LimitCycle {
            samples,
            period: TAU,
            angular_frequency: 1.0,
            stability: Stability::Stable,
            anchor_index: 0,
            params: ModelParams::Vdp(VdpParams { mu: 1.0, alpha: 0.0, beta: 0.0, d: 0.0 }),
        }
    }

    #[test]
    fn circle_anchor_and_quarter_phase() {
        let pc = build_phased_cycle(&circle_cycle(2048)).unwrap();
        assert!(pc.anchor().dist(State::new(1.0, 0.0)) < 1e-12);
        let phi = pc.phase_of_point(State::new(0.0, -1.0)).unwrap();
        assert!((phi - TAU / 4.0).abs() < 1e-9, "phi = {phi}");
        assert_eq!(pc.phases[0], 0.0);
    }

    #[test]
    fn sample_phases_are_uniform() {
        let pc = build_phased_cycle(&circle_cycle(512)).unwrap();
        for k in [1usize, 17, 333, 511] {
            let phi = pc.phase_of_point(pc.cycle.samples[k]).unwrap();
            assert!((phi - TAU * k as f64 / 512.0).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn round_trip_identity() {
        let pc = build_phased_cycle(&circle_cycle(2048)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let phi = rng.gen_range(0.0..TAU);
            let back = pc.phase_of_point(pc.point_at_phase(phi)).unwrap();
            let mut err = (back - phi).abs();
            if err > core::f64::consts::PI {
                err = TAU - err;
            }
            assert!(err < 1e-6, "phi {phi} -> {back}");
        }
    }

    #[test]
    fn off_cycle_point_is_rejected() {
        let pc = build_phased_cycle(&circle_cycle(256)).unwrap();
        assert!(matches!(pc.phase_of_point(State::new(0.0, 0.0)), Err(Error::NotOnCycle)));
    }

    #[test]
    fn vdp_anchor_has_vanishing_y_and_phase_advances_with_flow() {
        let params = ModelParams::Vdp(VdpParams { mu: 1.52, alpha: 0.093, beta: 0.0019, d: -0.03 });
        let icfg = IntegratorConfig::default();
        let cycle =
            find_stable_cycle(&params, State::new(9.0, 0.0), &icfg, &CycleSearchCfg::default())
                .unwrap();
        let pc = build_phased_cycle(&cycle).unwrap();
        assert!(pc.anchor().y.abs() < 1e-4);
        // Flowing from a phase point for time tau advances the phase by
        // exactly 2 pi tau / T.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..12 {
            let phi = rng.gen_range(0.0..TAU);
            let tau = rng.gen_range(0.1..cycle.period * 0.9);
            let start = pc.point_at_phase(phi);
            let traj = integrate_autonomous(&params, start, (0.0, tau), &icfg).unwrap();
            let phi_end = pc.phase_of_point(traj.end_state()).unwrap();
            let expect = (phi + TAU * tau / cycle.period).rem_euclid(TAU);
            let mut err = (phi_end - expect).abs();
            if err > core::f64::consts::PI {
                err = TAU - err;
            }
            assert!(err < 1e-4 * TAU, "phi {phi} tau {tau}: {phi_end} vs {expect}");
        }
    }

    #[test]
    fn forward_orbit_from_phase_point_stays_on_cycle() {
        let params = ModelParams::Vdp(VdpParams { mu: 1.52, alpha: 0.093, beta: 0.0019, d: -0.03 });
        let icfg = IntegratorConfig::default();
        let cycle =
            find_stable_cycle(&params, State::new(9.0, 0.0), &icfg, &CycleSearchCfg::default())
                .unwrap();
        let pc = build_phased_cycle(&cycle).unwrap();
        let start = pc.point_at_phase(2.1);
        let traj =
            integrate_autonomous(&params, start, (0.0, 3.0 * cycle.period), &icfg).unwrap();
        for k in 0..60 {
            let s = traj.state_at(0.05 * k as f64 * cycle.period);
            assert!(cycle.dist_to(s) < 1e-3 * cycle.diameter());
        }
    }
}
