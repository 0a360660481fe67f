//! Basin geometry of the frozen systems.
//!
//! In the birhythmic regime the repelling cycle is the full basin boundary
//! between the two stable cycles, so membership reduces to a point-in-polygon
//! test against its sampled polygon, with a thin indeterminate band around
//! the polygon itself.

use alloc::vec::Vec;

use crate::cycles::{
    default_equilibrium, find_stable_cycle, find_unstable_cycle, point_segment_dist,
    section_coordinate, seed_from_section_coordinate, CycleSearchCfg, LimitCycle, Stability,
};
use crate::exec::Executor;
use crate::integrate::IntegratorConfig;
use crate::models::{Model, ModelParams, ParamKey, State};
use crate::phase::PhasedCycle;
use crate::{Error, Result};

use core::f64::consts::TAU;

/// Relative width of the indeterminate band around the separatrix.
pub const BOUNDARY_BAND_FRAC: f64 = 1e-3;

/// Which side of the separatrix a query point falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// Basin of the attractor enclosed by the separatrix.
    Inner,
    /// Basin of the outer stable cycle.
    Outer,
    /// Within the boundary band; reported indeterminate rather than guessed.
    BoundaryBand,
}

/// Side of the separatrix on which a base cycle lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseSide {
    Inner,
    Outer,
}

/// The repelling cycle as a closed polygon with its membership band.
#[derive(Debug, Clone)]
pub struct BasinBoundary {
    pub theta: LimitCycle,
    band: f64,
}

impl BasinBoundary {
    pub fn new(theta: LimitCycle) -> BasinBoundary {
        debug_assert_eq!(theta.stability, Stability::Unstable);
        let band = BOUNDARY_BAND_FRAC * theta.diameter();
        BasinBoundary { theta, band }
    }

    /// Strict inside test by the crossing-count winding rule.
    pub fn contains(&self, p: State) -> bool {
        let v = &self.theta.samples;
        let n = v.len();
        let mut winding = 0i32;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            if a.y <= p.y {
                if b.y > p.y && is_left(a, b, p) > 0.0 {
                    winding += 1;
                }
            } else if b.y <= p.y && is_left(a, b, p) < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    /// Distance from `p` to the polygon.
    pub fn distance(&self, p: State) -> f64 {
        let v = &self.theta.samples;
        let n = v.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            best = best.min(point_segment_dist(p, v[i], v[(i + 1) % n]));
        }
        best
    }

    /// Membership with the boundary band applied.
    pub fn membership(&self, p: State) -> Membership {
        if self.distance(p) < self.band {
            return Membership::BoundaryBand;
        }
        if self.contains(p) {
            Membership::Inner
        } else {
            Membership::Outer
        }
    }
}

fn is_left(a: State, b: State, p: State) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)
}

/// Locate the separatrix at `params`: find the inner and outer attractors,
/// seed the reversed-time search between them, and wrap the resulting
/// repelling cycle as a basin boundary. Errors with [`Error::NoSeparatrix`]
/// when no repelling cycle divides the plane at these parameters.
pub fn find_separatrix(
    params: &ModelParams,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<BasinBoundary> {
    let scale = params.scale();
    let eq = default_equilibrium(params)?;
    // Outer attractor from a seed far outside the cycles.
    let outer_seed = match params.model() {
        Model::Vdp => State::new(2.0 * scale, 0.0),
        Model::Gly => State::new(eq.location.x + 1.2 * scale, eq.location.y),
    };
    let outer = find_stable_cycle(params, outer_seed, icfg, ccfg).map_err(|e| match e {
        Error::NotPeriodic => Error::NoSeparatrix,
        other => other,
    })?;
    let outer_c = section_coordinate(params, &outer);

    // Inner attractor: either the small cycle around the equilibrium or, in
    // the hard-excitation regime, the stable equilibrium itself.
    let inner_seed = match params.model() {
        Model::Vdp => State::new(0.05 * scale, 0.0),
        Model::Gly => State::new(eq.location.x + 0.05 * scale, eq.location.y),
    };
    let inner_c = match find_stable_cycle(params, inner_seed, icfg, ccfg) {
        Ok(inner) => {
            let c = section_coordinate(params, &inner);
            // The inner search can converge to the outer cycle when no inner
            // attractor exists; then there is nothing to separate.
            if (c - outer_c).abs() < 1e-3 * outer.diameter() {
                return Err(Error::NoSeparatrix);
            }
            c
        }
        Err(Error::NotPeriodic) => match params.model() {
            // The orbit spiralled into the stable equilibrium.
            Model::Vdp => 0.0,
            Model::Gly => eq.location.y,
        },
        Err(e) => return Err(e),
    };

    let seed = seed_from_section_coordinate(params, 0.5 * (inner_c + outer_c));
    let theta = find_unstable_cycle(params, seed, icfg, ccfg).map_err(|e| match e {
        Error::NotPeriodic | Error::WrongBasin => Error::NoSeparatrix,
        other => other,
    })?;
    Ok(BasinBoundary::new(theta))
}

/// Membership of a single state at `params`, locating the separatrix first.
pub fn membership(
    params: &ModelParams,
    s: State,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<Membership> {
    Ok(find_separatrix(params, icfg, ccfg)?.membership(s))
}

/// Classification of an arc set per the partial basin-instability taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcClass {
    None,
    Partial,
    Total,
}

/// The basin-unstable portion of a base cycle against a shifted separatrix:
/// maximal time intervals of the base cycle lying outside its own future
/// basin, with the matching phase intervals.
#[derive(Debug, Clone)]
pub struct UnstableArcSet {
    /// Time intervals [t1, t2] within [0, T) of the base cycle; an interval
    /// with t2 < t1 wraps through the anchor.
    pub arcs: Vec<(f64, f64)>,
    /// Matching phase intervals (2 pi t / T).
    pub phases: Vec<(f64, f64)>,
    pub classification: ArcClass,
    /// Some base samples fell inside the boundary band.
    pub band_touched: bool,
}

impl UnstableArcSet {
    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty() && self.classification == ArcClass::None
    }

    /// Total time measure of the arcs.
    pub fn total_length(&self, period: f64) -> f64 {
        self.arcs
            .iter()
            .map(|&(a, b)| if b >= a { b - a } else { period - a + b })
            .sum()
    }

    /// True when `phi` lies in one of the unstable phase intervals.
    pub fn phase_is_unstable(&self, phi: f64) -> bool {
        let phi = crate::math::rem_euclid(phi, TAU);
        self.phases.iter().any(|&(a, b)| {
            if b >= a {
                phi >= a && phi <= b
            } else {
                phi >= a || phi <= b
            }
        })
    }
}

fn membership_is_unstable(m: Membership, side: BaseSide) -> bool {
    matches!(
        (m, side),
        (Membership::Inner, BaseSide::Outer) | (Membership::Outer, BaseSide::Inner)
    )
}

/// Evaluate which points of `base` lie outside the basin delimited by
/// `boundary`, where `side` names the side of the separatrix the base cycle
/// calls home. Arc endpoints are refined to 1e-6 in time on the interpolated
/// cycle.
pub fn unstable_arcs(
    base: &PhasedCycle,
    side: BaseSide,
    boundary: &BasinBoundary,
) -> UnstableArcSet {
    let n = base.cycle.samples.len();
    let period = base.cycle.period;
    let dt = base.cycle.sample_dt();
    let mut unstable = Vec::with_capacity(n);
    let mut band_touched = false;
    for s in &base.cycle.samples {
        let m = boundary.membership(*s);
        if m == Membership::BoundaryBand {
            band_touched = true;
        }
        unstable.push(membership_is_unstable(m, side));
    }
    let count = unstable.iter().filter(|&&u| u).count();
    if count == 0 {
        return UnstableArcSet {
            arcs: Vec::new(),
            phases: Vec::new(),
            classification: ArcClass::None,
            band_touched,
        };
    }
    if count == n {
        return UnstableArcSet {
            arcs: alloc::vec![(0.0, period)],
            phases: alloc::vec![(0.0, TAU)],
            classification: ArcClass::Total,
            band_touched,
        };
    }

    // Strict inside/outside flip between adjacent samples j and j+1,
    // refined by bisecting the interpolated cycle.
    let strict_unstable = |t: f64| -> bool {
        let s = crate::phase::cycle_point_at_time(&base.cycle, t);
        let m = if boundary.contains(s) { Membership::Inner } else { Membership::Outer };
        membership_is_unstable(m, side)
    };
    let refine = |j: usize| -> f64 {
        let (mut lo, mut hi) = (j as f64 * dt, (j + 1) as f64 * dt);
        let flag_lo = unstable[j];
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if strict_unstable(mid) == flag_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        crate::math::rem_euclid(0.5 * (lo + hi), period)
    };

    let mut arcs = Vec::new();
    for j in 0..n {
        let prev = unstable[(j + n - 1) % n];
        if unstable[j] && !prev {
            // Arc starts between j-1 and j; find where it ends.
            let start = refine((j + n - 1) % n);
            let mut k = j;
            while unstable[(k + 1) % n] {
                k = (k + 1) % n;
            }
            let end = refine(k);
            arcs.push((start, end));
        }
    }
    arcs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let phases = arcs.iter().map(|&(a, b)| (TAU * a / period, TAU * b / period)).collect();
    UnstableArcSet { arcs, phases, classification: ArcClass::Partial, band_touched }
}

/// Bisect the path coordinate for the onset of basin instability of `base`.
/// `p_near` must give an empty arc set and `p_far` a nonempty one.
#[allow(clippy::too_many_arguments)]
pub fn marginal_parameter(
    base: &PhasedCycle,
    side: BaseSide,
    base_params: &ModelParams,
    path: &crate::forcing::ParameterPath,
    p_near: f64,
    p_far: f64,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<f64> {
    let arcs_at = |p: f64| -> Result<bool> {
        let params = path.params_at(base_params, p).ok_or(Error::NoSeparatrix)?;
        let boundary = find_separatrix(&params, icfg, ccfg)?;
        Ok(!unstable_arcs(base, side, &boundary).is_empty())
    };
    let near_unstable = arcs_at(p_near)?;
    let far_unstable = arcs_at(p_far)?;
    if !far_unstable {
        return Err(Error::NoOnset);
    }
    if near_unstable {
        return Err(Error::Ambiguous);
    }
    let (mut lo, mut hi) = (p_near, p_far);
    while (hi - lo).abs() > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if arcs_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Per-cell flag of a basin-instability region grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiFlag {
    None,
    Partial,
    Total,
    MarginalBand,
}

/// Basin-instability map of a fixed base cycle over a two-parameter grid.
#[derive(Debug, Clone)]
pub struct BiRegion {
    pub keys: (ParamKey, ParamKey),
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// Row-major over (axis1, axis2).
    pub flags: Vec<BiFlag>,
}

/// Evaluate the basin-instability flag of every grid cell against a fixed
/// base cycle. Cells where no separatrix exists are flagged `None`.
#[allow(clippy::too_many_arguments)]
pub fn bi_region<E: Executor>(
    base: &PhasedCycle,
    side: BaseSide,
    base_params: &ModelParams,
    keys: (ParamKey, ParamKey),
    axis1: &[f64],
    axis2: &[f64],
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
    exec: &E,
) -> BiRegion {
    let n1 = axis1.len();
    let n2 = axis2.len();
    let cell = |idx: usize| -> BiFlag {
        let i = idx / n2;
        let j = idx % n2;
        let Some(params) = keys
            .0
            .set(base_params, axis1[i])
            .and_then(|p| keys.1.set(&p, axis2[j]))
        else {
            return BiFlag::None;
        };
        match find_separatrix(&params, icfg, ccfg) {
            Ok(boundary) => {
                let arcs = unstable_arcs(base, side, &boundary);
                match arcs.classification {
                    ArcClass::Total => BiFlag::Total,
                    ArcClass::Partial => BiFlag::Partial,
                    ArcClass::None if arcs.band_touched => BiFlag::MarginalBand,
                    ArcClass::None => BiFlag::None,
                }
            }
            Err(_) => BiFlag::None,
        }
    };
    let flags = exec.run_cells(n1 * n2, &cell);
    BiRegion { keys, axis1: axis1.into(), axis2: axis2.into(), flags }
}

/// Hausdorff semi-distance from a point to the sampled cycle.
pub fn dist_to_set(s: State, cycle: &LimitCycle) -> f64 {
    cycle.dist_to(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::CycleSearchCfg;
    use crate::models::VdpParams;
    use crate::phase::build_phased_cycle;

    fn vdp(mu: f64, d: f64) -> ModelParams {
        ModelParams::Vdp(VdpParams { mu, alpha: 0.0936, beta: 0.001945, d })
    }

    fn circle_boundary(n: usize, radius: f64) -> BasinBoundary {
        let samples = (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                State::new(radius * crate::math::cos(t), -radius * crate::math::sin(t))
            })
            .collect();
        BasinBoundary::new(LimitCycle {
            samples,
            period: TAU,
            angular_frequency: 1.0,
            stability: Stability::Unstable,
            anchor_index: 0,
            params: vdp(1.0, 0.0),
        })
    }

    #[test]
    fn circle_membership_and_band() {
        let b = circle_boundary(2048, 1.0);
        assert_eq!(b.membership(State::new(0.0, 0.0)), Membership::Inner);
        assert_eq!(b.membership(State::new(2.0, 0.3)), Membership::Outer);
        // Band width is 1e-3 of the diameter (2.0).
        assert_eq!(b.membership(State::new(1.0005, 0.0)), Membership::BoundaryBand);
        assert!((b.distance(State::new(0.0, 0.0)) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn separatrix_membership_matches_forward_integration() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let params = vdp(0.3, -0.03);
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let boundary = find_separatrix(&params, &icfg, &ccfg).unwrap();
        let inner = find_stable_cycle(&params, State::new(0.2, 0.0), &icfg, &ccfg).unwrap();
        let outer = find_stable_cycle(&params, State::new(8.0, 0.0), &icfg, &ccfg).unwrap();
        assert!(inner.amplitude() < boundary.theta.amplitude());
        assert!(boundary.theta.amplitude() < outer.amplitude());

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (lo, hi) = outer.bbox();
        let mut checked = 0;
        let mut agree = 0;
        for _ in 0..400 {
            let s = State::new(
                rng.gen_range(1.1 * lo.x..1.1 * hi.x),
                rng.gen_range(1.1 * lo.y..1.1 * hi.y),
            );
            let m = boundary.membership(s);
            if m == Membership::BoundaryBand {
                continue;
            }
            // Forward-integration oracle: run until the orbit is close to
            // one of the stable cycles.
            let mut state = s;
            let mut label = None;
            for _ in 0..400 {
                let traj = crate::integrate::integrate_autonomous(
                    &params,
                    state,
                    (0.0, outer.period),
                    &icfg,
                )
                .unwrap();
                state = traj.end_state();
                if inner.dist_to(state) < 1e-3 * inner.diameter() {
                    label = Some(Membership::Inner);
                    break;
                }
                if outer.dist_to(state) < 1e-3 * outer.diameter() {
                    label = Some(Membership::Outer);
                    break;
                }
            }
            if let Some(oracle) = label {
                checked += 1;
                if oracle == m {
                    agree += 1;
                }
            }
        }
        assert!(checked > 300, "oracle resolved only {checked} samples");
        let rate = agree as f64 / checked as f64;
        assert!(rate >= 0.99, "agreement {rate} ({agree}/{checked})");
    }

    #[test]
    fn base_cycle_in_its_own_basin_has_no_arcs() {
        let params = vdp(1.52, -0.03);
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let base = build_phased_cycle(
            &find_stable_cycle(&params, State::new(9.0, 0.0), &icfg, &ccfg).unwrap(),
        )
        .unwrap();
        let boundary = find_separatrix(&params, &icfg, &ccfg).unwrap();
        let arcs = unstable_arcs(&base, BaseSide::Outer, &boundary);
        assert!(arcs.is_empty(), "{:?}", arcs.arcs);
        assert_eq!(arcs.classification, ArcClass::None);
    }

    #[test]
    fn shifted_separatrix_yields_symmetric_arc_pair() {
        let params_base = vdp(1.52, -0.03);
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let base = build_phased_cycle(
            &find_stable_cycle(&params_base, State::new(9.0, 0.0), &icfg, &ccfg).unwrap(),
        )
        .unwrap();
        // No instability for a shallow shift.
        let shallow = find_separatrix(&vdp(1.4, -0.03), &icfg, &ccfg).unwrap();
        assert!(unstable_arcs(&base, BaseSide::Outer, &shallow).is_empty());
        // A deep shift exposes two arcs, mirrored by the half-period
        // symmetry of the model.
        let deep = find_separatrix(&vdp(0.3, -0.03), &icfg, &ccfg).unwrap();
        let arcs = unstable_arcs(&base, BaseSide::Outer, &deep);
        assert_eq!(arcs.classification, ArcClass::Partial);
        assert_eq!(arcs.arcs.len(), 2, "{:?}", arcs.arcs);
        let t = base.cycle.period;
        let (a1, b1) = arcs.arcs[0];
        let (a2, b2) = arcs.arcs[1];
        assert!(((a2 - a1) - 0.5 * t).abs() < 1e-3 * t, "starts {a1} {a2}");
        assert!(((b2 - b1) - 0.5 * t).abs() < 1e-3 * t, "ends {b1} {b2}");
        // Arc length measured consistently in time and phase.
        let len = arcs.total_length(t);
        assert!(len > 0.0 && len < t);
    }

    #[test]
    fn marginal_onset_found_by_bisection() {
        let params_base = vdp(1.52, -0.03);
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let base = build_phased_cycle(
            &find_stable_cycle(&params_base, State::new(9.0, 0.0), &icfg, &ccfg).unwrap(),
        )
        .unwrap();
        let path = crate::forcing::ParameterPath::new(ParamKey::Mu);
        let onset = marginal_parameter(
            &base,
            BaseSide::Outer,
            &params_base,
            &path,
            1.45,
            0.35,
            &icfg,
            &ccfg,
        )
        .unwrap();
        assert!(onset > 0.5 && onset < 1.4, "onset {onset}");
        // Just beyond the onset the arcs are nonempty, just before empty.
        let b_after =
            find_separatrix(&path.params_at(&params_base, onset - 0.01).unwrap(), &icfg, &ccfg)
                .unwrap();
        assert!(!unstable_arcs(&base, BaseSide::Outer, &b_after).is_empty());
        let b_before =
            find_separatrix(&path.params_at(&params_base, onset + 0.01).unwrap(), &icfg, &ccfg)
                .unwrap();
        assert!(unstable_arcs(&base, BaseSide::Outer, &b_before).is_empty());
    }

    #[test]
    fn no_onset_on_a_stable_stretch() {
        let params_base = vdp(1.52, -0.03);
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let base = build_phased_cycle(
            &find_stable_cycle(&params_base, State::new(9.0, 0.0), &icfg, &ccfg).unwrap(),
        )
        .unwrap();
        let path = crate::forcing::ParameterPath::new(ParamKey::Mu);
        let res = marginal_parameter(
            &base,
            BaseSide::Outer,
            &params_base,
            &path,
            1.5,
            1.35,
            &icfg,
            &ccfg,
        );
        assert!(matches!(res, Err(Error::NoOnset)), "{res:?}");
    }
}
