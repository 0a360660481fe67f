//! Attractor census, region classification, and the one- and two-parameter
//! scans that reconstruct the bifurcation structure by grid sampling plus
//! bisection refinement.

use alloc::vec::Vec;

use crate::cycles::{
    default_equilibrium, find_stable_cycle_with_exit, find_unstable_cycle, section_coordinate,
    seed_from_section_coordinate, CycleSearchCfg, Equilibrium, EquilibriumExit, LimitCycle,
    Stability,
};
use crate::exec::Executor;
use crate::integrate::IntegratorConfig;
use crate::math;
use crate::models::{Model, ModelParams, ParamKey, State};
use crate::{Error, Result};

/// Qualitative regime of the frozen system at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionLabel {
    /// Two stable limit cycles separated by a repelling one.
    BirhythmicI,
    /// One stable cycle plus a second point attractor or the small cycle
    /// alone (model-specific monorhythmic/hard-excitation regime).
    Ii,
    /// Stable equilibrium only.
    Iii,
    /// A single stable limit cycle.
    Iv,
    /// Census inconsistent or outside the charted regimes.
    Outside,
}

impl RegionLabel {
    pub fn name(&self) -> &'static str {
        match self {
            RegionLabel::BirhythmicI => "I",
            RegionLabel::Ii => "II",
            RegionLabel::Iii => "III",
            RegionLabel::Iv => "IV",
            RegionLabel::Outside => "outside",
        }
    }
}

/// Distinct attractors reached from the seed fan.
#[derive(Debug, Clone)]
pub struct AttractorCensus {
    pub equilibrium: Equilibrium,
    /// Stable cycles sorted by amplitude, ascending.
    pub cycles: Vec<LimitCycle>,
}

/// Seed fan on three circles around the equilibrium, clamped into the
/// physical domain for the glycolysis model. The innermost ring resolves the
/// small Hopf-branch cycles whose basins end far inside the other rings.
fn seed_fan(params: &ModelParams, eq: &Equilibrium) -> Vec<State> {
    let scale = params.scale();
    let mut seeds = Vec::with_capacity(18);
    for &radius in &[0.05 * scale, 0.3 * scale, 1.2 * scale] {
        for k in 0..6 {
            let angle = core::f64::consts::TAU * k as f64 / 6.0;
            let mut s = State::new(
                eq.location.x + radius * math::cos(angle),
                eq.location.y + radius * math::sin(angle),
            );
            if params.model() == Model::Gly {
                s.x = s.x.max(1e-3 * scale);
                s.y = s.y.max(1e-3 * scale);
            }
            seeds.push(s);
        }
    }
    seeds
}

/// Run the seed fan and collect the distinct stable attractors.
pub fn attractor_census(
    params: &ModelParams,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<AttractorCensus> {
    let eq = default_equilibrium(params)?;
    let exit = EquilibriumExit {
        location: eq.location,
        capture_radius: 2e-3 * params.scale(),
    };
    let mut cycles: Vec<LimitCycle> = Vec::new();
    for seed in seed_fan(params, &eq) {
        match find_stable_cycle_with_exit(params, seed, icfg, ccfg, Some(exit)) {
            Ok(cycle) => {
                let duplicate = cycles.iter().any(|c| {
                    (c.amplitude() - cycle.amplitude()).abs() < 5e-3 * c.diameter().max(1e-12)
                        && (c.period - cycle.period).abs() < 1e-2 * c.period
                });
                if !duplicate {
                    cycles.push(cycle);
                }
            }
            // Seeds that spiral into the equilibrium or fail to settle add
            // nothing to the census.
            Err(Error::NotPeriodic) | Err(Error::DomainEscape { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    cycles.sort_unstable_by(|a, b| a.amplitude().total_cmp(&b.amplitude()));
    Ok(AttractorCensus { equilibrium: eq, cycles })
}

/// Amplitude separating the small- and large-cycle branches of the van der
/// Pol amplitude polynomial (its inflection point in A^2).
fn vdp_branch_threshold(params: &ModelParams) -> f64 {
    match params {
        ModelParams::Vdp(p) if p.beta > 0.0 => math::sqrt(8.0 * p.alpha / (15.0 * p.beta)),
        _ => f64::INFINITY,
    }
}

/// Classify the parameter point from the attractor census.
pub fn classify_region(
    params: &ModelParams,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<RegionLabel> {
    let census = attractor_census(params, icfg, ccfg)?;
    let eq_stable = census.equilibrium.stability == Stability::Stable;
    Ok(match (params.model(), census.cycles.len(), eq_stable) {
        (_, 2, _) => RegionLabel::BirhythmicI,
        (_, n, _) if n > 2 => return Err(Error::Ambiguous),
        (Model::Vdp, 1, false) => {
            if census.cycles[0].amplitude() < vdp_branch_threshold(params) {
                RegionLabel::Ii
            } else {
                RegionLabel::Iv
            }
        }
        (Model::Gly, 1, true) => RegionLabel::Ii,
        (Model::Gly, 1, false) => RegionLabel::Iv,
        (_, 0, true) => RegionLabel::Iii,
        _ => RegionLabel::Outside,
    })
}

/// Inner/outer stable-attractor probe: the pair of cycles reached from a
/// seed just outside the equilibrium and from a seed far outside, when they
/// are distinct.
pub(crate) struct TwoSeedProbe {
    pub eq: Equilibrium,
    pub inner: Option<LimitCycle>,
    pub outer: Option<LimitCycle>,
}

impl TwoSeedProbe {
    /// Distinct coexisting stable cycles.
    pub fn birhythmic(&self) -> bool {
        match (&self.inner, &self.outer) {
            (Some(a), Some(b)) => {
                (a.amplitude() - b.amplitude()).abs() > 5e-3 * b.diameter().max(1e-12)
            }
            _ => false,
        }
    }
}

pub(crate) fn two_seed_probe(
    params: &ModelParams,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<TwoSeedProbe> {
    let eq = default_equilibrium(params)?;
    let scale = params.scale();
    let exit = EquilibriumExit { location: eq.location, capture_radius: 2e-3 * scale };
    let inner_seed = match params.model() {
        Model::Vdp => State::new(0.05 * scale, 0.0),
        Model::Gly => State::new(eq.location.x + 0.05 * scale, eq.location.y),
    };
    let outer_seed = match params.model() {
        Model::Vdp => State::new(2.0 * scale, 0.0),
        Model::Gly => State::new(eq.location.x + 1.2 * scale, eq.location.y),
    };
    let inner = match find_stable_cycle_with_exit(params, inner_seed, icfg, ccfg, Some(exit)) {
        Ok(c) => Some(c),
        Err(Error::NotPeriodic) | Err(Error::DomainEscape { .. }) => None,
        Err(e) => return Err(e),
    };
    let outer = match find_stable_cycle_with_exit(params, outer_seed, icfg, ccfg, Some(exit)) {
        Ok(c) => Some(c),
        Err(Error::NotPeriodic) | Err(Error::DomainEscape { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(TwoSeedProbe { eq, inner, outer })
}

/// Branch data of one point of a one-parameter scan.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub value: f64,
    pub eq_x: f64,
    pub eq_stable: bool,
    /// (max x, min x, period) of the large stable cycle, when present.
    pub gamma1: Option<(f64, f64, f64)>,
    /// Same for the small stable cycle.
    pub gamma2: Option<(f64, f64, f64)>,
    /// Same for the repelling cycle.
    pub theta: Option<(f64, f64, f64)>,
}

/// One-parameter bifurcation scan: branch extrema per grid point plus the
/// fold points bounding the birhythmic window, refined to 1e-4.
#[derive(Debug, Clone)]
pub struct OneParamScan {
    pub key: ParamKey,
    pub points: Vec<BranchPoint>,
    /// Fold of the small cycle and the separatrix (lower window edge).
    pub fold_l1: Option<f64>,
    /// Fold of the large cycle and the separatrix (upper window edge).
    pub fold_l2: Option<f64>,
}

fn branch_of(c: &LimitCycle) -> (f64, f64, f64) {
    (c.max_x(), c.min_x(), c.period)
}

fn scan_point(
    params: &ModelParams,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
    value: f64,
) -> Result<BranchPoint> {
    let probe = two_seed_probe(params, icfg, ccfg)?;
    let mut point = BranchPoint {
        value,
        eq_x: probe.eq.location.x,
        eq_stable: probe.eq.stability == Stability::Stable,
        gamma1: None,
        gamma2: None,
        theta: None,
    };
    if probe.birhythmic() {
        let inner = probe.inner.as_ref().expect("birhythmic probe has both cycles");
        let outer = probe.outer.as_ref().expect("birhythmic probe has both cycles");
        point.gamma2 = Some(branch_of(inner));
        point.gamma1 = Some(branch_of(outer));
        let seed = seed_from_section_coordinate(
            params,
            0.5 * (section_coordinate(params, inner) + section_coordinate(params, outer)),
        );
        if let Ok(theta) = find_unstable_cycle(params, seed, icfg, ccfg) {
            point.theta = Some(branch_of(&theta));
        }
    } else if let Some(c) = probe.outer.as_ref().or(probe.inner.as_ref()) {
        // A single cycle: attribute it to the large branch when the
        // equilibrium is unstable and the cycle is on the outer side.
        point.gamma1 = Some(branch_of(c));
        // In the hard-excitation regime the repelling cycle separates the
        // stable equilibrium from the cycle.
        if point.eq_stable {
            let eq_c = match params.model() {
                Model::Vdp => 0.0,
                Model::Gly => probe.eq.location.y,
            };
            let seed = seed_from_section_coordinate(
                params,
                0.5 * (eq_c + section_coordinate(params, c)),
            );
            if let Ok(theta) = find_unstable_cycle(params, seed, icfg, ccfg) {
                point.theta = Some(branch_of(&theta));
            }
        }
    }
    Ok(point)
}

/// Scan branch extrema over `values` of `key`, in parallel over grid points.
pub fn scan_one_param<E: Executor>(
    params: &ModelParams,
    key: ParamKey,
    values: &[f64],
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
    exec: &E,
) -> Vec<Result<BranchPoint>> {
    let cell = |i: usize| -> Result<BranchPoint> {
        let p = key.set(params, values[i]).ok_or(Error::NoConvergence)?;
        scan_point(&p, icfg, ccfg, values[i])
    };
    exec.run_cells(values.len(), &cell)
}

/// Refine the edge of the birhythmic window between two parameter values by
/// bisection on the coexistence of two distinct stable cycles, to 1e-4.
pub fn refine_birhythmic_edge(
    params: &ModelParams,
    key: ParamKey,
    p_birhythmic: f64,
    p_monorhythmic: f64,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<f64> {
    let is_bi = |v: f64| -> Result<bool> {
        let p = key.set(params, v).ok_or(Error::NoConvergence)?;
        Ok(two_seed_probe(&p, icfg, ccfg)?.birhythmic())
    };
    if !is_bi(p_birhythmic)? || is_bi(p_monorhythmic)? {
        return Err(Error::Ambiguous);
    }
    let (mut bi, mut mono) = (p_birhythmic, p_monorhythmic);
    while (bi - mono).abs() > 1e-4 {
        let mid = 0.5 * (bi + mono);
        if is_bi(mid)? {
            bi = mid;
        } else {
            mono = mid;
        }
    }
    Ok(0.5 * (bi + mono))
}

/// Same refinement along a parameter path (with a slaved coordinate).
pub fn refine_birhythmic_edge_on_path(
    base: &ModelParams,
    path: &crate::forcing::ParameterPath,
    p_birhythmic: f64,
    p_monorhythmic: f64,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<f64> {
    let is_bi = |v: f64| -> Result<bool> {
        let p = path.params_at(base, v).ok_or(Error::NoConvergence)?;
        Ok(two_seed_probe(&p, icfg, ccfg)?.birhythmic())
    };
    if !is_bi(p_birhythmic)? || is_bi(p_monorhythmic)? {
        return Err(Error::Ambiguous);
    }
    let (mut bi, mut mono) = (p_birhythmic, p_monorhythmic);
    while (bi - mono).abs() > 1e-4 {
        let mid = 0.5 * (bi + mono);
        if is_bi(mid)? {
            bi = mid;
        } else {
            mono = mid;
        }
    }
    Ok(0.5 * (bi + mono))
}

/// Scan the birhythmic window edges over a grid and refine each to 1e-4.
pub fn window_folds(
    params: &ModelParams,
    key: ParamKey,
    values: &[f64],
    points: &[Result<BranchPoint>],
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> (Option<f64>, Option<f64>) {
    let bi: Vec<bool> = points
        .iter()
        .map(|p| p.as_ref().map(|b| b.gamma1.is_some() && b.gamma2.is_some()).unwrap_or(false))
        .collect();
    let mut lower = None;
    let mut upper = None;
    for w in 0..values.len().saturating_sub(1) {
        if bi[w] != bi[w + 1] {
            let (pb, pm) = if bi[w] { (values[w], values[w + 1]) } else { (values[w + 1], values[w]) };
            let fold = refine_birhythmic_edge(params, key, pb, pm, icfg, ccfg).ok();
            if bi[w + 1] {
                // Window opens upward: this is the lower edge.
                lower = fold;
            } else {
                upper = fold;
            }
        }
    }
    (lower, upper)
}

/// Two-parameter scan result: region labels, refined bifurcation points, and
/// the estimated junction of the fold and Hopf curves.
#[derive(Debug, Clone)]
pub struct TwoParamScan {
    pub keys: (ParamKey, ParamKey),
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// Row-major over (axis1, axis2); `Outside` for failed cells.
    pub labels: Vec<RegionLabel>,
    pub h_points: Vec<(f64, f64)>,
    pub fl1_points: Vec<(f64, f64)>,
    pub fl2_points: Vec<(f64, f64)>,
    /// Junction estimate (closest approach of the refined fold and Hopf
    /// polylines) and the approach distance.
    pub gh: Option<((f64, f64), f64)>,
}

/// Largest real part of the default equilibrium's eigenvalues.
fn hopf_indicator(params: &ModelParams) -> Result<f64> {
    let eq = default_equilibrium(params)?;
    Ok(eq.eigenvalues[0].re.max(eq.eigenvalues[1].re))
}

/// Number of distinct stable limit cycles from the two-seed probe.
fn stable_cycle_count(
    params: &ModelParams,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<usize> {
    let probe = two_seed_probe(params, icfg, ccfg)?;
    Ok(if probe.birhythmic() {
        2
    } else {
        usize::from(probe.inner.is_some() || probe.outer.is_some())
    })
}

/// Classify every cell of the grid and refine the bifurcation curves:
/// the Hopf curve by bisection on the equilibrium eigenvalue sign along grid
/// edges, the fold-of-cycles curves by bisection on the stable-cycle count
/// along edges with no eigenvalue change, both to 1e-4. The fold polyline
/// closest to the Hopf polyline is reported as the first fold family, and
/// the junction estimate is the closest approach of the two refined sets.
pub fn scan_two_param<E: Executor>(
    params: &ModelParams,
    keys: (ParamKey, ParamKey),
    axis1: &[f64],
    axis2: &[f64],
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
    exec: &E,
) -> TwoParamScan {
    let n1 = axis1.len();
    let n2 = axis2.len();
    let params_at = |i: usize, j: usize| -> Option<ModelParams> {
        keys.0.set(params, axis1[i]).and_then(|p| keys.1.set(&p, axis2[j]))
    };

    let labels: Vec<RegionLabel> = exec.run_cells(n1 * n2, &|idx| {
        let (i, j) = (idx / n2, idx % n2);
        params_at(i, j)
            .and_then(|p| classify_region(&p, icfg, ccfg).ok())
            .unwrap_or(RegionLabel::Outside)
    });
    let hopf: Vec<f64> = exec.run_cells(n1 * n2, &|idx| {
        let (i, j) = (idx / n2, idx % n2);
        params_at(i, j).and_then(|p| hopf_indicator(&p).ok()).unwrap_or(f64::NAN)
    });

    // Edges: (cell, neighbour) pairs along both axes.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            if j + 1 < n2 {
                edges.push((i * n2 + j, i * n2 + j + 1));
            }
            if i + 1 < n1 {
                edges.push((i * n2 + j, (i + 1) * n2 + j));
            }
        }
    }

    let coords = |idx: usize| (axis1[idx / n2], axis2[idx % n2]);
    let value_on_edge = |a: usize, b: usize, w: f64| -> Option<ModelParams> {
        let (p1a, p2a) = coords(a);
        let (p1b, p2b) = coords(b);
        let p1 = p1a + w * (p1b - p1a);
        let p2 = p2a + w * (p2b - p2a);
        keys.0.set(params, p1).and_then(|p| keys.1.set(&p, p2))
    };

    // Hopf curve: eigenvalue sign change refined along the edge.
    let h_edges: Vec<(usize, usize)> = edges
        .iter()
        .copied()
        .filter(|&(a, b)| {
            hopf[a].is_finite() && hopf[b].is_finite() && (hopf[a] > 0.0) != (hopf[b] > 0.0)
        })
        .collect();
    let h_points: Vec<(f64, f64)> = exec
        .run_cells(h_edges.len(), &|k| {
            let (a, b) = h_edges[k];
            let mut lo = 0.0;
            let mut hi = 1.0;
            let mut g_lo = hopf[a];
            let scale = {
                let (p1a, p2a) = coords(a);
                let (p1b, p2b) = coords(b);
                math::fabs(p1b - p1a).max(math::fabs(p2b - p2a))
            };
            while (hi - lo) * scale > 1e-4 {
                let mid = 0.5 * (lo + hi);
                let g_mid = value_on_edge(a, b, mid)
                    .and_then(|p| hopf_indicator(&p).ok())
                    .unwrap_or(f64::NAN);
                if !g_mid.is_finite() {
                    break;
                }
                if (g_lo > 0.0) == (g_mid > 0.0) {
                    lo = mid;
                    g_lo = g_mid;
                } else {
                    hi = mid;
                }
            }
            let w = 0.5 * (lo + hi);
            let (p1a, p2a) = coords(a);
            let (p1b, p2b) = coords(b);
            (p1a + w * (p1b - p1a), p2a + w * (p2b - p2a))
        })
        .into_iter()
        .collect();

    // Fold edges: stable-cycle count changes with no eigenvalue flip.
    let cycle_count_of_label = |l: RegionLabel| -> Option<usize> {
        Some(match l {
            RegionLabel::BirhythmicI => 2,
            RegionLabel::Ii | RegionLabel::Iv => 1,
            RegionLabel::Iii => 0,
            RegionLabel::Outside => return None,
        })
    };
    let fold_edges: Vec<(usize, usize)> = edges
        .iter()
        .copied()
        .filter(|&(a, b)| {
            let (Some(ca), Some(cb)) = (cycle_count_of_label(labels[a]), cycle_count_of_label(labels[b]))
            else {
                return false;
            };
            let eig_flip = (hopf[a] > 0.0) != (hopf[b] > 0.0);
            ca != cb && !eig_flip
        })
        .collect();
    let fold_points: Vec<(f64, f64)> = exec
        .run_cells(fold_edges.len(), &|k| {
            let (a, b) = fold_edges[k];
            let count_a = cycle_count_of_label(labels[a]).unwrap_or(0);
            let mut lo = 0.0;
            let mut hi = 1.0;
            let scale = {
                let (p1a, p2a) = coords(a);
                let (p1b, p2b) = coords(b);
                math::fabs(p1b - p1a).max(math::fabs(p2b - p2a))
            };
            while (hi - lo) * scale > 1e-4 {
                let mid = 0.5 * (lo + hi);
                let c_mid = value_on_edge(a, b, mid)
                    .and_then(|p| stable_cycle_count(&p, icfg, ccfg).ok());
                match c_mid {
                    Some(c) if c == count_a => lo = mid,
                    Some(_) => hi = mid,
                    None => break,
                }
            }
            let w = 0.5 * (lo + hi);
            let (p1a, p2a) = coords(a);
            let (p1b, p2b) = coords(b);
            (p1a + w * (p1b - p1a), p2a + w * (p2b - p2a))
        })
        .into_iter()
        .collect();

    // Split the fold points into the family that merges with the Hopf curve
    // (named the first family) and the rest, by spatial clustering.
    let (fl1_points, fl2_points, mut gh) =
        split_fold_families(params.model(), &fold_points, &h_points, axis1, axis2);

    // Where both curve families are present, continue the fold polyline into
    // its tangency with the Hopf curve; the quadratic pinch of the wedge
    // between them is far below any grid resolution near the junction.
    if let Some(((_, near_axis2), _)) = gh {
        if !fl1_points.is_empty() {
            if let Ok(junction) =
                fold_hopf_junction(params, keys, axis1, near_axis2, icfg, ccfg)
            {
                gh = Some((junction, 0.0));
            }
        }
    }

    TwoParamScan {
        keys,
        axis1: axis1.into(),
        axis2: axis2.into(),
        labels,
        h_points,
        fl1_points,
        fl2_points,
        gh,
    }
}

/// Locate the Hopf curve along axis1 at the given axis2 level, by bisecting
/// the equilibrium eigenvalue sign over the axis1 range.
fn hopf_location(
    params: &ModelParams,
    keys: (ParamKey, ParamKey),
    axis1: &[f64],
    level: f64,
) -> Result<(f64, f64)> {
    let at = |p1: f64| -> Result<f64> {
        let p = keys
            .0
            .set(params, p1)
            .and_then(|p| keys.1.set(&p, level))
            .ok_or(Error::NoConvergence)?;
        hopf_indicator(&p)
    };
    let (mut lo, mut hi) = (axis1[0], axis1[axis1.len() - 1]);
    let mut g_lo = at(lo)?;
    let g_hi = at(hi)?;
    if (g_lo > 0.0) == (g_hi > 0.0) {
        return Err(Error::NoOnset);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let g_mid = at(mid)?;
        if (g_lo > 0.0) == (g_mid > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), g_lo.signum()))
}

/// Does a small stable cycle (below a quarter of the model scale) exist at
/// these parameters, judged from a ladder of near-equilibrium seeds?
fn small_cycle_exists(
    params: &ModelParams,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<bool> {
    let eq = default_equilibrium(params)?;
    let scale = params.scale();
    let exit = EquilibriumExit { location: eq.location, capture_radius: 2e-3 * scale };
    for radius in [0.005 * scale, 0.0125 * scale, 0.025 * scale, 0.05 * scale, 0.1 * scale] {
        let seed = State::new(eq.location.x + radius, eq.location.y);
        match find_stable_cycle_with_exit(params, seed, icfg, ccfg, Some(exit)) {
            Ok(c) if c.amplitude() < 0.25 * scale => return Ok(true),
            Ok(_) | Err(Error::NotPeriodic) | Err(Error::DomainEscape { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(false)
}

/// Junction of the fold-of-cycles curve with the Hopf curve: measure the
/// width of the small-cycle wedge flanking the Hopf curve at several axis2
/// levels and continue its quadratic pinch to zero width.
pub fn fold_hopf_junction(
    params: &ModelParams,
    keys: (ParamKey, ParamKey),
    axis1: &[f64],
    near_axis2: f64,
    icfg: &IntegratorConfig,
    ccfg: &CycleSearchCfg,
) -> Result<(f64, f64)> {
    let wedge_width = |level: f64| -> Result<Option<f64>> {
        let (p1_h, _sign_lo) = hopf_location(params, keys, axis1, level)?;
        let exists_at = |p1: f64| -> Result<bool> {
            let p = keys
                .0
                .set(params, p1)
                .and_then(|p| keys.1.set(&p, level))
                .ok_or(Error::NoConvergence)?;
            small_cycle_exists(&p, icfg, ccfg)
        };
        // Probe both flanks of the Hopf point on a geometric ladder.
        let ladder = [1e-4, 2.5e-4, 6e-4, 1.5e-3, 4e-3, 1e-2, 2.5e-2];
        for side in [-1.0, 1.0] {
            let mut found = None;
            let mut absent = 0.0;
            for &delta in &ladder {
                if exists_at(p1_h + side * delta)? {
                    found = Some(delta);
                    break;
                }
                absent = delta;
            }
            if let Some(delta) = found {
                // Bisect the outer existence edge of the wedge.
                let (mut inside, mut outside) = (delta, absent.max(delta * 4.0));
                // The edge lies beyond `delta`; expand outward until absent.
                while exists_at(p1_h + side * outside)? {
                    inside = outside;
                    outside *= 2.0;
                    if outside > 0.2 {
                        return Ok(None);
                    }
                }
                while outside - inside > 1e-4 {
                    let mid = 0.5 * (inside + outside);
                    if exists_at(p1_h + side * mid)? {
                        inside = mid;
                    } else {
                        outside = mid;
                    }
                }
                return Ok(Some(0.5 * (inside + outside)));
            }
        }
        Ok(None)
    };

    // Find a level where the wedge is measurable at all.
    let mut found: Option<(f64, f64)> = None;
    'search: for k in 0..=6 {
        for side in if k == 0 { [1.0, 1.0] } else { [1.0, -1.0] } {
            let level = near_axis2 + side * 0.02 * k as f64;
            if let Ok(Some(w)) = wedge_width(level) {
                found = Some((level, w));
                break 'search;
            }
        }
    }
    let Some((level0, w0)) = found else {
        return Err(Error::NoOnset);
    };

    // The wedge narrows toward the junction; find which way that is.
    let probe = wedge_width(level0 + 0.015).ok().flatten();
    let away: f64 = match probe {
        Some(w) if w > w0 => 1.0,
        _ => -1.0,
    };

    // Descend toward the junction until the wedge stops being measurable.
    let mut level_min = level0;
    let mut step = 0.01;
    while step >= 0.0025 {
        match wedge_width(level_min - away * step) {
            Ok(Some(_)) => level_min -= away * step,
            _ => step *= 0.5,
        }
    }

    // Fit the quadratic pinch on levels close to the detection limit.
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for offset in [0.0, 0.0075, 0.015, 0.03, 0.05] {
        if let Ok(Some(w)) = wedge_width(level_min + away * offset) {
            samples.push((level_min + away * offset, w));
        }
    }
    if samples.len() < 3 {
        return Err(Error::NoOnset);
    }

    // Least squares of sqrt(w) against the level: the root is the junction.
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, w) in &samples {
        let y = math::sqrt(w);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if math::fabs(denom) < 1e-300 {
        return Err(Error::NoOnset);
    }
    let a = (n * sxy - sx * sy) / denom;
    let b = (sy * sxx - sx * sxy) / denom;
    if math::fabs(a) < 1e-300 {
        return Err(Error::NoOnset);
    }
    let level_junction = -b / a;
    let (p1_junction, _) = hopf_location(params, keys, axis1, level_junction)?;
    Ok((p1_junction, level_junction))
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Cluster fold points into connected components by grid-spacing proximity,
/// name the component closest to the Hopf polyline F_l1, and estimate the
/// curve junction as the closest approach.
fn split_fold_families(
    model: Model,
    fold_points: &[(f64, f64)],
    h_points: &[(f64, f64)],
    axis1: &[f64],
    axis2: &[f64],
) -> (Vec<(f64, f64)>, Vec<(f64, f64)>, Option<((f64, f64), f64)>) {
    if fold_points.is_empty() {
        return (Vec::new(), Vec::new(), None);
    }
    let step1 = if axis1.len() > 1 { (axis1[axis1.len() - 1] - axis1[0]).abs() / (axis1.len() - 1) as f64 } else { 0.0 };
    let step2 = if axis2.len() > 1 { (axis2[axis2.len() - 1] - axis2[0]).abs() / (axis2.len() - 1) as f64 } else { 0.0 };
    let link2 = 4.0 * (step1 * step1 + step2 * step2).max(1e-300);

    // Union-find over fold points.
    let n = fold_points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist2(fold_points[i], fold_points[j]) <= link2 {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }

    // Distance of each component to the Hopf polyline.
    let mut components: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        if !components.contains(&r) {
            components.push(r);
        }
    }
    let comp_dist = |comp: usize, parent: &mut Vec<usize>| -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..n {
            if root(parent, i) == comp {
                for h in h_points {
                    best = best.min(dist2(fold_points[i], *h));
                }
            }
        }
        best
    };

    let fl1_comp = match model {
        // The van der Pol fold families are named by their monorhythmic
        // side: the family bordering the large-cycle regime is the first.
        Model::Vdp => None,
        Model::Gly => {
            let mut best = (f64::INFINITY, components[0]);
            for &c in &components {
                let d = comp_dist(c, &mut parent);
                if d < best.0 {
                    best = (d, c);
                }
            }
            Some(best.1)
        }
    };

    let mut fl1 = Vec::new();
    let mut fl2 = Vec::new();
    match fl1_comp {
        Some(comp) => {
            for i in 0..n {
                if root(&mut parent, i) == comp {
                    fl1.push(fold_points[i]);
                } else {
                    fl2.push(fold_points[i]);
                }
            }
        }
        None => {
            // Van der Pol: the first family is the one at lower axis2 values
            // (the fold beyond which only the large cycle remains).
            let mut comps_with_mean: Vec<(f64, usize)> = components
                .iter()
                .map(|&c| {
                    let mut sum = 0.0;
                    let mut cnt = 0.0;
                    for i in 0..n {
                        if root(&mut parent, i) == c {
                            sum += fold_points[i].1;
                            cnt += 1.0;
                        }
                    }
                    (sum / cnt, c)
                })
                .collect();
            comps_with_mean.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let first = comps_with_mean[0].1;
            for i in 0..n {
                if root(&mut parent, i) == first {
                    fl1.push(fold_points[i]);
                } else {
                    fl2.push(fold_points[i]);
                }
            }
        }
    }

    // Junction: closest approach between the first fold family and the Hopf
    // polyline.
    let mut gh = None;
    let mut best = f64::INFINITY;
    for f in &fl1 {
        for h in h_points {
            let d = dist2(*f, *h);
            if d < best {
                best = d;
                gh = Some(((0.5 * (f.0 + h.0), 0.5 * (f.1 + h.1)), math::sqrt(d)));
            }
        }
    }
    (fl1, fl2, gh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::SerialExecutor;
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
    fn vdp_region_labels_match_phase_portraits() {
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        assert_eq!(classify_region(&vdp(1.0, -0.001), &icfg, &ccfg).unwrap(), RegionLabel::BirhythmicI);
        assert_eq!(classify_region(&vdp(1.0, 0.1), &icfg, &ccfg).unwrap(), RegionLabel::Ii);
        assert_eq!(classify_region(&vdp(0.05, 0.15), &icfg, &ccfg).unwrap(), RegionLabel::Iii);
        assert_eq!(classify_region(&vdp(0.05, -0.15), &icfg, &ccfg).unwrap(), RegionLabel::Iv);
    }

    #[test]
    fn gly_region_labels_match_phase_portraits() {
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        assert_eq!(classify_region(&gly(0.29, 1.15), &icfg, &ccfg).unwrap(), RegionLabel::BirhythmicI);
        assert_eq!(classify_region(&gly(0.34, 1.1), &icfg, &ccfg).unwrap(), RegionLabel::Ii);
        assert_eq!(classify_region(&gly(0.34, 1.6), &icfg, &ccfg).unwrap(), RegionLabel::Iii);
        assert_eq!(classify_region(&gly(0.34, 0.7), &icfg, &ccfg).unwrap(), RegionLabel::Iv);
    }

    #[test]
    fn vdp_one_param_scan_has_birhythmic_window_with_folds() {
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let params = vdp(1.0, -0.05);
        // The window at d = -0.05 opens near mu ~ 0.07; scan across its
        // lower edge only (the upper edge sits beyond mu = 5).
        let values: Vec<f64> = (0..8).map(|k| 0.05 + 0.25 * k as f64 / 7.0).collect();
        let points = scan_one_param(&params, ParamKey::Mu, &values, &icfg, &ccfg, &SerialExecutor);
        let n_bi = points
            .iter()
            .filter(|p| p.as_ref().map(|b| b.gamma1.is_some() && b.gamma2.is_some()).unwrap_or(false))
            .count();
        assert!(n_bi >= 3, "birhythmic stretch too small: {n_bi}");
        let (f_l1, f_l2) = window_folds(&params, ParamKey::Mu, &values, &points, &icfg, &ccfg);
        let f_l1 = f_l1.expect("lower fold");
        assert!(f_l2.is_none(), "upper fold is outside this range");
        assert!(f_l1 > 0.05 && f_l1 < 0.12, "fold at {f_l1}");
        // Theta exists strictly inside the window and brackets the stable
        // amplitudes.
        let inside = points
            .iter()
            .filter_map(|p| p.as_ref().ok())
            .find(|b| b.gamma1.is_some() && b.gamma2.is_some() && b.theta.is_some())
            .expect("point with all three branches");
        let (g1, g2, th) = (inside.gamma1.unwrap(), inside.gamma2.unwrap(), inside.theta.unwrap());
        assert!(g2.0 < th.0 && th.0 < g1.0, "maxima ordering {g2:?} {th:?} {g1:?}");
    }

    #[test]
    fn degenerate_single_value_scan() {
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        let params = vdp(1.0, -0.001);
        let points =
            scan_one_param(&params, ParamKey::Mu, &[1.0], &icfg, &ccfg, &SerialExecutor);
        assert_eq!(points.len(), 1);
        assert!(points[0].as_ref().unwrap().gamma1.is_some());
    }

    #[test]
    fn uniform_region_grid_has_no_curves() {
        let icfg = IntegratorConfig::default();
        let ccfg = CycleSearchCfg::default();
        // A small grid strictly inside the stable-equilibrium region.
        let params = gly(0.34, 1.6);
        let axis1 = [0.335, 0.34, 0.345];
        let axis2 = [1.55, 1.6, 1.65];
        let scan = scan_two_param(
            &params,
            (ParamKey::V, ParamKey::SigmaI),
            &axis1,
            &axis2,
            &icfg,
            &ccfg,
            &SerialExecutor,
        );
        assert!(scan.labels.iter().all(|&l| l == RegionLabel::Iii));
        assert!(scan.h_points.is_empty());
        assert!(scan.fl1_points.is_empty() && scan.fl2_points.is_empty());
        assert!(scan.gh.is_none());
    }
}
