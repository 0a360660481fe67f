//! The two planar vector fields, their parameter records, and
//! finite-difference Jacobians.

use core::ops::{Add, Mul, Neg, Sub};

use crate::math;
use crate::{Error, Result};

/// Tolerance below zero that the glycolysis guard still accepts; adaptive
/// steps may transiently undershoot the axes by this much.
pub const DOMAIN_GUARD_TOL: f64 = 1e-9;

/// A point (x, y) in the planar phase space of either model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub const fn new(x: f64, y: f64) -> Self {
        State { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        math::sqrt(self.x * self.x + self.y * self.y)
    }

    /// Euclidean distance to another point.
    pub fn dist(&self, other: State) -> f64 {
        (*self - other).norm()
    }

    /// Component-wise maximum of absolute values.
    pub fn max_abs(&self) -> f64 {
        math::fabs(self.x).max(math::fabs(self.y))
    }
}

impl Add for State {
    type Output = State;
    fn add(self, rhs: State) -> State {
        State::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, rhs: State) -> State {
        State::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for State {
    type Output = State;
    fn mul(self, k: f64) -> State {
        State::new(self.x * k, self.y * k)
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        State::new(-self.x, -self.y)
    }
}

/// Parameters of the birhythmic van der Pol oscillator.
///
/// `mu` is the external input parameter, `alpha` and `beta` shape the
/// higher-order damping polynomial, and `d` is the feedback strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdpParams {
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
}

/// Parameters of the two-variable glycolysis model.
///
/// `v` is the constant substrate input, `sigma_i` the input parameter
/// (maximum recycling rate), `sigma_m` the maximum reaction rate, `n` the
/// Hill coefficient of the product feedback, `k_half` its half-saturation
/// constant, `l` the allosteric constant, and `k_s` the product removal rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlyParams {
    pub v: f64,
    pub sigma_i: f64,
    pub k_half: f64,
    pub l: f64,
    pub sigma_m: f64,
    pub n: u32,
    pub q: f64,
    pub k_s: f64,
}

/// Model discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Vdp,
    Gly,
}

/// Full parameter record for one model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    Vdp(VdpParams),
    Gly(GlyParams),
}

impl ModelParams {
    pub fn model(&self) -> Model {
        match self {
            ModelParams::Vdp(_) => Model::Vdp,
            ModelParams::Gly(_) => Model::Gly,
        }
    }

    /// Characteristic state-space scale, used to size seed fans and
    /// convergence thresholds. Chosen so the outer seed ring clears the
    /// repelling cycle at every charted parameter point.
    pub fn scale(&self) -> f64 {
        match self.model() {
            Model::Vdp => 6.0,
            Model::Gly => 40.0,
        }
    }

    /// Evaluate the vector field.
    pub fn rhs(&self, s: State) -> Result<State> {
        match self {
            ModelParams::Vdp(p) => Ok(vdp_rhs(s, p)),
            ModelParams::Gly(p) => gly_rhs(s, p),
        }
    }
}

/// Scalar parameters addressable by scans, paths, and config overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKey {
    Mu,
    Alpha,
    Beta,
    D,
    V,
    SigmaI,
    KHalf,
    L,
    SigmaM,
    Q,
    Ks,
}

impl ParamKey {
    pub fn name(&self) -> &'static str {
        match self {
            ParamKey::Mu => "mu",
            ParamKey::Alpha => "alpha",
            ParamKey::Beta => "beta",
            ParamKey::D => "d",
            ParamKey::V => "v",
            ParamKey::SigmaI => "sigma_i",
            ParamKey::KHalf => "k_half",
            ParamKey::L => "l",
            ParamKey::SigmaM => "sigma_m",
            ParamKey::Q => "q",
            ParamKey::Ks => "k_s",
        }
    }

    pub fn parse(name: &str) -> Option<ParamKey> {
        Some(match name {
            "mu" => ParamKey::Mu,
            "alpha" => ParamKey::Alpha,
            "beta" => ParamKey::Beta,
            "d" => ParamKey::D,
            "v" => ParamKey::V,
            "sigma_i" => ParamKey::SigmaI,
            "k_half" => ParamKey::KHalf,
            "l" => ParamKey::L,
            "sigma_m" => ParamKey::SigmaM,
            "q" => ParamKey::Q,
            "k_s" => ParamKey::Ks,
            _ => return None,
        })
    }

    /// Read the addressed parameter, if it belongs to the record's model.
    pub fn get(&self, params: &ModelParams) -> Option<f64> {
        match (params, self) {
            (ModelParams::Vdp(p), ParamKey::Mu) => Some(p.mu),
            (ModelParams::Vdp(p), ParamKey::Alpha) => Some(p.alpha),
            (ModelParams::Vdp(p), ParamKey::Beta) => Some(p.beta),
            (ModelParams::Vdp(p), ParamKey::D) => Some(p.d),
            (ModelParams::Gly(p), ParamKey::V) => Some(p.v),
            (ModelParams::Gly(p), ParamKey::SigmaI) => Some(p.sigma_i),
            (ModelParams::Gly(p), ParamKey::KHalf) => Some(p.k_half),
            (ModelParams::Gly(p), ParamKey::L) => Some(p.l),
            (ModelParams::Gly(p), ParamKey::SigmaM) => Some(p.sigma_m),
            (ModelParams::Gly(p), ParamKey::Q) => Some(p.q),
            (ModelParams::Gly(p), ParamKey::Ks) => Some(p.k_s),
            _ => None,
        }
    }

    /// Write the addressed parameter; returns the updated record, or `None`
    /// if the key does not belong to the record's model.
    pub fn set(&self, params: &ModelParams, value: f64) -> Option<ModelParams> {
        let mut out = *params;
        match (&mut out, self) {
            (ModelParams::Vdp(p), ParamKey::Mu) => p.mu = value,
            (ModelParams::Vdp(p), ParamKey::Alpha) => p.alpha = value,
            (ModelParams::Vdp(p), ParamKey::Beta) => p.beta = value,
            (ModelParams::Vdp(p), ParamKey::D) => p.d = value,
            (ModelParams::Gly(p), ParamKey::V) => p.v = value,
            (ModelParams::Gly(p), ParamKey::SigmaI) => p.sigma_i = value,
            (ModelParams::Gly(p), ParamKey::KHalf) => p.k_half = value,
            (ModelParams::Gly(p), ParamKey::L) => p.l = value,
            (ModelParams::Gly(p), ParamKey::SigmaM) => p.sigma_m = value,
            (ModelParams::Gly(p), ParamKey::Q) => p.q = value,
            (ModelParams::Gly(p), ParamKey::Ks) => p.k_s = value,
            _ => return None,
        }
        Some(out)
    }
}

/// Time derivative of the van der Pol system:
/// x' = y, y' = mu (1 - x^2 + alpha x^4 - beta x^6) y - x - d (y - x).
pub fn vdp_rhs(s: State, p: &VdpParams) -> State {
    let x2 = s.x * s.x;
    let x4 = x2 * x2;
    let x6 = x4 * x2;
    let damping = p.mu * (1.0 - x2 + p.alpha * x4 - p.beta * x6);
    State::new(s.y, damping * s.y - s.x - p.d * (s.y - s.x))
}

/// Rate-of-reaction function of the glycolysis model; stays in [0, 1) on the
/// closed positive quadrant for any l > 0.
pub fn gly_reaction_rate(s: State, l: f64) -> f64 {
    let xp = 1.0 + s.x;
    let yp2 = (1.0 + s.y) * (1.0 + s.y);
    s.x * xp * yp2 / (l + xp * xp * yp2)
}

/// Time derivative of the glycolysis model. Errors with [`Error::DomainEscape`]
/// when a coordinate is negative beyond the guard tolerance.
pub fn gly_rhs(s: State, p: &GlyParams) -> Result<State> {
    if s.x < -DOMAIN_GUARD_TOL || s.y < -DOMAIN_GUARD_TOL || !s.is_finite() {
        return Err(Error::DomainEscape { t: f64::NAN, state: s });
    }
    let yn = math::powi(s.y.max(0.0), p.n);
    let feedback = p.sigma_i * yn / (math::powi(p.k_half, p.n) + yn);
    let reaction = p.sigma_m * gly_reaction_rate(s, p.l);
    Ok(State::new(
        p.v + feedback - reaction,
        p.q * reaction - p.k_s * s.y - p.q * feedback,
    ))
}

/// 2x2 Jacobian of the vector field at `s`, by central finite differences
/// with relative step 1e-6 * max(1, |coordinate|). Row-major: [[dfx/dx,
/// dfx/dy], [dfy/dx, dfy/dy]].
pub fn jacobian(params: &ModelParams, s: State) -> Result<[[f64; 2]; 2]> {
    let hx = 1e-6 * math::fabs(s.x).max(1.0);
    let hy = 1e-6 * math::fabs(s.y).max(1.0);
    let fx_p = params.rhs(State::new(s.x + hx, s.y))?;
    let fx_m = params.rhs(State::new(s.x - hx, s.y))?;
    let fy_p = params.rhs(State::new(s.x, s.y + hy))?;
    let fy_m = params.rhs(State::new(s.x, s.y - hy))?;
    let inv2hx = 0.5 / hx;
    let inv2hy = 0.5 / hy;
    Ok([
        [(fx_p.x - fx_m.x) * inv2hx, (fy_p.x - fy_m.x) * inv2hy],
        [(fx_p.y - fx_m.y) * inv2hx, (fy_p.y - fy_m.y) * inv2hy],
    ])
}

/// Eigenvalue of a real 2x2 matrix as a (re, im) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

/// Closed-form eigenvalues of a 2x2 matrix, sorted by real part descending.
pub fn eigenvalues_2x2(m: &[[f64; 2]; 2]) -> [Eigenvalue; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let root = math::sqrt(disc);
        let a = 0.5 * (tr + root);
        let b = 0.5 * (tr - root);
        [Eigenvalue { re: a, im: 0.0 }, Eigenvalue { re: b, im: 0.0 }]
    } else {
        let im = 0.5 * math::sqrt(-disc);
        let re = 0.5 * tr;
        [Eigenvalue { re, im }, Eigenvalue { re, im: -im }]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn fig1_vdp() -> VdpParams {
        VdpParams { mu: 0.6, alpha: 0.114, beta: 0.003, d: -0.1 }
    }

    fn fig4_gly(v: f64, sigma_i: f64) -> GlyParams {
        GlyParams { v, sigma_i, k_half: 10.0, l: 3.6e6, sigma_m: 10.0, n: 5, q: 1.0, k_s: 0.06 }
    }

    /// Analytic Jacobian of the van der Pol field, used as the oracle for the
    /// finite-difference version.
    fn vdp_jacobian_analytic(s: State, p: &VdpParams) -> [[f64; 2]; 2] {
        let x = s.x;
        let x2 = x * x;
        let x4 = x2 * x2;
        let damping = p.mu * (1.0 - x2 + p.alpha * x4 - p.beta * x4 * x2);
        let ddamping_dx = p.mu * (-2.0 * x + 4.0 * p.alpha * x2 * x - 6.0 * p.beta * x4 * x);
        [[0.0, 1.0], [ddamping_dx * s.y - 1.0 + p.d, damping - p.d]]
    }

    #[test]
    fn vdp_origin_is_equilibrium() {
        let f = vdp_rhs(State::new(0.0, 0.0), &fig1_vdp());
        assert_eq!(f, State::new(0.0, 0.0));
    }

    #[test]
    fn vdp_hand_evaluated_point() {
        // (1, 0) with (mu, alpha, beta, d) = (0.6, 0.114, 0.003, -0.1):
        // x' = 0, y' = -1 - (-0.1)(0 - 1) = -1.1.
        let f = vdp_rhs(State::new(1.0, 0.0), &fig1_vdp());
        assert!((f.x - 0.0).abs() < 1e-15);
        assert!((f.y - (-1.1)).abs() < 1e-15);
    }

    #[test]
    fn vdp_rhs_is_odd() {
        let p = fig1_vdp();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let s = State::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
            let a = vdp_rhs(s, &p);
            let b = vdp_rhs(-s, &p);
            assert!((a.x + b.x).abs() < 1e-12 * a.x.abs().max(1.0));
            assert!((a.y + b.y).abs() < 1e-12 * a.y.abs().max(1.0));
        }
    }

    #[test]
    fn gly_axis_point() {
        // Phi(0, y) = 0 and y = 0 kills the feedback and removal terms.
        let p = fig4_gly(0.31, 1.0);
        let f = gly_rhs(State::new(0.0, 0.0), &p).unwrap();
        assert_eq!(f, State::new(0.31, 0.0));
    }

    #[test]
    fn gly_mass_balance_identity_q1() {
        // With q = 1 the reaction and feedback terms cancel in x' + y',
        // leaving v - k_s * y exactly.
        let p = fig4_gly(0.275, 1.226);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let s = State::new(rng.gen_range(0.0..200.0), rng.gen_range(0.0..20.0));
            let f = gly_rhs(s, &p).unwrap();
            let lhs = f.x + f.y;
            let rhs = p.v - p.k_s * s.y;
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0), "at {s:?}");
        }
    }

    #[test]
    fn gly_independent_formula_evaluation() {
        // Second, independently typed evaluation of the model equations.
        let p = fig4_gly(0.275, 1.226);
        let (x, y) = (75.71, 2.76);
        let phi = x * (1.0 + x) * (1.0 + y) * (1.0 + y)
            / (p.l + (1.0 + x) * (1.0 + x) * (1.0 + y) * (1.0 + y));
        let fb = p.sigma_i * y.powi(5) / (p.k_half.powi(5) + y.powi(5));
        let expected_x = p.v + fb - p.sigma_m * phi;
        let expected_y = p.q * p.sigma_m * phi - p.k_s * y - p.q * fb;
        let f = gly_rhs(State::new(x, y), &p).unwrap();
        assert!((f.x - expected_x).abs() < 1e-14 * expected_x.abs().max(1.0));
        assert!((f.y - expected_y).abs() < 1e-14 * expected_y.abs().max(1.0));
    }

    #[test]
    fn gly_reaction_rate_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let s = State::new(rng.gen_range(0.0..1e4), rng.gen_range(0.0..1e3));
            let phi = gly_reaction_rate(s, 3.6e6);
            assert!((0.0..1.0).contains(&phi), "Phi({s:?}) = {phi}");
        }
    }

    #[test]
    fn gly_domain_guard() {
        let p = fig4_gly(0.31, 1.0);
        assert!(gly_rhs(State::new(-1e-10, 0.5), &p).is_ok());
        assert!(matches!(
            gly_rhs(State::new(-1e-6, 0.5), &p),
            Err(Error::DomainEscape { .. })
        ));
        assert!(matches!(
            gly_rhs(State::new(0.5, -1e-6), &p),
            Err(Error::DomainEscape { .. })
        ));
    }

    #[test]
    fn jacobian_vdp_origin_closed_form() {
        let p = VdpParams { mu: 1.0, alpha: 0.114, beta: 0.003, d: 0.0 };
        let j = jacobian(&ModelParams::Vdp(p), State::new(0.0, 0.0)).unwrap();
        let expect = [[0.0, 1.0], [-1.0, 1.0]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((j[r][c] - expect[r][c]).abs() < 1e-8, "J[{r}][{c}] = {}", j[r][c]);
            }
        }
    }

    #[test]
    fn jacobian_matches_analytic_vdp() {
        let p = fig1_vdp();
        let mp = ModelParams::Vdp(p);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let s = State::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
            let j = jacobian(&mp, s).unwrap();
            let a = vdp_jacobian_analytic(s, &p);
            for r in 0..2 {
                for c in 0..2 {
                    let scale = a[r][c].abs().max(1.0);
                    assert!(
                        (j[r][c] - a[r][c]).abs() < 1e-5 * scale,
                        "J[{r}][{c}] fd {} vs analytic {} at {s:?}",
                        j[r][c],
                        a[r][c]
                    );
                }
            }
        }
    }

    #[test]
    fn eigenvalues_complex_pair() {
        let eig = eigenvalues_2x2(&[[0.0, 1.0], [-1.0, 0.0]]);
        assert!((eig[0].re).abs() < 1e-15 && (eig[0].im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn param_key_round_trip() {
        let mp = ModelParams::Vdp(fig1_vdp());
        let set = ParamKey::Mu.set(&mp, 1.52).unwrap();
        assert_eq!(ParamKey::Mu.get(&set), Some(1.52));
        assert_eq!(ParamKey::V.get(&mp), None);
        assert_eq!(ParamKey::parse("sigma_i"), Some(ParamKey::SigmaI));
    }
}
