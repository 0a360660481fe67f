//! Time-dependent input laws and the parameter paths they move along.

use crate::math;
use crate::models::{ModelParams, ParamKey};

/// Shape of the time-dependent input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftKind {
    /// Drops from `a` to `a - b` and stays there after `t_c`.
    Monotone,
    /// Symmetric excursion to `a - b` at `t_c`, returning to `a`.
    Nonmonotone,
    /// Plateau of height `b` above the base level between `t_c1` and `t_c2`.
    Impulse,
}

/// A bi-asymptotically constant input law p(t).
///
/// For the monotone and non-monotone kinds, `level` is the asymptotic start
/// value and `b >= 0` the excursion magnitude; for the impulse kind `level`
/// is the base level the pulse rises from. `rate` sets the time scale of the
/// transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputShift {
    pub kind: ShiftKind,
    /// Reference level: the start level `a` (monotone/non-monotone) or the
    /// base level (impulse).
    pub level: f64,
    pub b: f64,
    pub rate: f64,
    /// Switch time for the monotone/non-monotone kinds.
    pub t_c: f64,
    /// Switch times for the impulse kind (`t_c1 < t_c2`); unused otherwise.
    pub t_c1: f64,
    pub t_c2: f64,
}

impl InputShift {
    pub fn monotone(a: f64, b: f64, rate: f64, t_c: f64) -> Self {
        InputShift { kind: ShiftKind::Monotone, level: a, b, rate, t_c, t_c1: 0.0, t_c2: 0.0 }
    }

    pub fn nonmonotone(a: f64, b: f64, rate: f64, t_c: f64) -> Self {
        InputShift { kind: ShiftKind::Nonmonotone, level: a, b, rate, t_c, t_c1: 0.0, t_c2: 0.0 }
    }

    pub fn impulse(base_level: f64, b: f64, rate: f64, t_c1: f64, t_c2: f64) -> Self {
        InputShift { kind: ShiftKind::Impulse, level: base_level, b, rate, t_c: t_c1, t_c1, t_c2 }
    }

    /// Input value at time `t`.
    pub fn eval(&self, t: f64) -> f64 {
        match self.kind {
            ShiftKind::Monotone => {
                if t <= self.t_c {
                    self.level - self.b * math::sech(self.rate * (t - self.t_c))
                } else {
                    self.level - self.b
                }
            }
            ShiftKind::Nonmonotone => self.level - self.b * math::sech(self.rate * (t - self.t_c)),
            ShiftKind::Impulse => {
                self.level
                    + self.b
                        * 0.5
                        * (math::tanh(self.rate * (t - self.t_c1))
                            - math::tanh(self.rate * (t - self.t_c2)))
            }
        }
    }

    /// Asymptotic limits (past, future) of the input.
    pub fn limits(&self) -> (f64, f64) {
        match self.kind {
            ShiftKind::Monotone => (self.level, self.level - self.b),
            ShiftKind::Nonmonotone | ShiftKind::Impulse => (self.level, self.level),
        }
    }

    /// Value furthest from the reference level that the input attains.
    pub fn extreme(&self) -> f64 {
        match self.kind {
            ShiftKind::Monotone | ShiftKind::Nonmonotone => self.level - self.b,
            ShiftKind::Impulse => self.level + self.b,
        }
    }

    /// Smallest time beyond which |p(t) - future limit| < eps, in closed form.
    pub fn settled_time(&self, eps: f64) -> f64 {
        match self.kind {
            ShiftKind::Monotone => self.t_c,
            ShiftKind::Nonmonotone => {
                if self.b <= eps {
                    self.t_c
                } else {
                    self.t_c + math::asech(eps / self.b) / self.rate
                }
            }
            ShiftKind::Impulse => {
                if self.b <= eps {
                    self.t_c2
                } else {
                    // Bound the residual with the second-switch tail alone:
                    // |p - base| <= b (1 - tanh(r (t - t_c2))) / 2.
                    let arg = (1.0 - 2.0 * eps / self.b).max(0.0);
                    self.t_c2 + math::atanh(arg) / self.rate
                }
            }
        }
    }

    /// Switch times around which the integrator must resolve the transition.
    pub fn switch_times(&self) -> (f64, Option<f64>) {
        match self.kind {
            ShiftKind::Monotone | ShiftKind::Nonmonotone => (self.t_c, None),
            ShiftKind::Impulse => (self.t_c1, Some(self.t_c2)),
        }
    }
}

/// Linear map slaving a second parameter to the driving one:
/// `slave = c0 + c1 * driver`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlavedParam {
    pub key: ParamKey,
    pub c0: f64,
    pub c1: f64,
}

/// A straight parameter path: one driving parameter, optionally a slaved
/// companion, all other coordinates frozen at the base record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterPath {
    pub driver: ParamKey,
    pub slaved: Option<SlavedParam>,
    /// Largest admissible magnitude |level - extreme| before the path leaves
    /// the birhythmic window (the fold cap), when known.
    pub b_max: Option<f64>,
}

impl ParameterPath {
    pub fn new(driver: ParamKey) -> Self {
        ParameterPath { driver, slaved: None, b_max: None }
    }

    pub fn with_slaved(mut self, slaved: SlavedParam) -> Self {
        self.slaved = Some(slaved);
        self
    }

    pub fn with_b_max(mut self, b_max: f64) -> Self {
        self.b_max = Some(b_max);
        self
    }

    /// Parameter record at driving value `p`, starting from `base`.
    /// Returns `None` if a key does not belong to the base model.
    pub fn params_at(&self, base: &ModelParams, p: f64) -> Option<ModelParams> {
        let mut out = self.driver.set(base, p)?;
        if let Some(sl) = &self.slaved {
            out = sl.key.set(&out, sl.c0 + sl.c1 * p)?;
        }
        Some(out)
    }
}
