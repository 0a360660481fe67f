//! Scalar math shims so the crate builds both with `std` and with `libm`.

#[cfg(feature = "std")]
macro_rules! shim {
    ($name:ident, $method:ident) => {
        #[inline(always)]
        pub fn $name(x: f64) -> f64 {
            x.$method()
        }
    };
}

#[cfg(not(feature = "std"))]
macro_rules! shim {
    ($name:ident, $method:ident) => {
        #[inline(always)]
        pub fn $name(x: f64) -> f64 {
            libm::$name(x)
        }
    };
}

shim!(fabs, abs);
shim!(sqrt, sqrt);
shim!(log, ln);
shim!(sin, sin);
shim!(cos, cos);
shim!(tanh, tanh);
shim!(cosh, cosh);
shim!(floor, floor);

#[cfg(feature = "std")]
#[inline(always)]
pub fn pow(x: f64, y: f64) -> f64 {
    x.powf(y)
}

#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// x^n for small non-negative integer exponents.
#[inline(always)]
pub fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// sech(x) = 1 / cosh(x); underflows cleanly to 0 for large |x|.
#[inline(always)]
pub fn sech(x: f64) -> f64 {
    1.0 / cosh(x)
}

/// Inverse of sech on (0, 1]; asech(s) = ln((1 + sqrt(1 - s^2)) / s).
#[inline(always)]
pub fn asech(s: f64) -> f64 {
    log((1.0 + sqrt(1.0 - s * s)) / s)
}

/// atanh via the log formula, valid on (-1, 1).
#[inline(always)]
pub fn atanh(x: f64) -> f64 {
    0.5 * log((1.0 + x) / (1.0 - x))
}


/// Euclidean remainder for floats: the representative of x mod m in [0, m).
#[inline(always)]
pub fn rem_euclid(x: f64, m: f64) -> f64 {
    let r = x - m * floor(x / m);
    if r >= m {
        r - m
    } else if r < 0.0 {
        r + m
    } else {
        r
    }
}
