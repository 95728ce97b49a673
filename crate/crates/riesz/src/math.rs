//! Scalar math routed through `std` or `libm`, plus compensated accumulation.

#![allow(clippy::needless_return)]

pub use core::f64::consts::{FRAC_PI_2, PI, TAU};

macro_rules! unary {
    ($($name:ident),*) => {
        $(
            #[inline(always)]
            pub fn $name(x: f64) -> f64 {
                #[cfg(feature = "std")]
                return x.$name();
                #[cfg(not(feature = "std"))]
                return libm::$name(x);
            }
        )*
    };
}

unary!(sin, cos, tan, asin, acos, atan, sqrt, cbrt, exp, sinh, cosh, asinh);

#[inline(always)]
pub fn ln(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.ln();
    #[cfg(not(feature = "std"))]
    return libm::log(x);
}

#[inline(always)]
pub fn atan2(y: f64, x: f64) -> f64 {
    #[cfg(feature = "std")]
    return y.atan2(x);
    #[cfg(not(feature = "std"))]
    return libm::atan2(y, x);
}

#[inline(always)]
pub fn hypot(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.hypot(y);
    #[cfg(not(feature = "std"))]
    return libm::hypot(x, y);
}

#[inline(always)]
pub fn powf(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.powf(y);
    #[cfg(not(feature = "std"))]
    return libm::pow(x, y);
}

#[inline(always)]
pub fn powi(x: f64, n: i32) -> f64 {
    x.powi(n)
}

#[inline(always)]
pub fn sin_cos(x: f64) -> (f64, f64) {
    (sin(x), cos(x))
}

pub const LN_2: f64 = core::f64::consts::LN_2;

/// Wraps `x` into `[0, period)`.
#[inline]
pub fn wrap(x: f64, period: f64) -> f64 {
    let r = x % period;
    if r < 0.0 {
        r + period
    } else {
        r
    }
}

/// Wraps `x` into `[-period/2, period/2)`.
#[inline]
pub fn wrap_centered(x: f64, period: f64) -> f64 {
    wrap(x + 0.5 * period, period) - 0.5 * period
}

/// `|x - y|^lambda` evaluated from the squared distance.
///
/// Fast paths for the even exponents the energies use; `powf` otherwise.
#[inline(always)]
pub fn pow_dist_sq(dist_sq: f64, lambda: f64) -> f64 {
    if lambda == -4.0 {
        let inv = 1.0 / dist_sq;
        inv * inv
    } else if lambda == -2.0 {
        1.0 / dist_sq
    } else if lambda == 0.0 {
        1.0
    } else if lambda == 2.0 {
        dist_sq
    } else {
        powf(dist_sq, 0.5 * lambda)
    }
}

/// Neumaier compensated accumulator.
///
/// The cutoff integrals sum terms spanning ~9 orders of magnitude between
/// the `eps^-2` spike and the constant term being extracted; plain `+=`
/// loses exactly the digits the renormalization needs.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline(always)]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline(always)]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice in index order.
pub fn sum_compensated(values: &[f64]) -> f64 {
    let mut acc = Accumulator::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_ranges() {
        assert!((wrap(-0.1, TAU) - (TAU - 0.1)).abs() < 1e-15);
        assert!((wrap_centered(TAU - 0.1, TAU) - (-0.1)).abs() < 1e-12);
        assert_eq!(wrap(0.0, TAU), 0.0);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        // 1e16 + many tiny increments that naive summation drops entirely.
        let mut vals = alloc::vec![1e16];
        for _ in 0..1000 {
            vals.push(1.0);
        }
        vals.push(-1e16);
        let exact = 1000.0;
        assert_eq!(sum_compensated(&vals), exact);
    }

    #[test]
    fn pow_dist_sq_matches_powf() {
        for &d2 in &[0.25, 1.0, 7.3] {
            for &lam in &[-4.0, -2.0, 0.0, -3.0, 1.5] {
                let want = powf(sqrt(d2), lam);
                let got = pow_dist_sq(d2, lam);
                assert!((got - want).abs() <= 1e-14 * want.abs().max(1.0));
            }
        }
    }
}
