//! Closed regular curves (knots) and their arclength bookkeeping.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, TAU};
use crate::quad;
use crate::vec3::Vec3;

/// A closed curve given by a chart over `[0, period)`.
pub trait Curve: Sync {
    fn point(&self, t: f64) -> Vec3;

    /// Point and velocity.
    fn jet(&self, t: f64) -> (Vec3, Vec3);

    fn period(&self) -> f64 {
        TAU
    }

    fn speed(&self, t: f64) -> f64 {
        self.jet(t).1.norm()
    }

    /// Total length; the default integrates the speed.
    fn length(&self) -> f64 {
        quad::integrate_1d(&|t| self.speed(t), 0.0, self.period(), 1e-13, 40).value
    }

    /// Chart parameter of a point on the curve.
    fn locate(&self, p: Vec3, tol: f64) -> Result<f64> {
        let n = 1024;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64 * self.period();
            let d2 = self.point(t).dist_sq(p);
            if d2 < best.0 {
                best = (d2, t);
            }
        }
        let mut t = best.1;
        for _ in 0..60 {
            let (q, dq) = self.jet(t);
            let r = q - p;
            let denom = dq.norm_sq();
            if denom < 1e-300 {
                break;
            }
            let dt = dq.dot(r) / denom;
            t -= dt;
            if dt.abs() < 1e-16 * self.period() {
                break;
            }
        }
        let residual = self.point(t).dist(p);
        if residual <= tol {
            Ok(math::wrap(t, self.period()))
        } else {
            Err(Error::PointNotOnSurface { residual })
        }
    }
}

/// Planar circle of radius `r` about `center`, in the z = 0 plane.
#[derive(Debug, Clone, Copy)]
pub struct Circle {
    pub radius: f64,
    pub center: Vec3,
}

impl Circle {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Circle { radius, center: Vec3::ZERO })
    }

    pub fn unit() -> Self {
        Circle { radius: 1.0, center: Vec3::ZERO }
    }
}

impl Curve for Circle {
    fn point(&self, t: f64) -> Vec3 {
        let (s, c) = math::sin_cos(t);
        self.center + self.radius * Vec3::new(c, s, 0.0)
    }

    fn jet(&self, t: f64) -> (Vec3, Vec3) {
        let (s, c) = math::sin_cos(t);
        (
            self.center + self.radius * Vec3::new(c, s, 0.0),
            self.radius * Vec3::new(-s, c, 0.0),
        )
    }

    fn speed(&self, _t: f64) -> f64 {
        self.radius
    }

    fn length(&self) -> f64 {
        TAU * self.radius
    }
}

/// Planar ellipse `(a cos t, b sin t, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct Ellipse {
    pub a: f64,
    pub b: f64,
}

impl Ellipse {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::domain(format!("ellipse semi-axes must be positive, got ({a}, {b})")));
        }
        Ok(Ellipse { a, b })
    }
}

impl Curve for Ellipse {
    fn point(&self, t: f64) -> Vec3 {
        let (s, c) = math::sin_cos(t);
        Vec3::new(self.a * c, self.b * s, 0.0)
    }

    fn jet(&self, t: f64) -> (Vec3, Vec3) {
        let (s, c) = math::sin_cos(t);
        (
            Vec3::new(self.a * c, self.b * s, 0.0),
            Vec3::new(-self.a * s, self.b * c, 0.0),
        )
    }
}

/// Cumulative arclength table with quadrature-refined lookups, for the
/// arclength-cutoff renormalization variant.
pub struct ArclengthTable<'a, C: Curve + ?Sized> {
    curve: &'a C,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
    total: f64,
}

impl<'a, C: Curve + ?Sized> ArclengthTable<'a, C> {
    pub fn new(curve: &'a C, segments: usize) -> Self {
        let period = curve.period();
        let n = segments.max(16);
        let mut knots = Vec::with_capacity(n + 1);
        let mut cumulative = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        knots.push(0.0);
        for i in 0..n {
            let t0 = i as f64 / n as f64 * period;
            let t1 = (i + 1) as f64 / n as f64 * period;
            acc += quad::integrate_1d(&|t| curve.speed(t), t0, t1, 1e-14, 30).value;
            knots.push(t1);
            cumulative.push(acc);
        }
        ArclengthTable { curve, knots, cumulative, total: acc }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Arclength from parameter 0 to `t` (for `t` in one period).
    pub fn arclength(&self, t: f64) -> f64 {
        let t = math::wrap(t, self.curve.period());
        let idx = match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let idx = idx.min(self.knots.len() - 2);
        self.cumulative[idx]
            + quad::integrate_1d(&|x| self.curve.speed(x), self.knots[idx], t, 1e-14, 30).value
    }

    /// Parameter at arclength `s` from parameter 0 (wrapping).
    pub fn param_at(&self, s: f64) -> f64 {
        let s = math::wrap(s, self.total);
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let idx = idx.min(self.cumulative.len() - 2);
        let mut t = self.knots[idx];
        let mut acc = self.cumulative[idx];
        // Newton on s(t); the speed is the exact derivative.
        for _ in 0..80 {
            let err = acc - s;
            let sp = self.curve.speed(t);
            let dt = -err / sp;
            acc += quad::integrate_1d(&|x| self.curve.speed(x), t, t + dt, 1e-14, 30).value;
            t += dt;
            if dt.abs() < 1e-15 * self.curve.period() {
                break;
            }
        }
        math::wrap(t, self.curve.period())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_basics() {
        let c = Circle::new(2.0).unwrap();
        assert!((c.length() - 2.0 * TAU).abs() < 1e-12);
        assert!((c.speed(0.3) - 2.0).abs() < 1e-15);
        let t = c.locate(c.point(1.234), 1e-10).unwrap();
        assert!((t - 1.234).abs() < 1e-10);
    }

    #[test]
    fn ellipse_length_against_series() {
        // Perimeter of an ellipse via Gauss-Kummer series for (a,b)=(1.5,1).
        let e = Ellipse::new(1.5, 1.0).unwrap();
        let h = ((e.a - e.b) / (e.a + e.b)).powi(2);
        let mut series = 1.0 + h / 4.0;
        let mut coeff = 0.25;
        let mut hp = h;
        for n in 2..40 {
            let nf = n as f64;
            coeff *= ((2.0 * nf - 3.0) / (2.0 * nf)).powi(2) * (2.0 * nf - 1.0).powi(2)
                / (2.0 * nf - 3.0).powi(2);
            hp *= h;
            series += coeff * hp / (2.0 * nf - 1.0).powi(2);
        }
        let expected = core::f64::consts::PI * (e.a + e.b) * series;
        assert!(
            (e.length() - expected).abs() < 1e-9,
            "length {} vs series {expected}",
            e.length()
        );
    }

    #[test]
    fn arclength_round_trip() {
        let e = Ellipse::new(1.5, 1.0).unwrap();
        let table = ArclengthTable::new(&e, 256);
        assert!((table.total() - e.length()).abs() < 1e-10);
        for &t in &[0.0, 0.37, 1.0, 2.5, 4.0, 6.0] {
            let s = table.arclength(t);
            let back = table.param_at(s);
            assert!((back - t).abs() < 1e-10, "t={t} s={s} back={back}");
        }
    }
}
