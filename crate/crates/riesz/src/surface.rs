//! Parametric surfaces: tori of revolution, spheres, and the chart plumbing
//! (metric, curvature, chord distances) the integrators consume.

use alloc::boxed::Box;
use alloc::format;

use crate::error::{Error, Result};
use crate::math::{self, PI, TAU};
use crate::vec3::Vec3;

/// Chart rectangle `[u0,u1] x [v0,v1]` with per-axis periodicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartDomain {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub u_periodic: bool,
    pub v_periodic: bool,
}

impl ChartDomain {
    pub const fn doubly_periodic() -> Self {
        ChartDomain {
            u: (0.0, TAU),
            v: (0.0, TAU),
            u_periodic: true,
            v_periodic: true,
        }
    }

    pub fn u_span(&self) -> f64 {
        self.u.1 - self.u.0
    }

    pub fn v_span(&self) -> f64 {
        self.v.1 - self.v.0
    }
}

/// Everything the energies need to know about one surface point.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePointData {
    pub u: f64,
    pub v: f64,
    pub position: Vec3,
    /// Unit normal induced by the chart orientation (`du x dv`).
    pub normal: Vec3,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Gauss curvature `K = kappa1 * kappa2`.
    pub gauss: f64,
    /// Squared curvature deviator `(kappa1 - kappa2)^2`; zero at umbilics.
    pub delta: f64,
    /// `|du p x dv p|`.
    pub area_density: f64,
}

/// A surface given by a single chart over a (partly) periodic rectangle.
///
/// Charts accept any real parameters; periodic axes wrap internally, so
/// callers never have to care about seams.
pub trait Surface: Sync {
    fn chart(&self, u: f64, v: f64) -> Vec3;

    /// Chart value and first partials, exact for the built-in surfaces.
    fn chart_jet(&self, u: f64, v: f64) -> (Vec3, Vec3, Vec3);

    fn domain(&self) -> ChartDomain;

    /// Whether chord distances from a point on the `v = const` meridian have
    /// the `A(u) - B(u) cos(v - v0)` structure of a revolution surface (exact
    /// for similarity images as well). Enables the fast cutoff path.
    fn is_revolution(&self) -> bool {
        false
    }

    /// Closed-form curvature data where available; `None` falls back to
    /// numeric differentiation.
    fn exact_point_data(&self, _u: f64, _v: f64) -> Option<SurfacePointData> {
        None
    }

    /// Largest cutoff radius for which the excluded chord ball is a disk on
    /// the chart, uniformly over base points.
    fn eps_cap(&self) -> f64;

    /// Extent of the surface, used for scale-relative tolerances.
    fn diameter(&self) -> f64;

    /// Uniform length scale (1 for the unit-tube torus and the unit sphere).
    fn length_scale(&self) -> f64 {
        1.0
    }

    fn area_density(&self, u: f64, v: f64) -> f64 {
        let (_, pu, pv) = self.chart_jet(u, v);
        pu.cross(pv).norm()
    }

    /// Curvature + metric data, exact when the surface provides it.
    fn point_data(&self, u: f64, v: f64) -> Result<SurfacePointData> {
        match self.exact_point_data(u, v) {
            Some(d) => Ok(d),
            None => numeric_curvature(self, u, v, 1e-4),
        }
    }

    /// Chart parameters of a point on the surface, or an error when the
    /// chord residual exceeds `tol`.
    fn locate(&self, p: Vec3, tol: f64) -> Result<(f64, f64)> {
        locate_by_search(self, p, tol)
    }
}

/// Torus of revolution about the z axis: generating circle of radius 1 at
/// distance `major` from the axis, times an overall similarity `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevolutionTorus {
    major: f64,
    scale: f64,
}

impl RevolutionTorus {
    /// Requires `major > 1` (embeddedness).
    pub fn new(major: f64) -> Result<Self> {
        Self::with_scale(major, 1.0)
    }

    pub fn with_scale(major: f64, scale: f64) -> Result<Self> {
        if !(major > 1.0) || !major.is_finite() {
            return Err(Error::domain(format!(
                "torus requires center distance R > 1, got {major}"
            )));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::domain(format!("torus scale must be positive, got {scale}")));
        }
        Ok(RevolutionTorus { major, scale })
    }

    pub fn major(&self) -> f64 {
        self.major
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Exact curvature data on the `v = 0` meridian (by symmetry, any `v`).
    pub fn curvature(&self, alpha: f64) -> SurfacePointData {
        self.exact_point_data(alpha, 0.0).unwrap()
    }

    /// Expanded chord form
    /// `2R^2 + 2 + 2R(cos a + cos u) - 2 sin a sin u - 2(R+cos a)(R+cos u) cos v`
    /// between `p(u, v)` and the base point `p(alpha, 0)` (times `scale^2`).
    pub fn chord_dist_sq(&self, alpha: f64, u: f64, v: f64) -> f64 {
        let r = self.major;
        let (sa, ca) = math::sin_cos(alpha);
        let (su, cu) = math::sin_cos(u);
        let d2 = 2.0 * r * r + 2.0 + 2.0 * r * (ca + cu)
            - 2.0 * sa * su
            - 2.0 * (r + ca) * (r + cu) * math::cos(v);
        self.scale * self.scale * d2
    }

    /// Chord form in the substituted variables `t = 2 sin((u-a)/2)`,
    /// `s = 2(R+cos a) sin(v/2)`; valid for `u - a` and `v` in `[-pi, pi]`
    /// (inputs are wrapped to that window).
    pub fn chord_dist_sq_ts(&self, alpha: f64, u: f64, v: f64) -> f64 {
        let r = self.major;
        let (sa, ca) = math::sin_cos(alpha);
        let du = math::wrap_centered(u - alpha, TAU);
        let vw = math::wrap_centered(v, TAU);
        let t = 2.0 * math::sin(0.5 * du);
        let s = 2.0 * (r + ca) * math::sin(0.5 * vw);
        let root = math::sqrt((4.0 - t * t).max(0.0));
        let d2 = t * t + s * s
            - ca / (2.0 * (r + ca)) * t * t * s * s
            - sa / (2.0 * (r + ca)) * s * s * t * root;
        self.scale * self.scale * d2
    }

    /// Chord form in the angle variables `theta = (pi + a - u)/2`,
    /// `phi = (pi - v)/2`. The angular expression equals a quarter of the
    /// squared chord (the substitution halves both chord factors), so it is
    /// rescaled by 4 here to agree with the other two forms.
    pub fn chord_dist_sq_theta_phi(&self, alpha: f64, u: f64, v: f64) -> f64 {
        let r = self.major;
        let (sa, ca) = math::sin_cos(alpha);
        let du = math::wrap_centered(u - alpha, TAU);
        let vw = math::wrap_centered(v, TAU);
        let theta = 0.5 * (PI - du);
        let phi = 0.5 * (PI - vw);
        let (st, ct) = math::sin_cos(theta);
        let cp = math::cos(phi);
        let ra = r + ca;
        let quarter = ct * ct
            + ra * (ra - 2.0 * ca * ct * ct - 2.0 * sa * st.abs() * ct) * cp * cp;
        4.0 * self.scale * self.scale * quarter
    }

    /// `(alpha, v)` of a point on the torus.
    pub fn params_of(&self, p: Vec3) -> (f64, f64) {
        let q = p / self.scale;
        let v = math::atan2(q.y, q.x);
        let rho = math::hypot(q.x, q.y);
        let u = math::atan2(q.z, rho - self.major);
        (math::wrap(u, TAU), math::wrap(v, TAU))
    }
}

impl Surface for RevolutionTorus {
    fn chart(&self, u: f64, v: f64) -> Vec3 {
        let (su, cu) = math::sin_cos(u);
        let (sv, cv) = math::sin_cos(v);
        let ring = self.major + cu;
        self.scale * Vec3::new(ring * cv, ring * sv, su)
    }

    fn chart_jet(&self, u: f64, v: f64) -> (Vec3, Vec3, Vec3) {
        let (su, cu) = math::sin_cos(u);
        let (sv, cv) = math::sin_cos(v);
        let ring = self.major + cu;
        let p = self.scale * Vec3::new(ring * cv, ring * sv, su);
        let pu = self.scale * Vec3::new(-su * cv, -su * sv, cu);
        let pv = self.scale * Vec3::new(-ring * sv, ring * cv, 0.0);
        (p, pu, pv)
    }

    fn domain(&self) -> ChartDomain {
        ChartDomain::doubly_periodic()
    }

    fn is_revolution(&self) -> bool {
        true
    }

    fn exact_point_data(&self, u: f64, v: f64) -> Option<SurfacePointData> {
        let (su, cu) = math::sin_cos(u);
        let (sv, cv) = math::sin_cos(v);
        let ring = self.major + cu;
        let s = self.scale;
        let kappa1 = 1.0 / s;
        let kappa2 = cu / (s * ring);
        let dk = (kappa1 - kappa2) * (kappa1 - kappa2);
        Some(SurfacePointData {
            u,
            v,
            position: self.chart(u, v),
            normal: Vec3::new(-cu * cv, -cu * sv, -su),
            kappa1,
            kappa2,
            gauss: kappa1 * kappa2,
            delta: dk,
            area_density: s * s * ring,
        })
    }

    fn eps_cap(&self) -> f64 {
        // The excluded ball stays a chart disk while eps is below the tube
        // diameter and below the gap across the hole.
        self.scale * (2.0 * (self.major - 1.0)).min(1.0) * 0.95
    }

    fn diameter(&self) -> f64 {
        2.0 * self.scale * (self.major + 1.0)
    }

    fn length_scale(&self) -> f64 {
        self.scale
    }

    fn locate(&self, p: Vec3, tol: f64) -> Result<(f64, f64)> {
        let (u, v) = self.params_of(p);
        let residual = self.chart(u, v).dist(p);
        if residual <= tol {
            Ok((u, v))
        } else {
            Err(Error::PointNotOnSurface { residual })
        }
    }
}

/// Round sphere, latitude/longitude chart (`u` latitude, `v` longitude).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    radius: f64,
    center: Vec3,
}

impl Sphere {
    pub fn new(radius: f64) -> Result<Self> {
        Self::centered(radius, Vec3::ZERO)
    }

    pub fn centered(radius: f64, center: Vec3) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(Sphere { radius, center })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }
}

impl Surface for Sphere {
    fn chart(&self, u: f64, v: f64) -> Vec3 {
        let (su, cu) = math::sin_cos(u);
        let (sv, cv) = math::sin_cos(v);
        self.center + self.radius * Vec3::new(cu * cv, cu * sv, su)
    }

    fn chart_jet(&self, u: f64, v: f64) -> (Vec3, Vec3, Vec3) {
        let (su, cu) = math::sin_cos(u);
        let (sv, cv) = math::sin_cos(v);
        let p = self.center + self.radius * Vec3::new(cu * cv, cu * sv, su);
        let pu = self.radius * Vec3::new(-su * cv, -su * sv, cu);
        let pv = self.radius * Vec3::new(-cu * sv, cu * cv, 0.0);
        (p, pu, pv)
    }

    fn domain(&self) -> ChartDomain {
        ChartDomain {
            u: (-0.5 * PI, 0.5 * PI),
            v: (0.0, TAU),
            u_periodic: false,
            v_periodic: true,
        }
    }

    fn is_revolution(&self) -> bool {
        true
    }

    fn exact_point_data(&self, u: f64, v: f64) -> Option<SurfacePointData> {
        let (su, cu) = math::sin_cos(u);
        let (sv, cv) = math::sin_cos(v);
        let k = 1.0 / self.radius;
        Some(SurfacePointData {
            u,
            v,
            position: self.chart(u, v),
            normal: Vec3::new(-cu * cv, -cu * sv, -su),
            kappa1: k,
            kappa2: k,
            gauss: k * k,
            delta: 0.0,
            area_density: self.radius * self.radius * cu,
        })
    }

    fn eps_cap(&self) -> f64 {
        self.radius
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn length_scale(&self) -> f64 {
        self.radius
    }

    fn locate(&self, p: Vec3, tol: f64) -> Result<(f64, f64)> {
        let q = (p - self.center) / self.radius;
        let u = math::atan2(q.z, math::hypot(q.x, q.y));
        let v = math::wrap(math::atan2(q.y, q.x), TAU);
        let residual = self.chart(u, v).dist(p);
        if residual <= tol {
            Ok((u, v))
        } else {
            Err(Error::PointNotOnSurface { residual })
        }
    }
}

/// First and second fundamental forms by central differences with one
/// Richardson level. `step` is a fraction of the domain span (default 1e-4);
/// it must lie in `(0, 1e-2]`.
pub fn numeric_curvature<S: Surface + ?Sized>(
    surface: &S,
    u: f64,
    v: f64,
    step: f64,
) -> Result<SurfacePointData> {
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::domain(format!(
            "numeric curvature step must be in (0, 1e-2], got {step}"
        )));
    }
    let dom = surface.domain();
    let hu = step * dom.u_span();
    let hv = step * dom.v_span();

    let deriv = |hu: f64, hv: f64| -> (Vec3, Vec3, Vec3, Vec3, Vec3) {
        let pc = surface.chart(u, v);
        let pu_p = surface.chart(u + hu, v);
        let pu_m = surface.chart(u - hu, v);
        let pv_p = surface.chart(u, v + hv);
        let pv_m = surface.chart(u, v - hv);
        let ppp = surface.chart(u + hu, v + hv);
        let ppm = surface.chart(u + hu, v - hv);
        let pmp = surface.chart(u - hu, v + hv);
        let pmm = surface.chart(u - hu, v - hv);
        let du = (pu_p - pu_m) / (2.0 * hu);
        let dv = (pv_p - pv_m) / (2.0 * hv);
        let duu = (pu_p - 2.0 * pc + pu_m) / (hu * hu);
        let dvv = (pv_p - 2.0 * pc + pv_m) / (hv * hv);
        let duv = (ppp - ppm - pmp + pmm) / (4.0 * hu * hv);
        (du, dv, duu, dvv, duv)
    };

    // One Richardson level: (4 D_{h/2} - D_h) / 3 cancels the h^2 term.
    let coarse = deriv(hu, hv);
    let fine = deriv(0.5 * hu, 0.5 * hv);
    let rich = |c: Vec3, f: Vec3| (4.0 * f - c) / 3.0;
    let pu = rich(coarse.0, fine.0);
    let pv = rich(coarse.1, fine.1);
    let puu = rich(coarse.2, fine.2);
    let pvv = rich(coarse.3, fine.3);
    let puv = rich(coarse.4, fine.4);

    let cross = pu.cross(pv);
    let area_density = cross.norm();
    let scale2 = pu.norm_sq().max(pv.norm_sq());
    if area_density <= 1e-12 * scale2.max(1e-300) {
        return Err(Error::DegenerateChart { u, v, area_density });
    }
    let normal = cross / area_density;

    let ee = pu.dot(pu);
    let ff = pu.dot(pv);
    let gg = pv.dot(pv);
    let le = puu.dot(normal);
    let lf = puv.dot(normal);
    let lg = pvv.dot(normal);
    let det = ee * gg - ff * ff;
    let gauss = (le * lg - lf * lf) / det;
    let mean = (le * gg - 2.0 * lf * ff + lg * ee) / (2.0 * det);
    let delta = 4.0 * (mean * mean - gauss).max(0.0);
    let half = math::sqrt(delta) * 0.5;

    Ok(SurfacePointData {
        u,
        v,
        position: surface.chart(u, v),
        normal,
        kappa1: mean + half,
        kappa2: mean - half,
        gauss,
        delta,
        area_density,
    })
}

/// Coarse grid scan followed by Gauss-Newton on the squared chord distance.
fn locate_by_search<S: Surface + ?Sized>(surface: &S, p: Vec3, tol: f64) -> Result<(f64, f64)> {
    let dom = surface.domain();
    let n = 64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..n {
        let u = dom.u.0 + (i as f64 + 0.5) / n as f64 * dom.u_span();
        for j in 0..n {
            let v = dom.v.0 + (j as f64 + 0.5) / n as f64 * dom.v_span();
            let d2 = surface.chart(u, v).dist_sq(p);
            if d2 < best.0 {
                best = (d2, u, v);
            }
        }
    }
    let (mut u, mut v) = (best.1, best.2);
    for _ in 0..60 {
        let (q, pu, pv) = surface.chart_jet(u, v);
        let r = q - p;
        // Normal equations of the 3x2 Jacobian.
        let a = pu.dot(pu);
        let b = pu.dot(pv);
        let c = pv.dot(pv);
        let g1 = pu.dot(r);
        let g2 = pv.dot(r);
        let det = a * c - b * b;
        if det.abs() < 1e-300 {
            break;
        }
        let du = (c * g1 - b * g2) / det;
        let dv = (a * g2 - b * g1) / det;
        u -= du;
        v -= dv;
        if du.abs() + dv.abs() < 1e-15 * (1.0 + u.abs() + v.abs()) {
            break;
        }
    }
    let residual = surface.chart(u, v).dist(p);
    if residual <= tol {
        if dom.u_periodic {
            u = dom.u.0 + math::wrap(u - dom.u.0, dom.u_span());
        }
        if dom.v_periodic {
            v = dom.v.0 + math::wrap(v - dom.v.0, dom.v_span());
        }
        Ok((u, v))
    } else {
        Err(Error::PointNotOnSurface { residual })
    }
}

/// Boxed-closure surface for charts composed at runtime.
pub struct ChartSurface {
    pub(crate) jet: Box<dyn Fn(f64, f64) -> (Vec3, Vec3, Vec3) + Sync + Send>,
    pub(crate) domain: ChartDomain,
    pub(crate) revolution: bool,
    pub(crate) eps_cap: f64,
    pub(crate) diameter: f64,
    pub(crate) length_scale: f64,
}

impl Surface for ChartSurface {
    fn chart(&self, u: f64, v: f64) -> Vec3 {
        (self.jet)(u, v).0
    }

    fn chart_jet(&self, u: f64, v: f64) -> (Vec3, Vec3, Vec3) {
        (self.jet)(u, v)
    }

    fn domain(&self) -> ChartDomain {
        self.domain
    }

    fn is_revolution(&self) -> bool {
        self.revolution
    }

    fn eps_cap(&self) -> f64 {
        self.eps_cap
    }

    fn diameter(&self) -> f64 {
        self.diameter
    }

    fn length_scale(&self) -> f64 {
        self.length_scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = core::f64::consts::SQRT_2;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn chart_examples() {
        let t = RevolutionTorus::new(2.0).unwrap();
        let p = t.chart(0.0, 0.0);
        assert!(p.dist(Vec3::new(3.0, 0.0, 0.0)) < 1e-15);
        let p = t.chart(PI, 0.0);
        assert!(p.dist(Vec3::new(1.0, 0.0, 0.0)) < 1e-15);
        let t = RevolutionTorus::with_scale(SQRT2, 2.0).unwrap();
        let p = t.chart(0.0, 0.5 * PI);
        assert!(p.dist(Vec3::new(0.0, 2.0 * (SQRT2 + 1.0), 0.0)) < 1e-14);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(RevolutionTorus::new(1.0).is_err());
        assert!(RevolutionTorus::new(0.5).is_err());
        assert!(RevolutionTorus::with_scale(2.0, 0.0).is_err());
        assert!(Sphere::new(-1.0).is_err());
    }

    #[test]
    fn chord_examples() {
        let t = RevolutionTorus::new(2.0).unwrap();
        assert!(t.chord_dist_sq(0.7, 0.7, 0.0).abs() < 1e-12);
        assert!((t.chord_dist_sq(0.0, PI, 0.0) - 4.0).abs() < 1e-12);
        assert!((t.chord_dist_sq(0.0, 0.0, PI) - 36.0).abs() < 1e-12);
    }

    #[test]
    fn chord_forms_agree() {
        // Expanded, (t,s), and (theta,phi) forms across the shared window.
        let mut rng = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        for &r in &[1.1, 1.5, SQRT2, 2.0, 3.0] {
            let t = RevolutionTorus::new(r).unwrap();
            for _ in 0..100 {
                let alpha = next() * TAU;
                let u = alpha + (next() - 0.5) * TAU; // u - alpha in [-pi, pi)
                let v = (next() - 0.5) * TAU;
                let a = t.chord_dist_sq(alpha, u, v);
                let b = t.chord_dist_sq_ts(alpha, u, v);
                let c = t.chord_dist_sq_theta_phi(alpha, u, v);
                assert!(rel_close(a, b, 1e-10), "ts form: R={r} a={alpha} u={u} v={v}: {a} vs {b}");
                assert!(rel_close(a, c, 1e-10), "tp form: R={r} a={alpha} u={u} v={v}: {a} vs {c}");
                let direct = t.chart(u, v).dist_sq(t.chart(alpha, 0.0));
                assert!(rel_close(a, direct, 1e-9), "direct: {a} vs {direct}");
            }
        }
    }

    #[test]
    fn torus_curvature_closed_forms() {
        let t = RevolutionTorus::new(2.0).unwrap();
        let d = t.curvature(0.5 * PI);
        assert!(d.gauss.abs() < 1e-15);
        assert!((d.delta - 1.0).abs() < 1e-15);
        let d = t.curvature(PI);
        assert!((d.gauss + 1.0).abs() < 1e-15);
        assert!((d.delta - 4.0).abs() < 1e-15);

        let t = RevolutionTorus::new(SQRT2).unwrap();
        let d = t.curvature(0.0);
        let ra = SQRT2 + 1.0;
        assert!(rel_close(d.gauss, 1.0 / ra, 1e-14));
        assert!(rel_close(d.delta, 2.0 / (ra * ra), 1e-14));
        // Spot values quoted to 6 digits.
        assert!((d.gauss - 0.414214).abs() < 1e-6);
        assert!((d.delta - 0.343146).abs() < 1e-6);
    }

    #[test]
    fn curvature_identities_hold() {
        let t = RevolutionTorus::with_scale(1.7, 0.6).unwrap();
        for i in 0..17 {
            let d = t.curvature(i as f64 * TAU / 17.0);
            assert!(rel_close(d.gauss, d.kappa1 * d.kappa2, 1e-10));
            assert!(rel_close(d.delta, (d.kappa1 - d.kappa2) * (d.kappa1 - d.kappa2), 1e-10));
            assert!(d.delta >= 0.0);
        }
    }

    #[test]
    fn numeric_curvature_sphere() {
        let s = Sphere::new(1.0).unwrap();
        let d = numeric_curvature(&s, 1.0, 0.5, 1e-4).unwrap();
        assert!(d.delta.abs() < 1e-8);
        assert!((d.kappa1 - 1.0).abs() < 1e-8);
        assert!((d.kappa2 - 1.0).abs() < 1e-8);
        let s = Sphere::new(3.0).unwrap();
        let d = numeric_curvature(&s, -0.4, 2.0, 1e-4).unwrap();
        assert!((d.kappa1 - 1.0 / 3.0).abs() < 1e-8);
        assert!(d.delta.abs() < 1e-8);
    }

    #[test]
    fn numeric_curvature_matches_torus() {
        let t = RevolutionTorus::new(2.0).unwrap();
        let d = numeric_curvature(&t, 0.5 * PI, 0.0, 1e-4).unwrap();
        assert!(d.gauss.abs() < 1e-8);

        for &r in &[1.2, SQRT2, 2.0, 3.0] {
            let t = RevolutionTorus::new(r).unwrap();
            for i in 0..8 {
                let alpha = i as f64 * TAU / 8.0;
                let exact = t.curvature(alpha);
                let num = numeric_curvature(&t, alpha, 0.3, 1e-4).unwrap();
                assert!(rel_close(num.kappa1, exact.kappa1, 1e-6));
                assert!(rel_close(num.kappa2, exact.kappa2, 1e-6));
                assert!(rel_close(num.gauss, exact.gauss, 1e-6), "K at R={r} alpha={alpha}");
                if exact.delta > 1e-12 {
                    assert!(rel_close(num.delta, exact.delta, 1e-6));
                }
            }
        }
        // The derived example: T_sqrt2 at alpha = 0.
        let t = RevolutionTorus::new(SQRT2).unwrap();
        let num = numeric_curvature(&t, 0.0, 0.0, 1e-4).unwrap();
        assert!((num.delta - 0.343146).abs() < 1e-6);
    }

    #[test]
    fn scaling_covariance() {
        let base = RevolutionTorus::new(2.0).unwrap();
        let scaled = RevolutionTorus::with_scale(2.0, 2.0).unwrap();
        for i in 0..9 {
            let alpha = i as f64 * TAU / 9.0;
            let a = base.curvature(alpha);
            let b = scaled.curvature(alpha);
            assert!(rel_close(b.area_density, 4.0 * a.area_density, 1e-14));
            assert!(rel_close(b.gauss, a.gauss / 4.0, 1e-14));
            if a.delta > 0.0 {
                assert!(rel_close(b.delta, a.delta / 4.0, 1e-14));
            }
        }
    }

    #[test]
    fn periodic_seam_is_invisible() {
        let t = RevolutionTorus::new(2.0).unwrap();
        let d = t.domain();
        assert!(d.u_periodic && d.v_periodic);
        for k in 0..7 {
            let v = k as f64;
            assert!(t.chart(0.0, v).dist(t.chart(TAU, v)) < 1e-12 * t.diameter());
            assert!(t.chart(v, 0.0).dist(t.chart(v, TAU)) < 1e-12 * t.diameter());
            assert!(t.chart(v, -3.0 * TAU).dist(t.chart(v, 3.0 * TAU)) < 1e-12);
        }
    }

    #[test]
    fn locate_round_trip() {
        let t = RevolutionTorus::with_scale(1.8, 1.3).unwrap();
        let p = t.chart(2.1, 4.4);
        let (u, v) = t.locate(p, 1e-9).unwrap();
        assert!(t.chart(u, v).dist(p) < 1e-12);
        assert!(t.locate(Vec3::new(50.0, 0.0, 0.0), 1e-9).is_err());

        let s = Sphere::new(2.5).unwrap();
        let p = s.chart(0.3, 1.0);
        let (u, v) = s.locate(p, 1e-9).unwrap();
        assert!(s.chart(u, v).dist(p) < 1e-12);
    }
}
