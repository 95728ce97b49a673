//! Moebius transformations of R^3 (similarities and sphere inversions),
//! their action on chart surfaces, stereographic projection of the Clifford
//! torus, and energy-invariance experiments.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::error::{Error, Result};
use crate::math::{self, TAU};
use crate::renorm::{self, EnergyReport, RenormConfig};
use crate::surface::{ChartSurface, Surface};
use crate::vec3::Vec3;

/// Row-major 3x3 matrix; only rotations are ever stored here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    pub rows: [Vec3; 3],
}

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3 {
        rows: [
            Vec3 { x: 1.0, y: 0.0, z: 0.0 },
            Vec3 { x: 0.0, y: 1.0, z: 0.0 },
            Vec3 { x: 0.0, y: 0.0, z: 1.0 },
        ],
    };

    pub fn apply(&self, v: Vec3) -> Vec3 {
        Vec3::new(self.rows[0].dot(v), self.rows[1].dot(v), self.rows[2].dot(v))
    }

    /// Rodrigues rotation about `axis` by `angle`.
    pub fn rotation(axis: Vec3, angle: f64) -> Mat3 {
        let n = axis.normalized();
        let (s, c) = math::sin_cos(angle);
        let t = 1.0 - c;
        Mat3 {
            rows: [
                Vec3::new(t * n.x * n.x + c, t * n.x * n.y - s * n.z, t * n.x * n.z + s * n.y),
                Vec3::new(t * n.x * n.y + s * n.z, t * n.y * n.y + c, t * n.y * n.z - s * n.x),
                Vec3::new(t * n.x * n.z - s * n.y, t * n.y * n.z + s * n.x, t * n.z * n.z + c),
            ],
        }
    }
}

/// A Moebius transformation of R^3.
#[derive(Debug, Clone)]
pub enum MoebiusMap {
    /// `p -> scale * R p + translation`.
    Similarity { rotation: Mat3, scale: f64, translation: Vec3 },
    /// Sphere inversion `p -> center + radius^2 (p - center)/|p - center|^2`.
    Inversion { center: Vec3, radius: f64 },
    /// Right-to-left composition (last entry applied first).
    Composition(Vec<MoebiusMap>),
}

impl MoebiusMap {
    pub fn identity() -> Self {
        MoebiusMap::Similarity { rotation: Mat3::IDENTITY, scale: 1.0, translation: Vec3::ZERO }
    }

    pub fn scaling(scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::domain(format!("similarity scale must be positive, got {scale}")));
        }
        Ok(MoebiusMap::Similarity { rotation: Mat3::IDENTITY, scale, translation: Vec3::ZERO })
    }

    pub fn inversion(center: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::domain(format!("inversion radius must be positive, got {radius}")));
        }
        Ok(MoebiusMap::Inversion { center, radius })
    }

    pub fn is_similarity(&self) -> bool {
        match self {
            MoebiusMap::Similarity { .. } => true,
            MoebiusMap::Inversion { .. } => false,
            MoebiusMap::Composition(list) => list.iter().all(|m| m.is_similarity()),
        }
    }

    /// Image of `p`; errors within `1e-12 * radius` of an inversion center.
    pub fn apply(&self, p: Vec3) -> Result<Vec3> {
        match self {
            MoebiusMap::Similarity { rotation, scale, translation } => {
                Ok(*scale * rotation.apply(p) + *translation)
            }
            MoebiusMap::Inversion { center, radius } => {
                let q = p - *center;
                let d2 = q.norm_sq();
                if d2 <= (1e-12 * radius) * (1e-12 * radius) {
                    return Err(Error::SingularPoint);
                }
                Ok(*center + q * (radius * radius / d2))
            }
            MoebiusMap::Composition(list) => {
                let mut x = p;
                for m in list.iter().rev() {
                    x = m.apply(x)?;
                }
                Ok(x)
            }
        }
    }

    /// Image point together with the pushforward of two tangent vectors.
    pub fn apply_jet(&self, p: Vec3, t1: Vec3, t2: Vec3) -> (Vec3, Vec3, Vec3) {
        match self {
            MoebiusMap::Similarity { rotation, scale, translation } => (
                *scale * rotation.apply(p) + *translation,
                *scale * rotation.apply(t1),
                *scale * rotation.apply(t2),
            ),
            MoebiusMap::Inversion { center, radius } => {
                let q = p - *center;
                let d2 = q.norm_sq();
                let k = radius * radius / d2;
                // D inversion = k (Id - 2 qq^T / |q|^2).
                let push = |v: Vec3| k * (v - q * (2.0 * q.dot(v) / d2));
                (*center + q * k, push(t1), push(t2))
            }
            MoebiusMap::Composition(list) => {
                let mut state = (p, t1, t2);
                for m in list.iter().rev() {
                    state = m.apply_jet(state.0, state.1, state.2);
                }
                state
            }
        }
    }

    fn similarity_scale(&self) -> f64 {
        match self {
            MoebiusMap::Similarity { scale, .. } => *scale,
            MoebiusMap::Inversion { .. } => 1.0,
            MoebiusMap::Composition(list) => list.iter().map(|m| m.similarity_scale()).product(),
        }
    }
}

/// Moebius image of a chart surface: the new chart is `map . chart`, with
/// exact first derivatives through the map's differential. Curvature data on
/// the image always comes from numeric differentiation of the composed
/// chart.
pub fn compose_surface<S>(base: S, map: MoebiusMap) -> Result<ChartSurface>
where
    S: Surface + Send + Sync + 'static,
{
    let scan = 64;
    let dom = base.domain();

    // Inversion centers must stay clear of the surface.
    let mut min_center_dist = f64::INFINITY;
    collect_inversion_centers(&map, &mut |center| {
        for i in 0..scan {
            let u = dom.u.0 + dom.u_span() * (i as f64 + 0.5) / scan as f64;
            for j in 0..scan {
                let v = dom.v.0 + dom.v_span() * (j as f64 + 0.5) / scan as f64;
                min_center_dist = min_center_dist.min(base.chart(u, v).dist(center));
            }
        }
    });
    let required = 1e-3 * base.diameter();
    if min_center_dist < required {
        return Err(Error::CenterOnSurface { min_dist: min_center_dist, required });
    }

    let revolution = base.is_revolution() && map.is_similarity();
    let length_scale_guess = base.length_scale() * map.similarity_scale();

    let base = Arc::new(base);
    let map = Arc::new(map);
    let jet = {
        let base = Arc::clone(&base);
        let map = Arc::clone(&map);
        move |u: f64, v: f64| {
            let (p, pu, pv) = base.chart_jet(u, v);
            map.apply_jet(p, pu, pv)
        }
    };

    // Geometry probes on the composed chart: diameter, eps cap, scale.
    let mut points = Vec::with_capacity(scan * scan);
    for i in 0..scan {
        let u = dom.u.0 + dom.u_span() * (i as f64 + 0.5) / scan as f64;
        for j in 0..scan {
            let v = dom.v.0 + dom.v_span() * (j as f64 + 0.5) / scan as f64;
            points.push(jet(u, v).0);
        }
    }
    let mut centroid = Vec3::ZERO;
    for p in &points {
        centroid = centroid + *p;
    }
    let centroid = centroid / points.len() as f64;
    let mut radius = 0.0f64;
    for p in &points {
        radius = radius.max(p.dist(centroid));
    }
    let diameter = 2.0 * radius;

    let eps_cap = if map.is_similarity() {
        base.eps_cap() * map.similarity_scale()
    } else {
        estimate_eps_cap(&points, scan, &jet, &dom)
    };
    let length_scale = if map.is_similarity() {
        length_scale_guess
    } else {
        length_scale_guess * diameter / base.diameter().max(1e-300)
    };

    Ok(ChartSurface {
        jet: Box::new(jet),
        domain: dom,
        revolution,
        eps_cap,
        diameter,
        length_scale,
    })
}

fn collect_inversion_centers(map: &MoebiusMap, f: &mut impl FnMut(Vec3)) {
    match map {
        MoebiusMap::Similarity { .. } => {}
        MoebiusMap::Inversion { center, .. } => f(*center),
        MoebiusMap::Composition(list) => {
            // Only the innermost map acts on the original surface; centers of
            // later stages would need pulled-back positions. The experiments
            // here compose at most one inversion, so check them all against
            // the base chart conservatively.
            for m in list {
                collect_inversion_centers(m, f);
            }
        }
    }
}

/// Largest cutoff radius that keeps chord balls chart-local, from a pair
/// scan (far-sheet proximity) and a curvature scan (reach).
fn estimate_eps_cap(
    points: &[Vec3],
    scan: usize,
    jet: &(impl Fn(f64, f64) -> (Vec3, Vec3, Vec3) + Sync),
    dom: &crate::surface::ChartDomain,
) -> f64 {
    // Pair scan: chord distances between chart-distant grid points.
    let sep = 8isize;
    let mut min_far = f64::INFINITY;
    let n = scan as isize;
    for a in 0..points.len() {
        let (ia, ja) = ((a / scan) as isize, (a % scan) as isize);
        for b in (a + 1)..points.len() {
            let (ib, jb) = ((b / scan) as isize, (b % scan) as isize);
            let di = (ia - ib).rem_euclid(n).min((ib - ia).rem_euclid(n));
            let dj = (ja - jb).rem_euclid(n).min((jb - ja).rem_euclid(n));
            if di >= sep || dj >= sep {
                let d = points[a].dist_sq(points[b]);
                if d < min_far {
                    min_far = d;
                }
            }
        }
    }
    let min_far = math::sqrt(min_far);

    // Curvature reach on a coarser grid.
    let mut max_kappa: f64 = 0.0;
    let m = 24;
    for i in 0..m {
        let u = dom.u.0 + dom.u_span() * (i as f64 + 0.5) / m as f64;
        for j in 0..m {
            let v = dom.v.0 + dom.v_span() * (j as f64 + 0.5) / m as f64;
            let h = 1e-4 * dom.u_span();
            // Crude normal-curvature probe along both axes.
            let (p0, pu, pv) = jet(u, v);
            let nrm = pu.cross(pv).normalized();
            let (pu1, _, _) = jet(u + h, v);
            let (pu2, _, _) = jet(u - h, v);
            let (pv1, _, _) = jet(u, v + h);
            let (pv2, _, _) = jet(u, v - h);
            let duu = (pu1 - 2.0 * p0 + pu2) / (h * h);
            let dvv = (pv1 - 2.0 * p0 + pv2) / (h * h);
            let k_u = duu.dot(nrm).abs() / pu.norm_sq();
            let k_v = dvv.dot(nrm).abs() / pv.norm_sq();
            max_kappa = max_kappa.max(k_u).max(k_v);
        }
    }
    let reach = if max_kappa > 0.0 { 1.9 / max_kappa } else { f64::INFINITY };
    0.85 * min_far.min(reach)
}

/// Runs the energy pipeline on a surface and its Moebius image and reports
/// the relative deviation (zero in exact arithmetic, by conformal
/// invariance).
pub struct InvarianceReport {
    pub before: EnergyReport,
    pub after: EnergyReport,
    pub rel_deviation: f64,
}

pub fn invariance_experiment<S>(
    surface: &S,
    map: MoebiusMap,
    cfg: &RenormConfig,
) -> Result<InvarianceReport>
where
    S: Surface + Clone + Send + Sync + 'static,
{
    let before = renorm::surface_energy(surface, cfg)?;
    let composed = compose_surface(surface.clone(), map)?;
    let after = renorm::surface_energy(&composed, cfg)?;
    let rel_deviation = (after.value - before.value).abs() / before.value.abs().max(1e-300);
    Ok(InvarianceReport { before, after, rel_deviation })
}

// ---------------------------------------------------------------------------
// Clifford torus projection and the torus fit.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec4 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl Vec4 {
    pub const fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Vec4 { x, y, z, w }
    }

    pub fn dot(self, o: Vec4) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z + self.w * o.w
    }

    pub fn norm(self) -> f64 {
        math::sqrt(self.dot(self))
    }

    fn sub_scaled(self, o: Vec4, s: f64) -> Vec4 {
        Vec4::new(self.x - s * o.x, self.y - s * o.y, self.z - s * o.z, self.w - s * o.w)
    }

    fn scale(self, s: f64) -> Vec4 {
        Vec4::new(s * self.x, s * self.y, s * self.z, s * self.w)
    }
}

/// Clifford torus point `(cos a, sin a, cos b, sin b)/sqrt(2)`.
pub fn clifford_point(a: f64, b: f64) -> Vec4 {
    let inv = 1.0 / math::sqrt(2.0);
    let (sa, ca) = math::sin_cos(a);
    let (sb, cb) = math::sin_cos(b);
    Vec4::new(inv * ca, inv * sa, inv * cb, inv * sb)
}

/// Whether a unit 4-vector lies on the Clifford torus.
pub fn pole_on_torus(pole: Vec4) -> bool {
    let r1 = math::hypot(pole.x, pole.y);
    let r2 = math::hypot(pole.z, pole.w);
    let inv = 1.0 / math::sqrt(2.0);
    (r1 - inv).abs() < 1e-9 && (r2 - inv).abs() < 1e-9
}

/// Stereographic projection of the Clifford torus from `pole` into R^3,
/// sampled on an `n x n` parameter grid.
pub fn clifford_projection_samples(pole: Vec4, n: usize) -> Result<Vec<Vec3>> {
    let pole = pole.scale(1.0 / pole.norm());
    if pole_on_torus(pole) {
        return Err(Error::PoleOnTorus);
    }
    // Orthonormal basis with e4 = pole (deterministic Gram-Schmidt over the
    // standard axes, skipping the most-parallel one).
    let axes = [
        Vec4::new(1.0, 0.0, 0.0, 0.0),
        Vec4::new(0.0, 1.0, 0.0, 0.0),
        Vec4::new(0.0, 0.0, 1.0, 0.0),
        Vec4::new(0.0, 0.0, 0.0, 1.0),
    ];
    let mut basis: Vec<Vec4> = vec![pole];
    for ax in axes {
        if basis.len() == 4 {
            break;
        }
        let mut v = ax;
        for b in &basis {
            v = v.sub_scaled(*b, v.dot(*b));
        }
        let n = v.norm();
        if n > 1e-6 {
            basis.push(v.scale(1.0 / n));
        }
    }
    debug_assert_eq!(basis.len(), 4);
    let (e4, e1, e2, e3) = (basis[0], basis[1], basis[2], basis[3]);

    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let a = TAU * (i as f64 + 0.37) / n as f64;
        for j in 0..n {
            let b = TAU * (j as f64 + 0.61) / n as f64;
            let q = clifford_point(a, b);
            let denom = 1.0 - q.dot(e4);
            out.push(Vec3::new(q.dot(e1), q.dot(e2), q.dot(e3)) / denom);
        }
    }
    Ok(out)
}

/// A torus of revolution fitted to point samples.
#[derive(Debug, Clone)]
pub struct TorusFit {
    pub center: Vec3,
    pub axis: Vec3,
    pub major_radius: f64,
    pub tube_radius: f64,
    /// `major_radius / tube_radius`: the similarity invariant.
    pub ratio: f64,
    pub max_residual: f64,
}

/// Fits `(center, axis, R, r)` to samples of a torus of revolution by
/// Gauss-Newton on the tube residual `|(rho, z)-(R, 0)| - r`.
pub fn fit_torus(samples: &[Vec3]) -> Result<TorusFit> {
    if samples.len() < 16 {
        return Err(Error::domain("torus fit needs at least 16 samples"));
    }
    let n = samples.len() as f64;
    let mut centroid = Vec3::ZERO;
    for p in samples {
        centroid = centroid + *p;
    }
    let centroid = centroid / n;

    // Covariance; the axis of an R > 1 torus is the flattest direction.
    let mut cov = [[0.0f64; 3]; 3];
    for p in samples {
        let q = *p - centroid;
        let q = [q.x, q.y, q.z];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += q[i] * q[j] / n;
            }
        }
    }
    let axis0 = smallest_eigenvector(cov);

    // Initial radii from the axial profile.
    let mut rho_mean = 0.0;
    for p in samples {
        let q = *p - centroid;
        let z = q.dot(axis0);
        rho_mean += math::sqrt((q.norm_sq() - z * z).max(0.0));
    }
    rho_mean /= n;
    let mut r_mean = 0.0;
    for p in samples {
        let q = *p - centroid;
        let z = q.dot(axis0);
        let rho = math::sqrt((q.norm_sq() - z * z).max(0.0));
        r_mean += math::hypot(rho - rho_mean, z);
    }
    r_mean /= n;

    // Parameter vector: (cx, cy, cz, dx, dy, dz, R, r).
    let mut params = [
        centroid.x, centroid.y, centroid.z, axis0.x, axis0.y, axis0.z, rho_mean, r_mean,
    ];

    let residuals = |p: &[f64; 8], out: &mut Vec<f64>| {
        out.clear();
        let c = Vec3::new(p[0], p[1], p[2]);
        let d = Vec3::new(p[3], p[4], p[5]).normalized();
        for s in samples {
            let q = *s - c;
            let z = q.dot(d);
            let rho = math::sqrt((q.norm_sq() - z * z).max(0.0));
            out.push(math::hypot(rho - p[6], z) - p[7]);
        }
    };

    let mut res = Vec::new();
    let mut res_pert = Vec::new();
    for _ in 0..60 {
        residuals(&params, &mut res);
        // Numeric Jacobian, normal equations.
        let m = samples.len();
        let mut jt_j = [0.0f64; 64];
        let mut jt_r = [0.0f64; 8];
        let mut jac = vec![0.0f64; m * 8];
        let scale_of = |k: usize| if k < 3 { 1e-7 * (1.0 + params[k].abs()) } else { 1e-7 };
        for k in 0..8 {
            let h = scale_of(k);
            let mut p_plus = params;
            p_plus[k] += h;
            residuals(&p_plus, &mut res_pert);
            for i in 0..m {
                jac[i * 8 + k] = (res_pert[i] - res[i]) / h;
            }
        }
        for i in 0..m {
            for a in 0..8 {
                jt_r[a] += jac[i * 8 + a] * res[i];
                for b in 0..8 {
                    jt_j[a * 8 + b] += jac[i * 8 + a] * jac[i * 8 + b];
                }
            }
        }
        // Tikhonov floor keeps the axis-norm null direction harmless.
        for a in 0..8 {
            jt_j[a * 8 + a] += 1e-12;
        }
        let step = match crate::linalg::solve_square(&jt_j, &jt_r, 8) {
            Some(s) => s,
            None => break,
        };
        let mut max_step = 0.0f64;
        for k in 0..8 {
            params[k] -= step[k];
            max_step = max_step.max(step[k].abs());
        }
        // Re-normalize the axis direction.
        let d = Vec3::new(params[3], params[4], params[5]).normalized();
        params[3] = d.x;
        params[4] = d.y;
        params[5] = d.z;
        if max_step < 1e-14 {
            break;
        }
    }

    residuals(&params, &mut res);
    let max_residual = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let (major, tube) = (params[6], params[7]);
    if !(major > 0.0 && tube > 0.0) {
        return Err(Error::domain("torus fit collapsed"));
    }
    Ok(TorusFit {
        center: Vec3::new(params[0], params[1], params[2]),
        axis: Vec3::new(params[3], params[4], params[5]),
        major_radius: major,
        tube_radius: tube,
        ratio: major / tube,
        max_residual,
    })
}

fn smallest_eigenvector(mut a: [[f64; 3]; 3]) -> Vec3 {
    // Jacobi sweeps on the symmetric 3x3.
    let mut v = [[0.0f64; 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..50 {
        // Largest off-diagonal element.
        let (mut p, mut q, mut max) = (0, 1, 0.0f64);
        for i in 0..3 {
            for j in i + 1..3 {
                if a[i][j].abs() > max {
                    max = a[i][j].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if max < 1e-15 {
            break;
        }
        let theta = 0.5 * math::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
        let (s, c) = math::sin_cos(theta);
        for k in 0..3 {
            let akp = a[k][p];
            let akq = a[k][q];
            a[k][p] = c * akp - s * akq;
            a[k][q] = s * akp + c * akq;
        }
        for k in 0..3 {
            let apk = a[p][k];
            let aqk = a[q][k];
            a[p][k] = c * apk - s * aqk;
            a[q][k] = s * apk + c * aqk;
        }
        for k in 0..3 {
            let vkp = v[k][p];
            let vkq = v[k][q];
            v[k][p] = c * vkp - s * vkq;
            v[k][q] = s * vkp + c * vkq;
        }
    }
    let mut idx = 0;
    for i in 1..3 {
        if a[i][i] < a[idx][idx] {
            idx = i;
        }
    }
    Vec3::new(v[0][idx], v[1][idx], v[2][idx]).normalized()
}

/// Projects the Clifford torus from `pole` and fits a torus of revolution to
/// the image.
pub fn clifford_image_from(pole: Vec4) -> Result<TorusFit> {
    let samples = clifford_projection_samples(pole, 24)?;
    fit_torus(&samples)
}

/// The canonical projection from `(0,0,0,1)`.
pub fn clifford_image() -> Result<TorusFit> {
    clifford_image_from(Vec4::new(0.0, 0.0, 0.0, 1.0))
}

/// Descriptor string for reports.
pub fn describe_map(map: &MoebiusMap) -> String {
    match map {
        MoebiusMap::Similarity { scale, translation, .. } => {
            format!("similarity(scale={scale}, t=({},{},{}))", translation.x, translation.y, translation.z)
        }
        MoebiusMap::Inversion { center, radius } => {
            format!("inversion(center=({},{},{}), radius={radius})", center.x, center.y, center.z)
        }
        MoebiusMap::Composition(list) => {
            let parts: Vec<String> = list.iter().map(describe_map).collect();
            format!("composition[{}]", parts.join(", "))
        }
    }
}
