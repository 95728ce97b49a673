//! Adaptive quadrature: Gauss-Kronrod 15(7) in 1-D, tensor Gauss cells in
//! 2-D over chart rectangles. Subdivision order and summation order are
//! fixed, so results are bit-identical no matter how work is scheduled.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, Accumulator};
use crate::parallel;
use crate::surface::Surface;

/// Tuning for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Target relative error of each integral.
    pub rel_tol: f64,
    /// Maximum bisection depth below a seed cell.
    pub max_depth: u32,
    /// Extra forced subdivision levels within chord distance `4 eps` of the
    /// cutoff ball (the dominant error source for indicator-style cutoffs).
    pub ring_refinement: u32,
    /// Seed cells per axis for 2-D chart integrals.
    pub seed_grid: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-9,
            max_depth: 30,
            ring_refinement: 6,
            seed_grid: 64,
        }
    }
}

impl QuadratureConfig {
    pub fn validated(self) -> Result<Self> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::domain(format!(
                "rel_tol must be in (0, 1e-2], got {}",
                self.rel_tol
            )));
        }
        if self.max_depth < 4 {
            return Err(Error::domain(format!("max_depth must be >= 4, got {}", self.max_depth)));
        }
        if self.seed_grid < 8 {
            return Err(Error::domain(format!("seed_grid must be >= 8, got {}", self.seed_grid)));
        }
        Ok(self)
    }
}

/// One sample of a cutoff integral `E(eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSample {
    pub eps: f64,
    pub value: f64,
    pub err_est: f64,
}

/// Value with an error estimate and a convergence flag.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub err_est: f64,
    pub converged: bool,
}

// 15-point Kronrod extension of 7-point Gauss (QUADPACK constants).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Gauss-Kronrod 15(7) on `[a, b]`: (kronrod, |K - G|, resabs, resasc).
fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut result_gauss = f_center * WG[3];
    let mut result_kronrod = f_center * WGK[7];
    let mut resabs = result_kronrod.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = f_center;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        result_kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = result_kronrod * 0.5;
    let mut resasc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let err = ((result_kronrod - result_gauss) * half).abs();
    (
        result_kronrod * half,
        rescale_error(err, resabs * half.abs(), resasc * half.abs()),
        resabs * half.abs(),
        resasc * half.abs(),
    )
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut scaled = err;
    if resasc != 0.0 && scaled != 0.0 {
        let scale = math::powf(200.0 * scaled / resasc, 1.5);
        scaled = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * resabs);
    }
    scaled
}

fn refine_1d<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    budget: f64,
    depth: u32,
    value: &mut Accumulator,
    err: &mut Accumulator,
    exhausted: &mut bool,
) {
    let (v, e, resabs, _) = gk15(f, a, b);
    // The second test is the f64 floor: once the estimate is dominated by
    // roundoff of the local magnitude, further splitting cannot help.
    let converged = e <= budget || e <= 200.0 * f64::EPSILON * resabs;
    if converged || depth == 0 || (b - a).abs() < 1e-15 * (a.abs() + b.abs() + 1.0) {
        if !converged && depth == 0 {
            *exhausted = true;
        }
        value.add(v);
        err.add(e);
        return;
    }
    let mid = 0.5 * (a + b);
    refine_1d(f, a, mid, 0.5 * budget, depth - 1, value, err, exhausted);
    refine_1d(f, mid, b, 0.5 * budget, depth - 1, value, err, exhausted);
}

/// Adaptive integral of `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate_1d<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: u32,
) -> QuadResult {
    integrate_1d_segmented(f, &[a, b], rel_tol, max_depth)
}

/// Adaptive integral over the segments `[x0,x1], [x1,x2], ...`; breakpoints
/// let callers pin known kinks or steep features.
pub fn integrate_1d_segmented<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    breakpoints: &[f64],
    rel_tol: f64,
    max_depth: u32,
) -> QuadResult {
    debug_assert!(breakpoints.len() >= 2);
    // First pass for the magnitude scale.
    let mut resabs = 0.0;
    let mut seeds = Vec::with_capacity(breakpoints.len() - 1);
    for w in breakpoints.windows(2) {
        let (v, e, ra, _) = gk15(f, w[0], w[1]);
        resabs += ra;
        seeds.push((w[0], w[1], v, e));
    }
    let total_budget = rel_tol * resabs.max(1e-300);

    let mut value = Accumulator::new();
    let mut err = Accumulator::new();
    let mut exhausted = false;
    let n = seeds.len() as f64;
    for &(a, b, v, e) in &seeds {
        let budget = total_budget / n;
        if e <= budget {
            value.add(v);
            err.add(e);
        } else {
            refine_1d(f, a, b, budget, max_depth, &mut value, &mut err, &mut exhausted);
        }
    }
    QuadResult {
        value: value.total(),
        err_est: err.total(),
        converged: !exhausted,
    }
}

/// Closed axis-aligned chart rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        (self.u1 - self.u0) * (self.v1 - self.v0)
    }
}

const GL7_X: [f64; 7] = [
    -0.949107912342758524526189684047851,
    -0.741531185599394439863864773280788,
    -0.405845151377397166906606412076961,
    0.0,
    0.405845151377397166906606412076961,
    0.741531185599394439863864773280788,
    0.949107912342758524526189684047851,
];
const GL7_W: [f64; 7] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

/// Tensor 7x7 Gauss-Legendre rule on a rectangle: `(integral, resabs)`.
fn gl7x7<F: Fn(f64, f64) -> f64 + ?Sized>(f: &F, r: &Rect) -> (f64, f64) {
    let cu = 0.5 * (r.u0 + r.u1);
    let hu = 0.5 * (r.u1 - r.u0);
    let cv = 0.5 * (r.v0 + r.v1);
    let hv = 0.5 * (r.v1 - r.v0);
    let mut sum = Accumulator::new();
    let mut abs = 0.0f64;
    for (i, &xi) in GL7_X.iter().enumerate() {
        let u = cu + hu * xi;
        let mut row = Accumulator::new();
        let mut row_abs = 0.0f64;
        for (j, &xj) in GL7_X.iter().enumerate() {
            let val = f(u, cv + hv * xj);
            row.add(GL7_W[j] * val);
            row_abs += GL7_W[j] * val.abs();
        }
        sum.add(GL7_W[i] * row.total());
        abs += GL7_W[i] * row_abs;
    }
    (sum.total() * hu * hv, abs * (hu * hv).abs())
}

fn split4(r: &Rect) -> [Rect; 4] {
    let um = 0.5 * (r.u0 + r.u1);
    let vm = 0.5 * (r.v0 + r.v1);
    [
        Rect { u0: r.u0, u1: um, v0: r.v0, v1: vm },
        Rect { u0: um, u1: r.u1, v0: r.v0, v1: vm },
        Rect { u0: r.u0, u1: um, v0: vm, v1: r.v1 },
        Rect { u0: um, u1: r.u1, v0: vm, v1: r.v1 },
    ]
}

struct Cell2d<'a, F: ?Sized, P: ?Sized> {
    f: &'a F,
    force: Option<&'a P>,
    max_depth: u32,
}

impl<'a, F, P> Cell2d<'a, F, P>
where
    F: Fn(f64, f64) -> f64 + ?Sized,
    P: Fn(&Rect) -> bool + ?Sized,
{
    fn refine(
        &self,
        r: &Rect,
        parent: f64,
        budget: f64,
        depth: u32,
        forced_left: u32,
        value: &mut Accumulator,
        err: &mut Accumulator,
        exhausted: &mut bool,
    ) {
        let children = split4(r);
        let mut child_vals = [0.0f64; 4];
        let mut sum = Accumulator::new();
        let mut resabs = 0.0f64;
        for (i, c) in children.iter().enumerate() {
            let (v, ra) = gl7x7(self.f, c);
            child_vals[i] = v;
            sum.add(v);
            resabs += ra;
        }
        let refined = sum.total();
        let diff = (refined - parent).abs();
        let must_force = forced_left > 0 && self.force.map(|p| p(r)).unwrap_or(false);
        let converged = diff <= budget || diff <= 200.0 * f64::EPSILON * resabs;

        if (converged && !must_force) || depth == 0 {
            if !converged && depth == 0 {
                *exhausted = true;
            }
            value.add(refined);
            err.add(diff);
            return;
        }
        let next_forced = if must_force { forced_left - 1 } else { forced_left };
        for (i, c) in children.iter().enumerate() {
            self.refine(
                c,
                child_vals[i],
                0.25 * budget,
                depth - 1,
                next_forced,
                value,
                err,
                exhausted,
            );
        }
    }
}

/// Adaptive 2-D quadrature over a union of rectangles.
///
/// `force` marks cells that must be subdivided `cfg.ring_refinement` extra
/// times regardless of their error estimate (used near cutoff boundaries).
/// Seed cells are processed independently (possibly in parallel) and reduced
/// in index order.
pub fn integrate_rects<F, P>(
    f: &F,
    rects: &[Rect],
    cfg: &QuadratureConfig,
    seeds_per_axis: u32,
    force: Option<&P>,
) -> QuadResult
where
    F: Fn(f64, f64) -> f64 + Sync + ?Sized,
    P: Fn(&Rect) -> bool + Sync + ?Sized,
{
    // Seed cells: grid each rectangle so cells are roughly square in
    // parameter units, with at least one cell per axis.
    let max_span = rects
        .iter()
        .map(|r| (r.u1 - r.u0).max(r.v1 - r.v0))
        .fold(0.0f64, f64::max);
    let h0 = max_span / seeds_per_axis.max(1) as f64;
    let mut seeds = Vec::new();
    for r in rects {
        let nu = (((r.u1 - r.u0) / h0).ceil() as usize).max(1);
        let nv = (((r.v1 - r.v0) / h0).ceil() as usize).max(1);
        for i in 0..nu {
            let u0 = r.u0 + (r.u1 - r.u0) * i as f64 / nu as f64;
            let u1 = r.u0 + (r.u1 - r.u0) * (i + 1) as f64 / nu as f64;
            for j in 0..nv {
                let v0 = r.v0 + (r.v1 - r.v0) * j as f64 / nv as f64;
                let v1 = r.v0 + (r.v1 - r.v0) * (j + 1) as f64 / nv as f64;
                seeds.push(Rect { u0, u1, v0, v1 });
            }
        }
    }

    // Magnitude pass fixes the per-cell budgets up front.
    let seed_vals = parallel::map_indexed(seeds.len(), |i| gl7x7(f, &seeds[i]).0);
    let mut l1 = Accumulator::new();
    for v in &seed_vals {
        l1.add(v.abs());
    }
    let budget_total = cfg.rel_tol * l1.total().max(1e-300);
    let budget_cell = budget_total / seeds.len() as f64;

    let engine = Cell2d { f, force, max_depth: cfg.max_depth };
    let partials = parallel::map_indexed(seeds.len(), |i| {
        let mut value = Accumulator::new();
        let mut err = Accumulator::new();
        let mut exhausted = false;
        engine.refine(
            &seeds[i],
            seed_vals[i],
            budget_cell,
            engine.max_depth,
            cfg.ring_refinement,
            &mut value,
            &mut err,
            &mut exhausted,
        );
        (value.total(), err.total(), exhausted)
    });

    let mut value = Accumulator::new();
    let mut err = Accumulator::new();
    let mut converged = true;
    for (v, e, ex) in &partials {
        value.add(*v);
        err.add(*e);
        converged &= !ex;
    }
    QuadResult { value: value.total(), err_est: err.total(), converged }
}

/// Integral of a pointwise integrand times the area element over the whole
/// chart domain.
///
/// `f` receives `(u, v)` and must already include any weight except the area
/// density, which is applied here.
pub fn integrate_chart<S, F>(surface: &S, f: &F, cfg: &QuadratureConfig) -> Result<QuadResult>
where
    S: Surface + ?Sized,
    F: Fn(f64, f64) -> f64 + Sync + ?Sized,
{
    let cfg = cfg.validated()?;
    let dom = surface.domain();
    let rect = Rect { u0: dom.u.0, u1: dom.u.1, v0: dom.v.0, v1: dom.v.1 };
    let g = |u: f64, v: f64| f(u, v) * surface.area_density(u, v);
    let res = integrate_rects(
        &g,
        &[rect],
        &cfg,
        cfg.seed_grid,
        None::<&fn(&Rect) -> bool>,
    );
    if !res.converged && res.err_est > cfg.rel_tol * res.value.abs() {
        return Err(Error::ToleranceNotMet {
            value: res.value,
            err_est: res.err_est,
            rel_tol: cfg.rel_tol,
        });
    }
    Ok(res)
}
