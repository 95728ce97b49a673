//! Cutoff integrals: `|x - y|^lambda` integrated over a curve or surface
//! with the chord ball `|x - y| < eps` removed.
//!
//! Three independent routes are kept:
//!  * a fast path for revolution-symmetric charts, where the angular
//!    integral around each orbit circle has a closed form,
//!  * a generic chart path that splits the domain into a polar patch around
//!    the base point (cutoff boundary resolved by root finding) plus smooth
//!    outer rectangles,
//!  * a brute-force indicator path that encodes the cutoff as a discontinuous
//!    integrand, kept as the definitional cross-check.

use alloc::vec;
use alloc::vec::Vec;

use crate::curve::{ArclengthTable, Curve};
use crate::error::{Error, Result};
use crate::math::{self, Accumulator, PI, TAU};
use crate::quad::{self, CutoffSample, QuadratureConfig, Rect};
use crate::surface::Surface;
use crate::vec3::Vec3;

/// How the excluded neighbourhood of a curve point is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveCutoff {
    /// Euclidean chord distance (the default renormalization).
    Chord,
    /// Distance along the curve.
    Arclength,
}

// ---------------------------------------------------------------------------
// Orbit-circle integrals: int (A - B cos w)^(lambda/2) dw with A > B >= 0.
// In the partial case the excluded arc is |w| < w_eps with
// A - B cos(w_eps) = eps^2; d0 = A - B and dpi = A + B are the squared
// chords at w = 0 and w = pi.
// ---------------------------------------------------------------------------

fn circle_full(d0: f64, dpi: f64, lambda: f64) -> f64 {
    let prod = d0 * dpi;
    if lambda == -4.0 {
        let a = 0.5 * (d0 + dpi);
        TAU * a / (prod * math::sqrt(prod))
    } else if lambda == -2.0 {
        TAU / math::sqrt(prod)
    } else if lambda == 0.0 {
        TAU
    } else {
        let a = 0.5 * (d0 + dpi);
        let b = 0.5 * (dpi - d0);
        2.0 * quad::integrate_1d(
            &|w: f64| math::pow_dist_sq(a - b * math::cos(w), lambda),
            0.0,
            PI,
            1e-13,
            30,
        )
        .value
    }
}

fn circle_tail(d0: f64, dpi: f64, eps_sq: f64, lambda: f64) -> f64 {
    let a = 0.5 * (d0 + dpi);
    let b = 0.5 * (dpi - d0);
    debug_assert!(eps_sq >= d0 && eps_sq <= dpi);
    if lambda == -4.0 {
        let prod = d0 * dpi;
        // atan form of F(pi) - F(w_eps); products only, no cancellation.
        let angle = math::atan(math::sqrt(d0 * (dpi - eps_sq) / (dpi * (eps_sq - d0))));
        let boundary = math::sqrt((eps_sq - d0) * (dpi - eps_sq));
        4.0 * a * angle / (prod * math::sqrt(prod)) - 2.0 * boundary / (prod * eps_sq)
    } else if lambda == -2.0 {
        let prod = d0 * dpi;
        4.0 / math::sqrt(prod)
            * math::atan(math::sqrt(d0 * (dpi - eps_sq) / (dpi * (eps_sq - d0))))
    } else if lambda == 0.0 {
        let cw = ((a - eps_sq) / b).clamp(-1.0, 1.0);
        2.0 * (PI - math::acos(cw))
    } else {
        let cw = ((a - eps_sq) / b).clamp(-1.0, 1.0);
        let w_eps = math::acos(cw);
        2.0 * quad::integrate_1d(
            &|w: f64| math::pow_dist_sq(a - b * math::cos(w), lambda),
            w_eps,
            PI,
            1e-13,
            30,
        )
        .value
    }
}

// ---------------------------------------------------------------------------
// Fast path for revolution charts.
// ---------------------------------------------------------------------------

/// First crossing of `d0(u) = eps^2` on the given side of `u0`; `half_span`
/// is how far the search may go.
fn strip_edge<F: Fn(f64) -> f64>(d0: &F, u0: f64, half_span: f64, eps_sq: f64) -> Option<f64> {
    let n = 256;
    let mut prev = 0.0f64;
    for i in 1..=n {
        let t = i as f64 / n as f64 * half_span;
        if d0(u0 + t) >= eps_sq {
            // Bisect [prev, t].
            let (mut lo, mut hi) = (prev, t);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if d0(u0 + mid) >= eps_sq {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= f64::EPSILON * (1.0 + hi.abs()) {
                    break;
                }
            }
            return Some(u0 + 0.5 * (lo + hi));
        }
        prev = t;
    }
    None
}

fn revolution_cutoff_potential<S: Surface + ?Sized>(
    surface: &S,
    u0: f64,
    v0: f64,
    eps: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<CutoffSample> {
    let dom = surface.domain();
    let x = surface.chart(u0, v0);
    let eps_sq = eps * eps;

    let d0 = |u: f64| surface.chart(u, v0).dist_sq(x);
    let dpi = |u: f64| surface.chart(u, v0 + PI).dist_sq(x);

    // The u-span reachable on each side (full half-period when periodic).
    let (left_span, right_span) = if dom.u_periodic {
        (0.5 * dom.u_span(), 0.5 * dom.u_span())
    } else {
        (u0 - dom.u.0, dom.u.1 - u0)
    };

    let hi = strip_edge(&|u| d0(u), u0, right_span, eps_sq)
        .ok_or(Error::EpsTooLarge { eps, limit: math::sqrt(d0(u0 + right_span)) })?;
    let lo = strip_edge(&|u| d0(-(u - u0) + u0), u0, left_span, eps_sq)
        .map(|u| 2.0 * u0 - u)
        .ok_or(Error::EpsTooLarge { eps, limit: math::sqrt(d0(u0 - left_span)) })?;

    let integrand = |u: f64| {
        let a = d0(u);
        let b = dpi(u);
        let dens = surface.area_density(u, v0);
        let j = if a >= eps_sq {
            circle_full(a, b, lambda)
        } else if b <= eps_sq {
            0.0
        } else {
            circle_tail(a, b, eps_sq, lambda)
        };
        dens * j
    };

    // Breakpoints: strip edges, dyadic grading on both sides (the integrand
    // falls like |u-u0|^(lambda+1) away from the strip), strip interior.
    let mut pts = vec![u0 - left_span];
    let wl = u0 - lo;
    let mut d = left_span;
    while d > 2.0 * wl {
        pts.push(u0 - d);
        d *= 0.5;
    }
    pts.push(lo);
    pts.push(u0 - 0.5 * wl);
    pts.push(u0);
    let wr = hi - u0;
    pts.push(u0 + 0.5 * wr);
    pts.push(hi);
    let mut d = 2.0 * wr;
    while d < right_span {
        pts.push(u0 + d);
        d *= 2.0;
    }
    pts.push(u0 + right_span);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

    let tol = (cfg.rel_tol * 1e-3).max(5e-14);
    let res = quad::integrate_1d_segmented(&integrand, &pts, tol, cfg.max_depth + 10);
    Ok(CutoffSample { eps, value: res.value, err_est: res.err_est })
}

// ---------------------------------------------------------------------------
// Generic chart path: polar patch + outer rectangles.
// ---------------------------------------------------------------------------

struct PolarFrame<'a, S: Surface + ?Sized> {
    surface: &'a S,
    u0: f64,
    v0: f64,
    x: Vec3,
    // Cholesky factor of the first fundamental form at (u0, v0).
    l11: f64,
    l21: f64,
    l22: f64,
    det_l: f64,
    du: f64,
    dv: f64,
    /// Corner directions of the patch box, as sorted polar angles.
    corner_psi: [f64; 4],
}

impl<'a, S: Surface + ?Sized> PolarFrame<'a, S> {
    fn build(surface: &'a S, u0: f64, v0: f64) -> Result<Self> {
        let (x, pu, pv) = surface.chart_jet(u0, v0);
        let e = pu.dot(pu);
        let f = pu.dot(pv);
        let g = pv.dot(pv);
        let det = e * g - f * f;
        if !(det > 0.0) {
            return Err(Error::DegenerateChart { u: u0, v: v0, area_density: math::sqrt(det.max(0.0)) });
        }
        let l11 = math::sqrt(e);
        let l21 = f / l11;
        let l22 = math::sqrt(g - l21 * l21);
        let det_l = l11 * l22;

        // Patch box: chord radius ~ 0.65 eps_cap in each chart direction,
        // clamped to a quarter period so the complement stays rectangular.
        let dom = surface.domain();
        let p = 0.65 * surface.eps_cap();
        let du = (p / l11).min(0.25 * dom.u_span());
        let dv = (p / l22.max(1e-300)).min(0.25 * dom.v_span());

        let mut corner_psi = [0.0f64; 4];
        for (i, (cu, cv)) in [(du, dv), (-du, dv), (-du, -dv), (du, -dv)].iter().enumerate() {
            // psi of a chart direction (cu, cv) is the angle of L^T (cu, cv).
            let a1 = l11 * cu + l21 * cv;
            let a2 = l22 * cv;
            corner_psi[i] = math::atan2(a2, a1);
        }
        corner_psi.sort_by(|a, b| a.partial_cmp(b).unwrap());

        Ok(PolarFrame { surface, u0, v0, x, l11, l21, l22, det_l, du, dv, corner_psi })
    }

    /// Chart direction of polar angle `psi`: solves `L^T d = (cos, sin)`.
    #[inline]
    fn direction(&self, psi: f64) -> (f64, f64) {
        let (s, c) = math::sin_cos(psi);
        let d2 = s / self.l22;
        let d1 = (c - self.l21 * d2) / self.l11;
        (d1, d2)
    }

    /// Ray-box exit distance for the patch rectangle.
    fn rho_max(&self, d1: f64, d2: f64) -> f64 {
        let r1 = if d1 != 0.0 { self.du / d1.abs() } else { f64::INFINITY };
        let r2 = if d2 != 0.0 { self.dv / d2.abs() } else { f64::INFINITY };
        r1.min(r2)
    }

    fn point(&self, rho: f64, d1: f64, d2: f64) -> (f64, f64) {
        (self.u0 + rho * d1, self.v0 + rho * d2)
    }

    fn chord_sq(&self, rho: f64, d1: f64, d2: f64) -> f64 {
        let (u, v) = self.point(rho, d1, d2);
        self.surface.chart(u, v).dist_sq(self.x)
    }

    /// First crossing of `chord = eps` along the ray.
    fn rho_eps(&self, d1: f64, d2: f64, eps: f64, rho_max: f64) -> Result<f64> {
        let eps_sq = eps * eps;
        let mut hi = eps; // chord(rho) ~ rho near 0
        let mut lo = 0.0;
        let mut expansions = 0;
        while self.chord_sq(hi, d1, d2) < eps_sq {
            lo = hi;
            hi *= 1.35;
            expansions += 1;
            if hi > rho_max || expansions > 60 {
                return Err(Error::EpsTooLarge { eps, limit: rho_max });
            }
        }
        if lo == 0.0 {
            lo = hi / 1.35;
            while self.chord_sq(lo, d1, d2) >= eps_sq {
                hi = lo;
                lo *= 0.5;
                if lo < 1e-6 * eps {
                    break;
                }
            }
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.chord_sq(mid, d1, d2) >= eps_sq {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Outer rectangles: the chart domain (re-centered on the base point for
    /// periodic axes) minus the patch box.
    fn outer_rects(&self) -> Vec<Rect> {
        let dom = self.surface.domain();
        let (u_lo, u_hi) = if dom.u_periodic {
            (self.u0 - 0.5 * dom.u_span(), self.u0 + 0.5 * dom.u_span())
        } else {
            (dom.u.0, dom.u.1)
        };
        let (v_lo, v_hi) = if dom.v_periodic {
            (self.v0 - 0.5 * dom.v_span(), self.v0 + 0.5 * dom.v_span())
        } else {
            (dom.v.0, dom.v.1)
        };
        let (bu0, bu1) = (self.u0 - self.du, self.u0 + self.du);
        let (bv0, bv1) = (self.v0 - self.dv, self.v0 + self.dv);

        // Graded strips: widths double moving away from the patch.
        let mut rects = Vec::new();
        let mut push_u_strip = |u0: f64, u1: f64| {
            if u1 > u0 + 1e-14 {
                rects.push(Rect { u0, u1, v0: v_lo, v1: v_hi });
            }
        };
        let mut edges = vec![bu1];
        let mut w = 2.0 * self.du;
        while *edges.last().unwrap() + w < u_hi {
            let next = *edges.last().unwrap() + w;
            edges.push(next);
            w *= 2.0;
        }
        edges.push(u_hi);
        for pair in edges.windows(2) {
            push_u_strip(pair[0], pair[1]);
        }
        let mut edges = vec![bu0];
        let mut w = 2.0 * self.du;
        while *edges.last().unwrap() - w > u_lo {
            let next = *edges.last().unwrap() - w;
            edges.push(next);
            w *= 2.0;
        }
        edges.push(u_lo);
        for pair in edges.windows(2) {
            push_u_strip(pair[1], pair[0]);
        }

        // Remaining v-strips above/below the patch, within the patch u-band.
        let mut push_v_strip = |v0: f64, v1: f64| {
            if v1 > v0 + 1e-14 {
                rects.push(Rect { u0: bu0, u1: bu1, v0, v1 });
            }
        };
        let mut edges = vec![bv1];
        let mut w = 2.0 * self.dv;
        while *edges.last().unwrap() + w < v_hi {
            let next = *edges.last().unwrap() + w;
            edges.push(next);
            w *= 2.0;
        }
        edges.push(v_hi);
        for pair in edges.windows(2) {
            push_v_strip(pair[0], pair[1]);
        }
        let mut edges = vec![bv0];
        let mut w = 2.0 * self.dv;
        while *edges.last().unwrap() - w > v_lo {
            let next = *edges.last().unwrap() - w;
            edges.push(next);
            w *= 2.0;
        }
        edges.push(v_lo);
        for pair in edges.windows(2) {
            push_v_strip(pair[1], pair[0]);
        }
        rects
    }
}

fn generic_cutoff_ladder<S: Surface + ?Sized>(
    surface: &S,
    u0: f64,
    v0: f64,
    eps_list: &[f64],
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<CutoffSample>> {
    let frame = PolarFrame::build(surface, u0, v0)?;

    // eps-independent outer part.
    let outer_rects = frame.outer_rects();
    let x = frame.x;
    let outer_f = |u: f64, v: f64| {
        let (p, pu, pv) = surface.chart_jet(u, v);
        math::pow_dist_sq(p.dist_sq(x), lambda) * pu.cross(pv).norm()
    };
    let outer = quad::integrate_rects(
        &outer_f,
        &outer_rects,
        &QuadratureConfig { rel_tol: (cfg.rel_tol * 0.1).max(1e-12), ..*cfg },
        16,
        None::<&fn(&Rect) -> bool>,
    );

    // Patch boundary sanity: the smallest chord on the box edge bounds the
    // admissible eps.
    let mut min_edge_chord_sq = f64::INFINITY;
    for i in 0..128 {
        let t = (i as f64 + 0.5) / 128.0;
        let candidates = [
            (frame.u0 - frame.du + 2.0 * frame.du * t, frame.v0 - frame.dv),
            (frame.u0 - frame.du + 2.0 * frame.du * t, frame.v0 + frame.dv),
            (frame.u0 - frame.du, frame.v0 - frame.dv + 2.0 * frame.dv * t),
            (frame.u0 + frame.du, frame.v0 - frame.dv + 2.0 * frame.dv * t),
        ];
        for (u, v) in candidates {
            min_edge_chord_sq = min_edge_chord_sq.min(surface.chart(u, v).dist_sq(x));
        }
    }
    let edge_limit = math::sqrt(min_edge_chord_sq);

    let mut out = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if eps * 1.2 > edge_limit {
            return Err(Error::EpsTooLarge { eps, limit: edge_limit / 1.2 });
        }
        let polar = polar_patch_integral(&frame, eps, lambda, cfg)?;
        out.push(CutoffSample {
            eps,
            value: outer.value + polar.0,
            err_est: outer.err_est + polar.1,
        });
    }
    Ok(out)
}

fn polar_patch_integral<S: Surface + ?Sized>(
    frame: &PolarFrame<'_, S>,
    eps: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let tol = (cfg.rel_tol * 1e-2).max(1e-13);

    let radial = |psi: f64| -> Result<f64> {
        let (d1, d2) = frame.direction(psi);
        let rho_max = frame.rho_max(d1, d2);
        let rho_eps = frame.rho_eps(d1, d2, eps, rho_max)?;
        if rho_eps > 0.6 * rho_max {
            return Err(Error::EpsTooLarge { eps, limit: 0.6 * rho_max });
        }
        let f = |rho: f64| {
            let (u, v) = frame.point(rho, d1, d2);
            let (p, pu, pv) = frame.surface.chart_jet(u, v);
            math::pow_dist_sq(p.dist_sq(frame.x), lambda) * pu.cross(pv).norm() * rho
                / frame.det_l
        };
        // Dyadic splits from the cutoff boundary outward tame the rho^-3
        // profile; ring_refinement controls how many.
        let mut pts = vec![rho_eps];
        let mut r = 2.0 * rho_eps;
        let splits = cfg.ring_refinement.max(2);
        for _ in 0..splits {
            if r >= rho_max {
                break;
            }
            pts.push(r);
            r *= 2.0;
        }
        pts.push(rho_max);
        Ok(quad::integrate_1d_segmented(&f, &pts, tol, cfg.max_depth).value)
    };

    // Integrate over psi between the box-corner kink angles.
    let mut arcs = Vec::with_capacity(5);
    let base = frame.corner_psi;
    for i in 0..4 {
        let a = base[i];
        let b = if i == 3 { base[0] + TAU } else { base[i + 1] };
        arcs.push((a, b));
    }

    let mut failed: Option<Error> = None;
    let mut total = Accumulator::new();
    let mut err = Accumulator::new();
    for (a, b) in arcs {
        if failed.is_some() {
            break;
        }
        let g = |psi: f64| match radial(psi) {
            Ok(v) => v,
            Err(_) => f64::NAN,
        };
        let res = quad::integrate_1d(&g, a, b, tol, cfg.max_depth);
        if res.value.is_nan() {
            // Re-run one node to recover the error cause.
            failed = Some(match radial(0.5 * (a + b)) {
                Err(e) => e,
                Ok(_) => Error::EpsTooLarge { eps, limit: f64::NAN },
            });
        } else {
            total.add(res.value);
            err.add(res.err_est);
        }
    }
    if let Some(e) = failed {
        return Err(e);
    }
    Ok((total.total(), err.total()))
}

// ---------------------------------------------------------------------------
// Public surface entry points.
// ---------------------------------------------------------------------------

/// Integral of `|x - y|^lambda` over the surface minus the chord ball of
/// radius `eps` around `x = chart(u0, v0)`.
pub fn cutoff_potential_integral<S: Surface + ?Sized>(
    surface: &S,
    u0: f64,
    v0: f64,
    eps: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<CutoffSample> {
    let mut ladder = cutoff_potential_ladder(surface, u0, v0, &[eps], lambda, cfg)?;
    Ok(ladder.pop().unwrap())
}

/// Ladder variant: shares the eps-independent work across all cutoff radii.
pub fn cutoff_potential_ladder<S: Surface + ?Sized>(
    surface: &S,
    u0: f64,
    v0: f64,
    eps_list: &[f64],
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<CutoffSample>> {
    let cfg = cfg.validated()?;
    let cap = surface.eps_cap();
    for &eps in eps_list {
        if !(eps > 0.0) {
            return Err(Error::domain("cutoff radius must be positive"));
        }
        if eps > cap {
            return Err(Error::EpsTooLarge { eps, limit: cap });
        }
    }
    if surface.is_revolution() {
        eps_list
            .iter()
            .map(|&eps| revolution_cutoff_potential(surface, u0, v0, eps, lambda, &cfg))
            .collect()
    } else {
        generic_cutoff_ladder(surface, u0, v0, eps_list, lambda, &cfg)
    }
}

/// Brute-force reference: the cutoff enters as an indicator on the chord
/// distance and the ring near the boundary is force-refined. Slow; used to
/// cross-check the structured paths at modest tolerances.
pub fn cutoff_potential_indicator<S: Surface + ?Sized>(
    surface: &S,
    u0: f64,
    v0: f64,
    eps: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<CutoffSample> {
    let cfg = cfg.validated()?;
    let dom = surface.domain();
    let x = surface.chart(u0, v0);
    let eps_sq = eps * eps;

    let f = |u: f64, v: f64| {
        let (p, pu, pv) = surface.chart_jet(u, v);
        let d2 = p.dist_sq(x);
        if d2 >= eps_sq {
            math::pow_dist_sq(d2, lambda) * pu.cross(pv).norm()
        } else {
            0.0
        }
    };
    // Force subdivision of cells that touch the annulus [0.8 eps, 4 eps].
    let ring = |r: &Rect| {
        let mut min_d = f64::INFINITY;
        let mut max_d = 0.0f64;
        for (u, v) in [
            (r.u0, r.v0),
            (r.u0, r.v1),
            (r.u1, r.v0),
            (r.u1, r.v1),
            (0.5 * (r.u0 + r.u1), 0.5 * (r.v0 + r.v1)),
        ] {
            let d = surface.chart(u, v).dist(x);
            min_d = min_d.min(d);
            max_d = max_d.max(d);
        }
        min_d < 4.0 * eps && max_d > 0.8 * eps
    };

    let (u_lo, u_hi) = if dom.u_periodic {
        (u0 - 0.5 * dom.u_span(), u0 + 0.5 * dom.u_span())
    } else {
        (dom.u.0, dom.u.1)
    };
    let (v_lo, v_hi) = if dom.v_periodic {
        (v0 - 0.5 * dom.v_span(), v0 + 0.5 * dom.v_span())
    } else {
        (dom.v.0, dom.v.1)
    };
    let rect = Rect { u0: u_lo, u1: u_hi, v0: v_lo, v1: v_hi };
    let res = quad::integrate_rects(&f, &[rect], &cfg, cfg.seed_grid, Some(&ring));
    Ok(CutoffSample { eps, value: res.value, err_est: res.err_est })
}

/// Symmetric double integral `E(eps) = iint_{dist >= eps} |x-y|^lambda` over
/// surface pairs.
pub fn cutoff_energy_surface<S: Surface + ?Sized>(
    surface: &S,
    eps: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<CutoffSample> {
    let cfg = cfg.validated()?;
    if surface.is_revolution() {
        // Outer point at (u, v0): the potential integral only depends on u.
        let dom = surface.domain();
        let v0 = dom.v.0;
        let inner_cfg = QuadratureConfig { rel_tol: (cfg.rel_tol * 0.1).max(1e-12), ..cfg };
        let f = |u: f64| {
            let i = revolution_cutoff_potential(surface, u, v0, eps, lambda, &inner_cfg)
                .map(|s| s.value)
                .unwrap_or(f64::NAN);
            i * surface.area_density(u, v0)
        };
        let res = quad::integrate_1d(&f, dom.u.0, dom.u.1, (cfg.rel_tol).max(1e-11), 18);
        if res.value.is_nan() {
            return Err(Error::EpsTooLarge { eps, limit: surface.eps_cap() });
        }
        Ok(CutoffSample {
            eps,
            value: res.value * dom.v_span(),
            err_est: res.err_est * dom.v_span(),
        })
    } else {
        // Tensor trapezoid over outer points, doubled until stable: smooth
        // periodic integrand, so convergence is fast.
        let dom = surface.domain();
        let mut n = 24usize;
        let mut prev = f64::NAN;
        let mut prev_err = f64::INFINITY;
        loop {
            let mut acc = Accumulator::new();
            for i in 0..n {
                let u = dom.u.0 + dom.u_span() * i as f64 / n as f64;
                for j in 0..n {
                    let v = dom.v.0 + dom.v_span() * j as f64 / n as f64;
                    let s = cutoff_potential_integral(surface, u, v, eps, lambda, &cfg)?;
                    acc.add(s.value * surface.area_density(u, v));
                }
            }
            let val = acc.total() * dom.u_span() * dom.v_span() / (n * n) as f64;
            let err = (val - prev).abs();
            if err <= cfg.rel_tol * val.abs() || n >= 192 {
                return Ok(CutoffSample { eps, value: val, err_est: err.min(prev_err) });
            }
            prev = val;
            prev_err = err;
            n *= 2;
        }
    }
}

// ---------------------------------------------------------------------------
// Curves.
// ---------------------------------------------------------------------------

/// Arclength integral of `|x - y|^lambda` over the curve minus the cutoff
/// neighbourhood of `x = gamma(t0)`.
pub fn curve_cutoff_potential<C: Curve + ?Sized>(
    curve: &C,
    t0: f64,
    eps: f64,
    lambda: f64,
    kind: CurveCutoff,
    cfg: &QuadratureConfig,
) -> Result<CutoffSample> {
    let cfg = cfg.validated()?;
    if !(eps > 0.0) {
        return Err(Error::domain("cutoff radius must be positive"));
    }
    let period = curve.period();
    let x = curve.point(t0);

    let (t_lo, t_hi) = match kind {
        CurveCutoff::Chord => {
            let d = |t: f64| curve.point(t).dist_sq(x);
            let hi = strip_edge(&d, t0, 0.5 * period, eps * eps)
                .ok_or(Error::EpsTooLarge { eps, limit: math::sqrt(d(t0 + 0.5 * period)) })?;
            let lo = strip_edge(&|t| d(-(t - t0) + t0), t0, 0.5 * period, eps * eps)
                .map(|t| 2.0 * t0 - t)
                .ok_or(Error::EpsTooLarge { eps, limit: math::sqrt(d(t0 - 0.5 * period)) })?;
            (lo, hi)
        }
        CurveCutoff::Arclength => {
            let table = ArclengthTable::new(curve, 256);
            if 2.0 * eps >= table.total() {
                return Err(Error::EpsTooLarge { eps, limit: 0.5 * table.total() });
            }
            let s0 = table.arclength(t0);
            let mut hi = table.param_at(s0 + eps);
            let mut lo = table.param_at(s0 - eps);
            // Unwrap to a window around t0.
            while hi < t0 {
                hi += period;
            }
            while lo > t0 {
                lo -= period;
            }
            (lo, hi)
        }
    };

    let f = |t: f64| math::pow_dist_sq(curve.point(t).dist_sq(x), lambda) * curve.speed(t);
    // Integration runs over [t_hi, t_lo + period]; grade dyadically from both
    // endpoints where the kernel peaks.
    let a = t_hi;
    let b = t_lo + period;
    let mut pts = vec![a];
    let w0 = (t_hi - t0).max(1e-12);
    let mut w = w0;
    while a + w < 0.5 * (a + b) {
        pts.push(a + w);
        w *= 2.0;
    }
    let w1 = (t0 - t_lo).max(1e-12);
    let mut w = w1;
    while b - w > 0.5 * (a + b) {
        pts.push(b - w);
        w *= 2.0;
    }
    pts.push(0.5 * (a + b));
    pts.push(b);
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup_by(|p, q| (*p - *q).abs() < 1e-14);

    let tol = (cfg.rel_tol * 1e-3).max(5e-14);
    let res = quad::integrate_1d_segmented(&f, &pts, tol, cfg.max_depth + 10);
    Ok(CutoffSample { eps, value: res.value, err_est: res.err_est })
}

/// Symmetric double integral over curve pairs at chord (or arclength)
/// distance at least `eps`.
pub fn cutoff_energy_curve<C: Curve + ?Sized>(
    curve: &C,
    eps: f64,
    lambda: f64,
    kind: CurveCutoff,
    cfg: &QuadratureConfig,
) -> Result<CutoffSample> {
    let cfg = cfg.validated()?;
    let period = curve.period();
    let inner_cfg = QuadratureConfig { rel_tol: (cfg.rel_tol * 0.1).max(1e-13), ..cfg };
    let f = |t: f64| {
        curve_cutoff_potential(curve, t, eps, lambda, kind, &inner_cfg)
            .map(|s| s.value)
            .unwrap_or(f64::NAN)
            * curve.speed(t)
    };
    let res = quad::integrate_1d(&f, 0.0, period, cfg.rel_tol.max(1e-11), 16);
    if res.value.is_nan() {
        return Err(Error::EpsTooLarge { eps, limit: f64::NAN });
    }
    Ok(CutoffSample { eps, value: res.value, err_est: res.err_est })
}

// ---------------------------------------------------------------------------
// Planar disk.
// ---------------------------------------------------------------------------

/// Cutoff pair energy of the flat disk of radius `radius`.
///
/// The integral over each ray from an interior point is elementary, so the
/// 4-dimensional pair integral collapses to a rotationally reduced double
/// integral evaluated to near machine accuracy.
pub fn disk_cutoff_energy(
    radius: f64,
    eps: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<CutoffSample> {
    let cfg = cfg.validated()?;
    if !(radius > 0.0) {
        return Err(Error::domain("disk radius must be positive"));
    }
    if !(eps > 0.0 && eps < radius) {
        return Err(Error::EpsTooLarge { eps, limit: radius });
    }

    // Radial antiderivative of tau^(lambda+1) between eps and r(psi).
    let radial = |r: f64| -> f64 {
        if lambda == -2.0 {
            math::ln(r / eps)
        } else {
            let p = lambda + 2.0;
            (math::powf(r, p) - math::powf(eps, p)) / p
        }
    };

    // Potential at distance rho from the center.
    let potential = |rho: f64| -> f64 {
        let boundary = |psi: f64| {
            let c = math::cos(psi);
            let s2 = 1.0 - c * c;
            -rho * c + math::sqrt((radius * radius - rho * rho * s2).max(0.0))
        };
        if rho <= radius - eps {
            // Whole ball inside: every direction contributes.
            quad::integrate_1d(&|psi: f64| radial(boundary(psi)), 0.0, PI, 1e-13, 30).value * 2.0
        } else {
            // Directions with boundary(psi) <= eps are fully excluded;
            // the critical angle is explicit.
            let c_crit = ((radius * radius - rho * rho - eps * eps) / (2.0 * eps * rho))
                .clamp(-1.0, 1.0);
            let psi_c = math::acos(c_crit);
            quad::integrate_1d(&|psi: f64| radial(boundary(psi)), psi_c, PI, 1e-13, 30).value
                * 2.0
        }
    };

    let f = |rho: f64| potential(rho) * rho;
    let res = quad::integrate_1d_segmented(
        &f,
        &[0.0, radius - eps, radius],
        (cfg.rel_tol * 0.1).max(1e-13),
        cfg.max_depth + 6,
    );
    Ok(CutoffSample { eps, value: TAU * res.value, err_est: TAU * res.err_est })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Circle;
    use crate::surface::{RevolutionTorus, Sphere};

    const SQRT2: f64 = core::f64::consts::SQRT_2;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn sphere_cutoff_matches_analytic_oracle() {
        // Exact: pi/eps^2 - pi/(4 r^2) for a sphere of radius r.
        for &(r, eps) in &[(1.0, 0.1), (1.0, 0.05), (3.0, 0.2), (0.5, 0.02)] {
            let s = Sphere::new(r).unwrap();
            let exact = PI / (eps * eps) - PI / (4.0 * r * r);
            for &(u0, v0) in &[(0.0, 0.0), (0.7, 1.3), (-0.9, 4.0)] {
                let got = cutoff_potential_integral(&s, u0, v0, eps, -4.0, &cfg()).unwrap();
                assert!(
                    (got.value - exact).abs() < 1e-5,
                    "sphere r={r} eps={eps} at ({u0},{v0}): {} vs {exact}",
                    got.value
                );
            }
        }
    }

    #[test]
    fn sphere_cutoff_value_from_spec_example() {
        let s = Sphere::new(1.0).unwrap();
        let got = cutoff_potential_integral(&s, 0.3, 0.0, 0.1, -4.0, &cfg()).unwrap();
        let exact = 100.0 * PI - 0.25 * PI;
        assert!((got.value - exact).abs() < 1e-5);
        assert!((exact - 313.374).abs() < 5e-3);
    }

    #[test]
    fn lambda_zero_recovers_area_minus_cap() {
        let t = RevolutionTorus::new(2.0).unwrap();
        let area = 8.0 * PI * PI;
        let got = cutoff_potential_integral(&t, 0.3, 0.0, 0.05, 0.0, &cfg()).unwrap();
        assert!(got.value < area);
        assert!(area - got.value < 0.01);
        let smaller = cutoff_potential_integral(&t, 0.3, 0.0, 0.01, 0.0, &cfg()).unwrap();
        assert!(area - smaller.value < 4e-4);
    }

    #[test]
    fn monotone_in_eps_for_negative_lambda() {
        let t = RevolutionTorus::new(SQRT2).unwrap();
        let mut prev = f64::INFINITY;
        for &eps in &[0.05, 0.08, 0.12, 0.2, 0.3] {
            let s = cutoff_potential_integral(&t, 1.0, 0.0, eps, -4.0, &cfg()).unwrap();
            assert!(s.value < prev, "not monotone at eps={eps}");
            prev = s.value;
        }
    }

    #[test]
    fn generic_path_agrees_with_fast_path_on_torus() {
        // Same chart, revolution flag stripped: exercises the polar patch.
        let t = RevolutionTorus::new(SQRT2).unwrap();
        let masked = crate::surface::ChartSurface {
            jet: alloc::boxed::Box::new(move |u, v| t.chart_jet(u, v)),
            domain: t.domain(),
            revolution: false,
            eps_cap: t.eps_cap(),
            diameter: t.diameter(),
            length_scale: 1.0,
        };
        for &(alpha, eps) in &[(0.0, 0.1), (1.2, 0.05), (PI, 0.08)] {
            let fast = cutoff_potential_integral(&t, alpha, 0.0, eps, -4.0, &cfg()).unwrap();
            let slow = cutoff_potential_integral(&masked, alpha, 0.0, eps, -4.0, &cfg()).unwrap();
            assert!(
                (fast.value - slow.value).abs() < 2e-6 * fast.value.abs(),
                "alpha={alpha} eps={eps}: fast {} generic {}",
                fast.value,
                slow.value
            );
        }
    }

    #[test]
    fn indicator_route_is_consistent() {
        // Exclusion by chord distance (indicator) vs by chart preimage
        // (polar/strip geometry): same integral, looser tolerance.
        let t = RevolutionTorus::new(2.0).unwrap();
        let loose = QuadratureConfig { rel_tol: 1e-6, seed_grid: 32, ..Default::default() };
        for &(alpha, eps) in &[(0.5, 0.2), (2.0, 0.12)] {
            let structured = cutoff_potential_integral(&t, alpha, 0.0, eps, -4.0, &cfg()).unwrap();
            let brute = cutoff_potential_indicator(&t, alpha, 0.0, eps, -4.0, &loose).unwrap();
            let rel = (structured.value - brute.value).abs() / structured.value.abs();
            assert!(
                rel < 1e-3,
                "alpha={alpha} eps={eps}: structured {} indicator {} rel {rel}",
                structured.value,
                brute.value
            );
        }
    }

    #[test]
    fn circle_cutoff_matches_analytic_oracle() {
        // Unit circle, lambda = -2: integral = sqrt(4 - eps^2)/eps.
        let c = Circle::unit();
        for &eps in &[0.3, 0.1, 0.05, 0.01] {
            let exact = math::sqrt(4.0 - eps * eps) / eps;
            for kind in [CurveCutoff::Chord] {
                let got = curve_cutoff_potential(&c, 0.7, eps, -2.0, kind, &cfg()).unwrap();
                assert!(
                    (got.value - exact).abs() < 1e-9 * exact,
                    "eps={eps}: {} vs {exact}",
                    got.value
                );
            }
        }
    }

    #[test]
    fn circle_energy_cutoff() {
        let c = Circle::unit();
        let eps = 0.1;
        let exact = TAU * math::sqrt(4.0 - eps * eps) / eps;
        let got = cutoff_energy_curve(&c, eps, -2.0, CurveCutoff::Chord, &cfg()).unwrap();
        assert!((got.value - exact).abs() < 1e-6 * exact, "{} vs {exact}", got.value);
        assert!((exact - 125.507).abs() < 5e-3);
    }

    #[test]
    fn arclength_cutoff_on_circle() {
        // Chord eps and arclength eps' = 2 asin(eps/2) excise the same arc.
        let c = Circle::unit();
        let eps = 0.1;
        let s_eps = 2.0 * math::asin(0.5 * eps);
        let chord = curve_cutoff_potential(&c, 0.3, eps, -2.0, CurveCutoff::Chord, &cfg()).unwrap();
        let arc =
            curve_cutoff_potential(&c, 0.3, s_eps, -2.0, CurveCutoff::Arclength, &cfg()).unwrap();
        assert!((chord.value - arc.value).abs() < 1e-8 * chord.value.abs());
    }

    #[test]
    fn disk_energy_leading_terms() {
        // pi A / eps^2 with A = pi r^2 dominates as eps -> 0.
        let eps = 0.01;
        let got = disk_cutoff_energy(1.0, eps, -4.0, &cfg()).unwrap();
        let leading = PI * PI / (eps * eps) - 2.0 * TAU / eps;
        assert!(
            (got.value - leading).abs() / leading < 2e-3,
            "{} vs leading {leading}",
            got.value
        );
    }

    #[test]
    fn eps_cap_is_enforced() {
        let t = RevolutionTorus::new(1.05).unwrap();
        let err = cutoff_potential_integral(&t, PI, 0.0, 0.3, -4.0, &cfg());
        assert!(matches!(err, Err(Error::EpsTooLarge { .. })));
    }
}
