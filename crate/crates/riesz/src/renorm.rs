//! The renormalization engine: cutoff integrals minus counterterms,
//! extrapolated to `eps -> 0`, and integrated into energies.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::closed;
use crate::curve::Curve;
use crate::cutoff::{self, CurveCutoff};
use crate::error::{Error, Result};
use crate::fit::{self, AsymptoticFit, BasisTerm};
use crate::math::{self, Accumulator, PI};
use crate::parallel;
use crate::quad::{CutoffSample, QuadratureConfig};
use crate::surface::Surface;
use crate::vec3::Vec3;

/// Counterterms subtracted from a cutoff integral before extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counterterms {
    /// Coefficient of `1/eps^2` (surfaces) or `1/eps` (knots).
    pub divergent: f64,
    /// Coefficient in front of `log(c Delta eps^2)`; zero at umbilics.
    pub log_coeff: f64,
    /// Constant shift (`pi K / 4` for surfaces, zero for knots).
    pub const_shift: f64,
}

/// A renormalized potential value with its extrapolation diagnostics.
#[derive(Debug, Clone)]
pub struct RenormPotentialResult {
    pub value: f64,
    pub fit: AsymptoticFit,
    pub counterterms: Counterterms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMethod {
    ClosedForm,
    NumericRenormalized,
    CutoffFit,
}

impl EnergyMethod {
    pub fn label(&self) -> &'static str {
        match self {
            EnergyMethod::ClosedForm => "closed-form",
            EnergyMethod::NumericRenormalized => "numeric-renormalized",
            EnergyMethod::CutoffFit => "cutoff-fit",
        }
    }
}

/// Energy of a surface or knot, with provenance and an error estimate.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub value: f64,
    pub err_est: f64,
    pub method: EnergyMethod,
    pub descriptor: String,
}

/// Tuning knobs for the renormalization pipeline.
#[derive(Debug, Clone)]
pub struct RenormConfig {
    pub quad: QuadratureConfig,
    /// Explicit eps ladder; `None` derives one from the surface scale.
    pub ladder: Option<Vec<f64>>,
    /// `c` in the log counterterm `(pi Delta/16) log(c Delta eps^2)`.
    pub log_normalization: f64,
    /// Accept a potential when `fit residual <= residual_rel * |value| +
    /// residual_abs`.
    pub residual_rel: f64,
    pub residual_abs: f64,
    /// Starting outer-grid resolution for energies.
    pub outer_grid: usize,
    /// Outer grid cap (the grid doubles until the energy stabilizes).
    pub outer_grid_max: usize,
    /// Relative change at which the outer doubling stops.
    pub outer_rel_tol: f64,
    /// Exploit `f(u,v) = f(-u,v)` / `f(u,-v)` symmetry of the outer
    /// integrand (quarter-grid evaluation).
    pub outer_symmetry: (bool, bool),
}

impl Default for RenormConfig {
    fn default() -> Self {
        RenormConfig {
            quad: QuadratureConfig::default(),
            ladder: None,
            log_normalization: 1.0,
            residual_rel: 1e-4,
            residual_abs: 1e-6,
            outer_grid: 16,
            outer_grid_max: 256,
            outer_rel_tol: 5e-7,
            outer_symmetry: (false, false),
        }
    }
}

impl RenormConfig {
    /// Default geometric ladder for a surface: 10 radii from
    /// `~0.1 * scale` down by factors of `sqrt(2)`, kept below the chart cap.
    pub fn surface_ladder<S: Surface + ?Sized>(&self, surface: &S) -> Vec<f64> {
        if let Some(l) = &self.ladder {
            return l.clone();
        }
        let base = (0.1 * surface.length_scale()).min(0.45 * surface.eps_cap());
        let ratio = 1.0 / math::sqrt(2.0);
        (0..10).map(|k| base * math::powi(ratio, k as i32)).collect()
    }

    /// Default ladder for a knot, scaled by its length relative to the unit
    /// circle.
    pub fn curve_ladder<C: Curve + ?Sized>(&self, curve: &C) -> Vec<f64> {
        if let Some(l) = &self.ladder {
            return l.clone();
        }
        let base = 0.1 * curve.length() / math::TAU;
        let ratio = 1.0 / math::sqrt(2.0);
        (0..10).map(|k| base * math::powi(ratio, k as i32)).collect()
    }
}

/// Remainder basis `{1, eps, eps^2, eps^3}`: the divergent and log pieces
/// are subtracted analytically, never fitted.
const REMAINDER_BASIS: [BasisTerm; 4] = [
    BasisTerm::Const,
    BasisTerm::Linear,
    BasisTerm::Quadratic,
    BasisTerm::Cubic,
];

fn extrapolate_remainder(
    remainders: &[CutoffSample],
    counterterms: Counterterms,
    residual_rel: f64,
    residual_abs: f64,
) -> Result<RenormPotentialResult> {
    let fit = fit::fit_asymptotics(remainders, &REMAINDER_BASIS)?;
    let value = fit.coefficient(BasisTerm::Const).unwrap();
    let threshold = residual_rel * value.abs() + residual_abs;
    if !(fit.residual <= threshold) {
        return Err(Error::NonConvergence { value, residual: fit.residual, threshold });
    }
    Ok(RenormPotentialResult { value, fit, counterterms })
}

/// Renormalized `r^-4` potential of a surface at chart point `(u0, v0)`:
/// cutoff integral minus `pi/eps^2 - (pi Delta/16) log(Delta eps^2) - pi K/4`,
/// extrapolated to `eps -> 0`.
pub fn surface_potential<S: Surface + ?Sized>(
    surface: &S,
    u0: f64,
    v0: f64,
    cfg: &RenormConfig,
) -> Result<RenormPotentialResult> {
    let data = surface.point_data(u0, v0)?;
    let ladder = cfg.surface_ladder(surface);
    let samples = cutoff::cutoff_potential_ladder(surface, u0, v0, &ladder, -4.0, &cfg.quad)?;

    let log_coeff = PI * data.delta / 16.0;
    let counterterms =
        Counterterms { divergent: PI, log_coeff, const_shift: PI * data.gauss / 4.0 };
    let remainders: Vec<CutoffSample> = samples
        .iter()
        .map(|s| {
            // Delta = 0 kills the log prefactor; the counterterm is zero by
            // continuous extension.
            let log_term = if data.delta > 0.0 {
                log_coeff * math::ln(cfg.log_normalization * data.delta * s.eps * s.eps)
            } else {
                0.0
            };
            CutoffSample {
                eps: s.eps,
                value: s.value - PI / (s.eps * s.eps) + log_term + counterterms.const_shift,
                err_est: s.err_est,
            }
        })
        .collect();
    extrapolate_remainder(&remainders, counterterms, cfg.residual_rel, cfg.residual_abs)
}

/// Same as [`surface_potential`], with the base point given in space; points
/// off the surface (chord residual above `1e-9 * diameter`) are rejected.
pub fn surface_potential_at<S: Surface + ?Sized>(
    surface: &S,
    point: Vec3,
    cfg: &RenormConfig,
) -> Result<RenormPotentialResult> {
    let (u, v) = surface.locate(point, 1e-9 * surface.diameter().max(1.0))?;
    surface_potential(surface, u, v, cfg)
}

/// Renormalized knot potential at curve parameter `t0`: cutoff integral of
/// `|x-y|^-2` minus `2/eps`.
pub fn knot_potential<C: Curve + ?Sized>(
    curve: &C,
    t0: f64,
    kind: CurveCutoff,
    cfg: &RenormConfig,
) -> Result<RenormPotentialResult> {
    let ladder = cfg.curve_ladder(curve);
    let counterterms = Counterterms { divergent: 2.0, log_coeff: 0.0, const_shift: 0.0 };
    let remainders: Vec<CutoffSample> = ladder
        .iter()
        .map(|&eps| {
            cutoff::curve_cutoff_potential(curve, t0, eps, -2.0, kind, &cfg.quad).map(|s| {
                CutoffSample { eps, value: s.value - 2.0 / eps, err_est: s.err_est }
            })
        })
        .collect::<Result<_>>()?;
    extrapolate_remainder(&remainders, counterterms, cfg.residual_rel, cfg.residual_abs)
}

// ---------------------------------------------------------------------------
// Outer integration: periodic trapezoid grids with doubling, deterministic
// parallel evaluation, fixed-order reduction.
// ---------------------------------------------------------------------------

/// Nodes and weights of a (possibly symmetry-halved) trapezoid grid on
/// `[x0, x0 + span]`.
fn trapezoid_axis(x0: f64, span: f64, n: usize, periodic: bool, even: bool) -> Vec<(f64, f64)> {
    let h = span / n as f64;
    if periodic {
        if even {
            // f(x0 + t) = f(x0 - t): fold onto [x0, x0 + span/2].
            debug_assert!(n % 2 == 0);
            let m = n / 2;
            (0..=m)
                .map(|i| {
                    let w = if i == 0 || i == m { 1.0 } else { 2.0 };
                    (x0 + i as f64 * h, w * h)
                })
                .collect()
        } else {
            (0..n).map(|i| (x0 + i as f64 * h, h)).collect()
        }
    } else {
        (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                (x0 + i as f64 * h, w * h)
            })
            .collect()
    }
}

fn energy_grid_pass<F>(f: &F, nodes_u: &[(f64, f64)], nodes_v: &[(f64, f64)]) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let nu = nodes_u.len();
    let nv = nodes_v.len();
    let values = parallel::map_indexed(nu * nv, |idx| {
        let (i, j) = (idx / nv, idx % nv);
        f(nodes_u[i].0, nodes_v[j].0).map(|val| val * nodes_u[i].1 * nodes_v[j].1)
    });
    let mut acc = Accumulator::new();
    for v in values {
        acc.add(v?);
    }
    Ok(acc.total())
}

/// Renormalized surface energy `E(S) = int_S V(x; S) d^2x`.
///
/// For revolution-symmetric charts the `v` integration collapses to the
/// period factor; otherwise a full 2-D periodic grid is used. The grid
/// doubles until the value moves by less than `outer_rel_tol`.
pub fn surface_energy<S: Surface + ?Sized>(surface: &S, cfg: &RenormConfig) -> Result<EnergyReport> {
    let dom = surface.domain();
    let descriptor = format!("surface(scale={})", surface.length_scale());

    let potential_density = |u: f64, v: f64| -> Result<f64> {
        let p = surface_potential(surface, u, v, cfg)?;
        Ok(p.value * surface.area_density(u, v))
    };

    let mut n = cfg.outer_grid.max(8);
    let mut prev = f64::NAN;
    let mut prev_diff = f64::INFINITY;
    loop {
        let nodes_u = trapezoid_axis(
            dom.u.0,
            dom.u_span(),
            n,
            dom.u_periodic,
            cfg.outer_symmetry.0 && dom.u_periodic,
        );
        let value = if surface.is_revolution() {
            let nodes_v = [(dom.v.0, dom.v_span())];
            energy_grid_pass(&potential_density, &nodes_u, &nodes_v)?
        } else {
            let nodes_v = trapezoid_axis(
                dom.v.0,
                dom.v_span(),
                n,
                dom.v_periodic,
                cfg.outer_symmetry.1 && dom.v_periodic,
            );
            energy_grid_pass(&potential_density, &nodes_u, &nodes_v)?
        };
        let diff = (value - prev).abs();
        if diff <= cfg.outer_rel_tol * value.abs().max(1e-12) || n >= cfg.outer_grid_max {
            return Ok(EnergyReport {
                value,
                err_est: diff.min(prev_diff),
                method: EnergyMethod::NumericRenormalized,
                descriptor,
            });
        }
        prev = value;
        prev_diff = diff;
        n *= 2;
    }
}

/// Renormalized knot energy `E(K) = int_K V(x; K) dx`.
pub fn knot_energy<C: Curve + ?Sized>(
    curve: &C,
    kind: CurveCutoff,
    cfg: &RenormConfig,
) -> Result<EnergyReport> {
    let period = curve.period();
    let f = |t: f64, _: f64| -> Result<f64> {
        let p = knot_potential(curve, t, kind, cfg)?;
        Ok(p.value * curve.speed(t))
    };
    let mut n = cfg.outer_grid.max(8);
    let mut prev = f64::NAN;
    let mut prev_diff = f64::INFINITY;
    loop {
        let nodes_t = trapezoid_axis(0.0, period, n, true, false);
        let value = energy_grid_pass(&f, &nodes_t, &[(0.0, 1.0)])?;
        let diff = (value - prev).abs();
        if diff <= cfg.outer_rel_tol * value.abs().max(1e-9) || n >= cfg.outer_grid_max {
            return Ok(EnergyReport {
                value,
                err_est: diff.min(prev_diff),
                method: EnergyMethod::NumericRenormalized,
                descriptor: String::from("knot"),
            });
        }
        prev = value;
        prev_diff = diff;
        n *= 2;
    }
}

// ---------------------------------------------------------------------------
// Expansion checks against the asymptotic families.
// ---------------------------------------------------------------------------

/// What the fitted cutoff-energy coefficients should be.
#[derive(Debug, Clone)]
pub struct ExpansionPrediction {
    pub labels: Vec<&'static str>,
    pub fitted: Vec<f64>,
    pub predicted: Vec<f64>,
}

/// Fits the cutoff energy of the unit-length-scale circle (`lambda = -2`)
/// and compares with `(2L, E)`.
pub fn expansion_check_circle<C: Curve + ?Sized>(
    curve: &C,
    cfg: &RenormConfig,
) -> Result<(AsymptoticFit, ExpansionPrediction)> {
    let scale = curve.length() / math::TAU;
    let ladder: Vec<f64> = (0..9)
        .map(|k| 0.2 * scale * math::powi(1.0 / math::sqrt(2.0), k))
        .collect();
    let samples: Vec<CutoffSample> = ladder
        .iter()
        .map(|&eps| cutoff::cutoff_energy_curve(curve, eps, -2.0, CurveCutoff::Chord, &cfg.quad))
        .collect::<Result<_>>()?;
    let fit = fit::fit_asymptotics(&samples, &fit::bases::CURVE)?;
    let energy = knot_energy(curve, CurveCutoff::Chord, cfg)?;
    let prediction = ExpansionPrediction {
        labels: vec!["2L", "E"],
        fitted: vec![
            fit.coefficient(BasisTerm::Inv).unwrap(),
            fit.coefficient(BasisTerm::Const).unwrap(),
        ],
        predicted: vec![2.0 * curve.length(), energy.value],
    };
    Ok((fit, prediction))
}

/// Fits the cutoff energy of the torus `T_R` (`lambda = -4`) and compares
/// with `(pi A, -(pi/8) int Delta, E - (pi/16) int Delta log Delta)`
/// (`chi = 0` for the torus).
pub fn expansion_check_torus(
    major: f64,
    cfg: &RenormConfig,
) -> Result<(AsymptoticFit, ExpansionPrediction)> {
    let torus = crate::surface::RevolutionTorus::new(major)?;
    let base = (0.45 * torus.eps_cap()).min(0.25);
    let ladder: Vec<f64> =
        (0..9).map(|k| base * math::powi(1.0 / math::sqrt(2.0), k)).collect();
    let samples: Vec<CutoffSample> = {
        let list = parallel::map_indexed(ladder.len(), |i| {
            cutoff::cutoff_energy_surface(&torus, ladder[i], -4.0, &cfg.quad)
        });
        list.into_iter().collect::<Result<_>>()?
    };
    let fit = fit::fit_asymptotics(&samples, &fit::bases::SURFACE)?;
    let prediction = ExpansionPrediction {
        labels: vec!["pi*A", "-(pi/8)*int(Delta)", "E - (pi/16)*int(Delta log Delta)"],
        fitted: vec![
            fit.coefficient(BasisTerm::InvSq).unwrap(),
            fit.coefficient(BasisTerm::Log).unwrap(),
            fit.coefficient(BasisTerm::Const).unwrap(),
        ],
        predicted: vec![
            PI * closed::torus_area_closed(major)?,
            -PI / 8.0 * closed::delta_integral_closed(major)?,
            closed::torus_energy_closed(major)? - PI / 16.0 * closed::delta_log_delta_integral(major)?,
        ],
    };
    Ok((fit, prediction))
}

/// Fits the cutoff energy of the unit disk (`lambda = -4`): leading terms
/// `(pi A, -2L)`.
pub fn expansion_check_disk(cfg: &RenormConfig) -> Result<(AsymptoticFit, ExpansionPrediction)> {
    let ladder: Vec<f64> =
        (0..9).map(|k| 0.08 * math::powi(1.0 / math::sqrt(2.0), k)).collect();
    let samples: Vec<CutoffSample> = ladder
        .iter()
        .map(|&eps| cutoff::disk_cutoff_energy(1.0, eps, -4.0, &cfg.quad))
        .collect::<Result<_>>()?;
    let fit = fit::fit_asymptotics(&samples, &fit::bases::PLANAR)?;
    let prediction = ExpansionPrediction {
        labels: vec!["pi*A", "-2L"],
        fitted: vec![
            fit.coefficient(BasisTerm::InvSq).unwrap(),
            fit.coefficient(BasisTerm::Inv).unwrap(),
        ],
        predicted: vec![PI * PI, -4.0 * PI],
    };
    Ok((fit, prediction))
}

// ---------------------------------------------------------------------------
// Tube-of-a-circle series.
// ---------------------------------------------------------------------------

/// Cutoff energy of the boundary torus of the radius-`eps` tube around the
/// unit circle. By scale invariance this is the closed torus energy at
/// `R = 1/eps`.
pub fn tube_energy(eps_tube: f64) -> Result<f64> {
    if !(eps_tube > 0.0 && eps_tube < 1.0) {
        return Err(Error::domain(format!(
            "tube radius must lie in (0, 1), got {eps_tube}"
        )));
    }
    closed::torus_energy_closed(1.0 / eps_tube)
}

/// Leading tube-series coefficients `a/eps + b eps + c eps^3 + ...`.
pub fn tube_series_coefficients() -> (f64, f64, f64) {
    let pi3 = PI * PI * PI;
    (
        pi3 * (3.0 * math::LN_2 - 1.0) / 2.0,
        3.0 * pi3 * (math::LN_2 + 1.0) / 4.0,
        pi3 * (9.0 * math::LN_2 - 11.0) / 16.0,
    )
}

/// Residual of the tube energy after removing the `1/eps` and `eps` terms.
pub fn tube_series_residual(eps_tube: f64) -> Result<f64> {
    let (a, b, _) = tube_series_coefficients();
    Ok(tube_energy(eps_tube)? - a / eps_tube - b * eps_tube)
}

/// Extracts the linear series coefficient from two tube radii by Richardson
/// extrapolation in `eps^2`.
pub fn tube_linear_coefficient(eps_big: f64, eps_small: f64) -> Result<f64> {
    let (a, _, _) = tube_series_coefficients();
    let g = |e: f64| -> Result<f64> { Ok((tube_energy(e)? - a / e) / e) };
    let g_big = g(eps_big)?;
    let g_small = g(eps_small)?;
    let r = (eps_big / eps_small) * (eps_big / eps_small);
    Ok(g_small + (g_small - g_big) / (r - 1.0))
}

/// Extracts the cubic series coefficient from three tube radii by solving
/// the `{eps^3, eps^5, eps^7}` interpolation exactly.
pub fn tube_cubic_coefficient(eps: [f64; 3]) -> Result<f64> {
    let mut a = [0.0f64; 9];
    let mut b = [0.0f64; 3];
    for i in 0..3 {
        let e = eps[i];
        let e3 = e * e * e;
        a[i * 3] = e3;
        a[i * 3 + 1] = e3 * e * e;
        a[i * 3 + 2] = e3 * e * e * e * e;
        b[i] = tube_series_residual(e)?;
    }
    let x = crate::linalg::solve_square(&a, &b, 3)
        .ok_or_else(|| Error::domain("degenerate tube radii"))?;
    Ok(x[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Circle, Ellipse};
    use crate::surface::{RevolutionTorus, Sphere};

    const SQRT2: f64 = core::f64::consts::SQRT_2;

    #[test]
    fn sphere_potential_vanishes() {
        let cfg = RenormConfig::default();
        for &r in &[1.0, 3.0] {
            let s = Sphere::new(r).unwrap();
            for &(u, v) in &[(0.0, 0.0), (0.6, 2.0)] {
                let p = surface_potential(&s, u, v, &cfg).unwrap();
                assert!(
                    p.value.abs() < 1e-6,
                    "V(sphere r={r}) at ({u},{v}) = {}",
                    p.value
                );
            }
        }
    }

    #[test]
    fn torus_potential_matches_closed_form() {
        let cfg = RenormConfig::default();
        for &r in &[1.2, SQRT2, 2.0, 3.0] {
            let t = RevolutionTorus::new(r).unwrap();
            for &alpha in &[0.0, 0.25 * PI, 0.5 * PI, 0.75 * PI, PI] {
                let numeric = surface_potential(&t, alpha, 0.0, &cfg).unwrap();
                let exact = closed::torus_potential_closed(r, alpha).unwrap();
                assert!(
                    (numeric.value - exact).abs() < 1e-4,
                    "R={r} alpha={alpha}: numeric {} closed {exact} (residual {:.2e})",
                    numeric.value,
                    numeric.fit.residual,
                );
            }
        }
    }

    #[test]
    fn torus_potential_evenness() {
        let cfg = RenormConfig::default();
        let t = RevolutionTorus::new(SQRT2).unwrap();
        let plus = surface_potential(&t, 0.9, 0.0, &cfg).unwrap();
        let minus = surface_potential(&t, -0.9, 0.0, &cfg).unwrap();
        assert!((plus.value - minus.value).abs() < 1e-8);
    }

    #[test]
    fn potential_at_point_validates_membership() {
        let cfg = RenormConfig::default();
        let t = RevolutionTorus::new(2.0).unwrap();
        let on = t.chart(1.0, 2.0);
        let p = surface_potential_at(&t, on, &cfg).unwrap();
        let exact = closed::torus_potential_closed(2.0, 1.0).unwrap();
        assert!((p.value - exact).abs() < 1e-4);
        let off = on + Vec3::new(0.0, 0.0, 1e-3);
        assert!(matches!(
            surface_potential_at(&t, off, &cfg),
            Err(Error::PointNotOnSurface { .. })
        ));
    }

    #[test]
    fn circle_knot_potential_vanishes_under_both_cutoffs() {
        let cfg = RenormConfig::default();
        for &r in &[1.0, 5.0] {
            let c = Circle::new(r).unwrap();
            let chord = knot_potential(&c, 0.4, CurveCutoff::Chord, &cfg).unwrap();
            assert!(chord.value.abs() < 1e-8, "chord cutoff, r={r}: {}", chord.value);
            let arc = knot_potential(&c, 0.4, CurveCutoff::Arclength, &cfg).unwrap();
            assert!(arc.value.abs() < 1e-8, "arclength cutoff, r={r}: {}", arc.value);
            assert!((chord.value - arc.value).abs() < 1e-6);
        }
    }

    #[test]
    fn ellipse_potential_positive_and_stable() {
        // Max-curvature point of the a=1.5, b=1 ellipse is t=0. Reference:
        // the same limit computed on a finer ladder with tighter quadrature.
        let e = Ellipse::new(1.5, 1.0).unwrap();
        let cfg = RenormConfig::default();
        let v = knot_potential(&e, 0.0, CurveCutoff::Chord, &cfg).unwrap();
        let fine = RenormConfig {
            ladder: Some((0..12).map(|k| 0.06 * math::powi(0.75, k)).collect()),
            quad: QuadratureConfig { rel_tol: 1e-11, ..Default::default() },
            ..Default::default()
        };
        let v_ref = knot_potential(&e, 0.0, CurveCutoff::Chord, &fine).unwrap();
        assert!(v.value > 0.0);
        assert!(
            (v.value - v_ref.value).abs() < 1e-6,
            "default {} vs refined {}",
            v.value,
            v_ref.value
        );
    }

    #[test]
    fn circle_knot_energy_vanishes() {
        let cfg = RenormConfig::default();
        for &r in &[1.0, 2.0] {
            let c = Circle::new(r).unwrap();
            let e = knot_energy(&c, CurveCutoff::Chord, &cfg).unwrap();
            assert!(e.value.abs() < 1e-6, "E(circle r={r}) = {}", e.value);
        }
    }

    #[test]
    fn ellipse_energy_positive() {
        let e = Ellipse::new(1.5, 1.0).unwrap();
        let cfg = RenormConfig::default();
        let rep = knot_energy(&e, CurveCutoff::Chord, &cfg).unwrap();
        assert!(rep.value > 0.0, "E(ellipse) = {}", rep.value);
    }

    #[test]
    fn tube_series() {
        // Verbatim evaluation at eps = 1/2.
        let direct = PI * PI * PI * 0.5 / (2.0 * math::sqrt(0.75))
            * ((3.0 * math::LN_2 - 1.0) * 4.0 + 2.0 - 0.5);
        assert!((tube_energy(0.5).unwrap() - direct).abs() < 1e-12);
        assert!(tube_energy(1.0).is_err());
        assert!(tube_energy(0.0).is_err());

        let (_, b, c3) = tube_series_coefficients();
        assert!((b - 39.3735).abs() < 1e-3);
        let lin = tube_linear_coefficient(1e-2, 1e-3).unwrap();
        assert!((lin - b).abs() < 1e-3 * b, "richardson {lin} vs {b}");
        let cubic = tube_cubic_coefficient([2e-2, 1e-2, 5e-3]).unwrap();
        assert!((cubic - c3).abs() < 1e-2 * c3.abs(), "cubic {cubic} vs {c3}");
        assert!((c3 + 9.2274).abs() < 1e-3);
    }
}
