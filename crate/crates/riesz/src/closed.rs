//! Closed forms for the torus of revolution: pointwise potential, cutoff
//! potential, energy, its derivative in R, the Delta integrals, and the
//! (numeric) Willmore functional used as a cross-check.

use alloc::format;

use crate::error::{Error, Result};
use crate::math::{self, LN_2, PI, TAU};
use crate::quad;

/// Evaluations lose the square root's precision as `R -> 1`; refuse below
/// this boundary rather than return garbage.
pub const MIN_MAJOR: f64 = 1.0 + 1e-8;

fn check_major(r: f64) -> Result<()> {
    if !(r >= MIN_MAJOR) || !r.is_finite() {
        return Err(Error::domain(format!(
            "torus closed forms require R >= 1 + 1e-8, got {r}"
        )));
    }
    Ok(())
}

/// `sqrt(R^2 - 1)` in product form, keeping precision near `R = 1`.
fn sqrt_r2m1(r: f64) -> f64 {
    math::sqrt((r - 1.0) * (r + 1.0))
}

/// Renormalized energy of the torus `T_R`:
/// `pi^3 / (2 sqrt(R^2-1)) * (R^2 (3 log 2 - 1) + 2 - 2/R^2)`.
pub fn torus_energy_closed(r: f64) -> Result<f64> {
    check_major(r)?;
    let pi3 = PI * PI * PI;
    Ok(pi3 / (2.0 * sqrt_r2m1(r)) * (r * r * (3.0 * LN_2 - 1.0) + 2.0 - 2.0 / (r * r)))
}

/// `d/dR` of the closed energy:
/// `pi^3 (R^2-2) ((R^2-2)^2 + 3 R^4 log(4/e)) / (4 R^3 (R^2-1)^{3/2})`.
pub fn torus_energy_derivative(r: f64) -> Result<f64> {
    check_major(r)?;
    let pi3 = PI * PI * PI;
    let r2m2 = r * r - 2.0;
    let log4e = 2.0 * LN_2 - 1.0;
    let s = sqrt_r2m1(r);
    Ok(pi3 * r2m2 * (r2m2 * r2m2 + 3.0 * r * r * r * r * log4e)
        / (4.0 * r * r * r * s * s * s))
}

/// Pointwise renormalized potential of `T_R` at the meridian angle `alpha`:
/// `3log2 pi R^2/(8(R+cos a)^2) - pi/8 - pi/(4R^2(R+cos a)^2)
///  + pi(1+sin^2 a)/(8(R+cos a)^2) + pi cos a/(4(R+cos a))`.
pub fn torus_potential_closed(r: f64, alpha: f64) -> Result<f64> {
    check_major(r)?;
    let (sa, ca) = math::sin_cos(alpha);
    let ra = r + ca;
    Ok(3.0 * LN_2 * PI * r * r / (8.0 * ra * ra) - PI / 8.0
        - PI / (4.0 * r * r * ra * ra)
        + PI * (1.0 + sa * sa) / (8.0 * ra * ra)
        + PI * ca / (4.0 * ra))
}

/// Cutoff potential of `T_R` before renormalization, valid up to `O(eps)`:
/// `pi/eps^2 - pi R^2/(16(R+cos a)^2) log(R^2 eps^2/(R+cos a)^2) + ...`.
pub fn torus_cutoff_potential_closed(r: f64, alpha: f64, eps: f64) -> Result<f64> {
    check_major(r)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("cutoff display needs eps in (0,1), got {eps}")));
    }
    let (sa, ca) = math::sin_cos(alpha);
    let ra = r + ca;
    Ok(PI / (eps * eps)
        - PI * r * r / (16.0 * ra * ra) * math::ln(r * r * eps * eps / (ra * ra))
        + 3.0 * LN_2 * PI * r * r / (8.0 * ra * ra)
        - PI / 8.0
        - PI / (4.0 * r * r * ra * ra)
        + PI * (1.0 + sa * sa) / (8.0 * ra * ra))
}

/// Chart area of `T_R` (unit scale): `4 pi^2 R`.
pub fn torus_area_closed(r: f64) -> Result<f64> {
    check_major(r)?;
    Ok(4.0 * PI * PI * r)
}

/// `int_T Delta d^2x = 4 pi^2 R^2 / sqrt(R^2 - 1)`.
pub fn delta_integral_closed(r: f64) -> Result<f64> {
    check_major(r)?;
    Ok(4.0 * PI * PI * r * r / sqrt_r2m1(r))
}

/// `int_T Delta log(Delta) d^2x` by 1-D quadrature of the closed
/// `Delta(alpha) = R^2/(R+cos a)^2` against the area element.
pub fn delta_log_delta_integral(r: f64) -> Result<f64> {
    check_major(r)?;
    let f = |alpha: f64| {
        let ra = r + math::cos(alpha);
        let delta = r * r / (ra * ra);
        delta * math::ln(delta) * ra
    };
    Ok(TAU * quad::integrate_1d(&f, 0.0, TAU, 1e-13, 40).value)
}

/// Willmore functional of `T_R` by quadrature of the squared mean curvature;
/// no closed form is assumed.
pub fn willmore_torus(r: f64) -> Result<f64> {
    check_major(r)?;
    let f = |alpha: f64| {
        let ra = r + math::cos(alpha);
        let h = 0.5 * (1.0 + math::cos(alpha) / ra);
        h * h * ra
    };
    Ok(TAU * quad::integrate_1d(&f, 0.0, TAU, 1e-13, 40).value)
}

/// Minimizes the closed energy over `R` by bracketed root finding on the
/// derivative. Returns `(R*, E(R*))`.
pub fn minimize_torus_energy(lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(lo > 1.0 && hi > lo) {
        return Err(Error::Bracket { lo, hi });
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let d_lo = torus_energy_derivative(lo)?;
    let d_hi = torus_energy_derivative(hi)?;
    if !(d_lo < 0.0 && d_hi > 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    let root = bisect_secant(&|r| torus_energy_derivative(r).unwrap(), lo, hi, tol);
    Ok((root, torus_energy_closed(root)?))
}

/// Argmin of the numeric Willmore functional by golden-section search.
pub fn willmore_argmin(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo > 1.0 && hi > lo && tol > 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    let phi = 0.5 * (math::sqrt(5.0) - 1.0);
    let mut a = lo;
    let mut b = hi;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = willmore_torus(c)?;
    let mut fd = willmore_torus(d)?;
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = willmore_torus(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = willmore_torus(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bracketed hybrid root finder: secant steps accepted while they stay in
/// bracket, bisection otherwise.
fn bisect_secant<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    debug_assert!(f_lo * f_hi <= 0.0);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        // Secant candidate.
        let denom = f_hi - f_lo;
        let mut mid = if denom.abs() > 1e-300 {
            hi - f_hi * (hi - lo) / denom
        } else {
            0.5 * (lo + hi)
        };
        let margin = 0.01 * (hi - lo);
        if !(mid > lo + margin && mid < hi - margin) {
            mid = 0.5 * (lo + hi);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = core::f64::consts::SQRT_2;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn energy_at_minimizer_value() {
        // E(T_sqrt2) = pi^3 (6 log 2 - 1)/2.
        let e = torus_energy_closed(SQRT2).unwrap();
        let expected = PI * PI * PI * (6.0 * LN_2 - 1.0) / 2.0;
        assert!(rel(e, expected) < 1e-15);
        assert!((e - 48.9724).abs() < 1e-3);
    }

    #[test]
    fn energy_spot_values() {
        assert!((torus_energy_closed(2.0).unwrap() - 52.07331870356058).abs() < 1e-12);
        assert!((torus_energy_closed(3.0).unwrap() - 62.99392239063836).abs() < 1e-12);
        assert!((torus_energy_closed(1.2).unwrap() - 50.61192575580058).abs() < 1e-12);
    }

    #[test]
    fn domain_guard() {
        assert!(torus_energy_closed(1.0).is_err());
        assert!(torus_energy_closed(1.0 + 1e-9).is_err());
        assert!(torus_energy_derivative(0.9).is_err());
        assert!(torus_potential_closed(1.0, 0.0).is_err());
        assert!(torus_cutoff_potential_closed(2.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn derivative_zero_at_sqrt2_and_signs() {
        // f64's sqrt(2) leaves R^2 - 2 at ~4e-16, so "exactly zero" means
        // machine scale here.
        assert!(torus_energy_derivative(SQRT2).unwrap().abs() < 1e-13);
        assert!((torus_energy_derivative(2.0).unwrap() - 8.40703180721730).abs() < 1e-12);
        assert!(torus_energy_derivative(1.2).unwrap() < 0.0);

        // Unique interior minimum: negative left of sqrt2, positive right.
        for i in 0..50 {
            let r = 1.02 + (SQRT2 - 1.03) * i as f64 / 49.0;
            assert!(torus_energy_derivative(r).unwrap() < 0.0, "at R={r}");
        }
        for i in 0..50 {
            let r = SQRT2 + 0.01 + 8.0 * i as f64 / 49.0;
            assert!(torus_energy_derivative(r).unwrap() > 0.0, "at R={r}");
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for &r in &[1.2, SQRT2 * 1.001, 2.0, 3.0, 10.0] {
            let h = 1e-5;
            let d1 = (torus_energy_closed(r + h).unwrap() - torus_energy_closed(r - h).unwrap())
                / (2.0 * h);
            let d2 = (torus_energy_closed(r + 0.5 * h).unwrap()
                - torus_energy_closed(r - 0.5 * h).unwrap())
                / h;
            let fd = (4.0 * d2 - d1) / 3.0;
            let exact = torus_energy_derivative(r).unwrap();
            assert!(rel(fd, exact) < 1e-7, "R={r}: fd {fd} vs exact {exact}");
        }
    }

    #[test]
    fn energy_diverges_at_both_ends() {
        let near: alloc::vec::Vec<f64> = [1.01, 1.005, 1.001]
            .iter()
            .map(|&r| torus_energy_closed(r).unwrap())
            .collect();
        assert!(near[0] < near[1] && near[1] < near[2]);
        let far: alloc::vec::Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&r| torus_energy_closed(r).unwrap())
            .collect();
        assert!(far[0] < far[1] && far[1] < far[2]);
    }

    #[test]
    fn minimizer_is_sqrt2() {
        let (r, e) = minimize_torus_energy(1.1, 3.0, 1e-12).unwrap();
        assert!((r - SQRT2).abs() < 1e-10);
        let expected = PI * PI * PI * (6.0 * LN_2 - 1.0) / 2.0;
        assert!((e - expected).abs() < 1e-8);

        let (r2, _) = minimize_torus_energy(1.3, 1.5, 1e-12).unwrap();
        assert!((r2 - SQRT2).abs() < 1e-10);

        assert!(matches!(minimize_torus_energy(1.5, 3.0, 1e-10), Err(Error::Bracket { .. })));
        assert!(matches!(minimize_torus_energy(0.5, 3.0, 1e-10), Err(Error::Bracket { .. })));
    }

    #[test]
    fn potential_spot_values_and_evenness() {
        let v = torus_potential_closed(SQRT2, 0.0).unwrap();
        assert!((v - 0.21284).abs() < 1e-4, "got {v}");
        // The closed potential depends on alpha through cos and sin^2 only.
        for &r in &[1.2, SQRT2, 2.0] {
            for i in 0..7 {
                let a = 0.3 + i as f64 * 0.4;
                let plus = torus_potential_closed(r, a).unwrap();
                let minus = torus_potential_closed(r, -a).unwrap();
                assert!(rel(plus, minus) < 1e-15);
            }
        }
        // Direct substitution at (2, pi): R + cos(pi) = 1.
        let v = torus_potential_closed(2.0, PI).unwrap();
        let expected = 3.0 * LN_2 * PI / 2.0 - PI / 8.0 - PI / 16.0 + PI / 8.0 - PI / 4.0;
        assert!(rel(v, expected) < 1e-14);
        assert!((v - 2.28462).abs() < 1e-4);
    }

    #[test]
    fn potential_is_energy_density() {
        // Integrating V against the area element reproduces E(T_R).
        for &r in &[1.2, SQRT2, 2.0, 3.0, 10.0] {
            let f =
                |alpha: f64| torus_potential_closed(r, alpha).unwrap() * (r + math::cos(alpha));
            let e = TAU * quad::integrate_1d(&f, 0.0, TAU, 1e-13, 40).value;
            let expected = torus_energy_closed(r).unwrap();
            assert!(rel(e, expected) < 1e-10, "R={r}: {e} vs {expected}");
        }
    }

    #[test]
    fn cutoff_display_counterterms_cancel() {
        // Subtracting the Eq-style counterterms from the cutoff display must
        // reproduce the renormalized potential exactly, including the K term.
        for &r in &[1.2, SQRT2, 2.0, 5.0] {
            for &alpha in &[0.0, 0.7, 0.5 * PI, PI] {
                for &eps in &[0.3, 0.1, 0.01] {
                    let ra = r + math::cos(alpha);
                    let delta = r * r / (ra * ra);
                    let gauss = math::cos(alpha) / ra;
                    let v_eps = torus_cutoff_potential_closed(r, alpha, eps).unwrap();
                    let renormed = v_eps - PI / (eps * eps)
                        + PI * delta / 16.0 * math::ln(delta * eps * eps)
                        + PI * gauss / 4.0;
                    let direct = torus_potential_closed(r, alpha).unwrap();
                    assert!(
                        (renormed - direct).abs() < 1e-11,
                        "R={r} a={alpha} eps={eps}: {renormed} vs {direct}"
                    );
                }
            }
        }
    }

    #[test]
    fn cutoff_display_eps_dependence() {
        // value(eps/2) - value(eps) = 3 pi/eps^2 - c_log * log(1/4).
        let (r, alpha, eps) = (2.0, 0.9, 0.1);
        let ra = r + math::cos(alpha);
        let c_log = PI * r * r / (16.0 * ra * ra);
        let lhs = torus_cutoff_potential_closed(r, alpha, 0.5 * eps).unwrap()
            - torus_cutoff_potential_closed(r, alpha, eps).unwrap();
        let rhs = 3.0 * PI / (eps * eps) - c_log * math::ln(0.25);
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn delta_integrals() {
        let v = delta_integral_closed(SQRT2).unwrap();
        assert!(rel(v, 8.0 * PI * PI) < 1e-15);
        let v = delta_integral_closed(2.0).unwrap();
        assert!(rel(v, 16.0 * PI * PI / math::sqrt(3.0)) < 1e-15);
        assert!((v - 91.17150012422490).abs() < 1e-12);
        // Asymptotically ~ 4 pi^2 R.
        let big = delta_integral_closed(1e6).unwrap();
        assert!(rel(big, 4.0 * PI * PI * 1e6) < 1e-6);
    }

    #[test]
    fn willmore_checks() {
        let w = willmore_torus(SQRT2).unwrap();
        assert!((w - 2.0 * PI * PI).abs() < 1e-6, "W(sqrt2) = {w}");
        assert!(willmore_torus(2.0).unwrap() > 2.0 * PI * PI);
        let argmin = willmore_argmin(1.1, 3.0, 1e-5).unwrap();
        assert!((argmin - SQRT2).abs() < 1e-3);
    }
}
