//! Least-squares extraction of Laurent-plus-log coefficients from cutoff
//! samples: the numerical side of "expand in eps and take the constant term".

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::math;
use crate::quad::CutoffSample;

/// Basis functions for the asymptotic expansion in `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisTerm {
    /// `eps^-2`
    InvSq,
    /// `eps^-1`
    Inv,
    /// `log eps`
    Log,
    /// `1`
    Const,
    /// `eps`
    Linear,
    /// `eps^2`
    Quadratic,
    /// `eps^3`
    Cubic,
}

impl BasisTerm {
    pub fn eval(self, eps: f64) -> f64 {
        match self {
            BasisTerm::InvSq => 1.0 / (eps * eps),
            BasisTerm::Inv => 1.0 / eps,
            BasisTerm::Log => math::ln(eps),
            BasisTerm::Const => 1.0,
            BasisTerm::Linear => eps,
            BasisTerm::Quadratic => eps * eps,
            BasisTerm::Cubic => eps * eps * eps,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BasisTerm::InvSq => "eps^-2",
            BasisTerm::Inv => "eps^-1",
            BasisTerm::Log => "log(eps)",
            BasisTerm::Const => "1",
            BasisTerm::Linear => "eps",
            BasisTerm::Quadratic => "eps^2",
            BasisTerm::Cubic => "eps^3",
        }
    }
}

/// The standard bases for the three expansion families.
pub mod bases {
    use super::BasisTerm::{self, *};

    /// Closed surface, `lambda = -4`: `pi A / eps^2 - (pi/8) log eps .. + c + O(eps)`.
    pub const SURFACE: [BasisTerm; 4] = [InvSq, Log, Const, Linear];
    /// Knot, `lambda = -2`: `2L/eps + E + O(eps)`.
    pub const CURVE: [BasisTerm; 3] = [Inv, Const, Linear];
    /// Planar domain, `lambda = -4`: `pi A/eps^2 - 2L/eps + c + O(eps)`.
    pub const PLANAR: [BasisTerm; 4] = [InvSq, Inv, Const, Linear];
    /// Counterterm-subtracted potential remainder.
    pub const REMAINDER: [BasisTerm; 3] = [Const, Linear, Quadratic];
}

/// Result of fitting cutoff samples against a basis.
#[derive(Debug, Clone)]
pub struct AsymptoticFit {
    pub basis: Vec<BasisTerm>,
    pub coefficients: Vec<f64>,
    /// Euclidean norm of the sample residuals.
    pub residual: f64,
    /// Condition estimate of the (column-scaled) design matrix.
    pub condition: f64,
}

impl AsymptoticFit {
    pub fn coefficient(&self, term: BasisTerm) -> Option<f64> {
        self.basis
            .iter()
            .position(|&t| t == term)
            .map(|i| self.coefficients[i])
    }

    /// Fitted model evaluated at `eps`.
    pub fn eval(&self, eps: f64) -> f64 {
        self.basis
            .iter()
            .zip(&self.coefficients)
            .map(|(t, c)| c * t.eval(eps))
            .sum()
    }
}

/// Fits `samples` against `basis` in the least-squares sense.
///
/// Requires at least `basis.len() + 2` samples whose `eps` values span a
/// factor of 8, so the singular terms are distinguishable from the constant.
pub fn fit_asymptotics(samples: &[CutoffSample], basis: &[BasisTerm]) -> Result<AsymptoticFit> {
    if basis.is_empty() {
        return Err(Error::domain("empty fit basis"));
    }
    if samples.len() < basis.len() + 2 {
        return Err(Error::domain(format!(
            "need at least {} samples for a {}-term basis, got {}",
            basis.len() + 2,
            basis.len(),
            samples.len()
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for s in samples {
        if !(s.eps > 0.0) {
            return Err(Error::domain(format!("cutoff sample with eps {} <= 0", s.eps)));
        }
        lo = lo.min(s.eps);
        hi = hi.max(s.eps);
    }
    if hi / lo < 8.0 {
        return Err(Error::domain(format!(
            "eps ladder must span a factor of 8, got {:.3}",
            hi / lo
        )));
    }

    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|t| samples.iter().map(|s| t.eval(s.eps)).collect())
        .collect();
    let rhs: Vec<f64> = samples.iter().map(|s| s.value).collect();
    let (coefficients, residual, condition) = linalg::lstsq(&cols, &rhs);
    if !condition.is_finite() || condition > 1e13 {
        return Err(Error::IllConditionedFit { condition });
    }
    Ok(AsymptoticFit {
        basis: basis.to_vec(),
        coefficients,
        residual,
        condition,
    })
}
