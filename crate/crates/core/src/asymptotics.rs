//! Closed-form limits of the magnetic energy `E_AF - E_FM` and force
//! `F_AF - F_FM`, and the classification of a Drude pair into its three
//! distance windows (`D >> c tau`, `c/omega_p << D << c tau`,
//! `D << c/omega_p`).
//!
//! All force expressions are exactly `-d(delta_e)/dD` of their paired
//! energy with any cutoff frequency held fixed. Short-distance energies
//! carry `ln(c / (omega* D))`, where `omega*` is only known up to a factor of
//! order one; compare forces when the additive constant matters.

use core::f64::consts::{PI, SQRT_2};

use libm::{exp, log, sqrt};

use crate::materials::{DcTransportParams, DrudeParams, MaterialModel, OscillatorParams};
use crate::quadrature::adaptive_scalar;
use crate::units::{PhysicalConstants, ZETA_3};
use crate::{Error, Result};

/// A point is "inside" a window when its defining inequalities hold by at
/// least this factor.
pub const WINDOW_FACTOR: f64 = 10.0;

/// Which limit, and therefore which closed form, applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeTag {
    LongDrude,
    IntermediateDrude,
    ShortDrude,
    LongRealistic,
    ShortRealistic,
    OscillatorShort,
}

impl RegimeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeTag::LongDrude => "long_drude",
            RegimeTag::IntermediateDrude => "intermediate_drude",
            RegimeTag::ShortDrude => "short_drude",
            RegimeTag::LongRealistic => "long_realistic",
            RegimeTag::ShortRealistic => "short_realistic",
            RegimeTag::OscillatorShort => "oscillator_short",
        }
    }
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub tag: RegimeTag,
    /// Distance window `(D_min, D_max)` in cm; `D_max` may be infinite.
    pub window: (f64, f64),
    /// `D / (c tau)`.
    pub d_over_c_tau: f64,
    /// `D omega_p / c`.
    pub d_omega_p_over_c: f64,
}

impl Regime {
    /// Smallest ratio by which `d` clears the window boundaries.
    pub fn margin(&self, d: f64) -> f64 {
        let lo = if self.window.0 > 0.0 { d / self.window.0 } else { f64::INFINITY };
        let hi = self.window.1 / d;
        lo.min(hi)
    }
}

/// Sort a Drude pair at distance `d` into its window; boundaries at
/// `c tau` and `c / omega_p`.
pub fn classify(params: &DrudeParams, d: f64, constants: &PhysicalConstants) -> Result<Regime> {
    positive_distance(d)?;
    let c_tau = constants.c * params.tau;
    let c_wp = constants.c / params.omega_p;
    let (tag, window) = if d >= c_tau {
        (RegimeTag::LongDrude, (c_tau, f64::INFINITY))
    } else if d >= c_wp {
        (RegimeTag::IntermediateDrude, (c_wp, c_tau))
    } else {
        (RegimeTag::ShortDrude, (0.0, c_wp))
    };
    Ok(Regime { tag, window, d_over_c_tau: d / c_tau, d_omega_p_over_c: d / c_wp })
}

/// A closed-form limit evaluated at one distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticResult {
    /// Energy difference per area, erg/cm^2.
    pub delta_e: f64,
    /// Force difference per area, dyn/cm^2.
    pub delta_f: f64,
    pub formula: RegimeTag,
    /// Cutoff frequency inside the logarithm, if the formula has one.
    pub cutoff_used: Option<f64>,
    /// Whether `d` lies inside the formula's window by [`WINDOW_FACTOR`].
    pub in_window: bool,
}

fn positive_distance(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDistance(d))
    }
}

fn positive_cutoff(w: f64) -> Result<f64> {
    if w > 0.0 && w.is_finite() {
        Ok(w)
    } else {
        Err(Error::InvalidParameter { name: "omega_star", reason: "must be positive and finite" })
    }
}

/// `D >> c tau`: energy `~ D^-4`, force `~ D^-5`.
pub fn drude_long(params: &DrudeParams, d: f64, constants: &PhysicalConstants) -> Result<AsymptoticResult> {
    positive_distance(d)?;
    let k = constants;
    let rho2 = params.omega_c * params.omega_c / (params.omega_p * params.omega_p);
    let delta_e = -3.0 * ZETA_3 / (16.0 * PI * PI) * k.hbar * k.c * k.c * rho2 * params.tau / (d * d * d * d);
    Ok(AsymptoticResult {
        delta_e,
        delta_f: 4.0 * delta_e / d,
        formula: RegimeTag::LongDrude,
        cutoff_used: None,
        in_window: d >= WINDOW_FACTOR * k.c * params.tau,
    })
}

/// `c/omega_p << D << c tau`: energy `~ D^-3`, force `~ D^-4`, no `tau`.
pub fn drude_intermediate(
    params: &DrudeParams,
    d: f64,
    constants: &PhysicalConstants,
) -> Result<AsymptoticResult> {
    positive_distance(d)?;
    let k = constants;
    let rho2 = params.omega_c * params.omega_c / (params.omega_p * params.omega_p);
    let delta_e = -k.hbar * k.c * rho2 / (24.0 * d * d * d);
    Ok(AsymptoticResult {
        delta_e,
        delta_f: 3.0 * delta_e / d,
        formula: RegimeTag::IntermediateDrude,
        cutoff_used: None,
        in_window: d >= WINDOW_FACTOR * k.c / params.omega_p
            && d * WINDOW_FACTOR <= k.c * params.tau,
    })
}

/// `D << c/omega_p`: force `~ 1/D`, energy logarithmic with cutoff
/// `omega_star` (default `omega_p`).
pub fn drude_short(
    params: &DrudeParams,
    d: f64,
    omega_star: Option<f64>,
    constants: &PhysicalConstants,
) -> Result<AsymptoticResult> {
    positive_distance(d)?;
    let k = constants;
    let w_star = positive_cutoff(omega_star.unwrap_or(params.omega_p))?;
    let amp = k.hbar * params.omega_c * params.omega_c * params.omega_p
        / (16.0 * PI * SQRT_2 * k.c * k.c);
    Ok(AsymptoticResult {
        delta_e: -amp * log(k.c / (w_star * d)),
        delta_f: -amp / d,
        formula: RegimeTag::ShortDrude,
        cutoff_used: Some(w_star),
        in_window: d * WINDOW_FACTOR <= k.c / params.omega_p,
    })
}

/// Large-distance limit for materials described by their dc conductivity
/// and anomalous Hall angle.
pub fn realistic_long(
    a: &DcTransportParams,
    b: &DcTransportParams,
    d: f64,
    constants: &PhysicalConstants,
) -> Result<AsymptoticResult> {
    positive_distance(d)?;
    let k = constants;
    let delta_e = -3.0 * ZETA_3 / (64.0 * PI * PI * PI) * k.hbar * k.c * k.c * a.theta * b.theta
        / (sqrt(a.sigma * b.sigma) * (d * d * d * d));
    let tau = a.tau_equiv.max(b.tau_equiv);
    let sigma_min = a.sigma.min(b.sigma);
    Ok(AsymptoticResult {
        delta_e,
        delta_f: 4.0 * delta_e / d,
        formula: RegimeTag::LongRealistic,
        cutoff_used: None,
        in_window: d >= WINDOW_FACTOR * k.c * tau
            && d * 4.0 * PI * sigma_min >= WINDOW_FACTOR * k.c,
    })
}

fn short_from_integral(
    integral: f64,
    d: f64,
    w_star: f64,
    formula: RegimeTag,
    in_window: bool,
    k: &PhysicalConstants,
) -> AsymptoticResult {
    let amp = k.hbar * integral / (4.0 * PI * PI * k.c * k.c);
    AsymptoticResult {
        delta_e: -amp * log(k.c / (w_star * d)),
        delta_f: -amp / d,
        formula,
        cutoff_used: Some(w_star),
        in_window,
    }
}

/// `int_0^inf omega^2 eps_xy^A eps_xy^B / ((1 + eps_xx^A)(1 + eps_xx^B)) d omega`,
/// the spectral weight entering the short-distance limit.
pub fn short_distance_integral(a: &MaterialModel, b: &MaterialModel) -> Result<f64> {
    let ws = sqrt(a.characteristic_frequency() * b.characteristic_frequency());
    // integrate omega f(omega) over y = ln(omega / ws)
    let g = |y: f64| -> f64 {
        let w = ws * exp(y);
        let num = a.eps_xy_unchecked(w) * b.eps_xy_unchecked(w);
        let den = (1.0 + a.eps_xx_unchecked(w)) * (1.0 + b.eps_xx_unchecked(w));
        w * w * w * num / den
    };
    const Y: f64 = 40.0;
    for (inner, outer, which) in [(Y - 5.0, Y, "high"), (-(Y - 5.0), -Y, "low")] {
        let (gi, go) = (g(inner).abs(), g(outer).abs());
        if gi > 0.0 && go > 0.5 * gi {
            return Err(Error::Divergent(if which == "high" {
                "integrand does not decay at high frequency"
            } else {
                "integrand does not decay at low frequency"
            }));
        }
    }
    let breaks: alloc::vec::Vec<f64> = (0..=32).map(|i| -Y + 2.5 * i as f64).collect();
    let est = adaptive_scalar(|y| Ok::<f64, Error>(g(y)), &breaks, 1e-11, 0.0, 2_000_000)?;
    Ok(est.value[0])
}

/// Short-distance limit for arbitrary materials with explicit frequency
/// quadrature. `omega_star` defaults to the geometric mean of the two
/// materials' characteristic frequencies.
pub fn realistic_short(
    a: &MaterialModel,
    b: &MaterialModel,
    d: f64,
    omega_star: Option<f64>,
    constants: &PhysicalConstants,
) -> Result<AsymptoticResult> {
    positive_distance(d)?;
    let ws = sqrt(a.characteristic_frequency() * b.characteristic_frequency());
    let w_star = positive_cutoff(omega_star.unwrap_or(ws))?;
    let integral = short_distance_integral(a, b)?;
    let in_window = d * WINDOW_FACTOR * w_star <= constants.c;
    Ok(short_from_integral(integral, d, w_star, RegimeTag::ShortRealistic, in_window, constants))
}

/// Short-distance limit for single-line oscillator mirrors. Pairs with
/// different weights use `eps_xy^A eps_xy^B` and the geometric mean of the
/// `(1 + eps_xx/pi)` factors; the line frequencies must agree.
pub fn oscillator_short(
    a: &OscillatorParams,
    b: &OscillatorParams,
    d: f64,
    constants: &PhysicalConstants,
) -> Result<AsymptoticResult> {
    positive_distance(d)?;
    if (a.omega_0 - b.omega_0).abs() > 1e-12 * a.omega_0 {
        return Err(Error::Unsupported("oscillator pairs must share the line frequency"));
    }
    let w0 = a.omega_0;
    let factor = sqrt((1.0 + a.eps_xx_eff / PI) * (1.0 + b.eps_xx_eff / PI));
    let integral = w0 * w0 * w0 * a.eps_xy_eff * b.eps_xy_eff / (4.0 * PI * factor * sqrt(factor));
    let in_window = d * w0 <= constants.c;
    Ok(short_from_integral(integral, d, w0, RegimeTag::OscillatorShort, in_window, constants))
}

/// Least-squares slope of `ln|y|` against `ln x`. `None` with fewer than two
/// usable points (positive `x`, non-zero finite `y`) or a degenerate grid.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: alloc::vec::Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && x.is_finite() && **y != 0.0 && y.is_finite())
        .map(|(x, y)| (log(*x), log(y.abs())))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}
