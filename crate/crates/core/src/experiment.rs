//! Sphere-plate measurement estimate: proximity-force conversion of the
//! plate-plate energies and the two cantilever sensitivity limits.

use core::f64::consts::PI;

use alloc::vec::Vec;
use libm::sqrt;

use crate::casimir::{delta_energy_perturbative, energy_non_magnetic, MirrorPair, QuadratureConfig};
use crate::{Error, Result};

/// Above this `D/R` the proximity-force conversion is flagged.
pub const PFA_WARNING_RATIO: f64 = 1e-2;

/// A lens of curvature radius `radius` at closest distance `distance`
/// from a plate (both cm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePlateGeometry {
    pub radius: f64,
    pub distance: f64,
}

impl SpherePlateGeometry {
    pub fn new(radius: f64, distance: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter { name: "radius", reason: "must be positive and finite" });
        }
        if !(distance > 0.0) || !distance.is_finite() {
            return Err(Error::NonPositiveDistance(distance));
        }
        Ok(SpherePlateGeometry { radius, distance })
    }

    /// `D/R` is large enough that the proximity-force result is doubtful.
    pub fn pfa_warning(&self) -> bool {
        self.distance / self.radius > PFA_WARNING_RATIO
    }
}

/// Resonant cantilever. Fields are in one consistent unit system
/// (Gaussian by default: dyn/cm, cm, K, Hz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CantileverSpec {
    pub spring_k: f64,
    pub quality_q: f64,
    /// Resonance as an ordinary frequency; the angular value is `2 pi f`.
    pub resonance_hz: f64,
    /// Smallest resolvable deflection.
    pub deflection_dx: f64,
    pub temperature: f64,
    /// Measurement bandwidth.
    pub bandwidth_hz: f64,
}

/// Default measurement bandwidth.
pub const DEFAULT_BANDWIDTH_HZ: f64 = 1.0;

impl CantileverSpec {
    pub fn new(
        spring_k: f64,
        quality_q: f64,
        resonance_hz: f64,
        deflection_dx: f64,
        temperature: f64,
        bandwidth_hz: f64,
    ) -> Result<Self> {
        let pos = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: "must be positive and finite" })
            }
        };
        let non_neg = |name, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: "must be non-negative and finite" })
            }
        };
        pos("spring_k", spring_k)?;
        pos("resonance_hz", resonance_hz)?;
        pos("bandwidth_hz", bandwidth_hz)?;
        non_neg("deflection_dx", deflection_dx)?;
        non_neg("temperature", temperature)?;
        if !(quality_q >= 1.0) || !quality_q.is_finite() {
            return Err(Error::InvalidParameter { name: "quality_q", reason: "must be >= 1" });
        }
        Ok(CantileverSpec { spring_k, quality_q, resonance_hz, deflection_dx, temperature, bandwidth_hz })
    }

    /// 1 mN/m, Q = 3000, 1.4 kHz, 0.15 nm, 300 K, 1 Hz, in Gaussian units.
    pub fn reference() -> Self {
        CantileverSpec {
            spring_k: 1.0,
            quality_q: 3000.0,
            resonance_hz: 1.4e3,
            deflection_dx: 1.5e-8,
            temperature: 300.0,
            bandwidth_hz: DEFAULT_BANDWIDTH_HZ,
        }
    }

    pub fn omega_r(&self) -> f64 {
        2.0 * PI * self.resonance_hz
    }
}

/// `2 pi R E(D)`: sphere-plate force from a plate-plate energy per area.
pub fn pfa_force(energy_per_area: impl FnOnce(f64) -> Result<f64>, geom: &SpherePlateGeometry) -> Result<f64> {
    Ok(2.0 * PI * geom.radius * energy_per_area(geom.distance)?)
}

/// Deflection-limited force resolution `k dx / Q`.
pub fn min_force_deflection(spec: &CantileverSpec) -> f64 {
    spec.spring_k * spec.deflection_dx / spec.quality_q
}

/// Thermomechanical limit `sqrt(4 k_B T dnu k / (omega_r Q))`.
pub fn min_force_thermal(spec: &CantileverSpec, k_b: f64) -> f64 {
    sqrt(4.0 * k_b * spec.temperature * spec.bandwidth_hz * spec.spring_k
        / (spec.omega_r() * spec.quality_q))
}

/// One distance of a detectability table. Forces in dyn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectabilityRow {
    pub distance: f64,
    /// Magnetic sphere-plate force, `2 pi R (E_AF - E_FM)`.
    pub delta_f_sphere: f64,
    /// Sphere-plate Casimir force without the magneto-optical part.
    pub f_sphere: f64,
    pub deflection_limit: f64,
    pub thermal_limit: f64,
    /// User-supplied bound on parasitic forces, reported alongside.
    pub parasitic_bound: f64,
    /// `|delta_f_sphere| / max(deflection_limit, thermal_limit)`.
    pub snr: f64,
    pub converged: bool,
    pub pfa_warning: bool,
}

impl DetectabilityRow {
    pub fn detectable(&self) -> bool {
        self.snr > 1.0
    }
}

fn snr(signal: f64, floor: f64) -> f64 {
    if signal == 0.0 {
        0.0
    } else if floor == 0.0 {
        f64::INFINITY
    } else {
        signal.abs() / floor
    }
}

/// Evaluate the detectability figures at one distance.
pub fn detectability_row(
    pair: &MirrorPair,
    radius: f64,
    spec: &CantileverSpec,
    parasitic_bound: f64,
    d: f64,
    cfg: &QuadratureConfig,
) -> Result<DetectabilityRow> {
    let geom = SpherePlateGeometry::new(radius, d)?;
    let de = delta_energy_perturbative(pair, d, cfg)?;
    let e = energy_non_magnetic(pair, d, cfg)?;
    let delta_f_sphere = pfa_force(|_| Ok(de.value), &geom)?;
    let f_sphere = pfa_force(|_| Ok(e.value), &geom)?;
    let deflection_limit = min_force_deflection(spec);
    let thermal_limit = min_force_thermal(spec, cfg.constants.k_b);
    Ok(DetectabilityRow {
        distance: d,
        delta_f_sphere,
        f_sphere,
        deflection_limit,
        thermal_limit,
        parasitic_bound,
        snr: snr(delta_f_sphere, deflection_limit.max(thermal_limit)),
        converged: de.converged && e.converged,
        pfa_warning: geom.pfa_warning(),
    })
}

/// [`detectability_row`] for every distance in `grid`, in order.
pub fn detectability_report(
    pair: &MirrorPair,
    radius: f64,
    spec: &CantileverSpec,
    parasitic_bound: f64,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<DetectabilityRow>> {
    grid.iter().map(|&d| detectability_row(pair, radius, spec, parasitic_bound, d, cfg)).collect()
}
