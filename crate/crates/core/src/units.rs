//! Physical constants and unit conversions.
//!
//! Kernels compute in Gaussian-cgs: lengths in cm, frequencies in s^-1,
//! energies per area in erg/cm^2, forces in dyn, conductivities in s^-1.
//! SI only appears at the edges, through the conversion helpers below;
//! they divide by exact powers of ten so that decimal values round-trip.

use crate::{Error, Result};

/// The constants a kernel needs. Swapping the value changes the unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant.
    pub hbar: f64,
    /// Speed of light.
    pub c: f64,
    /// Boltzmann constant.
    pub k_b: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values in Gaussian-cgs (erg s, cm/s, erg/K).
    pub const GAUSSIAN: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-27,
        c: 2.997_924_58e10,
        k_b: 1.380_649e-16,
    };

    /// hbar = c = k_B = 1. Frequencies are then in a user-chosen unit and
    /// lengths in the matching inverse unit.
    pub const NATURAL: PhysicalConstants = PhysicalConstants { hbar: 1.0, c: 1.0, k_b: 1.0 };

    /// Length scale `c / omega`.
    pub fn wavelength_over_2pi(&self, omega: f64) -> f64 {
        self.c / omega
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::GAUSSIAN
    }
}

/// 1/(4 pi eps_0) in SI, i.e. c^2 * 1e-7.
pub const COULOMB_FACTOR_SI: f64 = 8.987_551_787_368_176e9;

/// Riemann zeta(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_2;

/// Convert an SI conductivity (S/m) to its Gaussian value (s^-1).
pub fn si_conductivity_to_gaussian(sigma_si: f64) -> Result<f64> {
    if !(sigma_si >= 0.0) || !sigma_si.is_finite() {
        return Err(Error::InvalidParameter {
            name: "sigma_si",
            reason: "conductivity must be finite and non-negative",
        });
    }
    Ok(sigma_si * COULOMB_FACTOR_SI)
}

pub fn gaussian_conductivity_to_si(sigma: f64) -> f64 {
    sigma / COULOMB_FACTOR_SI
}

/// dyn -> N
pub fn newton_from_gaussian_force(dyn_: f64) -> f64 {
    dyn_ / 1e5
}

/// N -> dyn
pub fn gaussian_force_from_newton(newton: f64) -> f64 {
    newton * 1e5
}

/// erg/cm^2 -> J/m^2
pub fn si_energy_per_area(erg_per_cm2: f64) -> f64 {
    erg_per_cm2 / 1e3
}

pub fn gaussian_energy_per_area(j_per_m2: f64) -> f64 {
    j_per_m2 * 1e3
}

/// dyn/cm^2 -> Pa
pub fn si_pressure(dyn_per_cm2: f64) -> f64 {
    dyn_per_cm2 / 10.0
}

pub fn gaussian_pressure(pascal: f64) -> f64 {
    pascal * 10.0
}

/// cm -> m
pub fn si_length(cm: f64) -> f64 {
    cm / 1e2
}

pub fn gaussian_length(m: f64) -> f64 {
    m * 1e2
}

/// N/m -> dyn/cm
pub fn gaussian_stiffness(n_per_m: f64) -> f64 {
    n_per_m * 1e3
}

pub fn si_stiffness(dyn_per_cm: f64) -> f64 {
    dyn_per_cm / 1e3
}

/// The dimensions this crate passes around.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    EnergyPerArea,
    ForcePerArea,
    Force,
    Frequency,
    Length,
    Area,
    ConductivityGaussian,
}

/// A value tagged with its dimension. Arithmetic is checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub dimension: Dimension,
}

impl Quantity {
    pub const fn new(value: f64, dimension: Dimension) -> Self {
        Quantity { value, dimension }
    }

    pub fn checked_add(self, other: Quantity) -> Result<Quantity> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch("addition of unlike dimensions"));
        }
        Ok(Quantity::new(self.value + other.value, self.dimension))
    }

    pub fn checked_sub(self, other: Quantity) -> Result<Quantity> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch("subtraction of unlike dimensions"));
        }
        Ok(Quantity::new(self.value - other.value, self.dimension))
    }

    pub fn scale(self, factor: f64) -> Quantity {
        Quantity::new(self.value * factor, self.dimension)
    }

    pub fn checked_mul(self, other: Quantity) -> Result<Quantity> {
        use Dimension::*;
        let dim = match (self.dimension, other.dimension) {
            (ForcePerArea, Area) | (Area, ForcePerArea) => Force,
            (Length, Length) => Area,
            // energy per area times length is a force (PFA-type products)
            (EnergyPerArea, Length) | (Length, EnergyPerArea) => Force,
            _ => return Err(Error::DimensionMismatch("unsupported product")),
        };
        Ok(Quantity::new(self.value * other.value, dim))
    }

    pub fn checked_div(self, other: Quantity) -> Result<Quantity> {
        use Dimension::*;
        let dim = match (self.dimension, other.dimension) {
            (EnergyPerArea, Length) => ForcePerArea,
            (Force, Area) => ForcePerArea,
            (Area, Length) => Length,
            _ => return Err(Error::DimensionMismatch("unsupported quotient")),
        };
        Ok(Quantity::new(self.value / other.value, dim))
    }

    /// Derivative of an energy-per-area curve with respect to distance:
    /// `(E(D + h) - E(D - h)) / 2h`, yielding a force per area (up to sign).
    pub fn derivative(e_plus: Quantity, e_minus: Quantity, step: Quantity) -> Result<Quantity> {
        let de = e_plus.checked_sub(e_minus)?;
        de.checked_div(step.scale(2.0))
    }
}
