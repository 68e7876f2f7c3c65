//! Unit-suffixed physical inputs (`"50 nm"`, `"1e7 S/m"`, `"1 mN/m"`),
//! converted to Gaussian-cgs at parse time.

use std::f64::consts::PI;

use casimir_mag_core::units::{PhysicalConstants, COULOMB_FACTOR_SI};
use serde::{Deserialize, Serialize};

/// Interpretation of bare numbers in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Si,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Length,
    /// Angular frequency, s^-1.
    AngularFrequency,
    /// Ordinary frequency, Hz.
    Frequency,
    Time,
    Conductivity,
    Stiffness,
    Temperature,
    Force,
    EnergyPerArea,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Length => "length",
            Kind::AngularFrequency => "angular frequency",
            Kind::Frequency => "frequency",
            Kind::Time => "time",
            Kind::Conductivity => "conductivity",
            Kind::Stiffness => "spring constant",
            Kind::Temperature => "temperature",
            Kind::Force => "force",
            Kind::EnergyPerArea => "energy per area",
        }
    }

    /// Scale from a bare number in `system` to Gaussian.
    fn bare_scale(self, system: UnitSystem) -> f64 {
        match system {
            UnitSystem::Gaussian => 1.0,
            UnitSystem::Si => match self {
                Kind::Length => 1e2,
                Kind::Conductivity => COULOMB_FACTOR_SI,
                Kind::Stiffness => 1e3,
                Kind::Force => 1e5,
                Kind::EnergyPerArea => 1e3,
                Kind::AngularFrequency | Kind::Frequency | Kind::Time | Kind::Temperature => 1.0,
            },
        }
    }

    /// `(num, den)` taking `unit` to Gaussian as `value * num / den`, if the
    /// suffix is valid for this kind. Powers of ten below one are divisions so
    /// that decimal inputs like `50 nm` convert with a single rounding.
    fn unit_scale(self, unit: &str) -> Option<(f64, f64)> {
        let hbar = PhysicalConstants::GAUSSIAN.hbar;
        const EV: f64 = 1.602_176_634e-12;
        let s = match (self, unit) {
            (Kind::Length, "m") => (1e2, 1.0),
            (Kind::Length, "cm") => (1.0, 1.0),
            (Kind::Length, "mm") => (1.0, 1e1),
            (Kind::Length, "um" | "µm" | "μm") => (1.0, 1e4),
            (Kind::Length, "nm") => (1.0, 1e7),
            (Kind::Length, "pm") => (1.0, 1e10),

            (Kind::AngularFrequency, "s^-1" | "1/s" | "rad/s") => (1.0, 1.0),
            (Kind::AngularFrequency, "Hz") => (2.0 * PI, 1.0),
            (Kind::AngularFrequency, "kHz") => (2.0 * PI * 1e3, 1.0),
            (Kind::AngularFrequency, "MHz") => (2.0 * PI * 1e6, 1.0),
            (Kind::AngularFrequency, "GHz") => (2.0 * PI * 1e9, 1.0),
            (Kind::AngularFrequency, "THz") => (2.0 * PI * 1e12, 1.0),
            (Kind::AngularFrequency, "eV") => (EV, hbar),
            (Kind::AngularFrequency, "meV") => (EV, 1e3 * hbar),

            (Kind::Frequency, "Hz") => (1.0, 1.0),
            (Kind::Frequency, "kHz") => (1e3, 1.0),
            (Kind::Frequency, "MHz") => (1e6, 1.0),
            (Kind::Frequency, "rad/s") => (1.0, 2.0 * PI),

            (Kind::Time, "s") => (1.0, 1.0),
            (Kind::Time, "ms") => (1.0, 1e3),
            (Kind::Time, "us" | "µs" | "μs") => (1.0, 1e6),
            (Kind::Time, "ns") => (1.0, 1e9),
            (Kind::Time, "ps") => (1.0, 1e12),
            (Kind::Time, "fs") => (1.0, 1e15),

            (Kind::Conductivity, "S/m") => (COULOMB_FACTOR_SI, 1.0),
            (Kind::Conductivity, "S/cm") => (1e2 * COULOMB_FACTOR_SI, 1.0),
            (Kind::Conductivity, "s^-1" | "1/s") => (1.0, 1.0),

            (Kind::Stiffness, "N/m") => (1e3, 1.0),
            (Kind::Stiffness, "mN/m") => (1.0, 1.0),
            (Kind::Stiffness, "dyn/cm") => (1.0, 1.0),

            (Kind::Temperature, "K") => (1.0, 1.0),

            (Kind::Force, "N") => (1e5, 1.0),
            (Kind::Force, "mN") => (1e2, 1.0),
            (Kind::Force, "uN" | "µN" | "μN") => (1.0, 1e1),
            (Kind::Force, "nN") => (1.0, 1e4),
            (Kind::Force, "pN") => (1.0, 1e7),
            (Kind::Force, "fN") => (1.0, 1e10),
            (Kind::Force, "aN") => (1.0, 1e13),
            (Kind::Force, "dyn") => (1.0, 1.0),

            (Kind::EnergyPerArea, "J/m^2") => (1e3, 1.0),
            (Kind::EnergyPerArea, "erg/cm^2") => (1.0, 1.0),
            _ => return None,
        };
        Some(s)
    }
}

/// A config value: a bare number or `"<number> <unit>"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawQuantity {
    Number(f64),
    Text(String),
}

impl From<f64> for RawQuantity {
    fn from(v: f64) -> Self {
        RawQuantity::Number(v)
    }
}

/// Convert `raw` to Gaussian-cgs.
pub fn parse(raw: &RawQuantity, kind: Kind, system: UnitSystem) -> Result<f64, String> {
    let v = match raw {
        RawQuantity::Number(v) => v * kind.bare_scale(system),
        RawQuantity::Text(text) => {
            let text = text.trim();
            let (num, unit) = match text.find(char::is_whitespace) {
                Some(i) => (&text[..i], text[i..].trim()),
                None => (text, ""),
            };
            let value: f64 =
                num.parse().map_err(|_| format!("`{text}`: `{num}` is not a number"))?;
            if unit.is_empty() {
                value * kind.bare_scale(system)
            } else {
                let (num, den) = kind
                    .unit_scale(unit)
                    .ok_or_else(|| format!("`{text}`: `{unit}` is not a {} unit", kind.name()))?;
                value * num / den
            }
        }
    };
    if !v.is_finite() {
        return Err(format!("{} must be finite", kind.name()));
    }
    Ok(v)
}
