//! Run configuration: a TOML file with named materials, a mirror pair, one
//! geometry, an optional distance sweep and numerical settings.
//!
//! ```toml
//! units_in = "si"
//!
//! [materials.copt]
//! model = "oscillator"
//! omega_0 = "6e15 rad/s"
//! eps_xx_eff = 10
//! eps_xy_eff = 1.5e-2
//!
//! [pair]
//! a = "copt"
//! b = "copt"
//!
//! [geometry.sphere_plate]
//! radius = "100 um"
//! distance = "50 nm"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use casimir_mag_core::casimir::{DeltaMethod, Mirror, MirrorPair, QuadratureConfig};
use casimir_mag_core::experiment::CantileverSpec;
use casimir_mag_core::materials::{
    DcTransportParams, DrudeParams, Magnetization, MaterialModel, OscillatorParams, Response,
    SpectrumTail,
};
use casimir_mag_core::units::{
    gaussian_conductivity_to_si, newton_from_gaussian_force, si_energy_per_area, si_length, si_stiffness,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::quantity::{parse, Kind, RawQuantity, UnitSystem};
use crate::spectrum;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawMagnetization {
    #[default]
    Outward,
    Inward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawTail {
    #[default]
    Zero,
    InverseCube,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrude {
    omega_p: RawQuantity,
    omega_c: RawQuantity,
    tau: RawQuantity,
    #[serde(default)]
    magnetization: RawMagnetization,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDc {
    sigma: RawQuantity,
    theta: f64,
    tau_equiv: RawQuantity,
    #[serde(default)]
    magnetization: RawMagnetization,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOscillator {
    omega_0: RawQuantity,
    eps_xx_eff: f64,
    eps_xy_eff: f64,
    #[serde(default)]
    magnetization: RawMagnetization,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTabulated {
    file: PathBuf,
    #[serde(default)]
    tail: RawTail,
    #[serde(default)]
    magnetization: RawMagnetization,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerfect {}

#[derive(Debug, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
enum RawMaterial {
    Drude(RawDrude),
    Dc(RawDc),
    Oscillator(RawOscillator),
    Tabulated(RawTabulated),
    Perfect(RawPerfect),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    a: String,
    b: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlatePlate {
    distance: Option<RawQuantity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpherePlate {
    radius: RawQuantity,
    distance: Option<RawQuantity>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    plate_plate: Option<RawPlatePlate>,
    sphere_plate: Option<RawSpherePlate>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    start: RawQuantity,
    stop: RawQuantity,
    points: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    rel_tol: Option<f64>,
    abs_tol: Option<RawQuantity>,
    max_evaluations: Option<usize>,
    u_max: Option<f64>,
    allow_dc_short_distance: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<Format>,
    path: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    spring_k: Option<RawQuantity>,
    quality_q: Option<f64>,
    resonance: Option<RawQuantity>,
    deflection: Option<RawQuantity>,
    temperature: Option<RawQuantity>,
    bandwidth: Option<RawQuantity>,
    parasitic_bound: Option<RawQuantity>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawMethod {
    #[default]
    Perturbative,
    Exact,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompare {
    #[serde(default)]
    method: RawMethod,
    omega_star: Option<RawQuantity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    units_in: UnitSystem,
    #[serde(default)]
    materials: BTreeMap<String, RawMaterial>,
    pair: Option<RawPair>,
    #[serde(default)]
    geometry: RawGeometry,
    sweep: Option<RawSweep>,
    #[serde(default)]
    quadrature: RawQuadrature,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    experiment: RawExperiment,
    #[serde(default)]
    compare: RawCompare,
}

/// A resolved material, Gaussian units.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    pub mirror: Mirror,
    /// Spectrum file of a tabulated material, as resolved on disk.
    pub source: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    PlatePlate,
    SpherePlate { radius: f64 },
}

/// Default parasitic-force bound: 1 aN, in dyn.
pub const DEFAULT_PARASITIC_BOUND: f64 = 1e-13;

/// Everything a subcommand needs, in Gaussian-cgs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub units_in: UnitSystem,
    pub materials: Vec<Material>,
    pair: Option<(String, String)>,
    geometry: Option<Geometry>,
    distances: Result<Vec<f64>, String>,
    pub quadrature: QuadratureConfig,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub cantilever: CantileverSpec,
    pub parasitic_bound: f64,
    pub compare_method: DeltaMethod,
    pub omega_star: Option<f64>,
}

fn cfg_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn magnetization(m: RawMagnetization) -> Magnetization {
    match m {
        RawMagnetization::Outward => Magnetization::Outward,
        RawMagnetization::Inward => Magnetization::Inward,
    }
}

/// Log-spaced grid, endpoints exact.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let ratio = (stop / start).ln();
    (0..points)
        .map(|i| match i {
            0 => start,
            i if i == points - 1 => stop,
            i => start * (ratio * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

impl RunConfig {
    /// Parse a config file; relative spectrum paths resolve against the
    /// config's directory.
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::from_toml(&text, base)
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| cfg_err(format!("config: {e}")))?;
        let sys = raw.units_in;
        let q = |name: &str, v: &RawQuantity, kind: Kind| -> Result<f64, CliError> {
            parse(v, kind, sys).map_err(|e| cfg_err(format!("{name}: {e}")))
        };
        let core = |name: &str, e: casimir_mag_core::Error| cfg_err(format!("{name}: {e}"));

        let mut materials = Vec::new();
        for (name, m) in raw.materials {
            let ctx = format!("materials.{name}");
            let (mirror, source) = match m {
                RawMaterial::Drude(d) => {
                    let p = DrudeParams::new(
                        q(&ctx, &d.omega_p, Kind::AngularFrequency)?,
                        q(&ctx, &d.omega_c, Kind::AngularFrequency)?,
                        q(&ctx, &d.tau, Kind::Time)?,
                    )
                    .map_err(|e| core(&ctx, e))?;
                    (MaterialModel::drude(p).with_magnetization(magnetization(d.magnetization)).into(), None)
                }
                RawMaterial::Dc(d) => {
                    let p = DcTransportParams::new(
                        q(&ctx, &d.sigma, Kind::Conductivity)?,
                        d.theta,
                        q(&ctx, &d.tau_equiv, Kind::Time)?,
                    )
                    .map_err(|e| core(&ctx, e))?;
                    (MaterialModel::dc_transport(p).with_magnetization(magnetization(d.magnetization)).into(), None)
                }
                RawMaterial::Oscillator(o) => {
                    let p = OscillatorParams::new(q(&ctx, &o.omega_0, Kind::AngularFrequency)?, o.eps_xx_eff, o.eps_xy_eff)
                        .map_err(|e| core(&ctx, e))?;
                    (MaterialModel::oscillator(p).with_magnetization(magnetization(o.magnetization)).into(), None)
                }
                RawMaterial::Tabulated(t) => {
                    let path = base_dir.join(&t.file);
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Io(format!("{ctx}: cannot read {}: {e}", path.display())))?;
                    let tail = match t.tail {
                        RawTail::Zero => SpectrumTail::Zero,
                        RawTail::InverseCube => SpectrumTail::InverseCube,
                    };
                    let s = spectrum::parse(&text, tail).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
                    (MaterialModel::tabulated(s).with_magnetization(magnetization(t.magnetization)).into(), Some(path))
                }
                RawMaterial::Perfect(RawPerfect {}) => (Mirror::Perfect, None),
            };
            materials.push(Material { name, mirror, source });
        }

        let pair = raw.pair.map(|p| (p.a, p.b));
        if let Some((a, b)) = &pair {
            for n in [a, b] {
                if !materials.iter().any(|m| &m.name == n) {
                    return Err(cfg_err(format!("pair: unknown material `{n}`")));
                }
            }
        }

        let (geometry, geom_distance) = match (raw.geometry.plate_plate, raw.geometry.sphere_plate) {
            (Some(_), Some(_)) => return Err(cfg_err("geometry: give exactly one of plate_plate, sphere_plate")),
            (Some(p), None) => (Some(Geometry::PlatePlate), p.distance),
            (None, Some(s)) => {
                let radius = q("geometry.sphere_plate.radius", &s.radius, Kind::Length)?;
                if !(radius > 0.0) {
                    return Err(cfg_err("geometry.sphere_plate.radius: must be positive"));
                }
                (Some(Geometry::SpherePlate { radius }), s.distance)
            }
            (None, None) => (None, None),
        };

        let distances = match (geom_distance, raw.sweep) {
            (Some(_), Some(_)) => return Err(cfg_err("give either a geometry distance or a [sweep], not both")),
            (Some(d), None) => {
                let d = q("geometry.distance", &d, Kind::Length)?;
                if !(d > 0.0) {
                    return Err(cfg_err("geometry.distance: must be positive"));
                }
                Ok(vec![d])
            }
            (None, Some(s)) => {
                let start = q("sweep.start", &s.start, Kind::Length)?;
                let stop = q("sweep.stop", &s.stop, Kind::Length)?;
                if !(start > 0.0 && start < stop) {
                    return Err(cfg_err("sweep: need 0 < start < stop"));
                }
                if s.points < 2 {
                    return Err(cfg_err("sweep.points: need at least 2"));
                }
                Ok(log_grid(start, stop, s.points))
            }
            (None, None) => Err("no distances: give geometry.*.distance or a [sweep]".to_string()),
        };

        let mut quadrature = QuadratureConfig::default();
        let rq = raw.quadrature;
        if let Some(v) = rq.rel_tol {
            quadrature.rel_tol = v;
        }
        if let Some(v) = &rq.abs_tol {
            quadrature.abs_tol = q("quadrature.abs_tol", v, Kind::EnergyPerArea)?;
        }
        if let Some(v) = rq.max_evaluations {
            quadrature.max_evaluations = v;
        }
        if let Some(v) = rq.u_max {
            quadrature.u_max = v;
        }
        if let Some(v) = rq.allow_dc_short_distance {
            quadrature.allow_dc_short_distance = v;
        }
        quadrature.validate().map_err(|e| core("quadrature", e))?;

        let re = raw.experiment;
        let reference = CantileverSpec::reference();
        let opt = |name: &str, v: &Option<RawQuantity>, kind: Kind, default: f64| match v {
            Some(v) => q(name, v, kind),
            None => Ok(default),
        };
        let cantilever = CantileverSpec::new(
            opt("experiment.spring_k", &re.spring_k, Kind::Stiffness, reference.spring_k)?,
            re.quality_q.unwrap_or(reference.quality_q),
            opt("experiment.resonance", &re.resonance, Kind::Frequency, reference.resonance_hz)?,
            opt("experiment.deflection", &re.deflection, Kind::Length, reference.deflection_dx)?,
            opt("experiment.temperature", &re.temperature, Kind::Temperature, reference.temperature)?,
            opt("experiment.bandwidth", &re.bandwidth, Kind::Frequency, reference.bandwidth_hz)?,
        )
        .map_err(|e| core("experiment", e))?;
        let parasitic_bound = opt("experiment.parasitic_bound", &re.parasitic_bound, Kind::Force, DEFAULT_PARASITIC_BOUND)?;
        if !(parasitic_bound >= 0.0) {
            return Err(cfg_err("experiment.parasitic_bound: must be >= 0"));
        }

        let compare_method = match raw.compare.method {
            RawMethod::Perturbative => DeltaMethod::Perturbative,
            RawMethod::Exact => DeltaMethod::Exact,
        };
        let omega_star = match &raw.compare.omega_star {
            Some(v) => {
                let w = q("compare.omega_star", v, Kind::AngularFrequency)?;
                if !(w > 0.0) {
                    return Err(cfg_err("compare.omega_star: must be positive"));
                }
                Some(w)
            }
            None => None,
        };

        Ok(RunConfig {
            units_in: sys,
            materials,
            pair,
            geometry,
            distances,
            quadrature,
            format: raw.output.format.unwrap_or_default(),
            output: raw.output.path,
            cantilever,
            parasitic_bound,
            compare_method,
            omega_star,
        })
    }

    pub fn material(&self, name: &str) -> Option<&Material> {
        self.materials.iter().find(|m| m.name == name)
    }

    pub fn pair_names(&self) -> Result<(&str, &str), CliError> {
        self.pair.as_ref().map(|(a, b)| (a.as_str(), b.as_str())).ok_or_else(|| cfg_err("missing [pair]"))
    }

    pub fn mirror_pair(&self) -> Result<MirrorPair, CliError> {
        let (a, b) = self.pair_names()?;
        let get = |n| self.material(n).map(|m| m.mirror.clone()).ok_or_else(|| cfg_err(format!("unknown material `{n}`")));
        Ok(MirrorPair::new(get(a)?, get(b)?))
    }

    pub fn geometry(&self) -> Result<Geometry, CliError> {
        self.geometry.ok_or_else(|| cfg_err("missing [geometry]"))
    }

    pub fn distances(&self) -> Result<&[f64], CliError> {
        self.distances.as_deref().map_err(|e| cfg_err(e.clone()))
    }

    /// The resolved configuration in SI, for embedding in outputs.
    pub fn provenance(&self) -> Value {
        let materials: serde_json::Map<String, Value> =
            self.materials.iter().map(|m| (m.name.clone(), material_json(m))).collect();
        let geometry = match self.geometry {
            Some(Geometry::PlatePlate) => json!({ "kind": "plate_plate" }),
            Some(Geometry::SpherePlate { radius }) => json!({ "kind": "sphere_plate", "radius_m": si_length(radius) }),
            None => Value::Null,
        };
        let distances = match &self.distances {
            Ok(d) => Value::from(d.iter().map(|&d| si_length(d)).collect::<Vec<_>>()),
            Err(_) => Value::Null,
        };
        let c = &self.cantilever;
        json!({
            "units_in": self.units_in,
            "materials": materials,
            "pair": self.pair.as_ref().map(|(a, b)| json!({ "a": a, "b": b })),
            "geometry": geometry,
            "distances_m": distances,
            "quadrature": {
                "rel_tol": self.quadrature.rel_tol,
                "abs_tol_j_per_m2": si_energy_per_area(self.quadrature.abs_tol),
                "max_evaluations": self.quadrature.max_evaluations,
                "u_max": self.quadrature.u_max,
                "allow_dc_short_distance": self.quadrature.allow_dc_short_distance,
            },
            "experiment": {
                "spring_k_n_per_m": si_stiffness(c.spring_k),
                "quality_q": c.quality_q,
                "resonance_hz": c.resonance_hz,
                "deflection_m": si_length(c.deflection_dx),
                "temperature_k": c.temperature,
                "bandwidth_hz": c.bandwidth_hz,
                "parasitic_bound_n": newton_from_gaussian_force(self.parasitic_bound),
            },
            "compare": {
                "method": match self.compare_method {
                    DeltaMethod::Perturbative => "perturbative",
                    DeltaMethod::Exact => "exact",
                },
                "omega_star_rad_per_s": self.omega_star,
            },
        })
    }
}

fn material_json(m: &Material) -> Value {
    let model = match &m.mirror {
        Mirror::Perfect => return json!({ "model": "perfect" }),
        Mirror::Dielectric(model) => model,
    };
    let mag = match model.magnetization {
        Magnetization::Outward => "outward",
        Magnetization::Inward => "inward",
    };
    match &model.response {
        Response::Drude(p) => json!({
            "model": "drude", "magnetization": mag,
            "omega_p_rad_per_s": p.omega_p, "omega_c_rad_per_s": p.omega_c, "tau_s": p.tau,
        }),
        Response::DcTransport(p) => json!({
            "model": "dc", "magnetization": mag,
            "sigma_s_per_m": gaussian_conductivity_to_si(p.sigma), "theta": p.theta, "tau_equiv_s": p.tau_equiv,
        }),
        Response::Oscillator(p) => json!({
            "model": "oscillator", "magnetization": mag,
            "omega_0_rad_per_s": p.omega_0, "eps_xx_eff": p.eps_xx_eff, "eps_xy_eff": p.eps_xy_eff,
        }),
        Response::Tabulated(s) => json!({
            "model": "tabulated", "magnetization": mag,
            "file": m.source.as_ref().map(|p| p.display().to_string()),
            "points": s.grid().len(),
            "tail": match s.tail() {
                SpectrumTail::Zero => "zero",
                SpectrumTail::InverseCube => "inverse_cube",
            },
        }),
    }
}
