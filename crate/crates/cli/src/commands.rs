//! The subcommands. Each evaluates its rows in parallel over the distance
//! grid and returns them in grid order; reported values are SI.

use std::f64::consts::PI;

use casimir_mag_core::asymptotics::{
    classify, drude_intermediate, drude_long, drude_short, log_log_slope, oscillator_short, realistic_long,
    realistic_short, AsymptoticResult, RegimeTag,
};
use casimir_mag_core::casimir::{
    delta_energy_exact, delta_energy_perturbative, delta_force, energy_components, force_components, DeltaMethod,
    Mirror, MirrorPair, QuadratureConfig,
};
use casimir_mag_core::experiment::{detectability_row, min_force_deflection, min_force_thermal};
use casimir_mag_core::materials::{DcTransportParams, DrudeParams, MaterialModel, OscillatorParams, Response};
use casimir_mag_core::units::{newton_from_gaussian_force, si_energy_per_area, si_length, si_pressure};
use casimir_mag_core::Error;
use rayon::prelude::*;

use crate::config::{Geometry, RunConfig};
use crate::output::Table;
use crate::CliError;

/// How a command ended, beyond hard errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Some rows did not converge or could not be evaluated; they are
    /// written and flagged.
    Flagged,
    /// `materials validate` found a material that fails a check.
    Invalid,
}

pub struct Outcome {
    pub table: Table,
    pub status: Status,
}

pub fn core_error(e: Error) -> CliError {
    match e {
        Error::SingularKernel | Error::Divergent(_) => CliError::Numerical(e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

fn sweep<T: Send>(
    grid: &[f64],
    pool: &rayon::ThreadPool,
    f: impl Fn(f64) -> Result<T, CliError> + Sync,
) -> Result<Vec<T>, CliError> {
    pool.install(|| grid.par_iter().map(|&d| f(d)).collect::<Vec<_>>()).into_iter().collect()
}

fn common_metadata(t: &mut Table, cfg: &RunConfig) -> Result<(), CliError> {
    let (a, b) = cfg.pair_names()?;
    t.meta("pair", format!("a={a} b={b}"));
    t.meta("units", "SI; per-area quantities are plate-plate");
    t.meta("rel_tol", format!("{:e}", cfg.quadrature.rel_tol));
    Ok(())
}

fn status_of(flags: impl IntoIterator<Item = bool>) -> Status {
    if flags.into_iter().all(|ok| ok) {
        Status::Ok
    } else {
        Status::Flagged
    }
}

const NAN: f64 = f64::NAN;

pub fn energy(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Outcome, CliError> {
    let pair = cfg.mirror_pair()?;
    let q = &cfg.quadrature;
    let rows = sweep(cfg.distances()?, pool, |d| {
        let e = si_energy_per_area;
        Ok(match energy_components(&pair, d, q) {
            Ok(c) => {
                let conv = c.fm.converged && c.af.converged && c.delta_exact.converged && c.delta_perturbative.converged;
                let row = vec![
                    si_length(d).into(),
                    e(c.fm.value).into(),
                    e(c.af.value).into(),
                    e(c.delta_exact.value).into(),
                    e(c.delta_perturbative.value).into(),
                    e(c.fm.error_estimate).into(),
                    e(c.af.error_estimate).into(),
                    e(c.delta_exact.error_estimate).into(),
                    e(c.delta_perturbative.error_estimate).into(),
                    c.fm.evaluations.into(),
                    conv.into(),
                    if conv { "ok" } else { "not_converged" }.into(),
                ];
                (row, conv)
            }
            Err(Error::SingularKernel) => {
                let p = delta_energy_perturbative(&pair, d, q).map_err(core_error)?;
                let row = vec![
                    si_length(d).into(),
                    NAN.into(),
                    NAN.into(),
                    NAN.into(),
                    e(p.value).into(),
                    NAN.into(),
                    NAN.into(),
                    NAN.into(),
                    e(p.error_estimate).into(),
                    p.evaluations.into(),
                    p.converged.into(),
                    "exact_singular".into(),
                ];
                (row, false)
            }
            Err(err) => return Err(core_error(err)),
        })
    })?;
    let mut t = Table::new(
        "energy",
        &[
            "D[m]",
            "E_FM[J/m^2]",
            "E_AF[J/m^2]",
            "dE_exact[J/m^2]",
            "dE_perturbative[J/m^2]",
            "err_E_FM[J/m^2]",
            "err_E_AF[J/m^2]",
            "err_dE_exact[J/m^2]",
            "err_dE_perturbative[J/m^2]",
            "evaluations[1]",
            "converged",
            "status",
        ],
    );
    common_metadata(&mut t, cfg)?;
    t.meta("dE", "E_AF - E_FM");
    let status = status_of(rows.iter().map(|r| r.1));
    rows.into_iter().for_each(|r| t.push(r.0));
    Ok(Outcome { table: t, status })
}

pub fn force(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Outcome, CliError> {
    let pair = cfg.mirror_pair()?;
    let q = &cfg.quadrature;
    let rows = sweep(cfg.distances()?, pool, |d| {
        let f = si_pressure;
        Ok(match force_components(&pair, d, q) {
            Ok(c) => {
                let conv = c.fm.converged && c.af.converged && c.delta_exact.converged && c.delta_perturbative.converged;
                let row = vec![
                    si_length(d).into(),
                    f(c.fm.value).into(),
                    f(c.af.value).into(),
                    f(c.delta_exact.value).into(),
                    f(c.delta_perturbative.value).into(),
                    f(c.fm.error_estimate).into(),
                    f(c.af.error_estimate).into(),
                    f(c.delta_exact.error_estimate).into(),
                    f(c.delta_perturbative.error_estimate).into(),
                    c.fm.evaluations.into(),
                    conv.into(),
                    if conv { "ok" } else { "not_converged" }.into(),
                ];
                (row, conv)
            }
            Err(Error::SingularKernel) => {
                let p = delta_force(&pair, d, q, DeltaMethod::Perturbative).map_err(core_error)?;
                let row = vec![
                    si_length(d).into(),
                    NAN.into(),
                    NAN.into(),
                    NAN.into(),
                    f(p.value).into(),
                    NAN.into(),
                    NAN.into(),
                    NAN.into(),
                    f(p.error_estimate).into(),
                    p.evaluations.into(),
                    p.converged.into(),
                    "exact_singular".into(),
                ];
                (row, false)
            }
            Err(err) => return Err(core_error(err)),
        })
    })?;
    let mut t = Table::new(
        "force",
        &[
            "D[m]",
            "F_FM[N/m^2]",
            "F_AF[N/m^2]",
            "dF_exact[N/m^2]",
            "dF_perturbative[N/m^2]",
            "err_F_FM[N/m^2]",
            "err_F_AF[N/m^2]",
            "err_dF_exact[N/m^2]",
            "err_dF_perturbative[N/m^2]",
            "evaluations[1]",
            "converged",
            "status",
        ],
    );
    common_metadata(&mut t, cfg)?;
    t.meta("dF", "F_AF - F_FM; negative is attractive");
    let status = status_of(rows.iter().map(|r| r.1));
    rows.into_iter().for_each(|r| t.push(r.0));
    Ok(Outcome { table: t, status })
}

/// The closed-form family that applies to a pair.
enum Limit {
    Drude(DrudeParams),
    Dc(DcTransportParams, DcTransportParams),
    Oscillator(OscillatorParams, OscillatorParams),
    General(MaterialModel, MaterialModel),
}

struct PairLimit {
    limit: Limit,
    /// Product of the magnetization signs; the closed forms assume both
    /// mirrors magnetized along their outward normals.
    sign: f64,
}

fn pair_limit(pair: &MirrorPair) -> Result<PairLimit, CliError> {
    let (Mirror::Dielectric(a), Mirror::Dielectric(b)) = (&pair.a, &pair.b) else {
        return Err(CliError::Config("no closed-form magnetic limit for perfect mirrors".into()));
    };
    let sign = a.magnetization.sign() * b.magnetization.sign();
    let limit = match (&a.response, &b.response) {
        (Response::Drude(p), Response::Drude(q)) => {
            if p != q {
                return Err(CliError::Config("the Drude closed forms need identical mirrors".into()));
            }
            Limit::Drude(*p)
        }
        (Response::DcTransport(p), Response::DcTransport(q)) => Limit::Dc(*p, *q),
        (Response::Oscillator(p), Response::Oscillator(q)) => Limit::Oscillator(*p, *q),
        _ => Limit::General(a.clone(), b.clone()),
    };
    Ok(PairLimit { limit, sign })
}

fn asymptotic(pl: &PairLimit, d: f64, omega_star: Option<f64>, q: &QuadratureConfig) -> Result<AsymptoticResult, Error> {
    let k = &q.constants;
    let mut r = match &pl.limit {
        Limit::Drude(p) => match classify(p, d, k)?.tag {
            RegimeTag::LongDrude => drude_long(p, d, k)?,
            RegimeTag::IntermediateDrude => drude_intermediate(p, d, k)?,
            _ => drude_short(p, d, omega_star, k)?,
        },
        Limit::Dc(a, b) => realistic_long(a, b, d, k)?,
        Limit::Oscillator(a, b) => oscillator_short(a, b, d, k)?,
        Limit::General(a, b) => realistic_short(a, b, d, omega_star, k)?,
    };
    r.delta_e *= pl.sign;
    r.delta_f *= pl.sign;
    Ok(r)
}

/// Short-distance closed form, where one exists for the pair.
fn short_limit(pl: &PairLimit, d: f64, omega_star: Option<f64>, q: &QuadratureConfig) -> Option<f64> {
    let k = &q.constants;
    let r = match &pl.limit {
        Limit::Oscillator(a, b) => oscillator_short(a, b, d, k).ok()?,
        Limit::General(a, b) => realistic_short(a, b, d, omega_star, k).ok()?,
        Limit::Drude(_) | Limit::Dc(..) => return None,
    };
    Some(pl.sign * r.delta_f)
}

fn rel_dev(numeric: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        if numeric == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        numeric / reference - 1.0
    }
}

pub fn compare(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Outcome, CliError> {
    let pair = cfg.mirror_pair()?;
    let pl = pair_limit(&pair)?;
    let q = &cfg.quadrature;
    let method = cfg.compare_method;
    struct Row {
        d: f64,
        df: f64,
        df_asym: f64,
        de: f64,
        de_asym: f64,
        tag: RegimeTag,
        in_window: bool,
        converged: bool,
    }
    let rows = sweep(cfg.distances()?, pool, |d| {
        let a = asymptotic(&pl, d, cfg.omega_star, q).map_err(core_error)?;
        let f = delta_force(&pair, d, q, method).map_err(core_error)?;
        let e = match method {
            DeltaMethod::Perturbative => delta_energy_perturbative(&pair, d, q),
            DeltaMethod::Exact => delta_energy_exact(&pair, d, q),
        }
        .map_err(core_error)?;
        Ok(Row {
            d,
            df: f.value,
            df_asym: a.delta_f,
            de: e.value,
            de_asym: a.delta_e,
            tag: a.formula,
            in_window: a.in_window,
            converged: f.converged && e.converged,
        })
    })?;

    let mut t = Table::new(
        "compare",
        &[
            "D[m]",
            "dF_numeric[N/m^2]",
            "dF_asymptotic[N/m^2]",
            "rel_dev_dF[1]",
            "dE_numeric[J/m^2]",
            "dE_asymptotic[J/m^2]",
            "rel_dev_dE[1]",
            "regime",
            "in_window",
            "converged",
        ],
    );
    common_metadata(&mut t, cfg)?;
    t.meta(
        "method",
        match method {
            DeltaMethod::Perturbative => "perturbative",
            DeltaMethod::Exact => "exact",
        },
    );
    if let Some(w) = cfg.omega_star {
        t.meta("omega_star[s^-1]", format!("{w:e}"));
    }
    for r in &rows {
        t.push(vec![
            si_length(r.d).into(),
            si_pressure(r.df).into(),
            si_pressure(r.df_asym).into(),
            rel_dev(r.df, r.df_asym).into(),
            si_energy_per_area(r.de).into(),
            si_energy_per_area(r.de_asym).into(),
            rel_dev(r.de, r.de_asym).into(),
            r.tag.as_str().into(),
            r.in_window.into(),
            r.converged.into(),
        ]);
    }

    t.summary_columns = [
        "regime",
        "rows[1]",
        "rows_in_window[1]",
        "max_abs_rel_dev_dF[1]",
        "max_abs_rel_dev_dE[1]",
        "slope_dF_numeric[1]",
        "slope_dF_asymptotic[1]",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut tags: Vec<RegimeTag> = Vec::new();
    for r in &rows {
        if !tags.contains(&r.tag) {
            tags.push(r.tag);
        }
    }
    for tag in tags {
        let group: Vec<&Row> = rows.iter().filter(|r| r.tag == tag).collect();
        let inside: Vec<&&Row> = group.iter().filter(|r| r.in_window).collect();
        let max_dev = |f: &dyn Fn(&Row) -> f64| {
            if inside.is_empty() {
                NAN
            } else {
                inside.iter().map(|r| f(r).abs()).fold(0.0, f64::max)
            }
        };
        let ds: Vec<f64> = group.iter().map(|r| r.d).collect();
        let slope = |ys: Vec<f64>| log_log_slope(&ds, &ys).unwrap_or(NAN);
        t.summary.push(vec![
            tag.as_str().into(),
            group.len().into(),
            inside.len().into(),
            max_dev(&|r| rel_dev(r.df, r.df_asym)).into(),
            max_dev(&|r| rel_dev(r.de, r.de_asym)).into(),
            slope(group.iter().map(|r| r.df).collect()).into(),
            slope(group.iter().map(|r| r.df_asym).collect()).into(),
        ]);
    }
    let status = status_of(rows.iter().map(|r| r.converged));
    Ok(Outcome { table: t, status })
}

pub fn detect(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Outcome, CliError> {
    let Geometry::SpherePlate { radius } = cfg.geometry()? else {
        return Err(CliError::Config("detect needs a [geometry.sphere_plate] radius".into()));
    };
    let pair = cfg.mirror_pair()?;
    let short = pair_limit(&pair).ok();
    let q = &cfg.quadrature;
    let spec = &cfg.cantilever;
    let rows = sweep(cfg.distances()?, pool, |d| {
        let r = detectability_row(&pair, radius, spec, cfg.parasitic_bound, d, q).map_err(core_error)?;
        let s = short
            .as_ref()
            .and_then(|pl| short_limit(pl, d, cfg.omega_star, q))
            .map_or(NAN, |df| 2.0 * PI * radius * d * df);
        Ok((r, s))
    })?;

    let n = newton_from_gaussian_force;
    let mut t = Table::new(
        "detect",
        &[
            "D[m]",
            "dF_sphere[N]",
            "F_sphere[N]",
            "dF_sphere_short_limit[N]",
            "deflection_limit[N]",
            "thermal_limit[N]",
            "parasitic_bound[N]",
            "snr[1]",
            "detectable",
            "pfa_warning",
            "converged",
        ],
    );
    common_metadata(&mut t, cfg)?;
    t.meta("radius[m]", format!("{:e}", si_length(radius)));
    t.meta("bandwidth[Hz]", format!("{:e}", spec.bandwidth_hz));
    t.meta("resonance[Hz]", format!("{:e}", spec.resonance_hz));
    t.meta("dF_sphere", "2 pi R (E_AF - E_FM), lowest order in the magneto-optical response");
    t.meta("F_sphere", "2 pi R E(D) without the magneto-optical response");
    t.meta("dF_sphere_short_limit", "2 pi R D (F_AF - F_FM) from the short-distance closed form, where available");
    t.meta("deflection_limit[N]", format!("{:e}", n(min_force_deflection(spec))));
    t.meta("thermal_limit[N]", format!("{:e}", n(min_force_thermal(spec, q.constants.k_b))));
    if let Some((r, s)) = rows.iter().max_by(|a, b| a.0.snr.total_cmp(&b.0.snr).then(b.0.distance.total_cmp(&a.0.distance))) {
        t.meta(
            "headline",
            format!(
                "D = {:e} m: |dF_sphere| = {:e} N, |dF_sphere_short_limit| = {:e} N, |F_sphere| = {:e} N, snr = {:e}",
                si_length(r.distance),
                n(r.delta_f_sphere).abs(),
                n(*s).abs(),
                n(r.f_sphere).abs(),
                r.snr
            ),
        );
    }
    for (r, s) in &rows {
        t.push(vec![
            si_length(r.distance).into(),
            n(r.delta_f_sphere).into(),
            n(r.f_sphere).into(),
            n(*s).into(),
            n(r.deflection_limit).into(),
            n(r.thermal_limit).into(),
            n(r.parasitic_bound).into(),
            r.snr.into(),
            r.detectable().into(),
            r.pfa_warning.into(),
            r.converged.into(),
        ]);
    }
    let status = status_of(rows.iter().map(|r| r.0.converged));
    Ok(Outcome { table: t, status })
}

/// `eps_xx(i omega) >= 1` and non-increasing over twelve decades around
/// the material's own frequency scale.
fn eps_xx_well_behaved(m: &MaterialModel) -> Result<bool, Error> {
    let wc = m.characteristic_frequency();
    let mut prev = f64::INFINITY;
    for k in 0..=240 {
        let w = wc * 10f64.powf(-6.0 + 0.05 * k as f64);
        let e = m.eps_xx(w)?;
        if !(e >= 1.0) || e > prev * (1.0 + 1e-12) {
            return Ok(false);
        }
        prev = e;
    }
    Ok(true)
}

pub fn validate_materials(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut t = Table::new(
        "materials validate",
        &[
            "name",
            "model",
            "characteristic_frequency[s^-1]",
            "eps_xx_at_characteristic[1]",
            "eps_xy_at_characteristic[1]",
            "eps_xx_monotone",
            "warnings",
        ],
    );
    let mut ok = true;
    for m in &cfg.materials {
        let model = match &m.mirror {
            Mirror::Perfect => {
                t.push(vec![m.name.as_str().into(), "perfect".into(), NAN.into(), NAN.into(), NAN.into(), true.into(), "".into()]);
                continue;
            }
            Mirror::Dielectric(model) => model,
        };
        let kind = match model.response {
            Response::Drude(_) => "drude",
            Response::DcTransport(_) => "dc",
            Response::Oscillator(_) => "oscillator",
            Response::Tabulated(_) => "tabulated",
        };
        let wc = model.characteristic_frequency();
        let (xx, xy) = model.tensor(wc).map_err(core_error)?;
        let mono = eps_xx_well_behaved(model).map_err(core_error)?;
        ok &= mono;
        let warnings: Vec<String> = model.warnings().iter().map(|w| w.to_string()).collect();
        t.push(vec![
            m.name.as_str().into(),
            kind.into(),
            wc.into(),
            xx.into(),
            xy.into(),
            mono.into(),
            warnings.join("; ").replace(',', ";").into(),
        ]);
    }
    t.meta("materials", cfg.materials.len());
    Ok(Outcome { table: t, status: if ok { Status::Ok } else { Status::Invalid } })
}
