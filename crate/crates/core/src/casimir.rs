//! Zero-temperature Casimir energy and force between two magnetized mirrors.
//!
//! With `u = 2 k_perp D`, `t = omega / (k_perp c)` and `x = e^{-u}`, the
//! energy per unit area is
//!
//! ```text
//! E = hbar c / (32 pi^2 D^3) * int_0^umax du u^2 int_0^1 dt ln det(1 - x R_A R_B)
//! ```
//!
//! and the force per unit area is obtained by differentiating under the
//! integral sign. Writing `m = r_sp^A r_sp^B` (both signs taken relative to
//! each mirror's own outward normal) the determinant splits into a part
//! that is even in `m` and a term `-2 x m`; the magnetic differences are
//! evaluated from that split at every node, so they never suffer from the
//! cancellation of two large, separately integrated energies.
//!
//! # Alignment convention
//!
//! Two facing mirrors have opposite outward normals. Two identical
//! materials that are both magnetized *outward* therefore point in opposite
//! lab directions: that is the [`Alignment::Antiferromagnetic`]
//! configuration, and the materials' magnetizations are used as given.
//! [`Alignment::Ferromagnetic`] reverses mirror B.

use core::f64::consts::PI;

use alloc::vec::Vec;
use libm::{atanh, expm1, log, log1p};

use crate::materials::{MaterialModel, Response};
use crate::quadrature::{nested, Estimate, Tolerance};
use crate::reflectivity::Surface;
use crate::units::PhysicalConstants;
use crate::{Error, Result};

/// Relative magnetization of the two mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alignment {
    Ferromagnetic,
    #[default]
    Antiferromagnetic,
}

/// One side of the cavity.
#[derive(Debug, Clone, PartialEq)]
pub enum Mirror {
    Dielectric(MaterialModel),
    /// Idealized unit-reflectivity mirror: `r_ss = -1`, `r_pp = 1`, `r_sp = 0`.
    Perfect,
}

impl Mirror {
    fn surface(&self, omega: f64, t: f64) -> Result<Surface> {
        match self {
            Mirror::Perfect => Ok(Surface::PERFECT),
            Mirror::Dielectric(m) => {
                Surface::new(m.eps_xx_unchecked(omega), m.eps_xy_unchecked(omega), t)
            }
        }
    }

    fn frequency_scales(&self, out: &mut Vec<f64>) {
        let Mirror::Dielectric(m) = self else { return };
        match &m.response {
            Response::Drude(p) => out.extend_from_slice(&[p.omega_p, 1.0 / p.tau]),
            Response::DcTransport(p) => {
                out.extend_from_slice(&[1.0 / p.tau_equiv, 4.0 * PI * p.sigma])
            }
            Response::Oscillator(p) => out.push(p.omega_0),
            Response::Tabulated(s) => {
                let g = s.grid();
                if g[0] > 0.0 {
                    out.push(g[0]);
                }
                out.push(g[g.len() - 1]);
            }
        }
    }

    fn reversed(&self) -> Mirror {
        match self {
            Mirror::Perfect => Mirror::Perfect,
            Mirror::Dielectric(m) => Mirror::Dielectric(m.reversed()),
        }
    }
}

impl From<MaterialModel> for Mirror {
    fn from(m: MaterialModel) -> Self {
        Mirror::Dielectric(m)
    }
}

/// Two mirrors facing each other across a vacuum gap.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorPair {
    pub a: Mirror,
    pub b: Mirror,
    pub alignment: Alignment,
}

impl MirrorPair {
    pub fn new(a: impl Into<Mirror>, b: impl Into<Mirror>) -> Self {
        MirrorPair { a: a.into(), b: b.into(), alignment: Alignment::default() }
    }

    /// Two unit-reflectivity mirrors.
    pub fn perfect() -> Self {
        MirrorPair::new(Mirror::Perfect, Mirror::Perfect)
    }

    pub fn with_alignment(mut self, alignment: Alignment) -> Self {
        self.alignment = alignment;
        self
    }

    /// The same pair with mirror A's magnetization reversed.
    pub fn with_a_reversed(&self) -> Self {
        MirrorPair { a: self.a.reversed(), b: self.b.clone(), alignment: self.alignment }
    }
}

/// Tolerances and budgets for the two-dimensional quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative tolerance, in `(0, 1e-2]`.
    pub rel_tol: f64,
    /// Absolute floor on the energy per area (erg/cm^2). Force integrals use
    /// `abs_tol / D`.
    pub abs_tol: f64,
    /// Budget of integrand evaluations for one quadrature call.
    pub max_evaluations: usize,
    /// Upper cutoff of `u = 2 k_perp D`; at least 40.
    pub u_max: f64,
    pub constants: PhysicalConstants,
    /// Accept dc-transport materials below their validity distance.
    pub allow_dc_short_distance: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_evaluations: 20_000_000,
            u_max: 80.0,
            constants: PhysicalConstants::GAUSSIAN,
            allow_dc_short_distance: false,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_constants(mut self, constants: PhysicalConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::InvalidParameter { name: "rel_tol", reason: "must lie in (0, 1e-2]" });
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::InvalidParameter { name: "abs_tol", reason: "must be finite and >= 0" });
        }
        if !(self.u_max >= 40.0) || !self.u_max.is_finite() {
            return Err(Error::InvalidParameter { name: "u_max", reason: "must be finite and >= 40" });
        }
        if self.max_evaluations == 0 {
            return Err(Error::InvalidParameter { name: "max_evaluations", reason: "must be positive" });
        }
        Ok(())
    }
}

/// Result of one quadrature: an energy per area (erg/cm^2) or a force per
/// area (dyn/cm^2) depending on the operation that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Force-per-area counterpart of [`EnergyResult`].
pub type ForceResult = EnergyResult;

/// Energies of both alignments and their difference, from one shared grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyComponents {
    pub fm: EnergyResult,
    pub af: EnergyResult,
    pub delta_exact: EnergyResult,
    pub delta_perturbative: EnergyResult,
}

/// Forces of both alignments and their difference, from one shared grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceComponents {
    pub fm: ForceResult,
    pub af: ForceResult,
    pub delta_exact: ForceResult,
    pub delta_perturbative: ForceResult,
}

/// Which expression [`delta_force`] integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaMethod {
    /// Lowest order in the magneto-optical coefficients.
    #[default]
    Perturbative,
    /// Exact `F_AF - F_FM`.
    Exact,
}

const INNER_MAX_EVALUATIONS: usize = 200_000;

/// Everything the integrands need at one `(u, t)` node, with the
/// alignment-dependent `m = r_sp^A r_sp^B` in its antiparallel form.
struct Node {
    x: f64,
    ss: f64,
    pp: f64,
    m: f64,
    /// `1 - x r_ss^A r_ss^B`
    a: f64,
    /// `1 - x r_pp^A r_pp^B`
    b: f64,
    /// `m^2 - r_ss^A r_pp^A (r_sp^B)^2 - r_ss^B r_pp^B (r_sp^A)^2`
    delta: f64,
}

impl Node {
    fn new(sa: &Surface, sb: &Surface, u: f64) -> Node {
        let x = libm::exp(-u);
        let one_minus_x = -expm1(-u);
        let (aa, ab) = (sa.s_deficit, sb.s_deficit);
        let (ba, bb) = (sa.p_deficit, sb.p_deficit);
        let m = sa.r_sp * sb.r_sp;
        Node {
            x,
            ss: sa.r_ss * sb.r_ss,
            pp: sa.r_pp * sb.r_pp,
            m,
            a: one_minus_x + x * (aa + ab - aa * ab),
            b: one_minus_x + x * (ba + bb - ba * bb),
            delta: m * m
                - sa.r_ss * sa.r_pp * sb.r_sp * sb.r_sp
                - sb.r_ss * sb.r_pp * sa.r_sp * sa.r_sp,
        }
    }

    /// `det(1 - x R_A R_B)` terms that do not depend on the alignment.
    fn even(&self) -> f64 {
        self.a * self.b + self.x * self.x * self.delta
    }

    /// `sigma = +1` for the antiparallel (as given) orientation, `-1` for parallel.
    fn m_signed(&self, sigma: f64) -> f64 {
        sigma * self.m
    }

    /// `ln A + ln B`, switching to `log1p` where `x` is small and `1 - A`
    /// carries all the information.
    fn ln_diagonal(&self) -> f64 {
        let ln = |full: f64, xr: f64| if xr.abs() < 0.5 { log1p(-xr) } else { log(full) };
        ln(self.a, self.x * self.ss) + ln(self.b, self.x * self.pp)
    }

    fn ln_det(&self, sigma: f64) -> Result<f64> {
        let ab = self.a * self.b;
        let rest = (self.x * self.x * self.delta - 2.0 * self.x * self.m_signed(sigma)) / ab;
        if !(rest > -1.0) {
            return Err(Error::SingularKernel);
        }
        Ok(self.ln_diagonal() + log1p(rest))
    }

    /// `ln det_AF - ln det_FM`.
    fn ln_det_difference(&self) -> Result<f64> {
        let e = self.even();
        let y = 2.0 * self.x * self.m;
        if !(e - y > 0.0 && e + y > 0.0) {
            return Err(Error::SingularKernel);
        }
        Ok(-2.0 * atanh(y / e))
    }

    fn ln_det_difference_perturbative(&self) -> f64 {
        -4.0 * self.x * self.m / (self.a * self.b)
    }

    fn force_kernel_non_magnetic(&self) -> f64 {
        self.x * (self.ss / self.a + self.pp / self.b)
    }

    /// `x N / det` with `N = tr P - 2 x det P`, the force integrand.
    fn force_kernel(&self, sigma: f64) -> Result<f64> {
        let ms = self.m_signed(sigma);
        let n = self.ss * self.b + self.pp * self.a + 2.0 * ms - 2.0 * self.x * self.delta;
        let det = self.even() - 2.0 * self.x * ms;
        // a sign change of det puts a pole on the integration domain
        if !(det > 0.0) {
            return Err(Error::SingularKernel);
        }
        Ok(self.x * n / det)
    }

    fn force_kernel_difference(&self) -> Result<f64> {
        let e = self.even();
        let y = 2.0 * self.x * self.m;
        if !(e - y > 0.0 && e + y > 0.0) {
            return Err(Error::SingularKernel);
        }
        let dets = (e - y) * (e + y);
        let one_minus_x2q = self.a + self.b - self.a * self.b - self.x * self.x * self.delta;
        Ok(2.0 * y * one_minus_x2q / dets)
    }

    fn force_kernel_difference_perturbative(&self) -> f64 {
        let ab = self.a * self.b;
        4.0 * self.x * self.m * (self.a + self.b - ab) / (ab * ab)
    }
}

fn check_distance(pair: &MirrorPair, d: f64, cfg: &QuadratureConfig) -> Result<()> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::NonPositiveDistance(d));
    }
    cfg.validate()?;
    if !cfg.allow_dc_short_distance {
        for mirror in [&pair.a, &pair.b] {
            if let Mirror::Dielectric(MaterialModel { response: Response::DcTransport(p), .. }) =
                mirror
            {
                let bound = p.minimum_distance(&cfg.constants);
                if d < bound {
                    return Err(Error::DcOutOfValidity { distance: d, bound });
                }
            }
        }
    }
    Ok(())
}

fn push_unique(v: &mut Vec<f64>) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1e-300));
}

/// Integrate `weight(u) * kernel(node)` over the `(u, t)` rectangle.
/// `scale` converts the dimensionless integral to physical units.
fn integrate<const N: usize>(
    pair: &MirrorPair,
    d: f64,
    cfg: &QuadratureConfig,
    power: i32,
    scale: [f64; N],
    abs_floor: [f64; N],
    kernel: impl Fn(&Node) -> Result<[f64; N]>,
) -> Result<[EnergyResult; N]> {
    let c = cfg.constants.c;
    let mut scales = Vec::new();
    pair.a.frequency_scales(&mut scales);
    pair.b.frequency_scales(&mut scales);

    // omega = t u c / (2D); material scales become breakpoints in u and t
    let mut u_breaks: Vec<f64> = [0.0, 1e-3, 1e-2, 0.1, 1.0, 4.0, 16.0, cfg.u_max].to_vec();
    for &w in &scales {
        let u = 2.0 * d * w / c;
        if u > 1e-6 && u < cfg.u_max {
            u_breaks.push(u);
        }
    }
    push_unique(&mut u_breaks);

    // inner variable s with t = s^2: a Drude eps_xx ~ 1/omega makes the
    // integrand go like sqrt(t) near t = 0
    let inner_breaks = |u: f64, out: &mut Vec<f64>| {
        out.extend_from_slice(&[0.0, 0.1, 0.3, 1.0]);
        for &w in &scales {
            let t = 2.0 * d * w / (u * c);
            if t > 1e-12 && t < 1.0 {
                out.push(libm::sqrt(t));
            }
        }
        push_unique(out);
    };

    let mut abs = [0.0; N];
    for i in 0..N {
        abs[i] = if scale[i] != 0.0 { abs_floor[i] / scale[i].abs() } else { 0.0 };
    }
    let tol = Tolerance { rel: cfg.rel_tol, abs, max_evaluations: cfg.max_evaluations };

    let est: Estimate<N> = nested(
        |u: f64, s: f64| -> Result<[f64; N]> {
            let t = s * s;
            let omega = t * u * c / (2.0 * d);
            let sa = pair.a.surface(omega, t)?;
            let sb = pair.b.surface(omega, t)?;
            let node = Node::new(&sa, &sb, u);
            let w = 2.0 * s * libm::pow(u, power as f64);
            let mut v = kernel(&node)?;
            for x in v.iter_mut() {
                *x *= w;
            }
            Ok(v)
        },
        &u_breaks,
        inner_breaks,
        &tol,
        INNER_MAX_EVALUATIONS,
    )?;

    let mut out = [EnergyResult { value: 0.0, error_estimate: 0.0, evaluations: 0, converged: true }; N];
    for i in 0..N {
        out[i] = EnergyResult {
            value: est.value[i] * scale[i],
            error_estimate: est.error[i] * scale[i].abs(),
            evaluations: est.evaluations,
            converged: est.converged,
        };
    }
    Ok(out)
}

fn energy_prefactor(d: f64, k: &PhysicalConstants) -> f64 {
    k.hbar * k.c / (32.0 * PI * PI * d * d * d)
}

fn force_prefactor(d: f64, k: &PhysicalConstants) -> f64 {
    -k.hbar * k.c / (32.0 * PI * PI * d * d * d * d)
}

fn sigma(alignment: Alignment) -> f64 {
    match alignment {
        Alignment::Antiferromagnetic => 1.0,
        Alignment::Ferromagnetic => -1.0,
    }
}

/// Casimir energy per area of the pair in its configured alignment.
pub fn energy_exact(pair: &MirrorPair, d: f64, cfg: &QuadratureConfig) -> Result<EnergyResult> {
    check_distance(pair, d, cfg)?;
    let s = sigma(pair.alignment);
    let p = energy_prefactor(d, &cfg.constants);
    let [r] = integrate(pair, d, cfg, 2, [p], [cfg.abs_tol], |n| Ok([n.ln_det(s)?]))?;
    Ok(r)
}

/// Casimir energy per area with the off-diagonal reflection coefficients
/// dropped. Stays defined for responses whose `|r_sp|` approaches unity,
/// where the exact integrands are singular.
pub fn energy_non_magnetic(pair: &MirrorPair, d: f64, cfg: &QuadratureConfig) -> Result<EnergyResult> {
    check_distance(pair, d, cfg)?;
    let p = energy_prefactor(d, &cfg.constants);
    let [r] = integrate(pair, d, cfg, 2, [p], [cfg.abs_tol], |n| Ok([n.ln_diagonal()]))?;
    Ok(r)
}

/// `E_AF - E_FM`, exact in the magneto-optical coefficients.
pub fn delta_energy_exact(pair: &MirrorPair, d: f64, cfg: &QuadratureConfig) -> Result<EnergyResult> {
    check_distance(pair, d, cfg)?;
    let p = energy_prefactor(d, &cfg.constants);
    let [r] = integrate(pair, d, cfg, 2, [p], [cfg.abs_tol], |n| Ok([n.ln_det_difference()?]))?;
    Ok(r)
}

/// `E_AF - E_FM` to lowest order in `r_sp^A r_sp^B`.
pub fn delta_energy_perturbative(
    pair: &MirrorPair,
    d: f64,
    cfg: &QuadratureConfig,
) -> Result<EnergyResult> {
    check_distance(pair, d, cfg)?;
    let p = energy_prefactor(d, &cfg.constants);
    let [r] = integrate(pair, d, cfg, 2, [p], [cfg.abs_tol], |n| {
        Ok([n.ln_det_difference_perturbative()])
    })?;
    Ok(r)
}

/// Both alignments, the exact difference and the perturbative difference on
/// one shared grid.
pub fn energy_components(
    pair: &MirrorPair,
    d: f64,
    cfg: &QuadratureConfig,
) -> Result<EnergyComponents> {
    check_distance(pair, d, cfg)?;
    let p = energy_prefactor(d, &cfg.constants);
    let [fm, af, delta_exact, delta_perturbative] =
        integrate(pair, d, cfg, 2, [p; 4], [cfg.abs_tol; 4], |n| {
            Ok([
                n.ln_det(-1.0)?,
                n.ln_det(1.0)?,
                n.ln_det_difference()?,
                n.ln_det_difference_perturbative(),
            ])
        })?;
    Ok(EnergyComponents { fm, af, delta_exact, delta_perturbative })
}

/// Casimir force per area, `-dE/dD`, of the pair in its configured alignment.
/// Negative means attractive.
pub fn force_exact(pair: &MirrorPair, d: f64, cfg: &QuadratureConfig) -> Result<ForceResult> {
    check_distance(pair, d, cfg)?;
    let s = sigma(pair.alignment);
    let p = force_prefactor(d, &cfg.constants);
    let [r] = integrate(pair, d, cfg, 3, [p], [cfg.abs_tol / d], |n| Ok([n.force_kernel(s)?]))?;
    Ok(r)
}

/// Force per area with the off-diagonal reflection coefficients dropped.
pub fn force_non_magnetic(pair: &MirrorPair, d: f64, cfg: &QuadratureConfig) -> Result<ForceResult> {
    check_distance(pair, d, cfg)?;
    let p = force_prefactor(d, &cfg.constants);
    let [r] = integrate(pair, d, cfg, 3, [p], [cfg.abs_tol / d], |n| {
        Ok([n.force_kernel_non_magnetic()])
    })?;
    Ok(r)
}

/// `F_AF - F_FM`.
pub fn delta_force(
    pair: &MirrorPair,
    d: f64,
    cfg: &QuadratureConfig,
    method: DeltaMethod,
) -> Result<ForceResult> {
    check_distance(pair, d, cfg)?;
    let p = force_prefactor(d, &cfg.constants);
    let [r] = match method {
        DeltaMethod::Perturbative => integrate(pair, d, cfg, 3, [p], [cfg.abs_tol / d], |n| {
            Ok([n.force_kernel_difference_perturbative()])
        })?,
        DeltaMethod::Exact => integrate(pair, d, cfg, 3, [p], [cfg.abs_tol / d], |n| {
            Ok([n.force_kernel_difference()?])
        })?,
    };
    Ok(r)
}

/// Forces of both alignments and both differences on one shared grid.
pub fn force_components(
    pair: &MirrorPair,
    d: f64,
    cfg: &QuadratureConfig,
) -> Result<ForceComponents> {
    check_distance(pair, d, cfg)?;
    let p = force_prefactor(d, &cfg.constants);
    let [fm, af, delta_exact, delta_perturbative] =
        integrate(pair, d, cfg, 3, [p; 4], [cfg.abs_tol / d; 4], |n| {
            Ok([
                n.force_kernel(-1.0)?,
                n.force_kernel(1.0)?,
                n.force_kernel_difference()?,
                n.force_kernel_difference_perturbative(),
            ])
        })?;
    Ok(ForceComponents { fm, af, delta_exact, delta_perturbative })
}

/// Largest `|r_sp|` of either mirror over a log-spaced sample of the
/// integration domain at separation `d`.
pub fn max_abs_r_sp(pair: &MirrorPair, d: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_distance(pair, d, cfg)?;
    let c = cfg.constants.c;
    let n = 48;
    let mut best = 0.0f64;
    for i in 0..n {
        let u = libm::pow(10.0, -3.0 + (libm::log10(cfg.u_max) + 3.0) * i as f64 / (n - 1) as f64);
        for j in 0..n {
            let t = libm::pow(10.0, -4.0 + 4.0 * j as f64 / (n - 1) as f64);
            let omega = t * u * c / (2.0 * d);
            for mirror in [&pair.a, &pair.b] {
                best = best.max(mirror.surface(omega, t)?.r_sp.abs());
            }
        }
    }
    Ok(best)
}
