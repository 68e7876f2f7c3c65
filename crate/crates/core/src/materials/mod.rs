//! Dielectric tensor of a magnetized mirror at imaginary frequency.
//!
//! For a mirror magnetized along its normal only two elements matter:
//! the diagonal `eps_xx(i omega)` and the off-diagonal `eps_xy(i omega)`.
//! On the imaginary axis both are real; `eps_xx >= 1` for any passive
//! response and decreases monotonically towards the vacuum value.

mod tabulated;

pub use tabulated::{kk_transform_xx, kk_transform_xy, SpectrumTail, TabulatedSpectrum};

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::units::PhysicalConstants;
use crate::{Error, Result};

/// Electron charge in statcoulomb.
pub const ELECTRON_CHARGE_ESU: f64 = 4.803_204_712_570_263_7e-10;

/// Orientation of the magnetization relative to the mirror's own outward
/// normal. Two facing mirrors have opposite outward normals, so a pair
/// magnetized parallel in the lab has one `Outward` and one `Inward`
/// mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Magnetization {
    #[default]
    Outward,
    Inward,
}

impl Magnetization {
    pub fn sign(self) -> f64 {
        match self {
            Magnetization::Outward => 1.0,
            Magnetization::Inward => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Magnetization::Outward => Magnetization::Inward,
            Magnetization::Inward => Magnetization::Outward,
        }
    }
}

/// Something the parameter checks want the user to know about, without
/// rejecting the input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidityWarning {
    /// `omega_c tau << 1 << omega_p tau` is not satisfied by a factor 10.
    DrudeOrdering { omega_c_tau: f64, omega_p_tau: f64 },
    /// Anomalous Hall angles are normally small; |theta| > 0.1.
    LargeHallAngle(f64),
}

impl core::fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ValidityWarning::DrudeOrdering { omega_c_tau, omega_p_tau } => write!(
                f,
                "Drude parameters outside omega_c*tau << 1 << omega_p*tau \
                 (omega_c*tau = {omega_c_tau:e}, omega_p*tau = {omega_p_tau:e})"
            ),
            ValidityWarning::LargeHallAngle(theta) => {
                write!(f, "anomalous Hall angle {theta} is unusually large")
            }
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: "must be positive and finite" })
    }
}

fn finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: "must be finite" })
    }
}

/// Free-electron response with an effective cyclotron frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeParams {
    /// Plasma frequency (s^-1).
    pub omega_p: f64,
    /// Cyclotron frequency of the effective exchange/spin-orbit field (s^-1).
    /// The sign encodes the field direction.
    pub omega_c: f64,
    /// Relaxation time (s).
    pub tau: f64,
}

impl DrudeParams {
    pub fn new(omega_p: f64, omega_c: f64, tau: f64) -> Result<Self> {
        positive("omega_p", omega_p)?;
        positive("tau", tau)?;
        finite("omega_c", omega_c)?;
        Ok(DrudeParams { omega_p, omega_c, tau })
    }

    /// Build from carrier density `n` (cm^-3), effective mass (g) and the
    /// effective field (G): `omega_p^2 = 4 pi n e^2 / m*`, `omega_c = e B / (m* c)`.
    pub fn from_microscopic(
        density: f64,
        effective_mass: f64,
        b_eff: f64,
        tau: f64,
        constants: &PhysicalConstants,
    ) -> Result<Self> {
        positive("density", density)?;
        positive("effective_mass", effective_mass)?;
        finite("b_eff", b_eff)?;
        let e = ELECTRON_CHARGE_ESU;
        let omega_p = libm::sqrt(4.0 * PI * density * e * e / effective_mass);
        let omega_c = e * b_eff / (effective_mass * constants.c);
        Self::new(omega_p, omega_c, tau)
    }

    pub fn warnings(&self) -> Option<ValidityWarning> {
        let omega_c_tau = self.omega_c * self.tau;
        let omega_p_tau = self.omega_p * self.tau;
        (omega_c_tau.abs() > 0.1 || omega_p_tau < 10.0)
            .then_some(ValidityWarning::DrudeOrdering { omega_c_tau, omega_p_tau })
    }

    fn eps_xx(&self, omega: f64) -> f64 {
        1.0 + self.omega_p * self.omega_p * self.tau / (omega * (1.0 + omega * self.tau))
    }

    fn eps_xy(&self, omega: f64) -> f64 {
        let denom = 1.0 + omega * self.tau;
        self.omega_p * self.omega_p * self.omega_c * self.tau * self.tau / (omega * denom * denom)
    }
}

/// Low-frequency conductivity model, `sigma_xx = sigma` and
/// `sigma_xy = sigma * theta`, valid only for `omega <~ 1/tau_equiv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcTransportParams {
    /// dc conductivity, Gaussian (s^-1).
    pub sigma: f64,
    /// Anomalous Hall angle.
    pub theta: f64,
    /// Carrier relaxation time bounding the frequency range where the dc
    /// value is a good approximation (s).
    pub tau_equiv: f64,
}

impl DcTransportParams {
    pub fn new(sigma: f64, theta: f64, tau_equiv: f64) -> Result<Self> {
        positive("sigma", sigma)?;
        positive("tau_equiv", tau_equiv)?;
        finite("theta", theta)?;
        if theta.abs() >= 1.0 {
            return Err(Error::InvalidParameter { name: "theta", reason: "|theta| must be < 1" });
        }
        Ok(DcTransportParams { sigma, theta, tau_equiv })
    }

    pub fn warnings(&self) -> Option<ValidityWarning> {
        (self.theta.abs() > 0.1).then_some(ValidityWarning::LargeHallAngle(self.theta))
    }

    /// Smallest plate separation for which quadrature with this model is
    /// trusted: `10 c tau_equiv`.
    pub fn minimum_distance(&self, constants: &PhysicalConstants) -> f64 {
        10.0 * constants.c * self.tau_equiv
    }
}

/// Single absorption line at `omega_0` carrying all the (magneto-)optical
/// spectral weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub omega_0: f64,
    pub eps_xx_eff: f64,
    pub eps_xy_eff: f64,
}

impl OscillatorParams {
    pub fn new(omega_0: f64, eps_xx_eff: f64, eps_xy_eff: f64) -> Result<Self> {
        positive("omega_0", omega_0)?;
        positive("eps_xx_eff", eps_xx_eff)?;
        finite("eps_xy_eff", eps_xy_eff)?;
        Ok(OscillatorParams { omega_0, eps_xx_eff, eps_xy_eff })
    }

    fn eps_xx(&self, omega: f64) -> f64 {
        let w0 = self.omega_0;
        1.0 + 2.0 / PI * w0 * w0 * self.eps_xx_eff / (w0 * w0 + omega * omega)
    }

    fn eps_xy(&self, omega: f64) -> f64 {
        let w0 = self.omega_0;
        2.0 / PI * (w0 * w0 * w0 / omega) * self.eps_xy_eff / (w0 * w0 + omega * omega)
    }
}

/// The response model behind a [`MaterialModel`].
#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Drude(DrudeParams),
    DcTransport(DcTransportParams),
    Oscillator(OscillatorParams),
    Tabulated(TabulatedSpectrum),
}

/// A mirror material: a response model and the orientation of its
/// magnetization. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    pub response: Response,
    pub magnetization: Magnetization,
}

impl MaterialModel {
    pub fn new(response: Response) -> Self {
        MaterialModel { response, magnetization: Magnetization::Outward }
    }

    pub fn drude(params: DrudeParams) -> Self {
        Self::new(Response::Drude(params))
    }

    pub fn dc_transport(params: DcTransportParams) -> Self {
        Self::new(Response::DcTransport(params))
    }

    pub fn oscillator(params: OscillatorParams) -> Self {
        Self::new(Response::Oscillator(params))
    }

    pub fn tabulated(spectrum: TabulatedSpectrum) -> Self {
        Self::new(Response::Tabulated(spectrum))
    }

    pub fn with_magnetization(mut self, magnetization: Magnetization) -> Self {
        self.magnetization = magnetization;
        self
    }

    pub fn reversed(&self) -> Self {
        let mut m = self.clone();
        m.magnetization = m.magnetization.reversed();
        m
    }

    /// `eps_xx(i omega)`.
    pub fn eps_xx(&self, omega: f64) -> Result<f64> {
        check_frequency(omega)?;
        Ok(self.eps_xx_unchecked(omega))
    }

    /// `eps_xy(i omega)`, including the magnetization sign.
    pub fn eps_xy(&self, omega: f64) -> Result<f64> {
        check_frequency(omega)?;
        Ok(self.eps_xy_unchecked(omega))
    }

    /// Both tensor elements at once.
    pub fn tensor(&self, omega: f64) -> Result<(f64, f64)> {
        check_frequency(omega)?;
        Ok((self.eps_xx_unchecked(omega), self.eps_xy_unchecked(omega)))
    }

    pub(crate) fn eps_xx_unchecked(&self, omega: f64) -> f64 {
        match &self.response {
            Response::Drude(p) => p.eps_xx(omega),
            Response::DcTransport(p) => 1.0 + 4.0 * PI * p.sigma / omega,
            Response::Oscillator(p) => p.eps_xx(omega),
            Response::Tabulated(s) => s.kk_xx(omega),
        }
    }

    pub(crate) fn eps_xy_unchecked(&self, omega: f64) -> f64 {
        let bare = match &self.response {
            Response::Drude(p) => p.eps_xy(omega),
            Response::DcTransport(p) => 4.0 * PI * p.sigma * p.theta / omega,
            Response::Oscillator(p) => p.eps_xy(omega),
            Response::Tabulated(s) => s.kk_xy(omega),
        };
        bare * self.magnetization.sign()
    }

    /// Whether the off-diagonal element vanishes identically.
    pub fn is_non_magnetic(&self) -> bool {
        match &self.response {
            Response::Drude(p) => p.omega_c == 0.0,
            Response::DcTransport(p) => p.theta == 0.0,
            Response::Oscillator(p) => p.eps_xy_eff == 0.0,
            Response::Tabulated(s) => s.re_eps_xy().iter().all(|&v| v == 0.0),
        }
    }

    /// A frequency scale representative of the response: `omega_p`,
    /// `1/tau_equiv`, `omega_0`, or the geometric centre of the tabulated grid.
    pub fn characteristic_frequency(&self) -> f64 {
        match &self.response {
            Response::Drude(p) => p.omega_p,
            Response::DcTransport(p) => 1.0 / p.tau_equiv,
            Response::Oscillator(p) => p.omega_0,
            Response::Tabulated(s) => s.centre_frequency(),
        }
    }

    pub fn warnings(&self) -> Vec<ValidityWarning> {
        let w = match &self.response {
            Response::Drude(p) => p.warnings(),
            Response::DcTransport(p) => p.warnings(),
            _ => None,
        };
        w.into_iter().collect()
    }
}

fn check_frequency(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveFrequency(omega))
    }
}

/// Free-function form of [`MaterialModel::eps_xx`].
pub fn eps_xx(model: &MaterialModel, omega: f64) -> Result<f64> {
    model.eps_xx(omega)
}

/// Free-function form of [`MaterialModel::eps_xy`].
pub fn eps_xy(model: &MaterialModel, omega: f64) -> Result<f64> {
    model.eps_xy(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn drude(op: f64, oc: f64, tau: f64) -> MaterialModel {
        MaterialModel::drude(DrudeParams::new(op, oc, tau).unwrap())
    }

    #[test]
    fn drude_direct_substitution() {
        let m = drude(1.0, 0.01, 10.0);
        assert!((m.eps_xx(0.1).unwrap() - 51.0).abs() < 1e-12);
        assert!((m.eps_xy(0.1).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn dc_transport_direct_substitution() {
        let m = MaterialModel::dc_transport(DcTransportParams::new(1.0, 0.01, 1.0).unwrap());
        assert!((m.eps_xy(4.0 * PI).unwrap() - 0.01).abs() < 1e-15);
        assert!((m.eps_xx(4.0 * PI).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn oscillator_at_line_frequency() {
        let p = OscillatorParams::new(3.0, 10.0, 0.015).unwrap();
        let m = MaterialModel::oscillator(p);
        assert!((m.eps_xx(3.0).unwrap() - (1.0 + 10.0 / PI)).abs() < 1e-12);
        assert!((m.eps_xy(3.0).unwrap() - 0.015 / PI).abs() < 1e-15);
    }

    #[test]
    fn vacuum_limit_at_high_frequency() {
        let models = [
            drude(1.0, 0.01, 10.0),
            MaterialModel::oscillator(OscillatorParams::new(1.0, 5.0, 0.1).unwrap()),
            MaterialModel::dc_transport(DcTransportParams::new(1.0, 0.01, 1.0).unwrap()),
        ];
        for m in &models {
            let a = m.eps_xx(1e6).unwrap() - 1.0;
            let b = m.eps_xx(1e7).unwrap() - 1.0;
            assert!(a > 0.0 && a < 1e-4);
            // at least 1/omega decay
            assert!(b <= a * 0.1 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn rejects_bad_frequencies_and_parameters() {
        let m = drude(1.0, 0.01, 10.0);
        assert_eq!(m.eps_xx(0.0), Err(Error::NonPositiveFrequency(0.0)));
        assert!(m.eps_xy(-1.0).is_err());
        assert!(m.eps_xy(f64::INFINITY).is_err());
        assert!(DrudeParams::new(0.0, 1.0, 1.0).is_err());
        assert!(DrudeParams::new(1.0, 1.0, -1.0).is_err());
        assert!(DcTransportParams::new(1.0, 1.5, 1.0).is_err());
        assert!(OscillatorParams::new(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn warnings_flag_unusual_parameters() {
        assert!(DrudeParams::new(1e16, 1e10, 1e-13).unwrap().warnings().is_none());
        assert!(DrudeParams::new(1e16, 1e13, 1e-13).unwrap().warnings().is_some());
        assert!(DcTransportParams::new(1.0, 0.2, 1.0).unwrap().warnings().is_some());
        assert_eq!(drude(1.0, 0.5, 1.0).warnings().len(), 1);
    }

    #[test]
    fn drude_regime_forms() {
        let (op, oc, tau) = (1e16, 1e9, 1e-11);
        let m = drude(op, oc, tau);
        // omega tau << 1
        let w = 1e-3 / tau;
        let xx = m.eps_xx(w).unwrap();
        let xy = m.eps_xy(w).unwrap();
        assert!(((xx) / (op * op * tau / w) - 1.0).abs() < 0.02);
        assert!((xy / (op * op * oc * tau * tau / w) - 1.0).abs() < 0.02);
        // 1/tau << omega << omega_p, geometric centre of the window
        let w = libm::sqrt(op / tau);
        let xx = m.eps_xx(w).unwrap();
        let xy = m.eps_xy(w).unwrap();
        assert!((xx / (op * op / (w * w)) - 1.0).abs() < 0.02);
        assert!((xy / (op * op * oc / (w * w * w)) - 1.0).abs() < 0.02);
    }

    #[test]
    fn microscopic_constructor_matches_definitions() {
        let c = PhysicalConstants::GAUSSIAN;
        let m_e = 9.109_383_7e-28;
        let p = DrudeParams::from_microscopic(8.5e22, m_e, 1e5, 1e-14, &c).unwrap();
        let e = ELECTRON_CHARGE_ESU;
        assert!((p.omega_p * p.omega_p - 4.0 * PI * 8.5e22 * e * e / m_e).abs() / (p.omega_p * p.omega_p) < 1e-12);
        assert!((p.omega_c - e * 1e5 / (m_e * c.c)).abs() / p.omega_c < 1e-12);
    }

    #[test]
    fn non_magnetic_detection() {
        assert!(drude(1.0, 0.0, 1.0).is_non_magnetic());
        assert!(!drude(1.0, 0.1, 1.0).is_non_magnetic());
        let s = TabulatedSpectrum::new(
            (1..=8).map(|i| i as f64).collect(),
            vec![0.0; 8],
            vec![0.0; 8],
            SpectrumTail::Zero,
        )
        .unwrap();
        assert!(MaterialModel::tabulated(s).is_non_magnetic());
    }

    proptest! {
        #[test]
        fn eps_xx_at_least_one_and_decreasing(
            log_op in 14.0f64..17.0, log_oc in 8.0f64..13.0, log_tau in -15.0f64..-12.0,
            log_w0 in 14.0f64..16.5, exx in 0.1f64..50.0, exy in -0.1f64..0.1,
        ) {
            let models = [
                drude(10f64.powf(log_op), 10f64.powf(log_oc), 10f64.powf(log_tau)),
                MaterialModel::oscillator(OscillatorParams::new(10f64.powf(log_w0), exx, exy).unwrap()),
                MaterialModel::dc_transport(DcTransportParams::new(10f64.powf(log_op), 0.01, 1e-14).unwrap()),
            ];
            for m in &models {
                let mut prev = f64::INFINITY;
                for i in 0..60 {
                    let w = 10f64.powf(10.0 + 0.15 * i as f64);
                    let e = m.eps_xx(w).unwrap();
                    prop_assert!(e >= 1.0);
                    prop_assert!(e <= prev);
                    prev = e;
                }
            }
        }

        #[test]
        fn reversing_magnetization_negates_eps_xy_only(
            log_w in 10.0f64..18.0, oc in -1e12f64..1e12,
        ) {
            let m = drude(1.4e16, oc, 1e-14);
            let r = m.reversed();
            let w = 10f64.powf(log_w);
            prop_assert_eq!(r.eps_xy(w).unwrap(), -m.eps_xy(w).unwrap());
            prop_assert_eq!(r.eps_xx(w).unwrap(), m.eps_xx(w).unwrap());
            if oc != 0.0 {
                prop_assert_eq!(m.eps_xy(w).unwrap().signum(), oc.signum());
            }
        }
    }
}
