//! Reflection matrix of a mirror magnetized along its normal, evaluated at
//! imaginary frequency `omega` and imaginary normal wavevector `k_perp`.
//!
//! With `t = omega / (k_perp c)` and `q = sqrt(1 + t^2 (eps_xx - 1))`:
//!
//! ```text
//! r_ss = (1 - q) / (1 + q)
//! r_pp = (eps_xx - q) / (eps_xx + q)
//! r_sp = r_ps = -t eps_xy / ((1 + q)(eps_xx + q))
//! ```
//!
//! `eps_xy` already carries the magnetization sign, so an inward-pointing
//! magnetization flips `r_sp` and leaves the diagonal untouched.

use libm::sqrt;

use crate::materials::{MaterialModel, Response};
use crate::units::PhysicalConstants;
use crate::{Error, Result};

/// A point of the rotated integration contour, `0 < omega <= k_perp c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KPoint {
    pub omega: f64,
    pub k_perp: f64,
}

impl KPoint {
    pub fn new(omega: f64, k_perp: f64) -> Self {
        KPoint { omega, k_perp }
    }

    /// `t = omega / (k_perp c)`, validated to lie in `(0, 1]`.
    pub fn direction(&self, constants: &PhysicalConstants) -> Result<f64> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::NonPositiveFrequency(self.omega));
        }
        if !(self.k_perp > 0.0) || !self.k_perp.is_finite() {
            return Err(Error::InvalidParameter {
                name: "k_perp",
                reason: "must be positive and finite",
            });
        }
        let t = self.omega / (self.k_perp * constants.c);
        if t > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: "must not exceed k_perp * c on the rotated contour",
            });
        }
        Ok(t.min(1.0))
    }
}

/// Real 2x2 reflection matrix `{r_ss, r_sp; r_ps, r_pp}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionMatrix {
    pub r_ss: f64,
    pub r_pp: f64,
    pub r_sp: f64,
    pub r_ps: f64,
}

impl ReflectionMatrix {
    pub const ZERO: ReflectionMatrix = ReflectionMatrix { r_ss: 0.0, r_pp: 0.0, r_sp: 0.0, r_ps: 0.0 };

    /// Unit-reflectivity mirror.
    pub const PERFECT: ReflectionMatrix =
        ReflectionMatrix { r_ss: -1.0, r_pp: 1.0, r_sp: 0.0, r_ps: 0.0 };

    pub fn determinant(&self) -> f64 {
        self.r_ss * self.r_pp - self.r_sp * self.r_ps
    }
}

/// Reflection coefficients together with the reflectivity deficits
/// `1 + r_ss` and `1 - r_pp`, which are computed without cancellation so
/// that `1 - r_ss^A r_ss^B e^{-u}` stays accurate for near-perfect mirrors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Surface {
    pub r_ss: f64,
    pub r_pp: f64,
    pub r_sp: f64,
    pub s_deficit: f64,
    pub p_deficit: f64,
}

impl Surface {
    pub const PERFECT: Surface =
        Surface { r_ss: -1.0, r_pp: 1.0, r_sp: 0.0, s_deficit: 0.0, p_deficit: 0.0 };

    pub fn new(eps_xx: f64, eps_xy: f64, t: f64) -> Result<Surface> {
        let chi = eps_xx - 1.0;
        let radicand = 1.0 + t * t * chi;
        if !(radicand > 0.0) || !radicand.is_finite() {
            return Err(Error::InvalidParameter {
                name: "eps_xx",
                reason: "square-root radicand must be positive",
            });
        }
        let q = sqrt(radicand);
        // q - 1 without cancellation
        let qm1 = t * t * chi / (q + 1.0);
        let r_ss = -qm1 / (1.0 + q);
        let r_pp = (chi - qm1) / (eps_xx + q);
        let r_sp = -t * eps_xy / ((1.0 + q) * (eps_xx + q));
        Ok(Surface {
            r_ss,
            r_pp,
            r_sp,
            s_deficit: 2.0 / (1.0 + q),
            p_deficit: 2.0 * q / (eps_xx + q),
        })
    }

    pub fn matrix(&self) -> ReflectionMatrix {
        ReflectionMatrix { r_ss: self.r_ss, r_pp: self.r_pp, r_sp: self.r_sp, r_ps: self.r_sp }
    }
}

/// Reflection matrix of `model` at the contour point `p`.
pub fn reflection_matrix(
    model: &MaterialModel,
    p: KPoint,
    constants: &PhysicalConstants,
) -> Result<ReflectionMatrix> {
    let t = p.direction(constants)?;
    let (exx, exy) = model.tensor(p.omega)?;
    Ok(Surface::new(exx, exy, t)?.matrix())
}

/// Defining inequalities must hold by at least this factor for
/// [`reflection_limit_check`] to accept a point.
pub const WINDOW_MARGIN: f64 = 10.0;

/// The three Drude frequency windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitRegime {
    /// `omega tau << 1`, strongly reflecting.
    Long,
    /// `1/tau << omega`, `omega, k_perp c << omega_p`.
    Intermediate,
    /// `1/tau << omega`, `k_perp c >> omega_p` and `k_perp c >> omega`.
    Short,
}

/// Leading-order reflection matrix of a Drude mirror inside one of its
/// limiting windows. Intended for diagnostics and tests.
pub fn reflection_limit_check(
    model: &MaterialModel,
    regime: LimitRegime,
    p: KPoint,
    constants: &PhysicalConstants,
) -> Result<ReflectionMatrix> {
    let Response::Drude(d) = &model.response else {
        return Err(Error::Unsupported("limiting forms exist for Drude mirrors only"));
    };
    let t = p.direction(constants)?;
    let w = p.omega;
    let kc = p.k_perp * constants.c;
    let (wp, wc, tau) = (d.omega_p, d.omega_c * model.magnetization.sign(), d.tau);
    let m = WINDOW_MARGIN;

    match regime {
        LimitRegime::Long => {
            let eps = wp * wp * tau / w;
            let q = t * sqrt(eps);
            if w * tau * m > 1.0 || q < m || m * t > sqrt(eps) {
                return Err(Error::OutsideWindow("long-distance Drude window"));
            }
            let r_sp = -(wc / wp) * sqrt(w * tau);
            Ok(ReflectionMatrix { r_ss: -1.0, r_pp: 1.0, r_sp, r_ps: r_sp })
        }
        LimitRegime::Intermediate => {
            if w * tau < m || w * m > wp || kc * m > wp {
                return Err(Error::OutsideWindow("intermediate Drude window"));
            }
            let r_sp = -wc / wp;
            Ok(ReflectionMatrix { r_ss: -1.0, r_pp: 1.0, r_sp, r_ps: r_sp })
        }
        LimitRegime::Short => {
            if w * tau < m || kc < m * wp || t * m > 1.0 {
                return Err(Error::OutsideWindow("short-distance Drude window"));
            }
            let r_sp = -wp * wp * wc / (2.0 * kc * (2.0 * w * w + wp * wp));
            Ok(ReflectionMatrix {
                r_ss: -wp * wp / (4.0 * kc * kc),
                r_pp: wp * wp / (2.0 * w * w + wp * wp),
                r_sp,
                r_ps: r_sp,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{DrudeParams, OscillatorParams};
    use proptest::prelude::*;

    const NAT: PhysicalConstants = PhysicalConstants::NATURAL;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn vacuum_has_no_reflection() {
        let s = Surface::new(1.0, 0.0, 0.7).unwrap();
        assert_eq!(s.matrix(), ReflectionMatrix::ZERO);
        assert_eq!(s.s_deficit, 1.0);
        assert_eq!(s.p_deficit, 1.0);
    }

    #[test]
    fn normal_incidence_substitution() {
        let s = Surface::new(4.0, 0.0, 1.0).unwrap();
        assert!((s.r_ss + 1.0 / 3.0).abs() < 1e-15);
        assert!((s.r_pp - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.r_ss, -s.r_pp);
    }

    #[test]
    fn perfect_mirror_limit() {
        let s = Surface::new(1e20, 1.0, 0.5).unwrap();
        assert!((s.r_ss + 1.0).abs() < 1e-9);
        assert!((s.r_pp - 1.0).abs() < 1e-9);
        assert!(s.r_sp.abs() < 1e-20);
    }

    #[test]
    fn deficits_match_coefficients() {
        for &(e, t) in &[(1.5, 0.3), (40.0, 1.0), (1e6, 0.01), (1.0 + 1e-10, 0.9)] {
            let s = Surface::new(e, 0.0, t).unwrap();
            assert!((s.s_deficit - (1.0 + s.r_ss)).abs() < 1e-15);
            assert!((s.p_deficit - (1.0 - s.r_pp)).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_invalid_points() {
        let m = MaterialModel::drude(DrudeParams::new(1.0, 0.01, 10.0).unwrap());
        assert!(reflection_matrix(&m, KPoint::new(1.0, 0.0), &NAT).is_err());
        assert!(reflection_matrix(&m, KPoint::new(0.0, 1.0), &NAT).is_err());
        assert!(reflection_matrix(&m, KPoint::new(2.0, 1.0), &NAT).is_err());
        assert!(reflection_matrix(&m, KPoint::new(1.0, 1.0), &NAT).is_ok());
    }

    #[test]
    fn intermediate_regime_r_sp_is_frequency_independent() {
        let (wp, wc, tau) = (1e6, 1e-2, 1e1);
        let m = MaterialModel::drude(DrudeParams::new(wp, wc, tau).unwrap());
        for &w in &[1e2, 3e2, 1e3] {
            let r = reflection_matrix(&m, KPoint::new(w, w), &NAT).unwrap();
            assert!(close(r.r_sp, -wc / wp, 0.02), "{} vs {}", r.r_sp, -wc / wp);
        }
    }

    #[test]
    fn limit_windows_are_enforced() {
        let m = MaterialModel::drude(DrudeParams::new(1e6, 1e-2, 1e-1).unwrap());
        let p = KPoint::new(1e3, 1e3);
        assert!(reflection_limit_check(&m, LimitRegime::Intermediate, p, &NAT).is_ok());
        assert!(reflection_limit_check(&m, LimitRegime::Long, p, &NAT).is_err());
        assert!(reflection_limit_check(&m, LimitRegime::Short, p, &NAT).is_err());
        let osc = MaterialModel::oscillator(OscillatorParams::new(1.0, 1.0, 0.1).unwrap());
        assert!(reflection_limit_check(&osc, LimitRegime::Short, p, &NAT).is_err());
    }

    #[test]
    fn long_regime_substitution() {
        // omega tau = 1e-4 gives r_sp = -(omega_c/omega_p) 1e-2
        let (wp, wc, tau) = (1e8, 1e-4, 1.0);
        let m = MaterialModel::drude(DrudeParams::new(wp, wc, tau).unwrap());
        let r = reflection_limit_check(&m, LimitRegime::Long, KPoint::new(1e-4, 1e-4), &NAT).unwrap();
        assert!(close(r.r_sp, -(wc / wp) * 1e-2, 1e-12));
    }

    #[test]
    fn short_regime_high_frequency_form() {
        let (wp, wc, tau) = (1.0, 1e-3, 1e4);
        let m = MaterialModel::drude(DrudeParams::new(wp, wc, tau).unwrap());
        let p = KPoint::new(1e3, 2e4);
        let r = reflection_limit_check(&m, LimitRegime::Short, p, &NAT).unwrap();
        let kc = p.k_perp;
        assert!(close(r.r_sp, -wp * wp * wc / (4.0 * kc * p.omega * p.omega), 1e-5));
    }

    fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        let (a, b) = (libm::log10(lo), libm::log10(hi));
        (0..n).map(move |i| libm::pow(10.0, a + (b - a) * i as f64 / (n - 1) as f64))
    }

    fn assert_limit_agrees(m: &MaterialModel, regime: LimitRegime, p: KPoint) {
        let exact = reflection_matrix(m, p, &NAT).unwrap();
        let lim = reflection_limit_check(m, regime, p, &NAT).unwrap();
        assert!(close(exact.r_sp, lim.r_sp, 0.02), "{regime:?} {p:?}: {} vs {}", exact.r_sp, lim.r_sp);
        assert!(close(exact.r_ss, lim.r_ss, 0.02), "{regime:?} {p:?}: {} vs {}", exact.r_ss, lim.r_ss);
        assert!(close(exact.r_pp, lim.r_pp, 0.02), "{regime:?} {p:?}: {} vs {}", exact.r_pp, lim.r_pp);
    }

    #[test]
    fn exact_matches_limits_deep_in_windows() {
        // inequalities hold by >= 1e3 at every sampled point
        let m = MaterialModel::drude(DrudeParams::new(1e12, 1e-3, 1.0).unwrap());
        for w in log_grid(1e-8, 1e-3, 6) {
            for k in log_grid(w, w * 1e3, 4) {
                assert_limit_agrees(&m, LimitRegime::Long, KPoint::new(w, k));
            }
        }
        let m = MaterialModel::drude(DrudeParams::new(1e12, 1e-3, 1e-3).unwrap());
        for w in log_grid(1e6, 1e9, 6) {
            for k in log_grid(w, 1e9, 4) {
                assert_limit_agrees(&m, LimitRegime::Intermediate, KPoint::new(w, k));
            }
        }
        let m = MaterialModel::drude(DrudeParams::new(1.0, 1e-3, 1e6).unwrap());
        for k in log_grid(1e3, 1e6, 6) {
            for w in log_grid(1e-6 * k, 1e-3 * k, 5) {
                assert_limit_agrees(&m, LimitRegime::Short, KPoint::new(w, k));
            }
        }
    }

    #[test]
    fn paper_typical_values_have_small_r_sp() {
        let g = PhysicalConstants::GAUSSIAN;
        let m = MaterialModel::oscillator(OscillatorParams::new(6e15, 10.0, 1.5e-2).unwrap());
        let dr = MaterialModel::drude(DrudeParams::new(1.4e16, 1.4e10, 7.14e-14).unwrap());
        for model in [&m, &dr] {
            for w in log_grid(1e14, 1e17, 20) {
                for t in [0.05, 0.3, 1.0] {
                    let k = w / (t * g.c);
                    let r = reflection_matrix(model, KPoint::new(w, k), &g).unwrap();
                    assert!(r.r_sp.abs() < 0.1);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn passive_bounds_and_symmetry(
            log_w in -3.0f64..3.0, t in 1e-6f64..1.0, log_wp in -2.0f64..2.0,
            wc in -0.1f64..0.1, log_tau in -1.0f64..4.0,
        ) {
            let w = libm::pow(10.0, log_w);
            let m = MaterialModel::drude(
                DrudeParams::new(libm::pow(10.0, log_wp), wc, libm::pow(10.0, log_tau)).unwrap());
            let p = KPoint::new(w, w / t);
            let r = reflection_matrix(&m, p, &NAT).unwrap();
            prop_assert!(r.r_ss >= -1.0 && r.r_ss <= 0.0);
            prop_assert!(r.r_pp >= 0.0 && r.r_pp < 1.0);
            prop_assert_eq!(r.r_sp, r.r_ps);
            let rr = reflection_matrix(&m.reversed(), p, &NAT).unwrap();
            prop_assert_eq!(rr.r_sp, -r.r_sp);
            prop_assert_eq!(rr.r_ss, r.r_ss);
            prop_assert_eq!(rr.r_pp, r.r_pp);
        }

        #[test]
        fn smooth_in_both_arguments(log_w in -2.0f64..2.0, t in 0.01f64..0.99) {
            let m = MaterialModel::drude(DrudeParams::new(3.0, 0.02, 20.0).unwrap());
            let w = libm::pow(10.0, log_w);
            let k = w / t;
            let at = |w: f64, k: f64| reflection_matrix(&m, KPoint::new(w, k), &NAT).unwrap();
            let h = 1e-6;
            let c = at(w, k);
            for (a, b) in [(at(w * (1.0 + h), k), at(w * (1.0 - h), k)),
                           (at(w, k * (1.0 + h)), at(w, k * (1.0 - h)))] {
                for (x, y, z) in [(a.r_ss, b.r_ss, c.r_ss), (a.r_pp, b.r_pp, c.r_pp), (a.r_sp, b.r_sp, c.r_sp)] {
                    // first differences are O(h) and second differences O(h^2)
                    prop_assert!((x - y).abs() < 1e-4 * (c.r_ss.abs() + c.r_pp.abs() + 1e-3));
                    prop_assert!((x + y - 2.0 * z).abs() < 1e-9);
                }
            }
        }
    }
}
