use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::quadrature::gauss_legendre_8;
use crate::{Error, Result};

/// What the spectrum does above the last grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumTail {
    /// Spectrum is zero outside the grid.
    #[default]
    Zero,
    /// `Im eps_xx` continues as `A / omega^3`, matched at the last point.
    /// `Re eps_xy` is still taken as zero beyond the grid.
    InverseCube,
}

/// Measured absorptive spectra on the real frequency axis, linearly
/// interpolated between samples. The imaginary-axis tensor follows from
/// the causality relations; each linear segment is integrated in closed
/// form against the rational kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpectrum {
    grid: Vec<f64>,
    im_eps_xx: Vec<f64>,
    re_eps_xy: Vec<f64>,
    tail: SpectrumTail,
}

impl TabulatedSpectrum {
    pub const MIN_POINTS: usize = 8;

    pub fn new(
        grid: Vec<f64>,
        im_eps_xx: Vec<f64>,
        re_eps_xy: Vec<f64>,
        tail: SpectrumTail,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Spectrum("empty frequency grid"));
        }
        if grid.len() != im_eps_xx.len() || grid.len() != re_eps_xy.len() {
            return Err(Error::Spectrum("column lengths differ"));
        }
        if grid.len() < Self::MIN_POINTS {
            return Err(Error::Spectrum("at least 8 grid points are required"));
        }
        if grid.iter().chain(&im_eps_xx).chain(&re_eps_xy).any(|v| !v.is_finite()) {
            return Err(Error::Spectrum("non-finite sample"));
        }
        if grid[0] < 0.0 {
            return Err(Error::Spectrum("negative frequency in grid"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Spectrum("grid is not strictly increasing"));
        }
        if im_eps_xx.iter().any(|&v| v < 0.0) {
            return Err(Error::Spectrum("Im eps_xx must be non-negative (passivity)"));
        }
        Ok(TabulatedSpectrum { grid, im_eps_xx, re_eps_xy, tail })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn im_eps_xx(&self) -> &[f64] {
        &self.im_eps_xx
    }

    pub fn re_eps_xy(&self) -> &[f64] {
        &self.re_eps_xy
    }

    pub fn tail(&self) -> SpectrumTail {
        self.tail
    }

    /// Same samples with `Re eps_xy` negated.
    pub fn with_flipped_xy(&self) -> Self {
        let mut s = self.clone();
        s.re_eps_xy.iter_mut().for_each(|v| *v = -*v);
        s
    }

    pub(crate) fn centre_frequency(&self) -> f64 {
        let lo = self.grid.iter().copied().find(|&w| w > 0.0).unwrap_or(1.0);
        let hi = self.grid[self.grid.len() - 1];
        libm::sqrt(lo * hi)
    }

    /// `1 + (2/pi) int w' Im eps_xx(w') / (w'^2 + omega^2) dw'`.
    pub(crate) fn kk_xx(&self, omega: f64) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.grid.len() - 1 {
            let (a, b) = (self.grid[i], self.grid[i + 1]);
            let (fa, fb) = (self.im_eps_xx[i], self.im_eps_xx[i + 1]);
            if fa == 0.0 && fb == 0.0 {
                continue;
            }
            sum += segment_xx(a, b, fa, fb, omega);
        }
        if self.tail == SpectrumTail::InverseCube {
            let n = self.grid.len() - 1;
            let (w_last, f_last) = (self.grid[n], self.im_eps_xx[n]);
            if f_last > 0.0 && w_last > 0.0 {
                let z = omega / w_last;
                sum += f_last * one_minus_atan_ratio(z) / (z * z);
            }
        }
        1.0 + 2.0 / PI * sum
    }

    /// `(2/(pi omega)) int w'^2 Re eps_xy(w') / (w'^2 + omega^2) dw'`.
    pub(crate) fn kk_xy(&self, omega: f64) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.grid.len() - 1 {
            let (a, b) = (self.grid[i], self.grid[i + 1]);
            let (fa, fb) = (self.re_eps_xy[i], self.re_eps_xy[i + 1]);
            if fa == 0.0 && fb == 0.0 {
                continue;
            }
            sum += segment_xy(a, b, fa, fb, omega);
        }
        2.0 / (PI * omega) * sum
    }
}

/// Segment switch: far from the kernel poles at `+-i omega` an 8-point
/// Gauss rule is exact to rounding, and avoids the cancellation of the
/// closed form when `omega` dominates `b`.
const GAUSS_SWITCH: f64 = 4.0;

fn linear(a: f64, b: f64, fa: f64, fb: f64) -> (f64, f64) {
    let h = b - a;
    let slope = (fb - fa) / h;
    (fa - slope * a, slope)
}

// 0.5 ln((b^2 + w^2) / (a^2 + w^2)) and atan(b/w) - atan(a/w)
fn log_and_angle(a: f64, b: f64, w: f64) -> (f64, f64) {
    let h = b - a;
    let log_ratio = 0.5 * libm::log1p(h * (a + b) / (a * a + w * w));
    let angle = libm::atan(h * w / (w * w + a * b));
    (log_ratio, angle)
}

fn segment_xx(a: f64, b: f64, fa: f64, fb: f64, w: f64) -> f64 {
    if w >= GAUSS_SWITCH * b {
        return gauss_legendre_8(a, b, |x| {
            let f = fa + (fb - fa) * (x - a) / (b - a);
            x * f / (x * x + w * w)
        });
    }
    let (alpha, beta) = linear(a, b, fa, fb);
    let (l, theta) = log_and_angle(a, b, w);
    alpha * l + beta * ((b - a) - w * theta)
}

fn segment_xy(a: f64, b: f64, fa: f64, fb: f64, w: f64) -> f64 {
    if w >= GAUSS_SWITCH * b {
        return gauss_legendre_8(a, b, |x| {
            let f = fa + (fb - fa) * (x - a) / (b - a);
            x * x * f / (x * x + w * w)
        });
    }
    let (alpha, beta) = linear(a, b, fa, fb);
    let (l, theta) = log_and_angle(a, b, w);
    let h = b - a;
    alpha * h + beta * 0.5 * h * (a + b) - alpha * w * theta - beta * w * w * l
}

/// `1 - atan(z)/z`, accurate for small `z`.
fn one_minus_atan_ratio(z: f64) -> f64 {
    if z < 0.1 {
        let z2 = z * z;
        z2 * (1.0 / 3.0 - z2 * (1.0 / 5.0 - z2 * (1.0 / 7.0 - z2 * (1.0 / 9.0 - z2 / 11.0))))
    } else {
        1.0 - libm::atan(z) / z
    }
}

/// Causality transform of the diagonal element.
pub fn kk_transform_xx(spectrum: &TabulatedSpectrum, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    Ok(spectrum.kk_xx(omega))
}

/// Causality transform of the off-diagonal element.
pub fn kk_transform_xy(spectrum: &TabulatedSpectrum, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    Ok(spectrum.kk_xy(omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{MaterialModel, OscillatorParams};
    use alloc::vec;

    /// Brute-force reference: fine composite Simpson on the interpolant.
    fn brute_xx(s: &TabulatedSpectrum, w: f64) -> f64 {
        let mut sum = 0.0;
        for i in 0..s.grid.len() - 1 {
            let (a, b) = (s.grid[i], s.grid[i + 1]);
            let (fa, fb) = (s.im_eps_xx[i], s.im_eps_xx[i + 1]);
            let n = 2000;
            let h = (b - a) / n as f64;
            let g = |x: f64| x * (fa + (fb - fa) * (x - a) / (b - a)) / (x * x + w * w);
            let mut acc = g(a) + g(b);
            for k in 1..n {
                acc += if k % 2 == 1 { 4.0 } else { 2.0 } * g(a + k as f64 * h);
            }
            sum += acc * h / 3.0;
        }
        1.0 + 2.0 / PI * sum
    }

    fn brute_xy(s: &TabulatedSpectrum, w: f64) -> f64 {
        let mut sum = 0.0;
        for i in 0..s.grid.len() - 1 {
            let (a, b) = (s.grid[i], s.grid[i + 1]);
            let (fa, fb) = (s.re_eps_xy[i], s.re_eps_xy[i + 1]);
            let n = 2000;
            let h = (b - a) / n as f64;
            let g = |x: f64| x * x * (fa + (fb - fa) * (x - a) / (b - a)) / (x * x + w * w);
            let mut acc = g(a) + g(b);
            for k in 1..n {
                acc += if k % 2 == 1 { 4.0 } else { 2.0 } * g(a + k as f64 * h);
            }
            sum += acc * h / 3.0;
        }
        2.0 / (PI * w) * sum
    }

    /// Triangular peak of unit height-width product scaled to weight.
    fn peaked(w0: f64, width: f64, weight_xx: f64, weight_xy: f64) -> TabulatedSpectrum {
        let grid = vec![
            0.0,
            0.25 * w0,
            0.5 * w0,
            w0 - width,
            w0,
            w0 + width,
            1.5 * w0,
            2.0 * w0,
            4.0 * w0,
        ];
        let h_xx = weight_xx / width;
        let h_xy = weight_xy / width;
        let mut xx = vec![0.0; grid.len()];
        let mut xy = vec![0.0; grid.len()];
        xx[4] = h_xx;
        xy[4] = h_xy;
        TabulatedSpectrum::new(grid, xx, xy, SpectrumTail::Zero).unwrap()
    }

    #[test]
    fn closed_form_segments_match_brute_force() {
        let grid: Vec<f64> = (0..12).map(|i| 0.3 + 0.7 * i as f64).collect();
        let xx: Vec<f64> = grid.iter().map(|w| libm::exp(-(w - 3.0) * (w - 3.0))).collect();
        let xy: Vec<f64> = grid.iter().map(|w| 0.1 * libm::sin(*w)).collect();
        let s = TabulatedSpectrum::new(grid, xx, xy, SpectrumTail::Zero).unwrap();
        for &w in &[0.01, 0.3, 1.0, 4.0, 20.0, 100.0, 1e4] {
            let a = s.kk_xx(w);
            let b = brute_xx(&s, w);
            assert!((a - b).abs() <= 1e-9 * b.abs(), "xx at {w}: {a} vs {b}");
            let a = s.kk_xy(w);
            let b = brute_xy(&s, w);
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-12), "xy at {w}: {a} vs {b}");
        }
    }

    #[test]
    fn vacuum_spectrum() {
        let grid: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let s = TabulatedSpectrum::new(grid, vec![0.0; 8], vec![0.0; 8], SpectrumTail::InverseCube)
            .unwrap();
        for &w in &[1e-3, 1.0, 1e3] {
            assert_eq!(kk_transform_xx(&s, w).unwrap(), 1.0);
            assert_eq!(kk_transform_xy(&s, w).unwrap(), 0.0);
        }
    }

    #[test]
    fn narrow_peak_matches_oscillator() {
        let w0 = 6.0e15;
        let (exx, exy) = (10.0, 1.5e-2);
        let osc = MaterialModel::oscillator(OscillatorParams::new(w0, exx, exy).unwrap());
        let s = peaked(w0, 1e-3 * w0, w0 * exx, w0 * exy);
        for &r in &[1e-2, 0.3, 1.0, 3.0, 30.0] {
            let w = r * w0;
            let (xx, xy) = (s.kk_xx(w), s.kk_xy(w));
            let (oxx, oxy) = osc.tensor(w).unwrap();
            assert!((xx / oxx - 1.0).abs() < 0.01, "xx at {r}: {xx} vs {oxx}");
            assert!((xy / oxy - 1.0).abs() < 0.01, "xy at {r}: {xy} vs {oxy}");
        }
    }

    #[test]
    fn two_peaks_add_linearly() {
        let (w1, w2) = (1.0, 5.0);
        let grid = vec![0.0, 0.5, 0.999, 1.0, 1.001, 3.0, 4.999, 5.0, 5.001, 8.0];
        let mut xx = vec![0.0; grid.len()];
        let mut xy = vec![0.0; grid.len()];
        xx[3] = w1 * 2.0 / 1e-3;
        xx[7] = w2 * 0.5 / 1e-3;
        xy[3] = w1 * 0.01 / 1e-3;
        xy[7] = -w2 * 0.02 / 1e-3;
        let s = TabulatedSpectrum::new(grid, xx, xy, SpectrumTail::Zero).unwrap();
        let a = MaterialModel::oscillator(OscillatorParams::new(w1, 2.0, 0.01).unwrap());
        let b = MaterialModel::oscillator(OscillatorParams::new(w2, 0.5, -0.02).unwrap());
        for &w in &[0.1, 1.0, 2.5, 10.0] {
            let (axx, axy) = a.tensor(w).unwrap();
            let (bxx, bxy) = b.tensor(w).unwrap();
            assert!((s.kk_xx(w) - (axx + bxx - 1.0)).abs() < 0.01 * s.kk_xx(w));
            let sum = axy + bxy;
            assert!((s.kk_xy(w) - sum).abs() < 0.01 * sum.abs(), "{w}");
        }
    }

    #[test]
    fn flipping_xy_flips_output() {
        let s = peaked(2.0, 0.01, 1.0, 0.3);
        let f = s.with_flipped_xy();
        for &w in &[0.1, 2.0, 40.0] {
            assert_eq!(f.kk_xy(w), -s.kk_xy(w));
            assert_eq!(f.kk_xx(w), s.kk_xx(w));
        }
    }

    #[test]
    fn xx_decreases_and_stays_above_one() {
        let s = peaked(2.0, 0.05, 3.0, 0.3);
        let mut prev = f64::INFINITY;
        for i in 0..80 {
            let w = libm::pow(10.0, -3.0 + 0.1 * i as f64);
            let e = s.kk_xx(w);
            assert!(e >= 1.0 && e <= prev, "at {w}");
            prev = e;
        }
    }

    #[test]
    fn inverse_cube_tail_adds_weight() {
        let grid: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let xx = vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0];
        let zero = TabulatedSpectrum::new(grid.clone(), xx.clone(), vec![0.0; 8], SpectrumTail::Zero)
            .unwrap();
        let cubic =
            TabulatedSpectrum::new(grid, xx, vec![0.0; 8], SpectrumTail::InverseCube).unwrap();
        for &w in &[1e-4, 0.5, 3.0, 50.0] {
            // tail: int_8^inf w' (512/w'^3) / (w'^2 + w^2) dw' by substitution s = 1/w'
            let n = 20000;
            let mut acc = 0.0;
            let h = (1.0 / 8.0) / n as f64;
            for k in 0..n {
                let s = (k as f64 + 0.5) * h;
                // dw' = ds / s^2, w' = 1/s
                let x = 1.0 / s;
                acc += x * 512.0 / (x * x * x) / (x * x + w * w) / (s * s) * h;
            }
            let expected = zero.kk_xx(w) + 2.0 / PI * acc;
            let got = cubic.kk_xx(w);
            assert!((got - expected).abs() < 1e-7 * expected, "{w}: {got} vs {expected}");
        }
    }

    #[test]
    fn construction_errors() {
        let g: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let z = vec![0.0; 8];
        assert!(TabulatedSpectrum::new(vec![], vec![], vec![], SpectrumTail::Zero).is_err());
        assert!(TabulatedSpectrum::new(g[..7].to_vec(), z[..7].to_vec(), z[..7].to_vec(), SpectrumTail::Zero).is_err());
        let mut bad = g.clone();
        bad.swap(2, 3);
        assert!(TabulatedSpectrum::new(bad, z.clone(), z.clone(), SpectrumTail::Zero).is_err());
        let mut neg = z.clone();
        neg[3] = -0.1;
        assert!(TabulatedSpectrum::new(g.clone(), neg, z.clone(), SpectrumTail::Zero).is_err());
        let mut nan = z.clone();
        nan[1] = f64::NAN;
        assert!(TabulatedSpectrum::new(g, z, nan, SpectrumTail::Zero).is_err());
    }
}
