//! Deterministic adaptive quadrature.
//!
//! Vector-valued 15-point Gauss-Kronrod with global bisection of the panel
//! carrying the largest scaled error, and a nested form for rectangles
//! where every outer node runs its own adaptive inner integral. Integrating
//! several channels on one panel set keeps them on identical nodes, which is
//! what lets small differences between channels survive summation.
//!
//! Panel selection scans the panel list in order and breaks ties by
//! position, so a given integrand and configuration always produce the same
//! nodes and the same floating-point summation order.

use alloc::vec::Vec;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// 7-point Gauss weights on XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_804_939_476_142_360_184,
    0.525_532_409_916_328_985_817_739_049_189_254,
    0.796_666_477_413_626_739_591_553_936_475_830,
    0.960_289_856_497_536_231_683_560_868_569_473,
];

const GL8_W: [f64; 4] = [
    0.362_683_783_378_361_982_965_150_449_277_196,
    0.313_706_645_877_887_287_337_962_201_986_601,
    0.222_381_034_453_374_470_544_355_994_426_241,
    0.101_228_536_290_376_259_152_531_354_309_962,
];

/// Fixed 8-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre_8(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..4 {
        s += GL8_W[i] * (f(c - h * GL8_X[i]) + f(c + h * GL8_X[i]));
    }
    s * h
}

/// One integrand sample. `error` carries the uncertainty of values that
/// are themselves integrals (the nested case); it is zero otherwise.
#[derive(Debug, Clone, Copy)]
pub struct Sample<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub evaluations: usize,
}

impl<const N: usize> Sample<N> {
    pub fn exact(value: [f64; N]) -> Self {
        Sample { value, error: [0.0; N], evaluations: 1 }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub evaluations: usize,
    pub converged: bool,
}

/// Stopping rule shared by every channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<const N: usize> {
    pub rel: f64,
    pub abs: [f64; N],
    pub max_evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    splittable: bool,
}

fn kronrod<const N: usize, E>(
    a: f64,
    b: f64,
    f: &mut impl FnMut(f64) -> Result<Sample<N>, E>,
    evaluations: &mut usize,
) -> Result<Panel<N>, E> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut fv = [[0.0; N]; 15];
    let mut inner_err = [0.0; N];
    for j in 0..15 {
        let x = if j < 7 {
            centre - half * XGK[j]
        } else if j == 7 {
            centre
        } else {
            centre + half * XGK[14 - j]
        };
        let s = f(x)?;
        *evaluations += s.evaluations;
        let w = WGK[if j <= 7 { j } else { 14 - j }];
        for i in 0..N {
            inner_err[i] += w * s.error[i];
        }
        fv[j] = s.value;
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for i in 0..N {
        let mut resk = 0.0;
        let mut resg = 0.0;
        let mut resabs = 0.0;
        for j in 0..15 {
            let k = if j <= 7 { j } else { 14 - j };
            resk += WGK[k] * fv[j][i];
            resabs += WGK[k] * fv[j][i].abs();
            if k % 2 == 1 {
                resg += WG[k / 2] * fv[j][i];
            } else if k == 7 {
                resg += WG[3] * fv[j][i];
            }
        }
        let mean = 0.5 * resk;
        let mut resasc = 0.0;
        for j in 0..15 {
            let k = if j <= 7 { j } else { 14 - j };
            resasc += WGK[k] * (fv[j][i] - mean).abs();
        }
        let hl = half.abs();
        let mut err = ((resk - resg) * half).abs();
        let resasc = resasc * hl;
        let resabs = resabs * hl;
        if resasc != 0.0 && err != 0.0 {
            let scale = libm::pow(200.0 * err / resasc, 1.5);
            err = resasc * if scale < 1.0 { scale } else { 1.0 };
        }
        let floor = 50.0 * f64::EPSILON * resabs;
        if err < floor {
            err = floor;
        }
        value[i] = resk * half;
        error[i] = err + inner_err[i] * hl;
    }

    // Stop bisecting once the midpoint is no longer distinguishable.
    let splittable = centre > a && centre < b && half.abs() > 4.0 * f64::EPSILON * centre.abs();
    Ok(Panel { a, b, value, error, splittable })
}

fn totals<const N: usize>(panels: &[Panel<N>]) -> ([f64; N], [f64; N]) {
    let mut v = [0.0; N];
    let mut e = [0.0; N];
    for p in panels {
        for i in 0..N {
            v[i] += p.value[i];
            e[i] += p.error[i];
        }
    }
    (v, e)
}

/// Adaptive integration of a vector-valued integrand over
/// `[breakpoints[0], breakpoints[last]]`, starting from one panel per
/// breakpoint interval.
pub fn adaptive<const N: usize, E>(
    mut f: impl FnMut(f64) -> Result<Sample<N>, E>,
    breakpoints: &[f64],
    tol: &Tolerance<N>,
) -> Result<Estimate<N>, E> {
    assert!(breakpoints.len() >= 2, "need at least one interval");
    let mut evaluations = 0usize;
    let mut panels: Vec<Panel<N>> = Vec::with_capacity(64);
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            panels.push(kronrod(w[0], w[1], &mut f, &mut evaluations)?);
        }
    }

    loop {
        let (value, error) = totals(&panels);
        let mut thresholds = [0.0; N];
        let mut done = true;
        for i in 0..N {
            let t = (tol.rel * value[i].abs()).max(tol.abs[i]);
            thresholds[i] = t;
            if error[i] > t {
                done = false;
            }
        }
        if done {
            return Ok(Estimate { value, error, evaluations, converged: true });
        }
        if evaluations >= tol.max_evaluations {
            return Ok(Estimate { value, error, evaluations, converged: false });
        }

        // Largest error relative to its channel threshold; first wins ties.
        let mut best: Option<(usize, f64)> = None;
        for (idx, p) in panels.iter().enumerate() {
            if !p.splittable {
                continue;
            }
            let mut score = 0.0f64;
            for i in 0..N {
                let s = if thresholds[i] > 0.0 {
                    p.error[i] / thresholds[i]
                } else if p.error[i] > 0.0 {
                    f64::MAX
                } else {
                    0.0
                };
                if s > score {
                    score = s;
                }
            }
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((idx, score));
            }
        }
        let Some((idx, _)) = best else {
            return Ok(Estimate { value, error, evaluations, converged: false });
        };
        let p = panels[idx];
        let mid = 0.5 * (p.a + p.b);
        let left = kronrod(p.a, mid, &mut f, &mut evaluations)?;
        let right = kronrod(mid, p.b, &mut f, &mut evaluations)?;
        panels[idx] = left;
        panels.insert(idx + 1, right);
    }
}

/// Scalar convenience wrapper around [`adaptive`].
pub fn adaptive_scalar<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    breakpoints: &[f64],
    rel: f64,
    abs: f64,
    max_evaluations: usize,
) -> Result<Estimate<1>, E> {
    adaptive(
        |x| f(x).map(|v| Sample::exact([v])),
        breakpoints,
        &Tolerance { rel, abs: [abs], max_evaluations },
    )
}

/// Nested adaptive integration over a rectangle: outer variable on
/// `outer_breaks`, and for each outer node an adaptive inner integral whose
/// breakpoints are produced by `inner_breaks(outer)`.
///
/// Inner integrals run at a quarter of the outer relative tolerance; their
/// error estimates are propagated into the outer estimate.
pub fn nested<const N: usize, E, F, B>(
    f: F,
    outer_breaks: &[f64],
    mut inner_breaks: B,
    tol: &Tolerance<N>,
    inner_max_evaluations: usize,
) -> Result<Estimate<N>, E>
where
    F: Fn(f64, f64) -> Result<[f64; N], E>,
    B: FnMut(f64, &mut Vec<f64>),
{
    let span = outer_breaks[outer_breaks.len() - 1] - outer_breaks[0];
    let mut inner_abs = [0.0; N];
    for i in 0..N {
        inner_abs[i] = tol.abs[i] / span;
    }
    let inner_tol = Tolerance {
        rel: (0.25 * tol.rel).max(1e-14),
        abs: inner_abs,
        max_evaluations: inner_max_evaluations,
    };
    let mut breaks = Vec::with_capacity(16);
    adaptive(
        |outer| {
            breaks.clear();
            inner_breaks(outer, &mut breaks);
            let est = adaptive(|inner| f(outer, inner).map(Sample::exact), &breaks, &inner_tol)?;
            Ok(Sample { value: est.value, error: est.error, evaluations: est.evaluations })
        },
        outer_breaks,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::convert::Infallible;
    use core::f64::consts::PI;

    fn ok(v: f64) -> Result<f64, Infallible> {
        Ok(v)
    }

    #[test]
    fn gauss_legendre_is_exact_for_degree_15() {
        let v = gauss_legendre_8(-1.0, 2.0, |x| libm::pow(x, 15.0) - 3.0 * x * x);
        let exact = (libm::pow(2.0, 16.0) - 1.0) / 16.0 - 9.0;
        assert!((v - exact).abs() < 1e-10 * exact.abs());
    }

    #[test]
    fn integrates_smooth_and_singular_functions() {
        let e = adaptive_scalar(|x| ok(libm::exp(-x)), &[0.0, 50.0], 1e-12, 0.0, 100_000).unwrap();
        assert!(e.converged);
        assert!((e.value[0] - (1.0 - libm::exp(-50.0))).abs() < 1e-12);

        let e = adaptive_scalar(|x| ok(1.0 / libm::sqrt(x)), &[0.0, 1.0], 1e-10, 0.0, 100_000)
            .unwrap();
        assert!(e.converged);
        assert!((e.value[0] - 2.0).abs() < 1e-9);

        let e = adaptive_scalar(|x| ok(libm::log(x)), &[0.0, 1.0], 1e-10, 0.0, 100_000).unwrap();
        assert!((e.value[0] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn error_estimate_bounds_actual_error() {
        for &k in &[1.0, 5.0, 20.0] {
            let e = adaptive_scalar(|x| ok(libm::cos(k * x)), &[0.0, PI], 1e-9, 0.0, 100_000)
                .unwrap();
            let exact = libm::sin(k * PI) / k;
            assert!((e.value[0] - exact).abs() <= e.error[0].max(1e-15));
        }
    }

    #[test]
    fn vector_channels_share_nodes() {
        let mut calls = 0usize;
        let e = adaptive(
            |x: f64| -> Result<Sample<2>, Infallible> {
                calls += 1;
                Ok(Sample::exact([libm::exp(-x), 1e-9 * libm::exp(-x)]))
            },
            &[0.0, 10.0],
            &Tolerance { rel: 1e-10, abs: [0.0; 2], max_evaluations: 100_000 },
        )
        .unwrap();
        assert_eq!(calls, e.evaluations);
        // proportional channels come out exactly proportional
        assert!((e.value[1] / e.value[0] - 1e-9).abs() < 1e-22);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let e = adaptive_scalar(|x| ok(libm::sin(1.0 / x)), &[1e-6, 1.0], 1e-12, 0.0, 200).unwrap();
        assert!(!e.converged);
        assert!(e.evaluations >= 200);
    }

    #[test]
    fn zero_integrand_converges_immediately() {
        let e = adaptive_scalar(|_| ok(0.0), &[0.0, 1.0, 2.0], 1e-8, 0.0, 1000).unwrap();
        assert!(e.converged);
        assert_eq!(e.value[0], 0.0);
        assert_eq!(e.evaluations, 30);
    }

    #[test]
    fn nested_rectangle() {
        // int_0^2 int_0^1 x^2 y e^(-x y) dy dx, compare closed form
        let e = nested(
            |x: f64, y: f64| -> Result<[f64; 1], Infallible> { Ok([x * x * y * libm::exp(-x * y)]) },
            &[0.0, 1.0, 2.0],
            |_, b| b.extend_from_slice(&[0.0, 1.0]),
            &Tolerance { rel: 1e-10, abs: [0.0], max_evaluations: 1_000_000 },
            100_000,
        )
        .unwrap();
        // inner: int_0^1 y e^(-xy) dy = (1 - (1+x) e^-x)/x^2; outer: int_0^2 (1-(1+x)e^-x) dx
        let exact = 4.0 * libm::exp(-2.0);
        assert!(e.converged);
        assert!((e.value[0] - exact).abs() < 1e-9 * exact.abs(), "{} vs {exact}", e.value[0]);
    }

    #[test]
    fn errors_propagate() {
        let r = adaptive_scalar(
            |x| if x > 0.5 { Err("boom") } else { Ok(x) },
            &[0.0, 1.0],
            1e-8,
            0.0,
            1000,
        );
        assert_eq!(r.unwrap_err(), "boom");
    }

    #[test]
    fn deterministic() {
        let run = || {
            adaptive_scalar(|x| ok(libm::exp(-x) * libm::sin(30.0 * x)), &[0.0, 5.0], 1e-11, 0.0, 1 << 20)
                .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.value[0].to_bits(), b.value[0].to_bits());
        assert_eq!(a.evaluations, b.evaluations);
    }
}
