//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Used as the independent numerical route wherever a closed form is checked:
//! Gaussian moments, kernel transforms, Fourier normalizations, L2 errors.

use alloc::vec::Vec;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
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

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 40;
/// Past this many evaluations remaining panels are accepted as they stand.
const MAX_EVALUATIONS: usize = 2_000_000;

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the per-panel Kronrod/Gauss differences.
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Kronrod value, Kronrod/Gauss difference, and the Kronrod estimate of `∫|f|`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut magnitude = fc.abs() * WGK[7];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let (left, right) = (f(center - dx), f(center + dx));
        let pair = left + right;
        kronrod += w * pair;
        magnitude += w * (left.abs() + right.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let half = half.abs();
    (kronrod * half, ((kronrod - gauss) * half).abs(), magnitude * half)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Panels are bisected until each local Kronrod/Gauss difference falls below
/// its share of `tol` or reaches the rounding level of `∫|f|` over the panel,
/// so an unreachable `tol` costs bounded work. `min_panels` forces an initial uniform split, which is
/// needed for strongly oscillatory integrands.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, min_panels: usize) -> Integral {
    let panels = min_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut stack: Vec<(f64, f64, u32)> = (0..panels)
        .rev()
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == panels { b } else { lo + width };
            (lo, hi, 0)
        })
        .collect();
    let total = (b - a).abs().max(f64::MIN_POSITIVE);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e, magnitude) = gk15(&f, lo, hi);
        evaluations += 15;
        let share = tol * ((hi - lo).abs() / total);
        let settled = e <= share.max(50.0 * f64::EPSILON * magnitude);
        if settled || depth >= MAX_DEPTH || evaluations >= MAX_EVALUATIONS {
            value += v;
            error += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Integral {
        value,
        error_estimate: error,
        evaluations,
    }
}

/// `∫ f(y) (π s)^{-1/2} e^{-(y-center)²/s} dy` over the real line.
///
/// The weight is below `e^{-81}` outside `center ± 9√s`, so the range is cut
/// there.
pub fn integrate_gaussian_weighted<F: Fn(f64) -> f64>(
    f: F,
    center: f64,
    s: f64,
    tol: f64,
    min_panels: usize,
) -> Integral {
    let width = 9.0 * libm::sqrt(s);
    let norm = 1.0 / libm::sqrt(core::f64::consts::PI * s);
    integrate(
        |y| {
            let d = y - center;
            f(y) * norm * libm::exp(-d * d / s)
        },
        center - width,
        center + width,
        tol,
        min_panels,
    )
}
