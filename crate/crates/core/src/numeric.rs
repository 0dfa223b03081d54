//! Adaptive Gauss-Kronrod quadrature and bracketed root finding.

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
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

/// One G7-K15 panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, err: f64, tol: f64, depth: u32) -> Result<f64> {
    if err <= tol || (b - a).abs() < 1e-15 * a.abs().max(1.0) {
        return Ok(whole);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Numerical(format!(
            "quadrature on [{a}, {b}] did not reach tolerance {tol:e}"
        )));
    }
    let mid = 0.5 * (a + b);
    let (left, el) = gk15(f, a, mid);
    let (right, er) = gk15(f, mid, b);
    Ok(adapt(f, a, mid, left, el, 0.5 * tol, depth + 1)? + adapt(f, mid, b, right, er, 0.5 * tol, depth + 1)?)
}

/// Integral of `f` over `[a, b]` to the given relative tolerance (with an
/// absolute floor of `abs_tol`).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (whole, err) = gk15(&f, a, b);
    // A coarse pass on a few panels fixes the scale of the answer.
    let coarse: f64 = (0..8)
        .map(|i| {
            let w = (b - a) / 8.0;
            gk15(&f, a + i as f64 * w, a + (i + 1) as f64 * w).0
        })
        .sum();
    let tol = (rel_tol * coarse.abs()).max(abs_tol);
    adapt(&f, a, b, whole, err, tol, 0)
}

/// Integral of `f` over `[lo, inf)`. Panels double in width starting from
/// `scale`; summation stops once a panel adds less than `1e-12` of the
/// running total.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: F, lo: f64, scale: f64, rel_tol: f64) -> Result<f64> {
    const MAX_PANELS: usize = 400;
    const TAIL_REL: f64 = 1e-12;
    let mut total = 0.0;
    let mut start = lo;
    let mut width = scale.abs().max(f64::MIN_POSITIVE);
    let mut quiet = 0;
    for _ in 0..MAX_PANELS {
        let end = start + width;
        let piece = integrate(&f, start, end, rel_tol, 1e-300)?;
        total += piece;
        if piece.abs() <= TAIL_REL * total.abs() || (piece == 0.0 && total == 0.0 && start > lo + 64.0 * scale.abs()) {
            quiet += 1;
            // Two consecutive negligible panels guards against a panel that
            // happens to straddle a sign change.
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        start = end;
        width *= 2.0;
        if !start.is_finite() {
            break;
        }
    }
    Err(Error::Numerical(format!(
        "tail integral from {lo} did not settle; the integrand may not be integrable"
    )))
}

/// Root of a nondecreasing function `g` with `g(x) = 0` somewhere; starts
/// from `[lo, hi]` and expands the bracket geometrically if needed. Stops at
/// absolute width `abs_tol`.
pub fn bracketed_root<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, abs_tol: f64) -> Result<f64> {
    const MAX_EXPANSIONS: usize = 200;
    let mut expansions = 0;
    while g(lo) > 0.0 {
        let w = (hi - lo).max(1.0);
        hi = lo;
        lo -= 2.0 * w;
        expansions += 1;
        if expansions > MAX_EXPANSIONS || !lo.is_finite() {
            return Err(Error::Numerical("could not bracket root from below".into()));
        }
    }
    while g(hi) < 0.0 {
        let w = (hi - lo).max(1.0);
        lo = hi;
        hi += 2.0 * w;
        expansions += 1;
        if expansions > MAX_EXPANSIONS || !hi.is_finite() {
            return Err(Error::Numerical("could not bracket root from above".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= abs_tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numerical("bisection did not converge".into()))
}
