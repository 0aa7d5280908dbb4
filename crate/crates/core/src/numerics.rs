//! Cancellation-free hyperbolic kernels.
//!
//! The trajectory and cost closed forms contain differences such as
//! `cosh x - 1` and `sinh x - x` that lose every significant digit as
//! `x = ωT` shrinks toward the ramp-only limit. Each kernel here is
//! normalised so that it tends to 1 at `x = 0` and is evaluated by its
//! Taylor series below a crossover point, where the direct formula would
//! cancel.

/// Crossover below which series expansions replace direct formulas.
const SERIES_CUTOFF: f64 = 1.0;

/// `sinh(x) / x`, equal to 1 at the origin.
pub fn sinhc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sinh() / x
    }
}

/// `2 (cosh x - 1) / x²`.
///
/// Uses the identity `cosh x - 1 = 2 sinh²(x/2)`, which never cancels.
pub fn coshm1_ratio(x: f64) -> f64 {
    let s = sinhc(0.5 * x);
    s * s
}

/// `6 (sinh x - x) / x³`.
pub fn sinhmx_ratio(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        // 6 Σ_{k≥0} x^{2k} / (2k+3)!
        let x2 = x * x;
        let mut term = 1.0; // 6 / 3!
        let mut sum = term;
        let mut k = 0u32;
        loop {
            let n = 2 * k + 3;
            term *= x2 / f64::from((n + 1) * (n + 2));
            if term < f64::EPSILON * 1e-3 * sum {
                break;
            }
            sum += term;
            k += 1;
        }
        sum
    } else {
        6.0 * (x.sinh() - x) / (x * x * x)
    }
}

/// `10 (3 + sinhc(2x) - 4 sinhc(x)) / x⁴`, normalised to 1 at the origin.
///
/// Appears in `∫₀ᵀ ((cosh ωt - 1)/ω²)² dt = T⁵/20 · quartic_ratio(ωT)`.
pub fn quartic_ratio(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        // 10 Σ_{k≥2} (4^k - 4) x^{2k-4} / (2k+1)!
        let x2 = x * x;
        let mut sum = 0.0;
        let mut pow4 = 16.0;
        let mut xpow = 1.0;
        let mut fact = 120.0; // 5!
        let mut k = 2u32;
        loop {
            let term = (pow4 - 4.0) * xpow / fact;
            sum += term;
            if term < f64::EPSILON * 1e-3 * sum {
                break;
            }
            pow4 *= 4.0;
            xpow *= x2;
            fact *= f64::from((2 * k + 2) * (2 * k + 3));
            k += 1;
        }
        10.0 * sum
    } else {
        let x4 = x * x * x * x;
        10.0 * (3.0 + sinhc(2.0 * x) - 4.0 * sinhc(x)) / x4
    }
}
