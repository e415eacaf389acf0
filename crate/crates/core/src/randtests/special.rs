//! Special functions used by the statistical test battery.
//!
//! Only the few functions the p-value formulas need are implemented: the
//! log-gamma function, the regularized incomplete gamma functions, the
//! complementary error function, and the standard normal CDF. Each is a
//! documented series / continued-fraction evaluation rather than a wrapper
//! around a numerics crate, so the battery has no dependencies beyond the
//! standard library and the implementations can be validated directly
//! against brute-force quadrature (see the unit tests).

/// Maximum iterations for the incomplete-gamma series and continued
/// fraction. Both converge in at most a few hundred steps for every
/// argument pair the battery produces; hitting the cap indicates a bug.
const MAX_ITERATIONS: usize = 10_000;

/// Relative tolerance at which the series / continued fraction stops.
const CONVERGENCE_EPS: f64 = 1e-16;

/// Lanczos approximation coefficients (g = 7, 9 terms). This parameter set
/// gives better than 1e-13 relative accuracy for positive real arguments,
/// far below the 1e-10 budget the battery needs.
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LANCZOS_G: f64 = 7.0;

/// Natural logarithm of the gamma function for `z > 0`.
pub fn ln_gamma(z: f64) -> f64 {
    assert!(z > 0.0, "ln_gamma requires a positive argument, got {z}");
    if z < 0.5 {
        // Reflection formula keeps the Lanczos sum on its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Shared prefactor x^a e^{-x} / Γ(a), evaluated in log space so large
/// arguments (block counts in the thousands) do not overflow.
fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

/// Regularized lower incomplete gamma function P(a, x) for `a > 0, x ≥ 0`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "gamma_p domain: a > 0, x >= 0");
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_continued_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma function Q(a, x) = 1 − P(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "gamma_q domain: a > 0, x >= 0");
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

/// Power series P(a,x) = x^a e^{-x}/Γ(a) · Σ_{k≥0} x^k / (a(a+1)…(a+k)),
/// convergent (and used) for x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    for k in 1..MAX_ITERATIONS {
        term *= x / (a + k as f64);
        sum += term;
        if term.abs() < sum.abs() * CONVERGENCE_EPS {
            return sum * gamma_prefactor(a, x);
        }
    }
    panic!("incomplete gamma series failed to converge for a={a}, x={x}");
}

/// Continued fraction Q(a,x) = x^a e^{-x}/Γ(a) · 1/(x+1−a− 1·(1−a)/(x+3−a−…)),
/// evaluated with the modified Lentz algorithm; used for x ≥ a + 1.
fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITERATIONS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CONVERGENCE_EPS {
            return h * gamma_prefactor(a, x);
        }
    }
    panic!("incomplete gamma continued fraction failed to converge for a={a}, x={x}");
}

/// Complementary error function, via erfc(x) = Q(1/2, x²) for x ≥ 0 and the
/// reflection erfc(−x) = 2 − erfc(x).
pub fn erfc(x: f64) -> f64 {
    if x >= 0.0 {
        gamma_q(0.5, x * x)
    } else {
        2.0 - gamma_q(0.5, x * x)
    }
}

/// Standard normal cumulative distribution function Φ(x) = erfc(−x/√2)/2.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}
