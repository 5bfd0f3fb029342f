//! Standard normal CDF via the complementary error function.
//!
//! `erfc` uses the alternating Taylor series of `erf` for small arguments
//! and a Lentz-evaluated continued fraction for the tail, which keeps
//! relative accuracy out to extreme p-values.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// P(Z <= z) for a standard normal Z.
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Two-sided survival mass: P(|Z| >= z) for z >= 0.
pub fn two_sided_p(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    (2.0 * cdf(-z)).min(1.0)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// erf by its Maclaurin series; converges quickly for |x| < 2.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    let mut n = 0u32;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) {
        n += 1;
        term *= -x2 * (2.0 * f64::from(n) - 1.0) / (f64::from(n) * (2.0 * f64::from(n) + 1.0));
        sum += term;
        if n > 200 {
            break;
        }
    }
    sum * 2.0 / PI.sqrt()
}

/// Legendre continued fraction for the tail,
/// sqrt(pi)*exp(x^2)*erfc(x) = 1/(x+ (1/2)/(x+ 1/(x+ (3/2)/(x+ 2/(x+ ...))))),
/// evaluated with the modified Lentz algorithm.
fn erfc_continued_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = tiny;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..400 {
        // Partial numerators: 1, 1/2, 1, 3/2, 2, ...; denominators all x.
        let a = if k == 1 { 1.0 } else { 0.5 * (k - 1) as f64 };
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() * f
}
