//! Gamma-function ratios evaluated in log space.

use statrs::function::gamma::ln_gamma;

/// `Gamma(a + c) Gamma(a + m) / (Gamma(a) Gamma(a + m + c))` for `a > 0`, `c >= 0`, `m >= 0`.
///
/// This is the probability that the limiting degree of a vertex exceeds `m`
/// when its degree-dependent exponent is `c`, i.e. `prod_{i<m} (a+i)/(a+i+c)`
/// for integer `m`. Returns exactly 1 at `m = 0` and 0 for `c = inf, m > 0`.
pub fn gamma_tail_ratio(a: f64, c: f64, m: f64) -> f64 {
    debug_assert!(a > 0.0 && c >= 0.0 && m >= 0.0);
    if m == 0.0 {
        return 1.0;
    }
    if c.is_infinite() {
        return 0.0;
    }
    let head = ln_gamma(a + c) - ln_gamma(a);
    let tail = ln_gamma(a + m) - ln_gamma(a + m + c);
    (head + tail).exp()
}

/// `ln(Gamma(a + c) / Gamma(a))`.
pub fn ln_gamma_shift(a: f64, c: f64) -> f64 {
    ln_gamma(a + c) - ln_gamma(a)
}

pub use statrs::function::gamma::ln_gamma as log_gamma;
