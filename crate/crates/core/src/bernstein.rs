//! Polynomials on `[0, 1]` in the Bernstein basis
//! `b_{j,m}(x) = C(m, j) x^j (1 - x)^(m - j)`.
//!
//! Every polynomial in the model (the choice density `f`, its derivatives and the
//! rank-choice distribution function appearing in `F_1`) has nonnegative or
//! small-range Bernstein coefficients, so de Casteljau evaluation stays accurate for
//! all `x` in `[0, 1]` where the monomial form would cancel badly near `x = 1`.

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bernstein {
    coeffs: Vec<f64>,
}

impl Bernstein {
    /// `coeffs[j]` multiplies `b_{j,m}` with `m = coeffs.len() - 1`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a Bernstein polynomial needs a coefficient");
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// De Casteljau evaluation. Exact at both endpoints.
    pub fn eval(&self, x: f64) -> f64 {
        let mut work = self.coeffs.clone();
        let t = 1.0 - x;
        for level in (1..work.len()).rev() {
            for j in 0..level {
                work[j] = t * work[j] + x * work[j + 1];
            }
        }
        work[0]
    }

    /// `d/dx` as a Bernstein polynomial of one degree less (degree 0 maps to the zero constant).
    pub fn derivative(&self) -> Self {
        let m = self.degree();
        if m == 0 {
            return Self::new(vec![0.0]);
        }
        let coeffs = self
            .coeffs
            .windows(2)
            .map(|w| m as f64 * (w[1] - w[0]))
            .collect();
        Self::new(coeffs)
    }

    /// Coefficients `a_i` of `sum_i a_i x^i`.
    pub fn to_monomial(&self) -> Vec<f64> {
        let m = self.degree();
        let mut out = vec![0.0; m + 1];
        for (j, &beta) in self.coeffs.iter().enumerate() {
            if beta == 0.0 {
                continue;
            }
            let outer = beta * binomial(m, j);
            for l in 0..=(m - j) {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                out[j + l] += outer * sign * binomial(m - j, l);
            }
        }
        out
    }

    /// Largest minus smallest coefficient; zero iff the polynomial is constant.
    pub fn coefficient_spread(&self) -> f64 {
        let (lo, hi) = self
            .coeffs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
                (lo.min(c), hi.max(c))
            });
        hi - lo
    }
}

/// Horner evaluation of a monomial-basis polynomial.
pub fn eval_monomial(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `int_0^1 sum_i a_i x^i dx`, from the antiderivative.
pub fn integrate_monomial_unit(coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c / (i + 1) as f64)
        .sum()
}
