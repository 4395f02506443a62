//! Closed-form limit objects of the location-choice model.
//!
//! Everything here is derived from the choice density
//!
//! ```text
//! f(x) = sum_s s Xi_s C(r, s) x^(s-1) (1 - x)^(r-s),
//! ```
//!
//! where `f(x) / r` is the chance that a fixed candidate at location `x` wins
//! against `r - 1` uniformly located competitors. The phase boundary is
//! `alpha_c = max f - 2`; above it the limiting preferential location measure
//! `Psi` is the unique root of the drift
//!
//! ```text
//! F_1(y; x) = x (1 + alpha) - (2 + alpha) y + G(y),   G(y) = sum_s Xi_s P[Bin(r, y) >= s],
//! ```
//!
//! and a vertex at location `x` has a limiting degree law with tail exponent
//! `(2 + alpha) / f(Psi(x))`.

use std::fmt;

use crate::bernstein::{self, Bernstein};
use crate::choice::ChoiceVector;
use crate::constants::{
    CONSTANT_F_TOL, CRITICAL_BISECTION_TOL, CRITICAL_GRID, MAXIMIZER_VALUE_TOL, PHASE_TOL,
};
use crate::error::{Error, Result};
use crate::special::{gamma_tail_ratio, ln_gamma_shift, log_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Condensation,
    Critical,
    NoCondensation,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Condensation => "Condensation",
            Phase::Critical => "Critical",
            Phase::NoCondensation => "NoCondensation",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where the choice density attains its global maximum.
#[derive(Debug, Clone, PartialEq)]
pub enum Maximizers {
    /// Isolated global maximizers, sorted ascending.
    Points(Vec<f64>),
    /// `f` is constant, so every location is a maximizer.
    Everywhere,
}

impl Maximizers {
    pub fn points(&self) -> Option<&[f64]> {
        match self {
            Maximizers::Points(p) => Some(p),
            Maximizers::Everywhere => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub alpha_c: f64,
    pub f_max: f64,
    pub maximizers: Maximizers,
}

/// `f` in Bernstein form: coefficient `j` is `r Xi_{j+1}`, degree `r - 1`.
pub fn density_polynomial(choice: &ChoiceVector) -> Bernstein {
    let r = choice.r() as f64;
    Bernstein::new(choice.probs().iter().map(|p| r * p).collect())
}

/// `G(y) = sum_s Xi_s P[Bin(r, y) >= s]` in Bernstein form (degree `r`), so `G' = f`.
pub fn rank_cdf_polynomial(choice: &ChoiceVector) -> Bernstein {
    Bernstein::new(choice.cumulative())
}

/// Global maximum of `f` over `[0, 1]` using the default bracketing grid.
pub fn critical_point(choice: &ChoiceVector) -> CriticalPoint {
    critical_point_with_grid(choice, CRITICAL_GRID)
}

/// Global maximum of `f`: sign changes of `f'` on a uniform grid of `grid` cells are
/// refined by bisection and compared against the endpoints.
pub fn critical_point_with_grid(choice: &ChoiceVector, grid: usize) -> CriticalPoint {
    assert!(grid >= 2, "grid needs at least two cells");
    let density = density_polynomial(choice);
    if density.coefficient_spread() <= CONSTANT_F_TOL {
        let f_max = density.eval(0.5);
        return CriticalPoint {
            alpha_c: f_max - 2.0,
            f_max,
            maximizers: Maximizers::Everywhere,
        };
    }
    let slope = density.derivative();

    let mut candidates = vec![0.0, 1.0];
    let xs: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    let ds: Vec<f64> = xs.iter().map(|&x| slope.eval(x)).collect();
    for i in 0..grid {
        if ds[i] == 0.0 {
            if i > 0 {
                candidates.push(xs[i]);
            }
        } else if ds[i] * ds[i + 1] < 0.0 {
            candidates.push(bisect_sign_change(&slope, xs[i], xs[i + 1], ds[i]));
        }
    }

    let f_max = candidates
        .iter()
        .map(|&x| density.eval(x))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut maxima: Vec<f64> = candidates
        .into_iter()
        .filter(|&x| density.eval(x) >= f_max - MAXIMIZER_VALUE_TOL)
        .collect();
    maxima.sort_by(f64::total_cmp);
    maxima.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    CriticalPoint {
        alpha_c: f_max - 2.0,
        f_max,
        maximizers: Maximizers::Points(maxima),
    }
}

fn bisect_sign_change(p: &Bernstein, mut lo: f64, mut hi: f64, value_at_lo: f64) -> f64 {
    let lo_positive = value_at_lo > 0.0;
    while hi - lo > CRITICAL_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let v = p.eval(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `alpha_c = max f - 2` together with the locations attaining the maximum.
pub fn alpha_c(choice: &ChoiceVector) -> (f64, Maximizers) {
    let cp = critical_point(choice);
    (cp.alpha_c, cp.maximizers)
}

fn classify(alpha: f64, alpha_c: f64) -> Phase {
    if alpha > alpha_c + PHASE_TOL {
        Phase::NoCondensation
    } else if (alpha - alpha_c).abs() <= PHASE_TOL {
        Phase::Critical
    } else {
        Phase::Condensation
    }
}

pub fn phase_classify(choice: &ChoiceVector, alpha: f64) -> Phase {
    classify(alpha, critical_point(choice).alpha_c)
}

/// `(2 + alpha) / (2 + alpha_c)`, the power-law exponent of the share of vertices with degree `>= k`.
pub fn tau_exponent(choice: &ChoiceVector, alpha: f64) -> Result<f64> {
    let cp = critical_point(choice);
    let phase = classify(alpha, cp.alpha_c);
    if phase == Phase::Condensation {
        return Err(Error::Phase {
            alpha,
            alpha_c: cp.alpha_c,
            phase,
        });
    }
    Ok((2.0 + alpha) / cp.f_max)
}

/// Upper kernel for the chance that the chosen candidate lies in a location
/// interval whose preferential masses are `y1 <= y2`, per unit of interval mass:
///
/// ```text
/// f_1(y1, y2) = sum_s Xi_s sum_{j<s} sum_{i>=s} C(r,i) C(i,j) y1^j (y2-y1)^(i-j-1) (1-y2)^(r-i)
/// ```
///
/// with `0^0 = 1`. Tends to `f(y1)` as `y2 -> y1`.
pub fn upper_choice_kernel(choice: &ChoiceVector, y1: f64, y2: f64) -> f64 {
    let r = choice.r();
    let pascal = pascal_triangle(r);
    let width = y2 - y1;
    let above = 1.0 - y2;
    let mut total = 0.0;
    for s in 1..=r {
        let xi = choice.prob(s);
        if xi == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for j in 0..s {
            for i in s..=r {
                inner += pascal[r][i]
                    * pascal[i][j]
                    * y1.powi(j as i32)
                    * width.powi((i - j - 1) as i32)
                    * above.powi((r - i) as i32);
            }
        }
        total += xi * inner;
    }
    total
}

/// Which form of the lower kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LowerKernelForm {
    /// `sum_s s Xi_s C(r,s) y1^(s-1) (1-y2)^(r-s)`: exactly one candidate inside the
    /// interval, counted with its multinomial weight. Tends to `f(y1)` as `y2 -> y1`.
    #[default]
    Corrected,
    /// `sum_s Xi_s C(r,s) y1^(s-1) (1-y2)^(r-s)`, without the factor `s`.
    Verbatim,
}

/// Lower kernel for the interval choice probability; see [`LowerKernelForm`].
pub fn lower_choice_kernel(choice: &ChoiceVector, y1: f64, y2: f64, form: LowerKernelForm) -> f64 {
    let r = choice.r();
    let above = 1.0 - y2;
    (1..=r)
        .map(|s| {
            let multiplicity = match form {
                LowerKernelForm::Corrected => s as f64,
                LowerKernelForm::Verbatim => 1.0,
            };
            multiplicity
                * choice.prob(s)
                * bernstein::binomial(r, s)
                * y1.powi(s as i32 - 1)
                * above.powi((r - s) as i32)
        })
        .sum()
}

fn pascal_triangle(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![1.0; i + 1];
        for j in 1..i {
            row[j] = rows[i - 1][j - 1] + rows[i - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// Which side of the degree sandwich to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeBound {
    /// `L_1`, built from the upper choice kernel.
    Lower,
    /// `L_2`, built from the corrected lower choice kernel.
    Upper,
}

/// Root of the drift at one location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiSolution {
    pub x: f64,
    pub psi: f64,
    /// `|F_1(psi; x)|`.
    pub residual: f64,
}

/// The model's analytic limit objects for one `(Xi, alpha)`. Immutable once built.
#[derive(Debug, Clone)]
pub struct AnalyticModel {
    choice: ChoiceVector,
    alpha: f64,
    density: Bernstein,
    density_slope: Bernstein,
    density_curvature: Bernstein,
    rank_cdf: Bernstein,
    density_coeffs: Vec<f64>,
    critical: CriticalPoint,
}

impl AnalyticModel {
    pub fn new(choice: ChoiceVector, alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!(
                "alpha must be a finite number above -1, got {alpha}"
            )));
        }
        let density = density_polynomial(&choice);
        let density_slope = density.derivative();
        let density_curvature = density_slope.derivative();
        let rank_cdf = rank_cdf_polynomial(&choice);
        let density_coeffs = density.to_monomial();
        let critical = critical_point(&choice);
        Ok(Self {
            choice,
            alpha,
            density,
            density_slope,
            density_curvature,
            rank_cdf,
            density_coeffs,
            critical,
        })
    }

    pub fn choice(&self) -> &ChoiceVector {
        &self.choice
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alpha_c(&self) -> f64 {
        self.critical.alpha_c
    }

    pub fn f_max(&self) -> f64 {
        self.critical.f_max
    }

    pub fn maximizers(&self) -> &Maximizers {
        &self.critical.maximizers
    }

    pub fn critical(&self) -> &CriticalPoint {
        &self.critical
    }

    /// Monomial coefficients of `f`, lowest power first.
    pub fn density_coeffs(&self) -> &[f64] {
        &self.density_coeffs
    }

    pub fn phase(&self) -> Phase {
        classify(self.alpha, self.critical.alpha_c)
    }

    /// `f(x)`.
    pub fn density(&self, x: f64) -> f64 {
        self.density.eval(x)
    }

    /// `f'(x)`.
    pub fn density_slope(&self, x: f64) -> f64 {
        self.density_slope.eval(x)
    }

    /// `f''(x)`.
    pub fn density_curvature(&self, x: f64) -> f64 {
        self.density_curvature.eval(x)
    }

    /// `G(y) = sum_s Xi_s P[Bin(r, y) >= s]`.
    pub fn rank_cdf(&self, y: f64) -> f64 {
        self.rank_cdf.eval(y)
    }

    /// `F_1(y; x) = x (1 + alpha) - (2 + alpha) y + G(y)`.
    pub fn drift(&self, y: f64, x: f64) -> f64 {
        x * (self.alpha + 1.0) - (2.0 + self.alpha) * y + self.rank_cdf(y)
    }

    /// `d/dy F_1(y; x) = f(y) - (2 + alpha)`, independent of `x`.
    pub fn drift_slope(&self, y: f64) -> f64 {
        self.density(y) - (2.0 + self.alpha)
    }

    pub fn tau(&self) -> Result<f64> {
        self.require_phase(true)?;
        Ok((2.0 + self.alpha) / self.critical.f_max)
    }

    fn require_phase(&self, allow_critical: bool) -> Result<()> {
        let phase = self.phase();
        let ok = match phase {
            Phase::NoCondensation => true,
            Phase::Critical => allow_critical,
            Phase::Condensation => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Phase {
                alpha: self.alpha,
                alpha_c: self.critical.alpha_c,
                phase,
            })
        }
    }

    /// `Psi(x)`: the unique zero of the drift, found by bisection. The drift is
    /// nonincreasing in `y` whenever `alpha >= alpha_c`, so the root is unique;
    /// in the condensation phase this refuses to answer.
    pub fn psi(&self, x: f64) -> Result<PsiSolution> {
        self.require_phase(true)?;
        check_location(x)?;
        if x == 0.0 || x == 1.0 {
            return Ok(PsiSolution {
                x,
                psi: x,
                residual: self.drift(x, x).abs(),
            });
        }
        // drift(0) = x (1 + alpha) > 0 and drift(1) = (x - 1)(1 + alpha) < 0
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.drift(mid, x);
            if v == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if v > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let psi = 0.5 * (lo + hi);
        Ok(PsiSolution {
            x,
            psi,
            residual: self.drift(psi, x).abs(),
        })
    }

    /// `Psi^{-1}(y) = ((2 + alpha) y - G(y)) / (1 + alpha)`.
    pub fn psi_inverse(&self, y: f64) -> f64 {
        ((2.0 + self.alpha) * y - self.rank_cdf(y)) / (self.alpha + 1.0)
    }

    /// `(Psi^{-1})'(y) = (2 + alpha - f(y)) / (1 + alpha)`.
    pub fn psi_inverse_slope(&self, y: f64) -> f64 {
        (2.0 + self.alpha - self.density(y)) / (self.alpha + 1.0)
    }

    pub fn upper_choice_kernel(&self, y1: f64, y2: f64) -> f64 {
        upper_choice_kernel(&self.choice, y1, y2)
    }

    pub fn lower_choice_kernel(&self, y1: f64, y2: f64, form: LowerKernelForm) -> f64 {
        lower_choice_kernel(&self.choice, y1, y2, form)
    }

    /// Asymptotic bound on the share of all vertices that have degree at most `k`
    /// and location in `[x1, x2]`:
    ///
    /// ```text
    /// L(k) = (x2 - x1) (1 - Gamma(a + c) Gamma(a + k) / (Gamma(a) Gamma(a + k + c))),
    /// a = alpha + 1,  c = (2 + alpha) / kernel(Psi(x1), Psi(x2)).
    /// ```
    ///
    /// A vanishing kernel sends `c` to infinity and the bound to `x2 - x1`.
    pub fn degree_bound(&self, bound: DegreeBound, k: u64, x1: f64, x2: f64) -> Result<f64> {
        check_interval(x1, x2)?;
        let y1 = self.psi(x1)?.psi;
        let y2 = self.psi(x2)?.psi;
        let kernel = match bound {
            DegreeBound::Lower => self.upper_choice_kernel(y1, y2),
            DegreeBound::Upper => self.lower_choice_kernel(y1, y2, LowerKernelForm::Corrected),
        };
        let width = x2 - x1;
        if kernel <= 0.0 {
            return Ok(if k == 0 { 0.0 } else { width });
        }
        let c = (2.0 + self.alpha) / kernel;
        Ok(width * (1.0 - gamma_tail_ratio(self.alpha + 1.0, c, k as f64)))
    }

    /// `c(x) = (2 + alpha) / f(Psi(x))`, the tail exponent of the local degree law at `x`.
    pub fn tail_exponent(&self, x: f64) -> Result<f64> {
        self.require_phase(false)?;
        let y = self.psi(x)?.psi;
        let fy = self.density(y);
        if !(fy > 0.0) {
            return Err(Error::Domain(format!(
                "f(Psi({x})) = {fy}: the local degree kernel has no mass at this location"
            )));
        }
        Ok((2.0 + self.alpha) / fy)
    }

    /// `mu((0, k], x)`: limiting probability that a vertex at location `x` has degree at most `k`.
    pub fn kernel_cdf(&self, k: u64, x: f64) -> Result<f64> {
        let c = self.tail_exponent(x)?;
        Ok(1.0 - gamma_tail_ratio(self.alpha + 1.0, c, k as f64))
    }

    /// `mu([k, inf), x) = 1 - mu((0, k-1], x)`, evaluated directly as a Gamma ratio.
    pub fn kernel_tail(&self, k: u64, x: f64) -> Result<f64> {
        let c = self.tail_exponent(x)?;
        Ok(gamma_tail_ratio(
            self.alpha + 1.0,
            c,
            k.saturating_sub(1) as f64,
        ))
    }

    /// `mu_k = int_0^1 mu([k, inf), x) dx` by composite Simpson.
    pub fn mu_k(&self, k: u64, panels: usize) -> Result<f64> {
        Ok(MuKProfile::new(self, panels)?.mu_k(k))
    }

    /// Laplace approximation of `mu_k` around the unique interior maximizer `x0` of `f`:
    ///
    /// ```text
    /// mu_k ~ C sqrt(2 pi / log(k + alpha)) (k + alpha)^(-tau),
    /// C = (Psi^{-1})'(x0) g(x0) / sqrt(phi''(x0)),  phi = (2 + alpha) / f,
    /// g(y) = Gamma(alpha + 1 + phi(y)) / Gamma(alpha + 1).
    /// ```
    pub fn saddle_point_mu_k(&self, k: u64) -> Result<f64> {
        let constant = self.saddle_point_constant()?;
        let log_k = (k as f64 + self.alpha).ln();
        if !(log_k > 0.0) {
            return Err(Error::Domain(format!(
                "log(k + alpha) must be positive, got k = {k}"
            )));
        }
        let tau = (2.0 + self.alpha) / self.critical.f_max;
        Ok(constant * (2.0 * std::f64::consts::PI / log_k).sqrt() * (-tau * log_k).exp())
    }

    /// The constant `C` of [`Self::saddle_point_mu_k`].
    pub fn saddle_point_constant(&self) -> Result<f64> {
        self.require_phase(false)?;
        let x0 = match &self.critical.maximizers {
            Maximizers::Everywhere => {
                return Err(Error::Shape(
                    "f is constant, so there is no isolated peak".into(),
                ))
            }
            Maximizers::Points(p) if p.len() != 1 => {
                return Err(Error::Shape(format!(
                    "f has {} global maximizers {:?}; a single-peak expansion does not apply",
                    p.len(),
                    p
                )))
            }
            Maximizers::Points(p) => p[0],
        };
        if x0 <= 1e-9 || x0 >= 1.0 - 1e-9 {
            return Err(Error::Shape(format!(
                "the global maximizer x0 = {x0} lies on the boundary of [0, 1]"
            )));
        }
        let f0 = self.density(x0);
        let curvature = self.density_curvature(x0);
        if !(curvature < 0.0) {
            return Err(Error::Shape(format!(
                "f''(x0) = {curvature} at x0 = {x0} is not negative"
            )));
        }
        let phi_curvature = -(2.0 + self.alpha) * curvature / (f0 * f0);
        let g0 = ln_gamma_shift(self.alpha + 1.0, (2.0 + self.alpha) / f0).exp();
        Ok(self.psi_inverse_slope(x0) * g0 / phi_curvature.sqrt())
    }
}

/// Location-dependent part of the `mu_k` integrand cached on a Simpson grid, so
/// many `k` can be integrated for the cost of one pass of `Psi` solves.
///
/// Nodes are `i / N` except that the two endpoints are sampled half a panel
/// inside `[0, 1]`, where `f(Psi(x))` can vanish.
#[derive(Debug, Clone)]
pub struct MuKProfile {
    alpha: f64,
    weights: Vec<f64>,
    exponents: Vec<f64>,
    log_heads: Vec<f64>,
}

impl MuKProfile {
    pub fn new(model: &AnalyticModel, panels: usize) -> Result<Self> {
        if panels < 64 || panels % 2 != 0 {
            return Err(Error::Domain(format!(
                "Simpson panels must be even and at least 64, got {panels}"
            )));
        }
        let h = 1.0 / panels as f64;
        let a = model.alpha + 1.0;
        let mut weights = Vec::with_capacity(panels + 1);
        let mut exponents = Vec::with_capacity(panels + 1);
        let mut log_heads = Vec::with_capacity(panels + 1);
        for i in 0..=panels {
            let x = match i {
                0 => 0.5 * h,
                i if i == panels => 1.0 - 0.5 * h,
                i => i as f64 * h,
            };
            let w = match i {
                0 => 1.0,
                i if i == panels => 1.0,
                i if i % 2 == 1 => 4.0,
                _ => 2.0,
            };
            let c = model.tail_exponent(x)?;
            weights.push(w * h / 3.0);
            exponents.push(c);
            log_heads.push(ln_gamma_shift(a, c));
        }
        Ok(Self {
            alpha: model.alpha,
            weights,
            exponents,
            log_heads,
        })
    }

    /// Simpson estimate of `mu_k`; nonincreasing in `k`.
    pub fn mu_k(&self, k: u64) -> f64 {
        if k <= 1 {
            return self.weights.iter().sum();
        }
        let shifted = self.alpha + k as f64;
        let base = log_gamma(shifted);
        self.weights
            .iter()
            .zip(&self.exponents)
            .zip(&self.log_heads)
            .map(|((w, &c), head)| w * (head + base - log_gamma(shifted + c)).exp())
            .sum()
    }
}

fn check_location(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("location {x} is outside [0, 1]")))
    }
}

pub(crate) fn check_interval(x1: f64, x2: f64) -> Result<()> {
    check_location(x1)?;
    check_location(x2)?;
    if x1 < x2 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "interval needs x1 < x2, got [{x1}, {x2}]"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn middle() -> AnalyticModel {
        AnalyticModel::new(ChoiceVector::middle_of_three(), 0.0).unwrap()
    }

    #[test]
    fn density_examples() {
        let m = middle();
        assert!((m.density(0.5) - 1.5).abs() < 1e-15);
        assert_eq!(m.density(0.0), 0.0);
        assert_eq!(m.density(1.0), 0.0);
        let u = AnalyticModel::new(ChoiceVector::uniform(5).unwrap(), 0.3).unwrap();
        for x in [0.0, 0.17, 0.5, 0.99, 1.0] {
            assert!((u.density(x) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn drift_examples() {
        let m = AnalyticModel::new(ChoiceVector::middle_of_three(), 0.7).unwrap();
        assert!((m.drift(0.0, 0.3) - 0.3 * 1.7).abs() < 1e-15);
        assert!(m.drift(1.0, 1.0).abs() < 1e-15);
        // 0.5 - 2y + 3y^2 - 2y^3 at y = 0.5
        assert!(middle().drift(0.5, 0.5).abs() < 1e-15);
    }

    #[test]
    fn drift_slope_examples() {
        assert!((middle().drift_slope(0.5) + 0.5).abs() < 1e-15);
        let crit = AnalyticModel::new(ChoiceVector::middle_of_three(), -0.5).unwrap();
        assert!(crit.drift_slope(0.5).abs() < 1e-15);
        let u = AnalyticModel::new(ChoiceVector::uniform(4).unwrap(), 2.0).unwrap();
        assert!((u.drift_slope(0.3) + 3.0).abs() < 1e-14);
    }

    #[test]
    fn critical_values() {
        let (ac, maxi) = alpha_c(&ChoiceVector::middle_of_three());
        assert!((ac + 0.5).abs() < 1e-12);
        let p = maxi.points().unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0] - 0.5).abs() < 1e-10);

        let (ac, maxi) = alpha_c(&ChoiceVector::uniform(6).unwrap());
        assert!((ac + 1.0).abs() < 1e-12);
        assert_eq!(maxi, Maximizers::Everywhere);

        let (_, maxi) = alpha_c(&ChoiceVector::second_or_sixth_of_seven());
        let p = maxi.points().unwrap();
        assert_eq!(p.len(), 2);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn boundary_maximum() {
        // f = 3 (1 - x)^2 peaks at 0
        let cp = critical_point(&ChoiceVector::new(vec![1.0, 0.0, 0.0]).unwrap());
        assert!((cp.f_max - 3.0).abs() < 1e-14);
        assert_eq!(cp.maximizers, Maximizers::Points(vec![0.0]));
    }

    #[test]
    fn phases() {
        let xi = ChoiceVector::middle_of_three();
        assert_eq!(phase_classify(&xi, 0.0), Phase::NoCondensation);
        assert_eq!(phase_classify(&xi, -0.5), Phase::Critical);
        assert_eq!(phase_classify(&xi, -0.9), Phase::Condensation);
    }

    #[test]
    fn psi_examples() {
        let m = middle();
        assert_eq!(m.psi(0.0).unwrap().psi, 0.0);
        assert_eq!(m.psi(1.0).unwrap().psi, 1.0);
        let s = m.psi(0.5).unwrap();
        assert!((s.psi - 0.5).abs() < 1e-15);
        assert!(s.residual <= 1e-10);
    }

    #[test]
    fn psi_refuses_condensation() {
        let m = AnalyticModel::new(ChoiceVector::middle_of_three(), -0.9).unwrap();
        assert!(matches!(
            m.psi(0.3),
            Err(Error::Phase {
                phase: Phase::Condensation,
                ..
            })
        ));
    }

    #[test]
    fn psi_at_criticality_still_solves() {
        let m = AnalyticModel::new(ChoiceVector::middle_of_three(), -0.5).unwrap();
        let s = m.psi(0.5).unwrap();
        assert!(s.residual <= 1e-10);
        assert!((s.psi - 0.5).abs() < 1e-4);
    }

    #[test]
    fn psi_inverse_slope_examples() {
        let m = middle();
        assert!((m.psi_inverse_slope(0.5) - 0.5).abs() < 1e-15);
        assert!((m.psi_inverse_slope(0.0) - 2.0).abs() < 1e-15);
        let u = AnalyticModel::new(ChoiceVector::uniform(3).unwrap(), 1.5).unwrap();
        assert!((u.psi_inverse_slope(0.42) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn psi_inverse_undoes_psi() {
        let m = AnalyticModel::new(ChoiceVector::asymmetric_second_or_sixth_of_seven(), 0.1)
            .unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let y = m.psi(x).unwrap().psi;
            assert!((m.psi_inverse(y) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn lower_kernel_forms() {
        let xi = ChoiceVector::middle_of_three();
        let y = 0.3;
        let corrected = lower_choice_kernel(&xi, y, y, LowerKernelForm::Corrected);
        let verbatim = lower_choice_kernel(&xi, y, y, LowerKernelForm::Verbatim);
        assert!((corrected - 6.0 * y * (1.0 - y)).abs() < 1e-15);
        assert!((verbatim - 3.0 * y * (1.0 - y)).abs() < 1e-15);
        assert_eq!(lower_choice_kernel(&xi, 0.0, 1.0, LowerKernelForm::Corrected), 0.0);
        assert_eq!(lower_choice_kernel(&xi, 0.0, 1.0, LowerKernelForm::Verbatim), 0.0);
    }

    #[test]
    fn upper_kernel_limit() {
        let xi = ChoiceVector::middle_of_three();
        let y = 0.3;
        let v = upper_choice_kernel(&xi, y, y + 1e-8);
        assert!((v - 6.0 * y * (1.0 - y)).abs() < 1e-6);
    }

    #[test]
    fn degree_bound_examples() {
        let m = middle();
        assert_eq!(m.degree_bound(DegreeBound::Lower, 0, 0.4, 0.6).unwrap(), 0.0);
        let w = 1e-7;
        for bound in [DegreeBound::Lower, DegreeBound::Upper] {
            let l = m.degree_bound(bound, 1, 0.5 - w / 2.0, 0.5 + w / 2.0).unwrap();
            assert!((l / w - 4.0 / 7.0).abs() < 1e-5, "{bound:?}: {}", l / w);
            let far = m.degree_bound(bound, 1_000_000_000, 0.4, 0.6).unwrap();
            assert!((far - 0.2).abs() < 1e-6);
        }
        assert!(matches!(
            m.degree_bound(DegreeBound::Lower, 3, 0.6, 0.6),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn degree_bound_with_vanishing_kernel_is_interval_width() {
        // lower kernel of (0,1,0) vanishes on [0, 1]
        let m = middle();
        let l = m.degree_bound(DegreeBound::Upper, 4, 0.0, 1.0).unwrap();
        assert_eq!(l, 1.0);
    }

    #[test]
    fn kernel_examples() {
        let m = middle();
        assert_eq!(m.kernel_cdf(0, 0.3).unwrap(), 0.0);
        assert!((m.kernel_cdf(1, 0.5).unwrap() - 4.0 / 7.0).abs() < 1e-12);
        assert_eq!(m.kernel_tail(1, 0.8).unwrap(), 1.0);
        assert!((m.kernel_tail(2, 0.5).unwrap() - 3.0 / 7.0).abs() < 1e-12);
        let k = 10_000u64;
        let slope = -m.kernel_tail(k, 0.5).unwrap().ln() / (k as f64).ln();
        assert!((slope - 4.0 / 3.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn kernel_far_tail() {
        let m = middle();
        let k = 1_000_000u64;
        for x in [0.1, 0.5, 0.77] {
            let c = m.tail_exponent(x).unwrap();
            let cdf = m.kernel_cdf(k, x).unwrap();
            assert!(1.0 - cdf <= 10.0 * (k as f64).powf(-c));
        }
    }

    #[test]
    fn kernel_phase_gate() {
        let crit = AnalyticModel::new(ChoiceVector::middle_of_three(), -0.5).unwrap();
        assert!(matches!(crit.kernel_cdf(3, 0.5), Err(Error::Phase { .. })));
        let cond = AnalyticModel::new(ChoiceVector::middle_of_three(), -0.8).unwrap();
        assert!(matches!(cond.kernel_tail(3, 0.5), Err(Error::Phase { .. })));
    }

    #[test]
    fn kernel_degenerate_location() {
        // f(Psi(0)) = f(0) = 0 for (0,1,0)
        assert!(matches!(middle().kernel_cdf(2, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn mu_k_examples() {
        let m = middle();
        assert!((m.mu_k(1, 64).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(m.mu_k(3, 63), Err(Error::Domain(_))));
        assert!(matches!(m.mu_k(3, 32), Err(Error::Domain(_))));
    }

    #[test]
    fn tau_examples() {
        let xi = ChoiceVector::middle_of_three();
        assert!((tau_exponent(&xi, 0.0).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((tau_exponent(&xi, -0.5).unwrap() - 1.0).abs() < 1e-9);
        assert!(tau_exponent(&xi, -0.6).is_err());
        let u = ChoiceVector::uniform(3).unwrap();
        assert!((tau_exponent(&u, 0.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn saddle_shape_errors() {
        let two = AnalyticModel::new(ChoiceVector::second_or_sixth_of_seven(), 0.0).unwrap();
        assert!(matches!(two.saddle_point_mu_k(1000), Err(Error::Shape(_))));
        let flat = AnalyticModel::new(ChoiceVector::uniform(3).unwrap(), 0.0).unwrap();
        assert!(matches!(flat.saddle_point_mu_k(1000), Err(Error::Shape(_))));
        let edge = AnalyticModel::new(ChoiceVector::new(vec![1.0, 0.0]).unwrap(), 0.5).unwrap();
        assert!(matches!(edge.saddle_point_mu_k(1000), Err(Error::Shape(_))));
        let asym =
            AnalyticModel::new(ChoiceVector::asymmetric_second_or_sixth_of_seven(), 0.0).unwrap();
        assert!(asym.saddle_point_mu_k(1000).is_ok());
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(AnalyticModel::new(ChoiceVector::middle_of_three(), -1.0).is_err());
        assert!(AnalyticModel::new(ChoiceVector::middle_of_three(), f64::NAN).is_err());
    }
}
