//! Empirical measurements on frozen snapshots of a growing tree, and their
//! comparison with the analytic limits.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::analytic::{check_interval, AnalyticModel, LowerKernelForm};
use crate::constants::{CHI_SQUARE_MIN_EXPECTED, FIT_K_MIN, FIT_MIN_POINTS, FIT_MIN_TAIL_COUNT};
use crate::error::{Error, Result};
use crate::growth::GrowthState;

/// Immutable measurement of the tree after `step` growth steps. Vertices are
/// stored sorted by location.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotStats {
    step: u64,
    n0: usize,
    alpha: f64,
    locations: Vec<f64>,
    degrees: Vec<u32>,
    // degree_prefix[i] = sum of degrees of the i lowest-located vertices
    degree_prefix: Vec<u64>,
    // histogram[d] = number of vertices of degree d
    histogram: Vec<u64>,
    max_degree: u32,
}

impl SnapshotStats {
    pub fn capture(state: &GrowthState) -> Self {
        let locs = state.locations();
        let degs = state.degrees();
        let mut order: Vec<u32> = (0..locs.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            locs[a as usize]
                .total_cmp(&locs[b as usize])
                .then(a.cmp(&b))
        });
        let locations: Vec<f64> = order.iter().map(|&i| locs[i as usize]).collect();
        let degrees: Vec<u32> = order.iter().map(|&i| degs[i as usize]).collect();
        Self::from_sorted(state.steps(), state.n0(), state.alpha(), locations, degrees)
    }

    /// Builds a snapshot from vertices already sorted by location.
    pub fn from_sorted(
        step: u64,
        n0: usize,
        alpha: f64,
        locations: Vec<f64>,
        degrees: Vec<u32>,
    ) -> Self {
        assert_eq!(locations.len(), degrees.len());
        debug_assert!(locations.windows(2).all(|w| w[0] <= w[1]));
        let mut degree_prefix = Vec::with_capacity(degrees.len() + 1);
        let mut acc = 0u64;
        degree_prefix.push(0);
        for &d in &degrees {
            acc += d as u64;
            degree_prefix.push(acc);
        }
        let max_degree = degrees.iter().copied().max().unwrap_or(0);
        let mut histogram = vec![0u64; max_degree as usize + 1];
        for &d in &degrees {
            histogram[d as usize] += 1;
        }
        Self {
            step,
            n0,
            alpha,
            locations,
            degrees,
            degree_prefix,
            histogram,
            max_degree,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// `histogram()[d]` vertices have degree `d`.
    pub fn histogram(&self) -> &[u64] {
        &self.histogram
    }

    fn weight_below(&self, count: usize) -> f64 {
        self.degree_prefix[count] as f64 + self.alpha * count as f64
    }

    /// `sum_v (deg(v) + alpha) = (n + n0 - 1)(2 + alpha) + alpha`.
    pub fn total_weight(&self) -> f64 {
        self.weight_below(self.vertex_count())
    }

    /// `Psi_n(x)`: preferential weight of the vertices located at or below `x`,
    /// as a share of the total. `O(log V)`.
    pub fn psi_empirical(&self, x: f64) -> f64 {
        let below = self.locations.partition_point(|&l| l <= x);
        self.weight_below(below) / self.total_weight()
    }

    fn location_range(&self, x1: f64, x2: f64) -> std::ops::Range<usize> {
        let lo = self.locations.partition_point(|&l| l < x1);
        let hi = self.locations.partition_point(|&l| l <= x2);
        lo..hi
    }

    /// Number of vertices with degree at most `k` and location in `[x1, x2]`.
    pub fn count_at_most(&self, k: u64, x1: f64, x2: f64) -> Result<u64> {
        check_interval(x1, x2)?;
        let range = self.location_range(x1, x2);
        Ok(self.degrees[range]
            .iter()
            .filter(|&&d| d as u64 <= k)
            .count() as u64)
    }

    /// `P^(n)_{x1,x2}(k)`: share of all vertices with degree at most `k` and location in `[x1, x2]`.
    pub fn proportion(&self, k: u64, x1: f64, x2: f64) -> Result<f64> {
        Ok(self.count_at_most(k, x1, x2)? as f64 / self.vertex_count() as f64)
    }

    /// Number of vertices with degree at least `k`.
    pub fn count_at_least(&self, k: u64) -> u64 {
        let start = (k as usize).min(self.histogram.len());
        self.histogram[start..].iter().sum()
    }

    /// `(k, #{deg >= k}, #{deg >= k} / V)` for `k = 1..=max_degree`.
    pub fn degree_ccdf(&self) -> Vec<CcdfPoint> {
        let v = self.vertex_count() as f64;
        let mut out = Vec::with_capacity(self.max_degree as usize);
        let mut at_least = self.vertex_count() as u64;
        for k in 1..=self.max_degree as u64 {
            out.push(CcdfPoint {
                k,
                count: at_least,
                fraction: at_least as f64 / v,
            });
            at_least -= self.histogram[k as usize];
        }
        out
    }

    /// Default power-law fit range: from [`FIT_K_MIN`] to the largest `k` that
    /// still has [`FIT_MIN_TAIL_COUNT`] vertices of degree `>= k`.
    pub fn default_fit_range(&self) -> (u64, u64) {
        let k_max = self
            .degree_ccdf()
            .iter()
            .rev()
            .find(|p| p.count >= FIT_MIN_TAIL_COUNT)
            .map_or(0, |p| p.k);
        (FIT_K_MIN, k_max)
    }

    /// Per location bin `[i/bins, (i+1)/bins)` (the last one closed) and per `k`,
    /// the number of bin vertices with degree at most `k`.
    pub fn local_degree_grid(&self, bins: usize, k_list: &[u64]) -> Result<LocalDegreeGrid> {
        if bins == 0 {
            return Err(Error::Domain("the local degree grid needs at least one bin".into()));
        }
        let mut bin_counts = vec![0u64; bins];
        let mut counts_at_most = vec![vec![0u64; k_list.len()]; bins];
        for (&x, &d) in self.locations.iter().zip(&self.degrees) {
            let b = ((x * bins as f64) as usize).min(bins - 1);
            bin_counts[b] += 1;
            for (slot, &k) in counts_at_most[b].iter_mut().zip(k_list) {
                if d as u64 <= k {
                    *slot += 1;
                }
            }
        }
        Ok(LocalDegreeGrid {
            bins,
            k_list: k_list.to_vec(),
            bin_counts,
            counts_at_most,
        })
    }

    /// `sup_i |Psi_n(x_i) - Psi(x_i)|` over `points` equally spaced locations in `[0, 1]`.
    pub fn psi_sup_error(&self, model: &AnalyticModel, points: usize) -> Result<f64> {
        if points < 2 {
            return Err(Error::Domain("need at least two grid points".into()));
        }
        let mut worst: f64 = 0.0;
        for i in 0..points {
            let x = i as f64 / (points - 1) as f64;
            let gap = (self.psi_empirical(x) - model.psi(x)?.psi).abs();
            worst = worst.max(gap);
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcdfPoint {
    pub k: u64,
    /// Vertices with degree at least `k`.
    pub count: u64,
    pub fraction: f64,
}

/// Empirical conditional degree distribution per location bin.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDegreeGrid {
    pub bins: usize,
    pub k_list: Vec<u64>,
    pub bin_counts: Vec<u64>,
    /// `counts_at_most[bin][j]`: bin vertices with degree at most `k_list[j]`.
    pub counts_at_most: Vec<Vec<u64>>,
}

impl LocalDegreeGrid {
    pub fn bin_edges(&self, bin: usize) -> (f64, f64) {
        let w = 1.0 / self.bins as f64;
        (bin as f64 * w, (bin + 1) as f64 * w)
    }

    pub fn bin_center(&self, bin: usize) -> f64 {
        (bin as f64 + 0.5) / self.bins as f64
    }

    /// Share of the bin's vertices with degree at most `k_list[j]`; `None` marks an empty bin.
    pub fn fraction(&self, bin: usize, j: usize) -> Option<f64> {
        match self.bin_counts[bin] {
            0 => None,
            n => Some(self.counts_at_most[bin][j] as f64 / n as f64),
        }
    }

    /// Binomial standard error of [`Self::fraction`].
    pub fn standard_error(&self, bin: usize, j: usize) -> Option<f64> {
        let p = self.fraction(bin, j)?;
        Some(binomial_se(p, self.bin_counts[bin]))
    }

    pub fn empty_bins(&self) -> usize {
        self.bin_counts.iter().filter(|&&c| c == 0).count()
    }
}

/// `sqrt(p (1 - p) / n)`.
pub fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Least-squares fit of `mu_k = C sqrt(2 pi / log(k + alpha)) (k + alpha)^(-tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub tau_hat: f64,
    /// The constant `C`.
    pub amplitude: f64,
    pub k_min: u64,
    pub k_max: u64,
    pub points: usize,
    /// Root mean square of the residuals in log space.
    pub residual_rms: f64,
}

/// Regresses `log mu_k + log(log(k + alpha)) / 2` on `log(k + alpha)` over the
/// points with `k_min <= k <= k_max`, `mu_k > 0` and `k + alpha > 1`.
pub fn fit_power_law(ccdf: &[(u64, f64)], alpha: f64, k_min: u64, k_max: u64) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = ccdf
        .iter()
        .filter(|(k, mu)| *k >= k_min && *k <= k_max && *mu > 0.0 && *k as f64 + alpha > 1.0)
        .map(|&(k, mu)| {
            let log_k = (k as f64 + alpha).ln();
            (log_k, mu.ln() + 0.5 * log_k.ln())
        })
        .collect();
    if pts.len() < FIT_MIN_POINTS || k_min >= k_max {
        return Err(Error::Range(format!(
            "{} usable points in [{k_min}, {k_max}], need at least {FIT_MIN_POINTS}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Range("all fit points share one k".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(PowerLawFit {
        tau_hat: -slope,
        amplitude: (intercept - 0.5 * (2.0 * std::f64::consts::PI).ln()).exp(),
        k_min,
        k_max,
        points: pts.len(),
        residual_rms: (rss / n).sqrt(),
    })
}

/// Fits the empirical degree CCDF of a snapshot over `[k_min, k_max]`.
pub fn fit_snapshot(snap: &SnapshotStats, k_min: u64, k_max: u64) -> Result<PowerLawFit> {
    let points: Vec<(u64, f64)> = snap.degree_ccdf().iter().map(|p| (p.k, p.fraction)).collect();
    fit_power_law(&points, snap.alpha(), k_min, k_max)
}

/// `max_degree / vertex_count` per snapshot. Tends to zero without condensation
/// and stays bounded away from zero when a hub holds a linear share of the edges.
pub fn condensation_diagnostic(snapshots: &[SnapshotStats]) -> Result<Vec<f64>> {
    if snapshots.is_empty() {
        return Err(Error::Range("no snapshots".into()));
    }
    Ok(snapshots
        .iter()
        .map(|s| s.max_degree() as f64 / s.vertex_count() as f64)
        .collect())
}

/// Terms of the recursion bounding the growth of `P^(n)(k)`, evaluated on a snapshot:
/// `A_j = (k + alpha)/(2 + alpha) f_j P^(n)(k-1) + (x2 - x1)` and
/// `K_j = 1 + (k + alpha)/(2 + alpha) f_j`, with `f_j` at `(Psi_n(x1), Psi_n(x2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaeTerms {
    pub a1: f64,
    pub k1: f64,
    pub a2: f64,
    pub k2: f64,
}

impl SaeTerms {
    /// `(A_1 / K_1, A_2 / K_2)`, the fixed points of the two bounding recursions.
    pub fn fixed_points(&self) -> (f64, f64) {
        (self.a1 / self.k1, self.a2 / self.k2)
    }
}

pub fn sae_diagnostic(
    snap: &SnapshotStats,
    model: &AnalyticModel,
    k: u64,
    x1: f64,
    x2: f64,
) -> Result<SaeTerms> {
    check_interval(x1, x2)?;
    let alpha = snap.alpha();
    let y1 = snap.psi_empirical(x1);
    let y2 = snap.psi_empirical(x2);
    let below = if k == 0 {
        0.0
    } else {
        snap.proportion(k - 1, x1, x2)?
    };
    let scale = (k as f64 + alpha) / (2.0 + alpha);
    let f1 = model.upper_choice_kernel(y1, y2);
    let f2 = model.lower_choice_kernel(y1, y2, LowerKernelForm::Corrected);
    Ok(SaeTerms {
        a1: scale * f1 * below + (x2 - x1),
        k1: 1.0 + scale * f1,
        a2: scale * f2 * below + (x2 - x1),
        k2: 1.0 + scale * f2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `observed` counts against cell probabilities `probs`.
/// Cells expecting fewer than [`CHI_SQUARE_MIN_EXPECTED`] hits are pooled. Any
/// hit in a zero-probability cell gives `p = 0`.
pub fn chi_square_test(observed: &[u64], probs: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), probs.len());
    let n: u64 = observed.iter().sum();
    let nf = n as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        if p <= 0.0 {
            if o > 0 {
                return ChiSquareTest {
                    statistic: f64::INFINITY,
                    dof: 0,
                    p_value: 0.0,
                };
            }
            continue;
        }
        let e = p * nf;
        if e < CHI_SQUARE_MIN_EXPECTED {
            pooled.0 += o as f64;
            pooled.1 += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pooled.1 > 0.0 {
        cells.push(pooled);
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    if cells.len() < 2 {
        return ChiSquareTest {
            statistic,
            dof: 0,
            p_value: 1.0,
        };
    }
    let dof = cells.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map(|d| d.sf(statistic))
        .unwrap_or(0.0);
    ChiSquareTest {
        statistic,
        dof,
        p_value,
    }
}
