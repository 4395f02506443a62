use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Probability vector over the location ranks `1..=r` of the sampled candidates.
///
/// Entry `s - 1` is the probability that the candidate with the `s`-th smallest
/// location receives the new edge.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceVector {
    probs: Vec<f64>,
}

const SUM_TOL: f64 = 1e-12;

impl ChoiceVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidChoice(format!(
                "need at least 2 candidates, got {}",
                probs.len()
            )));
        }
        if let Some((s, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidChoice(format!(
                "entry {} is {p}, expected a finite nonnegative number",
                s + 1
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidChoice(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self { probs })
    }

    /// `Xi_s = 1/r`: rank-blind choice, which reduces to plain preferential attachment.
    pub fn uniform(r: usize) -> Result<Self> {
        Self::new(vec![1.0 / r as f64; r])
    }

    /// `(0, 1, 0)`, the middle-of-three rule.
    pub fn middle_of_three() -> Self {
        Self {
            probs: vec![0.0, 1.0, 0.0],
        }
    }

    /// `(0, 1/2, 0, 0, 0, 1/2, 0)`, the second-or-sixth-of-seven rule.
    pub fn second_or_sixth_of_seven() -> Self {
        Self {
            probs: vec![0.0, 0.5, 0.0, 0.0, 0.0, 0.5, 0.0],
        }
    }

    /// `(0, 1/3, 0, 0, 0, 2/3, 0)`, an asymmetric second-or-sixth-of-seven rule.
    pub fn asymmetric_second_or_sixth_of_seven() -> Self {
        Self {
            probs: vec![0.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 2.0 / 3.0, 0.0],
        }
    }

    /// Number of candidates `r`.
    pub fn r(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of rank `s`, 1-based.
    pub fn prob(&self, s: usize) -> f64 {
        self.probs[s - 1]
    }

    /// Cumulative sums `[0, Xi_1, Xi_1 + Xi_2, ..., 1]`, length `r + 1`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.r() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for p in &self.probs {
            acc += p;
            out.push(acc);
        }
        // pin the last entry so that G(1) = 1 exactly
        *out.last_mut().unwrap() = 1.0;
        out
    }
}

impl fmt::Display for ChoiceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.probs.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Parses one entry, accepting either a decimal or a fraction `p/q`.
pub fn parse_probability(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::InvalidChoice(format!("cannot parse {s:?} as a probability"));
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(bad());
            }
            Ok(num / den)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

/// Parses a comma-separated list such as `"0,1/3,0,0,0,2/3,0"`, optionally in parentheses.
impl FromStr for ChoiceVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let probs = inner
            .split(',')
            .map(parse_probability)
            .collect::<Result<Vec<_>>>()?;
        Self::new(probs)
    }
}
