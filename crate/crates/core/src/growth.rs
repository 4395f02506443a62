//! Tree growth with degree-biased candidate sampling and rank-based choice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::choice::ChoiceVector;
use crate::constants::{
    ENUMERATION_MAX_R, ENUMERATION_MAX_VERTICES, WEIGHT_DRIFT_CHECK_INTERVAL, WEIGHT_DRIFT_TOL,
};
use crate::error::{Error, Result};
use crate::fenwick::WeightIndex;
use crate::stats::SnapshotStats;

/// Generator behind every simulation; see [`crate::constants::RNG_NAME`].
pub type SimRng = ChaCha8Rng;

/// Generator for replica `stream` of the experiment seeded by `seed`. Streams of
/// one seed are independent, so replicas never share random numbers.
pub fn seeded_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Parent entry of the vertices that have none.
pub const ROOT: u32 = u32::MAX;

/// Shape of the initial tree `G_0`; its vertex locations are always i.i.d. uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialTree {
    /// Vertex `i` attaches to a uniformly chosen earlier vertex.
    #[default]
    RandomRecursive,
    /// A chain `0 - 1 - ... - (n0 - 1)`.
    Path,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub choice: ChoiceVector,
    pub alpha: f64,
    pub n0: usize,
    pub steps: u64,
    pub seed: u64,
    pub initial_tree: InitialTree,
}

impl ModelParams {
    pub fn new(choice: ChoiceVector, alpha: f64, n0: usize, steps: u64, seed: u64) -> Result<Self> {
        let params = Self {
            choice,
            alpha,
            n0,
            steps,
            seed,
            initial_tree: InitialTree::default(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_initial_tree(mut self, initial_tree: InitialTree) -> Self {
        self.initial_tree = initial_tree;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > -1.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParams(format!(
                "alpha must be a finite number above -1, got {}",
                self.alpha
            )));
        }
        if self.n0 < 2 {
            return Err(Error::InvalidParams(format!(
                "the initial tree needs at least 2 vertices, got {}",
                self.n0
            )));
        }
        if self.n0 as u64 + self.steps >= ROOT as u64 {
            return Err(Error::InvalidParams(format!(
                "{} vertices exceed the supported maximum",
                self.n0 as u64 + self.steps
            )));
        }
        Ok(())
    }
}

/// Outcome of one growth step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub new_vertex: usize,
    pub attached_to: usize,
    /// 1-based rank of the chosen candidate among the sorted sample.
    pub rank: usize,
}

/// The evolving tree. Vertex `i < n0` is an initial vertex; vertex `n0 + t - 1`
/// arrived at step `t`.
#[derive(Debug, Clone)]
pub struct GrowthState {
    choice: ChoiceVector,
    // P[rank <= s] for s = 1..=r
    rank_cdf: Vec<f64>,
    alpha: f64,
    n0: usize,
    steps: u64,
    degrees: Vec<u32>,
    locations: Vec<f64>,
    parent: Vec<u32>,
    weights: WeightIndex,
    candidates: Vec<(f64, u32)>,
}

impl GrowthState {
    /// Draws `G_0`: `n0` uniform locations, then the tree edges.
    pub fn init(params: &ModelParams, rng: &mut impl Rng) -> Result<Self> {
        params.validate()?;
        let n0 = params.n0;
        let locations: Vec<f64> = (0..n0).map(|_| rng.random::<f64>()).collect();
        let parent: Vec<u32> = (0..n0)
            .map(|i| match (i, params.initial_tree) {
                (0, _) => ROOT,
                (i, InitialTree::Path) => (i - 1) as u32,
                (i, InitialTree::RandomRecursive) => rng.random_range(0..i) as u32,
            })
            .collect();
        let capacity = n0 + params.steps as usize;
        Self::build(params.choice.clone(), params.alpha, locations, parent, capacity)
    }

    /// A state with the given locations and parent links (forest roots marked [`ROOT`])
    /// taken as the initial tree.
    pub fn from_tree(
        choice: ChoiceVector,
        alpha: f64,
        locations: Vec<f64>,
        parent: Vec<u32>,
    ) -> Result<Self> {
        if locations.len() != parent.len() {
            return Err(Error::InvalidParams(
                "locations and parent links differ in length".into(),
            ));
        }
        let roots = parent.iter().filter(|&&p| p == ROOT).count();
        if roots != 1 || parent.iter().enumerate().any(|(i, &p)| p != ROOT && p as usize >= i) {
            return Err(Error::InvalidParams(
                "parent links must point to earlier vertices and leave exactly one root".into(),
            ));
        }
        if locations.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidParams("locations must lie in [0, 1]".into()));
        }
        let n = locations.len();
        Self::build(choice, alpha, locations, parent, n)
    }

    fn build(
        choice: ChoiceVector,
        alpha: f64,
        locations: Vec<f64>,
        parent: Vec<u32>,
        capacity: usize,
    ) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::InvalidParams(format!("alpha must exceed -1, got {alpha}")));
        }
        let n0 = locations.len();
        if n0 < 2 {
            return Err(Error::InvalidParams("need at least 2 vertices".into()));
        }
        let mut degrees = vec![0u32; n0];
        for (i, &p) in parent.iter().enumerate() {
            if p != ROOT {
                degrees[i] += 1;
                degrees[p as usize] += 1;
            }
        }
        let w: Vec<f64> = degrees.iter().map(|&d| d as f64 + alpha).collect();
        let weights = WeightIndex::from_weights(&w, capacity);
        let rank_cdf = choice.cumulative()[1..].to_vec();
        let r = choice.r();
        let mut degrees_cap = Vec::with_capacity(capacity);
        degrees_cap.extend_from_slice(&degrees);
        let mut locations_cap = Vec::with_capacity(capacity);
        locations_cap.extend_from_slice(&locations);
        let mut parent_cap = Vec::with_capacity(capacity);
        parent_cap.extend_from_slice(&parent);
        Ok(Self {
            choice,
            rank_cdf,
            alpha,
            n0,
            steps: 0,
            degrees: degrees_cap,
            locations: locations_cap,
            parent: parent_cap,
            weights,
            candidates: Vec::with_capacity(r),
        })
    }

    pub fn choice(&self) -> &ChoiceVector {
        &self.choice
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Steps `n` taken since `G_0`.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|&&p| p != ROOT).count()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn parents(&self) -> &[u32] {
        &self.parent
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Total sampling weight held by the index.
    pub fn total_weight(&self) -> f64 {
        self.weights.total()
    }

    /// `(n + n0 - 1)(2 + alpha) + alpha`, the exact total weight of a tree on `n + n0` vertices.
    pub fn expected_total_weight(&self) -> f64 {
        (self.vertex_count() - 1) as f64 * (2.0 + self.alpha) + self.alpha
    }

    /// `|index total - exact total|`.
    pub fn weight_drift(&self) -> f64 {
        (self.total_weight() - self.expected_total_weight()).abs()
    }

    /// Rebuilds the weight index from the degrees if its total has drifted
    /// beyond [`WEIGHT_DRIFT_TOL`]. Returns whether a rebuild happened.
    pub fn check_weight_drift(&mut self) -> bool {
        if self.weight_drift() <= WEIGHT_DRIFT_TOL {
            return false;
        }
        self.rebuild_weights();
        true
    }

    fn rebuild_weights(&mut self) {
        let w = self.current_weights();
        self.weights.rebuild(&w);
    }

    fn current_weights(&self) -> Vec<f64> {
        self.degrees.iter().map(|&d| d as f64 + self.alpha).collect()
    }

    /// One preferential draw: vertex `i` with probability `(deg(i) + alpha) / W`.
    pub fn sample_candidate(&self, rng: &mut impl Rng) -> usize {
        let target = rng.random::<f64>() * self.weights.total();
        self.weights.find(target)
    }

    fn sample_rank(&self, rng: &mut impl Rng) -> usize {
        let u = rng.random::<f64>();
        self.rank_cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.rank_cdf.len() - 1)
    }

    /// Adds one vertex: `r` preferential draws with replacement, sorted by
    /// location (ties by vertex index), then a `Xi`-distributed rank picks the
    /// candidate that receives the edge.
    pub fn grow_step(&mut self, rng: &mut impl Rng) -> StepOutcome {
        let mut candidates = std::mem::take(&mut self.candidates);
        candidates.clear();
        for _ in 0..self.choice.r() {
            let v = self.sample_candidate(rng);
            let key = (self.locations[v], v as u32);
            // insertion sort; r is small
            let pos = candidates.partition_point(|c| *c <= key);
            candidates.insert(pos, key);
        }
        let rank = self.sample_rank(rng);
        let target = candidates[rank].1 as usize;
        self.candidates = candidates;

        let location = rng.random::<f64>();
        let new_vertex = self.vertex_count();
        self.degrees[target] += 1;
        self.weights.add(target, 1.0);
        self.degrees.push(1);
        self.locations.push(location);
        self.parent.push(target as u32);
        let new_weight = 1.0 + self.alpha;
        if self.weights.len() == self.weights.capacity() {
            let mut w = self.current_weights();
            w.pop();
            self.weights.push(new_weight, || w);
        } else {
            self.weights.push(new_weight, Vec::new);
        }
        self.steps += 1;
        if self.steps % WEIGHT_DRIFT_CHECK_INTERVAL == 0 {
            self.check_weight_drift();
        }
        StepOutcome {
            new_vertex,
            attached_to: target,
            rank: rank + 1,
        }
    }

    /// Exact law of the vertex that receives the next edge, by enumerating every
    /// ordered `r`-tuple of candidate draws.
    pub fn exact_attachment_distribution(&self) -> Result<Vec<f64>> {
        let v = self.vertex_count();
        let r = self.choice.r();
        if v > ENUMERATION_MAX_VERTICES || r > ENUMERATION_MAX_R {
            return Err(Error::Size {
                vertices: v,
                r,
                max_vertices: ENUMERATION_MAX_VERTICES,
                max_r: ENUMERATION_MAX_R,
            });
        }
        let total: f64 = self.degrees.iter().map(|&d| d as f64 + self.alpha).sum();
        let p: Vec<f64> = self
            .degrees
            .iter()
            .map(|&d| (d as f64 + self.alpha) / total)
            .collect();
        let mut law = vec![0.0; v];
        let mut tuple = vec![0usize; r];
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(r);
        loop {
            let weight: f64 = tuple.iter().map(|&i| p[i]).product();
            sorted.clear();
            sorted.extend(tuple.iter().map(|&i| (self.locations[i], i)));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for (s, &(_, vertex)) in sorted.iter().enumerate() {
                law[vertex] += weight * self.choice.probs()[s];
            }
            // odometer over {0..v}^r
            let mut digit = 0;
            loop {
                if digit == r {
                    return Ok(law);
                }
                tuple[digit] += 1;
                if tuple[digit] < v {
                    break;
                }
                tuple[digit] = 0;
                digit += 1;
            }
        }
    }
}

/// Grows one tree from `params.seed` and records a snapshot at every step
/// count listed in `schedule` (sorted, each at most `params.steps`).
pub fn run(params: &ModelParams, schedule: &[u64]) -> Result<Vec<SnapshotStats>> {
    let mut rng = seeded_rng(params.seed, 0);
    run_with_rng(params, schedule, &mut rng)
}

pub fn run_with_rng(
    params: &ModelParams,
    schedule: &[u64],
    rng: &mut impl Rng,
) -> Result<Vec<SnapshotStats>> {
    params.validate()?;
    if schedule.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParams("snapshot schedule must be sorted".into()));
    }
    if let Some(&last) = schedule.last() {
        if last > params.steps {
            return Err(Error::InvalidParams(format!(
                "snapshot at step {last} is beyond the {} steps of the run",
                params.steps
            )));
        }
    }
    let mut state = GrowthState::init(params, rng)?;
    let mut snapshots = Vec::with_capacity(schedule.len());
    let mut next = 0;
    for step in 0..=params.steps {
        while next < schedule.len() && schedule[next] == step {
            state.check_weight_drift();
            snapshots.push(SnapshotStats::capture(&state));
            next += 1;
        }
        if step == params.steps {
            break;
        }
        state.grow_step(rng);
    }
    Ok(snapshots)
}
