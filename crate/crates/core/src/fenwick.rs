/// Prefix-sum tree over nonnegative per-vertex weights with `O(log n)` update,
/// prefix query and inverse-CDF search.
#[derive(Debug, Clone)]
pub struct WeightIndex {
    // 1-based Fenwick array; tree[0] is unused
    tree: Vec<f64>,
    len: usize,
}

#[inline]
fn lowbit(i: usize) -> usize {
    i & i.wrapping_neg()
}

impl WeightIndex {
    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            tree: vec![0.0; capacity.max(1) + 1],
            len: 0,
        }
    }

    pub fn from_weights(weights: &[f64], capacity: usize) -> Self {
        let mut index = Self::with_capacity(capacity.max(weights.len()));
        index.rebuild(weights);
        index
    }

    /// Replaces the contents by `weights` in `O(n)`.
    pub fn rebuild(&mut self, weights: &[f64]) {
        if weights.len() >= self.tree.len() {
            self.tree.resize(weights.len() + 1, 0.0);
        }
        self.tree.iter_mut().for_each(|w| *w = 0.0);
        self.tree[1..=weights.len()].copy_from_slice(weights);
        let cap = self.capacity();
        for i in 1..=cap {
            let parent = i + lowbit(i);
            if parent <= cap {
                self.tree[parent] += self.tree[i];
            }
        }
        self.len = weights.len();
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.tree.len() - 1
    }

    /// Appends a weight at index `len()`. Amortized `O(log n)`; doubles the capacity when full.
    pub fn push(&mut self, weight: f64, current_weights: impl FnOnce() -> Vec<f64>) {
        if self.len == self.capacity() {
            let weights = current_weights();
            debug_assert_eq!(weights.len(), self.len);
            self.tree = vec![0.0; 2 * self.capacity() + 1];
            self.rebuild(&weights);
        }
        self.len += 1;
        self.add(self.len - 1, weight);
    }

    pub fn add(&mut self, index: usize, delta: f64) {
        debug_assert!(index < self.len);
        let mut i = index + 1;
        let cap = self.capacity();
        while i <= cap {
            self.tree[i] += delta;
            i += lowbit(i);
        }
    }

    /// Sum of weights `[0, end)`.
    pub fn prefix(&self, end: usize) -> f64 {
        let mut i = end.min(self.capacity());
        let mut sum = 0.0;
        while i > 0 {
            sum += self.tree[i];
            i -= lowbit(i);
        }
        sum
    }

    pub fn total(&self) -> f64 {
        self.prefix(self.len)
    }

    /// Index `i` with `prefix(i) <= target < prefix(i + 1)`, clamped to the stored range.
    pub fn find(&self, target: f64) -> usize {
        debug_assert!(self.len > 0);
        let cap = self.capacity();
        let mut step = 1usize << (usize::BITS - 1 - cap.leading_zeros());
        let mut pos = 0usize;
        let mut rest = target;
        while step > 0 {
            let next = pos + step;
            if next <= cap && self.tree[next] <= rest {
                pos = next;
                rest -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(self.len - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_sums() {
        let w = [2.0, 1.0, 0.5, 3.0, 0.25];
        let index = WeightIndex::from_weights(&w, 8);
        let mut acc = 0.0;
        for i in 0..=w.len() {
            assert_eq!(index.prefix(i), acc);
            if i < w.len() {
                acc += w[i];
            }
        }
        assert_eq!(index.total(), 6.75);
    }

    #[test]
    fn find_inverts_prefix() {
        let w = [2.0, 1.0, 0.5, 3.0, 0.25];
        let index = WeightIndex::from_weights(&w, 5);
        assert_eq!(index.find(0.0), 0);
        assert_eq!(index.find(1.999), 0);
        assert_eq!(index.find(2.0), 1);
        assert_eq!(index.find(3.4), 2);
        assert_eq!(index.find(3.5), 3);
        assert_eq!(index.find(6.6), 4);
        // rounding past the end clamps into range
        assert_eq!(index.find(7.0), 4);
    }

    #[test]
    fn push_grows() {
        let mut weights = vec![1.0, 1.0];
        let mut index = WeightIndex::from_weights(&weights, 2);
        for k in 0..20 {
            let w = 0.5 + k as f64;
            let snapshot = weights.clone();
            index.push(w, || snapshot);
            weights.push(w);
            index.add(0, 1.0);
            weights[0] += 1.0;
        }
        let want: f64 = weights.iter().sum();
        assert!((index.total() - want).abs() < 1e-12);
        assert_eq!(index.len(), 22);
    }
}
