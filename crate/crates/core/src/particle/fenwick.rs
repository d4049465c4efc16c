//! Binary indexed tree over fixed-point site rates.
//!
//! Entries are integers, so sums are exact and incremental updates never
//! drift from a from-scratch rebuild.

#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u128>,
    /// Largest power of two not exceeding the length.
    top: usize,
}

impl Fenwick {
    pub(crate) fn from_values(values: &[u128]) -> Self {
        let n = values.len();
        let mut tree = vec![0; n + 1];
        tree[1..].copy_from_slice(values);
        for i in 1..=n {
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        let top = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        Self { tree, top }
    }

    pub(crate) fn add(&mut self, idx: usize, delta: u128) {
        let n = self.tree.len() - 1;
        let mut i = idx + 1;
        while i <= n {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Remove `delta` from entry `idx`, which must hold at least `delta`.
    pub(crate) fn sub(&mut self, idx: usize, delta: u128) {
        let n = self.tree.len() - 1;
        let mut i = idx + 1;
        while i <= n {
            self.tree[i] -= delta;
            i += i & i.wrapping_neg();
        }
    }

    pub(crate) fn total(&self) -> u128 {
        let mut i = self.tree.len() - 1;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`, or `None`
    /// when `target` is at or beyond the stored total.
    pub(crate) fn find(&self, mut target: u128) -> Option<usize> {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = self.top;
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        (pos < n).then_some(pos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_search_matches_linear_scan() {
        let vals = [5, 0, 15, 20, 0, 2, 30];
        let f = Fenwick::from_values(&vals);
        assert_eq!(f.total(), vals.iter().sum::<u128>());
        let mut acc = 0;
        for (i, &v) in vals.iter().enumerate() {
            if v > 0 {
                assert_eq!(f.find(acc), Some(i));
                assert_eq!(f.find(acc + v - 1), Some(i));
            }
            acc += v;
        }
        assert_eq!(f.find(acc), None);
    }

    #[test]
    fn incremental_updates_are_exact() {
        let mut f = Fenwick::from_values(&[0; 5]);
        f.add(3, 20);
        f.add(1, 10);
        assert_eq!(f.find(5), Some(1));
        assert_eq!(f.find(15), Some(3));
        f.sub(1, 10);
        assert_eq!(f.find(5), Some(3));
        assert_eq!(f.total(), 20);
        f.sub(3, 20);
        assert_eq!(f.total(), 0);
        assert_eq!(f.find(0), None);
    }
}
