use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{arg_err, Result};

/// Partition of `{0, …, n-1}` into non-empty disjoint blocks, each block
/// sorted, blocks ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

pub const MAX_PARTITION_SIZE: usize = 10;
pub const MAX_SUBSET_SIZE: usize = 16;

/// All partitions of `{0, …, n-1}` for `1 <= n <= 10`.
///
/// Partitions are enumerated through restricted growth strings in
/// lexicographic order, so `n = 3` yields `{012}, {01}{2}, {02}{1}, {0}{12},
/// {0}{1}{2}`.
pub fn set_partitions(n: usize) -> Result<Vec<SetPartition>> {
    if !(1..=MAX_PARTITION_SIZE).contains(&n) {
        return Err(arg_err!("set_partitions: n = {n} outside 1..={MAX_PARTITION_SIZE}"));
    }
    Ok(cached_partitions(n).to_vec())
}

/// Cached partitions, also valid for `n = 0` (one empty partition).
pub(crate) fn cached_partitions(n: usize) -> &'static [SetPartition] {
    static CACHE: [OnceLock<Vec<SetPartition>>; MAX_PARTITION_SIZE + 1] =
        [const { OnceLock::new() }; MAX_PARTITION_SIZE + 1];
    assert!(n <= MAX_PARTITION_SIZE);
    CACHE[n].get_or_init(|| enumerate(n))
}

fn enumerate(n: usize) -> Vec<SetPartition> {
    if n == 0 {
        return vec![SetPartition { blocks: vec![] }];
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let nblocks = rgs.iter().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); nblocks];
        for (elem, &b) in rgs.iter().enumerate() {
            blocks[b].push(elem);
        }
        out.push(SetPartition { blocks });

        // next restricted growth string: a_0 = 0, a_i <= 1 + max(a_0..a_{i-1})
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let prefix_max = *rgs[..i].iter().max().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for v in rgs.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// All `2^n` subsets of `{0, …, n-1}` ordered by their bitmask.
pub fn subsets(n: usize) -> Result<Vec<Vec<usize>>> {
    if !(1..=MAX_SUBSET_SIZE).contains(&n) {
        return Err(arg_err!("subsets: n = {n} outside 1..={MAX_SUBSET_SIZE}"));
    }
    Ok((0u32..1 << n)
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BELL: [usize; 11] = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];

    #[test]
    fn bell_numbers() {
        for n in 1..=10 {
            assert_eq!(set_partitions(n).unwrap().len(), BELL[n], "n = {n}");
        }
    }

    #[test]
    fn canonical_order_n3() {
        let p = set_partitions(3).unwrap();
        let blocks: Vec<_> = p.iter().map(|p| p.blocks().to_vec()).collect();
        assert_eq!(
            blocks,
            vec![
                vec![vec![0, 1, 2]],
                vec![vec![0, 1], vec![2]],
                vec![vec![0, 2], vec![1]],
                vec![vec![0], vec![1, 2]],
                vec![vec![0], vec![1], vec![2]],
            ]
        );
    }

    #[test]
    fn partitions_are_valid() {
        for p in set_partitions(6).unwrap() {
            let mut all: Vec<usize> = p.blocks().iter().flatten().copied().collect();
            all.sort();
            assert_eq!(all, (0..6).collect::<Vec<_>>());
            assert!(p.blocks().iter().all(|b| !b.is_empty()));
            let firsts: Vec<_> = p.blocks().iter().map(|b| b[0]).collect();
            assert!(firsts.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn range_errors() {
        assert!(set_partitions(0).is_err());
        assert!(set_partitions(11).is_err());
        assert!(subsets(0).is_err());
        assert!(subsets(17).is_err());
    }

    #[test]
    fn subset_counts() {
        assert_eq!(subsets(1).unwrap(), vec![vec![], vec![0]]);
        assert_eq!(subsets(2).unwrap().len(), 4);
        assert_eq!(subsets(4).unwrap().len(), 16);
    }
}
