//! Channel-balanced workload scheduling: partition K weighted items into
//! N groups with near-equal weight sums.
//!
//! The heuristic sorts descending, reorders in serpentine (boustrophedon)
//! blocks of N, deals the blocks round-robin into N sublists, then runs a
//! bounded fine-tune loop that moves the smallest element of the heaviest
//! sublist to the lightest one while that closes the gap. An exhaustive
//! branch-and-bound minimizer over small instances serves as the
//! validation oracle.

use crate::error::{Error, Result};

/// Non-negative item weights with their original indices.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedItems {
    pub weights: Vec<f64>,
    pub labels: Vec<usize>,
}

impl WeightedItems {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("need at least one item".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Numeric(
                "item weights must be finite and non-negative".into(),
            ));
        }
        let labels = (0..weights.len()).collect();
        Ok(Self { weights, labels })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Disjoint cover of item indices by N sublists, with cached sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub sublists: Vec<Vec<usize>>,
    pub sums: Vec<f64>,
}

impl Partition {
    pub fn recompute_sums(&mut self, items: &WeightedItems) {
        for (j, list) in self.sublists.iter().enumerate() {
            self.sums[j] = list.iter().map(|&i| items.weights[i]).sum();
        }
    }

    /// Checks disjointness and exact cover of 0..K.
    pub fn validate(&self, k: usize) -> Result<()> {
        let mut seen = vec![false; k];
        for list in &self.sublists {
            for &i in list {
                if i >= k {
                    return Err(Error::Config(format!("item index {i} out of range")));
                }
                if seen[i] {
                    return Err(Error::Config(format!("item {i} assigned twice")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config("partition does not cover all items".into()));
        }
        Ok(())
    }

    pub fn has_empty_sublists(&self) -> bool {
        self.sublists.iter().any(|l| l.is_empty())
    }

    pub fn max_sum(&self) -> f64 {
        self.sums.iter().cloned().fold(0.0, f64::max)
    }
}

/// Summary metrics of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionStats {
    pub sums: Vec<f64>,
    pub diff: f64,
    pub max_sum: f64,
    /// mean(sums)/max(sums); 1.0 when perfectly balanced, defined as 1.0
    /// for the all-empty degenerate case.
    pub balance: f64,
}

pub fn partition_stats(p: &Partition) -> PartitionStats {
    let max = p.max_sum();
    let min = p.sums.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = p.sums.iter().sum::<f64>() / p.sums.len() as f64;
    PartitionStats {
        sums: p.sums.clone(),
        diff: if p.sums.is_empty() { 0.0 } else { max - min },
        max_sum: max,
        balance: if max == 0.0 { 1.0 } else { mean / max },
    }
}

/// Indices sorted by weight descending, ties broken by ascending index.
fn descending_order(items: &WeightedItems) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.sort_by(|&a, &b| {
        items.weights[b]
            .partial_cmp(&items.weights[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    idx
}

/// Boustrophedon reorder: blocks of N, descending blocks kept, every odd
/// block reversed to ascending. The input must already be sorted
/// descending and have length divisible by N.
pub fn serpentine_order(sorted_desc: &[usize], n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::Config("need at least one sublist".into()));
    }
    let mut out = Vec::with_capacity(sorted_desc.len());
    for (block, chunk) in sorted_desc.chunks(n).enumerate() {
        if block % 2 == 1 {
            out.extend(chunk.iter().rev());
        } else {
            out.extend(chunk.iter());
        }
    }
    Ok(out)
}

/// Deals the serpentine-ordered list round-robin: sublist j receives the
/// items at positions N·i + j, so each sublist takes one element per
/// block and the seeded sums come out roughly equal.
pub fn seed_sublists(ordered: &[usize], n: usize, items: &WeightedItems) -> Result<Partition> {
    if n == 0 {
        return Err(Error::Config("need at least one sublist".into()));
    }
    let mut sublists = vec![Vec::new(); n];
    for (pos, &item) in ordered.iter().enumerate() {
        sublists[pos % n].push(item);
    }
    let mut p = Partition {
        sublists,
        sums: vec![0.0; n],
    };
    p.recompute_sums(items);
    Ok(p)
}

/// Bounded rebalance loop: while diff/2 exceeds the smallest element of
/// the heaviest sublist, move that element to the lightest sublist. Each
/// accepted move shrinks the heaviest-vs-lightest gap, so at most
/// min(t_iter, K) productive moves happen. Sublist and element ties break
/// toward the lowest index.
pub fn finetune(mut p: Partition, items: &WeightedItems, t_iter: usize) -> Partition {
    for _ in 0..t_iter {
        let n = p.sums.len();
        if n < 2 {
            break;
        }
        let mut jmax = 0;
        let mut jmin = 0;
        for j in 1..n {
            if p.sums[j] > p.sums[jmax] {
                jmax = j;
            }
            if p.sums[j] < p.sums[jmin] {
                jmin = j;
            }
        }
        let diff = p.sums[jmax] - p.sums[jmin];
        // Smallest element of the heaviest sublist, lowest label first.
        let Some((pos, &item)) = p.sublists[jmax].iter().enumerate().min_by(|(_, &a), (_, &b)| {
            items.weights[a]
                .partial_cmp(&items.weights[b])
                .unwrap()
                .then(a.cmp(&b))
        }) else {
            break;
        };
        let w = items.weights[item];
        // A zero-weight move cannot shrink the gap; treat it as a fixed
        // point rather than shuffling phantom work.
        if !(diff / 2.0 > w && w > 0.0) {
            break;
        }
        p.sublists[jmax].remove(pos);
        p.sublists[jmin].push(item);
        p.sums[jmax] -= w;
        p.sums[jmin] += w;
    }
    p
}

/// The full heuristic: sort descending, serpentine-reorder in blocks of
/// N (padding with zero-weight phantoms when N does not divide K, later
/// stripped), deal round-robin, fine-tune. Deterministic given inputs.
pub fn cbws_partition(items: &WeightedItems, n: usize, t_iter: usize) -> Result<Partition> {
    if n == 0 {
        return Err(Error::Config("need at least one sublist".into()));
    }
    let k = items.len();
    let pad = (n - k % n) % n;
    // Phantom items take indices K.. with weight 0 so the block structure
    // of the serpentine pass stays exact.
    let padded = WeightedItems {
        weights: items
            .weights
            .iter()
            .cloned()
            .chain(std::iter::repeat(0.0).take(pad))
            .collect(),
        labels: (0..k + pad).collect(),
    };
    let sorted = descending_order(&padded);
    let ordered = serpentine_order(&sorted, n)?;
    let mut seeded = seed_sublists(&ordered, n, &padded)?;
    for list in seeded.sublists.iter_mut() {
        list.retain(|&i| i < k);
    }
    seeded.recompute_sums(items);
    let result = finetune(seeded, items, t_iter);
    result.validate(k)?;
    Ok(result)
}

/// Default fine-tune budget: the gap shrinks with every productive move
/// and no element moves twice in a row, so K iterations suffice.
pub fn default_t_iter(k: usize) -> usize {
    k
}

/// Exact minimizer of max(sum_j) by branch and bound; the validation
/// oracle for the heuristic. Limited to K ≤ 16 items.
pub fn optimal_partition_oracle(items: &WeightedItems, n: usize) -> Result<Partition> {
    if n == 0 {
        return Err(Error::Config("need at least one sublist".into()));
    }
    let k = items.len();
    if k > 16 {
        return Err(Error::Budget(format!(
            "exhaustive oracle limited to 16 items, got {k}"
        )));
    }
    // Search big items first so pruning bites early.
    let order = descending_order(items);
    let total: f64 = items.weights.iter().sum();
    let lower = (total / n as f64).max(items.weights.iter().cloned().fold(0.0, f64::max));

    struct Search<'a> {
        items: &'a WeightedItems,
        order: &'a [usize],
        n: usize,
        best_value: f64,
        best_assign: Vec<usize>,
        assign: Vec<usize>,
        loads: Vec<f64>,
        suffix: Vec<f64>,
        lower: f64,
    }

    impl Search<'_> {
        fn run(&mut self, depth: usize, current_max: f64) {
            if current_max >= self.best_value {
                return;
            }
            if depth == self.order.len() {
                self.best_value = current_max;
                self.best_assign = self.assign.clone();
                return;
            }
            // Remaining work cannot beat an already-found optimum spread
            // perfectly over N groups.
            let optimistic = current_max
                .max((self.loads.iter().sum::<f64>() + self.suffix[depth]) / self.n as f64);
            if optimistic >= self.best_value {
                return;
            }
            let item = self.order[depth];
            let w = self.items.weights[item];
            let mut tried_empty = false;
            for j in 0..self.n {
                // All empty groups are interchangeable; try only the first.
                if self.loads[j] == 0.0 {
                    if tried_empty {
                        continue;
                    }
                    tried_empty = true;
                }
                self.loads[j] += w;
                self.assign[item] = j;
                self.run(depth + 1, current_max.max(self.loads[j]));
                self.loads[j] -= w;
                if self.best_value <= self.lower {
                    return;
                }
            }
        }
    }

    let mut search = Search {
        items,
        order: &order,
        n,
        best_value: f64::INFINITY,
        best_assign: vec![0; k],
        assign: vec![0; k],
        loads: vec![0.0; n],
        suffix: {
            let mut s = vec![0.0; k + 1];
            for d in (0..k).rev() {
                s[d] = s[d + 1] + items.weights[order[d]];
            }
            s
        },
        lower,
    };
    search.run(0, 0.0);

    // Canonical form: relabel groups by first appearance in item order,
    // sublists hold ascending labels.
    let mut relabel = vec![usize::MAX; n];
    let mut next = 0;
    let mut sublists: Vec<Vec<usize>> = vec![Vec::new(); n];
    for item in 0..k {
        let g = search.best_assign[item];
        if relabel[g] == usize::MAX {
            relabel[g] = next;
            next += 1;
        }
        sublists[relabel[g]].push(item);
    }
    let mut p = Partition {
        sublists,
        sums: vec![0.0; n],
    };
    p.recompute_sums(items);
    p.validate(k)?;
    Ok(p)
}

/// The hardware's default channel-order assignment: contiguous
/// equal-count chunks of the unsorted list.
pub fn contiguous_partition(items: &WeightedItems, n: usize) -> Result<Partition> {
    if n == 0 {
        return Err(Error::Config("need at least one sublist".into()));
    }
    let k = items.len();
    let base = k / n;
    let extra = k % n;
    let mut sublists = Vec::with_capacity(n);
    let mut start = 0;
    for j in 0..n {
        let len = base + (j < extra) as usize;
        sublists.push((start..start + len).collect());
        start += len;
    }
    let mut p = Partition {
        sublists,
        sums: vec![0.0; n],
    };
    p.recompute_sums(items);
    Ok(p)
}
