//! Partition sets indexing the one-dimensional and multivariate Faà di Bruno sums.

use std::collections::BTreeMap;

use super::MultiIndex;

/// A vector `k = (k₁,…,k_n)` with `Σ j·k_j = n` and `Σ k_j = k_count`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition1D {
    pub k: Vec<u32>,
    pub n: u32,
    pub k_count: u32,
}

/// One element of `P_s(n, α)`: nonzero multi-indices `ks[i]` paired with
/// strictly increasing positive integers `ls[i]`, such that `Σ ks[i] = α`
/// and `Σ |ks[i]|·ls[i] = n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionMulti {
    pub ks: Vec<MultiIndex>,
    pub ls: Vec<u32>,
}

impl PartitionMulti {
    pub fn s(&self) -> usize {
        self.ks.len()
    }
}

/// All of `P(n, k)`, in ascending lexicographic order of the k-vector.
///
/// Returns an empty list when `k == 0`, `k > n` or `n == 0`.
pub fn enumerate_partitions_1d(n: u32, k: u32) -> Vec<Partition1D> {
    let mut out = Vec::new();
    if n == 0 || k == 0 || k > n {
        return out;
    }
    let mut current = vec![0u32; n as usize];
    fill_1d(&mut current, 1, n, k, n, k, &mut out);
    out
}

fn fill_1d(
    current: &mut Vec<u32>,
    j: u32,
    sum_left: u32,
    count_left: u32,
    n: u32,
    k: u32,
    out: &mut Vec<Partition1D>,
) {
    if j > n {
        if sum_left == 0 && count_left == 0 {
            out.push(Partition1D { k: current.clone(), n, k_count: k });
        }
        return;
    }
    // Parts of size ≥ j: need count_left·j ≤ sum_left ≤ count_left·n.
    if count_left * j > sum_left || sum_left > count_left * n {
        return;
    }
    let max_kj = (sum_left / j).min(count_left);
    for kj in 0..=max_kj {
        current[(j - 1) as usize] = kj;
        fill_1d(current, j + 1, sum_left - kj * j, count_left - kj, n, k, out);
    }
    current[(j - 1) as usize] = 0;
}

/// `P_s(n, α)` for every `s` in `1..=n`, keyed by `s`.
///
/// Every key `1..=n` is present (possibly with an empty list). Within a key
/// the partitions appear in the order generated by choosing `ℓ₁ < ℓ₂ < …`
/// ascending and, for each `ℓ`, the multi-index `k` in lexicographic order.
/// When `|α|` is zero or exceeds `n` every set is empty.
pub fn enumerate_partitions_multi(n: u32, alpha: &MultiIndex) -> BTreeMap<usize, Vec<PartitionMulti>> {
    let mut out: BTreeMap<usize, Vec<PartitionMulti>> = (1..=n as usize).map(|s| (s, Vec::new())).collect();
    if n == 0 || alpha.order() == 0 || alpha.order() > n {
        return out;
    }
    let mut ks = Vec::new();
    let mut ls = Vec::new();
    fill_multi(alpha.clone(), n, 0, &mut ks, &mut ls, &mut out);
    out
}

fn fill_multi(
    alpha_left: MultiIndex,
    n_left: u32,
    last_l: u32,
    ks: &mut Vec<MultiIndex>,
    ls: &mut Vec<u32>,
    out: &mut BTreeMap<usize, Vec<PartitionMulti>>,
) {
    let order_left = alpha_left.order();
    if order_left == 0 {
        if n_left == 0 {
            out.entry(ks.len())
                .or_default()
                .push(PartitionMulti { ks: ks.clone(), ls: ls.clone() });
        }
        return;
    }
    // Every remaining unit of |α| costs at least ℓ > last_l.
    for l in (last_l + 1)..=n_left {
        for k in alpha_left.sub_indices() {
            let kk = k.order();
            if kk == 0 || kk * l > n_left {
                continue;
            }
            let rest = alpha_left.checked_sub(&k).expect("sub-index within bounds");
            let n_rest = n_left - kk * l;
            // Remaining |rest| units each cost more than l.
            if rest.order() * (l + 1) > n_rest {
                continue;
            }
            ks.push(k);
            ls.push(l);
            fill_multi(rest, n_rest, l, ks, ls, out);
            ks.pop();
            ls.pop();
        }
    }
}
