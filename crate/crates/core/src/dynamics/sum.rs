const LEAF: usize = 32;

/// `Σ_{j<n}` of per-source contributions, added into a `K`-array by `f`,
/// in a fixed pairwise tree: leaves of 32 sources summed in order, then
/// halves combined recursively.
#[inline]
pub fn pairwise_sum<const K: usize, F: Fn(usize, &mut [f64; K])>(n: usize, f: &F) -> [f64; K] {
    rec(0, n, f)
}

fn rec<const K: usize, F: Fn(usize, &mut [f64; K])>(lo: usize, hi: usize, f: &F) -> [f64; K] {
    if hi - lo <= LEAF {
        let mut acc = [0.0; K];
        for j in lo..hi {
            f(j, &mut acc);
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    let mut a = rec(lo, mid, f);
    let b = rec(mid, hi, f);
    for k in 0..K {
        a[k] += b[k];
    }
    a
}
