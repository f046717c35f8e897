//! Binomial coefficients and lexicographic ranking of k-subsets.

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// The `index`-th `k`-subset of `0..n` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut index: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            let block = binomial(n - next - 1, remaining);
            if index < block {
                break;
            }
            index -= block;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}
