//! Integer partitions, conjugation, the second Casimir κ and the external
//! potentials Φ_k.

use crate::scalars::{int, Context, Exact};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Weakly decreasing positive parts; the empty list is ∅.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Builds a partition, dropping zero parts. Panics if `parts` increases.
    pub fn new(parts: impl Into<Vec<u32>>) -> Self {
        let mut v: Vec<u32> = parts.into();
        assert!(v.windows(2).all(|w| w[0] >= w[1]), "parts must be weakly decreasing: {v:?}");
        while v.last() == Some(&0) {
            v.pop();
        }
        Partition(v)
    }

    pub fn empty() -> Self {
        Partition(vec![])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// λ_i with 1-based index; zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            return u32::MAX;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        Partition((1..=first).map(|j| self.0.iter().filter(|&&x| x >= j).count() as u32).collect())
    }

    /// μ ⊆ λ as Young diagrams.
    pub fn contains(&self, mu: &Partition) -> bool {
        mu.len() <= self.len() && mu.0.iter().zip(&self.0).all(|(m, l)| m <= l)
    }

    /// κ(λ) = Σ_i λ_i(λ_i − 2i + 1).
    pub fn kappa(&self) -> i64 {
        self.0.iter().enumerate().map(|(i, &l)| l as i64 * (l as i64 - 2 * i as i64 - 1)).sum()
    }

    /// n(λ) = Σ_i (i−1)λ_i.
    pub fn n(&self) -> i64 {
        self.0.iter().enumerate().map(|(i, &l)| i as i64 * l as i64).sum()
    }

    /// Hook lengths of all boxes, row by row.
    pub fn hooks(&self) -> Vec<u32> {
        let c = self.conjugate();
        let mut out = Vec::with_capacity(self.weight());
        for (i, &l) in self.0.iter().enumerate() {
            for j in 0..l as usize {
                out.push(l - j as u32 + c.0[j] - i as u32 - 1);
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Partitions of exactly `n`, lexicographically decreasing.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for x in (1..=max.min(rest)).rev() {
            cur.push(x);
            rec(rest - x, x, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(n as u32, n as u32, &mut vec![], &mut out);
    out
}

/// All partitions of weight ≤ `max_weight`: graded, then lexicographically
/// decreasing within each weight.
pub fn enumerate(max_weight: usize) -> Vec<Partition> {
    (0..=max_weight).flat_map(partitions_of).collect()
}

/// Φ_k(λ, s) = Σ_{i≤ℓ} (q^{k(λ_i+s−i+1)} − q^{k(s−i+1)}) + q^k(1 − q^{ks})/(1 − q^k).
pub fn phi(ctx: &Context, k: i64, lambda: &Partition, s: i64) -> Exact {
    phi_rows(ctx, k, lambda, s, lambda.len())
}

fn phi_rows(ctx: &Context, k: i64, lambda: &Partition, s: i64, rows: usize) -> Exact {
    assert!(k != 0, "phi: k must be nonzero");
    let mut v = ctx.qi(k) * (int(1) - ctx.qi(k * s)) / ctx.one_minus_qk(k);
    for i in 1..=rows {
        let l = lambda.part(i) as i64;
        let i = i as i64;
        v += ctx.qi(k * (l + s - i + 1)) - ctx.qi(k * (s - i + 1));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::frac;
    use proptest::prelude::*;

    // Euler's pentagonal recurrence, independent of the generator.
    fn partition_numbers(n: usize) -> Vec<u64> {
        let mut p = vec![0i64; n + 1];
        p[0] = 1;
        for m in 1..=n as i64 {
            let mut k = 1i64;
            loop {
                let g1 = k * (3 * k - 1) / 2;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                p[m as usize] += sign * p[(m - g1) as usize];
                let g2 = k * (3 * k + 1) / 2;
                if g2 <= m {
                    p[m as usize] += sign * p[(m - g2) as usize];
                }
                k += 1;
            }
        }
        p.into_iter().map(|x| x as u64).collect()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate(0), vec![Partition::empty()]);
        let per: Vec<usize> = (0..=4).map(|d| partitions_of(d).len()).collect();
        assert_eq!(per, vec![1, 1, 2, 3, 5]);
        assert_eq!(enumerate(10).len(), 139);
        let pn = partition_numbers(20);
        for d in 0..=20 {
            assert_eq!(partitions_of(d).len() as u64, pn[d], "p({d})");
        }
        assert_eq!(partitions_of(3), vec![Partition::new([3]), Partition::new([2, 1]), Partition::new([1, 1, 1])]);
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(Partition::new([3, 1]).conjugate(), Partition::new([2, 1, 1]));
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
        assert_eq!(Partition::new([2, 2]).conjugate(), Partition::new([2, 2]));
        assert_eq!(Partition::new([2, 0, 0]), Partition::new([2]));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(Partition::empty().kappa(), 0);
        assert_eq!(Partition::new([2]).kappa(), 2);
        assert_eq!(Partition::new([2, 1]).kappa(), 0);
        // direct half-integer form of the definition
        for l in enumerate(8) {
            let direct: f64 = l
                .parts()
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let i = i as f64 + 1.0;
                    (x as f64 - i + 0.5).powi(2) - (-i + 0.5).powi(2)
                })
                .sum();
            assert_eq!(direct as i64, l.kappa());
            assert_eq!(l.conjugate().kappa(), -l.kappa());
            assert_eq!(l.kappa() % 2, 0);
        }
    }

    #[test]
    fn hooks_match_weight_formula() {
        // Σ hooks = n(λ) + n(λ') + |λ|
        for l in enumerate(7) {
            let s: i64 = l.hooks().iter().map(|&h| h as i64).sum();
            assert_eq!(s, l.n() + l.conjugate().n() + l.weight() as i64);
        }
        assert_eq!(Partition::new([2, 1]).hooks(), vec![3, 1, 1]);
    }

    #[test]
    fn phi_examples() {
        let ctx = Context::new(1, 1, frac(1, 2)).unwrap();
        assert_eq!(phi(&ctx, 1, &Partition::empty(), 0), int(0));
        assert_eq!(phi(&ctx, 2, &Partition::empty(), 0), int(0));
        assert_eq!(phi(&ctx, 1, &Partition::empty(), 1), ctx.q());
        assert_eq!(phi(&ctx, 1, &Partition::new([1]), 0), ctx.q() - int(1));
    }

    proptest! {
        #[test]
        fn conjugate_is_involution(parts in proptest::collection::vec(1u32..8, 0..7)) {
            let mut p = parts;
            p.sort_unstable_by(|a, b| b.cmp(a));
            let l = Partition::new(p);
            prop_assert_eq!(l.conjugate().conjugate(), l.clone());
            prop_assert_eq!(l.conjugate().weight(), l.weight());
        }

        #[test]
        fn phi_ignores_padding(parts in proptest::collection::vec(1u32..5, 0..5), s in -2i64..=2, k in 1i64..=3) {
            let ctx = Context::new(1, 1, frac(1, 3)).unwrap();
            let mut p = parts;
            p.sort_unstable_by(|a, b| b.cmp(a));
            let l = Partition::new(p);
            prop_assert_eq!(phi_rows(&ctx, k, &l, s, l.len() + 5), phi(&ctx, k, &l, s));
            prop_assert_eq!(phi_rows(&ctx, -k, &l, s, l.len() + 5), phi(&ctx, -k, &l, s));
        }
    }
}
