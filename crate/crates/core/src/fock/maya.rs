//! Maya-diagram encoding of |λ,s⟩ and the fermion-mode actions on it.
//!
//! |λ,s⟩ = ψ_{−x_1}ψ_{−x_2}⋯ with x_i = λ_i + s − i + 1, so ψ_{−x} "occupies
//! position x" and ψ*_x empties it. All signs come from reordering this
//! wedge; nothing else in the crate decides a fermionic sign.

use crate::partitions::Partition;

/// The first `n` occupied positions of |λ,s⟩, strictly decreasing; every
/// position below the last one is occupied as well.
pub fn positions(lambda: &Partition, s: i64, n: usize) -> Vec<i64> {
    (1..=n).map(|i| lambda.part(i) as i64 + s - i as i64 + 1).collect()
}

/// Inverse of [`positions`] for a decreasing list whose tail is the sea.
pub fn from_positions(xs: &[i64], s: i64) -> Partition {
    let parts: Vec<u32> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = x - s + i as i64;
            assert!(p >= 0, "position list {xs:?} is not a charge-{s} state");
            p as u32
        })
        .collect();
    Partition::new(parts)
}

fn explicit_len(lambda: &Partition, s: i64, reach: i64) -> usize {
    lambda.len() + s.unsigned_abs() as usize + reach.unsigned_abs() as usize + 2
}

/// ψ_{−x}|λ,s⟩ = sign·|μ,s+1⟩, or `None` when x is already occupied.
pub fn create(lambda: &Partition, s: i64, x: i64) -> Option<(i8, Partition)> {
    let n = explicit_len(lambda, s, x - s);
    let xs = positions(lambda, s, n);
    if x <= *xs.last().unwrap() || xs.contains(&x) {
        return None;
    }
    let above = xs.iter().filter(|&&y| y > x).count();
    let mut ys = xs;
    ys.insert(above, x);
    Some((if above % 2 == 0 { 1 } else { -1 }, from_positions(&ys, s + 1)))
}

/// ψ*_x|λ,s⟩ = sign·|μ,s−1⟩, or `None` when x is empty.
pub fn annihilate(lambda: &Partition, s: i64, x: i64) -> Option<(i8, Partition)> {
    let n = explicit_len(lambda, s, x - s);
    let mut xs = positions(lambda, s, n);
    let i = xs.iter().position(|&y| y == x)?;
    xs.remove(i);
    // the sea below the explicit window slides up by one slot
    let last = *xs.last().unwrap();
    xs.push(last - 1);
    Some((if i % 2 == 0 { 1 } else { -1 }, from_positions(&xs, s - 1)))
}

/// All nonzero results of Σ_n c(n) ψ_{m−n}ψ*_n on |λ,s⟩ for m ≠ 0, i.e. one
/// particle moved from n to n − m; yields (n, sign, result).
pub fn moves(lambda: &Partition, s: i64, m: i64) -> Vec<(i64, i8, Partition)> {
    assert!(m != 0, "diagonal bilinears are handled by `diagonal`");
    let n = explicit_len(lambda, s, m);
    let xs = positions(lambda, s, n);
    let floor = *xs.last().unwrap();
    let mut out = vec![];
    for (i, &x) in xs.iter().enumerate() {
        let y = x - m;
        if y <= floor || xs.contains(&y) {
            continue;
        }
        let (lo, hi) = if y < x { (y, x) } else { (x, y) };
        let between = xs.iter().filter(|&&z| z > lo && z < hi).count();
        let mut ys = xs.clone();
        ys.remove(i);
        let at = ys.iter().filter(|&&z| z > y).count();
        ys.insert(at, y);
        out.push((x, if between % 2 == 0 { 1 } else { -1 }, from_positions(&ys, s)));
    }
    out
}

/// Normal-ordered diagonal bilinear Σ_n c(n):ψ_{−n}ψ*_n: on |λ,s⟩:
/// Σ_{occupied n>0} c(n) − Σ_{empty n≤0} c(n).
pub fn diagonal<T>(lambda: &Partition, s: i64, mut c: impl FnMut(i64) -> T, mut add: impl FnMut(T, bool)) {
    let n = explicit_len(lambda, s, 0);
    let xs = positions(lambda, s, n);
    let floor = *xs.last().unwrap();
    debug_assert!(floor <= 0);
    for &x in xs.iter().filter(|&&x| x > 0) {
        add(c(x), true);
    }
    for y in floor..=0 {
        if !xs.contains(&y) {
            add(c(y), false);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate;
    use proptest::prelude::*;

    #[test]
    fn round_trip() {
        for l in enumerate(6) {
            for s in -2..=2 {
                let xs = positions(&l, s, l.len() + 3);
                assert_eq!(from_positions(&xs, s), l);
            }
        }
    }

    #[test]
    fn vacuum_positions() {
        assert_eq!(positions(&Partition::empty(), 0, 3), vec![0, -1, -2]);
        assert_eq!(positions(&Partition::new(vec![2, 1]), 1, 3), vec![3, 1, -1]);
    }

    #[test]
    fn single_box_annihilation_by_j1() {
        // J_1 moves a particle n+1 → n: (1),0 has positions 1,−1,… → 0,−1,…
        let m = moves(&Partition::new(vec![1]), 0, 1);
        assert_eq!(m, vec![(1, 1, Partition::empty())]);
    }

    #[test]
    fn bilinear_is_composition_of_modes() {
        // ψ_{m−n}ψ*_n = ψ_{−(n−m)}ψ*_n: annihilate then create.
        for l in enumerate(5) {
            for s in -1..=1 {
                for m in [-3i64, -1, 1, 2] {
                    let mut expect = vec![];
                    for x in -12..12 {
                        if let Some((s1, mid)) = annihilate(&l, s, x) {
                            if let Some((s2, out)) = create(&mid, s - 1, x - m) {
                                expect.push((x, s1 * s2, out));
                            }
                        }
                    }
                    let mut got = moves(&l, s, m);
                    got.sort_by_key(|t| t.0);
                    expect.sort_by_key(|t| t.0);
                    assert_eq!(got, expect, "λ={l} s={s} m={m}");
                }
            }
        }
    }

    #[test]
    fn charge_operator_is_s() {
        for l in enumerate(5) {
            for s in -3..=3 {
                let mut total = 0i64;
                diagonal(&l, s, |_| 1i64, |v, occ| total += if occ { v } else { -v });
                assert_eq!(total, s);
            }
        }
    }

    proptest! {
        #[test]
        fn exclusion(idx in 0usize..30, s in -2i64..=2, x in -8i64..8) {
            let all = enumerate(6);
            let l = &all[idx % all.len()];
            if let Some((_, once)) = create(l, s, x) {
                prop_assert!(create(&once, s + 1, x).is_none());
            }
            if let Some((_, once)) = annihilate(l, s, x) {
                prop_assert!(annihilate(&once, s - 1, x).is_none());
            }
        }

        #[test]
        fn anticommutation(idx in 0usize..30, s in -2i64..=2, x in -6i64..6, y in -6i64..6) {
            // ψ_{−x}ψ_{−y} = −ψ_{−y}ψ_{−x}
            prop_assume!(x != y);
            let all = enumerate(6);
            let l = &all[idx % all.len()];
            let xy = create(l, s, y).and_then(|(a, m)| create(&m, s + 1, x).map(|(b, r)| (a * b, r)));
            let yx = create(l, s, x).and_then(|(a, m)| create(&m, s + 1, y).map(|(b, r)| (a * b, r)));
            match (xy, yx) {
                (Some((a, r1)), Some((b, r2))) => { prop_assert_eq!(r1, r2); prop_assert_eq!(a, -b); }
                (None, None) => {}
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }
}
