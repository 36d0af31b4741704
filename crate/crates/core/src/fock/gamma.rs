//! Vertex operators Γ_±, Γ'_± and their inverses at c·q^{−ρ}, applied to
//! finitely supported vectors without ever forming an infinite sum.
//!
//! Every such operator is triangular: with "big ⊇ small",
//! ⟨big|X_−|small⟩ = ⟨small|X_+|big⟩ = K(big, small), where
//!
//! | operator        | K(λ, μ)                          |
//! |-----------------|----------------------------------|
//! | Γ_−             | c^d s_{λ/μ}(q^{−ρ})              |
//! | Γ_−^{−1}        | (−c)^d s_{ᵗλ/ᵗμ}(q^{−ρ})          |
//! | Γ'_−            | c^d s_{ᵗλ/ᵗμ}(q^{−ρ})             |
//! | Γ'_−^{−1}       | (−c)^d s_{λ/μ}(q^{−ρ})            |
//!
//! with d = |λ| − |μ|. Raising a ket (X_−) and raising a bra (·X_+) are the
//! same sum, as are the two lowering actions.

use super::{FockBasis, FockOperator, FockVector};
use crate::partitions::{enumerate, Partition};
use crate::scalars::{pow, Context, Exact, Scalar};
use crate::schur::skew_schur;
use num::{One, Zero};
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Plain,
    Primed,
}

/// Γ-type operator at c·q^{−ρ}, identified by its K(big, small).
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub family: Family,
    pub inverse: bool,
    pub scale: Exact,
}

impl Kernel {
    pub fn new(family: Family, inverse: bool, scale: Exact) -> Self {
        Kernel { family, inverse, scale }
    }

    pub fn plain() -> Self {
        Kernel::new(Family::Plain, false, Exact::one())
    }

    pub fn primed() -> Self {
        Kernel::new(Family::Primed, false, Exact::one())
    }

    pub fn inv(mut self) -> Self {
        self.inverse = !self.inverse;
        self
    }

    fn transposed(&self) -> bool {
        (self.family == Family::Primed) != self.inverse
    }
}

struct Column<S> {
    cap: usize,
    /// (λ, ᵗλ, s_{λ/μ}(q^{−ρ})) for λ ⊇ μ, graded order.
    entries: Vec<(Partition, Partition, S)>,
    index: HashMap<Partition, usize>,
}

/// Memoized skew values s_{λ/μ}(q^{−ρ}), one column per μ.
///
/// A column is filled by peeling a horizontal strip off the first variable:
/// s_{λ/μ}(q^{1/2}, q^{3/2}, …) = Σ_ν q^{|λ/ν|/2} q^{|ν/μ|} s_{ν/μ}(q^{1/2}, …),
/// where λ/ν runs over horizontal strips; the ν = λ term is moved to the left.
pub struct SkewCache<S> {
    half: Exact,
    bits: u32,
    half_powers: Vec<S>,
    columns: HashMap<Partition, Column<S>>,
    graded: Vec<Partition>,
}

impl<S: Scalar> SkewCache<S> {
    pub fn new(ctx: &Context) -> Self {
        SkewCache {
            half: ctx.qpow(1, 2).expect("2 divides 2ab"),
            bits: ctx.precision_bits,
            half_powers: vec![],
            columns: HashMap::new(),
            graded: vec![],
        }
    }

    fn half_power(&mut self, n: usize) -> S {
        while self.half_powers.len() <= n {
            let e = pow(&self.half, self.half_powers.len() as i64);
            self.half_powers.push(S::from_exact(&e, self.bits));
        }
        self.half_powers[n].clone()
    }

    fn graded_upto(&mut self, cap: usize) -> &[Partition] {
        if self.graded.last().map_or(true, |p| p.weight() < cap) || self.graded.is_empty() {
            self.graded = enumerate(cap);
        }
        let end = self.graded.partition_point(|p| p.weight() <= cap);
        &self.graded[..end]
    }

    fn column(&mut self, mu: &Partition, cap: usize) -> &Column<S> {
        if self.columns.get(mu).map_or(true, |c| c.cap < cap) {
            let col = self.build(mu, cap);
            self.columns.insert(mu.clone(), col);
        }
        &self.columns[mu]
    }

    fn build(&mut self, mu: &Partition, cap: usize) -> Column<S> {
        let wmu = mu.weight();
        for n in 0..=2 * cap {
            self.half_power(n);
        }
        let inv_den: Vec<S> = (0..=cap.saturating_sub(wmu))
            .map(|d| if d == 0 { S::zero() } else { S::one() / &(S::one() - &self.half_powers[2 * d]) })
            .collect();
        let lambdas: Vec<Partition> = self.graded_upto(cap).iter().filter(|l| l.contains(mu)).cloned().collect();
        let mut entries: Vec<(Partition, Partition, S)> = Vec::with_capacity(lambdas.len());
        let mut index: HashMap<Partition, usize> = HashMap::with_capacity(lambdas.len());
        let mut nu = vec![0u32; 0];
        for lambda in lambdas {
            let wl = lambda.weight();
            let value = if lambda == *mu {
                S::one()
            } else {
                let mut acc = S::zero();
                let parts = lambda.parts();
                nu.clear();
                nu.resize(parts.len(), 0);
                strips(parts, mu, 0, &mut nu, &mut |nu: &[u32]| {
                    let p = Partition::new(nu.to_vec());
                    let wn = p.weight();
                    if wn == wl {
                        return;
                    }
                    let t = &entries[index[&p]].2;
                    acc = acc.clone() + &(t.clone() * &self.half_powers[wl + wn - 2 * wmu]);
                });
                acc * &inv_den[wl - wmu]
            };
            index.insert(lambda.clone(), entries.len());
            let conj = lambda.conjugate();
            entries.push((lambda, conj, value));
        }
        Column { cap, entries, index }
    }

    /// s_{λ/μ}(q^{−ρ}), zero unless μ ⊆ λ.
    pub fn skew(&mut self, lambda: &Partition, mu: &Partition) -> S {
        let col = self.column(mu, lambda.weight());
        col.index.get(lambda).map(|&i| col.entries[i].2.clone()).unwrap_or_else(S::zero)
    }

    fn factors(&self, kernel: &Kernel, max_d: usize) -> Vec<S> {
        let c = if kernel.inverse { -kernel.scale.clone() } else { kernel.scale.clone() };
        let cs = S::from_exact(&c, self.bits);
        let mut out = vec![S::one()];
        for _ in 0..max_d {
            let last = out.last().unwrap().clone();
            out.push(last * &cs);
        }
        out
    }

    /// w_λ = Σ_{μ⊆λ} K(λ,μ) v_μ for |λ| ≤ cap: X_− on a ket, or a bra times X_+.
    pub fn raise(&mut self, kernel: &Kernel, v: &FockVector<S>, cap: usize) -> FockVector<S> {
        let f = self.factors(kernel, cap);
        let t = kernel.transposed();
        let mut out = FockVector::zero(v.charge);
        for (mu, c) in &v.entries {
            let wmu = mu.weight();
            if wmu > cap {
                continue;
            }
            let key = if t { mu.conjugate() } else { mu.clone() };
            let col = self.column(&key, cap);
            for (l, lc, val) in col.entries.iter().filter(|e| e.0.weight() <= cap) {
                let target = if t { lc } else { l };
                out.add_term(target.clone(), c.clone() * val * &f[l.weight() - wmu]);
            }
        }
        out
    }

    /// w_μ = Σ_{λ⊇μ} K(λ,μ) v_λ for |μ| ≤ cap: X_+ on a ket, or a bra times X_−.
    pub fn lower(&mut self, kernel: &Kernel, v: &FockVector<S>, cap: usize) -> FockVector<S> {
        let top = v.max_weight();
        let f = self.factors(kernel, top);
        let t = kernel.transposed();
        let outputs: Vec<Partition> = self.graded_upto(cap.min(top)).to_vec();
        let mut out = FockVector::zero(v.charge);
        for mu in outputs {
            let wmu = mu.weight();
            let key = if t { mu.conjugate() } else { mu.clone() };
            let col = self.column(&key, top);
            let mut acc = S::zero();
            for (l, c) in v.entries.iter().filter(|(l, _)| l.weight() >= wmu) {
                let probe = if t { l.conjugate() } else { l.clone() };
                if let Some(&i) = col.index.get(&probe) {
                    acc = acc + &(c.clone() * &col.entries[i].2 * &f[l.weight() - wmu]);
                }
            }
            out.add_term(mu, acc);
        }
        out
    }
}

/// Enumerates ν with λ/ν a horizontal strip and μ ⊆ ν.
fn strips(lambda: &[u32], mu: &Partition, i: usize, nu: &mut [u32], visit: &mut impl FnMut(&[u32])) {
    if i == lambda.len() {
        visit(nu);
        return;
    }
    let next = lambda.get(i + 1).copied().unwrap_or(0);
    let lo = next.max(mu.part(i + 1));
    for x in lo..=lambda[i] {
        nu[i] = x;
        strips(lambda, mu, i + 1, nu, visit);
    }
}

/// Argument of a vertex operator: a finite variable list or c·q^{−ρ}.
#[derive(Clone, Debug)]
pub enum GammaArg {
    Finite(Vec<Exact>),
    Principal(Exact),
}

/// Matrix of Γ_±(x) or Γ'_±(x) on the basis; `minus` selects Γ_−.
pub fn gamma(ctx: &Context, basis: &Arc<FockBasis>, minus: bool, primed: bool, x: &GammaArg) -> FockOperator<Exact> {
    let mut cache = SkewCache::<Exact>::new(ctx);
    let mut k = |big: &Partition, small: &Partition| -> Exact {
        if !big.contains(small) {
            return Exact::zero();
        }
        let (b, s) = if primed { (big.conjugate(), small.conjugate()) } else { (big.clone(), small.clone()) };
        match x {
            GammaArg::Finite(xs) => skew_schur(&b, &s, xs),
            GammaArg::Principal(c) => {
                let d = (big.weight() - small.weight()) as i64;
                cache.skew(&b, &s) * pow(c, d)
            }
        }
    };
    let columns = basis
        .states
        .iter()
        .map(|col| {
            basis
                .states
                .iter()
                .enumerate()
                .filter_map(|(i, row)| {
                    let v = if minus { k(row, col) } else { k(col, row) };
                    (!v.is_zero()).then_some((i, v))
                })
                .collect()
        })
        .collect();
    FockOperator { basis: basis.clone(), degree_shift: None, columns, exact: true }
}
