//! Charged free fermions on truncated charge-s sectors: bilinears, vertex
//! operators, shift symmetries and tau functions of the generating operators.

pub mod gamma;
pub mod maya;
pub mod shift;
pub mod tau;

pub use gamma::{gamma, Family, GammaArg, Kernel, SkewCache};
pub use shift::{shift_symmetry_check, ShiftKind};
pub use tau::{build_g, fermionic_check, jg_gj_check, tau, theorem_check, Factor, Insertion};

use crate::error::{precondition, Result};
use crate::partitions::{enumerate, Partition};
use crate::report::{context_json, CheckReport, ExactCheck};
use crate::scalars::{int, Context, Exact, Scalar};
use num::Zero;
use serde_json::json;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// All |λ,s⟩ with |λ| ≤ cutoff, in `enumerate` order.
#[derive(Clone, Debug)]
pub struct FockBasis {
    pub charge: i64,
    pub cutoff: usize,
    pub states: Vec<Partition>,
    index: HashMap<Partition, usize>,
}

impl FockBasis {
    pub fn new(charge: i64, cutoff: usize) -> Arc<Self> {
        let states = enumerate(cutoff);
        let index = states.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Arc::new(FockBasis { charge, cutoff, states, index })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, lambda: &Partition) -> Option<usize> {
        self.index.get(lambda).copied()
    }
}

/// Finitely supported vector (ket or bra) in the charge-`charge` sector.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S> {
    pub charge: i64,
    pub entries: BTreeMap<Partition, S>,
}

impl<S: Scalar> FockVector<S> {
    pub fn zero(charge: i64) -> Self {
        FockVector { charge, entries: BTreeMap::new() }
    }

    pub fn basis(lambda: Partition, charge: i64) -> Self {
        let mut v = Self::zero(charge);
        v.entries.insert(lambda, S::one());
        v
    }

    pub fn vacuum(charge: i64) -> Self {
        Self::basis(Partition::empty(), charge)
    }

    pub fn get(&self, lambda: &Partition) -> S {
        self.entries.get(lambda).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_term(&mut self, lambda: Partition, c: S) {
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&lambda) {
            Some(v) => {
                *v = v.clone() + &c;
                if v.is_zero() {
                    self.entries.remove(&lambda);
                }
            }
            None => {
                self.entries.insert(lambda, c);
            }
        }
    }

    pub fn axpy(&mut self, c: &S, other: &Self) {
        for (l, v) in &other.entries {
            self.add_term(l.clone(), c.clone() * v);
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.charge);
        for (l, v) in &self.entries {
            out.add_term(l.clone(), v.clone() * c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(&-S::one(), other);
        out
    }

    /// Drops components of weight above `cap`.
    pub fn truncate(mut self, cap: usize) -> Self {
        self.entries.retain(|l, _| l.weight() <= cap);
        self
    }

    pub fn max_weight(&self) -> usize {
        self.entries.keys().map(Partition::weight).max().unwrap_or(0)
    }

    /// Multiplies each component by f(λ).
    pub fn diagonal(&self, f: impl Fn(&Partition) -> S) -> Self {
        let mut out = Self::zero(self.charge);
        for (l, v) in &self.entries {
            out.add_term(l.clone(), v.clone() * &f(l));
        }
        out
    }

    /// Σ_λ self_λ other_λ (bra · ket).
    pub fn pair(&self, other: &Self) -> S {
        let mut acc = S::zero();
        for (l, v) in &self.entries {
            if let Some(w) = other.entries.get(l) {
                acc = acc + &(v.clone() * w);
            }
        }
        acc
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FockVector<T> {
        let mut out = FockVector::zero(self.charge);
        for (l, v) in &self.entries {
            out.add_term(l.clone(), f(v));
        }
        out
    }
}

/// Value of Σ_n c(n):ψ_{−n}ψ*_n: on |λ,s⟩.
pub fn diagonal_value(lambda: &Partition, s: i64, c: impl Fn(i64) -> Exact) -> Exact {
    let mut acc = Exact::zero();
    maya::diagonal(lambda, s, c, |v, occupied| {
        if occupied {
            acc += v
        } else {
            acc -= v
        }
    });
    acc
}

/// q^{kn − km/2}, the coefficient of ψ_{m−n}ψ*_n in V^{(k)}_m.
fn torus_coefficient(ctx: &Context, k: i64, m: i64, n: i64) -> Exact {
    ctx.qpow(2 * k * n - k * m, 2).expect("2 divides 2ab")
}

/// V^{(k)}_m = q^{−km/2} Σ_n q^{kn} :ψ_{m−n}ψ*_n: applied to a ket.
/// Transposition gives the bra action: v·V^{(k)}_m = (V^{(k)}_{−m})ᵀ v.
pub fn apply_bilinear<S: Scalar>(ctx: &Context, k: i64, m: i64, v: &FockVector<S>) -> FockVector<S> {
    let bits = ctx.precision_bits;
    let s = v.charge;
    let mut out = FockVector::zero(s);
    for (l, c) in &v.entries {
        if m == 0 {
            let e = if k == 0 { int(s) } else { diagonal_value(l, s, |n| ctx.qi(k * n)) };
            out.add_term(l.clone(), c.clone() * &S::from_exact(&e, bits));
            continue;
        }
        for (n, sign, mu) in maya::moves(l, s, m) {
            let coef = if k == 0 { S::one() } else { S::from_exact(&torus_coefficient(ctx, k, m, n), bits) };
            let t = c.clone() * &coef;
            out.add_term(mu, if sign < 0 { -t } else { t });
        }
    }
    out
}

/// J_m = V^{(0)}_m.
pub fn apply_j<S: Scalar>(ctx: &Context, m: i64, v: &FockVector<S>) -> FockVector<S> {
    apply_bilinear(ctx, 0, m, v)
}

/// L₀ eigenvalue |λ| + s(s+1)/2.
pub fn l0_eigen(lambda: &Partition, s: i64) -> i64 {
    lambda.weight() as i64 + s * (s + 1) / 2
}

/// W₀ eigenvalue κ(λ) + (2s+1)|λ| + s(s+1)(2s+1)/6.
pub fn w0_eigen(lambda: &Partition, s: i64) -> i64 {
    lambda.kappa() + (2 * s + 1) * lambda.weight() as i64 + s * (s + 1) * (2 * s + 1) / 6
}

/// Sparse matrix on a truncated basis. Column μ holds ⟨λ|X|μ⟩ for λ in the
/// basis; contributions leaving the basis are dropped.
#[derive(Clone, Debug)]
pub struct FockOperator<S> {
    pub basis: Arc<FockBasis>,
    /// |row| = |column| − shift for homogeneous operators.
    pub degree_shift: Option<i64>,
    pub columns: Vec<BTreeMap<usize, S>>,
    pub exact: bool,
}

impl<S: Scalar> FockOperator<S> {
    pub fn from_action(basis: &Arc<FockBasis>, degree_shift: Option<i64>, f: impl Fn(&FockVector<S>) -> FockVector<S>) -> Self {
        let columns = basis
            .states
            .iter()
            .map(|mu| {
                let image = f(&FockVector::basis(mu.clone(), basis.charge));
                image.entries.into_iter().filter_map(|(l, c)| basis.index_of(&l).map(|i| (i, c))).collect()
            })
            .collect();
        FockOperator { basis: basis.clone(), degree_shift, columns, exact: S::EXACT }
    }

    pub fn entry(&self, row: &Partition, col: &Partition) -> S {
        match (self.basis.index_of(row), self.basis.index_of(col)) {
            (Some(i), Some(j)) => self.columns[j].get(&i).cloned().unwrap_or_else(S::zero),
            _ => S::zero(),
        }
    }

    /// Truncated product: sums only over intermediate states in the basis.
    pub fn mul(&self, other: &Self) -> Self {
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, S> = BTreeMap::new();
                for (k, b) in col {
                    for (i, a) in &self.columns[*k] {
                        let e = acc.entry(*i).or_insert_with(S::zero);
                        *e = e.clone() + &(a.clone() * b);
                    }
                }
                acc.retain(|_, v| !v.is_zero());
                acc
            })
            .collect();
        let degree_shift = match (self.degree_shift, other.degree_shift) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        FockOperator { basis: self.basis.clone(), degree_shift, columns, exact: self.exact && other.exact }
    }

    /// a·self + c·1.
    pub fn affine(&self, a: &S, c: &S) -> Self {
        self.combine(a, self, &S::zero(), c)
    }

    /// a·self + b·other + c·1.
    pub fn combine(&self, a: &S, other: &Self, b: &S, c: &S) -> Self {
        let columns = (0..self.columns.len())
            .map(|j| {
                let mut acc: BTreeMap<usize, S> = BTreeMap::new();
                for (i, v) in &self.columns[j] {
                    acc.insert(*i, v.clone() * a);
                }
                for (i, v) in &other.columns[j] {
                    let e = acc.entry(*i).or_insert_with(S::zero);
                    *e = e.clone() + &(v.clone() * b);
                }
                let e = acc.entry(j).or_insert_with(S::zero);
                *e = e.clone() + c;
                acc.retain(|_, v| !v.is_zero());
                acc
            })
            .collect();
        let degree_shift = if self.degree_shift == other.degree_shift { self.degree_shift } else { None };
        FockOperator { basis: self.basis.clone(), degree_shift, columns, exact: self.exact && other.exact }
    }
}

/// Matrix of V^{(k)}_m on the basis.
pub fn bilinear(ctx: &Context, basis: &Arc<FockBasis>, k: i64, m: i64) -> FockOperator<Exact> {
    FockOperator::from_action(basis, Some(m), |v| apply_bilinear(ctx, k, m, v))
}

/// Diagonal entries of J₀, L₀, W₀ and H_k from the Maya action against their
/// closed forms, for |λ| ≤ max_weight, |s| ≤ max_charge, 1 ≤ |k| ≤ max_k.
pub fn eigenvalue_check(ctx: &Context, max_weight: usize, max_charge: i64, max_k: i64) -> CheckReport {
    let mut chk = ExactCheck::new(
        "eigen",
        json!({ "context": context_json(ctx), "max_weight": max_weight, "max_charge": max_charge, "max_k": max_k }),
    );
    for s in -max_charge..=max_charge {
        for l in enumerate(max_weight) {
            let j0 = diagonal_value(&l, s, |_| int(1));
            chk.compare(&j0, &int(s), || format!("J0 λ={l} s={s}"));
            let l0 = diagonal_value(&l, s, int);
            chk.compare(&l0, &int(l0_eigen(&l, s)), || format!("L0 λ={l} s={s}"));
            let w0 = diagonal_value(&l, s, |n| int(n * n));
            chk.compare(&w0, &int(w0_eigen(&l, s)), || format!("W0 λ={l} s={s}"));
            for k in (-max_k..=max_k).filter(|&k| k != 0) {
                let h = diagonal_value(&l, s, |n| ctx.qi(k * n));
                let want = crate::partitions::phi(ctx, k, &l, s);
                chk.compare(&h, &want, || format!("H{k} λ={l} s={s}"));
            }
        }
    }
    chk.finish()
}

/// [V^{(k)}_m, V^{(l)}_n] against the quantum torus relation on matrix
/// elements between states of weight ≤ cutoff − margin.
pub fn commutator_check(ctx: &Context, charge: i64, k: i64, m: i64, l: i64, n: i64, margin: usize) -> Result<CheckReport> {
    let d = ctx.fock_cutoff;
    if margin < (m.unsigned_abs() + n.unsigned_abs()) as usize || margin > d {
        return precondition("commutator_check", format!("margin {margin} must lie in [|m|+|n|, D] = [{}, {d}]", m.abs() + n.abs()));
    }
    let basis = FockBasis::new(charge, d);
    let a = bilinear(ctx, &basis, k, m);
    let b = bilinear(ctx, &basis, l, n);
    let one = int(1);
    let lhs = a.mul(&b).combine(&one, &b.mul(&a), &-one.clone(), &Exact::zero());
    let delta = m + n == 0;
    let rhs = if k + l != 0 {
        let c = ctx.qpow(l * m - k * n, 2).unwrap() - ctx.qpow(k * n - l * m, 2).unwrap();
        let central = if delta { ctx.qi(k + l) / ctx.one_minus_qk(k + l) } else { Exact::zero() };
        let v = bilinear(ctx, &basis, k + l, m + n);
        v.affine(&c, &-(c.clone() * central))
    } else {
        // the k + l ≠ 0 coefficient at l = −k; the half-exponent is required
        let c = ctx.qpow(-k * (m + n), 2).unwrap() - ctx.qpow(k * (m + n), 2).unwrap();
        let v = bilinear(ctx, &basis, 0, m + n);
        v.affine(&c, &if delta { int(m) } else { Exact::zero() })
    };
    let mut chk = ExactCheck::new(
        format!("torus[{k},{m};{l},{n}]"),
        json!({ "context": context_json(ctx), "charge": charge, "k": k, "m": m, "l": l, "n": n, "margin": margin }),
    );
    let interior = d - margin;
    for row in basis.states.iter().filter(|p| p.weight() <= interior) {
        for col in basis.states.iter().filter(|p| p.weight() <= interior) {
            chk.compare(&lhs.entry(row, col), &rhs.entry(row, col), || format!("⟨{row}|·|{col}⟩"));
        }
    }
    Ok(chk.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::frac;

    fn ctx() -> Context {
        let mut c = Context::new(1, 1, frac(1, 2)).unwrap();
        c.fock_cutoff = 8;
        c
    }

    #[test]
    fn eigenvalues_match_closed_forms() {
        let c = Context::new(2, 1, frac(1, 3)).unwrap();
        let r = eigenvalue_check(&c, 6, 2, 3);
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn w0_examples() {
        // W₀ on |(1),0⟩: κ = 0 and (2s+1)|λ| = 1
        assert_eq!(w0_eigen(&Partition::new(vec![1]), 0), 1);
        assert_eq!(w0_eigen(&Partition::empty(), 1), 1);
        assert_eq!(diagonal_value(&Partition::empty(), -2, |n| int(n * n)), int(w0_eigen(&Partition::empty(), -2)));
    }

    #[test]
    fn j1_on_single_box() {
        let c = ctx();
        let v = apply_j(&c, 1, &FockVector::<Exact>::basis(Partition::new(vec![1]), 0));
        assert_eq!(v, FockVector::vacuum(0));
    }

    #[test]
    fn j_minus_k_adds_border_strips_with_height_sign() {
        let c = ctx();
        let v = apply_j(&c, -3, &FockVector::<Exact>::vacuum(0));
        assert_eq!(v.get(&Partition::new(vec![3])), int(1));
        assert_eq!(v.get(&Partition::new(vec![2, 1])), int(-1));
        assert_eq!(v.get(&Partition::new(vec![1, 1, 1])), int(1));
        assert_eq!(v.entries.len(), 3);
    }

    #[test]
    fn current_algebra() {
        let c = ctx();
        let r = commutator_check(&c, 0, 0, 1, 0, -1, 2).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let r = commutator_check(&c, 1, 0, 2, 0, -2, 4).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn h1_j1_commutator() {
        // [H_1, J_1] = (q^{−1/2} − q^{1/2}) V^{(1)}_1
        let c = ctx();
        let basis = FockBasis::new(0, 6);
        let h = bilinear(&c, &basis, 1, 0);
        let j = bilinear(&c, &basis, 0, 1);
        let one = int(1);
        let lhs = h.mul(&j).combine(&one, &j.mul(&h), &-one.clone(), &Exact::zero());
        let v = bilinear(&c, &basis, 1, 1);
        let coef = c.qpow(-1, 2).unwrap() - c.qpow(1, 2).unwrap();
        for row in &basis.states {
            for col in basis.states.iter().filter(|p| p.weight() <= 5) {
                assert_eq!(lhs.entry(row, col), v.entry(row, col) * &coef);
            }
        }
        assert!(commutator_check(&c, 0, 1, 0, 2, 0, 0).unwrap().passed());
    }

    #[test]
    fn torus_relations_small() {
        let c = ctx();
        for (k, m, l, n) in [(1, 1, -1, -1), (2, -1, 1, 1), (1, 2, -1, 0), (-1, 1, 2, -1)] {
            let r = commutator_check(&c, -1, k, m, l, n, 4).unwrap();
            assert!(r.passed(), "{k} {m} {l} {n}: {:?}", r.failures);
        }
        assert!(commutator_check(&c, 0, 1, 2, 1, 2, 3).is_err());
    }
}
