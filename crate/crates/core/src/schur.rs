//! Schur and skew-Schur values at principal-type specializations and at
//! finite variable lists.

use crate::partitions::Partition;
use crate::scalars::{int, pow, Context, Exact, Field};
use num::Zero;

/// Union of geometric sequences x·q^{−ρ} = (x q^{1/2}, x q^{3/2}, …) over the scales x.
#[derive(Clone, Debug, PartialEq)]
pub struct Specialization {
    pub scales: Vec<Exact>,
}

impl Specialization {
    pub fn new(scales: Vec<Exact>) -> Self {
        assert!(scales.iter().all(|x| !x.is_zero()), "specialization scales must be nonzero");
        Specialization { scales }
    }

    /// q^{−ρ} itself.
    pub fn principal() -> Self {
        Specialization { scales: vec![int(1)] }
    }

    pub fn scaled(&self, c: &Exact) -> Self {
        Specialization::new(self.scales.iter().map(|x| x * c).collect())
    }
}

/// h_0..h_{n_max} at the specialization, from the generating product
/// ∏_x Σ_n x^n q^{n/2} t^n / ∏_{m≤n}(1 − q^m).
pub fn h_values(ctx: &Context, spec: &Specialization, n_max: usize) -> Vec<Exact> {
    let mut base = vec![int(1)];
    let qh = ctx.upow(ctx.two_ab() / 2);
    for n in 1..=n_max {
        let prev = base[n - 1].clone();
        base.push(prev * &qh / ctx.one_minus_qk(n as i64));
    }
    let mut h = vec![Exact::zero(); n_max + 1];
    h[0] = int(1);
    for x in &spec.scales {
        let g: Vec<Exact> = base.iter().enumerate().map(|(n, c)| c * pow(x, n as i64)).collect();
        h = convolve(&h, &g);
    }
    h
}

/// h_0..h_{n_max} of a finite variable list.
pub fn h_values_finite(x: &[Exact], n_max: usize) -> Vec<Exact> {
    let mut h = vec![Exact::zero(); n_max + 1];
    h[0] = int(1);
    for xi in x {
        let g: Vec<Exact> = (0..=n_max).map(|n| pow(xi, n as i64)).collect();
        h = convolve(&h, &g);
    }
    h
}

fn convolve(a: &[Exact], b: &[Exact]) -> Vec<Exact> {
    (0..a.len()).map(|n| (0..=n).fold(Exact::zero(), |acc, k| acc + &a[k] * &b[n - k])).collect()
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn determinant<S: Field>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    if n == 0 {
        return S::one();
    }
    let mut sign = false;
    let mut prev = S::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = !sign;
                }
                None => return S::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].clone() * &m[k][k] - m[i][k].clone() * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// det(h_{λ_i − μ_j − i + j}) over a table of h-values (h_n = 0 for n < 0).
/// Zero unless μ ⊆ λ.
pub fn jacobi_trudi<S: Field>(lambda: &Partition, mu: &Partition, h: &[S]) -> S {
    if !lambda.contains(mu) {
        return S::zero();
    }
    let n = lambda.len();
    let m: Vec<Vec<S>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let idx = lambda.part(i) as i64 - mu.part(j) as i64 - i as i64 + j as i64;
                    if idx < 0 {
                        S::zero()
                    } else {
                        h[idx as usize].clone()
                    }
                })
                .collect()
        })
        .collect();
    determinant(m)
}

/// s_λ at a specialization via Jacobi–Trudi.
pub fn schur(ctx: &Context, lambda: &Partition, spec: &Specialization) -> Exact {
    let h = h_values(ctx, spec, lambda.weight());
    jacobi_trudi(lambda, &Partition::empty(), &h)
}

/// Evaluates many Schur values at one specialization, sharing the h-table.
pub struct SchurTable {
    h: Vec<Exact>,
}

impl SchurTable {
    pub fn new(ctx: &Context, spec: &Specialization, max_weight: usize) -> Self {
        SchurTable { h: h_values(ctx, spec, max_weight) }
    }

    pub fn skew(&self, lambda: &Partition, mu: &Partition) -> Exact {
        assert!(lambda.weight() < self.h.len(), "SchurTable built for smaller weights");
        jacobi_trudi(lambda, mu, &self.h)
    }

    pub fn get(&self, lambda: &Partition) -> Exact {
        self.skew(lambda, &Partition::empty())
    }
}

/// s_{λ/μ}(x) for a finite variable list.
pub fn skew_schur(lambda: &Partition, mu: &Partition, x: &[Exact]) -> Exact {
    let h = h_values_finite(x, lambda.weight());
    jacobi_trudi(lambda, mu, &h)
}

/// p_k = Σ_x x^k q^{k/2}/(1 − q^k).
pub fn powersum(ctx: &Context, k: usize, spec: &Specialization) -> Exact {
    assert!(k >= 1, "powersum: k must be positive");
    let k = k as i64;
    let factor = ctx.upow(ctx.two_ab() / 2 * k) / ctx.one_minus_qk(k);
    spec.scales.iter().fold(Exact::zero(), |acc, x| acc + pow(x, k) * &factor)
}

/// s_λ(t^{1/2}, t^{3/2}, …) by the hook formula t^{n(λ)+|λ|/2}/∏_□(1 − t^{h(□)}),
/// given `half` = t^{1/2}. Independent of the Jacobi–Trudi route.
pub fn principal_hook(lambda: &Partition, half: &Exact) -> Exact {
    let num = pow(half, 2 * lambda.n() + lambda.weight() as i64);
    lambda.hooks().iter().fold(num, |acc, &h| acc / (int(1) - pow(half, 2 * h as i64)))
}
