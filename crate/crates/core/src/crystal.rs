//! Partition functions of the two orbifold models, their deformations by
//! external potentials, and the closed product forms.

use crate::error::{precondition, Result};
use crate::partitions::{enumerate, phi, Partition};
use crate::report::{context_json, CheckReport, ExactCheck};
use crate::scalars::{frac, int, pow, Approx, Context, Exact, Jet, QSeries, Symbol};
use crate::schur::{powersum, principal_hook, SchurTable, Specialization};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Pairs s_λ(p-side) with s_λ(r-side).
    First,
    /// Pairs s_λ(p-side) with s_{ᵗλ}(r-side); also deformed by t̄.
    Second,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::First => "first",
            ModelKind::Second => "second",
        }
    }
}

/// Q-series with jet coefficients; the offset is s(s+1)/2.
#[derive(Clone, Debug, PartialEq)]
pub struct ZSeries {
    pub series: QSeries<Jet<Exact>>,
    pub charge: i64,
    pub model: ModelKind,
}

impl ZSeries {
    /// Jet-free part (all couplings set to zero).
    pub fn undeformed(&self) -> QSeries<Exact> {
        self.series.map(|j| j.constant_term())
    }

    /// Rows (Q-exponent, monomial, coefficient), Q-exponent ascending, zero
    /// coefficients omitted except for an all-zero Q-power.
    pub fn rows(&self) -> Vec<(i64, String, Exact)> {
        let mut out = vec![];
        for (m, jet) in self.series.coeffs.iter().enumerate() {
            let e = self.series.offset + m as i64;
            let before = out.len();
            for (mono, c) in jet.terms() {
                out.push((e, mono.to_string(), c.clone()));
            }
            if out.len() == before {
                out.push((e, "1".into(), Exact::zero()));
            }
        }
        out
    }
}

pub(crate) fn charge_offset(s: i64) -> i64 {
    s * (s + 1) / 2
}

fn specs(ctx: &Context) -> (Specialization, Specialization) {
    (Specialization::new(ctx.p.clone()), Specialization::new(ctx.r.clone()))
}

/// Σ_{|λ|≤q_degree} s_λ(p q^{−ρ}) s_{λ or ᵗλ}(r q^{−ρ}) Q^{|λ|+s(s+1)/2} e^{Φ(λ,s,t[,t̄])}.
pub fn z_series(ctx: &Context, model: ModelKind, s: i64) -> ZSeries {
    let deg = ctx.q_degree;
    let (ps, rs) = specs(ctx);
    let tp = SchurTable::new(ctx, &ps, deg);
    let tr = SchurTable::new(ctx, &rs, deg);
    let order = ctx.jet_order;
    let mut coeffs = vec![Jet::constant(Exact::zero(), order); deg + 1];
    for lambda in enumerate(deg) {
        let other = match model {
            ModelKind::First => lambda.clone(),
            ModelKind::Second => lambda.conjugate(),
        };
        let w = tp.get(&lambda) * tr.get(&other);
        if w.is_zero() {
            continue;
        }
        let deformation = potential_jet(ctx, model, &lambda, s).exp().expect("linear jet has no constant term");
        let m = lambda.weight();
        coeffs[m] = coeffs[m].clone() + &deformation.scale(&w);
    }
    ZSeries { series: QSeries::new(coeffs, charge_offset(s), deg), charge: s, model }
}

/// Σ_k t_k Φ_k(λ,s) [+ Σ_k t̄_k Φ_{−k}(λ,s)] over the active couplings.
pub fn potential_jet(ctx: &Context, model: ModelKind, lambda: &Partition, s: i64) -> Jet<Exact> {
    let order = ctx.jet_order;
    let mut parts = vec![];
    for k in 1..=ctx.jet_symbols {
        parts.push((Symbol::T(k as u16), phi(ctx, k as i64, lambda, s)));
        if model == ModelKind::Second {
            parts.push((Symbol::TBar(k as u16), phi(ctx, -(k as i64), lambda, s)));
        }
    }
    Jet::linear(parts, order)
}

/// Product form through the Cauchy identities:
/// exp(Σ_k c_k p_k(A)p_k(B)Q^k/k), c_k = 1 (first) or (−1)^{k−1} (second).
pub fn product_series(ctx: &Context, model: ModelKind) -> QSeries<Exact> {
    let deg = ctx.q_degree;
    let (ps, rs) = specs(ctx);
    let mut log = vec![Exact::zero(); deg + 1];
    for k in 1..=deg {
        let sign = if model == ModelKind::Second && k % 2 == 0 { -1 } else { 1 };
        log[k] = powersum(ctx, k, &ps) * powersum(ctx, k, &rs) * frac(sign, k as i64);
    }
    QSeries::new(log, 0, deg).exp().expect("zero constant term")
}

/// Value of a truncated MacMahon product together with a bound on the
/// relative error introduced by the truncation.
#[derive(Clone, Debug)]
pub struct MacMahon {
    pub value: Approx,
    pub tail_bound: Approx,
}

/// M(x, q) ≈ ∏_{n=1}^{tail_cutoff} (1 − x qⁿ)^{−n}.
pub fn macmahon(ctx: &Context, x: &Exact) -> Result<MacMahon> {
    ctx.require_convergent("macmahon")?;
    let q = ctx.q();
    if (x * &q).abs() >= int(1) {
        return precondition("macmahon", format!("|x q| = |{} · {}| must be < 1", x, q));
    }
    let bits = ctx.precision_bits;
    let qa = Approx::from_exact(&q, bits);
    let xa = Approx::from_exact(x, bits);
    let one = Approx::one();
    let mut qn = one.clone();
    let mut prod = one.clone();
    for n in 1..=ctx.tail_cutoff as i64 {
        qn = qn * &qa;
        let f = one.clone() - &(xa.clone() * &qn);
        prod = prod * &f.powi(n);
    }
    // Σ_{n>T} n|x||q|^n / (1 − |x q^{T+1}|) bounds |log M − log M_T|.
    let t = ctx.tail_cutoff as i64;
    let r = qa.abs();
    let rt1 = r.powi(t + 1);
    let tail = xa.abs() * &rt1 * &(Approx::from_exact(&int(t + 1), bits) - &(Approx::from_exact(&int(t), bits) * &r))
        / &((one.clone() - &r) * &(one.clone() - &r));
    let tail = tail / &(one.clone() - &(xa.abs() * &rt1));
    Ok(MacMahon { value: one / &prod, tail_bound: tail })
}

/// p_i = q^{(2i−1−a)/2a}, r_j = q^{(2j−1−b)/2b}.
pub fn two_q_preset(ctx: &Context) -> (Vec<Exact>, Vec<Exact>) {
    let (a, b) = (ctx.a as i64, ctx.b as i64);
    let p = (1..=a).map(|i| ctx.qpow(2 * i - 1 - a, 2 * a).expect("2a divides 2ab")).collect();
    let r = (1..=b).map(|j| ctx.qpow(2 * j - 1 - b, 2 * b).expect("2b divides 2ab")).collect();
    (p, r)
}

/// Σ_λ s_λ(q₁^{−ρ}) s_{λ or ᵗλ}(q₂^{−ρ}) Q^{|λ|} with q₁ = q^{1/a}, q₂ = q^{1/b},
/// evaluated by the hook formula.
pub fn two_q_direct(ctx: &Context, model: ModelKind) -> QSeries<Exact> {
    let half1 = ctx.qpow(1, 2 * ctx.a as i64).expect("2a divides 2ab");
    let half2 = ctx.qpow(1, 2 * ctx.b as i64).expect("2b divides 2ab");
    let mut c = vec![Exact::zero(); ctx.q_degree + 1];
    for l in enumerate(ctx.q_degree) {
        let other = if model == ModelKind::Second { l.conjugate() } else { l.clone() };
        c[l.weight()] += principal_hook(&l, &half1) * principal_hook(&other, &half2);
    }
    QSeries::new(c, 0, ctx.q_degree)
}

/// exp(Σ_k t_k q^k/(1−q^k) [− Σ_k t̄_k/(1−q^k)]): the coupling-dependent
/// part of the prefactor relating the partition function to the tau function.
pub fn prefactor_ratio(ctx: &Context, model: ModelKind, _s: i64) -> Jet<Exact> {
    let mut parts = vec![];
    for k in 1..=ctx.jet_symbols as i64 {
        let d = ctx.one_minus_qk(k);
        parts.push((Symbol::T(k as u16), ctx.qi(k) / &d));
        if model == ModelKind::Second {
            parts.push((Symbol::TBar(k as u16), -(int(1) / &d)));
        }
    }
    Jet::linear(parts, ctx.jet_order).exp().expect("linear jet")
}

/// Z(s) recomputed from normalized parameters p̂ = p/p_a, r̂ = r/r_b with
/// Q̂ = p_a r_b Q, including the overall factor (p_a r_b)^{−s(s+1)/2}.
pub fn z_series_via_normalized(ctx: &Context, model: ModelKind, s: i64) -> ZSeries {
    let norm = ctx.normalized();
    let c = ctx.p.last().unwrap() * ctx.r.last().unwrap();
    let mut z = z_series(&norm, model, s);
    // Q̂^{m+off} = c^{m+off} Q^{m+off}; the prefactor c^{−off} leaves c^m
    for (m, jet) in z.series.coeffs.iter_mut().enumerate() {
        *jet = jet.scale(&pow(&c, m as i64));
    }
    z
}

/// Product-form identity: z_series at s = 0 without couplings equals the
/// Cauchy product coefficientwise.
pub fn cauchy_check(ctx: &Context, model: ModelKind) -> CheckReport {
    let mut c0 = ctx.clone();
    c0.jet_order = 0;
    let z = z_series(&c0, model, 0).undeformed();
    let p = product_series(&c0, model);
    let mut chk = ExactCheck::new(format!("cauchy/{}", model.name()), json!({ "context": context_json(ctx), "model": model.name() }));
    for m in 0..=ctx.q_degree {
        chk.compare(&z.coeffs[m], &p.coeffs[m], || format!("Q^{m}"));
    }
    chk.finish()
}

/// Two-q reduction: preset parameters reproduce the hook-formula sum.
pub fn two_q_check(ctx: &Context, model: ModelKind) -> CheckReport {
    let (p, r) = two_q_preset(ctx);
    let mut c0 = ctx.clone();
    c0.p = p;
    c0.r = r;
    c0.jet_order = 0;
    let z = z_series(&c0, model, 0).undeformed();
    let d = two_q_direct(&c0, model);
    let mut chk = ExactCheck::new(format!("twoq/{}", model.name()), json!({ "context": context_json(&c0), "model": model.name() }));
    for m in 0..=ctx.q_degree {
        chk.compare(&z.coeffs[m], &d.coeffs[m], || format!("Q^{m}"));
    }
    chk.finish()
}

/// Convenience for callers that only want the Q¹ coefficient of the
/// undeformed a = b = 1 model: q/(1−q)².
pub fn single_box_weight(ctx: &Context) -> Exact {
    let q = ctx.q();
    let d = int(1) - &q;
    q / (d.clone() * d)
}

impl ZSeries {
    pub fn is_unit_at_origin(&self) -> bool {
        self.charge == 0 && self.series.coeffs[0].constant_term().is_one()
    }
}
