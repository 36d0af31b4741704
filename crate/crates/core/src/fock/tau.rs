//! Generating operators g, g′ as factor pipelines, their tau functions, and
//! the end-to-end identities relating them to the partition functions.

use super::gamma::{Family, Kernel, SkewCache};
use super::{apply_j, diagonal_value, l0_eigen, w0_eigen, FockVector};
use crate::crystal::{prefactor_ratio, z_series, ModelKind};
use crate::error::{precondition, Result};
use crate::partitions::{enumerate, Partition};
use crate::report::{context_json, ApproxCheck, CheckReport, ExactCheck, Tolerance};
use crate::scalars::{int, pow, Approx, Context, Exact, Jet, Monomial, QSeries, Scalar, Symbol};
use num::{One, Zero};
use serde_json::json;
use std::collections::BTreeMap;

/// One factor of an operator product such as g.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    /// q^{sign·W₀/denom}.
    Framing { sign: i64, denom: i64 },
    /// Γ_− (`minus`) or Γ_+ of the given family at q^{−ρ}.
    Gamma { minus: bool, family: Family },
    /// c^{L₀}.
    Power(Exact),
    /// Q^{L₀}; the series variable is read off here.
    Junction,
}

fn pair(family: Family) -> [Factor; 2] {
    [Factor::Gamma { minus: true, family }, Factor::Gamma { minus: false, family }]
}

/// g (first model) or g′ (second model):
/// q^{W₀/2a} Γ_−Γ_+ P_1^{L₀} ⋯ P_{a−1}^{L₀} Γ_−Γ_+ Q^{L₀} Γ_−Γ_+ R_{b−1}^{L₀} ⋯ R_1^{L₀} Γ_−Γ_+ q^{±W₀/2b},
/// primed on the right of Q^{L₀} and with q^{−W₀/2b} for g′.
pub fn build_g(ctx: &Context, model: ModelKind) -> Vec<Factor> {
    let (a, b) = (ctx.a as i64, ctx.b as i64);
    let mut f = vec![Factor::Framing { sign: 1, denom: 2 * a }];
    for i in 1..a as usize {
        f.extend(pair(Family::Plain));
        f.push(Factor::Power(ctx.cap_p(i)));
    }
    f.extend(pair(Family::Plain));
    f.push(Factor::Junction);
    let right = if model == ModelKind::First { Family::Plain } else { Family::Primed };
    f.extend(pair(right));
    for j in (1..b as usize).rev() {
        f.push(Factor::Power(ctx.cap_r(j)));
        f.extend(pair(right));
    }
    let sign = if model == ModelKind::First { 1 } else { -1 };
    f.push(Factor::Framing { sign, denom: 2 * b });
    f
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Bra,
    Ket,
}

fn lowers(f: &Factor, side: Side) -> bool {
    matches!((f, side), (Factor::Gamma { minus: true, .. }, Side::Bra) | (Factor::Gamma { minus: false, .. }, Side::Ket))
}

/// Applies `factors` to a bra (left to right) or a ket (right to left),
/// keeping only what can reach weight ≤ `final_cap` at the end; raising steps
/// are truncated at `cutoff`, which is the only approximation.
fn apply_chain<S: Scalar>(
    ctx: &Context,
    cache: &mut SkewCache<S>,
    factors: &[Factor],
    side: Side,
    v: &FockVector<S>,
    final_cap: usize,
    cutoff: usize,
) -> FockVector<S> {
    let ops: Vec<&Factor> = match side {
        Side::Bra => factors.iter().collect(),
        Side::Ket => factors.iter().rev().collect(),
    };
    let mut caps = vec![0usize; ops.len()];
    let mut need = final_cap;
    for (i, f) in ops.iter().enumerate().rev() {
        caps[i] = need.min(cutoff);
        if lowers(f, side) {
            need = cutoff;
        }
    }
    let bits = ctx.precision_bits;
    let s = v.charge;
    let mut cur = v.clone();
    for (f, &cap) in ops.iter().zip(&caps) {
        cur = match f {
            Factor::Framing { sign, denom } => cur
                .truncate(cap)
                .diagonal(|l| S::from_exact(&ctx.qpow(sign * w0_eigen(l, s), *denom).expect("framing power"), bits)),
            Factor::Power(c) => cur.truncate(cap).diagonal(|l| S::from_exact(&pow(c, l0_eigen(l, s)), bits)),
            Factor::Gamma { family, .. } => {
                let kernel = Kernel::new(*family, false, int(1));
                if lowers(f, side) {
                    cache.lower(&kernel, &cur, cap)
                } else {
                    cache.raise(&kernel, &cur, cap)
                }
            }
            Factor::Junction => panic!("junction inside a half chain"),
        };
    }
    cur
}

type JetVector<S> = BTreeMap<Monomial, FockVector<S>>;

/// exp(Σ_i c_i·sym_i·J_{mode_i}) applied to a ket, expanded in the jet ring.
fn exp_currents<S: Scalar>(ctx: &Context, v: &FockVector<S>, terms: &[(i64, Symbol, Exact)], order: u32) -> JetVector<S> {
    let bits = ctx.precision_bits;
    let mut result: JetVector<S> = BTreeMap::new();
    result.insert(Monomial::one(), v.clone());
    let mut term = result.clone();
    for j in 1..=order {
        let mut next: JetVector<S> = BTreeMap::new();
        for (mono, vec) in &term {
            for (mode, sym, c) in terms {
                let m = mono.times(&Monomial::var(*sym));
                if m.degree() > order {
                    continue;
                }
                let w = apply_j(ctx, *mode, vec);
                let coef = S::from_exact(&(c / int(j as i64)), bits);
                next.entry(m).or_insert_with(|| FockVector::zero(v.charge)).axpy(&coef, &w);
            }
        }
        for (m, vec) in &next {
            result.entry(m.clone()).or_insert_with(|| FockVector::zero(v.charge)).axpy(&S::one(), vec);
        }
        term = next;
    }
    result
}

/// Σ_λ bra_λ ket_λ Q^{L₀(λ)} · e^{diag(λ)} over |λ| ≤ q_degree, with monomials multiplied.
fn junction<S: Scalar>(
    left: &JetVector<S>,
    right: &JetVector<S>,
    s: i64,
    qdeg: usize,
    order: u32,
    diag: impl Fn(&Partition) -> Jet<S>,
) -> QSeries<Jet<S>> {
    let mut coeffs = vec![Jet::constant(S::zero(), order); qdeg + 1];
    for (ml, l) in left {
        for (mr, r) in right {
            let m = ml.times(mr);
            if m.degree() > order {
                continue;
            }
            for (lambda, x) in &l.entries {
                let w = lambda.weight();
                if w > qdeg {
                    continue;
                }
                if let Some(y) = r.entries.get(lambda) {
                    let t = Jet::term(m.clone(), x.clone() * y, order) * &diag(lambda);
                    coeffs[w] = coeffs[w].clone() + &t;
                }
            }
        }
    }
    QSeries::new(coeffs, s * (s + 1) / 2, qdeg)
}

/// Time insertions of a tau function: `left` sets t_n = c·sym,
/// `right` sets t̄_n = c·sym.
#[derive(Clone, Debug, Default)]
pub struct Insertion {
    pub left: Vec<(usize, Symbol, Exact)>,
    pub right: Vec<(usize, Symbol, Exact)>,
}

/// ⟨s| exp(Σ t_n J_n) · factors · exp(−Σ t̄_n J_{−n}) |s⟩ as a Q-series with
/// jet coefficients, at Fock cutoff `cutoff`.
pub fn tau(
    ctx: &Context,
    factors: &[Factor],
    s: i64,
    ins: &Insertion,
    cutoff: usize,
    cache: &mut SkewCache<Approx>,
) -> Result<QSeries<Jet<Approx>>> {
    ctx.require_convergent("tau")?;
    let Some(j) = factors.iter().position(|f| *f == Factor::Junction) else {
        return precondition("tau", "pipeline has no Q^{L0} junction");
    };
    let order = ctx.jet_order;
    let qdeg = ctx.q_degree;
    // a bra times J_n is the ket J_{−n}
    let lt: Vec<(i64, Symbol, Exact)> = ins.left.iter().map(|(n, s, c)| (-(*n as i64), *s, c.clone())).collect();
    let rt: Vec<(i64, Symbol, Exact)> = ins.right.iter().map(|(n, s, c)| (-(*n as i64), *s, -c.clone())).collect();
    let vac = FockVector::<Approx>::vacuum(s);
    let left: JetVector<Approx> = exp_currents(ctx, &vac, &lt, order)
        .into_iter()
        .map(|(m, v)| (m, apply_chain(ctx, cache, &factors[..j], Side::Bra, &v, qdeg, cutoff)))
        .collect();
    let right: JetVector<Approx> = exp_currents(ctx, &vac, &rt, order)
        .into_iter()
        .map(|(m, v)| (m, apply_chain(ctx, cache, &factors[j + 1..], Side::Ket, &v, qdeg, cutoff)))
        .collect();
    Ok(junction(&left, &right, s, qdeg, order, |_| Jet::constant(Approx::one(), order)))
}

/// (−1)^{ak} ∏_i P_i^{−(a−i)k}: T_k = this · t_k.
pub fn t_coefficient(ctx: &Context, k: i64) -> Exact {
    let a = ctx.a as i64;
    let mut c = if (a * k) % 2 == 0 { int(1) } else { int(-1) };
    for i in 1..a {
        c *= pow(&ctx.cap_p(i as usize), -(a - i) * k);
    }
    c
}

/// ∏_j R_j^{−(b−j)k}, times (−1)^{bk} when `signed`.
pub fn tbar_coefficient(ctx: &Context, k: i64, signed: bool) -> Exact {
    let b = ctx.b as i64;
    let mut c = if signed && (b * k) % 2 != 0 { int(-1) } else { int(1) };
    for j in 1..b {
        c *= pow(&ctx.cap_r(j as usize), -(b - j) * k);
    }
    c
}

fn ratio_to_base<S: Scalar>(x: &QSeries<Jet<S>>) -> Result<QSeries<Jet<S>>> {
    let base = x.map(|j| j.constant_term()).inv()?;
    Ok(x.mul_by(&base, |j, c| j.scale(c)))
}

/// max over monomials of |lhs − rhs|, relative to max |lhs| at each Q-order.
fn jet_series_residual(lhs: &QSeries<Jet<Approx>>, rhs: &QSeries<Jet<Approx>>) -> (Approx, usize) {
    let mut worst = Approx::zero();
    let mut compared = 0;
    for (l, r) in lhs.coeffs.iter().zip(&rhs.coeffs) {
        let monos: std::collections::BTreeSet<&Monomial> = l.terms().map(|t| t.0).chain(r.terms().map(|t| t.0)).collect();
        let scale = l.terms().map(|t| t.1.abs()).fold(Approx::zero(), Approx::max);
        let scale = if scale.is_zero() { Approx::one() } else { scale };
        for m in monos {
            compared += 1;
            let d = (l.coeff(m) - &r.coeff(m)).abs() / &scale;
            worst = worst.max(d);
        }
    }
    (worst, compared)
}

/// Ratio-normalized tau identities: z(s,t)/z(s,0) = prefactor(t)·τ(s,T)/τ(s,0),
/// both ways for the first model (`which` = 1), the single way for the
/// second (`which` = 2), at each cutoff in `cutoffs`.
pub fn theorem_check(ctx: &Context, which: u8, s: i64, cutoffs: &[usize], tol: &Tolerance) -> Result<CheckReport> {
    ctx.require_convergent("theorem_check")?;
    let model = match which {
        1 => ModelKind::First,
        2 => ModelKind::Second,
        _ => return precondition("theorem_check", format!("theorem must be 1 or 2, got {which}")),
    };
    let bits = ctx.precision_bits;
    let n = ctx.normalized();
    let (a, b) = (ctx.a as usize, ctx.b as usize);
    let kmax = ctx.jet_symbols;
    let z = ratio_to_base(&z_series(&n, model, s).series)?;
    let lhs = z.map(|j| j.map(|c| Approx::from_exact(c, bits)));
    let pref = prefactor_ratio(&n, model, s).map(|c| Approx::from_exact(c, bits));

    let left: Vec<_> = (1..=kmax).map(|k| (a * k, Symbol::T(k as u16), t_coefficient(&n, k as i64))).collect();
    let ways: Vec<(&str, Insertion)> = match model {
        ModelKind::First => vec![
            ("left", Insertion { left, right: vec![] }),
            (
                "right",
                Insertion {
                    left: vec![],
                    right: (1..=kmax).map(|k| (b * k, Symbol::T(k as u16), -tbar_coefficient(&n, k as i64, true))).collect(),
                },
            ),
        ],
        ModelKind::Second => vec![(
            "both",
            Insertion {
                left,
                right: (1..=kmax).map(|k| (b * k, Symbol::TBar(k as u16), -tbar_coefficient(&n, k as i64, false))).collect(),
            },
        )],
    };
    let g = build_g(&n, model);
    let mut chk = ApproxCheck::new(
        format!("theorem{which}"),
        json!({ "context": context_json(ctx), "charge": s, "cutoffs": cutoffs, "ways": ways.iter().map(|w| w.0).collect::<Vec<_>>() }),
    );
    let mut cache = SkewCache::<Approx>::new(&n);
    for &d in cutoffs {
        let mut worst = Approx::zero();
        let mut compared = 0;
        for (_, ins) in &ways {
            let t = ratio_to_base(&tau(&n, &g, s, ins, d, &mut cache)?)?;
            let rhs = QSeries { coeffs: t.coeffs.iter().map(|c| c.clone() * &pref).collect(), offset: t.offset };
            let (r, c) = jet_series_residual(&lhs, &rhs);
            worst = worst.max(r);
            compared += c;
        }
        chk.record(d, worst, compared);
    }
    Ok(chk.finish(tol))
}

/// c_a J_{ak} g = c_b g J_{−bk} with c_a = (−1)^{ak}∏P_i^{−(a−i)k},
/// c_b = (−1)^{bk}∏R_j^{−(b−j)k}, on ⟨s,λ|·|s,μ⟩ for |λ|,|μ| ≤ `interior`,
/// coefficientwise in Q.
pub fn jg_gj_check(ctx: &Context, k: i64, charges: &[i64], interior: usize, cutoffs: &[usize], tol: &Tolerance) -> Result<CheckReport> {
    ctx.require_convergent("jg_gj_check")?;
    if k <= 0 {
        return precondition("jg_gj_check", format!("k must be positive, got {k}"));
    }
    let bits = ctx.precision_bits;
    let (a, b) = (ctx.a as i64, ctx.b as i64);
    let qdeg = ctx.q_degree;
    let ca = Approx::from_exact(&t_coefficient(ctx, k), bits);
    let cb = Approx::from_exact(&tbar_coefficient(ctx, k, true), bits);
    let g = build_g(ctx, ModelKind::First);
    let j = g.iter().position(|f| *f == Factor::Junction).unwrap();
    let states = enumerate(interior);
    let mut chk = ApproxCheck::new(
        format!("jgj[k={k}]"),
        json!({ "context": context_json(ctx), "k": k, "charges": charges, "interior": interior, "cutoffs": cutoffs }),
    );
    let mut cache = SkewCache::<Approx>::new(ctx);
    for &d in cutoffs {
        let mut worst = Approx::zero();
        let mut compared = 0;
        for &s in charges {
            let mut bra = |v: FockVector<Approx>| apply_chain(ctx, &mut cache, &g[..j], Side::Bra, &v, qdeg, d);
            let plain_bras: Vec<_> = states.iter().map(|l| bra(FockVector::basis(l.clone(), s))).collect();
            let j_bras: Vec<_> = states.iter().map(|l| bra(apply_j(ctx, -a * k, &FockVector::basis(l.clone(), s)))).collect();
            let mut ket = |v: FockVector<Approx>| apply_chain(ctx, &mut cache, &g[j + 1..], Side::Ket, &v, qdeg, d);
            let plain_kets: Vec<_> = states.iter().map(|m| ket(FockVector::basis(m.clone(), s))).collect();
            let j_kets: Vec<_> = states.iter().map(|m| ket(apply_j(ctx, -b * k, &FockVector::basis(m.clone(), s)))).collect();
            let graded = |x: &FockVector<Approx>, y: &FockVector<Approx>| {
                let mut out = vec![Approx::zero(); qdeg + 1];
                for (l, v) in &x.entries {
                    if l.weight() <= qdeg {
                        if let Some(w) = y.entries.get(l) {
                            out[l.weight()] = out[l.weight()].clone() + &(v.clone() * w);
                        }
                    }
                }
                out
            };
            let mut pairs = vec![];
            for li in 0..states.len() {
                for mi in 0..states.len() {
                    let lhs: Vec<Approx> = graded(&j_bras[li], &plain_kets[mi]).into_iter().map(|x| x * &ca).collect();
                    let rhs: Vec<Approx> = graded(&plain_bras[li], &j_kets[mi]).into_iter().map(|x| x * &cb).collect();
                    pairs.push((lhs, rhs));
                }
            }
            for m in 0..=qdeg {
                let scale = pairs.iter().map(|p| p.0[m].abs()).fold(Approx::zero(), Approx::max);
                let scale = if scale.is_zero() { Approx::one() } else { scale };
                for (lhs, rhs) in &pairs {
                    compared += 1;
                    worst = worst.max((lhs[m].clone() - &rhs[m]).abs() / &scale);
                }
            }
        }
        chk.record(d, worst, compared);
    }
    Ok(chk.finish(tol))
}

/// The fermionic expression with raising operators only,
/// ⟨s|Γ_+P_1^{L₀}Γ_+⋯P_{a−1}^{L₀}Γ_+ Q^{L₀} e^{H(t)[+H̄(t̄)]} Γ_−R_{b−1}^{L₀}⋯R_1^{L₀}Γ_−|s⟩
/// (Γ′_− for the second model), evaluated exactly and compared with
/// (p_1 r_1)^{s(s+1)/2} z(s,t) at normalized parameters.
pub fn fermionic_check(ctx: &Context, model: ModelKind, s: i64) -> CheckReport {
    let n = ctx.normalized();
    let (a, b) = (n.a as usize, n.b as usize);
    let order = n.jet_order;
    let qdeg = n.q_degree;
    let mut left = vec![];
    for i in 1..a {
        left.push(Factor::Gamma { minus: false, family: Family::Plain });
        left.push(Factor::Power(n.cap_p(i)));
    }
    left.push(Factor::Gamma { minus: false, family: Family::Plain });
    let fam = if model == ModelKind::First { Family::Plain } else { Family::Primed };
    let mut right = vec![Factor::Gamma { minus: true, family: fam }];
    for j in (1..b).rev() {
        right.push(Factor::Power(n.cap_r(j)));
        right.push(Factor::Gamma { minus: true, family: fam });
    }
    let mut cache = SkewCache::<Exact>::new(&n);
    let vac = FockVector::<Exact>::vacuum(s);
    let bra = apply_chain(&n, &mut cache, &left, Side::Bra, &vac, qdeg, qdeg);
    let ket = apply_chain(&n, &mut cache, &right, Side::Ket, &vac, qdeg, qdeg);
    let mut lj = BTreeMap::new();
    lj.insert(Monomial::one(), bra);
    let mut rj = BTreeMap::new();
    rj.insert(Monomial::one(), ket);
    let potential = |l: &Partition| {
        let mut parts = vec![];
        for k in 1..=n.jet_symbols as i64 {
            parts.push((Symbol::T(k as u16), diagonal_value(l, s, |x| n.qi(k * x))));
            if model == ModelKind::Second {
                parts.push((Symbol::TBar(k as u16), diagonal_value(l, s, |x| n.qi(-k * x))));
            }
        }
        Jet::linear(parts, order).exp().expect("no constant term")
    };
    let fermionic = junction(&lj, &rj, s, qdeg, order, potential);
    let z = z_series(&n, model, s);
    let factor = pow(&(n.p[0].clone() * &n.r[0]), s * (s + 1) / 2);
    let mut chk = ExactCheck::new(
        format!("fermionic/{}", model.name()),
        json!({ "context": context_json(ctx), "model": model.name(), "charge": s, "factor": "(p1 r1)^(s(s+1)/2) at p_a = r_b = 1" }),
    );
    chk.assert(fermionic.offset == z.series.offset, || "Q offsets differ".into());
    for m in 0..=qdeg {
        let f = &fermionic.coeffs[m];
        let zz = z.series.coeffs[m].scale(&factor);
        let monos: std::collections::BTreeSet<Monomial> = f.terms().map(|t| t.0.clone()).chain(zz.terms().map(|t| t.0.clone())).collect();
        for mono in monos {
            chk.compare(&f.coeff(&mono), &zz.coeff(&mono), || format!("Q^{m} {mono}"));
        }
    }
    chk.finish()
}
