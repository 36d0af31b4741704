//! The generating matrices U, U′ evaluated numerically, and the constants
//! that appear when Γ_+ and Γ_− trade places in Fock space.

use super::band::BandMatrix;
use super::lax::gamma_toeplitz_in;
use crate::crystal::{macmahon, ModelKind};
use crate::error::{precondition, Result};
use crate::fock::{Family, FockVector, Kernel, SkewCache};
use crate::partitions::enumerate;
use crate::report::{context_json, ApproxCheck, CheckReport, Tolerance};
use crate::scalars::{format_exact, int, pow, Approx, Context, Exact};
use num::{One, Signed, Zero};
use serde_json::json;

/// One factor of a matrix product, acting on vectors over an extended range.
enum Factor {
    /// Entries at sites lo, lo+1, … of the extended range.
    Diagonal(Vec<Approx>),
    /// Σ_j c_j Λ^{−j} (`lower`) or Σ_j c_j Λ^j.
    Toeplitz { coeffs: Vec<Approx>, lower: bool },
}

fn toeplitz(ctx: &Context, minus: bool, kernel: Kernel, len: usize) -> Factor {
    Factor::Toeplitz { coeffs: gamma_toeplitz_in(ctx, &kernel, len), lower: minus }
}

/// Sites of the extended range.
#[derive(Clone, Copy)]
struct Range {
    lo: i64,
    len: usize,
}

impl Range {
    fn sites(self) -> impl Iterator<Item = i64> {
        self.lo..self.lo + self.len as i64
    }
}

/// q^{num·n²/den}, via powers of the uniformizer.
fn qdiag(ctx: &Context, range: Range, num: i64, den: i64) -> Factor {
    let u = Approx::from_exact(&ctx.u, ctx.precision_bits);
    Factor::Diagonal(range.sites().map(|n| u.powi(ctx.u_exponent(num * n * n, den).expect("denominator divides 2ab"))).collect())
}

/// x^n.
fn pdiag(ctx: &Context, range: Range, x: &Exact) -> Factor {
    let x = Approx::from_exact(x, ctx.precision_bits);
    Factor::Diagonal(range.sites().map(|n| x.powi(n)).collect())
}

/// Applies the product (leftmost factor first in `factors`) to a vector
/// indexed by sites lo..=hi; sums over sites outside are dropped.
fn apply(factors: &[Factor], v: &mut Vec<Approx>) {
    let len = v.len();
    for f in factors.iter().rev() {
        match f {
            Factor::Diagonal(d) => {
                for (x, y) in v.iter_mut().zip(d) {
                    if !x.is_zero() {
                        *x = x.clone() * y;
                    }
                }
            }
            Factor::Toeplitz { coeffs, lower } => {
                let mut out = vec![Approx::zero(); len];
                for (k, x) in v.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    // column k of Λ^{∓j}: rows k + j (lower) or k − j (upper)
                    let rows: Box<dyn Iterator<Item = (usize, usize)>> = if *lower {
                        Box::new((k..len).map(move |m| (m, m - k)))
                    } else {
                        Box::new((0..=k).map(move |m| (m, k - m)))
                    };
                    for (m, j) in rows {
                        if j < coeffs.len() {
                            out[m] = out[m].clone() + &(coeffs[j].clone() * x);
                        }
                    }
                }
                *v = out;
            }
        }
    }
}

fn right_family(model: ModelKind) -> Family {
    if model == ModelKind::First {
        Family::Plain
    } else {
        Family::Primed
    }
}

fn u_factors(ctx: &Context, model: ModelKind, range: Range, with_gammas: bool) -> Vec<Factor> {
    let (a, b) = (ctx.a as i64, ctx.b as i64);
    let len = range.len;
    let mut f = vec![qdiag(ctx, range, 1, 2 * a)];
    let pair = |f: &mut Vec<Factor>, family| {
        if with_gammas {
            f.push(toeplitz(ctx, true, Kernel::new(family, false, int(1)), len));
            f.push(toeplitz(ctx, false, Kernel::new(family, false, int(1)), len));
        }
    };
    for i in 1..a as usize {
        pair(&mut f, Family::Plain);
        f.push(pdiag(ctx, range, &ctx.cap_p(i)));
    }
    pair(&mut f, Family::Plain);
    f.push(pdiag(ctx, range, &ctx.q0));
    let fam = right_family(model);
    pair(&mut f, fam);
    for j in (1..b as usize).rev() {
        f.push(pdiag(ctx, range, &ctx.cap_r(j)));
        pair(&mut f, fam);
    }
    let sign = if model == ModelKind::First { 1 } else { -1 };
    f.push(qdiag(ctx, range, sign, 2 * b));
    f
}

/// W₍₀₎^{−1} W̄₍₀₎ as a factor list.
fn dressing_factors(ctx: &Context, model: ModelKind, range: Range) -> Vec<Factor> {
    let (a, b) = (ctx.a as i64, ctx.b as i64);
    let len = range.len;
    let n = (a + b) as usize;
    let family = |k: usize| if k > a as usize { right_family(model) } else { Family::Plain };
    let mut f = vec![qdiag(ctx, range, 1, 2 * a)];
    for k in 1..=n {
        f.push(toeplitz(ctx, true, Kernel::new(family(k), false, ctx.cap_q(k)), len));
    }
    f.push(qdiag(ctx, range, -1, 2 * a));
    f.push(qdiag(ctx, range, 1, 2 * a));
    for k in 1..=n {
        f.push(toeplitz(ctx, false, Kernel::new(family(k), false, int(1) / ctx.cap_q(k)), len));
    }
    f.push(pdiag(ctx, range, &ctx.middle_monomial()));
    let sign = if model == ModelKind::First { 1 } else { -1 };
    f.push(qdiag(ctx, range, sign, 2 * b));
    f
}

/// |Q^{(k)}|^{±1} q^{1/2} < 1 for all k: every Γ-series inside U converges.
fn require_convergent_u(ctx: &Context) -> Result<()> {
    ctx.require_convergent("build_u")?;
    let half = ctx.qpow(1, 2)?;
    for k in 1..=(ctx.a + ctx.b) as usize {
        let qk = ctx.cap_q(k);
        if qk.is_zero() || (qk.clone() * &half).abs() >= int(1) || (half.clone() / &qk).abs() >= int(1) {
            return precondition("build_u", format!("Q^({k}) = {} puts a Γ-series outside its convergence domain", format_exact(&qk)));
        }
    }
    Ok(())
}

fn evaluate(ctx: &Context, factors: impl Fn(Range) -> Vec<Factor>, tail_cutoff: usize) -> BandMatrix<Approx> {
    let (lo, hi) = ctx.window;
    let t = tail_cutoff as i64;
    let (elo, ehi) = (lo - t, hi + t);
    let len = (ehi - elo + 1) as usize;
    let fs = factors(Range { lo: elo, len });
    let size = (hi - lo + 1) as usize;
    let mut dense = vec![vec![Approx::zero(); size]; size];
    for n in lo..=hi {
        let mut v = vec![Approx::zero(); len];
        v[(n - elo) as usize] = Approx::one();
        apply(&fs, &mut v);
        for m in lo..=hi {
            dense[(m - lo) as usize][(n - lo) as usize] = v[(m - elo) as usize].clone();
        }
    }
    let mut out = BandMatrix::zero(ctx.window);
    for j in -(size as i64 - 1)..size as i64 {
        let d: Vec<Approx> = (lo..=hi)
            .map(|m| if (lo..=hi).contains(&(m + j)) { dense[(m - lo) as usize][(m + j - lo) as usize].clone() } else { Approx::zero() })
            .collect();
        if d.iter().any(|x| !x.is_zero()) {
            out.diagonals.insert(j, d);
        }
    }
    out.infinite_below = true;
    out.infinite_above = true;
    out
}

/// U (first model) or U′ on `ctx.window`, with every inner sum over lattice
/// sites cut `tail_cutoff` sites beyond the window.
pub fn build_u(ctx: &Context, model: ModelKind, tail_cutoff: usize) -> Result<BandMatrix<Approx>> {
    require_convergent_u(ctx)?;
    Ok(evaluate(ctx, |range| u_factors(ctx, model, range, true), tail_cutoff))
}

/// Interior residual of U − W₍₀₎^{−1}W̄₍₀₎ at each tail cutoff. Entries are
/// divided by the outer diagonal scales q^{m²/2a} and (P⋯Q₀R⋯)^n q^{±n²/2b},
/// which otherwise span hundreds of orders of magnitude across the window.
pub fn ufactor_check(ctx: &Context, model: ModelKind, cutoffs: &[usize], tol: &Tolerance) -> Result<CheckReport> {
    require_convergent_u(ctx)?;
    let (a, b) = (ctx.a as i64, ctx.b as i64);
    let bits = ctx.precision_bits;
    let sign = if model == ModelKind::First { 1 } else { -1 };
    let mid = ctx.middle_monomial();
    let scale = |m: i64, n: i64| {
        let s = ctx.qpow(m * m, 2 * a).unwrap() * pow(&mid, n) * ctx.qpow(sign * n * n, 2 * b).unwrap();
        Approx::from_exact(&s.abs(), bits)
    };
    let mut chk = ApproxCheck::new(
        format!("ufactor/{}", model.name()),
        json!({ "context": context_json(ctx), "model": model.name(), "tail_cutoffs": cutoffs }),
    );
    let (lo, hi) = ctx.window;
    for &t in cutoffs {
        let u = evaluate(ctx, |range| u_factors(ctx, model, range, true), t);
        let v = evaluate(ctx, |range| dressing_factors(ctx, model, range), t);
        let mut worst = Approx::zero();
        for m in lo..=hi {
            for n in lo..=hi {
                let r = (u.get(m, n) - &v.get(m, n)).abs() / &scale(m, n);
                worst = worst.max(r);
            }
        }
        chk.record(t, worst, ((hi - lo + 1) * (hi - lo + 1)) as usize);
    }
    Ok(chk.finish(tol))
}

/// The Fock-space exchange constants for Γ-operators at x·q^{−ρ}, y·q^{−ρ}:
/// plain: Γ_+(x) Γ_−(y)^{−1} = M(xy, q)^{−1} Γ_−(y)^{−1} Γ_+(x);
/// primed: Γ′_−(x)^{−1} Γ′_+(y) = M(xy, q) Γ′_+(y) Γ′_−(x)^{−1}.
/// Compared on ⟨λ|·|μ⟩ for |λ|, |μ| ≤ `interior`, with the infinite side cut
/// at weight D for each D in `cutoffs`.
pub fn gamma_commutation_check(
    ctx: &Context,
    family: Family,
    x: &Exact,
    y: &Exact,
    interior: usize,
    cutoffs: &[usize],
    tol: &Tolerance,
) -> Result<CheckReport> {
    let m = macmahon(ctx, &(x * y))?;
    let constant = match family {
        Family::Plain => Approx::one() / &m.value,
        Family::Primed => m.value.clone(),
    };
    let name = match family {
        Family::Plain => "gamma_cr/plain",
        Family::Primed => "gamma_cr/primed",
    };
    let mut chk = ApproxCheck::new(
        name,
        json!({
            "context": context_json(ctx),
            "x": format_exact(x),
            "y": format_exact(y),
            "interior": interior,
            "cutoffs": cutoffs,
            "constant": if family == Family::Plain { "1/M(xy,q)" } else { "M(xy,q)" },
        }),
    );
    let mut cache = SkewCache::<Approx>::new(ctx);
    let states = enumerate(interior);
    for &d in cutoffs {
        let mut worst = Approx::zero();
        let mut biggest = Approx::zero();
        let mut compared = 0;
        for mu in &states {
            let e = FockVector::<Approx>::basis(mu.clone(), 0);
            let (lhs, rhs) = match family {
                Family::Plain => {
                    let gm_inv = Kernel::new(Family::Plain, true, y.clone());
                    let gp = Kernel::new(Family::Plain, false, x.clone());
                    let raised = cache.raise(&gm_inv, &e, d);
                    let l = cache.lower(&gp, &raised, interior);
                    let lowered = cache.lower(&gp, &e, interior);
                    let r = cache.raise(&gm_inv, &lowered, interior);
                    (l, r)
                }
                Family::Primed => {
                    let gm_inv = Kernel::new(Family::Primed, true, x.clone());
                    let gp = Kernel::new(Family::Primed, false, y.clone());
                    let lowered = cache.lower(&gp, &e, interior);
                    let l = cache.raise(&gm_inv, &lowered, interior);
                    let raised = cache.raise(&gm_inv, &e, d);
                    let r = cache.lower(&gp, &raised, interior);
                    (l, r)
                }
            };
            for lambda in &states {
                let l = lhs.get(lambda);
                let r = rhs.get(lambda) * &constant;
                biggest = biggest.max(l.abs());
                worst = worst.max((l - &r).abs());
                compared += 1;
            }
        }
        let rel = if biggest.is_zero() { worst } else { worst / &biggest };
        chk.record(d, rel, compared);
    }
    Ok(chk.finish(tol))
}
