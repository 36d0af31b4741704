//! Shift symmetries of the quantum torus algebra, checked exactly on
//! interior matrix elements. Each side is evaluated column-locally (kets)
//! or row-locally (bras) so every sum is finite.

use super::gamma::{Family, Kernel, SkewCache};
use super::{apply_bilinear, w0_eigen, FockBasis, FockVector};
use crate::error::{precondition, Result};
use crate::partitions::Partition;
use crate::report::{context_json, CheckReport, ExactCheck};
use crate::scalars::{int, Context, Exact};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftKind {
    /// Γ_+(V^{(k)}_m − c δ_{m,0})Γ_+^{−1} = (−1)^k Γ_−^{−1}(V^{(k)}_{m+k} − c δ_{m+k,0})Γ_−, c = q^k/(1−q^k).
    I,
    /// Γ'_+(V^{(−k)}_m + c δ_{m,0})Γ'_+^{−1} = Γ'_−^{−1}(V^{(−k)}_{m+k} + c δ_{m+k,0})Γ'_−, c = 1/(1−q^k).
    Ii,
    /// q^{W₀/2}V^{(k)}_m q^{−W₀/2} = V^{(k−m)}_m.
    Iii,
    /// q^{W₀/2a}V^{(k)}_{ak}q^{−W₀/2a} = J_{ak}.
    FracA,
    /// q^{W₀/2b}V^{(−k)}_{−bk}q^{−W₀/2b} = J_{−bk}.
    FracB,
}

impl ShiftKind {
    pub const ALL: [ShiftKind; 5] = [ShiftKind::I, ShiftKind::Ii, ShiftKind::Iii, ShiftKind::FracA, ShiftKind::FracB];

    pub fn name(self) -> &'static str {
        match self {
            ShiftKind::I => "i",
            ShiftKind::Ii => "ii",
            ShiftKind::Iii => "iii",
            ShiftKind::FracA => "frac_a",
            ShiftKind::FracB => "frac_b",
        }
    }
}

/// Smallest margin for which both sides of the identity stay in the basis.
pub fn required_margin(kind: ShiftKind, k: i64, m: i64) -> usize {
    match kind {
        ShiftKind::I | ShiftKind::Ii => m.unsigned_abs().max((m + k).unsigned_abs()) as usize,
        ShiftKind::Iii => m.unsigned_abs() as usize,
        ShiftKind::FracA | ShiftKind::FracB => 0,
    }
}

/// `m` is ignored by the fractional kinds, whose mode index is fixed by k.
pub fn shift_symmetry_check(ctx: &Context, kind: ShiftKind, charge: i64, k: i64, m: i64, margin: usize) -> Result<CheckReport> {
    let d = ctx.fock_cutoff;
    let need = required_margin(kind, k, m);
    if margin < need || margin > d {
        return precondition("shift_symmetry_check", format!("margin {margin} must lie in [{need}, D={d}]"));
    }
    if matches!(kind, ShiftKind::I | ShiftKind::Ii) && k <= 0 {
        return precondition("shift_symmetry_check", format!("kinds i/ii need k > 0, got {k}"));
    }
    let interior = d - margin;
    let basis = FockBasis::new(charge, interior);
    let mut chk = ExactCheck::new(
        format!("shift/{}[k={k},m={m}]", kind.name()),
        json!({ "context": context_json(ctx), "kind": kind.name(), "charge": charge, "k": k, "m": m, "margin": margin }),
    );
    match kind {
        ShiftKind::I | ShiftKind::Ii => conjugation_sides(ctx, kind, &basis, k, m, &mut chk),
        _ => framing_sides(ctx, kind, &basis, k, m, &mut chk),
    }
    Ok(chk.finish())
}

fn conjugation_sides(ctx: &Context, kind: ShiftKind, basis: &FockBasis, k: i64, m: i64, chk: &mut ExactCheck) {
    let s = basis.charge;
    let interior = basis.cutoff;
    let (family, level, c, sign) = match kind {
        ShiftKind::I => {
            let c = -(ctx.qi(k) / ctx.one_minus_qk(k));
            (Family::Plain, k, c, if k % 2 == 0 { int(1) } else { int(-1) })
        }
        _ => (Family::Primed, -k, int(1) / ctx.one_minus_qk(k), int(1)),
    };
    let gamma = Kernel::new(family, false, int(1));
    let gamma_inv = gamma.clone().inv();
    let mut cache = SkewCache::<Exact>::new(ctx);
    // X_m := V^{(level)}_m + c δ_{m,0}, on kets; the bra action uses m → −m
    let shifted = |v: &FockVector<Exact>, mode: i64| {
        let mut w = apply_bilinear(ctx, level, mode, v);
        if mode == 0 {
            w.axpy(&c, v);
        }
        w
    };
    let shifted_bra = |v: &FockVector<Exact>, mode: i64| {
        let mut w = apply_bilinear(ctx, level, -mode, v);
        if mode == 0 {
            w.axpy(&c, v);
        }
        w
    };
    let lhs: Vec<FockVector<Exact>> = basis
        .states
        .iter()
        .map(|mu| {
            let e = FockVector::basis(mu.clone(), s);
            let v1 = cache.lower(&gamma_inv, &e, mu.weight());
            let v2 = shifted(&v1, m);
            cache.lower(&gamma, &v2, interior)
        })
        .collect();
    for lambda in &basis.states {
        let e = FockVector::basis(lambda.clone(), s);
        let b1 = cache.lower(&gamma_inv, &e, lambda.weight());
        let b2 = shifted_bra(&b1, m + k);
        let b3 = cache.lower(&gamma, &b2, interior).scale(&sign);
        for (j, mu) in basis.states.iter().enumerate() {
            chk.compare(&lhs[j].get(lambda), &b3.get(mu), || format!("s={s} ⟨{lambda}|·|{mu}⟩"));
        }
    }
}

fn framing_sides(ctx: &Context, kind: ShiftKind, basis: &FockBasis, k: i64, m: i64, chk: &mut ExactCheck) {
    let s = basis.charge;
    let (a, b) = (ctx.a as i64, ctx.b as i64);
    // (level, mode, framing denominator, right-hand level)
    let (level, mode, denom, rhs_level) = match kind {
        ShiftKind::Iii => (k, m, 2, k - m),
        ShiftKind::FracA => (k, a * k, 2 * a, 0),
        _ => (-k, -b * k, 2 * b, 0),
    };
    for mu in &basis.states {
        let e = FockVector::<Exact>::basis(mu.clone(), s);
        let wmu = w0_eigen(mu, s);
        let lhs = apply_bilinear(ctx, level, mode, &e)
            .diagonal(|l: &Partition| ctx.qpow(w0_eigen(l, s) - wmu, denom).expect("denominator divides 2ab"));
        let rhs = apply_bilinear(ctx, rhs_level, mode, &e);
        let mut rows: Vec<&Partition> = lhs.entries.keys().chain(rhs.entries.keys()).collect();
        rows.sort();
        rows.dedup();
        for l in rows {
            chk.compare(&lhs.get(l), &rhs.get(l), || format!("s={s} ⟨{l}|·|{mu}⟩"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::frac;

    fn ctx(a: u32, b: u32, d: usize) -> Context {
        let mut c = Context::new(a, b, frac(1, 2)).unwrap();
        c.fock_cutoff = d;
        c
    }

    #[test]
    fn framing_examples() {
        let c = ctx(1, 1, 8);
        let r = shift_symmetry_check(&c, ShiftKind::Iii, 0, 1, 1, 2).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let c = ctx(2, 1, 8);
        let r = shift_symmetry_check(&c, ShiftKind::FracA, 0, 1, 0, 2).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let r = shift_symmetry_check(&c, ShiftKind::FracB, 1, 2, 0, 2).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn conjugation_kinds_small() {
        let c = ctx(1, 1, 8);
        for (kind, k, m) in [(ShiftKind::I, 1, 0), (ShiftKind::I, 2, -1), (ShiftKind::Ii, 1, -1), (ShiftKind::Ii, 2, 1)] {
            let r = shift_symmetry_check(&c, kind, 0, k, m, 4).unwrap();
            assert!(r.passed(), "{kind:?} {k} {m}: {:?}", r.failures);
            assert!(r.compared > 100);
        }
    }

    #[test]
    fn preconditions() {
        let c = ctx(1, 1, 6);
        assert!(shift_symmetry_check(&c, ShiftKind::I, 0, 1, 3, 1).is_err());
        assert!(shift_symmetry_check(&c, ShiftKind::Ii, 0, 0, 0, 2).is_err());
        assert!(shift_symmetry_check(&c, ShiftKind::Iii, 0, 1, 1, 7).is_err());
    }
}
