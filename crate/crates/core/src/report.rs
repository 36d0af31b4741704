//! Uniform check reports, serialized as versioned JSON.

use crate::scalars::{format_exact, Approx, Context, Exact};
use num::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: &str = "orbicrystal.report/1";

/// How many individual failures a report keeps verbatim.
const MAX_LISTED: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutoffResidual {
    pub cutoff: usize,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub schema: &'static str,
    pub check: String,
    pub parameters: Value,
    pub status: Status,
    pub exact: bool,
    pub max_residual: String,
    pub residuals_by_cutoff: Vec<CutoffResidual>,
    pub compared: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Context fields echoed into every report.
pub fn context_json(ctx: &Context) -> Value {
    let rs = |v: &[Exact]| v.iter().map(format_exact).collect::<Vec<_>>();
    json!({
        "a": ctx.a,
        "b": ctx.b,
        "u": format_exact(&ctx.u),
        "p": rs(&ctx.p),
        "r": rs(&ctx.r),
        "q0": format_exact(&ctx.q0),
        "q_degree": ctx.q_degree,
        "fock_cutoff": ctx.fock_cutoff,
        "jet_order": ctx.jet_order,
        "jet_symbols": ctx.jet_symbols,
        "precision_bits": ctx.precision_bits,
        "tail_cutoff": ctx.tail_cutoff,
        "window": [ctx.window.0, ctx.window.1],
    })
}

/// Accumulates exact comparisons; passes iff every pair is equal.
pub struct ExactCheck {
    name: String,
    parameters: Value,
    max: Exact,
    compared: usize,
    failures: Vec<String>,
    failed: usize,
}

impl ExactCheck {
    pub fn new(name: impl Into<String>, parameters: Value) -> Self {
        ExactCheck { name: name.into(), parameters, max: Exact::zero(), compared: 0, failures: vec![], failed: 0 }
    }

    pub fn compare(&mut self, lhs: &Exact, rhs: &Exact, location: impl FnOnce() -> String) -> bool {
        self.compared += 1;
        if lhs == rhs {
            return true;
        }
        let d = (lhs - rhs).abs();
        if d > self.max {
            self.max = d;
        }
        self.fail(format!("{}: lhs {} rhs {}", location(), format_exact(lhs), format_exact(rhs)));
        false
    }

    /// Records a structural failure that has no numeric residual.
    pub fn fail(&mut self, what: String) {
        self.failed += 1;
        if self.failures.len() < MAX_LISTED {
            self.failures.push(what);
        }
    }

    pub fn assert(&mut self, ok: bool, location: impl FnOnce() -> String) {
        self.compared += 1;
        if !ok {
            self.fail(location());
        }
    }

    pub fn finish(self) -> CheckReport {
        let status = if self.failed == 0 { Status::Pass } else { Status::Fail };
        let max_residual = if self.failed > 0 && self.max.is_zero() {
            "structural".to_string()
        } else {
            format_exact(&self.max)
        };
        CheckReport {
            schema: SCHEMA,
            check: self.name,
            parameters: self.parameters,
            status,
            exact: true,
            max_residual,
            residuals_by_cutoff: vec![],
            compared: self.compared,
            failures: self.failures,
        }
    }
}

/// Tolerance for approximate checks: an absolute bound plus a required
/// decay factor between successive cutoffs. Decay is not demanded once a
/// residual is already below `floor`, the working-precision noise level.
#[derive(Clone, Debug)]
pub struct Tolerance {
    pub bound: Approx,
    pub decay: Approx,
    pub floor: Approx,
}

impl Tolerance {
    /// residual < 10^(−bits/8) and residual(next) ≤ residual(prev)/10.
    pub fn default_for(precision_bits: u32) -> Self {
        let exp = -((precision_bits / 8) as i64);
        Tolerance::new(exp).with_floor(precision_bits)
    }

    /// residual < 10^exp and tenfold decay.
    pub fn new(exp10: i64) -> Self {
        let ten = Approx::from_exact(&crate::scalars::int(10), 64);
        Tolerance { bound: ten.powi(exp10), decay: ten.clone(), floor: ten.powi(-60) }
    }

    /// Sets the noise floor to 2^(−3·bits/4).
    pub fn with_floor(mut self, precision_bits: u32) -> Self {
        let two = Approx::from_exact(&crate::scalars::int(2), 64);
        self.floor = two.powi(-((3 * precision_bits / 4) as i64));
        self
    }
}

/// Residuals of an approximate check measured at several cutoffs.
pub struct ApproxCheck {
    name: String,
    parameters: Value,
    runs: Vec<(usize, Approx)>,
    compared: usize,
    failures: Vec<String>,
}

pub fn sci(x: &Approx) -> String {
    x.to_sci(6)
}

impl ApproxCheck {
    pub fn new(name: impl Into<String>, parameters: Value) -> Self {
        ApproxCheck { name: name.into(), parameters, runs: vec![], compared: 0, failures: vec![] }
    }

    pub fn record(&mut self, cutoff: usize, residual: Approx, compared: usize) {
        self.compared += compared;
        self.runs.push((cutoff, residual));
    }

    pub fn note_failure(&mut self, what: String) {
        if self.failures.len() < MAX_LISTED {
            self.failures.push(what);
        }
    }

    /// Final residual (largest cutoff) under the bound, and every step decays.
    pub fn finish(mut self, tol: &Tolerance) -> CheckReport {
        let mut ok = self.failures.is_empty() && !self.runs.is_empty();
        if let Some((c, last)) = self.runs.last() {
            if !(last < &tol.bound) {
                ok = false;
                self.failures.push(format!("residual {} at cutoff {c} not below {}", sci(last), sci(&tol.bound)));
            }
        }
        for w in self.runs.windows(2) {
            let (c0, r0) = &w[0];
            let (c1, r1) = &w[1];
            if r1.clone() * &tol.decay > *r0 && !r1.is_zero() && *r0 >= tol.floor {
                ok = false;
                self.failures.push(format!(
                    "residual {} at cutoff {c1} is not {}x below {} at cutoff {c0}",
                    sci(r1),
                    sci(&tol.decay),
                    sci(r0)
                ));
            }
        }
        CheckReport {
            schema: SCHEMA,
            check: self.name,
            parameters: self.parameters,
            status: if ok { Status::Pass } else { Status::Fail },
            exact: false,
            max_residual: self.runs.last().map(|(_, r)| sci(r)).unwrap_or_else(|| "n/a".into()),
            residuals_by_cutoff: self.runs.iter().map(|(c, r)| CutoffResidual { cutoff: *c, residual: sci(r) }).collect(),
            compared: self.compared,
            failures: self.failures,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{frac, int};

    #[test]
    fn exact_check_records_first_failures() {
        let mut c = ExactCheck::new("demo", json!({}));
        assert!(c.compare(&int(1), &int(1), || "a".into()));
        assert!(!c.compare(&int(1), &frac(1, 2), || "b".into()));
        let r = c.finish();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.max_residual, "1/2");
        assert_eq!(r.failures, vec!["b: lhs 1 rhs 1/2".to_string()]);
        assert_eq!(r.compared, 2);
    }

    #[test]
    fn approx_check_requires_bound_and_decay() {
        let t = Tolerance::new(-20);
        let small = |e: i64| Approx::from_exact(&int(10), 128).powi(e);
        let mut c = ApproxCheck::new("ok", json!({}));
        c.record(16, small(-30), 1);
        c.record(24, small(-45), 1);
        assert!(c.finish(&t).passed());
        let mut c = ApproxCheck::new("flat", json!({}));
        c.record(16, small(-30), 1);
        c.record(24, small(-30), 1);
        assert!(!c.finish(&t).passed());
        let mut c = ApproxCheck::new("big", json!({}));
        c.record(16, small(-10), 1);
        c.record(24, small(-19), 1);
        assert!(!c.finish(&t).passed());
        assert_eq!(Tolerance::default_for(256).bound.to_sci(3), "1e-32");
    }
}
