use crate::config::{RunConfig, Suite};
use orbicrystal::crystal::cauchy_check;
use orbicrystal::fock::shift::required_margin;
use orbicrystal::fock::{commutator_check, fermionic_check, shift_symmetry_check, theorem_check, ShiftKind};
use orbicrystal::report::{CheckReport, Status, Tolerance, SCHEMA};
use orbicrystal::scalars::{format_exact, int, parse_exact, Context};
use orbicrystal::toda::{factorization_check, gamma_conjugation_lemmas, lemma_values, tangency_check, ufactor_check};
use orbicrystal::Error;
use serde_json::{json, Value};
use std::sync::Mutex;

type Job = Box<dyn FnOnce() -> Result<CheckReport, Error> + Send>;

/// Interior margin used by the operator-level suites.
const MARGIN: usize = 4;

/// One job per report. Job order is the report order before sorting.
pub fn jobs(suite: Suite, cfg: &RunConfig, ctx: &Context) -> Vec<Job> {
    let mut out: Vec<Job> = vec![];
    let models = cfg.models();
    match suite {
        Suite::Cauchy => {
            for model in models {
                let c = ctx.clone();
                out.push(Box::new(move || Ok(cauchy_check(&c, model))));
            }
        }
        Suite::Shift => {
            let kmax = cfg.kmax.unwrap_or(3);
            for kind in ShiftKind::ALL {
                for k in 1..=kmax {
                    let modes: &[i64] = match kind {
                        ShiftKind::FracA | ShiftKind::FracB => &[0],
                        _ => &[-1, 0, 1],
                    };
                    let c = ctx.clone();
                    let modes = modes.to_vec();
                    out.push(Box::new(move || {
                        let mut parts = vec![];
                        for m in &modes {
                            let margin = MARGIN.max(required_margin(kind, k, *m));
                            parts.push(shift_symmetry_check(&c, kind, 0, k, *m, margin)?);
                        }
                        Ok(merge(format!("shift/{}[k={k}]", kind.name()), json!({ "kind": kind.name(), "k": k, "modes": modes }), parts))
                    }));
                }
            }
        }
        Suite::Torus => {
            let r = cfg.kmax.unwrap_or(2);
            for k in -r..=r {
                for l in -r..=r {
                    let c = ctx.clone();
                    out.push(Box::new(move || {
                        let mut parts = vec![];
                        for m in -r..=r {
                            for n in -r..=r {
                                parts.push(commutator_check(&c, 0, k, m, l, n, MARGIN)?);
                            }
                        }
                        Ok(merge(format!("torus[k={k},l={l}]"), json!({ "k": k, "l": l, "modes": r, "margin": MARGIN }), parts))
                    }));
                }
            }
        }
        Suite::Theorem1 | Suite::Theorem2 => {
            let which = if suite == Suite::Theorem1 { 1 } else { 2 };
            for &s in &cfg.charges {
                let c = ctx.clone();
                let cutoffs = cfg.cutoffs.clone();
                let tol = tolerance(cfg);
                out.push(Box::new(move || {
                    let mut r = theorem_check(&c, which, s, &cutoffs, &tol)?;
                    r.check = format!("{}[s={s}]", r.check);
                    Ok(r)
                }));
            }
        }
        Suite::Lemmas => {
            let c = ctx.clone();
            out.push(Box::new(move || gamma_conjugation_lemmas(&c, &lemma_values(&c))));
        }
        Suite::Lax => {
            for model in models {
                let c = ctx.clone();
                out.push(Box::new(move || factorization_check(&c, model)));
            }
        }
        Suite::Tangency => {
            let k = cfg.k.unwrap_or(ctx.a as i64);
            for model in models {
                let c = ctx.clone();
                out.push(Box::new(move || tangency_check(&c, model, k)));
            }
        }
        Suite::Ufactor => {
            for model in models {
                let c = ctx.clone();
                let cutoffs = cfg.cutoffs.clone();
                let tol = tolerance(cfg);
                out.push(Box::new(move || ufactor_check(&c, model, &cutoffs, &tol)));
            }
        }
        Suite::Fermionic => {
            for model in models {
                for &s in &cfg.charges {
                    let c = ctx.clone();
                    out.push(Box::new(move || {
                        let mut r = fermionic_check(&c, model, s);
                        r.check = format!("{}[s={s}]", r.check);
                        Ok(r)
                    }));
                }
            }
        }
    }
    out
}

fn tolerance(cfg: &RunConfig) -> Tolerance {
    Tolerance::new(cfg.tol_exp).with_floor(cfg.precision_bits)
}

/// Folds exact sub-reports into one: passes iff all pass, max residual over all.
fn merge(name: String, parameters: Value, parts: Vec<CheckReport>) -> CheckReport {
    let mut max = int(0);
    let mut failures = vec![];
    let mut compared = 0;
    let mut pass = true;
    let context = parts.first().map(|p| p.parameters["context"].clone()).unwrap_or(Value::Null);
    for p in &parts {
        pass &= p.passed();
        compared += p.compared;
        if let Some(x) = parse_exact(&p.max_residual) {
            if x > max {
                max = x;
            }
        }
        failures.extend(p.failures.iter().map(|f| format!("{}: {f}", p.check)));
    }
    failures.truncate(8);
    let mut parameters = parameters;
    parameters["context"] = context;
    parameters["checks"] = parts.iter().map(|p| Value::from(p.check.clone())).collect();
    CheckReport {
        schema: SCHEMA,
        check: name,
        parameters,
        status: if pass { Status::Pass } else { Status::Fail },
        exact: true,
        max_residual: format_exact(&max),
        residuals_by_cutoff: vec![],
        compared,
        failures,
    }
}

/// Threads requested through ORBICRYSTAL_THREADS (default: available cores).
pub fn thread_count() -> usize {
    std::env::var("ORBICRYSTAL_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs every job on a small worker pool; results keep job order.
pub fn run_jobs(jobs: Vec<Job>, threads: usize) -> Vec<Result<CheckReport, Error>> {
    let n = jobs.len();
    let queue = Mutex::new(jobs.into_iter().enumerate().collect::<Vec<_>>().into_iter());
    let results: Mutex<Vec<Option<Result<CheckReport, Error>>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, n.max(1)) {
            scope.spawn(|| loop {
                let next = queue.lock().unwrap().next();
                let Some((i, job)) = next else { break };
                let r = job();
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results.into_inner().unwrap().into_iter().map(|r| r.expect("every job ran")).collect()
}

/// A failing report standing in for a check whose linear system had no solution.
pub fn unsolvable_report(suite: Suite, err: &Error) -> CheckReport {
    CheckReport {
        schema: SCHEMA,
        check: format!("{suite:?}").to_lowercase(),
        parameters: json!({}),
        status: Status::Fail,
        exact: true,
        max_residual: "n/a".into(),
        residuals_by_cutoff: vec![],
        compared: 0,
        failures: vec![err.to_string()],
    }
}
