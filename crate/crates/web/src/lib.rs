//! Browser demo: three exact operations exposed through wasm-bindgen, each
//! returning a JSON string. The `*_json` functions are the plain-Rust cores
//! and are what the native tests exercise.

use orbicrystal::crystal::{cauchy_check, z_series, ModelKind};
use orbicrystal::fock::{Family, Kernel};
use orbicrystal::scalars::{format_exact, parse_exact, Context};
use orbicrystal::toda::gamma_toeplitz;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest Q-degree the page accepts; keeps the browser responsive.
pub const MAX_DEGREE: usize = 10;

fn context(a: u32, b: u32, u: &str, q_degree: usize) -> Result<Context, String> {
    if q_degree > MAX_DEGREE {
        return Err(format!("Q-degree at most {MAX_DEGREE}, got {q_degree}"));
    }
    let u = parse_exact(u).ok_or_else(|| format!("cannot parse u = {u:?}"))?;
    let mut ctx = Context::new(a, b, u).map_err(|e| e.to_string())?;
    ctx.q_degree = q_degree;
    ctx.jet_order = 0;
    Ok(ctx)
}

fn model(name: &str) -> Result<ModelKind, String> {
    match name {
        "first" => Ok(ModelKind::First),
        "second" => Ok(ModelKind::Second),
        _ => Err(format!("model must be \"first\" or \"second\", got {name:?}")),
    }
}

/// Undeformed Z(0) coefficients as "num/den" strings, index = power of Q.
pub fn zseries_json(a: u32, b: u32, u: &str, model_name: &str, q_degree: usize) -> Result<String, String> {
    let ctx = context(a, b, u, q_degree)?;
    let m = model(model_name)?;
    let z = z_series(&ctx, m, 0).undeformed();
    let coeffs: Vec<String> = z.coeffs.iter().map(format_exact).collect();
    Ok(json!({ "model": m.name(), "offset": z.offset, "coefficients": coeffs }).to_string())
}

/// First `n` Toeplitz coefficients of Γ_±(q^{−ρ}) (plain) or Γ′_± (primed), or of their inverses.
pub fn gamma_coefficients_json(a: u32, b: u32, u: &str, primed: bool, inverse: bool, n: usize) -> Result<String, String> {
    if n > 64 {
        return Err(format!("at most 64 coefficients, got {n}"));
    }
    let ctx = context(a, b, u, 0)?;
    let mut kernel = if primed { Kernel::primed() } else { Kernel::plain() };
    if inverse {
        kernel = kernel.inv();
    }
    let family = if kernel.family == Family::Primed { "primed" } else { "plain" };
    let c: Vec<String> = gamma_toeplitz(&ctx, &kernel, n).iter().map(format_exact).collect();
    Ok(json!({ "family": family, "inverse": inverse, "coefficients": c }).to_string())
}

/// Exact comparison of the partition-function series with its product form.
pub fn cauchy_json(a: u32, b: u32, u: &str, model_name: &str, q_degree: usize) -> Result<String, String> {
    let ctx = context(a, b, u, q_degree)?;
    let r = cauchy_check(&ctx, model(model_name)?);
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn zseries(a: u32, b: u32, u: &str, model: &str, q_degree: usize) -> Result<String, JsError> {
    zseries_json(a, b, u, model, q_degree).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn gamma_coefficients(a: u32, b: u32, u: &str, primed: bool, inverse: bool, n: usize) -> Result<String, JsError> {
    gamma_coefficients_json(a, b, u, primed, inverse, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cauchy(a: u32, b: u32, u: &str, model: &str, q_degree: usize) -> Result<String, JsError> {
    cauchy_json(a, b, u, model, q_degree).map_err(|e| JsError::new(&e))
}
