use clap::{Args, Parser, Subcommand, ValueEnum};
use orbicrystal::crystal::ModelKind;
use orbicrystal::scalars::{format_exact, parse_exact, Context, Exact};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "orbicrystal", version, about = "Orbifold melting crystal series and identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Export the deformed partition-function series Z(s, t[, t̄]).
    Zseries(ModelArgs),
    /// Run an identity suite and report residuals.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Cauchy,
    Shift,
    Torus,
    Theorem1,
    Theorem2,
    Lemmas,
    Lax,
    Tangency,
    Ufactor,
    Fermionic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    First,
    Second,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::First => ModelKind::First,
            Model::Second => ModelKind::Second,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Model; check suites run both models when omitted.
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long, default_value_t = 1)]
    pub a: u32,
    #[arg(long, default_value_t = 1)]
    pub b: u32,
    /// Uniformizer, q = u^(2ab).
    #[arg(long, default_value = "1/3")]
    pub u: String,
    /// p_1..p_a, comma separated (default all 1, or random with --seed).
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<String>>,
    #[arg(long, default_value = "1/2")]
    pub q0: String,
    #[arg(long, default_value_t = 6)]
    pub qdeg: usize,
    #[arg(long, default_value_t = 16)]
    pub fock_cutoff: usize,
    /// Cutoff sequence for approximate suites (Fock cutoffs, or tail cutoffs for ufactor).
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<usize>>,
    #[arg(long, default_value_t = 256)]
    pub precision_bits: u32,
    /// Jet order in the couplings (default 0 for zseries, 1 for checks).
    #[arg(long)]
    pub jet_order: Option<u32>,
    /// Number of couplings t_1..t_K.
    #[arg(long, default_value_t = 2)]
    pub jet_symbols: usize,
    #[arg(long, default_value_t = 40)]
    pub tail_cutoff: usize,
    /// Band-matrix window lo,hi.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-12,12")]
    pub window: Vec<i64>,
    /// Charge for zseries.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub charge: i64,
    /// Charges for tau-function and fermionic suites.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0,1")]
    pub charges: Vec<i64>,
    /// Index bound: k ≤ kmax for shift (default 3), |k|,|l|,|m|,|n| ≤ kmax for torus (default 2).
    #[arg(long)]
    pub kmax: Option<i64>,
    /// Flow index for tangency (default a).
    #[arg(long)]
    pub k: Option<i64>,
    /// Residual bound 10^tol_exp for approximate suites.
    #[arg(long, default_value_t = -20, allow_negative_numbers = true)]
    pub tol_exp: i64,
    /// Draws p and r (when not given) from a seeded generator.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub output: Format,
}

/// The resolved run parameters, echoed verbatim into every output.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub suite: Option<Suite>,
    pub model: Option<Model>,
    pub a: u32,
    pub b: u32,
    pub u: String,
    pub p: Vec<String>,
    pub r: Vec<String>,
    pub q0: String,
    pub q_degree: usize,
    pub fock_cutoff: usize,
    pub cutoffs: Vec<usize>,
    pub precision_bits: u32,
    pub jet_order: u32,
    pub jet_symbols: usize,
    pub tail_cutoff: usize,
    pub window: (i64, i64),
    pub charge: i64,
    pub charges: Vec<i64>,
    pub kmax: Option<i64>,
    pub k: Option<i64>,
    pub tol_exp: i64,
    pub seed: Option<u64>,
    pub output: Format,
}

fn rational(what: &str, s: &str) -> Result<Exact, String> {
    parse_exact(s).ok_or_else(|| format!("{what}: cannot parse {s:?} as a rational"))
}

fn rationals(what: &str, v: &[String]) -> Result<Vec<Exact>, String> {
    v.iter().map(|s| rational(what, s)).collect()
}

/// Small nonzero rationals n/d with 1 ≤ n, d ≤ 4.
fn random_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<Exact> {
    (0..n)
        .map(|_| Exact::new(rng.gen_range(1..=4i64).into(), rng.gen_range(1..=4i64).into()))
        .collect()
}

impl RunConfig {
    pub fn resolve(subcommand: &str, suite: Option<Suite>, m: &ModelArgs) -> Result<(RunConfig, Context), String> {
        let u = rational("--u", &m.u)?;
        let mut ctx = Context::new(m.a, m.b, u).map_err(|e| e.to_string())?;
        let mut rng = m.seed.map(ChaCha8Rng::seed_from_u64);
        ctx.p = match (&m.p, rng.as_mut()) {
            (Some(p), _) => rationals("--p", p)?,
            (None, Some(rng)) => random_params(rng, m.a as usize),
            (None, None) => ctx.p,
        };
        ctx.r = match (&m.r, rng.as_mut()) {
            (Some(r), _) => rationals("--r", r)?,
            (None, Some(rng)) => random_params(rng, m.b as usize),
            (None, None) => ctx.r,
        };
        ctx.q0 = rational("--q0", &m.q0)?;
        ctx.q_degree = m.qdeg;
        ctx.fock_cutoff = m.fock_cutoff;
        ctx.precision_bits = m.precision_bits;
        ctx.jet_order = m.jet_order.unwrap_or(if suite.is_none() { 0 } else { 1 });
        ctx.jet_symbols = m.jet_symbols;
        ctx.tail_cutoff = m.tail_cutoff;
        ctx.window = match m.window[..] {
            [lo, hi] => (lo, hi),
            _ => return Err(format!("--window expects lo,hi, got {:?}", m.window)),
        };
        ctx.validate().map_err(|e| e.to_string())?;
        let cutoffs = match (&m.cutoffs, suite) {
            (Some(c), _) => c.clone(),
            (None, Some(Suite::Ufactor)) => vec![40, 80],
            (None, Some(Suite::Theorem1 | Suite::Theorem2)) => vec![16, 24],
            (None, _) => vec![],
        };
        if cutoffs.is_empty() && matches!(suite, Some(Suite::Ufactor | Suite::Theorem1 | Suite::Theorem2)) {
            return Err("--cutoffs must list at least one cutoff".into());
        }
        let fmt = |v: &[Exact]| v.iter().map(format_exact).collect();
        let cfg = RunConfig {
            subcommand: subcommand.into(),
            suite,
            model: m.model,
            a: ctx.a,
            b: ctx.b,
            u: format_exact(&ctx.u),
            p: fmt(&ctx.p),
            r: fmt(&ctx.r),
            q0: format_exact(&ctx.q0),
            q_degree: ctx.q_degree,
            fock_cutoff: ctx.fock_cutoff,
            cutoffs,
            precision_bits: ctx.precision_bits,
            jet_order: ctx.jet_order,
            jet_symbols: ctx.jet_symbols,
            tail_cutoff: ctx.tail_cutoff,
            window: ctx.window,
            charge: m.charge,
            charges: m.charges.clone(),
            kmax: m.kmax,
            k: m.k,
            tol_exp: m.tol_exp,
            seed: m.seed,
            output: m.output,
        };
        Ok((cfg, ctx))
    }

    /// Models a suite runs over: the chosen one, or both.
    pub fn models(&self) -> Vec<ModelKind> {
        match self.model {
            Some(m) => vec![m.into()],
            None => vec![ModelKind::First, ModelKind::Second],
        }
    }
}
