//! Sweep execution and table output.

use std::io::Write;
use std::time::Instant;

use casimir_core::force::{force_general, force_on_body, ForceQuery};
use casimir_core::materials::{contractibility_residual, interface_coeffs};
use casimir_core::spectral::{tilde_char_fn, verify_swap_identity, verify_uv_factorization};
use casimir_core::stack::LayerStack;
use casimir_core::thermo::{casimir_energy_split, work, ObservableResult};
use casimir_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{ObservableKind, RunConfig, SCHEMA_VERSION};
use crate::{exit, CliError};

/// ħc in eV·nm.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;
/// Joules per electronvolt.
const EV_J: f64 = 1.602_176_634e-19;

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok,
    /// The quadrature gave up; the row holds its partial result.
    NotConverged,
    Failed(String),
}

impl Status {
    fn label(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::NotConverged => "not-converged",
            Status::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep: Option<f64>,
    pub quantity: &'static str,
    pub value: f64,
    pub error_estimate: f64,
    pub terms: usize,
    pub evaluations: u64,
    pub status: Status,
    pub seconds: f64,
}

impl Row {
    fn failed(sweep: Option<f64>, quantity: &'static str, msg: String) -> Row {
        Row {
            sweep,
            quantity,
            value: f64::NAN,
            error_estimate: f64::NAN,
            terms: 0,
            evaluations: 0,
            status: Status::Failed(msg),
            seconds: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: RunConfig,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        let mut code = exit::SUCCESS;
        for r in &self.rows {
            code = code.max(match r.status {
                Status::Ok => exit::SUCCESS,
                Status::NotConverged => exit::NON_CONVERGENCE,
                Status::Failed(_) => exit::NUMERIC,
            });
        }
        code
    }

    /// SHA-256 of the canonical serialization of the effective config.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.config.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn write_table(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let cfg = &self.config;
        let o = &cfg.output;
        let d = o.format.delimiter();
        writeln!(out, "# casimir-cli {} (casimir-core {})", env!("CARGO_PKG_VERSION"), casimir_core::VERSION)?;
        writeln!(out, "# schema_version {SCHEMA_VERSION}")?;
        writeln!(out, "# config_sha256 {}", self.config_hash())?;
        writeln!(out, "# observable {}", describe(cfg))?;
        writeln!(out, "# temperature {}", cfg.thermal.temperature)?;
        writeln!(out, "# natural units: hbar = c = k_B = 1, lengths in the config unit")?;
        let si = o.si_units && unit_factor(cfg.observable.kind, 1.0).is_some();
        if si {
            writeln!(
                out,
                "# value_si in {} with 1 length unit = {} nm, hbar*c = {HBAR_C_EV_NM} eV nm",
                si_unit(cfg.observable.kind),
                o.length_unit_nm
            )?;
        }
        let sweep_name = cfg.sweep.as_ref().map_or("point", |s| s.path.as_str());
        let mut cols = vec![sweep_name, "quantity", "value", "error_estimate", "matsubara_terms", "evaluations", "status"];
        if si {
            cols.push("value_si");
        }
        if o.timing {
            cols.push("wall_time_s");
        }
        writeln!(out, "{}", cols.join(&d.to_string()))?;
        let factor = unit_factor(cfg.observable.kind, o.length_unit_nm).unwrap_or(f64::NAN);
        for r in &self.rows {
            let mut f = vec![
                r.sweep.map_or(String::new(), |v| format!("{v}")),
                r.quantity.to_string(),
                format!("{:e}", r.value),
                format!("{:e}", r.error_estimate),
                r.terms.to_string(),
                r.evaluations.to_string(),
                r.status.label().to_string(),
            ];
            if si {
                f.push(format!("{:e}", r.value * factor));
            }
            if o.timing {
                f.push(format!("{:.6}", r.seconds));
            }
            writeln!(out, "{}", f.join(&d.to_string()))?;
        }
        Ok(())
    }
}

fn describe(cfg: &RunConfig) -> String {
    let o = &cfg.observable;
    let target = match o.kind {
        ObservableKind::Energy => format!(" split {}", o.split.unwrap_or(1)),
        ObservableKind::Force => match (o.gap, o.body) {
            (Some(j), _) => format!(" gap {j}"),
            (_, Some([k, j])) => format!(" body between gaps {k} and {j}"),
            _ => String::new(),
        },
        ObservableKind::Work => o.triple.map_or(String::new(), |[i, k, j]| format!(" ({i}|{k}|{j})")),
        ObservableKind::IdentityCheck => format!(" {} points, seed {}", cfg.identity.points, cfg.identity.seed),
    };
    let basis = match o.basis {
        casimir_core::Basis::TmTe => "tmte",
        casimir_core::Basis::Helicity => "helicity",
    };
    format!("{}{target}, basis {basis}", o.kind)
}

fn si_unit(kind: ObservableKind) -> &'static str {
    match kind {
        ObservableKind::Force => "Pa",
        _ => "J/m^2",
    }
}

/// Multiplier from natural units to SI for one length unit of `nm`
/// nanometres; `None` for dimensionless residuals.
pub fn unit_factor(kind: ObservableKind, nm: f64) -> Option<f64> {
    // ħc/L³ in eV/nm² → J/m², ħc/L⁴ in eV/nm³ → Pa
    match kind {
        ObservableKind::Energy | ObservableKind::Work => Some(HBAR_C_EV_NM / nm.powi(3) * EV_J * 1e18),
        ObservableKind::Force => Some(HBAR_C_EV_NM / nm.powi(4) * EV_J * 1e27),
        ObservableKind::IdentityCheck => None,
    }
}

/// Runs every sweep point on a pool of `threads` workers (0: one per core)
/// and returns the rows in sweep order.
pub fn execute(config: &RunConfig, threads: usize) -> Result<Report, CliError> {
    config.validate()?;
    let points: Vec<(Option<f64>, RunConfig)> = config
        .points()
        .into_iter()
        .map(|v| Ok((v, v.map_or_else(|| Ok(config.clone()), |v| config.at_sweep_value(v))?)))
        .collect::<Result<_, CliError>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    let rows: Vec<Vec<Row>> = pool.install(|| points.par_iter().map(|(v, cfg)| evaluate(*v, cfg)).collect());
    Ok(Report {
        config: config.clone(),
        rows: rows.into_iter().flatten().collect(),
    })
}

fn evaluate(sweep: Option<f64>, cfg: &RunConfig) -> Vec<Row> {
    let start = Instant::now();
    let stack = match cfg.build_stack() {
        Ok(s) => s,
        Err(e) => return vec![Row::failed(sweep, "stack", e.to_string())],
    };
    let mut rows = match cfg.observable.kind {
        ObservableKind::IdentityCheck => identity_rows(sweep, cfg, &stack),
        kind => vec![observable_row(sweep, cfg, &stack, kind)],
    };
    let seconds = start.elapsed().as_secs_f64();
    for r in &mut rows {
        r.seconds = seconds;
    }
    rows
}

fn observable_row(sweep: Option<f64>, cfg: &RunConfig, stack: &LayerStack, kind: ObservableKind) -> Row {
    let o = &cfg.observable;
    let thermal = cfg.thermal_spec();
    let quad = cfg.quadrature;
    let (quantity, result) = match kind {
        ObservableKind::Energy => ("energy", casimir_energy_split(stack, o.split.unwrap_or(1), &thermal, &quad, o.basis)),
        ObservableKind::Force => match (o.gap, o.body) {
            (Some(gap), _) => ("force", force_general(&ForceQuery { stack, gap, thermal, quad, basis: o.basis })),
            (_, Some([k, j])) => ("body-force", force_on_body(stack, (k, j), &thermal, &quad, o.basis)),
            _ => unreachable!("validated force target"),
        },
        ObservableKind::Work => {
            let [i, k, j] = o.triple.expect("validated work triple");
            ("work", work(stack, (i, k, j), &thermal, &quad, o.basis))
        }
        ObservableKind::IdentityCheck => unreachable!("identity rows are built separately"),
    };
    let from = |r: &ObservableResult, status| Row {
        sweep,
        quantity,
        value: r.value,
        error_estimate: r.error_estimate,
        terms: r.terms,
        evaluations: r.evaluations,
        status,
        seconds: 0.0,
    };
    match result {
        Ok(r) => from(&r, Status::Ok),
        Err(Error::NonConvergence { partial, .. }) => from(&partial, Status::NotConverged),
        Err(e) => Row::failed(sweep, quantity, e.to_string()),
    }
}

struct Worst {
    value: f64,
    count: u64,
    error: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Worst { value: 0.0, count: 0, error: None }
    }

    fn see(&mut self, r: casimir_core::Result<f64>) {
        match r {
            Ok(v) => {
                self.count += 1;
                if !(v <= self.value) {
                    self.value = v;
                }
            }
            Err(e) => {
                self.error.get_or_insert(e.to_string());
            }
        }
    }

    fn row(self, sweep: Option<f64>, quantity: &'static str) -> Row {
        match self.error {
            Some(msg) => Row::failed(sweep, quantity, msg),
            None => Row {
                sweep,
                quantity,
                value: self.value,
                error_estimate: 0.0,
                terms: 0,
                evaluations: self.count,
                status: Status::Ok,
                seconds: 0.0,
            },
        }
    }
}

/// Largest residuals of the interface, swap, split and ultraviolet
/// identities over seeded random spectral points; identities that do not
/// apply to the stack are left out.
fn identity_rows(sweep: Option<f64>, cfg: &RunConfig, stack: &LayerStack) -> Vec<Row> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.identity.seed);
    let n = cfg.identity.points;
    let scale = stack.min_positive_width().unwrap_or(1.0);
    let basis = stack.working_basis(cfg.observable.basis);
    let last = stack.last();
    let point = |rng: &mut ChaCha8Rng| (rng.gen_range(0.01..3.0) / scale, rng.gen_range(0.0..3.0) / scale);
    let mut rows = Vec::new();

    let interfaces: Vec<usize> = (0..last)
        .filter(|&j| !stack.material(j).is_perfect_conductor() && !stack.material(j + 1).is_perfect_conductor())
        .collect();
    if !interfaces.is_empty() {
        let mut w = Worst::new();
        for _ in 0..n {
            let (xi, k) = point(&mut rng);
            let j = interfaces[rng.gen_range(0..interfaces.len())];
            w.see(
                interface_coeffs(stack.material(j), stack.material(j + 1), xi, k, basis)
                    .and_then(|c| contractibility_residual(&c)),
            );
        }
        rows.push(w.row(sweep, "contractibility"));
    }
    if last >= 3 {
        let mut w = Worst::new();
        for _ in 0..n {
            let (xi, k) = point(&mut rng);
            let mut idx: Vec<usize> = (0..=last).collect();
            while idx.len() > 4 {
                idx.remove(rng.gen_range(0..idx.len()));
            }
            w.see(verify_swap_identity(stack, [idx[0], idx[1], idx[2], idx[3]], xi, k, basis));
        }
        rows.push(w.row(sweep, "swap"));

        let mut w = Worst::new();
        for _ in 0..n {
            let (xi, k) = point(&mut rng);
            let split = |j| tilde_char_fn(stack, xi, k, basis, j).map(|t| t.value);
            w.see(split(1).and_then(|base| {
                let mut worst: f64 = 0.0;
                for j in 2..last {
                    worst = worst.max((split(j)? - base).norm() / base.norm());
                }
                Ok(worst)
            }));
        }
        rows.push(w.row(sweep, "split"));
    }
    if stack.is_reciprocal() && stack.has_conductor_boundaries() {
        let mut w = Worst::new();
        for _ in 0..n {
            let (xi, k) = point(&mut rng);
            let j = rng.gen_range(1..last);
            w.see(verify_uv_factorization(stack, xi, k, j));
        }
        rows.push(w.row(sweep, "ultraviolet"));
    }
    rows
}
