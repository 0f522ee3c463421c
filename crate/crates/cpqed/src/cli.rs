//! Command-line driver: strict key=value configuration, the four commands and
//! CSV/JSON output.
//!
//! Physical inputs are given in user units and rescaled to k0 = 1 before any
//! computation; wavenumber-like settings (`lambda`, `grid_k_*`, `probe_k`) are
//! already in units of k0.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bogoliubov::{
    companion_coefficients, direct_coefficients, dressed_matrix, eta_law_residual, inverse_residual,
    lambda_coefficients, lambda_via_matrix, mix_from_dressed, r_law_residual, ratio_law_residual,
    tau_law_residual, ProbeCouplings,
};
use crate::discrete_oracle::{
    build_system, commutator_residual, diagonalize_quadratic, identity_lhs, max_coefficient_difference,
    normal_modes, orthogonality_residual, solve, system_residual, IdentityKind, QuadraticHamiltonian,
};
use crate::energy::{
    e0_cross_logdet, e0_from_modes, e0_logdet_total, fourth_order_curve, integral_i1, integral_i1_iterated,
    integral_i2, integral_i2_laplace, vcp12, vcp_all_orders, vcp_final, AllOrdersBackend, AllOrdersConfig,
    PotentialCurve,
};
use crate::model::{Ladder, Mode, ModeGrid, OscillatorPair, Osc, ShellSpec};
use crate::par::Exec;
use crate::quad::QuadratureConfig;
use crate::resolvent::{
    identity_f1, identity_f2, sigma, sigma_closed, sigma_damped, BandLimited, Branch, CutoffKind, CutoffScheme,
    DiscreteMedium, Freq, Medium,
};
use crate::specfun::Axis;
use crate::{Error, Result, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RESIDUAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "cpqed", version, about = "Two-oscillator QED: coefficients, energy shift, Casimir-Polder potential")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// key=value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// override one key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// write the table here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// interaction potential over r (fourth order or all orders)
    Potential,
    /// residuals of all closed-form laws against the finite-mode oracle
    Identities,
    /// the far-zone double integrals
    Integrals,
    /// grid, cutoff and damping convergence tables
    Converge,
}

/// Every accepted key.
pub const KNOWN_KEYS: &[&str] = &[
    "k0",
    "mu1",
    "mu2",
    "alpha1",
    "alpha2",
    "r",
    "r_min",
    "r_max",
    "n_r",
    "order",
    "backend",
    "mass_counterterm",
    "cutoff_kind",
    "lambda",
    "rel_tol",
    "abs_tol",
    "max_subdivisions",
    "damping",
    "branch",
    "grid_n_shells",
    "grid_k_min",
    "grid_k_max",
    "grid_ladder",
    "grid_n_theta",
    "grid_n_phi",
    "grid_phi_offset",
    "probe_k",
    "format",
    "out",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Fourth,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Oscillator pair in k0 = 1 units.
    pub pair: OscillatorPair,
    /// The user's k0, for converting back.
    pub k0: f64,
    /// Separations in k0 = 1 units.
    pub rs: Vec<f64>,
    pub order: Order,
    pub all_orders: AllOrdersConfig,
    pub branch: Branch,
    pub grid: ShellSpec,
    pub probe_k: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// Parses `key = value` lines; `#` starts a comment. Repeated keys are errors.
pub fn parse_kv(text: &str) -> std::result::Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key=value, got '{}'", n + 1, line)))?;
        let (k, v) = (k.trim(), v.trim());
        check_key(k)?;
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(ConfigError(format!("line {}: key '{}' given twice", n + 1, k)));
        }
    }
    Ok(out)
}

fn check_key(k: &str) -> std::result::Result<(), ConfigError> {
    if KNOWN_KEYS.contains(&k) {
        Ok(())
    } else {
        Err(ConfigError(format!("unknown key '{k}'")))
    }
}

struct Keys(BTreeMap<String, String>);

impl Keys {
    fn f64(&self, key: &str) -> std::result::Result<Option<f64>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| ConfigError(format!("key '{key}': '{v}' is not a finite number"))),
        }
    }

    fn usize(&self, key: &str) -> std::result::Result<Option<usize>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| ConfigError(format!("key '{key}': '{v}' is not a non-negative integer"))),
        }
    }

    fn positive(&self, key: &str) -> std::result::Result<Option<f64>, ConfigError> {
        match self.f64(key)? {
            Some(x) if !(x > 0.0) => Err(ConfigError(format!("key '{key}' must be > 0, got {x}"))),
            v => Ok(v),
        }
    }

    fn choice<T: Copy>(&self, key: &str, options: &[(&str, T)]) -> std::result::Result<Option<T>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => options
                .iter()
                .find(|(name, _)| name.eq_ignore_ascii_case(v))
                .map(|(_, t)| Some(*t))
                .ok_or_else(|| {
                    let names: Vec<&str> = options.iter().map(|o| o.0).collect();
                    ConfigError(format!("key '{key}': '{v}' is not one of {}", names.join("|")))
                }),
        }
    }
}

fn parse_damping(v: &str) -> std::result::Result<Vec<f64>, ConfigError> {
    v.split(',')
        .map(|s| {
            let s = s.trim();
            let x = match s.split_once('/') {
                Some((a, b)) => a.trim().parse::<f64>().ok().zip(b.trim().parse::<f64>().ok()).map(|(a, b)| a / b),
                None => s.parse::<f64>().ok(),
            };
            x.filter(|x| *x > 0.0 && x.is_finite())
                .ok_or_else(|| ConfigError(format!("key 'damping': bad entry '{s}'")))
        })
        .collect()
}

/// Merges file keys and `--set` overrides, then validates everything.
pub fn build_config(
    file: Option<&str>,
    sets: &[String],
    out: Option<PathBuf>,
    format: Option<Format>,
) -> std::result::Result<RunConfig, ConfigError> {
    let mut kv = match file {
        Some(t) => parse_kv(t)?,
        None => BTreeMap::new(),
    };
    for s in sets {
        let (k, v) = s.split_once('=').ok_or_else(|| ConfigError(format!("--set expects key=value, got '{s}'")))?;
        let k = k.trim();
        check_key(k)?;
        kv.insert(k.to_string(), v.trim().to_string());
    }
    let keys = Keys(kv);

    let k0 = keys.positive("k0")?.ok_or_else(|| ConfigError("missing required key 'k0'".into()))?;
    let has_mu = keys.0.contains_key("mu1") || keys.0.contains_key("mu2");
    let has_alpha = keys.0.contains_key("alpha1") || keys.0.contains_key("alpha2");
    if has_mu && has_alpha {
        return Err(ConfigError("give either mu1/mu2 or alpha1/alpha2, not both".into()));
    }
    // dimensionless couplings: μ k0 and α k0³
    let (m1, m2) = if has_alpha {
        let a = |key: &str| -> std::result::Result<f64, ConfigError> {
            let a = keys.f64(key)?.ok_or_else(|| ConfigError(format!("missing key '{key}'")))?;
            if a < 0.0 {
                return Err(ConfigError(format!("key '{key}' must be >= 0")));
            }
            Ok((a * k0.powi(3) / 2.0).sqrt())
        };
        (a("alpha1")?, a("alpha2")?)
    } else if has_mu {
        let m = |key: &str| -> std::result::Result<f64, ConfigError> {
            let m = keys.f64(key)?.ok_or_else(|| ConfigError(format!("missing key '{key}'")))?;
            if m < 0.0 {
                return Err(ConfigError(format!("key '{key}' must be >= 0")));
            }
            Ok(m * k0)
        };
        (m("mu1")?, m("mu2")?)
    } else {
        let m = (1e-4f64 / 2.0).sqrt();
        (m, m)
    };

    let rs: Vec<f64> = if let Some(r) = keys.positive("r")? {
        if ["r_min", "r_max", "n_r"].iter().any(|k| keys.0.contains_key(*k)) {
            return Err(ConfigError("give either r or r_min/r_max/n_r".into()));
        }
        vec![r * k0]
    } else {
        let lo = keys.positive("r_min")?.unwrap_or(10.0 / k0) * k0;
        let hi = keys.positive("r_max")?.unwrap_or(50.0 / k0) * k0;
        let n = keys.usize("n_r")?.unwrap_or(5);
        if n == 0 {
            return Err(ConfigError("key 'n_r' must be >= 1".into()));
        }
        if hi < lo || (n > 1 && hi == lo) {
            return Err(ConfigError(format!("r range not ordered: r_min={lo}, r_max={hi}")));
        }
        if n == 1 {
            vec![lo]
        } else {
            (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
        }
    };
    let pair = OscillatorPair::new(1.0, m1, m2, rs[0]).map_err(|e| ConfigError(e.to_string()))?;

    let order = keys.choice("order", &[("4th", Order::Fourth), ("fourth", Order::Fourth), ("all", Order::All)])?.unwrap_or(Order::Fourth);
    let kind = keys
        .choice("cutoff_kind", &[("exponential", CutoffKind::Exponential), ("sharp", CutoffKind::Sharp)])?
        .unwrap_or(CutoffKind::Exponential);
    let lambda = keys.positive("lambda")?.unwrap_or(100.0);
    let cutoff = CutoffScheme::new(kind, lambda).map_err(|e| ConfigError(e.to_string()))?;
    let mut quad = QuadratureConfig::default();
    if let Some(v) = keys.positive("rel_tol")? {
        quad.rel_tol = v;
    }
    if let Some(v) = keys.f64("abs_tol")? {
        quad.abs_tol = v;
    }
    if let Some(v) = keys.usize("max_subdivisions")? {
        quad.max_subdivisions = v;
    }
    if let Some(v) = keys.0.get("damping") {
        quad.damping = parse_damping(v)?;
    }
    quad.validate().map_err(|e| ConfigError(e.to_string()))?;
    let mass_counterterm =
        keys.choice("mass_counterterm", &[("true", true), ("false", false), ("1", true), ("0", false)])?.unwrap_or(true);

    let ladder = keys
        .choice("grid_ladder", &[("uniform", Ladder::Uniform), ("geometric", Ladder::Geometric), ("gauss", Ladder::Gauss)])?
        .unwrap_or(Ladder::Geometric);
    let n_shells = keys.usize("grid_n_shells")?.unwrap_or(2);
    let k_min = keys.f64("grid_k_min")?.unwrap_or(0.2);
    let k_max = keys.f64("grid_k_max")?.unwrap_or(3.0);
    let radial = ShellSpec::ladder(ladder, n_shells, k_min, k_max).map_err(|e| ConfigError(e.to_string()))?;
    let n_phi = keys.usize("grid_n_phi")?.unwrap_or(4);
    if n_phi == 0 || n_phi % 4 != 0 {
        return Err(ConfigError(format!("key 'grid_n_phi' must be a positive multiple of 4, got {n_phi}")));
    }
    let grid = ShellSpec {
        radial,
        n_theta: keys.usize("grid_n_theta")?.unwrap_or(2),
        n_phi,
        phi_offset: keys.f64("grid_phi_offset")?.unwrap_or(0.3),
    };
    if grid.n_theta == 0 {
        return Err(ConfigError("key 'grid_n_theta' must be >= 1".into()));
    }
    let backend = keys
        .choice("backend", &[("continuum", false), ("grid", true)])?
        .map(|g| if g { AllOrdersBackend::Grid(grid.clone()) } else { AllOrdersBackend::Continuum })
        .unwrap_or(AllOrdersBackend::Continuum);
    let branch = keys.choice("branch", &[("plus", Branch::Plus), ("minus", Branch::Minus)])?.unwrap_or(Branch::Plus);
    let probe_k = keys.positive("probe_k")?.unwrap_or(0.77);
    let format = match format {
        Some(f) => f,
        None => keys.choice("format", &[("csv", Format::Csv), ("json", Format::Json)])?.unwrap_or(Format::Csv),
    };
    let out = out.or_else(|| keys.0.get("out").map(PathBuf::from));

    Ok(RunConfig {
        pair,
        k0,
        rs,
        order,
        all_orders: AllOrdersConfig { cutoff, quad, mass_counterterm, backend },
        branch,
        grid,
        probe_k,
        format,
        out,
    })
}

/// A report cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or_else(|| serde_json::Value::String(format!("{x:?}"))),
            Cell::Text(s) => serde_json::Value::String(s.clone()),
            Cell::Flag(b) => serde_json::Value::Bool(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.headers.join(",");
                s.push('\n');
                for row in &self.rows {
                    s.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut m = serde_json::Map::new();
                        for (h, c) in self.headers.iter().zip(row) {
                            m.insert(h.to_string(), c.json());
                        }
                        serde_json::Value::Object(m)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&rows).unwrap_or_default();
                s.push('\n');
                s
            }
        }
    }
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::Degenerate(_) | Error::Coincident => EXIT_CONFIG,
        _ => EXIT_CONVERGENCE,
    }
}

/// A residual against its pass threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Residual {
    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn probe_mode(k: f64) -> Result<Mode> {
    let (ct, ph): (f64, f64) = (0.41, 0.93);
    let st = (1.0 - ct * ct).sqrt();
    Mode::new([k * st * ph.cos(), k * st * ph.sin(), k * ct], 1, 0.1)
}

fn c_scale<'a>(it: impl Iterator<Item = &'a C64>) -> f64 {
    it.map(|c| c.norm()).fold(0.0, f64::max)
}

/// The full residual suite on the configured grid and probe mode.
pub fn identity_residuals(pair: &OscillatorPair, spec: &ShellSpec, probe_k: f64) -> Result<Vec<Residual>> {
    let grid = ModeGrid::shells(spec)?;
    if let Some(k) = grid.distinct_k(1e-12).into_iter().find(|k| (k - pair.k0).abs() <= 1e-9 * pair.k0) {
        return Err(Error::Degenerate(format!("grid wavenumber {k} coincides with k0")));
    }
    let medium = DiscreteMedium::new(*pair, &grid)?;
    let probe = ProbeCouplings::from_mode(pair, &probe_mode(probe_k)?, grid.volume())?;
    let w = Freq::Real(probe.omega, Branch::Plus);
    let mut out = Vec::new();

    let mut inv = 0.0f64;
    for axis in Axis::ALL {
        let d = dressed_matrix(&medium, axis, w)?;
        inv = inv.max(inverse_residual(&mix_from_dressed(&d)?, &d));
    }
    out.push(Residual { name: "matrix_inverse", value: inv, threshold: 1e-12 });

    let closed = direct_coefficients(&medium, &probe)?;
    let sys = build_system(&medium, &probe)?;
    let solved = solve(&sys, probe.omega)?;
    let scale = c_scale(closed.big_t.iter().chain(&closed.big_r).chain(closed.t.iter().flatten()).chain(closed.r.iter().flatten()));
    out.push(Residual {
        name: "oracle_vs_closed_form",
        value: rel(max_coefficient_difference(&closed, &solved), scale.max(1.0)),
        threshold: 1e-8,
    });
    out.push(Residual { name: "closed_form_in_system", value: system_residual(&sys, &closed), threshold: 1e-10 });
    out.push(Residual { name: "ratio_law_t_r", value: ratio_law_residual(&closed, pair.k0), threshold: 1e-12 });
    out.push(Residual { name: "law_R_T_mirror", value: r_law_residual(&closed, &medium)?, threshold: 1e-10 });

    let lam = lambda_coefficients(&medium, &probe, w)?;
    let lam_m = lambda_via_matrix(&medium, &probe, w)?;
    let ls = c_scale(lam.iter().flatten());
    let ld = lam.iter().flatten().zip(lam_m.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    out.push(Residual { name: "lambda_matrix_path", value: rel(ld, ls), threshold: 1e-10 });
    let invset = companion_coefficients(&lam, probe.omega, &medium, C64::new(1.0, 0.0));
    out.push(Residual { name: "ratio_law_tau_lambda", value: tau_law_residual(&invset, pair.k0), threshold: 1e-12 });
    out.push(Residual { name: "law_eta_mu_mirror", value: eta_law_residual(&invset, &medium)?, threshold: 1e-10 });

    let modes = normal_modes(&medium)?;
    let comm = modes.iter().map(|m| commutator_residual(&m.coeffs)).fold(0.0, f64::max);
    out.push(Residual { name: "commutator", value: comm, threshold: 1e-8 });
    out.push(Residual { name: "orthogonality", value: orthogonality_residual(&modes), threshold: 1e-8 });
    // the inverse family of an exact normal mode is (conj T, -R) on the grid
    let mut comp = 0.0f64;
    for nm in &modes {
        let l = nm.axis.index();
        let lam = {
            let mut a = [[C64::new(0.0, 0.0); 3]; 2];
            a[0][l] = nm.coeffs.t[0][l].conj();
            a[1][l] = nm.coeffs.t[1][l].conj();
            a
        };
        let c = companion_coefficients(&lam, nm.omega, &medium, C64::new(0.0, 0.0));
        let s = c_scale(nm.coeffs.big_t.iter().chain(&nm.coeffs.big_r));
        for m in 0..medium.len() {
            comp = comp.max(rel((c.mu[m] - nm.coeffs.big_t[m].conj()).norm(), s));
            comp = comp.max(rel((c.eta[m] + nm.coeffs.big_r[m]).norm(), s));
        }
    }
    out.push(Residual { name: "inverse_family_of_normal_modes", value: comp, threshold: 1e-8 });

    let mut ident = 0.0f64;
    let (kp, kt) = (probe.omega, 0.5 * probe.omega + 0.123);
    // bare terms of size (k'+k̃)/k0 cancel on the right-hand sides; below this
    // scale the check becomes absolute at rounding level
    let floor = 1e-5 * (kp + kt) / pair.k0;
    for axis in Axis::ALL {
        for which in Osc::BOTH {
            let (same1, _) = identity_f1(&medium, which, axis, kp, kt, Branch::Plus)?;
            let (same2, _) = identity_f2(&medium, which, axis, kp, kt, Branch::Plus)?;
            let l1 = identity_lhs(&medium, IdentityKind::SameF1(which), axis, kp, kt, 1.0)?;
            let l2 = identity_lhs(&medium, IdentityKind::SameF2(which), axis, kp, kt, 1.0)?;
            ident = ident.max(rel((l1 - same1).norm(), same1.norm().max(l1.norm()).max(floor)));
            ident = ident.max(rel((l2 - same2).norm(), same2.norm().max(l2.norm()).max(floor)));
        }
        let (_, cross1) = identity_f1(&medium, Osc::One, axis, kp, kt, Branch::Plus)?;
        let (_, cross2) = identity_f2(&medium, Osc::One, axis, kp, kt, Branch::Plus)?;
        for sgn in [1.0, -1.0] {
            let l1 = identity_lhs(&medium, IdentityKind::CrossF1, axis, kp, kt, sgn)?;
            let l2 = identity_lhs(&medium, IdentityKind::CrossF2, axis, kp, kt, sgn)?;
            ident = ident.max(rel((l1 - cross1).norm(), cross1.norm().max(l1.norm()).max(floor)));
            ident = ident.max(rel((l2 - cross2).norm(), cross2.norm().max(l2.norm()).max(floor)));
        }
    }
    out.push(Residual { name: "difference_identities", value: ident, threshold: 1e-10 });

    let e13 = e0_from_modes(&medium, &modes);
    let symp = diagonalize_quadratic(&QuadraticHamiltonian::from_medium(&medium)?)?;
    let logdet = e0_logdet_total(&medium, &QuadratureConfig { rel_tol: 1e-12, ..QuadratureConfig::default() })?;
    // zero-point sums of order k0·dim cancel against the bare frequencies; the
    // floor makes the checks absolute at rounding level for tiny shifts
    let es = symp.e0.abs().max(1e-7 * pair.k0 * (6 + medium.len()) as f64);
    out.push(Residual { name: "energy_formula_vs_symplectic", value: rel((e13.re - symp.e0).abs(), es), threshold: 1e-8 });
    out.push(Residual { name: "energy_imaginary_residue", value: rel(e13.im.abs(), es), threshold: 1e-10 });
    out.push(Residual { name: "logdet_vs_symplectic", value: rel((logdet.value - symp.e0).abs(), es), threshold: 1e-8 });
    Ok(out)
}

fn write_output(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

/// Converts a curve from k0 = 1 units back to the user's units.
fn to_user_units(mut curve: PotentialCurve, k0: f64) -> PotentialCurve {
    for s in &mut curve.samples {
        s.r /= k0;
        s.v *= k0;
        s.v_4th *= k0;
        s.err_est *= k0;
    }
    curve.meta.k0 = k0;
    curve.meta.mu1 /= k0;
    curve.meta.mu2 /= k0;
    curve.meta.alpha1 /= k0.powi(3);
    curve.meta.alpha2 /= k0.powi(3);
    curve
}

fn cmd_potential(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let curve = match cfg.order {
        Order::Fourth => fourth_order_curve(&cfg.pair, &cfg.rs)?,
        Order::All => vcp_all_orders(&cfg.pair, &cfg.rs, &cfg.all_orders, Exec::default())?,
    };
    let failures = curve.failures();
    let slope = curve.loglog_slope();
    let curve = to_user_units(curve, cfg.k0);
    let text = match cfg.format {
        Format::Csv => curve.to_csv(),
        Format::Json => curve.to_json()?,
    };
    write_output(cfg, &text, stdout).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let slope_txt = slope.map_or("n/a".to_string(), |s| format!("{s:.6}"));
    let _ = writeln!(stderr, "potential: {} samples, {} failed, log-log slope {}", curve.samples.len(), failures, slope_txt);
    for s in curve.samples.iter().filter(|s| s.error.is_some()) {
        let _ = writeln!(stderr, "  r = {:?}: {}", s.r, s.error.as_deref().unwrap_or(""));
    }
    Ok(if failures > 0 { EXIT_CONVERGENCE } else { EXIT_OK })
}

fn cmd_identities(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let res = identity_residuals(&cfg.pair, &cfg.grid, cfg.probe_k)?;
    let table = Table {
        headers: vec!["residual", "value", "threshold", "pass"],
        rows: res
            .iter()
            .map(|r| vec![Cell::Text(r.name.into()), Cell::Num(r.value), Cell::Num(r.threshold), Cell::Flag(r.passed())])
            .collect(),
    };
    write_output(cfg, &table.render(cfg.format), stdout).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let failed: Vec<&str> = res.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(stderr, "failed residuals: {}", failed.join(", "));
        Ok(EXIT_RESIDUAL)
    }
}

/// Rows of the integrals report: name, value, error estimate, quoted target,
/// relative error to it, Abel-sum value, relative error to that.
pub fn integrals_table(quad: &QuadratureConfig, exec: Exec) -> Result<Table> {
    let i1 = integral_i1(quad, exec)?;
    let i2 = integral_i2(quad, exec)?;
    let i1_it = integral_i1_iterated(quad)?;
    let i2_lp = integral_i2_laplace(&QuadratureConfig { rel_tol: 1e-12, ..quad.clone() })?;
    let printed = 23.0 / (16.0 * PI);
    let abel = 23.0 * PI / 16.0;
    let unit = OscillatorPair::new(1.0, 0.5f64.sqrt(), 0.5f64.sqrt(), 1.0)?;
    let v12 = vcp12(&unit, 1.0, i1.value, i2.value);
    let vfin = vcp_final(&unit, 1.0);
    let row = |name: &str, e: f64, err: f64, target: f64, exact: f64| {
        vec![
            Cell::Text(name.into()),
            Cell::Num(e),
            Cell::Num(err),
            Cell::Num(target),
            Cell::Num(((e - target) / target).abs()),
            Cell::Num(exact),
            Cell::Num(((e - exact) / exact).abs()),
        ]
    };
    Ok(Table {
        headers: vec!["quantity", "value", "err_est", "printed_target", "rel_err_printed", "abel_value", "rel_err_abel"],
        rows: vec![
            row("I1", i1.value, i1.err, -printed, -abel),
            row("I2", i2.value, i2.err, printed, abel),
            row("2I1+I2", 2.0 * i1.value + i2.value, 2.0 * i1.err + i2.err, -printed, -abel),
            row("I1_iterated", i1_it.value, i1_it.err, -printed, -abel),
            row("I2_laplace", i2_lp.value, i2_lp.err, printed, abel),
            row("Vr7_from_integrals_alpha1", v12, 0.0, vfin, vfin),
        ],
    })
}

fn cmd_integrals(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let t = integrals_table(&cfg.all_orders.quad, Exec::default())?;
    write_output(cfg, &t.render(cfg.format), stdout).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(EXIT_OK)
}

/// Convergence tables: cutoff sweep of the all-orders interaction energy,
/// shell doubling of the grid σ(iξ) and grid interaction energy, and the
/// damping ladder of the σ quadrature.
pub fn converge_table(cfg: &RunConfig) -> Result<Table> {
    let pair = cfg.pair;
    let r = pair.r;
    let mut rows = Vec::new();
    let mut push = |sweep: &str, param: f64, value: f64, reference: f64| {
        let rel_err = if reference != 0.0 { ((value - reference) / reference).abs() } else { (value - reference).abs() };
        rows.push(vec![Cell::Text(sweep.into()), Cell::Num(param), Cell::Num(value), Cell::Num(reference), Cell::Num(rel_err)]);
    };

    let base = AllOrdersConfig { backend: AllOrdersBackend::Continuum, ..cfg.all_orders.clone() };
    let lambdas = [50.0, 100.0, 200.0];
    let mut vals = Vec::new();
    for &l in &lambdas {
        let c = AllOrdersConfig { cutoff: CutoffScheme { lambda: l, ..base.cutoff }, ..base.clone() };
        vals.push(crate::energy::all_orders_at(&pair, &c)?.value);
    }
    for (l, v) in lambdas.iter().zip(&vals) {
        push("cutoff_cross_part", *l, *v, vals[1]);
    }

    let xi = 1.0 / r;
    let k_min = cfg.grid.radial.first().map_or(0.2, |s| s.0 - 0.5 * s.1).max(0.0);
    let k_max = cfg.grid.radial.last().map_or(3.0, |s| s.0 + 0.5 * s.1);
    let base_n = cfg.grid.radial.len().max(1);
    let band = BandLimited { pair, k_min, k_max, quad: cfg.all_orders.quad.clone() };
    let cont_cross = Some(e0_cross_logdet(&band, 1.0 / r, &cfg.all_orders.quad)?.value);
    for f in [1usize, 2, 4, 8] {
        let n = base_n * f;
        // polar resolution grows with the shell count so both refine together
        let spec = ShellSpec {
            radial: ShellSpec::ladder(Ladder::Gauss, n, k_min, k_max)?,
            n_theta: cfg.grid.n_theta.max(8) * f,
            ..cfg.grid.clone()
        };
        let grid = ModeGrid::shells(&spec)?;
        let med = DiscreteMedium::new(pair, &grid)?;
        let sg = med.sigma_z(Axis::Z, C64::new(0.0, xi)).re;
        let sc = band.sigma(Axis::Z, Freq::Imag(xi))?.re;
        push("shells_sigma_z_imag", n as f64, sg, sc);
        if let Some(cc) = cont_cross {
            let ec = e0_cross_logdet(&med, 1.0 / r, &cfg.all_orders.quad)?.value;
            push("shells_cross_part", n as f64, ec, cc);
        }
    }

    let k = cfg.probe_k;
    let exact = sigma_closed(&pair, Axis::Z, k, cfg.branch).re;
    for &d in &cfg.all_orders.quad.damping {
        let q = QuadratureConfig { damping: vec![d], ..cfg.all_orders.quad.clone() };
        push("damping_sigma_z_single", d, sigma_damped(&pair, Axis::Z, k, cfg.branch, &q)?.value.re, exact);
    }
    push("damping_sigma_z_extrapolated", 0.0, sigma_damped(&pair, Axis::Z, k, cfg.branch, &cfg.all_orders.quad)?.value.re, exact);
    push("contour_sigma_z", 0.0, sigma(&pair, Axis::Z, k, cfg.branch, &cfg.all_orders.quad)?.value.re, exact);
    Ok(Table { headers: vec!["sweep", "param", "value", "reference", "rel_err"], rows })
}

fn cmd_converge(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let t = converge_table(cfg)?;
    write_output(cfg, &t.render(cfg.format), stdout).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(EXIT_OK)
}

/// Entry point with injectable streams; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(stdout, "{e}");
            } else {
                let _ = write!(stderr, "{e}");
            }
            return code;
        }
    };
    let text = match &cli.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                let _ = writeln!(stderr, "config error: cannot read {}: {e}", p.display());
                return EXIT_CONFIG;
            }
        },
        None => None,
    };
    let cfg = match build_config(text.as_deref(), &cli.set, cli.out.clone(), cli.format) {
        Ok(c) => c,
        Err(ConfigError(msg)) => {
            let _ = writeln!(stderr, "config error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let result = match cli.command {
        Command::Potential => cmd_potential(&cfg, stdout, stderr),
        Command::Identities => cmd_identities(&cfg, stdout, stderr),
        Command::Integrals => cmd_integrals(&cfg, stdout),
        Command::Converge => cmd_converge(&cfg, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let code = exit_for(&e);
            let _ = writeln!(stderr, "{}: {e}", if code == EXIT_CONFIG { "config error" } else { "convergence failure" });
            code
        }
    }
}
