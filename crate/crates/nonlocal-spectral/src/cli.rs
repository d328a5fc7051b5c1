//! Command-line entry point: configuration parsing, subcommand dispatch,
//! CSV emission and exit codes.
//!
//! Exit codes: 0 success, 1 error, 2 when `gap-check` finds a condition
//! that does not hold.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::band;
use crate::domain::{AxisBox, Domain};
use crate::error::{Error, Result};
use crate::galerkin;
use crate::gap;
use crate::kernel::Kernel;
use crate::quadrature;

// ---------------------------------------------------------------- config

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kernel: Option<KernelConfig>,
    pub domain: Option<DomainConfig>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    pub converge: Option<ConvergeConfig>,
    pub gap_check: Option<GapCheckConfig>,
    pub example_exp: Option<ExampleExpConfig>,
    pub scaling_study: Option<ScalingConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: String,
    pub dim: Option<usize>,
    pub p: Option<f64>,
    pub lambda: Option<f64>,
    pub a: Option<f64>,
    pub path: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub dim: usize,
    pub boxes: Vec<BoxConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub order: Option<usize>,
    pub grid_density: Option<usize>,
    pub refinement_steps: Option<usize>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            order: None,
            grid_density: None,
            refinement_steps: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub n_list: Vec<usize>,
    pub k_max: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapCheckConfig {
    pub axis: Option<usize>,
    pub lipschitz_k: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleExpConfig {
    pub p: Option<f64>,
    pub lambda: Option<f64>,
    pub l_grid: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub scales: Vec<f64>,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let path = path.ok_or_else(|| {
        Error::Config("--config <path> is required for this subcommand".into())
    })?;
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn require<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing `{key}` in configuration")))
}

fn build_kernel(cfg: &RunConfig) -> Result<Kernel> {
    let kc = cfg
        .kernel
        .as_ref()
        .ok_or_else(|| Error::Config("missing `[kernel]` section".into()))?;
    let dim = kc.dim.unwrap_or(1);
    match kc.family.as_str() {
        "gaussian" => Kernel::gaussian(require(kc.lambda, "kernel.lambda")?, dim),
        "tent" => Kernel::tent(require(kc.a, "kernel.a")?, dim),
        "generalized_exponential" => Kernel::generalized_exponential(
            require(kc.p, "kernel.p")?,
            require(kc.lambda, "kernel.lambda")?,
            dim,
        ),
        "tabulated" => {
            let path = require(kc.path.clone(), "kernel.path")?;
            Kernel::tabulated_from_csv(Path::new(&path), dim)
        }
        other => Err(Error::Config(format!(
            "unknown kernel family `{other}`; expected gaussian, tent, generalized_exponential or tabulated"
        ))),
    }
}

fn build_domain(cfg: &RunConfig) -> Result<Domain> {
    let dc = cfg
        .domain
        .as_ref()
        .ok_or_else(|| Error::Config("missing `[domain]` section".into()))?;
    let boxes = dc
        .boxes
        .iter()
        .map(|b| AxisBox::new(b.lo.clone(), b.hi.clone()))
        .collect();
    Domain::new(boxes, dc.dim)
}

struct QuadratureParams {
    order: usize,
    grid_density: usize,
    refinement_steps: usize,
}

fn quadrature_params(cfg: &RunConfig, dim: usize) -> QuadratureParams {
    QuadratureParams {
        order: cfg.quadrature.order.unwrap_or_else(|| quadrature::default_order(dim)),
        grid_density: cfg.quadrature.grid_density.unwrap_or(32),
        refinement_steps: cfg.quadrature.refinement_steps.unwrap_or(30),
    }
}

// ---------------------------------------------------------------- output

/// 17 significant digits: round-trippable f64 text.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

// ---------------------------------------------------------------- argv

#[derive(Parser)]
#[command(
    name = "nonlocal-spectral",
    about = "Continuous spectrum band, discrete eigenpairs and spectral-gap checks for the non-local Neumann dispersal operator on box-union domains",
    version
)]
struct Cli {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSVs and summary.txt
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker count (recorded for reproducibility; execution is serial)
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the continuous spectrum band and b(x) samples
    Spectrum,
    /// Evaluate the sufficient spectral-gap conditions
    GapCheck,
    /// Galerkin convergence sweep over basis orders
    Converge {
        /// Basis orders, comma-separated (overrides the config list)
        #[arg(long = "N", value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Number of non-trivial eigenpairs
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Gap margin Δ sweep for the generalized exponential kernel family
    ExampleExp {
        /// Shape parameter
        #[arg(long)]
        p: Option<f64>,
        /// Rate parameter
        #[arg(long)]
        lambda: Option<f64>,
        /// Domain half-length grid as lo:hi:steps
        #[arg(long = "L-grid")]
        l_grid: Option<String>,
    },
    /// Minimum retained mass across domain scales
    ScalingStudy,
}

/// Parse argv, run the requested pipeline and return the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Spectrum => cmd_spectrum(cli),
        Command::GapCheck => cmd_gap_check(cli),
        Command::Converge { n, kmax } => cmd_converge(cli, n.as_deref(), *kmax),
        Command::ExampleExp { p, lambda, l_grid } => {
            cmd_example_exp(cli, *p, *lambda, l_grid.as_deref())
        }
        Command::ScalingStudy => cmd_scaling_study(cli),
    }
}

fn summary_header(cli: &Cli, command: &str) -> String {
    format!("command={command}\nworkers={}\n", cli.workers)
}

// ------------------------------------------------------------- commands

fn cmd_spectrum(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli.config.as_deref())?;
    let kernel = build_kernel(&cfg)?;
    let domain = build_domain(&cfg)?;
    let qp = quadrature_params(&cfg, domain.dim());
    let band = band::continuous_spectrum(
        &kernel,
        &domain,
        qp.order,
        qp.grid_density,
        qp.refinement_steps,
    )?;

    let mut csv = String::new();
    writeln!(csv, "sup_sigma_c={}", fmt_f(band.sup_sigma_c)).unwrap();
    writeln!(csv, "inf_sigma_c={}", fmt_f(band.inf_sigma_c)).unwrap();
    for k in 0..domain.dim() {
        write!(csv, "x{k},").unwrap();
    }
    writeln!(csv, "b").unwrap();
    for (x, b) in &band.b_samples {
        for xi in x {
            write!(csv, "{},", fmt_f(*xi)).unwrap();
        }
        writeln!(csv, "{}", fmt_f(*b)).unwrap();
    }
    write_file(&cli.out, "band.csv", &csv)?;

    let mut summary = summary_header(cli, "spectrum");
    writeln!(summary, "sup_sigma_c={}", fmt_f(band.sup_sigma_c)).unwrap();
    writeln!(summary, "inf_sigma_c={}", fmt_f(band.inf_sigma_c)).unwrap();
    write!(summary, "argmin_b=").unwrap();
    for (i, xi) in band.argmin_b.iter().enumerate() {
        if i > 0 {
            write!(summary, ",").unwrap();
        }
        write!(summary, "{}", fmt_f(*xi)).unwrap();
    }
    writeln!(summary).unwrap();
    write_file(&cli.out, "summary.txt", &summary)?;
    Ok(0)
}

fn cmd_gap_check(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli.config.as_deref())?;
    let kernel = build_kernel(&cfg)?;
    let domain = build_domain(&cfg)?;
    let qp = quadrature_params(&cfg, domain.dim());
    let (axis, lipschitz_k) = cfg
        .gap_check
        .as_ref()
        .map(|g| (g.axis, g.lipschitz_k))
        .unwrap_or((None, None));

    let mut reports = vec![
        gap::check_cross_mass(&kernel, &domain, axis, qp.order)?,
        gap::check_variance(&kernel, &domain, qp.order)?,
    ];
    if let Some(k) = lipschitz_k {
        for kk in 1..=k {
            reports.push(gap::check_lipschitz_k(&kernel, &domain, kk, qp.order)?);
        }
    }

    let mut csv = String::from("condition,lhs,rhs,holds,margin\n");
    for r in &reports {
        writeln!(
            csv,
            "{},{},{},{},{}",
            r.condition,
            fmt_f(r.lhs),
            fmt_f(r.rhs),
            r.holds,
            fmt_f(r.rhs - r.lhs)
        )
        .unwrap();
    }
    write_file(&cli.out, "gap_report.csv", &csv)?;

    let mut summary = summary_header(cli, "gap-check");
    if let Some(r) = reports.first() {
        writeln!(summary, "sup_sigma_c={}", fmt_f(-r.rhs)).unwrap();
    }
    for r in &reports {
        writeln!(
            summary,
            "{}: holds={} lhs={} rhs={} energy_lower_bound={}",
            r.condition,
            r.holds,
            fmt_f(r.lhs),
            fmt_f(r.rhs),
            fmt_f(r.energy_lower_bound)
        )
        .unwrap();
        writeln!(summary, "{}: witness: {}", r.condition, r.witness).unwrap();
    }
    write_file(&cli.out, "summary.txt", &summary)?;

    if reports.iter().any(|r| !r.holds) {
        Ok(2)
    } else {
        Ok(0)
    }
}

fn cmd_converge(cli: &Cli, n_override: Option<&[usize]>, kmax_override: Option<usize>) -> Result<i32> {
    let cfg = load_config(cli.config.as_deref())?;
    let kernel = build_kernel(&cfg)?;
    let domain = build_domain(&cfg)?;
    let qp = quadrature_params(&cfg, domain.dim());

    let (n_list, k_max) = {
        let cc = cfg.converge.as_ref();
        let n_list: Vec<usize> = match n_override {
            Some(n) => n.to_vec(),
            None => require(cc.map(|c| c.n_list.clone()), "converge.n_list")?,
        };
        let k_max = kmax_override
            .or_else(|| cc.and_then(|c| c.k_max))
            .unwrap_or(3);
        (n_list, k_max)
    };

    let table = galerkin::converge(&kernel, &domain, &n_list, k_max, qp.order)?;

    let mut csv = String::from("N,k,beta,residual,margin\n");
    for row in &table.rows {
        writeln!(
            csv,
            "{},{},{},{},{}",
            row.n,
            row.k,
            fmt_f(row.beta),
            fmt_f(row.residual),
            fmt_f(row.gap_margin)
        )
        .unwrap();
    }
    write_file(&cli.out, "convergence.csv", &csv)?;

    // eigenfunction samples at the largest basis order
    let mut efcsv = String::new();
    for k in 0..domain.dim() {
        write!(efcsv, "x{k},").unwrap();
    }
    let cols: Vec<String> = table.final_pairs.iter().map(|p| format!("v{}", p.index)).collect();
    writeln!(efcsv, "{}", cols.join(",")).unwrap();
    let density = qp.grid_density.max(2);
    for b in domain.boxes() {
        let dim = domain.dim();
        let mut idx = vec![0usize; dim];
        loop {
            let x: Vec<f64> = (0..dim)
                .map(|k| b.lo[k] + (b.hi[k] - b.lo[k]) * idx[k] as f64 / density as f64)
                .collect();
            for xi in &x {
                write!(efcsv, "{},", fmt_f(*xi)).unwrap();
            }
            let vals: Vec<String> = table
                .final_pairs
                .iter()
                .map(|p| fmt_f(table.basis.eval_combo(&p.coefficients, &x)))
                .collect();
            writeln!(efcsv, "{}", vals.join(",")).unwrap();
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] <= density {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == dim {
                    break;
                }
            }
            if k == dim {
                break;
            }
        }
    }
    write_file(&cli.out, "eigenfunctions.csv", &efcsv)?;

    let mut summary = summary_header(cli, "converge");
    writeln!(summary, "sup_sigma_c={}", fmt_f(table.sup_sigma_c)).unwrap();
    writeln!(summary, "monotone_ok={}", table.monotone_ok).unwrap();
    for p in &table.final_pairs {
        writeln!(
            summary,
            "beta_{}={} residual={} margin={}",
            p.index,
            fmt_f(p.value),
            fmt_f(p.residual),
            fmt_f(p.value - table.sup_sigma_c)
        )
        .unwrap();
    }
    for inc in &table.increments {
        writeln!(
            summary,
            "increment N={}->{} k={}: {}",
            inc.n_from,
            inc.n_to,
            inc.k,
            fmt_f(inc.l2_increment)
        )
        .unwrap();
    }
    write_file(&cli.out, "summary.txt", &summary)?;
    Ok(0)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "grid `{spec}` must have the form lo:hi:steps"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid lower bound `{}`", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid upper bound `{}`", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid step count `{}`", parts[2])))?;
    if !(lo > 0.0 && hi > lo && steps >= 2) {
        return Err(Error::Config(
            "grid requires 0 < lo < hi and at least 2 steps".into(),
        ));
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn cmd_example_exp(
    cli: &Cli,
    p_override: Option<f64>,
    lambda_override: Option<f64>,
    grid_override: Option<&str>,
) -> Result<i32> {
    // the config file is optional here: all parameters have flags
    let cfg = match cli.config.as_deref() {
        Some(path) => Some(load_config(Some(path))?),
        None => None,
    };
    let ec = cfg.as_ref().and_then(|c| c.example_exp.as_ref());
    let p = p_override
        .or_else(|| ec.and_then(|e| e.p))
        .ok_or_else(|| Error::Config("missing `p` (flag --p or config example_exp.p)".into()))?;
    let lambda = lambda_override
        .or_else(|| ec.and_then(|e| e.lambda))
        .ok_or_else(|| {
            Error::Config("missing `lambda` (flag --lambda or config example_exp.lambda)".into())
        })?;
    let grid_spec = grid_override
        .map(|s| s.to_string())
        .or_else(|| ec.and_then(|e| e.l_grid.clone()))
        .unwrap_or_else(|| "0.1:10:25".to_string());
    let l_grid = parse_grid(&grid_spec)?;

    let mut csv = String::from("p,lambda,L,eta,delta\n");
    for &l in &l_grid {
        let r = gap::example_exp_delta(p, lambda, l)?;
        writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_f(r.p),
            fmt_f(r.lambda),
            fmt_f(r.l),
            fmt_f(r.eta),
            fmt_f(r.delta)
        )
        .unwrap();
    }
    write_file(&cli.out, "delta_sweep.csv", &csv)?;

    let mut summary = summary_header(cli, "example-exp");
    writeln!(summary, "p={}", fmt_f(p)).unwrap();
    writeln!(summary, "lambda={}", fmt_f(lambda)).unwrap();
    if p > 1.0 {
        let eta0 = gap::example_exp_threshold(p, lambda)?;
        println!("eta_threshold={}", fmt_f(eta0));
        writeln!(summary, "eta_threshold={}", fmt_f(eta0)).unwrap();
    } else {
        writeln!(summary, "case=unconditional (p <= 1)").unwrap();
    }
    write_file(&cli.out, "summary.txt", &summary)?;
    Ok(0)
}

fn cmd_scaling_study(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli.config.as_deref())?;
    let kernel = build_kernel(&cfg)?;
    let domain = build_domain(&cfg)?;
    let qp = quadrature_params(&cfg, domain.dim());
    let scales = cfg
        .scaling_study
        .as_ref()
        .map(|s| s.scales.clone())
        .unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]);

    let table = band::retained_mass_scaling_study(
        &kernel,
        &domain,
        &scales,
        qp.order,
        qp.grid_density,
        qp.refinement_steps,
    )?;

    let mut csv = String::from("scale,min_b\n");
    for (s, m) in &table {
        writeln!(csv, "{},{}", fmt_f(*s), fmt_f(*m)).unwrap();
    }
    write_file(&cli.out, "scaling.csv", &csv)?;

    let mut summary = summary_header(cli, "scaling-study");
    for (s, m) in &table {
        writeln!(summary, "scale={} min_b={}", fmt_f(*s), fmt_f(*m)).unwrap();
    }
    if let Some((s, m)) = table.last() {
        writeln!(summary, "final: sup_sigma_c={} at scale {}", fmt_f(-m), fmt_f(*s)).unwrap();
    }
    write_file(&cli.out, "summary.txt", &summary)?;
    Ok(0)
}
