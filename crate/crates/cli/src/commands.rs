//! Subcommand definitions and dispatch.
//!
//! Exit codes: 0 on success, 1 on computation or constraint failure, 2 on
//! usage errors (including config-file problems). Every numeric option can
//! also come from a `key = value` config file; explicit flags win.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ghostmap_core::gaussian_states::{apply_chain, eigen_residual, norm_squared};
use ghostmap_core::model::{
    self, build_eta0, build_eta1, build_eta2_with, build_h0, delta_branches, eta0_generator,
    eta1_generator, eta2_generator, gauss_decompose, ground_state, sector_params, BranchSign,
    ChainParams, ModelParams, SectorLabel,
};
use ghostmap_core::operator_algebra::{
    bch_adjoint_oracle, classify_definiteness, max_matrix_distance, transform_quadratic,
    CanonicalMap, Sign, WeylQuadraticForm, PX, PY, X, Y,
};
use ghostmap_core::scan::{
    self, figure_panels, find_boundary, sweep_lambda, write_csv, DeltaMode, Figure,
};
use ghostmap_core::{cx, NumericPolicy};

use crate::config::{optional_f64, require_f64, Settings};
use crate::output::{fmt_complex, fmt_real};

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or config: exit code 2.
    Usage(String),
    /// Failed computation or violated constraint: exit code 1.
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Computation(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Computation(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<ghostmap_core::Error> for CliError {
    fn from(err: ghostmap_core::Error) -> Self {
        CliError::Computation(err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "ghostmap",
    version,
    about = "Ghost-free quantisation pipeline: similarity maps, spectra, normalisability scans"
)]
pub struct Cli {
    /// Config file with `key = value` lines; flags win on conflict.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Truncate displayed numbers to this many decimal places (full 17
    /// significant digits by default).
    #[arg(long, global = true)]
    pub digits: Option<usize>,

    /// Override the constructor-check tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    pub construction_tol: Option<f64>,

    /// Override the derived-equality tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    pub equality_tol: Option<f64>,

    /// Override the region-classification tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    pub region_tol: Option<f64>,

    /// Override the pole-detection tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    pub pole_tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args)]
pub struct ModelArgs {
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
}

impl ModelArgs {
    fn resolve(&self, cfg: &Settings) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(
            require_f64(self.nu, cfg, "nu")?,
            require_f64(self.omega, cfg, "omega")?,
            require_f64(self.g, cfg, "g")?,
        ))
    }

    fn resolve_with_defaults(
        &self,
        cfg: &Settings,
        defaults: (f64, f64, f64),
    ) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(
            optional_f64(self.nu, cfg, "nu")?.unwrap_or(defaults.0),
            optional_f64(self.omega, cfg, "omega")?.unwrap_or(defaults.1),
            optional_f64(self.g, cfg, "g")?.unwrap_or(defaults.2),
        ))
    }
}

#[derive(Args)]
pub struct SectorArgs {
    /// Branch sign epsilon: 1 or -1.
    #[arg(long)]
    eps: Option<i64>,
    /// Branch sign eta: 1 or -1.
    #[arg(long)]
    eta: Option<i64>,
}

impl SectorArgs {
    fn resolve(&self, cfg: &Settings) -> Result<SectorLabel, CliError> {
        let eps = crate::config::require_i64(self.eps, cfg, "eps")?;
        let eta = crate::config::require_i64(self.eta, cfg, "eta")?;
        Ok(SectorLabel::new(parse_sign(eps)?, parse_sign(eta)?))
    }

    fn resolve_or(&self, cfg: &Settings, default: (i64, i64)) -> Result<SectorLabel, CliError> {
        let eps = match self.eps {
            Some(v) => v,
            None => cfg.i64("eps")?.unwrap_or(default.0),
        };
        let eta = match self.eta {
            Some(v) => v,
            None => cfg.i64("eta")?.unwrap_or(default.1),
        };
        Ok(SectorLabel::new(parse_sign(eps)?, parse_sign(eta)?))
    }
}

fn parse_sign(v: i64) -> Result<BranchSign, CliError> {
    BranchSign::from_int(v).ok_or_else(|| CliError::Usage(format!("sign must be 1 or -1, got {v}")))
}

fn parse_branch(s: &str) -> Result<DeltaMode, CliError> {
    match s {
        "plus" => Ok(DeltaMode::BranchPlus),
        "minus" => Ok(DeltaMode::BranchMinus),
        other => Err(CliError::Usage(format!(
            "branch must be `plus` or `minus`, got `{other}`"
        ))),
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Print the branch parameters and normalisability verdict of a sector.
    #[command(allow_negative_numbers = true)]
    Frame {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sector: SectorArgs,
    },
    /// Apply a similarity chain to the base Hamiltonian and print the result.
    #[command(allow_negative_numbers = true)]
    Derive {
        #[command(flatten)]
        model: ModelArgs,
        /// Chain to apply: h0 | h0,eta0 | h0,eta0,eta1 | h0,eta0,eta1,eta2.
        #[arg(long, default_value = "h0")]
        chain: String,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Explicit kappa (default: the hermitising choice).
        #[arg(long)]
        kappa: Option<f64>,
        /// Explicit xi (default: the hermitising choice).
        #[arg(long)]
        xi: Option<f64>,
        /// Explicit mu (default: from the constraints).
        #[arg(long)]
        mu: Option<f64>,
        /// Explicit tau (default: from the constraints).
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Run the verification battery; exit 0 only if every check passes.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sector: SectorArgs,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Derive delta from this Omega-constraint branch instead of --delta.
        #[arg(long)]
        branch: Option<String>,
        /// Corrupt a map first; the symplectic check must then fail.
        #[arg(long)]
        corrupt: bool,
    },
    /// Enumerate the energy spectrum of a sector.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sector: SectorArgs,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Sweep lambda and write the figure CSVs.
    #[command(allow_negative_numbers = true)]
    Scan {
        /// Which figure to reproduce: 1 or 2.
        #[arg(long)]
        figure: Option<u32>,
        /// Restrict figure 2 to one delta branch: plus or minus.
        #[arg(long)]
        branch: Option<String>,
        /// Output directory for the CSV files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        lambda_min: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Bisect a region boundary inside a bracket.
    #[command(allow_negative_numbers = true)]
    Boundary {
        /// What to bisect: `theta` (|Theta| = 1) or `norm` (normalisability flip).
        #[arg(long)]
        target: Option<String>,
        /// Bracket endpoints.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        bracket: Vec<f64>,
        /// Delta branch for the theta target.
        #[arg(long)]
        branch: Option<String>,
        /// Interval width tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sector: SectorArgs,
        /// Fixed delta for the norm target.
        #[arg(long)]
        delta: Option<f64>,
    },
}

pub fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let cfg = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let mut policy = NumericPolicy::default();
    if let Some(t) = optional_f64(cli.construction_tol, &cfg, "construction-tol")? {
        policy.construction_tol = t;
    }
    if let Some(t) = optional_f64(cli.equality_tol, &cfg, "equality-tol")? {
        policy.equality_tol = t;
    }
    if let Some(t) = optional_f64(cli.region_tol, &cfg, "region-tol")? {
        policy.region_tol = t;
    }
    if let Some(t) = optional_f64(cli.pole_tol, &cfg, "pole-tol")? {
        policy.pole_tol = t;
    }
    let digits = match cli.digits {
        Some(d) => Some(d),
        None => cfg.i64("digits")?.map(|d| d as usize),
    };

    match &cli.command {
        Command::Frame { model, sector } => cmd_frame(model, sector, &cfg, &policy, digits),
        Command::Derive {
            model,
            chain,
            delta,
            lambda,
            kappa,
            xi,
            mu,
            tau,
        } => cmd_derive(
            model, chain, *delta, *lambda, *kappa, *xi, *mu, *tau, &cfg, &policy, digits,
        ),
        Command::Verify {
            model,
            sector,
            delta,
            lambda,
            branch,
            corrupt,
        } => cmd_verify(
            model, sector, *delta, *lambda, branch.as_ref(), *corrupt, &cfg, &policy,
        ),
        Command::Spectrum {
            model,
            sector,
            nmax,
        } => cmd_spectrum(model, sector, *nmax, &cfg, &policy, digits),
        Command::Scan {
            figure,
            branch,
            out,
            lambda_min,
            lambda_max,
            step,
        } => cmd_scan(
            *figure,
            branch.as_ref(),
            out.as_ref(),
            *lambda_min,
            *lambda_max,
            *step,
            &cfg,
            &policy,
        ),
        Command::Boundary {
            target,
            bracket,
            branch,
            tol,
            model,
            sector,
            delta,
        } => cmd_boundary(
            target.as_ref(), bracket, branch.as_ref(), *tol, model, sector, *delta, &cfg, &policy, digits,
        ),
    }
}

fn cmd_frame(
    model: &ModelArgs,
    sector: &SectorArgs,
    cfg: &Settings,
    policy: &NumericPolicy,
    digits: Option<usize>,
) -> Result<ExitCode, CliError> {
    let params = model.resolve(cfg)?;
    let label = sector.resolve(cfg)?;
    let frame = sector_params(&params, label, policy)?;
    let state = ground_state(&frame);
    let verdict = if norm_squared(&state).is_finite() {
        "normalisable"
    } else {
        "non-normalisable"
    };
    println!(
        "sector (eps, eta) = ({}, {})",
        frame.label.epsilon.value() as i64,
        frame.label.eta.value() as i64
    );
    println!("alpha   = {}", fmt_complex(frame.alpha, digits));
    println!("beta    = {}", fmt_complex(frame.beta, digits));
    println!("gamma   = {}", fmt_complex(frame.gamma, digits));
    println!("real    = {}", frame.is_real);
    println!("energy  = {}", fmt_complex(frame.ground_energy(), digits));
    println!("verdict = {verdict}");
    Ok(ExitCode::SUCCESS)
}

struct ResolvedChain {
    params: ModelParams,
    delta: f64,
    lambda: f64,
    kappa: Option<f64>,
    xi: Option<f64>,
    mu: Option<f64>,
    tau: Option<f64>,
}

impl ResolvedChain {
    fn kappa_xi(&self, policy: &NumericPolicy) -> Result<(f64, f64), CliError> {
        match (self.kappa, self.xi) {
            (Some(k), Some(x)) => Ok((k, x)),
            _ => {
                let (k, x) = model::hermitising_choices(
                    self.params.nu,
                    self.params.omega,
                    self.delta,
                    self.lambda,
                    policy,
                )?;
                Ok((self.kappa.unwrap_or(k), self.xi.unwrap_or(x)))
            }
        }
    }

    fn mu_tau(&self, policy: &NumericPolicy) -> Result<(f64, f64), CliError> {
        match (self.mu, self.tau) {
            (Some(m), Some(t)) => Ok((m, t)),
            _ => {
                let c = model::eta2_constraints(&self.params, self.delta, self.lambda, policy)?;
                Ok((self.mu.unwrap_or(c.mu), self.tau.unwrap_or(c.tau)))
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_derive(
    model_args: &ModelArgs,
    chain: &str,
    delta: Option<f64>,
    lambda: Option<f64>,
    kappa: Option<f64>,
    xi: Option<f64>,
    mu: Option<f64>,
    tau: Option<f64>,
    cfg: &Settings,
    policy: &NumericPolicy,
    digits: Option<usize>,
) -> Result<ExitCode, CliError> {
    let params = model_args.resolve(cfg)?;
    let stages: Vec<&str> = chain.split(',').map(str::trim).collect();
    if stages.first() != Some(&"h0") {
        return Err(CliError::Usage(format!(
            "chain must start with h0, got `{chain}`"
        )));
    }
    let needs_eta = stages.len() > 1;
    let resolved = ResolvedChain {
        params,
        delta: if needs_eta {
            require_f64(delta, cfg, "delta")?
        } else {
            0.0
        },
        lambda: if needs_eta {
            require_f64(lambda, cfg, "lambda")?
        } else {
            0.0
        },
        kappa: optional_f64(kappa, cfg, "kappa")?,
        xi: optional_f64(xi, cfg, "xi")?,
        mu: optional_f64(mu, cfg, "mu")?,
        tau: optional_f64(tau, cfg, "tau")?,
    };

    let mut map = CanonicalMap::identity();
    for stage in &stages[1..] {
        map = match *stage {
            "eta0" => map.then(&build_eta0(resolved.delta, resolved.lambda)),
            "eta1" => {
                let (k, x) = resolved.kappa_xi(policy)?;
                map.then(&build_eta1(k, x))
            }
            "eta2" => {
                let (m, t) = resolved.mu_tau(policy)?;
                map.then(&build_eta2_with(m, t, policy))
            }
            other => {
                return Err(CliError::Usage(format!("unknown chain stage `{other}`")));
            }
        };
    }
    let form = transform_quadratic(&map, &build_h0(&params), policy)?;
    print_form(&form, policy, digits);
    Ok(ExitCode::SUCCESS)
}

fn print_form(form: &WeylQuadraticForm, policy: &NumericPolicy, digits: Option<usize>) {
    let names = ["x", "y", "px", "py"];
    println!("weyl coefficients (coefficient of the symmetrised product):");
    for j in 0..4 {
        for k in j..4 {
            let c = form.coefficient(j, k);
            if c.norm() > 0.0 {
                println!("  {:>2} {:>2}  {}", names[j], names[k], fmt_complex(c, digits));
            }
        }
    }
    if form.shift().norm() > 0.0 {
        println!("  shift  {}", fmt_complex(form.shift(), digits));
    }
    println!(
        "hermitian    = {} (residual {:.3e})",
        form.is_hermitian(policy),
        form.hermiticity_residual()
    );
    println!("pt-symmetric = {}", form.is_pt_symmetric(policy));
    match classify_definiteness(form, policy) {
        Ok(report) => {
            let sig: Vec<&str> = report
                .kinetic_signature
                .iter()
                .map(|s| match s {
                    Sign::Positive => "+",
                    Sign::Negative => "-",
                    Sign::Zero => "0",
                })
                .collect();
            println!("kinetic signature = ({})", sig.join(", "));
            println!("definiteness = {:?}", report.definiteness);
        }
        Err(_) => {
            println!("kinetic signature = n/a (non-hermitian)");
            println!("definiteness = n/a (non-hermitian)");
        }
    }
}

struct CheckList {
    failures: usize,
}

impl CheckList {
    fn new() -> Self {
        Self { failures: 0 }
    }

    fn check(&mut self, name: &str, residual: f64, tol: f64) {
        if residual <= tol {
            println!("ok   {name} (residual {residual:.3e})");
        } else {
            println!("FAIL {name} (residual {residual:.3e} > {tol:.3e})");
            self.failures += 1;
        }
    }

    fn check_result<T>(&mut self, name: &str, result: Result<T, ghostmap_core::Error>) -> Option<T> {
        match result {
            Ok(v) => {
                println!("ok   {name}");
                Some(v)
            }
            Err(e) => {
                println!("FAIL {name}: {e}");
                self.failures += 1;
                None
            }
        }
    }

    fn skip(&self, name: &str, why: &str) {
        println!("skip {name} ({why})");
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    model_args: &ModelArgs,
    sector: &SectorArgs,
    delta: Option<f64>,
    lambda: Option<f64>,
    branch: Option<&String>,
    corrupt: bool,
    cfg: &Settings,
    policy: &NumericPolicy,
) -> Result<ExitCode, CliError> {
    // defaults: the first figure's panel (b) model
    let params = model_args.resolve_with_defaults(cfg, (4.0, -2.0, 1.0))?;
    let label = sector.resolve_or(cfg, (1, 1))?;
    let lambda = optional_f64(lambda, cfg, "lambda")?.unwrap_or(1.0);
    let delta = match branch.map(String::as_str).or(cfg.string("branch").as_deref()) {
        Some("plus") => delta_branches(lambda, params.nu, params.omega)?.0,
        Some("minus") => delta_branches(lambda, params.nu, params.omega)?.1,
        Some(other) => {
            return Err(CliError::Usage(format!(
                "branch must be `plus` or `minus`, got `{other}`"
            )))
        }
        None => optional_f64(delta, cfg, "delta")?.unwrap_or(0.0),
    };
    println!(
        "model: nu = {}, omega = {}, g = {}, delta = {}, lambda = {}, sector = ({}, {})",
        params.nu,
        params.omega,
        params.coupling,
        delta,
        lambda,
        label.epsilon.value() as i64,
        label.eta.value() as i64
    );

    let mut checks = CheckList::new();

    // symplectic residuals, optionally with a deliberate corruption
    let eta0 = if corrupt {
        let mut m = *build_eta0(delta, lambda).matrix();
        m[(X, X)] += cx(1e-3, 0.0);
        CanonicalMap::from_matrix_unchecked(m)
    } else {
        build_eta0(delta, lambda)
    };
    checks.check(
        "symplectic eta0",
        eta0.symplectic_residual(),
        policy.construction_tol,
    );

    let choices = model::hermitising_choices(params.nu, params.omega, delta, lambda, policy);
    let eta1 = choices.as_ref().ok().map(|&(k, x)| build_eta1(k, x));
    match &eta1 {
        Some(map) => checks.check(
            "symplectic eta1",
            map.symplectic_residual(),
            policy.construction_tol,
        ),
        None => checks.skip("symplectic eta1", "hermitising choices singular"),
    }

    let constraints = model::eta2_constraints(&params, delta, lambda, policy);
    let eta2 = constraints
        .as_ref()
        .ok()
        .map(|c| build_eta2_with(c.mu, c.tau, policy));
    match &eta2 {
        Some(map) => checks.check(
            "symplectic eta2",
            map.symplectic_residual(),
            policy.construction_tol,
        ),
        None => checks.skip("symplectic eta2", "constraints not satisfied here"),
    }

    // closed-form maps against the adjoint-series oracle
    checks.check(
        "bch oracle eta0",
        max_matrix_distance(
            eta0.matrix(),
            bch_adjoint_oracle(&eta0_generator(delta, lambda), 30).matrix(),
        ),
        policy.equality_tol,
    );
    if let (Some(map), Ok((k, x))) = (&eta1, &choices) {
        checks.check(
            "bch oracle eta1",
            max_matrix_distance(map.matrix(), bch_adjoint_oracle(&eta1_generator(*k, *x), 30).matrix()),
            policy.equality_tol,
        );
    }
    if let (Some(map), Ok(c)) = (&eta2, &constraints) {
        checks.check(
            "bch oracle eta2",
            max_matrix_distance(
                map.matrix(),
                bch_adjoint_oracle(&eta2_generator(c.mu, c.tau), 30).matrix(),
            ),
            policy.equality_tol,
        );
    }

    // Gauss decomposition at sample strengths
    for (m, t) in [(0.37, 0.52), (0.37, -0.52)] {
        let f = gauss_decompose(m, t, policy)?;
        checks.check(
            &format!("gauss decomposition (mu = {m}, tau = {t})"),
            max_matrix_distance(
                f.composed_map().matrix(),
                build_eta2_with(m, t, policy).matrix(),
            ),
            policy.construction_tol,
        );
    }

    // printed-form regressions
    checks.check_result("h1 closed form", model::derive_h1(&params, delta, lambda, policy));
    let h2 = match &choices {
        Ok(_) => checks.check_result("h2 closed form", model::derive_h2(&params, delta, lambda, policy)),
        Err(_) => {
            checks.skip("h2 closed form", "hermitising choices singular");
            None
        }
    };
    if let Some(h2) = &h2 {
        checks.check(
            "h2 drops i px x and i py y",
            h2.matrix()[(X, PX)].norm().max(h2.matrix()[(Y, PY)].norm()),
            policy.construction_tol,
        );
    }

    // eigen residuals stage by stage
    let frame = sector_params(&params, label, policy)?;
    let phi0 = ground_state(&frame);
    checks.check(
        "h0 eigen residual",
        eigen_residual(&build_h0(&params), &phi0, frame.ground_energy()).max_residual(),
        policy.region_tol,
    );
    if let (Some(h2), Ok((k, x))) = (&h2, &choices) {
        let chain = ChainParams::new(delta, lambda, *k, *x, 0.0, 0.0);
        let psi2 = apply_chain(&chain.state_transforms()[..2], &phi0, policy)?;
        checks.check(
            "h2 eigen residual",
            eigen_residual(h2, &psi2, frame.ground_energy()).max_residual(),
            policy.region_tol,
        );
    }
    match &constraints {
        Ok(_) => {
            let chain = ChainParams::hermitising(&params, delta, lambda, policy)?;
            if let Some(h3) = checks.check_result("h3 closed form", model::derive_h3(&params, &chain, policy))
            {
                checks.check(
                    "h3 hermitian",
                    h3.hermiticity_residual(),
                    policy.equality_tol,
                );
                let phi3 = apply_chain(&chain.state_transforms(), &phi0, policy)?;
                checks.check(
                    "h3 eigen residual",
                    eigen_residual(&h3, &phi3, frame.ground_energy()).max_residual(),
                    policy.region_tol,
                );
            }
        }
        Err(e) => checks.skip("h3 stage", &e.to_string()),
    }

    if checks.failures == 0 {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{} check(s) failed", checks.failures);
        Ok(ExitCode::from(1))
    }
}

fn cmd_spectrum(
    model_args: &ModelArgs,
    sector: &SectorArgs,
    nmax: Option<u32>,
    cfg: &Settings,
    policy: &NumericPolicy,
    digits: Option<usize>,
) -> Result<ExitCode, CliError> {
    let params = model_args.resolve(cfg)?;
    let label = sector.resolve(cfg)?;
    let nmax = match nmax {
        Some(n) => n,
        None => cfg.u32("nmax")?.ok_or_else(|| {
            CliError::Usage("missing --nmax (flag or config)".into())
        })?,
    };
    let frame = sector_params(&params, label, policy)?;
    let levels = model::energy_levels(&frame, nmax, policy);
    println!("N,branch,energy_re,energy_im,real");
    for level in &levels {
        let branch = match level.index {
            model::LevelIndex::Plus(n) => format!("+{n}"),
            model::LevelIndex::Minus(n) => format!("-{n}"),
            model::LevelIndex::Diagonal => "diag".to_string(),
        };
        println!(
            "{},{},{},{},{}",
            level.n_total,
            branch,
            fmt_real(level.energy.re, digits),
            fmt_real(level.energy.im, digits),
            u8::from(level.is_real),
        );
    }
    let min_real = levels
        .iter()
        .filter(|l| l.is_real)
        .map(|l| l.energy.re)
        .fold(f64::INFINITY, f64::min);
    println!("# levels = {}", levels.len());
    println!("# min real energy = {}", fmt_real(min_real, digits));
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    figure: Option<u32>,
    branch: Option<&String>,
    out: Option<&PathBuf>,
    lambda_min: Option<f64>,
    lambda_max: Option<f64>,
    step: Option<f64>,
    cfg: &Settings,
    policy: &NumericPolicy,
) -> Result<ExitCode, CliError> {
    let figure = match figure {
        Some(f) => f,
        None => cfg.u32("figure")?.ok_or_else(|| {
            CliError::Usage("missing --figure (flag or config)".into())
        })?,
    };
    let figure = match figure {
        1 => Figure::One,
        2 => Figure::Two,
        other => {
            return Err(CliError::Usage(format!(
                "figure must be 1 or 2, got {other}"
            )))
        }
    };
    let branch = match branch.map(String::as_str).or(cfg.string("branch").as_deref()) {
        Some(s) => Some(parse_branch(s)?),
        None => None,
    };
    if branch.is_some() && figure == Figure::One {
        return Err(CliError::Usage(
            "--branch applies to figure 2 only".into(),
        ));
    }
    let out_dir = match out {
        Some(p) => p.clone(),
        None => cfg.string("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
    };
    std::fs::create_dir_all(&out_dir).map_err(ghostmap_core::Error::from)?;

    let lambda_min = optional_f64(lambda_min, cfg, "lambda-min")?;
    let lambda_max = optional_f64(lambda_max, cfg, "lambda-max")?;
    let step = optional_f64(step, cfg, "step")?;

    for (stem, mut panel_cfg) in figure_panels(figure) {
        if let Some(mode) = branch {
            if panel_cfg.delta_mode != mode {
                continue;
            }
        }
        if let Some(v) = lambda_min {
            panel_cfg.lambda_min = v;
        }
        if let Some(v) = lambda_max {
            panel_cfg.lambda_max = v;
        }
        if let Some(v) = step {
            panel_cfg.step = v;
        }
        let rows = sweep_lambda(&panel_cfg, policy)?;
        let path = out_dir.join(format!("{stem}.csv"));
        write_csv(&path, &rows)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_boundary(
    target: Option<&String>,
    bracket: &[f64],
    branch: Option<&String>,
    tol: Option<f64>,
    model_args: &ModelArgs,
    sector: &SectorArgs,
    delta: Option<f64>,
    cfg: &Settings,
    policy: &NumericPolicy,
    digits: Option<usize>,
) -> Result<ExitCode, CliError> {
    let target = target
        .cloned()
        .or_else(|| cfg.string("target"))
        .unwrap_or_else(|| "theta".to_string());
    let bracket: Vec<f64> = if bracket.len() == 2 {
        bracket.to_vec()
    } else if let Some(raw) = cfg.string("bracket") {
        let vals: Vec<f64> = raw
            .split_whitespace()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("config key `bracket`: {e}")))
            })
            .collect::<Result<_, _>>()?;
        vals
    } else {
        return Err(CliError::Usage("missing --bracket LO HI".into()));
    };
    if bracket.len() != 2 {
        return Err(CliError::Usage("--bracket needs exactly two values".into()));
    }
    let tol = optional_f64(tol, cfg, "tol")?.unwrap_or(1e-10);

    let root = match target.as_str() {
        "theta" => {
            let params = model_args.resolve_with_defaults(cfg, (4.0, -2.0, 3.0))?;
            let mode = match branch.map(String::as_str).or(cfg.string("branch").as_deref()) {
                Some(s) => parse_branch(s)?,
                None => DeltaMode::BranchPlus,
            };
            let f = |lambda: f64| -> f64 {
                let d = match delta_branches(lambda, params.nu, params.omega) {
                    Ok((dp, dm)) => match mode {
                        DeltaMode::BranchPlus => dp,
                        DeltaMode::BranchMinus => dm,
                        DeltaMode::Fixed(d) => d,
                    },
                    Err(_) => return f64::NAN,
                };
                match model::theta(&params, d, lambda, policy) {
                    Ok(th) => th.abs() - 1.0,
                    Err(_) => f64::NAN,
                }
            };
            find_boundary(f, bracket[0], bracket[1], tol)?
        }
        "norm" => {
            let params = model_args.resolve_with_defaults(cfg, (4.0, -2.0, 0.0))?;
            let label = sector.resolve_or(cfg, (1, 1))?;
            let delta = optional_f64(delta, cfg, "delta")?.unwrap_or(0.0);
            // a pole of the hermitising choices marks a region boundary,
            // so an evaluation error counts as an exact zero
            let f = |lambda: f64| -> f64 {
                match scan::hat_state_at(&params, delta, lambda, label, policy) {
                    Ok(state) => {
                        let a = state.alpha().re;
                        let b = state.beta().re;
                        let det = (state.alpha() * state.beta()
                            - state.gamma() * state.gamma())
                        .re;
                        a.min(b).min(det)
                    }
                    Err(_) => 0.0,
                }
            };
            find_boundary(f, bracket[0], bracket[1], tol)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "target must be `theta` or `norm`, got `{other}`"
            )))
        }
    };
    println!("boundary = {}", fmt_real(root, digits));
    Ok(ExitCode::SUCCESS)
}
