use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wavecert::campaign;
use wavecert::config::RunConfig;
use wavecert::control::{adjoint_check, apply_w_harmonic, unitarity_check, Control};
use wavecert::counterexample::{
    build_h, divergence_certificate, membership_report, radial_at_2, smoothness_diagnostics, value_at_2,
    CoefficientSchedule, DivergenceConfig, MChoice, MembershipConfig,
};
use wavecert::dspace::{basis_element, basis_element_normalized, membership_test, polyharmonic_check, PolyClassP};
use wavecert::exact;
use wavecert::fields::HarmonicField;
use wavecert::harmonics::{AngularExpansion, HarmonicIndex};
use wavecert::radon::{observe, radon_constant_certificate, uniform_grid, unobservability_residual};
use wavecert::wavesim::{extract_jump_vr, jump_csv, kirchhoff_eval, kirchhoff_field, observed_jump, EPS_SCHEDULE};

#[derive(Parser)]
#[command(name = "wavecert", version, about = "Observability and reachability checks for the 3D wave equation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Run configuration; flags override the config file.
#[derive(Args)]
struct Global {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    band_limit: Option<usize>,
    #[arg(long, global = true)]
    r_max_factor: Option<f64>,
    #[arg(long, global = true)]
    tau_step: Option<f64>,
    #[arg(long, global = true)]
    tau_max_factor: Option<f64>,
    #[arg(long, global = true)]
    tol_oracle: Option<f64>,
    #[arg(long, global = true)]
    tol_unobservability: Option<f64>,
    #[arg(long, global = true)]
    tol_jump: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Unobservable subspaces D^ξ.
    Dspace {
        #[command(subcommand)]
        cmd: DspaceCmd,
    },
    /// Observation trace (Oy)(τ) of a state.
    Observe(ObserveArgs),
    /// Control operator W.
    Control {
        #[command(subcommand)]
        cmd: ControlCmd,
    },
    /// Dual system by Kirchhoff's formula.
    Wavesim {
        #[command(subcommand)]
        cmd: WavesimCmd,
    },
    /// The non-smooth unobservable state.
    Counterexample {
        #[command(subcommand)]
        cmd: CounterexampleCmd,
    },
    /// Run every acceptance criterion and write report.json.
    VerifyAll {
        #[arg(long, default_value = "paper")]
        preset: String,
    },
}

#[derive(Subcommand)]
enum DspaceCmd {
    /// Basis element (1/r)(1/r)^{l-2j} Y_l^m on r ≥ ξ.
    Basis {
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        /// Scale to unit norm.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify membership of a state in D^ξ.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ObserveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Grid end is `tau_max_factor · xi0`; defaults to the support radius.
    #[arg(long)]
    xi0: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ControlCmd {
    /// Seeded random spline control.
    Random {
        #[arg(long = "L")]
        band: usize,
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wf sampled on [0, R_max].
    Apply {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        r_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ‖Wf‖ against ‖f‖.
    Unitarity {
        #[arg(long)]
        input: PathBuf,
    },
    /// (Wf, y) against (f, Oy).
    Adjoint {
        #[arg(long)]
        control: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
}

#[derive(Subcommand)]
enum WavesimCmd {
    /// Jump of v_r across r = ξ₀ - t, as CSV.
    Jump {
        #[arg(long)]
        xi0: f64,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long)]
        l: usize,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Jump of Oy at τ = ξ₀ and the observability verdict.
    Observed {
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        xi0: f64,
        #[arg(long)]
        l: usize,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
    },
    /// v^y(x, t) by sphere quadrature and per harmonic.
    Eval {
        #[arg(long)]
        input: PathBuf,
        /// Point as `x,y,z`.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
}

#[derive(Subcommand)]
enum CounterexampleCmd {
    /// Build h_N and emit all certificates and growth tables.
    Run {
        #[arg(long = "N")]
        n: usize,
        /// inv_k, unit, or a comma-separated list of coefficients.
        #[arg(long, default_value = "inv_k")]
        schedule: String,
        #[arg(long, default_value = "zero")]
        m_choice: String,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Input or configuration problem (exit 2) versus failed verification (exit 1).
enum Failure {
    Usage(String),
    Verification,
}

impl From<wavecert::Error> for Failure {
    fn from(e: wavecert::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn verdict(pass: bool) -> Outcome {
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn load_config(g: &Global) -> Result<RunConfig, Failure> {
    let mut cfg = match &g.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = g.band_limit {
        cfg.band_limit = v;
    }
    if let Some(v) = g.r_max_factor {
        cfg.r_max_factor = v;
    }
    if let Some(v) = g.tau_step {
        cfg.tau_step = v;
    }
    if let Some(v) = g.tau_max_factor {
        cfg.tau_max_factor = v;
    }
    if let Some(v) = g.tol_oracle {
        cfg.tol_oracle = v;
    }
    if let Some(v) = g.tol_unobservability {
        cfg.tol_unobservability = v;
    }
    if let Some(v) = g.tol_jump {
        cfg.tol_jump = v;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = &g.out_dir {
        cfg.out_dir = v.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_field(path: &Path, cfg: &RunConfig) -> Result<HarmonicField, Failure> {
    let y = HarmonicField::from_json(&read(path)?)?;
    cfg.check_band(y.band_limit())?;
    Ok(y)
}

fn read_control(path: &Path, cfg: &RunConfig) -> Result<Control, Failure> {
    let f = Control::from_json(&read(path)?)?;
    cfg.check_band(f.band_limit())?;
    Ok(f)
}

/// Writes to `out`, or to stdout when absent.
fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn pretty(v: &Value) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn index(l: usize, m: i64) -> Result<HarmonicIndex, Failure> {
    Ok(HarmonicIndex::new(l, m)?)
}

fn dspace(cmd: &DspaceCmd, cfg: &RunConfig) -> Outcome {
    match cmd {
        DspaceCmd::Basis { xi, l, j, m, normalize, out } => {
            cfg.check_band(*l)?;
            let p = PolyClassP::monomial(*l, *j)?;
            let y = AngularExpansion::single(index(*l, *m)?, 1.0);
            let field = if *normalize { basis_element_normalized(*xi, &p, &y)? } else { basis_element(*xi, &p, &y)? };
            emit(out.as_deref(), &field.to_json()?)
        }
        DspaceCmd::Check { input, points, out } => {
            let y = read_field(input, cfg)?;
            let xi = y.support();
            let taus = uniform_grid(cfg.tau_max_factor * cfg.r_max_factor * xi, cfg.tau_step)?;
            let residual = unobservability_residual(&y, xi, &taus)?;
            let membership = membership_test(&y, cfg.r_max_factor * xi, *points)?;
            let mut terms = Vec::new();
            for (t, (idx, profile)) in membership.terms.iter().zip(y.terms()) {
                let poly = match profile.as_monomial() {
                    Some(_) if idx.l >= 1 => {
                        Some(polyharmonic_check(&HarmonicField::single(xi, idx, profile.clone())?)?.passed)
                    }
                    _ => None,
                };
                terms.push(json!({
                    "l": idx.l, "m": idx.m,
                    "polyharmonic": poly,
                    "membership_residual": t.residual,
                    "membership_tolerance": wavecert::dspace::MEMBERSHIP_REL_TOL,
                    "member": t.member,
                }));
            }
            let exact_constant = if y.terms().all(|(_, p)| p.as_monomial().is_some()) {
                Some(radon_constant_certificate(&y)?)
            } else {
                None
            };
            let member = membership.member && residual <= cfg.tol_unobservability && exact_constant != Some(false);
            let report = json!({
                "xi": xi,
                "terms": terms,
                "unobservability_residual": residual,
                "unobservability_tolerance": cfg.tol_unobservability,
                "radon_constant_exact": exact_constant,
                "member": member,
            });
            emit(out.as_deref(), &pretty(&report)?)?;
            verdict(member)
        }
    }
}

fn observe_cmd(args: &ObserveArgs, cfg: &RunConfig) -> Outcome {
    let y = read_field(&args.input, cfg)?;
    let xi0 = args.xi0.unwrap_or(y.support());
    let taus = uniform_grid(cfg.tau_max_factor * xi0, cfg.tau_step)?;
    let trace = observe(&y, &taus)?;
    let text = match args.format {
        Format::Csv => trace.to_csv(),
        Format::Json => trace.to_json()?,
    };
    emit(args.out.as_deref(), &text)
}

fn control(cmd: &ControlCmd, cfg: &RunConfig) -> Outcome {
    match cmd {
        ControlCmd::Random { band, xi, out } => {
            cfg.check_band(*band)?;
            emit(out.as_deref(), &Control::random(cfg.seed, *band, *xi)?.to_json()?)
        }
        ControlCmd::Apply { input, r_step, out } => {
            let f = read_control(input, cfg)?;
            let grid = uniform_grid(cfg.r_max_factor * f.delay(), *r_step)?;
            let grid: Vec<f64> = grid.into_iter().filter(|&r| r > 0.0).collect();
            emit(out.as_deref(), &apply_w_harmonic(&f, &grid)?.to_json()?)
        }
        ControlCmd::Unitarity { input } => {
            let f = read_control(input, cfg)?;
            let rep = unitarity_check(&f)?;
            let pass = rep.relative_gap <= cfg.tol_oracle;
            let v = json!({
                "norm_f": rep.norm_f, "norm_wf": rep.norm_wf,
                "relative_gap": rep.relative_gap, "tolerance": cfg.tol_oracle, "pass": pass,
            });
            emit(None, &pretty(&v)?)?;
            verdict(pass)
        }
        ControlCmd::Adjoint { control, state } => {
            let f = read_control(control, cfg)?;
            let y = read_field(state, cfg)?;
            let rep = adjoint_check(&f, &y)?;
            let pass = rep.relative <= cfg.tol_oracle;
            let v = json!({
                "wf_y": rep.wf_y, "f_oy": rep.f_oy,
                "relative": rep.relative, "tolerance": cfg.tol_oracle, "pass": pass,
            });
            emit(None, &pretty(&v)?)?;
            verdict(pass)
        }
    }
}

fn wavesim(cmd: &WavesimCmd, cfg: &RunConfig) -> Outcome {
    match cmd {
        WavesimCmd::Jump { xi0, t, l, m, out } => {
            cfg.check_band(*l)?;
            let alpha = AngularExpansion::single(index(*l, *m)?, 1.0);
            let mut data = Vec::new();
            for &time in t {
                data.extend(extract_jump_vr(*xi0, &alpha, time, &EPS_SCHEDULE)?);
            }
            emit(out.as_deref(), &jump_csv(&data))?;
            verdict(data.iter().all(|d| !d.inconclusive))
        }
        WavesimCmd::Observed { xi, xi0, l, m } => {
            cfg.check_band(*l)?;
            let alpha = AngularExpansion::single(index(*l, *m)?, 1.0);
            let rep = observed_jump(*xi, *xi0, &alpha)?;
            emit(None, &(serde_json::to_string_pretty(&rep)? + "\n"))
        }
        WavesimCmd::Eval { input, x, t } => {
            let point: [f64; 3] =
                x.as_slice().try_into().map_err(|_| Failure::Usage(format!("--x needs 3 values, got {}", x.len())))?;
            let y = read_field(input, cfg)?;
            let direct = kirchhoff_eval(&y, point, *t)?;
            let harmonic = kirchhoff_field(&y, point, *t)?;
            let v = json!({ "x": x, "t": t, "direct": direct, "harmonic": harmonic });
            emit(None, &pretty(&v)?)
        }
    }
}

fn counterexample(cmd: &CounterexampleCmd, cfg: &RunConfig) -> Outcome {
    let CounterexampleCmd::Run { n, schedule, m_choice, k_max, out } = cmd;
    let schedule: CoefficientSchedule = schedule.parse()?;
    let m_choice: MChoice = m_choice.parse()?;
    let h = build_h(*n, &schedule, m_choice)?;
    let at_two = value_at_2(&h)?;
    let radial: Vec<Value> = radial_at_2(&h)
        .iter()
        .map(|t| {
            json!({
                "k": t.k, "l": t.index.l, "m": t.index.m,
                "value": exact::to_f64(&t.value), "value_exact": t.value.to_string(),
                "radial_derivative": exact::to_f64(&t.radial_derivative),
                "radial_derivative_exact": t.radial_derivative.to_string(),
            })
        })
        .collect();
    let smooth = smoothness_diagnostics(&h, &[1.2, 1.5, 3.0, 4.0, 8.0], 0.1, cfg.tol_unobservability)?;
    let mcfg = MembershipConfig { k_max: *k_max, tol: cfg.tol_unobservability, ..MembershipConfig::default() };
    let member = membership_report(&h, &mcfg)?;
    let dcfg = DivergenceConfig::default();
    let divergence = match schedule {
        CoefficientSchedule::Custom(_) => None,
        _ => Some(divergence_certificate(&schedule, &dcfg)?),
    };
    let mut pass = member.passed;
    if let Some(d) = &divergence {
        pass &= d.doubling && d.law;
        match schedule {
            CoefficientSchedule::InvK => pass &= d.l2_tail_pass,
            _ => pass &= d.l2_linear == Some(true),
        }
    }
    let report = json!({
        "N": n,
        "schedule": schedule,
        "m_choice": m_choice,
        "value_at_2": at_two,
        "radial_at_2": radial,
        "smoothness": smooth,
        "membership": member,
        "divergence": divergence,
        "pass": pass,
    });
    let report_path = out.clone().unwrap_or_else(|| cfg.out_dir.join("counterexample.json"));
    write_file(&report_path, &pretty(&report)?)?;
    let dir = report_path.parent().map(Path::to_path_buf).unwrap_or_default();
    if let Some(d) = &divergence {
        write_file(&dir.join("growth.csv"), &d.to_csv())?;
    }
    let mut norms = String::from("N,l2_at_two,beltrami_at_two\n");
    for k in 1..=*n {
        let l2 = exact::to_f64(&wavecert::counterexample::l2_at_two(&schedule, k)?);
        let b = exact::to_f64(&wavecert::counterexample::beltrami_partial_sum(&schedule, k)?);
        norms.push_str(&format!("{k},{l2:.16e},{b:.16e}\n"));
    }
    write_file(&dir.join("norms_at_two.csv"), &norms)?;
    eprintln!("{} counterexample N={n} schedule={}", if pass { "PASS" } else { "FAIL" }, schedule.name());
    verdict(pass)
}

fn verify_all(preset: &str, g: &Global) -> Outcome {
    let mut cfg = RunConfig::preset(preset)?;
    if g.config.is_some() || g.seed.is_some() || g.out_dir.is_some() {
        let over = load_config(g)?;
        cfg.seed = over.seed;
        cfg.out_dir = over.out_dir;
    }
    let results = campaign::run_all(&cfg)?;
    for r in &results {
        println!("{r}");
    }
    write_file(&cfg.out_dir.join("report.json"), &(campaign::report_json(&results)? + "\n"))?;
    for r in &results {
        for a in &r.artifacts {
            write_file(&cfg.out_dir.join(&a.name), &a.contents)?;
        }
    }
    verdict(results.iter().all(|r| r.pass))
}

fn run(cli: &Cli) -> Outcome {
    if let Command::VerifyAll { preset } = &cli.command {
        return verify_all(preset, &cli.global);
    }
    let cfg = load_config(&cli.global)?;
    match &cli.command {
        Command::Dspace { cmd } => dspace(cmd, &cfg),
        Command::Observe(args) => observe_cmd(args, &cfg),
        Command::Control { cmd } => control(cmd, &cfg),
        Command::Wavesim { cmd } => wavesim(cmd, &cfg),
        Command::Counterexample { cmd } => counterexample(cmd, &cfg),
        Command::VerifyAll { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
