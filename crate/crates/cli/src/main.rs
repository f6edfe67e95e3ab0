//! `lightasep`: exact solves, matrix product sweeps, simulation and experiments from the command line.
//!
//! Exit codes: 0 success, 1 a verdict or check failed, 2 usage error, 3 numeric, guard or I/O failure.

mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lightasep::exact::{
    build_generator, loc_marginals, mixing_time_exact, sector_size, simple_relation_table, site_densities, stationary,
    DEFAULT_STATE_CAP,
};
use lightasep::experiments::acceptance::{run_criterion, CRITERIA};
use lightasep::experiments::{run_experiment, to_json17, ExperimentConfig, EXPERIMENTS};
use lightasep::mpa::{
    build_representation, densities_with, loc1_with, sigma_left_via_aw, verify_dehp, DehpResiduals, DoubleDouble,
    LocMethod, Precision,
};
use lightasep::phase::{classify, light_mass_split, limiting_densities};
use lightasep::sim::{
    fmt_f64, init_rng, rle_decode, rle_encode, sample_stationary, simulate_open, ExactSampler, SampleSpec, SimState,
    StationaryMode, TrajectoryRecord,
};
use lightasep::{BoundaryParams, RateParams};
use output::Output;

/// Residual bound for `exact verify-relation`.
const RELATION_TOL: f64 = 1e-9;
/// Residual bound for `mpa verify-dehp`.
const DEHP_TOL: f64 = 1e-10;

#[derive(Debug)]
pub enum Failure {
    Verdict(String),
    Usage(String),
    Runtime(String),
}

impl From<lightasep::Error> for Failure {
    fn from(e: lightasep::Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "lightasep", version, about = "Open ASEP with light particles")]
struct Cli {
    /// Output directory (default: $LIGHTASEP_OUT_DIR, else the working directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File name stem for the outputs (default: derived from the subcommand).
    #[arg(long, global = true)]
    name: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary parameters, phase and limiting densities.
    Phase(Model),
    /// Brute-force generator computations.
    #[command(subcommand)]
    Exact(ExactCmd),
    /// Matrix product ansatz computations.
    #[command(subcommand)]
    Mpa(MpaCmd),
    /// Simulate the open system and record light positions, sites and snapshots.
    Simulate(SimulateArgs),
    /// Run one of the scaling experiments from a config file.
    Experiment(ExperimentArgs),
    /// Run the acceptance suite.
    Reproduce(ReproduceArgs),
}

/// Model parameters, either as rates or as `A, B, C, D`.
#[derive(Args, Clone)]
struct Model {
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "A", alias = "a")]
    a: Option<f64>,
    #[arg(long = "B", alias = "b", allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long = "C", alias = "c")]
    c: Option<f64>,
    #[arg(long = "D", alias = "d", allow_negative_numbers = true)]
    d: Option<f64>,
}

impl Model {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            q: Some(self.q),
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.d,
            ..Default::default()
        }
    }

    fn boundary(&self) -> Result<BoundaryParams, Failure> {
        Ok(self.config().boundary()?)
    }

    fn rates(&self) -> Result<RateParams, Failure> {
        Ok(self.config().rates()?)
    }
}

#[derive(Subcommand)]
enum ExactCmd {
    /// Stationary distribution of one sector, with site densities.
    Stationary(Sector),
    /// Marginal laws of the light particle positions.
    Loc(Sector),
    /// Worst-case total-variation mixing time.
    Mix {
        #[command(flatten)]
        sector: Sector,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
    },
    /// Both sides of the one-light relation for every 1 ≤ k ≤ l ≤ n.
    VerifyRelation {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        model: Model,
    },
}

#[derive(Args)]
struct Sector {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    r: usize,
    #[command(flatten)]
    model: Model,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    High,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::High => Precision::High,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Relation,
}

#[derive(Subcommand)]
enum MpaCmd {
    /// Site densities of first-class particles.
    Density {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
        precision: PrecisionArg,
        #[command(flatten)]
        model: Model,
    },
    /// Law of the position of a single light particle.
    Loc1 {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
        precision: PrecisionArg,
        #[command(flatten)]
        model: Model,
    },
    /// Residuals of the quadratic algebra on a truncated representation.
    VerifyDehp {
        #[arg(long, default_value_t = 20)]
        m: usize,
        #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
        precision: PrecisionArg,
        #[command(flatten)]
        model: Model,
    },
    /// Left boundary density from the Askey–Wilson moment at parameter `t`.
    SigmaAw {
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        model: Model,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InitArg {
    Stationary,
    AllOnes,
    AllZeros,
    File,
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of sites (taken from the file with `--init file`).
    #[arg(long)]
    n: Option<usize>,
    /// Number of light particles (taken from the file with `--init file`).
    #[arg(long)]
    r: Option<usize>,
    #[command(flatten)]
    model: Model,
    /// Time horizon.
    #[arg(long)]
    t: f64,
    #[arg(long)]
    seed: u64,
    /// Replicas; replica i uses seed + i.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 1.0)]
    sample_dt: f64,
    #[arg(long, value_enum, default_value_t = InitArg::Stationary)]
    init: InitArg,
    /// Initial configuration for `--init file`: digits (`2110…`) or `count:symbol` runs (`1:2,3:1,…`).
    #[arg(long)]
    init_file: Option<PathBuf>,
    /// Burn-in horizon when the sector is too large for an exact stationary draw.
    #[arg(long)]
    burnin: Option<f64>,
    /// Sites (1-based) whose occupation is recorded.
    #[arg(long, value_delimiter = ',')]
    sites: Vec<i64>,
    /// Also write run-length encoded configurations at every sample time.
    #[arg(long)]
    snapshots: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of mass-split, concentration, uniformity, coexistence-profile, boundary-density, drift, hitting, coalescence.
    name: String,
    /// Config file: JSON object or `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed in the config; stochastic experiments need one of the two.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long, default_value = "primary")]
    suite: String,
    #[arg(long)]
    seed: u64,
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let out = |default: &str| Output::new(cli.out.clone(), cli.name.clone().unwrap_or_else(|| default.to_string()));
    match &cli.command {
        Command::Phase(m) => phase(m, out("phase")?),
        Command::Exact(ExactCmd::Stationary(s)) => exact_stationary(s, out("exact-stationary")?),
        Command::Exact(ExactCmd::Loc(s)) => exact_loc(s, out("exact-loc")?),
        Command::Exact(ExactCmd::Mix { sector, eps }) => exact_mix(sector, *eps, out("exact-mix")?),
        Command::Exact(ExactCmd::VerifyRelation { n, model }) => verify_relation(*n, model, out("verify-relation")?),
        Command::Mpa(MpaCmd::Density { n, precision, model }) => {
            mpa_density(*n, (*precision).into(), model, out("mpa-density")?)
        }
        Command::Mpa(MpaCmd::Loc1 { n, method, precision, model }) => {
            mpa_loc1(*n, *method, (*precision).into(), model, out("mpa-loc1")?)
        }
        Command::Mpa(MpaCmd::VerifyDehp { m, precision, model }) => {
            mpa_dehp(*m, (*precision).into(), model, out("verify-dehp")?)
        }
        Command::Mpa(MpaCmd::SigmaAw { t, model }) => sigma_aw(*t, model, out("sigma-aw")?),
        Command::Simulate(a) => simulate(a, out("simulate")?),
        Command::Experiment(a) => experiment(a, out(&a.name)?),
        Command::Reproduce(a) => reproduce(a, out("reproduce")?),
    }
}

fn json17(v: &impl serde::Serialize) -> Result<String, Failure> {
    Ok(to_json17(v)? + "\n")
}

fn model_json(b: &BoundaryParams) -> Value {
    let r = b.rates();
    json!({
        "q": b.q, "alpha": r.alpha, "beta": r.beta, "gamma": r.gamma, "delta": r.delta,
        "A": b.a, "B": b.b, "C": b.c, "D": b.d,
    })
}

fn with(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(m), Value::Object(e)) = (&mut base, extra) {
        m.extend(e);
    }
    base
}

fn phase(m: &Model, mut out: Output) -> Outcome {
    let b = m.boundary()?;
    let label = classify(&b);
    let lim = limiting_densities(&b);
    let split = light_mass_split(&b).ok().map(|(l, r)| json!({ "left": l, "right": r }));
    let report = with(
        model_json(&b),
        json!({
            "phase": label.phase.name(),
            "region": label.region.name(),
            "limits": lim,
            "light_mass_split": split,
        }),
    );
    let text = json17(&report)?;
    print!("{text}");
    out.write(".json", &text)?;
    out.finish("phase", None, &model_json(&b))?;
    Ok(())
}

fn config_string(tau: &[u8]) -> String {
    tau.iter().map(|v| char::from(b'0' + v)).collect()
}

fn exact_stationary(s: &Sector, mut out: Output) -> Outcome {
    let b = s.model.boundary()?;
    let g = build_generator(s.n, s.r, &b.rates())?;
    let pi = stationary(&g)?;
    let mut csv = String::from("index,config,probability\n");
    for (i, tau) in g.sector().iter().enumerate() {
        writeln!(csv, "{i},{},{}", config_string(&tau), fmt_f64(pi.as_slice()[i])).unwrap();
    }
    let mut dens = String::from("site,rho_0,rho_1,rho_2\n");
    let per: Vec<Vec<f64>> = (0..=2).map(|v| site_densities(g.sector(), &pi, v)).collect::<Result<_, _>>()?;
    for (k, ((r0, r1), r2)) in per[0].iter().zip(&per[1]).zip(&per[2]).enumerate() {
        writeln!(dens, "{},{},{},{}", k + 1, fmt_f64(*r0), fmt_f64(*r1), fmt_f64(*r2)).unwrap();
    }
    let p = out.write(".csv", &csv)?;
    out.write(".densities.csv", &dens)?;
    println!("{} states, residual {:.3e}; wrote {}", g.dim(), g.residual(pi.as_slice()), p.display());
    out.finish("exact stationary", None, &with(model_json(&b), json!({ "n": s.n, "r": s.r })))?;
    Ok(())
}

fn exact_loc(s: &Sector, mut out: Output) -> Outcome {
    let b = s.model.boundary()?;
    let g = build_generator(s.n, s.r, &b.rates())?;
    let loc = loc_marginals(g.sector(), &stationary(&g)?)?;
    let mut csv = String::from("site");
    for i in 1..=s.r {
        write!(csv, ",loc_{i}").unwrap();
    }
    csv.push('\n');
    for k in 0..s.n {
        write!(csv, "{}", k + 1).unwrap();
        for row in &loc {
            write!(csv, ",{}", fmt_f64(row[k])).unwrap();
        }
        csv.push('\n');
    }
    let p = out.write(".csv", &csv)?;
    println!("wrote {}", p.display());
    out.finish("exact loc", None, &with(model_json(&b), json!({ "n": s.n, "r": s.r })))?;
    Ok(())
}

fn exact_mix(s: &Sector, eps: f64, mut out: Output) -> Outcome {
    let b = s.model.boundary()?;
    let t = mixing_time_exact(s.n, s.r, &b.rates(), eps)?;
    let cfg = with(model_json(&b), json!({ "n": s.n, "r": s.r, "eps": eps }));
    let text = json17(&with(cfg.clone(), json!({ "t_mix": t })))?;
    print!("{text}");
    out.write(".json", &text)?;
    out.finish("exact mix", None, &cfg)?;
    Ok(())
}

fn verify_relation(n: usize, m: &Model, mut out: Output) -> Outcome {
    let b = m.boundary()?;
    let rows = simple_relation_table(n, &b.rates())?;
    let mut csv = String::from("k,l,lhs,rhs,residual\n");
    let mut worst: f64 = 0.0;
    for r in &rows {
        let res = (r.lhs - r.rhs).abs();
        worst = worst.max(res);
        writeln!(csv, "{},{},{},{},{}", r.k, r.l, fmt_f64(r.lhs), fmt_f64(r.rhs), fmt_f64(res)).unwrap();
    }
    out.write(".csv", &csv)?;
    println!("max residual {worst:.6e} over {} pairs (tolerance {RELATION_TOL:e})", rows.len());
    out.finish("exact verify-relation", None, &with(model_json(&b), json!({ "n": n })))?;
    if worst <= RELATION_TOL {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("relation residual {worst:e} exceeds {RELATION_TOL:e}")))
    }
}

fn mpa_density(n: usize, precision: Precision, m: &Model, mut out: Output) -> Outcome {
    let b = m.boundary()?;
    let rho = densities_with(&b, n, precision)?;
    let mut csv = String::from("site,density\n");
    for (k, v) in rho.iter().enumerate() {
        writeln!(csv, "{},{}", k + 1, fmt_f64(*v)).unwrap();
    }
    let p = out.write(".csv", &csv)?;
    println!("wrote {}", p.display());
    out.finish("mpa density", None, &with(model_json(&b), json!({ "n": n, "precision": precision.name() })))?;
    Ok(())
}

fn mpa_loc1(n: usize, method: MethodArg, precision: Precision, m: &Model, mut out: Output) -> Outcome {
    let b = m.boundary()?;
    let via = match method {
        MethodArg::Direct => LocMethod::Direct,
        MethodArg::Relation => LocMethod::Relation,
    };
    let p = loc1_with(&b, n, via, precision)?;
    let mut csv = String::from("site,probability\n");
    for (k, v) in p.iter().enumerate() {
        writeln!(csv, "{},{}", k + 1, fmt_f64(*v)).unwrap();
    }
    let path = out.write(".csv", &csv)?;
    println!("wrote {}", path.display());
    let method = match method {
        MethodArg::Direct => "direct",
        MethodArg::Relation => "relation",
    };
    let cfg = with(model_json(&b), json!({ "n": n, "method": method, "precision": precision.name() }));
    out.finish("mpa loc1", None, &cfg)?;
    Ok(())
}

fn mpa_dehp(m: usize, precision: Precision, model: &Model, mut out: Output) -> Outcome {
    let b = model.boundary()?;
    let res: DehpResiduals = match precision {
        Precision::Double => verify_dehp(&build_representation::<f64>(&b, m)?)?,
        Precision::High => verify_dehp(&build_representation::<DoubleDouble>(&b, m)?)?,
    };
    let text = json17(&json!({ "bulk": res.bulk, "left": res.left, "right": res.right, "max": res.max() }))?;
    print!("{text}");
    out.write(".json", &text)?;
    out.finish("mpa verify-dehp", None, &with(model_json(&b), json!({ "m": m, "precision": precision.name() })))?;
    if res.max() <= DEHP_TOL {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("algebra residual {:e} exceeds {DEHP_TOL:e}", res.max())))
    }
}

fn sigma_aw(t: f64, m: &Model, mut out: Output) -> Outcome {
    let b = m.boundary()?;
    let s = sigma_left_via_aw(&b, t)?;
    let closed = limiting_densities(&b).sigma_left;
    let text = json17(&json!({ "t": t, "sigma_left_aw": s, "sigma_left_closed": closed }))?;
    print!("{text}");
    out.write(".json", &text)?;
    out.finish("mpa sigma-aw", None, &with(model_json(&b), json!({ "t": t })))?;
    Ok(())
}

fn read_init(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let t = text.trim();
    if t.contains(':') {
        return Ok(rle_decode(t)?);
    }
    t.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' | '1' | '2' => Ok(c as u8 - b'0'),
            _ => Err(Failure::Usage(format!("unexpected {c:?} in initial configuration"))),
        })
        .collect()
}

fn simulate(a: &SimulateArgs, mut out: Output) -> Outcome {
    let rates = a.model.rates()?;
    let b = a.model.boundary()?;
    let fixed = match a.init {
        InitArg::File => {
            let path = a.init_file.as_ref().ok_or_else(|| Failure::Usage("--init file needs --init-file".into()))?;
            Some(read_init(path)?)
        }
        _ if a.init_file.is_some() => return Err(Failure::Usage("--init-file needs --init file".into())),
        _ => None,
    };
    let (n, r) = match &fixed {
        Some(c) => {
            let lights = c.iter().filter(|&&v| v == 2).count();
            if a.n.is_some_and(|n| n != c.len()) || a.r.is_some_and(|r| r != lights) {
                return Err(Failure::Usage("--n/--r disagree with the initial configuration".into()));
            }
            (c.len(), lights)
        }
        None => (a.n.ok_or_else(|| Failure::Usage("--n is required".into()))?, a.r.unwrap_or(0)),
    };
    if n == 0 || r > n {
        return Err(Failure::Usage(format!("need 1 ≤ n and r ≤ n, got n = {n}, r = {r}")));
    }
    if a.reps == 0 {
        return Err(Failure::Usage("--reps must be positive".into()));
    }
    let exact = a.init == InitArg::Stationary && sector_size(n, r) <= DEFAULT_STATE_CAP as u128;
    let sampler = if exact { Some(ExactSampler::new(n, r, &rates)?) } else { None };
    let burnin = StationaryMode::Burnin { horizon: a.burnin };
    let spec = SampleSpec { sites: a.sites.clone(), snapshots: a.snapshots };
    let records: Vec<TrajectoryRecord> = lightasep::experiments::replicate(a.reps, a.seed, |s| {
        let init = match (a.init, &fixed) {
            (InitArg::Stationary, _) => match &sampler {
                Some(x) => x.draw(&mut init_rng(s)),
                None => sample_stationary(n, r, &rates, burnin, s)?,
            },
            (InitArg::AllOnes, _) => SimState::open((0..n).map(|i| if i < r { 2 } else { 1 }).collect())?,
            (InitArg::AllZeros, _) => SimState::open((0..n).map(|i| if i < r { 2 } else { 0 }).collect())?,
            (InitArg::File, Some(c)) => SimState::open(c.clone())?,
            (InitArg::File, None) => unreachable!(),
        };
        Ok(simulate_open(&init, &rates, a.t, s, a.sample_dt, &spec)?.0)
    })?;
    let mut csv = TrajectoryRecord::csv_header(r, &a.sites);
    csv.push('\n');
    let mut snaps = String::from("rep t config\n");
    let mut inits = String::from("rep seed config\n");
    let mut events = 0;
    for (i, rec) in records.iter().enumerate() {
        rec.write_csv_rows(i, &mut csv);
        for line in rec.snapshot_lines().lines() {
            writeln!(snaps, "{i} {line}").unwrap();
        }
        writeln!(inits, "{i} {} {}", rec.seed, rle_encode(&rec.init)).unwrap();
        events += rec.events;
    }
    let p = out.write(".csv", &csv)?;
    out.write(".init.txt", &inits)?;
    if a.snapshots {
        out.write(".snapshots.txt", &snaps)?;
    }
    println!("{} replicas, {events} events; wrote {}", a.reps, p.display());
    let init = match a.init {
        InitArg::Stationary => "stationary",
        InitArg::AllOnes => "all-ones",
        InitArg::AllZeros => "all-zeros",
        InitArg::File => "file",
    };
    let cfg = with(
        model_json(&b),
        json!({
            "n": n, "r": r, "t": a.t, "reps": a.reps, "sample_dt": a.sample_dt, "init": init,
            "init_mode": match (a.init, exact) {
                (InitArg::Stationary, true) => "exact",
                (InitArg::Stationary, false) => "burn-in",
                _ => "fixed",
            },
            "burnin": a.burnin, "sites": a.sites, "snapshots": a.snapshots,
        }),
    );
    out.finish("simulate", Some(a.seed), &cfg)?;
    Ok(())
}

const STOCHASTIC: [&str; 4] = ["concentration", "drift", "hitting", "coalescence"];

fn experiment(a: &ExperimentArgs, mut out: Output) -> Outcome {
    if !EXPERIMENTS.contains(&a.name.as_str()) {
        return Err(Failure::Usage(format!(
            "unknown experiment {:?}; expected one of {}",
            a.name,
            EXPERIMENTS.join(", ")
        )));
    }
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if cfg.experiment.as_ref().is_some_and(|e| e != &a.name) {
        return Err(Failure::Usage(format!("config is for {:?}, not {:?}", cfg.experiment.as_ref().unwrap(), a.name)));
    }
    if a.seed.is_some() {
        cfg.seed = a.seed;
    }
    let stochastic = STOCHASTIC.contains(&a.name.as_str());
    if stochastic && cfg.seed.is_none() {
        return Err(Failure::Usage(format!("{} is stochastic: pass --seed or set seed in the config", a.name)));
    }
    let rep = run_experiment(&a.name, &cfg)?;
    out.write(".json", &json17(&rep)?)?;
    out.write(".csv", &rep.summary_csv())?;
    out.write(".raw.csv", &rep.raw.to_csv())?;
    for v in &rep.verdicts {
        println!("{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    let resolved = serde_json::to_value(&rep.config).map_err(|e| Failure::Runtime(e.to_string()))?;
    out.finish(&format!("experiment {}", a.name), rep.config.seed.filter(|_| stochastic), &resolved)?;
    if rep.pass() {
        Ok(())
    } else {
        let failed: Vec<&str> = rep.verdicts.iter().filter(|v| !v.pass).map(|v| v.name.as_str()).collect();
        Err(Failure::Verdict(format!("{}: {}", a.name, failed.join(", "))))
    }
}

fn reproduce(a: &ReproduceArgs, mut out: Output) -> Outcome {
    if a.suite != "primary" {
        return Err(Failure::Usage(format!("unknown suite {:?}; only \"primary\" exists", a.suite)));
    }
    let ids: Vec<u8> = if a.only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { a.only.clone() };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=13).contains(&i)) {
        return Err(Failure::Usage(format!("no criterion {bad}")));
    }
    let mut results = Vec::new();
    for &id in &ids {
        let o = run_criterion(id, a.seed);
        println!("{}", o.line());
        results.push(json!({ "id": o.id, "name": o.name, "pass": o.pass, "detail": o.detail }));
    }
    let failed: Vec<u8> =
        results.iter().filter(|r| r["pass"] == false).map(|r| r["id"].as_u64().unwrap() as u8).collect();
    println!("{} of {} criteria pass", ids.len() - failed.len(), ids.len());
    out.write(".json", &json17(&results)?)?;
    out.finish("reproduce", Some(a.seed), &json!({ "suite": a.suite, "criteria": ids }))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("criteria {failed:?} failed")))
    }
}
