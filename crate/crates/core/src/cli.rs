//! Command-line front end: `run`, `verify`, `germ` and `traces`.
//!
//! Output files go to `$DISCFLUX_OUT` (default: the working directory).
//! Exit status: 0 pass, 1 verification failure, 2 input error, 3 pairing error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::fv_solver::{run, Scenario, SpaceTimeSolution};
use crate::germ::{is_dissipative, rankine_hugoniot_residual, GERM_SAMPLE_GRID};
use crate::scenario::ScenarioFile;
use crate::solution_file;
use crate::traces::{extract_traces, DEFAULT_SCALES, DEFAULT_WINDOW_LEVELS};
use crate::verify::{
    contraction_ledger, entropy_residual, k_grid, kato_remainder, sobolev_contraction_check, ResidualField,
    DEFAULT_K_LEVELS,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PAIRING: i32 = 3;
pub const OUT_ENV: &str = "DISCFLUX_OUT";
const DISSIPATIVITY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "discflux", version, about = "Scalar conservation laws with discontinuous flux")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a scenario and write its solution file.
    Run { scenario: PathBuf },
    /// Check entropy, Kato and contraction inequalities on a pair of solutions.
    Verify {
        u: PathBuf,
        v: PathBuf,
        /// Ledger radius.
        #[arg(long = "R", visible_alias = "radius")]
        radius: Option<f64>,
        /// Ledger time.
        #[arg(long = "T", visible_alias = "time")]
        time: Option<f64>,
        /// Number of entropy levels.
        #[arg(long)]
        klevels: Option<usize>,
    },
    /// Brute-force dissipativity of every interface germ.
    Germ {
        scenario: PathBuf,
        /// State grid used to sample predicate-defined germs.
        #[arg(long, default_value_t = GERM_SAMPLE_GRID)]
        grid: usize,
    },
    /// One-sided interface traces of a solution.
    Traces {
        solution: PathBuf,
        #[arg(long)]
        interface: Option<usize>,
        /// `t1,t2`; defaults to the last stored levels.
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
    },
}

fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected t1,t2")?;
    let a = a.trim().parse().map_err(|_| format!("bad time {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad time {b:?}"))?;
    Ok((a, b))
}

/// Failure of a command together with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

pub fn out_dir() -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into())
}

fn short(fingerprint: &str) -> &str {
    &fingerprint[..fingerprint.len().min(16)]
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure { code: EXIT_INPUT, message: format!("{}: {e}", path.display()) })
}

fn load_scenario(path: &Path) -> std::result::Result<Scenario, Failure> {
    let text = read_text(path)?;
    ScenarioFile::from_toml(&text)
        .and_then(|f| f.build())
        .map_err(|e| Failure { code: EXIT_INPUT, message: format!("{}: {e}", path.display()) })
}

fn write(path: PathBuf, contents: &str) -> std::result::Result<PathBuf, Failure> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure { code: EXIT_INPUT, message: format!("{}: {e}", dir.display()) })?;
    }
    solution_file::write_atomic(&path, contents)?;
    Ok(path)
}

/// Parses arguments and runs a command; returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command) -> CmdResult {
    match cmd {
        Command::Run { scenario } => cmd_run(&scenario).map(|_| EXIT_PASS),
        Command::Verify { u, v, radius, time, klevels } => cmd_verify(&u, &v, radius, time, klevels),
        Command::Germ { scenario, grid } => cmd_germ(&scenario, grid),
        Command::Traces { solution, interface, window } => cmd_traces(&solution, interface, window),
    }
}

pub fn cmd_run(path: &Path) -> std::result::Result<PathBuf, Failure> {
    let scenario = load_scenario(path)?;
    let sol = run(&scenario)?;
    let out = write(
        out_dir().join(format!("{}-{}.csv", stem(path), short(&sol.fingerprint))),
        &solution_file::to_text(&sol),
    )?;
    println!(
        "{}: {} cells, {} steps, t_end = {}, max principle excess = {:e}",
        out.display(),
        sol.cells,
        sol.dt_history.len(),
        scenario.t_end,
        sol.max_principle_excess
    );
    Ok(out)
}

#[derive(Serialize)]
struct GridSummary {
    fingerprint: String,
    cells: usize,
    dx: f64,
    t_end: f64,
    steps: usize,
    levels: usize,
}

#[derive(Serialize)]
struct EntropySummary {
    k_levels: usize,
    off_interface_max: f64,
    tol_entropy: f64,
    max_interface_mass: Vec<f64>,
    pass: bool,
}

impl EntropySummary {
    fn of(r: &ResidualField) -> Self {
        Self {
            k_levels: r.k_levels.len(),
            off_interface_max: r.off_interface_max,
            tol_entropy: r.tol_entropy,
            max_interface_mass: r
                .interface_mass
                .iter()
                .map(|m| m.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .collect(),
            pass: r.pass,
        }
    }
}

#[derive(Serialize)]
struct KatoSummary {
    off_interface_positive_mass: f64,
    tol_bulk: f64,
    tol_iface: f64,
    tol_gap: f64,
    max_measured: Vec<f64>,
    max_gap: Vec<f64>,
    predicted_intervals: Vec<usize>,
    pass: bool,
}

#[derive(Serialize)]
struct LedgerSummary {
    center: f64,
    radius: f64,
    time: f64,
    speed: f64,
    lhs: f64,
    rhs_initial: f64,
    rhs_interface: f64,
    slack: f64,
    tol_ledger: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SobolevSummary {
    first: f64,
    last: f64,
    max_increase: f64,
    tol_ledger: f64,
    bounded: bool,
    monotone: bool,
    pass: bool,
}

#[derive(Serialize)]
struct VerifySummary {
    pass: bool,
    grid: GridSummary,
    entropy_u: EntropySummary,
    entropy_v: EntropySummary,
    kato: KatoSummary,
    ledger: LedgerSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    contraction: Option<SobolevSummary>,
}

fn pairing(message: String) -> Failure {
    Failure { code: EXIT_PAIRING, message }
}

fn solution_stem(path: &Path, fingerprint: &str) -> String {
    let s = stem(path);
    s.strip_suffix(&format!("-{}", short(fingerprint))).map(str::to_string).unwrap_or(s)
}

pub fn cmd_verify(
    u_path: &Path,
    v_path: &Path,
    radius: Option<f64>,
    time: Option<f64>,
    klevels: Option<usize>,
) -> CmdResult {
    let u = solution_file::read(u_path)?;
    let v = solution_file::read(v_path)?;
    if u.fingerprint != v.fingerprint {
        return Err(pairing(format!(
            "scenario fingerprints differ ({} vs {})",
            short(&u.fingerprint),
            short(&v.fingerprint)
        )));
    }
    if u.times != v.times {
        return Err(pairing("solutions are stored at different time levels; use timestep = \"fixed\"".into()));
    }
    let scenario = u.scenario.build()?;
    let pair_err = |e: Error| match e {
        Error::Grid(m) => pairing(m),
        e => Failure::from(e),
    };
    let n_k = klevels.or(scenario.source.verify.k_levels).unwrap_or(DEFAULT_K_LEVELS);
    if n_k == 0 {
        return Err(Failure { code: EXIT_INPUT, message: "--klevels must be positive".into() });
    }
    let ks = k_grid(&scenario, n_k);
    let eu = entropy_residual(&u, &scenario, &ks).map_err(pair_err)?;
    let ev = entropy_residual(&v, &scenario, &ks).map_err(pair_err)?;
    let kato = kato_remainder(&u, &v, &scenario).map_err(pair_err)?;
    let ledger = contraction_ledger(&u, &v, &scenario, radius, time, &kato).map_err(pair_err)?;
    let contraction = if scenario.interfaces.is_empty() {
        Some(sobolev_contraction_check(&u, &v, &scenario).map_err(pair_err)?)
    } else {
        None
    };
    let pass = eu.pass && ev.pass && kato.pass && ledger.pass && contraction.as_ref().is_none_or(|c| c.pass);

    let summary = VerifySummary {
        pass,
        grid: GridSummary {
            fingerprint: u.fingerprint.clone(),
            cells: u.cells,
            dx: u.dx,
            t_end: scenario.t_end,
            steps: u.dt_history.len(),
            levels: u.times.len(),
        },
        entropy_u: EntropySummary::of(&eu),
        entropy_v: EntropySummary::of(&ev),
        kato: KatoSummary {
            off_interface_positive_mass: kato.off_interface_positive_mass,
            tol_bulk: kato.tol_bulk,
            tol_iface: kato.tol_iface,
            tol_gap: kato.tol_gap,
            max_measured: kato.series.iter().map(|s| s.max_measured).collect(),
            max_gap: kato.series.iter().map(|s| s.max_gap.unwrap_or(f64::NAN)).collect(),
            predicted_intervals: kato.series.iter().map(|s| s.predicted.iter().flatten().count()).collect(),
            pass: kato.pass,
        },
        ledger: LedgerSummary {
            center: ledger.center,
            radius: ledger.radius,
            time: ledger.time,
            speed: ledger.speed,
            lhs: ledger.lhs,
            rhs_initial: ledger.rhs_initial,
            rhs_interface: ledger.rhs_interface,
            slack: ledger.slack,
            tol_ledger: ledger.tol_ledger,
            pass: ledger.pass,
        },
        contraction: contraction.as_ref().map(|c| SobolevSummary {
            first: c.distances[0],
            last: c.distances[c.distances.len() - 1],
            max_increase: c.distances.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max),
            tol_ledger: c.tol_ledger,
            bounded: c.bounded,
            monotone: c.monotone,
            pass: c.pass,
        }),
    };
    let base = format!(
        "verify-{}-{}-{}",
        solution_stem(u_path, &u.fingerprint),
        solution_stem(v_path, &v.fingerprint),
        short(&u.fingerprint)
    );
    let dir = out_dir();
    let summary_text = toml::to_string(&summary).map_err(|e| Failure { code: EXIT_INPUT, message: e.to_string() })?;
    write(dir.join(format!("{base}-summary.toml")), &summary_text)?;

    let mut kato_csv = String::from("j,t0,t1,measured_w,predicted_w\n");
    for s in &kato.series {
        for (n, &(t0, t1)) in kato.intervals.iter().enumerate() {
            let p = s.predicted[n].map(|p| format!("{p:.16e}")).unwrap_or_default();
            writeln!(kato_csv, "{},{t0:.16e},{t1:.16e},{:.16e},{p}", s.interface, s.measured[n]).unwrap();
        }
    }
    write(dir.join(format!("{base}-kato.csv")), &kato_csv)?;

    let mut entropy_csv = String::from("solution,j,t0,t1,interface_mass\n");
    for (name, r) in [("u", &eu), ("v", &ev)] {
        for (j, mass) in r.interface_mass.iter().enumerate() {
            for (&(t0, t1), m) in r.intervals.iter().zip(mass) {
                writeln!(entropy_csv, "{name},{j},{t0:.16e},{t1:.16e},{m:.16e}").unwrap();
            }
        }
    }
    write(dir.join(format!("{base}-entropy.csv")), &entropy_csv)?;

    let flag = |p: bool| if p { "pass" } else { "FAIL" };
    println!("entropy u: {} (off-interface max {:e}, tol {:e})", flag(eu.pass), eu.off_interface_max, eu.tol_entropy);
    println!("entropy v: {} (off-interface max {:e}, tol {:e})", flag(ev.pass), ev.off_interface_max, ev.tol_entropy);
    println!(
        "kato: {} (bulk positive mass {:e}, tol {:e}; max interface density {:e}, tol {:e})",
        flag(kato.pass),
        kato.off_interface_positive_mass,
        kato.tol_bulk,
        kato.max_measured().max(0.0),
        kato.tol_iface
    );
    for s in kato.series.iter().filter(|s| s.max_measured > kato.tol_iface) {
        println!("  interface {}: W > 0 detected, max measured density {:e}", s.interface, s.max_measured);
    }
    println!("ledger: {} (slack {:e}, tol {:e})", flag(ledger.pass), ledger.slack, ledger.tol_ledger);
    if let Some(c) = &contraction {
        println!("contraction: {} (monotone {}, bounded {})", flag(c.pass), c.monotone, c.bounded);
    }
    println!("verdict: {}", flag(pass));
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

pub fn cmd_germ(path: &Path, grid: usize) -> CmdResult {
    let scenario = load_scenario(path)?;
    if scenario.interfaces.is_empty() {
        return Err(Failure { code: EXIT_INPUT, message: format!("{}: scenario declares no interfaces", path.display()) });
    }
    if grid < 2 {
        return Err(Failure { code: EXIT_INPUT, message: "--grid must be at least 2".into() });
    }
    let mut csv = String::from("j,kind,pairs_checked,max_w,worst_u_minus,worst_u_plus,worst_v_minus,worst_v_plus,pass\n");
    let mut all = true;
    for (j, spec) in scenario.interfaces.iter().enumerate() {
        let d = is_dissipative(&spec.germ, j, &scenario.model, DISSIPATIVITY_TOL, grid)?;
        all &= d.pass;
        let (a, b) = d.worst;
        let kind = format!("{:?}", spec.germ.kind);
        println!(
            "interface {j} ({kind}): {} max W = {:e} at ({}, {}) vs ({}, {}) over {} pairs",
            if d.pass { "pass" } else { "FAIL" },
            d.max_w,
            a.u_minus,
            a.u_plus,
            b.u_minus,
            b.u_plus,
            d.pairs_checked
        );
        writeln!(
            csv,
            "{j},{kind},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            d.pairs_checked, d.max_w, a.u_minus, a.u_plus, b.u_minus, b.u_plus, d.pass
        )
        .unwrap();
    }
    write(out_dir().join(format!("germ-{}-{}.csv", stem(path), short(&scenario.fingerprint))), &csv)?;
    Ok(if all { EXIT_PASS } else { EXIT_FAIL })
}

fn default_window(sol: &SpaceTimeSolution) -> (f64, f64) {
    let last = sol.times.len() - 1;
    (sol.times[last.saturating_sub(DEFAULT_WINDOW_LEVELS - 1)], sol.times[last])
}

pub fn cmd_traces(path: &Path, interface: Option<usize>, window: Option<(f64, f64)>) -> CmdResult {
    let sol = solution_file::read(path)?;
    let scenario = sol.scenario.build()?;
    let count = scenario.interfaces.len();
    let which: Vec<usize> = match interface {
        Some(j) if j < count => vec![j],
        Some(j) => return Err(Error::InterfaceIndex { index: j, count }.into()),
        None => (0..count).collect(),
    };
    let window = window.unwrap_or_else(|| default_window(&sol));
    let mut csv = String::from("j,t1,t2,r_k,u_minus_k,u_plus_k,converged,rh_residual\n");
    for j in which {
        let ts = extract_traces(&sol, &scenario, j, window, &DEFAULT_SCALES)?;
        for (r, p) in ts.scales.iter().zip(&ts.estimates) {
            let rh = rankine_hugoniot_residual(*p, j, &scenario.model)?;
            writeln!(
                csv,
                "{j},{:.16e},{:.16e},{r},{:.16e},{:.16e},{},{rh:.16e}",
                ts.t1, ts.t2, p.u_minus, p.u_plus, ts.converged
            )
            .unwrap();
        }
        match (ts.limit_pair, ts.equal_trace_range) {
            (Some(p), _) => eprintln!("interface {j}: converged to ({}, {}), oscillation {:e}", p.u_minus, p.u_plus, ts.oscillation),
            (None, Some((a, b))) => eprintln!("interface {j}: equal traces over the range [{a}, {b}]"),
            (None, None) => eprintln!("interface {j}: not converged, oscillation {:e} > {:e}", ts.oscillation, ts.trace_tol),
        }
    }
    print!("{csv}");
    write(out_dir().join(format!("traces-{}.csv", stem(path))), &csv)?;
    Ok(EXIT_PASS)
}
