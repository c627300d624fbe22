use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fpa_core::compose::{composition, mixed_composition, wf_compose};
use fpa_core::error::FpaError;
use fpa_core::feedback::{dynamic_feedback, relative_degree, static_feedback, static_feedback_fixed_point};
use fpa_core::growth::{
    check_mixed_bound, check_shuffle_power_growth, check_shuffle_seminorm_bound, check_wf_local_bound, fit_growth, fit_growth_comm, seminorm,
};
use fpa_core::io::{parse_cfps, parse_ncfps, write_atomic, write_ncfps, Check, Report};
use fpa_core::series::{CommSeries, NCSeries};
use fpa_core::shuffle::{shuffle, shuffle_inverse, shuffle_inverse_antipode};
use fpa_core::sim::{closed_loop_sim, fliess_eval, series_from_statespace, sine_series, InputSignal, Plant, SignalGrid, StateSpaceModel};

#[derive(Parser)]
#[command(name = "fpa", version, about = "Exact algebra and simulation of truncated Chen-Fliess series")]
struct Cli {
    /// Truncation degree of the result (defaults to the inputs' degree).
    #[arg(short = 'N', long = "maxdeg", global = true)]
    maxdeg: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Print a JSON report instead of the result.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shuffle product of two series.
    Shuffle { a: PathBuf, b: PathBuf },
    /// Shuffle inverse.
    ShuffleInv {
        c: PathBuf,
        /// Assemble the inverse from the antipode instead of the geometric series.
        #[arg(long)]
        antipode: bool,
    },
    /// Composition product c∘d.
    Compose { c: PathBuf, d: PathBuf },
    /// Mixed composition c∘̃d_δ.
    Mixcomp { c: PathBuf, d: PathBuf },
    /// Wiener-Fliess composition d∘̆c (static map first).
    Wfcomp { d: PathBuf, c: PathBuf },
    /// Closed loop under output feedback.
    Feedback(FeedbackArgs),
    /// Static feedback by fixed-point iteration.
    FixedPoint { c: PathBuf, d: PathBuf },
    /// Relative degree of a single-input single-output series.
    Reldeg { c: PathBuf },
    /// Truncated seminorm.
    Norm {
        c: PathBuf,
        #[arg(short = 'R', long = "radius")]
        radius: f64,
    },
    /// Fit growth constants K, M.
    FitGrowth {
        c: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        gevrey: f64,
    },
    /// Check the local growth bounds on products of the given series.
    CheckBounds { c: PathBuf, d: Option<PathBuf> },
    /// Evaluate a series (optionally in a static feedback loop) on an input signal.
    Simulate(SimulateArgs),
    /// Pendulum linearized by sine feedback.
    PendulumDemo,
}

#[derive(Args)]
struct FeedbackArgs {
    c: PathBuf,
    d: PathBuf,
    #[arg(long, conflicts_with = "dynamic", required_unless_present = "dynamic")]
    r#static: bool,
    #[arg(long)]
    dynamic: bool,
}

#[derive(Args)]
struct SimulateArgs {
    c: PathBuf,
    /// Input channel: const:A, step:T,A,B, sin:AMP,FREQ,PHASE, poly:A0,A1,..., csv:PATH
    #[arg(long = "input", required = true)]
    inputs: Vec<String>,
    #[arg(short = 'T', long = "horizon", default_value_t = 1.0)]
    horizon: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Static feedback map (.cfps) closing the loop around the series.
    #[arg(long)]
    feedback: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Algebra(FpaError),
    Input(String),
}

impl From<FpaError> for CliError {
    fn from(e: FpaError) -> Self {
        CliError::Algebra(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Algebra(e) => write!(f, "{e}"),
            CliError::Input(s) => write!(f, "{s}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_nc(path: &Path) -> CliResult<NCSeries> {
    parse_ncfps(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_comm(path: &Path) -> CliResult<CommSeries> {
    parse_cfps(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// What a command produced: a text payload for `-o`/stdout plus checks for the report.
struct Outcome {
    text: String,
    maxdeg: Option<usize>,
    checks: Vec<Check>,
}

fn series_outcome(s: NCSeries, checks: Vec<Check>) -> Outcome {
    Outcome { maxdeg: Some(s.maxdeg()), text: write_ncfps(&s), checks }
}

fn deg(cli: &Cli, inputs: &[usize]) -> usize {
    cli.maxdeg.unwrap_or_else(|| inputs.iter().copied().min().unwrap_or(0))
}

fn parse_signal(signal: &str, t_end: f64, dt: f64) -> CliResult<Vec<f64>> {
    let bad = || CliError::Input(format!("bad input signal `{signal}`"));
    let (kind, args) = signal.split_once(':').ok_or_else(bad)?;
    if kind == "csv" {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(args).map_err(|e| CliError::Input(format!("{args}: {e}")))?;
        let mut out = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| CliError::Input(format!("{args}: {e}")))?;
            let last = rec.iter().next_back().unwrap_or("");
            match last.trim().parse::<f64>() {
                Ok(v) => out.push(v),
                Err(_) if out.is_empty() => continue,
                Err(_) => return Err(CliError::Input(format!("{args}: non-numeric sample `{last}`"))),
            }
        }
        let n = fpa_core::sim::grid_len(t_end, dt);
        if out.len() < n {
            return Err(CliError::Input(format!("{args}: {} samples, the grid needs {n}", out.len())));
        }
        out.truncate(n);
        return Ok(out);
    }
    let nums: Vec<f64> = args.split(',').map(|a| a.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let sig = match (kind, nums.as_slice()) {
        ("const", [a]) => InputSignal::Const(*a),
        ("step", [at, before, after]) => InputSignal::Step { at: *at, before: *before, after: *after },
        ("sin", [amp, freq, phase]) => InputSignal::Sin { amp: *amp, freq: *freq, phase: *phase },
        ("sin", [amp, freq]) => InputSignal::Sin { amp: *amp, freq: *freq, phase: 0.0 },
        ("poly", c) if !c.is_empty() => InputSignal::Poly(c.to_vec()),
        _ => return Err(bad()),
    };
    Ok(SignalGrid::sample(&[sig], t_end, dt).channels.remove(0))
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    Ok(match &cli.cmd {
        Cmd::Shuffle { a, b } => {
            let (a, b) = (load_nc(a)?, load_nc(b)?);
            let m = a.m().max(b.m());
            let (a, b) = (a.widen_alphabet(m), b.widen_alphabet(m));
            series_outcome(shuffle(&a, &b, deg(cli, &[a.maxdeg(), b.maxdeg()]))?, vec![])
        }
        Cmd::ShuffleInv { c, antipode } => {
            let c = load_nc(c)?;
            let n = deg(cli, &[c.maxdeg()]);
            let inv = if *antipode { shuffle_inverse_antipode(&c, n)? } else { shuffle_inverse(&c, n)? };
            let one = NCSeries::one(c.m(), c.ell(), inv.maxdeg());
            let ok = shuffle(&c, &inv, n)? == one;
            series_outcome(inv, vec![Check::new("product_is_one", ok, "c ⧢ c^{⧢-1} = 1 on the truncation")])
        }
        Cmd::Compose { c, d } => {
            let (c, d) = (load_nc(c)?, load_nc(d)?);
            series_outcome(composition(&c, &d, deg(cli, &[c.maxdeg(), d.maxdeg()]))?, vec![])
        }
        Cmd::Mixcomp { c, d } => {
            let (c, d) = (load_nc(c)?, load_nc(d)?);
            series_outcome(mixed_composition(&c, &d, deg(cli, &[c.maxdeg(), d.maxdeg()]))?, vec![])
        }
        Cmd::Wfcomp { d, c } => {
            let (d, c) = (load_comm(d)?, load_nc(c)?);
            series_outcome(wf_compose(&d, &c, deg(cli, &[c.maxdeg()]))?, vec![])
        }
        Cmd::Feedback(args) => {
            let c = load_nc(&args.c)?;
            let n = deg(cli, &[c.maxdeg()]);
            let out = if args.r#static { static_feedback(&c, &load_comm(&args.d)?, n)? } else { dynamic_feedback(&c, &load_nc(&args.d)?, n)? };
            let mut checks = vec![];
            if c.m() == 1 && c.ell() == 1 {
                let before = relative_degree(&c.truncate(n))?;
                if before.r.is_some() {
                    let after = relative_degree(&out)?;
                    checks.push(Check::new("relative_degree_preserved", before.r == after.r, format!("{:?} -> {:?}", before.r, after.r)));
                }
            }
            series_outcome(out, checks)
        }
        Cmd::FixedPoint { c, d } => {
            let (c, d) = (load_nc(c)?, load_comm(d)?);
            let n = deg(cli, &[c.maxdeg()]);
            let fp = static_feedback_fixed_point(&c, &d, n)?;
            let within = fp.iterations <= fp.series.maxdeg() + 1;
            let closed = static_feedback(&c, &d, n)?;
            let checks = vec![
                Check::new("stabilized_within_N+1", within, format!("{} evaluations", fp.iterations)),
                Check::new("matches_closed_form", closed == fp.series, "fixed point equals c∘̃(-d∘̆c)_δ^{-1}"),
            ];
            series_outcome(fp.series, checks)
        }
        Cmd::Reldeg { c } => {
            let c = load_nc(c)?;
            let rep = relative_degree(&c.truncate(deg(cli, &[c.maxdeg()])))?;
            let text = match (&rep.r, &rep.gain) {
                (Some(r), Some(k)) => format!("relative degree {r}, K = {k}{}\n", if rep.truncation_limited { " (truncation-limited)" } else { "" }),
                _ => format!("relative degree undefined{}\n", if rep.truncation_limited { " (truncation-limited)" } else { "" }),
            };
            Outcome {
                text,
                maxdeg: Some(rep.maxdeg),
                checks: vec![Check::new("defined", rep.r.is_some(), format!("r = {:?}, truncation_limited = {}", rep.r, rep.truncation_limited))],
            }
        }
        Cmd::Norm { c, radius } => {
            let c = load_nc(c)?;
            let c = c.truncate(deg(cli, &[c.maxdeg()]));
            let s = seminorm(&c, *radius)?;
            Outcome { text: format!("{} (words of length <= {})\n", s.value, s.maxdeg), maxdeg: Some(s.maxdeg), checks: vec![] }
        }
        Cmd::FitGrowth { c, gevrey } => {
            let c = load_nc(c)?;
            let c = c.truncate(deg(cli, &[c.maxdeg()]));
            match fit_growth(&c, *gevrey) {
                Some(b) => Outcome {
                    text: format!("K = {} M = {} s = {}\n", b.k, b.m, b.gevrey),
                    maxdeg: Some(c.maxdeg()),
                    checks: vec![Check::new("fit", true, format!("K = {}, M = {}", b.k, b.m))],
                },
                None => Outcome {
                    text: format!("no bounded M on the grid for s = {gevrey}\n"),
                    maxdeg: Some(c.maxdeg()),
                    checks: vec![Check::new("fit", false, "growth exceeds the class on the truncation")],
                },
            }
        }
        Cmd::CheckBounds { c, d } => {
            let c = load_nc(c)?;
            let n = deg(cli, &[c.maxdeg()]);
            let c = c.truncate(n);
            let mut checks = vec![];
            let seminorm_ok = check_shuffle_seminorm_bound(&[c.clone(), c.clone()], 1.0, 0.5, n)?;
            checks.push(Check::new("shuffle_seminorm", seminorm_ok, "‖c⧢c‖_{1/2} ≤ ‖c‖_1²/(1/2)²"));
            let cb = fit_growth(&c, 1.0);
            match cb {
                None => checks.push(Check::new("fit", false, "no Gevrey-1 fit for c")),
                Some(cb) => {
                    checks.push(Check::new("fit", true, format!("K = {}, M = {}", cb.k, cb.m)));
                    if c.is_proper() && !c.is_zero() {
                        for p in 2..=3 {
                            let rep = check_shuffle_power_growth(&c, cb.k, cb.m, 0, p, n)?;
                            checks.push(Check::new(format!("shuffle_power_{p}"), rep.holds, format!("worst ratio {:.3e}", rep.worst_ratio)));
                        }
                    }
                    if c.ell() == c.m() {
                        let rep = check_mixed_bound(&cb, &cb, c.m(), &mixed_composition(&c, &c, n)?);
                        checks.push(Check::new("mixed_composition", rep.holds, format!("worst ratio {:.3e}", rep.worst_ratio)));
                    }
                    if let Some(d) = d {
                        let d = load_comm(d)?;
                        match (c.is_proper(), fit_growth_comm(&d, 0.0)) {
                            (true, Some(db)) => {
                                let rep = check_wf_local_bound(&db, &cb, c.ell(), &wf_compose(&d, &c, n)?);
                                checks.push(Check::new("wiener_fliess", rep.holds, format!("worst ratio {:.3e}", rep.worst_ratio)));
                            }
                            (false, _) => checks.push(Check::new("wiener_fliess", true, "skipped: c is not proper")),
                            (true, None) => checks.push(Check::new("wiener_fliess", false, "no geometric fit for d")),
                        }
                    }
                }
            }
            let text = checks.iter().map(|k| format!("{} {} {}\n", if k.pass { "PASS" } else { "FAIL" }, k.name, k.detail)).collect();
            Outcome { text, maxdeg: Some(n), checks }
        }
        Cmd::Simulate(args) => {
            let c = load_nc(&args.c)?;
            let c = c.truncate(deg(cli, &[c.maxdeg()]));
            if args.inputs.len() != c.m() {
                return Err(CliError::Input(format!("series has {} inputs, {} --input given", c.m(), args.inputs.len())));
            }
            if !(args.dt > 0.0 && args.horizon >= 0.0) {
                return Err(CliError::Input("need dt > 0 and a nonnegative horizon".into()));
            }
            let channels = args.inputs.iter().map(|s| parse_signal(s, args.horizon, args.dt)).collect::<CliResult<Vec<_>>>()?;
            let grid = SignalGrid { dt: args.dt, channels };
            let ys = match &args.feedback {
                Some(d) => closed_loop_sim(&Plant::Series(c.clone()), &load_comm(d)?, &grid)?,
                None => fliess_eval(&c, &grid)?,
            };
            let mut text = String::from("t");
            for i in 0..ys.len() {
                text.push_str(&format!(",y{}", i + 1));
            }
            text.push('\n');
            for (k, t) in grid.times().iter().enumerate() {
                text.push_str(&format!("{t}"));
                for y in &ys {
                    text.push_str(&format!(",{}", y[k]));
                }
                text.push('\n');
            }
            Outcome { text, maxdeg: Some(c.maxdeg()), checks: vec![] }
        }
        Cmd::PendulumDemo => pendulum_demo(cli.maxdeg.unwrap_or(6))?,
    })
}

fn pendulum_demo(n: usize) -> CliResult<Outcome> {
    let model = StateSpaceModel::pendulum();
    let c = series_from_statespace(&model, n)?;
    let d = sine_series(n + 1 + (n % 2));
    let fb = static_feedback(&c, &d, n)?;
    let mut text = format!("c = {c}\nd = {d}\nc@̂d = {fb}\n");
    let target = NCSeries::from_terms(1, fb.maxdeg(), [(fpa_core::Word(vec![0]), fpa_core::q(1)), (fpa_core::Word(vec![0, 1]), fpa_core::q(1))])?;
    let mut checks = vec![Check::new("closed_loop_series", fb == target, format!("{fb}"))];
    let (rc, rf) = (relative_degree(&c)?.r, relative_degree(&fb)?.r);
    checks.push(Check::new("relative_degree", rc == Some(2) && rf == Some(2), format!("open loop {rc:?}, closed loop {rf:?}")));
    let dt = 1e-3;
    text.push_str("input  max|F[v](t) - (t + ∫∫v)| on [0, 0.3]\n");
    for (name, sig) in [("0", InputSignal::Const(0.0)), ("1", InputSignal::Const(1.0)), ("sin", InputSignal::Sin { amp: 1.0, freq: 1.0, phase: 0.0 })]
    {
        let v = SignalGrid::sample(std::slice::from_ref(&sig), 0.3, dt);
        let y = fliess_eval(&fb, &v)?.remove(0);
        let exact = |t: f64| -> f64 {
            t + match &sig {
                InputSignal::Const(a) => a * t * t / 2.0,
                InputSignal::Sin { .. } => t - t.sin(),
                _ => unreachable!(),
            }
        };
        let err = v.times().iter().zip(&y).map(|(t, yk)| (yk - exact(*t)).abs()).fold(0.0, f64::max);
        text.push_str(&format!("{name:<6} {err:.3e}\n"));
        checks.push(Check::new(format!("numeric_v={name}"), err <= 1e-4, format!("max error {err:.3e}")));
    }
    Ok(Outcome { text, maxdeg: Some(fb.maxdeg()), checks })
}

fn inputs(cmd: &Cmd) -> Vec<String> {
    let p = |x: &PathBuf| x.display().to_string();
    match cmd {
        Cmd::Shuffle { a, b } => vec![p(a), p(b)],
        Cmd::ShuffleInv { c, .. } | Cmd::Reldeg { c } | Cmd::Norm { c, .. } | Cmd::FitGrowth { c, .. } => vec![p(c)],
        Cmd::Compose { c, d } | Cmd::Mixcomp { c, d } | Cmd::FixedPoint { c, d } => vec![p(c), p(d)],
        Cmd::Wfcomp { d, c } => vec![p(d), p(c)],
        Cmd::Feedback(a) => vec![p(&a.c), p(&a.d)],
        Cmd::CheckBounds { c, d } => std::iter::once(p(c)).chain(d.iter().map(p)).collect(),
        Cmd::Simulate(a) => std::iter::once(p(&a.c)).chain(a.inputs.iter().cloned()).chain(a.feedback.iter().map(p)).collect(),
        Cmd::PendulumDemo => vec![],
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Shuffle { .. } => "shuffle",
        Cmd::ShuffleInv { .. } => "shuffle-inv",
        Cmd::Compose { .. } => "compose",
        Cmd::Mixcomp { .. } => "mixcomp",
        Cmd::Wfcomp { .. } => "wfcomp",
        Cmd::Feedback(_) => "feedback",
        Cmd::FixedPoint { .. } => "fixed-point",
        Cmd::Reldeg { .. } => "reldeg",
        Cmd::Norm { .. } => "norm",
        Cmd::FitGrowth { .. } => "fit-growth",
        Cmd::CheckBounds { .. } => "check-bounds",
        Cmd::Simulate(_) => "simulate",
        Cmd::PendulumDemo => "pendulum-demo",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("fpa: {e}");
            let code = match e {
                CliError::Algebra(FpaError::Inadmissible(_)) => 2,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };
    if let Some(path) = &cli.output {
        if let Err(e) = write_atomic(path, &out.text) {
            eprintln!("fpa: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if cli.json {
        let report = Report {
            command: command_name(&cli.cmd).to_string(),
            inputs: inputs(&cli.cmd),
            maxdeg: out.maxdeg,
            result_path: cli.output.as_ref().map(|p| p.display().to_string()),
            checks: out.checks,
        };
        let body = serde_json::to_string_pretty(&report).expect("report serializes");
        let _ = writeln!(std::io::stdout().lock(), "{body}");
    } else if cli.output.is_none() {
        let _ = write!(std::io::stdout().lock(), "{}", out.text);
    }
    ExitCode::SUCCESS
}
