use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rscc_core::analysis::{
    check_irreducible, detect_jump, fattening_experiment, propagation_check, Drive, DEFAULT_CONV_TOL,
};
use rscc_core::chain::{admissible_words, cylinder_prob, sample_chain, sample_path_with_maps};
use rscc_core::grid::{radial_profile, GridParams, GridWindow, Palette, DEFAULT_DIAM_THRESHOLD};
use rscc_core::operator::{
    equicontinuity_diagnostic, iterate_m, mc_estimate_m, word_sum_oracle, ProductPoint, TestFunction,
};
use rscc_core::radial::{kernel_julia_depth, statewise_julia_radial, DEFAULT_TOL};
use rscc_core::{Complex64, ScenarioSpec, SpherePoint};
use serde_json::{json, Value};

use crate::config::load_scenario;
use crate::error::{usage, CliError, CliResult, EXIT_INVALID, EXIT_OK};
use crate::output::{certificate_json, csv_bytes, set_rows, RADIAL_SET_HEADER, emit, fmt_f64, grid_bytes, json_bytes, json_f64, parse_grid, ppm_bytes, Provenance};
use crate::{par, report};

#[derive(Debug, Parser)]
#[command(name = "rscc", version, about = "Random state-dependent complex chains: simulation, Julia sets, operator checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Builtin scenario name or scenario file path.
    #[arg(long)]
    pub scenario: String,
    /// Step size of the reinforcement scenarios.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Truncation margin of reinforcement-trunc.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> CliResult<ScenarioSpec> {
        load_scenario(&self.scenario, self.alpha, self.eps)
    }

    fn provenance(&self, spec: &ScenarioSpec) -> Provenance {
        let mut p = Provenance::new(&spec.name, self.seed);
        if let Some(a) = self.alpha {
            p = p.with("alpha", a);
        }
        if let Some(e) = self.eps {
            p = p.with("eps", e);
        }
        p
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OperatorMode {
    Iterate,
    Oracle,
    Mc,
    Diagnostic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PaletteArg {
    Bw,
    Heat,
}

impl From<PaletteArg> for Palette {
    fn from(p: PaletteArg) -> Self {
        match p {
            PaletteArg::Bw => Palette::Bw,
            PaletteArg::Heat => Palette::Heat,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a trajectory of states and indices.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        state: String,
        #[arg(long)]
        steps: usize,
        /// Also sample the maps and report step log-probabilities.
        #[arg(long)]
        maps: bool,
    },
    /// List admissible words with their cylinder probabilities.
    Words {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        state: String,
        #[arg(long)]
        depth: usize,
    },
    /// Exact log-radius Julia sets of every radial class.
    JuliaRadial {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Pixel classification of the Julia set at a state.
    JuliaGrid {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        state: String,
        /// reMin,reMax,imMin,imMax
        #[arg(long, default_value = "-2.5,2.5,-2.5,2.5", allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value_t = 256)]
        res: usize,
        /// Maximum composition depth per sampled word.
        #[arg(long, default_value_t = 48)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Probe offset; a quarter pixel when omitted.
        #[arg(long)]
        probe: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_DIAM_THRESHOLD)]
        threshold: f64,
        /// Classify along one sampled path instead of many sampled words.
        #[arg(long)]
        path: bool,
        /// Also write the radial Julia profile as CSV.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Also render the grid to a PPM image.
        #[arg(long)]
        ppm: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "bw")]
        palette: PaletteArg,
    },
    /// Render a grid file to PPM.
    Render {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, value_enum, default_value = "bw")]
        palette: PaletteArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kernel Julia certificate at a state.
    Kernel {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Transition operator values, oracles, Monte Carlo and diagnostics.
    Operator {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "iterate")]
        mode: OperatorMode,
        /// one | state | bump:center,width | clip:lo,hi
        #[arg(long, default_value = "one")]
        phi: String,
        /// re,im | re | inf
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Strictly descending probe radii.
        #[arg(long, default_value = "0.1,0.01,0.001,0.0001")]
        radii: String,
    },
    /// Emptiness-jump detection along a trajectory.
    Jump {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        state: String,
        /// forced:x1,x2 (repeated cyclically) | sampled
        #[arg(long, default_value = "sampled")]
        drive: String,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_CONV_TOL)]
        conv_tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Counting-measure irreducibility on a finite state set.
    Irreducible {
        #[command(flatten)]
        common: Common,
        /// Comma-separated states.
        #[arg(long)]
        states: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Also check kernel-emptiness propagation at this depth.
        #[arg(long)]
        kernel_depth: Option<usize>,
    },
    /// The thickened-kernel counterexample.
    Fattening {
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.1)]
        y0: f64,
        #[arg(long, default_value_t = 60)]
        steps: usize,
        /// forced:x1 | sampled
        #[arg(long, default_value = "forced:x1")]
        drive: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance battery and write its artifacts.
    Report {
        #[arg(long, default_value = "rscc-report")]
        out: PathBuf,
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long)]
        only: Option<String>,
    },
}

/// Entry point: parses `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("rscc: {e}");
            e.exit_code()
        }
    }
}

fn parse_f64(t: &str, what: &str) -> CliResult<f64> {
    t.trim().parse().map_err(|_| usage(format!("{what}: bad number '{t}'")))
}

fn parse_list(t: &str, what: &str) -> CliResult<Vec<f64>> {
    t.split(',').map(|s| parse_f64(s, what)).collect()
}

pub fn parse_window(t: &str, res: usize) -> CliResult<GridWindow> {
    match parse_list(t, "window")?.as_slice() {
        [a, b, c, d] => Ok(GridWindow::new(*a, *b, *c, *d, res)?),
        _ => Err(usage("--window needs reMin,reMax,imMin,imMax")),
    }
}

pub fn parse_point(t: &str) -> CliResult<SpherePoint> {
    if t.trim() == "inf" {
        return Ok(SpherePoint::Infinity);
    }
    match parse_list(t, "y")?.as_slice() {
        [re] => Ok(SpherePoint::real(*re)),
        [re, im] => Ok(SpherePoint::Finite(Complex64::new(*re, *im))),
        _ => Err(usage("--y needs re,im or re or inf")),
    }
}

pub fn parse_phi(t: &str) -> CliResult<TestFunction> {
    let (head, args) = t.split_once(':').unwrap_or((t, ""));
    let pair = || -> CliResult<(f64, f64)> {
        match parse_list(args, "phi")?.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(usage(format!("--phi {head} needs two parameters"))),
        }
    };
    let phi = match head {
        "one" => TestFunction::One,
        "state" => TestFunction::StateCoord,
        "bump" => {
            let (center, width) = pair()?;
            TestFunction::RadialBump { center, width }
        }
        "clip" => {
            let (lo, hi) = pair()?;
            TestFunction::ClippedLogMod { lo, hi }
        }
        _ => return Err(usage(format!("unknown test function '{t}'"))),
    };
    phi.check()?;
    Ok(phi)
}

pub fn parse_drive(spec: &ScenarioSpec, t: &str, seed: u64) -> CliResult<Drive> {
    if t == "sampled" {
        return Ok(Drive::Sampled(seed));
    }
    let names = t.strip_prefix("forced:").ok_or_else(|| usage(format!("--drive must be sampled or forced:..., got '{t}'")))?;
    let word = names.split(',').map(|n| spec.index_by_name(n.trim())).collect::<rscc_core::Result<Vec<_>>>()?;
    Ok(Drive::Forced(word))
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Simulate { common, state, steps, maps } => {
            let spec = common.load()?;
            let w = spec.parse_state(&state)?;
            let prov = common.provenance(&spec).with("state", &w).with("steps", steps).with("maps", maps);
            let bytes = if maps {
                let p = sample_path_with_maps(&spec, &w, steps, common.seed)?;
                let mut rows: Vec<Vec<String>> = (0..p.len())
                    .map(|k| {
                        let x = p.indices[k];
                        vec![
                            k.to_string(),
                            p.states[k].to_string(),
                            spec.index_name(x).to_string(),
                            spec.tau[x][p.map_ids[k]].name.clone(),
                            fmt_f64(p.step_log_probs[k]),
                        ]
                    })
                    .collect();
                rows.push(vec![p.len().to_string(), p.states[p.len()].to_string(), String::new(), String::new(), String::new()]);
                csv_bytes(&prov, &["step", "state", "index", "map", "log_prob"], rows)?
            } else {
                let (word, states) = sample_chain(&spec, &w, steps, common.seed)?;
                let rows = states.iter().enumerate().map(|(k, s)| {
                    vec![k.to_string(), s.to_string(), word.get(k).map_or(String::new(), |x| spec.index_name(*x).to_string())]
                });
                csv_bytes(&prov, &["step", "state", "index"], rows)?
            };
            emit(common.out.as_deref(), &bytes)
        }
        Command::Words { common, state, depth } => {
            let spec = common.load()?;
            let w = spec.parse_state(&state)?;
            let prov = common.provenance(&spec).with("state", &w).with("depth", depth);
            let mut text = prov.comment();
            text.push('\n');
            for word in admissible_words(&spec, &w, depth)? {
                let names: Vec<&str> = word.iter().map(|x| spec.index_name(*x)).collect();
                text.push_str(&format!("{}\t{}\n", names.join(" "), fmt_f64(cylinder_prob(&spec, &w, &word)?)));
            }
            emit(common.out.as_deref(), text.as_bytes())
        }
        Command::JuliaRadial { common, tol } => {
            let spec = common.load()?;
            let prov = common.provenance(&spec).with("tol", tol);
            let rows: Vec<Vec<String>> =
                statewise_julia_radial(&spec, tol)?.iter().flat_map(|(label, set)| set_rows(label, set)).collect();
            emit(common.out.as_deref(), &csv_bytes(&prov, &RADIAL_SET_HEADER, rows)?)
        }
        Command::JuliaGrid { common, state, window, res, depth, samples, probe, threshold, path, profile, ppm, palette } => {
            let spec = common.load()?;
            let w = spec.parse_state(&state)?;
            let win = parse_window(&window, res)?;
            let pool = par::pool(par::threads_from_env()?)?;
            let offset = probe.unwrap_or_else(|| win.default_probe_offset());
            let prov = common
                .provenance(&spec)
                .with("state", &w)
                .with("window", &window)
                .with("res", res)
                .with("depth", depth)
                .with("probe", offset)
                .with("threshold", threshold)
                .with("mode", if path { "path" } else { "sampled-words" });
            let grid = if path {
                let p = sample_path_with_maps(&spec, &w, depth, common.seed)?;
                par::path_grid(&pool, &p.maps, &win, offset, threshold)?
            } else {
                let params =
                    GridParams { max_depth: depth, word_samples: samples, probe_offset: offset, diam_threshold: threshold, seed: common.seed };
                par::julia_grid(&pool, &spec, &w, &win, &params)?
            };
            let prov = if path { prov } else { prov.with("samples", samples) };
            if let Some(p) = profile {
                let rows = radial_profile(&grid).into_iter().map(|(r, frac)| [fmt_f64(r), fmt_f64(frac)]);
                emit(Some(&p), &csv_bytes(&prov, &["radius", "julia_fraction"], rows)?)?;
            }
            if let Some(p) = ppm {
                emit(Some(&p), &ppm_bytes(&prov, &grid, palette.into()))?;
            }
            emit(common.out.as_deref(), &grid_bytes(&prov, &grid))
        }
        Command::Render { grid, palette, out } => {
            let text = std::fs::read_to_string(&grid)?;
            let (prov, g) = parse_grid(&text)?;
            emit(out.as_deref(), &ppm_bytes(&prov, &g, palette.into()))
        }
        Command::Kernel { common, state, depth, tol } => {
            let spec = common.load()?;
            let w = spec.parse_state(&state)?;
            let cert = kernel_julia_depth(&spec, &w, depth, tol)?;
            let prov = common.provenance(&spec).with("state", &w).with("depth", depth).with("tol", tol);
            emit(common.out.as_deref(), &json_bytes(&prov, json!({"certificate": certificate_json(&cert)}))?)
        }
        Command::Operator { common, mode, phi, y, state, steps, samples, radii } => {
            let spec = common.load()?;
            let phi_fn = parse_phi(&phi)?;
            let p = ProductPoint::new(parse_point(&y)?, spec.parse_state(&state)?);
            let prov = common.provenance(&spec).with("state", &p.w).with("y", p.y).with("phi", &phi).with("steps", steps);
            let bytes = match mode {
                OperatorMode::Iterate | OperatorMode::Oracle => {
                    let f = if matches!(mode, OperatorMode::Iterate) { iterate_m } else { word_sum_oracle };
                    let rows = (0..=steps)
                        .map(|n| Ok([n.to_string(), fmt_f64(f(&spec, &phi_fn, &p, n)?)]))
                        .collect::<CliResult<Vec<_>>>()?;
                    let prov = prov.with("mode", if matches!(mode, OperatorMode::Iterate) { "iterate" } else { "oracle" });
                    csv_bytes(&prov, &["n", "value"], rows)?
                }
                OperatorMode::Mc => {
                    let (mean, se) = mc_estimate_m(&spec, &phi_fn, &p, steps, samples, common.seed)?;
                    let prov = prov.with("mode", "mc").with("samples", samples);
                    csv_bytes(&prov, &["n", "mean", "stderr", "samples"], [[steps.to_string(), fmt_f64(mean), fmt_f64(se), samples.to_string()]])?
                }
                OperatorMode::Diagnostic => {
                    let r = parse_list(&radii, "radii")?;
                    let t = equicontinuity_diagnostic(&spec, &phi_fn, &p, &r, steps)?;
                    let mut rows: Vec<[String; 4]> =
                        t.rows.iter().map(|(d, n, o)| ["osc".into(), fmt_f64(*d), n.to_string(), fmt_f64(*o)]).collect();
                    rows.extend(t.sup_over_n.iter().map(|(d, s)| ["sup".into(), fmt_f64(*d), String::new(), fmt_f64(*s)]));
                    let prov = prov.with("mode", "diagnostic").with("radii", &radii).with("nonincreasing", t.nonincreasing());
                    csv_bytes(&prov, &["kind", "delta", "n", "value"], rows)?
                }
            };
            emit(common.out.as_deref(), &bytes)
        }
        Command::Jump { common, state, drive, steps, depth, conv_tol, format } => {
            let spec = common.load()?;
            let w = spec.parse_state(&state)?;
            let d = parse_drive(&spec, &drive, common.seed)?;
            let r = detect_jump(&spec, &w, &d, steps, depth, conv_tol)?;
            let prov = common
                .provenance(&spec)
                .with("state", &w)
                .with("drive", &drive)
                .with("steps", steps)
                .with("depth", depth)
                .with("conv_tol", conv_tol);
            let bytes = match format {
                Format::Json => {
                    let traj: Vec<Value> = r
                        .trajectory
                        .iter()
                        .map(|(k, s, c)| json!({"step": k, "state": s.to_string(), "kernel": c.as_ref().map(certificate_json)}))
                        .collect();
                    json_bytes(
                        &prov,
                        json!({
                            "verdict": r.verdict.to_string(),
                            "limit_state": r.limit_state.as_ref().map(|s| s.to_string()),
                            "limit_verdict": r.limit_verdict.as_ref().map(certificate_json),
                            "warning": r.warning,
                            "trajectory": traj,
                        }),
                    )?
                }
                Format::Csv => {
                    let prov = prov.with("verdict", &r.verdict);
                    let rows = r.trajectory.iter().map(|(k, s, c)| {
                        [k.to_string(), s.to_string(), c.as_ref().map_or(String::new(), |c| c.to_string())]
                    });
                    csv_bytes(&prov, &["step", "state", "kernel"], rows)?
                }
            };
            emit(common.out.as_deref(), &bytes)
        }
        Command::Irreducible { common, states, depth, kernel_depth } => {
            let spec = common.load()?;
            let list = states.split(',').map(|s| spec.parse_state(s)).collect::<rscc_core::Result<Vec<_>>>()?;
            let irr = check_irreducible(&spec, &list, depth)?;
            let mut body = json!({
                "irreducible": irr.irreducible,
                "witness": irr.witness.as_ref().map(|(a, b)| json!({"from": a.to_string(), "unreached": b.to_string()})),
            });
            if let (Some(kd), true) = (kernel_depth, irr.irreducible) {
                let p = propagation_check(&spec, &list, kd)?;
                body["propagation"] = json!({
                    "holds": p.holds,
                    "vacuous": p.vacuous,
                    "verdicts": p.verdicts.iter().map(|(w, c)| json!({"state": w.to_string(), "kernel": certificate_json(c)})).collect::<Vec<_>>(),
                });
            }
            let prov = common.provenance(&spec).with("states", &states).with("depth", depth);
            emit(common.out.as_deref(), &json_bytes(&prov, body)?)
        }
        Command::Fattening { eps, y0, steps, drive, seed, format, out } => {
            let spec = rscc_core::builtin::fattening();
            let d = parse_drive(&spec, &drive, seed)?;
            let t = fattening_experiment(eps, y0, steps, &d)?;
            let prov = Provenance::new(&spec.name, seed).with("eps", eps).with("y0", y0).with("steps", steps).with("drive", &drive);
            let bytes = match format {
                Format::Csv => {
                    let prov = prov.with("all_x1_probability", t.all_x1_probability);
                    let rows = t.steps.iter().map(|s| {
                        [s.k.to_string(), s.w.to_string(), fmt_f64(s.y), fmt_f64(s.dist_unfattened), fmt_f64(s.dist_thickened)]
                    });
                    csv_bytes(&prov, &["k", "w", "y", "dist_unfattened", "dist_thickened"], rows)?
                }
                Format::Json => {
                    let steps: Vec<Value> = t
                        .steps
                        .iter()
                        .map(|s| {
                            json!({
                                "k": s.k,
                                "w": s.w.to_string(),
                                "y": json_f64(s.y),
                                "dist_unfattened": json_f64(s.dist_unfattened),
                                "dist_thickened": json_f64(s.dist_thickened),
                            })
                        })
                        .collect();
                    json_bytes(&prov, json!({"all_x1_probability": t.all_x1_probability, "steps": steps}))?
                }
            };
            emit(out.as_deref(), &bytes)
        }
        Command::Report { out, only } => {
            let only: Vec<u8> = match only {
                Some(s) => s
                    .split(',')
                    .map(|t| match t.trim().parse::<u8>() {
                        Ok(n @ 1..=10) => Ok(n),
                        _ => Err(usage(format!("--only takes criterion numbers 1..10, got '{t}'"))),
                    })
                    .collect::<CliResult<_>>()?,
                None => Vec::new(),
            };
            let (outcomes, artifacts) = report::run(&only, par::threads_from_env()?, |o| println!("{}", o.line()))?;
            std::fs::create_dir_all(&out)?;
            for a in &artifacts {
                std::fs::write(out.join(&a.name), &a.bytes)?;
            }
            std::fs::write(out.join("summary.json"), report::summary_bytes(&outcomes)?)?;
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(CliError::Acceptance { failed });
            }
            Ok(())
        }
    }
}
