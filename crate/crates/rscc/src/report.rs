//! The acceptance battery behind `rscc report`.
//!
//! Each criterion returns a pass/fail outcome with a one-line detail and the
//! artifacts it produced. Artifacts never contain timings, so repeated runs
//! are byte-identical.

use std::f64::consts::{LN_2, SQRT_2};
use std::time::Instant;

use rscc_core::analysis::{detect_jump, fattening_experiment, Drive, JumpVerdict, DEFAULT_CONV_TOL};
use rscc_core::chain::sample_path_with_maps;
use rscc_core::grid::{GridParams, GridWindow, Palette, PixelLabel, DEFAULT_DIAM_THRESHOLD};
use rscc_core::maps::compose_monomials;
use rscc_core::operator::{
    apply_m, equicontinuity_diagnostic, iterate_m, mc_estimate_m, word_sum_oracle, ProductPoint, TestFunction,
};
use rscc_core::radial::{kernel_julia_depth, path_julia_radius, radial_preimage, semigroup_julia_radial, DEFAULT_TOL};
use rscc_core::rng::StreamRng;
use rscc_core::scenario::{builtin, embed_gdms, GdmsEdge};
use rscc_core::{KernelCertificate, MapSpec, Monomial, RadialSet, ScenarioSpec, SpherePoint, StatePoint};
use serde_json::{json, Value};

use crate::error::CliResult;
use crate::output::{certificate_json, csv_bytes, fmt_f64, set_rows, RADIAL_SET_HEADER, grid_bytes, json_bytes, ppm_bytes, Provenance};
use crate::par;

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "annulus reproduction"),
    (2, "preimage algebra"),
    (3, "kernel emptiness"),
    (4, "jump detection"),
    (5, "operator identities"),
    (6, "cooperation signature"),
    (7, "pathwise measure-zero proxy"),
    (8, "fattening counterexample"),
    (9, "path Julia oracle agreement"),
    (10, "determinism"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    /// `criterion  3 kernel emptiness: PASS (detail)`
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {:>2} {}: {verdict} ({})", self.id, self.title, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

fn artifact(name: &str, bytes: Vec<u8>) -> Artifact {
    Artifact { name: name.into(), bytes }
}

type Checked = (Outcome, Vec<Artifact>);

fn outcome(id: u8, passed: bool, detail: String) -> Outcome {
    let title = CRITERIA[id as usize - 1].1;
    Outcome { id, title, passed, detail }
}

fn f() -> Monomial {
    Monomial::new(1.0, 2).expect("valid monomial")
}

fn g() -> Monomial {
    Monomial::new(0.5, 2).expect("valid monomial")
}

fn annulus() -> CliResult<Checked> {
    let set = semigroup_julia_radial(&[f(), g()], 1e-9)?;
    let mut best = f64::INFINITY;
    for _ in 0..20 {
        let t = Instant::now();
        std::hint::black_box(semigroup_julia_radial(std::hint::black_box(&[f(), g()]), 1e-9)?);
        best = best.min(t.elapsed().as_secs_f64());
    }
    let (lo, hi) = match set.intervals() {
        [(a, b)] => (*a, *b),
        _ => (f64::NAN, f64::NAN),
    };
    let err = lo.abs().max((hi - LN_2).abs());
    let passed = err <= 1e-8 && best < 1e-3;
    let prov = Provenance::new("semigroup{z^2,z^2/2}", 0).with("tol", 1e-9);
    let bytes = csv_bytes(&prov, &RADIAL_SET_HEADER, set_rows("J(S)", &set))?;
    let detail = format!("{set}, endpoint error {err:.1e}, best runtime {:.1} us", best * 1e6);
    Ok((outcome(1, passed, detail), vec![artifact("c1_annulus.csv", bytes)]))
}

fn preimages() -> CliResult<Checked> {
    let a = RadialSet::interval(0.0, LN_2);
    let ff = compose_monomials(&[f(), f()])?;
    let cases = [
        ("f^-1", radial_preimage(&f(), &a), (0.0, SQRT_2.ln())),
        ("g^-1", radial_preimage(&g(), &a), (SQRT_2.ln(), 2f64.ln())),
        ("(f.f)^-1", radial_preimage(&ff, &a), (0.0, 2f64.powf(0.25).ln())),
    ];
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (name, set, (elo, ehi)) in &cases {
        let err = match set.intervals() {
            [(lo, hi)] => (lo - elo).abs().max((hi - ehi).abs()),
            _ => f64::INFINITY,
        };
        worst = worst.max(err);
        rows.push(vec![name.to_string(), set.to_string(), fmt_f64(*elo), fmt_f64(*ehi), fmt_f64(err)]);
    }
    let prov = Provenance::new("semigroup{z^2,z^2/2}", 0).with("set", "[0,log2]");
    let bytes = csv_bytes(&prov, &["preimage", "result", "expected_lo", "expected_hi", "error"], rows)?;
    Ok((outcome(2, worst <= 1e-12, format!("worst endpoint error {worst:.1e}")), vec![artifact("c2_preimages.csv", bytes)]))
}

fn kernels() -> CliResult<Checked> {
    let spec = builtin::jump_annulus();
    let at2 = kernel_julia_depth(&spec, &StatePoint::extra("2"), 2, DEFAULT_TOL)?;
    let at0 = kernel_julia_depth(&spec, &StatePoint::rung(0), 2, DEFAULT_TOL)?;
    let ok2 = at2 == KernelCertificate::EmptyAtDepth(2);
    let ok0 = matches!(&at0, KernelCertificate::ExactNonempty(s)
        if matches!(s.intervals(), [(a, b)] if a.abs() <= 1e-12 && b.abs() <= 1e-12));
    let prov = Provenance::new(&spec.name, 0).with("depth", 2).with("tol", DEFAULT_TOL);
    let bytes = json_bytes(&prov, json!({"state_2": certificate_json(&at2), "state_0": certificate_json(&at0)}))?;
    let detail = format!("state 2: {at2}; state 0: {at0}");
    Ok((outcome(3, ok2 && ok0, detail), vec![artifact("c3_kernel.json", bytes)]))
}

struct JumpCase {
    spec: ScenarioSpec,
    start: StatePoint,
    drive: Drive,
    horizon: usize,
    expect: JumpVerdict,
    limit: Option<StatePoint>,
}

fn drive_text(spec: &ScenarioSpec, d: &Drive) -> String {
    match d {
        Drive::Forced(w) => format!("forced:{}", w.iter().map(|x| spec.index_name(*x)).collect::<Vec<_>>().join(",")),
        Drive::Sampled(seed) => format!("sampled:{seed}"),
    }
}

fn two_state_gdms() -> CliResult<ScenarioSpec> {
    let f = MapSpec::monomial(1.0, 2)?;
    let g = MapSpec::monomial(0.5, 2)?;
    let both = |from, to| GdmsEdge { from, to, maps: vec![(f.clone(), 0.25), (g.clone(), 0.25)] };
    let mut s = embed_gdms(2, &[both(0, 0), both(0, 1), both(1, 0), both(1, 1)])?;
    s.name = "gdms-two-state".into();
    Ok(s)
}

fn jumps() -> CliResult<Checked> {
    let ja = builtin::jump_annulus();
    let re = builtin::reinforcement(0.5)?;
    let tr = builtin::reinforcement_trunc(0.5, 0.01)?;
    let mut cases = vec![
        JumpCase {
            spec: ja.clone(),
            start: StatePoint::rung(1),
            drive: Drive::Forced(vec![ja.index_by_name("x1")?]),
            horizon: 50,
            expect: JumpVerdict::JumpDetected,
            limit: Some(StatePoint::rung(0)),
        },
        JumpCase {
            spec: re.clone(),
            start: StatePoint::real(0.5),
            drive: Drive::Forced(vec![re.index_by_name("1")?]),
            horizon: 60,
            expect: JumpVerdict::JumpDetected,
            limit: Some(StatePoint::real(1.0)),
        },
    ];
    let trunc_drives = [
        Drive::Forced(vec![tr.index_by_name("1")?]),
        Drive::Forced(vec![tr.index_by_name("0")?]),
        Drive::Sampled(0),
        Drive::Sampled(1),
        Drive::Sampled(2),
    ];
    for drive in trunc_drives {
        cases.push(JumpCase {
            spec: tr.clone(),
            start: StatePoint::real(0.5),
            drive,
            horizon: 200,
            expect: JumpVerdict::NoJumpWithinHorizon,
            limit: None,
        });
    }
    for spec in [builtin::gdms_demo(), two_state_gdms()?] {
        for start in ["v0", "v1"] {
            for seed in 0..3 {
                cases.push(JumpCase {
                    spec: spec.clone(),
                    start: StatePoint::discrete(start),
                    drive: Drive::Sampled(seed),
                    horizon: 200,
                    expect: JumpVerdict::NoJumpWithinHorizon,
                    limit: None,
                });
            }
        }
    }
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for c in &cases {
        let r = detect_jump(&c.spec, &c.start, &c.drive, c.horizon, 2, DEFAULT_CONV_TOL)?;
        let ok = r.verdict == c.expect && (c.limit.is_none() || r.limit_state == c.limit);
        let drive = drive_text(&c.spec, &c.drive);
        if !ok {
            failures.push(format!("{} from {} ({drive}) gave {}", c.spec.name, c.start, r.verdict));
        }
        records.push(json!({
            "scenario": c.spec.name,
            "start": c.start.to_string(),
            "drive": drive,
            "horizon": c.horizon,
            "expected": c.expect.name(),
            "verdict": r.verdict.to_string(),
            "limit_state": r.limit_state.as_ref().map(|s| s.to_string()),
            "limit_verdict": r.limit_verdict.as_ref().map(certificate_json),
            "passed": ok,
        }));
    }
    let prov = Provenance::new("battery", 0).with("kernel_depth", 2).with("conv_tol", DEFAULT_CONV_TOL);
    let bytes = json_bytes(&prov, json!({ "cases": records }))?;
    let detail = if failures.is_empty() {
        format!("{} trajectories, 2 jumps and {} no-jump verdicts as expected", cases.len(), cases.len() - 2)
    } else {
        failures.join("; ")
    };
    Ok((outcome(4, failures.is_empty(), detail), vec![artifact("c4_jumps.json", bytes)]))
}

fn phi_text(phi: &TestFunction) -> String {
    match phi {
        TestFunction::One => "one".into(),
        TestFunction::StateCoord => "state".into(),
        TestFunction::RadialBump { center, width } => format!("bump:{center},{width}"),
        TestFunction::ClippedLogMod { lo, hi } => format!("clip:{lo},{hi}"),
    }
}

fn operators() -> CliResult<Checked> {
    let ja = builtin::jump_annulus();
    let re = builtin::reinforcement(0.5)?;
    let phis = [
        TestFunction::One,
        TestFunction::StateCoord,
        TestFunction::RadialBump { center: 0.3, width: 0.5 },
        TestFunction::ClippedLogMod { lo: -1.0, hi: 1.0 },
    ];
    let ys = [SpherePoint::new(0.6, 0.5), SpherePoint::real(1.2), SpherePoint::new(-1.1, 0.9)];
    let cases: Vec<(&ScenarioSpec, StatePoint)> = vec![
        (&ja, StatePoint::rung(1)),
        (&ja, StatePoint::rung(3)),
        (&ja, StatePoint::extra("2")),
        (&ja, StatePoint::rung(0)),
        (&re, StatePoint::real(0.5)),
        (&re, StatePoint::real(0.25)),
        (&re, StatePoint::real(0.0)),
    ];
    let mut rows = Vec::new();
    let mut worst_identity: f64 = 0.0;
    for (spec, w) in &cases {
        for phi in &phis {
            for y in &ys {
                let p = ProductPoint::new(*y, w.clone());
                for n in 1..=6 {
                    let a = iterate_m(spec, phi, &p, n)?;
                    let b = word_sum_oracle(spec, phi, &p, n)?;
                    worst_identity = worst_identity.max((a - b).abs());
                    rows.push(vec![
                        "identity".into(),
                        spec.name.clone(),
                        w.to_string(),
                        y.to_string(),
                        phi_text(phi),
                        n.to_string(),
                        fmt_f64(a),
                        fmt_f64(b),
                        fmt_f64((a - b).abs()),
                    ]);
                }
            }
        }
    }
    let mut mc_ok = true;
    let mut mc_worst: f64 = 0.0;
    let mc_cases = [
        (&ja, StatePoint::rung(1), SpherePoint::real(1.1), phis[3]),
        (&ja, StatePoint::extra("2"), SpherePoint::new(0.9, 0.6), phis[2]),
        (&re, StatePoint::real(0.5), SpherePoint::real(0.9), phis[2]),
        (&re, StatePoint::real(0.5), SpherePoint::real(1.3), phis[1]),
    ];
    for (k, (spec, w, y, phi)) in mc_cases.iter().enumerate() {
        let p = ProductPoint::new(*y, w.clone());
        let exact = iterate_m(spec, phi, &p, 4)?;
        let (mean, se) = mc_estimate_m(spec, phi, &p, 4, 100_000, k as u64)?;
        let z = if se > 0.0 { (mean - exact).abs() / se } else if mean == exact { 0.0 } else { f64::INFINITY };
        mc_ok &= (mean - exact).abs() <= 4.0 * se || (mean - exact).abs() <= 1e-12;
        mc_worst = mc_worst.max(z);
        rows.push(vec![
            "monte-carlo".into(),
            spec.name.clone(),
            w.to_string(),
            y.to_string(),
            phi_text(phi),
            "4".into(),
            fmt_f64(mean),
            fmt_f64(exact),
            fmt_f64(se),
        ]);
    }
    let mut mart_worst: f64 = 0.0;
    for k in 0..20 {
        let wv = k as f64 / 19.0;
        let p = ProductPoint::new(SpherePoint::real(0.7), StatePoint::real(wv));
        let v = apply_m(&re, &TestFunction::StateCoord, &p)?;
        let w_coord = re.state_space.coordinate(&p.w);
        mart_worst = mart_worst.max((v - w_coord).abs());
        rows.push(vec![
            "martingale".into(),
            re.name.clone(),
            p.w.to_string(),
            p.y.to_string(),
            "state".into(),
            "1".into(),
            fmt_f64(v),
            fmt_f64(w_coord),
            fmt_f64((v - w_coord).abs()),
        ]);
    }
    let passed = worst_identity <= 1e-12 && mc_ok && mart_worst <= 1e-12;
    let prov = Provenance::new("jump-annulus+reinforcement", 0).with("alpha", 0.5).with("mc_samples", 100_000);
    let header = ["check", "scenario", "state", "y", "phi", "n", "value", "reference", "error_or_stderr"];
    let bytes = csv_bytes(&prov, &header, rows)?;
    let detail = format!(
        "recursion vs word sum {worst_identity:.1e}, Monte Carlo worst {mc_worst:.2} stderr, martingale {mart_worst:.1e}"
    );
    Ok((outcome(5, passed, detail), vec![artifact("c5_operator.csv", bytes)]))
}

/// Radii of the cooperation diagnostic.
pub const COOP_RADII: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
/// Test function on the truncated scenario: a wide log-radius bump.
pub const COOP_PHI: TestFunction = TestFunction::RadialBump { center: 0.0, width: 8.0 };
/// Test function on the frozen scenario: a narrow clip around the unit circle.
pub const FROZEN_PHI: TestFunction = TestFunction::ClippedLogMod { lo: -0.01, hi: 0.01 };

fn cooperation() -> CliResult<Checked> {
    let tr = builtin::reinforcement_trunc(0.5, 0.01)?;
    let mut rows = Vec::new();
    let mut coop_ok = true;
    let mut worst: f64 = 0.0;
    let moduli = [0.5, 0.9, 1.0, 1.2, 1.5, 2.0, 2.5];
    let angles = [0.0, 1.0];
    let states = [0.01, 0.25, 0.5, 0.75, 0.99];
    for &w in &states {
        for &r in &moduli {
            for &a in &angles {
                let y = SpherePoint::Finite(num_polar(r, a));
                let p = ProductPoint::new(y, StatePoint::real(w));
                let t = equicontinuity_diagnostic(&tr, &COOP_PHI, &p, &COOP_RADII, 8)?;
                let at = t.sup_at(1e-3).unwrap_or(f64::INFINITY);
                coop_ok &= t.nonincreasing() && at < 0.05;
                worst = worst.max(at);
                for (d, s) in &t.sup_over_n {
                    rows.push(vec![tr.name.clone(), w.to_string(), y.to_string(), fmt_f64(*d), fmt_f64(*s)]);
                }
            }
        }
    }
    // frozen scenario: reinforcement at w = 0 never leaves z ↦ z²
    let frozen = builtin::reinforcement(0.5)?;
    let range = FROZEN_PHI.range(&frozen.state_space);
    let mut frozen_ok = true;
    let mut frozen_min = f64::INFINITY;
    for a in [0.0, 0.7, 2.0] {
        let y = SpherePoint::Finite(num_polar(1.0, a));
        let p = ProductPoint::new(y, StatePoint::real(0.0));
        let t = equicontinuity_diagnostic(&frozen, &FROZEN_PHI, &p, &COOP_RADII, 8)?;
        for (d, s) in &t.sup_over_n {
            frozen_ok &= *s >= 0.25 * range;
            frozen_min = frozen_min.min(*s);
            rows.push(vec!["frozen".into(), "0".into(), y.to_string(), fmt_f64(*d), fmt_f64(*s)]);
        }
    }
    let prov = Provenance::new("reinforcement-trunc+frozen", 0)
        .with("alpha", 0.5)
        .with("eps", 0.01)
        .with("n_max", 8)
        .with("phi", phi_text(&COOP_PHI))
        .with("frozen_phi", phi_text(&FROZEN_PHI));
    let bytes = csv_bytes(&prov, &["scenario", "state", "y", "delta", "sup_over_n"], rows)?;
    let detail = format!(
        "truncated: worst sup at 1e-3 = {worst:.4} (< 0.05), monotone {coop_ok}; frozen: min sup = {frozen_min:.4} vs 0.25*range = {:.4}",
        0.25 * range
    );
    Ok((outcome(6, coop_ok && frozen_ok, detail), vec![artifact("c6_cooperation.csv", bytes)]))
}

fn num_polar(r: f64, theta: f64) -> rscc_core::maps::Complex64 {
    rscc_core::maps::Complex64::from_polar(r, theta)
}

pub const PATH_COUNT: u64 = 20;
pub const PATH_DEPTH: usize = 48;
pub const PATH_HALF_WIDTH: f64 = 2.5;
pub const PATH_RESOLUTIONS: [usize; 3] = [128, 256, 512];

fn path_maps(seed: u64) -> CliResult<Vec<MapSpec>> {
    let spec = builtin::jump_annulus();
    Ok(sample_path_with_maps(&spec, &StatePoint::extra("2"), PATH_DEPTH, seed)?.maps)
}

fn path_grid_artifacts(pool: &rayon::ThreadPool, seed: u64, res: usize) -> CliResult<(f64, Vec<u8>, Vec<u8>)> {
    let window = GridWindow::square(PATH_HALF_WIDTH, res)?;
    let grid = par::path_grid(pool, &path_maps(seed)?, &window, window.default_probe_offset(), DEFAULT_DIAM_THRESHOLD)?;
    let prov = Provenance::new("jump-annulus", seed)
        .with("state", 2)
        .with("path_depth", PATH_DEPTH)
        .with("window", format!("{0},{1},{0},{1}", -PATH_HALF_WIDTH, PATH_HALF_WIDTH))
        .with("res", res);
    let m = rscc_core::grid::pixel_measure(&grid, PixelLabel::JuliaCandidate);
    Ok((m, grid_bytes(&prov, &grid), ppm_bytes(&prov, &grid, Palette::Bw)))
}

fn measure_zero(pool: &rayon::ThreadPool) -> CliResult<Checked> {
    let mut rows = Vec::new();
    let mut arts = Vec::new();
    let mut failures = Vec::new();
    let mut worst_scaled: f64 = 0.0;
    for seed in 0..PATH_COUNT {
        let mut ms = Vec::new();
        for &res in &PATH_RESOLUTIONS {
            let (m, _, ppm) = path_grid_artifacts(pool, seed, res)?;
            if seed == 0 && res == 512 {
                arts.push(artifact("c7_path0_512.ppm", ppm));
            }
            ms.push(m);
        }
        let decreasing = ms.windows(2).all(|w| w[1] < w[0]);
        let bound = 8.0 / 512.0;
        if !decreasing || ms[2] > bound {
            failures.push(format!("path {seed}: {ms:?}"));
        }
        worst_scaled = worst_scaled.max(ms[2] * 512.0);
        let mut row = vec![seed.to_string()];
        row.extend(ms.iter().map(|m| fmt_f64(*m)));
        row.push(fmt_f64(bound));
        rows.push(row);
    }
    let prov = Provenance::new("jump-annulus", 0)
        .with("state", 2)
        .with("paths", PATH_COUNT)
        .with("path_depth", PATH_DEPTH)
        .with("window", format!("{0},{1},{0},{1}", -PATH_HALF_WIDTH, PATH_HALF_WIDTH));
    arts.insert(0, artifact("c7_path_measure.csv", csv_bytes(&prov, &["path_seed", "m128", "m256", "m512", "bound512"], rows)?));
    let detail = if failures.is_empty() {
        format!("{PATH_COUNT} paths decrease with resolution; worst measure at 512 = {worst_scaled:.2}/512")
    } else {
        failures.join("; ")
    };
    Ok((outcome(7, failures.is_empty(), detail), arts))
}

fn fattening() -> CliResult<Checked> {
    let (eps, y0, horizon) = (0.1, 0.1, 60);
    let spec = builtin::fattening();
    let x1 = spec.index_by_name("x1")?;
    let t = fattening_experiment(eps, y0, horizon, &Drive::Forced(vec![x1]))?;
    let unfattened = t.steps.iter().all(|s| s.dist_unfattened == f64::INFINITY);
    let thickened = t
        .steps
        .iter()
        .filter(|s| 1.0 / (s.k as f64 + 1.0) < eps)
        .all(|s| s.dist_thickened <= y0 * 2f64.powi(-(s.k as i32)));
    let product: f64 = (1..=horizon as i32).map(|n| 1.0 - 2f64.powi(-n)).product();
    let prob_ok = (t.all_x1_probability - 0.2887881).abs() <= 1e-6 && (t.all_x1_probability - product).abs() <= 1e-12;
    let rows = t.steps.iter().map(|s| {
        vec![s.k.to_string(), s.w.to_string(), fmt_f64(s.y), fmt_f64(s.dist_unfattened), fmt_f64(s.dist_thickened)]
    });
    let prov = Provenance::new(&spec.name, 0)
        .with("eps", eps)
        .with("y0", y0)
        .with("horizon", horizon)
        .with("drive", "forced:x1")
        .with("all_x1_probability", t.all_x1_probability);
    let bytes = csv_bytes(&prov, &["k", "w", "y", "dist_unfattened", "dist_thickened"], rows)?;
    let detail = format!(
        "unfattened distance infinite: {unfattened}; thickened bound holds: {thickened}; all-x1 probability {:.10}",
        t.all_x1_probability
    );
    Ok((outcome(8, unfattened && thickened && prob_ok, detail), vec![artifact("c8_fattening.csv", bytes)]))
}

/// Sup of the log-radii whose real orbit under the periodic word stays
/// bounded, by bisection on direct map iteration.
pub fn bounded_orbit_radius(maps: &[MapSpec]) -> CliResult<f64> {
    let bounded = |s: f64| -> CliResult<bool> {
        let mut z = SpherePoint::real(s.exp());
        for k in 0..4000 {
            z = maps[k % maps.len()].apply(z)?;
            let r = z.modulus();
            if r > 1e30 {
                return Ok(false);
            }
            if r < 1e-30 {
                return Ok(true);
            }
        }
        Ok(true)
    };
    let (mut lo, mut hi) = (-1.0, 2.0);
    if !bounded(lo)? || bounded(hi)? {
        return Err(crate::error::usage("bisection bracket does not straddle the Julia radius"));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if bounded(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn path_oracle() -> CliResult<Checked> {
    let fm = MapSpec::Monomial(f());
    let gm = MapSpec::Monomial(g());
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = StreamRng::new(9, i);
        let len = 1 + (rng.word(0) % 12) as usize;
        let word: Vec<MapSpec> =
            (0..len).map(|k| if rng.word(k as u64 + 1) & 1 == 0 { fm.clone() } else { gm.clone() }).collect();
        let monos: Vec<Monomial> = word.iter().map(|m| *m.as_monomial().expect("monomial")).collect();
        let (t, bound) = path_julia_radius(|k| monos[k % len], 40)?;
        let oracle = bounded_orbit_radius(&word)?;
        let err = (t - oracle).abs();
        worst = worst.max(err);
        let text: String = monos.iter().map(|m| if m.log_coeff == 0.0 { 'f' } else { 'g' }).collect();
        rows.push(vec![i.to_string(), text, fmt_f64(t), fmt_f64(bound), fmt_f64(oracle), fmt_f64(err)]);
    }
    let prov = Provenance::new("jump-annulus", 9).with("state", 2).with("words", 100).with("depth", 40);
    let bytes = csv_bytes(&prov, &["word_id", "period", "t_series", "truncation_bound", "t_oracle", "error"], rows)?;
    Ok((
        outcome(9, worst <= 1e-9, format!("100 periodic words, worst log-radius error {worst:.1e}")),
        vec![artifact("c9_path_oracle.csv", bytes)],
    ))
}

/// In-process half of the determinism check: grids computed with one and
/// with four workers must serialize identically.
fn determinism() -> CliResult<Checked> {
    let one = par::pool(Some(1))?;
    let four = par::pool(Some(4))?;
    let (_, g1, p1) = path_grid_artifacts(&one, 3, 256)?;
    let (_, g4, p4) = path_grid_artifacts(&four, 3, 256)?;
    let spec = builtin::jump_annulus();
    let window = GridWindow::square(PATH_HALF_WIDTH, 96)?;
    let params = GridParams { seed: 5, ..GridParams::defaults(&window) };
    let w = StatePoint::rung(1);
    let prov = Provenance::new(&spec.name, 5).with("state", 1).with("res", 96);
    let s1 = grid_bytes(&prov, &par::julia_grid(&one, &spec, &w, &window, &params)?);
    let s4 = grid_bytes(&prov, &par::julia_grid(&four, &spec, &w, &window, &params)?);
    let same = g1 == g4 && p1 == p4 && s1 == s4;
    let detail = format!("path and sampled-word grids identical under 1 and 4 workers: {same}");
    Ok((outcome(10, same, detail), vec![artifact("c10_sampled_grid.txt", s1)]))
}

/// Runs the selected criteria (all when `only` is empty) in order.
pub fn run(only: &[u8], threads: Option<usize>, mut on_outcome: impl FnMut(&Outcome)) -> CliResult<(Vec<Outcome>, Vec<Artifact>)> {
    let pool = par::pool(threads)?;
    let mut outcomes = Vec::new();
    let mut artifacts = Vec::new();
    for (id, _) in CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let (o, arts) = match id {
            1 => annulus()?,
            2 => preimages()?,
            3 => kernels()?,
            4 => jumps()?,
            5 => operators()?,
            6 => cooperation()?,
            7 => measure_zero(&pool)?,
            8 => fattening()?,
            9 => path_oracle()?,
            _ => determinism()?,
        };
        on_outcome(&o);
        outcomes.push(o);
        artifacts.extend(arts);
    }
    Ok((outcomes, artifacts))
}

/// `summary.json`: pass/fail per criterion, without details or timings.
pub fn summary_bytes(outcomes: &[Outcome]) -> CliResult<Vec<u8>> {
    let list: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({"criterion": o.id, "title": o.title, "passed": o.passed}))
        .collect();
    let all = outcomes.iter().all(|o| o.passed);
    json_bytes(&Provenance::new("battery", 0), json!({"criteria": list, "all_passed": all}))
}
