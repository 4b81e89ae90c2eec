//! Pixel-grid estimates of Julia sets for general map families.
//!
//! Each pixel center is pushed through sampled compositions together with a
//! 4-point probe stencil; a large chordal spread of the stencil while the
//! center stays in a bounded annulus marks the pixel as a Julia candidate.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use num_complex::Complex64;

use crate::chain::PathCursor;
use crate::error::{invalid, unsupported, Result};
use crate::maps::{chordal_distance, MapSpec, SpherePoint};
use crate::rng::stream_id;
use crate::scenario::{PhaseSpace, ScenarioSpec};
use crate::state::StatePoint;

/// `log` of the inner and outer radius of the escape annulus.
pub const LOG_ANNULUS_LO: f64 = -18.420_680_743_952_367; // ln 1e-8
pub const LOG_ANNULUS_HI: f64 = 18.420_680_743_952_367; // ln 1e8
/// Consecutive monotone steps outside the annulus that confirm an escape.
pub const ESCAPE_STEPS: u32 = 5;
pub const DEFAULT_DIAM_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub resolution: usize,
}

impl GridWindow {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, resolution: usize) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(invalid("window bounds must satisfy min < max"));
        }
        if resolution < 8 {
            return Err(invalid(format!("resolution must be at least 8, got {resolution}")));
        }
        Ok(GridWindow { re_min, re_max, im_min, im_max, resolution })
    }

    pub fn square(half_width: f64, resolution: usize) -> Result<Self> {
        GridWindow::new(-half_width, half_width, -half_width, half_width, resolution)
    }

    pub fn pixel_count(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn pixel_width(&self) -> f64 {
        (self.re_max - self.re_min) / self.resolution as f64
    }

    pub fn pixel_height(&self) -> f64 {
        (self.im_max - self.im_min) / self.resolution as f64
    }

    /// Center of pixel `idx`, rows running top (`im_max`) to bottom.
    pub fn pixel_center(&self, idx: usize) -> Complex64 {
        let (row, col) = (idx / self.resolution, idx % self.resolution);
        Complex64::new(
            self.re_min + (col as f64 + 0.5) * self.pixel_width(),
            self.im_max - (row as f64 + 0.5) * self.pixel_height(),
        )
    }

    pub fn default_probe_offset(&self) -> f64 {
        (self.re_max - self.re_min) / (4.0 * self.resolution as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PixelLabel {
    FatouAttracting,
    FatouEscaping,
    JuliaCandidate,
    Unknown,
}

impl PixelLabel {
    pub const ALL: [PixelLabel; 4] =
        [PixelLabel::FatouAttracting, PixelLabel::FatouEscaping, PixelLabel::JuliaCandidate, PixelLabel::Unknown];

    /// One-character code used in grid text files.
    pub fn code(self) -> char {
        match self {
            PixelLabel::FatouAttracting => 'a',
            PixelLabel::FatouEscaping => 'e',
            PixelLabel::JuliaCandidate => 'J',
            PixelLabel::Unknown => '?',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        PixelLabel::ALL.into_iter().find(|l| l.code() == c)
    }

    pub fn name(self) -> &'static str {
        match self {
            PixelLabel::FatouAttracting => "fatou-attracting",
            PixelLabel::FatouEscaping => "fatou-escaping",
            PixelLabel::JuliaCandidate => "julia",
            PixelLabel::Unknown => "unknown",
        }
    }
}

impl FromStr for PixelLabel {
    type Err = crate::RsccError;

    fn from_str(s: &str) -> Result<Self> {
        PixelLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| invalid(format!("unknown pixel label '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipGrid {
    pub window: GridWindow,
    pub labels: Vec<PixelLabel>,
    /// Largest chordal probe diameter seen while the center was in the annulus.
    pub diagnostics: Vec<f64>,
}

impl MembershipGrid {
    pub fn from_pixels(window: GridWindow, pixels: Vec<(PixelLabel, f64)>) -> Result<Self> {
        if pixels.len() != window.pixel_count() {
            return Err(invalid("pixel count does not match the window"));
        }
        let (labels, diagnostics) = pixels.into_iter().unzip();
        Ok(MembershipGrid { window, labels, diagnostics })
    }

    pub fn filled(window: GridWindow, label: PixelLabel) -> Self {
        MembershipGrid { window, labels: vec![label; window.pixel_count()], diagnostics: vec![0.0; window.pixel_count()] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub max_depth: usize,
    pub word_samples: usize,
    pub probe_offset: f64,
    pub diam_threshold: f64,
    pub seed: u64,
}

impl GridParams {
    pub fn defaults(window: &GridWindow) -> Self {
        GridParams {
            max_depth: 48,
            word_samples: 8,
            probe_offset: window.default_probe_offset(),
            diam_threshold: DEFAULT_DIAM_THRESHOLD,
            seed: 0,
        }
    }

    fn check(&self) -> Result<()> {
        if self.max_depth == 0 || self.word_samples == 0 {
            return Err(invalid("max depth and word samples must be positive"));
        }
        if !(self.probe_offset > 0.0 && self.diam_threshold > 0.0) {
            return Err(invalid("probe offset and diameter threshold must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    Julia,
    EscapedToZero,
    EscapedToInfinity,
    Undecided,
}

/// Center orbit plus probe stencil under one composition sequence.
struct ProbeOrbit {
    center: SpherePoint,
    probes: [SpherePoint; 4],
    last_log: f64,
    streak_out: u32,
    streak_in: u32,
    max_diam: f64,
    threshold: f64,
}

impl ProbeOrbit {
    fn new(y: Complex64, offset: f64, threshold: f64) -> Self {
        let probe = |d: Complex64| SpherePoint::Finite(y + d);
        ProbeOrbit {
            center: SpherePoint::Finite(y),
            probes: [
                probe(Complex64::new(offset, 0.0)),
                probe(Complex64::new(-offset, 0.0)),
                probe(Complex64::new(0.0, offset)),
                probe(Complex64::new(0.0, -offset)),
            ],
            last_log: SpherePoint::Finite(y).log_modulus(),
            streak_out: 0,
            streak_in: 0,
            max_diam: 0.0,
            threshold,
        }
    }

    fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                d = d.max(chordal_distance(self.probes[i], self.probes[j]));
            }
        }
        d
    }

    fn step(&mut self, m: &MapSpec) -> Result<Option<Outcome>> {
        self.center = m.apply(self.center)?;
        for p in &mut self.probes {
            *p = m.apply(*p)?;
        }
        let s = self.center.log_modulus();
        if (LOG_ANNULUS_LO..=LOG_ANNULUS_HI).contains(&s) {
            let d = self.diameter();
            self.max_diam = self.max_diam.max(d);
            if d > self.threshold {
                return Ok(Some(Outcome::Julia));
            }
        }
        let prev = core::mem::replace(&mut self.last_log, s);
        let outward = s > LOG_ANNULUS_HI && (s > prev || s == f64::INFINITY);
        let inward = s < LOG_ANNULUS_LO && (s < prev || s == f64::NEG_INFINITY);
        self.streak_out = if outward { self.streak_out + 1 } else { 0 };
        self.streak_in = if inward { self.streak_in + 1 } else { 0 };
        Ok(if self.streak_out >= ESCAPE_STEPS {
            Some(Outcome::EscapedToInfinity)
        } else if self.streak_in >= ESCAPE_STEPS {
            Some(Outcome::EscapedToZero)
        } else {
            None
        })
    }
}

fn run_orbit<'m>(
    y: Complex64,
    offset: f64,
    threshold: f64,
    maps: impl Iterator<Item = Result<&'m MapSpec>>,
) -> Result<(Outcome, f64)> {
    let mut orbit = ProbeOrbit::new(y, offset, threshold);
    for m in maps {
        if let Some(o) = orbit.step(m?)? {
            return Ok((o, orbit.max_diam));
        }
    }
    Ok((Outcome::Undecided, orbit.max_diam))
}

fn combine(outcomes: &[Outcome]) -> PixelLabel {
    if outcomes.contains(&Outcome::Julia) {
        PixelLabel::JuliaCandidate
    } else if outcomes.iter().all(|o| *o == Outcome::EscapedToZero) {
        PixelLabel::FatouAttracting
    } else if outcomes.iter().all(|o| matches!(o, Outcome::EscapedToZero | Outcome::EscapedToInfinity)) {
        PixelLabel::FatouEscaping
    } else {
        PixelLabel::Unknown
    }
}

fn require_sphere(spec: &ScenarioSpec) -> Result<()> {
    match spec.phase_space()? {
        PhaseSpace::Sphere => Ok(()),
        PhaseSpace::Interval { .. } => Err(unsupported("grid estimates need maps on the sphere")),
    }
}

/// Precondition check of [`estimate_julia_grid`], for callers that drive
/// [`julia_pixel`] themselves.
pub fn check_julia_inputs(spec: &ScenarioSpec, w: &StatePoint, params: &GridParams) -> Result<()> {
    require_sphere(spec)?;
    params.check()?;
    spec.state_space.check(w)
}

/// Precondition check of [`estimate_path_julia_grid`].
pub fn check_path_inputs(maps: &[MapSpec], probe_offset: f64, diam_threshold: f64) -> Result<()> {
    if maps.is_empty() {
        return Err(invalid("the path must contain at least one map"));
    }
    if maps.iter().any(|m| !m.acts_on_sphere()) {
        return Err(unsupported("grid estimates need maps on the sphere"));
    }
    if !(probe_offset > 0.0 && diam_threshold > 0.0) {
        return Err(invalid("probe offset and diameter threshold must be positive"));
    }
    Ok(())
}

/// Label and diagnostic of one pixel of [`estimate_julia_grid`]. Sample `j`
/// of pixel `p` uses RNG stream `p·wordSamples + j`.
pub fn julia_pixel(
    spec: &ScenarioSpec,
    w: &StatePoint,
    window: &GridWindow,
    params: &GridParams,
    pixel: usize,
) -> Result<(PixelLabel, f64)> {
    let y = window.pixel_center(pixel);
    let mut outcomes = Vec::with_capacity(params.word_samples);
    let mut diag: f64 = 0.0;
    for j in 0..params.word_samples {
        let stream = stream_id(pixel as u64, params.word_samples as u64, j as u64);
        let mut cur = PathCursor::new(spec, w, params.seed, stream)?;
        let maps = (0..params.max_depth).map(|_| cur.advance().map(|s| &spec.tau[s.index][s.map_id].map));
        let (o, d) = run_orbit(y, params.probe_offset, params.diam_threshold, maps)?;
        diag = diag.max(d);
        outcomes.push(o);
        if o == Outcome::Julia {
            break;
        }
    }
    Ok((combine(&outcomes), diag))
}

/// Julia/Fatou classification of every pixel from sampled admissible paths.
pub fn estimate_julia_grid(
    spec: &ScenarioSpec,
    w: &StatePoint,
    window: &GridWindow,
    params: &GridParams,
) -> Result<MembershipGrid> {
    check_julia_inputs(spec, w, params)?;
    let pixels = (0..window.pixel_count())
        .map(|p| julia_pixel(spec, w, window, params, p))
        .collect::<Result<Vec<_>>>()?;
    MembershipGrid::from_pixels(*window, pixels)
}

/// Label of one pixel under the single composition sequence `maps`.
pub fn path_pixel(maps: &[MapSpec], window: &GridWindow, probe_offset: f64, diam_threshold: f64, pixel: usize) -> Result<(PixelLabel, f64)> {
    let (o, d) = run_orbit(window.pixel_center(pixel), probe_offset, diam_threshold, maps.iter().map(Ok))?;
    Ok((combine(&[o]), d))
}

/// Probe test along one path `γ_1, γ_2, …` (all of `maps`).
pub fn estimate_path_julia_grid(
    maps: &[MapSpec],
    window: &GridWindow,
    probe_offset: f64,
    diam_threshold: f64,
) -> Result<MembershipGrid> {
    check_path_inputs(maps, probe_offset, diam_threshold)?;
    let pixels = (0..window.pixel_count())
        .map(|p| path_pixel(maps, window, probe_offset, diam_threshold, p))
        .collect::<Result<Vec<_>>>()?;
    MembershipGrid::from_pixels(*window, pixels)
}

/// Fraction of pixels carrying `label`.
pub fn pixel_measure(grid: &MembershipGrid, label: PixelLabel) -> f64 {
    if grid.labels.is_empty() {
        return 0.0;
    }
    grid.labels.iter().filter(|l| **l == label).count() as f64 / grid.labels.len() as f64
}

/// Julia-candidate fraction per annulus of one pixel width around 0:
/// `(mid radius, fraction)` for each bin that contains pixels.
pub fn radial_profile(grid: &MembershipGrid) -> Vec<(f64, f64)> {
    let w = grid.window;
    let bin = w.pixel_width().min(w.pixel_height());
    let r_max = (0..w.pixel_count()).map(|p| w.pixel_center(p).norm()).fold(0.0, f64::max);
    let nbins = (r_max / bin) as usize + 1;
    let mut counts = vec![(0usize, 0usize); nbins];
    for (p, l) in grid.labels.iter().enumerate() {
        let k = (w.pixel_center(p).norm() / bin) as usize;
        counts[k].0 += 1;
        if *l == PixelLabel::JuliaCandidate {
            counts[k].1 += 1;
        }
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|(_, (n, _))| *n > 0)
        .map(|(k, (n, j))| ((k as f64 + 0.5) * bin, j as f64 / n as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Palette {
    Bw,
    Heat,
}

impl FromStr for Palette {
    type Err = crate::RsccError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bw" => Ok(Palette::Bw),
            "heat" => Ok(Palette::Heat),
            _ => Err(invalid(format!("unknown palette '{s}'"))),
        }
    }
}

fn color(label: PixelLabel, diag: f64, palette: Palette) -> [u8; 3] {
    match (palette, label) {
        (Palette::Bw, PixelLabel::JuliaCandidate) => [0x00; 3],
        (Palette::Bw, PixelLabel::Unknown) => [0x80; 3],
        (Palette::Bw, _) => [0xFF; 3],
        (Palette::Heat, PixelLabel::JuliaCandidate) => {
            let t = (diag / 2.0).clamp(0.0, 1.0);
            [0xFF, (255.0 * (1.0 - t)) as u8, 0x00]
        }
        (Palette::Heat, PixelLabel::FatouEscaping) => [0x14, 0x28, 0xA0],
        (Palette::Heat, PixelLabel::FatouAttracting) => [0x0A, 0x0A, 0x3C],
        (Palette::Heat, PixelLabel::Unknown) => [0x80; 3],
    }
}

/// Binary PPM (`P6`) image, one pixel per grid cell, rows top to bottom.
pub fn render_ppm(grid: &MembershipGrid, palette: Palette) -> Vec<u8> {
    let n = grid.window.resolution;
    let header = format!("P6\n{n} {n}\n255\n");
    let mut out = Vec::with_capacity(header.len() + 3 * n * n);
    out.extend_from_slice(header.as_bytes());
    for (l, d) in grid.labels.iter().zip(&grid.diagnostics) {
        out.extend_from_slice(&color(*l, *d, palette));
    }
    out
}
