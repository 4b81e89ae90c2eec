//! Artifact writers. Every file carries its provenance: a leading
//! `# key=value …` comment for CSV, grid and PPM files, a `provenance`
//! object for JSON.

use std::fs;
use std::io::Write;
use std::path::Path;

use rscc_core::grid::{render_ppm, GridWindow, MembershipGrid, Palette, PixelLabel};
use rscc_core::{KernelCertificate, RadialSet};
use serde_json::{json, Map, Value};

use crate::error::{usage, CliResult};

/// Ordered `key=value` pairs identifying how an artifact was produced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance(Vec<(String, String)>);

impl Provenance {
    pub fn new(scenario: &str, seed: u64) -> Self {
        Provenance(vec![("scenario".into(), scenario.into()), ("seed".into(), seed.to_string())])
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.0
    }

    /// `# scenario=… seed=… …`; spaces inside values become `_`.
    pub fn comment(&self) -> String {
        let body: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={}", v.replace(char::is_whitespace, "_"))).collect();
        format!("# {}", body.join(" "))
    }

    pub fn parse_comment(line: &str) -> Option<Self> {
        let body = line.strip_prefix("# ")?;
        let entries = body
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(|t| t.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
            .collect::<Option<Vec<_>>>()?;
        Some(Provenance(entries))
    }

    pub fn json(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect::<Map<_, _>>())
    }
}

/// CSV document: provenance comment, header row, RFC-4180 records.
pub fn csv_bytes<R, I>(prov: &Provenance, header: &[&str], rows: I) -> CliResult<Vec<u8>>
where
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
    I: IntoIterator<Item = R>,
{
    let mut buf = Vec::new();
    write!(buf, "{}\r\n", prov.comment())?;
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

/// Pretty JSON with lexicographic key order and a `provenance` field.
pub fn json_bytes(prov: &Provenance, body: Value) -> CliResult<Vec<u8>> {
    let mut obj = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert("provenance".into(), prov.json());
    let mut bytes = serde_json::to_vec_pretty(&Value::Object(obj))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes to `path`, or to standard output when `path` is `None` or `-`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, bytes)?;
        }
        _ => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// Shortest round-trip form, in exponent notation outside `[1e-5, 1e16)`;
/// infinities as `inf`.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x != 0.0 && !(1e-5..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        // normalizes -0
        (x + 0.0).to_string()
    }
}

/// JSON number, or the strings `inf`/`-inf`/`nan` where JSON has none.
pub fn json_f64(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(fmt_f64(x)), Value::Number)
}

pub const RADIAL_SET_HEADER: [&str; 6] = ["set", "piece", "s_lo", "s_hi", "r_lo", "r_hi"];

/// One CSV row per interval of a log-radius set, with radii alongside.
pub fn set_rows(label: &str, set: &RadialSet) -> Vec<Vec<String>> {
    if set.is_empty() {
        return vec![vec![label.into(), "empty".into(), String::new(), String::new(), String::new(), String::new()]];
    }
    set.intervals()
        .iter()
        .enumerate()
        .map(|(k, (a, b))| vec![label.into(), k.to_string(), fmt_f64(*a), fmt_f64(*b), fmt_f64(a.exp()), fmt_f64(b.exp())])
        .collect()
}

/// Kernel certificate as `{verdict, depth, log_radii, text}`.
pub fn certificate_json(c: &KernelCertificate) -> Value {
    let (depth, set) = match c {
        KernelCertificate::EmptyAtDepth(d) => (Some(*d), None),
        KernelCertificate::ExactNonempty(s) => (None, Some(s)),
        KernelCertificate::UnknownSuperset(s, d) => (Some(*d), Some(s)),
    };
    let radii = set.map(|s| s.intervals().iter().map(|(a, b)| json!([json_f64(*a), json_f64(*b)])).collect::<Vec<_>>());
    json!({"verdict": c.tag(), "depth": depth, "log_radii": radii, "text": c.to_string()})
}

/// Plain-text membership grid:
///
/// ```text
/// # scenario=… seed=… …
/// window -2.5 2.5 -2.5 2.5 256
/// labels
/// <resolution rows of label codes, top row first>
/// diagnostics
/// <resolution rows of space-separated values>
/// ```
pub fn grid_bytes(prov: &Provenance, grid: &MembershipGrid) -> Vec<u8> {
    let w = &grid.window;
    let n = w.resolution;
    let mut s = format!("{}\nwindow {} {} {} {} {}\nlabels\n", prov.comment(), w.re_min, w.re_max, w.im_min, w.im_max, n);
    for row in grid.labels.chunks(n) {
        s.extend(row.iter().map(|l| l.code()));
        s.push('\n');
    }
    s.push_str("diagnostics\n");
    for row in grid.diagnostics.chunks(n) {
        let vals: Vec<String> = row.iter().map(|d| fmt_f64(*d)).collect();
        s.push_str(&vals.join(" "));
        s.push('\n');
    }
    s.into_bytes()
}

pub fn parse_grid(text: &str) -> CliResult<(Provenance, MembershipGrid)> {
    let mut lines = text.lines();
    let bad = |m: &str| usage(format!("grid file: {m}"));
    let prov = lines.next().and_then(Provenance::parse_comment).ok_or_else(|| bad("missing provenance line"))?;
    let head: Vec<&str> = lines.next().ok_or_else(|| bad("missing window line"))?.split_whitespace().collect();
    let window = match head.as_slice() {
        ["window", a, b, c, d, n] => {
            let f = |t: &str| t.parse::<f64>().map_err(|_| bad("bad window bound"));
            let n: usize = n.parse().map_err(|_| bad("bad resolution"))?;
            GridWindow::new(f(a)?, f(b)?, f(c)?, f(d)?, n)?
        }
        _ => return Err(bad("malformed window line")),
    };
    let n = window.resolution;
    if lines.next() != Some("labels") {
        return Err(bad("expected 'labels'"));
    }
    let mut labels = Vec::with_capacity(n * n);
    for _ in 0..n {
        let row = lines.next().ok_or_else(|| bad("truncated labels"))?;
        for c in row.chars() {
            labels.push(PixelLabel::from_code(c).ok_or_else(|| bad("unknown label code"))?);
        }
    }
    if labels.len() != n * n || lines.next() != Some("diagnostics") {
        return Err(bad("label block has the wrong size"));
    }
    let mut diagnostics = Vec::with_capacity(n * n);
    for _ in 0..n {
        for t in lines.next().ok_or_else(|| bad("truncated diagnostics"))?.split(' ') {
            diagnostics.push(match t {
                "inf" => f64::INFINITY,
                t => t.parse().map_err(|_| bad("bad diagnostic value"))?,
            });
        }
    }
    if diagnostics.len() != n * n {
        return Err(bad("diagnostic block has the wrong size"));
    }
    let pixels = labels.into_iter().zip(diagnostics).collect();
    Ok((prov, MembershipGrid::from_pixels(window, pixels)?))
}

/// Binary PPM with the provenance as a header comment after the magic number.
pub fn ppm_bytes(prov: &Provenance, grid: &MembershipGrid, palette: Palette) -> Vec<u8> {
    let raw = render_ppm(grid, palette);
    let mut out = Vec::with_capacity(raw.len() + 128);
    out.extend_from_slice(b"P6\n");
    out.extend_from_slice(prov.comment().as_bytes());
    out.push(b'\n');
    out.extend_from_slice(&raw[3..]);
    out
}
