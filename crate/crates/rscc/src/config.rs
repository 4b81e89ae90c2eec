//! Scenario files in INI form.
//!
//! ```ini
//! name = jump-annulus
//!
//! [state]
//! kind = ladder
//! extras = 2
//!
//! [indices]
//! names = x1, x2
//!
//! [update]
//! family = ladder
//! advance = x1
//! jump = x2
//! target = 2
//!
//! [transition]
//! family = ladder
//! decay = reciprocal
//!
//! [tau.x1]
//! f = 1 monomial 1 2
//!
//! [tau.x2]
//! f = 0.5 monomial 1 2
//! g = 0.5 monomial 0.5 2
//!
//! [classes]
//! Ladder = rungs | x1 -> Ladder, x2 -> Two
//! Zero = point 0 | x1 -> Zero
//! Two = point 2 | x2 -> Two
//! ```
//!
//! Table families list one row per state label, keyed by the label, with one
//! entry per index. Each `[tau.<index>]` entry is `weight map`.

use std::fmt::Write as _;
use std::path::Path;

use ini::Ini;
use rscc_core::scenario::{
    builtin, ClassMember, LadderDecay, MapChoice, RadialClass, Theta, TransitionRule, UpdateRule,
};
use rscc_core::{IndexId, MapSpec, ScenarioSpec, StatePoint, StateSpace};

use crate::error::{usage, CliError, CliResult};

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Core(rscc_core::RsccError::Configuration(msg.into()))
}

fn list(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn num(v: &str, what: &str) -> CliResult<f64> {
    v.trim().parse().map_err(|_| bad(format!("{what}: bad number '{v}'")))
}

fn nums(v: &str, what: &str) -> CliResult<Vec<f64>> {
    list(v).iter().map(|t| num(t, what)).collect()
}

struct Sections<'a>(&'a Ini);

impl<'a> Sections<'a> {
    fn get(&self, sec: &str, key: &str) -> CliResult<&'a str> {
        self.0
            .get_from(Some(sec), key)
            .ok_or_else(|| bad(format!("missing key '{key}' in [{sec}]")))
    }

    fn opt(&self, sec: &str, key: &str) -> Option<&'a str> {
        self.0.get_from(Some(sec), key)
    }
}

fn index_of(indices: &[IndexId], name: &str) -> CliResult<usize> {
    indices
        .iter()
        .position(|x| x.name == name)
        .ok_or_else(|| bad(format!("unknown index '{name}'")))
}

fn parse_state_space(s: &Sections) -> CliResult<StateSpace> {
    Ok(match s.get("state", "kind")? {
        "ladder" => StateSpace::Ladder { extras: s.opt("state", "extras").map(list).unwrap_or_default() },
        "interval" => StateSpace::Interval {
            lo: num(s.get("state", "lo")?, "state lo")?,
            hi: num(s.get("state", "hi")?, "state hi")?,
        },
        "discrete" => StateSpace::Discrete { labels: list(s.get("state", "labels")?) },
        other => return Err(bad(format!("unknown state kind '{other}'"))),
    })
}

fn label_rows<T>(
    ini: &Ini,
    sec: &str,
    labels: &[String],
    mut row: impl FnMut(&str) -> CliResult<Vec<T>>,
) -> CliResult<Vec<Vec<T>>> {
    labels
        .iter()
        .map(|l| {
            let v = ini.get_from(Some(sec), l).ok_or_else(|| bad(format!("[{sec}] has no row for state '{l}'")))?;
            row(v)
        })
        .collect()
}

fn parse_update(ini: &Ini, space: &StateSpace, indices: &[IndexId]) -> CliResult<UpdateRule> {
    let s = Sections(ini);
    Ok(match s.get("update", "family")? {
        "ladder" => {
            let target = StatePoint::parse(s.get("update", "target")?, space)?;
            let StatePoint::Ladder(target) = target else {
                return Err(bad("ladder target must be a ladder point"));
            };
            UpdateRule::Ladder {
                advance: index_of(indices, s.get("update", "advance")?)?,
                jump: index_of(indices, s.get("update", "jump")?)?,
                target,
            }
        }
        "clamp-affine" => UpdateRule::ClampAffine {
            alpha: num(s.get("update", "alpha")?, "alpha")?,
            lo: num(s.get("update", "lo")?, "clamp lo")?,
            hi: num(s.get("update", "hi")?, "clamp hi")?,
            levels: match s.opt("update", "levels") {
                Some(v) => Some(v.trim().parse().map_err(|_| bad(format!("bad levels '{v}'")))?),
                None => None,
            },
        },
        "table" => {
            let StateSpace::Discrete { labels } = space else {
                return Err(bad("table updates need a discrete state space"));
            };
            UpdateRule::Table {
                next: label_rows(ini, "update", labels, |v| {
                    list(v)
                        .iter()
                        .map(|t| labels.iter().position(|l| l == t).ok_or_else(|| bad(format!("unknown state '{t}'"))))
                        .collect()
                })?,
            }
        }
        "map-driven" => UpdateRule::MapDriven,
        other => return Err(bad(format!("unknown update family '{other}'"))),
    })
}

fn parse_theta(v: &str) -> CliResult<Theta> {
    let toks: Vec<&str> = v.split_whitespace().collect();
    Ok(match toks.as_slice() {
        ["constant", c] => Theta::Constant(num(c, "theta")?),
        ["affine", a, b] => Theta::Affine { a: num(a, "theta")?, b: num(b, "theta")? },
        ["bump", c, w] => Theta::Bump { center: num(c, "theta")?, width: num(w, "theta")? },
        _ => return Err(bad(format!("cannot parse theta '{v}'"))),
    })
}

fn parse_transition(ini: &Ini, space: &StateSpace) -> CliResult<TransitionRule> {
    let s = Sections(ini);
    Ok(match s.get("transition", "family")? {
        "ladder" => TransitionRule::Ladder {
            decay: match s.get("transition", "decay")? {
                "reciprocal" => LadderDecay::Reciprocal,
                "power" => LadderDecay::Power,
                other => return Err(bad(format!("unknown ladder decay '{other}'"))),
            },
        },
        "reinforce" => TransitionRule::Reinforce,
        "table" => {
            let StateSpace::Discrete { labels } = space else {
                return Err(bad("table transitions need a discrete state space"));
            };
            TransitionRule::Table { probs: label_rows(ini, "transition", labels, |v| nums(v, "probability"))? }
        }
        "feedback" => TransitionRule::FeedbackTheta { theta: parse_theta(s.get("transition", "theta")?)? },
        other => return Err(bad(format!("unknown transition family '{other}'"))),
    })
}

fn parse_member(v: &str, space: &StateSpace) -> CliResult<ClassMember> {
    let t = v.trim();
    let (head, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
    let rest = rest.trim();
    let pair = |what: &str| -> CliResult<(f64, f64)> {
        match nums(&rest.replace(char::is_whitespace, ","), what)?.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(bad(format!("{what} needs two bounds"))),
        }
    };
    Ok(match head {
        "rungs" if rest.is_empty() => ClassMember::Rungs,
        "point" => ClassMember::Point(StatePoint::parse(rest, space)?),
        "closed" => {
            let (a, b) = pair("closed")?;
            ClassMember::Closed(a, b)
        }
        "open" => {
            let (a, b) = pair("open")?;
            ClassMember::Open(a, b)
        }
        "label" if !rest.is_empty() => ClassMember::Label(rest.to_string()),
        _ => return Err(bad(format!("cannot parse class member '{v}'"))),
    })
}

fn parse_class(label: &str, v: &str, space: &StateSpace, indices: &[IndexId]) -> CliResult<RadialClass> {
    let (member, arrows) = v.split_once('|').unwrap_or((v, ""));
    let mut transitions = Vec::new();
    for t in list(arrows) {
        let (x, succ) = t
            .split_once("->")
            .ok_or_else(|| bad(format!("class transition '{t}' must read 'index -> class'")))?;
        transitions.push((index_of(indices, x.trim())?, succ.trim().to_string()));
    }
    Ok(RadialClass { label: label.to_string(), member: parse_member(member, space)?, transitions })
}

/// Parses a scenario file body.
pub fn parse_scenario(text: &str) -> CliResult<ScenarioSpec> {
    let ini = Ini::load_from_str_noescape(text)?;
    let s = Sections(&ini);
    let name = ini.general_section().get("name").unwrap_or("custom").to_string();
    let state_space = parse_state_space(&s)?;
    let indices: Vec<IndexId> = list(s.get("indices", "names")?)
        .iter()
        .enumerate()
        .map(|(i, n)| IndexId::new(i, n))
        .collect();
    let update = parse_update(&ini, &state_space, &indices)?;
    let transition = parse_transition(&ini, &state_space)?;
    let mut tau = Vec::with_capacity(indices.len());
    for x in &indices {
        let sec = format!("tau.{}", x.name);
        let props = ini.section(Some(sec.as_str())).ok_or_else(|| bad(format!("missing section [{sec}]")))?;
        let mut dist = Vec::new();
        for (map_name, v) in props.iter() {
            let (w, m) = v
                .trim()
                .split_once(char::is_whitespace)
                .ok_or_else(|| bad(format!("[{sec}] {map_name}: expected 'weight map'")))?;
            dist.push(MapChoice::new(map_name, m.parse::<MapSpec>()?, num(w, "map weight")?));
        }
        tau.push(dist);
    }
    let radial_classes = match ini.section(Some("classes")) {
        Some(props) => Some(
            props
                .iter()
                .map(|(label, v)| parse_class(label, v, &state_space, &indices))
                .collect::<CliResult<Vec<_>>>()?,
        ),
        None => None,
    };
    let spec = ScenarioSpec { name, state_space, indices, update, transition, tau, radial_classes };
    Ok(spec.validated()?)
}

fn join<T: std::fmt::Display>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

fn labels_of(spec: &ScenarioSpec) -> &[String] {
    match &spec.state_space {
        StateSpace::Discrete { labels } => labels,
        _ => &[],
    }
}

fn member_text(m: &ClassMember) -> String {
    match m {
        ClassMember::Rungs => "rungs".into(),
        ClassMember::Point(p) => format!("point {p}"),
        ClassMember::Closed(a, b) => format!("closed {a} {b}"),
        ClassMember::Open(a, b) => format!("open {a} {b}"),
        ClassMember::Label(l) => format!("label {l}"),
    }
}

/// Writes a scenario in the format read by [`parse_scenario`].
pub fn scenario_to_ini(spec: &ScenarioSpec) -> String {
    let mut out = String::new();
    let name = |x: usize| spec.index_name(x).to_string();
    let _ = writeln!(out, "name = {}\n", spec.name);
    out.push_str("[state]\n");
    match &spec.state_space {
        StateSpace::Ladder { extras } => {
            let _ = writeln!(out, "kind = ladder\nextras = {}", join(extras));
        }
        StateSpace::Interval { lo, hi } => {
            let _ = writeln!(out, "kind = interval\nlo = {lo}\nhi = {hi}");
        }
        StateSpace::Discrete { labels } => {
            let _ = writeln!(out, "kind = discrete\nlabels = {}", join(labels));
        }
    }
    let _ = writeln!(out, "\n[indices]\nnames = {}\n", join(spec.indices.iter().map(|x| &x.name)));
    out.push_str("[update]\n");
    match &spec.update {
        UpdateRule::Ladder { advance, jump, target } => {
            let _ = writeln!(
                out,
                "family = ladder\nadvance = {}\njump = {}\ntarget = {}",
                name(*advance),
                name(*jump),
                StatePoint::Ladder(target.clone())
            );
        }
        UpdateRule::ClampAffine { alpha, lo, hi, levels } => {
            let _ = writeln!(out, "family = clamp-affine\nalpha = {alpha}\nlo = {lo}\nhi = {hi}");
            if let Some(k) = levels {
                let _ = writeln!(out, "levels = {k}");
            }
        }
        UpdateRule::Table { next } => {
            out.push_str("family = table\n");
            let labels = labels_of(spec);
            for (l, row) in labels.iter().zip(next) {
                let _ = writeln!(out, "{l} = {}", join(row.iter().map(|&s| &labels[s])));
            }
        }
        UpdateRule::MapDriven => out.push_str("family = map-driven\n"),
    }
    out.push_str("\n[transition]\n");
    match &spec.transition {
        TransitionRule::Ladder { decay } => {
            let d = match decay {
                LadderDecay::Reciprocal => "reciprocal",
                LadderDecay::Power => "power",
            };
            let _ = writeln!(out, "family = ladder\ndecay = {d}");
        }
        TransitionRule::Reinforce => out.push_str("family = reinforce\n"),
        TransitionRule::Table { probs } => {
            out.push_str("family = table\n");
            for (l, row) in labels_of(spec).iter().zip(probs) {
                let _ = writeln!(out, "{l} = {}", join(row));
            }
        }
        TransitionRule::FeedbackTheta { theta } => {
            let t = match theta {
                Theta::Constant(c) => format!("constant {c}"),
                Theta::Affine { a, b } => format!("affine {a} {b}"),
                Theta::Bump { center, width } => format!("bump {center} {width}"),
            };
            let _ = writeln!(out, "family = feedback\ntheta = {t}");
        }
    }
    for (x, dist) in spec.tau.iter().enumerate() {
        let _ = writeln!(out, "\n[tau.{}]", name(x));
        for c in dist {
            let _ = writeln!(out, "{} = {} {}", c.name, c.weight, c.map);
        }
    }
    if let Some(classes) = &spec.radial_classes {
        out.push_str("\n[classes]\n");
        for c in classes {
            let arrows = join(c.transitions.iter().map(|(x, succ)| format!("{} -> {succ}", name(*x))));
            let _ = writeln!(out, "{} = {} | {arrows}", c.label, member_text(&c.member));
        }
    }
    out
}

/// Resolves `--scenario`: a builtin name, or else a scenario file path.
pub fn load_scenario(name_or_path: &str, alpha: Option<f64>, eps: Option<f64>) -> CliResult<ScenarioSpec> {
    if builtin::NAMES.contains(&name_or_path) {
        return Ok(builtin::by_name(name_or_path, alpha, eps)?);
    }
    let path = Path::new(name_or_path);
    if !path.is_file() {
        return Err(usage(format!(
            "unknown scenario '{name_or_path}' (builtins: {}; otherwise pass a scenario file)",
            builtin::NAMES.join(", ")
        )));
    }
    parse_scenario(&std::fs::read_to_string(path)?)
}
