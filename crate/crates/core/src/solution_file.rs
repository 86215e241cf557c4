//! Delimited-text persistence of a `SpaceTimeSolution`.
//!
//! ```text
//! # discflux solution
//! # format: 1
//! # fingerprint: <sha256 hex>
//! # cells: 400
//! # x_a: -1.0000000000000000e0
//! # dx: 5.0000000000000001e-3
//! # steps: 223
//! # max_principle_excess: 0.0000000000000000e0
//! # dt: <comma separated step sizes>
//! #> <scenario TOML, one line per row>
//! t,u_1,u_2,...
//! 0.0000000000000000e0,...
//! ```
//!
//! Numbers carry 17 significant digits, so every value reads back bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fv_solver::SpaceTimeSolution;
use crate::scenario::ScenarioFile;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "# discflux solution";

fn num(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").expect("write to string");
}

pub fn to_text(sol: &SpaceTimeSolution) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    writeln!(out, "# format: {FORMAT_VERSION}").unwrap();
    writeln!(out, "# fingerprint: {}", sol.fingerprint).unwrap();
    writeln!(out, "# cells: {}", sol.cells).unwrap();
    out.push_str("# x_a: ");
    num(&mut out, sol.x_a);
    out.push_str("\n# dx: ");
    num(&mut out, sol.dx);
    writeln!(out, "\n# steps: {}", sol.dt_history.len()).unwrap();
    out.push_str("# max_principle_excess: ");
    num(&mut out, sol.max_principle_excess);
    out.push_str("\n# dt: ");
    for (i, &dt) in sol.dt_history.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        num(&mut out, dt);
    }
    out.push('\n');
    for line in sol.scenario.to_toml().lines() {
        writeln!(out, "#> {line}").unwrap();
    }
    out.push('t');
    for i in 1..=sol.cells {
        write!(out, ",u_{i}").unwrap();
    }
    out.push('\n');
    for (t, u) in sol.times.iter().zip(&sol.states) {
        num(&mut out, *t);
        for &v in u {
            out.push(',');
            num(&mut out, v);
        }
        out.push('\n');
    }
    out
}

fn parse_num(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: invalid number {s:?}")))
}

pub fn from_text(text: &str) -> Result<SpaceTimeSolution> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, MAGIC)) => {}
        _ => return Err(Error::Parse("line 1: missing solution file header".into())),
    }
    let mut meta = std::collections::BTreeMap::new();
    let mut scenario_text = String::new();
    let mut header_line = None;
    for (n, line) in lines.by_ref() {
        if let Some(rest) = line.strip_prefix("#> ") {
            scenario_text.push_str(rest);
            scenario_text.push('\n');
        } else if line == "#>" {
            scenario_text.push('\n');
        } else if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once(": ")
                .or_else(|| rest.strip_suffix(':').map(|k| (k, "")))
                .ok_or_else(|| Error::Parse(format!("line {n}: expected `# key: value`")))?;
            meta.insert(k.to_string(), (n, v.to_string()));
        } else {
            header_line = Some((n, line));
            break;
        }
    }
    let get = |k: &str| meta.get(k).ok_or_else(|| Error::Parse(format!("missing `{k}` in header")));
    let (n, v) = get("format")?;
    if v.parse::<u32>().ok() != Some(FORMAT_VERSION) {
        return Err(Error::Parse(format!("line {n}: unsupported format {v:?}")));
    }
    let (n, v) = get("cells")?;
    let cells: usize = v.parse().map_err(|_| Error::Parse(format!("line {n}: invalid cell count {v:?}")))?;
    if cells == 0 {
        return Err(Error::Parse(format!("line {n}: cell count must be positive")));
    }
    let (n, v) = get("x_a")?;
    let x_a = parse_num(v, *n)?;
    let (n, v) = get("dx")?;
    let dx = parse_num(v, *n)?;
    let (n, v) = get("max_principle_excess")?;
    let max_principle_excess = parse_num(v, *n)?;
    let (n, v) = get("dt")?;
    let dt_history = if v.is_empty() {
        Vec::new()
    } else {
        v.split(',').map(|s| parse_num(s, *n)).collect::<Result<Vec<_>>>()?
    };
    let (n, v) = get("steps")?;
    if v.parse::<usize>().ok() != Some(dt_history.len()) {
        return Err(Error::Parse(format!("line {n}: steps {v:?} does not match the dt list")));
    }
    let (_, fingerprint) = get("fingerprint")?;
    let scenario = ScenarioFile::from_toml(&scenario_text)?;
    if scenario.fingerprint() != *fingerprint {
        return Err(Error::Parse("embedded scenario does not match the fingerprint".into()));
    }
    let (n, header) = header_line.ok_or_else(|| Error::Parse("missing column header".into()))?;
    if header.split(',').count() != cells + 1 || !header.starts_with("t,") {
        return Err(Error::Parse(format!("line {n}: column header does not match {cells} cells")));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t = parse_num(fields.next().unwrap_or(""), n)?;
        let u = fields.map(|s| parse_num(s, n)).collect::<Result<Vec<_>>>()?;
        if u.len() != cells {
            return Err(Error::Parse(format!("line {n}: expected {cells} values, found {}", u.len())));
        }
        if times.last().is_some_and(|&p| t < p) {
            return Err(Error::Parse(format!("line {n}: times must be nondecreasing")));
        }
        times.push(t);
        states.push(u);
    }
    if times.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(SpaceTimeSolution {
        fingerprint: fingerprint.clone(),
        scenario,
        x_a,
        dx,
        cells,
        times,
        states,
        dt_history,
        max_principle_excess,
    })
}

/// Writes to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

pub fn read(path: &Path) -> Result<SpaceTimeSolution> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    from_text(&text)
}
