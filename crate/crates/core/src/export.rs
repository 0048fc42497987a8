//! OFF meshes and CSV continuation traces.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::inscription::StepRecord;
use crate::sphere::V3;

/// Writes points and faces as an OFF mesh. Coordinates use `{:e}` with full
/// precision so parsing gives back the same numbers.
pub fn to_off(points: &[V3], faces: &[Vec<usize>]) -> String {
    let edges: usize = faces.iter().map(|f| f.len()).sum::<usize>() / 2;
    let mut out = format!("OFF\n{} {} {}\n", points.len(), faces.len(), edges);
    for p in points {
        let _ = writeln!(out, "{:e} {:e} {:e}", p.x, p.y, p.z);
    }
    for f in faces {
        let _ = write!(out, "{}", f.len());
        for v in f {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_off(text: &str) -> Result<(Vec<V3>, Vec<Vec<usize>>)> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let bad = |msg: &str| Error::Parse(format!("OFF: {msg}"));
    if lines.next() != Some("OFF") {
        return Err(bad("missing header"));
    }
    let counts: Vec<usize> = lines
        .next()
        .ok_or_else(|| bad("missing counts"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad("bad count")))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(bad("missing counts"));
    }
    let mut points = Vec::with_capacity(counts[0]);
    for _ in 0..counts[0] {
        let xs: Vec<f64> = lines
            .next()
            .ok_or_else(|| bad("too few vertices"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad coordinate")))
            .collect::<Result<_>>()?;
        if xs.len() != 3 {
            return Err(bad("vertex needs three coordinates"));
        }
        points.push(V3::new(xs[0], xs[1], xs[2]));
    }
    let mut faces = Vec::with_capacity(counts[1]);
    for _ in 0..counts[1] {
        let xs: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("too few faces"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad index")))
            .collect::<Result<_>>()?;
        let Some((&n, rest)) = xs.split_first() else {
            return Err(bad("empty face"));
        };
        if rest.len() != n || rest.iter().any(|&v| v >= points.len()) {
            return Err(bad("face does not match its length or vertex count"));
        }
        faces.push(rest.to_vec());
    }
    Ok((points, faces))
}

/// Trace with columns step,s,iterations,planarity_residual,min_gap,min_radius.
pub fn trace_csv(steps: &[StepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in steps {
        w.serialize(s).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<StepRecord>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}
