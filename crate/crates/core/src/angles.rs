//! Angle-space conditions: circle-pattern loops, Andreev and hyperideal
//! conditions on truncated graphs, and defect curvature.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num::{BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::circuits::{enumerate_simple_cycles, prismatic_circuits, CycleLimits};
use crate::derived::TruncatedGraph;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, PlanarGraph, VertexId};
use crate::rational::parse_rational;

pub type Q = BigRational;

pub const DEFAULT_ANGLE_TOLERANCE: f64 = 1e-12;

/// An angle, exact as a rational multiple of pi when possible.
#[derive(Debug, Clone, PartialEq)]
pub enum Angle {
    Pi(Q),
    Radians(f64),
}

impl Angle {
    pub fn pi_fraction(n: i64, d: i64) -> Self {
        Angle::Pi(Q::new(n.into(), d.into()))
    }

    pub fn radians(&self) -> f64 {
        match self {
            Angle::Pi(q) => q.to_f64().unwrap_or(f64::NAN) * PI,
            Angle::Radians(r) => *r,
        }
    }

    /// Parses `"pi/6"`, `"1/6 pi"`, `"2pi/3"`, `"pi"` exactly, and plain
    /// numbers as radians.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        if s.contains("pi") {
            let mut coef: String = s.replace("pi", "").split_whitespace().collect();
            coef = coef.trim_end_matches('*').to_string();
            if coef.starts_with('/') {
                coef.insert(0, '1');
            }
            let coef = coef.replace("*/", "/");
            if coef.is_empty() {
                return Ok(Angle::Pi(Q::one()));
            }
            return Ok(Angle::Pi(parse_rational(&coef)?));
        }
        s.parse::<f64>()
            .map(Angle::Radians)
            .map_err(|_| Error::Parse(format!("not an angle: {text:?}")))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => Angle::parse(s),
            serde_json::Value::Number(n) => Ok(Angle::Radians(n.as_f64().unwrap_or(f64::NAN))),
            other => Err(Error::Parse(format!("expected an angle, got {other}"))),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Angle::Pi(q) => json!(format!("{q} pi")),
            Angle::Radians(r) => json!(r),
        }
    }

    pub fn sum<'a>(angles: impl IntoIterator<Item = &'a Angle>) -> Angle {
        let mut exact = Some(Q::zero());
        let mut float = 0.0;
        for a in angles {
            float += a.radians();
            exact = match (exact, a) {
                (Some(acc), Angle::Pi(q)) => Some(acc + q),
                _ => None,
            };
        }
        match exact {
            Some(q) => Angle::Pi(q),
            None => Angle::Radians(float),
        }
    }

    /// Compares against `bound * pi`; float angles within `tol` count as equal.
    pub fn cmp_pi_multiple(&self, bound: &Q, tol: f64) -> Ordering {
        match self {
            Angle::Pi(q) => q.cmp(bound),
            Angle::Radians(r) => {
                let diff = r - bound.to_f64().unwrap_or(f64::NAN) * PI;
                if diff.abs() <= tol {
                    Ordering::Equal
                } else if diff < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }
}

impl std::fmt::Display for Angle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Angle::Pi(q) => write!(f, "{q} pi"),
            Angle::Radians(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleTarget {
    /// Edges of the dual graph (the nerve of a packing).
    Dual,
    /// Edges of a truncated graph.
    Truncated,
}

/// Angles on the edges of some graph, indexed by its edge ids.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleWeights {
    pub values: Vec<Angle>,
    pub target: AngleTarget,
    /// Equality tolerance for float sums.
    pub tolerance: f64,
}

impl AngleWeights {
    pub fn uniform(g: &PlanarGraph, value: Angle, target: AngleTarget) -> Self {
        AngleWeights {
            values: vec![value; g.edge_count()],
            target,
            tolerance: DEFAULT_ANGLE_TOLERANCE,
        }
    }

    pub fn radians(&self) -> Vec<f64> {
        self.values.iter().map(Angle::radians).collect()
    }

    pub fn to_json(&self, g: &PlanarGraph) -> serde_json::Value {
        let weights: Vec<_> = self
            .values
            .iter()
            .enumerate()
            .map(|(e, a)| json!({"edge": g.edge(e), "value": a.to_json()}))
            .collect();
        json!({"kind": "pattern", "target": self.target, "tolerance": self.tolerance, "weights": weights})
    }

    /// Reads weights keyed by vertex pairs of `g`. Values are radians, or
    /// strings such as `"pi/6"`.
    pub fn from_json(g: &PlanarGraph, v: &serde_json::Value) -> Result<Self> {
        let target = match v.get("target") {
            Some(t) => serde_json::from_value(t.clone())?,
            None => AngleTarget::Dual,
        };
        let tolerance = v
            .get("tolerance")
            .and_then(|t| t.as_f64())
            .unwrap_or(DEFAULT_ANGLE_TOLERANCE);
        if tolerance <= 0.0 {
            return Err(Error::OutOfRange(format!("tolerance {tolerance} must be positive")));
        }
        let list = v
            .get("weights")
            .and_then(|w| w.as_array())
            .ok_or_else(|| Error::Parse("missing \"weights\" array".into()))?;
        let mut values: Vec<Option<Angle>> = vec![None; g.edge_count()];
        for item in list {
            let pair = item
                .get("edge")
                .and_then(|e| e.as_array())
                .filter(|a| a.len() == 2)
                .and_then(|a| Some([a[0].as_u64()? as usize, a[1].as_u64()? as usize]))
                .ok_or_else(|| Error::Parse(format!("bad edge entry {item}")))?;
            let e = g
                .edge_between(pair[0], pair[1])
                .ok_or(Error::UnknownEdge(pair[0], pair[1]))?;
            let value = item
                .get("value")
                .ok_or_else(|| Error::Parse(format!("missing value in {item}")))?;
            values[e] = Some(Angle::from_json(value)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(e, a)| {
                let [x, y] = g.edge(e);
                a.ok_or(Error::MissingWeight(x, y))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AngleWeights {
            values,
            target,
            tolerance,
        })
    }

    fn sum_over(&self, edges: &[EdgeId]) -> Angle {
        Angle::sum(edges.iter().map(|&e| &self.values[e]))
    }

    fn check_range(&self, g: &PlanarGraph, open_at_zero: bool) -> Result<()> {
        if self.values.len() != g.edge_count() {
            let e = self.values.len().min(g.edge_count().saturating_sub(1));
            let [a, b] = g.edge(e);
            return Err(Error::MissingWeight(a, b));
        }
        let half = Q::new(1.into(), 2.into());
        for (e, a) in self.values.iter().enumerate() {
            let low = a.cmp_pi_multiple(&Q::zero(), self.tolerance);
            let bad_low = match (a, open_at_zero) {
                (_, true) => low != Ordering::Greater,
                (Angle::Pi(q), false) => q.is_negative(),
                (Angle::Radians(r), false) => *r < 0.0,
            };
            let bad_high = match a {
                Angle::Pi(q) => *q > half,
                Angle::Radians(r) => *r > PI / 2.0 + self.tolerance,
            };
            if bad_low || bad_high || a.radians().is_nan() {
                return Err(Error::WeightOutOfRange {
                    edge: e,
                    value: a.radians(),
                    range: if open_at_zero { "(0, pi/2]" } else { "[0, pi/2]" },
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleCondition {
    /// Three edges forming a loop of the dual: sum < pi.
    Loop3,
    /// Four edges forming a loop of the dual: sum < 2 pi.
    Loop4,
    /// Edges at a vertex: sum > pi.
    VertexCompact,
    /// Edges at a vertex: sum <= pi.
    VertexHyperideal,
    /// Prismatic 3-circuit: sum < pi.
    Prismatic3,
    /// Prismatic 4-circuit: sum < 2 pi.
    Prismatic4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleViolation {
    pub condition: AngleCondition,
    /// Edge ids, or the vertex for vertex conditions.
    pub elements: Vec<usize>,
    pub lhs: Angle,
    pub bound: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub satisfied: bool,
    pub violations: Vec<AngleViolation>,
    /// Vertices where the hyperideal vertex sum equals pi (ideal vertices).
    pub boundary_equalities: Vec<VertexId>,
    pub constraints_checked: usize,
}

impl ConditionReport {
    fn new(violations: Vec<AngleViolation>, boundary_equalities: Vec<VertexId>, checked: usize) -> Self {
        ConditionReport {
            satisfied: violations.is_empty(),
            violations,
            boundary_equalities,
            constraints_checked: checked,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let violations: Vec<_> = self
            .violations
            .iter()
            .map(|v| {
                json!({
                    "condition": v.condition,
                    "elements": v.elements,
                    "lhs": v.lhs.to_json(),
                    "lhs_radians": v.lhs.radians(),
                    "bound": v.bound,
                })
            })
            .collect();
        json!({
            "satisfied": self.satisfied,
            "violations": violations,
            "boundary_equalities": self.boundary_equalities,
            "constraints_checked": self.constraints_checked,
        })
    }
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Loops of three or four distinct dual edges must sum below pi and 2 pi.
pub fn check_pattern_conditions(gstar: &PlanarGraph, w: &AngleWeights) -> Result<ConditionReport> {
    w.check_range(gstar, false)?;
    let mut violations = Vec::new();
    let cycles = enumerate_simple_cycles(gstar, CycleLimits::up_to(4))?;
    for c in &cycles {
        let edges = c.sorted_edges();
        let sum = w.sum_over(&edges);
        let (condition, bound, label) = if c.len() == 3 {
            (AngleCondition::Loop3, q(1), "< pi")
        } else {
            (AngleCondition::Loop4, q(2), "< 2 pi")
        };
        if sum.cmp_pi_multiple(&bound, w.tolerance) != Ordering::Less {
            violations.push(AngleViolation {
                condition,
                elements: edges,
                lhs: sum,
                bound: label,
            });
        }
    }
    Ok(ConditionReport::new(violations, Vec::new(), cycles.len()))
}

fn vertex_edges(g: &PlanarGraph, v: VertexId) -> Vec<EdgeId> {
    g.star(v).into_iter().map(|d| g.dart_edge(d)).collect()
}

fn check_prismatic(g: &PlanarGraph, w: &AngleWeights, violations: &mut Vec<AngleViolation>) -> Result<usize> {
    let circuits = prismatic_circuits(g, CycleLimits::up_to(4))?;
    for c in &circuits {
        let sum = w.sum_over(&c.edges);
        let (condition, bound, label) = if c.length == 3 {
            (AngleCondition::Prismatic3, q(1), "< pi")
        } else {
            (AngleCondition::Prismatic4, q(2), "< 2 pi")
        };
        if sum.cmp_pi_multiple(&bound, w.tolerance) != Ordering::Less {
            violations.push(AngleViolation {
                condition,
                elements: c.edges.clone(),
                lhs: sum,
                bound: label,
            });
        }
    }
    Ok(circuits.len())
}

fn require_trivalent(g: &PlanarGraph) -> Result<()> {
    match (0..g.vertex_count()).find(|&v| g.degree(v) != 3) {
        Some(v) => Err(Error::NotTrivalent(v)),
        None => Ok(()),
    }
}

/// Compact hyperbolic polyhedron conditions: vertex sums above pi and the
/// prismatic 3-/4-circuit bounds. Weights must lie in (0, pi/2].
pub fn check_andreev(t: &TruncatedGraph, w: &AngleWeights) -> Result<ConditionReport> {
    let g = &t.graph;
    require_trivalent(g)?;
    w.check_range(g, true)?;
    let mut violations = Vec::new();
    for v in 0..g.vertex_count() {
        let sum = w.sum_over(&vertex_edges(g, v));
        if sum.cmp_pi_multiple(&q(1), w.tolerance) != Ordering::Greater {
            violations.push(AngleViolation {
                condition: AngleCondition::VertexCompact,
                elements: vec![v],
                lhs: sum,
                bound: "> pi",
            });
        }
    }
    let n = check_prismatic(g, w, &mut violations)?;
    Ok(ConditionReport::new(violations, Vec::new(), g.vertex_count() + n))
}

/// Hyperideal polyhedron conditions: vertex sums at most pi (equality marks
/// an ideal vertex) and the prismatic bounds. Weights must lie in [0, pi/2].
pub fn check_hyperideal(t: &TruncatedGraph, w: &AngleWeights) -> Result<ConditionReport> {
    let g = &t.graph;
    require_trivalent(g)?;
    w.check_range(g, false)?;
    let mut violations = Vec::new();
    let mut boundary = Vec::new();
    for v in 0..g.vertex_count() {
        let sum = w.sum_over(&vertex_edges(g, v));
        match sum.cmp_pi_multiple(&q(1), w.tolerance) {
            Ordering::Greater => violations.push(AngleViolation {
                condition: AngleCondition::VertexHyperideal,
                elements: vec![v],
                lhs: sum,
                bound: "<= pi",
            }),
            Ordering::Equal => boundary.push(v),
            Ordering::Less => {}
        }
    }
    let n = check_prismatic(g, w, &mut violations)?;
    Ok(ConditionReport::new(violations, boundary, g.vertex_count() + n))
}

/// `pi` minus the sum of the three weights at a trivalent corner.
pub fn defect_curvature(t: &TruncatedGraph, w: &AngleWeights, corner: VertexId) -> Result<Angle> {
    let g = &t.graph;
    if corner >= g.vertex_count() {
        return Err(Error::OutOfRange(format!("corner {corner} does not exist")));
    }
    if g.degree(corner) != 3 {
        return Err(Error::NotTrivalent(corner));
    }
    Ok(defect_of(&vertex_edges(g, corner).iter().map(|&e| w.values[e].clone()).collect::<Vec<_>>()))
}

/// `pi` minus the sum of the given angles.
pub fn defect_of(angles: &[Angle]) -> Angle {
    match Angle::sum(angles) {
        Angle::Pi(s) => Angle::Pi(Q::one() - s),
        Angle::Radians(r) => Angle::Radians(PI - r),
    }
}
