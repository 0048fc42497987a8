//! Rivin's linear conditions for inscribability, decided by an exact LP.
//!
//! The strict inequalities are encoded with a uniform slack `t` that is
//! maximized: `w(e) >= t`, `w(e) <= 1/2 - t`, vertex sums equal to 1 and
//! prismatic circuit sums `>= 1 + t`. The graph is inscribable iff `t* > 0`.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::circuits::{prismatic_circuits, CycleLimits, PrismaticCircuit};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, PlanarGraph};
use crate::rational::{half, rational_from_json};
use crate::simplex::{LinearProgram, LpOutcome, Relation};

pub type Q = BigRational;

/// Exact Rivin weights, indexed by edge id.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    pub values: Vec<Q>,
}

impl WeightFunction {
    pub fn uniform(g: &PlanarGraph, value: Q) -> Self {
        WeightFunction {
            values: vec![value; g.edge_count()],
        }
    }

    pub fn get(&self, e: EdgeId) -> &Q {
        &self.values[e]
    }

    pub fn to_json(&self, g: &PlanarGraph) -> serde_json::Value {
        let weights: Vec<_> = self
            .values
            .iter()
            .enumerate()
            .map(|(e, w)| json!({"edge": g.edge(e), "value": w.to_string()}))
            .collect();
        json!({"kind": "rivin", "weights": weights})
    }

    /// Reads `{"kind": "rivin", "weights": [{"edge": [u, v], "value": "1/3"}, ...]}`.
    pub fn from_json(g: &PlanarGraph, v: &serde_json::Value) -> Result<Self> {
        if let Some(kind) = v.get("kind").and_then(|k| k.as_str()) {
            if kind != "rivin" {
                return Err(Error::Parse(format!("expected rivin weights, got kind {kind:?}")));
            }
        }
        let list = v
            .get("weights")
            .and_then(|w| w.as_array())
            .ok_or_else(|| Error::Parse("missing \"weights\" array".into()))?;
        let mut values: Vec<Option<Q>> = vec![None; g.edge_count()];
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
            values[e] = Some(rational_from_json(value)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(e, w)| {
                let [a, b] = g.edge(e);
                w.ok_or(Error::MissingWeight(a, b))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightFunction { values })
    }
}

/// A constraint that is tight at the LP optimum when `t* <= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Binding {
    /// The vertex-sum system has no solution at all.
    VertexSumsInfeasible,
    LowerBound { edge: EdgeId },
    UpperBound { edge: EdgeId },
    Circuit { edges: Vec<EdgeId> },
}

#[derive(Debug, Clone)]
pub struct InscribabilityVerdict {
    pub inscribable: bool,
    /// Optimal weights `w = u + t*` when inscribable.
    pub certificate: Option<WeightFunction>,
    /// Optimal slack; `None` when even the vertex sums are infeasible.
    pub slack: Option<Q>,
    pub violated: Vec<Binding>,
    /// Circuit constraints in the final LP.
    pub circuits_used: usize,
    pub circuits_total: usize,
    /// False when a length cutoff made the circuit list incomplete.
    pub complete: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct RivinOptions {
    pub limits: CycleLimits,
    /// Violated circuits added per round of constraint generation.
    pub batch: usize,
}

impl Default for RivinOptions {
    fn default() -> Self {
        RivinOptions {
            limits: CycleLimits::default(),
            batch: 64,
        }
    }
}

pub fn rivin_feasibility(g: &PlanarGraph) -> Result<InscribabilityVerdict> {
    rivin_feasibility_with(g, &RivinOptions::default())
}

pub fn rivin_feasibility_with(g: &PlanarGraph, opts: &RivinOptions) -> Result<InscribabilityVerdict> {
    let circuits = prismatic_circuits(g, opts.limits)?;
    let mut active: Vec<usize> = Vec::new();
    let mut in_active = vec![false; circuits.len()];
    loop {
        let lp = rivin_program(g, active.iter().map(|&i| &circuits[i]));
        let (w, t) = match lp.solve() {
            LpOutcome::Optimal { x, .. } => split_solution(g, &x),
            LpOutcome::Infeasible => {
                return Ok(InscribabilityVerdict {
                    inscribable: false,
                    certificate: None,
                    slack: None,
                    violated: vec![Binding::VertexSumsInfeasible],
                    circuits_used: active.len(),
                    circuits_total: circuits.len(),
                    complete: opts.limits.max_length.is_none(),
                })
            }
            LpOutcome::Unbounded => return Err(Error::Internal("Rivin LP reported unbounded".into())),
        };
        let mut violated: Vec<(Q, usize)> = circuit_slacks(&w, &t, &circuits)
            .into_iter()
            .enumerate()
            .filter(|(i, s)| !in_active[*i] && s.is_negative())
            .map(|(i, s)| (s, i))
            .collect();
        if violated.is_empty() {
            let inscribable = t.is_positive();
            let violated = if inscribable {
                Vec::new()
            } else {
                binding_constraints(&w, &t, active.iter().map(|&i| &circuits[i]))
            };
            return Ok(InscribabilityVerdict {
                inscribable,
                certificate: inscribable.then_some(WeightFunction { values: w }),
                slack: Some(t),
                violated,
                circuits_used: active.len(),
                circuits_total: circuits.len(),
                complete: opts.limits.max_length.is_none(),
            });
        }
        violated.sort();
        for (_, i) in violated.into_iter().take(opts.batch.max(1)) {
            in_active[i] = true;
            active.push(i);
        }
    }
}

/// Solves the Rivin LP against exactly the given circuits (no generation).
pub fn rivin_slack_with_circuits<'a>(
    g: &PlanarGraph,
    circuits: impl IntoIterator<Item = &'a PrismaticCircuit>,
) -> Option<Q> {
    match rivin_program(g, circuits).solve() {
        LpOutcome::Optimal { x, .. } => Some(split_solution(g, &x).1),
        _ => None,
    }
}

// Variables: u_e = w_e - t >= 0 for every edge, then t = tp - tn.
fn rivin_program<'a>(
    g: &PlanarGraph,
    circuits: impl IntoIterator<Item = &'a PrismaticCircuit>,
) -> LinearProgram {
    let m = g.edge_count();
    let n = m + 2;
    let (tp, tn) = (m, m + 1);
    let int = |k: i64| Q::from_integer(BigInt::from(k));
    let mut objective = vec![Q::zero(); n];
    objective[tp] = Q::one();
    objective[tn] = -Q::one();
    let mut lp = LinearProgram::new(n, objective);
    for e in 0..m {
        let mut row = vec![Q::zero(); n];
        row[e] = Q::one();
        row[tp] = int(2);
        row[tn] = int(-2);
        lp.add(row, Relation::Le, half());
    }
    for v in 0..g.vertex_count() {
        let mut row = vec![Q::zero(); n];
        for d in g.star(v) {
            row[g.dart_edge(d)] += Q::one();
        }
        let deg = g.degree(v) as i64;
        row[tp] = int(deg);
        row[tn] = int(-deg);
        lp.add(row, Relation::Eq, Q::one());
    }
    for c in circuits {
        let mut row = vec![Q::zero(); n];
        for &e in &c.edges {
            row[e] = Q::one();
        }
        let k = c.edges.len() as i64 - 1;
        row[tp] = int(k);
        row[tn] = int(-k);
        lp.add(row, Relation::Ge, Q::one());
    }
    lp
}

fn split_solution(g: &PlanarGraph, x: &[Q]) -> (Vec<Q>, Q) {
    let m = g.edge_count();
    let t = &x[m] - &x[m + 1];
    let w = x[..m].iter().map(|u| u + &t).collect();
    (w, t)
}

/// `sum_{e in gamma} w(e) - 1 - t` for every circuit, evaluated over a
/// common denominator.
fn circuit_slacks(w: &[Q], t: &Q, circuits: &[PrismaticCircuit]) -> Vec<Q> {
    let den = w
        .iter()
        .chain(std::iter::once(t))
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: Vec<BigInt> = w.iter().map(|q| q.numer() * (&den / q.denom())).collect();
    let bound = (Q::one() + t) * Q::from_integer(den.clone());
    let bound = bound.to_integer();
    circuits
        .iter()
        .map(|c| {
            let s: BigInt = c.edges.iter().map(|&e| &scaled[e]).sum();
            Q::new(s - &bound, den.clone())
        })
        .collect()
}

fn binding_constraints<'a>(
    w: &[Q],
    t: &Q,
    circuits: impl IntoIterator<Item = &'a PrismaticCircuit>,
) -> Vec<Binding> {
    let mut out = Vec::new();
    let upper = half() - t;
    for (e, we) in w.iter().enumerate() {
        if we == t {
            out.push(Binding::LowerBound { edge: e });
        }
        if *we == upper {
            out.push(Binding::UpperBound { edge: e });
        }
    }
    for c in circuits {
        let s: Q = c.edges.iter().map(|&e| &w[e]).sum();
        if s == Q::one() + t {
            out.push(Binding::Circuit {
                edges: c.edges.clone(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    W1,
    W2,
    /// Vertex sums recomputed as face sums of the dual graph.
    W2Dual,
    W3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub condition: Condition,
    /// Edge id for W1, vertex for W2, dual face for W2Dual, circuit edges for W3.
    pub elements: Vec<usize>,
    pub lhs: Q,
    pub bound: &'static str,
    pub pass: bool,
    /// Distance to the boundary of the condition (negative or zero on failure).
    pub margin: Q,
}

#[derive(Debug, Clone)]
pub struct WeightReport {
    pub checks: Vec<ConditionCheck>,
}

impl WeightReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self, condition: Condition) -> Vec<&ConditionCheck> {
        self.checks
            .iter()
            .filter(|c| c.condition == condition && !c.pass)
            .collect()
    }

    /// Smallest margin among the strict conditions W1 and W3.
    pub fn min_strict_margin(&self) -> Option<Q> {
        self.checks
            .iter()
            .filter(|c| matches!(c.condition, Condition::W1 | Condition::W3))
            .map(|c| c.margin.clone())
            .min()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let checks: Vec<_> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "condition": c.condition,
                    "elements": c.elements,
                    "lhs": c.lhs.to_string(),
                    "bound": c.bound,
                    "pass": c.pass,
                })
            })
            .collect();
        json!({"all_pass": self.all_pass(), "checks": checks})
    }
}

pub fn check_weights(g: &PlanarGraph, w: &WeightFunction) -> Result<WeightReport> {
    check_weights_with(g, w, CycleLimits::default())
}

pub fn check_weights_with(g: &PlanarGraph, w: &WeightFunction, limits: CycleLimits) -> Result<WeightReport> {
    if w.values.len() != g.edge_count() {
        let e = w.values.len().min(g.edge_count().saturating_sub(1));
        let [a, b] = g.edge(e);
        return Err(Error::MissingWeight(a, b));
    }
    let mut checks = Vec::new();
    let h = half();
    for (e, we) in w.values.iter().enumerate() {
        let margin = std::cmp::min(we.clone(), &h - we);
        checks.push(ConditionCheck {
            condition: Condition::W1,
            elements: vec![e],
            lhs: we.clone(),
            bound: "0 < w < 1/2",
            pass: margin.is_positive(),
            margin,
        });
    }
    let equality = |condition, element, lhs: Q| {
        let margin = -(&lhs - Q::one()).abs();
        ConditionCheck {
            condition,
            elements: vec![element],
            pass: margin.is_zero(),
            lhs,
            bound: "= 1",
            margin,
        }
    };
    for v in 0..g.vertex_count() {
        let lhs: Q = g.star(v).into_iter().map(|d| &w.values[g.dart_edge(d)]).sum();
        checks.push(equality(Condition::W2, v, lhs));
    }
    let dual = g.dual();
    for f in 0..dual.graph.face_count() {
        let lhs: Q = dual
            .graph
            .face_darts(f)
            .into_iter()
            .map(|d| &w.values[dual.primal_edge(dual.graph.dart_edge(d))])
            .sum();
        checks.push(equality(Condition::W2Dual, f, lhs));
    }
    for c in prismatic_circuits(g, limits)? {
        let lhs: Q = c.edges.iter().map(|&e| &w.values[e]).sum();
        let margin = &lhs - Q::one();
        checks.push(ConditionCheck {
            condition: Condition::W3,
            elements: c.edges,
            pass: margin.is_positive(),
            lhs,
            bound: "> 1",
            margin,
        });
    }
    Ok(WeightReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn cube_is_inscribable() {
        let g = fixtures::cube();
        let v = rivin_feasibility(&g).unwrap();
        assert!(v.inscribable);
        let t = v.slack.clone().unwrap();
        assert!(t.is_positive());
        let report = check_weights(&g, v.certificate.as_ref().unwrap()).unwrap();
        assert!(report.all_pass());
        assert!(report.min_strict_margin().unwrap() >= t);
    }

    #[test]
    fn uniform_third_passes_on_cube_and_tetrahedron() {
        for g in [fixtures::cube(), fixtures::tetrahedron()] {
            let r = check_weights(&g, &WeightFunction::uniform(&g, q(1, 3))).unwrap();
            assert!(r.all_pass());
        }
    }

    #[test]
    fn uniform_half_on_cube() {
        let g = fixtures::cube();
        let r = check_weights(&g, &WeightFunction::uniform(&g, q(1, 2))).unwrap();
        assert_eq!(r.failures(Condition::W1).len(), 12);
        let w2 = r.failures(Condition::W2);
        assert_eq!(w2.len(), 8);
        assert!(w2.iter().all(|c| c.lhs == q(3, 2)));
        assert_eq!(r.failures(Condition::W2Dual).len(), 8);
    }

    #[test]
    fn one_light_edge_on_tetrahedron() {
        let g = fixtures::tetrahedron();
        let mut w = WeightFunction::uniform(&g, q(1, 3));
        w.values[2] = q(1, 6);
        let r = check_weights(&g, &w).unwrap();
        let mut failed: Vec<usize> = r.failures(Condition::W2).iter().map(|c| c.elements[0]).collect();
        failed.sort_unstable();
        assert_eq!(failed, g.edge(2).to_vec());
        assert!(r.failures(Condition::W1).is_empty());
    }

    #[test]
    fn singly_truncated_cube_is_not_inscribable() {
        let v = rivin_feasibility(&fixtures::truncated_cube_one_corner()).unwrap();
        assert!(!v.inscribable);
        assert!(!v.slack.unwrap().is_positive());
        assert!(v.certificate.is_none());
        assert!(!v.violated.is_empty());
    }

    #[test]
    fn square_pyramid_is_inscribable() {
        let g = fixtures::square_pyramid();
        let v = rivin_feasibility(&g).unwrap();
        assert!(v.inscribable);
        assert!(check_weights(&g, v.certificate.as_ref().unwrap()).unwrap().all_pass());
    }

    #[test]
    fn unbalanced_bipartite_vertex_sums_are_infeasible() {
        // rhombic dodecahedron: bipartite with parts of size 6 and 8
        let g = crate::derived::rectify(&fixtures::cube()).unwrap().graph.dual().graph;
        let v = rivin_feasibility(&g).unwrap();
        assert!(!v.inscribable);
        assert_eq!(v.slack, None);
        assert_eq!(v.violated, vec![Binding::VertexSumsInfeasible]);
    }

    #[test]
    fn weights_json_round_trip_and_missing_edge() {
        let g = fixtures::tetrahedron();
        let w = WeightFunction::uniform(&g, q(1, 3));
        let back = WeightFunction::from_json(&g, &w.to_json(&g)).unwrap();
        assert_eq!(back, w);
        let mut j = w.to_json(&g);
        j["weights"].as_array_mut().unwrap().pop();
        assert!(matches!(WeightFunction::from_json(&g, &j), Err(Error::MissingWeight(..))));
        let bad = json!({"weights": [{"edge": [0, 0], "value": "1/3"}]});
        assert!(matches!(WeightFunction::from_json(&g, &bad), Err(Error::UnknownEdge(0, 0))));
    }
}
