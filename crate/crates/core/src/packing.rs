//! Circle packings and overlap-angle circle patterns on the unit sphere.
//!
//! The nerve is triangulated by adding one auxiliary vertex inside every
//! non-triangular face, first with the auxiliary circle tangent to its
//! neighbours. Radii are found in the plane with one triangle as
//! the outer boundary (its three radii fixed to 1), the picture is laid out
//! and lifted to the sphere by inverse stereographic projection, and a
//! Möbius boost moves the centroid of the contact points to the origin.
//!
//! In a face whose edges are all tangencies the auxiliary circle should end up
//! orthogonal to its neighbours, i.e. through all the tangency points, as the
//! dual circle of a midsphere packing does. Those triangles are degenerate in
//! the plane, so the overlap is moved from tangent to orthogonal by
//! continuation on the sphere in Lorentz coordinates.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix3, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::angles::{check_pattern_conditions, AngleWeights};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, PlanarGraph, VertexId};
use crate::sphere::{
    center_distance, circle_from_planar, crossing_points, spherical_distance, tangency_point, Mobius,
    SphericalCircle, V3,
};

pub const DEFAULT_PACKING_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Packing {
    /// One circle per nerve vertex.
    pub circles: Vec<SphericalCircle>,
    /// Nerve edges as vertex pairs, indexed like the nerve's edges.
    pub edges: Vec<[VertexId; 2]>,
    /// Per edge: the tangency point, or the two crossing points ordered
    /// along `n_u x n_v` for the edge `[u, v]`.
    pub contacts: Vec<Vec<V3>>,
    /// Prescribed exterior intersection angle per edge (0 for tangency).
    pub angles: Vec<f64>,
    /// Largest deviation of a centre distance from its prescribed value.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct PackingOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Starting radii for the planar iteration, one per nerve vertex.
    pub initial_radii: Option<Vec<f64>>,
    /// Which triangle of the internal triangulation is the outer one.
    pub outer_face: Option<usize>,
}

impl Default for PackingOptions {
    fn default() -> Self {
        PackingOptions {
            tol: DEFAULT_PACKING_TOL,
            max_iter: DEFAULT_MAX_ITER,
            initial_radii: None,
            outer_face: None,
        }
    }
}

/// A base vertex, three of its edges and where their contact points go.
#[derive(Debug, Clone, PartialEq)]
pub struct Mark {
    pub base_vertex: VertexId,
    pub edges: [EdgeId; 3],
    pub targets: [V3; 3],
}

impl Mark {
    pub fn new(nerve: &PlanarGraph, base_vertex: VertexId, neighbours: [VertexId; 3], targets: [V3; 3]) -> Result<Self> {
        if base_vertex >= nerve.vertex_count() {
            return Err(Error::InvalidMark(format!("no vertex {base_vertex}")));
        }
        let mut edges = [0; 3];
        for (i, &w) in neighbours.iter().enumerate() {
            edges[i] = nerve
                .edge_between(base_vertex, w)
                .ok_or_else(|| Error::InvalidMark(format!("{w} is not adjacent to {base_vertex}")))?;
        }
        if edges[0] == edges[1] || edges[1] == edges[2] || edges[0] == edges[2] {
            return Err(Error::InvalidMark("marked edges must be distinct".into()));
        }
        let mut t = targets;
        for p in &mut t {
            if p.norm() < 1e-12 {
                return Err(Error::InvalidMark("zero target point".into()));
            }
            *p = p.normalize();
        }
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            if (t[i] - t[j]).norm() < 1e-9 {
                return Err(Error::InvalidMark(format!("targets {i} and {j} coincide")));
            }
        }
        Ok(Mark {
            base_vertex,
            edges,
            targets: t,
        })
    }

    /// Reads `{"base_vertex": v, "edges": [[v, a], [v, b], [v, c]], "targets": [[x, y, z], ...]}`.
    pub fn from_json(nerve: &PlanarGraph, v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            base_vertex: usize,
            edges: [[usize; 2]; 3],
            targets: [[f64; 3]; 3],
        }
        let raw: Raw = serde_json::from_value(v.clone())?;
        let mut nb = [0; 3];
        for (i, [a, b]) in raw.edges.iter().copied().enumerate() {
            nb[i] = if a == raw.base_vertex {
                b
            } else if b == raw.base_vertex {
                a
            } else {
                return Err(Error::InvalidMark(format!("edge [{a}, {b}] misses the base vertex")));
            };
        }
        Mark::new(nerve, raw.base_vertex, nb, raw.targets.map(V3::from))
    }

    pub fn to_json(&self, nerve: &PlanarGraph) -> serde_json::Value {
        serde_json::json!({
            "base_vertex": self.base_vertex,
            "edges": self.edges.map(|e| nerve.edge(e)),
            "targets": self.targets.map(|p| [p.x, p.y, p.z]),
        })
    }
}

struct Triangulation {
    n_total: usize,
    tris: Vec<[usize; 3]>,
    /// cos of the exterior angle on edges (0,1), (1,2), (2,0) of each triangle.
    cos: Vec<[f64; 3]>,
    incident: Vec<Vec<(usize, usize)>>,
    aux: Vec<AuxFace>,
}

struct AuxFace {
    vertex: usize,
    /// Overlap wanted in the final packing; the planar solve always starts tangent.
    target_cos: f64,
}

fn triangulate(nerve: &PlanarGraph, theta: &[f64]) -> Triangulation {
    let mut n_total = nerve.vertex_count();
    let mut tris = Vec::new();
    let mut cos = Vec::new();
    let mut aux = Vec::new();
    let edge_cos = |a: usize, b: usize| match nerve.edge_between(a, b) {
        Some(e) => theta[e].cos(),
        None => 1.0,
    };
    for face in nerve.faces() {
        if face.len() == 3 {
            tris.push([face[0], face[1], face[2]]);
            cos.push([
                edge_cos(face[0], face[1]),
                edge_cos(face[1], face[2]),
                edge_cos(face[2], face[0]),
            ]);
        } else {
            let x = n_total;
            n_total += 1;
            let k = face.len();
            for i in 0..k {
                let (a, b) = (face[i], face[(i + 1) % k]);
                tris.push([a, b, x]);
                cos.push([edge_cos(a, b), 1.0, 1.0]);
            }
            let tangent = (0..k).all(|i| edge_cos(face[i], face[(i + 1) % k]) == 1.0);
            aux.push(AuxFace {
                vertex: x,
                target_cos: if tangent { 0.0 } else { 1.0 },
            });
        }
    }
    let mut incident = vec![Vec::new(); n_total];
    for (t, tri) in tris.iter().enumerate() {
        for (pos, &v) in tri.iter().enumerate() {
            incident[v].push((t, pos));
        }
    }
    Triangulation {
        n_total,
        tris,
        cos,
        incident,
        aux,
    }
}

fn edge_len(ra: f64, rb: f64, c: f64) -> f64 {
    (ra * ra + rb * rb + 2.0 * ra * rb * c).sqrt()
}

fn angle_from_sides(adj1: f64, adj2: f64, opp: f64) -> f64 {
    ((adj1 * adj1 + adj2 * adj2 - opp * opp) / (2.0 * adj1 * adj2))
        .clamp(-1.0, 1.0)
        .acos()
}

impl Triangulation {
    fn lengths(&self, t: usize, r: &[f64]) -> [f64; 3] {
        let [a, b, c] = self.tris[t];
        let k = self.cos[t];
        [edge_len(r[a], r[b], k[0]), edge_len(r[b], r[c], k[1]), edge_len(r[c], r[a], k[2])]
    }

    /// Angle at position `pos` of triangle `t`.
    fn angle(&self, t: usize, pos: usize, r: &[f64]) -> f64 {
        let [l01, l12, l20] = self.lengths(t, r);
        match pos {
            0 => angle_from_sides(l01, l20, l12),
            1 => angle_from_sides(l01, l12, l20),
            _ => angle_from_sides(l12, l20, l01),
        }
    }

    fn angle_sum(&self, v: usize, r: &[f64]) -> f64 {
        self.incident[v].iter().map(|&(t, pos)| self.angle(t, pos, r)).sum()
    }
}

struct RadiusSolve {
    radii: Vec<f64>,
    iterations: usize,
}

fn solve_radii(tri: &Triangulation, outer: [usize; 3], opts: &PackingOptions, n_orig: usize) -> Result<RadiusSolve> {
    let mut r = vec![1.0; tri.n_total];
    if let Some(seed) = &opts.initial_radii {
        if seed.len() != n_orig || seed.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::OutOfRange("initial radii must be positive, one per nerve vertex".into()));
        }
        r[..n_orig].copy_from_slice(seed);
    }
    for v in outer {
        r[v] = 1.0;
    }
    let interior: Vec<usize> = (0..tri.n_total).filter(|v| !outer.contains(v)).collect();
    let worst = |r: &[f64]| {
        interior
            .iter()
            .map(|&v| (tri.angle_sum(v, r) - TAU).abs())
            .fold(0.0, f64::max)
    };

    // Gauss-Seidel: solve each vertex's angle sum exactly in log r.
    let mut sweeps = 0;
    while sweeps < opts.max_iter && worst(&r) > 1e-6 {
        sweeps += 1;
        for &v in &interior {
            let x0 = r[v].ln();
            let mut f = |x: f64| {
                r[v] = x.exp();
                tri.angle_sum(v, &r) - TAU
            };
            let (mut lo, mut hi) = (x0 - 0.5, x0 + 0.5);
            while f(lo) < 0.0 && lo > -60.0 {
                lo -= 2.0 * (x0 - lo);
            }
            while f(hi) > 0.0 && hi < 60.0 {
                hi += 2.0 * (hi - x0);
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 * (1.0 + mid.abs()) {
                    break;
                }
            }
            r[v] = (0.5 * (lo + hi)).exp();
        }
    }

    // Newton polish on log radii with a finite-difference Jacobian.
    let n = interior.len();
    let residual = |r: &[f64]| DVector::from_iterator(n, interior.iter().map(|&v| tri.angle_sum(v, r) - TAU));
    let mut f = residual(&r);
    let mut newton = 0;
    while f.amax() > 1e-14 && newton < 50 {
        newton += 1;
        let mut jac = DMatrix::zeros(n, n);
        let h: f64 = 1e-7;
        for (j, &v) in interior.iter().enumerate() {
            let saved = r[v];
            r[v] = saved * h.exp();
            let fp = residual(&r);
            r[v] = saved * (-h).exp();
            let fm = residual(&r);
            r[v] = saved;
            jac.set_column(j, &((fp - fm) / (2.0 * h)));
        }
        let Some(step) = jac.lu().solve(&(-&f)) else { break };
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-6 {
            let mut trial = r.clone();
            for (j, &v) in interior.iter().enumerate() {
                trial[v] = r[v] * (t * step[j]).exp();
            }
            let ft = residual(&trial);
            if ft.amax() < f.amax() {
                r = trial;
                f = ft;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let err = f.amax();
    if !(err <= 1e-11) {
        return Err(Error::NoConvergence {
            what: "radius iteration",
            iterations: sweeps + newton,
            worst: err,
        });
    }
    Ok(RadiusSolve {
        radii: r,
        iterations: sweeps + newton,
    })
}

fn rotate(v: Vector2<f64>, angle: f64) -> Vector2<f64> {
    let (s, c) = angle.sin_cos();
    Vector2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

fn layout(tri: &Triangulation, outer: usize, r: &[f64]) -> Result<Vec<Vector2<f64>>> {
    let mut pos: Vec<Option<Vector2<f64>>> = vec![None; tri.n_total];
    let [a, b, c] = tri.tris[outer];
    let [lab, _, lca] = tri.lengths(outer, r);
    let alpha = tri.angle(outer, 0, r);
    pos[a] = Some(Vector2::zeros());
    pos[b] = Some(Vector2::new(lab, 0.0));
    // the outer face runs clockwise in the plane
    pos[c] = Some(lca * Vector2::new(alpha.cos(), -alpha.sin()));
    let mut changed = true;
    while changed {
        changed = false;
        for t in 0..tri.tris.len() {
            for rot in 0..3 {
                let (i, j, k) = (tri.tris[t][rot], tri.tris[t][(rot + 1) % 3], tri.tris[t][(rot + 2) % 3]);
                if let (Some(pi), Some(pj), None) = (pos[i], pos[j], pos[k]) {
                    let lens = tri.lengths(t, r);
                    let lik = lens[(rot + 2) % 3];
                    let ang = tri.angle(t, rot, r);
                    pos[k] = Some(pi + lik * rotate((pj - pi).normalize(), ang));
                    changed = true;
                }
            }
        }
    }
    pos.into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| Error::Internal(format!("vertex {v} not reached by layout"))))
        .collect()
}

fn default_outer(nerve: &PlanarGraph, tri: &Triangulation) -> usize {
    let n = nerve.vertex_count();
    tri.tris.iter().position(|t| t.iter().all(|&v| v < n)).unwrap_or(0)
}

fn solve(nerve: &PlanarGraph, theta: &[f64], opts: &PackingOptions) -> Result<Packing> {
    nerve.require_polyhedral().map_err(|e| match e {
        Error::NotPolyhedral(m) => Error::Degenerate(format!("nerve is not polyhedral: {m}")),
        other => other,
    })?;
    let n = nerve.vertex_count();
    let tri = triangulate(nerve, theta);
    let outer = match opts.outer_face {
        Some(k) if k < tri.tris.len() => k,
        Some(k) => return Err(Error::OutOfRange(format!("outer face {k} of {}", tri.tris.len()))),
        None => default_outer(nerve, &tri),
    };
    let solved = solve_radii(&tri, tri.tris[outer], opts, n)?;
    let r = &solved.radii;
    let mut pos = layout(&tri, outer, r)?;

    // centre and scale the picture before lifting it
    let centre = pos.iter().sum::<Vector2<f64>>() / pos.len() as f64;
    let scale = pos
        .iter()
        .zip(r)
        .map(|(p, rv)| (p - centre).norm() + rv)
        .fold(0.0, f64::max);
    for p in &mut pos {
        *p = (*p - centre) / scale;
    }
    let circles: Vec<SphericalCircle> =
        (0..tri.n_total).map(|v| circle_from_planar(&pos[v], r[v] / scale)).collect();
    let edges: Vec<[VertexId; 2]> = nerve.edges().to_vec();
    let mut packing = Packing {
        contacts: Vec::new(),
        circles,
        angles: theta.to_vec(),
        edges,
        residual: 0.0,
        iterations: solved.iterations,
    };

    // A rough balance first: the lifted picture can be far from balanced and
    // the large boost costs precision, which the polish on the sphere recovers.
    packing.contacts = contact_points(&packing)?;
    let rough = balancing_boost(&packing.contacts);
    for c in &mut packing.circles {
        *c = rough.apply_circle(c);
    }
    packing.iterations += refine_on_sphere(&tri, &mut packing.circles)?;
    packing.circles.truncate(n);
    packing.contacts = contact_points(&packing)?;
    let mut packing = balance(&packing);

    // stereographic projection reverses orientation; undo it by a reflection
    let votes: f64 = nerve
        .faces()
        .iter()
        .map(|f| {
            let c = &packing.circles;
            Matrix3::from_columns(&[c[f[0]].normal, c[f[1]].normal, c[f[2]].normal])
                .determinant()
                .signum()
        })
        .sum();
    if votes < 0.0 {
        for c in &mut packing.circles {
            c.normal.y = -c.normal.y;
        }
    }
    packing.contacts = contact_points(&packing)?;
    packing.residual = measure_residual(&packing);
    if !(packing.residual <= opts.tol) {
        return Err(Error::NoConvergence {
            what: "circle packing",
            iterations: packing.iterations,
            worst: packing.residual,
        });
    }
    Ok(packing)
}

fn to_lorentz(c: &SphericalCircle) -> Vector4<f64> {
    let s = (1.0 - c.offset * c.offset).sqrt();
    Vector4::new(c.normal.x, c.normal.y, c.normal.z, c.offset) / s
}

fn from_lorentz(x: &Vector4<f64>) -> SphericalCircle {
    let n = V3::new(x[0], x[1], x[2]);
    let len = n.norm();
    SphericalCircle::new(n / len, x[3] / len)
}

fn minkowski(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]
}

/// Polishes all constraints of the triangulation on the sphere and moves the
/// auxiliary overlaps to their targets. Circles are unit spacelike vectors;
/// the inversive product of two circles is minus the cosine of their exterior
/// angle. Returns the number of Gauss-Newton iterations.
fn refine_on_sphere(tri: &Triangulation, circles: &mut [SphericalCircle]) -> Result<usize> {
    let n = circles.len();
    let mut pairs: Vec<([usize; 2], f64, Option<usize>)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let aux_index: std::collections::BTreeMap<usize, usize> =
        tri.aux.iter().enumerate().map(|(i, a)| (a.vertex, i)).collect();
    for (t, tr) in tri.tris.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tr[k], tr[(k + 1) % 3]);
            if seen.insert((a.min(b), a.max(b))) {
                let which = aux_index.get(&a).or(aux_index.get(&b)).copied();
                pairs.push(([a, b], tri.cos[t][k], which));
            }
        }
    }
    let mut x = DVector::from_iterator(4 * n, circles.iter().flat_map(|c| to_lorentz(c).iter().copied().collect::<Vec<_>>()));
    let get = |x: &DVector<f64>, i: usize| Vector4::new(x[4 * i], x[4 * i + 1], x[4 * i + 2], x[4 * i + 3]);
    let m = n + pairs.len();
    let eval = |x: &DVector<f64>, s: f64| {
        let mut f = DVector::zeros(m);
        for i in 0..n {
            let c = get(x, i);
            f[i] = minkowski(&c, &c) - 1.0;
        }
        for (k, &([a, b], c0, which)) in pairs.iter().enumerate() {
            let c = match which {
                Some(j) => c0 + s * (tri.aux[j].target_cos - c0),
                None => c0,
            };
            f[n + k] = minkowski(&get(x, a), &get(x, b)) + c;
        }
        f
    };
    let jacobian = |x: &DVector<f64>| {
        let mut jac = DMatrix::zeros(m, 4 * n);
        let signs = [1.0, 1.0, 1.0, -1.0];
        for i in 0..n {
            let c = get(x, i);
            for q in 0..4 {
                jac[(i, 4 * i + q)] = 2.0 * signs[q] * c[q];
            }
        }
        for (k, &([a, b], _, _)) in pairs.iter().enumerate() {
            let (ca, cb) = (get(x, a), get(x, b));
            for q in 0..4 {
                jac[(n + k, 4 * a + q)] = signs[q] * cb[q];
                jac[(n + k, 4 * b + q)] = signs[q] * ca[q];
            }
        }
        jac
    };

    let steps = if tri.aux.iter().any(|a| a.target_cos != 1.0) { 8 } else { 1 };
    let mut iterations = 0;
    for step in 1..=steps {
        let s = step as f64 / steps as f64;
        let target = if step == steps { 1e-13 } else { 1e-10 };
        let mut f = eval(&x, s);
        let mut count = 0;
        while f.amax() > target {
            iterations += 1;
            let dx = jacobian(&x)
                .svd(true, true)
                .solve(&(-&f), 1e-12)
                .map_err(|e| Error::Internal(e.to_string()))?;
            let mut t = 1.0;
            let before = f.amax();
            loop {
                let trial = &x + t * &dx;
                let ft = eval(&trial, s);
                if ft.amax() < f.amax() || t < 1e-4 {
                    x = trial;
                    f = ft;
                    break;
                }
                t *= 0.5;
            }
            if f.amax() > 0.5 * before && f.amax() < 1e-9 {
                // rounding floor; the final residual check decides
                break;
            }
            count += 1;
            if count > 60 {
                return Err(Error::NoConvergence {
                    what: "auxiliary overlap continuation",
                    iterations,
                    worst: f.amax(),
                });
            }
        }
    }
    for (i, c) in circles.iter_mut().enumerate() {
        *c = from_lorentz(&get(&x, i));
    }
    Ok(iterations)
}

fn contact_points(p: &Packing) -> Result<Vec<Vec<V3>>> {
    p.edges
        .iter()
        .enumerate()
        .map(|(e, &[u, v])| {
            let (a, b) = (&p.circles[u], &p.circles[v]);
            if p.angles[e] == 0.0 {
                Ok(vec![tangency_point(a, b)])
            } else {
                crossing_points(a, b)
                    .map(|pts| pts.to_vec())
                    .ok_or(Error::MissingContact(e))
            }
        })
        .collect()
}

fn measure_residual(p: &Packing) -> f64 {
    p.edges
        .iter()
        .enumerate()
        .map(|(e, &[u, v])| {
            let (a, b) = (&p.circles[u], &p.circles[v]);
            let want = center_distance(a.radius(), b.radius(), p.angles[e]);
            (spherical_distance(&a.normal, &b.normal) - want).abs()
        })
        .fold(0.0, f64::max)
}

impl Packing {
    pub fn transformed(&self, m: &Mobius) -> Packing {
        Packing {
            circles: self.circles.iter().map(|c| m.apply_circle(c)).collect(),
            contacts: self
                .contacts
                .iter()
                .map(|pts| pts.iter().map(|x| m.apply_point(x)).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// Recomputes the residual from the circles.
    pub fn measured_residual(&self) -> f64 {
        measure_residual(self)
    }

    /// Measured exterior intersection angle per edge.
    pub fn measured_angles(&self) -> Vec<f64> {
        self.edges
            .iter()
            .map(|&[u, v]| crate::sphere::intersection_angle(&self.circles[u], &self.circles[v]))
            .collect()
    }

    pub fn contact_centroid(&self) -> V3 {
        let pts: Vec<&V3> = self.contacts.iter().flatten().collect();
        pts.iter().copied().sum::<V3>() / pts.len() as f64
    }

    /// Largest distance of a contact point from its two circles.
    pub fn contact_residual(&self) -> f64 {
        self.edges
            .iter()
            .zip(&self.contacts)
            .flat_map(|(&[u, v], pts)| {
                pts.iter().map(move |x| {
                    let on_sphere = (x.norm() - 1.0).abs();
                    let a = self.circles[u].plane_distance(x).abs();
                    let b = self.circles[v].plane_distance(x).abs();
                    on_sphere.max(a).max(b)
                })
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("packing serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let p: Packing = serde_json::from_value(v.clone())?;
        let m = p.edges.len();
        if p.contacts.len() != m || p.angles.len() != m {
            return Err(Error::Parse("edges, contacts and angles differ in length".into()));
        }
        if p.edges.iter().flatten().any(|&v| v >= p.circles.len()) {
            return Err(Error::Parse("edge refers to a missing circle".into()));
        }
        Ok(p)
    }
}

fn balance(p: &Packing) -> Packing {
    p.transformed(&balancing_boost(&p.contacts))
}

/// Möbius boost that puts the centroid of the contact points at the origin.
fn balancing_boost(contacts: &[Vec<V3>]) -> Mobius {
    let pts: Vec<V3> = contacts.iter().flatten().copied().collect();
    let centroid = |b: &V3| {
        let m = Mobius::boost(b);
        pts.iter().map(|x| m.apply_point(x)).sum::<V3>() / pts.len() as f64
    };
    let mut b = V3::zeros();
    let mut f = centroid(&b);
    for _ in 0..100 {
        if f.norm() < 1e-15 {
            break;
        }
        let h = 1e-7;
        let mut jac = Matrix3::zeros();
        for k in 0..3 {
            let mut e = V3::zeros();
            e[k] = h;
            jac.set_column(k, &((centroid(&(b + e)) - centroid(&(b - e))) / (2.0 * h)));
        }
        let Some(step) = jac.lu().solve(&(-f)) else { break };
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-8 {
            let trial = b + t * step;
            let ft = centroid(&trial);
            if ft.norm() < f.norm() {
                b = trial;
                f = ft;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Mobius::boost(&b)
}

/// Tangency packing whose nerve is `nerve`.
pub fn solve_tangency_packing(nerve: &PlanarGraph, opts: &PackingOptions) -> Result<Packing> {
    solve(nerve, &vec![0.0; nerve.edge_count()], opts)
}

/// Circle pattern with prescribed exterior intersection angles on the nerve
/// edges, optionally normalized by a mark.
pub fn solve_pattern(
    nerve: &PlanarGraph,
    theta: &AngleWeights,
    mark: Option<&Mark>,
    opts: &PackingOptions,
) -> Result<Packing> {
    let report = check_pattern_conditions(nerve, theta)?;
    if !report.satisfied {
        let first = &report.violations[0];
        return Err(Error::ConditionsFailed(format!(
            "{} violated constraints, e.g. {:?} on edges {:?} with sum {}",
            report.violations.len(),
            first.condition,
            first.elements,
            first.lhs
        )));
    }
    let packing = solve(nerve, &theta.radians(), opts)?;
    match mark {
        Some(m) => normalize_mark(&packing, m),
        None => Ok(packing),
    }
}

/// Applies the Möbius map taking the marked contact points to the mark's
/// targets. For crossing pairs the first point of the pair is used.
pub fn normalize_mark(p: &Packing, mark: &Mark) -> Result<Packing> {
    let mut from = [V3::zeros(); 3];
    for (i, &e) in mark.edges.iter().enumerate() {
        let pts = p.contacts.get(e).ok_or(Error::MissingContact(e))?;
        from[i] = *pts.first().ok_or(Error::MissingContact(e))?;
        let [a, b] = p.edges[e];
        if a != mark.base_vertex && b != mark.base_vertex {
            return Err(Error::InvalidMark(format!("edge {e} misses vertex {}", mark.base_vertex)));
        }
    }
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        if (from[i] - from[j]).norm() < 1e-8 {
            return Err(Error::InvalidMark(format!(
                "marked contact points {i} and {j} nearly coincide"
            )));
        }
    }
    let m = Mobius::three_point(&from, &mark.targets)?;
    Ok(p.transformed(&m))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub min_radius: f64,
    pub min_radius_vertex: VertexId,
    /// Smallest spherical gap between caps of non-adjacent circles.
    pub min_gap: f64,
    pub min_gap_pair: Option<[VertexId; 2]>,
    pub flags: Vec<String>,
}

impl DegeneracyReport {
    pub fn degenerate(&self) -> bool {
        !self.flags.is_empty()
    }
}

pub fn degeneracy_monitor(p: &Packing) -> DegeneracyReport {
    degeneracy_monitor_with(p, DEFAULT_DEGENERACY_THRESHOLD, DEFAULT_DEGENERACY_THRESHOLD)
}

pub fn degeneracy_monitor_with(p: &Packing, radius_threshold: f64, gap_threshold: f64) -> DegeneracyReport {
    let n = p.circles.len();
    let (min_radius_vertex, min_radius) = p
        .circles
        .iter()
        .map(|c| c.radius())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::INFINITY));
    let mut adjacent = vec![vec![false; n]; n];
    for &[u, v] in &p.edges {
        adjacent[u][v] = true;
        adjacent[v][u] = true;
    }
    let mut min_gap = f64::INFINITY;
    let mut min_gap_pair = None;
    for i in 0..n {
        for j in i + 1..n {
            if adjacent[i][j] {
                continue;
            }
            let (a, b) = (&p.circles[i], &p.circles[j]);
            let gap = spherical_distance(&a.normal, &b.normal) - a.radius() - b.radius();
            if gap < min_gap {
                min_gap = gap;
                min_gap_pair = Some([i, j]);
            }
        }
    }
    let mut flags = Vec::new();
    if min_radius < radius_threshold {
        flags.push(format!("circle degenerating: circle {min_radius_vertex} has radius {min_radius:e}"));
    }
    if min_gap < gap_threshold {
        let [i, j] = min_gap_pair.unwrap_or([0, 0]);
        flags.push(format!("gap collapsing: circles {i} and {j} are {min_gap:e} apart"));
    }
    DegeneracyReport {
        min_radius,
        min_radius_vertex,
        min_gap,
        min_gap_pair,
        flags,
    }
}

/// Default: exterior angle of `pi / 6`, used by truncated inscriptions.
pub const DEFAULT_PATTERN_ANGLE: f64 = PI / 6.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::{Angle, AngleTarget};
    use crate::fixtures;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn octahedron_packing_has_equal_radii() {
        let n = fixtures::octahedron();
        let p = solve_tangency_packing(&n, &PackingOptions::default()).unwrap();
        assert!(p.residual <= 1e-10, "{}", p.residual);
        for c in &p.circles {
            assert!((c.radius() - FRAC_PI_4).abs() < 1e-9, "{}", c.radius());
        }
        assert!(p.contact_centroid().norm() < 1e-12);
        assert!(p.contact_residual() < 1e-12);
    }

    #[test]
    fn caps_are_disjoint_in_tangency_packings() {
        for name in ["tetrahedron", "icosahedron", "cube", "dodecahedron", "triangular-prism"] {
            let n = fixtures::by_name(name).unwrap();
            let p = solve_tangency_packing(&n, &PackingOptions::default()).unwrap();
            let report = degeneracy_monitor(&p);
            assert!(report.min_gap > 1e-3, "{name}: {}", report.min_gap);
            assert!(!report.degenerate());
        }
    }

    #[test]
    fn orientation_matches_faces() {
        let n = fixtures::cube().dual().graph;
        let p = solve_tangency_packing(&n, &PackingOptions::default()).unwrap();
        for f in n.faces() {
            let m = Matrix3::from_columns(&[p.circles[f[0]].normal, p.circles[f[1]].normal, p.circles[f[2]].normal]);
            assert!(m.determinant() > 0.0, "{f:?} {}", m.determinant());
        }
    }

    #[test]
    fn zero_pattern_equals_tangency_packing() {
        let n = fixtures::icosahedron();
        let w = AngleWeights::uniform(&n, Angle::pi_fraction(0, 1), AngleTarget::Dual);
        let a = solve_pattern(&n, &w, None, &PackingOptions::default()).unwrap();
        let b = solve_tangency_packing(&n, &PackingOptions::default()).unwrap();
        for (x, y) in a.circles.iter().zip(&b.circles) {
            assert!((x.normal - y.normal).norm() < 1e-12);
        }
    }

    #[test]
    fn right_angle_pattern_is_rejected() {
        let n = fixtures::octahedron();
        let w = AngleWeights::uniform(&n, Angle::pi_fraction(1, 2), AngleTarget::Dual);
        assert!(matches!(
            solve_pattern(&n, &w, None, &PackingOptions::default()),
            Err(Error::ConditionsFailed(_))
        ));
    }

    #[test]
    fn pattern_angles_are_realized() {
        let n = fixtures::octahedron();
        let w = AngleWeights::uniform(&n, Angle::pi_fraction(1, 6), AngleTarget::Dual);
        let p = solve_pattern(&n, &w, None, &PackingOptions::default()).unwrap();
        for a in p.measured_angles() {
            assert!((a - PI / 6.0).abs() < 1e-8, "{a}");
        }
        assert!(p.contacts.iter().all(|c| c.len() == 2));
        assert!(p.contact_residual() < 1e-12);
    }

    #[test]
    fn synthetic_degeneracy_flags() {
        let n = fixtures::octahedron();
        let mut p = solve_tangency_packing(&n, &PackingOptions::default()).unwrap();
        p.circles[0].offset = (1e-6f64).cos();
        let r = degeneracy_monitor(&p);
        assert!(r.flags.iter().any(|f| f.starts_with("circle degenerating")));
        // corrupt the nerve: drop an edge so two tangent circles look non-adjacent
        let mut q = solve_tangency_packing(&n, &PackingOptions::default()).unwrap();
        q.edges.remove(0);
        let r = degeneracy_monitor(&q);
        assert!(r.min_gap.abs() < 1e-9);
        assert!(r.flags.iter().any(|f| f.starts_with("gap collapsing")));
    }

    #[test]
    fn json_round_trip() {
        let n = fixtures::tetrahedron();
        let p = solve_tangency_packing(&n, &PackingOptions::default()).unwrap();
        let back = Packing::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn non_polyhedral_nerve_is_rejected() {
        let g = fixtures::subdivide_edge(&fixtures::octahedron(), 0);
        assert!(solve_tangency_packing(&g, &PackingOptions::default()).is_err());
    }
}
