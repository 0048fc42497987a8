//! Inscribing the rectified and truncated graphs of a polyhedral graph in a
//! perturbed sphere by continuation from a circle packing.
//!
//! Every point lives on the surface through its direction: the unknowns are
//! two tangent offsets of the direction, so "on the surface" holds by
//! construction. The remaining equations (points on face planes, vertex stars
//! coplanar) form an underdetermined system solved by minimal-norm
//! Gauss-Newton steps, with three marked points held at fixed directions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::angles::{Angle, AngleTarget, AngleWeights};
use crate::configuration::{config_from_packing, coplanarity_det, Plane};
use crate::derived::{rectify, truncate};
use crate::error::{Error, Result};
use crate::graph::PlanarGraph;
use crate::packing::{solve_pattern, solve_tangency_packing, PackingOptions};
use crate::sphere::{fit_plane, V3};
use crate::surface::{check_convex, homotopy_surface, onsurface_residual, Bump, BumpSpec, RadialSurface};

pub const DEFAULT_STEPS: usize = 8;
pub const DEFAULT_PLANARITY_TOL: f64 = 1e-8;
pub const DEFAULT_SURFACE_TOL: f64 = 1e-10;
pub const DEFAULT_CONVEXITY_MARGIN: f64 = 1e-6;
pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct InscribeOptions {
    pub steps: usize,
    pub planarity_tol: f64,
    pub surface_tol: f64,
    pub convexity_margin: f64,
    /// Gauss-Newton iterations allowed per continuation step.
    pub max_iter: usize,
    pub degeneracy_threshold: f64,
    pub max_halvings: usize,
    pub packing: PackingOptions,
}

impl Default for InscribeOptions {
    fn default() -> Self {
        InscribeOptions {
            steps: DEFAULT_STEPS,
            planarity_tol: DEFAULT_PLANARITY_TOL,
            surface_tol: DEFAULT_SURFACE_TOL,
            convexity_margin: DEFAULT_CONVEXITY_MARGIN,
            max_iter: 50,
            degeneracy_threshold: 1e-4,
            max_halvings: 4,
            packing: PackingOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InscriptionTarget {
    Rectified,
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub s: f64,
    pub iterations: usize,
    pub planarity_residual: f64,
    pub min_gap: f64,
    pub min_radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InscriptionResult {
    pub target: InscriptionTarget,
    pub epsilon: f64,
    pub bump: BumpSpec,
    /// Faces of the target graph, indexing `surface_points`.
    pub faces: Vec<Vec<usize>>,
    pub surface_points: Vec<V3>,
    pub planes: Vec<Plane>,
    pub max_onsurface_residual: f64,
    pub max_planarity_residual: f64,
    pub convexity_margin: f64,
    pub convexity_ok: bool,
    pub newton_iterations: usize,
    pub steps: Vec<StepRecord>,
}

impl InscriptionResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("result serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        Ok(serde_json::from_value(v.clone())?)
    }

    /// The surface the result was computed on.
    pub fn surface(&self) -> Result<RadialSurface> {
        RadialSurface::new(Bump::from_spec(self.bump.clone())?, self.epsilon)
    }
}

fn tangent_frame(u: &V3) -> (V3, V3) {
    let helper = if u.x.abs() < 0.6 { V3::x() } else { V3::y() };
    let t1 = u.cross(&helper).normalize();
    (t1, u.cross(&t1))
}

#[derive(Debug, Clone)]
struct Direction {
    u: V3,
    t1: V3,
    t2: V3,
}

impl Direction {
    fn new(u: V3) -> Self {
        let u = u.normalize();
        let (t1, t2) = tangent_frame(&u);
        Direction { u, t1, t2 }
    }

    fn moved(&self, a: f64, b: f64) -> V3 {
        (self.u + a * self.t1 + b * self.t2).normalize()
    }
}

#[derive(Debug, Clone)]
struct PlaneVar {
    normal: Direction,
    offset: f64,
}

/// The equation system shared by both targets.
#[derive(Debug, Clone)]
struct System {
    surface: RadialSurface,
    points: Vec<Direction>,
    pinned: Vec<bool>,
    planes: Vec<PlaneVar>,
    /// (point, plane) pairs that must be incident.
    incidences: Vec<(usize, usize)>,
    /// Point groups that must be coplanar, anchored at their first three.
    coplanar: Vec<Vec<usize>>,
}

struct State {
    points: Vec<V3>,
    planes: Vec<(V3, f64)>,
}

impl System {
    fn free_points(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| !self.pinned[i]).collect()
    }

    fn n_unknowns(&self) -> usize {
        2 * self.free_points().len() + 3 * self.planes.len()
    }

    fn n_equations(&self) -> usize {
        self.incidences.len() + self.coplanar.iter().map(|g| g.len() - 3).sum::<usize>()
    }

    fn state(&self, x: &DVector<f64>) -> State {
        let free = self.free_points();
        let mut offsets = vec![(0.0, 0.0); self.points.len()];
        for (k, &i) in free.iter().enumerate() {
            offsets[i] = (x[2 * k], x[2 * k + 1]);
        }
        let points = self
            .points
            .iter()
            .zip(&offsets)
            .map(|(d, &(a, b))| {
                let u = d.moved(a, b);
                self.surface.rho(&u) * u
            })
            .collect();
        let base = 2 * free.len();
        let planes = self
            .planes
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let (a, b, c) = (x[base + 3 * j], x[base + 3 * j + 1], x[base + 3 * j + 2]);
                (p.normal.moved(a, b), p.offset + c)
            })
            .collect();
        State { points, planes }
    }

    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        let st = self.state(x);
        let mut r = Vec::with_capacity(self.n_equations());
        for &(i, j) in &self.incidences {
            let (n, d) = st.planes[j];
            r.push(n.dot(&st.points[i]) - d);
        }
        for group in &self.coplanar {
            let p = |k: usize| &st.points[group[k]];
            for k in 3..group.len() {
                r.push(coplanarity_det(p(0), p(1), p(2), p(k)));
            }
        }
        DVector::from_vec(r)
    }

    /// Largest distance of a point from a plane it should lie on.
    fn geometric_residual(&self, x: &DVector<f64>) -> f64 {
        let st = self.state(x);
        let mut worst: f64 = 0.0;
        for &(i, j) in &self.incidences {
            let (n, d) = st.planes[j];
            worst = worst.max((n.dot(&st.points[i]) - d).abs());
        }
        for group in &self.coplanar {
            let p = |k: usize| &st.points[group[k]];
            let area = (p(1) - p(0)).cross(&(p(2) - p(0))).norm();
            for k in 3..group.len() {
                worst = worst.max((coplanarity_det(p(0), p(1), p(2), p(k)) / area).abs());
            }
        }
        worst
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = x.len();
        let mut jac = DMatrix::zeros(self.n_equations(), n);
        let h = 1e-7;
        let mut xp = x.clone();
        for k in 0..n {
            xp[k] = x[k] + h;
            let fp = self.residual(&xp);
            xp[k] = x[k] - h;
            let fm = self.residual(&xp);
            xp[k] = x[k];
            jac.set_column(k, &((fp - fm) / (2.0 * h)));
        }
        jac
    }

    /// Moves the base directions to the solution so offsets restart at 0.
    fn commit(&mut self, x: &DVector<f64>) {
        let st = self.state(x);
        for (i, p) in st.points.iter().enumerate() {
            if !self.pinned[i] {
                self.points[i] = Direction::new(*p);
            }
        }
        for (pv, (n, d)) in self.planes.iter_mut().zip(st.planes) {
            *pv = PlaneVar {
                normal: Direction::new(n),
                offset: d,
            };
        }
    }

    fn positions(&self) -> Vec<V3> {
        self.state(&DVector::zeros(self.n_unknowns())).points
    }

    /// Gauss-Newton on the current surface. Returns the iteration count.
    fn solve(&mut self, opts: &InscribeOptions) -> std::result::Result<usize, String> {
        let mut x = DVector::zeros(self.n_unknowns());
        if self.n_equations() == 0 {
            return Ok(0);
        }
        let target = opts.planarity_tol * 1e-3;
        let mut r = self.residual(&x);
        let mut g = self.geometric_residual(&x);
        let mut iterations = 0;
        let mut slow = 0;
        while g > target && iterations < opts.max_iter {
            let jac = self.jacobian(&x);
            let svd = jac.svd(true, true);
            let cutoff = 1e-12 * svd.singular_values.max();
            let dx = svd.solve(&(-&r), cutoff).map_err(|e| e.to_string())?;
            let mut t = 1.0;
            let mut accepted = None;
            while t >= 1.0 / 64.0 {
                let trial = &x + t * &dx;
                let rt = self.residual(&trial);
                if rt.norm() < r.norm() {
                    accepted = Some((trial, rt));
                    break;
                }
                t *= 0.5;
            }
            let Some((xn, rn)) = accepted else { break };
            iterations += 1;
            let gn = self.geometric_residual(&xn);
            slow = if gn > 0.5 * g { slow + 1 } else { 0 };
            x = xn;
            r = rn;
            g = gn;
            if slow >= 10 {
                return Err(format!("residual stalled at {g:e}"));
            }
        }
        if g > opts.planarity_tol {
            return Err(format!("planarity residual {g:e} after {iterations} iterations"));
        }
        self.commit(&x);
        Ok(iterations)
    }
}

fn min_gap(points: &[V3]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            m = m.min((points[i] - points[j]).norm());
        }
    }
    m
}

fn circumradius(a: &V3, b: &V3, c: &V3) -> f64 {
    let (x, y, z) = ((b - a).norm(), (c - b).norm(), (a - c).norm());
    let area2 = (b - a).cross(&(c - a)).norm();
    if area2 == 0.0 {
        0.0
    } else {
        x * y * z / (2.0 * area2)
    }
}

fn min_face_radius(points: &[V3], faces: &[Vec<usize>]) -> f64 {
    faces
        .iter()
        .map(|f| circumradius(&points[f[0]], &points[f[1]], &points[f[2]]))
        .fold(f64::INFINITY, f64::min)
}

fn face_planarity(points: &[V3], face: &[usize]) -> f64 {
    let pts: Vec<V3> = face.iter().map(|&i| points[i]).collect();
    match fit_plane(&pts) {
        Some((n, d)) => pts.iter().map(|p| (n.dot(p) - d).abs()).fold(0.0, f64::max),
        None => f64::INFINITY,
    }
}

/// Face planes fitted to the points, with normals pointing away from the
/// centroid of all points.
fn fitted_planes(points: &[V3], faces: &[Vec<usize>]) -> Result<Vec<Plane>> {
    let centre = points.iter().sum::<V3>() / points.len() as f64;
    faces
        .iter()
        .enumerate()
        .map(|(f, face)| {
            let pts: Vec<V3> = face.iter().map(|&i| points[i]).collect();
            let (n, d) = fit_plane(&pts).ok_or_else(|| Error::Degenerate(format!("face {f} is degenerate")))?;
            Ok(if n.dot(&centre) > d { Plane::new(-n, -d) } else { Plane::new(n, d) })
        })
        .collect()
}

/// Smallest distance of a point strictly inside a face plane it is not on.
fn convexity_margin(points: &[V3], faces: &[Vec<usize>], planes: &[Plane]) -> f64 {
    let mut margin = f64::INFINITY;
    for (face, plane) in faces.iter().zip(planes) {
        let plane = Plane::new(plane.normal, plane.offset);
        for (i, p) in points.iter().enumerate() {
            if !face.contains(&i) {
                margin = margin.min(-plane.signed_distance(p));
            }
        }
    }
    margin
}

fn run(
    mut system: System,
    k: &RadialSurface,
    faces: Vec<Vec<usize>>,
    target: InscriptionTarget,
    opts: &InscribeOptions,
) -> Result<InscriptionResult> {
    if opts.steps == 0 {
        return Err(Error::OutOfRange("continuation needs at least one step".into()));
    }
    check_convex(k)?;
    let record = |step: usize, s: f64, iterations: usize, system: &System| {
        let pts = system.positions();
        let planarity = faces.iter().map(|f| face_planarity(&pts, f)).fold(0.0, f64::max);
        StepRecord {
            step,
            s,
            iterations,
            planarity_residual: planarity,
            min_gap: min_gap(&pts),
            min_radius: min_face_radius(&pts, &faces),
        }
    };

    system.surface = homotopy_surface(k, 0.0)?;
    let iterations = system
        .solve(opts)
        .map_err(|reason| Error::Continuation { s: 0.0, reason })?;
    let mut steps = vec![record(0, 0.0, iterations, &system)];
    let mut total = iterations;

    let mut s_done = 0.0;
    let mut ds = 1.0 / opts.steps as f64;
    let mut halvings = 0;
    while s_done < 1.0 {
        let s_next = if s_done + ds > 1.0 - 1e-12 { 1.0 } else { s_done + ds };
        let snapshot = system.clone();
        system.surface = homotopy_surface(k, s_next)?;
        match system.solve(opts) {
            Ok(it) => {
                s_done = s_next;
                total += it;
                let rec = record(steps.len(), s_next, it, &system);
                if rec.min_gap < opts.degeneracy_threshold || rec.min_radius < opts.degeneracy_threshold {
                    return Err(Error::Continuation {
                        s: s_next,
                        reason: format!("configuration degenerates (min gap {:e}, min radius {:e})", rec.min_gap, rec.min_radius),
                    });
                }
                steps.push(rec);
            }
            Err(reason) => {
                system = snapshot;
                halvings += 1;
                if halvings > opts.max_halvings {
                    return Err(Error::Continuation { s: s_next, reason });
                }
                ds /= 2.0;
            }
        }
    }

    let points = system.positions();
    let planes = fitted_planes(&points, &faces)?;
    let max_onsurface_residual = points.iter().map(|p| onsurface_residual(k, p)).fold(0.0, f64::max);
    let max_planarity_residual = faces
        .iter()
        .zip(&planes)
        .map(|(f, pl)| f.iter().map(|&i| pl.signed_distance(&points[i]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let margin = convexity_margin(&points, &faces, &planes);
    Ok(InscriptionResult {
        target,
        epsilon: k.epsilon,
        bump: k.bump.spec.clone(),
        faces,
        surface_points: points,
        planes,
        max_onsurface_residual,
        max_planarity_residual,
        convexity_margin: margin,
        convexity_ok: margin >= opts.convexity_margin,
        newton_iterations: total,
        steps,
    })
}

fn require_odd(g: &PlanarGraph) -> Result<()> {
    g.require_polyhedral()?;
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) % 2 == 0) {
        return Err(Error::ConditionsFailed(format!(
            "vertex {v} has even degree {}; inscription needs every degree odd",
            g.degree(v)
        )));
    }
    Ok(())
}

fn rectified_system(g: &PlanarGraph, opts: &InscribeOptions) -> Result<(System, Vec<Vec<usize>>)> {
    require_odd(g)?;
    let packing = solve_tangency_packing(&g.dual().graph, &opts.packing)?;
    let z = config_from_packing(&packing, g)?;
    let rect = rectify(g)?;
    let faces: Vec<Vec<usize>> = rect.graph.faces().to_vec();
    let mut pinned = vec![false; g.edge_count()];
    for d in g.star(0).into_iter().take(3) {
        pinned[g.dart_edge(d)] = true;
    }
    let system = System {
        surface: RadialSurface::sphere(),
        points: (0..g.edge_count()).map(|e| Direction::new(z.points[2 * e])).collect(),
        pinned,
        planes: Vec::new(),
        incidences: Vec::new(),
        coplanar: faces.iter().filter(|f| f.len() > 3).cloned().collect(),
    };
    Ok((system, faces))
}

/// Inscribes the rectified graph of `g` (one vertex per edge of `g`).
pub fn inscribe_rectified(g: &PlanarGraph, k: &RadialSurface, opts: &InscribeOptions) -> Result<InscriptionResult> {
    let (system, faces) = rectified_system(g, opts)?;
    run(system, k, faces, InscriptionTarget::Rectified, opts)
}

/// Default overlap angle for truncated inscriptions.
pub fn default_theta(g: &PlanarGraph) -> AngleWeights {
    AngleWeights::uniform(&g.dual().graph, Angle::pi_fraction(1, 6), AngleTarget::Dual)
}

/// Inscribes the truncated graph of `g` (one vertex per dart of `g`),
/// starting from the circle pattern with angles `theta` on the dual.
pub fn inscribe_truncated(
    g: &PlanarGraph,
    k: &RadialSurface,
    theta: &AngleWeights,
    opts: &InscribeOptions,
) -> Result<InscriptionResult> {
    require_odd(g)?;
    let nerve = g.dual().graph;
    let radians = theta.radians();
    if radians.len() != nerve.edge_count() {
        return Err(Error::OutOfRange(format!(
            "theta has {} values, the dual has {} edges",
            radians.len(),
            nerve.edge_count()
        )));
    }
    if let Some((e, a)) = radians.iter().enumerate().find(|(_, a)| !(**a > 1e-3 && **a < PI / 2.0 - 1e-3)) {
        return Err(Error::WeightOutOfRange {
            edge: e,
            value: *a,
            range: "(0, pi/2)",
        });
    }
    let packing = solve_pattern(&nerve, theta, None, &opts.packing)?;
    let z = config_from_packing(&packing, g)?;
    let t = truncate(g)?;
    let faces: Vec<Vec<usize>> = t.graph.faces().to_vec();
    let mut pinned = vec![false; 2 * g.edge_count()];
    for d in g.star(0).into_iter().take(3) {
        pinned[d] = true;
    }
    let mut incidences = Vec::new();
    for d in g.darts() {
        for f in g.edge_faces(g.dart_edge(d)) {
            incidences.push((d, f));
        }
    }
    let system = System {
        surface: RadialSurface::sphere(),
        points: z.points.iter().map(|p| Direction::new(*p)).collect(),
        pinned,
        planes: z
            .planes
            .iter()
            .map(|p| PlaneVar {
                normal: Direction::new(p.normal),
                offset: p.offset,
            })
            .collect(),
        incidences,
        coplanar: (0..g.vertex_count()).filter(|&v| g.degree(v) > 3).map(|v| g.star(v)).collect(),
    };
    run(system, k, faces, InscriptionTarget::Truncated, opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct RankAudit {
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    pub deficiency: usize,
    pub expected_deficiency: usize,
    pub singular_values: Vec<f64>,
}

/// Numerical rank of the rectified system at the sphere solution, with the
/// mark pinned; the expected deficiency is |E|.
pub fn rectified_rank_audit(g: &PlanarGraph, threshold: f64, opts: &InscribeOptions) -> Result<RankAudit> {
    let (mut system, _) = rectified_system(g, opts)?;
    system
        .solve(opts)
        .map_err(|reason| Error::Continuation { s: 0.0, reason })?;
    let x = DVector::zeros(system.n_unknowns());
    let jac = system.jacobian(&x);
    let mut sv: Vec<f64> = jac.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    Ok(RankAudit {
        unknowns: system.n_unknowns(),
        equations: system.n_equations(),
        rank,
        deficiency: system.n_unknowns() - rank,
        expected_deficiency: g.edge_count(),
        singular_values: sv,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub on_surface: bool,
    pub planar: bool,
    pub convex: bool,
    pub planes_distinct: bool,
    pub max_onsurface_residual: f64,
    pub max_planarity_residual: f64,
    pub convexity_margin: f64,
    pub passed: bool,
}

/// Re-checks an inscription against the surface and the target graph using
/// the stored planes.
pub fn verify_inscribed(r: &InscriptionResult, k: &RadialSurface, target: &PlanarGraph) -> VerifyReport {
    let fail = VerifyReport {
        on_surface: false,
        planar: false,
        convex: false,
        planes_distinct: false,
        max_onsurface_residual: f64::INFINITY,
        max_planarity_residual: f64::INFINITY,
        convexity_margin: f64::NEG_INFINITY,
        passed: false,
    };
    if r.surface_points.len() != target.vertex_count() || r.planes.len() != target.face_count() {
        return fail;
    }
    let faces = target.faces();
    let points = &r.surface_points;
    let planes: Vec<Plane> = r.planes.iter().map(|p| Plane::new(p.normal, p.offset)).collect();
    let max_onsurface_residual = points.iter().map(|p| onsurface_residual(k, p)).fold(0.0, f64::max);
    let max_planarity_residual = faces
        .iter()
        .zip(&planes)
        .map(|(f, pl)| f.iter().map(|&i| pl.signed_distance(&points[i]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let margin = convexity_margin(points, faces, &planes);
    let mut planes_distinct = true;
    for i in 0..planes.len() {
        for j in i + 1..planes.len() {
            let gap = (planes[i].normal - planes[j].normal).norm() + (planes[i].offset - planes[j].offset).abs();
            if gap <= 1e-6 {
                planes_distinct = false;
            }
        }
    }
    let on_surface = max_onsurface_residual <= DEFAULT_SURFACE_TOL;
    let planar = max_planarity_residual <= DEFAULT_PLANARITY_TOL;
    let convex = margin >= DEFAULT_CONVEXITY_MARGIN;
    VerifyReport {
        on_surface,
        planar,
        convex,
        planes_distinct,
        max_onsurface_residual,
        max_planarity_residual,
        convexity_margin: margin,
        passed: on_surface && planar && convex && planes_distinct,
    }
}

/// Graph whose faces are the result's faces.
pub fn result_graph(r: &InscriptionResult) -> Result<PlanarGraph> {
    PlanarGraph::from_faces(&r.faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn cube_on_the_sphere_needs_no_iterations() {
        let g = fixtures::cube();
        let opts = InscribeOptions {
            steps: 1,
            ..InscribeOptions::default()
        };
        let r = inscribe_rectified(&g, &RadialSurface::sphere(), &opts).unwrap();
        assert_eq!(r.newton_iterations, 0);
        assert_eq!(r.surface_points.len(), 12);
        assert!(r.max_planarity_residual <= 1e-10);
        assert!(r.convexity_margin > 0.2);
        assert!(verify_inscribed(&r, &RadialSurface::sphere(), &result_graph(&r).unwrap()).passed);
    }

    #[test]
    fn even_degrees_are_rejected() {
        let k = RadialSurface::sphere();
        let err = inscribe_rectified(&fixtures::octahedron(), &k, &InscribeOptions::default());
        assert!(matches!(err, Err(Error::ConditionsFailed(_))));
    }

    #[test]
    fn cube_rank_deficiency_is_edge_count() {
        let audit = rectified_rank_audit(&fixtures::cube(), DEFAULT_RANK_THRESHOLD, &InscribeOptions::default()).unwrap();
        assert_eq!((audit.unknowns, audit.equations, audit.rank), (18, 6, 6));
        assert_eq!(audit.deficiency, 12);
    }

    #[test]
    fn perturbed_rectified_cube_converges() {
        let k = RadialSurface::new(Bump::default_bump(), 1e-3).unwrap();
        let r = inscribe_rectified(&fixtures::cube(), &k, &InscribeOptions::default()).unwrap();
        assert!(r.max_onsurface_residual <= 1e-10);
        assert!(r.max_planarity_residual <= 1e-8);
        assert!(r.convexity_ok);
        assert_eq!(r.steps.len(), 9);
    }
}
