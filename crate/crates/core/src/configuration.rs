//! Configurations of face planes and edge points, the vertex coplanarity
//! conditions, and the circle through the points of a vertex star.
//!
//! Points are indexed by dart: `points[d]` is z(ve) for v = tail(d) and
//! e = dart_edge(d).

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Matrix3x4};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{DartId, EdgeId, FaceId, PlanarGraph, VertexId};
use crate::packing::Packing;
use crate::sphere::{fit_plane, intersection_angle, SphericalCircle, V3};

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;
pub const DEFAULT_GUARD_TOL: f64 = 1e-6;

/// Oriented plane n·x = d with half space n·x ≥ d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    #[serde(rename = "n")]
    pub normal: V3,
    #[serde(rename = "d")]
    pub offset: f64,
}

impl Plane {
    pub fn new(normal: V3, offset: f64) -> Self {
        let len = normal.norm();
        Plane {
            normal: normal / len,
            offset: offset / len,
        }
    }

    pub fn through(points: [&V3; 3]) -> Option<Self> {
        let n = (points[1] - points[0]).cross(&(points[2] - points[0]));
        (n.norm() > 0.0).then(|| Plane::new(n, n.dot(points[0])))
    }

    pub fn signed_distance(&self, x: &V3) -> f64 {
        self.normal.dot(x) - self.offset
    }

    /// Circle cut on the unit sphere, if the plane meets it.
    pub fn circle(&self) -> Option<SphericalCircle> {
        (self.offset.abs() < 1.0).then(|| SphericalCircle::new(self.normal, self.offset))
    }
}

impl From<&SphericalCircle> for Plane {
    fn from(c: &SphericalCircle) -> Self {
        Plane {
            normal: c.normal,
            offset: c.offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub planes: Vec<Plane>,
    pub points: Vec<V3>,
}

fn dart_of(g: &PlanarGraph, v: VertexId, e: EdgeId) -> Result<DartId> {
    match g.edges().get(e) {
        Some(&[a, _]) if a == v => Ok(2 * e),
        Some(&[_, b]) if b == v => Ok(2 * e + 1),
        _ => Err(Error::UnknownEdge(v, e)),
    }
}

impl Configuration {
    pub fn point(&self, g: &PlanarGraph, v: VertexId, e: EdgeId) -> Result<V3> {
        Ok(self.points[dart_of(g, v, e)?])
    }

    fn check_shape(&self, g: &PlanarGraph) -> Result<()> {
        if self.planes.len() != g.face_count() || self.points.len() != 2 * g.edge_count() {
            return Err(Error::Parse(format!(
                "configuration has {} planes and {} points, graph needs {} and {}",
                self.planes.len(),
                self.points.len(),
                g.face_count(),
                2 * g.edge_count()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self, g: &PlanarGraph) -> Value {
        let planes: serde_json::Map<String, Value> = self
            .planes
            .iter()
            .enumerate()
            .map(|(f, p)| (f.to_string(), json!({"n": [p.normal.x, p.normal.y, p.normal.z], "d": p.offset})))
            .collect();
        let points: serde_json::Map<String, Value> = g
            .darts()
            .map(|d| {
                let p = self.points[d];
                (format!("{}:{}", g.tail(d), g.dart_edge(d)), json!([p.x, p.y, p.z]))
            })
            .collect();
        json!({"planes": planes, "points": points})
    }

    pub fn from_json(g: &PlanarGraph, v: &Value) -> Result<Self> {
        let vec3 = |x: &Value| -> Result<V3> {
            let a: [f64; 3] = serde_json::from_value(x.clone())?;
            Ok(V3::from(a))
        };
        let planes_obj = v["planes"]
            .as_object()
            .ok_or_else(|| Error::Parse("configuration needs a \"planes\" object".into()))?;
        let mut planes = vec![None; g.face_count()];
        for (k, p) in planes_obj {
            let f: FaceId = k.parse().map_err(|_| Error::Parse(format!("bad face key {k:?}")))?;
            let slot = planes
                .get_mut(f)
                .ok_or_else(|| Error::Parse(format!("face {f} out of range")))?;
            let d = p["d"].as_f64().ok_or_else(|| Error::Parse(format!("plane {f} lacks \"d\"")))?;
            *slot = Some(Plane {
                normal: vec3(&p["n"])?,
                offset: d,
            });
        }
        let points_obj = v["points"]
            .as_object()
            .ok_or_else(|| Error::Parse("configuration needs a \"points\" object".into()))?;
        let mut points = vec![None; 2 * g.edge_count()];
        for (k, p) in points_obj {
            let (a, b) = k
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("point key {k:?} is not \"v:e\"")))?;
            let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad point key {k:?}")));
            let d = dart_of(g, parse(a)?, parse(b)?)?;
            points[d] = Some(vec3(p)?);
        }
        let planes = planes
            .into_iter()
            .enumerate()
            .map(|(f, p)| p.ok_or_else(|| Error::Parse(format!("missing plane for face {f}"))))
            .collect::<Result<_>>()?;
        let points = points
            .into_iter()
            .enumerate()
            .map(|(d, p)| p.ok_or_else(|| Error::Parse(format!("missing point {}:{}", g.tail(d), g.dart_edge(d)))))
            .collect::<Result<_>>()?;
        Ok(Configuration { planes, points })
    }
}

/// det of the 4×4 matrix with rows (p_i, 1).
pub fn coplanarity_det(p1: &V3, p2: &V3, p3: &V3, p4: &V3) -> f64 {
    -Matrix3::from_rows(&[(p2 - p1).transpose(), (p3 - p1).transpose(), (p4 - p1).transpose()]).determinant()
}

fn star_points(z: &Configuration, g: &PlanarGraph, v: VertexId) -> Vec<V3> {
    g.star(v).into_iter().map(|d| z.points[d]).collect()
}

fn collinear(a: &V3, b: &V3, c: &V3, guard: f64) -> bool {
    let scale = (b - a).norm().max((c - a).norm()).max(1.0);
    (b - a).cross(&(c - a)).norm() < guard * scale * scale
}

/// Determinants R(z(ve1), z(ve2), z(ve3), z(vej)) for j = 4..d(v).
pub fn vertex_residual(z: &Configuration, g: &PlanarGraph, v: VertexId) -> Result<Vec<f64>> {
    z.check_shape(g)?;
    let pts = star_points(z, g, v);
    if pts.len() < 3 {
        return Err(Error::Degenerate(format!("vertex {v} has degree {}", pts.len())));
    }
    if collinear(&pts[0], &pts[1], &pts[2], DEFAULT_GUARD_TOL) {
        return Err(Error::CollinearStar(v));
    }
    Ok(pts[3..]
        .iter()
        .map(|p| coplanarity_det(&pts[0], &pts[1], &pts[2], p))
        .collect())
}

/// Largest distance of a star point from the plane through the first three.
fn vertex_planarity(pts: &[V3]) -> f64 {
    let n = (pts[1] - pts[0]).cross(&(pts[2] - pts[0]));
    let len = n.norm();
    pts[3..]
        .iter()
        .map(|p| (coplanarity_det(&pts[0], &pts[1], &pts[2], p) / len).abs())
        .fold(0.0, f64::max)
}

/// Configuration of the truncated polyhedron read off a packing whose nerve
/// is the dual of `g`.
///
/// Tangent edges give z(v1 e) = z(v2 e). For crossing circles the point
/// further along n_L × n_R, with L and R the faces left and right of the dart
/// u→v of edge e, goes to the head v; that is the direction from u to v along
/// the edge line of the polyhedron.
pub fn config_from_packing(p: &Packing, g: &PlanarGraph) -> Result<Configuration> {
    let dual = g.dual();
    if p.circles.len() != g.face_count() || p.edges.len() != g.edge_count() {
        return Err(Error::Degenerate(format!(
            "packing with {} circles and {} edges does not fit a graph with {} faces and {} edges",
            p.circles.len(),
            p.edges.len(),
            g.face_count(),
            g.edge_count()
        )));
    }
    let planes: Vec<Plane> = p.circles.iter().map(Plane::from).collect();
    let mut points = vec![V3::zeros(); 2 * g.edge_count()];
    for e in 0..g.edge_count() {
        let es = dual.edge_map[e];
        let [l, r] = g.edge_faces(e);
        let mut want = [l, r];
        want.sort_unstable();
        let mut have = p.edges[es];
        have.sort_unstable();
        if want != have {
            return Err(Error::Degenerate(format!("packing edge {es} does not join faces {l} and {r}")));
        }
        let contacts = p.contacts.get(es).ok_or(Error::MissingContact(es))?;
        match contacts.as_slice() {
            [one] => {
                points[2 * e] = *one;
                points[2 * e + 1] = *one;
            }
            [a, b] => {
                let t = planes[l].normal.cross(&planes[r].normal);
                let (near_tail, near_head) = if t.dot(a) <= t.dot(b) { (a, b) } else { (b, a) };
                points[2 * e] = *near_tail;
                points[2 * e + 1] = *near_head;
            }
            _ => return Err(Error::MissingContact(es)),
        }
    }
    Ok(Configuration { planes, points })
}

#[derive(Debug, Clone, Copy)]
pub struct MembershipOptions {
    pub residual_tol: f64,
    pub guard_tol: f64,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        MembershipOptions {
            residual_tol: DEFAULT_RESIDUAL_TOL,
            guard_tol: DEFAULT_GUARD_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub in_z_fo: bool,
    pub in_z_oc: bool,
    pub in_z_p: bool,
    /// Edges whose two face planes are parallel.
    pub parallel_edges: Vec<EdgeId>,
    /// Face triples whose planes share more than one point.
    pub concurrent_triples: Vec<[FaceId; 3]>,
    /// Darts whose point is off one of the two planes of its edge.
    pub off_line_points: Vec<DartId>,
    pub collinear_stars: Vec<VertexId>,
    /// Vertices whose star points are not coplanar, with the deviation.
    pub noncoplanar_vertices: Vec<(VertexId, f64)>,
    pub incidence_residual: f64,
    pub planarity_residual: f64,
}

impl MembershipReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

pub fn check_membership(z: &Configuration, g: &PlanarGraph) -> Result<MembershipReport> {
    check_membership_with(z, g, &MembershipOptions::default())
}

pub fn check_membership_with(z: &Configuration, g: &PlanarGraph, opts: &MembershipOptions) -> Result<MembershipReport> {
    z.check_shape(g)?;
    let guard = opts.guard_tol;

    let parallel_edges: Vec<EdgeId> = (0..g.edge_count())
        .filter(|&e| {
            let [a, b] = g.edge_faces(e);
            z.planes[a].normal.cross(&z.planes[b].normal).norm() < guard
        })
        .collect();

    let mut concurrent_triples = Vec::new();
    let f = g.face_count();
    for a in 0..f {
        for b in a + 1..f {
            for c in b + 1..f {
                let [pa, pb, pc] = [&z.planes[a], &z.planes[b], &z.planes[c]];
                let n = Matrix3::from_rows(&[pa.normal.transpose(), pb.normal.transpose(), pc.normal.transpose()]);
                if n.determinant().abs() >= guard {
                    continue;
                }
                let aug = Matrix3x4::from_rows(&[
                    nalgebra::RowVector4::new(pa.normal.x, pa.normal.y, pa.normal.z, pa.offset),
                    nalgebra::RowVector4::new(pb.normal.x, pb.normal.y, pb.normal.z, pb.offset),
                    nalgebra::RowVector4::new(pc.normal.x, pc.normal.y, pc.normal.z, pc.offset),
                ]);
                let sv = aug.singular_values();
                if sv.min() < guard {
                    concurrent_triples.push([a, b, c]);
                }
            }
        }
    }

    let mut off_line_points = Vec::new();
    let mut incidence_residual: f64 = 0.0;
    for d in g.darts() {
        let [l, r] = g.edge_faces(g.dart_edge(d));
        let p = &z.points[d];
        let res = z.planes[l].signed_distance(p).abs().max(z.planes[r].signed_distance(p).abs());
        incidence_residual = incidence_residual.max(res);
        if res > opts.residual_tol {
            off_line_points.push(d);
        }
    }

    let mut collinear_stars = Vec::new();
    let mut noncoplanar_vertices = Vec::new();
    let mut planarity_residual: f64 = 0.0;
    for v in 0..g.vertex_count() {
        let pts = star_points(z, g, v);
        let k = pts.len();
        let mut bad = false;
        'triples: for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    if collinear(&pts[i], &pts[j], &pts[l], guard) {
                        bad = true;
                        break 'triples;
                    }
                }
            }
        }
        if bad {
            collinear_stars.push(v);
            continue;
        }
        if k > 3 {
            let dev = vertex_planarity(&pts);
            planarity_residual = planarity_residual.max(dev);
            if dev > opts.residual_tol {
                noncoplanar_vertices.push((v, dev));
            }
        }
    }

    let in_z_fo = parallel_edges.is_empty() && concurrent_triples.is_empty();
    let in_z_oc = in_z_fo && off_line_points.is_empty() && collinear_stars.is_empty();
    let in_z_p = in_z_oc && noncoplanar_vertices.is_empty();
    Ok(MembershipReport {
        in_z_fo,
        in_z_oc,
        in_z_p,
        parallel_edges,
        concurrent_triples,
        off_line_points,
        collinear_stars,
        noncoplanar_vertices,
        incidence_residual,
        planarity_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexCircle {
    pub circle: SphericalCircle,
    /// Exterior angle between the vertex circle and the circle of the face
    /// `dart_face(star[i])`, in star order.
    pub angles: Vec<f64>,
}

impl VertexCircle {
    pub fn max_deviation_from_right_angle(&self) -> f64 {
        self.angles
            .iter()
            .map(|a| (a - std::f64::consts::FRAC_PI_2).abs())
            .fold(0.0, f64::max)
    }
}

/// Circle through the points of the star of `v` and its angles with the
/// circles of the faces around `v`.
pub fn vertex_circle_orthogonality(z: &Configuration, g: &PlanarGraph, v: VertexId) -> Result<VertexCircle> {
    z.check_shape(g)?;
    let star = g.star(v);
    let pts: Vec<V3> = star.iter().map(|&d| z.points[d]).collect();
    let faces: Vec<SphericalCircle> = star
        .iter()
        .map(|&d| {
            let f = g.dart_face(d);
            z.planes[f]
                .circle()
                .ok_or_else(|| Error::Degenerate(format!("plane of face {f} misses the sphere")))
        })
        .collect::<Result<_>>()?;
    circle_orthogonality(&pts, &faces, v)
}

/// Same measurement on raw data: points on the sphere and the circles they
/// sit between.
pub fn circle_orthogonality(points: &[V3], faces: &[SphericalCircle], vertex: VertexId) -> Result<VertexCircle> {
    for p in points {
        let off = (p.norm() - 1.0).abs();
        if off > DEFAULT_RESIDUAL_TOL {
            return Err(Error::OffSphere(off));
        }
    }
    let (n, d) = fit_plane(points).ok_or(Error::CollinearStar(vertex))?;
    let deviation = points.iter().map(|p| (n.dot(p) - d).abs()).fold(0.0, f64::max);
    if deviation > DEFAULT_RESIDUAL_TOL {
        return Err(Error::NotCoplanar { vertex, deviation });
    }
    if d.abs() >= 1.0 {
        return Err(Error::Degenerate(format!("star of vertex {vertex} does not span a circle")));
    }
    let circle = SphericalCircle::new(n, d);
    let angles = faces.iter().map(|c| intersection_angle(&circle, c)).collect();
    Ok(VertexCircle { circle, angles })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub dim_z_oc: i64,
    pub dim_zp: i64,
    pub dim_teich: i64,
    pub identity_ok: bool,
}

pub fn dimension_report(g: &PlanarGraph) -> DimensionReport {
    let (v, e, f) = (g.vertex_count() as i64, g.edge_count() as i64, g.face_count() as i64);
    let dim_z_oc = 3 * f + 2 * e;
    let dim_zp = 3 * e + 6;
    let dim_teich = 2 * e - 3 * v;
    DimensionReport {
        dim_z_oc,
        dim_zp,
        dim_teich,
        identity_ok: dim_teich + dim_zp == dim_z_oc,
    }
}

/// Indexed view used by reports: (vertex, edge) → point.
pub fn points_by_incidence(z: &Configuration, g: &PlanarGraph) -> BTreeMap<(VertexId, EdgeId), V3> {
    g.darts().map(|d| ((g.tail(d), g.dart_edge(d)), z.points[d])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::packing::{solve_tangency_packing, PackingOptions};
    use approx::assert_abs_diff_eq;

    #[test]
    fn determinant_examples() {
        let o = V3::zeros();
        let (x, y, zz) = (V3::x(), V3::y(), V3::z());
        assert_eq!(coplanarity_det(&o, &x, &y, &(x + y)), 0.0);
        assert_abs_diff_eq!(coplanarity_det(&o, &x, &y, &zz).abs(), 1.0, epsilon = 1e-15);
        // hand expansion of the 4×4 determinant with rows (0,0,0,1), (1,0,0,1), ...
        assert_abs_diff_eq!(coplanarity_det(&o, &x, &y, &zz), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            coplanarity_det(&x, &o, &y, &zz),
            -coplanarity_det(&o, &x, &y, &zz),
            epsilon = 1e-15
        );
    }

    #[test]
    fn trivalent_vertices_have_empty_residuals() {
        let g = fixtures::cube();
        let p = solve_tangency_packing(&g.dual().graph, &PackingOptions::default()).unwrap();
        let z = config_from_packing(&p, &g).unwrap();
        for v in 0..8 {
            assert!(vertex_residual(&z, &g, v).unwrap().is_empty());
        }
    }

    #[test]
    fn dimension_examples() {
        let cube = dimension_report(&fixtures::cube());
        assert_eq!((cube.dim_zp, cube.dim_teich, cube.dim_z_oc), (42, 0, 42));
        let dodeca = dimension_report(&fixtures::dodecahedron());
        assert_eq!((dodeca.dim_zp, dodeca.dim_teich, dodeca.dim_z_oc), (96, 0, 96));
        let icosa = dimension_report(&fixtures::icosahedron());
        assert_eq!((icosa.dim_zp, icosa.dim_teich, icosa.dim_z_oc), (96, 24, 120));
        assert!(cube.identity_ok && dodeca.identity_ok && icosa.identity_ok);
    }

    #[test]
    fn json_round_trip() {
        let g = fixtures::cube();
        let p = solve_tangency_packing(&g.dual().graph, &PackingOptions::default()).unwrap();
        let z = config_from_packing(&p, &g).unwrap();
        let back = Configuration::from_json(&g, &z.to_json(&g)).unwrap();
        assert_eq!(back, z);
        let mut broken = z.to_json(&g);
        broken["points"].as_object_mut().unwrap().remove("0:0");
        assert!(Configuration::from_json(&g, &broken).is_err());
    }

    #[test]
    fn parallel_adjacent_planes_leave_z_fo() {
        let g = fixtures::cube();
        let p = solve_tangency_packing(&g.dual().graph, &PackingOptions::default()).unwrap();
        let mut z = config_from_packing(&p, &g).unwrap();
        let [a, b] = g.edge_faces(0);
        z.planes[b] = Plane::new(z.planes[a].normal, z.planes[a].offset - 0.1);
        let report = check_membership(&z, &g).unwrap();
        assert!(!report.in_z_fo);
        assert!(report.parallel_edges.contains(&0));
    }

    #[test]
    fn three_planes_through_a_line_are_caught() {
        let g = fixtures::cube();
        let p = solve_tangency_packing(&g.dual().graph, &PackingOptions::default()).unwrap();
        let mut z = config_from_packing(&p, &g).unwrap();
        // put face 2 through the line of faces 0 and 1
        let n = (z.planes[0].normal + z.planes[1].normal).normalize();
        let d = (z.planes[0].offset + z.planes[1].offset) / (z.planes[0].normal + z.planes[1].normal).norm();
        z.planes[2] = Plane::new(n, d);
        let report = check_membership(&z, &g).unwrap();
        assert!(report.concurrent_triples.contains(&[0, 1, 2]));
        assert!(!report.in_z_fo);
    }
}
