//! Circles on the unit sphere, stereographic projection and Möbius maps.
//!
//! A circle is the oriented plane `n . x = d` cut with the sphere; its cap is
//! `n . x >= d`. Möbius maps are stored as Lorentz matrices acting on
//! `(t, x, y, z)`: a point `x` is the null vector `(1, x)` and a circle is
//! the spacelike vector `(d, n)`.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector2, Vector3, Vector4};
use num::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type V3 = Vector3<f64>;
type C = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalCircle {
    #[serde(rename = "n")]
    pub normal: V3,
    #[serde(rename = "d")]
    pub offset: f64,
}

impl SphericalCircle {
    /// Normalizes `normal`; `offset` is divided by the same factor.
    pub fn new(normal: V3, offset: f64) -> Self {
        let s = normal.norm();
        SphericalCircle {
            normal: normal / s,
            offset: offset / s,
        }
    }

    pub fn from_center_radius(center: V3, radius: f64) -> Self {
        SphericalCircle {
            normal: center.normalize(),
            offset: radius.cos(),
        }
    }

    /// Angular radius.
    pub fn radius(&self) -> f64 {
        self.offset.clamp(-1.0, 1.0).acos()
    }

    pub fn center(&self) -> V3 {
        self.normal
    }

    pub fn contains(&self, x: &V3) -> bool {
        self.normal.dot(x) >= self.offset
    }

    /// Signed distance of `x` from the plane.
    pub fn plane_distance(&self, x: &V3) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

/// Spherical distance between unit vectors.
pub fn spherical_distance(a: &V3, b: &V3) -> f64 {
    // atan2 keeps precision near 0 and pi
    a.cross(b).norm().atan2(a.dot(b))
}

/// Exterior intersection angle: 0 for externally tangent circles, pi/2 for
/// orthogonal ones. NaN when the circles neither meet nor touch.
pub fn intersection_angle(a: &SphericalCircle, b: &SphericalCircle) -> f64 {
    let (ra, rb) = (a.radius(), b.radius());
    let cos = (a.offset * b.offset - a.normal.dot(&b.normal)) / (ra.sin() * rb.sin());
    if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&cos) {
        return f64::NAN;
    }
    cos.clamp(-1.0, 1.0).acos()
}

/// Spherical distance between centres of two circles meeting at exterior
/// angle `theta`.
pub fn center_distance(ra: f64, rb: f64, theta: f64) -> f64 {
    (ra.cos() * rb.cos() - ra.sin() * rb.sin() * theta.cos())
        .clamp(-1.0, 1.0)
        .acos()
}

/// Point where the two caps touch. For tangent circles the sum of their
/// Lorentz vectors is null and points at it; for nearly tangent ones this is
/// still the point on the arc between centres at ratio of radii.
pub fn tangency_point(a: &SphericalCircle, b: &SphericalCircle) -> V3 {
    let (sa, sb) = ((1.0 - a.offset * a.offset).sqrt(), (1.0 - b.offset * b.offset).sqrt());
    let v = a.normal / sa + b.normal / sb;
    let w = a.offset / sa + b.offset / sb;
    v.normalize() * w.signum()
}

/// The two points where the circles cross, ordered along `a.n x b.n`
/// (the second has the larger projection).
pub fn crossing_points(a: &SphericalCircle, b: &SphericalCircle) -> Option<[V3; 2]> {
    let (n1, n2) = (a.normal, b.normal);
    let c = n1.dot(&n2);
    let det = 1.0 - c * c;
    if det <= 1e-15 {
        return None;
    }
    let alpha = (a.offset - b.offset * c) / det;
    let beta = (b.offset - a.offset * c) / det;
    let base = alpha * n1 + beta * n2;
    let rest = 1.0 - base.norm_squared();
    if rest < 0.0 {
        return None;
    }
    let dir = n1.cross(&n2);
    let t = (rest / dir.norm_squared()).sqrt();
    Some([base - t * dir, base + t * dir])
}

/// Stereographic projection from the north pole onto the plane z = 0.
pub fn stereographic(x: &V3) -> Vector2<f64> {
    Vector2::new(x.x, x.y) / (1.0 - x.z)
}

pub fn inverse_stereographic(p: &Vector2<f64>) -> V3 {
    let s = p.norm_squared();
    V3::new(2.0 * p.x, 2.0 * p.y, s - 1.0) / (s + 1.0)
}

/// Image of the planar disk `|p - c| < r` under inverse stereographic
/// projection, as a cap.
pub fn circle_from_planar(c: &Vector2<f64>, r: f64) -> SphericalCircle {
    let k = c.norm_squared() - r * r;
    SphericalCircle::new(V3::new(2.0 * c.x, 2.0 * c.y, k - 1.0), 1.0 + k)
}

/// Plane fitted through points (exact for three, least squares otherwise).
/// The normal is oriented away from the origin side when possible.
pub fn fit_plane(points: &[V3]) -> Option<(V3, f64)> {
    if points.len() < 3 {
        return None;
    }
    let c = points.iter().sum::<V3>() / points.len() as f64;
    // SVD of the centred points, not the covariance, which squares the spread
    let rows = nalgebra::DMatrix::from_fn(points.len(), 3, |r, k| points[r][k] - c[k]);
    let svd = rows.svd(false, true);
    let v_t = svd.v_t?;
    let (i, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    let mut n = V3::new(v_t[(i, 0)], v_t[(i, 1)], v_t[(i, 2)]);
    if n.norm() < 0.5 {
        return None;
    }
    n.normalize_mut();
    if n.dot(&c) < 0.0 {
        n = -n;
    }
    Some((n, n.dot(&c)))
}

/// Homogeneous spinor of a sphere point (its stereographic coordinate is
/// `s[0] / s[1]`).
fn spinor(x: &V3) -> [C; 2] {
    let a = [C::new(x.x, x.y), C::new(1.0 - x.z, 0.0)];
    let b = [C::new(1.0 + x.z, 0.0), C::new(x.x, -x.y)];
    if a[0].norm_sqr() + a[1].norm_sqr() >= b[0].norm_sqr() + b[1].norm_sqr() {
        a
    } else {
        b
    }
}

fn bracket(p: &[C; 2], q: &[C; 2]) -> C {
    p[0] * q[1] - p[1] * q[0]
}

/// Möbius transformation of the sphere as a proper orthochronous Lorentz map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub lorentz: Matrix4<f64>,
}

impl Default for Mobius {
    fn default() -> Self {
        Mobius::identity()
    }
}

impl Mobius {
    pub fn identity() -> Self {
        Mobius {
            lorentz: Matrix4::identity(),
        }
    }

    /// Boost with rapidity `|b|` along `b / |b|`; it pushes points away from
    /// `b / |b|`.
    pub fn boost(b: &V3) -> Self {
        let phi = b.norm();
        if phi < 1e-300 {
            return Mobius::identity();
        }
        let u = b / phi;
        let (ch, sh) = (phi.cosh(), phi.sinh());
        let mut l = Matrix4::identity();
        l[(0, 0)] = ch;
        for i in 0..3 {
            l[(0, i + 1)] = -sh * u[i];
            l[(i + 1, 0)] = -sh * u[i];
            for j in 0..3 {
                l[(i + 1, j + 1)] += (ch - 1.0) * u[i] * u[j];
            }
        }
        Mobius { lorentz: l }
    }

    pub fn rotation(r: &Matrix3<f64>) -> Self {
        let mut l = Matrix4::identity();
        l.fixed_view_mut::<3, 3>(1, 1).copy_from(r);
        Mobius { lorentz: l }
    }

    /// From a matrix of SL(2, C) acting on spinors.
    pub fn from_sl2(a: &Matrix2<C>) -> Self {
        let i = C::new(0.0, 1.0);
        let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
        let basis = [
            Matrix2::new(o, z, z, o),
            Matrix2::new(z, o, o, z),
            Matrix2::new(z, i, -i, z),
            Matrix2::new(o, z, z, -o),
        ];
        let ah = a.adjoint();
        let mut l = Matrix4::zeros();
        for (j, e) in basis.iter().enumerate() {
            let h = a * e * ah;
            l[(0, j)] = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
            l[(1, j)] = h[(0, 1)].re;
            l[(2, j)] = h[(0, 1)].im;
            l[(3, j)] = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
        }
        Mobius { lorentz: l }
    }

    /// The unique Möbius map sending `from[i]` to `to[i]`.
    pub fn three_point(from: &[V3; 3], to: &[V3; 3]) -> Result<Self> {
        let to_frame = |pts: &[V3; 3]| -> Result<Matrix2<C>> {
            let s: Vec<[C; 2]> = pts.iter().map(spinor).collect();
            for (i, j) in [(0, 1), (1, 2), (0, 2)] {
                if (pts[i] - pts[j]).norm() < 1e-9 {
                    return Err(Error::InvalidMark(format!("points {i} and {j} coincide")));
                }
            }
            // sends pts[0] -> 0, pts[2] -> infinity, pts[1] -> 1
            let c1 = bracket(&s[1], &s[2]);
            let c2 = bracket(&s[1], &s[0]);
            Ok(Matrix2::new(
                c1 * s[0][1],
                -c1 * s[0][0],
                c2 * s[2][1],
                -c2 * s[2][0],
            ))
        };
        let ma = to_frame(from)?;
        let mb = to_frame(to)?;
        let mb_inv = mb
            .try_inverse()
            .ok_or_else(|| Error::InvalidMark("singular target frame".into()))?;
        let mut m = mb_inv * ma;
        let det = m.determinant();
        if det.norm() < 1e-300 {
            return Err(Error::InvalidMark("singular transformation".into()));
        }
        m /= det.sqrt();
        Ok(Mobius::from_sl2(&m))
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            lorentz: self.lorentz * other.lorentz,
        }
    }

    pub fn inverse(&self) -> Mobius {
        // L^{-1} = J L^T J with J = diag(-1, 1, 1, 1)
        let j = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
        Mobius {
            lorentz: j * self.lorentz.transpose() * j,
        }
    }

    pub fn apply_point(&self, x: &V3) -> V3 {
        let y = self.lorentz * Vector4::new(1.0, x.x, x.y, x.z);
        let p = V3::new(y[1], y[2], y[3]) / y[0];
        p.normalize()
    }

    pub fn apply_circle(&self, c: &SphericalCircle) -> SphericalCircle {
        let y = self.lorentz * Vector4::new(c.offset, c.normal.x, c.normal.y, c.normal.z);
        SphericalCircle::new(V3::new(y[1], y[2], y[3]), y[0])
    }

    /// Distance from identity, for tests.
    pub fn deviation_from_identity(&self) -> f64 {
        (self.lorentz - Matrix4::identity()).amax()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn unit(x: f64, y: f64, z: f64) -> V3 {
        V3::new(x, y, z).normalize()
    }

    #[test]
    fn stereographic_round_trip() {
        let x = unit(0.3, -0.5, 0.2);
        assert_relative_eq!(inverse_stereographic(&stereographic(&x)), x, epsilon = 1e-14);
    }

    #[test]
    fn planar_circle_maps_to_cap() {
        let c = Vector2::new(0.7, -0.2);
        let r = 0.4;
        let cap = circle_from_planar(&c, r);
        for k in 0..8 {
            let t = k as f64;
            let p = c + r * Vector2::new(t.cos(), t.sin());
            assert!(cap.plane_distance(&inverse_stereographic(&p)).abs() < 1e-14);
        }
        assert!(cap.contains(&inverse_stereographic(&c)));
    }

    #[test]
    fn angles_of_axis_circles() {
        let a = SphericalCircle::from_center_radius(V3::x(), FRAC_PI_4);
        let b = SphericalCircle::from_center_radius(V3::y(), FRAC_PI_4);
        assert!(intersection_angle(&a, &b).abs() < 1e-7);
        let p = tangency_point(&a, &b);
        assert_relative_eq!(p, unit(1.0, 1.0, 0.0), epsilon = 1e-14);
        let g1 = SphericalCircle::from_center_radius(V3::x(), FRAC_PI_2);
        let g2 = SphericalCircle::from_center_radius(V3::y(), FRAC_PI_2);
        assert_relative_eq!(intersection_angle(&g1, &g2), FRAC_PI_2, epsilon = 1e-14);
        assert_relative_eq!(center_distance(FRAC_PI_4, FRAC_PI_4, 0.0), FRAC_PI_2, epsilon = 1e-14);
    }

    #[test]
    fn crossing_points_lie_on_both() {
        let a = SphericalCircle::from_center_radius(V3::x(), 1.0);
        let b = SphericalCircle::from_center_radius(unit(1.0, 1.0, 0.2), 0.8);
        let [p, q] = crossing_points(&a, &b).unwrap();
        for x in [p, q] {
            assert!((x.norm() - 1.0).abs() < 1e-14);
            assert!(a.plane_distance(&x).abs() < 1e-14);
            assert!(b.plane_distance(&x).abs() < 1e-14);
        }
        let dir = a.normal.cross(&b.normal);
        assert!(q.dot(&dir) > p.dot(&dir));
    }

    #[test]
    fn three_point_map_hits_targets() {
        let from = [unit(1.0, 0.2, 0.1), unit(-0.3, 1.0, 0.4), unit(0.1, -0.2, -1.0)];
        let to = [V3::x(), V3::y(), V3::z()];
        let m = Mobius::three_point(&from, &to).unwrap();
        for i in 0..3 {
            assert_relative_eq!(m.apply_point(&from[i]), to[i], epsilon = 1e-12);
        }
        let id = Mobius::three_point(&from, &from).unwrap();
        assert!(id.deviation_from_identity() < 1e-12);
        assert!(Mobius::three_point(&[V3::x(), V3::x(), V3::y()], &to).is_err());
    }

    #[test]
    fn mobius_preserves_incidence_and_angles() {
        let m = Mobius::boost(&V3::new(0.3, -0.7, 0.2)).compose(&Mobius::three_point(
            &[V3::x(), V3::y(), V3::z()],
            &[unit(1.0, 1.0, 0.0), -V3::z(), unit(0.0, 1.0, 1.0)],
        )
        .unwrap());
        let a = SphericalCircle::from_center_radius(unit(1.0, 0.1, 0.0), 0.9);
        let b = SphericalCircle::from_center_radius(unit(0.0, 1.0, 0.3), 0.7);
        let before = intersection_angle(&a, &b);
        let (ma, mb) = (m.apply_circle(&a), m.apply_circle(&b));
        assert_relative_eq!(intersection_angle(&ma, &mb), before, epsilon = 1e-10);
        for p in crossing_points(&a, &b).unwrap() {
            let q = m.apply_point(&p);
            assert!(ma.plane_distance(&q).abs() < 1e-12);
            assert!(mb.plane_distance(&q).abs() < 1e-12);
        }
        // caps keep their side
        let inside = a.normal;
        assert!(ma.contains(&m.apply_point(&inside)));
        let back = m.inverse().compose(&m);
        assert!(back.deviation_from_identity() < 1e-10);
    }

    #[test]
    fn boost_moves_points_away() {
        let m = Mobius::boost(&V3::new(0.0, 0.0, 1.0));
        let p = m.apply_point(&V3::x());
        assert!(p.z < 0.0);
        assert_relative_eq!(m.apply_point(&V3::z()), V3::z(), epsilon = 1e-14);
        let _ = PI;
    }

    #[test]
    fn plane_fit() {
        let pts = [V3::new(1.0, 0.0, 0.5), V3::new(0.0, 1.0, 0.5), V3::new(-1.0, 0.0, 0.5)];
        let (n, d) = fit_plane(&pts).unwrap();
        assert_relative_eq!(n, V3::z(), epsilon = 1e-12);
        assert_relative_eq!(d, 0.5, epsilon = 1e-12);
    }
}
