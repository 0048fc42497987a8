//! Star-shaped surfaces ρ(u)·u with ρ = 1 + ε·h, h a combination of real
//! spherical harmonics of degree at most 3.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::sphere::V3;

pub const DEFAULT_BUMP_JSON: &str = include_str!("../config/default_bump.json");
pub const DEFAULT_C3_GRID: (usize, usize) = (256, 512);
pub const DEFAULT_CONVEXITY_GRID: (usize, usize) = (64, 128);

/// Truncated Taylor polynomial in two variables up to total degree 3.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Jet([f64; 10]);

const JET_INDEX: [(usize, usize); 10] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];

fn jet_slot(a: usize, b: usize) -> Option<usize> {
    JET_INDEX.iter().position(|&x| x == (a, b))
}

impl Jet {
    fn constant(c: f64) -> Self {
        let mut j = [0.0; 10];
        j[0] = c;
        Jet(j)
    }

    /// f(x0 + t) for f = sin or cos along one of the two variables.
    fn trig(x0: f64, cosine: bool, second: bool) -> Self {
        let (s, c) = x0.sin_cos();
        let series = if cosine { [c, -s, -c / 2.0, s / 6.0] } else { [s, c, -s / 2.0, -c / 6.0] };
        let mut j = [0.0; 10];
        for (k, v) in series.iter().enumerate() {
            let slot = if second { jet_slot(0, k) } else { jet_slot(k, 0) };
            j[slot.unwrap()] = *v;
        }
        Jet(j)
    }

    fn add(&self, o: &Jet) -> Jet {
        let mut j = self.0;
        for (a, b) in j.iter_mut().zip(o.0) {
            *a += b;
        }
        Jet(j)
    }

    fn scale(&self, s: f64) -> Jet {
        Jet(self.0.map(|x| x * s))
    }

    fn mul(&self, o: &Jet) -> Jet {
        let mut out = [0.0; 10];
        for (i, &(a1, b1)) in JET_INDEX.iter().enumerate() {
            if self.0[i] == 0.0 {
                continue;
            }
            for (j, &(a2, b2)) in JET_INDEX.iter().enumerate() {
                if a1 + a2 + b1 + b2 <= 3 {
                    out[jet_slot(a1 + a2, b1 + b2).unwrap()] += self.0[i] * o.0[j];
                }
            }
        }
        Jet(out)
    }

    /// ∂^a_θ ∂^b_φ at the base point.
    fn derivative(&self, a: usize, b: usize) -> f64 {
        let fact = |n: usize| (1..=n).product::<usize>() as f64;
        self.0[jet_slot(a, b).unwrap()] * fact(a) * fact(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub l: u8,
    pub m: i8,
    #[serde(rename = "c")]
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    #[serde(default = "custom_name")]
    pub name: String,
    /// Rescale so that the sampled C³ norm of h·u is 1.
    #[serde(default)]
    pub normalize: bool,
    pub terms: Vec<HarmonicTerm>,
}

fn custom_name() -> String {
    "custom".into()
}

type Monomial = ([u8; 3], f64);

/// Real solid harmonic of degree `l` and order `m` as monomials in x, y, z.
fn harmonic(l: u8, m: i8) -> Option<Vec<Monomial>> {
    let t = |e: [u8; 3], c: f64| (e, c);
    let terms = match (l, m) {
        (0, 0) => vec![t([0, 0, 0], 1.0)],
        (1, -1) => vec![t([0, 1, 0], 1.0)],
        (1, 0) => vec![t([0, 0, 1], 1.0)],
        (1, 1) => vec![t([1, 0, 0], 1.0)],
        (2, -2) => vec![t([1, 1, 0], 1.0)],
        (2, -1) => vec![t([0, 1, 1], 1.0)],
        (2, 0) => vec![t([0, 0, 2], 2.0), t([2, 0, 0], -1.0), t([0, 2, 0], -1.0)],
        (2, 1) => vec![t([1, 0, 1], 1.0)],
        (2, 2) => vec![t([2, 0, 0], 1.0), t([0, 2, 0], -1.0)],
        (3, -3) => vec![t([2, 1, 0], 3.0), t([0, 3, 0], -1.0)],
        (3, -2) => vec![t([1, 1, 1], 1.0)],
        (3, -1) => vec![t([0, 1, 2], 4.0), t([2, 1, 0], -1.0), t([0, 3, 0], -1.0)],
        (3, 0) => vec![t([0, 0, 3], 2.0), t([2, 0, 1], -3.0), t([0, 2, 1], -3.0)],
        (3, 1) => vec![t([1, 0, 2], 4.0), t([3, 0, 0], -1.0), t([1, 2, 0], -1.0)],
        (3, 2) => vec![t([2, 0, 1], 1.0), t([0, 2, 1], -1.0)],
        (3, 3) => vec![t([3, 0, 0], 1.0), t([1, 2, 0], -3.0)],
        _ => return None,
    };
    Some(terms)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub spec: BumpSpec,
    poly: Vec<Monomial>,
    /// Sampled C³ norm of h·u on the default grid, after scaling.
    c3_norm: f64,
}

impl Bump {
    pub fn from_spec(spec: BumpSpec) -> Result<Self> {
        let mut poly: Vec<Monomial> = Vec::new();
        for term in &spec.terms {
            if !term.coefficient.is_finite() {
                return Err(Error::Parse(format!("non-finite coefficient for l={} m={}", term.l, term.m)));
            }
            let h = harmonic(term.l, term.m).ok_or_else(|| {
                Error::Parse(format!("unsupported harmonic l={} m={} (need l <= 3, |m| <= l)", term.l, term.m))
            })?;
            for (e, c) in h {
                match poly.iter_mut().find(|(pe, _)| *pe == e) {
                    Some(slot) => slot.1 += c * term.coefficient,
                    None => poly.push((e, c * term.coefficient)),
                }
            }
        }
        let mut bump = Bump {
            spec,
            poly,
            c3_norm: 0.0,
        };
        let norm = bump.c3_norm_on(DEFAULT_C3_GRID.0, DEFAULT_C3_GRID.1);
        if bump.spec.normalize {
            if norm == 0.0 {
                return Err(Error::Parse("cannot normalize a zero bump".into()));
            }
            for m in &mut bump.poly {
                m.1 /= norm;
            }
            bump.c3_norm = 1.0;
        } else {
            bump.c3_norm = norm;
        }
        Ok(bump)
    }

    pub fn default_bump() -> Self {
        static DEFAULT: OnceLock<Bump> = OnceLock::new();
        DEFAULT
            .get_or_init(|| {
                Bump::from_json(&serde_json::from_str(DEFAULT_BUMP_JSON).expect("bundled bump config parses"))
                    .expect("bundled bump config is valid")
            })
            .clone()
    }

    pub fn zero() -> Self {
        Bump::from_spec(BumpSpec {
            name: "zero".into(),
            normalize: false,
            terms: Vec::new(),
        })
        .expect("zero bump")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        Bump::from_spec(serde_json::from_value(v.clone())?)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(&self.spec).expect("bump spec serializes")
    }

    /// h at a unit vector.
    pub fn value(&self, u: &V3) -> f64 {
        self.poly
            .iter()
            .map(|([a, b, c], k)| k * u.x.powi(*a as i32) * u.y.powi(*b as i32) * u.z.powi(*c as i32))
            .sum()
    }

    fn value_jet(&self, u: &[Jet; 3]) -> Jet {
        let powers = |x: &Jet| {
            let mut p = vec![Jet::constant(1.0)];
            for k in 1..=3 {
                p.push(p[k - 1].mul(x));
            }
            p
        };
        let (px, py, pz) = (powers(&u[0]), powers(&u[1]), powers(&u[2]));
        self.poly.iter().fold(Jet::constant(0.0), |acc, ([a, b, c], k)| {
            let m = px[*a as usize].mul(&py[*b as usize]).mul(&pz[*c as usize]);
            acc.add(&m.scale(*k))
        })
    }

    /// Sup over the grid of all θ/φ-derivatives of order ≤ 3 of the
    /// coordinates of h·u.
    fn c3_norm_on(&self, n_theta: usize, n_phi: usize) -> f64 {
        if self.poly.iter().all(|m| m.1 == 0.0) {
            return 0.0;
        }
        let mut sup: f64 = 0.0;
        for (theta, phi) in grid(n_theta, n_phi) {
            let u = unit_jets(theta, phi);
            let h = self.value_jet(&u);
            for ui in &u {
                let g = h.mul(ui);
                for &(a, b) in &JET_INDEX {
                    sup = sup.max(g.derivative(a, b).abs());
                }
            }
        }
        sup
    }
}

fn grid(n_theta: usize, n_phi: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..n_theta).flat_map(move |i| {
        let theta = PI * (i as f64 + 0.5) / n_theta as f64;
        (0..n_phi).map(move |j| (theta, TAU * j as f64 / n_phi as f64))
    })
}

/// Jets of (sinθ cosφ, sinθ sinφ, cosθ).
fn unit_jets(theta: f64, phi: f64) -> [Jet; 3] {
    let st = Jet::trig(theta, false, false);
    let ct = Jet::trig(theta, true, false);
    let sp = Jet::trig(phi, false, true);
    let cp = Jet::trig(phi, true, true);
    [st.mul(&cp), st.mul(&sp), ct]
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSurface {
    pub epsilon: f64,
    pub bump: Bump,
}

impl RadialSurface {
    pub fn new(bump: Bump, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::OutOfRange(format!("epsilon must be finite and >= 0, got {epsilon}")));
        }
        Ok(RadialSurface { epsilon, bump })
    }

    pub fn sphere() -> Self {
        RadialSurface {
            epsilon: 0.0,
            bump: Bump::zero(),
        }
    }

    pub fn rho(&self, u: &V3) -> f64 {
        if self.epsilon == 0.0 {
            1.0
        } else {
            1.0 + self.epsilon * self.bump.value(u)
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({"epsilon": self.epsilon, "bump": self.bump.to_json()})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let eps = v["epsilon"]
            .as_f64()
            .ok_or_else(|| Error::Parse("surface needs \"epsilon\"".into()))?;
        RadialSurface::new(Bump::from_json(&v["bump"])?, eps)
    }
}

/// ρ(u)·u for the direction of `direction`.
pub fn surface_point(k: &RadialSurface, direction: &V3) -> Result<V3> {
    let len = direction.norm();
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::Degenerate("zero direction".into()));
    }
    let u = direction / len;
    Ok(k.rho(&u) * u)
}

/// Radial projection onto the surface.
pub fn project_to_surface(k: &RadialSurface, x: &V3) -> Result<V3> {
    surface_point(k, x)
}

/// Distance of `x` from the surface along its ray.
pub fn onsurface_residual(k: &RadialSurface, x: &V3) -> f64 {
    let len = x.norm();
    if len == 0.0 {
        return f64::INFINITY;
    }
    (len - k.rho(&(x / len))).abs()
}

/// Surface with radial function 1 + s·ε·h.
pub fn homotopy_surface(k: &RadialSurface, s: f64) -> Result<RadialSurface> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange(format!("homotopy parameter {s} outside [0, 1]")));
    }
    RadialSurface::new(k.bump.clone(), s * k.epsilon)
}

pub fn c3_distance_estimate(k: &RadialSurface) -> f64 {
    k.epsilon * k.bump.c3_norm
}

pub fn c3_distance_estimate_on(k: &RadialSurface, n_theta: usize, n_phi: usize) -> f64 {
    if k.epsilon == 0.0 {
        return 0.0;
    }
    k.epsilon * k.bump.c3_norm_on(n_theta, n_phi)
}

/// Smallest principal curvature over a grid, with the outward normal.
pub fn min_principal_curvature(k: &RadialSurface, n_theta: usize, n_phi: usize) -> f64 {
    let mut worst = f64::INFINITY;
    for (theta, phi) in grid(n_theta, n_phi) {
        let u = unit_jets(theta, phi);
        let rho = if k.epsilon == 0.0 {
            Jet::constant(1.0)
        } else {
            Jet::constant(1.0).add(&k.bump.value_jet(&u).scale(k.epsilon))
        };
        let x: Vec<Jet> = u.iter().map(|ui| rho.mul(ui)).collect();
        let d = |a: usize, b: usize| V3::new(x[0].derivative(a, b), x[1].derivative(a, b), x[2].derivative(a, b));
        let (xt, xp) = (d(1, 0), d(0, 1));
        let mut n = xt.cross(&xp).normalize();
        if n.dot(&d(0, 0)) < 0.0 {
            n = -n;
        }
        let first = nalgebra::Matrix2::new(xt.dot(&xt), xt.dot(&xp), xt.dot(&xp), xp.dot(&xp));
        let second = nalgebra::Matrix2::new(
            -d(2, 0).dot(&n),
            -d(1, 1).dot(&n),
            -d(1, 1).dot(&n),
            -d(0, 2).dot(&n),
        );
        let Some(chol) = first.cholesky() else { continue };
        let Some(linv) = chol.l().try_inverse() else { continue };
        let sym = linv * second * linv.transpose();
        worst = worst.min(sym.symmetric_eigen().eigenvalues.min());
    }
    worst
}

/// Minimum of ρ and of the principal curvatures on the default grid; errors
/// if the surface is not strictly convex there.
pub fn check_convex(k: &RadialSurface) -> Result<f64> {
    let (nt, np) = DEFAULT_CONVEXITY_GRID;
    let min_rho = grid(nt, np)
        .map(|(t, p)| k.rho(&V3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos())))
        .fold(f64::INFINITY, f64::min);
    if min_rho <= 0.0 {
        return Err(Error::OutOfRange(format!("radial function reaches {min_rho}")));
    }
    let kappa = min_principal_curvature(k, nt, np);
    if kappa <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "surface with epsilon {} is not strictly convex (curvature {kappa})",
            k.epsilon
        )));
    }
    Ok(kappa)
}
