//! Ambient spaces, domains and ball volumes.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::param::gasket_hausdorff_dimension;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SpaceKind {
    Euclidean { d: usize },
    /// `H^{2n+1}` with coordinates `(x_1..x_n, y_1..y_n, A)`.
    Heisenberg { n: usize },
    /// Pre-fractal gasket graph of level `m` in the unit triangle.
    Gasket { m: u32 },
}

/// Ambient space plus the diffusion generator `(σ²/2)·Δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub kind: SpaceKind,
    /// σ² in the generator `(σ²/2)·Δ`.
    #[serde(default = "default_generator_scale")]
    pub generator_scale: f64,
}

fn default_generator_scale() -> f64 {
    1.0
}

impl SpaceSpec {
    pub fn euclidean(d: usize) -> Self {
        Self {
            kind: SpaceKind::Euclidean { d },
            generator_scale: 1.0,
        }
    }

    pub fn heisenberg(n: usize) -> Self {
        Self {
            kind: SpaceKind::Heisenberg { n },
            generator_scale: 1.0,
        }
    }

    pub fn gasket(m: u32) -> Self {
        Self {
            kind: SpaceKind::Gasket { m },
            generator_scale: 1.0,
        }
    }

    pub fn with_generator_scale(mut self, sigma2: f64) -> Self {
        self.generator_scale = sigma2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.generator_scale > 0.0 && self.generator_scale.is_finite()) {
            return Err(Error::Precondition(format!(
                "generator_scale = {} must be positive",
                self.generator_scale
            )));
        }
        match self.kind {
            SpaceKind::Euclidean { d } if d == 0 => {
                Err(Error::Precondition("euclidean dimension d must be >= 1".into()))
            }
            SpaceKind::Heisenberg { n } if n == 0 => {
                Err(Error::Precondition("heisenberg n must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Homogeneous (volume-growth) dimension α.
    pub fn alpha(&self) -> f64 {
        match self.kind {
            SpaceKind::Euclidean { d } => d as f64,
            SpaceKind::Heisenberg { n } => (2 * n + 2) as f64,
            SpaceKind::Gasket { .. } => gasket_hausdorff_dimension(),
        }
    }

    /// Length of a coordinate vector in this space.
    pub fn coordinate_dim(&self) -> usize {
        match self.kind {
            SpaceKind::Euclidean { d } => d,
            SpaceKind::Heisenberg { n } => 2 * n + 1,
            SpaceKind::Gasket { .. } => 2,
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self.kind {
            SpaceKind::Euclidean { d } => format!("euclidean(d={d})"),
            SpaceKind::Heisenberg { n } => format!("heisenberg(n={n})"),
            SpaceKind::Gasket { m } => format!("gasket(m={m})"),
        }
    }

    /// Measure of a ball of radius `r`.
    ///
    /// Euclidean balls use `ω_d r^d`; Korányi balls use `κ_n r^{2n+2}` with
    /// the Lebesgue volume `κ_n` of the unit Korányi ball; gasket balls count
    /// level cells, `3^{-k}` with `k = ⌈log₂(1/r)⌉`, exact for dyadic `r`.
    pub fn volume(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("ball radius must be positive, got {r}")));
        }
        Ok(match self.kind {
            SpaceKind::Euclidean { d } => unit_ball_volume(d) * r.powi(d as i32),
            SpaceKind::Heisenberg { n } => koranyi_unit_volume(n) * r.powi((2 * n + 2) as i32),
            SpaceKind::Gasket { .. } => {
                let x = (1.0 / r).log2();
                let k = if (x - x.round()).abs() < 1e-9 {
                    x.round()
                } else {
                    x.ceil()
                };
                3f64.powf(-k)
            }
        })
    }
}

/// `ω_d = π^{d/2} / Γ(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    PI.powf(h) / libm::tgamma(h + 1.0)
}

/// Surface measure of the unit sphere `S^{d-1}`.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

const KORANYI_SAMPLES: usize = 1 << 21;

/// Lebesgue volume of the unit Korányi ball in `H^{2n+1}`, computed once per
/// `n` by seeded Monte Carlo quadrature and cached.
pub fn koranyi_unit_volume(n: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().expect("korányi cache poisoned").get(&n) {
        return v;
    }
    let v = koranyi_volume_mc(n, KORANYI_SAMPLES, 0x6b6f_7261_6e79_69);
    *cache
        .lock()
        .expect("korányi cache poisoned")
        .entry(n)
        .or_insert(v)
}

/// Monte Carlo estimate of the unit Korányi volume.
///
/// The unit ball lies inside `[-1, 1]^{2n} × [-1/4, 1/4]` (in the vertical
/// coordinate `z = A/2`), i.e. `[-1, 1]^{2n} × [-1/2, 1/2]` in `A`.
pub fn koranyi_volume_mc(n: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    let mut p = vec![0.0; 2 * n + 1];
    for _ in 0..samples {
        for c in p.iter_mut().take(2 * n) {
            *c = rng.random_range(-1.0..1.0);
        }
        p[2 * n] = rng.random_range(-0.5..0.5);
        if koranyi_gauge(&p) < 1.0 {
            hits += 1;
        }
    }
    let box_volume = 2f64.powi(2 * n as i32);
    box_volume * hits as f64 / samples as f64
}

/// Korányi gauge `((|x|² + |y|²)² + 16 z²)^{1/4}` of a Heisenberg point
/// `(x, y, A)`, with vertical coordinate `z = A/2`.
pub fn koranyi_gauge(p: &[f64]) -> f64 {
    let k = p.len() - 1;
    let horiz: f64 = p[..k].iter().map(|c| c * c).sum();
    let z = 0.5 * p[k];
    (horiz * horiz + 16.0 * z * z).sqrt().sqrt()
}

/// `center^{-1} · p` for the group law matching the area process
/// `A = Σ ∫ U dV − V dU`:
/// `(x, y, A)·(x', y', A') = (x + x', y + y', A + A' + Σ x_i y'_i − y_i x'_i)`.
pub fn heisenberg_relative(center: &[f64], p: &[f64], out: &mut [f64]) {
    let k = p.len() - 1;
    let n = k / 2;
    let mut twist = 0.0;
    for i in 0..n {
        // (-cx)·py − (-cy)·px
        twist += -center[i] * p[n + i] + center[n + i] * p[i];
    }
    for i in 0..k {
        out[i] = p[i] - center[i];
    }
    out[k] = p[k] - center[k] + twist;
}

/// Dilation `δ_c (x, y, A) = (c x, c y, c² A)`.
pub fn heisenberg_dilate(p: &[f64], c: f64) -> Vec<f64> {
    let k = p.len() - 1;
    let mut q: Vec<f64> = p[..k].iter().map(|x| c * x).collect();
    q.push(c * c * p[k]);
    q
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum GasketRegion {
    /// Every vertex except the boundary set of the graph.
    Whole,
    /// Vertices within Euclidean distance `radius` of `center`, connected to
    /// `center` inside the ball.
    Ball { center: [f64; 2], radius: f64 },
    /// The closed level-`k` cell with the given address (digits 0, 1, 2 for
    /// the bottom-left, bottom-right and top maps); its three corners form
    /// the boundary.
    Cell { address: Vec<u8> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum DomainSpec {
    Interval { a: f64, b: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    EuclideanBall { center: Vec<f64>, radius: f64 },
    /// `{ |x_i| < half_width for the first d − free_dims coordinates }`.
    Slab { half_width: f64, free_dims: usize },
    Polygon2d { vertices: Vec<[f64; 2]> },
    KoranyiBall { center: Vec<f64>, radius: f64 },
    GasketSubset {
        #[serde(flatten)]
        region: GasketRegion,
    },
}

impl DomainSpec {
    pub fn interval(a: f64, b: f64) -> Self {
        DomainSpec::Interval { a, b }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        DomainSpec::EuclideanBall { center, radius }
    }

    pub fn koranyi_ball(center: Vec<f64>, radius: f64) -> Self {
        DomainSpec::KoranyiBall { center, radius }
    }

    pub fn unit_square() -> Self {
        DomainSpec::Box {
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
        }
    }

    pub fn label(&self) -> String {
        match self {
            DomainSpec::Interval { a, b } => format!("interval({a},{b})"),
            DomainSpec::Box { lower, upper } => format!("box({lower:?},{upper:?})"),
            DomainSpec::EuclideanBall { radius, .. } => format!("ball(r={radius})"),
            DomainSpec::Slab { half_width, .. } => format!("slab(w={half_width})"),
            DomainSpec::Polygon2d { vertices } => format!("polygon({} vertices)", vertices.len()),
            DomainSpec::KoranyiBall { radius, .. } => format!("koranyi_ball(r={radius})"),
            DomainSpec::GasketSubset { region } => match region {
                GasketRegion::Whole => "gasket(whole)".into(),
                GasketRegion::Ball { radius, .. } => format!("gasket_ball(r={radius})"),
                GasketRegion::Cell { address } => format!("gasket_cell({address:?})"),
            },
        }
    }

    /// Checks that the domain is well formed and lives in `space`.
    pub fn validate(&self, space: &SpaceSpec) -> Result<()> {
        let dim = space.coordinate_dim();
        let bad = |msg: String| Err(Error::Precondition(msg));
        match (self, &space.kind) {
            (DomainSpec::Interval { a, b }, SpaceKind::Euclidean { d: 1 }) => {
                if !(a < b) {
                    return bad(format!("interval needs a < b, got ({a}, {b})"));
                }
            }
            (DomainSpec::Box { lower, upper }, SpaceKind::Euclidean { .. }) => {
                if lower.len() != dim || upper.len() != dim {
                    return bad(format!("box corners must have {dim} coordinates"));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
                    return bad("box needs lower < upper in every coordinate".into());
                }
            }
            (DomainSpec::EuclideanBall { center, radius }, SpaceKind::Euclidean { .. }) => {
                if center.len() != dim {
                    return bad(format!("ball center must have {dim} coordinates"));
                }
                if !(*radius > 0.0) {
                    return bad(format!("ball radius must be positive, got {radius}"));
                }
            }
            (DomainSpec::Slab { half_width, free_dims }, SpaceKind::Euclidean { d }) => {
                if !(*half_width > 0.0) || *free_dims >= *d {
                    return bad("slab needs half_width > 0 and free_dims < d".into());
                }
            }
            (DomainSpec::Polygon2d { vertices }, SpaceKind::Euclidean { d: 2 }) => {
                if vertices.len() < 3 || polygon_area(vertices).abs() == 0.0 {
                    return bad("polygon needs at least 3 vertices and nonzero area".into());
                }
            }
            (DomainSpec::KoranyiBall { center, radius }, SpaceKind::Heisenberg { .. }) => {
                if center.len() != dim {
                    return bad(format!("korányi ball center must have {dim} coordinates"));
                }
                if !(*radius > 0.0) {
                    return bad(format!("ball radius must be positive, got {radius}"));
                }
            }
            (DomainSpec::GasketSubset { region }, SpaceKind::Gasket { m }) => match region {
                GasketRegion::Whole => {}
                GasketRegion::Ball { radius, .. } => {
                    if !(*radius > 0.0) {
                        return bad(format!("ball radius must be positive, got {radius}"));
                    }
                }
                GasketRegion::Cell { address } => {
                    if address.len() as u32 >= *m || address.iter().any(|&c| c > 2) {
                        return bad(format!(
                            "cell address {address:?} needs digits in 0..=2 and depth < level {m}"
                        ));
                    }
                }
            },
            _ => {
                return bad(format!(
                    "domain {} is not defined on space {}",
                    self.label(),
                    space.label()
                ))
            }
        }
        Ok(())
    }

    /// Membership of a point given in the space's coordinates. Gasket
    /// regions answer for the planar position only; use the graph for the
    /// vertex-level domain.
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            DomainSpec::Interval { a, b } => *a < p[0] && p[0] < *b,
            DomainSpec::Box { lower, upper } => p
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(x, (l, u))| l < x && x < u),
            DomainSpec::EuclideanBall { center, radius } => {
                dist2(p, center) < radius * radius
            }
            DomainSpec::Slab { half_width, free_dims } => {
                let k = p.len() - free_dims;
                p[..k].iter().all(|x| x.abs() < *half_width)
            }
            DomainSpec::Polygon2d { vertices } => point_in_polygon(vertices, p[0], p[1]),
            DomainSpec::KoranyiBall { center, radius } => {
                let mut rel = vec![0.0; p.len()];
                heisenberg_relative(center, p, &mut rel);
                koranyi_gauge(&rel) < *radius
            }
            DomainSpec::GasketSubset { region } => match region {
                GasketRegion::Whole => point_in_polygon(&UNIT_TRIANGLE, p[0], p[1]) || on_triangle(p),
                GasketRegion::Ball { center, radius } => dist2(p, center) < radius * radius,
                GasketRegion::Cell { address } => {
                    let tri = cell_triangle(address);
                    point_in_polygon(&tri, p[0], p[1]) || on_polygon(&tri, p)
                }
            },
        }
    }

    /// Euclidean distance from an interior point to the nearest boundary
    /// piece; `None` for non-Euclidean domains.
    pub fn boundary_distance(&self, p: &[f64]) -> Option<f64> {
        match self {
            DomainSpec::Interval { a, b } => Some((p[0] - a).min(b - p[0])),
            DomainSpec::Box { lower, upper } => Some(
                p.iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(x, (l, u))| (x - l).min(u - x))
                    .fold(f64::INFINITY, f64::min),
            ),
            DomainSpec::EuclideanBall { center, radius } => {
                Some(radius - dist2(p, center).sqrt())
            }
            DomainSpec::Slab { half_width, free_dims } => {
                let k = p.len() - free_dims;
                Some(
                    p[..k]
                        .iter()
                        .map(|x| half_width - x.abs())
                        .fold(f64::INFINITY, f64::min),
                )
            }
            DomainSpec::Polygon2d { vertices } => Some(polygon_edge_distance(vertices, p[0], p[1])),
            _ => None,
        }
    }

    /// Axis-aligned bounding box of a planar or linear Euclidean domain.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            DomainSpec::Interval { a, b } => Some((vec![*a], vec![*b])),
            DomainSpec::Box { lower, upper } => Some((lower.clone(), upper.clone())),
            DomainSpec::EuclideanBall { center, radius } => Some((
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            DomainSpec::Polygon2d { vertices } => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                Some((lo, hi))
            }
            _ => None,
        }
    }

    /// Lebesgue measure of a Euclidean domain, where it has a closed form.
    pub fn measure(&self) -> Option<f64> {
        match self {
            DomainSpec::Interval { a, b } => Some(b - a),
            DomainSpec::Box { lower, upper } => {
                Some(lower.iter().zip(upper).map(|(l, u)| u - l).product())
            }
            DomainSpec::EuclideanBall { center, radius } => {
                Some(unit_ball_volume(center.len()) * radius.powi(center.len() as i32))
            }
            DomainSpec::Polygon2d { vertices } => Some(polygon_area(vertices).abs()),
            _ => None,
        }
    }
}

pub const UNIT_TRIANGLE: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.866_025_403_784_438_6]];

/// Corner triangle of the gasket cell with the given address.
pub fn cell_triangle(address: &[u8]) -> [[f64; 2]; 3] {
    let mut tri = UNIT_TRIANGLE;
    for &digit in address {
        let anchor = tri[digit as usize];
        for v in tri.iter_mut() {
            v[0] = 0.5 * (v[0] + anchor[0]);
            v[1] = 0.5 * (v[1] + anchor[1]);
        }
    }
    tri
}

fn on_triangle(p: &[f64]) -> bool {
    on_polygon(&UNIT_TRIANGLE, p)
}

fn on_polygon(poly: &[[f64; 2]], p: &[f64]) -> bool {
    polygon_edge_distance(poly, p[0], p[1]) < 1e-12
}

fn dist2(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Even-odd rule.
pub fn point_in_polygon(vertices: &[[f64; 2]], x: f64, y: f64) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (vertices[i][0], vertices[i][1]);
        let (xj, yj) = (vertices[j][0], vertices[j][1]);
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn polygon_edge_distance(vertices: &[[f64; 2]], x: f64, y: f64) -> f64 {
    let n = vertices.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len2 = dx * dx + dy * dy;
        let t = (((x - a[0]) * dx + (y - a[1]) * dy) / len2).clamp(0.0, 1.0);
        let (px, py) = (a[0] + t * dx - x, a[1] + t * dy - y);
        best = best.min((px * px + py * py).sqrt());
    }
    best
}

fn polygon_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_volume() {
        let s = SpaceSpec::euclidean(2);
        assert!((s.volume(1.0).unwrap() - PI).abs() < 1e-14);
        assert!((SpaceSpec::euclidean(3).volume(2.0).unwrap() - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
        assert!((SpaceSpec::euclidean(1).volume(0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn heisenberg_volume_scales_with_homogeneous_dimension() {
        let s = SpaceSpec::heisenberg(1);
        let ratio = s.volume(2.0).unwrap() / s.volume(1.0).unwrap();
        assert!((ratio - 16.0).abs() < 1e-12);
        let s2 = SpaceSpec::heisenberg(2);
        let ratio = s2.volume(0.6).unwrap() / s2.volume(0.3).unwrap();
        assert!((ratio - 64.0).abs() < 1e-10);
    }

    #[test]
    fn koranyi_constant_matches_radial_quadrature() {
        // n = 1: κ = ∫_{|w|<1} 2·z_max dw with z_max = √(1−|w|⁴)/4 in z,
        // i.e. 2·2·z_max = √(1−ρ⁴) in A; polar integral gives π²/4.
        let exact = PI * PI / 4.0;
        let mc = koranyi_unit_volume(1);
        // binomial standard error of the hit fraction times the box volume
        let box_v = 4.0;
        let p = exact / box_v;
        let se = box_v * (p * (1.0 - p) / KORANYI_SAMPLES as f64).sqrt();
        assert!((mc - exact).abs() < 4.0 * se, "mc {mc} exact {exact} se {se}");
    }

    #[test]
    fn gasket_volume_dyadic_ratio() {
        let s = SpaceSpec::gasket(6);
        for k in 0..8 {
            let r = 2f64.powi(-k);
            let ratio = s.volume(r).unwrap() / s.volume(r / 2.0).unwrap();
            assert!((ratio - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_per_space() {
        assert_eq!(SpaceSpec::euclidean(3).alpha(), 3.0);
        assert_eq!(SpaceSpec::heisenberg(1).alpha(), 4.0);
        assert!((SpaceSpec::gasket(3).alpha() - 1.584_962_500_721_156).abs() < 1e-14);
    }

    #[test]
    fn korányi_ball_membership_is_left_invariant() {
        let c = vec![0.3, -0.2, 0.1];
        let d = DomainSpec::koranyi_ball(c.clone(), 1.0);
        assert!(d.contains(&c));
        // points with gauge exactly below / above one around the center
        let g = |p: &[f64]| {
            let mut r = vec![0.0; 3];
            heisenberg_relative(&c, p, &mut r);
            koranyi_gauge(&r)
        };
        let p = vec![1.0, 0.5, -0.4];
        assert_eq!(d.contains(&p), g(&p) < 1.0);
    }

    #[test]
    fn gauge_is_homogeneous_under_dilation() {
        let p = vec![0.4, -0.3, 0.25];
        for &c in &[0.1, 0.5, 3.0] {
            let q = heisenberg_dilate(&p, c);
            assert!((koranyi_gauge(&q) - c * koranyi_gauge(&p)).abs() < 1e-14);
        }
    }

    #[test]
    fn polygon_membership_and_distance() {
        let sq = DomainSpec::Polygon2d {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        };
        assert!(sq.validate(&SpaceSpec::euclidean(2)).is_ok());
        assert!(sq.contains(&[0.5, 0.5]));
        assert!(!sq.contains(&[1.5, 0.5]));
        assert!((sq.boundary_distance(&[0.2, 0.6]).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(sq.measure(), Some(1.0));
    }

    #[test]
    fn domain_space_mismatch_is_rejected() {
        let e = DomainSpec::interval(-1.0, 1.0).validate(&SpaceSpec::euclidean(2));
        assert!(matches!(e, Err(Error::Precondition(_))));
        assert!(DomainSpec::koranyi_ball(vec![0.0; 3], 1.0)
            .validate(&SpaceSpec::euclidean(3))
            .is_err());
    }

    #[test]
    fn cell_triangles_halve() {
        let t = cell_triangle(&[1, 2]);
        // bottom-right cell, then its top sub-cell
        assert!((t[0][0] - 0.625).abs() < 1e-15);
        let side = ((t[1][0] - t[0][0]).powi(2) + (t[1][1] - t[0][1]).powi(2)).sqrt();
        assert!((side - 0.25).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let s = SpaceSpec::heisenberg(2).with_generator_scale(2.0);
        let back: SpaceSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
        let d = DomainSpec::GasketSubset {
            region: GasketRegion::Ball { center: [0.5, 0.0], radius: 0.25 },
        };
        let back: DomainSpec = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(d, back);
    }
}
