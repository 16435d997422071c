//! Planar boundary curves, their panel discretisation and point classification.

mod mesh;
mod quadrature;

pub use mesh::{discretize, Panel, PanelMesh};
pub use quadrature::{gauss_rule, QuadratureRule, MAX_GAUSS_POINTS};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

/// Relative tolerance (of the diameter) below which a point counts as lying on the curve.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Closed, counterclockwise boundary curve of a bounded planar domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryCurve {
    Circle {
        center: Point2,
        radius: f64,
    },
    Ellipse {
        center: Point2,
        semi_axes: [f64; 2],
        #[serde(default)]
        rotation: f64,
    },
    Polygon {
        vertices: Vec<Point2>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Interior,
    Exterior,
    Boundary,
}

impl BoundaryCurve {
    pub fn circle(center: Point2, radius: f64) -> Result<Self> {
        let c = BoundaryCurve::Circle { center, radius };
        c.validate()?;
        Ok(c)
    }

    pub fn ellipse(center: Point2, semi_axes: [f64; 2], rotation: f64) -> Result<Self> {
        let c = BoundaryCurve::Ellipse {
            center,
            semi_axes,
            rotation,
        };
        c.validate()?;
        Ok(c)
    }

    /// Polygon through `vertices`; clockwise input is reversed.
    pub fn polygon(vertices: Vec<Point2>) -> Result<Self> {
        let mut c = BoundaryCurve::Polygon { vertices };
        c.validate()?;
        if let BoundaryCurve::Polygon { vertices } = &mut c {
            if signed_area(vertices) < 0.0 {
                vertices.reverse();
            }
        }
        Ok(c)
    }

    pub fn unit_circle() -> Self {
        BoundaryCurve::Circle {
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }

    pub fn unit_square() -> Self {
        BoundaryCurve::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        }
    }

    /// Checks the structural invariants; used after deserialisation.
    pub fn validate(&self) -> Result<()> {
        let finite = |p: &Point2| p[0].is_finite() && p[1].is_finite();
        match self {
            BoundaryCurve::Circle { center, radius } => {
                if !finite(center) || !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::Config(format!("invalid circle radius {radius}")));
                }
            }
            BoundaryCurve::Ellipse {
                center,
                semi_axes,
                rotation,
            } => {
                if !finite(center)
                    || !rotation.is_finite()
                    || semi_axes.iter().any(|a| !(*a > 0.0) || !a.is_finite())
                {
                    return Err(Error::Config(format!("invalid ellipse semi-axes {semi_axes:?}")));
                }
            }
            BoundaryCurve::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return Err(Error::Config("polygon needs at least 3 vertices".into()));
                }
                if !vertices.iter().all(finite) {
                    return Err(Error::Config("polygon vertex is not finite".into()));
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        if vertices[i] == vertices[j] {
                            return Err(Error::Config(format!("repeated polygon vertex {i}")));
                        }
                    }
                }
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    for j in (i + 1)..n {
                        // skip edges sharing a vertex
                        if j == i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                        if segments_intersect(a, b, c, d) {
                            return Err(Error::Config(format!(
                                "polygon edges {i} and {j} intersect"
                            )));
                        }
                    }
                }
                if signed_area(vertices).abs() == 0.0 {
                    return Err(Error::Config("degenerate polygon".into()));
                }
            }
        }
        Ok(())
    }

    /// Point at curve parameter `t ∈ [0, 1)`, counterclockwise.
    pub fn point_at(&self, t: f64) -> Point2 {
        match self {
            BoundaryCurve::Circle { center, radius } => {
                let th = 2.0 * PI * t;
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            }
            BoundaryCurve::Ellipse {
                center,
                semi_axes,
                rotation,
            } => {
                let th = 2.0 * PI * t;
                let (x, y) = (semi_axes[0] * th.cos(), semi_axes[1] * th.sin());
                let (s, c) = rotation.sin_cos();
                [center[0] + c * x - s * y, center[1] + s * x + c * y]
            }
            BoundaryCurve::Polygon { vertices } => {
                let n = vertices.len();
                let cum = polygon_cumulative(vertices);
                let total = cum[n];
                let target = t.rem_euclid(1.0) * total;
                let k = match cum.iter().position(|&c| c > target) {
                    Some(k) if k > 0 => k - 1,
                    _ => n - 1,
                };
                let len = cum[k + 1] - cum[k];
                let tau = if len > 0.0 { (target - cum[k]) / len } else { 0.0 };
                lerp(vertices[k], vertices[(k + 1) % n], tau)
            }
        }
    }

    /// `x(t + d) - x(t)`, without cancellation for small `d`.
    pub fn chord(&self, t: f64, d: f64) -> Point2 {
        match self {
            BoundaryCurve::Circle { radius, .. } => {
                let (th, h) = (2.0 * PI * (t + 0.5 * d), PI * d);
                let s = 2.0 * h.sin();
                [-radius * th.sin() * s, radius * th.cos() * s]
            }
            BoundaryCurve::Ellipse {
                semi_axes, rotation, ..
            } => {
                let (th, h) = (2.0 * PI * (t + 0.5 * d), PI * d);
                let s = 2.0 * h.sin();
                let (x, y) = (-semi_axes[0] * th.sin() * s, semi_axes[1] * th.cos() * s);
                let (sr, cr) = rotation.sin_cos();
                [cr * x - sr * y, sr * x + cr * y]
            }
            BoundaryCurve::Polygon { vertices } => {
                let n = vertices.len();
                let cum = polygon_cumulative(vertices);
                let total = cum[n];
                let mid = (t + 0.5 * d).rem_euclid(1.0) * total;
                let k = match cum.iter().position(|&c| c > mid) {
                    Some(k) if k > 0 => k - 1,
                    _ => n - 1,
                };
                let half = 0.5 * d.abs() * total;
                let slack = 1e-12 * total;
                if mid - half >= cum[k] - slack && mid + half <= cum[k + 1] + slack {
                    let (a, b) = (vertices[k], vertices[(k + 1) % n]);
                    let len = cum[k + 1] - cum[k];
                    let f = d * total / len;
                    [(b[0] - a[0]) * f, (b[1] - a[1]) * f]
                } else {
                    let (p, q) = (self.point_at(t + d), self.point_at(t));
                    [p[0] - q[0], p[1] - q[1]]
                }
            }
        }
    }

    /// Curve parameters of the polygon vertices (empty for smooth curves).
    pub fn corner_params(&self) -> Vec<f64> {
        match self {
            BoundaryCurve::Polygon { vertices } => {
                let cum = polygon_cumulative(vertices);
                let total = cum[vertices.len()];
                cum[..vertices.len()].iter().map(|c| c / total).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Speed `|dx/dt|` of the parametrisation at `t`.
    pub fn speed_at(&self, t: f64) -> f64 {
        match self {
            BoundaryCurve::Circle { radius, .. } => 2.0 * PI * radius,
            BoundaryCurve::Ellipse { semi_axes, .. } => {
                let th = 2.0 * PI * t;
                2.0 * PI * (semi_axes[0] * th.sin()).hypot(semi_axes[1] * th.cos())
            }
            BoundaryCurve::Polygon { .. } => self.perimeter(),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            BoundaryCurve::Circle { radius, .. } => 2.0 * PI * radius,
            BoundaryCurve::Ellipse { .. } => {
                // integrand is smooth and periodic, so the trapezoid rule is spectrally accurate
                let n = 2048;
                (0..n).map(|i| self.speed_at(i as f64 / n as f64)).sum::<f64>() / n as f64
            }
            BoundaryCurve::Polygon { vertices } => polygon_cumulative(vertices)[vertices.len()],
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            BoundaryCurve::Circle { radius, .. } => 2.0 * radius,
            BoundaryCurve::Ellipse { semi_axes, .. } => 2.0 * semi_axes[0].max(semi_axes[1]),
            BoundaryCurve::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for a in vertices {
                    for b in vertices {
                        d = d.max(dist(*a, *b));
                    }
                }
                d
            }
        }
    }

    /// Interior/exterior/boundary classification; "boundary" within
    /// `BOUNDARY_TOL · diameter` of the curve.
    pub fn classify_point(&self, x: Point2) -> PointClass {
        let tol = BOUNDARY_TOL * self.diameter();
        match self {
            BoundaryCurve::Circle { center, radius } => {
                let r = dist(x, *center);
                if (r - radius).abs() <= tol {
                    PointClass::Boundary
                } else if r < *radius {
                    PointClass::Interior
                } else {
                    PointClass::Exterior
                }
            }
            BoundaryCurve::Ellipse {
                center,
                semi_axes,
                rotation,
            } => {
                let (s, c) = rotation.sin_cos();
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                let (u, v) = (c * dx + s * dy, -s * dx + c * dy);
                let rho = (u / semi_axes[0]).hypot(v / semi_axes[1]);
                let scale = semi_axes[0].min(semi_axes[1]);
                if (rho - 1.0).abs() * scale <= tol {
                    PointClass::Boundary
                } else if rho < 1.0 {
                    PointClass::Interior
                } else {
                    PointClass::Exterior
                }
            }
            BoundaryCurve::Polygon { vertices } => {
                let n = vertices.len();
                let near = (0..n)
                    .map(|i| segment_distance(x, vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min);
                if near <= tol {
                    PointClass::Boundary
                } else if winding_number(x, vertices) != 0 {
                    PointClass::Interior
                } else {
                    PointClass::Exterior
                }
            }
        }
    }

    /// Image under `x ↦ scale · R(angle) x + shift`.
    pub fn transformed(&self, angle: f64, shift: Point2, scale: f64) -> Self {
        let map = |p: Point2| rigid(p, angle, shift, scale);
        match self {
            BoundaryCurve::Circle { center, radius } => BoundaryCurve::Circle {
                center: map(*center),
                radius: radius * scale,
            },
            BoundaryCurve::Ellipse {
                center,
                semi_axes,
                rotation,
            } => BoundaryCurve::Ellipse {
                center: map(*center),
                semi_axes: [semi_axes[0] * scale, semi_axes[1] * scale],
                rotation: rotation + angle,
            },
            BoundaryCurve::Polygon { vertices } => BoundaryCurve::Polygon {
                vertices: vertices.iter().map(|v| map(*v)).collect(),
            },
        }
    }
}

pub fn rigid(p: Point2, angle: f64, shift: Point2, scale: f64) -> Point2 {
    let (s, c) = angle.sin_cos();
    [
        scale * (c * p[0] - s * p[1]) + shift[0],
        scale * (s * p[0] + c * p[1]) + shift[1],
    ]
}

pub fn dist(a: Point2, b: Point2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub(crate) fn lerp(a: Point2, b: Point2, t: f64) -> Point2 {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Distance from `x` to the segment `[a, b]`.
pub fn segment_distance(x: Point2, a: Point2, b: Point2) -> f64 {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let l2 = ex * ex + ey * ey;
    let t = (((x[0] - a[0]) * ex + (x[1] - a[1]) * ey) / l2).clamp(0.0, 1.0);
    dist(x, [a[0] + t * ex, a[1] + t * ey])
}

fn polygon_cumulative(vertices: &[Point2]) -> Vec<f64> {
    let n = vertices.len();
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    for i in 0..n {
        let l = dist(vertices[i], vertices[(i + 1) % n]);
        cum.push(cum[i] + l);
    }
    cum
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Point2, q: Point2, r: Point2| {
        r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
    };
    (d1 == 0.0 && on(c, d, a))
        || (d2 == 0.0 && on(c, d, b))
        || (d3 == 0.0 && on(a, b, c))
        || (d4 == 0.0 && on(a, b, d))
}

fn winding_number(x: Point2, v: &[Point2]) -> i32 {
    let n = v.len();
    let mut wn = 0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if a[1] <= x[1] {
            if b[1] > x[1] && cross(a, b, x) > 0.0 {
                wn += 1;
            }
        } else if b[1] <= x[1] && cross(a, b, x) < 0.0 {
            wn -= 1;
        }
    }
    wn
}
