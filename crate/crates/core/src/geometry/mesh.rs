use super::{dist, lerp, rigid, segment_distance, BoundaryCurve, Point2};
use crate::error::{Error, Result};

/// Straight boundary panel from `a` to `b`; `t0..t1` is the matching curve
/// parameter range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: Point2,
    pub b: Point2,
    pub t0: f64,
    pub t1: f64,
}

impl Panel {
    pub fn length(&self) -> f64 {
        dist(self.a, self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        lerp(self.a, self.b, 0.5)
    }

    /// Point at fraction `tau ∈ [0, 1]` along the panel.
    pub fn point(&self, tau: f64) -> Point2 {
        lerp(self.a, self.b, tau)
    }

    /// Curve parameter assigned to the point at fraction `tau`.
    pub fn param(&self, tau: f64) -> f64 {
        self.t0 + tau * (self.t1 - self.t0)
    }

    pub fn distance_to(&self, x: Point2) -> f64 {
        segment_distance(x, self.a, self.b)
    }
}

/// Closed chain of straight panels approximating a [`BoundaryCurve`].
#[derive(Debug, Clone, PartialEq)]
pub struct PanelMesh {
    panels: Vec<Panel>,
    midpoints: Vec<Point2>,
    lengths: Vec<f64>,
    curve: BoundaryCurve,
}

/// Splits `curve` into `n_panels` straight panels.
///
/// Smooth curves get endpoints at equispaced parameters; polygons keep every
/// vertex and split each edge into near-equal panels, the counts following
/// edge length.
pub fn discretize(curve: &BoundaryCurve, n_panels: usize) -> Result<PanelMesh> {
    curve.validate()?;
    if n_panels < 3 {
        return Err(Error::Config(format!("need at least 3 panels, got {n_panels}")));
    }
    let mut panels = Vec::with_capacity(n_panels);
    match curve {
        BoundaryCurve::Circle { .. } | BoundaryCurve::Ellipse { .. } => {
            let pts: Vec<Point2> = (0..n_panels)
                .map(|i| curve.point_at(i as f64 / n_panels as f64))
                .collect();
            for i in 0..n_panels {
                panels.push(Panel {
                    a: pts[i],
                    b: pts[(i + 1) % n_panels],
                    t0: i as f64 / n_panels as f64,
                    t1: (i + 1) as f64 / n_panels as f64,
                });
            }
        }
        BoundaryCurve::Polygon { vertices } => {
            let nv = vertices.len();
            if n_panels < nv {
                return Err(Error::Config(format!(
                    "polygon with {nv} vertices needs at least {nv} panels, got {n_panels}"
                )));
            }
            let lens: Vec<f64> = (0..nv).map(|i| dist(vertices[i], vertices[(i + 1) % nv])).collect();
            let counts = allocate(&lens, n_panels);
            let corners = curve.corner_params();
            for e in 0..nv {
                let (a, b) = (vertices[e], vertices[(e + 1) % nv]);
                let (t0, t1) = (corners[e], if e + 1 < nv { corners[e + 1] } else { 1.0 });
                let k = counts[e];
                for j in 0..k {
                    let (s0, s1) = (j as f64 / k as f64, (j + 1) as f64 / k as f64);
                    panels.push(Panel {
                        a: if j == 0 { a } else { lerp(a, b, s0) },
                        b: if j + 1 == k { b } else { lerp(a, b, s1) },
                        t0: t0 + s0 * (t1 - t0),
                        t1: t0 + s1 * (t1 - t0),
                    });
                }
            }
        }
    }
    Ok(PanelMesh::from_parts(panels, curve.clone()))
}

// Largest-remainder split of `n` panels over edges, at least one per edge.
fn allocate(lens: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = lens.iter().sum();
    let ideal: Vec<f64> = lens.iter().map(|l| l / total * n as f64).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|x| (x.floor() as usize).max(1)).collect();
    let mut assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..lens.len()).collect();
    while assigned < n {
        order.sort_by(|&i, &j| {
            let ri = ideal[i] - counts[i] as f64;
            let rj = ideal[j] - counts[j] as f64;
            rj.total_cmp(&ri).then(i.cmp(&j))
        });
        counts[order[0]] += 1;
        assigned += 1;
    }
    while assigned > n {
        order.sort_by(|&i, &j| {
            let ri = counts[i] as f64 - ideal[i];
            let rj = counts[j] as f64 - ideal[j];
            rj.total_cmp(&ri).then(i.cmp(&j))
        });
        let k = order.iter().copied().find(|&i| counts[i] > 1).expect("n >= edge count");
        counts[k] -= 1;
        assigned -= 1;
    }
    counts
}

impl PanelMesh {
    fn from_parts(panels: Vec<Panel>, curve: BoundaryCurve) -> Self {
        let midpoints = panels.iter().map(Panel::midpoint).collect();
        let lengths = panels.iter().map(Panel::length).collect();
        PanelMesh {
            panels,
            midpoints,
            lengths,
            curve,
        }
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn panel(&self, i: usize) -> &Panel {
        &self.panels[i]
    }

    pub fn midpoints(&self) -> &[Point2] {
        &self.midpoints
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// `min length / max length`.
    pub fn quasi_uniformity(&self) -> f64 {
        let lo = self.lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.lengths.iter().copied().fold(0.0, f64::max);
        lo / hi
    }

    pub fn max_length(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for p in &self.panels {
            for q in &self.panels {
                d = d.max(dist(p.a, q.a));
            }
        }
        d
    }

    /// Distance from `x` to the nearest panel.
    pub fn distance_to(&self, x: Point2) -> f64 {
        self.panels
            .iter()
            .map(|p| p.distance_to(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether panels `i` and `j` share an endpoint (`i ≠ j`).
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        let n = self.len();
        i != j && ((i + 1) % n == j || (j + 1) % n == i)
    }

    /// Image of the mesh (and its curve) under `x ↦ scale · R(angle) x + shift`.
    pub fn transformed(&self, angle: f64, shift: Point2, scale: f64) -> Self {
        let panels = self
            .panels
            .iter()
            .map(|p| Panel {
                a: rigid(p.a, angle, shift, scale),
                b: rigid(p.b, angle, shift, scale),
                t0: p.t0,
                t1: p.t1,
            })
            .collect();
        PanelMesh::from_parts(panels, self.curve.transformed(angle, shift, scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn inscribed_square() {
        let m = discretize(&BoundaryCurve::unit_circle(), 4).unwrap();
        for &l in m.lengths() {
            assert!((l - 2f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_square_eight_panels() {
        let m = discretize(&BoundaryCurve::unit_square(), 8).unwrap();
        assert_eq!(m.len(), 8);
        for &l in m.lengths() {
            assert!((l - 0.5).abs() < 1e-15);
        }
        assert_eq!(m.panel(0).a, [0.0, 0.0]);
        assert_eq!(m.panel(1).b, [1.0, 0.0]);
    }

    #[test]
    fn closes_the_loop() {
        for curve in [
            BoundaryCurve::unit_circle(),
            BoundaryCurve::unit_square(),
            BoundaryCurve::ellipse([0.0, 0.0], [2.0, 1.0], 0.2).unwrap(),
            BoundaryCurve::polygon(vec![[0.0, 0.0], [3.0, 0.0], [1.0, 1.0]]).unwrap(),
        ] {
            let m = discretize(&curve, 37).unwrap();
            for i in 0..m.len() {
                assert_eq!(m.panel(i).b, m.panel((i + 1) % m.len()).a);
            }
            assert!(m.quasi_uniformity() >= 0.1);
        }
    }

    #[test]
    fn perimeter_of_fine_circle() {
        let m = discretize(&BoundaryCurve::unit_circle(), 256).unwrap();
        let s = m.total_length();
        let exact = 2.0 * 256.0 * (PI / 256.0).sin();
        assert!((s - exact).abs() < 1e-12);
        assert!((2.0 * PI - 1e-3..=2.0 * PI).contains(&s));
    }

    #[test]
    fn perimeter_converges_at_second_order() {
        for curve in [
            BoundaryCurve::unit_circle(),
            BoundaryCurve::ellipse([0.0, 0.0], [1.5, 0.8], 0.0).unwrap(),
        ] {
            let p = curve.perimeter();
            let errs: Vec<f64> = [16, 32, 64, 128]
                .iter()
                .map(|&n| (p - discretize(&curve, n).unwrap().total_length()).abs())
                .collect();
            for w in errs.windows(2) {
                let rate = (w[0] / w[1]).log2();
                assert!((rate - 2.0).abs() < 0.1, "rate {rate}");
            }
        }
    }

    #[test]
    fn too_few_panels() {
        assert!(discretize(&BoundaryCurve::unit_circle(), 2).is_err());
        let pent = BoundaryCurve::polygon(vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.5, 0.8],
            [0.5, 1.4],
            [-0.5, 0.8],
        ])
        .unwrap();
        assert!(discretize(&pent, 4).is_err());
        assert_eq!(discretize(&pent, 5).unwrap().len(), 5);
    }

    #[test]
    fn allocation_is_exact() {
        let lens = [1.0, 10.0, 0.1, 3.0];
        for n in 4..40 {
            let c = allocate(&lens, n);
            assert_eq!(c.iter().sum::<usize>(), n);
            assert!(c.iter().all(|&k| k >= 1));
        }
    }
}
