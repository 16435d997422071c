//! Panel-level integrals of the Riesz kernel `C |x - y|^p`, `p = 2α - 2`.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::{gauss_rule, Panel, Point2, QuadratureRule};
use crate::specfun::{riesz_constant, FracOrder};

/// Relative perpendicular offset below which a point is taken to lie on a panel's line.
const COLLINEAR_TOL: f64 = 1e-14;
/// Beyond this many panel lengths a single Gauss rule is used.
const FAR_RATIO: f64 = 2.0;

pub(crate) fn rule(n: usize) -> &'static QuadratureRule {
    static RULES: OnceLock<Vec<QuadratureRule>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (1..=32).map(|k| gauss_rule(k).expect("valid size")).collect());
    &rules[n - 1]
}

/// Whether [`panel_inner_integral`] may be evaluated at points on the open panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnPanel {
    Reject,
    ClosedForm,
}

/// Kernel data for one order, so hot loops avoid recomputing constants.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    pub c: f64,
    pub p: f64,
}

impl Kernel {
    pub fn new(order: FracOrder) -> Self {
        Kernel {
            c: riesz_constant(order),
            p: 2.0 * order.alpha() - 2.0,
        }
    }

    /// `∫_0^a s^p ds`.
    #[inline]
    fn power_primitive(&self, a: f64) -> f64 {
        a.powf(self.p + 1.0) / (self.p + 1.0)
    }
}

/// `∫_panel φ_α(x - y) ds(y)`.
///
/// Exact when `x` lies on the panel's line; otherwise Gauss quadrature, on
/// cells graded geometrically away from the point of the panel nearest to `x`
/// when `x` is within two panel lengths.
pub fn panel_inner_integral(order: FracOrder, panel: &Panel, x: Point2, mode: OnPanel) -> Result<f64> {
    if order.dim() != 2 {
        return Err(Error::Domain("panel integrals are two-dimensional".into()));
    }
    inner(&Kernel::new(order), panel, x, mode)
}

pub(crate) fn inner(k: &Kernel, panel: &Panel, x: Point2, mode: OnPanel) -> Result<f64> {
    let (a, b) = (panel.a, panel.b);
    let len = panel.length();
    let (tx, ty) = ((b[0] - a[0]) / len, (b[1] - a[1]) / len);
    let (rx, ry) = (x[0] - a[0], x[1] - a[1]);
    let s0 = rx * tx + ry * ty;
    let delta = rx * ty - ry * tx;
    if delta.abs() <= COLLINEAR_TOL * len {
        let v = if s0 > 0.0 && s0 < len {
            match mode {
                OnPanel::ClosedForm => k.power_primitive(s0) + k.power_primitive(len - s0),
                OnPanel::Reject => {
                    return Err(Error::Singularity(format!(
                        "point ({}, {}) lies on the panel interior",
                        x[0], x[1]
                    )))
                }
            }
        } else if s0 <= 0.0 {
            if s0 == 0.0 {
                k.power_primitive(len)
            } else {
                k.power_primitive(len - s0) - k.power_primitive(-s0)
            }
        } else if s0 == len {
            k.power_primitive(len)
        } else {
            k.power_primitive(s0) - k.power_primitive(s0 - len)
        };
        return Ok(k.c * v);
    }
    let d2 = delta * delta;
    let f = |s: f64| {
        let u = s - s0;
        (d2 + u * u).powf(0.5 * k.p)
    };
    let sc = s0.clamp(0.0, len);
    let dist = (d2 + (s0 - sc) * (s0 - sc)).sqrt();
    let v = if dist >= FAR_RATIO * len {
        rule(10).integrate(0.0, len, f)
    } else {
        graded(sc, len, dist, rule(12), f)
    };
    Ok(k.c * v)
}

/// `∫_0^len f` on cells of width `w, 2w, 4w, ...` growing away from `at`.
pub(crate) fn graded<F: Fn(f64) -> f64>(at: f64, len: f64, w: f64, rule: &QuadratureRule, f: F) -> f64 {
    let mut acc = 0.0;
    // towards len
    let mut lo = at;
    let mut width = w;
    while lo < len {
        let hi = (lo + width).min(len);
        if len - hi < 0.5 * width {
            acc += rule.integrate(lo, len, &f);
            break;
        }
        acc += rule.integrate(lo, hi, &f);
        lo = hi;
        width *= 2.0;
    }
    // towards 0
    let mut hi = at;
    let mut width = w;
    while hi > 0.0 {
        let lo = (hi - width).max(0.0);
        if lo < 0.5 * width {
            acc += rule.integrate(0.0, hi, &f);
            break;
        }
        acc += rule.integrate(lo, hi, &f);
        hi = lo;
        width *= 2.0;
    }
    acc
}

/// `∫∫ φ_α(x - y)` over one panel against itself.
pub(crate) fn self_pair(k: &Kernel, len: f64) -> f64 {
    let p = k.p;
    k.c * 2.0 * len.powf(p + 2.0) / ((p + 1.0) * (p + 2.0))
}

/// `∫_0^a ∫_0^b φ_α(s e₁ - t e₂) dt ds` for two panels leaving a common vertex
/// along unit directions with `e₁·e₂ = cos_angle`.
///
/// Polar coordinates in the `(s, t)` parameter plane absorb the vertex
/// singularity; what remains is a smooth one-dimensional integral in the angle.
pub(crate) fn vertex_pair(k: &Kernel, a: f64, b: f64, cos_angle: f64) -> f64 {
    let p = k.p;
    let kern = |psi: f64| (1.0 - cos_angle * (2.0 * psi).sin()).max(0.0).powf(0.5 * p);
    let split = b.atan2(a);
    let q = rule(24);
    let mut acc = 0.0;
    let mut pieces = vec![0.0, split, FRAC_PI_2];
    if (0.0..FRAC_PI_2).contains(&std::f64::consts::FRAC_PI_4) {
        pieces.push(std::f64::consts::FRAC_PI_4);
    }
    pieces.sort_by(f64::total_cmp);
    pieces.dedup();
    for w in pieces.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        acc += q.integrate(lo, hi, |psi| {
            let r = if psi <= split { a / psi.cos() } else { b / psi.sin() };
            kern(psi) * r.powf(p + 2.0)
        });
    }
    k.c * acc / (p + 2.0)
}

/// Closest points between two segments: (parameter on `i` in length units, distance).
pub(crate) fn closest_on_first(pi: &Panel, pj: &Panel) -> (f64, f64) {
    let li = pi.length();
    let project = |x: Point2| -> f64 {
        let (ex, ey) = (pi.b[0] - pi.a[0], pi.b[1] - pi.a[1]);
        (((x[0] - pi.a[0]) * ex + (x[1] - pi.a[1]) * ey) / (li * li)).clamp(0.0, 1.0)
    };
    let mut best = (0.0, f64::INFINITY);
    for tau in [0.0, 1.0, project(pj.a), project(pj.b)] {
        let d = pj.distance_to(pi.point(tau));
        if d < best.1 {
            best = (tau * li, d);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(alpha: f64) -> Kernel {
        Kernel::new(FracOrder::new(2, alpha).unwrap())
    }

    fn panel(a: Point2, b: Point2) -> Panel {
        Panel { a, b, t0: 0.0, t1: 1.0 }
    }

    // brute-force oracle: composite midpoint on a very fine grid, singularity excluded analytically
    fn brute_inner(k: &Kernel, p: &Panel, x: Point2, n: usize) -> f64 {
        let len = p.length();
        let h = len / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let y = p.point((i as f64 + 0.5) / n as f64);
            let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
            acc += r.powf(k.p) * h;
        }
        k.c * acc
    }

    #[test]
    fn midpoint_of_length_two_panel() {
        let o = FracOrder::new(2, 0.75).unwrap();
        let kk = k(0.75);
        let p = panel([-1.0, 0.0], [1.0, 0.0]);
        let v = panel_inner_integral(o, &p, [0.0, 0.0], OnPanel::ClosedForm).unwrap();
        assert!((v - kk.c * 4.0).abs() < 1e-14);
        assert!(panel_inner_integral(o, &p, [0.0, 0.0], OnPanel::Reject).is_err());
    }

    #[test]
    fn endpoint_of_unit_panel() {
        let o = FracOrder::new(2, 0.75).unwrap();
        let p = panel([0.0, 0.0], [1.0, 0.0]);
        let v = panel_inner_integral(o, &p, [0.0, 0.0], OnPanel::Reject).unwrap();
        assert!((v - k(0.75).c * 2.0).abs() < 1e-14);
        let v = panel_inner_integral(o, &p, [1.0, 0.0], OnPanel::Reject).unwrap();
        assert!((v - k(0.75).c * 2.0).abs() < 1e-14);
    }

    #[test]
    fn far_field_limit() {
        let o = FracOrder::new(2, 0.75).unwrap();
        let p = panel([-0.005, 0.0], [0.005, 0.0]);
        let v = panel_inner_integral(o, &p, [0.0, 10.0], OnPanel::Reject).unwrap();
        let expect = k(0.75).c * 0.01 * 10f64.powf(-0.5);
        assert!(((v - expect) / expect).abs() < 1e-6);
    }

    #[test]
    fn near_singular_matches_brute_force() {
        let kk = k(0.6);
        let p = panel([0.0, 0.0], [1.0, 0.3]);
        for x in [[0.4, 0.2], [0.5, 0.1], [1.2, 0.3], [-0.05, 0.01], [0.3, 0.0901]] {
            let v = inner(&kk, &p, x, OnPanel::Reject).unwrap();
            let b = brute_inner(&kk, &p, x, 2_000_000);
            assert!(((v - b) / b).abs() < 1e-6, "x = {x:?}: {v} vs {b}");
        }
    }

    #[test]
    fn collinear_outside() {
        let kk = k(0.7);
        let p = panel([0.0, 0.0], [1.0, 0.0]);
        let v = inner(&kk, &p, [2.0, 0.0], OnPanel::Reject).unwrap();
        let expect = kk.c * (2f64.powf(kk.p + 1.0) - 1.0) / (kk.p + 1.0);
        assert!((v - expect).abs() < 1e-14);
        // approaching the line from off-axis converges to the collinear value
        let near = inner(&kk, &p, [2.0, 1e-9], OnPanel::Reject).unwrap();
        assert!((near - v).abs() < 1e-8);
    }

    #[test]
    fn self_pair_matches_iterated_closed_form() {
        let kk = k(0.65);
        let len = 0.7;
        let p = panel([0.0, 0.0], [len, 0.0]);
        let q = rule(20);
        // outer: dyadic cells toward the endpoint, doubled by symmetry; inner closed form
        let h = 0.5 * len;
        let v: f64 = 2.0
            * (0..60)
                .map(|l| {
                    let (a, b) = (h * 0.5f64.powi(l + 1), h * 0.5f64.powi(l));
                    q.integrate(a, b, |s| inner(&kk, &p, [s, 0.0], OnPanel::ClosedForm).unwrap())
                })
                .sum::<f64>();
        assert!(((v - self_pair(&kk, len)) / v).abs() < 1e-12);
    }

    #[test]
    fn vertex_pair_matches_nested_quadrature() {
        let kk = k(0.7);
        for (a, b, ang) in [(1.0, 1.0, 2.0f64), (0.3, 0.5, 2.8), (1.0, 0.4, std::f64::consts::PI)] {
            let v = vertex_pair(&kk, a, b, ang.cos());
            let pj = panel([0.0, 0.0], [b * ang.cos(), b * ang.sin()]);
            let outer = graded(0.0, a, a * 1e-6, rule(16), |s| {
                inner(&kk, &pj, [s, 0.0], OnPanel::ClosedForm).unwrap()
            });
            assert!(((v - outer) / v).abs() < 1e-7, "{a} {b} {ang}: {v} vs {outer}");
        }
    }

    #[test]
    fn vertex_pair_symmetric_in_lengths() {
        let kk = k(0.55);
        let v1 = vertex_pair(&kk, 0.3, 0.9, -0.4);
        let v2 = vertex_pair(&kk, 0.9, 0.3, -0.4);
        assert!(((v1 - v2) / v1).abs() < 1e-14);
    }
}
