use super::integrals::{rule, Kernel};
use super::TraceData;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, PanelMesh, Point2, QuadratureRule};
use crate::specfun::FracOrder;

/// Panel averages of boundary data `g(x, t)` (point and curve parameter), by `quad`.
///
/// The Galerkin load vector is [`TraceData::moments`], `b[i] = ∫_{Γ_i} g ds`.
pub fn assemble_rhs<G>(g: G, mesh: &PanelMesh, quad: &QuadratureRule) -> Result<TraceData>
where
    G: Fn(Point2, f64) -> f64,
{
    let mut values = Vec::with_capacity(mesh.len());
    for (i, p) in mesh.panels().iter().enumerate() {
        let mut acc = 0.0;
        for (tau, w) in quad.mapped(0.0, 1.0) {
            let v = g(p.point(tau), p.param(tau));
            if !v.is_finite() {
                return Err(Error::Data(format!("boundary data is not finite on panel {i}")));
            }
            acc += w * v;
        }
        values.push(acc);
    }
    TraceData::new(values)
}

const DYADIC_LEVELS: i32 = 50;

/// `γ S_α G` at curve parameter `t`, for a density given on the exact curve as
/// a function of the curve parameter.
///
/// Integrates in the curve parameter, split at `t` and at polygon corners,
/// with dyadic cells towards `t`; the innermost cell uses the leading-order
/// kernel asymptotics. Used to manufacture boundary data from a known density.
pub fn curve_single_layer_trace<G>(curve: &BoundaryCurve, order: FracOrder, density: G, t: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    if order.dim() != 2 || !order.is_solvable() {
        return Err(Error::Config(format!(
            "alpha out of admissible range (d={}, alpha={})",
            order.dim(),
            order.alpha()
        )));
    }
    let k = Kernel::new(order);
    let t = t.rem_euclid(1.0);
    // integrand in terms of the offset `d = s - t`
    let integrand = |d: f64| {
        let v = curve.chord(t, d);
        let s = (t + d).rem_euclid(1.0);
        k.c * v[0].hypot(v[1]).powf(k.p) * density(s) * curve.speed_at(s)
    };
    let mut breaks = vec![-0.5, 0.0, 0.5];
    for c in curve.corner_params() {
        let d = (c - t + 0.5).rem_euclid(1.0) - 0.5;
        breaks.push(d);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let q = rule(20);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (u0, u1) = (w[0], w[1]);
        if u1 - u0 <= 0.0 {
            continue;
        }
        if u0 == 0.0 || u1 == 0.0 {
            let dir = if u0 == 0.0 { 1.0 } else { -1.0 };
            let h = u1 - u0;
            for lvl in 0..DYADIC_LEVELS {
                let a = h * 0.5f64.powi(lvl + 1);
                let b = h * 0.5f64.powi(lvl);
                total += q.integrate(a, b, |d| integrand(dir * d));
            }
            // innermost cell: |x(t) - x(s)| ≈ speed |s - t|
            let eps = h * 0.5f64.powi(DYADIC_LEVELS);
            let side = (t + dir * 0.5 * eps).rem_euclid(1.0);
            let speed = curve.speed_at(side);
            total += k.c * density(side) * speed.powf(k.p + 1.0) * eps.powf(k.p + 1.0) / (k.p + 1.0);
        } else {
            // grade towards whichever end is nearer to t
            let near_left = u0.abs() <= u1.abs();
            let gap = u0.abs().min(u1.abs());
            let len = u1 - u0;
            let at = if near_left { 0.0 } else { len };
            total += super::integrals::graded(at, len, gap.min(len).max(1e-3 * len), q, |d| integrand(u0 + d));
        }
    }
    if !total.is_finite() {
        return Err(Error::Data(format!("trace integral is not finite at t = {t}")));
    }
    Ok(total)
}
