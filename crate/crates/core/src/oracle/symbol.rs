use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{gauss_rule, QuadratureRule};
use crate::specfun::{j0_unchecked, riesz_constant, FracOrder};

/// One row of a symbol decay table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolSample {
    pub r: f64,
    pub symbol: f64,
    /// `|symbol| (1 + r²)^α`.
    pub bound_ratio: f64,
}

/// Radial cutoff: 1 on `[0, R]`, 0 beyond `2R`, quintic (C²) blend between.
pub fn cutoff(s: f64, radius: f64) -> f64 {
    let t = ((s - radius) / radius).clamp(0.0, 1.0);
    1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

const DYADIC_LEVELS: i32 = 60;
const REL_TOL: f64 = 1e-8;

/// Fourier transform at `|ξ| = r` of the cut-off Riesz kernel `λ(|z|) φ_α(z)`.
///
/// Radial quadrature with cells of at most half an oscillation period; the
/// cell nearest the origin is graded dyadically with the last piece done in
/// closed form. The result is recomputed on halved cells and rejected if the
/// two disagree.
pub fn cutoff_kernel_symbol(order: FracOrder, cutoff_radius: f64, r: f64) -> Result<f64> {
    if !(cutoff_radius > 0.0 && cutoff_radius.is_finite()) {
        return Err(Error::Config(format!("cutoff radius must be positive, got {cutoff_radius}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Config(format!("frequency must be non-negative, got {r}")));
    }
    let q = gauss_rule(20)?;
    let coarse = radial_symbol(order, cutoff_radius, r, 1, &q);
    let fine = radial_symbol(order, cutoff_radius, r, 2, &q);
    let scale = radial_symbol(order, cutoff_radius, 0.0, 1, &q);
    if (coarse - fine).abs() > REL_TOL * fine.abs() + 1e-13 * scale {
        return Err(Error::Oracle(format!(
            "symbol quadrature not converged at r = {r}: {coarse:e} vs {fine:e}"
        )));
    }
    Ok(fine)
}

fn radial_symbol(order: FracOrder, big_r: f64, r: f64, refine: usize, q: &QuadratureRule) -> f64 {
    let a = 2.0 * order.alpha() - 1.0;
    let pref = match order.dim() {
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    } * riesz_constant(order);
    let osc = |x: f64| match order.dim() {
        2 => j0_unchecked(x),
        _ => {
            if x.abs() < 1e-4 {
                1.0 - x * x / 6.0
            } else {
                x.sin() / x
            }
        }
    };
    let f = |s: f64| s.powf(a) * cutoff(s, big_r) * osc(s * r);
    let width = if r > 0.0 { (PI / r).min(0.25 * big_r) } else { 0.25 * big_r } / refine as f64;
    let mut total = 0.0;
    for (lo, hi) in [(0.0, big_r), (big_r, 2.0 * big_r)] {
        let n = ((hi - lo) / width).ceil() as usize;
        let h = (hi - lo) / n as f64;
        for k in 0..n {
            let (c0, c1) = (lo + k as f64 * h, lo + (k + 1) as f64 * h);
            if c0 == 0.0 {
                for l in 0..DYADIC_LEVELS {
                    total += q.integrate(c1 * 0.5f64.powi(l + 1), c1 * 0.5f64.powi(l), f);
                }
                // s^a with λ = 1 and unit oscillatory factor on the last piece
                let eps = c1 * 0.5f64.powi(DYADIC_LEVELS);
                total += eps.powf(a + 1.0) / (a + 1.0);
            } else {
                total += q.integrate(c0, c1, f);
            }
        }
    }
    pref * total
}

/// Symbol table `(r, symbol, |symbol|(1 + r²)^α)` for the cut-off Riesz kernel.
pub fn symbol_decay_check(order: FracOrder, cutoff_radius: f64, r_values: &[f64]) -> Result<Vec<SymbolSample>> {
    r_values
        .iter()
        .map(|&r| {
            let symbol = cutoff_kernel_symbol(order, cutoff_radius, r)?;
            Ok(SymbolSample {
                r,
                symbol,
                bound_ratio: symbol.abs() * (1.0 + r * r).powf(order.alpha()),
            })
        })
        .collect()
}

/// `symbol(r) · r^{2α}`; tends to 1 for large `r` when the kernel constant is right.
pub fn normalization_constant(order: FracOrder, cutoff_radius: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Config(format!("frequency must be positive, got {r}")));
    }
    Ok(cutoff_kernel_symbol(order, cutoff_radius, r)? * r.powf(2.0 * order.alpha()))
}
