//! Spectral fractional Dirichlet Laplacian on the unit square.
//!
//! Functions are expanded in the orthonormal Dirichlet eigenbasis
//! `2 sin(mπx) sin(nπy)`, with eigenvalues `π²(m² + n²)`; powers of the
//! operator act diagonally on the coefficients.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{gauss_rule, Point2};
use crate::specfun::FracOrder;

pub const DEFAULT_ORDER: usize = 32;
/// Gauss points per cell and direction; there is one cell per mode.
pub const DEFAULT_QUAD: usize = 8;

/// Truncated double sine series, `c[m][n]` for `1 ≤ m, n ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineSeries {
    order: usize,
    coeffs: Vec<f64>,
}

impl SineSeries {
    /// Row-major coefficients, `coeffs[(m-1)·M + (n-1)] = c[m][n]`.
    pub fn new(order: usize, coeffs: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config("sine series order must be at least 1".into()));
        }
        if coeffs.len() != order * order {
            return Err(Error::Data(format!(
                "expected {} coefficients, got {}",
                order * order,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Data("sine coefficient is not finite".into()));
        }
        Ok(SineSeries { order, coeffs })
    }

    pub fn zeros(order: usize) -> Result<Self> {
        SineSeries::new(order, vec![0.0; order * order])
    }

    /// Series with the given `(m, n, c)` modes; repeated modes add up.
    pub fn from_modes(order: usize, modes: &[(usize, usize, f64)]) -> Result<Self> {
        let mut s = SineSeries::zeros(order)?;
        for &(m, n, c) in modes {
            if m == 0 || n == 0 || m > order || n > order {
                return Err(Error::Config(format!("mode ({m}, {n}) outside 1..={order}")));
            }
            if !c.is_finite() {
                return Err(Error::Data(format!("mode ({m}, {n}) coefficient is not finite")));
            }
            s.coeffs[(m - 1) * order + n - 1] += c;
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `c[m][n]`, 1-based.
    pub fn coeff(&self, m: usize, n: usize) -> f64 {
        assert!(m >= 1 && n >= 1 && m <= self.order && n <= self.order, "mode out of range");
        self.coeffs[(m - 1) * self.order + n - 1]
    }

    /// `L₂((0,1)²)` norm of the represented function.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Multiplies `c[m][n]` by `factor · (π²(m² + n²))^exponent`.
    pub fn scale_by_eigenvalue_power(&self, exponent: f64, factor: f64) -> SineSeries {
        let m = self.order;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| factor * eigenvalue(k / m + 1, k % m + 1).powf(exponent) * c)
            .collect();
        SineSeries { order: m, coeffs }
    }
}

/// Dirichlet eigenvalue `π²(m² + n²)` of the mode `(m, n)`.
pub fn eigenvalue(m: usize, n: usize) -> f64 {
    PI * PI * ((m * m + n * n) as f64)
}

/// Coefficients of `f` up to order `M`, by tensor Gauss quadrature with `M`
/// cells and `q` points per cell in each direction.
pub fn project<F>(f: F, order: usize, q: usize) -> Result<SineSeries>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if order == 0 {
        return Err(Error::Config("sine series order must be at least 1".into()));
    }
    let rule = gauss_rule(q)?;
    let mut nodes = Vec::with_capacity(order * q);
    let mut weights = Vec::with_capacity(order * q);
    let h = 1.0 / order as f64;
    for cell in 0..order {
        for (x, w) in rule.mapped(cell as f64 * h, (cell + 1) as f64 * h) {
            nodes.push(x);
            weights.push(w);
        }
    }
    let np = nodes.len();
    let nodes_ref = &nodes;
    let samples: Vec<f64> = (0..np * np)
        .into_par_iter()
        .map(|k| f(nodes_ref[k / np], nodes_ref[k % np]))
        .collect();
    if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!(
            "f is not finite at ({}, {})",
            nodes[k / np],
            nodes[k % np]
        )));
    }
    let fm = DMatrix::from_row_slice(np, np, &samples);
    let s = DMatrix::from_fn(order, np, |m, i| weights[i] * ((m + 1) as f64 * PI * nodes[i]).sin());
    let c = (&s * fm * s.transpose()) * 2.0;
    let coeffs = (0..order * order).map(|k| c[(k / order, k % order)]).collect();
    SineSeries::new(order, coeffs)
}

fn require_square(order: FracOrder) -> Result<()> {
    if order.dim() != 2 {
        return Err(Error::Domain(format!(
            "spectral operator is defined on the unit square, got d = {}",
            order.dim()
        )));
    }
    Ok(())
}

/// `u₁ = -(-Δ_D)^{-α} f`: `c'[m][n] = -(π²(m² + n²))^{-α} c[m][n]`.
pub fn apply_inverse_frac(series: &SineSeries, order: FracOrder) -> Result<SineSeries> {
    require_square(order)?;
    Ok(series.scale_by_eigenvalue_power(-order.alpha(), -1.0))
}

/// `(-Δ_D)^α`: `c'[m][n] = (π²(m² + n²))^α c[m][n]`.
pub fn apply_forward_frac(series: &SineSeries, order: FracOrder) -> Result<SineSeries> {
    require_square(order)?;
    Ok(series.scale_by_eigenvalue_power(order.alpha(), 1.0))
}

/// Pointwise values of the series; exactly 0 on the boundary of the square.
pub fn eval_series(series: &SineSeries, points: &[Point2]) -> Result<Vec<f64>> {
    if let Some(p) = points
        .iter()
        .find(|p| !(p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0))
    {
        return Err(Error::Domain(format!("point ({}, {}) is outside the unit square", p[0], p[1])));
    }
    let m = series.order;
    Ok(points
        .iter()
        .map(|p| {
            if p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0 {
                return 0.0;
            }
            let sx: Vec<f64> = (1..=m).map(|k| (k as f64 * PI * p[0]).sin()).collect();
            let sy: Vec<f64> = (1..=m).map(|k| (k as f64 * PI * p[1]).sin()).collect();
            let mut acc = 0.0;
            for (i, row) in series.coeffs.chunks(m).enumerate() {
                let inner: f64 = row.iter().zip(&sy).map(|(c, s)| c * s).sum();
                acc += sx[i] * inner;
            }
            2.0 * acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mode(m: usize, n: usize) -> impl Fn(f64, f64) -> f64 {
        move |x, y| 2.0 * (m as f64 * PI * x).sin() * (n as f64 * PI * y).sin()
    }

    fn random_series(rng: &mut ChaCha8Rng, order: usize) -> SineSeries {
        SineSeries::new(order, (0..order * order).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    // Neumaier-compensated double sum, term by term.
    fn brute_sum(s: &SineSeries, p: Point2) -> f64 {
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for m in 1..=s.order() {
            for n in 1..=s.order() {
                let t = 2.0 * s.coeff(m, n) * (m as f64 * PI * p[0]).sin() * (n as f64 * PI * p[1]).sin();
                let u = sum + t;
                comp += if sum.abs() >= t.abs() { (sum - u) + t } else { (t - u) + sum };
                sum = u;
            }
        }
        sum + comp
    }

    #[test]
    fn basis_is_orthonormal() {
        let s = project(mode(3, 2), 8, DEFAULT_QUAD).unwrap();
        let t = project(|x, y| mode(3, 2)(x, y) * 1.0 + mode(1, 5)(x, y), 8, DEFAULT_QUAD).unwrap();
        let dot: f64 = s.coeffs().iter().zip(t.coeffs()).map(|(a, b)| a * b).sum();
        assert!((s.l2_norm() - 1.0).abs() < 1e-13);
        assert!((dot - 1.0).abs() < 1e-13);
    }

    #[test]
    fn projects_single_and_mixed_modes() {
        let s = project(mode(1, 1), DEFAULT_ORDER, DEFAULT_QUAD).unwrap();
        for m in 1..=DEFAULT_ORDER {
            for n in 1..=DEFAULT_ORDER {
                let e = if (m, n) == (1, 1) { 1.0 } else { 0.0 };
                assert!((s.coeff(m, n) - e).abs() <= 1e-10);
            }
        }
        let f = |x: f64, y: f64| mode(2, 3)(x, y) + 0.5 * mode(1, 1)(x, y);
        let s = project(f, 16, DEFAULT_QUAD).unwrap();
        assert!((s.coeff(2, 3) - 1.0).abs() < 1e-12);
        assert!((s.coeff(1, 1) - 0.5).abs() < 1e-12);
        assert!(s.coeff(3, 2).abs() < 1e-12);
        let z = project(|_, _| 0.0, 5, 4).unwrap();
        assert!(z.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn highest_mode_is_resolved() {
        let s = project(mode(DEFAULT_ORDER, DEFAULT_ORDER - 1), DEFAULT_ORDER, DEFAULT_QUAD).unwrap();
        assert!((s.coeff(DEFAULT_ORDER, DEFAULT_ORDER - 1) - 1.0).abs() < 1e-10);
        let off = s.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max);
        assert!((off - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(project(|x, _| 1.0 / (x - x), 4, 4).is_err());
        assert!(project(mode(1, 1), 0, 4).is_err());
        assert!(SineSeries::from_modes(4, &[(5, 1, 1.0)]).is_err());
        let s = SineSeries::zeros(3).unwrap();
        assert!(eval_series(&s, &[[1.2, 0.5]]).is_err());
        assert!(apply_inverse_frac(&s, FracOrder::new(3, 0.6).unwrap()).is_err());
    }

    #[test]
    fn inverse_single_mode() {
        let s = SineSeries::from_modes(4, &[(1, 1, 1.0)]).unwrap();
        let u = apply_inverse_frac(&s, FracOrder::new(2, 0.6).unwrap()).unwrap();
        // exp(-0.6 ln(2π²)) evaluated separately
        let expect = -(-0.6 * (2.0 * PI * PI).ln()).exp();
        assert!((u.coeff(1, 1) - expect).abs() < 1e-15);
        assert!((u.coeff(1, 1) + 0.16703).abs() < 5e-6);
        let f = apply_forward_frac(
            &SineSeries::from_modes(4, &[(1, 2, 1.0)]).unwrap(),
            FracOrder::new(2, 0.75).unwrap(),
        )
        .unwrap();
        assert!((f.coeff(1, 2) - (0.75 * (5.0 * PI * PI).ln()).exp()).abs() < 1e-12);
        let z = SineSeries::zeros(4).unwrap();
        assert_eq!(apply_inverse_frac(&z, FracOrder::new(2, 0.6).unwrap()).unwrap(), z);
    }

    #[test]
    fn unit_power_is_inverse_laplacian() {
        // -Δ_D of the basis function (m, n) is π²(m² + n²) times itself
        let s = SineSeries::from_modes(6, &[(2, 5, 0.7), (4, 1, -1.3)]).unwrap();
        let u = s.scale_by_eigenvalue_power(-1.0, -1.0);
        assert!((u.coeff(2, 5) + 0.7 / (29.0 * PI * PI)).abs() < 1e-16);
        assert!((u.coeff(4, 1) - 1.3 / (17.0 * PI * PI)).abs() < 1e-16);
    }

    #[test]
    fn round_trip_and_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for alpha in [0.55, 0.6, 0.7, 0.75] {
            let o = FracOrder::new(2, alpha).unwrap();
            let s = random_series(&mut rng, 12);
            let inv = apply_inverse_frac(&s, o).unwrap();
            let back = apply_forward_frac(&inv, o).unwrap();
            for (a, b) in back.coeffs().iter().zip(s.coeffs()) {
                assert!((a + b).abs() <= 1e-12 * b.abs().max(1e-300));
            }
            assert!(inv.l2_norm() <= (2.0 * PI * PI).powf(-alpha) * s.l2_norm());
        }
    }

    #[test]
    fn eval_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_series(&mut rng, 20);
        let pts: Vec<Point2> = (0..25).map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
        let v = eval_series(&s, &pts).unwrap();
        for (p, x) in pts.iter().zip(&v) {
            assert!((x - brute_sum(&s, *p)).abs() < 1e-12);
        }
        let one = SineSeries::from_modes(3, &[(1, 1, 1.0)]).unwrap();
        assert!((eval_series(&one, &[[0.5, 0.5]]).unwrap()[0] - 2.0).abs() < 1e-15);
        assert_eq!(eval_series(&s, &[[0.5, 1.0], [0.0, 0.3]]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn finite_mode_sums_are_exact() {
        let o = FracOrder::new(2, 0.65).unwrap();
        let modes = [(1, 2, 0.8), (3, 3, -0.4), (5, 1, 1.1)];
        let f = |x: f64, y: f64| modes.iter().map(|&(m, n, c)| c * mode(m, n)(x, y)).sum::<f64>();
        let u = apply_inverse_frac(&project(f, DEFAULT_ORDER, DEFAULT_QUAD).unwrap(), o).unwrap();
        let pts = [[0.1, 0.2], [0.77, 0.5], [0.33, 0.91]];
        let v = eval_series(&u, &pts).unwrap();
        for (p, x) in pts.iter().zip(&v) {
            let exact: f64 = modes
                .iter()
                .map(|&(m, n, c)| -eigenvalue(m, n).powf(-0.65) * c * mode(m, n)(p[0], p[1]))
                .sum();
            assert!((x - exact).abs() < 1e-10);
        }
    }
}
