//! Special functions and kernel normalisation constants.
//!
//! The fundamental solution of `(-Δ)^α` on `R^d` is the Riesz kernel
//! `φ_α(x) = C(d, α) |x|^{2α-d}` with
//! `C(d, α) = Γ(d/2 - α) / (4^α π^{d/2} Γ(α))`, normalised so that its Fourier
//! transform is exactly `|ξ|^{-2α}` under `Fu(ξ) = ∫ u(x) e^{-i⟨ξ,x⟩} dx`.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Fractional order together with the spatial dimension it acts in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    alpha: f64,
    dim: usize,
}

impl FracOrder {
    /// Order for which the single-layer boundary equation is uniquely solvable:
    /// `α ∈ (1/2, 3/4]` in 2D and `α ∈ (1/2, 1)` in 3D.
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        check_dim(dim)?;
        let ok = match dim {
            2 => alpha > 0.5 && alpha <= 0.75,
            _ => alpha > 0.5 && alpha < 1.0,
        };
        if !ok || !alpha.is_finite() {
            return Err(Error::Config(format!(
                "alpha out of admissible range (d={dim}, alpha={alpha})"
            )));
        }
        Ok(FracOrder { alpha, dim })
    }

    /// Order for which the kernel and its constants are defined, `α ∈ (0, 1)`.
    ///
    /// Used by the verification code, which also probes the volume potential
    /// outside the boundary-solvability range.
    pub fn kernel(dim: usize, alpha: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha out of admissible range (d={dim}, alpha={alpha})"
            )));
        }
        Ok(FracOrder { alpha, dim })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the boundary single-layer equation is covered for this order.
    pub fn is_solvable(&self) -> bool {
        match self.dim {
            2 => self.alpha > 0.5 && self.alpha <= 0.75,
            _ => self.alpha > 0.5 && self.alpha < 1.0,
        }
    }

    /// Homogeneity degree `2α - d` of the fundamental solution.
    pub fn kernel_exponent(&self) -> f64 {
        2.0 * self.alpha - self.dim as f64
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::Config(format!("dimension must be 2 or 3, got {dim}")))
    }
}

/// Constants of the Riesz kernel and of the hypersingular integral form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    pub riesz_c: f64,
    pub flap_c: f64,
}

impl KernelConstants {
    pub fn new(order: FracOrder) -> Self {
        KernelConstants {
            riesz_c: riesz_constant(order),
            flap_c: flap_constant(order),
        }
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    Ok(gamma_real(x))
}

/// Gamma function on the real line minus the poles, via Lanczos with reflection.
pub(crate) fn gamma_real(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma_real(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEFFS[0];
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

const J0_SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind of order zero, for `s ≥ 0`.
///
/// Power series below `s = 12`, Hankel asymptotic expansion above.
pub fn bessel_j0(s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("bessel_j0 requires s >= 0, got {s}")));
    }
    Ok(j0_unchecked(s))
}

/// `J₀(|s|)`, the even extension. Callers that integrate against `J₀` over
/// symmetric ranges use this instead of rejecting negative arguments.
pub fn bessel_j0_even(s: f64) -> f64 {
    j0_unchecked(s.abs())
}

pub(crate) fn j0_unchecked(s: f64) -> f64 {
    if s <= J0_SERIES_LIMIT {
        j0_series(s)
    } else {
        j0_hankel(s)
    }
}

fn j0_series(s: f64) -> f64 {
    let q = -0.25 * s * s;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-3) {
            break;
        }
        k += 1.0;
    }
    sum
}

fn j0_hankel(s: f64) -> f64 {
    // a_k = ((1)(9)(25)...((2k-1)^2)) / (k! 8^k), alternating between P and Q.
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        a *= (2.0 * kf - 1.0).powi(2) / (kf * 8.0 * s);
        if a >= prev {
            break;
        }
        prev = a;
        // P = 1 - a2 + a4 - ..., Q = -a1 + a3 - ...
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q -= sign * a;
        } else {
            p += sign * a;
        }
        if a < 1e-17 {
            break;
        }
    }
    let chi = s - FRAC_PI_4;
    (2.0 / (PI * s)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Riesz constant `C(d, α) = Γ(d/2 - α) / (4^α π^{d/2} Γ(α))`.
pub fn riesz_constant(order: FracOrder) -> f64 {
    let d = order.dim() as f64;
    let a = order.alpha();
    gamma_real(0.5 * d - a) / (4f64.powf(a) * PI.powf(0.5 * d) * gamma_real(a))
}

/// Magnitude `4^α Γ(d/2 + α) / (π^{d/2} |Γ(-α)|)` of the hypersingular-integral
/// constant. With this positive constant,
/// `-(-Δ)^α u(x) = flap_c · p.v.∫ (u(x+z) - u(x)) / |z|^{d+2α} dz`.
pub fn flap_constant(order: FracOrder) -> f64 {
    let d = order.dim() as f64;
    let a = order.alpha();
    4f64.powf(a) * gamma_real(0.5 * d + a) / (PI.powf(0.5 * d) * gamma_real(-a).abs())
}

/// `φ_α(x) = C(d, α) |x|^{2α-d}` for `x ≠ 0`.
pub fn fundamental_solution(order: FracOrder, x: &[f64]) -> Result<f64> {
    if x.len() != order.dim() {
        return Err(Error::Domain(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            order.dim()
        )));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::Singularity(
            "fundamental solution evaluated at the origin".into(),
        ));
    }
    Ok(riesz_constant(order) * r.powf(order.kernel_exponent()))
}

/// Surface measure of the unit sphere in `R^d`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    match dim {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            let h = 0.5 * dim as f64;
            2.0 * PI.powf(h) / gamma_real(h)
        }
    }
}
