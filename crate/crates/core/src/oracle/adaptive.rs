use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1], positive half.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub(crate) const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Quad {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Seg {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

/// Shared evaluation counter with a hard cap.
#[derive(Debug)]
pub(crate) struct Budget {
    used: AtomicUsize,
    limit: usize,
}

impl Budget {
    pub fn new(limit: usize) -> Self {
        Budget {
            used: AtomicUsize::new(0),
            limit,
        }
    }

    pub fn charge(&self, n: usize) -> Result<()> {
        let used = self.used.fetch_add(n, Ordering::Relaxed) + n;
        if used > self.limit {
            return Err(Error::Oracle(format!("evaluation budget of {} exceeded", self.limit)));
        }
        Ok(())
    }

    pub fn used(&self) -> usize {
        self.used.load(Ordering::Relaxed)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let (f1, f2) = (f(c - h * XGK[j]), f(c + h * XGK[j]));
        k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let (k, g) = (k * h, g * h);
    if !k.is_finite() || !g.is_finite() {
        return Err(Error::Data(format!("integrand is not finite on [{a}, {b}]")));
    }
    Ok((k, (k - g).abs()))
}

fn seg<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Result<Seg> {
    let (value, error) = kronrod(f, a, b)?;
    Ok(Seg {
        a,
        b,
        value,
        error,
        depth,
    })
}

/// Adaptive 7/15 Gauss-Kronrod quadrature over consecutive `breaks`.
///
/// Refinement runs in rounds: every segment whose error exceeds its
/// length-proportional share of `tol` is bisected. Segments are kept in
/// order and summed left to right, so the result does not depend on
/// scheduling when `parallel` is set.
pub(crate) fn integrate<F>(f: &F, breaks: &[f64], tol: f64, parallel: bool, budget: &Budget) -> Result<Quad>
where
    F: Fn(f64) -> f64 + Sync,
{
    let total_len: f64 = breaks.windows(2).map(|w| w[1] - w[0]).sum();
    if breaks.len() < 2 || !(total_len > 0.0) {
        return Ok(Quad { value: 0.0, error: 0.0 });
    }
    let base: Vec<(f64, f64)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect();
    budget.charge(15 * base.len())?;
    let mut segs: Vec<Seg> = if parallel {
        base.par_iter().map(|&(a, b)| seg(f, a, b, 0)).collect::<Result<_>>()?
    } else {
        base.iter().map(|&(a, b)| seg(f, a, b, 0)).collect::<Result<_>>()?
    };
    loop {
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if err <= tol {
            break;
        }
        let split: Vec<usize> = (0..segs.len())
            .filter(|&i| {
                let s = &segs[i];
                s.depth < MAX_DEPTH && s.error > tol * (s.b - s.a) / total_len
            })
            .collect();
        if split.is_empty() {
            break;
        }
        budget.charge(30 * split.len())?;
        let work = |&i: &usize| -> Result<(Seg, Seg)> {
            let s = segs[i];
            let m = 0.5 * (s.a + s.b);
            Ok((seg(f, s.a, m, s.depth + 1)?, seg(f, m, s.b, s.depth + 1)?))
        };
        let children: Vec<(Seg, Seg)> = if parallel {
            split.par_iter().map(work).collect::<Result<_>>()?
        } else {
            split.iter().map(work).collect::<Result<_>>()?
        };
        let mut next = Vec::with_capacity(segs.len() + split.len());
        let mut c = 0;
        for (i, s) in segs.iter().enumerate() {
            if c < split.len() && split[c] == i {
                next.push(children[c].0);
                next.push(children[c].1);
                c += 1;
            } else {
                next.push(*s);
            }
        }
        segs = next;
    }
    Ok(Quad {
        value: segs.iter().map(|s| s.value).sum(),
        error: segs.iter().map(|s| s.error).sum(),
    })
}
