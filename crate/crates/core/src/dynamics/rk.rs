//! Dormand-Prince 5(4) with FSAL and a standard step-size controller.

#[allow(unused_imports)] // inherent float methods shadow these once std is linked
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions { rtol: 1e-10, atol: 1e-12, max_steps: 1_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive integrator for `y' = f(t, y)` on a fixed-size real state.
///
/// The last accepted step size is kept between calls so consecutive
/// intervals of one trajectory continue smoothly.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    opts: IntegratorOptions,
    h: Option<f64>,
    steps: usize,
}

impl Dopri5 {
    pub fn new(opts: IntegratorOptions) -> Self {
        Dopri5 { opts, h: None, steps: 0 }
    }

    /// Accepted plus rejected steps so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Advances `y` from `t0` to `t1 ≥ t0`.
    pub fn integrate<const N: usize, F>(&mut self, f: F, t0: f64, y: &mut [f64; N], t1: f64) -> Result<()>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        if !(t1 >= t0) {
            return Err(Error::InvalidArgument { name: "t1", value: t1 });
        }
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(());
        }
        let IntegratorOptions { rtol, atol, .. } = self.opts;
        let mut t = t0;
        let mut k1 = f(t, y);
        let mut h = self.h.unwrap_or_else(|| initial_step(y, &k1, rtol, atol)).min(span);

        loop {
            let remaining = t1 - t;
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h <= 16.0 * f64::EPSILON * t.abs().max(span) {
                return Err(Error::StepUnderflow { t, h });
            }
            self.steps += 1;
            if self.steps > self.opts.max_steps {
                return Err(Error::TooManySteps { t });
            }

            let stage = |coef: &[(f64, &[f64; N])]| -> [f64; N] {
                core::array::from_fn(|i| y[i] + h * coef.iter().map(|(c, k)| c * k[i]).sum::<f64>())
            };
            let k2 = f(t + C2 * h, &stage(&[(A21, &k1)]));
            let k3 = f(t + C3 * h, &stage(&[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * h, &stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(t + C5 * h, &stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(t + h, &stage(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y_new = stage(&[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let t_new = if last { t1 } else { t + h };
            let k7 = f(t_new, &y_new);

            let mut acc = 0.0;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = atol + rtol * y[i].abs().max(y_new[i].abs());
                acc += (e / scale) * (e / scale);
            }
            let err = (acc / N as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::StepUnderflow { t, h });
            }

            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = t_new;
                *y = y_new;
                k1 = k7;
                if last {
                    return Ok(());
                }
                h *= factor;
                // a step truncated at t1 would understate the next interval
                self.h = Some(h);
            } else {
                h *= factor.min(1.0);
            }
        }
    }
}

fn initial_step<const N: usize>(y: &[f64; N], dy: &[f64; N], rtol: f64, atol: f64) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let scale = atol + rtol * y[i].abs();
        d0 += (y[i] / scale).powi(2);
        d1 += (dy[i] / scale).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}
