//! One-dimensional optimizers over a single excitation angle.
//!
//! With every other angle fixed, the energy of an ansatz as a function of one
//! qubit-excitation angle is exactly
//! `E(t) = c0 + c1 cos t + s1 sin t + c2 cos 2t + s2 sin 2t`.
//! Five samples determine it, after which minimization and derivatives are
//! free.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::util::wrap_angle;

/// Sample offsets used by [`reconstruct_1d`]: five equispaced points on the
/// circle, the first one at the warm start itself.
pub const RECONSTRUCTION_OFFSETS: [f64; 5] = [0.0, 2.0 * PI / 5.0, -2.0 * PI / 5.0, 4.0 * PI / 5.0, -4.0 * PI / 5.0];

pub const GRID_POINTS: usize = 1024;
pub const NEWTON_PROBE: f64 = 1e-3;
pub const CURVATURE_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigLandscape {
    pub c0: f64,
    pub c1: f64,
    pub s1: f64,
    pub c2: f64,
    pub s2: f64,
}

impl TrigLandscape {
    pub fn value(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let (s2, c2) = (2.0 * theta).sin_cos();
        self.c0 + self.c1 * c + self.s1 * s + self.c2 * c2 + self.s2 * s2
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        gradient_1d(self, theta)
    }

    pub fn second_derivative(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let (s2, c2) = (2.0 * theta).sin_cos();
        -self.c1 * c - self.s1 * s - 4.0 * self.c2 * c2 - 4.0 * self.s2 * s2
    }
}

/// Fits the landscape from exactly five calls of `energy` at
/// `theta0 + RECONSTRUCTION_OFFSETS`, in that order.
pub fn reconstruct_1d(mut energy: impl FnMut(f64) -> f64, theta0: f64) -> TrigLandscape {
    let samples: Vec<f64> = RECONSTRUCTION_OFFSETS.iter().map(|u| energy(theta0 + u)).collect();
    let mut a = [0.0; 3];
    let mut b = [0.0; 3];
    for (u, e) in RECONSTRUCTION_OFFSETS.iter().zip(&samples) {
        for m in 0..3 {
            let (s, c) = (m as f64 * u).sin_cos();
            a[m] += e * c;
            b[m] += e * s;
        }
    }
    let a0 = a[0] / 5.0;
    let (a1, b1, a2, b2) = (0.4 * a[1], 0.4 * b[1], 0.4 * a[2], 0.4 * b[2]);
    // shift from the local variable u = t - theta0 back to t
    let (s, c) = theta0.sin_cos();
    let (s2, c2) = (2.0 * theta0).sin_cos();
    TrigLandscape {
        c0: a0,
        c1: a1 * c - b1 * s,
        s1: a1 * s + b1 * c,
        c2: a2 * c2 - b2 * s2,
        s2: a2 * s2 + b2 * c2,
    }
}

/// `dE/dt` of the landscape.
pub fn gradient_1d(l: &TrigLandscape, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (2.0 * theta).sin_cos();
    -l.c1 * s + l.s1 * c - 2.0 * l.c2 * s2 + 2.0 * l.s2 * c2
}

fn same_energy(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * a.abs().max(b.abs()).max(1.0)
}

/// Global minimizer over `[-pi, pi)`: grid seed, then safeguarded Newton on
/// each grid-local minimum. Ties go to the smallest `|theta|`.
pub fn minimize_1d(l: &TrigLandscape) -> (f64, f64) {
    let n = GRID_POINTS;
    let h = 2.0 * PI / n as f64;
    let grid: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let t = -PI + h * k as f64;
            (t, l.value(t))
        })
        .collect();
    let mut best: Option<(f64, f64)> = None;
    for k in 0..n {
        let e = grid[k].1;
        if e > grid[(k + n - 1) % n].1 || e > grid[(k + 1) % n].1 {
            continue;
        }
        let (t, e) = polish(l, grid[k].0, h);
        let t = wrap_angle(t);
        best = Some(match best {
            None => (t, e),
            Some((bt, be)) => {
                if same_energy(e, be) {
                    if t.abs() < bt.abs() {
                        (t, e.min(be))
                    } else {
                        (bt, be.min(e))
                    }
                } else if e < be {
                    (t, e)
                } else {
                    (bt, be)
                }
            }
        });
    }
    let (t, _) = best.expect("a periodic grid always has a minimum");
    (t, l.value(t))
}

fn polish(l: &TrigLandscape, seed: f64, h: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (seed - h, seed + h);
    let (glo, ghi) = (l.derivative(lo), l.derivative(hi));
    if !(glo < 0.0 && ghi > 0.0) {
        return (seed, l.value(seed));
    }
    let mut t = seed;
    for _ in 0..100 {
        let g = l.derivative(t);
        if g.abs() < 1e-12 {
            break;
        }
        if g < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let curv = l.second_derivative(t);
        let newton = t - g / curv;
        t = if curv > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            break;
        }
    }
    let e = l.value(t);
    let es = l.value(seed);
    if e <= es {
        (t, e)
    } else {
        (seed, es)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Central-difference displacement, radians.
    pub delta: f64,
    /// Step clip, radians.
    pub max_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            delta: NEWTON_PROBE,
            max_step: 0.5,
        }
    }
}

/// One clipped Newton step from central differences. Calls `energy` exactly
/// three times: at `theta0`, `theta0 + delta`, `theta0 - delta`.
///
/// Where the curvature is not above [`CURVATURE_FLOOR`] the step is a full
/// `max_step` downhill; a vanishing gradient leaves `theta0` unchanged.
pub fn newton_1d(mut energy: impl FnMut(f64) -> f64, theta0: f64, opts: NewtonOptions) -> f64 {
    let d = opts.delta;
    let e0 = energy(theta0);
    let ep = energy(theta0 + d);
    let em = energy(theta0 - d);
    let g = (ep - em) / (2.0 * d);
    let curv = (ep - 2.0 * e0 + em) / (d * d);
    if g.abs() < 1e-12 {
        return theta0;
    }
    if curv > CURVATURE_FLOOR {
        theta0 - (g / curv).clamp(-opts.max_step, opts.max_step)
    } else {
        theta0 - opts.max_step * g.signum()
    }
}

/// Parabola through `theta0 - spread`, `theta0`, `theta0 + spread` (three
/// calls). Returns the vertex clipped to `theta0 +/- 2 spread`, or the best
/// probe when the fit is not convex.
pub fn parabolic_1d(mut energy: impl FnMut(f64) -> f64, theta0: f64, spread: f64) -> f64 {
    let e0 = energy(theta0);
    let em = energy(theta0 - spread);
    let ep = energy(theta0 + spread);
    let a = (ep + em - 2.0 * e0) / (2.0 * spread * spread);
    let b = (ep - em) / (2.0 * spread);
    if a > 0.0 {
        theta0 + (-b / (2.0 * a)).clamp(-2.0 * spread, 2.0 * spread)
    } else if em < e0 && em <= ep {
        theta0 - spread
    } else if ep < e0 {
        theta0 + spread
    } else {
        theta0
    }
}

/// Generic bracketing plus golden-section search started at `theta0`; the
/// number of calls depends on the landscape. Returns `(theta, energy)`.
pub fn golden_section_1d(mut energy: impl FnMut(f64) -> f64, theta0: f64, initial_step: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let e0 = energy(theta0);
    let mut step = initial_step;
    let mut e1 = energy(theta0 + step);
    if e1 > e0 {
        step = -step;
        e1 = energy(theta0 + step);
        if e1 > e0 {
            // minimum bracketed by theta0 +/- initial_step
            return golden(&mut energy, theta0 - initial_step.abs(), theta0 + initial_step.abs(), tol, (theta0, e0));
        }
    }
    // walk downhill with growing steps until the energy rises
    let (mut a, mut b) = (theta0, theta0 + step);
    let mut eb = e1;
    let mut best = if e1 < e0 { (b, e1) } else { (theta0, e0) };
    for _ in 0..40 {
        step *= 1.0 / INV_PHI;
        let c = b + step;
        let ec = energy(c);
        if ec < best.1 {
            best = (c, ec);
        }
        if ec > eb || (c - theta0).abs() > PI {
            let (lo, hi) = if a < c { (a, c) } else { (c, a) };
            return golden(&mut energy, lo, hi, tol, best);
        }
        a = b;
        b = c;
        eb = ec;
    }
    best
}

fn golden(energy: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64, mut best: (f64, f64)) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = energy(x1);
    let mut f2 = energy(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = energy(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = energy(x2);
        }
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f < best.1 {
                best = (x, f);
            }
        }
    }
    best
}
