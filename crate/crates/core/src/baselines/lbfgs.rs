//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LbfgsOptions {
    pub memory: usize,
    /// Stop once `max |grad|` falls below this.
    pub grad_tol: f64,
    pub max_iterations: usize,
    pub c1: f64,
    pub c2: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            memory: 10,
            grad_tol: 1e-8,
            max_iterations: 500,
            c1: 1e-4,
            c2: 0.9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn axpy(x: &[f64], alpha: f64, p: &[f64]) -> Vec<f64> {
    x.iter().zip(p).map(|(a, b)| a + alpha * b).collect()
}

struct Point {
    alpha: f64,
    value: f64,
    slope: f64,
    gradient: Vec<f64>,
}

/// Minimizes `value` from `x0`. Never returns a point above `value(x0)`.
pub fn lbfgs(
    value: impl Fn(&[f64]) -> f64,
    gradient: impl Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    opts: &LbfgsOptions,
) -> Minimum {
    let mut x = x0.to_vec();
    let mut f = value(&x);
    if x.is_empty() {
        return Minimum {
            x,
            value: f,
            gradient_norm: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let mut g = gradient(&x);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    for iter in 0..opts.max_iterations {
        let gnorm = inf_norm(&g);
        if gnorm < opts.grad_tol {
            return Minimum {
                x,
                value: f,
                gradient_norm: gnorm,
                iterations: iter,
                converged: true,
            };
        }
        let mut p = two_loop(&g, &history);
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            history.clear();
            p = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let alpha0 = if history.is_empty() { (1.0 / gnorm).min(1.0) } else { 1.0 };
        let Some(pt) = line_search(&value, &gradient, &x, f, slope, &p, alpha0, opts) else {
            return Minimum {
                x,
                value: f,
                gradient_norm: gnorm,
                iterations: iter,
                converged: false,
            };
        };
        let x_new = axpy(&x, pt.alpha, &p);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = pt.gradient.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() && sy > 0.0 {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = x_new;
        f = pt.value;
        g = pt.gradient;
    }
    let gnorm = inf_norm(&g);
    Minimum {
        x,
        value: f,
        gradient_norm: gnorm,
        iterations: opts.max_iterations,
        converged: gnorm < opts.grad_tol,
    }
}

fn two_loop(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q
}

#[allow(clippy::too_many_arguments)]
fn line_search(
    value: &impl Fn(&[f64]) -> f64,
    gradient: &impl Fn(&[f64]) -> Vec<f64>,
    x: &[f64],
    f0: f64,
    slope0: f64,
    p: &[f64],
    alpha0: f64,
    opts: &LbfgsOptions,
) -> Option<Point> {
    let probe = |alpha: f64| value(&axpy(x, alpha, p));
    let full = |alpha: f64, v: f64| {
        let gr = gradient(&axpy(x, alpha, p));
        Point {
            alpha,
            value: v,
            slope: dot(&gr, p),
            gradient: gr,
        }
    };
    let armijo = |alpha: f64, v: f64| v <= f0 + opts.c1 * alpha * slope0;
    let curvature = |s: f64| s.abs() <= -opts.c2 * slope0;

    let mut prev = Point {
        alpha: 0.0,
        value: f0,
        slope: slope0,
        gradient: Vec::new(),
    };
    let mut alpha = alpha0;
    for i in 0..30 {
        let v = probe(alpha);
        if !armijo(alpha, v) || (i > 0 && v >= prev.value) {
            return zoom(&probe, &full, &armijo, &curvature, prev, alpha, v);
        }
        let pt = full(alpha, v);
        if curvature(pt.slope) {
            return Some(pt);
        }
        if pt.slope >= 0.0 {
            let (hi_alpha, hi_value) = (prev.alpha, prev.value);
            return zoom(&probe, &full, &armijo, &curvature, pt, hi_alpha, hi_value);
        }
        prev = pt;
        alpha *= 2.0;
    }
    (prev.alpha > 0.0).then_some(prev)
}

/// Bracket search between an Armijo point `lo` and `hi`.
fn zoom(
    probe: &impl Fn(f64) -> f64,
    full: &impl Fn(f64, f64) -> Point,
    armijo: &impl Fn(f64, f64) -> bool,
    curvature: &impl Fn(f64) -> bool,
    mut lo: Point,
    mut hi_alpha: f64,
    mut hi_value: f64,
) -> Option<Point> {
    for _ in 0..40 {
        let d = hi_alpha - lo.alpha;
        if d.abs() < 1e-14 * lo.alpha.abs().max(1e-3) {
            break;
        }
        // quadratic through lo (value, slope) and hi (value)
        let denom = 2.0 * (hi_value - lo.value - lo.slope * d);
        let mut alpha = if denom > 0.0 {
            lo.alpha - lo.slope * d * d / denom
        } else {
            lo.alpha + 0.5 * d
        };
        let (a, b) = if d > 0.0 {
            (lo.alpha + 0.1 * d, hi_alpha - 0.1 * d)
        } else {
            (hi_alpha - 0.1 * d, lo.alpha + 0.1 * d)
        };
        if !(alpha >= a.min(b) && alpha <= a.max(b)) {
            alpha = lo.alpha + 0.5 * d;
        }
        let v = probe(alpha);
        if !armijo(alpha, v) || v >= lo.value {
            hi_alpha = alpha;
            hi_value = v;
            continue;
        }
        let pt = full(alpha, v);
        if curvature(pt.slope) {
            return Some(pt);
        }
        if pt.slope * (hi_alpha - lo.alpha) >= 0.0 {
            hi_alpha = lo.alpha;
            hi_value = lo.value;
        }
        lo = pt;
    }
    (lo.alpha != 0.0).then_some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let g = |x: &[f64]| {
            vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ]
        };
        let m = lbfgs(f, g, &[-1.2, 1.0], &LbfgsOptions::default());
        assert!(m.converged, "{m:?}");
        assert!((m.x[0] - 1.0).abs() < 1e-7 && (m.x[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn empty_problem_is_trivially_converged() {
        let m = lbfgs(|_| 2.5, |_| vec![], &[], &LbfgsOptions::default());
        assert!(m.converged);
        assert_eq!(m.value, 2.5);
    }

    #[test]
    fn separable_trig_problem() {
        let f = |x: &[f64]| x.iter().map(|t| t.cos() + 0.3 * (2.0 * t).sin()).sum();
        let g = |x: &[f64]| x.iter().map(|t| -t.sin() + 0.6 * (2.0 * t).cos()).collect();
        let x0 = [0.1, -0.2, 0.4];
        let m = lbfgs(f, g, &x0, &LbfgsOptions::default());
        assert!(m.converged);
        assert!(m.value <= f(&x0));
        assert!(g(&m.x).iter().all(|v| v.abs() < 1e-8));
    }
}
