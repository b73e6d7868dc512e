//! Helpers shared by the integration tests.
#![allow(dead_code)]

use algebroid_lab::model_file::Model;
use rand::Rng;

pub const COORDS: [&str; 3] = ["x1", "x2", "x3"];

/// A random expression string over `x1..x3` in the text grammar, with
/// explicit parentheses around compound operands.
pub fn random_expr_text<R: Rng>(rng: &mut R, depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..5) {
            0 | 1 => COORDS[rng.gen_range(0..3)].to_string(),
            2 => format!("{}", rng.gen_range(1..10)),
            3 => format!("{:.3}", rng.gen_range(0.1..5.0)),
            _ => format!("{}e{}", rng.gen_range(1..9), rng.gen_range(-2..2)),
        };
    }
    let a = random_expr_text(rng, depth - 1);
    match rng.gen_range(0..10) {
        0 => format!("({a}) + ({})", random_expr_text(rng, depth - 1)),
        1 => format!("({a}) - ({})", random_expr_text(rng, depth - 1)),
        2 | 3 => format!("({a}) * ({})", random_expr_text(rng, depth - 1)),
        4 => format!("({a}) / ({})", random_expr_text(rng, depth - 1)),
        5 => {
            let k = ["2", "3", "-1", "0.5", "1.5", "-2"][rng.gen_range(0..6)];
            format!("({a})^{k}")
        }
        6 => format!("-({a})"),
        _ => {
            let f = ["sin", "cos", "tan", "exp", "log", "sqrt"][rng.gen_range(0..6)];
            format!("{f}({a})")
        }
    }
}

/// Derivative of `f` along coordinate `i` at `p` by fourth-order central
/// differences on a shrinking sequence of steps, keeping the estimate that
/// agrees best with its predecessor. Returns None if any stencil value is
/// undefined.
pub fn central_difference(f: &dyn Fn(&[f64]) -> Option<f64>, p: &[f64], i: usize) -> Option<f64> {
    let stencil = |h: f64| {
        let at = |s: f64| {
            let mut q = p.to_vec();
            q[i] += s * h;
            f(&q)
        };
        Some((at(-2.0)? - 8.0 * at(-1.0)? + 8.0 * at(1.0)? - at(2.0)?) / (12.0 * h))
    };
    let mut h = 1e-2 * p[i].abs().max(1.0);
    let mut prev = stencil(h);
    let (mut best, mut gap) = (None, f64::INFINITY);
    for _ in 0..8 {
        h /= 4.0;
        let cur = stencil(h);
        if let (Some(a), Some(b)) = (prev, cur) {
            if (a - b).abs() < gap {
                gap = (a - b).abs();
                best = Some(b);
            }
        }
        prev = cur;
    }
    best
}

/// Random points near the analysis points of a model.
pub fn points_near<R: Rng>(model: &Model, count: usize, spread: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let base = &model.analysis.points;
    (0..count)
        .map(|_| {
            let p = &base[rng.gen_range(0..base.len())];
            p.iter().map(|v| v + rng.gen_range(-spread..spread)).collect()
        })
        .collect()
}

pub fn uniform_points<R: Rng>(dim: usize, count: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(lo..hi)).collect()).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
