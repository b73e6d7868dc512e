//! Fixed-step integration of mechanical control systems, Euler-Lagrange
//! residuals along trajectories and Monte Carlo sampling of reachable sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::connections::Projector;
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::linalg;
use crate::systems::MechSystem;

/// Piecewise-constant controls: `(duration, values)` pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    inputs: usize,
    pieces: Vec<(f64, Vec<f64>)>,
}

impl ControlSchedule {
    pub fn new(inputs: usize, pieces: Vec<(f64, Vec<f64>)>) -> Result<ControlSchedule> {
        for (d, u) in &pieces {
            if !(*d > 0.0) || !d.is_finite() {
                return Err(Error::Invalid(format!("piece durations must be positive, got {d}")));
            }
            if u.len() != inputs {
                return Err(Error::Dimension(format!("control values must have {inputs} entries")));
            }
        }
        Ok(ControlSchedule { inputs, pieces })
    }

    /// Zero controls over `horizon`; an empty schedule when the horizon is 0.
    pub fn zero(inputs: usize, horizon: f64) -> Result<ControlSchedule> {
        ControlSchedule::constant(vec![0.0; inputs], horizon)
    }

    pub fn constant(values: Vec<f64>, horizon: f64) -> Result<ControlSchedule> {
        let k = values.len();
        if horizon == 0.0 {
            return ControlSchedule::new(k, Vec::new());
        }
        ControlSchedule::new(k, vec![(horizon, values)])
    }

    /// `pieces` pieces of equal length with values uniform in `[-bound, bound]`.
    pub fn random<R: Rng>(inputs: usize, horizon: f64, pieces: usize, bound: f64, rng: &mut R) -> Result<ControlSchedule> {
        if horizon == 0.0 || pieces == 0 {
            return ControlSchedule::new(inputs, Vec::new());
        }
        let d = horizon / pieces as f64;
        let p = (0..pieces)
            .map(|_| (d, (0..inputs).map(|_| rng.gen_range(-bound..=bound)).collect()))
            .collect();
        ControlSchedule::new(inputs, p)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn pieces(&self) -> &[(f64, Vec<f64>)] {
        &self.pieces
    }

    pub fn horizon(&self) -> f64 {
        self.pieces.iter().map(|p| p.0).sum()
    }
}

/// Sampled states `(x, y)` with the controls applied on each step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<Vec<f64>>,
    /// Control in force on `[t_i, t_{i+1})`; the last entry repeats.
    pub controls: Vec<Vec<f64>>,
    /// Indices where a new schedule piece starts.
    pub switches: Vec<usize>,
    pub schedule: ControlSchedule,
    /// Time at which the state stopped being finite or evaluable.
    pub diverged: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with header `t,x1..xn,y1..yl,u1..uk`.
    pub fn to_csv(&self, n: usize, l: usize) -> String {
        let k = self.schedule.inputs();
        let mut cols = vec!["t".to_string()];
        cols.extend((1..=n).map(|i| format!("x{i}")));
        cols.extend((1..=l).map(|i| format!("y{i}")));
        cols.extend((1..=k).map(|i| format!("u{i}")));
        let mut out = cols.join(",");
        out.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = std::iter::once(self.times[i])
                .chain(self.xs[i].iter().cloned())
                .chain(self.ys[i].iter().cloned())
                .chain(self.controls[i].iter().cloned())
                .map(|v| v.to_string())
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// How constrained systems are integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// Constrained equations, velocities projected onto D after every step.
    Reduced,
    /// Constrained equations without projection.
    Full,
}

/// Right-hand side of `x' = rho(x) y`,
/// `y' = -S(y, y)/2 - grad V + u_i eta_i`, compiled to one tape.
struct Field {
    n: usize,
    l: usize,
    k: usize,
    tape: Tape,
    has_potential: bool,
    projector: Option<Projector>,
}

impl Field {
    fn new(sys: &MechSystem) -> Result<Field> {
        let data = sys.derive()?;
        let (n, l) = (sys.algebroid.base_dim(), sys.rank());
        let k = data.inputs.len();
        let mut out: Vec<Expr> = Vec::new();
        for i in 0..n {
            out.extend((0..l).map(|a| sys.algebroid.rho(i, a).clone()));
        }
        for a in 0..l {
            for b in 0..l {
                out.extend((0..l).map(|c| data.connection.sym(a, b, c)));
            }
        }
        for s in &data.inputs {
            out.extend(s.0.iter().cloned());
        }
        // grad V by a pointwise solve, so any metric works
        let has_potential = sys.potential.as_const().is_none();
        if has_potential {
            out.extend(crate::connections::differential(&sys.algebroid, &sys.potential).0);
            out.extend(sys.metric.rows().iter().flatten().cloned());
        }
        Ok(Field { n, l, k, tape: Tape::new(&out), has_potential, projector: sys.constraint.clone() })
    }

    fn rhs(&self, x: &[f64], y: &[f64], u: &[f64], buf: &mut Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
        let (n, l, k) = (self.n, self.l, self.k);
        buf.resize(self.tape.len(), 0.0);
        self.tape.eval_into(x, buf)?;
        let rho = &buf[..n * l];
        let s = &buf[n * l..n * l + l * l * l];
        let eta = &buf[n * l + l * l * l..n * l + l * l * l + k * l];
        let dx: Vec<f64> = (0..n).map(|i| (0..l).map(|a| rho[i * l + a] * y[a]).sum()).collect();
        let mut dy = vec![0.0; l];
        for (a, d) in dy.iter_mut().enumerate() {
            let mut q = 0.0;
            for b in 0..l {
                for c in 0..l {
                    q += s[(a * l + b) * l + c] * y[b] * y[c];
                }
            }
            *d = -0.5 * q + (0..k).map(|i| u[i] * eta[i * l + a]).sum::<f64>();
        }
        if self.has_potential {
            let off = n * l + l * l * l + k * l;
            let dv = &buf[off..off + l];
            let g = nalgebra::DMatrix::from_row_slice(l, l, &buf[off + l..off + l + l * l]);
            let grad = g
                .lu()
                .solve(&nalgebra::DVector::from_column_slice(dv))
                .ok_or_else(|| Error::SingularMetric { point: x.to_vec() })?;
            let grad: Vec<f64> = match &self.projector {
                Some(p) => project(&p.eval(x)?, grad.as_slice()),
                None => grad.iter().cloned().collect(),
            };
            for (d, gv) in dy.iter_mut().zip(grad) {
                *d -= gv;
            }
        }
        Ok((dx, dy))
    }
}

fn project(p: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    p.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn axpy(a: &[f64], h: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + h * y).collect()
}

/// Integrate from `(x0, y0)` under `sched` with the classical fourth-order
/// Runge-Kutta method and step close to `h` (each piece is split evenly).
/// Non-finite states end the trajectory early with `diverged` set.
pub fn integrate(
    sys: &MechSystem,
    x0: &[f64],
    y0: &[f64],
    sched: &ControlSchedule,
    h: f64,
    mode: ConstraintMode,
) -> Result<Trajectory> {
    let (n, l) = (sys.algebroid.base_dim(), sys.rank());
    if !(h > 0.0) {
        return Err(Error::Invalid(format!("step must be positive, got {h}")));
    }
    if x0.len() != n || y0.len() != l {
        return Err(Error::Dimension(format!("initial state must be ({n}, {l})")));
    }
    let data_inputs = match &sys.actuation {
        crate::systems::Actuation::Inputs(v) => v.len(),
        crate::systems::Actuation::Forces(v) => v.len(),
    };
    if sched.inputs() != data_inputs {
        return Err(Error::Dimension(format!("schedule has {} inputs, system has {data_inputs}", sched.inputs())));
    }
    let field = Field::new(sys)?;
    let mut y = y0.to_vec();
    if let Some(p) = &sys.constraint {
        let py = project(&p.eval(x0)?, &y);
        if linalg::norm(&axpy(&py, -1.0, &y)) > 1e-12 {
            log::warn!("initial velocity is not in the constraint subbundle; projecting it");
        }
        y = py;
    }
    let mut tr = Trajectory {
        times: Vec::new(),
        xs: Vec::new(),
        ys: Vec::new(),
        controls: Vec::new(),
        switches: Vec::new(),
        schedule: sched.clone(),
        diverged: None,
    };
    if sched.pieces().is_empty() {
        return Ok(tr);
    }
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut buf = Vec::new();
    let reduce = mode == ConstraintMode::Reduced && sys.constraint.is_some();
    for (d, u) in sched.pieces() {
        tr.switches.push(tr.times.len());
        let steps = (d / h).round().max(1.0) as usize;
        let hs = d / steps as f64;
        let t0 = t;
        for s in 0..steps {
            tr.times.push(t);
            tr.xs.push(x.clone());
            tr.ys.push(y.clone());
            tr.controls.push(u.clone());
            let step = (|| -> Result<(Vec<f64>, Vec<f64>)> {
                let (k1x, k1y) = field.rhs(&x, &y, u, &mut buf)?;
                let (k2x, k2y) = field.rhs(&axpy(&x, hs / 2.0, &k1x), &axpy(&y, hs / 2.0, &k1y), u, &mut buf)?;
                let (k3x, k3y) = field.rhs(&axpy(&x, hs / 2.0, &k2x), &axpy(&y, hs / 2.0, &k2y), u, &mut buf)?;
                let (k4x, k4y) = field.rhs(&axpy(&x, hs, &k3x), &axpy(&y, hs, &k3y), u, &mut buf)?;
                let comb = |v: &[f64], a: &[f64], b: &[f64], c: &[f64], e: &[f64]| -> Vec<f64> {
                    (0..v.len()).map(|i| v[i] + hs / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + e[i])).collect()
                };
                let nx = comb(&x, &k1x, &k2x, &k3x, &k4x);
                let mut ny = comb(&y, &k1y, &k2y, &k3y, &k4y);
                if reduce {
                    ny = project(&sys.constraint.as_ref().expect("checked").eval(&nx)?, &ny);
                }
                Ok((nx, ny))
            })();
            match step {
                Ok((nx, ny)) if nx.iter().chain(&ny).all(|v| v.is_finite()) => {
                    x = nx;
                    y = ny;
                }
                _ => {
                    tr.diverged = Some(t);
                    return Ok(tr);
                }
            }
            t = t0 + (s + 1) as f64 * hs;
        }
    }
    tr.times.push(t);
    tr.xs.push(x);
    tr.ys.push(y);
    tr.controls.push(sched.pieces().last().expect("non-empty").1.clone());
    Ok(tr)
}

/// `1/2 G(y, y) + V(x)`.
pub fn energy(sys: &MechSystem, x: &[f64], y: &[f64]) -> Result<f64> {
    let g = sys.metric.eval(x)?;
    let kin: f64 = (0..y.len()).map(|a| (0..y.len()).map(|b| g[a][b] * y[a] * y[b]).sum::<f64>()).sum();
    Ok(0.5 * kin + sys.potential.eval(x)?)
}

/// Indices at which a central stencil of half-width `w` stays inside one
/// schedule piece.
fn interior(tr: &Trajectory, w: usize) -> impl Iterator<Item = usize> + '_ {
    (w..tr.len().saturating_sub(w)).filter(move |&i| tr.switches.iter().all(|&s| s == 0 || i + w < s || i >= s + w))
}

/// Max over interior grid points of `|dL - u_l theta_l|`, where
/// `dL_a = d/dt (G y)_a + C^g_{ab} y^b (G y)_g - rho^i_a dL/dx^i` and the
/// time derivative is a central difference on the grid. For constrained
/// systems the residual is projected by `P^T`, which assumes D and its
/// complement are G-orthogonal.
pub fn euler_lagrange_residual(sys: &MechSystem, tr: &Trajectory) -> Result<f64> {
    if tr.len() < 3 {
        return Err(Error::TrajectoryTooShort(tr.len()));
    }
    let (n, l) = (sys.algebroid.base_dim(), sys.rank());
    let raw = sys.raw_inputs()?;
    let k = raw.len();
    let mut out: Vec<Expr> = sys.metric.rows().iter().flatten().cloned().collect();
    for i in 0..n {
        out.extend(sys.metric.rows().iter().flatten().map(|g| g.diff(i)));
    }
    out.extend((0..n).map(|i| sys.potential.diff(i)));
    for i in 0..n {
        out.extend((0..l).map(|a| sys.algebroid.rho(i, a).clone()));
    }
    for g in 0..l {
        for a in 0..l {
            out.extend((0..l).map(|b| sys.algebroid.c(g, a, b).clone()));
        }
    }
    for s in &raw {
        out.extend(s.0.iter().cloned());
    }
    let tape = Tape::new(&out);
    let momentum = |i: usize| -> Result<Vec<f64>> {
        let g = sys.metric.eval(&tr.xs[i])?;
        Ok(project(&g, &tr.ys[i]))
    };
    let mut worst: f64 = 0.0;
    for i in interior(tr, 1) {
        let (x, y) = (&tr.xs[i], &tr.ys[i]);
        let v = tape.eval(x)?;
        let mut o = 0;
        let mut take = |len: usize| {
            let s = &v[o..o + len];
            o += len;
            s
        };
        let g = take(l * l);
        let dg = take(n * l * l);
        let dv = take(n);
        let rho = take(n * l);
        let c = take(l * l * l);
        let eta = take(k * l);
        let p = project(&g.chunks(l).map(|r| r.to_vec()).collect::<Vec<_>>(), y);
        let (pm, pp) = (momentum(i - 1)?, momentum(i + 1)?);
        let dt = tr.times[i + 1] - tr.times[i - 1];
        // dL/dx^i = 1/2 y^T d_i G y - d_i V
        let dl: Vec<f64> = (0..n)
            .map(|j| {
                let q: f64 = (0..l).map(|a| (0..l).map(|b| dg[j * l * l + a * l + b] * y[a] * y[b]).sum::<f64>()).sum();
                0.5 * q - dv[j]
            })
            .collect();
        let u = &tr.controls[i];
        let mut r: Vec<f64> = (0..l)
            .map(|a| {
                let mut e = (pp[a] - pm[a]) / dt;
                for gg in 0..l {
                    for b in 0..l {
                        e += c[(gg * l + a) * l + b] * y[b] * p[gg];
                    }
                }
                e -= (0..n).map(|j| rho[j * l + a] * dl[j]).sum::<f64>();
                // theta_q = G eta_q
                for q in 0..k {
                    e -= u[q] * (0..l).map(|b| g[a * l + b] * eta[q * l + b]).sum::<f64>();
                }
                e
            })
            .collect();
        if let Some(pr) = &sys.constraint {
            let pm = pr.eval(x)?;
            r = (0..l).map(|a| (0..l).map(|b| pm[b][a] * r[b]).sum()).collect();
        }
        worst = worst.max(r.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    Ok(worst)
}

/// Max over interior grid points of `|x' - rho(x) y|`, with `x'` from the
/// fourth-order central stencil.
pub fn admissibility_residual(sys: &MechSystem, tr: &Trajectory) -> Result<f64> {
    if tr.len() < 5 {
        return Err(Error::TrajectoryTooShort(tr.len()));
    }
    let mut worst: f64 = 0.0;
    for i in interior(tr, 2) {
        let h = (tr.times[i + 2] - tr.times[i - 2]) / 4.0;
        let rho = sys.algebroid.anchor_matrix(&tr.xs[i])?;
        let v = rho * nalgebra::DVector::from_column_slice(&tr.ys[i]);
        for j in 0..tr.xs[i].len() {
            let d = (-tr.xs[i + 2][j] + 8.0 * tr.xs[i + 1][j] - 8.0 * tr.xs[i - 1][j] + tr.xs[i - 2][j]) / (12.0 * h);
            worst = worst.max((d - v[j]).abs());
        }
    }
    Ok(worst)
}

/// Mean spacing of upward zero crossings of `values`, linearly interpolated.
pub fn period_from_crossings(times: &[f64], values: &[f64]) -> Option<f64> {
    let ups: Vec<f64> = (1..values.len())
        .filter(|&i| values[i - 1] < 0.0 && values[i] >= 0.0)
        .map(|i| {
            let (a, b) = (values[i - 1], values[i]);
            times[i - 1] + (times[i] - times[i - 1]) * (-a) / (b - a)
        })
        .collect();
    if ups.len() < 2 {
        return None;
    }
    Some((ups[ups.len() - 1] - ups[0]) / (ups.len() - 1) as f64)
}

#[derive(Debug, Clone, Copy)]
pub struct SampleOptions {
    pub horizon: f64,
    pub samples: usize,
    pub bound: f64,
    pub seed: u64,
    pub pieces: usize,
    pub step: f64,
    /// Relative singular-value threshold for the affine-hull ranks.
    pub rank_tol: f64,
}

impl SampleOptions {
    pub fn new(horizon: f64, samples: usize, seed: u64) -> SampleOptions {
        SampleOptions { horizon, samples, bound: 1.0, seed, pieces: 4, step: 1e-2, rank_tol: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct ReachableSample {
    /// Endpoints `(x, y)` of the trajectories that stayed finite.
    pub endpoints: Vec<(Vec<f64>, Vec<f64>)>,
    pub dropped: usize,
    /// Affine-hull rank of the base endpoints.
    pub base_rank: usize,
    /// Affine-hull rank of the endpoints in E coordinates.
    pub full_rank: usize,
}

fn affine_rank(pts: &[Vec<f64>], tol: f64) -> usize {
    let Some(first) = pts.first() else { return 0 };
    let dim = first.len();
    let diffs: Vec<Vec<f64>> = pts[1..].iter().map(|p| axpy(p, -1.0, first)).collect();
    linalg::rank_of_family(&diffs, dim, tol)
}

/// Endpoints of trajectories from `(m, 0)` under random piecewise-constant
/// controls. Each sample draws from its own stream of the seeded generator,
/// so results do not depend on scheduling.
pub fn sample_reachable(sys: &MechSystem, m: &[f64], opts: &SampleOptions) -> Result<ReachableSample> {
    let (n, l) = (sys.algebroid.base_dim(), sys.rank());
    if opts.samples < n + l + 1 {
        return Err(Error::Invalid(format!("at least {} samples are needed", n + l + 1)));
    }
    let k = sys.actuation.len();
    let y0 = vec![0.0; l];
    let ends: Vec<Option<(Vec<f64>, Vec<f64>)>> = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            let sched = ControlSchedule::random(k, opts.horizon, opts.pieces, opts.bound, &mut rng)?;
            let tr = integrate(sys, m, &y0, &sched, opts.step, ConstraintMode::Reduced)?;
            Ok(match (tr.diverged, tr.xs.last(), tr.ys.last()) {
                (None, Some(x), Some(y)) => Some((x.clone(), y.clone())),
                (None, None, None) => Some((m.to_vec(), y0.clone())),
                _ => None,
            })
        })
        .collect::<Result<_>>()?;
    let total = ends.len();
    let endpoints: Vec<(Vec<f64>, Vec<f64>)> = ends.into_iter().flatten().collect();
    let dropped = total - endpoints.len();
    if 2 * dropped > total {
        return Err(Error::TooManyDiverged { dropped, total });
    }
    let base: Vec<Vec<f64>> = endpoints.iter().map(|(x, _)| x.clone()).collect();
    let full: Vec<Vec<f64>> = endpoints.iter().map(|(x, y)| [x.clone(), y.clone()].concat()).collect();
    Ok(ReachableSample {
        base_rank: affine_rank(&base, opts.rank_tol),
        full_rank: affine_rank(&full, opts.rank_tol),
        endpoints,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn mech(f: crate::model_file::ModelFile) -> MechSystem {
        f.compile().unwrap().system.mech.unwrap()
    }

    #[test]
    fn free_particle_moves_straight() {
        let sys = mech(models::tq_flat(2));
        let tr = integrate(&sys, &[1.0, 2.0], &[1.0, 0.0], &ControlSchedule::zero(2, 3.0).unwrap(), 1e-2, ConstraintMode::Reduced)
            .unwrap();
        let (t, x) = (tr.times.last().unwrap(), tr.xs.last().unwrap());
        assert!((t - 3.0).abs() < 1e-12);
        assert!((x[0] - 4.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
        assert!(euler_lagrange_residual(&sys, &tr).unwrap() < 1e-9);
    }

    #[test]
    fn zero_horizon_is_header_only() {
        let sys = mech(models::tq_flat(2));
        let tr = integrate(&sys, &[0.0, 0.0], &[0.0, 0.0], &ControlSchedule::zero(2, 0.0).unwrap(), 1e-2, ConstraintMode::Reduced)
            .unwrap();
        assert!(tr.is_empty());
        assert_eq!(tr.to_csv(2, 2), "t,x1,x2,y1,y2,u1,u2\n");
    }

    #[test]
    fn oscillator_period() {
        let sys = mech(models::harmonic_oscillator());
        let tr = integrate(&sys, &[1.0], &[0.0], &ControlSchedule::zero(1, 20.0).unwrap(), 1e-3, ConstraintMode::Reduced)
            .unwrap();
        let x: Vec<f64> = tr.xs.iter().map(|v| v[0]).collect();
        let p = period_from_crossings(&tr.times, &x).unwrap();
        assert!((p - std::f64::consts::TAU).abs() < 1e-4, "{p}");
        // closed form x = cos t
        let last = tr.len() - 1;
        assert!((x[last] - tr.times[last].cos()).abs() < 1e-9);
    }

    #[test]
    fn controls_push_the_particle() {
        let sys = mech(models::tq_flat_2_single());
        let s = ControlSchedule::new(1, vec![(1.0, vec![2.0]), (1.0, vec![-2.0])]).unwrap();
        let tr = integrate(&sys, &[0.0, 0.0], &[0.0, 0.0], &s, 1e-2, ConstraintMode::Reduced).unwrap();
        // accelerate for 1 s at 2, decelerate for 1 s: x = 2, y = 0
        let (x, y) = (tr.xs.last().unwrap(), tr.ys.last().unwrap());
        assert!((x[0] - 2.0).abs() < 1e-10 && y[0].abs() < 1e-10);
        assert!(euler_lagrange_residual(&sys, &tr).unwrap() < 1e-8);
    }

    #[test]
    fn singular_chart_stops_integration() {
        // polar coordinates, heading straight into the origin; with this
        // step r hits 0 exactly and the connection is undefined there
        let sys = mech(models::polar());
        let tr = integrate(&sys, &[1.0, 0.0], &[-1.0, 0.0], &ControlSchedule::zero(1, 3.0).unwrap(), 0.25, ConstraintMode::Reduced)
            .unwrap();
        // the last stage of the step from t = 0.75 lands on r = 0
        assert_eq!(tr.diverged, Some(0.75));
        assert_eq!(tr.len(), 4);
    }

    #[test]
    fn sampling_is_deterministic() {
        let sys = mech(models::tq_flat_2_single());
        let o = SampleOptions::new(1.0, 20, 7);
        let a = sample_reachable(&sys, &[0.0, 0.0], &o).unwrap();
        let b = sample_reachable(&sys, &[0.0, 0.0], &o).unwrap();
        assert_eq!(a.endpoints, b.endpoints);
        assert_eq!(a.base_rank, 1);
        assert!(sample_reachable(&sys, &[0.0, 0.0], &SampleOptions::new(1.0, 3, 7)).is_err());
    }
}
