//! Integrate the harmonic oscillator and the free rigid body, and check
//! energy, period and the Euler-Lagrange residual.

use algebroid_lab::dynamics::{energy, euler_lagrange_residual, integrate, period_from_crossings, ConstraintMode, ControlSchedule};
use algebroid_lab::models::{harmonic_oscillator, rigid_body};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = harmonic_oscillator().compile()?;
    let sys = model.system.mech.as_ref().expect("mechanical");
    let tr = integrate(sys, &[1.0], &[0.0], &ControlSchedule::zero(1, 20.0)?, 1e-3, ConstraintMode::Reduced)?;
    let xs: Vec<f64> = tr.xs.iter().map(|x| x[0]).collect();
    let period = period_from_crossings(&tr.times, &xs).expect("oscillates");
    println!("oscillator: period {period:.8} (2 pi = {:.8})", std::f64::consts::TAU);
    println!("oscillator: Euler-Lagrange residual {:e}", euler_lagrange_residual(sys, &tr)?);

    let model = rigid_body([1.0, 2.0, 3.0]).compile()?;
    let sys = model.system.mech.as_ref().expect("mechanical");
    let (x0, y0) = ([0.0, 0.0, 1.0], [0.3, 1.0, -0.2]);
    let tr = integrate(sys, &x0, &y0, &ControlSchedule::zero(2, 10.0)?, 1e-3, ConstraintMode::Reduced)?;
    let e0 = energy(sys, &x0, &y0)?;
    let drift = tr.xs.iter().zip(&tr.ys).map(|(x, y)| energy(sys, x, y).map(|e| ((e - e0) / e0).abs())).try_fold(0.0, |a: f64, e| e.map(|e| a.max(e)))?;
    println!("rigid body: relative energy drift {drift:e} over 10 s");
    println!("rigid body: final body velocity {:?}", tr.ys.last().expect("non-empty"));
    Ok(())
}
