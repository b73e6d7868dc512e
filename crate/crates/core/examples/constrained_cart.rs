//! Constrained connection of a flat cart restricted to a two-dimensional
//! distribution, the C_ver/C_hor decomposition and a simulated trajectory
//! that stays in the distribution.

use algebroid_lab::controllability::{cver_chor, AnalysisOptions};
use algebroid_lab::dynamics::{integrate, ConstraintMode, ControlSchedule};
use algebroid_lab::models::constrained_cart;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = constrained_cart().compile()?;
    let sys = model.system.mech.as_ref().expect("mechanical");
    let m = [0.5, -0.2, 0.1];
    let d = cver_chor(sys, &m, &AnalysisOptions::mechanical())?;
    println!("rank C_ver = {}, rank C_hor = {}", d.cver.len(), d.chor.len());
    for w in d.ver_witnesses.iter().chain(&d.hor_witnesses) {
        println!("  {} -> {:?}", w.term, w.value);
    }

    let sched = ControlSchedule::new(1, vec![(2.0, vec![1.0]), (3.0, vec![-0.5])])?;
    let tr = integrate(sys, &m, &[0.2, 0.0, 0.0], &sched, 1e-3, ConstraintMode::Full)?;
    let worst = tr.ys.iter().map(|y| y[2].abs()).fold(0.0, f64::max);
    let last = tr.xs.last().expect("non-empty");
    println!("final base point {last:?}; max |Q(y)| = {worst:e}");
    Ok(())
}
