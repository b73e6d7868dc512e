//! Accessibility and controllability verdicts for the rigid body with two
//! torques, for a generic and a symmetric inertia.

use algebroid_lab::controllability::{accessibility_mech, controllability_mech, AnalysisOptions, Mode};
use algebroid_lab::models::rigid_body;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = AnalysisOptions::mechanical();
    let m = [0.0, 0.0, 1.0];
    for j in [[1.0, 2.0, 3.0], [1.0, 1.0, 3.0]] {
        let model = rigid_body(j).compile()?;
        let sys = model.system.mech.as_ref().expect("mechanical");
        println!("J = diag{j:?}");
        for v in [
            accessibility_mech(sys, &m, Mode::Zero, &opts)?,
            controllability_mech(sys, &m, Mode::Zero, &opts)?,
            accessibility_mech(sys, &m, Mode::Base, &opts)?,
            controllability_mech(sys, &m, Mode::Base, &opts)?,
        ] {
            println!("  {:<13} {:?} ({} of {})", v.property, v.outcome, v.ranks.found, v.ranks.required);
            for n in &v.notes {
                println!("    {n}");
            }
        }
    }
    Ok(())
}
