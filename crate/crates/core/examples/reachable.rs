//! Sample endpoints of random piecewise-constant controls from rest and
//! report the affine rank of the reached states.

use algebroid_lab::dynamics::{sample_reachable, SampleOptions};
use algebroid_lab::models::{rigid_body, tq_flat_2_single};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (model, m) in [(tq_flat_2_single(), vec![0.0, 0.0]), (rigid_body([1.0, 2.0, 3.0]), vec![0.0, 0.0, 1.0])] {
        let model = model.compile()?;
        let sys = model.system.mech.as_ref().expect("mechanical");
        let s = sample_reachable(sys, &m, &SampleOptions::new(1.0, 200, 7))?;
        println!(
            "{}: {} endpoints, base affine rank {}, full affine rank {} (dropped {})",
            model.name,
            s.endpoints.len(),
            s.base_rank,
            s.full_rank,
            s.dropped
        );
    }
    Ok(())
}
