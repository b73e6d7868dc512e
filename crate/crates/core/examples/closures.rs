//! Involutive closure of a driftless pair of sections and the symmetric
//! closure of the rigid-body inputs.

use algebroid_lab::controllability::{involutive_closure, symmetric_closure, ClosureOptions};
use algebroid_lab::models::{rigid_body, tr2_driftless};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = ClosureOptions::new(4, 1e-8);
    let labels = vec!["eta1".to_string(), "eta2".to_string()];

    let model = tr2_driftless().compile()?;
    let sys = model.system.general.as_ref().expect("general");
    for p in [[0.0, 0.0], [1.0, 2.0]] {
        let c = involutive_closure(&sys.algebroid, &sys.inputs, &p, &opts)?;
        let piv: Vec<String> = c.pivots(1e-8).iter().map(|t| t.tree.render(&labels)).collect();
        println!("Lie closure at {p:?}: rank {} spanned by {piv:?}", c.rank);
    }

    for j in [[1.0, 2.0, 3.0], [1.0, 1.0, 3.0]] {
        let model = rigid_body(j).compile()?;
        let mech = model.system.mech.as_ref().expect("mechanical");
        let data = mech.derive()?;
        let c = symmetric_closure(&mech.algebroid, &data.connection, &data.inputs, &[0.0, 0.0, 1.0], &opts)?;
        let piv: Vec<String> = c.pivots(1e-8).iter().map(|t| t.tree.render(&labels)).collect();
        println!("Sym closure for J = {j:?}: rank {} spanned by {piv:?}", c.rank);
    }
    Ok(())
}
