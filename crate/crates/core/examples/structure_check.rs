//! Structure equations of the rotation action algebroid over R^3, and the
//! residual a corrupted structure function produces.

use algebroid_lab::models::rigid_body;
use algebroid_lab::{parse, LieAlgebroid, StructureEntry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = rigid_body([1.0, 2.0, 3.0]).compile()?;
    let alg = &model.system.algebroid;
    let pts = vec![vec![0.3, -1.2, 0.7], vec![2.0, 0.5, -0.1], vec![0.0, 0.0, 1.0]];
    println!("rotation algebroid: residual {:e}", alg.check_structure(&pts)?);
    println!("anchor rank at (0,0,1): {}", alg.anchor_rank(&[0.0, 0.0, 1.0], 1e-10)?);
    println!("anchor rank at origin:  {}", alg.anchor_rank(&[0.0, 0.0, 0.0], 1e-10)?);

    let coords = alg.coords().to_vec();
    let mut entries = alg.structure_entries();
    entries[0] = StructureEntry::new(entries[0].gamma, entries[0].alpha, entries[0].beta, parse("2", &coords)?);
    let broken = LieAlgebroid::new(coords, alg.fibers().to_vec(), alg.anchor().to_vec(), entries)?;
    println!("corrupted C: residual {:e}", broken.check_structure(&pts)?);
    Ok(())
}
