//! Geodesic spray of the rigid body on the prolongation, and the symmetric
//! product recovered from it by a double bracket.

use algebroid_lab::models::rigid_body;
use algebroid_lab::prolongation::Prolongation;
use algebroid_lab::Section;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = rigid_body([1.0, 2.0, 3.0]).compile()?;
    let sys = model.system.mech.as_ref().expect("mechanical");
    let data = sys.derive()?;
    let alg = &sys.algebroid;
    let pro = Prolongation::new(alg);
    let spray = pro.spray_of(&data.connection);
    let names: Vec<String> = pro.algebroid().coords().to_vec();
    println!("spray components:");
    for (f, c) in pro.algebroid().fibers().iter().zip(spray.comps()) {
        println!("  {f}: {}", c.display(&names));
    }

    let p = [0.3, -0.4, 0.8];
    let pts = vec![pro.zero_section_point(&p)];
    let (e1, e2) = (Section::basis(3, 0), Section::basis(3, 1));
    let from_spray = pro.symmetric_product_from_spray(&spray, &e1, &e2, &pts)?;
    let direct = data.connection.symmetric_product(alg, &e1, &e2);
    println!("<e1 : e2> from spray: {:?}", from_spray.eval(&p)?);
    println!("<e1 : e2> direct:     {:?}", direct.eval(&p)?);
    Ok(())
}
