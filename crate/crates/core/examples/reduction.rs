//! Symmetry reduction as a bundle map: residual checks for the quotient map
//! and transport of verdicts to the reduced system.

use algebroid_lab::models::reduction_pair;
use algebroid_lab::report::{check_morphisms, AnalyzeRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = reduction_pair().compile()?;
    let report = check_morphisms(&model, &AnalyzeRequest::default())?;
    for r in &report.morphisms {
        println!("{}", r.name);
        println!("  admissible residual  {:e}", r.admissible_residual);
        println!("  morphism residual    {:e}", r.morphism_residual);
        if let Some(c) = r.connection_residual {
            println!("  connection residual  {c:e}");
        }
        println!("  prolonged residual   {:e}", r.prolonged_morphism_residual);
        if let Some(w) = &r.weak_relation {
            println!("  weakly related: {} (max residual {:e})", w.related, w.max_residual);
        }
        for c in &r.claims {
            println!(
                "  {:<15} at {:?}: source {:?}, implied {:?}, target {:?}, consistent {}",
                c.test, c.source_point, c.source_verdict, c.claim.implied, c.target_verdict, c.consistent
            );
        }
    }
    Ok(())
}
