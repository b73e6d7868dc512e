//! Levi-Civita connection of the polar metric diag(1, r^2) on the plane,
//! with its torsion and metric-compatibility residuals.

use algebroid_lab::connections::{levi_civita, BundleMetric};
use algebroid_lab::{parse, LieAlgebroid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let coords = vec!["r".to_string(), "th".to_string()];
    let alg = LieAlgebroid::tangent(coords.clone());
    let metric = BundleMetric::diagonal(vec![parse("1", &coords)?, parse("r^2", &coords)?]);
    let conn = levi_civita(&alg, &metric)?;
    for g in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let c = conn.coeff(g, a, b);
                if !c.is_zero() {
                    println!("Gamma^{}_{}{} = {}", coords[g], coords[a], coords[b], c.display(&coords));
                }
            }
        }
    }
    let pts = vec![vec![1.0, 0.0], vec![2.5, 1.0]];
    println!("torsion residual {:e}", conn.torsion_residual(&alg, &pts)?);
    println!("metric residual  {:e}", conn.metric_residual(&alg, &metric, &pts)?);
    Ok(())
}
