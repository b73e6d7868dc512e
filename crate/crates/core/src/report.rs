//! Analysis and morphism reports: running the requested tests of a model and
//! serializing the outcomes as JSON.

use serde::{Deserialize, Serialize};

use crate::controllability::{run_named, AnalysisOptions, Caps, Outcome, Ranks, Subject, Tolerances, Verdict, Witness, TEST_NAMES};
use crate::error::{Error, Result};
use crate::model_file::{Model, SystemModel};
use crate::morphisms::{
    check_admissible, check_maps_connection, check_morphism, check_weakly_related, prolong_map, propagate_verdict, Claim,
    WeakRelation,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    pub point: Vec<f64>,
    pub verdict: Outcome,
    pub ranks: Ranks,
    pub witnesses: Vec<Witness>,
    pub caps: Caps,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TestResult {
    pub fn new(point: &[f64], v: Verdict) -> TestResult {
        TestResult {
            name: v.property,
            point: point.to_vec(),
            verdict: v.outcome,
            ranks: v.ranks,
            witnesses: v.witnesses,
            caps: v.caps,
            tolerances: v.tolerances,
            notes: v.notes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub model: String,
    pub results: Vec<TestResult>,
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Report> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Overrides for the analysis settings stored in a model.
#[derive(Debug, Clone, Default)]
pub struct AnalyzeRequest {
    pub points: Option<Vec<Vec<f64>>>,
    pub tests: Vec<String>,
    pub max_degree: Option<usize>,
    pub tol: Option<f64>,
}

fn is_general(test: &str) -> bool {
    test.starts_with("general")
}

fn is_manifold(test: &str) -> bool {
    test.starts_with("manifold")
}

/// Tests that apply to the systems present in `sys`.
fn applicable(sys: &SystemModel, has_map: bool) -> Vec<String> {
    TEST_NAMES
        .iter()
        .filter(|t| {
            if is_general(t) {
                sys.general.is_some()
            } else if is_manifold(t) {
                sys.mech.is_some() && has_map
            } else {
                sys.mech.is_some()
            }
        })
        .map(|t| t.to_string())
        .collect()
}

fn options_for(test: &str, max_degree: Option<usize>, tol: Option<f64>) -> AnalysisOptions {
    let mut o = if is_general(test) { AnalysisOptions::general() } else { AnalysisOptions::mechanical() };
    if let Some(d) = max_degree {
        o.max_degree = d;
    }
    if let Some(t) = tol {
        o = o.with_tol(t);
    }
    o
}

/// Run the requested tests (or the model's own list, or every applicable
/// test) at the requested points (or the model's analysis points).
pub fn analyze(model: &Model, req: &AnalyzeRequest) -> Result<Report> {
    let points = req.points.clone().unwrap_or_else(|| model.analysis.points.clone());
    let n = model.system.algebroid.base_dim();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::Dimension(format!("point {p:?} does not have {n} coordinates")));
    }
    let tests = if !req.tests.is_empty() {
        req.tests.clone()
    } else if !model.analysis.tests.is_empty() {
        model.analysis.tests.clone()
    } else {
        applicable(&model.system, model.manifold_map.is_some())
    };
    let subject = Subject {
        mech: model.system.mech.as_ref(),
        general: model.system.general.as_ref(),
        manifold_map: model.manifold_map.as_deref(),
    };
    let max_degree = req.max_degree.or(model.analysis.max_degree);
    let tol = req.tol.or(model.analysis.tol);
    let mut results = Vec::new();
    for p in &points {
        for t in &tests {
            let v = run_named(t, &subject, p, &options_for(t, max_degree, tol))?;
            results.push(TestResult::new(p, v));
        }
    }
    Ok(Report { model: model.name.clone(), results })
}

/// A transported verdict compared with the verdict computed on the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub test: String,
    pub source_point: Vec<f64>,
    pub source_verdict: Outcome,
    pub claim: Claim,
    pub target_verdict: Outcome,
    /// The target verdict is the one the claim implies (or nothing was implied).
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphismResult {
    pub name: String,
    pub admissible_residual: f64,
    pub morphism_residual: f64,
    /// Residual for the system connections, when both sides are mechanical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection_residual: Option<f64>,
    /// Morphism residual of the prolonged map.
    pub prolonged_morphism_residual: f64,
    pub fiberwise_iso: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak_relation: Option<WeakRelation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<ClaimCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphismReport {
    pub model: String,
    pub morphisms: Vec<MorphismResult>,
}

impl MorphismReport {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<MorphismReport> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Sample points for the prolonged map: each base point with a few fiber values.
fn prolonged_points(points: &[Vec<f64>], l: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for p in points {
        for k in 0..3 {
            let mut q = p.clone();
            q.extend((0..l).map(|a| ((a + 1) as f64 * 0.37 * (k as f64 + 1.0)).sin()));
            out.push(q);
        }
    }
    out
}

/// Residual checks for every declared bundle map, and the transport of the
/// requested verdicts along maps with an open base map.
pub fn check_morphisms(model: &Model, req: &AnalyzeRequest) -> Result<MorphismReport> {
    let points = req.points.clone().unwrap_or_else(|| model.analysis.points.clone());
    let tol = req.tol.or(model.analysis.tol).unwrap_or(1e-8);
    let max_degree = req.max_degree.or(model.analysis.max_degree);
    let mut out = Vec::new();
    for rel in &model.morphisms {
        let map = &rel.map;
        let mut notes = Vec::new();
        let connection_residual = match (&model.system.mech, &rel.target.mech) {
            (Some(s), Some(t)) => {
                let (cs, ct) = (s.derive()?.connection, t.derive()?.connection);
                Some(check_maps_connection(map, &cs, &ct, &points)?)
            }
            _ => None,
        };
        let pm = prolong_map(map);
        let ppts = prolonged_points(&points, map.source().rank());
        let weak_relation = match (&model.system.general, &rel.target.general) {
            (Some(s), Some(t)) => Some(check_weakly_related(map, s, t, &points, tol)?),
            _ => None,
        };
        let iso = map.is_fiberwise_iso(&points, tol)?;
        if rel.fiberwise_iso && !iso {
            notes.push("declared fiberwise isomorphism is singular at an analysis point".to_string());
        }
        let mut claims = Vec::new();
        if rel.open {
            let shared: Vec<String> = applicable(&model.system, false)
                .into_iter()
                .filter(|t| applicable(&rel.target, false).contains(t))
                .filter(|t| req.tests.is_empty() || req.tests.contains(t))
                .collect();
            let src = Subject { mech: model.system.mech.as_ref(), general: model.system.general.as_ref(), manifold_map: None };
            let tgt = Subject { mech: rel.target.mech.as_ref(), general: rel.target.general.as_ref(), manifold_map: None };
            for p in &points {
                for t in &shared {
                    let o = options_for(t, max_degree, req.tol.or(model.analysis.tol));
                    let v = run_named(t, &src, p, &o)?;
                    let source_verdict = v.outcome;
                    let claim = propagate_verdict(map, &v, p, true, rel.fiberwise_iso && iso, tol)?;
                    let target_verdict = run_named(t, &tgt, &claim.target_point, &o)?.outcome;
                    let consistent = claim.implied.map_or(true, |c| c == target_verdict);
                    claims.push(ClaimCheck { test: t.clone(), source_point: p.clone(), source_verdict, claim, target_verdict, consistent });
                }
            }
        } else {
            notes.push("base map not declared open; no verdicts transported".to_string());
        }
        out.push(MorphismResult {
            name: rel.name.clone(),
            admissible_residual: check_admissible(map, &points)?,
            morphism_residual: check_morphism(map, &points)?,
            connection_residual,
            prolonged_morphism_residual: check_morphism(&pm, &ppts)?,
            fiberwise_iso: iso,
            weak_relation,
            claims,
            notes,
        });
    }
    Ok(MorphismReport { model: model.name.clone(), morphisms: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn report_round_trip_is_byte_identical() {
        let m = models::rigid_body([1.0, 2.0, 3.0]).compile().unwrap();
        let r = analyze(&m, &AnalyzeRequest::default()).unwrap();
        let text = r.to_json().unwrap();
        assert_eq!(Report::from_json(&text).unwrap().to_json().unwrap(), text);
        assert!(text.contains("\"verdict\": \"sufficient\""));
    }

    #[test]
    fn reduction_pair_morphism_report() {
        let m = models::reduction_pair().compile().unwrap();
        let r = check_morphisms(&m, &AnalyzeRequest::default()).unwrap();
        let x = &r.morphisms[0];
        assert!(x.admissible_residual < 1e-10 && x.morphism_residual < 1e-10);
        assert!(x.connection_residual.unwrap() < 1e-10);
        assert!(x.prolonged_morphism_residual < 1e-9);
        assert!(x.weak_relation.as_ref().unwrap().related);
        assert!(!x.claims.is_empty());
        assert!(x.claims.iter().all(|c| c.consistent));
    }
}
