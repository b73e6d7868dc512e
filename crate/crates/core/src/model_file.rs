//! JSON model files: an algebroid with its systems, related systems and
//! analysis requests, with every expression written in the expression
//! grammar over the model's coordinates.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebroid::{CovectorSection, LieAlgebroid, Section, StructureEntry};
use crate::connections::{BundleMetric, Projector};
use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::morphisms::BundleMap;
use crate::systems::{Actuation, GeneralSystem, MechSystem};

/// Residual bound of the structure-equation gate applied at load time.
pub const STRUCTURE_GATE: f64 = 1e-8;

/// `C^upper_{lower[0] lower[1]}`, fibers named.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub upper: String,
    pub lower: [String; 2],
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidSpec {
    pub coords: Vec<String>,
    pub fibers: Vec<String>,
    /// `anchor[i][a]`: component along coordinate `i` of the image of fiber `a`.
    pub anchor: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub structure: Vec<StructureSpec>,
    /// Generic rank of the anchor, when its orbits are proper submanifolds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_dim: Option<usize>,
}

/// An algebroid with the optional data of a mechanical and a general
/// control system on it. A metric makes it mechanical; a drift makes it
/// general.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub algebroid: AlgebroidSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forces: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projector: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub name: String,
    pub target: SystemSpec,
    /// `fiber_map[b][a] = Psi^b_a`, over source coordinates.
    pub fiber_map: Vec<Vec<String>>,
    pub base_map: Vec<String>,
    /// The base map is an open map (declared, not checked).
    #[serde(default)]
    pub open: bool,
    /// Claim that the fiber map is invertible at the analysis points.
    #[serde(default)]
    pub fiberwise_iso: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tests: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub system: SystemSpec,
    /// A submersion `psi: M -> N` for tests with regards to a manifold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifold_map: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub morphisms: Vec<MorphismSpec>,
    pub analysis: AnalysisSpec,
}

/// Compiled systems on one algebroid.
#[derive(Debug, Clone)]
pub struct SystemModel {
    pub algebroid: LieAlgebroid,
    pub mech: Option<MechSystem>,
    pub general: Option<GeneralSystem>,
}

#[derive(Debug, Clone)]
pub struct RelatedModel {
    pub name: String,
    pub map: BundleMap,
    pub target: SystemModel,
    pub open: bool,
    pub fiberwise_iso: bool,
}

/// A compiled, validated model.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub description: String,
    pub system: SystemModel,
    pub manifold_map: Option<Vec<Expr>>,
    pub morphisms: Vec<RelatedModel>,
    pub analysis: AnalysisSpec,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<ModelFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        let text = std::fs::read_to_string(path)?;
        ModelFile::from_json(&text)
    }

    /// Parse every expression, build the systems and run the load-time
    /// gate at the analysis points.
    pub fn compile(&self) -> Result<Model> {
        let pts = &self.analysis.points;
        if pts.is_empty() {
            return Err(Error::Model("analysis.points: at least one point is required".into()));
        }
        let system = compile_system(&self.system, "system")?;
        gate(&system, pts, "system")?;
        let coords = system.algebroid.coords();
        let manifold_map = self
            .manifold_map
            .as_ref()
            .map(|v| exprs(v, coords, "manifold_map"))
            .transpose()?;
        let mut morphisms = Vec::new();
        for (k, m) in self.morphisms.iter().enumerate() {
            let ctx = format!("morphisms[{k}]");
            let target = compile_system(&m.target, &format!("{ctx}.target"))?;
            let fiber = m
                .fiber_map
                .iter()
                .enumerate()
                .map(|(b, row)| exprs(row, coords, &format!("{ctx}.fiber_map[{b}]")))
                .collect::<Result<Vec<_>>>()?;
            let base = exprs(&m.base_map, coords, &format!("{ctx}.base_map"))?;
            let map = BundleMap::new(system.algebroid.clone(), target.algebroid.clone(), fiber, base)
                .map_err(|e| Error::Model(format!("{ctx}: {e}")))?;
            let tpts = pts.iter().map(|p| map.base_at(p)).collect::<Result<Vec<_>>>()?;
            gate(&target, &tpts, &format!("{ctx}.target"))?;
            morphisms.push(RelatedModel {
                name: m.name.clone(),
                map,
                target,
                open: m.open,
                fiberwise_iso: m.fiberwise_iso,
            });
        }
        Ok(Model {
            name: self.name.clone(),
            description: self.description.clone(),
            system,
            manifold_map,
            morphisms,
            analysis: self.analysis.clone(),
        })
    }
}

fn expr(text: &str, coords: &[String], ctx: &str) -> Result<Expr> {
    parse(text, coords).map_err(|e| Error::Model(format!("{ctx}: {e} in `{text}`")))
}

fn exprs(v: &[String], coords: &[String], ctx: &str) -> Result<Vec<Expr>> {
    v.iter().enumerate().map(|(i, t)| expr(t, coords, &format!("{ctx}[{i}]"))).collect()
}

fn matrix(rows: &[Vec<String>], coords: &[String], ctx: &str) -> Result<Vec<Vec<Expr>>> {
    rows.iter().enumerate().map(|(i, r)| exprs(r, coords, &format!("{ctx}[{i}]"))).collect()
}

fn compile_algebroid(spec: &AlgebroidSpec, ctx: &str) -> Result<LieAlgebroid> {
    let fiber = |name: &str, what: &str| {
        spec.fibers
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::Model(format!("{ctx}.structure: unknown fiber `{name}` in {what}")))
    };
    let rho = matrix(&spec.anchor, &spec.coords, &format!("{ctx}.anchor"))?;
    let structure = spec
        .structure
        .iter()
        .enumerate()
        .map(|(k, s)| {
            Ok(StructureEntry::new(
                fiber(&s.upper, "upper index")?,
                fiber(&s.lower[0], "lower index")?,
                fiber(&s.lower[1], "lower index")?,
                expr(&s.value, &spec.coords, &format!("{ctx}.structure[{k}].value"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let alg = LieAlgebroid::new(spec.coords.clone(), spec.fibers.clone(), rho, structure)
        .map_err(|e| Error::Model(format!("{ctx}: {e}")))?;
    Ok(match spec.leaf_dim {
        Some(d) => alg.with_leaf_dim(d),
        None => alg,
    })
}

fn compile_system(spec: &SystemSpec, ctx: &str) -> Result<SystemModel> {
    let alg = compile_algebroid(&spec.algebroid, &format!("{ctx}.algebroid"))?;
    let coords = alg.coords().to_vec();
    let sections = |rows: &Option<Vec<Vec<String>>>, what: &str| -> Result<Vec<Vec<Expr>>> {
        rows.as_ref().map_or(Ok(Vec::new()), |r| matrix(r, &coords, &format!("{ctx}.{what}")))
    };
    if spec.inputs.is_some() && spec.forces.is_some() {
        return Err(Error::Model(format!("{ctx}: give either inputs or forces, not both")));
    }
    let inputs: Vec<Section> = sections(&spec.inputs, "inputs")?.into_iter().map(Section).collect();
    let forces: Vec<CovectorSection> = sections(&spec.forces, "forces")?.into_iter().map(CovectorSection).collect();
    let mech = match &spec.metric {
        None => {
            if spec.potential.is_some() || spec.forces.is_some() || spec.projector.is_some() {
                return Err(Error::Model(format!("{ctx}: potential, forces and projector need a metric")));
            }
            None
        }
        Some(g) => {
            let metric = BundleMetric::new(matrix(g, &coords, &format!("{ctx}.metric"))?)
                .map_err(|e| Error::Model(format!("{ctx}.metric: {e}")))?;
            let potential = match &spec.potential {
                Some(v) => expr(v, &coords, &format!("{ctx}.potential"))?,
                None => Expr::zero(),
            };
            let actuation = if spec.forces.is_some() { Actuation::Forces(forces) } else { Actuation::Inputs(inputs.clone()) };
            let constraint = spec
                .projector
                .as_ref()
                .map(|p| Projector::new(matrix(p, &coords, &format!("{ctx}.projector"))?))
                .transpose()
                .map_err(|e| Error::Model(format!("{ctx}.projector: {e}")))?;
            Some(
                MechSystem::new(alg.clone(), metric, potential, actuation, constraint)
                    .map_err(|e| Error::Model(format!("{ctx}: {e}")))?,
            )
        }
    };
    let general = match &spec.drift {
        None => None,
        Some(d) => {
            let drift = Section(exprs(d, &coords, &format!("{ctx}.drift"))?);
            let gin = match &mech {
                Some(m) => m.raw_inputs()?,
                None => inputs,
            };
            Some(GeneralSystem::new(alg.clone(), drift, gin).map_err(|e| Error::Model(format!("{ctx}: {e}")))?)
        }
    };
    Ok(SystemModel { algebroid: alg, mech, general })
}

/// Structure equations, metric and projector checks at the given points.
fn gate(sys: &SystemModel, pts: &[Vec<f64>], ctx: &str) -> Result<()> {
    let n = sys.algebroid.base_dim();
    if let Some(p) = pts.iter().find(|p| p.len() != n) {
        return Err(Error::Model(format!("{ctx}: point {p:?} does not have {n} coordinates")));
    }
    let r = sys.algebroid.check_structure(pts).map_err(|e| Error::Model(format!("{ctx}.algebroid: {e}")))?;
    if !(r < STRUCTURE_GATE) {
        return Err(Error::Model(format!(
            "{ctx}.algebroid: structure equations fail with residual {r:e} (bound {STRUCTURE_GATE:e})"
        )));
    }
    if let Some(m) = &sys.mech {
        m.metric.validate(pts).map_err(|e| Error::Model(format!("{ctx}.metric: {e}")))?;
        if let Some(p) = &m.constraint {
            p.validate(pts).map_err(|e| Error::Model(format!("{ctx}.projector: {e}")))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> ModelFile {
        ModelFile::from_json(
            r#"{
              "name": "plane",
              "system": {
                "algebroid": {"coords": ["x", "y"], "fibers": ["u", "v"], "anchor": [["1", "0"], ["0", "1"]]},
                "metric": [["1", "0"], ["0", "1"]],
                "inputs": [["1", "0"]]
              },
              "analysis": {"points": [[0, 0]]}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn compiles_minimal_model() {
        let m = minimal().compile().unwrap();
        assert!(m.system.mech.is_some());
        assert!(m.system.general.is_none());
        assert_eq!(m.system.algebroid.rank(), 2);
    }

    #[test]
    fn json_round_trip() {
        let f = minimal();
        let again = ModelFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn unknown_field_is_rejected_with_position() {
        let e = ModelFile::from_json(r#"{"name": "a", "sytem": {}}"#).unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
    }

    #[test]
    fn bad_expression_names_its_location() {
        let mut f = minimal();
        f.system.inputs = Some(vec![vec!["1 +".into(), "z".into()]]);
        let e = f.compile().unwrap_err().to_string();
        assert!(e.contains("system.inputs[0][0]"), "{e}");
    }

    #[test]
    fn broken_structure_fails_gate() {
        let mut f = minimal();
        f.system.algebroid.structure =
            vec![StructureSpec { upper: "u".into(), lower: ["u".into(), "v".into()], value: "1 + x".into() }];
        // anchor compatibility forces C = 0 on the tangent bundle
        let e = f.compile().unwrap_err().to_string();
        assert!(e.contains("structure equations"), "{e}");
    }
}
