//! Control systems on a Lie algebroid.

use crate::algebroid::{CovectorSection, LieAlgebroid, Section};
use crate::connections::{constrained_connection, gradient, levi_civita, BundleMetric, Connection, Projector};
use crate::error::{Error, Result};
use crate::expr::Expr;

/// A control-affine system `m' = rho(sigma + u_i eta_i)`.
#[derive(Debug, Clone)]
pub struct GeneralSystem {
    pub algebroid: LieAlgebroid,
    pub drift: Section,
    pub inputs: Vec<Section>,
}

impl GeneralSystem {
    pub fn new(algebroid: LieAlgebroid, drift: Section, inputs: Vec<Section>) -> Result<GeneralSystem> {
        let l = algebroid.rank();
        if drift.dim() != l || inputs.iter().any(|s| s.dim() != l) {
            return Err(Error::Dimension(format!("drift and inputs must have {l} components")));
        }
        Ok(GeneralSystem { algebroid, drift, inputs })
    }
}

/// How controls enter a mechanical system.
#[derive(Debug, Clone)]
pub enum Actuation {
    /// Input sections `eta_i` of E.
    Inputs(Vec<Section>),
    /// Control forces `theta_i`, turned into inputs by raising the index.
    Forces(Vec<CovectorSection>),
}

impl Actuation {
    pub fn len(&self) -> usize {
        match self {
            Actuation::Inputs(v) => v.len(),
            Actuation::Forces(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A mechanical control system: bundle metric, potential, actuation and an
/// optional constraint subbundle given by a projector.
#[derive(Debug, Clone)]
pub struct MechSystem {
    pub algebroid: LieAlgebroid,
    pub metric: BundleMetric,
    pub potential: Expr,
    pub actuation: Actuation,
    pub constraint: Option<Projector>,
}

/// Quantities derived from a [`MechSystem`] that the analysis and the
/// integrator share.
#[derive(Debug, Clone)]
pub struct MechData {
    /// Levi-Civita connection, or its constrained version.
    pub connection: Connection,
    /// `grad V`, projected onto D for constrained systems.
    pub potential_section: Section,
    /// Input sections, projected onto D for constrained systems.
    pub inputs: Vec<Section>,
    /// Forces `G eta_i` of the unprojected inputs.
    pub forces: Vec<CovectorSection>,
}

impl MechSystem {
    pub fn new(
        algebroid: LieAlgebroid,
        metric: BundleMetric,
        potential: Expr,
        actuation: Actuation,
        constraint: Option<Projector>,
    ) -> Result<MechSystem> {
        let l = algebroid.rank();
        if metric.dim() != l {
            return Err(Error::Dimension(format!("metric must be {l}x{l}")));
        }
        let bad = match &actuation {
            Actuation::Inputs(v) => v.iter().any(|s| s.dim() != l),
            Actuation::Forces(v) => v.iter().any(|s| s.dim() != l),
        };
        if bad {
            return Err(Error::Dimension(format!("inputs/forces must have {l} components")));
        }
        if constraint.as_ref().is_some_and(|p| p.dim() != l) {
            return Err(Error::Dimension(format!("projector must be {l}x{l}")));
        }
        if potential.max_var().is_some_and(|m| m >= algebroid.base_dim()) {
            return Err(Error::Index("potential references an unknown coordinate".into()));
        }
        Ok(MechSystem { algebroid, metric, potential, actuation, constraint })
    }

    pub fn rank(&self) -> usize {
        self.algebroid.rank()
    }

    /// Input sections before projection.
    pub fn raw_inputs(&self) -> Result<Vec<Section>> {
        match &self.actuation {
            Actuation::Inputs(v) => Ok(v.clone()),
            Actuation::Forces(f) => f.iter().map(|t| self.metric.sharp(t)).collect(),
        }
    }

    pub fn derive(&self) -> Result<MechData> {
        let lc = levi_civita(&self.algebroid, &self.metric)?;
        let grad = gradient(&self.algebroid, &self.metric, &self.potential)?;
        let raw = self.raw_inputs()?;
        let forces = match &self.actuation {
            Actuation::Forces(f) => f.clone(),
            Actuation::Inputs(v) => v.iter().map(|s| self.metric.flat(s)).collect(),
        };
        Ok(match &self.constraint {
            None => MechData { connection: lc, potential_section: grad, inputs: raw, forces },
            Some(p) => MechData {
                connection: constrained_connection(&self.algebroid, &lc, p),
                potential_section: p.apply(&grad),
                inputs: raw.iter().map(|s| p.apply(s)).collect(),
                forces,
            },
        })
    }

    /// The same system with every input multiplied by a constant.
    pub fn rescaled_inputs(&self, factors: &[f64]) -> Result<MechSystem> {
        let inputs = self
            .raw_inputs()?
            .iter()
            .zip(factors)
            .map(|(s, c)| s.scale(&Expr::constant(*c)))
            .collect();
        Ok(MechSystem { actuation: Actuation::Inputs(inputs), ..self.clone() })
    }
}
