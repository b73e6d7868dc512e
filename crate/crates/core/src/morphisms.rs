//! Bundle maps between Lie algebroids: admissibility, morphism and
//! connection-mapping residuals, prolongation of maps, relatedness of
//! control systems and transport of verdicts.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebroid::LieAlgebroid;
use crate::connections::Connection;
use crate::controllability::{Outcome, Verdict};
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::linalg;
use crate::prolongation::Prolongation;
use crate::systems::GeneralSystem;

/// A bundle map `Psi: E -> E'` over `psi: M -> M'`, with
/// `Psi(e_a) = Psi^b_a(x) e'_b`. All expressions are in source coordinates.
#[derive(Debug, Clone)]
pub struct BundleMap {
    source: LieAlgebroid,
    target: LieAlgebroid,
    fiber: Vec<Vec<Expr>>,
    base: Vec<Expr>,
}

impl BundleMap {
    pub fn new(source: LieAlgebroid, target: LieAlgebroid, fiber: Vec<Vec<Expr>>, base: Vec<Expr>) -> Result<BundleMap> {
        let (l, lt) = (source.rank(), target.rank());
        if fiber.len() != lt || fiber.iter().any(|r| r.len() != l) {
            return Err(Error::Dimension(format!("fiber map must be {lt}x{l}")));
        }
        if base.len() != target.base_dim() {
            return Err(Error::Dimension(format!("base map must have {} components", target.base_dim())));
        }
        let n = source.base_dim();
        if fiber.iter().flatten().chain(&base).any(|e| e.max_var().is_some_and(|m| m >= n)) {
            return Err(Error::Index("bundle map references an unknown source coordinate".into()));
        }
        Ok(BundleMap { source, target, fiber, base })
    }

    pub fn identity(alg: &LieAlgebroid) -> BundleMap {
        let l = alg.rank();
        let fiber = (0..l)
            .map(|b| (0..l).map(|a| if a == b { Expr::one() } else { Expr::zero() }).collect())
            .collect();
        let base = (0..alg.base_dim()).map(Expr::var).collect();
        BundleMap { source: alg.clone(), target: alg.clone(), fiber, base }
    }

    pub fn source(&self) -> &LieAlgebroid {
        &self.source
    }

    pub fn target(&self) -> &LieAlgebroid {
        &self.target
    }

    pub fn fiber(&self) -> &[Vec<Expr>] {
        &self.fiber
    }

    pub fn base(&self) -> &[Expr] {
        &self.base
    }

    pub fn fiber_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let (lt, l) = (self.target.rank(), self.source.rank());
        let flat: Vec<Expr> = self.fiber.iter().flatten().cloned().collect();
        let v = Tape::new(&flat).eval(x)?;
        Ok(DMatrix::from_row_slice(lt, l, &v))
    }

    pub fn base_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(Tape::new(&self.base).eval(x)?)
    }

    /// Jacobian of the base map at `x`, `n' x n`.
    pub fn base_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.source.base_dim();
        let jac: Vec<Expr> = self.base.iter().flat_map(|f| (0..n).map(move |i| f.diff(i))).collect();
        let v = Tape::new(&jac).eval(x)?;
        Ok(DMatrix::from_row_slice(self.base.len(), n, &v))
    }

    /// Whether `Psi(x)` is invertible at every point, with `|det| > tol`.
    pub fn is_fiberwise_iso(&self, pts: &[Vec<f64>], tol: f64) -> Result<bool> {
        if self.source.rank() != self.target.rank() {
            return Ok(false);
        }
        for x in pts {
            if self.fiber_at(x)?.determinant().abs() <= tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Max over points of `|J psi(x) rho(x) - rho'(psi(x)) Psi(x)|`.
pub fn check_admissible(map: &BundleMap, pts: &[Vec<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in pts {
        let lhs = map.base_jacobian(x)? * map.source.anchor_matrix(x)?;
        let rhs = map.target.anchor_matrix(&map.base_at(x)?)? * map.fiber_at(x)?;
        worst = worst.max((lhs - rhs).amax());
    }
    Ok(worst)
}

/// `d_rho_a Psi^b_d` as expressions, indexed `[b][a][d]`.
fn anchor_derivatives(map: &BundleMap) -> Vec<Vec<Vec<Expr>>> {
    let fields: Vec<Vec<Expr>> = (0..map.source.rank())
        .map(|a| map.source.anchor_field(&crate::algebroid::Section::basis(map.source.rank(), a)))
        .collect();
    map.fiber
        .iter()
        .map(|row| fields.iter().map(|f| row.iter().map(|p| LieAlgebroid::derivation(f, p)).collect()).collect())
        .collect()
}

/// `[gamma][a][b]` coefficient tensor of `coeff` evaluated at a point.
fn tensor_at(l: usize, coeff: impl Fn(usize, usize, usize) -> Expr, x: &[f64]) -> Result<Vec<f64>> {
    let flat: Vec<Expr> = (0..l)
        .flat_map(|g| (0..l).flat_map(move |a| (0..l).map(move |b| (g, a, b))))
        .map(|(g, a, b)| coeff(g, a, b))
        .collect();
    Ok(Tape::new(&flat).eval(x)?)
}

/// Shared residual of the morphism and connection-mapping identities:
/// `Psi^b_g S^g_{ad} - D^b_{ad} - T^b_{ts}(psi(x)) Psi^t_a Psi^s_d`, where
/// `D^b_{ad}` is `d_rho_a Psi^b_d`, optionally antisymmetrized.
fn transport_residual(
    map: &BundleMap,
    source_tensor: &dyn Fn(usize, usize, usize) -> Expr,
    target_tensor: &dyn Fn(usize, usize, usize) -> Expr,
    antisymmetric: bool,
    pts: &[Vec<f64>],
) -> Result<f64> {
    let (l, lt) = (map.source.rank(), map.target.rank());
    let deriv = anchor_derivatives(map);
    let dflat: Vec<Expr> = deriv.iter().flatten().flatten().cloned().collect();
    let dtape = Tape::new(&dflat);
    let mut worst: f64 = 0.0;
    for x in pts {
        let psi = map.fiber_at(x)?;
        let s = tensor_at(l, source_tensor, x)?;
        let t = tensor_at(lt, target_tensor, &map.base_at(x)?)?;
        let d = dtape.eval(x)?;
        let dd = |b: usize, a: usize, e: usize| d[(b * l + a) * l + e];
        for b in 0..lt {
            for a in 0..l {
                for e in 0..l {
                    let mut r: f64 = (0..l).map(|g| psi[(b, g)] * s[(g * l + a) * l + e]).sum();
                    r -= if antisymmetric { dd(b, a, e) - dd(b, e, a) } else { dd(b, a, e) };
                    for th in 0..lt {
                        for sg in 0..lt {
                            r -= t[(b * lt + th) * lt + sg] * psi[(th, a)] * psi[(sg, e)];
                        }
                    }
                    worst = worst.max(r.abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Max residual of the bracket-preservation identity
/// `Psi^b_g C^g_{ad} = rho_a(Psi^b_d) - rho_d(Psi^b_a) + C'^b_{ts} Psi^t_a Psi^s_d`.
pub fn check_morphism(map: &BundleMap, pts: &[Vec<f64>]) -> Result<f64> {
    let (s, t) = (&map.source, &map.target);
    transport_residual(map, &|g, a, b| s.c(g, a, b).clone(), &|g, a, b| t.c(g, a, b).clone(), true, pts)
}

/// Max residual of
/// `Psi^b_g Gamma^g_{ad} = rho_a(Psi^b_d) + Gamma'^b_{ts} Psi^t_a Psi^s_d`.
pub fn check_maps_connection(map: &BundleMap, conn: &Connection, target_conn: &Connection, pts: &[Vec<f64>]) -> Result<f64> {
    if conn.dim() != map.source.rank() || target_conn.dim() != map.target.rank() {
        return Err(Error::Dimension("connection ranks do not match the bundle map".into()));
    }
    transport_residual(
        map,
        &|g, a, b| conn.coeff(g, a, b).clone(),
        &|g, a, b| target_conn.coeff(g, a, b).clone(),
        false,
        pts,
    )
}

/// The prolonged map between prolongations:
/// `X_a -> Psi^b_a X'_b + rho^i_a d_i Psi^g_b y^b V'_g`, `V_a -> Psi^b_a V'_b`,
/// over `(x, y) -> (psi(x), Psi(x) y)`.
pub fn prolong_map(map: &BundleMap) -> BundleMap {
    let (l, lt, n) = (map.source.rank(), map.target.rank(), map.source.base_dim());
    let src = Prolongation::new(&map.source);
    let tgt = Prolongation::new(&map.target);
    let y = |b: usize| Expr::var(n + b);
    let deriv = anchor_derivatives(map);
    let mut fiber = vec![vec![Expr::zero(); 2 * l]; 2 * lt];
    for b in 0..lt {
        for a in 0..l {
            fiber[b][a] = map.fiber[b][a].clone();
            fiber[lt + b][l + a] = map.fiber[b][a].clone();
            fiber[lt + b][a] = Expr::sum((0..l).map(|c| &deriv[b][a][c] * &y(c)));
        }
    }
    let mut base = map.base.clone();
    base.extend((0..lt).map(|b| Expr::sum((0..l).map(|a| &map.fiber[b][a] * &y(a)))));
    BundleMap { source: src.algebroid().clone(), target: tgt.algebroid().clone(), fiber, base }
}

/// Coefficients relating two systems at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRelation {
    pub point: Vec<f64>,
    /// `Psi sigma - sigma' o psi = b^j eta'_j`.
    pub drift_coefficients: Vec<f64>,
    /// `Psi eta_i = c[i][j] eta'_j`.
    pub input_coefficients: Vec<Vec<f64>>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakRelation {
    pub related: bool,
    pub max_residual: f64,
    pub points: Vec<PointRelation>,
}

/// Whether `sys` is weakly `Psi`-related to `target`: at each point the
/// mapped drift differs from the target drift by a combination of target
/// inputs, and every mapped input is a combination of target inputs.
pub fn check_weakly_related(
    map: &BundleMap,
    sys: &GeneralSystem,
    target: &GeneralSystem,
    pts: &[Vec<f64>],
    tol: f64,
) -> Result<WeakRelation> {
    let lt = map.target.rank();
    let mut out = Vec::new();
    let mut worst: f64 = 0.0;
    for x in pts {
        let psi = map.fiber_at(x)?;
        let xt = map.base_at(x)?;
        let push = |v: Vec<f64>| -> Vec<f64> { (&psi * nalgebra::DVector::from_vec(v)).iter().cloned().collect() };
        let tin: Vec<Vec<f64>> = target.inputs.iter().map(|s| s.eval(&xt)).collect::<Result<_>>()?;
        let mut d = push(sys.drift.eval(x)?);
        for (a, b) in d.iter_mut().zip(target.drift.eval(&xt)?) {
            *a -= b;
        }
        let (bcoef, mut res) = fit(&tin, &d, lt);
        let mut ccoef = Vec::new();
        for s in &sys.inputs {
            let (c, r) = fit(&tin, &push(s.eval(x)?), lt);
            res = res.max(r);
            ccoef.push(c);
        }
        worst = worst.max(res);
        out.push(PointRelation { point: x.clone(), drift_coefficients: bcoef, input_coefficients: ccoef, residual: res });
    }
    Ok(WeakRelation { related: worst < tol, max_residual: worst, points: out })
}

fn fit(cols: &[Vec<f64>], b: &[f64], dim: usize) -> (Vec<f64>, f64) {
    if cols.is_empty() {
        return (Vec::new(), linalg::norm(b));
    }
    debug_assert_eq!(b.len(), dim);
    linalg::least_squares(cols, b, 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    /// Source property implies the target property.
    Forward,
    /// Source and target test outcomes coincide (fiberwise isomorphism).
    Equivalence,
}

/// What a source verdict implies about the related system at `psi(m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub property: String,
    pub target_point: Vec<f64>,
    pub kind: ClaimKind,
    /// The implied outcome of the same test on the target, when one follows.
    pub implied: Option<Outcome>,
    pub statement: String,
}

/// Transport a verdict obtained at `m` along a bundle map whose base map is
/// declared open. With `claim_iso` the map must be a fiberwise isomorphism
/// at `m` and the claim is an equivalence; otherwise only a sufficient
/// source verdict carries over.
pub fn propagate_verdict(
    map: &BundleMap,
    verdict: &Verdict,
    m: &[f64],
    open: bool,
    claim_iso: bool,
    tol: f64,
) -> Result<Claim> {
    if !open {
        return Err(Error::Invalid("verdicts only transport along maps with an open base map".into()));
    }
    let target_point = map.base_at(m)?;
    if claim_iso {
        if !map.is_fiberwise_iso(&[m.to_vec()], tol)? {
            return Err(Error::NotIsomorphism { point: m.to_vec() });
        }
        return Ok(Claim {
            property: verdict.property.clone(),
            target_point,
            kind: ClaimKind::Equivalence,
            implied: Some(verdict.outcome),
            statement: format!("{} on the source at m holds if and only if it holds on the target at psi(m)", verdict.property),
        });
    }
    let (implied, statement) = match verdict.outcome {
        Outcome::Sufficient => (
            Some(Outcome::Sufficient),
            format!("source satisfies {}, so the target is too at psi(m)", verdict.property),
        ),
        _ => (None, "the source verdict is not sufficient; nothing follows for the target".to_string()),
    };
    Ok(Claim { property: verdict.property.clone(), target_point, kind: ClaimKind::Forward, implied, statement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::Section;
    use crate::connections::{levi_civita, BundleMetric};
    use crate::expr::parse;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn pts2() -> Vec<Vec<f64>> {
        vec![vec![0.3, -0.7], vec![1.2, 0.4], vec![-0.5, 2.0]]
    }

    #[test]
    fn identity_passes_everything() {
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let id = BundleMap::identity(&a);
        assert_eq!(check_admissible(&id, &pts2()).unwrap(), 0.0);
        assert_eq!(check_morphism(&id, &pts2()).unwrap(), 0.0);
        let c = Connection::flat(2);
        assert_eq!(check_maps_connection(&id, &c, &c, &pts2()).unwrap(), 0.0);
    }

    #[test]
    fn coordinate_projection() {
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let b = LieAlgebroid::tangent(names(&["x1"]));
        let m = BundleMap::new(a, b, vec![vec![Expr::one(), Expr::zero()]], vec![Expr::var(0)]).unwrap();
        assert_eq!(check_admissible(&m, &pts2()).unwrap(), 0.0);
        assert_eq!(check_morphism(&m, &pts2()).unwrap(), 0.0);
    }

    #[test]
    fn scaled_anchor_mismatch() {
        let a = LieAlgebroid::tangent(names(&["x1"]));
        let m = BundleMap::new(a.clone(), a, vec![vec![Expr::constant(2.0)]], vec![Expr::var(0)]).unwrap();
        // J psi rho = 1 against rho' Psi = 2
        assert!((check_admissible(&m, &[vec![0.4]]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_by_varying_angle_is_not_a_morphism() {
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let p = |s: &str| parse(s, a.coords()).unwrap();
        let rot = vec![vec![p("cos(x1)"), p("-sin(x1)")], vec![p("sin(x1)"), p("cos(x1)")]];
        let m = BundleMap::new(a.clone(), a, rot, vec![Expr::var(0), Expr::var(1)]).unwrap();
        // with C = 0 the residual is |rho_a(Psi^b_d) - rho_d(Psi^b_a)|;
        // at x1 = 0: a=0, d=1 gives d/dx1 Psi^b_1 = (-cos, -sin) -> 1
        let r = check_morphism(&m, &[vec![0.0, 0.0]]).unwrap();
        assert!((r - 1.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn isometry_maps_levi_civita() {
        // swap of coordinates on TR^2 with a metric that is swapped accordingly
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let p = |s: &str| parse(s, a.coords()).unwrap();
        let g = BundleMetric::diagonal(vec![p("1 + x2^2"), p("2")]);
        let gt = BundleMetric::diagonal(vec![p("2"), p("1 + x1^2")]);
        let swap = vec![vec![Expr::zero(), Expr::one()], vec![Expr::one(), Expr::zero()]];
        let m = BundleMap::new(a.clone(), a.clone(), swap, vec![Expr::var(1), Expr::var(0)]).unwrap();
        let (c, ct) = (levi_civita(&a, &g).unwrap(), levi_civita(&a, &gt).unwrap());
        assert!(check_admissible(&m, &pts2()).unwrap() < 1e-14);
        assert!(check_maps_connection(&m, &c, &ct, &pts2()).unwrap() < 1e-10);
        // and it does not map it to the untransformed connection
        assert!(check_maps_connection(&m, &c, &c, &pts2()).unwrap() > 1e-3);
    }

    #[test]
    fn prolongation_of_constant_map_is_block_diagonal() {
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let r = vec![vec![Expr::zero(), Expr::one()], vec![Expr::one(), Expr::zero()]];
        let m = BundleMap::new(a.clone(), a, r, vec![Expr::var(1), Expr::var(0)]).unwrap();
        let pm = prolong_map(&m);
        let f = pm.fiber_at(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(f.view((2, 0), (2, 2)).amax(), 0.0);
        assert_eq!(f.view((0, 0), (2, 2)), f.view((2, 2), (2, 2)));
        assert!(check_morphism(&pm, &[vec![0.1, 0.2, 0.3, 0.4]]).unwrap() < 1e-12);
    }

    #[test]
    fn weak_relation_detects_escaping_input() {
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let id = BundleMap::identity(&a);
        let s = GeneralSystem::new(a.clone(), Section::zero(2), vec![Section::constant(&[1.0, 1.0])]).unwrap();
        let t = GeneralSystem::new(a.clone(), Section::zero(2), vec![Section::basis(2, 0)]).unwrap();
        let r = check_weakly_related(&id, &s, &t, &pts2(), 1e-9).unwrap();
        assert!(!r.related);
        assert!((r.max_residual - 1.0).abs() < 1e-12);
        let r = check_weakly_related(&id, &s, &s, &pts2(), 1e-9).unwrap();
        assert!(r.related);
        assert!((r.points[0].input_coefficients[0][0] - 1.0).abs() < 1e-12);
    }
}
