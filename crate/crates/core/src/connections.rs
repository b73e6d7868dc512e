//! Linear E-connections: covariant derivative, torsion, symmetric product,
//! the Levi-Civita connection of a bundle metric, constrained connections
//! and gradients.

use crate::algebroid::{CovectorSection, LieAlgebroid, Section};
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::linalg;

/// A bundle metric `G_{alpha beta}(x)` on E.
#[derive(Debug, Clone)]
pub struct BundleMetric {
    g: Vec<Vec<Expr>>,
}

impl BundleMetric {
    pub fn new(g: Vec<Vec<Expr>>) -> Result<BundleMetric> {
        let l = g.len();
        if g.iter().any(|r| r.len() != l) {
            return Err(Error::Dimension(format!("metric must be square, got {l} rows of unequal length")));
        }
        Ok(BundleMetric { g })
    }

    pub fn identity(dim: usize) -> BundleMetric {
        BundleMetric::diagonal(vec![Expr::one(); dim])
    }

    pub fn diagonal(d: Vec<Expr>) -> BundleMetric {
        let l = d.len();
        let g = (0..l)
            .map(|i| (0..l).map(|j| if i == j { d[i].clone() } else { Expr::zero() }).collect())
            .collect();
        BundleMetric { g }
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn entry(&self, a: usize, b: usize) -> &Expr {
        &self.g[a][b]
    }

    pub fn rows(&self) -> &[Vec<Expr>] {
        &self.g
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<Vec<f64>>> {
        let l = self.dim();
        let flat: Vec<Expr> = self.g.iter().flatten().cloned().collect();
        let v = Tape::new(&flat).eval(p)?;
        Ok(v.chunks(l.max(1)).map(|c| c.to_vec()).take(l).collect())
    }

    /// Check symmetry and positive definiteness at every point.
    pub fn validate(&self, pts: &[Vec<f64>]) -> Result<()> {
        let l = self.dim();
        for p in pts {
            let m = self.eval(p)?;
            let mut asym: f64 = 0.0;
            let mut scale: f64 = 1.0;
            for a in 0..l {
                for b in 0..l {
                    asym = asym.max((m[a][b] - m[b][a]).abs());
                    scale = scale.max(m[a][b].abs());
                }
            }
            if asym > 1e-12 * scale {
                return Err(Error::MetricNotSymmetric { point: p.clone(), residual: asym });
            }
            let mat = nalgebra::DMatrix::from_fn(l, l, |i, j| m[i][j]);
            if mat.cholesky().is_none() {
                return Err(Error::MetricNotPositive { point: p.clone() });
            }
        }
        Ok(())
    }

    fn is_constant(&self) -> bool {
        self.g.iter().flatten().all(|e| e.as_const().is_some())
    }

    fn is_diagonal(&self) -> bool {
        let l = self.dim();
        (0..l).all(|a| (0..l).all(|b| a == b || self.g[a][b].is_zero()))
    }

    /// Symbolic inverse metric `G^{alpha beta}`. Constant and diagonal
    /// metrics are inverted in any dimension, general ones by the adjugate
    /// formula up to dimension 4.
    pub fn inverse(&self) -> Result<Vec<Vec<Expr>>> {
        let l = self.dim();
        if self.is_constant() {
            let rows: Vec<Vec<f64>> =
                self.g.iter().map(|r| r.iter().map(|e| e.as_const().unwrap()).collect()).collect();
            let inv = linalg::invert(&rows).ok_or_else(|| Error::SingularMetric { point: Vec::new() })?;
            return Ok(inv.into_iter().map(|r| r.into_iter().map(Expr::constant).collect()).collect());
        }
        if self.is_diagonal() {
            return Ok((0..l)
                .map(|a| {
                    (0..l)
                        .map(|b| if a == b { Expr::one() / &self.g[a][a] } else { Expr::zero() })
                        .collect()
                })
                .collect());
        }
        if l > 4 {
            return Err(Error::NoSymbolicInverse { dim: l });
        }
        let det = determinant(&self.g);
        Ok((0..l)
            .map(|a| (0..l).map(|b| cofactor(&self.g, b, a) / &det).collect())
            .collect())
    }

    /// `G(s, t)`.
    pub fn apply(&self, s: &Section, t: &Section) -> Expr {
        let l = self.dim();
        Expr::sum((0..l).flat_map(|a| (0..l).map(move |b| (a, b))).filter_map(|(a, b)| {
            if self.g[a][b].is_zero() || s.0[a].is_zero() || t.0[b].is_zero() {
                None
            } else {
                Some(&self.g[a][b] * &s.0[a] * &t.0[b])
            }
        }))
    }

    /// Index lowering, `G(s, .)`.
    pub fn flat(&self, s: &Section) -> CovectorSection {
        let l = self.dim();
        CovectorSection((0..l).map(|b| Expr::sum((0..l).map(|a| &self.g[a][b] * &s.0[a]))).collect())
    }

    /// Index raising, the section `G^{-1} theta`.
    pub fn sharp(&self, theta: &CovectorSection) -> Result<Section> {
        let inv = self.inverse()?;
        let l = self.dim();
        Ok(Section((0..l).map(|a| Expr::sum((0..l).map(|b| &inv[a][b] * &theta.0[b]))).collect()))
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Laplace expansion along the first row.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        _ => Expr::sum((0..m.len()).filter(|&j| !m[0][j].is_zero()).map(|j| {
            let t = &m[0][j] * &determinant(&minor(m, 0, j));
            if j % 2 == 0 {
                t
            } else {
                -t
            }
        })),
    }
}

fn cofactor(m: &[Vec<Expr>], i: usize, j: usize) -> Expr {
    let d = determinant(&minor(m, i, j));
    if (i + j) % 2 == 0 {
        d
    } else {
        -d
    }
}

/// Coefficients `Gamma^gamma_{alpha beta}` of a linear connection; the first
/// lower index is the direction of differentiation.
#[derive(Debug, Clone)]
pub struct Connection {
    gamma: Vec<Vec<Vec<Expr>>>,
}

impl Connection {
    /// Build from an array indexed `[gamma][alpha][beta]`.
    pub fn new(gamma: Vec<Vec<Vec<Expr>>>) -> Result<Connection> {
        let l = gamma.len();
        if gamma.iter().any(|m| m.len() != l || m.iter().any(|r| r.len() != l)) {
            return Err(Error::Dimension(format!("connection coefficients must be {l}x{l}x{l}")));
        }
        Ok(Connection { gamma })
    }

    pub fn flat(dim: usize) -> Connection {
        Connection { gamma: vec![vec![vec![Expr::zero(); dim]; dim]; dim] }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `Gamma^g_{a b}`.
    pub fn coeff(&self, g: usize, a: usize, b: usize) -> &Expr {
        &self.gamma[g][a][b]
    }

    /// Symmetrized coefficient `S^g_{a b} = Gamma^g_{a b} + Gamma^g_{b a}`.
    pub fn sym(&self, g: usize, a: usize, b: usize) -> Expr {
        &self.gamma[g][a][b] + &self.gamma[g][b][a]
    }

    pub fn coefficients(&self) -> &[Vec<Vec<Expr>>] {
        &self.gamma
    }

    /// `nabla_s t`.
    pub fn covariant_derivative(&self, alg: &LieAlgebroid, s: &Section, t: &Section) -> Section {
        let l = self.dim();
        let field = alg.anchor_field(s);
        Section(
            (0..l)
                .map(|g| {
                    let mut e = LieAlgebroid::derivation(&field, &t.0[g]);
                    for a in 0..l {
                        if s.0[a].is_zero() {
                            continue;
                        }
                        for b in 0..l {
                            let c = &self.gamma[g][a][b];
                            if c.is_zero() || t.0[b].is_zero() {
                                continue;
                            }
                            e = e + &s.0[a] * c * &t.0[b];
                        }
                    }
                    e
                })
                .collect(),
        )
    }

    pub fn torsion(&self, alg: &LieAlgebroid, s: &Section, t: &Section) -> Section {
        self.covariant_derivative(alg, s, t)
            .sub(&self.covariant_derivative(alg, t, s))
            .sub(&alg.lie_bracket(s, t))
    }

    /// The symmetric product `<s : t> = nabla_s t + nabla_t s`.
    pub fn symmetric_product(&self, alg: &LieAlgebroid, s: &Section, t: &Section) -> Section {
        self.covariant_derivative(alg, s, t).add(&self.covariant_derivative(alg, t, s))
    }

    /// Evaluate every coefficient at `p`, indexed `[g][a][b]`.
    pub fn eval(&self, p: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
        let l = self.dim();
        let flat: Vec<Expr> = self.gamma.iter().flatten().flatten().cloned().collect();
        let v = Tape::new(&flat).eval(p)?;
        Ok((0..l).map(|g| (0..l).map(|a| v[(g * l + a) * l..(g * l + a + 1) * l].to_vec()).collect()).collect())
    }

    /// Largest torsion component over basis pairs and points.
    pub fn torsion_residual(&self, alg: &LieAlgebroid, pts: &[Vec<f64>]) -> Result<f64> {
        let l = self.dim();
        let mut exprs = Vec::new();
        for a in 0..l {
            for b in a + 1..l {
                exprs.extend(self.torsion(alg, &Section::basis(l, a), &Section::basis(l, b)).0);
            }
        }
        max_abs(&exprs, pts)
    }

    /// Largest residual of `rho(e_a) G_{bc} = G(nabla_a e_b, e_c) + G(e_b, nabla_a e_c)`.
    pub fn metric_residual(&self, alg: &LieAlgebroid, metric: &BundleMetric, pts: &[Vec<f64>]) -> Result<f64> {
        let l = self.dim();
        let mut exprs = Vec::new();
        for a in 0..l {
            let field = alg.anchor_field(&Section::basis(l, a));
            for b in 0..l {
                for c in 0..l {
                    let mut e = LieAlgebroid::derivation(&field, metric.entry(b, c));
                    for m in 0..l {
                        e = e - &self.gamma[m][a][b] * metric.entry(m, c) - &self.gamma[m][a][c] * metric.entry(b, m);
                    }
                    exprs.push(e);
                }
            }
        }
        max_abs(&exprs, pts)
    }
}

pub(crate) fn max_abs(exprs: &[Expr], pts: &[Vec<f64>]) -> Result<f64> {
    let tape = Tape::new(exprs);
    let mut worst: f64 = 0.0;
    for p in pts {
        for v in tape.eval(p)? {
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// The Levi-Civita connection of `metric`, from the Koszul formula
/// `2 G(nabla_a e_b, e_c) = rho_a G_bc + rho_b G_ac - rho_c G_ab
///  + C^m_{cb} G_am + C^m_{ca} G_bm + C^m_{ab} G_cm`.
pub fn levi_civita(alg: &LieAlgebroid, metric: &BundleMetric) -> Result<Connection> {
    let l = alg.rank();
    if metric.dim() != l {
        return Err(Error::Dimension(format!("metric is {}x{0}, fiber dimension is {l}", metric.dim())));
    }
    let inv = metric.inverse()?;
    let fields: Vec<Vec<Expr>> = (0..l).map(|a| alg.anchor_field(&Section::basis(l, a))).collect();
    let d = |a: usize, b: usize, c: usize| LieAlgebroid::derivation(&fields[a], metric.entry(b, c));
    let mut koszul = vec![vec![vec![Expr::zero(); l]; l]; l];
    for a in 0..l {
        for b in 0..l {
            for c in 0..l {
                let mut k = d(a, b, c) + d(b, a, c) - d(c, a, b);
                for m in 0..l {
                    k = k
                        + alg.c(m, c, b) * metric.entry(a, m)
                        + alg.c(m, c, a) * metric.entry(b, m)
                        + alg.c(m, a, b) * metric.entry(c, m);
                }
                koszul[a][b][c] = k;
            }
        }
    }
    let gamma = (0..l)
        .map(|m| {
            (0..l)
                .map(|a| {
                    (0..l)
                        .map(|b| {
                            let s = Expr::sum((0..l).filter(|&c| !inv[m][c].is_zero()).map(|c| &inv[m][c] * &koszul[a][b][c]));
                            s * 0.5
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Connection::new(gamma)
}

/// A projector `P` onto a subbundle D of E.
#[derive(Debug, Clone)]
pub struct Projector {
    p: Vec<Vec<Expr>>,
}

impl Projector {
    pub fn new(p: Vec<Vec<Expr>>) -> Result<Projector> {
        let l = p.len();
        if p.iter().any(|r| r.len() != l) {
            return Err(Error::Dimension("projector must be square".into()));
        }
        Ok(Projector { p })
    }

    pub fn identity(dim: usize) -> Projector {
        Projector::new(
            (0..dim)
                .map(|i| (0..dim).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect())
                .collect(),
        )
        .unwrap()
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn entry(&self, a: usize, b: usize) -> &Expr {
        &self.p[a][b]
    }

    pub fn rows(&self) -> &[Vec<Expr>] {
        &self.p
    }

    /// The complementary projector `Q = I - P`.
    pub fn complement(&self) -> Projector {
        let l = self.dim();
        Projector {
            p: (0..l)
                .map(|a| {
                    (0..l)
                        .map(|b| if a == b { Expr::one() - &self.p[a][b] } else { -&self.p[a][b] })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn apply(&self, s: &Section) -> Section {
        let l = self.dim();
        Section((0..l).map(|a| Expr::sum((0..l).map(|b| &self.p[a][b] * &s.0[b]))).collect())
    }

    pub fn eval(&self, pt: &[f64]) -> Result<Vec<Vec<f64>>> {
        let l = self.dim();
        let flat: Vec<Expr> = self.p.iter().flatten().cloned().collect();
        let v = Tape::new(&flat).eval(pt)?;
        Ok((0..l).map(|a| v[a * l..(a + 1) * l].to_vec()).collect())
    }

    /// Fiber dimension of D at a point.
    pub fn rank_at(&self, pt: &[f64], tol: f64) -> Result<usize> {
        let m = self.eval(pt)?;
        let l = self.dim();
        Ok(linalg::rank(&nalgebra::DMatrix::from_fn(l, l, |i, j| m[i][j]), tol))
    }

    /// Check `P P = P` at every point.
    pub fn validate(&self, pts: &[Vec<f64>]) -> Result<()> {
        let l = self.dim();
        for pt in pts {
            let m = self.eval(pt)?;
            let mut worst: f64 = 0.0;
            for a in 0..l {
                for b in 0..l {
                    let pp: f64 = (0..l).map(|c| m[a][c] * m[c][b]).sum();
                    worst = worst.max((pp - m[a][b]).abs());
                }
            }
            if worst > 1e-9 {
                return Err(Error::NotIdempotent { point: pt.clone(), residual: worst });
            }
        }
        Ok(())
    }
}

/// The constrained connection `P(nabla_s t) + nabla_s(Q t)`, with
/// coefficients `P^g_m Gamma^m_{ab} + rho_a(Q^g_b) + Gamma^g_{am} Q^m_b`.
pub fn constrained_connection(alg: &LieAlgebroid, conn: &Connection, proj: &Projector) -> Connection {
    let l = conn.dim();
    let q = proj.complement();
    let fields: Vec<Vec<Expr>> = (0..l).map(|a| alg.anchor_field(&Section::basis(l, a))).collect();
    let gamma = (0..l)
        .map(|g| {
            (0..l)
                .map(|a| {
                    (0..l)
                        .map(|b| {
                            let mut e = LieAlgebroid::derivation(&fields[a], q.entry(g, b));
                            for m in 0..l {
                                e = e + proj.entry(g, m) * conn.coeff(m, a, b) + conn.coeff(g, a, m) * q.entry(m, b);
                            }
                            e
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Connection { gamma }
}

/// `grad_G V`, with components `G^{ab} rho^i_b dV/dx^i`.
pub fn gradient(alg: &LieAlgebroid, metric: &BundleMetric, v: &Expr) -> Result<Section> {
    let l = alg.rank();
    if v.as_const().is_some() {
        return Ok(Section::zero(l));
    }
    let inv = metric.inverse()?;
    let dv = differential(alg, v);
    Ok(Section((0..l).map(|a| Expr::sum((0..l).map(|b| &inv[a][b] * &dv.0[b]))).collect()))
}

/// The covector `rho^* dV`, components `rho^i_a dV/dx^i`.
pub fn differential(alg: &LieAlgebroid, v: &Expr) -> CovectorSection {
    let l = alg.rank();
    let dv: Vec<Expr> = (0..alg.base_dim()).map(|i| v.diff(i)).collect();
    CovectorSection(
        (0..l)
            .map(|b| Expr::sum((0..alg.base_dim()).map(|i| alg.rho(i, b) * &dv[i])))
            .collect(),
    )
}

/// `grad_G V` at a single point by a numeric solve; works for any metric.
pub fn gradient_at(alg: &LieAlgebroid, metric: &BundleMetric, v: &Expr, p: &[f64]) -> Result<Vec<f64>> {
    let l = alg.rank();
    let dv = Tape::new(&differential(alg, v).0).eval(p)?;
    let g = metric.eval(p)?;
    let mat = nalgebra::DMatrix::from_fn(l, l, |i, j| g[i][j]);
    let sol = mat
        .lu()
        .solve(&nalgebra::DVector::from_vec(dv))
        .ok_or_else(|| Error::SingularMetric { point: p.to_vec() })?;
    Ok(sol.iter().cloned().collect())
}

/// Outcome of a geodesic-invariance check.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceCheck {
    pub invariant: bool,
    pub max_residual: f64,
}

/// Whether the subbundle spanned by `basis` is closed under the symmetric
/// product of `conn` at the given points.
pub fn is_geodesically_invariant(
    alg: &LieAlgebroid,
    conn: &Connection,
    basis: &[Section],
    pts: &[Vec<f64>],
    tol: f64,
) -> Result<InvarianceCheck> {
    let l = alg.rank();
    let mut products = Vec::new();
    for i in 0..basis.len() {
        for j in i..basis.len() {
            products.push(conn.symmetric_product(alg, &basis[i], &basis[j]));
        }
    }
    let btape = Tape::new(&basis.iter().flat_map(|s| s.0.clone()).collect::<Vec<_>>());
    let ptape = Tape::new(&products.iter().flat_map(|s| s.0.clone()).collect::<Vec<_>>());
    let mut worst: f64 = 0.0;
    for p in pts {
        let bv = btape.eval(p)?;
        let cols: Vec<Vec<f64>> = bv.chunks(l).map(|c| c.to_vec()).collect();
        let r = linalg::rank_of_family(&cols, l, 1e-10);
        if r < basis.len() {
            return Err(Error::RankDeficient { point: p.clone(), rank: r, expected: basis.len() });
        }
        let pv = ptape.eval(p)?;
        for v in pv.chunks(l) {
            let (_, res) = linalg::least_squares(&cols, v, 1e-12);
            worst = worst.max(res);
        }
    }
    Ok(InvarianceCheck { invariant: worst < tol, max_residual: worst })
}
