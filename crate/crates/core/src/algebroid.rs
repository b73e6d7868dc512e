//! Lie algebroids in local coordinates: anchor, structure functions,
//! sections and their bracket.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::linalg;

/// A section of E, given by its components in the local fiber basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Section(pub Vec<Expr>);

impl Section {
    pub fn new(comps: Vec<Expr>) -> Section {
        Section(comps)
    }

    pub fn zero(dim: usize) -> Section {
        Section(vec![Expr::zero(); dim])
    }

    /// The basis section `e_index`.
    pub fn basis(dim: usize, index: usize) -> Section {
        let mut s = Section::zero(dim);
        s.0[index] = Expr::one();
        s
    }

    pub fn constant(values: &[f64]) -> Section {
        Section(values.iter().map(|v| Expr::constant(*v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn comps(&self) -> &[Expr] {
        &self.0
    }

    /// True when every component is the literal constant zero.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Expr::is_zero)
    }

    pub fn scale(&self, f: &Expr) -> Section {
        Section(self.0.iter().map(|c| f * c).collect())
    }

    pub fn add(&self, other: &Section) -> Section {
        Section(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Section) -> Section {
        Section(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Section {
        Section(self.0.iter().map(|a| -a).collect())
    }

    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>> {
        Ok(Tape::new(&self.0).eval(point)?)
    }

    pub fn max_depth(&self) -> usize {
        self.0.iter().map(Expr::depth).max().unwrap_or(0)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplaySection { s: self, names }
    }
}

struct DisplaySection<'a> {
    s: &'a Section,
    names: &'a [String],
}

impl fmt::Display for DisplaySection<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, c) in self.s.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", c.display(self.names))?;
        }
        f.write_str(")")
    }
}

/// A section of the dual bundle E*, for example a control force.
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorSection(pub Vec<Expr>);

impl CovectorSection {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// One structure function `C^gamma_{alpha beta}` (fiber indices).
#[derive(Debug, Clone)]
pub struct StructureEntry {
    pub gamma: usize,
    pub alpha: usize,
    pub beta: usize,
    pub expr: Expr,
}

impl StructureEntry {
    pub fn new(gamma: usize, alpha: usize, beta: usize, expr: Expr) -> StructureEntry {
        StructureEntry { gamma, alpha, beta, expr }
    }
}

/// Local data of a Lie algebroid E over an n-dimensional base.
///
/// `rho[i][a]` is the anchor coefficient for coordinate `i` and fiber index
/// `a`. Structure functions are stored antisymmetrized: only the entries
/// with `alpha < beta` are ever supplied, the rest is derived.
#[derive(Debug, Clone)]
pub struct LieAlgebroid {
    coords: Vec<String>,
    fibers: Vec<String>,
    rho: Vec<Vec<Expr>>,
    c: Vec<Vec<Vec<Expr>>>,
    leaf_dim: Option<usize>,
}

impl LieAlgebroid {
    pub fn new(
        coords: Vec<String>,
        fibers: Vec<String>,
        rho: Vec<Vec<Expr>>,
        structure: Vec<StructureEntry>,
    ) -> Result<LieAlgebroid> {
        let (n, l) = (coords.len(), fibers.len());
        if rho.len() != n || rho.iter().any(|r| r.len() != l) {
            return Err(Error::Dimension(format!("anchor must be {n}x{l}")));
        }
        for (i, row) in rho.iter().enumerate() {
            for e in row {
                if let Some(m) = e.max_var() {
                    if m >= n {
                        return Err(Error::Index(format!("anchor row {i} references coordinate {m}")));
                    }
                }
            }
        }
        let mut c = vec![vec![vec![Expr::zero(); l]; l]; l];
        let mut seen = std::collections::HashSet::new();
        for s in structure {
            if s.gamma >= l || s.alpha >= l || s.beta >= l {
                return Err(Error::Index(format!(
                    "structure entry ({}, {}, {}) out of range for fiber dimension {l}",
                    s.gamma, s.alpha, s.beta
                )));
            }
            if s.alpha == s.beta {
                return Err(Error::Index(format!(
                    "structure entry with equal lower indices {} is forced to vanish",
                    s.alpha
                )));
            }
            if s.expr.max_var().is_some_and(|m| m >= n) {
                return Err(Error::Index("structure function references an unknown coordinate".into()));
            }
            let (a, b, e) = if s.alpha < s.beta {
                (s.alpha, s.beta, s.expr)
            } else {
                (s.beta, s.alpha, -s.expr)
            };
            if !seen.insert((s.gamma, a, b)) {
                return Err(Error::Index(format!("duplicate structure entry ({}, {a}, {b})", s.gamma)));
            }
            c[s.gamma][b][a] = -&e;
            c[s.gamma][a][b] = e;
        }
        Ok(LieAlgebroid { coords, fibers, rho, c, leaf_dim: None })
    }

    /// The tangent bundle of R^n: identity anchor, vanishing structure functions.
    pub fn tangent(coords: Vec<String>) -> LieAlgebroid {
        let n = coords.len();
        let fibers = coords.iter().map(|c| format!("d{c}")).collect();
        let rho = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect())
            .collect();
        LieAlgebroid::new(coords, fibers, rho, Vec::new()).expect("consistent tangent data")
    }

    /// Declare the dimension of the anchor's image at generic points, for
    /// algebroids whose orbits are proper submanifolds of the chart.
    pub fn with_leaf_dim(mut self, dim: usize) -> LieAlgebroid {
        self.leaf_dim = Some(dim);
        self
    }

    pub fn leaf_dim(&self) -> Option<usize> {
        self.leaf_dim
    }

    /// Base dimension n.
    pub fn base_dim(&self) -> usize {
        self.coords.len()
    }

    /// Fiber dimension.
    pub fn rank(&self) -> usize {
        self.fibers.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn fibers(&self) -> &[String] {
        &self.fibers
    }

    pub fn rho(&self, i: usize, a: usize) -> &Expr {
        &self.rho[i][a]
    }

    pub fn anchor(&self) -> &[Vec<Expr>] {
        &self.rho
    }

    /// `C^gamma_{alpha beta}`.
    pub fn c(&self, gamma: usize, alpha: usize, beta: usize) -> &Expr {
        &self.c[gamma][alpha][beta]
    }

    /// The structure entries with `alpha < beta` that are not literally zero.
    pub fn structure_entries(&self) -> Vec<StructureEntry> {
        let l = self.rank();
        let mut out = Vec::new();
        for g in 0..l {
            for a in 0..l {
                for b in a + 1..l {
                    if !self.c[g][a][b].is_zero() {
                        out.push(StructureEntry::new(g, a, b, self.c[g][a][b].clone()));
                    }
                }
            }
        }
        out
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.base_dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, base dimension is {}",
                p.len(),
                self.base_dim()
            )));
        }
        Ok(())
    }

    fn check_section(&self, s: &Section) -> Result<()> {
        if s.dim() != self.rank() {
            return Err(Error::Dimension(format!(
                "section has {} components, fiber dimension is {}",
                s.dim(),
                self.rank()
            )));
        }
        Ok(())
    }

    /// Components `rho(sigma)^i` of the anchored vector field.
    pub fn anchor_field(&self, s: &Section) -> Vec<Expr> {
        self.rho
            .iter()
            .map(|row| Expr::sum(row.iter().zip(&s.0).map(|(r, c)| r * c)))
            .collect()
    }

    /// The derivative of `f` along the vector field with components `field`.
    pub fn derivation(field: &[Expr], f: &Expr) -> Expr {
        if f.as_const().is_some() {
            return Expr::zero();
        }
        Expr::sum(
            field
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| v * &f.diff(i)),
        )
    }

    /// `rho(sigma) F`.
    pub fn anchor_derivative(&self, s: &Section, f: &Expr) -> Expr {
        LieAlgebroid::derivation(&self.anchor_field(s), f)
    }

    /// Anchor applied to a section at a point.
    pub fn anchor_apply(&self, s: &Section, p: &[f64]) -> Result<Vec<f64>> {
        self.check_point(p)?;
        self.check_section(s)?;
        let v = s.eval(p)?;
        let m = self.anchor_matrix(p)?;
        Ok((0..self.base_dim()).map(|i| (0..self.rank()).map(|a| m[(i, a)] * v[a]).sum()).collect())
    }

    pub fn anchor_matrix(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let flat: Vec<Expr> = self.rho.iter().flatten().cloned().collect();
        let v = Tape::new(&flat).eval(p)?;
        Ok(DMatrix::from_row_slice(self.base_dim(), self.rank(), &v))
    }

    /// The Lie bracket of two sections.
    pub fn lie_bracket(&self, s: &Section, t: &Section) -> Section {
        debug_assert_eq!(s.dim(), self.rank());
        debug_assert_eq!(t.dim(), self.rank());
        let vs = self.anchor_field(s);
        let vt = self.anchor_field(t);
        let l = self.rank();
        let comps = (0..l)
            .map(|a| {
                let mut e = LieAlgebroid::derivation(&vs, &t.0[a]) - LieAlgebroid::derivation(&vt, &s.0[a]);
                for b in 0..l {
                    for g in b + 1..l {
                        let c = &self.c[a][b][g];
                        if c.is_zero() {
                            continue;
                        }
                        let w = &s.0[b] * &t.0[g] - &s.0[g] * &t.0[b];
                        if !w.is_zero() {
                            e = e + c * &w;
                        }
                    }
                }
                e
            })
            .collect();
        Section(comps)
    }

    /// Residual expressions of both structure equations: anchor
    /// compatibility with the bracket, and the cyclic Jacobi identity.
    pub fn structure_residuals(&self) -> Vec<Expr> {
        let (n, l) = (self.base_dim(), self.rank());
        let mut out = Vec::new();
        for a in 0..l {
            for b in a + 1..l {
                for i in 0..n {
                    let mut e = Expr::zero();
                    for j in 0..n {
                        e = e + &self.rho[j][a] * &self.rho[i][b].diff(j)
                            - &self.rho[j][b] * &self.rho[i][a].diff(j);
                    }
                    for g in 0..l {
                        e = e - &self.rho[i][g] * &self.c[g][a][b];
                    }
                    out.push(e);
                }
            }
        }
        for a in 0..l {
            for b in a + 1..l {
                for g in b + 1..l {
                    for mu in 0..l {
                        let mut e = Expr::zero();
                        for (x, y, z) in [(a, b, g), (b, g, a), (g, a, b)] {
                            for i in 0..n {
                                e = e + &self.rho[i][x] * &self.c[mu][y][z].diff(i);
                            }
                            for nu in 0..l {
                                e = e + &self.c[mu][x][nu] * &self.c[nu][y][z];
                            }
                        }
                        out.push(e);
                    }
                }
            }
        }
        out
    }

    /// Largest absolute residual of the structure equations over `pts`.
    pub fn check_structure(&self, pts: &[Vec<f64>]) -> Result<f64> {
        if pts.is_empty() {
            return Err(Error::Invalid("check_structure needs at least one point".into()));
        }
        let tape = Tape::new(&self.structure_residuals());
        let mut worst: f64 = 0.0;
        for p in pts {
            self.check_point(p)?;
            for r in tape.eval(p)? {
                worst = worst.max(r.abs());
            }
        }
        Ok(worst)
    }

    /// Orthonormal basis of ker rho(p).
    pub fn ker_anchor(&self, p: &[f64], tol: f64) -> Result<Vec<Vec<f64>>> {
        Ok(linalg::null_space(&self.anchor_matrix(p)?, tol))
    }

    pub fn anchor_rank(&self, p: &[f64], tol: f64) -> Result<usize> {
        Ok(linalg::rank(&self.anchor_matrix(p)?, tol))
    }

    /// Whether the anchor image at `p` has the dimension of the leaf: the
    /// full base dimension unless a leaf dimension was declared.
    pub fn is_locally_transitive(&self, p: &[f64], tol: f64) -> Result<bool> {
        Ok(self.anchor_rank(p, tol)? >= self.leaf_dim.unwrap_or(self.base_dim()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn tr2() -> LieAlgebroid {
        LieAlgebroid::tangent(names(&["x1", "x2"]))
    }

    fn sec(a: &LieAlgebroid, comps: &[&str]) -> Section {
        Section(comps.iter().map(|c| parse(c, a.coords()).unwrap()).collect())
    }

    /// so(3) acting on R^3 by rho(x) xi = x cross xi.
    fn so3_action() -> LieAlgebroid {
        let c = names(&["x1", "x2", "x3"]);
        let p = |s: &str| parse(s, &c).unwrap();
        let rho = vec![
            vec![p("0"), p("-x3"), p("x2")],
            vec![p("x3"), p("0"), p("-x1")],
            vec![p("-x2"), p("x1"), p("0")],
        ];
        let st = vec![
            StructureEntry::new(2, 0, 1, Expr::one()),
            StructureEntry::new(0, 1, 2, Expr::one()),
            StructureEntry::new(1, 2, 0, Expr::one()),
        ];
        LieAlgebroid::new(c, names(&["e1", "e2", "e3"]), rho, st).unwrap().with_leaf_dim(2)
    }

    #[test]
    fn antisymmetric_storage() {
        let a = so3_action();
        assert_eq!(a.c(2, 0, 1).as_const(), Some(1.0));
        assert_eq!(a.c(2, 1, 0).as_const(), Some(-1.0));
        assert_eq!(a.c(1, 2, 0).as_const(), Some(1.0));
        assert_eq!(a.c(1, 0, 2).as_const(), Some(-1.0));
        assert!(a.c(0, 0, 0).is_zero());
    }

    #[test]
    fn duplicate_or_diagonal_entries_rejected() {
        let c = names(&["x"]);
        let rho = vec![vec![Expr::zero(), Expr::zero()]];
        let dup = vec![StructureEntry::new(0, 0, 1, Expr::one()), StructureEntry::new(0, 1, 0, Expr::one())];
        assert!(LieAlgebroid::new(c.clone(), names(&["a", "b"]), rho.clone(), dup).is_err());
        let diag = vec![StructureEntry::new(0, 1, 1, Expr::one())];
        assert!(LieAlgebroid::new(c, names(&["a", "b"]), rho, diag).is_err());
    }

    #[test]
    fn anchor_on_tangent_bundle() {
        let a = tr2();
        assert_eq!(a.anchor_apply(&sec(&a, &["x2", "0"]), &[1.0, 2.0]).unwrap(), vec![2.0, 0.0]);
        assert_eq!(a.anchor_apply(&Section::zero(2), &[0.3, 0.1]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn anchor_of_so3_action() {
        // (0,0,1) x (1,0,0) = (0,1,0)
        let a = so3_action();
        let v = a.anchor_apply(&Section::basis(3, 0), &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(v, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn bracket_on_tr2_matches_hand_computation() {
        let a = tr2();
        let b = a.lie_bracket(&sec(&a, &["x2", "0"]), &sec(&a, &["0", "x1"]));
        let v = b.eval(&[0.7, -1.3]).unwrap();
        assert_eq!(v, vec![-0.7, -1.3]);
        assert_eq!(b.0[0].to_string(), "-x1");
        assert_eq!(b.0[1].to_string(), "x2");
    }

    #[test]
    fn bracket_of_basis_sections_gives_structure_functions() {
        let a = so3_action();
        let b = a.lie_bracket(&Section::basis(3, 0), &Section::basis(3, 1));
        assert_eq!(b.eval(&[0.2, 0.4, 0.9]).unwrap(), vec![0.0, 0.0, 1.0]);
        let s = sec(&a, &["x1", "x2*x3", "sin(x1)"]);
        assert!(a.lie_bracket(&s, &s).eval(&[0.3, -0.2, 0.5]).unwrap().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn structure_equations() {
        let pts: Vec<Vec<f64>> = (0..20).map(|k| vec![0.1 * k as f64, 1.0 - 0.05 * k as f64, 0.3]).collect();
        assert_eq!(tr2().check_structure(&[vec![0.0, 0.0]]).unwrap(), 0.0);
        assert!(so3_action().check_structure(&pts).unwrap() < 1e-12);
        // Reversing the anchor orientation breaks compatibility with C.
        let good = so3_action();
        let flipped: Vec<Vec<Expr>> = good.anchor().iter().map(|r| r.iter().map(|e| -e).collect()).collect();
        let bad = LieAlgebroid::new(
            good.coords().to_vec(),
            good.fibers().to_vec(),
            flipped,
            good.structure_entries(),
        )
        .unwrap();
        assert!(bad.check_structure(&pts).unwrap() > 0.1);
    }

    #[test]
    fn corrupted_structure_function_is_caught() {
        let good = so3_action();
        let mut entries = good.structure_entries();
        entries[0].expr = -&entries[0].expr;
        let bad = LieAlgebroid::new(good.coords().to_vec(), good.fibers().to_vec(), good.anchor().to_vec(), entries)
            .unwrap();
        assert!(bad.check_structure(&[vec![0.5, -0.4, 1.1]]).unwrap() > 0.1);
    }

    #[test]
    fn kernel_of_anchor() {
        assert!(tr2().ker_anchor(&[0.4, 0.1], 1e-10).unwrap().is_empty());
        let k = so3_action().ker_anchor(&[0.0, 0.0, 1.0], 1e-10).unwrap();
        assert_eq!(k.len(), 1);
        assert!((k[0][2].abs() - 1.0).abs() < 1e-12);
        // zero column
        let c = names(&["x"]);
        let a = LieAlgebroid::new(c, names(&["a", "b"]), vec![vec![Expr::one(), Expr::zero()]], vec![]).unwrap();
        let k = a.ker_anchor(&[0.0], 1e-10).unwrap();
        assert_eq!(k.len(), 1);
        assert!((k[0][1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transitivity_uses_declared_leaf_dimension() {
        let a = so3_action();
        assert!(a.is_locally_transitive(&[0.0, 0.0, 1.0], 1e-8).unwrap());
        assert!(!a.is_locally_transitive(&[0.0, 0.0, 0.0], 1e-8).unwrap());
        assert!(tr2().is_locally_transitive(&[0.0, 0.0], 1e-8).unwrap());
    }
}
