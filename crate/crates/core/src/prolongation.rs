//! The prolongation of a Lie algebroid, realized as an ordinary algebroid
//! over the coordinates `(x, y)` with fiber basis `{X_a, V_a}`.

use crate::algebroid::{LieAlgebroid, Section, StructureEntry};
use crate::connections::Connection;
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};

#[derive(Debug, Clone)]
pub struct Prolongation {
    parent: LieAlgebroid,
    alg: LieAlgebroid,
}

impl Prolongation {
    pub fn new(parent: &LieAlgebroid) -> Prolongation {
        let (n, l) = (parent.base_dim(), parent.rank());
        let mut coords = parent.coords().to_vec();
        coords.extend(parent.fibers().iter().map(|f| format!("y_{f}")));
        let mut fibers: Vec<String> = parent.fibers().iter().map(|f| format!("X_{f}")).collect();
        fibers.extend(parent.fibers().iter().map(|f| format!("V_{f}")));
        let mut rho = vec![vec![Expr::zero(); 2 * l]; n + l];
        for (i, row) in rho.iter_mut().enumerate().take(n) {
            for a in 0..l {
                row[a] = parent.rho(i, a).clone();
            }
        }
        for a in 0..l {
            rho[n + a][l + a] = Expr::one();
        }
        let structure: Vec<StructureEntry> = parent.structure_entries();
        let mut alg = LieAlgebroid::new(coords, fibers, rho, structure).expect("prolongation data is consistent");
        if let Some(d) = parent.leaf_dim() {
            alg = alg.with_leaf_dim(d + l);
        }
        Prolongation { parent: parent.clone(), alg }
    }

    pub fn parent(&self) -> &LieAlgebroid {
        &self.parent
    }

    /// The prolongation as a plain Lie algebroid.
    pub fn algebroid(&self) -> &LieAlgebroid {
        &self.alg
    }

    fn l(&self) -> usize {
        self.parent.rank()
    }

    /// The fiber coordinate `y^a`.
    pub fn y(&self, a: usize) -> Expr {
        Expr::var(self.parent.base_dim() + a)
    }

    /// `s^a V_a`.
    pub fn vertical_lift(&self, s: &Section) -> Section {
        let mut comps = vec![Expr::zero(); self.l()];
        comps.extend(s.0.iter().cloned());
        Section(comps)
    }

    /// `s^a X_a`.
    pub fn x_section(&self, s: &Section) -> Section {
        let mut comps = s.0.clone();
        comps.extend(vec![Expr::zero(); self.l()]);
        Section(comps)
    }

    /// The Liouville section `y^a V_a`.
    pub fn liouville(&self) -> Section {
        let mut comps = vec![Expr::zero(); self.l()];
        comps.extend((0..self.l()).map(|a| self.y(a)));
        Section(comps)
    }

    /// The degree `s` in `range` with `[Liouville, z] = s z` at all points
    /// `(x, y)` up to 1e-10, if there is one.
    pub fn homogeneity_degree(
        &self,
        z: &Section,
        range: std::ops::RangeInclusive<i32>,
        pts: &[Vec<f64>],
    ) -> Result<Option<i32>> {
        let br = self.alg.lie_bracket(&self.liouville(), z);
        let tape = Tape::new(&[br.0.clone(), z.0.clone()].concat());
        let m = 2 * self.l();
        let vals: Vec<Vec<f64>> = pts.iter().map(|p| tape.eval(p)).collect::<std::result::Result<_, _>>()?;
        for s in range {
            let ok = vals
                .iter()
                .all(|v| (0..m).all(|k| (v[k] - s as f64 * v[m + k]).abs() <= 1e-10 * (1.0 + v[m + k].abs())));
            if ok {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    /// The geodesic spray `y^a X_a - 1/2 S^a_{bc} y^b y^c V_a` of a connection.
    pub fn spray_of(&self, conn: &Connection) -> Section {
        let l = self.l();
        let mut comps: Vec<Expr> = (0..l).map(|a| self.y(a)).collect();
        for a in 0..l {
            let mut e = Expr::zero();
            for b in 0..l {
                for c in b..l {
                    // S is symmetric, so the (b,c) and (c,b) terms combine
                    let s = conn.sym(a, b, c);
                    if s.is_zero() {
                        continue;
                    }
                    let w = if b == c { 0.5 } else { 1.0 };
                    e = e + s * w * self.y(b) * self.y(c);
                }
            }
            comps.push(-e);
        }
        Section(comps)
    }

    /// The symmetric product defined by a spray: the section whose vertical
    /// lift is `[s^V, [spray, t^V]]`. The X components of the double bracket
    /// must vanish at `pts` and its V components must not depend on `y`.
    pub fn symmetric_product_from_spray(
        &self,
        spray: &Section,
        s: &Section,
        t: &Section,
        pts: &[Vec<f64>],
    ) -> Result<Section> {
        let l = self.l();
        let inner = self.alg.lie_bracket(spray, &self.vertical_lift(t));
        let outer = self.alg.lie_bracket(&self.vertical_lift(s), &inner);
        let x_part: Vec<Expr> = outer.0[..l].iter().filter(|e| !e.is_zero()).cloned().collect();
        if !x_part.is_empty() {
            let tape = Tape::new(&x_part);
            for p in pts {
                if let Some(v) = tape.eval(p)?.into_iter().find(|v| v.abs() >= 1e-9) {
                    return Err(Error::NotASpray(format!("X component {v:e} at {p:?}")));
                }
            }
        }
        let n = self.parent.base_dim();
        let v_part = outer.0[l..].to_vec();
        for e in &v_part {
            if (n..n + l).any(|i| e.depends_on(i)) {
                return Err(Error::NotASpray("V components depend on the fiber coordinates".into()));
            }
        }
        Ok(Section(v_part))
    }

    /// The base point `(m, 0)` of the zero section.
    pub fn zero_section_point(&self, m: &[f64]) -> Vec<f64> {
        let mut p = m.to_vec();
        p.extend(std::iter::repeat(0.0).take(self.l()));
        p
    }

    /// Split a coefficient vector at a zero-section point into its
    /// horizontal (X) and vertical (V) parts.
    pub fn hor_ver_split(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let l = self.l();
        (z[..l].to_vec(), z[l..2 * l].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::{levi_civita, BundleMetric};
    use crate::expr::parse;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

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
        LieAlgebroid::new(c, names(&["e1", "e2", "e3"]), rho, st).unwrap()
    }

    fn sample(dim: usize, count: usize) -> Vec<Vec<f64>> {
        (0..count)
            .map(|k| (0..dim).map(|i| ((k * 7 + i * 3) % 11) as f64 / 5.0 - 1.0 + 0.01 * i as f64).collect())
            .collect()
    }

    #[test]
    fn prolongation_structure() {
        let a = so3_action();
        let pr = Prolongation::new(&a);
        let al = pr.algebroid();
        assert_eq!(al.base_dim(), 6);
        assert_eq!(al.rank(), 6);
        assert!(al.check_structure(&sample(6, 10)).unwrap() < 1e-12);
        let b = al.lie_bracket(&Section::basis(6, 0), &Section::basis(6, 1));
        assert_eq!(b.eval(&[0.1; 6]).unwrap(), vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(al.lie_bracket(&Section::basis(6, 0), &Section::basis(6, 4)).is_zero());
        assert!(al.lie_bracket(&Section::basis(6, 3), &Section::basis(6, 5)).is_zero());
        for e in al.structure_entries() {
            assert!((3..6).all(|i| !e.expr.depends_on(i)));
        }
    }

    #[test]
    fn liouville_brackets() {
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let pr = Prolongation::new(&a);
        let al = pr.algebroid();
        let d = pr.liouville();
        let p = [0.3, 0.2, -0.7, 1.1];
        let v1 = Section::basis(4, 2);
        assert_eq!(al.lie_bracket(&d, &v1).eval(&p).unwrap(), vec![0.0, 0.0, -1.0, 0.0]);
        assert!(al.lie_bracket(&d, &Section::basis(4, 0)).eval(&p).unwrap().iter().all(|v| *v == 0.0));
        assert!(al.lie_bracket(&d, &d).eval(&p).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn homogeneity_examples() {
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let pr = Prolongation::new(&a);
        let pts = sample(4, 6);
        let s = Section(vec![parse("x1*x2", a.coords()).unwrap(), parse("sin(x2)", a.coords()).unwrap()]);
        assert_eq!(pr.homogeneity_degree(&pr.vertical_lift(&s), -1..=3, &pts).unwrap(), Some(-1));
        let spray = pr.spray_of(&Connection::flat(2));
        assert_eq!(pr.homogeneity_degree(&spray, -1..=3, &pts).unwrap(), Some(1));
        let y1 = pr.y(0);
        let z = Section(vec![y1.clone(), Expr::zero(), y1.powf(2.0), Expr::zero()]);
        assert_eq!(pr.homogeneity_degree(&z, -1..=3, &pts).unwrap(), Some(1));
        let mixed = Section(vec![y1.clone(), Expr::zero(), y1.clone(), Expr::zero()]);
        assert_eq!(pr.homogeneity_degree(&mixed, -1..=3, &pts).unwrap(), None);
    }

    #[test]
    fn sprays() {
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let pr = Prolongation::new(&a);
        let flat = pr.spray_of(&Connection::flat(2));
        assert_eq!(flat.0[0], pr.y(0));
        assert!(flat.0[2].is_zero() && flat.0[3].is_zero());
        // [spray, s^V] = -s^a X_a for constant s
        let s = Section::constant(&[2.0, -1.0]);
        let b = pr.algebroid().lie_bracket(&flat, &pr.vertical_lift(&s));
        assert_eq!(b.eval(&[0.1, 0.2, 0.3, 0.4]).unwrap(), vec![-2.0, 1.0, 0.0, 0.0]);

        let so3 = so3_action();
        let pr = Prolongation::new(&so3);
        let lc = levi_civita(&so3, &BundleMetric::identity(3)).unwrap();
        let spray = pr.spray_of(&lc);
        for v in &spray.0[3..] {
            assert!(v.is_zero() || v.eval(&[0.2, 0.3, 0.4, 0.5, -0.6, 0.7]).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn spray_product_matches_connection() {
        let a = so3_action();
        let pr = Prolongation::new(&a);
        let g = BundleMetric::diagonal(vec![Expr::one(), Expr::constant(2.0), Expr::constant(3.0)]);
        let lc = levi_civita(&a, &g).unwrap();
        let spray = pr.spray_of(&lc);
        let c = a.coords();
        let s = Section(vec![parse("x1", c).unwrap(), parse("1", c).unwrap(), parse("x2*x3", c).unwrap()]);
        let t = Section(vec![parse("cos(x3)", c).unwrap(), parse("x1^2", c).unwrap(), parse("0", c).unwrap()]);
        let pts6 = sample(6, 5);
        let from_spray = pr.symmetric_product_from_spray(&spray, &s, &t, &pts6).unwrap();
        let direct = lc.symmetric_product(&a, &s, &t);
        for p in sample(3, 10) {
            let u = from_spray.eval(&p).unwrap();
            let v = direct.eval(&p).unwrap();
            for k in 0..3 {
                assert!((u[k] - v[k]).abs() < 1e-12, "{u:?} vs {v:?}");
            }
        }
    }

    #[test]
    fn non_spray_is_rejected() {
        let a = LieAlgebroid::tangent(names(&["x1"]));
        let pr = Prolongation::new(&a);
        // X component y^2 instead of y: the double bracket keeps an X part
        let bad = Section(vec![pr.y(0).powf(2.0), Expr::zero()]);
        let r = pr.symmetric_product_from_spray(&bad, &Section::basis(1, 0), &Section::basis(1, 0), &[vec![0.5, 0.5]]);
        assert!(matches!(r, Err(Error::NotASpray(_))));
    }

    #[test]
    fn split_at_zero_section() {
        let pr = Prolongation::new(&LieAlgebroid::tangent(names(&["x1", "x2"])));
        assert_eq!(pr.hor_ver_split(&[1.0, 0.0, 0.0, 0.0]), (vec![1.0, 0.0], vec![0.0, 0.0]));
        assert_eq!(pr.hor_ver_split(&[0.0, 0.0, 0.0, 1.0]), (vec![0.0, 0.0], vec![0.0, 1.0]));
        let (h, v) = pr.hor_ver_split(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!([h, v].concat(), vec![1.0, 2.0, 3.0, 4.0]);
    }
}
