//! Generation of iterated Lie brackets and symmetric products, level by
//! level in total degree, with their values at a point.
//!
//! Lie brackets are generated left-normed, `[g, t]` with `g` a generator:
//! every bracket of a given multidegree is a linear combination of
//! left-normed ones of the same multidegree, so spans and multidegree-based
//! good/bad classifications are unaffected. Symmetric products are not
//! associative in any useful sense and are generated over all pairs.

use rayon::prelude::*;

use crate::algebroid::{LieAlgebroid, Section};
use crate::connections::Connection;
use crate::error::{Error, Result};
use crate::expr::{ExprError, MAX_DEPTH};
use crate::linalg;

/// Formal shape of a generated term, over generator indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Tree {
    Leaf(usize),
    Lie(Box<Tree>, Box<Tree>),
    Sym(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn render(&self, labels: &[String]) -> String {
        match self {
            Tree::Leaf(i) => labels.get(*i).cloned().unwrap_or_else(|| format!("g{i}")),
            Tree::Lie(a, b) => format!("[{}, {}]", a.render(labels), b.render(labels)),
            Tree::Sym(a, b) => format!("<{} : {}>", a.render(labels), b.render(labels)),
        }
    }
}

/// A generated bracket or product with its multidegree and its value at
/// the evaluation point.
#[derive(Debug, Clone)]
pub struct Term {
    pub tree: Tree,
    /// Occurrences of each generator.
    pub degrees: Vec<u32>,
    pub section: Section,
    pub value: Vec<f64>,
}

impl Term {
    pub fn degree(&self) -> usize {
        self.degrees.iter().map(|d| *d as usize).sum()
    }

    fn leaf(index: usize, count: usize, section: Section, point: &[f64]) -> Result<Term> {
        let mut degrees = vec![0; count];
        degrees[index] = 1;
        let value = section.eval(point)?;
        Ok(Term { tree: Tree::Leaf(index), degrees, section, value })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClosureOptions {
    pub max_degree: usize,
    pub tol: f64,
    /// Number of consecutive levels without rank growth after which
    /// generation stops early.
    pub patience: usize,
}

impl ClosureOptions {
    pub fn new(max_degree: usize, tol: f64) -> ClosureOptions {
        ClosureOptions { max_degree, tol, patience: 2 }
    }
}

/// Result of a closure computation at a point.
#[derive(Debug, Clone)]
pub struct Closure {
    pub terms: Vec<Term>,
    /// Orthonormal basis of the span of the term values.
    pub basis: Vec<Vec<f64>>,
    pub rank: usize,
    /// Highest degree that was generated.
    pub degree_reached: usize,
    /// Generation stopped at the degree cap while the rank was still growing.
    pub cap_reached: bool,
}

impl Closure {
    pub fn values(&self) -> Vec<Vec<f64>> {
        self.terms.iter().map(|t| t.value.clone()).collect()
    }

    /// Terms that each raise the rank when taken in generation order.
    pub fn pivots(&self, tol: f64) -> Vec<&Term> {
        let mut chosen: Vec<Vec<f64>> = Vec::new();
        let mut out = Vec::new();
        let dim = self.terms.first().map_or(0, |t| t.value.len());
        for t in &self.terms {
            chosen.push(t.value.clone());
            if linalg::rank_of_family(&chosen, dim, tol) == out.len() + 1 {
                out.push(t);
            } else {
                chosen.pop();
            }
        }
        out
    }
}

fn check_depth(s: &Section) -> Result<()> {
    let d = s.max_depth();
    if d > MAX_DEPTH {
        return Err(Error::Expr(ExprError::DepthExceeded { depth: d, cap: MAX_DEPTH }));
    }
    Ok(())
}

fn add_degrees(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Operation combining two sections.
#[derive(Clone, Copy)]
pub(crate) enum Product<'a> {
    Lie(&'a LieAlgebroid),
    Sym(&'a LieAlgebroid, &'a Connection),
}

impl Product<'_> {
    fn apply(&self, a: &Term, b: &Term, point: &[f64]) -> Result<Option<Term>> {
        let (section, tree) = match self {
            Product::Lie(alg) => (
                alg.lie_bracket(&a.section, &b.section),
                Tree::Lie(Box::new(a.tree.clone()), Box::new(b.tree.clone())),
            ),
            Product::Sym(alg, conn) => (
                conn.symmetric_product(alg, &a.section, &b.section),
                Tree::Sym(Box::new(a.tree.clone()), Box::new(b.tree.clone())),
            ),
        };
        if section.is_zero() {
            return Ok(None);
        }
        check_depth(&section)?;
        let value = section.eval(point)?;
        Ok(Some(Term { tree, degrees: add_degrees(&a.degrees, &b.degrees), section, value }))
    }
}

/// Level-by-level generator. `levels[w]` holds every term of total degree `w`,
/// generators included.
pub(crate) struct Levels<'a> {
    product: Product<'a>,
    gens: Vec<Term>,
    levels: Vec<Vec<Term>>,
    point: Vec<f64>,
}

impl<'a> Levels<'a> {
    pub fn new(product: Product<'a>, gens: Vec<Term>, point: &[f64]) -> Levels<'a> {
        let maxw = gens.iter().map(Term::degree).max().unwrap_or(0);
        let mut levels = vec![Vec::new(); maxw + 1];
        for g in &gens {
            levels[g.degree()].push(g.clone());
        }
        Levels { product, gens, levels, point: point.to_vec() }
    }

    pub fn level(&self, w: usize) -> &[Term] {
        self.levels.get(w).map_or(&[], |v| v.as_slice())
    }

    /// Generate the new terms of degree `w`; earlier levels must be complete.
    pub fn compute(&mut self, w: usize) -> Result<()> {
        while self.levels.len() <= w {
            self.levels.push(Vec::new());
        }
        let pairs: Vec<(&Term, &Term)> = match self.product {
            Product::Lie(_) => self
                .gens
                .iter()
                .filter(|g| g.degree() < w)
                .flat_map(|g| self.levels[w - g.degree()].iter().map(move |t| (g, t)))
                .filter(|(g, t)| g.tree != t.tree)
                .collect(),
            Product::Sym(..) => {
                let mut v = Vec::new();
                for i in 1..=w / 2 {
                    let (a, b) = (&self.levels[i], &self.levels[w - i]);
                    for (j, x) in a.iter().enumerate() {
                        let start = if i == w - i { j } else { 0 };
                        for y in &b[start..] {
                            v.push((x, y));
                        }
                    }
                }
                v
            }
        };
        let product = self.product;
        let point = &self.point;
        let new: Vec<Option<Term>> =
            pairs.par_iter().map(|(a, b)| product.apply(a, b, point)).collect::<Result<_>>()?;
        self.levels[w].extend(new.into_iter().flatten());
        Ok(())
    }
}

/// Run level generation up to the cap, stopping once the rank of the values
/// together with `extra` reaches `full`, or has not grown for `patience` levels.
pub(crate) fn run(
    mut levels: Levels<'_>,
    opts: &ClosureOptions,
    dim: usize,
    full: usize,
    extra: &[Vec<f64>],
) -> Result<Closure> {
    let mut values: Vec<Vec<f64>> = extra.to_vec();
    let mut rank = 0;
    let mut stalled = 0;
    let mut reached = 0;
    let mut cap_reached = true;
    for w in 1..=opts.max_degree.max(1) {
        if w > 1 {
            levels.compute(w)?;
        }
        reached = w;
        values.extend(levels.level(w).iter().map(|t| t.value.clone()));
        let r = linalg::rank_of_family(&values, dim, opts.tol);
        if r > rank {
            stalled = 0;
        } else {
            stalled += 1;
        }
        rank = r;
        if rank >= full || (w > 1 && stalled >= opts.patience) {
            cap_reached = false;
            break;
        }
    }
    let terms: Vec<Term> = (1..=reached).flat_map(|w| levels.level(w).to_vec()).collect();
    let vals: Vec<Vec<f64>> = terms.iter().map(|t| t.value.clone()).collect();
    let basis = linalg::span_basis(&vals, dim, opts.tol);
    Ok(Closure { rank: basis.len(), basis, degree_reached: reached, terms, cap_reached })
}

pub(crate) fn leaves(gens: &[Section], point: &[f64]) -> Result<Vec<Term>> {
    gens.iter().enumerate().map(|(i, s)| Term::leaf(i, gens.len(), s.clone(), point)).collect()
}

/// Span at `p` of all iterated Lie brackets of `gens` up to degree `opts.max_degree`.
pub fn involutive_closure(alg: &LieAlgebroid, gens: &[Section], p: &[f64], opts: &ClosureOptions) -> Result<Closure> {
    let l = alg.rank();
    let levels = Levels::new(Product::Lie(alg), leaves(gens, p)?, p);
    run(levels, opts, l, l, &[])
}

/// Span at `p` of all iterated symmetric products of `gens`.
pub fn symmetric_closure(
    alg: &LieAlgebroid,
    conn: &Connection,
    gens: &[Section],
    p: &[f64],
    opts: &ClosureOptions,
) -> Result<Closure> {
    let l = alg.rank();
    let levels = Levels::new(Product::Sym(alg, conn), leaves(gens, p)?, p);
    run(levels, opts, l, l, &[])
}

/// Lie closure whose generators are previously generated terms, weighted by
/// their own degree (used for `Lie(Sym{...})`).
pub fn lie_closure_of_terms(alg: &LieAlgebroid, gens: &[Term], p: &[f64], opts: &ClosureOptions) -> Result<Closure> {
    let l = alg.rank();
    let levels = Levels::new(Product::Lie(alg), gens.to_vec(), p);
    run(levels, opts, l, l, &[])
}

/// A section of the prolongation split into homogeneous components
/// `(degree, section)`.
#[derive(Debug, Clone)]
pub(crate) struct Graded {
    pub tree: Tree,
    pub degrees: Vec<u32>,
    pub parts: Vec<(i32, Section)>,
    pub value: Vec<f64>,
}

/// Left-normed bracket generation in the prolongation that tracks
/// homogeneity. Components of degree <= -2 vanish identically, and a
/// component of degree `s` in a bracket of length `L` can only reach the
/// zero section (where degrees >= 1 vanish) if `s <= cap - L`; all other
/// components are dropped. Values of the kept terms at the zero section
/// are therefore exact up to the cap.
///
/// `on_level` sees all terms after each length and returns true to stop.
/// Returns the terms, the length reached and whether the cap cut
/// generation short.
pub(crate) fn graded_lie_levels(
    alg: &LieAlgebroid,
    gens: &[Vec<(i32, Section)>],
    point: &[f64],
    cap: usize,
    on_level: &mut dyn FnMut(usize, &[Graded]) -> bool,
) -> Result<(Vec<Graded>, usize, bool)> {
    let k = gens.len();
    let eval = |parts: &[(i32, Section)]| -> Result<Vec<f64>> {
        let dim = alg.rank();
        let mut v = vec![0.0; dim];
        for (s, sec) in parts {
            if *s <= 0 {
                for (a, b) in v.iter_mut().zip(sec.eval(point)?) {
                    *a += b;
                }
            }
        }
        Ok(v)
    };
    let keep = |s: i32, len: usize| s >= -1 && s <= cap as i32 - len as i32;
    let leaves: Vec<Graded> = gens
        .iter()
        .enumerate()
        .map(|(i, parts)| {
            let mut degrees = vec![0; k];
            degrees[i] = 1;
            let parts: Vec<(i32, Section)> =
                parts.iter().filter(|(s, sec)| keep(*s, 1) && !sec.is_zero()).cloned().collect();
            Ok(Graded { tree: Tree::Leaf(i), degrees, value: eval(&parts)?, parts })
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<Graded> = leaves.iter().filter(|g| !g.parts.is_empty()).cloned().collect();
    let mut prev: Vec<Graded> = all.clone();
    let mut reached = 1;
    let mut stopped_early = on_level(1, &all);
    for len in 2..=cap {
        if stopped_early {
            break;
        }
        let pairs: Vec<(&Graded, &Graded)> = leaves
            .iter()
            .flat_map(|g| prev.iter().map(move |t| (g, t)))
            .filter(|(g, t)| g.tree != t.tree)
            .collect();
        let next: Vec<Option<Graded>> = pairs
            .par_iter()
            .map(|(g, t)| -> Result<Option<Graded>> {
                let mut parts: Vec<(i32, Section)> = Vec::new();
                for (sg, a) in &g.parts {
                    for (st, b) in &t.parts {
                        let s = sg + st;
                        if !keep(s, len) {
                            continue;
                        }
                        let br = alg.lie_bracket(a, b);
                        if br.is_zero() {
                            continue;
                        }
                        match parts.iter_mut().find(|(d, _)| *d == s) {
                            Some((_, acc)) => *acc = acc.add(&br),
                            None => parts.push((s, br)),
                        }
                    }
                }
                parts.retain(|(_, s)| !s.is_zero());
                if parts.is_empty() {
                    return Ok(None);
                }
                for (_, s) in &parts {
                    check_depth(s)?;
                }
                let value = eval(&parts)?;
                Ok(Some(Graded {
                    tree: Tree::Lie(Box::new(g.tree.clone()), Box::new(t.tree.clone())),
                    degrees: add_degrees(&g.degrees, &t.degrees),
                    parts,
                    value,
                }))
            })
            .collect::<Result<_>>()?;
        prev = next.into_iter().flatten().collect();
        reached = len;
        all.extend(prev.iter().cloned());
        // with no surviving terms nothing longer can be generated
        if on_level(len, &all) || prev.is_empty() {
            stopped_early = true;
        }
    }
    Ok((all, reached, !stopped_early))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Expr};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn flat_constant_generators() {
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let c = involutive_closure(&a, &[Section::basis(2, 0), Section::basis(2, 1)], &[0.0, 0.0], &ClosureOptions::new(4, 1e-8))
            .unwrap();
        assert_eq!(c.rank, 2);
        assert_eq!(c.terms.len(), 2);
    }

    #[test]
    fn bracket_fills_in_missing_direction() {
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let g = vec![Section::basis(2, 0), Section(vec![Expr::zero(), parse("x1", a.coords()).unwrap()])];
        for p in [[0.0, 0.0], [1.5, -0.2]] {
            let c = involutive_closure(&a, &g, &p, &ClosureOptions::new(4, 1e-8)).unwrap();
            assert_eq!(c.rank, 2);
            assert!(!c.cap_reached);
        }
    }

    #[test]
    fn render_trees() {
        let t = Tree::Lie(Box::new(Tree::Leaf(1)), Box::new(Tree::Sym(Box::new(Tree::Leaf(0)), Box::new(Tree::Leaf(1)))));
        assert_eq!(t.render(&names(&["a", "b"])), "[b, <a : b>]");
    }

    #[test]
    fn cap_flag() {
        // e1 and x1^3 e2: rank 2 needs three brackets; the cap of 2 stops short
        let a = LieAlgebroid::tangent(names(&["x1", "x2"]));
        let g = vec![Section::basis(2, 0), Section(vec![Expr::zero(), parse("x1^3", a.coords()).unwrap()])];
        let c = involutive_closure(&a, &g, &[0.0, 0.0], &ClosureOptions { max_degree: 2, tol: 1e-8, patience: 3 })
            .unwrap();
        assert_eq!(c.rank, 1);
        assert!(c.cap_reached);
        let c = involutive_closure(&a, &g, &[0.0, 0.0], &ClosureOptions { max_degree: 4, tol: 1e-8, patience: 3 })
            .unwrap();
        assert_eq!(c.rank, 2);
        assert!(!c.cap_reached);
    }
}
