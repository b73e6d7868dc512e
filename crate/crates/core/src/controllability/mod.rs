//! Accessibility and controllability tests for general and mechanical
//! control systems.
//!
//! Every test is a one-sided sufficient condition: a failed condition gives
//! [`Outcome::Inconclusive`], never a negative answer. The only necessary
//! condition checked is local transitivity of the anchor.

mod closure;

use serde::{Deserialize, Serialize};

pub use closure::{involutive_closure, lie_closure_of_terms, symmetric_closure, Closure, ClosureOptions, Term, Tree};

use crate::algebroid::{LieAlgebroid, Section};
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::linalg;
use crate::prolongation::Prolongation;
use crate::systems::{GeneralSystem, MechData, MechSystem};
use closure::{Levels, Product};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// The sufficient condition holds.
    Sufficient,
    /// The sufficient condition failed (or was not reached within the cap).
    Inconclusive,
    /// A hypothesis of the test does not hold at the point.
    PreconditionFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranks {
    pub found: usize,
    pub required: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub degree: usize,
    pub reached: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rank: f64,
    pub membership: f64,
}

/// A generated term reported in support of a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub term: String,
    pub value: Vec<f64>,
    /// Coefficients expressing a bad term over the good span.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub property: String,
    pub outcome: Outcome,
    pub ranks: Ranks,
    pub witnesses: Vec<Witness>,
    pub caps: Caps,
    pub tolerances: Tolerances,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Sufficient
    }

    fn precondition(property: &str, opts: &AnalysisOptions, ranks: Ranks, note: String) -> Verdict {
        Verdict {
            property: property.to_string(),
            outcome: Outcome::PreconditionFailed,
            ranks,
            witnesses: Vec::new(),
            caps: Caps { degree: opts.max_degree, reached: false },
            tolerances: opts.tolerances(),
            notes: vec![note],
        }
    }
}

/// Mechanical tests either target reachability in the base (`Base`) or
/// in E starting from the zero section (`Zero`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Base,
    Zero,
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    /// Degree cap: bracket degree for general systems, number of factors of
    /// symmetric products for mechanical ones.
    pub max_degree: usize,
    /// Relative singular-value threshold for ranks.
    pub tol: f64,
    /// Relative residual threshold for span membership.
    pub membership_tol: f64,
}

impl AnalysisOptions {
    pub fn general() -> AnalysisOptions {
        AnalysisOptions { max_degree: 6, tol: 1e-8, membership_tol: 1e-8 }
    }

    pub fn mechanical() -> AnalysisOptions {
        AnalysisOptions { max_degree: 4, tol: 1e-8, membership_tol: 1e-8 }
    }

    pub fn with_max_degree(mut self, d: usize) -> AnalysisOptions {
        self.max_degree = d;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> AnalysisOptions {
        self.tol = tol;
        self.membership_tol = tol;
        self
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances { rank: self.tol, membership: self.membership_tol }
    }

    fn closure(&self) -> ClosureOptions {
        ClosureOptions::new(self.max_degree, self.tol)
    }
}

fn general_labels(k: usize) -> Vec<String> {
    let mut v = vec!["sigma".to_string()];
    v.extend((1..=k).map(|i| format!("eta{i}")));
    v
}

fn mech_labels(k: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=k).map(|i| format!("eta{i}")).collect();
    v.push("grad V".to_string());
    v
}

fn witness(t: &Term, labels: &[String]) -> Witness {
    Witness { term: t.tree.render(labels), value: t.value.clone(), coefficients: None, residual: None }
}

fn transitivity(alg: &LieAlgebroid, p: &[f64], property: &str, opts: &AnalysisOptions) -> Result<Option<Verdict>> {
    if alg.is_locally_transitive(p, opts.tol)? {
        return Ok(None);
    }
    let found = alg.anchor_rank(p, opts.tol)?;
    let required = alg.leaf_dim().unwrap_or(alg.base_dim());
    Ok(Some(Verdict::precondition(
        property,
        opts,
        Ranks { found, required },
        format!("anchor rank {found} < {required}: the system is not locally accessible at this point"),
    )))
}

/// Membership of `b` in the span of `cols`, by least squares.
fn membership(cols: &[Vec<f64>], b: &[f64], tol: f64) -> (Vec<f64>, f64, bool) {
    let (c, r) = linalg::least_squares(cols, b, 1e-12);
    let ok = r < tol * (1.0 + linalg::norm(b));
    (c, r, ok)
}

/// Accessibility of a general system: `Lie{sigma, eta_i}(p) + ker rho(p) = E_p`.
pub fn accessibility_general(sys: &GeneralSystem, p: &[f64], opts: &AnalysisOptions) -> Result<Verdict> {
    const NAME: &str = "general-access";
    let alg = &sys.algebroid;
    if let Some(v) = transitivity(alg, p, NAME, opts)? {
        return Ok(v);
    }
    let l = alg.rank();
    let ker = alg.ker_anchor(p, opts.tol)?;
    let mut gens = vec![sys.drift.clone()];
    gens.extend(sys.inputs.iter().cloned());
    let levels = Levels::new(Product::Lie(alg), closure::leaves(&gens, p)?, p);
    let cl = closure::run(levels, &opts.closure(), l, l, &ker)?;
    let mut all = cl.values();
    all.extend(ker.iter().cloned());
    let found = linalg::rank_of_family(&all, l, opts.tol);
    let labels = general_labels(sys.inputs.len());
    let mut notes = vec![format!("closure rank {}, anchor kernel dimension {}", cl.rank, ker.len())];
    if cl.cap_reached {
        notes.push("degree cap reached before the rank stabilized".into());
    }
    Ok(Verdict {
        property: NAME.into(),
        outcome: if found == l { Outcome::Sufficient } else { Outcome::Inconclusive },
        ranks: Ranks { found, required: l },
        witnesses: cl.pivots(opts.tol).into_iter().map(|t| witness(t, &labels)).collect(),
        caps: Caps { degree: cl.degree_reached, reached: cl.cap_reached },
        tolerances: opts.tolerances(),
        notes,
    })
}

/// Bad terms of each degree must lie in the span of good terms of lower
/// degree together with `extra`. Shared by the Lie-bracket and the
/// symmetric-product tests.
#[allow(clippy::too_many_arguments)]
fn bad_in_good(
    mut levels: Levels<'_>,
    is_bad: &dyn Fn(&[u32]) -> bool,
    extra: &[Vec<f64>],
    full: usize,
    dim: usize,
    labels: &[String],
    opts: &AnalysisOptions,
    property: &str,
) -> Result<Verdict> {
    let mut good: Vec<Vec<f64>> = extra.to_vec();
    let mut witnesses = Vec::new();
    let mut all_ok = true;
    let mut reached = 0;
    let mut cap_reached = true;
    let mut notes = Vec::new();
    let mut nbad = 0;
    for w in 1..=opts.max_degree.max(1) {
        if linalg::rank_of_family(&good, dim, opts.tol) >= full {
            notes.push(format!("good terms of degree < {w} span the fiber; higher bad terms pass trivially"));
            cap_reached = false;
            break;
        }
        if w > 1 {
            levels.compute(w)?;
        }
        reached = w;
        let mut new_good = Vec::new();
        for t in levels.level(w) {
            if is_bad(&t.degrees) {
                nbad += 1;
                let (c, r, ok) = membership(&good, &t.value, opts.membership_tol);
                all_ok &= ok;
                if linalg::norm(&t.value) > 0.0 || !ok {
                    witnesses.push(Witness {
                        term: t.tree.render(labels),
                        value: t.value.clone(),
                        coefficients: Some(c),
                        residual: Some(r),
                    });
                }
            } else {
                new_good.push(t.value.clone());
            }
        }
        good.extend(new_good);
    }
    notes.push(format!("{nbad} bad terms checked"));
    if cap_reached {
        notes.push("bad terms beyond the degree cap were not checked".into());
    }
    Ok(Verdict {
        property: property.into(),
        outcome: if all_ok { Outcome::Sufficient } else { Outcome::Inconclusive },
        ranks: Ranks { found: linalg::rank_of_family(&good, dim, opts.tol), required: full },
        witnesses,
        caps: Caps { degree: reached, reached: cap_reached },
        tolerances: opts.tolerances(),
        notes,
    })
}

/// Small-time local controllability of a general system: every bad bracket
/// (drift count odd, every input count even) lies in the span of good
/// brackets of lower degree and `ker rho(p)`.
pub fn controllability_general(sys: &GeneralSystem, p: &[f64], opts: &AnalysisOptions) -> Result<Verdict> {
    const NAME: &str = "general-control";
    let acc = accessibility_general(sys, p, opts)?;
    if !acc.holds() {
        return Ok(Verdict {
            property: NAME.into(),
            notes: vec![format!("accessibility not established ({:?})", acc.outcome)],
            ..acc
        });
    }
    let alg = &sys.algebroid;
    let l = alg.rank();
    let ker = alg.ker_anchor(p, opts.tol)?;
    let mut gens = vec![sys.drift.clone()];
    gens.extend(sys.inputs.iter().cloned());
    let levels = Levels::new(Product::Lie(alg), closure::leaves(&gens, p)?, p);
    let is_bad = |d: &[u32]| d[0] % 2 == 1 && d[1..].iter().all(|x| x % 2 == 0);
    bad_in_good(levels, &is_bad, &ker, l, l, &general_labels(sys.inputs.len()), opts, NAME)
}

/// Spans of the vertical and horizontal parts of the control Lie algebra of
/// a mechanical system at the zero section over `m`.
#[derive(Debug, Clone)]
pub struct CverChor {
    /// Orthonormal basis of C_ver(m).
    pub cver: Vec<Vec<f64>>,
    /// Orthonormal basis of C_hor(m).
    pub chor: Vec<Vec<f64>>,
    pub ver_witnesses: Vec<Witness>,
    pub hor_witnesses: Vec<Witness>,
    /// Longest bracket generated in the prolongation.
    pub length_reached: usize,
    pub cap_reached: bool,
}

/// C_ver and C_hor by bracket generation in the prolongation: the drift
/// `spray - (grad V)^V` and the lifted inputs `eta_i^V` are bracketed up to
/// length `2 * max_degree`, evaluated at `(m, 0)` and split into horizontal
/// and vertical parts.
pub fn cver_chor(sys: &MechSystem, m: &[f64], opts: &AnalysisOptions) -> Result<CverChor> {
    let data = sys.derive()?;
    cver_chor_with(sys, &data, m, opts)
}

fn ver_target(sys: &MechSystem, m: &[f64], tol: f64) -> Result<usize> {
    match &sys.constraint {
        Some(p) => p.rank_at(m, tol),
        None => Ok(sys.rank()),
    }
}

fn cver_chor_with(sys: &MechSystem, data: &MechData, m: &[f64], opts: &AnalysisOptions) -> Result<CverChor> {
    let l = sys.rank();
    let pr = Prolongation::new(&sys.algebroid);
    let spray = pr.spray_of(&data.connection);
    let mut drift = vec![(1, spray)];
    if !data.potential_section.is_zero() {
        drift.push((-1, pr.vertical_lift(&data.potential_section).neg()));
    }
    let mut gens = vec![drift];
    gens.extend(data.inputs.iter().map(|s| vec![(-1, pr.vertical_lift(s))]));
    let k = data.inputs.len();
    let mut labels = vec!["Gamma - (grad V)^V".to_string()];
    labels.extend((1..=k).map(|i| format!("eta{i}^V")));

    let point = pr.zero_section_point(m);
    let ver_full = ver_target(sys, m, opts.tol)?;
    let cap = 2 * opts.max_degree;
    let mut last = (0usize, 0usize);
    let mut stalled = 0usize;
    let mut on_level = |len: usize, terms: &[closure::Graded]| -> bool {
        let (hor, ver): (Vec<Vec<f64>>, Vec<Vec<f64>>) = terms.iter().map(|t| pr.hor_ver_split(&t.value)).unzip();
        let now = (linalg::rank_of_family(&ver, l, opts.tol), linalg::rank_of_family(&hor, l, opts.tol));
        if now == last && len > 1 {
            stalled += 1;
        } else {
            stalled = 0;
        }
        last = now;
        (now.0 >= ver_full && now.1 >= l) || stalled >= 2
    };
    let (terms, reached, cap_reached) =
        closure::graded_lie_levels(pr.algebroid(), &gens, &point, cap, &mut on_level)?;

    let mut ver_w = Vec::new();
    let mut hor_w = Vec::new();
    let mut vers: Vec<Vec<f64>> = Vec::new();
    let mut hors: Vec<Vec<f64>> = Vec::new();
    for t in &terms {
        let (h, v) = pr.hor_ver_split(&t.value);
        for (part, acc, wit) in [(v, &mut vers, &mut ver_w), (h, &mut hors, &mut hor_w)] {
            let before = linalg::rank_of_family(acc, l, opts.tol);
            acc.push(part.clone());
            if linalg::rank_of_family(acc, l, opts.tol) > before {
                wit.push(Witness { term: t.tree.render(&labels), value: part, coefficients: None, residual: None });
            } else {
                acc.pop();
            }
        }
    }
    Ok(CverChor {
        cver: linalg::span_basis(&vers, l, opts.tol),
        chor: linalg::span_basis(&hors, l, opts.tol),
        ver_witnesses: ver_w,
        hor_witnesses: hor_w,
        length_reached: reached,
        cap_reached,
    })
}

/// C_ver and C_hor for systems without potential by the second route:
/// `C_ver = Sym{eta_i}(m)` and `C_hor = Lie(Sym{eta_i})(m)`.
pub fn cver_chor_via_products(sys: &MechSystem, m: &[f64], opts: &AnalysisOptions) -> Result<CverChor> {
    let data = sys.derive()?;
    if !data.potential_section.is_zero() {
        return Err(Error::Invalid("the symmetric-product route applies to systems without potential".into()));
    }
    let alg = &sys.algebroid;
    let labels = mech_labels(data.inputs.len());
    let sym = symmetric_closure(alg, &data.connection, &data.inputs, m, &opts.closure())?;
    let lie = lie_closure_of_terms(alg, &sym.terms, m, &opts.closure())?;
    let wit = |c: &Closure| c.pivots(opts.tol).into_iter().map(|t| witness(t, &labels)).collect();
    Ok(CverChor {
        cver: sym.basis.clone(),
        chor: lie.basis.clone(),
        ver_witnesses: wit(&sym),
        hor_witnesses: wit(&lie),
        length_reached: sym.degree_reached.max(lie.degree_reached),
        cap_reached: sym.cap_reached || lie.cap_reached,
    })
}

fn mech_name(mode: Mode, control: bool) -> &'static str {
    match (mode, control) {
        (Mode::Base, false) => "base-access",
        (Mode::Zero, false) => "zero-access",
        (Mode::Base, true) => "base-control",
        (Mode::Zero, true) => "zero-control",
    }
}

/// Accessibility of a mechanical system. Base mode:
/// `C_hor(m) + ker rho(m) = E_m`. Zero mode additionally requires
/// `C_ver(m) = E_m` (or `D_m` for constrained systems).
pub fn accessibility_mech(sys: &MechSystem, m: &[f64], mode: Mode, opts: &AnalysisOptions) -> Result<Verdict> {
    let ker = sys.algebroid.ker_anchor(m, opts.tol)?;
    accessibility_mech_with(sys, m, mode, opts, &ker, mech_name(mode, false))
}

fn accessibility_mech_with(
    sys: &MechSystem,
    m: &[f64],
    mode: Mode,
    opts: &AnalysisOptions,
    complement: &[Vec<f64>],
    name: &str,
) -> Result<Verdict> {
    if let Some(v) = transitivity(&sys.algebroid, m, name, opts)? {
        return Ok(v);
    }
    let l = sys.rank();
    let cc = cver_chor(sys, m, opts)?;
    let mut hk = cc.chor.clone();
    hk.extend(complement.iter().cloned());
    let hor_rank = linalg::rank_of_family(&hk, l, opts.tol);
    let ver_rank = cc.cver.len();
    let ver_full = ver_target(sys, m, opts.tol)?;
    let base_ok = hor_rank == l;
    let mut notes = vec![
        format!("rank C_hor + complement = {hor_rank} of {l}"),
        format!("rank C_ver = {ver_rank} of {ver_full}"),
    ];
    if cc.cap_reached {
        notes.push("bracket length cap reached before the ranks stabilized".into());
    }
    let (ok, ranks, witnesses) = match mode {
        Mode::Base => (base_ok, Ranks { found: hor_rank, required: l }, cc.hor_witnesses),
        Mode::Zero => (
            base_ok && ver_rank == ver_full,
            Ranks { found: hor_rank + ver_rank, required: l + ver_full },
            cc.ver_witnesses.into_iter().chain(cc.hor_witnesses).collect(),
        ),
    };
    Ok(Verdict {
        property: name.into(),
        outcome: if ok { Outcome::Sufficient } else { Outcome::Inconclusive },
        ranks,
        witnesses,
        caps: Caps { degree: opts.max_degree, reached: cc.cap_reached },
        tolerances: opts.tolerances(),
        notes,
    })
}

/// Controllability of a mechanical system: every bad symmetric product
/// (each input occurring an even number of times, the potential term
/// unrestricted) is a combination of good products of lower degree, plus
/// elements of `ker rho(m)` in base mode.
pub fn controllability_mech(sys: &MechSystem, m: &[f64], mode: Mode, opts: &AnalysisOptions) -> Result<Verdict> {
    let ker = sys.algebroid.ker_anchor(m, opts.tol)?;
    controllability_mech_with(sys, m, mode, opts, &ker, mech_name(mode, true))
}

fn controllability_mech_with(
    sys: &MechSystem,
    m: &[f64],
    mode: Mode,
    opts: &AnalysisOptions,
    complement: &[Vec<f64>],
    name: &str,
) -> Result<Verdict> {
    let acc = accessibility_mech_with(sys, m, mode, opts, complement, mech_name(mode, false))?;
    if !acc.holds() {
        return Ok(Verdict {
            property: name.into(),
            notes: vec![format!("accessibility not established ({:?})", acc.outcome)],
            ..acc
        });
    }
    let data = sys.derive()?;
    let l = sys.rank();
    let k = data.inputs.len();
    let mut gens = data.inputs.clone();
    gens.push(data.potential_section.clone());
    let levels = Levels::new(Product::Sym(&sys.algebroid, &data.connection), closure::leaves(&gens, m)?, m);
    let is_bad = move |d: &[u32]| d[..k].iter().all(|x| x % 2 == 0);
    let (extra, full) = match mode {
        Mode::Base => (complement.to_vec(), l),
        Mode::Zero => (Vec::new(), ver_target(sys, m, opts.tol)?),
    };
    bad_in_good(levels, &is_bad, &extra, full, l, &mech_labels(k), opts, name)
}

/// `rho(m)^{-1}(ker T psi)`: fiber directions whose anchor image is killed
/// by the differential of `psi`, or a precondition failure when `T psi o rho`
/// is not onto.
fn manifold_complement(
    sys: &MechSystem,
    psi: &[Expr],
    m: &[f64],
    opts: &AnalysisOptions,
) -> Result<std::result::Result<Vec<Vec<f64>>, (Ranks, String)>> {
    let n = sys.algebroid.base_dim();
    let nbar = psi.len();
    let jac: Vec<Expr> = psi.iter().flat_map(|f| (0..n).map(move |i| f.diff(i))).collect();
    let jv = Tape::new(&jac).eval(m)?;
    let j = nalgebra::DMatrix::from_row_slice(nbar, n, &jv);
    let a = j * sys.algebroid.anchor_matrix(m)?;
    let r = linalg::rank(&a, opts.tol);
    if r < nbar {
        return Ok(Err((
            Ranks { found: r, required: nbar },
            format!("T psi o rho has rank {r} < {nbar}: the map is not onto the target tangent space"),
        )));
    }
    Ok(Ok(linalg::null_space(&a, opts.tol)))
}

/// Base accessibility with regards to a submersion `psi: M -> N`:
/// `C_hor(m) + rho^{-1}(ker T psi) = E_m`.
pub fn accessibility_wrt_manifold(sys: &MechSystem, psi: &[Expr], m: &[f64], opts: &AnalysisOptions) -> Result<Verdict> {
    const NAME: &str = "manifold-access";
    match manifold_complement(sys, psi, m, opts)? {
        Ok(k) => accessibility_mech_with(sys, m, Mode::Base, opts, &k, NAME),
        Err((ranks, note)) => Ok(Verdict::precondition(NAME, opts, ranks, note)),
    }
}

/// Base controllability with regards to `psi`.
pub fn controllability_wrt_manifold(
    sys: &MechSystem,
    psi: &[Expr],
    m: &[f64],
    opts: &AnalysisOptions,
) -> Result<Verdict> {
    const NAME: &str = "manifold-control";
    match manifold_complement(sys, psi, m, opts)? {
        Ok(k) => controllability_mech_with(sys, m, Mode::Base, opts, &k, NAME),
        Err((ranks, note)) => Ok(Verdict::precondition(NAME, opts, ranks, note)),
    }
}

/// Names accepted by [`run_named`].
pub const TEST_NAMES: [&str; 8] = [
    "base-access",
    "zero-access",
    "base-control",
    "zero-control",
    "manifold-access",
    "manifold-control",
    "general-access",
    "general-control",
];

/// Systems a named test may run on.
pub struct Subject<'a> {
    pub mech: Option<&'a MechSystem>,
    pub general: Option<&'a GeneralSystem>,
    pub manifold_map: Option<&'a [Expr]>,
}

/// Run a test by its report name.
pub fn run_named(name: &str, subject: &Subject<'_>, p: &[f64], opts: &AnalysisOptions) -> Result<Verdict> {
    let need_mech = || subject.mech.ok_or_else(|| Error::Invalid(format!("test `{name}` needs a mechanical system")));
    let need_psi = || subject.manifold_map.ok_or_else(|| Error::Invalid(format!("test `{name}` needs a manifold map")));
    match name {
        "base-access" => accessibility_mech(need_mech()?, p, Mode::Base, opts),
        "zero-access" => accessibility_mech(need_mech()?, p, Mode::Zero, opts),
        "base-control" => controllability_mech(need_mech()?, p, Mode::Base, opts),
        "zero-control" => controllability_mech(need_mech()?, p, Mode::Zero, opts),
        "manifold-access" => accessibility_wrt_manifold(need_mech()?, need_psi()?, p, opts),
        "manifold-control" => controllability_wrt_manifold(need_mech()?, need_psi()?, p, opts),
        "general-access" | "general-control" => {
            let sys = subject
                .general
                .ok_or_else(|| Error::Invalid(format!("test `{name}` needs a drift or a general system")))?;
            if name == "general-access" {
                accessibility_general(sys, p, opts)
            } else {
                controllability_general(sys, p, opts)
            }
        }
        _ => Err(Error::Invalid(format!("unknown test `{name}`; expected one of {}", TEST_NAMES.join(", ")))),
    }
}

/// The generic sections `e_a` of an algebroid, convenient as inputs.
pub fn basis_sections(alg: &LieAlgebroid) -> Vec<Section> {
    (0..alg.rank()).map(|a| Section::basis(alg.rank(), a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::model_file::Model;
    use crate::models;

    fn compile(f: crate::model_file::ModelFile) -> Model {
        f.compile().unwrap()
    }

    fn opts() -> AnalysisOptions {
        AnalysisOptions::mechanical()
    }

    #[test]
    fn driftless_general_system() {
        let m = compile(models::tr2_driftless());
        let sys = m.system.general.as_ref().unwrap();
        for p in &m.analysis.points {
            let a = accessibility_general(sys, p, &AnalysisOptions::general()).unwrap();
            assert!(a.holds(), "{a:?}");
            let c = controllability_general(sys, p, &AnalysisOptions::general()).unwrap();
            assert!(c.holds(), "{c:?}");
        }
    }

    #[test]
    fn single_input_is_inconclusive() {
        let a = LieAlgebroid::tangent(vec!["x1".into(), "x2".into()]);
        let sys = GeneralSystem::new(a, Section::zero(2), vec![Section::basis(2, 0)]).unwrap();
        let v = accessibility_general(&sys, &[0.0, 0.0], &AnalysisOptions::general()).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert_eq!(v.ranks, Ranks { found: 1, required: 2 });
    }

    #[test]
    fn quadratic_drift_bad_bracket() {
        let m = compile(models::tr2_quadratic_drift());
        let sys = m.system.general.as_ref().unwrap();
        let o = AnalysisOptions::general();
        assert!(accessibility_general(sys, &[0.0, 0.0], &o).unwrap().holds());
        let c = controllability_general(sys, &[0.0, 0.0], &o).unwrap();
        assert_eq!(c.outcome, Outcome::Inconclusive);
        // [eta, [sigma, eta]] = -2 e1 by hand, outside span{e2}
        let w = c.witnesses.iter().find(|w| w.term == "[eta1, [sigma, eta1]]").unwrap();
        assert!((w.value[0] + 2.0).abs() < 1e-12 && w.value[1].abs() < 1e-12);
        assert!((w.residual.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn so3_action_general_access() {
        let m = compile(models::rigid_body([1.0, 2.0, 3.0]));
        let sys = m.system.general.as_ref().unwrap();
        let v = accessibility_general(sys, &[0.0, 0.0, 1.0], &AnalysisOptions::general()).unwrap();
        assert!(v.holds());
        assert_eq!(v.ranks.found, 3);
    }

    #[test]
    fn rigid_body_verdicts() {
        let m = compile(models::rigid_body([1.0, 2.0, 3.0]));
        let sys = m.system.mech.as_ref().unwrap();
        let p = [0.0, 0.0, 1.0];
        let z = accessibility_mech(sys, &p, Mode::Zero, &opts()).unwrap();
        assert!(z.holds(), "{z:?}");
        let cc = cver_chor(sys, &p, &opts()).unwrap();
        assert_eq!((cc.cver.len(), cc.chor.len()), (3, 3));
        assert!(controllability_mech(sys, &p, Mode::Zero, &opts()).unwrap().holds());
        assert!(controllability_mech(sys, &p, Mode::Base, &opts()).unwrap().holds());

        let m = compile(models::rigid_body([1.0, 1.0, 3.0]));
        let sys = m.system.mech.as_ref().unwrap();
        let z = accessibility_mech(sys, &p, Mode::Zero, &opts()).unwrap();
        assert_eq!(z.outcome, Outcome::Inconclusive);
        assert_eq!(cver_chor(sys, &p, &opts()).unwrap().cver.len(), 2);
    }

    #[test]
    fn routes_agree_on_rigid_body() {
        let m = compile(models::rigid_body([1.0, 2.0, 3.0]));
        let sys = m.system.mech.as_ref().unwrap();
        for p in &m.analysis.points {
            let a = cver_chor(sys, p, &opts()).unwrap();
            let b = cver_chor_via_products(sys, p, &opts()).unwrap();
            assert!(linalg::same_span(&a.cver, &b.cver, 3, 1e-8));
            assert!(linalg::same_span(&a.chor, &b.chor, 3, 1e-8));
        }
    }

    #[test]
    fn constrained_cart_spans() {
        let m = compile(models::constrained_cart());
        let sys = m.system.mech.as_ref().unwrap();
        let p = [0.4, -0.2, 1.0];
        let cc = cver_chor(sys, &p, &opts()).unwrap();
        assert_eq!(cc.cver.len(), 2);
        assert_eq!(cc.chor.len(), 2);
        let b = accessibility_mech(sys, &p, Mode::Base, &opts()).unwrap();
        assert_eq!(b.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn potential_decoupled_from_input() {
        let m = compile(models::tr2_potential());
        let sys = m.system.mech.as_ref().unwrap();
        // away from equilibrium the drift itself is vertical, -grad V(m) = -x1 e1
        let cc = cver_chor(sys, &[0.5, 0.2], &opts()).unwrap();
        assert_eq!(cc.cver.len(), 2);
        assert!(linalg::same_span(&cc.chor, &[vec![0.0, 1.0]], 2, 1e-10));
        // at equilibrium only the input direction is left
        let cc = cver_chor(sys, &[0.0, 0.2], &opts()).unwrap();
        assert!(linalg::same_span(&cc.cver, &[vec![0.0, 1.0]], 2, 1e-10));
        assert!(linalg::same_span(&cc.chor, &[vec![0.0, 1.0]], 2, 1e-10));
        let v = accessibility_mech(sys, &[0.5, 0.2], Mode::Zero, &opts()).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn fully_actuated_is_trivially_accessible() {
        let m = compile(models::tq_flat(2));
        let sys = m.system.mech.as_ref().unwrap();
        for mode in [Mode::Base, Mode::Zero] {
            assert!(accessibility_mech(sys, &[0.5, -0.5], mode, &opts()).unwrap().holds());
            assert!(controllability_mech(sys, &[0.5, -0.5], mode, &opts()).unwrap().holds());
        }
    }

    #[test]
    fn manifold_tests() {
        let m = compile(models::rigid_body([1.0, 2.0, 3.0]));
        let sys = m.system.mech.as_ref().unwrap();
        let p = [0.0, 0.0, 1.0];
        let c = m.system.algebroid.coords();
        let proj = vec![parse("x1", c).unwrap(), parse("x2", c).unwrap()];
        assert!(accessibility_wrt_manifold(sys, &proj, &p, &opts()).unwrap().holds());
        // a constant map is not onto a one-dimensional target
        let v = accessibility_wrt_manifold(sys, &[Expr::constant(1.0)], &p, &opts()).unwrap();
        assert_eq!(v.outcome, Outcome::PreconditionFailed);

        // the identity reduces to base accessibility
        let m = compile(models::tq_flat_2_single());
        let sys = m.system.mech.as_ref().unwrap();
        let id = vec![Expr::var(0), Expr::var(1)];
        for p in &m.analysis.points {
            let a = accessibility_wrt_manifold(sys, &id, p, &opts()).unwrap();
            let b = accessibility_mech(sys, p, Mode::Base, &opts()).unwrap();
            assert_eq!((a.outcome, a.ranks), (b.outcome, b.ranks));
        }
    }

    #[test]
    fn transitivity_failure_is_reported() {
        let m = compile(models::rigid_body([1.0, 2.0, 3.0]));
        let v = accessibility_mech(m.system.mech.as_ref().unwrap(), &[0.0, 0.0, 0.0], Mode::Zero, &opts()).unwrap();
        assert_eq!(v.outcome, Outcome::PreconditionFailed);
    }

    #[test]
    fn named_dispatch() {
        let m = compile(models::rigid_body([1.0, 2.0, 3.0]));
        let subject = Subject {
            mech: m.system.mech.as_ref(),
            general: m.system.general.as_ref(),
            manifold_map: m.manifold_map.as_deref(),
        };
        for name in TEST_NAMES {
            let v = run_named(name, &subject, &[0.0, 0.0, 1.0], &opts()).unwrap();
            assert_eq!(v.property, name);
        }
        assert!(run_named("nope", &subject, &[0.0, 0.0, 1.0], &opts()).is_err());
    }
}
