//! The model zoo: canonical algebroids and control systems as model files.

use crate::model_file::{AlgebroidSpec, AnalysisSpec, ModelFile, MorphismSpec, StructureSpec, SystemSpec};

fn s(v: &str) -> String {
    v.to_string()
}

fn row(v: &[&str]) -> Vec<String> {
    v.iter().map(|x| s(x)).collect()
}

fn rows(v: &[&[&str]]) -> Vec<Vec<String>> {
    v.iter().map(|r| row(r)).collect()
}

fn identity(n: usize) -> Vec<Vec<String>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { s("1") } else { s("0") }).collect()).collect()
}

fn diagonal(d: &[String]) -> Vec<Vec<String>> {
    let n = d.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { d[i].clone() } else { s("0") }).collect()).collect()
}

fn basis(n: usize, i: usize) -> Vec<String> {
    (0..n).map(|j| if i == j { s("1") } else { s("0") }).collect()
}

fn tangent(n: usize) -> AlgebroidSpec {
    let coords: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    AlgebroidSpec {
        fibers: coords.iter().map(|c| format!("d{c}")).collect(),
        coords,
        anchor: identity(n),
        structure: Vec::new(),
        leaf_dim: None,
    }
}

fn plain(algebroid: AlgebroidSpec) -> SystemSpec {
    SystemSpec {
        algebroid,
        metric: None,
        potential: None,
        inputs: None,
        forces: None,
        drift: None,
        projector: None,
    }
}

fn mech(algebroid: AlgebroidSpec, metric: Vec<Vec<String>>, inputs: Vec<Vec<String>>) -> SystemSpec {
    SystemSpec { metric: Some(metric), inputs: Some(inputs), ..plain(algebroid) }
}

fn analysis(points: Vec<Vec<f64>>, tests: &[&str], max_degree: usize) -> AnalysisSpec {
    AnalysisSpec { points, tests: row(tests), max_degree: Some(max_degree), tol: Some(1e-8) }
}

const MECH_TESTS: [&str; 4] = ["base-access", "zero-access", "base-control", "zero-control"];

fn model(name: &str, description: &str, system: SystemSpec, analysis: AnalysisSpec) -> ModelFile {
    ModelFile {
        name: s(name),
        description: s(description),
        system,
        manifold_map: None,
        morphisms: Vec::new(),
        analysis,
    }
}

/// The tangent bundle of R^n with the Euclidean metric, no potential and
/// every coordinate direction actuated.
pub fn tq_flat(n: usize) -> ModelFile {
    let sys = mech(tangent(n), identity(n), (0..n).map(|i| basis(n, i)).collect());
    model(
        &format!("tq_flat_{n}"),
        &format!("free particle in R^{n}, fully actuated"),
        SystemSpec { drift: Some(vec![s("0"); n]), ..sys },
        analysis(vec![vec![0.0; n], (0..n).map(|i| 0.5 - i as f64).collect()], &MECH_TESTS, 4),
    )
}

/// Free particle in the plane pushed along one axis only.
pub fn tq_flat_2_single() -> ModelFile {
    model(
        "tq_flat_2_single",
        "free particle in the plane with a single input along x1",
        mech(tangent(2), identity(2), vec![basis(2, 0)]),
        analysis(vec![vec![0.0, 0.0], vec![0.5, -1.0]], &MECH_TESTS, 4),
    )
}

/// so(3) acting on R^3 by `rho(x) xi = x cross xi`, with the rigid-body
/// kinetic energy `1/2 J xi.xi` and torques about the first two axes.
pub fn rigid_body(j: [f64; 3]) -> ModelFile {
    let alg = AlgebroidSpec {
        coords: row(&["x1", "x2", "x3"]),
        fibers: row(&["e1", "e2", "e3"]),
        anchor: rows(&[&["0", "-x3", "x2"], &["x3", "0", "-x1"], &["-x2", "x1", "0"]]),
        structure: [("e3", "e1", "e2"), ("e1", "e2", "e3"), ("e2", "e3", "e1")]
            .iter()
            .map(|(u, a, b)| StructureSpec { upper: s(u), lower: [s(a), s(b)], value: s("1") })
            .collect(),
        leaf_dim: Some(2),
    };
    let metric = diagonal(&j.iter().map(|v| format!("{v}")).collect::<Vec<_>>());
    let symmetric = j[0] == j[1];
    let name = if symmetric { "rigid_body_symmetric" } else { "rigid_body" };
    let mut tests = MECH_TESTS.to_vec();
    tests.extend(["manifold-access", "general-access"]);
    ModelFile {
        manifold_map: Some(row(&["x1", "x2"])),
        ..model(
            name,
            &format!("rigid body with inertia diag({}, {}, {}) and two torques", j[0], j[1], j[2]),
            SystemSpec { drift: Some(row(&["0", "0", "0"])), ..mech(alg, metric, vec![basis(3, 0), basis(3, 1)]) },
            analysis(vec![vec![0.0, 0.0, 1.0], vec![0.3, -0.4, 0.8]], &tests, 4),
        )
    }
}

/// Polar coordinates `(r, th)` on the punctured plane, forced radially.
pub fn polar() -> ModelFile {
    let mut alg = tangent(2);
    alg.coords = row(&["r", "th"]);
    alg.fibers = row(&["dr", "dth"]);
    model(
        "polar",
        "free particle in polar coordinates with a radial force",
        mech(alg, diagonal(&row(&["1", "r^2"])), vec![basis(2, 0)]),
        analysis(vec![vec![1.0, 0.0], vec![2.0, 0.5]], &MECH_TESTS, 4),
    )
}

pub fn harmonic_oscillator() -> ModelFile {
    model(
        "harmonic_oscillator",
        "unit mass on a unit spring",
        SystemSpec { potential: Some(s("x1^2/2")), ..mech(tangent(1), identity(1), vec![basis(1, 0)]) },
        analysis(vec![vec![0.0], vec![0.7]], &MECH_TESTS, 4),
    )
}

/// Flat plane with a spring along x1, actuated along x2.
pub fn tr2_potential() -> ModelFile {
    model(
        "tr2_potential",
        "planar particle with a spring along x1 and a force along x2",
        SystemSpec { potential: Some(s("x1^2/2")), ..mech(tangent(2), identity(2), vec![basis(2, 1)]) },
        analysis(vec![vec![0.0, 0.0], vec![0.5, 0.2]], &MECH_TESTS, 4),
    )
}

/// An `x2`-invariant system on TR^2 and its quotient on `T R x R`; the
/// quotient map is the identity on fibers over the projection `x -> x1`.
pub fn reduction_pair() -> ModelFile {
    let source = SystemSpec {
        drift: Some(row(&["0", "x1"])),
        ..mech(tangent(2), diagonal(&row(&["1", "1 + x1^2"])), vec![basis(2, 1)])
    };
    let quotient = AlgebroidSpec {
        coords: row(&["q"]),
        fibers: row(&["dq", "xi"]),
        anchor: rows(&[&["1", "0"]]),
        structure: Vec::new(),
        leaf_dim: None,
    };
    let target = SystemSpec {
        drift: Some(row(&["0", "q"])),
        ..mech(quotient, diagonal(&row(&["1", "1 + q^2"])), vec![basis(2, 1)])
    };
    let mut tests = MECH_TESTS.to_vec();
    tests.extend(["general-access", "general-control"]);
    ModelFile {
        morphisms: vec![MorphismSpec {
            name: s("translation_quotient"),
            target,
            fiber_map: identity(2),
            base_map: row(&["x1"]),
            open: true,
            fiberwise_iso: true,
        }],
        ..model(
            "reduction_pair",
            "translation-invariant planar system and its symmetry reduction",
            source,
            analysis(vec![vec![0.5, 0.3], vec![0.0, 0.2], vec![-1.2, 2.0]], &tests, 4),
        )
    }
}

/// Flat R^3 with velocities constrained to the x1-x2 plane.
pub fn constrained_cart() -> ModelFile {
    model(
        "constrained_cart",
        "particle in R^3 constrained to horizontal velocities, pushed along e1 + x1 e2",
        SystemSpec {
            projector: Some(diagonal(&row(&["1", "1", "0"]))),
            ..mech(tangent(3), identity(3), vec![row(&["1", "x1", "0"])])
        },
        analysis(vec![vec![0.0, 0.0, 0.0], vec![0.4, -0.2, 1.0]], &MECH_TESTS, 4),
    )
}

/// Flat R^3 with velocities in the twisting plane field
/// `span{e1, x1 e2 + e3}`, orthogonal projector.
pub fn constrained_twist() -> ModelFile {
    let p = rows(&[
        &["1", "0", "0"],
        &["0", "x1^2/(1 + x1^2)", "x1/(1 + x1^2)"],
        &["0", "x1/(1 + x1^2)", "1/(1 + x1^2)"],
    ]);
    model(
        "constrained_twist",
        "particle in R^3 with velocities in a twisting plane field, one input",
        SystemSpec { projector: Some(p), ..mech(tangent(3), identity(3), vec![row(&["1", "x1", "1"])]) },
        analysis(vec![vec![0.5, 0.0, 0.0], vec![-0.8, 0.3, 1.0]], &MECH_TESTS, 4),
    )
}

/// Drift `x2^2 e1`, input `e2`: accessible, with a bad bracket outside the
/// good span.
pub fn tr2_quadratic_drift() -> ModelFile {
    model(
        "tr2_quadratic_drift",
        "planar drift x2^2 along x1, input along x2",
        SystemSpec { drift: Some(row(&["x2^2", "0"])), inputs: Some(vec![basis(2, 1)]), ..plain(tangent(2)) },
        analysis(vec![vec![0.0, 0.0]], &["general-access", "general-control"], 6),
    )
}

/// Driftless inputs `e1` and `x1 e2`.
pub fn tr2_driftless() -> ModelFile {
    model(
        "tr2_driftless",
        "driftless planar system with inputs e1 and x1 e2",
        SystemSpec {
            drift: Some(row(&["0", "0"])),
            inputs: Some(vec![basis(2, 0), row(&["0", "x1"])]),
            ..plain(tangent(2))
        },
        analysis(vec![vec![0.0, 0.0], vec![1.5, -0.2]], &["general-access", "general-control"], 6),
    )
}

/// Every zoo model.
pub fn zoo() -> Vec<ModelFile> {
    vec![
        tq_flat(2),
        tq_flat_2_single(),
        harmonic_oscillator(),
        tr2_potential(),
        polar(),
        rigid_body([1.0, 2.0, 3.0]),
        rigid_body([1.0, 1.0, 3.0]),
        reduction_pair(),
        constrained_cart(),
        constrained_twist(),
        tr2_quadratic_drift(),
        tr2_driftless(),
    ]
}

pub fn zoo_model(name: &str) -> Option<ModelFile> {
    zoo().into_iter().find(|m| m.name == name)
}
