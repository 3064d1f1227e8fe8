use std::path::Path;

use qlab::arrangements::{change_detectors, ea_equivalent, refactor, ExperimentalArrangement, Factorization};
use qlab::bell::{chsh_max, chsh_value, classify_regions, correlation_matrix, MeasurementSetting};
use qlab::entanglement::{
    bisect, entropy_criterion, majorization_criterion, min_partial_transpose_eigenvalue, ppt_criterion, schmidt,
    schmidt_rank, von_neumann_entropy, witness_from_entangled, SeparabilityVerdict, WernerState,
};
use qlab::locc::{apply_instrument, is_valid_instrument, one_way_local, CPMap, QuantumInstrument, COMPLETENESS_TOL};
use qlab::powers::{
    actualization_map, build_graph, check_isa_axioms, find_binary_valuation, isa_from_density, maximal_contexts,
    reconstruct_density, ISAValuation, PowersGraph,
};
use qlab::qlin::herm_eig;
use qlab::states::{abstract_purity, operational_purity, operational_purity_witness, BlochPoint};
use qlab::{DensityOperator, OrthonormalBasis, PureVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::config::Tolerances;
use crate::error::{CliError, CliResult};
use crate::files::{named_basis, read_bytes, rows_from_matrix, BasisSpec, LoadedState, ProjectorFile, StateFile};
use crate::report::{matrix, num, nums, obj, sha256_hex, Report};

/// Largest graph searched for a `{0,1}` valuation.
const MAX_BINARY_SEARCH_NODES: usize = 64;
/// Bisection width for located boundaries.
const BOUNDARY_WIDTH: f64 = 1e-12;

pub fn base_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load(path: &Path, tol: &Tolerances) -> CliResult<(Vec<u8>, LoadedState)> {
    let bytes = read_bytes(path)?;
    let loaded = StateFile::parse(&bytes, path)?.validate(tol)?;
    Ok((bytes, loaded))
}

fn verdict(v: &SeparabilityVerdict) -> Value {
    obj([("verdict", json!(v.verdict.to_string())), ("evidence", num(v.evidence))])
}

fn arrangement_summary(ea: &ExperimentalArrangement) -> Value {
    obj([
        ("factorization", json!(ea.factorization().screen_dims())),
        ("degree", json!(ea.degree())),
        ("intensities", nums(&ea.intensities())),
        (
            "screen_marginals",
            Value::Array(ea.screen_marginals().iter().map(|m| nums(m)).collect()),
        ),
        ("product_detectors", json!(ea.detectors().is_some())),
    ])
}

fn top_eigenvector(rho: &DensityOperator) -> CliResult<PureVector> {
    let spectrum = herm_eig(rho.matrix())?;
    Ok(PureVector::normalized(spectrum.eigenvector(0))?)
}

fn bell_summary(rho: &DensityOperator) -> CliResult<Value> {
    let max = chsh_max(rho)?;
    Ok(obj([
        ("chsh_max", num(max.value)),
        ("violates_chsh", json!(max.violates())),
        ("region", json!(classify_regions(rho)?.to_string())),
    ]))
}

pub fn analyze(path: &Path, tol: &Tolerances) -> CliResult<Report> {
    let (bytes, loaded) = load(path, tol)?;
    let rho = &loaded.rho;
    let ea = &loaded.arrangement;
    let dims = loaded.factorization.screen_dims().to_vec();
    let mut r = Map::new();

    if let Some(label) = &loaded.file.label {
        r.insert("label".into(), json!(label));
    }
    r.insert("dim".into(), json!(rho.dim()));
    r.insert("spectrum".into(), nums(&rho.eigenvalues()));
    r.insert("entropy_bits".into(), num(von_neumann_entropy(rho)));

    let detectors = OrthonormalBasis::new(ea.frame().clone())?;
    r.insert(
        "purity".into(),
        obj([
            ("tr_rho_squared", num(rho.purity())),
            ("abstract_pure", json!(abstract_purity(rho, tol.purity))),
            ("operational_pure_detectors", json!(operational_purity(rho, &detectors, tol.purity)?)),
            (
                "operational_pure_computational",
                json!(operational_purity(rho, &OrthonormalBasis::computational(rho.dim()), tol.purity)?),
            ),
            ("operational_pure_some_basis", json!(operational_purity_witness(rho, tol.purity).is_some())),
        ]),
    );
    if rho.dim() == 2 {
        let b = BlochPoint::from_density(rho)?;
        r.insert("bloch".into(), obj([("x", num(b.x)), ("y", num(b.y)), ("z", num(b.z))]));
    }
    r.insert("arrangement".into(), arrangement_summary(ea));

    if dims.len() == 2 {
        let mut sep = Map::new();
        sep.insert("entropy".into(), verdict(&entropy_criterion(rho, &dims, tol.separability)?));
        sep.insert("majorization".into(), verdict(&majorization_criterion(rho, &dims, tol.separability)?));
        sep.insert("ppt".into(), verdict(&ppt_criterion(rho, &dims, tol.separability)?));
        if abstract_purity(rho, tol.purity) {
            let coefficients = schmidt(&top_eigenvector(rho)?, &dims)?;
            sep.insert("schmidt_rank".into(), json!(schmidt_rank(&coefficients)));
            sep.insert("schmidt_coefficients".into(), nums(&coefficients));
        }
        r.insert("separability".into(), Value::Object(sep));
    }
    if dims == [2, 2] {
        r.insert("bell".into(), bell_summary(rho)?);
    }
    Ok(Report {
        command: vec!["analyze".into(), base_name(path)],
        input_sha256: sha256_hex(&[&bytes]),
        results: r,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Detectors { screen: usize, basis: String },
    Refactor(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct TransformOutcome {
    pub report: Report,
    /// Canonical text of the transformed state file.
    pub state: String,
}

fn basis_spec(b: &OrthonormalBasis) -> BasisSpec {
    let d = b.dim();
    let same = |other: &OrthonormalBasis| b.matrix().max_abs_diff(other.matrix()) == 0.0;
    if same(&OrthonormalBasis::computational(d)) {
        BasisSpec::Named("computational".into())
    } else if d == 2 && same(&OrthonormalBasis::hadamard()) {
        BasisSpec::Named("hadamard".into())
    } else if same(&OrthonormalBasis::fourier(d)) {
        BasisSpec::Named("fourier".into())
    } else {
        BasisSpec::Columns(rows_from_matrix(b.matrix()))
    }
}

/// The abstract state is carried over verbatim; only the detectors and the
/// factorization change.
fn transformed_file(source: &StateFile, ea: &ExperimentalArrangement) -> StateFile {
    let (bases, frame) = match ea.detectors() {
        Some(d) => {
            let specs: Vec<BasisSpec> = d.screens().iter().map(basis_spec).collect();
            let all_computational = specs.iter().all(|s| s == &BasisSpec::Named("computational".into()));
            ((!all_computational).then_some(specs), None)
        }
        None => (None, Some(rows_from_matrix(ea.frame()))),
    };
    StateFile {
        schema_version: source.schema_version.clone(),
        label: source.label.clone(),
        dim: source.dim,
        factorization: ea.factorization().screen_dims().to_vec(),
        matrix: source.matrix.clone(),
        bases,
        frame,
    }
}

pub fn transform(path: &Path, t: &Transform, tol: &Tolerances) -> CliResult<TransformOutcome> {
    let (bytes, loaded) = load(path, tol)?;
    let before = &loaded.arrangement;
    let mut command = vec!["transform".into(), base_name(path)];
    let (after, spec) = match t {
        Transform::Detectors { screen, basis } => {
            let dims = loaded.factorization.screen_dims();
            let d = *dims.get(*screen).ok_or_else(|| {
                CliError::validation(format!("--screen {screen}: the state has {} screens", dims.len()))
            })?;
            let b = named_basis(basis, d)?;
            command.extend(["--screen".into(), screen.to_string(), "--basis".into(), basis.clone()]);
            (
                change_detectors(before, *screen, &b)?,
                obj([("screen", json!(screen)), ("basis", json!(basis))]),
            )
        }
        Transform::Refactor(dims) => {
            let f = Factorization::new(dims.clone()).map_err(|e| CliError::validation(format!("--refactor: {e}")))?;
            let joined = dims.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            command.extend(["--refactor".into(), joined]);
            (refactor(before, &f)?, obj([("refactor", json!(dims))]))
        }
    };
    let difference = before
        .abstract_density()
        .matrix()
        .max_abs_diff(after.abstract_density().matrix());
    let mut r = Map::new();
    r.insert("transform".into(), spec);
    r.insert("before".into(), arrangement_summary(before));
    r.insert("after".into(), arrangement_summary(&after));
    r.insert("equivalent".into(), json!(ea_equivalent(before, &after, tol.equivalence)));
    r.insert("max_density_difference".into(), num(difference));
    r.insert(
        "total_intensity".into(),
        obj([
            ("before", num(before.intensities().iter().sum())),
            ("after", num(after.intensities().iter().sum())),
        ]),
    );
    Ok(TransformOutcome {
        report: Report {
            command,
            input_sha256: sha256_hex(&[&bytes]),
            results: r,
        },
        state: transformed_file(&loaded.file, &after).to_canonical_json(),
    })
}

fn parse_override(s: &str) -> CliResult<(String, f64)> {
    let (label, value) = s
        .rsplit_once('=')
        .ok_or_else(|| CliError::parse(format!("--override \"{s}\": expected LABEL=VALUE")))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::parse(format!("--override \"{s}\": \"{value}\" is not a number")))?;
    Ok((label.to_string(), v))
}

fn labels(graph: &PowersGraph, idx: &[usize]) -> Value {
    json!(idx.iter().map(|&i| graph.nodes()[i].label()).collect::<Vec<_>>())
}

pub fn powers(state: &Path, projectors: &Path, overrides: &[String], tol: &Tolerances) -> CliResult<Report> {
    let (state_bytes, loaded) = load(state, tol)?;
    let proj_bytes = read_bytes(projectors)?;
    let family = ProjectorFile::parse(&proj_bytes, projectors)?;
    if family.dim != loaded.rho.dim() {
        return Err(CliError::validation(format!(
            "projectors have dim {}, state has dim {}",
            family.dim,
            loaded.rho.dim()
        )));
    }
    let graph = build_graph(family.nodes()?, tol.commutation)?;
    let mut potentia = isa_from_density(&loaded.rho, &graph)?.into_parts().1;
    let mut command = vec!["powers".into(), base_name(state), base_name(projectors)];
    for o in overrides {
        let (label, value) = parse_override(o)?;
        let i = graph
            .nodes()
            .iter()
            .position(|n| n.label() == label)
            .ok_or_else(|| CliError::validation(format!("--override: no node labelled \"{label}\"")))?;
        potentia[i] = value;
        command.extend(["--override".into(), o.clone()]);
    }
    let val = ISAValuation::new(graph.clone(), potentia)?;
    let axioms = check_isa_axioms(&val, tol.axioms);
    let actual = actualization_map(&val);

    let mut r = Map::new();
    let contexts = match maximal_contexts(&graph) {
        Ok(cs) => Value::Array(cs.iter().map(|c| labels(&graph, &c.nodes)).collect()),
        Err(e) => json!(e.to_string()),
    };
    r.insert(
        "graph".into(),
        obj([
            ("nodes", labels(&graph, &(0..graph.len()).collect::<Vec<_>>())),
            (
                "edges",
                Value::Array(graph.edges().iter().map(|&(i, j)| labels(&graph, &[i, j])).collect()),
            ),
            ("orthogonal_families", json!(graph.orthogonal_families().len())),
            ("maximal_contexts", contexts),
        ]),
    );
    r.insert(
        "potentia".into(),
        Value::Array(
            graph
                .nodes()
                .iter()
                .zip(val.potentia())
                .zip(&actual)
                .map(|((n, &p), &a)| obj([("label", json!(n.label())), ("potentia", num(p)), ("actual", json!(a))]))
                .collect(),
        ),
    );
    r.insert(
        "axioms".into(),
        obj([
            ("valid", json!(axioms.is_valid())),
            ("identity_value", num(axioms.identity_value)),
            ("families_checked", json!(axioms.families_checked)),
            (
                "violations",
                Value::Array(
                    axioms
                        .additivity_violations
                        .iter()
                        .map(|v| {
                            obj([
                                ("family", labels(&graph, &v.family.members)),
                                ("sum_node", json!(graph.nodes()[v.family.sum_node].label())),
                                ("member_sum", num(v.member_sum)),
                                ("sum_value", num(v.sum_value)),
                            ])
                        })
                        .collect(),
                ),
            ),
        ]),
    );
    let reconstruction = match reconstruct_density(&val) {
        Ok(d) => obj([
            ("ok", json!(true)),
            ("max_error", num(d.matrix().max_abs_diff(loaded.rho.matrix()))),
        ]),
        Err(e) => obj([("ok", json!(false)), ("error", json!(e.to_string()))]),
    };
    r.insert("reconstruction".into(), reconstruction);
    let binary = if graph.len() <= MAX_BINARY_SEARCH_NODES {
        json!(find_binary_valuation(&graph).is_some())
    } else {
        Value::Null
    };
    r.insert("binary_valuation_exists".into(), binary);
    Ok(Report {
        command,
        input_sha256: sha256_hex(&[&state_bytes, &proj_bytes]),
        results: r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WernerMode {
    Single(f64),
    Scan { from: f64, to: f64, steps: usize },
}

/// Parses `FROM,TO,STEPS`.
pub fn parse_scan(s: &str) -> CliResult<WernerMode> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::parse(format!("--scan \"{s}\": expected FROM,TO,STEPS"));
    let [from, to, steps] = parts[..] else {
        return Err(bad());
    };
    Ok(WernerMode::Scan {
        from: from.parse().map_err(|_| bad())?,
        to: to.parse().map_err(|_| bad())?,
        steps: steps.parse().map_err(|_| bad())?,
    })
}

fn werner_row(p: f64, tol: &Tolerances) -> CliResult<Value> {
    let rho = WernerState::new(p)?.density();
    let ppt = ppt_criterion(&rho, &[2, 2], tol.separability)?;
    let max = chsh_max(&rho)?;
    Ok(obj([
        ("p", num(p)),
        ("region", json!(classify_regions(&rho)?.to_string())),
        ("ppt_verdict", json!(ppt.verdict.to_string())),
        ("ppt_min_eigenvalue", num(ppt.evidence)),
        ("chsh_max", num(max.value)),
        ("entropy_bits", num(von_neumann_entropy(&rho))),
    ]))
}

fn werner_min_pt(p: f64) -> f64 {
    let rho = WernerState::new(p).expect("p within [0, 1]").density();
    min_partial_transpose_eigenvalue(&rho, &[2, 2]).expect("two-qubit state")
}

fn werner_chsh(p: f64) -> f64 {
    chsh_max(&WernerState::new(p).expect("p within [0, 1]").density())
        .expect("two-qubit state")
        .value
}

/// Boundaries of the Werner line inside `[from, to]`, where they exist.
pub fn werner_boundaries(from: f64, to: f64) -> (Option<f64>, Option<f64>) {
    let ppt = bisect(from, to, BOUNDARY_WIDTH, |p| -werner_min_pt(p));
    let chsh = bisect(from, to, BOUNDARY_WIDTH, |p| werner_chsh(p) - 2.0);
    (ppt, chsh)
}

pub fn werner(mode: WernerMode, tol: &Tolerances) -> CliResult<Report> {
    let check = |p: f64, what: &str| {
        if (0.0..=1.0).contains(&p) {
            Ok(())
        } else {
            Err(CliError::validation(format!("{what} {p} is outside [0, 1]")))
        }
    };
    let mut r = Map::new();
    let command = match mode {
        WernerMode::Single(p) => {
            check(p, "--p")?;
            r.insert("state".into(), werner_row(p, tol)?);
            vec!["werner".into(), "--p".into(), format!("{p}")]
        }
        WernerMode::Scan { from, to, steps } => {
            check(from, "scan start")?;
            check(to, "scan end")?;
            if steps < 2 || from >= to {
                return Err(CliError::validation("--scan needs FROM < TO and at least 2 steps"));
            }
            let rows = (0..steps)
                .map(|i| werner_row(from + (to - from) * i as f64 / (steps - 1) as f64, tol))
                .collect::<CliResult<Vec<_>>>()?;
            let (ppt, chsh) = werner_boundaries(from, to);
            r.insert("table".into(), Value::Array(rows));
            r.insert(
                "boundaries".into(),
                obj([
                    ("ppt_zero_crossing", ppt.map_or(Value::Null, num)),
                    ("chsh_equals_two", chsh.map_or(Value::Null, num)),
                ]),
            );
            vec!["werner".into(), "--scan".into(), format!("{from},{to},{steps}")]
        }
    };
    let digest = sha256_hex(&[command.join(" ").as_bytes()]);
    Ok(Report {
        command,
        input_sha256: digest,
        results: r,
    })
}

fn two_screens(loaded: &LoadedState) -> CliResult<Vec<usize>> {
    let dims = loaded.factorization.screen_dims().to_vec();
    if dims.len() != 2 {
        return Err(CliError::validation(format!(
            "factorization {dims:?}: a bipartite (two-screen) state is required"
        )));
    }
    Ok(dims)
}

pub fn witness(path: &Path, samples: usize, seed: u64, tol: &Tolerances) -> CliResult<Report> {
    let (bytes, loaded) = load(path, tol)?;
    let dims = two_screens(&loaded)?;
    let w = witness_from_entangled(&loaded.rho, &dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Map::new();
    r.insert("ppt_min_eigenvalue".into(), num(min_partial_transpose_eigenvalue(&loaded.rho, &dims)?));
    r.insert("witness".into(), matrix(w.matrix()));
    r.insert("expectation_on_state".into(), num(w.expectation(&loaded.rho)?));
    r.insert(
        "product_check".into(),
        obj([
            ("samples", json!(samples)),
            ("seed", json!(seed)),
            ("min_expectation", num(w.min_over_product_samples(samples, &mut rng))),
        ]),
    );
    Ok(Report {
        command: vec![
            "witness".into(),
            base_name(path),
            "--samples".into(),
            samples.to_string(),
            "--seed".into(),
            seed.to_string(),
        ],
        input_sha256: sha256_hex(&[&bytes]),
        results: r,
    })
}

pub fn bell(path: &Path, tol: &Tolerances) -> CliResult<Report> {
    let (bytes, loaded) = load(path, tol)?;
    if loaded.factorization.screen_dims() != [2, 2] {
        return Err(CliError::validation("bell needs a two-qubit state with factorization [2, 2]"));
    }
    let rho = &loaded.rho;
    let t = correlation_matrix(rho)?;
    let max = chsh_max(rho)?;
    let s = max.setting;
    let mut r = Map::new();
    r.insert("correlation_matrix".into(), json!(t.t.iter().map(|row| nums(row)).collect::<Vec<_>>()));
    r.insert("singular_values".into(), nums(&t.singular_values()));
    r.insert("chsh_max".into(), num(max.value));
    r.insert("violates_chsh".into(), json!(max.violates()));
    r.insert(
        "achieving_setting".into(),
        obj([("a", nums(&s.a)), ("a_prime", nums(&s.a_prime)), ("b", nums(&s.b)), ("b_prime", nums(&s.b_prime))]),
    );
    r.insert("chsh_at_achieving_setting".into(), num(chsh_value(rho, &s)?));
    r.insert("chsh_at_standard_setting".into(), num(chsh_value(rho, &MeasurementSetting::standard())?));
    r.insert("region".into(), json!(classify_regions(rho)?.to_string()));
    Ok(Report {
        command: vec!["bell".into(), base_name(path)],
        input_sha256: sha256_hex(&[&bytes]),
        results: r,
    })
}

pub fn instrument(path: &Path, party: usize, basis: &str, tol: &Tolerances) -> CliResult<Report> {
    let (bytes, loaded) = load(path, tol)?;
    let dims = loaded.factorization.screen_dims().to_vec();
    let d = *dims
        .get(party)
        .ok_or_else(|| CliError::validation(format!("--party {party}: the state has {} screens", dims.len())))?;
    let local = QuantumInstrument::measure_in(&named_basis(basis, d)?);
    let bystanders: Vec<CPMap> = dims
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != party)
        .map(|(_, &dk)| CPMap::identity(dk))
        .collect();
    let ins = one_way_local(dims.len(), party, &local, &bystanders)?;
    let outcomes = apply_instrument(&ins, &loaded.rho)?;
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    let branches = outcomes
        .iter()
        .enumerate()
        .map(|(j, o)| {
            let marginals = match &o.state {
                Some(s) => Value::Array(
                    (0..dims.len())
                        .map(|k| s.reduce(&dims, &[k]).map(|m| matrix(m.matrix())))
                        .collect::<qlab::Result<Vec<_>>>()?,
                ),
                None => Value::Null,
            };
            Ok(obj([
                ("outcome", json!(j)),
                ("probability", num(o.probability)),
                ("state", o.state.as_ref().map_or(Value::Null, |s| matrix(s.matrix()))),
                ("screen_marginals", marginals),
            ]))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut r = Map::new();
    r.insert("party".into(), json!(party));
    r.insert("basis".into(), json!(basis));
    r.insert("valid_instrument".into(), json!(is_valid_instrument(&ins, COMPLETENESS_TOL)));
    r.insert("probability_sum".into(), num(total));
    r.insert("branches".into(), Value::Array(branches));
    Ok(Report {
        command: vec![
            "instrument".into(),
            base_name(path),
            "--party".into(),
            party.to_string(),
            "--basis".into(),
            basis.into(),
        ],
        input_sha256: sha256_hex(&[&bytes]),
        results: r,
    })
}
