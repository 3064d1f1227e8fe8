//! State files and projector files.
//!
//! Both are UTF-8 JSON with complex numbers written as `[re, im]` and
//! matrices as lists of rows.

use std::path::Path;

use qlab::arrangements::{make_ea, make_ea_in_frame, DetectorBasis, ExperimentalArrangement, Factorization};
use qlab::powers::PowerNode;
use qlab::qlin::{c, MAX_ENTRIES};
use qlab::{ComplexMatrix, DensityOperator, OrthonormalBasis, PureVector, C64};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1";

pub type Entry = [f64; 2];
pub type Rows = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    /// `computational`, `hadamard` or `fourier`.
    Named(String),
    /// Square matrix whose columns are the detector vectors.
    Columns(Rows),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub dim: usize,
    pub factorization: Vec<usize>,
    pub matrix: Rows,
    /// Per-screen detectors; computational when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<BasisSpec>>,
    /// Full detector frame, for detectors that are not a product over screens.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Rows>,
}

/// A state file after validation.
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub file: StateFile,
    pub rho: DensityOperator,
    pub factorization: Factorization,
    pub arrangement: ExperimentalArrangement,
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn parse_json<'a, T: Deserialize<'a>>(bytes: &'a [u8], path: &Path) -> CliResult<T> {
    serde_json::from_slice(bytes).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn check_schema(version: &str) -> CliResult<()> {
    if version != SCHEMA_VERSION {
        return Err(CliError::parse(format!(
            "unsupported schema_version \"{version}\", expected \"{SCHEMA_VERSION}\""
        )));
    }
    Ok(())
}

fn check_capacity(dim: usize) -> CliResult<()> {
    if dim.checked_mul(dim).is_none_or(|n| n > MAX_ENTRIES) {
        return Err(CliError::Capacity(format!(
            "dimension {dim} exceeds the {MAX_ENTRIES}-entry limit"
        )));
    }
    Ok(())
}

pub fn matrix_from_rows(rows: &Rows, field: &str) -> CliResult<ComplexMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(CliError::validation(format!("{field}: empty matrix")));
    }
    check_capacity(n)?;
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(CliError::validation(format!(
            "{field}: row {i} has {} entries, expected {n}",
            r.len()
        )));
    }
    let data: Vec<C64> = rows.iter().flatten().map(|&[x, y]| c(x, y)).collect();
    Ok(ComplexMatrix::from_vec(n, n, data)?)
}

pub fn rows_from_matrix(m: &ComplexMatrix) -> Rows {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn named_basis(name: &str, dim: usize) -> CliResult<OrthonormalBasis> {
    match name {
        "computational" => Ok(OrthonormalBasis::computational(dim)),
        "hadamard" if dim == 2 => Ok(OrthonormalBasis::hadamard()),
        "hadamard" => Err(CliError::validation(format!(
            "the hadamard basis needs a screen of 2 detectors, this one has {dim}"
        ))),
        "fourier" => Ok(OrthonormalBasis::fourier(dim)),
        other => Err(CliError::validation(format!(
            "unknown basis \"{other}\" (expected computational, hadamard or fourier)"
        ))),
    }
}

fn basis_from_spec(spec: &BasisSpec, dim: usize, screen: usize) -> CliResult<OrthonormalBasis> {
    let field = format!("bases[{screen}]");
    match spec {
        BasisSpec::Named(name) => named_basis(name, dim).map_err(|e| match e {
            CliError::Validation(m) => CliError::validation(format!("{field}: {m}")),
            other => other,
        }),
        BasisSpec::Columns(rows) => {
            let m = matrix_from_rows(rows, &field)?;
            if m.rows() != dim {
                return Err(CliError::validation(format!(
                    "{field}: {}×{} basis for a screen of {dim} detectors",
                    m.rows(),
                    m.cols()
                )));
            }
            OrthonormalBasis::new(m).map_err(|e| CliError::validation(format!("{field}: {e}")))
        }
    }
}

impl StateFile {
    pub fn parse(bytes: &[u8], path: &Path) -> CliResult<StateFile> {
        let file: StateFile = parse_json(bytes, path)?;
        check_schema(&file.schema_version)?;
        Ok(file)
    }

    pub fn validate(self, tol: &Tolerances) -> CliResult<LoadedState> {
        if self.dim == 0 {
            return Err(CliError::validation("dim: must be positive"));
        }
        check_capacity(self.dim)?;
        if self.matrix.len() != self.dim {
            return Err(CliError::validation(format!(
                "matrix: {} rows for dim {}",
                self.matrix.len(),
                self.dim
            )));
        }
        let m = matrix_from_rows(&self.matrix, "matrix")?;
        let factorization = Factorization::new(self.factorization.clone())
            .map_err(|e| CliError::validation(format!("factorization: {e}")))?;
        if factorization.degree() != self.dim {
            return Err(CliError::validation(format!(
                "factorization: {:?} has product {}, dim is {}",
                self.factorization,
                factorization.degree(),
                self.dim
            )));
        }
        let rho = DensityOperator::with_tolerances(m, tol.state, tol.psd)
            .map_err(|e| CliError::validation(format!("matrix: density operator invariant violated: {e}")))?;
        let arrangement = match (&self.bases, &self.frame) {
            (Some(_), Some(_)) => {
                return Err(CliError::validation("bases and frame are mutually exclusive"));
            }
            (Some(specs), None) => {
                if specs.len() != factorization.screens() {
                    return Err(CliError::validation(format!(
                        "bases: {} entries for {} screens",
                        specs.len(),
                        factorization.screens()
                    )));
                }
                let screens = specs
                    .iter()
                    .zip(factorization.screen_dims())
                    .enumerate()
                    .map(|(k, (s, &d))| basis_from_spec(s, d, k))
                    .collect::<CliResult<Vec<_>>>()?;
                make_ea(&rho, &factorization, &DetectorBasis::new(screens)?)?
            }
            (None, Some(rows)) => {
                let frame = matrix_from_rows(rows, "frame")?;
                make_ea_in_frame(&rho, &factorization, &frame)
                    .map_err(|e| CliError::validation(format!("frame: {e}")))?
            }
            (None, None) => make_ea(&rho, &factorization, &DetectorBasis::computational(&factorization))?,
        };
        Ok(LoadedState {
            file: self,
            rho,
            factorization,
            arrangement,
        })
    }

    /// Canonical text: two-space indentation, one matrix row per line,
    /// trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut fields: Vec<(&str, String)> = vec![("schema_version", j(&self.schema_version))];
        if let Some(label) = &self.label {
            fields.push(("label", j(label)));
        }
        fields.push(("dim", j(&self.dim)));
        fields.push(("factorization", j(&self.factorization)));
        fields.push(("matrix", rows_block(&self.matrix, 2)));
        if let Some(bases) = &self.bases {
            let items: Vec<String> = bases
                .iter()
                .map(|b| match b {
                    BasisSpec::Named(n) => format!("    {}", j(n)),
                    BasisSpec::Columns(rows) => format!("    {}", rows_block(rows, 4)),
                })
                .collect();
            fields.push(("bases", format!("[\n{}\n  ]", items.join(",\n"))));
        }
        if let Some(frame) = &self.frame {
            fields.push(("frame", rows_block(frame, 2)));
        }
        let body: Vec<String> = fields
            .into_iter()
            .map(|(k, v)| format!("  \"{k}\": {v}"))
            .collect();
        format!("{{\n{}\n}}\n", body.join(",\n"))
    }
}

fn rows_block(rows: &Rows, indent: usize) -> String {
    let pad = " ".repeat(indent + 2);
    let lines: Vec<String> = rows
        .iter()
        .map(|r| format!("{pad}{}", serde_json::to_string(r).expect("finite floats serialize")))
        .collect();
    format!("[\n{}\n{}]", lines.join(",\n"), " ".repeat(indent))
}

fn j<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("plain values serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorEntry {
    pub label: String,
    /// A ray; normalized on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Rows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorFile {
    pub schema_version: String,
    pub dim: usize,
    pub projectors: Vec<ProjectorEntry>,
}

impl ProjectorFile {
    pub fn parse(bytes: &[u8], path: &Path) -> CliResult<ProjectorFile> {
        let file: ProjectorFile = parse_json(bytes, path)?;
        check_schema(&file.schema_version)?;
        Ok(file)
    }

    pub fn nodes(&self) -> CliResult<Vec<PowerNode>> {
        check_capacity(self.dim)?;
        self.projectors
            .iter()
            .map(|e| {
                let named = |m: String| CliError::validation(format!("projector \"{}\": {m}", e.label));
                let projector = match (&e.vector, &e.matrix) {
                    (Some(v), None) => {
                        if v.len() != self.dim {
                            return Err(named(format!("vector has {} entries, dim is {}", v.len(), self.dim)));
                        }
                        let amps = v.iter().map(|&[x, y]| c(x, y)).collect();
                        let ray = PureVector::normalized(amps).map_err(|err| named(err.to_string()))?;
                        ComplexMatrix::projector(ray.amplitudes())
                    }
                    (None, Some(rows)) => {
                        let m = matrix_from_rows(rows, &format!("projector \"{}\"", e.label))?;
                        if m.rows() != self.dim {
                            return Err(named(format!("matrix is {}×{}, dim is {}", m.rows(), m.cols(), self.dim)));
                        }
                        m
                    }
                    _ => return Err(named("give exactly one of vector or matrix".into())),
                };
                PowerNode::new(projector, e.label.clone()).map_err(|err| CliError::validation(err.to_string()))
            })
            .collect()
    }
}
