//! The JSON file formats shared between the library and the CLI.
//!
//! Complex scalars are always `[re, im]` pairs; matrices are
//! `{"rows", "cols", "data"}` with row-major data. Field order is fixed by
//! the struct layouts below, so output is byte-stable for fixed inputs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cosine::{OperatorFunction, VerificationReport};
use crate::error::{Error, Result};
use crate::factor::{BoundedFactorization, Factorization, ScalarSolutionSet};
use crate::group::{Character, GroupSpec};
use crate::instances::GeneratedInstance;
use crate::kernel::{BoundaryReport, KernelTable, PsdReport, RkhsRealization};
use crate::numerics::CMatrix;

pub fn complex_to_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn pair_to_complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn complex_vec_to_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|&z| complex_to_pair(z)).collect()
}

pub fn pairs_to_complex_vec(p: &[[f64; 2]]) -> Vec<Complex64> {
    p.iter().map(|&q| pair_to_complex(q)).collect()
}

/// How an instance was generated, enough to regenerate or rebuild it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: String,
    pub seed: u64,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none", default)]
    pub basis: Option<CMatrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chars: Option<Vec<Vec<u64>>>,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none", default)]
    pub conjugator: Option<CMatrix>,
}

/// An operator function table on disk: group string, mu exponents,
/// dimension, the full table in canonical element order, and optional
/// provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub group: String,
    pub dim: usize,
    pub mu: Vec<u64>,
    pub table: Vec<CMatrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<Provenance>,
}

impl InstanceFile {
    pub fn new(phi: &OperatorFunction, mu: &Character) -> Self {
        InstanceFile {
            group: phi.spec().to_string(),
            dim: phi.dim(),
            mu: mu.exponents().to_vec(),
            table: phi.table().to_vec(),
            provenance: None,
        }
    }

    pub fn from_generated(inst: &GeneratedInstance) -> Self {
        let mut file = InstanceFile::new(&inst.phi, &inst.mu);
        file.provenance = Some(Provenance {
            kind: inst.kind.as_str().to_string(),
            seed: inst.seed,
            basis: inst.basis.clone(),
            chars: inst
                .chars
                .as_ref()
                .map(|cs| cs.iter().map(|c| c.exponents().to_vec()).collect()),
            conjugator: inst.conjugator.clone(),
        });
        file
    }

    /// Validates the file into live objects.
    pub fn into_parts(self) -> Result<(GroupSpec, Character, OperatorFunction)> {
        let spec = GroupSpec::parse(&self.group)?;
        let mu = spec.character(self.mu)?;
        let phi = OperatorFunction::new(spec.clone(), self.dim, self.table)?;
        Ok((spec, mu, phi))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Verification report as emitted by `verify`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationJson {
    pub tol: f64,
    pub max_equation_residual: f64,
    pub max_identity_residual: f64,
    pub max_parity_residual: f64,
    pub max_commutator: f64,
    pub max_hermitian_residual: f64,
    pub equation_passed: bool,
    pub identity_passed: bool,
    pub parity_passed: bool,
    pub commutator_passed: bool,
    pub hermitian_passed: bool,
    pub passed: bool,
}

impl VerificationJson {
    pub fn from_report(report: &VerificationReport) -> Self {
        VerificationJson {
            tol: report.tol,
            max_equation_residual: report.max_equation_residual,
            max_identity_residual: report.max_identity_residual,
            max_parity_residual: report.max_parity_residual,
            max_commutator: report.max_commutator,
            max_hermitian_residual: report.max_hermitian_residual,
            equation_passed: report.equation_passed,
            identity_passed: report.identity_passed,
            parity_passed: report.parity_passed,
            commutator_passed: report.commutator_passed,
            hermitian_passed: report.hermitian_passed,
            passed: report.passed(),
        }
    }
}

/// Factorization on disk: `{"A", "chars", "mu", "residual", "seed"}`, with
/// the hermitianizing transform and its condition number added for the
/// bounded pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationJson {
    #[serde(rename = "A")]
    pub basis: CMatrix,
    pub chars: Vec<Vec<u64>>,
    pub mu: Vec<u64>,
    pub residual: f64,
    pub seed: Option<u64>,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none", default)]
    pub transform: Option<CMatrix>,
    #[serde(rename = "cond_S", skip_serializing_if = "Option::is_none", default)]
    pub transform_cond: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub multiplicities: Option<Vec<(Vec<u64>, usize)>>,
}

impl FactorizationJson {
    pub fn from_factorization(f: &Factorization) -> Self {
        FactorizationJson {
            basis: f.basis.clone(),
            chars: f
                .characters
                .iter()
                .map(|c| c.exponents().to_vec())
                .collect(),
            mu: f.mu.exponents().to_vec(),
            residual: f.reconstruction_residual,
            seed: f.seed,
            transform: None,
            transform_cond: None,
            multiplicities: None,
        }
    }

    pub fn from_bounded(b: &BoundedFactorization) -> Self {
        let mut json = Self::from_factorization(&b.factorization);
        json.transform = Some(b.transform.clone());
        json.transform_cond = Some(b.cond);
        json
    }

    pub fn with_multiplicities(mut self, groups: &[(Character, usize)]) -> Self {
        self.multiplicities = Some(
            groups
                .iter()
                .map(|(c, m)| (c.exponents().to_vec(), *m))
                .collect(),
        );
        self
    }

    /// Rehydrates the factorization against a group spec.
    pub fn into_factorization(self, spec: &GroupSpec) -> Result<Factorization> {
        let characters = self
            .chars
            .into_iter()
            .map(|e| spec.character(e))
            .collect::<Result<Vec<Character>>>()?;
        if characters.len() != self.basis.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.rows(),
                got: characters.len(),
            });
        }
        Ok(Factorization {
            basis: self.basis,
            characters,
            mu: spec.character(self.mu)?,
            reconstruction_residual: self.residual,
            seed: self.seed,
        })
    }
}

/// Kernel analysis as emitted by `kernel`: the slice, its Gram table, and
/// every report the kernel theory provides.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelReportJson {
    pub group: String,
    pub mu: Vec<u64>,
    pub f: Vec<[f64; 2]>,
    pub gram: CMatrix,
    pub min_eig: f64,
    pub is_psd: bool,
    pub rank: usize,
    pub gram_residual: f64,
    pub f_recovery_residual: f64,
    pub even_part_residual: f64,
    pub regular_representation_residual: f64,
}

impl KernelReportJson {
    pub fn assemble(
        k: &KernelTable,
        psd: &PsdReport,
        realization: &RkhsRealization,
        boundary: &BoundaryReport,
        regular_residual: f64,
    ) -> Self {
        KernelReportJson {
            group: k.spec().to_string(),
            mu: k.mu().exponents().to_vec(),
            f: complex_vec_to_pairs(k.source().values()),
            gram: k.gram().clone(),
            min_eig: psd.min_eig,
            is_psd: psd.is_psd,
            rank: realization.rank,
            gram_residual: realization.gram_residual,
            f_recovery_residual: boundary.f_recovery_residual,
            even_part_residual: boundary.even_part_residual,
            regular_representation_residual: regular_residual,
        }
    }
}

/// One scalar solution on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalarSolutionJson {
    pub f: Vec<[f64; 2]>,
    pub chars: Vec<Vec<u64>>,
    pub residual: f64,
}

/// Output of `scalar`: every distinct scalar solution with its generating
/// characters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalarSetJson {
    pub group: String,
    pub mu: Vec<u64>,
    pub solutions: Vec<ScalarSolutionJson>,
}

impl ScalarSetJson {
    pub fn from_set(spec: &GroupSpec, mu: &Character, set: &ScalarSolutionSet) -> Self {
        ScalarSetJson {
            group: spec.to_string(),
            mu: mu.exponents().to_vec(),
            solutions: set
                .solutions
                .iter()
                .map(|s| ScalarSolutionJson {
                    f: complex_vec_to_pairs(s.table.values()),
                    chars: s
                        .generators
                        .iter()
                        .map(|c| c.exponents().to_vec())
                        .collect(),
                    residual: s.equation_residual,
                })
                .collect(),
        }
    }
}

/// Machine-readable error envelope printed to stderr by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorJson {
    pub error: ErrorBody,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

impl ErrorJson {
    pub fn new(code: &str, message: String) -> Self {
        ErrorJson {
            error: ErrorBody {
                code: code.to_string(),
                message,
            },
        }
    }
}
