//! Command-line front end: instance generation, verification,
//! factorization, kernel analysis and scalar enumeration over the JSON
//! instance format.
//!
//! Results go to stdout as JSON; diagnostics go to stderr as one-line JSON
//! envelopes. Exit codes: 0 success, 1 mathematical failure, 2 usage or
//! parse error, 3 numerical non-convergence.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use mucosine::cosine::{scalar_slice, verify_hermitian, verify_mu_cosine, OperatorFunction};
use mucosine::error::Error;
use mucosine::factor::{enumerate_scalar_solutions, factor_bounded, factor_to_characters};
use mucosine::group::{Character, GroupSpec};
use mucosine::instances::{generate, InstanceKind};
use mucosine::io::{
    pairs_to_complex_vec, ErrorJson, FactorizationJson, InstanceFile, KernelReportJson,
    ScalarSetJson, VerificationJson,
};
use mucosine::kernel::{
    build_kernel, kernel_boundary_checks, psd_check, regular_representation_identity, rkhs_realize,
    DEFAULT_RANK_TOL,
};

const EXIT_OK: u8 = 0;
const EXIT_MATH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mucosine",
    version,
    about = "Construct, verify and factor operator-valued cosine functions on finite abelian groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Hermitian,
    Conjugated,
    Scalar,
    #[value(name = "non-solution")]
    NonSolution,
}

impl KindArg {
    fn into_kind(self) -> InstanceKind {
        match self {
            KindArg::Hermitian => InstanceKind::Hermitian,
            KindArg::Conjugated => InstanceKind::Conjugated,
            KindArg::Scalar => InstanceKind::Scalar,
            KindArg::NonSolution => InstanceKind::NonSolution,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Hermitian,
    Bounded,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance file on stdout
    Gen {
        /// Group as "n1xn2x...xnk", e.g. "4x2"
        #[arg(long)]
        group: String,
        /// Operator dimension
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Character exponents, comma separated, e.g. "2" or "2,1"
        /// (defaults to the trivial character)
        #[arg(long)]
        mu: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = KindArg::Hermitian)]
        kind: KindArg,
    },
    /// Verify an instance file ("-" reads stdin); exit 0 iff all clauses pass
    Verify {
        file: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Factor an instance into characters and a change of basis
    Factor {
        file: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Hermitian)]
        mode: ModeArg,
        /// Seed for the generic-combination step in bounded mode
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Kernel analysis of a scalar slice of a hermitian instance
    Kernel {
        file: String,
        /// Slice vector: "basis-k" or a JSON array of [re,im] pairs
        #[arg(long, default_value = "basis-0")]
        xi: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Enumerate all distinct scalar solutions for a group and character
    Scalar {
        #[arg(long)]
        group: String,
        #[arg(long)]
        mu: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Gen {
            group,
            dim,
            mu,
            seed,
            kind,
        } => cmd_gen(&group, dim, mu.as_deref(), seed, kind),
        Command::Verify { file, tol } => cmd_verify(&file, tol),
        Command::Factor {
            file,
            tol,
            mode,
            seed,
        } => cmd_factor(&file, tol, mode, seed),
        Command::Kernel { file, xi, tol } => cmd_kernel(&file, &xi, tol),
        Command::Scalar { group, mu } => cmd_scalar(&group, mu.as_deref()),
    };
    ExitCode::from(code)
}

fn fail(err: &Error) -> u8 {
    let envelope = ErrorJson::new(err.code(), err.to_string());
    eprintln!(
        "{}",
        serde_json::to_string(&envelope).expect("error envelope")
    );
    if err.is_structural() {
        EXIT_USAGE
    } else if matches!(err, Error::NonConvergence { .. }) {
        EXIT_NONCONVERGENCE
    } else {
        EXIT_MATH
    }
}

fn fail_usage(code: &str, message: String) -> u8 {
    let envelope = ErrorJson::new(code, message);
    eprintln!(
        "{}",
        serde_json::to_string(&envelope).expect("error envelope")
    );
    EXIT_USAGE
}

fn emit<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("output serializes")
    );
}

fn parse_mu(spec: &GroupSpec, mu: Option<&str>) -> Result<Character, Error> {
    match mu {
        None => Ok(spec.trivial_character()),
        Some(text) => {
            let exponents = text
                .split(',')
                .map(|part| {
                    part.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::InvalidInput(format!("bad exponent {part:?} in --mu")))
                })
                .collect::<Result<Vec<u64>, Error>>()?;
            spec.character(exponents)
        }
    }
}

fn read_instance(path: &str) -> Result<(GroupSpec, Character, OperatorFunction), u8> {
    let text = if path == "-" {
        let mut buf = String::new();
        match std::io::stdin().read_to_string(&mut buf) {
            Ok(_) => buf,
            Err(e) => return Err(fail_usage("io", format!("cannot read stdin: {e}"))),
        }
    } else {
        match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return Err(fail_usage("io", format!("cannot read {path}: {e}"))),
        }
    };
    let file = match InstanceFile::from_json(&text) {
        Ok(f) => f,
        Err(e) => {
            return Err(fail_usage(
                "parse",
                format!(
                    "invalid instance JSON at line {}, column {}: {e}",
                    e.line(),
                    e.column()
                ),
            ))
        }
    };
    file.into_parts().map_err(|e| fail(&e))
}

fn cmd_gen(group: &str, dim: usize, mu: Option<&str>, seed: u64, kind: KindArg) -> u8 {
    let spec = match GroupSpec::parse(group) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let mu = match parse_mu(&spec, mu) {
        Ok(m) => m,
        Err(e) => return fail(&e),
    };
    match generate(kind.into_kind(), &spec, dim, &mu, seed) {
        Ok(instance) => {
            emit(&InstanceFile::from_generated(&instance));
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}

fn cmd_verify(path: &str, tol: f64) -> u8 {
    let (_, mu, phi) = match read_instance(path) {
        Ok(parts) => parts,
        Err(code) => return code,
    };
    match verify_mu_cosine(&phi, &mu, tol) {
        Ok(report) => {
            emit(&VerificationJson::from_report(&report));
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_MATH
            }
        }
        Err(e) => fail(&e),
    }
}

fn cmd_factor(path: &str, tol: f64, mode: ModeArg, seed: u64) -> u8 {
    let (_, mu, phi) = match read_instance(path) {
        Ok(parts) => parts,
        Err(code) => return code,
    };
    match mode {
        ModeArg::Hermitian => match factor_to_characters(&phi, &mu, tol) {
            Ok(form) => {
                let json = FactorizationJson::from_factorization(&form.factorization)
                    .with_multiplicities(&form.multiplicities);
                emit(&json);
                EXIT_OK
            }
            Err(e) => fail(&e),
        },
        ModeArg::Bounded => {
            if !mu.is_trivial() {
                return fail_usage(
                    "invalid_input",
                    "bounded mode handles the plain cosine equation only (trivial mu)".into(),
                );
            }
            match factor_bounded(&phi, tol, seed) {
                Ok(bounded) => {
                    let mut groups: Vec<(Character, usize)> = Vec::new();
                    for chi in &bounded.factorization.characters {
                        match groups.iter_mut().find(|(c, _)| c == chi) {
                            Some((_, m)) => *m += 1,
                            None => groups.push((chi.clone(), 1)),
                        }
                    }
                    let json =
                        FactorizationJson::from_bounded(&bounded).with_multiplicities(&groups);
                    emit(&json);
                    EXIT_OK
                }
                Err(e) => fail(&e),
            }
        }
    }
}

fn parse_xi(text: &str, dim: usize) -> Result<Vec<Complex64>, Error> {
    if let Some(idx_text) = text.strip_prefix("basis-") {
        let idx: usize = idx_text
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad basis index in --xi {text:?}")))?;
        if idx >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: idx + 1,
            });
        }
        let mut xi = vec![Complex64::new(0.0, 0.0); dim];
        xi[idx] = Complex64::new(1.0, 0.0);
        return Ok(xi);
    }
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| {
        Error::InvalidInput(format!("--xi must be \"basis-k\" or [[re,im],...]: {e}"))
    })?;
    Ok(pairs_to_complex_vec(&pairs))
}

fn cmd_kernel(path: &str, xi_text: &str, tol: f64) -> u8 {
    let (spec, mu, phi) = match read_instance(path) {
        Ok(parts) => parts,
        Err(code) => return code,
    };
    let xi = match parse_xi(xi_text, phi.dim()) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    // positive definiteness is only guaranteed for slices of hermitian
    // solutions, so gate on both the equation and hermitian symmetry
    let report = match verify_mu_cosine(&phi, &mu, tol) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if !report.passed() {
        return fail(&Error::NotASolution(format!(
            "equation residual {:.3e} exceeds tolerance",
            report.max_equation_residual
        )));
    }
    let hermitian_residual = verify_hermitian(&phi);
    if hermitian_residual > tol {
        return fail(&Error::NotHermitian {
            residual: hermitian_residual,
            tol,
        });
    }

    let outcome = (|| -> Result<KernelReportJson, Error> {
        let f = scalar_slice(&phi, &xi)?;
        let k = build_kernel(&spec, &mu, &f)?;
        let psd = psd_check(&k, tol)?;
        let realization = rkhs_realize(&k, DEFAULT_RANK_TOL)?;
        let boundary = kernel_boundary_checks(&k, tol)?;
        let regular = regular_representation_identity(&k);
        Ok(KernelReportJson::assemble(
            &k,
            &psd,
            &realization,
            &boundary,
            regular,
        ))
    })();
    match outcome {
        Ok(json) => {
            emit(&json);
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}

fn cmd_scalar(group: &str, mu: Option<&str>) -> u8 {
    let spec = match GroupSpec::parse(group) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let mu = match parse_mu(&spec, mu) {
        Ok(m) => m,
        Err(e) => return fail(&e),
    };
    match enumerate_scalar_solutions(&spec, &mu) {
        Ok(set) => {
            emit(&ScalarSetJson::from_set(&spec, &mu, &set));
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}
