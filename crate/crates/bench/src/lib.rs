//! Shared fixtures for the criterion benchmarks.

use mucosine::cosine::{scalar_slice, OperatorFunction};
use mucosine::group::{Character, GroupSpec, ScalarFunction};
use mucosine::instances::{generate, InstanceKind};
use mucosine::kernel::{build_kernel, KernelTable};

pub struct Fixture {
    pub spec: GroupSpec,
    pub mu: Character,
    pub phi: OperatorFunction,
}

/// A hermitian instance on a fixed group, deterministic across runs.
pub fn hermitian_fixture(group: &str, dim: usize, seed: u64) -> Fixture {
    let spec = GroupSpec::parse(group).expect("benchmark group parses");
    let mu = spec.trivial_character();
    let inst = generate(InstanceKind::Hermitian, &spec, dim, &mu, seed)
        .expect("benchmark instance generates");
    Fixture {
        spec,
        mu,
        phi: inst.phi,
    }
}

/// A conjugated (non-hermitian) instance for the bounded pipeline.
pub fn conjugated_fixture(group: &str, dim: usize, seed: u64) -> Fixture {
    let spec = GroupSpec::parse(group).expect("benchmark group parses");
    let mu = spec.trivial_character();
    let inst = generate(InstanceKind::Conjugated, &spec, dim, &mu, seed)
        .expect("benchmark instance generates");
    Fixture {
        spec,
        mu,
        phi: inst.phi,
    }
}

/// The slice kernel of a fixture along the first basis vector.
pub fn slice_kernel(fixture: &Fixture) -> (ScalarFunction, KernelTable) {
    let mut xi = vec![num_complex::Complex64::new(0.0, 0.0); fixture.phi.dim()];
    xi[0] = num_complex::Complex64::new(1.0, 0.0);
    let f = scalar_slice(&fixture.phi, &xi).expect("slice");
    let k = build_kernel(&fixture.spec, &fixture.mu, &f).expect("kernel");
    (f, k)
}
