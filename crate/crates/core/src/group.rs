//! Finite abelian groups `Z_{n1} x ... x Z_{nk}`, their elements, their dual
//! groups, and character evaluation.
//!
//! Every finite abelian group is a product of cyclic groups, so the spec of a
//! group is just the list of cyclic factor orders. Elements are residue
//! tuples, characters are exponent tuples, and both enumerate in lexicographic
//! order of their tuples. That order is the canonical index order used by
//! every table-valued type in this crate.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest cyclic factor order accepted, chosen so that exponent products
/// fit in `u64` without overflow.
const MAX_MODULUS: u64 = 1 << 31;

/// A finite abelian group given as an explicit product of cyclic groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    moduli: Vec<u64>,
}

/// An element of a [`GroupSpec`]: one residue per cyclic factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    coords: Vec<u64>,
}

/// A character of the group, stored as one exponent per cyclic factor.
///
/// The character with exponents `m` evaluates as
/// `x -> exp(2*pi*i * sum_j m_j x_j / n_j)`. On a finite group every
/// homomorphism into the nonzero complex numbers lands in roots of unity,
/// so this parametrization covers the whole dual group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    exponents: Vec<u64>,
}

impl GroupSpec {
    /// Builds a group spec from cyclic factor orders. Every order must be
    /// at least 1 and the list must be non-empty.
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::InvalidGroup("no cyclic factors given".into()));
        }
        for &n in &moduli {
            if n == 0 {
                return Err(Error::InvalidGroup("cyclic factor of order 0".into()));
            }
            if n > MAX_MODULUS {
                return Err(Error::InvalidGroup(format!(
                    "cyclic factor order {n} exceeds supported maximum {MAX_MODULUS}"
                )));
            }
        }
        Ok(GroupSpec { moduli })
    }

    /// Parses the `"n1xn2x...xnk"` form used in files and on the CLI.
    pub fn parse(s: &str) -> Result<Self> {
        let moduli = s
            .split('x')
            .map(|part| {
                part.trim().parse::<u64>().map_err(|_| {
                    Error::InvalidGroup(format!("bad cyclic factor {part:?} in {s:?}"))
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        GroupSpec::new(moduli)
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn num_factors(&self) -> usize {
        self.moduli.len()
    }

    /// Group order, the product of all cyclic factor orders.
    pub fn order(&self) -> usize {
        self.moduli.iter().product::<u64>() as usize
    }

    /// The neutral element: the all-zero tuple.
    pub fn identity(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.moduli.len()],
        }
    }

    /// Builds an element from coordinates, reducing each one mod its factor
    /// order.
    pub fn element(&self, coords: Vec<u64>) -> Result<GroupElement> {
        if coords.len() != self.moduli.len() {
            return Err(Error::DimensionMismatch {
                expected: self.moduli.len(),
                got: coords.len(),
            });
        }
        let coords = coords
            .iter()
            .zip(&self.moduli)
            .map(|(&c, &n)| c % n)
            .collect();
        Ok(GroupElement { coords })
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.coords.len() == self.moduli.len()
            && a.coords.iter().zip(&self.moduli).all(|(&c, &n)| c < n)
    }

    fn check_element(&self, a: &GroupElement) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.moduli.len(),
                got: a.coords.len(),
            })
        }
    }

    /// Coordinatewise sum mod the factor orders.
    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_element(a)?;
        self.check_element(b)?;
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&self.moduli)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Ok(GroupElement { coords })
    }

    /// The inverse element: `add(a, neg(a))` is the identity.
    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check_element(a)?;
        let coords = a
            .coords
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &n)| (n - x) % n)
            .collect();
        Ok(GroupElement { coords })
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    /// All group elements exactly once, in lexicographic order of coords.
    /// This is the canonical iteration order used by every table.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order()).map(|i| self.element_at(i)).collect()
    }

    /// Canonical index of an element (mixed-radix decoding of its coords).
    pub fn element_index(&self, a: &GroupElement) -> Result<usize> {
        self.check_element(a)?;
        let mut idx: u64 = 0;
        for (&c, &n) in a.coords.iter().zip(&self.moduli) {
            idx = idx * n + c;
        }
        Ok(idx as usize)
    }

    /// Element at a canonical index. Panics if `idx >= order()`.
    pub fn element_at(&self, idx: usize) -> GroupElement {
        assert!(idx < self.order(), "element index {idx} out of range");
        let mut coords = vec![0u64; self.moduli.len()];
        let mut rem = idx as u64;
        for j in (0..self.moduli.len()).rev() {
            coords[j] = rem % self.moduli[j];
            rem /= self.moduli[j];
        }
        GroupElement { coords }
    }

    /// Builds a character from exponents, reducing each one mod its factor
    /// order.
    pub fn character(&self, exponents: Vec<u64>) -> Result<Character> {
        if exponents.len() != self.moduli.len() {
            return Err(Error::DimensionMismatch {
                expected: self.moduli.len(),
                got: exponents.len(),
            });
        }
        let exponents = exponents
            .iter()
            .zip(&self.moduli)
            .map(|(&m, &n)| m % n)
            .collect();
        Ok(Character { exponents })
    }

    /// The trivial character, identically 1.
    pub fn trivial_character(&self) -> Character {
        Character {
            exponents: vec![0; self.moduli.len()],
        }
    }

    /// All characters of the group exactly once, exponent tuples in
    /// lexicographic order. The dual group has the same order as the group.
    pub fn dual(&self) -> Vec<Character> {
        (0..self.order())
            .map(|i| Character {
                exponents: self.element_at(i).coords,
            })
            .collect()
    }

    /// Evaluates `chi(x) = exp(2*pi*i * sum_j m_j x_j / n_j)`.
    ///
    /// Each term is reduced mod `n_j` before the division so the phase stays
    /// small and the evaluation is multiplicative to machine precision.
    pub fn char_eval(&self, chi: &Character, x: &GroupElement) -> Result<Complex64> {
        self.check_character(chi)?;
        self.check_element(x)?;
        let mut phase = 0.0f64;
        for ((&m, &c), &n) in chi.exponents.iter().zip(&x.coords).zip(&self.moduli) {
            phase += ((m * c) % n) as f64 / n as f64;
        }
        Ok(Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * phase,
        ))
    }

    fn check_character(&self, chi: &Character) -> Result<()> {
        if chi.exponents.len() == self.moduli.len()
            && chi.exponents.iter().zip(&self.moduli).all(|(&m, &n)| m < n)
        {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.moduli.len(),
                got: chi.exponents.len(),
            })
        }
    }

    /// The character `x -> chi(-x)`, i.e. the complex conjugate of `chi`.
    pub fn char_reflect(&self, chi: &Character) -> Result<Character> {
        self.check_character(chi)?;
        let exponents = chi
            .exponents
            .iter()
            .zip(&self.moduli)
            .map(|(&m, &n)| (n - m) % n)
            .collect();
        Ok(Character { exponents })
    }

    /// Pointwise product of two characters.
    pub fn char_mul(&self, a: &Character, b: &Character) -> Result<Character> {
        self.check_character(a)?;
        self.check_character(b)?;
        let exponents = a
            .exponents
            .iter()
            .zip(&b.exponents)
            .zip(&self.moduli)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Ok(Character { exponents })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            write!(f, "{}", self.coords[0])
        } else {
            let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

impl Character {
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&m| m == 0)
    }
}

/// A total complex-valued function on a group, stored in canonical element
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    spec: GroupSpec,
    values: Vec<Complex64>,
}

impl ScalarFunction {
    /// Wraps a value table. The table must cover the whole group.
    pub fn new(spec: GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.order() {
            return Err(Error::IncompleteTable {
                expected: spec.order(),
                got: values.len(),
            });
        }
        Ok(ScalarFunction { spec, values })
    }

    pub fn from_fn(spec: &GroupSpec, f: impl FnMut(&GroupElement) -> Complex64) -> Self {
        let values = spec.elements().iter().map(f).collect();
        ScalarFunction {
            spec: spec.clone(),
            values,
        }
    }

    /// The character `chi` as a value table.
    pub fn from_character(spec: &GroupSpec, chi: &Character) -> Result<Self> {
        let mut values = Vec::with_capacity(spec.order());
        for x in spec.elements() {
            values.push(spec.char_eval(chi, &x)?);
        }
        Ok(ScalarFunction {
            spec: spec.clone(),
            values,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value_at(&self, x: &GroupElement) -> Result<Complex64> {
        Ok(self.values[self.spec.element_index(x)?])
    }

    pub fn value_at_index(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    /// Max pointwise absolute difference to another table on the same group.
    pub fn max_distance(&self, other: &ScalarFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Checks whether `f` is multiplicative with `f(e) = 1`: membership test for
/// the set of homomorphisms into the nonzero complex numbers.
pub fn is_multiplicative_scalar(f: &ScalarFunction, tol: f64) -> bool {
    let spec = f.spec();
    let elements = spec.elements();
    let e_idx = spec
        .element_index(&spec.identity())
        .expect("identity is valid");
    if (f.value_at_index(e_idx) - Complex64::new(1.0, 0.0)).norm() > tol {
        return false;
    }
    for (i, x) in elements.iter().enumerate() {
        for (j, y) in elements.iter().enumerate() {
            let xy = spec.add(x, y).expect("enumerated elements are valid");
            let k = spec.element_index(&xy).expect("sum stays in the group");
            let residual = (f.value_at_index(k) - f.value_at_index(i) * f.value_at_index(j)).norm();
            if residual > tol {
                return false;
            }
        }
    }
    true
}
