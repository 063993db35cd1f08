//! Pauli-string algebra on bitmasks.
//!
//! A Pauli string is stored as a pair of bitsets over the qubits: bit `q` of
//! `x` means an X factor on qubit `q+1`, bit `q` of `z` a Z factor, and both
//! bits together a Y factor. Strings are canonical: any phase lives in the
//! coefficient of the enclosing [`OperatorSum`], never in the string itself.
//! With this encoding the commutation test is a parity of mask intersections,
//! which is what makes the nested-commutator engine affordable.
//!
//! Qubit indices are 1-based in the public API and 0-based in the masks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// A fourth root of unity, stored as the exponent of i modulo 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phase(u8);

impl Phase {
    pub fn new(i_exponent: i64) -> Self {
        Phase(i_exponent.rem_euclid(4) as u8)
    }

    /// Exponent of i in 0..4.
    pub fn i_exponent(&self) -> u8 {
        self.0
    }

    pub fn to_complex(&self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// A canonical Pauli string over a fixed number of qubits.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    qubits: u32,
    x: Box<[u64]>,
    z: Box<[u64]>,
}

fn word_count(qubits: u32) -> usize {
    (qubits as usize).div_ceil(64)
}

impl PauliString {
    /// The identity string.
    pub fn identity(qubits: usize) -> Self {
        assert!(qubits >= 1, "qubit count must be positive");
        let words = word_count(qubits as u32);
        PauliString {
            qubits: qubits as u32,
            x: vec![0; words].into_boxed_slice(),
            z: vec![0; words].into_boxed_slice(),
        }
    }

    /// A single Pauli letter on `site` (1-based).
    pub fn single(qubits: usize, site: usize, letter: Pauli) -> Result<Self> {
        let mut s = PauliString::identity(qubits);
        s.set(site, letter)?;
        Ok(s)
    }

    /// The two-site product Z_j Z_k.
    pub fn zz(qubits: usize, j: usize, k: usize) -> Result<Self> {
        let mut s = PauliString::identity(qubits);
        s.set(j, Pauli::Z)?;
        s.set(k, Pauli::Z)?;
        Ok(s)
    }

    fn set(&mut self, site: usize, letter: Pauli) -> Result<()> {
        if site == 0 || site > self.qubits as usize {
            return Err(Error::IndexOutOfRange {
                index: site,
                count: self.qubits as usize,
            });
        }
        let bit = site - 1;
        let (w, m) = (bit / 64, 1u64 << (bit % 64));
        let (xb, zb) = match letter {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        };
        if xb {
            self.x[w] |= m;
        } else {
            self.x[w] &= !m;
        }
        if zb {
            self.z[w] |= m;
        } else {
            self.z[w] &= !m;
        }
        Ok(())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// The letter acting on `site` (1-based).
    pub fn letter(&self, site: usize) -> Pauli {
        let bit = site - 1;
        let (w, m) = (bit / 64, 1u64 << (bit % 64));
        match (self.x[w] & m != 0, self.z[w] & m != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(self.z.iter())
            .map(|(&a, &b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Sites (1-based) carrying a non-identity letter.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.qubits as usize).filter(|&s| self.letter(s) != Pauli::I)
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch {
                left: self.qubits as usize,
                right: other.qubits as usize,
            });
        }
        Ok(())
    }

    /// Whether the two strings commute (symplectic parity test).
    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        self.check_same_size(other)?;
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= (self.x[i] & other.z[i]).count_ones() & 1;
            parity ^= (self.z[i] & other.x[i]).count_ones() & 1;
        }
        Ok(parity == 0)
    }

    /// Operator product `self * other` as a phase times a canonical string.
    ///
    /// Per qubit the product follows X·Z = -iY and its relatives; the
    /// accumulated fourth root of unity is returned separately so the
    /// resulting string stays canonical.
    pub fn multiply(&self, other: &Self) -> Result<(Phase, PauliString)> {
        self.check_same_size(other)?;
        let words = self.x.len();
        let mut x = vec![0u64; words].into_boxed_slice();
        let mut z = vec![0u64; words].into_boxed_slice();
        let mut exponent: i64 = 0;
        for i in 0..words {
            x[i] = self.x[i] ^ other.x[i];
            z[i] = self.z[i] ^ other.z[i];
            exponent += (self.x[i] & self.z[i]).count_ones() as i64;
            exponent += (other.x[i] & other.z[i]).count_ones() as i64;
            exponent -= (x[i] & z[i]).count_ones() as i64;
            exponent += 2 * (self.z[i] & other.x[i]).count_ones() as i64;
        }
        Ok((
            Phase::new(exponent),
            PauliString {
                qubits: self.qubits,
                x,
                z,
            },
        ))
    }

    /// Number of Y letters (used for dense phase reconstruction).
    fn y_count(&self) -> u32 {
        self.x
            .iter()
            .zip(self.z.iter())
            .map(|(&a, &b)| (a & b).count_ones())
            .sum()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in 1..=self.qubits as usize {
            let c = match self.letter(site) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli string".into()));
        }
        let mut out = PauliString::identity(s.len());
        for (i, c) in s.chars().enumerate() {
            let letter = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "invalid Pauli letter '{other}'"
                    )))
                }
            };
            out.set(i + 1, letter)?;
        }
        Ok(out)
    }
}

/// Commutator of two strings: empty when they commute, otherwise a single
/// string with coefficient `2·i^e`.
pub fn string_commutator<C: Coefficient>(a: &PauliString, b: &PauliString) -> Result<OperatorSum<C>> {
    let mut out = OperatorSum::new(a.qubit_count());
    if a.commutes_with(b)? {
        return Ok(out);
    }
    let (phase, product) = a.multiply(b)?;
    // [a,b] = ab - ba = 2ab when a and b anticommute.
    let coeff = C::one().mul_i_pow(phase.i_exponent()).double();
    out.add_term(product, coeff)?;
    Ok(out)
}

/// Scalar ring for [`OperatorSum`] coefficients.
///
/// The default engine uses `Complex64`. The leading-order extractor runs the
/// same algebra over exact Gaussian rationals ([`ExactCoeff`]), where every
/// product and cancellation is exact.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, rhs: &Self);
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn double(&self) -> Self;
    /// Multiply by i^k.
    fn mul_i_pow(&self, k: u8) -> Self;
    /// Embed a real machine float (exact for [`ExactCoeff`]).
    fn from_real_f64(x: f64) -> Self;
    /// |c|^2 as a machine float.
    fn abs_sq(&self) -> f64;
    fn to_complex64(&self) -> Complex64;
}

impl Coefficient for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn double(&self) -> Self {
        self * 2.0
    }
    fn mul_i_pow(&self, k: u8) -> Self {
        match k % 4 {
            0 => *self,
            1 => Complex64::new(-self.im, self.re),
            2 => -self,
            _ => Complex64::new(self.im, -self.re),
        }
    }
    fn from_real_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn abs_sq(&self) -> f64 {
        self.norm_sqr()
    }
    fn to_complex64(&self) -> Complex64 {
        *self
    }
}

/// Exact Gaussian-rational coefficient: `re + i·im` with big-rational parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCoeff {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactCoeff {
    pub fn from_rational(re: BigRational) -> Self {
        ExactCoeff {
            re,
            im: BigRational::zero(),
        }
    }

    /// |c|^2 as an exact rational.
    pub fn abs_sq_exact(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl Coefficient for ExactCoeff {
    fn zero() -> Self {
        ExactCoeff {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }
    fn one() -> Self {
        ExactCoeff {
            re: BigRational::from_integer(BigInt::from(1)),
            im: BigRational::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add_assign(&mut self, rhs: &Self) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
    fn mul(&self, rhs: &Self) -> Self {
        ExactCoeff {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
    fn neg(&self) -> Self {
        ExactCoeff {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
    fn double(&self) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        ExactCoeff {
            re: &self.re * &two,
            im: &self.im * &two,
        }
    }
    fn mul_i_pow(&self, k: u8) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => ExactCoeff {
                re: -self.im.clone(),
                im: self.re.clone(),
            },
            2 => self.neg(),
            _ => ExactCoeff {
                re: self.im.clone(),
                im: -self.re.clone(),
            },
        }
    }
    fn from_real_f64(x: f64) -> Self {
        ExactCoeff {
            re: BigRational::from_float(x).expect("finite coefficient"),
            im: BigRational::zero(),
        }
    }
    fn abs_sq(&self) -> f64 {
        self.abs_sq_exact().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// A weighted sum of canonical Pauli strings over a fixed qubit register.
///
/// Terms whose coefficient magnitude falls at or below the prune threshold
/// (default: exact zeros only) are removed on insertion, so cancellations in
/// commutator arithmetic never leave dead strings behind.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSum<C: Coefficient = Complex64> {
    qubit_count: usize,
    prune_threshold: f64,
    terms: BTreeMap<PauliString, C>,
}

impl<C: Coefficient> OperatorSum<C> {
    pub fn new(qubit_count: usize) -> Self {
        assert!(qubit_count >= 1, "qubit count must be positive");
        OperatorSum {
            qubit_count,
            prune_threshold: 0.0,
            terms: BTreeMap::new(),
        }
    }

    pub fn with_prune_threshold(mut self, threshold: f64) -> Self {
        self.prune_threshold = threshold;
        self
    }

    /// Identity operator with unit coefficient.
    pub fn identity(qubit_count: usize) -> Self {
        let mut sum = OperatorSum::new(qubit_count);
        sum.add_term(PauliString::identity(qubit_count), C::one())
            .expect("identity term");
        sum
    }

    /// Single-term operator `coeff * string`.
    pub fn from_term(string: PauliString, coeff: C) -> Self {
        let mut sum = OperatorSum::new(string.qubit_count());
        sum.add_term(string, coeff).expect("matching size");
        sum
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune_threshold
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, string: &PauliString) -> Option<&C> {
        self.terms.get(string)
    }

    /// Merge a term into the sum, pruning exact (or sub-threshold) zeros.
    pub fn add_term(&mut self, string: PauliString, coeff: C) -> Result<()> {
        if string.qubit_count() != self.qubit_count {
            return Err(Error::DimensionMismatch {
                left: self.qubit_count,
                right: string.qubit_count(),
            });
        }
        let threshold = self.prune_threshold;
        let keeps = |c: &C| {
            !c.is_zero() && (threshold == 0.0 || c.abs_sq() > threshold * threshold)
        };
        match self.terms.entry(string) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                if keeps(&coeff) {
                    slot.insert(coeff);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                slot.get_mut().add_assign(&coeff);
                if !keeps(slot.get()) {
                    slot.remove();
                }
            }
        }
        Ok(())
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.qubit_count != other.qubit_count {
            return Err(Error::DimensionMismatch {
                left: self.qubit_count,
                right: other.qubit_count,
            });
        }
        Ok(())
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_size(other)?;
        let mut out = self.clone();
        for (s, c) in other.terms() {
            out.add_term(s.clone(), c.clone())?;
        }
        Ok(out)
    }

    /// In-place `self += scale * other`.
    pub fn add_scaled(&mut self, other: &Self, scale: &C) -> Result<()> {
        self.check_same_size(other)?;
        for (s, c) in other.terms() {
            self.add_term(s.clone(), c.mul(scale))?;
        }
        Ok(())
    }

    pub fn scaled(&self, scale: &C) -> Self {
        let mut out = OperatorSum::new(self.qubit_count).with_prune_threshold(self.prune_threshold);
        for (s, c) in self.terms() {
            out.add_term(s.clone(), c.mul(scale)).expect("same size");
        }
        out
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    /// Bilinear commutator `[self, other]` with exact cancellations removed.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same_size(other)?;
        let mut out =
            OperatorSum::new(self.qubit_count).with_prune_threshold(self.prune_threshold);
        for (sa, ca) in self.terms() {
            for (sb, cb) in other.terms() {
                if sa.commutes_with(sb)? {
                    continue;
                }
                let (phase, product) = sa.multiply(sb)?;
                let coeff = ca.mul(cb).mul_i_pow(phase.i_exponent()).double();
                out.add_term(product, coeff)?;
            }
        }
        Ok(out)
    }

    /// Normalized Frobenius norm: sqrt of the sum of squared coefficient
    /// magnitudes. Distinct Pauli strings are orthonormal under
    /// Tr(Q†Q)/2^n, so the trace never has to be formed.
    pub fn frobenius_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs_sq()).sum::<f64>().sqrt()
    }

    /// Dense matrix in the computational basis with qubit 1 as the leftmost
    /// tensor factor.
    pub fn to_dense(&self, dense_limit: usize) -> Result<DMatrix<Complex64>> {
        if self.qubit_count > dense_limit {
            return Err(Error::DenseLimitExceeded {
                qubits: self.qubit_count,
                limit: dense_limit,
            });
        }
        let n = self.qubit_count;
        let dim = 1usize << n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (string, coeff) in self.terms() {
            // Remap mask bit q (qubit q+1) to basis bit n-1-q.
            let mut bx: u64 = 0;
            let mut bz: u64 = 0;
            for q in 0..n {
                let (w, bit) = (q / 64, 1u64 << (q % 64));
                if string.x[w] & bit != 0 {
                    bx |= 1 << (n - 1 - q);
                }
                if string.z[w] & bit != 0 {
                    bz |= 1 << (n - 1 - q);
                }
            }
            let base = Phase::new(i64::from(string.y_count() % 4)).to_complex()
                * coeff.to_complex64();
            for col in 0..dim as u64 {
                let row = col ^ bx;
                let sign = if ((col & bz).count_ones() & 1) == 1 {
                    -1.0
                } else {
                    1.0
                };
                m[(row as usize, col as usize)] += base * sign;
            }
        }
        Ok(m)
    }
}

impl OperatorSum<ExactCoeff> {
    /// Exact squared Frobenius norm.
    pub fn frobenius_norm_sq_exact(&self) -> BigRational {
        let mut total = BigRational::zero();
        for c in self.terms.values() {
            total += c.abs_sq_exact();
        }
        total
    }
}
