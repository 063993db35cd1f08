//! Reference engines.
//!
//! The dense engine diagonalizes the Hamiltonian once and evolves the
//! reference operator by spectral conjugation, so a whole time grid costs one
//! decomposition. It is valid at all times, not only early ones. The series
//! engine evaluates the nested-commutator expansion of the Heisenberg
//! operator symbolically; truncated at a finite order it doubles as an
//! independent oracle for the dense engine and, run over exact rational
//! coefficients, extracts the exact leading-order term.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::CouplingGraph;
use crate::logval::ln_factorial;
use crate::pauli::{Coefficient, ExactCoeff, OperatorSum, Pauli, PauliString};

/// Default cap on dense diagonalization (16384-dimensional).
pub const DEFAULT_DENSE_LIMIT: usize = 14;

/// Default cap on stored Pauli strings in the series engine.
pub const DEFAULT_TERM_CAP: usize = 2_000_000;

/// Which engine produced a correlation value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Exact,
    Series,
    Analytic,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Engine::Exact => "exact",
            Engine::Series => "series",
            Engine::Analytic => "analytic",
        };
        write!(f, "{name}")
    }
}

/// A correlation time series with its provenance.
#[derive(Clone, Debug)]
pub struct CorrelationSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub engine: Engine,
    pub reference: usize,
    pub target: usize,
    pub graph_digest: u64,
    pub truncation_order: Option<usize>,
}

impl CorrelationSeries {
    pub fn new(
        times: Vec<f64>,
        values: Vec<f64>,
        engine: Engine,
        reference: usize,
        target: usize,
        graph_digest: u64,
        truncation_order: Option<usize>,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(
                "times and values must have equal length".into(),
            ));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "times must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "correlation values must be finite and nonnegative".into(),
            ));
        }
        Ok(CorrelationSeries {
            times,
            values,
            engine,
            reference,
            target,
            graph_digest,
            truncation_order,
        })
    }
}

/// A dense operator on the full register, `2^n`-dimensional.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
    qubit_count: usize,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<Complex64>, qubit_count: usize) -> Result<Self> {
        let dim = 1usize << qubit_count;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DenseOperator {
            matrix,
            qubit_count,
        })
    }

    pub fn from_operator_sum(sum: &OperatorSum, dense_limit: usize) -> Result<Self> {
        let matrix = sum.to_dense(dense_limit)?;
        DenseOperator::new(matrix, sum.qubit_count())
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Normalized Frobenius norm sqrt(Tr(Q†Q)/2^n).
    pub fn norm(&self) -> f64 {
        self.matrix.norm() / (self.matrix.nrows() as f64).sqrt()
    }
}

/// Eigendecomposition of a coupling-graph Hamiltonian (real symmetric in the
/// computational basis), in units of the transverse energy.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: DVector<f64>,
    basis: DMatrix<f64>,
    qubit_count: usize,
    graph_digest: u64,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn graph_digest(&self) -> u64 {
        self.graph_digest
    }

    /// Rebuild the Hamiltonian matrix from the decomposition.
    pub fn recompose(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.basis.nrows(), self.basis.ncols(), |r, c| {
            self.basis[(r, c)] * self.eigenvalues[c]
        });
        &scaled * self.basis.transpose()
    }

    /// Diagonal of Z on `site` (1-based) in the computational basis, with
    /// qubit 1 as the leftmost tensor factor.
    fn z_signs(&self, site: usize) -> Vec<f64> {
        let dim = 1usize << self.qubit_count;
        let bit = self.qubit_count - site;
        (0..dim)
            .map(|b| if (b >> bit) & 1 == 0 { 1.0 } else { -1.0 })
            .collect()
    }

    /// The Heisenberg-evolved operator Z_site(t) at dimensionless time
    /// `t = t/τ`, via conjugation with exp(iπ H̃ t).
    pub fn evolve_z(&self, site: usize, t_over_tau: f64) -> Result<DMatrix<Complex64>> {
        self.check_site(site)?;
        let dim = 1usize << self.qubit_count;
        let signs = self.z_signs(site);
        let w = {
            let scaled = DMatrix::from_fn(dim, dim, |r, c| self.basis[(r, c)] * signs[r]);
            self.basis.transpose() * scaled
        };
        let phases: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&lambda| Complex64::from_polar(1.0, std::f64::consts::PI * lambda * t_over_tau))
            .collect();
        let b = DMatrix::from_fn(dim, dim, |a, c| phases[a] * w[(a, c)] * phases[c].conj());
        let vc = self.basis.map(|x| Complex64::new(x, 0.0));
        let m = &vc * b * vc.transpose();
        Ok(m)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.qubit_count {
            return Err(Error::IndexOutOfRange {
                index: site,
                count: self.qubit_count,
            });
        }
        Ok(())
    }

    /// Correlation value `‖[Z_j(t), Z_k]‖` for each time in `times`.
    ///
    /// Only the rows of Z_j(t) that change sign under Z_k contribute, so the
    /// evolved operator is assembled blockwise: with P (Q) the eigenvector
    /// rows where Z_k is +1 (-1), the norm is sqrt(8/N)·‖P B Qᵀ‖_F where
    /// B is the phase-dressed reference operator in the eigenbasis.
    pub fn correlation(&self, j: usize, k: usize, times: &[f64]) -> Result<Vec<f64>> {
        self.check_site(j)?;
        self.check_site(k)?;
        let dim = 1usize << self.qubit_count;
        let signs_j = self.z_signs(j);
        let w = {
            let scaled = DMatrix::from_fn(dim, dim, |r, c| self.basis[(r, c)] * signs_j[r]);
            self.basis.transpose() * scaled
        };
        let signs_k = self.z_signs(k);
        let plus: Vec<usize> = (0..dim).filter(|&b| signs_k[b] > 0.0).collect();
        let minus: Vec<usize> = (0..dim).filter(|&b| signs_k[b] < 0.0).collect();
        let vc = self.basis.map(|x| Complex64::new(x, 0.0));
        let p = vc.select_rows(plus.iter());
        let q = vc.select_rows(minus.iter());
        let qt = q.transpose();
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let phases: Vec<Complex64> = self
                .eigenvalues
                .iter()
                .map(|&lambda| Complex64::from_polar(1.0, std::f64::consts::PI * lambda * t))
                .collect();
            let b = DMatrix::from_fn(dim, dim, |a, c| phases[a] * w[(a, c)] * phases[c].conj());
            let block = &p * b * &qt;
            out.push((8.0 / dim as f64).sqrt() * block.norm());
        }
        Ok(out)
    }
}

/// Dense Hamiltonian matrix (real symmetric) in units of γ.
pub fn hamiltonian_dense(graph: &CouplingGraph) -> DMatrix<f64> {
    let n = graph.qubit_count();
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for site in 1..=n {
        let flip = 1usize << (n - site);
        for b in 0..dim {
            h[(b ^ flip, b)] -= 1.0;
        }
    }
    for (j, k, delta) in graph.edges() {
        let bj = 1usize << (n - j);
        let bk = 1usize << (n - k);
        for b in 0..dim {
            let zj = if b & bj == 0 { 1.0 } else { -1.0 };
            let zk = if b & bk == 0 { 1.0 } else { -1.0 };
            h[(b, b)] -= 0.5 * delta * zj * zk;
        }
    }
    h
}

/// Dense-diagonalization engine with a configurable qubit limit.
#[derive(Clone, Copy, Debug)]
pub struct ExactEngine {
    pub dense_limit: usize,
}

impl Default for ExactEngine {
    fn default() -> Self {
        ExactEngine {
            dense_limit: DEFAULT_DENSE_LIMIT,
        }
    }
}

impl ExactEngine {
    pub fn new(dense_limit: usize) -> Self {
        ExactEngine { dense_limit }
    }

    /// Full Hermitian eigendecomposition of the graph Hamiltonian.
    pub fn diagonalize(&self, graph: &CouplingGraph) -> Result<Spectrum> {
        let n = graph.qubit_count();
        if n > self.dense_limit {
            return Err(Error::DenseLimitExceeded {
                qubits: n,
                limit: self.dense_limit,
            });
        }
        let h = hamiltonian_dense(graph);
        let eigen = h.symmetric_eigen();
        Ok(Spectrum {
            eigenvalues: eigen.eigenvalues,
            basis: eigen.eigenvectors,
            qubit_count: n,
            graph_digest: graph.digest(),
        })
    }

    /// Exact correlation series; valid at all times.
    pub fn correlation(
        &self,
        graph: &CouplingGraph,
        j: usize,
        k: usize,
        times: &[f64],
    ) -> Result<CorrelationSeries> {
        let spectrum = self.diagonalize(graph)?;
        self.correlation_from_spectrum(&spectrum, j, k, times)
    }

    /// Exact correlation reusing an existing decomposition (one spectrum,
    /// many targets or time grids).
    pub fn correlation_from_spectrum(
        &self,
        spectrum: &Spectrum,
        j: usize,
        k: usize,
        times: &[f64],
    ) -> Result<CorrelationSeries> {
        let values = spectrum.correlation(j, k, times)?;
        CorrelationSeries::new(
            times.to_vec(),
            values,
            Engine::Exact,
            j,
            k,
            spectrum.graph_digest(),
            None,
        )
    }
}

/// One evaluation of the truncated nested-commutator series.
#[derive(Clone, Copy, Debug)]
pub struct SeriesEvaluation {
    /// Norm of the truncated operator sum.
    pub value: f64,
    /// Magnitude contributed by the last included order, the truncation
    /// diagnostic.
    pub last_order_magnitude: f64,
    pub truncation_order: usize,
    /// False when the last included order still exceeds the engine
    /// tolerance.
    pub converged: bool,
}

/// Symbolic expansion of `[Z_j(t), Z_k]` in powers of `t/τ`, reusable across
/// a time grid.
#[derive(Clone, Debug)]
pub struct SeriesExpansion {
    orders: Vec<OperatorSum>,
    qubit_count: usize,
    reference: usize,
    target: usize,
    graph_digest: u64,
}

impl SeriesExpansion {
    pub fn max_order(&self) -> usize {
        self.orders.len()
    }

    /// Norm of the order-n coefficient operator (n is 1-based).
    pub fn order_norm(&self, n: usize) -> f64 {
        self.orders[n - 1].frobenius_norm()
    }
}

/// Truncated-series engine with a hard cap on stored Pauli strings.
#[derive(Clone, Copy, Debug)]
pub struct SeriesEngine {
    pub term_cap: usize,
    /// Tolerance against which the truncation diagnostic is judged.
    pub tolerance: f64,
}

impl Default for SeriesEngine {
    fn default() -> Self {
        SeriesEngine {
            term_cap: DEFAULT_TERM_CAP,
            tolerance: 1e-9,
        }
    }
}

impl SeriesEngine {
    fn check_pair(graph: &CouplingGraph, j: usize, k: usize) -> Result<()> {
        for site in [j, k] {
            if site == 0 || site > graph.qubit_count() {
                return Err(Error::IndexOutOfRange {
                    index: site,
                    count: graph.qubit_count(),
                });
            }
        }
        Ok(())
    }

    /// Expand the commutator operator through order `n_max`.
    ///
    /// Order n carries the full coefficient i^n π^n / n!, so evaluating at a
    /// time only multiplies by powers of t/τ.
    pub fn expansion(
        &self,
        graph: &CouplingGraph,
        j: usize,
        k: usize,
        n_max: usize,
    ) -> Result<SeriesExpansion> {
        Self::check_pair(graph, j, k)?;
        if n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        let n = graph.qubit_count();
        let h = graph.hamiltonian();
        let zj = OperatorSum::from_term(
            PauliString::single(n, j, Pauli::Z)?,
            Complex64::from_real_f64(1.0),
        );
        let zk = OperatorSum::from_term(
            PauliString::single(n, k, Pauli::Z)?,
            Complex64::from_real_f64(1.0),
        );
        let mut nested = zj;
        let mut orders = Vec::with_capacity(n_max);
        let mut prefactor = 1.0;
        for order in 1..=n_max {
            nested = h.commutator(&nested)?;
            if nested.term_count() > self.term_cap {
                return Err(Error::TermCapExceeded { cap: self.term_cap });
            }
            prefactor *= std::f64::consts::PI / order as f64;
            let scale =
                Complex64::from_real_f64(prefactor).mul_i_pow((order % 4) as u8);
            orders.push(nested.commutator(&zk)?.scaled(&scale));
        }
        Ok(SeriesExpansion {
            orders,
            qubit_count: n,
            reference: j,
            target: k,
            graph_digest: graph.digest(),
        })
    }

    /// Evaluate a prepared expansion at one time.
    pub fn evaluate(&self, expansion: &SeriesExpansion, t_over_tau: f64) -> SeriesEvaluation {
        let mut total = OperatorSum::new(expansion.qubit_count);
        let mut power = 1.0;
        let mut last = 0.0;
        for (i, order) in expansion.orders.iter().enumerate() {
            power *= t_over_tau;
            total
                .add_scaled(order, &Complex64::from_real_f64(power))
                .expect("expansion orders share the register");
            if i + 1 == expansion.orders.len() {
                last = order.frobenius_norm() * power.abs();
            }
        }
        SeriesEvaluation {
            value: total.frobenius_norm(),
            last_order_magnitude: last,
            truncation_order: expansion.orders.len(),
            converged: last <= self.tolerance,
        }
    }

    /// Correlation at a single time through order `n_max`.
    pub fn correlation_at(
        &self,
        graph: &CouplingGraph,
        j: usize,
        k: usize,
        t_over_tau: f64,
        n_max: usize,
    ) -> Result<SeriesEvaluation> {
        let expansion = self.expansion(graph, j, k, n_max)?;
        Ok(self.evaluate(&expansion, t_over_tau))
    }

    /// Correlation over a time grid from one expansion.
    pub fn correlation_series(
        &self,
        graph: &CouplingGraph,
        j: usize,
        k: usize,
        times: &[f64],
        n_max: usize,
    ) -> Result<CorrelationSeries> {
        let expansion = self.expansion(graph, j, k, n_max)?;
        let values = times
            .iter()
            .map(|&t| self.evaluate(&expansion, t).value)
            .collect();
        CorrelationSeries::new(
            times.to_vec(),
            values,
            Engine::Series,
            j,
            k,
            expansion.graph_digest,
            Some(n_max),
        )
    }

    /// Exact leading-order term of the correlation between `j` and `k`.
    ///
    /// Iterates the nested commutator over exact Gaussian-rational
    /// coefficients until the first order survives the final commutator.
    pub fn leading_term(&self, graph: &CouplingGraph, j: usize, k: usize) -> Result<LeadingTerm> {
        Self::check_pair(graph, j, k)?;
        let summary = graph.min_path_summary(j, k)?;
        let Some(route) = summary.route else {
            return Err(Error::Unreachable { from: j, to: k });
        };
        let n = graph.qubit_count();
        let h: OperatorSum<ExactCoeff> = graph.hamiltonian_as();
        let zj = OperatorSum::from_term(PauliString::single(n, j, Pauli::Z)?, ExactCoeff::one());
        let zk = OperatorSum::from_term(PauliString::single(n, k, Pauli::Z)?, ExactCoeff::one());
        let expected_order = 2 * route.hops + 1;
        let mut nested = zj;
        for order in 1..=expected_order {
            nested = h.commutator(&nested)?;
            if nested.term_count() > self.term_cap {
                return Err(Error::TermCapExceeded { cap: self.term_cap });
            }
            let surviving = nested.commutator(&zk)?;
            if !surviving.is_empty() {
                let support: Vec<PauliString> =
                    surviving.terms().map(|(s, _)| s.clone()).collect();
                return Ok(LeadingTerm {
                    order,
                    g_norm_sq: surviving.frobenius_norm_sq_exact(),
                    support,
                });
            }
        }
        Err(Error::InvalidArgument(format!(
            "no nonzero term found through order {expected_order} for pair ({j},{k})"
        )))
    }
}

/// The lowest-order nonzero term of the correlation expansion.
///
/// The correlation behaves as `coefficient · (t/τ)^order` at early times,
/// with the coefficient held exactly: its square is `π^(2·order) / (order!)^2`
/// times the stored rational.
#[derive(Clone, Debug)]
pub struct LeadingTerm {
    pub order: usize,
    g_norm_sq: BigRational,
    pub support: Vec<PauliString>,
}

impl LeadingTerm {
    /// Exact squared norm of the surviving nested commutator (before the
    /// 1/n! and π^n factors).
    pub fn g_norm_sq(&self) -> &BigRational {
        &self.g_norm_sq
    }

    /// Natural log of the norm prefactor of the leading term.
    pub fn ln_coefficient(&self) -> f64 {
        let n = self.order as f64;
        n * std::f64::consts::PI.ln() - ln_factorial(self.order as u64)
            + 0.5 * ln_big_rational(&self.g_norm_sq)
    }

    /// The norm prefactor as a machine float (may overflow for extreme
    /// orders; use [`LeadingTerm::ln_coefficient`] there).
    pub fn coefficient(&self) -> f64 {
        self.ln_coefficient().exp()
    }
}

/// ln of a positive big rational, accurate even when numerator or
/// denominator overflow f64.
fn ln_big_rational(value: &BigRational) -> f64 {
    assert!(value.is_positive(), "log of a nonpositive rational");
    ln_big_int(value.numer()) - ln_big_int(value.denom())
}

fn ln_big_int(value: &BigInt) -> f64 {
    let magnitude = value.magnitude();
    if magnitude.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = magnitude.bits();
    if bits <= 52 {
        return magnitude.to_f64().expect("small magnitude fits").ln();
    }
    let shift = bits - 52;
    let top = magnitude >> shift;
    top.to_f64().expect("shifted magnitude fits").ln() + shift as f64 * std::f64::consts::LN_2
}
