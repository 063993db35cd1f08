//! Coupling graphs: qubit networks with a transverse energy and symmetric ZZ
//! couplings, plus the minimum-path analysis that drives every closed-form
//! correlation result.
//!
//! All energies are stored in units of the transverse energy, so every stored
//! coupling is a dimensionless Δ/γ. The minimum path between two qubits is
//! the minimum hop count over edges with nonzero coupling; couplings only
//! weight paths of that minimal length.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::logval::LogValue;
use crate::pauli::{Coefficient, OperatorSum, Pauli, PauliString};

/// Upper bound on generated lattice sites.
pub const DEFAULT_LATTICE_SITE_CAP: usize = 4_000_000;

/// A qubit network with transverse energy `gamma` and ZZ couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingGraph {
    qubit_count: usize,
    gamma: f64,
    /// (j, k) with j < k, both 1-based; values are Δ/γ and never zero.
    couplings: BTreeMap<(usize, usize), f64>,
    /// adjacency[q - 1] lists (neighbor, Δ/γ).
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl CouplingGraph {
    /// Build a graph from an edge list. Edges are 1-based `(j, k, Δ/γ)`.
    pub fn new(qubit_count: usize, gamma: f64, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::InvalidArgument("qubit count must be positive".into()));
        }
        if !(gamma > 0.0) {
            return Err(Error::InvalidGraph(format!(
                "transverse energy must be positive, got {gamma}"
            )));
        }
        let mut couplings = BTreeMap::new();
        for &(j, k, delta) in edges {
            if j == 0 || j > qubit_count {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    count: qubit_count,
                });
            }
            if k == 0 || k > qubit_count {
                return Err(Error::IndexOutOfRange {
                    index: k,
                    count: qubit_count,
                });
            }
            if j == k {
                return Err(Error::InvalidGraph(format!("self-coupling on qubit {j}")));
            }
            if delta == 0.0 || !delta.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "coupling ({j},{k}) must be nonzero and finite, got {delta}"
                )));
            }
            let key = (j.min(k), j.max(k));
            if couplings.insert(key, delta).is_some() {
                return Err(Error::InvalidGraph(format!(
                    "duplicate or mirrored edge ({j},{k})"
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); qubit_count];
        for (&(j, k), &delta) in &couplings {
            adjacency[j - 1].push((k, delta));
            adjacency[k - 1].push((j, delta));
        }
        Ok(CouplingGraph {
            qubit_count,
            gamma,
            couplings,
            adjacency,
        })
    }

    /// Uniform near-neighbor chain with `n_qubits` sites.
    pub fn chain(n_qubits: usize, delta_over_gamma: f64) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("chain needs at least one qubit".into()));
        }
        if delta_over_gamma == 0.0 || !delta_over_gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "chain coupling must be nonzero and finite, got {delta_over_gamma}"
            )));
        }
        let edges: Vec<(usize, usize, f64)> = (1..n_qubits)
            .map(|k| (k, k + 1, delta_over_gamma))
            .collect();
        CouplingGraph::new(n_qubits, 1.0, &edges)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Transverse energy in its own units; retained for round-tripping only,
    /// all stored couplings are already Δ/γ.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn edge_count(&self) -> usize {
        self.couplings.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.couplings.iter().map(|(&(j, k), &d)| (j, k, d))
    }

    pub fn coupling(&self, j: usize, k: usize) -> Option<f64> {
        self.couplings.get(&(j.min(k), j.max(k))).copied()
    }

    pub fn neighbors(&self, q: usize) -> &[(usize, f64)] {
        &self.adjacency[q - 1]
    }

    fn check_index(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.qubit_count {
            return Err(Error::IndexOutOfRange {
                index: q,
                count: self.qubit_count,
            });
        }
        Ok(())
    }

    /// A stable digest of the coupling data (FNV-1a over a canonical byte
    /// rendering), used to tag results with their provenance.
    pub fn digest(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= u64::from(b);
                hash = hash.wrapping_mul(0x1000_0000_01b3);
            }
        };
        eat(&(self.qubit_count as u64).to_le_bytes());
        eat(&self.gamma.to_bits().to_le_bytes());
        for (&(j, k), &d) in &self.couplings {
            eat(&(j as u64).to_le_bytes());
            eat(&(k as u64).to_le_bytes());
            eat(&d.to_bits().to_le_bytes());
        }
        hash
    }

    /// The network Hamiltonian in units of γ:
    /// `-Σ_k X_k - (1/2) Σ_{j<k} (Δ_{jk}/γ) Z_j Z_k`.
    pub fn hamiltonian_as<C: Coefficient>(&self) -> OperatorSum<C> {
        let n = self.qubit_count;
        let mut h = OperatorSum::new(n);
        for site in 1..=n {
            h.add_term(
                PauliString::single(n, site, Pauli::X).expect("valid site"),
                C::from_real_f64(-1.0),
            )
            .expect("same size");
        }
        for (&(j, k), &delta) in &self.couplings {
            h.add_term(
                PauliString::zz(n, j, k).expect("valid edge"),
                C::from_real_f64(-0.5 * delta),
            )
            .expect("same size");
        }
        h
    }

    pub fn hamiltonian(&self) -> OperatorSum<Complex64> {
        self.hamiltonian_as::<Complex64>()
    }

    /// Hop distances from `source` to every qubit (`None` when unreachable).
    pub fn distances_from(&self, source: usize) -> Result<Vec<Option<usize>>> {
        self.check_index(source)?;
        let mut dist = vec![None; self.qubit_count + 1];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued nodes have distances");
            for &(v, _) in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist.remove(0);
        Ok(dist)
    }

    /// Minimum hop count together with the path-weight sum
    /// `Σ_paths (Π_edges Δ/γ)^2` and the number of minimum-length paths.
    ///
    /// The weight sum is a dynamic program over the breadth-first shortest
    /// path DAG; enumeration is never needed.
    pub fn min_path_summary(&self, j: usize, k: usize) -> Result<MinPathSummary> {
        self.check_index(k)?;
        let mut summaries = self.min_path_summaries_from(j)?;
        Ok(summaries.swap_remove(k - 1))
    }

    /// Minimum-path summaries from `source` to every qubit, from a single
    /// BFS/DP pass; result index `q - 1` holds the summary for target `q`.
    pub fn min_path_summaries_from(&self, source: usize) -> Result<Vec<MinPathSummary>> {
        self.check_index(source)?;
        let dist = self.distances_from(source)?;
        // Process nodes in BFS-layer order; every shortest-path DAG edge goes
        // from layer d to layer d+1.
        let mut order: Vec<usize> = (1..=self.qubit_count)
            .filter(|&v| dist[v - 1].is_some())
            .collect();
        order.sort_by_key(|&v| dist[v - 1]);
        let mut weight = vec![LogValue::ZERO; self.qubit_count + 1];
        let mut count = vec![BigUint::from(0u32); self.qubit_count + 1];
        weight[source] = LogValue::ONE;
        count[source] = BigUint::from(1u32);
        for &v in &order {
            if v == source {
                continue;
            }
            let dv = dist[v - 1].expect("ordered nodes are reachable");
            let mut w = LogValue::ZERO;
            let mut c = BigUint::from(0u32);
            for &(u, delta) in self.neighbors(v) {
                if dist[u - 1] == Some(dv - 1) {
                    let step = LogValue::from_f64(delta).powi(2);
                    w = w.add(&weight[u].mul(&step));
                    c += &count[u];
                }
            }
            weight[v] = w;
            count[v] = c;
        }
        Ok((1..=self.qubit_count)
            .map(|target| MinPathSummary {
                source,
                target,
                route: dist[target - 1].map(|hops| MinPathRoute {
                    hops,
                    weight_sum: weight[target],
                    path_count: count[target].clone(),
                }),
            })
            .collect())
    }

    /// Every minimum-length path from `j` to `k`, each as a 1-based qubit
    /// sequence including both endpoints. Refuses once more than `cap` paths
    /// exist; counts grow combinatorially on lattices, so this is a test
    /// oracle, not a production path.
    pub fn enumerate_min_paths(&self, j: usize, k: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
        self.check_index(j)?;
        self.check_index(k)?;
        let dist = self.distances_from(j)?;
        let Some(hops) = dist[k - 1] else {
            return Ok(Vec::new());
        };
        let mut paths = Vec::new();
        let mut current = vec![j];
        self.walk_dag(&dist, k, hops, &mut current, &mut paths, cap)?;
        Ok(paths)
    }

    fn walk_dag(
        &self,
        dist: &[Option<usize>],
        target: usize,
        hops: usize,
        current: &mut Vec<usize>,
        paths: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        let here = *current.last().expect("nonempty path");
        if here == target && current.len() == hops + 1 {
            if paths.len() == cap {
                return Err(Error::PathCapExceeded { cap });
            }
            paths.push(current.clone());
            return Ok(());
        }
        let layer = current.len() - 1;
        for &(v, _) in self.neighbors(here) {
            if dist[v - 1] == Some(layer + 1) && layer + 1 <= hops {
                current.push(v);
                self.walk_dag(dist, target, hops, current, paths, cap)?;
                current.pop();
            }
        }
        Ok(())
    }
}

/// Result of the minimum-path analysis between two qubits.
///
/// `route` is `None` for disconnected pairs: the correlation then vanishes
/// identically at every finite order, which is distinct from being small.
#[derive(Clone, Debug)]
pub struct MinPathSummary {
    pub source: usize,
    pub target: usize,
    pub route: Option<MinPathRoute>,
}

#[derive(Clone, Debug)]
pub struct MinPathRoute {
    /// Minimum hop count; 0 exactly when source = target.
    pub hops: usize,
    /// `Σ_paths (Π_edges Δ/γ)^2` in log space; 1 for the empty product.
    pub weight_sum: LogValue,
    pub path_count: BigUint,
}

impl MinPathSummary {
    pub fn is_reachable(&self) -> bool {
        self.route.is_some()
    }
}

/// Regular lattice description: sites at integer coordinates `-N..=N` per
/// axis with the reference qubit at the origin and uniform coupling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub dimension: usize,
    pub extent: usize,
    pub delta_over_gamma: f64,
}

impl LatticeSpec {
    pub fn new(dimension: usize, extent: usize, delta_over_gamma: f64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::InvalidArgument(format!(
                "lattice dimension must be 1, 2 or 3, got {dimension}"
            )));
        }
        if extent == 0 {
            return Err(Error::InvalidArgument("lattice extent must be >= 1".into()));
        }
        if delta_over_gamma == 0.0 || !delta_over_gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lattice coupling must be nonzero and finite, got {delta_over_gamma}"
            )));
        }
        Ok(LatticeSpec {
            dimension,
            extent,
            delta_over_gamma,
        })
    }

    pub fn side(&self) -> usize {
        2 * self.extent + 1
    }

    pub fn site_count(&self) -> usize {
        self.side().pow(self.dimension as u32)
    }
}

/// Maps lattice coordinates to 1-based qubit indices and back.
#[derive(Clone, Debug)]
pub struct LatticeIndex {
    dimension: usize,
    extent: usize,
}

impl LatticeIndex {
    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        if coords.len() != self.dimension {
            return None;
        }
        let n = self.extent as i64;
        let side = 2 * n + 1;
        let mut index: i64 = 0;
        for &c in coords {
            if c < -n || c > n {
                return None;
            }
            index = index * side + (c + n);
        }
        Some(index as usize + 1)
    }

    pub fn coords_of(&self, index: usize) -> Option<Vec<i64>> {
        let total = (2 * self.extent + 1).pow(self.dimension as u32);
        if index == 0 || index > total {
            return None;
        }
        let n = self.extent as i64;
        let side = 2 * n + 1;
        let mut rem = (index - 1) as i64;
        let mut coords = vec![0i64; self.dimension];
        for slot in coords.iter_mut().rev() {
            *slot = rem % side - n;
            rem /= side;
        }
        Some(coords)
    }

    pub fn origin(&self) -> usize {
        self.index_of(&vec![0; self.dimension]).expect("origin exists")
    }
}

/// Build the near-neighbor lattice graph for `spec`, refusing above `site_cap`.
pub fn build_lattice_capped(spec: &LatticeSpec, site_cap: usize) -> Result<(CouplingGraph, LatticeIndex)> {
    let sites = spec.site_count();
    if sites > site_cap {
        return Err(Error::SiteCapExceeded {
            cap: site_cap,
            requested: sites,
        });
    }
    let index = LatticeIndex {
        dimension: spec.dimension,
        extent: spec.extent,
    };
    let n = spec.extent as i64;
    let mut edges = Vec::new();
    let mut coords = vec![-n; spec.dimension];
    loop {
        let here = index.index_of(&coords).expect("in range");
        for axis in 0..spec.dimension {
            if coords[axis] < n {
                let mut next = coords.clone();
                next[axis] += 1;
                let there = index.index_of(&next).expect("in range");
                edges.push((here.min(there), here.max(there), spec.delta_over_gamma));
            }
        }
        // odometer increment
        let mut axis = spec.dimension;
        loop {
            if axis == 0 {
                return Ok((CouplingGraph::new(sites, 1.0, &edges)?, index));
            }
            axis -= 1;
            if coords[axis] < n {
                coords[axis] += 1;
                break;
            }
            coords[axis] = -n;
        }
    }
}

pub fn build_lattice(spec: &LatticeSpec) -> Result<(CouplingGraph, LatticeIndex)> {
    build_lattice_capped(spec, DEFAULT_LATTICE_SITE_CAP)
}

#[derive(Deserialize)]
struct NetworkFile {
    qubits: usize,
    #[serde(default = "default_gamma")]
    gamma: f64,
    couplings: Vec<(usize, usize, f64)>,
}

fn default_gamma() -> f64 {
    1.0
}

/// Parse a network description, accepting either the line-oriented text
/// format or its JSON equivalent.
///
/// Text grammar: a `qubits <N>` header, an optional `gamma <value>` line,
/// then one `edge <j> <k> <delta_over_gamma>` line per coupling with 1-based
/// `j != k`. `#` starts a comment. Duplicate or mirrored edges are rejected.
pub fn load_network(text: &str) -> Result<CouplingGraph> {
    if text.trim_start().starts_with('{') {
        load_network_json(text)
    } else {
        load_network_text(text)
    }
}

pub fn load_network_json(text: &str) -> Result<CouplingGraph> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| Error::NetworkParse {
        line: e.line(),
        message: e.to_string(),
    })?;
    CouplingGraph::new(file.qubits, file.gamma, &file.couplings)
}

pub fn load_network_text(text: &str) -> Result<CouplingGraph> {
    let mut qubits: Option<usize> = None;
    let mut gamma = 1.0;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let keyword = fields.next().expect("nonempty content");
        let parse_err = |message: String| Error::NetworkParse { line, message };
        match keyword {
            "qubits" => {
                let value = fields
                    .next()
                    .ok_or_else(|| parse_err("missing qubit count".into()))?;
                let n: usize = value
                    .parse()
                    .map_err(|_| parse_err(format!("invalid qubit count '{value}'")))?;
                if qubits.replace(n).is_some() {
                    return Err(parse_err("duplicate 'qubits' header".into()));
                }
            }
            "gamma" => {
                let value = fields
                    .next()
                    .ok_or_else(|| parse_err("missing gamma value".into()))?;
                gamma = value
                    .parse()
                    .map_err(|_| parse_err(format!("invalid gamma '{value}'")))?;
            }
            "edge" => {
                let mut field = |name: &str| {
                    fields
                        .next()
                        .ok_or_else(|| Error::NetworkParse {
                            line,
                            message: format!("missing {name} field"),
                        })
                        .map(str::to_owned)
                };
                let j_raw = field("source")?;
                let k_raw = field("target")?;
                let d_raw = field("coupling")?;
                let j: usize = j_raw
                    .parse()
                    .map_err(|_| parse_err(format!("invalid source index '{j_raw}'")))?;
                let k: usize = k_raw
                    .parse()
                    .map_err(|_| parse_err(format!("invalid target index '{k_raw}'")))?;
                let d: f64 = d_raw
                    .parse()
                    .map_err(|_| parse_err(format!("invalid coupling '{d_raw}'")))?;
                edges.push((j, k, d));
            }
            other => {
                return Err(parse_err(format!("unknown keyword '{other}'")));
            }
        }
        if let Some(extra) = fields.next() {
            return Err(Error::NetworkParse {
                line,
                message: format!("unexpected trailing field '{extra}'"),
            });
        }
    }
    let qubits = qubits.ok_or(Error::NetworkParse {
        line: 0,
        message: "missing 'qubits' header".into(),
    })?;
    CouplingGraph::new(qubits, gamma, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chain_construction() {
        let g = CouplingGraph::chain(9, 1.0).unwrap();
        assert_eq!(g.qubit_count(), 9);
        assert_eq!(g.edge_count(), 8);
        assert!(g.edges().all(|(_, _, d)| d == 1.0));

        let single = CouplingGraph::chain(1, 1.0).unwrap();
        assert_eq!(single.edge_count(), 0);

        let g = CouplingGraph::chain(3, 5.0).unwrap();
        assert_eq!(g.coupling(1, 2), Some(5.0));
        assert_eq!(g.coupling(2, 3), Some(5.0));
        assert_eq!(g.coupling(1, 3), None);

        assert!(CouplingGraph::chain(0, 1.0).is_err());
        assert!(CouplingGraph::chain(3, 0.0).is_err());
    }

    #[test]
    fn graph_validation() {
        assert!(matches!(
            CouplingGraph::new(3, 1.0, &[(2, 2, 1.0)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            CouplingGraph::new(3, 1.0, &[(1, 2, 1.0), (2, 1, 0.5)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            CouplingGraph::new(3, 1.0, &[(1, 2, 0.0)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            CouplingGraph::new(3, -1.0, &[(1, 2, 1.0)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            CouplingGraph::new(3, 1.0, &[(1, 4, 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn hamiltonian_terms() {
        // chain(2): -X1 - X2 - (1/2) Z1 Z2
        let h = CouplingGraph::chain(2, 1.0).unwrap().hamiltonian();
        assert_eq!(h.term_count(), 3);
        let x1 = PauliString::single(2, 1, Pauli::X).unwrap();
        let zz = PauliString::zz(2, 1, 2).unwrap();
        assert_eq!(h.coefficient(&x1).unwrap().re, -1.0);
        assert_eq!(h.coefficient(&zz).unwrap().re, -0.5);

        let single = CouplingGraph::chain(1, 1.0).unwrap().hamiltonian();
        assert_eq!(single.term_count(), 1);

        let sparse = CouplingGraph::new(3, 1.0, &[]).unwrap().hamiltonian();
        assert_eq!(sparse.term_count(), 3);
    }

    #[test]
    fn lattice_counts() {
        let (g2, _) = build_lattice(&LatticeSpec::new(2, 1, 1.0).unwrap()).unwrap();
        assert_eq!(g2.qubit_count(), 9);
        assert_eq!(g2.edge_count(), 12);

        let (g1, idx1) = build_lattice(&LatticeSpec::new(1, 4, 1.0).unwrap()).unwrap();
        assert_eq!(g1.qubit_count(), 9);
        assert_eq!(g1.edge_count(), 8);
        assert_eq!(idx1.origin(), 5);

        let (g3, _) = build_lattice(&LatticeSpec::new(3, 1, 1.0).unwrap()).unwrap();
        assert_eq!(g3.qubit_count(), 27);
        assert_eq!(g3.edge_count(), 54);

        assert!(matches!(
            build_lattice_capped(&LatticeSpec::new(3, 10, 1.0).unwrap(), 100),
            Err(Error::SiteCapExceeded { .. })
        ));
    }

    #[test]
    fn lattice_index_round_trip() {
        let (_, idx) = build_lattice(&LatticeSpec::new(2, 2, 1.0).unwrap()).unwrap();
        for i in 1..=25 {
            let coords = idx.coords_of(i).unwrap();
            assert_eq!(idx.index_of(&coords), Some(i));
        }
        assert_eq!(idx.index_of(&[-3, 0]), None);
        assert_eq!(idx.coords_of(26), None);
    }

    #[test]
    fn chain_min_path() {
        let g = CouplingGraph::chain(9, 1.0).unwrap();
        let s = g.min_path_summary(1, 4).unwrap();
        let route = s.route.unwrap();
        assert_eq!(route.hops, 3);
        assert_eq!(route.path_count.to_u64(), Some(1));
        assert!((route.weight_sum.to_f64() - 1.0).abs() < 1e-12);

        let same = g.min_path_summary(5, 5).unwrap().route.unwrap();
        assert_eq!(same.hops, 0);
        assert_eq!(same.weight_sum, LogValue::ONE);

        assert!(matches!(
            g.min_path_summary(1, 12),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn weighted_chain_min_path() {
        let g = CouplingGraph::chain(9, 5.0).unwrap();
        let route = g.min_path_summary(1, 4).unwrap().route.unwrap();
        // single path of 3 edges, each contributing (5)^2
        assert!((route.weight_sum.ln_magnitude() - 6.0 * 5.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn two_path_square() {
        let g = CouplingGraph::new(
            4,
            1.0,
            &[(1, 2, 2.0), (2, 3, 0.5), (1, 4, 1.0), (4, 3, 1.0)],
        )
        .unwrap();
        let route = g.min_path_summary(1, 3).unwrap().route.unwrap();
        assert_eq!(route.hops, 2);
        assert_eq!(route.path_count.to_u64(), Some(2));
        // (2 * 0.5)^2 + (1 * 1)^2 = 2
        assert!((route.weight_sum.to_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unreachable_pair() {
        let g = CouplingGraph::new(4, 1.0, &[(1, 2, 1.0)]).unwrap();
        let s = g.min_path_summary(1, 3).unwrap();
        assert!(!s.is_reachable());
        assert!(g.enumerate_min_paths(1, 3, 10).unwrap().is_empty());
    }

    #[test]
    fn enumerate_chain_and_lattice() {
        let g = CouplingGraph::chain(5, 1.0).unwrap();
        let paths = g.enumerate_min_paths(1, 5, 10).unwrap();
        assert_eq!(paths, vec![vec![1, 2, 3, 4, 5]]);

        let (lat, idx) = build_lattice(&LatticeSpec::new(2, 3, 1.0).unwrap()).unwrap();
        let origin = idx.origin();
        let target = idx.index_of(&[2, 1]).unwrap();
        let paths = lat.enumerate_min_paths(origin, target, 100).unwrap();
        assert_eq!(paths.len(), 3);

        let target = idx.index_of(&[3, 3]).unwrap();
        let paths = lat.enumerate_min_paths(origin, target, 100).unwrap();
        assert_eq!(paths.len(), 20);

        assert!(matches!(
            lat.enumerate_min_paths(origin, target, 19),
            Err(Error::PathCapExceeded { cap: 19 })
        ));
    }

    #[test]
    fn lattice_path_counts_are_binomial() {
        let (lat, idx) = build_lattice(&LatticeSpec::new(2, 5, 1.0).unwrap()).unwrap();
        let origin = idx.origin();
        let binom = |n: u64, k: u64| -> u64 {
            let mut out = 1u64;
            for i in 0..k {
                out = out * (n - i) / (i + 1);
            }
            out
        };
        for n in 0..=5i64 {
            for m in 0..=(5 - n) {
                let target = idx.index_of(&[n, m]).unwrap();
                let route = lat.min_path_summary(origin, target).unwrap().route.unwrap();
                assert_eq!(route.hops as i64, n + m);
                assert_eq!(
                    route.path_count.to_u64(),
                    Some(binom((n + m) as u64, m as u64))
                );
            }
        }

        let (lat3, idx3) = build_lattice(&LatticeSpec::new(3, 3, 1.0).unwrap()).unwrap();
        let origin = idx3.origin();
        let target = idx3.index_of(&[1, 1, 1]).unwrap();
        let route = lat3.min_path_summary(origin, target).unwrap().route.unwrap();
        assert_eq!(route.path_count.to_u64(), Some(6));
        let target = idx3.index_of(&[3, 3, 3]).unwrap();
        let route = lat3.min_path_summary(origin, target).unwrap().route.unwrap();
        // 9! / (3!)^3 = 1680
        assert_eq!(route.path_count.to_u64(), Some(1680));
    }

    fn random_connected(rng: &mut ChaCha8Rng, nodes: usize) -> CouplingGraph {
        let mut edges = BTreeMap::new();
        for v in 2..=nodes {
            let u = rng.gen_range(1..v);
            edges.insert((u, v), ());
        }
        for _ in 0..rng.gen_range(0..=nodes) {
            let u = rng.gen_range(1..=nodes);
            let v = rng.gen_range(1..=nodes);
            if u != v {
                edges.insert((u.min(v), u.max(v)), ());
            }
        }
        let list: Vec<(usize, usize, f64)> = edges
            .keys()
            .map(|&(u, v)| {
                let mut d = 0.0;
                while d == 0.0 {
                    d = rng.gen_range(-2.0..2.0);
                }
                (u, v, d)
            })
            .collect();
        CouplingGraph::new(nodes, 1.0, &list).unwrap()
    }

    #[test]
    fn weight_sum_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let nodes = rng.gen_range(2..=10);
            let g = random_connected(&mut rng, nodes);
            let j = rng.gen_range(1..=nodes);
            let k = rng.gen_range(1..=nodes);
            let summary = g.min_path_summary(j, k).unwrap();
            let paths = g.enumerate_min_paths(j, k, 100_000).unwrap();
            let route = summary.route.unwrap();
            assert_eq!(route.path_count.to_usize(), Some(paths.len()));
            let mut brute = LogValue::ZERO;
            for path in &paths {
                let mut prod = LogValue::ONE;
                for pair in path.windows(2) {
                    prod = prod.mul(&LogValue::from_f64(g.coupling(pair[0], pair[1]).unwrap()));
                }
                brute = brute.add(&prod.powi(2));
            }
            let diff = (route.weight_sum.ln_magnitude() - brute.ln_magnitude()).abs();
            assert!(diff <= 1e-12, "DP vs enumeration log diff {diff}");
        }
    }

    #[test]
    fn min_path_symmetry_and_sign_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let nodes = rng.gen_range(2..=9);
            let g = random_connected(&mut rng, nodes);
            let j = rng.gen_range(1..=nodes);
            let k = rng.gen_range(1..=nodes);
            let fwd = g.min_path_summary(j, k).unwrap().route.unwrap();
            let rev = g.min_path_summary(k, j).unwrap().route.unwrap();
            assert_eq!(fwd.hops, rev.hops);
            assert!(
                (fwd.weight_sum.ln_magnitude() - rev.weight_sum.ln_magnitude()).abs() <= 1e-12
            );

            // flipping every coupling sign leaves the squared weights alone
            let flipped: Vec<(usize, usize, f64)> =
                g.edges().map(|(a, b, d)| (a, b, -d)).collect();
            let g2 = CouplingGraph::new(g.qubit_count(), 1.0, &flipped).unwrap();
            let w2 = g2.min_path_summary(j, k).unwrap().route.unwrap();
            assert_eq!(
                fwd.weight_sum.ln_magnitude(),
                w2.weight_sum.ln_magnitude()
            );
        }
    }

    #[test]
    fn network_text_round_trip() {
        let text = "\
# nine qubits, ten edges
qubits 9
gamma 1.0
edge 1 2 1.0
edge 1 3 1.0
edge 2 4 0.9
edge 3 5 0.92
edge 2 6 0.88
edge 4 5 0.6
edge 4 7 1.1
edge 5 8 1.05
edge 7 9 0.8
edge 8 9 0.7
";
        let g = load_network(text).unwrap();
        assert_eq!(g.qubit_count(), 9);
        assert_eq!(g.edge_count(), 10);
        assert_eq!(g.coupling(2, 4), Some(0.9));
    }

    #[test]
    fn network_errors() {
        let selfloop = "qubits 3\nedge 2 2 1.0\n";
        assert!(matches!(
            load_network(selfloop),
            Err(Error::InvalidGraph(_))
        ));

        let mirrored = "qubits 3\nedge 1 2 1.0\nedge 2 1 0.5\n";
        assert!(matches!(
            load_network(mirrored),
            Err(Error::InvalidGraph(_))
        ));

        let bad = "qubits 3\nedge 1 two 1.0\n";
        match load_network(bad) {
            Err(Error::NetworkParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }

        let missing = "edge 1 2 1.0\n";
        assert!(matches!(
            load_network(missing),
            Err(Error::NetworkParse { .. })
        ));
    }

    #[test]
    fn network_json_equivalent() {
        let json = r#"{ "qubits": 4, "gamma": 2.0,
            "couplings": [[1, 2, 1.5], [2, 3, -0.5], [3, 4, 0.25]] }"#;
        let g = load_network(json).unwrap();
        assert_eq!(g.qubit_count(), 4);
        assert_eq!(g.gamma(), 2.0);
        assert_eq!(g.coupling(2, 3), Some(-0.5));

        let text = "qubits 4\ngamma 2.0\nedge 1 2 1.5\nedge 2 3 -0.5\nedge 3 4 0.25\n";
        assert_eq!(load_network(text).unwrap(), g);
    }

    #[test]
    fn digest_distinguishes_graphs() {
        let a = CouplingGraph::chain(5, 1.0).unwrap();
        let b = CouplingGraph::chain(5, 2.0).unwrap();
        let c = CouplingGraph::chain(6, 1.0).unwrap();
        assert_ne!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest(), CouplingGraph::chain(5, 1.0).unwrap().digest());
    }
}
