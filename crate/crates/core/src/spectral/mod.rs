//! Specialization graph of a finite spectrum and its combinatorial Laplacian.

pub mod cluster;
pub mod components;
pub mod eigen;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::semiring::{ElementId, TernaryGammaSemiring};
use crate::spectrum::Spectrum;
use crate::triadic::{automorphism_action, GammaAutomorphism};

pub use cluster::{spectral_cluster, ClusteringResult};
pub use components::connected_components;
pub use eigen::{eigen_symmetric, EigenDecomposition, MAX_SWEEPS, SOLVER_TOLERANCE};

/// Eigenvalues at or below this count as zero.
pub const ZERO_THRESHOLD: f64 = 1e-8;
/// Tolerance for comparing two eigenvalue multisets.
pub const SPECTRUM_MATCH_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Comparability,
    /// Covering relations only. Exploratory; no spectral claims attach to it.
    Hasse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparabilityGraph {
    pub kind: GraphKind,
    adjacency: Vec<Vec<bool>>,
}

impl ComparabilityGraph {
    /// Edge between distinct points whenever one prime contains the other.
    pub fn from_spectrum(x: &Spectrum) -> Self {
        let n = x.len();
        let adjacency = (0..n).map(|i| (0..n).map(|j| i != j && (x.contains(i, j) || x.contains(j, i))).collect()).collect();
        ComparabilityGraph { kind: GraphKind::Comparability, adjacency }
    }

    pub fn hasse(x: &Spectrum) -> Self {
        let n = x.len();
        let mut adjacency = vec![vec![false; n]; n];
        for (i, j) in x.hasse_edges() {
            adjacency[i][j] = true;
            adjacency[j][i] = true;
        }
        ComparabilityGraph { kind: GraphKind::Hasse, adjacency }
    }

    pub fn from_adjacency(adjacency: Vec<Vec<bool>>) -> Result<Self> {
        let n = adjacency.len();
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!("adjacency row {i} has {} entries, expected {n}", row.len())));
            }
            if row[i] {
                return Err(Error::Malformed(format!("self-loop at vertex {i}")));
            }
            for j in 0..n {
                if row[j] != adjacency[j][i] {
                    return Err(Error::Asymmetric { row: i, col: j });
                }
            }
        }
        Ok(ComparabilityGraph { kind: GraphKind::Comparability, adjacency })
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    /// Edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| self.adjacency[i][j]).collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].iter().filter(|&&e| e).count()
    }
}

pub fn specialization_graph(x: &Spectrum) -> ComparabilityGraph {
    ComparabilityGraph::from_spectrum(x)
}

/// Exact integer `A`, `D` and `L = D − A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LaplacianMatrices {
    pub adjacency: Vec<Vec<i64>>,
    pub degree: Vec<Vec<i64>>,
    pub laplacian: Vec<Vec<i64>>,
}

impl LaplacianMatrices {
    pub fn len(&self) -> usize {
        self.laplacian.len()
    }

    pub fn is_empty(&self) -> bool {
        self.laplacian.is_empty()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.laplacian.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
    }

    /// Symmetric, zero row sums, diagonal equal to degrees.
    pub fn is_well_formed(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            self.laplacian[i].iter().sum::<i64>() == 0
                && self.laplacian[i][i] == self.degree[i][i]
                && (0..n).all(|j| self.laplacian[i][j] == self.laplacian[j][i])
        })
    }
}

pub fn laplacian(g: &ComparabilityGraph) -> LaplacianMatrices {
    let n = g.len();
    let adjacency: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| g.has_edge(i, j) as i64).collect()).collect();
    let degree: Vec<Vec<i64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { g.degree(i) as i64 } else { 0 }).collect()).collect();
    let laplacian = (0..n).map(|i| (0..n).map(|j| degree[i][j] - adjacency[i][j]).collect()).collect();
    LaplacianMatrices { adjacency, degree, laplacian }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Connectivity {
    Empty,
    TriviallyConnected,
    Verdict { spectral: bool, combinatorial: bool, fiedler: f64, components: usize },
}

impl Connectivity {
    pub fn is_connected(&self) -> Option<bool> {
        match self {
            Connectivity::Empty => None,
            Connectivity::TriviallyConnected => Some(true),
            Connectivity::Verdict { combinatorial, .. } => Some(*combinatorial),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockDecomposition {
    pub components: Vec<Vec<usize>>,
    /// Position `i` of the block form holds vertex `permutation[i]`.
    pub permutation: Vec<usize>,
    pub block_matrix: Vec<Vec<i64>>,
    pub block_sizes: Vec<usize>,
    pub block_eigenvalues: Vec<Vec<f64>>,
    /// Union of block spectra equals the full spectrum.
    pub verified: bool,
}

/// Matrices, eigenpairs and the union-find component partition.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianAnalysis {
    pub graph: ComparabilityGraph,
    pub matrices: LaplacianMatrices,
    pub eigen: EigenDecomposition,
    pub components: Vec<Vec<usize>>,
}

impl LaplacianAnalysis {
    pub fn new(graph: ComparabilityGraph) -> Result<Self> {
        Self::with_tolerance(graph, SOLVER_TOLERANCE)
    }

    pub fn with_tolerance(graph: ComparabilityGraph, tolerance: f64) -> Result<Self> {
        let matrices = laplacian(&graph);
        let eigen = eigen_symmetric(&matrices.to_f64(), tolerance)?;
        let components = connected_components(graph.adjacency());
        Ok(LaplacianAnalysis { graph, matrices, eigen, components })
    }

    pub fn of_spectrum(x: &Spectrum) -> Result<Self> {
        Self::new(specialization_graph(x))
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn fiedler_value(&self) -> Option<f64> {
        self.eigen.values.get(1).copied()
    }

    pub fn zero_multiplicity(&self) -> usize {
        self.eigen.values.iter().filter(|v| v.abs() <= ZERO_THRESHOLD).count()
    }

    pub fn max_residual(&self) -> f64 {
        eigen::max_residual(&self.matrices.to_f64(), &self.eigen)
    }

    /// Spectral verdict (`λ₂ > 0`) against the union-find verdict.
    pub fn connectivity_verdict(&self) -> Result<Connectivity> {
        let n = self.len();
        if n == 0 {
            return Ok(Connectivity::Empty);
        }
        if n == 1 {
            return Ok(Connectivity::TriviallyConnected);
        }
        let fiedler = self.eigen.values[1];
        let spectral = fiedler > ZERO_THRESHOLD;
        let combinatorial = self.components.len() == 1;
        if spectral != combinatorial || self.zero_multiplicity() != self.components.len() {
            return Err(Error::Consistency(format!(
                "λ₂ = {fiedler:e} with {} zero eigenvalue(s) but {} component(s)",
                self.zero_multiplicity(),
                self.components.len()
            )));
        }
        Ok(Connectivity::Verdict { spectral, combinatorial, fiedler, components: self.components.len() })
    }

    /// Regroups vertices by component and checks the result is block diagonal
    /// with each block equal to the induced subgraph's Laplacian.
    pub fn block_decomposition(&self) -> Result<BlockDecomposition> {
        let l = &self.matrices.laplacian;
        let permutation: Vec<usize> = self.components.iter().flatten().copied().collect();
        let block_matrix: Vec<Vec<i64>> =
            permutation.iter().map(|&i| permutation.iter().map(|&j| l[i][j]).collect()).collect();
        let mut block_of = vec![0; self.len()];
        for (b, comp) in self.components.iter().enumerate() {
            for &v in comp {
                block_of[v] = b;
            }
        }
        for (r, &i) in permutation.iter().enumerate() {
            for (c, &j) in permutation.iter().enumerate() {
                if block_of[i] != block_of[j] && block_matrix[r][c] != 0 {
                    return Err(Error::Consistency(format!("entry ({r}, {c}) lies outside every block")));
                }
            }
        }

        let mut block_eigenvalues = Vec::with_capacity(self.components.len());
        for comp in &self.components {
            let sub: Vec<Vec<bool>> = comp.iter().map(|&i| comp.iter().map(|&j| self.graph.has_edge(i, j)).collect()).collect();
            let induced = laplacian(&ComparabilityGraph::from_adjacency(sub)?);
            for (a, &i) in comp.iter().enumerate() {
                for (b, &j) in comp.iter().enumerate() {
                    if induced.laplacian[a][b] != l[i][j] {
                        return Err(Error::Consistency(format!(
                            "block for component {comp:?} differs from its induced Laplacian"
                        )));
                    }
                }
            }
            block_eigenvalues.push(eigen_symmetric(&induced.to_f64(), SOLVER_TOLERANCE)?.values);
        }

        let mut union: Vec<f64> = block_eigenvalues.iter().flatten().copied().collect();
        union.sort_by(f64::total_cmp);
        let verified = multisets_match(&union, &self.eigen.values, SPECTRUM_MATCH_TOLERANCE);
        Ok(BlockDecomposition {
            components: self.components.clone(),
            permutation,
            block_matrix,
            block_sizes: self.components.iter().map(Vec::len).collect(),
            block_eigenvalues,
            verified,
        })
    }

    /// Matrices, eigenvalues, components and optional clusters, in a fixed field order.
    pub fn to_json(&self, clusters: Option<&ClusteringResult>) -> serde_json::Value {
        json!({
            "graph": self.graph.kind,
            "vertices": self.len(),
            "edges": self.graph.edges(),
            "adjacency": self.matrices.adjacency,
            "degree": self.matrices.degree,
            "laplacian": self.matrices.laplacian,
            "eigenvalues": self.eigen.values.iter().map(|&v| clean(v)).collect::<Vec<_>>(),
            "fiedler": self.fiedler_value().map(clean),
            "components": self.components,
            "clusters": clusters.map(|c| json!({
                "k": c.k,
                "assignment": c.assignment,
                "partition": c.clusters(),
                "iterations": c.iterations,
                "objective": clean(c.objective()),
            })),
        })
    }

    /// One CSV row of ascending eigenvalues.
    pub fn eigenvalues_csv(&self) -> String {
        let row: Vec<String> = self.eigen.values.iter().map(|&v| clean(v).to_string()).collect();
        format!("{}\n", row.join(","))
    }
}

/// Rounds to nine decimals and clears negative zero, for stable reports.
pub fn clean(x: f64) -> f64 {
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Sorted sequences agree entrywise within `tol`.
pub fn multisets_match(a: &[f64], b: &[f64], tol: f64) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    /// Point `i` of the second spectrum corresponds to point `point_map[i]` of the first.
    pub point_map: Vec<usize>,
    pub permutation_similar: bool,
    pub eigenvalues_match: bool,
    pub eigenvalues: Vec<f64>,
}

impl InvarianceReport {
    pub fn holds(&self) -> bool {
        self.permutation_similar && self.eigenvalues_match
    }
}

fn permuted(l: &[Vec<i64>], p: &[usize]) -> Vec<Vec<i64>> {
    p.iter().map(|&i| p.iter().map(|&j| l[i][j]).collect()).collect()
}

fn compare_under(first: &LaplacianAnalysis, second: &LaplacianAnalysis, point_map: Vec<usize>) -> Result<InvarianceReport> {
    let permutation_similar = permuted(&first.matrices.laplacian, &point_map) == second.matrices.laplacian;
    let eigenvalues_match = multisets_match(first.eigenvalues(), second.eigenvalues(), SPECTRUM_MATCH_TOLERANCE);
    let report = InvarianceReport {
        point_map,
        permutation_similar,
        eigenvalues_match,
        eigenvalues: second.eigen.values.clone(),
    };
    if !report.holds() {
        return Err(Error::Consistency(format!(
            "Laplacian not invariant (similar: {permutation_similar}, eigenvalues match: {eigenvalues_match})"
        )));
    }
    Ok(report)
}

/// The Laplacian of the graph relabeled by `σ`'s point action equals `PᵀLP`
/// and has the same spectrum.
///
/// The relabeled graph is rebuilt from the prime sets themselves rather than
/// by permuting the containment matrix.
pub fn check_permutation_invariance(t: &TernaryGammaSemiring, sigma: &GammaAutomorphism) -> Result<InvarianceReport> {
    let x = Spectrum::new(t)?;
    let action = automorphism_action(sigma, &x)?;
    if !action.preserves_containment {
        return Err(Error::Consistency("automorphism action does not preserve containment".into()));
    }
    let base = LaplacianAnalysis::of_spectrum(&x)?;
    let p = &action.point_map;
    let n = x.len();
    let moved: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (a, b) = (x.prime(p[i]), x.prime(p[j]));
                    i != j && (a.is_subset(b) || b.is_subset(a))
                })
                .collect()
        })
        .collect();
    let relabeled = LaplacianAnalysis::new(ComparabilityGraph::from_adjacency(moved)?)?;
    let report = compare_under(&base, &relabeled, action.point_map.clone())?;
    if relabeled.matrices.laplacian != base.matrices.laplacian {
        return Err(Error::Consistency("point action is not a graph automorphism".into()));
    }
    Ok(report)
}

/// Invariance across an isomorphism `φ: T → S`: each side's Laplacian is
/// computed from its own spectrum and compared through the comap.
pub fn check_isomorphism_invariance(
    t: &TernaryGammaSemiring,
    s: &TernaryGammaSemiring,
    phi: &[ElementId],
) -> Result<InvarianceReport> {
    if phi.len() != t.size() || t.size() != s.size() || !crate::semiring::is_permutation(phi) {
        return Err(Error::Precondition("isomorphism must be a bijection of carriers".into()));
    }
    let (xt, xs) = (Spectrum::new(t)?, Spectrum::new(s)?);
    let point_map = xt.comap_from(phi, &xs)?;
    if !crate::semiring::is_permutation(&point_map) {
        return Err(Error::Consistency("comap of an isomorphism is not bijective".into()));
    }
    let (lt, ls) = (LaplacianAnalysis::of_spectrum(&xt)?, LaplacianAnalysis::of_spectrum(&xs)?);
    compare_under(&lt, &ls, point_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::FiniteSemiring;
    use crate::triadic::enumerate_gamma_automorphisms;

    fn analysis(s: FiniteSemiring) -> LaplacianAnalysis {
        let t = TernaryGammaSemiring::with_trivial_gamma(s);
        LaplacianAnalysis::of_spectrum(&Spectrum::new(&t).unwrap()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        multisets_match(a, b, 1e-9)
    }

    #[test]
    fn chain3_single_edge() {
        let a = analysis(FiniteSemiring::chain(3).unwrap());
        assert_eq!(a.graph.edges(), vec![(0, 1)]);
        assert_eq!(a.matrices.laplacian, vec![vec![1, -1], vec![-1, 1]]);
        assert!(close(a.eigenvalues(), &[0.0, 2.0]));
        assert!(matches!(a.connectivity_verdict().unwrap(), Connectivity::Verdict { spectral: true, combinatorial: true, .. }));
    }

    #[test]
    fn boolean_product_two_blocks() {
        let a = analysis(FiniteSemiring::boolean_power(2).unwrap());
        assert!(a.graph.edges().is_empty());
        assert_eq!(a.matrices.laplacian, vec![vec![0, 0], vec![0, 0]]);
        assert!(close(a.eigenvalues(), &[0.0, 0.0]));
        assert_eq!(
            a.connectivity_verdict().unwrap(),
            Connectivity::Verdict { spectral: false, combinatorial: false, fiedler: a.eigen.values[1], components: 2 }
        );
        let b = a.block_decomposition().unwrap();
        assert_eq!(b.block_sizes, vec![1, 1]);
        assert!(b.verified);
        let c = spectral_cluster(&a, 2, 0).unwrap();
        assert_eq!(c.clusters(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn chain4_complete_graph() {
        let a = analysis(FiniteSemiring::chain(4).unwrap());
        assert_eq!(a.matrices.laplacian, vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]);
        assert!(close(a.eigenvalues(), &[0.0, 3.0, 3.0]));
        assert!((a.fiedler_value().unwrap() - 3.0).abs() < 1e-9);
        assert!(a.max_residual() < 1e-9);
        let b = a.block_decomposition().unwrap();
        assert_eq!(b.block_sizes, vec![3]);
        assert_eq!(b.block_matrix, a.matrices.laplacian);
    }

    #[test]
    fn degenerate_sizes() {
        let a = analysis(FiniteSemiring::chain(2).unwrap());
        assert_eq!(a.connectivity_verdict().unwrap(), Connectivity::TriviallyConnected);
        let zero = FiniteSemiring::from_fn(vec!["0".into()], 0, 0, |_, _| 0, |_, _| 0).unwrap();
        let a = analysis(zero);
        assert_eq!(a.connectivity_verdict().unwrap(), Connectivity::Empty);
        assert!(a.block_decomposition().unwrap().verified);
    }

    #[test]
    fn mixed_components_product() {
        // Primes are {0}×B ⊂ {0,e}×B together with the isolated chain-3 × {0}.
        let s = FiniteSemiring::chain(3).unwrap().product_with(&FiniteSemiring::boolean()).unwrap();
        let a = analysis(s);
        let b = a.block_decomposition().unwrap();
        let mut sizes = b.block_sizes.clone();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2]);
        assert!(b.verified);
        assert!(close(a.eigenvalues(), &[0.0, 0.0, 2.0]));
        let c = spectral_cluster(&a, 2, 3).unwrap();
        assert_eq!(c.clusters(), a.components);
    }

    #[test]
    fn single_cluster() {
        let a = analysis(FiniteSemiring::chain(5).unwrap());
        let c = spectral_cluster(&a, 1, 11).unwrap();
        assert!(c.assignment.iter().all(|&x| x == 0));
        assert!(spectral_cluster(&a, 0, 1).is_err());
        assert!(spectral_cluster(&a, 5, 1).is_err());
    }

    #[test]
    fn chain4_two_clusters_regression() {
        let a = analysis(FiniteSemiring::chain(4).unwrap());
        let first = spectral_cluster(&a, 2, 42).unwrap();
        let second = spectral_cluster(&a, 2, 42).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.clusters().len(), 2);
    }

    #[test]
    fn automorphisms_leave_laplacian_invariant() {
        for s in [FiniteSemiring::boolean_power(2).unwrap(), FiniteSemiring::boolean_power(3).unwrap(), FiniteSemiring::chain(4).unwrap()] {
            let t = TernaryGammaSemiring::with_trivial_gamma(s);
            for sigma in enumerate_gamma_automorphisms(&t).unwrap() {
                assert!(check_permutation_invariance(&t, &sigma).unwrap().holds());
            }
        }
    }

    #[test]
    fn relabeled_chain4_keeps_spectrum() {
        let c4 = FiniteSemiring::chain(4).unwrap();
        let perm = [2, 0, 3, 1];
        let t = TernaryGammaSemiring::with_trivial_gamma(c4.clone());
        let s = TernaryGammaSemiring::with_trivial_gamma(c4.relabeled(&perm).unwrap());
        let r = check_isomorphism_invariance(&t, &s, &perm).unwrap();
        assert!(close(&r.eigenvalues, &[0.0, 3.0, 3.0]));
    }

    #[test]
    fn hasse_variant_differs_on_chain4() {
        let t = TernaryGammaSemiring::with_trivial_gamma(FiniteSemiring::chain(4).unwrap());
        let x = Spectrum::new(&t).unwrap();
        let h = LaplacianAnalysis::new(ComparabilityGraph::hasse(&x)).unwrap();
        assert_eq!(h.graph.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(h.components.len(), 1);
        assert!(close(h.eigenvalues(), &[0.0, 1.0, 3.0]));
    }

    #[test]
    fn csv_and_json_are_stable() {
        let a = analysis(FiniteSemiring::chain(4).unwrap());
        assert_eq!(a.eigenvalues_csv(), "0,3,3\n");
        let j = a.to_json(None);
        let keys: Vec<&String> = j.as_object().unwrap().keys().collect();
        assert_eq!(keys[0], "graph");
        assert_eq!(j["components"], json!([[0, 1, 2]]));
    }
}
