//! The prime Γ-spectrum as a finite topological space.

use std::fmt::Write as _;

use crate::bitset::{Subset, MAX_BITS};
use crate::error::{Error, Result};
use crate::ideal::{self, IdealSubset, DEFAULT_ENUM_CAP};
use crate::semiring::{is_homomorphism, ElementId, TernaryGammaSemiring};

/// Generators allowed in a power-decomposition search (cost is `n^|fs|`).
pub const MAX_COVER_GENERATORS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetKind {
    /// `V(I)`
    Closed,
    /// `D(f)`
    BasicOpen,
    General,
}

/// A set of spectrum points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointSet {
    pub kind: SetKind,
    pub points: Subset,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    algebra: TernaryGammaSemiring,
    primes: Vec<IdealSubset>,
    containment: Vec<Vec<bool>>,
}

impl Spectrum {
    pub fn new(t: &TernaryGammaSemiring) -> Result<Self> {
        Spectrum::with_cap(t, DEFAULT_ENUM_CAP)
    }

    pub fn with_cap(t: &TernaryGammaSemiring, cap: usize) -> Result<Self> {
        let primes = ideal::enumerate_primes_with_cap(t, cap)?;
        if primes.len() > MAX_BITS {
            return Err(Error::CapExceeded { size: primes.len(), cap: MAX_BITS });
        }
        let containment = primes
            .iter()
            .map(|p| primes.iter().map(|q| p.is_subset(*q)).collect())
            .collect();
        Ok(Spectrum { algebra: t.clone(), primes, containment })
    }

    pub fn algebra(&self) -> &TernaryGammaSemiring {
        &self.algebra
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[IdealSubset] {
        &self.primes
    }

    pub fn prime(&self, i: usize) -> IdealSubset {
        self.primes[i]
    }

    pub fn index_of(&self, p: IdealSubset) -> Option<usize> {
        self.primes.iter().position(|&q| q == p)
    }

    /// `P_i ⊆ P_j`.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.containment[i][j]
    }

    pub fn containment(&self) -> &[Vec<bool>] {
        &self.containment
    }

    pub fn all_points(&self) -> Subset {
        Subset::full(self.len())
    }

    /// `{e, a}`-style rendering of a prime with element names.
    pub fn prime_label(&self, i: usize) -> String {
        let s = self.algebra.semiring();
        let names: Vec<&str> = self.primes[i].iter().map(|x| s.name(x)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// `V(I)`: primes containing `I`.
    pub fn vanishing_set(&self, i: IdealSubset) -> PointSet {
        PointSet {
            kind: SetKind::Closed,
            points: (0..self.len()).filter(|&k| i.is_subset(self.primes[k])).collect(),
        }
    }

    /// `D(f)`: primes not containing `f`.
    pub fn principal_open(&self, f: ElementId) -> PointSet {
        PointSet {
            kind: SetKind::BasicOpen,
            points: (0..self.len()).filter(|&k| !self.primes[k].contains(f)).collect(),
        }
    }

    fn union_of_opens(&self, fs: &[ElementId]) -> Subset {
        fs.iter()
            .fold(Subset::EMPTY, |acc, &g| acc.union(self.principal_open(g).points))
    }

    /// Closed sets of a finite spectrum are up-sets of the containment order.
    pub fn is_upward_closed(&self, points: Subset) -> bool {
        points
            .iter()
            .all(|i| (0..self.len()).all(|j| !self.containment[i][j] || points.contains(j)))
    }

    /// Checks the closed-set axioms on all enumerated ideals (pairs for
    /// unions, families of size up to three for intersections) and
    /// `D(f) ∩ D(g) = D(fg)` on all pairs.
    pub fn verify_topology_axioms(&self) -> Result<TopologyReport> {
        let t = &self.algebra;
        let s = t.semiring();
        let n = s.size();
        let ideals = ideal::enumerate_ideals(t)?;
        let mut report = TopologyReport::default();
        let mut check = |ok: bool, what: String| {
            report.instances += 1;
            if !ok {
                report.failures.push(what);
            }
        };
        let v = |i: IdealSubset| self.vanishing_set(i).points;
        let all = self.all_points();

        check(v(Subset::singleton(s.zero())) == all, "V(0) = X".into());
        check(v(Subset::full(n)).is_empty(), "V(T) = ∅".into());
        for (a, &i) in ideals.iter().enumerate() {
            for &j in &ideals[a..] {
                check(
                    v(i).union(v(j)) == v(i.intersection(j)),
                    format!("V(I)∪V(J) = V(I∩J) for I={i:?}, J={j:?}"),
                );
                let sum = ideal::generated_ideal(t, i.union(j));
                check(
                    v(i).intersection(v(j)) == v(sum),
                    format!("V(I)∩V(J) = V(I+J) for I={i:?}, J={j:?}"),
                );
            }
        }
        for (a, &i) in ideals.iter().enumerate() {
            for (b, &j) in ideals.iter().enumerate().skip(a) {
                for &k in &ideals[b..] {
                    let sum = ideal::generated_ideal(t, i.union(j).union(k));
                    check(
                        v(i).intersection(v(j)).intersection(v(k)) == v(sum),
                        format!("V(I)∩V(J)∩V(K) = V(I+J+K) for {i:?}, {j:?}, {k:?}"),
                    );
                }
            }
        }
        for f in 0..n {
            for g in 0..n {
                check(
                    self.principal_open(f).points.intersection(self.principal_open(g).points)
                        == self.principal_open(s.mul(f, g)).points,
                    format!("D(f)∩D(g) = D(fg) for f={}, g={}", s.name(f), s.name(g)),
                );
            }
        }
        Ok(report)
    }

    /// Compares the topological and algebraic descriptions of the cover
    /// `D(f) ⊇? ⋃ D(fᵢ)`.
    ///
    /// Two equivalences are checked, each side computed independently:
    /// `D(f) ⊆ ⋃ D(fᵢ) ⟺ f ∈ rad⟨fs⟩`, and
    /// `D(f) = ⋃ D(fᵢ) ⟺ f ∈ rad⟨fs⟩ and every fᵢ ∈ rad⟨f⟩`.
    /// A disagreement is a consistency failure.
    pub fn check_standard_cover(&self, f: ElementId, fs: &[ElementId]) -> Result<CoverVerdict> {
        let t = &self.algebra;
        let s = t.semiring();
        s.check_index(f)?;
        for &g in fs {
            s.check_index(g)?;
        }
        let d_f = self.principal_open(f).points;
        let union = self.union_of_opens(fs);
        let covers = d_f.is_subset(union);
        let equal = d_f == union;

        let radical_member = ideal::radical(t, ideal::generated_by(t, fs))?.contains(f);
        let rad_f = ideal::radical(t, ideal::generated_by(t, &[f]))?;
        let refines = fs.iter().all(|&g| rad_f.contains(g));

        if covers != radical_member {
            return Err(Error::Consistency(format!(
                "cover test for f={} disagrees: D(f) ⊆ ⋃D(fᵢ) is {covers}, radical membership is {radical_member}",
                s.name(f)
            )));
        }
        if union.is_subset(d_f) != refines || equal != (radical_member && refines) {
            return Err(Error::Consistency(format!(
                "cover equality for f={} disagrees with the radical criterion",
                s.name(f)
            )));
        }
        Ok(CoverVerdict { covers, equal, radical_member, refines })
    }

    /// `P ↦ φ⁻¹(P)` from `Spec(S)` (this spectrum's target `xs`) back to
    /// `Spec(T)` (`self`), returned as a point map indexed by `xs`.
    ///
    /// Also verifies `(φ*)⁻¹(D(f)) = D(φ(f))` for every `f ∈ T`.
    pub fn comap_from(&self, phi: &[ElementId], xs: &Spectrum) -> Result<Vec<usize>> {
        let (t, s) = (&self.algebra, &xs.algebra);
        if !is_homomorphism(phi, t, s) {
            return Err(Error::Precondition("comap requires a ternary Γ-semiring homomorphism".into()));
        }
        let n = t.size();
        let mut map = Vec::with_capacity(xs.len());
        for (j, &q) in xs.primes.iter().enumerate() {
            let pre: Subset = (0..n).filter(|&x| q.contains(phi[x])).collect();
            let i = self.index_of(pre).ok_or_else(|| {
                Error::Consistency(format!("preimage of prime {} is not prime", xs.prime_label(j)))
            })?;
            map.push(i);
        }
        for f in 0..n {
            let d = self.principal_open(f).points;
            let pulled: Subset = (0..xs.len()).filter(|&j| d.contains(map[j])).collect();
            if pulled != xs.principal_open(phi[f]).points {
                return Err(Error::Consistency(format!(
                    "comap is not continuous at D({})",
                    t.semiring().name(f)
                )));
            }
        }
        Ok(map)
    }

    /// Covering pairs `(i, j)` with `P_i ⊊ P_j` and nothing strictly between.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let r = self.len();
        let strict = |i: usize, j: usize| i != j && self.containment[i][j];
        let mut out = Vec::new();
        for i in 0..r {
            for j in 0..r {
                if strict(i, j) && !(0..r).any(|k| strict(i, k) && strict(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Graphviz rendering of the Hasse diagram (directed, smaller prime to
    /// larger) or of the full comparability graph (undirected).
    pub fn to_dot(&self, hasse: bool) -> String {
        let mut out = String::new();
        let (kind, arrow) = if hasse { ("digraph", "->") } else { ("graph", "--") };
        let name = if hasse { "specialization" } else { "comparability" };
        writeln!(out, "{kind} {name} {{").unwrap();
        for i in 0..self.len() {
            writeln!(out, "  P{i} [label=\"P{i} = {}\"];", self.prime_label(i).replace('"', "\\\"")).unwrap();
        }
        let edges: Vec<(usize, usize)> = if hasse {
            self.hasse_edges()
        } else {
            let mut e = Vec::new();
            for i in 0..self.len() {
                for j in i + 1..self.len() {
                    if self.containment[i][j] || self.containment[j][i] {
                        e.push((i, j));
                    }
                }
            }
            e
        };
        for (i, j) in edges {
            writeln!(out, "  P{i} {arrow} P{j};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TopologyReport {
    pub instances: usize,
    pub failures: Vec<String>,
}

impl TopologyReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverVerdict {
    /// `D(f) ⊆ ⋃ D(fᵢ)`
    pub covers: bool,
    /// `D(f) = ⋃ D(fᵢ)`
    pub equal: bool,
    /// `f ∈ rad⟨f₁, …, fₙ⟩`
    pub radical_member: bool,
    /// every `fᵢ ∈ rad⟨f⟩`, i.e. each `D(fᵢ) ⊆ D(f)`
    pub refines: bool,
}

impl CoverVerdict {
    /// `D(f) = ⋃ D(fᵢ)`: the opens `D(fᵢ)` form a cover of `D(f)`.
    pub fn is_standard_cover(&self) -> bool {
        self.equal
    }
}

/// `f^N = a₁f₁ + ⋯ + aₙfₙ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerDecomposition {
    pub exponent: u32,
    pub coefficients: Vec<ElementId>,
}

impl PowerDecomposition {
    /// Re-evaluates both sides by table lookup.
    pub fn reproduces(&self, t: &TernaryGammaSemiring, f: ElementId, fs: &[ElementId]) -> bool {
        let s = t.semiring();
        let lhs = s.power(f, self.exponent).ok();
        let rhs = s.sum(self.coefficients.iter().zip(fs).map(|(&a, &g)| s.mul(a, g)));
        self.coefficients.len() == fs.len() && lhs == Some(rhs)
    }
}

/// Advances `c` as a base-`n` odometer, last position fastest.
pub(crate) fn next_tuple(c: &mut [usize], n: usize) -> bool {
    for pos in (0..c.len()).rev() {
        c[pos] += 1;
        if c[pos] < n {
            return true;
        }
        c[pos] = 0;
    }
    false
}

/// Searches increasing `N`, then coefficient tuples in lexicographic order,
/// for `f^N = Σ aᵢfᵢ`. Returns `None` when `f ∉ rad⟨fs⟩`.
pub fn find_power_decomposition(
    t: &TernaryGammaSemiring,
    f: ElementId,
    fs: &[ElementId],
) -> Result<Option<PowerDecomposition>> {
    let s = t.semiring();
    s.check_index(f)?;
    if fs.len() > MAX_COVER_GENERATORS {
        return Err(Error::Precondition(format!(
            "power decomposition search supports at most {MAX_COVER_GENERATORS} generators"
        )));
    }
    for &g in fs {
        s.check_index(g)?;
    }
    if !ideal::radical(t, ideal::generated_by(t, fs))?.contains(f) {
        return Ok(None);
    }
    let n = s.size();
    let powers = s.power_sequence(f);
    let mut coeffs = vec![0usize; fs.len()];
    for (k, &target) in powers.iter().enumerate() {
        coeffs.iter_mut().for_each(|c| *c = 0);
        loop {
            let value = s.sum(coeffs.iter().zip(fs).map(|(&a, &g)| s.mul(a, g)));
            if value == target {
                return Ok(Some(PowerDecomposition { exponent: k as u32 + 1, coefficients: coeffs }));
            }
            if !next_tuple(&mut coeffs, n) {
                break;
            }
        }
    }
    Err(Error::Consistency(format!(
        "{} lies in the radical but no power decomposition was found",
        s.name(f)
    )))
}
