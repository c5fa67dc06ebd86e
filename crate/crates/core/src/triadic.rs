//! The triadic bracket `(s₁, s₂, s₃) ↦ s₁s₂s₃·u_γ` on section semirings,
//! the idempotent Filippov identity, and Γ-automorphisms.

use crate::error::{Error, Result};
use crate::semiring::{ElementId, TernaryGammaSemiring};
use crate::sheaf::StructureSheaf;
use crate::spectrum::Spectrum;

/// Default carrier cap for the factorial automorphism search.
pub const AUTOMORPHISM_CAP: usize = 8;

/// Bracket on any ternary Γ-semiring: the base, a localization
/// (`LocalizedSemiring::algebra`) or a stalk.
pub fn triadic_bracket(a: &TernaryGammaSemiring, s1: ElementId, s2: ElementId, s3: ElementId, gamma: usize) -> Result<ElementId> {
    a.ternary_product(s1, s2, s3, gamma)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilippovStatus {
    /// Addition is not idempotent; the identity is not asserted.
    HypothesisNotMet,
    Holds { tuples: usize },
    Violated { tuple: [ElementId; 5], gamma: usize },
}

impl FilippovStatus {
    /// `true` unless a violation was found.
    pub fn is_ok(&self) -> bool {
        !matches!(self, FilippovStatus::Violated { .. })
    }
}

/// Exhaustively evaluates
/// `[x₁,x₂,[y₁,y₂,y₃]] = [[x₁,x₂,y₁],y₂,y₃] + [y₁,[x₁,x₂,y₂],y₃] + [y₁,y₂,[x₁,x₂,y₃]]`
/// over all 5-tuples and every `γ`.
pub fn verify_filippov(a: &TernaryGammaSemiring) -> FilippovStatus {
    let s = a.semiring();
    if !s.is_idempotent() {
        return FilippovStatus::HypothesisNotMet;
    }
    let n = s.size();
    let mut tuples = 0;
    for g in 0..a.gamma().size() {
        let br = |p, q, r| a.bracket(p, q, r, g);
        for x1 in 0..n {
            for x2 in 0..n {
                for y1 in 0..n {
                    for y2 in 0..n {
                        for y3 in 0..n {
                            let lhs = br(x1, x2, br(y1, y2, y3));
                            let rhs = s.sum([
                                br(br(x1, x2, y1), y2, y3),
                                br(y1, br(x1, x2, y2), y3),
                                br(y1, y2, br(x1, x2, y3)),
                            ]);
                            tuples += 1;
                            if lhs != rhs {
                                return FilippovStatus::Violated { tuple: [x1, x2, y1, y2, y3], gamma: g };
                            }
                        }
                    }
                }
            }
        }
    }
    FilippovStatus::Holds { tuples }
}

/// Bracket-then-restrict equals restrict-then-bracket along `ρ_{f,g}`,
/// over all triples in `T_f`.
pub fn verify_restriction_compat(sheaf: &StructureSheaf, f: ElementId, g: ElementId, gamma: usize) -> Result<bool> {
    let rho = sheaf.restriction(f, g)?;
    let (af, ag) = (sheaf.sections(f).algebra(), sheaf.sections(g).algebra());
    if gamma >= af.gamma().size() {
        return Err(Error::OutOfRange { index: gamma, size: af.gamma().size() });
    }
    let n = af.size();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if rho[af.bracket(a, b, c, gamma)] != ag.bracket(rho[a], rho[b], rho[c], gamma) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A carrier permutation preserving `+`, `·`, `0`, `1` and every `u_γ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GammaAutomorphism {
    map: Vec<ElementId>,
}

impl GammaAutomorphism {
    pub fn identity(n: usize) -> Self {
        GammaAutomorphism { map: (0..n).collect() }
    }

    /// Validates `map` against `t`.
    pub fn new(t: &TernaryGammaSemiring, map: Vec<ElementId>) -> Result<Self> {
        if map.len() != t.size() || !crate::semiring::is_permutation(&map) {
            return Err(Error::Precondition("automorphism must permute the carrier".into()));
        }
        if !crate::semiring::is_homomorphism(&map, t, t) {
            return Err(Error::Precondition("permutation is not a Γ-semiring homomorphism".into()));
        }
        Ok(GammaAutomorphism { map })
    }

    pub fn map(&self) -> &[ElementId] {
        &self.map
    }

    pub fn apply(&self, x: ElementId) -> ElementId {
        self.map[x]
    }

    pub fn compose(&self, other: &GammaAutomorphism) -> GammaAutomorphism {
        GammaAutomorphism { map: other.map.iter().map(|&x| self.map[x]).collect() }
    }

    pub fn inverse(&self) -> GammaAutomorphism {
        let mut inv = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        GammaAutomorphism { map: inv }
    }
}

pub fn enumerate_gamma_automorphisms(t: &TernaryGammaSemiring) -> Result<Vec<GammaAutomorphism>> {
    enumerate_gamma_automorphisms_with_cap(t, AUTOMORPHISM_CAP)
}

/// Backtracking over partial permutations with `0`, `1` and each `u_γ`
/// pinned, pruning on any table entry already fully mapped.
pub fn enumerate_gamma_automorphisms_with_cap(t: &TernaryGammaSemiring, cap: usize) -> Result<Vec<GammaAutomorphism>> {
    let n = t.size();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let s = t.semiring();
    let mut fixed = vec![None; n];
    fixed[s.zero()] = Some(s.zero());
    fixed[s.one()] = Some(s.one());
    for &u in t.units() {
        fixed[u] = Some(u);
    }

    struct Search<'a> {
        t: &'a TernaryGammaSemiring,
        fixed: Vec<Option<usize>>,
        map: Vec<usize>,
        used: Vec<bool>,
        out: Vec<GammaAutomorphism>,
    }

    impl Search<'_> {
        /// Every `+`/`·` entry whose arguments and result are all mapped.
        fn consistent(&self, upto: usize) -> bool {
            let s = self.t.semiring();
            let m = &self.map;
            (0..=upto).all(|a| {
                (0..=upto).all(|b| {
                    let sum = s.add(a, b);
                    let prod = s.mul(a, b);
                    (sum > upto || m[sum] == s.add(m[a], m[b])) && (prod > upto || m[prod] == s.mul(m[a], m[b]))
                })
            })
        }

        fn run(&mut self, k: usize) {
            let n = self.map.len();
            if k == n {
                self.out.push(GammaAutomorphism { map: self.map.clone() });
                return;
            }
            let candidates: Vec<usize> = match self.fixed[k] {
                Some(v) => vec![v],
                None => (0..n).filter(|&v| !self.used[v] && !self.fixed.contains(&Some(v))).collect(),
            };
            for v in candidates {
                if self.used[v] {
                    continue;
                }
                self.map[k] = v;
                self.used[v] = true;
                if self.consistent(k) {
                    self.run(k + 1);
                }
                self.used[v] = false;
            }
        }
    }

    let mut search = Search { t, fixed, map: vec![0; n], used: vec![false; n], out: Vec::new() };
    search.run(0);
    let autos = search.out;

    for a in &autos {
        if !crate::semiring::is_homomorphism(a.map(), t, t) {
            return Err(Error::Consistency("search produced a non-homomorphism".into()));
        }
        for b in &autos {
            if !autos.contains(&a.compose(b)) {
                return Err(Error::Consistency("automorphisms are not closed under composition".into()));
            }
        }
        if !autos.contains(&a.inverse()) {
            return Err(Error::Consistency("automorphisms are not closed under inverses".into()));
        }
    }
    Ok(autos)
}

/// The induced action on the spectrum together with its checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionReport {
    /// Point `i` maps to `point_map[i]`.
    pub point_map: Vec<usize>,
    pub preserves_containment: bool,
    pub preserves_bracket: bool,
}

impl ActionReport {
    pub fn holds(&self) -> bool {
        self.preserves_containment && self.preserves_bracket
    }
}

/// `P ↦ σ⁻¹(P)` on points, with the homeomorphism and bracket checks.
pub fn automorphism_action(sigma: &GammaAutomorphism, x: &Spectrum) -> Result<ActionReport> {
    let t = x.algebra();
    let n = t.size();
    if sigma.map().len() != n {
        return Err(Error::Precondition("automorphism acts on a different carrier".into()));
    }
    let mut point_map = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let p = x.prime(i);
        let pre: crate::bitset::Subset = (0..n).filter(|&y| p.contains(sigma.apply(y))).collect();
        let j = x
            .index_of(pre)
            .ok_or_else(|| Error::Consistency(format!("σ⁻¹({}) is not prime", x.prime_label(i))))?;
        point_map.push(j);
    }
    let preserves_containment = crate::semiring::is_permutation(&point_map)
        && (0..x.len()).all(|i| (0..x.len()).all(|j| x.contains(i, j) == x.contains(point_map[i], point_map[j])));
    let preserves_bracket = (0..t.gamma().size()).all(|g| {
        (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).all(|c| {
                    sigma.apply(t.bracket(a, b, c, g))
                        == t.bracket(sigma.apply(a), sigma.apply(b), sigma.apply(c), g)
                })
            })
        })
    });
    Ok(ActionReport { point_map, preserves_containment, preserves_bracket })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::FiniteSemiring;

    fn chain(n: usize) -> TernaryGammaSemiring {
        TernaryGammaSemiring::with_trivial_gamma(FiniteSemiring::chain(n).unwrap())
    }

    fn bb() -> TernaryGammaSemiring {
        TernaryGammaSemiring::with_trivial_gamma(FiniteSemiring::boolean_power(2).unwrap())
    }

    fn brute_force_automorphisms(t: &TernaryGammaSemiring) -> Vec<Vec<usize>> {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let mut out: Vec<Vec<usize>> = perms(t.size())
            .into_iter()
            .filter(|p| crate::semiring::is_homomorphism(p, t, t))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn bracket_examples() {
        let t = chain(3);
        let sh = StructureSheaf::new(&t).unwrap();
        let te = sh.sections(1).algebra();
        // In T_e the nonzero classes are e/1 ~ 1/1; bracket of units is the unit class.
        let one = te.semiring().one();
        assert_eq!(triadic_bracket(te, one, one, one, 0).unwrap(), one);
        for a in 0..3 {
            assert_eq!(triadic_bracket(&t, 0, a, 2, 0).unwrap(), 0);
            for b in 0..3 {
                for c in 0..3 {
                    assert_eq!(triadic_bracket(&t, a, b, c, 0).unwrap(), t.ternary_product(a, b, c, 0).unwrap());
                }
            }
        }
    }

    #[test]
    fn bracket_is_symmetric() {
        let t = TernaryGammaSemiring::with_constant_units(FiniteSemiring::chain(4).unwrap(), 2);
        for g in 0..2 {
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        let v = t.bracket(a, b, c, g);
                        for (p, q, r) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                            assert_eq!(t.bracket(p, q, r, g), v);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn filippov_examples() {
        assert_eq!(verify_filippov(&chain(4)), FilippovStatus::Holds { tuples: 1024 });
        assert_eq!(verify_filippov(&bb()), FilippovStatus::Holds { tuples: 1024 });
        let z3 = TernaryGammaSemiring::with_trivial_gamma(
            FiniteSemiring::from_fn((0..3).map(|i| i.to_string()).collect(), 0, 1, |a, b| (a + b) % 3, |a, b| (a * b) % 3)
                .unwrap(),
        );
        assert_eq!(verify_filippov(&z3), FilippovStatus::HypothesisNotMet);
    }

    #[test]
    fn filippov_fails_without_idempotence_when_forced() {
        // In Z/3 the three right-hand terms sum to 0 while the left is 1.
        let z3 = FiniteSemiring::from_fn((0..3).map(|i| i.to_string()).collect(), 0, 1, |a, b| (a + b) % 3, |a, b| (a * b) % 3)
            .unwrap();
        let lhs = z3.mul(1, z3.mul(1, 1));
        let rhs = z3.sum([1, 1, 1]);
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn restriction_compat_examples() {
        let sh = StructureSheaf::new(&chain(3)).unwrap();
        assert!(verify_restriction_compat(&sh, 1, 1, 0).unwrap());
        assert!(verify_restriction_compat(&sh, 2, 1, 0).unwrap());
        let sh = StructureSheaf::new(&bb()).unwrap();
        assert!(verify_restriction_compat(&sh, 3, 2, 0).unwrap());
    }

    #[test]
    fn automorphism_examples() {
        for n in [3, 4] {
            let t = chain(n);
            let autos = enumerate_gamma_automorphisms(&t).unwrap();
            assert_eq!(autos, vec![GammaAutomorphism::identity(n)]);
            assert_eq!(brute_force_automorphisms(&t).len(), 1);
        }
        let t = bb();
        let autos = enumerate_gamma_automorphisms(&t).unwrap();
        let maps: Vec<Vec<usize>> = autos.iter().map(|a| a.map().to_vec()).collect();
        assert_eq!(maps, vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]);
        assert_eq!(maps, brute_force_automorphisms(&t));
    }

    #[test]
    fn automorphism_search_matches_brute_force() {
        let b3 = TernaryGammaSemiring::with_trivial_gamma(FiniteSemiring::boolean_power(3).unwrap());
        let mut found: Vec<Vec<usize>> = enumerate_gamma_automorphisms(&b3)
            .unwrap()
            .iter()
            .map(|a| a.map().to_vec())
            .collect();
        found.sort();
        assert_eq!(found.len(), 6);
        assert_eq!(found, brute_force_automorphisms(&b3));
        let c3b = TernaryGammaSemiring::with_trivial_gamma(
            FiniteSemiring::chain(3).unwrap().product_with(&FiniteSemiring::boolean()).unwrap(),
        );
        let mut found: Vec<Vec<usize>> =
            enumerate_gamma_automorphisms(&c3b).unwrap().iter().map(|a| a.map().to_vec()).collect();
        found.sort();
        assert_eq!(found, brute_force_automorphisms(&c3b));
    }

    #[test]
    fn automorphism_cap() {
        let t = chain(9);
        assert!(matches!(enumerate_gamma_automorphisms(&t), Err(Error::CapExceeded { .. })));
        assert_eq!(enumerate_gamma_automorphisms_with_cap(&t, 9).unwrap().len(), 1);
    }

    #[test]
    fn action_examples() {
        let t = bb();
        let x = Spectrum::new(&t).unwrap();
        let id = automorphism_action(&GammaAutomorphism::identity(4), &x).unwrap();
        assert_eq!(id.point_map, vec![0, 1]);
        let swap = GammaAutomorphism::new(&t, vec![0, 2, 1, 3]).unwrap();
        let r = automorphism_action(&swap, &x).unwrap();
        assert_eq!(r.point_map, vec![1, 0]);
        assert!(r.holds());

        let c4 = chain(4);
        let x = Spectrum::new(&c4).unwrap();
        let r = automorphism_action(&GammaAutomorphism::identity(4), &x).unwrap();
        assert_eq!(r.point_map, vec![0, 1, 2]);
        assert!(GammaAutomorphism::new(&c4, vec![0, 2, 1, 3]).is_err());
    }
}
