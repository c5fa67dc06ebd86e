//! Fuzzy subsets with exact rational grades, α-cuts and sup-norm stability.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::bitset::Subset;
use crate::error::{Error, Result};
use crate::semiring::{ElementId, TernaryGammaSemiring};

pub type Grade = Rational64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzySubset {
    grades: Vec<Grade>,
}

impl FuzzySubset {
    pub fn new(grades: Vec<Grade>) -> Result<Self> {
        if let Some((x, g)) = grades.iter().enumerate().find(|(_, g)| **g < Grade::zero() || **g > Grade::one()) {
            return Err(Error::Input(format!("grade {g} of element {x} lies outside [0, 1]")));
        }
        Ok(FuzzySubset { grades })
    }

    pub fn constant(n: usize, g: Grade) -> Result<Self> {
        Self::new(vec![g; n])
    }

    /// 1 on `set`, 0 elsewhere.
    pub fn indicator(n: usize, set: Subset) -> Self {
        FuzzySubset { grades: (0..n).map(|x| if set.contains(x) { Grade::one() } else { Grade::zero() }).collect() }
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    pub fn grade(&self, x: ElementId) -> Grade {
        self.grades[x]
    }

    pub fn grades(&self) -> &[Grade] {
        &self.grades
    }

    /// Distinct grade values, ascending.
    pub fn levels(&self) -> Vec<Grade> {
        let mut v = self.grades.clone();
        v.sort();
        v.dedup();
        v
    }
}

/// `{x : μ(x) ≥ α}`; empty for `α > 1`, everything for `α ≤ 0`.
pub fn alpha_cut(mu: &FuzzySubset, alpha: Grade) -> Subset {
    if alpha > Grade::one() {
        return Subset::EMPTY;
    }
    if alpha <= Grade::zero() {
        return Subset::full(mu.len());
    }
    (0..mu.len()).filter(|&x| mu.grades[x] >= alpha).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FuzzyIdealViolation {
    ZeroGrade { grade: Grade },
    Additive { x: ElementId, y: ElementId },
    Ternary { x: ElementId, y: ElementId, z: ElementId, gamma: usize },
}

impl fmt::Display for FuzzyIdealViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuzzyIdealViolation::ZeroGrade { grade } => write!(f, "μ(0)=1 violated (μ(0) = {grade})"),
            FuzzyIdealViolation::Additive { x, y } => write!(f, "μ(x+y) ≥ min(μ(x), μ(y)) violated at x={x}, y={y}"),
            FuzzyIdealViolation::Ternary { x, y, z, gamma } => {
                write!(f, "μ({{x y z}}_γ) ≥ μ(x) violated at x={x}, y={y}, z={z}, γ={gamma}")
            }
        }
    }
}

/// First failure of the fuzzy Γ-ideal conditions, scanning all pairs, triples and `γ`.
pub fn fuzzy_ideal_violation(t: &TernaryGammaSemiring, mu: &FuzzySubset) -> Result<Option<FuzzyIdealViolation>> {
    let n = t.size();
    if mu.len() != n {
        return Err(Error::Precondition(format!("fuzzy subset has {} grades for a carrier of {n}", mu.len())));
    }
    let s = t.semiring();
    let zero_grade = mu.grade(s.zero());
    if zero_grade != Grade::one() {
        return Ok(Some(FuzzyIdealViolation::ZeroGrade { grade: zero_grade }));
    }
    for x in 0..n {
        for y in 0..n {
            if mu.grade(s.add(x, y)) < mu.grade(x).min(mu.grade(y)) {
                return Ok(Some(FuzzyIdealViolation::Additive { x, y }));
            }
        }
    }
    for gamma in 0..t.gamma().size() {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if mu.grade(t.bracket(x, y, z, gamma)) < mu.grade(x) {
                        return Ok(Some(FuzzyIdealViolation::Ternary { x, y, z, gamma }));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn is_fuzzy_gamma_ideal(t: &TernaryGammaSemiring, mu: &FuzzySubset) -> Result<bool> {
    Ok(fuzzy_ideal_violation(t, mu)?.is_none())
}

/// `max_x |μ(x) − ν(x)|`.
pub fn sup_distance(mu: &FuzzySubset, nu: &FuzzySubset) -> Result<Grade> {
    if mu.len() != nu.len() {
        return Err(Error::Precondition(format!("fuzzy subsets have {} and {} grades", mu.len(), nu.len())));
    }
    Ok(mu.grades.iter().zip(&nu.grades).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Grade::zero))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    /// `[μ]_{α+ε}`
    pub upper: Subset,
    /// `[ν]_α`
    pub middle: Subset,
    /// `[μ]_{α−ε}`
    pub lower: Subset,
}

impl StabilityReport {
    pub fn holds(&self) -> bool {
        self.upper.is_subset(self.middle) && self.middle.is_subset(self.lower)
    }
}

/// `[μ]_{α+ε} ⊆ [ν]_α ⊆ [μ]_{α−ε}` whenever `‖μ − ν‖∞ ≤ ε`.
pub fn verify_stability(mu: &FuzzySubset, nu: &FuzzySubset, alpha: Grade, epsilon: Grade) -> Result<StabilityReport> {
    let d = sup_distance(mu, nu)?;
    if epsilon < Grade::zero() || d > epsilon {
        return Err(Error::Precondition(format!("sup distance {d} exceeds ε = {epsilon}")));
    }
    let report = StabilityReport {
        upper: alpha_cut(mu, alpha + epsilon),
        middle: alpha_cut(nu, alpha),
        lower: alpha_cut(mu, alpha - epsilon),
    };
    if !report.holds() {
        return Err(Error::Consistency(format!(
            "α-cut inclusions fail at α = {alpha}, ε = {epsilon}: {:?} ⊆ {:?} ⊆ {:?}",
            report.upper, report.middle, report.lower
        )));
    }
    Ok(report)
}

/// Breakpoints where cuts can change: every grade of `μ` and `ν`, shifted by `±ε`.
pub fn alpha_grid(mu: &FuzzySubset, nu: &FuzzySubset, epsilon: Grade) -> Vec<Grade> {
    let mut out = Vec::new();
    for g in mu.grades.iter().chain(&nu.grades) {
        out.extend([*g, g + epsilon, g - epsilon]);
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::{enumerate_ideals, is_gamma_ideal};
    use crate::semiring::FiniteSemiring;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Grade {
        Grade::new(p, q)
    }

    fn tgs(s: FiniteSemiring) -> TernaryGammaSemiring {
        TernaryGammaSemiring::with_trivial_gamma(s)
    }

    fn graded(g: &[(i64, i64)]) -> FuzzySubset {
        FuzzySubset::new(g.iter().map(|&(p, q)| r(p, q)).collect()).unwrap()
    }

    #[test]
    fn cuts_of_constants() {
        let one = FuzzySubset::constant(3, r(1, 1)).unwrap();
        assert_eq!(alpha_cut(&one, r(1, 3)), Subset::full(3));
        let zero = FuzzySubset::constant(3, r(0, 1)).unwrap();
        assert_eq!(alpha_cut(&zero, r(1, 1)), Subset::EMPTY);
        assert_eq!(alpha_cut(&one, r(3, 2)), Subset::EMPTY);
        assert_eq!(alpha_cut(&zero, r(0, 1)), Subset::full(3));
    }

    #[test]
    fn chain3_example() {
        let t = tgs(FiniteSemiring::chain(3).unwrap());
        let mu = graded(&[(1, 1), (1, 2), (0, 1)]);
        assert_eq!(alpha_cut(&mu, r(1, 2)), Subset::from_iter([0, 1]));
        assert!(is_fuzzy_gamma_ideal(&t, &mu).unwrap());

        let nu = graded(&[(1, 1), (3, 5), (1, 10)]);
        assert_eq!(sup_distance(&mu, &nu).unwrap(), r(1, 10));
        assert!(verify_stability(&mu, &nu, r(1, 2), r(1, 10)).unwrap().holds());
        assert!(matches!(verify_stability(&mu, &nu, r(1, 2), r(1, 20)), Err(Error::Precondition(_))));
    }

    #[test]
    fn indicator_of_crisp_ideal() {
        let t = tgs(FiniteSemiring::chain(3).unwrap());
        let mu = FuzzySubset::indicator(3, Subset::from_iter([0, 1]));
        assert!(is_fuzzy_gamma_ideal(&t, &mu).unwrap());
        let not_ideal = FuzzySubset::indicator(3, Subset::from_iter([0, 2]));
        assert!(!is_fuzzy_gamma_ideal(&t, &not_ideal).unwrap());
    }

    #[test]
    fn zero_grade_witness() {
        let t = tgs(FiniteSemiring::chain(3).unwrap());
        let mu = graded(&[(1, 2), (1, 2), (0, 1)]);
        let w = fuzzy_ideal_violation(&t, &mu).unwrap().unwrap();
        assert_eq!(w, FuzzyIdealViolation::ZeroGrade { grade: r(1, 2) });
        assert!(w.to_string().starts_with("μ(0)=1 violated"));
    }

    #[test]
    fn out_of_range_grades_rejected() {
        assert!(FuzzySubset::new(vec![r(3, 2)]).is_err());
        assert!(FuzzySubset::new(vec![r(-1, 2)]).is_err());
    }

    #[test]
    fn crisp_indicators_match_crisp_ideals() {
        let t = tgs(FiniteSemiring::boolean_power(2).unwrap());
        for bits in 0u64..16 {
            let set = Subset::from_bits(bits);
            let fuzzy = is_fuzzy_gamma_ideal(&t, &FuzzySubset::indicator(4, set)).unwrap();
            assert_eq!(fuzzy, is_gamma_ideal(&t, set), "{set:?}");
        }
    }

    /// Every fuzzy ideal with grades in {0, 1/2, 1} has ideal cuts.
    #[test]
    fn fuzzy_ideal_cuts_are_ideals() {
        let grid = [r(0, 1), r(1, 2), r(1, 1)];
        let fixtures = [
            FiniteSemiring::chain(4).unwrap(),
            FiniteSemiring::boolean_power(2).unwrap(),
            FiniteSemiring::chain(3).unwrap().product_with(&FiniteSemiring::boolean()).unwrap(),
        ];
        for s in fixtures {
            let t = tgs(s);
            let n = t.size();
            let ideals = enumerate_ideals(&t).unwrap();
            let mut found = 0;
            for code in 0..3usize.pow(n as u32) {
                let grades = (0..n).map(|i| grid[code / 3usize.pow(i as u32) % 3]).collect();
                let mu = FuzzySubset::new(grades).unwrap();
                if !is_fuzzy_gamma_ideal(&t, &mu).unwrap() {
                    continue;
                }
                found += 1;
                for alpha in [r(1, 4), r(1, 2), r(3, 4), r(1, 1)] {
                    let cut = alpha_cut(&mu, alpha);
                    if !cut.is_empty() {
                        assert!(ideals.contains(&cut), "{cut:?}");
                    }
                }
            }
            assert!(found > 1);
        }
    }

    fn grades(n: usize) -> impl Strategy<Value = Vec<Grade>> {
        proptest::collection::vec((0i64..=12).prop_map(|p| r(p, 12)), n)
    }

    proptest! {
        #[test]
        fn cuts_are_antitone(mu in grades(6), a in 0i64..=14, b in 0i64..=14) {
            let mu = FuzzySubset::new(mu).unwrap();
            let (lo, hi) = (r(a.min(b), 12), r(a.max(b), 12));
            prop_assert!(alpha_cut(&mu, hi).is_subset(alpha_cut(&mu, lo)));
        }

        #[test]
        fn stability_on_grid(mu in grades(6), shifts in proptest::collection::vec(-3i64..=3, 6), eps in 0i64..=4) {
            let epsilon = r(eps, 12);
            let nu: Vec<Grade> = mu
                .iter()
                .zip(&shifts)
                .map(|(g, &s)| {
                    let s = r(s.clamp(-eps, eps), 12);
                    (g + s).clamp(Grade::zero(), Grade::one())
                })
                .collect();
            let mu = FuzzySubset::new(mu).unwrap();
            let nu = FuzzySubset::new(nu).unwrap();
            for alpha in alpha_grid(&mu, &nu, epsilon) {
                prop_assert!(verify_stability(&mu, &nu, alpha, epsilon).unwrap().holds());
            }
        }
    }
}
