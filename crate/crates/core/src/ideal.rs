//! Γ-ideals as carrier subsets: closure, radicals, primality and
//! exhaustive enumeration.
//!
//! Because every `u_γ` is a unit, a subset absorbs all ternary products
//! `{a b c}_γ` exactly when it absorbs ordinary products, so Γ-ideals are
//! checked as plain semiring ideals. The ternary conditions are kept as
//! separate predicates and cross-checked in tests.

use crate::bitset::Subset;
use crate::error::{Error, Result};
use crate::semiring::{ElementId, TernaryGammaSemiring};

/// Default carrier size up to which ideals are enumerated exhaustively.
pub const DEFAULT_ENUM_CAP: usize = 16;
/// Hard ceiling for any cap override.
pub const MAX_ENUM_CAP: usize = 20;

/// Membership set over the carrier of a fixed semiring.
pub type IdealSubset = Subset;

pub fn is_gamma_ideal(t: &TernaryGammaSemiring, i: IdealSubset) -> bool {
    let s = t.semiring();
    let n = s.size();
    if !i.is_subset(Subset::full(n)) || !i.contains(s.zero()) {
        return false;
    }
    i.iter().all(|a| {
        i.iter().all(|b| i.contains(s.add(a, b))) && (0..n).all(|x| i.contains(s.mul(x, a)))
    })
}

/// The Γ-ideal condition stated with ternary products: `{a b c}_γ ∈ I`
/// for every `a ∈ I`, all `b, c` and all `γ`.
pub fn absorbs_ternary_products(t: &TernaryGammaSemiring, i: IdealSubset) -> bool {
    let n = t.size();
    i.iter().all(|a| {
        (0..n).all(|b| (0..n).all(|c| (0..t.gamma().size()).all(|g| i.contains(t.bracket(a, b, c, g)))))
    })
}

/// Least ideal containing `e`, computed as a fixed point of sums and
/// multiples starting from `e ∪ {0}`.
pub fn generated_ideal(t: &TernaryGammaSemiring, e: Subset) -> IdealSubset {
    let s = t.semiring();
    let n = s.size();
    let mut cur = e.intersection(Subset::full(n)).with(s.zero());
    loop {
        let mut next = cur;
        for a in cur.iter() {
            for b in cur.iter() {
                next.insert(s.add(a, b));
            }
            for x in 0..n {
                next.insert(s.mul(x, a));
            }
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

pub fn generated_by(t: &TernaryGammaSemiring, gens: &[ElementId]) -> IdealSubset {
    generated_ideal(t, gens.iter().copied().collect())
}

/// `{x : xⁿ ∈ I for some n ≥ 1}`.
pub fn radical(t: &TernaryGammaSemiring, i: IdealSubset) -> Result<IdealSubset> {
    if !is_gamma_ideal(t, i) {
        return Err(Error::Precondition("radical requires an ideal".into()));
    }
    let s = t.semiring();
    Ok((0..s.size())
        .filter(|&x| s.power_sequence(x).iter().any(|&p| i.contains(p)))
        .collect())
}

/// Binary primality: proper, and `xy ∈ P` forces `x ∈ P` or `y ∈ P`.
pub fn is_prime(t: &TernaryGammaSemiring, p: IdealSubset) -> bool {
    let s = t.semiring();
    let n = s.size();
    if !is_gamma_ideal(t, p) || p == Subset::full(n) {
        return false;
    }
    (0..n).all(|x| p.contains(x) || (0..n).all(|y| p.contains(y) || !p.contains(s.mul(x, y))))
}

/// Ternary primality: proper, and `{a b c}_γ ∈ P` forces one of `a, b, c`
/// into `P`.
pub fn is_prime_ternary(t: &TernaryGammaSemiring, p: IdealSubset) -> bool {
    let n = t.size();
    if !is_gamma_ideal(t, p) || p == Subset::full(n) {
        return false;
    }
    let outside: Vec<usize> = p.complement(n).iter().collect();
    outside.iter().all(|&a| {
        outside.iter().all(|&b| {
            outside
                .iter()
                .all(|&c| (0..t.gamma().size()).all(|g| !p.contains(t.bracket(a, b, c, g))))
        })
    })
}

fn check_cap(t: &TernaryGammaSemiring, cap: usize) -> Result<()> {
    let cap = cap.min(MAX_ENUM_CAP);
    if t.size() > cap {
        return Err(Error::CapExceeded { size: t.size(), cap });
    }
    Ok(())
}

/// Every ideal, in ascending bitset order.
pub fn enumerate_ideals(t: &TernaryGammaSemiring) -> Result<Vec<IdealSubset>> {
    enumerate_ideals_with_cap(t, DEFAULT_ENUM_CAP)
}

pub fn enumerate_ideals_with_cap(t: &TernaryGammaSemiring, cap: usize) -> Result<Vec<IdealSubset>> {
    check_cap(t, cap)?;
    let s = t.semiring();
    let n = s.size();
    let zero_bit = 1u64 << s.zero();
    // Only subsets containing zero are candidates.
    let others: Vec<usize> = (0..n).filter(|&x| x != s.zero()).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << others.len() {
        let mut bits = zero_bit;
        for (k, &x) in others.iter().enumerate() {
            if mask >> k & 1 == 1 {
                bits |= 1 << x;
            }
        }
        let cand = Subset::from_bits(bits);
        if is_gamma_ideal(t, cand) {
            out.push(cand);
        }
    }
    out.sort();
    Ok(out)
}

pub fn enumerate_primes(t: &TernaryGammaSemiring) -> Result<Vec<IdealSubset>> {
    enumerate_primes_with_cap(t, DEFAULT_ENUM_CAP)
}

pub fn enumerate_primes_with_cap(t: &TernaryGammaSemiring, cap: usize) -> Result<Vec<IdealSubset>> {
    Ok(enumerate_ideals_with_cap(t, cap)?
        .into_iter()
        .filter(|&p| is_prime(t, p))
        .collect())
}

/// Outcome of comparing a radical with the intersection of the primes
/// above it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalCheck {
    pub radical: IdealSubset,
    pub prime_intersection: IdealSubset,
    /// An element in exactly one of the two sets.
    pub witness: Option<ElementId>,
}

impl RadicalCheck {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Computes `radical(I)` and `⋂ {P prime : I ⊆ P}` independently.
/// The empty intersection is the full carrier.
pub fn verify_radical_lemma(t: &TernaryGammaSemiring, i: IdealSubset) -> Result<RadicalCheck> {
    verify_radical_lemma_with_primes(t, i, &enumerate_primes(t)?)
}

pub fn verify_radical_lemma_with_primes(
    t: &TernaryGammaSemiring,
    i: IdealSubset,
    primes: &[IdealSubset],
) -> Result<RadicalCheck> {
    let rad = radical(t, i)?;
    let n = t.size();
    let inter = primes
        .iter()
        .filter(|p| i.is_subset(**p))
        .fold(Subset::full(n), |acc, &p| acc.intersection(p));
    let diff = Subset::from_bits(rad.bits() ^ inter.bits());
    Ok(RadicalCheck { radical: rad, prime_intersection: inter, witness: diff.iter().next() })
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

    fn set(xs: &[usize]) -> Subset {
        xs.iter().copied().collect()
    }

    #[test]
    fn ideal_membership_examples() {
        let t = chain(3);
        assert!(is_gamma_ideal(&t, set(&[0])));
        assert!(!is_gamma_ideal(&t, set(&[0, 2])));
        assert!(is_gamma_ideal(&t, set(&[0, 1, 2])));
        assert!(!is_gamma_ideal(&t, set(&[1])));
    }

    #[test]
    fn generated_ideal_examples() {
        let t = chain(3);
        assert_eq!(generated_by(&t, &[1]), set(&[0, 1]));
        assert_eq!(generated_by(&t, &[]), set(&[0]));
        assert_eq!(generated_by(&t, &[2]), set(&[0, 1, 2]));
    }

    #[test]
    fn generated_ideal_matches_intersection_of_ideals() {
        for t in [chain(3), chain(4), bb()] {
            let ideals = enumerate_ideals(&t).unwrap();
            for bits in 0..1u64 << t.size() {
                let e = Subset::from_bits(bits);
                let oracle = ideals
                    .iter()
                    .filter(|i| e.is_subset(**i))
                    .fold(Subset::full(t.size()), |acc, &i| acc.intersection(i));
                assert_eq!(generated_ideal(&t, e), oracle);
            }
        }
    }

    #[test]
    fn radical_examples() {
        let t = bb();
        assert_eq!(radical(&t, set(&[0, 2])).unwrap(), set(&[0, 2]));
        assert!(radical(&t, set(&[1])).is_err());
        for t in [chain(4), bb()] {
            for i in enumerate_ideals(&t).unwrap() {
                assert_eq!(radical(&t, i).unwrap(), i);
            }
        }
    }

    #[test]
    fn radical_in_non_idempotent_semiring() {
        // Z/4 with x ↦ x² sending 2 to 0: radical({0}) = {0, 2}.
        let z4 = FiniteSemiring::from_fn(
            (0..4).map(|i| i.to_string()).collect(),
            0,
            1,
            |a, b| (a + b) % 4,
            |a, b| (a * b) % 4,
        )
        .unwrap();
        let t = TernaryGammaSemiring::with_trivial_gamma(z4);
        assert_eq!(radical(&t, set(&[0])).unwrap(), set(&[0, 2]));
        assert!(verify_radical_lemma(&t, set(&[0])).unwrap().holds());
    }

    #[test]
    fn primality_examples() {
        let t = chain(3);
        assert!(is_prime(&t, set(&[0, 1])));
        assert!(!is_prime(&t, set(&[0, 1, 2])));
        assert!(!is_prime(&bb(), set(&[0])));
    }

    #[test]
    fn primes_of_worked_examples() {
        assert_eq!(enumerate_primes(&chain(3)).unwrap(), vec![set(&[0]), set(&[0, 1])]);
        assert_eq!(enumerate_primes(&bb()).unwrap(), vec![set(&[0, 1]), set(&[0, 2])]);
        assert_eq!(
            enumerate_primes(&chain(4)).unwrap(),
            vec![set(&[0]), set(&[0, 1]), set(&[0, 1, 2])]
        );
    }

    #[test]
    fn ternary_and_binary_primality_agree() {
        let z3 = FiniteSemiring::from_fn(
            (0..3).map(|i| i.to_string()).collect(),
            0,
            1,
            |a, b| (a + b) % 3,
            |a, b| (a * b) % 3,
        )
        .unwrap();
        let with_units = TernaryGammaSemiring::new(z3, crate::semiring::FiniteGroup::cyclic(2), vec![1, 2]).unwrap();
        for t in [chain(3), chain(4), bb(), with_units] {
            for i in enumerate_ideals(&t).unwrap() {
                assert_eq!(is_prime(&t, i), is_prime_ternary(&t, i));
                assert!(absorbs_ternary_products(&t, i));
            }
        }
    }

    #[test]
    fn radical_lemma_examples() {
        let c = verify_radical_lemma(&chain(4), set(&[0])).unwrap();
        assert!(c.holds());
        assert_eq!(c.radical, set(&[0]));
        let c = verify_radical_lemma(&bb(), set(&[0])).unwrap();
        assert!(c.holds());
        assert_eq!(c.prime_intersection, set(&[0]));
        let full = Subset::full(4);
        let c = verify_radical_lemma(&bb(), full).unwrap();
        assert!(c.holds());
        assert_eq!(c.prime_intersection, full);
    }

    #[test]
    fn cap_is_enforced() {
        let big = TernaryGammaSemiring::with_trivial_gamma(FiniteSemiring::chain(17).unwrap());
        assert!(matches!(enumerate_ideals(&big), Err(Error::CapExceeded { .. })));
        assert!(enumerate_ideals_with_cap(&big, 18).is_ok());
        let huge = TernaryGammaSemiring::with_trivial_gamma(FiniteSemiring::chain(21).unwrap());
        assert!(matches!(
            enumerate_ideals_with_cap(&huge, 64),
            Err(Error::CapExceeded { cap: MAX_ENUM_CAP, .. })
        ));
    }
}
