//! Finite commutative semirings, finite commutative groups and the
//! ternary Γ-structure built from a unit map `u: Γ → T×`.
//!
//! Carriers are dense indices `0..n` with a side table of display names;
//! every operation is a table lookup.

use std::fmt;

use crate::error::{Error, Result};

/// Index of a carrier element.
pub type ElementId = usize;

/// Largest carrier for which exhaustive axiom checks are run.
pub const CARRIER_CAP: usize = 64;

/// Raw, unvalidated semiring tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiringTables {
    pub names: Vec<String>,
    pub add: Vec<Vec<ElementId>>,
    pub mul: Vec<Vec<ElementId>>,
    pub zero: ElementId,
    pub one: ElementId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    AddAssociative,
    AddCommutative,
    AddIdentity,
    MulAssociative,
    MulCommutative,
    MulIdentity,
    Distributive,
    ZeroAbsorbing,
    GroupAssociative,
    GroupCommutative,
    GroupIdentity,
    GroupInverse,
    UnitNotInvertible,
    UnitNotMultiplicative,
    UnitIdentityNotOne,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::AddAssociative => "addition is associative",
            Axiom::AddCommutative => "addition is commutative",
            Axiom::AddIdentity => "zero is an additive identity",
            Axiom::MulAssociative => "multiplication is associative",
            Axiom::MulCommutative => "multiplication is commutative",
            Axiom::MulIdentity => "one is a multiplicative identity",
            Axiom::Distributive => "multiplication distributes over addition",
            Axiom::ZeroAbsorbing => "zero is absorbing",
            Axiom::GroupAssociative => "group operation is associative",
            Axiom::GroupCommutative => "group operation is commutative",
            Axiom::GroupIdentity => "identity is neutral",
            Axiom::GroupInverse => "every element has an inverse",
            Axiom::UnitNotInvertible => "u(γ) is a unit",
            Axiom::UnitNotMultiplicative => "u is multiplicative",
            Axiom::UnitIdentityNotOne => "u(identity) = one",
        }
    }
}

/// One failing instance of an axiom, with the tuple that witnesses it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {:?}", self.axiom.name(), self.witness)
    }
}

fn check_square(name: &str, table: &[Vec<usize>], n: usize) -> Result<()> {
    if table.len() != n {
        return Err(Error::Malformed(format!(
            "{name} table has {} rows, expected {n}",
            table.len()
        )));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Malformed(format!(
                "{name} table row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        if let Some(&bad) = row.iter().find(|&&x| x >= n) {
            return Err(Error::Malformed(format!(
                "{name} table row {i} contains out-of-range index {bad}"
            )));
        }
    }
    Ok(())
}

fn check_names(names: &[String]) -> Result<()> {
    for (i, a) in names.iter().enumerate() {
        if names[..i].contains(a) {
            return Err(Error::Malformed(format!("duplicate element name {a:?}")));
        }
    }
    Ok(())
}

/// Lists every violated semiring axiom instance.
///
/// Structural problems (ragged tables, out-of-range indices) are reported
/// as `Err`; an `Ok` with an empty list means the tables form a
/// commutative semiring with absorbing zero.
pub fn validate_semiring(t: &SemiringTables) -> Result<Vec<Violation>> {
    let n = t.names.len();
    if n == 0 {
        return Err(Error::Malformed("empty carrier".into()));
    }
    if n > CARRIER_CAP {
        return Err(Error::CapExceeded { size: n, cap: CARRIER_CAP });
    }
    check_names(&t.names)?;
    check_square("addition", &t.add, n)?;
    check_square("multiplication", &t.mul, n)?;
    for (what, idx) in [("zero", t.zero), ("one", t.one)] {
        if idx >= n {
            return Err(Error::Malformed(format!("{what} index {idx} out of range")));
        }
    }

    let add = |a: usize, b: usize| t.add[a][b];
    let mul = |a: usize, b: usize| t.mul[a][b];
    let mut out = Vec::new();
    let mut push = |axiom, witness: Vec<usize>| out.push(Violation { axiom, witness });

    for a in 0..n {
        if add(a, t.zero) != a || add(t.zero, a) != a {
            push(Axiom::AddIdentity, vec![a]);
        }
        if mul(a, t.one) != a || mul(t.one, a) != a {
            push(Axiom::MulIdentity, vec![a]);
        }
        if mul(a, t.zero) != t.zero || mul(t.zero, a) != t.zero {
            push(Axiom::ZeroAbsorbing, vec![a]);
        }
        for b in 0..n {
            if add(a, b) != add(b, a) && a < b {
                push(Axiom::AddCommutative, vec![a, b]);
            }
            if mul(a, b) != mul(b, a) && a < b {
                push(Axiom::MulCommutative, vec![a, b]);
            }
            for c in 0..n {
                if add(add(a, b), c) != add(a, add(b, c)) {
                    push(Axiom::AddAssociative, vec![a, b, c]);
                }
                if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                    push(Axiom::MulAssociative, vec![a, b, c]);
                }
                if mul(a, add(b, c)) != add(mul(a, b), mul(a, c))
                    || mul(add(b, c), a) != add(mul(b, a), mul(c, a))
                {
                    push(Axiom::Distributive, vec![a, b, c]);
                }
            }
        }
    }
    Ok(out)
}

/// A validated finite commutative semiring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSemiring {
    names: Vec<String>,
    add: Vec<ElementId>,
    mul: Vec<ElementId>,
    zero: ElementId,
    one: ElementId,
}

impl FiniteSemiring {
    pub fn new(tables: SemiringTables) -> Result<Self> {
        let violations = validate_semiring(&tables)?;
        if !violations.is_empty() {
            return Err(Error::AxiomViolations(violations));
        }
        Ok(Self::from_checked(tables))
    }

    fn from_checked(t: SemiringTables) -> Self {
        FiniteSemiring {
            add: t.add.into_iter().flatten().collect(),
            mul: t.mul.into_iter().flatten().collect(),
            names: t.names,
            zero: t.zero,
            one: t.one,
        }
    }

    /// Builds from closures; used by constructors whose axioms hold by
    /// construction. Still validated.
    pub fn from_fn(
        names: Vec<String>,
        zero: ElementId,
        one: ElementId,
        add: impl Fn(usize, usize) -> usize,
        mul: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let n = names.len();
        let table = |op: &dyn Fn(usize, usize) -> usize| {
            (0..n).map(|a| (0..n).map(|b| op(a, b)).collect()).collect()
        };
        FiniteSemiring::new(SemiringTables {
            add: table(&add),
            mul: table(&mul),
            names,
            zero,
            one,
        })
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: ElementId) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Option<ElementId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn zero(&self) -> ElementId {
        self.zero
    }

    pub fn one(&self) -> ElementId {
        self.one
    }

    #[inline]
    pub fn add(&self, a: ElementId, b: ElementId) -> ElementId {
        self.add[a * self.names.len() + b]
    }

    #[inline]
    pub fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        self.mul[a * self.names.len() + b]
    }

    pub fn sum(&self, xs: impl IntoIterator<Item = ElementId>) -> ElementId {
        xs.into_iter().fold(self.zero, |acc, x| self.add(acc, x))
    }

    pub fn product(&self, xs: impl IntoIterator<Item = ElementId>) -> ElementId {
        xs.into_iter().fold(self.one, |acc, x| self.mul(acc, x))
    }

    pub fn check_index(&self, x: ElementId) -> Result<()> {
        if x < self.size() {
            Ok(())
        } else {
            Err(Error::OutOfRange { index: x, size: self.size() })
        }
    }

    pub fn tables(&self) -> SemiringTables {
        let n = self.size();
        SemiringTables {
            names: self.names.clone(),
            add: self.add.chunks(n).map(<[_]>::to_vec).collect(),
            mul: self.mul.chunks(n).map(<[_]>::to_vec).collect(),
            zero: self.zero,
            one: self.one,
        }
    }

    /// `x^n` for `n >= 1`.
    pub fn power(&self, x: ElementId, n: u32) -> Result<ElementId> {
        self.check_index(x)?;
        if n == 0 {
            return Err(Error::Precondition("power exponent must be at least 1".into()));
        }
        Ok((1..n).fold(x, |acc, _| self.mul(acc, x)))
    }

    /// The distinct powers `1, x, x², …` in order of first appearance.
    ///
    /// The sequence is eventually periodic, so the list is finite; entry `k`
    /// is exactly `x^k`.
    pub fn multiplicative_closure(&self, x: ElementId) -> Vec<ElementId> {
        let mut out = vec![self.one];
        let mut cur = x;
        while !out.contains(&cur) {
            out.push(cur);
            cur = self.mul(cur, x);
        }
        out
    }

    /// The positive powers `x, x², …` up to the first repeat.
    pub fn power_sequence(&self, x: ElementId) -> Vec<ElementId> {
        let mut out = Vec::new();
        let mut cur = x;
        while !out.contains(&cur) {
            out.push(cur);
            cur = self.mul(cur, x);
        }
        out
    }

    pub fn inverse(&self, x: ElementId) -> Option<ElementId> {
        (0..self.size()).find(|&y| self.mul(x, y) == self.one)
    }

    pub fn is_unit(&self, x: ElementId) -> bool {
        self.inverse(x).is_some()
    }

    pub fn unit_group(&self) -> Vec<ElementId> {
        (0..self.size()).filter(|&x| self.is_unit(x)).collect()
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.size()).all(|x| self.add(x, x) == x)
    }

    /// The `n`-element chain `0 < … < 1` with join as addition and meet
    /// as multiplication.
    pub fn chain(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!("a chain needs at least 2 elements, got {n}")));
        }
        let names = (0..n)
            .map(|i| match i {
                0 => "0".to_string(),
                i if i == n - 1 => "1".to_string(),
                _ if n == 3 => "e".to_string(),
                i if n - 2 <= 26 => ((b'a' + (i - 1) as u8) as char).to_string(),
                i => format!("x{i}"),
            })
            .collect();
        FiniteSemiring::from_fn(names, 0, n - 1, usize::max, usize::min)
    }

    /// The Boolean semiring `{0, 1}` with `∨` and `∧`.
    pub fn boolean() -> Self {
        FiniteSemiring::from_fn(vec!["0".into(), "1".into()], 0, 1, usize::max, usize::min)
            .expect("boolean semiring")
    }

    /// `Bⁿ` with componentwise operations; elements are named as tuples in
    /// lexicographic order, first coordinate most significant.
    pub fn boolean_power(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("boolean power needs n >= 1".into()));
        }
        if n == 1 {
            return Ok(FiniteSemiring::boolean());
        }
        let size = 1usize << n;
        if size > CARRIER_CAP {
            return Err(Error::CapExceeded { size, cap: CARRIER_CAP });
        }
        let names = (0..size)
            .map(|i| {
                let bits: Vec<String> = (0..n).rev().map(|k| ((i >> k) & 1).to_string()).collect();
                format!("({})", bits.join(","))
            })
            .collect();
        FiniteSemiring::from_fn(names, 0, size - 1, |a, b| a | b, |a, b| a & b)
    }

    /// Cartesian product with componentwise operations. Element `(x, y)` has
    /// index `x * |right| + y`.
    pub fn product_with(&self, right: &FiniteSemiring) -> Result<Self> {
        let m = right.size();
        let size = self.size() * m;
        if size > CARRIER_CAP {
            return Err(Error::CapExceeded { size, cap: CARRIER_CAP });
        }
        let mut names = Vec::with_capacity(size);
        for x in 0..self.size() {
            for y in 0..m {
                names.push(format!("({},{})", self.name(x), right.name(y)));
            }
        }
        let pair = |i: usize| (i / m, i % m);
        FiniteSemiring::from_fn(
            names,
            self.zero * m + right.zero,
            self.one * m + right.one,
            |a, b| {
                let ((a1, a2), (b1, b2)) = (pair(a), pair(b));
                self.add(a1, b1) * m + right.add(a2, b2)
            },
            |a, b| {
                let ((a1, a2), (b1, b2)) = (pair(a), pair(b));
                self.mul(a1, b1) * m + right.mul(a2, b2)
            },
        )
    }

    /// The distributive lattice of down-sets of a finite poset, with union as
    /// addition and intersection as multiplication.
    ///
    /// `leq[i][j]` means `i ≤ j`; it is closed reflexively and transitively
    /// before use.
    pub fn downset_lattice(leq: &[Vec<bool>]) -> Result<Self> {
        let k = leq.len();
        if k > 6 {
            return Err(Error::CapExceeded { size: 1 << k, cap: CARRIER_CAP });
        }
        let mut rel: Vec<Vec<bool>> = (0..k)
            .map(|i| (0..k).map(|j| i == j || leq[i].get(j).copied().unwrap_or(false)).collect())
            .collect();
        for m in 0..k {
            for i in 0..k {
                for j in 0..k {
                    if rel[i][m] && rel[m][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
        let downsets: Vec<u32> = (0u32..1 << k)
            .filter(|&d| {
                (0..k).all(|j| d >> j & 1 == 0 || (0..k).all(|i| !rel[i][j] || d >> i & 1 == 1))
            })
            .collect();
        let pos = |d: u32| downsets.iter().position(|&x| x == d).unwrap();
        let names = downsets
            .iter()
            .map(|&d| {
                let ps: Vec<String> = (0..k).filter(|i| d >> i & 1 == 1).map(|i| i.to_string()).collect();
                format!("{{{}}}", ps.join(","))
            })
            .collect();
        let full = pos((1u32 << k) - 1);
        FiniteSemiring::from_fn(
            names,
            0,
            full,
            |a, b| pos(downsets[a] | downsets[b]),
            |a, b| pos(downsets[a] & downsets[b]),
        )
    }

    /// The same semiring with carrier re-indexed: old element `x` becomes
    /// new element `perm[x]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let n = self.size();
        if perm.len() != n || !is_permutation(perm) {
            return Err(Error::Precondition("relabeling must be a permutation of the carrier".into()));
        }
        let mut inv = vec![0; n];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let names = (0..n).map(|i| self.names[inv[i]].clone()).collect();
        FiniteSemiring::from_fn(
            names,
            perm[self.zero],
            perm[self.one],
            |a, b| perm[self.add(inv[a], inv[b])],
            |a, b| perm[self.mul(inv[a], inv[b])],
        )
    }
}

pub(crate) fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// Lists violated group axioms (including commutativity).
pub fn validate_group(names: &[String], table: &[Vec<usize>], identity: usize) -> Result<Vec<Violation>> {
    let m = names.len();
    if m == 0 {
        return Err(Error::Malformed("empty group".into()));
    }
    check_names(names)?;
    check_square("group", table, m)?;
    if identity >= m {
        return Err(Error::Malformed(format!("identity index {identity} out of range")));
    }
    let op = |a: usize, b: usize| table[a][b];
    let mut out = Vec::new();
    for a in 0..m {
        if op(a, identity) != a || op(identity, a) != a {
            out.push(Violation { axiom: Axiom::GroupIdentity, witness: vec![a] });
        }
        if !(0..m).any(|b| op(a, b) == identity && op(b, a) == identity) {
            out.push(Violation { axiom: Axiom::GroupInverse, witness: vec![a] });
        }
        for b in 0..m {
            if a < b && op(a, b) != op(b, a) {
                out.push(Violation { axiom: Axiom::GroupCommutative, witness: vec![a, b] });
            }
            for c in 0..m {
                if op(op(a, b), c) != op(a, op(b, c)) {
                    out.push(Violation { axiom: Axiom::GroupAssociative, witness: vec![a, b, c] });
                }
            }
        }
    }
    Ok(out)
}

/// A validated finite commutative group given by its Cayley table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let violations = validate_group(&names, &table, identity)?;
        if !violations.is_empty() {
            return Err(Error::AxiomViolations(violations));
        }
        let m = names.len();
        let inverse = (0..m)
            .map(|a| (0..m).find(|&b| table[a][b] == identity).unwrap())
            .collect();
        Ok(FiniteGroup {
            names,
            table: table.into_iter().flatten().collect(),
            identity,
            inverse,
        })
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    /// `Z/m` with elements named `g0 … g{m-1}` (`e` when `m = 1`).
    pub fn cyclic(m: usize) -> Self {
        assert!(m >= 1);
        let names = if m == 1 {
            vec!["e".to_string()]
        } else {
            (0..m).map(|i| format!("g{i}")).collect()
        };
        let table = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
        FiniteGroup::new(names, table, 0).expect("cyclic group")
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size() + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Checks that `units` is a group homomorphism `Γ → T×`.
pub fn validate_gamma_structure(
    semiring: &FiniteSemiring,
    gamma: &FiniteGroup,
    units: &[ElementId],
) -> Result<Vec<Violation>> {
    if units.len() != gamma.size() {
        return Err(Error::Malformed(format!(
            "unit map has {} entries for a group of order {}",
            units.len(),
            gamma.size()
        )));
    }
    for &u in units {
        semiring.check_index(u)?;
    }
    let mut out = Vec::new();
    for (g, &u) in units.iter().enumerate() {
        if !semiring.is_unit(u) {
            out.push(Violation { axiom: Axiom::UnitNotInvertible, witness: vec![g, u] });
        }
    }
    if units[gamma.identity()] != semiring.one() {
        out.push(Violation { axiom: Axiom::UnitIdentityNotOne, witness: vec![gamma.identity()] });
    }
    for g in 0..gamma.size() {
        for h in g..gamma.size() {
            if units[gamma.op(g, h)] != semiring.mul(units[g], units[h]) {
                out.push(Violation { axiom: Axiom::UnitNotMultiplicative, witness: vec![g, h] });
            }
        }
    }
    Ok(out)
}

/// A commutative semiring `T` together with a homomorphism `u: Γ → T×`,
/// inducing `{a b c}_γ = a·b·c·u_γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryGammaSemiring {
    semiring: FiniteSemiring,
    gamma: FiniteGroup,
    units: Vec<ElementId>,
}

impl TernaryGammaSemiring {
    pub fn new(semiring: FiniteSemiring, gamma: FiniteGroup, units: Vec<ElementId>) -> Result<Self> {
        let violations = validate_gamma_structure(&semiring, &gamma, &units)?;
        if !violations.is_empty() {
            return Err(Error::AxiomViolations(violations));
        }
        Ok(TernaryGammaSemiring { semiring, gamma, units })
    }

    /// Trivial Γ with `u(e) = 1`.
    pub fn with_trivial_gamma(semiring: FiniteSemiring) -> Self {
        let one = semiring.one();
        TernaryGammaSemiring { semiring, gamma: FiniteGroup::trivial(), units: vec![one] }
    }

    /// `Γ = Z/m` acting through the constant map `u ≡ 1`.
    pub fn with_constant_units(semiring: FiniteSemiring, m: usize) -> Self {
        let one = semiring.one();
        TernaryGammaSemiring { semiring, gamma: FiniteGroup::cyclic(m), units: vec![one; m] }
    }

    pub fn semiring(&self) -> &FiniteSemiring {
        &self.semiring
    }

    pub fn gamma(&self) -> &FiniteGroup {
        &self.gamma
    }

    pub fn units(&self) -> &[ElementId] {
        &self.units
    }

    pub fn unit(&self, gamma: usize) -> ElementId {
        self.units[gamma]
    }

    pub fn size(&self) -> usize {
        self.semiring.size()
    }

    /// `{a b c}_γ = a·b·c·u_γ`.
    pub fn ternary_product(&self, a: ElementId, b: ElementId, c: ElementId, gamma: usize) -> Result<ElementId> {
        for x in [a, b, c] {
            self.semiring.check_index(x)?;
        }
        if gamma >= self.gamma.size() {
            return Err(Error::OutOfRange { index: gamma, size: self.gamma.size() });
        }
        Ok(self.bracket(a, b, c, gamma))
    }

    #[inline]
    pub(crate) fn bracket(&self, a: ElementId, b: ElementId, c: ElementId, gamma: usize) -> ElementId {
        let s = &self.semiring;
        s.mul(s.mul(s.mul(a, b), c), self.units[gamma])
    }
}

/// `true` iff `phi` preserves `+`, `·`, `0`, `1` and maps each `u_γ` to `v_γ`.
///
/// Both sides must carry the same Γ (compared by order).
pub fn is_homomorphism(phi: &[ElementId], t: &TernaryGammaSemiring, s: &TernaryGammaSemiring) -> bool {
    let (ts, ss) = (t.semiring(), s.semiring());
    if phi.len() != ts.size() || phi.iter().any(|&y| y >= ss.size()) {
        return false;
    }
    if t.gamma().size() != s.gamma().size() {
        return false;
    }
    if phi[ts.zero()] != ss.zero() || phi[ts.one()] != ss.one() {
        return false;
    }
    if (0..t.gamma().size()).any(|g| phi[t.unit(g)] != s.unit(g)) {
        return false;
    }
    (0..ts.size()).all(|a| {
        (0..ts.size()).all(|b| {
            phi[ts.add(a, b)] == ss.add(phi[a], phi[b]) && phi[ts.mul(a, b)] == ss.mul(phi[a], phi[b])
        })
    })
}
