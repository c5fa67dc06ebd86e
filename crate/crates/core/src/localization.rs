//! Localization `T_f = S_f⁻¹T` at a single element, built as an explicit
//! quotient of `T × S_f`, and the homomorphisms induced out of it.

use crate::error::{Error, Result};
use crate::semiring::{is_homomorphism, ElementId, FiniteSemiring, SemiringTables, TernaryGammaSemiring, CARRIER_CAP};

/// A fraction `a / s` with `s` an element of `S_f`.
pub type Fraction = (ElementId, ElementId);

#[derive(Clone, Debug)]
pub struct LocalizedSemiring {
    base: TernaryGammaSemiring,
    element: ElementId,
    /// `S_f`; entry `k` is `f^k`.
    denominators: Vec<ElementId>,
    /// Members of each class, `(a, s)` with `s ∈ S_f`.
    classes: Vec<Vec<Fraction>>,
    /// Class of `(a, f^k)` at `k * n + a`.
    class_of: Vec<usize>,
    algebra: TernaryGammaSemiring,
    canonical: Vec<usize>,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            cur = std::mem::replace(&mut self.parent[cur], root);
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root so class order is first-seen.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// `(a, s) ~ (b, t)` iff `u·a·t = u·b·s` for some `u ∈ S_f`.
fn related(s: &FiniteSemiring, den: &[ElementId], (a, sa): Fraction, (b, sb): Fraction) -> bool {
    den.iter().any(|&u| s.mul(u, s.mul(a, sb)) == s.mul(u, s.mul(b, sa)))
}

/// Builds `T_f`.
///
/// Every pair of fractions is tested against the defining relation and the
/// result is closed transitively. The class tables are computed from every
/// pair of representatives and must agree.
pub fn localize(t: &TernaryGammaSemiring, f: ElementId) -> Result<LocalizedSemiring> {
    let s = t.semiring();
    s.check_index(f)?;
    let n = s.size();
    let den = s.multiplicative_closure(f);
    let m = den.len();
    let pair = |idx: usize| (idx % n, den[idx / n]);

    let total = n * m;
    let mut sets = DisjointSets::new(total);
    for p in 0..total {
        for q in p + 1..total {
            if related(s, &den, pair(p), pair(q)) {
                sets.union(p, q);
            }
        }
    }

    let mut class_of = vec![usize::MAX; total];
    let mut classes: Vec<Vec<Fraction>> = Vec::new();
    let mut root_class = vec![usize::MAX; total];
    for p in 0..total {
        let r = sets.find(p);
        if root_class[r] == usize::MAX {
            root_class[r] = classes.len();
            classes.push(Vec::new());
        }
        class_of[p] = root_class[r];
        classes[root_class[r]].push(pair(p));
    }
    let c = classes.len();
    if c > CARRIER_CAP {
        return Err(Error::CapExceeded { size: c, cap: CARRIER_CAP });
    }

    let exponent = |x: ElementId| den.iter().position(|&d| d == x).expect("denominator in S_f");
    let lookup = |(a, sa): Fraction| class_of[exponent(sa) * n + a];

    let mut add = vec![vec![0; c]; c];
    let mut mul = vec![vec![0; c]; c];
    for c1 in 0..c {
        for c2 in 0..c {
            let mut sum_class = None;
            let mut prod_class = None;
            for &(a, sa) in &classes[c1] {
                for &(b, sb) in &classes[c2] {
                    let st = s.mul(sa, sb);
                    let sum = lookup((s.add(s.mul(a, sb), s.mul(b, sa)), st));
                    let prod = lookup((s.mul(a, b), st));
                    for (slot, val, op) in [(&mut sum_class, sum, "+"), (&mut prod_class, prod, "·")] {
                        match *slot {
                            None => *slot = Some(val),
                            Some(prev) if prev != val => {
                                return Err(Error::Consistency(format!(
                                    "fraction {op} depends on representatives in localization at {}",
                                    s.name(f)
                                )))
                            }
                            _ => {}
                        }
                    }
                }
            }
            add[c1][c2] = sum_class.unwrap();
            mul[c1][c2] = prod_class.unwrap();
        }
    }

    let names = classes
        .iter()
        .map(|members| {
            let (a, sa) = members[0];
            if sa == s.one() {
                s.name(a).to_string()
            } else {
                format!("{}/{}", s.name(a), s.name(sa))
            }
        })
        .collect();
    let canonical: Vec<usize> = (0..n).map(|a| class_of[a]).collect();
    let tables = SemiringTables {
        names,
        add,
        mul,
        zero: canonical[s.zero()],
        one: canonical[s.one()],
    };
    let semiring = FiniteSemiring::new(tables)
        .map_err(|e| Error::Consistency(format!("localization at {} is not a semiring: {e}", s.name(f))))?;
    let units = t.units().iter().map(|&u| canonical[u]).collect();
    let algebra = TernaryGammaSemiring::new(semiring, t.gamma().clone(), units)
        .map_err(|e| Error::Consistency(format!("localized unit map is invalid: {e}")))?;

    Ok(LocalizedSemiring {
        base: t.clone(),
        element: f,
        denominators: den,
        classes,
        class_of,
        algebra,
        canonical,
    })
}

impl LocalizedSemiring {
    pub fn base(&self) -> &TernaryGammaSemiring {
        &self.base
    }

    /// The inverted element `f`.
    pub fn element(&self) -> ElementId {
        self.element
    }

    pub fn denominators(&self) -> &[ElementId] {
        &self.denominators
    }

    pub fn size(&self) -> usize {
        self.classes.len()
    }

    pub fn members(&self, class: usize) -> &[Fraction] {
        &self.classes[class]
    }

    pub fn representative(&self, class: usize) -> Fraction {
        self.classes[class][0]
    }

    /// Class tables with the induced unit map.
    pub fn algebra(&self) -> &TernaryGammaSemiring {
        &self.algebra
    }

    pub fn semiring(&self) -> &FiniteSemiring {
        self.algebra.semiring()
    }

    /// `ι_f: a ↦ a/1`.
    pub fn canonical(&self) -> &[usize] {
        &self.canonical
    }

    pub fn iota(&self, a: ElementId) -> usize {
        self.canonical[a]
    }

    /// Position `k` with `f^k = s`, if `s ∈ S_f`.
    pub fn exponent_of(&self, s: ElementId) -> Option<usize> {
        self.denominators.iter().position(|&d| d == s)
    }

    /// The class of `a / s`; `None` if `s ∉ S_f`.
    pub fn class_of(&self, a: ElementId, s: ElementId) -> Option<usize> {
        let n = self.base.size();
        if a >= n {
            return None;
        }
        self.exponent_of(s).map(|k| self.class_of[k * n + a])
    }

    /// The class `1/f^k`.
    pub fn inverse_power(&self, k: u32) -> usize {
        let s = self.base.semiring();
        let fk = (0..k).fold(s.one(), |acc, _| s.mul(acc, self.element));
        self.class_of(s.one(), fk).expect("powers of f are denominators")
    }

    /// Checks reflexivity, symmetry and transitivity of the raw relation on
    /// `T × S_f` (before closure).
    pub fn relation_is_equivalence(&self) -> bool {
        let s = self.base.semiring();
        let den = &self.denominators;
        let pairs: Vec<Fraction> = den
            .iter()
            .flat_map(|&d| (0..s.size()).map(move |a| (a, d)))
            .collect();
        let rel: Vec<Vec<bool>> = pairs
            .iter()
            .map(|&p| pairs.iter().map(|&q| related(s, den, p, q)).collect())
            .collect();
        let k = pairs.len();
        (0..k).all(|i| rel[i][i])
            && (0..k).all(|i| (0..k).all(|j| rel[i][j] == rel[j][i]))
            && (0..k).all(|i| (0..k).all(|j| !rel[i][j] || (0..k).all(|l| !rel[j][l] || rel[i][l])))
    }
}

/// The unique homomorphism `T_f → R` extending `φ: T → R`, given that
/// `φ(f)` is a unit: `a/fⁿ ↦ φ(a)·φ(f)⁻ⁿ`.
///
/// Well-definedness is checked on every member of every class, the result
/// is checked to be a homomorphism, and uniqueness is checked by confirming
/// that each class has exactly one admissible image.
pub fn universal_extend(
    loc: &LocalizedSemiring,
    phi: &[ElementId],
    target: &TernaryGammaSemiring,
) -> Result<Vec<usize>> {
    let base = loc.base();
    if !is_homomorphism(phi, base, target) {
        return Err(Error::Precondition("universal extension requires a homomorphism".into()));
    }
    let r = target.semiring();
    let image_f = phi[loc.element()];
    let inv = r.inverse(image_f).ok_or_else(|| {
        Error::Precondition(format!(
            "φ({}) = {} is not a unit in the target",
            base.semiring().name(loc.element()),
            r.name(image_f)
        ))
    })?;
    let inv_pow = |k: usize| (0..k).fold(r.one(), |acc, _| r.mul(acc, inv));

    let mut out = Vec::with_capacity(loc.size());
    for class in 0..loc.size() {
        let mut value = None;
        for &(a, s) in loc.members(class) {
            let k = loc.exponent_of(s).unwrap();
            let v = r.mul(phi[a], inv_pow(k));
            match value {
                None => value = Some(v),
                Some(prev) if prev != v => {
                    return Err(Error::Consistency(format!(
                        "universal extension is not well defined on class {}",
                        loc.semiring().name(class)
                    )))
                }
                _ => {}
            }
        }
        let v = value.unwrap();
        let (a, s) = loc.representative(class);
        let admissible = (0..r.size()).filter(|&x| r.mul(x, phi[s]) == phi[a]).count();
        if admissible != 1 {
            return Err(Error::Consistency(format!(
                "class {} admits {admissible} images compatible with φ",
                loc.semiring().name(class)
            )));
        }
        out.push(v);
    }
    if !is_homomorphism(&out, loc.algebra(), target) {
        return Err(Error::Consistency("universal extension is not a homomorphism".into()));
    }
    Ok(out)
}
