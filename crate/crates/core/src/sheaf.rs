//! The structure sheaf on the basis of principal opens: restriction maps,
//! gluing, global sections, stalks, and the finite-instance check of the
//! affine anti-equivalence.
//!
//! Sections over `D(f)` are classes of `T_f`. Every `f ∈ T` gets its own
//! localization even when two elements define the same open.

use crate::error::{Error, Result};
use crate::localization::{localize, universal_extend, LocalizedSemiring};
use crate::semiring::{is_homomorphism, ElementId, FiniteSemiring, TernaryGammaSemiring};
use crate::spectrum::Spectrum;

/// Sections `sᵢ ∈ T_{fᵢ}` over a cover `D(f) = ⋃ D(fᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionFamily {
    pub element: ElementId,
    pub cover: Vec<ElementId>,
    /// Class index of `sᵢ` in `T_{fᵢ}`.
    pub sections: Vec<usize>,
}

/// A glued section with the data used to build it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedSection {
    /// Class index in `T_f`.
    pub section: usize,
    /// Common exponent `M` with `sᵢ = bᵢ / fᵢ^M`.
    pub common_exponent: u32,
    /// `N` with `f^N = Σ aᵢ fᵢ^M`.
    pub exponent: u32,
    pub coefficients: Vec<ElementId>,
    pub numerator: ElementId,
}

#[derive(Clone, Debug)]
pub struct StructureSheaf {
    spectrum: Spectrum,
    locals: Vec<LocalizedSemiring>,
}

fn pow0(s: &FiniteSemiring, x: ElementId, k: u32) -> ElementId {
    (0..k).fold(s.one(), |acc, _| s.mul(acc, x))
}

impl StructureSheaf {
    pub fn new(t: &TernaryGammaSemiring) -> Result<Self> {
        StructureSheaf::from_spectrum(Spectrum::new(t)?)
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Result<Self> {
        let t = spectrum.algebra();
        let locals = (0..t.size()).map(|f| localize(t, f)).collect::<Result<_>>()?;
        Ok(StructureSheaf { spectrum, locals })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn algebra(&self) -> &TernaryGammaSemiring {
        self.spectrum.algebra()
    }

    /// `O(D(f)) = T_f`.
    pub fn sections(&self, f: ElementId) -> &LocalizedSemiring {
        &self.locals[f]
    }

    /// `D(g) ⊆ D(f)`.
    pub fn open_contained(&self, g: ElementId, f: ElementId) -> bool {
        self.spectrum
            .principal_open(g)
            .points
            .is_subset(self.spectrum.principal_open(f).points)
    }

    /// `ρ_{f,g}: T_f → T_g`, defined when `D(g) ⊆ D(f)`.
    pub fn restriction(&self, f: ElementId, g: ElementId) -> Result<Vec<usize>> {
        let s = self.algebra().semiring();
        s.check_index(f)?;
        s.check_index(g)?;
        if !self.open_contained(g, f) {
            return Err(Error::Precondition(format!(
                "D({}) is not contained in D({})",
                s.name(g),
                s.name(f)
            )));
        }
        let (lf, lg) = (&self.locals[f], &self.locals[g]);
        if !lg.semiring().is_unit(lg.iota(f)) {
            return Err(Error::Consistency(format!(
                "{} is not invertible in the localization at {}",
                s.name(f),
                s.name(g)
            )));
        }
        universal_extend(lf, lg.canonical(), lg.algebra())
    }

    /// Builds the section over `D(f)` restricting to each `sᵢ`.
    ///
    /// Sections are first rewritten over a common denominator power `M`,
    /// with `M` raised until the overlap agreements hold exactly in `T`.
    /// Then `f^N = Σ aᵢ fᵢ^M` gives `s = (Σ aᵢ bᵢ) / f^N`. The restrictions
    /// of `s` are recomputed and compared with the inputs.
    pub fn glue(&self, family: &SectionFamily) -> Result<GluedSection> {
        let t = self.algebra();
        let s = t.semiring();
        let f = family.element;
        let fs = &family.cover;
        if fs.len() != family.sections.len() {
            return Err(Error::Precondition("one section per cover element is required".into()));
        }
        let verdict = self.spectrum.check_standard_cover(f, fs)?;
        if !verdict.is_standard_cover() {
            return Err(Error::Precondition(format!("the D(fᵢ) do not cover D({})", s.name(f))));
        }
        for (&fi, &si) in fs.iter().zip(&family.sections) {
            if si >= self.locals[fi].size() {
                return Err(Error::OutOfRange { index: si, size: self.locals[fi].size() });
            }
        }

        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                let h = s.mul(fs[i], fs[j]);
                let left = self.restriction(fs[i], h)?[family.sections[i]];
                let right = self.restriction(fs[j], h)?[family.sections[j]];
                if left != right {
                    return Err(Error::IncompatibleSections { i, j });
                }
            }
        }

        // Common exponent.
        let reps: Vec<(ElementId, u32)> = fs
            .iter()
            .zip(&family.sections)
            .map(|(&fi, &si)| {
                let l = &self.locals[fi];
                let (b, d) = l.representative(si);
                (b, l.exponent_of(d).unwrap() as u32)
            })
            .collect();
        let m0 = reps.iter().map(|r| r.1).max().unwrap_or(0);
        let mut nums: Vec<ElementId> = reps
            .iter()
            .zip(fs)
            .map(|(&(b, k), &fi)| s.mul(b, pow0(s, fi, m0 - k)))
            .collect();

        // Overlap agreement holds up to a power of fᵢfⱼ; absorb the largest.
        let mut extra = 0u32;
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                let h = s.mul(fs[i], fs[j]);
                let lhs = s.mul(nums[i], pow0(s, fs[j], m0));
                let rhs = s.mul(nums[j], pow0(s, fs[i], m0));
                let r = s
                    .multiplicative_closure(h)
                    .iter()
                    .position(|&u| s.mul(u, lhs) == s.mul(u, rhs))
                    .ok_or_else(|| {
                        Error::Consistency(format!("overlap ({i}, {j}) agrees in T_(fᵢfⱼ) but no witness power exists"))
                    })?;
                extra = extra.max(r as u32);
            }
        }
        for (b, &fi) in nums.iter_mut().zip(fs) {
            *b = s.mul(*b, pow0(s, fi, extra));
        }
        let m = m0 + extra;
        let powers: Vec<ElementId> = fs.iter().map(|&fi| pow0(s, fi, m)).collect();
        for i in 0..fs.len() {
            for j in 0..fs.len() {
                if s.mul(powers[j], nums[i]) != s.mul(powers[i], nums[j]) {
                    return Err(Error::Consistency(format!(
                        "common-exponent numerators disagree on overlap ({i}, {j})"
                    )));
                }
            }
        }

        let decomposition = crate::spectrum::find_power_decomposition(t, f, &powers)?.ok_or_else(|| {
            Error::Consistency(format!("{} has no power decomposition over the cover", s.name(f)))
        })?;
        let numerator = s.sum(decomposition.coefficients.iter().zip(&nums).map(|(&a, &b)| s.mul(a, b)));
        let fn_ = s.power(f, decomposition.exponent)?;
        let lf = &self.locals[f];
        let section = lf
            .class_of(numerator, fn_)
            .ok_or_else(|| Error::Consistency("f^N is not a denominator of T_f".into()))?;

        for (k, &fk) in fs.iter().enumerate() {
            if self.restriction(f, fk)?[section] != family.sections[k] {
                return Err(Error::Consistency(format!(
                    "glued section does not restrict to the given section on D({})",
                    s.name(fk)
                )));
            }
        }
        Ok(GluedSection {
            section,
            common_exponent: m,
            exponent: decomposition.exponent,
            coefficients: decomposition.coefficients,
            numerator,
        })
    }

    /// Distinct sections over `D(f)` are separated by some restriction to
    /// the cover.
    pub fn check_gluing_uniqueness(&self, f: ElementId, fs: &[ElementId]) -> Result<bool> {
        let s = self.algebra().semiring();
        if !self.spectrum.check_standard_cover(f, fs)?.is_standard_cover() {
            return Err(Error::Precondition(format!("the D(fᵢ) do not cover D({})", s.name(f))));
        }
        let maps = fs.iter().map(|&g| self.restriction(f, g)).collect::<Result<Vec<_>>>()?;
        let size = self.locals[f].size();
        for a in 0..size {
            for b in a + 1..size {
                if maps.iter().all(|m| m[a] == m[b]) {
                    return Err(Error::Consistency(format!(
                        "sections {} and {} over D({}) have equal restrictions",
                        self.locals[f].semiring().name(a),
                        self.locals[f].semiring().name(b),
                        s.name(f)
                    )));
                }
            }
        }
        Ok(true)
    }

    /// Every compatible family `(s_f)_{f ∈ T}` with `ρ_{f,h}(s_f) = s_h`
    /// whenever `D(h) ⊆ D(f)`, found by exhaustive backtracking.
    pub fn global_sections(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.algebra().size();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&f| std::cmp::Reverse(self.spectrum.principal_open(f).points.len()));
        let mut maps: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
        for f in 0..n {
            for h in 0..n {
                if self.open_contained(h, f) {
                    maps[f][h] = Some(self.restriction(f, h)?);
                }
            }
        }

        let mut out = Vec::new();
        let mut assignment = vec![usize::MAX; n];
        fn extend(
            depth: usize,
            order: &[usize],
            sizes: &[usize],
            maps: &[Vec<Option<Vec<usize>>>],
            assignment: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if depth == order.len() {
                out.push(assignment.clone());
                return;
            }
            let f = order[depth];
            for v in 0..sizes[f] {
                assignment[f] = v;
                let consistent = order[..=depth].iter().all(|&g| {
                    let down = maps[g][f].as_ref().is_none_or(|m| m[assignment[g]] == v);
                    let up = maps[f][g].as_ref().is_none_or(|m| m[v] == assignment[g]);
                    down && up
                });
                if consistent {
                    extend(depth + 1, order, sizes, maps, assignment, out);
                }
            }
            assignment[f] = usize::MAX;
        }
        let sizes: Vec<usize> = self.locals.iter().map(|l| l.size()).collect();
        extend(0, &order, &sizes, &maps, &mut assignment, &mut out);
        out.sort();
        Ok(out)
    }

    /// `η_T(a) = (ι_f(a))_f`.
    pub fn eta(&self, a: ElementId) -> Vec<usize> {
        self.locals.iter().map(|l| l.iota(a)).collect()
    }

    /// Checks that `η_T` is a bijection onto the compatible families and
    /// preserves `+`, `·` and every `u_γ` componentwise.
    pub fn verify_global_sections(&self) -> Result<GlobalSectionsReport> {
        let t = self.algebra();
        let s = t.semiring();
        let n = s.size();
        let families = self.global_sections()?;
        let images: Vec<Vec<usize>> = (0..n).map(|a| self.eta(a)).collect();
        let mut distinct = images.clone();
        distinct.sort();
        distinct.dedup();
        let bijective = distinct == families;

        let preserves = (0..n).all(|a| {
            (0..n).all(|b| {
                self.locals.iter().all(|l| {
                    let ls = l.semiring();
                    l.iota(s.add(a, b)) == ls.add(l.iota(a), l.iota(b))
                        && l.iota(s.mul(a, b)) == ls.mul(l.iota(a), l.iota(b))
                })
            })
        }) && (0..t.gamma().size())
            .all(|g| self.locals.iter().all(|l| l.iota(t.unit(g)) == l.algebra().unit(g)));

        Ok(GlobalSectionsReport { families: families.len(), elements: n, bijective, preserves_operations: preserves })
    }

    /// The stalk at point `p`, realized as `T_h` with `h` the product of all
    /// elements outside the prime. Checks that every such element becomes
    /// a unit and that `T → T_h` preserves the triadic bracket.
    pub fn stalk(&self, p: usize) -> Result<LocalizedSemiring> {
        let t = self.algebra();
        if p >= self.spectrum.len() {
            return Err(Error::OutOfRange { index: p, size: self.spectrum.len() });
        }
        let prime = self.spectrum.prime(p);
        let s = t.semiring();
        let outside: Vec<ElementId> = prime.complement(s.size()).iter().collect();
        let h = s.product(outside.iter().copied());
        let stalk = localize(t, h)?;
        if let Some(&bad) = outside.iter().find(|&&x| !stalk.semiring().is_unit(stalk.iota(x))) {
            return Err(Error::Consistency(format!("{} is not invertible in the stalk", s.name(bad))));
        }
        if !is_homomorphism(stalk.canonical(), t, stalk.algebra()) {
            return Err(Error::Consistency("stalk map does not preserve the ternary structure".into()));
        }
        Ok(stalk)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GlobalSectionsReport {
    pub families: usize,
    pub elements: usize,
    pub bijective: bool,
    pub preserves_operations: bool,
}

impl GlobalSectionsReport {
    pub fn holds(&self) -> bool {
        self.bijective && self.preserves_operations
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiEquivalenceReport {
    /// `Spec(S) → Spec(T)` point map.
    pub comap: Vec<usize>,
    pub witness: Option<String>,
}

impl AntiEquivalenceReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Round-trips `φ: T → S` through `Spec` and global sections.
///
/// Builds the comap, the sheaf maps `T_f → S_{φ(f)}`, checks they commute
/// with restrictions, and checks the induced map on global sections is `φ`
/// under `η`.
pub fn verify_anti_equivalence(
    phi: &[ElementId],
    source: &StructureSheaf,
    target: &StructureSheaf,
) -> Result<AntiEquivalenceReport> {
    let (t, s) = (source.algebra(), target.algebra());
    if !is_homomorphism(phi, t, s) {
        return Err(Error::Precondition("anti-equivalence check requires a homomorphism".into()));
    }
    let comap = source.spectrum().comap_from(phi, target.spectrum())?;
    let n = t.size();
    let sheaf_maps = (0..n)
        .map(|f| {
            let dst = target.sections(phi[f]);
            let composite: Vec<usize> = phi.iter().map(|&y| dst.iota(y)).collect();
            universal_extend(source.sections(f), &composite, dst.algebra())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut witness = None;
    'outer: for f in 0..n {
        for g in 0..n {
            if !source.open_contained(g, f) {
                continue;
            }
            let rho_t = source.restriction(f, g)?;
            let rho_s = target.restriction(phi[f], phi[g])?;
            for x in 0..source.sections(f).size() {
                if sheaf_maps[g][rho_t[x]] != rho_s[sheaf_maps[f][x]] {
                    witness = Some(format!(
                        "sheaf maps do not commute with restriction D({}) ⊆ D({})",
                        t.semiring().name(g),
                        t.semiring().name(f)
                    ));
                    break 'outer;
                }
            }
        }
    }

    if witness.is_none() {
        let (one_t, one_s) = (t.semiring().one(), s.semiring().one());
        let etas: Vec<Vec<usize>> = (0..s.size()).map(|b| target.eta(b)).collect();
        for a in 0..n {
            let top = sheaf_maps[one_t][source.eta(a)[one_t]];
            let family = (0..s.size())
                .map(|g| target.restriction(one_s, g).map(|r| r[top]))
                .collect::<Result<Vec<_>>>()?;
            match etas.iter().position(|e| *e == family) {
                Some(b) if b == phi[a] => {}
                Some(b) => {
                    witness = Some(format!(
                        "global sections send {} to {} instead of {}",
                        t.semiring().name(a),
                        s.semiring().name(b),
                        s.semiring().name(phi[a])
                    ));
                    break;
                }
                None => {
                    witness = Some(format!("image of η({}) is not a global section", t.semiring().name(a)));
                    break;
                }
            }
        }
    }
    Ok(AntiEquivalenceReport { comap, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> TernaryGammaSemiring {
        TernaryGammaSemiring::with_trivial_gamma(FiniteSemiring::chain(n).unwrap())
    }

    fn bb() -> TernaryGammaSemiring {
        TernaryGammaSemiring::with_trivial_gamma(FiniteSemiring::boolean_power(2).unwrap())
    }

    fn zero_ring() -> TernaryGammaSemiring {
        TernaryGammaSemiring::with_trivial_gamma(
            FiniteSemiring::from_fn(vec!["0".into()], 0, 0, |_, _| 0, |_, _| 0).unwrap(),
        )
    }

    #[test]
    fn restriction_examples() {
        let sh = StructureSheaf::new(&chain(3)).unwrap();
        assert_eq!(sh.restriction(1, 1).unwrap(), vec![0, 1]);
        // T ≅ T₁ → T_e collapses e and 1.
        assert_eq!(sh.restriction(2, 1).unwrap(), vec![0, 1, 1]);
        assert!(matches!(sh.restriction(1, 2), Err(Error::Precondition(_))));

        let sh = StructureSheaf::new(&bb()).unwrap();
        let rho = sh.restriction(3, 2).unwrap();
        assert_eq!(sh.sections(2).size(), 2);
        // (x, y) ↦ x
        assert_eq!(rho, vec![0, 0, 1, 1]);
    }

    #[test]
    fn restrictions_compose() {
        for t in [chain(3), chain(4), bb()] {
            let sh = StructureSheaf::new(&t).unwrap();
            let n = t.size();
            for f in 0..n {
                for g in 0..n {
                    for h in 0..n {
                        if sh.open_contained(g, f) && sh.open_contained(h, g) {
                            let fg = sh.restriction(f, g).unwrap();
                            let gh = sh.restriction(g, h).unwrap();
                            let fh = sh.restriction(f, h).unwrap();
                            assert!(fg.iter().enumerate().all(|(x, &y)| gh[y] == fh[x]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn boolean_square_gluing_reconstructs_every_element() {
        let t = bb();
        let sh = StructureSheaf::new(&t).unwrap();
        let mut glued = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                let fam = SectionFamily { element: 3, cover: vec![2, 1], sections: vec![x, y] };
                let g = sh.glue(&fam).unwrap();
                glued.push(g.section);
            }
        }
        glued.sort();
        assert_eq!(glued, vec![0, 1, 2, 3]);
        assert!(sh.check_gluing_uniqueness(3, &[2, 1]).unwrap());
    }

    #[test]
    fn trivial_cover_returns_the_section() {
        let sh = StructureSheaf::new(&chain(4)).unwrap();
        for f in 0..4 {
            for s in 0..sh.sections(f).size() {
                let fam = SectionFamily { element: f, cover: vec![f], sections: vec![s] };
                assert_eq!(sh.glue(&fam).unwrap().section, s);
            }
            assert!(sh.check_gluing_uniqueness(f, &[f]).unwrap());
        }
    }

    #[test]
    fn chain3_redundant_cover() {
        let sh = StructureSheaf::new(&chain(3)).unwrap();
        // D(1) = D(1) ∪ D(e): the compatible pairs are (s, ρ(s)).
        let rho = sh.restriction(2, 1).unwrap();
        for s in 0..3 {
            let fam = SectionFamily { element: 2, cover: vec![2, 1], sections: vec![s, rho[s]] };
            assert_eq!(sh.glue(&fam).unwrap().section, s);
        }
        let bad = SectionFamily { element: 2, cover: vec![2, 1], sections: vec![0, 1] };
        assert!(matches!(sh.glue(&bad), Err(Error::IncompatibleSections { i: 0, j: 1 })));
        let not_cover = SectionFamily { element: 2, cover: vec![1], sections: vec![0] };
        assert!(matches!(sh.glue(&not_cover), Err(Error::Precondition(_))));
    }

    #[test]
    fn gluing_in_non_idempotent_semiring_needs_common_exponent() {
        // Z/6: D(1) = D(2) ∪ D(3) with sections living in T_2 ≅ Z/3, T_3 ≅ Z/2.
        let z6 = TernaryGammaSemiring::with_trivial_gamma(
            FiniteSemiring::from_fn((0..6).map(|i| i.to_string()).collect(), 0, 1, |a, b| (a + b) % 6, |a, b| (a * b) % 6)
                .unwrap(),
        );
        let sh = StructureSheaf::new(&z6).unwrap();
        assert_eq!(sh.sections(2).size(), 3);
        assert_eq!(sh.sections(3).size(), 2);
        let mut seen = Vec::new();
        for x in 0..3 {
            for y in 0..2 {
                let fam = SectionFamily { element: 1, cover: vec![2, 3], sections: vec![x, y] };
                seen.push(sh.glue(&fam).unwrap().section);
            }
        }
        seen.sort();
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn global_sections_examples() {
        for (t, count) in [(chain(3), 3), (bb(), 4), (zero_ring(), 1)] {
            let sh = StructureSheaf::new(&t).unwrap();
            let r = sh.verify_global_sections().unwrap();
            assert!(r.holds(), "{r:?}");
            assert_eq!(r.families, count);
        }
    }

    #[test]
    fn stalk_examples() {
        let sh = StructureSheaf::new(&chain(3)).unwrap();
        assert_eq!(sh.stalk(1).unwrap().size(), 3);
        let st = sh.stalk(0).unwrap();
        assert_eq!(st.element(), 1);
        assert_eq!(st.size(), 2);

        let sh = StructureSheaf::new(&bb()).unwrap();
        let st = sh.stalk(0).unwrap();
        // P₁ = {0}×B; complement {(1,0), (1,1)}; h = (1,0).
        assert_eq!(st.element(), 2);
        assert_eq!(st.size(), 2);
    }

    #[test]
    fn anti_equivalence_examples() {
        let c3 = StructureSheaf::new(&chain(3)).unwrap();
        let c2 = StructureSheaf::new(&chain(2)).unwrap();
        assert!(verify_anti_equivalence(&[0, 1, 2], &c3, &c3).unwrap().holds());
        assert!(verify_anti_equivalence(&[0, 1, 1], &c3, &c2).unwrap().holds());
        assert!(verify_anti_equivalence(&[0, 0, 1], &c3, &c2).unwrap().holds());

        let sbb = StructureSheaf::new(&bb()).unwrap();
        let b = StructureSheaf::new(&chain(2)).unwrap();
        let r = verify_anti_equivalence(&[0, 0, 1, 1], &sbb, &b).unwrap();
        assert!(r.holds());
        assert_eq!(r.comap, vec![0]);
    }
}
