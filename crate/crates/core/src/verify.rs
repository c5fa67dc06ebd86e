//! Runs every structural check on one algebra and collects the outcomes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy::{self, FuzzySubset, Grade};
use crate::ideal;
use crate::semiring::{is_homomorphism, ElementId, TernaryGammaSemiring};
use crate::sheaf::{verify_anti_equivalence, SectionFamily, StructureSheaf};
use crate::spectral::{self, LaplacianAnalysis};
use crate::spectrum::{find_power_decomposition, Spectrum};
use crate::triadic::{self, FilippovStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A hypothesis of the check does not hold for this algebra.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub status: Status,
    pub instances: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub cap: usize,
    pub automorphism_cap: usize,
    pub seed: u64,
    pub solver_tolerance: f64,
    pub fuzzy: Vec<(String, FuzzySubset)>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            cap: ideal::DEFAULT_ENUM_CAP,
            automorphism_cap: triadic::AUTOMORPHISM_CAP,
            seed: 0,
            solver_tolerance: spectral::SOLVER_TOLERANCE,
            fuzzy: Vec::new(),
        }
    }
}

/// Outcome of one check body: `Ok((instances, failure))`.
type Body = Result<(usize, Option<String>)>;

struct Runner {
    report: VerifyReport,
}

impl Runner {
    /// Consistency errors become failed checks; any other error aborts the run.
    fn check(&mut self, module: &'static str, name: &'static str, body: impl FnOnce() -> Body) -> Result<()> {
        let (status, instances, detail) = match body() {
            Ok((n, None)) => (Status::Pass, n, String::new()),
            Ok((n, Some(why))) => (Status::Fail, n, why),
            Err(Error::Consistency(why)) => (Status::Fail, 0, why),
            Err(e) => return Err(e),
        };
        self.report.checks.push(CheckResult { module, name, status, instances, detail });
        Ok(())
    }

    fn skip(&mut self, module: &'static str, name: &'static str, why: &str) {
        self.report.checks.push(CheckResult { module, name, status: Status::Skipped, instances: 0, detail: why.into() });
    }
}

fn first_failure<T>(items: impl IntoIterator<Item = T>, mut bad: impl FnMut(&T) -> Result<Option<String>>) -> Body {
    let mut n = 0;
    for it in items {
        n += 1;
        if let Some(why) = bad(&it)? {
            return Ok((n, Some(why)));
        }
    }
    Ok((n, None))
}

fn filippov_body(label: String, a: &TernaryGammaSemiring) -> Option<Result<Option<String>>> {
    match triadic::verify_filippov(a) {
        FilippovStatus::HypothesisNotMet => None,
        FilippovStatus::Holds { .. } => Some(Ok(None)),
        FilippovStatus::Violated { tuple, gamma } => Some(Ok(Some(format!("{label}: violated at {tuple:?}, γ = {gamma}")))),
    }
}

/// All checks for `t`, grouped by area. Check failures are recorded;
/// input problems (cap exceeded, bad options) are returned as errors.
pub fn verify_all(t: &TernaryGammaSemiring, opts: &VerifyOptions) -> Result<VerifyReport> {
    let s = t.semiring();
    let n = s.size();
    let gammas = t.gamma().size();
    let mut r = Runner { report: VerifyReport::default() };

    r.check("semiring", "ternary product is symmetric", || {
        let triples = (0..gammas).flat_map(|g| (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c, g)))));
        first_failure(triples, |&(a, b, c, g)| {
            let x = t.bracket(a, b, c, g);
            let ok = [t.bracket(b, a, c, g), t.bracket(c, b, a, g), t.bracket(a, c, b, g)].iter().all(|&y| y == x);
            Ok((!ok).then(|| format!("asymmetric at ({a}, {b}, {c}), γ = {g}")))
        })
    })?;

    let ideals = ideal::enumerate_ideals_with_cap(t, opts.cap)?;
    let spectrum = Spectrum::with_cap(t, opts.cap)?;
    let primes = spectrum.primes().to_vec();

    r.check("ideal", "radical equals intersection of primes above", || {
        first_failure(&ideals, |&&i| {
            let c = ideal::verify_radical_lemma_with_primes(t, i, &primes)?;
            Ok((!c.holds()).then(|| format!("radical {:?} vs intersection {:?}", c.radical, c.prime_intersection)))
        })
    })?;
    r.check("ideal", "binary and ternary primality agree", || {
        first_failure(&ideals, |&&i| {
            Ok((ideal::is_prime(t, i) != ideal::is_prime_ternary(t, i)).then(|| format!("disagree on {i:?}")))
        })
    })?;

    r.check("spectrum", "closed sets form a topology with a basis of principal opens", || {
        let rep = spectrum.verify_topology_axioms()?;
        Ok((rep.instances, rep.failures.first().cloned()))
    })?;
    r.check("spectrum", "covers match radical membership, with power witnesses", || {
        let mut covers: Vec<Vec<ElementId>> = vec![vec![]];
        covers.extend((0..n).map(|a| vec![a]));
        covers.extend((0..n).flat_map(|a| (a..n).map(move |b| vec![a, b])));
        let cases = (0..n).flat_map(|f| covers.iter().map(move |fs| (f, fs)));
        first_failure(cases, |&(f, fs)| {
            let v = spectrum.check_standard_cover(f, fs)?;
            let dec = find_power_decomposition(t, f, fs)?;
            Ok(match (v.radical_member, dec) {
                (true, Some(d)) if d.reproduces(t, f, fs) => None,
                (false, None) => None,
                (_, d) => Some(format!("f = {}, fs = {fs:?}: radical member {} but witness {d:?}", s.name(f), v.radical_member)),
            })
        })
    })?;

    let sheaf = StructureSheaf::from_spectrum(spectrum.clone())?;
    r.check("sheaf", "localizations are well defined with unit-preserving canonical maps", || {
        first_failure(0..n, |&f| {
            let l = sheaf.sections(f);
            let ok = l.relation_is_equivalence() && is_homomorphism(l.canonical(), t, l.algebra());
            Ok((!ok).then(|| format!("localization at {}", s.name(f))))
        })
    })?;
    r.check("sheaf", "restrictions compose", || {
        let triples = (0..n).flat_map(|f| (0..n).flat_map(move |g| (0..n).map(move |h| (f, g, h))));
        let sheaf = &sheaf;
        first_failure(triples.filter(|&(f, g, h)| sheaf.open_contained(g, f) && sheaf.open_contained(h, g)), |&(f, g, h)| {
            let (fg, gh, fh) = (sheaf.restriction(f, g)?, sheaf.restriction(g, h)?, sheaf.restriction(f, h)?);
            Ok(fg.iter().map(|&x| gh[x]).ne(fh.iter().copied()).then(|| format!("ρ({f},{h}) ≠ ρ({g},{h})∘ρ({f},{g})")))
        })
    })?;
    r.check("sheaf", "compatible families on two-element covers of the whole space glue", || {
        let one = s.one();
        let mut count = 0;
        for a in 0..n {
            for b in a..n {
                if !spectrum.check_standard_cover(one, &[a, b])?.is_standard_cover() {
                    continue;
                }
                for x in 0..sheaf.sections(a).size() {
                    for y in 0..sheaf.sections(b).size() {
                        let family = SectionFamily { element: one, cover: vec![a, b], sections: vec![x, y] };
                        match sheaf.glue(&family) {
                            Ok(_) => count += 1,
                            Err(Error::IncompatibleSections { .. }) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
                sheaf.check_gluing_uniqueness(one, &[a, b])?;
            }
        }
        Ok((count, None))
    })?;
    r.check("sheaf", "global sections recover the algebra", || {
        let rep = sheaf.verify_global_sections()?;
        Ok((rep.families, (!rep.holds()).then(|| format!("{rep:?}"))))
    })?;
    let mut stalks = Vec::new();
    r.check("sheaf", "stalks invert everything outside their prime", || {
        for p in 0..spectrum.len() {
            stalks.push(sheaf.stalk(p)?);
        }
        Ok((stalks.len(), None))
    })?;
    r.check("sheaf", "identity round-trips through spectrum and sections", || {
        let rep = verify_anti_equivalence(&(0..n).collect::<Vec<_>>(), &sheaf, &sheaf)?;
        Ok((1, rep.witness))
    })?;

    if s.is_idempotent() {
        r.check("triadic", "Filippov identity on the algebra, its localizations and stalks", || {
            let mut targets = vec![("T".to_string(), t.clone())];
            targets.extend((0..n).map(|f| (format!("T_{}", s.name(f)), sheaf.sections(f).algebra().clone())));
            targets.extend(stalks.iter().enumerate().map(|(p, st)| (format!("stalk at P{p}"), st.algebra().clone())));
            first_failure(&targets, |(label, a)| filippov_body(label.clone(), a).unwrap_or(Ok(None)))
        })?;
    } else {
        r.skip("triadic", "Filippov identity on the algebra, its localizations and stalks", "addition is not idempotent");
    }
    r.check("triadic", "restrictions commute with the bracket", || {
        let cases = (0..n).flat_map(|f| (0..n).flat_map(move |g| (0..gammas).map(move |c| (f, g, c))));
        let sheaf = &sheaf;
        first_failure(cases.filter(|&(f, g, _)| sheaf.open_contained(g, f)), |&(f, g, c)| {
            Ok((!triadic::verify_restriction_compat(sheaf, f, g, c)?).then(|| format!("ρ({f},{g}) at γ = {c}")))
        })
    })?;
    let autos = triadic::enumerate_gamma_automorphisms_with_cap(t, opts.automorphism_cap.max(opts.cap))?;
    r.check("triadic", "automorphisms act as homeomorphisms preserving the bracket", || {
        first_failure(&autos, |sigma| {
            let act = triadic::automorphism_action(sigma, &spectrum)?;
            Ok((!act.holds()).then(|| format!("{:?}", sigma.map())))
        })
    })?;

    let analysis = LaplacianAnalysis::with_tolerance(spectral::specialization_graph(&spectrum), opts.solver_tolerance)?;
    r.check("spectral", "Laplacian is symmetric with zero row sums and degree diagonal", || {
        Ok((1, (!analysis.matrices.is_well_formed()).then(|| "malformed Laplacian".into())))
    })?;
    r.check("spectral", "eigenpairs have small residuals and orthonormal vectors", || {
        let res = analysis.max_residual();
        let orth = spectral::eigen::orthonormality_defect(&analysis.eigen);
        Ok((analysis.len(), (res > 1e-9 || orth > 1e-9).then(|| format!("residual {res:e}, orthonormality {orth:e}"))))
    })?;
    r.check("spectral", "Fiedler verdict matches union-find components", || {
        analysis.connectivity_verdict()?;
        let z = analysis.zero_multiplicity();
        let c = analysis.components.len();
        Ok((1, (z != c).then(|| format!("{z} zero eigenvalues, {c} components"))))
    })?;
    r.check("spectral", "block decomposition reproduces the spectrum", || {
        let b = analysis.block_decomposition()?;
        Ok((b.block_sizes.len(), (!b.verified).then(|| "block eigenvalues differ".into())))
    })?;
    r.check("spectral", "Laplacian is invariant under every automorphism", || {
        first_failure(&autos, |sigma| Ok((!spectral::check_permutation_invariance(t, sigma)?.holds()).then(|| format!("{:?}", sigma.map()))))
    })?;
    if analysis.components.len() > 1 {
        r.check("spectral", "clustering with one cluster per component is exact", || {
            spectral::spectral_cluster(&analysis, analysis.components.len(), opts.seed)?;
            Ok((1, None))
        })?;
    } else {
        r.skip("spectral", "clustering with one cluster per component is exact", "spectrum is connected");
    }

    let mut subsets: Vec<(String, FuzzySubset)> =
        ideals.iter().map(|&i| (format!("indicator of {i:?}"), FuzzySubset::indicator(n, i))).collect();
    subsets.extend(opts.fuzzy.iter().cloned());
    r.check("fuzzy", "indicators of ideals are fuzzy ideals and fuzzy-ideal cuts are ideals", || {
        first_failure(&subsets, |(label, mu)| {
            let is_ideal = fuzzy::is_fuzzy_gamma_ideal(t, mu)?;
            if label.starts_with("indicator") && !is_ideal {
                return Ok(Some(format!("{label} is not a fuzzy ideal")));
            }
            if is_ideal {
                for alpha in mu.levels() {
                    let cut = fuzzy::alpha_cut(mu, alpha);
                    if !cut.is_empty() && !ideal::is_gamma_ideal(t, cut) {
                        return Ok(Some(format!("{label}: cut at {alpha} is not an ideal")));
                    }
                }
            }
            Ok(None)
        })
    })?;
    r.check("fuzzy", "α-cuts are stable under sup-norm perturbation", || {
        let eps = Grade::new(1, 4);
        first_failure(&subsets, |(label, mu)| {
            let nu = FuzzySubset::new(
                mu.grades().iter().enumerate().map(|(x, g)| {
                    let shifted = if x % 2 == 0 { g - eps } else { g + eps };
                    shifted.clamp(Grade::from_integer(0), Grade::from_integer(1))
                }).collect(),
            )?;
            for alpha in fuzzy::alpha_grid(mu, &nu, eps) {
                fuzzy::verify_stability(mu, &nu, alpha, eps).map_err(|e| match e {
                    Error::Consistency(why) => Error::Consistency(format!("{label}: {why}")),
                    e => e,
                })?;
            }
            Ok(None)
        })
    })?;

    Ok(r.report)
}
