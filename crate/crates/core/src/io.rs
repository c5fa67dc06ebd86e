//! JSON input documents: semiring tables by element name, an optional Γ,
//! fuzzy subsets and scripted section families.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySubset, Grade};
use crate::semiring::{
    validate_gamma_structure, validate_group, validate_semiring, ElementId, FiniteGroup, FiniteSemiring,
    SemiringTables, TernaryGammaSemiring, Violation,
};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GammaDoc {
    pub elements: Vec<String>,
    pub table: Vec<Vec<String>>,
    pub identity: String,
}

/// A section is either `"a"` (meaning `a/1`) or `["a", "s"]`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum SectionDoc {
    Plain(String),
    Fraction(String, String),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GlueScriptDoc {
    pub f: String,
    pub cover: Vec<String>,
    pub sections: Vec<SectionDoc>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub elements: Vec<String>,
    pub add: Vec<Vec<String>>,
    pub mul: Vec<Vec<String>>,
    pub zero: String,
    pub one: String,
    #[serde(default)]
    pub gamma: Option<GammaDoc>,
    #[serde(default)]
    pub units: Option<BTreeMap<String, String>>,
    /// Name → element → rational string. Missing elements have grade 0.
    #[serde(default)]
    pub fuzzy: Option<serde_json::Map<String, Value>>,
    #[serde(default)]
    pub glue_scripts: Vec<GlueScriptDoc>,
}

/// A section family with elements resolved to indices; sections are `(numerator, denominator)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueScript {
    pub f: ElementId,
    pub cover: Vec<ElementId>,
    pub sections: Vec<(ElementId, ElementId)>,
}

#[derive(Clone, Debug)]
pub struct LoadedInput {
    pub algebra: TernaryGammaSemiring,
    pub fuzzy: Vec<(String, FuzzySubset)>,
    pub glue_scripts: Vec<GlueScript>,
}

fn lookup(names: &[String], name: &str, what: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::Input(format!("unknown {what} \"{name}\"")))
}

fn resolve_table(names: &[String], rows: &[Vec<String>], what: &str) -> Result<Vec<Vec<usize>>> {
    let n = names.len();
    if rows.len() != n {
        return Err(Error::Input(format!("{what} table has {} rows, expected {n}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != n {
                return Err(Error::Input(format!("{what} row {i} has {} entries, expected {n}", row.len())));
            }
            row.iter().map(|x| lookup(names, x, "element")).collect()
        })
        .collect()
}

/// Everything that can go wrong in the algebraic data, collected rather than raised.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub semiring: Vec<Violation>,
    pub gamma: Vec<Violation>,
    pub units: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.semiring.is_empty() && self.gamma.is_empty() && self.units.is_empty()
    }

    pub fn all(&self) -> Vec<Violation> {
        self.semiring.iter().chain(&self.gamma).chain(&self.units).cloned().collect()
    }
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed JSON: {e}")))
    }

    pub fn semiring_tables(&self) -> Result<SemiringTables> {
        let names = &self.elements;
        if names.is_empty() {
            return Err(Error::Input("no elements".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(d) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::Input(format!("duplicate element name \"{d}\"")));
        }
        Ok(SemiringTables {
            names: names.clone(),
            add: resolve_table(names, &self.add, "add")?,
            mul: resolve_table(names, &self.mul, "mul")?,
            zero: lookup(names, &self.zero, "element")?,
            one: lookup(names, &self.one, "element")?,
        })
    }

    fn gamma_parts(&self) -> Result<(Vec<String>, Vec<Vec<usize>>, usize)> {
        match &self.gamma {
            None => Ok((vec!["e".into()], vec![vec![0]], 0)),
            Some(g) => Ok((g.elements.clone(), resolve_table(&g.elements, &g.table, "gamma")?, lookup(&g.elements, &g.identity, "Γ element")?)),
        }
    }

    fn unit_indices(&self, semiring_names: &[String], gamma_names: &[String], one: usize) -> Result<Vec<usize>> {
        let Some(units) = &self.units else {
            return Ok(vec![one; gamma_names.len()]);
        };
        for g in units.keys() {
            lookup(gamma_names, g, "Γ element")?;
        }
        gamma_names
            .iter()
            .map(|g| match units.get(g) {
                Some(x) => lookup(semiring_names, x, "element"),
                None => Err(Error::Input(format!("no unit given for Γ element \"{g}\""))),
            })
            .collect()
    }

    /// Axiom violations of the semiring, Γ and unit map. Stops before the unit
    /// check if either structure is invalid.
    pub fn validate(&self) -> Result<ValidationReport> {
        let tables = self.semiring_tables()?;
        let semiring = validate_semiring(&tables)?;
        let (gnames, gtable, gid) = self.gamma_parts()?;
        let gamma = validate_group(&gnames, &gtable, gid)?;
        let mut report = ValidationReport { semiring, gamma, units: Vec::new() };
        if report.is_valid() {
            let s = FiniteSemiring::new(tables)?;
            let g = FiniteGroup::new(gnames.clone(), gtable, gid)?;
            let units = self.unit_indices(s.names(), &gnames, s.one())?;
            report.units = validate_gamma_structure(&s, &g, &units)?;
        }
        Ok(report)
    }

    pub fn algebra(&self) -> Result<TernaryGammaSemiring> {
        let s = FiniteSemiring::new(self.semiring_tables()?)?;
        let (gnames, gtable, gid) = self.gamma_parts()?;
        let g = FiniteGroup::new(gnames.clone(), gtable, gid)?;
        let units = self.unit_indices(s.names(), &gnames, s.one())?;
        TernaryGammaSemiring::new(s, g, units)
    }

    pub fn load(&self) -> Result<LoadedInput> {
        let algebra = self.algebra()?;
        let names = algebra.semiring().names().to_vec();
        let mut fuzzy = Vec::new();
        for (label, grades) in self.fuzzy.iter().flatten() {
            let obj = grades
                .as_object()
                .ok_or_else(|| Error::Input(format!("fuzzy subset \"{label}\" must map elements to rationals")))?;
            let mut g = vec![Grade::from_integer(0); names.len()];
            for (elem, v) in obj {
                let x = lookup(&names, elem, "element")?;
                g[x] = parse_grade(v).map_err(|e| Error::Input(format!("fuzzy subset \"{label}\": {e}")))?;
            }
            fuzzy.push((label.clone(), FuzzySubset::new(g)?));
        }
        let mut glue_scripts = Vec::new();
        for doc in &self.glue_scripts {
            let f = lookup(&names, &doc.f, "element")?;
            let cover = doc.cover.iter().map(|c| lookup(&names, c, "element")).collect::<Result<Vec<_>>>()?;
            if cover.len() != doc.sections.len() {
                return Err(Error::Input(format!(
                    "glue script for \"{}\" has {} cover elements but {} sections",
                    doc.f,
                    cover.len(),
                    doc.sections.len()
                )));
            }
            let sections = doc
                .sections
                .iter()
                .map(|s| match s {
                    SectionDoc::Plain(a) => Ok((lookup(&names, a, "element")?, algebra.semiring().one())),
                    SectionDoc::Fraction(a, d) => Ok((lookup(&names, a, "element")?, lookup(&names, d, "element")?)),
                })
                .collect::<Result<Vec<_>>>()?;
            glue_scripts.push(GlueScript { f, cover, sections });
        }
        Ok(LoadedInput { algebra, fuzzy, glue_scripts })
    }
}

/// Accepts `"p/q"`, `"p"`, or a JSON integer.
pub fn parse_grade(v: &Value) -> Result<Grade> {
    match v {
        Value::String(s) => s.trim().parse::<Grade>().map_err(|e| Error::Input(format!("bad rational \"{s}\": {e}"))),
        Value::Number(n) => n
            .as_i64()
            .map(Grade::from_integer)
            .ok_or_else(|| Error::Input(format!("grade {n} must be an integer or a \"p/q\" string"))),
        other => Err(Error::Input(format!("grade {other} must be a \"p/q\" string"))),
    }
}

/// The input-format document describing `t`.
pub fn algebra_to_json(t: &TernaryGammaSemiring) -> Value {
    let s = t.semiring();
    let g = t.gamma();
    let n = s.size();
    let name = |x: usize| s.name(x).to_string();
    let table = |op: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<String>> {
        (0..n).map(|a| (0..n).map(|b| name(op(a, b))).collect()).collect()
    };
    let m = g.size();
    let gtable: Vec<Vec<String>> = (0..m).map(|a| (0..m).map(|b| g.names()[g.op(a, b)].clone()).collect()).collect();
    let units: serde_json::Map<String, Value> = (0..m).map(|i| (g.names()[i].clone(), json!(name(t.unit(i))))).collect();
    json!({
        "elements": s.names(),
        "add": table(&|a, b| s.add(a, b)),
        "mul": table(&|a, b| s.mul(a, b)),
        "zero": name(s.zero()),
        "one": name(s.one()),
        "gamma": { "elements": g.names(), "table": gtable, "identity": g.names()[g.identity()] },
        "units": units,
    })
}
