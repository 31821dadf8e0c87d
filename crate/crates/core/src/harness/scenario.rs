//! Scenario files: a TOML document describing a space, a base conditional expectation, named
//! elements, partitions and processes, and the checks to run on them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::condexp::ConditionalExpectation;
use crate::error::RieszError;
use crate::markov::Process;
use crate::partition::Partition;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::riesz::{RieszElement, SampleSpace, Space};

pub const FORMAT_VERSION: u32 = 1;

/// Names that refer to built-in partitions and may not be redefined.
pub const RESERVED_PARTITIONS: [&str; 3] = ["base", "trivial", "discrete"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    Parse { line: usize, column: usize, message: String },
    Unresolved { location: String, name: String },
    Invariant { location: String, message: String },
    UnsupportedVersion(u32),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Parse { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            ScenarioError::Unresolved { location, name } => write!(f, "{location}: unknown name {name:?}"),
            ScenarioError::Invariant { location, message } => write!(f, "{location}: {message}"),
            ScenarioError::UnsupportedVersion(v) => {
                write!(f, "unsupported format_version {v}, expected {FORMAT_VERSION}")
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

fn invariant(location: impl Into<String>, message: impl fmt::Display) -> ScenarioError {
    ScenarioError::Invariant {
        location: location.into(),
        message: message.to_string(),
    }
}

fn unresolved(location: impl Into<String>, name: &str) -> ScenarioError {
    ScenarioError::Unresolved {
        location: location.into(),
        name: name.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub space: SpaceDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub elements: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub partitions: BTreeMap<String, PartitionDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub processes: BTreeMap<String, ProcessDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub atoms: Vec<String>,
    pub weights: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseDoc {
    /// Blocks of the partition of `T`; trivial when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<String>>>,
    /// Values of the unit `e`; all ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<String>>,
}

/// Either explicit blocks or the partition generated over the base by named elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PartitionDoc {
    Blocks(Vec<Vec<String>>),
    Generated { generated_by: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessDoc {
    pub times: Vec<i64>,
    pub elements: Vec<String>,
}

/// One requested check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    /// Exhaustive subspace independence over the base.
    Independent { e1: String, e2: String },
    /// Every independence route plus the classical oracle, under the base unit and `units`.
    IndependenceAgreement {
        e1: String,
        e2: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        units: Vec<String>,
    },
    /// Independence with respect to a finer conditional expectation onto `given`.
    IndependentGiven { e1: String, e2: String, given: String },
    /// Family independence over named partitions.
    FamilyIndependent {
        members: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_pair_size: Option<usize>,
    },
    /// Self-independent band projections are exactly the unions of base blocks.
    SelfIndependence,
    Markov { process: String },
    /// The characterizations of the Markov property return the same verdict.
    MarkovAgreement { process: String },
    FutureProducts { process: String },
    ChapmanKolmogorov { process: String },
    PastFuture { process: String },
    /// Martingale property under the natural filtration.
    Martingale { process: String },
    /// Brownian axioms for the process read as partial sums of its increments.
    Brownian { process: String },
    /// `T|S_n| ≤ bound` for the increments of the process.
    BoundedSums {
        process: String,
        bound: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<usize>,
    },
    /// Block averages against the normal-equation projection.
    CondexpOracle { partition: String },
    /// The expectation onto `partition` is the unique solution of the Radon-Nikodym system.
    RadonNikodym { partition: String },
    CondexpAxioms { partition: String },
    WeakOrderUnit { element: String },
    BandSupFormula { f: String, g: String },
}

impl Check {
    pub fn kind(&self) -> &'static str {
        match self {
            Check::Independent { .. } => "independent",
            Check::IndependenceAgreement { .. } => "independence_agreement",
            Check::IndependentGiven { .. } => "independent_given",
            Check::FamilyIndependent { .. } => "family_independent",
            Check::SelfIndependence => "self_independence",
            Check::Markov { .. } => "markov",
            Check::MarkovAgreement { .. } => "markov_agreement",
            Check::FutureProducts { .. } => "future_products",
            Check::ChapmanKolmogorov { .. } => "chapman_kolmogorov",
            Check::PastFuture { .. } => "past_future",
            Check::Martingale { .. } => "martingale",
            Check::Brownian { .. } => "brownian",
            Check::BoundedSums { .. } => "bounded_sums",
            Check::CondexpOracle { .. } => "condexp_oracle",
            Check::RadonNikodym { .. } => "radon_nikodym",
            Check::CondexpAxioms { .. } => "condexp_axioms",
            Check::WeakOrderUnit { .. } => "weak_order_unit",
            Check::BandSupFormula { .. } => "band_sup_formula",
        }
    }

    /// `kind(arg, ...)`, used as the check label in reports.
    pub fn label(&self) -> String {
        let args: Vec<String> = match self {
            Check::Independent { e1, e2 } => vec![e1.clone(), e2.clone()],
            Check::IndependenceAgreement { e1, e2, units } => {
                let mut v = vec![e1.clone(), e2.clone()];
                v.extend(units.iter().map(|u| format!("unit={u}")));
                v
            }
            Check::IndependentGiven { e1, e2, given } => vec![e1.clone(), e2.clone(), format!("given={given}")],
            Check::FamilyIndependent { members, max_pair_size } => {
                let mut v = members.clone();
                if let Some(m) = max_pair_size {
                    v.push(format!("max_pair_size={m}"));
                }
                v
            }
            Check::SelfIndependence => vec![],
            Check::Markov { process }
            | Check::MarkovAgreement { process }
            | Check::FutureProducts { process }
            | Check::ChapmanKolmogorov { process }
            | Check::PastFuture { process }
            | Check::Martingale { process }
            | Check::Brownian { process } => vec![process.clone()],
            Check::BoundedSums { process, bound, horizon } => {
                let mut v = vec![process.clone(), format!("bound={bound}")];
                if let Some(h) = horizon {
                    v.push(format!("horizon={h}"));
                }
                v
            }
            Check::CondexpOracle { partition } | Check::RadonNikodym { partition } | Check::CondexpAxioms { partition } => {
                vec![partition.clone()]
            }
            Check::WeakOrderUnit { element } => vec![element.clone()],
            Check::BandSupFormula { f, g } => vec![f.clone(), g.clone()],
        };
        format!("{}({})", self.kind(), args.join(", "))
    }
}

/// A fully resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub doc: ScenarioDoc,
    pub space: Space,
    pub base: ConditionalExpectation,
    pub unit: RieszElement,
    pub elements: BTreeMap<String, RieszElement>,
    pub partitions: BTreeMap<String, Partition>,
    pub processes: BTreeMap<String, Process>,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, column)
}

/// Parses and resolves scenario text.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = toml::from_str(text).map_err(|err| {
        let (line, column) = err.span().map_or((0, 0), |s| line_column(text, s.start));
        ScenarioError::Parse {
            line,
            column,
            message: err.message().to_string(),
        }
    })?;
    resolve(doc)
}

fn parse_values(location: &str, raw: &[String]) -> Result<Vec<Rational>, ScenarioError> {
    raw.iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).map_err(|m| invariant(format!("{location}[{i}]"), m)))
        .collect()
}

fn element_from(space: &Space, location: &str, raw: &[String]) -> Result<RieszElement, ScenarioError> {
    if raw.len() != space.len() {
        return Err(invariant(
            location,
            format!("{} values for {} atoms", raw.len(), space.len()),
        ));
    }
    RieszElement::new(space, parse_values(location, raw)?).map_err(|e| invariant(location, e))
}

fn blocks_from(space: &Space, location: &str, raw: &[Vec<String>]) -> Result<Partition, ScenarioError> {
    let blocks = raw
        .iter()
        .enumerate()
        .map(|(b, block)| {
            block
                .iter()
                .enumerate()
                .map(|(i, atom)| {
                    space
                        .index_of(atom)
                        .ok_or_else(|| unresolved(format!("{location}[{b}][{i}]"), atom))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Partition::new(space, blocks).map_err(|e| invariant(location, e))
}

/// Resolves a validated document into kernel objects.
pub fn resolve(doc: ScenarioDoc) -> Result<Scenario, ScenarioError> {
    if doc.format_version != FORMAT_VERSION {
        return Err(ScenarioError::UnsupportedVersion(doc.format_version));
    }
    let weights = parse_values("space.weights", &doc.space.weights)?;
    let space = SampleSpace::new(doc.space.atoms.clone(), weights).map_err(|e| match e {
        RieszError::InvalidSpace(m) => invariant("space", m),
        other => invariant("space", other),
    })?;
    let base_doc = doc.base.clone().unwrap_or(BaseDoc { blocks: None, unit: None });
    let base_partition = match &base_doc.blocks {
        Some(blocks) => blocks_from(&space, "base.blocks", blocks)?,
        None => Partition::trivial(&space),
    };
    let base = ConditionalExpectation::new(base_partition);
    let unit = match &base_doc.unit {
        Some(raw) => element_from(&space, "base.unit", raw)?,
        None => RieszElement::one(&space),
    };
    if !unit.is_weak_order_unit().unwrap_or(false) {
        return Err(invariant("base.unit", "unit must be strictly positive"));
    }
    if base.apply(&unit).map_err(|e| invariant("base.unit", e))? != unit {
        return Err(invariant("base.unit", "unit not T-invariant"));
    }

    let mut elements = BTreeMap::new();
    for (name, raw) in &doc.elements {
        elements.insert(name.clone(), element_from(&space, &format!("elements.{name}"), raw)?);
    }

    let mut partitions = BTreeMap::new();
    partitions.insert("base".to_string(), base.partition().clone());
    partitions.insert("trivial".to_string(), Partition::trivial(&space));
    partitions.insert("discrete".to_string(), Partition::discrete(&space));
    for (name, def) in &doc.partitions {
        let location = format!("partitions.{name}");
        if RESERVED_PARTITIONS.contains(&name.as_str()) {
            return Err(invariant(location, "reserved partition name"));
        }
        let p = match def {
            PartitionDoc::Blocks(blocks) => blocks_from(&space, &location, blocks)?,
            PartitionDoc::Generated { generated_by } => {
                let xs = generated_by
                    .iter()
                    .enumerate()
                    .map(|(i, n)| {
                        elements
                            .get(n)
                            .ok_or_else(|| unresolved(format!("{location}.generated_by[{i}]"), n))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                base.partition().generated(&xs).map_err(|e| invariant(&location, e))?
            }
        };
        partitions.insert(name.clone(), p);
    }

    let mut processes = BTreeMap::new();
    for (name, def) in &doc.processes {
        let location = format!("processes.{name}");
        let xs = def
            .elements
            .iter()
            .enumerate()
            .map(|(i, n)| {
                elements
                    .get(n)
                    .cloned()
                    .ok_or_else(|| unresolved(format!("{location}.elements[{i}]"), n))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let proc = Process::new(base.clone(), unit.clone(), def.times.clone(), xs).map_err(|e| invariant(&location, e))?;
        processes.insert(name.clone(), proc);
    }

    let scenario = Scenario {
        doc,
        space,
        base,
        unit,
        elements,
        partitions,
        processes,
    };
    for (i, check) in scenario.doc.checks.iter().enumerate() {
        scenario.validate_check(&format!("checks[{i}]"), check)?;
    }
    Ok(scenario)
}

impl Scenario {
    pub fn name(&self) -> &str {
        self.doc.name.as_deref().unwrap_or("unnamed")
    }

    pub fn element(&self, name: &str) -> Option<&RieszElement> {
        self.elements.get(name)
    }

    pub fn partition(&self, name: &str) -> Option<&Partition> {
        self.partitions.get(name)
    }

    pub fn process(&self, name: &str) -> Option<&Process> {
        self.processes.get(name)
    }

    fn validate_check(&self, location: &str, check: &Check) -> Result<(), ScenarioError> {
        let part = |field: &str, n: &str| {
            self.partitions
                .contains_key(n)
                .then_some(())
                .ok_or_else(|| unresolved(format!("{location}.{field}"), n))
        };
        let elem = |field: &str, n: &str| {
            self.elements
                .contains_key(n)
                .then_some(())
                .ok_or_else(|| unresolved(format!("{location}.{field}"), n))
        };
        let proc = |n: &str| {
            self.processes
                .contains_key(n)
                .then_some(())
                .ok_or_else(|| unresolved(format!("{location}.process"), n))
        };
        match check {
            Check::Independent { e1, e2 } => {
                part("e1", e1)?;
                part("e2", e2)
            }
            Check::IndependenceAgreement { e1, e2, units } => {
                part("e1", e1)?;
                part("e2", e2)?;
                units.iter().try_for_each(|u| elem("units", u))
            }
            Check::IndependentGiven { e1, e2, given } => {
                part("e1", e1)?;
                part("e2", e2)?;
                part("given", given)
            }
            Check::FamilyIndependent { members, .. } => members.iter().try_for_each(|m| part("members", m)),
            Check::SelfIndependence => Ok(()),
            Check::Markov { process }
            | Check::MarkovAgreement { process }
            | Check::FutureProducts { process }
            | Check::ChapmanKolmogorov { process }
            | Check::PastFuture { process }
            | Check::Martingale { process }
            | Check::Brownian { process } => proc(process),
            Check::BoundedSums { process, bound, .. } => {
                proc(process)?;
                elem("bound", bound)
            }
            Check::CondexpOracle { partition } | Check::RadonNikodym { partition } | Check::CondexpAxioms { partition } => {
                part("partition", partition)
            }
            Check::WeakOrderUnit { element } => elem("element", element),
            Check::BandSupFormula { f, g } => {
                elem("f", f)?;
                elem("g", g)
            }
        }
    }

    /// Canonical text: keys sorted, rationals reduced.
    pub fn to_text(&self) -> String {
        serialize_doc(&canonical_doc(&self.doc))
    }
}

fn canon(values: &[String]) -> Vec<String> {
    values
        .iter()
        .map(|v| parse_rational(v).map_or_else(|_| v.clone(), |q| format_rational(&q)))
        .collect()
}

/// The document with every rational literal in reduced form.
pub fn canonical_doc(doc: &ScenarioDoc) -> ScenarioDoc {
    let mut out = doc.clone();
    out.space.weights = canon(&doc.space.weights);
    if let Some(base) = &mut out.base {
        if let Some(u) = &base.unit {
            base.unit = Some(canon(u));
        }
    }
    for v in out.elements.values_mut() {
        *v = canon(v);
    }
    out
}

pub fn serialize_doc(doc: &ScenarioDoc) -> String {
    toml::to_string(doc).expect("scenario documents always serialize")
}

/// Renders rationals as scenario literals.
pub fn literals(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    const TWO_COIN: &str = r#"
format_version = 1
name = "coins"

[space]
atoms = ["HH", "HT", "TH", "TT"]
weights = ["1/4", "1/4", "1/4", "1/4"]

[elements]
c1 = ["1", "1", "-1", "-1"]
c2 = ["1", "-1", "1", "-1"]

[partitions]
first = [["HH", "HT"], ["TH", "TT"]]
second = { generated_by = ["c2"] }

[processes.walk]
times = [1, 2]
elements = ["c1", "c2"]

[[checks]]
kind = "independent"
e1 = "first"
e2 = "second"

[[checks]]
kind = "self_independence"
"#;

    #[test]
    fn loads_two_coin() {
        let s = load_scenario(TWO_COIN).unwrap();
        assert_eq!(s.space.len(), 4);
        assert_eq!(s.partition("second").unwrap().describe(), "{{HH,TH},{HT,TT}}");
        assert_eq!(s.doc.checks.len(), 2);
        assert_eq!(s.doc.checks[0].label(), "independent(first, second)");
        assert!(s.base.partition().is_trivial());
        assert_eq!(s.process("walk").unwrap().times(), [1, 2]);
    }

    #[test]
    fn exact_thirds() {
        let text = "format_version = 1\n[space]\natoms = [\"a\", \"b\", \"c\"]\nweights = [\"1/3\", \"1/3\", \"1/3\"]\n";
        let s = load_scenario(text).unwrap();
        assert!(s.space.weights().iter().all(|w| *w == rat(1, 3)));
    }

    #[test]
    fn weights_must_sum_to_one() {
        let text = "format_version = 1\n[space]\natoms = [\"a\", \"b\"]\nweights = [\"1/2\", \"2/5\"]\n";
        let err = load_scenario(text).unwrap_err();
        assert!(matches!(err, ScenarioError::Invariant { .. }));
        assert!(err.to_string().contains("9/10"), "{err}");
    }

    #[test]
    fn distinct_error_kinds() {
        let parse = load_scenario("format_version = 1\n[space\n").unwrap_err();
        assert!(matches!(parse, ScenarioError::Parse { line: 2, .. }), "{parse:?}");
        let unknown = TWO_COIN.replace("e2 = \"second\"", "e2 = \"nope\"");
        assert_eq!(
            load_scenario(&unknown).unwrap_err(),
            ScenarioError::Unresolved {
                location: "checks[0].e2".into(),
                name: "nope".into()
            }
        );
        let version = TWO_COIN.replace("format_version = 1", "format_version = 7");
        assert_eq!(load_scenario(&version).unwrap_err(), ScenarioError::UnsupportedVersion(7));
        let bad_rational = TWO_COIN.replace("\"1\", \"1\", \"-1\", \"-1\"", "\"1\", \"0.5\", \"-1\", \"-1\"");
        let err = load_scenario(&bad_rational).unwrap_err();
        assert!(matches!(&err, ScenarioError::Invariant { location, .. } if location == "elements.c1[1]"), "{err:?}");
        let bad_unit = TWO_COIN.replace("[elements]", "[base]\nunit = [\"1\", \"2\", \"1\", \"1\"]\n\n[elements]");
        assert!(load_scenario(&bad_unit).unwrap_err().to_string().contains("T-invariant"));
    }

    #[test]
    fn round_trip_is_canonical() {
        let text = TWO_COIN.replace("\"1/4\", \"1/4\", \"1/4\", \"1/4\"", "\"2/8\", \"1/4\", \"3/12\", \"1/4\"");
        let s = load_scenario(&text).unwrap();
        let out = s.to_text();
        let again = load_scenario(&out).unwrap();
        assert_eq!(again.doc, canonical_doc(&s.doc));
        assert_eq!(again.to_text(), out);
        assert!(!out.contains("2/8"));
    }
}
