//! JSON input documents. Every exact number travels as a fraction string,
//! never as a JSON float.

use std::collections::HashMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use novarch::complexes::{build_telescope, validate_floer_type, FloerTypeComplex, Grading, OneRay, ValuedComplex};
use novarch::linalg::{NovMatrix, ValuedBasis};
use novarch::novikov::{NovikovElement, Valuation};
use novarch::rational::Rat;

use crate::error::CliError;

pub const COMPLEX_VERSION: &str = "novarch/complex/1";
pub const TAU_VERSION: &str = "novarch/tau/1";
pub const RIGIDITY_VERSION: &str = "novarch/rigidity/1";

/// An exact rational written as `"p"`, `"p/q"` or a finite decimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frac(pub Rat);

impl Serialize for Frac {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Frac {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse::<Rat>().map(Frac).map_err(|_| serde::de::Error::custom(format!("`{s}` is not an exact fraction")))
    }
}

impl From<&Rat> for Frac {
    fn from(r: &Rat) -> Self {
        Frac(r.clone())
    }
}

/// `[[exponent, coefficient], ...]` for `Σ c T^e`.
pub type Terms = Vec<(Frac, Frac)>;

fn element(terms: &Terms, precision: &Rat) -> NovikovElement {
    NovikovElement::from_terms(terms.iter().map(|(e, c)| (e.0.clone(), c.0.clone())), Valuation::Finite(precision.clone()))
}

fn terms_of(x: &NovikovElement) -> Terms {
    x.terms().iter().map(|(e, c)| (Frac(e.clone()), Frac(c.clone()))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradingTag {
    Z,
    Z2,
}

impl From<GradingTag> for Grading {
    fn from(g: GradingTag) -> Self {
        match g {
            GradingTag::Z => Grading::Z,
            GradingTag::Z2 => Grading::Z2,
        }
    }
}

fn default_grading() -> GradingTag {
    GradingTag::Z
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
    pub action: Frac,
    #[serde(default)]
    pub outside: bool,
}

/// The coefficient of `to` in `d(from)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub from: String,
    pub to: String,
    pub terms: Terms,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    #[serde(default)]
    pub hbar: Option<Frac>,
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub differential: Vec<Entry>,
}

/// `continuations[i]` maps stage `i` to stage `i + 1`, with `from` naming a
/// generator of stage `i` and `to` one of stage `i + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RaySection {
    pub stages: Vec<Stage>,
    #[serde(default)]
    pub continuations: Vec<Vec<Entry>>,
}

/// A Floer-type complex in a lattice basis: generator actions are the norm
/// valuations, differential coefficients are taken relative to that basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub version: String,
    pub precision: Frac,
    pub hbar: Frac,
    #[serde(default = "default_grading")]
    pub grading: GradingTag,
    #[serde(default)]
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub differential: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<RaySection>,
}

/// Command-line values that replace document fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub precision: Option<Rat>,
    pub hbar: Option<Rat>,
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", escape(key))),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    out
}

/// Keys present in `input` but absent from the re-serialized `known`.
fn unknown_fields(input: &Value, known: &Value, at: &str, out: &mut Vec<String>) {
    match (input, known) {
        (Value::Object(a), Value::Object(b)) => {
            for (k, v) in a {
                let p = format!("{at}/{}", escape(k));
                match b.get(k) {
                    None if !v.is_null() => out.push(p),
                    None => {}
                    Some(kv) => unknown_fields(v, kv, &p, out),
                }
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                unknown_fields(x, y, &format!("{at}/{i}"), out);
            }
        }
        _ => {}
    }
}

/// Parses a document; unless `lax`, any field the schema does not know is
/// rejected with its pointer.
pub fn parse<T: DeserializeOwned + Serialize>(text: &str, lax: bool) -> Result<T, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let doc: T = serde_path_to_error::deserialize(&value).map_err(|e| CliError::schema(pointer_of(e.path()), e.inner().to_string()))?;
    if !lax {
        let known = serde_json::to_value(&doc).map_err(|e| CliError::Parse(e.to_string()))?;
        let mut extra = Vec::new();
        unknown_fields(&value, &known, "", &mut extra);
        if let Some(p) = extra.into_iter().next() {
            return Err(CliError::schema(p, "unknown field (pass --lax to ignore)"));
        }
    }
    Ok(doc)
}

fn check_version(found: &str, expected: &str, at: &str) -> Result<(), CliError> {
    if found == expected {
        Ok(())
    } else {
        Err(CliError::schema(at, format!("unsupported version `{found}`, expected `{expected}`")))
    }
}

fn positive(r: &Rat, at: &str, what: &str) -> Result<(), CliError> {
    if r.is_positive() {
        Ok(())
    } else {
        Err(CliError::schema(at, format!("{what} must be positive, got {r}")))
    }
}

fn index_names<'a>(gens: &'a [Generator], at: &str) -> Result<HashMap<&'a str, usize>, CliError> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (j, g) in gens.iter().enumerate() {
        if let Some(first) = seen.insert(&g.name, j) {
            return Err(CliError::schema(
                format!("{at}/generators/{j}/name"),
                format!("duplicate generator name `{}` (first at {at}/generators/{first})", g.name),
            ));
        }
    }
    Ok(seen)
}

/// Fills `rows × cols` from entries; `from` indexes columns, `to` rows.
fn fill(
    entries: &[Entry],
    sources: &HashMap<&str, usize>,
    targets: &HashMap<&str, usize>,
    shape: (usize, usize),
    precision: &Rat,
    at: &str,
) -> Result<NovMatrix, CliError> {
    let mut m = NovMatrix::zeros(shape.0, shape.1, Valuation::Finite(precision.clone()));
    let mut seen = HashMap::new();
    for (k, e) in entries.iter().enumerate() {
        let j = *sources.get(e.from.as_str()).ok_or_else(|| CliError::schema(format!("{at}/{k}/from"), format!("unknown generator `{}`", e.from)))?;
        let i = *targets.get(e.to.as_str()).ok_or_else(|| CliError::schema(format!("{at}/{k}/to"), format!("unknown generator `{}`", e.to)))?;
        if let Some(first) = seen.insert((i, j), k) {
            return Err(CliError::schema(format!("{at}/{k}"), format!("entry {} → {} repeats {at}/{first}", e.from, e.to)));
        }
        m.set(i, j, element(&e.terms, precision));
    }
    Ok(m)
}

fn build_stage(gens: &[Generator], diff: &[Entry], grading: Grading, hbar: &Rat, precision: &Rat, at: &str) -> Result<FloerTypeComplex, CliError> {
    if gens.is_empty() {
        return Err(CliError::schema(format!("{at}/generators"), "a complex needs at least one generator"));
    }
    let names = index_names(gens, at)?;
    let n = gens.len();
    let basis = ValuedBasis::new(
        gens.iter().map(|g| g.name.clone()).collect(),
        gens.iter().map(|g| g.degree).collect(),
        gens.iter().map(|g| g.action.0.clone()).collect(),
    );
    let d = fill(diff, &names, &names, (n, n), precision, &format!("{at}/differential"))?;
    let complex = ValuedComplex::new(basis, grading, d, precision.clone()).map_err(|e| CliError::invariant(at, e.to_string()))?;
    if let Some(v) = validate_floer_type(&complex, hbar).first() {
        let pointer = names.get(v.generator.as_str()).map_or_else(|| format!("{at}/hbar"), |j| format!("{at}/generators/{j}"));
        return Err(CliError::invariant(pointer, format!("{:?} condition fails: {}", v.condition, v.detail)));
    }
    let outside = gens.iter().map(|g| g.outside).collect();
    FloerTypeComplex::new(complex, hbar.clone(), outside).map_err(|e| CliError::invariant(at, e.to_string()))
}

impl ComplexDocument {
    /// Builds the complex, or the telescope when the document holds a ray.
    pub fn build(&self, o: &Overrides) -> Result<FloerTypeComplex, CliError> {
        check_version(&self.version, COMPLEX_VERSION, "/version")?;
        let precision = o.precision.clone().unwrap_or_else(|| self.precision.0.clone());
        let hbar = o.hbar.clone().unwrap_or_else(|| self.hbar.0.clone());
        positive(&precision, "/precision", "precision")?;
        positive(&hbar, "/hbar", "hbar")?;
        let grading = self.grading.into();
        let Some(ray) = &self.ray else {
            return build_stage(&self.generators, &self.differential, grading, &hbar, &precision, "");
        };
        if !self.generators.is_empty() || !self.differential.is_empty() {
            return Err(CliError::schema("/ray", "a ray document lists generators per stage, not at the top level"));
        }
        if ray.stages.is_empty() {
            return Err(CliError::schema("/ray/stages", "a ray needs at least one stage"));
        }
        if ray.continuations.len() + 1 != ray.stages.len() {
            return Err(CliError::schema(
                "/ray/continuations",
                format!("{} stages need {} continuation maps, got {}", ray.stages.len(), ray.stages.len() - 1, ray.continuations.len()),
            ));
        }
        let mut stages = Vec::with_capacity(ray.stages.len());
        for (s, st) in ray.stages.iter().enumerate() {
            let h = st.hbar.as_ref().map_or(&hbar, |f| &f.0);
            stages.push(build_stage(&st.generators, &st.differential, grading, h, &precision, &format!("/ray/stages/{s}"))?);
        }
        let mut maps = Vec::with_capacity(ray.continuations.len());
        for (i, entries) in ray.continuations.iter().enumerate() {
            let (a, b) = (&ray.stages[i].generators, &ray.stages[i + 1].generators);
            let (src, tgt) = (index_names(a, &format!("/ray/stages/{i}"))?, index_names(b, &format!("/ray/stages/{}", i + 1))?);
            maps.push(fill(entries, &src, &tgt, (b.len(), a.len()), &precision, &format!("/ray/continuations/{i}"))?);
        }
        let tel = build_telescope(&OneRay { stages, maps }).map_err(|e| CliError::invariant("/ray", e.to_string()))?;
        Ok(tel.complex)
    }

    /// The canonical document of a complex: generators in basis order,
    /// entries by source then target, terms by exponent.
    pub fn emit(c: &FloerTypeComplex) -> ComplexDocument {
        let b = c.basis();
        let generators = (0..b.len())
            .map(|j| Generator { name: b.names[j].clone(), degree: b.degrees[j], action: Frac(b.weights[j].clone()), outside: c.outside[j] })
            .collect();
        let mut nz: Vec<(usize, usize, &NovikovElement)> = c.complex.d.nonzero_entries().collect();
        nz.sort_by_key(|&(i, j, _)| (j, i));
        let differential = nz.into_iter().map(|(i, j, x)| Entry { from: b.names[j].clone(), to: b.names[i].clone(), terms: terms_of(x) }).collect();
        ComplexDocument {
            version: COMPLEX_VERSION.into(),
            precision: Frac(c.precision().clone()),
            hbar: Frac(c.hbar.clone()),
            grading: match c.complex.grading {
                Grading::Z => GradingTag::Z,
                Grading::Z2 => GradingTag::Z2,
            },
            generators,
            differential,
            ray: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }
}

/// The star shape `{points} ∪ rays ∪ full lines` in boundary coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarSpec {
    #[serde(default)]
    pub points: Vec<Vec<Frac>>,
    #[serde(default)]
    pub rays: Vec<Vec<Frac>>,
    #[serde(default)]
    pub full_lines: Vec<Vec<Frac>>,
}

/// Lattice `Z^m` with `w0` and a `k × m` boundary map, a flux polytope,
/// and either classes to evaluate `τ` on, a star shape for the dual cone,
/// or both.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauDocument {
    #[serde(default)]
    pub version: Option<String>,
    pub m: usize,
    pub k: usize,
    pub w0: Vec<Frac>,
    pub boundary: Vec<Vec<i64>>,
    pub polytope_vertices: Vec<Vec<Frac>>,
    #[serde(default)]
    pub classes: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub star: Option<StarSpec>,
}

fn rats(v: &[Frac]) -> Vec<Rat> {
    v.iter().map(|f| f.0.clone()).collect()
}

fn rat_rows(v: &[Vec<Frac>]) -> Vec<Vec<Rat>> {
    v.iter().map(|r| rats(r)).collect()
}

fn lengths<T>(rows: &[Vec<T>], want: usize, at: &str) -> Result<(), CliError> {
    match rows.iter().position(|r| r.len() != want) {
        Some(i) => Err(CliError::schema(format!("{at}/{i}"), format!("expected {want} entries, got {}", rows[i].len()))),
        None => Ok(()),
    }
}

impl TauDocument {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(v) = &self.version {
            check_version(v, TAU_VERSION, "/version")?;
        }
        if self.w0.len() != self.m {
            return Err(CliError::schema("/w0", format!("expected m = {} entries, got {}", self.m, self.w0.len())));
        }
        if self.boundary.len() != self.k {
            return Err(CliError::schema("/boundary", format!("expected k = {} rows, got {}", self.k, self.boundary.len())));
        }
        lengths(&self.boundary, self.m, "/boundary")?;
        if self.polytope_vertices.is_empty() {
            return Err(CliError::schema("/polytope_vertices", "the polytope needs at least one vertex"));
        }
        lengths(&self.polytope_vertices, self.k, "/polytope_vertices")?;
        if let Some(c) = &self.classes {
            lengths(c, self.m, "/classes")?;
        }
        if let Some(s) = &self.star {
            lengths(&s.points, self.k, "/star/points")?;
            lengths(&s.rays, self.k, "/star/rays")?;
            lengths(&s.full_lines, self.k, "/star/full_lines")?;
        }
        if self.classes.is_none() && self.star.is_none() {
            return Err(CliError::schema("", "give `classes`, `star`, or both"));
        }
        Ok(())
    }

    pub fn w0(&self) -> Vec<Rat> {
        rats(&self.w0)
    }

    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        rat_rows(&self.polytope_vertices)
    }

    pub fn star_shape(&self) -> Option<novarch::tauflux::StarShape> {
        self.star.as_ref().map(|s| novarch::tauflux::StarShape {
            points: rat_rows(&s.points),
            rays: rat_rows(&s.rays),
            full_lines: rat_rows(&s.full_lines),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub r1: Frac,
    pub r2: Frac,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Tate {
        vars: usize,
        truncation: usize,
        precision: Frac,
    },
    Polyannulus {
        annuli: Vec<AnnulusSpec>,
        truncation: usize,
        precision: Frac,
    },
    /// `{|x| ≤ 1, |λ + x₁| ≥ e^{−r}}` in the unit ball of dimension `dim`.
    Laurent {
        dim: usize,
        lambda: Terms,
        r: Frac,
        truncation: usize,
        precision: Frac,
    },
}

/// One monomial of an affinoid element with its Novikov coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialTerm {
    pub monomial: Vec<i64>,
    pub terms: Terms,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub value: Vec<MonomialTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductSpec {
    /// The undeformed product.
    Reference,
    /// `x * y = xy(1 + T^λ u)`.
    Twist { lambda: Frac, u: Vec<MonomialTerm> },
    /// Listed basis products; everything else is undeformed.
    Table(Vec<TableRow>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    /// `γ` with closeness `c = e^{−γ}`.
    pub closeness: Frac,
    pub product: ProductSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityDocument {
    #[serde(default)]
    pub version: Option<String>,
    pub model: ModelSpec,
    pub perturbation: PerturbationSpec,
}

impl RigidityDocument {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(v) = &self.version {
            check_version(v, RIGIDITY_VERSION, "/version")?;
        }
        let arity = self.arity();
        let check = |m: &[i64], at: String| -> Result<(), CliError> {
            if m.len() == arity {
                Ok(())
            } else {
                Err(CliError::schema(at, format!("monomial has {} exponents, the model has {arity} variables", m.len())))
            }
        };
        match &self.perturbation.product {
            ProductSpec::Reference => {}
            ProductSpec::Twist { u, .. } => {
                for (i, t) in u.iter().enumerate() {
                    check(&t.monomial, format!("/perturbation/product/twist/u/{i}/monomial"))?;
                }
            }
            ProductSpec::Table(rows) => {
                for (i, row) in rows.iter().enumerate() {
                    let at = format!("/perturbation/product/table/{i}");
                    check(&row.a, format!("{at}/a"))?;
                    check(&row.b, format!("{at}/b"))?;
                    for (k, t) in row.value.iter().enumerate() {
                        check(&t.monomial, format!("{at}/value/{k}/monomial"))?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        match &self.model {
            ModelSpec::Tate { vars, .. } => *vars,
            ModelSpec::Polyannulus { annuli, .. } => annuli.len(),
            ModelSpec::Laurent { dim, .. } => *dim,
        }
    }

    pub fn precision(&self) -> Rat {
        match &self.model {
            ModelSpec::Tate { precision, .. } | ModelSpec::Polyannulus { precision, .. } | ModelSpec::Laurent { precision, .. } => precision.0.clone(),
        }
    }
}

/// A sum of monomials at precision `e`.
pub fn aff_element(terms: &[MonomialTerm], e: &Rat) -> novarch::rigidity::AffElement {
    terms.iter().fold(novarch::rigidity::AffElement::default(), |acc, t| {
        acc.add(&novarch::rigidity::AffElement::monomial(t.monomial.clone(), element(&t.terms, e)))
    })
}

pub fn novikov(terms: &Terms, e: &Rat) -> NovikovElement {
    element(terms, e)
}

pub fn aff_terms(x: &novarch::rigidity::AffElement) -> Vec<MonomialTerm> {
    x.terms.iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| MonomialTerm { monomial: m.clone(), terms: terms_of(c) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{"version": "novarch/complex/1", "precision": "10", "hbar": "1/2",
            "generators": [{"name": "x", "degree": 0, "action": "0"}], "differential": []}"#
    }

    #[test]
    fn minimal_document_builds() {
        let doc: ComplexDocument = parse(minimal(), false).unwrap();
        assert_eq!(doc.grading, GradingTag::Z);
        let c = doc.build(&Overrides::default()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.basis().names, vec!["x"]);
    }

    #[test]
    fn unknown_fields_are_pointed_at() {
        let text = minimal().replace(r#""action": "0""#, r#""action": "0", "colour": "red""#);
        let err = parse::<ComplexDocument>(&text, false).unwrap_err();
        assert_eq!(err.pointer(), Some("/generators/0/colour"));
        assert!(parse::<ComplexDocument>(&text, true).is_ok());
    }

    #[test]
    fn type_errors_carry_the_path() {
        let text = minimal().replace(r#""degree": 0"#, r#""degree": "zero""#);
        let err = parse::<ComplexDocument>(&text, false).unwrap_err();
        assert_eq!(err.pointer(), Some("/generators/0/degree"));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn floats_are_not_fractions() {
        let text = minimal().replace(r#""hbar": "1/2""#, r#""hbar": 0.5"#);
        assert_eq!(parse::<ComplexDocument>(&text, false).unwrap_err().pointer(), Some("/hbar"));
        let text = minimal().replace(r#""hbar": "1/2""#, r#""hbar": "0.5""#);
        let doc: ComplexDocument = parse(&text, false).unwrap();
        assert_eq!(doc.hbar.0, Rat::new(1, 2));
    }

    #[test]
    fn bad_references_and_repeats() {
        let text = r#"{"version": "novarch/complex/1", "precision": "10", "hbar": "1",
            "generators": [{"name": "x", "degree": 0, "action": "0"}, {"name": "y", "degree": 1, "action": "0"}],
            "differential": [{"from": "x", "to": "w", "terms": [["1", "1"]]}]}"#;
        let doc: ComplexDocument = parse(text, false).unwrap();
        assert_eq!(doc.build(&Overrides::default()).unwrap_err().pointer(), Some("/differential/0/to"));
        let text = text.replace(r#""to": "w""#, r#""to": "y""#).replace("]]}]", "]]}, {\"from\": \"x\", \"to\": \"y\", \"terms\": []}]");
        let doc: ComplexDocument = parse(&text, false).unwrap();
        assert_eq!(doc.build(&Overrides::default()).unwrap_err().pointer(), Some("/differential/1"));
    }

    #[test]
    fn floer_violations_point_at_the_generator() {
        // A term T^{1/4} below T^ħ with ħ = 1.
        let text = r#"{"version": "novarch/complex/1", "precision": "10", "hbar": "1",
            "generators": [{"name": "x", "degree": 0, "action": "0"}, {"name": "y", "degree": 1, "action": "0"}],
            "differential": [{"from": "x", "to": "y", "terms": [["1/4", "1"]]}]}"#;
        let doc: ComplexDocument = parse(text, false).unwrap();
        let err = doc.build(&Overrides::default()).unwrap_err();
        assert!(matches!(err, CliError::Invariant { .. }));
        assert_eq!(err.pointer(), Some("/generators/0"));
        let ok = doc.build(&Overrides { hbar: Some(Rat::new(1, 4)), ..Overrides::default() });
        assert!(ok.is_ok());
    }

    #[test]
    fn emission_is_a_fixed_point() {
        let text = r#"{"version": "novarch/complex/1", "precision": "6", "hbar": "1/2", "grading": "Z2",
            "generators": [{"name": "b", "degree": 1, "action": "1/3"}, {"name": "a", "degree": 0, "action": "0"}],
            "differential": [{"from": "a", "to": "b", "terms": [["3/2", "-2"], ["1/2", "1"], ["9", "4"]]}]}"#;
        let doc: ComplexDocument = parse(text, false).unwrap();
        let emitted = ComplexDocument::emit(&doc.build(&Overrides::default()).unwrap());
        // Terms come out sorted, and the one at or above the precision is gone.
        assert_eq!(emitted.differential[0].terms.len(), 2);
        assert_eq!(emitted.differential[0].terms[0].0 .0, Rat::new(1, 2));
        let first = emitted.to_json();
        let again: ComplexDocument = parse(&first, false).unwrap();
        assert_eq!(ComplexDocument::emit(&again.build(&Overrides::default()).unwrap()).to_json(), first);
    }

    #[test]
    fn tau_documents_check_their_shapes() {
        let text = r#"{"m": 2, "k": 1, "w0": ["1", "1"], "boundary": [[1, -1]],
            "polytope_vertices": [["-1/2"], ["1/2", "0"]], "classes": [[1, 0]]}"#;
        let doc: TauDocument = parse(text, false).unwrap();
        assert_eq!(doc.validate().unwrap_err().pointer(), Some("/polytope_vertices/1"));
    }

    #[test]
    fn rigidity_monomials_must_match_the_arity() {
        let text = r#"{"model": {"kind": "tate", "vars": 2, "truncation": 3, "precision": "8"},
            "perturbation": {"closeness": "1", "product": {"twist": {"lambda": "5/4", "u": [{"monomial": [1], "terms": [["0", "1"]]}]}}}}"#;
        let doc: RigidityDocument = parse(text, false).unwrap();
        assert_eq!(doc.validate().unwrap_err().pointer(), Some("/perturbation/product/twist/u/0/monomial"));
    }
}
