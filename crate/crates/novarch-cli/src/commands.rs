use rayon::prelude::*;
use serde_json::{json, Value};

use novarch::complexes::{associated_graded, quotient_outside, homology_barcode, FloerTypeComplex, Grading, ValuedComplex, Weighting};
use novarch::hpt::{boundary_depth_def, boundary_depth_torsion, check_perturbed, check_sdr, perturb, special_dr};
use novarch::linalg::{default_precision, default_slack, unit_vector, NovMatrix, ValuedBasis};
use novarch::models::{cp1_model, random_deformable_complex, random_floer_complex};
use novarch::novikov::{NovikovElement, Valuation};
use novarch::rational::Rat;
use novarch::rigidity::{
    rigidity_iso_laurent, rigidity_iso_polyannulus, rigidity_iso_tate, twist_by, AffinoidModel, AnnulusFactor, LaurentDomain, ProductPerturbation,
    ReferenceStar, RigidityIso, StarProduct, TableStar,
};
use novarch::spectral::{compute_pages, detect_hausdorff_failure, ClassVerdict, FamilyMember, HausdorffVerdict, SpectralSequenceState};
use novarch::tauflux::{dual_cone, tau_eval, FluxPolytope, RelLattice};

use crate::document::{aff_element, aff_terms, novikov, ComplexDocument, ModelSpec, Overrides, ProductSpec, RigidityDocument, TauDocument};
use crate::error::CliError;
use crate::report::Ledger;

/// Results and checks of one command.
pub struct Outcome {
    pub results: Value,
    pub ledger: Ledger,
}

fn val(v: &Valuation) -> Value {
    Value::String(v.to_string())
}

fn rat(r: &Rat) -> Value {
    Value::String(r.to_string())
}

fn terms(x: &NovikovElement) -> Value {
    Value::Array(x.terms().iter().map(|(e, c)| json!([e.to_string(), c.to_string()])).collect())
}

/// Nonzero entries as `{from, to, terms}`, over the given basis names.
fn sparse(m: &NovMatrix, names: &[String]) -> Value {
    let mut nz: Vec<_> = m.nonzero_entries().collect();
    nz.sort_by_key(|&(i, j, _)| (j, i));
    Value::Array(nz.into_iter().map(|(i, j, x)| json!({"from": names[j], "to": names[i], "terms": terms(x)})).collect())
}

pub fn depth(c: &FloerTypeComplex) -> Result<Outcome, CliError> {
    let slack = default_slack();
    let g = &c.complex;
    let (t, d) = rayon::join(|| boundary_depth_torsion(g, &slack), || boundary_depth_def(g, &slack));
    let (t, d) = (t?, d?);
    let mut ledger = Ledger::default();
    ledger.record("square_zero", g.square_vanishes(), "");
    ledger.record("method_agreement", t == d, format!("torsion {t}, definition {d}"));
    let results = json!({
        "beta": rat(&t),
        "beta_torsion": rat(&t),
        "beta_definition": rat(&d),
        "method_agreement": t == d,
    });
    Ok(Outcome { results, ledger })
}

pub fn hpt(v: &FloerTypeComplex, epsilon: &Rat) -> Result<Outcome, CliError> {
    let slack = default_slack();
    let graded = associated_graded(v);
    let g = &graded.complex;
    let (depths, sdr) = rayon::join(
        || rayon::join(|| boundary_depth_torsion(g, &slack), || boundary_depth_def(g, &slack)),
        || special_dr(g, epsilon),
    );
    let (t, d) = (depths.0?, depths.1?);
    let sdr = sdr?;
    let sc = check_sdr(g, &sdr);
    let delta = v.perturbation();
    let pr = perturb(g, &sdr, &delta, None)?;
    let pc = check_perturbed(&v.complex, &pr, &v.hbar, &slack)?;

    let mut ledger = Ledger::default();
    ledger.record("method_agreement", t == d, format!("torsion {t}, definition {d}"));
    ledger.record("sdr_identities", sc.identities_hold(), "");
    ledger.record(
        "sdr_norms",
        sc.norms_bounded(&sdr.beta),
        format!("val|i| = {}, val|p| = {}, val|h| = {}", sc.include_norm_val, sc.project_norm_val, sc.homotopy_norm_val),
    );
    for (name, ok) in [
        ("deformed_square_zero", pc.deformed_square_zero),
        ("project_include_identity", pc.project_include_identity),
        ("homotopy_squared_zero", pc.homotopy_squared_zero),
        ("homotopy_include_zero", pc.homotopy_include_zero),
        ("project_homotopy_zero", pc.project_homotopy_zero),
        ("homotopy_formula", pc.homotopy_formula),
        ("include_chain_map", pc.include_chain_map),
        ("project_chain_map", pc.project_chain_map),
        ("deformed_in_lattice", pc.deformed_in_lattice),
        ("deformed_above_hbar", pc.deformed_above_hbar),
        ("epsilon_bounds", pc.epsilon_bounds),
        ("isometry", pc.isometry),
        ("barcodes_agree", pc.barcodes_agree),
    ] {
        ledger.record(name, ok, "");
    }
    let mut outside = Value::Null;
    if v.outside.iter().any(|&f| f) {
        let q = quotient_outside(&graded)?;
        let before = homology_barcode(g, Weighting::Norm, &slack)?;
        let after = homology_barcode(&q.complex, Weighting::Norm, &slack)?;
        ledger.record("quotient_barcode", before == after, "quotienting the flagged generators keeps the barcode");
        outside = json!({"quotient_rank": q.complex.len(), "dropped": v.outside.iter().filter(|&&f| f).count()});
    }
    let h = &pr.homology;
    let results = json!({
        "beta": rat(&sdr.beta),
        "method_agreement": t == d,
        "homology": (0..h.len()).map(|i| json!({"name": h.names[i], "degree": h.degrees[i], "action": rat(&h.weights[i])})).collect::<Vec<_>>(),
        "d_def": sparse(&pr.deformed_differential, &h.names),
        "sdr_check": sc.identities_hold() && sc.norms_bounded(&sdr.beta),
        "perturbed_check": pc.all(),
        "series_terms": pr.series_terms,
        "bounds": {
            "delta_val": val(&pr.delta_val),
            "beta": rat(&pr.beta),
            "epsilon": rat(&pr.epsilon),
        },
        "outside": outside,
    });
    Ok(Outcome { results, ledger })
}

/// The last page whose offset `rħ` stays below the precision.
fn last_page(c: &FloerTypeComplex) -> usize {
    let q = (c.precision() / &c.hbar).ceil();
    usize::try_from(q).unwrap_or(1).saturating_sub(1).max(1)
}

fn pages_json(st: &SpectralSequenceState) -> Value {
    Value::Array(
        st.pages
            .iter()
            .map(|p| {
                let arrows: Vec<Value> = p
                    .differential
                    .iter()
                    .map(|a| json!({"source": p.classes[a.source].label, "target": p.classes[a.target].label, "valuation": rat(&a.valuation)}))
                    .collect();
                json!({"index": p.index, "ranks": p.ranks(), "differential": arrows})
            })
            .collect(),
    )
}

fn tau_json(st: &SpectralSequenceState) -> Value {
    st.tau.as_ref().map_or(Value::String("inconclusive".into()), val)
}

fn ss_checks(st: &SpectralSequenceState, tag: &str, ledger: &mut Ledger) {
    ledger.record(&format!("{tag}pages_consistent"), st.pages_consistent(), "");
    ledger.record(&format!("{tag}e1_matches_reduction"), st.e1_matches_reduction, "");
    let hbar = &st.source.hbar;
    match (&st.tau, st.first_nonzero_page) {
        (Some(Valuation::Finite(t)), Some(i)) => {
            let lo = hbar * &Rat::int(i as i64 - 1);
            let hi = hbar * &Rat::int(i as i64);
            ledger.record(&format!("{tag}tau_in_page_window"), &lo <= t && t < &hi, format!("tau = {t}, page {i}: [{lo}, {hi})"));
        }
        (Some(Valuation::Finite(t)), None) => ledger.record(&format!("{tag}tau_in_page_window"), false, format!("tau = {t} without a page")),
        _ => {}
    }
    let infinite = matches!(st.tau, Some(Valuation::Infinite));
    ledger.record(&format!("{tag}collapse_means_infinite_tau"), st.collapse_certified == infinite, "");
}

fn is_cycle(c: &ValuedComplex, j: usize) -> bool {
    (0..c.len()).all(|i| c.d.get(i, j).is_zero())
}

pub fn ss(members: &[FloerTypeComplex], pages: Option<usize>, threshold: &Rat, track: &[String]) -> Result<Outcome, CliError> {
    let states = members
        .par_iter()
        .map(|c| compute_pages(c, pages.unwrap_or_else(|| last_page(c))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut ledger = Ledger::default();
    let last = states.last().expect("at least one input");
    if states.len() == 1 {
        ss_checks(last, "", &mut ledger);
    } else {
        for (k, st) in states.iter().enumerate() {
            ss_checks(st, &format!("input[{k}]."), &mut ledger);
        }
    }
    let mut results = json!({
        "pages": pages_json(last),
        "first_nonzero_page": last.first_nonzero_page,
        "tau": tau_json(last),
        "collapse": last.collapse_certified,
        "hausdorff": Value::Null,
    });
    if members.len() > 1 {
        results["members"] = Value::Array(
            states
                .iter()
                .enumerate()
                .map(|(k, st)| json!({"input": k, "first_nonzero_page": st.first_nonzero_page, "tau": tau_json(st), "collapse": st.collapse_certified}))
                .collect(),
        );
        results["hausdorff"] = hausdorff(members, threshold, track)?;
    }
    Ok(Outcome { results, ledger })
}

fn hausdorff(members: &[FloerTypeComplex], threshold: &Rat, track: &[String]) -> Result<Value, CliError> {
    let names: Vec<String> = if track.is_empty() {
        let first = &members[0].complex;
        (0..first.len())
            .filter(|&j| {
                let name = &first.basis.names[j];
                members.iter().all(|m| m.basis().index_of(name).is_none_or(|i| is_cycle(&m.complex, i)))
            })
            .map(|j| first.basis.names[j].clone())
            .collect()
    } else {
        track.to_vec()
    };
    let family: Vec<FamilyMember> = members
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let mut classes = Vec::new();
            for name in &names {
                if let Some(i) = m.basis().index_of(name) {
                    if !is_cycle(&m.complex, i) {
                        return Err(CliError::invariant(format!("input[{k}]"), format!("tracked generator `{name}` is not a cycle")));
                    }
                    classes.push((name.clone(), unit_vector(m.len(), i)));
                }
            }
            Ok(FamilyMember { complex: m.complex.clone(), classes })
        })
        .collect::<Result<_, _>>()?;
    let diag = detect_hausdorff_failure(|n| Ok(family[n].clone()), 0, family.len() - 1, threshold)?;
    let verdict = match diag.verdict {
        HausdorffVerdict::Diverges => "DIVERGES",
        HausdorffVerdict::Bounded => "BOUNDED",
        HausdorffVerdict::NoSurvivors => "NO_SURVIVORS",
    };
    let classes: Vec<Value> = diag
        .classes
        .iter()
        .map(|t| {
            let v = match t.verdict {
                ClassVerdict::Diverges => "DIVERGES",
                ClassVerdict::Bounded => "BOUNDED",
                ClassVerdict::Killed => "KILLED",
            };
            let values: Vec<Value> = t.values.iter().map(|(n, x)| json!({"input": n, "sup_val": val(x)})).collect();
            json!({"name": t.name, "verdict": v, "values": values})
        })
        .collect();
    Ok(json!({"verdict": verdict, "threshold": rat(threshold), "classes": classes}))
}

fn bigs<T: std::fmt::Display>(v: &[Vec<T>]) -> Value {
    Value::Array(v.iter().map(|g| Value::Array(g.iter().map(|x| Value::String(x.to_string())).collect())).collect())
}

pub fn tau(doc: &TauDocument) -> Result<Outcome, CliError> {
    doc.validate()?;
    let l = RelLattice::new(doc.w0(), doc.k, doc.boundary.clone())?;
    let p = FluxPolytope::new(doc.vertices())?;
    let mut ledger = Ledger::default();
    let mut results = json!({"tau_pieces": Value::Null, "concave": Value::Null, "dual_cone": Value::Null});
    if let Some(classes) = &doc.classes {
        let f = tau_eval(classes, &p, &l)?;
        let pieces: Vec<Value> = classes
            .iter()
            .zip(&f.pieces)
            .map(|(a, piece)| json!({"class": a, "constant": rat(&piece.constant), "gradient": piece.gradient.iter().map(rat).collect::<Vec<_>>()}))
            .collect();
        let verts = &p.vertices;
        let k = p.dimension();
        let centroid: Vec<Rat> = (0..k)
            .map(|c| &verts.iter().fold(Rat::ZERO, |s, v| &s + &v[c]) / &Rat::int(verts.len() as i64))
            .collect();
        let mut points = verts.clone();
        points.push(centroid);
        let mut concave = true;
        let mut pairs = 0;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                concave &= f.midpoint_inequality(&points[i], &points[j])?;
                pairs += 1;
            }
        }
        ledger.record("midpoint_concavity", concave, format!("{pairs} pairs of vertices and the centroid"));
        let at: Vec<Value> = verts
            .iter()
            .map(|v| Ok(json!({"point": v.iter().map(rat).collect::<Vec<_>>(), "tau": val(&f.eval(v)?), "argmin": f.argmin(v)})))
            .collect::<Result<_, CliError>>()?;
        results["tau_pieces"] = Value::Array(pieces);
        results["tau_at_vertices"] = Value::Array(at);
        results["concave"] = Value::Bool(concave);
    }
    if let Some(star) = doc.star_shape() {
        let cone = dual_cone(&l, &star)?;
        let gens = cone.generators.generators();
        let inside = gens.iter().all(|g| cone.contains(&g.iter().map(|x| Rat::from(x.clone())).collect::<Vec<_>>()));
        ledger.record("generators_in_cone", inside, format!("{} generators", gens.len()));
        results["dual_cone"] = json!({
            "generators": {"lineality": bigs(&cone.generators.lineality), "rays": bigs(&cone.generators.rays)},
            "inequalities": cone.inequalities.iter().map(|r| r.iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "boundary_vanishes": cone.boundary_vanishes,
        });
    }
    Ok(Outcome { results, ledger })
}

fn star_of(m: &AffinoidModel, spec: &ProductSpec) -> Box<dyn StarProduct> {
    let e = &m.precision;
    match spec {
        ProductSpec::Reference => Box::new(ReferenceStar),
        ProductSpec::Twist { lambda, u } => Box::new(twist_by(m, &lambda.0, &aff_element(u, e))),
        ProductSpec::Table(rows) => {
            let mut t = TableStar::default();
            for row in rows {
                t.insert(row.a.clone(), row.b.clone(), aff_element(&row.value, e));
            }
            Box::new(t)
        }
    }
}

pub fn rigidity(doc: &RigidityDocument, precision: Option<&Rat>) -> Result<Outcome, CliError> {
    doc.validate()?;
    let gamma = doc.perturbation.closeness.0.clone();
    let product = &doc.perturbation.product;
    let e = precision.cloned().unwrap_or_else(|| doc.precision());
    let (model, iso): (AffinoidModel, RigidityIso) = match &doc.model {
        ModelSpec::Tate { vars, truncation, .. } => {
            let m = AffinoidModel::tate(*vars, *truncation, e);
            let pert = ProductPerturbation::new(&m, star_of(&m, product), gamma)?;
            let iso = rigidity_iso_tate(&m, &pert)?;
            (m, iso)
        }
        ModelSpec::Polyannulus { annuli, truncation, .. } => {
            let factors = annuli.iter().map(|a| AnnulusFactor { r1: a.r1.0.clone(), r2: a.r2.0.clone() }).collect();
            let m = AffinoidModel::polyannulus(factors, *truncation, e)?;
            let pert = ProductPerturbation::new(&m, star_of(&m, product), gamma)?;
            let iso = rigidity_iso_polyannulus(&m, &pert)?;
            (m, iso)
        }
        ModelSpec::Laurent { dim, lambda, r, truncation, .. } => {
            let domain = LaurentDomain::new(*dim, novikov(lambda, &e), r.0.clone(), *truncation, e.clone())?;
            let m = domain.model.clone();
            let pert = ProductPerturbation::new(&m, star_of(&m, product), gamma)?;
            let iso = rigidity_iso_laurent(&domain, &pert)?;
            (m, iso)
        }
    };
    let r = &iso.report;
    let mut ledger = Ledger::default();
    ledger.record("multiplicative", r.multiplicative, format!("{} basis pairs", r.pairs_checked));
    ledger.record("isometric", r.isometric, "");
    ledger.record("close", r.close, format!("val(phi - id) = {} against the bound {}", r.distance, r.distance_bound));
    ledger.record("contracting", r.contracting, "");
    let images: Vec<Value> = model
        .basis()
        .into_iter()
        .map(|m| {
            let image = iso.image(&m).map_or(Value::Null, |x| serde_json::to_value(aff_terms(x)).expect("terms serialize"));
            json!({"monomial": m, "image": image})
        })
        .collect();
    let results = json!({
        "images": images,
        "report": {
            "pairs_checked": r.pairs_checked,
            "multiplicative": r.multiplicative,
            "distance": val(&r.distance),
            "isometric": r.isometric,
            "distance_bound": rat(&r.distance_bound),
            "close": r.close,
            "contracting": r.contracting,
            "holds": iso.holds(),
        },
    });
    Ok(Outcome { results, ledger })
}

/// `x → T^λ y` in degrees 0 and 1, both of action zero.
pub fn lambda_model(lambda: &Rat, hbar: Option<&Rat>, precision: Option<&Rat>) -> Result<FloerTypeComplex, CliError> {
    if lambda.is_negative() {
        return Err(CliError::Usage(format!("--lambda must be nonnegative, got {lambda}")));
    }
    let e = precision.cloned().unwrap_or_else(default_precision);
    let h = hbar.cloned().unwrap_or_else(|| if lambda.is_positive() { lambda.clone() } else { Rat::ONE });
    let basis = ValuedBasis::new(vec!["x".into(), "y".into()], vec![0, 1], vec![Rat::ZERO, Rat::ZERO]);
    let mut d = NovMatrix::zeros(2, 2, Valuation::Finite(e.clone()));
    d.set(1, 0, NovikovElement::t_pow(lambda.clone()));
    Ok(FloerTypeComplex::from_parts(basis, Grading::Z, d, h, e)?)
}

pub fn cp1(r: &Rat, truncation: usize, precision: Option<&Rat>) -> Result<FloerTypeComplex, CliError> {
    let e = precision.cloned().unwrap_or_else(|| Rat::int(20));
    Ok(cp1_model(r, truncation, &e)?.complex)
}

pub fn random(seed: u64, rank: usize, beta: &Rat, hbar: Option<&Rat>, deformable: bool) -> Result<FloerTypeComplex, CliError> {
    if rank == 0 {
        return Err(CliError::Usage("--rank must be positive".into()));
    }
    if beta.is_negative() {
        return Err(CliError::Usage(format!("--beta must be nonnegative, got {beta}")));
    }
    let h = hbar.cloned().unwrap_or_else(|| Rat::new(1, 2));
    if !h.is_positive() {
        return Err(CliError::Usage(format!("--hbar must be positive, got {h}")));
    }
    Ok(if deformable { random_deformable_complex(seed, rank, &h, beta) } else { random_floer_complex(seed, rank, &h, beta) })
}

/// Documents for the commands that read complexes.
pub fn load_complex(text: &str, lax: bool, o: &Overrides) -> Result<FloerTypeComplex, CliError> {
    crate::document::parse::<ComplexDocument>(text, lax)?.build(o)
}
