use crate::complexes::ValuedComplex;
use crate::error::Result;
use crate::hpt::homology_class_val;
use crate::linalg::NovVector;
use crate::novikov::Valuation;
use crate::rational::Rat;

/// One truncation of a family: the complex and the cycles to follow,
/// matched across truncations by name.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub complex: ValuedComplex,
    pub classes: Vec<(String, NovVector)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassVerdict {
    /// Representatives reach arbitrarily high relative valuation.
    Diverges,
    Bounded,
    /// The cycle became a boundary.
    Killed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassTrack {
    pub name: String,
    /// `(N, sup val over representatives)`; `Infinite` once killed.
    pub values: Vec<(usize, Valuation)>,
    pub verdict: ClassVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HausdorffVerdict {
    Diverges,
    Bounded,
    NoSurvivors,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HausdorffDiagnostic {
    pub classes: Vec<ClassTrack>,
    pub verdict: HausdorffVerdict,
}

fn classify(values: &[(usize, Valuation)], threshold: &Rat) -> ClassVerdict {
    if values.iter().any(|(_, v)| v.is_infinite()) {
        return ClassVerdict::Killed;
    }
    let finite: Vec<&Rat> = values.iter().filter_map(|(_, v)| v.finite()).collect();
    let monotone = finite.windows(2).all(|w| w[0] <= w[1]);
    match (finite.first(), finite.last()) {
        (Some(a), Some(b)) if monotone && &(*b - *a) >= threshold => ClassVerdict::Diverges,
        _ => ClassVerdict::Bounded,
    }
}

/// Tracks `sup_{y ~ x} val(y)` under the relative valuation for each named
/// class over truncations `n_min..=n_max`. A class diverges when this grows
/// monotonically by at least `threshold`.
pub fn detect_hausdorff_failure<F>(family: F, n_min: usize, n_max: usize, threshold: &Rat) -> Result<HausdorffDiagnostic>
where
    F: Fn(usize) -> Result<FamilyMember>,
{
    let mut tracks: Vec<ClassTrack> = Vec::new();
    for n in n_min..=n_max {
        let member = family(n)?;
        let lattice = member.complex.relative();
        for (name, x) in &member.classes {
            let v = homology_class_val(&lattice, x);
            match tracks.iter_mut().find(|t| &t.name == name) {
                Some(t) => t.values.push((n, v)),
                None => tracks.push(ClassTrack { name: name.clone(), values: vec![(n, v)], verdict: ClassVerdict::Bounded }),
            }
        }
    }
    for t in &mut tracks {
        t.verdict = classify(&t.values, threshold);
    }
    let verdict = if tracks.iter().any(|t| t.verdict == ClassVerdict::Diverges) {
        HausdorffVerdict::Diverges
    } else if tracks.iter().all(|t| t.verdict == ClassVerdict::Killed) {
        HausdorffVerdict::NoSurvivors
    } else {
        HausdorffVerdict::Bounded
    };
    Ok(HausdorffDiagnostic { classes: tracks, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::Grading;
    use crate::linalg::{unit_vector, NovMatrix, ValuedBasis};
    use crate::models::cp1_model;

    fn cp1(r: Rat) -> impl Fn(usize) -> Result<FamilyMember> {
        move |n| {
            let m = cp1_model(&r, n, &Rat::int(20))?;
            let classes = vec![("1".to_string(), m.even_generator(0)), ("x".to_string(), m.even_generator(1))];
            Ok(FamilyMember { complex: m.complex.complex, classes })
        }
    }

    #[test]
    fn cp1_large_radius_diverges() {
        let diag = detect_hausdorff_failure(cp1(Rat::new(3, 5)), 4, 10, &Rat::ONE).unwrap();
        assert_eq!(diag.verdict, HausdorffVerdict::Diverges);
        let one = &diag.classes[0];
        assert_eq!(one.values.last().unwrap().1, Valuation::Finite(Rat::int(5)));
        assert!(diag.classes.iter().all(|t| t.verdict == ClassVerdict::Diverges));
    }

    #[test]
    fn cp1_small_radius_has_no_survivors() {
        let diag = detect_hausdorff_failure(cp1(Rat::new(2, 5)), 4, 10, &Rat::ONE).unwrap();
        assert_eq!(diag.verdict, HausdorffVerdict::NoSurvivors);
    }

    #[test]
    fn zero_differential_is_bounded() {
        let family = |n: usize| {
            let basis = ValuedBasis::new((0..n).map(|i| format!("g{i}")).collect(), vec![0; n], vec![Rat::ZERO; n]);
            let d = NovMatrix::zeros(n, n, Valuation::Finite(Rat::int(10)));
            let complex = ValuedComplex::new(basis, Grading::Z, d, Rat::int(10))?;
            Ok(FamilyMember { complex, classes: vec![("g0".into(), unit_vector(n, 0))] })
        };
        let diag = detect_hausdorff_failure(family, 2, 6, &Rat::ONE).unwrap();
        assert_eq!(diag.verdict, HausdorffVerdict::Bounded);
    }
}
