use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexes::{FloerTypeComplex, Grading, ValuedComplex};
use crate::linalg::{NovMatrix, ValuedBasis};
use crate::novikov::{NovikovElement, Valuation};
use crate::rational::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Block {
    /// `d₀ a = b` with norm gap in `[0, β]`.
    Reduced,
    /// `d a = T^μ b`, `μ ≥ ħ`.
    Deformed,
    Single,
}

fn grid(rng: &mut ChaCha8Rng, lo: &Rat, hi: &Rat, step: i64) -> Rat {
    let span = (&(hi - lo) * &Rat::int(step)).floor();
    let span: i64 = span.try_into().unwrap_or(0).max(0);
    lo + &Rat::new(rng.gen_range(0..=span), step)
}

fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    let n = rng.gen_range(-3i64..=3);
    let n = if n == 0 { 1 } else { n };
    Rat::new(n, rng.gen_range(1..=2))
}

struct Draft {
    names: Vec<String>,
    degrees: Vec<i64>,
    weights: Vec<Rat>,
    entries: Vec<(usize, usize, NovikovElement)>,
}

/// Gap of a deformed pair: `None` draws it in `[0, β]`, `Some(m)` in `(β, β + m]`.
fn build(seed: u64, rank: usize, hbar: &Rat, beta: &Rat, deformed_margin: Option<&Rat>) -> FloerTypeComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let precision = crate::linalg::default_precision();
    let step = 8;
    let mut draft = Draft { names: Vec::new(), degrees: Vec::new(), weights: Vec::new(), entries: Vec::new() };
    let mut forced = beta.is_positive();
    while draft.names.len() < rank {
        let remaining = rank - draft.names.len();
        let kind = if remaining == 1 {
            Block::Single
        } else {
            match rng.gen_range(0..10) {
                0..=4 => Block::Reduced,
                5..=7 => Block::Deformed,
                _ => Block::Single,
            }
        };
        let k = rng.gen_range(0..2i64);
        let wa = grid(&mut rng, &Rat::ZERO, &Rat::int(2), step);
        let idx = draft.names.len();
        match kind {
            Block::Single => {
                draft.names.push(format!("g{idx}"));
                draft.degrees.push(rng.gen_range(0..3));
                draft.weights.push(wa);
            }
            Block::Reduced | Block::Deformed => {
                let (gap, mu) = match kind {
                    Block::Reduced => {
                        let gap = if forced { forced = false; beta.clone() } else { grid(&mut rng, &Rat::ZERO, beta, step) };
                        (gap, Rat::ZERO)
                    }
                    _ => {
                        let gap = match deformed_margin {
                            None => grid(&mut rng, &Rat::ZERO, beta, step),
                            Some(m) => beta + &Rat::new(1, step).max(grid(&mut rng, &Rat::ZERO, m, step)),
                        };
                        (gap, hbar + &grid(&mut rng, &Rat::ZERO, &Rat::ONE, step))
                    }
                };
                // d a = T^μ b has normalized valuation μ + w_b − w_a = gap.
                let wb = &(&wa + &gap) - &mu;
                let c = random_rat(&mut rng);
                draft.names.push(format!("g{idx}"));
                draft.degrees.push(k);
                draft.weights.push(wa);
                draft.names.push(format!("g{}", idx + 1));
                draft.degrees.push(k + 1);
                draft.weights.push(wb);
                draft.entries.push((idx + 1, idx, NovikovElement::monomial(c, mu)));
            }
        }
    }
    let n = draft.names.len();
    let cap = Valuation::Finite(precision.clone());
    let mut d = NovMatrix::zeros(n, n, cap.clone());
    for (i, j, x) in draft.entries {
        d.set(i, j, x);
    }
    // Isometric unipotent change of basis e_j ↦ e_j + c e_i (i < j, same
    // degree), with c constant when w_i ≥ w_j and c ∈ T^ħ Λ_{≥0} otherwise.
    let mut u = NovMatrix::identity(n, cap.clone());
    for j in 0..n {
        for i in 0..j {
            if draft.degrees[i] != draft.degrees[j] || rng.gen_bool(0.5) {
                continue;
            }
            let c = random_rat(&mut rng);
            let shift = &draft.weights[j] - &draft.weights[i];
            let e = if shift <= Rat::ZERO {
                Rat::ZERO
            } else {
                // The commutator with d₀ lands in d − d₀ with normalized
                // valuation at least e − shift.
                let floor = match deformed_margin {
                    Some(_) => &shift + &(beta + &Rat::new(1, step)),
                    None => shift,
                };
                hbar.clone().max(floor) + grid(&mut rng, &Rat::ZERO, &Rat::new(1, 2), step)
            };
            u.set(i, j, NovikovElement::monomial(c, e));
        }
    }
    let nil = u.sub(&NovMatrix::identity(n, cap.clone()));
    let mut inv = NovMatrix::identity(n, cap.clone());
    let mut power = NovMatrix::identity(n, cap.clone());
    for _ in 0..n {
        power = power.mul(&nil).neg();
        if power.is_zero() {
            break;
        }
        inv = inv.add(&power);
    }
    let d = u.mul(&d).mul(&inv);
    let basis = ValuedBasis::new(draft.names, draft.degrees, draft.weights);
    let complex = ValuedComplex::new(basis, Grading::Z, d, precision).expect("square differential");
    FloerTypeComplex::new(complex, hbar.clone(), vec![false; n]).expect("generator produces valid complexes")
}

/// Reproducible random Floer-type complex whose boundary depth is
/// `beta_target` (when some reduced pair exists) or below.
pub fn random_floer_complex(seed: u64, rank: usize, hbar: &Rat, beta_target: &Rat) -> FloerTypeComplex {
    build(seed, rank, hbar, beta_target, None)
}

/// Random complex whose reduction has boundary depth at most `beta` while
/// the deformation `d − d₀` has norm valuation strictly above it.
pub fn random_deformable_complex(seed: u64, rank: usize, hbar: &Rat, beta: &Rat) -> FloerTypeComplex {
    build(seed, rank, hbar, beta, Some(&Rat::ONE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpt::boundary_depth;

    #[test]
    fn seeds_reproduce() {
        let h = Rat::new(1, 2);
        assert_eq!(random_floer_complex(7, 5, &h, &Rat::ONE), random_floer_complex(7, 5, &h, &Rat::ONE));
        assert_ne!(random_floer_complex(7, 5, &h, &Rat::ONE), random_floer_complex(8, 5, &h, &Rat::ONE));
    }

    #[test]
    fn depth_never_exceeds_the_target() {
        let h = Rat::new(1, 2);
        for seed in 0..20 {
            let c = random_floer_complex(seed, 6, &h, &Rat::new(3, 4));
            let r = boundary_depth(&c.complex, &crate::linalg::default_slack()).unwrap();
            assert!(r.methods_agree && r.beta <= Rat::new(3, 4), "seed {seed}: {r:?}");
        }
    }
}
