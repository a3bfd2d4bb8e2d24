//! Polyvector fields on a polyannulus in the log-derivation basis
//! `θ_i = z_i ∂/∂z_i`, with the BV operator `div_{Ω₀}` for the invariant
//! volume form `Ω₀ = dz₁∧…∧dz_n/(z₁…z_n)`.
//!
//! Elements are finite sums, so products and `Δ` are computed exactly; the
//! degree bound `N` only delimits the monomials used by the checks.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::novikov::NovikovElement;
use crate::rational::Rat;
use crate::rigidity::AnnulusFactor;

/// `z^a θ_I`, with `I` a bit mask over `θ₁, …, θ_n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyMonomial {
    pub exponent: Vec<i64>,
    pub thetas: u32,
}

impl PolyMonomial {
    pub fn degree(&self) -> u32 {
        self.thetas.count_ones()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polyvector {
    pub terms: BTreeMap<PolyMonomial, NovikovElement>,
}

impl Polyvector {
    pub fn monomial(exponent: Vec<i64>, thetas: u32, c: NovikovElement) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(PolyMonomial { exponent, thetas }, c);
        }
        Polyvector { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, m: PolyMonomial, c: NovikovElement) {
        let s = match self.terms.get(&m) {
            Some(x) => x + &c,
            None => c,
        };
        if s.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, s);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.push(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &NovikovElement) -> Self {
        let mut out = Polyvector::default();
        for (m, x) in &self.terms {
            out.push(m.clone(), x * c);
        }
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> Self {
        self.scale(&NovikovElement::constant(c.clone()))
    }

    pub fn neg(&self) -> Self {
        self.scale_rat(&Rat::int(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Degree, if homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(PolyMonomial::degree);
        let d = it.next().unwrap_or(0);
        it.all(|e| e == d).then_some(d)
    }

    /// Wedge product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Polyvector::default();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a.thetas & b.thetas != 0 {
                    continue;
                }
                let sign = wedge_sign(a.thetas, b.thetas);
                let exponent = a.exponent.iter().zip(&b.exponent).map(|(p, q)| p + q).collect();
                let c = (x * y).scale(&Rat::int(sign));
                out.push(PolyMonomial { exponent, thetas: a.thetas | b.thetas }, c);
            }
        }
        out
    }
}

/// Sign of `θ_I ∧ θ_J = ± θ_{I∪J}` for disjoint masks.
fn wedge_sign(i: u32, j: u32) -> i64 {
    let mut inversions = 0;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        inversions += (i >> (b + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 { 1 } else { -1 }
}

fn sign_of(degree: u32) -> Rat {
    if degree % 2 == 0 { Rat::ONE } else { Rat::int(-1) }
}

/// Outcome of the construction-time checks.
#[derive(Clone, Debug, PartialEq)]
pub struct BvChecks {
    pub delta_squared_zero: bool,
    pub lowers_degree: bool,
    pub kills_functions: bool,
    pub leibniz: bool,
    pub jacobi: bool,
    pub monomials_checked: usize,
}

impl BvChecks {
    pub fn all(&self) -> bool {
        self.delta_squared_zero && self.lowers_degree && self.kills_functions && self.leibniz && self.jacobi
    }
}

#[derive(Clone, Debug)]
pub struct PolyvectorBV {
    pub n: usize,
    pub radii: Vec<AnnulusFactor>,
    pub truncation: usize,
    pub checks: BvChecks,
}

/// Triples sampled for the Jacobi check when the exhaustive count is large.
const JACOBI_SAMPLE: usize = 4000;

impl PolyvectorBV {
    /// `−log |z^a| = min_Q ⟨a, q⟩` with `Q = Π [−r_{i,1}, r_{i,2}]`.
    pub fn monomial_val(&self, a: &[i64]) -> Rat {
        a.iter().zip(&self.radii).fold(Rat::ZERO, |acc, (&k, f)| {
            let k = Rat::int(k);
            let lo = (-&(&k * &f.r1)).min(&k * &f.r2);
            &acc + &lo
        })
    }

    /// `z^a θ_I` for `|a_i| ≤ N` and every `I`.
    pub fn monomials(&self) -> Vec<PolyMonomial> {
        self.monomials_up_to(self.truncation)
    }

    pub fn monomials_up_to(&self, bound: usize) -> Vec<PolyMonomial> {
        let b = bound as i64;
        let mut exps: Vec<Vec<i64>> = vec![Vec::new()];
        for _ in 0..self.n {
            exps = exps.into_iter().flat_map(|e| (-b..=b).map(move |k| [e.clone(), vec![k]].concat())).collect();
        }
        let mut out = Vec::new();
        for e in exps {
            for t in 0..(1u32 << self.n) {
                out.push(PolyMonomial { exponent: e.clone(), thetas: t });
            }
        }
        out
    }

    pub fn element(&self, m: &PolyMonomial) -> Polyvector {
        Polyvector::monomial(m.exponent.clone(), m.thetas, NovikovElement::one())
    }

    pub fn theta(&self, i: usize) -> Polyvector {
        Polyvector::monomial(vec![0; self.n], 1 << i, NovikovElement::one())
    }

    pub fn function(&self, a: Vec<i64>) -> Polyvector {
        Polyvector::monomial(a, 0, NovikovElement::one())
    }

    /// `Δ(z^a θ_{i₁}∧…∧θ_{i_p}) = Σ_k (−1)^{k+1} a_{i_k} z^a θ_{…î_k…}`.
    pub fn delta(&self, x: &Polyvector) -> Polyvector {
        let mut out = Polyvector::default();
        for (m, c) in &x.terms {
            let mut k = 0;
            for i in 0..self.n {
                if m.thetas & (1 << i) == 0 {
                    continue;
                }
                let a = m.exponent[i];
                if a != 0 {
                    let s = if k % 2 == 0 { a } else { -a };
                    let mono = PolyMonomial { exponent: m.exponent.clone(), thetas: m.thetas & !(1 << i) };
                    out.push(mono, c.scale(&Rat::int(s)));
                }
                k += 1;
            }
        }
        out
    }

    /// `Φ(x, y) = Δ(xy) − Δ(x)y − (−1)^{|x|} xΔ(y)`, the failure of `Δ` to
    /// be a derivation.
    pub fn derivation_defect(&self, x: &Polyvector, y: &Polyvector) -> Polyvector {
        self.signed_defect(x, y, |_| Rat::ONE, false)
    }

    /// `{x, y} = (−1)^{|x|+1} Φ(x, y)` on homogeneous `x`, extended
    /// bilinearly. The twist makes the graded Jacobi identity hold and keeps
    /// `{θ_i, f} = θ_i(f)`.
    pub fn bracket(&self, x: &Polyvector, y: &Polyvector) -> Polyvector {
        self.signed_defect(x, y, |d| sign_of(d + 1), false)
    }

    /// `Δ(xy) − Δ(x)y − (−1)^{|x|} Δ(y)x` without the twist.
    pub fn bracket_right_ordered(&self, x: &Polyvector, y: &Polyvector) -> Polyvector {
        self.signed_defect(x, y, |_| Rat::ONE, true)
    }

    fn signed_defect(&self, x: &Polyvector, y: &Polyvector, twist: impl Fn(u32) -> Rat, right: bool) -> Polyvector {
        let mut out = Polyvector::default();
        let dy = self.delta(y);
        for (m, c) in &x.terms {
            let xm = Polyvector::monomial(m.exponent.clone(), m.thetas, c.clone());
            let third = if right { dy.mul(&xm) } else { xm.mul(&dy) };
            let t = self
                .delta(&xm.mul(y))
                .sub(&self.delta(&xm).mul(y))
                .sub(&third.scale_rat(&sign_of(m.degree())));
            out = out.add(&t.scale_rat(&twist(m.degree())));
        }
        out
    }

    fn jacobi_defect(&self, x: &PolyMonomial, y: &PolyMonomial, z: &PolyMonomial, br: &dyn Fn(&Polyvector, &Polyvector) -> Polyvector) -> Polyvector {
        let (ex, ey, ez) = (self.element(x), self.element(y), self.element(z));
        let (dx, dy) = (x.degree() as i64 - 1, y.degree() as i64 - 1);
        let s = sign_of((dx * dy).rem_euclid(2) as u32);
        let lhs = br(&ex, &br(&ey, &ez));
        let rhs = br(&br(&ex, &ey), &ez).add(&br(&ey, &br(&ex, &ez)).scale_rat(&s));
        lhs.sub(&rhs)
    }

    /// `{x,{y,z}} = {{x,y},z} + (−1)^{(|x|−1)(|y|−1)} {y,{x,z}}` on monomials.
    pub fn jacobi_holds(&self, x: &PolyMonomial, y: &PolyMonomial, z: &PolyMonomial) -> bool {
        self.jacobi_defect(x, y, z, &|a, b| self.bracket(a, b)).is_zero()
    }

    pub fn jacobi_holds_right_ordered(&self, x: &PolyMonomial, y: &PolyMonomial, z: &PolyMonomial) -> bool {
        self.jacobi_defect(x, y, z, &|a, b| self.bracket_right_ordered(a, b)).is_zero()
    }

    /// `{x, yz} = {x,y}z + (−1)^{(|x|−1)|y|} y{x,z}`.
    pub fn leibniz_holds(&self, x: &PolyMonomial, y: &PolyMonomial, z: &PolyMonomial) -> bool {
        let (ex, ey, ez) = (self.element(x), self.element(y), self.element(z));
        let s = sign_of(((x.degree() as i64 - 1) * y.degree() as i64).rem_euclid(2) as u32);
        let lhs = self.bracket(&ex, &ey.mul(&ez));
        let rhs = self.bracket(&ex, &ey).mul(&ez).add(&ey.mul(&self.bracket(&ex, &ez)).scale_rat(&s));
        lhs.sub(&rhs).is_zero()
    }

    /// Every triple of monomials with `|a_i| ≤ bound`, using memoized
    /// monomial brackets. Requires `n ≤ 3`.
    pub fn jacobi_exhaustive(&self, bound: usize) -> JacobiSweep {
        assert!(self.n <= 3, "exhaustive sweeps are limited to n ≤ 3");
        let monos: Vec<u32> = self.monomials_up_to(bound).iter().map(pack).collect();
        let mut memo = BracketMemo { bv: self, table: HashMap::new() };
        let mut sweep = JacobiSweep { triples: 0, failures: 0 };
        let mut acc: Vec<(u32, i64)> = Vec::new();
        for &x in &monos {
            let dx = (x >> 24).count_ones() as i64 - 1;
            for &y in &monos {
                let dy = (y >> 24).count_ones() as i64 - 1;
                let s = if (dx * dy).rem_euclid(2) == 0 { 1 } else { -1 };
                let xy = memo.get(x, y);
                for &z in &monos {
                    acc.clear();
                    for &(m, c) in memo.get(y, z).iter() {
                        acc.extend(memo.get(x, m).iter().map(|&(k, v)| (k, c * v)));
                    }
                    for &(m, c) in xy.iter() {
                        acc.extend(memo.get(m, z).iter().map(|&(k, v)| (k, -c * v)));
                    }
                    for &(m, c) in memo.get(x, z).iter() {
                        acc.extend(memo.get(y, m).iter().map(|&(k, v)| (k, -s * c * v)));
                    }
                    acc.sort_unstable_by_key(|t| t.0);
                    let mut ok = true;
                    let mut i = 0;
                    while i < acc.len() {
                        let mut j = i;
                        let mut sum = 0;
                        while j < acc.len() && acc[j].0 == acc[i].0 {
                            sum += acc[j].1;
                            j += 1;
                        }
                        ok &= sum == 0;
                        i = j;
                    }
                    sweep.triples += 1;
                    if !ok {
                        sweep.failures += 1;
                    }
                }
            }
        }
        sweep
    }

    fn run_checks(&self) -> BvChecks {
        let monos = self.monomials();
        let mut checks = BvChecks {
            delta_squared_zero: true,
            lowers_degree: true,
            kills_functions: true,
            leibniz: true,
            jacobi: true,
            monomials_checked: monos.len(),
        };
        for m in &monos {
            let d = self.delta(&self.element(m));
            checks.delta_squared_zero &= self.delta(&d).is_zero();
            checks.lowers_degree &= d.terms.keys().all(|k| k.degree() + 1 == m.degree());
            if m.degree() == 0 {
                checks.kills_functions &= d.is_zero();
            }
        }
        // Triples come from a one-step window so the check stays cheap.
        let small = self.monomials_up_to(self.truncation.min(1));
        let mut triples: Vec<[&PolyMonomial; 3]> = Vec::new();
        for x in &small {
            for y in &small {
                for z in &small {
                    triples.push([x, y, z]);
                }
            }
        }
        if triples.len() > JACOBI_SAMPLE {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            triples.shuffle(&mut rng);
            triples.truncate(JACOBI_SAMPLE);
        }
        for [x, y, z] in triples {
            checks.leibniz &= self.leibniz_holds(x, y, z);
            checks.jacobi &= self.jacobi_holds(x, y, z);
        }
        checks
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JacobiSweep {
    pub triples: usize,
    pub failures: usize,
}

/// Exponents offset by 128 in bytes 0..3, the θ mask above them.
fn pack(m: &PolyMonomial) -> u32 {
    let mut k = m.thetas << 24;
    for (i, &a) in m.exponent.iter().enumerate() {
        k |= ((a + 128) as u32) << (8 * i);
    }
    k
}

fn unpack(n: usize, k: u32) -> PolyMonomial {
    let exponent = (0..n).map(|i| ((k >> (8 * i)) & 0xff) as i64 - 128).collect();
    PolyMonomial { exponent, thetas: k >> 24 }
}

struct BracketMemo<'a> {
    bv: &'a PolyvectorBV,
    table: HashMap<(u32, u32), Rc<[(u32, i64)]>>,
}

impl BracketMemo<'_> {
    fn get(&mut self, x: u32, y: u32) -> Rc<[(u32, i64)]> {
        if let Some(v) = self.table.get(&(x, y)) {
            return Rc::clone(v);
        }
        let n = self.bv.n;
        let b = self.bv.bracket(&self.bv.element(&unpack(n, x)), &self.bv.element(&unpack(n, y)));
        let v: Rc<[(u32, i64)]> = b
            .terms
            .iter()
            .map(|(m, c)| {
                let c = c.as_constant().expect("monomial brackets have constant coefficients");
                assert!(c.is_integer());
                (pack(m), i64::try_from(c.numer()).expect("small coefficient"))
            })
            .collect();
        self.table.insert((x, y), Rc::clone(&v));
        v
    }
}

pub fn polyannulus_bv(n: usize, radii: Vec<AnnulusFactor>, truncation: usize) -> Result<PolyvectorBV> {
    if n == 0 || n > 8 {
        return Err(Error::Invalid(format!("polyannulus dimension {n} must lie in 1..=8")));
    }
    if radii.len() != n {
        return Err(Error::DimensionMismatch(format!("{} radii for dimension {n}", radii.len())));
    }
    let mut bv = PolyvectorBV {
        n,
        radii,
        truncation,
        checks: BvChecks {
            delta_squared_zero: false,
            lowers_degree: false,
            kills_functions: false,
            leibniz: false,
            jacobi: false,
            monomials_checked: 0,
        },
    };
    bv.checks = bv.run_checks();
    Ok(bv)
}

/// `⟨Υ(v), x₁, …, x_k⟩ = ⟨Υ({v, x₁}), x₂, …, x_k⟩`, ending at `Υ(f) = f`.
pub fn upsilon_eval(bv: &PolyvectorBV, v: &Polyvector, args: &[Polyvector]) -> Polyvector {
    args.iter().fold(v.clone(), |acc, x| bv.bracket(&acc, x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpsilonReport {
    pub samples: usize,
    /// Leibniz rule in every argument slot.
    pub derivation: bool,
    /// Sign change under swapping adjacent arguments.
    pub alternating: bool,
    /// `Υ(vw)(x, y) = Υ(v)(y)Υ(w)(x) − Υ(v)(x)Υ(w)(y)` for degree-1 `v, w`;
    /// the order is the one produced by unfolding the twisted bracket.
    pub product_intertwined: bool,
    /// `Υ({v, w}) = [Υ(v), Υ(w)]` for degree-1 `v, w`.
    pub bracket_intertwined: bool,
    /// Values on degree-0 arguments are functions.
    pub lands_in_functions: bool,
}

impl UpsilonReport {
    pub fn all(&self) -> bool {
        self.derivation && self.alternating && self.product_intertwined && self.bracket_intertwined && self.lands_in_functions
    }
}

fn random_element(bv: &PolyvectorBV, rng: &mut ChaCha8Rng, degree: u32, terms: usize) -> Polyvector {
    let b = bv.truncation.min(2) as i64;
    let masks: Vec<u32> = (0..(1u32 << bv.n)).filter(|m| m.count_ones() == degree).collect();
    let mut out = Polyvector::default();
    for _ in 0..terms {
        let a: Vec<i64> = (0..bv.n).map(|_| rng.gen_range(-b..=b)).collect();
        let t = masks[rng.gen_range(0..masks.len())];
        let c = Rat::int(rng.gen_range(-3..=3));
        out = out.add(&Polyvector::monomial(a, t, NovikovElement::constant(c)));
    }
    out
}

/// Samples polyvectors and functions and checks that `Υ` behaves as a map
/// to alternating polyderivations compatible with product and bracket.
pub fn upsilon(bv: &PolyvectorBV, seed: u64, samples: usize) -> UpsilonReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = UpsilonReport {
        samples,
        derivation: true,
        alternating: true,
        product_intertwined: true,
        bracket_intertwined: true,
        lands_in_functions: true,
    };
    let top = bv.n.min(3) as u32;
    for _ in 0..samples {
        let p = rng.gen_range(1..=top);
        let v = random_element(bv, &mut rng, p, 2);
        let xs: Vec<Polyvector> = (0..p as usize + 1).map(|_| random_element(bv, &mut rng, 0, 2)).collect();
        let args = &xs[..p as usize];
        let val = upsilon_eval(bv, &v, args);
        r.lands_in_functions &= val.terms.keys().all(|m| m.degree() == 0);
        // Leibniz in the slot `k`, using the extra function as the second factor.
        let extra = &xs[p as usize];
        for k in 0..p as usize {
            let mut prod = args.to_vec();
            prod[k] = args[k].mul(extra);
            let mut with_extra = args.to_vec();
            with_extra[k] = extra.clone();
            let lhs = upsilon_eval(bv, &v, &prod);
            let rhs = upsilon_eval(bv, &v, args).mul(extra).add(&upsilon_eval(bv, &v, &with_extra).mul(&args[k]));
            r.derivation &= lhs.sub(&rhs).is_zero();
        }
        for k in 0..(p as usize).saturating_sub(1) {
            let mut swapped = args.to_vec();
            swapped.swap(k, k + 1);
            r.alternating &= upsilon_eval(bv, &v, &swapped).add(&val).is_zero();
        }
        let v1 = random_element(bv, &mut rng, 1, 2);
        let w1 = random_element(bv, &mut rng, 1, 2);
        let (x, y) = (&xs[0], extra);
        let ev = |u: &Polyvector, f: &Polyvector| upsilon_eval(bv, u, std::slice::from_ref(f));
        let lhs = upsilon_eval(bv, &v1.mul(&w1), &[x.clone(), y.clone()]);
        let rhs = ev(&v1, y).mul(&ev(&w1, x)).sub(&ev(&v1, x).mul(&ev(&w1, y)));
        r.product_intertwined &= lhs.sub(&rhs).is_zero();
        let lhs = ev(&bv.bracket(&v1, &w1), x);
        let rhs = ev(&v1, &ev(&w1, x)).sub(&ev(&w1, &ev(&v1, x)));
        r.bracket_intertwined &= lhs.sub(&rhs).is_zero();
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_radii(n: usize) -> Vec<AnnulusFactor> {
        vec![AnnulusFactor { r1: Rat::ONE, r2: Rat::ONE }; n]
    }

    #[test]
    fn construction_checks_pass() {
        let bv = polyannulus_bv(2, unit_radii(2), 2).unwrap();
        assert!(bv.checks.all(), "{:?}", bv.checks);
    }

    #[test]
    fn delta_on_log_vector_fields() {
        let bv = polyannulus_bv(2, unit_radii(2), 2).unwrap();
        let x = Polyvector::monomial(vec![2, -1], 0b01, NovikovElement::one());
        assert_eq!(bv.delta(&x), bv.function(vec![2, -1]).scale_rat(&Rat::int(2)));
        let t12 = bv.theta(0).mul(&bv.theta(1));
        assert!(bv.delta(&t12).is_zero());
    }

    #[test]
    fn bracket_with_theta_is_the_log_derivative() {
        let bv = polyannulus_bv(3, unit_radii(3), 1).unwrap();
        for m in bv.monomials().into_iter().filter(|m| m.degree() == 0) {
            for i in 0..3 {
                let got = bv.bracket(&bv.theta(i), &bv.element(&m));
                assert_eq!(got, bv.element(&m).scale_rat(&Rat::int(m.exponent[i])));
            }
        }
    }

    #[test]
    fn upsilon_of_theta() {
        let bv = polyannulus_bv(2, unit_radii(2), 2).unwrap();
        let f = bv.function(vec![3, -2]);
        assert_eq!(upsilon_eval(&bv, &bv.theta(1), &[f.clone()]), f.scale_rat(&Rat::int(-2)));
        assert_eq!(upsilon_eval(&bv, &f, &[]), f);
        let r = upsilon(&bv, 7, 40);
        assert!(r.all(), "{r:?}");
    }

    #[test]
    fn exhaustive_sweep_matches_the_generic_check() {
        let bv = polyannulus_bv(1, unit_radii(1), 1).unwrap();
        let sweep = bv.jacobi_exhaustive(2);
        assert_eq!(sweep, JacobiSweep { triples: 1000, failures: 0 });
        let ms = bv.monomials_up_to(2);
        assert!(ms.iter().all(|x| ms.iter().all(|y| ms.iter().all(|z| bv.jacobi_holds(x, y, z)))));
    }

    #[test]
    fn monomial_norm_uses_the_polytope() {
        let bv = polyannulus_bv(1, vec![AnnulusFactor { r1: Rat::ONE, r2: Rat::int(2) }], 2).unwrap();
        assert_eq!(bv.monomial_val(&[1]), Rat::int(-1));
        assert_eq!(bv.monomial_val(&[-1]), Rat::int(-2));
    }
}
