//! Generators of `{x ∈ Q^m : a·x ≥ 0 for each row a}` by the double
//! description method.

use num_integer::Integer;
use num_traits::{One, Zero};
use num_bigint::BigInt;

use crate::rational::Rat;

fn dot(a: &[Rat], x: &[Rat]) -> Rat {
    a.iter().zip(x).fold(Rat::ZERO, |s, (p, q)| if p.is_zero() || q.is_zero() { s } else { &s + &(p * q) })
}

fn axpy(x: &[Rat], c: &Rat, y: &[Rat]) -> Vec<Rat> {
    x.iter().zip(y).map(|(p, q)| p + &(c * q)).collect()
}

/// Rank of a list of rational vectors.
pub fn rank_of(vectors: &[Vec<Rat>]) -> usize {
    let mut rows: Vec<Vec<Rat>> = vectors.to_vec();
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = -&(&rows[i][c] / &pivot);
                rows[i] = axpy(&rows[i], &f, &rows[r]);
            }
        }
        r += 1;
    }
    r
}

/// Primitive integer vector on the ray of `x`.
pub fn primitive(x: &[Rat]) -> Vec<BigInt> {
    let lcm = x.iter().fold(BigInt::one(), |l, q| l.lcm(&q.denom()));
    let ints: Vec<BigInt> = x.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

fn to_rat(v: &[BigInt]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from(x.clone())).collect()
}

/// `cone = span(lineality) + cone(rays)`, every vector primitive integral.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeGenerators {
    pub lineality: Vec<Vec<BigInt>>,
    pub rays: Vec<Vec<BigInt>>,
}

impl ConeGenerators {
    /// Conic generators: rays, then `±` each lineality vector.
    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|x| -x).collect());
        }
        out
    }
}

fn canonical_lineality(lin: Vec<Vec<Rat>>) -> Vec<Vec<BigInt>> {
    let mut rows = lin;
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        rows[r] = rows[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = -&rows[i][c];
                rows[i] = axpy(&rows[i], &f, &rows[r]);
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows.iter().map(|v| primitive(v)).collect()
}

pub fn double_description(m: usize, inequalities: &[Vec<Rat>]) -> ConeGenerators {
    let mut lineality: Vec<Vec<Rat>> = (0..m).map(|i| (0..m).map(|j| if i == j { Rat::ONE } else { Rat::ZERO }).collect()).collect();
    let mut rays: Vec<Vec<Rat>> = Vec::new();
    for (step, a) in inequalities.iter().enumerate() {
        let processed = &inequalities[..=step];
        if let Some(k) = lineality.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l0 = lineality.remove(k);
            if dot(a, &l0).is_negative() {
                l0 = l0.iter().map(|x| -x).collect();
            }
            let s = dot(a, &l0);
            let project = |v: &Vec<Rat>| {
                let c = -&(&dot(a, v) / &s);
                axpy(v, &c, &l0)
            };
            lineality = lineality.iter().map(project).collect();
            rays = rays.iter().map(project).collect();
            rays.push(l0);
            continue;
        }
        let vals: Vec<Rat> = rays.iter().map(|r| dot(a, r)).collect();
        let dim = m - lineality.len();
        let tight = |r: &Vec<Rat>| -> Vec<usize> { (0..step).filter(|&i| dot(&processed[i], r).is_zero()).collect() };
        let mut next: Vec<Vec<Rat>> = rays.iter().zip(&vals).filter(|(_, v)| !v.is_negative()).map(|(r, _)| r.clone()).collect();
        for (p, vp) in rays.iter().zip(&vals).filter(|(_, v)| v.is_positive()) {
            let zp = tight(p);
            for (n, vn) in rays.iter().zip(&vals).filter(|(_, v)| v.is_negative()) {
                let zn = tight(n);
                let common: Vec<Vec<Rat>> = zp.iter().filter(|i| zn.contains(i)).map(|&i| processed[i].clone()).collect();
                if dim < 2 || rank_of(&common) != dim - 2 {
                    continue;
                }
                let combo: Vec<Rat> = p.iter().zip(n).map(|(x, y)| &(vp * y) - &(vn * x)).collect();
                next.push(combo);
            }
        }
        rays = next;
    }
    let mut ray_ints: Vec<Vec<BigInt>> = rays.iter().map(|r| primitive(r)).collect();
    ray_ints.sort();
    ray_ints.dedup();
    ConeGenerators { lineality: canonical_lineality(lineality), rays: ray_ints }
}

/// True when `x` satisfies every inequality.
pub fn satisfies(inequalities: &[Vec<Rat>], x: &[Rat]) -> bool {
    inequalities.iter().all(|a| !dot(a, x).is_negative())
}

pub(crate) fn generator_rats(g: &ConeGenerators) -> Vec<Vec<Rat>> {
    g.generators().iter().map(|v| to_rat(v)).collect()
}
