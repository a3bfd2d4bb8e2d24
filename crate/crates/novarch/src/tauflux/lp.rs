//! Exact feasibility by phase-I simplex with Bland's rule.

use crate::rational::Rat;

/// Some `x ≥ 0` with `A x = b`, or `None`.
pub fn nonneg_solution(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = a.first().map_or(0, Vec::len);
    let width = cols + rows + 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let flip = b[i].is_negative();
        let mut row = vec![Rat::ZERO; width];
        for j in 0..cols {
            row[j] = if flip { -&a[i][j] } else { a[i][j].clone() };
        }
        row[cols + i] = Rat::ONE;
        row[width - 1] = if flip { -&b[i] } else { b[i].clone() };
        t.push(row);
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    // Reduced costs of `min Σ artificials`.
    let mut cost = vec![Rat::ZERO; width];
    for row in &t {
        for j in 0..cols {
            cost[j] = &cost[j] - &row[j];
        }
        cost[width - 1] = &cost[width - 1] - &row[width - 1];
    }
    loop {
        let Some(enter) = (0..cols + rows).find(|&j| cost[j].is_negative()) else { break };
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..rows {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = leave else { break };
        let pivot = t[p][enter].clone();
        for x in t[p].iter_mut() {
            *x = &*x / &pivot;
        }
        let prow = t[p].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != p && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        let f = cost[enter].clone();
        for (x, y) in cost.iter_mut().zip(&prow) {
            *x = &*x - &(&f * y);
        }
        basis[p] = enter;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rat::ZERO; cols];
    for (i, &v) in basis.iter().enumerate() {
        if v < cols {
            x[v] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

/// Convex weights expressing `p` through `points`, if `p` lies in their hull.
pub fn convex_combination(points: &[Vec<Rat>], p: &[Rat]) -> Option<Vec<Rat>> {
    let mut a: Vec<Vec<Rat>> = (0..p.len()).map(|i| points.iter().map(|v| v[i].clone()).collect()).collect();
    a.push(vec![Rat::ONE; points.len()]);
    let mut b = p.to_vec();
    b.push(Rat::ONE);
    nonneg_solution(&a, &b)
}

/// Nonnegative weights expressing `p` through the columns `gens`.
pub fn conic_combination(gens: &[Vec<Rat>], p: &[Rat]) -> Option<Vec<Rat>> {
    let a: Vec<Vec<Rat>> = (0..p.len()).map(|i| gens.iter().map(|g| g[i].clone()).collect()).collect();
    nonneg_solution(&a, p)
}
