use super::formula::Cmp;
use super::rational::Q;

/// One row Σ c_j·x_j ⋈ rhs of an LP over x ≥ 0.
#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, Q)>,
    pub cmp: Cmp,
    pub rhs: Q,
}

/// Phase-one simplex with Bland's rule. Returns a basic feasible point of
/// {x ≥ 0 : rows} or None when the system is infeasible.
pub fn feasible_point(n: usize, rows: &[Row]) -> Option<Vec<Q>> {
    let m = rows.len();
    if m == 0 {
        return Some(vec![Q::zero(); n]);
    }
    // Normalize to rhs ≥ 0.
    let mut norm: Vec<(Vec<(usize, Q)>, Cmp, Q)> = Vec::with_capacity(m);
    for r in rows {
        if r.rhs.is_negative() {
            let cmp = match r.cmp {
                Cmp::Eq => Cmp::Eq,
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
            };
            norm.push((r.coeffs.iter().map(|(j, c)| (*j, c.neg())).collect(), cmp, r.rhs.neg()));
        } else {
            norm.push((r.coeffs.clone(), r.cmp, r.rhs.clone()));
        }
    }
    let slacks = norm.iter().filter(|r| r.1 != Cmp::Eq).count();
    let arts = norm.iter().filter(|r| r.1 != Cmp::Le).count();
    let art0 = n + slacks;
    let cols = art0 + arts;
    let mut t: Vec<Vec<Q>> = vec![vec![Q::zero(); cols + 1]; m];
    let mut basis = vec![0usize; m];
    let (mut s, mut a) = (n, art0);
    for (i, (coeffs, cmp, rhs)) in norm.into_iter().enumerate() {
        for (j, c) in coeffs {
            t[i][j] = t[i][j].add(&c);
        }
        t[i][cols] = rhs;
        match cmp {
            Cmp::Le => {
                t[i][s] = Q::one();
                basis[i] = s;
                s += 1;
            }
            Cmp::Ge => {
                t[i][s] = Q::int(-1);
                s += 1;
                t[i][a] = Q::one();
                basis[i] = a;
                a += 1;
            }
            Cmp::Eq => {
                t[i][a] = Q::one();
                basis[i] = a;
                a += 1;
            }
        }
    }
    let mut obj = vec![Q::zero(); cols + 1];
    for i in 0..m {
        if basis[i] >= art0 {
            for j in 0..=cols {
                if (j < art0 || j == cols)
                    && !t[i][j].is_zero() {
                        obj[j] = obj[j].sub(&t[i][j]);
                    }
            }
        }
    }
    let mut dropped = vec![false; cols];
    loop {
        let enter = (0..cols).find(|&j| !dropped[j] && obj[j].is_negative());
        let Some(c) = enter else { break };
        let mut best: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][c].is_positive() {
                let ratio = t[i][cols].div(&t[i][c]);
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so a column with obj < 0 always has a positive entry.
        let (r, _) = best.expect("phase one unbounded");
        pivot(&mut t, &mut obj, r, c, cols);
        let leaving = basis[r];
        basis[r] = c;
        if leaving >= art0 {
            dropped[leaving] = true;
        }
    }
    if !obj[cols].is_zero() {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][cols].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Q>], obj: &mut [Q], r: usize, c: usize, cols: usize) {
    let p = t[r][c].clone();
    let nz: Vec<usize> = (0..=cols).filter(|&j| !t[r][j].is_zero()).collect();
    for &j in &nz {
        t[r][j] = t[r][j].div(&p);
    }
    let prow: Vec<(usize, Q)> = nz.iter().map(|&j| (j, t[r][j].clone())).collect();
    let elim = |row: &mut [Q]| {
        let f = row[c].clone();
        if f.is_zero() {
            return;
        }
        for (j, v) in &prow {
            row[*j] = row[*j].sub(&f.mul(v));
        }
    };
    for (i, row) in t.iter_mut().enumerate() {
        if i != r {
            elim(row);
        }
    }
    elim(obj);
}
