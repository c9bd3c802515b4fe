use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::formula::{Assignment, Cmp, Formula, Linear, PresburgerFormula};
use super::lp::{feasible_point, Row};
use super::rational::Q;
use crate::error::{Error, Result};

/// Default number of LP relaxations a solve may run.
pub const DEFAULT_BUDGET: u64 = 200_000;

const PROPAGATION_ROUNDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub lp_solves: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { lp_solves: DEFAULT_BUDGET }
    }
}

impl Budget {
    pub fn new(lp_solves: u64) -> Self {
        Budget { lp_solves }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub lp_solves: u64,
    pub bb_nodes: u64,
    pub disjunction_branches: u64,
    pub propagation_conflicts: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(Assignment),
    Unsat,
    Unknown,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub verdict: Verdict,
    pub stats: Stats,
}

enum Outcome {
    Sat(Vec<i128>),
    Unsat,
    Unknown,
}

#[derive(Clone)]
struct Bounds {
    lo: Vec<i128>,
    hi: Vec<Option<i128>>,
}

impl Bounds {
    fn fixed(&self, v: usize) -> bool {
        self.hi[v] == Some(self.lo[v])
    }
}

/// Minimum and maximum of c·x over the box; None stands for ∓∞.
fn term_range(c: i64, lo: i128, hi: Option<i128>) -> (Option<i128>, Option<i128>) {
    let c = c as i128;
    let a = c.checked_mul(lo);
    let b = hi.and_then(|h| c.checked_mul(h));
    if c > 0 {
        (a, b)
    } else {
        (b, a)
    }
}

fn sum_opt(xs: impl Iterator<Item = Option<i128>>) -> Option<i128> {
    let mut s: i128 = 0;
    for x in xs {
        s = s.checked_add(x?)?;
    }
    Some(s)
}

fn atom_range(l: &Linear, b: &Bounds) -> (Option<i128>, Option<i128>) {
    let rs: Vec<_> = l.terms.iter().map(|&(v, c)| term_range(c, b.lo[v], b.hi[v])).collect();
    (sum_opt(rs.iter().map(|r| r.0)), sum_opt(rs.iter().map(|r| r.1)))
}

fn atom_refuted(l: &Linear, b: &Bounds) -> bool {
    let (mn, mx) = atom_range(l, b);
    let rhs = l.rhs as i128;
    let over = mn.is_some_and(|m| m > rhs);
    let under = mx.is_some_and(|m| m < rhs);
    match l.cmp {
        Cmp::Le => over,
        Cmp::Ge => under,
        Cmp::Eq => over || under,
    }
}

fn atom_entailed(l: &Linear, b: &Bounds) -> bool {
    let (mn, mx) = atom_range(l, b);
    let rhs = l.rhs as i128;
    let le = mx.is_some_and(|m| m <= rhs);
    let ge = mn.is_some_and(|m| m >= rhs);
    match l.cmp {
        Cmp::Le => le,
        Cmp::Ge => ge,
        Cmp::Eq => le && ge,
    }
}

fn refuted(f: &Formula, b: &Bounds) -> bool {
    match f {
        Formula::Atom(l) => atom_refuted(l, b),
        Formula::And(v) => v.iter().any(|g| refuted(g, b)),
        Formula::Or(v) => v.iter().all(|g| refuted(g, b)),
    }
}

fn entailed(f: &Formula, b: &Bounds) -> bool {
    match f {
        Formula::Atom(l) => atom_entailed(l, b),
        Formula::And(v) => v.iter().all(|g| entailed(g, b)),
        Formula::Or(v) => v.iter().any(|g| entailed(g, b)),
    }
}

fn div_floor(a: i128, b: i128) -> Option<i128> {
    let q = a.checked_div(b)?;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q.checked_sub(1)
    } else {
        Some(q)
    }
}

fn div_ceil(a: i128, b: i128) -> Option<i128> {
    let q = a.checked_div(b)?;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q.checked_add(1)
    } else {
        Some(q)
    }
}

/// Tightens bounds from Σ c·x ≤ rhs (sign = 1) or Σ c·x ≥ rhs (sign = -1).
/// Returns Err(()) on conflict, Ok(changed) otherwise.
fn tighten_le(terms: &[(usize, i64)], rhs: i128, sign: i64, b: &mut Bounds) -> std::result::Result<bool, ()> {
    let mins: Vec<Option<i128>> = terms.iter().map(|&(v, c)| term_range(c * sign, b.lo[v], b.hi[v]).0).collect();
    let Some(rhs) = rhs.checked_mul(sign as i128) else { return Ok(false) };
    let unbounded = mins.iter().filter(|m| m.is_none()).count();
    if unbounded > 1 {
        return Ok(false);
    }
    let Some(known) = sum_opt(mins.iter().map(|m| Some(m.unwrap_or(0)))) else { return Ok(false) };
    let mut changed = false;
    for (i, &(v, c)) in terms.iter().enumerate() {
        let c = (c * sign) as i128;
        let rest = match mins[i] {
            Some(m) if unbounded == 0 => known - m,
            None => known,
            Some(_) => continue,
        };
        let Some(room) = rhs.checked_sub(rest) else { continue };
        if c > 0 {
            let Some(h) = div_floor(room, c) else { continue };
            if h < b.lo[v] {
                return Err(());
            }
            if b.hi[v].is_none_or(|x| h < x) {
                b.hi[v] = Some(h);
                changed = true;
            }
        } else {
            let Some(l) = div_ceil(room, c) else { continue };
            if b.hi[v].is_some_and(|x| l > x) {
                return Err(());
            }
            if l > b.lo[v] {
                b.lo[v] = l;
                changed = true;
            }
        }
    }
    Ok(changed)
}

fn propagate(atoms: &[Linear], b: &mut Bounds) -> bool {
    for _ in 0..PROPAGATION_ROUNDS {
        let mut changed = false;
        for a in atoms {
            let rhs = a.rhs as i128;
            let r = match a.cmp {
                Cmp::Le => tighten_le(&a.terms, rhs, 1, b),
                Cmp::Ge => tighten_le(&a.terms, rhs, -1, b),
                Cmp::Eq => tighten_le(&a.terms, rhs, 1, b).and_then(|x| Ok(x | tighten_le(&a.terms, rhs, -1, b)?)),
            };
            match r {
                Err(()) => return false,
                Ok(c) => changed |= c,
            }
            if atom_refuted(a, b) {
                return false;
            }
        }
        if !changed {
            break;
        }
    }
    true
}

fn eval_atom(l: &Linear, x: &[i128]) -> bool {
    let mut s = BigInt::from(0);
    for &(v, c) in &l.terms {
        s += BigInt::from(c) * BigInt::from(x[v]);
    }
    let r = BigInt::from(l.rhs);
    match l.cmp {
        Cmp::Eq => s == r,
        Cmp::Le => s <= r,
        Cmp::Ge => s >= r,
    }
}

fn eval(f: &Formula, x: &[i128]) -> bool {
    match f {
        Formula::Atom(l) => eval_atom(l, x),
        Formula::And(v) => v.iter().all(|g| eval(g, x)),
        Formula::Or(v) => v.iter().any(|g| eval(g, x)),
    }
}

fn violated_atoms(f: &Formula, x: &[i128]) -> usize {
    match f {
        Formula::Atom(l) => usize::from(!eval_atom(l, x)),
        Formula::And(v) => v.iter().map(|g| violated_atoms(g, x)).sum(),
        Formula::Or(v) => v.iter().map(|g| violated_atoms(g, x)).min().unwrap_or(1),
    }
}

fn flatten<'a>(f: &'a Formula, atoms: &mut Vec<Linear>, ors: &mut Vec<&'a [Formula]>) {
    match f {
        Formula::Atom(l) => atoms.push(l.clone()),
        Formula::And(v) => v.iter().for_each(|g| flatten(g, atoms, ors)),
        Formula::Or(v) => ors.push(v),
    }
}

/// Bound n(ma)^{2m+1} on some solution of a feasible conjunctive system,
/// when it fits comfortably in machine integers.
fn solution_box(n: usize, atoms: &[Linear]) -> Option<i128> {
    let m = atoms.len();
    let ineq = atoms.iter().filter(|a| a.cmp != Cmp::Eq).count();
    let a = atoms
        .iter()
        .flat_map(|l| l.terms.iter().map(|&(_, c)| c.unsigned_abs()).chain([l.rhs.unsigned_abs()]))
        .max()
        .unwrap_or(1)
        .max(1);
    let base = BigInt::from(m.max(1)) * BigInt::from(a);
    let exp = 2 * m as u32 + 1;
    if exp > 400 {
        return None;
    }
    let bound = BigInt::from(n + ineq) * num_traits::pow(base, exp as usize);
    bound.to_i128().filter(|&b| b < (BigInt::one() << 100u32).to_i128().unwrap())
}

struct Search {
    n: usize,
    budget: Budget,
    stats: Stats,
}

impl Search {
    fn lp(&mut self, atoms: &[Linear], b: &Bounds) -> Option<Option<Vec<Q>>> {
        if self.stats.lp_solves >= self.budget.lp_solves {
            return None;
        }
        self.stats.lp_solves += 1;
        let mut col = vec![usize::MAX; self.n];
        let mut free = Vec::new();
        for v in 0..self.n {
            if !b.fixed(v) {
                col[v] = free.len();
                free.push(v);
            }
        }
        let mut rows = Vec::new();
        for a in atoms {
            let mut rhs = Q::int(a.rhs as i128);
            let mut coeffs = Vec::new();
            for &(v, c) in &a.terms {
                let shift = Q::int(c as i128).mul(&Q::int(b.lo[v]));
                rhs = rhs.sub(&shift);
                if col[v] != usize::MAX {
                    coeffs.push((col[v], Q::int(c as i128)));
                }
            }
            rows.push(Row { coeffs, cmp: a.cmp, rhs });
        }
        for (j, &v) in free.iter().enumerate() {
            if let Some(h) = b.hi[v] {
                rows.push(Row { coeffs: vec![(j, Q::one())], cmp: Cmp::Le, rhs: Q::int(h).sub(&Q::int(b.lo[v])) });
            }
        }
        let sol = feasible_point(free.len(), &rows);
        Some(sol.map(|y| {
            let mut x: Vec<Q> = b.lo.iter().map(|&l| Q::int(l)).collect();
            for (j, &v) in free.iter().enumerate() {
                x[v] = x[v].add(&y[j]);
            }
            x
        }))
    }

    /// Integer feasibility of a conjunction by branch and bound.
    fn bb(&mut self, atoms: &[Linear], root: &Bounds) -> Outcome {
        let mut occ = vec![0usize; self.n];
        for a in atoms {
            for &(v, _) in &a.terms {
                occ[v] += 1;
            }
        }
        let boxb = solution_box(self.n, atoms);
        let mut stack = vec![root.clone()];
        let mut unknown = false;
        while let Some(mut b) = stack.pop() {
            self.stats.bb_nodes += 1;
            if !propagate(atoms, &mut b) {
                self.stats.propagation_conflicts += 1;
                continue;
            }
            if (0..self.n).all(|v| b.fixed(v) || occ[v] == 0) {
                let x = b.lo.clone();
                if atoms.iter().all(|a| eval_atom(a, &x)) {
                    return Outcome::Sat(x);
                }
                continue;
            }
            let x = match self.lp(atoms, &b) {
                None => {
                    unknown = true;
                    break;
                }
                Some(None) => continue,
                Some(Some(x)) => x,
            };
            if let Some(bx) = boxb {
                let qb = Q::int(bx);
                let mut clipped = false;
                for v in 0..self.n {
                    if x[v] > qb && b.hi[v].is_none_or(|h| h > bx) {
                        b.hi[v] = Some(bx);
                        clipped = true;
                    }
                }
                if clipped {
                    stack.push(b);
                    continue;
                }
            }
            let mut pick: Option<usize> = None;
            for v in 0..self.n {
                if !x[v].is_integer() && pick.is_none_or(|p| occ[v] > occ[p]) {
                    pick = Some(v);
                }
            }
            let Some(v) = pick else {
                let xi: Vec<i128> = x.iter().map(|q| q.floor().to_i128().expect("integral LP point")).collect();
                return Outcome::Sat(xi);
            };
            let Some(f) = x[v].floor().to_i128() else {
                unknown = true;
                continue;
            };
            let mut up = b.clone();
            up.lo[v] = f + 1;
            let mut down = b;
            down.hi[v] = Some(f);
            stack.push(up);
            stack.push(down);
        }
        if unknown {
            Outcome::Unknown
        } else {
            Outcome::Unsat
        }
    }

    fn search(&mut self, mut atoms: Vec<Linear>, mut ors: Vec<&[Formula]>, mut b: Bounds) -> Outcome {
        // Unit propagation over pending disjunctions.
        loop {
            if !propagate(&atoms, &mut b) {
                self.stats.propagation_conflicts += 1;
                return Outcome::Unsat;
            }
            let mut progress = false;
            let mut keep: Vec<&[Formula]> = Vec::new();
            let pending = std::mem::take(&mut ors);
            let mut new_ors: Vec<&[Formula]> = Vec::new();
            for alts in pending {
                if alts.iter().any(|f| entailed(f, &b)) {
                    progress = true;
                    continue;
                }
                let live: Vec<&Formula> = alts.iter().filter(|f| !refuted(f, &b)).collect();
                match live.len() {
                    0 => {
                        self.stats.propagation_conflicts += 1;
                        return Outcome::Unsat;
                    }
                    1 => {
                        flatten(live[0], &mut atoms, &mut new_ors);
                        progress = true;
                    }
                    _ => keep.push(alts),
                }
            }
            keep.extend(new_ors);
            ors = keep;
            if !progress {
                break;
            }
        }
        let x = match self.bb(&atoms, &b) {
            Outcome::Sat(x) => x,
            other => return other,
        };
        let Some(pos) = ors.iter().position(|alts| !alts.iter().any(|f| eval(f, &x))) else {
            return Outcome::Sat(x);
        };
        let alts = ors.remove(pos);
        let mut order: Vec<usize> = (0..alts.len()).collect();
        order.sort_by_key(|&i| (violated_atoms(&alts[i], &x), i));
        let mut unknown = false;
        for i in order {
            if refuted(&alts[i], &b) {
                continue;
            }
            self.stats.disjunction_branches += 1;
            let mut a2 = atoms.clone();
            let mut o2 = ors.clone();
            flatten(&alts[i], &mut a2, &mut o2);
            match self.search(a2, o2, b.clone()) {
                Outcome::Sat(x) => return Outcome::Sat(x),
                Outcome::Unknown => unknown = true,
                Outcome::Unsat => {}
            }
            if self.stats.lp_solves >= self.budget.lp_solves {
                return Outcome::Unknown;
            }
        }
        if unknown {
            Outcome::Unknown
        } else {
            Outcome::Unsat
        }
    }
}

/// Decides satisfiability over ℕ. SAT witnesses cover every declared key,
/// quantified ones included, and are re-verified before being returned.
pub fn solve(f: &PresburgerFormula, budget: Budget) -> Result<Solution> {
    f.check_keys()?;
    let n = f.num_vars();
    let mut s = Search { n, budget, stats: Stats::default() };
    let mut atoms = Vec::new();
    let mut ors = Vec::new();
    for g in f.body() {
        flatten(g, &mut atoms, &mut ors);
    }
    let b = Bounds { lo: vec![0; n], hi: vec![None; n] };
    let verdict = match s.search(atoms, ors, b) {
        Outcome::Sat(x) => {
            let mut values = Vec::with_capacity(n);
            for v in x {
                values.push(u64::try_from(v).map_err(|_| Error::Overflow("solution value exceeds u64"))?);
            }
            if !f.eval(&values) {
                return Err(Error::Invalid(format!("solver witness failed re-verification:\n{}", f.render())));
            }
            Verdict::Sat(f.to_assignment(&values))
        }
        Outcome::Unsat => Verdict::Unsat,
        Outcome::Unknown => Verdict::Unknown,
    };
    Ok(Solution { verdict, stats: s.stats })
}

/// Exhaustive search over [0, bound]^n; the independent oracle for tests.
pub fn solve_exhaustive(f: &PresburgerFormula, bound: u64) -> Option<Vec<u64>> {
    let n = f.num_vars();
    let mut x = vec![0u64; n];
    loop {
        if f.eval(&x) {
            return Some(x);
        }
        let mut i = 0;
        loop {
            if i == n {
                return None;
            }
            if x[i] < bound {
                x[i] += 1;
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

/// Projection of a witness onto the given key names.
pub fn project<'a>(a: &Assignment, keys: impl IntoIterator<Item = &'a super::key::Key>) -> BTreeMap<super::key::Key, u64> {
    keys.into_iter().map(|k| (k.clone(), a.get(k).copied().unwrap_or(0))).collect()
}

#[cfg(test)]
mod tests {
    use super::super::key::Key;
    use super::*;

    #[test]
    fn odd_and_small() {
        let mut f = PresburgerFormula::new();
        let x = f.var(Key::symbol("x"));
        let y = f.var(Key::symbol("y"));
        f.add(Formula::eq([(x, 1), (y, -2)], 1));
        f.add(Formula::le([(x, 1)], 5));
        let s = solve(&f, Budget::default()).unwrap();
        let Verdict::Sat(a) = s.verdict else { panic!() };
        assert_eq!(a[&Key::symbol("x")], 2 * a[&Key::symbol("y")] + 1);
    }

    #[test]
    fn contradiction() {
        let mut f = PresburgerFormula::new();
        let x = f.var(Key::symbol("x"));
        f.add(Formula::ge([(x, 1)], 1));
        f.add(Formula::le([(x, 1)], 0));
        assert_eq!(solve(&f, Budget::default()).unwrap().verdict, Verdict::Unsat);
    }

    #[test]
    fn parity_needs_integrality() {
        // 2x = 2y + 1 has rational but no integer solutions.
        let mut f = PresburgerFormula::new();
        let x = f.var(Key::symbol("x"));
        let y = f.var(Key::symbol("y"));
        f.add(Formula::eq([(x, 2), (y, -2)], 1));
        assert_eq!(solve(&f, Budget::default()).unwrap().verdict, Verdict::Unsat);
    }

    #[test]
    fn disjunction_branches() {
        let mut f = PresburgerFormula::new();
        let x = f.var(Key::symbol("x"));
        f.add(Formula::Or(vec![Formula::le([(x, 1)], 2), Formula::ge([(x, 1)], 7)]));
        f.add(Formula::ge([(x, 1)], 3));
        let Verdict::Sat(a) = solve(&f, Budget::default()).unwrap().verdict else { panic!() };
        assert!(a[&Key::symbol("x")] >= 7);
    }

    #[test]
    fn zero_budget_is_unknown() {
        let mut f = PresburgerFormula::new();
        let x = f.var(Key::symbol("x"));
        let y = f.var(Key::symbol("y"));
        f.add(Formula::eq([(x, 1), (y, -1)], 0));
        f.add(Formula::ge([(x, 1)], 1));
        let s = solve(&f, Budget::new(0)).unwrap();
        assert_eq!(s.verdict, Verdict::Unknown);
    }
}
