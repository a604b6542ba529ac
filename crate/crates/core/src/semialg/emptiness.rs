use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::interval::{atom_truth, support, Interval};
use super::{Atom, Relation, SemialgebraicSet};
use crate::ratlin::{sqrt_upper_bound, RatMatrix, Rational};

/// Branch limit for the DNF used by refutation and sampling.
const DNF_CAP: usize = 256;
/// Candidate points tried per DNF branch.
const BRANCH_SAMPLES: usize = 729;
const SAMPLED_BRANCHES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmptyReason {
    /// The caller established that the set lies in a subspace that misses
    /// the relevant point.
    HullMiss,
    /// Every DNF branch contains an atom that is false on the box implied by
    /// the branch's own bound atoms.
    IntervalContradiction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Emptiness {
    Empty(EmptyReason),
    NonEmpty(Vec<Rational>),
    Unknown,
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Emptiness::Empty(_) => "empty",
            Emptiness::NonEmpty(_) => "nonempty",
            Emptiness::Unknown => "unknown",
        }
    }
}

/// Per-variable bounds read off a conjunction. `None` means the branch is
/// already contradictory.
fn branch_bounds(nvars: usize, atoms: &[Atom]) -> Option<Vec<(Option<Rational>, Option<Rational>)>> {
    let mut b: Vec<(Option<Rational>, Option<Rational>)> = vec![(None, None); nvars];
    let tighten_hi = |slot: &mut Option<Rational>, v: Rational| {
        if slot.as_ref().map_or(true, |h| &v < h) {
            *slot = Some(v);
        }
    };
    let tighten_lo = |slot: &mut Option<Rational>, v: Rational| {
        if slot.as_ref().map_or(true, |l| &v > l) {
            *slot = Some(v);
        }
    };
    for a in atoms {
        if let Some(c) = a.poly.as_constant() {
            if !a.rel.holds(crate::ratlin::sign(&c)) {
                return None;
            }
            continue;
        }
        if let Some((form, constant)) = a.poly.affine_parts() {
            let vars: Vec<usize> = (0..nvars).filter(|&i| !form[i].is_zero()).collect();
            if let [i] = vars[..] {
                // a·x + c rel 0  ⇔  x rel' −c/a
                let value = -&constant / &form[i];
                let rel = if form[i].is_negative() { flip(a.rel) } else { a.rel };
                match rel {
                    Relation::Lt | Relation::Le => tighten_hi(&mut b[i].1, value),
                    Relation::Gt | Relation::Ge => tighten_lo(&mut b[i].0, value),
                    Relation::Eq => {
                        tighten_hi(&mut b[i].1, value.clone());
                        tighten_lo(&mut b[i].0, value);
                    }
                    Relation::Ne => {}
                }
            }
            continue;
        }
        if matches!(a.rel, Relation::Lt | Relation::Le) {
            if let Some((weights, r)) = diagonal_quadratic(&a.poly) {
                if r.is_negative() || (r.is_zero() && a.rel == Relation::Lt) {
                    return None;
                }
                for (i, w) in weights.iter().enumerate() {
                    if w.is_positive() {
                        let u = sqrt_upper_bound(&(&r / w), 24);
                        tighten_hi(&mut b[i].1, u.clone());
                        tighten_lo(&mut b[i].0, -u);
                    }
                }
            }
        }
    }
    for (lo, hi) in &b {
        if let (Some(l), Some(h)) = (lo, hi) {
            if l > h {
                return None;
            }
        }
    }
    Some(b)
}

/// Relation obtained when both sides are multiplied by a negative number.
fn flip(rel: Relation) -> Relation {
    match rel {
        Relation::Lt => Relation::Gt,
        Relation::Le => Relation::Ge,
        Relation::Gt => Relation::Lt,
        Relation::Ge => Relation::Le,
        r => r,
    }
}

/// `Σ w_i x_i² − r` with every `w_i ≥ 0`, as `(w, r)`.
fn diagonal_quadratic(p: &super::MultiPoly) -> Option<(Vec<Rational>, Rational)> {
    let mut w = vec![Rational::zero(); p.nvars()];
    let mut r = Rational::zero();
    for (e, c) in p.terms() {
        let deg: u32 = e.iter().sum();
        match deg {
            0 => r = -c.clone(),
            2 => {
                let i = e.iter().position(|&k| k == 2)?;
                if c.is_negative() {
                    return None;
                }
                w[i] = c.clone();
            }
            _ => return None,
        }
    }
    Some((w, r))
}

fn branch_refuted(nvars: usize, atoms: &[Atom]) -> bool {
    let Some(bounds) = branch_bounds(nvars, atoms) else {
        return true;
    };
    atoms.iter().any(|a| {
        let vars = support(&a.poly);
        if vars.iter().any(|&i| bounds[i].0.is_none() || bounds[i].1.is_none()) {
            return false;
        }
        // unused variables get a point interval; they do not affect the range
        let bx: Vec<Interval> = bounds
            .iter()
            .map(|(lo, hi)| match (lo, hi) {
                (Some(l), Some(h)) => Interval::new(l.clone(), h.clone()),
                _ => Interval::point(Rational::zero()),
            })
            .collect();
        atom_truth(a, &bx) == Some(false)
    })
}

/// `G` evenly spaced interior points of `[lo, hi]`.
fn axis_points(lo: &Rational, hi: &Rational, g: usize) -> Vec<Rational> {
    if lo == hi {
        return vec![lo.clone()];
    }
    let width = hi - lo;
    let two_g = Rational::from_integer((2 * g).into());
    (0..g)
        .map(|j| lo + &width * Rational::from_integer((2 * j + 1).into()) / &two_g)
        .collect()
}

fn grid_side(dim: usize, budget: usize) -> usize {
    if dim == 0 {
        return 1;
    }
    let mut g = 1usize;
    while (g + 1).checked_pow(dim as u32).is_some_and(|n| n <= budget) {
        g += 1;
    }
    g
}

/// Cartesian product of per-axis point lists, truncated to `cap` points.
fn product(axes: &[Vec<Rational>], cap: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::new();
        'outer: for p in &out {
            for x in axis {
                if next.len() >= cap {
                    break 'outer;
                }
                let mut q = p.clone();
                q.push(x.clone());
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Point of `{x : Mx = rhs}` nearest to `x0`, when the system is consistent.
fn project_onto(m: &RatMatrix, rhs: &[Rational], x0: &[Rational]) -> Option<Vec<Rational>> {
    use crate::ratlin::vector;
    m.solve(rhs)?;
    let (_, pivots) = m.transpose().column_space_basis();
    let rows: Vec<Vec<Rational>> = pivots.iter().map(|&i| m.row(i).to_vec()).collect();
    let mi = RatMatrix::from_rows(rows);
    let r: Vec<Rational> = pivots.iter().map(|&i| rhs[i].clone()).collect();
    let gram = &mi * &mi.transpose();
    let residual = vector::sub(&r, &mi.mul_vec(x0));
    let y = gram.solve(&residual)?;
    Some(vector::add(x0, &mi.transpose().mul_vec(&y)))
}

fn branch_candidates(nvars: usize, atoms: &[Atom]) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    let Some(bounds) = branch_bounds(nvars, atoms) else {
        return out;
    };
    let two = Rational::from_integer(2.into());
    let boxed: Vec<(Rational, Rational)> = bounds
        .iter()
        .map(|(lo, hi)| match (lo, hi) {
            (Some(l), Some(h)) => (l.clone(), h.clone()),
            (Some(l), None) => (l.clone(), l + &two),
            (None, Some(h)) => (h - &two, h.clone()),
            (None, None) => (-two.clone(), two.clone()),
        })
        .collect();
    out.push(boxed.iter().map(|(l, h)| (l + h) / &two).collect());

    // points on the affine subspace cut out by the branch's linear equalities
    let eqs: Vec<(Vec<Rational>, Rational)> = atoms
        .iter()
        .filter(|a| a.rel == Relation::Eq)
        .filter_map(|a| a.poly.affine_parts())
        .filter(|(f, _)| f.iter().any(|x| !x.is_zero()))
        .collect();
    if !eqs.is_empty() {
        let m = RatMatrix::from_rows(eqs.iter().map(|(f, _)| f.clone()).collect());
        let rhs: Vec<Rational> = eqs.iter().map(|(_, c)| -c.clone()).collect();
        if let Some(p) = project_onto(&m, &rhs, &out[0]) {
            out.push(p.clone());
            let k = m.kernel_basis();
            let d = k.cols();
            let g = grid_side(d, BRANCH_SAMPLES);
            let radius = boxed
                .iter()
                .map(|(l, h)| (h - l) / &two)
                .max()
                .unwrap_or_else(Rational::one);
            let coords = axis_points(&-radius.clone(), &radius, g);
            let axes = vec![coords; d];
            let basis: Vec<Vec<Rational>> = (0..d)
                .map(|j| {
                    let col = k.column(j);
                    let n = crate::ratlin::vector::inf_norm(&col);
                    crate::ratlin::vector::scale(&col, &n.recip())
                })
                .collect();
            for t in product(&axes, BRANCH_SAMPLES) {
                let mut x = p.clone();
                for (tj, bj) in t.iter().zip(&basis) {
                    x = crate::ratlin::vector::add(&x, &crate::ratlin::vector::scale(bj, tj));
                }
                out.push(x);
            }
        }
    }

    let g = grid_side(nvars, BRANCH_SAMPLES).max(2);
    let axes: Vec<Vec<Rational>> = boxed.iter().map(|(l, h)| axis_points(l, h, g)).collect();
    out.extend(product(&axes, BRANCH_SAMPLES));
    out
}

impl SemialgebraicSet {
    /// Three-valued emptiness. `s_in_hull = Some(false)` asserts a hull miss
    /// established by the caller.
    pub fn emptiness(&self, s_in_hull: Option<bool>) -> Emptiness {
        if s_in_hull == Some(false) {
            return Emptiness::Empty(EmptyReason::HullMiss);
        }
        if self.interval_refutes() {
            return Emptiness::Empty(EmptyReason::IntervalContradiction);
        }
        match self.find_witness() {
            Some(w) => Emptiness::NonEmpty(w),
            None => Emptiness::Unknown,
        }
    }

    /// Whether every DNF branch is refuted by interval evaluation.
    pub fn interval_refutes(&self) -> bool {
        match self.expr.dnf(DNF_CAP) {
            Some(branches) => branches.iter().all(|b| branch_refuted(self.nvars, b)),
            None => false,
        }
    }

    /// An exactly verified member found by structured sampling.
    pub fn find_witness(&self) -> Option<Vec<Rational>> {
        let origin = vec![Rational::zero(); self.nvars];
        if self.member(&origin) {
            return Some(origin);
        }
        let branches = self.expr.dnf(DNF_CAP).unwrap_or_else(|| vec![Vec::new()]);
        for b in branches.iter().take(SAMPLED_BRANCHES) {
            if let Some(w) = branch_candidates(self.nvars, b).into_iter().find(|x| self.member(x)) {
                return Some(w);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::{int, rat};
    use crate::semialg::{MultiPoly, SetExpr};

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    fn c(n: usize, v: Rational) -> MultiPoly {
        MultiPoly::constant(n, v)
    }

    fn set(n: usize, e: SetExpr) -> SemialgebraicSet {
        SemialgebraicSet::new(n, e).unwrap()
    }

    #[test]
    fn spec_examples() {
        let t = SemialgebraicSet::ambient(2);
        assert_eq!(t.emptiness(Some(false)), Emptiness::Empty(EmptyReason::HullMiss));

        let t = set(1, SetExpr::atom(x(1, 0), Relation::Eq)).ball_intersect(&int(1));
        assert_eq!(t.emptiness(None), Emptiness::NonEmpty(vec![int(0)]));

        let t = set(
            1,
            SetExpr::And(vec![
                SetExpr::atom(&x(1, 0).pow(2) - &c(1, int(1)), Relation::Lt),
                SetExpr::atom(&x(1, 0).pow(2) - &c(1, int(2)), Relation::Gt),
            ]),
        );
        assert_eq!(t.emptiness(None), Emptiness::Empty(EmptyReason::IntervalContradiction));
    }

    #[test]
    fn refutes_point_outside_ball() {
        let t = set(1, SetExpr::atom(&x(1, 0) - &c(1, int(2)), Relation::Eq)).ball_intersect(&int(1));
        assert!(t.emptiness(None).is_empty());
        let t = set(2, SetExpr::atom(&x(2, 0) - &c(2, rat(1, 3)), Relation::Gt)).ball_intersect(&rat(1, 16));
        assert!(t.emptiness(None).is_empty());
    }

    #[test]
    fn finds_off_origin_witnesses() {
        let t = set(2, SetExpr::atom(&x(2, 0) - &c(2, rat(1, 3)), Relation::Gt));
        match t.emptiness(None) {
            Emptiness::NonEmpty(w) => assert!(t.member(&w)),
            other => panic!("expected a witness, got {other:?}"),
        }
        // circle needs a boundary-guided point: x1 = 1/2 forces x2 = ±1/2
        let circle = &(&x(2, 0).pow(2) + &x(2, 1).pow(2)) - &c(2, rat(1, 2));
        let t = set(
            2,
            SetExpr::And(vec![
                SetExpr::atom(circle, Relation::Eq),
                SetExpr::atom(&x(2, 0) - &x(2, 1), Relation::Eq),
            ]),
        );
        assert!(matches!(t.emptiness(None), Emptiness::NonEmpty(_) | Emptiness::Unknown));
        let t = set(
            2,
            SetExpr::And(vec![
                SetExpr::atom(&x(2, 0) - &x(2, 1), Relation::Eq),
                SetExpr::atom(&x(2, 0) - &c(2, int(3)), Relation::Gt),
            ]),
        );
        match t.emptiness(None) {
            Emptiness::NonEmpty(w) => assert!(t.member(&w)),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn disjunction_needs_every_branch_refuted() {
        let bad = SetExpr::atom(&x(1, 0) - &c(1, int(5)), Relation::Eq);
        let good = SetExpr::atom(x(1, 0), Relation::Gt);
        let t = set(1, SetExpr::Or(vec![bad.clone(), good])).ball_intersect(&int(1));
        assert!(matches!(t.emptiness(None), Emptiness::NonEmpty(_)));
        let t = set(1, SetExpr::Or(vec![bad, SetExpr::falsity()])).ball_intersect(&int(1));
        assert!(t.emptiness(None).is_empty());
    }
}
