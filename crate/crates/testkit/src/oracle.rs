use std::collections::{BTreeSet, HashMap};

use distill_core::automata::{Lasso, Letter, MullerAutomaton};
use distill_core::{RatMatrix, RatPoly, Rational};
use nalgebra::DMatrix;
use num_traits::{ToPrimitive, Zero};

/// Determinant by fraction-based Gaussian elimination with row swaps.
pub fn gauss_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::from_integer(1.into());
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &pivot;
            for j in col..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
            }
        }
    }
    det
}

/// Polynomial of degree at most `xs.len() - 1` through the given points.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> RatPoly {
    let mut out = RatPoly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = RatPoly::constant(yi.clone());
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = &basis * &RatPoly::linear(xj.clone());
                basis = basis.scale(&(Rational::from_integer(1.into()) / (xi - xj)));
            }
        }
        out = &out + &basis;
    }
    out
}

fn sample_points(count: usize) -> Vec<Rational> {
    (0..count as i64).map(|i| Rational::from_integer(i.into())).collect()
}

/// `det(xI − m)` from determinants at `k + 1` sample points.
pub fn charpoly_by_interpolation(m: &RatMatrix) -> RatPoly {
    let k = m.rows();
    let xs = sample_points(k + 1);
    let ys: Vec<Rational> = xs
        .iter()
        .map(|x| {
            let rows: Vec<Vec<Rational>> = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| {
                            let d = if i == j { x.clone() } else { Rational::zero() };
                            d - &m[(i, j)]
                        })
                        .collect()
                })
                .collect();
            gauss_det(&rows)
        })
        .collect();
    interpolate(&xs, &ys)
}

/// Sylvester matrix of two polynomials given by ascending coefficients.
pub fn sylvester(p: &[Rational], q: &[Rational]) -> Vec<Vec<Rational>> {
    let n = p.len() - 1;
    let m = q.len() - 1;
    let size = n + m;
    let mut rows = vec![vec![Rational::zero(); size]; size];
    for r in 0..m {
        for (i, c) in p.iter().rev().enumerate() {
            rows[r][r + i] = c.clone();
        }
    }
    for r in 0..n {
        for (i, c) in q.iter().rev().enumerate() {
            rows[m + r][r + i] = c.clone();
        }
    }
    rows
}

/// `Res_x(p(x), x^c − y)` as a polynomial in `y`.
pub fn resultant_with_power(p: &RatPoly, c: usize) -> RatPoly {
    let deg = p.degree().expect("nonzero polynomial");
    let ys = sample_points(deg + 1);
    let values: Vec<Rational> = ys
        .iter()
        .map(|y| {
            let mut q = vec![Rational::zero(); c + 1];
            q[0] = -y.clone();
            q[c] = Rational::from_integer(1.into());
            gauss_det(&sylvester(p.coeffs(), &q))
        })
        .collect();
    interpolate(&ys, &values)
}

/// Equality up to an overall sign.
pub fn equal_up_to_sign(a: &RatPoly, b: &RatPoly) -> bool {
    a == b || *a == b.scale(&Rational::from_integer((-1).into()))
}

pub fn to_f64_matrix(m: &RatMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].to_f64().expect("finite"))
}

/// Number of eigenvalues with `delta < |λ| < 1 − delta`.
pub fn float_dyn_dim(m: &RatMatrix, delta: f64) -> usize {
    if m.rows() == 0 {
        return 0;
    }
    to_f64_matrix(m)
        .complex_eigenvalues()
        .iter()
        .filter(|z| {
            let r = z.norm();
            r > delta && r < 1.0 - delta
        })
        .count()
}

/// States visited infinitely often on `prefix · cycle^ω`, found by
/// simulating past the point where the cycle-start states must repeat.
pub fn simulated_inf(a: &MullerAutomaton, lasso: &Lasso) -> BTreeSet<usize> {
    let n = a.num_states();
    let mut q = a.initial();
    for &l in &lasso.prefix {
        q = a.step(q, l);
    }
    for _ in 0..n {
        for &l in &lasso.cycle {
            q = a.step(q, l);
        }
    }
    let mut inf = BTreeSet::new();
    for _ in 0..n {
        for &l in &lasso.cycle {
            q = a.step(q, l);
            inf.insert(q);
        }
    }
    inf
}

pub fn simulated_accept(a: &MullerAutomaton, lasso: &Lasso) -> bool {
    a.acceptance().accepts(&simulated_inf(a, lasso))
}

/// Expands a lasso over block letters into the base alphabet.
pub fn flatten(lasso: &Lasso, block: impl Fn(Letter) -> Vec<Letter>) -> Lasso {
    let expand = |w: &[Letter]| w.iter().flat_map(|&l| block(l)).collect::<Vec<_>>();
    Lasso::new(expand(&lasso.prefix), expand(&lasso.cycle))
}

/// Finds the first exact repeat `x_n = x_{n+p}` of the orbit of `x0` under
/// `m` within `max_steps`, returning `(n, p)`.
pub fn orbit_repeat(m: &RatMatrix, x0: &[Rational], max_steps: usize) -> Option<(usize, usize)> {
    let mut seen: HashMap<Vec<Rational>, usize> = HashMap::new();
    let mut x = x0.to_vec();
    for n in 0..=max_steps {
        if let Some(&first) = seen.get(&x) {
            return Some((first, n - first));
        }
        let next = m.mul_vec(&x);
        seen.insert(std::mem::replace(&mut x, next), n);
    }
    None
}

/// Detects `w = u · σ^ω` on a finite sample: returns the shortest `u` whose
/// remainder is constant, provided the constant tail has at least
/// `min_tail` letters.
pub fn constant_tail(word: &[Letter], min_tail: usize) -> Option<(usize, Letter)> {
    let last = *word.last()?;
    let start = word.iter().rposition(|&l| l != last).map_or(0, |p| p + 1);
    (word.len() - start >= min_tail).then_some((start, last))
}
