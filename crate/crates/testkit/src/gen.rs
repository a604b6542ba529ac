use std::collections::BTreeSet;

use distill_core::automata::{Lasso, Letter, MullerAutomaton};
use distill_core::embed::{embed_lds, uniform};
use distill_core::semialg::{MultiPoly, Relation, SemialgebraicSet, SetExpr};
use distill_core::{RatMatrix, Rational};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `n/d` with `n` in `-max_num..=max_num` and `d` in `1..=max_den`.
pub fn small_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Rational {
    q(rng.random_range(-max_num..=max_num), rng.random_range(1..=max_den))
}

/// Normalised integer weights in `lo..=hi`, at least one of them positive.
pub fn weights(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| q(x, total)).collect();
        }
    }
}

/// Column-stochastic matrix with a planted spectral shape.
#[derive(Debug, Clone)]
pub struct PlantedChain {
    pub matrix: RatMatrix,
    pub initial: Vec<Rational>,
    /// Number of duplicated columns, each contributing one zero eigenvalue.
    pub ell: usize,
    /// Number of cyclic classes in the recurrent block.
    pub period: usize,
}

/// Order `k ≥ 3` chain: a recurrent block of `period` cyclic classes, a
/// strictly positive transient block leaking into it, and `ell` duplicated
/// columns. States are shuffled at the end.
pub fn planted_chain(rng: &mut impl Rng, k: usize) -> PlantedChain {
    assert!(k >= 3);
    let period = rng.random_range(1..=3.min(k - 1));
    let ell = rng.random_range(0..=2.min(k - period - 1));
    let base = k - ell;
    let n_cyc = rng.random_range(period..base);
    let mut class = vec![0usize; n_cyc];
    for (i, c) in class.iter_mut().enumerate() {
        *c = if i < period { i } else { rng.random_range(0..period) };
    }
    let mut m = vec![vec![Rational::zero(); base]; base];
    for j in 0..n_cyc {
        let next: Vec<usize> = (0..n_cyc).filter(|&i| class[i] == (class[j] + 1) % period).collect();
        for (i, w) in next.iter().zip(weights(rng, next.len(), 1, 3)) {
            m[*i][j] = w;
        }
    }
    for j in n_cyc..base {
        for (i, w) in weights(rng, base, 1, 3).into_iter().enumerate() {
            m[i][j] = w;
        }
    }
    finish_chain(rng, m, ell, period)
}

/// Duplicates `ell` random columns, splitting the matching rows, then
/// shuffles the states.
fn finish_chain(rng: &mut impl Rng, mut m: Vec<Vec<Rational>>, ell: usize, period: usize) -> PlantedChain {
    for _ in 0..ell {
        let n = m.len();
        let j = rng.random_range(0..n);
        m.push(vec![Rational::zero(); n]);
        for col in 0..n {
            let f = q(rng.random_range(0..=2), 2);
            let moved = &m[j][col] * &f;
            m[j][col] -= &moved;
            m[n][col] = moved;
        }
        for row in m.iter_mut() {
            let v = row[j].clone();
            row.push(v);
        }
    }
    let k = m.len();
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(rng);
    let matrix = RatMatrix::from_fn(k, k, |i, j| m[perm[i]][perm[j]].clone());
    let initial = weights(rng, k, 0, 3);
    PlantedChain {
        matrix,
        initial,
        ell,
        period,
    }
}

/// Chain whose eigenvalues are all zero or roots of unity: one or two
/// cyclic permutations plus duplicated columns.
pub fn dyn_zero_chain(rng: &mut impl Rng, k: usize) -> PlantedChain {
    assert!(k >= 2);
    let first = rng.random_range(1..=3.min(k));
    let second = if k > first && rng.random_bool(0.3) {
        rng.random_range(1..=2.min(k - first))
    } else {
        0
    };
    let base = first + second;
    let mut m = vec![vec![Rational::zero(); base]; base];
    for (offset, len) in [(0, first), (first, second)] {
        for j in 0..len {
            m[offset + (j + 1) % len][offset + j] = Rational::one();
        }
    }
    let period = if second == 0 { first } else { lcm(first, second) };
    finish_chain(rng, m, k - base, period)
}

fn lcm(a: usize, b: usize) -> usize {
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    a / gcd(a, b) * b
}

/// Stochastic matrix whose non-trivial eigenvalues are rational multiples of
/// planted values.
#[derive(Debug, Clone)]
pub struct PlantedSpectrum {
    pub matrix: RatMatrix,
    /// Eigenvalues as planted, including 1 and roots of unity.
    pub eigenvalues: Vec<(f64, f64)>,
    pub dyn_dim: usize,
}

const PLANTED: [(i64, i64); 9] = [
    (0, 1),
    (1, 2),
    (-1, 2),
    (1, 3),
    (-2, 3),
    (3, 4),
    (-1, 4),
    (2, 5),
    (-4, 5),
];

/// Random integer matrix with nonzero determinant.
pub fn invertible(rng: &mut impl Rng, k: usize, max: i64) -> RatMatrix {
    loop {
        let u = RatMatrix::from_fn(k, k, |_, _| q(rng.random_range(-max..=max), 1));
        if !u.det().is_zero() {
            return u;
        }
    }
}

/// Direct sum of an embedded diagonalisable LDS with distinct planted
/// eigenvalues and a cyclic permutation of length 1 to 3.
pub fn planted_spectrum(rng: &mut impl Rng, k: usize) -> PlantedSpectrum {
    let mut pool = PLANTED.to_vec();
    pool.shuffle(rng);
    let lambdas: Vec<Rational> = pool[..k].iter().map(|&(n, d)| q(n, d)).collect();
    let u = invertible(rng, k, 2);
    let d = RatMatrix::from_fn(k, k, |i, j| if i == j { lambdas[i].clone() } else { Rational::zero() });
    let a = &(&u * &d) * &u.inverse().expect("invertible");
    let v = vec![Rational::one(); k];
    let emb = embed_lds(&uniform(k + 1), &a, &v).expect("embedding of a rational matrix");
    let c = rng.random_range(1..=3usize);
    let n = k + 1 + c;
    let matrix = RatMatrix::from_fn(n, n, |i, j| {
        if i <= k && j <= k {
            emb.m[(i, j)].clone()
        } else if i > k && j > k {
            let (i, j) = (i - k - 1, j - k - 1);
            if i == (j + 1) % c {
                Rational::one()
            } else {
                Rational::zero()
            }
        } else {
            Rational::zero()
        }
    });
    let rho = emb.rho.to_f64_lossy();
    let mut eigenvalues: Vec<(f64, f64)> = lambdas.iter().map(|l| (rho * l.to_f64_lossy(), 0.0)).collect();
    eigenvalues.push((1.0, 0.0));
    for t in 0..c {
        let angle = 2.0 * std::f64::consts::PI * t as f64 / c as f64;
        eigenvalues.push((angle.cos(), angle.sin()));
    }
    let dyn_dim = lambdas.iter().filter(|l| !l.is_zero()).count();
    PlantedSpectrum {
        matrix,
        eigenvalues,
        dyn_dim,
    }
}

trait Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl Lossy for Rational {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).expect("finite")
    }
}

pub fn relation(rng: &mut impl Rng) -> Relation {
    Relation::ALL[rng.random_range(0..Relation::ALL.len())]
}

/// Polynomial of total degree at most `deg` with some random terms.
pub fn random_poly(rng: &mut impl Rng, nvars: usize, deg: u32, homogeneous: bool) -> MultiPoly {
    let mut monos: Vec<Vec<u32>> = vec![vec![0; nvars]];
    for d in 1..=deg {
        let prev: Vec<Vec<u32>> = monos
            .iter()
            .filter(|m| m.iter().sum::<u32>() == d - 1)
            .cloned()
            .collect();
        let mut next = BTreeSet::new();
        for m in prev {
            for i in 0..nvars {
                let mut e = m.clone();
                e[i] += 1;
                next.insert(e);
            }
        }
        monos.extend(next);
    }
    loop {
        let top = rng.random_range(1..=deg);
        let mut terms: Vec<(Vec<u32>, Rational)> = Vec::new();
        for m in &monos {
            let d = m.iter().sum::<u32>();
            let eligible = if homogeneous { d == top } else { d <= deg };
            if eligible && rng.random_bool(0.6) {
                terms.push((m.clone(), small_rational(rng, 3, 3)));
            }
        }
        let p = MultiPoly::from_terms(nvars, terms);
        if !p.is_zero() && p.as_constant().is_none() {
            return p;
        }
    }
}

/// One atom, or a binary Boolean combination of two.
pub fn random_target(rng: &mut impl Rng, nvars: usize, deg: u32, homogeneous: bool) -> SemialgebraicSet {
    let atom = |rng: &mut _| SetExpr::atom(random_poly(rng, nvars, deg, homogeneous), relation(rng));
    let expr = match rng.random_range(0..5) {
        0 => SetExpr::And(vec![atom(rng), atom(rng)]),
        1 => SetExpr::Or(vec![atom(rng), atom(rng)]),
        2 => SetExpr::complement(atom(rng)),
        _ => atom(rng),
    };
    SemialgebraicSet::new(nvars, expr).expect("generated over nvars")
}

/// Non-homogeneous target biased towards the simplex: the affine part is
/// centred at `1/nvars`.
pub fn centred_target(rng: &mut impl Rng, nvars: usize) -> SemialgebraicSet {
    let p = random_poly(rng, nvars, 2, false);
    let centre = vec![q(1, nvars as i64); nvars];
    let shifted = &p - &MultiPoly::constant(nvars, p.eval(&centre));
    let expr = SetExpr::atom(shifted, relation(rng));
    SemialgebraicSet::new(nvars, expr).expect("generated over nvars")
}

/// Targets built so that every reduced copy is constant: an exact level set
/// `x_i = r` for an unlikely `r`, and a Boolean combination involving the
/// simplex equation `Σx = 1`.
pub fn constant_tail_targets(rng: &mut impl Rng, k: usize) -> Vec<SemialgebraicSet> {
    let i = rng.random_range(0..k);
    let r = q(rng.random_range(1..=9), 97);
    let level = SetExpr::atom(&MultiPoly::var(k, i) - &MultiPoly::constant(k, r), Relation::Eq);
    let ones = vec![Rational::one(); k];
    let simplex = SetExpr::atom(MultiPoly::linear(&ones, -Rational::one()), Relation::Eq);
    let second = match rng.random_range(0..4) {
        0 => simplex,
        1 => SetExpr::complement(simplex),
        2 => SetExpr::Or(vec![simplex, level.clone()]),
        _ => SetExpr::And(vec![
            SetExpr::complement(simplex),
            SetExpr::atom(random_poly(rng, k, 2, false), relation(rng)),
        ]),
    };
    [level, second]
        .into_iter()
        .map(|e| SemialgebraicSet::new(k, e).expect("generated over k"))
        .collect()
}

pub fn random_automaton(rng: &mut impl Rng, bits: usize, max_states: usize) -> MullerAutomaton {
    let n = rng.random_range(1..=max_states);
    let delta: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..1usize << bits).map(|_| rng.random_range(0..n)).collect())
        .collect();
    let family: Vec<BTreeSet<usize>> = (1u32..1 << n)
        .filter(|_| rng.random_bool(0.4))
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    let initial = rng.random_range(0..n);
    MullerAutomaton::new(bits, initial, delta, family).expect("well-formed")
}

/// Lasso with `|prefix| + |cycle| ≤ max_len`.
pub fn random_lasso(rng: &mut impl Rng, bits: usize, max_len: usize) -> Lasso {
    let cycle_len = rng.random_range(1..=max_len);
    let prefix_len = rng.random_range(0..=max_len - cycle_len);
    let mut letter = |_| rng.random_range(0..1u32 << bits) as Letter;
    let prefix = (0..prefix_len).map(&mut letter).collect();
    let cycle = (0..cycle_len).map(&mut letter).collect();
    Lasso::new(prefix, cycle)
}

/// Random rational `A` (entries `n/d`, `|n| ≤ 2`, `d ≤ 3`) and integer `v`.
pub fn random_lds(rng: &mut impl Rng, k: usize) -> (RatMatrix, Vec<Rational>) {
    let a = RatMatrix::from_fn(k, k, |_, _| small_rational(rng, 2, 3));
    let v = (0..k).map(|_| q(rng.random_range(-3..=3), 1)).collect();
    (a, v)
}
