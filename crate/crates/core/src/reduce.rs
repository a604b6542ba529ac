//! The three-stage reduction from a Markov chain instance to an invertible
//! linear dynamical system.
//!
//! 1. Zero elimination: past step `ℓ` (the multiplicity of eigenvalue 0) the
//!    orbit stays in the column space `W` of `M^ℓ`, where `M` acts as an
//!    invertible `B`.
//! 2. Unit-root elimination: sampling every `c`-th step, with `c` the lcm of
//!    the root-of-unity orders, leaves `B^c` with 1 as the only unit-modulus
//!    eigenvalue. Targets split into `h·c` copies, one per residue.
//! 3. Stationary elimination: `B^{cq}·μ₁ = s + Q₃·A^q·v` with `s` stationary
//!    and `A` contracting. For `q ≥ n₀` the deviation stays inside a ball so
//!    small that targets whose hull misses `s` can never be hit.
//!
//! Time bookkeeping: original step `n ≥ ℓ` is written `n − ℓ = q·c + r`. The
//! exported system starts at `q = n₀`, so its step `t` is `q = n₀ + t`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::automata::{AutomatonError, Letter, MullerAutomaton};
use crate::ratlin::{vector, RatMatrix, Rational};
use crate::semialg::{AffineHull, SemialgebraicSet};
use crate::spectra::{
    self, analyze, check_column_stochastic, decay_bound, DecayCertificate, SpectraError, SpectralProfile,
    ValidationReport,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("initial vector has {found} entries, expected {expected}")]
    InitialLength { expected: usize, found: usize },
    #[error("initial entry {index} is negative")]
    NegativeInitial { index: usize },
    #[error("initial vector sums to {0}, expected 1")]
    InitialSum(Rational),
    #[error("target {target} is over {found} variables, expected {expected}")]
    TargetDimension {
        target: usize,
        expected: usize,
        found: usize,
    },
    #[error("specification reads {found} targets, instance has {expected}")]
    SpecAlphabet { expected: usize, found: usize },
    #[error("spectrum is not that of a stochastic matrix")]
    SpectrumValidation(Box<ValidationReport>),
    #[error("basis change matrix is singular in stage {stage}")]
    SingularBasis { stage: u8 },
    #[error("restricted matrix B is singular")]
    SingularB,
}

/// `(μ, M, T, spec)`: a column-stochastic matrix, an initial distribution,
/// targets over ℝ^k and a Muller automaton reading `2^T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticInstance {
    m: RatMatrix,
    mu: Vec<Rational>,
    targets: Vec<SemialgebraicSet>,
    spec: MullerAutomaton,
}

/// Letter of point `x`: bit `i` is set iff `x ∈ targets[i]`.
pub fn letter_of(targets: &[SemialgebraicSet], x: &[Rational]) -> Letter {
    targets
        .iter()
        .enumerate()
        .filter(|(_, t)| t.member(x))
        .fold(0, |acc, (i, _)| acc | (1 << i))
}

/// Declared hull rows of `t` pulled back along `x ↦ L·x`, dropping rows that
/// vanish. Syntactic equalities survive the substitution on their own.
fn pulled_back_hull(t: &SemialgebraicSet, l: &RatMatrix) -> Option<RatMatrix> {
    let h = t.declared_hull()? * l;
    let rows: Vec<Vec<Rational>> = h.to_rows().into_iter().filter(|r| !vector::is_zero(r)).collect();
    (!rows.is_empty()).then(|| RatMatrix::from_rows(rows))
}

fn preimage_with_hull(t: &SemialgebraicSet, l: &RatMatrix, b: &[Rational]) -> SemialgebraicSet {
    let pre = t.affine_preimage(l, b);
    match pulled_back_hull(t, l) {
        Some(h) => pre.with_declared_hull(h).expect("hull width matches"),
        None => pre,
    }
}

impl StochasticInstance {
    pub fn new(
        m: RatMatrix,
        mu: Vec<Rational>,
        targets: Vec<SemialgebraicSet>,
        spec: MullerAutomaton,
    ) -> Result<Self, ReduceError> {
        check_column_stochastic(&m)?;
        let k = m.rows();
        if mu.len() != k {
            return Err(ReduceError::InitialLength {
                expected: k,
                found: mu.len(),
            });
        }
        if let Some(index) = mu.iter().position(|x| x < &Rational::zero()) {
            return Err(ReduceError::NegativeInitial { index });
        }
        let total: Rational = mu.iter().sum();
        if !total.is_one() {
            return Err(ReduceError::InitialSum(total));
        }
        if let Some((target, t)) = targets.iter().enumerate().find(|(_, t)| t.nvars() != k) {
            return Err(ReduceError::TargetDimension {
                target,
                expected: k,
                found: t.nvars(),
            });
        }
        if spec.bits() != targets.len() {
            return Err(ReduceError::SpecAlphabet {
                expected: targets.len(),
                found: spec.bits(),
            });
        }
        Ok(StochasticInstance { m, mu, targets, spec })
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.m
    }

    pub fn initial(&self) -> &[Rational] {
        &self.mu
    }

    pub fn targets(&self) -> &[SemialgebraicSet] {
        &self.targets
    }

    pub fn spec(&self) -> &MullerAutomaton {
        &self.spec
    }

    /// `μ, Mμ, M²μ, …`.
    pub fn trajectory(&self) -> impl Iterator<Item = Vec<Rational>> + '_ {
        let mut x = self.mu.clone();
        core::iter::from_fn(move || {
            let next = self.m.mul_vec(&x);
            Some(core::mem::replace(&mut x, next))
        })
    }

    /// Exact letters for steps `0..horizon`.
    pub fn letters(&self, horizon: usize) -> Vec<Letter> {
        self.trajectory()
            .take(horizon)
            .map(|x| letter_of(&self.targets, &x))
            .collect()
    }
}

/// Stage 1: `M^n μ = Q·B^n·v1` for `n ≥ ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage1Result {
    pub ell: usize,
    /// Basis of `W` as columns, `k × (k − ℓ)`.
    pub q: RatMatrix,
    /// Left inverse of `q` from the basis change, `Q′Q = I`.
    pub qp: RatMatrix,
    pub b: RatMatrix,
    pub v1: Vec<Rational>,
    /// `B^ℓ·v1`, the stage-1 state at original step `ℓ`.
    pub mu1: Vec<Rational>,
    pub prefix_letters: Vec<Letter>,
    pub spec1: MullerAutomaton,
    pub targets1: Vec<SemialgebraicSet>,
}

/// Zero-eigenvalue elimination.
pub fn eliminate_zero(inst: &StochasticInstance, profile: &SpectralProfile) -> Result<Stage1Result, ReduceError> {
    let k = inst.dim();
    let ell = profile.zero_mult;
    let prefix_letters = inst.letters(ell);
    let spec1 = inst.spec.reroot(&prefix_letters);
    if ell == 0 {
        return Ok(Stage1Result {
            ell,
            q: RatMatrix::identity(k),
            qp: RatMatrix::identity(k),
            b: inst.m.clone(),
            v1: inst.mu.clone(),
            mu1: inst.mu.clone(),
            prefix_letters,
            spec1,
            targets1: inst.targets.clone(),
        });
    }
    let m_ell = inst.m.pow(ell as u64);
    let p = m_ell.kernel_basis();
    let (q, _) = m_ell.column_space_basis();
    let r = p.hstack(&q);
    let r_inv = r.inverse().ok_or(ReduceError::SingularBasis { stage: 1 })?;
    let qp = r_inv.row_range(ell, k);
    let b = &(&qp * &inst.m) * &q;
    let coords = r_inv.mul_vec(&inst.mu);
    let v1 = coords[ell..].to_vec();
    let mu1 = b.pow(ell as u64).mul_vec(&v1);
    let targets1 = inst
        .targets
        .iter()
        .map(|t| preimage_with_hull(t, &q, &vector::zeros(k)))
        .collect();
    Ok(Stage1Result {
        ell,
        q,
        qp,
        b,
        v1,
        mu1,
        prefix_letters,
        spec1,
        targets1,
    })
}

/// Stage 2: original step `ℓ + q·c + r` reads targets `(i, r)` at stage-2
/// step `q`. Target `(i, r)` sits at index `r·h + i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage2Result {
    pub c: usize,
    /// Number of original targets.
    pub h: usize,
    pub m2: RatMatrix,
    pub targets2: Vec<SemialgebraicSet>,
    pub spec2: MullerAutomaton,
}

impl Stage2Result {
    /// The `c` original letters a stage-2 letter stands for.
    pub fn block(&self, letter: Letter) -> Vec<Letter> {
        block_of(letter, self.h, self.c)
    }

    /// Packs `c` original letters into one stage-2 letter.
    pub fn pack(&self, block: &[Letter]) -> Letter {
        pack_block(block, self.h)
    }
}

fn block_of(letter: Letter, h: usize, c: usize) -> Vec<Letter> {
    let mask: Letter = if h == 0 { 0 } else { (1 << h) - 1 };
    (0..c).map(|r| (letter >> (r * h)) & mask).collect()
}

fn pack_block(block: &[Letter], h: usize) -> Letter {
    block.iter().enumerate().fold(0, |acc, (r, &l)| acc | (l << (r * h)))
}

/// Root-of-unity elimination.
pub fn eliminate_unit_roots(s1: &Stage1Result, h: usize) -> Result<Stage2Result, ReduceError> {
    if s1.b.det().is_zero() {
        return Err(ReduceError::SingularB);
    }
    let c = analyze(&s1.b).period_c as usize;
    if c == 1 {
        return Ok(Stage2Result {
            c,
            h,
            m2: s1.b.clone(),
            targets2: s1.targets1.clone(),
            spec2: s1.spec1.clone(),
        });
    }
    let kb = s1.b.rows();
    let zero = vector::zeros(kb);
    let mut targets2 = Vec::with_capacity(h * c);
    let mut br = RatMatrix::identity(kb);
    for _ in 0..c {
        for t in &s1.targets1 {
            targets2.push(preimage_with_hull(t, &br, &zero));
        }
        br = &br * &s1.b;
    }
    let m2 = br;
    let spec2 = s1.spec1.power_construct(c, h * c, |l| block_of(l, h, c))?;
    Ok(Stage2Result {
        c,
        h,
        m2,
        targets2,
        spec2,
    })
}

/// How the dimension claim for one reduced target was settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionStatus {
    /// A visible hull shows the reduced target in a strictly smaller
    /// subspace.
    Certified,
    /// No hull is visible, so the drop is not checked.
    NotCertified,
    /// The hull misses `s`; the reduced target is empty.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionReport {
    /// Original target index `i`.
    pub target: usize,
    /// Residue `r` of the copy.
    pub residue: usize,
    /// Dimension of the stage-2 hull.
    pub before: usize,
    /// Dimension of the reduced hull, absent for empty targets.
    pub after: Option<usize>,
    pub status: DimensionStatus,
}

/// Original step `n` in terms of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeAddress {
    /// Covered by the recorded prefix letters.
    Prefix(usize),
    /// `n = ℓ + (n₀ + t)·c + r`; `stage2_step = n₀ + t`, `reduced_step = t`.
    Reduced {
        stage2_step: usize,
        reduced_step: usize,
        residue: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub ell: usize,
    pub c: usize,
    pub n0: usize,
    pub h: usize,
    pub dyn_dim: usize,
    /// Original letters for steps `0..ℓ + c·n₀`, by direct simulation.
    pub prefix_letters: Vec<Letter>,
    /// One entry per reduced target, indexed `r·h + i`.
    pub dimensions: Vec<DimensionReport>,
}

impl ReductionCertificate {
    pub fn prefix_len(&self) -> usize {
        self.ell + self.c * self.n0
    }

    pub fn address(&self, n: usize) -> TimeAddress {
        if n < self.prefix_len() {
            return TimeAddress::Prefix(n);
        }
        let off = n - self.ell;
        let stage2_step = off / self.c;
        TimeAddress::Reduced {
            stage2_step,
            reduced_step: stage2_step - self.n0,
            residue: off % self.c,
        }
    }

    /// Original letter at residue `r` from a reduced-system letter.
    pub fn original_letter(&self, reduced: Letter, r: usize) -> Letter {
        block_of(reduced, self.h, self.c)[r]
    }
}

/// The reduced LDS instance `(v, A, T₃, spec₃)` together with the stage data
/// needed to map it back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedInstance {
    pub profile: SpectralProfile,
    pub stage1: Stage1Result,
    pub stage2: Stage2Result,
    /// Stationary part of the stage-2 orbit.
    pub s: Vec<Rational>,
    /// Basis of the contracting subspace as columns.
    pub q3: RatMatrix,
    pub q3p: RatMatrix,
    pub a: RatMatrix,
    /// Contracting coordinates at stage-2 step 0.
    pub v_stage2: Vec<Rational>,
    /// `A^{n₀}·v_stage2`, the initial vector of the exported system.
    pub v: Vec<Rational>,
    pub eps_sq: Rational,
    pub decay: DecayCertificate,
    pub targets3: Vec<SemialgebraicSet>,
    /// Targets whose hull misses `s`.
    pub hull_miss: Vec<bool>,
    pub spec3: MullerAutomaton,
    pub certificate: ReductionCertificate,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Cap on the decay-block search; the dimension-scaled default when
    /// absent.
    pub mcap: Option<usize>,
}

/// Stationary-part elimination. `inst` supplies the exact prefix letters.
pub fn eliminate_stationary(
    inst: &StochasticInstance,
    profile: SpectralProfile,
    s1: Stage1Result,
    s2: Stage2Result,
    options: &ReduceOptions,
) -> Result<ReducedInstance, ReduceError> {
    let k2 = s2.m2.rows();
    let shifted = &s2.m2 - &RatMatrix::identity(k2);
    let p = shifted.kernel_basis();
    let (q3, _) = shifted.column_space_basis();
    let dp = p.cols();
    let r = p.hstack(&q3);
    let r_inv = r.inverse().ok_or(ReduceError::SingularBasis { stage: 3 })?;
    let q3p = r_inv.row_range(dp, k2);
    let coords = r_inv.mul_vec(&s1.mu1);
    let s = p.mul_vec(&coords[..dp]);
    let v_stage2 = coords[dp..].to_vec();
    let a = &(&q3p * &s2.m2) * &q3;
    let dyn_dim = a.rows();

    let hulls: Vec<AffineHull> = s2.targets2.iter().map(SemialgebraicSet::affine_hull).collect();
    let hull_miss: Vec<bool> = hulls.iter().map(|h| !h.contains(&s)).collect();
    // ‖Q₃x‖² ≤ ‖Q₃‖_F²·‖x‖², so this keeps s + Q₃·ball away from every missed hull
    let scale = q3.frobenius_sq().max(Rational::one());
    let two = Rational::from_integer(2.into());
    let eps_sq = hulls
        .iter()
        .filter_map(|h| h.dist_sq(&s).filter(|d| !d.is_zero()))
        .min()
        .map_or_else(Rational::one, |d| d / (&two * &scale));

    let decay = decay_bound(&a, &v_stage2, &eps_sq, options.mcap)?;
    let n0 = decay.n0;
    let v = a.pow(n0 as u64).mul_vec(&v_stage2);

    let mut targets3 = Vec::with_capacity(s2.targets2.len());
    let mut dimensions = Vec::with_capacity(s2.targets2.len());
    for (j, t) in s2.targets2.iter().enumerate() {
        let before = hulls[j].dim().unwrap_or(0);
        let pre = t.affine_preimage(&q3, &s);
        let (set, after, status) = if hull_miss[j] {
            (pre, None, DimensionStatus::Empty)
        } else {
            let hq = &hulls[j].rows * &q3;
            let after = dyn_dim - hq.rank();
            let set = match pulled_back_hull(t, &q3) {
                Some(h) => pre.with_declared_hull(h).expect("hull width matches"),
                None => pre,
            };
            let status = if t.has_visible_hull() && after < before {
                DimensionStatus::Certified
            } else {
                DimensionStatus::NotCertified
            };
            (set, Some(after), status)
        };
        targets3.push(set.ball_intersect(&eps_sq));
        dimensions.push(DimensionReport {
            target: j % s2.h.max(1),
            residue: j / s2.h.max(1),
            before,
            after,
            status,
        });
    }

    let prefix_len = s1.ell + s2.c * n0;
    let prefix_letters = inst.letters(prefix_len);
    let stage2_prefix: Vec<Letter> = prefix_letters[s1.ell..]
        .chunks(s2.c)
        .map(|b| pack_block(b, s2.h))
        .collect();
    let spec3 = s2.spec2.reroot(&stage2_prefix);

    let certificate = ReductionCertificate {
        ell: s1.ell,
        c: s2.c,
        n0,
        h: s2.h,
        dyn_dim,
        prefix_letters,
        dimensions,
    };
    Ok(ReducedInstance {
        profile,
        stage1: s1,
        stage2: s2,
        s,
        q3,
        q3p,
        a,
        v_stage2,
        v,
        eps_sq,
        decay,
        targets3,
        hull_miss,
        spec3,
        certificate,
    })
}

/// Runs all three stages after checking the spectrum.
pub fn reduce_full(inst: &StochasticInstance, options: &ReduceOptions) -> Result<ReducedInstance, ReduceError> {
    let profile = analyze(&inst.m);
    let report = spectra::validate_stochastic_spectrum(&inst.m, &profile, options.mcap)?;
    if !report.passed() {
        return Err(ReduceError::SpectrumValidation(Box::new(report)));
    }
    let s1 = eliminate_zero(inst, &profile)?;
    let s2 = eliminate_unit_roots(&s1, inst.targets.len())?;
    eliminate_stationary(inst, profile, s1, s2, options)
}

impl ReducedInstance {
    pub fn dyn_dim(&self) -> usize {
        self.a.rows()
    }

    /// Letter of the reduced system at point `x` over all `h·c` targets.
    pub fn reduced_letter(&self, x: &[Rational]) -> Letter {
        letter_of(&self.targets3, x)
    }

    /// `A^t·v`, `t = 0, 1, …`.
    pub fn reduced_trajectory(&self) -> impl Iterator<Item = Vec<Rational>> + '_ {
        let mut x = self.v.clone();
        core::iter::from_fn(move || {
            let next = self.a.mul_vec(&x);
            Some(core::mem::replace(&mut x, next))
        })
    }

    /// Original letters for steps `0..len`, read from the certificate prefix
    /// and then from the reduced system.
    pub fn reconstructed_letters(&self, len: usize) -> Vec<Letter> {
        let cert = &self.certificate;
        let mut out: Vec<Letter> = cert.prefix_letters.iter().copied().take(len).collect();
        let mut traj = self.reduced_trajectory();
        while out.len() < len {
            let x = traj.next().expect("infinite trajectory");
            let block = block_of(self.reduced_letter(&x), cert.h, cert.c);
            out.extend(block.into_iter().take(len - out.len()));
        }
        out
    }

    /// Original distribution at step `n ≥ ℓ` from the stage data:
    /// `Q·B^r·(s + Q₃·A^q·v_stage2)` with `n − ℓ = q·c + r`.
    pub fn distribution_at(&self, n: usize) -> Option<Vec<Rational>> {
        let ell = self.stage1.ell;
        if n < ell {
            return None;
        }
        let c = self.stage2.c;
        let (q, r) = ((n - ell) / c, (n - ell) % c);
        let dev = self.a.pow(q as u64).mul_vec(&self.v_stage2);
        let x2 = vector::add(&self.s, &self.q3.mul_vec(&dev));
        let x1 = self.stage1.b.pow(r as u64).mul_vec(&x2);
        Some(self.stage1.q.mul_vec(&x1))
    }
}
