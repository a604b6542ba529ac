//! Decisions on reduced instances, plus bounded simulation as a ground-truth
//! oracle.
//!
//! A reduced instance is settled outright when its characteristic word is
//! constant after the certified prefix: either the system has dimension zero
//! or every reduced target is empty or constant on the ε-ball. Everything
//! else is classified and left to an external LDS procedure.

use alloc::vec::Vec;

use crate::automata::{Lasso, Letter};
use crate::reduce::{ReducedInstance, StochasticInstance};
use crate::semialg::Emptiness;

/// Targets of linear dimension at most this count as low-dimensional.
pub const LOW_LINEAR_DIM: usize = 4;
/// Targets of intrinsic dimension at most this count as low-dimensional.
pub const LOW_INTRINSIC_DIM: usize = 1;
/// Dynamical dimension up to which every target is admissible.
pub const LOW_DYN_DIM: usize = 3;

/// Exact letters for steps `0..horizon` and the spec's state trace on them.
pub fn bounded_check(inst: &StochasticInstance, horizon: usize) -> (Vec<Letter>, Vec<usize>) {
    let letters = inst.letters(horizon);
    let (_, trace) = inst.spec().run(&letters);
    (letters, trace)
}

/// Emptiness of an original target in the reduced system, combined over its
/// `c` residue copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedEmptiness {
    Empty,
    NonEmpty,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetClass {
    /// Dimension of the visible hull, an upper bound on linear dimension.
    pub linear_dim_bound: usize,
    pub intrinsic_dim: Option<usize>,
    pub markov_low_dimensional: bool,
    pub emptiness: ReducedEmptiness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub dyn_dim: usize,
    pub targets: Vec<TargetClass>,
    /// Every target is low-dimensional or the dynamical dimension is small,
    /// so the reduced instance lies in a decidable class that needs an
    /// external LDS procedure.
    pub tame_applicable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// `evidence` is an original-time lasso equal to the characteristic word.
    Accept {
        evidence: Lasso,
    },
    Reject {
        evidence: Lasso,
    },
    ReducedOnly(Classification),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Accept { .. } => "accept",
            Verdict::Reject { .. } => "reject",
            Verdict::ReducedOnly(_) => "reduced-only",
        }
    }

    pub fn evidence(&self) -> Option<&Lasso> {
        match self {
            Verdict::Accept { evidence } | Verdict::Reject { evidence } => Some(evidence),
            Verdict::ReducedOnly(_) => None,
        }
    }
}

/// Truth of reduced target `j` along the whole reduced orbit, when fixed.
fn constant_truth(red: &ReducedInstance, j: usize) -> Option<bool> {
    let t = &red.targets3[j];
    if red.hull_miss[j] {
        return Some(false);
    }
    if red.dyn_dim() == 0 {
        return Some(t.member(&[]));
    }
    if let Some(b) = t.truth_within_ball(&red.eps_sq) {
        return Some(b);
    }
    t.emptiness(None).is_empty().then_some(false)
}

/// `intrinsic_dims[i]` is an optional declared intrinsic dimension of
/// original target `i`.
pub fn classify(inst: &StochasticInstance, red: &ReducedInstance, intrinsic_dims: &[Option<usize>]) -> Classification {
    let h = inst.targets().len();
    let c = red.certificate.c;
    let targets: Vec<TargetClass> = inst
        .targets()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let linear_dim_bound = t.nvars() - t.syntactic_hull().rank();
            let intrinsic_dim = intrinsic_dims.get(i).copied().flatten();
            let markov_low_dimensional =
                linear_dim_bound <= LOW_LINEAR_DIM || intrinsic_dim.is_some_and(|d| d <= LOW_INTRINSIC_DIM);
            let copies: Vec<Emptiness> = (0..c)
                .map(|r| {
                    let j = r * h + i;
                    red.targets3[j].emptiness(red.hull_miss[j].then_some(false))
                })
                .collect();
            let emptiness = if copies.iter().all(Emptiness::is_empty) {
                ReducedEmptiness::Empty
            } else if copies.iter().any(|e| matches!(e, Emptiness::NonEmpty(_))) {
                ReducedEmptiness::NonEmpty
            } else {
                ReducedEmptiness::Unknown
            };
            TargetClass {
                linear_dim_bound,
                intrinsic_dim,
                markov_low_dimensional,
                emptiness,
            }
        })
        .collect();
    let dyn_dim = red.dyn_dim();
    let tame_applicable = targets.iter().all(|t| t.markov_low_dimensional) || dyn_dim <= LOW_DYN_DIM;
    Classification {
        dyn_dim,
        targets,
        tame_applicable,
    }
}

/// Settles the instance when the reduced word is constant, otherwise
/// classifies it.
pub fn decide_fragment(inst: &StochasticInstance, red: &ReducedInstance, intrinsic_dims: &[Option<usize>]) -> Verdict {
    let mut sigma: Letter = 0;
    for j in 0..red.targets3.len() {
        match constant_truth(red, j) {
            Some(true) => sigma |= 1 << j,
            Some(false) => {}
            None => return Verdict::ReducedOnly(classify(inst, red, intrinsic_dims)),
        }
    }
    let cert = &red.certificate;
    let accepted = red.spec3.lasso_accept(&Lasso::new(Vec::new(), alloc::vec![sigma]));
    let cycle = (0..cert.c).map(|r| cert.original_letter(sigma, r)).collect();
    let evidence = Lasso::new(cert.prefix_letters.clone(), cycle);
    debug_assert_eq!(inst.spec().lasso_accept(&evidence), accepted);
    if accepted {
        Verdict::Accept { evidence }
    } else {
        Verdict::Reject { evidence }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossValidation {
    Agree {
        window: usize,
    },
    Diverge {
        index: usize,
        direct: Letter,
        reconstructed: Letter,
    },
}

impl CrossValidation {
    pub fn agrees(&self) -> bool {
        matches!(self, CrossValidation::Agree { .. })
    }
}

/// Compares direct simulation against the reconstruction from `red` over
/// steps `0..window`.
pub fn cross_validate(inst: &StochasticInstance, red: &ReducedInstance, window: usize) -> CrossValidation {
    let direct = inst.letters(window);
    let rebuilt = red.reconstructed_letters(window);
    match direct.iter().zip(&rebuilt).position(|(a, b)| a != b) {
        Some(index) => CrossValidation::Diverge {
            index,
            direct: direct[index],
            reconstructed: rebuilt[index],
        },
        None => CrossValidation::Agree { window },
    }
}
