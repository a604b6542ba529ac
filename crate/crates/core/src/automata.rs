//! Deterministic Muller automata over alphabets of target subsets.
//!
//! A letter is a bitmask over target indices `0..h`; bit `i` set means the
//! point lies in target `i`. Transition tables are dense, so `h` is capped at
//! [`MAX_ALPHABET_BITS`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

/// Subset of target indices, bit `i` for target `i`.
pub type Letter = u32;

/// Largest supported number of targets per alphabet.
pub const MAX_ALPHABET_BITS: usize = 16;

pub fn letter_from_indices(indices: impl IntoIterator<Item = usize>) -> Letter {
    indices.into_iter().fold(0, |acc, i| acc | (1 << i))
}

pub fn letter_indices(letter: Letter) -> Vec<usize> {
    (0..32).filter(|i| letter & (1 << i) != 0).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("alphabet over {bits} targets exceeds the supported {max}")]
    AlphabetTooLarge { bits: usize, max: usize },
    #[error("automaton has no states")]
    NoStates,
    #[error("state {state} has {found} transitions, expected {expected}")]
    DeltaShape {
        state: usize,
        expected: usize,
        found: usize,
    },
    #[error("transition from state {state} on letter {letter} targets missing state {target}")]
    TargetOutOfRange {
        state: usize,
        letter: Letter,
        target: usize,
    },
    #[error("initial state {0} out of range")]
    InitialOutOfRange(usize),
    #[error("acceptance set {set} names missing state {state}")]
    AcceptanceOutOfRange { set: usize, state: usize },
    #[error("letter map returned {found} letters for a block of length {expected}")]
    BlockLength { expected: usize, found: usize },
    #[error("letter {letter} is outside the alphabet over {bits} targets")]
    LetterOutOfRange { letter: Letter, bits: usize },
    #[error("letter renaming is not a bijection")]
    NotBijection,
    #[error("block length must be at least 1")]
    ZeroBlock,
    #[error("traversed sets cover {found} states, automaton has {expected}")]
    TraversedShape { expected: usize, found: usize },
}

/// Muller acceptance condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Acceptance {
    /// Accept iff the set of states visited infinitely often is in the family.
    Family(BTreeSet<BTreeSet<usize>>),
    /// Product-automaton form: accept iff the union of `traversed[q]` over the
    /// infinitely visited states `q` is in `family`.
    Traversed {
        family: BTreeSet<BTreeSet<usize>>,
        traversed: Vec<BTreeSet<usize>>,
    },
}

impl Acceptance {
    pub fn accepts(&self, inf: &BTreeSet<usize>) -> bool {
        match self {
            Acceptance::Family(f) => f.contains(inf),
            Acceptance::Traversed { family, traversed } => {
                let union: BTreeSet<usize> = inf.iter().flat_map(|&q| traversed[q].iter().copied()).collect();
                family.contains(&union)
            }
        }
    }

    /// The base-level states a product state stands for.
    fn traversed_of(&self, q: usize) -> BTreeSet<usize> {
        match self {
            Acceptance::Family(_) => BTreeSet::from([q]),
            Acceptance::Traversed { traversed, .. } => traversed[q].clone(),
        }
    }

    fn family(&self) -> &BTreeSet<BTreeSet<usize>> {
        match self {
            Acceptance::Family(f) | Acceptance::Traversed { family: f, .. } => f,
        }
    }
}

/// Ultimately periodic word `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl Lasso {
    /// Panics when `cycle` is empty.
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        Lasso { prefix, cycle }
    }

    /// Letter at position `n` of the infinite word.
    pub fn letter_at(&self, n: usize) -> Letter {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MullerAutomaton {
    bits: usize,
    num_states: usize,
    initial: usize,
    delta: Vec<usize>,
    acceptance: Acceptance,
}

fn check_bits(bits: usize) -> Result<(), AutomatonError> {
    if bits > MAX_ALPHABET_BITS {
        Err(AutomatonError::AlphabetTooLarge {
            bits,
            max: MAX_ALPHABET_BITS,
        })
    } else {
        Ok(())
    }
}

impl MullerAutomaton {
    /// `delta[q][letter]` is the successor of `q`; each row has `2^bits`
    /// entries.
    pub fn new(
        bits: usize,
        initial: usize,
        delta: Vec<Vec<usize>>,
        family: impl IntoIterator<Item = BTreeSet<usize>>,
    ) -> Result<Self, AutomatonError> {
        let a = Self::from_parts(bits, initial, delta, Acceptance::Family(family.into_iter().collect()))?;
        Ok(a)
    }

    pub fn from_parts(
        bits: usize,
        initial: usize,
        delta: Vec<Vec<usize>>,
        acceptance: Acceptance,
    ) -> Result<Self, AutomatonError> {
        check_bits(bits)?;
        let n = delta.len();
        if n == 0 {
            return Err(AutomatonError::NoStates);
        }
        let letters = 1usize << bits;
        for (state, row) in delta.iter().enumerate() {
            if row.len() != letters {
                return Err(AutomatonError::DeltaShape {
                    state,
                    expected: letters,
                    found: row.len(),
                });
            }
            if let Some((letter, &target)) = row.iter().enumerate().find(|(_, &t)| t >= n) {
                return Err(AutomatonError::TargetOutOfRange {
                    state,
                    letter: letter as Letter,
                    target,
                });
            }
        }
        if initial >= n {
            return Err(AutomatonError::InitialOutOfRange(initial));
        }
        let check_sets = |sets: &BTreeSet<BTreeSet<usize>>, bound: usize| {
            for (set, s) in sets.iter().enumerate() {
                if let Some(&state) = s.iter().find(|&&q| q >= bound) {
                    return Err(AutomatonError::AcceptanceOutOfRange { set, state });
                }
            }
            Ok(())
        };
        match &acceptance {
            Acceptance::Family(f) => check_sets(f, n)?,
            Acceptance::Traversed { traversed, .. } => {
                if traversed.len() != n {
                    return Err(AutomatonError::TraversedShape {
                        expected: n,
                        found: traversed.len(),
                    });
                }
            }
        }
        Ok(MullerAutomaton {
            bits,
            num_states: n,
            initial,
            delta: delta.into_iter().flatten().collect(),
            acceptance,
        })
    }

    /// Deterministic automaton for "eventually target `i`".
    pub fn eventually(bits: usize, i: usize) -> Result<Self, AutomatonError> {
        check_bits(bits)?;
        let letters = 1usize << bits;
        let row0 = (0..letters).map(|l| usize::from(l & (1 << i) != 0)).collect();
        Self::new(bits, 0, vec![row0, vec![1; letters]], [BTreeSet::from([1])])
    }

    /// Deterministic automaton for "infinitely often target `i`".
    pub fn infinitely_often(bits: usize, i: usize) -> Result<Self, AutomatonError> {
        check_bits(bits)?;
        let letters = 1usize << bits;
        let row: Vec<usize> = (0..letters).map(|l| usize::from(l & (1 << i) != 0)).collect();
        Self::new(
            bits,
            0,
            vec![row.clone(), row],
            [BTreeSet::from([1]), BTreeSet::from([0, 1])],
        )
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn num_letters(&self) -> usize {
        1 << self.bits
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn acceptance(&self) -> &Acceptance {
        &self.acceptance
    }

    pub fn step(&self, q: usize, letter: Letter) -> usize {
        assert!((letter as usize) < self.num_letters(), "letter outside alphabet");
        self.delta[q * self.num_letters() + letter as usize]
    }

    /// Transition table rows, one per state.
    pub fn delta_rows(&self) -> Vec<Vec<usize>> {
        self.delta.chunks(self.num_letters()).map(<[usize]>::to_vec).collect()
    }

    /// Final state and the full visitation list, starting with the initial
    /// state.
    pub fn run(&self, word: &[Letter]) -> (usize, Vec<usize>) {
        let mut visited = vec![self.initial];
        let mut q = self.initial;
        for &l in word {
            q = self.step(q, l);
            visited.push(q);
        }
        (q, visited)
    }

    pub fn run_from(&self, mut q: usize, word: &[Letter]) -> usize {
        for &l in word {
            q = self.step(q, l);
        }
        q
    }

    /// Same automaton started where `prefix` leads.
    pub fn reroot(&self, prefix: &[Letter]) -> MullerAutomaton {
        let mut a = self.clone();
        a.initial = self.run_from(self.initial, prefix);
        a
    }

    /// Automaton over `new_bits`-target letters whose steps read the length-`c`
    /// blocks `letter_map(σ′)` of the original. Only reachable product states
    /// are built; each records the states entered during its block.
    pub fn power_construct(
        &self,
        c: usize,
        new_bits: usize,
        letter_map: impl Fn(Letter) -> Vec<Letter>,
    ) -> Result<MullerAutomaton, AutomatonError> {
        if c == 0 {
            return Err(AutomatonError::ZeroBlock);
        }
        check_bits(new_bits)?;
        let new_letters = 1usize << new_bits;
        let mut blocks = Vec::with_capacity(new_letters);
        for l in 0..new_letters as Letter {
            let block = letter_map(l);
            if block.len() != c {
                return Err(AutomatonError::BlockLength {
                    expected: c,
                    found: block.len(),
                });
            }
            if let Some(&bad) = block.iter().find(|&&b| b as usize >= self.num_letters()) {
                return Err(AutomatonError::LetterOutOfRange {
                    letter: bad,
                    bits: self.bits,
                });
            }
            blocks.push(block);
        }

        let mut index: BTreeMap<(usize, BTreeSet<usize>), usize> = BTreeMap::new();
        let mut states: Vec<(usize, BTreeSet<usize>)> = Vec::new();
        let start = (self.initial, BTreeSet::new());
        index.insert(start.clone(), 0);
        states.push(start);
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut next = 0;
        while next < states.len() {
            let q = states[next].0;
            let mut row = Vec::with_capacity(new_letters);
            for block in &blocks {
                let mut p = q;
                let mut entered = BTreeSet::new();
                for &l in block {
                    p = self.step(p, l);
                    entered.insert(p);
                }
                let key = (p, entered);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = states.len();
                        index.insert(key.clone(), id);
                        states.push(key);
                        id
                    }
                };
                row.push(id);
            }
            delta.push(row);
            next += 1;
        }

        let traversed = states
            .iter()
            .map(|(_, s)| s.iter().flat_map(|&p| self.acceptance.traversed_of(p)).collect())
            .collect();
        let acceptance = Acceptance::Traversed {
            family: self.acceptance.family().clone(),
            traversed,
        };
        MullerAutomaton::from_parts(new_bits, 0, delta, acceptance)
    }

    /// Relabels letters: `bijection[old] = new`, so the new automaton reads
    /// `new` where the old one read `old`.
    pub fn rename(&self, bijection: &[Letter]) -> Result<MullerAutomaton, AutomatonError> {
        let n = self.num_letters();
        if bijection.len() != n {
            return Err(AutomatonError::NotBijection);
        }
        let mut inverse = vec![None; n];
        for (old, &new) in bijection.iter().enumerate() {
            let slot = inverse.get_mut(new as usize).ok_or(AutomatonError::NotBijection)?;
            if slot.replace(old).is_some() {
                return Err(AutomatonError::NotBijection);
            }
        }
        let mut a = self.clone();
        for q in 0..self.num_states {
            for (new, old) in inverse.iter().enumerate() {
                let old = old.expect("bijection checked");
                a.delta[q * n + new] = self.delta[q * n + old];
            }
        }
        Ok(a)
    }

    /// States visited infinitely often on `prefix · cycle^ω`.
    pub fn lasso_inf(&self, lasso: &Lasso) -> BTreeSet<usize> {
        let mut q = self.run_from(self.initial, &lasso.prefix);
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut entered: Vec<BTreeSet<usize>> = Vec::new();
        loop {
            if let Some(&first) = seen.get(&q) {
                return entered[first..].iter().flatten().copied().collect();
            }
            seen.insert(q, entered.len());
            let mut e = BTreeSet::new();
            for &l in &lasso.cycle {
                q = self.step(q, l);
                e.insert(q);
            }
            entered.push(e);
        }
    }

    pub fn lasso_accept(&self, lasso: &Lasso) -> bool {
        self.acceptance.accepts(&self.lasso_inf(lasso))
    }
}
