//! The 24-element single-qubit Clifford group over R_x(±π/2), R_y(±π/2).

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::linalg::{pauli_rotation, pauli_x, pauli_y, phase_insensitive_distance, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::XPlus, Generator::XMinus, Generator::YPlus, Generator::YMinus];

    pub fn unitary(self) -> Mat2 {
        match self {
            Generator::XPlus => pauli_rotation(&pauli_x(), FRAC_PI_2),
            Generator::XMinus => pauli_rotation(&pauli_x(), -FRAC_PI_2),
            Generator::YPlus => pauli_rotation(&pauli_y(), FRAC_PI_2),
            Generator::YMinus => pauli_rotation(&pauli_y(), -FRAC_PI_2),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement {
    pub index: usize,
    /// Minimal generator word, applied left to right in time.
    pub word: Vec<Generator>,
    pub unitary: Mat2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComposeTarget {
    Identity,
    X,
}

impl ComposeTarget {
    pub fn unitary(self) -> Mat2 {
        match self {
            ComposeTarget::Identity => Mat2::identity(),
            ComposeTarget::X => pauli_x(),
        }
    }
}

impl std::str::FromStr for ComposeTarget {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "i" => Ok(ComposeTarget::Identity),
            "x" => Ok(ComposeTarget::X),
            other => Err(format!("unknown compose target '{other}', expected identity or x")),
        }
    }
}

impl std::fmt::Display for ComposeTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ComposeTarget::Identity => "identity",
            ComposeTarget::X => "x",
        })
    }
}

pub const GROUP_ORDER: usize = 24;

pub struct CliffordGroup {
    elements: Vec<CliffordElement>,
    products: Vec<[usize; GROUP_ORDER]>,
}

impl CliffordGroup {
    /// Breadth-first enumeration from the identity, so each element keeps
    /// the first (shortest) word that reaches it.
    fn build() -> Self {
        let mut elements = vec![CliffordElement { index: 0, word: vec![], unitary: Mat2::identity() }];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in Generator::ALL {
                let u = g.unitary() * elements[i].unitary;
                if find(&elements, &u).is_none() {
                    let mut word = elements[i].word.clone();
                    word.push(g);
                    let index = elements.len();
                    elements.push(CliffordElement { index, word, unitary: u });
                    queue.push_back(index);
                }
            }
        }
        assert_eq!(elements.len(), GROUP_ORDER);
        let products = (0..GROUP_ORDER)
            .map(|a| {
                let mut row = [0; GROUP_ORDER];
                for (b, slot) in row.iter_mut().enumerate() {
                    *slot = find(&elements, &(elements[a].unitary * elements[b].unitary)).expect("group closure");
                }
                row
            })
            .collect();
        Self { elements, products }
    }

    pub fn get() -> &'static CliffordGroup {
        static GROUP: OnceLock<CliffordGroup> = OnceLock::new();
        GROUP.get_or_init(Self::build)
    }

    pub fn elements(&self) -> &[CliffordElement] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &CliffordElement {
        &self.elements[index]
    }

    /// Index of U_a · U_b (b applied first).
    pub fn product(&self, a: usize, b: usize) -> usize {
        self.products[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..GROUP_ORDER).find(|&b| self.products[a][b] == 0).expect("every element has an inverse")
    }

    pub fn index_of(&self, u: &Mat2) -> Option<usize> {
        find(&self.elements, u)
    }

    /// Mean generator count over the group, the N_c of a uniform draw.
    pub fn mean_word_length(&self) -> f64 {
        self.elements.iter().map(|e| e.word.len()).sum::<usize>() as f64 / GROUP_ORDER as f64
    }
}

fn find(elements: &[CliffordElement], u: &Mat2) -> Option<usize> {
    elements.iter().position(|e| phase_insensitive_distance(&e.unitary, u) < 1e-8)
}

/// m uniformly random elements followed by the element that makes the whole
/// product equal to the target up to global phase.
pub fn random_clifford_sequence(m: usize, target: ComposeTarget, rng: &mut impl Rng) -> Vec<usize> {
    let group = CliffordGroup::get();
    let mut seq: Vec<usize> = (0..m).map(|_| rng.random_range(0..GROUP_ORDER)).collect();
    let total = seq.iter().fold(0, |acc, &c| group.product(c, acc));
    let target_index = group.index_of(&target.unitary()).expect("target is a Clifford");
    seq.push(group.product(target_index, group.inverse(total)));
    seq
}

/// Product of the ideal representatives in time order.
pub fn sequence_unitary(sequence: &[usize]) -> Mat2 {
    let group = CliffordGroup::get();
    sequence.iter().fold(Mat2::identity(), |acc, &c| group.element(c).unitary * acc)
}

/// Generator word of a whole sequence.
pub fn sequence_generators(sequence: &[usize]) -> Vec<Generator> {
    let group = CliffordGroup::get();
    sequence.iter().flat_map(|&c| group.element(c).word.iter().copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn group_has_24_elements_and_closes() {
        let g = CliffordGroup::get();
        assert_eq!(g.elements().len(), 24);
        for a in 0..24 {
            for b in 0..24 {
                assert!(g.product(a, b) < 24);
            }
            assert_eq!(g.product(a, g.inverse(a)), 0);
        }
    }

    #[test]
    fn words_compose_to_representatives() {
        for e in CliffordGroup::get().elements() {
            let u = e.word.iter().fold(Mat2::identity(), |acc, g| g.unitary() * acc);
            assert!(phase_insensitive_distance(&u, &e.unitary) < 1e-10);
        }
    }

    #[test]
    fn identity_has_empty_word_and_mean_length() {
        let g = CliffordGroup::get();
        assert!(g.element(0).word.is_empty());
        assert!((g.mean_word_length() - 52.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn zero_depth_identity_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(random_clifford_sequence(0, ComposeTarget::Identity, &mut rng), vec![0]);
    }

    #[test]
    fn sequences_compose_to_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for target in [ComposeTarget::Identity, ComposeTarget::X] {
            for m in [0, 1, 5, 30] {
                let s = random_clifford_sequence(m, target, &mut rng);
                assert_eq!(s.len(), m + 1);
                assert!(phase_insensitive_distance(&sequence_unitary(&s), &target.unitary()) < 1e-10);
            }
        }
    }
}
