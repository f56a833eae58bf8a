//! The single-qubit Clifford group generated by ±π/2 rotations about x and y,
//! and random sequences that compose to the identity or to X.
//!
//!     cargo run --release --example clifford_group

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use restless_sim::clifford::{random_clifford_sequence, sequence_generators, CliffordGroup, ComposeTarget};

fn main() {
    let group = CliffordGroup::get();
    for e in group.elements() {
        let word: Vec<String> = e.word.iter().map(|g| format!("{g:?}")).collect();
        println!("C{:<2} {}", e.index, if word.is_empty() { "I".into() } else { word.join(" ") });
    }
    println!("mean generators per Clifford N_c = {:.4}", group.mean_word_length());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for target in [ComposeTarget::Identity, ComposeTarget::X] {
        let seq = random_clifford_sequence(5, target, &mut rng);
        println!("m = 5, compose to {target}: Cliffords {seq:?}, {} gates", sequence_generators(&seq).len());
    }
}
