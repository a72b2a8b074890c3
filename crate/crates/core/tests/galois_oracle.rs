mod common;

use common::{eliminator_view, oracle_rank, oracle_solvable};
use flightfec::galois::{BitVector, Gf2Matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matrix_from_index(k: usize, index: u32) -> Vec<Vec<bool>> {
    (0..k)
        .map(|r| (0..k).map(|c| index >> (r * k + c) & 1 == 1).collect())
        .collect()
}

fn one_shot_rank(rows: &[Vec<bool>], width: usize) -> usize {
    let rows = rows.iter().map(|r| BitVector::from_bools(r)).collect();
    let mut m = Gf2Matrix::from_rows(width, rows).unwrap();
    m.eliminate()
}

#[test]
fn exhaustive_small_square_matrices() {
    for k in 1..=3usize {
        for index in 0..1u32 << (k * k) {
            let rows = matrix_from_index(k, index);
            let (rank, solved, correct) = eliminator_view(&rows, k, index as u64);
            assert_eq!(rank, oracle_rank(&rows), "k={k} index={index:#b}");
            assert_eq!(solved, oracle_solvable(&rows, k), "k={k} index={index:#b}");
            assert!(correct);
            assert_eq!(one_shot_rank(&rows, k), rank);
        }
    }
}

#[test]
fn random_rectangular_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for trial in 0..200 {
        let h = rng.random_range(1..=64);
        let w = rng.random_range(1..=64);
        let density: f64 = rng.random_range(0.02..0.6);
        let rows: Vec<Vec<bool>> = (0..h)
            .map(|_| (0..w).map(|_| rng.random_bool(density)).collect())
            .collect();
        let (rank, solved, correct) = eliminator_view(&rows, w, trial);
        assert_eq!(rank, oracle_rank(&rows), "trial {trial} {h}x{w}");
        assert_eq!(solved, oracle_solvable(&rows, w), "trial {trial} {h}x{w}");
        assert!(correct, "trial {trial}");
        assert_eq!(one_shot_rank(&rows, w), rank);
    }
}

proptest! {
    #[test]
    fn insertion_order_does_not_matter(
        rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 12), 1..20),
        rot in 0usize..20
    ) {
        let mut rotated = rows.clone();
        let n = rotated.len();
        rotated.rotate_left(rot % n);
        let a = eliminator_view(&rows, 12, 1);
        let b = eliminator_view(&rotated, 12, 1);
        prop_assert_eq!(a.0, b.0);
        prop_assert_eq!(a.1, b.1);
        prop_assert!(a.2 && b.2);
    }
}
