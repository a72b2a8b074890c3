//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use flightfec::fountain::{expand_combination, CombinationDescriptor};
use flightfec::galois::{BitVector, Eliminator};

/// Rank by plain row reduction over `Vec<bool>` rows.
pub fn oracle_rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..m.len()).find(|&r| m[r][col]) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Unknowns `i` whose unit vector lies in the row space, i.e. appending
/// `e_i` leaves the rank unchanged.
pub fn oracle_solvable(rows: &[Vec<bool>], width: usize) -> BTreeSet<usize> {
    let base = oracle_rank(rows);
    (0..width)
        .filter(|&i| {
            let mut ext = rows.to_vec();
            let mut e = vec![false; width];
            e[i] = true;
            ext.push(e);
            oracle_rank(&ext) == base
        })
        .collect()
}

/// Feeds the rows into an eliminator carrying XOR-consistent payloads and
/// returns its rank, solved set, and whether every solution is correct.
pub fn eliminator_view(rows: &[Vec<bool>], width: usize, seed: u64) -> (usize, BTreeSet<usize>, bool) {
    let unknowns: Vec<[u8; 4]> = (0..width as u64)
        .map(|i| (seed.wrapping_mul(0x9E37_79B9).wrapping_add(i * 0x1234_5679) as u32).to_le_bytes())
        .collect();
    let mut el = Eliminator::new(width, 4);
    for row in rows {
        let mut payload = [0u8; 4];
        for (i, _) in row.iter().enumerate().filter(|(_, &b)| b) {
            for (p, u) in payload.iter_mut().zip(unknowns[i]) {
                *p ^= u;
            }
        }
        el.insert(&BitVector::from_bools(row), &payload).unwrap();
    }
    let solved: BTreeSet<usize> = (0..width).filter(|&i| el.is_solved(i)).collect();
    let correct = solved.iter().all(|&i| el.solution(i) == Some(&unknowns[i][..]));
    (el.rank(), solved, correct)
}

/// Codewords beyond `k` needed for full rank with every codeword covering
/// all `k` frames; seeds `seed_base, seed_base + 1, ...`.
pub fn fountain_surplus(k: usize, seed_base: u32) -> usize {
    let mut el = Eliminator::new(k, 0);
    let mut used = 0u32;
    while el.rank() < k {
        let d = CombinationDescriptor {
            seed: seed_base.wrapping_add(used),
            window: k as u16,
        };
        el.insert(&expand_combination(d).unwrap(), &[]).unwrap();
        used += 1;
    }
    used as usize - k
}
