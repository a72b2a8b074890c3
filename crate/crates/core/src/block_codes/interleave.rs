//! Block interleaver: `d` equal-length codewords are sent column by column,
//! so byte `j` of block `i` lands at offset `j * d + i`.

use super::BlockCodeError;

pub fn interleave<B: AsRef<[u8]>>(blocks: &[B]) -> Result<Vec<u8>, BlockCodeError> {
    let depth = blocks.len();
    if depth == 0 {
        return Err(BlockCodeError::EmptyInterleave);
    }
    let len = blocks[0].as_ref().len();
    if let Some(bad) = blocks.iter().find(|b| b.as_ref().len() != len) {
        return Err(BlockCodeError::RaggedBlocks {
            expected: len,
            got: bad.as_ref().len(),
        });
    }
    let mut out = vec![0u8; depth * len];
    for (i, block) in blocks.iter().enumerate() {
        for (j, &b) in block.as_ref().iter().enumerate() {
            out[j * depth + i] = b;
        }
    }
    Ok(out)
}

pub fn deinterleave(bytes: &[u8], depth: usize) -> Result<Vec<Vec<u8>>, BlockCodeError> {
    if depth == 0 {
        return Err(BlockCodeError::EmptyInterleave);
    }
    if !bytes.len().is_multiple_of(depth) {
        return Err(BlockCodeError::RaggedBlocks {
            expected: bytes.len().div_ceil(depth) * depth,
            got: bytes.len(),
        });
    }
    let len = bytes.len() / depth;
    Ok((0..depth)
        .map(|i| (0..len).map(|j| bytes[j * depth + i]).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block_codes::{ReedSolomon, RsParams};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn depth_one_is_identity() {
        let block = vec![1u8, 2, 3, 4];
        assert_eq!(interleave(std::slice::from_ref(&block)).unwrap(), block);
        assert_eq!(deinterleave(&block, 1).unwrap(), vec![block]);
    }

    #[test]
    fn ragged_and_empty_rejected() {
        assert!(matches!(
            interleave(&[vec![0u8; 3], vec![0u8; 4]]),
            Err(BlockCodeError::RaggedBlocks { .. })
        ));
        assert!(matches!(
            interleave::<Vec<u8>>(&[]),
            Err(BlockCodeError::EmptyInterleave)
        ));
        assert!(matches!(
            deinterleave(&[0; 7], 2),
            Err(BlockCodeError::RaggedBlocks { .. })
        ));
    }

    #[test]
    fn long_burst_over_depth_ten_is_corrected() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let code = ReedSolomon::new(RsParams::new(255, 223).unwrap());
        let data: Vec<Vec<u8>> = (0..10).map(|_| (0..223).map(|_| rng.random()).collect()).collect();
        let blocks: Vec<Vec<u8>> = data.iter().map(|d| code.encode(d).unwrap().into_symbols()).collect();
        let mut wire = interleave(&blocks).unwrap();
        assert_eq!(wire.len(), 2550);
        let start = rng.random_range(0..=2550 - 160);
        for b in &mut wire[start..start + 160] {
            *b ^= rng.random_range(1..=255u8);
        }
        for (rx, d) in deinterleave(&wire, 10).unwrap().iter().zip(&data) {
            assert_eq!(&code.decode(rx, &[]).unwrap(), d);
        }
    }

    proptest! {
        #[test]
        fn round_trip(depth in 1usize..12, len in 1usize..40, seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let blocks: Vec<Vec<u8>> = (0..depth).map(|_| (0..len).map(|_| rng.random()).collect()).collect();
            let wire = interleave(&blocks).unwrap();
            prop_assert_eq!(deinterleave(&wire, depth).unwrap(), blocks);
        }

        #[test]
        fn burst_spreads_evenly(depth in 1usize..16, len in 1usize..64, burst_frac in 0.0f64..1.0, start_frac in 0.0f64..1.0) {
            let total = depth * len;
            let burst = ((total as f64 * burst_frac) as usize).max(1);
            let start = ((total - burst) as f64 * start_frac) as usize;
            let mut wire = vec![0u8; total];
            for b in &mut wire[start..start + burst] {
                *b = 1;
            }
            for block in deinterleave(&wire, depth).unwrap() {
                let hits = block.iter().filter(|&&b| b == 1).count();
                prop_assert!(hits <= burst.div_ceil(depth));
            }
        }
    }
}
