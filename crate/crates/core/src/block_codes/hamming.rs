//! Hamming (15,11) shortened to (12,8): one byte in, 12 channel bits out.
//!
//! Bits 0..8 carry the data byte, bits 8..12 the parity. Parity nibble is
//! the XOR of the check-matrix columns of the set data bits; parity bit `j`
//! has column `1 << j`.

/// Check-matrix columns of the eight data bits: the first eight nibbles of
/// weight >= 2, which leaves 13, 14 and 15 unused by the shortening.
const DATA_COLUMNS: [u8; 8] = [3, 5, 6, 7, 9, 10, 11, 12];

const PARITY_TABLE: [u8; 256] = {
    let mut t = [0u8; 256];
    let mut b = 0;
    while b < 256 {
        let mut p = 0u8;
        let mut i = 0;
        while i < 8 {
            if (b >> i) & 1 == 1 {
                p ^= DATA_COLUMNS[i];
            }
            i += 1;
        }
        t[b] = p;
        b += 1;
    }
    t
};

/// Codeword bit to flip for each syndrome; 0xFF for no correction.
const SYNDROME_FLIP: [u8; 16] = {
    let mut t = [0xFFu8; 16];
    let mut i = 0;
    while i < 8 {
        t[DATA_COLUMNS[i] as usize] = i as u8;
        i += 1;
    }
    t[1] = 8;
    t[2] = 9;
    t[4] = 10;
    t[8] = 11;
    t
};

/// 12-bit systematic codeword in the low bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HammingWord(pub u16);

impl HammingWord {
    pub const BITS: u32 = 12;
    pub const MASK: u16 = 0x0FFF;

    pub fn data(self) -> u8 {
        self.0 as u8
    }

    pub fn parity(self) -> u8 {
        ((self.0 >> 8) & 0xF) as u8
    }

    pub fn flip(self, bit: u32) -> HammingWord {
        assert!(bit < Self::BITS);
        HammingWord(self.0 ^ (1 << bit))
    }
}

pub fn hamming_encode(b: u8) -> HammingWord {
    HammingWord(b as u16 | (PARITY_TABLE[b as usize] as u16) << 8)
}

/// Corrects up to one bit error. With two or more errors the result is some
/// byte: the decoder raises no failure signal.
pub fn hamming_decode(w: HammingWord) -> u8 {
    let data = w.data();
    let syndrome = PARITY_TABLE[data as usize] ^ w.parity();
    match SYNDROME_FLIP[syndrome as usize] {
        bit if bit < 8 => data ^ (1 << bit),
        _ => data,
    }
}
