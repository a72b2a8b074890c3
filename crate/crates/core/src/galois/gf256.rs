//! GF(2^8) arithmetic under the primitive polynomial x^8+x^4+x^3+x^2+1.
//!
//! Elements are bytes; addition is XOR and multiplication goes through
//! log/antilog tables built at compile time with generator `0x02`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign};

use super::GaloisError;

/// Reduction polynomial, including the x^8 term.
pub const PRIMITIVE_POLY: u16 = 0x11D;

/// Generator of the multiplicative group (order 255).
pub const GENERATOR: u8 = 0x02;

const fn build_tables() -> ([u8; 512], [u8; 256]) {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= PRIMITIVE_POLY;
        }
        i += 1;
    }
    // doubled so exp[log a + log b] never needs a modulo
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    (exp, log)
}

const TABLES: ([u8; 512], [u8; 256]) = build_tables();
pub(crate) static EXP: [u8; 512] = TABLES.0;
pub(crate) static LOG: [u8; 256] = TABLES.1;

/// An element of GF(256).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    /// `GENERATOR^e`, with `e` taken modulo 255.
    #[inline]
    pub fn alpha_pow(e: usize) -> Gf256 {
        Gf256(EXP[e % 255])
    }

    /// Discrete log base `GENERATOR`; `None` for zero.
    #[inline]
    pub fn log(self) -> Option<u8> {
        if self.0 == 0 {
            None
        } else {
            Some(LOG[self.0 as usize])
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; zero has none.
    #[inline]
    pub fn inv(self) -> Result<Gf256, GaloisError> {
        if self.0 == 0 {
            return Err(GaloisError::ZeroInverse);
        }
        Ok(Gf256(EXP[255 - LOG[self.0 as usize] as usize]))
    }

    #[inline]
    pub fn pow(self, e: u32) -> Gf256 {
        if e == 0 {
            return Gf256::ONE;
        }
        if self.0 == 0 {
            return Gf256::ZERO;
        }
        let l = (LOG[self.0 as usize] as u64 * e as u64) % 255;
        Gf256(EXP[l as usize])
    }
}

/// Product in GF(256).
#[inline]
pub fn gf_mul(a: Gf256, b: Gf256) -> Gf256 {
    a * b
}

/// Inverse in GF(256); errors on zero.
#[inline]
pub fn gf_inv(a: Gf256) -> Result<Gf256, GaloisError> {
    a.inv()
}

/// Horner evaluation of `coeffs` (ascending degree: `coeffs[i]` multiplies `x^i`) at `x`.
pub fn poly_eval(coeffs: &[Gf256], x: Gf256) -> Gf256 {
    coeffs.iter().rev().fold(Gf256::ZERO, |acc, &c| acc * x + c)
}

impl fmt::Debug for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf256({:#04x})", self.0)
    }
}

impl fmt::Display for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#04x}", self.0)
    }
}

impl From<u8> for Gf256 {
    fn from(v: u8) -> Self {
        Gf256(v)
    }
}

impl From<Gf256> for u8 {
    fn from(v: Gf256) -> Self {
        v.0
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Add for Gf256 {
    type Output = Gf256;
    #[inline]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl AddAssign for Gf256 {
    #[inline]
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    #[inline]
    fn mul(self, rhs: Gf256) -> Gf256 {
        if self.0 == 0 || rhs.0 == 0 {
            return Gf256::ZERO;
        }
        Gf256(EXP[LOG[self.0 as usize] as usize + LOG[rhs.0 as usize] as usize])
    }
}

impl MulAssign for Gf256 {
    #[inline]
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

impl Div for Gf256 {
    type Output = Gf256;
    /// Panics on division by zero, like integer division.
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Gf256) -> Gf256 {
        self * rhs.inv().expect("division by zero in GF(256)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // carry-less multiply with bitwise reduction, independent of the tables
    fn slow_mul(a: u8, b: u8) -> u8 {
        let mut acc: u16 = 0;
        for i in 0..8 {
            if b >> i & 1 == 1 {
                acc ^= (a as u16) << i;
            }
        }
        for bit in (8..16).rev() {
            if acc >> bit & 1 == 1 {
                acc ^= PRIMITIVE_POLY << (bit - 8);
            }
        }
        acc as u8
    }

    #[test]
    fn mul_matches_carryless_reference_exhaustively() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!((Gf256(a) * Gf256(b)).0, slow_mul(a, b), "{a} * {b}");
            }
        }
    }

    #[test]
    fn identity_and_small_products() {
        for a in 0..=255u8 {
            assert_eq!(gf_mul(Gf256(a), Gf256::ONE), Gf256(a));
            assert_eq!(gf_mul(Gf256(a), Gf256::ZERO), Gf256::ZERO);
        }
        assert_eq!(gf_mul(Gf256(0x02), Gf256(0x02)), Gf256(0x04));
        assert_eq!(gf_mul(Gf256(0x80), Gf256(0x02)), Gf256(0x1D));
    }

    #[test]
    fn inverse_exhaustive() {
        assert_eq!(gf_inv(Gf256::ZERO), Err(GaloisError::ZeroInverse));
        assert_eq!(gf_inv(Gf256::ONE).unwrap(), Gf256::ONE);
        for a in 1..=255u8 {
            let inv = gf_inv(Gf256(a)).unwrap();
            assert_eq!(Gf256(a) * inv, Gf256::ONE);
            assert_eq!(gf_inv(inv).unwrap(), Gf256(a));
        }
    }

    #[test]
    fn inverse_of_two_by_scan() {
        let scanned = (1..=255u8).find(|&c| slow_mul(2, c) == 1).unwrap();
        // x^7 + x^3 + x^2 + 1
        assert_eq!(scanned, 0x8E);
        assert_eq!(gf_inv(Gf256(0x02)).unwrap(), Gf256(scanned));
    }

    #[test]
    fn generator_has_order_255() {
        let mut x = Gf256::ONE;
        for i in 1..=255 {
            x *= Gf256(GENERATOR);
            if x == Gf256::ONE {
                assert_eq!(i, 255);
            }
        }
        assert_eq!(x, Gf256::ONE);
    }

    #[test]
    fn field_axioms_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let (a, b, c) = (Gf256(rng.random()), Gf256(rng.random()), Gf256(rng.random()));
            assert_eq!(a * b, b * a);
            assert_eq!((a * b) * c, a * (b * c));
            assert_eq!(a * (b + c), a * b + a * c);
        }
    }

    #[test]
    fn poly_eval_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let c = Gf256(rng.random());
            let x = Gf256(rng.random());
            assert_eq!(poly_eval(&[c], x), c);
            assert_eq!(poly_eval(&[Gf256::ONE, Gf256::ONE], x), x + Gf256::ONE);

            let coeffs: Vec<Gf256> = (0..5).map(|_| Gf256(rng.random())).collect();
            let mut naive = 0u8;
            for (i, co) in coeffs.iter().enumerate() {
                let mut term = co.0;
                for _ in 0..i {
                    term = slow_mul(term, x.0);
                }
                naive ^= term;
            }
            assert_eq!(poly_eval(&coeffs, x), Gf256(naive));
        }
    }

    #[test]
    fn pow_agrees_with_repeated_mul() {
        for a in 0..=255u8 {
            let mut acc = Gf256::ONE;
            for e in 0..20u32 {
                assert_eq!(Gf256(a).pow(e), acc);
                acc *= Gf256(a);
            }
        }
    }
}
