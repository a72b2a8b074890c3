//! Systematic Reed-Solomon codes over GF(256) with shortening and
//! errors-and-erasures decoding.
//!
//! Conventions (normative for wire compatibility):
//! - field polynomial 0x11D, generator α = 0x02;
//! - generator polynomial g(x) = (x - α^1)(x - α^2)…(x - α^(n-k)), i.e. first
//!   consecutive root 1;
//! - a block `c[0..L]` is the polynomial `Σ c[i] x^(L-1-i)`: data first,
//!   parity last, so a shortened block is a full block with leading zeros
//!   dropped.
//!
//! Decoding runs syndromes → Forney syndromes → Berlekamp-Massey → Chien
//! search → Forney's formula, then re-checks the corrected block.

use serde::{Deserialize, Serialize};

use crate::galois::{Gf256, EXP, LOG};

use super::BlockCodeError;

/// (n, k) with `k` data symbols and `n - k` parity symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize)", into = "(usize, usize)")]
pub struct RsParams {
    n: usize,
    k: usize,
}

impl RsParams {
    pub fn new(n: usize, k: usize) -> Result<Self, BlockCodeError> {
        if !(0 < k && k < n && n <= 255) {
            return Err(BlockCodeError::InvalidParams { n, k });
        }
        Ok(RsParams { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn parity(&self) -> usize {
        self.n - self.k
    }

    /// Unknown-position errors correctable without erasures.
    pub fn t(&self) -> usize {
        self.parity() / 2
    }

    /// Same parity count with `k_short` data symbols.
    pub fn shortened(&self, k_short: usize) -> Result<RsParams, BlockCodeError> {
        if k_short == 0 || k_short > self.k {
            return Err(BlockCodeError::ShortenedLength {
                len: k_short,
                k: self.k,
            });
        }
        RsParams::new(k_short + self.parity(), k_short)
    }
}

impl TryFrom<(usize, usize)> for RsParams {
    type Error = BlockCodeError;
    fn try_from((n, k): (usize, usize)) -> Result<Self, Self::Error> {
        RsParams::new(n, k)
    }
}

impl From<RsParams> for (usize, usize) {
    fn from(p: RsParams) -> Self {
        (p.n, p.k)
    }
}

impl std::fmt::Display for RsParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RS({},{})", self.n, self.k)
    }
}

/// A systematic codeword: data symbols followed by parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsCodeword {
    symbols: Vec<u8>,
    k: usize,
}

impl RsCodeword {
    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn data(&self) -> &[u8] {
        &self.symbols[..self.k]
    }

    pub fn parity(&self) -> &[u8] {
        &self.symbols[self.k..]
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.symbols
    }
}

/// Codec for one parity count; table-driven encoder and syndrome evaluator.
#[derive(Clone)]
pub struct ReedSolomon {
    params: RsParams,
    /// g(x) descending, without the leading 1.
    generator: Vec<u8>,
    /// `feedback[fb * parity + j] = fb * generator[j]`
    feedback: Vec<u8>,
    /// `syndrome_rows[j][x] = x * α^(j+1)`
    syndrome_rows: Vec<[u8; 256]>,
}

impl std::fmt::Debug for ReedSolomon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReedSolomon").field("params", &self.params).finish()
    }
}

impl ReedSolomon {
    pub fn new(params: RsParams) -> Self {
        let np = params.parity();
        // ascending coefficients while building
        let mut g = vec![Gf256::ONE];
        for j in 1..=np {
            let root = Gf256::alpha_pow(j);
            let mut next = vec![Gf256::ZERO; g.len() + 1];
            for (i, &c) in g.iter().enumerate() {
                next[i + 1] += c;
                next[i] += c * root;
            }
            g = next;
        }
        // descending, drop the monic x^np term
        let generator: Vec<u8> = g.iter().rev().skip(1).map(|c| c.0).collect();

        let mut feedback = vec![0u8; 256 * np];
        for fb in 1..256usize {
            for (j, &gj) in generator.iter().enumerate() {
                feedback[fb * np + j] = (Gf256(fb as u8) * Gf256(gj)).0;
            }
        }

        let syndrome_rows = (1..=np)
            .map(|j| {
                let a = Gf256::alpha_pow(j);
                let mut row = [0u8; 256];
                for (x, r) in row.iter_mut().enumerate() {
                    *r = (Gf256(x as u8) * a).0;
                }
                row
            })
            .collect();

        ReedSolomon {
            params,
            generator,
            feedback,
            syndrome_rows,
        }
    }

    pub fn params(&self) -> RsParams {
        self.params
    }

    /// Generator polynomial, descending degree, including the leading 1.
    pub fn generator(&self) -> Vec<u8> {
        std::iter::once(1).chain(self.generator.iter().copied()).collect()
    }

    /// Parity of `data` (any length); equals `data(x) x^(n-k) mod g(x)`.
    pub fn parity_of(&self, data: &[u8]) -> Vec<u8> {
        let mut reg = vec![0u8; self.params.parity()];
        self.parity_into(data, &mut reg);
        reg
    }

    fn parity_into(&self, data: &[u8], reg: &mut [u8]) {
        let np = reg.len();
        // the register after i input symbols is work[i..i + np]
        let mut work = vec![0u8; data.len() + np];
        for (i, &d) in data.iter().enumerate() {
            let fb = (d ^ work[i]) as usize;
            if fb != 0 {
                let row = &self.feedback[fb * np..(fb + 1) * np];
                for (r, &f) in work[i + 1..i + 1 + np].iter_mut().zip(row) {
                    *r ^= f;
                }
            }
        }
        reg.copy_from_slice(&work[data.len()..]);
    }

    /// Encodes exactly `k` data symbols.
    pub fn encode(&self, data: &[u8]) -> Result<RsCodeword, BlockCodeError> {
        if data.len() != self.params.k {
            return Err(BlockCodeError::DataLength {
                expected: self.params.k,
                got: data.len(),
            });
        }
        let mut symbols = data.to_vec();
        symbols.extend(self.parity_of(data));
        Ok(RsCodeword {
            symbols,
            k: self.params.k,
        })
    }

    /// Encodes `0 < len <= k` symbols as a shortened block of `len + (n - k)`.
    pub fn encode_shortened(&self, data: &[u8]) -> Result<Vec<u8>, BlockCodeError> {
        if data.is_empty() || data.len() > self.params.k {
            return Err(BlockCodeError::ShortenedLength {
                len: data.len(),
                k: self.params.k,
            });
        }
        let mut out = Vec::with_capacity(data.len() + self.params.parity());
        out.extend_from_slice(data);
        out.extend(self.parity_of(data));
        Ok(out)
    }

    /// Appends the shortened encoding of `data` to `out`.
    pub fn encode_into(&self, data: &[u8], out: &mut Vec<u8>) {
        assert!(!data.is_empty() && data.len() <= self.params.k);
        out.extend_from_slice(data);
        let start = out.len();
        out.resize(start + self.params.parity(), 0);
        self.parity_into(data, &mut out[start..]);
    }

    /// Decodes a full `n`-symbol block and returns its `k` data symbols.
    pub fn decode(&self, received: &[u8], erasures: &[usize]) -> Result<Vec<u8>, BlockCodeError> {
        if received.len() != self.params.n {
            return Err(BlockCodeError::BlockLength {
                expected: self.params.n,
                got: received.len(),
            });
        }
        let mut block = received.to_vec();
        self.correct(&mut block, erasures)?;
        block.truncate(self.params.k);
        Ok(block)
    }

    /// Decodes a shortened block of `len + (n - k)` symbols.
    pub fn decode_shortened(&self, received: &[u8], erasures: &[usize]) -> Result<Vec<u8>, BlockCodeError> {
        let np = self.params.parity();
        if received.len() <= np || received.len() > self.params.n {
            return Err(BlockCodeError::BlockLength {
                expected: self.params.n,
                got: received.len(),
            });
        }
        let mut block = received.to_vec();
        self.correct(&mut block, erasures)?;
        block.truncate(received.len() - np);
        Ok(block)
    }

    /// Corrects a (possibly shortened) block in place. Returns the number of
    /// symbols changed.
    ///
    /// Succeeds whenever `2·errors + erasures <= n - k`. Beyond that it
    /// returns [`BlockCodeError::Uncorrectable`] or, rarely, miscorrects to a
    /// different valid codeword; the block is left untouched on failure.
    pub fn correct(&self, block: &mut [u8], erasures: &[usize]) -> Result<usize, BlockCodeError> {
        let np = self.params.parity();
        let len = block.len();
        if len <= np || len > self.params.n {
            return Err(BlockCodeError::BlockLength {
                expected: self.params.n,
                got: len,
            });
        }
        for (i, &e) in erasures.iter().enumerate() {
            if e >= len {
                return Err(BlockCodeError::ErasureOutOfRange { position: e, len });
            }
            if erasures[..i].contains(&e) {
                return Err(BlockCodeError::DuplicateErasure(e));
            }
        }

        let syndromes = self.syndromes(block);
        if syndromes.iter().all(|s| s.is_zero()) {
            return Ok(0);
        }
        if erasures.len() > np {
            return Err(BlockCodeError::Uncorrectable);
        }

        // locator exponent of position i is len-1-i
        let locator = |pos: usize| Gf256::alpha_pow(len - 1 - pos);

        let mut gamma = vec![Gf256::ONE];
        for &e in erasures {
            gamma = poly_mul(&gamma, &[Gf256::ONE, locator(e)]);
        }
        let mut forney_syn = poly_mul(&syndromes, &gamma);
        forney_syn.truncate(np);

        let (sigma, nu_err) = berlekamp_massey(&forney_syn[erasures.len()..]);
        if 2 * nu_err > np - erasures.len() {
            return Err(BlockCodeError::Uncorrectable);
        }
        let mut lambda = poly_mul(&sigma, &gamma);
        trim(&mut lambda);
        let degree = lambda.len() - 1;
        if degree != nu_err + erasures.len() || degree == 0 {
            return Err(BlockCodeError::Uncorrectable);
        }
        let mut omega = poly_mul(&syndromes, &lambda);
        omega.truncate(np);

        // Chien search from the last position (X^-1 = 1) backwards; term i
        // is kept as log(lambda_i) - step * i
        let mut terms: Vec<(usize, usize)> = lambda
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (255 - i, LOG[c.0 as usize] as usize))
            .collect();
        let mut roots = Vec::with_capacity(degree);
        for step in 0..len {
            let mut sum = lambda[0].0;
            for (dec, lg) in terms.iter_mut() {
                sum ^= EXP[*lg];
                *lg += *dec;
                if *lg >= 255 {
                    *lg -= 255;
                }
            }
            if sum == 0 {
                roots.push((len - 1 - step, Gf256::alpha_pow((255 - step) % 255)));
            }
        }
        if roots.len() != degree {
            return Err(BlockCodeError::Uncorrectable);
        }

        let mut fixes = Vec::with_capacity(degree);
        for &(pos, x_inv) in &roots {
            let deriv = eval_derivative(&lambda, x_inv);
            if deriv.is_zero() {
                return Err(BlockCodeError::Uncorrectable);
            }
            let magnitude = eval_asc(&omega, x_inv) / deriv;
            debug_assert_eq!(locator(pos) * x_inv, Gf256::ONE);
            fixes.push((pos, magnitude.0));
        }

        for &(pos, m) in &fixes {
            block[pos] ^= m;
        }
        if self.syndromes(block).iter().any(|s| !s.is_zero()) {
            for &(pos, m) in &fixes {
                block[pos] ^= m;
            }
            return Err(BlockCodeError::Uncorrectable);
        }
        Ok(fixes.iter().filter(|(_, m)| *m != 0).count())
    }

    /// `S_j = r(α^j)` for j = 1..=n-k, computed from the remainder r mod g.
    pub fn syndromes(&self, block: &[u8]) -> Vec<Gf256> {
        let np = self.params.parity();
        let (data, parity) = block.split_at(block.len() - np);
        let mut rem = self.parity_of(data);
        for (r, &p) in rem.iter_mut().zip(parity) {
            *r ^= p;
        }
        if rem.iter().all(|&r| r == 0) {
            return vec![Gf256::ZERO; np];
        }
        // Horner per root, roots advanced in lockstep
        let mut acc = vec![0u8; np];
        for &c in &rem {
            for (s, row) in acc.iter_mut().zip(&self.syndrome_rows) {
                *s = row[*s as usize] ^ c;
            }
        }
        acc.into_iter().map(Gf256).collect()
    }
}

/// Shortest LFSR generating `seq`; returns (connection polynomial ascending, length).
fn berlekamp_massey(seq: &[Gf256]) -> (Vec<Gf256>, usize) {
    let mut c = vec![Gf256::ONE];
    let mut b = vec![Gf256::ONE];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut last = Gf256::ONE;
    for n in 0..seq.len() {
        let mut d = seq[n];
        for i in 1..=l.min(c.len() - 1) {
            d += c[i] * seq[n - i];
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = d / last;
        let prev = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, Gf256::ZERO);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + m] += coef * bi;
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = prev;
            last = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    trim(&mut c);
    (c, l)
}

fn poly_mul(a: &[Gf256], b: &[Gf256]) -> Vec<Gf256> {
    let mut out = vec![Gf256::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn trim(p: &mut Vec<Gf256>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

#[inline]
fn eval_asc(p: &[Gf256], x: Gf256) -> Gf256 {
    // Horner in the log domain, x is never zero here
    let lx = LOG[x.0 as usize] as usize;
    let mut acc = 0u8;
    for c in p.iter().rev() {
        acc = if acc == 0 {
            0
        } else {
            EXP[LOG[acc as usize] as usize + lx]
        };
        acc ^= c.0;
    }
    Gf256(acc)
}

/// Formal derivative at x: only odd-degree terms survive in characteristic 2.
fn eval_derivative(p: &[Gf256], x: Gf256) -> Gf256 {
    let x2 = x * x;
    let mut acc = Gf256::ZERO;
    let mut pow = Gf256::ONE;
    for i in (1..p.len()).step_by(2) {
        acc += p[i] * pow;
        pow *= x2;
    }
    acc
}

/// One-shot convenience: builds a codec and encodes `k` symbols.
pub fn rs_encode(data: &[u8], params: RsParams) -> Result<RsCodeword, BlockCodeError> {
    ReedSolomon::new(params).encode(data)
}

/// One-shot convenience: decodes an `n`-symbol block.
pub fn rs_decode(received: &[u8], erasures: &[usize], params: RsParams) -> Result<Vec<u8>, BlockCodeError> {
    ReedSolomon::new(params).decode(received, erasures)
}

/// One-shot convenience: shortened encoding of `0 < len <= k` symbols.
pub fn rs_shorten_encode(data: &[u8], params: RsParams) -> Result<Vec<u8>, BlockCodeError> {
    ReedSolomon::new(params).encode_shortened(data)
}
