//! Words, colored functions, monotone functions and the structural predicates
//! shared by every other module.
//!
//! Words are ranked most-significant-digit first, so the residual of a function
//! at a prefix is a contiguous slice of its table.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest table a [`ColoredFunction`] may hold.
pub const MAX_TABLE_LEN: usize = 1 << 28;

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// A finite word over `[b]`, stored as its digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    digits: Vec<u32>,
}

impl Word {
    pub fn new(digits: Vec<u32>) -> Self {
        Self { digits }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&other.digits);
        Word { digits }
    }

    /// Base-`b` value of the word, first digit most significant.
    pub fn rank(&self, b: u32) -> Result<usize> {
        let mut r: usize = 0;
        for (pos, &d) in self.digits.iter().enumerate() {
            if d >= b {
                return Err(Error::InvalidInput(format!(
                    "digit {d} at position {pos} is not below alphabet size {b}"
                )));
            }
            r = r
                .checked_mul(b as usize)
                .and_then(|r| r.checked_add(d as usize))
                .ok_or_else(|| {
                    Error::Capacity(format!("rank of a length-{} word overflows", self.len()))
                })?;
        }
        Ok(r)
    }

    /// Inverse of [`Word::rank`] for words of length `len`.
    pub fn unrank(mut rank: usize, len: usize, b: u32) -> Word {
        let mut digits = vec![0; len];
        if b > 1 {
            for slot in digits.iter_mut().rev() {
                *slot = (rank % b as usize) as u32;
                rank /= b as usize;
            }
        }
        Word { digits }
    }

    /// Parses a word written with digits `0-9a-z`, checking each against `b`.
    pub fn parse(s: &str, b: u32) -> Result<Word> {
        let w: Word = s.parse()?;
        w.rank_checked_digits(b)?;
        Ok(w)
    }

    fn rank_checked_digits(&self, b: u32) -> Result<()> {
        match self.digits.iter().position(|&d| d >= b) {
            Some(pos) => Err(Error::InvalidInput(format!(
                "digit {} at position {pos} is not below alphabet size {b}",
                self.digits[pos]
            ))),
            None => Ok(()),
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let digits = s
            .chars()
            .map(|ch| {
                ch.to_digit(36)
                    .ok_or_else(|| Error::InvalidInput(format!("'{ch}' is not a word digit")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word { digits })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            let ch = DIGITS.get(d as usize).copied().unwrap_or(b'?');
            write!(f, "{}", ch as char)?;
        }
        Ok(())
    }
}

/// `b^e` as a table length, refusing anything above [`MAX_TABLE_LEN`].
pub fn table_len(b: u32, e: u32) -> Result<usize> {
    (b as usize)
        .checked_pow(e)
        .filter(|&len| len <= MAX_TABLE_LEN)
        .ok_or_else(|| Error::Capacity(format!("{b}^{e} table entries")))
}

/// A total map `[b]^n -> [c]`, stored as a dense table indexed by word rank.
///
/// With `c = 2` this is the language `{w : f(w) = 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredFunction {
    b: u32,
    n: u32,
    c: u32,
    table: Vec<u32>,
}

impl ColoredFunction {
    pub fn new(b: u32, n: u32, c: u32, table: Vec<u32>) -> Result<Self> {
        if b == 0 || c == 0 {
            return Err(Error::InvalidInput(
                "alphabet size and color count must be positive".into(),
            ));
        }
        let len = table_len(b, n)?;
        if table.len() != len {
            return Err(Error::InvalidInput(format!(
                "table has {} entries, expected {b}^{n} = {len}",
                table.len()
            )));
        }
        if let Some(pos) = table.iter().position(|&v| v >= c) {
            return Err(Error::InvalidInput(format!(
                "entry {} at rank {pos} is not a color below {c}",
                table[pos]
            )));
        }
        Ok(Self { b, n, c, table })
    }

    pub fn zero(b: u32, n: u32, c: u32) -> Result<Self> {
        let len = table_len(b.max(1), n)?;
        Self::new(b, n, c, vec![0; len])
    }

    pub fn constant(b: u32, n: u32, c: u32, color: u32) -> Result<Self> {
        let len = table_len(b.max(1), n)?;
        Self::new(b, n, c, vec![color; len])
    }

    /// Builds a function by evaluating `color` on every word of length `n`.
    pub fn from_fn(b: u32, n: u32, c: u32, mut color: impl FnMut(&Word) -> u32) -> Result<Self> {
        let len = table_len(b.max(1), n)?;
        let table = (0..len)
            .map(|r| color(&Word::unrank(r, n as usize, b)))
            .collect();
        Self::new(b, n, c, table)
    }

    /// The binary language containing exactly the given words.
    pub fn from_words<'a>(
        b: u32,
        n: u32,
        words: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self> {
        let mut f = Self::zero(b, n, 2)?;
        for s in words {
            let w = Word::parse(s, b)?;
            if w.len() != n as usize {
                return Err(Error::InvalidInput(format!(
                    "word {s} does not have length {n}"
                )));
            }
            let r = w.rank(b)?;
            f.table[r] = 1;
        }
        Ok(f)
    }

    /// Binary function on `n` bits from a bitmask over word ranks (`n <= 6`).
    pub fn from_mask(n: u32, mask: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::InvalidInput(format!(
                "a 64-bit mask holds at most 6 variables, got {n}"
            )));
        }
        let table = (0..1usize << n).map(|r| ((mask >> r) & 1) as u32).collect();
        Self::new(2, n, 2, table)
    }

    pub fn alphabet(&self) -> u32 {
        self.b
    }

    pub fn arity(&self) -> u32 {
        self.n
    }

    pub fn colors(&self) -> u32 {
        self.c
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn into_table(self) -> Vec<u32> {
        self.table
    }

    pub fn value_at(&self, rank: usize) -> u32 {
        self.table[rank]
    }

    pub fn eval(&self, w: &Word) -> Result<u32> {
        if w.len() != self.n as usize {
            return Err(Error::InvalidInput(format!(
                "word {w} has length {}, expected {}",
                w.len(),
                self.n
            )));
        }
        Ok(self.table[w.rank(self.b)?])
    }

    /// Words with a nonzero color, in rank order, paired with their color.
    pub fn support(&self) -> Vec<(Word, u32)> {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(r, &v)| (Word::unrank(r, self.n as usize, self.b), v))
            .collect()
    }

    /// Bitmask over word ranks for a binary function on at most 6 bits.
    pub fn to_mask(&self) -> Option<u64> {
        if self.b != 2 || self.c != 2 || self.n > 6 {
            return None;
        }
        Some(
            self.table
                .iter()
                .enumerate()
                .fold(0u64, |m, (r, &v)| m | ((v as u64) << r)),
        )
    }

    pub fn residual(&self, prefix: &Word) -> Result<ColoredFunction> {
        residual(self, prefix)
    }
}

/// The function `x -> f(prefix · x)` on the remaining `n - |prefix|` symbols.
pub fn residual(f: &ColoredFunction, prefix: &Word) -> Result<ColoredFunction> {
    let k = prefix.len();
    if k > f.n as usize {
        return Err(Error::InvalidInput(format!(
            "prefix of length {k} is longer than the arity {}",
            f.n
        )));
    }
    let rest = f.n - k as u32;
    let block = table_len(f.b, rest)?;
    let start = prefix.rank(f.b)? * block;
    Ok(ColoredFunction {
        b: f.b,
        n: rest,
        c: f.c,
        table: f.table[start..start + block].to_vec(),
    })
}

pub fn is_zero(f: &ColoredFunction) -> bool {
    f.table.iter().all(|&v| v == 0)
}

fn require_boolean(f: &ColoredFunction, what: &str) -> Result<()> {
    if f.b != 2 || f.c != 2 {
        return Err(Error::Unsupported(format!(
            "{what} is defined for b = 2, c = 2 (got b = {}, c = {})",
            f.b, f.c
        )));
    }
    Ok(())
}

/// True iff raising any single input bit never lowers the value.
pub fn is_monotone(f: &ColoredFunction) -> Result<bool> {
    require_boolean(f, "monotonicity")?;
    let t = &f.table;
    for x in 0..t.len() {
        if t[x] == 0 {
            continue;
        }
        for bit in 0..f.n {
            let y = x | (1 << bit);
            if t[y] == 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff moving an accepted 1 to an earlier free position keeps acceptance.
///
/// Position 0 is the leftmost input symbol, i.e. the most significant rank bit.
pub fn is_early(f: &ColoredFunction) -> Result<bool> {
    require_boolean(f, "earliness")?;
    let n = f.n as usize;
    let t = &f.table;
    for i in 0..n {
        for j in i + 1..n {
            let bi = 1usize << (n - 1 - i);
            let bj = 1usize << (n - 1 - j);
            for y in 0..t.len() {
                if y & (bi | bj) == 0 && t[y | bj] == 1 && t[y | bi] == 0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// An upward-closed subset of the Boolean cube `{0,1}^n`, as a bit vector over
/// word ranks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonotoneFunction {
    n: u32,
    bits: Vec<u64>,
}

impl MonotoneFunction {
    pub fn from_function(f: &ColoredFunction) -> Result<Self> {
        if !is_monotone(f)? {
            return Err(Error::InvalidInput("function is not monotone".into()));
        }
        let mut bits = vec![0u64; f.table.len().div_ceil(64)];
        for (r, &v) in f.table.iter().enumerate() {
            if v == 1 {
                bits[r / 64] |= 1 << (r % 64);
            }
        }
        Ok(Self { n: f.n, bits })
    }

    pub fn from_mask(n: u32, mask: u64) -> Result<Self> {
        Self::from_function(&ColoredFunction::from_mask(n, mask)?)
    }

    pub(crate) fn from_mask_unchecked(n: u32, mask: u64) -> Self {
        Self {
            n,
            bits: vec![mask],
        }
    }

    pub fn arity(&self) -> u32 {
        self.n
    }

    pub fn get(&self, rank: usize) -> bool {
        (self.bits[rank / 64] >> (rank % 64)) & 1 == 1
    }

    /// The table as a single mask, available for `n <= 6`.
    pub fn mask(&self) -> Option<u64> {
        (self.n <= 6).then(|| self.bits[0])
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Pointwise order: `self <= other` iff every accepted point of `self` is
    /// accepted by `other`.
    pub fn leq(&self, other: &Self) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn to_function(&self) -> ColoredFunction {
        let len = 1usize << self.n;
        ColoredFunction {
            b: 2,
            n: self.n,
            c: 2,
            table: (0..len).map(|r| self.get(r) as u32).collect(),
        }
    }
}

impl fmt::Display for MonotoneFunction {
    /// Truth table as `0`/`1` characters in rank order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..1usize << self.n {
            f.write_str(if self.get(r) { "1" } else { "0" })?;
        }
        Ok(())
    }
}
