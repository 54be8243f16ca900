//! Exact evaluation of the state-complexity upper bounds.
//!
//! Every bound is a sum over depths `i = 0..=n` of `min(b^i, m_i)` where `m_i`
//! counts the nonzero residual functions available at depth `i`. The second
//! argument is often a tower such as `c^(b^(n-i)) - 1`, so comparisons exit
//! early once the tower is known to exceed `b^i`.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::function::ColoredFunction;
use crate::BigCount;

/// Exponent bits above which a tower value is never materialized.
const MAX_TOWER_EXPONENT: u64 = 1 << 24;

/// `|F_k| = M(k)`, the number of monotone Boolean functions of `k` variables
/// (Dedekind numbers, OEIS A000372), for `k = 0..=9`.
pub const DEDEKIND: [&str; 10] = [
    "2",
    "3",
    "6",
    "20",
    "168",
    "7581",
    "7828354",
    "2414682040998",
    "56130437228687557907788",
    "286386577668298411128469151667598498812366",
];

/// `|C_k|`, the number of complete simple games on `k` players including the
/// zero game (OEIS A132183), for `k = 0..=6`.
pub const CSG_COUNTS: [u64; 7] = [2, 3, 5, 10, 27, 119, 1173];

/// Which upper bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    GeneralPdfa,
    CompleteDfa,
    FamilyPdfa,
    MonotonePdfa,
    CsgPdfa,
}

/// `sizes[k]` is the number of nonzero functions in level `k` of a
/// residual-closed family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSizes(pub Vec<BigCount>);

impl LevelSizes {
    pub fn from_u64(sizes: &[u64]) -> Self {
        Self(sizes.iter().map(|&s| BigUint::from(s)).collect())
    }
}

pub(crate) fn big_pow(base: u32, exp: u32) -> BigUint {
    BigUint::from(base).pow(exp)
}

/// `b^e` as an exponent, `None` if it does not fit in 64 bits.
fn small_pow(b: u32, e: u32) -> Option<u64> {
    (b as u64).checked_pow(e)
}

/// `min(first, c^(b^e) - 1)` without building the tower when it is larger.
pub(crate) fn min_with_tower(first: &BigUint, c: u32, b: u32, e: u32) -> BigUint {
    if c <= 1 {
        return BigUint::zero();
    }
    match small_pow(b, e) {
        Some(x) if x <= first.bits() + 1 => {
            let tower = BigUint::from(c).pow(x as u32) - 1u32;
            tower.min(first.clone())
        }
        // c^x >= 2^x > first + 1
        _ => first.clone(),
    }
}

/// `c^(b^e) - 1` in full.
pub fn tower_minus_one(c: u32, b: u32, e: u32) -> Result<BigUint> {
    if c == 0 {
        return Err(Error::InvalidInput("c must be positive".into()));
    }
    if c == 1 {
        return Ok(BigUint::zero());
    }
    let x = small_pow(b, e)
        .filter(|&x| x.saturating_mul(32 - c.leading_zeros() as u64) <= MAX_TOWER_EXPONENT)
        .ok_or_else(|| Error::Capacity(format!("{c}^({b}^{e}) is too large to materialize")))?;
    Ok(BigUint::from(c).pow(x as u32) - 1u32)
}

/// True iff `b^i >= c^(b^e) - 1`.
pub(crate) fn prefix_count_dominates(b: u32, i: u32, c: u32, e: u32) -> bool {
    tower_leq(c, b, e, &big_pow(b, i))
}

fn tower_leq(c: u32, b: u32, e: u32, value: &BigUint) -> bool {
    match small_pow(b, e) {
        Some(x) if x <= value.bits() + 1 => BigUint::from(c).pow(x as u32) - 1u32 <= *value,
        _ => c <= 1,
    }
}

/// `sum_{i=0}^n min(b^i, c^(b^(n-i)) - 1)`.
pub fn general_bound(b: u32, c: u32, n: u32) -> BigCount {
    (0..=n)
        .map(|i| min_with_tower(&big_pow(b, i), c, b, n - i))
        .sum()
}

/// Tight bound for complete DFAs over `[k]` accepting subsets of `[k]^n`,
/// together with the split point `r = min{m : k^m >= 2^(k^(n-m)) - 1}`.
pub fn complete_dfa_bound(k: u32, n: u32) -> Result<(u32, BigCount)> {
    if k < 2 {
        return Err(Error::InvalidInput(
            "the complete-DFA bound needs k >= 2".into(),
        ));
    }
    let r = (0..=n)
        .find(|&m| prefix_count_dominates(k, m, 2, n - m))
        .expect("m = n always satisfies k^n >= 1");
    let geometric = (big_pow(k, r) - 1u32) / BigUint::from(k - 1);
    let mut tail = BigUint::zero();
    for j in 0..=n - r {
        tail += tower_minus_one(2, k, j)?;
    }
    Ok((r, geometric + tail + 1u32))
}

/// `sum_i min(b^i, sizes[i])`.
pub fn family_bound(b: u32, sizes: &LevelSizes) -> BigCount {
    sizes
        .0
        .iter()
        .enumerate()
        .map(|(i, s)| big_pow(b, i as u32).min(s.clone()))
        .sum()
}

/// Level sizes of the family generated from `seed` by fixing leading symbols.
pub fn cp_family(seed: &[ColoredFunction]) -> Result<LevelSizes> {
    let Some(first) = seed.first() else {
        return Err(Error::InvalidInput("seed family is empty".into()));
    };
    let (b, n, c) = (first.alphabet(), first.arity(), first.colors());
    if let Some(f) = seed
        .iter()
        .find(|f| (f.alphabet(), f.arity(), f.colors()) != (b, n, c))
    {
        return Err(Error::InvalidInput(format!(
            "mixed signatures: (b, n, c) = ({b}, {n}, {c}) and ({}, {}, {})",
            f.alphabet(),
            f.arity(),
            f.colors()
        )));
    }
    let mut level: Vec<Vec<u32>> = seed
        .iter()
        .filter(|f| !crate::is_zero(f))
        .map(|f| f.table().to_vec())
        .collect();
    level.sort_unstable();
    level.dedup();
    let mut sizes = vec![BigUint::from(level.len())];
    for _ in 0..n {
        let mut next: Vec<Vec<u32>> = level
            .iter()
            .flat_map(|t| t.chunks(t.len() / b as usize).map(<[u32]>::to_vec))
            .filter(|t| t.iter().any(|&v| v != 0))
            .collect();
        next.sort_unstable();
        next.dedup();
        sizes.push(BigUint::from(next.len()));
        level = next;
    }
    Ok(LevelSizes(sizes))
}

/// `sum_{i=0}^n min(2^i, counts(n - i))`, where `counts[k]` is known for the
/// listed `k` and is nondecreasing in `k`. Past the table the last entry is a
/// lower bound, which settles the min whenever it already exceeds `2^i`.
fn binary_bound_from_counts(
    n: u32,
    counts: &[BigUint],
    missing: impl Fn(u32) -> Error,
) -> Result<BigCount> {
    let last = counts.last().ok_or_else(|| missing(0))?;
    let mut total = BigUint::zero();
    for i in 0..=n {
        let k = n - i;
        let prefixes = big_pow(2, i);
        let term = match counts.get(k as usize) {
            Some(m) => prefixes.min(m.clone()),
            None if prefixes <= *last => prefixes,
            None => return Err(missing(k)),
        };
        total += term;
    }
    Ok(total)
}

fn dedekind_nonzero() -> Vec<BigUint> {
    DEDEKIND
        .iter()
        .map(|s| s.parse::<BigUint>().expect("valid literal") - 1u32)
        .collect()
}

/// `sum_{i=0}^n min(2^i, M(n-i) - 1)` using the built-in Dedekind numbers.
pub fn monotone_bound(n: u32) -> Result<BigCount> {
    monotone_bound_with(n, &dedekind_nonzero())
}

/// As [`monotone_bound`] with caller-supplied `|F_k^-|` for `k = 0, 1, ...`.
pub fn monotone_bound_with(n: u32, nonzero_counts: &[BigUint]) -> Result<BigCount> {
    binary_bound_from_counts(n, nonzero_counts, |k| Error::NeedDedekind { n, k })
}

/// `sum_{i=0}^n min(2^i, |C_{n-i}| - 1)` using the built-in game counts.
pub fn csg_bound(n: u32) -> Result<BigCount> {
    let counts: Vec<BigUint> = CSG_COUNTS.iter().map(|&c| BigUint::from(c)).collect();
    csg_bound_with(n, &counts)
}

/// As [`csg_bound`] with caller-supplied `|C_k|` (zero game included).
pub fn csg_bound_with(n: u32, counts: &[BigUint]) -> Result<BigCount> {
    let nonzero: Vec<BigUint> = counts
        .iter()
        .map(|c| if c.is_zero() { c.clone() } else { c - 1u32 })
        .collect();
    binary_bound_from_counts(n, &nonzero, |k| Error::NeedCsgCount { n, k })
}

/// Evaluates the bound of the given kind. `b` and `c` are ignored by the
/// binary kinds; [`BoundKind::FamilyPdfa`] needs explicit sizes and is
/// rejected here.
pub fn bound(kind: BoundKind, b: u32, c: u32, n: u32) -> Result<BigCount> {
    match kind {
        BoundKind::GeneralPdfa => Ok(general_bound(b, c, n)),
        BoundKind::CompleteDfa => complete_dfa_bound(b, n).map(|(_, v)| v),
        BoundKind::MonotonePdfa => monotone_bound(n),
        BoundKind::CsgPdfa => csg_bound(n),
        BoundKind::FamilyPdfa => Err(Error::InvalidInput(
            "the family bound needs explicit level sizes".into(),
        )),
    }
}
