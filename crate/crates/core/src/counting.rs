//! Counting maximal-complexity functions through onto maps.
//!
//! At the crossover depth `i` a maximal function must hit every nonzero
//! residual of arity `n - i`, so the count is the number of maps from
//! `[b^i]` to `[c^(b^(n-i))]` that are onto the first `c^(b^(n-i)) - 1`
//! values. Everything here is exact big-integer arithmetic.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::bounds::prefix_count_dominates;
use crate::error::{Error, Result};
use crate::BigCount;

/// Maps from a domain of size `domain` into `[codomain]` that hit each of the
/// first `codomain - 1` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OntoSpec {
    pub domain: u64,
    pub codomain: u64,
}

impl OntoSpec {
    pub fn new(domain: u64, codomain: u64) -> Result<Self> {
        if domain == 0 || codomain == 0 {
            return Err(Error::InvalidInput(
                "onto spec sizes must be at least 1".into(),
            ));
        }
        Ok(Self { domain, codomain })
    }
}

/// Guards that keep huge counts from stalling the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountLimits {
    /// Refuse results estimated to exceed this many decimal digits.
    pub max_digits: u64,
    /// Refuse recurrences needing more than this many table cells.
    pub max_work: u64,
}

impl Default for CountLimits {
    fn default() -> Self {
        Self {
            max_digits: 1_000_000,
            max_work: 50_000_000,
        }
    }
}

/// Stirling number of the second kind `{m brace n}`.
pub fn stirling2(m: u64, n: u64) -> BigCount {
    if n > m {
        return BigUint::zero();
    }
    stirling_column(m, n)
        .pop()
        .expect("column has m + 1 entries")
}

/// `S(t, k)` for `t = 0..=m` via `S(t, j) = j S(t-1, j) + S(t-1, j-1)`.
fn stirling_column(m: u64, k: u64) -> Vec<BigUint> {
    let width = k as usize + 1;
    let mut row = vec![BigUint::zero(); width];
    row[0] = BigUint::one();
    let mut column = Vec::with_capacity(m as usize + 1);
    column.push(row[k as usize].clone());
    for t in 1..=m {
        let top = (t as usize).min(k as usize);
        for j in (1..=top).rev() {
            let carried = std::mem::take(&mut row[j]) * BigUint::from(j as u64);
            row[j] = carried + &row[j - 1];
        }
        row[0] = BigUint::zero();
        column.push(row[k as usize].clone());
    }
    column
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Number of onto maps `[m] -> [n]`, i.e. `n! {m brace n}`.
pub fn onto_count(m: u64, n: u64) -> BigCount {
    factorial(n) * stirling2(m, n)
}

/// Number of maps `[a] -> [b]` onto the first `b - 1` elements:
/// `sum_{m=0}^{a-(b-1)} C(a, m) O(a-m, b-1)`.
pub fn onto_first_count(spec: OntoSpec) -> Result<BigCount> {
    onto_first_count_with(spec, CountLimits::default())
}

pub fn onto_first_count_with(spec: OntoSpec, limits: CountLimits) -> Result<BigCount> {
    let (a, k) = (spec.domain, spec.codomain - 1);
    if k > a {
        return Ok(BigUint::zero());
    }
    let work = a.saturating_mul(k + 1);
    let digits = (a as f64) * (spec.codomain as f64).log10();
    if work > limits.max_work || digits > limits.max_digits as f64 {
        return Err(Error::Capacity(format!(
            "counting maps [{a}] -> [{}] needs ~{work} cells and ~{digits:.0} digits",
            spec.codomain
        )));
    }
    let column = stirling_column(a, k);
    let k_fact = factorial(k);
    let mut binom = BigUint::one();
    let mut total = BigUint::zero();
    for m in 0..=a - k {
        total += &binom * &column[(a - m) as usize];
        binom = binom * BigUint::from(a - m) / BigUint::from(m + 1);
    }
    Ok(total * k_fact)
}

/// `O_i`: maps `[b^i] -> [c^(b^(n-i))]` onto all but the last value.
pub fn o_i(b: u32, c: u32, n: u32, i: u32) -> Result<BigCount> {
    o_i_with(b, c, n, i, CountLimits::default())
}

pub fn o_i_with(b: u32, c: u32, n: u32, i: u32, limits: CountLimits) -> Result<BigCount> {
    if i > n {
        return Err(Error::InvalidInput(format!("depth {i} exceeds n = {n}")));
    }
    if b == 0 || c == 0 {
        return Err(Error::InvalidInput("b and c must be positive".into()));
    }
    if !prefix_count_dominates(b, i, c, n - i) {
        return Ok(BigUint::zero());
    }
    // here c^(b^(n-i)) <= b^i + 1, so both sizes are at most b^i + 1
    let domain = (b as u64)
        .checked_pow(i)
        .ok_or_else(|| Error::Capacity(format!("domain {b}^{i} does not fit in 64 bits")))?;
    let codomain = crate::bounds::tower_minus_one(c, b, n - i)?
        .to_u64()
        .map(|v| v + 1)
        .ok_or_else(|| Error::Capacity("codomain does not fit in 64 bits".into()))?;
    onto_first_count_with(OntoSpec::new(domain, codomain)?, limits)
}

/// The least `i` with `O_i > 0` and the exact number of maximal-complexity
/// functions `[b]^n -> [c]`.
///
/// Onto-ness at depth `i` is not the whole story: the `b^(i-1)` residuals one
/// level up must also be pairwise distinct and nonzero. Reading the depth-`i`
/// values as rows of `b` entries, the count is
/// `sum_m (-1)^m C(B-1, m) ((B-m)^b - 1)_(b^(i-1))` with `B = c^(b^(n-i))`,
/// inclusion-exclusion over the nonzero values that are missed. When the
/// rows are forced apart this agrees with [`o_i`].
pub fn count_max(b: u32, c: u32, n: u32) -> Result<(u32, BigCount)> {
    count_max_with(b, c, n, CountLimits::default())
}

pub fn count_max_with(b: u32, c: u32, n: u32, limits: CountLimits) -> Result<(u32, BigCount)> {
    if c < 2 {
        return Err(Error::InvalidInput("count_max needs c >= 2".into()));
    }
    if b == 0 {
        return Err(Error::InvalidInput("b must be positive".into()));
    }
    let i = (0..=n)
        .find(|&i| prefix_count_dominates(b, i, c, n - i))
        .ok_or(Error::NoMax)?;
    if i == 0 || b == 1 {
        return Ok((i, o_i_with(b, c, n, i, limits)?));
    }
    let codomain = crate::bounds::tower_minus_one(c, b, n - i)?
        .to_u64()
        .map(|v| v + 1)
        .ok_or_else(|| Error::Capacity("codomain does not fit in 64 bits".into()))?;
    let rows = (b as u64)
        .checked_pow(i - 1)
        .ok_or_else(|| Error::Capacity(format!("{b}^{} rows", i - 1)))?;
    let digits = (rows as f64) * (b as f64) * (codomain as f64).log10();
    let work = codomain.saturating_mul(rows);
    if work > limits.max_work || digits > limits.max_digits as f64 {
        return Err(Error::Capacity(format!(
            "exact count over {rows} rows into [{codomain}] needs ~{work} products"
        )));
    }
    let required = codomain - 1;
    let mut positive = BigUint::zero();
    let mut negative = BigUint::zero();
    let mut binom = BigUint::one();
    for m in 0..=required {
        let tuples = BigUint::from(codomain - m).pow(b) - BigUint::one();
        let mut falling = BigUint::one();
        let mut ok = true;
        for t in 0..rows {
            let t = BigUint::from(t);
            if tuples <= t {
                ok = false;
                break;
            }
            falling *= &tuples - t;
        }
        if ok {
            let term = &binom * falling;
            if m % 2 == 0 {
                positive += term;
            } else {
                negative += term;
            }
        }
        binom = binom * BigUint::from(required - m) / BigUint::from(m + 1);
    }
    Ok((i, positive - negative))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{bounds::general_bound, state_complexity, ColoredFunction};
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Counts set partitions of `[m]` into `n` blocks via restricted growth strings.
    fn partitions_brute(m: usize, n: usize) -> u64 {
        fn go(pos: usize, m: usize, used: usize, n: usize) -> u64 {
            if pos == m {
                return (used == n) as u64;
            }
            (0..=used.min(n.saturating_sub(1)))
                .map(|blk| go(pos + 1, m, used.max(blk + 1), n))
                .sum()
        }
        if m == 0 {
            return (n == 0) as u64;
        }
        go(0, m, 0, n)
    }

    /// Inclusion–exclusion over the required values that are missed.
    fn onto_first_ie(a: u64, b: u64) -> BigUint {
        let k = b - 1;
        let mut total = BigInt::zero();
        let mut binom = BigInt::one();
        for j in 0..=k {
            let term = &binom * BigInt::from(b - j).pow(a as u32);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
            binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
        }
        total.to_biguint().unwrap()
    }

    #[test]
    fn stirling_examples() {
        assert_eq!(partitions_brute(4, 3), 6);
        assert_eq!(stirling2(4, 3), big(6));
        assert_eq!(stirling2(5, 5), big(1));
        assert_eq!(stirling2(0, 0), big(1));
        assert_eq!(stirling2(3, 0), big(0));
        for m in 0..=8 {
            for n in 0..=8 {
                assert_eq!(
                    stirling2(m, n),
                    big(partitions_brute(m as usize, n as usize)),
                    "S({m},{n})"
                );
            }
        }
    }

    #[test]
    fn onto_examples() {
        assert_eq!(onto_count(4, 3), big(36));
        assert_eq!(onto_count(3, 3), big(6));
        assert_eq!(onto_count(2, 3), big(0));
    }

    #[test]
    fn onto_first_examples() {
        assert_eq!(
            onto_first_count(OntoSpec::new(4, 4).unwrap()).unwrap(),
            big(60)
        );
        assert_eq!(
            onto_first_count(OntoSpec::new(1, 2).unwrap()).unwrap(),
            big(1)
        );
        for a in 1..6 {
            assert_eq!(
                onto_first_count(OntoSpec::new(a, 1).unwrap()).unwrap(),
                big(1)
            );
        }
        assert!(OntoSpec::new(0, 3).is_err());
    }

    #[test]
    fn onto_first_matches_inclusion_exclusion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let a = rng.gen_range(1..=8);
            let b = rng.gen_range(1..=6);
            assert_eq!(
                onto_first_count(OntoSpec::new(a, b).unwrap()).unwrap(),
                onto_first_ie(a, b),
                "a={a} b={b}"
            );
        }
    }

    #[test]
    fn o_i_examples() {
        assert_eq!(o_i(2, 2, 3, 1).unwrap(), big(0));
        assert_eq!(o_i(2, 2, 3, 2).unwrap(), big(60));
        assert_eq!(o_i(2, 2, 3, 0).unwrap(), big(0));
        assert!(o_i(2, 2, 3, 4).is_err());
    }

    #[test]
    fn capacity_guard() {
        let tight = CountLimits {
            max_digits: 10,
            max_work: 1_000,
        };
        assert!(matches!(
            o_i_with(2, 2, 10, 8, tight),
            Err(Error::Capacity(_))
        ));
        assert!(o_i(2, 2, 10, 8).is_ok());
        assert!(matches!(count_max(2, 2, 40), Err(Error::Capacity(_))));
    }

    fn brute_count(n: u32) -> (usize, u64) {
        let bound = general_bound(2, 2, n).to_u64().unwrap() as usize;
        let count = (0u64..1 << (1u32 << n))
            .filter(|&m| state_complexity(&ColoredFunction::from_mask(n, m).unwrap()) == bound)
            .count() as u64;
        (bound, count)
    }

    #[test]
    fn count_max_examples() {
        assert_eq!(count_max(2, 2, 3).unwrap(), (2, big(60)));
        for n in 0..=3 {
            let (_, count) = count_max(2, 2, n).unwrap();
            assert_eq!(count, big(brute_count(n).1), "n = {n}");
        }
        // the plain onto count also admits repeated depth-1 residuals
        assert_eq!(o_i(2, 2, 2, 2).unwrap(), big(15));
        assert_eq!(count_max(2, 2, 2).unwrap(), (2, big(6)));
        assert!(count_max(2, 1, 3).is_err());
        assert_eq!(count_max(1, 5, 2), Err(Error::NoMax));
    }

    fn brute_colored(b: u32, c: u32, n: u32) -> u64 {
        let bound = general_bound(b, c, n).to_u64().unwrap() as usize;
        let len = (b as usize).pow(n);
        let total = (c as u64).pow(len as u32);
        (0..total)
            .filter(|&code| {
                let mut v = code;
                let table: Vec<u32> = (0..len)
                    .map(|_| {
                        let d = (v % c as u64) as u32;
                        v /= c as u64;
                        d
                    })
                    .collect();
                state_complexity(&ColoredFunction::new(b, n, c, table).unwrap()) == bound
            })
            .count() as u64
    }

    #[test]
    fn count_max_matches_brute_force_beyond_binary() {
        for (b, c, n) in [
            (3, 2, 1),
            (3, 2, 2),
            (2, 3, 1),
            (2, 3, 2),
            (3, 3, 1),
            (2, 2, 4),
            (4, 2, 1),
            (2, 3, 3),
            (3, 3, 2),
        ] {
            let (_, count) = count_max(b, c, n).unwrap();
            assert_eq!(count, big(brute_colored(b, c, n)), "b={b} c={c} n={n}");
        }
    }

    #[test]
    fn o_i_vanishes_before_the_crossover() {
        for b in 2..=3 {
            for c in 2..=3 {
                for n in 0..=5 {
                    let Ok((i, count)) = count_max(b, c, n) else {
                        assert!((b as u64).pow(n) < c as u64 - 1);
                        continue;
                    };
                    assert!(count > big(0));
                    assert!(o_i(b, c, n, i).unwrap() >= count);
                    for j in 0..i {
                        assert_eq!(o_i(b, c, n, j).unwrap(), big(0));
                    }
                }
            }
        }
    }
}
