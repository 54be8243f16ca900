//! Explicit functions attaining the general bound.
//!
//! Below the crossover depth every prefix gets its own residual; from the
//! crossover on every nonzero function of the remaining arity appears. The
//! residuals at the last prefix-counting depth are built in groups of `b`
//! so that one more symbol reaches every nonzero function.

use std::collections::HashSet;

use num_traits::ToPrimitive;

use crate::bounds::{prefix_count_dominates, tower_minus_one};
use crate::error::{Error, Result};
use crate::function::{table_len, ColoredFunction};

/// Most nonzero functions [`nonzero_functions`] will materialize.
pub const MAX_FUNCTIONS: u64 = 1 << 22;

/// Depth where `min(b^i, c^(b^(n-i)) - 1)` first takes its second argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossoverPoint {
    /// Least depth `i` with `b^i >= c^(b^(n-i)) - 1`.
    pub i: u32,
    /// Remaining arity `n - i`.
    pub k: u32,
}

pub fn crossover(b: u32, c: u32, n: u32) -> Result<CrossoverPoint> {
    if b == 0 || c == 0 {
        return Err(Error::InvalidInput("b and c must be positive".into()));
    }
    if c == 1 {
        return Err(Error::NoWitness);
    }
    (0..=n)
        .find(|&i| prefix_count_dominates(b, i, c, n - i))
        .map(|i| CrossoverPoint { i, k: n - i })
        .ok_or_else(|| Error::NoCrossover {
            words: crate::bounds::big_pow(b, n).to_string(),
            colors: (c - 1).to_string(),
        })
}

/// Base-`c` digits of `value`, most significant first, padded to `len`.
fn table_of_rank(mut value: u64, len: usize, c: u32) -> Vec<u32> {
    let mut table = vec![0; len];
    for slot in table.iter_mut().rev() {
        *slot = (value % c as u64) as u32;
        value /= c as u64;
    }
    table
}

/// All nonzero functions `[b]^arity -> [c]`, ordered by their table read as a
/// base-`c` number.
pub fn nonzero_functions(b: u32, c: u32, arity: u32) -> Result<Vec<ColoredFunction>> {
    let count = tower_minus_one(c, b, arity)?
        .to_u64()
        .filter(|&s| s <= MAX_FUNCTIONS)
        .ok_or_else(|| Error::Capacity(format!("{c}^({b}^{arity}) - 1 functions")))?;
    let len = table_len(b, arity)?;
    (1..=count)
        .map(|v| ColoredFunction::new(b, arity, c, table_of_rank(v, len, c)))
        .collect()
}

/// A function `[b]^n -> [c]` whose minimal partial automaton has exactly
/// `general_bound(b, c, n)` states.
pub fn construct_maximal(b: u32, c: u32, n: u32) -> Result<ColoredFunction> {
    if b == 0 {
        return Err(Error::InvalidInput("b must be positive".into()));
    }
    if c == 1 {
        return Err(Error::NoWitness);
    }
    if b == 1 {
        return ColoredFunction::constant(1, n, c, c - 1);
    }
    table_len(b, n)?;
    // `last` is the deepest level still counting prefixes; residuals one
    // level further down must cover every nonzero function.
    let (last, grouped) = match crossover(b, c, n) {
        Ok(CrossoverPoint { i: 0, .. }) => return ColoredFunction::constant(b, n, c, 1),
        Ok(cp) => (cp.i - 1, true),
        Err(Error::NoCrossover { .. }) => (n, false),
        Err(e) => return Err(e),
    };
    let k = n - last;
    let slots = table_len(b, last)?;
    let mut residuals: Vec<Vec<u32>> = Vec::with_capacity(slots);
    if grouped {
        let leaves = nonzero_functions(b, c, k - 1)?;
        for chunk in leaves.chunks(b as usize) {
            let mut g: Vec<u32> = chunk
                .iter()
                .flat_map(|f| f.table().iter().copied())
                .collect();
            // unused slots of the last group repeat f_0
            for _ in chunk.len()..b as usize {
                g.extend_from_slice(leaves[0].table());
            }
            residuals.push(g);
        }
        if residuals.len() > slots {
            return Err(Error::InvalidInput(format!(
                "{} groups do not fit in {slots} prefixes",
                residuals.len()
            )));
        }
    }
    let used: HashSet<Vec<u32>> = residuals.iter().cloned().collect();
    let len = table_len(b, k)?;
    let available = tower_minus_one(c, b, k)?.to_u64().unwrap_or(u64::MAX);
    let mut rank = 1u64;
    while residuals.len() < slots {
        if rank > available {
            return Err(Error::InvalidInput(format!(
                "only {available} distinct nonzero functions of arity {k} for {slots} prefixes"
            )));
        }
        let t = table_of_rank(rank, len, c);
        if !used.contains(&t) {
            residuals.push(t);
        }
        rank += 1;
    }
    ColoredFunction::new(b, n, c, residuals.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::general_bound;
    use crate::minauto::{state_complexity, states_by_depth};
    use num_bigint::BigUint;

    #[test]
    fn crossover_examples() {
        assert_eq!(crossover(2, 2, 3).unwrap(), CrossoverPoint { i: 2, k: 1 });
        assert_eq!(crossover(2, 2, 4).unwrap(), CrossoverPoint { i: 3, k: 1 });
        assert_eq!(crossover(2, 3, 1).unwrap(), CrossoverPoint { i: 1, k: 0 });
        assert_eq!(crossover(2, 1, 3), Err(Error::NoWitness));
        assert!(matches!(crossover(2, 9, 2), Err(Error::NoCrossover { .. })));
    }

    #[test]
    fn crossover_by_scan() {
        for b in 2..=3u64 {
            for c in 2..=3u64 {
                for n in 0..=5u32 {
                    let scan = (0..=n).find(|&i| {
                        let tower = c
                            .checked_pow(b.pow(n - i) as u32)
                            .map_or(u64::MAX, |t| t - 1);
                        b.pow(i) >= tower
                    });
                    assert_eq!(crossover(b as u32, c as u32, n).ok().map(|cp| cp.i), scan);
                }
            }
        }
    }

    #[test]
    fn nonzero_function_lists() {
        let zero_ary = nonzero_functions(2, 2, 0).unwrap();
        assert_eq!(
            zero_ary,
            vec![ColoredFunction::constant(2, 0, 2, 1).unwrap()]
        );
        let unary = nonzero_functions(2, 2, 1).unwrap();
        let expect: Vec<ColoredFunction> = [&["1"][..], &["0"], &["0", "1"]]
            .iter()
            .map(|ws| ColoredFunction::from_words(2, 1, ws.iter().copied()).unwrap())
            .collect();
        assert_eq!(unary, expect);
        assert_eq!(nonzero_functions(2, 3, 1).unwrap().len(), 8);
        assert!(matches!(
            nonzero_functions(2, 2, 6),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn attains_general_bound() {
        for (b, c) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            for n in 0..=6u32 {
                if (b as usize).pow(n) > 1 << 12 {
                    continue;
                }
                let h = construct_maximal(b, c, n).unwrap();
                let bound = general_bound(b, c, n);
                assert_eq!(
                    BigUint::from(state_complexity(&h)),
                    bound,
                    "b={b} c={c} n={n}"
                );
                for (d, &count) in states_by_depth(&h).iter().enumerate() {
                    let term = (b as u64).pow(d as u32).min(
                        (c as u64)
                            .checked_pow((b as u64).pow(n - d as u32) as u32)
                            .map_or(u64::MAX, |t| t - 1),
                    );
                    assert_eq!(count as u64, term, "depth {d} of b={b} c={c} n={n}");
                }
            }
        }
    }

    #[test]
    fn witness_examples() {
        assert_eq!(state_complexity(&construct_maximal(2, 2, 3).unwrap()), 7);
        for (n, expect) in [(4, 11), (5, 19), (6, 34)] {
            assert_eq!(
                state_complexity(&construct_maximal(2, 2, n).unwrap()),
                expect
            );
        }
        assert_eq!(state_complexity(&construct_maximal(3, 2, 2).unwrap()), 5);
        assert_eq!(construct_maximal(2, 1, 3), Err(Error::NoWitness));
        let unary = construct_maximal(1, 4, 3).unwrap();
        assert_eq!(unary.table(), &[3]);
        assert_eq!(
            BigUint::from(state_complexity(&unary)),
            general_bound(1, 4, 3)
        );
    }

    #[test]
    fn many_colors_without_crossover() {
        let h = construct_maximal(2, 9, 2).unwrap();
        assert_eq!(BigUint::from(state_complexity(&h)), general_bound(2, 9, 2));
    }

    #[test]
    fn groups_cover_every_leaf() {
        let (b, c, n) = (2, 3, 4);
        let h = construct_maximal(b, c, n).unwrap();
        let cp = crossover(b, c, n).unwrap();
        let leaves = nonzero_functions(b, c, cp.k).unwrap();
        let block = (b as usize).pow(cp.k);
        let seen: HashSet<&[u32]> = h.table().chunks(block).collect();
        assert!(leaves.iter().all(|f| seen.contains(f.table())));
    }
}
