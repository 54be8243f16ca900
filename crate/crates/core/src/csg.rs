//! The majorization lattice, early functions and complete simple games.
//!
//! A word `x` is below `y` in the majorization order when every prefix of `x`
//! has at most as many 1s as the same prefix of `y`. Complete simple games are
//! exactly the up-sets of this order; early functions are the functions whose
//! restriction to each weight level is such an up-set.

use crate::error::{Error, Result};
use crate::function::{is_early, is_monotone, ColoredFunction, MonotoneFunction, Word};
use crate::lattice::{
    check_with, compose_language, relation_shape, search_with, Checked, Order, SearchConfig,
    SearchOutcome,
};
use crate::poset::{LatticeMap, Poset};

/// Largest arity whose early functions are listed.
pub const MAX_EARLY_ARITY: u32 = 5;
/// Largest arity whose complete simple games are listed.
pub const MAX_CSG_ARITY: u32 = 6;

/// Nonzero complete simple game counts `|C_k| - 1`.
pub(crate) const CSG_NONZERO: [u64; 7] = [1, 2, 4, 9, 26, 118, 1172];

/// Prefix-sum domination of `x` by `y`.
pub fn majorization_leq(x: &Word, y: &Word) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "words of lengths {} and {} are not comparable",
            x.len(),
            y.len()
        )));
    }
    if x.digits().iter().chain(y.digits()).any(|&d| d > 1) {
        return Err(Error::InvalidInput(
            "majorization is defined on binary words".into(),
        ));
    }
    let (mut sx, mut sy) = (0, 0);
    for (a, b) in x.digits().iter().zip(y.digits()) {
        sx += a;
        sy += b;
        if sx > sy {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`majorization_leq`] on ranks of `n`-bit words.
pub fn majorization_leq_bits(n: u32, x: u64, y: u64) -> bool {
    let (mut sx, mut sy) = (0, 0);
    for k in (0..n).rev() {
        sx += x >> k & 1;
        sy += y >> k & 1;
        if sx > sy {
            return false;
        }
    }
    true
}

/// `E_n` on word ranks.
pub fn majorization_poset(n: u32) -> Result<Poset<u64>> {
    Order::Majorization.source_poset(n)
}

/// Up-sets of `poset` restricted to `elements`, as masks over element values.
fn up_sets(poset: &Poset<u64>, elements: &[usize]) -> Vec<u64> {
    let mut order = elements.to_vec();
    order.sort_by_key(|&x| std::cmp::Reverse((poset.down_size(x), *poset.element(x))));
    let above: Vec<u64> = order
        .iter()
        .map(|&x| {
            elements
                .iter()
                .filter(|&&y| y != x && poset.leq(x, y))
                .fold(0, |m, &y| m | 1 << poset.element(y))
        })
        .collect();
    let bits: Vec<u64> = order.iter().map(|&x| 1 << poset.element(x)).collect();
    let mut out = Vec::new();
    fn go(t: usize, set: u64, above: &[u64], bits: &[u64], out: &mut Vec<u64>) {
        if t == bits.len() {
            out.push(set);
            return;
        }
        go(t + 1, set, above, bits, out);
        if above[t] & !set == 0 {
            go(t + 1, set | bits[t], above, bits, out);
        }
    }
    go(0, 0, &above, &bits, &mut out);
    out.sort_unstable();
    out
}

fn weight_levels(n: u32) -> Vec<Vec<usize>> {
    let mut levels = vec![Vec::new(); n as usize + 1];
    for x in 0..1usize << n {
        levels[x.count_ones() as usize].push(x);
    }
    levels
}

/// All early functions of `n <= 5` variables as masks, ascending.
pub fn enumerate_early_masks(n: u32) -> Result<Vec<u64>> {
    if n > MAX_EARLY_ARITY {
        return Err(Error::Capacity(format!(
            "early functions are listed for n <= {MAX_EARLY_ARITY}"
        )));
    }
    let poset = majorization_poset(n)?;
    let mut all = vec![0u64];
    for level in weight_levels(n) {
        let sets = up_sets(&poset, &level);
        all = all
            .iter()
            .flat_map(|&m| sets.iter().map(move |&s| m | s))
            .collect();
    }
    all.sort_unstable();
    Ok(all)
}

/// Number of early functions, the product over weight levels of their up-set counts.
pub fn count_early(n: u32) -> Result<u64> {
    if n > MAX_CSG_ARITY {
        return Err(Error::Capacity(format!(
            "early functions are counted for n <= {MAX_CSG_ARITY}"
        )));
    }
    let poset = majorization_poset(n)?;
    weight_levels(n).iter().try_fold(1u64, |acc, level| {
        acc.checked_mul(up_sets(&poset, level).len() as u64)
            .ok_or_else(|| Error::Capacity("early count overflows 64 bits".into()))
    })
}

/// All complete simple games of `n <= 6` variables as masks, ascending.
pub fn enumerate_csg_masks(n: u32) -> Result<Vec<u64>> {
    if n > MAX_CSG_ARITY {
        return Err(Error::Capacity(format!(
            "complete simple games are listed for n <= {MAX_CSG_ARITY}"
        )));
    }
    let poset = majorization_poset(n)?;
    let all: Vec<usize> = (0..poset.len()).collect();
    Ok(up_sets(&poset, &all))
}

/// A monotone function that is also early.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompleteSimpleGame(MonotoneFunction);

impl CompleteSimpleGame {
    pub fn new(f: MonotoneFunction) -> Result<Self> {
        if !is_early(&f.to_function())? {
            return Err(Error::InvalidInput("function is not early".into()));
        }
        Ok(Self(f))
    }

    pub fn function(&self) -> &MonotoneFunction {
        &self.0
    }
}

pub fn enumerate_csg(n: u32) -> Result<Vec<CompleteSimpleGame>> {
    Ok(enumerate_csg_masks(n)?
        .into_iter()
        .map(|m| CompleteSimpleGame(MonotoneFunction::from_mask_unchecked(n, m)))
        .collect())
}

/// Verifies an order-preserving map `E_i -> C_j^-` whose substitutions reach
/// all of `C_(j-1)^-`.
pub fn check_csg_relation(i: u32, j: u32, map: &LatticeMap<u64, u64>) -> Result<Checked> {
    check_with(Order::Majorization, i, j, map)
}

/// Searches for `E_i -> C_j^- => C_(j-1)^-`. A map found here need not
/// compose into an early language; see [`search_early_relation`].
pub fn search_csg_relation(i: u32, j: u32, config: &SearchConfig) -> Result<SearchOutcome> {
    search_with(Order::Majorization, i, j, false, config)
}

/// Like [`search_csg_relation`], but every image must also contain the
/// one-step drops of the images just below it in each coordinate, which is
/// exactly what keeps the composed language early.
pub fn search_early_relation(i: u32, j: u32, config: &SearchConfig) -> Result<SearchOutcome> {
    search_with(Order::Majorization, i, j, true, config)
}

/// Largest `n` for which [`build_csg_witness`] is attempted.
pub const MAX_CSG_WITNESS_ARITY: u32 = 9;

/// An early-monotone language of `n` variables with `csg_bound(n)` states.
pub fn build_csg_witness(n: u32, config: &SearchConfig) -> Result<MonotoneFunction> {
    if n > MAX_CSG_WITNESS_ARITY {
        return Err(Error::Unsupported(format!(
            "complete simple game witnesses stop at n = {MAX_CSG_WITNESS_ARITY}"
        )));
    }
    if n == 0 {
        return MonotoneFunction::from_mask(0, 1);
    }
    let (i, j) = relation_shape(Order::Majorization, n)?;
    let certificate = match search_early_relation(i, j, config)? {
        SearchOutcome::Found { certificate, .. } => certificate,
        SearchOutcome::Exhausted { .. } => {
            return Err(Error::Capacity(format!("search budget for ({i}, {j})")))
        }
        SearchOutcome::Refuted { .. } => return Err(Error::NoWitness),
    };
    witness_from_certificate(&certificate.images(), i, j)
}

/// Composes a majorization relation and checks the result is early-monotone.
pub fn witness_from_certificate(images: &[u64], i: u32, j: u32) -> Result<MonotoneFunction> {
    let f: ColoredFunction = compose_language(i, j, images)?;
    if !is_monotone(&f)? || !is_early(&f)? {
        return Err(Error::InvalidInput(
            "composed language is not early-monotone".into(),
        ));
    }
    MonotoneFunction::from_function(&f)
}
