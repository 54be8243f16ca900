//! Monotone Boolean function lattices and adequacy relations.
//!
//! Functions of `j <= 6` variables are stored as 64-bit masks over word ranks,
//! with the first variable as the most significant rank bit. Substituting a
//! constant for the first variable keeps the low (`0`) or high (`1`) half of
//! the mask, which is exactly a one-symbol residual.
//!
//! A relation `2^i -> |F_j^-| => |F_(j-1)^-|` is an injective isotone map
//! from the cube into the nonzero `j`-ary functions whose one-variable
//! substitutions reach every nonzero `(j-1)`-ary function. Composing such a
//! map with its images gives an `(i + j)`-ary language whose residuals count
//! prefixes through depth `i` and then every nonzero function below.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use crate::csg;
use crate::error::{Error, Result};
use crate::function::{ColoredFunction, MonotoneFunction};
use crate::poset::{LatticeMap, Poset};

/// Largest arity [`enumerate_monotone`] will list.
pub const MAX_ENUM_ARITY: u32 = 6;
/// Largest target arity for relation checks and searches.
pub const MAX_RELATION_ARITY: u32 = 5;
/// Largest cube dimension accepted as a relation source.
pub const MAX_SOURCE_DIM: u32 = 10;
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Nonzero monotone function counts `|F_k^-|`.
const MONOTONE_NONZERO: [u64; 7] = [1, 2, 5, 19, 167, 7580, 7_828_353];

/// All monotone functions of `n` variables as masks, in ascending order.
///
/// Built by pairing: `f` is monotone iff `f|p1=0 <= f|p1=1`, both monotone.
pub fn enumerate_monotone_masks(n: u32) -> Result<Vec<u64>> {
    if n > MAX_ENUM_ARITY {
        return Err(Error::Capacity(format!(
            "monotone enumeration is limited to n <= {MAX_ENUM_ARITY}"
        )));
    }
    let mut level = vec![0u64, 1];
    for k in 1..=n {
        let shift = 1u32 << (k - 1);
        let mut next = Vec::new();
        for &h in &level {
            for &g in &level {
                if g & !h == 0 {
                    next.push(g | (h << shift));
                }
            }
        }
        next.sort_unstable();
        level = next;
    }
    Ok(level)
}

pub fn enumerate_monotone(n: u32) -> Result<Vec<MonotoneFunction>> {
    Ok(enumerate_monotone_masks(n)?
        .into_iter()
        .map(|m| MonotoneFunction::from_mask_unchecked(n, m))
        .collect())
}

fn half_mask(j: u32) -> u64 {
    (1u64 << (1u32 << (j - 1))) - 1
}

/// `g` with the first of its `j` variables fixed to `eps`.
pub fn substitute(mask: u64, j: u32, eps: u8) -> u64 {
    let half = 1u32 << (j - 1);
    if eps == 0 {
        mask & half_mask(j)
    } else {
        (mask >> half) & half_mask(j)
    }
}

/// Points one step below `g` in the "move a 1 earlier" sense: `t` with some
/// zero position `k` such that `t + e_k` is in `g`.
pub(crate) fn drop_one(mask: u64, j: u32) -> u64 {
    let mut out = 0;
    for k in 0..j {
        let bit = 1usize << (j - 1 - k);
        for r in 0..1usize << j {
            if r & bit != 0 && (mask >> r) & 1 == 1 {
                out |= 1 << (r ^ bit);
            }
        }
    }
    out
}

/// Which cube order the source carries and which family the images live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    /// Product order into nonzero monotone functions.
    Product,
    /// Majorization order into nonzero complete simple games.
    Majorization,
}

impl Order {
    pub fn name(self) -> &'static str {
        match self {
            Order::Product => "product",
            Order::Majorization => "majorization",
        }
    }

    /// All family members of arity `j`, zero included, ascending.
    pub fn family_masks(self, j: u32) -> Result<Vec<u64>> {
        match self {
            Order::Product => enumerate_monotone_masks(j),
            Order::Majorization => csg::enumerate_csg_masks(j),
        }
    }

    /// `|family_j| - 1` for `j <= 6`.
    pub fn nonzero_count(self, j: u32) -> Option<u64> {
        match self {
            Order::Product => MONOTONE_NONZERO.get(j as usize).copied(),
            Order::Majorization => csg::CSG_NONZERO.get(j as usize).copied(),
        }
    }

    pub fn source_poset(self, i: u32) -> Result<Poset<u64>> {
        if i > MAX_SOURCE_DIM {
            return Err(Error::Capacity(format!(
                "source cubes are limited to dimension {MAX_SOURCE_DIM}"
            )));
        }
        let elems = (0..1u64 << i).collect();
        match self {
            Order::Product => Poset::from_relation(elems, |a, b| a & !b == 0),
            Order::Majorization => {
                Poset::from_relation(elems, |a, b| csg::majorization_leq_bits(i, *a, *b))
            }
        }
    }

    /// Nonzero family members of arity `j` under pointwise order.
    pub fn target_poset(self, j: u32) -> Result<Poset<u64>> {
        if j == 0 || j > MAX_RELATION_ARITY {
            return Err(Error::InvalidInput(format!(
                "target arity must be in 1..={MAX_RELATION_ARITY}"
            )));
        }
        let elems: Vec<u64> = self
            .family_masks(j)?
            .into_iter()
            .filter(|&m| m != 0)
            .collect();
        Poset::from_relation(elems, |a, b| a & !b == 0)
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(Order::Product),
            "majorization" => Ok(Order::Majorization),
            _ => Err(Error::InvalidInput(format!("unknown order {s:?}"))),
        }
    }
}

/// The cube `2^i` under the product order.
pub fn cube(i: u32) -> Result<Poset<u64>> {
    Order::Product.source_poset(i)
}

/// `F_j^-` under pointwise order.
pub fn nonzero_monotone(j: u32) -> Result<Poset<u64>> {
    Order::Product.target_poset(j)
}

/// Whether substituting for the first variable reaches every nonzero
/// function of one fewer variable. With `strong`, a single value must do.
pub fn is_adequate(set: &[MonotoneFunction], strong: bool) -> Result<bool> {
    let Some(first) = set.first() else {
        return Ok(false);
    };
    let j = first.arity();
    if j == 0 || j > MAX_ENUM_ARITY || set.iter().any(|g| g.arity() != j) {
        return Err(Error::InvalidInput(
            "adequacy needs functions of one common arity in 1..=6".into(),
        ));
    }
    let need: HashSet<u64> = enumerate_monotone_masks(j - 1)?
        .into_iter()
        .filter(|&m| m != 0)
        .collect();
    let masks: Vec<u64> = set.iter().map(|g| g.mask().expect("arity <= 6")).collect();
    let reached = |eps: &[u8]| -> bool {
        let got: HashSet<u64> = masks
            .iter()
            .flat_map(|&m| eps.iter().map(move |&e| substitute(m, j, e)))
            .collect();
        need.is_subset(&got)
    };
    Ok(if strong {
        reached(&[0]) || reached(&[1])
    } else {
        reached(&[0, 1])
    })
}

/// Why a map is not an adequacy relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationFailure {
    NotInjective { first: u64, second: u64 },
    NotIsotone { lower: u64, upper: u64 },
    OutsideFamily { source: u64, eps: u8 },
    Uncovered(Vec<u64>),
}

impl fmt::Display for RelationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationFailure::NotInjective { first, second } => {
                write!(f, "sources {first} and {second} share an image")
            }
            RelationFailure::NotIsotone { lower, upper } => {
                write!(
                    f,
                    "source {lower} <= {upper} but the images are not ordered"
                )
            }
            RelationFailure::OutsideFamily { source, eps } => {
                write!(
                    f,
                    "substituting {eps} in the image of {source} leaves the family"
                )
            }
            RelationFailure::Uncovered(missing) => {
                write!(f, "{} lower functions are never reached", missing.len())
            }
        }
    }
}

/// A verified relation together with everything needed to re-check it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdequacyCertificate {
    pub order: Order,
    pub i: u32,
    pub j: u32,
    pub map: LatticeMap<u64, u64>,
    /// `[g|p1=0, g|p1=1]` for each source element's image.
    pub substitutions: Vec<[u64; 2]>,
    /// Nonzero lower functions reached, ascending. Always the whole family.
    pub covered: Vec<u64>,
    /// Some substitution is the zero function.
    pub uses_zero: bool,
    /// A value of the first variable whose substitutions alone cover.
    pub strong: Option<u8>,
    /// `L(image(s)) <= image(s + e_k)` for every zero position `k` of `s`,
    /// which makes the composed language early. Trivially true for the
    /// product order.
    pub composable: bool,
}

impl AdequacyCertificate {
    /// Image mask of each source element, by rank.
    pub fn images(&self) -> Vec<u64> {
        (0..self.map.source.len())
            .map(|x| *self.map.image_of(x))
            .collect()
    }

    /// The `(i + j)`-ary language `f(s, t) = image(s)(t)`.
    pub fn compose(&self) -> Result<ColoredFunction> {
        compose_language(self.i, self.j, &self.images())
    }
}

pub type Checked = std::result::Result<AdequacyCertificate, RelationFailure>;

/// Builds a map between the standard source and target posets from image masks.
pub fn map_from_masks(
    order: Order,
    i: u32,
    j: u32,
    images: &[u64],
) -> Result<LatticeMap<u64, u64>> {
    let source = order.source_poset(i)?;
    let target = order.target_poset(j)?;
    let index: HashMap<u64, usize> = target
        .elements()
        .iter()
        .enumerate()
        .map(|(k, &m)| (m, k))
        .collect();
    let image = images
        .iter()
        .map(|m| {
            index.get(m).copied().ok_or_else(|| {
                Error::InvalidInput(format!(
                    "mask {m:#x} is not a nonzero {}-ary family member",
                    j
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LatticeMap::new(source, target, image)
}

pub(crate) fn check_with(
    order: Order,
    i: u32,
    j: u32,
    map: &LatticeMap<u64, u64>,
) -> Result<Checked> {
    if map.source != order.source_poset(i)? {
        return Err(Error::InvalidInput(format!(
            "source is not the {} cube of dimension {i}",
            order.name()
        )));
    }
    if map.target != order.target_poset(j)? {
        return Err(Error::InvalidInput(format!(
            "target is not the nonzero {}-ary family",
            j
        )));
    }
    if let Some((a, b)) = map.injectivity_violation() {
        return Ok(Err(RelationFailure::NotInjective {
            first: a as u64,
            second: b as u64,
        }));
    }
    if let Some((a, b)) = map.isotone_violation() {
        return Ok(Err(RelationFailure::NotIsotone {
            lower: a as u64,
            upper: b as u64,
        }));
    }
    let lower: HashSet<u64> = order.family_masks(j - 1)?.into_iter().collect();
    let mut substitutions = Vec::with_capacity(map.source.len());
    for x in 0..map.source.len() {
        let g = *map.image_of(x);
        let pair = [substitute(g, j, 0), substitute(g, j, 1)];
        for eps in 0..2u8 {
            if !lower.contains(&pair[eps as usize]) {
                return Ok(Err(RelationFailure::OutsideFamily {
                    source: x as u64,
                    eps,
                }));
            }
        }
        substitutions.push(pair);
    }
    let reached = |eps: &[usize]| -> HashSet<u64> {
        substitutions
            .iter()
            .flat_map(|p| eps.iter().map(move |&e| p[e]))
            .filter(|&m| m != 0)
            .collect()
    };
    let covered = reached(&[0, 1]);
    let mut missing: Vec<u64> = lower
        .iter()
        .copied()
        .filter(|&m| m != 0 && !covered.contains(&m))
        .collect();
    if !missing.is_empty() {
        missing.sort_unstable();
        return Ok(Err(RelationFailure::Uncovered(missing)));
    }
    let need = lower.len() - 1;
    let strong = (0..2u8).find(|&e| reached(&[e as usize]).len() == need);
    let uses_zero = substitutions.iter().any(|p| p.contains(&0));
    let composable = match order {
        Order::Product => true,
        Order::Majorization => (0..map.source.len()).all(|x| {
            let shifted = drop_one(*map.image_of(x), j);
            (0..i)
                .filter(|&k| x >> k & 1 == 0)
                .all(|k| shifted & !*map.image_of(x | 1 << k) == 0)
        }),
    };
    let mut covered: Vec<u64> = covered.into_iter().collect();
    covered.sort_unstable();
    Ok(Ok(AdequacyCertificate {
        order,
        i,
        j,
        map: map.clone(),
        substitutions,
        covered,
        uses_zero,
        strong,
        composable,
    }))
}

/// Verifies `2^i -> |F_j^-| => |F_(j-1)^-|` for `map`.
pub fn check_relation(i: u32, j: u32, map: &LatticeMap<u64, u64>) -> Result<Checked> {
    check_with(Order::Product, i, j, map)
}

/// `f(s, t) = images[s](t)` on `i + j` variables.
pub fn compose_language(i: u32, j: u32, images: &[u64]) -> Result<ColoredFunction> {
    if images.len() != 1usize << i || j > MAX_ENUM_ARITY {
        return Err(Error::InvalidInput(
            "need 2^i images of arity at most 6".into(),
        ));
    }
    let table = images
        .iter()
        .flat_map(|&g| (0..1usize << j).map(move |t| (g >> t & 1) as u32))
        .collect();
    ColoredFunction::new(2, i + j, 2, table)
}

/// Outcome of a budgeted relation search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found {
        certificate: Box<AdequacyCertificate>,
        nodes: u64,
    },
    /// The budget ran out; `checkpoint` resumes exactly where the search stopped.
    Exhausted { checkpoint: Vec<usize>, nodes: u64 },
    /// The whole space (from the resume point on) holds no relation.
    Refuted { nodes: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Candidate assignments tried before giving up.
    pub budget: u64,
    /// Choice indices from a previous [`SearchOutcome::Exhausted`].
    pub resume: Vec<usize>,
    /// Worker threads splitting the first choice. The result is the map in
    /// the lowest branch that holds one, whatever the thread count.
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            resume: Vec::new(),
            threads: 1,
        }
    }
}

enum Step {
    Found,
    Exhausted,
    Done,
    Cancelled,
}

struct Engine {
    order: Order,
    i: u32,
    j: u32,
    source: Poset<u64>,
    target: Poset<u64>,
    seq: Vec<usize>,
    lower: Vec<Vec<usize>>,
    junction: Vec<Vec<usize>>,
    src_up: Vec<usize>,
    src_down: Vec<usize>,
    tgt_up_rows: Vec<Vec<u64>>,
    tgt_down: Vec<usize>,
    compatible: Vec<Vec<u64>>,
    hits: Vec<Vec<usize>>,
    lower_family: Vec<u64>,
    words: usize,
}

struct State<'a> {
    image: Vec<usize>,
    used: Vec<u64>,
    cover_count: Vec<u32>,
    uncovered: usize,
    /// Scratch: least mask each unassigned element can still take.
    floor: Vec<u64>,
    nodes: &'a AtomicU64,
    budget: u64,
    /// Lowest top-level branch known to hold a map; others above it stop.
    best: &'a AtomicUsize,
    branch: usize,
}

const UNSET: usize = usize::MAX;

impl Engine {
    fn new(order: Order, i: u32, j: u32, junction: bool) -> Result<Self> {
        let early = junction && order == Order::Majorization;
        let source = order.source_poset(i)?;
        let target = order.target_poset(j)?;
        let seq = source.linear_extension();
        let lower: Vec<Vec<usize>> = {
            let mut lower = vec![Vec::new(); source.len()];
            for (x, y) in source.covers() {
                lower[y].push(x);
            }
            lower
        };
        let junction: Vec<Vec<usize>> = (0..source.len())
            .map(|x| match early {
                false => Vec::new(),
                true => (0..i)
                    .filter(|&k| x >> k & 1 == 1)
                    .map(|k| x & !(1 << k))
                    .collect(),
            })
            .collect();
        let words = target.len().div_ceil(64);
        let tgt_up_rows: Vec<Vec<u64>> = (0..target.len())
            .map(|c| target.up_row(c).to_vec())
            .collect();
        let compatible = match early {
            false => Vec::new(),
            true => (0..target.len())
                .map(|g| {
                    let need = drop_one(*target.element(g), j);
                    let mut row = vec![0u64; words];
                    for (h, &m) in target.elements().iter().enumerate() {
                        if need & !m == 0 {
                            row[h / 64] |= 1 << (h % 64);
                        }
                    }
                    row
                })
                .collect(),
        };
        let lower_family: Vec<u64> = order
            .family_masks(j - 1)?
            .into_iter()
            .filter(|&m| m != 0)
            .collect();
        let cover_index: HashMap<u64, usize> = lower_family
            .iter()
            .enumerate()
            .map(|(k, &m)| (m, k))
            .collect();
        let hits = target
            .elements()
            .iter()
            .map(|&g| {
                let mut h: Vec<usize> = (0..2)
                    .filter_map(|e| cover_index.get(&substitute(g, j, e)).copied())
                    .collect();
                h.dedup();
                h
            })
            .collect();
        Ok(Self {
            order,
            i,
            j,
            src_up: (0..source.len()).map(|x| source.up_size(x)).collect(),
            src_down: (0..source.len()).map(|x| source.down_size(x)).collect(),
            tgt_down: (0..target.len()).map(|c| target.down_size(c)).collect(),
            source,
            target,
            seq,
            lower,
            junction,
            tgt_up_rows,
            compatible,
            hits,
            lower_family,
            words,
        })
    }

    fn state<'a>(
        &self,
        nodes: &'a AtomicU64,
        budget: u64,
        best: &'a AtomicUsize,
        branch: usize,
    ) -> State<'a> {
        State {
            image: vec![UNSET; self.source.len()],
            used: vec![0; self.words],
            cover_count: vec![0; self.lower_family.len()],
            uncovered: self.lower_family.len(),
            floor: vec![0; self.source.len()],
            nodes,
            budget,
            best,
            branch,
        }
    }

    /// Admissible images for `x`, best first.
    fn candidates(&self, x: usize, st: &State) -> Vec<usize> {
        let mut dom: Vec<u64> = st.used.iter().map(|u| !u).collect();
        for &y in &self.lower[x] {
            for (d, r) in dom.iter_mut().zip(&self.tgt_up_rows[st.image[y]]) {
                *d &= r;
            }
        }
        for &y in &self.junction[x] {
            for (d, r) in dom.iter_mut().zip(&self.compatible[st.image[y]]) {
                *d &= r;
            }
        }
        let above = self.src_up[x] - 1;
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (w, &bits) in dom.iter().enumerate() {
            let mut bits = bits;
            while bits != 0 {
                let c = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if c >= self.target.len() || self.tgt_down[c] < self.src_down[x] {
                    continue;
                }
                let free_above: usize = self.tgt_up_rows[c]
                    .iter()
                    .zip(&st.used)
                    .map(|(r, u)| (r & !u).count_ones() as usize)
                    .sum::<usize>()
                    - 1;
                if free_above < above {
                    continue;
                }
                let fresh = self.hits[c]
                    .iter()
                    .filter(|&&h| st.cover_count[h] == 0)
                    .count();
                out.push((fresh, c));
            }
        }
        out.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        out.into_iter().map(|(_, c)| c).collect()
    }

    fn assign(&self, x: usize, c: usize, st: &mut State) {
        st.image[x] = c;
        st.used[c / 64] |= 1 << (c % 64);
        for &h in &self.hits[c] {
            if st.cover_count[h] == 0 {
                st.uncovered -= 1;
            }
            st.cover_count[h] += 1;
        }
    }

    fn unassign(&self, x: usize, c: usize, st: &mut State) {
        st.image[x] = UNSET;
        st.used[c / 64] &= !(1 << (c % 64));
        for &h in &self.hits[c] {
            st.cover_count[h] -= 1;
            if st.cover_count[h] == 0 {
                st.uncovered += 1;
            }
        }
    }

    /// Whether every uncovered lower function is still reachable: some
    /// unassigned element must be able to take an image whose first
    /// substitution lies below it.
    fn coverable(&self, t: usize, st: &mut State) -> bool {
        let rest = &self.seq[t + 1..];
        if st.uncovered > 2 * rest.len() {
            return false;
        }
        if st.uncovered == 0 {
            return true;
        }
        let mut lows: Vec<u64> = Vec::with_capacity(rest.len());
        for &x in rest {
            let mask_of = |y: usize| match st.image[y] {
                UNSET => st.floor[y],
                c => *self.target.element(c),
            };
            let mut m = self.lower[x].iter().fold(0, |m, &y| m | mask_of(y));
            for &y in &self.junction[x] {
                m |= drop_one(mask_of(y), self.j);
            }
            st.floor[x] = m;
            let low = substitute(m, self.j, 0);
            if !lows.contains(&low) {
                lows.push(low);
            }
        }
        self.lower_family
            .iter()
            .zip(&st.cover_count)
            .all(|(&h, &n)| n > 0 || lows.iter().any(|&l| l & !h == 0))
    }

    fn dfs(
        &self,
        t: usize,
        st: &mut State,
        resume: Option<&[usize]>,
        path: &mut Vec<usize>,
    ) -> Step {
        if t == self.seq.len() {
            return if st.uncovered == 0 {
                Step::Found
            } else {
                Step::Done
            };
        }
        let x = self.seq[t];
        let start = resume.and_then(|r| r.first().copied()).unwrap_or(0);
        let cands = self.candidates(x, st);
        for (k, &c) in cands.iter().enumerate().skip(start) {
            if st.best.load(Ordering::Relaxed) < st.branch {
                return Step::Cancelled;
            }
            let inner = if k == start {
                resume.map(|r| &r[1..]).filter(|r| !r.is_empty())
            } else {
                None
            };
            // nodes on a resumed prefix were paid for by the earlier run
            if inner.is_none() && st.nodes.fetch_add(1, Ordering::Relaxed) >= st.budget {
                path.push(k);
                return Step::Exhausted;
            }
            self.assign(x, c, st);
            if self.coverable(t, st) {
                path.push(k);
                match self.dfs(t + 1, st, inner, path) {
                    Step::Done => {
                        path.pop();
                    }
                    other => return other,
                }
            }
            self.unassign(x, c, st);
        }
        Step::Done
    }

    fn certificate(&self, image: Vec<usize>) -> Result<AdequacyCertificate> {
        let map = LatticeMap::new(self.source.clone(), self.target.clone(), image)?;
        check_with(self.order, self.i, self.j, &map)?
            .map_err(|f| Error::InvalidInput(format!("search produced an invalid map: {f}")))
    }

    fn run(&self, config: &SearchConfig) -> Result<SearchOutcome> {
        let nodes = AtomicU64::new(0);
        let best = AtomicUsize::new(usize::MAX);
        if config.threads <= 1 || !config.resume.is_empty() || self.seq.is_empty() {
            let mut st = self.state(&nodes, config.budget, &best, 0);
            let mut path = Vec::new();
            let resume = (!config.resume.is_empty()).then_some(&config.resume[..]);
            let step = self.dfs(0, &mut st, resume, &mut path);
            let nodes = nodes.load(Ordering::Relaxed).min(config.budget);
            return Ok(match step {
                Step::Found => SearchOutcome::Found {
                    certificate: Box::new(self.certificate(st.image)?),
                    nodes,
                },
                Step::Exhausted => SearchOutcome::Exhausted {
                    checkpoint: path,
                    nodes,
                },
                Step::Done | Step::Cancelled => SearchOutcome::Refuted { nodes },
            });
        }
        let root = {
            let st = self.state(&nodes, config.budget, &best, 0);
            self.candidates(self.seq[0], &st)
        };
        let next = AtomicUsize::new(0);
        let results: Vec<(usize, Step, Vec<usize>, Vec<usize>)> = std::thread::scope(|scope| {
            let workers: Vec<_> = (0..config.threads.min(root.len().max(1)))
                .map(|_| {
                    scope.spawn(|| {
                        let mut mine = Vec::new();
                        loop {
                            let k = next.fetch_add(1, Ordering::Relaxed);
                            if k >= root.len() || best.load(Ordering::Relaxed) < k {
                                break;
                            }
                            let mut st = self.state(&nodes, config.budget, &best, k);
                            let mut path = vec![k];
                            let step = if nodes.fetch_add(1, Ordering::Relaxed) >= config.budget {
                                Step::Exhausted
                            } else {
                                self.assign(self.seq[0], root[k], &mut st);
                                if self.coverable(0, &mut st) {
                                    self.dfs(1, &mut st, None, &mut path)
                                } else {
                                    Step::Done
                                }
                            };
                            if matches!(step, Step::Found) {
                                best.fetch_min(k, Ordering::Relaxed);
                            }
                            mine.push((k, step, path, st.image));
                        }
                        mine
                    })
                })
                .collect();
            workers
                .into_iter()
                .flat_map(|w| w.join().expect("search worker panicked"))
                .collect()
        });
        let mut results = results;
        results.sort_by_key(|r| r.0);
        let nodes = nodes.load(Ordering::Relaxed).min(config.budget);
        let mut finished = 0;
        for (k, step, path, image) in results {
            if k != finished {
                break;
            }
            match step {
                Step::Found => {
                    return Ok(SearchOutcome::Found {
                        certificate: Box::new(self.certificate(image)?),
                        nodes,
                    })
                }
                Step::Exhausted => {
                    return Ok(SearchOutcome::Exhausted {
                        checkpoint: path,
                        nodes,
                    })
                }
                Step::Done => finished += 1,
                Step::Cancelled => break,
            }
        }
        if finished == root.len() {
            Ok(SearchOutcome::Refuted { nodes })
        } else {
            Ok(SearchOutcome::Exhausted {
                checkpoint: vec![finished],
                nodes,
            })
        }
    }
}

/// With `junction`, majorization searches also demand that the composed
/// language be early.
pub(crate) fn search_with(
    order: Order,
    i: u32,
    j: u32,
    junction: bool,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    if let Some(size) = order.nonzero_count(j) {
        if (1u64 << i.min(63)) > size && i <= MAX_SOURCE_DIM {
            return Ok(SearchOutcome::Refuted { nodes: 0 });
        }
    }
    Engine::new(order, i, j, junction)?.run(config)
}

/// Searches for `2^i -> |F_j^-| => |F_(j-1)^-|` within the node budget.
pub fn search_relation(i: u32, j: u32, config: &SearchConfig) -> Result<SearchOutcome> {
    search_with(Order::Product, i, j, false, config)
}

/// Fixed constructions of adequacy relations into `F_3^-` and `F_4^-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Embedding {
    /// `2^2 -> F_3^-` through `(r & b) | a` with `a <= b`.
    PostAlh,
    /// `2^4 -> F_3^-` onto everything but the three variables.
    Fig39,
    /// `2^3 -> F_3^-` onto the cube above majority, with its top raised to 1.
    BothRestricted,
    /// `2^4 = 2^3 x 2 -> F_4^-` pairing a top-cube element with two lower ones.
    Alh,
    /// `2^5 -> F_4^-`.
    Small,
    /// `2^6 = 2^3 x 2^3 -> F_4^-`, bottom cube for one half, top cubes for the other.
    Friday,
}

impl Embedding {
    pub const ALL: [Embedding; 6] = [
        Embedding::PostAlh,
        Embedding::Fig39,
        Embedding::BothRestricted,
        Embedding::Alh,
        Embedding::Small,
        Embedding::Friday,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Embedding::PostAlh => "post_alh",
            Embedding::Fig39 => "fig39",
            Embedding::BothRestricted => "both_restricted",
            Embedding::Alh => "alh",
            Embedding::Small => "small",
            Embedding::Friday => "friday",
        }
    }

    /// `(i, j)` of the relation.
    pub fn shape(self) -> (u32, u32) {
        match self {
            Embedding::PostAlh => (2, 3),
            Embedding::Fig39 => (4, 3),
            Embedding::BothRestricted => (3, 3),
            Embedding::Alh => (4, 4),
            Embedding::Small => (5, 4),
            Embedding::Friday => (6, 4),
        }
    }

    /// Image masks indexed by source rank.
    pub fn images(self) -> Vec<u64> {
        match self {
            Embedding::PostAlh => post_alh_images(),
            Embedding::Fig39 => four_cube_images(),
            Embedding::BothRestricted => (0..8).map(top_cube_raised).collect(),
            Embedding::Alh => alh_images(),
            Embedding::Small => SMALL_IMAGES.to_vec(),
            Embedding::Friday => friday_images(),
        }
    }
}

impl FromStr for Embedding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Embedding::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown embedding {s:?}")))
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn named_embedding(e: Embedding) -> Result<LatticeMap<u64, u64>> {
    let (i, j) = e.shape();
    map_from_masks(Order::Product, i, j, &e.images())
}

/// Mask of a function of three variables `(x, y, z)`, `x` first.
fn f3(f: impl Fn(bool, bool, bool) -> bool) -> u64 {
    (0..8u64)
        .filter(|&r| f(r & 4 != 0, r & 2 != 0, r & 1 != 0))
        .fold(0, |m, r| m | 1 << r)
}

/// `[s & b] | a` on `(s, x, y, z)`, `s` first.
fn with_switch(a: u64, b: u64) -> u64 {
    a | (b | a) << 8
}

fn maj(p: bool, q: bool, r: bool) -> bool {
    (p && q) || (p && r) || (q && r)
}

/// Variables are `(r, p, q)` with `r` substituted.
fn post_alh_images() -> Vec<u64> {
    vec![
        f3(|_, p, q| p && q),
        f3(|_, p, _| p),
        f3(|_, _, q| q),
        f3(|r, p, q| r || p || q),
    ]
}

type Labelled = (u64, fn(bool, bool, bool) -> bool);

fn four_cube_images() -> Vec<u64> {
    let table: [Labelled; 16] = [
        (0b0000, |p, q, r| p && q && r),
        (0b0010, |_, q, r| q && r),
        (0b0100, |p, _, r| p && r),
        (0b1000, |p, q, _| p && q),
        (0b0110, |p, q, r| r && (p || q)),
        (0b1100, |p, q, r| p && (q || r)),
        (0b0001, |p, q, r| q && (p || r)),
        (0b1010, maj),
        (0b0011, |p, q, r| r || (p && q)),
        (0b0101, |p, q, r| q || (p && r)),
        (0b1001, |p, q, r| p || (q && r)),
        (0b0111, |_, q, r| q || r),
        (0b1011, |p, _, r| p || r),
        (0b1101, |p, q, _| p || q),
        (0b1110, |p, q, r| p || q || r),
        (0b1111, |_, _, _| true),
    ];
    let mut images = vec![0; 16];
    for (s, f) in table {
        images[s as usize] = f3(f);
    }
    images
}

/// Single variables by source bit: the most significant bit is the first variable.
fn var3(bit: u32) -> u64 {
    f3(move |x, y, z| [z, y, x][bit as usize])
}

/// Majority joined with the variables named by `s`; the full set maps to 1.
fn top_cube_raised(s: u64) -> u64 {
    if s == 7 {
        return 0xff;
    }
    (0..3)
        .filter(|&k| s >> k & 1 == 1)
        .fold(f3(maj), |m, k| m | var3(k))
}

/// Majority joined with the variables named by `s`.
fn top_cube(s: u64) -> u64 {
    (0..3)
        .filter(|&k| s >> k & 1 == 1)
        .fold(f3(maj), |m, k| m | var3(k))
}

/// `p & q & r` joined with the variables named by `s`.
fn variable_cube(s: u64) -> u64 {
    (0..3)
        .filter(|&k| s >> k & 1 == 1)
        .fold(f3(|p, q, r| p && q && r), |m, k| m | var3(k))
}

/// Conjunction of `k` with the variable two places after it, cyclically.
fn pair(k: u32) -> u64 {
    var3(k) & var3((k + 2) % 3)
}

/// `p & q & r` joined with the conjunctions [`pair`] named by `s`.
fn bottom_cube(s: u64) -> u64 {
    (0..3)
        .filter(|&k| s >> k & 1 == 1)
        .fold(f3(|p, q, r| p && q && r), |m, k| m | pair(k))
}

/// Source `(y, e)` with `y` the top three bits. `e = 1` pairs the raised top
/// cube with joins of variables; `e = 0` with the matching conjunctions.
fn alh_images() -> Vec<u64> {
    (0..16u64)
        .map(|s| {
            let (y, e) = (s >> 1, s & 1);
            let b = top_cube_raised(y);
            let a = if e == 1 {
                variable_cube(y)
            } else {
                // zero for the empty set, so the lower chain starts below p & q & r
                (0..3)
                    .filter(|&k| y >> k & 1 == 1)
                    .fold(0, |m, k| m | pair(k))
            };
            with_switch(a, b)
        })
        .collect()
}

/// Source `(x, y)` with `x` the top three bits: `a` runs over the bottom
/// cube, `b` over the variable cube, the top cube, or the raised top cube.
fn friday_images() -> Vec<u64> {
    (0..64u64)
        .map(|s| {
            let (x, y) = (s >> 3, s & 7);
            let b = match x {
                0 => variable_cube(y),
                7 => top_cube_raised(y),
                _ => top_cube(y),
            };
            with_switch(bottom_cube(x), b)
        })
        .collect()
}

/// A `2^5 -> F_4^-` relation found by [`search_relation`] and frozen here.
const SMALL_IMAGES: [u64; 32] = [
    0x8880, 0xa8a0, 0xc8c0, 0xeeec, 0xe8e0, 0xf8f0, 0xfae0, 0xfefc, 0xeaaa, 0xfeaa, 0xeaea, 0xfeee,
    0xeeea, 0xfefa, 0xfeea, 0xfefe, 0xcc80, 0xfca0, 0xccc0, 0xfeec, 0xffe0, 0xfff0, 0xffe8, 0xfffc,
    0xeeaa, 0xffaa, 0xeeee, 0xffee, 0xffea, 0xfffa, 0xfffe, 0xffff,
];

/// `f_ab = [s & b] | [!s & a]` on `(p, q, r, s)`, `s` last.
fn switched(a: u64, b: u64) -> u64 {
    (0..8).fold(0, |m, r| {
        m | (a >> r & 1) << (2 * r) | (b >> r & 1) << (2 * r + 1)
    })
}

/// Checks `f_(a1 b1) <= f_(a2 b2)` iff `a1 <= a2` and `b1 <= b2` over all
/// quadruples of monotone functions of three variables.
pub fn lemma_les_check() -> bool {
    let f3s = enumerate_monotone_masks(3).expect("n = 3 is enumerable");
    let leq = |x: u64, y: u64| x & !y == 0;
    f3s.iter().all(|&a1| {
        f3s.iter().all(|&a2| {
            f3s.iter().all(|&b1| {
                f3s.iter().all(|&b2| {
                    leq(switched(a1, b1), switched(a2, b2)) == (leq(a1, a2) && leq(b1, b2))
                })
            })
        })
    })
}

/// The split `(i, j = n - i)` with `i` largest such that `2^i` fits in the
/// nonzero family of arity `n - i`.
pub fn relation_shape(order: Order, n: u32) -> Result<(u32, u32)> {
    (0..=n)
        .rev()
        .find(|&i| {
            let j = n - i;
            match order.nonzero_count(j) {
                Some(size) => i < 64 && (1u64 << i) <= size,
                None => true,
            }
        })
        .map(|i| (i, n - i))
        .ok_or_else(|| Error::Unsupported(format!("no split for n = {n}")))
}

/// Largest `n` whose witness can be built.
pub const MAX_WITNESS_ARITY: u32 = 10;

/// A monotone language of `n <= 10` variables with `monotone_bound(n)` states.
pub fn build_witness_language(n: u32) -> Result<MonotoneFunction> {
    build_witness_with(n, &SearchConfig::default())
}

pub fn build_witness_with(n: u32, config: &SearchConfig) -> Result<MonotoneFunction> {
    if n > MAX_WITNESS_ARITY {
        return Err(Error::Unsupported(format!(
            "no adequacy relation is known for n = {n}; the next one needed is 2^7 -> 167 => 19"
        )));
    }
    if n == 0 {
        return MonotoneFunction::from_mask(0, 1);
    }
    let (i, j) = relation_shape(Order::Product, n)?;
    let images = match Embedding::ALL.into_iter().find(|e| e.shape() == (i, j)) {
        Some(e) => e.images(),
        None => match search_relation(i, j, config)? {
            SearchOutcome::Found { certificate, .. } => certificate.images(),
            SearchOutcome::Exhausted { .. } => {
                return Err(Error::Capacity(format!("search budget for ({i}, {j})")))
            }
            SearchOutcome::Refuted { .. } => return Err(Error::NoWitness),
        },
    };
    MonotoneFunction::from_function(&compose_language(i, j, &images)?)
}
