//! Finite posets with explicit order matrices, and maps between them.

use crate::error::{Error, Result};

/// Largest poset whose order axioms are verified on construction.
pub const AXIOM_CHECK_LIMIT: usize = 1 << 12;

fn words(len: usize) -> usize {
    len.div_ceil(64)
}

fn get(row: &[u64], j: usize) -> bool {
    (row[j / 64] >> (j % 64)) & 1 == 1
}

/// A finite partial order. `up[x]` is the bitset of all `y` with `x <= y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset<T> {
    elements: Vec<T>,
    up: Vec<Vec<u64>>,
    down: Vec<Vec<u64>>,
}

impl<T> Poset<T> {
    /// Builds the poset ordered by `leq`, checking reflexivity, antisymmetry
    /// and transitivity when it has at most [`AXIOM_CHECK_LIMIT`] elements.
    pub fn from_relation(elements: Vec<T>, leq: impl Fn(&T, &T) -> bool) -> Result<Self> {
        let len = elements.len();
        let mut up = vec![vec![0u64; words(len)]; len];
        let mut down = vec![vec![0u64; words(len)]; len];
        for (x, ex) in elements.iter().enumerate() {
            for (y, ey) in elements.iter().enumerate() {
                if leq(ex, ey) {
                    up[x][y / 64] |= 1 << (y % 64);
                    down[y][x / 64] |= 1 << (x % 64);
                }
            }
        }
        let poset = Self { elements, up, down };
        if len <= AXIOM_CHECK_LIMIT {
            poset.check_axioms()?;
        }
        Ok(poset)
    }

    fn check_axioms(&self) -> Result<()> {
        for x in 0..self.len() {
            if !self.leq(x, x) {
                return Err(Error::InvalidInput(format!(
                    "order is not reflexive at element {x}"
                )));
            }
            for y in self.iter_up(x) {
                if y != x && self.leq(y, x) {
                    return Err(Error::InvalidInput(format!(
                        "elements {x} and {y} violate antisymmetry"
                    )));
                }
                // up(y) must be contained in up(x)
                if self.up[y].iter().zip(&self.up[x]).any(|(a, b)| a & !b != 0) {
                    return Err(Error::InvalidInput(format!(
                        "order is not transitive through {x} <= {y}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn element(&self, x: usize) -> &T {
        &self.elements[x]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        get(&self.up[x], y)
    }

    pub(crate) fn up_row(&self, x: usize) -> &[u64] {
        &self.up[x]
    }

    /// Indices `y` with `x <= y`.
    pub fn iter_up(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&y| get(&self.up[x], y))
    }

    /// Number of elements `>= x`.
    pub fn up_size(&self, x: usize) -> usize {
        self.up[x].iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of elements `<= x`.
    pub fn down_size(&self, x: usize) -> usize {
        self.down[x].iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Pairs `(x, y)` where `y` covers `x`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            for y in self.iter_up(x) {
                if y == x {
                    continue;
                }
                let between = self.iter_up(x).any(|z| z != x && z != y && self.leq(z, y));
                if !between {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Indices sorted so every element comes after everything below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&x| (self.down_size(x), x));
        order
    }
}

/// A total map from `source` into `target`, by element index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeMap<S, T> {
    pub source: Poset<S>,
    pub target: Poset<T>,
    pub image: Vec<usize>,
}

impl<S, T> LatticeMap<S, T> {
    pub fn new(source: Poset<S>, target: Poset<T>, image: Vec<usize>) -> Result<Self> {
        if image.len() != source.len() {
            return Err(Error::InvalidInput(format!(
                "map has {} images for {} source elements",
                image.len(),
                source.len()
            )));
        }
        if let Some(&bad) = image.iter().find(|&&t| t >= target.len()) {
            return Err(Error::InvalidInput(format!(
                "image index {bad} is outside the target"
            )));
        }
        Ok(Self {
            source,
            target,
            image,
        })
    }

    pub fn image_of(&self, x: usize) -> &T {
        self.target.element(self.image[x])
    }

    /// First pair `(x, y)` with `x <= y` whose images are not ordered.
    pub fn isotone_violation(&self) -> Option<(usize, usize)> {
        (0..self.source.len()).find_map(|x| {
            self.source
                .iter_up(x)
                .find(|&y| !self.target.leq(self.image[x], self.image[y]))
                .map(|y| (x, y))
        })
    }

    /// First pair of distinct source elements with the same image.
    pub fn injectivity_violation(&self) -> Option<(usize, usize)> {
        let mut seen = vec![None; self.target.len()];
        for (x, &t) in self.image.iter().enumerate() {
            if let Some(prev) = seen[t] {
                return Some((prev, x));
            }
            seen[t] = Some(x);
        }
        None
    }
}

pub fn is_isotone<S, T>(map: &LatticeMap<S, T>) -> bool {
    map.isotone_violation().is_none()
}

pub fn is_injective<S, T>(map: &LatticeMap<S, T>) -> bool {
    map.injectivity_violation().is_none()
}
