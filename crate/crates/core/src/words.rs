//! Words over generators `g_1 .. g_d` and their inverses, and their
//! evaluation on tuples of permutations.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Permutation, PermutationGraph};
use crate::rng::{below, stream};

/// Generator `generator` (0-based) or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inverted(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    pub letters: Vec<Letter>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("bad letter {0:?}; letters are nonzero integers like 1 or -2")]
    Parse(String),
    #[error("word uses generator {generator} but only {available} permutations were given")]
    GeneratorOutOfRange { generator: usize, available: usize },
    #[error("enumeration of {0} cases exceeds the cap")]
    CapExceeded(u128),
    #[error("sample count must be positive")]
    NoSamples,
    #[error("exact mode needs n <= 5, at most 2 generators and length <= 4")]
    TooLargeForExact,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of generators the word needs.
    pub fn rank(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.generator + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word {
            letters: self.letters.iter().chain(&other.letters).copied().collect(),
        }
    }

    pub fn power(&self, m: usize) -> Word {
        Word {
            letters: self.letters.repeat(m),
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| !w[0].cancels(w[1]))
    }

    /// Word number `code` among the `(2d)^len` words of length `len`, with
    /// letter `2i` standing for `g_i` and `2i + 1` for its inverse.
    pub fn from_index(mut code: u64, d: usize, len: usize) -> Word {
        let base = 2 * d as u64;
        let mut letters = Vec::with_capacity(len);
        for _ in 0..len {
            let x = (code % base) as usize;
            code /= base;
            letters.push(Letter::new(x / 2, x % 2 == 1));
        }
        Word { letters }
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// `1 2 -1` is `g_1 g_2 g_1^-1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .split_whitespace()
            .map(|t| match t.parse::<i64>() {
                Ok(x) if x != 0 => Ok(Letter::new(x.unsigned_abs() as usize - 1, x < 0)),
                _ => Err(WordError::Parse(t.to_string())),
            })
            .collect::<Result<_, _>>()?;
        Ok(Word { letters })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let sign = if l.inverse { "-" } else { "" };
            write!(f, "{sign}{}", l.generator + 1)?;
        }
        Ok(())
    }
}

/// Free reduction in one pass with a stack.
pub fn reduce(w: &Word) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.letters {
        match stack.last() {
            Some(&top) if top.cancels(l) => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word { letters: stack }
}

/// The cyclic core of a word: its reduction with matching inverse letters
/// stripped from both ends.
pub fn cyclic_core(w: &Word) -> Word {
    let r = reduce(w);
    let (mut lo, mut hi) = (0, r.len());
    while hi - lo >= 2 && r.letters[lo].cancels(r.letters[hi - 1]) {
        lo += 1;
        hi -= 1;
    }
    Word {
        letters: r.letters[lo..hi].to_vec(),
    }
}

/// The largest `l` with `reduce(w) = a b^l a^-1`; 0 for a trivial word.
/// Equal to `|c| / p` where `c` is the cyclic core and `p` the length of its
/// shortest root.
pub fn word_order(w: &Word) -> usize {
    let core = cyclic_core(w);
    let n = core.len();
    if n == 0 {
        return 0;
    }
    let root = (1..=n)
        .filter(|p| n.is_multiple_of(*p))
        .find(|&p| (p..n).all(|i| core.letters[i] == core.letters[i - p]))
        .expect("the whole core is a root");
    n / root
}

pub fn is_primitive(w: &Word) -> bool {
    word_order(w) == 1
}

/// Exhaustive count of imprimitive words of length `2k` over `d`
/// generators, with the bound `k^2 (2 sqrt(2d))^(2k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImprimitiveCount {
    pub d: usize,
    pub k: usize,
    pub count: u64,
    pub total: u64,
    pub bound: f64,
}

impl ImprimitiveCount {
    pub fn within_bound(&self) -> bool {
        (self.count as f64) <= self.bound
    }
}

/// Default enumeration cap for exhaustive word counts.
pub const ENUMERATION_CAP: u128 = 10_000_000;

pub fn count_imprimitive(d: usize, k: usize, cap: u128) -> Result<ImprimitiveCount, WordError> {
    let total = (2 * d as u128).pow(2 * k as u32);
    if total > cap {
        return Err(WordError::CapExceeded(total));
    }
    let count = (0..total as u64)
        .into_par_iter()
        .filter(|&code| word_order(&Word::from_index(code, d, 2 * k)) != 1)
        .count() as u64;
    let bound = (k * k) as f64 * (8.0 * d as f64).powi(k as i32);
    Ok(ImprimitiveCount {
        d,
        k,
        count,
        total: total as u64,
        bound,
    })
}

/// The permutation `w(perms)`, applying the first letter first.
pub fn evaluate_word(w: &Word, perms: &[Permutation]) -> Result<Permutation, WordError> {
    if w.rank() > perms.len() {
        return Err(WordError::GeneratorOutOfRange {
            generator: w.rank(),
            available: perms.len(),
        });
    }
    let n = perms.first().map_or(0, Permutation::len);
    let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
    let mut images: Vec<usize> = (0..n).collect();
    for l in &w.letters {
        let p = if l.inverse {
            &inverses[l.generator]
        } else {
            &perms[l.generator]
        };
        images.iter_mut().for_each(|x| *x = p.apply(*x));
    }
    Ok(Permutation::new(images).expect("composition of permutations"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub p: f64,
    pub standard_error: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Samples per independently seeded chunk in [`estimate_p`].
pub const SAMPLE_CHUNK: u64 = 4096;

/// Monte Carlo estimate of the probability that `w` fixes point 0 when each
/// generator is a uniform permutation of `0..n`. Each sample draws a fresh
/// tuple, revealing only the images the walk of point 0 needs, which has the
/// same distribution as drawing the permutations in full. Chunk `c` uses the
/// stream `(seed, c, 0)`, so the result does not depend on how chunks are
/// spread across threads.
pub fn estimate_p(w: &Word, n: usize, samples: u64, seed: u64) -> Result<Estimate, WordError> {
    if samples == 0 {
        return Err(WordError::NoSamples);
    }
    assert!(n >= 1, "n must be positive");
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
            let mut rng = stream(seed, c, 0);
            let mut reveal = LazyTuple::new(w.rank(), n);
            (0..count)
                .filter(|_| reveal.fixes_zero(w, &mut rng))
                .count() as u64
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let standard_error = (p * (1.0 - p) / samples as f64).sqrt();
    Ok(Estimate {
        p,
        standard_error,
        hits,
        samples,
    })
}

/// Partially revealed uniform permutations, reset between samples. Each
/// generator keeps pools of points with no image yet and of points that are
/// no one's image yet; a reveal draws uniformly from the matching pool.
struct LazyTuple {
    forward: Vec<Vec<usize>>,
    backward: Vec<Vec<usize>>,
    /// pools[2g] = unmapped domain points, pools[2g + 1] = unused images
    pools: Vec<Pool>,
    log: Vec<(usize, usize, usize)>,
    revealed: Vec<(usize, usize, usize)>,
}

const UNSET: usize = usize::MAX;

struct Pool {
    items: Vec<usize>,
    position: Vec<usize>,
}

impl Pool {
    fn full(n: usize) -> Self {
        Pool {
            items: (0..n).collect(),
            position: (0..n).collect(),
        }
    }

    fn take_at(&mut self, index: usize) -> usize {
        let item = self.items.swap_remove(index);
        if let Some(&moved) = self.items.get(index) {
            self.position[moved] = index;
        }
        item
    }

    /// Undoes `take_at(index)` that returned `item`.
    fn restore(&mut self, index: usize, item: usize) {
        self.items.push(item);
        let last = self.items.len() - 1;
        self.items.swap(index, last);
        self.position[self.items[last]] = last;
        self.position[item] = index;
    }
}

impl LazyTuple {
    fn new(d: usize, n: usize) -> Self {
        LazyTuple {
            forward: vec![vec![UNSET; n]; d],
            backward: vec![vec![UNSET; n]; d],
            pools: (0..2 * d).map(|_| Pool::full(n)).collect(),
            log: Vec::new(),
            revealed: Vec::new(),
        }
    }

    fn take(&mut self, pool: usize, index: usize) -> usize {
        let item = self.pools[pool].take_at(index);
        self.log.push((pool, index, item));
        item
    }

    fn fixes_zero(&mut self, w: &Word, rng: &mut crate::rng::Stream) -> bool {
        let mut x = 0;
        for l in &w.letters {
            let g = l.generator;
            let known = if l.inverse {
                self.backward[g][x]
            } else {
                self.forward[g][x]
            };
            x = if known != UNSET {
                known
            } else {
                // x leaves its own pool; its partner is uniform over the other
                let (own, other) = if l.inverse {
                    (2 * g + 1, 2 * g)
                } else {
                    (2 * g, 2 * g + 1)
                };
                let at = self.pools[own].position[x];
                self.take(own, at);
                let pick = below(rng, self.pools[other].items.len());
                let y = self.take(other, pick);
                let (a, b) = if l.inverse { (y, x) } else { (x, y) };
                self.forward[g][a] = b;
                self.backward[g][b] = a;
                self.revealed.push((g, a, b));
                y
            };
        }
        for (g, a, b) in self.revealed.drain(..) {
            self.forward[g][a] = UNSET;
            self.backward[g][b] = UNSET;
        }
        while let Some((pool, index, item)) = self.log.pop() {
            self.pools[pool].restore(index, item);
        }
        x == 0
    }
}

/// Exact probability that `w` fixes point 0, as `(numerator, denominator)`
/// over all tuples of permutations of `0..n`, one per generator in use.
pub fn exact_p(w: &Word, n: usize) -> Result<(u64, u64), WordError> {
    let d = w.rank();
    if n > 5 || d > 2 || w.len() > 4 {
        return Err(WordError::TooLargeForExact);
    }
    let all = all_permutations(n);
    let mut hits = 0u64;
    let mut total = 0u64;
    let mut tuple = vec![0usize; d];
    loop {
        let perms: Vec<Permutation> = tuple.iter().map(|&i| all[i].clone()).collect();
        total += 1;
        if evaluate_word(w, &perms)?.apply(0) == 0 {
            hits += 1;
        }
        // next tuple in mixed radix
        let mut i = 0;
        while i < d {
            tuple[i] += 1;
            if tuple[i] < all.len() {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    Ok((hits, total))
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    fn heap(k: usize, current: &mut Vec<usize>, out: &mut Vec<Permutation>) {
        if k <= 1 {
            out.push(Permutation::new(current.clone()).expect("rearrangement"));
            return;
        }
        for i in 0..k {
            heap(k - 1, current, out);
            if k.is_multiple_of(2) {
                current.swap(i, k - 1);
            } else {
                current.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut current, &mut out);
    out.sort_by(|a, b| a.images().cmp(b.images()));
    out.dedup();
    out
}

/// Counts pairs `(v, w)` with `w` a word of the given length whose walk
/// from `v` returns to `v`. Letters are the generators, their inverses and,
/// when present, the pairing (its own inverse). This is the trace of the
/// adjacency matrix raised to `length`.
pub fn closed_path_count(
    pg: &PermutationGraph,
    length: usize,
    cap: u128,
) -> Result<u128, WordError> {
    let mut moves: Vec<&[usize]> = Vec::new();
    let inverses: Vec<Permutation> = pg.generators().iter().map(Permutation::inverse).collect();
    for (s, t) in pg.generators().iter().zip(&inverses) {
        moves.push(s.images());
        moves.push(t.images());
    }
    if let Some(p) = pg.pairing() {
        moves.push(p.images());
    }
    let n = pg.vertex_count();
    let work = (moves.len() as u128).pow(length as u32) * n as u128;
    if work > cap {
        return Err(WordError::CapExceeded(work));
    }
    // depth-first over words; level `i` holds every start's position after
    // the first `i` letters
    let mut levels = vec![(0..n).collect::<Vec<usize>>(); length + 1];
    let mut choice = vec![0usize; length];
    let mut total = 0u128;
    if length == 0 {
        return Ok(n as u128);
    }
    let mut depth = 0;
    loop {
        if choice[depth] == moves.len() {
            if depth == 0 {
                break;
            }
            choice[depth] = 0;
            depth -= 1;
            choice[depth] += 1;
            continue;
        }
        let m = moves[choice[depth]];
        let (done, rest) = levels.split_at_mut(depth + 1);
        for (next, &x) in rest[0].iter_mut().zip(&done[depth]) {
            *next = m[x];
        }
        if depth + 1 == length {
            total += rest[0].iter().enumerate().filter(|&(v, &x)| v == x).count() as u128;
            choice[depth] += 1;
        } else {
            depth += 1;
        }
    }
    Ok(total)
}
