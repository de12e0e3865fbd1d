//! Exhaustive and seeded-random search for Hermitian self-orthogonal
//! `[n, 2]` codes with dual distance 3, plus minimal-edit repair of a
//! failing matrix.
//!
//! A code with dual distance 3 has no two proportional columns, so its
//! reduced row echelon form has pivots in the first two columns:
//!
//! ```text
//! 1 0 a_2 ... a_{n-1}
//! 0 1 b_2 ... b_{n-1}
//! ```
//!
//! with every `(a_j, b_j) = lambda_j (1, y_j)`, `lambda_j != 0`, and the
//! `y_j` nonzero and pairwise distinct. Each row space is enumerated once.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::construct::GeneratorMatrix;
use crate::error::{Error, Result};
use crate::gf::{Element, FieldCtx};
use crate::verify::passes_quick;

pub const DEFAULT_MAX_CANDIDATES: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub n: usize,
    /// Exhaustive: refuse above this many candidates. Randomized: number
    /// of samples. Repair: number of random multi-entry edits.
    pub max_candidates: u64,
    pub seed: u64,
    pub allow_even_q: bool,
    pub edit_budget: usize,
    /// Walk the candidate space in descending element order.
    pub reverse_order: bool,
}

impl SearchConfig {
    pub fn exhaustive(n: usize) -> Self {
        SearchConfig {
            mode: SearchMode::Exhaustive,
            n,
            max_candidates: DEFAULT_MAX_CANDIDATES,
            seed: 0,
            allow_even_q: false,
            edit_budget: 0,
            reverse_order: false,
        }
    }

    pub fn randomized(n: usize, seed: u64, samples: u64) -> Self {
        SearchConfig {
            mode: SearchMode::Randomized,
            max_candidates: samples,
            seed,
            ..Self::exhaustive(n)
        }
    }

    pub fn repair(edit_budget: usize, seed: u64) -> Self {
        SearchConfig {
            mode: SearchMode::Randomized,
            max_candidates: 200_000,
            seed,
            edit_budget,
            ..Self::exhaustive(0)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Passing matrices in reduced row echelon form, sorted.
    pub matrices: Vec<GeneratorMatrix>,
    pub candidates: u64,
    /// Set for even characteristic, where no existence claim is made.
    pub experimental: bool,
}

fn check_characteristic(ctx: &FieldCtx, config: &SearchConfig) -> Result<bool> {
    let even = ctx.p() == 2;
    if even && !config.allow_even_q {
        return Err(Error::EvenCharacteristic(2));
    }
    Ok(even)
}

/// Number of canonical candidates for length `n`.
pub fn canonical_candidate_count(ctx: &FieldCtx, n: usize) -> u128 {
    if n < 3 {
        return 0;
    }
    let free = (ctx.order() - 1) as u128;
    let slots = (n - 2) as u128;
    if slots > free {
        return 0;
    }
    let mut count: u128 = 1;
    for i in 0..slots {
        count = count.saturating_mul(free - i).saturating_mul(free);
    }
    count
}

pub fn search(ctx: &FieldCtx, config: &SearchConfig) -> Result<SearchOutcome> {
    match config.mode {
        SearchMode::Exhaustive => exhaustive_search(ctx, config.n, config),
        SearchMode::Randomized => randomized_search(ctx, config.n, config),
    }
}

struct Tables {
    nonzero: Vec<Element>,
    norm: Vec<Element>,
    conj: Vec<Element>,
}

impl Tables {
    fn new(ctx: &FieldCtx, reverse: bool) -> Self {
        let mut nonzero: Vec<Element> = ctx.elements().skip(1).collect();
        if reverse {
            nonzero.reverse();
        }
        Tables {
            nonzero,
            norm: ctx.elements().map(|x| ctx.norm(x)).collect(),
            conj: ctx.elements().map(|x| ctx.conj(x)).collect(),
        }
    }

    fn norm(&self, x: Element) -> Element {
        self.norm[x.encoding() as usize]
    }

    fn conj(&self, x: Element) -> Element {
        self.conj[x.encoding() as usize]
    }
}

/// Running Hermitian products (r1,r1), (r1,r2), (r2,r2).
#[derive(Clone, Copy)]
struct Sums([Element; 3]);

impl Sums {
    fn with(self, ctx: &FieldCtx, t: &Tables, (a, b): (Element, Element)) -> Sums {
        let [s11, s12, s22] = self.0;
        Sums([
            ctx.add(s11, t.norm(a)),
            ctx.add(s12, ctx.mul(a, t.conj(b))),
            ctx.add(s22, t.norm(b)),
        ])
    }

    fn vanish(self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }
}

struct Walker<'a> {
    ctx: &'a FieldCtx,
    tables: &'a Tables,
    slots: usize,
    used: Vec<bool>,
    cols: Vec<(Element, Element)>,
    hits: Vec<GeneratorMatrix>,
}

impl Walker<'_> {
    fn descend(&mut self, sums: Sums) {
        if self.cols.len() == self.slots {
            if sums.vanish() {
                let head = [(Element::ONE, Element::ZERO), (Element::ZERO, Element::ONE)];
                let m = GeneratorMatrix::from_columns(head.into_iter().chain(self.cols.iter().copied()))
                    .expect("nonempty");
                if passes_quick(self.ctx, &m) {
                    self.hits.push(m);
                }
            }
            return;
        }
        for yi in 0..self.tables.nonzero.len() {
            let y = self.tables.nonzero[yi];
            if self.used[y.encoding() as usize] {
                continue;
            }
            self.used[y.encoding() as usize] = true;
            for li in 0..self.tables.nonzero.len() {
                let lambda = self.tables.nonzero[li];
                let col = (lambda, self.ctx.mul(lambda, y));
                self.cols.push(col);
                self.descend(sums.with(self.ctx, self.tables, col));
                self.cols.pop();
            }
            self.used[y.encoding() as usize] = false;
        }
    }
}

/// Every row space (as its echelon form) whose certificate passes.
pub fn exhaustive_search(ctx: &FieldCtx, n: usize, config: &SearchConfig) -> Result<SearchOutcome> {
    let experimental = check_characteristic(ctx, config)?;
    let count = canonical_candidate_count(ctx, n);
    if count > config.max_candidates as u128 {
        return Err(Error::TooLargeForExhaustive {
            candidates: count,
            cap: config.max_candidates,
        });
    }
    if count == 0 {
        return Ok(SearchOutcome {
            matrices: Vec::new(),
            candidates: 0,
            experimental,
        });
    }
    let tables = Tables::new(ctx, config.reverse_order);
    let base = Sums([Element::ONE, Element::ZERO, Element::ONE]);
    let slots = n - 2;
    let firsts: Vec<(Element, Element)> = tables
        .nonzero
        .iter()
        .flat_map(|&y| tables.nonzero.iter().map(move |&l| (y, l)))
        .collect();
    let mut matrices: Vec<GeneratorMatrix> = firsts
        .par_iter()
        .flat_map_iter(|&(y, lambda)| {
            let mut w = Walker {
                ctx,
                tables: &tables,
                slots,
                used: vec![false; ctx.order() as usize],
                cols: Vec::with_capacity(slots),
                hits: Vec::new(),
            };
            let col = (lambda, ctx.mul(lambda, y));
            w.used[y.encoding() as usize] = true;
            w.cols.push(col);
            w.descend(base.with(ctx, &tables, col));
            w.hits
        })
        .collect();
    matrices.sort();
    Ok(SearchOutcome {
        matrices,
        candidates: count as u64,
        experimental,
    })
}

/// Samples `config.max_candidates` canonical candidates with a seeded RNG.
pub fn randomized_search(ctx: &FieldCtx, n: usize, config: &SearchConfig) -> Result<SearchOutcome> {
    let experimental = check_characteristic(ctx, config)?;
    let free = ctx.order() as usize - 1;
    if n < 3 || n - 2 > free {
        return Ok(SearchOutcome {
            matrices: Vec::new(),
            candidates: 0,
            experimental,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut found = BTreeSet::new();
    for _ in 0..config.max_candidates {
        let ys = sample(&mut rng, free, n - 2);
        let mut cols = vec![(Element::ONE, Element::ZERO), (Element::ZERO, Element::ONE)];
        for yi in ys.iter() {
            let y = ctx.element(yi as u32 + 1)?;
            let lambda = ctx.element(rng.gen_range(1..ctx.order()))?;
            cols.push((lambda, ctx.mul(lambda, y)));
        }
        let m = GeneratorMatrix::from_columns(cols)?;
        if passes_quick(ctx, &m) {
            found.insert(m);
        }
    }
    Ok(SearchOutcome {
        matrices: found.into_iter().collect(),
        candidates: config.max_candidates,
        experimental,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Repair {
    pub matrix: GeneratorMatrix,
    pub edits: usize,
}

/// Finds a passing matrix within `config.edit_budget` entry changes of `m`.
///
/// Single-entry edits are tried exhaustively (position-major, values
/// ascending). Two-entry edits are exhaustive when that space fits in
/// `max_candidates`, and larger edits are sampled with the seeded RNG.
pub fn randomized_repair(ctx: &FieldCtx, m: &GeneratorMatrix, config: &SearchConfig) -> Result<Option<Repair>> {
    if passes_quick(ctx, m) {
        return Err(Error::Precondition("matrix already passes".into()));
    }
    if config.edit_budget == 0 {
        return Err(Error::Precondition("edit budget must be at least 1".into()));
    }
    let n = m.n();
    let positions = 2 * n;
    let at = |pos: usize| (pos / n, pos % n);
    let values: Vec<Element> = ctx.elements().collect();

    let mut cand = m.clone();
    for pos in 0..positions {
        let (r, c) = at(pos);
        let orig = m.get(r, c);
        for &v in values.iter().filter(|&&v| v != orig) {
            cand.set(r, c, v);
            if passes_quick(ctx, &cand) {
                return Ok(Some(Repair { matrix: cand, edits: 1 }));
            }
        }
        cand.set(r, c, orig);
    }
    if config.edit_budget < 2 {
        return Ok(None);
    }

    let alt = values.len() as u64 - 1;
    let pair_space = (positions * (positions - 1) / 2) as u64 * alt * alt;
    if pair_space <= config.max_candidates {
        for p1 in 0..positions {
            for p2 in p1 + 1..positions {
                let ((r1, c1), (r2, c2)) = (at(p1), at(p2));
                let (o1, o2) = (m.get(r1, c1), m.get(r2, c2));
                for &v1 in values.iter().filter(|&&v| v != o1) {
                    cand.set(r1, c1, v1);
                    for &v2 in values.iter().filter(|&&v| v != o2) {
                        cand.set(r2, c2, v2);
                        if passes_quick(ctx, &cand) {
                            return Ok(Some(Repair { matrix: cand, edits: 2 }));
                        }
                    }
                }
                cand.set(r1, c1, o1);
                cand.set(r2, c2, o2);
            }
        }
    }

    let first_random = if pair_space <= config.max_candidates { 3 } else { 2 };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for edits in first_random..=config.edit_budget.min(positions) {
        for _ in 0..config.max_candidates {
            let mut cand = m.clone();
            for pos in sample(&mut rng, positions, edits).iter() {
                let (r, c) = at(pos);
                let orig = m.get(r, c);
                let mut v = ctx.element(rng.gen_range(0..ctx.order()))?;
                while v == orig {
                    v = ctx.element(rng.gen_range(0..ctx.order()))?;
                }
                cand.set(r, c, v);
            }
            if passes_quick(ctx, &cand) {
                return Ok(Some(Repair { matrix: cand, edits }));
            }
        }
    }
    Ok(None)
}
