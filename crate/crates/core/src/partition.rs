//! The split of GF(q^2)* into six special elements and the remaining
//! `±x` pairs, together with the norm-sum identities the constructions
//! lean on.

use crate::error::{Error, Result};
use crate::gf::{Element, FieldCtx};

/// `A = {1, -1, s, -s, s+1, -s-1}` with `s = alpha^{(q-1)/2}`, and the rest
/// of GF(q^2)* as pairs `(x_i, -x_i)`.
///
/// Each pair's first member is the one with the smaller encoding, and pairs
/// are sorted by it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardPartition {
    special: [Element; 6],
    pairs: Vec<(Element, Element)>,
    s: Element,
}

impl StandardPartition {
    pub fn special(&self) -> &[Element; 6] {
        &self.special
    }

    pub fn pairs(&self) -> &[(Element, Element)] {
        &self.pairs
    }

    /// `alpha^{(q-1)/2}`.
    pub fn s(&self) -> Element {
        self.s
    }

    /// Number of pairs, `(q^2 - 7) / 2`.
    pub fn k(&self) -> usize {
        self.pairs.len()
    }
}

pub fn build_partition(ctx: &FieldCtx) -> Result<StandardPartition> {
    let q = ctx.q() as i64;
    if q < 3 || q % 2 == 0 {
        return Err(Error::EvenCharacteristic(ctx.p()));
    }
    let s = ctx.alpha_pow((q - 1) / 2);
    let s1 = ctx.add(s, Element::ONE);
    let special = [
        Element::ONE,
        ctx.neg(Element::ONE),
        s,
        ctx.neg(s),
        s1,
        ctx.neg(s1),
    ];
    let mut sorted = special;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) || sorted[0].is_zero() {
        return Err(Error::PartitionDegenerate);
    }

    let pairs: Vec<(Element, Element)> = ctx
        .elements()
        .skip(1)
        .filter(|x| sorted.binary_search(x).is_err())
        .filter_map(|x| {
            let m = ctx.neg(x);
            (x < m).then_some((x, m))
        })
        .collect();
    if 2 * pairs.len() + 7 != ctx.order() as usize {
        return Err(Error::Internal(format!(
            "partition has {} pairs for {} elements",
            pairs.len(),
            ctx.order()
        )));
    }
    Ok(StandardPartition { special, pairs, s })
}

/// Whether `sum_{i=0}^{q^2-2} (alpha^i)^{q+1}` vanishes, evaluated term by term.
pub fn check_norm_sum(ctx: &FieldCtx) -> bool {
    let total = ctx.sum((0..ctx.group_order() as i64).map(|i| ctx.norm(ctx.alpha_pow(i))));
    total.is_zero()
}

/// Whether `2 sum_{i=1}^{k} N(x_i) + 2 N(s + 1)` vanishes.
pub fn check_pair_norm_identity(ctx: &FieldCtx, part: &StandardPartition) -> bool {
    let two = ctx.from_int(2);
    let pairs = ctx.sum(part.pairs.iter().map(|&(x, _)| ctx.norm(x)));
    let tail = ctx.norm(ctx.add(part.s, Element::ONE));
    ctx.add(ctx.mul(two, pairs), ctx.mul(two, tail)).is_zero()
}

/// `2 sum_{i=1}^{k1} N(x_i)` over the first `k1` pairs.
pub fn partial_norm_sum(ctx: &FieldCtx, part: &StandardPartition, k1: usize) -> Result<Element> {
    if k1 > part.k() {
        return Err(Error::IndexError {
            index: k1,
            max: part.k(),
        });
    }
    let sum = ctx.sum(part.pairs[..k1].iter().map(|&(x, _)| ctx.norm(x)));
    Ok(ctx.mul(ctx.from_int(2), sum))
}

/// Number of norm preimages for every `beta` in GF(q)*, ascending by `beta`.
pub fn norm_fibre_sizes(ctx: &FieldCtx) -> Vec<(Element, usize)> {
    let mut counts = vec![0usize; ctx.order() as usize];
    for x in ctx.elements().skip(1) {
        counts[ctx.norm(x).encoding() as usize] += 1;
    }
    ctx.base_field()
        .into_iter()
        .skip(1)
        .map(|b| (b, counts[b.encoding() as usize]))
        .collect()
}
