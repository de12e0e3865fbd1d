//! Generator matrices of Hermitian self-orthogonal `[n, 2, n-1]` codes over
//! GF(q^2) with dual distance 3, for every odd q and `4 <= n <= q^2 + 1`.
//!
//! Every matrix has the same skeleton: a leading column `(gamma, 0)`, a
//! prefix of the `±x_i` pairs as columns `(1, x_i), (1, -x_i)`, a few
//! columns built from the special elements `±1, ±s, ±(s+1)` (possibly
//! scaled by `delta`), and a closing column `(0, epsilon)`. The pairs and
//! special columns cancel in the mixed product; `gamma` and `epsilon` fix
//! the two self-products. Which special columns appear, and which norms
//! `gamma` and `delta` get, depends on the characteristic, on n, and on
//! whether certain partial norm sums vanish.

use std::fmt;
use std::str::FromStr;

use log::debug;

use crate::error::{Error, Result};
use crate::gf::{Element, FieldCtx};
use crate::partition::{build_partition, partial_norm_sum, StandardPartition};
use crate::search::{randomized_repair, SearchConfig};
use crate::verify::passes_quick;

/// A 2 x n matrix over GF(q^2).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorMatrix {
    rows: [Vec<Element>; 2],
}

impl GeneratorMatrix {
    pub fn new(row1: Vec<Element>, row2: Vec<Element>) -> Result<Self> {
        if row1.len() != row2.len() {
            return Err(Error::DimensionMismatch {
                left: row1.len(),
                right: row2.len(),
            });
        }
        if row1.is_empty() {
            return Err(Error::Precondition("matrix has no columns".into()));
        }
        Ok(GeneratorMatrix { rows: [row1, row2] })
    }

    pub fn from_columns<I: IntoIterator<Item = (Element, Element)>>(cols: I) -> Result<Self> {
        let (r1, r2) = cols.into_iter().unzip();
        Self::new(r1, r2)
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> [&[Element]; 2] {
        [&self.rows[0], &self.rows[1]]
    }

    pub fn columns(&self) -> impl Iterator<Item = (Element, Element)> + '_ {
        self.rows[0].iter().copied().zip(self.rows[1].iter().copied())
    }

    pub fn get(&self, row: usize, col: usize) -> Element {
        self.rows[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Element) {
        self.rows[row][col] = value;
    }
}

/// Which branch of the construction produced a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    /// q = 3, one of the seven explicit matrices for n = 4..=10.
    Q3Table(usize),
    // Characteristic 3, q >= 9.
    Char3Even,
    Char3Odd,
    Char3MinusOne,
    Char3MinusTwo,
    Char3MinusThree,
    Char3Square,
    Char3SquarePlusOne,
    // p >= 5, n = 2 mod p, n <= q^2 - 4.
    CongruentEven,
    CongruentEvenZero,
    CongruentOdd,
    CongruentOddZero,
    // p >= 5, n != 2 mod p, n <= q^2 - 4.
    OtherEven,
    OtherEvenZero,
    OtherOdd,
    OtherOddZero,
    OtherOddZeroWrap,
    // p >= 5, n near q^2.
    MinusOne,
    MinusTwo,
    MinusThree,
    Square,
    SquarePlusOne,
}

impl CaseTag {
    pub const CHAR3: [CaseTag; 7] = [
        CaseTag::Char3Even,
        CaseTag::Char3Odd,
        CaseTag::Char3MinusOne,
        CaseTag::Char3MinusTwo,
        CaseTag::Char3MinusThree,
        CaseTag::Char3Square,
        CaseTag::Char3SquarePlusOne,
    ];

    pub const GENERAL: [CaseTag; 14] = [
        CaseTag::CongruentEven,
        CaseTag::CongruentEvenZero,
        CaseTag::CongruentOdd,
        CaseTag::CongruentOddZero,
        CaseTag::OtherEven,
        CaseTag::OtherEvenZero,
        CaseTag::OtherOdd,
        CaseTag::OtherOddZero,
        CaseTag::OtherOddZeroWrap,
        CaseTag::MinusOne,
        CaseTag::MinusTwo,
        CaseTag::MinusThree,
        CaseTag::Square,
        CaseTag::SquarePlusOne,
    ];

    /// Stable tag used in files and reports.
    pub fn label(self) -> String {
        let s = match self {
            CaseTag::Q3Table(n) => return format!("Q3_TABLE({n})"),
            CaseTag::Char3Even => "C3_1",
            CaseTag::Char3Odd => "C3_2",
            CaseTag::Char3MinusOne => "C3_3_1",
            CaseTag::Char3MinusTwo => "C3_3_2",
            CaseTag::Char3MinusThree => "C3_3_3",
            CaseTag::Char3Square => "C3_4_SQ",
            CaseTag::Char3SquarePlusOne => "C3_4_SQ1",
            CaseTag::CongruentEven => "C4_1_EVEN_A",
            CaseTag::CongruentEvenZero => "C4_1_EVEN_B",
            CaseTag::CongruentOdd => "C4_1_ODD_A",
            CaseTag::CongruentOddZero => "C4_1_ODD_B",
            CaseTag::OtherEven => "C4_2_EVEN_A",
            CaseTag::OtherEvenZero => "C4_2_EVEN_B",
            CaseTag::OtherOdd => "C4_2_ODD_A",
            CaseTag::OtherOddZero => "C4_2_ODD_B",
            CaseTag::OtherOddZeroWrap => "C4_2_ODD_C",
            CaseTag::MinusOne => "C4_3_1",
            CaseTag::MinusTwo => "C4_3_2",
            CaseTag::MinusThree => "C4_3_3",
            CaseTag::Square => "C4_4_SQ",
            CaseTag::SquarePlusOne => "C4_4_SQ1",
        };
        s.to_string()
    }

    /// Whether `delta`'s norm is found by scanning GF(q) \ GF(3).
    fn scans_delta(self) -> bool {
        matches!(
            self,
            CaseTag::Char3Even
                | CaseTag::Char3Odd
                | CaseTag::Char3MinusOne
                | CaseTag::Char3MinusThree
                | CaseTag::Char3SquarePlusOne
        )
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for CaseTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Some(inner) = s.strip_prefix("Q3_TABLE(").and_then(|r| r.strip_suffix(')')) {
            return inner
                .parse()
                .map(CaseTag::Q3Table)
                .map_err(|_| format!("bad table length in {s:?}"));
        }
        CaseTag::CHAR3
            .iter()
            .chain(CaseTag::GENERAL.iter())
            .find(|t| t.label() == s)
            .copied()
            .ok_or_else(|| format!("unknown case tag {s:?}"))
    }
}

/// A chosen scalar together with its norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scalar {
    pub value: Element,
    pub norm: Element,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChosenScalars {
    pub gamma: Option<Scalar>,
    pub delta: Option<Scalar>,
    pub epsilon: Option<Scalar>,
}

/// How to read the `alpha^{q-1}` entries of the odd characteristic-3 case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reading {
    /// As `alpha^{(q-1)/2}`, the `s` of the special set.
    Normalized,
    /// Literally as `alpha^{q-1}`.
    Literal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    pub matrix: GeneratorMatrix,
    pub case: CaseTag,
    pub scalars: ChosenScalars,
    pub repaired: bool,
    /// Places where a prescribed norm or entry disagreed with what the
    /// closing equations demand.
    pub notes: Vec<String>,
}

/// Builds and self-verifies the matrix for length `n` over `ctx`.
pub fn construct(ctx: &FieldCtx, n: usize) -> Result<Construction> {
    check_inputs(ctx, n)?;
    let part = build_partition(ctx)?;
    construct_with(ctx, &part, n)
}

/// [`construct`] with a prebuilt partition, for sweeps.
pub fn construct_with(ctx: &FieldCtx, part: &StandardPartition, n: usize) -> Result<Construction> {
    check_inputs(ctx, n)?;
    let case = classify(ctx, part, n)?;
    if let CaseTag::Q3Table(_) = case {
        let (matrix, repaired) = small_q3_table(ctx, n)?;
        return Ok(Construction {
            matrix,
            case,
            scalars: ChosenScalars::default(),
            repaired,
            notes: Vec::new(),
        });
    }
    if case == CaseTag::Char3Odd {
        return build_case(ctx, part, case, n, Reading::Normalized).or_else(|first| {
            debug!("n = {n}: normalized reading failed ({first}); trying the literal one");
            let mut c = build_case(ctx, part, case, n, Reading::Literal)?;
            c.notes.push(format!("normalized reading failed: {first}"));
            Ok(c)
        });
    }
    build_case(ctx, part, case, n, Reading::Normalized)
}

fn check_inputs(ctx: &FieldCtx, n: usize) -> Result<()> {
    if ctx.p().is_multiple_of(2) {
        return Err(Error::EvenCharacteristic(ctx.p()));
    }
    let max = ctx.order() as usize + 1;
    if !(4..=max).contains(&n) {
        return Err(Error::LengthOutOfRange { n, min: 4, max });
    }
    Ok(())
}

/// Picks the branch for `(q, n)`; exactly one tag fires per length.
pub fn classify(ctx: &FieldCtx, part: &StandardPartition, n: usize) -> Result<CaseTag> {
    check_inputs(ctx, n)?;
    let q2 = ctx.order() as usize;
    let p = ctx.p() as usize;
    if ctx.q() == 3 {
        return Ok(CaseTag::Q3Table(n));
    }
    let near = |minus_one, minus_two, minus_three, square, square_plus_one| match q2 + 1 - n {
        4 => Some(minus_three),
        3 => Some(minus_two),
        2 => Some(minus_one),
        1 => Some(square),
        0 => Some(square_plus_one),
        _ => None,
    };
    if p == 3 {
        use CaseTag::*;
        if let Some(t) = near(Char3MinusOne, Char3MinusTwo, Char3MinusThree, Char3Square, Char3SquarePlusOne) {
            return Ok(t);
        }
        return Ok(if n.is_multiple_of(2) { Char3Even } else { Char3Odd });
    }
    {
        use CaseTag::*;
        if let Some(t) = near(MinusOne, MinusTwo, MinusThree, Square, SquarePlusOne) {
            return Ok(t);
        }
    }
    let t = special_norm(ctx, part);
    let u = partial_norm_sum(ctx, part, pair_count(n))?;
    let congruent = n % p == 2 % p;
    Ok(match (congruent, n.is_multiple_of(2)) {
        (true, true) => {
            let v = ctx.add(u, ctx.from_int(4));
            if v.is_zero() { CaseTag::CongruentEvenZero } else { CaseTag::CongruentEven }
        }
        (true, false) => {
            let v = ctx.add(u, ctx.mul(ctx.from_int(2), t));
            if v.is_zero() { CaseTag::CongruentOddZero } else { CaseTag::CongruentOdd }
        }
        (false, true) => {
            let w = ctx.add(u, ctx.from_int(2));
            if w.is_zero() { CaseTag::OtherEvenZero } else { CaseTag::OtherEven }
        }
        (false, false) => {
            let w = ctx.add(u, t);
            if !w.is_zero() {
                CaseTag::OtherOdd
            } else if (n + 1).is_multiple_of(p) {
                CaseTag::OtherOddZeroWrap
            } else {
                CaseTag::OtherOddZero
            }
        }
    })
}

/// Number of `±x` pairs used for lengths up to `q^2 - 4`.
fn pair_count(n: usize) -> usize {
    if n.is_multiple_of(2) {
        (n - 4) / 2
    } else {
        (n - 5) / 2
    }
}

/// `N(s + 1)`.
fn special_norm(ctx: &FieldCtx, part: &StandardPartition) -> Element {
    ctx.norm(ctx.add(part.s(), Element::ONE))
}

/// Columns between the leading `(gamma, 0)` and the closing `(0, epsilon)`.
struct Draft {
    /// Top entry of the leading column when it is not `gamma`.
    fixed_lead: Option<Element>,
    middle: Vec<(Element, Element)>,
    closing: bool,
}

fn pair_columns(part: &StandardPartition, count: usize, out: &mut Vec<(Element, Element)>) {
    for &(x, mx) in &part.pairs()[..count] {
        out.push((Element::ONE, x));
        out.push((Element::ONE, mx));
    }
}

fn draft(
    ctx: &FieldCtx,
    part: &StandardPartition,
    case: CaseTag,
    n: usize,
    delta: Element,
    reading: Reading,
) -> Draft {
    use CaseTag::*;
    let one = Element::ONE;
    let s = part.s();
    let s1 = ctx.add(s, one);
    let neg = |x| ctx.neg(x);
    let d = |x| ctx.mul(delta, x);
    let k = part.k();
    let mut middle = Vec::with_capacity(n);
    let mut fixed_lead = None;
    let mut closing = true;
    match case {
        Q3Table(_) => unreachable!("tables are not drafted"),
        Char3Even | CongruentEven => {
            pair_columns(part, pair_count(n), &mut middle);
            middle.extend([(delta, delta), (delta, neg(delta))]);
        }
        CongruentEvenZero => {
            pair_columns(part, pair_count(n), &mut middle);
            middle.extend([(delta, d(s)), (delta, neg(d(s)))]);
        }
        Char3Odd => {
            pair_columns(part, pair_count(n), &mut middle);
            let b = match reading {
                Reading::Normalized => s,
                Reading::Literal => ctx.alpha_pow(ctx.q() as i64 - 1),
            };
            middle.extend([
                (d(s), d(s)),
                (delta, neg(d(b))),
                (delta, d(ctx.add(b, one))),
            ]);
        }
        CongruentOdd | CongruentOddZero | OtherOddZero | OtherOddZeroWrap => {
            pair_columns(part, pair_count(n), &mut middle);
            middle.extend([(delta, delta), (delta, d(s)), (delta, neg(d(s1)))]);
        }
        OtherEven => {
            pair_columns(part, pair_count(n), &mut middle);
            middle.extend([(one, one), (one, neg(one))]);
        }
        OtherEvenZero => {
            pair_columns(part, pair_count(n), &mut middle);
            middle.extend([(one, s), (one, neg(s))]);
        }
        OtherOdd => {
            pair_columns(part, pair_count(n), &mut middle);
            middle.extend([(one, one), (one, s), (one, neg(s1))]);
        }
        Char3MinusOne => {
            pair_columns(part, k, &mut middle);
            middle.extend([(one, one), (one, neg(one)), (delta, d(s)), (delta, neg(d(s)))]);
        }
        MinusOne => {
            pair_columns(part, k, &mut middle);
            middle.extend([(one, one), (one, neg(one)), (one, s), (one, neg(s))]);
        }
        Char3MinusTwo | MinusTwo => {
            if case == Char3MinusTwo {
                fixed_lead = Some(one);
            }
            pair_columns(part, k, &mut middle);
            middle.extend([(one, one), (one, s), (one, neg(s1))]);
        }
        Char3MinusThree | MinusThree => {
            pair_columns(part, k, &mut middle);
            middle.extend([(delta, d(s1)), (delta, neg(d(s1)))]);
        }
        Char3Square | Square => {
            fixed_lead = Some(one);
            closing = false;
            middle.push((one, one));
            middle.extend((1..ctx.group_order() as i64).map(|i| (one, ctx.alpha_pow(i))));
        }
        Char3SquarePlusOne | SquarePlusOne => {
            if case == Char3SquarePlusOne {
                fixed_lead = Some(one);
            }
            pair_columns(part, k, &mut middle);
            middle.extend([
                (one, one),
                (one, s),
                (one, neg(s1)),
                (delta, neg(delta)),
                (delta, neg(d(s))),
                (delta, d(s1)),
            ]);
        }
    }
    Draft {
        fixed_lead,
        middle,
        closing,
    }
}

/// Norm targets prescribed for a case, given `delta`'s norm.
#[derive(Clone, Copy, Debug, Default)]
struct Prescription {
    gamma: Option<Element>,
    delta: Option<Element>,
    epsilon: Option<Element>,
    /// The nonvanishing side condition, evaluated, when the case has one.
    side: Option<Element>,
}

fn prescribe(
    ctx: &FieldCtx,
    part: &StandardPartition,
    case: CaseTag,
    n: usize,
    delta_norm: Option<Element>,
) -> Result<Prescription> {
    use CaseTag::*;
    let int = |v: i64| ctx.from_int(v);
    let add = |a, b| ctx.add(a, b);
    let mul = |a, b| ctx.mul(a, b);
    let neg = |a| ctx.neg(a);
    let t = special_norm(ctx, part);
    let c = delta_norm.unwrap_or(Element::ZERO);
    let n_i = n as i64;
    let u = || partial_norm_sum(ctx, part, pair_count(n));
    // N(alpha^{q-1} + 1), which the prescribed conditions use in two places.
    let t_literal = ctx.norm(add(ctx.alpha_pow(ctx.q() as i64 - 1), Element::ONE));
    let mut pr = Prescription::default();
    match case {
        Q3Table(_) | Char3Square | Square => {}
        Char3Even => {
            let u = u()?;
            pr.gamma = Some(neg(add(int(n_i - 4), mul(int(2), c))));
            pr.epsilon = Some(neg(add(u, mul(int(2), c))));
            pr.side = Some(add(mul(int(2), c), u));
        }
        Char3Odd => {
            let u = u()?;
            pr.gamma = Some(neg(add(int(n_i - 5), c)));
            pr.epsilon = Some(neg(add(u, mul(c, t_literal))));
            pr.side = Some(add(u, mul(c, t_literal)));
        }
        Char3MinusOne => {
            pr.gamma = Some(ctx.sub(int(5), mul(int(2), c)));
            pr.epsilon = Some(mul(int(2), ctx.sub(add(c, t), Element::ONE)));
            pr.side = Some(ctx.sub(ctx.sub(Element::ONE, c), t_literal));
        }
        Char3MinusTwo => {}
        Char3MinusThree => {
            pr.gamma = Some(ctx.sub(Element::ONE, mul(int(2), c)));
            pr.epsilon = Some(mul(ctx.sub(int(2), mul(int(2), c)), t));
        }
        Char3SquarePlusOne => {
            pr.epsilon = Some(mul(ctx.sub(Element::ONE, c), t));
        }
        CongruentEven => {
            let v = add(u()?, int(4));
            (pr.gamma, pr.delta, pr.epsilon) = (Some(int(-2)), Some(int(2)), Some(neg(v)));
        }
        CongruentEvenZero => {
            (pr.gamma, pr.delta, pr.epsilon) = (Some(int(-2)), Some(int(2)), Some(int(8)));
        }
        CongruentOdd => {
            let v = add(u()?, mul(int(2), t));
            (pr.gamma, pr.delta, pr.epsilon) = (Some(int(-3)), Some(int(2)), Some(neg(v)));
        }
        CongruentOddZero => {
            (pr.gamma, pr.delta, pr.epsilon) = (Some(int(-6)), Some(int(3)), Some(neg(t)));
        }
        OtherEven => {
            let w = add(u()?, int(2));
            (pr.gamma, pr.epsilon) = (Some(int(2 - n_i)), Some(neg(w)));
        }
        OtherEvenZero => {
            (pr.gamma, pr.epsilon) = (Some(int(2 - n_i)), Some(int(4)));
        }
        OtherOdd => {
            let w = add(u()?, t);
            (pr.gamma, pr.epsilon) = (Some(int(2 - n_i)), Some(neg(w)));
        }
        OtherOddZero => {
            (pr.gamma, pr.delta, pr.epsilon) = (Some(int(-n_i - 1)), Some(int(2)), Some(neg(t)));
        }
        OtherOddZeroWrap => {
            let e = neg(mul(int(2), t));
            (pr.gamma, pr.delta, pr.epsilon) = (Some(int(-n_i - 4)), Some(int(3)), Some(e));
        }
        MinusOne => {
            (pr.gamma, pr.epsilon) = (Some(int(3)), Some(mul(int(2), t)));
        }
        MinusTwo => {
            (pr.gamma, pr.epsilon) = (Some(int(4)), Some(t));
        }
        MinusThree => {
            let e = neg(mul(int(2), t));
            (pr.gamma, pr.delta, pr.epsilon) = (Some(int(3)), Some(int(2)), Some(e));
        }
        SquarePlusOne => {
            (pr.gamma, pr.delta, pr.epsilon) = (Some(int(-2)), Some(int(2)), Some(neg(t)));
        }
    }
    Ok(pr)
}

fn smallest_preimage(ctx: &FieldCtx, case: CaseTag, scalar: &'static str, target: Element) -> Result<Scalar> {
    if target.is_zero() {
        return Err(Error::NormTargetZero { case, scalar });
    }
    let value = ctx.norm_preimages(target)?[0];
    Ok(Scalar {
        value,
        norm: target,
    })
}

/// Row-2 self-product of the draft's middle columns, negated: the norm the
/// closing entry must have.
fn closing_target(ctx: &FieldCtx, draft: &Draft) -> Element {
    let bottom: Vec<Element> = draft.middle.iter().map(|c| c.1).collect();
    ctx.neg(ctx.sum(bottom.iter().map(|&b| ctx.norm(b))))
}

/// Picks `gamma`, `delta` and `epsilon` for a case.
///
/// Prescribed norms are met with the smallest-encoding preimage. Where
/// only membership of `N(delta)` in GF(q) \ GF(3) is required, candidate
/// norms are tried in ascending encoding and the first one leaving both
/// `gamma`'s and `epsilon`'s norms nonzero wins. `epsilon` here is the
/// prescribed one; [`construct`] re-derives it from the closing equation.
pub fn choose_scalars(
    ctx: &FieldCtx,
    case: CaseTag,
    n: usize,
    part: &StandardPartition,
) -> Result<ChosenScalars> {
    choose_scalars_for(ctx, case, n, part, Reading::Normalized).map(|(s, _)| s)
}

fn choose_scalars_for(
    ctx: &FieldCtx,
    case: CaseTag,
    n: usize,
    part: &StandardPartition,
    reading: Reading,
) -> Result<(ChosenScalars, Vec<String>)> {
    let mut notes = Vec::new();
    if case.scans_delta() {
        let prime_field = [Element::ZERO, Element::ONE, ctx.from_int(2)];
        for c in ctx.base_field().into_iter().filter(|c| !prime_field.contains(c)) {
            let delta = smallest_preimage(ctx, case, "delta", c)?;
            let pr = prescribe(ctx, part, case, n, Some(c))?;
            if pr.gamma.is_some_and(|g| g.is_zero()) {
                continue;
            }
            let dr = draft(ctx, part, case, n, delta.value, reading);
            if closing_target(ctx, &dr).is_zero() {
                continue;
            }
            if pr.side.is_some_and(|v| v.is_zero()) {
                notes.push(format!(
                    "delta norm {c}: prescribed side condition vanishes but the closing norm does not"
                ));
            }
            let gamma = pr
                .gamma
                .map(|g| smallest_preimage(ctx, case, "gamma", g))
                .transpose()?;
            let epsilon = match pr.epsilon {
                Some(e) if !e.is_zero() => Some(smallest_preimage(ctx, case, "epsilon", e)?),
                _ => None,
            };
            return Ok((
                ChosenScalars {
                    gamma,
                    delta: Some(delta),
                    epsilon,
                },
                notes,
            ));
        }
        return Err(Error::ConstructionFailed {
            case,
            reason: "no norm in GF(q) \\ GF(3) keeps gamma and epsilon nonzero".into(),
        });
    }

    let pr = prescribe(ctx, part, case, n, None)?;
    let delta = pr.delta.map(|t| smallest_preimage(ctx, case, "delta", t)).transpose()?;
    let gamma = pr.gamma.map(|t| smallest_preimage(ctx, case, "gamma", t)).transpose()?;
    let epsilon = match case {
        CaseTag::Char3MinusTwo => {
            let value = ctx.add(part.s(), Element::ONE);
            Some(Scalar {
                value,
                norm: ctx.norm(value),
            })
        }
        _ => pr.epsilon.map(|t| smallest_preimage(ctx, case, "epsilon", t)).transpose()?,
    };
    Ok((ChosenScalars { gamma, delta, epsilon }, notes))
}

/// The closing entry `epsilon` of a column `(0, epsilon)` appended to
/// `partial_rows`: the smallest-encoding element whose norm cancels the
/// second row's self-product.
pub fn solve_closing_column(ctx: &FieldCtx, partial_rows: [&[Element]; 2]) -> Result<Element> {
    let row2 = partial_rows[1];
    let target = ctx.neg(ctx.hermitian_ip(row2, row2)?);
    if target.is_zero() {
        return Err(Error::ClosingImpossible);
    }
    if !ctx.is_in_base(target) {
        return Err(Error::Internal(format!("self-product {target} is outside GF(q)")));
    }
    Ok(ctx.norm_preimages(target)?[0])
}

fn build_case(
    ctx: &FieldCtx,
    part: &StandardPartition,
    case: CaseTag,
    n: usize,
    reading: Reading,
) -> Result<Construction> {
    let (mut scalars, mut notes) = choose_scalars_for(ctx, case, n, part, reading)?;
    let delta = scalars.delta.map_or(Element::ONE, |d| d.value);
    let dr = draft(ctx, part, case, n, delta, reading);

    let lead = match (dr.fixed_lead, scalars.gamma) {
        (Some(v), _) => v,
        (None, Some(g)) => g.value,
        (None, None) => {
            return Err(Error::Internal(format!("case {case} has neither a fixed lead nor gamma")));
        }
    };
    let mut top = vec![lead];
    let mut bottom = vec![Element::ZERO];
    for &(a, b) in &dr.middle {
        top.push(a);
        bottom.push(b);
    }

    if dr.fixed_lead.is_none() {
        let rest = ctx.sum(top[1..].iter().map(|&a| ctx.norm(a)));
        let needed = ctx.neg(rest);
        if scalars.gamma.map(|g| g.norm) != Some(needed) {
            notes.push(format!("gamma norm prescribed {:?}, row 1 needs {needed}", scalars.gamma.map(|g| g.norm.encoding())));
        }
    }

    if dr.closing {
        let eps = solve_closing_column(ctx, [&top, &bottom]).map_err(|e| match e {
            Error::ClosingImpossible => Error::ConstructionFailed {
                case,
                reason: "second row is already self-orthogonal before the closing column".into(),
            },
            other => other,
        })?;
        let solved = Scalar {
            value: eps,
            norm: ctx.norm(eps),
        };
        match scalars.epsilon {
            Some(p) if p.norm == solved.norm => {}
            Some(p) => notes.push(format!(
                "epsilon norm prescribed {}, closing needs {}",
                p.norm, solved.norm
            )),
            None => notes.push(format!("epsilon norm prescribed 0, closing needs {}", solved.norm)),
        }
        if case == CaseTag::Char3MinusTwo {
            if let Some(p) = scalars.epsilon {
                if p.norm == solved.norm && p.value != solved.value {
                    debug!("n = {n}: prescribed epsilon {} has the right norm, using {}", p.value, eps);
                }
            }
        }
        scalars.epsilon = Some(solved);
        top.push(Element::ZERO);
        bottom.push(eps);
    }

    let matrix = GeneratorMatrix::new(top, bottom)?;
    if matrix.n() != n {
        return Err(Error::Internal(format!("case {case} produced {} columns for n = {n}", matrix.n())));
    }
    if !passes_quick(ctx, &matrix) {
        return Err(Error::ConstructionFailed {
            case,
            reason: format!("matrix for n = {n} fails certification"),
        });
    }
    if reading == Reading::Literal {
        notes.push("used the literal alpha^(q-1) entries".into());
    }
    for note in &notes {
        debug!("q = {}, n = {n}, {case}: {note}", ctx.q());
    }
    Ok(Construction {
        matrix,
        case,
        scalars,
        repaired: false,
        notes,
    })
}

/// Entry of the explicit q = 3 tables: a power of the table's primitive
/// element, or zero.
#[derive(Clone, Copy)]
enum T {
    Z,
    P(u8),
}

fn table_rows(n: usize) -> Option<(Vec<T>, Vec<T>)> {
    use T::{P, Z};
    let ones = |k: usize| vec![P(0); k];
    let rows = match n {
        4 => (vec![P(0), P(0), P(0), Z], vec![Z, P(0), P(4), P(0)]),
        5 => (vec![P(0), P(0), P(1), P(1), Z], vec![Z, P(0), P(2), P(3), P(1)]),
        6 => (
            vec![P(0), P(1), P(1), P(1), P(1), Z],
            vec![Z, P(0), P(2), P(4), P(6), P(1)],
        ),
        7 => {
            let mut r1 = ones(6);
            r1.push(Z);
            (r1, vec![Z, P(0), P(1), P(2), P(5), P(7), P(0)])
        }
        8 => (
            vec![P(0), P(0), P(0), P(0), P(0), P(1), P(1), Z],
            vec![Z, P(0), P(4), P(1), P(5), P(0), P(4), P(0)],
        ),
        9 => {
            let mut r2 = vec![Z];
            r2.extend((0..8).map(P));
            (ones(9), r2)
        }
        10 => (
            vec![P(0), P(0), P(0), P(0), P(0), P(0), P(1), P(1), P(1), Z],
            vec![Z, P(0), P(1), P(4), P(6), P(7), P(3), P(4), P(6), P(0)],
        ),
        _ => return None,
    };
    Some(rows)
}

/// The explicit q = 3 matrix for `n`, exactly as tabulated, over `ctx`.
///
/// Table entries are powers of a root of `x^2 + x + 2`; the smallest root
/// in `ctx` stands in for it.
pub fn literal_q3_table(ctx: &FieldCtx, n: usize) -> Result<GeneratorMatrix> {
    if ctx.q() != 3 {
        return Err(Error::Precondition(format!("q = 3 tables need GF(9), got q = {}", ctx.q())));
    }
    let (r1, r2) = table_rows(n).ok_or(Error::IndexError { index: n, max: 10 })?;
    let root = ctx
        .elements()
        .find(|&x| {
            let v = ctx.add(ctx.add(ctx.mul(x, x), x), ctx.from_int(2));
            v.is_zero()
        })
        .ok_or_else(|| Error::Internal("x^2 + x + 2 has no root in GF(9)".into()))?;
    let lift = |t: &T| match *t {
        T::Z => Element::ZERO,
        T::P(e) => ctx.pow(root, e as u64),
    };
    GeneratorMatrix::new(r1.iter().map(lift).collect(), r2.iter().map(lift).collect())
}

/// The q = 3 matrix for `n`: the tabulated one if it certifies, otherwise
/// the closest repaired matrix. The flag reports whether repair was needed.
pub fn small_q3_table(ctx: &FieldCtx, n: usize) -> Result<(GeneratorMatrix, bool)> {
    if !(4..=10).contains(&n) {
        return Err(Error::IndexError { index: n, max: 10 });
    }
    let literal = literal_q3_table(ctx, n)?;
    if passes_quick(ctx, &literal) {
        return Ok((literal, false));
    }
    let config = SearchConfig::repair(2, 0);
    match randomized_repair(ctx, &literal, &config)? {
        Some(fix) => Ok((fix.matrix, true)),
        None => Err(Error::ConstructionFailed {
            case: CaseTag::Q3Table(n),
            reason: "tabulated matrix fails and no repair within 2 edits".into(),
        }),
    }
}
