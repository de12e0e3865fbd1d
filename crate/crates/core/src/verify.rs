//! Certification of 2-row generator matrices: Hermitian self-orthogonality,
//! rank, minimum distance (by projective column multiplicities, with a
//! brute-force codeword oracle alongside), dual distance, purity, and the
//! resulting quantum code parameters.

use std::collections::HashMap;

use serde::Serialize;

use crate::construct::GeneratorMatrix;
use crate::error::{Error, Result};
use crate::gf::{Element, FieldCtx};

/// Upper bound on the number of codewords `brute_min_distance` enumerates.
pub const BRUTE_CODEWORD_CAP: u64 = 10_000_000;

/// `certify` only runs the codeword oracle when `q^4 * n` stays below this.
pub const ORACLE_WORK_CAP: u64 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Purity {
    Pure,
    Impure,
    /// n = 4 gives k = 0; the distance convention is reported, not decided.
    ZeroDimSpecial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuantumParams {
    pub n: usize,
    pub k: i64,
    pub d: usize,
    pub q: u32,
    pub mds: bool,
}

impl std::fmt::Display for QuantumParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{}, {}, {}]]_{}", self.n, self.k, self.d, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleAgreement {
    Agree,
    Disagree,
    Skipped,
}

impl OracleAgreement {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleAgreement::Agree => "true",
            OracleAgreement::Disagree => "false",
            OracleAgreement::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeCertificate {
    pub p: u32,
    pub r: u32,
    pub q: u32,
    pub n: usize,
    pub self_orthogonal: bool,
    pub rank: usize,
    pub min_distance: Option<usize>,
    pub dual_distance: Option<u8>,
    pub purity: Option<Purity>,
    pub quantum: Option<QuantumParams>,
    pub oracle: OracleAgreement,
}

impl CodeCertificate {
    pub fn passes(&self) -> bool {
        self.self_orthogonal
            && self.rank == 2
            && self.min_distance == Some(self.n.wrapping_sub(1))
            && self.dual_distance == Some(3)
            && self.oracle != OracleAgreement::Disagree
    }
}

pub fn check_self_orthogonal(ctx: &FieldCtx, m: &GeneratorMatrix) -> bool {
    let [r1, r2] = m.rows();
    let ip = |x: &[Element], y: &[Element]| ctx.hermitian_ip(x, y).map(Element::is_zero);
    matches!(
        (ip(r1, r1), ip(r1, r2), ip(r2, r2)),
        (Ok(true), Ok(true), Ok(true))
    )
}

fn det(ctx: &FieldCtx, a: (Element, Element), b: (Element, Element)) -> Element {
    ctx.sub(ctx.mul(a.0, b.1), ctx.mul(a.1, b.0))
}

pub fn rank(ctx: &FieldCtx, m: &GeneratorMatrix) -> usize {
    let Some(pivot) = m.columns().find(|&(a, b)| !(a.is_zero() && b.is_zero())) else {
        return 0;
    };
    if m.columns().any(|c| !det(ctx, pivot, c).is_zero()) {
        2
    } else {
        1
    }
}

/// Projective representative: first nonzero entry scaled to 1.
pub fn normalize_column(ctx: &FieldCtx, (a, b): (Element, Element)) -> Option<(Element, Element)> {
    if !a.is_zero() {
        let inv = ctx.inv(a).ok()?;
        Some((Element::ONE, ctx.mul(b, inv)))
    } else if !b.is_zero() {
        Some((Element::ZERO, Element::ONE))
    } else {
        None
    }
}

/// Zero-column count and the largest projective point multiplicity.
fn column_profile(ctx: &FieldCtx, m: &GeneratorMatrix) -> (usize, usize) {
    let mut zeros = 0;
    let mut mult: HashMap<(Element, Element), usize> = HashMap::new();
    for c in m.columns() {
        match normalize_column(ctx, c) {
            None => zeros += 1,
            Some(point) => *mult.entry(point).or_default() += 1,
        }
    }
    (zeros, mult.values().copied().max().unwrap_or(0))
}

/// Minimum distance of the row space.
///
/// The codewords vanishing at a nonzero column form a single projective
/// class, so the lightest codeword misses the zero columns plus the most
/// populated projective point.
pub fn min_distance(ctx: &FieldCtx, m: &GeneratorMatrix) -> Result<usize> {
    let rk = rank(ctx, m);
    if rk < 2 {
        return Err(Error::RankDeficient(rk));
    }
    let (zeros, max_mult) = column_profile(ctx, m);
    Ok(m.n() - zeros - max_mult)
}

/// Minimum weight over the nonzero codewords, found by enumerating every message.
pub fn brute_min_distance(ctx: &FieldCtx, m: &GeneratorMatrix) -> Result<usize> {
    let words = ctx.order() as u64 * ctx.order() as u64;
    if words > BRUTE_CODEWORD_CAP {
        return Err(Error::TooLargeForOracle {
            work: words,
            cap: BRUTE_CODEWORD_CAP,
        });
    }
    let [r1, r2] = m.rows();
    let mut best = usize::MAX;
    let mut scaled = vec![Element::ZERO; m.n()];
    for a in ctx.elements() {
        for (s, &x) in scaled.iter_mut().zip(r1) {
            *s = ctx.mul(a, x);
        }
        for b in ctx.elements() {
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let weight = scaled
                .iter()
                .zip(r2)
                .filter(|&(&s, &y)| !ctx.add(s, ctx.mul(b, y)).is_zero())
                .count();
            if weight > 0 {
                best = best.min(weight);
            }
        }
    }
    Ok(if best == usize::MAX { 0 } else { best })
}

/// Minimum distance of the Hermitian dual, capped at 3.
pub fn dual_distance(ctx: &FieldCtx, m: &GeneratorMatrix) -> Result<u8> {
    if m.n() < 3 {
        return Err(Error::TooShort(m.n()));
    }
    let (zeros, max_mult) = column_profile(ctx, m);
    Ok(if zeros > 0 {
        1
    } else if max_mult > 1 {
        2
    } else {
        3
    })
}

/// Dual distance found by enumerating every weight-1 and weight-2 word and
/// testing Hermitian orthogonality to both rows. Returns 3 when neither
/// weight occurs.
pub fn brute_dual_distance(ctx: &FieldCtx, m: &GeneratorMatrix) -> u8 {
    let [r1, r2] = m.rows();
    let n = m.n();
    let nonzero: Vec<Element> = ctx.elements().skip(1).collect();
    let cr1: Vec<Element> = r1.iter().map(|&x| ctx.conj(x)).collect();
    let cr2: Vec<Element> = r2.iter().map(|&x| ctx.conj(x)).collect();
    for i in 0..n {
        for &l in &nonzero {
            if ctx.mul(l, cr1[i]).is_zero() && ctx.mul(l, cr2[i]).is_zero() {
                return 1;
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for &l in &nonzero {
                for &mu in &nonzero {
                    let s1 = ctx.add(ctx.mul(l, cr1[i]), ctx.mul(mu, cr1[j]));
                    let s2 = ctx.add(ctx.mul(l, cr2[i]), ctx.mul(mu, cr2[j]));
                    if s1.is_zero() && s2.is_zero() {
                        return 2;
                    }
                }
            }
        }
    }
    3
}

/// Whether `word` lies in the row space of a rank-2 matrix.
fn in_row_space(ctx: &FieldCtx, m: &GeneratorMatrix, word: &[Element]) -> bool {
    let cols: Vec<(Element, Element)> = m.columns().collect();
    let Some(i) = cols.iter().position(|&(a, b)| !(a.is_zero() && b.is_zero())) else {
        return word.iter().all(|w| w.is_zero());
    };
    let Some(j) = (0..cols.len()).find(|&j| !det(ctx, cols[i], cols[j]).is_zero()) else {
        return false;
    };
    // Solve a * col_i.0 + b * col_i.1 = w_i, and likewise at j.
    let d = det(ctx, cols[i], cols[j]);
    let Ok(dinv) = ctx.inv(d) else { return false };
    let a = ctx.mul(
        ctx.sub(ctx.mul(word[i], cols[j].1), ctx.mul(word[j], cols[i].1)),
        dinv,
    );
    let b = ctx.mul(
        ctx.sub(ctx.mul(cols[i].0, word[j]), ctx.mul(cols[j].0, word[i])),
        dinv,
    );
    cols.iter()
        .zip(word)
        .all(|(&(x, y), &w)| ctx.add(ctx.mul(a, x), ctx.mul(b, y)) == w)
}

/// A weight-3 word of the Hermitian dual supported on columns `i, j, k`.
fn dual_word_on(ctx: &FieldCtx, m: &GeneratorMatrix, idx: [usize; 3]) -> Option<Vec<Element>> {
    let cols: Vec<(Element, Element)> = m.columns().collect();
    let c = idx.map(|t| (ctx.conj(cols[t].0), ctx.conj(cols[t].1)));
    let coeffs = [det(ctx, c[1], c[2]), ctx.neg(det(ctx, c[0], c[2])), det(ctx, c[0], c[1])];
    if coeffs.iter().any(|x| x.is_zero()) {
        return None;
    }
    let mut word = vec![Element::ZERO; m.n()];
    for (t, &x) in idx.iter().zip(&coeffs) {
        word[*t] = x;
    }
    Some(word)
}

pub fn purity_check(ctx: &FieldCtx, m: &GeneratorMatrix) -> Purity {
    let n = m.n();
    if n == 4 {
        return Purity::ZeroDimSpecial;
    }
    for j in 1..n {
        for k in j + 1..n {
            if let Some(word) = dual_word_on(ctx, m, [0, j, k]) {
                if !in_row_space(ctx, m, &word) {
                    return Purity::Pure;
                }
            }
        }
    }
    Purity::Impure
}

/// Runs every check and records the verdicts; never fails.
pub fn certify(ctx: &FieldCtx, m: &GeneratorMatrix) -> CodeCertificate {
    let n = m.n();
    let self_orthogonal = check_self_orthogonal(ctx, m);
    let rank = rank(ctx, m);
    let min_distance = min_distance(ctx, m).ok();
    let dual_distance = dual_distance(ctx, m).ok();

    let work = (ctx.order() as u64).pow(2) * n as u64;
    let oracle = match min_distance {
        Some(d) if work <= ORACLE_WORK_CAP => match brute_min_distance(ctx, m) {
            Ok(b) if b == d => OracleAgreement::Agree,
            Ok(_) => OracleAgreement::Disagree,
            Err(_) => OracleAgreement::Skipped,
        },
        _ => OracleAgreement::Skipped,
    };

    let mut cert = CodeCertificate {
        p: ctx.p(),
        r: ctx.r(),
        q: ctx.q(),
        n,
        self_orthogonal,
        rank,
        min_distance,
        dual_distance,
        purity: None,
        quantum: None,
        oracle,
    };
    if cert.passes() {
        cert.purity = Some(purity_check(ctx, m));
        cert.quantum = derive_quantum(&cert).ok();
    }
    cert
}

/// Cheap pass/fail without the oracle; used inside search loops.
pub fn passes_quick(ctx: &FieldCtx, m: &GeneratorMatrix) -> bool {
    m.n() >= 3
        && check_self_orthogonal(ctx, m)
        && rank(ctx, m) == 2
        && min_distance(ctx, m).ok() == Some(m.n() - 1)
        && dual_distance(ctx, m).ok() == Some(3)
}

/// Quantum parameters of the stabilizer code from the dual of a passing
/// code: `[[n, n - 4, 3]]_q`, checked against the quantum Singleton bound.
pub fn derive_quantum(cert: &CodeCertificate) -> Result<QuantumParams> {
    if !cert.passes() {
        return Err(Error::NotCertified);
    }
    let n = cert.n as i64;
    let d = cert.dual_distance.unwrap_or(0) as i64;
    // The dual has dimension n - 2 and contains its own dual.
    let k = 2 * (n - 2) - n;
    let bound = n - 2 * d + 2;
    if k > bound {
        return Err(Error::Internal(format!("k = {k} exceeds the Singleton bound {bound}")));
    }
    Ok(QuantumParams {
        n: cert.n,
        k,
        d: d as usize,
        q: cert.q,
        mds: k == bound,
    })
}
