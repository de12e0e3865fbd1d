//! Arithmetic in GF(q^2) = GF(p^{2r}) and its subfield GF(q).
//!
//! The field is a single polynomial-basis extension GF(p)[x]/(f) of degree
//! 2r, where f is the monic primitive polynomial with the smallest
//! coefficient encoding. Elements are stored by their encoding
//! `c_0 + c_1 p + ... + c_{2r-1} p^{2r-1}`; the class of `x` is the
//! primitive element. Multiplication goes through log/antilog tables and
//! addition through a Zech logarithm table, so every operation is a handful
//! of lookups. GF(q) is not built as a tower: it is the fixed set of the
//! map `y -> y^q`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest number of field elements for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

/// One element of GF(q^2), identified by its coefficient encoding.
///
/// Ordering and equality follow the encoding, which makes every
/// "pick an element" step in the crate deterministic.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Element(u32);

impl Element {
    pub const ZERO: Element = Element(0);
    pub const ONE: Element = Element(1);

    #[inline]
    pub fn encoding(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A fully materialized GF(p^{2r}) with its GF(p^r) subfield.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    p: u32,
    r: u32,
    q: u32,
    order: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    log_neg_one: u32,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds GF(p^{2r}) for an odd prime `p`.
pub fn make_field(p: u32, r: u32) -> Result<FieldCtx> {
    if p == 2 {
        return Err(Error::EvenCharacteristic(p));
    }
    FieldCtx::build(p, r)
}

/// Like [`make_field`] but also accepts `p = 2`. Only the exploratory
/// search uses this; the construction refuses even characteristic.
pub fn make_field_experimental(p: u32, r: u32) -> Result<FieldCtx> {
    FieldCtx::build(p, r)
}

impl FieldCtx {
    fn build(p: u32, r: u32) -> Result<FieldCtx> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::Precondition("extension exponent r must be at least 1".into()));
        }
        let degree = 2 * r;
        let order = (p as u64)
            .checked_pow(degree)
            .filter(|&o| o <= MAX_FIELD_ORDER)
            .ok_or(Error::TooLarge {
                p,
                degree,
                limit: MAX_FIELD_ORDER,
            })? as u32;
        let q = p.pow(r);
        let group = order - 1;
        let d = degree as usize;

        let mut walk = Vec::with_capacity(group as usize);
        // Candidates c_0 + c_1 x + ... + c_{d-1} x^{d-1} + x^d, ascending by
        // the encoding of (c_0, ..., c_{d-1}).
        for code in 0..order {
            if code % p == 0 {
                continue;
            }
            let mut modulus = digits(code, p, d);
            modulus.push(1);
            if traces_full_cycle(&modulus, p, group, &mut walk) {
                let mut log = vec![NO_LOG; order as usize];
                for (i, &e) in walk.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                let zech = walk
                    .iter()
                    .map(|&e| log[plus_one(e, p) as usize])
                    .collect();
                let log_neg_one = log[(p - 1) as usize];
                return Ok(FieldCtx {
                    p,
                    r,
                    q,
                    order,
                    modulus,
                    exp: walk,
                    log,
                    zech,
                    log_neg_one,
                });
            }
        }
        Err(Error::Internal(format!(
            "no primitive polynomial of degree {degree} over GF({p})"
        )))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Size of the base field GF(q).
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Number of elements of GF(q^2).
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Extension degree 2r over GF(p).
    pub fn degree(&self) -> u32 {
        2 * self.r
    }

    /// Coefficients c_0, ..., c_{2r} of the monic defining polynomial.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Order of the multiplicative group, q^2 - 1.
    pub fn group_order(&self) -> u32 {
        self.order - 1
    }

    pub fn element(&self, encoding: u32) -> Result<Element> {
        if encoding < self.order {
            Ok(Element(encoding))
        } else {
            Err(Error::IndexError {
                index: encoding as usize,
                max: self.order as usize - 1,
            })
        }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Element> {
        if coeffs.len() != self.degree() as usize {
            return Err(Error::DimensionMismatch {
                left: coeffs.len(),
                right: self.degree() as usize,
            });
        }
        Ok(Element(encode(coeffs.iter().map(|c| c % self.p), self.p)))
    }

    pub fn coeffs(&self, x: Element) -> Vec<u32> {
        digits(x.0, self.p, self.degree() as usize)
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, value: i64) -> Element {
        Element(value.rem_euclid(self.p as i64) as u32)
    }

    pub fn alpha(&self) -> Element {
        Element(self.exp[1 % self.group_order() as usize])
    }

    /// alpha^i for any integer i.
    pub fn alpha_pow(&self, i: i64) -> Element {
        Element(self.exp[i.rem_euclid(self.group_order() as i64) as usize])
    }

    /// Discrete logarithm to base alpha; `None` for zero.
    pub fn log(&self, x: Element) -> Option<u32> {
        match self.log[x.0 as usize] {
            NO_LOG => None,
            l => Some(l),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.order).map(Element)
    }

    /// GF(q) inside GF(q^2), ascending by encoding.
    pub fn base_field(&self) -> Vec<Element> {
        self.elements().filter(|&x| self.is_in_base(x)).collect()
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let m = self.group_order();
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let diff = if lb >= la { lb - la } else { lb + m - la };
        match self.zech[diff as usize] {
            NO_LOG => Element::ZERO,
            z => Element(self.exp[((la as u64 + z as u64) % m as u64) as usize]),
        }
    }

    #[inline]
    pub fn neg(&self, a: Element) -> Element {
        if a.0 == 0 {
            return a;
        }
        let m = self.group_order() as u64;
        let l = (self.log[a.0 as usize] as u64 + self.log_neg_one as u64) % m;
        Element(self.exp[l as usize])
    }

    #[inline]
    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        if a.0 == 0 || b.0 == 0 {
            return Element::ZERO;
        }
        let m = self.group_order() as u64;
        let l = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % m;
        Element(self.exp[l as usize])
    }

    pub fn inv(&self, a: Element) -> Result<Element> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let m = self.group_order();
        Ok(Element(self.exp[((m - self.log[a.0 as usize]) % m) as usize]))
    }

    pub fn div(&self, a: Element, b: Element) -> Result<Element> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Square-and-multiply with the exponent reduced modulo q^2 - 1.
    /// `pow(0, 0)` is 1.
    pub fn pow(&self, base: Element, exponent: u64) -> Element {
        if exponent == 0 {
            return Element::ONE;
        }
        if base.is_zero() {
            return Element::ZERO;
        }
        let mut e = exponent % self.group_order() as u64;
        let mut acc = Element::ONE;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    /// Conjugation x -> x^q.
    #[inline]
    pub fn conj(&self, x: Element) -> Element {
        self.pow(x, self.q as u64)
    }

    /// Norm x -> x^{q+1}, always in GF(q).
    #[inline]
    pub fn norm(&self, x: Element) -> Element {
        self.pow(x, self.q as u64 + 1)
    }

    pub fn is_in_base(&self, x: Element) -> bool {
        self.conj(x) == x
    }

    /// All q + 1 elements whose norm is `beta`, ascending by encoding.
    pub fn norm_preimages(&self, beta: Element) -> Result<Vec<Element>> {
        if beta.is_zero() || !self.is_in_base(beta) {
            return Err(Error::BadNormTarget(beta.0));
        }
        let q = self.q as i64;
        let l = self.log[beta.0 as usize] as i64;
        // beta = (alpha^{q+1})^i, and the fibre is alpha^{i + (q-1) j}.
        if l % (q + 1) != 0 {
            return Err(Error::Internal(format!(
                "base-field element {beta} has log {l} not divisible by q + 1"
            )));
        }
        let i = l / (q + 1);
        let mut out: Vec<Element> = (0..=q).map(|j| self.alpha_pow(i + (q - 1) * j)).collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Hermitian inner product sum x_i * y_i^q.
    pub fn hermitian_ip(&self, x: &[Element], y: &[Element]) -> Result<Element> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        Ok(x.iter()
            .zip(y)
            .fold(Element::ZERO, |acc, (&a, &b)| self.add(acc, self.mul(a, self.conj(b)))))
    }

    /// Sum of a sequence of elements.
    pub fn sum<I: IntoIterator<Item = Element>>(&self, items: I) -> Element {
        items.into_iter().fold(Element::ZERO, |acc, x| self.add(acc, x))
    }

    /// "a^k" form, or "0".
    pub fn fmt_power(&self, x: Element) -> String {
        match self.log(x) {
            None => "0".to_string(),
            Some(k) => format!("a^{k}"),
        }
    }

    /// "c0+c1*x+c2*x^2" form with zero terms dropped.
    pub fn fmt_poly(&self, x: Element) -> String {
        let terms: Vec<String> = self
            .coeffs(x)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

fn digits(mut value: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(value % p);
        value /= p;
    }
    out
}

fn encode<I: IntoIterator<Item = u32>>(coeffs: I, p: u32) -> u32 {
    let coeffs: Vec<u32> = coeffs.into_iter().collect();
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn plus_one(encoding: u32, p: u32) -> u32 {
    if encoding % p == p - 1 {
        encoding - (p - 1)
    } else {
        encoding + 1
    }
}

/// Walks 1, x, x^2, ... modulo `modulus` and reports whether x has order
/// exactly `group`. A full cycle means every nonzero residue is a power of
/// x, so the quotient ring is a field and x is primitive. On success `walk`
/// holds the antilog table.
fn traces_full_cycle(modulus: &[u32], p: u32, group: u32, walk: &mut Vec<u32>) -> bool {
    let d = modulus.len() - 1;
    walk.clear();
    let mut cur = vec![0u32; d];
    cur[0] = 1;
    for step in 0..group {
        let enc = encode(cur.iter().copied(), p);
        if step > 0 && enc == 1 {
            return false;
        }
        walk.push(enc);
        let top = cur[d - 1];
        for i in (1..d).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for (c, &m) in cur.iter_mut().zip(modulus) {
                *c = (*c + p - (top * m) % p) % p;
            }
        }
    }
    cur.iter().enumerate().all(|(i, &c)| c == u32::from(i == 0))
}
