//! Monomials and elements of free graded-commutative algebras.
//!
//! A monomial is a sparse exponent vector over the presentation's generators,
//! kept in generator order; the coefficient of a stored term absorbs every
//! Koszul sign produced by sorting. Odd generators square to zero and only
//! invertible generators may carry negative exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::scalar::{self, Scalar};

/// Canonical sparse monomial: `(generator index, exponent)` pairs, sorted by
/// index, exponents non-zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exps: Vec<(u32, i64)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn generator(idx: usize) -> Self {
        Monomial {
            exps: vec![(idx as u32, 1)],
        }
    }

    pub fn from_exps(mut exps: Vec<(u32, i64)>) -> Self {
        exps.retain(|&(_, e)| e != 0);
        exps.sort_by_key(|&(i, _)| i);
        Monomial { exps }
    }

    pub fn exps(&self) -> &[(u32, i64)] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, idx: usize) -> i64 {
        self.exps
            .iter()
            .find(|&&(i, _)| i as usize == idx)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    /// Same monomial with the exponent of `idx` replaced (dropped when 0).
    pub fn with_exponent(&self, idx: usize, exp: i64) -> Monomial {
        let mut exps: Vec<(u32, i64)> = self
            .exps
            .iter()
            .copied()
            .filter(|&(i, _)| i as usize != idx)
            .collect();
        if exp != 0 {
            exps.push((idx as u32, exp));
        }
        Monomial::from_exps(exps)
    }

    pub fn degree(&self, pres: &Presentation) -> i64 {
        self.exps
            .iter()
            .map(|&(i, e)| e * pres.gen_spec(i as usize).degree)
            .sum()
    }

    pub fn weight(&self, pres: &Presentation) -> i64 {
        self.exps
            .iter()
            .map(|&(i, e)| e * pres.gen_spec(i as usize).weight)
            .sum()
    }

    /// Exponent constraints: odd generators in {0,1}, negative exponents only
    /// on invertible generators.
    pub fn is_valid(&self, pres: &Presentation) -> bool {
        self.exps.iter().all(|&(i, e)| {
            let g = pres.gen_spec(i as usize);
            if g.is_odd() {
                e == 1
            } else if e < 0 {
                g.invertible
            } else {
                true
            }
        })
    }

    /// Graded-commutative product of two canonical monomials. Returns the
    /// canonical product and the Koszul sign, or `None` when the product
    /// vanishes (an odd generator squares).
    pub fn mul(&self, other: &Monomial, pres: &Presentation) -> Option<(Monomial, i64)> {
        // Koszul sign: every odd factor of `other` moves left past every odd
        // factor of `self` with a strictly larger generator index.
        let odd_self: Vec<u32> = self
            .exps
            .iter()
            .filter(|&&(i, _)| pres.gen_spec(i as usize).is_odd())
            .map(|&(i, _)| i)
            .collect();
        let odd_other: Vec<u32> = other
            .exps
            .iter()
            .filter(|&&(i, _)| pres.gen_spec(i as usize).is_odd())
            .map(|&(i, _)| i)
            .collect();
        let mut inversions: i64 = 0;
        for &j in &odd_other {
            if odd_self.binary_search(&j).is_ok() {
                return None; // odd square
            }
            inversions += odd_self.iter().filter(|&&i| i > j).count() as i64;
        }

        let mut exps: Vec<(u32, i64)> = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut a, mut b) = (self.exps.iter().peekable(), other.exps.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(i, e)), Some(&&(j, f))) => {
                    if i < j {
                        exps.push((i, e));
                        a.next();
                    } else if j < i {
                        exps.push((j, f));
                        b.next();
                    } else {
                        if e + f != 0 {
                            exps.push((i, e + f));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some(&&(i, e)), None) => {
                    exps.push((i, e));
                    a.next();
                }
                (None, Some(&&(j, f))) => {
                    exps.push((j, f));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Some((Monomial { exps }, if inversions % 2 == 0 { 1 } else { -1 }))
    }
}

/// Whether an element is zero, homogeneous of a single (degree, weight), or a
/// mix of several bidegrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bidegree {
    Zero,
    Homogeneous { degree: i64, weight: i64 },
    Mixed,
}

/// Three-valued unit verdict; `Yes` carries the exact inverse as witness.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitVerdict {
    Yes(Element),
    No,
    Unknown,
}

/// A finite Q-linear combination of canonical monomials.
#[derive(Debug, Clone)]
pub struct Element {
    pres: Arc<Presentation>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        Presentation::same(&self.pres, &other.pres) && self.terms == other.terms
    }
}

impl Eq for Element {}

impl Element {
    pub fn zero(pres: &Arc<Presentation>) -> Self {
        Element {
            pres: Arc::clone(pres),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(pres: &Arc<Presentation>) -> Self {
        Element::scalar(pres, scalar::one())
    }

    pub fn scalar(pres: &Arc<Presentation>, c: Scalar) -> Self {
        let mut e = Element::zero(pres);
        e.add_term(Monomial::one(), c);
        e
    }

    pub fn generator(pres: &Arc<Presentation>, name: &str) -> Result<Self> {
        let idx = pres.lookup(name)?;
        let mut e = Element::zero(pres);
        e.add_term(Monomial::generator(idx), scalar::one());
        Ok(e)
    }

    pub fn from_terms(
        pres: &Arc<Presentation>,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Self {
        let mut e = Element::zero(pres);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * m`, keeping the canonical form (no zero coefficients, weight
    /// truncation applied).
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert!(m.is_valid(&self.pres), "invalid monomial for presentation");
        if let Some(bound) = self.pres.weight_truncation() {
            if m.weight(&self.pres) > bound {
                return;
            }
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Re-normalizes in place; idempotent by construction since `add_term`
    /// already maintains the invariants.
    pub fn canonicalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if Presentation::same(&self.pres, &other.pres) {
            Ok(())
        } else {
            Err(Error::MixedPresentation(format!(
                "{} generators vs {} generators",
                self.pres.len(),
                other.pres.len()
            )))
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        let mut out = Element::zero(&self.pres);
        for (m, c) in self.terms.iter() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        let mut out = Element::zero(&self.pres);
        for (m, k) in self.terms.iter() {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    /// Graded-commutative product with Koszul signs.
    pub fn try_mul(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let mut out = Element::zero(&self.pres);
        for (m, c) in self.terms.iter() {
            for (n, d) in other.terms.iter() {
                if let Some((prod, sign)) = m.mul(n, &self.pres) {
                    out.add_term(prod, c * d * scalar::int(sign));
                }
            }
        }
        Ok(out)
    }

    /// Product that panics on mixed presentations; use `try_mul` when the
    /// operands may come from different algebras.
    pub fn mul(&self, other: &Element) -> Element {
        self.try_mul(other).expect("mixed presentations")
    }

    /// Integer power. Negative powers require the base to be a unit.
    pub fn pow(&self, k: i64) -> Result<Element> {
        if k < 0 {
            match self.is_unit()? {
                UnitVerdict::Yes(inv) => return inv.pow(-k),
                _ => {
                    return Err(Error::Validation(format!(
                        "cannot raise non-unit `{self}` to power {k}"
                    )))
                }
            }
        }
        let mut out = Element::one(&self.pres);
        for _ in 0..k {
            out = out.mul(self);
        }
        Ok(out)
    }

    pub fn bidegree(&self) -> Bidegree {
        let mut seen: Option<(i64, i64)> = None;
        for (m, _) in self.terms.iter() {
            let bd = (m.degree(&self.pres), m.weight(&self.pres));
            match seen {
                None => seen = Some(bd),
                Some(prev) if prev == bd => {}
                Some(_) => return Bidegree::Mixed,
            }
        }
        match seen {
            None => Bidegree::Zero,
            Some((degree, weight)) => Bidegree::Homogeneous { degree, weight },
        }
    }

    /// Cochain degree when homogeneous and non-zero.
    pub fn cochain_degree(&self) -> Option<i64> {
        match self.bidegree() {
            Bidegree::Homogeneous { degree, .. } => Some(degree),
            _ => None,
        }
    }

    /// True for zero or homogeneous of exactly this bidegree.
    pub fn is_homogeneous(&self, degree: i64, weight: i64) -> bool {
        match self.bidegree() {
            Bidegree::Zero => true,
            Bidegree::Homogeneous {
                degree: d,
                weight: w,
            } => d == degree && w == weight,
            Bidegree::Mixed => false,
        }
    }

    /// The sub-sum of monomials with the given cochain degree and weight.
    pub fn homogeneous_part(&self, degree: i64, weight: i64) -> Element {
        let mut out = Element::zero(&self.pres);
        for (m, c) in self.terms.iter() {
            if m.degree(&self.pres) == degree && m.weight(&self.pres) == weight {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// The sub-sum of monomials of the given cochain degree, all weights.
    pub fn degree_part(&self, degree: i64) -> Element {
        let mut out = Element::zero(&self.pres);
        for (m, c) in self.terms.iter() {
            if m.degree(&self.pres) == degree {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Splits into homogeneous components, indexed by (degree, weight).
    pub fn components(&self) -> BTreeMap<(i64, i64), Element> {
        let mut out: BTreeMap<(i64, i64), Element> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let key = (m.degree(&self.pres), m.weight(&self.pres));
            out.entry(key)
                .or_insert_with(|| Element::zero(&self.pres))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Graded augmentation to degree 0: kills every monomial containing a
    /// positive-degree generator.
    pub fn augment_degree0(&self) -> Element {
        self.degree_part(0)
    }

    /// Unit test for degree-0 elements of a localized polynomial ring.
    ///
    /// `Yes` iff the element is a non-zero scalar times a monomial in
    /// inverted generators (with the exact inverse as witness). Everything
    /// else in such a ring is a non-unit, so the answer is `No`; `Unknown` is
    /// reserved for presentations outside that shape (weight-truncated rings,
    /// where nilpotents shift the unit group).
    pub fn is_unit(&self) -> Result<UnitVerdict> {
        match self.bidegree() {
            Bidegree::Zero => return Ok(UnitVerdict::No),
            Bidegree::Homogeneous { degree: 0, .. } => {}
            Bidegree::Homogeneous { degree, .. } => {
                return Err(Error::PositiveDegreeInput(degree))
            }
            Bidegree::Mixed => {
                let max_degree = self
                    .terms
                    .keys()
                    .map(|m| m.degree(&self.pres))
                    .max()
                    .unwrap_or(0);
                if max_degree > 0 {
                    return Err(Error::PositiveDegreeInput(max_degree));
                }
            }
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let all_inverted = m
                .exps()
                .iter()
                .all(|&(i, _)| self.pres.gen_spec(i as usize).invertible);
            if all_inverted {
                let inv_mono =
                    Monomial::from_exps(m.exps().iter().map(|&(i, e)| (i, -e)).collect());
                let inv = Element::from_terms(
                    &self.pres,
                    [(inv_mono, Scalar::one() / c.clone())],
                );
                return Ok(UnitVerdict::Yes(inv));
            }
        }
        if self.pres.weight_truncation().is_some() {
            // 1 + nilpotent is a unit; we do not classify those.
            return Ok(UnitVerdict::Unknown);
        }
        Ok(UnitVerdict::No)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter() {
            let neg = scalar::is_negative(c);
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(scalar::render(&abs));
            }
            for &(i, e) in m.exps() {
                let name = &self.pres.gen_spec(i as usize).name;
                if e == 1 {
                    factors.push(name.clone());
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", factors.join(" * "))?;
        }
        Ok(())
    }
}

/// Parse an element from a signed sum of monomial strings, e.g.
/// `3/2 * x^2 * e1v - t^-1 * dt`. Errors carry the byte position.
pub fn parse_element(pres: &Arc<Presentation>, text: &str) -> Result<Element> {
    Parser {
        pres,
        text,
        bytes: text.as_bytes(),
        pos: 0,
    }
    .parse()
}

struct Parser<'a> {
    pres: &'a Arc<Presentation>,
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Element> {
        let mut out = Element::zero(self.pres);
        self.skip_ws();
        if self.pos == self.bytes.len() {
            return Err(Error::parse(self.pos, "empty element"));
        }
        let mut sign = 1i64;
        if self.peek() == Some(b'-') {
            sign = -1;
            self.pos += 1;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        loop {
            let term = self.term()?;
            out = out.add(&term.scale(&scalar::int(sign)))?;
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => {
                    sign = 1;
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -1;
                    self.pos += 1;
                }
                Some(c) => {
                    return Err(Error::parse(
                        self.pos,
                        format!("expected `+`, `-` or end of input, found `{}`", c as char),
                    ))
                }
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Element> {
        let mut value = Element::one(self.pres);
        loop {
            self.skip_ws();
            let factor = self.factor()?;
            value = value.try_mul(&factor)?;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok(value);
            }
        }
    }

    fn factor(&mut self) -> Result<Element> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self
                    .peek()
                    .map(|c| c.is_ascii_digit() || c == b'/')
                    .unwrap_or(false)
                {
                    self.pos += 1;
                }
                let c = scalar::parse(&self.text[start..self.pos])
                    .map_err(|_| Error::parse(start, "bad rational literal"))?;
                Ok(Element::scalar(self.pres, c))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .peek()
                    .map(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'')
                    .unwrap_or(false)
                {
                    self.pos += 1;
                }
                let name = &self.text[start..self.pos];
                let idx = self
                    .pres
                    .lookup(name)
                    .map_err(|_| Error::parse(start, format!("unknown generator `{name}`")))?;
                let mut exp = 1i64;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let estart = self.pos;
                    if self.peek() == Some(b'-') {
                        self.pos += 1;
                    }
                    while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                        self.pos += 1;
                    }
                    exp = self.text[estart..self.pos]
                        .parse()
                        .map_err(|_| Error::parse(estart, "bad exponent"))?;
                }
                let g = self.pres.gen_spec(idx);
                if exp < 0 && !g.invertible {
                    return Err(Error::parse(
                        start,
                        format!("negative exponent on non-invertible generator `{name}`"),
                    ));
                }
                if g.is_odd() && exp > 1 {
                    // odd square: the factor is zero
                    return Ok(Element::zero(self.pres));
                }
                if exp == 0 {
                    return Ok(Element::one(self.pres));
                }
                Ok(Element::from_terms(
                    self.pres,
                    [(
                        Monomial::from_exps(vec![(idx as u32, exp)]),
                        scalar::one(),
                    )],
                ))
            }
            Some(c) => Err(Error::parse(
                self.pos,
                format!("unexpected character `{}`", c as char),
            )),
            None => Err(Error::parse(self.pos, "unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::GeneratorSpec;

    fn pres() -> Arc<Presentation> {
        Presentation::new(vec![
            GeneratorSpec::new("x", 0, 1),
            GeneratorSpec::new("xi", 1, 1),
            GeneratorSpec::new("eta", 1, 1),
            GeneratorSpec::invertible("t", 1),
        ])
        .unwrap()
    }

    #[test]
    fn even_square() {
        let p = pres();
        let x = Element::generator(&p, "x").unwrap();
        let x2 = x.mul(&x);
        assert_eq!(x2, parse_element(&p, "x^2").unwrap());
    }

    #[test]
    fn koszul_sign_and_odd_square() {
        let p = pres();
        let xi = Element::generator(&p, "xi").unwrap();
        let eta = Element::generator(&p, "eta").unwrap();
        assert_eq!(xi.mul(&eta), eta.mul(&xi).neg());
        assert!(xi.mul(&xi).is_zero());
    }

    #[test]
    fn laurent_inverse() {
        let p = pres();
        let t = Element::generator(&p, "t").unwrap();
        let tinv = t.pow(-1).unwrap();
        assert_eq!(t.mul(&tinv), Element::one(&p));
    }

    #[test]
    fn homogeneous_part_picks_component() {
        let p = pres();
        let e = parse_element(&p, "x + xi").unwrap();
        assert_eq!(
            e.homogeneous_part(0, 1),
            Element::generator(&p, "x").unwrap()
        );
        assert_eq!(Element::zero(&p).homogeneous_part(2, 2), Element::zero(&p));
        let f = parse_element(&p, "x * xi + x^2").unwrap();
        assert_eq!(
            f.homogeneous_part(1, 2),
            parse_element(&p, "x * xi").unwrap()
        );
    }

    #[test]
    fn unit_verdicts() {
        let p = pres();
        let three = Element::scalar(&p, scalar::int(3));
        assert!(matches!(three.is_unit().unwrap(), UnitVerdict::Yes(_)));

        let t = Element::generator(&p, "t").unwrap();
        match t.is_unit().unwrap() {
            UnitVerdict::Yes(inv) => assert_eq!(inv, t.pow(-1).unwrap()),
            v => panic!("expected Yes, got {v:?}"),
        }

        let one_plus_x = parse_element(&p, "1 + x").unwrap();
        assert_eq!(one_plus_x.is_unit().unwrap(), UnitVerdict::No);
        assert_eq!(Element::zero(&p).is_unit().unwrap(), UnitVerdict::No);

        let xi = Element::generator(&p, "xi").unwrap();
        assert!(xi.is_unit().is_err());
    }

    #[test]
    fn parse_round_trip() {
        let p = pres();
        let e = parse_element(&p, "3/2 * x^2 * xi - t^-1 + 2").unwrap();
        let rendered = e.to_string();
        assert_eq!(parse_element(&p, &rendered).unwrap(), e);
    }

    #[test]
    fn parse_errors_carry_position() {
        let p = pres();
        match parse_element(&p, "x + zz") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn mixed_presentation_rejected() {
        let p = pres();
        let q = Presentation::new(vec![GeneratorSpec::new("y", 0, 1)]).unwrap();
        let x = Element::generator(&p, "x").unwrap();
        let y = Element::generator(&q, "y").unwrap();
        assert!(matches!(x.try_mul(&y), Err(Error::MixedPresentation(_))));
    }

    #[test]
    fn weight_truncation_kills_high_weight() {
        let p = Presentation::truncated(vec![GeneratorSpec::new("eps", 0, 1)], 1).unwrap();
        let eps = Element::generator(&p, "eps").unwrap();
        assert!(eps.mul(&eps).is_zero());
        assert!(!eps.is_zero());
    }
}
