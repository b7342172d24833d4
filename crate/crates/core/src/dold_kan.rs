//! Cosimplicial denormalisation of a CDGA.
//!
//! Level n of the denormalisation is the formal sum of terms `(J, a)` with
//! `J` a sorted subset of {1..n} and `a` homogeneous of cochain degree
//! `n - |J|`; the term stands for the iterated coface word indexed by `J`
//! applied to `a`. Cofaces and codegeneracies are evaluated by composing
//! monotone maps, which is the closed form of the rewriting by the three
//! cosimplicial identities; the coface 0 is eliminated eagerly through the
//! relation `d^0 v = d v - sum_{i>=1} (-1)^i d^i v`, so index 0 never appears
//! in stored data. The shuffle product is the Eilenberg-Zilber formula on
//! this basis.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cdga::Cdga;
use crate::element::{Element, Monomial};
use crate::error::{Error, Result};
use crate::linalg::{same_span, QMatrix};
use crate::report::{VerificationReport, Witness};
use crate::scalar::{self, Scalar};
use num_traits::Zero;

/// An element of the denormalised level n.
#[derive(Debug, Clone, PartialEq)]
pub struct DLevelElement {
    level: usize,
    terms: BTreeMap<Vec<u32>, Element>,
}

impl DLevelElement {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Element)> {
        self.terms.iter()
    }

    fn insert(&mut self, subset: Vec<u32>, value: Element) {
        if value.is_zero() {
            return;
        }
        match self.terms.entry(subset) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&value).expect("same presentation");
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &DLevelElement) -> Result<DLevelElement> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let mut out = self.clone();
        for (j, a) in other.terms.iter() {
            out.insert(j.clone(), a.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> DLevelElement {
        let mut out = DLevelElement {
            level: self.level,
            terms: BTreeMap::new(),
        };
        for (j, a) in self.terms.iter() {
            out.insert(j.clone(), a.scale(c));
        }
        out
    }

    pub fn neg(&self) -> DLevelElement {
        self.scale(&-scalar::one())
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (j, a) in self.terms.iter() {
            if j.is_empty() {
                parts.push(format!("({a})"));
            } else {
                let word: Vec<String> = j.iter().rev().map(|i| format!("d^{i}")).collect();
                parts.push(format!("{} ({a})", word.join(" ")));
            }
        }
        parts.join(" + ")
    }
}

/// The `x`-th element of `{0..top}` minus `missing` (all sorted).
fn complement_element(missing: &[u32], x: u32, top: u32) -> u32 {
    let mut seen = 0u32;
    for v in 0..=top {
        if missing.binary_search(&v).is_err() {
            if seen == x {
                return v;
            }
            seen += 1;
        }
    }
    unreachable!("index {x} out of complement range for top {top}")
}

/// Missing set of the composite of two monotone injections, each given by its
/// missing set; `outer` misses indices in `{0..top}`.
fn compose_missing(outer: &[u32], inner: &[u32], top: u32) -> Vec<u32> {
    let mut out: Vec<u32> = outer.to_vec();
    for &x in inner {
        out.push(complement_element(outer, x, top));
    }
    out.sort_unstable();
    out
}

/// The inverse sign count for the shuffle permutation of `(s, t)`.
fn shuffle_sign(s: &[u32], t: &[u32]) -> i64 {
    let mut inversions = 0i64;
    for &a in s {
        inversions += t.iter().filter(|&&b| a > b).count() as i64;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The denormalised cosimplicial algebra of a CDGA, with levels materialized
/// slice by slice on demand.
#[derive(Debug, Clone)]
pub struct Denormalisation {
    cdga: Arc<Cdga>,
}

impl Denormalisation {
    pub fn new(cdga: &Arc<Cdga>) -> Self {
        Denormalisation {
            cdga: Arc::clone(cdga),
        }
    }

    pub fn cdga(&self) -> &Arc<Cdga> {
        &self.cdga
    }

    pub fn zero(&self, level: usize) -> DLevelElement {
        DLevelElement {
            level,
            terms: BTreeMap::new(),
        }
    }

    /// The term `(J, a)`; `a` must be homogeneous of degree `level - |J|`.
    pub fn term(&self, level: usize, subset: &[u32], a: &Element) -> Result<DLevelElement> {
        let subset: Vec<u32> = subset.to_vec();
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("subset indices must be strictly increasing".into()));
        }
        if let (Some(&lo), Some(&hi)) = (subset.first(), subset.last()) {
            if lo < 1 || hi as usize > level {
                return Err(Error::IndexOutOfRange {
                    index: hi as usize,
                    level,
                });
            }
        }
        let want = level as i64 - subset.len() as i64;
        let mut out = self.zero(level);
        for ((degree, _), part) in a.components() {
            if degree != want {
                return Err(Error::DegreeError(format!(
                    "term with subset of size {} at level {level} needs degree {want}, got {degree}",
                    subset.len()
                )));
            }
            out.insert(subset.clone(), part);
        }
        Ok(out)
    }

    /// A bare element of `A^level` viewed inside level `level`.
    pub fn bare(&self, level: usize, a: &Element) -> Result<DLevelElement> {
        self.term(level, &[], a)
    }

    /// The coface `d^i: D^n -> D^{n+1}`, `0 <= i <= n+1`.
    pub fn coface(&self, i: usize, x: &DLevelElement) -> Result<DLevelElement> {
        let n = x.level;
        if i > n + 1 {
            return Err(Error::IndexOutOfRange { index: i, level: n });
        }
        let mut out = self.zero(n + 1);
        for (subset, a) in x.terms.iter() {
            if i >= 1 {
                // d^i d^J = d^{ {i} u shift_i(J) } by the first cosimplicial identity
                let new_subset = compose_missing(&[i as u32], subset, (n + 1) as u32);
                out.insert(new_subset, a.clone());
            } else {
                // commute d^0 inward: d^0 d^J = d^{J+1} d^0, then eliminate
                // d^0 a = d a - sum_{k=1}^{m+1} (-1)^k d^k a on the bare element
                let m = n - subset.len(); // a in A^m
                let shifted: Vec<u32> = subset.iter().map(|&j| j + 1).collect();
                out.insert(shifted.clone(), self.cdga.d(a));
                for k in 1..=(m + 1) as u32 {
                    let composed = compose_missing(&shifted, &[k], (n + 1) as u32);
                    let sign = scalar::sign(k as i64 + 1); // -(-1)^k
                    out.insert(composed, a.scale(&sign));
                }
            }
        }
        Ok(out)
    }

    /// The codegeneracy `s^i: D^n -> D^{n-1}`, `0 <= i <= n-1`.
    pub fn codegeneracy(&self, i: usize, x: &DLevelElement) -> Result<DLevelElement> {
        let n = x.level;
        if n == 0 || i > n - 1 {
            return Err(Error::IndexOutOfRange { index: i, level: n });
        }
        let i = i as u32;
        let mut out = self.zero(n - 1);
        for (subset, a) in x.terms.iter() {
            let has_i = subset.binary_search(&i).is_ok();
            let has_i1 = subset.binary_search(&(i + 1)).is_ok();
            match (has_i, has_i1) {
                (false, false) => {
                    // s^i reaches the bare element: s^j v = 0
                }
                (true, true) => {
                    // both collapse to i, the word keeps its length minus one
                    let mut new_subset: Vec<u32> = Vec::with_capacity(subset.len() - 1);
                    for &j in subset.iter() {
                        if j < i {
                            new_subset.push(j);
                        } else if j == i {
                            new_subset.push(i);
                        } else if j > i + 1 {
                            new_subset.push(j - 1);
                        }
                    }
                    out.insert(new_subset, a.clone());
                }
                _ => {
                    // the identity case of the third cosimplicial identity
                    let mut new_subset: Vec<u32> = Vec::with_capacity(subset.len() - 1);
                    for &j in subset.iter() {
                        if j < i {
                            new_subset.push(j);
                        } else if j > i + 1 {
                            new_subset.push(j - 1);
                        }
                    }
                    out.insert(new_subset, a.clone());
                }
            }
        }
        Ok(out)
    }

    /// The Eilenberg-Zilber shuffle product on one level.
    pub fn shuffle(&self, x: &DLevelElement, y: &DLevelElement) -> Result<DLevelElement> {
        if x.level != y.level {
            return Err(Error::LevelMismatch(x.level, y.level));
        }
        let mut out = self.zero(x.level);
        for (i_set, a) in x.terms.iter() {
            for (j_set, b) in y.terms.iter() {
                let j_minus_i: Vec<u32> = j_set
                    .iter()
                    .copied()
                    .filter(|v| i_set.binary_search(v).is_err())
                    .collect();
                let i_minus_j: Vec<u32> = i_set
                    .iter()
                    .copied()
                    .filter(|v| j_set.binary_search(v).is_err())
                    .collect();
                let deg_a = x.level as i64 - i_set.len() as i64;
                let deg_b = y.level as i64 - j_set.len() as i64;
                if deg_a != j_minus_i.len() as i64 || deg_b != i_minus_j.len() as i64 {
                    continue;
                }
                let intersection: Vec<u32> = i_set
                    .iter()
                    .copied()
                    .filter(|v| j_set.binary_search(v).is_ok())
                    .collect();
                let sign = shuffle_sign(&j_minus_i, &i_minus_j);
                let product = a.mul(b).scale(&scalar::int(sign));
                out.insert(intersection, product);
            }
        }
        Ok(out)
    }

    /// Basis of the (level, weight) slice: pairs `(J, monomial)`.
    pub fn level_slice_basis(&self, level: usize, weight: i64) -> Result<Vec<(Vec<u32>, Monomial)>> {
        let mut out = Vec::new();
        let mut subsets: Vec<Vec<u32>> = Vec::new();
        for mask in 0u64..(1 << level) {
            let subset: Vec<u32> = (0..level as u32)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| b + 1)
                .collect();
            subsets.push(subset);
        }
        subsets.sort();
        for subset in subsets {
            let degree = level as i64 - subset.len() as i64;
            let monos = self.cdga.slice_basis(degree, weight)?;
            for m in monos.monomials {
                out.push((subset.clone(), m));
            }
        }
        Ok(out)
    }

    pub fn level_dim(&self, level: usize, weight: i64) -> Result<usize> {
        Ok(self.level_slice_basis(level, weight)?.len())
    }

    /// The basis term as a DLevelElement.
    pub fn basis_element(&self, level: usize, key: &(Vec<u32>, Monomial)) -> DLevelElement {
        let a = Element::from_terms(self.cdga.presentation(), [(key.1.clone(), scalar::one())]);
        self.term(level, &key.0, &a).expect("basis terms are valid")
    }

    fn coords(
        &self,
        x: &DLevelElement,
        index: &BTreeMap<(Vec<u32>, Monomial), usize>,
        dim: usize,
    ) -> Result<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(); dim];
        for (subset, a) in x.terms.iter() {
            for (m, c) in a.terms() {
                let key = (subset.clone(), m.clone());
                let idx = index.get(&key).ok_or_else(|| {
                    Error::Validation("element leaves the expected weight slice".into())
                })?;
                v[*idx] = c.clone();
            }
        }
        Ok(v)
    }

    /// Matrix of a codegeneracy on a weight slice.
    pub fn codegeneracy_matrix(&self, i: usize, level: usize, weight: i64) -> Result<QMatrix> {
        let source = self.level_slice_basis(level, weight)?;
        let target = self.level_slice_basis(level - 1, weight)?;
        let index: BTreeMap<(Vec<u32>, Monomial), usize> = target
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        let mut m = QMatrix::zero(target.len(), source.len());
        for (col, key) in source.iter().enumerate() {
            let image = self.codegeneracy(i, &self.basis_element(level, key))?;
            for (row, c) in self
                .coords(&image, &index, target.len())?
                .into_iter()
                .enumerate()
            {
                m.set(row, col, c);
            }
        }
        Ok(m)
    }

    /// The normalised part of level n at one weight: the joint kernel of all
    /// codegeneracies. Verifies that it coincides with the span of bare
    /// terms and that the alternating coface sum restricts to the original
    /// differential; this is the on-the-nose Dold-Kan roundtrip.
    pub fn normalisation_report(&self, level: usize, weight: i64) -> Result<VerificationReport> {
        let basis = self.level_slice_basis(level, weight)?;
        let dim = basis.len();

        // joint kernel of the codegeneracies
        let kernel: Vec<Vec<Scalar>> = if level == 0 {
            (0..dim)
                .map(|i| {
                    let mut v = vec![Scalar::zero(); dim];
                    v[i] = scalar::one();
                    v
                })
                .collect()
        } else {
            let mut stacked: Option<QMatrix> = None;
            for i in 0..level {
                let m = self.codegeneracy_matrix(i, level, weight)?;
                stacked = Some(match stacked {
                    None => m,
                    Some(prev) => {
                        let mut big = QMatrix::zero(prev.rows() + m.rows(), dim);
                        for r in 0..prev.rows() {
                            for c in 0..dim {
                                big.set(r, c, prev.get(r, c).clone());
                            }
                        }
                        for r in 0..m.rows() {
                            for c in 0..dim {
                                big.set(prev.rows() + r, c, m.get(r, c).clone());
                            }
                        }
                        big
                    }
                });
            }
            match stacked {
                Some(s) => s.kernel_basis(),
                None => Vec::new(),
            }
        };

        // span of bare terms
        let bare: Vec<Vec<Scalar>> = basis
            .iter()
            .enumerate()
            .filter(|(_, (j, _))| j.is_empty())
            .map(|(i, _)| {
                let mut v = vec![Scalar::zero(); dim];
                v[i] = scalar::one();
                v
            })
            .collect();

        let ambient_dim = self.cdga.slice_basis(level as i64, weight)?.dim();
        if bare.len() != ambient_dim {
            return Ok(VerificationReport::fail(
                "normalisation",
                "bare terms do not match the ambient slice dimension",
            ));
        }
        if !same_span(&kernel, &bare, dim) {
            return Ok(VerificationReport::fail(
                "normalisation",
                format!(
                    "joint kernel of codegeneracies differs from the bare span at level {level}, weight {weight}"
                ),
            ));
        }

        // induced differential = alternating coface sum on bare elements
        let pres = self.cdga.presentation();
        for mono in self.cdga.slice_basis(level as i64, weight)?.monomials {
            let a = Element::from_terms(pres, [(mono, scalar::one())]);
            let bare_el = self.bare(level, &a)?;
            let mut total = self.zero(level + 1);
            for i in 0..=level + 1 {
                let img = self.coface(i, &bare_el)?;
                total = total.add(&img.scale(&scalar::sign(i as i64)))?;
            }
            let expected = self.bare(level + 1, &self.cdga.d(&a))?;
            if total != expected {
                return Ok(VerificationReport::fail(
                    "normalisation",
                    format!(
                        "induced differential disagrees with the algebra differential on {}",
                        a
                    ),
                ));
            }
        }

        Ok(VerificationReport::pass("normalisation")
            .with_detail(format!(
                "N(D A)^{level} = A^{level} at weight {weight} with the identity on bare terms"
            ))
            .with_witness(Witness::Dimension {
                label: "normalised dimension".into(),
                degree: level as i64,
                weight,
                dim: ambient_dim,
            }))
    }

    /// Augmentation `D^n A -> A^0` (the n-fold codegeneracy 0).
    pub fn augmentation(&self, x: &DLevelElement) -> Element {
        let mut out = Element::zero(self.cdga.presentation());
        let full: Vec<u32> = (1..=x.level as u32).collect();
        for (subset, a) in x.terms.iter() {
            if *subset == full {
                out = out.add(a).expect("same presentation");
            }
        }
        out
    }

    /// Checks that the kernel of the augmentation satisfies K^{n+1} = 0 under
    /// the shuffle product, by exhaustive multiplication of slice basis
    /// elements with weights up to the bound.
    pub fn augmentation_nilpotency(&self, level: usize, weight_bound: i64) -> Result<VerificationReport> {
        let full: Vec<u32> = (1..=level as u32).collect();
        let mut kernel_basis: Vec<DLevelElement> = Vec::new();
        for w in -weight_bound..=weight_bound {
            for key in self.level_slice_basis(level, w)? {
                if key.0 != full {
                    kernel_basis.push(self.basis_element(level, &key));
                }
            }
        }
        if level == 0 {
            return Ok(VerificationReport::pass("augmentation-nilpotency")
                .with_detail("level 0: the augmentation is the identity, kernel 0"));
        }
        let mut current = kernel_basis.clone();
        for round in 1..=level {
            let mut next = Vec::new();
            for x in &current {
                for y in &kernel_basis {
                    let p = self.shuffle(x, y)?;
                    if !p.is_zero() {
                        next.push(p);
                    }
                }
            }
            if next.is_empty() {
                return Ok(VerificationReport::pass("augmentation-nilpotency")
                    .with_detail(format!(
                        "K^{} = 0 under the shuffle product (kernel basis size {})",
                        round + 1,
                        kernel_basis.len()
                    )));
            }
            current = next;
        }
        // products of n+1 kernel elements survived
        let witness = current.first().unwrap();
        Ok(VerificationReport::fail(
            "augmentation-nilpotency",
            format!("a product of {} kernel elements is non-zero", level + 1),
        )
        .with_witness(Witness::Note(witness.render())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::parse_element;
    use crate::presentation::{GeneratorSpec, Presentation};

    /// de Rham of the affine line: x (0,1), dx (1,1), d(x) = dx.
    fn fixture() -> Arc<Cdga> {
        let pres = Presentation::new(vec![
            GeneratorSpec::new("x", 0, 1),
            GeneratorSpec::new("dx", 1, 1),
        ])
        .unwrap();
        let dx = Element::generator(&pres, "dx").unwrap();
        Cdga::new(&pres, &[("x", dx)]).unwrap()
    }

    #[test]
    fn coface_one_on_a_bare_scalar() {
        let b = fixture();
        let dn = Denormalisation::new(&b);
        let a = parse_element(b.presentation(), "x").unwrap();
        let x0 = dn.bare(0, &a).unwrap();
        let up = dn.coface(1, &x0).unwrap();
        assert_eq!(up, dn.term(1, &[1], &a).unwrap());
    }

    #[test]
    fn coface_zero_eliminates_via_base_case() {
        let b = fixture();
        let dn = Denormalisation::new(&b);
        let a = parse_element(b.presentation(), "x").unwrap();
        let x0 = dn.bare(0, &a).unwrap();
        // d^0 a = (da) + d^1 a at level 1
        let up = dn.coface(0, &x0).unwrap();
        let expected = dn
            .bare(1, &b.d(&a))
            .unwrap()
            .add(&dn.term(1, &[1], &a).unwrap())
            .unwrap();
        assert_eq!(up, expected);
    }

    #[test]
    fn coface_two_on_a_word() {
        let b = fixture();
        let dn = Denormalisation::new(&b);
        let a = parse_element(b.presentation(), "x").unwrap();
        let t = dn.term(1, &[1], &a).unwrap();
        let up = dn.coface(2, &t).unwrap();
        assert_eq!(up, dn.term(2, &[1, 2], &a).unwrap());
    }

    #[test]
    fn codegeneracy_base_cases() {
        let b = fixture();
        let dn = Denormalisation::new(&b);
        let a = parse_element(b.presentation(), "x").unwrap();
        // s^0 d^1 = id
        let t = dn.term(1, &[1], &a).unwrap();
        assert_eq!(dn.codegeneracy(0, &t).unwrap(), dn.bare(0, &a).unwrap());
        // s^0 v = 0 on a bare element of A^1
        let v = dn
            .bare(1, &parse_element(b.presentation(), "dx").unwrap())
            .unwrap();
        assert!(dn.codegeneracy(0, &v).unwrap().is_zero());
        // linearity: s of 0 is 0
        assert!(dn.codegeneracy(0, &dn.zero(1)).unwrap().is_zero());
    }

    #[test]
    fn shuffle_levels_and_signs() {
        let b = fixture();
        let dn = Denormalisation::new(&b);
        let pres = b.presentation();
        let x = parse_element(pres, "x").unwrap();
        let dx = parse_element(pres, "dx").unwrap();

        // level 0: plain product
        let p = dn
            .shuffle(&dn.bare(0, &x).unwrap(), &dn.bare(0, &x).unwrap())
            .unwrap();
        assert_eq!(p, dn.bare(0, &x.mul(&x)).unwrap());

        // level 1: (d^1 a) shuffle (bare dx) = a dx with sign +1
        let lhs = dn.term(1, &[1], &x).unwrap();
        let rhs = dn.bare(1, &dx).unwrap();
        let p = dn.shuffle(&lhs, &rhs).unwrap();
        assert_eq!(p, dn.bare(1, &x.mul(&dx)).unwrap());

        // level 2, a, b of degree 1: (d^1 a) shuffle (d^2 b) = -(a b)
        let a = dx.clone();
        let bb = parse_element(pres, "x * dx").unwrap();
        let lhs = dn.term(2, &[1], &a).unwrap();
        let rhs = dn.term(2, &[2], &bb).unwrap();
        let p = dn.shuffle(&lhs, &rhs).unwrap();
        assert_eq!(p, dn.bare(2, &a.mul(&bb)).unwrap().neg());

        // mismatched degree conditions give zero
        let zero = dn
            .shuffle(&dn.bare(2, &Element::zero(pres)).unwrap(), &dn.zero(2))
            .unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn level_dimension_formula() {
        let b = fixture();
        let dn = Denormalisation::new(&b);
        let binom = |n: i64, k: i64| -> i64 {
            if k < 0 || k > n {
                return 0;
            }
            let mut r = 1i64;
            for i in 0..k {
                r = r * (n - i) / (i + 1);
            }
            r
        };
        for level in 0..=5usize {
            for w in 0..=3i64 {
                let expected: i64 = (0..=level as i64)
                    .map(|m| {
                        let dim = b.slice_basis(m, w).unwrap().dim() as i64;
                        binom(level as i64, m) * dim
                    })
                    .sum();
                assert_eq!(dn.level_dim(level, w).unwrap() as i64, expected);
            }
        }
    }

    #[test]
    fn normalisation_roundtrip_small() {
        let b = fixture();
        let dn = Denormalisation::new(&b);
        for level in 0..=3usize {
            for w in 0..=3i64 {
                let report = dn.normalisation_report(level, w).unwrap();
                assert!(report.passed(), "level {level} weight {w}: {report}");
            }
        }
    }

    #[test]
    fn augmentation_and_nilpotency() {
        let b = fixture();
        let dn = Denormalisation::new(&b);
        let pres = b.presentation();
        let x = parse_element(pres, "x").unwrap();
        // at level 1 the augmentation picks the (J={1}) coefficient
        let t = dn.term(1, &[1], &x).unwrap();
        assert_eq!(dn.augmentation(&t), x);
        let bare = dn.bare(1, &parse_element(pres, "dx").unwrap()).unwrap();
        assert!(dn.augmentation(&bare).is_zero());

        for level in 0..=2usize {
            let report = dn.augmentation_nilpotency(level, 2).unwrap();
            assert!(report.passed(), "level {level}: {report}");
        }
    }
}
