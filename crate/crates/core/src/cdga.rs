//! CDGAs: presentations with a square-zero degree +1 derivation.
//!
//! The differential is specified on generators and extended to all elements
//! by the graded Leibniz rule. Weight-homogeneity of the generator images is
//! enforced at construction, which keeps each (degree, weight) slice a finite
//! complex of Q-vector spaces; `d^2 = 0` is a separate machine check so that
//! broken inputs can be reported with witnesses rather than rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::element::{Bidegree, Element, Monomial, UnitVerdict};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::presentation::Presentation;
use crate::report::{VerificationReport, Witness};
use crate::scalar::{self, Scalar};
use crate::slice::{slice_monomials, SliceBasis, SliceComplex};

/// A CDGA over Q: a presentation plus a differential on generators. An
/// optional set of generators can be marked as the base of a relative
/// construction `A -> B`; the universal derivation of Kaehler differentials
/// kills those.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdga {
    pres: Arc<Presentation>,
    diff: Vec<Element>,
    base: BTreeSet<usize>,
}

impl Cdga {
    /// Builds a CDGA from generator differentials; generators not listed get
    /// differential zero. Each image must be homogeneous of cochain degree
    /// `deg g + 1` and weight `wt g`.
    pub fn new(pres: &Arc<Presentation>, diffs: &[(&str, Element)]) -> Result<Arc<Cdga>> {
        let mut map: BTreeMap<usize, Element> = BTreeMap::new();
        for (name, e) in diffs {
            let idx = pres.lookup(name)?;
            if !Presentation::same(e.presentation(), pres) {
                return Err(Error::MixedPresentation(format!(
                    "differential of `{name}` lives over a different presentation"
                )));
            }
            map.insert(idx, e.clone());
        }
        let mut diff = Vec::with_capacity(pres.len());
        for idx in 0..pres.len() {
            let g = pres.gen_spec(idx);
            let image = map.remove(&idx).unwrap_or_else(|| Element::zero(pres));
            if !image.is_homogeneous(g.degree + 1, g.weight) {
                return Err(Error::NonHomogeneousDifferential {
                    name: g.name.clone(),
                    reason: format!(
                        "image `{image}` must be homogeneous of degree {} and weight {}",
                        g.degree + 1,
                        g.weight
                    ),
                });
            }
            diff.push(image);
        }
        Ok(Arc::new(Cdga {
            pres: Arc::clone(pres),
            diff,
            base: BTreeSet::new(),
        }))
    }

    /// The base ring Q as a CDGA.
    pub fn base_ring() -> Arc<Cdga> {
        let pres = Presentation::base_ring();
        Cdga::new(&pres, &[]).expect("empty CDGA is valid")
    }

    /// A CDGA with zero differential on the given presentation.
    pub fn zero_differential(pres: &Arc<Presentation>) -> Arc<Cdga> {
        Cdga::new(pres, &[]).expect("zero differential is always homogeneous")
    }

    /// Marks the named generators as the base sub-CDGA of a relative
    /// construction. The set must be closed under the differential.
    pub fn with_base(self: &Arc<Cdga>, names: &[&str]) -> Result<Arc<Cdga>> {
        let mut base = BTreeSet::new();
        for name in names {
            base.insert(self.pres.lookup(name)?);
        }
        for &idx in &base {
            for (m, _) in self.diff[idx].terms() {
                for &(i, _) in m.exps() {
                    if !base.contains(&(i as usize)) {
                        return Err(Error::Validation(format!(
                            "base is not closed under the differential: d({}) involves `{}`",
                            self.pres.gen_spec(idx).name,
                            self.pres.gen_spec(i as usize).name
                        )));
                    }
                }
            }
        }
        let mut c = (**self).clone();
        c.base = base;
        Ok(Arc::new(c))
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn base_generators(&self) -> &BTreeSet<usize> {
        &self.base
    }

    pub fn differential_of(&self, idx: usize) -> &Element {
        &self.diff[idx]
    }

    /// The unique extension of the generator differential to a degree +1
    /// derivation: `d(ab) = (da) b + (-1)^{deg a} a (db)`, Q-linear.
    pub fn d(&self, e: &Element) -> Element {
        let mut out = Element::zero(&self.pres);
        for (mono, coeff) in e.terms() {
            let factors = mono.exps().to_vec();
            let mut prefix_degree = 0i64;
            for (pos, &(gi, exp)) in factors.iter().enumerate() {
                let g = self.pres.gen_spec(gi as usize);
                let dg = &self.diff[gi as usize];
                if !dg.is_zero() {
                    // d(P g^e S) = (-1)^{deg P} e . P g^{e-1} (dg) S
                    let mut pre = Vec::new();
                    for &(i, f) in &factors[..pos] {
                        pre.push((i, f));
                    }
                    if exp != 1 {
                        pre.push((gi, exp - 1));
                    }
                    let suf: Vec<(u32, i64)> = factors[pos + 1..].to_vec();
                    let pre_el = Element::from_terms(
                        &self.pres,
                        [(Monomial::from_exps(pre), scalar::one())],
                    );
                    let suf_el = Element::from_terms(
                        &self.pres,
                        [(Monomial::from_exps(suf), scalar::one())],
                    );
                    let term = pre_el.mul(dg).mul(&suf_el);
                    let c = coeff * scalar::int(exp) * scalar::sign(prefix_degree);
                    out = out.add(&term.scale(&c)).expect("same presentation");
                }
                prefix_degree += exp * g.degree;
            }
        }
        out
    }

    /// Verifies `d(d g) = 0` on every generator, which suffices by the
    /// derivation property; reports the first failure with the non-zero
    /// element as witness.
    pub fn check_d_squared(&self) -> VerificationReport {
        for idx in 0..self.pres.len() {
            let ddg = self.d(&self.diff[idx]);
            if !ddg.is_zero() {
                let name = &self.pres.gen_spec(idx).name;
                return VerificationReport::fail(
                    "d-squared",
                    format!("d(d {name}) is non-zero"),
                )
                .with_witness(Witness::Name {
                    label: "failing generator".into(),
                    name: name.clone(),
                })
                .with_witness(Witness::Element {
                    label: format!("d(d {name})"),
                    value: ddg.to_string(),
                });
            }
        }
        VerificationReport::pass("d-squared")
            .with_detail("checked on generators; the derivation property extends the identity")
    }

    pub fn slice_basis(&self, degree: i64, weight: i64) -> Result<SliceBasis> {
        Ok(SliceBasis::new(slice_monomials(&self.pres, degree, weight)?))
    }

    /// Matrix of the differential from slice (degree, weight) to
    /// (degree + 1, weight).
    pub fn slice_matrix(&self, degree: i64, weight: i64) -> Result<QMatrix> {
        let source = self.slice_basis(degree, weight)?;
        let target = self.slice_basis(degree + 1, weight)?;
        let mut m = QMatrix::zero(target.dim(), source.dim());
        for (j, mono) in source.monomials.iter().enumerate() {
            let image = self.d(&Element::from_terms(
                &self.pres,
                [(mono.clone(), scalar::one())],
            ));
            let coords = target.coords(&image).ok_or_else(|| {
                Error::NonHomogeneousDifferential {
                    name: format!("slice ({degree}, {weight})"),
                    reason: "image leaves the expected slice".into(),
                }
            })?;
            for (i, c) in coords.into_iter().enumerate() {
                m.set(i, j, c);
            }
        }
        Ok(m)
    }

    /// The weight-`w` slices as a finite complex over a degree window.
    pub fn slice_complex(&self, weight: i64, degree_lo: i64, degree_hi: i64) -> Result<SliceComplex> {
        let mut dims = Vec::new();
        let mut labels = Vec::new();
        let mut maps = Vec::new();
        for degree in degree_lo..=degree_hi {
            let b = self.slice_basis(degree, weight)?;
            dims.push(b.dim());
            labels.push(
                b.monomials
                    .iter()
                    .map(|m| {
                        Element::from_terms(&self.pres, [(m.clone(), scalar::one())]).to_string()
                    })
                    .collect(),
            );
            if degree < degree_hi {
                maps.push(self.slice_matrix(degree, weight)?);
            }
        }
        Ok(SliceComplex::new(degree_lo, dims, maps).with_labels(labels))
    }

    /// dim H^degree at the given weight, by exact Gaussian elimination.
    pub fn cohomology_dim(&self, degree: i64, weight: i64) -> Result<usize> {
        let here = self.slice_basis(degree, weight)?;
        let out = self.slice_matrix(degree, weight)?;
        let into = self.slice_matrix(degree - 1, weight)?;
        let dim = here.dim() as i64 - out.rank() as i64 - into.rank() as i64;
        if dim < 0 {
            return Err(Error::Validation(
                "negative cohomology dimension: the differential does not square to zero".into(),
            ));
        }
        Ok(dim as usize)
    }

    /// Sum of `cohomology_dim` over all weights with a non-trivial slice in
    /// `|w| <= weight_bound`.
    pub fn cohomology_dim_up_to_weight(&self, degree: i64, weight_bound: i64) -> Result<usize> {
        let mut total = 0;
        for w in -weight_bound..=weight_bound {
            total += self.cohomology_dim(degree, w)?;
        }
        Ok(total)
    }

    /// The degree-0 subalgebra as a standalone CDGA (zero differential),
    /// together with the generator re-indexing.
    pub fn degree0_part(&self) -> Result<(Arc<Cdga>, BTreeMap<usize, usize>)> {
        let mut gens = Vec::new();
        let mut index_map = BTreeMap::new();
        for (idx, g) in self.pres.gens().iter().enumerate() {
            if g.degree == 0 {
                index_map.insert(idx, gens.len());
                gens.push(g.clone());
            }
        }
        let pres = match self.pres.weight_truncation() {
            Some(b) => Presentation::truncated(gens, b)?,
            None => Presentation::new(gens)?,
        };
        Ok((Cdga::zero_differential(&pres), index_map))
    }

    /// Applies the graded augmentation `B -> B^0` and re-expresses the result
    /// over the degree-0 presentation.
    pub fn augment_to_degree0(
        &self,
        e: &Element,
        target: &Arc<Cdga>,
        index_map: &BTreeMap<usize, usize>,
    ) -> Element {
        let mut out = Element::zero(target.presentation());
        for (m, c) in e.augment_degree0().terms() {
            let exps = m
                .exps()
                .iter()
                .map(|&(i, e)| (index_map[&(i as usize)] as u32, e))
                .collect();
            out.add_term(Monomial::from_exps(exps), c.clone());
        }
        out
    }
}

/// A morphism of CDGAs given by generator images.
#[derive(Debug, Clone)]
pub struct CdgaMorphism {
    source: Arc<Cdga>,
    target: Arc<Cdga>,
    images: Vec<Element>,
    /// Exact inverses of the images of inverted generators.
    inverse_images: Vec<Option<Element>>,
}

impl CdgaMorphism {
    /// Builds and validates a morphism: images must preserve degree and
    /// weight, images of inverted generators must be units, and the map must
    /// commute with the differentials on generators.
    pub fn new(
        source: &Arc<Cdga>,
        target: &Arc<Cdga>,
        images: &[(&str, Element)],
    ) -> Result<CdgaMorphism> {
        let spres = source.presentation();
        let mut image_vec: Vec<Option<Element>> = vec![None; spres.len()];
        for (name, e) in images {
            let idx = spres.lookup(name)?;
            if !Presentation::same(e.presentation(), target.presentation()) {
                return Err(Error::MixedPresentation(format!(
                    "image of `{name}` does not live over the target"
                )));
            }
            image_vec[idx] = Some(e.clone());
        }
        let mut resolved = Vec::with_capacity(spres.len());
        let mut inverses = Vec::with_capacity(spres.len());
        for (idx, img) in image_vec.into_iter().enumerate() {
            let g = spres.gen_spec(idx);
            let img = img.ok_or_else(|| {
                Error::Validation(format!("no image supplied for generator `{}`", g.name))
            })?;
            if !img.is_homogeneous(g.degree, g.weight) {
                return Err(Error::Validation(format!(
                    "image of `{}` is not homogeneous of degree {} and weight {}",
                    g.name, g.degree, g.weight
                )));
            }
            if g.invertible {
                match img.is_unit()? {
                    UnitVerdict::Yes(inv) => inverses.push(Some(inv)),
                    _ => {
                        return Err(Error::RelationViolation(format!(
                            "inverted generator `{}` maps to the non-unit `{img}`",
                            g.name
                        )))
                    }
                }
            } else {
                inverses.push(None);
            }
            resolved.push(img);
        }
        let morphism = CdgaMorphism {
            source: Arc::clone(source),
            target: Arc::clone(target),
            images: resolved,
            inverse_images: inverses,
        };
        for idx in 0..spres.len() {
            let lhs = morphism.apply(source.differential_of(idx))?;
            let rhs = target.d(&morphism.images[idx]);
            if lhs != rhs {
                return Err(Error::NotChainMap(spres.gen_spec(idx).name.clone()));
            }
        }
        Ok(morphism)
    }

    pub fn source(&self) -> &Arc<Cdga> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Cdga> {
        &self.target
    }

    pub fn image_of(&self, idx: usize) -> &Element {
        &self.images[idx]
    }

    /// Applies the morphism by substituting generator images monomial-wise.
    pub fn apply(&self, e: &Element) -> Result<Element> {
        if !Presentation::same(e.presentation(), self.source.presentation()) {
            return Err(Error::MixedPresentation(
                "element does not live over the morphism source".into(),
            ));
        }
        let tpres = self.target.presentation();
        let mut out = Element::zero(tpres);
        for (m, c) in e.terms() {
            let mut acc = Element::scalar(tpres, c.clone());
            for &(i, exp) in m.exps() {
                let factor = if exp >= 0 {
                    self.images[i as usize].pow(exp)?
                } else {
                    self.inverse_images[i as usize]
                        .as_ref()
                        .expect("validated inverted generator")
                        .pow(-exp)?
                };
                acc = acc.try_mul(&factor)?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// When every generator maps to a distinct plain generator, returns the
    /// set of hit target indices; this is the sub-CDGA shape required by the
    /// Kaehler and etale machinery.
    pub fn as_inclusion(&self) -> Option<BTreeSet<usize>> {
        let mut hit = BTreeSet::new();
        for img in &self.images {
            if img.num_terms() != 1 {
                return None;
            }
            let (m, c) = img.terms().next().unwrap();
            if c != &scalar::one() || m.exps().len() != 1 {
                return None;
            }
            let (i, e) = m.exps()[0];
            if e != 1 || !hit.insert(i as usize) {
                return None;
            }
        }
        Some(hit)
    }

    /// Matrix of the morphism on a (degree, weight) slice.
    pub fn slice_matrix(&self, degree: i64, weight: i64) -> Result<(QMatrix, SliceBasis, SliceBasis)> {
        let source = self.source.slice_basis(degree, weight)?;
        let target = self.target.slice_basis(degree, weight)?;
        let mut m = QMatrix::zero(target.dim(), source.dim());
        for (j, mono) in source.monomials.iter().enumerate() {
            let image = self.apply(&Element::from_terms(
                self.source.presentation(),
                [(mono.clone(), scalar::one())],
            ))?;
            let coords: Vec<Scalar> = target.coords(&image).ok_or_else(|| {
                Error::Validation("morphism image leaves the expected slice".into())
            })?;
            for (i, c) in coords.into_iter().enumerate() {
                m.set(i, j, c);
            }
        }
        Ok((m, source, target))
    }
}

/// Convenience context for elements of a CDGA.
pub fn gen_el(c: &Arc<Cdga>, name: &str) -> Element {
    Element::generator(c.presentation(), name).expect("generator exists")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::parse_element;
    use crate::presentation::GeneratorSpec;

    /// de Rham algebra of Q[x]: generators x, dx with d(x) = dx.
    fn derham_line() -> Arc<Cdga> {
        let pres = Presentation::new(vec![
            GeneratorSpec::new("x", 0, 1),
            GeneratorSpec::new("dx", 1, 1),
        ])
        .unwrap();
        let dx = Element::generator(&pres, "dx").unwrap();
        Cdga::new(&pres, &[("x", dx)]).unwrap()
    }

    #[test]
    fn leibniz_on_square() {
        let b = derham_line();
        let x = gen_el(&b, "x");
        let x2 = x.mul(&x);
        // d(x^2) = 2 x dx
        let expected = parse_element(b.presentation(), "2 * x * dx").unwrap();
        assert_eq!(b.d(&x2), expected);
        assert!(b.d(&Element::one(b.presentation())).is_zero());
    }

    #[test]
    fn odd_square_kills_cross_term() {
        // d(x) = xi, d(xi) = 0 => d(x xi) = xi xi = 0
        let pres = Presentation::new(vec![
            GeneratorSpec::new("x", 0, 1),
            GeneratorSpec::new("xi", 1, 1),
        ])
        .unwrap();
        let xi = Element::generator(&pres, "xi").unwrap();
        let b = Cdga::new(&pres, &[("x", xi)]).unwrap();
        let x = gen_el(&b, "x");
        let xi = gen_el(&b, "xi");
        assert!(b.d(&x.mul(&xi)).is_zero());
    }

    #[test]
    fn d_squared_verdicts() {
        let b = derham_line();
        assert!(b.check_d_squared().passed());

        // d(x) = xi, d(xi) = eta fails at x with witness eta
        let pres = Presentation::new(vec![
            GeneratorSpec::new("x", 0, 1),
            GeneratorSpec::new("xi", 1, 1),
            GeneratorSpec::new("eta", 2, 1),
        ])
        .unwrap();
        let xi = Element::generator(&pres, "xi").unwrap();
        let eta = Element::generator(&pres, "eta").unwrap();
        let broken = Cdga::new(&pres, &[("x", xi), ("xi", eta)]).unwrap();
        let report = broken.check_d_squared();
        assert!(!report.passed());
        assert!(report.witnesses.iter().any(|w| matches!(
            w,
            Witness::Name { name, .. } if name == "x"
        )));

        let zero = Cdga::zero_differential(derham_line().presentation());
        assert!(zero.check_d_squared().passed());
    }

    #[test]
    fn laurent_differential_of_inverse() {
        // d(t) = t ev forces d(t^-1) = -t^-1 ev by the extension rule
        let pres = Presentation::new(vec![
            GeneratorSpec::invertible("t", 1),
            GeneratorSpec::new("ev", 1, 0),
        ])
        .unwrap();
        let dt = parse_element(&pres, "t * ev").unwrap();
        let b = Cdga::new(&pres, &[("t", dt)]).unwrap();
        let tinv = Element::generator(&pres, "t").unwrap().pow(-1).unwrap();
        let expected = parse_element(&pres, "-t^-1 * ev").unwrap();
        assert_eq!(b.d(&tinv), expected);
    }

    #[test]
    fn poincare_lemma_on_the_line() {
        let b = derham_line();
        assert_eq!(b.cohomology_dim(0, 0).unwrap(), 1);
        for w in 1..=10 {
            assert_eq!(b.cohomology_dim(0, w).unwrap(), 0);
            assert_eq!(b.cohomology_dim(1, w).unwrap(), 0);
        }
    }

    #[test]
    fn zero_differential_cohomology_is_slice_dim() {
        let pres = Presentation::new(vec![
            GeneratorSpec::new("x", 0, 1),
            GeneratorSpec::new("dx", 1, 1),
        ])
        .unwrap();
        let zero = Cdga::zero_differential(&pres);
        for w in 0..4 {
            assert_eq!(
                zero.cohomology_dim(0, w).unwrap(),
                zero.slice_basis(0, w).unwrap().dim()
            );
        }
    }

    #[test]
    fn morphism_validation() {
        let b = derham_line();
        // x -> x, dx -> 2 dx is homogeneous but not a chain map
        let bad = CdgaMorphism::new(
            &b,
            &b,
            &[
                ("x", gen_el(&b, "x")),
                ("dx", parse_element(b.presentation(), "2 * dx").unwrap()),
            ],
        );
        assert!(matches!(bad, Err(Error::NotChainMap(_))));

        // x -> x^2 breaks weight homogeneity
        let inhomogeneous = CdgaMorphism::new(
            &b,
            &b,
            &[
                ("x", parse_element(b.presentation(), "x^2").unwrap()),
                ("dx", parse_element(b.presentation(), "2 * x * dx").unwrap()),
            ],
        );
        assert!(inhomogeneous.is_err());

        let identity = CdgaMorphism::new(
            &b,
            &b,
            &[("x", gen_el(&b, "x")), ("dx", gen_el(&b, "dx"))],
        )
        .unwrap();
        assert_eq!(identity.as_inclusion().unwrap().len(), 2);
        let e = parse_element(b.presentation(), "3 * x^2 * dx").unwrap();
        assert_eq!(identity.apply(&e).unwrap(), e);

        // scaling a generator: x -> 2x, dx -> 2dx is a chain map but not an inclusion shape
        let scaled = CdgaMorphism::new(
            &b,
            &b,
            &[
                ("x", parse_element(b.presentation(), "2 * x").unwrap()),
                ("dx", parse_element(b.presentation(), "2 * dx").unwrap()),
            ],
        )
        .unwrap();
        assert!(scaled.as_inclusion().is_none());
    }
}
