//! The rings graded matrices live over: a presented algebra, optionally with
//! its product twisted by automorphisms and optionally reduced modulo the
//! two-sided ideal of one homogeneous element.
//!
//! Elements are always stored as base-algebra elements. In a quotient every
//! element is kept in canonical form: its coordinates on the pivot words of
//! the ideal's echelon basis are cleared.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::algebra::{Algebra, AlgebraElement, GradedAutomorphism, Word};
use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::scalar::{FieldElem, FieldSpec};

#[derive(Debug)]
struct Ideal {
    generator: AlgebraElement,
    degrees: Mutex<HashMap<usize, Arc<Subspace>>>,
}

impl Ideal {
    fn new(generator: AlgebraElement) -> Self {
        Ideal {
            generator,
            degrees: Mutex::new(HashMap::new()),
        }
    }

    /// The degree-`e` part of the two-sided ideal, write-once cached.
    fn part(&self, e: usize) -> Arc<Subspace> {
        if let Some(s) = self.degrees.lock().expect("ideal cache poisoned").get(&e) {
            return Arc::clone(s);
        }
        let alg = self.generator.algebra();
        let field = alg.field();
        let d = self.generator.degree();
        let dim = alg.dim(e);
        let space = if e < d || self.generator.is_zero() {
            Subspace::zero(field, dim)
        } else if e == d {
            Subspace::spanned_by(field, dim, &[self.generator.coords()])
        } else {
            let prev = self.part(e - 1);
            let mut span = Vec::new();
            for v in prev.basis() {
                let b = AlgebraElement::from_coords(alg, e - 1, v);
                for i in 0..alg.n() {
                    span.push(alg.gen(i).mul(&b).coords());
                    span.push(b.mul(&alg.gen(i)).coords());
                }
            }
            Subspace::spanned_by(field, dim, &span)
        };
        let space = Arc::new(space);
        let mut cache = self.degrees.lock().expect("ideal cache poisoned");
        Arc::clone(cache.entry(e).or_insert(space))
    }
}

#[derive(Debug, Clone)]
pub struct Ring {
    base: Algebra,
    layers: Vec<GradedAutomorphism>,
    ideal: Option<Arc<Ideal>>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.layers == other.layers
            && match (&self.ideal, &other.ideal) {
                (None, None) => true,
                (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a.generator == b.generator,
                _ => false,
            }
    }
}

impl Eq for Ring {}

impl From<&Algebra> for Ring {
    fn from(alg: &Algebra) -> Self {
        Ring::new(alg)
    }
}

impl Ring {
    pub fn new(alg: &Algebra) -> Self {
        Ring {
            base: alg.clone(),
            layers: Vec::new(),
            ideal: None,
        }
    }

    /// `alg / (f)`; `f` need not be normal.
    pub fn quotient(alg: &Algebra, f: &AlgebraElement) -> Result<Self> {
        if f.algebra() != alg {
            return Err(Error::MixedAlgebras);
        }
        Ok(Ring {
            base: alg.clone(),
            layers: Vec::new(),
            ideal: Some(Arc::new(Ideal::new(f.clone()))),
        })
    }

    /// This ring with its product twisted once more by `sigma`:
    /// `a * b = a sigma^{deg a}(b)`. In a quotient `sigma` must map the
    /// generator of the ideal to a multiple of itself.
    pub fn twisted(&self, sigma: &GradedAutomorphism) -> Result<Self> {
        if sigma.algebra() != &self.base {
            return Err(Error::MixedAlgebras);
        }
        if let Some(ideal) = &self.ideal {
            if sigma.eigenvalue(&ideal.generator).is_none() {
                return Err(Error::NotEigenvector);
            }
        }
        let mut out = self.clone();
        out.layers.push(sigma.clone());
        Ok(out)
    }

    /// The same ring with the last twist removed.
    pub fn untwisted(&self) -> Self {
        let mut out = self.clone();
        out.layers.pop();
        out
    }

    pub fn base(&self) -> &Algebra {
        &self.base
    }

    pub fn layers(&self) -> &[GradedAutomorphism] {
        &self.layers
    }

    pub fn ideal_generator(&self) -> Option<&AlgebraElement> {
        self.ideal.as_ref().map(|i| &i.generator)
    }

    /// The untwisted base ring with the same ideal.
    pub fn without_twist(&self) -> Self {
        Ring {
            base: self.base.clone(),
            layers: Vec::new(),
            ideal: self.ideal.clone(),
        }
    }

    /// The ring without its ideal (twists kept).
    pub fn cover(&self) -> Self {
        Ring {
            base: self.base.clone(),
            layers: self.layers.clone(),
            ideal: None,
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.base.field()
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    fn ideal_part(&self, e: usize) -> Option<Arc<Subspace>> {
        self.ideal.as_ref().map(|i| i.part(e))
    }

    pub fn dim(&self, e: usize) -> usize {
        self.base.dim(e) - self.ideal_part(e).map_or(0, |s| s.rank())
    }

    pub fn hilbert_window(&self, n: usize) -> Vec<usize> {
        (0..=n).map(|e| self.dim(e)).collect()
    }

    fn complement(&self, e: usize) -> Vec<usize> {
        match self.ideal_part(e) {
            Some(s) => s.complement(),
            None => (0..self.base.dim(e)).collect(),
        }
    }

    /// Normal words representing a basis of the degree-`e` part.
    pub fn basis_words(&self, e: usize) -> Vec<Word> {
        let words = &self.base.basis(e).words;
        self.complement(e).into_iter().map(|k| words[k].clone()).collect()
    }

    pub fn zero(&self, e: usize) -> AlgebraElement {
        self.base.zero(e)
    }

    pub fn one(&self) -> AlgebraElement {
        self.reduce(&self.base.one())
    }

    pub fn gen(&self, i: usize) -> AlgebraElement {
        self.reduce(&self.base.gen(i))
    }

    pub fn scalar(&self, c: FieldElem) -> AlgebraElement {
        self.reduce(&self.base.scalar(c))
    }

    pub fn reduce(&self, a: &AlgebraElement) -> AlgebraElement {
        match self.ideal_part(a.degree()) {
            Some(s) if s.rank() > 0 && !a.is_zero() => {
                AlgebraElement::from_coords(&self.base, a.degree(), &s.reduce(&a.coords()))
            }
            _ => a.clone(),
        }
    }

    pub fn is_zero(&self, a: &AlgebraElement) -> bool {
        self.reduce(a).is_zero()
    }

    /// Coordinates on [`Ring::basis_words`].
    pub fn coords(&self, a: &AlgebraElement) -> Vec<FieldElem> {
        let full = self.reduce(a).coords();
        self.complement(a.degree()).into_iter().map(|k| full[k].clone()).collect()
    }

    pub fn from_coords(&self, e: usize, v: &[FieldElem]) -> AlgebraElement {
        let mut full = vec![self.field().zero(); self.base.dim(e)];
        for (k, c) in self.complement(e).into_iter().zip(v) {
            full[k] = c.clone();
        }
        AlgebraElement::from_coords(&self.base, e, &full)
    }

    /// The twisted image `b -> sigma_1^i(sigma_2^i(...(b)))`.
    pub fn twist_image(&self, i: usize, b: &AlgebraElement) -> AlgebraElement {
        let mut out = b.clone();
        for layer in self.layers.iter().rev() {
            out = layer.pow(i as i64).apply(&out);
        }
        out
    }

    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        if a.is_zero() || b.is_zero() {
            return self.zero(a.degree() + b.degree());
        }
        let prod = a.mul(&self.twist_image(a.degree(), b));
        self.reduce(&prod)
    }

    pub fn checked_mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        if a.algebra() != &self.base || b.algebra() != &self.base {
            return Err(Error::MixedAlgebras);
        }
        Ok(self.mul(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn free_sq() -> Algebra {
        Algebra::free(q(), 2, &[0, 1]).unwrap()
    }

    fn worked_f(s: &Algebra) -> AlgebraElement {
        s.normal_form(&[(q().from_i64(2), vec![0, 1]), (q().one(), vec![1, 0])]).unwrap()
    }

    #[test]
    fn quotient_window() {
        let s = free_sq();
        let a = Ring::quotient(&s, &worked_f(&s)).unwrap();
        // (1+t)^2 truncated
        assert_eq!(a.hilbert_window(3), vec![1, 2, 1, 0]);
        let zero = Ring::quotient(&s, &s.zero(2)).unwrap();
        assert_eq!(zero.hilbert_window(5), s.hilbert_window(5));
    }

    #[test]
    fn squares_of_last_generator() {
        let t = Algebra::polynomial(q(), 3).unwrap();
        let sq = Algebra::skew(q(), vec![vec![q().from_i64(-1); 3]; 3], &[0, 1]).unwrap();
        let f = sq.gen(2).mul(&sq.gen(2));
        let a = Ring::quotient(&sq, &f).unwrap();
        // normal words killed by x3^2: none in degree <= 1, x3^2 in degree 2
        assert_eq!(a.hilbert_window(2), vec![1, 3, 3]);
        assert_eq!(a.hilbert_window(4), vec![1, 3, 3, 1, 0]);
        assert_eq!(t.dim(2), 6);
    }

    #[test]
    fn twisted_swap_product() {
        let t = Algebra::polynomial(q(), 2).unwrap();
        let m = Matrix::from_rows(q(), vec![vec![q().zero(), q().one()], vec![q().one(), q().zero()]]);
        let swap = GradedAutomorphism::new(&t, m).unwrap();
        let tw = Ring::new(&t).twisted(&swap).unwrap();
        assert_eq!(tw.mul(&t.gen(0), &t.gen(0)), t.gen(0).mul(&t.gen(1)));
    }

    #[test]
    fn quotient_products_are_reduced() {
        let s = free_sq();
        let f = worked_f(&s);
        let a = Ring::quotient(&s, &f).unwrap();
        assert!(a.is_zero(&f));
        let xy = s.gen(0).mul(&s.gen(1));
        let yx = s.gen(1).mul(&s.gen(0));
        assert_eq!(a.reduce(&xy), a.reduce(&yx.scale(&q().from_ratio(-1, 2).unwrap())));
    }

    proptest! {
        #[test]
        fn twisted_product_is_associative_and_untwists(d0 in 1i64..13, d1 in 1i64..13, cs in proptest::collection::vec(0i64..13, 6)) {
            let f = FieldSpec::PrimeField { p: 13 };
            let s = Algebra::free(f, 2, &[0, 1]).unwrap();
            let sigma = GradedAutomorphism::diagonal(&s, &[f.from_i64(d0), f.from_i64(d1)]).unwrap();
            let r = Ring::new(&s).twisted(&sigma).unwrap();
            let el = |a: i64, b: i64| s.gen(0).scale(&f.from_i64(a)).add(&s.gen(1).scale(&f.from_i64(b)));
            let (x, y, z) = (el(cs[0], cs[1]), el(cs[2], cs[3]), el(cs[4], cs[5]));
            prop_assert_eq!(r.mul(&r.mul(&x, &y), &z), r.mul(&x, &r.mul(&y, &z)));
            prop_assert_eq!(r.mul(&r.one(), &x), x.clone());
            // twisting the twisted ring by the inverse recovers the base product
            let back = r.twisted(&sigma.inverse()).unwrap();
            let xy = back.mul(&x, &y);
            prop_assert_eq!(xy, x.mul(&y));
        }
    }
}
