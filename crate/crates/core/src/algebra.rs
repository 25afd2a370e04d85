//! Graded algebras generated in degree one by `x1..xn`, presented either by
//! skew-commutation rules or freely, optionally with square-zero
//! generators. Both shapes give a confluent rewriting system whose normal
//! words form a basis, so all arithmetic is done on normal forms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Subspace};
use crate::scalar::{FieldElem, FieldSpec, Order};
use num_traits::Signed;

/// Generator indices, 0-based (`0` prints as `x1`).
pub type Word = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Commutation {
    /// `x_j x_i = -alpha[i][j] x_i x_j` for `i < j`; `alpha[i][j] * alpha[j][i] = 1`.
    Skew(Vec<Vec<FieldElem>>),
    Free,
}

#[derive(Debug)]
struct Inner {
    field: FieldSpec,
    n: usize,
    commutation: Commutation,
    square_zero: Vec<bool>,
    bases: Mutex<HashMap<usize, Arc<Basis>>>,
}

/// The normal words of one degree, in length-lex order.
#[derive(Debug)]
pub struct Basis {
    pub words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn position(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }
}

/// A presented graded algebra. Cheap to clone; clones share the basis cache.
#[derive(Debug, Clone)]
pub struct Algebra(Arc<Inner>);

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.field == other.0.field
                && self.0.n == other.0.n
                && self.0.commutation == other.0.commutation
                && self.0.square_zero == other.0.square_zero)
    }
}

impl Eq for Algebra {}

impl Algebra {
    fn build(field: FieldSpec, n: usize, commutation: Commutation, square_zero: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPresentation("need at least one generator".into()));
        }
        let mut sz = vec![false; n];
        for &i in square_zero {
            if i >= n {
                return Err(Error::UnknownGenerator(i + 1));
            }
            sz[i] = true;
        }
        Ok(Algebra(Arc::new(Inner {
            field,
            n,
            commutation,
            square_zero: sz,
            bases: Mutex::new(HashMap::new()),
        })))
    }

    /// Skew presentation from the full `alpha` matrix (diagonal ignored).
    pub fn skew(field: FieldSpec, alpha: Vec<Vec<FieldElem>>, square_zero: &[usize]) -> Result<Self> {
        let n = alpha.len();
        if alpha.iter().any(|r| r.len() != n) {
            return Err(Error::BadAlpha("matrix is not square".into()));
        }
        let mut alpha = alpha;
        for i in 0..n {
            alpha[i][i] = field.one();
            for j in 0..n {
                if alpha[i][j].field() != field {
                    return Err(Error::MixedFields);
                }
                if i != j && !(&alpha[i][j] * &alpha[j][i]).is_one() {
                    return Err(Error::BadAlpha(format!(
                        "alpha[{}][{}] * alpha[{}][{}] != 1",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Self::build(field, n, Commutation::Skew(alpha), square_zero)
    }

    /// Skew presentation from the upper triangle `alpha[i][j]`, `i < j`.
    pub fn skew_from_upper(field: FieldSpec, n: usize, upper: &BTreeMap<(usize, usize), FieldElem>, square_zero: &[usize]) -> Result<Self> {
        let mut alpha = vec![vec![field.one(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let a = upper
                    .get(&(i, j))
                    .ok_or_else(|| Error::BadAlpha(format!("missing alpha for pair ({},{})", i + 1, j + 1)))?;
                alpha[j][i] = a.inv().map_err(|_| Error::BadAlpha("alpha entries must be nonzero".into()))?;
                alpha[i][j] = a.clone();
            }
        }
        Self::skew(field, alpha, square_zero)
    }

    /// The commutative polynomial ring in `n` variables.
    pub fn polynomial(field: FieldSpec, n: usize) -> Result<Self> {
        Self::skew(field, vec![vec![field.from_i64(-1); n]; n], &[])
    }

    /// The exterior algebra on `n` generators.
    pub fn exterior(field: FieldSpec, n: usize) -> Result<Self> {
        let all: Vec<usize> = (0..n).collect();
        Self::skew(field, vec![vec![field.one(); n]; n], &all)
    }

    pub fn free(field: FieldSpec, n: usize, square_zero: &[usize]) -> Result<Self> {
        Self::build(field, n, Commutation::Free, square_zero)
    }

    pub fn field(&self) -> FieldSpec {
        self.0.field
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn commutation(&self) -> &Commutation {
        &self.0.commutation
    }

    pub fn square_zero(&self) -> Vec<usize> {
        (0..self.0.n).filter(|&i| self.0.square_zero[i]).collect()
    }

    pub fn is_square_zero(&self, i: usize) -> bool {
        self.0.square_zero[i]
    }

    /// `alpha[i][j]` of a skew presentation.
    pub fn alpha(&self, i: usize, j: usize) -> Option<&FieldElem> {
        match &self.0.commutation {
            Commutation::Skew(a) => Some(&a[i][j]),
            Commutation::Free => None,
        }
    }

    /// Normal form of a single word: `None` when it reduces to zero.
    pub fn normalize_word(&self, word: &[usize]) -> Option<(FieldElem, Word)> {
        let field = self.field();
        match &self.0.commutation {
            Commutation::Free => {
                let killed = word
                    .windows(2)
                    .any(|p| p[0] == p[1] && self.0.square_zero[p[0]]);
                (!killed).then(|| (field.one(), word.to_vec()))
            }
            Commutation::Skew(alpha) => {
                let mut coef = field.one();
                for a in 0..word.len() {
                    for b in a + 1..word.len() {
                        let (hi, lo) = (word[a], word[b]);
                        if hi > lo {
                            coef = &coef * &(-&alpha[lo][hi]);
                        } else if hi == lo && self.0.square_zero[hi] {
                            return None;
                        }
                    }
                }
                let mut sorted = word.to_vec();
                sorted.sort_unstable();
                Some((coef, sorted))
            }
        }
    }

    pub fn is_normal_word(&self, word: &[usize]) -> bool {
        match &self.0.commutation {
            Commutation::Free => !word
                .windows(2)
                .any(|p| p[0] == p[1] && self.0.square_zero[p[0]]),
            Commutation::Skew(_) => word
                .windows(2)
                .all(|p| p[0] < p[1] || (p[0] == p[1] && !self.0.square_zero[p[0]])),
        }
    }

    /// Normal words of length `e` in length-lex order.
    pub fn basis(&self, e: usize) -> Arc<Basis> {
        if let Some(b) = self.0.bases.lock().expect("basis cache poisoned").get(&e) {
            return Arc::clone(b);
        }
        let mut words = Vec::new();
        let mut cur = Vec::with_capacity(e);
        self.enumerate(e, &mut cur, &mut words);
        let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let basis = Arc::new(Basis { words, index });
        let mut cache = self.0.bases.lock().expect("basis cache poisoned");
        Arc::clone(cache.entry(e).or_insert(basis))
    }

    fn enumerate(&self, e: usize, cur: &mut Word, out: &mut Vec<Word>) {
        if cur.len() == e {
            out.push(cur.clone());
            return;
        }
        for i in 0..self.0.n {
            if let Some(&last) = cur.last() {
                let ok = match self.0.commutation {
                    Commutation::Free => !(last == i && self.0.square_zero[i]),
                    Commutation::Skew(_) => last < i || (last == i && !self.0.square_zero[i]),
                };
                if !ok {
                    continue;
                }
            }
            cur.push(i);
            self.enumerate(e, cur, out);
            cur.pop();
        }
    }

    pub fn dim(&self, e: usize) -> usize {
        self.basis(e).len()
    }

    pub fn hilbert_window(&self, n: usize) -> Vec<usize> {
        (0..=n).map(|e| self.dim(e)).collect()
    }

    pub fn zero(&self, degree: usize) -> AlgebraElement {
        AlgebraElement {
            alg: self.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> AlgebraElement {
        self.scalar(self.field().one())
    }

    pub fn scalar(&self, c: FieldElem) -> AlgebraElement {
        self.monomial(c, Vec::new())
    }

    pub fn gen(&self, i: usize) -> AlgebraElement {
        self.monomial(self.field().one(), vec![i])
    }

    /// `c * word`, reduced to normal form.
    pub fn monomial(&self, c: FieldElem, word: Word) -> AlgebraElement {
        let degree = word.len();
        let mut out = self.zero(degree);
        out.add_word(&c, &word);
        out
    }

    /// Normal form of a formal sum of words.
    pub fn normal_form(&self, terms: &[(FieldElem, Word)]) -> Result<AlgebraElement> {
        let degree = terms.first().map_or(0, |t| t.1.len());
        let mut out = self.zero(degree);
        for (c, w) in terms {
            if w.len() != degree {
                return Err(Error::InhomogeneousInput(format!(
                    "words of lengths {degree} and {}",
                    w.len()
                )));
            }
            if let Some(&bad) = w.iter().find(|&&i| i >= self.n()) {
                return Err(Error::UnknownGenerator(bad + 1));
            }
            if c.field() != self.field() {
                return Err(Error::MixedFields);
            }
            out.add_word(c, w);
        }
        Ok(out)
    }

    /// The linear span of the degree-2 defining relations inside `V (x) V`.
    pub fn relations(&self) -> QuadraticRelations {
        let n = self.n();
        let field = self.field();
        let mut vecs = Vec::new();
        for i in 0..n {
            if self.0.square_zero[i] {
                let mut v = vec![field.zero(); n * n];
                v[i * n + i] = field.one();
                vecs.push(v);
            }
        }
        if let Commutation::Skew(alpha) = &self.0.commutation {
            for i in 0..n {
                for j in i + 1..n {
                    let mut v = vec![field.zero(); n * n];
                    v[i * n + j] = alpha[i][j].clone();
                    v[j * n + i] = field.one();
                    vecs.push(v);
                }
            }
        }
        QuadraticRelations::new(field, n, &vecs)
    }

    /// The relation list as formal sums of words in the free algebra.
    pub fn relation_words(&self) -> Vec<Vec<(FieldElem, Word)>> {
        let n = self.n();
        self.relations()
            .space
            .basis()
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (c.clone(), vec![k / n, k % n]))
                    .collect()
            })
            .collect()
    }

    /// The opposite algebra; [`AlgebraElement::reversed`] maps into it.
    pub fn opposite(&self) -> Algebra {
        let sz = self.square_zero();
        match &self.0.commutation {
            Commutation::Free => Algebra::free(self.field(), self.n(), &sz).expect("valid presentation"),
            Commutation::Skew(alpha) => {
                let n = self.n();
                let t = (0..n).map(|i| (0..n).map(|j| alpha[j][i].clone()).collect()).collect();
                Algebra::skew(self.field(), t, &sz).expect("transpose of a valid alpha")
            }
        }
    }

    /// Left multiplication by `a` as a field matrix `S_e -> S_{e + deg a}`.
    pub fn left_mult_matrix(&self, a: &AlgebraElement, e: usize) -> Matrix {
        let src = self.basis(e);
        let cols: Vec<Vec<FieldElem>> = src
            .words
            .iter()
            .map(|w| a.mul(&self.monomial(self.field().one(), w.clone())).coords())
            .collect();
        Matrix::from_columns(self.field(), self.dim(e + a.degree), &cols)
    }

    pub fn right_mult_matrix(&self, a: &AlgebraElement, e: usize) -> Matrix {
        let src = self.basis(e);
        let cols: Vec<Vec<FieldElem>> = src
            .words
            .iter()
            .map(|w| self.monomial(self.field().one(), w.clone()).mul(a).coords())
            .collect();
        Matrix::from_columns(self.field(), self.dim(e + a.degree), &cols)
    }

    /// Whether left and right multiplication by `f` are injective on every
    /// degree `e <= window`.
    pub fn is_regular_window(&self, f: &AlgebraElement, window: usize) -> bool {
        (0..=window).all(|e| {
            let d = self.dim(e);
            self.left_mult_matrix(f, e).rank() == d && self.right_mult_matrix(f, e).rank() == d
        })
    }

    /// Solves `x_j f = f nu(x_j)` for the linear map `nu`, then certifies
    /// that it is an automorphism and that `f` is regular on the window.
    pub fn normalizing_automorphism(&self, f: &AlgebraElement, window: usize) -> Result<NormalElement> {
        if f.is_zero() || f.degree == 0 {
            return Err(Error::NotNormal("need a nonzero element of positive degree".into()));
        }
        let field = self.field();
        let n = self.n();
        let fx: Vec<Vec<FieldElem>> = (0..n).map(|k| f.mul(&self.gen(k)).coords()).collect();
        let system = Matrix::from_columns(field, self.dim(f.degree + 1), &fx);
        let mut rows = Vec::with_capacity(n);
        for j in 0..n {
            let rhs = self.gen(j).mul(f).coords();
            let (sol, _) = system
                .solve(&rhs)
                .ok_or_else(|| Error::NotNormal(format!("x{} f is not in f S_1", j + 1)))?;
            rows.push(sol);
        }
        let nu = GradedAutomorphism::new(self, Matrix::from_rows(field, rows)).map_err(|e| match e {
            Error::Singular => Error::NotNormal("normalizing map is singular".into()),
            _ => Error::NotNormal("normalizing map does not preserve relations".into()),
        })?;
        if !self.is_regular_window(f, window) {
            return Err(Error::NotRegularInWindow { window });
        }
        Ok(NormalElement {
            f: f.clone(),
            nu,
            window,
        })
    }
}

/// A homogeneous element in normal form.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    alg: Algebra,
    degree: usize,
    terms: BTreeMap<Word, FieldElem>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg
            && self.terms == other.terms
            && (self.degree == other.degree || self.terms.is_empty())
    }
}

impl Eq for AlgebraElement {}

impl AlgebraElement {
    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Word, FieldElem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The same element tagged with another degree; only meaningful for zero.
    pub fn with_degree(mut self, degree: usize) -> Self {
        if self.terms.is_empty() {
            self.degree = degree;
        }
        self
    }

    fn add_word(&mut self, c: &FieldElem, word: &[usize]) {
        if c.is_zero() {
            return;
        }
        if let Some((k, w)) = self.alg.normalize_word(word) {
            self.add_normal(&(c * &k), w);
        }
    }

    fn add_normal(&mut self, c: &FieldElem, w: Word) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                *v = &*v + c;
                if v.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    fn combine(&self, other: &Self, sign: &FieldElem) -> Self {
        assert!(self.alg == other.alg, "elements of different algebras");
        let degree = if self.terms.is_empty() {
            other.degree
        } else {
            assert!(
                other.terms.is_empty() || self.degree == other.degree,
                "adding elements of degrees {} and {}",
                self.degree,
                other.degree
            );
            self.degree
        };
        let mut out = self.clone();
        out.degree = degree;
        for (w, c) in &other.terms {
            out.add_normal(&(c * sign), w.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, &self.alg.field().one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, &self.alg.field().from_i64(-1))
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.alg.field().from_i64(-1))
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        let mut out = self.alg.zero(self.degree);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect();
        out
    }

    /// Product in the algebra; panics on mixed algebras.
    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("product of elements from different algebras")
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.alg != other.alg {
            return Err(Error::MixedAlgebras);
        }
        let mut out = self.alg.zero(self.degree + other.degree);
        let mut word = Vec::with_capacity(self.degree + other.degree);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                word.clear();
                word.extend_from_slice(w1);
                word.extend_from_slice(w2);
                out.add_word(&(c1 * c2), &word);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = self.alg.one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Coordinates in `basis(degree)`.
    pub fn coords(&self) -> Vec<FieldElem> {
        let basis = self.alg.basis(self.degree);
        let mut v = vec![self.alg.field().zero(); basis.len()];
        for (w, c) in &self.terms {
            v[basis.position(w).expect("normal word is in the basis")] = c.clone();
        }
        v
    }

    pub fn from_coords(alg: &Algebra, degree: usize, coords: &[FieldElem]) -> Self {
        let basis = alg.basis(degree);
        let mut out = alg.zero(degree);
        for (w, c) in basis.words.iter().zip(coords) {
            if !c.is_zero() {
                out.terms.insert(w.clone(), c.clone());
            }
        }
        out
    }

    /// The coefficient of the empty word, when the element has degree 0.
    pub fn as_scalar(&self) -> Option<FieldElem> {
        if self.terms.is_empty() {
            return Some(self.alg.field().zero());
        }
        (self.degree == 0).then(|| self.terms[&Vec::new()].clone())
    }

    /// Whether `self = c * other` for a scalar `c`, returning `c`.
    pub fn scalar_ratio(&self, other: &Self) -> Option<FieldElem> {
        let field = self.alg.field();
        if other.is_zero() {
            return self.is_zero().then(|| field.zero());
        }
        let (w, c) = other.terms.iter().next().expect("nonzero");
        let lambda = self.terms.get(w).cloned().unwrap_or_else(|| field.zero()).checked_div(c).ok()?;
        (other.scale(&lambda) == *self).then_some(lambda)
    }

    /// Word reversal into the opposite algebra `opp`.
    pub fn reversed(&self, opp: &Algebra) -> Self {
        let mut out = opp.zero(self.degree);
        for (w, c) in &self.terms {
            let r: Word = w.iter().rev().copied().collect();
            out.add_word(c, &r);
        }
        out
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let basis = self.alg.basis(self.degree);
        let mut terms: Vec<(&Word, &FieldElem)> = self.terms.iter().collect();
        terms.sort_by_key(|(w, _)| basis.position(w));
        for (k, (w, c)) in terms.into_iter().enumerate() {
            let (negative, mag) = match c {
                FieldElem::Rational(r) if r.is_negative() => (true, -c),
                _ => (false, c.clone()),
            };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts = Vec::new();
            if !mag.is_one() || w.is_empty() {
                parts.push(mag.to_string());
            }
            let mut i = 0;
            while i < w.len() {
                let mut j = i;
                while j < w.len() && w[j] == w[i] {
                    j += 1;
                }
                if j - i == 1 {
                    parts.push(format!("x{}", w[i] + 1));
                } else {
                    parts.push(format!("x{}^{}", w[i] + 1, j - i));
                }
                i = j;
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// A graded algebra automorphism given by its action on generators:
/// `x_j -> sum_k matrix[j][k] x_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedAutomorphism {
    alg: Algebra,
    matrix: Matrix,
}

impl GradedAutomorphism {
    pub fn new(alg: &Algebra, matrix: Matrix) -> Result<Self> {
        let n = alg.n();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Input(format!("automorphism matrix must be {n}x{n}")));
        }
        if matrix.field() != alg.field() {
            return Err(Error::MixedFields);
        }
        if !matrix.is_invertible() {
            return Err(Error::Singular);
        }
        let sigma = GradedAutomorphism {
            alg: alg.clone(),
            matrix,
        };
        for rel in alg.relation_words() {
            let mut acc = alg.zero(2);
            for (c, w) in rel {
                let img = sigma.image_of_gen(w[0]).mul(&sigma.image_of_gen(w[1]));
                acc = acc.add(&img.scale(&c));
            }
            if !acc.is_zero() {
                return Err(Error::RelationNotPreserved);
            }
        }
        Ok(sigma)
    }

    pub fn identity(alg: &Algebra) -> Self {
        GradedAutomorphism {
            alg: alg.clone(),
            matrix: Matrix::identity(alg.field(), alg.n()),
        }
    }

    pub fn diagonal(alg: &Algebra, diag: &[FieldElem]) -> Result<Self> {
        let mut m = Matrix::zeros(alg.field(), alg.n(), alg.n());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        Self::new(alg, m)
    }

    /// Scaling every generator by `mu`.
    pub fn scaling(alg: &Algebra, mu: &FieldElem) -> Result<Self> {
        Self::diagonal(alg, &vec![mu.clone(); alg.n()])
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn image_of_gen(&self, j: usize) -> AlgebraElement {
        let coords = self.matrix.row(j).to_vec();
        AlgebraElement::from_coords(&self.alg, 1, &coords)
    }

    pub fn apply(&self, a: &AlgebraElement) -> AlgebraElement {
        if self.is_identity() {
            return a.clone();
        }
        let images: Vec<AlgebraElement> = (0..self.alg.n()).map(|j| self.image_of_gen(j)).collect();
        let mut out = self.alg.zero(a.degree());
        for (w, c) in a.terms() {
            let mut prod = self.alg.scalar(c.clone());
            for &l in w {
                prod = prod.mul(&images[l]);
            }
            out = out.add(&prod);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == Matrix::identity(self.alg.field(), self.alg.n())
    }

    /// `self` after `other`: `x -> self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        GradedAutomorphism {
            alg: self.alg.clone(),
            matrix: other.matrix.mul(&self.matrix),
        }
    }

    pub fn inverse(&self) -> Self {
        GradedAutomorphism {
            alg: self.alg.clone(),
            matrix: self.matrix.inverse().expect("automorphism matrices are invertible"),
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(&self.alg);
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// The least `m <= max` with `self^m = id`.
    pub fn order(&self, max: u64) -> Order {
        let mut acc = self.clone();
        for m in 1..=max {
            if acc.is_identity() {
                return Order::Finite(m);
            }
            acc = acc.compose(self);
        }
        Order::Infinite
    }

    /// The same linear map viewed on the opposite algebra.
    pub fn on_opposite(&self, opp: &Algebra) -> Self {
        GradedAutomorphism {
            alg: opp.clone(),
            matrix: self.matrix.clone(),
        }
    }

    /// The scalar `lambda` with `self(f) = lambda f`, if any.
    pub fn eigenvalue(&self, f: &AlgebraElement) -> Option<FieldElem> {
        self.apply(f).scalar_ratio(f)
    }
}

/// A normal element `f` with `a f = f nu(a)`, regular on `window`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalElement {
    pub f: AlgebraElement,
    pub nu: GradedAutomorphism,
    pub window: usize,
}

impl NormalElement {
    pub fn degree(&self) -> usize {
        self.f.degree()
    }

    pub fn algebra(&self) -> &Algebra {
        self.f.algebra()
    }

    /// `nu^k` for any integer `k`.
    pub fn nu_pow(&self, k: i64) -> GradedAutomorphism {
        self.nu.pow(k)
    }
}

/// A subspace of `V (x) V` (coordinates `i * n + j` for `x_i x_j`).
#[derive(Debug, Clone)]
pub struct QuadraticRelations {
    pub n: usize,
    space: Subspace,
}

impl PartialEq for QuadraticRelations {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.space.field() == other.space.field()
            && self.space.rank() == other.space.rank()
            && other.space.basis().iter().all(|v| self.space.contains(v))
    }
}

impl QuadraticRelations {
    pub fn new(field: FieldSpec, n: usize, vectors: &[Vec<FieldElem>]) -> Self {
        QuadraticRelations {
            n,
            space: Subspace::spanned_by(field, n * n, vectors),
        }
    }

    pub fn dim(&self) -> usize {
        self.space.rank()
    }

    pub fn basis(&self) -> &[Vec<FieldElem>] {
        self.space.basis()
    }

    /// The annihilator under the pairing `<x_i x_j, y_k y_l> = delta`.
    pub fn orthogonal(&self) -> Self {
        let field = self.space.field();
        let n2 = self.n * self.n;
        let perp = if self.space.rank() == 0 {
            (0..n2)
                .map(|k| {
                    let mut v = vec![field.zero(); n2];
                    v[k] = field.one();
                    v
                })
                .collect()
        } else {
            Matrix::from_rows(field, self.space.basis().to_vec()).nullspace()
        };
        QuadraticRelations::new(field, self.n, &perp)
    }

    pub fn contains(&self, v: &[FieldElem]) -> bool {
        self.space.contains(v)
    }

    fn unit(&self, i: usize, j: usize) -> Vec<FieldElem> {
        let field = self.space.field();
        let mut v = vec![field.zero(); self.n * self.n];
        v[i * self.n + j] = field.one();
        v
    }

    /// Recognizes a skew or free square-zero presentation with exactly
    /// these relations.
    pub fn recognize(&self) -> Option<Algebra> {
        let field = self.space.field();
        let n = self.n;
        let z: Vec<usize> = (0..n).filter(|&i| self.contains(&self.unit(i, i))).collect();
        let mut upper = BTreeMap::new();
        let mut skew_ok = true;
        'pairs: for i in 0..n {
            for j in i + 1..n {
                let r_ij = self.space.reduce(&self.unit(i, j));
                let r_ji = self.space.reduce(&self.unit(j, i));
                let Some(k) = r_ij.iter().position(|c| !c.is_zero()) else {
                    skew_ok = false;
                    break 'pairs;
                };
                // need r_ji + beta r_ij = 0 with beta nonzero
                let beta = -(&r_ji[k] / &r_ij[k]);
                let consistent = r_ij.iter().zip(&r_ji).all(|(a, b)| (b + &(&beta * a)).is_zero());
                if !consistent || beta.is_zero() {
                    skew_ok = false;
                    break 'pairs;
                }
                upper.insert((i, j), beta);
            }
        }
        if skew_ok {
            if let Ok(alg) = Algebra::skew_from_upper(field, n, &upper, &z) {
                if alg.relations() == *self {
                    return Some(alg);
                }
            }
        }
        let free = Algebra::free(field, n, &z).ok()?;
        (free.relations() == *self).then_some(free)
    }
}

/// The quadratic dual, as a presented algebra when its relations have a
/// representable shape.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadraticDual {
    Presented(Algebra),
    Raw(QuadraticRelations),
}

impl QuadraticDual {
    pub fn relations(&self) -> QuadraticRelations {
        match self {
            QuadraticDual::Presented(a) => a.relations(),
            QuadraticDual::Raw(r) => r.clone(),
        }
    }
}

pub fn quadratic_dual_of_relations(rel: &QuadraticRelations) -> QuadraticDual {
    let perp = rel.orthogonal();
    match perp.recognize() {
        Some(a) => QuadraticDual::Presented(a),
        None => QuadraticDual::Raw(perp),
    }
}

pub fn quadratic_dual(alg: &Algebra) -> QuadraticDual {
    quadratic_dual_of_relations(&alg.relations())
}
