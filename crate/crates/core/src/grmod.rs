//! Graded free modules `(+)_s R(-m_s)` and graded matrices between them,
//! realized degree by degree as field matrices.
//!
//! A graded matrix acts on columns by left multiplication, so its columns
//! are images of the source generators. Module elements of degree `e` are
//! columns whose component `s` has degree `e - shift[s]`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Subspace};
use crate::par;
use crate::ring::Ring;
use crate::scalar::FieldElem;

pub type Shifts = Vec<i64>;

/// Ring degree of component `s` in module degree `e`, if nonnegative.
fn comp_degree(shift: i64, e: i64) -> Option<usize> {
    usize::try_from(e - shift).ok()
}

pub fn block_dims(ring: &Ring, shifts: &[i64], e: i64) -> Vec<usize> {
    shifts
        .iter()
        .map(|&m| comp_degree(m, e).map_or(0, |k| ring.dim(k)))
        .collect()
}

/// Coordinates of a module element of degree `e`.
pub fn column_coords(ring: &Ring, shifts: &[i64], e: i64, col: &[AlgebraElement]) -> Vec<FieldElem> {
    let mut out = Vec::new();
    for (&m, a) in shifts.iter().zip(col) {
        if let Some(k) = comp_degree(m, e) {
            if a.is_zero() {
                out.extend(std::iter::repeat_n(ring.field().zero(), ring.dim(k)));
            } else {
                debug_assert_eq!(a.degree(), k, "component has the wrong degree");
                out.extend(ring.coords(a));
            }
        }
    }
    out
}

pub fn column_from_coords(ring: &Ring, shifts: &[i64], e: i64, v: &[FieldElem]) -> Vec<AlgebraElement> {
    let mut pos = 0;
    shifts
        .iter()
        .map(|&m| match comp_degree(m, e) {
            Some(k) => {
                let d = ring.dim(k);
                let a = ring.from_coords(k, &v[pos..pos + d]);
                pos += d;
                a
            }
            None => ring.zero(0),
        })
        .collect()
}

/// Right multiplication of a column by a ring element.
pub fn column_times(ring: &Ring, col: &[AlgebraElement], r: &AlgebraElement) -> Vec<AlgebraElement> {
    col.iter().map(|a| ring.mul(a, r)).collect()
}

/// The degrees `lo..=lo + n` where `lo` is the lowest shift involved.
pub fn window_degrees(shift_sets: &[&[i64]], n: usize) -> RangeInclusive<i64> {
    let lo = shift_sets.iter().flat_map(|s| s.iter()).copied().min().unwrap_or(0);
    lo..=lo + n as i64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMatrix {
    ring: Ring,
    target: Shifts,
    source: Shifts,
    entries: Vec<Vec<AlgebraElement>>,
}

impl GradedMatrix {
    pub fn new(ring: &Ring, target: Shifts, source: Shifts, entries: Vec<Vec<AlgebraElement>>) -> Result<Self> {
        if entries.len() != target.len() || entries.iter().any(|r| r.len() != source.len()) {
            return Err(Error::ShiftMismatch(format!(
                "entries do not form a {}x{} matrix",
                target.len(),
                source.len()
            )));
        }
        let mut clean = Vec::with_capacity(entries.len());
        for (s, row) in entries.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (t, a) in row.into_iter().enumerate() {
                if a.algebra() != ring.base() {
                    return Err(Error::MixedAlgebras);
                }
                let need = source[t] - target[s];
                let a = ring.reduce(&a);
                if a.is_zero() {
                    out.push(a.with_degree(need.max(0) as usize));
                } else if need < 0 || a.degree() as i64 != need {
                    return Err(Error::EntryDegree {
                        row: s,
                        col: t,
                        expected: need,
                        found: a.degree(),
                    });
                } else {
                    out.push(a);
                }
            }
            clean.push(out);
        }
        Ok(GradedMatrix {
            ring: ring.clone(),
            target,
            source,
            entries: clean,
        })
    }

    pub fn zero(ring: &Ring, target: Shifts, source: Shifts) -> Self {
        let entries = target
            .iter()
            .map(|&m| source.iter().map(|&n| ring.zero((n - m).max(0) as usize)).collect())
            .collect();
        GradedMatrix {
            ring: ring.clone(),
            target,
            source,
            entries,
        }
    }

    /// `c` times the identity on `(+) R(-m)`, from `R(-m - deg c)`.
    pub fn diagonal(ring: &Ring, shifts: &[i64], c: &AlgebraElement) -> Self {
        let d = c.degree() as i64;
        let source: Shifts = shifts.iter().map(|m| m + d).collect();
        let mut out = Self::zero(ring, shifts.to_vec(), source);
        for i in 0..shifts.len() {
            out.entries[i][i] = ring.reduce(c);
        }
        out
    }

    pub fn identity(ring: &Ring, shifts: &[i64]) -> Self {
        Self::diagonal(ring, shifts, &ring.one())
    }

    /// A degree-preserving matrix with scalar entries.
    pub fn from_scalars(ring: &Ring, target: Shifts, source: Shifts, m: &Matrix) -> Result<Self> {
        let entries = (0..target.len())
            .map(|s| (0..source.len()).map(|t| ring.scalar(m.get(s, t).clone())).collect())
            .collect();
        Self::new(ring, target, source, entries)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn target(&self) -> &[i64] {
        &self.target
    }

    pub fn source(&self) -> &[i64] {
        &self.source
    }

    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn cols(&self) -> usize {
        self.source.len()
    }

    pub fn entry(&self, s: usize, t: usize) -> &AlgebraElement {
        &self.entries[s][t]
    }

    pub fn entries(&self) -> &[Vec<AlgebraElement>] {
        &self.entries
    }

    pub fn required_degree(&self, s: usize, t: usize) -> i64 {
        self.source[t] - self.target[s]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(AlgebraElement::is_zero)
    }

    pub fn column(&self, t: usize) -> Vec<AlgebraElement> {
        self.entries.iter().map(|r| r[t].clone()).collect()
    }

    /// `self * other`.
    pub fn compose(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        if self.source != other.target {
            return Err(Error::ShiftMismatch(format!(
                "source {:?} does not match target {:?}",
                self.source, other.target
            )));
        }
        if self.ring != other.ring {
            return Err(Error::MixedAlgebras);
        }
        let mut out = Self::zero(&self.ring, self.target.clone(), other.source.clone());
        for s in 0..self.rows() {
            for t in 0..other.cols() {
                let mut acc = out.entries[s][t].clone();
                for k in 0..self.cols() {
                    let (a, b) = (&self.entries[s][k], &other.entries[k][t]);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&self.ring.mul(a, b));
                    }
                }
                out.entries[s][t] = self.ring.reduce(&acc);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShiftMismatch("sum of matrices with different shifts".into()));
        }
        let mut out = self.clone();
        for s in 0..self.rows() {
            for t in 0..self.cols() {
                out.entries[s][t] = self.entries[s][t].add(&other.entries[s][t]);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &FieldElem) -> GradedMatrix {
        self.map_entries(|a| a.scale(c))
    }

    /// Applies a degree-preserving map to every entry.
    pub fn map_entries(&self, f: impl Fn(&AlgebraElement) -> AlgebraElement) -> GradedMatrix {
        let mut out = self.clone();
        for row in &mut out.entries {
            for a in row.iter_mut() {
                *a = self.ring.reduce(&f(a));
            }
        }
        out
    }

    /// Applies a degree-preserving map row by row.
    pub fn map_rows(&self, f: impl Fn(usize, &AlgebraElement) -> AlgebraElement) -> GradedMatrix {
        let mut out = self.clone();
        for (s, row) in out.entries.iter_mut().enumerate() {
            for a in row.iter_mut() {
                *a = self.ring.reduce(&f(s, a));
            }
        }
        out
    }

    /// Both shift vectors moved by `k`.
    pub fn shifted(&self, k: i64) -> GradedMatrix {
        let mut out = self.clone();
        out.target.iter_mut().for_each(|m| *m += k);
        out.source.iter_mut().for_each(|m| *m += k);
        out
    }

    /// The same entries read in another ring over the same base algebra.
    pub fn over(&self, ring: &Ring) -> Result<GradedMatrix> {
        Self::new(ring, self.target.clone(), self.source.clone(), self.entries.clone())
    }

    pub fn with_ring_unchecked(&self, ring: &Ring) -> GradedMatrix {
        GradedMatrix {
            ring: ring.clone(),
            ..self.clone()
        }
    }

    pub fn block_diag(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        if self.ring != other.ring {
            return Err(Error::MixedContexts);
        }
        let target: Shifts = self.target.iter().chain(&other.target).copied().collect();
        let source: Shifts = self.source.iter().chain(&other.source).copied().collect();
        let mut out = Self::zero(&self.ring, target, source);
        for s in 0..self.rows() {
            for t in 0..self.cols() {
                out.entries[s][t] = self.entries[s][t].clone();
            }
        }
        for s in 0..other.rows() {
            for t in 0..other.cols() {
                out.entries[self.rows() + s][self.cols() + t] = other.entries[s][t].clone();
            }
        }
        Ok(out)
    }

    /// Degree-zero entries as a scalar matrix (zero where the entry has
    /// positive degree).
    pub fn scalar_part(&self) -> Matrix {
        let field = self.ring.field();
        let mut m = Matrix::zeros(field, self.rows(), self.cols());
        for s in 0..self.rows() {
            for t in 0..self.cols() {
                if self.required_degree(s, t) == 0 {
                    m.set(s, t, self.entries[s][t].as_scalar().expect("degree-0 entry"));
                }
            }
        }
        m
    }

    /// Whether the matrix has a nonzero entry of degree 0.
    pub fn has_unit_entry(&self) -> bool {
        (0..self.rows()).any(|s| (0..self.cols()).any(|t| self.required_degree(s, t) == 0 && !self.entries[s][t].is_zero()))
    }

    /// `self` applied to a module element of degree `e`.
    pub fn apply(&self, e: i64, col: &[AlgebraElement]) -> Vec<AlgebraElement> {
        (0..self.rows())
            .map(|s| {
                let mut acc = self.ring.zero(comp_degree(self.target[s], e).unwrap_or(0));
                for (t, v) in col.iter().enumerate() {
                    let a = &self.entries[s][t];
                    if !a.is_zero() && !v.is_zero() {
                        acc = acc.add(&self.ring.mul(a, v));
                    }
                }
                self.ring.reduce(&acc)
            })
            .collect()
    }

    /// The field matrix of `self` on degree `e`, in the canonical bases of
    /// `(+)_t R_{e - source[t]}` and `(+)_s R_{e - target[s]}`.
    pub fn degreewise_map(&self, e: i64) -> Matrix {
        let field = self.ring.field();
        let rows: usize = block_dims(&self.ring, &self.target, e).iter().sum();
        let mut cols = Vec::new();
        for (t, &m) in self.source.iter().enumerate() {
            let Some(k) = comp_degree(m, e) else { continue };
            for w in self.ring.basis_words(k) {
                let basis_elem = self.ring.reduce(&self.ring.base().monomial(field.one(), w));
                let mut col = vec![self.ring.zero(0); self.cols()];
                col[t] = basis_elem;
                let img = self.apply(e, &col);
                cols.push(column_coords(&self.ring, &self.target, e, &img));
            }
        }
        Matrix::from_columns(field, rows, &cols)
    }

    /// Kernel bases on the degrees of `window_degrees`.
    pub fn kernel_window(&self, n: usize) -> Vec<(i64, Vec<Vec<FieldElem>>)> {
        let degrees: Vec<i64> = window_degrees(&[&self.source, &self.target], n).collect();
        par::map(&degrees, |&e| (e, self.degreewise_map(e).nullspace()))
    }

    /// Whether the map is injective on every degree of the window.
    pub fn injective_window(&self, n: usize) -> std::result::Result<(), i64> {
        let degrees: Vec<i64> = window_degrees(&[&self.source, &self.target], n).collect();
        let bad = par::find_first(degrees.len(), |k| {
            let m = self.degreewise_map(degrees[k]);
            (m.rank() < m.cols()).then_some(degrees[k])
        });
        bad.map_or(Ok(()), Err)
    }

    /// Some `v` of degree `e` with `self v = w`, and whether it is unique.
    pub fn solve_preimage(&self, e: i64, w: &[AlgebraElement]) -> Result<(Vec<AlgebraElement>, bool)> {
        if w.len() != self.rows() {
            return Err(Error::ShiftMismatch("right-hand side has the wrong length".into()));
        }
        let rhs = column_coords(&self.ring, &self.target, e, w);
        let m = self.degreewise_map(e);
        let (x, unique) = m.solve(&rhs).ok_or(Error::NoSolution)?;
        Ok((column_from_coords(&self.ring, &self.source, e, &x), unique))
    }

    /// The matrix with row `row` and column `col` deleted.
    pub fn minor(&self, row: usize, col: usize) -> GradedMatrix {
        let mut out = self.clone();
        out.target.remove(row);
        out.source.remove(col);
        out.entries.remove(row);
        for r in &mut out.entries {
            r.remove(col);
        }
        out
    }

    /// Transpose with every entry passed through `f` (used with word
    /// reversal into the opposite ring); shifts are negated.
    pub fn dual_transpose(&self, ring: &Ring, f: impl Fn(&AlgebraElement) -> AlgebraElement) -> GradedMatrix {
        let target: Shifts = self.source.iter().map(|m| -m).collect();
        let source: Shifts = self.target.iter().map(|m| -m).collect();
        let entries = (0..self.cols())
            .map(|t| (0..self.rows()).map(|s| ring.reduce(&f(&self.entries[s][t]))).collect())
            .collect();
        GradedMatrix {
            ring: ring.clone(),
            target,
            source,
            entries,
        }
    }

    pub fn image_subspace(&self, e: i64) -> Subspace {
        let m = self.degreewise_map(e);
        let cols: Vec<Vec<FieldElem>> = (0..m.cols()).map(|j| m.column(j)).collect();
        Subspace::spanned_by(self.ring.field(), m.rows(), &cols)
    }
}

/// Cokernel of a graded matrix `F1 -> F0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulePresentation {
    pub matrix: GradedMatrix,
}

impl ModulePresentation {
    pub fn new(matrix: GradedMatrix) -> Self {
        ModulePresentation { matrix }
    }

    pub fn ring(&self) -> &Ring {
        self.matrix.ring()
    }

    /// A free module with the given generator degrees.
    pub fn free(ring: &Ring, shifts: Shifts) -> Self {
        Self::new(GradedMatrix::zero(ring, shifts, Vec::new()))
    }

    /// `dim M_e` for `e` in `lo..=lo + n`, `lo` the lowest generator degree.
    pub fn hilbert_window(&self, n: usize) -> (i64, Vec<usize>) {
        let lo = self.matrix.target().iter().copied().min().unwrap_or(0);
        let degrees: Vec<i64> = (lo..=lo + n as i64).collect();
        let dims = par::map(&degrees, |&e| {
            let total: usize = block_dims(self.ring(), self.matrix.target(), e).iter().sum();
            total - self.matrix.degreewise_map(e).rank()
        });
        (lo, dims)
    }
}

/// Whether `(mu0, mu1)` is a map of presentations `a -> b` whose induced
/// map `Coker a -> Coker b` is bijective on the window degrees.
pub fn induced_coker_bijective(a: &GradedMatrix, b: &GradedMatrix, mu0: &GradedMatrix, mu1: &GradedMatrix, n: usize) -> bool {
    let (Ok(left), Ok(right)) = (mu0.compose(a), b.compose(mu1)) else {
        return false;
    };
    if left != right {
        return false;
    }
    let degrees: Vec<i64> = window_degrees(&[a.target(), b.target()], n).collect();
    par::find_first(degrees.len(), |k| {
        let e = degrees[k];
        let src = a.image_subspace(e);
        let dst = b.image_subspace(e);
        let m = mu0.degreewise_map(e);
        let cols: Vec<Vec<FieldElem>> = src
            .complement()
            .into_iter()
            .map(|c| {
                let img = dst.reduce(&m.column(c));
                dst.complement().into_iter().map(|k| img[k].clone()).collect()
            })
            .collect();
        let rows = dst.complement().len();
        let ok = cols.len() == rows && Matrix::from_columns(a.ring().field(), rows, &cols).rank() == rows;
        (!ok).then_some(())
    })
    .is_none()
}

/// Per-degree outcome of an exactness check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeDefect {
    pub degree: i64,
    pub kernel: usize,
    pub image: usize,
    pub composite_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub position: i64,
    pub exact: bool,
    pub degrees: Vec<DegreeDefect>,
}

/// Maps `phi^i : F^{i+1} -> F^i` for a finite range of `i`.
#[derive(Debug, Clone)]
pub struct ComplexWindow {
    pub maps: BTreeMap<i64, GradedMatrix>,
    pub window: usize,
}

impl ComplexWindow {
    /// Exactness at `F^{i+1}`: `ker phi^i = im phi^{i+1}` degree by degree.
    pub fn exactness(&self, i: i64) -> Result<ExactnessReport> {
        let (Some(out), Some(inc)) = (self.maps.get(&i), self.maps.get(&(i + 1))) else {
            return Err(Error::ShiftMismatch(format!("maps {i} and {} are not both present", i + 1)));
        };
        if out.source() != inc.target() {
            return Err(Error::ShiftMismatch(format!("maps {i} and {} are not composable", i + 1)));
        }
        let degrees: Vec<i64> = window_degrees(&[out.source()], self.window).collect();
        let rows = par::map(&degrees, |&e| {
            let a = out.degreewise_map(e);
            let b = inc.degreewise_map(e);
            let kernel = a.cols() - a.rank();
            let image = b.rank();
            let composite_zero = a.cols() == 0 || b.cols() == 0 || a.mul(&b).is_zero();
            DegreeDefect {
                degree: e,
                kernel,
                image,
                composite_zero,
            }
        });
        let exact = rows.iter().all(|r| r.composite_zero && r.kernel == r.image);
        Ok(ExactnessReport {
            position: i,
            exact,
            degrees: rows,
        })
    }

    /// Exactness at every position where both neighbouring maps exist.
    pub fn exactness_all(&self) -> Result<Vec<ExactnessReport>> {
        let positions: Vec<i64> = self.maps.keys().copied().filter(|i| self.maps.contains_key(&(i + 1))).collect();
        positions.into_iter().map(|i| self.exactness(i)).collect()
    }
}

/// A windowed minimal free resolution.
#[derive(Debug, Clone)]
pub struct Resolution {
    /// `d_1 : F_1 -> F_0`, `d_2 : F_2 -> F_1`, ...
    pub differentials: Vec<GradedMatrix>,
    /// Generator degrees of `F_0, F_1, ...`.
    pub betti: Vec<Shifts>,
    /// True unless the resolution provably stopped (a zero free module).
    pub truncated: bool,
    pub window: usize,
}

impl Resolution {
    /// Whether `F_j` is generated in degree `j + lo` for every computed `j`.
    pub fn is_linear(&self) -> bool {
        let lo = self.betti.first().and_then(|b| b.iter().min().copied()).unwrap_or(0);
        self.betti
            .iter()
            .enumerate()
            .all(|(j, b)| b.iter().all(|&m| m == lo + j as i64))
    }
}

/// Minimal homogeneous generators of `ker phi` in degrees up to `n`,
/// chosen greedily by degree and then by echelon order.
pub fn kernel_generators(phi: &GradedMatrix, n: usize) -> Vec<(i64, Vec<AlgebraElement>)> {
    let ring = phi.ring();
    let lo = phi.source().iter().copied().min().unwrap_or(0);
    let mut gens: Vec<(i64, Vec<AlgebraElement>)> = Vec::new();
    for e in lo..=n as i64 {
        let kernel = phi.degreewise_map(e).nullspace();
        if kernel.is_empty() {
            continue;
        }
        let dim: usize = block_dims(ring, phi.source(), e).iter().sum();
        let mut span = Vec::new();
        for (eg, g) in &gens {
            for w in ring.basis_words((e - eg) as usize) {
                let r = ring.reduce(&ring.base().monomial(ring.field().one(), w));
                span.push(column_coords(ring, phi.source(), e, &column_times(ring, g, &r)));
            }
        }
        let mut sub = Subspace::spanned_by(ring.field(), dim, &span);
        let kernel_echelon = Subspace::spanned_by(ring.field(), dim, &kernel);
        for v in kernel_echelon.basis() {
            if !sub.contains(v) {
                span.push(v.clone());
                sub = Subspace::spanned_by(ring.field(), dim, &span);
                gens.push((e, column_from_coords(ring, phi.source(), e, v)));
            }
        }
    }
    gens
}

/// The first `steps` differentials of a minimal resolution of `m`, with
/// kernel generators searched up to degree `n`.
pub fn minimal_resolution_window(m: &ModulePresentation, steps: usize, n: usize) -> Result<Resolution> {
    let ring = m.ring().clone();
    let mut differentials = vec![m.matrix.clone()];
    let mut betti = vec![m.matrix.target().to_vec(), m.matrix.source().to_vec()];
    let mut truncated = true;
    while differentials.len() < steps {
        let last = differentials.last().expect("nonempty");
        if last.cols() == 0 {
            truncated = false;
            break;
        }
        let lo = last.source().iter().copied().min().unwrap_or(0);
        if lo >= n as i64 {
            return Err(Error::WindowTooSmall {
                window: n,
                reason: format!("step {} needs degrees above {lo}", differentials.len() + 1),
            });
        }
        let gens = kernel_generators(last, n);
        let source: Shifts = gens.iter().map(|(e, _)| *e).collect();
        let mut entries = vec![Vec::with_capacity(gens.len()); last.cols()];
        for (_, g) in &gens {
            for (s, a) in g.iter().enumerate() {
                entries[s].push(a.clone());
            }
        }
        let d = GradedMatrix::new(&ring, last.source().to_vec(), source.clone(), entries)?;
        betti.push(source);
        differentials.push(d);
    }
    if differentials.last().is_some_and(|d| d.cols() == 0) {
        truncated = false;
    }
    Ok(Resolution {
        differentials,
        betti,
        truncated,
        window: n,
    })
}

/// `N_e / im(psi)_e` bookkeeping for a presented module.
struct QuotientDegree {
    image: Subspace,
    complement: Vec<usize>,
}

fn quotient_degree(n: &ModulePresentation, e: i64) -> QuotientDegree {
    let image = n.matrix.image_subspace(e);
    let complement = image.complement();
    QuotientDegree { image, complement }
}

/// `delta(h) = h . d` from `Hom(P_{j-1}, N)_0` to `Hom(P_j, N)_0`, in
/// coordinates on the quotient bases of `N` at each generator degree.
fn hom_differential(d: &GradedMatrix, n: &ModulePresentation) -> Matrix {
    let ring = n.ring();
    let field = ring.field();
    let g0 = n.matrix.target();
    let dom_q: Vec<QuotientDegree> = d.target().iter().map(|&m| quotient_degree(n, m)).collect();
    let cod_q: Vec<QuotientDegree> = d.source().iter().map(|&m| quotient_degree(n, m)).collect();
    let rows: usize = cod_q.iter().map(|q| q.complement.len()).sum();
    let mut cols = Vec::new();
    for (g, q) in dom_q.iter().enumerate() {
        let mg = d.target()[g];
        let full_dim: usize = block_dims(ring, g0, mg).iter().sum();
        for &c in &q.complement {
            let mut unit = vec![field.zero(); full_dim];
            unit[c] = field.one();
            let value = column_from_coords(ring, g0, mg, &unit);
            let mut out = Vec::with_capacity(rows);
            for (gp, qp) in cod_q.iter().enumerate() {
                let mgp = d.source()[gp];
                let moved = column_times(ring, &value, d.entry(g, gp));
                let coords = qp.image.reduce(&column_coords(ring, g0, mgp, &moved));
                out.extend(qp.complement.iter().map(|&k| coords[k].clone()));
            }
            cols.push(out);
        }
    }
    Matrix::from_columns(field, rows, &cols)
}

/// A basis of degree-0 homomorphisms `M -> N`; each is listed by the
/// images (columns over `N`'s generators) of `M`'s generators.
pub fn graded_hom_space(m: &ModulePresentation, n: &ModulePresentation, _window: usize) -> Result<Vec<Vec<Vec<AlgebraElement>>>> {
    if m.ring() != n.ring() {
        return Err(Error::MixedContexts);
    }
    let ring = n.ring();
    let g0 = n.matrix.target();
    let delta = hom_differential(&m.matrix, n);
    let quotients: Vec<QuotientDegree> = m.matrix.target().iter().map(|&e| quotient_degree(n, e)).collect();
    let mut out = Vec::new();
    for v in delta.nullspace() {
        let mut pos = 0;
        let mut images = Vec::new();
        for (g, q) in quotients.iter().enumerate() {
            let e = m.matrix.target()[g];
            let full_dim: usize = block_dims(ring, g0, e).iter().sum();
            let mut full = vec![ring.field().zero(); full_dim];
            for &c in &q.complement {
                full[c] = v[pos].clone();
                pos += 1;
            }
            images.push(column_from_coords(ring, g0, e, &full));
        }
        out.push(images);
    }
    Ok(out)
}

/// `dim Ext^1(M, N)_0` from two steps of a minimal resolution of `M`.
pub fn graded_ext1_dim(m: &ModulePresentation, n: &ModulePresentation, window: usize) -> Result<usize> {
    if m.ring() != n.ring() {
        return Err(Error::MixedContexts);
    }
    let res = minimal_resolution_window(m, 2, window)?;
    let d1 = &res.differentials[0];
    let delta1 = hom_differential(d1, n);
    let kernel2 = match res.differentials.get(1) {
        Some(d2) => {
            let delta2 = hom_differential(d2, n);
            delta2.cols() - delta2.rank()
        }
        None => delta1.rows(),
    };
    Ok(kernel2 - delta1.rank())
}

/// All pairs `(mu0, mu1)` of degree-0 matrices with `mu0 phi = psi mu1`,
/// as a basis of the solution space.
pub fn chain_map_space(phi: &GradedMatrix, psi: &GradedMatrix) -> Result<Vec<(GradedMatrix, GradedMatrix)>> {
    if phi.ring() != psi.ring() {
        return Err(Error::MixedContexts);
    }
    let ring = phi.ring();
    let field = ring.field();
    let (f0, f1) = (phi.target(), phi.source());
    let (g0, g1) = (psi.target(), psi.source());
    // unknowns: (which, s, t, word)
    let mut unknowns = Vec::new();
    for (which, tgt, src) in [(0usize, g0, f0), (1, g1, f1)] {
        for (s, &ms) in tgt.iter().enumerate() {
            for (t, &mt) in src.iter().enumerate() {
                if let Ok(k) = usize::try_from(mt - ms) {
                    for w in ring.basis_words(k) {
                        unknowns.push((which, s, t, w));
                    }
                }
            }
        }
    }
    // equations: entry (s, t') of mu0 phi - psi mu1, s in G0, t' in F1
    let mut offsets = Vec::new();
    let mut total = 0;
    for &ms in g0 {
        let mut row = Vec::new();
        for &mt in f1 {
            row.push(total);
            total += usize::try_from(mt - ms).map_or(0, |k| ring.dim(k));
        }
        offsets.push(row);
    }
    let cols = par::map(&unknowns, |(which, s, t, w)| {
        let mut v = vec![field.zero(); total];
        let x = ring.reduce(&ring.base().monomial(field.one(), w.clone()));
        let mut put = |row: usize, col: usize, a: AlgebraElement, sign: &FieldElem| {
            if a.is_zero() {
                return;
            }
            let c = ring.coords(&a);
            for (k, val) in c.into_iter().enumerate() {
                let slot = &mut v[offsets[row][col] + k];
                *slot = &*slot + &(sign * &val);
            }
        };
        if *which == 0 {
            for tp in 0..f1.len() {
                let a = ring.mul(&x, phi.entry(*t, tp));
                put(*s, tp, a, &field.one());
            }
        } else {
            for sp in 0..g0.len() {
                let a = ring.mul(psi.entry(sp, *s), &x);
                put(sp, *t, a, &field.from_i64(-1));
            }
        }
        v
    });
    let system = Matrix::from_columns(field, total, &cols);
    let mut out = Vec::new();
    for sol in system.nullspace() {
        let mut mu0 = GradedMatrix::zero(ring, g0.to_vec(), f0.to_vec());
        let mut mu1 = GradedMatrix::zero(ring, g1.to_vec(), f1.to_vec());
        for ((which, s, t, w), c) in unknowns.iter().zip(&sol) {
            if c.is_zero() {
                continue;
            }
            let target = if *which == 0 { &mut mu0 } else { &mut mu1 };
            let term = ring.base().monomial(c.clone(), w.clone());
            target.entries[*s][*t] = target.entries[*s][*t].add(&term);
        }
        out.push((mu0, mu1));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::scalar::FieldSpec;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn free_sq() -> Algebra {
        Algebra::free(q(), 2, &[0, 1]).unwrap()
    }

    fn lin(s: &Algebra, a: i64, b: i64, c: i64) -> AlgebraElement {
        let f = s.field();
        s.gen(0).scale(&f.from_ratio(a, c).unwrap()).add(&s.gen(1).scale(&f.from_i64(b)))
    }

    #[test]
    fn worked_composition() {
        let s = free_sq();
        let r = Ring::new(&s);
        let f = s.field();
        let phi0 = GradedMatrix::new(&r, vec![0], vec![1], vec![vec![lin(&s, 3, 5, 1)]]).unwrap();
        let psi = s.gen(0).scale(&f.from_ratio(1, 5).unwrap()).add(&s.gen(1).scale(&f.from_ratio(2, 3).unwrap()));
        let phi1 = GradedMatrix::new(&r, vec![1], vec![2], vec![vec![psi]]).unwrap();
        let prod = phi0.compose(&phi1).unwrap();
        let target = s.gen(0).mul(&s.gen(1)).scale(&f.from_i64(2)).add(&s.gen(1).mul(&s.gen(0)));
        assert_eq!(prod.entry(0, 0), &target);
        let id = GradedMatrix::identity(&r, &[1]);
        assert_eq!(phi0.compose(&id).unwrap(), phi0);
        assert!(matches!(phi0.compose(&phi0), Err(Error::ShiftMismatch(_))));
    }

    #[test]
    fn entry_degree_enforced() {
        let s = free_sq();
        let r = Ring::new(&s);
        let err = GradedMatrix::new(&r, vec![0], vec![2], vec![vec![s.gen(0)]]);
        assert!(matches!(err, Err(Error::EntryDegree { .. })));
    }

    #[test]
    fn degreewise_rank_of_left_x() {
        let s = free_sq();
        let r = Ring::new(&s);
        let phi = GradedMatrix::new(&r, vec![0], vec![1], vec![vec![s.gen(0)]]).unwrap();
        let m = phi.degreewise_map(2);
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.rank(), 1);
        let id = GradedMatrix::identity(&r, &[0, 1]);
        let d = id.degreewise_map(3);
        assert_eq!(d, Matrix::identity(q(), d.rows()));
    }

    #[test]
    fn exterior_kernel() {
        let e = Algebra::exterior(q(), 2).unwrap();
        let r = Ring::new(&e);
        let phi = GradedMatrix::new(&r, vec![0], vec![1], vec![vec![e.gen(0)]]).unwrap();
        let k = phi.kernel_window(2);
        let (_, basis) = k.iter().find(|(d, _)| *d == 2).unwrap();
        assert_eq!(basis.len(), 1);
        let col = column_from_coords(&r, &[1], 2, &basis[0]);
        assert_eq!(col[0], e.gen(0));
        let zero = GradedMatrix::zero(&r, vec![0], vec![1]);
        assert_eq!(zero.kernel_window(2).iter().find(|(d, _)| *d == 2).unwrap().1.len(), 2);
    }

    #[test]
    fn preimages() {
        let s = free_sq();
        let r = Ring::new(&s);
        let f = s.field();
        let phi = GradedMatrix::new(&r, vec![0], vec![1], vec![vec![lin(&s, 3, 5, 1)]]).unwrap();
        let target = s.gen(0).mul(&s.gen(1)).scale(&f.from_i64(2)).add(&s.gen(1).mul(&s.gen(0)));
        let (v, unique) = phi.solve_preimage(2, std::slice::from_ref(&target)).unwrap();
        assert!(unique);
        let expect = s.gen(0).scale(&f.from_ratio(1, 5).unwrap()).add(&s.gen(1).scale(&f.from_ratio(2, 3).unwrap()));
        assert_eq!(v[0], expect);
        assert_eq!(phi.apply(2, &v)[0], target);
        let y = GradedMatrix::new(&r, vec![0], vec![1], vec![vec![s.gen(1)]]).unwrap();
        assert_eq!(y.solve_preimage(1, &[s.gen(0)]), Err(Error::NoSolution));
    }

    #[test]
    fn zero_complex_defect() {
        let s = free_sq();
        let r = Ring::new(&s);
        let z = GradedMatrix::zero(&r, vec![0], vec![0]);
        let c = ComplexWindow {
            maps: BTreeMap::from([(0, z.clone()), (1, z)]),
            window: 3,
        };
        let rep = c.exactness(0).unwrap();
        assert!(!rep.exact);
        let defects: Vec<usize> = rep.degrees.iter().map(|d| d.kernel - d.image).collect();
        assert_eq!(defects, s.hilbert_window(3));
    }

    #[test]
    fn point_module_resolution_over_exterior() {
        let e = Algebra::exterior(q(), 2).unwrap();
        let r = Ring::new(&e);
        let x = GradedMatrix::new(&r, vec![0], vec![1], vec![vec![e.gen(0)]]).unwrap();
        let res = minimal_resolution_window(&ModulePresentation::new(x), 4, 6).unwrap();
        assert_eq!(res.betti, vec![vec![0], vec![1], vec![2], vec![3], vec![4]]);
        for d in &res.differentials {
            assert_eq!(d.entry(0, 0), &e.gen(0));
        }
        assert!(res.is_linear());
    }

    fn point_module(t: &Algebra, forms: Vec<AlgebraElement>) -> ModulePresentation {
        let r = Ring::new(t);
        let k = forms.len();
        ModulePresentation::new(GradedMatrix::new(&r, vec![0], vec![1; k], vec![forms]).unwrap())
    }

    #[test]
    fn koszul_betti_and_ext() {
        let t = Algebra::polynomial(q(), 3).unwrap();
        // p = (1,0,0): forms x2, x3 vanish at p
        let mp = point_module(&t, vec![t.gen(1), t.gen(2)]);
        let res = minimal_resolution_window(&mp, 3, 6).unwrap();
        assert_eq!(res.betti, vec![vec![0], vec![1, 1], vec![2], vec![]]);
        assert!(!res.truncated);
        assert_eq!(graded_ext1_dim(&mp, &mp, 6).unwrap(), 2);
        let mq = point_module(&t, vec![t.gen(0), t.gen(2)]);
        assert_eq!(graded_ext1_dim(&mp, &mq, 6).unwrap(), 0);
        assert_eq!(graded_hom_space(&mp, &mp, 6).unwrap().len(), 1);
        let free = ModulePresentation::free(&Ring::new(&t), vec![0]);
        let res = minimal_resolution_window(&free, 3, 4).unwrap();
        assert!(!res.truncated);
        assert_eq!(res.differentials.len(), 1);
    }

    #[test]
    fn chain_maps_of_identity_square() {
        let s = free_sq();
        let r = Ring::new(&s);
        let phi = GradedMatrix::new(&r, vec![0], vec![1], vec![vec![lin(&s, 3, 5, 1)]]).unwrap();
        let sols = chain_map_space(&phi, &phi).unwrap();
        assert_eq!(sols.len(), 1);
        let (m0, m1) = &sols[0];
        assert_eq!(m0.compose(&phi).unwrap(), phi.compose(m1).unwrap());
    }

    fn arb_matrix(cs: &[i64], s: &Algebra, r: &Ring, target: Shifts, source: Shifts) -> GradedMatrix {
        let f = s.field();
        let mut k = 0;
        let entries = target
            .iter()
            .map(|&m| {
                source
                    .iter()
                    .map(|&n| {
                        let deg = (n - m) as usize;
                        let mut a = s.zero(deg);
                        for w in &s.basis(deg).words {
                            a = a.add(&s.monomial(f.from_i64(cs[k % cs.len()]), w.clone()));
                            k += 1;
                        }
                        a
                    })
                    .collect()
            })
            .collect();
        GradedMatrix::new(r, target, source, entries).unwrap()
    }

    proptest! {
        #[test]
        fn composition_laws(cs in proptest::collection::vec(-3i64..4, 1..20)) {
            let s = free_sq();
            let r = Ring::new(&s);
            let a = arb_matrix(&cs, &s, &r, vec![0, 1], vec![1, 2]);
            let b = arb_matrix(&cs[1..].iter().copied().chain([1]).collect::<Vec<_>>(), &s, &r, vec![1, 2], vec![2, 3]);
            let c = arb_matrix(&cs, &s, &r, vec![2, 3], vec![4]);
            prop_assert_eq!(a.compose(&b).unwrap().compose(&c).unwrap(), a.compose(&b.compose(&c).unwrap()).unwrap());
            for e in 2..5 {
                prop_assert_eq!(a.compose(&b).unwrap().degreewise_map(e), a.degreewise_map(e).mul(&b.degreewise_map(e)));
            }
            let col = a.compose(&b).unwrap().column(0);
            let (v, _) = a.solve_preimage(2, &col).unwrap();
            prop_assert_eq!(a.apply(2, &v), col);
        }
    }
}
