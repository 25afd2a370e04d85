//! Cyclic modules `A / l A` cut out by a linear form `l`, over the quotient
//! `A = S/(f)`. The main case is the skew exterior algebra written as
//! `S/(xn^2)` with `S = T/(x1^2, ..., x(n-1)^2)` and `T` skew polynomial.
//!
//! Membership is certified pointwise: `tau` sends `p` to the point of the
//! unique linear form `l'` with `l_p l' = 0` in `A`, provided the kernel of
//! `l_p` is generated by `l'` throughout the window.

use serde::Serialize;

use crate::algebra::{Algebra, AlgebraElement, NormalElement};
use crate::error::{Error, Result};
use crate::grmod::{graded_ext1_dim, minimal_resolution_window, GradedMatrix, ModulePresentation, Resolution};
use crate::linalg::{Matrix, Subspace};
use crate::nmf::{stream_rng, Nmf};
use crate::ring::Ring;
use crate::scalar::{FieldElem, FieldSpec};

/// A point of projective space, scaled so its last nonzero coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    coords: Vec<FieldElem>,
}

impl Point {
    pub fn new(coords: Vec<FieldElem>) -> Result<Self> {
        let last = coords
            .iter()
            .rposition(|c| !c.is_zero())
            .ok_or_else(|| Error::Input("a point needs a nonzero coordinate".into()))?;
        let inv = coords[last].inv()?;
        Ok(Point {
            coords: coords.iter().map(|c| c * &inv).collect(),
        })
    }

    pub fn coords(&self) -> &[FieldElem] {
        &self.coords
    }

    /// Whether the last coordinate vanishes.
    pub fn on_last_hyperplane(&self) -> bool {
        self.coords.last().is_none_or(FieldElem::is_zero)
    }

    /// `sum a_j x_j`.
    pub fn linear_form(&self, alg: &Algebra) -> AlgebraElement {
        let terms: Vec<(FieldElem, Vec<usize>)> = self.coords.iter().cloned().enumerate().map(|(j, c)| (c, vec![j])).collect();
        alg.normal_form(&terms).expect("linear terms are homogeneous")
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(" : "))
    }
}

/// `S`, a regular normal `f` in it and the quotient `A = S/(f)`.
#[derive(Debug, Clone)]
pub struct CopointContext {
    pub s: Algebra,
    pub f: NormalElement,
    pub a: Ring,
}

/// The skew exterior case, remembering the commutation scalars and `T`.
#[derive(Debug, Clone)]
pub struct SkewContext {
    pub alpha: Vec<Vec<FieldElem>>,
    pub t: Algebra,
    pub ctx: CopointContext,
}

impl SkewContext {
    /// Builds `T`, `S = T/(x1^2..x(n-1)^2)`, `f = xn^2` and `A`, certifying
    /// that `f` is regular normal on the window.
    pub fn new(field: FieldSpec, alpha: Vec<Vec<FieldElem>>, window: usize) -> Result<Self> {
        let n = alpha.len();
        if n < 2 {
            return Err(Error::BadAlpha("need at least two generators".into()));
        }
        let t = Algebra::skew(field, alpha.clone(), &[])?;
        let lower: Vec<usize> = (0..n - 1).collect();
        let s = Algebra::skew(field, alpha.clone(), &lower)?;
        let last = s.gen(n - 1);
        let f = s.normalizing_automorphism(&last.mul(&last), window)?;
        Ok(SkewContext {
            alpha,
            t,
            ctx: CopointContext::new(f)?,
        })
    }

    /// All `alpha_ij = 1`: the exterior algebra as `A`.
    pub fn exterior(field: FieldSpec, n: usize, window: usize) -> Result<Self> {
        Self::new(field, vec![vec![field.one(); n]; n], window)
    }
}

impl std::ops::Deref for SkewContext {
    type Target = CopointContext;

    fn deref(&self) -> &CopointContext {
        &self.ctx
    }
}

/// The `tau`-orbit `p_0, ..., p_L` with the forms `l_i` lifted to `S` and
/// the scalars `c_i` of `l_i l_(i+1) = c_i f` in `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopointOrbit {
    pub points: Vec<Point>,
    pub forms: Vec<AlgebraElement>,
    pub scalars: Vec<FieldElem>,
}

impl CopointOrbit {
    /// The least `k >= 1` with `p_k = p_0`, if the orbit closes.
    pub fn period(&self) -> Option<usize> {
        (1..self.points.len()).find(|&k| self.points[k] == self.points[0])
    }
}

/// A rank-one factorization built from a point, with its orbit.
#[derive(Debug, Clone)]
pub struct PointNmf {
    pub nmf: Nmf,
    pub orbit: CopointOrbit,
    pub period: Option<usize>,
}

/// Result of [`CopointContext::build_extension_nmf`]. `split` is set when
/// every superdiagonal block had to be a coboundary.
#[derive(Debug, Clone)]
pub struct ExtensionNmf {
    pub nmf: Nmf,
    pub split: bool,
    pub resolution: Resolution,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitStep {
    pub point: Vec<String>,
    pub scalar: Option<String>,
}

/// Left multiplication by `a` from `R_e` to `R_(e + deg a)` on basis coordinates.
fn left_mult(ring: &Ring, a: &AlgebraElement, e: usize) -> Matrix {
    let field = ring.field();
    let dim = ring.dim(e);
    let cols: Vec<Vec<FieldElem>> = (0..dim)
        .map(|k| {
            let mut unit = vec![field.zero(); dim];
            unit[k] = field.one();
            ring.coords(&ring.mul(a, &ring.from_coords(e, &unit)))
        })
        .collect();
    Matrix::from_columns(field, ring.dim(e + a.degree()), &cols)
}

impl CopointContext {
    pub fn new(f: NormalElement) -> Result<Self> {
        let a = Ring::quotient(f.algebra(), &f.f)?;
        Ok(CopointContext {
            s: f.algebra().clone(),
            f,
            a,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.s.field()
    }

    pub fn n(&self) -> usize {
        self.s.n()
    }

    pub fn point(&self, coords: Vec<FieldElem>) -> Result<Point> {
        if coords.len() != self.n() {
            return Err(Error::Input(format!("expected {} coordinates, got {}", self.n(), coords.len())));
        }
        Point::new(coords)
    }

    /// `tau(p)`: the point of the unique `l'` with `l_p l' = 0` in `A`,
    /// after checking `ker(l_p .)_e = l' A_(e-1)` for `1 <= e <= n`.
    pub fn tau_step(&self, p: &Point, n: usize) -> Result<Point> {
        let a = &self.a;
        if self.f.degree() < 2 {
            return Err(Error::NotCopointHere("f must have degree at least 2".into()));
        }
        let l = p.linear_form(&self.s);
        let kernel = left_mult(a, &l, 1).nullspace();
        if kernel.len() != 1 {
            return Err(Error::NotCopointHere(format!(
                "the linear annihilator of {p} has dimension {}",
                kernel.len()
            )));
        }
        let partner = a.from_coords(1, &kernel[0]);
        for e in 2..=n {
            let ker = a.dim(e) - left_mult(a, &l, e).rank();
            let img = left_mult(a, &partner, e - 1).rank();
            if ker != img {
                return Err(Error::NotCopointHere(format!(
                    "in degree {e} the kernel of {p} has dimension {ker} but its candidate generator spans {img}"
                )));
            }
        }
        Point::new(self.a.coords(&partner))
    }

    /// `L` steps of `tau` with the product certificates.
    pub fn orbit(&self, p: &Point, steps: usize, n: usize) -> Result<CopointOrbit> {
        let mut points = vec![p.clone()];
        for _ in 0..steps {
            let next = self.tau_step(points.last().expect("nonempty"), n)?;
            points.push(next);
        }
        let forms: Vec<AlgebraElement> = points.iter().map(|q| q.linear_form(&self.s)).collect();
        let mut scalars = Vec::with_capacity(steps);
        for w in forms.windows(2) {
            let prod = w[0].mul(&w[1]);
            let c = if prod.is_zero() {
                self.field().zero()
            } else {
                prod.scalar_ratio(&self.f.f)
                    .ok_or_else(|| Error::NotCopointHere("consecutive forms do not multiply into k f".into()))?
            };
            scalars.push(c);
        }
        Ok(CopointOrbit { points, forms, scalars })
    }

    /// Whether `L` steps of `tau` succeed, with the orbit when they do.
    pub fn is_copoint(&self, p: &Point, steps: usize, n: usize) -> (bool, Option<CopointOrbit>) {
        match self.orbit(p, steps, n) {
            Ok(o) => (true, Some(o)),
            Err(_) => (false, None),
        }
    }

    /// The rank-one factorization `phi^i = l_(p_i)`, rescaled to multiply
    /// to `f` exactly. Fails with `PointOnXn` when an orbit point has a
    /// zero last coordinate.
    pub fn nmf_from_point(&self, p: &Point, steps: usize, n: usize) -> Result<PointNmf> {
        let steps = steps.max(2);
        let orbit = self.orbit(p, steps, n)?;
        if let Some(step) = orbit.points.iter().position(Point::on_last_hyperplane) {
            return Err(Error::PointOnXn { step });
        }
        let ring = Ring::new(&self.s);
        let seq = orbit
            .forms
            .iter()
            .enumerate()
            .map(|(i, l)| GradedMatrix::new(&ring, vec![i as i64], vec![i as i64 + 1], vec![vec![l.clone()]]))
            .collect::<Result<Vec<_>>>()?;
        let nmf = Nmf::rescale(&seq, Some(&orbit.scalars), &self.f, n)?;
        let period = orbit.period();
        Ok(PointNmf { nmf, orbit, period })
    }

    /// A rank-`r` factorization whose cokernel is an iterated extension of
    /// the cokernels of the points' factorizations. The strictly upper
    /// linear entries are solved diagonal by diagonal; a seeded random
    /// solution outside the coboundaries is preferred.
    pub fn build_extension_nmf(&self, points: &[Point], n: usize, seed: u64) -> Result<ExtensionNmf> {
        if points.is_empty() {
            return Err(Error::Input("need at least one point".into()));
        }
        let blocks = points
            .iter()
            .map(|p| self.nmf_from_point(p, 2, n).map(|b| b.nmf))
            .collect::<Result<Vec<_>>>()?;
        let r = blocks.len();
        let s = &self.s;
        let field = self.field();
        let zero1 = s.zero(1);
        let mut u = vec![vec![zero1.clone(); r]; r];
        let mut v = vec![vec![zero1.clone(); r]; r];
        for k in 0..r {
            u[k][k] = blocks[k].phi0().entry(0, 0).clone();
            v[k][k] = blocks[k].phi1().entry(0, 0).clone();
        }
        let nvars = s.dim(1);
        let d2 = s.dim(2);
        let mut split = true;
        for gap in 1..r {
            for k in 0..r - gap {
                let m = k + gap;
                // phi0_kk v_km + u_km phi1_mm = -sum_{k<l<m} u_kl v_lm
                let mut cols = Vec::with_capacity(2 * nvars);
                for j in 0..nvars {
                    cols.push(u[k][k].mul(&s.gen(j)).coords());
                }
                for j in 0..nvars {
                    cols.push(s.gen(j).mul(&v[m][m]).coords());
                }
                let system = Matrix::from_columns(field, d2, &cols);
                let mut rhs = s.zero(2);
                for l in k + 1..m {
                    rhs = rhs.sub(&u[k][l].mul(&v[l][m]));
                }
                let (particular, _) = system
                    .solve(&rhs.coords())
                    .ok_or_else(|| Error::VerificationFailed(format!("no extension entries for block ({}, {})", k + 1, m + 1)))?;
                let kernel = system.nullspace();
                // coboundaries from unitriangular scalar base changes
                let mut cob_a = vec![field.zero(); 2 * nvars];
                let mut cob_b = vec![field.zero(); 2 * nvars];
                let (p0m, p0k) = (u[m][m].coords(), u[k][k].coords());
                let (p1k, p1m) = (v[k][k].coords(), v[m][m].coords());
                for j in 0..nvars {
                    cob_a[nvars + j] = p0m[j].clone();
                    cob_a[j] = -&p1k[j];
                    cob_b[nvars + j] = -&p0k[j];
                    cob_b[j] = p1m[j].clone();
                }
                let cob = Subspace::spanned_by(field, 2 * nvars, &[cob_a, cob_b]);
                let mut rng = stream_rng(seed, &[k as i64, m as i64]);
                let nontrivial = kernel.iter().any(|w| !cob.contains(w));
                let mut chosen = particular.clone();
                if nontrivial {
                    loop {
                        let mut cand = particular.clone();
                        for w in &kernel {
                            let c = field.random(&mut rng);
                            for (x, y) in cand.iter_mut().zip(w) {
                                *x = &*x + &(&c * y);
                            }
                        }
                        let diff: Vec<FieldElem> = cand.iter().zip(&particular).map(|(a, b)| a - b).collect();
                        if !cob.contains(&diff) {
                            chosen = cand;
                            break;
                        }
                    }
                    if gap == 1 {
                        split = false;
                    }
                }
                v[k][m] = AlgebraElement::from_coords(s, 1, &chosen[..nvars]);
                u[k][m] = AlgebraElement::from_coords(s, 1, &chosen[nvars..]);
            }
        }
        let ring = Ring::new(s);
        let shifts0 = vec![0i64; r];
        let shifts1 = vec![1i64; r];
        let shifts2 = vec![2i64; r];
        let phi0 = GradedMatrix::new(&ring, shifts0, shifts1.clone(), u)?;
        let phi1 = GradedMatrix::new(&ring, shifts1, shifts2, v)?;
        let nmf = Nmf::complete(phi0, phi1, &self.f, n)?;
        let resolution = minimal_resolution_window(&nmf.coker(), n.min(6), n)?;
        Ok(ExtensionNmf { nmf, split, resolution })
    }
}

/// Ranks of the free modules in a linear resolution prefix of `Coker phi`
/// over `A`. For a cokernel built from points this equals the Hilbert
/// window of the Koszul-dual module (one dimension per point and degree).
pub fn linear_rank_window(nmf: &Nmf, len: usize, n: usize) -> Result<Option<Vec<usize>>> {
    let steps = len.saturating_sub(1).max(1);
    let res = minimal_resolution_window(&nmf.coker(), steps, n)?;
    Ok(res.is_linear().then(|| res.betti.iter().take(len).map(Vec::len).collect()))
}

/// `dim Ext^1(M_p, M_q)_0` for point modules over `k[x1..xn]`, each
/// presented by the linear forms vanishing at its point.
pub fn point_ext1_dim(field: FieldSpec, p: &Point, q: &Point, window: usize) -> Result<usize> {
    let n = p.coords().len();
    if q.coords().len() != n {
        return Err(Error::Input("points live in different spaces".into()));
    }
    let poly = Algebra::polynomial(field, n)?;
    let ring = Ring::new(&poly);
    let present = |pt: &Point| -> Result<ModulePresentation> {
        let row = Matrix::from_rows(field, vec![pt.coords().to_vec()]);
        let forms: Vec<AlgebraElement> = row
            .nullspace()
            .iter()
            .map(|c| AlgebraElement::from_coords(&poly, 1, c))
            .collect();
        let m = GradedMatrix::new(&ring, vec![0], vec![1; forms.len()], vec![forms])?;
        Ok(ModulePresentation::new(m))
    };
    graded_ext1_dim(&present(p)?, &present(q)?, window)
}
