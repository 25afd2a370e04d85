//! Graded matrix factorizations of a regular normal element `f`.
//!
//! An [`Nmf`] stores only the pair `(phi0, phi1)` with `phi0 phi1 = f E`.
//! Every other component follows from the normalizing automorphism:
//! `phi^{2j} = nu^j(phi0)` and `phi^{2j+1} = nu^j(phi1)`, with all shifts
//! moved by `j d`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{AlgebraElement, NormalElement};
use crate::error::{Error, Result};
use crate::grmod::{self, chain_map_space, column_coords, column_from_coords, window_degrees, ComplexWindow, GradedMatrix, ModulePresentation, Shifts};
use crate::linalg::Matrix;
use crate::par;
use crate::ring::Ring;
use crate::scalar::FieldElem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nmf {
    ring: Ring,
    f: NormalElement,
    phi0: GradedMatrix,
    phi1: GradedMatrix,
    window: usize,
}

/// Outcome of [`Nmf::verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NmfReport {
    pub ok: bool,
    pub window: usize,
    pub shifts_compatible: bool,
    pub first_product: bool,
    pub second_product: bool,
    pub injective: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrivialKind {
    /// `(id, f)`: zero cokernel.
    Right,
    /// `(f, id)`: cokernel free over the quotient.
    Left,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrivialSummand {
    pub kind: TrivialKind,
    pub shifts: Shifts,
}

fn f_times_identity(ring: &Ring, shifts: &[i64], f: &NormalElement) -> GradedMatrix {
    GradedMatrix::diagonal(ring, shifts, &f.f)
}

fn plus(shifts: &[i64], k: i64) -> Shifts {
    shifts.iter().map(|m| m + k).collect()
}

impl Nmf {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn f(&self) -> &NormalElement {
        &self.f
    }

    pub fn d(&self) -> i64 {
        self.f.degree() as i64
    }

    pub fn rank(&self) -> usize {
        self.phi0.rows()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn phi0(&self) -> &GradedMatrix {
        &self.phi0
    }

    pub fn phi1(&self) -> &GradedMatrix {
        &self.phi1
    }

    pub fn shifts0(&self) -> &[i64] {
        self.phi0.target()
    }

    pub fn shifts1(&self) -> &[i64] {
        self.phi0.source()
    }

    /// Builds the factorization from a pair, checking the product, the
    /// shifts and injectivity of `phi0` on the window.
    pub fn complete(phi0: GradedMatrix, phi1: GradedMatrix, f: &NormalElement, window: usize) -> Result<Nmf> {
        let ring = Ring::new(f.algebra());
        if phi0.ring() != &ring || phi1.ring() != &ring {
            return Err(Error::MixedContexts);
        }
        let r = phi0.rows();
        if phi0.cols() != r || phi1.rows() != r || phi1.cols() != r {
            return Err(Error::NotSquare { rows: phi0.rows(), cols: phi0.cols() });
        }
        let d = f.degree() as i64;
        if phi0.source() != phi1.target() || phi1.source() != plus(phi0.target(), d).as_slice() {
            return Err(Error::ShiftMismatch(format!(
                "shifts {:?}, {:?}, {:?} are not compatible with degree {d}",
                phi0.target(),
                phi0.source(),
                phi1.source()
            )));
        }
        if phi0.compose(&phi1)? != f_times_identity(&ring, phi0.target(), f) {
            return Err(Error::ProductNotF);
        }
        if let Err(degree) = phi0.injective_window(window) {
            return Err(Error::NotInjectiveInWindow { degree, window });
        }
        let nmf = Nmf {
            ring,
            f: f.clone(),
            phi0,
            phi1,
            window,
        };
        if !nmf.second_product_holds() {
            return Err(Error::VerificationFailed("phi1 nu(phi0) is not f E".into()));
        }
        Ok(nmf)
    }

    /// Assembles a pair already known to be a factorization.
    pub(crate) fn from_parts(phi0: GradedMatrix, phi1: GradedMatrix, f: &NormalElement, window: usize) -> Nmf {
        Nmf {
            ring: Ring::new(f.algebra()),
            f: f.clone(),
            phi0,
            phi1,
            window,
        }
    }

    fn second_product_holds(&self) -> bool {
        let next = self.component(2);
        matches!(self.phi1.compose(&next), Ok(p) if p == f_times_identity(&self.ring, self.shifts1(), &self.f))
    }

    /// `phi^i` for any integer `i`.
    pub fn component(&self, i: i64) -> GradedMatrix {
        let j = i.div_euclid(2);
        let base = if i.rem_euclid(2) == 0 { &self.phi0 } else { &self.phi1 };
        if j == 0 {
            return base.clone();
        }
        let nu = self.f.nu_pow(j);
        base.map_entries(|a| nu.apply(a)).shifted(j * self.d())
    }

    /// Shifts of `F^i`.
    pub fn module_shifts(&self, i: i64) -> Shifts {
        self.component(i).target().to_vec()
    }

    pub fn verify(&self, window: usize) -> NmfReport {
        let mut failures = Vec::new();
        let d = self.d();
        let shifts_compatible = self.phi0.source() == self.phi1.target()
            && self.phi1.source() == plus(self.phi0.target(), d).as_slice();
        if !shifts_compatible {
            failures.push("shift vectors are not compatible".to_string());
        }
        let first_product = matches!(self.phi0.compose(&self.phi1), Ok(p) if p == f_times_identity(&self.ring, self.shifts0(), &self.f));
        if !first_product {
            failures.push("phi0 phi1 != f E".to_string());
        }
        let second_product = shifts_compatible && self.second_product_holds();
        if !second_product {
            failures.push("phi1 nu(phi0) != f E".to_string());
        }
        let injective = match self.phi0.injective_window(window) {
            Ok(()) => true,
            Err(e) => {
                failures.push(format!("phi0 is not injective in degree {e}"));
                false
            }
        };
        NmfReport {
            ok: failures.is_empty(),
            window,
            shifts_compatible,
            first_product,
            second_product,
            injective,
            failures,
        }
    }

    /// Turns `phi^i phi^{i+1} = lambda_i f E` into a strict factorization
    /// by rescaling: `c_0 = 1`, `c_{i+1} = 1 / (lambda_i c_i)`. The
    /// `lambda_i` are inferred when not given. Components beyond the first
    /// two must agree with the ones derived from `nu`.
    pub fn rescale(seq: &[GradedMatrix], lambdas: Option<&[FieldElem]>, f: &NormalElement, window: usize) -> Result<Nmf> {
        if seq.len() < 2 {
            return Err(Error::Input("need at least two components".into()));
        }
        let ring = Ring::new(f.algebra());
        let field = ring.field();
        let mut lams = Vec::new();
        for i in 0..seq.len() - 1 {
            let prod = seq[i].compose(&seq[i + 1])?;
            let fe = f_times_identity(&ring, seq[i].target(), &f.clone());
            let lam = match lambdas.and_then(|l| l.get(i)) {
                Some(l) => l.clone(),
                None => infer_scalar(&prod, &fe).ok_or(Error::NotScalarMultiple(i))?,
            };
            if lam.is_zero() || fe.scale(&lam) != prod {
                return Err(Error::NotScalarMultiple(i));
            }
            lams.push(lam);
        }
        let mut c = vec![field.one()];
        for lam in &lams {
            let prev = c.last().expect("nonempty");
            c.push((lam * prev).inv()?);
        }
        let nmf = Nmf::complete(seq[0].clone(), seq[1].scale(&c[1]), f, window)?;
        for (i, m) in seq.iter().enumerate().skip(2) {
            if nmf.component(i as i64) != m.scale(&c[i]) {
                return Err(Error::VerificationFailed(format!(
                    "rescaled component {i} differs from the one forced by nu"
                )));
            }
        }
        Ok(nmf)
    }

    pub fn trivial(kind: TrivialKind, shifts: &[i64], f: &NormalElement) -> Nmf {
        let ring = Ring::new(f.algebra());
        let d = f.degree() as i64;
        let (phi0, phi1) = match kind {
            TrivialKind::Right => (GradedMatrix::identity(&ring, shifts), f_times_identity(&ring, shifts, f)),
            TrivialKind::Left => (
                f_times_identity(&ring, shifts, f),
                GradedMatrix::identity(&ring, &plus(shifts, d)),
            ),
        };
        Nmf {
            ring,
            f: f.clone(),
            phi0,
            phi1,
            window: f.window,
        }
    }

    /// Reindexing: the stored pair becomes `(phi^j, phi^{j+1})`.
    pub fn shift(&self, j: i64) -> Nmf {
        Nmf {
            ring: self.ring.clone(),
            f: self.f.clone(),
            phi0: self.component(j),
            phi1: self.component(j + 1),
            window: self.window,
        }
    }

    pub fn direct_sum(&self, other: &Nmf) -> Result<Nmf> {
        if self.ring != other.ring || self.f != other.f {
            return Err(Error::MixedContexts);
        }
        Ok(Nmf {
            ring: self.ring.clone(),
            f: self.f.clone(),
            phi0: self.phi0.block_diag(&other.phi0)?,
            phi1: self.phi1.block_diag(&other.phi1)?,
            window: self.window.min(other.window),
        })
    }

    /// Change of basis by scalar automorphisms `p0` of `F^0` and `p1` of
    /// `F^1`: `phi0 -> p0 phi0 p1^-1`, `phi1 -> p1 phi1 p0^-1`.
    pub fn change_basis(&self, p0: &Matrix, p1: &Matrix) -> Result<Nmf> {
        let d = self.d();
        let s0 = self.shifts0().to_vec();
        let s1 = self.shifts1().to_vec();
        let p0m = GradedMatrix::from_scalars(&self.ring, s0.clone(), s0.clone(), p0)?;
        let p1m = GradedMatrix::from_scalars(&self.ring, s1.clone(), s1.clone(), p1)?;
        let p1inv = GradedMatrix::from_scalars(&self.ring, s1.clone(), s1, &p1.inverse()?)?;
        let p0inv = GradedMatrix::from_scalars(&self.ring, plus(&s0, d), plus(&s0, d), &p0.inverse()?)?;
        let phi0 = p0m.compose(&self.phi0)?.compose(&p1inv)?;
        let phi1 = p1m.compose(&self.phi1)?.compose(&p0inv)?;
        Nmf::complete(phi0, phi1, &self.f, self.window)
    }

    /// The dual factorization over the opposite algebra:
    /// `psi^i = rev(phi^{-i})^T` on `G^j = Hom(F^{1-j}, S)`, a
    /// factorization of the reversed `f`, whose normalizing automorphism
    /// is `nu^-1`.
    pub fn dual(&self) -> Result<Nmf> {
        let alg = self.f.algebra();
        let opp = alg.opposite();
        let fo = self.f.f.reversed(&opp);
        let normal = opp.normalizing_automorphism(&fo, self.window)?;
        let ring = Ring::new(&opp);
        let rev = |a: &AlgebraElement| a.reversed(&opp);
        let psi0 = self.component(0).dual_transpose(&ring, rev);
        let psi1 = self.component(-1).dual_transpose(&ring, rev);
        Nmf::complete(psi0, psi1, &normal, self.window)
    }

    /// The quotient `A = S/(f)`.
    pub fn quotient_ring(&self) -> Ring {
        Ring::quotient(self.f.algebra(), &self.f.f).expect("f lives in S")
    }

    /// Presentation over `A` of `Coker phi^i`.
    pub fn coker_presentation(&self, i: i64) -> ModulePresentation {
        let a = self.quotient_ring();
        ModulePresentation::new(self.component(i).over(&a).expect("same base algebra"))
    }

    pub fn coker(&self) -> ModulePresentation {
        self.coker_presentation(0)
    }

    /// `dim (Coker phi)_e` from the lowest generator degree upwards.
    pub fn coker_hilbert(&self, n: usize) -> Vec<usize> {
        self.coker().hilbert_window(n).1
    }

    /// The complex of reductions mod `f` of `phi^i` for `i` in `lo..=hi`.
    pub fn complex(&self, lo: i64, hi: i64, window: usize) -> ComplexWindow {
        let a = self.quotient_ring();
        let idx: Vec<i64> = (lo..=hi).collect();
        let maps = par::map(&idx, |&i| (i, self.component(i).over(&a).expect("same base algebra")));
        ComplexWindow {
            maps: maps.into_iter().collect(),
            window,
        }
    }

    /// Builds a factorization from a square presentation `phi: G -> F` over
    /// `S` of a module annihilated by `f`: column `s` of the second map is
    /// the preimage of `f e_s`.
    pub fn from_module(pres: &GradedMatrix, f: &NormalElement, window: usize) -> Result<Nmf> {
        let ring = Ring::new(f.algebra());
        let pres = pres.over(&ring)?;
        if pres.rows() != pres.cols() {
            return Err(Error::NotSquare { rows: pres.rows(), cols: pres.cols() });
        }
        if let Err(degree) = pres.injective_window(window) {
            return Err(Error::NotInjectiveInWindow { degree, window });
        }
        let d = f.degree() as i64;
        let r = pres.rows();
        let mut cols = Vec::with_capacity(r);
        for s in 0..r {
            let mut w = vec![ring.zero(0); r];
            w[s] = f.f.clone();
            let e = pres.target()[s] + d;
            for (k, m) in pres.target().iter().enumerate() {
                if k != s {
                    w[k] = ring.zero(usize::try_from(e - m).unwrap_or(0));
                }
            }
            let (v, _) = pres.solve_preimage(e, &w).map_err(|err| match err {
                Error::NoSolution => Error::FNotInImage(s),
                other => other,
            })?;
            cols.push(v);
        }
        let entries = (0..r).map(|t| cols.iter().map(|c| c[t].clone()).collect()).collect();
        let psi = GradedMatrix::new(&ring, pres.source().to_vec(), plus(pres.target(), d), entries)?;
        Nmf::complete(pres, psi, f, window)
    }

    /// Splits off one trivial summand through a unit entry of `phi0`.
    fn split_unit(&self) -> Option<(Nmf, i64)> {
        let (s, t) = (0..self.rank())
            .flat_map(|s| (0..self.rank()).map(move |t| (s, t)))
            .find(|&(s, t)| self.phi0.required_degree(s, t) == 0 && !self.phi0.entry(s, t).is_zero())?;
        let ring = &self.ring;
        let u_inv = self.phi0.entry(s, t).as_scalar().expect("degree-0 entry").inv().expect("nonzero");
        let s0 = self.shifts0().to_vec();
        let s1 = self.shifts1().to_vec();
        let mut p = GradedMatrix::identity(ring, &s0).entries().to_vec();
        let mut p_inv = p.clone();
        for r in (0..self.rank()).filter(|&r| r != s) {
            let a = self.phi0.entry(r, t).scale(&u_inv);
            p[r][s] = a.neg();
            p_inv[r][s] = a;
        }
        let mut q = GradedMatrix::identity(ring, &s1).entries().to_vec();
        let mut q_inv = q.clone();
        for c in (0..self.rank()).filter(|&c| c != t) {
            let b = self.phi0.entry(s, c).scale(&u_inv);
            q[t][c] = b.neg();
            q_inv[t][c] = b;
        }
        let build = |sh: &Shifts, e: Vec<Vec<AlgebraElement>>| GradedMatrix::new(ring, sh.clone(), sh.clone(), e).expect("degrees match");
        let p = build(&s0, p);
        let nu_p_inv = build(&s0, p_inv).map_entries(|a| self.f.nu.apply(a)).shifted(self.d());
        let q = build(&s1, q);
        let q_inv = build(&s1, q_inv);
        let psi0 = p.compose(&self.phi0).ok()?.compose(&q).ok()?;
        let psi1 = q_inv.compose(&self.phi1).ok()?.compose(&nu_p_inv).ok()?;
        let reduced = Nmf {
            ring: ring.clone(),
            f: self.f.clone(),
            phi0: psi0.minor(s, t),
            phi1: psi1.minor(t, s),
            window: self.window,
        };
        Some((reduced, s0[s]))
    }

    /// Strips trivial summands until neither stored matrix has a unit
    /// entry; returns the reduced factorization and the summands removed.
    pub fn reduce(&self) -> (Nmf, Vec<TrivialSummand>) {
        let mut cur = self.clone();
        let mut summands = Vec::new();
        loop {
            if let Some((next, m)) = cur.split_unit() {
                summands.push(TrivialSummand { kind: TrivialKind::Right, shifts: vec![m] });
                cur = next;
                continue;
            }
            if let Some((next, m)) = cur.shift(1).split_unit() {
                summands.push(TrivialSummand { kind: TrivialKind::Left, shifts: vec![m - self.d()] });
                cur = next.shift(-1);
                continue;
            }
            break;
        }
        (cur, summands)
    }

    pub fn to_tmf(&self) -> TmfPair {
        TmfPair {
            psi: self.phi0.clone(),
            tau: self.phi1.clone(),
            f: self.f.clone(),
        }
    }

    pub fn from_tmf(t: &TmfPair, window: usize) -> Result<Nmf> {
        Nmf::complete(t.psi.clone(), t.tau.clone(), &t.f, window)
    }
}

fn infer_scalar(prod: &GradedMatrix, fe: &GradedMatrix) -> Option<FieldElem> {
    let r = prod.rows();
    if r == 0 {
        return Some(prod.ring().field().one());
    }
    let lam = prod.entry(0, 0).scalar_ratio(fe.entry(0, 0))?;
    (fe.scale(&lam) == *prod).then_some(lam)
}

/// Pair form `(psi, tau)` where `tau` stands for `x -> tau nu(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmfPair {
    pub psi: GradedMatrix,
    pub tau: GradedMatrix,
    pub f: NormalElement,
}

impl TmfPair {
    /// `tau nu(x)` for `x` of degree `e` in the target of `psi`.
    pub fn tau_apply(&self, e: i64, x: &[AlgebraElement]) -> Vec<AlgebraElement> {
        let moved: Vec<AlgebraElement> = x.iter().map(|a| self.f.nu.apply(a)).collect();
        self.tau.apply(e + self.f.degree() as i64, &moved)
    }

    /// Checks `psi tau(x) = x f` and `tau psi(y) = y f` on basis elements
    /// of the window degrees.
    pub fn verify_window(&self, n: usize) -> bool {
        let ring = self.psi.ring();
        let d = self.f.degree() as i64;
        let g = self.psi.target().to_vec();
        let h = self.psi.source().to_vec();
        let times_f = |col: &[AlgebraElement]| grmod::column_times(ring, col, &self.f.f);
        for e in window_degrees(&[&g, &h], n) {
            let dim_g: usize = grmod::block_dims(ring, &g, e).iter().sum();
            for k in 0..dim_g {
                let mut unit = vec![ring.field().zero(); dim_g];
                unit[k] = ring.field().one();
                let x = column_from_coords(ring, &g, e, &unit);
                let back = self.psi.apply(e + d, &self.tau_apply(e, &x));
                if column_coords(ring, &g, e + d, &back) != column_coords(ring, &g, e + d, &times_f(&x)) {
                    return false;
                }
            }
            let dim_h: usize = grmod::block_dims(ring, &h, e).iter().sum();
            for k in 0..dim_h {
                let mut unit = vec![ring.field().zero(); dim_h];
                unit[k] = ring.field().one();
                let y = column_from_coords(ring, &h, e, &unit);
                let back = self.tau_apply(e, &self.psi.apply(e, &y));
                if column_coords(ring, &h, e + d, &back) != column_coords(ring, &h, e + d, &times_f(&y)) {
                    return false;
                }
            }
        }
        true
    }
}

/// A morphism of factorizations, stored by its first two squares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NmfMorphism {
    pub mu0: GradedMatrix,
    pub mu1: GradedMatrix,
}

impl NmfMorphism {
    /// `mu^{2j} = nu^j(mu0)`, `mu^{2j+1} = nu^j(mu1)`, shifted by `j d`.
    pub fn component(&self, f: &NormalElement, i: i64) -> GradedMatrix {
        let j = i.div_euclid(2);
        let base = if i.rem_euclid(2) == 0 { &self.mu0 } else { &self.mu1 };
        let nu = f.nu_pow(j);
        base.map_entries(|a| nu.apply(a)).shifted(j * f.degree() as i64)
    }

    /// Invertible exactly when the degree-0 parts are (graded Nakayama).
    pub fn is_isomorphism(&self) -> bool {
        self.mu0.rows() == self.mu0.cols()
            && self.mu1.rows() == self.mu1.cols()
            && self.mu0.scalar_part().is_invertible()
            && self.mu1.scalar_part().is_invertible()
    }
}

/// Checks the first square and the next one forced by `nu`.
pub fn morphism_complete(phi: &Nmf, psi: &Nmf, mu0: GradedMatrix, mu1: GradedMatrix) -> Result<NmfMorphism> {
    if phi.f != psi.f {
        return Err(Error::MixedContexts);
    }
    if mu0.target() != psi.shifts0() || mu0.source() != phi.shifts0() || mu1.target() != psi.shifts1() || mu1.source() != phi.shifts1() {
        return Err(Error::ShiftMismatch("morphism shifts do not match the factorizations".into()));
    }
    if mu0.compose(&phi.phi0)? != psi.phi0.compose(&mu1)? {
        return Err(Error::SquareDoesNotCommute(0));
    }
    let m = NmfMorphism { mu0, mu1 };
    let mu2 = m.component(&phi.f, 2);
    if m.mu1.compose(&phi.phi1)? != psi.phi1.compose(&mu2)? {
        return Err(Error::SquareDoesNotCommute(1));
    }
    Ok(m)
}

/// A basis of the degree-0 morphisms `phi -> psi`.
pub fn morphism_space(phi: &Nmf, psi: &Nmf) -> Result<Vec<NmfMorphism>> {
    chain_map_space(&phi.phi0, &psi.phi0)?
        .into_iter()
        .map(|(m0, m1)| morphism_complete(phi, psi, m0, m1))
        .collect()
}

fn combine(basis: &[(GradedMatrix, GradedMatrix)], coeffs: &[FieldElem]) -> (GradedMatrix, GradedMatrix) {
    let (mut a, mut b) = (basis[0].0.scale(&coeffs[0]), basis[0].1.scale(&coeffs[0]));
    for ((m0, m1), c) in basis.iter().zip(coeffs).skip(1) {
        a = a.add(&m0.scale(c)).expect("same shifts");
        b = b.add(&m1.scale(c)).expect("same shifts");
    }
    (a, b)
}

/// Deterministic per-(seed, stream) generator.
pub fn stream_rng(seed: u64, parts: &[i64]) -> ChaCha8Rng {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h = (h ^ p as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 31;
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// Searches for an isomorphism `phi -> psi` among random combinations of
/// a morphism basis.
pub fn nmf_isomorphism(phi: &Nmf, psi: &Nmf, seed: u64, trials: usize) -> Result<Option<NmfMorphism>> {
    let basis = chain_map_space(&phi.phi0, &psi.phi0)?;
    if basis.is_empty() {
        return Ok(None);
    }
    let field = phi.ring.field();
    let found = par::find_first(trials, |t| {
        let mut rng = stream_rng(seed, &[t as i64]);
        let coeffs: Vec<FieldElem> = (0..basis.len()).map(|_| field.random(&mut rng)).collect();
        let (m0, m1) = combine(&basis, &coeffs);
        let m = NmfMorphism { mu0: m0, mu1: m1 };
        m.is_isomorphism().then_some(m)
    });
    match found {
        Some(m) => morphism_complete(phi, psi, m.mu0, m.mu1).map(Some),
        None => Ok(None),
    }
}

/// An isomorphism `Coker phi^period -> Coker phi^0 (-shift)` over `A`,
/// given as a map of presentations.
#[derive(Debug, Clone)]
pub struct PeriodCertificate {
    pub mu0: GradedMatrix,
    pub mu1: GradedMatrix,
}

#[derive(Debug, Clone)]
pub struct PeriodResult {
    pub period: Option<usize>,
    pub shift: Option<i64>,
    pub certificate: Option<PeriodCertificate>,
    pub max: usize,
    pub window: usize,
    pub trials: usize,
}

/// The least `l <= max` with `Coker phi^l` isomorphic to a shift of
/// `Coker phi^0`, certified by an explicit isomorphism checked on the
/// window. Candidates are random combinations of the chain-map space,
/// drawn from a generator keyed by `(seed, l, m, trial)`.
pub fn nmf_period(phi: &Nmf, max: usize, window: usize, seed: u64, trials: usize) -> Result<PeriodResult> {
    let a = phi.quotient_ring();
    let field = a.field();
    let base = phi.component(0).over(&a)?;
    for l in 1..=max {
        let pres = phi.component(l as i64).over(&a)?;
        let mut shifts: Vec<i64> = pres
            .target()
            .iter()
            .flat_map(|x| base.target().iter().map(move |y| x - y))
            .collect();
        shifts.sort_unstable();
        shifts.dedup();
        for m in shifts {
            let mut lhs: Vec<i64> = pres.target().to_vec();
            let mut rhs: Vec<i64> = plus(base.target(), m);
            lhs.sort_unstable();
            rhs.sort_unstable();
            if lhs != rhs {
                continue;
            }
            let target = base.shifted(m);
            let basis = chain_map_space(&pres, &target)?;
            if basis.is_empty() {
                continue;
            }
            let found = par::find_first(trials, |t| {
                let mut rng = stream_rng(seed, &[l as i64, m, t as i64]);
                let coeffs: Vec<FieldElem> = (0..basis.len()).map(|_| field.random(&mut rng)).collect();
                let (m0, m1) = combine(&basis, &coeffs);
                let invertible = m0.rows() == m0.cols() && m0.scalar_part().is_invertible();
                (invertible && grmod::induced_coker_bijective(&pres, &target, &m0, &m1, window)).then_some((m0, m1))
            });
            if let Some((mu0, mu1)) = found {
                return Ok(PeriodResult {
                    period: Some(l),
                    shift: Some(m),
                    certificate: Some(PeriodCertificate { mu0, mu1 }),
                    max,
                    window,
                    trials,
                });
            }
        }
    }
    Ok(PeriodResult {
        period: None,
        shift: None,
        certificate: None,
        max,
        window,
        trials,
    })
}
