//! Twists by powers of one graded automorphism: `a * b = a sigma^{deg a}(b)`.
//!
//! Twisted algebras are never re-presented; they are rings whose product
//! wraps the base product.

use crate::algebra::{Algebra, AlgebraElement, GradedAutomorphism, NormalElement};
use crate::error::{Error, Result};
use crate::grmod::{GradedMatrix, ModulePresentation};
use crate::nmf::Nmf;
use crate::ring::Ring;
use crate::scalar::FieldElem;

/// An automorphism together with its eigenvalue on a fixed element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistData {
    pub base: Algebra,
    pub sigma: GradedAutomorphism,
    pub lambda: FieldElem,
}

impl TwistData {
    pub fn new(sigma: &GradedAutomorphism, f: &AlgebraElement) -> Result<Self> {
        if sigma.algebra() != f.algebra() {
            return Err(Error::MixedAlgebras);
        }
        let lambda = sigma.eigenvalue(f).ok_or(Error::NotEigenvector)?;
        Ok(TwistData {
            base: sigma.algebra().clone(),
            sigma: sigma.clone(),
            lambda,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedAlgebra {
    ring: Ring,
}

impl TwistedAlgebra {
    pub fn new(sigma: &GradedAutomorphism) -> Self {
        let ring = Ring::new(sigma.algebra()).twisted(sigma).expect("no ideal to preserve");
        TwistedAlgebra { ring }
    }

    /// Twists once more by `sigma`.
    pub fn twist(&self, sigma: &GradedAutomorphism) -> Result<Self> {
        Ok(TwistedAlgebra {
            ring: self.ring.twisted(sigma)?,
        })
    }

    /// Twists by the inverse of the last automorphism, which restores the
    /// previous product.
    pub fn untwist(&self) -> Self {
        match self.ring.layers().last() {
            Some(sigma) => TwistedAlgebra {
                ring: self.ring.twisted(&sigma.inverse()).expect("no ideal to preserve"),
            },
            None => self.clone(),
        }
    }

    pub fn base(&self) -> &Algebra {
        self.ring.base()
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.ring.checked_mul(a, b)
    }
}

/// Rescales `sigma` so that it fixes `f`: with `sigma(f) = lambda f` and
/// `f` of degree `d`, returns `eps_mu sigma` for `mu = lambda^{-1/d}`,
/// where `eps_mu` multiplies every generator by `mu`. The root taken is
/// the smallest one in the field.
pub fn eps_normalize(sigma: &GradedAutomorphism, f: &AlgebraElement) -> Result<(GradedAutomorphism, FieldElem)> {
    let data = TwistData::new(sigma, f)?;
    let d = f.degree();
    if d == 0 {
        return Ok((sigma.clone(), data.lambda));
    }
    let root = data.lambda.nth_root(d as u32).ok_or_else(|| Error::NoRootInField {
        value: data.lambda.to_string(),
        degree: d,
    })?;
    let mu = root.inv()?;
    let eps = GradedAutomorphism::scaling(sigma.algebra(), &mu)?;
    Ok((eps.compose(sigma), data.lambda))
}

/// Row `s` of `m` mapped by `sigma^{sign * -m_s}`, read over `ring`.
fn row_twist(m: &GradedMatrix, sigma: &GradedAutomorphism, sign: i64, ring: &Ring) -> GradedMatrix {
    let target = m.target().to_vec();
    m.map_rows(|s, a| sigma.pow(-sign * target[s]).apply(a)).with_ring_unchecked(ring)
}

/// Twists the rows of a presentation matrix by `sigma`, landing over the
/// twist of its ring. `sigma` need only rescale a quotient's generator.
pub fn twist_matrix(m: &GradedMatrix, sigma: &GradedAutomorphism) -> Result<GradedMatrix> {
    let ring = m.ring().twisted(sigma)?;
    Ok(row_twist(m, sigma, 1, &ring))
}

/// A factorization over the twist of its algebra by `sigma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedNmf {
    sigma: GradedAutomorphism,
    f: NormalElement,
    ring: Ring,
    psi0: GradedMatrix,
    psi1: GradedMatrix,
    window: usize,
}

impl TwistedNmf {
    pub fn sigma(&self) -> &GradedAutomorphism {
        &self.sigma
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn psi0(&self) -> &GradedMatrix {
        &self.psi0
    }

    pub fn psi1(&self) -> &GradedMatrix {
        &self.psi1
    }

    fn untwisted_parts(&self) -> (GradedMatrix, GradedMatrix) {
        let base = Ring::new(self.f.algebra());
        (
            row_twist(&self.psi0, &self.sigma, -1, &base),
            row_twist(&self.psi1, &self.sigma, -1, &base),
        )
    }

    /// The twisted `i`-th component.
    pub fn component(&self, i: i64) -> GradedMatrix {
        let (p0, p1) = self.untwisted_parts();
        let base = Nmf::from_parts(p0, p1, &self.f, self.window);
        row_twist(&base.component(i), &self.sigma, 1, &self.ring)
    }

    /// Checks `psi^i * psi^{i+1} = f E` under the twisted product.
    pub fn verify(&self, range: std::ops::RangeInclusive<i64>) -> bool {
        range.into_iter().all(|i| {
            let a = self.component(i);
            matches!(a.compose(&self.component(i + 1)), Ok(p) if p == GradedMatrix::diagonal(&self.ring, a.target(), &self.f.f))
        })
    }

    /// Hilbert window of the cokernel of `psi0` over the twisted quotient.
    pub fn coker_hilbert(&self, n: usize) -> Result<Vec<usize>> {
        let a = Ring::quotient(self.f.algebra(), &self.f.f)?.twisted(&self.sigma)?;
        Ok(ModulePresentation::new(self.psi0.over(&a)?).hilbert_window(n).1)
    }
}

/// Twists every component of `phi` row by row: entry `(s, t)` of `phi^i`
/// becomes `sigma^{-m}` of itself, `m` the shift of row `s`.
pub fn twist_nmf(phi: &Nmf, sigma: &GradedAutomorphism, window: usize) -> Result<TwistedNmf> {
    if sigma.algebra() != phi.f().algebra() {
        return Err(Error::MixedAlgebras);
    }
    if sigma.apply(&phi.f().f) != phi.f().f {
        return Err(Error::NotFixed);
    }
    let ring = Ring::new(phi.f().algebra()).twisted(sigma)?;
    let out = TwistedNmf {
        sigma: sigma.clone(),
        f: phi.f().clone(),
        psi0: row_twist(phi.phi0(), sigma, 1, &ring),
        psi1: row_twist(phi.phi1(), sigma, 1, &ring),
        ring,
        window,
    };
    if !out.verify(-4..=4) {
        return Err(Error::VerificationFailed("twisted components do not multiply to f".into()));
    }
    Ok(out)
}

/// Inverse of [`twist_nmf`].
pub fn untwist_nmf(t: &TwistedNmf) -> Result<Nmf> {
    if !t.verify(-1..=1) {
        return Err(Error::VerificationFailed("twisted pair does not multiply to f".into()));
    }
    let (p0, p1) = t.untwisted_parts();
    Nmf::complete(p0, p1, &t.f, t.window)
}
