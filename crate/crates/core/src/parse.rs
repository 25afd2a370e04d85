//! Polynomial strings and the JSON input formats.
//!
//! Grammar: `term (("+"|"-") term)*`, a term being `coeff ("*" factor)*` or
//! `factor ("*" factor)*`, a factor `x<k>` or `x<k>^<m>`. Juxtaposition
//! order is the word order. Generators are 1-based in text.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, AlgebraElement, GradedAutomorphism, NormalElement, Word};
use crate::error::{Error, Result};
use crate::grmod::{GradedMatrix, Shifts};
use crate::linalg::Matrix;
use crate::nmf::Nmf;
use crate::ring::Ring;
use crate::scalar::{FieldElem, FieldSpec};

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    alg: &'a Algebra,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.text.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<&'a str> {
        let start = self.pos;
        while self.text.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.text[start..self.pos]).expect("ascii digits"))
    }

    fn coefficient(&mut self) -> Result<FieldElem> {
        let start = self.pos;
        let num = self.digits()?;
        let mut lit = num.to_string();
        if self.text.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            lit.push('/');
            lit.push_str(self.digits()?);
        }
        self.alg.field().parse(&lit).map_err(|e| match e {
            Error::DivisionByZero => Error::Syntax { pos: start, msg: "zero denominator".into() },
            other => other,
        })
    }

    fn factor(&mut self, word: &mut Word) -> Result<()> {
        if self.peek() != Some(b'x') {
            return self.err("expected a generator x<k>");
        }
        self.pos += 1;
        let at = self.pos;
        let k: usize = self.digits()?.parse().map_err(|_| Error::Syntax { pos: at, msg: "generator index too large".into() })?;
        if k == 0 || k > self.alg.n() {
            return Err(Error::UnknownGenerator(k));
        }
        let mut times = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            times = self.digits()?.parse().map_err(|_| Error::Syntax { pos: at, msg: "exponent too large".into() })?;
            if times == 0 {
                return Err(Error::Syntax { pos: at, msg: "exponent must be positive".into() });
            }
        }
        word.extend(std::iter::repeat_n(k - 1, times));
        Ok(())
    }

    fn term(&mut self) -> Result<(FieldElem, Word)> {
        let mut word = Vec::new();
        let coef = match self.peek() {
            Some(c) if c.is_ascii_digit() => self.coefficient()?,
            Some(b'x') => {
                self.factor(&mut word)?;
                self.alg.field().one()
            }
            Some(_) => return self.err("expected a coefficient or a generator"),
            None => return self.err("unexpected end of input"),
        };
        while self.peek() == Some(b'*') {
            self.pos += 1;
            self.factor(&mut word)?;
        }
        Ok((coef, word))
    }

    fn expression(&mut self) -> Result<Vec<(FieldElem, Word)>> {
        let mut terms = Vec::new();
        let mut negative = false;
        match self.peek() {
            Some(b'-') => {
                negative = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let (c, w) = self.term()?;
            terms.push((if negative { -&c } else { c }, w));
            match self.peek() {
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                None => break,
                Some(_) => return self.err("expected '+', '-' or end of input"),
            }
            self.pos += 1;
        }
        Ok(terms)
    }
}

/// Parses a homogeneous element and returns its normal form.
pub fn parse_poly(text: &str, alg: &Algebra) -> Result<AlgebraElement> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        alg,
    };
    let terms = p.expression()?;
    let nonzero: Vec<&(FieldElem, Word)> = terms.iter().filter(|(c, _)| !c.is_zero()).collect();
    let degree = nonzero.first().copied().or(terms.first()).map_or(0, |t| t.1.len());
    if nonzero.iter().any(|t| t.1.len() != degree) {
        return Err(Error::InhomogeneousInput(text.to_string()));
    }
    let kept: Vec<(FieldElem, Word)> = terms.into_iter().filter(|t| t.1.len() == degree).collect();
    alg.normal_form(&kept)
}

/// Parses an element that must have the given degree (zero adopts it).
pub fn parse_poly_of_degree(text: &str, alg: &Algebra, degree: usize) -> Result<AlgebraElement> {
    let a = parse_poly(text, alg)?;
    if a.is_zero() {
        return Ok(a.with_degree(degree));
    }
    if a.degree() != degree {
        return Err(Error::InhomogeneousInput(format!("'{text}' has degree {}, expected {degree}", a.degree())));
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommutationJson {
    Skew,
    Free,
}

/// `{"field", "n", "commutation", "alpha": [[i, j, "val"], ...], "square_zero"}`
/// with 1-based indices. A skew algebra needs one entry for every pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub field: FieldSpec,
    pub n: usize,
    pub commutation: CommutationJson,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha: Vec<(usize, usize, String)>,
    #[serde(default)]
    pub square_zero: Vec<usize>,
}

fn alpha_table(field: FieldSpec, n: usize, alpha: &[(usize, usize, String)]) -> Result<BTreeMap<(usize, usize), FieldElem>> {
    let mut upper = BTreeMap::new();
    for (i, j, v) in alpha {
        if *i == 0 || *j == 0 || *i > n || *j > n || i == j {
            return Err(Error::BadAlpha(format!("bad pair ({i},{j})")));
        }
        let val = field.parse(v)?;
        let (key, val) = if i < j {
            ((i - 1, j - 1), val)
        } else {
            ((j - 1, i - 1), val.inv().map_err(|_| Error::BadAlpha("alpha entries must be nonzero".into()))?)
        };
        if let Some(old) = upper.insert(key, val.clone()) {
            if old != val {
                return Err(Error::BadAlpha(format!("conflicting values for pair ({},{})", key.0 + 1, key.1 + 1)));
            }
        }
    }
    Ok(upper)
}

fn alpha_full(field: FieldSpec, n: usize, alpha: &[(usize, usize, String)]) -> Result<Vec<Vec<FieldElem>>> {
    let upper = alpha_table(field, n, alpha)?;
    let mut full = vec![vec![field.one(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let a = upper
                .get(&(i, j))
                .ok_or_else(|| Error::BadAlpha(format!("missing alpha for pair ({},{})", i + 1, j + 1)))?;
            full[j][i] = a.inv().map_err(|_| Error::BadAlpha("alpha entries must be nonzero".into()))?;
            full[i][j] = a.clone();
        }
    }
    Ok(full)
}

fn alpha_triples(alg: &Algebra) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    for i in 0..alg.n() {
        for j in i + 1..alg.n() {
            if let Some(a) = alg.alpha(i, j) {
                out.push((i + 1, j + 1, a.to_string()));
            }
        }
    }
    out
}

impl AlgebraJson {
    pub fn build(&self) -> Result<Algebra> {
        let field = self.field.validate()?;
        if self.square_zero.iter().any(|&i| i == 0 || i > self.n) {
            return Err(Error::InvalidPresentation("square_zero index out of range".into()));
        }
        let sz: Vec<usize> = self.square_zero.iter().map(|i| i - 1).collect();
        match self.commutation {
            CommutationJson::Free => {
                if !self.alpha.is_empty() {
                    return Err(Error::InvalidPresentation("a free algebra takes no alpha".into()));
                }
                Algebra::free(field, self.n, &sz)
            }
            CommutationJson::Skew => Algebra::skew(field, alpha_full(field, self.n, &self.alpha)?, &sz),
        }
    }

    pub fn describe(alg: &Algebra) -> Self {
        let commutation = match alg.alpha(0, 0) {
            Some(_) => CommutationJson::Skew,
            None => CommutationJson::Free,
        };
        AlgebraJson {
            field: alg.field(),
            n: alg.n(),
            commutation,
            alpha: alpha_triples(alg),
            square_zero: alg.square_zero().iter().map(|i| i + 1).collect(),
        }
    }
}

/// `{"target_shifts", "source_shifts", "entries": [["poly", ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub target_shifts: Shifts,
    pub source_shifts: Shifts,
    pub entries: Vec<Vec<String>>,
}

impl MatrixJson {
    pub fn build(&self, ring: &Ring) -> Result<GradedMatrix> {
        let alg = ring.base();
        if self.entries.len() != self.target_shifts.len() || self.entries.iter().any(|r| r.len() != self.source_shifts.len()) {
            return Err(Error::ShiftMismatch(format!(
                "entries do not form a {}x{} matrix",
                self.target_shifts.len(),
                self.source_shifts.len()
            )));
        }
        let mut rows = Vec::with_capacity(self.entries.len());
        for (s, row) in self.entries.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (t, text) in row.iter().enumerate() {
                let need = self.source_shifts[t] - self.target_shifts[s];
                let a = parse_poly(text, alg)?;
                out.push(if a.is_zero() { a.with_degree(need.max(0) as usize) } else { a });
            }
            rows.push(out);
        }
        GradedMatrix::new(ring, self.target_shifts.clone(), self.source_shifts.clone(), rows)
    }

    pub fn describe(m: &GradedMatrix) -> Self {
        MatrixJson {
            target_shifts: m.target().to_vec(),
            source_shifts: m.source().to_vec(),
            entries: m.entries().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect(),
        }
    }
}

/// Square scalar matrix given as rows of field literals.
pub fn scalar_matrix(field: FieldSpec, rows: &[Vec<String>]) -> Result<Matrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Input("scalar matrix must be square".into()));
    }
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|v| field.parse(v)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(field, parsed))
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(ToString::to_string).collect()).collect()
}

/// `{"algebra", "f", "d", "nu", "shifts0", "shifts1", "phi0", "phi1"}`.
/// `d` and `nu` are optional; when present they are checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmfJson {
    pub algebra: AlgebraJson,
    pub f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<Vec<String>>>,
    pub shifts0: Shifts,
    pub shifts1: Shifts,
    pub phi0: Vec<Vec<String>>,
    pub phi1: Vec<Vec<String>>,
}

/// Parses `f` and its normalizing automorphism, checking optional data.
pub fn normal_element(alg: &Algebra, f: &str, d: Option<usize>, nu: Option<&[Vec<String>]>, window: usize) -> Result<NormalElement> {
    let f = parse_poly(f, alg)?;
    if let Some(d) = d {
        if f.degree() != d {
            return Err(Error::Input(format!("f has degree {}, not {d}", f.degree())));
        }
    }
    let normal = alg.normalizing_automorphism(&f, window)?;
    if let Some(rows) = nu {
        let given = scalar_matrix(alg.field(), rows)?;
        if &given != normal.nu.matrix() {
            return Err(Error::Input("given nu is not the normalizing automorphism of f".into()));
        }
    }
    Ok(normal)
}

impl NmfJson {
    /// The algebra, `f` and the stored pair, without verification.
    pub fn parts(&self, window: usize) -> Result<(NormalElement, GradedMatrix, GradedMatrix)> {
        let alg = self.algebra.build()?;
        let normal = normal_element(&alg, &self.f, self.d, self.nu.as_deref(), window)?;
        let ring = Ring::new(&alg);
        let d = normal.degree() as i64;
        let shifts2: Shifts = self.shifts0.iter().map(|m| m + d).collect();
        let phi0 = MatrixJson {
            target_shifts: self.shifts0.clone(),
            source_shifts: self.shifts1.clone(),
            entries: self.phi0.clone(),
        }
        .build(&ring)?;
        let phi1 = MatrixJson {
            target_shifts: self.shifts1.clone(),
            source_shifts: shifts2,
            entries: self.phi1.clone(),
        }
        .build(&ring)?;
        Ok((normal, phi0, phi1))
    }

    pub fn build(&self, window: usize) -> Result<Nmf> {
        let (normal, phi0, phi1) = self.parts(window)?;
        Nmf::complete(phi0, phi1, &normal, window)
    }

    pub fn describe(nmf: &Nmf) -> Self {
        let m = |g: &GradedMatrix| MatrixJson::describe(g).entries;
        NmfJson {
            algebra: AlgebraJson::describe(nmf.f().algebra()),
            f: nmf.f().f.to_string(),
            d: Some(nmf.f().degree()),
            nu: Some(matrix_rows(nmf.f().nu.matrix())),
            shifts0: nmf.shifts0().to_vec(),
            shifts1: nmf.shifts1().to_vec(),
            phi0: m(nmf.phi0()),
            phi1: m(nmf.phi1()),
        }
    }
}

/// `{"algebra", "f", "components": [matrix, ...], "lambdas": ["val", ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RescaleJson {
    pub algebra: AlgebraJson,
    pub f: String,
    pub components: Vec<MatrixJson>,
    #[serde(default)]
    pub lambdas: Option<Vec<String>>,
}

/// `{"sigma": [[...]], "lambda": "val"}`; rows give the images of the
/// generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistJson {
    pub sigma: Vec<Vec<String>>,
    #[serde(default)]
    pub lambda: Option<String>,
}

impl TwistJson {
    pub fn build(&self, alg: &Algebra) -> Result<(GradedAutomorphism, Option<FieldElem>)> {
        let m = scalar_matrix(alg.field(), &self.sigma)?;
        if m.rows() != alg.n() {
            return Err(Error::Input(format!("sigma must be {0}x{0}", alg.n())));
        }
        let lambda = self.lambda.as_deref().map(|l| alg.field().parse(l)).transpose()?;
        Ok((GradedAutomorphism::new(alg, m)?, lambda))
    }
}

/// `{"algebra", "f", "matrix"}`: a presentation over `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub algebra: AlgebraJson,
    #[serde(default)]
    pub f: Option<String>,
    pub matrix: MatrixJson,
}

/// `{"field", "n", "alpha": [[i, j, "val"], ...]}` for the skew exterior
/// construction; `n` defaults to the largest index mentioned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextJson {
    pub field: FieldSpec,
    #[serde(default)]
    pub n: Option<usize>,
    pub alpha: Vec<(usize, usize, String)>,
}

impl ContextJson {
    pub fn alpha_matrix(&self) -> Result<(FieldSpec, Vec<Vec<FieldElem>>)> {
        let field = self.field.validate()?;
        let n = self
            .n
            .or_else(|| self.alpha.iter().map(|(i, j, _)| *i.max(j)).max())
            .ok_or_else(|| Error::BadAlpha("empty alpha".into()))?;
        Ok((field, alpha_full(field, n, &self.alpha)?))
    }
}

/// `{"coords": ["1", "1", "1"]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub coords: Vec<String>,
}

impl PointJson {
    pub fn values(&self, field: FieldSpec) -> Result<Vec<FieldElem>> {
        self.coords.iter().map(|c| field.parse(c)).collect()
    }
}

/// `{"field", "p": ["..."], "q": ["..."]}` for point modules over a
/// polynomial ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ext1Json {
    pub field: FieldSpec,
    pub p: Vec<String>,
    pub q: Vec<String>,
}
