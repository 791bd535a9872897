//! Bilinear and sesquilinear forms stored as Gram matrices.
//!
//! A form `f` with Gram matrix `G` and field automorphism `eta` evaluates as
//! `f(u, v) = u G (v^eta)^t`: linear in the first argument, `eta`-semilinear in the second.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldAuto, FieldDescriptor, GaloisField};
use crate::matrix::{dot, Matrix};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    General,
    Alternating,
    Symmetric,
    Hermitian,
    SkewHermitian,
}

impl FormKind {
    pub fn name(self) -> &'static str {
        match self {
            FormKind::General => "general",
            FormKind::Alternating => "alternating",
            FormKind::Symmetric => "symmetric",
            FormKind::Hermitian => "hermitian",
            FormKind::SkewHermitian => "skew_hermitian",
        }
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct SesquiForm {
    field: Arc<GaloisField>,
    eta: FieldAuto,
    gram: Matrix,
    kind: FormKind,
}

impl PartialEq for SesquiForm {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field
            && self.eta.power % self.field.r() == other.eta.power % other.field.r()
            && self.gram == other.gram
    }
}

impl Eq for SesquiForm {}

/// Checks whether `gram` satisfies the defining identity of `kind`.
pub fn satisfies_kind(field: &GaloisField, eta: FieldAuto, gram: &Matrix, kind: FormKind) -> bool {
    let adj = gram.conj_transpose(field, eta);
    match kind {
        FormKind::General => true,
        FormKind::Alternating => {
            eta.is_identity(field)
                && adj == gram.neg(field)
                && (0..gram.rows()).all(|i| gram.get(i, i).is_zero())
        }
        FormKind::Symmetric => eta.is_identity(field) && adj == *gram,
        FormKind::Hermitian => adj == *gram,
        FormKind::SkewHermitian => adj == gram.neg(field),
    }
}

/// The most specific kind satisfied by `gram`.
pub fn detect_kind(field: &GaloisField, eta: FieldAuto, gram: &Matrix) -> FormKind {
    let trivial = eta.is_identity(field);
    let order = if trivial {
        [
            FormKind::Alternating,
            FormKind::Symmetric,
            FormKind::General,
            FormKind::General,
        ]
    } else {
        [
            FormKind::Hermitian,
            FormKind::SkewHermitian,
            FormKind::General,
            FormKind::General,
        ]
    };
    order
        .into_iter()
        .find(|&k| satisfies_kind(field, eta, gram, k))
        .unwrap_or(FormKind::General)
}

/// Named forms used throughout the construction.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StandardForm {
    /// `[[0,0],[1,0]]` over `F_2`; `E(f_D)` is dihedral of order 8.
    FD,
    /// `[[1,0],[1,1]]` over `F_2`; `E(f_Q)` is quaternion.
    FQ,
    /// `[[0,1],[-1,0]]` over `F_p`, `p` odd.
    FE,
    /// `[[0,0],[I,0]]` on `W* + W` with `dim W` given.
    Hyperbolic(usize),
    /// Identity Gram with the order-2 automorphism.
    HermitianIdentity(usize),
}

impl SesquiForm {
    pub fn new(
        field: &Arc<GaloisField>,
        eta: FieldAuto,
        gram: Matrix,
        kind: FormKind,
    ) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch {
                expected: gram.rows(),
                got: gram.cols(),
            });
        }
        if !satisfies_kind(field, eta, &gram, kind) {
            return Err(Error::KindMismatch(kind.name()));
        }
        Ok(SesquiForm {
            field: field.clone(),
            eta,
            gram,
            kind,
        })
    }

    /// Bilinear form with detected kind.
    pub fn bilinear(field: &Arc<GaloisField>, gram: Matrix) -> Result<Self> {
        let kind = detect_kind(field, FieldAuto::IDENTITY, &gram);
        Self::new(field, FieldAuto::IDENTITY, gram, kind)
    }

    pub fn standard(name: StandardForm, field: &Arc<GaloisField>) -> Result<Self> {
        let f = field.as_ref();
        match name {
            StandardForm::FD | StandardForm::FQ => {
                if f.p() != 2 {
                    return Err(Error::BadCharacteristic("characteristic 2"));
                }
                let g = if name == StandardForm::FD {
                    [[0, 0], [1, 0]]
                } else {
                    [[1, 0], [1, 1]]
                };
                let gram = Matrix::from_ints(f, &[&g[0], &g[1]]);
                Self::new(field, FieldAuto::IDENTITY, gram, FormKind::General)
            }
            StandardForm::FE => {
                if f.p() == 2 {
                    return Err(Error::BadCharacteristic("odd characteristic"));
                }
                let gram = Matrix::from_ints(f, &[&[0, 1], &[-1, 0]]);
                Self::new(field, FieldAuto::IDENTITY, gram, FormKind::Alternating)
            }
            StandardForm::Hyperbolic(w) => {
                let gram = Matrix::from_fn(2 * w, 2 * w, |i, j| {
                    if i >= w && j + w == i {
                        Elem::ONE
                    } else {
                        Elem::ZERO
                    }
                });
                let kind = if w == 0 {
                    FormKind::Alternating
                } else {
                    FormKind::General
                };
                Self::new(field, FieldAuto::IDENTITY, gram, kind)
            }
            StandardForm::HermitianIdentity(d) => {
                let eta = f.involution().ok_or(Error::NoInvolution)?;
                Self::new(field, eta, Matrix::identity(d), FormKind::Hermitian)
            }
        }
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn eta(&self) -> FieldAuto {
        self.eta
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn eval(&self, u: &[Elem], v: &[Elem]) -> Elem {
        let f = self.field.as_ref();
        let v_eta: Vec<Elem> = v.iter().map(|&e| self.eta.apply(f, e)).collect();
        let ug = self.gram.apply_row(u, f);
        dot(&ug, &v_eta, f)
    }

    /// Gram matrix of the form restricted to the span of the rows of `basis`.
    pub fn restrict_gram(&self, basis: &Matrix) -> Matrix {
        let f = self.field.as_ref();
        basis
            .mul(&self.gram, f)
            .mul(&basis.conj_transpose(f, self.eta), f)
    }

    /// The form on the span of `basis`, with the same automorphism.
    pub fn restrict(&self, basis: &Matrix) -> SesquiForm {
        let gram = self.restrict_gram(basis);
        let kind = if satisfies_kind(&self.field, self.eta, &gram, self.kind) {
            self.kind
        } else {
            FormKind::General
        };
        SesquiForm {
            field: self.field.clone(),
            eta: self.eta,
            gram,
            kind,
        }
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.is_invertible(&self.field)
    }

    /// `(x, y) -> f(y, x)^eta`, Gram `(G^t)^eta`.
    pub fn conj_transpose(&self) -> SesquiForm {
        let f = self.field.as_ref();
        let gram = self.gram.conj_transpose(f, self.eta);
        let kind = detect_kind(f, self.eta, &gram);
        SesquiForm {
            field: self.field.clone(),
            eta: self.eta,
            gram,
            kind,
        }
    }

    /// `f - f^t`.
    pub fn antisymmetrize(&self) -> SesquiForm {
        let f = self.field.as_ref();
        let gram = self.gram.sub(self.conj_transpose().gram(), f);
        let kind = detect_kind(f, self.eta, &gram);
        SesquiForm {
            field: self.field.clone(),
            eta: self.eta,
            gram,
            kind,
        }
    }

    pub fn scale(&self, c: Elem) -> SesquiForm {
        let gram = self.gram.scale(c, &self.field);
        let kind = detect_kind(&self.field, self.eta, &gram);
        SesquiForm {
            field: self.field.clone(),
            eta: self.eta,
            gram,
            kind,
        }
    }

    fn check_compatible(&self, other: &SesquiForm) -> Result<()> {
        if *self.field != *other.field
            || self.eta.power % self.field.r() != other.eta.power % other.field.r()
        {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    fn combined_kind(&self, other: &SesquiForm, gram: &Matrix) -> FormKind {
        if self.kind == FormKind::General || other.kind == FormKind::General {
            FormKind::General
        } else {
            detect_kind(&self.field, self.eta, gram)
        }
    }

    pub fn direct_sum(&self, other: &SesquiForm) -> Result<SesquiForm> {
        self.check_compatible(other)?;
        if self.dim() == 0 {
            return Ok(other.clone());
        }
        if other.dim() == 0 {
            return Ok(self.clone());
        }
        let gram = self.gram.block_diag(&other.gram);
        let kind = self.combined_kind(other, &gram);
        Ok(SesquiForm {
            field: self.field.clone(),
            eta: self.eta,
            gram,
            kind,
        })
    }

    pub fn tensor_product(&self, other: &SesquiForm) -> Result<SesquiForm> {
        self.check_compatible(other)?;
        let gram = self.gram.kron(&other.gram, &self.field);
        let kind = self.combined_kind(other, &gram);
        Ok(SesquiForm {
            field: self.field.clone(),
            eta: self.eta,
            gram,
            kind,
        })
    }

    /// Diagonalizes a nondegenerate symmetric (odd characteristic), Hermitian or
    /// skew-Hermitian form: returns `B` with `B G B^{t,eta}` diagonal, and the diagonal.
    pub fn diagonalize(&self) -> Result<(Matrix, Vec<Elem>)> {
        if !self.is_nondegenerate() {
            return Err(Error::DegenerateForm);
        }
        self.diagonalize_with_radical()
    }

    /// As [`Self::diagonalize`] but accepts degenerate forms; radical directions get zero entries.
    pub fn diagonalize_with_radical(&self) -> Result<(Matrix, Vec<Elem>)> {
        let f = self.field.as_ref();
        let kind = match self.kind {
            FormKind::General => detect_kind(f, self.eta, &self.gram),
            k => k,
        };
        match kind {
            FormKind::Symmetric if f.p() == 2 => {
                return Err(Error::UnsupportedKind("symmetric in characteristic 2"))
            }
            FormKind::Symmetric | FormKind::Hermitian | FormKind::SkewHermitian => {}
            FormKind::Alternating if self.gram.is_zero() => {}
            FormKind::Alternating => return Err(Error::UnsupportedKind("alternating")),
            FormKind::General => return Err(Error::UnsupportedKind("general")),
        }
        let n = self.dim();
        let mut work: Vec<Vec<Elem>> = Matrix::identity(n).row_vecs();
        let mut basis = Vec::with_capacity(n);
        let mut diag = Vec::with_capacity(n);
        while !work.is_empty() {
            let Some(v) = self.anisotropic_vector(&work) else {
                // Every remaining vector is orthogonal to the rest: radical.
                for w in work.drain(..) {
                    basis.push(w);
                    diag.push(Elem::ZERO);
                }
                break;
            };
            let d = self.eval(&v, &v);
            let d_inv = f.inv(d).expect("anisotropic");
            // Replace the span of `work` by v-perp inside it.
            let mut next = Vec::with_capacity(work.len());
            for w in &work {
                let c = f.mul(self.eval(w, &v), d_inv);
                let projected: Vec<Elem> = w
                    .iter()
                    .zip(&v)
                    .map(|(&a, &b)| f.sub(a, f.mul(c, b)))
                    .collect();
                next.push(projected);
            }
            let reduced = Matrix::from_rows(next);
            let (r, piv) = reduced.rref(f);
            work = r.submatrix(0..piv.len(), 0..n).row_vecs();
            basis.push(v);
            diag.push(d);
        }
        Ok((Matrix::from_rows(basis), diag))
    }

    /// A vector in the span of `work` with `f(v, v) != 0`, if any.
    fn anisotropic_vector(&self, work: &[Vec<Elem>]) -> Option<Vec<Elem>> {
        let f = self.field.as_ref();
        if let Some(v) = work.iter().find(|v| !self.eval(v, v).is_zero()) {
            return Some(v.clone());
        }
        for (i, a) in work.iter().enumerate() {
            for b in &work[i + 1..] {
                if self.eval(a, b).is_zero() && self.eval(b, a).is_zero() {
                    continue;
                }
                for c in f.elements().skip(1) {
                    let v: Vec<Elem> = a
                        .iter()
                        .zip(b)
                        .map(|(&x, &y)| f.add(x, f.mul(c, y)))
                        .collect();
                    if !self.eval(&v, &v).is_zero() {
                        return Some(v);
                    }
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> FormJson {
        let f = self.field.as_ref();
        FormJson {
            field: f.descriptor(),
            eta_power: self.eta.power % f.r(),
            gram: (0..self.dim())
                .map(|i| self.gram.row(i).iter().map(|&e| f.coeffs(e)).collect())
                .collect(),
            kind: self.kind,
        }
    }

    pub fn from_json(json: &FormJson) -> Result<Self> {
        let field = GaloisField::from_descriptor(&json.field)?;
        let rows: Result<Vec<Vec<Elem>>> = json
            .gram
            .iter()
            .map(|row| row.iter().map(|c| field.from_coeffs(c)).collect())
            .collect();
        let gram = Matrix::from_rows(rows?);
        Self::new(&field, FieldAuto::new(json.eta_power), gram, json.kind)
    }
}

/// JSON form: `{"field": ..., "eta_power": int, "gram": [[elem,...],...], "kind": str}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub field: FieldDescriptor,
    pub eta_power: u32,
    pub gram: Vec<Vec<Vec<u32>>>,
    pub kind: FormKind,
}

/// Input for [`trace_form`].
#[derive(Clone, Debug)]
pub struct TraceFormSpec {
    pub inner: SesquiForm,
    pub lambda: Elem,
}

impl TraceFormSpec {
    /// Canonical `lambda`: `1` for bilinear forms, the least element moved by `eta` otherwise.
    pub fn canonical(inner: SesquiForm) -> Self {
        let f = inner.field().clone();
        let lambda = if inner.eta().is_identity(&f) {
            Elem::ONE
        } else {
            f.non_fixed_element(inner.eta())
                .expect("nontrivial automorphism moves some element")
        };
        TraceFormSpec { inner, lambda }
    }
}

/// `(x, y) -> T(lambda f(x, y))` as a bilinear form over the prime field on the
/// restricted-scalars space (coordinate `i`, power `t^k` at index `i r + k`).
pub fn trace_form(spec: &TraceFormSpec) -> Result<SesquiForm> {
    let inner = &spec.inner;
    let f = inner.field().as_ref();
    let eta = inner.eta();
    if eta.is_identity(f) {
        if spec.lambda != Elem::ONE {
            return Err(Error::BadLambda);
        }
    } else if eta.apply(f, spec.lambda) == spec.lambda {
        return Err(Error::BadLambda);
    }
    let prime = GaloisField::prime(f.p())?;
    let r = f.r() as usize;
    let n = inner.dim();
    let powers: Vec<Elem> = (0..r).map(|k| Elem(f.p().pow(k as u32))).collect();
    let powers_eta: Vec<Elem> = powers.iter().map(|&t| eta.apply(f, t)).collect();
    let gram = Matrix::from_fn(n * r, n * r, |a, b| {
        let (i, k) = (a / r, a % r);
        let (j, l) = (b / r, b % r);
        let v = f.mul(
            spec.lambda,
            f.mul(powers[k], f.mul(inner.gram().get(i, j), powers_eta[l])),
        );
        Elem(f.trace(v))
    });
    let kind = detect_kind(&prime, FieldAuto::IDENTITY, &gram);
    SesquiForm::new(&prime, FieldAuto::IDENTITY, gram, kind)
}
