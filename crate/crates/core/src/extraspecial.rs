//! The extraspecial group `E(f) = V x F_p` with product
//! `(x1, z1)(x2, z2) = (x1 + x2, z1 + z2 + f(x1, x2))`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{trace_form, FormJson, SesquiForm, StandardForm, TraceFormSpec};
use crate::gf::{Elem, GaloisField};
use crate::matrix::{index_vector, vec_add, vec_scale, Matrix};

/// `(x, z)` with `x` in `F_p^{2n}` and `z` in `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtraspecialElement {
    pub x: Vec<Elem>,
    pub z: Elem,
}

impl ExtraspecialElement {
    pub fn new(x: Vec<Elem>, z: Elem) -> Self {
        ExtraspecialElement { x, z }
    }

    pub fn identity(dim: usize) -> Self {
        ExtraspecialElement {
            x: vec![Elem::ZERO; dim],
            z: Elem::ZERO,
        }
    }

    pub fn central(dim: usize, z: Elem) -> Self {
        ExtraspecialElement {
            x: vec![Elem::ZERO; dim],
            z,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_zero() && self.x.iter().all(|e| e.is_zero())
    }

    pub fn is_central(&self) -> bool {
        self.x.iter().all(|e| e.is_zero())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IsoTag {
    /// Central product of `n` dihedral groups of order 8.
    Dn,
    /// `n - 1` dihedral factors and one quaternion factor.
    Dn1Q,
    /// Central product of `n` copies of the exponent-`p` group of order `p^3`.
    En,
}

/// Isomorphism type of an extraspecial group of order `p^{2n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IsoType {
    pub tag: IsoTag,
    pub n: BigUint,
}

impl IsoType {
    pub fn new(tag: IsoTag, n: impl Into<BigUint>) -> Self {
        IsoType { tag, n: n.into() }
    }

    /// `2n + 1`, the exponent of `p` in the group order.
    pub fn order_exponent(&self) -> BigUint {
        &self.n * 2u32 + 1u32
    }

    pub fn n_usize(&self) -> Option<usize> {
        self.n.to_usize()
    }
}

impl fmt::Display for IsoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            IsoTag::Dn => write!(f, "D^{}", self.n),
            IsoTag::En => write!(f, "E^{}", self.n),
            IsoTag::Dn1Q if self.n.is_one() => write!(f, "Q"),
            IsoTag::Dn1Q => write!(f, "D^{}Q", &self.n - 1u32),
        }
    }
}

/// `C(j, 2)` reduced mod `p`, for any integer `j`.
pub fn binom2_mod(j: i64, p: u32) -> u32 {
    let p = p as i128;
    let j = j as i128;
    ((j * (j - 1) / 2).rem_euclid(p)) as u32
}

/// The group `E(f)` for a bilinear form `f` over `F_p` with `f - f^t` nondegenerate.
#[derive(Clone, Debug)]
pub struct ExtraspecialGroup {
    form: SesquiForm,
    anti: Matrix,
}

impl PartialEq for ExtraspecialGroup {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form
    }
}

impl Eq for ExtraspecialGroup {}

impl ExtraspecialGroup {
    pub fn new(form: SesquiForm) -> Result<Self> {
        if !form.field().is_prime_field() {
            return Err(Error::Invalid(
                "E(f) needs a form over a prime field".into(),
            ));
        }
        if !form.eta().is_identity(form.field()) {
            return Err(Error::Invalid("E(f) needs a bilinear form".into()));
        }
        let anti = form.antisymmetrize();
        if form.dim() == 0 || !anti.is_nondegenerate() {
            return Err(Error::DegenerateForm);
        }
        Ok(ExtraspecialGroup {
            anti: anti.gram().clone(),
            form,
        })
    }

    /// `E(f_E^{+n})`, `E(f_D^{+n})` or `E(f_D^{+(n-1)} + f_Q)` over `F_p`.
    pub fn standard(tag: IsoTag, n: usize, p: u32) -> Result<Self> {
        Self::new(standard_form_for(tag, n, p)?)
    }

    pub fn form(&self) -> &SesquiForm {
        &self.form
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        self.form.field()
    }

    pub fn p(&self) -> u32 {
        self.field().p()
    }

    /// `dim V = 2n`.
    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn n(&self) -> usize {
        self.dim() / 2
    }

    /// Gram matrix of `F = f - f^t`.
    pub fn commutator_gram(&self) -> &Matrix {
        &self.anti
    }

    /// `|E(f)| = p^{2n+1}`, when it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        (self.p() as u64).checked_pow(self.dim() as u32 + 1)
    }

    pub fn f(&self, u: &[Elem], v: &[Elem]) -> Elem {
        self.form.eval(u, v)
    }

    /// `F(u, v) = f(u, v) - f(v, u)`.
    pub fn big_f(&self, u: &[Elem], v: &[Elem]) -> Elem {
        let field = self.field();
        field.sub(self.f(u, v), self.f(v, u))
    }

    fn check(&self, g: &ExtraspecialElement) -> Result<()> {
        let p = self.p();
        if g.x.len() != self.dim() || g.z.0 >= p || g.x.iter().any(|e| e.0 >= p) {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn identity(&self) -> ExtraspecialElement {
        ExtraspecialElement::identity(self.dim())
    }

    /// `(e_i, 0)`.
    pub fn generator(&self, i: usize) -> ExtraspecialElement {
        let mut x = vec![Elem::ZERO; self.dim()];
        x[i] = Elem::ONE;
        ExtraspecialElement { x, z: Elem::ZERO }
    }

    pub fn multiply(
        &self,
        g: &ExtraspecialElement,
        h: &ExtraspecialElement,
    ) -> Result<ExtraspecialElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    /// Unchecked product.
    pub fn mul(&self, g: &ExtraspecialElement, h: &ExtraspecialElement) -> ExtraspecialElement {
        let field = self.field();
        let z = field.add(field.add(g.z, h.z), self.f(&g.x, &h.x));
        ExtraspecialElement {
            x: vec_add(&g.x, &h.x, field),
            z,
        }
    }

    /// `(x, z)^j = (j x, j z + C(j, 2) f(x, x))`.
    pub fn power(&self, g: &ExtraspecialElement, j: i64) -> ExtraspecialElement {
        let field = self.field();
        let jj = field.from_int(j);
        let c = Elem(binom2_mod(j, self.p()));
        let z = field.add(field.mul(jj, g.z), field.mul(c, self.f(&g.x, &g.x)));
        ExtraspecialElement {
            x: vec_scale(jj, &g.x, field),
            z,
        }
    }

    /// `(x, z)^{-1} = (-x, -z + f(x, x))`.
    pub fn inverse(&self, g: &ExtraspecialElement) -> ExtraspecialElement {
        self.power(g, -1)
    }

    /// `g^{-1} h^{-1} g h = (0, F(x_g, x_h))`.
    pub fn commutator(
        &self,
        g: &ExtraspecialElement,
        h: &ExtraspecialElement,
    ) -> ExtraspecialElement {
        let gi = self.inverse(g);
        let hi = self.inverse(h);
        self.mul(&self.mul(&gi, &hi), &self.mul(g, h))
    }

    /// Element with index `i` in `0..p^{2n+1}` (`z` is the least significant digit).
    pub fn element_at(&self, i: usize) -> ExtraspecialElement {
        let p = self.p() as usize;
        ExtraspecialElement {
            x: index_vector(i / p, self.dim(), self.p()),
            z: Elem((i % p) as u32),
        }
    }

    pub fn index_of(&self, g: &ExtraspecialElement) -> usize {
        crate::matrix::vector_index(&g.x, self.p()) * self.p() as usize + g.z.0 as usize
    }

    /// All elements, when the group has at most `cap` of them.
    pub fn elements(&self, cap: usize) -> Result<Vec<ExtraspecialElement>> {
        let n = self
            .order()
            .filter(|&o| o <= cap as u64)
            .ok_or(Error::CapExceeded(cap))? as usize;
        Ok((0..n).map(|i| self.element_at(i)).collect())
    }

    /// Number of `x` in `V` with `f(x, x) = 0`.
    pub fn isotropic_count(&self) -> u64 {
        let total = (self.p() as u64).pow(self.dim() as u32);
        (0..total)
            .filter(|&i| {
                let x = index_vector(i as usize, self.dim(), self.p());
                self.f(&x, &x).is_zero()
            })
            .count() as u64
    }

    /// Isomorphism type: `E^n` for odd `p`; for `p = 2` decided by the number of `x`
    /// with `f(x, x) = 0`, which is `2^{n-1}(2^n + 1)` for `D^n` and `2^{n-1}(2^n - 1)` for `D^{n-1}Q`.
    pub fn classify(&self) -> Result<IsoType> {
        let n = self.n();
        if self.p() != 2 {
            return Ok(IsoType::new(IsoTag::En, n));
        }
        if self.dim() > 24 {
            return Ok(self.standard_basis().iso);
        }
        let count = self.isotropic_count();
        let half = 1u64 << (n - 1);
        let full = 1u64 << n;
        if count == half * (full + 1) {
            Ok(IsoType::new(IsoTag::Dn, n))
        } else if count == half * (full - 1) {
            Ok(IsoType::new(IsoTag::Dn1Q, n))
        } else {
            Err(Error::InconsistentCount { count, n })
        }
    }

    /// A basis `b_1, ..., b_{2n}` (rows) carrying `E(f)` onto the standard group of its type:
    /// `F(b_k, b_l) = F_std(e_k, e_l)` and, for `p = 2`, `f(b_k, b_k) = f_std(e_k, e_k)`.
    pub fn standard_basis(&self) -> StandardBasis {
        let field = self.field().clone();
        let f = field.as_ref();
        let dim = self.dim();
        let two = f.from_int(2);
        let mut work: Vec<Vec<Elem>> = Matrix::identity(dim).row_vecs();
        let mut basis: Vec<Vec<Elem>> = Vec::with_capacity(dim);
        let mut quaternion = false;
        let q = |v: &[Elem]| self.f(v, v);
        while !work.is_empty() {
            let (e, mut fp) = if self.p() == 2 {
                match self.singular_vector(&work) {
                    Some(e) => {
                        let fp = self.partner(&e, &work);
                        (e, fp)
                    }
                    None => {
                        quaternion = true;
                        let e = work[0].clone();
                        let fp = self.partner(&e, &work);
                        (e, fp)
                    }
                }
            } else {
                let e = work[0].clone();
                let fp = self.partner(&e, &work);
                (e, fp)
            };
            // Normalize F(e, f') to its standard value.
            let target = if self.p() == 2 { Elem::ONE } else { two };
            let c = f
                .div(target, self.big_f(&e, &fp))
                .expect("partner pairs nontrivially");
            fp = vec_scale(c, &fp, f);
            if self.p() == 2 && !quaternion {
                let qf = q(&fp);
                fp = vec_add(&fp, &vec_scale(qf, &e, f), f);
            }
            let cef = self.big_f(&e, &fp);
            let mut next = Vec::with_capacity(work.len());
            for w in &work {
                let b = f.div(self.big_f(w, &e), cef).unwrap();
                let a = f.neg(f.div(self.big_f(w, &fp), cef).unwrap());
                let projected = vec_add(
                    &vec_add(w, &vec_scale(a, &e, f), f),
                    &vec_scale(b, &fp, f),
                    f,
                );
                next.push(projected);
            }
            let (r, piv) = Matrix::from_rows(next).rref(f);
            work = r.submatrix(0..piv.len(), 0..dim).row_vecs();
            basis.push(e);
            basis.push(fp);
        }
        let n = self.n();
        let iso = if self.p() != 2 {
            IsoType::new(IsoTag::En, n)
        } else if quaternion {
            IsoType::new(IsoTag::Dn1Q, n)
        } else {
            IsoType::new(IsoTag::Dn, n)
        };
        StandardBasis {
            basis: Matrix::from_rows(basis),
            iso,
        }
    }

    /// Some `w` in the span of `work` with `F(e, w) != 0`.
    fn partner(&self, e: &[Elem], work: &[Vec<Elem>]) -> Vec<Elem> {
        work.iter()
            .find(|w| !self.big_f(e, w).is_zero())
            .cloned()
            .expect("F is nondegenerate on the complement")
    }

    /// A nonzero `v` in the span of `work` with `f(v, v) = 0`, for `p = 2`.
    fn singular_vector(&self, work: &[Vec<Elem>]) -> Option<Vec<Elem>> {
        let f = self.field().as_ref();
        let q = |v: &[Elem]| self.f(v, v);
        let a = &work[0];
        if q(a).is_zero() {
            return Some(a.clone());
        }
        let b = self.partner(a, work);
        if q(&b).is_zero() {
            return Some(b);
        }
        // q(a) = q(b) = 1 and F(a, b) = 1: the plane <a, b> is anisotropic.
        // Any vector orthogonal to the plane yields a singular vector c or c + a.
        let c = work.iter().find_map(|w| {
            let fa = self.big_f(w, a);
            let fb = self.big_f(w, b.as_slice());
            let c = vec_add(
                &vec_add(w, &vec_scale(fb, a, f), f),
                &vec_scale(fa, &b, f),
                f,
            );
            (!c.iter().all(|e| e.is_zero())).then_some(c)
        })?;
        if q(&c).is_zero() {
            Some(c)
        } else {
            Some(vec_add(&c, a, f))
        }
    }

    pub fn automorphism_from_isometry(&self, g: &Matrix) -> Result<GroupAutomorphism> {
        self.automorphism_from_similitude(g, Elem::ONE)
            .map_err(|_| Error::NotAnIsometry)
    }

    /// `(x, z) -> (x g, alpha z)` for `g` with `f(x g, y g) = alpha f(x, y)`.
    pub fn automorphism_from_similitude(
        &self,
        g: &Matrix,
        alpha: Elem,
    ) -> Result<GroupAutomorphism> {
        let f = self.field();
        if g.rows() != self.dim() || g.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: g.rows(),
            });
        }
        let lhs = g.mul(self.form.gram(), f).mul(&g.transpose(), f);
        if alpha.is_zero() || lhs != self.form.gram().scale(alpha, f) || !g.is_invertible(f) {
            return Err(Error::NotASimilitude);
        }
        Ok(GroupAutomorphism {
            matrix: g.clone(),
            alpha,
        })
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            form: self.form.to_json(),
        }
    }

    pub fn from_json(json: &GroupJson) -> Result<Self> {
        Self::new(SesquiForm::from_json(&json.form)?)
    }
}

/// Basis realizing `E(f)` as a standard group, with the resulting type.
#[derive(Clone, Debug)]
pub struct StandardBasis {
    pub basis: Matrix,
    pub iso: IsoType,
}

/// `(x, z) -> (x g, alpha z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAutomorphism {
    pub matrix: Matrix,
    pub alpha: Elem,
}

impl GroupAutomorphism {
    pub fn apply(&self, group: &ExtraspecialGroup, g: &ExtraspecialElement) -> ExtraspecialElement {
        let f = group.field();
        ExtraspecialElement {
            x: self.matrix.apply_row(&g.x, f),
            z: f.mul(self.alpha, g.z),
        }
    }
}

/// JSON group: embeds its form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub form: FormJson,
}

/// Direct sum of standard 2-dimensional forms for the given type over `F_p`.
pub fn standard_form_for(tag: IsoTag, n: usize, p: u32) -> Result<SesquiForm> {
    let field = GaloisField::prime(p)?;
    if n == 0 {
        return Err(Error::Invalid("extraspecial groups need n >= 1".into()));
    }
    let (block, last) = match tag {
        IsoTag::En => (StandardForm::FE, StandardForm::FE),
        IsoTag::Dn => (StandardForm::FD, StandardForm::FD),
        IsoTag::Dn1Q => (StandardForm::FD, StandardForm::FQ),
    };
    let b = SesquiForm::standard(block, &field)?;
    let mut acc = SesquiForm::bilinear(&field, Matrix::zeros(0, 0))?;
    for _ in 0..n - 1 {
        acc = acc.direct_sum(&b)?;
    }
    acc.direct_sum(&SesquiForm::standard(last, &field)?)
}

/// Named forms available to the command line and tests.
pub const BUILTIN_NAMES: &[&str] = &[
    "fD",
    "fQ",
    "fE",
    "D2",
    "DQ",
    "D3",
    "D2Q",
    "E2",
    "hyperbolic-f4",
    "hermitian-f4-1",
    "hermitian-f4-3",
];

/// Over `F_2`: `fD`, `fQ` and their direct sums `D2`, `DQ`, `D3`, `D2Q`; over `F_3`: `fE`, `E2`;
/// trace forms over `F_2` of the hyperbolic form on `F_4^2` and of the Hermitian identity on `F_4^d`.
pub fn builtin_form(name: &str) -> Result<SesquiForm> {
    let std = |tag, n, p| standard_form_for(tag, n, p);
    match name {
        "fD" => std(IsoTag::Dn, 1, 2),
        "fQ" => std(IsoTag::Dn1Q, 1, 2),
        "fE" => std(IsoTag::En, 1, 3),
        "D2" => std(IsoTag::Dn, 2, 2),
        "DQ" => std(IsoTag::Dn1Q, 2, 2),
        "D3" => std(IsoTag::Dn, 3, 2),
        "D2Q" => std(IsoTag::Dn1Q, 3, 2),
        "E2" => std(IsoTag::En, 2, 3),
        "hyperbolic-f4" => {
            let f4 = GaloisField::new(2, 2)?;
            trace_form(&TraceFormSpec::canonical(SesquiForm::standard(
                StandardForm::Hyperbolic(1),
                &f4,
            )?))
        }
        "hermitian-f4-1" | "hermitian-f4-3" => {
            let d = if name.ends_with('1') { 1 } else { 3 };
            let f4 = GaloisField::new(2, 2)?;
            trace_form(&TraceFormSpec::canonical(SesquiForm::standard(
                StandardForm::HermitianIdentity(d),
                &f4,
            )?))
        }
        other => Err(Error::Invalid(format!("unknown builtin form `{other}`"))),
    }
}
