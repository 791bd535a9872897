//! Faithful absolutely irreducible representations of extraspecial groups over a
//! field `K'` of characteristic different from `p`, their duals, invariant forms
//! and restriction of scalars.
//!
//! Matrices act on row vectors from the right. A representation is stored by the
//! images `R_i` of the generators `(e_i, 0)` and the image `Z` of `(0, 1)`; then
//! `rho(x, z) = Z^{z - c(x)} R_1^{x_1} ... R_{2n}^{x_{2n}}` where
//! `(e_1, 0)^{x_1} ... (e_{2n}, 0)^{x_{2n}} = (x, c(x))`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraspecial::{binom2_mod, ExtraspecialElement, ExtraspecialGroup, GroupJson, IsoTag};
use crate::forms::{trace_form, FormKind, SesquiForm, TraceFormSpec};
use crate::gf::{Elem, FieldAuto, FieldDescriptor, GaloisField, SubfieldEmbedding};
use crate::matrix::{index_vector, Matrix, Monomial};

/// The three 2-generator building blocks.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BaseKind {
    /// Dihedral group of order 8 (`p = 2`), degree 2.
    D,
    /// Quaternion group (`p = 2`), degree 2.
    Q,
    /// Exponent-`p` group of order `p^3`, degree `p`.
    E(u32),
}

/// A form `(u, v) -> u J v^{t eta'}` preserved by a representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepForm {
    pub j: Matrix,
    pub eta_prime: FieldAuto,
}

impl RepForm {
    /// Whether `X J X^{t eta'} = J`.
    pub fn is_preserved_by(&self, x: &Matrix, field: &GaloisField) -> bool {
        x.mul(&self.j, field)
            .mul(&x.conj_transpose(field, self.eta_prime), field)
            == self.j
    }

    pub fn as_form(&self, field: &Arc<GaloisField>) -> SesquiForm {
        let kind = crate::forms::detect_kind(field, self.eta_prime, &self.j);
        SesquiForm::new(field, self.eta_prime, self.j.clone(), kind).expect("detected kind holds")
    }
}

#[derive(Clone, Debug)]
pub struct MatrixRep {
    group: ExtraspecialGroup,
    field: Arc<GaloisField>,
    generators: Vec<Matrix>,
    center: Matrix,
    form: Option<RepForm>,
    // gen_powers[i][k] = R_i^k for k < p (or the generator order).
    gen_powers: Vec<Vec<Matrix>>,
    center_powers: Vec<Matrix>,
    // The same powers as monomial matrices, when every generator and the center are monomial.
    monomial: Option<(Vec<Vec<Monomial>>, Vec<Monomial>)>,
}

impl MatrixRep {
    /// Builds a representation from generator and center images; the homomorphism
    /// property is the caller's contract (see [`MatrixRep::verify_pairs`]).
    pub fn from_parts(
        group: ExtraspecialGroup,
        field: Arc<GaloisField>,
        generators: Vec<Matrix>,
        center: Matrix,
        form: Option<RepForm>,
    ) -> Result<Self> {
        if generators.len() != group.dim() {
            return Err(Error::DimensionMismatch {
                expected: group.dim(),
                got: generators.len(),
            });
        }
        let d = center.rows();
        if let Some(bad) = generators.iter().find(|g| g.rows() != d || g.cols() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.rows(),
            });
        }
        let p = group.p() as u64;
        // Generators have order p (odd p) or dividing 4 (p = 2).
        let period = if p == 2 { 4 } else { p };
        let powers = |m: &Matrix| {
            let mut out = Vec::with_capacity(period as usize);
            let mut acc = Matrix::identity(d);
            for _ in 0..period {
                out.push(acc.clone());
                acc = acc.mul(m, &field);
            }
            out
        };
        let gen_powers: Vec<Vec<Matrix>> = generators.iter().map(powers).collect();
        let center_powers = powers(&center);
        let mono = |ms: &[Matrix]| {
            ms.iter()
                .map(Monomial::from_matrix)
                .collect::<Option<Vec<_>>>()
        };
        let monomial = gen_powers
            .iter()
            .map(|ps| mono(ps))
            .collect::<Option<Vec<_>>>()
            .zip(mono(&center_powers));
        Ok(MatrixRep {
            group,
            field,
            generators,
            center,
            form,
            gen_powers,
            center_powers,
            monomial,
        })
    }

    pub fn group(&self) -> &ExtraspecialGroup {
        &self.group
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.center.rows()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn center(&self) -> &Matrix {
        &self.center
    }

    /// The scalar `epsilon` with `rho(0, 1) = epsilon I`, if the center acts by scalars.
    pub fn epsilon(&self) -> Option<Elem> {
        self.center.as_scalar()
    }

    pub fn form(&self) -> Option<&RepForm> {
        self.form.as_ref()
    }

    pub fn with_form(mut self, form: Option<RepForm>) -> Self {
        self.form = form;
        self
    }

    /// `c(x)` with `prod_i (e_i, 0)^{x_i} = (x, c(x))`.
    pub fn cocycle(&self, x: &[Elem]) -> Elem {
        let f = self.group.field();
        let p = self.group.p();
        let gram = self.group.form().gram();
        let mut acc = Elem::ZERO;
        for i in 0..x.len() {
            if x[i].is_zero() {
                continue;
            }
            let c = Elem(binom2_mod(x[i].0 as i64, p));
            acc = f.add(acc, f.mul(c, gram.get(i, i)));
            for j in i + 1..x.len() {
                acc = f.add(acc, f.mul(f.mul(x[i], x[j]), gram.get(i, j)));
            }
        }
        acc
    }

    pub fn evaluate(&self, g: &ExtraspecialElement) -> Result<Matrix> {
        if g.x.len() != self.group.dim() {
            return Err(Error::GroupMismatch);
        }
        Ok(self.eval(g))
    }

    /// Unchecked evaluation.
    pub fn eval(&self, g: &ExtraspecialElement) -> Matrix {
        let f = self.group.field();
        let e = f.sub(g.z, self.cocycle(&g.x)).0 as usize;
        let mut acc: Option<Matrix> = (e != 0).then(|| self.center_powers[e].clone());
        for (i, &xi) in g.x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let m = &self.gen_powers[i][xi.0 as usize];
            acc = Some(match acc {
                None => m.clone(),
                Some(a) => a.mul(m, &self.field),
            });
        }
        acc.unwrap_or_else(|| Matrix::identity(self.degree()))
    }

    /// Whether all images are monomial matrices (enables [`MatrixRep::eval_monomial`]).
    pub fn is_monomial(&self) -> bool {
        self.monomial.is_some()
    }

    /// Evaluation as a monomial matrix, for monomial representations.
    pub fn eval_monomial(&self, g: &ExtraspecialElement) -> Option<Monomial> {
        let (gens, center) = self.monomial.as_ref()?;
        let f = self.group.field();
        let e = f.sub(g.z, self.cocycle(&g.x)).0 as usize;
        let mut acc = center[e].clone();
        for (i, &xi) in g.x.iter().enumerate() {
            if !xi.is_zero() {
                acc = acc.mul(&gens[i][xi.0 as usize], &self.field);
            }
        }
        Some(acc)
    }

    /// `rho(x, 0)`.
    pub fn eval_x(&self, x: &[Elem]) -> Matrix {
        self.eval(&ExtraspecialElement::new(x.to_vec(), Elem::ZERO))
    }

    /// Checks `rho(gh) = rho(g) rho(h)` on the given pairs; returns the number of failures.
    pub fn verify_pairs(&self, pairs: &[(ExtraspecialElement, ExtraspecialElement)]) -> usize {
        use rayon::prelude::*;
        pairs
            .par_iter()
            .filter(|(g, h)| {
                let gh = self.group.mul(g, h);
                self.eval(&gh) != self.eval(g).mul(&self.eval(h), &self.field)
            })
            .count()
    }

    /// Exhaustive homomorphism check; returns the number of failing pairs.
    pub fn verify_exhaustive(&self, cap: usize) -> Result<usize> {
        use rayon::prelude::*;
        let all = self.group.elements(cap)?;
        let images: Vec<Matrix> = all.par_iter().map(|g| self.eval(g)).collect();
        let g = &self.group;
        Ok((0..all.len())
            .into_par_iter()
            .map(|i| {
                (0..all.len())
                    .filter(|&j| {
                        let k = g.index_of(&g.mul(&all[i], &all[j]));
                        images[k] != images[i].mul(&images[j], &self.field)
                    })
                    .count()
            })
            .sum())
    }

    /// Rank of the span of the `p^{2n}` matrices `rho(x, 0)` (full rank means linearly independent).
    pub fn linear_independence_rank(&self, cap: usize) -> Result<(usize, usize)> {
        let count = (self.group.p() as usize)
            .checked_pow(self.group.dim() as u32)
            .filter(|&c| c <= cap)
            .ok_or(Error::CapExceeded(cap))?;
        let rows: Vec<Vec<Elem>> = (0..count)
            .map(|i| {
                self.eval_x(&index_vector(i, self.group.dim(), self.group.p()))
                    .data()
                    .to_vec()
            })
            .collect();
        Ok((Matrix::from_rows(rows).rank(&self.field), count))
    }

    /// `rho*(g) = rho(g^{-1})^t`.
    pub fn contragredient(&self) -> Result<MatrixRep> {
        let f = &self.field;
        let dual = |m: &Matrix| m.inverse(f).map(|i| i.transpose());
        let generators = self
            .generators
            .iter()
            .map(dual)
            .collect::<Result<Vec<_>>>()?;
        let center = dual(&self.center)?;
        let form = match &self.form {
            Some(rf) => Some(RepForm {
                j: rf.j.inverse(f)?.transpose(),
                eta_prime: rf.eta_prime,
            }),
            None => None,
        };
        MatrixRep::from_parts(self.group.clone(), f.clone(), generators, center, form)
    }

    /// `rho + rho*` on `W* + W` with `X -> diag(X, X^{-t})`, and the preserved form
    /// with Gram `[[0, 0], [I, 0]]`.
    pub fn sum_with_contragredient(&self) -> Result<(MatrixRep, RepForm)> {
        let dual = self.contragredient()?;
        let generators = self
            .generators
            .iter()
            .zip(dual.generators())
            .map(|(a, b)| a.block_diag(b))
            .collect();
        let center = self.center.block_diag(dual.center());
        let d = self.degree();
        let j = Matrix::from_fn(2 * d, 2 * d, |i, k| {
            if i >= d && k + d == i {
                Elem::ONE
            } else {
                Elem::ZERO
            }
        });
        let form = RepForm {
            j,
            eta_prime: FieldAuto::IDENTITY,
        };
        let rep = MatrixRep::from_parts(
            self.group.clone(),
            self.field.clone(),
            generators,
            center,
            Some(form.clone()),
        )?;
        Ok((rep, form))
    }

    /// Basis of `{J : X J X^{t eta'} = J for all X in the image}`.
    pub fn invariant_form_space(&self, eta_prime: FieldAuto) -> Result<Vec<Matrix>> {
        let f = self.field.as_ref();
        let d = self.degree();
        let mut basis: Vec<Matrix> = (0..d * d)
            .map(|k| {
                Matrix::from_fn(d, d, |i, j| {
                    if i * d + j == k {
                        Elem::ONE
                    } else {
                        Elem::ZERO
                    }
                })
            })
            .collect();
        let mut images: Vec<&Matrix> = self.generators.iter().collect();
        images.push(&self.center);
        for x in images {
            if basis.is_empty() {
                break;
            }
            // X J X^{t eta'} = J  <=>  X J - J Y = 0 with Y = (X^{t eta'})^{-1}.
            let y = x.conj_transpose(f, eta_prime).inverse(f)?;
            let rows: Vec<Vec<Elem>> = basis
                .iter()
                .map(|b| x.mul(b, f).sub(&b.mul(&y, f), f).data().to_vec())
                .collect();
            let kernel = Matrix::from_rows(rows).left_kernel(f);
            basis = kernel
                .row_vecs()
                .iter()
                .map(|c| {
                    let mut acc = Matrix::zeros(d, d);
                    for (ck, b) in c.iter().zip(&basis) {
                        if !ck.is_zero() {
                            acc.add_scaled(*ck, b, f);
                        }
                    }
                    acc
                })
                .collect();
        }
        Ok(basis)
    }

    /// The invariant form for `eta'`, normalized so its first nonzero entry is 1, or
    /// `None` when no nonzero invariant form exists.
    pub fn invariant_form(&self, eta_prime: FieldAuto) -> Result<Option<RepForm>> {
        let f = self.field.as_ref();
        let space = self.invariant_form_space(eta_prime)?;
        let Some(j) = space.into_iter().find(|j| j.is_invertible(f)) else {
            return Ok(None);
        };
        let lead = *j.data().iter().find(|e| !e.is_zero()).expect("invertible");
        let j = j.scale(f.inv(lead)?, f);
        Ok(Some(RepForm { j, eta_prime }))
    }

    /// Restriction of scalars to the subfield of the given degree: every entry becomes its
    /// regular-representation block. Over the prime field, a preserved form `J` becomes the
    /// trace form `T(lambda J)` with the canonical `lambda`.
    pub fn restrict_scalars(&self, subfield_degree: u32) -> Result<MatrixRep> {
        let emb = SubfieldEmbedding::new(&self.field, subfield_degree)?;
        if subfield_degree == self.field.r() {
            return Ok(self.clone());
        }
        let generators = self
            .generators
            .iter()
            .map(|g| g.restrict_to_subfield(&emb))
            .collect();
        let center = self.center.restrict_to_subfield(&emb);
        let form = match (&self.form, subfield_degree) {
            (Some(rf), 1) => {
                let inner = rf.as_form(&self.field);
                let tf = trace_form(&TraceFormSpec::canonical(inner))?;
                Some(RepForm {
                    j: tf.gram().clone(),
                    eta_prime: FieldAuto::IDENTITY,
                })
            }
            _ => None,
        };
        MatrixRep::from_parts(
            self.group.clone(),
            emb.sub().clone(),
            generators,
            center,
            form,
        )
    }

    pub fn to_json(&self) -> RepJson {
        let f = self.field.as_ref();
        RepJson {
            field: f.descriptor(),
            epsilon: self.epsilon().map(|e| f.coeffs(e)),
            degree: self.degree(),
            generators: self.generators.iter().map(|g| g.to_coeff_rows(f)).collect(),
            center: self.center.to_coeff_rows(f),
            form: self.form.as_ref().map(|rf| RepFormJson {
                j: rf.j.to_coeff_rows(f),
                eta_power: rf.eta_prime.power,
            }),
            group: self.group.to_json(),
        }
    }

    pub fn from_json(json: &RepJson) -> Result<MatrixRep> {
        let field = GaloisField::from_descriptor(&json.field)?;
        let group = ExtraspecialGroup::from_json(&json.group)?;
        let generators = json
            .generators
            .iter()
            .map(|g| Matrix::from_coeff_rows(&field, g))
            .collect::<Result<Vec<_>>>()?;
        let center = Matrix::from_coeff_rows(&field, &json.center)?;
        let form = match &json.form {
            Some(fj) => Some(RepForm {
                j: Matrix::from_coeff_rows(&field, &fj.j)?,
                eta_prime: FieldAuto::new(fj.eta_power),
            }),
            None => None,
        };
        MatrixRep::from_parts(group, field, generators, center, form)
    }
}

/// JSON representation file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepJson {
    pub field: FieldDescriptor,
    pub epsilon: Option<Vec<u32>>,
    pub degree: usize,
    pub generators: Vec<Vec<Vec<Vec<u32>>>>,
    pub center: Vec<Vec<Vec<u32>>>,
    pub form: Option<RepFormJson>,
    pub group: GroupJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepFormJson {
    #[serde(rename = "J")]
    pub j: Vec<Vec<Vec<u32>>>,
    pub eta_power: u32,
}

/// The least `(alpha, beta)` (in element order) with `alpha^2 + beta^2 = -1`.
pub fn alpha_beta(field: &GaloisField) -> Result<(Elem, Elem)> {
    let minus_one = field.neg(Elem::ONE);
    for a in field.elements() {
        for b in field.elements() {
            if field.add(field.mul(a, a), field.mul(b, b)) == minus_one {
                return Ok((a, b));
            }
        }
    }
    Err(Error::NoAlphaBeta)
}

/// `rho_D`, `rho_Q` or `rho_E` over `field`, with its standard invariant form:
/// `J = I` for `D`, `J = [[0, 1], [-1, 0]]` for `Q`, and the Hermitian `J = I` for `E`
/// when an automorphism inverting `epsilon` exists.
pub fn rho_base(kind: BaseKind, field: &Arc<GaloisField>) -> Result<MatrixRep> {
    let f = field.as_ref();
    match kind {
        BaseKind::D | BaseKind::Q => {
            if f.p() == 2 {
                return Err(Error::NoRootOfUnity(2));
            }
            let minus = f.neg(Elem::ONE);
            let (tag, r1, r2, j) = if kind == BaseKind::D {
                (
                    IsoTag::Dn,
                    Matrix::from_ints(f, &[&[0, 1], &[1, 0]]),
                    Matrix::from_ints(f, &[&[1, 0], &[0, -1]]),
                    Matrix::identity(2),
                )
            } else {
                let (a, b) = alpha_beta(f)?;
                (
                    IsoTag::Dn1Q,
                    Matrix::from_rows(vec![vec![a, b], vec![b, f.neg(a)]]),
                    Matrix::from_ints(f, &[&[0, 1], &[-1, 0]]),
                    Matrix::from_ints(f, &[&[0, 1], &[-1, 0]]),
                )
            };
            let group = ExtraspecialGroup::standard(tag, 1, 2)?;
            let form = RepForm {
                j,
                eta_prime: FieldAuto::IDENTITY,
            };
            MatrixRep::from_parts(
                group,
                field.clone(),
                vec![r1, r2],
                Matrix::scalar(2, minus),
                Some(form),
            )
        }
        BaseKind::E(p) => {
            if p == 2 || !crate::gf::is_prime(p as u64) {
                return Err(Error::Invalid(format!("rho_E needs an odd prime, got {p}")));
            }
            let eps = f
                .primitive_root_of_unity(p as u64)
                .map_err(|_| Error::NoRootOfUnity(p))?;
            let d = p as usize;
            let shift = Matrix::from_fn(d, d, |i, j| {
                if j == (i + 1) % d {
                    Elem::ONE
                } else {
                    Elem::ZERO
                }
            });
            let eps2 = f.mul(eps, eps);
            let diag: Vec<Elem> = (0..d).map(|i| f.pow_u(eps2, i as u64)).collect();
            let group = ExtraspecialGroup::standard(IsoTag::En, 1, p)?;
            let form = f.inverting_automorphism(eps).map(|eta_prime| RepForm {
                j: Matrix::identity(d),
                eta_prime,
            });
            MatrixRep::from_parts(
                group,
                field.clone(),
                vec![shift, Matrix::diagonal(&diag)],
                Matrix::scalar(d, eps),
                form,
            )
        }
    }
}

/// Tensor product of representations of `E(f_1), ..., E(f_k)` sharing `epsilon`: a
/// representation of `E(f_1 + ... + f_k)` of degree `prod deg_i`.
pub fn tensor_rep(reps: &[MatrixRep]) -> Result<MatrixRep> {
    let first = reps
        .first()
        .ok_or_else(|| Error::Invalid("empty tensor product".into()))?;
    if reps.len() == 1 {
        return Ok(first.clone());
    }
    let field = first.field().clone();
    let eps = first.epsilon().ok_or(Error::EpsilonMismatch)?;
    for r in reps {
        if **r.field() != *field {
            return Err(Error::FieldMismatch);
        }
        if r.epsilon() != Some(eps) {
            return Err(Error::EpsilonMismatch);
        }
    }
    let f = field.as_ref();
    let degrees: Vec<usize> = reps.iter().map(|r| r.degree()).collect();
    let total: usize = degrees.iter().product();
    let mut generators = Vec::new();
    for (k, r) in reps.iter().enumerate() {
        let before: usize = degrees[..k].iter().product();
        let after: usize = degrees[k + 1..].iter().product();
        for g in r.generators() {
            generators.push(
                Matrix::identity(before)
                    .kron(g, f)
                    .kron(&Matrix::identity(after), f),
            );
        }
    }
    let mut form_acc = Vec::new();
    let eta = first.form().map(|rf| rf.eta_prime);
    for r in reps {
        match (r.form(), eta) {
            (Some(rf), Some(e)) if rf.eta_prime.power % f.r() == e.power % f.r() => {
                form_acc.push(rf.j.clone())
            }
            _ => break,
        }
    }
    let form = (form_acc.len() == reps.len()).then(|| RepForm {
        j: form_acc
            .iter()
            .skip(1)
            .fold(form_acc[0].clone(), |acc, j| acc.kron(j, f)),
        eta_prime: eta.expect("all factors carry forms"),
    });
    let mut sum = reps[0].group().form().clone();
    for r in &reps[1..] {
        sum = sum.direct_sum(r.group().form())?;
    }
    let group = ExtraspecialGroup::new(sum)?;
    MatrixRep::from_parts(
        group,
        field.clone(),
        generators,
        Matrix::scalar(total, eps),
        form,
    )
}

/// The standard representation of `E^n`, `D^n` or `D^{n-1}Q` over `field`: a tensor
/// product of base representations.
pub fn standard_rep(tag: IsoTag, n: usize, p: u32, field: &Arc<GaloisField>) -> Result<MatrixRep> {
    if n == 0 {
        return Err(Error::Invalid("extraspecial groups need n >= 1".into()));
    }
    let kinds: Vec<BaseKind> = match tag {
        IsoTag::En => vec![BaseKind::E(p); n],
        IsoTag::Dn => vec![BaseKind::D; n],
        IsoTag::Dn1Q => {
            let mut v = vec![BaseKind::D; n - 1];
            v.push(BaseKind::Q);
            v
        }
    };
    let reps = kinds
        .into_iter()
        .map(|k| rho_base(k, field))
        .collect::<Result<Vec<_>>>()?;
    tensor_rep(&reps)
}

/// A faithful absolutely irreducible representation of an arbitrary `E(f)` over `field`,
/// transported from the standard representation along an isomorphism
/// `(x, z) -> (x A, z + q(x))` onto the standard group. The preserved form is the
/// standard one (the image set is unchanged).
pub fn rep_for_group(group: &ExtraspecialGroup, field: &Arc<GaloisField>) -> Result<MatrixRep> {
    let sb = group.standard_basis();
    let n = group.n();
    let p = group.p();
    let std = standard_rep(sb.iso.tag, n, p, field)?;
    let fp = group.field().as_ref();
    let a = sb.basis.inverse(fp)?;
    let std_group = std.group().clone();
    let generators = (0..group.dim())
        .map(|i| {
            let e = group.generator(i).x;
            let ea = a.apply_row(&e, fp);
            // beta(x, y) = f_std(xA, yA) - f(x, y); q(e_i) = beta_ii / 2 (odd p), 0 (p = 2).
            let q = if p == 2 {
                Elem::ZERO
            } else {
                let beta = fp.sub(std_group.f(&ea, &ea), group.f(&e, &e));
                fp.div(beta, fp.from_int(2)).expect("p odd")
            };
            std.eval(&ExtraspecialElement::new(ea, q))
        })
        .collect();
    MatrixRep::from_parts(
        group.clone(),
        field.clone(),
        generators,
        std.center().clone(),
        std.form().cloned(),
    )
}

/// Whether the form is of the kind expected for the base representation (used in checks).
pub fn expected_form_kind(kind: BaseKind) -> FormKind {
    match kind {
        BaseKind::D => FormKind::Symmetric,
        BaseKind::Q => FormKind::Alternating,
        BaseKind::E(_) => FormKind::Hermitian,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraspecial::builtin_form;

    fn f3() -> Arc<GaloisField> {
        GaloisField::prime(3).unwrap()
    }
    fn f4() -> Arc<GaloisField> {
        GaloisField::new(2, 2).unwrap()
    }

    #[test]
    fn monomial_evaluation_matches_dense() {
        let e2 = ExtraspecialGroup::new(builtin_form("E2").unwrap()).unwrap();
        let rep = rep_for_group(&e2, &f4()).unwrap();
        assert!(rep.is_monomial());
        for g in e2.elements(1000).unwrap() {
            assert_eq!(rep.eval_monomial(&g).unwrap().to_matrix(), rep.eval(&g));
        }
        // rho_Q has a non-monomial generator.
        let q = rho_base(BaseKind::Q, &f3()).unwrap();
        assert!(!q.is_monomial());
        assert!(q.eval_monomial(&q.group().generator(0)).is_none());
    }

    #[test]
    fn base_matrices() {
        let d = rho_base(BaseKind::D, &f3()).unwrap();
        assert_eq!(
            d.generators()[0],
            Matrix::from_ints(&f3(), &[&[0, 1], &[1, 0]])
        );
        assert_eq!(alpha_beta(&f3()).unwrap(), (Elem(1), Elem(1)));
        let q = rho_base(BaseKind::Q, &f3()).unwrap();
        assert_eq!(
            q.generators()[0],
            Matrix::from_ints(&f3(), &[&[1, 1], &[1, -1]])
        );
        let e = rho_base(BaseKind::E(3), &f4()).unwrap();
        let c = e.eval(&ExtraspecialElement::new(vec![Elem(0), Elem(0)], Elem(1)));
        assert_eq!(c, Matrix::scalar(3, Elem(2)));
        assert_eq!(e.epsilon(), Some(Elem(2)));
        assert_eq!(
            rho_base(BaseKind::E(3), &f3()).unwrap_err(),
            Error::NoRootOfUnity(3)
        );
        assert_eq!(
            rho_base(BaseKind::D, &f4()).unwrap_err(),
            Error::NoRootOfUnity(2)
        );
    }

    #[test]
    fn base_reps_are_homomorphisms() {
        for (kind, field) in [
            (BaseKind::D, f3()),
            (BaseKind::Q, f3()),
            (BaseKind::E(3), f4()),
            (BaseKind::Q, GaloisField::prime(5).unwrap()),
        ] {
            let rep = rho_base(kind, &field).unwrap();
            assert_eq!(rep.verify_exhaustive(1000).unwrap(), 0, "{kind:?}");
            let (rank, count) = rep.linear_independence_rank(1000).unwrap();
            assert_eq!(rank, count);
            let form = rep.form().unwrap();
            assert!(rep
                .generators()
                .iter()
                .all(|g| form.is_preserved_by(g, &field)));
            assert_eq!(form.as_form(&field).kind(), expected_form_kind(kind));
        }
    }

    #[test]
    fn rho_e_matches_displayed_formula() {
        let f = f4();
        let rep = rho_base(BaseKind::E(3), &f).unwrap();
        let eps = Elem(2);
        let p = rep.generators()[0].clone();
        let diag = rep.generators()[1].clone();
        for x in 0..3u32 {
            for y in 0..3u32 {
                for z in 0..3u32 {
                    let e = (z as i64 - (x * y) as i64).rem_euclid(3) as u64;
                    let expected = p
                        .pow(x as u64, &f)
                        .mul(&diag.pow(y as u64, &f), &f)
                        .scale(f.pow_u(eps, e), &f);
                    let g = ExtraspecialElement::new(vec![Elem(x), Elem(y)], Elem(z));
                    assert_eq!(rep.eval(&g), expected);
                }
            }
        }
    }

    #[test]
    fn tensor_reps() {
        let d = rho_base(BaseKind::D, &f3()).unwrap();
        let q = rho_base(BaseKind::Q, &f3()).unwrap();
        assert_eq!(tensor_rep(std::slice::from_ref(&d)).unwrap().degree(), 2);
        let dq = tensor_rep(&[d, q]).unwrap();
        assert_eq!(dq.degree(), 4);
        assert_eq!(dq.verify_exhaustive(1000).unwrap(), 0);
        assert_eq!(dq.linear_independence_rank(1000).unwrap(), (16, 16));
        assert_eq!(
            dq.form().unwrap().j,
            Matrix::identity(2).kron(&Matrix::from_ints(&f3(), &[&[0, 1], &[-1, 0]]), &f3())
        );
        let e = rho_base(BaseKind::E(3), &f4()).unwrap();
        let f7 = GaloisField::prime(7).unwrap();
        let e7 = rho_base(BaseKind::E(3), &f7).unwrap();
        assert_eq!(
            tensor_rep(&[e.clone(), e7]).unwrap_err(),
            Error::FieldMismatch
        );
        let ee = tensor_rep(&[e.clone(), e]).unwrap();
        assert_eq!(ee.verify_pairs(&sample_pairs(ee.group(), 500)), 0);
        assert_eq!(ee.linear_independence_rank(100).unwrap(), (81, 81));
    }

    fn sample_pairs(
        g: &ExtraspecialGroup,
        n: usize,
    ) -> Vec<(ExtraspecialElement, ExtraspecialElement)> {
        let order = g.order().unwrap() as usize;
        (0..n)
            .map(|i| {
                (
                    g.element_at((i * 7919) % order),
                    g.element_at((i * 104729 + 13) % order),
                )
            })
            .collect()
    }

    #[test]
    fn contragredient_and_sum() {
        let e = rho_base(BaseKind::E(3), &f4()).unwrap();
        let dual = e.contragredient().unwrap();
        assert_eq!(dual.epsilon(), Some(Elem(3)));
        assert_eq!(dual.verify_exhaustive(100).unwrap(), 0);
        assert_eq!(dual.contragredient().unwrap().generators(), e.generators());
        let d = rho_base(BaseKind::D, &f3()).unwrap();
        let (sum, form) = d.sum_with_contragredient().unwrap();
        assert_eq!(sum.degree(), 4);
        for g in sum.group().elements(100).unwrap() {
            assert!(form.is_preserved_by(&sum.eval(&g), &f3()));
        }
        let anti = form.j.sub(&form.j.transpose(), &f3());
        assert!(anti.is_invertible(&f3()));
        assert_eq!(sum.verify_exhaustive(100).unwrap(), 0);
    }

    #[test]
    fn dual_of_rho_d_is_equivalent() {
        // rho_D preserves J = I, so J intertwines rho_D and its contragredient.
        let d = rho_base(BaseKind::D, &f3()).unwrap();
        let dual = d.contragredient().unwrap();
        let j = &d.form().unwrap().j;
        for g in d.group().elements(100).unwrap() {
            assert_eq!(d.eval(&g).mul(j, &f3()), j.mul(&dual.eval(&g), &f3()));
        }
    }

    #[test]
    fn invariant_forms_by_linear_algebra() {
        let d = rho_base(BaseKind::D, &f3()).unwrap();
        let jd = d.invariant_form(FieldAuto::IDENTITY).unwrap().unwrap();
        assert_eq!(jd.j, Matrix::identity(2));
        assert_eq!(
            d.invariant_form_space(FieldAuto::IDENTITY).unwrap().len(),
            1
        );
        let q = rho_base(BaseKind::Q, &f3()).unwrap();
        let jq = q.invariant_form(FieldAuto::IDENTITY).unwrap().unwrap();
        assert_eq!(jq.j, Matrix::from_ints(&f3(), &[&[0, 1], &[-1, 0]]));
        let e = rho_base(BaseKind::E(3), &f4()).unwrap();
        let je = e.invariant_form(FieldAuto::new(1)).unwrap().unwrap();
        assert_eq!(je.j, Matrix::identity(3));
        assert!(e.invariant_form(FieldAuto::IDENTITY).unwrap().is_none());
        let f7 = GaloisField::prime(7).unwrap();
        let e7 = rho_base(BaseKind::E(3), &f7).unwrap();
        assert!(e7.form().is_none());
        assert!(e7.invariant_form(FieldAuto::IDENTITY).unwrap().is_none());
    }

    #[test]
    fn restriction_of_scalars() {
        let e = rho_base(BaseKind::E(3), &f4()).unwrap();
        assert_eq!(e.restrict_scalars(2).unwrap().degree(), 3);
        let r = e.restrict_scalars(1).unwrap();
        assert_eq!(r.degree(), 6);
        assert_eq!(r.verify_exhaustive(100).unwrap(), 0);
        let form = r.form().unwrap();
        for g in r.generators() {
            assert!(form.is_preserved_by(g, r.field()));
        }
        assert!(form
            .j
            .sub(&form.j.transpose(), r.field())
            .is_invertible(r.field()));
        assert_eq!(
            e.restrict_scalars(3).unwrap_err(),
            Error::InvalidSubfield { sub: 3, r: 2 }
        );
        let f16 = GaloisField::new(2, 4).unwrap();
        let e16 = rho_base(BaseKind::E(3), &f16).unwrap();
        let mid = e16.restrict_scalars(2).unwrap();
        assert_eq!(mid.degree(), 6);
        assert_eq!(mid.verify_exhaustive(100).unwrap(), 0);
    }

    #[test]
    fn arbitrary_forms_get_faithful_reps() {
        for (name, field) in [
            ("hyperbolic-f4", f3()),
            ("hermitian-f4-3", f3()),
            ("D2Q", GaloisField::prime(5).unwrap()),
            ("fQ", f3()),
        ] {
            let g = ExtraspecialGroup::new(builtin_form(name).unwrap()).unwrap();
            let rep = rep_for_group(&g, &field).unwrap();
            assert_eq!(rep.degree(), 1 << g.n());
            assert_eq!(
                rep.verify_exhaustive(200)
                    .unwrap_or_else(|_| rep.verify_pairs(&sample_pairs(&g, 3000))),
                0,
                "{name}"
            );
            let form = rep.form().unwrap();
            assert!(
                rep.generators()
                    .iter()
                    .all(|x| form.is_preserved_by(x, &field)),
                "{name}"
            );
        }
        let f = f3();
        let skew =
            crate::forms::SesquiForm::bilinear(&f, Matrix::from_ints(&f, &[&[1, 2], &[0, 2]]))
                .unwrap();
        let g = ExtraspecialGroup::new(skew).unwrap();
        let rep = rep_for_group(&g, &f4()).unwrap();
        assert_eq!(rep.verify_exhaustive(100).unwrap(), 0);
        assert_eq!(rep.linear_independence_rank(100).unwrap(), (9, 9));
    }

    #[test]
    fn json_round_trip() {
        let e = rho_base(BaseKind::E(3), &f4()).unwrap();
        let s = serde_json::to_string(&e.to_json()).unwrap();
        let back = MatrixRep::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back.generators(), e.generators());
        assert_eq!(back.form(), e.form());
    }
}
