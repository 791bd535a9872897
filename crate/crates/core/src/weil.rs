//! The intertwiners `s(g)`, the factor set `sigma(g, h)`, the splitting functions `mu` for
//! the symplectic, hyperbolic and unitary cases, and the resulting linear extension
//! `(g, (x, z)) -> s'(g) rho(x, z)` of a representation of `E(f)` to `G(f) x E(f)`.
//!
//! Isometries are given over the coefficient field `K` of the form `f'`; all of the
//! `1 - g` geometry is computed for their prime-field restrictions acting on the space of
//! the trace form `f^ = T(lambda f')`, which is the form defining `E(f^)`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraspecial::ExtraspecialElement;
use crate::forms::{trace_form, FormKind, SesquiForm, TraceFormSpec};
use crate::gf::{Elem, FieldAuto, GaloisField};
use crate::isometry::{
    gamma, image_kernel, is_isometry, quadratic_radical_brute_force, radical, MatrixGroup,
};
use crate::matrix::{Matrix, Subspace};
use crate::reps::MatrixRep;

/// Which closed-form splitting applies.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitCase {
    /// `p` odd, `K = F_p`, `f` alternating: `mu(g) = |I(g)|^{-1} theta^{i(g)} delta_g`.
    Symplectic,
    /// `V = W* + W` with `f'((a, x), (b, y)) = x b`: `mu(g) = q^{-j(g)}`.
    Hyperbolic,
    /// `f'` Hermitian for an involution of `K`: `mu(g) = (-q)^{-i(g)}`.
    Unitary,
}

impl SplitCase {
    pub fn name(self) -> &'static str {
        match self {
            SplitCase::Symplectic => "symplectic",
            SplitCase::Hyperbolic => "hyperbolic",
            SplitCase::Unitary => "unitary",
        }
    }
}

/// `s(g) = |I(g)|^{-1} sum_{x in I(g)} rho(x, f_g(x, x))`, for `g` acting on `V` over `F_p`.
pub fn s_raw(g: &Matrix, rep: &MatrixRep) -> Result<Matrix> {
    let group = rep.group();
    let fp = group.field().as_ref();
    let k = rep.field().as_ref();
    let w = crate::isometry::wall_form(g, group.form());
    let gram = w.form.gram();
    let basis = w.space.basis();
    let dim = w.space.dim();
    let p = group.p();
    let count = (p as usize).pow(dim as u32);
    let mut acc = Matrix::zeros(rep.degree(), rep.degree());
    for idx in 0..count {
        let c = crate::matrix::index_vector(idx, dim, p);
        let x = if dim == 0 {
            vec![Elem::ZERO; group.dim()]
        } else {
            basis.apply_row(&c, fp)
        };
        let z = crate::matrix::dot(&gram.apply_row(&c, fp), &c, fp);
        let e = ExtraspecialElement::new(x, z);
        match rep.eval_monomial(&e) {
            Some(m) => m.add_scaled_into(&mut acc, Elem::ONE, k),
            None => acc = acc.add(&rep.eval(&e), k),
        }
    }
    let scale = k.pow(k.from_int(p as i64), -(dim as i64))?;
    Ok(acc.scale(scale, k))
}

/// The defining sum `|V|^{-1} sum_y rho(y, 0) rho(y g, 0)^{-1}` (audit path for [`s_raw`]).
pub fn s_dollar(g: &Matrix, rep: &MatrixRep) -> Result<Matrix> {
    let group = rep.group();
    let fp = group.field().as_ref();
    let k = rep.field().as_ref();
    let n = group.dim();
    let p = group.p();
    let count = (p as usize).pow(n as u32);
    let mut acc = Matrix::zeros(rep.degree(), rep.degree());
    for idx in 0..count {
        let y = crate::matrix::index_vector(idx, n, p);
        let yg = g.apply_row(&y, fp);
        acc = acc.add(&rep.eval_x(&y).mul(&rep.eval_x(&yg).inverse(k)?, k), k);
    }
    let scale = k.pow(k.from_int(p as i64), -(n as i64))?;
    Ok(acc.scale(scale, k))
}

/// The scalar `c` with `m = c I`, scanning every entry.
pub fn scalar_of(m: &Matrix) -> Result<Elem> {
    m.as_scalar().ok_or(Error::NotProportional)
}

/// `sigma(g, h) = |I(g)|^{-1} |I(h)|^{-1} |I(gh)| sum_{x in I(g) cap I(h^{-1})} exp(gamma_{g,h}(x, x))`,
/// where `exp(c)` is the image of the central element `(0, c)`.
pub fn sigma_closed(g: &Matrix, h: &Matrix, rep: &MatrixRep) -> Result<Elem> {
    let group = rep.group();
    let fp = group.field().as_ref();
    let k = rep.field().as_ref();
    let p = group.p();
    let gm = gamma(g, h, group.form())?;
    let dim = gm.space.dim();
    let gram = gm.form.gram();
    let mut counts = vec![0u64; p as usize];
    for idx in 0..(p as usize).pow(dim as u32) {
        let c = crate::matrix::index_vector(idx, dim, p);
        let v = crate::matrix::dot(&gram.apply_row(&c, fp), &c, fp);
        counts[v.0 as usize] += 1;
    }
    let mut sum = Matrix::zeros(rep.degree(), rep.degree());
    for (z, &c) in counts.iter().enumerate() {
        if c > 0 {
            let central = rep.eval(&ExtraspecialElement::central(group.dim(), Elem(z as u32)));
            sum.add_scaled(k.from_int((c % k.p() as u64) as i64), &central, k);
        }
    }
    let s = scalar_of(&sum)?;
    let i = |m: &Matrix| image_kernel(m, fp).i() as i64;
    let exponent = i(&g.mul(h, fp)) - i(g) - i(h);
    Ok(k.mul(s, k.pow(k.from_int(p as i64), exponent)?))
}

/// `s(g) s(h) s(gh)^{-1}` as a scalar.
pub fn sigma_empirical(
    sg: &Matrix,
    sh: &Matrix,
    sgh: &Matrix,
    field: &GaloisField,
) -> Result<Elem> {
    scalar_of(&sg.mul(sh, field).mul(&sgh.inverse(field)?, field))
}

/// The Gauss sum `theta = sum_a eps^{a^2}` for the representation's central character.
pub fn theta(rep: &MatrixRep) -> Result<Elem> {
    let eps = rep.epsilon().ok_or(Error::WrongCase("non-scalar center"))?;
    rep.field().gauss_sum(rep.group().p(), eps, 1)
}

/// `delta_g = chi(det M)` for the Gram `M` of `f_g` on `I(g)` (symplectic case).
pub fn delta(g: &Matrix, form: &SesquiForm) -> Result<i32> {
    let f = form.field().as_ref();
    if f.p() == 2 || !f.is_prime_field() || form.kind() != FormKind::Alternating {
        return Err(Error::WrongCase("symplectic"));
    }
    let w = crate::isometry::wall_form(g, form);
    if w.space.dim() == 0 {
        return Ok(1);
    }
    f.quadratic_character(w.form.gram().det(f))
}

/// Everything needed to evaluate `mu` and `s'`: the representation of `E(f^)`, the
/// split case, and the form `f'` over `K` whose trace form is `f^`.
#[derive(Clone, Debug)]
pub struct WeilSetup {
    rep: MatrixRep,
    case: SplitCase,
    inner: SesquiForm,
    w_hat: Option<Subspace>,
    theta: Option<Elem>,
}

impl WeilSetup {
    pub fn new(rep: MatrixRep, case: SplitCase, inner: SesquiForm) -> Result<Self> {
        let kf = inner.field().clone();
        let bilinear = inner.eta().is_identity(&kf);
        let mut w_hat = None;
        let mut theta_val = None;
        match case {
            SplitCase::Symplectic => {
                if kf.p() == 2 || !kf.is_prime_field() || inner.kind() != FormKind::Alternating {
                    return Err(Error::WrongCase("symplectic"));
                }
                theta_val = Some(theta(&rep)?);
            }
            SplitCase::Hyperbolic => {
                let m = inner.dim() / 2;
                let hyp = SesquiForm::standard(crate::forms::StandardForm::Hyperbolic(m), &kf)?;
                if !bilinear || inner.gram() != hyp.gram() {
                    return Err(Error::WrongCase("hyperbolic"));
                }
                let r = kf.r() as usize;
                let fp = GaloisField::prime(kf.p())?;
                let rows: Vec<Vec<Elem>> = (m * r..2 * m * r)
                    .map(|i| {
                        (0..2 * m * r)
                            .map(|j| if i == j { Elem::ONE } else { Elem::ZERO })
                            .collect()
                    })
                    .collect();
                w_hat = Some(Subspace::span(&rows, 2 * m * r, &fp));
            }
            SplitCase::Unitary => {
                if bilinear || inner.kind() != FormKind::Hermitian {
                    return Err(Error::WrongCase("unitary"));
                }
            }
        }
        let expected = trace_form(&TraceFormSpec::canonical(inner.clone()))?;
        if expected.gram() != rep.group().form().gram() {
            return Err(Error::Invalid(
                "representation is not of E(T(lambda f'))".into(),
            ));
        }
        Ok(WeilSetup {
            rep,
            case,
            inner,
            w_hat,
            theta: theta_val,
        })
    }

    pub fn rep(&self) -> &MatrixRep {
        &self.rep
    }

    pub fn case(&self) -> SplitCase {
        self.case
    }

    pub fn inner(&self) -> &SesquiForm {
        &self.inner
    }

    pub fn theta(&self) -> Option<Elem> {
        self.theta
    }

    /// The automorphism `eta'` of the preserved form (identity when there is none).
    pub fn eta_prime(&self) -> FieldAuto {
        self.rep.form().map_or(FieldAuto::IDENTITY, |f| f.eta_prime)
    }

    /// Prime-field restriction of an isometry over `K`.
    pub fn hat(&self, g: &Matrix) -> Matrix {
        g.restrict_to_prime(self.inner.field())
    }

    /// `|K|` (hyperbolic) or `sqrt|K|` (unitary).
    pub fn q(&self) -> u64 {
        let kf = self.inner.field();
        match self.case {
            SplitCase::Unitary => (kf.p() as u64).pow(kf.r() / 2),
            _ => kf.order() as u64,
        }
    }

    /// `s'(g) = mu(g)^{-1} s(g)` for an isometry `g` of `f'` over `K`.
    pub fn s_prime(&self, g: &Matrix) -> Result<Matrix> {
        let gh = self.hat(g);
        let k = self.rep.field().as_ref();
        Ok(s_raw(&gh, &self.rep)?.scale(k.inv(self.mu(&gh)?)?, k))
    }

    /// `mu(g)` from the prime-field restriction `g_hat`.
    pub fn mu(&self, g_hat: &Matrix) -> Result<Elem> {
        let k = self.rep.field().as_ref();
        let fp = self.rep.group().field().as_ref();
        let r = self.inner.field().r() as i64;
        let p = k.from_int(fp.p() as i64);
        let ik = image_kernel(g_hat, fp);
        let i_fp = ik.i() as i64;
        match self.case {
            SplitCase::Symplectic => {
                let theta = self.theta.ok_or(Error::WrongCase("symplectic"))?;
                let d = delta(g_hat, self.rep.group().form())?;
                let v = k.mul(k.pow(p, -i_fp)?, k.pow(theta, i_fp)?);
                Ok(k.mul(v, k.sign(d)))
            }
            SplitCase::Hyperbolic => {
                let w = self.w_hat.as_ref().ok_or(Error::WrongCase("hyperbolic"))?;
                let j_fp = ik.j(w, fp) as i64;
                // q^{-j} with q = p^r and j = j_fp / r.
                k.pow(p, -j_fp)
            }
            SplitCase::Unitary => {
                // The Gauss-sum evaluation gives sum exp(gamma) = (-q)^{i(g)+i(h)-i(gh)}; with the
                // |I(g)|^{-1}|I(h)|^{-1}|I(gh)| = q^{-2(i(g)+i(h)-i(gh))} prefactor the splitting is
                // (-q)^{-i(g)}.
                let minus_q = k.neg(k.from_int(self.q() as i64));
                k.pow(minus_q, -(i_fp / r))
            }
        }
    }
}

/// A Weil extension over an enumerated isometry group.
#[derive(Clone, Debug)]
pub struct WeilExtension {
    setup: WeilSetup,
    group: MatrixGroup,
    hats: Vec<Matrix>,
    s: Vec<Matrix>,
    mu: Vec<Elem>,
    s_prime: Vec<Matrix>,
    i_dims: Vec<usize>,
}

/// Counts from a pair sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub checked: usize,
    /// Pairs failing at least one check.
    pub failed_pairs: usize,
    /// `s'(g) s'(h) != s'(gh)`.
    pub split_failures: usize,
    /// Closed-form `sigma` differs from the empirical scalar.
    pub sigma_failures: usize,
    /// `mu(g) mu(h) mu(gh)^{-1} != sigma(g, h)`.
    pub mu_failures: usize,
    /// `dim(I(g) cap I(h^{-1})) + dim R != i(g) + i(h) - i(gh)`.
    pub dimension_failures: usize,
    /// `R_{g,h}` differs from the brute-force radical of `x -> gamma(x, x)`.
    pub radical_failures: usize,
}

impl PairReport {
    pub fn failures(&self) -> usize {
        self.split_failures
            + self.sigma_failures
            + self.mu_failures
            + self.dimension_failures
            + self.radical_failures
    }

    fn merge(mut self, o: PairReport) -> PairReport {
        self.checked += o.checked;
        self.failed_pairs += o.failed_pairs;
        self.split_failures += o.split_failures;
        self.sigma_failures += o.sigma_failures;
        self.mu_failures += o.mu_failures;
        self.dimension_failures += o.dimension_failures;
        self.radical_failures += o.radical_failures;
        self
    }
}

/// Counts from a per-element sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementReport {
    pub checked: usize,
    /// Elements failing at least one check.
    pub failed_elements: usize,
    /// `s'(g)^{-1} rho(e_i, 0) s'(g) != rho(e_i g, 0)` for some `i`.
    pub conjugation_failures: usize,
    /// `s'(g) J s'(g)^{t eta'} != J`.
    pub form_failures: usize,
    /// `mu(g) != mu(g^{-1})^{eta'}` (only checked when a form is preserved).
    pub eta_symmetry_failures: usize,
    /// `s(g)` from the `I(g)` sum differs from the `|V|` sum (audited elements only).
    pub audit_failures: usize,
    /// `sigma(g, 1) != 1` or `sigma(g, g^{-1}) != |I(g)|^{-1}`.
    pub sigma_identity_failures: usize,
}

impl ElementReport {
    pub fn failures(&self) -> usize {
        self.conjugation_failures
            + self.form_failures
            + self.eta_symmetry_failures
            + self.audit_failures
            + self.sigma_identity_failures
    }
}

/// Which pairs to check.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Verify {
    All,
    Sample { count: usize, seed: u64 },
}

impl WeilExtension {
    /// Computes `s`, `mu` and `s' = mu^{-1} s` for every element of `group` (isometries of `f'`).
    pub fn build(setup: WeilSetup, group: MatrixGroup) -> Result<Self> {
        for g in group.generators() {
            if !is_isometry(g, setup.inner())? {
                return Err(Error::NotAnIsometry);
            }
        }
        let k = setup.rep().field().clone();
        let fp = setup.rep().group().field().clone();
        let rows: Vec<(Matrix, Matrix, Elem, usize)> = group
            .elements()
            .par_iter()
            .map(|g| {
                let gh = setup.hat(g);
                let s = s_raw(&gh, setup.rep())?;
                let mu = setup.mu(&gh)?;
                let i = image_kernel(&gh, &fp).i();
                Ok((gh, s, mu, i))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut hats = Vec::with_capacity(rows.len());
        let mut s = Vec::with_capacity(rows.len());
        let mut mu = Vec::with_capacity(rows.len());
        let mut s_prime = Vec::with_capacity(rows.len());
        let mut i_dims = Vec::with_capacity(rows.len());
        for (gh, sg, m, i) in rows {
            s_prime.push(sg.scale(k.inv(m)?, &k));
            hats.push(gh);
            s.push(sg);
            mu.push(m);
            i_dims.push(i);
        }
        Ok(WeilExtension {
            setup,
            group,
            hats,
            s,
            mu,
            s_prime,
            i_dims,
        })
    }

    /// [`Self::build`] followed by a split check on the requested pairs.
    pub fn extend(setup: WeilSetup, group: MatrixGroup, verify: Verify) -> Result<Self> {
        let ext = Self::build(setup, group)?;
        let pairs = ext.pairs(verify);
        let failures = ext.verify_split(&pairs);
        if failures > 0 {
            return Err(Error::SplitFailure(format!(
                "{failures} of {} pairs violate s'(g)s'(h) = s'(gh)",
                pairs.len()
            )));
        }
        Ok(ext)
    }

    pub fn setup(&self) -> &WeilSetup {
        &self.setup
    }

    pub fn group(&self) -> &MatrixGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn hat(&self, i: usize) -> &Matrix {
        &self.hats[i]
    }

    pub fn s(&self, i: usize) -> &Matrix {
        &self.s[i]
    }

    pub fn mu(&self, i: usize) -> Elem {
        self.mu[i]
    }

    pub fn s_prime(&self, i: usize) -> &Matrix {
        &self.s_prime[i]
    }

    /// `i(g)` over the prime field.
    pub fn i_dim(&self, i: usize) -> usize {
        self.i_dims[i]
    }

    /// Whether every `mu(g)` equals 1 (the splitting is then invisible in this field).
    pub fn mu_is_trivial(&self) -> bool {
        self.mu.iter().all(|&m| m == Elem::ONE)
    }

    pub fn pairs(&self, verify: Verify) -> Vec<(usize, usize)> {
        let n = self.order();
        match verify {
            Verify::All => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
            Verify::Sample { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                    .collect()
            }
        }
    }

    /// Number of pairs with `s'(g) s'(h) != s'(gh)`.
    pub fn verify_split(&self, pairs: &[(usize, usize)]) -> usize {
        let k = self.setup.rep().field().as_ref();
        pairs
            .par_iter()
            .filter(|&&(a, b)| {
                let ab = self.group.mul_index(a, b);
                self.s_prime[a].mul(&self.s_prime[b], k) != self.s_prime[ab]
            })
            .count()
    }

    /// Full pair sweep: splitting, dual-path sigma, mu against sigma, the dimension identity and
    /// (when `radical_check` is set) the brute-force radical comparison.
    pub fn verify_pairs(&self, pairs: &[(usize, usize)], radical_check: bool) -> PairReport {
        let rep = self.setup.rep();
        let k = rep.field().as_ref();
        let fp = rep.group().field().as_ref();
        let form = rep.group().form();
        pairs
            .par_iter()
            .map(|&(a, b)| {
                let mut r = PairReport {
                    checked: 1,
                    ..Default::default()
                };
                let ab = self.group.mul_index(a, b);
                if self.s_prime[a].mul(&self.s_prime[b], k) != self.s_prime[ab] {
                    r.split_failures += 1;
                }
                let (g, h) = (&self.hats[a], &self.hats[b]);
                let closed = sigma_closed(g, h, rep);
                let empirical = sigma_empirical(&self.s[a], &self.s[b], &self.s[ab], k);
                match (&closed, &empirical) {
                    (Ok(c), Ok(e)) if c == e => {}
                    _ => r.sigma_failures += 1,
                }
                let mu_ratio = k.div(k.mul(self.mu[a], self.mu[b]), self.mu[ab]).ok();
                if closed.ok() != mu_ratio {
                    r.mu_failures += 1;
                }
                let gm = gamma(g, h, form).expect("isometries are invertible");
                let rad = radical(g, h, fp).expect("isometries are invertible");
                if gm.space.dim() + rad.dim() + self.i_dims[ab] != self.i_dims[a] + self.i_dims[b] {
                    r.dimension_failures += 1;
                }
                if radical_check {
                    let gram = gm.form.gram().clone();
                    let basis = gm.space.clone();
                    let q = |x: &[Elem]| {
                        let c = basis.coordinates(x, fp).expect("x in the space");
                        crate::matrix::dot(&gram.apply_row(&c, fp), &c, fp)
                    };
                    if quadratic_radical_brute_force(&gm.space, q, fp) != rad {
                        r.radical_failures += 1;
                    }
                }
                r.failed_pairs = usize::from(r.failures() > 0);
                r
            })
            .reduce(PairReport::default, PairReport::merge)
    }

    /// Per-element checks; the `($)` audit runs on every `audit_stride`-th element.
    pub fn verify_elements(&self, audit_stride: usize) -> Result<ElementReport> {
        let rep = self.setup.rep();
        let k = rep.field().as_ref();
        let fp = rep.group().field().as_ref();
        let eta = self.setup.eta_prime();
        let gens: Vec<ExtraspecialElement> = (0..rep.group().dim())
            .map(|i| rep.group().generator(i))
            .collect();
        let reports = (0..self.order())
            .into_par_iter()
            .map(|a| -> Result<ElementReport> {
                let mut r = ElementReport {
                    checked: 1,
                    ..Default::default()
                };
                let sp = &self.s_prime[a];
                let g = &self.hats[a];
                if gens.iter().any(|e| {
                    let moved = ExtraspecialElement::new(g.apply_row(&e.x, fp), e.z);
                    rep.eval(e).mul(sp, k) != sp.mul(&rep.eval(&moved), k)
                }) {
                    r.conjugation_failures += 1;
                }
                let inv = self.group.inverse_index(a);
                if let Some(form) = rep.form() {
                    if !form.is_preserved_by(sp, k) {
                        r.form_failures += 1;
                    }
                    if self.mu[a] != eta.apply(k, self.mu[inv]) {
                        r.eta_symmetry_failures += 1;
                    }
                }
                if audit_stride > 0 && a % audit_stride == 0 && s_dollar(g, rep)? != self.s[a] {
                    r.audit_failures += 1;
                }
                let id = Matrix::identity(g.rows());
                let i_inv = k.pow(k.from_int(fp.p() as i64), -(self.i_dims[a] as i64))?;
                let ginv = &self.hats[inv];
                if sigma_closed(g, &id, rep)? != Elem::ONE || sigma_closed(g, ginv, rep)? != i_inv {
                    r.sigma_identity_failures += 1;
                }
                r.failed_elements = usize::from(r.failures() > 0);
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(reports
            .into_iter()
            .fold(ElementReport::default(), |mut acc, r| {
                acc.checked += r.checked;
                acc.failed_elements += r.failed_elements;
                acc.conjugation_failures += r.conjugation_failures;
                acc.form_failures += r.form_failures;
                acc.eta_symmetry_failures += r.eta_symmetry_failures;
                acc.audit_failures += r.audit_failures;
                acc.sigma_identity_failures += r.sigma_identity_failures;
                acc
            }))
    }

    /// `Phi(g, e) = s'(g) rho(e)` on the semidirect product `G x E(f^)` with
    /// `(g, e)(h, e') = (gh, e^h e')`, `(x, z)^h = (x h, z)`.
    pub fn phi(&self, g: usize, e: &ExtraspecialElement) -> Matrix {
        self.s_prime[g].mul(&self.setup.rep().eval(e), self.setup.rep().field())
    }

    /// Number of failing pairs of the homomorphism check for `Phi` over all elements of
    /// `G x E(f^)` (or the requested sample of element pairs).
    pub fn verify_semidirect(&self, verify: Verify) -> Result<usize> {
        let rep = self.setup.rep();
        let k = rep.field().as_ref();
        let fp = rep.group().field().as_ref();
        let eg = rep.group();
        let e_elems = eg.elements(1 << 16)?;
        let ne = e_elems.len();
        let total = self.order() * ne;
        let images: Vec<Matrix> = (0..total)
            .into_par_iter()
            .map(|i| self.phi(i / ne, &e_elems[i % ne]))
            .collect();
        let pairs: Vec<(usize, usize)> = match verify {
            Verify::All => (0..total)
                .flat_map(|i| (0..total).map(move |j| (i, j)))
                .collect(),
            Verify::Sample { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|_| (rng.gen_range(0..total), rng.gen_range(0..total)))
                    .collect()
            }
        };
        Ok(pairs
            .par_iter()
            .filter(|&&(a, b)| {
                let (ga, ea) = (a / ne, &e_elems[a % ne]);
                let (gb, eb) = (b / ne, &e_elems[b % ne]);
                let moved = ExtraspecialElement::new(self.hats[gb].apply_row(&ea.x, fp), ea.z);
                let prod = (self.group.mul_index(ga, gb), eg.mul(&moved, eb));
                let idx = prod.0 * ne + eg.index_of(&prod.1);
                images[a].mul(&images[b], k) != images[idx]
            })
            .count())
    }

    pub fn to_json(&self, include_s_prime: bool, verified_pairs: usize) -> WeilJson {
        let kf = self.setup.inner().field().as_ref();
        let k = self.setup.rep().field().as_ref();
        WeilJson {
            case: self.setup.case(),
            mu: (0..self.order())
                .map(|i| MuEntry {
                    g: self.group.element(i).to_coeff_rows(kf),
                    value: k.coeffs(self.mu[i]),
                })
                .collect(),
            s_prime: include_s_prime
                .then(|| self.s_prime.iter().map(|m| m.to_coeff_rows(k)).collect()),
            verified_pairs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuEntry {
    pub g: Vec<Vec<Vec<u32>>>,
    pub value: Vec<u32>,
}

/// JSON dump of a Weil extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeilJson {
    pub case: SplitCase,
    pub mu: Vec<MuEntry>,
    pub s_prime: Option<Vec<Vec<Vec<Vec<u32>>>>>,
    pub verified_pairs: usize,
}

/// Ready-made configurations used by the command line, the acceptance suite and tests.
pub mod configs {
    use super::*;
    use crate::extraspecial::ExtraspecialGroup;
    use crate::forms::StandardForm;
    use crate::isometry::{
        enumerate_group, gl_hyperbolic_generators, sp2_generators, symplectic_generators,
        unitary_generators,
    };
    use crate::reps::rep_for_group;

    /// `Sp_{2n}(F_p)` acting on `E(f_E^n)` with its representation over `rep_field`.
    pub fn symplectic(
        p: u32,
        n: usize,
        rep_field: &Arc<GaloisField>,
        cap: usize,
    ) -> Result<WeilExtension> {
        let fp = GaloisField::prime(p)?;
        let fe = SesquiForm::standard(StandardForm::FE, &fp)?;
        let mut form = fe.clone();
        for _ in 1..n {
            form = form.direct_sum(&fe)?;
        }
        let gens = if n == 1 {
            sp2_generators(&fp)
        } else {
            symplectic_generators(&form)?
        };
        let group = enumerate_group(&form, &gens, cap)?;
        let rep = rep_for_group(&ExtraspecialGroup::new(form.clone())?, rep_field)?;
        WeilExtension::build(WeilSetup::new(rep, SplitCase::Symplectic, form)?, group)
    }

    /// `GL(W)` on `W* + W` over `k`, `dim W = w_dim`, with the representation of `E(f^)` over `rep_field`.
    pub fn hyperbolic(
        k: &Arc<GaloisField>,
        w_dim: usize,
        rep_field: &Arc<GaloisField>,
        cap: usize,
    ) -> Result<WeilExtension> {
        let inner = SesquiForm::standard(StandardForm::Hyperbolic(w_dim), k)?;
        let group = enumerate_group(&inner, &gl_hyperbolic_generators(k, w_dim)?, cap)?;
        let hat = trace_form(&TraceFormSpec::canonical(inner.clone()))?;
        let rep = rep_for_group(&ExtraspecialGroup::new(hat)?, rep_field)?;
        WeilExtension::build(WeilSetup::new(rep, SplitCase::Hyperbolic, inner)?, group)
    }

    /// `GU_d` for the Hermitian identity form over `k`, with the representation over `rep_field`.
    pub fn unitary(
        k: &Arc<GaloisField>,
        d: usize,
        rep_field: &Arc<GaloisField>,
        cap: usize,
    ) -> Result<WeilExtension> {
        let inner = SesquiForm::standard(StandardForm::HermitianIdentity(d), k)?;
        let group = enumerate_group(&inner, &unitary_generators(k, d)?, cap)?;
        let hat = trace_form(&TraceFormSpec::canonical(inner.clone()))?;
        let rep = rep_for_group(&ExtraspecialGroup::new(hat)?, rep_field)?;
        WeilExtension::build(WeilSetup::new(rep, SplitCase::Unitary, inner)?, group)
    }
}
