//! Isometry groups `G(f)`, their standard generators and enumeration, and the geometry of
//! `1 - g`: the image `I(g)`, kernel `K(g)`, Wall's form `f_g`, `gamma_{g,h}`, the
//! radical `R_{g,h}` and the skew-Hermitian form `F_{g,h}`.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{FormKind, SesquiForm};
use crate::gf::{Elem, FieldAuto, GaloisField};
use crate::matrix::{combinations, vec_add, vec_sub, Matrix, Subspace};

/// Whether `m G m^{t eta} = G` with `m` invertible.
pub fn is_isometry(m: &Matrix, form: &SesquiForm) -> Result<bool> {
    if !m.is_square() || m.rows() != form.dim() {
        return Err(Error::DimensionMismatch {
            expected: form.dim(),
            got: m.rows(),
        });
    }
    let f = form.field().as_ref();
    let image = m
        .mul(form.gram(), f)
        .mul(&m.conj_transpose(f, form.eta()), f);
    Ok(image == *form.gram() && m.is_invertible(f))
}

/// A finite matrix group held as an explicit list of elements in BFS order.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    field: Arc<GaloisField>,
    elements: Vec<Matrix>,
    index: HashMap<Matrix, usize>,
    generators: Vec<Matrix>,
}

impl MatrixGroup {
    /// Closure of `generators` under multiplication: breadth-first by word length, with
    /// generators tried in the given order. Fails once more than `cap` elements appear.
    pub fn generate(field: &Arc<GaloisField>, generators: &[Matrix], cap: usize) -> Result<Self> {
        let f = field.as_ref();
        let n = generators.first().map_or(0, |g| g.rows());
        let id = Matrix::identity(n);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let prod = elements[i].mul(g, f);
                if !index.contains_key(&prod) {
                    if elements.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    index.insert(prod.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(prod);
                }
            }
        }
        Ok(MatrixGroup {
            field: field.clone(),
            elements,
            index,
            generators: generators.to_vec(),
        })
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn element(&self, i: usize) -> &Matrix {
        &self.elements[i]
    }

    pub fn position(&self, m: &Matrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn mul_index(&self, i: usize, j: usize) -> usize {
        let prod = self.elements[i].mul(&self.elements[j], &self.field);
        self.index[&prod]
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        let inv = self.elements[i]
            .inverse(&self.field)
            .expect("group elements are invertible");
        self.index[&inv]
    }
}

/// `enumerate_group`: every generator must preserve `form`.
pub fn enumerate_group(
    form: &SesquiForm,
    generators: &[Matrix],
    cap: usize,
) -> Result<MatrixGroup> {
    for g in generators {
        if !is_isometry(g, form)? {
            return Err(Error::NotAnIsometry);
        }
    }
    if generators.is_empty() {
        return MatrixGroup::generate(form.field(), &[Matrix::identity(form.dim())], cap);
    }
    MatrixGroup::generate(form.field(), generators, cap)
}

/// `[[1, 1], [0, 1]]` and `[[0, 1], [-1, 0]]`, generating `Sp_2(F_p) = SL_2(F_p)` for `f_E`.
pub fn sp2_generators(field: &GaloisField) -> Vec<Matrix> {
    vec![
        Matrix::from_ints(field, &[&[1, 1], &[0, 1]]),
        Matrix::from_ints(field, &[&[0, 1], &[-1, 0]]),
    ]
}

/// Symplectic transvections `x -> x + F(x, v) v` for `v` in `{e_i} + {e_i + e_j}`,
/// for an alternating bilinear form `F`.
pub fn symplectic_generators(form: &SesquiForm) -> Result<Vec<Matrix>> {
    if form.kind() != FormKind::Alternating {
        return Err(Error::KindMismatch("alternating"));
    }
    let f = form.field().as_ref();
    let n = form.dim();
    let mut vs = Vec::new();
    for i in 0..n {
        let mut v = vec![Elem::ZERO; n];
        v[i] = Elem::ONE;
        vs.push(v);
        for j in i + 1..n {
            let mut w = vec![Elem::ZERO; n];
            w[i] = Elem::ONE;
            w[j] = Elem::ONE;
            vs.push(w);
        }
    }
    Ok(vs
        .iter()
        .map(|v| {
            Matrix::from_fn(n, n, |i, j| {
                let mut e = vec![Elem::ZERO; n];
                e[i] = Elem::ONE;
                let c = form.eval(&e, v);
                let delta = if i == j { Elem::ONE } else { Elem::ZERO };
                f.add(delta, f.mul(c, v[j]))
            })
        })
        .collect())
}

/// Generators of `GL_m(K)` embedded in the isometry group of the hyperbolic form on
/// `W* + W` as `A -> diag(A, A^{-t})`: elementary transvections `I + c E_ij`
/// (`c` running over the power basis of `K`) and `diag(g, 1, ..., 1)` for the primitive `g`.
pub fn gl_hyperbolic_generators(field: &Arc<GaloisField>, m: usize) -> Result<Vec<Matrix>> {
    let f = field.as_ref();
    let mut gens = Vec::new();
    if f.order() > 2 {
        let mut d = vec![Elem::ONE; m];
        d[0] = f.generator();
        gens.push(Matrix::diagonal(&d));
    }
    let powers: Vec<Elem> = (0..f.r())
        .map(|k| f.pow_u(if f.r() == 1 { Elem::ONE } else { Elem(f.p()) }, k as u64))
        .collect();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            for &c in &powers {
                let mut a = Matrix::identity(m);
                a.set(i, j, c);
                gens.push(a);
            }
        }
    }
    if gens.is_empty() {
        gens.push(Matrix::identity(m));
    }
    gens.into_iter().map(|a| hyperbolic_embed(&a, f)).collect()
}

/// `A -> diag(A, A^{-t})` on `W* + W`.
pub fn hyperbolic_embed(a: &Matrix, field: &GaloisField) -> Result<Matrix> {
    Ok(a.block_diag(&a.inverse(field)?.transpose()))
}

/// Generators of `GU_d(q)` for the Hermitian form with Gram `I` over `F_{q^2}`:
/// adjacent transpositions, `diag(t, 1, ..., 1)` with `t` of order `q + 1`, the unitary
/// transvection `I + a (v^eta)^t v` for the least isotropic `v = (1, x, 0, ...)` and the least
/// nonzero `a` with `a^eta = -a`, and a quasi-reflection of determinant `t`.
pub fn unitary_generators(field: &Arc<GaloisField>, d: usize) -> Result<Vec<Matrix>> {
    let f = field.as_ref();
    let eta = f.involution().ok_or(Error::NoInvolution)?;
    let q = (f.order() as f64).sqrt().round() as u64;
    let mut gens = Vec::new();
    let t = f.pow_u(f.generator(), q - 1);
    let mut diag = vec![Elem::ONE; d];
    diag[0] = t;
    gens.push(Matrix::diagonal(&diag));
    for i in 0..d.saturating_sub(1) {
        gens.push(Matrix::from_fn(d, d, |r, c| {
            let src = if r == i {
                i + 1
            } else if r == i + 1 {
                i
            } else {
                r
            };
            if c == src {
                Elem::ONE
            } else {
                Elem::ZERO
            }
        }));
    }
    if d >= 2 {
        let norm = |x: Elem| f.mul(x, eta.apply(f, x));
        let minus_one = f.neg(Elem::ONE);
        let x = f
            .elements()
            .find(|&x| norm(x) == minus_one)
            .ok_or(Error::NoInvolution)?;
        let mut v = vec![Elem::ZERO; d];
        v[0] = Elem::ONE;
        v[1] = x;
        let a = f
            .elements()
            .find(|&a| !a.is_zero() && eta.apply(f, a) == f.neg(a))
            .ok_or(Error::NoInvolution)?;
        gens.push(Matrix::from_fn(d, d, |i, j| {
            let delta = if i == j { Elem::ONE } else { Elem::ZERO };
            f.add(delta, f.mul(a, f.mul(eta.apply(f, v[i]), v[j])))
        }));
        // Quasi-reflection x -> x - (1 - t) F(x, w) F(w, w)^{-1} w for the 0/1 vector w of least
        // support (at least 2) with F(w, w) != 0; over F_4 the transvections above are monomial.
        if let Some(w) = (2..=d).find_map(|s| {
            let w: Vec<Elem> = (0..d)
                .map(|i| if i < s { Elem::ONE } else { Elem::ZERO })
                .collect();
            (!f.from_int(s as i64).is_zero()).then_some(w)
        }) {
            let n = f.from_int(w.iter().filter(|e| !e.is_zero()).count() as i64);
            let c = f.neg(f.div(f.sub(Elem::ONE, t), n)?);
            gens.push(Matrix::from_fn(d, d, |i, j| {
                let delta = if i == j { Elem::ONE } else { Elem::ZERO };
                f.add(delta, f.mul(c, f.mul(eta.apply(f, w[i]), w[j])))
            }));
        }
    }
    Ok(gens)
}

/// `|Sp_{2m}(q)| = q^{m^2} prod_{i=1}^m (q^{2i} - 1)`.
pub fn sp_order(m: u32, q: u128) -> u128 {
    q.pow(m * m) * (1..=m).map(|i| q.pow(2 * i) - 1).product::<u128>()
}

/// `|GL_m(q)| = prod_{i=0}^{m-1} (q^m - q^i)`.
pub fn gl_order(m: u32, q: u128) -> u128 {
    (0..m).map(|i| q.pow(m) - q.pow(i)).product()
}

/// `|GU_d(q)| = q^{d(d-1)/2} prod_{i=1}^d (q^i - (-1)^i)`.
pub fn gu_order(d: u32, q: u128) -> u128 {
    q.pow(d * (d - 1) / 2)
        * (1..=d)
            .map(|i| {
                if i % 2 == 0 {
                    q.pow(i) - 1
                } else {
                    q.pow(i) + 1
                }
            })
            .product::<u128>()
}

/// `I(g) = im(1 - g)` and `K(g) = ker(1 - g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneMinusG {
    pub image: Subspace,
    pub kernel: Subspace,
}

impl OneMinusG {
    /// `i(g) = dim I(g)`.
    pub fn i(&self) -> usize {
        self.image.dim()
    }

    /// `dim(I(g) cap W)`.
    pub fn j(&self, w: &Subspace, field: &GaloisField) -> usize {
        self.image.intersect(w, field).dim()
    }
}

pub fn one_minus(g: &Matrix, field: &GaloisField) -> Matrix {
    Matrix::identity(g.rows()).sub(g, field)
}

pub fn image_kernel(g: &Matrix, field: &GaloisField) -> OneMinusG {
    let m = one_minus(g, field);
    let kernel_basis = m.left_kernel(field);
    OneMinusG {
        image: Subspace::row_space(&m, field),
        kernel: Subspace::row_space(&kernel_basis, field),
    }
}

/// `{x : f(x, u) = 0 for all u in U}`.
pub fn left_perp(u: &Subspace, form: &SesquiForm) -> Subspace {
    let f = form.field().as_ref();
    if u.dim() == 0 {
        return Subspace::full(form.dim());
    }
    let m = form.gram().mul(&u.basis().conj_transpose(f, form.eta()), f);
    Subspace::row_space(&m.left_kernel(f), f)
}

/// `{y : f(u, y) = 0 for all u in U}`.
pub fn right_perp(u: &Subspace, form: &SesquiForm) -> Subspace {
    let f = form.field().as_ref();
    if u.dim() == 0 {
        return Subspace::full(form.dim());
    }
    let m = u.basis().mul(form.gram(), f);
    let inv = form.eta().inverse(f);
    let k = m.right_kernel(f).conj(f, inv);
    Subspace::row_space(&k, f)
}

/// A form on a subspace, with Gram matrix taken relative to the subspace's echelon basis.
#[derive(Clone, Debug)]
pub struct SubspaceForm {
    pub space: Subspace,
    pub form: SesquiForm,
}

/// Some `u` with `u (1 - g) = x`.
pub fn preimage(g: &Matrix, x: &[Elem], field: &GaloisField) -> Option<Vec<Elem>> {
    one_minus(g, field).solve_left(x, field)
}

/// Wall's form `f_g(x, y) = f(u, y)` for `x = u (1 - g)`, on `I(g)`.
pub fn wall_form(g: &Matrix, form: &SesquiForm) -> SubspaceForm {
    let f = form.field().as_ref();
    let space = image_kernel(g, f).image;
    let preimages: Vec<Vec<Elem>> = space
        .basis_vectors()
        .iter()
        .map(|x| preimage(g, x, f).expect("x lies in I(g)"))
        .collect();
    let gram = gram_between(&preimages, &space.basis_vectors(), form);
    SubspaceForm {
        form: sub_form(form, gram),
        space,
    }
}

/// `f_g(x, y)` for `x, y` in `I(g)`.
pub fn wall_value(g: &Matrix, form: &SesquiForm, x: &[Elem], y: &[Elem]) -> Option<Elem> {
    let u = preimage(g, x, form.field())?;
    Some(form.eval(&u, y))
}

fn gram_between(us: &[Vec<Elem>], ys: &[Vec<Elem>], form: &SesquiForm) -> Matrix {
    Matrix::from_fn(us.len(), ys.len(), |k, l| form.eval(&us[k], &ys[l]))
}

fn sub_form(parent: &SesquiForm, gram: Matrix) -> SesquiForm {
    let f = parent.field();
    let kind = crate::forms::detect_kind(f, parent.eta(), &gram);
    SesquiForm::new(f, parent.eta(), gram, kind).expect("detected kind holds")
}

/// `I(g) cap I(h^{-1})`.
pub fn gamma_space(g: &Matrix, h: &Matrix, field: &GaloisField) -> Result<Subspace> {
    let hinv = h.inverse(field)?;
    Ok(image_kernel(g, field)
        .image
        .intersect(&image_kernel(&hinv, field).image, field))
}

/// `gamma_{g,h}(x, y) = f_g(x, y) - f_{h^{-1}}(x, y)` on `I(g) cap I(h^{-1})`.
pub fn gamma(g: &Matrix, h: &Matrix, form: &SesquiForm) -> Result<SubspaceForm> {
    difference_form(g, h, form)
}

/// `F_{g,h}(x, y) = F(u - v, y)` for `x = u(1 - g) = v(1 - h^{-1})`; skew-Hermitian when `F`
/// is Hermitian.
pub fn skew_hermitian_form(g: &Matrix, h: &Matrix, form: &SesquiForm) -> Result<SubspaceForm> {
    if form.kind() != FormKind::Hermitian {
        return Err(Error::KindMismatch("hermitian"));
    }
    difference_form(g, h, form)
}

fn difference_form(g: &Matrix, h: &Matrix, form: &SesquiForm) -> Result<SubspaceForm> {
    let f = form.field().as_ref();
    let hinv = h.inverse(f)?;
    let space = gamma_space(g, h, f)?;
    let basis = space.basis_vectors();
    let diffs: Vec<Vec<Elem>> = basis
        .iter()
        .map(|x| {
            let u = preimage(g, x, f).expect("x in I(g)");
            let v = preimage(&hinv, x, f).expect("x in I(h^-1)");
            vec_sub(&u, &v, f)
        })
        .collect();
    let gram = gram_between(&diffs, &basis, form);
    Ok(SubspaceForm {
        form: sub_form(form, gram),
        space,
    })
}

/// `R_{g,h} = {x : x = u(1 - g) = u(1 - h^{-1})} = ker(h^{-1} - g)(1 - g)`.
pub fn radical(g: &Matrix, h: &Matrix, field: &GaloisField) -> Result<Subspace> {
    let hinv = h.inverse(field)?;
    let k = Subspace::row_space(&hinv.sub(g, field).left_kernel(field), field);
    Ok(k.image(&one_minus(g, field), field))
}

/// Radical of the quadratic map `x -> Q(x)` on a subspace, by enumeration:
/// `{x : Q(x + y) = Q(y) for all y}`.
pub fn quadratic_radical_brute_force(
    space: &Subspace,
    q: impl Fn(&[Elem]) -> Elem,
    field: &GaloisField,
) -> Subspace {
    let all = space.elements(field);
    let values: Vec<Elem> = all.iter().map(|y| q(y)).collect();
    let members: Vec<Vec<Elem>> = all
        .iter()
        .filter(|x| {
            all.iter()
                .zip(&values)
                .all(|(y, &qy)| q(&vec_add(x, y, field)) == qy)
        })
        .cloned()
        .collect();
    Subspace::span(&members, space.ambient(), field)
}

/// Radical (left kernel of the Gram) of a form on a subspace, as a subspace of the ambient space.
pub fn form_radical(sf: &SubspaceForm) -> Subspace {
    let f = sf.form.field().as_ref();
    let k = sf.form.gram().left_kernel(f);
    let vectors: Vec<Vec<Elem>> = k
        .row_vecs()
        .iter()
        .map(|c| combinations_vector(c, &sf.space, f))
        .collect();
    Subspace::span(&vectors, sf.space.ambient(), f)
}

fn combinations_vector(c: &[Elem], space: &Subspace, field: &GaloisField) -> Vec<Elem> {
    space.basis().apply_row(c, field)
}

/// All vectors of the subspace (re-exported helper for sweeps).
pub fn subspace_elements(space: &Subspace, field: &GaloisField) -> Vec<Vec<Elem>> {
    combinations(&space.basis_vectors(), space.ambient(), field)
}

/// Whether `eta` is trivial for the form's field (bilinear case).
pub fn is_bilinear(form: &SesquiForm) -> bool {
    form.eta() == FieldAuto::IDENTITY || form.eta().is_identity(form.field())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::StandardForm;
    use crate::matrix::index_vector;

    fn f3() -> Arc<GaloisField> {
        GaloisField::prime(3).unwrap()
    }

    fn fe() -> SesquiForm {
        SesquiForm::standard(StandardForm::FE, &f3()).unwrap()
    }

    fn sp2() -> MatrixGroup {
        enumerate_group(&fe(), &sp2_generators(&f3()), 1000).unwrap()
    }

    #[test]
    fn isometry_checks() {
        let f = f3();
        assert!(is_isometry(&Matrix::identity(2), &fe()).unwrap());
        assert!(is_isometry(&Matrix::from_ints(&f, &[&[0, 1], &[-1, 0]]), &fe()).unwrap());
        assert!(!is_isometry(&Matrix::from_ints(&f, &[&[1, 0], &[0, -1]]), &fe()).unwrap());
        assert!(is_isometry(&Matrix::identity(3), &fe()).is_err());
    }

    #[test]
    fn sp2_has_24_elements() {
        let g = sp2();
        assert_eq!(g.order(), 24);
        // Brute-force oracle: all f_E isometries among the 81 matrices.
        let f = f3();
        let brute = (0..81)
            .filter(|&i| {
                let v = index_vector(i, 4, 3);
                let m = Matrix::from_rows(vec![v[..2].to_vec(), v[2..].to_vec()]);
                is_isometry(&m, &fe()).unwrap()
            })
            .count();
        assert_eq!(brute, 24);
        assert_eq!(sp_order(1, 3), 24);
        let trivial = enumerate_group(&fe(), &[Matrix::identity(2)], 10).unwrap();
        assert_eq!(trivial.order(), 1);
        assert_eq!(
            enumerate_group(&fe(), &sp2_generators(&f), 10).unwrap_err(),
            Error::CapExceeded(10)
        );
    }

    #[test]
    fn classical_group_orders() {
        let f2 = GaloisField::prime(2).unwrap();
        let hyp = SesquiForm::standard(StandardForm::Hyperbolic(2), &f2).unwrap();
        let gl = enumerate_group(&hyp, &gl_hyperbolic_generators(&f2, 2).unwrap(), 100).unwrap();
        assert_eq!(gl.order(), 6);
        assert_eq!(gl_order(2, 2), 6);
        let f4 = GaloisField::new(2, 2).unwrap();
        let hyp4 = SesquiForm::standard(StandardForm::Hyperbolic(2), &f4).unwrap();
        assert_eq!(
            enumerate_group(&hyp4, &gl_hyperbolic_generators(&f4, 2).unwrap(), 1000)
                .unwrap()
                .order() as u128,
            gl_order(2, 4)
        );
        let hyp3 = SesquiForm::standard(StandardForm::Hyperbolic(2), &f3()).unwrap();
        assert_eq!(
            enumerate_group(&hyp3, &gl_hyperbolic_generators(&f3(), 2).unwrap(), 100)
                .unwrap()
                .order(),
            48
        );
        for (p, r, d) in [(2, 2, 3), (2, 2, 2), (3, 2, 1), (3, 2, 2), (2, 2, 1)] {
            let k = GaloisField::new(p, r).unwrap();
            let h = SesquiForm::standard(StandardForm::HermitianIdentity(d), &k).unwrap();
            let q = (p as u128).pow(r / 2);
            let g = enumerate_group(&h, &unitary_generators(&k, d).unwrap(), 100_000).unwrap();
            assert_eq!(g.order() as u128, gu_order(d as u32, q), "GU_{d}({q})");
        }
        assert_eq!(gu_order(3, 2), 648);
        let f5 = GaloisField::prime(5).unwrap();
        let alt = SesquiForm::standard(StandardForm::FE, &f5)
            .unwrap()
            .direct_sum(&SesquiForm::standard(StandardForm::FE, &f3()).unwrap());
        assert!(alt.is_err());
        let e2 = SesquiForm::standard(StandardForm::FE, &f3())
            .unwrap()
            .direct_sum(&fe())
            .unwrap();
        let sp4 = enumerate_group(&e2, &symplectic_generators(&e2).unwrap(), 100_000).unwrap();
        assert_eq!(sp4.order() as u128, sp_order(2, 3));
    }

    #[test]
    fn image_kernel_examples() {
        let f = f3();
        let id = image_kernel(&Matrix::identity(2), &f);
        assert_eq!((id.i(), id.kernel.dim()), (0, 2));
        let minus = image_kernel(&Matrix::scalar(2, Elem(2)), &f);
        assert_eq!((minus.i(), minus.kernel.dim()), (2, 0));
        let form = fe();
        let anti = form.antisymmetrize();
        for g in sp2().elements() {
            let ik = image_kernel(g, &f);
            assert_eq!(ik.i() + ik.kernel.dim(), 2);
            // Lemma: the left and right perps of I(g) under F are K(g).
            assert_eq!(left_perp(&ik.image, &anti), ik.kernel);
            assert_eq!(right_perp(&ik.image, &anti), ik.kernel);
            let hinv = g.inverse(&f).unwrap();
            assert_eq!(image_kernel(&hinv, &f).image, ik.image);
        }
    }

    #[test]
    fn wall_form_examples() {
        let f = f3();
        let form = fe();
        let minus = Matrix::scalar(2, Elem(2));
        let w = wall_form(&minus, &form);
        assert_eq!(w.space.dim(), 2);
        assert_eq!(w.form.gram(), &form.gram().scale(Elem(2), &f));
        assert_eq!(wall_form(&Matrix::identity(2), &form).space.dim(), 0);
        for g in sp2().elements() {
            let ik = image_kernel(g, &f);
            let all = ik.image.elements(&f);
            for x in &all {
                for (vi, v) in index_vector(0, 2, 3).iter().enumerate().take(0) {
                    let _ = (vi, v);
                }
                for vidx in 0..9 {
                    let v = index_vector(vidx, 2, 3);
                    let y = one_minus(g, &f).apply_row(&v, &f);
                    // f_g(x, y) = f(x, y - v) for y = v(1 - g).
                    let lhs = wall_value(g, &form, x, &y).unwrap();
                    let rhs = form.eval(x, &vec_sub(&y, &v, &f));
                    assert_eq!(lhs, rhs);
                }
                // Independence from the preimage: add kernel vectors.
                let u = preimage(g, x, &f).unwrap();
                for k in ik.kernel.elements(&f) {
                    for y in &all {
                        assert_eq!(form.eval(&vec_add(&u, &k, &f), y), form.eval(&u, y));
                    }
                }
            }
            // f_{g^{-1}} = -f_g^t on I(g).
            let ginv = g.inverse(&f).unwrap();
            for x in &all {
                for y in &all {
                    let a = wall_value(&ginv, &form, x, y).unwrap();
                    let b = wall_value(g, &form, y, x).unwrap();
                    assert_eq!(a, f.neg(b));
                }
            }
        }
    }

    #[test]
    fn gamma_and_radical() {
        let f = f3();
        let form = fe();
        let group = sp2();
        let mut pairs = 0;
        for g in group.elements() {
            let ginv = g.inverse(&f).unwrap();
            assert!(gamma(g, &ginv, &form).unwrap().form.gram().is_zero());
            assert_eq!(radical(g, &ginv, &f).unwrap(), image_kernel(g, &f).image);
            for h in group.elements() {
                let gm = gamma(g, h, &form).unwrap();
                assert_eq!(gm.form.gram(), &gm.form.gram().transpose());
                let r = radical(g, h, &f).unwrap();
                let i = |m: &Matrix| image_kernel(m, &f).i();
                assert_eq!(gm.space.dim() + r.dim(), i(g) + i(h) - i(&g.mul(h, &f)));
                let brute = quadratic_radical_brute_force(
                    &gm.space,
                    |x| {
                        let u = preimage(g, x, &f).unwrap();
                        let v = preimage(&h.inverse(&f).unwrap(), x, &f).unwrap();
                        form.eval(&vec_sub(&u, &v, &f), x)
                    },
                    &f,
                );
                assert_eq!(brute, r);
                if one_minus(&g.mul(h, &f), &f).is_invertible(&f) {
                    assert_eq!(r.dim(), 0);
                }
                pairs += 1;
            }
        }
        assert_eq!(pairs, 576);
        let id = Matrix::identity(2);
        assert_eq!(gamma(&id, &id, &form).unwrap().space.dim(), 0);
        assert_eq!(radical(&id, &id, &f).unwrap().dim(), 0);
    }

    #[test]
    fn skew_hermitian_forms_on_gu3() {
        let k = GaloisField::new(2, 2).unwrap();
        let h = SesquiForm::standard(StandardForm::HermitianIdentity(3), &k).unwrap();
        let group = enumerate_group(&h, &unitary_generators(&k, 3).unwrap(), 1000).unwrap();
        let eta = h.eta();
        for a in (0..group.order()).step_by(37) {
            for b in (0..group.order()).step_by(23) {
                let (g, hh) = (group.element(a), group.element(b));
                let s = skew_hermitian_form(g, hh, &h).unwrap();
                let gram = s.form.gram();
                assert_eq!(gram.conj_transpose(&k, eta), gram.neg(&k));
                assert_eq!(form_radical(&s), radical(g, hh, &k).unwrap());
            }
            let g = group.element(a);
            let ginv = g.inverse(&k).unwrap();
            assert!(skew_hermitian_form(g, &ginv, &h)
                .unwrap()
                .form
                .gram()
                .is_zero());
        }
        assert_eq!(
            skew_hermitian_form(group.element(1), group.element(2), &fe()).unwrap_err(),
            Error::KindMismatch("hermitian")
        );
    }
}
