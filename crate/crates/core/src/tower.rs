//! Iterated split extensions `G(f_1) x E(f_1) x E(f_2) x ...`: each level's faithful
//! irreducible representation preserves a form `f'`, whose trace form defines the next
//! extraspecial group. Levels are tracked symbolically with exact big-integer orders and,
//! while the representations stay small, concretely (forms, groups, Weil extensions);
//! concrete prefixes can be materialized as groups with exact multiplication.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraspecial::{ExtraspecialElement, ExtraspecialGroup, IsoTag, IsoType};
use crate::forms::{trace_form, FormKind, SesquiForm, StandardForm, TraceFormSpec};
use crate::gf::{multiplicative_order, Elem, GaloisField};
use crate::group::{derived_series, GroupLaw, MatrixLaw, Subgroup};
use crate::isometry::{enumerate_group, is_isometry, sp2_generators, MatrixGroup};
use crate::matrix::Matrix;
use crate::reps::{rep_for_group, MatrixRep};
use crate::weil::{SplitCase, WeilSetup};

/// Largest representation degree built concretely by default.
pub const DEFAULT_DEGREE_CAP: u64 = 81;

/// Where a tower starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Start {
    /// `Sp_2(F_3)` acting on `E(f_E)`, alternating over `F_3` and Hermitian over `F_4` in turn.
    Sp2F3,
    /// `GL_2(F_3)` acting by similitudes on `E(f_E)`, with the same chain of levels.
    Gl2F3,
    /// Hermitian forms over `F_{p_i^2}` at every level; needs `p_i | p_{i+1} + 1`.
    HermitianChain(Vec<u32>),
}

impl FromStr for Start {
    type Err = Error;

    /// `sp2f3`, `gl2f3` or `hermitian-chain:3,5,11`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sp2f3" => Ok(Start::Sp2F3),
            "gl2f3" => Ok(Start::Gl2F3),
            _ => {
                let list = s
                    .strip_prefix("hermitian-chain:")
                    .ok_or_else(|| Error::UnsupportedChain(format!("unknown start {s:?}")))?;
                let primes = list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::UnsupportedChain(format!("bad prime {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Start::HermitianChain(primes))
            }
        }
    }
}

impl fmt::Display for Start {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Start::Sp2F3 => write!(f, "sp2f3"),
            Start::Gl2F3 => write!(f, "gl2f3"),
            Start::HermitianChain(ps) => {
                let list: Vec<String> = ps.iter().map(u32::to_string).collect();
                write!(f, "hermitian-chain:{}", list.join(","))
            }
        }
    }
}

/// The group `G(f_1)` (or the larger top group) at the base of a tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseGroup {
    pub name: String,
    pub order: u64,
}

impl BaseGroup {
    fn factor(&self) -> BTreeMap<u32, BigUint> {
        let mut out = BTreeMap::new();
        let mut n = self.order;
        let mut q = 2u64;
        while n > 1 {
            while n.is_multiple_of(q) {
                *out.entry(q as u32).or_insert_with(BigUint::zero) += 1u32;
                n /= q;
            }
            q += 1;
        }
        out
    }
}

/// How the form of a level arose from the representation of the level below.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepDescriptor {
    /// Degree of the faithful irreducible representation.
    pub degree: BigUint,
    /// The representation field `F_{p'^r}`.
    pub field_p: u32,
    pub field_r: u32,
    /// Whether the form lives on the sum of the representation and its contragredient.
    pub with_contragredient: bool,
}

/// Concrete data of a level.
#[derive(Clone, Debug)]
pub struct ConcreteLevel {
    /// `f_i` over its own field `K`.
    pub inner: SesquiForm,
    /// `E(T(lambda f_i))` over `F_p`.
    pub group: ExtraspecialGroup,
    /// The representation of `group` used to build the next level, once built.
    pub rep: Option<MatrixRep>,
}

/// One rung `E(f_i)` of a tower.
#[derive(Clone, Debug)]
pub struct TowerLevel {
    /// 1-based position.
    pub index: usize,
    pub prime: u32,
    pub iso_type: IsoType,
    /// Name as a power of a smaller group (`Q^3` for `D^2Q` arising from three Hermitian `Q`s).
    pub alias: Option<String>,
    pub split_case: SplitCase,
    /// `K = F_{p^r}` of `f_i`.
    pub form_field_r: u32,
    /// `dim_K` of the space of `f_i`.
    pub form_dim: BigUint,
    pub source: Option<RepDescriptor>,
    pub concrete: Option<ConcreteLevel>,
}

impl TowerLevel {
    pub fn n(&self) -> &BigUint {
        &self.iso_type.n
    }

    /// `|E(f_i)| = p^{2n+1}`.
    pub fn order_exponent(&self) -> BigUint {
        self.iso_type.order_exponent()
    }

    pub fn is_concrete(&self) -> bool {
        self.concrete.is_some()
    }

    /// Display name, with the alias when there is one.
    pub fn type_name(&self) -> String {
        match &self.alias {
            Some(a) => format!("{a} (= {})", self.iso_type),
            None => self.iso_type.to_string(),
        }
    }

    /// Degree `p^n` of the faithful irreducible representations of `E(f_i)`, if representable.
    pub fn rep_degree(&self) -> Option<BigUint> {
        let n = self.n().to_u32()?;
        Some(BigUint::from(self.prime).pow(n))
    }

    pub fn to_json(&self) -> TowerLevelJson {
        TowerLevelJson {
            index: self.index,
            prime: self.prime,
            iso_type: self.iso_type.to_string(),
            order: OrderJson {
                p: self.prime,
                exponent: self.order_exponent().to_string(),
            },
            split_case: self.split_case.name().to_string(),
            concrete: self.is_concrete(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderJson {
    pub p: u32,
    pub exponent: String,
}

/// One entry of `tower.json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerLevelJson {
    pub index: usize,
    pub prime: u32,
    pub iso_type: String,
    pub order: OrderJson,
    pub split_case: String,
    pub concrete: bool,
}

/// Which rule selects the next form.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ChainMode {
    /// The three cases: `D^{n-1}Q` -> alternating; `D^n` or odd `ord_p(p')` -> hyperbolic;
    /// odd `p` with even `ord_p(p')` -> Hermitian.
    Auto,
    /// Hermitian over `F_{p'^2}` at every step.
    Hermitian,
}

/// The symbolic outcome of one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub case: SplitCase,
    pub field_r: u32,
    pub form_dim: BigUint,
    pub source: RepDescriptor,
    pub iso_type: IsoType,
    pub alias: Option<String>,
}

/// `ord_p(p')`, the least `k` with `p'^k = 1 (mod p)`.
pub fn ord_mod(p: u32, p_next: u32) -> u32 {
    multiplicative_order(p_next as u64 % p as u64, p as u64).expect("distinct primes are units")
        as u32
}

fn iso_from_dimension(p: u32, n: BigUint, q_count: Option<&BigUint>) -> IsoType {
    if p != 2 {
        IsoType::new(IsoTag::En, n)
    } else if q_count.is_some_and(|q| q.bit(0)) {
        IsoType::new(IsoTag::Dn1Q, n)
    } else {
        IsoType::new(IsoTag::Dn, n)
    }
}

/// The case table: from `E(f_i)` of type `iso` over `F_p`, the form `f_{i+1}` carried by a
/// representation in characteristic `p_next`, and the type of `E(f_{i+1})`.
pub fn predict(p: u32, iso: &IsoType, p_next: u32, mode: ChainMode) -> Result<Prediction> {
    if p == p_next {
        return Err(Error::UnsupportedChain(format!(
            "consecutive primes must differ, got {p} twice"
        )));
    }
    let n = iso.n.to_u32().ok_or_else(|| {
        Error::UnsupportedChain(format!(
            "the representation degree {p}^{} is too large to represent",
            iso.n
        ))
    })?;
    let degree = BigUint::from(p).pow(n);
    let r = if p == 2 { 1 } else { ord_mod(p, p_next) };
    let hermitian = |r: u32| {
        // Hermitian of dimension d over F_{p'^{2s}}: n' = s d; for p' = 2 it is (D^{s-1}Q)^d.
        let s = r / 2;
        let n_next = &degree * s;
        let alias = (p_next == 2 && s == 1).then(|| format!("Q^{degree}"));
        Prediction {
            case: SplitCase::Unitary,
            field_r: r,
            form_dim: degree.clone(),
            source: RepDescriptor {
                degree: degree.clone(),
                field_p: p_next,
                field_r: r,
                with_contragredient: false,
            },
            iso_type: iso_from_dimension(p_next, n_next, Some(&degree)),
            alias,
        }
    };
    match mode {
        ChainMode::Hermitian => {
            if p == 2 || p_next == 2 || !(p_next + 1).is_multiple_of(p) {
                return Err(Error::UnsupportedChain(format!(
                    "a Hermitian step needs odd primes with p | p' + 1, got p = {p}, p' = {p_next}"
                )));
            }
            Ok(hermitian(2))
        }
        ChainMode::Auto => {
            if p == 2 && iso.tag == IsoTag::Dn1Q {
                // Alternating form of dimension 2^n over F_{p'}.
                let n_next = &degree / 2u32;
                return Ok(Prediction {
                    case: SplitCase::Symplectic,
                    field_r: 1,
                    form_dim: degree.clone(),
                    source: RepDescriptor {
                        degree,
                        field_p: p_next,
                        field_r: 1,
                        with_contragredient: false,
                    },
                    iso_type: IsoType::new(IsoTag::En, n_next),
                    alias: None,
                });
            }
            if p != 2 && r % 2 == 0 {
                return Ok(hermitian(r));
            }
            // Hyperbolic: V' = W* + W with dim W = p^n over F_{p'^r}.
            let n_next = &degree * r;
            Ok(Prediction {
                case: SplitCase::Hyperbolic,
                field_r: r,
                form_dim: &degree * 2u32,
                source: RepDescriptor {
                    degree,
                    field_p: p_next,
                    field_r: r,
                    with_contragredient: true,
                },
                iso_type: iso_from_dimension(p_next, n_next, None),
                alias: None,
            })
        }
    }
}

/// Builds the next level. When `level` is concrete and its representation degree is at most
/// `degree_cap`, the representation, the invariant form and the classification are computed
/// and checked against the prediction; the representation is returned for the caller to keep.
pub fn next_level(
    level: &TowerLevel,
    p_next: u32,
    mode: ChainMode,
    degree_cap: u64,
) -> Result<(TowerLevel, Option<MatrixRep>)> {
    let pred = predict(level.prime, &level.iso_type, p_next, mode)?;
    let mut next = TowerLevel {
        index: level.index + 1,
        prime: p_next,
        iso_type: pred.iso_type.clone(),
        alias: pred.alias.clone(),
        split_case: pred.case,
        form_field_r: pred.field_r,
        form_dim: pred.form_dim.clone(),
        source: Some(pred.source.clone()),
        concrete: None,
    };
    let small = pred.source.degree.to_u64().is_some_and(|d| d <= degree_cap);
    let Some(conc) = level.concrete.as_ref().filter(|_| small) else {
        return Ok((next, None));
    };
    let kf = GaloisField::new(p_next, pred.field_r)?;
    let rho = rep_for_group(&conc.group, &kf)?;
    let inner = match pred.case {
        SplitCase::Hyperbolic => rho.sum_with_contragredient()?.1.as_form(&kf),
        SplitCase::Symplectic | SplitCase::Unitary => {
            let rf = match rho.form() {
                Some(rf) => rf.clone(),
                None => {
                    let eta = if pred.case == SplitCase::Unitary {
                        kf.involution().ok_or(Error::NoInvolution)?
                    } else {
                        crate::gf::FieldAuto::IDENTITY
                    };
                    rho.invariant_form(eta)?.ok_or(Error::DegenerateForm)?
                }
            };
            let form = rf.as_form(&kf);
            let want = if pred.case == SplitCase::Unitary {
                FormKind::Hermitian
            } else {
                FormKind::Alternating
            };
            if form.kind() != want {
                return Err(Error::Invalid(format!(
                    "level {}: invariant form is {:?}, expected {:?}",
                    next.index,
                    form.kind(),
                    want
                )));
            }
            form
        }
    };
    let hat = trace_form(&TraceFormSpec::canonical(inner.clone()))?;
    let group = ExtraspecialGroup::new(hat)?;
    let iso = group.classify()?;
    if iso != pred.iso_type {
        return Err(Error::Invalid(format!(
            "level {}: computed {iso}, case table predicts {}",
            next.index, pred.iso_type
        )));
    }
    next.concrete = Some(ConcreteLevel {
        inner,
        group,
        rep: None,
    });
    Ok((next, Some(rho)))
}

/// A tower prefix.
#[derive(Clone, Debug)]
pub struct Tower {
    pub start: Start,
    pub base: BaseGroup,
    pub levels: Vec<TowerLevel>,
}

impl Tower {
    /// Exact order as a prime factorization (base group times all levels).
    pub fn total_order(&self) -> BTreeMap<u32, BigUint> {
        let mut out = self.base.factor();
        for l in &self.levels {
            *out.entry(l.prime).or_insert_with(BigUint::zero) += l.order_exponent();
        }
        out
    }

    /// `2^11 * 3^13` style rendering of [`Tower::total_order`].
    pub fn total_order_string(&self) -> String {
        let parts: Vec<String> = self
            .total_order()
            .iter()
            .map(|(p, e)| format!("{p}^{e}"))
            .collect();
        parts.join(" * ")
    }

    pub fn to_json(&self) -> Vec<TowerLevelJson> {
        self.levels.iter().map(TowerLevel::to_json).collect()
    }
}

fn first_level(start: &Start) -> Result<(BaseGroup, TowerLevel)> {
    match start {
        Start::Sp2F3 | Start::Gl2F3 => {
            let f3 = GaloisField::prime(3)?;
            let inner = SesquiForm::standard(StandardForm::FE, &f3)?;
            let group = ExtraspecialGroup::new(inner.clone())?;
            let base = if *start == Start::Sp2F3 {
                BaseGroup {
                    name: "Sp_2(F_3)".into(),
                    order: 24,
                }
            } else {
                BaseGroup {
                    name: "GL_2(F_3)".into(),
                    order: 48,
                }
            };
            let level = TowerLevel {
                index: 1,
                prime: 3,
                iso_type: group.classify()?,
                alias: None,
                split_case: SplitCase::Symplectic,
                form_field_r: 1,
                form_dim: BigUint::from(2u32),
                source: None,
                concrete: Some(ConcreteLevel {
                    inner,
                    group,
                    rep: None,
                }),
            };
            Ok((base, level))
        }
        Start::HermitianChain(primes) => {
            let &p = primes
                .first()
                .ok_or_else(|| Error::UnsupportedChain("empty prime list".into()))?;
            if p == 2 || !crate::gf::is_prime(p as u64) {
                return Err(Error::UnsupportedChain(format!(
                    "Hermitian chains need odd primes, got {p}"
                )));
            }
            let k = GaloisField::new(p, 2)?;
            let inner = SesquiForm::standard(StandardForm::HermitianIdentity(1), &k)?;
            let group =
                ExtraspecialGroup::new(trace_form(&TraceFormSpec::canonical(inner.clone()))?)?;
            let base = BaseGroup {
                name: format!("GU_1({p})"),
                order: p as u64 + 1,
            };
            let level = TowerLevel {
                index: 1,
                prime: p,
                iso_type: group.classify()?,
                alias: None,
                split_case: SplitCase::Unitary,
                form_field_r: 2,
                form_dim: BigUint::one(),
                source: None,
                concrete: Some(ConcreteLevel {
                    inner,
                    group,
                    rep: None,
                }),
            };
            Ok((base, level))
        }
    }
}

/// The prime of level `i` (1-based) for a start configuration.
fn prime_at(start: &Start, i: usize) -> Result<u32> {
    match start {
        Start::Sp2F3 | Start::Gl2F3 => Ok(if i % 2 == 1 { 3 } else { 2 }),
        Start::HermitianChain(ps) => ps.get(i - 1).copied().ok_or_else(|| {
            Error::UnsupportedChain(format!(
                "{} levels requested but only {} primes given",
                i,
                ps.len()
            ))
        }),
    }
}

/// Builds `levels` levels (0 gives the base group alone).
pub fn build_tower(start: &Start, levels: usize, degree_cap: u64) -> Result<Tower> {
    let (base, first) = first_level(start)?;
    let mode = if matches!(start, Start::HermitianChain(_)) {
        ChainMode::Hermitian
    } else {
        ChainMode::Auto
    };
    let mut out: Vec<TowerLevel> = Vec::new();
    if levels > 0 {
        out.push(first);
    }
    while out.len() < levels {
        let p_next = prime_at(start, out.len() + 1)?;
        let last = out.last_mut().expect("nonempty");
        let (next, rep) = next_level(last, p_next, mode, degree_cap)?;
        if let (Some(conc), Some(rep)) = (last.concrete.as_mut(), rep) {
            conc.rep = Some(rep);
        }
        out.push(next);
    }
    Ok(Tower {
        start: start.clone(),
        base,
        levels: out,
    })
}

/// An element `(g, e_1, ..., e_d)` of `G x E(f_1) x ... x E(f_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TowerElement {
    pub top: Matrix,
    pub layers: Vec<ExtraspecialElement>,
}

/// Exact multiplication in a materialized tower prefix.
///
/// `(A, e)(B, e') = (AB, e^B e')` where `B` acts on `E(f_k)` through
/// `Phi_k(B)`: `Phi_1(g, ...) = g` and `Phi_{k+1}(A, e_k) = s'_k(Phi_k(A)) rho_k(e_k)`,
/// restricted to the prime field.
pub struct MaterializedTower {
    top_group: MatrixGroup,
    top_field: Arc<GaloisField>,
    similitude: bool,
    groups: Vec<ExtraspecialGroup>,
    weils: Vec<WeilSetup>,
    caches: Vec<RwLock<HashMap<Matrix, Matrix>>>,
}

/// Materializes the first `depth` levels of an `sp2f3` or `gl2f3` tower.
pub fn materialize(tower: &Tower, depth: usize) -> Result<MaterializedTower> {
    let f3 = GaloisField::prime(3)?;
    let (similitude, top_gens) = match tower.start {
        Start::Sp2F3 => (false, sp2_generators(&f3)),
        Start::Gl2F3 => {
            let mut g = sp2_generators(&f3);
            g.push(Matrix::from_ints(&f3, &[&[-1, 0], &[0, 1]]));
            (true, g)
        }
        Start::HermitianChain(_) => {
            return Err(Error::UnsupportedChain(
                "materialization covers the sp2f3 and gl2f3 towers".into(),
            ))
        }
    };
    // The similitude top group acts linearly only on the first layer; deeper layers need
    // crossed representations.
    let concrete_depth = tower.levels.iter().take_while(|l| l.is_concrete()).count();
    let with_reps = 1 + tower
        .levels
        .iter()
        .take_while(|l| l.concrete.as_ref().is_some_and(|c| c.rep.is_some()))
        .count();
    let max = if similitude {
        concrete_depth.min(1)
    } else {
        concrete_depth.min(with_reps)
    };
    if depth > max {
        return Err(Error::DepthTooDeep { depth, max });
    }
    let top_group = MatrixGroup::generate(&f3, &top_gens, 100)?;
    let mut groups = Vec::new();
    let mut weils = Vec::new();
    for (k, level) in tower.levels.iter().take(depth).enumerate() {
        let conc = level.concrete.as_ref().expect("checked above");
        groups.push(conc.group.clone());
        if k + 1 < depth {
            let rep = conc.rep.clone().expect("checked above");
            if level.split_case == SplitCase::Hyperbolic {
                return Err(Error::UnsupportedChain(
                    "hyperbolic levels are not materialized".into(),
                ));
            }
            weils.push(WeilSetup::new(rep, level.split_case, conc.inner.clone())?);
        }
    }
    let caches = weils.iter().map(|_| RwLock::new(HashMap::new())).collect();
    Ok(MaterializedTower {
        top_group,
        top_field: f3,
        similitude,
        groups,
        weils,
        caches,
    })
}

impl MaterializedTower {
    pub fn depth(&self) -> usize {
        self.groups.len()
    }

    pub fn top_group(&self) -> &MatrixGroup {
        &self.top_group
    }

    pub fn layer_group(&self, k: usize) -> &ExtraspecialGroup {
        &self.groups[k]
    }

    pub fn order(&self) -> BigUint {
        self.groups
            .iter()
            .fold(BigUint::from(self.top_group.order()), |acc, g| {
                acc * BigUint::from(g.p()).pow(2 * g.n() as u32 + 1)
            })
    }

    pub fn identity(&self) -> TowerElement {
        TowerElement {
            top: Matrix::identity(2),
            layers: self.groups.iter().map(|g| g.identity()).collect(),
        }
    }

    fn s_prime(&self, k: usize, m: &Matrix) -> Matrix {
        if let Some(s) = self.caches[k].read().expect("cache lock").get(m) {
            return s.clone();
        }
        let s = self.weils[k]
            .s_prime(m)
            .expect("Weil images of isometries are defined");
        self.caches[k]
            .write()
            .expect("cache lock")
            .insert(m.clone(), s.clone());
        s
    }

    /// `Phi_1, ..., Phi_m` for the prefix `(top, layers[..m-1])` with `m = min(depth, layers + 1)`.
    fn phis(&self, e: &TowerElement, upto: usize) -> Vec<Matrix> {
        let mut out = vec![e.top.clone()];
        for k in 1..upto {
            let weil = &self.weils[k - 1];
            let field = weil.rep().field();
            let m = self
                .s_prime(k - 1, &out[k - 1])
                .mul(&weil.rep().eval(&e.layers[k - 1]), field);
            out.push(m);
        }
        out
    }

    /// The automorphism of `E(f_k)` (0-based `k`) induced by `phi = Phi_{k+1}`.
    fn act(
        &self,
        k: usize,
        phi: &Matrix,
        top: &Matrix,
        e: &ExtraspecialElement,
    ) -> ExtraspecialElement {
        let g = &self.groups[k];
        let fp = g.field();
        if k == 0 {
            let z = if self.similitude {
                fp.mul(top.det(fp), e.z)
            } else {
                e.z
            };
            return ExtraspecialElement::new(phi.apply_row(&e.x, fp), z);
        }
        let hat = phi.restrict_to_prime(self.weils[k - 1].rep().field());
        ExtraspecialElement::new(hat.apply_row(&e.x, fp), e.z)
    }

    /// The action matrices `Phi_k(b)` restricted to the prime fields.
    pub fn action_matrices(&self, b: &TowerElement) -> Vec<Matrix> {
        self.phis(b, self.depth())
            .into_iter()
            .enumerate()
            .map(|(k, m)| {
                if k == 0 {
                    m
                } else {
                    m.restrict_to_prime(self.weils[k - 1].rep().field())
                }
            })
            .collect()
    }

    pub fn multiply(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        let phis = self.phis(b, self.depth());
        let layers = (0..self.depth())
            .map(|k| self.groups[k].mul(&self.act(k, &phis[k], &b.top, &a.layers[k]), &b.layers[k]))
            .collect();
        TowerElement {
            top: a.top.mul(&b.top, &self.top_field),
            layers,
        }
    }

    pub fn inverse(&self, a: &TowerElement) -> TowerElement {
        let top = a.top.inverse(&self.top_field).expect("invertible");
        let mut out = TowerElement {
            top,
            layers: Vec::with_capacity(self.depth()),
        };
        for k in 0..self.depth() {
            let phis = self.phis(&out, k + 1);
            let inv = self.groups[k].inverse(&a.layers[k]);
            let moved = self.act(k, &phis[k], &out.top, &inv);
            out.layers.push(moved);
        }
        out
    }

    /// Generators: those of the top group and of every layer.
    pub fn generators(&self) -> Vec<TowerElement> {
        let id = self.identity();
        let mut out: Vec<TowerElement> = self
            .top_group
            .generators()
            .iter()
            .map(|g| TowerElement {
                top: g.clone(),
                ..id.clone()
            })
            .collect();
        for (k, g) in self.groups.iter().enumerate() {
            for i in 0..g.dim() {
                let mut e = id.clone();
                e.layers[k] = g.generator(i);
                out.push(e);
            }
        }
        out
    }

    pub fn random_element(&self, rng: &mut impl Rng) -> TowerElement {
        let top = self
            .top_group
            .element(rng.gen_range(0..self.top_group.order()))
            .clone();
        let layers = self
            .groups
            .iter()
            .map(|g| {
                let p = g.p();
                let x = (0..g.dim()).map(|_| Elem(rng.gen_range(0..p))).collect();
                ExtraspecialElement::new(x, Elem(rng.gen_range(0..p)))
            })
            .collect();
        TowerElement { top, layers }
    }

    /// Whether `e` lies in the layer subgroup `E(f_k) x ... x E(f_d)` (0-based `k`).
    pub fn in_layer(&self, e: &TowerElement, k: usize) -> bool {
        e.top.is_identity() && e.layers[..k].iter().all(ExtraspecialElement::is_identity)
    }

    /// Number of failing random triples of `(ab)c = a(bc)`.
    pub fn verify_associativity(&self, samples: usize, seed: u64) -> usize {
        let triples: Vec<[TowerElement; 3]> = {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| std::array::from_fn(|_| self.random_element(&mut rng)))
                .collect()
        };
        triples
            .par_iter()
            .filter(|[a, b, c]| {
                self.multiply(&self.multiply(a, b), c) != self.multiply(a, &self.multiply(b, c))
            })
            .count()
    }

    /// Failures of: inverses, normality of each layer subgroup under conjugation, and the
    /// action matrices being isometries (similitudes for the `GL_2(F_3)` top) of the layer forms.
    pub fn verify_structure(&self, samples: usize, seed: u64) -> Result<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = 0;
        let id = self.identity();
        for _ in 0..samples {
            let g = self.random_element(&mut rng);
            if self.multiply(&g, &self.inverse(&g)) != id
                || self.multiply(&self.inverse(&g), &g) != id
            {
                failures += 1;
            }
            for k in 0..self.depth() {
                let mut n = self.random_element(&mut rng);
                n.top = Matrix::identity(2);
                for (j, l) in n.layers.iter_mut().enumerate().take(k) {
                    *l = self.groups[j].identity();
                }
                if !self.in_layer(&self.conjugate(&n, &g), k) {
                    failures += 1;
                }
            }
            for (k, m) in self.action_matrices(&g).iter().enumerate() {
                let form = self.groups[k].form();
                let ok = if k == 0 && self.similitude {
                    let f = form.field();
                    let det = g.top.det(f);
                    m.mul(form.gram(), f).mul(&m.transpose(), f) == form.gram().scale(det, f)
                } else {
                    is_isometry(m, form)?
                };
                if !ok {
                    failures += 1;
                }
            }
        }
        Ok(failures)
    }

    /// Splits the derived series of a depth-1 group into terms of the form `H x E(f_1)` with `H`
    /// the matching derived term of the top group, and terms inside `E(f_1)` equal to its own
    /// derived terms; returns false if some term is neither.
    pub fn derived_terms_are_layered(&self, series: &[Subgroup<TowerElement>]) -> Result<bool> {
        if self.depth() != 1 {
            return Err(Error::Invalid(
                "the layer check covers depth-1 groups".into(),
            ));
        }
        let e = &self.groups[0];
        let law = MatrixLaw {
            field: self.top_field.clone(),
            dim: 2,
        };
        let top_series = derived_series(&law, self.top_group.generators(), 1 << 20)?;
        let e_gens: Vec<ExtraspecialElement> = (0..e.dim()).map(|i| e.generator(i)).collect();
        let e_series = derived_series(e, &e_gens, 1 << 20)?;
        let e_order = e.order().ok_or(Error::CapExceeded(usize::MAX))? as usize;
        let lift = |x: &ExtraspecialElement| TowerElement {
            top: Matrix::identity(2),
            layers: vec![x.clone()],
        };
        let layer_elems: Vec<TowerElement> = e.elements(e_order)?.iter().map(lift).collect();
        for (i, term) in series.iter().enumerate() {
            let contains_layer = layer_elems.iter().all(|x| term.contains(x));
            if contains_layer {
                let tops: std::collections::HashSet<Matrix> =
                    term.elements.iter().map(|t| t.top.clone()).collect();
                let expected = top_series
                    .get(i)
                    .map(|s| s.elements.clone())
                    .unwrap_or_else(|| [Matrix::identity(2)].into());
                if tops != expected || term.order() != tops.len() * e_order {
                    return Ok(false);
                }
            } else {
                let inside: Option<std::collections::HashSet<ExtraspecialElement>> = term
                    .elements
                    .iter()
                    .map(|t| t.top.is_identity().then(|| t.layers[0].clone()))
                    .collect();
                match inside {
                    Some(set) if e_series.iter().any(|s| s.elements == set) => {}
                    _ => return Ok(false),
                }
            }
        }
        Ok(true)
    }
}

impl GroupLaw for MaterializedTower {
    type Elem = TowerElement;

    fn identity(&self) -> TowerElement {
        MaterializedTower::identity(self)
    }

    fn mul(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        self.multiply(a, b)
    }

    fn inv(&self, a: &TowerElement) -> TowerElement {
        self.inverse(a)
    }
}

/// Named groups for derived-series runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivedSpec {
    /// `GL_2(F_3)` or `Sp_2(F_3)` as matrix groups.
    Top(Start),
    /// The top group together with the first `depth` materialized levels.
    Tower(Start, usize),
}

impl FromStr for DerivedSpec {
    type Err = Error;

    /// `gl2f3`, `sp2f3`, `gl2f3-e27`, `sp2f3-e27`, `sp2f3-e27-q3`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('-');
        let start: Start = parts.next().unwrap_or_default().parse()?;
        let rest: Vec<&str> = parts.collect();
        match rest.as_slice() {
            [] => Ok(DerivedSpec::Top(start)),
            ["e27"] => Ok(DerivedSpec::Tower(start, 1)),
            ["e27", "q3"] => Ok(DerivedSpec::Tower(start, 2)),
            _ => Err(Error::UnsupportedChain(format!("unknown group {s:?}"))),
        }
    }
}

/// Result of a derived-series run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedReport {
    pub orders: Vec<usize>,
    pub derived_length: usize,
    /// Present for depth-1 towers: whether every term is a layer-compatible subgroup.
    pub layered: Option<bool>,
}

/// Enumeration-based derived series of a named group.
pub fn derived_for_spec(spec: &DerivedSpec, cap: usize) -> Result<DerivedReport> {
    match spec {
        DerivedSpec::Top(start) => {
            let f3 = GaloisField::prime(3)?;
            let mut gens = sp2_generators(&f3);
            match start {
                Start::Sp2F3 => {}
                Start::Gl2F3 => gens.push(Matrix::from_ints(&f3, &[&[-1, 0], &[0, 1]])),
                Start::HermitianChain(_) => {
                    return Err(Error::UnsupportedChain("no matrix top group".into()))
                }
            }
            let law = MatrixLaw { field: f3, dim: 2 };
            let orders: Vec<usize> = derived_series(&law, &gens, cap)?
                .iter()
                .map(Subgroup::order)
                .collect();
            Ok(DerivedReport {
                derived_length: orders.len() - 1,
                orders,
                layered: None,
            })
        }
        DerivedSpec::Tower(start, depth) => {
            let tower = build_tower(start, *depth, DEFAULT_DEGREE_CAP)?;
            let mt = materialize(&tower, *depth)?;
            let series = derived_series(&mt, &mt.generators(), cap)?;
            let orders: Vec<usize> = series.iter().map(Subgroup::order).collect();
            let layered = if *depth == 1 {
                Some(mt.derived_terms_are_layered(&series)?)
            } else {
                None
            };
            Ok(DerivedReport {
                derived_length: orders.len() - 1,
                orders,
                layered,
            })
        }
    }
}

impl MaterializedTower {
    /// `g^{-1} n g`.
    pub fn conjugate(&self, n: &TowerElement, g: &TowerElement) -> TowerElement {
        self.multiply(&self.multiply(&self.inverse(g), n), g)
    }
}

/// The sanity check that `f_E` over `F_3` carries `Sp_2(F_3)`: used by the command line.
pub fn sp2f3_top(cap: usize) -> Result<MatrixGroup> {
    let f3 = GaloisField::prime(3)?;
    let fe = SesquiForm::standard(StandardForm::FE, &f3)?;
    enumerate_group(&fe, &sp2_generators(&f3), cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow(p: u32, e: u32) -> BigUint {
        BigUint::from(p).pow(e)
    }

    #[test]
    fn ord_and_predictions() {
        assert_eq!(ord_mod(3, 2), 2);
        assert_eq!(ord_mod(5, 11), 1);
        assert_eq!(ord_mod(7, 2), 3);
        let e1 = IsoType::new(IsoTag::En, 1u32);
        let p = predict(3, &e1, 2, ChainMode::Auto).unwrap();
        assert_eq!(
            (p.case, p.iso_type.to_string(), p.alias.as_deref()),
            (SplitCase::Unitary, "D^2Q".into(), Some("Q^3"))
        );
        // ord_7(2) = 3 is odd: hyperbolic over F_8, n' = 3 * 7 = 21, D^21.
        let p = predict(7, &e1, 2, ChainMode::Auto).unwrap();
        assert_eq!(
            (p.case, p.iso_type.to_string()),
            (SplitCase::Hyperbolic, "D^21".into())
        );
        let d2 = IsoType::new(IsoTag::Dn, 2u32);
        let p = predict(2, &d2, 3, ChainMode::Auto).unwrap();
        assert_eq!(
            (p.case, p.iso_type.to_string()),
            (SplitCase::Hyperbolic, "E^4".into())
        );
        assert!(matches!(
            predict(3, &e1, 7, ChainMode::Hermitian),
            Err(Error::UnsupportedChain(_))
        ));
        assert_eq!(
            predict(3, &e1, 5, ChainMode::Hermitian)
                .unwrap()
                .iso_type
                .to_string(),
            "E^3"
        );
        assert!(matches!(
            predict(3, &e1, 3, ChainMode::Auto),
            Err(Error::UnsupportedChain(_))
        ));
    }

    #[test]
    fn sp2f3_five_levels() {
        let t = build_tower(&Start::Sp2F3, 5, DEFAULT_DEGREE_CAP).unwrap();
        let types: Vec<String> = t.levels.iter().map(|l| l.iso_type.to_string()).collect();
        let two80 = pow(2, 80).to_string();
        assert_eq!(
            types,
            vec![
                "E^1".to_string(),
                "D^2Q".into(),
                "E^4".into(),
                "D^80Q".into(),
                format!("E^{two80}")
            ]
        );
        assert_eq!(t.levels[1].alias.as_deref(), Some("Q^3"));
        assert_eq!(t.levels[3].alias.as_deref(), Some("Q^81"));
        let orders: Vec<BigUint> = t.levels.iter().map(TowerLevel::order_exponent).collect();
        assert_eq!(
            orders,
            vec![
                pow(3, 0) * 3u32,
                pow(2, 0) * 7u32,
                pow(3, 0) * 9u32,
                pow(2, 0) * 163u32,
                pow(2, 81) + 1u32
            ]
        );
        let concrete: Vec<bool> = t.levels.iter().map(TowerLevel::is_concrete).collect();
        assert_eq!(concrete, vec![true, true, true, true, false]);
        let cases: Vec<SplitCase> = t.levels.iter().map(|l| l.split_case).collect();
        use SplitCase::*;
        assert_eq!(
            cases,
            vec![Symplectic, Unitary, Symplectic, Unitary, Symplectic]
        );
        let json = serde_json::to_string(&t.to_json()).unwrap();
        assert!(json.contains(r#""exponent":"163""#));
    }

    #[test]
    fn zero_levels_and_gl2f3_prefix() {
        let t = build_tower(&Start::Sp2F3, 0, DEFAULT_DEGREE_CAP).unwrap();
        assert!(t.levels.is_empty());
        assert_eq!(t.base.order, 24);
        let t = build_tower(&Start::Gl2F3, 3, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(t.total_order_string(), "2^11 * 3^13");
        // Oracle: 48 * 3^3 * 2^7 * 3^9 multiplied out.
        let total: BigUint = t
            .total_order()
            .iter()
            .map(|(p, e)| BigUint::from(*p).pow(e.to_u32().unwrap()))
            .product();
        assert_eq!(
            total,
            BigUint::from(48u32) * pow(3, 3) * pow(2, 7) * pow(3, 9)
        );
    }

    #[test]
    fn hermitian_chain() {
        let t = build_tower(&"hermitian-chain:3,5,29".parse().unwrap(), 3, 30).unwrap();
        let types: Vec<String> = t.levels.iter().map(|l| l.iso_type.to_string()).collect();
        // n_1 = 1, n_2 = 3^1, n_3 = 5^3.
        assert_eq!(types, vec!["E^1", "E^3", "E^125"]);
        assert!(t.levels[1].is_concrete());
        assert!(matches!(
            build_tower(&"hermitian-chain:3,7".parse().unwrap(), 2, 30),
            Err(Error::UnsupportedChain(_))
        ));
        assert!(matches!(
            build_tower(&"hermitian-chain:3,5".parse().unwrap(), 3, 30),
            Err(Error::UnsupportedChain(_))
        ));
    }

    #[test]
    fn depth_one_group() {
        let t = build_tower(&Start::Sp2F3, 2, DEFAULT_DEGREE_CAP).unwrap();
        let mt = materialize(&t, 1).unwrap();
        assert_eq!(mt.order(), BigUint::from(648u32));
        assert_eq!(mt.verify_associativity(2000, 1), 0);
        assert_eq!(mt.verify_structure(200, 2).unwrap(), 0);
        let id = mt.identity();
        assert!(id.top.is_identity() && id.layers.iter().all(ExtraspecialElement::is_identity));
        let all = crate::group::closure(&mt, &mt.generators(), 10_000).unwrap();
        assert_eq!(all.order(), 648);
    }

    #[test]
    fn depth_two_group() {
        let t = build_tower(&Start::Sp2F3, 3, DEFAULT_DEGREE_CAP).unwrap();
        let mt = materialize(&t, 2).unwrap();
        assert_eq!(mt.order(), BigUint::from(82944u32));
        assert_eq!(mt.verify_associativity(500, 3), 0);
        assert_eq!(mt.verify_structure(100, 4).unwrap(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (a, b) = (mt.random_element(&mut rng), mt.random_element(&mut rng));
            let mut a = a;
            a.top = Matrix::identity(2);
            // Commutators with an element of E x Q^3 stay in E x Q^3.
            assert!(mt.in_layer(&mt.commutator(&a, &b), 0));
        }
    }

    #[test]
    fn depth_three_and_four() {
        let t = build_tower(&Start::Sp2F3, 4, DEFAULT_DEGREE_CAP).unwrap();
        let mt = materialize(&t, 3).unwrap();
        assert_eq!(mt.order(), BigUint::from(82944u32) * pow(3, 9));
        assert_eq!(mt.verify_associativity(100, 6), 0);
        assert_eq!(mt.verify_structure(20, 7).unwrap(), 0);
        let mt = materialize(&t, 4).unwrap();
        assert_eq!(
            mt.order(),
            BigUint::from(82944u32) * pow(3, 9) * pow(2, 163)
        );
        assert_eq!(mt.verify_associativity(10, 8), 0);
        assert_eq!(mt.verify_structure(3, 9).unwrap(), 0);
    }

    #[test]
    fn depth_limits() {
        let t = build_tower(&Start::Gl2F3, 3, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(
            materialize(&t, 2).err(),
            Some(Error::DepthTooDeep { depth: 2, max: 1 })
        );
        let t = build_tower(&Start::Sp2F3, 5, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(
            materialize(&t, 5).err(),
            Some(Error::DepthTooDeep { depth: 5, max: 4 })
        );
    }

    #[test]
    fn derived_lengths() {
        let r = derived_for_spec(&"gl2f3".parse().unwrap(), 1000).unwrap();
        assert_eq!(
            (r.orders.clone(), r.derived_length),
            (vec![48, 24, 8, 2, 1], 4)
        );
        let r = derived_for_spec(&"gl2f3-e27".parse().unwrap(), 10_000).unwrap();
        assert_eq!(r.orders, vec![1296, 648, 216, 54, 27, 3, 1]);
        assert_eq!(r.derived_length, 6);
        assert_eq!(r.layered, Some(true));
        let r = derived_for_spec(&"sp2f3-e27".parse().unwrap(), 10_000).unwrap();
        assert_eq!(r.derived_length, 5);
        assert_eq!(r.layered, Some(true));
    }
}
