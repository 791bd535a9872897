//! Enumeration of finite groups given by generators, commutator subgroups and derived
//! series, over any exact multiplication.

use std::collections::HashSet;
use std::hash::Hash;

use crate::error::{Error, Result};

/// An exact group law on some element type.
pub trait GroupLaw {
    type Elem: Clone + Eq + Hash;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(&self.inv(a), &self.inv(b)), &self.mul(a, b))
    }

    fn conjugate(&self, a: &Self::Elem, by: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(&self.inv(by), a), by)
    }
}

/// A subgroup stored as its element set together with a generating set.
#[derive(Clone, Debug)]
pub struct Subgroup<E> {
    pub generators: Vec<E>,
    pub elements: HashSet<E>,
}

impl<E: Clone + Eq + Hash> Subgroup<E> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: &E) -> bool {
        self.elements.contains(e)
    }

    pub fn is_subset_of(&self, other: &Subgroup<E>) -> bool {
        self.elements.iter().all(|e| other.contains(e))
    }
}

/// Closure of `generators` under multiplication (finite groups: this is the generated subgroup).
pub fn closure<G: GroupLaw>(
    law: &G,
    generators: &[G::Elem],
    cap: usize,
) -> Result<Subgroup<G::Elem>> {
    let mut sub = Subgroup {
        generators: Vec::new(),
        elements: HashSet::from([law.identity()]),
    };
    for g in generators {
        add_generator(law, &mut sub, g.clone(), cap)?;
    }
    Ok(sub)
}

/// Extends a subgroup by one generator: old elements are multiplied by the new generator,
/// new elements by every generator.
pub fn add_generator<G: GroupLaw>(
    law: &G,
    sub: &mut Subgroup<G::Elem>,
    g: G::Elem,
    cap: usize,
) -> Result<bool> {
    if sub.contains(&g) {
        return Ok(false);
    }
    sub.generators.push(g.clone());
    let mut frontier: Vec<G::Elem> = Vec::new();
    for e in sub.elements.iter() {
        let prod = law.mul(e, &g);
        if !sub.elements.contains(&prod) {
            frontier.push(prod);
        }
    }
    let mut queue = Vec::new();
    for e in frontier {
        if sub.elements.insert(e.clone()) {
            queue.push(e);
        }
    }
    while let Some(e) = queue.pop() {
        if sub.elements.len() > cap {
            return Err(Error::CapExceeded(cap));
        }
        for s in &sub.generators {
            let prod = law.mul(&e, s);
            if sub.elements.insert(prod.clone()) {
                queue.push(prod);
            }
        }
    }
    if sub.elements.len() > cap {
        return Err(Error::CapExceeded(cap));
    }
    Ok(true)
}

/// The commutator subgroup of `sub`: the normal closure in `sub` of the commutators of its generators.
pub fn derived_subgroup<G: GroupLaw>(
    law: &G,
    sub: &Subgroup<G::Elem>,
    cap: usize,
) -> Result<Subgroup<G::Elem>> {
    let gens = &sub.generators;
    let mut out = closure(law, &[], cap)?;
    let mut pending: Vec<G::Elem> = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            pending.push(law.commutator(a, b));
        }
    }
    while let Some(c) = pending.pop() {
        if add_generator(law, &mut out, c.clone(), cap)? {
            for g in gens {
                pending.push(law.conjugate(&c, g));
            }
        }
    }
    // Normality: conjugates of every generator of `out` by generators of `sub` stay inside.
    loop {
        let missing: Vec<G::Elem> = out
            .generators
            .iter()
            .flat_map(|n| gens.iter().map(move |g| (n, g)))
            .map(|(n, g)| law.conjugate(n, g))
            .filter(|c| !out.contains(c))
            .collect();
        if missing.is_empty() {
            break;
        }
        for c in missing {
            add_generator(law, &mut out, c, cap)?;
        }
    }
    Ok(out)
}

/// `G = G^(0) > G^(1) > ... > G^(k) = 1`; returns all terms including the trivial one.
pub fn derived_series<G: GroupLaw>(
    law: &G,
    generators: &[G::Elem],
    cap: usize,
) -> Result<Vec<Subgroup<G::Elem>>> {
    let mut series = vec![closure(law, generators, cap)?];
    loop {
        let last = series.last().expect("nonempty");
        if last.order() == 1 {
            return Ok(series);
        }
        let next = derived_subgroup(law, last, cap)?;
        if next.order() == last.order() {
            return Err(Error::Invalid("group is not soluble".into()));
        }
        series.push(next);
    }
}

/// Orders of the terms of the derived series.
pub fn derived_orders<G: GroupLaw>(
    law: &G,
    generators: &[G::Elem],
    cap: usize,
) -> Result<Vec<usize>> {
    Ok(derived_series(law, generators, cap)?
        .iter()
        .map(Subgroup::order)
        .collect())
}

/// Matrix groups over a finite field.
pub struct MatrixLaw {
    pub field: std::sync::Arc<crate::gf::GaloisField>,
    pub dim: usize,
}

impl GroupLaw for MatrixLaw {
    type Elem = crate::matrix::Matrix;

    fn identity(&self) -> Self::Elem {
        crate::matrix::Matrix::identity(self.dim)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.mul(b, &self.field)
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        a.inverse(&self.field)
            .expect("group elements are invertible")
    }
}

/// The extraspecial group law.
impl GroupLaw for crate::extraspecial::ExtraspecialGroup {
    type Elem = crate::extraspecial::ExtraspecialElement;

    fn identity(&self) -> Self::Elem {
        crate::extraspecial::ExtraspecialGroup::identity(self)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        crate::extraspecial::ExtraspecialGroup::mul(self, a, b)
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        self.inverse(a)
    }
}
