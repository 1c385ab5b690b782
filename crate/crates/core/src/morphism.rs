//! Linear and multiplicative maps between materialized algebras.

use std::sync::Arc;

use crate::algebra::{tensor_power, Algebra};
use crate::error::Error;
use crate::linalg::{Echelon, SparseVec};

/// A degree-preserving linear map, one image per source basis element.
#[derive(Clone, Debug)]
pub struct LinearMap {
    name: String,
    source: Arc<Algebra>,
    target: Arc<Algebra>,
    images: Vec<SparseVec>,
}

impl LinearMap {
    pub fn new(
        name: impl Into<String>,
        source: &Arc<Algebra>,
        target: &Arc<Algebra>,
        images: Vec<SparseVec>,
    ) -> Result<LinearMap, Error> {
        if images.len() != source.dim() {
            return Err(Error::mismatch(format!(
                "map needs {} images, got {}",
                source.dim(),
                images.len()
            )));
        }
        for (i, v) in images.iter().enumerate() {
            match target.basis().degree_of(v)? {
                Some(deg) if deg != source.degree(i) => {
                    return Err(Error::mismatch(format!(
                        "image of {} has degree {deg}, expected {}",
                        source.basis().name(i),
                        source.degree(i)
                    )));
                }
                _ => {}
            }
        }
        Ok(LinearMap {
            name: name.into(),
            source: Arc::clone(source),
            target: Arc::clone(target),
            images,
        })
    }

    pub fn identity(a: &Arc<Algebra>) -> LinearMap {
        LinearMap {
            name: "id".to_string(),
            source: Arc::clone(a),
            target: Arc::clone(a),
            images: (0..a.dim()).map(SparseVec::unit).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<Algebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Algebra> {
        &self.target
    }

    pub fn image_of(&self, i: usize) -> &SparseVec {
        &self.images[i]
    }

    pub fn images(&self) -> &[SparseVec] {
        &self.images
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (i, c) in v.iter() {
            out.add_scaled(&self.images[i], c);
        }
        out
    }

    /// `self` after `inner`: the composite `self(inner(x))`.
    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap, Error> {
        if !compatible(&inner.target, &self.source) {
            return Err(Error::mismatch(format!(
                "cannot compose `{}` after `{}`: middle algebras differ",
                self.name, inner.name
            )));
        }
        Ok(LinearMap {
            name: format!("{}∘{}", self.name, inner.name),
            source: Arc::clone(&inner.source),
            target: Arc::clone(&self.target),
            images: inner.images.iter().map(|v| self.apply(v)).collect(),
        })
    }

    pub fn equals(&self, other: &LinearMap) -> bool {
        compatible(&self.source, &other.source)
            && compatible(&self.target, &other.target)
            && self.images == other.images
    }

    /// Rank of the degree-`k` block.
    pub fn rank_in_degree(&self, k: u32) -> usize {
        let mut ech = Echelon::new();
        for &i in self.source.basis().indices_in(k) {
            ech.insert(self.images[i].clone());
        }
        ech.rank()
    }

    pub fn is_surjective_in_degree(&self, k: u32) -> bool {
        self.rank_in_degree(k) == self.target.basis().dim_in(k)
    }

    pub fn is_injective_in_degree(&self, k: u32) -> bool {
        self.rank_in_degree(k) == self.source.basis().dim_in(k)
    }
}

fn compatible(a: &Arc<Algebra>, b: &Arc<Algebra>) -> bool {
    Arc::ptr_eq(a, b) || (a.name() == b.name() && a.dim() == b.dim() && a.top() == b.top())
}

/// What [`Morphism::validated`] demands beyond linearity.
#[derive(Clone, Copy, Debug)]
pub struct MorphismChecks {
    /// `f(xy) = f(x) f(y)` on all representable basis pairs.
    pub multiplicative: bool,
    /// `f(dx) = d f(x)` wherever both sides are representable.
    pub chain: bool,
    /// `f(1) = 1`.
    pub unital: bool,
}

impl Default for MorphismChecks {
    fn default() -> Self {
        MorphismChecks {
            multiplicative: true,
            chain: true,
            unital: true,
        }
    }
}

/// A validated CDGA morphism, optionally carrying a (validated) section.
#[derive(Clone, Debug)]
pub struct Morphism {
    map: LinearMap,
    section: Option<Box<Morphism>>,
}

impl Morphism {
    /// Validate `map` as a CDGA morphism. Multiplicativity and the chain
    /// condition are checked on every basis pair (resp. element) whose
    /// product (resp. differential) is representable on both sides; a
    /// truncated target materialized below a truncated source is rejected
    /// up front. Pairs beyond a truncated side's materialization are out of
    /// certification scope by the same rule as every other bounded check.
    pub fn validated(map: LinearMap, checks: MorphismChecks) -> Result<Morphism, Error> {
        let src = &map.source;
        let tgt = &map.target;
        if !tgt.is_complete() && !src.is_complete() && tgt.top() < src.top() {
            return Err(Error::mismatch(format!(
                "target `{}` is materialized to degree {}, below the source's {}",
                tgt.name(),
                tgt.top(),
                src.top()
            )));
        }
        if checks.unital {
            let img = map.image_of(src.unit_index());
            if *img != tgt.unit_elem() {
                return Err(Error::Validation(format!(
                    "`{}` does not send the unit to the unit",
                    map.name
                )));
            }
        }
        if checks.multiplicative {
            for i in 0..src.dim() {
                for j in i..src.dim() {
                    let total = src.degree(i) + src.degree(j);
                    if (total > src.top() && !src.is_complete())
                        || (total > tgt.top() && !tgt.is_complete())
                    {
                        continue;
                    }
                    let lhs = map.apply(&src.mul_basis(i, j)?);
                    let rhs = tgt.mul(map.image_of(i), map.image_of(j))?;
                    if lhs != rhs {
                        return Err(Error::Validation(format!(
                            "`{}` is not multiplicative at {}*{}: images {} vs {}",
                            map.name,
                            src.basis().name(i),
                            src.basis().name(j),
                            tgt.render(&lhs),
                            tgt.render(&rhs)
                        )));
                    }
                }
            }
        }
        if checks.chain {
            for i in 0..src.dim() {
                let above = src.degree(i) + 1;
                if (above > src.top() && !src.is_complete())
                    || (above > tgt.top() && !tgt.is_complete())
                {
                    continue;
                }
                let lhs = map.apply(src.d_basis(i)?);
                let rhs = tgt.d_elem(map.image_of(i))?;
                if lhs != rhs {
                    return Err(Error::Validation(format!(
                        "`{}` does not commute with the differential at {}: {} vs {}",
                        map.name,
                        src.basis().name(i),
                        tgt.render(&lhs),
                        tgt.render(&rhs)
                    )));
                }
            }
        }
        Ok(Morphism { map, section: None })
    }

    /// Attach a section: a validated morphism `s` with `self ∘ s = id`.
    pub fn with_section(mut self, section: Morphism) -> Result<Morphism, Error> {
        if !compatible(&section.map.source, &self.map.target)
            || !compatible(&section.map.target, &self.map.source)
        {
            return Err(Error::mismatch(format!(
                "section of `{}` must run the other way",
                self.map.name
            )));
        }
        let composite = self.map.compose(&section.map)?;
        if !composite.equals(&LinearMap::identity(&self.map.target)) {
            return Err(Error::Validation(format!(
                "`{}` is not split by `{}`",
                self.map.name,
                section.map.name
            )));
        }
        self.section = Some(Box::new(section));
        Ok(self)
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn section(&self) -> Option<&Morphism> {
        self.section.as_deref()
    }

    pub fn name(&self) -> &str {
        &self.map.name
    }

    pub fn source(&self) -> &Arc<Algebra> {
        &self.map.source
    }

    pub fn target(&self) -> &Arc<Algebra> {
        &self.map.target
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        self.map.apply(v)
    }

    pub fn image_of(&self, i: usize) -> &SparseVec {
        self.map.image_of(i)
    }

    /// Surjective in every degree up to `limit`.
    pub fn is_surjective_up_to(&self, limit: u32) -> bool {
        (0..=limit.min(self.map.target.top())).all(|k| self.map.is_surjective_in_degree(k))
    }
}

/// The `m`-fold multiplication `a_1 (x) ... (x) a_m -> a_1 ... a_m` on the
/// left-associated tensor power. For `m = 1` this is the identity.
pub fn multiplication_morphism(a: &Arc<Algebra>, m: u32) -> Result<Morphism, Error> {
    assert!(m >= 1);
    let power = tensor_power(a, m);
    multiplication_onto(&power, a)
}

/// The multiplication morphism from an already-built left-nested tensor
/// power of `a` (recognized by pointer identity, so an `a` that happens to
/// be a tensor product itself is never unfolded).
pub fn multiplication_onto(power: &Arc<Algebra>, a: &Arc<Algebra>) -> Result<Morphism, Error> {
    let mut images = Vec::with_capacity(power.dim());
    for i in 0..power.dim() {
        images.push(collapse(power, a, i)?);
    }
    let map = LinearMap::new("μ", power, a, images)?;
    Morphism::validated(map, MorphismChecks::default())
}

/// Multiply out one basis element of a left-nested tensor power of `a`.
fn collapse(t: &Arc<Algebra>, a: &Arc<Algebra>, i: usize) -> Result<SparseVec, Error> {
    if Arc::ptr_eq(t, a) {
        return Ok(SparseVec::unit(i));
    }
    let (left, _) = t
        .tensor_factors()
        .ok_or_else(|| Error::mismatch("not a tensor power of the target".to_string()))?;
    let (l, r) = t.tensor_pair(i).expect("tensor repr");
    let lv = collapse(&Arc::clone(left), a, l)?;
    a.mul(&lv, &SparseVec::unit(r))
}

/// The canonical strict section `a -> a (x) 1 (x) ... (x) 1` of the
/// multiplication morphism, landing in the left-nested `m`-fold power.
pub fn left_unit_section(a: &Arc<Algebra>, power: &Arc<Algebra>) -> Result<Morphism, Error> {
    let mut chain = Vec::new();
    let mut cur = Arc::clone(power);
    while !Arc::ptr_eq(&cur, a) {
        let (lf, _) = cur
            .tensor_factors()
            .map(|(l, r)| (Arc::clone(l), Arc::clone(r)))
            .ok_or_else(|| Error::mismatch("not a tensor power of the source".to_string()))?;
        chain.push(Arc::clone(&cur));
        cur = lf;
    }
    let mut images = Vec::with_capacity(a.dim());
    for i in 0..a.dim() {
        let mut idx = i;
        // Rebuild from the innermost left factor outward.
        for t in chain.iter().rev() {
            let (_, right) = t.tensor_factors().expect("tensor repr");
            idx = t
                .tensor_index(idx, right.unit_index())
                .ok_or_else(|| Error::mismatch("section image not materialized".to_string()))?;
        }
        images.push(SparseVec::unit(idx));
    }
    let map = LinearMap::new("σ", a, power, images)?;
    Morphism::validated(map, MorphismChecks::default())
}
