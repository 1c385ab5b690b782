//! Graded-commutative differential algebras over Q, materialized degreewise.
//!
//! One concrete type, [`Algebra`], covers the four representations the crate
//! works with:
//!
//! * explicit structure-constant tables ([`TableSpec`]),
//! * truncated free graded-commutative algebras ([`FreeSpec`]),
//! * tensor products of two algebras ([`tensor`]),
//! * semifree extensions `base (x) Lambda(W)` ([`ExtensionSpec`]).
//!
//! Every algebra carries a materialization bound `top`. A *complete* algebra
//! is genuinely zero above `top`; a truncated one is unknown there, and any
//! product or differential that would land above `top` is a hard
//! [`Error::DegreeOverflow`], never silently zero.
//!
//! Sign conventions, fixed once for the whole crate:
//! `(a (x) b)(c (x) d) = (-1)^{|b||c|} (ac (x) bd)` and
//! `d(a (x) b) = da (x) b + (-1)^{|a|} a (x) db`.

pub(crate) mod extension;
pub(crate) mod free;
pub(crate) mod table;
pub(crate) mod tensor;
pub(crate) mod validate;

pub use extension::ExtensionSpec;
pub use free::{FreeSpec, MonoSet};
pub use table::TableSpec;
pub use tensor::{tensor, tensor_power};
pub use validate::{validate_algebra, ValidationReport, Violation};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::basis::GradedBasis;
use crate::error::Error;
use crate::linalg::SparseVec;
use crate::scalar::{self, Scalar};

/// A generator of a free or semifree algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

#[derive(Clone, Debug)]
pub(crate) struct TableData {
    /// Products for index pairs `i <= j`; missing pairs are zero.
    pub products: BTreeMap<(usize, usize), SparseVec>,
}

#[derive(Clone, Debug)]
pub(crate) struct FreeData {
    pub gens: Vec<Generator>,
    pub monos: MonoSet,
    /// `basis index -> monomial index` (identical ordering, kept explicit).
    pub mono_of: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct TensorData {
    pub left: Arc<Algebra>,
    pub right: Arc<Algebra>,
    pub pairs: Vec<(usize, usize)>,
    pub index: BTreeMap<(usize, usize), usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct ExtData {
    pub base: Arc<Algebra>,
    pub gens: Vec<Generator>,
    /// Differential of each generator, over this algebra's basis.
    pub gen_d: Vec<SparseVec>,
    pub monos: MonoSet,
    /// `basis index -> (base index, monomial index)`.
    pub pairs: Vec<(usize, usize)>,
    pub index: BTreeMap<(usize, usize), usize>,
}

#[derive(Clone, Debug)]
pub(crate) enum Repr {
    Table(TableData),
    Free(FreeData),
    Tensor(TensorData),
    Extension(ExtData),
}

/// A materialized graded-commutative differential algebra over Q.
#[derive(Clone, Debug)]
pub struct Algebra {
    name: String,
    basis: GradedBasis,
    unit: usize,
    top: u32,
    complete: bool,
    /// Differential per basis element. Entries of degree `top` in a
    /// truncated algebra are not representable and gated by [`Algebra::d_basis`].
    d: Vec<SparseVec>,
    repr: Repr,
}

impl Algebra {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn unit_elem(&self) -> SparseVec {
        SparseVec::unit(self.unit)
    }

    /// Highest materialized degree.
    pub fn top(&self) -> u32 {
        self.top
    }

    /// True when the algebra is genuinely zero above [`Algebra::top`]; false
    /// when degrees above `top` are unknown (truncation).
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn degree(&self, index: usize) -> u32 {
        self.basis.degree(index)
    }

    pub fn is_table(&self) -> bool {
        matches!(self.repr, Repr::Table(_))
    }

    /// Generators when the algebra is free or a semifree extension.
    pub fn generators(&self) -> Option<&[Generator]> {
        match &self.repr {
            Repr::Free(f) => Some(&f.gens),
            Repr::Extension(e) => Some(&e.gens),
            _ => None,
        }
    }

    /// For a free algebra: the exponent word of a basis monomial, indexed
    /// like `generators()`.
    pub fn monomial_exponents(&self, index: usize) -> Option<&[u32]> {
        match &self.repr {
            Repr::Free(f) => Some(f.monos.exponents(f.mono_of[index])),
            _ => None,
        }
    }

    /// For a semifree extension: the base algebra.
    pub fn extension_base(&self) -> Option<&Arc<Algebra>> {
        match &self.repr {
            Repr::Extension(e) => Some(&e.base),
            _ => None,
        }
    }

    /// For a semifree extension: `(base index, monomial exponents)` of a
    /// basis element, exponents over the adjoined generators.
    pub fn extension_pair(&self, index: usize) -> Option<(usize, &[u32])> {
        match &self.repr {
            Repr::Extension(e) => {
                let (b, m) = e.pairs[index];
                Some((b, e.monos.exponents(m)))
            }
            _ => None,
        }
    }

    /// For a semifree extension: basis index of `(base, exponents)`.
    pub fn extension_index(&self, base: usize, exponents: &[u32]) -> Option<usize> {
        match &self.repr {
            Repr::Extension(e) => {
                let m = e.monos.index_of(exponents)?;
                e.index.get(&(base, m)).copied()
            }
            _ => None,
        }
    }

    /// For a semifree extension: true when the basis element has a
    /// nontrivial generator part (lies in `base (x) Lambda^+ W`).
    pub fn has_positive_word(&self, index: usize) -> bool {
        match &self.repr {
            Repr::Extension(e) => e.pairs[index].1 != 0,
            _ => false,
        }
    }

    /// For a semifree extension: differential of adjoined generator `k`.
    pub fn extension_gen_d(&self, k: usize) -> Option<&SparseVec> {
        match &self.repr {
            Repr::Extension(e) => e.gen_d.get(k),
            _ => None,
        }
    }

    /// For a tensor product: the two factors.
    pub fn tensor_factors(&self) -> Option<(&Arc<Algebra>, &Arc<Algebra>)> {
        match &self.repr {
            Repr::Tensor(t) => Some((&t.left, &t.right)),
            _ => None,
        }
    }

    /// For a tensor product: `(left, right)` indices of a basis element.
    pub fn tensor_pair(&self, index: usize) -> Option<(usize, usize)> {
        match &self.repr {
            Repr::Tensor(t) => Some(t.pairs[index]),
            _ => None,
        }
    }

    /// For a tensor product: basis index of a factor pair.
    pub fn tensor_index(&self, left: usize, right: usize) -> Option<usize> {
        match &self.repr {
            Repr::Tensor(t) => t.index.get(&(left, right)).copied(),
            _ => None,
        }
    }

    pub(crate) fn overflow(&self, degree: u32) -> Error {
        Error::DegreeOverflow {
            algebra: self.name.clone(),
            degree,
            top: self.top,
        }
    }

    /// Product of two basis elements.
    pub fn mul_basis(&self, i: usize, j: usize) -> Result<SparseVec, Error> {
        let total = self.degree(i) + self.degree(j);
        if total > self.top {
            return if self.complete {
                Ok(SparseVec::zero())
            } else {
                // Structural zeros (odd squares) are zero in every degree.
                if self.product_is_structurally_zero(i, j) {
                    Ok(SparseVec::zero())
                } else {
                    Err(self.overflow(total))
                }
            };
        }
        match &self.repr {
            Repr::Table(t) => {
                let key = if i <= j { (i, j) } else { (j, i) };
                let stored = t.products.get(&key).cloned().unwrap_or_default();
                if i <= j {
                    Ok(stored)
                } else {
                    Ok(stored.scaled(&scalar::sign(self.degree(i) * self.degree(j))))
                }
            }
            Repr::Free(f) => {
                let Some((sign, expo)) = f.monos.mul(f.mono_of[i], f.mono_of[j]) else {
                    return Ok(SparseVec::zero());
                };
                let m = f
                    .monos
                    .index_of(&expo)
                    .expect("product monomial within materialized range");
                Ok(SparseVec::term(m, sign))
            }
            Repr::Tensor(t) => {
                let (l1, r1) = t.pairs[i];
                let (l2, r2) = t.pairs[j];
                let outer = scalar::sign(t.right.degree(r1) * t.left.degree(l2));
                let left = t.left.mul_basis(l1, l2)?;
                let right = t.right.mul_basis(r1, r2)?;
                let mut out = SparseVec::zero();
                for (li, lc) in left.iter() {
                    for (ri, rc) in right.iter() {
                        let idx = *t
                            .index
                            .get(&(li, ri))
                            .expect("tensor pair within materialized range");
                        out.add_term(idx, &outer * &(lc * rc));
                    }
                }
                Ok(out)
            }
            Repr::Extension(e) => {
                let (b1, m1) = e.pairs[i];
                let (b2, m2) = e.pairs[j];
                let Some((mono_sign, expo)) = e.monos.mul(m1, m2) else {
                    return Ok(SparseVec::zero());
                };
                let m = e
                    .monos
                    .index_of(&expo)
                    .expect("word product within materialized range");
                let outer = scalar::sign(e.monos.degree(m1) * e.base.degree(b2));
                let base = e.base.mul_basis(b1, b2)?;
                let mut out = SparseVec::zero();
                let c = &outer * &mono_sign;
                for (bi, bc) in base.iter() {
                    let idx = *e
                        .index
                        .get(&(bi, m))
                        .expect("extension pair within materialized range");
                    out.add_term(idx, &c * bc);
                }
                Ok(out)
            }
        }
    }

    /// True when the product of basis elements `i, j` vanishes for
    /// structural reasons (a repeated odd generator), independent of cutoff.
    fn product_is_structurally_zero(&self, i: usize, j: usize) -> bool {
        match &self.repr {
            Repr::Free(f) => f.monos.mul(f.mono_of[i], f.mono_of[j]).is_none(),
            Repr::Extension(e) => {
                let (b1, m1) = e.pairs[i];
                let (b2, m2) = e.pairs[j];
                match e.monos.mul(m1, m2) {
                    None => true,
                    Some(_) => {
                        let bt = e.base.degree(b1) + e.base.degree(b2);
                        bt > e.base.top() && e.base.product_is_structurally_zero(b1, b2)
                    }
                }
            }
            Repr::Tensor(t) => {
                let (l1, r1) = t.pairs[i];
                let (l2, r2) = t.pairs[j];
                let lt = t.left.degree(l1) + t.left.degree(l2);
                let rt = t.right.degree(r1) + t.right.degree(r2);
                (lt > t.left.top() && t.left.product_is_structurally_zero(l1, l2))
                    || (rt > t.right.top() && t.right.product_is_structurally_zero(r1, r2))
                    || (lt <= t.left.top()
                        && t.left
                            .mul_basis(l1, l2)
                            .map(|v| v.is_zero())
                            .unwrap_or(false))
                    || (rt <= t.right.top()
                        && t.right
                            .mul_basis(r1, r2)
                            .map(|v| v.is_zero())
                            .unwrap_or(false))
            }
            Repr::Table(_) => false,
        }
    }

    /// Product of two elements (bilinear expansion).
    pub fn mul(&self, u: &SparseVec, v: &SparseVec) -> Result<SparseVec, Error> {
        let mut out = SparseVec::zero();
        for (i, a) in u.iter() {
            for (j, b) in v.iter() {
                let p = self.mul_basis(i, j)?;
                if !p.is_zero() {
                    out.add_scaled(&p, &(a * b));
                }
            }
        }
        Ok(out)
    }

    /// Product of a list of elements, left to right.
    pub fn mul_many(&self, factors: &[SparseVec]) -> Result<SparseVec, Error> {
        let mut acc = self.unit_elem();
        for f in factors {
            acc = self.mul(&acc, f)?;
            if acc.is_zero() {
                return Ok(acc);
            }
        }
        Ok(acc)
    }

    /// Integer power of an element.
    pub fn pow(&self, u: &SparseVec, k: u32) -> Result<SparseVec, Error> {
        let mut acc = self.unit_elem();
        for _ in 0..k {
            acc = self.mul(&acc, u)?;
        }
        Ok(acc)
    }

    /// Differential of a basis element. For a truncated algebra the top
    /// degree has no representable differential.
    pub fn d_basis(&self, i: usize) -> Result<&SparseVec, Error> {
        if !self.complete && self.degree(i) >= self.top {
            return Err(self.overflow(self.degree(i) + 1));
        }
        Ok(&self.d[i])
    }

    /// Differential of an element.
    pub fn d_elem(&self, u: &SparseVec) -> Result<SparseVec, Error> {
        let mut out = SparseVec::zero();
        for (i, c) in u.iter() {
            out.add_scaled(self.d_basis(i)?, c);
        }
        Ok(out)
    }

    /// True when the differential vanishes on every representable element.
    pub fn has_zero_differential(&self) -> bool {
        self.d.iter().all(SparseVec::is_zero)
    }

    /// Element with coefficient 1 on the named basis element.
    pub fn elem(&self, name: &str) -> Result<SparseVec, Error> {
        self.basis
            .index_of(name)
            .map(SparseVec::unit)
            .ok_or_else(|| Error::invalid(format!("no basis element `{name}` in `{}`", self.name)))
    }

    pub fn render(&self, v: &SparseVec) -> String {
        self.basis.render(v)
    }

    /// Highest degree with a nonzero basis element (0 for the zero-positive
    /// part algebra Q).
    pub fn max_degree(&self) -> u32 {
        self.basis.max_degree()
    }

    pub(crate) fn assemble(
        name: String,
        basis: GradedBasis,
        unit: usize,
        top: u32,
        complete: bool,
        d: Vec<SparseVec>,
        repr: Repr,
    ) -> Arc<Algebra> {
        Arc::new(Algebra {
            name,
            basis,
            unit,
            top,
            complete,
            d,
            repr,
        })
    }
}

/// Reinterpret a freshly built complete table as a truncation: identical
/// structure constants, but products and differentials above `top` count as
/// unknown rather than zero. Used for quotients of truncated algebras,
/// whose ring structure is exact only inside the materialized range.
pub(crate) fn rebuild_table_truncated(table: &Arc<Algebra>, top: u32) -> Arc<Algebra> {
    debug_assert!(table.is_table() && table.complete && top >= table.top);
    let mut a = (**table).clone();
    a.top = top;
    a.complete = false;
    Arc::new(a)
}

/// A polynomial in named generators: a sum of `(coefficient, exponents)`
/// terms. Used to describe differentials when building free algebras.
pub type GenPolynomial = Vec<(Scalar, Vec<u32>)>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn sphere_table_products_and_unit() {
        let a = crate::algebra::table::test_fixtures::sphere(3);
        assert_eq!(a.dim(), 2);
        assert!(a.is_complete());
        let one = a.unit_elem();
        let y = a.elem("y").unwrap();
        assert_eq!(a.mul(&one, &y).unwrap(), y);
        assert!(a.mul(&y, &y).unwrap().is_zero());
    }

    #[test]
    fn graded_commutativity_signs_in_tensor_square() {
        // (1 (x) y)(y (x) 1) = -(y (x) y) for |y| = 3.
        let s3 = crate::algebra::table::test_fixtures::sphere(3);
        let t = tensor(&s3, &s3);
        let y1 = t.elem("y⊗1").unwrap();
        let y2 = t.elem("1⊗y").unwrap();
        let p = t.mul(&y2, &y1).unwrap();
        let yy = t.elem("y⊗y").unwrap();
        assert_eq!(p, yy.scaled(&int(-1)));
        let q = t.mul(&y1, &y2).unwrap();
        assert_eq!(q, yy);
        // Odd square vanishes even for the sum.
        let s = y1.add(&y2);
        assert!(t.mul(&s, &s).unwrap().is_zero());
    }

    #[test]
    fn even_tensor_square_sign() {
        // For |x| = 2: (1 (x) x)(x (x) 1) = +(x (x) x).
        let s2 = crate::algebra::table::test_fixtures::sphere(2);
        let t = tensor(&s2, &s2);
        let x1 = t.elem("x⊗1").unwrap();
        let x2 = t.elem("1⊗x").unwrap();
        assert_eq!(t.mul(&x2, &x1).unwrap(), t.elem("x⊗x").unwrap());
        let bar = x2.sub(&x1);
        let sq = t.mul(&bar, &bar).unwrap();
        assert_eq!(sq, t.elem("x⊗x").unwrap().scaled(&int(-2)));
    }

    #[test]
    fn truncated_product_overflow_is_an_error() {
        let m = crate::algebra::free::test_fixtures::even_sphere_model(2, 8);
        let x = m.elem("x").unwrap();
        let x4 = m.pow(&x, 4).unwrap();
        assert_eq!(m.basis().degree_of(&x4).unwrap(), Some(8));
        match m.mul(&x4, &x) {
            Err(Error::DegreeOverflow { degree, top, .. }) => {
                assert_eq!(degree, 10);
                assert_eq!(top, 8);
            }
            other => panic!("expected overflow, got {other:?}"),
        }
        // Odd square is structurally zero even above the cutoff.
        let m9 = crate::algebra::free::test_fixtures::even_sphere_model(2, 9);
        let y = m9.elem("y").unwrap();
        let x9 = m9.elem("x").unwrap();
        let x3y = m9
            .mul(&x9, &m9.mul(&m9.pow(&x9, 2).unwrap(), &y).unwrap())
            .unwrap();
        assert_eq!(m9.basis().degree_of(&x3y).unwrap(), Some(9));
        assert!(m9.mul(&x3y, &y).unwrap().is_zero());
    }
}
