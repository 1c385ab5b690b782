//! Tensor products of materialized algebras.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::basis::{BasisElement, GradedBasis};
use crate::linalg::SparseVec;
use crate::scalar;

use super::{Algebra, Repr, TensorData};

/// Tensor product `left (x) right`.
///
/// When both factors are complete the result is complete with top
/// `left.top + right.top`. Otherwise the result is truncated at the smallest
/// truncated factor's top, which keeps every representable product of basis
/// elements computable inside the factors.
pub fn tensor(left: &Arc<Algebra>, right: &Arc<Algebra>) -> Arc<Algebra> {
    let complete = left.is_complete() && right.is_complete();
    let top = if complete {
        left.top() + right.top()
    } else {
        let mut t = u32::MAX;
        if !left.is_complete() {
            t = t.min(left.top());
        }
        if !right.is_complete() {
            t = t.min(right.top());
        }
        t
    };

    let mut pairs = Vec::new();
    for l in 0..left.dim() {
        for r in 0..right.dim() {
            if left.degree(l) + right.degree(r) <= top {
                pairs.push((l, r));
            }
        }
    }
    // GradedBasis re-sorts by degree; keep pair order (left-major) within a
    // degree by inserting in that order.
    pairs.sort_by_key(|&(l, r)| (left.degree(l) + right.degree(r), l, r));
    let elements: Vec<BasisElement> = pairs
        .iter()
        .map(|&(l, r)| BasisElement {
            name: format!("{}⊗{}", left.basis().name(l), right.basis().name(r)),
            degree: left.degree(l) + right.degree(r),
        })
        .collect();
    let basis = GradedBasis::new(elements).expect("tensor basis is well formed");
    let index: BTreeMap<(usize, usize), usize> = pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let unit = index[&(left.unit_index(), right.unit_index())];

    // d(a (x) b) = da (x) b + (-1)^{|a|} a (x) db, degree-gated like
    // everything else.
    let mut d = vec![SparseVec::zero(); pairs.len()];
    for (i, &(l, r)) in pairs.iter().enumerate() {
        let deg = left.degree(l) + right.degree(r);
        if !complete && deg >= top {
            continue;
        }
        let mut v = SparseVec::zero();
        let dl = left.d_basis(l).expect("factor differential representable");
        for (t, c) in dl.iter() {
            v.add_term(index[&(t, r)], c.clone());
        }
        let sign = scalar::sign(left.degree(l));
        let dr = right.d_basis(r).expect("factor differential representable");
        for (t, c) in dr.iter() {
            v.add_term(index[&(l, t)], &sign * c);
        }
        d[i] = v;
    }

    let name = format!("{}⊗{}", left.name(), right.name());
    Algebra::assemble(
        name,
        basis,
        unit,
        top,
        complete,
        d,
        Repr::Tensor(TensorData {
            left: Arc::clone(left),
            right: Arc::clone(right),
            pairs,
            index,
        }),
    )
}

/// Left-associated tensor power `a (x) ... (x) a` with `m` factors.
pub fn tensor_power(a: &Arc<Algebra>, m: u32) -> Arc<Algebra> {
    assert!(m >= 1, "tensor power needs at least one factor");
    let mut acc = Arc::clone(a);
    for _ in 1..m {
        acc = tensor(&acc, a);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::table::test_fixtures::{projective, sphere};

    #[test]
    fn kunneth_dimensions_for_sphere_square() {
        let s3 = sphere(3);
        let t = tensor(&s3, &s3);
        assert_eq!(t.dim(), 4);
        assert!(t.is_complete());
        assert_eq!(t.top(), 6);
        assert_eq!(t.basis().dim_in(0), 1);
        assert_eq!(t.basis().dim_in(3), 2);
        assert_eq!(t.basis().dim_in(6), 1);
    }

    #[test]
    fn triple_power_flattens_names() {
        let s2 = sphere(2);
        let t3 = tensor_power(&s2, 3);
        assert_eq!(t3.dim(), 8);
        assert!(t3.basis().index_of("x⊗1⊗x").is_some());
        assert!(t3.basis().index_of("1⊗1⊗1").is_some());
        assert_eq!(t3.unit_index(), t3.basis().index_of("1⊗1⊗1").unwrap());
    }

    #[test]
    fn tensor_differential_signs() {
        use crate::algebra::free::test_fixtures::even_sphere_model;
        let m = even_sphere_model(2, 8);
        let t = tensor(&m, &m);
        assert!(!t.is_complete());
        assert_eq!(t.top(), 8);
        // d(y (x) y) = x^2 (x) y - y (x) x^2 (first y odd).
        let yy = t.basis().index_of("y⊗y").unwrap();
        let d = t.d_basis(yy).unwrap();
        let expected = t
            .elem("x^2⊗y")
            .unwrap()
            .sub(&t.elem("y⊗x^2").unwrap());
        assert_eq!(*d, expected);
    }

    #[test]
    fn mixed_completeness_truncates_to_the_truncated_factor() {
        use crate::algebra::free::test_fixtures::even_sphere_model;
        let cp2 = projective(2);
        let m = even_sphere_model(2, 9);
        let t = tensor(&cp2, &m);
        assert!(!t.is_complete());
        assert_eq!(t.top(), 9);
    }
}
