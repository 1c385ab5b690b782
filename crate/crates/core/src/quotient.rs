//! Quotients of algebras by differential graded ideals.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Algebra, TableSpec};
use crate::basis::BasisElement;
use crate::error::Error;
use crate::ideal::GradedIdeal;
use crate::linalg::SparseVec;
use crate::morphism::{LinearMap, Morphism};

/// `A / I` as a structure-constant algebra together with the projection.
///
/// Classes are represented by the basis elements of `A` in non-pivot
/// coordinates of the degreewise reduced spans of `I`; reducing any product
/// against those spans lands back in representative coordinates, which is
/// what the product table stores. The projection's kernel is checked to be
/// exactly `I` before returning.
pub fn quotient_algebra(
    a: &Arc<Algebra>,
    ideal: &GradedIdeal,
    name: impl Into<String>,
) -> Result<(Arc<Algebra>, Morphism), Error> {
    if ideal.ambient().dim() != a.dim() || ideal.ambient().name() != a.name() {
        return Err(Error::mismatch(
            "ideal lives in a different algebra".to_string(),
        ));
    }
    if !ideal.is_differential()? {
        return Err(Error::invalid(
            "cannot divide by a subspace that is not closed under d".to_string(),
        ));
    }
    if ideal.contains(&a.unit_elem())? {
        return Err(Error::invalid("the ideal contains the unit".to_string()));
    }

    // Representatives: basis elements away from the pivots, degree by degree.
    let mut reps: Vec<usize> = Vec::new();
    for deg in a.basis().degrees() {
        let pivots: Vec<usize> = ideal
            .span_in(deg)
            .map(|e| e.pivots().collect())
            .unwrap_or_default();
        for &i in a.basis().indices_in(deg) {
            if !pivots.contains(&i) {
                reps.push(i);
            }
        }
    }
    let class_index: BTreeMap<usize, usize> =
        reps.iter().enumerate().map(|(q, &i)| (i, q)).collect();

    let reduce = |v: &SparseVec| -> SparseVec {
        let mut out = SparseVec::zero();
        // Degreewise reduction; v may be inhomogeneous only transiently.
        let mut by_degree: BTreeMap<u32, SparseVec> = BTreeMap::new();
        for (i, c) in v.iter() {
            by_degree
                .entry(a.degree(i))
                .or_default()
                .add_term(i, c.clone());
        }
        for (deg, part) in by_degree {
            let reduced = match ideal.span_in(deg) {
                Some(e) => e.reduce(&part),
                None => part,
            };
            out = out.add(&reduced);
        }
        out
    };
    let to_classes = |v: &SparseVec| -> SparseVec {
        v.map_indices(|i| {
            *class_index
                .get(&i)
                .expect("reduced vectors live in representative coordinates")
        })
    };

    let elements: Vec<BasisElement> = reps
        .iter()
        .map(|&i| BasisElement {
            name: a.basis().name(i).to_string(),
            degree: a.degree(i),
        })
        .collect();

    let mut spec = TableSpec {
        name: name.into(),
        elements,
        unit: a.basis().name(a.unit_index()).to_string(),
        products: Vec::new(),
        differentials: Vec::new(),
    };

    let named = |v: &SparseVec| -> Vec<(crate::scalar::Scalar, String)> {
        v.iter()
            .map(|(i, c)| (c.clone(), a.basis().name(i).to_string()))
            .collect()
    };

    for (qi, &i) in reps.iter().enumerate() {
        for &j in reps.iter().skip(qi) {
            if a.degree(i) + a.degree(j) > a.top() {
                continue;
            }
            let p = reduce(&a.mul_basis(i, j)?);
            if !p.is_zero() {
                spec.products.push((
                    a.basis().name(i).to_string(),
                    a.basis().name(j).to_string(),
                    named(&p),
                ));
            }
        }
        if a.is_complete() || a.degree(i) + 1 <= a.top() {
            let dv = reduce(a.d_basis(i)?);
            if !dv.is_zero() {
                spec.differentials
                    .push((a.basis().name(i).to_string(), named(&dv)));
            }
        }
    }

    // The quotient of a truncated algebra is itself truncated; TableSpec
    // builds complete tables, so patch the flag via a tensor-free rebuild.
    let table = spec.build()?;
    let q = if a.is_complete() {
        table
    } else {
        rebuild_truncated(&table, a.top())
    };

    let images: Vec<SparseVec> = (0..a.dim())
        .map(|i| to_classes(&reduce(&SparseVec::unit(i))))
        .collect();
    let proj = LinearMap::new(format!("{}→{}", a.name(), q.name()), a, &q, images)?;
    let proj = Morphism::validated(
        proj,
        crate::morphism::MorphismChecks {
            multiplicative: true,
            chain: true,
            unital: true,
        },
    )?;

    // The kernel of the projection must reproduce the ideal exactly.
    let kernel = GradedIdeal::kernel(&proj);
    if !kernel.same_span(ideal) {
        return Err(Error::invalid(
            "projection kernel deviates from the ideal; the spans are not degreewise complete"
                .to_string(),
        ));
    }

    Ok((q, proj))
}

/// Clone a freshly built table with completeness dropped and the bound set
/// to `top`.
fn rebuild_truncated(table: &Arc<Algebra>, top: u32) -> Arc<Algebra> {
    crate::algebra::rebuild_table_truncated(table, top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::table::test_fixtures::projective;
    use crate::algebra::tensor_power;
    use crate::ideal::nil;
    use crate::morphism::multiplication_morphism;

    #[test]
    fn truncated_polynomial_quotient() {
        // cp3 / (ideal generated by x^2) has basis 1, x: the cp1 table.
        let cp3 = projective(3);
        let x2 = cp3.elem("x^2").unwrap();
        let (ideal, cov) = GradedIdeal::generated_by(&cp3, vec![x2]).unwrap();
        assert!(cov.is_exact());
        let (q, proj) = quotient_algebra(&cp3, &ideal, "cp3/(x^2)").unwrap();
        assert_eq!(q.dim(), 2);
        assert_eq!(q.max_degree(), 2);
        let x = cp3.elem("x").unwrap();
        let qx = proj.apply(&x);
        assert_eq!(qx, q.elem("x").unwrap());
        assert!(q.mul(&qx, &qx).unwrap().is_zero());
        assert!(proj.apply(&cp3.elem("x^3").unwrap()).is_zero());
    }

    #[test]
    fn sphere_square_mod_kernel_square() {
        // For A = H(S^3): (A (x) A) / (ker mu)^2 has dimension 4: the square
        // of the kernel is zero, so the quotient is everything.
        let s3 = crate::algebra::table::test_fixtures::sphere(3);
        let mu = multiplication_morphism(&s3, 2).unwrap();
        let k = GradedIdeal::kernel(&mu);
        let (k2, _) = k.power(2).unwrap();
        let t = tensor_power(&s3, 2);
        let (q, _) = quotient_algebra(&t, &k2, "t/k2").unwrap();
        assert_eq!(q.dim(), 4);

        // For A = H(S^2) the kernel square is spanned by x(x)x, so the
        // 4-dimensional square drops to 3.
        let s2 = crate::algebra::table::test_fixtures::sphere(2);
        let mu2 = multiplication_morphism(&s2, 2).unwrap();
        let kk = GradedIdeal::kernel(&mu2);
        let (kk2, _) = kk.power(2).unwrap();
        let t2 = tensor_power(&s2, 2);
        assert_eq!(t2.dim(), 4);
        let (q2, proj2) = quotient_algebra(&t2, &kk2, "t2/k2").unwrap();
        assert_eq!(q2.dim(), 3);
        // In the quotient, (1(x)x - x(x)1)^2 = 0: the class of x(x)x dies.
        let bar = t2.elem("1⊗x").unwrap().sub(&t2.elem("x⊗1").unwrap());
        let qbar = proj2.apply(&bar);
        assert!(q2.mul(&qbar, &qbar).unwrap().is_zero());
        // And its kernel ideal in the quotient is nilpotent of index 1.
        let kq = GradedIdeal::from_spanning(&q2, vec![qbar]).unwrap();
        assert_eq!(nil(&kq).unwrap().value, 1);
    }
}
