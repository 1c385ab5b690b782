//! Axiom checking for materialized algebras.

use std::sync::Arc;

use crate::error::Error;
use crate::linalg::SparseVec;
use crate::scalar;

use super::Algebra;

/// One failed axiom instance, with a rendered witness.
#[derive(Clone, Debug)]
pub struct Violation {
    pub axiom: &'static str,
    pub witness: String,
}

/// Outcome of [`validate_algebra`]. Empty means every checked instance of
/// every axiom held.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Number of (pair, triple, element) instances actually checked.
    pub checked_products: usize,
    pub checked_triples: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check graded commutativity, associativity, the unit law, homogeneity of
/// products, the Leibniz rule, and `d(d(x)) = 0` on every representable
/// instance.
///
/// Associativity over all triples is cubic in the dimension; it is what
/// makes user-supplied tables trustworthy and is kept exhaustive.
pub fn validate_algebra(a: &Arc<Algebra>) -> Result<ValidationReport, Error> {
    let mut report = ValidationReport::default();
    let n = a.dim();
    let push = |axiom: &'static str, witness: String, report: &mut ValidationReport| {
        if report.violations.len() < 32 {
            report.violations.push(Violation { axiom, witness });
        }
    };

    // Unit law.
    for i in 0..n {
        let e = SparseVec::unit(i);
        let p = a.mul(&a.unit_elem(), &e)?;
        if p != e {
            push(
                "unit",
                format!("1*{} = {}", a.basis().name(i), a.render(&p)),
                &mut report,
            );
        }
    }
    // d(1) = 0 comes with the Leibniz rule but is worth a direct witness.
    if !a.d_basis(a.unit_index())?.is_zero() {
        push("unit-differential", "d(1) != 0".to_string(), &mut report);
    }

    let representable = |i: usize, j: usize| a.degree(i) + a.degree(j) <= a.top() || a.is_complete();

    for i in 0..n {
        for j in i..n {
            if !representable(i, j) {
                continue;
            }
            report.checked_products += 1;
            let ij = a.mul_basis(i, j)?;
            // Homogeneity.
            match a.basis().degree_of(&ij) {
                Ok(Some(deg)) if deg != a.degree(i) + a.degree(j) => push(
                    "degree-additivity",
                    format!(
                        "{}*{} lands in degree {deg}",
                        a.basis().name(i),
                        a.basis().name(j)
                    ),
                    &mut report,
                ),
                Err(_) => push(
                    "degree-additivity",
                    format!(
                        "{}*{} is inhomogeneous",
                        a.basis().name(i),
                        a.basis().name(j)
                    ),
                    &mut report,
                ),
                _ => {}
            }
            // Graded commutativity.
            let ji = a.mul_basis(j, i)?;
            let expect = ij.scaled(&scalar::sign(a.degree(i) * a.degree(j)));
            if ji != expect {
                push(
                    "graded-commutativity",
                    format!(
                        "{}*{} = {} but {}*{} = {}",
                        a.basis().name(i),
                        a.basis().name(j),
                        a.render(&ij),
                        a.basis().name(j),
                        a.basis().name(i),
                        a.render(&ji)
                    ),
                    &mut report,
                );
            }
        }
    }

    // Associativity on all representable triples.
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let total = a.degree(i) + a.degree(j) + a.degree(k);
                if total > a.top() && !a.is_complete() {
                    continue;
                }
                report.checked_triples += 1;
                let left = a.mul(&a.mul_basis(i, j)?, &SparseVec::unit(k))?;
                let right = a.mul(&SparseVec::unit(i), &a.mul_basis(j, k)?)?;
                if left != right {
                    push(
                        "associativity",
                        format!(
                            "({}*{})*{} = {} but {}*({}*{}) = {}",
                            a.basis().name(i),
                            a.basis().name(j),
                            a.basis().name(k),
                            a.render(&left),
                            a.basis().name(i),
                            a.basis().name(j),
                            a.basis().name(k),
                            a.render(&right)
                        ),
                        &mut report,
                    );
                }
            }
        }
    }

    // Differential: degree +1, Leibniz, square zero.
    let d_ok = |i: usize| a.is_complete() || a.degree(i) + 1 <= a.top();
    for i in 0..n {
        if !d_ok(i) {
            continue;
        }
        let di = a.d_basis(i)?;
        match a.basis().degree_of(di) {
            Ok(Some(deg)) if deg != a.degree(i) + 1 => push(
                "differential-degree",
                format!("d({}) lands in degree {deg}", a.basis().name(i)),
                &mut report,
            ),
            Err(_) => push(
                "differential-degree",
                format!("d({}) is inhomogeneous", a.basis().name(i)),
                &mut report,
            ),
            _ => {}
        }
        if a.is_complete() || a.degree(i) + 2 <= a.top() {
            let dd = a.d_elem(di)?;
            if !dd.is_zero() {
                push(
                    "d-squared",
                    format!("d(d({})) = {}", a.basis().name(i), a.render(&dd)),
                    &mut report,
                );
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let total = a.degree(i) + a.degree(j);
            if !(a.is_complete() || total + 1 <= a.top()) {
                continue;
            }
            let lhs = a.d_elem(&a.mul_basis(i, j)?)?;
            let mut rhs = a.mul(a.d_basis(i)?, &SparseVec::unit(j))?;
            let tail = a.mul(&SparseVec::unit(i), a.d_basis(j)?)?;
            rhs.add_scaled(&tail, &scalar::sign(a.degree(i)));
            if lhs != rhs {
                push(
                    "leibniz",
                    format!(
                        "d({}*{}) = {} but the Leibniz expansion is {}",
                        a.basis().name(i),
                        a.basis().name(j),
                        a.render(&lhs),
                        a.render(&rhs)
                    ),
                    &mut report,
                );
            }
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::table::test_fixtures::{projective, sphere};
    use crate::algebra::TableSpec;
    use crate::basis::BasisElement;
    use crate::scalar::int;

    #[test]
    fn good_algebras_validate() {
        for a in [sphere(2), sphere(3), projective(3)] {
            let r = validate_algebra(&a).unwrap();
            assert!(r.is_valid(), "{:?}", r.violations);
            assert!(r.checked_products > 0);
        }
        let free = crate::algebra::free::test_fixtures::even_sphere_model(2, 8);
        assert!(validate_algebra(&free).unwrap().is_valid());
    }

    #[test]
    fn broken_associativity_is_caught_with_witness() {
        // (u*v)*v = 0 but u*(v*v) = u*w = t.
        let a = TableSpec {
            name: "assoc-broken".into(),
            elements: vec![
                BasisElement { name: "1".into(), degree: 0 },
                BasisElement { name: "u".into(), degree: 2 },
                BasisElement { name: "v".into(), degree: 2 },
                BasisElement { name: "w".into(), degree: 4 },
                BasisElement { name: "t".into(), degree: 6 },
            ],
            unit: "1".into(),
            products: vec![
                ("u".into(), "u".into(), vec![(int(1), "w".into())]),
                ("v".into(), "v".into(), vec![(int(1), "w".into())]),
                ("u".into(), "w".into(), vec![(int(1), "t".into())]),
            ],
            differentials: vec![],
        }
        .build()
        .unwrap();
        let r = validate_algebra(&a).unwrap();
        assert!(!r.is_valid());
        assert!(r.violations.iter().any(|v| v.axiom == "associativity"));
    }

    #[test]
    fn broken_leibniz_is_caught() {
        // d(x) = u with x*x = y, d(y) = 0; Leibniz wants d(y) = 2xu.
        let a = TableSpec {
            name: "leibniz-broken".into(),
            elements: vec![
                BasisElement { name: "1".into(), degree: 0 },
                BasisElement { name: "x".into(), degree: 2 },
                BasisElement { name: "u".into(), degree: 3 },
                BasisElement { name: "y".into(), degree: 4 },
                BasisElement { name: "xu".into(), degree: 5 },
            ],
            unit: "1".into(),
            products: vec![
                ("x".into(), "x".into(), vec![(int(1), "y".into())]),
                ("x".into(), "u".into(), vec![(int(1), "xu".into())]),
            ],
            differentials: vec![("x".into(), vec![(int(1), "u".into())])],
        }
        .build()
        .unwrap();
        let r = validate_algebra(&a).unwrap();
        assert!(r.violations.iter().any(|v| v.axiom == "leibniz"));
    }

    #[test]
    fn broken_commutativity_is_caught() {
        let a = TableSpec {
            name: "comm-broken".into(),
            elements: vec![
                BasisElement { name: "1".into(), degree: 0 },
                BasisElement { name: "u".into(), degree: 1 },
                BasisElement { name: "v".into(), degree: 1 },
                BasisElement { name: "w".into(), degree: 2 },
            ],
            unit: "1".into(),
            products: vec![
                // u*u = w breaks u^2 = 0 for odd u, i.e. commutativity.
                ("u".into(), "u".into(), vec![(int(1), "w".into())]),
            ],
            differentials: vec![],
        }
        .build()
        .unwrap();
        let r = validate_algebra(&a).unwrap();
        assert!(r.violations.iter().any(|v| v.axiom == "graded-commutativity"));
    }
}
