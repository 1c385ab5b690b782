//! Algebras given by explicit bases and structure constants.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::basis::{BasisElement, GradedBasis};
use crate::error::Error;
use crate::linalg::SparseVec;
use crate::scalar::{self, Scalar};

use super::{Algebra, Repr, TableData};

/// Named linear combination: `(coefficient, basis name)` terms.
pub type NamedCombination = Vec<(Scalar, String)>;

/// Description of an algebra by structure constants.
///
/// Products not listed are zero, except products with the unit, which are
/// implied. Listing a pair in both orders is allowed when the two values
/// agree up to the graded-commutativity sign.
#[derive(Clone, Debug, Default)]
pub struct TableSpec {
    pub name: String,
    pub elements: Vec<BasisElement>,
    pub unit: String,
    pub products: Vec<(String, String, NamedCombination)>,
    pub differentials: Vec<(String, NamedCombination)>,
}

impl TableSpec {
    /// Resolve names, symmetrize, and assemble. Checks performed here are
    /// structural: name resolution, connectedness, homogeneity of every
    /// stored value. Algebra axioms are the validator's job.
    pub fn build(self) -> Result<Arc<Algebra>, Error> {
        let basis = GradedBasis::new(self.elements)?;
        let unit = basis
            .index_of(&self.unit)
            .ok_or_else(|| Error::invalid(format!("unit `{}` is not a basis element", self.unit)))?;
        if basis.degree(unit) != 0 {
            return Err(Error::invalid(format!(
                "unit `{}` must have degree 0",
                self.unit
            )));
        }
        if basis.dim_in(0) != 1 {
            return Err(Error::invalid(
                "connected algebra: degree 0 must be spanned by the unit alone".to_string(),
            ));
        }
        let top = basis.max_degree();

        let resolve = |name: &str| {
            basis
                .index_of(name)
                .ok_or_else(|| Error::invalid(format!("unknown basis element `{name}`")))
        };
        let resolve_combo = |combo: &NamedCombination| -> Result<SparseVec, Error> {
            let mut v = SparseVec::zero();
            for (c, name) in combo {
                v.add_term(resolve(name)?, c.clone());
            }
            Ok(v)
        };

        let mut products: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for (ln, rn, combo) in &self.products {
            let (i, j) = (resolve(ln)?, resolve(rn)?);
            let value = resolve_combo(combo)?;
            let total = basis.degree(i) + basis.degree(j);
            if let Some(deg) = basis.degree_of(&value)? {
                if deg != total {
                    return Err(Error::invalid(format!(
                        "product {ln}*{rn} has degree {deg}, expected {total}"
                    )));
                }
            }
            if i == unit || j == unit {
                let other = if i == unit { j } else { i };
                if value != SparseVec::unit(other) {
                    return Err(Error::invalid(format!(
                        "product {ln}*{rn} contradicts the unit law"
                    )));
                }
                continue;
            }
            // Store under sorted indices, with the Koszul sign when flipped.
            let (key, stored) = if i <= j {
                ((i, j), value)
            } else {
                (
                    (j, i),
                    value.scaled(&scalar::sign(basis.degree(i) * basis.degree(j))),
                )
            };
            if let Some(prev) = products.get(&key) {
                if *prev != stored {
                    return Err(Error::invalid(format!(
                        "conflicting values for the product {ln}*{rn}"
                    )));
                }
            } else {
                products.insert(key, stored);
            }
        }
        for i in 0..basis.dim() {
            products.insert((unit.min(i), unit.max(i)), SparseVec::unit(i));
        }
        products.retain(|_, v| !v.is_zero());

        let mut d: Vec<SparseVec> = vec![SparseVec::zero(); basis.dim()];
        for (name, combo) in &self.differentials {
            let i = resolve(name)?;
            let value = resolve_combo(combo)?;
            if let Some(deg) = basis.degree_of(&value)? {
                if deg != basis.degree(i) + 1 {
                    return Err(Error::invalid(format!(
                        "d({name}) has degree {deg}, expected {}",
                        basis.degree(i) + 1
                    )));
                }
            }
            d[i] = value;
        }

        Ok(Algebra::assemble(
            self.name,
            basis,
            unit,
            top,
            true,
            d,
            Repr::Table(TableData { products }),
        ))
    }
}

#[cfg(test)]
pub(crate) mod test_fixtures {
    use super::*;
    use crate::scalar::int;

    /// `H^*(S^n; Q)`: basis `1, y` with `y` in degree `n`, zero products.
    pub fn sphere(n: u32) -> Arc<Algebra> {
        let gen = if n % 2 == 0 { "x" } else { "y" };
        TableSpec {
            name: format!("s{n}"),
            elements: vec![
                BasisElement {
                    name: "1".into(),
                    degree: 0,
                },
                BasisElement {
                    name: gen.into(),
                    degree: n,
                },
            ],
            unit: "1".into(),
            products: vec![],
            differentials: vec![],
        }
        .build()
        .unwrap()
    }

    /// `H^*(CP^n; Q) = Q[x]/(x^{n+1})`, `|x| = 2`.
    pub fn projective(n: u32) -> Arc<Algebra> {
        let mut elements = vec![BasisElement {
            name: "1".into(),
            degree: 0,
        }];
        for k in 1..=n {
            elements.push(BasisElement {
                name: power_name(k),
                degree: 2 * k,
            });
        }
        let mut products = Vec::new();
        for a in 1..=n {
            for b in a..=n {
                if a + b <= n {
                    products.push((
                        power_name(a),
                        power_name(b),
                        vec![(int(1), power_name(a + b))],
                    ));
                }
            }
        }
        TableSpec {
            name: format!("cp{n}"),
            elements,
            unit: "1".into(),
            products,
            differentials: vec![],
        }
        .build()
        .unwrap()
    }

    fn power_name(k: u32) -> String {
        if k == 1 {
            "x".into()
        } else {
            format!("x^{k}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn projective_plane_products() {
        let cp2 = test_fixtures::projective(2);
        let x = cp2.elem("x").unwrap();
        let x2 = cp2.elem("x^2").unwrap();
        assert_eq!(cp2.mul(&x, &x).unwrap(), x2);
        assert!(cp2.mul(&x, &x2).unwrap().is_zero());
        assert!(cp2.is_complete());
        assert_eq!(cp2.top(), 4);
    }

    #[test]
    fn build_rejects_wrong_degree_product() {
        let bad = TableSpec {
            name: "bad".into(),
            elements: vec![
                BasisElement {
                    name: "1".into(),
                    degree: 0,
                },
                BasisElement {
                    name: "u".into(),
                    degree: 2,
                },
                BasisElement {
                    name: "v".into(),
                    degree: 3,
                },
            ],
            unit: "1".into(),
            products: vec![("u".into(), "u".into(), vec![(int(1), "v".into())])],
            differentials: vec![],
        };
        assert!(bad.build().is_err());
    }

    #[test]
    fn build_rejects_disconnected_degree_zero() {
        let bad = TableSpec {
            name: "bad".into(),
            elements: vec![
                BasisElement {
                    name: "1".into(),
                    degree: 0,
                },
                BasisElement {
                    name: "e".into(),
                    degree: 0,
                },
            ],
            unit: "1".into(),
            products: vec![],
            differentials: vec![],
        };
        assert!(bad.build().is_err());
    }

    #[test]
    fn flipped_product_entry_gets_the_sign() {
        // Declare v*u for odd u, v; mul_basis(u, v) must return the signed value.
        let a = TableSpec {
            name: "signs".into(),
            elements: vec![
                BasisElement {
                    name: "1".into(),
                    degree: 0,
                },
                BasisElement {
                    name: "u".into(),
                    degree: 1,
                },
                BasisElement {
                    name: "v".into(),
                    degree: 1,
                },
                BasisElement {
                    name: "w".into(),
                    degree: 2,
                },
            ],
            unit: "1".into(),
            products: vec![("v".into(), "u".into(), vec![(int(-1), "w".into())])],
            differentials: vec![],
        }
        .build()
        .unwrap();
        let u = a.elem("u").unwrap();
        let v = a.elem("v").unwrap();
        assert_eq!(a.mul(&u, &v).unwrap(), a.elem("w").unwrap());
        assert_eq!(a.mul(&v, &u).unwrap(), a.elem("w").unwrap().scaled(&int(-1)));
    }
}
