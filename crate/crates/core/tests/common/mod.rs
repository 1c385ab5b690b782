//! Shared fixtures: explicit cohomology tables of spheres and projective
//! spaces, free models, and diagonal multiplication maps with their unit
//! sections.

// Each test binary compiles this module separately and uses its own subset.
#![allow(dead_code)]

use std::sync::Arc;

use ratho::algebra::{FreeSpec, Generator, TableSpec};
use ratho::basis::BasisElement;
use ratho::morphism::{left_unit_section, multiplication_morphism, Morphism, MorphismChecks};
use ratho::scalar::int;
use ratho::{Algebra, LinearMap};

/// `H^*(S^n; Q)`: unit plus one generator in degree `n`, all products zero.
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

/// `H^*(CP^n; Q) = Q[x]/(x^{n+1})` with `|x| = 2`.
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

pub fn power_name(k: u32) -> String {
    if k == 1 {
        "x".into()
    } else {
        format!("x^{k}")
    }
}

/// Minimal model of an even sphere: `Lambda(x, y)` with `|x| = half`,
/// `|y| = 2 half - 1`, `dy = x^2`, materialized up to `top`.
pub fn even_sphere_model(half: u32, top: u32) -> Arc<Algebra> {
    FreeSpec {
        name: format!("s{half}-model"),
        generators: vec![
            Generator {
                name: "x".into(),
                degree: half,
            },
            Generator {
                name: "y".into(),
                degree: 2 * half - 1,
            },
        ],
        differentials: vec![("y".into(), vec![(int(1), vec![2, 0])])],
    }
    .materialize(top)
    .unwrap()
}

/// Exterior algebra on one odd generator, the model of an odd sphere.
pub fn odd_sphere_model(n: u32, top: u32) -> Arc<Algebra> {
    assert!(n % 2 == 1);
    FreeSpec {
        name: format!("s{n}-free"),
        generators: vec![Generator {
            name: "y".into(),
            degree: n,
        }],
        differentials: vec![],
    }
    .materialize(top)
    .unwrap()
}

/// `Lambda(a_3, b_3, x_5)` with `dx = ab`: closed under d, but the class
/// `[a][bx]` lives in top degree while `[a][b]` dies, so the algebra is not
/// formal.
pub fn nonformal(top: u32) -> Arc<Algebra> {
    FreeSpec {
        name: "nonformal".into(),
        generators: vec![
            Generator {
                name: "a".into(),
                degree: 3,
            },
            Generator {
                name: "b".into(),
                degree: 3,
            },
            Generator {
                name: "x".into(),
                degree: 5,
            },
        ],
        differentials: vec![("x".into(), vec![(int(1), vec![1, 1, 0])])],
    }
    .materialize(top)
    .unwrap()
}

/// Multiplication `A tensor A -> A` with the left unit section `a -> a`
/// tensor `1` attached, the shape every sectional-category run starts from.
pub fn diagonal(a: &Arc<Algebra>) -> Morphism {
    let mu = multiplication_morphism(a, 2).unwrap();
    let power = Arc::clone(mu.source());
    let s = left_unit_section(a, &power).unwrap();
    mu.with_section(s).unwrap()
}

/// Quotient `H^*(CP^m) -> H^*(CP^n)` killing powers above `x^n`.
pub fn projective_quotient(m: u32, n: u32) -> Morphism {
    assert!(m > n);
    let src = projective(m);
    let tgt = projective(n);
    let mut images = Vec::with_capacity(src.dim());
    for i in 0..src.dim() {
        let name = src.basis().name(i);
        images.push(match tgt.basis().index_of(name) {
            Some(j) => ratho::SparseVec::unit(j),
            None => ratho::SparseVec::zero(),
        });
    }
    let map = LinearMap::new(format!("cp{m}->cp{n}"), &src, &tgt, images).unwrap();
    Morphism::validated(map, MorphismChecks::default()).unwrap()
}
