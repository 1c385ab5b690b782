//! Turns parsed documents into validated algebras and morphisms.

use std::sync::Arc;

use ratho::algebra::{validate_algebra, FreeSpec, Generator, TableSpec};
use ratho::basis::BasisElement;
use ratho::morphism::MorphismChecks;
use ratho::scalar::Scalar;
use ratho::{Algebra, Error, LinearMap, Morphism, SparseVec};

use crate::document::{AlgebraBlock, Expr, FreeBlock, ModelDocument, MorphismBlock, TableBlock};

pub struct Built {
    pub algebras: Vec<(String, Arc<Algebra>)>,
    pub morphisms: Vec<(String, Morphism)>,
}

impl Built {
    pub fn algebra(&self, name: &str) -> Option<&Arc<Algebra>> {
        self.algebras.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }

    pub fn morphism(&self, name: &str) -> Option<&Morphism> {
        self.morphisms.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }
}

pub fn build(doc: &ModelDocument) -> Result<Built, Error> {
    let mut built = Built {
        algebras: Vec::new(),
        morphisms: Vec::new(),
    };
    for block in &doc.algebras {
        let a = match block {
            AlgebraBlock::Table(t) => build_table(t)?,
            AlgebraBlock::Free(f) => build_free(f)?,
        };
        built.algebras.push((block.name().to_string(), a));
    }
    for block in &doc.morphisms {
        let m = build_morphism(block, doc, &built)?;
        built.morphisms.push((block.name.clone(), m));
    }
    Ok(built)
}

/// Like [`build`], but additionally checks the algebra axioms on every
/// table algebra. Free algebras satisfy them by construction.
pub fn build_validated(doc: &ModelDocument) -> Result<Built, Error> {
    let built = build(doc)?;
    for (block, (name, a)) in doc.algebras.iter().zip(&built.algebras) {
        if block.is_free() {
            continue;
        }
        let report = validate_algebra(a)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::Validation(format!(
                "algebra `{name}` fails {}: {}",
                v.axiom, v.witness
            )));
        }
    }
    Ok(built)
}

fn linear_expr(expr: &Expr) -> Vec<(Scalar, String)> {
    // The parser has already rejected non-linear table expressions.
    expr.iter()
        .map(|t| (t.coeff.clone(), t.factors[0].0.clone()))
        .collect()
}

fn build_table(block: &TableBlock) -> Result<Arc<Algebra>, Error> {
    TableSpec {
        name: block.name.clone(),
        elements: block
            .elements
            .iter()
            .map(|(name, degree)| BasisElement {
                name: name.clone(),
                degree: *degree,
            })
            .collect(),
        unit: block.unit.clone(),
        products: block
            .products
            .iter()
            .map(|(a, b, expr)| (a.clone(), b.clone(), linear_expr(expr)))
            .collect(),
        differentials: block
            .differentials
            .iter()
            .map(|(el, expr)| (el.clone(), linear_expr(expr)))
            .collect(),
    }
    .build()
}

fn build_free(block: &FreeBlock) -> Result<Arc<Algebra>, Error> {
    let index_of = |name: &str| {
        block
            .generators
            .iter()
            .position(|(n, _)| n == name)
            .expect("parser resolved generator names")
    };
    let width = block.generators.len();
    FreeSpec {
        name: block.name.clone(),
        generators: block
            .generators
            .iter()
            .map(|(name, degree)| Generator {
                name: name.clone(),
                degree: *degree,
            })
            .collect(),
        differentials: block
            .differentials
            .iter()
            .map(|(g, expr)| {
                let poly = expr
                    .iter()
                    .map(|term| {
                        let mut word = vec![0u32; width];
                        for (name, exp) in &term.factors {
                            word[index_of(name)] += exp;
                        }
                        (term.coeff.clone(), word)
                    })
                    .collect();
                (g.clone(), poly)
            })
            .collect(),
    }
    .materialize(block.top)
}

/// Evaluates an expression in a built algebra by multiplying out its
/// factors.
pub fn eval_expr(a: &Arc<Algebra>, expr: &Expr) -> Result<SparseVec, Error> {
    let mut out = SparseVec::zero();
    for term in expr {
        let mut value = a.unit_elem();
        for (name, exp) in &term.factors {
            let factor = a.elem(name)?;
            value = a.mul(&value, &a.pow(&factor, *exp)?)?;
        }
        out = out.add(&value.scaled(&term.coeff));
    }
    Ok(out)
}

fn build_morphism(
    block: &MorphismBlock,
    doc: &ModelDocument,
    built: &Built,
) -> Result<Morphism, Error> {
    let src = built
        .algebra(&block.source)
        .expect("parser resolved the source");
    let tgt = built
        .algebra(&block.target)
        .expect("parser resolved the target");
    let src_block = doc
        .algebras
        .iter()
        .find(|a| a.name() == block.source)
        .unwrap();

    let mut images = vec![SparseVec::zero(); src.dim()];
    images[src.unit_index()] = tgt.unit_elem();

    match src_block {
        AlgebraBlock::Table(_) => {
            for (name, expr) in &block.images {
                let idx = src
                    .basis()
                    .index_of(name)
                    .expect("parser resolved image names");
                images[idx] = eval_expr(tgt, expr)?;
            }
        }
        AlgebraBlock::Free(_) => {
            // Images are given on generators and extended multiplicatively
            // to every monomial.
            let gens = src.generators().expect("free algebra has generators");
            let mut gen_images = vec![SparseVec::zero(); gens.len()];
            for (name, expr) in &block.images {
                let k = gens
                    .iter()
                    .position(|g| g.name == *name)
                    .expect("parser resolved generator names");
                gen_images[k] = eval_expr(tgt, expr)?;
            }
            for i in 0..src.dim() {
                let word = src
                    .monomial_exponents(i)
                    .expect("free algebra basis is monomial");
                let mut value = tgt.unit_elem();
                for (k, e) in word.iter().enumerate() {
                    if *e > 0 {
                        value = tgt.mul(&value, &tgt.pow(&gen_images[k], *e)?)?;
                    }
                    if value.is_zero() {
                        break;
                    }
                }
                images[i] = value;
            }
        }
    }

    let map = LinearMap::new(block.name.clone(), src, tgt, images)?;
    let morphism = Morphism::validated(map, MorphismChecks::default())?;
    match &block.section {
        Some(name) => {
            let section = built
                .morphism(name)
                .expect("parser resolved the section name")
                .clone();
            morphism.with_section(section)
        }
        None => Ok(morphism),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::parse_model;

    #[test]
    fn free_morphism_images_extend_multiplicatively() {
        let text = "\
algebra m free
  generator x 2
  generator y 3
  d y = x^2
  top 8
end

algebra h table
  element 1 0
  element x 2
  unit 1
end

morphism collapse
  source m
  target h
  map x = x
end
";
        let doc = parse_model(text).unwrap();
        let built = build(&doc).unwrap();
        let m = built.morphism("collapse").unwrap();
        let src = built.algebra("m").unwrap();
        let tgt = built.algebra("h").unwrap();

        let x = src.elem("x").unwrap();
        assert_eq!(m.apply(&x), tgt.elem("x").unwrap());
        // x^2 maps to x * x = 0 in the table, y to 0 by omission.
        let x2 = src.elem("x^2").unwrap();
        assert!(m.apply(&x2).is_zero());
        assert!(m.apply(&src.elem("y").unwrap()).is_zero());
    }

    #[test]
    fn sections_are_attached_and_checked() {
        let text = "\
algebra a table
  element 1 0
  element t 2
  unit 1
end

algebra b table
  element 1 0
  element t 2
  element s 2
  unit 1
end

morphism back
  source a
  target b
  map t = t
end

morphism fold
  source b
  target a
  map t = t
  map s = t
  section back
end
";
        let doc = parse_model(text).unwrap();
        let built = build(&doc).unwrap();
        let fold = built.morphism("fold").unwrap();
        assert!(fold.section().is_some());
    }

    #[test]
    fn unit_law_conflicts_fail_at_assembly() {
        let text = "\
algebra bad table
  element 1 0
  element p 2
  unit 1
  product 1 * p = 0
end
";
        let doc = parse_model(text).unwrap();
        assert!(matches!(build(&doc), Err(Error::Invalid(_))));
    }

    #[test]
    fn non_associative_tables_fail_validation_but_not_assembly() {
        // (a*b)*c = p*c = 0 yet a*(b*c) = a*q = t.
        let text = "\
algebra bad table
  element 1 0
  element a 2
  element b 2
  element c 2
  element p 4
  element q 4
  element t 6
  unit 1
  product a * b = p
  product b * c = q
  product a * q = t
end
";
        let doc = parse_model(text).unwrap();
        assert!(build(&doc).is_ok());
        match build_validated(&doc) {
            Err(Error::Validation(msg)) => assert!(msg.contains("associativity"), "{msg}"),
            Err(other) => panic!("expected a validation failure, got {other:?}"),
            Ok(_) => panic!("expected a validation failure, got a built model"),
        }
    }
}
