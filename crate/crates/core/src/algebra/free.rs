//! Free graded-commutative monomials and truncated free CDGAs.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::basis::{BasisElement, GradedBasis};
use crate::error::Error;
use crate::linalg::SparseVec;
use crate::scalar::{int, Scalar};

use super::{Algebra, FreeData, GenPolynomial, Generator, Repr};

/// The monomials of `Lambda(g_1, ..., g_k)` up to a degree bound, in a fixed
/// canonical order: by degree, then by exponent vector, descending
/// lexicographically (so `x^2` precedes `x*y` precedes `y^2`).
///
/// Invariant: exponents of odd generators are 0 or 1.
#[derive(Clone, Debug)]
pub struct MonoSet {
    degrees: Vec<u32>,
    monos: Vec<Vec<u32>>,
    mono_degrees: Vec<u32>,
    index: BTreeMap<Vec<u32>, usize>,
}

impl MonoSet {
    /// All monomials of total degree at most `max_degree`. The empty
    /// monomial (the unit) is always index 0.
    pub fn enumerate(degrees: &[u32], max_degree: u32) -> MonoSet {
        let mut monos = Vec::new();
        let mut stack = vec![0u32; degrees.len()];
        collect(degrees, max_degree, 0, 0, &mut stack, &mut monos);
        monos.sort_by(|a, b| {
            let da: u32 = total_degree(degrees, a);
            let db: u32 = total_degree(degrees, b);
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let mono_degrees = monos.iter().map(|m| total_degree(degrees, m)).collect();
        let index = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        MonoSet {
            degrees: degrees.to_vec(),
            monos,
            mono_degrees,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn degree(&self, m: usize) -> u32 {
        self.mono_degrees[m]
    }

    pub fn exponents(&self, m: usize) -> &[u32] {
        &self.monos[m]
    }

    pub fn index_of(&self, exponents: &[u32]) -> Option<usize> {
        self.index.get(exponents).copied()
    }

    /// Product of two monomials: `None` when a repeated odd generator makes
    /// it vanish, otherwise the Koszul sign and merged exponent vector. The
    /// result may exceed the enumeration bound; callers look it up.
    pub fn mul(&self, a: usize, b: usize) -> Option<(Scalar, Vec<u32>)> {
        let (ea, eb) = (&self.monos[a], &self.monos[b]);
        let mut merged = vec![0u32; self.degrees.len()];
        let mut inversions: u32 = 0;
        for j in 0..self.degrees.len() {
            merged[j] = ea[j] + eb[j];
            if self.degrees[j] % 2 == 1 {
                if merged[j] > 1 {
                    return None;
                }
                if eb[j] == 1 {
                    // Moving this odd factor left past the odd factors of
                    // `a` with larger generator index.
                    inversions += ea[j + 1..]
                        .iter()
                        .zip(&self.degrees[j + 1..])
                        .filter(|(e, d)| **e == 1 && *d % 2 == 1)
                        .count() as u32;
                }
            }
        }
        let sign = if inversions % 2 == 0 { int(1) } else { int(-1) };
        Some((sign, merged))
    }

    /// Render `gens` raised to `exponents`, `"1"` for the empty monomial.
    pub fn name(&self, m: usize, gens: &[Generator]) -> String {
        render_word(self.exponents(m), gens)
    }
}

pub(crate) fn render_word(exponents: &[u32], gens: &[Generator]) -> String {
    let mut parts = Vec::new();
    for (e, g) in exponents.iter().zip(gens) {
        match e {
            0 => {}
            1 => parts.push(g.name.clone()),
            k => parts.push(format!("{}^{}", g.name, k)),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("·")
    }
}

fn total_degree(degrees: &[u32], expo: &[u32]) -> u32 {
    expo.iter().zip(degrees).map(|(e, d)| e * d).sum()
}

fn collect(
    degrees: &[u32],
    max: u32,
    gen: usize,
    used: u32,
    stack: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if gen == degrees.len() {
        out.push(stack.clone());
        return;
    }
    let d = degrees[gen];
    let cap = if d == 0 {
        0
    } else if d % 2 == 1 {
        1.min((max - used) / d)
    } else {
        (max - used) / d
    };
    for e in 0..=cap {
        stack[gen] = e;
        collect(degrees, max, gen + 1, used + e * d, stack, out);
    }
    stack[gen] = 0;
}

/// Description of a free CDGA `(Lambda V, d)` ready to materialize up to a
/// degree bound.
#[derive(Clone, Debug)]
pub struct FreeSpec {
    pub name: String,
    pub generators: Vec<Generator>,
    /// Differential of each generator as a polynomial in the generators;
    /// generators not listed have zero differential.
    pub differentials: Vec<(String, GenPolynomial)>,
}

impl FreeSpec {
    /// Materialize all monomials of degree at most `top`. The result is
    /// complete exactly when every generator is odd and the full algebra
    /// already fits under `top` (so nothing was cut off).
    pub fn materialize(&self, top: u32) -> Result<Arc<Algebra>, Error> {
        if self.generators.is_empty() {
            return Err(Error::invalid("free algebra needs at least one generator"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for g in &self.generators {
            if g.degree == 0 {
                return Err(Error::invalid(format!(
                    "generator `{}` has degree 0; free algebras here are connected",
                    g.name
                )));
            }
            if !seen.insert(g.name.as_str()) {
                return Err(Error::invalid(format!("duplicate generator `{}`", g.name)));
            }
        }
        let degrees: Vec<u32> = self.generators.iter().map(|g| g.degree).collect();
        let monos = MonoSet::enumerate(&degrees, top);
        let elements: Vec<BasisElement> = (0..monos.len())
            .map(|m| BasisElement {
                name: monos.name(m, &self.generators),
                degree: monos.degree(m),
            })
            .collect();
        let basis = GradedBasis::new(elements)?;
        // MonoSet order and GradedBasis order agree: both sort by degree and
        // GradedBasis keeps insertion order within a degree.
        let mono_of: Vec<usize> = (0..monos.len()).collect();
        for m in 0..monos.len() {
            debug_assert_eq!(basis.degree(m), monos.degree(m));
        }
        let all_odd = self.generators.iter().all(Generator::is_odd);
        let full_degree: u32 = degrees.iter().sum();
        let complete = all_odd && full_degree <= top;

        // Generator differentials in materialized coordinates.
        let mut gen_d: Vec<SparseVec> = vec![SparseVec::zero(); self.generators.len()];
        for (name, poly) in &self.differentials {
            let k = self
                .generators
                .iter()
                .position(|g| &g.name == name)
                .ok_or_else(|| Error::invalid(format!("differential for unknown generator `{name}`")))?;
            let want = self.generators[k].degree + 1;
            let mut v = SparseVec::zero();
            for (c, expo) in poly {
                if expo.len() != self.generators.len() {
                    return Err(Error::invalid(format!(
                        "exponent vector for d({name}) has wrong length"
                    )));
                }
                let deg = total_degree(&degrees, expo);
                if deg != want {
                    return Err(Error::invalid(format!(
                        "d({name}) has a term of degree {deg}, expected {want}"
                    )));
                }
                if expo
                    .iter()
                    .zip(&degrees)
                    .any(|(e, d)| *d % 2 == 1 && *e > 1)
                {
                    // Repeated odd generator: the term is zero, drop it.
                    continue;
                }
                match monos.index_of(expo) {
                    Some(m) => v.add_term(m, c.clone()),
                    None => {
                        if self.generators[k].degree < top {
                            return Err(Error::invalid(format!(
                                "d({name}) leaves the materialized range"
                            )));
                        }
                        // Differential of a top-degree generator is gated
                        // anyway; leave it empty.
                    }
                }
            }
            gen_d[k] = v;
        }

        // Extend to all monomials by the Leibniz rule. Monomials are ordered
        // by degree, and d(m) only needs differentials of strictly smaller
        // monomials, so one forward pass with memoization works.
        let mut d: Vec<SparseVec> = vec![SparseVec::zero(); monos.len()];
        let data = FreeData {
            gens: self.generators.clone(),
            monos: monos.clone(),
            mono_of: mono_of.clone(),
        };
        let gated = |deg: u32| !complete && deg >= top;
        for m in 0..monos.len() {
            if gated(monos.degree(m)) {
                continue;
            }
            d[m] = leibniz(&monos, &gen_d, &mut d, m, &data)?;
        }

        Ok(Algebra::assemble(
            self.name.clone(),
            basis,
            0,
            top,
            complete,
            d,
            Repr::Free(data),
        ))
    }
}

/// `d(g^e * rest) = d(g) g^{e-1} rest * e + (-1)^{|g| e} g^e d(rest)`,
/// specialised to splitting off the first generator present.
fn leibniz(
    monos: &MonoSet,
    gen_d: &[SparseVec],
    done: &mut [SparseVec],
    m: usize,
    data: &FreeData,
) -> Result<SparseVec, Error> {
    let expo = monos.exponents(m).to_vec();
    let Some(k) = expo.iter().position(|e| *e > 0) else {
        return Ok(SparseVec::zero());
    };
    let mut rest = expo.clone();
    rest[k] -= 1;
    let rest_idx = monos.index_of(&rest).expect("submonomial is materialized");
    let g_deg = data.gens[k].degree;

    // First summand: d(g_k) * rest, multiplied inside the free algebra.
    let mut out = SparseVec::zero();
    for (t, c) in gen_d[k].iter() {
        if let Some((sign, merged)) = monos.mul(t, rest_idx) {
            if let Some(idx) = monos.index_of(&merged) {
                out.add_term(idx, c * &sign);
            } else {
                return Err(Error::invalid(
                    "Leibniz term leaves the materialized range".to_string(),
                ));
            }
        }
    }
    // Second summand: (-1)^{|g_k|} g_k * d(rest); d(rest) is already done
    // because rest has strictly smaller degree.
    let rest_d = done[rest_idx].clone();
    let sign = crate::scalar::sign(g_deg);
    let gk = monos
        .index_of(&unit_expo(data.gens.len(), k))
        .expect("generator is materialized");
    for (t, c) in rest_d.iter() {
        if let Some((s2, merged)) = monos.mul(gk, t) {
            if let Some(idx) = monos.index_of(&merged) {
                out.add_term(idx, &(&sign * c) * &s2);
            } else {
                return Err(Error::invalid(
                    "Leibniz term leaves the materialized range".to_string(),
                ));
            }
        }
    }
    Ok(out)
}

fn unit_expo(len: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0; len];
    e[k] = 1;
    e
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn gens(spec: &[(&str, u32)]) -> Vec<Generator> {
        spec.iter()
            .map(|(n, d)| Generator {
                name: (*n).to_string(),
                degree: *d,
            })
            .collect()
    }

    #[test]
    fn monomial_enumeration_order() {
        let ms = MonoSet::enumerate(&[2, 2], 4);
        let listed: Vec<&[u32]> = (0..ms.len()).map(|m| ms.exponents(m)).collect();
        assert_eq!(
            listed,
            vec![
                &[0u32, 0][..],
                &[1, 0],
                &[0, 1],
                &[2, 0],
                &[1, 1],
                &[0, 2]
            ]
        );
    }

    #[test]
    fn odd_monomial_signs() {
        let ms = MonoSet::enumerate(&[3, 3], 6);
        let a = ms.index_of(&[1, 0]).unwrap();
        let b = ms.index_of(&[0, 1]).unwrap();
        assert_eq!(ms.mul(a, b), Some((int(1), vec![1, 1])));
        assert_eq!(ms.mul(b, a), Some((int(-1), vec![1, 1])));
        assert_eq!(ms.mul(a, a), None);
    }

    #[test]
    fn mixed_parity_sign_only_counts_odd_pairs() {
        // x even, a and b odd; (a)(x*b) = x*a*b with no extra sign,
        // (b)(x*a) = -x*a*b.
        let ms = MonoSet::enumerate(&[2, 3, 3], 8);
        let a = ms.index_of(&[0, 1, 0]).unwrap();
        let xb = ms.index_of(&[1, 0, 1]).unwrap();
        assert_eq!(ms.mul(a, xb), Some((int(1), vec![1, 1, 1])));
        let b = ms.index_of(&[0, 0, 1]).unwrap();
        let xa = ms.index_of(&[1, 1, 0]).unwrap();
        assert_eq!(ms.mul(b, xa), Some((int(-1), vec![1, 1, 1])));
    }

    #[test]
    fn sphere_model_differential() {
        let m = test_fixtures::even_sphere_model(2, 9);
        assert!(!m.is_complete());
        let y = m.basis().index_of("y").unwrap();
        let x2 = m.basis().index_of("x^2").unwrap();
        assert_eq!(m.d_basis(y).unwrap(), &SparseVec::unit(x2));
        // d(x*y) = x*d(y) = x^3 (x even).
        let xy = m.basis().index_of("x·y").unwrap();
        let x3 = m.basis().index_of("x^3").unwrap();
        assert_eq!(m.d_basis(xy).unwrap(), &SparseVec::unit(x3));
        // d is a differential on everything representable.
        for i in 0..m.dim() {
            if m.degree(i) + 2 <= m.top() {
                let dd = m.d_elem(m.d_basis(i).unwrap()).unwrap();
                assert!(dd.is_zero(), "d^2 != 0 at {}", m.basis().name(i));
            }
        }
    }

    #[test]
    fn odd_exterior_algebra_is_complete() {
        let spec = FreeSpec {
            name: "ext".into(),
            generators: gens(&[("a", 3), ("b", 3), ("x", 5)]),
            differentials: vec![("x".into(), vec![(int(1), vec![1, 1, 0])])],
        };
        let a = spec.materialize(11).unwrap();
        assert!(a.is_complete());
        assert_eq!(a.dim(), 8);
        // dx = ab; d(ax) = -a(ab) = 0... check d^2 = 0 everywhere.
        for i in 0..a.dim() {
            let dd = a.d_elem(a.d_basis(i).unwrap()).unwrap();
            assert!(dd.is_zero());
        }
        // Product beyond nothing: complete algebra multiplies freely.
        let top_elt = a.elem("a·b·x").unwrap();
        assert!(a.mul(&top_elt, &a.elem("a").unwrap()).unwrap().is_zero());
    }

    #[test]
    fn rejects_degree_zero_and_duplicate_generators() {
        let bad = FreeSpec {
            name: "bad".into(),
            generators: gens(&[("u", 0)]),
            differentials: vec![],
        };
        assert!(bad.materialize(4).is_err());
        let dup = FreeSpec {
            name: "dup".into(),
            generators: gens(&[("u", 2), ("u", 4)]),
            differentials: vec![],
        };
        assert!(dup.materialize(4).is_err());
    }
}
