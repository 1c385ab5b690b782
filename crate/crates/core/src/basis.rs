//! Graded bases.
//!
//! A graded basis is a finite list of named homogeneous elements sorted by
//! degree (ties broken by insertion order). Index arithmetic between the
//! global ordering and per-degree column numbering lives here so that every
//! matrix in the crate shares one deterministic coordinate convention.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::linalg::SparseVec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub degree: u32,
}

/// Finite graded basis with degreewise index ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBasis {
    elements: Vec<BasisElement>,
    by_degree: BTreeMap<u32, Vec<usize>>,
}

impl GradedBasis {
    /// Builds a basis, sorting by (degree, original position). Names must be
    /// unique and nonempty.
    pub fn new(elements: Vec<BasisElement>) -> Result<Self, Error> {
        let mut order: Vec<usize> = (0..elements.len()).collect();
        order.sort_by_key(|&i| (elements[i].degree, i));
        let sorted: Vec<BasisElement> = order.into_iter().map(|i| elements[i].clone()).collect();
        let mut seen = std::collections::BTreeSet::new();
        for e in &sorted {
            if e.name.is_empty() {
                return Err(Error::invalid("basis element with empty name"));
            }
            if !seen.insert(e.name.clone()) {
                return Err(Error::invalid(format!(
                    "duplicate basis element name `{}`",
                    e.name
                )));
            }
        }
        let mut by_degree: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, e) in sorted.iter().enumerate() {
            by_degree.entry(e.degree).or_default().push(i);
        }
        Ok(GradedBasis {
            elements: sorted,
            by_degree,
        })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self, index: usize) -> u32 {
        self.elements[index].degree
    }

    pub fn name(&self, index: usize) -> &str {
        &self.elements[index].name
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.name == name)
    }

    /// Degrees with at least one basis element, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.by_degree.keys().copied()
    }

    pub fn max_degree(&self) -> u32 {
        self.by_degree.keys().next_back().copied().unwrap_or(0)
    }

    /// Global indices of the degree-`n` part, ascending.
    pub fn indices_in(&self, degree: u32) -> &[usize] {
        self.by_degree
            .get(&degree)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn dim_in(&self, degree: u32) -> usize {
        self.indices_in(degree).len()
    }

    /// Position of a global index within its own degree block.
    pub fn local_index(&self, index: usize) -> usize {
        self.indices_in(self.degree(index))
            .binary_search(&index)
            .expect("index present in its degree block")
    }

    /// Common degree of a homogeneous vector, `None` for zero. Mixed-degree
    /// support is rejected.
    pub fn degree_of(&self, v: &SparseVec) -> Result<Option<u32>, Error> {
        let mut deg = None;
        for (i, _) in v.iter() {
            if i >= self.dim() {
                return Err(Error::invalid(format!(
                    "coordinate {i} outside basis of dimension {}",
                    self.dim()
                )));
            }
            let d = self.degree(i);
            match deg {
                None => deg = Some(d),
                Some(existing) if existing != d => {
                    return Err(Error::invalid(format!(
                        "vector mixes degrees {existing} and {d}"
                    )))
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    /// Renders a vector as a linear combination of element names.
    pub fn render(&self, v: &SparseVec) -> String {
        crate::basis::render_combination(v, |i| self.name(i).to_string())
    }
}

/// Renders a sparse vector as `c1 name1 + c2 name2 - ...` with canonical
/// signs and no redundant `1 *` coefficients.
pub fn render_combination(v: &SparseVec, name: impl Fn(usize) -> String) -> String {
    use num::traits::Signed;
    if v.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (i, c)) in v.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let n = name(i);
        if abs == num::traits::One::one() {
            out.push_str(&n);
        } else {
            out.push_str(&crate::scalar::render(&abs));
            out.push('*');
            out.push_str(&n);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn basis() -> GradedBasis {
        GradedBasis::new(vec![
            BasisElement { name: "x".into(), degree: 2 },
            BasisElement { name: "1".into(), degree: 0 },
            BasisElement { name: "y".into(), degree: 2 },
            BasisElement { name: "z".into(), degree: 5 },
        ])
        .unwrap()
    }

    #[test]
    fn sorted_by_degree_then_insertion() {
        let b = basis();
        let names: Vec<&str> = b.elements().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, vec!["1", "x", "y", "z"]);
        assert_eq!(b.indices_in(2), &[1, 2]);
        assert_eq!(b.local_index(2), 1);
        assert_eq!(b.max_degree(), 5);
        assert_eq!(b.dim_in(3), 0);
    }

    #[test]
    fn duplicate_names_rejected() {
        let r = GradedBasis::new(vec![
            BasisElement { name: "x".into(), degree: 1 },
            BasisElement { name: "x".into(), degree: 2 },
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn homogeneous_degree_detection() {
        let b = basis();
        let v = SparseVec::from_terms(vec![(1, int(1)), (2, int(-2))]);
        assert_eq!(b.degree_of(&v).unwrap(), Some(2));
        let mixed = SparseVec::from_terms(vec![(0, int(1)), (1, int(1))]);
        assert!(b.degree_of(&mixed).is_err());
        assert_eq!(b.degree_of(&SparseVec::zero()).unwrap(), None);
    }

    #[test]
    fn rendering() {
        let b = basis();
        let v = SparseVec::from_terms(vec![(1, int(1)), (2, frac(-3, 2)), (3, int(1))]);
        assert_eq!(b.render(&v), "x - 3/2*y + z");
        assert_eq!(b.render(&SparseVec::zero()), "0");
    }
}
