//! Degreewise-spanned graded ideals and their powers.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::Algebra;
use crate::error::Error;
use crate::linalg::{kernel_basis, Echelon, SparseVec};
use crate::morphism::Morphism;

/// A graded subspace of an algebra, stored as one reduced echelon per
/// degree over the global basis coordinates. For the ideals this crate
/// builds (morphism kernels, products of such), each degreewise span is the
/// entire degree slice of the ideal, so products of spanning vectors span
/// products of ideals.
#[derive(Clone, Debug)]
pub struct GradedIdeal {
    ambient: Arc<Algebra>,
    spans: BTreeMap<u32, Echelon>,
}

/// Whether a computation saw every product it needed, or had to stop at the
/// ambient algebra's materialization bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Every relevant product was representable; the result is exact.
    Exact,
    /// Some products fell above the bound; the result is exact in the
    /// materialized range but says nothing beyond it.
    Truncated,
}

impl Coverage {
    pub fn is_exact(self) -> bool {
        matches!(self, Coverage::Exact)
    }

    fn meet(self, other: Coverage) -> Coverage {
        if self.is_exact() && other.is_exact() {
            Coverage::Exact
        } else {
            Coverage::Truncated
        }
    }
}

impl GradedIdeal {
    pub fn zero(ambient: &Arc<Algebra>) -> GradedIdeal {
        GradedIdeal {
            ambient: Arc::clone(ambient),
            spans: BTreeMap::new(),
        }
    }

    pub fn from_spanning(
        ambient: &Arc<Algebra>,
        vectors: impl IntoIterator<Item = SparseVec>,
    ) -> Result<GradedIdeal, Error> {
        let mut spans: BTreeMap<u32, Echelon> = BTreeMap::new();
        for v in vectors {
            match ambient.basis().degree_of(&v)? {
                None => {}
                Some(deg) => {
                    spans.entry(deg).or_default().insert(v);
                }
            }
        }
        spans.retain(|_, e| e.rank() > 0);
        Ok(GradedIdeal {
            ambient: Arc::clone(ambient),
            spans,
        })
    }

    /// Degreewise kernel of a morphism.
    pub fn kernel(phi: &Morphism) -> GradedIdeal {
        let src = phi.source();
        let mut spans = BTreeMap::new();
        for deg in src.basis().degrees() {
            let block = src.basis().indices_in(deg);
            let columns: Vec<SparseVec> = block.iter().map(|&i| phi.image_of(i).clone()).collect();
            let local = kernel_basis(&columns);
            if local.is_empty() {
                continue;
            }
            let mut ech = Echelon::new();
            for v in local {
                ech.insert(v.map_indices(|j| block[j]));
            }
            spans.insert(deg, ech);
        }
        GradedIdeal {
            ambient: Arc::clone(src),
            spans,
        }
    }

    pub fn ambient(&self) -> &Arc<Algebra> {
        &self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.spans.keys().copied()
    }

    pub fn span_in(&self, degree: u32) -> Option<&Echelon> {
        self.spans.get(&degree)
    }

    pub fn dim_in(&self, degree: u32) -> usize {
        self.spans.get(&degree).map_or(0, Echelon::rank)
    }

    pub fn total_dim(&self) -> usize {
        self.spans.values().map(Echelon::rank).sum()
    }

    pub fn contains(&self, v: &SparseVec) -> Result<bool, Error> {
        match self.ambient.basis().degree_of(v)? {
            None => Ok(true),
            Some(deg) => Ok(self
                .spans
                .get(&deg)
                .map_or(false, |e| e.contains(v))),
        }
    }

    /// All spanning vectors, ascending degree.
    pub fn spanning_vectors(&self) -> impl Iterator<Item = &SparseVec> + '_ {
        self.spans.values().flat_map(|e| e.rows().iter())
    }

    pub fn same_span(&self, other: &GradedIdeal) -> bool {
        if self.spans.len() != other.spans.len() {
            return false;
        }
        self.spans.iter().all(|(deg, e)| {
            other
                .spans
                .get(deg)
                .map_or(false, |o| e.same_span(o))
        })
    }

    pub fn contains_ideal(&self, other: &GradedIdeal) -> Result<bool, Error> {
        for v in other.spanning_vectors() {
            if !self.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Close a spanned subspace under multiplication by the ambient algebra,
    /// producing the two-sided ideal it generates. Products that would land
    /// above the materialization bound are reported as truncation.
    pub fn generated_by(
        ambient: &Arc<Algebra>,
        generators: impl IntoIterator<Item = SparseVec>,
    ) -> Result<(GradedIdeal, Coverage), Error> {
        let mut ideal = GradedIdeal::from_spanning(ambient, generators)?;
        let mut coverage = Coverage::Exact;
        let positive: Vec<usize> = (0..ambient.dim())
            .filter(|&i| ambient.degree(i) > 0)
            .collect();
        loop {
            let mut grew = false;
            let rows: Vec<SparseVec> = ideal.spanning_vectors().cloned().collect();
            for r in rows {
                let rdeg = ambient
                    .basis()
                    .degree_of(&r)?
                    .expect("span rows are nonzero");
                for &b in &positive {
                    let total = rdeg + ambient.degree(b);
                    if total > ambient.top() {
                        if !ambient.is_complete() {
                            coverage = Coverage::Truncated;
                        }
                        continue;
                    }
                    let p = ambient.mul(&r, &SparseVec::unit(b))?;
                    if p.is_zero() {
                        continue;
                    }
                    if ideal.spans.entry(total).or_default().insert(p) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        ideal.spans.retain(|_, e| e.rank() > 0);
        Ok((ideal, coverage))
    }

    /// Span of all products of a spanning vector of `self` with one of
    /// `other`.
    pub fn mul(&self, other: &GradedIdeal) -> Result<(GradedIdeal, Coverage), Error> {
        let ambient = &self.ambient;
        let mut coverage = Coverage::Exact;
        let mut spans: BTreeMap<u32, Echelon> = BTreeMap::new();
        for (da, ea) in &self.spans {
            for (db, eb) in &other.spans {
                let total = da + db;
                if total > ambient.top() {
                    if !ambient.is_complete() {
                        coverage = Coverage::Truncated;
                    }
                    continue;
                }
                for ra in ea.rows() {
                    for rb in eb.rows() {
                        let p = ambient.mul(ra, rb)?;
                        if !p.is_zero() {
                            spans.entry(total).or_default().insert(p);
                        }
                    }
                }
            }
        }
        spans.retain(|_, e| e.rank() > 0);
        Ok((
            GradedIdeal {
                ambient: Arc::clone(ambient),
                spans,
            },
            coverage,
        ))
    }

    /// `self` to the `n`-th power; `n = 0` is rejected (the unit ideal is
    /// never materialized).
    pub fn power(&self, n: u32) -> Result<(GradedIdeal, Coverage), Error> {
        assert!(n >= 1, "ideal powers start at 1");
        let mut acc = self.clone();
        let mut coverage = Coverage::Exact;
        for _ in 1..n {
            let (next, c) = acc.mul(self)?;
            coverage = coverage.meet(c);
            acc = next;
            if acc.is_zero() {
                break;
            }
        }
        Ok((acc, coverage))
    }

    /// Is the subspace closed under the ambient differential? Spans in the
    /// top degree of a truncated ambient have unrepresentable differentials
    /// and are skipped.
    pub fn is_differential(&self) -> Result<bool, Error> {
        for (deg, e) in &self.spans {
            if deg + 1 > self.ambient.top() && !self.ambient.is_complete() {
                continue;
            }
            for r in e.rows() {
                let dr = self.ambient.d_elem(r)?;
                if !self.contains(&dr)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Embed `left (x) v + ...`: the span of pure tensors of two graded
/// subspaces inside a tensor-product algebra whose factors they live in.
pub fn tensor_ideal(
    product: &Arc<Algebra>,
    left: &GradedIdeal,
    right: &GradedIdeal,
) -> Result<GradedIdeal, Error> {
    let (lf, rf) = product
        .tensor_factors()
        .ok_or_else(|| Error::mismatch("ambient is not a tensor product".to_string()))?;
    if lf.dim() != left.ambient().dim() || rf.dim() != right.ambient().dim() {
        return Err(Error::mismatch(
            "factor ideals do not match the tensor factors".to_string(),
        ));
    }
    let mut vectors = Vec::new();
    for (dl, el) in &left.spans {
        for (dr, er) in &right.spans {
            if dl + dr > product.top() {
                continue;
            }
            for rl in el.rows() {
                for rr in er.rows() {
                    let mut v = SparseVec::zero();
                    for (i, c) in rl.iter() {
                        for (j, d) in rr.iter() {
                            let idx = product
                                .tensor_index(i, j)
                                .expect("pair within materialized range");
                            v.add_term(idx, c * d);
                        }
                    }
                    vectors.push(v);
                }
            }
        }
    }
    GradedIdeal::from_spanning(product, vectors)
}

/// A nilpotency bound with its evidence.
#[derive(Clone, Debug)]
pub struct NilCertificate {
    /// Largest `n` with a nonzero `n`-fold product found in range.
    pub value: u32,
    /// True when the vanishing of the next power is exact, not an artifact
    /// of truncation.
    pub certified: bool,
    /// `value` spanning vectors whose product is nonzero (absent when
    /// `value` is 0 or the bounded search gave out).
    pub witness: Option<NilWitness>,
    /// What stopped the climb.
    pub vanishing: String,
}

#[derive(Clone, Debug)]
pub struct NilWitness {
    pub factors: Vec<SparseVec>,
    pub product: SparseVec,
}

/// Nilpotency index: the largest `n` such that the `n`-th power is nonzero,
/// 0 for the zero ideal. Climbs through powers degreewise and extracts an
/// explicit product witness by depth-first search over spanning vectors.
pub fn nil(ideal: &GradedIdeal) -> Result<NilCertificate, Error> {
    if ideal.is_zero() {
        return Ok(NilCertificate {
            value: 0,
            certified: true,
            witness: None,
            vanishing: "the subspace itself is zero".to_string(),
        });
    }
    let mut n = 1u32;
    let mut power = ideal.clone();
    let mut coverage = Coverage::Exact;
    loop {
        let (next, c) = power.mul(ideal)?;
        coverage = coverage.meet(c);
        if next.is_zero() {
            break;
        }
        n += 1;
        power = next;
    }
    let certified = coverage.is_exact();
    let vanishing = if certified {
        format!("the {}-fold products all vanish", n + 1)
    } else {
        format!(
            "no nonzero {}-fold product within the materialized range; degrees above {} are unexplored",
            n + 1,
            ideal.ambient().top()
        )
    };
    let witness = witness_product(ideal, n);
    Ok(NilCertificate {
        value: n,
        certified,
        witness,
        vanishing,
    })
}

/// Find `n` spanning vectors with nonzero product, by DFS in spanning-vector
/// order with zero pruning. Bounded; returns `None` if the budget runs out.
fn witness_product(ideal: &GradedIdeal, n: u32) -> Option<NilWitness> {
    if n == 0 {
        return None;
    }
    let rows: Vec<&SparseVec> = ideal.spanning_vectors().collect();
    let mut budget: u32 = 200_000;
    let mut factors = Vec::new();
    let found = dfs(ideal, &rows, n, &ideal.ambient().unit_elem(), &mut factors, &mut budget)?;
    Some(NilWitness {
        factors: factors.clone(),
        product: found,
    })
}

fn dfs(
    ideal: &GradedIdeal,
    rows: &[&SparseVec],
    left: u32,
    acc: &SparseVec,
    factors: &mut Vec<SparseVec>,
    budget: &mut u32,
) -> Option<SparseVec> {
    if left == 0 {
        return Some(acc.clone());
    }
    let ambient = ideal.ambient();
    for r in rows {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let next = match ambient.mul(acc, r) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if next.is_zero() {
            continue;
        }
        factors.push((*r).clone());
        if let Some(found) = dfs(ideal, rows, left - 1, &next, factors, budget) {
            return Some(found);
        }
        factors.pop();
    }
    None
}
