//! Exact sparse linear algebra over Q.
//!
//! Vectors are sorted coordinate lists with no explicit zeros. [`Echelon`]
//! maintains a reduced row echelon basis of a subspace incrementally; all
//! derived choices (kernel bases, solutions, representatives) are canonical
//! functions of the input order, which keeps every construction in the crate
//! deterministic.

use std::fmt;

use num::traits::Zero;

use crate::scalar::{self, Scalar};

/// Sparse vector over Q: strictly increasing indices, no zero entries.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SparseVec {
    terms: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec { terms: Vec::new() }
    }

    /// Single unit coordinate.
    pub fn unit(index: usize) -> Self {
        SparseVec {
            terms: vec![(index, scalar::one())],
        }
    }

    pub fn term(index: usize, coeff: Scalar) -> Self {
        let mut v = SparseVec::zero();
        v.add_term(index, coeff);
        v
    }

    /// Builds from arbitrary (index, coeff) pairs, combining duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut v = SparseVec::zero();
        for (i, c) in terms {
            v.add_term(i, c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.terms.iter().map(|(i, c)| (*i, c))
    }

    pub fn get(&self, index: usize) -> Option<&Scalar> {
        self.terms
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|pos| &self.terms[pos].1)
    }

    pub fn coeff(&self, index: usize) -> Scalar {
        self.get(index).cloned().unwrap_or_else(scalar::zero)
    }

    /// Smallest index with a nonzero coefficient.
    pub fn leading(&self) -> Option<usize> {
        self.terms.first().map(|(i, _)| *i)
    }

    pub fn add_term(&mut self, index: usize, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(pos) => {
                let sum = &self.terms[pos].1 + coeff;
                if sum.is_zero() {
                    self.terms.remove(pos);
                } else {
                    self.terms[pos].1 = sum;
                }
            }
            Err(pos) => self.terms.insert(pos, (index, coeff)),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &SparseVec, c: &Scalar) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        // Merge into a fresh vector; both inputs are sorted.
        let mut merged = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other.terms.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ia, _)), Some((ib, _))) if ia < ib => {
                    merged.push(a.next().unwrap().clone());
                }
                (Some((ia, _)), Some((ib, _))) if ia > ib => {
                    let (i, cb) = b.next().unwrap();
                    let v = c * cb;
                    if !v.is_zero() {
                        merged.push((*i, v));
                    }
                }
                (Some(_), Some(_)) => {
                    let (i, ca) = a.next().unwrap();
                    let (_, cb) = b.next().unwrap();
                    let v = ca + c * cb;
                    if !v.is_zero() {
                        merged.push((*i, v));
                    }
                }
                (Some(_), None) => merged.push(a.next().unwrap().clone()),
                (None, Some(_)) => {
                    let (i, cb) = b.next().unwrap();
                    let v = c * cb;
                    if !v.is_zero() {
                        merged.push((*i, v));
                    }
                }
                (None, None) => break,
            }
        }
        self.terms = merged;
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.add_scaled(other, &scalar::one());
        out
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.add_scaled(other, &-scalar::one());
        out
    }

    pub fn scaled(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::zero();
        }
        SparseVec {
            terms: self.terms.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    pub fn negated(&self) -> SparseVec {
        self.scaled(&-scalar::one())
    }

    /// Re-indexes every coordinate through `f`. The map must be strictly
    /// monotone on the support (checked by debug assertion).
    pub fn map_indices(&self, mut f: impl FnMut(usize) -> usize) -> SparseVec {
        let terms: Vec<(usize, Scalar)> = self
            .terms
            .iter()
            .map(|(i, c)| (f(*i), c.clone()))
            .collect();
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        SparseVec { terms }
    }
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(i, c)| format!("{}@{}", scalar::render(c), i))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Reduced row echelon basis of a subspace, built incrementally.
///
/// Rows are kept fully reduced against each other (pivot coefficient 1,
/// pivot column cleared in every other row) and sorted by pivot column, so
/// the row set is a canonical invariant of the spanned subspace.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>, // sorted by leading index, RREF
}

impl Echelon {
    pub fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    pub fn from_spanning(vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut e = Echelon::new();
        for v in vectors {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.leading().unwrap())
    }

    pub fn has_pivot(&self, column: usize) -> bool {
        self.rows
            .binary_search_by_key(&column, |r| r.leading().unwrap())
            .is_ok()
    }

    /// Residual of `v` after reduction against the basis. Zero iff `v` lies
    /// in the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        // Repeatedly clear the leading coefficient that matches a pivot.
        // Each pass strictly advances the leading index, so this terminates.
        loop {
            let Some(lead) = out.leading() else {
                return out;
            };
            let Ok(pos) = self
                .rows
                .binary_search_by_key(&lead, |r| r.leading().unwrap())
            else {
                // Leading column is free; later columns may still reduce.
                return self.reduce_tail(out);
            };
            let c = out.coeff(lead);
            out.add_scaled(&self.rows[pos], &-c);
        }
    }

    /// Clears every pivot column of `v` beyond its (free) leading column.
    fn reduce_tail(&self, mut v: SparseVec) -> SparseVec {
        loop {
            let mut changed = false;
            let hits: Vec<(usize, Scalar)> = v
                .iter()
                .filter_map(|(i, c)| {
                    self.rows
                        .binary_search_by_key(&i, |r| r.leading().unwrap())
                        .ok()
                        .map(|pos| (pos, c.clone()))
                })
                .collect();
            for (pos, c) in hits {
                v.add_scaled(&self.rows[pos], &-c);
                changed = true;
            }
            if !changed {
                return v;
            }
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span. Returns `true` when the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut res = self.reduce(&v);
        let Some(lead) = res.leading() else {
            return false;
        };
        let inv = res.coeff(lead).recip();
        res = res.scaled(&inv);
        // Clear the new pivot column from existing rows to keep RREF.
        for row in &mut self.rows {
            let c = row.coeff(lead);
            if !c.is_zero() {
                row.add_scaled(&res, &-c);
            }
        }
        let pos = self
            .rows
            .binary_search_by_key(&lead, |r| r.leading().unwrap())
            .unwrap_err();
        self.rows.insert(pos, res);
        true
    }

    /// True when both bases span the same subspace.
    pub fn same_span(&self, other: &Echelon) -> bool {
        // RREF is canonical, so set equality of rows is span equality.
        self.rows == other.rows
    }

    /// Expresses `v` in the row basis: returns `c` with `v = sum c_k row_k`,
    /// or `None` when `v` is outside the span. Coordinates are indexed by
    /// row position.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<Scalar>> {
        // In RREF, the coefficient of row k is just v's pivot-column entry,
        // provided the residual vanishes.
        if !self.contains(v) {
            return None;
        }
        Some(
            self.rows
                .iter()
                .map(|r| v.coeff(r.leading().unwrap()))
                .collect(),
        )
    }
}

/// Canonical basis of the kernel of a linear map given column-wise.
///
/// `columns[j]` is the image of source basis vector `j`; the map has
/// `columns.len()` source coordinates. Kernel vectors are returned with
/// free coordinate set to 1 (pivot coordinates solved), ordered by free
/// column, in source coordinates.
pub fn kernel_basis(columns: &[SparseVec]) -> Vec<SparseVec> {
    // Row-reduce the transposed system: equations indexed by target
    // coordinates, unknowns indexed by source columns.
    let mut equations: std::collections::BTreeMap<usize, SparseVec> = Default::default();
    for (j, col) in columns.iter().enumerate() {
        for (i, c) in col.iter() {
            equations
                .entry(i)
                .or_insert_with(SparseVec::zero)
                .add_term(j, c.clone());
        }
    }
    let ech = Echelon::from_spanning(equations.into_values());
    let pivot_set: Vec<usize> = ech.pivots().collect();
    let mut kernel = Vec::new();
    for free in 0..columns.len() {
        if pivot_set.binary_search(&free).is_ok() {
            continue;
        }
        // x_free = 1; x_pivot = -row_pivot[free] for each pivot row.
        let mut v = SparseVec::unit(free);
        for row in ech.rows() {
            let c = row.coeff(free);
            if !c.is_zero() {
                v.add_term(row.leading().unwrap(), -c);
            }
        }
        kernel.push(v);
    }
    kernel
}

/// Rank of the subspace spanned by the given vectors.
pub fn rank(vectors: impl IntoIterator<Item = SparseVec>) -> usize {
    Echelon::from_spanning(vectors).rank()
}

/// Outcome of an exact affine feasibility problem `A x = b`.
#[derive(Clone, Debug)]
pub enum Feasibility {
    /// A particular solution (free variables set to 0).
    Feasible(SparseVec),
    /// Certificate of infeasibility: a rational combination `y` of the
    /// inserted constraints (indexed by insertion id) with `y^T A = 0` and
    /// `y^T b != 0`.
    Infeasible { witness: SparseVec },
}

/// Incremental exact solver for a system of affine constraints over Q.
///
/// Constraints are inserted one at a time; the solver maintains a fully
/// reduced form and reports the first inserted constraint set that is
/// inconsistent, together with a Fredholm-style witness combination. The
/// unknown order is fixed by the caller's column numbering; reversing or
/// permuting it yields an independent elimination order over the same
/// system.
#[derive(Clone, Debug, Default)]
pub struct EqSystem {
    rows: Vec<EqRow>, // RREF over lhs, sorted by pivot
    next_id: usize,
}

#[derive(Clone, Debug)]
struct EqRow {
    lhs: SparseVec,
    rhs: Scalar,
    combo: SparseVec, // over constraint ids
}

/// Result of inserting one constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inserted {
    NewPivot,
    Redundant,
    /// The constraint contradicts earlier ones; the witness is the
    /// combination proving `0 = nonzero`.
    Contradiction(SparseVec),
}

impl EqSystem {
    pub fn new() -> Self {
        EqSystem::default()
    }

    /// Number of constraints inserted so far (ids are `0..count`).
    pub fn constraint_count(&self) -> usize {
        self.next_id
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `lhs . x = rhs`. Returns what became of the constraint. Ids
    /// increase by one per call regardless of outcome.
    pub fn insert(&mut self, lhs: SparseVec, rhs: Scalar) -> Inserted {
        let id = self.next_id;
        self.next_id += 1;
        let mut row = EqRow {
            lhs,
            rhs,
            combo: SparseVec::unit(id),
        };
        loop {
            let Some(lead) = row.lhs.leading() else {
                break;
            };
            let Ok(pos) = self
                .rows
                .binary_search_by_key(&lead, |r| r.lhs.leading().unwrap())
            else {
                // New pivot: normalize, clear the column elsewhere, insert.
                let inv = row.lhs.coeff(lead).recip();
                row.lhs = row.lhs.scaled(&inv);
                row.rhs = &row.rhs * &inv;
                row.combo = row.combo.scaled(&inv);
                for existing in &mut self.rows {
                    let c = existing.lhs.coeff(lead);
                    if !c.is_zero() {
                        existing.lhs.add_scaled(&row.lhs, &-c.clone());
                        existing.rhs = &existing.rhs - &(&c * &row.rhs);
                        existing.combo.add_scaled(&row.combo, &-c);
                    }
                }
                let pos = self
                    .rows
                    .binary_search_by_key(&lead, |r| r.lhs.leading().unwrap())
                    .unwrap_err();
                self.rows.insert(pos, row);
                return Inserted::NewPivot;
            };
            let c = row.lhs.coeff(lead);
            let pivot = &self.rows[pos];
            row.lhs.add_scaled(&pivot.lhs, &-c.clone());
            row.rhs = &row.rhs - &(&c * &pivot.rhs);
            row.combo.add_scaled(&pivot.combo, &-c);
        }
        if row.rhs.is_zero() {
            Inserted::Redundant
        } else {
            // Normalize the witness so the contradiction reads 0 = 1.
            let inv = row.rhs.recip();
            Inserted::Contradiction(row.combo.scaled(&inv))
        }
    }

    /// Particular solution with every free variable set to 0.
    pub fn solution(&self) -> SparseVec {
        let mut x = SparseVec::zero();
        for row in &self.rows {
            // Rows are fully reduced, so with free vars at 0 the pivot
            // variable equals the right-hand side.
            x.add_term(row.lhs.leading().unwrap(), row.rhs.clone());
        }
        x
    }

    /// Verifies that `x` satisfies every pivot row (hence every inserted,
    /// non-contradictory constraint).
    pub fn satisfied_by(&self, x: &SparseVec) -> bool {
        self.rows.iter().all(|row| {
            let mut acc = scalar::zero();
            for (i, c) in row.lhs.iter() {
                acc += c * &x.coeff(i);
            }
            acc == row.rhs
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        SparseVec::from_terms(entries.iter().map(|&(i, c)| (i, int(c))))
    }

    #[test]
    fn sparse_vec_merge_arithmetic() {
        let a = sv(&[(0, 1), (2, 3)]);
        let b = sv(&[(1, 2), (2, -3)]);
        let sum = a.add(&b);
        assert_eq!(sum, sv(&[(0, 1), (1, 2)]));
        assert!(a.sub(&a).is_zero());
        let mut c = a.clone();
        c.add_scaled(&b, &int(2));
        assert_eq!(c, sv(&[(0, 1), (1, 4), (2, -3)]));
    }

    #[test]
    fn echelon_membership_and_rank() {
        let mut e = Echelon::new();
        assert!(e.insert(sv(&[(0, 1), (1, 1)])));
        assert!(e.insert(sv(&[(1, 1), (2, 1)])));
        assert!(!e.insert(sv(&[(0, 1), (2, -1)]))); // dependent
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&sv(&[(0, 2), (1, 1), (2, -1)])));
        assert!(!e.contains(&sv(&[(2, 1)])));
    }

    #[test]
    fn echelon_is_canonical() {
        let e1 = Echelon::from_spanning(vec![sv(&[(0, 1), (1, 1)]), sv(&[(1, 1), (2, 1)])]);
        let e2 = Echelon::from_spanning(vec![sv(&[(0, 2), (1, 1), (2, -1)]), sv(&[(1, 3), (2, 3)])]);
        assert!(e1.same_span(&e2));
        assert_eq!(e1.rows(), e2.rows());
    }

    #[test]
    fn echelon_reduce_clears_pivot_columns_past_free_lead() {
        let e = Echelon::from_spanning(vec![sv(&[(1, 1), (3, 1)])]);
        // Leading column 0 is free, but column 1 must still be cleared.
        let r = e.reduce(&sv(&[(0, 1), (1, 2)]));
        assert_eq!(r, sv(&[(0, 1), (3, -2)]));
    }

    #[test]
    fn coordinates_in_row_basis() {
        let e = Echelon::from_spanning(vec![sv(&[(0, 1), (2, 1)]), sv(&[(1, 1)])]);
        let v = sv(&[(0, 3), (1, -2), (2, 3)]);
        let coords = e.coordinates(&v).unwrap();
        assert_eq!(coords, vec![int(3), int(-2)]);
        assert!(e.coordinates(&sv(&[(2, 1)])).is_none());
    }

    #[test]
    fn kernel_of_projection() {
        // Map Q^3 -> Q^1, (x, y, z) |-> x + y + z.
        let cols = vec![sv(&[(0, 1)]), sv(&[(0, 1)]), sv(&[(0, 1)])];
        let k = kernel_basis(&cols);
        assert_eq!(k.len(), 2);
        assert_eq!(k[0], sv(&[(0, -1), (1, 1)]));
        assert_eq!(k[1], sv(&[(0, -1), (2, 1)]));
    }

    #[test]
    fn kernel_of_injective_map_is_trivial() {
        let cols = vec![sv(&[(0, 1)]), sv(&[(1, 1)])];
        assert!(kernel_basis(&cols).is_empty());
    }

    #[test]
    fn eq_system_solves_and_certifies() {
        let mut sys = EqSystem::new();
        assert_eq!(sys.insert(sv(&[(0, 1), (1, 1)]), int(3)), Inserted::NewPivot);
        assert_eq!(sys.insert(sv(&[(0, 1), (1, -1)]), int(1)), Inserted::NewPivot);
        let x = sys.solution();
        assert_eq!(x, SparseVec::from_terms(vec![(0, int(2)), (1, int(1))]));
        assert!(sys.satisfied_by(&x));
        assert_eq!(sys.insert(sv(&[(0, 2)]), int(4)), Inserted::Redundant);
        // 2x - 2y = 0 contradicts x - y = 1.
        match sys.insert(sv(&[(0, 2), (1, -2)]), int(0)) {
            Inserted::Contradiction(w) => {
                // Witness combination: rows 0,1 and the new row 3.
                // Verify it kills the lhs and produces 1 on the rhs.
                let rows: Vec<(SparseVec, Scalar)> = vec![
                    (sv(&[(0, 1), (1, 1)]), int(3)),
                    (sv(&[(0, 1), (1, -1)]), int(1)),
                    (sv(&[(0, 2)]), int(4)),
                    (sv(&[(0, 2), (1, -2)]), int(0)),
                ];
                let mut lhs = SparseVec::zero();
                let mut rhs = int(0);
                for (id, c) in w.iter() {
                    lhs.add_scaled(&rows[id].0, c);
                    rhs += c * &rows[id].1;
                }
                assert!(lhs.is_zero());
                assert_eq!(rhs, int(1));
            }
            other => panic!("expected contradiction, got {other:?}"),
        }
    }

    #[test]
    fn eq_system_rational_pivots() {
        let mut sys = EqSystem::new();
        sys.insert(SparseVec::from_terms(vec![(0, frac(2, 3))]), int(4));
        let x = sys.solution();
        assert_eq!(x.coeff(0), int(6));
    }
}
