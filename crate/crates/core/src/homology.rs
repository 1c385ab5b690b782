//! Cohomology of a materialized CDGA, with canonical representatives.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Algebra, TableSpec};
use crate::basis::BasisElement;
use crate::error::Error;
use crate::linalg::{kernel_basis, Echelon, EqSystem, Inserted, SparseVec};
use crate::morphism::{LinearMap, Morphism, MorphismChecks};

/// `H(A)` up to a degree bound, as a zero-differential structure-constant
/// algebra plus the data tying its classes back to cocycles of `A`.
pub struct CohomologyAlgebra {
    algebra: Arc<Algebra>,
    source: Arc<Algebra>,
    /// Canonical cocycle representative of each class basis element.
    reps: Vec<SparseVec>,
    cutoff: u32,
    boundaries: BTreeMap<u32, Echelon>,
    /// Class basis indices per degree, aligned with `algebra`'s blocks.
    class_blocks: BTreeMap<u32, Vec<usize>>,
}

/// `H(A)` in degrees `0..=cutoff`.
///
/// A truncated `A` must be materialized at least one degree past `cutoff`
/// so that cocycles at the boundary are meaningful. The result is complete
/// exactly when `A` is complete and the cutoff clears its top nonzero
/// degree.
pub fn cohomology(a: &Arc<Algebra>, cutoff: u32) -> Result<CohomologyAlgebra, Error> {
    if !a.is_complete() && cutoff + 1 > a.top() {
        return Err(Error::mismatch(format!(
            "cohomology through degree {cutoff} needs `{}` materialized through {}, have {}",
            a.name(),
            cutoff + 1,
            a.top()
        )));
    }
    let limit = cutoff.min(a.max_degree());

    let mut cocycles: BTreeMap<u32, Echelon> = BTreeMap::new();
    let mut boundaries: BTreeMap<u32, Echelon> = BTreeMap::new();
    for deg in 0..=limit {
        let block = a.basis().indices_in(deg);
        if block.is_empty() {
            continue;
        }
        let mut z = Echelon::new();
        if a.is_complete() && deg + 1 > a.top() {
            for &i in block {
                z.insert(SparseVec::unit(i));
            }
        } else {
            let columns: Vec<SparseVec> = block
                .iter()
                .map(|&i| a.d_basis(i).cloned())
                .collect::<Result<_, _>>()?;
            for v in kernel_basis(&columns) {
                z.insert(v.map_indices(|j| block[j]));
            }
        }
        cocycles.insert(deg, z);
        let mut b = Echelon::new();
        if deg > 0 {
            for &i in a.basis().indices_in(deg - 1) {
                let dv = a.d_basis(i)?;
                if !dv.is_zero() {
                    b.insert(dv.clone());
                }
            }
        }
        boundaries.insert(deg, b);
    }

    // Representatives: walk each degree's cocycle rows in echelon order and
    // keep those that extend the boundary span.
    let mut elements = Vec::new();
    let mut reps = Vec::new();
    let mut class_blocks: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for deg in 0..=limit {
        let Some(z) = cocycles.get(&deg) else { continue };
        let mut frame = boundaries.get(&deg).cloned().unwrap_or_default();
        for row in z.rows() {
            if frame.insert(row.clone()) {
                let idx = reps.len();
                // Echelon rows are monic, so a one-term row is exactly a
                // basis element; reuse its name for readability.
                let name = if row.len() == 1 {
                    a.basis().name(row.leading().unwrap()).to_string()
                } else {
                    format!("h{deg}.{}", class_blocks.get(&deg).map_or(0, Vec::len) + 1)
                };
                elements.push(BasisElement { name, degree: deg });
                reps.push(row.clone());
                class_blocks.entry(deg).or_default().push(idx);
            }
        }
    }
    if elements.is_empty() || elements[0].degree != 0 {
        return Err(Error::invalid(format!(
            "`{}` has no unit class; cohomology here expects connected algebras",
            a.name()
        )));
    }

    let complete = a.is_complete() && cutoff >= a.max_degree();

    // Build the product table by multiplying representatives and reading
    // off classes.
    let helper = ClassFrames {
        boundaries: &boundaries,
        reps: &reps,
        class_blocks: &class_blocks,
    };
    let mut spec = TableSpec {
        name: format!("H({})", a.name()),
        elements: elements.clone(),
        unit: elements[0].name.clone(),
        products: Vec::new(),
        differentials: Vec::new(),
    };
    for i in 0..reps.len() {
        for j in i..reps.len() {
            let di = elements[i].degree;
            let dj = elements[j].degree;
            if di + dj > limit {
                continue;
            }
            let p = a.mul(&reps[i], &reps[j])?;
            let coords = helper.express(di + dj, &p)?;
            if !coords.is_zero() {
                spec.products.push((
                    elements[i].name.clone(),
                    elements[j].name.clone(),
                    coords
                        .iter()
                        .map(|(k, c)| (c.clone(), elements[k].name.clone()))
                        .collect(),
                ));
            }
        }
    }
    let table = spec.build()?;
    let algebra = if complete {
        table
    } else {
        crate::algebra::rebuild_table_truncated(&table, cutoff)
    };

    Ok(CohomologyAlgebra {
        algebra,
        source: Arc::clone(a),
        reps,
        cutoff,
        boundaries,
        class_blocks,
    })
}

struct ClassFrames<'a> {
    boundaries: &'a BTreeMap<u32, Echelon>,
    reps: &'a [SparseVec],
    class_blocks: &'a BTreeMap<u32, Vec<usize>>,
}

impl ClassFrames<'_> {
    /// Coordinates of the class of a degree-`deg` cocycle in the chosen
    /// representative basis.
    fn express(&self, deg: u32, v: &SparseVec) -> Result<SparseVec, Error> {
        let reduced = match self.boundaries.get(&deg) {
            Some(b) => b.reduce(v),
            None => v.clone(),
        };
        if reduced.is_zero() {
            return Ok(SparseVec::zero());
        }
        let Some(block) = self.class_blocks.get(&deg) else {
            return Err(Error::invalid(format!(
                "a nonzero class appeared in degree {deg} where no classes were enumerated"
            )));
        };
        // Solve sum_k c_k * reduce(rep_k) = reduced.
        let mut sys = EqSystem::new();
        let mut columns: Vec<SparseVec> = Vec::with_capacity(block.len());
        for &k in block {
            columns.push(match self.boundaries.get(&deg) {
                Some(b) => b.reduce(&self.reps[k]),
                None => self.reps[k].clone(),
            });
        }
        let mut coords: std::collections::BTreeSet<usize> = std::collections::BTreeSet::new();
        for c in columns.iter().chain(std::iter::once(&reduced)) {
            coords.extend(c.iter().map(|(i, _)| i));
        }
        for coord in coords {
            let mut lhs = SparseVec::zero();
            for (pos, col) in columns.iter().enumerate() {
                lhs.add_term(pos, col.coeff(coord));
            }
            let rhs = reduced.coeff(coord);
            if let Inserted::Contradiction(_) = sys.insert(lhs, rhs) {
                return Err(Error::invalid(
                    "cocycle does not lie in the representative span".to_string(),
                ));
            }
        }
        let sol = sys.solution();
        let mut out = SparseVec::zero();
        for (pos, &k) in block.iter().enumerate() {
            out.add_term(k, sol.coeff(pos));
        }
        Ok(out)
    }
}

impl CohomologyAlgebra {
    /// The cohomology ring as an ordinary zero-differential algebra.
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn source(&self) -> &Arc<Algebra> {
        &self.source
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn representative(&self, class: usize) -> &SparseVec {
        &self.reps[class]
    }

    pub fn dim_in(&self, degree: u32) -> usize {
        self.algebra.basis().dim_in(degree)
    }

    pub fn is_cocycle(&self, v: &SparseVec) -> Result<bool, Error> {
        Ok(self.source.d_elem(v)?.is_zero())
    }

    pub fn is_boundary(&self, v: &SparseVec) -> Result<bool, Error> {
        match self.source.basis().degree_of(v)? {
            None => Ok(true),
            Some(deg) => Ok(self
                .boundaries
                .get(&deg)
                .map_or(false, |b| b.reduce(v).is_zero())),
        }
    }

    /// Class of a cocycle, in the class basis.
    pub fn class_of(&self, v: &SparseVec) -> Result<SparseVec, Error> {
        let Some(deg) = self.source.basis().degree_of(v)? else {
            return Ok(SparseVec::zero());
        };
        if deg > self.cutoff {
            return Err(Error::DegreeOverflow {
                algebra: self.algebra.name().to_string(),
                degree: deg,
                top: self.cutoff,
            });
        }
        if !self.source.d_elem(v)?.is_zero() {
            return Err(Error::invalid("not a cocycle".to_string()));
        }
        let frames = ClassFrames {
            boundaries: &self.boundaries,
            reps: &self.reps,
            class_blocks: &self.class_blocks,
        };
        frames.express(deg, v)
    }
}

/// The map `H(f)` induced on cohomology classes.
pub fn induced_map(
    f: &Morphism,
    hs: &CohomologyAlgebra,
    ht: &CohomologyAlgebra,
) -> Result<Morphism, Error> {
    let mut images = Vec::with_capacity(hs.reps.len());
    for rep in &hs.reps {
        let fv = f.apply(rep);
        if !ht.is_cocycle(&fv)? {
            return Err(Error::invalid(format!(
                "`{}` sends a cocycle to a non-cocycle",
                f.name()
            )));
        }
        images.push(ht.class_of(&fv)?);
    }
    let map = LinearMap::new(
        format!("H({})", f.name()),
        hs.algebra(),
        ht.algebra(),
        images,
    )?;
    Morphism::validated(map, MorphismChecks::default())
}

/// One degree of a quasi-isomorphism check.
#[derive(Clone, Debug)]
pub struct DegreeVerdict {
    pub degree: u32,
    pub source_dim: usize,
    pub target_dim: usize,
    pub injective: bool,
    pub surjective: bool,
}

#[derive(Clone, Debug)]
pub struct QuasiIsoReport {
    pub degrees: Vec<DegreeVerdict>,
    pub cutoff: u32,
}

impl QuasiIsoReport {
    pub fn holds(&self) -> bool {
        self.degrees.iter().all(|v| v.injective && v.surjective)
    }

    pub fn first_failure(&self) -> Option<&DegreeVerdict> {
        self.degrees.iter().find(|v| !(v.injective && v.surjective))
    }
}

/// Does `f` induce an isomorphism on cohomology in all degrees up to
/// `cutoff`?
pub fn is_quasi_iso(f: &Morphism, cutoff: u32) -> Result<QuasiIsoReport, Error> {
    let hs = cohomology(f.source(), cutoff)?;
    let ht = cohomology(f.target(), cutoff)?;
    let h = induced_map(f, &hs, &ht)?;
    let mut degrees = Vec::new();
    for degree in 0..=cutoff {
        let source_dim = hs.dim_in(degree);
        let target_dim = ht.dim_in(degree);
        let rank = h.map().rank_in_degree(degree);
        degrees.push(DegreeVerdict {
            degree,
            source_dim,
            target_dim,
            injective: rank == source_dim,
            surjective: rank == target_dim,
        });
    }
    Ok(QuasiIsoReport { degrees, cutoff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::free::test_fixtures::even_sphere_model;
    use crate::algebra::table::test_fixtures::{projective, sphere};
    use crate::algebra::FreeSpec;
    use crate::algebra::Generator;
    use crate::scalar::int;

    #[test]
    fn sphere_model_has_sphere_cohomology() {
        let m = even_sphere_model(2, 9);
        let h = cohomology(&m, 7).unwrap();
        let dims: Vec<usize> = (0..=7).map(|d| h.dim_in(d)).collect();
        assert_eq!(dims, vec![1, 0, 1, 0, 0, 0, 0, 0]);
        // The degree-2 class is [x] and squares to zero in H.
        let ha = h.algebra();
        let x = ha.elem("x").unwrap();
        assert!(ha.mul(&x, &x).unwrap().is_zero());
        assert!(!ha.is_complete());
    }

    #[test]
    fn table_with_zero_differential_is_its_own_cohomology() {
        let cp2 = projective(2);
        let h = cohomology(&cp2, 4).unwrap();
        assert!(h.algebra().is_complete());
        assert_eq!(h.algebra().dim(), 3);
        let x = h.algebra().elem("x").unwrap();
        let x2 = h.algebra().elem("x^2").unwrap();
        assert_eq!(h.algebra().mul(&x, &x).unwrap(), x2);
    }

    #[test]
    fn class_of_is_representative_independent() {
        let m = even_sphere_model(2, 9);
        let h = cohomology(&m, 7).unwrap();
        let x = m.elem("x").unwrap();
        let y = m.elem("y").unwrap();
        let dy = m.d_elem(&y).unwrap();
        // x and x + d(y)-free perturbations: x + dy is x + x^2, not
        // homogeneous; perturb within degree 2 instead: nothing to add, so
        // check [x^2] = 0 directly.
        let x2 = m.mul(&x, &x).unwrap();
        assert_eq!(x2, dy);
        assert!(h.class_of(&x2).unwrap().is_zero());
        assert!(h.is_boundary(&x2).unwrap());
        let cls = h.class_of(&x).unwrap();
        assert_eq!(cls.len(), 1);
    }

    #[test]
    fn nonformal_example_cohomology_dims() {
        // Lambda(a_3, b_3, x_5), dx = ab: classes 1, a, b, ax, bx, abx in
        // degrees 0, 3, 3, 8, 8, 11.
        let spec = FreeSpec {
            name: "nf".into(),
            generators: vec![
                Generator { name: "a".into(), degree: 3 },
                Generator { name: "b".into(), degree: 3 },
                Generator { name: "x".into(), degree: 5 },
            ],
            differentials: vec![("x".into(), vec![(int(1), vec![1, 1, 0])])],
        };
        let a = spec.materialize(11).unwrap();
        assert!(a.is_complete());
        let h = cohomology(&a, 11).unwrap();
        let dims: Vec<usize> = (0..=11).map(|d| h.dim_in(d)).collect();
        assert_eq!(dims, vec![1, 0, 0, 2, 0, 0, 0, 0, 2, 0, 0, 1]);
        // [a][b] = [ab] = [dx] = 0 is the relation formality would miss,
        // while [a][bx] = [abx] pairs to the top class.
        let ha = h.algebra();
        let ca = ha.elem("a").unwrap();
        let cb = ha.elem("b").unwrap();
        assert!(ha.mul(&ca, &cb).unwrap().is_zero());
        let cbx = ha.elem("b·x").unwrap();
        let top = ha.elem("a·b·x").unwrap();
        assert_eq!(ha.mul(&ca, &cbx).unwrap(), top);
    }

    #[test]
    fn induced_map_respects_composition() {
        // H(f) for the identity is the identity; compose two quotients of
        // models to exercise functoriality lightly.
        let m = even_sphere_model(2, 9);
        let id = Morphism::validated(
            LinearMap::identity(&m),
            MorphismChecks::default(),
        )
        .unwrap();
        let h = cohomology(&m, 7).unwrap();
        let hid = induced_map(&id, &h, &h).unwrap();
        assert!(hid.map().equals(&LinearMap::identity(h.algebra())));
    }

    #[test]
    fn quasi_iso_detects_failures() {
        let s2 = sphere(2);
        let m = even_sphere_model(2, 9);
        // The map m -> s2 sending x to x, y to 0 is a quasi-iso <= 7.
        let mut images = vec![SparseVec::zero(); m.dim()];
        images[m.basis().index_of("1").unwrap()] = s2.unit_elem();
        images[m.basis().index_of("x").unwrap()] = s2.elem("x").unwrap();
        let f = Morphism::validated(
            LinearMap::new("proj", &m, &s2, images).unwrap(),
            MorphismChecks {
                multiplicative: false,
                chain: true,
                unital: true,
            },
        )
        .unwrap();
        let report = is_quasi_iso(&f, 7).unwrap();
        assert!(report.holds(), "{:?}", report.first_failure());
    }
}
