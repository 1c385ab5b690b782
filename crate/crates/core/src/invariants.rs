//! Numerical invariants extracted from kernels, powers, and retractions.
//!
//! Three live on the nilpotency ladder: the cup-length of a
//! zero-differential algebra, the zero-divisor cup-length (nilpotency of
//! the multiplication kernel), and the kernel nilpotency of an arbitrary
//! morphism. Each returns a [`NilCertificate`] carrying an explicit
//! nonzero product as evidence.
//!
//! The fourth is sectional: [`msecat`] finds the least stage `n` whose
//! staircase model admits a degree-preserving module retraction onto the
//! source, by phrasing the retraction as an exact linear feasibility
//! problem over Q. Feasible stages yield the retraction itself; infeasible
//! stages yield a Fredholm witness combination certifying that no
//! retraction exists below the cutoff, together with the degree where the
//! obstruction lives. [`mrelcat`] post-composes the solved retraction with
//! the section-corrected normalization, which lands it in the kernel on
//! every structural generator word without disturbing the other three
//! retraction properties.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::algebra::Algebra;
use crate::error::Error;
use crate::homology::cohomology;
use crate::ideal::{nil, GradedIdeal, NilCertificate};
use crate::linalg::{EqSystem, Inserted, SparseVec};
use crate::morphism::{left_unit_section, multiplication_morphism, LinearMap, Morphism};
use crate::scalar::Scalar;
use crate::sullivan::{join_model, JoinModel};
use num::traits::Zero;

/// Longest nonzero product of positive-degree elements in a
/// zero-differential algebra.
pub fn cuplength(a: &Arc<Algebra>) -> Result<NilCertificate, Error> {
    if !a.has_zero_differential() {
        return Err(Error::invalid(
            "cup-length reads a zero-differential algebra; pass its cohomology instead"
                .to_string(),
        ));
    }
    let positive: Vec<SparseVec> = (0..a.dim())
        .filter(|&i| a.degree(i) > 0)
        .map(SparseVec::unit)
        .collect();
    let augmentation = GradedIdeal::from_spanning(a, positive)?;
    nil(&augmentation)
}

/// Nilpotency of the kernel of the two-fold multiplication.
pub fn zero_divisor_cuplength(a: &Arc<Algebra>) -> Result<NilCertificate, Error> {
    let mu = multiplication_morphism(a, 2)?;
    kernel_nilpotency(&mu)
}

/// Nilpotency of `ker(phi)` as a subspace power inside the source.
pub fn kernel_nilpotency(phi: &Morphism) -> Result<NilCertificate, Error> {
    nil(&GradedIdeal::kernel(phi))
}

/// Stage and degree bounds for the retraction search.
#[derive(Clone, Copy, Debug)]
pub struct MsecatOptions {
    /// Highest stage tried before reporting "greater than".
    pub n_max: u32,
    /// Constraints and certificates range over degrees up to this bound.
    pub cutoff: u32,
}

impl Default for MsecatOptions {
    fn default() -> Self {
        MsecatOptions {
            n_max: 4,
            cutoff: 16,
        }
    }
}

/// Which retraction constraint a solver row came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintKey {
    /// `r(D e) = d(r(e))` for the named extension basis element.
    Chain { element: String },
    /// `r(s(b) * e) = s(b) * r(e)` for the named target basis element `b`
    /// acting on the named extension basis element.
    Module { factor: String, element: String },
}

/// One scalar equation: a constraint projected onto one source coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintId {
    pub key: ConstraintKey,
    /// Name of the source basis element whose coefficient is compared.
    pub coordinate: String,
}

/// Retraction properties, each evaluated by direct substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RetractionFlags {
    /// Commutes with the differentials through the cutoff.
    pub chain: bool,
    /// Restricts to the identity along the source inclusion.
    pub identity_on_base: bool,
    /// Commutes with the section-induced module action of the target.
    pub module_linear: bool,
    /// Kills every element with a positive generator word, composed with
    /// the morphism.
    pub kernel_on_positive: bool,
}

impl RetractionFlags {
    pub fn all(&self) -> bool {
        self.chain && self.identity_on_base && self.module_linear && self.kernel_on_positive
    }
}

/// A solved retraction with its evaluated properties.
#[derive(Clone, Debug)]
pub struct RetractionCertificate {
    pub n: u32,
    pub cutoff: u32,
    map: LinearMap,
    pub flags: RetractionFlags,
}

impl RetractionCertificate {
    /// The retraction, from the staircase extension onto the source.
    pub fn map(&self) -> &LinearMap {
        &self.map
    }
}

/// Proof that no retraction exists at a stage: a combination of constraint
/// rows with zero left side and nonzero right side.
#[derive(Clone, Debug)]
pub struct InfeasibilityCertificate {
    pub n: u32,
    pub cutoff: u32,
    /// Degree of the first inconsistent constraint group.
    pub degree: u32,
    /// The constraint whose insertion exposed the contradiction.
    pub failing: ConstraintId,
    /// `sum_i c_i * row_i` has zero coefficients and right side 1.
    pub witness: Vec<(ConstraintId, Scalar)>,
    /// The reversed elimination order reproduced the verdict.
    pub crosschecked: bool,
}

/// Outcome of one stage.
#[derive(Clone, Debug)]
pub enum StageResult {
    Feasible(RetractionCertificate),
    Infeasible(InfeasibilityCertificate),
}

/// One stage with its model kept alive for re-verification.
#[derive(Clone)]
pub struct StageOutcome {
    pub n: u32,
    pub model: Arc<JoinModel>,
    pub result: StageResult,
}

/// The full search record.
pub struct MsecatReport {
    /// Least feasible stage, `None` when every stage through `n_max` is
    /// infeasible.
    pub value: Option<u32>,
    pub n_max: u32,
    pub cutoff: u32,
    pub stages: Vec<StageOutcome>,
}

impl MsecatReport {
    /// Obstruction degree of the infeasible stage `n`, if that stage ran
    /// and was infeasible.
    pub fn obstruction_degree(&self, n: u32) -> Option<u32> {
        self.stages.iter().find(|s| s.n == n).and_then(|s| match &s.result {
            StageResult::Infeasible(c) => Some(c.degree),
            StageResult::Feasible(_) => None,
        })
    }
}

/// Least stage whose staircase model retracts onto the source, searched
/// from 0 through `n_max`. The morphism must carry a section; the module
/// action runs through it.
pub fn msecat(phi: &Morphism, opts: &MsecatOptions) -> Result<MsecatReport, Error> {
    if phi.section().is_none() {
        return Err(Error::invalid(
            "the retraction search needs a section on the morphism".to_string(),
        ));
    }
    let mut stages = Vec::new();
    let mut value = None;
    for n in 0..=opts.n_max {
        let model = Arc::new(join_model(phi, n, opts.cutoff)?);
        let result = solve_retraction(&model)?;
        let feasible = matches!(result, StageResult::Feasible(_));
        stages.push(StageOutcome {
            n,
            model,
            result,
        });
        if feasible {
            value = Some(n);
            break;
        }
    }
    Ok(MsecatReport {
        value,
        n_max: opts.n_max,
        cutoff: opts.cutoff,
        stages,
    })
}

/// [`msecat`] with every solved retraction normalized to land in the
/// kernel on positive generator words.
pub fn mrelcat(phi: &Morphism, opts: &MsecatOptions) -> Result<MsecatReport, Error> {
    let mut report = msecat(phi, opts)?;
    for stage in &mut report.stages {
        if let StageResult::Feasible(cert) = &stage.result {
            stage.result = StageResult::Feasible(normalize_retraction(&stage.model, cert)?);
        }
    }
    Ok(report)
}

/// An element of the source depending affinely on the retraction unknowns:
/// a constant part plus, per source coordinate, a linear form in unknowns.
#[derive(Clone, Default)]
struct AffineElt {
    cst: SparseVec,
    lin: BTreeMap<usize, SparseVec>,
}

struct Solver<'a> {
    model: &'a JoinModel,
    prime: &'a Arc<Algebra>,
    source: &'a Arc<Algebra>,
    /// `(extension index, source index) -> unknown id`, ascending in both.
    unknown_of: BTreeMap<(usize, usize), usize>,
}

impl<'a> Solver<'a> {
    fn new(model: &'a JoinModel) -> Solver<'a> {
        let prime = model.pushout();
        let source = model.phi().source();
        let mut unknown_of = BTreeMap::new();
        let mut next = 0usize;
        for e in 0..prime.dim() {
            if !prime.has_positive_word(e) {
                continue;
            }
            for &f in source.basis().indices_in(prime.degree(e)) {
                unknown_of.insert((e, f), next);
                next += 1;
            }
        }
        Solver {
            model,
            prime,
            source,
            unknown_of,
        }
    }

    /// The retraction applied to an extension element, symbolically.
    fn r_of(&self, v: &SparseVec) -> AffineElt {
        let mut out = AffineElt::default();
        for (i, c) in v.iter() {
            if self.prime.has_positive_word(i) {
                for &f in self.source.basis().indices_in(self.prime.degree(i)) {
                    let id = self.unknown_of[&(i, f)];
                    out.lin.entry(f).or_default().add_term(id, c.clone());
                }
            } else {
                let (b, _) = self.prime.extension_pair(i).expect("extension repr");
                out.cst.add_term(b, c.clone());
            }
        }
        out
    }

    fn d_affine(&self, aff: &AffineElt) -> Result<AffineElt, Error> {
        let mut out = AffineElt {
            cst: self.source.d_elem(&aff.cst)?,
            lin: BTreeMap::new(),
        };
        for (f, unknowns) in &aff.lin {
            for (g, c) in self.source.d_basis(*f)?.iter() {
                out.lin.entry(g).or_default().add_scaled(unknowns, &c);
            }
        }
        Ok(out)
    }

    fn mul_affine(&self, left: &SparseVec, aff: &AffineElt) -> Result<AffineElt, Error> {
        let mut out = AffineElt {
            cst: self.source.mul(left, &aff.cst)?,
            lin: BTreeMap::new(),
        };
        for (f, unknowns) in &aff.lin {
            let prod = self.source.mul(left, &SparseVec::unit(*f))?;
            for (g, c) in prod.iter() {
                out.lin.entry(g).or_default().add_scaled(unknowns, &c);
            }
        }
        Ok(out)
    }

    /// All scalar equations in canonical order: ascending constraint-group
    /// degree, chain rows before module rows within a group, ascending
    /// basis indices, ascending projection coordinate.
    fn equations(&self) -> Result<Vec<(u32, ConstraintId, SparseVec, Scalar)>, Error> {
        let cutoff = self.model.cutoff();
        let cap = cutoff + 1;
        let target = self.model.phi().target();
        let section = self
            .model
            .phi()
            .section()
            .expect("solver requires a section");
        let mut rows = Vec::new();
        for m in 1..=cap {
            // Chain constraints of elements one degree below the group.
            if m >= 2 || !self.prime.basis().indices_in(m - 1).is_empty() {
                for &e in self.prime.basis().indices_in(m - 1) {
                    if !self.prime.has_positive_word(e) {
                        continue;
                    }
                    let lhs = self.r_of(self.prime.d_basis(e)?);
                    let rhs = self.d_affine(&self.r_of(&SparseVec::unit(e)))?;
                    self.project(
                        m,
                        ConstraintKey::Chain {
                            element: self.prime.basis().name(e).to_string(),
                        },
                        &lhs,
                        &rhs,
                        &mut rows,
                    );
                }
            }
            // Module constraints whose degrees sum to the group.
            for b in 0..target.dim() {
                let db = target.degree(b);
                if db == 0 || db > m {
                    continue;
                }
                let sb = section.image_of(b);
                let sb_prime = self.model.k().apply(sb);
                for &e in self.prime.basis().indices_in(m - db) {
                    if !self.prime.has_positive_word(e) {
                        continue;
                    }
                    let lhs = self.r_of(&self.prime.mul(&sb_prime, &SparseVec::unit(e))?);
                    let rhs = self.mul_affine(sb, &self.r_of(&SparseVec::unit(e)))?;
                    self.project(
                        m,
                        ConstraintKey::Module {
                            factor: target.basis().name(b).to_string(),
                            element: self.prime.basis().name(e).to_string(),
                        },
                        &lhs,
                        &rhs,
                        &mut rows,
                    );
                }
            }
        }
        Ok(rows)
    }

    /// Project `lhs = rhs` onto each source coordinate.
    fn project(
        &self,
        degree: u32,
        key: ConstraintKey,
        lhs: &AffineElt,
        rhs: &AffineElt,
        rows: &mut Vec<(u32, ConstraintId, SparseVec, Scalar)>,
    ) {
        let mut coords: BTreeSet<usize> = BTreeSet::new();
        coords.extend(lhs.cst.iter().map(|(i, _)| i));
        coords.extend(rhs.cst.iter().map(|(i, _)| i));
        coords.extend(lhs.lin.keys().copied());
        coords.extend(rhs.lin.keys().copied());
        for coord in coords {
            let mut row = lhs.lin.get(&coord).cloned().unwrap_or_default();
            if let Some(r) = rhs.lin.get(&coord) {
                row = row.sub(r);
            }
            let rhs_scalar = &rhs.cst.coeff(coord) - &lhs.cst.coeff(coord);
            if row.is_zero() && rhs_scalar.is_zero() {
                continue;
            }
            rows.push((
                degree,
                ConstraintId {
                    key: key.clone(),
                    coordinate: self.source.basis().name(coord).to_string(),
                },
                row,
                rhs_scalar,
            ));
        }
    }
}

/// Decide feasibility of the retraction system for one staircase model.
pub fn solve_retraction(model: &JoinModel) -> Result<StageResult, Error> {
    let solver = Solver::new(model);
    let rows = solver.equations()?;

    let mut sys = EqSystem::new();
    let mut contradiction: Option<(usize, SparseVec)> = None;
    for (idx, (_, _, lhs, rhs)) in rows.iter().enumerate() {
        match sys.insert(lhs.clone(), rhs.clone()) {
            Inserted::Contradiction(combo) => {
                contradiction = Some((idx, combo));
                break;
            }
            _ => {}
        }
    }

    // Independent elimination order over the same rows.
    let mut reversed = EqSystem::new();
    let mut reversed_contradicts = false;
    for (_, _, lhs, rhs) in rows.iter().rev() {
        if let Inserted::Contradiction(_) = reversed.insert(lhs.clone(), rhs.clone()) {
            reversed_contradicts = true;
            break;
        }
    }

    match contradiction {
        Some((idx, combo)) => {
            let witness = combo
                .iter()
                .map(|(row_id, c)| (rows[row_id].1.clone(), c.clone()))
                .collect();
            Ok(StageResult::Infeasible(InfeasibilityCertificate {
                n: model.n(),
                cutoff: model.cutoff(),
                degree: rows[idx].0,
                failing: rows[idx].1.clone(),
                witness,
                crosschecked: reversed_contradicts,
            }))
        }
        None => {
            if reversed_contradicts {
                return Err(Error::invalid(
                    "elimination orders disagree on feasibility".to_string(),
                ));
            }
            let sol = sys.solution();
            if !sys.satisfied_by(&sol) {
                return Err(Error::invalid(
                    "solver produced a non-solution".to_string(),
                ));
            }
            let map = retraction_from_solution(model, &solver, &sol)?;
            let flags = evaluate_retraction(model, &map)?;
            Ok(StageResult::Feasible(RetractionCertificate {
                n: model.n(),
                cutoff: model.cutoff(),
                map,
                flags,
            }))
        }
    }
}

fn retraction_from_solution(
    model: &JoinModel,
    solver: &Solver,
    sol: &SparseVec,
) -> Result<LinearMap, Error> {
    let prime = model.pushout();
    let source = model.phi().source();
    let images: Vec<SparseVec> = (0..prime.dim())
        .map(|e| {
            if prime.has_positive_word(e) {
                let mut v = SparseVec::zero();
                for &f in source.basis().indices_in(prime.degree(e)) {
                    let id = solver.unknown_of[&(e, f)];
                    v.add_term(f, sol.coeff(id));
                }
                v
            } else {
                let (b, _) = prime.extension_pair(e).expect("extension repr");
                SparseVec::unit(b)
            }
        })
        .collect();
    LinearMap::new(format!("r{}", model.n()), prime, source, images)
}

/// Evaluate the four retraction properties of `r` by substitution.
pub fn evaluate_retraction(model: &JoinModel, r: &LinearMap) -> Result<RetractionFlags, Error> {
    let prime = model.pushout();
    let source = model.phi().source();
    let target = model.phi().target();
    let phi = model.phi();
    let section = phi
        .section()
        .ok_or_else(|| Error::invalid("flag evaluation needs a section".to_string()))?;
    let cutoff = model.cutoff();
    let cap = cutoff + 1;

    let mut chain = true;
    for e in 0..prime.dim() {
        if prime.degree(e) > cutoff {
            continue;
        }
        let lhs = r.apply(prime.d_basis(e)?);
        let rhs = source.d_elem(r.image_of(e))?;
        if lhs != rhs {
            chain = false;
            break;
        }
    }

    let mut identity_on_base = true;
    for a in 0..source.dim() {
        if source.degree(a) > cap {
            continue;
        }
        if r.apply(model.k().image_of(a)) != SparseVec::unit(a) {
            identity_on_base = false;
            break;
        }
    }

    let mut module_linear = true;
    'outer: for b in 0..target.dim() {
        let db = target.degree(b);
        if db == 0 {
            continue;
        }
        let sb = section.image_of(b);
        let sb_prime = model.k().apply(sb);
        for e in 0..prime.dim() {
            if db + prime.degree(e) > cap {
                continue;
            }
            let lhs = r.apply(&prime.mul(&sb_prime, &SparseVec::unit(e))?);
            let rhs = source.mul(sb, r.image_of(e))?;
            if lhs != rhs {
                module_linear = false;
                break 'outer;
            }
        }
    }

    let mut kernel_on_positive = true;
    for e in 0..prime.dim() {
        if !prime.has_positive_word(e) {
            continue;
        }
        if !phi.apply(r.image_of(e)).is_zero() {
            kernel_on_positive = false;
            break;
        }
    }

    Ok(RetractionFlags {
        chain,
        identity_on_base,
        module_linear,
        kernel_on_positive,
    })
}

/// Correct a retraction by the section so it kills every positive
/// generator word: `r'(e) = r(e) - s(phi(r(e)))` off the base, unchanged
/// on the base. Fixed points of the correction are exactly the already
/// corrected retractions.
pub fn normalize_retraction(
    model: &JoinModel,
    cert: &RetractionCertificate,
) -> Result<RetractionCertificate, Error> {
    let prime = model.pushout();
    let phi = model.phi();
    let section = phi
        .section()
        .ok_or_else(|| Error::invalid("normalization needs a section".to_string()))?;
    let images: Vec<SparseVec> = (0..prime.dim())
        .map(|e| {
            let re = cert.map.image_of(e);
            if prime.has_positive_word(e) {
                re.sub(&section.apply(&phi.apply(re)))
            } else {
                re.clone()
            }
        })
        .collect();
    let map = LinearMap::new(
        format!("{}'", cert.map.name()),
        prime,
        phi.source(),
        images,
    )?;
    let flags = evaluate_retraction(model, &map)?;
    Ok(RetractionCertificate {
        n: cert.n,
        cutoff: cert.cutoff,
        map,
        flags,
    })
}

/// What to compute in a bound report.
pub struct TcInput {
    pub algebra: Arc<Algebra>,
    /// Trust the algebra to be formal: compute everything on cohomology
    /// and report the shared value as exact.
    pub formal: bool,
    /// Cohomology degree bound.
    pub cutoff: u32,
    /// Also run the retraction search against the two-fold multiplication.
    pub msecat: Option<MsecatOptions>,
}

/// Why a report's bounds pin an exact value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactReason {
    /// The algebra was declared formal, so the cohomology computation is
    /// the value itself.
    Formal,
    /// Lower and upper bounds are certified readings of the same
    /// zero-differential ring and coincide.
    BoundsMeet,
}

/// Sandwich of invariants around the motion-planning complexity of the
/// algebra's diagonal.
pub struct BoundReport {
    /// Zero-divisor cup-length of the cohomology.
    pub lower: NilCertificate,
    /// Kernel nilpotency of the multiplication on the working algebra.
    pub upper: NilCertificate,
    pub exact: Option<(u32, ExactReason)>,
    /// Optional module-level lower bound refinement.
    pub msecat: Option<MsecatReport>,
    pub cutoff: u32,
}

/// Bound the diagonal invariant of `input.algebra` from both sides.
pub fn tc_report(input: &TcInput) -> Result<BoundReport, Error> {
    let h = cohomology(&input.algebra, input.cutoff)?;
    let ha = Arc::clone(h.algebra());
    let lower = zero_divisor_cuplength(&ha)?;
    let working: &Arc<Algebra> = if input.formal { &ha } else { &input.algebra };
    let upper = if input.formal {
        lower.clone()
    } else {
        zero_divisor_cuplength(&input.algebra)?
    };
    let exact = if input.formal {
        if lower.certified {
            Some((lower.value, ExactReason::Formal))
        } else {
            None
        }
    } else if lower.certified
        && upper.certified
        && lower.value == upper.value
        && input.algebra.has_zero_differential()
    {
        // Without a formality assertion the two bounds certify facts about
        // different algebras; numerical coincidence alone is not promoted
        // to an exactness claim unless both read the same ring.
        Some((lower.value, ExactReason::BoundsMeet))
    } else {
        None
    };
    let msecat_report = match &input.msecat {
        Some(opts) => {
            let mu = multiplication_morphism(working, 2)?;
            let power = Arc::clone(mu.source());
            let s = left_unit_section(working, &power)?;
            let mu = mu.with_section(s)?;
            Some(msecat(&mu, opts)?)
        }
        None => None,
    };
    Ok(BoundReport {
        lower,
        upper,
        exact,
        msecat: msecat_report,
        cutoff: input.cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::table::test_fixtures::{projective, sphere};

    fn diagonal(a: &Arc<Algebra>) -> Morphism {
        let mu = multiplication_morphism(a, 2).unwrap();
        let power = Arc::clone(mu.source());
        let s = left_unit_section(a, &power).unwrap();
        mu.with_section(s).unwrap()
    }

    #[test]
    fn cuplength_of_small_tables() {
        assert_eq!(cuplength(&sphere(3)).unwrap().value, 1);
        assert_eq!(cuplength(&sphere(2)).unwrap().value, 1);
        let c = cuplength(&projective(2)).unwrap();
        assert_eq!(c.value, 2);
        assert!(c.certified);
        assert!(c.witness.is_some());
    }

    #[test]
    fn zero_divisor_cuplength_of_small_tables() {
        let s3 = zero_divisor_cuplength(&sphere(3)).unwrap();
        assert_eq!(s3.value, 1);
        assert!(s3.certified);
        let s2 = zero_divisor_cuplength(&sphere(2)).unwrap();
        assert_eq!(s2.value, 2);
        assert!(s2.certified);
        let cp2 = zero_divisor_cuplength(&projective(2)).unwrap();
        assert_eq!(cp2.value, 4);
        assert!(cp2.certified);
    }

    #[test]
    fn odd_sphere_retracts_at_stage_one() {
        let phi = diagonal(&sphere(3));
        let report = msecat(&phi, &MsecatOptions { n_max: 2, cutoff: 8 }).unwrap();
        assert_eq!(report.value, Some(1));
        assert_eq!(report.obstruction_degree(0), Some(3));
        match &report.stages[1].result {
            StageResult::Feasible(cert) => {
                assert!(cert.flags.chain);
                assert!(cert.flags.identity_on_base);
                assert!(cert.flags.module_linear);
            }
            StageResult::Infeasible(_) => panic!("stage 1 must be feasible"),
        }
    }

    #[test]
    fn even_sphere_retracts_at_stage_two() {
        let phi = diagonal(&sphere(2));
        let report = msecat(&phi, &MsecatOptions { n_max: 3, cutoff: 8 }).unwrap();
        assert_eq!(report.value, Some(2));
        assert_eq!(report.obstruction_degree(0), Some(2));
        assert_eq!(report.obstruction_degree(1), Some(4));
        match &report.stages[1].result {
            StageResult::Infeasible(cert) => {
                assert!(cert.crosschecked);
                assert!(!cert.witness.is_empty());
            }
            StageResult::Feasible(_) => panic!("stage 1 must be infeasible"),
        }
    }

    #[test]
    fn normalization_fixes_the_kernel_flag_and_is_idempotent() {
        let phi = diagonal(&sphere(3));
        let report = msecat(&phi, &MsecatOptions { n_max: 1, cutoff: 8 }).unwrap();
        let stage = report.stages.last().unwrap();
        let StageResult::Feasible(cert) = &stage.result else {
            panic!("stage 1 must be feasible");
        };
        let normalized = normalize_retraction(&stage.model, cert).unwrap();
        assert!(normalized.flags.all(), "flags: {:?}", normalized.flags);
        let again = normalize_retraction(&stage.model, &normalized).unwrap();
        assert!(again.map().equals(normalized.map()));
    }

    #[test]
    fn formal_report_is_exact() {
        let report = tc_report(&TcInput {
            algebra: sphere(2),
            formal: true,
            cutoff: 8,
            msecat: None,
        })
        .unwrap();
        assert_eq!(report.exact, Some((2, ExactReason::Formal)));
        assert_eq!(report.lower.value, 2);
        assert_eq!(report.upper.value, 2);
    }

    #[test]
    fn report_bounds_meet_for_zero_differential_input() {
        let report = tc_report(&TcInput {
            algebra: projective(2),
            formal: false,
            cutoff: 12,
            msecat: None,
        })
        .unwrap();
        assert_eq!(report.lower.value, 4);
        assert_eq!(report.upper.value, 4);
        assert_eq!(report.exact, Some((4, ExactReason::BoundsMeet)));
    }
}
