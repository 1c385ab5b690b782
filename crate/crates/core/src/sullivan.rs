//! Semifree resolutions of quotient projections, and the derived models of
//! iterated multiplication maps.
//!
//! Given a degreewise-spanned differential ideal `J` in a connected algebra
//! `R`, [`relative_model`] factors the projection `R -> R/J` through a
//! semifree extension `E = R (x) Lambda(W)`:
//!
//! ```text
//!         R ---inclusion---> E
//!          \               /
//!    projection         theta   (quasi-isomorphism up to the cutoff)
//!            \           /
//!             v         v
//!               R / J
//! ```
//!
//! Generators are adjoined degree by degree: one batch to make the induced
//! map on cohomology surjective in the working degree, one batch to make it
//! injective one degree higher. Every adjoined differential keeps the
//! normal form `Dw in J (+) R (x) Lambda^+ W`, which is what makes the maps
//! built on top of the extension well defined.
//!
//! [`join_model`] instantiates this for the `(n+1)`-fold multiplication of
//! an algebra morphism's source and pushes the result forward along the
//! multiplication, producing the staircase used by the retraction solver.

use std::sync::Arc;

use crate::algebra::{tensor, Algebra, ExtensionSpec, Generator};
use crate::error::Error;
use crate::homology::{cohomology, is_quasi_iso, CohomologyAlgebra, QuasiIsoReport};
use crate::ideal::{tensor_ideal, Coverage, GradedIdeal};
use crate::linalg::{kernel_basis, Echelon, EqSystem, Inserted, SparseVec};
use crate::morphism::{
    multiplication_onto, LinearMap, Morphism, MorphismChecks,
};
use crate::quotient::quotient_algebra;
use crate::scalar::Scalar;

/// Sparse generator-exponent polynomial: `(coefficient, base index,
/// exponents)` with exponents keyed by generator position. Stable across
/// re-materializations while the extension grows.
pub(crate) type StagedPoly = Vec<(Scalar, usize, Vec<(usize, u32)>)>;

/// Why a generator was adjoined.
#[derive(Clone, Debug)]
pub enum AdjoinReason {
    /// A cohomology class of the quotient was not yet hit in this degree.
    MissingClass { degree: u32, class: String },
    /// A cohomology class of the extension died in the quotient one degree
    /// above the generator.
    ExtraClass { degree: u32, class: String },
}

/// One line of the construction log.
#[derive(Clone, Debug)]
pub struct AdjoinedGenerator {
    pub name: String,
    pub degree: u32,
    pub reason: AdjoinReason,
    /// `Dw`, rendered in the final extension's basis.
    pub differential: String,
}

/// A semifree factorization of a quotient projection, certified up to a
/// degree cutoff.
pub struct RelativeModel {
    base: Arc<Algebra>,
    quotient: Arc<Algebra>,
    projection: Morphism,
    ideal: GradedIdeal,
    extension: Arc<Algebra>,
    inclusion: Morphism,
    theta: Morphism,
    log: Vec<AdjoinedGenerator>,
    cutoff: u32,
    quasi_iso: QuasiIsoReport,
    gens: Vec<Generator>,
    gen_d: Vec<StagedPoly>,
}

impl RelativeModel {
    pub fn base(&self) -> &Arc<Algebra> {
        &self.base
    }

    pub fn quotient(&self) -> &Arc<Algebra> {
        &self.quotient
    }

    pub fn projection(&self) -> &Morphism {
        &self.projection
    }

    pub fn ideal(&self) -> &GradedIdeal {
        &self.ideal
    }

    /// The semifree algebra `R (x) Lambda(W)`.
    pub fn extension(&self) -> &Arc<Algebra> {
        &self.extension
    }

    pub fn inclusion(&self) -> &Morphism {
        &self.inclusion
    }

    /// The quasi-isomorphism onto the quotient.
    pub fn theta(&self) -> &Morphism {
        &self.theta
    }

    pub fn log(&self) -> &[AdjoinedGenerator] {
        &self.log
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn quasi_iso(&self) -> &QuasiIsoReport {
        &self.quasi_iso
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub(crate) fn staged_differentials(&self) -> &[StagedPoly] {
        &self.gen_d
    }

    /// `Dw` splits as an ideal part plus terms with a positive generator
    /// word, for every adjoined generator.
    pub fn normal_form_holds(&self) -> Result<bool, Error> {
        for k in 0..self.gens.len() {
            let dv = self
                .extension
                .extension_gen_d(k)
                .expect("extension repr");
            let mut base_part = SparseVec::zero();
            for (i, c) in dv.iter() {
                if !self.extension.has_positive_word(i) {
                    let (b, _) = self.extension.extension_pair(i).expect("extension repr");
                    base_part.add_term(b, c.clone());
                }
            }
            if !self.ideal.contains(&base_part)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Degreewise construction state.
struct Builder {
    base: Arc<Algebra>,
    cap: u32,
    gens: Vec<Generator>,
    gen_d: Vec<StagedPoly>,
    log: Vec<(String, u32, AdjoinReason, StagedPoly)>,
    counter: usize,
}

impl Builder {
    fn materialize(&self, name: &str) -> Result<Arc<Algebra>, Error> {
        let padded: Vec<crate::algebra::extension::PairPolynomial> = self
            .gen_d
            .iter()
            .map(|poly| {
                poly.iter()
                    .map(|(c, b, expo)| {
                        let mut full = vec![0u32; self.gens.len()];
                        for &(g, e) in expo {
                            full[g] = e;
                        }
                        (c.clone(), *b, full)
                    })
                    .collect()
            })
            .collect();
        ExtensionSpec {
            name: name.to_string(),
            base: Arc::clone(&self.base),
            gens: self.gens.clone(),
            gen_d: padded,
            top: self.cap,
        }
        .materialize()
    }

    /// Convert an element of the current materialization into staged form.
    fn import(&self, ext: &Arc<Algebra>, v: &SparseVec) -> StagedPoly {
        v.iter()
            .map(|(i, c)| {
                let (b, expo) = ext.extension_pair(i).expect("extension repr");
                let sparse: Vec<(usize, u32)> = expo
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(g, e)| (g, *e))
                    .collect();
                (c.clone(), b, sparse)
            })
            .collect()
    }

    fn adjoin(&mut self, degree: u32, d: StagedPoly, reason: AdjoinReason) {
        self.counter += 1;
        let name = format!("w{}", self.counter);
        self.gens.push(Generator {
            name: name.clone(),
            degree,
        });
        self.gen_d.push(d.clone());
        self.log.push((name, degree, reason, d));
    }
}

/// Same images on every source basis element of degree at most `limit`.
fn maps_agree_up_to(f: &LinearMap, g: &LinearMap, limit: u32) -> bool {
    let src = f.source();
    (0..src.dim()).all(|i| src.degree(i) > limit || f.image_of(i) == g.image_of(i))
}

/// Canonical solution of `sum_i x_i * image(cols[i]) = rhs`, or `None` when
/// `rhs` is not in the span. The solution vector is over `cols` positions.
fn solve_linear(
    cols: &[usize],
    image: impl Fn(usize) -> SparseVec,
    rhs: &SparseVec,
) -> Option<Vec<Scalar>> {
    let columns: Vec<SparseVec> = cols.iter().map(|&i| image(i)).collect();
    let mut coords: std::collections::BTreeSet<usize> = std::collections::BTreeSet::new();
    for c in columns.iter().chain(std::iter::once(rhs)) {
        coords.extend(c.iter().map(|(i, _)| i));
    }
    let mut sys = EqSystem::new();
    for coord in coords {
        let mut lhs = SparseVec::zero();
        for (pos, col) in columns.iter().enumerate() {
            lhs.add_term(pos, col.coeff(coord));
        }
        if let Inserted::Contradiction(_) = sys.insert(lhs, rhs.coeff(coord)) {
            return None;
        }
    }
    let sol = sys.solution();
    Some((0..cols.len()).map(|pos| sol.coeff(pos)).collect())
}

/// Cocycle representatives of `H^deg` with the boundary span, canonical in
/// echelon order.
fn h_classes(ext: &Arc<Algebra>, deg: u32) -> Result<(Vec<SparseVec>, Echelon), Error> {
    let block = ext.basis().indices_in(deg);
    let mut boundaries = Echelon::new();
    if deg > 0 {
        for &i in ext.basis().indices_in(deg - 1) {
            let dv = ext.d_basis(i)?;
            if !dv.is_zero() {
                boundaries.insert(dv.clone());
            }
        }
    }
    let mut reps = Vec::new();
    if !block.is_empty() {
        let columns: Vec<SparseVec> = block
            .iter()
            .map(|&i| ext.d_basis(i).cloned())
            .collect::<Result<_, _>>()?;
        let mut frame = boundaries.clone();
        for v in kernel_basis(&columns) {
            let global = v.map_indices(|j| block[j]);
            if frame.insert(global.clone()) {
                reps.push(global);
            }
        }
    }
    Ok((reps, boundaries))
}

/// Factor the projection `base -> base/ideal` through a semifree extension
/// that is a quasi-isomorphism onto the quotient in all degrees up to
/// `cutoff`. The extension is materialized one degree past the cutoff.
pub fn relative_model(
    base: &Arc<Algebra>,
    ideal: &GradedIdeal,
    cutoff: u32,
) -> Result<RelativeModel, Error> {
    let cap = cutoff + 1;
    if !base.is_complete() && base.top() < cap {
        return Err(Error::mismatch(format!(
            "base `{}` is materialized to degree {}, need {cap}",
            base.name(),
            base.top()
        )));
    }
    let (quotient, projection) =
        quotient_algebra(base, ideal, format!("{}/I", base.name()))?;
    let hq = cohomology(&quotient, cutoff)?;

    let mut builder = Builder {
        base: Arc::clone(base),
        cap,
        gens: Vec::new(),
        gen_d: Vec::new(),
        log: Vec::new(),
        counter: 0,
    };

    // Degree-0 generators are never available: a kernel class in degree 1
    // cannot be repaired.
    {
        let ext = builder.materialize("stage")?;
        if !kernel_defects(&ext, &projection, &hq, 1)?.is_empty() {
            return Err(Error::invalid(
                "the projection kills a degree-1 cohomology class; repairing it would need \
                 degree-0 generators, which connected semifree extensions do not have"
                    .to_string(),
            ));
        }
    }

    const MAX_ROUNDS: usize = 64;
    for m in 1..=cutoff {
        let mut settled = false;
        for _round in 0..MAX_ROUNDS {
            let ext = builder.materialize("stage")?;
            let missing = cokernel_defects(&ext, &projection, &hq, m)?;
            if !missing.is_empty() {
                for q_rep in missing {
                    let lift = lift_through_projection(base, &projection, &q_rep, m)?;
                    let de = base.d_elem(&lift)?;
                    debug_assert!(
                        !de.is_zero(),
                        "a closed lift would mean the class was never missing"
                    );
                    let rendered = quotient.render(&q_rep);
                    let staged: StagedPoly = de
                        .iter()
                        .map(|(b, c)| (c.clone(), b, Vec::new()))
                        .collect();
                    builder.adjoin(
                        m,
                        staged,
                        AdjoinReason::MissingClass {
                            degree: m,
                            class: rendered,
                        },
                    );
                }
                continue;
            }
            if m + 1 <= cutoff {
                let extra = kernel_defects(&ext, &projection, &hq, m + 1)?;
                if !extra.is_empty() {
                    for z in extra {
                        let z = normalize_to_kernel(&ext, base, &quotient, &projection, &z, m)?;
                        debug_assert!(!z.is_zero(), "a vanishing defect cannot represent a class");
                        let rendered = ext.render(&z);
                        let staged = builder.import(&ext, &z);
                        builder.adjoin(
                            m,
                            staged,
                            AdjoinReason::ExtraClass {
                                degree: m + 1,
                                class: rendered,
                            },
                        );
                    }
                    continue;
                }
            }
            settled = true;
            break;
        }
        if !settled {
            return Err(Error::NoConvergence(format!(
                "degree {m} did not stabilize within {MAX_ROUNDS} rounds; \
                 degree-1 generators can in principle cascade, but not this long"
            )));
        }
    }

    let extension = builder.materialize(&format!("{}⊗ΛW", base.name()))?;

    // theta: the identity-like projection on the base, zero on every
    // positive word.
    let theta_images: Vec<SparseVec> = (0..extension.dim())
        .map(|i| {
            if extension.has_positive_word(i) {
                SparseVec::zero()
            } else {
                let (b, _) = extension.extension_pair(i).expect("extension repr");
                projection.image_of(b).clone()
            }
        })
        .collect();
    let theta = Morphism::validated(
        LinearMap::new("θ", &extension, &quotient, theta_images)?,
        MorphismChecks::default(),
    )?;

    // The base embeds degreewise up to the cap; a complete base may stick
    // out above it, and those elements are sent to zero. Everything the
    // model certifies lives at or below the cutoff, where the embedding is
    // genuine.
    let zero_expo = vec![0u32; builder.gens.len()];
    let incl_images: Vec<SparseVec> = (0..base.dim())
        .map(|b| match extension.extension_index(b, &zero_expo) {
            Some(idx) => SparseVec::unit(idx),
            None => SparseVec::zero(),
        })
        .collect();
    let inclusion = Morphism::validated(
        LinearMap::new("i", base, &extension, incl_images)?,
        MorphismChecks::default(),
    )?;

    // theta restricted to the base must be the projection, through the cap.
    let through = theta.map().compose(inclusion.map())?;
    if !maps_agree_up_to(&through, projection.map(), cutoff) {
        return Err(Error::invalid(
            "the extension does not restrict to the projection on its base".to_string(),
        ));
    }

    let quasi_iso = is_quasi_iso(&theta, cutoff)?;
    if !quasi_iso.holds() {
        let bad = quasi_iso.first_failure().expect("failure recorded");
        return Err(Error::NoConvergence(format!(
            "extension is not a quasi-isomorphism at degree {} (source rank {}, target rank {})",
            bad.degree, bad.source_dim, bad.target_dim
        )));
    }

    let log = builder
        .log
        .iter()
        .map(|(name, degree, reason, staged)| {
            let mut dv = SparseVec::zero();
            for (c, b, expo) in staged {
                let mut full = vec![0u32; builder.gens.len()];
                for &(g, e) in expo {
                    full[g] = e;
                }
                let idx = extension
                    .extension_index(*b, &full)
                    .expect("staged term materialized");
                dv.add_term(idx, c.clone());
            }
            AdjoinedGenerator {
                name: name.clone(),
                degree: *degree,
                reason: reason.clone(),
                differential: extension.render(&dv),
            }
        })
        .collect();

    let model = RelativeModel {
        base: Arc::clone(base),
        quotient,
        projection,
        ideal: ideal.clone(),
        extension,
        inclusion,
        theta,
        log,
        cutoff,
        quasi_iso,
        gens: builder.gens,
        gen_d: builder.gen_d,
    };
    if !model.normal_form_holds()? {
        return Err(Error::invalid(
            "an adjoined differential escaped the ideal-plus-positive-word normal form"
                .to_string(),
        ));
    }
    Ok(model)
}

/// Quotient classes in degree `m` missed by the extension, as quotient
/// cocycle representatives.
fn cokernel_defects(
    ext: &Arc<Algebra>,
    projection: &Morphism,
    hq: &CohomologyAlgebra,
    m: u32,
) -> Result<Vec<SparseVec>, Error> {
    let (reps, _) = h_classes(ext, m)?;
    let mut image = Echelon::new();
    for rep in &reps {
        let q = apply_theta(ext, projection, rep);
        image.insert(hq.class_of(&q)?);
    }
    let mut missing = Vec::new();
    for &h in hq.algebra().basis().indices_in(m) {
        if image.insert(SparseVec::unit(h)) {
            missing.push(hq.representative(h).clone());
        }
    }
    Ok(missing)
}

/// Extension classes in degree `t` that die in the quotient, as extension
/// cocycles.
fn kernel_defects(
    ext: &Arc<Algebra>,
    projection: &Morphism,
    hq: &CohomologyAlgebra,
    t: u32,
) -> Result<Vec<SparseVec>, Error> {
    let (reps, _) = h_classes(ext, t)?;
    if reps.is_empty() {
        return Ok(Vec::new());
    }
    let columns: Vec<SparseVec> = reps
        .iter()
        .map(|rep| {
            let q = apply_theta(ext, projection, rep);
            hq.class_of(&q)
        })
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for combo in kernel_basis(&columns) {
        let mut z = SparseVec::zero();
        for (pos, c) in combo.iter() {
            z.add_scaled(&reps[pos], c);
        }
        out.push(z);
    }
    Ok(out)
}

/// `theta` without materializing the map: projection on the base, zero on
/// positive words.
fn apply_theta(ext: &Arc<Algebra>, projection: &Morphism, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::zero();
    for (i, c) in v.iter() {
        if !ext.has_positive_word(i) {
            let (b, _) = ext.extension_pair(i).expect("extension repr");
            out.add_scaled(projection.image_of(b), c);
        }
    }
    out
}

/// A degree-`m` element of the base projecting to `rhs`.
fn lift_through_projection(
    base: &Arc<Algebra>,
    projection: &Morphism,
    rhs: &SparseVec,
    m: u32,
) -> Result<SparseVec, Error> {
    let block = base.basis().indices_in(m);
    let sol = solve_linear(block, |i| projection.image_of(i).clone(), rhs)
        .ok_or_else(|| Error::invalid("projection is not surjective where it must be"))?;
    let mut out = SparseVec::zero();
    for (pos, &i) in block.iter().enumerate() {
        out.add_term(i, sol[pos].clone());
    }
    Ok(out)
}

/// Replace a defect cocycle by a cohomologous one sent exactly to zero:
/// write `theta(z) = d(q')`, lift `q'` through the projection into the base
/// in degree `m`, and subtract the differential of the lift.
fn normalize_to_kernel(
    ext: &Arc<Algebra>,
    base: &Arc<Algebra>,
    quotient: &Arc<Algebra>,
    projection: &Morphism,
    z: &SparseVec,
    m: u32,
) -> Result<SparseVec, Error> {
    let qz = apply_theta(ext, projection, z);
    if qz.is_zero() {
        return Ok(z.clone());
    }
    let block = quotient.basis().indices_in(m);
    let sol = solve_linear(
        block,
        |i| quotient.d_basis(i).cloned().unwrap_or_default(),
        &qz,
    )
    .ok_or_else(|| {
        Error::invalid("a kernel-defect image failed to be exact in the quotient".to_string())
    })?;
    let mut qprime = SparseVec::zero();
    for (pos, &i) in block.iter().enumerate() {
        qprime.add_term(i, sol[pos].clone());
    }
    let lift = lift_through_projection(base, projection, &qprime, m)?;
    // Embed the lift into the extension and subtract its differential.
    let zero_expo = vec![
        0u32;
        ext.generators().map_or(0, |g| g.len())
    ];
    let mut u = SparseVec::zero();
    for (b, c) in lift.iter() {
        let idx = ext
            .extension_index(b, &zero_expo)
            .expect("base embeds into the extension");
        u.add_term(idx, c.clone());
    }
    let du = ext.d_elem(&u)?;
    Ok(z.sub(&du))
}

/// The staircase model of an `(n+1)`-fold multiplication: the relative
/// model of `R = source^{(x) n+1}` over its kernel-power ideal, pushed
/// forward along the multiplication onto the source.
pub struct JoinModel {
    n: u32,
    cutoff: u32,
    phi: Morphism,
    relative: RelativeModel,
    mu: Morphism,
    prime: Arc<Algebra>,
    base_change: Morphism,
    k: Morphism,
    kernel: GradedIdeal,
    power: GradedIdeal,
    power_coverage: Coverage,
    quotient: Arc<Algebra>,
    p: Morphism,
    lambda: Morphism,
    ell: Morphism,
    phi_bar: Morphism,
}

impl JoinModel {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// The morphism whose sectional invariants are being bounded.
    pub fn phi(&self) -> &Morphism {
        &self.phi
    }

    pub fn relative(&self) -> &RelativeModel {
        &self.relative
    }

    /// The `(n+1)`-fold multiplication of the source onto itself.
    pub fn mu(&self) -> &Morphism {
        &self.mu
    }

    /// The pushed-forward extension `source (x) Lambda(W)`.
    pub fn pushout(&self) -> &Arc<Algebra> {
        &self.prime
    }

    /// `R (x) Lambda(W) -> source (x) Lambda(W)`, multiplication on the base.
    pub fn base_change(&self) -> &Morphism {
        &self.base_change
    }

    /// The inclusion of the source into the pushout.
    pub fn k(&self) -> &Morphism {
        &self.k
    }

    pub fn kernel(&self) -> &GradedIdeal {
        &self.kernel
    }

    /// `kernel^{n+1}` inside the source.
    pub fn power(&self) -> &GradedIdeal {
        &self.power
    }

    pub fn power_coverage(&self) -> Coverage {
        self.power_coverage
    }

    /// `source / kernel^{n+1}`.
    pub fn power_quotient(&self) -> &Arc<Algebra> {
        &self.quotient
    }

    pub fn p(&self) -> &Morphism {
        &self.p
    }

    /// Collapse of the pushout onto `source / kernel^{n+1}`.
    pub fn lambda(&self) -> &Morphism {
        &self.lambda
    }

    /// Collapse of the pushout onto the target.
    pub fn ell(&self) -> &Morphism {
        &self.ell
    }

    /// The target-bound map induced on `source / kernel^{n+1}`.
    pub fn phi_bar(&self) -> &Morphism {
        &self.phi_bar
    }
}

/// Build the join-style model of `phi` at stage `n`.
pub fn join_model(phi: &Morphism, n: u32, cutoff: u32) -> Result<JoinModel, Error> {
    let a = phi.source();
    let cap = cutoff + 1;
    if !a.is_complete() && a.top() < cap {
        return Err(Error::mismatch(format!(
            "source `{}` is materialized to degree {}, need {cap}",
            a.name(),
            a.top()
        )));
    }

    // Left-nested powers with their embedded kernel-power ideals.
    let kernel = GradedIdeal::kernel(phi);
    let mut power_alg = Arc::clone(a);
    let mut ideal = kernel.clone();
    for _ in 0..n {
        let next = tensor(&power_alg, a);
        ideal = tensor_ideal(&next, &ideal, &kernel)?;
        power_alg = next;
    }
    let mu = multiplication_onto(&power_alg, a)?;
    let relative = relative_model(&power_alg, &ideal, cutoff)?;

    // Push the extension forward along the multiplication.
    let staged = relative.staged_differentials();
    let pushed: Vec<crate::algebra::extension::PairPolynomial> = staged
        .iter()
        .map(|poly| {
            let mut out: Vec<(Scalar, usize, Vec<u32>)> = Vec::new();
            for (c, b, expo) in poly {
                let mut full = vec![0u32; relative.generators().len()];
                for &(g, e) in expo {
                    full[g] = e;
                }
                for (t, tc) in mu.image_of(*b).iter() {
                    out.push((c * tc, t, full.clone()));
                }
            }
            out
        })
        .collect();
    let prime = ExtensionSpec {
        name: format!("{}⊗ΛW", a.name()),
        base: Arc::clone(a),
        gens: relative.generators().to_vec(),
        gen_d: pushed,
        top: cap,
    }
    .materialize()?;

    let gcount = relative.generators().len();
    let ext = relative.extension();
    let bc_images: Vec<SparseVec> = (0..ext.dim())
        .map(|i| {
            let (b, expo) = ext.extension_pair(i).expect("extension repr");
            let expo = expo.to_vec();
            let mut out = SparseVec::zero();
            for (t, c) in mu.image_of(b).iter() {
                let idx = prime
                    .extension_index(t, &expo)
                    .expect("pushout materialized in range");
                out.add_term(idx, c.clone());
            }
            out
        })
        .collect();
    let base_change = Morphism::validated(
        LinearMap::new("β", ext, &prime, bc_images)?,
        MorphismChecks::default(),
    )?;

    // Same truncation convention as the relative inclusion: source elements
    // above the cap (possible for a complete source) go to zero.
    let zero_expo = vec![0u32; gcount];
    let k_images: Vec<SparseVec> = (0..a.dim())
        .map(|i| match prime.extension_index(i, &zero_expo) {
            Some(idx) => SparseVec::unit(idx),
            None => SparseVec::zero(),
        })
        .collect();
    let k = Morphism::validated(
        LinearMap::new(format!("k{n}"), a, &prime, k_images)?,
        MorphismChecks::default(),
    )?;

    let (power, power_coverage) = kernel.power(n + 1)?;
    let (quotient, p) = quotient_algebra(
        a,
        &power,
        format!("{}/K^{}", a.name(), n + 1),
    )?;

    let lambda_images: Vec<SparseVec> = (0..prime.dim())
        .map(|i| {
            if prime.has_positive_word(i) {
                SparseVec::zero()
            } else {
                let (b, _) = prime.extension_pair(i).expect("extension repr");
                p.image_of(b).clone()
            }
        })
        .collect();
    let lambda = Morphism::validated(
        LinearMap::new(format!("λ{n}"), &prime, &quotient, lambda_images)?,
        MorphismChecks::default(),
    )
    .map_err(|e| match e {
        Error::Validation(msg) => Error::Validation(format!(
            "the collapse onto the kernel-power quotient must be a morphism; its failure \
             means an adjoined differential's base part escaped the kernel power: {msg}"
        )),
        other => other,
    })?;

    let ell_images: Vec<SparseVec> = (0..prime.dim())
        .map(|i| {
            if prime.has_positive_word(i) {
                SparseVec::zero()
            } else {
                let (b, _) = prime.extension_pair(i).expect("extension repr");
                phi.image_of(b).clone()
            }
        })
        .collect();
    let ell = Morphism::validated(
        LinearMap::new(format!("l{n}"), &prime, phi.target(), ell_images)?,
        MorphismChecks::default(),
    )?;

    // phi factors through the power quotient: classes are named after their
    // representing source basis elements.
    let pb_images: Vec<SparseVec> = (0..quotient.dim())
        .map(|q| {
            let name = quotient.basis().name(q);
            let i = a
                .basis()
                .index_of(name)
                .expect("quotient classes are named after source elements");
            phi.image_of(i).clone()
        })
        .collect();
    let phi_bar = Morphism::validated(
        LinearMap::new("φ̄", &quotient, phi.target(), pb_images)?,
        MorphismChecks::default(),
    )?;

    // The triangle identities tying everything together, through the
    // certified range.
    let lk = lambda.map().compose(k.map())?;
    if !maps_agree_up_to(&lk, p.map(), cutoff) {
        return Err(Error::invalid(
            "collapse after inclusion deviates from the power-quotient projection".to_string(),
        ));
    }
    let ek = ell.map().compose(k.map())?;
    if !maps_agree_up_to(&ek, phi.map(), cutoff) {
        return Err(Error::invalid(
            "target collapse after inclusion deviates from the morphism itself".to_string(),
        ));
    }
    let pl = phi_bar.map().compose(lambda.map())?;
    if !pl.equals(ell.map()) {
        return Err(Error::invalid(
            "the induced map does not factor the target collapse".to_string(),
        ));
    }

    Ok(JoinModel {
        n,
        cutoff,
        phi: phi.clone(),
        relative,
        mu,
        prime,
        base_change,
        k,
        kernel,
        power,
        power_coverage,
        quotient,
        p,
        lambda,
        ell,
        phi_bar,
    })
}
