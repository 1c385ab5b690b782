//! Re-verification of certificates by direct evaluation.
//!
//! Everything here recomputes claims from scratch: differentials are
//! squared again, triangle identities are recomposed, witness combinations
//! are re-expanded against freshly rebuilt constraint rows, and nilpotency
//! witnesses are re-multiplied factor by factor. None of it reuses solver
//! state, so a bug in a construction path and a bug in its check would
//! have to coincide to slip through.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::Algebra;
use crate::error::Error;
use crate::homology::is_quasi_iso;
use crate::ideal::{GradedIdeal, NilCertificate};
use crate::invariants::{
    ConstraintId, ConstraintKey, InfeasibilityCertificate, RetractionCertificate,
};
use crate::linalg::SparseVec;
use crate::scalar::Scalar;
use crate::sullivan::{JoinModel, RelativeModel};
use num::traits::Zero;

/// One named check with its outcome.
#[derive(Clone, Debug)]
pub struct CheckItem {
    pub name: &'static str,
    pub ok: bool,
    /// Empty when the check passed.
    pub detail: String,
}

/// A batch of checks.
#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn all_ok(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|i| !i.ok)
    }

    fn push(&mut self, name: &'static str, ok: bool, detail: String) {
        self.items.push(CheckItem {
            name,
            ok,
            detail: if ok { String::new() } else { detail },
        });
    }
}

/// `d(d(x)) = 0` on every basis element whose double differential is
/// representable.
fn d_squared_vanishes(a: &Arc<Algebra>) -> Result<(bool, String), Error> {
    for i in 0..a.dim() {
        if !a.is_complete() && a.degree(i) + 2 > a.top() {
            continue;
        }
        let first = a.d_basis(i)?;
        let second = a.d_elem(first)?;
        if !second.is_zero() {
            return Ok((
                false,
                format!("d²({}) = {}", a.basis().name(i), a.render(&second)),
            ));
        }
    }
    Ok((true, String::new()))
}

/// Re-verify a relative model: differentials square to zero, the
/// quasi-isomorphism restricts to the projection, kills generator words,
/// still induces isomorphisms, and every adjoined differential keeps its
/// normal form.
pub fn check_relative(rel: &RelativeModel) -> Result<CheckReport, Error> {
    let mut report = CheckReport::default();
    let ext = rel.extension();
    let theta = rel.theta();
    let cutoff = rel.cutoff();

    let (ok, detail) = d_squared_vanishes(ext)?;
    report.push("differential-squares-to-zero", ok, detail);

    let mut restricts = true;
    let mut detail = String::new();
    for b in 0..rel.base().dim() {
        if rel.base().degree(b) > cutoff {
            continue;
        }
        let through = theta.apply(rel.inclusion().image_of(b));
        if through != *rel.projection().image_of(b) {
            restricts = false;
            detail = format!("disagrees at {}", rel.base().basis().name(b));
            break;
        }
    }
    report.push("restricts-to-projection", restricts, detail);

    let mut kills = true;
    let mut detail = String::new();
    for i in 0..ext.dim() {
        if ext.has_positive_word(i) && !theta.image_of(i).is_zero() {
            kills = false;
            detail = format!("sends {} to {}", ext.basis().name(i), {
                rel.quotient().render(theta.image_of(i))
            });
            break;
        }
    }
    report.push("kills-generator-words", kills, detail);

    let qi = is_quasi_iso(theta, cutoff)?;
    report.push(
        "quasi-isomorphism",
        qi.holds(),
        qi.first_failure()
            .map(|v| {
                format!(
                    "degree {}: source rank {}, target rank {}",
                    v.degree, v.source_dim, v.target_dim
                )
            })
            .unwrap_or_default(),
    );

    report.push(
        "normal-form",
        rel.normal_form_holds()?,
        "an adjoined differential has a base part outside the ideal".to_string(),
    );

    Ok(report)
}

/// Base parts of the pushout's generator differentials, per generator.
fn pushout_base_parts(model: &JoinModel) -> Vec<SparseVec> {
    let prime = model.pushout();
    let count = prime.generators().map_or(0, |g| g.len());
    (0..count)
        .map(|g| {
            let dv = prime.extension_gen_d(g).expect("extension repr");
            let mut base = SparseVec::zero();
            for (i, c) in dv.iter() {
                if !prime.has_positive_word(i) {
                    let (b, _) = prime.extension_pair(i).expect("extension repr");
                    base.add_term(b, c.clone());
                }
            }
            base
        })
        .collect()
}

/// Re-verify a staircase model: the relative side, the pushed-forward
/// differential, the sharper kernel-power normal form, and the triangle
/// identities.
pub fn check_join(model: &JoinModel) -> Result<CheckReport, Error> {
    let mut report = check_relative(model.relative())?;
    let prime = model.pushout();
    let source = model.phi().source();
    let cutoff = model.cutoff();

    let (ok, detail) = d_squared_vanishes(prime)?;
    report.push("pushout-differential-squares-to-zero", ok, detail);

    let mut in_power = true;
    let mut detail = String::new();
    for (g, base) in pushout_base_parts(model).iter().enumerate() {
        if !model.power().contains(base)? {
            in_power = false;
            let name = &prime.generators().expect("extension repr")[g].name;
            detail = format!("base part of D{name} escapes the kernel power");
            break;
        }
    }
    report.push("pushout-normal-form", in_power, detail);

    let mut lk = true;
    let mut ek = true;
    for a in 0..source.dim() {
        if source.degree(a) > cutoff {
            continue;
        }
        if model.lambda().apply(model.k().image_of(a)) != *model.p().image_of(a) {
            lk = false;
        }
        if model.ell().apply(model.k().image_of(a)) != *model.phi().image_of(a) {
            ek = false;
        }
    }
    report.push(
        "collapse-after-inclusion",
        lk,
        "deviates from the power-quotient projection".to_string(),
    );
    report.push(
        "target-after-inclusion",
        ek,
        "deviates from the morphism".to_string(),
    );

    let mut factors = true;
    for i in 0..prime.dim() {
        if model.phi_bar().apply(model.lambda().image_of(i)) != *model.ell().image_of(i) {
            factors = false;
            break;
        }
    }
    report.push(
        "induced-map-factorization",
        factors,
        "the induced map does not reproduce the target collapse".to_string(),
    );

    Ok(report)
}

/// Re-verify a solved retraction by substitution, item per property, and
/// compare with the certificate's own flags.
pub fn check_retraction(
    model: &JoinModel,
    cert: &RetractionCertificate,
) -> Result<CheckReport, Error> {
    let mut report = CheckReport::default();
    let prime = model.pushout();
    let source = model.phi().source();
    let target = model.phi().target();
    let phi = model.phi();
    let section = phi
        .section()
        .ok_or_else(|| Error::invalid("retraction checking needs a section".to_string()))?;
    let r = cert.map();
    let cutoff = model.cutoff();
    let cap = cutoff + 1;

    let mut chain = true;
    let mut detail = String::new();
    for e in 0..prime.dim() {
        if prime.degree(e) > cutoff {
            continue;
        }
        let lhs = r.apply(prime.d_basis(e)?);
        let rhs = source.d_elem(r.image_of(e))?;
        if lhs != rhs {
            chain = false;
            detail = format!("fails at {}", prime.basis().name(e));
            break;
        }
    }
    report.push("chain", chain, detail);

    let mut identity = true;
    let mut detail = String::new();
    for a in 0..source.dim() {
        if source.degree(a) > cap {
            continue;
        }
        if r.apply(model.k().image_of(a)) != SparseVec::unit(a) {
            identity = false;
            detail = format!("fails at {}", source.basis().name(a));
            break;
        }
    }
    report.push("identity-on-base", identity, detail);

    let mut module = true;
    let mut detail = String::new();
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
                module = false;
                detail = format!(
                    "fails at {} acting on {}",
                    target.basis().name(b),
                    prime.basis().name(e)
                );
                break 'outer;
            }
        }
    }
    report.push("module-linear", module, detail);

    let mut kernel = true;
    let mut detail = String::new();
    for e in 0..prime.dim() {
        if prime.has_positive_word(e) && !phi.apply(r.image_of(e)).is_zero() {
            kernel = false;
            detail = format!("image of {} survives the morphism", prime.basis().name(e));
            break;
        }
    }
    report.push("kernel-on-positive-words", kernel, detail);

    let claimed = cert.flags;
    let agrees = claimed.chain == chain
        && claimed.identity_on_base == identity
        && claimed.module_linear == module
        && claimed.kernel_on_positive == kernel;
    report.push(
        "flags-match-claim",
        agrees,
        format!("recomputed flags disagree with the certificate's {claimed:?}"),
    );

    Ok(report)
}

/// Unknown numbering shared with the solver by convention: ascending
/// `(positive-word element, source coordinate)` pairs.
fn unknown_ids(model: &JoinModel) -> BTreeMap<(usize, usize), usize> {
    let prime = model.pushout();
    let source = model.phi().source();
    let mut out = BTreeMap::new();
    let mut next = 0usize;
    for e in 0..prime.dim() {
        if !prime.has_positive_word(e) {
            continue;
        }
        for &f in source.basis().indices_in(prime.degree(e)) {
            out.insert((e, f), next);
            next += 1;
        }
    }
    out
}

/// Rebuild the scalar row of one constraint id: coefficients over the
/// unknowns and the constant right side, with the same orientation the
/// solver used (`r(lhs-side) - expected = 0` reads `row . x = rhs`).
fn rebuild_row(
    model: &JoinModel,
    unknowns: &BTreeMap<(usize, usize), usize>,
    id: &ConstraintId,
) -> Result<(SparseVec, Scalar, u32), Error> {
    let prime = model.pushout();
    let source = model.phi().source();
    let target = model.phi().target();
    let section = model
        .phi()
        .section()
        .ok_or_else(|| Error::invalid("row reconstruction needs a section".to_string()))?;
    let g = source
        .basis()
        .index_of(&id.coordinate)
        .ok_or_else(|| Error::invalid(format!("unknown coordinate `{}`", id.coordinate)))?;

    let mut row = SparseVec::zero();
    let mut rhs = crate::scalar::zero();

    match &id.key {
        ConstraintKey::Chain { element } => {
            let e = prime
                .basis()
                .index_of(element)
                .ok_or_else(|| Error::invalid(format!("unknown element `{element}`")))?;
            let de = prime.d_basis(e)?;
            // r(De) projected on g.
            for (i, c) in de.iter() {
                if prime.has_positive_word(i) {
                    row.add_term(unknowns[&(i, g)], c.clone());
                } else {
                    let (b, _) = prime.extension_pair(i).expect("extension repr");
                    if b == g {
                        rhs = &rhs - c;
                    }
                }
            }
            // minus d(r(e)) projected on g.
            for &f in source.basis().indices_in(prime.degree(e)) {
                let df = source.d_basis(f)?;
                let coeff = df.coeff(g);
                if !coeff.is_zero() {
                    row.add_term(unknowns[&(e, f)], -coeff);
                }
            }
            Ok((row, rhs, prime.degree(e) + 1))
        }
        ConstraintKey::Module { factor, element } => {
            let b = target
                .basis()
                .index_of(factor)
                .ok_or_else(|| Error::invalid(format!("unknown factor `{factor}`")))?;
            let e = prime
                .basis()
                .index_of(element)
                .ok_or_else(|| Error::invalid(format!("unknown element `{element}`")))?;
            let sb = section.image_of(b);
            let sb_prime = model.k().apply(sb);
            let product = prime.mul(&sb_prime, &SparseVec::unit(e))?;
            // r(s(b) * e) projected on g.
            for (i, c) in product.iter() {
                if prime.has_positive_word(i) {
                    row.add_term(unknowns[&(i, g)], c.clone());
                } else {
                    let (base, _) = prime.extension_pair(i).expect("extension repr");
                    if base == g {
                        rhs = &rhs - c;
                    }
                }
            }
            // minus s(b) * r(e) projected on g.
            for &f in source.basis().indices_in(prime.degree(e)) {
                let prod = source.mul(sb, &SparseVec::unit(f))?;
                let coeff = prod.coeff(g);
                if !coeff.is_zero() {
                    row.add_term(unknowns[&(e, f)], -coeff);
                }
            }
            Ok((row, rhs, target.degree(b) + prime.degree(e)))
        }
    }
}

/// Re-verify an infeasibility witness: rebuild every referenced constraint
/// row, form the claimed combination, and confirm it reads `0 = nonzero`
/// within the certified degree.
pub fn check_infeasibility(
    model: &JoinModel,
    cert: &InfeasibilityCertificate,
) -> Result<CheckReport, Error> {
    let mut report = CheckReport::default();
    let unknowns = unknown_ids(model);

    let mut combined = SparseVec::zero();
    let mut rhs_total = crate::scalar::zero();
    let mut max_degree = 0u32;
    let mut rebuilt = true;
    let mut detail = String::new();
    for (id, c) in &cert.witness {
        match rebuild_row(model, &unknowns, id) {
            Ok((row, rhs, degree)) => {
                combined.add_scaled(&row, c);
                rhs_total += c * &rhs;
                max_degree = max_degree.max(degree);
            }
            Err(e) => {
                rebuilt = false;
                detail = e.to_string();
                break;
            }
        }
    }
    report.push("rows-reconstructed", rebuilt, detail);
    if !rebuilt {
        return Ok(report);
    }

    report.push(
        "combination-kills-unknowns",
        combined.is_zero(),
        "the witness combination leaves unknown coefficients behind".to_string(),
    );
    report.push(
        "combination-right-side-nonzero",
        !rhs_total.is_zero(),
        "the witness combination has right side zero, proving nothing".to_string(),
    );
    report.push(
        "degree-consistent",
        max_degree <= cert.degree,
        format!(
            "witness touches degree {max_degree}, beyond the claimed obstruction degree {}",
            cert.degree
        ),
    );
    let failing_ok = rebuild_row(model, &unknowns, &cert.failing)
        .map(|(_, _, d)| d == cert.degree)
        .unwrap_or(false);
    report.push(
        "failing-row-at-claimed-degree",
        failing_ok,
        "the failing constraint does not live at the claimed degree".to_string(),
    );

    Ok(report)
}

/// Re-verify a nilpotency witness against the subspace it certifies: the
/// factors belong to the subspace, their product is the claimed one, that
/// product is nonzero, and the factor count equals the certified value.
pub fn check_nil_witness(ideal: &GradedIdeal, cert: &NilCertificate) -> Result<CheckReport, Error> {
    let mut report = CheckReport::default();
    let Some(witness) = &cert.witness else {
        report.push(
            "witness-present",
            cert.value == 0,
            "a positive value with no witness product attached".to_string(),
        );
        return Ok(report);
    };
    report.push("witness-present", true, String::new());

    let mut inside = true;
    let mut detail = String::new();
    for (k, f) in witness.factors.iter().enumerate() {
        if !ideal.contains(f)? {
            inside = false;
            detail = format!("factor {k} is outside the subspace");
            break;
        }
    }
    report.push("factors-in-subspace", inside, detail);

    let a = ideal.ambient();
    let mut product: Option<SparseVec> = None;
    for f in &witness.factors {
        product = Some(match product {
            None => f.clone(),
            Some(acc) => a.mul(&acc, f)?,
        });
    }
    let product = product.unwrap_or_default();
    report.push(
        "product-matches",
        product == witness.product,
        "recomputed product deviates from the recorded one".to_string(),
    );
    report.push(
        "product-nonzero",
        !product.is_zero(),
        "the witness product vanishes".to_string(),
    );
    report.push(
        "count-matches-value",
        witness.factors.len() as u32 == cert.value,
        format!(
            "{} factors for certified value {}",
            witness.factors.len(),
            cert.value
        ),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::table::test_fixtures::{projective, sphere};
    use crate::invariants::{msecat, zero_divisor_cuplength, MsecatOptions, StageResult};
    use crate::morphism::{left_unit_section, multiplication_morphism, Morphism};

    fn diagonal(a: &Arc<Algebra>) -> Morphism {
        let mu = multiplication_morphism(a, 2).unwrap();
        let power = Arc::clone(mu.source());
        let s = left_unit_section(a, &power).unwrap();
        mu.with_section(s).unwrap()
    }

    #[test]
    fn join_certification_passes_for_spheres() {
        for a in [sphere(2), sphere(3)] {
            let phi = diagonal(&a);
            let report = msecat(&phi, &MsecatOptions { n_max: 2, cutoff: 8 }).unwrap();
            for stage in &report.stages {
                let check = check_join(&stage.model).unwrap();
                assert!(
                    check.all_ok(),
                    "{}: {:?}",
                    a.name(),
                    check.failures().collect::<Vec<_>>()
                );
            }
        }
    }

    #[test]
    fn certificates_survive_independent_checking() {
        let phi = diagonal(&sphere(2));
        let report = msecat(&phi, &MsecatOptions { n_max: 3, cutoff: 8 }).unwrap();
        assert_eq!(report.value, Some(2));
        for stage in &report.stages {
            match &stage.result {
                StageResult::Infeasible(cert) => {
                    let check = check_infeasibility(&stage.model, cert).unwrap();
                    assert!(
                        check.all_ok(),
                        "n={}: {:?}",
                        stage.n,
                        check.failures().collect::<Vec<_>>()
                    );
                }
                StageResult::Feasible(cert) => {
                    let check = check_retraction(&stage.model, cert).unwrap();
                    assert!(
                        check.all_ok(),
                        "n={}: {:?}",
                        stage.n,
                        check.failures().collect::<Vec<_>>()
                    );
                }
            }
        }
    }

    #[test]
    fn nil_witness_checks_out_for_projective_plane() {
        let a = projective(2);
        let cert = zero_divisor_cuplength(&a).unwrap();
        assert_eq!(cert.value, 4);
        let mu = multiplication_morphism(&a, 2).unwrap();
        let kernel = GradedIdeal::kernel(&mu);
        let check = check_nil_witness(&kernel, &cert).unwrap();
        assert!(check.all_ok(), "{:?}", check.failures().collect::<Vec<_>>());
    }

    #[test]
    fn tampered_witness_is_caught() {
        let a = projective(2);
        let mut cert = zero_divisor_cuplength(&a).unwrap();
        let mu = multiplication_morphism(&a, 2).unwrap();
        let kernel = GradedIdeal::kernel(&mu);
        if let Some(w) = &mut cert.witness {
            w.factors.pop();
        }
        let check = check_nil_witness(&kernel, &cert).unwrap();
        assert!(!check.all_ok());
    }
}
