//! Stagewise feasibility of module retractions for diagonal maps of small
//! spheres: pinned values, pinned obstruction degrees, persistence of
//! infeasibility under a deeper cutoff, and independent certificate checks.

mod common;

use common::{diagonal, sphere};
use ratho::certcheck::{check_infeasibility, check_join, check_retraction};
use ratho::invariants::{
    evaluate_retraction, mrelcat, msecat, solve_retraction, MsecatOptions, StageResult,
};
use ratho::sullivan::join_model;
use ratho::{LinearMap, SparseVec};

#[test]
fn odd_sphere_needs_exactly_one_stage() {
    let phi = diagonal(&sphere(3));
    let report = msecat(&phi, &MsecatOptions { n_max: 2, cutoff: 10 }).unwrap();
    assert_eq!(report.value, Some(1));
    assert_eq!(report.obstruction_degree(0), Some(3));
    assert_eq!(report.stages.len(), 2);

    match &report.stages[0].result {
        StageResult::Infeasible(cert) => {
            assert_eq!(cert.degree, 3);
            assert!(cert.crosschecked);
            let check = check_infeasibility(&report.stages[0].model, cert).unwrap();
            assert!(check.all_ok(), "{:?}", check.failures().collect::<Vec<_>>());
        }
        StageResult::Feasible(_) => panic!("stage 0 must be infeasible"),
    }
    match &report.stages[1].result {
        StageResult::Feasible(cert) => {
            let check = check_retraction(&report.stages[1].model, cert).unwrap();
            assert!(check.all_ok(), "{:?}", check.failures().collect::<Vec<_>>());
        }
        StageResult::Infeasible(_) => panic!("stage 1 must be feasible"),
    }
}

#[test]
fn odd_sphere_stage_zero_model_adjoins_one_generator_below_the_kernel() {
    let phi = diagonal(&sphere(3));
    let model = join_model(&phi, 0, 10).unwrap();
    let rel = model.relative();
    assert_eq!(rel.generators().len(), 1);
    assert_eq!(rel.generators()[0].degree, 2);

    // Dw is the difference 1 tensor y - y tensor 1 up to sign, pulled back
    // into the extension's base coordinates.
    let ext = rel.extension();
    let d = ext.extension_gen_d(0).unwrap();
    let mut base_part = SparseVec::zero();
    for (i, c) in d.iter() {
        let (b, expo) = ext.extension_pair(i).unwrap();
        assert!(expo.iter().all(|&e| e == 0), "Dw must be pure base");
        base_part.add_term(b, c.clone());
    }
    let a = phi.target();
    let power = phi.source();
    let y = a.basis().index_of("y").unwrap();
    let unit = a.unit_index();
    let bar = SparseVec::unit(power.tensor_index(unit, y).unwrap())
        .sub(&SparseVec::unit(power.tensor_index(y, unit).unwrap()));
    assert!(base_part == bar || base_part == bar.negated());
}

#[test]
fn even_sphere_needs_two_stages_with_pinned_obstructions() {
    let phi = diagonal(&sphere(2));
    let report = msecat(&phi, &MsecatOptions { n_max: 3, cutoff: 8 }).unwrap();
    assert_eq!(report.value, Some(2));
    assert_eq!(report.stages.len(), 3);
    assert_eq!(report.obstruction_degree(0), Some(2));
    assert_eq!(report.obstruction_degree(1), Some(4));
    assert!(matches!(report.stages[2].result, StageResult::Feasible(_)));

    for stage in &report.stages {
        let check = check_join(&stage.model).unwrap();
        assert!(
            check.all_ok(),
            "stage {}: {:?}",
            stage.n,
            check.failures().collect::<Vec<_>>()
        );
    }
}

#[test]
fn infeasibility_survives_a_deeper_cutoff_with_the_same_degree() {
    let phi = diagonal(&sphere(2));
    for (n, want_degree) in [(0u32, 2u32), (1, 4)] {
        let model = join_model(&phi, n, 12).unwrap();
        match solve_retraction(&model).unwrap() {
            StageResult::Infeasible(cert) => {
                assert_eq!(cert.degree, want_degree, "stage {n} at cutoff 12");
                let check = check_infeasibility(&model, &cert).unwrap();
                assert!(check.all_ok(), "{:?}", check.failures().collect::<Vec<_>>());
            }
            StageResult::Feasible(_) => panic!("stage {n} must stay infeasible at cutoff 12"),
        }
    }
}

#[test]
fn normalized_winning_stage_carries_all_four_flags() {
    let phi = diagonal(&sphere(3));
    let report = mrelcat(&phi, &MsecatOptions { n_max: 1, cutoff: 8 }).unwrap();
    assert_eq!(report.value, Some(1));
    let StageResult::Feasible(cert) = &report.stages[1].result else {
        panic!("stage 1 must be feasible");
    };
    assert!(cert.flags.chain);
    assert!(cert.flags.identity_on_base);
    assert!(cert.flags.module_linear);
    assert!(cert.flags.kernel_on_positive);
    assert!(cert.flags.all());
}

#[test]
fn evaluation_catches_a_tampered_retraction() {
    let phi = diagonal(&sphere(3));
    let report = msecat(&phi, &MsecatOptions { n_max: 1, cutoff: 8 }).unwrap();
    let stage = report.stages.last().unwrap();
    let StageResult::Feasible(cert) = &stage.result else {
        panic!("stage 1 must be feasible");
    };
    let flags = evaluate_retraction(&stage.model, cert.map()).unwrap();
    assert!(flags.chain && flags.identity_on_base && flags.module_linear);

    // Zero out the image of an embedded positive-degree base element; the
    // identity-on-base flag must notice.
    let model = &stage.model;
    let a = model.mu().target();
    let target_idx = (0..a.dim()).find(|&i| a.degree(i) > 0).unwrap();
    let embedded = model.k().map().image_of(target_idx).leading().unwrap();
    let mut images = cert.map().images().to_vec();
    images[embedded] = SparseVec::zero();
    let tampered = LinearMap::new(
        "tampered",
        cert.map().source(),
        cert.map().target(),
        images,
    )
    .unwrap();
    let flags = evaluate_retraction(model, &tampered).unwrap();
    assert!(!flags.identity_on_base);
}
