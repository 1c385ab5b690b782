//! Structural properties that must hold for every seeded random algebra:
//! validation, degreewise rank-nullity of the multiplication map, checkable
//! nilpotency certificates, and faithful re-expression as a product table.

mod common;

use common::diagonal;
use ratho::algebra::validate_algebra;
use ratho::certcheck::check_nil_witness;
use ratho::ideal::nil;
use ratho::random::{random_cdga, tabulate};
use ratho::GradedIdeal;

const SEEDS: std::ops::Range<u64> = 0..20;

#[test]
fn random_algebras_validate() {
    for seed in SEEDS {
        let a = random_cdga(seed, 8).unwrap();
        let report = validate_algebra(&a).unwrap();
        assert!(report.is_valid(), "seed {seed}: {report:?}");
    }
}

#[test]
fn kernel_dimensions_satisfy_rank_nullity_degreewise() {
    for seed in SEEDS {
        let a = random_cdga(seed, 8).unwrap();
        let mu = diagonal(&a);
        let power = mu.source();
        let k = GradedIdeal::kernel(&mu);

        for v in k.spanning_vectors() {
            assert!(mu.apply(v).is_zero(), "seed {seed}: kernel vector survives");
        }
        for m in 0..=power.top() {
            let dim = power.basis().dim_in(m);
            let rank = mu.map().rank_in_degree(m);
            assert_eq!(
                k.dim_in(m),
                dim - rank,
                "seed {seed} degree {m}: nullity mismatch"
            );
        }
    }
}

#[test]
fn nilpotency_certificates_of_random_kernels_survive_the_checker() {
    for seed in SEEDS {
        let a = random_cdga(seed, 8).unwrap();
        let mu = diagonal(&a);
        let k = GradedIdeal::kernel(&mu);
        let cert = nil(&k).unwrap();
        let report = check_nil_witness(&k, &cert).unwrap();
        assert!(
            report.all_ok(),
            "seed {seed}: {:?}",
            report.failures().collect::<Vec<_>>()
        );
    }
}

#[test]
fn tabulated_copies_keep_the_basis_and_the_products() {
    for seed in SEEDS {
        let a = random_cdga(seed, 8).unwrap();
        let t = tabulate(&a).unwrap();
        assert_eq!(t.dim(), a.dim(), "seed {seed}");
        assert_eq!(t.top(), a.top(), "seed {seed}");
        assert_eq!(t.is_complete(), a.is_complete(), "seed {seed}");
        for i in 0..a.dim() {
            assert_eq!(t.basis().name(i), a.basis().name(i), "seed {seed}");
            assert_eq!(t.degree(i), a.degree(i), "seed {seed}");
        }
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                if !a.is_complete() && a.degree(i) + a.degree(j) > a.top() {
                    continue;
                }
                assert_eq!(
                    t.mul_basis(i, j).unwrap(),
                    a.mul_basis(i, j).unwrap(),
                    "seed {seed}: product {i} {j}"
                );
            }
            if a.is_complete() || a.degree(i) + 1 <= a.top() {
                assert_eq!(
                    t.d_basis(i).unwrap(),
                    a.d_basis(i).unwrap(),
                    "seed {seed}: differential {i}"
                );
            }
        }
    }
}
