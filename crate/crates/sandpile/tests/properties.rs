//! Randomized property tests for the core invariants.

use proptest::prelude::*;

use sandpile::{divisor, dynamics, group, ideal, Graph, Int};

const CAP: u64 = 1_000_000;

fn load(name: &str) -> Graph {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    Graph::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn graphs() -> Vec<Graph> {
    ["fig1.sg", "ex45.sg", "diamond.sg", "fig8.sg"].iter().map(|f| load(f)).collect()
}

proptest! {
    /// Stabilization is idempotent and conserves sand modulo firings.
    #[test]
    fn stabilize_idempotent(raw in proptest::collection::vec(0i64..20, 3)) {
        for g in graphs() {
            let c: Vec<i64> = raw.iter().cycle().take(g.n()).copied().collect();
            let (stable, script) = dynamics::stabilize(&g, &c).unwrap();
            prop_assert!(dynamics::is_stable(&g, &stable));
            let (again, zero) = dynamics::stabilize(&g, &stable).unwrap();
            prop_assert_eq!(&again, &stable);
            prop_assert!(zero.iter().all(|&s| s == 0));
            // c - reduced Laplacian * script = stable
            let fired = dynamics::fire(&g, &c, &script).unwrap();
            prop_assert_eq!(&fired, &stable);
        }
    }

    /// Stable addition is commutative.
    #[test]
    fn stable_add_commutes(
        a in proptest::collection::vec(0i64..6, 3),
        b in proptest::collection::vec(0i64..6, 3),
    ) {
        for g in graphs() {
            let a: Vec<i64> = a.iter().cycle().take(g.n()).copied().collect();
            let b: Vec<i64> = b.iter().cycle().take(g.n()).copied().collect();
            let a = dynamics::stabilize(&g, &a).unwrap().0;
            let b = dynamics::stabilize(&g, &b).unwrap().0;
            prop_assert_eq!(
                dynamics::stable_add(&g, &a, &b).unwrap(),
                dynamics::stable_add(&g, &b, &a).unwrap()
            );
        }
    }

    /// Superstabilization lands on a superstable configuration in the
    /// same class modulo the reduced Laplacian lattice.
    #[test]
    fn superstabilize_is_superstable(raw in proptest::collection::vec(0i64..15, 3)) {
        for g in graphs() {
            let c: Vec<i64> = raw.iter().cycle().take(g.n()).copied().collect();
            let (ss, script) = dynamics::superstabilize(&g, &c).unwrap();
            prop_assert!(dynamics::is_superstable(&g, &ss).unwrap());
            let fired = dynamics::fire(&g, &c, &script).unwrap();
            prop_assert_eq!(fired, ss);
        }
    }

    /// Group addition on superstable representatives is associative.
    #[test]
    fn group_add_associative(idx in proptest::collection::vec(0usize..8, 3)) {
        for g in graphs() {
            let ss = group::enumerate_superstables(&g, CAP).unwrap();
            let a = &ss[idx[0] % ss.len()];
            let b = &ss[idx[1] % ss.len()];
            let c = &ss[idx[2] % ss.len()];
            let ab_c = group::group_add(&g, &group::group_add(&g, a, b).unwrap(), c).unwrap();
            let a_bc = group::group_add(&g, a, &group::group_add(&g, b, c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
        }
    }

    /// Linear equivalence is invariant under adding principal divisors,
    /// and rank is equivalence-invariant on undirected graphs.
    #[test]
    fn equivalence_respects_laplacian(
        d in proptest::collection::vec(-2i64..4, 4),
        v in 0usize..4,
    ) {
        let g = load("diamond.sg");
        let lap = g.laplacian();
        let shifted: Vec<i64> = (0..4)
            .map(|u| {
                let col: Int = lap[(u, v)].clone();
                d[u] + i64::try_from(col).unwrap()
            })
            .collect();
        prop_assert!(divisor::is_equivalent(&g, &d, &shifted).unwrap());
        prop_assert_eq!(
            divisor::rank(&g, &d).unwrap(),
            divisor::rank(&g, &shifted).unwrap()
        );
    }

    /// The normal form of a monomial against the Groebner basis never
    /// depends on reduction order: it equals the superstabilization.
    #[test]
    fn normal_form_agrees(raw in proptest::collection::vec(0i64..12, 3)) {
        for g in graphs() {
            let basis = ideal::groebner_basis(&g, true).unwrap();
            let c: Vec<i64> = raw.iter().cycle().take(g.n()).copied().collect();
            prop_assert_eq!(
                ideal::normal_form(&basis, &c),
                dynamics::superstabilize(&g, &c).unwrap().0
            );
        }
    }
}
