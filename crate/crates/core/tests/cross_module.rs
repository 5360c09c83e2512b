use gk_core::factorize::lempel_factorize;
use gk_core::guard::ResourceGuard;
use gk_core::kneser::{ExplicitGraph, GKGraph, GKParams, Graph};
use gk_core::oracles::{minrank_exact, od_exact_gf2, OracleBudget};
use gk_core::polyrep::representing_matrix_mod_p;

fn small_params() -> Vec<GKParams> {
    let mut out = Vec::new();
    for d in 1..=6 {
        for s in 1..=d {
            for m in 1..=s {
                let p = GKParams::new(d, s, m).unwrap();
                if GKGraph::build(p).order() <= 6 {
                    out.push(p);
                }
            }
        }
    }
    out
}

#[test]
fn exact_minrank_never_exceeds_polynomial_rank() {
    let budget = OracleBudget::default();
    let guard = ResourceGuard::default();
    let mut checked = 0;
    for params in small_params() {
        let g = ExplicitGraph::materialize(&GKGraph::build(params));
        // free entries are ordered adjacent pairs; keep the search small
        if 2 * g.edges().len() > 16 {
            continue;
        }
        checked += 1;
        for p in [2u64, 3] {
            let rep = representing_matrix_mod_p(params, p, &guard).unwrap();
            let exact = minrank_exact(&g, p, &budget).unwrap();
            assert!(exact <= rep.rank, "{params} p={p}: minrank {exact} > rank {}", rep.rank);
        }
    }
    assert!(checked >= 10, "only {checked} graphs checked");
}

#[test]
fn factor_of_representing_matrix_is_a_complement_representation() {
    let budget = OracleBudget::default();
    let guard = ResourceGuard::default();
    for params in small_params() {
        let gk = GKGraph::build(params);
        let rep = representing_matrix_mod_p(params, 2, &guard).unwrap();
        let m = rep.matrix.as_gf2().unwrap();
        let f = lempel_factorize(m).unwrap();
        let n = gk.order();
        for u in 0..n {
            assert!(f.b.row_dot(u, &f.b, u));
            for v in 0..n {
                if u != v && !gk.adjacent(u, v) {
                    assert!(!f.b.row_dot(u, &f.b, v), "{params}: ({u},{v})");
                }
            }
        }
        // the exact optimum over GF(2) is no larger than the factor built here
        let complement = ExplicitGraph::materialize(&gk).complement();
        let od = od_exact_gf2(&complement, &budget).unwrap();
        assert!(od <= f.b.cols(), "{params}: od {od} > {}", f.b.cols());
    }
}
