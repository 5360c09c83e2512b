use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExplicitGraph, Graph, GraphError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddGirthVerdict {
    /// True iff no odd cycle of length `<= ell` was found.
    pub exceeds: bool,
    /// A shortest odd cycle among the sources searched, as a vertex sequence.
    pub witness: Option<Vec<usize>>,
}

/// Layered BFS from `source` up to layer `max_layer`. Returns the smallest
/// layer `j` carrying an edge between two layer-`j` vertices, together with
/// the odd cycle it closes (through the lowest common BFS ancestor).
fn odd_cycle_from<G: Graph>(
    g: &G,
    source: usize,
    max_layer: usize,
    dist: &mut [u32],
    parent: &mut [usize],
) -> Option<Vec<usize>> {
    const UNSEEN: u32 = u32::MAX;
    let mut touched = vec![source];
    dist[source] = 0;
    let mut layer = vec![source];
    let mut found = None;
    'outer: for j in 0..=max_layer {
        let mut next = Vec::new();
        for &x in &layer {
            for y in g.neighbors(x) {
                if dist[y] == j as u32 {
                    found = Some((x, y));
                    break 'outer;
                }
                if dist[y] == UNSEEN && j < max_layer {
                    dist[y] = j as u32 + 1;
                    parent[y] = x;
                    touched.push(y);
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    let cycle = found.map(|(x, y)| {
        let (mut a, mut b) = (vec![x], vec![y]);
        let (mut u, mut v) = (x, y);
        while u != v {
            u = parent[u];
            v = parent[v];
            a.push(u);
            b.push(v);
        }
        // a ends at the common ancestor; b repeats it
        b.pop();
        a.reverse();
        a.extend(b);
        a
    });
    for t in touched {
        dist[t] = UNSEEN;
    }
    cycle
}

fn check_ell(ell: usize) -> Result<usize, GraphError> {
    if ell < 3 || ell % 2 == 0 {
        return Err(GraphError::BadCycleLength(ell));
    }
    Ok((ell - 1) / 2)
}

/// Searches for odd cycles of length `<= ell` through the given sources.
/// Any odd cycle of length `2j + 1` through a vertex `v` produces an edge
/// inside some BFS layer `i <= j` from `v`, so searching from every vertex is
/// exhaustive; the witness returned is then a shortest odd cycle.
pub fn odd_girth_exceeds_from<G: Graph>(
    g: &G,
    ell: usize,
    sources: impl IntoIterator<Item = usize>,
) -> Result<OddGirthVerdict, GraphError> {
    let mut max_layer = check_ell(ell)?;
    let n = g.order();
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut best: Option<Vec<usize>> = None;
    for s in sources {
        if s >= n {
            return Err(GraphError::VertexOutOfRange(s));
        }
        if let Some(c) = odd_cycle_from(g, s, max_layer, &mut dist, &mut parent) {
            let layer = (c.len() - 1) / 2;
            if best.as_ref().is_none_or(|b| c.len() < b.len()) {
                best = Some(c);
            }
            if layer == 1 {
                break;
            }
            // only shorter cycles matter from here on
            max_layer = layer - 1;
        }
    }
    Ok(OddGirthVerdict { exceeds: best.is_none(), witness: best })
}

/// True iff `g` has no odd cycle of length at most `ell` (odd, `>= 3`).
pub fn odd_girth_exceeds<G: Graph>(g: &G, ell: usize) -> Result<OddGirthVerdict, GraphError> {
    odd_girth_exceeds_from(g, ell, 0..g.order())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GirthMode {
    /// BFS from every vertex.
    Exhaustive,
    /// BFS from vertex 0 only. Exact for vertex-transitive graphs such as
    /// every `K(d, s, m)`: any short odd cycle maps onto one through vertex 0.
    Transitive,
    /// Exhaustive search inside random induced subgraphs. A cycle found in a
    /// subgraph is a cycle of the whole graph, but finding none proves nothing.
    Sampled { samples: usize, size: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GirthOutcome {
    Verified,
    NoViolationInSample,
    Refuted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GirthCheck {
    pub ell: usize,
    pub mode: GirthMode,
    pub outcome: GirthOutcome,
    pub witness: Option<Vec<usize>>,
}

impl GirthCheck {
    pub fn run<G: Graph>(g: &G, ell: usize, mode: GirthMode) -> Result<GirthCheck, GraphError> {
        let n = g.order();
        let (outcome, witness) = match &mode {
            GirthMode::Exhaustive => {
                let v = odd_girth_exceeds(g, ell)?;
                (if v.exceeds { GirthOutcome::Verified } else { GirthOutcome::Refuted }, v.witness)
            }
            GirthMode::Transitive => {
                let v = odd_girth_exceeds_from(g, ell, (n > 0).then_some(0))?;
                (if v.exceeds { GirthOutcome::Verified } else { GirthOutcome::Refuted }, v.witness)
            }
            GirthMode::Sampled { samples, size, seed } => {
                check_ell(ell)?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut result = (GirthOutcome::NoViolationInSample, None);
                for _ in 0..*samples {
                    let mut keep = sample(&mut rng, n, (*size).min(n)).into_vec();
                    keep.sort_unstable();
                    let sub = ExplicitGraph::induced(g, &keep);
                    let v = odd_girth_exceeds(&sub, ell)?;
                    if let Some(w) = v.witness {
                        result = (GirthOutcome::Refuted, Some(w.into_iter().map(|i| keep[i]).collect()));
                        break;
                    }
                }
                if n <= *size && result.0 == GirthOutcome::NoViolationInSample {
                    // the sample was the whole graph
                    result.0 = GirthOutcome::Verified;
                }
                result
            }
        };
        Ok(GirthCheck { ell, mode, outcome, witness })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneser::{GKGraph, GKParams};

    fn is_odd_cycle<G: Graph>(g: &G, c: &[usize]) -> bool {
        let mut sorted = c.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        c.len() % 2 == 1 && sorted.len() == c.len() && (0..c.len()).all(|i| g.adjacent(c[i], c[(i + 1) % c.len()]))
    }

    #[test]
    fn even_or_short_bound_rejected() {
        let g = ExplicitGraph::cycle(3);
        assert_eq!(odd_girth_exceeds(&g, 4), Err(GraphError::BadCycleLength(4)));
        assert_eq!(odd_girth_exceeds(&g, 1), Err(GraphError::BadCycleLength(1)));
    }

    #[test]
    fn triangle_found() {
        let g = ExplicitGraph::complete(3);
        let v = odd_girth_exceeds(&g, 3).unwrap();
        assert!(!v.exceeds);
        assert_eq!(v.witness.as_ref().unwrap().len(), 3);
        assert!(is_odd_cycle(&g, v.witness.as_ref().unwrap()));
    }

    #[test]
    fn petersen_has_odd_girth_five() {
        let g = GKGraph::build(GKParams::new(5, 2, 1).unwrap());
        assert!(odd_girth_exceeds(&g, 3).unwrap().exceeds);
        let v = odd_girth_exceeds(&g, 5).unwrap();
        assert!(!v.exceeds);
        let w = v.witness.unwrap();
        assert_eq!(w.len(), 5);
        assert!(is_odd_cycle(&g, &w));
    }

    #[test]
    fn witness_is_shortest() {
        // 7-cycle with a chord making a 5-cycle: 0-1-2-3-4-5-6-0 plus 0-4 (cycle 0,1,2,3,4 of length 5; 0,4,5,6 even)
        let g = ExplicitGraph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (0, 4)]).unwrap();
        let v = odd_girth_exceeds(&g, 7).unwrap();
        assert_eq!(v.witness.as_ref().unwrap().len(), 5);
        assert!(is_odd_cycle(&g, v.witness.as_ref().unwrap()));
        assert!(odd_girth_exceeds(&g, 3).unwrap().exceeds);
        assert!(odd_girth_exceeds(&ExplicitGraph::cycle(8), 99).unwrap().exceeds);
    }

    #[test]
    fn modes_agree_on_kneser_graphs() {
        for (d, s, m, ell) in [(6, 3, 1, 3), (8, 4, 1, 3), (9, 4, 2, 3), (7, 3, 1, 5), (7, 3, 2, 3)] {
            let g = GKGraph::build(GKParams::new(d, s, m).unwrap());
            let ex = GirthCheck::run(&g, ell, GirthMode::Exhaustive).unwrap();
            let tr = GirthCheck::run(&g, ell, GirthMode::Transitive).unwrap();
            assert_eq!(ex.outcome, tr.outcome, "K({d},{s},{m}) ell={ell}");
            if let Some(w) = &tr.witness {
                assert!(is_odd_cycle(&g, w));
            }
        }
    }

    #[test]
    fn sampled_mode_refutes_with_mapped_witness() {
        let g = ExplicitGraph::complete(40);
        let c = GirthCheck::run(&g, 3, GirthMode::Sampled { samples: 2, size: 5, seed: 1 }).unwrap();
        assert_eq!(c.outcome, GirthOutcome::Refuted);
        assert!(is_odd_cycle(&g, c.witness.as_ref().unwrap()));
        let bip = ExplicitGraph::from_predicate(40, |u, v| (u + v) % 2 == 1);
        let c = GirthCheck::run(&bip, 3, GirthMode::Sampled { samples: 3, size: 10, seed: 1 }).unwrap();
        assert_eq!(c.outcome, GirthOutcome::NoViolationInSample);
    }

    #[test]
    fn short_odd_cycles_absent_when_m_small() {
        // no odd cycle of length <= ell in K(d, d/2, m) whenever m <= d / (2 ell)
        for d in (2..=14u32).step_by(2) {
            for ell in (3..=d as usize).step_by(2) {
                for m in 1..=(d as usize / (2 * ell)) as u32 {
                    let g = GKGraph::build(GKParams::new(d, d / 2, m).unwrap());
                    let mode = if g.order() <= 1000 { GirthMode::Exhaustive } else { GirthMode::Transitive };
                    let c = GirthCheck::run(&g, ell, mode).unwrap();
                    assert_eq!(c.outcome, GirthOutcome::Verified, "d={d} m={m} ell={ell}");
                }
            }
        }
    }
}
