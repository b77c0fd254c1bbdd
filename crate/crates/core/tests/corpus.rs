//! Graphs supplied as corpus files rather than built in.

use isomat::cli::parse_graphs;
use isomat::connectivity::kappa;
use isomat::harness::{circle_bound_check, run_on_graphs, CampaignKind};
use isomat::graph::Graph;

fn bw3() -> Graph {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/bw3.txt")).unwrap();
    let mut graphs = parse_graphs(&text).unwrap();
    assert_eq!(graphs.len(), 1);
    graphs.pop().unwrap()
}

#[test]
fn bw3_meets_the_circle_bound() {
    let g = bw3();
    assert_eq!(g.n(), 7);
    assert_eq!(g.min_degree(), Some(2));
    assert_eq!(kappa(&g).kappa, 5);
    let verdict = circle_bound_check(&g, true);
    assert!(verdict.satisfied);
    assert!(verdict.verdict.is_none());
}

#[test]
fn wheels_are_certified_non_circle() {
    for g in [Graph::wheel(5), Graph::wheel(7)] {
        let v = circle_bound_check(&g, true);
        assert!(!v.satisfied);
        assert_eq!(v.verdict, Some("certified non-circle-graph"));
    }
}

#[test]
fn campaign_predicates_accept_a_corpus() {
    let graphs = [bw3(), Graph::wheel(6), Graph::cycle(7)];
    for kind in [CampaignKind::Cconnect, CampaignKind::Vconnect, CampaignKind::Halfcirc, CampaignKind::Lowdeg, CampaignKind::Expdegree] {
        let agg = run_on_graphs(kind, &graphs);
        assert_eq!((agg.graphs, agg.failed), (3, 0), "{kind}: {:?}", agg.counterexamples);
    }
}
