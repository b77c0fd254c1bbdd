//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Graphs cross the boundary in the compact hex form (`<n>:<digits>`);
//! results are JSON strings. The plain functions carry the logic and are
//! tested natively; the `#[wasm_bindgen]` wrappers only convert errors.

use isomat::connectivity::analyze;
use isomat::graph::{Graph, VertexSet};
use isomat::harness;
use isomat::isotropic::IsotropicMatroid;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Vertex limit for the demo: the connectivity scans are exponential.
pub const MAX_DEMO_VERTICES: usize = 12;

fn parse(graph: &str) -> Result<Graph, String> {
    let g: Graph = graph.parse().map_err(|e: isomat::GraphError| e.to_string())?;
    if g.n() > MAX_DEMO_VERTICES {
        return Err(format!("the demo handles at most {MAX_DEMO_VERTICES} vertices"));
    }
    Ok(g)
}

fn vertex(g: &Graph, v: u32) -> Result<usize, String> {
    let v = v as usize;
    if v < g.n() {
        Ok(v)
    } else {
        Err(format!("vertex {v} out of range"))
    }
}

/// Connectivity report plus the smallest transverse circuit size.
pub fn analyze_json(graph: &str) -> Result<String, String> {
    let g = parse(graph)?;
    let q = IsotropicMatroid::build(&g)
        .min_transverse_circuit(None)
        .ok()
        .and_then(|s| s.q());
    let report = analyze(&g);
    Ok(json!({
        "graph": g,
        "report": report,
        "q": q,
        "prime": g.is_prime(),
        "edges": g.edges().collect::<Vec<_>>(),
        "loops": g.loops(),
    })
    .to_string())
}

/// `mode` is `"local"` (simple local complementation), `"nonsimple"`, or
/// `"loop"`. Returns the new graph's hex form.
pub fn complement_hex(graph: &str, v: u32, mode: &str) -> Result<String, String> {
    let g = parse(graph)?;
    let v = vertex(&g, v)?;
    let h = match mode {
        "local" => g.simple_local_complement(v),
        "nonsimple" => g.nonsimple_local_complement(v),
        "loop" => g.loop_complement(v),
        other => return Err(format!("unknown complementation {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    Ok(h.to_hex())
}

/// Adds or removes the edge `uv`.
pub fn toggle_edge_hex(graph: &str, u: u32, v: u32) -> Result<String, String> {
    let g = parse(graph)?;
    let (u, v) = (vertex(&g, u)?, vertex(&g, v)?);
    if u == v {
        return Err("loops are toggled with the loop complementation".into());
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&e| e != (u.min(v), u.max(v)))
        .chain((!g.has_edge(u, v)).then_some((u.min(v), u.max(v))))
        .collect();
    let loops = g.loops().to_vec();
    Graph::from_edges(g.n(), &edges, &loops)
        .map(|h| h.to_hex())
        .map_err(|e| e.to_string())
}

/// Cut-rank of the vertex set given as a bitmask, with the rank of its
/// vertex triples for comparison.
pub fn cut_rank_json(graph: &str, mask: u32) -> Result<String, String> {
    let g = parse(graph)?;
    let x = VertexSet(mask as u64);
    if !x.is_subset(g.vertices()) {
        return Err("vertex set out of range".into());
    }
    let m = IsotropicMatroid::build(&g);
    let t = m.tau(x);
    Ok(json!({
        "cut_rank": g.cut_rank(x),
        "size": x.len(),
        "rank_tau": m.rank_of(&t),
        "lambda_tau": m.lambda(&t),
    })
    .to_string())
}

pub fn fixture_hex(name: &str) -> Result<String, String> {
    if let Some(rim) = name.strip_prefix('c').and_then(|k| k.parse::<usize>().ok()) {
        if (3..=MAX_DEMO_VERTICES).contains(&rim) {
            return Ok(Graph::cycle(rim).to_hex());
        }
    }
    harness::fixture(name)
        .map(|g| g.to_hex())
        .ok_or_else(|| format!("unknown fixture {name:?}"))
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analyze_graph(graph: &str) -> Result<String, JsError> {
    js(analyze_json(graph))
}

#[wasm_bindgen]
pub fn complement(graph: &str, v: u32, mode: &str) -> Result<String, JsError> {
    js(complement_hex(graph, v, mode))
}

#[wasm_bindgen]
pub fn toggle_edge(graph: &str, u: u32, v: u32) -> Result<String, JsError> {
    js(toggle_edge_hex(graph, u, v))
}

#[wasm_bindgen]
pub fn cut_rank(graph: &str, mask: u32) -> Result<String, JsError> {
    js(cut_rank_json(graph, mask))
}

#[wasm_bindgen]
pub fn fixture(name: &str) -> Result<String, JsError> {
    js(fixture_hex(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn analyze_reports_all_parameters() {
        let c5 = fixture_hex("c5").unwrap();
        let v: Value = serde_json::from_str(&analyze_json(&c5).unwrap()).unwrap();
        assert_eq!(v["report"]["kappa"], 5);
        assert_eq!(v["report"]["kappa_B"], "inf");
        assert_eq!(v["q"], 3);
        assert_eq!(v["prime"], true);
        assert_eq!(v["edges"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn complementation_keeps_connectivity() {
        let w5 = fixture_hex("w5").unwrap();
        let kappa = |h: &str| -> Value {
            let v: Value = serde_json::from_str(&analyze_json(h).unwrap()).unwrap();
            v["report"]["kappa"].clone()
        };
        let mut h = w5.clone();
        for (v, mode) in [(0, "local"), (5, "loop"), (2, "nonsimple"), (5, "local")] {
            h = complement_hex(&h, v, mode).unwrap();
            assert_eq!(kappa(&h), 6);
        }
        assert_ne!(h, w5);
        assert!(complement_hex(&w5, 9, "local").is_err());
        assert!(complement_hex(&w5, 0, "pivot").is_err());
    }

    #[test]
    fn edge_toggles_and_cut_ranks() {
        let p = fixture_hex("p4").unwrap();
        let q = toggle_edge_hex(&p, 3, 0).unwrap();
        assert_eq!(q.parse::<Graph>().unwrap(), Graph::cycle(4));
        assert_eq!(toggle_edge_hex(&q, 0, 3).unwrap(), p);
        assert!(toggle_edge_hex(&p, 1, 1).is_err());
        let v: Value = serde_json::from_str(&cut_rank_json(&fixture_hex("c5").unwrap(), 0b00011).unwrap()).unwrap();
        assert_eq!(v["cut_rank"], 2);
        assert_eq!(v["rank_tau"], 4);
        assert_eq!(v["lambda_tau"], 4);
        assert!(cut_rank_json(&p, 1 << 7).is_err());
    }

    #[test]
    fn inputs_are_validated() {
        assert!(analyze_json("garbage").is_err());
        assert!(analyze_json(&Graph::empty(13).unwrap().to_hex()).is_err());
        assert!(fixture_hex("c9").is_ok());
        assert!(fixture_hex("c40").is_err());
        assert!(fixture_hex("bw3").is_err());
    }
}
