//! Deterministic file emission: matrices, pair diagnostics, log-log
//! points, DOT/GraphML graphs, network summaries and report CSVs.
//!
//! All numbers are written with a fixed significant-digit count and all
//! orderings are stable, so identical inputs produce byte-identical
//! files. Writes go through a temp file in the target directory followed
//! by a rename.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use plcsnet::{
    loglog_points, AnalysisWindow, CumulativeMd, FitResult, PairCell, PairMatrix, PlcsConfig,
    SeriesPanel, ThresholdNetwork, WeightedGraph,
};
use serde::Serialize;

use crate::CliError;

/// Significant digits for analysis outputs.
pub const OUT_SIG_DIGITS: usize = 12;
/// Significant digits for panel round-trips.
pub const PANEL_SIG_DIGITS: usize = 15;

/// Fixed-precision scientific formatting, `sig` significant digits.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    format!("{:.*e}", sig - 1, x)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Write `content` to `path` atomically (temp file, then rename).
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(content).map_err(io_err(path))?;
    tmp.persist(path)
        .map_err(|e| CliError::Io {
            path: path.to_owned(),
            source: e.error,
        })
        .map(|_| ())
}

/// A cell read back from a matrix CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixCell {
    /// Diagonal placeholder.
    Empty,
    Degenerate,
    Value(f64),
}

/// Render a symmetric pair matrix: header row and column of entity
/// codes, empty diagonal, the literal token `degenerate` for marked
/// cells.
pub fn matrix_csv(matrix: &PairMatrix<f64>) -> String {
    let entities = matrix.entities();
    let mut out = String::new();
    for code in entities {
        out.push(',');
        out.push_str(code);
    }
    out.push('\n');
    for (i, code) in entities.iter().enumerate() {
        out.push_str(code);
        for j in 0..entities.len() {
            out.push(',');
            if i == j {
                continue;
            }
            match matrix.get(i, j) {
                PairCell::Value(v) => out.push_str(&fmt_sig(*v, OUT_SIG_DIGITS)),
                PairCell::Degenerate => out.push_str("degenerate"),
            }
        }
        out.push('\n');
    }
    out
}

/// Parse a matrix CSV written by [`matrix_csv`].
pub fn read_matrix_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<MatrixCell>>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Usage(format!("matrix header: {e}")))?
        .clone();
    let entities: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Usage(format!("matrix row: {e}")))?;
        let mut row = Vec::with_capacity(entities.len());
        for field in record.iter().skip(1) {
            row.push(match field {
                "" => MatrixCell::Empty,
                "degenerate" => MatrixCell::Degenerate,
                s => MatrixCell::Value(s.parse().map_err(|_| {
                    CliError::Usage(format!("matrix cell {s:?} is not a number"))
                })?),
            });
        }
        rows.push(row);
    }
    Ok((entities, rows))
}

/// One record of the per-pair JSON export.
#[derive(Debug, Serialize)]
pub struct PairRecord {
    pub a: String,
    pub b: String,
    /// True when the power-law fit is degenerate (near-identical series).
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_points: Option<usize>,
    /// True when the distance is undefined (zero-variance series).
    pub ud_degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ud: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PairsDocument<'a> {
    window: WindowInfo,
    tail: String,
    ud_variant: &'a str,
    pairs: Vec<PairRecord>,
}

#[derive(Debug, Serialize)]
pub struct WindowInfo {
    pub start: i64,
    pub end: i64,
}

impl From<AnalysisWindow> for WindowInfo {
    fn from(w: AnalysisWindow) -> Self {
        Self {
            start: w.start(),
            end: w.end(),
        }
    }
}

fn tail_label(cfg: &PlcsConfig) -> String {
    match cfg.tail {
        plcsnet::Tail::All => "all".into(),
        plcsnet::Tail::Points(n) => n.to_string(),
    }
}

/// Render the per-pair JSON with the full fit diagnostics of every pair.
pub fn pairs_json(
    fits: &PairMatrix<FitResult>,
    dists: &PairMatrix<f64>,
    window: AnalysisWindow,
    cfg: &PlcsConfig,
    ud_variant: plcsnet::UdVariant,
) -> String {
    let entities = fits.entities();
    let pairs = fits
        .pairs()
        .map(|(i, j, fit)| {
            let dist = dists.get(i, j);
            let f = fit.value();
            PairRecord {
                a: entities[i].clone(),
                b: entities[j].clone(),
                degenerate: fit.is_degenerate(),
                alpha: f.map(|f| f.alpha),
                gamma: f.map(|f| f.gamma),
                beta: f.map(|f| f.beta),
                intercept: f.map(|f| f.intercept),
                r_squared: f.map(|f| f.r_squared),
                tail_points: f.map(|f| f.tail_points),
                ud_degenerate: dist.is_degenerate(),
                ud: dist.value().copied(),
            }
        })
        .collect();
    let doc = PairsDocument {
        window: window.into(),
        tail: tail_label(cfg),
        ud_variant: ud_variant.label(),
        pairs,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Per-pair log-log points (every usable point, not only the fitted
/// tail), for external re-plotting of cumulative distance curves.
pub fn loglog_csv(panel: &SeriesPanel, cfg: &PlcsConfig) -> Result<String, CliError> {
    let mut out = String::from("a,b,j,ln_j,ln_md\n");
    let all = PlcsConfig {
        tail: plcsnet::Tail::All,
        ..*cfg
    };
    let n = panel.n_entities();
    for i in 0..n {
        for j in (i + 1)..n {
            let md: CumulativeMd =
                plcsnet::cumulative_md(panel.series(i), panel.series(j))?;
            let points = match loglog_points(&md, &all) {
                Ok(p) => p,
                Err(plcsnet::Error::DegenerateSeries) => continue,
                Err(e) => return Err(e.into()),
            };
            // recover the 1-based index from ln j to label rows
            for (x, y) in points {
                let idx = x.exp().round() as usize;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    panel.entities()[i],
                    panel.entities()[j],
                    idx,
                    fmt_sig(x, OUT_SIG_DIGITS),
                    fmt_sig(y, OUT_SIG_DIGITS),
                );
            }
        }
    }
    Ok(out)
}

/// Undirected DOT with the weight as edge label and the run metadata as
/// graph attributes; node id = entity code.
pub fn dot_string(g: &WeightedGraph, attrs: &[(&str, String)]) -> String {
    let mut out = String::from("graph plcsnet {\n");
    if !attrs.is_empty() {
        let rendered: Vec<String> = attrs
            .iter()
            .map(|(k, v)| format!("{k}={:?}", v))
            .collect();
        let _ = writeln!(out, "  graph [{}];", rendered.join(", "));
    }
    for node in g.nodes() {
        let _ = writeln!(out, "  {node:?};");
    }
    for e in g.edges() {
        let (a, b) = g.edge_codes(e);
        let _ = writeln!(
            out,
            "  {a:?} -- {b:?} [label={:?}];",
            fmt_sig(e.weight, OUT_SIG_DIGITS)
        );
    }
    out.push_str("}\n");
    out
}

/// GraphML with a double-typed `weight` key on edges.
pub fn graphml_string(g: &WeightedGraph, graph_id: &str) -> String {
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n\
         \x20 <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n",
    );
    let _ = writeln!(out, "  <graph id=\"{graph_id}\" edgedefault=\"undirected\">");
    for node in g.nodes() {
        let _ = writeln!(out, "    <node id=\"{node}\"/>");
    }
    for e in g.edges() {
        let (a, b) = g.edge_codes(e);
        let _ = writeln!(
            out,
            "    <edge source=\"{a}\" target=\"{b}\"><data key=\"weight\">{}</data></edge>",
            fmt_sig(e.weight, OUT_SIG_DIGITS)
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

#[derive(Debug, Serialize)]
pub struct BridgeInfo {
    pub a: String,
    pub b: String,
    pub weight: f64,
}

/// JSON summary of a condensed network.
#[derive(Debug, Serialize)]
pub struct NetworkSummary {
    pub analysis: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preference: Option<&'static str>,
    pub channel: &'static str,
    pub window: WindowInfo,
    pub nodes: usize,
    pub edges: usize,
    pub mean_degree: f64,
    pub degrees: BTreeMap<String, usize>,
    pub hubs: Vec<String>,
    /// The single lowest-degree node, when unique.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_degree_node: Option<String>,
    pub cliques: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bridge: Option<BridgeInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed_edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_weight: Option<f64>,
}

fn min_degree_node(degrees: &BTreeMap<String, usize>) -> Option<String> {
    let min = degrees.values().min()?;
    let mut at_min = degrees.iter().filter(|(_, d)| *d == min);
    let first = at_min.next()?;
    if at_min.next().is_none() {
        Some(first.0.clone())
    } else {
        None
    }
}

const HUBS_LISTED: usize = 3;
const CLIQUE_MIN_SIZE: usize = 3;

pub fn npt_summary(
    net: &ThresholdNetwork,
    window: AnalysisWindow,
) -> NetworkSummary {
    let g = &net.graph;
    let (degrees, mean_degree) = g.degrees();
    let (a, b) = g.edge_codes(&net.bridge);
    NetworkSummary {
        analysis: "npt",
        preference: Some(net.preference.label()),
        channel: channel_label(net.preference.channel()),
        window: window.into(),
        nodes: g.n_nodes(),
        edges: g.n_edges(),
        mean_degree,
        min_degree_node: min_degree_node(&degrees),
        degrees,
        hubs: g.hubs(HUBS_LISTED),
        cliques: g.cliques(CLIQUE_MIN_SIZE),
        bridge: Some(BridgeInfo {
            a: a.to_owned(),
            b: b.to_owned(),
            weight: net.bridge.weight,
        }),
        removed_edges: Some(net.removed.len()),
        total_weight: None,
    }
}

pub fn mst_summary(tree: &WeightedGraph, window: AnalysisWindow) -> NetworkSummary {
    let (degrees, mean_degree) = tree.degrees();
    NetworkSummary {
        analysis: "mst",
        preference: None,
        channel: "ud",
        window: window.into(),
        nodes: tree.n_nodes(),
        edges: tree.n_edges(),
        mean_degree,
        min_degree_node: min_degree_node(&degrees),
        degrees,
        hubs: tree.hubs(HUBS_LISTED),
        cliques: Vec::new(), // a tree has none of size 3+
        bridge: None,
        removed_edges: None,
        total_weight: Some(tree.edges().iter().map(|e| e.weight).sum()),
    }
}

pub fn channel_label(c: plcsnet::Channel) -> &'static str {
    match c {
        plcsnet::Channel::Gamma => "gamma",
        plcsnet::Channel::Beta => "beta",
        plcsnet::Channel::Ud => "ud",
    }
}

pub fn summary_json(summary: &NetworkSummary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("serializable");
    s.push('\n');
    s
}

/// Robustness report CSV: one row per noise level.
pub fn robustness_csv(report: &plcsnet::RobustnessReport) -> String {
    let mut out = String::from("sigma,mean_gamma,mean_abs_gamma,mean_ud\n");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_sig(row.sigma, OUT_SIG_DIGITS),
            fmt_sig(row.mean_gamma, OUT_SIG_DIGITS),
            fmt_sig(row.mean_abs_gamma, OUT_SIG_DIGITS),
            fmt_sig(row.mean_ud, OUT_SIG_DIGITS),
        );
    }
    out
}

/// Recovery fixture CSV: generated class targets against recovered fits.
pub fn recovery_csv(table: &[(f64, FitResult)]) -> String {
    let mut out = String::from("gamma_target,gamma,abs_error,beta,tail_points\n");
    for (target, fit) in table {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_sig(*target, OUT_SIG_DIGITS),
            fmt_sig(fit.gamma, OUT_SIG_DIGITS),
            fmt_sig((fit.gamma - target).abs(), OUT_SIG_DIGITS),
            fmt_sig(fit.beta, OUT_SIG_DIGITS),
            fit.tail_points,
        );
    }
    out
}

/// Wide CSV writer matching the panel reader; values carry enough digits
/// to round-trip to 15 significant digits.
pub fn panel_csv(panel: &SeriesPanel) -> String {
    let mut out = String::from("period");
    for code in panel.entities() {
        out.push(',');
        out.push_str(code);
    }
    out.push('\n');
    for (r, period) in panel.periods().iter().enumerate() {
        let _ = write!(out, "{period}");
        for e in 0..panel.n_entities() {
            let _ = write!(out, ",{}", fmt_sig(panel.series(e)[r], PANEL_SIG_DIGITS));
        }
        out.push('\n');
    }
    out
}

/// Join the output directory with a deterministic file name.
pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use plcsnet::load_panel;

    #[test]
    fn fmt_sig_pins_significant_digits() {
        assert_eq!(fmt_sig(-0.76, 12), "-7.60000000000e-1");
        assert_eq!(fmt_sig(0.0, 12), "0.00000000000e0");
        assert_eq!(fmt_sig(12345.678, 3), "1.23e4");
    }

    #[test]
    fn matrix_round_trip() {
        let m = PairMatrix::build(
            vec!["AA".into(), "BB".into(), "CC".into()],
            |i, j| {
                Ok(if (i, j) == (0, 2) {
                    PairCell::Degenerate
                } else {
                    PairCell::Value(0.1 * (i + j) as f64 - 0.05)
                })
            },
        )
        .unwrap();
        let text = matrix_csv(&m);
        let (entities, rows) = read_matrix_csv(&text).unwrap();
        assert_eq!(entities, m.entities());
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0][0], MatrixCell::Empty);
        assert_eq!(rows[0][2], MatrixCell::Degenerate);
        assert_eq!(rows[2][0], MatrixCell::Degenerate); // symmetric render
        match (rows[0][1], rows[1][0]) {
            (MatrixCell::Value(a), MatrixCell::Value(b)) => {
                assert_eq!(a, b);
                assert!((a - 0.05).abs() < 1e-11);
            }
            other => panic!("expected values, got {other:?}"),
        }
    }

    #[test]
    fn panel_round_trips_through_writer() {
        let text = "period,AA,BB\n1970,1234.5678901234567,2.5e-3\n1971,2.0,3.0\n1972,3.0,4.0\n1973,4.5,5.5\n";
        let panel = load_panel(text.as_bytes()).unwrap();
        let written = panel_csv(&panel);
        let back = load_panel(written.as_bytes()).unwrap();
        assert_eq!(back.entities(), panel.entities());
        assert_eq!(back.periods(), panel.periods());
        for e in 0..panel.n_entities() {
            for (x, y) in panel.series(e).iter().zip(back.series(e)) {
                let rel = if *x == 0.0 {
                    y.abs()
                } else {
                    ((x - y) / x).abs()
                };
                assert!(rel < 1e-14, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn dot_output_shape() {
        let g = plcsnet::WeightedGraph::new(
            vec!["b".into(), "a".into()],
            vec![(0, 1, 2.5)],
        )
        .unwrap();
        let dot = dot_string(&g, &[("preference", "cp".into()), ("window", "2002-2011".into())]);
        assert!(dot.starts_with("graph plcsnet {"));
        assert!(dot.contains("graph [preference=\"cp\", window=\"2002-2011\"];"));
        assert!(dot.contains("\"a\" -- \"b\" [label=\"2.50000000000e0\"];"));
        assert!(dot.trim_end().ends_with('}'));
    }

    #[test]
    fn graphml_output_shape() {
        let g = plcsnet::WeightedGraph::new(
            vec!["x".into(), "y".into()],
            vec![(0, 1, -1.0)],
        )
        .unwrap();
        let xml = graphml_string(&g, "test-1");
        assert!(xml.contains("attr.name=\"weight\" attr.type=\"double\""));
        assert!(xml.contains("<edge source=\"x\" target=\"y\">"));
        assert!(xml.contains("<data key=\"weight\">-1.00000000000e0</data>"));
    }

    #[test]
    fn min_degree_node_only_when_unique() {
        let mut d = BTreeMap::new();
        d.insert("a".to_string(), 3);
        d.insert("b".to_string(), 1);
        d.insert("c".to_string(), 2);
        assert_eq!(min_degree_node(&d), Some("b".to_string()));
        d.insert("z".to_string(), 1);
        assert_eq!(min_degree_node(&d), None);
    }
}
