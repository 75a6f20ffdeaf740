use std::path::Path;

use qgraph_core::{compose_series, load_graph_spec, make_cycle_graph, parse_composition, parse_preset, QuantumGraph};

use crate::args::GraphArgs;
use crate::CliError;

/// Resolves `--graph` as a preset, then an existing spec file, then a
/// composition string.
pub fn load(args: &GraphArgs) -> Result<QuantumGraph, CliError> {
    let scale = args.length_scale;
    if !(scale.is_finite() && scale > 0.0) {
        return Err(CliError::usage(format!("--length-scale must be positive, got {scale}")));
    }
    let text = args.graph.trim();
    let graph = if let Some(n) = parse_preset(text) {
        make_cycle_graph(n, 1.0)
    } else if Path::new(text).is_file() {
        load_graph_spec(Path::new(text))
    } else if looks_like_path(text) {
        return Err(CliError::usage(format!("--graph: no such file '{text}'")));
    } else {
        parse_composition(text).and_then(|spec| compose_series(&spec))
    }
    .map_err(|e| CliError::usage(format!("--graph '{text}': {e}")))?;
    Ok(if scale == 1.0 { graph } else { graph.scaled(scale) })
}

fn looks_like_path(text: &str) -> bool {
    text.contains('/') || text.contains('\\') || text.to_ascii_lowercase().ends_with(".json")
}
