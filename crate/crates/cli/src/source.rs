use std::fs;
use std::path::Path;

use rainbow_core::family::MultiHypergraph;
use rainbow_core::format::parse_hypergraph;
use rainbow_core::generators::{
    ell_cycles, hamilton_cycles, perfect_matchings, power_hamilton, random_family, single_edge, sunflower,
    tree_embeddings, HostGraph,
};

use crate::config::ExperimentConfig;
use crate::CliError;

fn args(spec: &str, rest: &str, want: std::ops::RangeInclusive<usize>) -> Result<Vec<u64>, CliError> {
    let values = rest
        .split(',')
        .map(|a| a.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Input(format!("generator {spec:?} needs integer arguments")))?;
    if !want.contains(&values.len()) {
        return Err(CliError::Input(format!(
            "generator {spec:?} takes {} to {} arguments",
            want.start(),
            want.end()
        )));
    }
    Ok(values)
}

/// Builds the hypergraph named by a `KIND:ARGS` generator spec.
///
/// Kinds: `hamilton:n`, `power-hamilton:n,r`, `ell-cycles:n,u,l`,
/// `matchings:n[,u]`, `paths:n`, `stars:n`, `single-edge:r`,
/// `sunflower:core,petals,size`, `random:n,edges,size,seed`.
pub fn generate(spec: &str) -> Result<MultiHypergraph, CliError> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Input(format!("generator {spec:?} must read KIND:ARGS")))?;
    let u = |v: u64| v as usize;
    let h = match kind {
        "hamilton" => hamilton_cycles(u(args(spec, rest, 1..=1)?[0]))?,
        "power-hamilton" => {
            let a = args(spec, rest, 2..=2)?;
            power_hamilton(u(a[0]), u(a[1]))?
        }
        "ell-cycles" => {
            let a = args(spec, rest, 3..=3)?;
            ell_cycles(u(a[0]), u(a[1]), u(a[2]))?
        }
        "matchings" => {
            let a = args(spec, rest, 1..=2)?;
            perfect_matchings(&HostGraph::complete(u(a[0]), a.get(1).map_or(2, |&x| u(x)))?)?
        }
        "paths" | "stars" => {
            let n = u(args(spec, rest, 1..=1)?[0]);
            let tree: Vec<(usize, usize)> = if kind == "paths" {
                (1..n).map(|v| (v - 1, v)).collect()
            } else {
                (1..n).map(|v| (0, v)).collect()
            };
            tree_embeddings(&HostGraph::complete(n, 2)?, &HostGraph::graph(n, &tree)?)?
        }
        "single-edge" => single_edge(u(args(spec, rest, 1..=1)?[0]))?.to_hypergraph(),
        "sunflower" => {
            let a = args(spec, rest, 3..=3)?;
            sunflower(u(a[0]), u(a[1]), u(a[2]))?.to_hypergraph()
        }
        "random" => {
            let a = args(spec, rest, 4..=4)?;
            random_family(u(a[0]), u(a[1]), u(a[2]), a[3])?.to_hypergraph()
        }
        _ => return Err(CliError::Input(format!("unknown generator kind {kind:?}"))),
    };
    Ok(h)
}

pub fn read_hypergraph(path: &Path) -> Result<MultiHypergraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_hypergraph(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load(cfg: &ExperimentConfig) -> Result<MultiHypergraph, CliError> {
    match (&cfg.input, &cfg.generator) {
        (Some(path), None) => read_hypergraph(path),
        (None, Some(spec)) => generate(spec),
        _ => Err(CliError::Input("task needs --input FILE or --gen KIND:ARGS".into())),
    }
}
