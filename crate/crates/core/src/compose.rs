//! Series compositions of cycle graphs.
//!
//! Every element is a cycle `v1 .. vn` with edges `(vi, vi+1)` and `(vn, v1)`.
//! Its entry is `v1` and its exit the adjacent vertex `v2`. Consecutive
//! elements are glued from the exit of one to the entry of the next.

use crate::error::{Error, Result};
use crate::graph::{BoundaryCondition, Edge, QuantumGraph, Vertex, VertexId};

/// Largest cycle accepted by the `cN` preset names.
pub const MAX_PRESET: usize = 99;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesElement {
    pub cycle: usize,
    /// Every edge of this cycle has this many base lengths.
    pub multiplier: u32,
}

impl SeriesElement {
    pub fn cycle(n: usize) -> Self {
        Self {
            cycle: n,
            multiplier: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Glue {
    /// Exit of one cycle and entry of the next become one vertex.
    VertexMerge,
    /// Exit and entry are joined by an extra edge of `multiplier` base lengths.
    ConnectingEdge { multiplier: u32 },
}

/// Glue that reproduces the reference resonance positions for C3C3, C4C4 and
/// C3C4C3 (see the calibration test in `tests/calibration.rs`).
pub const CANONICAL_GLUE: Glue = Glue::ConnectingEdge { multiplier: 1 };

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSpec {
    pub elements: Vec<SeriesElement>,
    pub glue: Glue,
}

impl SeriesSpec {
    /// Unit-length cycles of the given sizes.
    pub fn cycles(sizes: &[usize], glue: Glue) -> Self {
        Self {
            elements: sizes.iter().map(|&n| SeriesElement::cycle(n)).collect(),
            glue,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(Error::InvalidSeries("no elements".into()));
        }
        for (i, e) in self.elements.iter().enumerate() {
            if e.cycle < 3 {
                return Err(Error::InvalidSeries(format!(
                    "element {i}: cycle size {} is below 3",
                    e.cycle
                )));
            }
            if e.multiplier == 0 {
                return Err(Error::InvalidSeries(format!(
                    "element {i}: length multiplier must be positive"
                )));
            }
        }
        if self.glue == (Glue::ConnectingEdge { multiplier: 0 }) {
            return Err(Error::InvalidSeries(
                "connecting edge multiplier must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Builds the composed graph with NK conditions at every vertex, the entrance
/// lead on the first entry and the exit lead on the last exit.
pub fn compose_series(spec: &SeriesSpec) -> Result<QuantumGraph> {
    spec.validate()?;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut next_id: VertexId = 1;
    let mut fresh = |vertices: &mut Vec<Vertex>| {
        let id = next_id;
        next_id += 1;
        vertices.push(Vertex {
            id,
            bc: BoundaryCondition::NeumannKirchhoff,
        });
        id
    };
    let mut entrance = 0;
    let mut prev_exit: Option<VertexId> = None;
    for element in &spec.elements {
        let first = match (prev_exit, spec.glue) {
            (Some(exit), Glue::VertexMerge) => exit,
            (Some(exit), Glue::ConnectingEdge { multiplier }) => {
                let v = fresh(&mut vertices);
                edges.push(Edge {
                    from: exit,
                    to: v,
                    length: f64::from(multiplier),
                });
                v
            }
            (None, _) => {
                let v = fresh(&mut vertices);
                entrance = v;
                v
            }
        };
        let mut ring = vec![first];
        for _ in 1..element.cycle {
            ring.push(fresh(&mut vertices));
        }
        let length = f64::from(element.multiplier);
        for i in 0..ring.len() {
            edges.push(Edge {
                from: ring[i],
                to: ring[(i + 1) % ring.len()],
                length,
            });
        }
        prev_exit = Some(ring[1]);
    }
    let exit = prev_exit.expect("spec has at least one element");
    Ok(QuantumGraph::new(vertices, edges, vec![entrance, exit]))
}

/// Parses `cN` into `N` for `3 <= N <= 99`.
pub fn parse_preset(name: &str) -> Option<usize> {
    let digits = name.trim().strip_prefix(['c', 'C'])?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: usize = digits.parse().ok()?;
    (3..=MAX_PRESET).contains(&n).then_some(n)
}

/// Parses a composition string.
///
/// Elements are `cN`, optionally `cN:k` for an edge multiplier `k`. The
/// separator picks the glue and must not be mixed:
/// `+` canonical glue, `-` unit connecting edge, `*` vertex merge.
pub fn parse_composition(text: &str) -> Result<SeriesSpec> {
    let text = text.trim();
    let seps: Vec<char> = ['+', '-', '*']
        .into_iter()
        .filter(|c| text.contains(*c))
        .collect();
    let (sep, glue) = match seps.as_slice() {
        [] => (None, CANONICAL_GLUE),
        ['+'] => (Some('+'), CANONICAL_GLUE),
        ['-'] => (Some('-'), Glue::ConnectingEdge { multiplier: 1 }),
        ['*'] => (Some('*'), Glue::VertexMerge),
        _ => {
            return Err(Error::InvalidSeries(format!(
                "'{text}' mixes separators; use only one of '+', '-', '*'"
            )))
        }
    };
    let parts: Vec<&str> = match sep {
        Some(s) => text.split(s).collect(),
        None => vec![text],
    };
    let elements = parts
        .iter()
        .map(|part| parse_element(part))
        .collect::<Result<Vec<_>>>()?;
    let spec = SeriesSpec { elements, glue };
    spec.validate()?;
    Ok(spec)
}

fn parse_element(part: &str) -> Result<SeriesElement> {
    let part = part.trim();
    let (name, mult) = match part.split_once(':') {
        Some((n, m)) => (n, Some(m)),
        None => (part, None),
    };
    let digits = name
        .strip_prefix(['c', 'C'])
        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| Error::InvalidSeries(format!("element '{part}' is not of the form cN")))?;
    let cycle: usize = digits
        .parse()
        .map_err(|_| Error::InvalidSeries(format!("element '{part}': bad cycle size")))?;
    let multiplier = match mult {
        None => 1,
        Some(m) => m
            .trim()
            .parse::<u32>()
            .map_err(|_| Error::InvalidSeries(format!("element '{part}': bad multiplier")))?,
    };
    Ok(SeriesElement { cycle, multiplier })
}
