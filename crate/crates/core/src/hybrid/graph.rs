use std::collections::HashMap;

use petgraph::algo::toposort;
use petgraph::graph::DiGraph;

use super::{mu, PreparedBox, QuantumBox, SmoothPrim};
use crate::error::{Error, Result};
use crate::linalg::{RMat, RVec};

pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Where a wire comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    /// A graph input port.
    Input(usize),
    /// A scalar graph parameter.
    Param(usize),
    /// The (single) output of a node.
    Node(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Smooth(SmoothPrim),
    /// Inputs: one scalar wire per box parameter, then the state wires.
    Box(QuantumBox),
    /// Merges a `4^n` wire with a `4^m` wire.
    Mu { n: usize, m: usize },
    Epsilon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub inputs: Vec<Source>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HybridGraph {
    pub input_widths: Vec<usize>,
    pub param_names: Vec<String>,
    pub nodes: Vec<Node>,
    pub outputs: Vec<Source>,
}

/// Result of a successful [`HybridGraph::check`].
#[derive(Debug, Clone)]
pub struct Checked {
    pub order: Vec<usize>,
    pub widths: Vec<usize>,
}

impl HybridGraph {
    pub fn input_width(&self) -> usize {
        self.input_widths.iter().sum()
    }

    pub fn source_width(&self, s: Source, node_widths: &[usize]) -> Result<usize> {
        match s {
            Source::Input(i) => self.input_widths.get(i).copied(),
            Source::Param(j) => (j < self.param_names.len()).then_some(1),
            Source::Node(k) => node_widths.get(k).copied(),
        }
        .ok_or_else(|| Error::Graph(format!("dangling wire {s:?}")))
    }

    /// Well-formedness: sources exist, the graph is acyclic, widths agree, and
    /// every box output feeds at most one consumer that does not split it.
    pub fn check(&self) -> Result<Checked> {
        let mut dag = DiGraph::<usize, ()>::new();
        let ids: Vec<_> = (0..self.nodes.len()).map(|i| dag.add_node(i)).collect();
        for (i, node) in self.nodes.iter().enumerate() {
            for s in &node.inputs {
                match *s {
                    Source::Node(k) if k >= self.nodes.len() => {
                        return Err(Error::Graph(format!("node {i} reads missing node {k}")))
                    }
                    Source::Node(k) => {
                        dag.add_edge(ids[k], ids[i], ());
                    }
                    Source::Input(k) if k >= self.input_widths.len() => {
                        return Err(Error::Graph(format!("node {i} reads missing input {k}")))
                    }
                    Source::Param(k) if k >= self.param_names.len() => {
                        return Err(Error::Graph(format!("node {i} reads missing parameter {k}")))
                    }
                    _ => {}
                }
            }
        }
        let order: Vec<usize> = toposort(&dag, None)
            .map_err(|c| Error::Graph(format!("cycle through node {}", dag[c.node_id()])))?
            .into_iter()
            .map(|n| dag[n])
            .collect();

        let mut widths = vec![0usize; self.nodes.len()];
        for &i in &order {
            let node = &self.nodes[i];
            let in_w = node
                .inputs
                .iter()
                .map(|&s| self.source_width(s, &widths))
                .collect::<Result<Vec<_>>>()?;
            widths[i] = match &node.kind {
                NodeKind::Smooth(p) => p.output_width(&in_w).map_err(|e| at_node(i, e))?,
                NodeKind::Epsilon if in_w.is_empty() => 1,
                NodeKind::Epsilon => return Err(Error::Graph(format!("node {i}: epsilon takes no inputs"))),
                NodeKind::Mu { n, m } => {
                    if in_w != [1 << (2 * n), 1 << (2 * m)] {
                        return Err(Error::Graph(format!(
                            "node {i}: mu({n},{m}) expects widths [{}, {}], got {in_w:?}",
                            1 << (2 * n),
                            1 << (2 * m)
                        )));
                    }
                    1 << (2 * (n + m))
                }
                NodeKind::Box(b) => {
                    let np = b.params().len();
                    let expect: Vec<usize> = std::iter::repeat_n(1, np)
                        .chain(b.state_qubits().iter().map(|&q| 1 << (2 * q)))
                        .collect();
                    if in_w != expect {
                        return Err(Error::Graph(format!(
                            "node {i}: box expects input widths {expect:?}, got {in_w:?}"
                        )));
                    }
                    b.output_width()
                }
            };
        }
        for &s in &self.outputs {
            self.source_width(s, &widths)?;
        }
        self.check_box_outputs()?;
        Ok(Checked { order, widths })
    }

    fn check_box_outputs(&self) -> Result<()> {
        for (i, node) in self.nodes.iter().enumerate() {
            if !matches!(node.kind, NodeKind::Box(_)) {
                continue;
            }
            let me = Source::Node(i);
            let mut consumers = Vec::new();
            for (j, other) in self.nodes.iter().enumerate() {
                for s in &other.inputs {
                    if *s == me {
                        consumers.push(Some(j));
                    }
                }
            }
            consumers.extend(self.outputs.iter().filter(|&&s| s == me).map(|_| None));
            if consumers.len() > 1 {
                return Err(Error::Graph(format!(
                    "box node {i} has {} consumers; a box has exactly one outgoing wire",
                    consumers.len()
                )));
            }
            if let Some(Some(j)) = consumers.first() {
                if let NodeKind::Smooth(SmoothPrim::Proj { .. } | SmoothPrim::Copy) = self.nodes[*j].kind {
                    return Err(Error::Graph(format!(
                        "box node {i} output is split by node {j}; quantum outputs cannot be separated into per-qubit wires"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn at_node(i: usize, e: Error) -> Error {
    match e {
        Error::Graph(msg) => Error::Graph(format!("node {i}: {msg}")),
        other => other,
    }
}

/// Evaluates a checked graph, caching prepared boxes per exact parameter values.
pub struct Evaluator<'g> {
    graph: &'g HybridGraph,
    checked: Checked,
    cache: HashMap<(usize, Vec<u64>), PreparedBox>,
}

impl<'g> Evaluator<'g> {
    pub fn new(graph: &'g HybridGraph) -> Result<Self> {
        Ok(Self { graph, checked: graph.check()?, cache: HashMap::new() })
    }

    pub fn output_width(&self) -> usize {
        self.graph.outputs.iter().map(|&s| self.graph.source_width(s, &self.checked.widths).unwrap()).sum()
    }

    pub fn eval(&mut self, inputs: &[f64], params: &[f64]) -> Result<RVec> {
        let g = self.graph;
        if inputs.len() != g.input_width() {
            return Err(Error::Shape(format!("{} inputs for a graph taking {}", inputs.len(), g.input_width())));
        }
        if params.len() != g.param_names.len() {
            return Err(Error::Shape(format!(
                "{} parameters for a graph taking {}",
                params.len(),
                g.param_names.len()
            )));
        }
        let mut ports = Vec::with_capacity(g.input_widths.len());
        let mut at = 0;
        for &w in &g.input_widths {
            ports.push(&inputs[at..at + w]);
            at += w;
        }
        let mut values: Vec<Option<RVec>> = vec![None; g.nodes.len()];
        for &i in &self.checked.order {
            let node = &g.nodes[i];
            let args: Vec<&[f64]> = node
                .inputs
                .iter()
                .map(|&s| match s {
                    Source::Input(k) => ports[k],
                    Source::Param(k) => std::slice::from_ref(&params[k]),
                    Source::Node(k) => values[k].as_deref().expect("topological order"),
                })
                .collect();
            let out = match &node.kind {
                NodeKind::Smooth(p) => p.eval(&args),
                NodeKind::Epsilon => super::epsilon(),
                NodeKind::Mu { .. } => mu(args[0], args[1])?,
                NodeKind::Box(b) => {
                    let np = b.params().len();
                    let bound: Vec<f64> = args[..np].iter().map(|a| a[0]).collect();
                    let key = (i, bound.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
                    if !self.cache.contains_key(&key) {
                        let prepared = b.prepare(&bound)?;
                        self.cache.insert(key.clone(), prepared);
                    }
                    let merged = super::mu_fold(&args[np..])?;
                    self.cache[&key].apply(&merged)?
                }
            };
            values[i] = Some(out);
        }
        let mut out = Vec::new();
        for &s in &g.outputs {
            match s {
                Source::Input(k) => out.extend_from_slice(ports[k]),
                Source::Param(k) => out.push(params[k]),
                Source::Node(k) => out.extend_from_slice(values[k].as_deref().expect("evaluated")),
            }
        }
        Ok(out)
    }
}

impl HybridGraph {
    pub fn eval(&self, inputs: &[f64], params: &[f64]) -> Result<RVec> {
        Evaluator::new(self)?.eval(inputs, params)
    }
}

/// Central differences of a vector-valued function, one column per parameter.
fn central_differences<F>(f: F, params: &[f64], h: f64) -> Result<Vec<RVec>>
where
    F: Fn(&[f64]) -> Result<RVec> + Sync,
{
    if !(h > 0.0) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {h}")));
    }
    let probe = |k: usize| -> Result<RVec> {
        let mut plus = params.to_vec();
        let mut minus = params.to_vec();
        plus[k] += h;
        minus[k] -= h;
        let fp = f(&plus)?;
        let fm = f(&minus)?;
        Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..params.len()).into_par_iter().map(probe).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..params.len()).map(probe).collect()
    }
}

/// Gradient of a scalar function by central differences.
pub fn fd_gradient<F>(f: F, params: &[f64], h: f64) -> Result<RVec>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    Ok(central_differences(|p| f(p).map(|v| vec![v]), params, h)?.into_iter().map(|c| c[0]).collect())
}

/// `d outputs / d params` of a graph at fixed inputs, by central differences.
pub fn jacobian_fd(g: &HybridGraph, inputs: &[f64], params: &[f64], h: f64) -> Result<RMat> {
    let out_dim = Evaluator::new(g)?.output_width();
    let cols = central_differences(|p| g.eval(inputs, p), params, h)?;
    let mut jac = RMat::zeros(out_dim.max(1), params.len().max(1));
    for (k, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            jac[(r, k)] = *v;
        }
    }
    Ok(jac)
}

/// Incremental construction of a [`HybridGraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    graph: HybridGraph,
}

impl GraphBuilder {
    pub fn new(input_widths: Vec<usize>, param_names: Vec<String>) -> Self {
        Self { graph: HybridGraph { input_widths, param_names, ..Default::default() } }
    }

    pub fn node(&mut self, kind: NodeKind, inputs: Vec<Source>) -> Source {
        self.graph.nodes.push(Node { kind, inputs });
        Source::Node(self.graph.nodes.len() - 1)
    }

    pub fn smooth(&mut self, prim: SmoothPrim, inputs: Vec<Source>) -> Source {
        self.node(NodeKind::Smooth(prim), inputs)
    }

    pub fn constant(&mut self, value: RVec) -> Source {
        self.smooth(SmoothPrim::Const { value }, vec![])
    }

    pub fn epsilon(&mut self) -> Source {
        self.node(NodeKind::Epsilon, vec![])
    }

    pub fn mu(&mut self, a: Source, n: usize, b: Source, m: usize) -> Source {
        self.node(NodeKind::Mu { n, m }, vec![a, b])
    }

    /// `x -> (1, 0, -sin(pi x), cos(pi x))` from smooth primitives.
    pub fn bit_encoder(&mut self, x: Source) -> Source {
        let angle = self.smooth(SmoothPrim::Scale { c: std::f64::consts::PI }, vec![x]);
        let sin = self.smooth(SmoothPrim::Sin, vec![angle]);
        let neg_sin = self.smooth(SmoothPrim::Scale { c: -1.0 }, vec![sin]);
        let cos = self.smooth(SmoothPrim::Cos, vec![angle]);
        let head = self.constant(vec![1.0, 0.0]);
        self.smooth(SmoothPrim::Concat, vec![head, neg_sin, cos])
    }

    pub fn quantum_box(&mut self, b: QuantumBox, params: Vec<Source>, states: Vec<Source>) -> Source {
        let inputs = params.into_iter().chain(states).collect();
        self.node(NodeKind::Box(b), inputs)
    }

    pub fn output(&mut self, s: Source) {
        self.graph.outputs.push(s);
    }

    pub fn finish(self) -> Result<HybridGraph> {
        self.graph.check()?;
        Ok(self.graph)
    }

    /// Returns the graph without checking it.
    pub fn finish_unchecked(self) -> HybridGraph {
        self.graph
    }
}
