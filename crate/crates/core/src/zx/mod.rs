//! Term IR for doubled ZX diagrams.
//!
//! A [`ZxTerm`] is a tree of generators under sequential (`Seq`) and parallel
//! (`Par`) composition. Objects are wire counts; every wire is a doubled
//! (quantum) wire.

mod build;
mod json;
mod phase;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::linalg::C64;

pub use build::{
    basis_prep, cnot, identity, on_wires, pauli_gadget, phase_gadget, swap_network, Basis,
};
pub use json::{parse_diagram, serialize, term_from_json, term_to_json, FORMAT_VERSION};
pub use phase::{Binding, Phase};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZxError {
    #[error("arity mismatch at {path}: first term has {first_out} outputs but next term expects {then_in} inputs")]
    Arity { path: String, first_out: usize, then_in: usize },
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("invalid diagram at {path}: {msg}")]
    Format { path: String, msg: String },
    #[error("bad phase expression {expr:?} at offset {offset}: {msg}")]
    Phase { expr: String, offset: usize, msg: String },
    #[error("unbound parameter `{0}`")]
    Unbound(String),
    #[error("discard has no pure interpretation")]
    DiscardInPure,
    #[error("invalid builder arguments: {0}")]
    Builder(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    ZSpider { inputs: usize, outputs: usize, phase: Phase },
    XSpider { inputs: usize, outputs: usize, phase: Phase },
    Hadamard,
    Discard,
    Swap,
    Id,
    Scalar(C64),
}

impl Generator {
    pub fn arity(&self) -> (usize, usize) {
        match *self {
            Generator::ZSpider { inputs, outputs, .. } | Generator::XSpider { inputs, outputs, .. } => {
                (inputs, outputs)
            }
            Generator::Hadamard | Generator::Id => (1, 1),
            Generator::Discard => (1, 0),
            Generator::Swap => (2, 2),
            Generator::Scalar(_) => (0, 0),
        }
    }

    pub fn phase(&self) -> Option<&Phase> {
        match self {
            Generator::ZSpider { phase, .. } | Generator::XSpider { phase, .. } => Some(phase),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZxTerm {
    Gen(Generator),
    /// `first` then `then`.
    Seq(Box<ZxTerm>, Box<ZxTerm>),
    /// `left` on the most significant wires, `right` below it.
    Par(Box<ZxTerm>, Box<ZxTerm>),
}

impl From<Generator> for ZxTerm {
    fn from(g: Generator) -> Self {
        ZxTerm::Gen(g)
    }
}

impl ZxTerm {
    pub fn z(inputs: usize, outputs: usize, phase: Phase) -> Self {
        Generator::ZSpider { inputs, outputs, phase }.into()
    }

    pub fn x(inputs: usize, outputs: usize, phase: Phase) -> Self {
        Generator::XSpider { inputs, outputs, phase }.into()
    }

    pub fn hadamard() -> Self {
        Generator::Hadamard.into()
    }

    pub fn discard() -> Self {
        Generator::Discard.into()
    }

    pub fn swap() -> Self {
        Generator::Swap.into()
    }

    pub fn id() -> Self {
        Generator::Id.into()
    }

    pub fn scalar(c: C64) -> Self {
        Generator::Scalar(c).into()
    }

    pub fn seq(first: ZxTerm, then: ZxTerm) -> Self {
        ZxTerm::Seq(Box::new(first), Box::new(then))
    }

    pub fn par(left: ZxTerm, right: ZxTerm) -> Self {
        ZxTerm::Par(Box::new(left), Box::new(right))
    }

    /// Left-nested sequential composition; `None` for an empty iterator.
    pub fn seq_all(terms: impl IntoIterator<Item = ZxTerm>) -> Option<Self> {
        terms.into_iter().reduce(ZxTerm::seq)
    }

    /// Parallel composition of a list; the empty product is the unit scalar.
    pub fn par_all(terms: impl IntoIterator<Item = ZxTerm>) -> Self {
        terms.into_iter().reduce(ZxTerm::par).unwrap_or_else(|| ZxTerm::scalar(C64::new(1.0, 0.0)))
    }

    /// `(inputs, outputs)`, checking every sequential interface.
    pub fn arity(&self) -> Result<(usize, usize), ZxError> {
        self.arity_at("term")
    }

    fn arity_at(&self, path: &str) -> Result<(usize, usize), ZxError> {
        match self {
            ZxTerm::Gen(g) => Ok(g.arity()),
            ZxTerm::Seq(a, b) => {
                let (ai, ao) = a.arity_at(&format!("{path}.seq[0]"))?;
                let (bi, bo) = b.arity_at(&format!("{path}.seq[1]"))?;
                if ao != bi {
                    return Err(ZxError::Arity { path: path.to_string(), first_out: ao, then_in: bi });
                }
                Ok((ai, bo))
            }
            ZxTerm::Par(a, b) => {
                let (ai, ao) = a.arity_at(&format!("{path}.par[0]"))?;
                let (bi, bo) = b.arity_at(&format!("{path}.par[1]"))?;
                Ok((ai + bi, ao + bo))
            }
        }
    }

    /// Free parameter names, sorted.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |g| {
            if let Some(p) = g.phase() {
                out.extend(p.params().map(str::to_string));
            }
        });
        out
    }

    pub fn has_discard(&self) -> bool {
        let mut found = false;
        self.visit(&mut |g| found |= matches!(g, Generator::Discard));
        found
    }

    /// Visits generators left to right.
    pub fn visit(&self, f: &mut impl FnMut(&Generator)) {
        match self {
            ZxTerm::Gen(g) => f(g),
            ZxTerm::Seq(a, b) | ZxTerm::Par(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    pub fn map_generators(&self, f: &impl Fn(&Generator) -> Generator) -> Self {
        match self {
            ZxTerm::Gen(g) => ZxTerm::Gen(f(g)),
            ZxTerm::Seq(a, b) => ZxTerm::seq(a.map_generators(f), b.map_generators(f)),
            ZxTerm::Par(a, b) => ZxTerm::par(a.map_generators(f), b.map_generators(f)),
        }
    }

    /// Binds parameters in every phase; names missing from `binding` stay free.
    pub fn substitute(&self, binding: &Binding) -> Self {
        self.map_generators(&|g| match g {
            Generator::ZSpider { inputs, outputs, phase } => Generator::ZSpider {
                inputs: *inputs,
                outputs: *outputs,
                phase: phase.substitute(binding),
            },
            Generator::XSpider { inputs, outputs, phase } => Generator::XSpider {
                inputs: *inputs,
                outputs: *outputs,
                phase: phase.substitute(binding),
            },
            other => other.clone(),
        })
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn depth(&self) -> usize {
        match self {
            ZxTerm::Gen(_) => 1,
            ZxTerm::Seq(a, b) | ZxTerm::Par(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for ZxTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZxTerm::Gen(g) => match g {
                Generator::ZSpider { inputs, outputs, phase } => write!(f, "Z{inputs}>{outputs}({phase})"),
                Generator::XSpider { inputs, outputs, phase } => write!(f, "X{inputs}>{outputs}({phase})"),
                Generator::Hadamard => write!(f, "H"),
                Generator::Discard => write!(f, "discard"),
                Generator::Swap => write!(f, "swap"),
                Generator::Id => write!(f, "id"),
                Generator::Scalar(c) => write!(f, "[{c}]"),
            },
            ZxTerm::Seq(a, b) => write!(f, "({a} ; {b})"),
            ZxTerm::Par(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn arity_examples() {
        assert_eq!(ZxTerm::discard().arity().unwrap(), (1, 0));
        assert_eq!(ZxTerm::par(ZxTerm::id(), ZxTerm::hadamard()).arity().unwrap(), (2, 2));
        let t = ZxTerm::seq(
            ZxTerm::z(1, 2, Phase::zero()),
            ZxTerm::par(ZxTerm::id(), ZxTerm::x(1, 1, Phase::constant(PI))),
        );
        assert_eq!(t.arity().unwrap(), (1, 2));
    }

    #[test]
    fn arity_error_names_interface_and_path() {
        let bad = ZxTerm::par(ZxTerm::id(), ZxTerm::seq(ZxTerm::z(2, 1, Phase::zero()), ZxTerm::swap()));
        match bad.arity() {
            Err(ZxError::Arity { path, first_out, then_in }) => {
                assert_eq!(path, "term.par[1]");
                assert_eq!((first_out, then_in), (1, 2));
            }
            other => panic!("expected arity error, got {other:?}"),
        }
    }

    #[test]
    fn substitute_examples() {
        let t = ZxTerm::z(0, 1, Phase::param("alpha", 1.0));
        let mut b = Binding::new();
        b.insert("alpha".into(), PI);
        assert_eq!(t.substitute(&b), ZxTerm::z(0, 1, Phase::constant(PI)));
        assert_eq!(t.substitute(&Binding::new()), t);
        let enc = ZxTerm::x(0, 1, Phase::param("x0", PI));
        let mut b = Binding::new();
        b.insert("x0".into(), 1.0);
        assert_eq!(enc.substitute(&b), ZxTerm::x(0, 1, Phase::constant(PI)));
        assert!(enc.substitute(&b).params().is_empty());
    }

    #[test]
    fn empty_parallel_product_is_unit() {
        assert_eq!(ZxTerm::par_all(vec![]).arity().unwrap(), (0, 0));
        assert_eq!(identity(3).arity().unwrap(), (3, 3));
    }
}
