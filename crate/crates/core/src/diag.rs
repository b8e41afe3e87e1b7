//! Open string diagrams: a text format, a parser, and an evaluator.
//!
//! ```text
//! p=3; layer=affine
//! node 0 z_spider arity_in=1 arity_out=2
//! node 1 x_spider phase=2 arity_in=2 arity_out=1
//! wire in0 n0.in0
//! wire n0.out0 out0
//! ...
//! ```
//!
//! Evaluation assigns variables to every wire (two per quantum wire in the
//! doubled layer), collects each node's equations, and eliminates everything
//! except the boundary.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fmt::Write as _;

use crate::affrel::{self, AffineRelation, LinearSystem};
use crate::error::{Error, Result};
use crate::fplinalg::Prime;
use crate::stab::{self, DoubledSystem, GradedRelation, Phase, WireType, WireVars};
use crate::symp::{Dilation, SymplecticOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layer {
    Affine,
    Doubled,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layer::Affine => "affine",
            Layer::Doubled => "doubled",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Input(usize),
    Output(usize),
    NodeIn(usize, usize),
    NodeOut(usize, usize),
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Input(k) => write!(f, "in{k}"),
            Endpoint::Output(k) => write!(f, "out{k}"),
            Endpoint::NodeIn(n, k) => write!(f, "n{n}.in{k}"),
            Endpoint::NodeOut(n, k) => write!(f, "n{n}.out{k}"),
        }
    }
}

impl Endpoint {
    fn shifted(self, node: usize, inputs: usize, outputs: usize) -> Endpoint {
        match self {
            Endpoint::Input(k) => Endpoint::Input(k + inputs),
            Endpoint::Output(k) => Endpoint::Output(k + outputs),
            Endpoint::NodeIn(n, k) => Endpoint::NodeIn(n + node, k),
            Endpoint::NodeOut(n, k) => Endpoint::NodeOut(n + node, k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    ZSpider,
    XSpider,
    Scalar,
    CoScalar,
    AffineUnit,
    CupZ,
    CapZ,
    CupX,
    CapX,
    Swap,
    Scaling,
    Discard,
    Codiscard,
    MeasureZ,
    MeasureX,
    PrepZ,
    PrepX,
    CZSpider,
    CXSpider,
    Fourier,
    FourierDagger,
    Weyl,
    ProjectorZ,
    ProjectorX,
    Cup,
    Cap,
    Box,
}

const KIND_NAMES: &[(NodeKind, &str)] = &[
    (NodeKind::ZSpider, "z_spider"),
    (NodeKind::XSpider, "x_spider"),
    (NodeKind::Scalar, "scalar"),
    (NodeKind::CoScalar, "co_scalar"),
    (NodeKind::AffineUnit, "affine_unit"),
    (NodeKind::CupZ, "cup_z"),
    (NodeKind::CapZ, "cap_z"),
    (NodeKind::CupX, "cup_x"),
    (NodeKind::CapX, "cap_x"),
    (NodeKind::Swap, "swap"),
    (NodeKind::Scaling, "scaling"),
    (NodeKind::Discard, "discard"),
    (NodeKind::Codiscard, "codiscard"),
    (NodeKind::MeasureZ, "measure_z"),
    (NodeKind::MeasureX, "measure_x"),
    (NodeKind::PrepZ, "prep_z"),
    (NodeKind::PrepX, "prep_x"),
    (NodeKind::CZSpider, "cz_spider"),
    (NodeKind::CXSpider, "cx_spider"),
    (NodeKind::Fourier, "fourier"),
    (NodeKind::FourierDagger, "fourier_dagger"),
    (NodeKind::Weyl, "weyl"),
    (NodeKind::ProjectorZ, "projector_z"),
    (NodeKind::ProjectorX, "projector_x"),
    (NodeKind::Cup, "cup"),
    (NodeKind::Cap, "cap"),
    (NodeKind::Box, "box"),
];

impl NodeKind {
    pub fn name(self) -> &'static str {
        KIND_NAMES
            .iter()
            .find(|(k, _)| *k == self)
            .map(|(_, n)| *n)
            .expect("every kind is named")
    }

    pub fn from_name(s: &str) -> Option<NodeKind> {
        KIND_NAMES.iter().find(|(_, n)| *n == s).map(|(k, _)| *k)
    }

    pub fn allowed_in(self, layer: Layer) -> bool {
        use NodeKind::*;
        match layer {
            Layer::Affine => matches!(
                self,
                ZSpider | XSpider | Scalar | CoScalar | AffineUnit | CupZ | CapZ | CupX | CapX | Swap | Box
            ),
            Layer::Doubled => !matches!(
                self,
                Scalar | CoScalar | AffineUnit | CupZ | CapZ | CupX | CapX
            ),
        }
    }

    fn variable_arity(self) -> bool {
        matches!(
            self,
            NodeKind::ZSpider | NodeKind::XSpider | NodeKind::CZSpider | NodeKind::CXSpider
        )
    }

    /// Arity of fixed-shape kinds.
    fn fixed_arity(self) -> Option<(usize, usize)> {
        use NodeKind::*;
        Some(match self {
            Scalar | CoScalar | Scaling | MeasureZ | MeasureX | PrepZ | PrepX | Fourier | FourierDagger | Weyl
            | ProjectorZ | ProjectorX => (1, 1),
            AffineUnit | Codiscard => (0, 1),
            Discard => (1, 0),
            CupZ | CupX | Cup => (0, 2),
            CapZ | CapX | Cap => (2, 0),
            Swap => (2, 2),
            ZSpider | XSpider | CZSpider | CXSpider | Box => return None,
        })
    }

    /// Number of phase components accepted: 0, 1 (affine only) or 2.
    fn phase_slots(self, layer: Layer) -> usize {
        use NodeKind::*;
        match (self, layer) {
            (XSpider, Layer::Affine) | (Scalar | CoScalar | Scaling | CXSpider, _) => 1,
            (ZSpider | XSpider | Weyl, Layer::Doubled) => 2,
            _ => 0,
        }
    }

    fn phase_required(self) -> bool {
        matches!(self, NodeKind::Scalar | NodeKind::CoScalar | NodeKind::Scaling)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: usize,
    pub kind: NodeKind,
    pub n_in: usize,
    pub n_out: usize,
    pub phase: Phase,
    /// Box name and its resolved body.
    pub body: Option<(String, std::boxed::Box<Diagram>)>,
}

impl Node {
    fn port_types(&self) -> (Vec<WireType>, Vec<WireType>) {
        use NodeKind::*;
        let q = WireType::Quantum;
        let c = WireType::Classical;
        match self.kind {
            MeasureZ | MeasureX => (vec![q], vec![c]),
            PrepZ | PrepX => (vec![c], vec![q]),
            CZSpider | CXSpider => (vec![c; self.n_in], vec![c; self.n_out]),
            Box => {
                let d = &self.body.as_ref().expect("resolved box").1;
                (d.input_types(), d.output_types())
            }
            _ => (vec![q; self.n_in], vec![q; self.n_out]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Wire {
    pub a: Endpoint,
    pub b: Endpoint,
    /// Always `Quantum` in the affine layer.
    pub ty: WireType,
}

/// A validated diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    p: Prime,
    layer: Layer,
    nodes: Vec<Node>,
    wires: Vec<Wire>,
    n_inputs: usize,
    n_outputs: usize,
}

/// The value of a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Semantics {
    Affine(AffineRelation),
    Doubled(GradedRelation),
}

impl Semantics {
    pub fn relation(&self) -> &AffineRelation {
        match self {
            Semantics::Affine(r) => r,
            Semantics::Doubled(g) => g.relation(),
        }
    }
}

/// Loads the text of a named box.
pub type Resolver<'a> = &'a dyn Fn(&str) -> Result<String>;

#[derive(Default, Clone, Copy)]
pub struct ParseOptions<'a> {
    /// Replaces the field given in the header.
    pub p: Option<Prime>,
    pub resolver: Option<Resolver<'a>>,
}

const MAX_BOX_DEPTH: usize = 16;

pub fn parse(text: &str) -> Result<Diagram> {
    parse_with(text, &ParseOptions::default())
}

pub fn parse_with(text: &str, opts: &ParseOptions<'_>) -> Result<Diagram> {
    Parser {
        opts,
        depth: 0,
    }
    .parse(text)
}

struct Parser<'o, 'a> {
    opts: &'o ParseOptions<'a>,
    depth: usize,
}

struct Token<'s> {
    text: &'s str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: s + 1,
        });
    }
    out
}

fn parse_index(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_endpoint(s: &str) -> Option<Endpoint> {
    if let Some(rest) = s.strip_prefix("in") {
        return parse_index(rest).map(Endpoint::Input);
    }
    if let Some(rest) = s.strip_prefix("out") {
        return parse_index(rest).map(Endpoint::Output);
    }
    let rest = s.strip_prefix('n')?;
    let (node, port) = rest.split_once('.')?;
    let node = parse_index(node)?;
    if let Some(k) = port.strip_prefix("in") {
        return parse_index(k).map(|k| Endpoint::NodeIn(node, k));
    }
    if let Some(k) = port.strip_prefix("out") {
        return parse_index(k).map(|k| Endpoint::NodeOut(node, k));
    }
    None
}

struct RawNode {
    line: usize,
    id: usize,
    kind: NodeKind,
    n_in: usize,
    n_out: usize,
    phase: Phase,
    name: Option<String>,
}

struct RawWire {
    line: usize,
    a: Endpoint,
    b: Endpoint,
    column_b: usize,
}

enum TypeTarget {
    Endpoint(Endpoint),
    WireIndex(usize),
}

impl Parser<'_, '_> {
    fn parse(&self, text: &str) -> Result<Diagram> {
        let mut header: Option<(Prime, Layer)> = None;
        let mut nodes: Vec<RawNode> = Vec::new();
        let mut wires: Vec<RawWire> = Vec::new();
        let mut types: Vec<(usize, usize, TypeTarget, WireType)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("");
            let toks = tokens(line);
            let Some(first) = toks.first() else { continue };
            if header.is_none() {
                header = Some(self.parse_header(line, line_no)?);
                continue;
            }
            let (p, layer) = header.expect("header parsed");
            match first.text {
                "node" => nodes.push(self.parse_node(&toks, line_no, p, layer)?),
                "wire" => {
                    if toks.len() != 3 {
                        return Err(Error::parse(line_no, first.column, "expected `wire <endpoint> <endpoint>`"));
                    }
                    let a = parse_endpoint(toks[1].text)
                        .ok_or_else(|| Error::parse(line_no, toks[1].column, format!("bad endpoint `{}`", toks[1].text)))?;
                    let b = parse_endpoint(toks[2].text)
                        .ok_or_else(|| Error::parse(line_no, toks[2].column, format!("bad endpoint `{}`", toks[2].text)))?;
                    wires.push(RawWire {
                        line: line_no,
                        a,
                        b,
                        column_b: toks[2].column,
                    });
                }
                "wiretype" => {
                    if toks.len() != 3 {
                        return Err(Error::parse(
                            line_no,
                            first.column,
                            "expected `wiretype <endpoint|index> <quantum|classical>`",
                        ));
                    }
                    if layer != Layer::Doubled {
                        return Err(Error::parse(line_no, first.column, "wiretype is only allowed in the doubled layer"));
                    }
                    let target = if let Some(k) = parse_index(toks[1].text) {
                        TypeTarget::WireIndex(k)
                    } else {
                        TypeTarget::Endpoint(parse_endpoint(toks[1].text).ok_or_else(|| {
                            Error::parse(line_no, toks[1].column, format!("bad endpoint `{}`", toks[1].text))
                        })?)
                    };
                    let ty = match toks[2].text {
                        "quantum" => WireType::Quantum,
                        "classical" => WireType::Classical,
                        other => {
                            return Err(Error::parse(line_no, toks[2].column, format!("unknown wire type `{other}`")))
                        }
                    };
                    types.push((line_no, toks[1].column, target, ty));
                }
                other => {
                    return Err(Error::parse(line_no, first.column, format!("unknown statement `{other}`")));
                }
            }
        }
        let Some((p, layer)) = header else {
            return Err(Error::parse(1, 1, "missing header `p=<prime>; layer=<affine|doubled>`"));
        };
        self.assemble(p, layer, nodes, wires, types)
    }

    fn parse_header(&self, line: &str, line_no: usize) -> Result<(Prime, Layer)> {
        let mut p = None;
        let mut layer = None;
        let mut offset = 0;
        for part in line.split(';') {
            let col = offset + part.len() - part.trim_start().len() + 1;
            offset += part.len() + 1;
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let Some((k, v)) = part.split_once('=') else {
                return Err(Error::parse(line_no, col, format!("expected key=value, found `{part}`")));
            };
            match k.trim() {
                "p" => {
                    let n: u64 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(line_no, col, format!("bad prime `{}`", v.trim())))?;
                    let prime = Prime::new(n).map_err(|_| Error::parse(line_no, col, format!("p={n} is not prime")))?;
                    p = Some(prime);
                }
                "layer" => {
                    layer = Some(match v.trim() {
                        "affine" => Layer::Affine,
                        "doubled" => Layer::Doubled,
                        other => return Err(Error::parse(line_no, col, format!("unknown layer `{other}`"))),
                    })
                }
                other => return Err(Error::parse(line_no, col, format!("unknown header key `{other}`"))),
            }
        }
        let p = p.ok_or_else(|| Error::parse(line_no, 1, "header is missing p"))?;
        let layer = layer.ok_or_else(|| Error::parse(line_no, 1, "header is missing layer"))?;
        Ok((self.opts.p.unwrap_or(p), layer))
    }

    fn parse_phase_value(&self, s: &str, p: Prime, line: usize, col: usize) -> Result<u32> {
        let v: i64 = s
            .parse()
            .map_err(|_| Error::parse(line, col, format!("bad phase value `{s}`")))?;
        if v.unsigned_abs() >= u64::from(p.get()) {
            return Err(Error::parse(line, col, format!("phase {v} out of range for p={p}")));
        }
        Ok(p.reduce(v))
    }

    fn parse_node(&self, toks: &[Token<'_>], line: usize, p: Prime, layer: Layer) -> Result<RawNode> {
        if toks.len() < 3 {
            return Err(Error::parse(line, toks[0].column, "expected `node <id> <kind> [key=value...]`"));
        }
        let id = parse_index(toks[1].text)
            .ok_or_else(|| Error::parse(line, toks[1].column, format!("bad node id `{}`", toks[1].text)))?;
        let kind = NodeKind::from_name(toks[2].text)
            .ok_or_else(|| Error::parse(line, toks[2].column, format!("unknown node kind `{}`", toks[2].text)))?;
        if !kind.allowed_in(layer) {
            return Err(Error::parse(
                line,
                toks[2].column,
                format!("node kind `{}` is not allowed in the {layer} layer", kind.name()),
            ));
        }
        let mut phase = None;
        let mut arity_in = None;
        let mut arity_out = None;
        let mut name = None;
        for t in &toks[3..] {
            let Some((k, v)) = t.text.split_once('=') else {
                return Err(Error::parse(line, t.column, format!("expected key=value, found `{}`", t.text)));
            };
            let vcol = t.column + k.len() + 1;
            match k {
                "phase" => {
                    let parts: Vec<&str> = v.split(',').collect();
                    let slots = kind.phase_slots(layer);
                    if parts.len() > 2 || slots == 0 {
                        return Err(Error::parse(
                            line,
                            vcol,
                            format!("`{}` takes {} phase component(s) in the {layer} layer", kind.name(), slots),
                        ));
                    }
                    let a = self.parse_phase_value(parts[0], p, line, vcol)?;
                    let b = match parts.get(1) {
                        Some(s) => self.parse_phase_value(s, p, line, vcol + parts[0].len() + 1)?,
                        None => 0,
                    };
                    if slots == 1 && b != 0 {
                        return Err(Error::parse(
                            line,
                            vcol + parts[0].len() + 1,
                            format!("`{}` has no linear phase in the {layer} layer", kind.name()),
                        ));
                    }
                    phase = Some(Phase { affine: a, linear: b });
                }
                "arity_in" | "arity_out" => {
                    let n = parse_index(v).ok_or_else(|| Error::parse(line, vcol, format!("bad arity `{v}`")))?;
                    if k == "arity_in" {
                        arity_in = Some(n);
                    } else {
                        arity_out = Some(n);
                    }
                }
                "name" if kind == NodeKind::Box => {
                    if v.is_empty() || v.contains(['/', '\\']) {
                        return Err(Error::parse(line, vcol, format!("bad box name `{v}`")));
                    }
                    name = Some(v.to_string());
                }
                _ => return Err(Error::parse(line, t.column, format!("unknown attribute `{k}`"))),
            }
        }
        if kind.phase_required() && phase.is_none() {
            return Err(Error::parse(line, toks[2].column, format!("`{}` needs phase=<a>", kind.name())));
        }
        let phase = phase.unwrap_or_default();
        if kind == NodeKind::Scaling && phase.affine == 0 {
            return Err(Error::parse(line, toks[2].column, "scaling factor must be invertible"));
        }
        if kind == NodeKind::Box && name.is_none() {
            return Err(Error::parse(line, toks[2].column, "box needs name=<name>"));
        }
        let (n_in, n_out) = match kind.fixed_arity() {
            Some((i, o)) => {
                if arity_in.is_some_and(|a| a != i) || arity_out.is_some_and(|a| a != o) {
                    return Err(Error::parse(
                        line,
                        toks[2].column,
                        format!("`{}` has fixed arity {i}→{o}", kind.name()),
                    ));
                }
                (i, o)
            }
            None if kind.variable_arity() => (arity_in.unwrap_or(1), arity_out.unwrap_or(1)),
            None => (0, 0),
        };
        Ok(RawNode {
            line,
            id,
            kind,
            n_in,
            n_out,
            phase,
            name,
        })
    }

    fn resolve_box(&self, name: &str, p: Prime, layer: Layer, line: usize) -> Result<Diagram> {
        if self.depth >= MAX_BOX_DEPTH {
            return Err(Error::parse(line, 1, format!("boxes nested too deeply at `{name}`")));
        }
        let resolver = self
            .opts
            .resolver
            .ok_or_else(|| Error::parse(line, 1, format!("no resolver available for box `{name}`")))?;
        let text = resolver(name)?;
        let opts = ParseOptions {
            p: Some(p),
            resolver: self.opts.resolver,
        };
        let sub = Parser {
            opts: &opts,
            depth: self.depth + 1,
        }
        .parse(&text)
        .map_err(|e| Error::Diagram(format!("in box `{name}`: {e}")))?;
        if sub.layer != layer {
            return Err(Error::parse(line, 1, format!("box `{name}` is in the {} layer", sub.layer)));
        }
        Ok(sub)
    }

    fn assemble(
        &self,
        p: Prime,
        layer: Layer,
        raw_nodes: Vec<RawNode>,
        raw_wires: Vec<RawWire>,
        types: Vec<(usize, usize, TypeTarget, WireType)>,
    ) -> Result<Diagram> {
        let mut nodes: BTreeMap<usize, (usize, Node)> = BTreeMap::new();
        for rn in raw_nodes {
            let body = match &rn.name {
                Some(name) => Some((name.clone(), std::boxed::Box::new(self.resolve_box(name, p, layer, rn.line)?))),
                None => None,
            };
            let (n_in, n_out) = match &body {
                Some((_, d)) => (d.n_inputs, d.n_outputs),
                None => (rn.n_in, rn.n_out),
            };
            let node = Node {
                id: rn.id,
                kind: rn.kind,
                n_in,
                n_out,
                phase: rn.phase,
                body,
            };
            if nodes.insert(rn.id, (rn.line, node)).is_some() {
                return Err(Error::parse(rn.line, 1, format!("duplicate node id {}", rn.id)));
            }
        }

        let mut seen: HashMap<Endpoint, usize> = HashMap::new();
        let mut max_in: Option<usize> = None;
        let mut max_out: Option<usize> = None;
        for w in &raw_wires {
            for (ep, col) in [(w.a, 6), (w.b, w.column_b)] {
                match ep {
                    Endpoint::Input(k) => max_in = max_in.max(Some(k)),
                    Endpoint::Output(k) => max_out = max_out.max(Some(k)),
                    Endpoint::NodeIn(n, k) | Endpoint::NodeOut(n, k) => {
                        let Some((_, node)) = nodes.get(&n) else {
                            return Err(Error::parse(w.line, col, format!("unknown node {n}")));
                        };
                        let limit = if matches!(ep, Endpoint::NodeIn(..)) { node.n_in } else { node.n_out };
                        if k >= limit {
                            return Err(Error::parse(w.line, col, format!("{ep}: node {n} has only {limit} such ports")));
                        }
                    }
                }
                if let Some(prev) = seen.insert(ep, w.line) {
                    return Err(Error::parse(
                        w.line,
                        col,
                        format!("{ep} already connected on line {prev}"),
                    ));
                }
            }
        }
        let n_inputs = max_in.map_or(0, |k| k + 1);
        let n_outputs = max_out.map_or(0, |k| k + 1);
        for k in 0..n_inputs {
            if !seen.contains_key(&Endpoint::Input(k)) {
                return Err(Error::Diagram(format!("boundary slot in{k} is not connected")));
            }
        }
        for k in 0..n_outputs {
            if !seen.contains_key(&Endpoint::Output(k)) {
                return Err(Error::Diagram(format!("boundary slot out{k} is not connected")));
            }
        }
        for (line, node) in nodes.values() {
            let ports = (0..node.n_in)
                .map(|k| Endpoint::NodeIn(node.id, k))
                .chain((0..node.n_out).map(|k| Endpoint::NodeOut(node.id, k)));
            for ep in ports {
                if !seen.contains_key(&ep) {
                    return Err(Error::parse(*line, 1, format!("dangling port {ep}")));
                }
            }
        }

        // Wire types: inferred from node ports, then explicit declarations.
        let port_type = |ep: Endpoint| -> Option<WireType> {
            match ep {
                Endpoint::NodeIn(n, k) => Some(nodes[&n].1.port_types().0[k]),
                Endpoint::NodeOut(n, k) => Some(nodes[&n].1.port_types().1[k]),
                _ => None,
            }
        };
        let mut wire_types: Vec<Option<WireType>> = Vec::with_capacity(raw_wires.len());
        for w in &raw_wires {
            let (ta, tb) = if layer == Layer::Doubled {
                (port_type(w.a), port_type(w.b))
            } else {
                (None, None)
            };
            if let (Some(x), Some(y)) = (ta, tb) {
                if x != y {
                    return Err(Error::parse(w.line, 1, format!("wire joins a {x} port to a {y} port")));
                }
            }
            wire_types.push(ta.or(tb));
        }
        for (line, col, target, ty) in types {
            let idx = match target {
                TypeTarget::WireIndex(k) => {
                    if k >= raw_wires.len() {
                        return Err(Error::parse(line, col, format!("no wire with index {k}")));
                    }
                    k
                }
                TypeTarget::Endpoint(ep) => raw_wires
                    .iter()
                    .position(|w| w.a == ep || w.b == ep)
                    .ok_or_else(|| Error::parse(line, col, format!("no wire at {ep}")))?,
            };
            match wire_types[idx] {
                Some(t) if t != ty => {
                    return Err(Error::parse(line, col, format!("wire is {t} but declared {ty}")));
                }
                _ => wire_types[idx] = Some(ty),
            }
        }

        let wires = raw_wires
            .iter()
            .zip(wire_types)
            .map(|(w, t)| Wire {
                a: w.a,
                b: w.b,
                ty: t.unwrap_or(WireType::Quantum),
            })
            .collect();
        Ok(Diagram {
            p,
            layer,
            nodes: nodes.into_values().map(|(_, n)| n).collect(),
            wires,
            n_inputs,
            n_outputs,
        })
    }
}

impl Diagram {
    /// An empty diagram with no boundary.
    pub fn new(p: Prime, layer: Layer) -> Self {
        Diagram {
            p,
            layer,
            nodes: Vec::new(),
            wires: Vec::new(),
            n_inputs: 0,
            n_outputs: 0,
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    fn boundary_type(&self, ep: Endpoint) -> WireType {
        self.wires
            .iter()
            .find(|w| w.a == ep || w.b == ep)
            .map_or(WireType::Quantum, |w| w.ty)
    }

    pub fn input_types(&self) -> Vec<WireType> {
        (0..self.n_inputs).map(|k| self.boundary_type(Endpoint::Input(k))).collect()
    }

    pub fn output_types(&self) -> Vec<WireType> {
        (0..self.n_outputs).map(|k| self.boundary_type(Endpoint::Output(k))).collect()
    }

    /// Adds a node and returns its id. Boxes cannot be added this way.
    pub fn add_node(&mut self, kind: NodeKind, n_in: usize, n_out: usize, phase: Phase) -> Result<usize> {
        if !kind.allowed_in(self.layer) || kind == NodeKind::Box {
            return Err(Error::Diagram(format!("cannot add `{}` to a {} diagram", kind.name(), self.layer)));
        }
        let (n_in, n_out) = kind.fixed_arity().unwrap_or((n_in, n_out));
        let id = self.nodes.iter().map(|n| n.id + 1).max().unwrap_or(0);
        self.nodes.push(Node {
            id,
            kind,
            n_in,
            n_out,
            phase,
            body: None,
        });
        Ok(id)
    }

    /// Connects two endpoints; boundary slots extend the boundary as needed.
    pub fn connect(&mut self, a: Endpoint, b: Endpoint, ty: WireType) {
        for ep in [a, b] {
            match ep {
                Endpoint::Input(k) => self.n_inputs = self.n_inputs.max(k + 1),
                Endpoint::Output(k) => self.n_outputs = self.n_outputs.max(k + 1),
                _ => {}
            }
        }
        self.wires.push(Wire { a, b, ty });
    }

    pub fn evaluate(&self) -> Result<Semantics> {
        Ok(match self.layer {
            Layer::Affine => Semantics::Affine(self.evaluate_affine()?),
            Layer::Doubled => Semantics::Doubled(self.evaluate_doubled()?),
        })
    }

    pub fn evaluate_affine(&self) -> Result<AffineRelation> {
        if self.layer != Layer::Affine {
            return Err(Error::Diagram("expected an affine-layer diagram".into()));
        }
        let p = self.p;
        let mut sys = LinearSystem::new(p);
        let mut var_at: HashMap<Endpoint, usize> = HashMap::new();
        for w in &self.wires {
            let v = sys.add_var();
            var_at.insert(w.a, v);
            var_at.insert(w.b, v);
        }
        let lookup = |ep: Endpoint| -> Result<usize> {
            var_at
                .get(&ep)
                .copied()
                .ok_or_else(|| Error::Diagram(format!("{ep} is not connected")))
        };
        for node in &self.nodes {
            let rel = match node.kind {
                NodeKind::ZSpider => affrel::z_spider(p, node.n_in, node.n_out),
                NodeKind::XSpider => affrel::x_spider(p, node.n_in, node.n_out, node.phase.affine),
                NodeKind::Scalar => affrel::scalar(p, node.phase.affine),
                NodeKind::CoScalar => affrel::co_scalar(p, node.phase.affine),
                NodeKind::AffineUnit => affrel::affine_unit(p),
                NodeKind::CupZ => affrel::cup_z(p),
                NodeKind::CapZ => affrel::cap_z(p),
                NodeKind::CupX => affrel::cup_x(p),
                NodeKind::CapX => affrel::cap_x(p),
                NodeKind::Swap => affrel::swap(p),
                NodeKind::Box => node.body.as_ref().expect("resolved box").1.evaluate_affine()?,
                other => return Err(Error::Diagram(format!("`{}` is not an affine-layer node", other.name()))),
            };
            let mut vars = Vec::with_capacity(node.n_in + node.n_out);
            for k in 0..node.n_in {
                vars.push(lookup(Endpoint::NodeIn(node.id, k))?);
            }
            for k in 0..node.n_out {
                vars.push(lookup(Endpoint::NodeOut(node.id, k))?);
            }
            sys.constrain(&rel, &vars)?;
        }
        let ins = (0..self.n_inputs)
            .map(|k| lookup(Endpoint::Input(k)))
            .collect::<Result<Vec<_>>>()?;
        let outs = (0..self.n_outputs)
            .map(|k| lookup(Endpoint::Output(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(sys.project(&ins, &outs))
    }

    pub fn evaluate_doubled(&self) -> Result<GradedRelation> {
        if self.layer != Layer::Doubled {
            return Err(Error::Diagram("expected a doubled-layer diagram".into()));
        }
        let p = self.p;
        let mut sys = DoubledSystem::new(p);
        let mut var_at: HashMap<Endpoint, WireVars> = HashMap::new();
        for w in &self.wires {
            let v = sys.wire(w.ty);
            var_at.insert(w.a, v);
            var_at.insert(w.b, v);
        }
        let lookup = |ep: Endpoint| -> Result<WireVars> {
            var_at
                .get(&ep)
                .copied()
                .ok_or_else(|| Error::Diagram(format!("{ep} is not connected")))
        };
        for node in &self.nodes {
            let ph = node.phase;
            let rel = match node.kind {
                NodeKind::ZSpider => stab::z_spider(p, node.n_in, node.n_out, ph),
                NodeKind::XSpider => stab::x_spider(p, node.n_in, node.n_out, ph),
                NodeKind::Scaling => stab::scaling_gate(p, ph.affine)?,
                NodeKind::Discard => stab::discard(p),
                NodeKind::Codiscard => stab::codiscard(p),
                NodeKind::MeasureZ => stab::measure_z(p),
                NodeKind::MeasureX => stab::measure_x(p),
                NodeKind::PrepZ => stab::prep_z(p),
                NodeKind::PrepX => stab::prep_x(p),
                NodeKind::CZSpider => stab::classical_z_spider(p, node.n_in, node.n_out),
                NodeKind::CXSpider => stab::classical_x_spider(p, node.n_in, node.n_out, ph.affine),
                NodeKind::Fourier => stab::fourier(p),
                NodeKind::FourierDagger => stab::fourier_dagger(p),
                NodeKind::Weyl => stab::weyl(p, &[ph.affine], &[ph.linear])?,
                NodeKind::ProjectorZ => stab::projector_z(p),
                NodeKind::ProjectorX => stab::projector_x(p),
                NodeKind::Swap => stab::swap(p),
                NodeKind::Cup => stab::cup(p),
                NodeKind::Cap => stab::cap(p),
                NodeKind::Box => node.body.as_ref().expect("resolved box").1.evaluate_doubled()?,
                other => return Err(Error::Diagram(format!("`{}` is not a doubled-layer node", other.name()))),
            };
            let ins = (0..node.n_in)
                .map(|k| lookup(Endpoint::NodeIn(node.id, k)))
                .collect::<Result<Vec<_>>>()?;
            let outs = (0..node.n_out)
                .map(|k| lookup(Endpoint::NodeOut(node.id, k)))
                .collect::<Result<Vec<_>>>()?;
            sys.constrain(&rel, &ins, &outs)
                .map_err(|e| Error::Diagram(format!("node {}: {e}", node.id)))?;
        }
        let ins = (0..self.n_inputs)
            .map(|k| lookup(Endpoint::Input(k)))
            .collect::<Result<Vec<_>>>()?;
        let outs = (0..self.n_outputs)
            .map(|k| lookup(Endpoint::Output(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(sys.project(&ins, &outs))
    }

    /// Compacts node ids (keeping their order), orients every wire and sorts the wires.
    pub fn normalized(&self) -> Diagram {
        let mut nodes = self.nodes.clone();
        nodes.sort_by_key(|n| n.id);
        let remap: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        for n in &mut nodes {
            n.id = remap[&n.id];
            if let Some((_, body)) = &mut n.body {
                **body = body.normalized();
            }
        }
        let re = |ep: Endpoint| match ep {
            Endpoint::NodeIn(n, k) => Endpoint::NodeIn(remap[&n], k),
            Endpoint::NodeOut(n, k) => Endpoint::NodeOut(remap[&n], k),
            other => other,
        };
        let mut wires: Vec<Wire> = self
            .wires
            .iter()
            .map(|w| {
                let (a, b) = (re(w.a), re(w.b));
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                Wire { a, b, ty: w.ty }
            })
            .collect();
        wires.sort();
        Diagram {
            p: self.p,
            layer: self.layer,
            nodes,
            wires,
            n_inputs: self.n_inputs,
            n_outputs: self.n_outputs,
        }
    }

    /// Renders the diagram in the text format. Box bodies are referenced by name.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p={}; layer={}", self.p, self.layer);
        for n in &self.nodes {
            let _ = write!(s, "node {} {}", n.id, n.kind.name());
            if let Some((name, _)) = &n.body {
                let _ = write!(s, " name={name}");
            }
            match n.kind.phase_slots(self.layer) {
                2 if n.phase != Phase::zero() => {
                    let _ = write!(s, " phase={},{}", n.phase.affine, n.phase.linear);
                }
                1 if n.phase.affine != 0 || n.kind.phase_required() => {
                    let _ = write!(s, " phase={}", n.phase.affine);
                }
                _ => {}
            }
            if n.kind.variable_arity() {
                let _ = write!(s, " arity_in={} arity_out={}", n.n_in, n.n_out);
            }
            s.push('\n');
        }
        for w in &self.wires {
            let _ = writeln!(s, "wire {} {}", w.a, w.b);
        }
        if self.layer == Layer::Doubled {
            for w in &self.wires {
                let boundary_only = |ep: Endpoint| matches!(ep, Endpoint::Input(_) | Endpoint::Output(_));
                if boundary_only(w.a) && boundary_only(w.b) && w.ty == WireType::Classical {
                    let _ = writeln!(s, "wiretype {} classical", w.a);
                }
            }
        }
        s
    }
}

fn check_gluable(d1: &Diagram, d2: &Diagram, context: &'static str) -> Result<()> {
    if d1.p != d2.p || d1.layer != d2.layer {
        return Err(Error::BoundaryMismatch {
            context,
            detail: format!("F_{} {} vs F_{} {}", d1.p, d1.layer, d2.p, d2.layer),
        });
    }
    Ok(())
}

/// Juxtaposes two diagrams; the second one's nodes and boundary slots come after the first's.
pub fn tensor_diagrams(d1: &Diagram, d2: &Diagram) -> Result<Diagram> {
    check_gluable(d1, d2, "tensor diagrams")?;
    let a = d1.normalized();
    let b = d2.normalized();
    let off = a.nodes.len();
    let mut out = a.clone();
    for n in &b.nodes {
        let mut n = n.clone();
        n.id += off;
        out.nodes.push(n);
    }
    for w in &b.wires {
        out.wires.push(Wire {
            a: w.a.shifted(off, a.n_inputs, a.n_outputs),
            b: w.b.shifted(off, a.n_inputs, a.n_outputs),
            ty: w.ty,
        });
    }
    out.n_inputs += b.n_inputs;
    out.n_outputs += b.n_outputs;
    Ok(out)
}

/// Plugs the outputs of `d1` into the inputs of `d2`.
pub fn compose_diagrams(d1: &Diagram, d2: &Diagram) -> Result<Diagram> {
    check_gluable(d1, d2, "compose diagrams")?;
    if d1.n_outputs != d2.n_inputs || (d1.layer == Layer::Doubled && d1.output_types() != d2.input_types()) {
        return Err(Error::BoundaryMismatch {
            context: "compose diagrams",
            detail: format!(
                "{} outputs {} vs {} inputs {}",
                d1.n_outputs,
                stab::fmt_types(&d1.output_types()),
                d2.n_inputs,
                stab::fmt_types(&d2.input_types())
            ),
        });
    }
    let a = d1.normalized();
    let b = d2.normalized();
    let off = a.nodes.len();

    // Endpoints tagged by side: 0 for d1, 1 for d2 (node ids of d2 already shifted).
    let mut partner: HashMap<(u8, Endpoint), ((u8, Endpoint), WireType)> = HashMap::new();
    let mut order: Vec<(u8, Endpoint)> = Vec::new();
    for w in &a.wires {
        partner.insert((0, w.a), ((0, w.b), w.ty));
        partner.insert((0, w.b), ((0, w.a), w.ty));
        order.push((0, w.a));
        order.push((0, w.b));
    }
    for w in &b.wires {
        let (x, y) = (w.a.shifted(off, 0, 0), w.b.shifted(off, 0, 0));
        partner.insert((1, x), ((1, y), w.ty));
        partner.insert((1, y), ((1, x), w.ty));
        order.push((1, x));
        order.push((1, y));
    }
    let is_glue = |e: (u8, Endpoint)| matches!(e, (0, Endpoint::Output(_)) | (1, Endpoint::Input(_)));
    let across = |e: (u8, Endpoint)| match e {
        (0, Endpoint::Output(k)) => (1, Endpoint::Input(k)),
        (1, Endpoint::Input(k)) => (0, Endpoint::Output(k)),
        _ => unreachable!("glue endpoint"),
    };
    let mut out = Diagram::new(a.p, a.layer);
    out.nodes = a.nodes.clone();
    for n in &b.nodes {
        let mut n = n.clone();
        n.id += off;
        out.nodes.push(n);
    }
    let mut visited: std::collections::HashSet<(u8, Endpoint)> = std::collections::HashSet::new();
    for &start in &order {
        if is_glue(start) || visited.contains(&start) {
            continue;
        }
        visited.insert(start);
        let (mut cur, ty) = partner[&start];
        while is_glue(cur) {
            let next = across(cur);
            cur = partner[&next].0;
        }
        visited.insert(cur);
        out.connect(start.1, cur.1, ty);
    }
    out.n_inputs = a.n_inputs;
    out.n_outputs = b.n_outputs;
    Ok(out)
}

/// Builds the encoder of a dilation as a doubled-layer diagram of generators.
pub fn dilation_diagram(dil: &Dilation) -> Result<Diagram> {
    let p = dil.space().prime();
    let n = dil.n();
    let k = dil.k();
    let q = WireType::Quantum;
    let mut d = Diagram::new(p, Layer::Doubled);
    let mut cur: Vec<Endpoint> = (0..k).map(Endpoint::Input).collect();
    for _ in k..n {
        let point = d.add_node(NodeKind::CXSpider, 0, 1, Phase::zero())?;
        let prep = d.add_node(NodeKind::PrepZ, 1, 1, Phase::zero())?;
        d.connect(Endpoint::NodeOut(point, 0), Endpoint::NodeIn(prep, 0), WireType::Classical);
        cur.push(Endpoint::NodeOut(prep, 0));
    }
    let one = |d: &mut Diagram, cur: &mut Vec<Endpoint>, w: usize, kind: NodeKind, phase: Phase| -> Result<()> {
        let id = d.add_node(kind, 1, 1, phase)?;
        d.connect(cur[w], Endpoint::NodeIn(id, 0), q);
        cur[w] = Endpoint::NodeOut(id, 0);
        Ok(())
    };
    // Two-wire gadget: spider on wire a with a leg through `leg` into a spider on wire b.
    let gadget = |d: &mut Diagram,
                  cur: &mut Vec<Endpoint>,
                  a: usize,
                  b: usize,
                  first: NodeKind,
                  leg: &[(NodeKind, Phase)]|
     -> Result<()> {
        let s1 = d.add_node(first, 1, 2, Phase::zero())?;
        d.connect(cur[a], Endpoint::NodeIn(s1, 0), q);
        cur[a] = Endpoint::NodeOut(s1, 0);
        let mut leg_end = Endpoint::NodeOut(s1, 1);
        for &(kind, ph) in leg {
            let id = d.add_node(kind, 1, 1, ph)?;
            d.connect(leg_end, Endpoint::NodeIn(id, 0), q);
            leg_end = Endpoint::NodeOut(id, 0);
        }
        let s2 = d.add_node(NodeKind::XSpider, 2, 1, Phase::zero())?;
        d.connect(cur[b], Endpoint::NodeIn(s2, 0), q);
        d.connect(leg_end, Endpoint::NodeIn(s2, 1), q);
        cur[b] = Endpoint::NodeOut(s2, 0);
        Ok(())
    };
    for op in dil.ops().iter().rev() {
        match *op {
            SymplecticOp::Fourier(j) => one(&mut d, &mut cur, j, NodeKind::FourierDagger, Phase::zero())?,
            SymplecticOp::Swap(a, b) => {
                let id = d.add_node(NodeKind::Swap, 2, 2, Phase::zero())?;
                d.connect(cur[a], Endpoint::NodeIn(id, 0), q);
                d.connect(cur[b], Endpoint::NodeIn(id, 1), q);
                cur[a] = Endpoint::NodeOut(id, 0);
                cur[b] = Endpoint::NodeOut(id, 1);
            }
            SymplecticOp::Cx {
                control,
                target,
                factor,
            } => {
                let s = Phase {
                    affine: p.neg(factor),
                    linear: 0,
                };
                gadget(&mut d, &mut cur, control, target, NodeKind::ZSpider, &[(NodeKind::Scaling, s)])?;
            }
            SymplecticOp::XPhase { wire, b } => one(
                &mut d,
                &mut cur,
                wire,
                NodeKind::XSpider,
                Phase {
                    affine: 0,
                    linear: p.neg(b),
                },
            )?,
            SymplecticOp::XCoupling { a, b, factor } => {
                let s = Phase {
                    affine: p.neg(factor),
                    linear: 0,
                };
                gadget(
                    &mut d,
                    &mut cur,
                    a,
                    b,
                    NodeKind::XSpider,
                    &[(NodeKind::FourierDagger, Phase::zero()), (NodeKind::Scaling, s)],
                )?;
            }
        }
    }
    let shift = dil.shift();
    for w in 0..n {
        let ph = Phase {
            affine: shift[w],
            linear: shift[n + w],
        };
        if ph != Phase::zero() {
            one(&mut d, &mut cur, w, NodeKind::Weyl, ph)?;
        }
    }
    for (w, &ep) in cur.iter().enumerate() {
        d.connect(ep, Endpoint::Output(w), q);
    }
    d.n_inputs = k;
    Ok(d)
}
