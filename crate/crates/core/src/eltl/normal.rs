//! Normal form `φ0 ∧ F φ1 ∧ … ∧ F φk ∧ G φ(k+1)` and the cut graph whose
//! topological orders enumerate lasso shapes.

use std::fmt;

use super::{EltlFormula, Prop};
use super::EltlError;

/// `phi0 ∧ ⋀ F eventualities ∧ G always`. The `always` part never has an
/// `always` part of its own (nested G bodies are merged).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub phi0: Prop,
    pub eventualities: Vec<NormalForm>,
    pub always: Option<Box<NormalForm>>,
}

impl NormalForm {
    pub fn prop(p: Prop) -> Self {
        NormalForm {
            phi0: p,
            eventualities: Vec::new(),
            always: None,
        }
    }

    /// The local proposition.
    pub fn local(&self) -> &Prop {
        &self.phi0
    }

    /// The global proposition (`True` when there is no G part).
    pub fn global(&self) -> Prop {
        self.always
            .as_ref()
            .map(|a| a.phi0.clone())
            .unwrap_or(Prop::True)
    }

    fn conj(mut self, other: NormalForm) -> NormalForm {
        self.phi0 = Prop::and([self.phi0, other.phi0]);
        self.eventualities.extend(other.eventualities);
        self.always = match (self.always, other.always) {
            (None, b) => b,
            (a, None) => a,
            (Some(a), Some(b)) => Some(Box::new(a.conj(*b))),
        };
        self
    }

    /// `G self`, flattened: G(a ∧ ⋀F e ∧ G b) = G(a ∧ b) ∧ ⋀ GF e ∧ ⋀ GF e_b.
    fn globally(self) -> NormalForm {
        let mut body = NormalForm::prop(self.phi0);
        body.eventualities = self.eventualities;
        if let Some(a) = self.always {
            body.phi0 = Prop::and([body.phi0, a.phi0]);
            body.eventualities.extend(a.eventualities);
        }
        NormalForm {
            phi0: Prop::True,
            eventualities: Vec::new(),
            always: Some(Box::new(body)),
        }
    }
}

/// Rewrites `f` into normal form. Temporal operators below `or`, `not` or
/// `imp` cannot be rewritten and are reported.
pub fn to_normal_form(f: &EltlFormula) -> Result<NormalForm, EltlError> {
    match f {
        EltlFormula::Prop(p) => Ok(NormalForm::prop(p.clone())),
        EltlFormula::And(fs) => {
            let mut acc = NormalForm::prop(Prop::True);
            for g in fs {
                acc = acc.conj(to_normal_form(g)?);
            }
            Ok(acc)
        }
        EltlFormula::F(g) => match g.as_ref() {
            EltlFormula::F(_) => to_normal_form(g),
            _ => Ok(NormalForm {
                phi0: Prop::True,
                eventualities: vec![to_normal_form(g)?],
                always: None,
            }),
        },
        EltlFormula::G(g) => Ok(to_normal_form(g)?.globally()),
        other => Err(EltlError::NormalizationFailed(format!("{other:?}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Root,
    /// An eventuality fulfilled once, before the loop.
    Stem,
    /// An eventuality under G, fulfilled inside the loop.
    Loop,
    LoopStart,
    LoopEnd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub label: String,
    pub local: Prop,
    pub global: Prop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<(usize, usize)>,
}

pub const ROOT: usize = 0;
pub const LOOP_ST: usize = 1;
pub const LOOP_END: usize = 2;

impl fmt::Display for CutGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.edges {
            writeln!(f, "{} -> {}", self.nodes[*a].label, self.nodes[*b].label)?;
        }
        Ok(())
    }
}

impl CutGraph {
    fn add(&mut self, kind: NodeKind, nf: Option<&NormalForm>) -> usize {
        let label = match kind {
            NodeKind::Root => "root".to_string(),
            NodeKind::LoopStart => "loop_st".to_string(),
            NodeKind::LoopEnd => "loop_end".to_string(),
            NodeKind::Stem => format!("F{}", self.nodes.len() - 2),
            NodeKind::Loop => format!("GF{}", self.nodes.len() - 2),
        };
        let (local, global) = match nf {
            Some(nf) => (nf.phi0.clone(), nf.global()),
            None => (Prop::True, Prop::True),
        };
        self.nodes.push(Node {
            kind,
            label,
            local,
            global,
        });
        self.nodes.len() - 1
    }

    fn stem(&mut self, parent: usize, e: &NormalForm) {
        let u = self.add(NodeKind::Stem, Some(e));
        self.edges.push((parent, u));
        self.edges.push((u, LOOP_ST));
        for c in &e.eventualities {
            self.stem(u, c);
        }
        if let Some(a) = &e.always {
            for c in &a.eventualities {
                self.in_loop(None, c);
            }
        }
    }

    fn in_loop(&mut self, parent: Option<usize>, e: &NormalForm) {
        let u = self.add(NodeKind::Loop, Some(e));
        self.edges.push((LOOP_ST, u));
        self.edges.push((u, LOOP_END));
        if let Some(p) = parent {
            self.edges.push((p, u));
        }
        let nested = e.always.iter().flat_map(|a| a.eventualities.iter());
        for c in e.eventualities.iter().chain(nested) {
            self.in_loop(Some(u), c);
        }
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.0 == v).map(|e| e.1)
    }

    /// Whether `order` is a permutation of the nodes respecting every edge.
    pub fn is_topological(&self, order: &[usize]) -> bool {
        let mut pos = vec![usize::MAX; self.nodes.len()];
        for (i, &v) in order.iter().enumerate() {
            if v >= pos.len() || pos[v] != usize::MAX {
                return false;
            }
            pos[v] = i;
        }
        order.len() == self.nodes.len() && self.edges.iter().all(|&(a, b)| pos[a] < pos[b])
    }
}

pub fn cut_graph(nf: &NormalForm) -> CutGraph {
    let mut g = CutGraph {
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    g.add(NodeKind::Root, Some(nf));
    g.add(NodeKind::LoopStart, None);
    g.add(NodeKind::LoopEnd, None);
    g.edges.push((ROOT, LOOP_ST));
    g.edges.push((LOOP_ST, LOOP_END));
    for e in &nf.eventualities {
        g.stem(ROOT, e);
    }
    if let Some(a) = &nf.always {
        for e in &a.eventualities {
            g.in_loop(None, e);
        }
    }
    g
}

/// Lazy enumeration of all topological orders in lexicographic order of
/// node indices.
pub struct TopoOrders<'a> {
    g: &'a CutGraph,
    indeg: Vec<usize>,
    placed: Vec<bool>,
    order: Vec<usize>,
    started: bool,
}

pub fn topo_orders(g: &CutGraph) -> TopoOrders<'_> {
    let mut indeg = vec![0; g.nodes.len()];
    for &(_, b) in &g.edges {
        indeg[b] += 1;
    }
    TopoOrders {
        g,
        indeg,
        placed: vec![false; g.nodes.len()],
        order: Vec::new(),
        started: false,
    }
}

impl TopoOrders<'_> {
    fn place(&mut self, v: usize) {
        self.placed[v] = true;
        self.order.push(v);
        for w in self.g.successors(v).collect::<Vec<_>>() {
            self.indeg[w] -= 1;
        }
    }

    fn unplace(&mut self) -> usize {
        let v = self.order.pop().expect("nonempty");
        self.placed[v] = false;
        for w in self.g.successors(v).collect::<Vec<_>>() {
            self.indeg[w] += 1;
        }
        v
    }

    fn available_after(&self, min: usize) -> Option<usize> {
        (min..self.g.nodes.len()).find(|&v| !self.placed[v] && self.indeg[v] == 0)
    }

    /// Completes the current prefix greedily; false if stuck (cyclic graph).
    fn fill(&mut self) -> bool {
        while self.order.len() < self.g.nodes.len() {
            match self.available_after(0) {
                Some(v) => self.place(v),
                None => return false,
            }
        }
        true
    }
}

impl Iterator for TopoOrders<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
            return self.fill().then(|| self.order.clone());
        }
        while !self.order.is_empty() {
            let v = self.unplace();
            if let Some(w) = self.available_after(v + 1) {
                self.place(w);
                if self.fill() {
                    return Some(self.order.clone());
                }
                return None;
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn z(l: usize) -> Prop {
        Prop::Zero(BTreeSet::from([l]))
    }

    fn p(l: usize) -> EltlFormula {
        EltlFormula::Prop(z(l))
    }

    fn f(x: EltlFormula) -> EltlFormula {
        EltlFormula::F(Box::new(x))
    }

    fn g(x: EltlFormula) -> EltlFormula {
        EltlFormula::G(Box::new(x))
    }

    fn and(xs: Vec<EltlFormula>) -> EltlFormula {
        EltlFormula::And(xs)
    }

    #[test]
    fn safety_shape() {
        let nf = to_normal_form(&and(vec![p(0), g(p(3))])).unwrap();
        assert_eq!(nf.phi0, z(0));
        assert!(nf.eventualities.is_empty());
        assert_eq!(nf.global(), z(3));
        let graph = cut_graph(&nf);
        assert_eq!(graph.nodes.len(), 3);
        assert_eq!(topo_orders(&graph).count(), 1);
    }

    #[test]
    fn pf_alone() {
        let nf = to_normal_form(&p(1)).unwrap();
        assert_eq!(nf, NormalForm::prop(z(1)));
    }

    #[test]
    fn nested_rewrites() {
        let nf = to_normal_form(&f(f(p(1)))).unwrap();
        assert_eq!(nf.eventualities, vec![NormalForm::prop(z(1))]);
        // G(a ∧ G b) = G(a ∧ b)
        let nf = to_normal_form(&g(and(vec![p(0), g(p(1))]))).unwrap();
        let a = nf.always.unwrap();
        assert_eq!(a.phi0, Prop::And(vec![z(0), z(1)]));
        assert!(a.always.is_none());
    }

    #[test]
    fn temporal_disjunction_is_rejected() {
        let bad = EltlFormula::Or(vec![f(p(0)), p(1)]);
        assert!(matches!(
            to_normal_form(&and(vec![p(2), bad])),
            Err(EltlError::NormalizationFailed(_))
        ));
    }

    fn fig5_body() -> EltlFormula {
        // a ∧ Fb ∧ Fc ∧ Gd ∧ GFe
        and(vec![p(0), f(p(1)), f(p(2)), g(p(3)), g(f(p(4)))])
    }

    #[test]
    fn fig5_graph() {
        let graph = cut_graph(&to_normal_form(&fig5_body()).unwrap());
        assert_eq!(graph.nodes.len(), 6);
        let labels = |o: &[usize]| -> Vec<String> {
            o.iter().map(|&v| graph.nodes[v].label.clone()).collect()
        };
        let orders: Vec<Vec<String>> = topo_orders(&graph).map(|o| labels(&o)).collect();
        assert_eq!(orders.len(), 2);
        // a ≤ Fb ≤ Fc ≤ loop_st ≤ GFe ≤ loop_end
        assert_eq!(orders[0], ["root", "F1", "F2", "loop_st", "GF3", "loop_end"]);
        assert_eq!(graph.nodes[0].local, z(0));
        assert_eq!(graph.nodes[0].global, z(3));

        let wrapped = cut_graph(&to_normal_form(&f(fig5_body())).unwrap());
        assert_eq!(wrapped.nodes.len(), 7);
        assert_eq!(topo_orders(&wrapped).count(), 2);
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn orders_match_brute_force() {
        let formulas = [
            fig5_body(),
            and(vec![f(p(0)), f(p(1))]),
            and(vec![f(and(vec![p(0), f(p(1))])), g(f(p(2))), g(f(p(3)))]),
            and(vec![f(p(0)), f(p(1)), f(p(2)), g(f(and(vec![p(3), f(p(4))])))]),
        ];
        for phi in &formulas {
            let graph = cut_graph(&to_normal_form(phi).unwrap());
            let mut brute: Vec<Vec<usize>> = permutations(graph.nodes.len())
                .into_iter()
                .filter(|o| graph.is_topological(o))
                .collect();
            brute.sort();
            let lazy: Vec<Vec<usize>> = topo_orders(&graph).collect();
            assert_eq!(lazy, brute);
            for o in &lazy {
                assert_eq!(*o.last().unwrap(), LOOP_END);
                assert_eq!(o[0], ROOT);
            }
        }
    }

    #[test]
    fn top_level_eventualities_interleave() {
        let graph = cut_graph(&to_normal_form(&and(vec![f(p(0)), f(p(1))])).unwrap());
        assert_eq!(topo_orders(&graph).count(), 2);
    }

    #[test]
    fn diamond() {
        let graph = CutGraph {
            nodes: (0..4)
                .map(|i| Node {
                    kind: NodeKind::Stem,
                    label: i.to_string(),
                    local: Prop::True,
                    global: Prop::True,
                })
                .collect(),
            edges: vec![(0, 1), (0, 2), (1, 3), (2, 3)],
        };
        assert_eq!(topo_orders(&graph).count(), 2);
        let chain = CutGraph {
            nodes: graph.nodes[..3].to_vec(),
            edges: vec![(0, 1), (1, 2)],
        };
        assert_eq!(topo_orders(&chain).count(), 1);
    }
}
