//! Coned-off graphs: one cone vertex per left coset `γ⟨h⟩` meeting the ball,
//! joined to every member of the coset in the ball.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BallGraph, EdgeLabel, Graph, VertexLabel};
use crate::group::{CosetId, Element, GroupSpec};
use crate::word::Word;

/// A family of cosets of the cyclic subgroup generated by `generator`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConeFamily {
    pub tag: String,
    pub generator: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeVertex {
    pub vertex: usize,
    pub family: usize,
    pub coset: CosetId,
}

#[derive(Debug, Clone)]
pub struct ConedGraph {
    pub spec: Option<GroupSpec>,
    /// The coned graph `K̂` with its base vertex.
    pub hat: BallGraph,
    /// `K`: same vertex indexing as `hat`, cone edges removed (cone vertices
    /// are isolated).
    pub base_graph: Graph,
    pub families: Vec<ConeFamily>,
    cones: Vec<ConeVertex>,
    cone_slot: Vec<Option<usize>>,
    memberships: Vec<Vec<usize>>,
}

impl ConedGraph {
    /// Wraps a graph whose cone vertices carry `VertexKind::Cone` labels with
    /// a family tag and coset word.
    pub fn from_hat(
        hat: Graph,
        base: usize,
        families: Vec<ConeFamily>,
        spec: Option<GroupSpec>,
    ) -> Result<Self> {
        let n = hat.vertex_count();
        let mut base_graph = Graph::new();
        for l in hat.labels() {
            base_graph.add_vertex(l.clone());
        }
        for (u, v) in hat.edges() {
            if !hat.is_cone(u) && !hat.is_cone(v) {
                let label = hat.edge_label(u, v).expect("edge exists");
                base_graph.add_edge(u, v, label);
            }
        }
        let mut cones = Vec::new();
        let mut cone_slot = alloc::vec![None; n];
        let mut memberships = alloc::vec![Vec::new(); n];
        for (v, slot) in cone_slot.iter_mut().enumerate() {
            let l = hat.label(v);
            if !l.is_cone() {
                continue;
            }
            let tag = l.tag.as_deref().unwrap_or_default();
            let family = families
                .iter()
                .position(|f| f.tag == tag)
                .ok_or_else(|| Error::InvalidSpec(alloc::format!("unknown cone tag {tag:?}")))?;
            *slot = Some(cones.len());
            cones.push(ConeVertex { vertex: v, family, coset: CosetId(l.word.0.clone()) });
            for w in hat.neighbors(v) {
                if hat.is_cone(w) {
                    return Err(Error::InvalidSpec("adjacent cone vertices".into()));
                }
                memberships[w].push(v);
            }
        }
        for m in &mut memberships {
            m.sort_unstable();
        }
        let mut hat = BallGraph::from_graph(hat, base)?;
        hat.spec = spec.clone();
        Ok(Self { spec, hat, base_graph, families, cones, cone_slot, memberships })
    }

    pub fn graph(&self) -> &Graph {
        &self.hat.graph
    }

    pub fn base(&self) -> usize {
        self.hat.base
    }

    pub fn vertex_count(&self) -> usize {
        self.hat.graph.vertex_count()
    }

    pub fn is_cone(&self, v: usize) -> bool {
        self.cone_slot[v].is_some()
    }

    pub fn cones(&self) -> &[ConeVertex] {
        &self.cones
    }

    pub fn cone_info(&self, v: usize) -> Option<&ConeVertex> {
        self.cone_slot[v].map(|i| &self.cones[i])
    }

    /// Cone vertices adjacent to the base vertex `v`, in increasing order.
    pub fn cones_of(&self, v: usize) -> &[usize] {
        &self.memberships[v]
    }

    /// Lowest-index cone vertex adjacent to both base vertices.
    pub fn common_cone(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = (&self.memberships[u], &self.memberships[v]);
        a.iter().copied().find(|c| b.binary_search(c).is_ok())
    }

    /// The cone vertex of `family` over the coset of `g`, if it meets the ball.
    pub fn cone_of(&self, family: usize, coset: &CosetId) -> Option<usize> {
        self.cones.iter().find(|c| c.family == family && &c.coset == coset).map(|c| c.vertex)
    }
}

/// Cones every family over the ball in one pass. Cone vertices are appended
/// after the ball vertices, ordered by family, then by first member.
pub fn cone_off(ball: &BallGraph, families: &[ConeFamily]) -> Result<ConedGraph> {
    let spec = ball
        .spec
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("cone_off needs a Cayley ball".into()))?;
    let mut hat = ball.graph.clone();
    let n = hat.vertex_count();
    for (f, fam) in families.iter().enumerate() {
        let h = spec.canonicalize(&fam.generator)?;
        if h.word.is_empty() {
            return Err(Error::InvalidSpec(alloc::format!("cone {} has trivial generator", fam.tag)));
        }
        let bound = GroupSpec::default_exponent_bound(ball.radius, &h.word);
        let mut by_coset: HashMap<CosetId, usize> = HashMap::new();
        for v in 0..n {
            if hat.is_cone(v) {
                continue;
            }
            let g = Element { spec_id: spec.id(), word: ball.word(v).clone() };
            let id = spec.coset_id(&h, &g, bound)?;
            let c = match by_coset.get(&id) {
                Some(&c) => c,
                None => {
                    let c = hat.add_vertex(VertexLabel::cone(fam.tag.clone(), id.word()));
                    by_coset.insert(id, c);
                    c
                }
            };
            hat.add_edge(c, v, EdgeLabel::Cone(f));
        }
    }
    ConedGraph::from_hat(hat, ball.base, families.to_vec(), Some(spec.clone()))
}
