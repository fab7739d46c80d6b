//! Trees of spaces over a graph of groups: translated copies of coned
//! vertex-group balls glued at the points fixed by edge groups, following the
//! Bass–Serre tree, and the combing obtained by concatenating piece combings
//! along it.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::combing::{rebase, reduce_combing};
use crate::cone::{cone_off, ConeFamily, ConedGraph};
use crate::error::{Error, Result};
use crate::graph::{build_ball, geodesic_tree_combing, BallGraph, EdgeLabel, Graph, VertexLabel};
use crate::group::{CosetId, EdgeKind, Element, GraphOfGroups, GroupSpec};
use crate::path::{Combing, Path};
use crate::word::Word;

/// One end of an edge of the graph of groups, seen from a vertex group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeSide {
    pub edge: usize,
    /// The vertex is the source of the edge.
    pub source: bool,
    pub kind: EdgeKind,
    /// Generator of the edge group in the local alphabet.
    pub generator: Word,
}

/// Edge sides at vertex `v`, in edge order (source side first for loops).
pub fn edge_sides(gog: &GraphOfGroups, v: usize) -> Vec<EdgeSide> {
    let mut out = Vec::new();
    for (i, e) in gog.edges().iter().enumerate() {
        if e.source == v {
            out.push(EdgeSide { edge: i, source: true, kind: e.kind, generator: e.source_word.clone() });
        }
        if e.target == v {
            out.push(EdgeSide { edge: i, source: false, kind: e.kind, generator: e.target_word.clone() });
        }
    }
    out
}

fn side_tag(gog: &GraphOfGroups, s: &EdgeSide) -> String {
    let e = &gog.edges()[s.edge];
    if e.source == e.target {
        format!("e{}{}", s.edge, if s.source { "s" } else { "t" })
    } else {
        format!("e{}", s.edge)
    }
}

/// Cone families of vertex `v`: one per cyclic edge side, tagged by edge.
pub fn edge_families(gog: &GraphOfGroups, v: usize) -> Vec<ConeFamily> {
    edge_sides(gog, v)
        .iter()
        .filter(|s| s.kind == EdgeKind::Cyclic)
        .map(|s| ConeFamily { tag: side_tag(gog, s), generator: s.generator.clone() })
        .collect()
}

/// The vertex-group balls of radius `radius`, each coned along every cyclic
/// edge group adjacent to it.
pub fn coned_pieces(spec: &GroupSpec, radius: u32, cap: usize) -> Result<Vec<ConedGraph>> {
    let gog = as_gog(spec)?;
    (0..gog.vertices().len())
        .map(|v| {
            let ball = build_ball(&gog.vertices()[v], radius, cap)?;
            cone_off(&ball, &edge_families(gog, v))
        })
        .collect()
}

fn as_gog(spec: &GroupSpec) -> Result<&GraphOfGroups> {
    spec.as_graph_of_groups()
        .ok_or_else(|| Error::InvalidSpec("expected a graph of groups".into()))
}

fn ball_vertex_count(piece: &ConedGraph) -> usize {
    (0..piece.vertex_count()).take_while(|&v| !piece.is_cone(v)).count()
}

/// Local index of the point of `piece` fixed by the edge group of `side`: the
/// cone of its identity coset, or the base vertex for a trivial edge group.
fn entry_point(gog: &GraphOfGroups, piece: &ConedGraph, side: &EdgeSide) -> Result<usize> {
    if side.kind == EdgeKind::Trivial {
        return Ok(piece.base());
    }
    let tag = side_tag(gog, side);
    let f = piece
        .families
        .iter()
        .position(|f| f.tag == tag)
        .ok_or(Error::FixedPointNotUnique { edge: side.edge, piece: usize::MAX, count: 0 })?;
    piece
        .cone_of(f, &CosetId(Vec::new()))
        .ok_or(Error::FixedPointNotUnique { edge: side.edge, piece: usize::MAX, count: 0 })
}

/// Checks that each cyclic edge group fixes exactly one cone vertex of each
/// adjacent piece (within the ball).
pub fn check_fixed_points(spec: &GroupSpec, pieces: &[ConedGraph]) -> Result<()> {
    let gog = as_gog(spec)?;
    for (v, piece) in pieces.iter().enumerate() {
        let group = &gog.vertices()[v];
        for side in edge_sides(gog, v) {
            if side.kind == EdgeKind::Trivial {
                continue;
            }
            let z = group.canonicalize(&side.generator)?;
            let mut count = 0;
            for c in piece.cones() {
                let h = group.canonicalize(&piece.families[c.family].generator)?;
                let g = c.coset.word();
                let zg = group.canonicalize(&z.word.concat(&g))?;
                let bound = GroupSpec::default_exponent_bound(piece.hat.radius, &h.word);
                if group.coset_id(&h, &zg, bound)? == c.coset {
                    count += 1;
                }
            }
            if count != 1 {
                return Err(Error::FixedPointNotUnique { edge: side.edge, piece: v, count });
            }
        }
    }
    Ok(())
}

/// Piece combings keyed by (vertex group, local base point).
#[derive(Debug, Clone, Default)]
pub struct PieceCombings(pub BTreeMap<(usize, usize), Combing>);

impl PieceCombings {
    pub fn get(&self, vertex: usize, base: usize) -> Option<&Combing> {
        self.0.get(&(vertex, base))
    }
}

/// For every piece and every possible entry point: the geodesic tree combing
/// of the vertex-group ball, Farb-reduced on the coned piece, then rebased to
/// the entry point.
pub fn reduced_piece_combings(spec: &GroupSpec, pieces: &[ConedGraph]) -> Result<PieceCombings> {
    let gog = as_gog(spec)?;
    let mut out = BTreeMap::new();
    for (v, piece) in pieces.iter().enumerate() {
        let n = ball_vertex_count(piece);
        let mut ball = Graph::new();
        for l in &piece.base_graph.labels()[..n] {
            ball.add_vertex(l.clone());
        }
        for (a, b) in piece.base_graph.edges() {
            ball.add_edge(a, b, piece.base_graph.edge_label(a, b).expect("edge exists"));
        }
        let rho = geodesic_tree_combing(&ball, piece.base());
        let hat = reduce_combing(&rho, piece)?;
        let mut entries = vec![piece.base()];
        for side in edge_sides(gog, v) {
            entries.push(entry_point(gog, piece, &side)?);
        }
        for entry in entries {
            if out.contains_key(&(v, entry)) {
                continue;
            }
            let c = if entry == hat.base { hat.clone() } else { rebase(&hat, piece.graph(), entry)? };
            out.insert((v, entry), c);
        }
    }
    Ok(PieceCombings(out))
}

/// A translated copy `γ·K̂_v` in the tree of spaces.
#[derive(Debug, Clone, Serialize)]
pub struct Piece {
    /// Vertex of the graph of groups.
    pub vertex: usize,
    /// `γ`, in canonical form.
    pub translate: Word,
    pub depth: u32,
    pub parent: Option<usize>,
    /// Edge of the graph of groups crossed from the parent.
    pub edge: Option<usize>,
    /// Side of that edge at which this piece is entered.
    pub entry_side: Option<(usize, bool)>,
    /// Local index of the entry point (the base vertex for the root).
    pub entry: usize,
    /// Glued index of the entry point.
    pub attachment: usize,
    /// Local index of the attachment point inside the parent.
    pub parent_local: Option<usize>,
    pub local_to_glued: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeOptions {
    pub depth: u32,
    /// Children hang off attachment points within this local distance of the
    /// piece's identity vertex.
    pub branch_radius: u32,
    pub vertex_cap: usize,
}

impl Default for TreeOptions {
    fn default() -> Self {
        Self { depth: 2, branch_radius: 2, vertex_cap: 4000 }
    }
}

#[derive(Debug, Clone)]
pub struct TreeOfSpaces {
    pub spec: GroupSpec,
    pub depth: u32,
    pub pieces: Vec<Piece>,
    pub glued: BallGraph,
    /// Group element of each glued element vertex (`None` on cones).
    pub image: Vec<Option<Word>>,
    /// Piece owning each glued vertex; attachment points belong to the parent.
    owner: Vec<(usize, usize)>,
}

impl TreeOfSpaces {
    /// (piece, local index) owning the glued vertex.
    pub fn owner(&self, v: usize) -> (usize, usize) {
        self.owner[v]
    }

    /// Pieces from the root down to `piece`.
    pub fn piece_chain(&self, piece: usize) -> Vec<usize> {
        let mut chain = vec![piece];
        let mut at = piece;
        while let Some(p) = self.pieces[at].parent {
            chain.push(p);
            at = p;
        }
        chain.reverse();
        chain
    }

    pub fn attachments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pieces.iter().enumerate().skip(1).map(|(i, p)| (i, p.attachment))
    }
}

/// Restricts a piece to a vertex subset: `keep` on group elements, closed so
/// that every kept vertex's combing path stays kept.
struct Filter<'a> {
    keep: &'a dyn Fn(&Word) -> bool,
    combings: &'a PieceCombings,
}

struct Builder<'a> {
    gog: &'a GraphOfGroups,
    spec: &'a GroupSpec,
    pieces: &'a [ConedGraph],
    opts: TreeOptions,
    filter: Option<Filter<'a>>,
    graph: Graph,
    image: Vec<Option<Word>>,
    owner: Vec<(usize, usize)>,
    out: Vec<Piece>,
}

impl Builder<'_> {
    fn global(&self, v: usize, translate: &Word, local: &Word) -> Result<Word> {
        let w = translate.concat(&self.gog.globalize(v, local));
        Ok(self.spec.canonicalize(&w)?.word)
    }

    fn kept(&self, v: usize, entry: usize, translate: &Word) -> Result<Vec<bool>> {
        let piece = &self.pieces[v];
        let n = piece.vertex_count();
        let Some(f) = &self.filter else { return Ok(vec![true; n]) };
        let rho = f.combings.get(v, entry).ok_or(Error::AttachmentMissing(entry))?;
        let mut ok = vec![true; n];
        for (x, slot) in ok.iter_mut().enumerate() {
            if !piece.is_cone(x) {
                *slot = (f.keep)(&self.global(v, translate, &piece.hat.word(x).clone())?);
            }
        }
        let mut kept: Vec<bool> = (0..n).map(|x| rho.paths[x].vertices().iter().all(|&y| ok[y])).collect();
        loop {
            let next: Vec<bool> =
                (0..n).map(|x| kept[x] && rho.paths[x].vertices().iter().all(|&y| kept[y])).collect();
            if next == kept {
                return Ok(kept);
            }
            kept = next;
        }
    }

    fn add_piece(
        &mut self,
        v: usize,
        translate: Word,
        parent: Option<(usize, usize, usize, bool)>,
        entry: usize,
        attachment: Option<usize>,
    ) -> Result<Option<usize>> {
        let piece = &self.pieces[v];
        let kept = self.kept(v, entry, &translate)?;
        if attachment.is_some() && kept.iter().filter(|&&k| k).count() <= 1 {
            return Ok(None);
        }
        let id = self.out.len();
        let mut map = vec![None; piece.vertex_count()];
        for x in 0..piece.vertex_count() {
            if !kept[x] {
                continue;
            }
            if x == entry {
                if let Some(a) = attachment {
                    map[x] = Some(a);
                    continue;
                }
            }
            let label = piece.graph().label(x);
            let mut l = if label.is_cone() {
                let tag = label.tag.clone().unwrap_or_default();
                VertexLabel::cone(tag, self.global(v, &translate, &label.word)?)
            } else {
                VertexLabel::element(self.global(v, &translate, &label.word)?)
            };
            l.piece = Some(id);
            let img = (!label.is_cone()).then(|| l.word.clone());
            let g = self.graph.add_vertex(l);
            self.image.push(img);
            self.owner.push((id, x));
            map[x] = Some(g);
            if self.graph.vertex_count() > self.opts.vertex_cap {
                return Err(Error::SizeLimitExceeded { cap: self.opts.vertex_cap });
            }
        }
        for (a, b) in piece.graph().edges() {
            if let (Some(ga), Some(gb)) = (map[a], map[b]) {
                let label = match piece.graph().edge_label(a, b).expect("edge exists") {
                    EdgeLabel::Gen(l) => EdgeLabel::Gen(self.gog.globalize_letter(v, l)),
                    EdgeLabel::Cone(f) => {
                        let tag = &piece.families[f].tag;
                        let e = self.gog_edge_of_tag(v, tag);
                        EdgeLabel::Cone(e)
                    }
                    EdgeLabel::Rips => EdgeLabel::Rips,
                };
                self.graph.add_edge(ga, gb, label);
            }
        }
        let (depth, parent_id, edge, parent_local) = match parent {
            Some((p, e, local, _)) => (self.out[p].depth + 1, Some(p), Some(e), Some(local)),
            None => (0, None, None, None),
        };
        let entry_side = parent.map(|(_, e, _, source)| (e, source));
        self.out.push(Piece {
            vertex: v,
            attachment: map[entry].expect("entry kept"),
            translate,
            depth,
            parent: parent_id,
            edge,
            entry_side,
            entry,
            parent_local,
            local_to_glued: map,
        });
        Ok(Some(id))
    }

    fn gog_edge_of_tag(&self, v: usize, tag: &str) -> usize {
        edge_sides(self.gog, v)
            .iter()
            .find(|s| side_tag(self.gog, s) == tag)
            .map_or(usize::MAX, |s| s.edge)
    }

    /// Children of piece `id`: one per attachment point other than the entry,
    /// within the branch radius.
    fn expand(&mut self, id: usize, queue: &mut VecDeque<usize>) -> Result<()> {
        let p = self.out[id].clone();
        if p.depth >= self.opts.depth {
            return Ok(());
        }
        let piece = &self.pieces[p.vertex];
        let (dist, _) = piece.graph().bfs(piece.base());
        for side in edge_sides(self.gog, p.vertex) {
            let candidates: Vec<(usize, Word)> = match side.kind {
                EdgeKind::Trivial => (0..piece.vertex_count())
                    .filter(|&x| !piece.is_cone(x))
                    .map(|x| (x, piece.hat.word(x).clone()))
                    .collect(),
                EdgeKind::Cyclic => {
                    let tag = side_tag(self.gog, &side);
                    piece
                        .cones()
                        .iter()
                        .filter(|c| piece.families[c.family].tag == tag)
                        .map(|c| (c.vertex, c.coset.word()))
                        .collect()
                }
            };
            let e = &self.gog.edges()[side.edge];
            let child_vertex = if side.source { e.target } else { e.source };
            let child_side = edge_sides(self.gog, child_vertex)
                .into_iter()
                .find(|s| s.edge == side.edge && (e.source != e.target || s.source != side.source))
                .expect("edge has two sides");
            let child_entry = entry_point(self.gog, &self.pieces[child_vertex], &child_side)?;
            for (x, coset) in candidates {
                if dist[x] > self.opts.branch_radius {
                    continue;
                }
                if Some((side.edge, side.source)) == p.entry_side && x == p.entry {
                    continue;
                }
                let Some(gx) = p.local_to_glued[x] else { continue };
                let mut t = p.translate.concat(&self.gog.globalize(p.vertex, &coset));
                if let Some(s) = self.gog.stable_letter(side.edge) {
                    t.0.push(if side.source { s } else { -s });
                }
                let t = self.spec.canonicalize(&t)?.word;
                if let Some(c) =
                    self.add_piece(child_vertex, t, Some((id, side.edge, x, child_side.source)), child_entry, Some(gx))?
                {
                    queue.push_back(c);
                }
            }
        }
        Ok(())
    }
}

fn build(
    spec: &GroupSpec,
    pieces: &[ConedGraph],
    opts: TreeOptions,
    filter: Option<Filter<'_>>,
) -> Result<TreeOfSpaces> {
    let gog = as_gog(spec)?;
    if pieces.len() != gog.vertices().len() {
        return Err(Error::InvalidSpec("one coned piece per vertex group is required".into()));
    }
    check_fixed_points(spec, pieces)?;
    let mut b = Builder {
        gog,
        spec,
        pieces,
        opts,
        filter,
        graph: Graph::new(),
        image: Vec::new(),
        owner: Vec::new(),
        out: Vec::new(),
    };
    b.add_piece(0, Word::identity(), None, pieces[0].base(), None)?;
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        b.expand(id, &mut queue)?;
    }
    let base = b.out[0].attachment;
    let mut glued = BallGraph::from_graph(b.graph, base)?;
    glued.spec = Some(spec.clone());
    Ok(TreeOfSpaces { spec: spec.clone(), depth: opts.depth, pieces: b.out, glued, image: b.image, owner: b.owner })
}

/// Glues translates of the coned pieces along the Bass–Serre tree, breadth
/// first from the base piece, down to `opts.depth`.
pub fn tree_of_spaces(spec: &GroupSpec, pieces: &[ConedGraph], opts: TreeOptions) -> Result<TreeOfSpaces> {
    build(spec, pieces, opts, None)
}

/// As [`tree_of_spaces`], keeping only piece vertices whose combing path
/// from the entry point stays among elements accepted by `keep`.
pub fn tree_of_spaces_within(
    spec: &GroupSpec,
    pieces: &[ConedGraph],
    opts: TreeOptions,
    combings: &PieceCombings,
    keep: &dyn Fn(&Word) -> bool,
) -> Result<TreeOfSpaces> {
    build(spec, pieces, opts, Some(Filter { keep, combings }))
}

/// `ρ(p) = ρ₀(p₁) · γ₁ρ₁(p₂) ⋯ γ_rρ_r(p)`: concatenation of piece combings
/// along the chain of pieces from the root to the piece of `p`, each based at
/// the point where the chain enters that piece.
pub fn free_construction_combing(tos: &TreeOfSpaces, combings: &PieceCombings) -> Result<Combing> {
    let n = tos.glued.vertex_count();
    let mut paths = Vec::with_capacity(n);
    for p in 0..n {
        let (piece, local) = tos.owner(p);
        let chain = tos.piece_chain(piece);
        let mut out: Vec<usize> = Vec::new();
        for (k, &pc) in chain.iter().enumerate() {
            let pi = &tos.pieces[pc];
            let target = match chain.get(k + 1) {
                Some(&next) => tos.pieces[next].parent_local.ok_or(Error::AttachmentMissing(p))?,
                None => local,
            };
            let rho = combings.get(pi.vertex, pi.entry).ok_or(Error::AttachmentMissing(p))?;
            let seg = rho.paths.get(target).ok_or(Error::AttachmentMissing(p))?;
            for (i, &x) in seg.vertices().iter().enumerate() {
                let g = pi.local_to_glued[x].ok_or(Error::AttachmentMissing(p))?;
                if i == 0 && !out.is_empty() {
                    continue;
                }
                out.push(g);
            }
        }
        paths.push(Path(out));
    }
    Ok(Combing { base: tos.glued.base, paths })
}

/// For each non-root piece: removing its attachment point disconnects the
/// rest of the piece from the base.
pub fn attachment_separates(tos: &TreeOfSpaces) -> Vec<(usize, bool)> {
    let g = &tos.glued.graph;
    tos.attachments()
        .map(|(id, a)| {
            let mut seen = vec![false; g.vertex_count()];
            seen[a] = true;
            seen[tos.glued.base] = true;
            let mut queue = VecDeque::from([tos.glued.base]);
            while let Some(u) = queue.pop_front() {
                for w in g.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            let own = &tos.pieces[id].local_to_glued;
            let separated = own.iter().flatten().all(|&x| x == a || !seen[x]);
            (id, separated)
        })
        .collect()
}

/// Element of the group of the glued vertex, if it is not a cone.
pub fn glued_element(tos: &TreeOfSpaces, v: usize) -> Option<Element> {
    tos.image[v].clone().map(|word| Element { spec_id: tos.spec.id(), word })
}
