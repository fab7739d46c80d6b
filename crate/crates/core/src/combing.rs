//! Operators on paths and combings: base change, Farb reduction and
//! extension, and their combing-level versions.

use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::area::Area;
use crate::cone::ConedGraph;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group::{Element, GroupSpec};
use crate::path::{Combing, Lambda, Path};
use crate::word::Word;

/// Moves the base to the neighbour `new_base`: prepend the edge when the
/// path misses `new_base`, otherwise keep the suffix from `new_base`.
pub fn rebase(rho: &Combing, graph: &Graph, new_base: usize) -> Result<Combing> {
    if !graph.has_edge(rho.base, new_base) {
        return Err(Error::NotAdjacent(new_base));
    }
    let paths = rho
        .paths
        .iter()
        .map(|p| match p.suffix_from(new_base) {
            Some(s) => s,
            None => {
                let mut v = Vec::with_capacity(p.0.len() + 1);
                v.push(new_base);
                v.extend_from_slice(&p.0);
                Path(v)
            }
        })
        .collect();
    Ok(Combing { base: new_base, paths })
}

/// Predicted constants after [`rebase`], from the input constants and an
/// isoperimetric function `iso(n)` bounding areas of loops of length ≤ n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RebaseBounds {
    pub lambda: Lambda,
    /// Length fed to the isoperimetric function for thinness.
    pub thin_length: u64,
    pub m_thin: Option<Area>,
    pub prefix_length: u64,
    pub m_prefix: Option<Area>,
}

pub fn rebase_bounds(
    lambda: Lambda,
    m_thin: u32,
    m_prefix: u32,
    iso: impl Fn(u64) -> Option<Area>,
) -> RebaseBounds {
    let m = u64::from(m_thin.max(m_prefix));
    let lift = |a: Area, plus: u64| match a {
        Area::Exact(x) => Area::Exact(x + plus as u32),
        Area::AtLeast(x) => Area::AtLeast(x + plus as u32),
    };
    let thin_length = lambda
        .ratio()
        .map(|l| {
            let v = l * l * (l + num_rational::Ratio::from_integer(m)) + num_rational::Ratio::from_integer(m);
            v.ceil().to_integer()
        })
        .unwrap_or(u64::MAX);
    let prefix_length = 2 * m + 2;
    let m_thin_bound = if thin_length == u64::MAX { None } else { iso(thin_length).map(|a| lift(a, m)) };
    RebaseBounds {
        lambda: lambda.scale(3),
        thin_length,
        m_thin: m_thin_bound.map(|a| a.join(Area::Exact(m as u32))),
        prefix_length,
        m_prefix: iso(prefix_length).map(|a| lift(a, m)),
    }
}

/// Greedy Farb reduction: from `c(t₀)`, jump to the last later vertex
/// `c(t)`, `t ≥ t₀ + 2`, sharing a cone vertex with `c(t₀)` through the
/// lowest-index common cone; otherwise advance one step.
pub fn farb_reduce(path: &Path, coned: &ConedGraph) -> Path {
    let v = path.vertices();
    let last = v.len() - 1;
    let mut out = vec![v[0]];
    let mut t0 = 0;
    while t0 < last {
        let x = v[t0];
        let jump = if coned.is_cone(x) {
            None
        } else {
            (t0 + 2..=last)
                .rev()
                .filter(|&t| !coned.is_cone(v[t]))
                .find_map(|t| coned.common_cone(x, v[t]).map(|c| (t, c)))
        };
        match jump {
            Some((t, c)) => {
                out.push(c);
                out.push(v[t]);
                t0 = t;
            }
            None => {
                out.push(v[t0 + 1]);
                t0 += 1;
            }
        }
    }
    Path(out)
}

/// The subgroup-combing path from `from` to `from · hᵏ`, walking the letters
/// of the freely reduced `hᵏ`.
fn coset_walk(coned: &ConedGraph, spec: &GroupSpec, from: usize, hk: &Word) -> Result<Vec<usize>> {
    let mut cur = coned.hat.word(from).clone();
    let mut out = Vec::with_capacity(hk.len());
    for &l in hk.letters() {
        cur = spec.canonical_word(&cur.concat(&Word(vec![l])));
        let v = coned
            .hat
            .index_of(&cur)
            .ok_or_else(|| Error::OutOfBall(spec.alphabet().render(&cur)))?;
        out.push(v);
    }
    Ok(out)
}

/// Replaces every cone transit `w⁻ → ṽ → w⁺` by the walk from `w⁻` along
/// the geodesic combing of `⟨h⟩` to `w⁺ = w⁻ hᵏ`.
pub fn extend_path(path: &Path, coned: &ConedGraph) -> Result<Path> {
    let v = path.vertices();
    if v.iter().all(|&x| !coned.is_cone(x)) {
        return Ok(path.clone());
    }
    let spec = coned
        .spec
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("extension needs a Cayley ball".into()))?;
    let mut out = vec![v[0]];
    let mut t = 1;
    while t < v.len() {
        let x = v[t];
        let Some(info) = coned.cone_info(x) else {
            out.push(x);
            t += 1;
            continue;
        };
        if t + 1 >= v.len() {
            return Err(Error::TransitUnresolvable(v[t - 1], x));
        }
        let (wm, wp) = (v[t - 1], v[t + 1]);
        let h = &coned.families[info.family].generator;
        let g = spec.canonical_word(&coned.hat.word(wm).inverse().concat(coned.hat.word(wp)));
        let bound = GroupSpec::default_exponent_bound(coned.hat.radius, h);
        let hel = Element { spec_id: spec.id(), word: spec.canonical_word(h) };
        let gel = Element { spec_id: spec.id(), word: g };
        let k = spec
            .cyclic_membership(&hel, &gel, bound)
            .exponent
            .ok_or(Error::TransitUnresolvable(wm, wp))?;
        let walk = coset_walk(coned, spec, wm, &h.pow(k).free_reduce())?;
        if walk.last() != Some(&wp) {
            return Err(Error::TransitUnresolvable(wm, wp));
        }
        out.extend(walk);
        t += 2;
    }
    Ok(Path(out))
}

/// `ρ̂` on `K̂`: Farb reductions on ball vertices; at a cone vertex `ṽ`,
/// `ρ̂(v′)` followed by `(v′, ṽ)` where `v′` precedes `ṽ` on the shortlex
/// first geodesic, or the prefix of `ρ̂(v′)` up to `ṽ` if it passes there.
pub fn reduce_combing(rho: &Combing, coned: &ConedGraph) -> Result<Combing> {
    let n = coned.vertex_count();
    let (_, parent) = coned.graph().bfs(rho.base);
    let mut paths: Vec<Option<Path>> = vec![None; n];
    let reduced = crate::par::map_range(n, |v| {
        if coned.is_cone(v) {
            None
        } else {
            rho.paths.get(v).map(|p| farb_reduce(p, coned))
        }
    });
    for (v, p) in reduced.into_iter().enumerate() {
        if !coned.is_cone(v) {
            paths[v] = Some(p.ok_or(Error::VertexOutOfRange(v))?);
        }
    }
    for c in coned.cones() {
        let vp = parent[c.vertex];
        let base_path = paths[vp].as_ref().ok_or(Error::VertexOutOfRange(vp))?;
        let p = match base_path.prefix_to(c.vertex) {
            Some(pre) => pre,
            None => {
                let mut q = base_path.0.clone();
                q.push(c.vertex);
                Path(q)
            }
        };
        paths[c.vertex] = Some(p);
    }
    Ok(Combing { base: rho.base, paths: paths.into_iter().map(|p| p.expect("all set")).collect() })
}

/// `ρ̌` on `K`: the extension of `ρ̂(v)` for every ball vertex. Ball vertices
/// must precede the cone vertices in the indexing.
pub fn extend_combing(rho_hat: &Combing, coned: &ConedGraph) -> Result<Combing> {
    let n_base = (0..coned.vertex_count()).take_while(|&v| !coned.is_cone(v)).count();
    if (n_base..coned.vertex_count()).any(|v| !coned.is_cone(v)) {
        return Err(Error::InvalidSpec("cone vertices must follow the ball vertices".into()));
    }
    let paths = crate::par::map_range(n_base, |v| extend_path(&rho_hat.paths[v], coned));
    Ok(Combing { base: rho_hat.base, paths: paths.into_iter().collect::<Result<_>>()? })
}

/// Thinness bound for the extended combing: `M·(A(M(1 + r)) + 2·r·M_H)`.
pub fn extension_bound(m: u32, r_bcp: u32, m_h: u32, iso: impl Fn(u64) -> Option<Area>) -> Option<Area> {
    let m64 = u64::from(m);
    let a = iso(m64 * (1 + u64::from(r_bcp)))?;
    let tail = 2 * r_bcp * m_h;
    Some(match a {
        Area::Exact(x) => Area::Exact(m * (x + tail)),
        Area::AtLeast(x) => Area::AtLeast(m * (x + tail)),
    })
}
