//! Finite balls of the Bass–Serre tree of `G₀ *_H G₁`.
//!
//! Vertices are the cosets `gG₀` and `gG₁`, edges the cosets `gH`; the edge
//! `gH` joins `gG₀` and `gG₁`. A coset is named by the syllables of a normal
//! form of `g` with the `H`-tail dropped and, for `gG_i`, a trailing
//! `G_i`-syllable dropped as well.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amalgam::{syllables_to_string, Amalgam, AmalgamError, Element, FactorContract, Side, Syllable};
use crate::gamma::{gamma, in_half_tree_kernel};
use crate::portrait::Portrait;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error("radius {radius} exceeds the cap {cap}")]
    RadiusTooLarge { radius: usize, cap: usize },
    #[error("a fixator needs a nonempty prefix")]
    EmptyPrefix,
    #[error("prefix is not an alternating syllable sequence")]
    BadPrefix,
    #[error("the identity has no interior witness")]
    IdentityWitness,
    #[error("unknown export format {0:?}, expected dot or json")]
    UnknownFormat(String),
    #[error("malformed ball: {0}")]
    Malformed(String),
}

/// Largest radius a ball may be built with.
pub const MAX_RADIUS: usize = 12;

/// The vertex `rep · G_side`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeVertex {
    pub side: Side,
    pub rep: Vec<Syllable>,
}

impl TreeVertex {
    pub fn base(side: Side) -> Self {
        TreeVertex { side, rep: Vec::new() }
    }

    /// The canonical name of `x · G_side`.
    pub fn of(side: Side, mut rep: Vec<Syllable>) -> Self {
        if rep.last().is_some_and(|s| s.side == side) {
            rep.pop();
        }
        TreeVertex { side, rep }
    }

    pub fn name(&self) -> String {
        format!("v:{}:{}", self.side.index(), rep_label(&self.rep))
    }
}

/// The edge `rep · H`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeEdge {
    pub rep: Vec<Syllable>,
}

impl TreeEdge {
    pub fn base() -> Self {
        TreeEdge { rep: Vec::new() }
    }

    pub fn endpoint(&self, side: Side) -> TreeVertex {
        TreeVertex::of(side, self.rep.clone())
    }

    pub fn endpoints(&self) -> [TreeVertex; 2] {
        [self.endpoint(Side::Zero), self.endpoint(Side::One)]
    }
}

fn rep_label(rep: &[Syllable]) -> String {
    if rep.is_empty() {
        "e".to_string()
    } else {
        syllables_to_string(rep)
    }
}

/// All vertices within distance `radius` of an endpoint of the base edge,
/// and the edges between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeBall {
    pub radius: usize,
    /// Sorted; `distance[i]` belongs to `vertices[i]`.
    pub vertices: Vec<TreeVertex>,
    pub distance: Vec<usize>,
    /// Sorted by representative.
    pub edges: Vec<TreeEdge>,
}

impl TreeBall {
    pub fn index_of(&self, v: &TreeVertex) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    pub fn contains(&self, v: &TreeVertex) -> bool {
        self.index_of(v).is_some()
    }

    pub fn contains_edge(&self, e: &TreeEdge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// Neighbour lists by vertex index.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            let [a, b] = e.endpoints().map(|v| self.index_of(&v).expect("edge endpoints lie in the ball"));
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degree(&self, v: &TreeVertex) -> usize {
        self.edges
            .iter()
            .filter(|e| e.endpoints().contains(v))
            .count()
    }

    /// Graph distances from `v` to every ball vertex.
    pub fn distances_from(&self, v: &TreeVertex) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut dist = vec![None; self.vertices.len()];
        let Some(start) = self.index_of(v) else { return dist };
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("queued vertices have distances");
            for &y in &adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// `|E| = |V| − 1` and no edge closes a cycle.
    pub fn is_tree(&self) -> bool {
        if self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let [a, b] = e.endpoints().map(|v| self.index_of(&v));
            let (Some(a), Some(b)) = (a, b) else { return false };
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    /// Number of vertices at each distance from `v`.
    pub fn sphere_sizes(&self, v: &TreeVertex) -> Vec<usize> {
        let mut sizes = Vec::new();
        for d in self.distances_from(v).into_iter().flatten() {
            if sizes.len() <= d {
                sizes.resize(d + 1, 0);
            }
            sizes[d] += 1;
        }
        sizes
    }
}

/// The edges at `v`: `v.rep · t · H` for every transversal element `t` of `G_side`.
fn incident_edges<C: FactorContract>(a: &Amalgam<C>, v: &TreeVertex) -> Result<Vec<TreeEdge>, AmalgamError> {
    let n = a.finite_index(v.side)?;
    Ok((0..n)
        .map(|i| {
            let mut rep = v.rep.clone();
            if i > 0 {
                rep.push(Syllable::new(v.side, i));
            }
            TreeEdge { rep }
        })
        .collect())
}

pub fn build_ball<C: FactorContract>(a: &Amalgam<C>, radius: usize) -> Result<TreeBall, TreeError> {
    if radius > MAX_RADIUS {
        return Err(TreeError::RadiusTooLarge { radius, cap: MAX_RADIUS });
    }
    let mut dist: BTreeMap<TreeVertex, usize> = BTreeMap::new();
    let mut edges = BTreeSet::new();
    let mut queue = VecDeque::new();
    for side in Side::BOTH {
        dist.insert(TreeVertex::base(side), 0);
        queue.push_back(TreeVertex::base(side));
    }
    edges.insert(TreeEdge::base());
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == radius {
            continue;
        }
        for e in incident_edges(a, &v)? {
            let w = e.endpoint(v.side.other());
            if !dist.contains_key(&w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
            edges.insert(e);
        }
    }
    let (vertices, distance) = dist.into_iter().unzip();
    Ok(TreeBall {
        radius,
        vertices,
        distance,
        edges: edges.into_iter().collect(),
    })
}

/// Left translation `g · v`.
pub fn act<C: FactorContract>(a: &Amalgam<C>, g: &Element<C>, v: &TreeVertex) -> TreeVertex {
    TreeVertex::of(v.side, a.mul(g, &a.from_syllables(&v.rep)).syllables)
}

pub fn act_edge<C: FactorContract>(a: &Amalgam<C>, g: &Element<C>, e: &TreeEdge) -> TreeEdge {
    TreeEdge {
        rep: a.mul(g, &a.from_syllables(&e.rep)).syllables,
    }
}

/// The ball vertices fixed by `g`.
pub fn fixed_points<C: FactorContract>(a: &Amalgam<C>, g: &Element<C>, ball: &TreeBall) -> Vec<TreeVertex> {
    ball.vertices
        .iter()
        .filter(|v| act(a, g, v) == **v)
        .cloned()
        .collect()
}

/// Ball vertices strictly closer to the `toward` endpoint of `e` than to the other.
pub fn half_tree(e: &TreeEdge, toward: Side, ball: &TreeBall) -> Vec<TreeVertex> {
    let near = ball.distances_from(&e.endpoint(toward));
    let far = ball.distances_from(&e.endpoint(toward.other()));
    ball.vertices
        .iter()
        .zip(near.iter().zip(&far))
        .filter(|(_, (n, f))| matches!((n, f), (Some(n), Some(f)) if n < f))
        .map(|(v, _)| v.clone())
        .collect()
}

fn check_prefix(prefix: &[Syllable]) -> Result<Side, TreeError> {
    let last = prefix.last().ok_or(TreeError::EmptyPrefix)?;
    if prefix.windows(2).any(|p| p[0].side == p[1].side) {
        return Err(TreeError::BadPrefix);
    }
    Ok(last.side)
}

/// `x` fixes the cylinder beyond `prefix`, i.e. `p⁻¹ x p ∈ K_j` where `p` is
/// the prefix element and `j` the factor after its last syllable; `in_k`
/// decides `K_j`-membership of elements of `H`.
pub fn fixator_membership_with<C: FactorContract>(
    a: &Amalgam<C>,
    x: &Element<C>,
    prefix: &[Syllable],
    in_k: impl Fn(Side, &C::H) -> bool,
) -> Result<bool, TreeError> {
    let last = check_prefix(prefix)?;
    let y = a.conjugate(x, &a.from_syllables(prefix));
    Ok(y.is_in_h() && in_k(last.other(), &y.tail))
}

/// Fixator membership in `Γ`, where `K₀ = H(0)` and `K₁ = H(1)`.
pub fn fixator_membership(x: &Element<crate::gamma::GammaFactors>, prefix: &[Syllable]) -> Result<bool, TreeError> {
    fixator_membership_with(&gamma(), x, prefix, |s, h: &Portrait| in_half_tree_kernel(s, h))
}

/// Whether `x` fixes every ball vertex whose representative extends `prefix`.
pub fn cylinder_fix_check<C: FactorContract>(
    a: &Amalgam<C>,
    x: &Element<C>,
    prefix: &[Syllable],
    ball: &TreeBall,
) -> Result<bool, TreeError> {
    check_prefix(prefix)?;
    Ok(ball
        .vertices
        .iter()
        .filter(|v| v.rep.starts_with(prefix))
        .all(|v| act(a, x, v) == *v))
}

/// The first prefix (by length, factor of the first syllable, then
/// lexicographically) whose cylinder `x` fixes, up to `max_len` syllables.
pub fn interior_witness_with<C: FactorContract>(
    a: &Amalgam<C>,
    x: &Element<C>,
    max_len: usize,
    in_k: impl Fn(Side, &C::H) -> bool,
) -> Result<Option<Vec<Syllable>>, TreeError> {
    if a.is_identity(x) {
        return Err(TreeError::IdentityWitness);
    }
    for len in 1..=max_len {
        for j in Side::BOTH {
            for p in a.transversal_words(j, len)? {
                if fixator_membership_with(a, x, &p, &in_k)? {
                    return Ok(Some(p));
                }
            }
        }
    }
    Ok(None)
}

pub fn interior_witness(
    x: &Element<crate::gamma::GammaFactors>,
    max_len: usize,
) -> Result<Option<Vec<Syllable>>, TreeError> {
    interior_witness_with(&gamma(), x, max_len, |s, h: &Portrait| in_half_tree_kernel(s, h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, TreeError> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            _ => Err(TreeError::UnknownFormat(s.to_string())),
        }
    }
}

pub fn export_ball(ball: &TreeBall, format: ExportFormat) -> String {
    match format {
        ExportFormat::Json => serde_json::to_string_pretty(ball).expect("ball serializes"),
        ExportFormat::Dot => {
            let mut lines: Vec<String> = ball
                .vertices
                .iter()
                .map(|v| format!("  \"{}\";", v.name()))
                .collect();
            lines.extend(ball.edges.iter().map(|e| {
                let [a, b] = e.endpoints();
                format!("  \"{}\" -- \"{}\" [label=\"{}\"];", a.name(), b.name(), rep_label(&e.rep))
            }));
            lines.sort();
            format!("graph {{\n{}\n}}\n", lines.join("\n"))
        }
    }
}

pub fn parse_ball_json(s: &str) -> Result<TreeBall, TreeError> {
    serde_json::from_str(s).map_err(|e| TreeError::Malformed(e.to_string()))
}

/// `(nodes, edges)` declared in a DOT export.
pub fn dot_counts(dot: &str) -> (usize, usize) {
    let body = dot.lines().map(str::trim);
    let (edges, nodes): (Vec<&str>, Vec<&str>) = body
        .filter(|l| l.starts_with('"'))
        .partition(|l| l.contains(" -- "));
    (nodes.len(), edges.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{builtin_spec, FiniteAmalgam};
    use crate::gamma::{g_letter, Gamma};

    fn h(s: &str) -> Element<crate::gamma::GammaFactors> {
        gamma().from_h(s.parse().unwrap())
    }

    fn g0(g: &Gamma) -> Element<crate::gamma::GammaFactors> {
        let l = g_letter(Side::Zero);
        g.from_letter(l.side, &l.elem)
    }

    #[test]
    fn small_balls() {
        let g = gamma();
        let b0 = build_ball(&g, 0).unwrap();
        assert_eq!((b0.vertices.len(), b0.edges.len()), (2, 1));
        let b1 = build_ball(&g, 1).unwrap();
        assert_eq!((b1.vertices.len(), b1.edges.len()), (6, 5));
        let b2 = build_ball(&g, 2).unwrap();
        assert!(b2.is_tree());
        for (v, d) in b2.vertices.iter().zip(&b2.distance) {
            if *d < 2 {
                assert_eq!(b2.degree(v), 3);
            }
        }
        assert_eq!(b2.sphere_sizes(&TreeVertex::base(Side::Zero))[..3], [1, 3, 6]);
    }

    #[test]
    fn action_basics() {
        let g = gamma();
        let base1 = TreeVertex::base(Side::One);
        assert_eq!(act(&g, &g.identity(), &base1), base1);
        assert_eq!(act(&g, &g0(&g), &base1).rep, vec![Syllable::new(Side::Zero, 1)]);
        let b = build_ball(&g, 2).unwrap();
        let fixed = fixed_points(&g, &g0(&g), &b);
        assert!(fixed.contains(&TreeVertex::base(Side::Zero)));
        assert!(!fixed.contains(&base1));
        assert_eq!(fixed_points(&g, &g.identity(), &b).len(), b.vertices.len());
        for side in Side::BOTH {
            assert_eq!(act(&g, &h("0"), &TreeVertex::base(side)), TreeVertex::base(side));
        }
    }

    #[test]
    fn half_trees_partition() {
        let g = gamma();
        let b = build_ball(&g, 1).unwrap();
        let z0 = half_tree(&TreeEdge::base(), Side::Zero, &b);
        let z1 = half_tree(&TreeEdge::base(), Side::One, &b);
        assert_eq!((z0.len(), z1.len()), (3, 3));
        assert!(z0.contains(&TreeVertex::base(Side::Zero)));
        let b0 = build_ball(&g, 0).unwrap();
        assert_eq!(half_tree(&TreeEdge::base(), Side::One, &b0), vec![TreeVertex::base(Side::One)]);
    }

    #[test]
    fn fixators() {
        let a = [Syllable::new(Side::Zero, 1)];
        assert!(fixator_membership(&h("01"), &a).unwrap());
        assert!(!fixator_membership(&h("1"), &a).unwrap());
        assert!(fixator_membership(&gamma().identity(), &a).unwrap());
        assert_eq!(fixator_membership(&h("1"), &[]), Err(TreeError::EmptyPrefix));
        assert_eq!(interior_witness(&h("0"), 3).unwrap(), Some(a.to_vec()));
        let w = interior_witness(&h("1"), 3).unwrap().unwrap();
        assert_eq!(w[0].side, Side::One);
        let g = gamma();
        let ball = build_ball(&g, 4).unwrap();
        let a1 = [Syllable::new(Side::One, 1)];
        assert!(!cylinder_fix_check(&g, &h("0"), &a1, &ball).unwrap());
        assert!(cylinder_fix_check(&g, &h("01"), &a, &ball).unwrap());
    }

    #[test]
    fn finite_tree_has_no_interior() {
        let fin = FiniteAmalgam::from_spec(&builtin_spec("s3").unwrap(), 1000).unwrap();
        let a = fin.clone().amalgam();
        let x = a.from_h(1);
        assert_eq!(interior_witness_with(&a, &x, 4, |_, h| *h == 0).unwrap(), None);
    }

    #[test]
    fn export_round_trips() {
        let g = gamma();
        for r in 0..=2 {
            let b = build_ball(&g, r).unwrap();
            let dot = export_ball(&b, ExportFormat::Dot);
            assert_eq!(dot_counts(&dot), (b.vertices.len(), b.edges.len()));
            assert_eq!(parse_ball_json(&export_ball(&b, ExportFormat::Json)).unwrap(), b);
        }
        assert!("svg".parse::<ExportFormat>().is_err());
    }
}
