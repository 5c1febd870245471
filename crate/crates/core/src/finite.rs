//! Finite permutation groups as factor backends: closure enumeration,
//! subgroups, transversals, cores, and amalgam specifications.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amalgam::{tokens, Amalgam, Element, FactorContract, Letter, Side, WordParseError};

/// Default cap on enumerated group orders.
pub const DEFAULT_MAX_CLOSURE: usize = 10_000;

/// Environment variable overriding [`DEFAULT_MAX_CLOSURE`].
pub const MAX_CLOSURE_VAR: &str = "AMALGAM_MAX_CLOSURE";

/// The closure cap in effect: `AMALGAM_MAX_CLOSURE` if set and valid, else the default.
pub fn closure_cap() -> usize {
    std::env::var(MAX_CLOSURE_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_CLOSURE)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteError {
    #[error("{context}: {images:?} is not a permutation of 0..{}", images.len())]
    NotAPermutation { context: String, images: Vec<u32> },
    #[error("{context}: degree {found}, expected {expected}")]
    DegreeMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("group closure exceeds the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("h_gens_in_g0 has {in_g0} generators but h_gens_in_g1 has {in_g1}")]
    GeneratorCountMismatch { in_g0: usize, in_g1: usize },
    #[error("H generator {generator} does not lie in G{side}")]
    GeneratorOutsideFactor { side: Side, generator: usize },
    #[error(
        "generator pair {generator} does not extend to a homomorphism H -> G1: \
         {in_g0} in G0 would map to both {first} and {second}"
    )]
    NotHomomorphism {
        generator: usize,
        in_g0: String,
        first: String,
        second: String,
    },
    #[error(
        "generator pair {generator} does not give an injective map: \
         {in_g1} in G1 is the image of both {first} and {second}"
    )]
    NotInjective {
        generator: usize,
        in_g1: String,
        first: String,
        second: String,
    },
    #[error("subgroups belong to different groups")]
    MismatchedParents,
    #[error("N is not normal in G{0}")]
    NotNormal(Side),
    #[error("invalid amalgam spec: {0}")]
    Json(String),
}

/// A permutation of `0..n`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Option<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `(self · other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize] = i as u32;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }
}

/// Cycle notation, `()` for the identity.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut any = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            any = true;
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x.to_string());
                x = self.0[x] as usize;
            }
            write!(f, "({})", cycle.join(" "))?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

static NEXT_GROUP_ID: AtomicU64 = AtomicU64::new(0);

/// A permutation group enumerated by breadth-first closure; element `0` is the identity.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    id: u64,
    degree: usize,
    gens: Vec<usize>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    inverses: Vec<usize>,
    table: Option<Vec<u32>>,
}

const TABLE_LIMIT: usize = 1 << 20;

impl FiniteGroup {
    /// The group generated by `gens`, all of degree `degree`. Elements are
    /// numbered in discovery order of a breadth-first search that multiplies
    /// by the generators on the right.
    pub fn closure(degree: usize, gens: &[Perm], cap: usize) -> Result<FiniteGroup, FiniteError> {
        for (i, g) in gens.iter().enumerate() {
            if g.degree() != degree {
                return Err(FiniteError::DegreeMismatch {
                    context: format!("generator {i}"),
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p = elements[i].compose(g);
                if !index.contains_key(&p) {
                    if elements.len() >= cap {
                        return Err(FiniteError::CapExceeded { cap });
                    }
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        let inverses = elements.iter().map(|p| index[&p.inverse()]).collect();
        let gens = gens.iter().map(|g| index[g]).collect();
        let mut group = FiniteGroup {
            id: NEXT_GROUP_ID.fetch_add(1, Ordering::Relaxed),
            degree,
            gens,
            elements,
            index,
            inverses,
            table: None,
        };
        let n = group.order();
        if n * n <= TABLE_LIMIT {
            let mut table = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    table.push(group.mul_slow(a, b) as u32);
                }
            }
            group.table = Some(table);
        }
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Element indices of the generators.
    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn label(&self, i: usize) -> String {
        self.elements[i].to_string()
    }

    fn mul_slow(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].compose(&self.elements[b])]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.mul_slow(a, b),
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// `g · x · g⁻¹`.
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            parent: self.id,
            members: (0..self.order()).collect(),
            gens: self.gens.clone(),
        }
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup {
            parent: self.id,
            members: BTreeSet::from([0]),
            gens: Vec::new(),
        }
    }

    /// The subgroup generated by the given element indices.
    pub fn subgroup(&self, gens: &[usize]) -> Subgroup {
        let mut members = BTreeSet::from([0]);
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if members.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Subgroup {
            parent: self.id,
            members,
            gens: gens.to_vec(),
        }
    }

    /// A set of element indices that is already known to be a subgroup.
    fn subgroup_from_members(&self, members: BTreeSet<usize>) -> Subgroup {
        Subgroup {
            parent: self.id,
            gens: members.iter().copied().filter(|&x| x != 0).collect(),
            members,
        }
    }

    fn check_parent(&self, s: &Subgroup) -> Result<(), FiniteError> {
        if s.parent == self.id {
            Ok(())
        } else {
            Err(FiniteError::MismatchedParents)
        }
    }

    /// Whether `s` contains the identity and is closed under products and inverses.
    pub fn is_closed(&self, s: &Subgroup) -> bool {
        s.members.contains(&0)
            && s.members.iter().all(|&a| {
                s.members.contains(&self.inv(a))
                    && s.members.iter().all(|&b| s.members.contains(&self.mul(a, b)))
            })
    }
}

/// A subgroup, as a set of element indices of its parent group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    parent: u64,
    members: BTreeSet<usize>,
    gens: Vec<usize>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(&x)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }
}

/// Left transversal of a subgroup: the least element index of every coset `gH`.
#[derive(Debug, Clone)]
pub struct Transversal {
    reps: Vec<usize>,
    coset_of: Vec<usize>,
}

impl Transversal {
    /// Coset representatives, the identity first.
    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn coset_of(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    /// `(i, h)` with `reps[i] · h = g`.
    pub fn decompose(&self, group: &FiniteGroup, g: usize) -> (usize, usize) {
        let i = self.coset_of[g];
        (i, group.mul(group.inv(self.reps[i]), g))
    }
}

pub fn coset_transversal(g: &FiniteGroup, h: &Subgroup) -> Result<Transversal, FiniteError> {
    g.check_parent(h)?;
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in 0..g.order() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        for y in h.members() {
            coset_of[g.mul(x, y)] = reps.len();
        }
        reps.push(x);
    }
    Ok(Transversal { reps, coset_of })
}

/// `g S g⁻¹`.
pub fn conjugate_subgroup(group: &FiniteGroup, g: usize, s: &Subgroup) -> Result<Subgroup, FiniteError> {
    group.check_parent(s)?;
    Ok(Subgroup {
        parent: s.parent,
        members: s.members().map(|x| group.conj(g, x)).collect(),
        gens: s.gens.iter().map(|&x| group.conj(g, x)).collect(),
    })
}

pub fn subgroup_intersection(a: &Subgroup, b: &Subgroup) -> Result<Subgroup, FiniteError> {
    if a.parent != b.parent {
        return Err(FiniteError::MismatchedParents);
    }
    let members: BTreeSet<usize> = a.members.intersection(&b.members).copied().collect();
    Ok(Subgroup {
        parent: a.parent,
        gens: members.iter().copied().filter(|&x| x != 0).collect(),
        members,
    })
}

pub fn is_normal(group: &FiniteGroup, s: &Subgroup) -> Result<bool, FiniteError> {
    group.check_parent(s)?;
    Ok(group
        .generators()
        .iter()
        .all(|&g| s.members().all(|x| s.contains(group.conj(g, x)))))
}

/// `⋂_{g∈G} g H g⁻¹`, the largest normal subgroup of `G` inside `H`.
pub fn normal_core(group: &FiniteGroup, h: &Subgroup) -> Result<Subgroup, FiniteError> {
    group.check_parent(h)?;
    let members = h
        .members()
        .filter(|&x| (0..group.order()).all(|g| h.contains(group.conj(g, x))))
        .collect();
    Ok(group.subgroup_from_members(members))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    /// Generators as image lists of permutations of `0..n`.
    pub perms: Vec<Vec<u32>>,
}

/// JSON description of a finite amalgam. `H` is the abstract group generated
/// by the pairs `(h_gens_in_g0[i], h_gens_in_g1[i])`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub g0: GroupSpec,
    pub g1: GroupSpec,
    pub h_gens_in_g0: Vec<Vec<u32>>,
    pub h_gens_in_g1: Vec<Vec<u32>>,
}

impl AmalgamSpec {
    pub fn from_json(s: &str) -> Result<AmalgamSpec, FiniteError> {
        serde_json::from_str(s).map_err(|e| FiniteError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| "spec".to_string())
    }
}

fn to_perms(context: &str, raw: &[Vec<u32>]) -> Result<Vec<Perm>, FiniteError> {
    raw.iter()
        .enumerate()
        .map(|(i, v)| {
            Perm::from_images(v.clone()).ok_or_else(|| FiniteError::NotAPermutation {
                context: format!("{context}[{i}]"),
                images: v.clone(),
            })
        })
        .collect()
}

fn common_degree(context: &str, perms: &[&Perm]) -> Result<usize, FiniteError> {
    let degree = perms.first().map_or(0, |p| p.degree());
    for p in perms {
        if p.degree() != degree {
            return Err(FiniteError::DegreeMismatch {
                context: context.to_string(),
                expected: degree,
                found: p.degree(),
            });
        }
    }
    Ok(degree)
}

/// A finite amalgam `G₀ *_H G₁` ready for normal-form arithmetic.
///
/// Factor elements are element indices of `G₀` or `G₁`; elements of `H` are
/// indices into the enumeration of `H` (discovery order of the generator pairs).
#[derive(Debug, Clone)]
pub struct FiniteAmalgam {
    name: String,
    groups: [FiniteGroup; 2],
    /// `h_in[side][k]`: the element of `G_side` that is `H`-element `k`.
    h_in: [Vec<usize>; 2],
    h_of: [HashMap<usize, usize>; 2],
    h_sub: [Subgroup; 2],
    transversals: [Transversal; 2],
}

impl FiniteAmalgam {
    pub fn from_spec(spec: &AmalgamSpec, cap: usize) -> Result<FiniteAmalgam, FiniteError> {
        let gens0 = to_perms("g0.perms", &spec.g0.perms)?;
        let gens1 = to_perms("g1.perms", &spec.g1.perms)?;
        let hg0 = to_perms("h_gens_in_g0", &spec.h_gens_in_g0)?;
        let hg1 = to_perms("h_gens_in_g1", &spec.h_gens_in_g1)?;
        if hg0.len() != hg1.len() {
            return Err(FiniteError::GeneratorCountMismatch {
                in_g0: hg0.len(),
                in_g1: hg1.len(),
            });
        }
        let d0 = common_degree("G0", &gens0.iter().chain(&hg0).collect::<Vec<_>>())?;
        let d1 = common_degree("G1", &gens1.iter().chain(&hg1).collect::<Vec<_>>())?;
        let g0 = FiniteGroup::closure(d0, &gens0, cap)?;
        let g1 = FiniteGroup::closure(d1, &gens1, cap)?;
        let mut pair_gens = Vec::with_capacity(hg0.len());
        for (i, (a, b)) in hg0.iter().zip(&hg1).enumerate() {
            let a = g0.index_of(a).ok_or(FiniteError::GeneratorOutsideFactor {
                side: Side::Zero,
                generator: i,
            })?;
            let b = g1.index_of(b).ok_or(FiniteError::GeneratorOutsideFactor {
                side: Side::One,
                generator: i,
            })?;
            pair_gens.push((a, b));
        }
        // Close the graph of the generator map; it is the graph of an
        // isomorphism between the two images exactly when neither
        // projection ever sees two partners.
        let mut h_in: [Vec<usize>; 2] = [vec![0], vec![0]];
        let mut h_of: [HashMap<usize, usize>; 2] = [HashMap::from([(0, 0)]), HashMap::from([(0, 0)])];
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for (i, &(a, b)) in pair_gens.iter().enumerate() {
                let x = g0.mul(h_in[0][k], a);
                let y = g1.mul(h_in[1][k], b);
                match (h_of[0].get(&x), h_of[1].get(&y)) {
                    (Some(&p), Some(&q)) if p == q => continue,
                    (None, None) => {}
                    (Some(&p), _) => {
                        return Err(FiniteError::NotHomomorphism {
                            generator: i,
                            in_g0: g0.label(x),
                            first: g1.label(h_in[1][p]),
                            second: g1.label(y),
                        })
                    }
                    (None, Some(&q)) => {
                        return Err(FiniteError::NotInjective {
                            generator: i,
                            in_g1: g1.label(y),
                            first: g0.label(h_in[0][q]),
                            second: g0.label(x),
                        })
                    }
                }
                if h_in[0].len() >= cap {
                    return Err(FiniteError::CapExceeded { cap });
                }
                let n = h_in[0].len();
                h_in[0].push(x);
                h_in[1].push(y);
                h_of[0].insert(x, n);
                h_of[1].insert(y, n);
                queue.push_back(n);
            }
        }
        let h_sub = [
            g0.subgroup(&pair_gens.iter().map(|p| p.0).collect::<Vec<_>>()),
            g1.subgroup(&pair_gens.iter().map(|p| p.1).collect::<Vec<_>>()),
        ];
        let transversals = [coset_transversal(&g0, &h_sub[0])?, coset_transversal(&g1, &h_sub[1])?];
        Ok(FiniteAmalgam {
            name: spec.label(),
            groups: [g0, g1],
            h_in,
            h_of,
            h_sub,
            transversals,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self, side: Side) -> &FiniteGroup {
        &self.groups[side.index()]
    }

    /// `H` as a subgroup of `G_side`.
    pub fn h_subgroup(&self, side: Side) -> &Subgroup {
        &self.h_sub[side.index()]
    }

    pub fn transversal_of(&self, side: Side) -> &Transversal {
        &self.transversals[side.index()]
    }

    pub fn h_order(&self) -> usize {
        self.h_in[0].len()
    }

    /// All elements of `H`, identity first.
    pub fn h_elements(&self) -> std::ops::Range<usize> {
        0..self.h_order()
    }

    /// The element of `G_side` representing `H`-element `k`.
    pub fn h_in(&self, side: Side, k: usize) -> usize {
        self.h_in[side.index()][k]
    }

    /// The `H`-element represented by `g ∈ G_side`, if any.
    pub fn h_of(&self, side: Side, g: usize) -> Option<usize> {
        self.h_of[side.index()].get(&g).copied()
    }

    pub fn h_label(&self, k: usize) -> String {
        self.groups[0].label(self.h_in[0][k])
    }

    /// A subset of `H` as a subgroup of `G_side`.
    pub fn h_set_in(&self, side: Side, set: &BTreeSet<usize>) -> Subgroup {
        self.group(side)
            .subgroup_from_members(set.iter().map(|&k| self.h_in(side, k)).collect())
    }

    /// Parses a word: tokens `0:<i>` and `1:<i>` name element `i` of `G₀`
    /// or `G₁` in enumeration order, `h:<k>` names element `k` of `H`, and
    /// `e` is the empty word.
    pub fn parse_word(&self, s: &str) -> Result<Vec<Letter<usize>>, WordParseError> {
        let mut out = Vec::new();
        for t in tokens(s) {
            if t.text == "e" {
                continue;
            }
            let (kind, num) = t
                .text
                .split_once(':')
                .ok_or_else(|| t.error("expected 0:<i>, 1:<i>, h:<k> or e"))?;
            let n: usize = num.parse().map_err(|_| t.error("expected a decimal index"))?;
            let letter = match kind {
                "0" | "1" => {
                    let side = Side::from_index(kind.parse().expect("digit")).expect("0 or 1");
                    if n >= self.group(side).order() {
                        return Err(t.error("element index out of range"));
                    }
                    Letter::new(side, n)
                }
                "h" => {
                    if n >= self.h_order() {
                        return Err(t.error("H index out of range"));
                    }
                    Letter::new(Side::Zero, self.h_in(Side::Zero, n))
                }
                _ => return Err(t.error("expected 0:<i>, 1:<i>, h:<k> or e")),
            };
            out.push(letter);
        }
        Ok(out)
    }

    /// Renders a normal form in the word grammar of [`FiniteAmalgam::parse_word`].
    pub fn format_nf(&self, x: &Element<FiniteAmalgam>) -> String {
        let mut parts: Vec<String> = x
            .syllables
            .iter()
            .map(|s| format!("{}:{}", s.side.index(), self.transversal(s.side, s.index)))
            .collect();
        if x.tail != 0 || parts.is_empty() {
            parts.push(if x.tail == 0 { "e".to_string() } else { format!("h:{}", x.tail) });
        }
        parts.join(" ")
    }

    pub fn amalgam(self) -> Amalgam<FiniteAmalgam> {
        Amalgam::new(self)
    }
}

impl FactorContract for FiniteAmalgam {
    type Elem = usize;
    type H = usize;

    fn mul(&self, side: Side, a: &usize, b: &usize) -> usize {
        self.group(side).mul(*a, *b)
    }

    fn inv(&self, side: Side, a: &usize) -> usize {
        self.group(side).inv(*a)
    }

    fn embed_h(&self, side: Side, h: &usize) -> usize {
        self.h_in(side, *h)
    }

    fn decompose(&self, side: Side, g: &usize) -> (usize, usize) {
        let (i, h) = self.transversal_of(side).decompose(self.group(side), *g);
        (i, self.h_of(side, h).expect("coset decomposition lands in H"))
    }

    fn transversal(&self, side: Side, index: usize) -> usize {
        self.transversal_of(side).reps()[index]
    }

    fn index_of_h(&self, side: Side) -> Option<usize> {
        Some(self.transversal_of(side).index())
    }

    fn h_identity(&self) -> usize {
        0
    }
}

/// The amalgam `(G₀/N) *_{H/N} (G₁/N)` for `N ≤ H` (given as `H`-indices)
/// normal in both factors. Each quotient is realised by the action of `G_i`
/// on the left cosets of `N`.
pub fn quotient_amalgam(fin: &FiniteAmalgam, n: &BTreeSet<usize>) -> Result<AmalgamSpec, FiniteError> {
    let mut perms = Vec::new();
    let mut h_perms = Vec::new();
    for side in Side::BOTH {
        let g = fin.group(side);
        let nsub = fin.h_set_in(side, n);
        if !g.is_closed(&nsub) || !is_normal(g, &nsub)? {
            return Err(FiniteError::NotNormal(side));
        }
        let t = coset_transversal(g, &nsub)?;
        let act = |x: usize| -> Vec<u32> {
            t.reps()
                .iter()
                .map(|&r| t.coset_of(g.mul(x, r)) as u32)
                .collect()
        };
        perms.push(g.generators().iter().map(|&x| act(x)).collect::<Vec<_>>());
        h_perms.push(
            fin.h_subgroup(side)
                .generators()
                .iter()
                .map(|&x| act(x))
                .collect::<Vec<_>>(),
        );
    }
    let [p0, p1]: [Vec<Vec<u32>>; 2] = perms.try_into().expect("two sides");
    let [h0, h1]: [Vec<Vec<u32>>; 2] = h_perms.try_into().expect("two sides");
    Ok(AmalgamSpec {
        name: Some(format!("{}/N", fin.name())),
        g0: GroupSpec { perms: p0 },
        g1: GroupSpec { perms: p1 },
        h_gens_in_g0: h0,
        h_gens_in_g1: h1,
    })
}

/// Built-in example amalgams: `(id, description, spec)`.
pub fn builtin_specs() -> Vec<(&'static str, &'static str, AmalgamSpec)> {
    let spec = |name: &str, g0: Vec<Vec<u32>>, g1: Vec<Vec<u32>>, h0: Vec<Vec<u32>>, h1: Vec<Vec<u32>>| AmalgamSpec {
        name: Some(name.to_string()),
        g0: GroupSpec { perms: g0 },
        g1: GroupSpec { perms: g1 },
        h_gens_in_g0: h0,
        h_gens_in_g1: h1,
    };
    vec![
        (
            "s3",
            "S3 *_<(0 1)> S3",
            spec(
                "s3",
                vec![vec![1, 0, 2], vec![1, 2, 0]],
                vec![vec![1, 0, 2], vec![1, 2, 0]],
                vec![vec![1, 0, 2]],
                vec![vec![1, 0, 2]],
            ),
        ),
        (
            "sl2",
            "Z4 *_Z2 Z6",
            spec(
                "sl2",
                vec![vec![1, 2, 3, 0]],
                vec![vec![1, 2, 3, 4, 5, 0]],
                vec![vec![2, 3, 0, 1]],
                vec![vec![3, 4, 5, 0, 1, 2]],
            ),
        ),
        (
            "direct",
            "(Z3 x Z2) *_Z2 (Z2 x Z2), H a direct factor on both sides",
            spec(
                "direct",
                vec![vec![1, 2, 0, 3, 4], vec![0, 1, 2, 4, 3]],
                vec![vec![1, 0, 2, 3], vec![0, 1, 3, 2]],
                vec![vec![0, 1, 2, 4, 3]],
                vec![vec![1, 0, 2, 3]],
            ),
        ),
        (
            "free",
            "Z2 * Z3, trivial H",
            spec("free", vec![vec![1, 0]], vec![vec![1, 2, 0]], vec![], vec![]),
        ),
    ]
}

pub fn builtin_spec(id: &str) -> Option<AmalgamSpec> {
    builtin_specs()
        .into_iter()
        .find(|(i, _, _)| *i == id)
        .map(|(_, _, s)| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        let a = Perm::from_images(vec![1, 0, 2]).unwrap();
        let b = Perm::from_images(vec![1, 2, 0]).unwrap();
        FiniteGroup::closure(3, &[a, b], DEFAULT_MAX_CLOSURE).unwrap()
    }

    fn idx(g: &FiniteGroup, images: &[u32]) -> usize {
        g.index_of(&Perm::from_images(images.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn closure_orders() {
        let g = s3();
        assert_eq!(g.order(), 6);
        let t = g.subgroup(&[idx(&g, &[1, 0, 2])]);
        assert_eq!(t.order(), 2);
        let e = FiniteGroup::closure(3, &[], 10).unwrap();
        assert_eq!(e.order(), 1);
        let a = Perm::from_images(vec![1, 2, 3, 4, 0]).unwrap();
        assert_eq!(
            FiniteGroup::closure(5, &[a], 3).unwrap_err(),
            FiniteError::CapExceeded { cap: 3 }
        );
        assert!(Perm::from_images(vec![0, 0]).is_none());
    }

    #[test]
    fn perm_display() {
        assert_eq!(Perm::identity(3).to_string(), "()");
        assert_eq!(Perm::from_images(vec![1, 2, 0, 4, 3]).unwrap().to_string(), "(0 1 2)(3 4)");
    }

    #[test]
    fn transversal_round_trip() {
        let g = s3();
        let h = g.subgroup(&[idx(&g, &[1, 0, 2])]);
        let t = coset_transversal(&g, &h).unwrap();
        assert_eq!(t.index(), 3);
        assert_eq!(t.reps()[0], 0);
        for x in 0..g.order() {
            let (i, y) = t.decompose(&g, x);
            assert!(h.contains(y));
            assert_eq!(g.mul(t.reps()[i], y), x);
        }
        assert_eq!(coset_transversal(&g, &g.whole()).unwrap().index(), 1);
    }

    #[test]
    fn conjugation_intersection_core() {
        let g = s3();
        let h01 = g.subgroup(&[idx(&g, &[1, 0, 2])]);
        let h02 = g.subgroup(&[idx(&g, &[2, 1, 0])]);
        let h12 = g.subgroup(&[idx(&g, &[0, 2, 1])]);
        let r = idx(&g, &[1, 2, 0]);
        // r = (0 1 2) sends (0 1) to (1 2)
        assert_eq!(conjugate_subgroup(&g, r, &h01).unwrap().members, h12.members);
        assert_eq!(conjugate_subgroup(&g, 0, &h01).unwrap().members, h01.members);
        assert!(subgroup_intersection(&h01, &h02).unwrap().is_trivial());
        assert_eq!(subgroup_intersection(&h01, &h01).unwrap().members, h01.members);
        assert!(normal_core(&g, &h01).unwrap().is_trivial());
        let a3 = g.subgroup(&[r]);
        assert!(is_normal(&g, &a3).unwrap());
        assert_eq!(normal_core(&g, &a3).unwrap().members, a3.members);
        let other = s3();
        assert_eq!(
            subgroup_intersection(&h01, &other.whole()),
            Err(FiniteError::MismatchedParents)
        );
    }

    #[test]
    fn core_of_z2_in_z4() {
        let z4 = FiniteGroup::closure(4, &[Perm::from_images(vec![1, 2, 3, 0]).unwrap()], 10).unwrap();
        let z2 = z4.subgroup(&[idx(&z4, &[2, 3, 0, 1])]);
        assert_eq!(normal_core(&z4, &z2).unwrap().order(), 2);
    }

    #[test]
    fn builtins_load() {
        for (id, _, spec) in builtin_specs() {
            let f = FiniteAmalgam::from_spec(&spec, DEFAULT_MAX_CLOSURE).unwrap();
            let a = f.amalgam();
            assert_eq!(a.nondegeneracy_check(), Some(true), "{id}");
        }
        let s3 = FiniteAmalgam::from_spec(&builtin_spec("s3").unwrap(), 100).unwrap();
        assert_eq!(s3.h_order(), 2);
        assert_eq!(s3.index_of_h(Side::Zero), Some(3));
    }

    #[test]
    fn word_round_trip() {
        let f = FiniteAmalgam::from_spec(&builtin_spec("s3").unwrap(), 100).unwrap();
        let a = f.clone().amalgam();
        let x = a.normalize(&f.parse_word("0:2 1:3 h:1 0:5").unwrap());
        let y = a.normalize(&f.parse_word(&f.format_nf(&x)).unwrap());
        assert_eq!(x, y);
        assert_eq!(f.format_nf(&a.identity()), "e");
        let err = f.parse_word("0:1 2:0").unwrap_err();
        assert_eq!((err.index, err.column), (1, 4));
        assert!(f.parse_word("h:9").is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = builtin_spec("sl2").unwrap();
        assert_eq!(AmalgamSpec::from_json(&spec.to_json()).unwrap(), spec);
        assert!(matches!(AmalgamSpec::from_json("{"), Err(FiniteError::Json(_))));
    }

    #[test]
    fn validation_reports_failing_generator() {
        // (0 1) ↦ (0 1 2) is not a homomorphism: 2-cycle squared is trivial, 3-cycle squared is not
        let mut spec = builtin_spec("s3").unwrap();
        spec.h_gens_in_g1 = vec![vec![1, 2, 0]];
        assert!(matches!(
            FiniteAmalgam::from_spec(&spec, 100),
            Err(FiniteError::NotHomomorphism { generator: 0, .. })
        ));
        // sending the generator of Z2 to the identity of Z6 collapses H
        let mut spec = builtin_spec("sl2").unwrap();
        spec.h_gens_in_g1 = vec![vec![0, 1, 2, 3, 4, 5]];
        assert!(matches!(
            FiniteAmalgam::from_spec(&spec, 100),
            Err(FiniteError::NotInjective { generator: 0, .. })
        ));
        let mut spec = builtin_spec("s3").unwrap();
        spec.h_gens_in_g1 = vec![vec![1, 0, 2, 3]];
        assert!(matches!(
            FiniteAmalgam::from_spec(&spec, 100),
            Err(FiniteError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn quotient_by_central_z2() {
        let f = FiniteAmalgam::from_spec(&builtin_spec("sl2").unwrap(), 100).unwrap();
        let n: BTreeSet<usize> = f.h_elements().collect();
        let q = FiniteAmalgam::from_spec(&quotient_amalgam(&f, &n).unwrap(), 100).unwrap();
        assert_eq!(q.group(Side::Zero).order(), 2);
        assert_eq!(q.group(Side::One).order(), 3);
        assert_eq!(q.h_order(), 1);
        assert_eq!(q.index_of_h(Side::Zero), f.index_of_h(Side::Zero));
        assert_eq!(q.index_of_h(Side::One), f.index_of_h(Side::One));
        let triv = BTreeSet::from([0]);
        let same = FiniteAmalgam::from_spec(&quotient_amalgam(&f, &triv).unwrap(), 100).unwrap();
        assert_eq!(same.group(Side::One).order(), 6);
        let s3 = FiniteAmalgam::from_spec(&builtin_spec("s3").unwrap(), 100).unwrap();
        let h: BTreeSet<usize> = s3.h_elements().collect();
        assert_eq!(quotient_amalgam(&s3, &h), Err(FiniteError::NotNormal(Side::Zero)));
    }
}
