//! Connect-sum trees of `CP^2` copies and the sign characters they induce.
//!
//! A tree of `n` copies of `CP^2`, glued pairwise near coordinate points by
//! either a trivial or a hinge connect sum, carries an action of
//! `(Z/2)^3 = <f_X, f_Y, J>` where the `f`-maps are the coordinate sign flips
//! (acting by `+1` on the hyperplane class) and `J` is complex conjugation
//! (acting by `-1`). Each vertex `v` then sees the abstract group through a
//! local form `phi_v : (Z/2)^3 -> (Z/2)^3`, and the induced action on
//! `H_2 = Z^n` is by the diagonal signs `chi_v(g) = (J-component of
//! phi_v(g))`.
//!
//! Local forms propagate along edges: a trivial gluing preserves them, while
//! the hinge gluing at a coordinate point conjugates by an explicit
//! orientation-reversing chart identification. In the chart at the point
//! labelled `Z` that identification swaps `Re X` with `Im Y`, which
//! conjugates the standard maps by
//!
//! ```text
//!   f_X -> J,   f_Y -> J f_Z,   f_Z -> f_Z,   J -> f_X
//! ```
//!
//! and cyclically (`X -> Y -> Z -> X`) at the other two points. Hinge chains
//! must progress cyclically: below a hinge at point `W`, the next hinge on
//! the same path sits at `next(W)`. This is the frame convention under which
//! the chain and star examples reproduce the known homological actions; it is
//! validated by the catalog tests.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subspaces::Subspace2;

/// Coordinate point of a `CP^2` chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Point {
    X,
    Y,
    Z,
}

impl Point {
    pub const ALL: [Point; 3] = [Point::X, Point::Y, Point::Z];

    /// Cyclic successor `X -> Y -> Z -> X`.
    pub fn next(self) -> Point {
        match self {
            Point::X => Point::Y,
            Point::Y => Point::Z,
            Point::Z => Point::X,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::X => write!(f, "X"),
            Point::Y => write!(f, "Y"),
            Point::Z => write!(f, "Z"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Trivial,
    Hinge,
}

/// A connect sum between two copies, formed at the same coordinate point of
/// both (frames are aligned across edges).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub parent: usize,
    pub child: usize,
    pub kind: EdgeKind,
    pub point: Point,
}

/// Elements of the abstract group `(Z/2)^3` as 3-bit masks:
/// bit 0 = `f_X`, bit 1 = `f_Y`, bit 2 = `J`.
pub type Gen3 = u8;

pub const FX: Gen3 = 0b001;
pub const FY: Gen3 = 0b010;
pub const J: Gen3 = 0b100;

/// Name an element of `(Z/2)^3` in generator notation.
pub fn gen_name(g: Gen3) -> String {
    if g == 0 {
        return "id".into();
    }
    let mut s = String::new();
    if g & J != 0 {
        s.push('J');
    }
    if g & FX != 0 {
        s.push_str("fX");
    }
    if g & FY != 0 {
        s.push_str("fY");
    }
    s
}

/// Linear map `(Z/2)^3 -> (Z/2)^3` stored as images of the three generators.
type LocalMap = [Gen3; 3];

const IDENTITY_MAP: LocalMap = [FX, FY, J];

/// Hinge conjugation at each coordinate point (see module docs).
fn hinge_map(p: Point) -> LocalMap {
    match p {
        // f_X -> f_X, f_Y -> J, J -> f_Y
        Point::X => [FX, J, FY],
        // f_X -> J f_Y, f_Y -> f_Y, J -> f_X f_Y
        Point::Y => [J | FY, FY, FX | FY],
        // f_X -> J, f_Y -> J f_X f_Y, J -> f_X
        Point::Z => [J, J | FX | FY, FX],
    }
}

fn apply(map: &LocalMap, g: Gen3) -> Gen3 {
    let mut out = 0;
    for (i, &img) in map.iter().enumerate() {
        if g >> i & 1 == 1 {
            out ^= img;
        }
    }
    out
}

fn compose_maps(outer: &LocalMap, inner: &LocalMap) -> LocalMap {
    [
        apply(outer, inner[0]),
        apply(outer, inner[1]),
        apply(outer, inner[2]),
    ]
}

/// A tree of `CP^2` copies. Vertices are `1..=n`; the base vertex carries the
/// reference frame (`J` acts by `-1` there, the `f`-maps by `+1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CP2Tree {
    n: usize,
    base: usize,
    edges: Vec<TreeEdge>,
}

impl CP2Tree {
    /// Validate and build. Checks: the edges form a tree on `1..=n`; at every
    /// vertex each coordinate point carries at most one gluing (so degrees
    /// are at most 3); and hinges progress cyclically along base-rooted
    /// paths.
    pub fn new(n: usize, base: usize, edges: Vec<TreeEdge>) -> Result<Self> {
        if n == 0 || base == 0 || base > n {
            return Err(Error::Parse(format!("bad base {base} for n = {n}")));
        }
        if edges.len() != n - 1 {
            return Err(Error::Parse(format!(
                "a tree on {n} vertices needs {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut used: Vec<Vec<Point>> = vec![Vec::new(); n + 1];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for (i, e) in edges.iter().enumerate() {
            for v in [e.parent, e.child] {
                if v == 0 || v > n {
                    return Err(Error::Parse(format!("vertex {v} out of range 1..={n}")));
                }
                if used[v].contains(&e.point) {
                    return Err(Error::Parse(format!(
                        "point {} used twice at vertex {v}",
                        e.point
                    )));
                }
                used[v].push(e.point);
            }
            adj[e.parent].push(i);
            adj[e.child].push(i);
        }
        let tree = Self { n, base, edges };
        // Connectivity (n-1 edges + all reachable => tree) and the cyclic
        // hinge rule, in one BFS.
        let mut seen = vec![false; n + 1];
        let mut stack = vec![(base, None::<Point>)];
        seen[base] = true;
        let mut count = 1;
        while let Some((v, last_hinge)) = stack.pop() {
            for &ei in &adj[v] {
                let e = &tree.edges[ei];
                let w = if e.parent == v { e.child } else { e.parent };
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                count += 1;
                let next_last = match e.kind {
                    EdgeKind::Trivial => last_hinge,
                    EdgeKind::Hinge => {
                        if let Some(prev) = last_hinge {
                            if e.point != prev.next() {
                                return Err(Error::Parse(format!(
                                    "hinge at {} below a hinge at {} breaks the cyclic frame convention",
                                    e.point, prev
                                )));
                            }
                        }
                        Some(e.point)
                    }
                };
                stack.push((w, next_last));
            }
        }
        if count != n {
            return Err(Error::Parse("edges do not connect all vertices".into()));
        }
        Ok(tree)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }
}

impl fmt::Display for CP2Tree {
    /// Text format: a `base <v>` line, then one `parent child kind point`
    /// line per edge.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "base {}", self.base)?;
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let kind = match e.kind {
                EdgeKind::Trivial => "trivial",
                EdgeKind::Hinge => "hinge",
            };
            write!(f, "{} {} {} {}", e.parent, e.child, kind, e.point)?;
        }
        Ok(())
    }
}

impl FromStr for CP2Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut base = 1usize;
        let mut edges = Vec::new();
        let mut max_v = 1usize;
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok[0] == "base" {
                base = tok
                    .get(1)
                    .ok_or_else(|| Error::Parse("base line needs a vertex".into()))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad base: {e}")))?;
                max_v = max_v.max(base);
                continue;
            }
            if tok.len() != 4 {
                return Err(Error::Parse(format!(
                    "expected `parent child kind point`, got {line:?}"
                )));
            }
            let parent: usize = tok[0].parse().map_err(|e| Error::Parse(format!("{e}")))?;
            let child: usize = tok[1].parse().map_err(|e| Error::Parse(format!("{e}")))?;
            let kind = match tok[2].to_ascii_lowercase().as_str() {
                "trivial" | "t" => EdgeKind::Trivial,
                "hinge" | "h" => EdgeKind::Hinge,
                other => return Err(Error::Parse(format!("bad edge kind {other:?}"))),
            };
            let point = match tok[3].to_ascii_uppercase().as_str() {
                "X" => Point::X,
                "Y" => Point::Y,
                "Z" => Point::Z,
                other => return Err(Error::Parse(format!("bad point {other:?}"))),
            };
            max_v = max_v.max(parent).max(child);
            edges.push(TreeEdge { parent, child, kind, point });
        }
        CP2Tree::new(max_v, base, edges)
    }
}

/// Per-vertex sign characters on the generators `(f_X, f_Y, J)`.
///
/// `chi[v]` is a 3-bit functional: bit `i` is the sign exponent of generator
/// `i` on the hyperplane class of vertex `v` (1 means the generator acts by
/// `-1` there).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterAssignment {
    chi: Vec<Gen3>,
}

impl CharacterAssignment {
    /// Value of the character at vertex `v` (1-indexed) on group element `g`.
    pub fn value(&self, v: usize, g: Gen3) -> u8 {
        ((self.chi[v] & g).count_ones() & 1) as u8
    }

    /// Raw per-vertex functional masks, index 1..=n.
    pub fn masks(&self) -> &[Gen3] {
        &self.chi
    }
}

/// Propagate local forms from the base and read off sign characters.
pub fn propagate(tree: &CP2Tree) -> CharacterAssignment {
    let n = tree.n();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (i, e) in tree.edges().iter().enumerate() {
        adj[e.parent].push(i);
        adj[e.child].push(i);
    }
    let mut maps: Vec<LocalMap> = vec![IDENTITY_MAP; n + 1];
    let mut chi = vec![0u8; n + 1];
    let mut seen = vec![false; n + 1];
    let base = tree.base();
    seen[base] = true;
    chi[base] = chi_of(&IDENTITY_MAP);
    let mut stack = vec![base];
    while let Some(v) = stack.pop() {
        for &ei in &adj[v] {
            let e = &tree.edges()[ei];
            let w = if e.parent == v { e.child } else { e.parent };
            if seen[w] {
                continue;
            }
            seen[w] = true;
            maps[w] = match e.kind {
                EdgeKind::Trivial => maps[v],
                EdgeKind::Hinge => compose_maps(&hinge_map(e.point), &maps[v]),
            };
            chi[w] = chi_of(&maps[w]);
            stack.push(w);
        }
    }
    CharacterAssignment { chi }
}

/// The functional `g -> J-component of map(g)` as a 3-bit mask.
fn chi_of(map: &LocalMap) -> Gen3 {
    let mut m = 0;
    for i in 0..3 {
        m |= (map[i] >> 2 & 1) << i;
    }
    m
}

/// Image in `(Z/2)^n` of chosen generators of `(Z/2)^3` under the action of
/// a tree: generator `g` maps to the diagonal element flipping exactly the
/// vertices where its character is `-1`.
pub fn realized_subgroup(tree: &CP2Tree, generators: &[Gen3]) -> Result<Subspace2> {
    let chars = propagate(tree);
    let vectors: Vec<u64> = generators
        .iter()
        .map(|&g| {
            let mut v = 0u64;
            for vert in 1..=tree.n() {
                if chars.value(vert, g) == 1 {
                    v |= 1 << (vert - 1);
                }
            }
            v
        })
        .collect();
    Subspace2::from_vectors(tree.n(), &vectors)
}

/// The generators of `(Z/2)^3` pushed into the diffeomorphism group by a
/// construction, in the order matching the realized basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorChoice {
    pub gens: Vec<Gen3>,
}

impl GeneratorChoice {
    pub fn names(&self) -> Vec<String> {
        self.gens.iter().map(|&g| gen_name(g)).collect()
    }
}

// ---------------------------------------------------------------------------
// Rank <= 2 realization.
// ---------------------------------------------------------------------------

/// Build a tree and generator choice realizing a diagonal subgroup of rank
/// at most 2, exactly.
///
/// For generators `phi, psi` (rank 2) the coordinate set splits into
/// `A = S_phi \ S_psi`, `B = S_psi \ S_phi`, `C = both`, `D = neither`, and
/// the construction follows the three cases: `D` nonempty hangs hinged `A`,
/// `B`, `C` chains off a trivial `D` chain and pushes `(f_X, f_Y)`;
/// `D` empty but `C` nonempty bases on the `C` chain and pushes
/// `(J f_X, J f_Y)`; `A | B` a partition uses a single hinge between the two
/// sides and pushes `(J, f_X)`.
pub fn realize_rank2(h: &Subspace2) -> Result<(CP2Tree, GeneratorChoice)> {
    if h.rank() > 2 {
        return Err(Error::Precondition(format!(
            "realize_rank2 needs rank <= 2, got {}",
            h.rank()
        )));
    }
    let n = h.n();
    if n == 0 || n > 60 {
        return Err(Error::CapExceeded("realize_rank2 supports 1 <= n <= 60".into()));
    }
    let phi = h.basis().first().copied().unwrap_or(0);
    let psi = h.basis().get(1).copied().unwrap_or(0);
    let bits = |v: u64| -> Vec<usize> { (1..=n).filter(|&i| v >> (i - 1) & 1 == 1).collect() };
    let a: Vec<usize> = bits(phi & !psi);
    let b: Vec<usize> = bits(psi & !phi);
    let c: Vec<usize> = bits(phi & psi);
    let d: Vec<usize> = (1..=n).filter(|&i| (phi | psi) >> (i - 1) & 1 == 0).collect();

    let mut edges = Vec::new();
    let (base, gens): (usize, Vec<Gen3>) = if !d.is_empty() {
        let base = d[0];
        let chain_pt = if a.is_empty() { Point::Y } else { Point::Z };
        add_chain(&mut edges, base, chain_pt, EdgeKind::Trivial, &d[1..], chain_pt.next());
        if !a.is_empty() {
            let start = if c.is_empty() { Point::Z } else { Point::X };
            add_chain(&mut edges, base, Point::Y, EdgeKind::Hinge, &a, start);
        }
        if !b.is_empty() {
            add_chain(&mut edges, base, Point::X, EdgeKind::Hinge, &b, Point::Y);
        }
        if !c.is_empty() {
            // Below the A hinge at Y the cyclic convention allows Z, which is
            // exactly the both-flip character; with A empty, Z at the base.
            let at = if a.is_empty() { base } else { a[0] };
            add_chain(&mut edges, at, Point::Z, EdgeKind::Hinge, &c, Point::X);
        }
        (base, vec![FX, FY])
    } else if !c.is_empty() {
        let base = c[0];
        add_chain(&mut edges, base, Point::Z, EdgeKind::Trivial, &c[1..], Point::X);
        if !a.is_empty() {
            add_chain(&mut edges, base, Point::Y, EdgeKind::Hinge, &a, Point::Z);
        }
        if !b.is_empty() {
            add_chain(&mut edges, base, Point::X, EdgeKind::Hinge, &b, Point::Y);
        }
        (base, vec![J | FX, J | FY])
    } else if !a.is_empty() && !b.is_empty() {
        // phi and psi reflect complementary sets: one hinge between the two
        // sides, trivial chains on either side.
        let base = a[0];
        edges.push(TreeEdge { parent: base, child: b[0], kind: EdgeKind::Hinge, point: Point::Z });
        add_chain(&mut edges, base, Point::X, EdgeKind::Trivial, &a[1..], Point::Y);
        add_chain(&mut edges, b[0], Point::X, EdgeKind::Trivial, &b[1..], Point::Y);
        (base, vec![J, FX])
    } else if !a.is_empty() {
        // Rank 1 reflecting everything: a trivial chain, push J alone.
        let base = a[0];
        add_chain(&mut edges, base, Point::X, EdgeKind::Trivial, &a[1..], Point::Y);
        (base, vec![J])
    } else {
        // The zero subgroup: a trivial chain and no generators.
        add_chain(&mut edges, 1, Point::X, EdgeKind::Trivial, &(2..=n).collect::<Vec<_>>(), Point::Y);
        (1, Vec::new())
    };

    let tree = CP2Tree::new(n, base, edges)?;
    let gen_choice = GeneratorChoice { gens };
    let realized = realized_subgroup(&tree, &gen_choice.gens)?;
    if realized != *h {
        return Err(Error::Internal(format!(
            "rank <= 2 realization does not round-trip: built {realized} for {h}"
        )));
    }
    Ok((tree, gen_choice))
}

/// Append a chain: `attach -(kind at attach_pt)- v0 - v1 - ...` with trivial
/// interior edges alternating between `start` and `next(start)`.
fn add_chain(
    edges: &mut Vec<TreeEdge>,
    attach: usize,
    attach_pt: Point,
    kind: EdgeKind,
    verts: &[usize],
    start: Point,
) {
    if verts.is_empty() {
        return;
    }
    edges.push(TreeEdge { parent: attach, child: verts[0], kind, point: attach_pt });
    let alt = [start, start.next()];
    for i in 1..verts.len() {
        edges.push(TreeEdge {
            parent: verts[i - 1],
            child: verts[i],
            kind: EdgeKind::Trivial,
            point: alt[(i - 1) % 2],
        });
    }
}

// ---------------------------------------------------------------------------
// Rank-3 catalog.
// ---------------------------------------------------------------------------

/// One permutation-equivalence class of rank-3 subgroups realized by a tree.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    /// Canonical key of the class (see `Subspace2::perm_canonical_key`).
    pub key: Vec<u16>,
    /// Canonical representative subspace.
    pub representative: Subspace2,
    /// An example tree realizing a member of the class.
    pub tree: CP2Tree,
    /// Generators pushed through the example tree.
    pub generators: GeneratorChoice,
}

pub const CATALOG_MAX_N: usize = 7;

/// Exhaustive catalog of rank-3 diagonal subgroups realized by trees on
/// exactly `n` vertices, up to permutation equivalence.
///
/// For `n >= 4` the adjacency graph must contain a degree-3 vertex; for
/// `n = 3` plain chains are admitted (a chain of three with two hinges
/// realizes the full diagonal group). Entries are sorted by canonical key.
pub fn rank3_catalog(n: usize, max_vertices: usize) -> Result<Vec<CatalogEntry>> {
    if n > max_vertices {
        return Err(Error::CapExceeded(format!(
            "catalog requested for n = {n} with max_vertices = {max_vertices}"
        )));
    }
    if n > CATALOG_MAX_N {
        return Err(Error::CapExceeded(format!(
            "rank-3 catalog enumeration capped at n = {CATALOG_MAX_N}"
        )));
    }
    if n < 3 {
        return Ok(Vec::new());
    }
    let trees = labeled_trees(n);
    let classes: BTreeMap<Vec<u16>, CatalogEntry> = trees
        .par_iter()
        .filter_map(|edges| {
            let degrees = {
                let mut d = vec![0usize; n + 1];
                for &(u, v) in edges {
                    d[u] += 1;
                    d[v] += 1;
                }
                d
            };
            if degrees.iter().any(|&d| d > 3) {
                return None;
            }
            if n >= 4 && !degrees.iter().any(|&d| d == 3) {
                return None;
            }
            let mut local: BTreeMap<Vec<u16>, CatalogEntry> = BTreeMap::new();
            let mut assignment: Vec<(EdgeKind, Point)> = Vec::with_capacity(edges.len());
            enumerate_assignments(n, edges, &mut assignment, &mut local);
            Some(local)
        })
        .reduce(BTreeMap::new, |mut acc, local| {
            for (k, v) in local {
                acc.entry(k).or_insert(v);
            }
            acc
        });
    Ok(classes.into_values().collect())
}

/// All labeled trees on `1..=n` via decoded sequences.
fn labeled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![Vec::new()];
    }
    if n == 2 {
        return vec![vec![(1, 2)]];
    }
    let len = n - 2;
    let total = (n as u64).pow(len as u32);
    let mut out = Vec::with_capacity(total as usize);
    for code in 0..total {
        let mut seq = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            seq.push((c % n as u64) as usize + 1);
            c /= n as u64;
        }
        out.push(decode_pruefer(n, &seq));
    }
    out
}

fn decode_pruefer(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n + 1];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut ptr = 1;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &v in seq {
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 && v < ptr {
            leaf = v;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf, n));
    edges
}

/// Depth-first enumeration of (kind, point) labels over the edges of one
/// tree, pruning on per-vertex point reuse; valid full assignments are
/// propagated, filtered to rank 3 and folded into the class map.
fn enumerate_assignments(
    n: usize,
    edges: &[(usize, usize)],
    assignment: &mut Vec<(EdgeKind, Point)>,
    classes: &mut BTreeMap<Vec<u16>, CatalogEntry>,
) {
    if assignment.len() == edges.len() {
        let tree_edges: Vec<TreeEdge> = edges
            .iter()
            .zip(assignment.iter())
            .map(|(&(u, v), &(kind, point))| TreeEdge { parent: u, child: v, kind, point })
            .collect();
        // Point-disjointness holds by construction; the cyclic rule is
        // checked by the constructor.
        let Ok(tree) = CP2Tree::new(n, 1, tree_edges) else {
            return;
        };
        let Ok(sub) = realized_subgroup(&tree, &[FX, FY, J]) else {
            return;
        };
        if sub.rank() != 3 {
            return;
        }
        let Ok(key) = sub.perm_canonical_key() else {
            return;
        };
        classes.entry(key.clone()).or_insert_with(|| CatalogEntry {
            key,
            representative: sub.perm_canonical_rep().expect("rank 3"),
            tree,
            generators: GeneratorChoice { gens: vec![FX, FY, J] },
        });
        return;
    }
    let idx = assignment.len();
    let (u, v) = edges[idx];
    for kind in [EdgeKind::Trivial, EdgeKind::Hinge] {
        'points: for point in Point::ALL {
            for (&(a, b), &(_, p)) in edges.iter().zip(assignment.iter()) {
                if (a == u || b == u || a == v || b == v) && p == point {
                    continue 'points;
                }
            }
            assignment.push((kind, point));
            enumerate_assignments(n, edges, assignment, classes);
            assignment.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_tree(kinds: [EdgeKind; 3]) -> CP2Tree {
        CP2Tree::new(
            4,
            1,
            vec![
                TreeEdge { parent: 1, child: 2, kind: kinds[0], point: Point::X },
                TreeEdge { parent: 1, child: 3, kind: kinds[1], point: Point::Y },
                TreeEdge { parent: 1, child: 4, kind: kinds[2], point: Point::Z },
            ],
        )
        .unwrap()
    }

    #[test]
    fn star_reproduces_standard_matrices() {
        // All-hinge star in basis (center, M_X, M_Y, M_Z): f_X acts by
        // (+,+,-,-), f_Y by (+,-,+,-), f_Z by (+,-,-,+), J by (-,+,+,+).
        let tree = star_tree([EdgeKind::Hinge; 3]);
        let chars = propagate(&tree);
        let col = |g: Gen3| -> Vec<u8> { (1..=4).map(|v| chars.value(v, g)).collect() };
        assert_eq!(col(FX), vec![0, 0, 1, 1]);
        assert_eq!(col(FY), vec![0, 1, 0, 1]);
        assert_eq!(col(FX | FY), vec![0, 1, 1, 0]);
        assert_eq!(col(J), vec![1, 0, 0, 0]);
    }

    #[test]
    fn single_edges() {
        // A trivial edge copies the character.
        let t = CP2Tree::new(
            2,
            1,
            vec![TreeEdge { parent: 1, child: 2, kind: EdgeKind::Trivial, point: Point::Z }],
        )
        .unwrap();
        let chars = propagate(&t);
        assert_eq!(chars.masks()[1], chars.masks()[2]);

        // A single hinge at Y: J acts (-,+), f_X acts (+,-).
        let t = CP2Tree::new(
            2,
            1,
            vec![TreeEdge { parent: 1, child: 2, kind: EdgeKind::Hinge, point: Point::Y }],
        )
        .unwrap();
        let chars = propagate(&t);
        assert_eq!((chars.value(1, J), chars.value(2, J)), (1, 0));
        assert_eq!((chars.value(1, FX), chars.value(2, FX)), (0, 1));
    }

    #[test]
    fn chain_of_three_realizes_full_diagonal() {
        let t = CP2Tree::new(
            3,
            1,
            vec![
                TreeEdge { parent: 1, child: 2, kind: EdgeKind::Hinge, point: Point::X },
                TreeEdge { parent: 2, child: 3, kind: EdgeKind::Hinge, point: Point::Y },
            ],
        )
        .unwrap();
        let sub = realized_subgroup(&t, &[FX, FY, J]).unwrap();
        assert_eq!(sub.rank(), 3);
        assert_eq!(sub, Subspace2::from_vectors(3, &[1, 2, 4]).unwrap());
    }

    #[test]
    fn characters_are_linear() {
        let tree = star_tree([EdgeKind::Hinge, EdgeKind::Trivial, EdgeKind::Hinge]);
        let chars = propagate(&tree);
        for v in 1..=4 {
            for g in 0..8u8 {
                for h in 0..8u8 {
                    assert_eq!(
                        chars.value(v, g ^ h),
                        chars.value(v, g) ^ chars.value(v, h)
                    );
                }
            }
        }
    }

    #[test]
    fn cyclic_hinge_rule_enforced() {
        let bad = CP2Tree::new(
            3,
            1,
            vec![
                TreeEdge { parent: 1, child: 2, kind: EdgeKind::Hinge, point: Point::Z },
                TreeEdge { parent: 2, child: 3, kind: EdgeKind::Hinge, point: Point::Y },
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn realize_small_cases() {
        // <e1 e2> in n = 3 (D nonempty).
        let h = Subspace2::from_vectors(3, &[0b011]).unwrap();
        let (tree, gens) = realize_rank2(&h).unwrap();
        assert_eq!(realized_subgroup(&tree, &gens.gens).unwrap(), h);

        // <e1 e2, e2 e3> (D empty, C = {2}).
        let h = Subspace2::from_vectors(3, &[0b011, 0b110]).unwrap();
        let (_, gens) = realize_rank2(&h).unwrap();
        assert_eq!(gens.gens, vec![J | FX, J | FY]);

        // <e1, e2> in n = 2 (C = D = empty).
        let h = Subspace2::from_vectors(2, &[1, 2]).unwrap();
        let (_, gens) = realize_rank2(&h).unwrap();
        assert_eq!(gens.gens, vec![J, FX]);

        // Full reflection and the zero subgroup.
        let h = Subspace2::from_vectors(4, &[0b1111]).unwrap();
        realize_rank2(&h).unwrap();
        let h = Subspace2::zero(4);
        realize_rank2(&h).unwrap();
    }

    #[test]
    fn catalog_n4_matches_known_groups() {
        let catalog = rank3_catalog(4, 4).unwrap();
        assert_eq!(catalog.len(), 2);
        let expected = [
            Subspace2::from_vectors(4, &[0b0001, 0b0110, 0b1100]).unwrap(),
            Subspace2::from_vectors(4, &[0b0001, 0b0010, 0b1100]).unwrap(),
        ];
        for e in &expected {
            let key = e.perm_canonical_key().unwrap();
            assert!(catalog.iter().any(|c| c.key == key), "missing {e}");
        }
    }

    #[test]
    fn catalog_n5_matches_known_groups() {
        let catalog = rank3_catalog(5, 5).unwrap();
        let expected = [
            Subspace2::from_vectors(5, &[0b00001, 0b00010, 0b11100]).unwrap(),
            Subspace2::from_vectors(5, &[0b00001, 0b00110, 0b11000]).unwrap(),
            Subspace2::from_vectors(5, &[0b00001, 0b00110, 0b11100]).unwrap(),
            Subspace2::from_vectors(5, &[0b00011, 0b01100, 0b11000]).unwrap(),
        ];
        assert_eq!(catalog.len(), expected.len());
        for e in &expected {
            let key = e.perm_canonical_key().unwrap();
            assert!(catalog.iter().any(|c| c.key == key), "missing {e}");
        }
    }

    #[test]
    fn catalog_n3_contains_full_group() {
        let catalog = rank3_catalog(3, 3).unwrap();
        assert_eq!(catalog.len(), 1);
        let g3 = Subspace2::from_vectors(3, &[1, 2, 4]).unwrap();
        assert_eq!(catalog[0].key, g3.perm_canonical_key().unwrap());
    }

    #[test]
    fn tree_text_round_trip() {
        let tree = star_tree([EdgeKind::Hinge, EdgeKind::Hinge, EdgeKind::Trivial]);
        let text = tree.to_string();
        let parsed: CP2Tree = text.parse().unwrap();
        assert_eq!(parsed, tree);
    }
}
