//! Tree families with exact geodesic geometry.
//!
//! Two families are supported:
//!
//! * Cayley trees of free products of `Z/2Z` and `Z` factors, with vertices
//!   stored as reduced words;
//! * colored trees given by a neighbour-color rule, with vertices stored as
//!   slot paths from a root vertex.
//!
//! In both cases a vertex is a path from the base vertex, so distances and
//! geodesics reduce to longest-common-prefix computations.

use std::collections::HashSet;
use std::fmt;

use crate::error::{model_err, Error, Result};

/// Canonical tree vertex: the sequence of letters (free product) or slots
/// (colored tree) along the geodesic from the base vertex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex(Vec<u8>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn from_path(path: Vec<u8>) -> Self {
        Vertex(path)
    }

    pub fn path(&self) -> &[u8] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    fn lcp(&self, other: &Vertex) -> usize {
        self.0.iter().zip(other.0.iter()).take_while(|(a, b)| a == b).count()
    }

    fn truncated(&self, len: usize) -> Vertex {
        Vertex(self.0[..len].to_vec())
    }

    fn pushed(&self, s: u8) -> Vertex {
        let mut p = self.0.clone();
        p.push(s);
        Vertex(p)
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{:?}", self.0)
    }
}

/// Free product of cyclic factors. Order `2` gives an involutive letter, order
/// `0` an infinite-order generator with letters `s` and `s^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeProductSpec {
    pub factors: Vec<u32>,
    pub names: Vec<String>,
}

/// Colored tree: every vertex of color `i` has the neighbour colors listed in
/// `neighbours[i]` (a multiset).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredTreeSpec {
    pub colors: Vec<String>,
    pub neighbours: Vec<Vec<usize>>,
    pub root_color: usize,
}

#[derive(Clone, Debug)]
struct Letter {
    name: String,
    inverse: u8,
}

#[derive(Clone, Debug)]
pub struct FreeProduct {
    spec: FreeProductSpec,
    letters: Vec<Letter>,
}

#[derive(Clone, Debug)]
pub struct ColoredTree {
    spec: ColoredTreeSpec,
    /// `parent_slot[c][p]`: slot of a color-`c` vertex occupied by its parent of color `p`.
    parent_slot: Vec<Vec<Option<u8>>>,
}

/// One of the two supported tree families.
#[derive(Clone, Debug)]
pub enum Tree {
    FreeProduct(FreeProduct),
    Colored(ColoredTree),
}

impl FreeProduct {
    pub fn new(spec: FreeProductSpec) -> Result<Self> {
        if spec.factors.is_empty() {
            return model_err("free product needs at least one factor");
        }
        if spec.factors.len() != spec.names.len() {
            return model_err("one generator name per factor is required");
        }
        let mut letters = Vec::new();
        let mut seen = HashSet::new();
        for (&order, name) in spec.factors.iter().zip(&spec.names) {
            if name.is_empty() || name == "e" || name.contains(char::is_whitespace) || name.contains('^') {
                return model_err(format!("invalid generator name {name:?}"));
            }
            if !seen.insert(name.clone()) {
                return model_err(format!("duplicate generator name {name:?}"));
            }
            let i = letters.len() as u8;
            match order {
                2 => letters.push(Letter { name: name.clone(), inverse: i }),
                0 => {
                    letters.push(Letter { name: name.clone(), inverse: i + 1 });
                    letters.push(Letter { name: format!("{name}^-1"), inverse: i });
                }
                m => {
                    return model_err(format!(
                        "factor {name} of order {m}: only orders 2 and 0 (infinite) give a tree Cayley graph"
                    ))
                }
            }
        }
        if letters.len() < 3 {
            return model_err(format!("valence {} < 3", letters.len()));
        }
        if letters.len() > 250 {
            return model_err("too many generators");
        }
        Ok(FreeProduct { spec, letters })
    }

    pub fn spec(&self) -> &FreeProductSpec {
        &self.spec
    }

    pub fn letter_count(&self) -> usize {
        self.letters.len()
    }

    pub fn letter_name(&self, l: u8) -> &str {
        &self.letters[l as usize].name
    }

    pub fn inverse_letter(&self, l: u8) -> u8 {
        self.letters[l as usize].inverse
    }

    /// Freely reduce a letter sequence.
    pub fn reduce_letters(&self, word: &[u8]) -> Vertex {
        let mut out: Vec<u8> = Vec::with_capacity(word.len());
        for &l in word {
            if out.last().is_some_and(|&t| self.letters[t as usize].inverse == l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Vertex(out)
    }

    /// Parse a word such as `"a c c b"`, `"acb"` or `"s s^-1 a"`.
    pub fn parse_word(&self, text: &str) -> Result<Vec<u8>> {
        let t = text.trim();
        if t.is_empty() || t == "e" {
            return Ok(Vec::new());
        }
        let mut names: Vec<(usize, &str)> =
            self.letters.iter().enumerate().map(|(i, l)| (i, l.name.as_str())).collect();
        names.sort_by_key(|(_, n)| std::cmp::Reverse(n.len()));
        let mut out = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            match names.iter().find(|(_, n)| rest.starts_with(n)) {
                Some(&(i, n)) => {
                    out.push(i as u8);
                    rest = &rest[n.len()..];
                }
                None => return model_err(format!("unknown letter in word {text:?} at {rest:?}")),
            }
        }
        Ok(out)
    }

    pub fn format_word(&self, v: &Vertex) -> String {
        if v.is_root() {
            return "e".into();
        }
        let compact = self.letters.iter().all(|l| l.name.chars().count() == 1);
        let parts: Vec<&str> = v.0.iter().map(|&l| self.letter_name(l)).collect();
        if compact {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    pub fn inverse(&self, v: &Vertex) -> Vertex {
        Vertex(v.0.iter().rev().map(|&l| self.inverse_letter(l)).collect())
    }

    pub fn mul(&self, x: &Vertex, y: &Vertex) -> Vertex {
        let mut w = x.0.clone();
        w.extend_from_slice(&y.0);
        self.reduce_letters(&w)
    }
}

impl ColoredTree {
    pub fn new(spec: ColoredTreeSpec) -> Result<Self> {
        let n = spec.colors.len();
        if n == 0 {
            return model_err("colored tree needs at least one color");
        }
        if spec.neighbours.len() != n {
            return model_err("one neighbour-color list per color is required");
        }
        if spec.root_color >= n {
            return model_err("root color out of range");
        }
        for (i, list) in spec.neighbours.iter().enumerate() {
            if list.len() < 3 {
                return model_err(format!("color {} has valence {} < 3", spec.colors[i], list.len()));
            }
            if list.len() > 250 {
                return model_err("valence too large");
            }
            if let Some(&j) = list.iter().find(|&&j| j >= n) {
                return model_err(format!("neighbour color index {j} out of range"));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = spec.neighbours[i].contains(&j);
                let ji = spec.neighbours[j].contains(&i);
                if ij != ji {
                    return model_err(format!(
                        "neighbour-color rule is not symmetric between {} and {}",
                        spec.colors[i], spec.colors[j]
                    ));
                }
            }
        }
        let mut reach = vec![false; n];
        let mut stack = vec![spec.root_color];
        reach[spec.root_color] = true;
        while let Some(c) = stack.pop() {
            for &j in &spec.neighbours[c] {
                if !reach[j] {
                    reach[j] = true;
                    stack.push(j);
                }
            }
        }
        if let Some(c) = reach.iter().position(|r| !r) {
            return model_err(format!("color {} does not occur in the tree", spec.colors[c]));
        }
        let parent_slot = (0..n)
            .map(|c| (0..n).map(|p| spec.neighbours[c].iter().position(|&j| j == p).map(|s| s as u8)).collect())
            .collect();
        Ok(ColoredTree { spec, parent_slot })
    }

    pub fn spec(&self) -> &ColoredTreeSpec {
        &self.spec
    }

    pub fn color_count(&self) -> usize {
        self.spec.colors.len()
    }

    pub fn color_name(&self, c: usize) -> &str {
        &self.spec.colors[c]
    }

    pub fn color_index(&self, name: &str) -> Option<usize> {
        self.spec.colors.iter().position(|c| c == name)
    }

    /// Colors of the root path `[root, …, v]`.
    pub fn path_colors(&self, v: &Vertex) -> Vec<usize> {
        let mut c = self.spec.root_color;
        let mut out = Vec::with_capacity(v.depth() + 1);
        out.push(c);
        for &s in &v.0 {
            c = self.spec.neighbours[c][s as usize];
            out.push(c);
        }
        out
    }

    pub fn color(&self, v: &Vertex) -> usize {
        *self.path_colors(v).last().unwrap()
    }

    fn child_slots(&self, v: &Vertex) -> Vec<u8> {
        let cols = self.path_colors(v);
        let c = *cols.last().unwrap();
        let deg = self.spec.neighbours[c].len() as u8;
        if v.is_root() {
            return (0..deg).collect();
        }
        let parent = cols[cols.len() - 2];
        let ps = self.parent_slot[c][parent].expect("validated symmetric rule");
        (0..deg).filter(|&s| s != ps).collect()
    }

    fn valid_path(&self, path: &[u8]) -> bool {
        let mut c = self.spec.root_color;
        let mut parent: Option<usize> = None;
        for &s in path {
            let list = &self.spec.neighbours[c];
            if s as usize >= list.len() {
                return false;
            }
            if let Some(p) = parent {
                if self.parent_slot[c][p] == Some(s) {
                    return false;
                }
            }
            parent = Some(c);
            c = list[s as usize];
        }
        true
    }
}

impl Tree {
    pub fn free_product(spec: FreeProductSpec) -> Result<Self> {
        Ok(Tree::FreeProduct(FreeProduct::new(spec)?))
    }

    pub fn colored(spec: ColoredTreeSpec) -> Result<Self> {
        Ok(Tree::Colored(ColoredTree::new(spec)?))
    }

    pub fn base(&self) -> Vertex {
        Vertex::root()
    }

    pub fn as_free_product(&self) -> Option<&FreeProduct> {
        match self {
            Tree::FreeProduct(f) => Some(f),
            Tree::Colored(_) => None,
        }
    }

    pub fn as_colored(&self) -> Option<&ColoredTree> {
        match self {
            Tree::Colored(c) => Some(c),
            Tree::FreeProduct(_) => None,
        }
    }

    /// Canonical form of a letter word (free-product model only).
    pub fn reduce(&self, word: &str) -> Result<Vertex> {
        match self {
            Tree::FreeProduct(f) => Ok(f.reduce_letters(&f.parse_word(word)?)),
            Tree::Colored(_) => model_err("reduce applies to free-product trees"),
        }
    }

    /// Parse a vertex: a word for free products, a slot path such as `r.0.2`
    /// for colored trees.
    pub fn parse_vertex(&self, text: &str) -> Result<Vertex> {
        match self {
            Tree::FreeProduct(_) => self.reduce(text),
            Tree::Colored(c) => {
                let t = text.trim();
                let body = t
                    .strip_prefix('r')
                    .ok_or_else(|| Error::Model(format!("colored vertex {t:?} must start with 'r'")))?;
                let mut path = Vec::new();
                for part in body.split('.').filter(|s| !s.is_empty()) {
                    let s: u8 = part.parse().map_err(|_| Error::Model(format!("bad slot {part:?} in vertex {t:?}")))?;
                    path.push(s);
                }
                if !c.valid_path(&path) {
                    return model_err(format!("slot path {t:?} is not a vertex"));
                }
                Ok(Vertex(path))
            }
        }
    }

    pub fn format_vertex(&self, v: &Vertex) -> String {
        match self {
            Tree::FreeProduct(f) => f.format_word(v),
            Tree::Colored(_) => {
                let mut s = String::from("r");
                for x in &v.0 {
                    s.push('.');
                    s.push_str(&x.to_string());
                }
                s
            }
        }
    }

    /// Color of a vertex; free-product trees have the single color `0`.
    pub fn color(&self, v: &Vertex) -> usize {
        match self {
            Tree::FreeProduct(_) => 0,
            Tree::Colored(c) => c.color(v),
        }
    }

    pub fn parent(&self, v: &Vertex) -> Option<Vertex> {
        if v.is_root() {
            None
        } else {
            Some(v.truncated(v.depth() - 1))
        }
    }

    pub fn children(&self, v: &Vertex) -> Vec<Vertex> {
        match self {
            Tree::FreeProduct(f) => {
                let last_inv = v.0.last().map(|&l| f.inverse_letter(l));
                (0..f.letter_count() as u8).filter(|&l| Some(l) != last_inv).map(|l| v.pushed(l)).collect()
            }
            Tree::Colored(c) => c.child_slots(v).into_iter().map(|s| v.pushed(s)).collect(),
        }
    }

    /// Neighbours in a fixed order: parent first, then children.
    pub fn neighbours(&self, v: &Vertex) -> Vec<Vertex> {
        let mut out = Vec::new();
        if let Some(p) = self.parent(v) {
            out.push(p);
        }
        out.extend(self.children(v));
        out
    }

    pub fn valence(&self, v: &Vertex) -> usize {
        match self {
            Tree::FreeProduct(f) => f.letter_count(),
            Tree::Colored(c) => c.spec.neighbours[c.color(v)].len(),
        }
    }

    pub fn distance(&self, x: &Vertex, y: &Vertex) -> usize {
        x.depth() + y.depth() - 2 * x.lcp(y)
    }

    /// The unique geodesic `[x, y]`, endpoints included.
    pub fn geodesic(&self, x: &Vertex, y: &Vertex) -> Vec<Vertex> {
        let l = x.lcp(y);
        let mut out = Vec::with_capacity(self.distance(x, y) + 1);
        for len in (l..=x.depth()).rev() {
            out.push(x.truncated(len));
        }
        for len in l + 1..=y.depth() {
            out.push(y.truncated(len));
        }
        out
    }

    /// Vertex at distance `t` from `x` on `[x, y]`.
    pub fn geodesic_point(&self, x: &Vertex, y: &Vertex, t: usize) -> Vertex {
        let l = x.lcp(y);
        let up = x.depth() - l;
        if t <= up {
            x.truncated(x.depth() - t)
        } else {
            y.truncated(l + (t - up))
        }
    }

    /// Neighbour of `x` on the geodesic towards `y` (`x != y`).
    pub fn towards(&self, x: &Vertex, y: &Vertex) -> Vertex {
        self.geodesic_point(x, y, 1)
    }

    /// All vertices within distance `r` of `center`, in deterministic order.
    pub fn ball(&self, center: &Vertex, r: usize) -> Vec<Vertex> {
        let mut out = vec![center.clone()];
        let mut frontier: Vec<(Vertex, Vertex)> =
            self.neighbours(center).into_iter().map(|n| (n, center.clone())).collect();
        for step in 0..r {
            let mut next = Vec::new();
            for (v, from) in frontier {
                if step + 1 < r {
                    for n in self.neighbours(&v) {
                        if n != from {
                            next.push((n, v.clone()));
                        }
                    }
                }
                out.push(v);
            }
            frontier = next;
        }
        out
    }

    /// Vertices at distance exactly `r` from `center`.
    pub fn sphere(&self, center: &Vertex, r: usize) -> Vec<Vertex> {
        self.ball(center, r).into_iter().filter(|w| self.distance(w, center) == r).collect()
    }

    /// Outer boundary of `ball(y, k)`: the sphere of radius `k + 1`.
    pub fn boundary(&self, y: &Vertex, k: usize) -> Vec<Vertex> {
        self.sphere(y, k + 1)
    }

    pub fn in_ball(&self, w: &Vertex, center: &Vertex, r: usize) -> bool {
        self.distance(w, center) <= r
    }

    /// `true` iff `x` lies on the geodesic `[y, w]` (shadow of `x` under `y`).
    pub fn in_shadow(&self, w: &Vertex, x: &Vertex, y: &Vertex) -> Result<bool> {
        if x == y {
            return Err(Error::Argument("shadow needs x != y".into()));
        }
        Ok(self.distance(y, x) + self.distance(x, w) == self.distance(y, w))
    }

    /// Colors along the geodesic `[x, y]` (length `d(x,y) + 1`).
    pub fn color_key(&self, x: &Vertex, y: &Vertex) -> Vec<u8> {
        match self {
            Tree::FreeProduct(_) => vec![0; self.distance(x, y) + 1],
            Tree::Colored(c) => {
                // Walk once over the root paths instead of recomputing per vertex.
                let l = x.lcp(y);
                let cx = c.path_colors(x);
                let cy = c.path_colors(y);
                let mut out = Vec::with_capacity(self.distance(x, y) + 1);
                for len in (l..=x.depth()).rev() {
                    out.push(cx[len] as u8);
                }
                for len in l + 1..=y.depth() {
                    out.push(cy[len] as u8);
                }
                out
            }
        }
    }

    /// Γ-invariant label of the configuration `(center; points…)`.
    ///
    /// Free products: translate `center` to `e` and record the words
    /// `center⁻¹·p`. Colored trees: record the color of every geodesic
    /// `[center, p]` and the branching depth of each pair of such geodesics; a
    /// color-preserving isomorphism between finite subtrees always extends to
    /// the whole tree, so this is a complete invariant.
    pub fn orbit_key(&self, center: &Vertex, points: &[&Vertex]) -> Vec<u8> {
        match self {
            Tree::FreeProduct(f) => {
                let inv = f.inverse(center);
                let mut key = Vec::new();
                for p in points {
                    key.extend_from_slice(&f.mul(&inv, p).0);
                    key.push(u8::MAX);
                }
                key
            }
            Tree::Colored(_) => {
                let mut key = vec![self.color(center) as u8];
                let dists: Vec<usize> = points.iter().map(|p| self.distance(center, p)).collect();
                for (p, &dp) in points.iter().zip(&dists) {
                    key.push(dp as u8);
                    key.extend(self.color_key(center, p));
                }
                key.push(u8::MAX);
                for i in 0..points.len() {
                    for j in i + 1..points.len() {
                        let dij = self.distance(points[i], points[j]);
                        key.push(((dists[i] + dists[j] - dij) / 2) as u8);
                    }
                }
                key
            }
        }
    }

    /// One vertex per Γ-orbit of vertices.
    pub fn representative_centers(&self) -> Vec<Vertex> {
        match self {
            Tree::FreeProduct(_) => vec![Vertex::root()],
            Tree::Colored(c) => {
                let n = c.color_count();
                let mut found: Vec<Option<Vertex>> = vec![None; n];
                let mut frontier = vec![Vertex::root()];
                while found.iter().any(|f| f.is_none()) {
                    let mut next = Vec::new();
                    for v in frontier {
                        let col = c.color(&v);
                        if found[col].is_none() {
                            found[col] = Some(v.clone());
                        }
                        next.extend(self.children(&v));
                    }
                    frontier = next;
                }
                found.into_iter().map(|v| v.unwrap()).collect()
            }
        }
    }

    /// Number of vertex orbits.
    pub fn orbit_count(&self) -> usize {
        self.representative_centers().len()
    }

    /// Representative center with the same orbit as `v`.
    pub fn center_of(&self, v: &Vertex) -> Vertex {
        match self {
            Tree::FreeProduct(_) => Vertex::root(),
            Tree::Colored(_) => {
                let col = self.color(v);
                self.representative_centers()
                    .into_iter()
                    .find(|c| self.color(c) == col)
                    .expect("every color has a representative")
            }
        }
    }

    /// Number of letter/slot symbols, used to bound path encodings.
    pub fn max_valence(&self) -> usize {
        match self {
            Tree::FreeProduct(f) => f.letter_count(),
            Tree::Colored(c) => c.spec.neighbours.iter().map(|l| l.len()).max().unwrap_or(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_cubed() -> Tree {
        Tree::free_product(FreeProductSpec { factors: vec![2, 2, 2], names: vec!["a".into(), "b".into(), "c".into()] })
            .unwrap()
    }

    #[test]
    fn reduce_examples() {
        let t = z2_cubed();
        assert!(t.reduce("a a").unwrap().is_root());
        assert_eq!(t.format_vertex(&t.reduce("a b").unwrap()), "ab");
        assert_eq!(t.format_vertex(&t.reduce("a c c b").unwrap()), "ab");
        assert!(t.reduce("a x").is_err());
    }

    #[test]
    fn distance_and_geodesic() {
        let t = z2_cubed();
        let e = Vertex::root();
        let a = t.reduce("a").unwrap();
        let ca = t.reduce("ca").unwrap();
        assert_eq!(t.distance(&e, &e), 0);
        assert_eq!(t.distance(&e, &t.reduce("ab").unwrap()), 2);
        assert_eq!(t.distance(&a, &ca), 3);
        let g: Vec<String> = t.geodesic(&a, &ca).iter().map(|v| t.format_vertex(v)).collect();
        assert_eq!(g, ["a", "e", "c", "ca"]);
    }

    #[test]
    fn ball_counts() {
        let t = z2_cubed();
        let e = Vertex::root();
        assert_eq!(t.ball(&e, 0).len(), 1);
        assert_eq!(t.ball(&e, 1).len(), 4);
        assert_eq!(t.boundary(&e, 1).len(), 6);
    }

    #[test]
    fn z3_factor_rejected() {
        let r = Tree::free_product(FreeProductSpec { factors: vec![3, 2], names: vec!["a".into(), "b".into()] });
        assert!(r.is_err());
    }

    #[test]
    fn colored_tree_basics() {
        let t = Tree::colored(ColoredTreeSpec {
            colors: vec!["al".into(), "be".into(), "ga".into(), "de".into()],
            neighbours: vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]],
            root_color: 0,
        })
        .unwrap();
        let e = Vertex::root();
        assert_eq!(t.ball(&e, 3).len(), 22);
        for v in t.ball(&e, 3) {
            assert_eq!(t.parse_vertex(&t.format_vertex(&v)).unwrap(), v);
            assert_eq!(t.neighbours(&v).len(), 3);
        }
        assert_eq!(t.representative_centers().len(), 4);
    }

    #[test]
    fn asymmetric_rule_rejected() {
        let r = Tree::colored(ColoredTreeSpec {
            colors: vec!["x".into(), "y".into()],
            neighbours: vec![vec![0, 0, 1], vec![1, 1, 1]],
            root_color: 0,
        });
        assert!(r.is_err());
    }
}
