//! Rooted colored r-neighborhoods and their canonical encoding.
//!
//! A [`BallCode`] is the byte string
//!
//! ```text
//! r: u8 | k: u32 LE | n: u16 LE | root: u16 LE (always 0)
//! | degree per vertex: u8 × n | upper-triangle adjacency, packed MSB first
//! | color per vertex: u32 LE × n
//! ```
//!
//! with vertices in canonical order. Two balls share a code exactly when
//! they are isomorphic as rooted colored graphs.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::canon::{canonical_order, packed_adjacency, AdjMatrix};
use crate::error::{Error, Result};
use crate::graph::{BoundedGraph, VertexColoring};

/// Upper limit on candidates generated by [`enumerate_balls`].
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallCode(Vec<u8>);

impl BallCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        hex::decode(s)
            .map(BallCode)
            .map_err(|e| Error::Invalid(format!("bad ball code hex: {e}")))
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        BallCode(bytes)
    }
}

impl fmt::Debug for BallCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BallCode({})", self.to_hex())
    }
}

impl fmt::Display for BallCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for BallCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for BallCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BallCode::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// A rooted colored graph of bounded radius in canonical vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedBall {
    radius: usize,
    k: u32,
    adjacency: Vec<Vec<usize>>,
    colors: Vec<u32>,
    code: BallCode,
}

impl RootedBall {
    /// Canonicalizes arbitrary rooted colored graph data.
    pub fn from_parts(
        radius: usize,
        k: u32,
        adjacency: Vec<Vec<usize>>,
        colors: Vec<u32>,
        root: usize,
    ) -> Result<Self> {
        let n = adjacency.len();
        if colors.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: colors.len(),
            });
        }
        if root >= n {
            return Err(Error::VertexOutOfRange { vertex: root, n });
        }
        if let Some((vertex, &color)) = colors.iter().enumerate().find(|(_, &c)| c == 0 || c > k) {
            return Err(Error::InvalidColor { vertex, color, k });
        }
        for (u, list) in adjacency.iter().enumerate() {
            for &v in list {
                if v >= n || v == u || !adjacency[v].contains(&u) {
                    return Err(Error::Invalid(format!("bad adjacency at {u}->{v}")));
                }
            }
        }
        let dist = local_distances(&adjacency, root);
        if let Some((vertex, &distance)) = dist.iter().enumerate().find(|(_, &d)| d > radius) {
            return Err(Error::RadiusExceeded {
                vertex,
                distance,
                radius,
            });
        }
        Ok(canonicalize(radius, k, &adjacency, &dist, |v| colors[v]))
    }

    /// Inverse of [`RootedBall::code`].
    pub fn decode(code: &BallCode) -> Result<Self> {
        let b = code.as_bytes();
        let bad = || Error::Invalid("truncated ball code".into());
        if b.len() < 9 {
            return Err(bad());
        }
        let radius = b[0] as usize;
        let k = u32::from_le_bytes(b[1..5].try_into().unwrap());
        let n = u16::from_le_bytes(b[5..7].try_into().unwrap()) as usize;
        let adj_bytes = (n * n.saturating_sub(1) / 2).div_ceil(8);
        let expected = 9 + n + adj_bytes + 4 * n;
        if b.len() != expected {
            return Err(bad());
        }
        let mut adjacency = vec![Vec::new(); n];
        let bits = &b[9 + n..9 + n + adj_bytes];
        let mut i_bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if bits[i_bit / 8] & (0x80 >> (i_bit % 8)) != 0 {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
                i_bit += 1;
            }
        }
        let colors = b[9 + n + adj_bytes..]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::from_parts(radius, k, adjacency, colors, 0)
    }

    pub fn code(&self) -> &BallCode {
        &self.code
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// The root always sits at canonical position 0.
    pub fn root(&self) -> usize {
        0
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn distances(&self) -> Vec<usize> {
        local_distances(&self.adjacency, 0)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// The same ball with every color replaced by 1 (`k = 1`).
    pub fn erase_colors(&self) -> RootedBall {
        let dist = self.distances();
        canonicalize(self.radius, 1, &self.adjacency, &dist, |_| 1)
    }
}

fn local_distances(adjacency: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adjacency.len()];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in &adjacency[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn canonicalize(
    radius: usize,
    k: u32,
    adjacency: &[Vec<usize>],
    dist: &[usize],
    color: impl Fn(usize) -> u32,
) -> RootedBall {
    let n = adjacency.len();
    let keys: Vec<(usize, u32, usize)> = (0..n)
        .map(|v| (dist[v], color(v), adjacency[v].len()))
        .collect();
    let order = canonical_order(adjacency, &keys);
    let mut position = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    let mut code = Vec::with_capacity(9 + 5 * n + n * n / 16);
    code.push(radius as u8);
    code.extend_from_slice(&k.to_le_bytes());
    code.extend_from_slice(&(n as u16).to_le_bytes());
    code.extend_from_slice(&0u16.to_le_bytes());
    code.extend(order.iter().map(|&v| adjacency[v].len() as u8));
    code.extend(packed_adjacency(&AdjMatrix::new(adjacency), &order));
    let colors: Vec<u32> = order.iter().map(|&v| color(v)).collect();
    for c in &colors {
        code.extend_from_slice(&c.to_le_bytes());
    }
    let canonical_adjacency = order
        .iter()
        .map(|&v| {
            let mut l: Vec<usize> = adjacency[v].iter().map(|&w| position[w]).collect();
            l.sort_unstable();
            l
        })
        .collect();
    RootedBall {
        radius,
        k,
        adjacency: canonical_adjacency,
        colors,
        code: BallCode(code),
    }
}

/// The uncolored structure of `N_{G,r}(v)`, reusable across colorings.
#[derive(Debug, Clone)]
pub struct BallTemplate {
    radius: usize,
    vertices: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    dist: Vec<usize>,
}

impl BallTemplate {
    pub fn new(g: &BoundedGraph, v: usize, radius: usize) -> Self {
        let vertices = g.ball_vertices(v, radius);
        let local = |w: usize| vertices.iter().position(|&x| x == w);
        let adjacency: Vec<Vec<usize>> = vertices
            .iter()
            .map(|&u| g.neighbors(u).iter().filter_map(|&w| local(w)).collect())
            .collect();
        let dist = local_distances(&adjacency, 0);
        Self {
            radius,
            vertices,
            adjacency,
            dist,
        }
    }

    /// Graph vertices in the ball, root first.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn local_adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn local_distances(&self) -> &[usize] {
        &self.dist
    }

    /// Canonical ball with colors looked up by graph vertex.
    pub fn ball_with(&self, k: u32, color: impl Fn(usize) -> u32) -> RootedBall {
        canonicalize(self.radius, k, &self.adjacency, &self.dist, |i| {
            color(self.vertices[i])
        })
    }

    /// Canonical ball with colors given per local index.
    pub fn ball_with_local(&self, k: u32, color: impl Fn(usize) -> u32) -> RootedBall {
        canonicalize(self.radius, k, &self.adjacency, &self.dist, color)
    }
}

/// `N_{G,r}(v)` with the colors of `c` (or the single color 1), canonicalized.
pub fn extract_ball(
    g: &BoundedGraph,
    v: usize,
    r: usize,
    c: Option<&VertexColoring>,
) -> Result<RootedBall> {
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    if let Some(c) = c {
        c.check_len(g.n())?;
    }
    let template = BallTemplate::new(g, v, r);
    Ok(match c {
        Some(c) => template.ball_with(c.k(), |w| c.get(w)),
        None => template.ball_with(1, |_| 1),
    })
}

/// Code of a rooted colored graph given in any vertex order.
pub fn canonical_code(
    radius: usize,
    k: u32,
    adjacency: Vec<Vec<usize>>,
    colors: Vec<u32>,
    root: usize,
) -> Result<BallCode> {
    RootedBall::from_parts(radius, k, adjacency, colors, root).map(|b| b.code)
}

/// Every isomorphism class of rooted `k`-colored graphs with radius at most
/// `r`, degrees at most `d` and at most `max_size` vertices, sorted by code.
pub fn enumerate_balls(r: usize, d: usize, k: u32, max_size: usize) -> Result<Vec<RootedBall>> {
    enumerate_balls_within(r, d, k, max_size, ENUMERATION_BUDGET)
}

/// [`enumerate_balls`] with an explicit candidate budget. Each layer's
/// candidates are counted before any of them is canonicalized.
pub fn enumerate_balls_within(
    r: usize,
    d: usize,
    k: u32,
    max_size: usize,
    budget: u64,
) -> Result<Vec<RootedBall>> {
    let mut candidates = 0u64;
    let mut spend = |amount: u64| -> Result<()> {
        candidates += amount;
        if candidates >= budget {
            Err(Error::BudgetExceeded(format!(
                "ball enumeration needs at least {candidates} candidates"
            )))
        } else {
            Ok(())
        }
    };
    let mut all: BTreeMap<BallCode, RootedBall> = BTreeMap::new();
    if max_size == 0 {
        return Ok(Vec::new());
    }
    let mut layer: BTreeMap<BallCode, RootedBall> = BTreeMap::new();
    spend(u64::from(k))?;
    for color in 1..=k {
        let b = canonicalize(r, k, &[Vec::new()], &[0], |_| color);
        layer.insert(b.code.clone(), b);
    }
    for _size in 1..max_size {
        let mut next: BTreeMap<BallCode, RootedBall> = BTreeMap::new();
        let mut expansions = Vec::with_capacity(layer.len());
        for ball in layer.values() {
            let open_all: Vec<usize> = (0..ball.vertex_count())
                .filter(|&v| ball.adjacency[v].len() < d)
                .collect();
            let subsets = nonempty_subsets_up_to(&open_all, d);
            spend(subsets.len() as u64 * u64::from(k))?;
            expansions.push(subsets);
        }
        for (ball, subsets) in layer.values().zip(expansions) {
            let n = ball.vertex_count();
            let dist = ball.distances();
            let open: Vec<usize> = (0..n)
                .filter(|&v| ball.adjacency[v].len() < d && dist[v] < r)
                .collect();
            // At least one attachment must be within distance r - 1.
            for subset in subsets {
                if !subset.iter().any(|v| open.contains(v)) {
                    continue;
                }
                let mut adjacency = ball.adjacency.clone();
                for &v in &subset {
                    adjacency[v].push(n);
                }
                adjacency.push(subset);
                let new_dist = local_distances(&adjacency, 0);
                for color in 1..=k {
                    let b = canonicalize(r, k, &adjacency, &new_dist, |v| {
                        if v == n {
                            color
                        } else {
                            ball.colors[v]
                        }
                    });
                    next.entry(b.code.clone()).or_insert(b);
                }
            }
        }
        all.append(&mut layer);
        layer = next;
    }
    all.append(&mut layer);
    Ok(all.into_values().collect())
}

fn nonempty_subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for &x in items {
        let grown: Vec<Vec<usize>> = out
            .iter()
            .filter(|s| s.len() < max)
            .map(|s| {
                let mut t = s.clone();
                t.push(x);
                t
            })
            .collect();
        out.extend(grown);
    }
    out.retain(|s| !s.is_empty());
    out
}
