//! Graphs with boundary masks: gasket pre-fractals and lattice
//! discretisations of Euclidean domains.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::space::{cell_triangle, point_in_polygon, DomainSpec, GasketRegion};
use crate::{Error, Result};

/// Largest gasket level accepted by the builder.
pub const MAX_GASKET_LEVEL: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    Gasket { level: u32 },
    Grid { h: f64, dim: usize },
    Loaded,
}

/// Which vertices of the gasket graph are absorbing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GasketBoundary {
    /// The three outer corners `V_0`.
    #[default]
    Corners,
    /// Every vertex on the bottom edge `y = 0`.
    BottomEdge,
    /// No absorbing vertices (Neumann graph).
    None,
}

/// Undirected weighted graph with a per-vertex boundary flag.
///
/// The generator acts on interior vertices as
/// `(L f)(p) = laplacian_scale · Σ_{q ~ p} c(p,q) (f(p) − f(q))`
/// with `f = 0` on boundary vertices (Dirichlet) or with no boundary at
/// all (Neumann). Every vertex carries the same mass `vertex_mass`.
#[derive(Clone, Debug)]
pub struct Graph {
    pub kind: GraphKind,
    pub bc: BoundaryCondition,
    pub laplacian_scale: f64,
    pub vertex_mass: f64,
    dim: usize,
    coords: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    boundary: Vec<bool>,
}

impl Graph {
    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn coord_dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of vertex `v` (empty for graphs loaded from edge lists).
    pub fn position(&self, v: usize) -> &[f64] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.boundary[v]).collect()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| !self.boundary[v]).collect()
    }

    /// Vertex closest to `p` in the embedding.
    pub fn nearest_vertex(&self, p: &[f64]) -> Option<usize> {
        if self.dim == 0 || p.len() != self.dim {
            return None;
        }
        (0..self.n()).min_by(|&a, &b| {
            let da: f64 = self.position(a).iter().zip(p).map(|(x, y)| (x - y) * (x - y)).sum();
            let db: f64 = self.position(b).iter().zip(p).map(|(x, y)| (x - y) * (x - y)).sum();
            da.total_cmp(&db)
        })
    }

    /// Replaces the boundary mask. An empty mask turns the graph into a
    /// Neumann graph.
    pub fn with_boundary(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.n() {
            return Err(Error::Precondition(format!(
                "boundary mask has {} entries for {} vertices",
                mask.len(),
                self.n()
            )));
        }
        self.bc = if mask.iter().any(|&b| b) {
            BoundaryCondition::Dirichlet
        } else {
            BoundaryCondition::Neumann
        };
        self.boundary = mask;
        Ok(self)
    }

    /// Vertices of a Neumann graph that miss at least one lattice neighbour
    /// (grids) or lie on the outer triangle (gasket).
    pub fn rim_vertices(&self) -> Vec<usize> {
        match self.kind {
            GraphKind::Grid { dim, .. } => (0..self.n()).filter(|&v| self.degree(v) < 2 * dim).collect(),
            _ => (0..self.n()).filter(|&v| self.degree(v) < 4).collect(),
        }
    }

    /// Induced Dirichlet problem on `interior`: keeps the interior vertices,
    /// their neighbours as boundary, and every edge touching the interior.
    /// Returns the new graph and the map new index → old index.
    pub fn restrict(&self, interior: &[bool]) -> Result<(Graph, Vec<usize>)> {
        let n = self.n();
        let mut keep = vec![false; n];
        for v in 0..n {
            if interior[v] {
                keep[v] = true;
                for &(w, _) in &self.adjacency[v] {
                    keep[w] = true;
                }
            }
        }
        let old: Vec<usize> = (0..n).filter(|&v| keep[v]).collect();
        if old.is_empty() {
            return Err(Error::Precondition("restriction has no interior vertices".into()));
        }
        let mut new_index = vec![usize::MAX; n];
        for (i, &v) in old.iter().enumerate() {
            new_index[v] = i;
        }
        let mut adjacency = vec![Vec::new(); old.len()];
        for (i, &v) in old.iter().enumerate() {
            for &(w, c) in &self.adjacency[v] {
                if keep[w] && (interior[v] || interior[w]) {
                    adjacency[i].push((new_index[w], c));
                }
            }
        }
        let boundary: Vec<bool> = old.iter().map(|&v| !interior[v]).collect();
        let mut coords = Vec::with_capacity(old.len() * self.dim);
        for &v in &old {
            coords.extend_from_slice(self.position(v));
        }
        let bc = if boundary.iter().any(|&b| b) {
            BoundaryCondition::Dirichlet
        } else {
            BoundaryCondition::Neumann
        };
        Ok((
            Graph {
                kind: self.kind,
                bc,
                laplacian_scale: self.laplacian_scale,
                vertex_mass: self.vertex_mass,
                dim: self.dim,
                coords,
                adjacency,
                boundary,
            },
            old,
        ))
    }

    /// Writes the edge-list exchange format:
    ///
    /// ```text
    /// exitlab-graph v1
    /// <n> <edges> <laplacian_scale>
    /// <u> <v> <w>            (one line per edge, u < v)
    /// boundary <k> <i_1> ... <i_k>
    /// ```
    pub fn write_edge_list(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "exitlab-graph v1")?;
        writeln!(out, "{} {} {}", self.n(), self.edge_count(), self.laplacian_scale)?;
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            for &(v, w) in nbrs {
                if u < v {
                    writeln!(out, "{u} {v} {w}")?;
                }
            }
        }
        let b = self.boundary_vertices();
        write!(out, "boundary {}", b.len())?;
        for v in b {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
        Ok(())
    }

    /// Reads the format produced by [`Graph::write_edge_list`]. Vertex
    /// coordinates are not part of the format.
    pub fn read_edge_list(input: impl BufRead) -> Result<Graph> {
        let mut lines = input.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Format(format!("unexpected end of edge list, expected {what}")))?
                .map_err(Error::from)
        };
        let header = next("header")?;
        if header.trim() != "exitlab-graph v1" {
            return Err(Error::Format(format!("unknown graph header {header:?}")));
        }
        let sizes = next("sizes")?;
        let parts: Vec<&str> = sizes.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Format(format!("bad size line {sizes:?}")));
        }
        let parse_err = |s: &str| Error::Format(format!("cannot parse {s:?}"));
        let n: usize = parts[0].parse().map_err(|_| parse_err(parts[0]))?;
        let m: usize = parts[1].parse().map_err(|_| parse_err(parts[1]))?;
        let scale: f64 = parts[2].parse().map_err(|_| parse_err(parts[2]))?;
        let mut adjacency = vec![Vec::new(); n];
        for _ in 0..m {
            let line = next("edge")?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::Format(format!("bad edge line {line:?}")));
            }
            let u: usize = f[0].parse().map_err(|_| parse_err(f[0]))?;
            let v: usize = f[1].parse().map_err(|_| parse_err(f[1]))?;
            let w: f64 = f[2].parse().map_err(|_| parse_err(f[2]))?;
            if u >= n || v >= n {
                return Err(Error::Format(format!("edge {u}-{v} out of range")));
            }
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        let line = next("boundary")?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 2 || f[0] != "boundary" {
            return Err(Error::Format(format!("bad boundary line {line:?}")));
        }
        let k: usize = f[1].parse().map_err(|_| parse_err(f[1]))?;
        if f.len() != k + 2 {
            return Err(Error::Format("boundary count does not match entries".into()));
        }
        let mut boundary = vec![false; n];
        for s in &f[2..] {
            let v: usize = s.parse().map_err(|_| parse_err(s))?;
            if v >= n {
                return Err(Error::Format(format!("boundary vertex {v} out of range")));
            }
            boundary[v] = true;
        }
        Ok(Graph {
            kind: GraphKind::Loaded,
            bc: if k > 0 {
                BoundaryCondition::Dirichlet
            } else {
                BoundaryCondition::Neumann
            },
            laplacian_scale: scale,
            vertex_mass: 1.0,
            dim: 0,
            coords: Vec::new(),
            adjacency,
            boundary,
        })
    }

    /// Adjacency lists in a comparable form (sorted).
    pub fn sorted_adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        self.adjacency
            .iter()
            .map(|a| {
                let mut a = a.clone();
                a.sort_by(|x, y| x.0.cmp(&y.0));
                a
            })
            .collect()
    }

    /// Connected components of the interior, each flagged by whether it
    /// touches a boundary vertex.
    pub(crate) fn interior_components(&self) -> Vec<(Vec<usize>, bool)> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || self.boundary[s] {
                continue;
            }
            let mut comp = vec![s];
            let mut touches = false;
            seen[s] = true;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &(w, _) in &self.adjacency[v] {
                    if self.boundary[w] {
                        touches = true;
                    } else if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            out.push((comp, touches));
        }
        out
    }
}

/// Level-`m` gasket graph `V_m` on the unit triangle with the three outer
/// corners as boundary and `laplacian_scale = 5^m`.
pub fn build_gasket_graph(m: u32) -> Result<Graph> {
    build_gasket_graph_with(m, GasketBoundary::Corners)
}

pub fn build_gasket_graph_with(m: u32, boundary: GasketBoundary) -> Result<Graph> {
    if m > MAX_GASKET_LEVEL {
        return Err(Error::Precondition(format!(
            "gasket level {m} exceeds the memory guard {MAX_GASKET_LEVEL}"
        )));
    }
    let size: i64 = 1 << m;
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut lattice: Vec<(i64, i64)> = Vec::new();
    let mut adjacency: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut id_of = |p: (i64, i64), lattice: &mut Vec<(i64, i64)>, adjacency: &mut Vec<Vec<(usize, f64)>>| {
        *ids.entry(p).or_insert_with(|| {
            lattice.push(p);
            adjacency.push(Vec::new());
            lattice.len() - 1
        })
    };
    // corners first so that V_0 = {0, 1, 2}
    let corners = [(0, 0), (size, 0), (0, size)];
    for c in corners {
        id_of(c, &mut lattice, &mut adjacency);
    }
    // iterative subdivision: lattice coordinates (i, j) ↦ i·e1 + j·e2
    let mut stack = vec![(corners[0], corners[1], corners[2], size)];
    while let Some((a, b, c, s)) = stack.pop() {
        if s == 1 {
            let ia = id_of(a, &mut lattice, &mut adjacency);
            let ib = id_of(b, &mut lattice, &mut adjacency);
            let ic = id_of(c, &mut lattice, &mut adjacency);
            for (u, v) in [(ia, ib), (ib, ic), (ia, ic)] {
                adjacency[u].push((v, 1.0));
                adjacency[v].push((u, 1.0));
            }
            continue;
        }
        let mid = |p: (i64, i64), q: (i64, i64)| ((p.0 + q.0) / 2, (p.1 + q.1) / 2);
        let (ab, bc, ac) = (mid(a, b), mid(b, c), mid(a, c));
        let h = s / 2;
        // push in reverse so that the bottom-left cell is processed first
        stack.push((ac, bc, c, h));
        stack.push((ab, b, bc, h));
        stack.push((a, ab, ac, h));
    }
    let scale = 1.0 / size as f64;
    let half_sqrt3 = 3f64.sqrt() / 2.0;
    let mut coords = Vec::with_capacity(lattice.len() * 2);
    for &(i, j) in &lattice {
        coords.push((i as f64 + 0.5 * j as f64) * scale);
        coords.push(j as f64 * half_sqrt3 * scale);
    }
    let n = lattice.len();
    let mask: Vec<bool> = match boundary {
        GasketBoundary::Corners => (0..n).map(|v| v < 3).collect(),
        GasketBoundary::BottomEdge => lattice.iter().map(|&(_, j)| j == 0).collect(),
        GasketBoundary::None => vec![false; n],
    };
    let bc = if mask.iter().any(|&b| b) {
        BoundaryCondition::Dirichlet
    } else {
        BoundaryCondition::Neumann
    };
    Ok(Graph {
        kind: GraphKind::Gasket { level: m },
        bc,
        laplacian_scale: 5f64.powi(m as i32),
        vertex_mass: 1.0,
        dim: 2,
        coords,
        adjacency,
        boundary: mask,
    })
}

/// Dirichlet graph of a gasket region at level `m`.
///
/// `Whole` keeps the corner boundary; `Ball` takes the vertices within the
/// ball that are connected to the vertex nearest its center (outer corners
/// reflect); `Cell` takes the closed cell minus its three corners.
/// Returns the graph and the index of the vertex nearest the region's
/// reference point (ball center, cell barycenter, or gasket barycenter).
pub fn build_gasket_domain(m: u32, region: &GasketRegion) -> Result<(Graph, usize)> {
    match region {
        GasketRegion::Whole => {
            let g = build_gasket_graph(m)?;
            let c = g
                .nearest_vertex(&[0.5, 0.25])
                .expect("gasket graph has vertices");
            Ok((g, c))
        }
        GasketRegion::Ball { center, radius } => {
            let full = build_gasket_graph_with(m, GasketBoundary::None)?;
            let c = full.nearest_vertex(center).expect("gasket graph has vertices");
            // open ball; vertices on the sphere up to round-off stay outside
            let r2 = radius * radius * (1.0 - 1e-12);
            let inside = |v: usize| {
                let p = full.position(v);
                (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2) < r2
            };
            if !inside(c) {
                return Err(Error::Precondition(format!(
                    "no gasket vertex of level {m} inside ball of radius {radius}"
                )));
            }
            let mut interior = vec![false; full.n()];
            interior[c] = true;
            let mut queue = vec![c];
            while let Some(v) = queue.pop() {
                for &(w, _) in full.neighbors(v) {
                    if !interior[w] && inside(w) {
                        interior[w] = true;
                        queue.push(w);
                    }
                }
            }
            let (g, old) = full.restrict(&interior)?;
            let ci = old.iter().position(|&v| v == c).expect("center kept");
            Ok((g, ci))
        }
        GasketRegion::Cell { address } => {
            if address.len() as u32 >= m.max(1) || address.iter().any(|&d| d > 2) {
                return Err(Error::Precondition(format!(
                    "cell address {address:?} invalid at level {m}"
                )));
            }
            let full = build_gasket_graph_with(m, GasketBoundary::None)?;
            let tri = cell_triangle(address);
            let tol = 1e-9 / (1u64 << m) as f64;
            let is_corner = |p: &[f64]| tri.iter().any(|c| (c[0] - p[0]).abs() < tol && (c[1] - p[1]).abs() < tol);
            let in_cell = |p: &[f64]| {
                point_in_polygon(&tri, p[0], p[1]) || on_segment_any(&tri, p, tol)
            };
            let interior: Vec<bool> = (0..full.n())
                .map(|v| {
                    let p = full.position(v);
                    in_cell(p) && !is_corner(p)
                })
                .collect();
            let (g, _) = full.restrict(&interior)?;
            let bary = [
                (tri[0][0] + tri[1][0] + tri[2][0]) / 3.0,
                (tri[0][1] + tri[1][1] + tri[2][1]) / 3.0,
            ];
            let c = g.nearest_vertex(&bary).expect("cell has vertices");
            Ok((g, c))
        }
    }
}

fn on_segment_any(tri: &[[f64; 2]; 3], p: &[f64], tol: f64) -> bool {
    (0..3).any(|i| {
        let a = tri[i];
        let b = tri[(i + 1) % 3];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
        let (ex, ey) = (a[0] + t * dx - p[0], a[1] + t * dy - p[1]);
        (ex * ex + ey * ey).sqrt() < tol
    })
}

/// Finite-difference graph of a Euclidean domain of dimension 1 or 2.
///
/// Dirichlet grids are vertex-centred: lattice nodes strictly inside the
/// domain are interior, their outside lattice neighbours are boundary. The
/// lattice is anchored at the ball center or the lower bounding-box corner.
/// Neumann grids are cell-centred: a node is kept iff its cell center lies
/// in the domain, and a missing neighbour contributes no flux (mirror
/// closure), so constants span the kernel. `laplacian_scale = σ²/(2h²)`,
/// vertex mass `h^d`.
pub fn build_grid_graph(
    domain: &DomainSpec,
    h: f64,
    bc: BoundaryCondition,
    generator_scale: f64,
) -> Result<Graph> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Precondition(format!("mesh width must be positive, got {h}")));
    }
    let (lo, hi) = domain.bounding_box().ok_or_else(|| {
        Error::Precondition(format!("no grid discretisation for {}", domain.label()))
    })?;
    let dim = lo.len();
    if dim > 2 {
        return Err(Error::Precondition("grids are limited to d <= 2".into()));
    }
    let anchor: Vec<f64> = match domain {
        DomainSpec::EuclideanBall { center, .. } => center.clone(),
        _ => lo.clone(),
    };
    let offset = match bc {
        BoundaryCondition::Dirichlet => 0.0,
        BoundaryCondition::Neumann => 0.5,
    };
    let inside = |p: &[f64]| {
        domain.contains(p)
            && domain
                .boundary_distance(p)
                .map_or(true, |d| d > 1e-9 * h)
    };
    // lattice index range per axis, padded by one layer for boundary nodes
    let mut start = [0i64; 2];
    let mut len = [1usize; 2];
    for k in 0..dim {
        let a = ((lo[k] - anchor[k]) / h - offset).floor() as i64 - 1;
        let b = ((hi[k] - anchor[k]) / h - offset).ceil() as i64 + 1;
        start[k] = a;
        len[k] = (b - a + 1) as usize;
    }
    let total = len[0] * len[1];
    if total > 50_000_000 {
        return Err(Error::TooLarge(format!("grid with {total} lattice nodes")));
    }
    let pos = |flat: usize| -> Vec<f64> {
        let idx = [flat % len[0], flat / len[0]];
        (0..dim)
            .map(|k| anchor[k] + ((start[k] + idx[k] as i64) as f64 + offset) * h)
            .collect()
    };
    let neighbors_of = |flat: usize| -> Vec<usize> {
        let idx = [flat % len[0], flat / len[0]];
        let mut out = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            if idx[k] > 0 {
                out.push(if k == 0 { flat - 1 } else { flat - len[0] });
            }
            if idx[k] + 1 < len[k] {
                out.push(if k == 0 { flat + 1 } else { flat + len[0] });
            }
        }
        out
    };
    let mut is_interior: Vec<bool> = (0..total).map(|f| inside(&pos(f))).collect();
    if bc == BoundaryCondition::Neumann {
        // cells touching the rest only at a corner would add spurious
        // zero modes; keep the largest lattice-connected piece
        let mut label = vec![usize::MAX; total];
        let mut best = (0usize, 0usize);
        for s in 0..total {
            if !is_interior[s] || label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            let mut stack = vec![s];
            let mut size = 0;
            while let Some(f) = stack.pop() {
                size += 1;
                for w in neighbors_of(f) {
                    if is_interior[w] && label[w] == usize::MAX {
                        label[w] = s;
                        stack.push(w);
                    }
                }
            }
            if size > best.1 {
                best = (s, size);
            }
        }
        for f in 0..total {
            is_interior[f] = is_interior[f] && label[f] == best.0;
        }
    }
    let n_interior = is_interior.iter().filter(|&&b| b).count();
    if n_interior < 3 {
        return Err(Error::Precondition(format!(
            "degenerate mesh: h = {h} leaves {n_interior} interior nodes"
        )));
    }
    let mut id = vec![usize::MAX; total];
    let mut order = Vec::new();
    for f in 0..total {
        if is_interior[f] {
            id[f] = order.len();
            order.push(f);
        }
    }
    let mut boundary_flags = vec![false; order.len()];
    if bc == BoundaryCondition::Dirichlet {
        for i in 0..n_interior {
            for w in neighbors_of(order[i]) {
                if id[w] == usize::MAX {
                    id[w] = order.len();
                    order.push(w);
                    boundary_flags.push(true);
                }
            }
        }
    }
    let mut adjacency = vec![Vec::new(); order.len()];
    let mut coords = Vec::with_capacity(order.len() * dim);
    for (i, &f) in order.iter().enumerate() {
        coords.extend(pos(f));
        if i < n_interior {
            for w in neighbors_of(f) {
                let j = id[w];
                if j != usize::MAX {
                    adjacency[i].push((j, 1.0));
                    if j >= n_interior {
                        adjacency[j].push((i, 1.0));
                    }
                }
            }
        }
    }
    Ok(Graph {
        kind: GraphKind::Grid { h, dim },
        bc,
        laplacian_scale: generator_scale / (2.0 * h * h),
        vertex_mass: h.powi(dim as i32),
        dim,
        coords,
        adjacency,
        boundary: boundary_flags,
    })
}
