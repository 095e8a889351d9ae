//! Uniform square meshes of the unit square and the L-shape, plus global
//! DOF numbering for a given element family and order.
//!
//! Vertices live on an integer lattice with spacing `h = 1/N`. Every
//! element is the image of the reference square under a translation and a
//! uniform scaling, so a shared edge is traversed in the same direction by
//! both neighbours and edge derivative DOFs never change sign.
//!
//! Global numbering: all vertex DOFs, then edge DOFs grouped by edge and
//! ordered by derivative order `k`, then interior DOFs grouped by element.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::basis2d::{classify_slot, Basis2dError, Corner, DofKind, Family, Side, Slot};
use crate::polynomial::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    /// `[0, 1]^2`
    UnitSquare,
    /// `[0, 2]^2` minus `(1, 2]^2`
    LShape,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::UnitSquare => "square",
            Domain::LShape => "lshape",
        }
    }

    fn contains_cell(self, n: i64, a: i64, b: i64) -> bool {
        match self {
            Domain::UnitSquare => (0..n).contains(&a) && (0..n).contains(&b),
            Domain::LShape => {
                (0..2 * n).contains(&a) && (0..2 * n).contains(&b) && !(a >= n && b >= n)
            }
        }
    }

    fn cell_extent(self, n: i64) -> i64 {
        match self {
            Domain::UnitSquare => n,
            Domain::LShape => 2 * n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// Edge from `start` to `end`, oriented left to right or bottom to top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub start: usize,
    pub end: usize,
    pub axis: Axis,
}

/// Square cell; arrays are indexed by [`Corner`] and [`Side`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    /// South-west, south-east, north-west, north-east.
    pub vertices: [usize; 4],
    /// Bottom, top, left, right.
    pub edges: [usize; 4],
    /// Lattice position of the south-west corner.
    pub origin: (i64, i64),
}

impl Element {
    pub fn vertex(&self, corner: Corner) -> usize {
        self.vertices[corner as usize]
    }

    pub fn edge(&self, side: Side) -> usize {
        self.edges[side as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mesh {
    domain: Domain,
    n: usize,
    lattice: Vec<(i64, i64)>,
    edges: Vec<Edge>,
    elements: Vec<Element>,
    boundary_vertex: Vec<bool>,
    boundary_edge: Vec<bool>,
}

pub fn build_mesh(domain: Domain, n: usize) -> Mesh {
    assert!(n >= 1, "mesh resolution must be at least 1");
    let ni = n as i64;
    let extent = domain.cell_extent(ni);
    let cells: Vec<(i64, i64)> = (0..extent)
        .flat_map(|b| (0..extent).map(move |a| (a, b)))
        .filter(|&(a, b)| domain.contains_cell(ni, a, b))
        .collect();

    let points: BTreeSet<(i64, i64)> = cells
        .iter()
        .flat_map(|&(a, b)| [(b, a), (b, a + 1), (b + 1, a), (b + 1, a + 1)])
        .collect();
    let lattice: Vec<(i64, i64)> = points.into_iter().map(|(b, a)| (a, b)).collect();
    let vertex_of: HashMap<(i64, i64), usize> =
        lattice.iter().enumerate().map(|(k, &pt)| (pt, k)).collect();

    let mut edge_keys: BTreeSet<(Axis, i64, i64)> = BTreeSet::new();
    for &(a, b) in &cells {
        edge_keys.insert((Axis::Horizontal, b, a));
        edge_keys.insert((Axis::Horizontal, b + 1, a));
        edge_keys.insert((Axis::Vertical, a, b));
        edge_keys.insert((Axis::Vertical, a + 1, b));
    }
    let mut edges = Vec::with_capacity(edge_keys.len());
    let mut edge_of = HashMap::new();
    for (k, &(axis, u, v)) in edge_keys.iter().enumerate() {
        let (start, end) = match axis {
            Axis::Horizontal => ((v, u), (v + 1, u)),
            Axis::Vertical => ((u, v), (u, v + 1)),
        };
        edges.push(Edge {
            start: vertex_of[&start],
            end: vertex_of[&end],
            axis,
        });
        edge_of.insert((axis, u, v), k);
    }

    let mut edge_use = vec![0usize; edges.len()];
    let elements: Vec<Element> = cells
        .iter()
        .map(|&(a, b)| {
            let e = [
                edge_of[&(Axis::Horizontal, b, a)],
                edge_of[&(Axis::Horizontal, b + 1, a)],
                edge_of[&(Axis::Vertical, a, b)],
                edge_of[&(Axis::Vertical, a + 1, b)],
            ];
            for &k in &e {
                edge_use[k] += 1;
            }
            Element {
                vertices: [
                    vertex_of[&(a, b)],
                    vertex_of[&(a + 1, b)],
                    vertex_of[&(a, b + 1)],
                    vertex_of[&(a + 1, b + 1)],
                ],
                edges: e,
                origin: (a, b),
            }
        })
        .collect();

    let boundary_edge: Vec<bool> = edge_use.iter().map(|&c| c == 1).collect();
    let mut boundary_vertex = vec![false; lattice.len()];
    for (edge, _) in edges.iter().zip(&boundary_edge).filter(|(_, &b)| b) {
        boundary_vertex[edge.start] = true;
        boundary_vertex[edge.end] = true;
    }

    Mesh {
        domain,
        n,
        lattice,
        edges,
        elements,
        boundary_vertex,
        boundary_edge,
    }
}

impl Mesh {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Elements per unit length.
    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Element side length `1/N`.
    pub fn h(&self) -> Rational {
        Rational::new(1.into(), (self.n as i64).into())
    }

    pub fn num_vertices(&self) -> usize {
        self.lattice.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Lattice coordinates in units of `h`.
    pub fn lattice_point(&self, v: usize) -> (i64, i64) {
        self.lattice[v]
    }

    pub fn vertex_coords(&self, v: usize) -> (f64, f64) {
        let (a, b) = self.lattice[v];
        let h = 1.0 / self.n as f64;
        (a as f64 * h, b as f64 * h)
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    /// Plain-text listing of every entity with coordinates and boundary flags.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# domain {} N {}", self.domain.name(), self.n);
        let _ = writeln!(out, "vertices {}", self.num_vertices());
        for v in 0..self.num_vertices() {
            let (x, y) = self.vertex_coords(v);
            let _ = writeln!(out, "v {v} {x} {y} {}", u8::from(self.boundary_vertex[v]));
        }
        let _ = writeln!(out, "edges {}", self.num_edges());
        for (k, e) in self.edges.iter().enumerate() {
            let axis = match e.axis {
                Axis::Horizontal => "h",
                Axis::Vertical => "v",
            };
            let _ = writeln!(
                out,
                "e {k} {} {} {axis} {}",
                e.start,
                e.end,
                u8::from(self.boundary_edge[k])
            );
        }
        let _ = writeln!(out, "elements {}", self.num_elements());
        for (k, el) in self.elements.iter().enumerate() {
            let [sw, se, nw, ne] = el.vertices;
            let [b, t, l, r] = el.edges;
            let _ = writeln!(out, "q {k} {sw} {se} {nw} {ne} | {b} {t} {l} {r}");
        }
        out
    }
}

/// Closed-form global dimension: vertices + (p-1) edges + interior * elements.
pub fn dimension_formula(mesh: &Mesh, family: Family, p: usize) -> usize {
    mesh.num_vertices() + (p - 1) * mesh.num_edges() + family.interior_dim(p) * mesh.num_elements()
}

/// Global DOF numbering and element incidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    family: Family,
    order: usize,
    slots: Vec<Slot>,
    kinds: Vec<DofKind>,
    total: usize,
    edge_offset: usize,
    interior_offset: usize,
    interior_per_element: usize,
    element_dofs: Vec<Vec<usize>>,
    boundary: Vec<bool>,
}

/// Builds the numbering for the nonzero slots of the `family` basis of order `p`.
pub fn build_dof_map(mesh: &Mesh, family: Family, p: usize) -> Result<DofMap, Basis2dError> {
    let basis = family.basis(p)?;
    Ok(DofMap::from_slots(mesh, family, p, &basis.slots()))
}

impl DofMap {
    /// Numbering for an explicit local slot list (grid order).
    pub fn from_slots(mesh: &Mesh, family: Family, p: usize, slots: &[Slot]) -> Self {
        let kinds: Vec<DofKind> = slots.iter().map(|&s| classify_slot(p, s)).collect();
        let interior_per_element = kinds
            .iter()
            .filter(|k| matches!(k, DofKind::Interior { .. }))
            .count();
        let edge_offset = mesh.num_vertices();
        let interior_offset = edge_offset + (p - 1) * mesh.num_edges();
        let total = interior_offset + interior_per_element * mesh.num_elements();

        let element_dofs: Vec<Vec<usize>> = mesh
            .elements()
            .iter()
            .enumerate()
            .map(|(el_index, el)| {
                let mut interior_seen = 0;
                kinds
                    .iter()
                    .map(|kind| match *kind {
                        DofKind::Vertex(c) => el.vertex(c),
                        DofKind::Edge { side, k } => edge_offset + el.edge(side) * (p - 1) + k,
                        DofKind::Interior { .. } => {
                            let g =
                                interior_offset + el_index * interior_per_element + interior_seen;
                            interior_seen += 1;
                            g
                        }
                    })
                    .collect()
            })
            .collect();

        let mut boundary = vec![false; total];
        for (v, flag) in boundary.iter_mut().enumerate().take(mesh.num_vertices()) {
            *flag = mesh.is_boundary_vertex(v);
        }
        for e in (0..mesh.num_edges()).filter(|&e| mesh.is_boundary_edge(e)) {
            for k in 0..p - 1 {
                boundary[edge_offset + e * (p - 1) + k] = true;
            }
        }

        Self {
            family,
            order: p,
            slots: slots.to_vec(),
            kinds,
            total,
            edge_offset,
            interior_offset,
            interior_per_element,
            element_dofs,
            boundary,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Local slots in the order used by [`DofMap::element_dofs`].
    pub fn local_slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn local_kinds(&self) -> &[DofKind] {
        &self.kinds
    }

    pub fn element_dofs(&self, element: usize) -> &[usize] {
        &self.element_dofs[element]
    }

    pub fn num_elements(&self) -> usize {
        self.element_dofs.len()
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    /// First global index of the edge DOF block.
    pub fn edge_offset(&self) -> usize {
        self.edge_offset
    }

    pub fn interior_offset(&self) -> usize {
        self.interior_offset
    }

    pub fn interior_per_element(&self) -> usize {
        self.interior_per_element
    }

    /// Renumbers every DOF: old index `d` becomes `perm[d]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.total, "permutation length mismatch");
        let mut boundary = vec![false; self.total];
        for (old, &new) in perm.iter().enumerate() {
            boundary[new] = self.boundary[old];
        }
        Self {
            element_dofs: self
                .element_dofs
                .iter()
                .map(|dofs| dofs.iter().map(|&d| perm[d]).collect())
                .collect(),
            boundary,
            ..self.clone()
        }
    }
}

/// Sorted DOFs attached to boundary vertices and boundary edges.
pub fn boundary_dofs(dm: &DofMap) -> Vec<usize> {
    (0..dm.total()).filter(|&d| dm.is_boundary(d)).collect()
}

/// DOFs that survive Dirichlet elimination.
pub fn free_dofs(dm: &DofMap) -> Vec<usize> {
    (0..dm.total()).filter(|&d| !dm.is_boundary(d)).collect()
}

/// Reference-square coordinates of the lattice point `(a, b)` inside the
/// element whose south-west corner is `origin`.
pub fn to_reference(origin: (i64, i64), point: (Rational, Rational)) -> (Rational, Rational) {
    let (a, b) = origin;
    (
        int(2) * (point.0 - int(a)) - int(1),
        int(2) * (point.1 - int(b)) - int(1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_counts() {
        let m = build_mesh(Domain::UnitSquare, 2);
        assert_eq!(
            (m.num_vertices(), m.num_edges(), m.num_elements()),
            (9, 12, 4)
        );
        let m = build_mesh(Domain::UnitSquare, 1);
        assert_eq!(
            (m.num_vertices(), m.num_edges(), m.num_elements()),
            (4, 4, 1)
        );
    }

    #[test]
    fn l_shape_counts_match_counting_oracle() {
        let m = build_mesh(Domain::LShape, 1);
        assert_eq!(
            (m.num_vertices(), m.num_edges(), m.num_elements()),
            (8, 10, 3)
        );
        for n in 1..=6usize {
            let m = build_mesh(Domain::LShape, n);
            // independent count: lattice points of the closed L, edges by row and column
            let two_n = 2 * n as i64;
            let ni = n as i64;
            let inside = |a: i64, b: i64| {
                (0..=two_n).contains(&a) && (0..=two_n).contains(&b) && !(a > ni && b > ni)
            };
            let verts = (0..=two_n)
                .flat_map(|a| (0..=two_n).map(move |b| (a, b)))
                .filter(|&(a, b)| inside(a, b))
                .count();
            let cell = |a: i64, b: i64| Domain::LShape.contains_cell(ni, a, b);
            let horiz = (0..two_n)
                .flat_map(|a| (0..=two_n).map(move |b| (a, b)))
                .filter(|&(a, b)| cell(a, b) || cell(a, b - 1))
                .count();
            let vert = (0..=two_n)
                .flat_map(|a| (0..two_n).map(move |b| (a, b)))
                .filter(|&(a, b)| cell(a, b) || cell(a - 1, b))
                .count();
            assert_eq!(m.num_vertices(), verts);
            assert_eq!(m.num_vertices(), 3 * n * n + 4 * n + 1);
            assert_eq!(m.num_edges(), horiz + vert);
            assert_eq!(m.num_edges(), 6 * n * n + 4 * n);
            assert_eq!(m.num_elements(), 3 * n * n);
            let euler = m.num_vertices() as i64 - m.num_edges() as i64 + m.num_elements() as i64;
            assert_eq!(euler, 1);
        }
    }

    #[test]
    fn entities_are_unique_and_oriented() {
        let m = build_mesh(Domain::LShape, 3);
        let pts: BTreeSet<_> = (0..m.num_vertices()).map(|v| m.lattice_point(v)).collect();
        assert_eq!(pts.len(), m.num_vertices());
        let pairs: BTreeSet<_> = m.edges().iter().map(|e| (e.start, e.end)).collect();
        assert_eq!(pairs.len(), m.num_edges());
        for e in m.edges() {
            let (a0, b0) = m.lattice_point(e.start);
            let (a1, b1) = m.lattice_point(e.end);
            match e.axis {
                Axis::Horizontal => assert_eq!((a1 - a0, b1 - b0), (1, 0)),
                Axis::Vertical => assert_eq!((a1 - a0, b1 - b0), (0, 1)),
            }
        }
    }

    #[test]
    fn reentrant_corner_is_boundary() {
        let m = build_mesh(Domain::LShape, 2);
        let corner = (0..m.num_vertices())
            .find(|&v| m.lattice_point(v) == (2, 2))
            .unwrap();
        assert!(m.is_boundary_vertex(corner));
        let interior = (0..m.num_vertices())
            .find(|&v| m.lattice_point(v) == (1, 1))
            .unwrap();
        assert!(!m.is_boundary_vertex(interior));
    }

    #[test]
    fn dof_totals() {
        let sq2 = build_mesh(Domain::UnitSquare, 2);
        assert_eq!(build_dof_map(&sq2, Family::Tensor, 2).unwrap().total(), 25);
        assert_eq!(
            build_dof_map(&sq2, Family::Serendipity, 2).unwrap().total(),
            21
        );
        let l1 = build_mesh(Domain::LShape, 1);
        assert_eq!(
            build_dof_map(&l1, Family::Serendipity, 4).unwrap().total(),
            41
        );
    }

    #[test]
    fn boundary_sets() {
        let sq1 = build_mesh(Domain::UnitSquare, 1);
        let dm = build_dof_map(&sq1, Family::Tensor, 1).unwrap();
        assert_eq!(boundary_dofs(&dm), vec![0, 1, 2, 3]);

        let sq2 = build_mesh(Domain::UnitSquare, 2);
        let dm = build_dof_map(&sq2, Family::Tensor, 1).unwrap();
        assert_eq!(boundary_dofs(&dm).len(), 8);
        assert_eq!(free_dofs(&dm).len(), 1);
        let centre = free_dofs(&dm)[0];
        assert_eq!(sq2.lattice_point(centre), (1, 1));

        let dm = build_dof_map(&sq2, Family::Tensor, 3).unwrap();
        assert_eq!(dm.total(), 49);
        assert_eq!(boundary_dofs(&dm).len(), 24);
        assert_eq!(free_dofs(&dm).len(), 25);
    }

    #[test]
    fn shared_edges_get_identical_indices() {
        let m = build_mesh(Domain::UnitSquare, 2);
        let dm = build_dof_map(&m, Family::Serendipity, 4).unwrap();
        // element 0 is at (0,0), element 1 at (1,0): right side of 0 is left side of 1
        let right: Vec<usize> = dm
            .local_kinds()
            .iter()
            .zip(dm.element_dofs(0))
            .filter(|(k, _)| {
                matches!(
                    k,
                    DofKind::Edge {
                        side: Side::Right,
                        ..
                    }
                )
            })
            .map(|(_, &d)| d)
            .collect();
        let left: Vec<usize> = dm
            .local_kinds()
            .iter()
            .zip(dm.element_dofs(1))
            .filter(|(k, _)| {
                matches!(
                    k,
                    DofKind::Edge {
                        side: Side::Left,
                        ..
                    }
                )
            })
            .map(|(_, &d)| d)
            .collect();
        assert_eq!(right.len(), 3);
        assert_eq!(right, left);
    }

    #[test]
    fn every_dof_is_referenced() {
        for domain in [Domain::UnitSquare, Domain::LShape] {
            let m = build_mesh(domain, 3);
            for family in [Family::Tensor, Family::Serendipity] {
                for p in 1..=6 {
                    let dm = build_dof_map(&m, family, p).unwrap();
                    assert_eq!(dm.total(), dimension_formula(&m, family, p));
                    let mut seen = vec![0usize; dm.total()];
                    for el in 0..dm.num_elements() {
                        for &d in dm.element_dofs(el) {
                            seen[d] += 1;
                        }
                    }
                    assert!(seen.iter().all(|&c| c > 0));
                }
            }
        }
    }

    #[test]
    fn reference_map() {
        let (xi, eta) = to_reference((1, 0), (int(2), Rational::new(1.into(), 2.into())));
        assert_eq!((xi, eta), (int(1), int(0)));
    }
}
