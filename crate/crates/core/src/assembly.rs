//! Reference-element mass and stiffness matrices, global assembly and
//! Dirichlet elimination.
//!
//! Local matrices are exact rationals on `[-1, 1]^2`. On an element of
//! side `h` the mass matrix picks up the Jacobian `(h/2)^2` while the 2D
//! stiffness matrix is scale invariant. Conversion to `f64` happens once,
//! after scaling.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_traits::Zero;
use thiserror::Error;

use crate::basis2d::{BasisArray, Family, Side, Slot};
use crate::mesh::{free_dofs, Axis, DofMap, Mesh};
use crate::polynomial::{int, to_f64, Polynomial, Rational, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssemblyError {
    #[error("Dirichlet elimination leaves no free degrees of freedom")]
    EmptySystem,
    #[error("local matrices ({local_family} p={local_p}) do not match the DOF map ({map_family} p={map_p})")]
    Mismatch {
        local_family: String,
        local_p: usize,
        map_family: String,
        map_p: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

/// Exact reference-square matrices for one basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalMatrices {
    pub family: Option<Family>,
    pub order: usize,
    pub slots: Vec<Slot>,
    pub mass: Vec<Vec<Rational>>,
    pub stiffness: Vec<Vec<Rational>>,
}

impl LocalMatrices {
    pub fn dim(&self) -> usize {
        self.slots.len()
    }
}

pub fn local_matrices(basis: &BasisArray) -> LocalMatrices {
    let funcs: Vec<&Polynomial> = basis.iter().map(|(_, p)| p).collect();
    let dx: Vec<Polynomial> = funcs.iter().map(|p| p.differentiate(Var::X, 1)).collect();
    let dy: Vec<Polynomial> = funcs.iter().map(|p| p.differentiate(Var::Y, 1)).collect();
    let n = funcs.len();
    let mut mass = vec![vec![Rational::zero(); n]; n];
    let mut stiffness = vec![vec![Rational::zero(); n]; n];
    for a in 0..n {
        for b in a..n {
            let m = funcs[a].box_inner(funcs[b]);
            let s = dx[a].box_inner(&dx[b]) + dy[a].box_inner(&dy[b]);
            mass[b][a] = m.clone();
            mass[a][b] = m;
            stiffness[b][a] = s.clone();
            stiffness[a][b] = s;
        }
    }
    LocalMatrices {
        family: basis.family(),
        order: basis.order(),
        slots: basis.slots(),
        mass,
        stiffness,
    }
}

/// Physical-element matrices in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrices {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
}

pub fn scale_to_element(lm: &LocalMatrices, h: &Rational) -> ElementMatrices {
    let jac = h * h / int(4);
    let n = lm.dim();
    ElementMatrices {
        mass: DMatrix::from_fn(n, n, |r, c| to_f64(&(&lm.mass[r][c] * &jac))),
        stiffness: DMatrix::from_fn(n, n, |r, c| to_f64(&lm.stiffness[r][c])),
    }
}

/// Symmetric sparse matrix storing the upper triangle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymmetricSparse {
    dim: usize,
    upper: BTreeMap<(usize, usize), f64>,
}

impl SymmetricSparse {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            upper: BTreeMap::new(),
        }
    }

    fn from_accumulator(dim: usize, acc: HashMap<(usize, usize), f64>) -> Self {
        Self {
            dim,
            upper: acc.into_iter().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored entries of the upper triangle.
    pub fn nnz(&self) -> usize {
        self.upper.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let key = if row <= col { (row, col) } else { (col, row) };
        self.upper.get(&key).copied().unwrap_or(0.0)
    }

    /// Upper-triangle entries `(row, col, value)` with `row <= col`.
    pub fn iter_upper(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.upper.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (&(r, c), &v) in &self.upper {
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (&(r, c), &a) in &self.upper {
            out[r] += a * v[c];
            if r != c {
                out[c] += a * v[r];
            }
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0f64; self.dim];
        for (&(r, c), &a) in &self.upper {
            rows[r] += a.abs();
            if r != c {
                rows[c] += a.abs();
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Coordinate format, full symmetric pattern, one `row col value` per line.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (&(r, c), &v) in &self.upper {
            writeln!(out, "{r} {c} {v:.16e}")?;
            if r != c {
                writeln!(out, "{c} {r} {v:.16e}")?;
            }
        }
        Ok(())
    }
}

/// Global mass and stiffness restricted to the free DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSystem {
    pub mass: SymmetricSparse,
    pub stiffness: SymmetricSparse,
    /// DOF-map index of each row.
    pub free: Vec<usize>,
    pub bc: BoundaryCondition,
}

impl GlobalSystem {
    pub fn dim(&self) -> usize {
        self.free.len()
    }
}

pub fn assemble(
    mesh: &Mesh,
    dofmap: &DofMap,
    lm: &LocalMatrices,
    bc: BoundaryCondition,
) -> Result<GlobalSystem, AssemblyError> {
    if lm.order != dofmap.order()
        || lm.slots != dofmap.local_slots()
        || lm.family.is_some_and(|f| f != dofmap.family())
    {
        return Err(AssemblyError::Mismatch {
            local_family: lm.family.map_or("combination", Family::name).to_string(),
            local_p: lm.order,
            map_family: dofmap.family().name().to_string(),
            map_p: dofmap.order(),
        });
    }
    let free: Vec<usize> = match bc {
        BoundaryCondition::Dirichlet => free_dofs(dofmap),
        BoundaryCondition::Neumann => (0..dofmap.total()).collect(),
    };
    if free.is_empty() {
        return Err(AssemblyError::EmptySystem);
    }
    let mut reduced = vec![None; dofmap.total()];
    for (row, &dof) in free.iter().enumerate() {
        reduced[dof] = Some(row);
    }

    let em = scale_to_element(lm, &mesh.h());
    let mut mass = HashMap::new();
    let mut stiffness = HashMap::new();
    for el in 0..mesh.num_elements() {
        let dofs = dofmap.element_dofs(el);
        for (a, &ga) in dofs.iter().enumerate() {
            let Some(ra) = reduced[ga] else { continue };
            for (b, &gb) in dofs.iter().enumerate() {
                let Some(rb) = reduced[gb] else { continue };
                if ra > rb {
                    continue;
                }
                *mass.entry((ra, rb)).or_insert(0.0) += em.mass[(a, b)];
                *stiffness.entry((ra, rb)).or_insert(0.0) += em.stiffness[(a, b)];
            }
        }
    }
    let dim = free.len();
    Ok(GlobalSystem {
        mass: SymmetricSparse::from_accumulator(dim, mass),
        stiffness: SymmetricSparse::from_accumulator(dim, stiffness),
        free,
        bc,
    })
}

/// Coefficients of the constant function 1 in the global numbering, taken
/// from its coordinates in the local basis.
pub fn constant_interpolant(mesh: &Mesh, dofmap: &DofMap, basis: &BasisArray) -> Vec<f64> {
    let local = local_coordinates_of_one(basis);
    let mut out = vec![0.0; dofmap.total()];
    for el in 0..mesh.num_elements() {
        for (&g, c) in dofmap.element_dofs(el).iter().zip(&local) {
            out[g] = to_f64(c);
        }
    }
    out
}

fn local_coordinates_of_one(basis: &BasisArray) -> Vec<Rational> {
    let funcs: Vec<&Polynomial> = basis.iter().map(|(_, p)| p).collect();
    let mut keys: Vec<(u32, u32)> = funcs
        .iter()
        .flat_map(|p| p.terms().map(|(k, _)| *k).collect::<Vec<_>>())
        .chain([(0, 0)])
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let matrix: Vec<Vec<Rational>> = keys
        .iter()
        .map(|&(i, j)| funcs.iter().map(|p| p.coeff(i, j)).collect())
        .collect();
    let rhs: Vec<Rational> = keys
        .iter()
        .map(|&k| if k == (0, 0) { int(1) } else { int(0) })
        .collect();
    crate::polynomial::solve_general(&matrix, &rhs)
        .expect("constants lie in every supported basis")
        .solution
}

/// Largest disagreement between the traces of any global basis function
/// seen from the two elements sharing an interior edge, sampled at
/// `samples` equispaced points including the endpoints.
pub fn max_trace_jump(mesh: &Mesh, dofmap: &DofMap, basis: &BasisArray, samples: usize) -> f64 {
    let funcs: Vec<&Polynomial> = basis.iter().map(|(_, p)| p).collect();
    let mut owners: Vec<Vec<(usize, Side)>> = vec![Vec::new(); mesh.num_edges()];
    for (el, element) in mesh.elements().iter().enumerate() {
        for side in [Side::Bottom, Side::Top, Side::Left, Side::Right] {
            owners[element.edge(side)].push((el, side));
        }
    }
    let ts: Vec<f64> = (0..samples)
        .map(|s| -1.0 + 2.0 * s as f64 / (samples - 1) as f64)
        .collect();
    let mut worst = 0.0f64;
    for (edge, own) in owners.iter().enumerate() {
        let [(ea, sa), (eb, sb)] = own.as_slice() else {
            continue;
        };
        let horizontal = mesh.edges()[edge].axis == Axis::Horizontal;
        let trace = |el: usize, side: Side, t: f64| -> HashMap<usize, f64> {
            let (x, y) = match side {
                Side::Bottom => (t, -1.0),
                Side::Top => (t, 1.0),
                Side::Left => (-1.0, t),
                Side::Right => (1.0, t),
            };
            let mut vals = HashMap::new();
            for (&g, f) in dofmap.element_dofs(el).iter().zip(&funcs) {
                *vals.entry(g).or_insert(0.0) += f.evaluate_f64(x, y);
            }
            vals
        };
        debug_assert!(horizontal == matches!(sa, Side::Bottom | Side::Top));
        for &t in &ts {
            let va = trace(*ea, *sa, t);
            let vb = trace(*eb, *sb, t);
            for g in va.keys().chain(vb.keys()) {
                let a = va.get(g).copied().unwrap_or(0.0);
                let b = vb.get(g).copied().unwrap_or(0.0);
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}
