//! Tensor-product and serendipity bases on the reference square `[-1, 1]^2`.
//!
//! Both families are stored as square arrays of polynomials whose slot
//! `(i, j)` (1-based) holds a function tied to the `x`-role `i` and the
//! `y`-role `j` of the univariate index convention in [`crate::basis1d`].
//! Empty slots hold the zero polynomial.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::basis1d::{generate_phi, Basis1dError};
use crate::polynomial::{int, rank, solve_general, Polynomial, Rational, Var};

/// Highest order for which serendipity combinations are tabulated.
pub const MAX_SERENDIPITY_ORDER: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Basis2dError {
    #[error(transparent)]
    Basis1d(#[from] Basis1dError),
    #[error("cannot reindex a {p}x{q} product set into order {target}")]
    InvalidTarget { p: usize, q: usize, target: usize },
    #[error("serendipity order {0} is outside 1..={MAX_SERENDIPITY_ORDER}")]
    UnsupportedOrder(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Tensor,
    Serendipity,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Tensor => "tensor",
            Family::Serendipity => "serendipity",
        }
    }

    /// Basis functions per element.
    pub fn local_dim(self, p: usize) -> usize {
        match self {
            Family::Tensor => (p + 1) * (p + 1),
            Family::Serendipity if p == 1 => 4,
            Family::Serendipity => (p * p + 3 * p + 6) / 2,
        }
    }

    /// Interior (bubble) functions per element.
    pub fn interior_dim(self, p: usize) -> usize {
        match self {
            Family::Tensor => (p - 1) * (p - 1),
            Family::Serendipity if p < 4 => 0,
            Family::Serendipity => (p - 3) * (p - 2) / 2,
        }
    }

    pub fn basis(self, p: usize) -> Result<BasisArray, Basis2dError> {
        match self {
            Family::Tensor => tensor_basis(p),
            Family::Serendipity => serendipity_basis(p),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// 1-based array position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub i: usize,
    pub j: usize,
}

/// The set `Φ_pq = { φ_i(x) φ_j(y) }`, a `(p+1) x (q+1)` array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSet {
    p: usize,
    q: usize,
    entries: Vec<Polynomial>,
}

impl ProductSet {
    pub fn new(p: usize, q: usize) -> Result<Self, Basis2dError> {
        let phi_x = generate_phi(p)?;
        let phi_y = generate_phi(q)?;
        let mut entries = Vec::with_capacity((p + 1) * (q + 1));
        for fx in phi_x.functions() {
            for fy in phi_y.functions() {
                entries.push(fx * &fy.in_y());
            }
        }
        Ok(Self { p, q, entries })
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[(i - 1) * (self.q + 1) + (j - 1)]
    }
}

/// Square `(M+1) x (M+1)` array of polynomials; nonzero entries form a basis.
#[derive(Clone, PartialEq, Eq)]
pub struct BasisArray {
    size: usize,
    family: Option<Family>,
    order: usize,
    entries: Vec<Polynomial>,
}

impl BasisArray {
    fn zeros(order: usize, family: Option<Family>) -> Self {
        let size = order + 1;
        Self {
            size,
            family,
            order,
            entries: vec![Polynomial::zero(); size * size],
        }
    }

    /// Array order `M`; the array is `(M+1) x (M+1)`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `None` for intermediate arrays produced by [`reindex`] or [`array_sum`].
    pub fn family(&self) -> Option<Family> {
        self.family
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[(i - 1) * self.size + (j - 1)]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut Polynomial {
        &mut self.entries[(i - 1) * self.size + (j - 1)]
    }

    /// Nonzero slots in grid order (`i` outer, `j` inner).
    pub fn slots(&self) -> Vec<Slot> {
        self.iter().map(|(s, _)| s).collect()
    }

    /// Nonzero entries with their slots, in grid order.
    pub fn iter(&self) -> impl Iterator<Item = (Slot, &Polynomial)> {
        let size = self.size;
        self.entries.iter().enumerate().filter_map(move |(n, p)| {
            (!p.is_zero()).then_some((
                Slot {
                    i: n / size + 1,
                    j: n % size + 1,
                },
                p,
            ))
        })
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|p| !p.is_zero()).count()
    }

    /// Transposed array with `x` and `y` exchanged in every entry.
    pub fn swap_xy(&self) -> Self {
        let mut out = Self::zeros(self.order, self.family);
        for i in 1..=self.size {
            for j in 1..=self.size {
                *out.get_mut(j, i) = self.get(i, j).swap_xy();
            }
        }
        out
    }

    /// Human-readable listing of every slot, zeros included.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let label = self.family.map_or("combination", Family::name);
        out.push_str(&format!("# {label} basis, order {}\n", self.order));
        for i in 1..=self.size {
            for j in 1..=self.size {
                out.push_str(&format!("({i},{j}): {}\n", self.get(i, j)));
            }
        }
        out
    }

    /// One machine-readable record per nonzero entry:
    /// `i j exp_x:exp_y:num:den exp_x:exp_y:num:den ...`.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for (slot, p) in self.iter() {
            out.push_str(&format!("{} {}", slot.i, slot.j));
            for (&(ex, ey), c) in p.terms() {
                out.push_str(&format!(" {ex}:{ey}:{}:{}", c.numer(), c.denom()));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for BasisArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses the output of [`BasisArray::to_records`] back into `(slot, polynomial)` pairs.
pub fn parse_records(text: &str) -> Option<Vec<(Slot, Polynomial)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let mut fields = line.split_whitespace();
            let i = fields.next()?.parse().ok()?;
            let j = fields.next()?.parse().ok()?;
            let terms = fields
                .map(|t| {
                    let parts: Vec<&str> = t.split(':').collect();
                    let [ex, ey, num, den] = parts.as_slice() else {
                        return None;
                    };
                    let c = Rational::new(num.parse().ok()?, den.parse().ok()?);
                    Some(((ex.parse().ok()?, ey.parse().ok()?), c))
                })
                .collect::<Option<Vec<_>>>()?;
            Some((Slot { i, j }, Polynomial::from_terms(terms)))
        })
        .collect()
}

/// `Φ_pp`, the tensor-product basis of order `p`.
pub fn tensor_basis(p: usize) -> Result<BasisArray, Basis2dError> {
    let mut out = reindex(&ProductSet::new(p, p)?, p)?;
    out.family = Some(Family::Tensor);
    Ok(out)
}

/// Places `Φ_pq` into an `(M+1) x (M+1)` array, sending the last row and
/// column of the source to the last row and column of the target.
pub fn reindex(source: &ProductSet, target: usize) -> Result<BasisArray, Basis2dError> {
    let (p, q) = source.orders();
    if target < p.max(q) {
        return Err(Basis2dError::InvalidTarget { p, q, target });
    }
    let mut out = BasisArray::zeros(target, None);
    for i in 1..=p + 1 {
        for j in 1..=q + 1 {
            let k = if i == p + 1 { target + 1 } else { i };
            let l = if j == q + 1 { target + 1 } else { j };
            *out.get_mut(k, l) = source.get(i, j).clone();
        }
    }
    Ok(out)
}

/// Signed slotwise sum of reindexed product sets.
pub fn array_sum(terms: &[(i32, &ProductSet)], target: usize) -> Result<BasisArray, Basis2dError> {
    let mut out = BasisArray::zeros(target, None);
    for &(sign, set) in terms {
        let placed = reindex(set, target)?;
        for (slot, poly) in placed.iter() {
            let entry = out.get_mut(slot.i, slot.j);
            *entry = if sign < 0 {
                &*entry - poly
            } else {
                &*entry + poly
            };
        }
    }
    Ok(out)
}

/// Signed `(p, q)` product-set terms of the serendipity combination of order `p`.
pub fn serendipity_combination(p: usize) -> Result<&'static [(i32, usize, usize)], Basis2dError> {
    const S1: &[(i32, usize, usize)] = &[(1, 1, 1)];
    const S2: &[(i32, usize, usize)] = &[(1, 2, 1), (1, 1, 2), (-1, 1, 1)];
    const S3: &[(i32, usize, usize)] = &[(1, 3, 1), (1, 1, 3), (-1, 1, 1)];
    const S4: &[(i32, usize, usize)] = &[(1, 4, 1), (1, 1, 4), (1, 2, 2), (-1, 2, 1), (-1, 1, 2)];
    const S5: &[(i32, usize, usize)] = &[
        (1, 5, 1),
        (1, 1, 5),
        (1, 3, 2),
        (1, 2, 3),
        (-1, 3, 1),
        (-1, 1, 3),
        (-1, 2, 2),
    ];
    const S6: &[(i32, usize, usize)] = &[
        (1, 6, 1),
        (1, 1, 6),
        (1, 4, 2),
        (1, 2, 4),
        (1, 3, 3),
        (-1, 4, 1),
        (-1, 1, 4),
        (-1, 2, 3),
        (-1, 3, 2),
    ];
    match p {
        1 => Ok(S1),
        2 => Ok(S2),
        3 => Ok(S3),
        4 => Ok(S4),
        5 => Ok(S5),
        6 => Ok(S6),
        _ => Err(Basis2dError::UnsupportedOrder(p)),
    }
}

pub fn serendipity_basis(p: usize) -> Result<BasisArray, Basis2dError> {
    let combination = serendipity_combination(p)?;
    let sets = combination
        .iter()
        .map(|&(sign, r, s)| Ok((sign, ProductSet::new(r, s)?)))
        .collect::<Result<Vec<_>, Basis2dError>>()?;
    let terms: Vec<(i32, &ProductSet)> = sets.iter().map(|(sign, set)| (*sign, set)).collect();
    let mut out = array_sum(&terms, p)?;
    out.family = Some(Family::Serendipity);
    Ok(out)
}

/// Corner of the reference square, named by the signs of `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    /// `(-1, -1)`
    SouthWest,
    /// `(+1, -1)`
    SouthEast,
    /// `(-1, +1)`
    NorthWest,
    /// `(+1, +1)`
    NorthEast,
}

impl Corner {
    pub fn coords(self) -> (i64, i64) {
        match self {
            Corner::SouthWest => (-1, -1),
            Corner::SouthEast => (1, -1),
            Corner::NorthWest => (-1, 1),
            Corner::NorthEast => (1, 1),
        }
    }
}

/// Side of the reference square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// `y = -1`, parametrised by `x`
    Bottom,
    /// `y = +1`, parametrised by `x`
    Top,
    /// `x = -1`, parametrised by `y`
    Left,
    /// `x = +1`, parametrised by `y`
    Right,
}

impl Side {
    /// Midpoint coordinates.
    pub fn midpoint(self) -> (i64, i64) {
        match self {
            Side::Bottom => (0, -1),
            Side::Top => (0, 1),
            Side::Left => (-1, 0),
            Side::Right => (1, 0),
        }
    }

    /// Variable running along the side.
    pub fn tangent(self) -> Var {
        match self {
            Side::Bottom | Side::Top => Var::X,
            Side::Left | Side::Right => Var::Y,
        }
    }
}

/// Entity a basis slot belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DofKind {
    Vertex(Corner),
    /// `k` is the tangential derivative order at the side midpoint (0 = value).
    Edge {
        side: Side,
        k: usize,
    },
    Interior {
        i: usize,
        j: usize,
    },
}

/// Classifies a slot of an order-`p` array.
pub fn classify_slot(p: usize, slot: Slot) -> DofKind {
    let end = p + 1;
    let x_end = slot.i == 1 || slot.i == end;
    let y_end = slot.j == 1 || slot.j == end;
    match (x_end, y_end) {
        (true, true) => DofKind::Vertex(match (slot.i == 1, slot.j == 1) {
            (true, true) => Corner::SouthWest,
            (false, true) => Corner::SouthEast,
            (true, false) => Corner::NorthWest,
            (false, false) => Corner::NorthEast,
        }),
        (false, true) => DofKind::Edge {
            side: if slot.j == 1 { Side::Bottom } else { Side::Top },
            k: slot.i - 2,
        },
        (true, false) => DofKind::Edge {
            side: if slot.i == 1 { Side::Left } else { Side::Right },
            k: slot.j - 2,
        },
        (false, false) => DofKind::Interior {
            i: slot.i,
            j: slot.j,
        },
    }
}

pub fn classify_dofs(b: &BasisArray) -> Vec<(Slot, DofKind)> {
    b.slots()
        .into_iter()
        .map(|s| (s, classify_slot(b.order(), s)))
        .collect()
}

/// Per-monomial result of [`span_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanReport {
    pub entries: Vec<((u32, u32), bool)>,
}

impl SpanReport {
    pub fn all_representable(&self) -> bool {
        self.entries.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<(u32, u32)> {
        self.entries
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(m, _)| *m)
            .collect()
    }
}

/// Monomial exponents spanning the target space of `family` at order `p`.
pub fn target_monomials(family: Family, p: usize) -> Vec<(u32, u32)> {
    let p = p as u32;
    let mut out = Vec::new();
    for i in 0..=p {
        for j in 0..=p {
            let keep = match family {
                Family::Tensor => true,
                Family::Serendipity => i + j <= p || (i, j) == (p, 1) || (i, j) == (1, p),
            };
            if keep {
                out.push((i, j));
            }
        }
    }
    out
}

/// Checks which of `monomials` lie in the span of the nonzero entries of `b`.
pub fn span_check_monomials(b: &BasisArray, monomials: &[(u32, u32)]) -> SpanReport {
    let (columns, rows) = coefficient_matrix(b, monomials);
    let entries = monomials
        .iter()
        .map(|&m| {
            let rhs: Vec<Rational> = rows
                .iter()
                .map(|&key| {
                    if key == m {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            let matrix: Vec<Vec<Rational>> = rows
                .iter()
                .map(|&(ex, ey)| columns.iter().map(|p| p.coeff(ex, ey)).collect())
                .collect();
            (m, solve_general(&matrix, &rhs).is_ok())
        })
        .collect();
    SpanReport { entries }
}

/// Checks every monomial of the family's target space.
pub fn span_check(b: &BasisArray) -> SpanReport {
    let family = b.family().unwrap_or(Family::Tensor);
    span_check_monomials(b, &target_monomials(family, b.order()))
}

/// Basis polynomials and the union of their monomials (plus `extra`).
fn coefficient_matrix(b: &BasisArray, extra: &[(u32, u32)]) -> (Vec<Polynomial>, Vec<(u32, u32)>) {
    let columns: Vec<Polynomial> = b.iter().map(|(_, p)| p.clone()).collect();
    let mut rows: Vec<(u32, u32)> = columns
        .iter()
        .flat_map(|p| p.terms().map(|(k, _)| *k).collect::<Vec<_>>())
        .chain(extra.iter().copied())
        .collect();
    rows.sort_unstable();
    rows.dedup();
    (columns, rows)
}

/// Rank of the monomial coefficient matrix of the nonzero entries.
pub fn coefficient_rank(b: &BasisArray) -> usize {
    let (columns, rows) = coefficient_matrix(b, &[]);
    let matrix: Vec<Vec<Rational>> = rows
        .iter()
        .map(|&(ex, ey)| columns.iter().map(|p| p.coeff(ex, ey)).collect())
        .collect();
    rank(&matrix)
}

/// Applies the nodal functional associated with `kind` to `poly`.
///
/// Vertices evaluate at the corner, edges take the `k`-th tangential
/// derivative at the side midpoint. Interior functionals are not nodal and
/// return `None`.
pub fn apply_functional(kind: DofKind, poly: &Polynomial) -> Option<Rational> {
    match kind {
        DofKind::Vertex(c) => {
            let (x, y) = c.coords();
            Some(poly.evaluate(&int(x), &int(y)))
        }
        DofKind::Edge { side, k } => {
            let (x, y) = side.midpoint();
            Some(
                poly.differentiate(side.tangent(), k as u32)
                    .evaluate(&int(x), &int(y)),
            )
        }
        DofKind::Interior { .. } => None,
    }
}

/// Measured duality between the boundary functionals and the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityReport {
    /// Every vertex and edge-value function is 1 at its own node and 0 at the
    /// other corners and edge midpoints.
    pub value_kronecker: bool,
    /// Off-diagonal nonzeros in the full boundary functional matrix,
    /// derivative functionals included.
    pub derivative_defects: usize,
}

pub fn duality_report(b: &BasisArray) -> DualityReport {
    let classified = classify_dofs(b);
    let value_nodes: Vec<DofKind> = classified
        .iter()
        .map(|(_, k)| *k)
        .filter(|k| matches!(k, DofKind::Vertex(_) | DofKind::Edge { k: 0, .. }))
        .collect();
    let mut value_kronecker = true;
    let mut derivative_defects = 0;
    for (slot, own) in &classified {
        if matches!(own, DofKind::Interior { .. }) {
            continue;
        }
        let poly = b.get(slot.i, slot.j);
        let own_is_value = value_nodes.contains(own);
        for (_, other) in &classified {
            let Some(v) = apply_functional(*other, poly) else {
                continue;
            };
            let expected = if other == own { int(1) } else { int(0) };
            if v != expected {
                if own_is_value && value_nodes.contains(other) {
                    value_kronecker = false;
                } else {
                    derivative_defects += 1;
                }
            }
        }
    }
    DualityReport {
        value_kronecker,
        derivative_defects,
    }
}
