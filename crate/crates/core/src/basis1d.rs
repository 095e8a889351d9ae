//! Univariate bases `Φ_p[x]` on `[-1, 1]` built from Hermite-type
//! interpolation conditions at the nodes `{-1, 0, 1}`.
//!
//! Functions are indexed from 1 to `p + 1`:
//!
//! ```text
//! index 1        value at -1
//! index 2        value at  0
//! index 3..=p    derivative of order (index - 2) at 0
//! index p+1      value at +1
//! ```

use num_traits::{One, Zero};
use thiserror::Error;

use crate::polynomial::{int, solve_general, Polynomial, Rational, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Basis1dError {
    #[error("order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("index {index} is outside 1..={max} for order {order}")]
    InvalidIndex {
        order: usize,
        index: usize,
        max: usize,
    },
    #[error("no polynomial of degree <= {order} satisfies the conditions for phi_{index}")]
    ConstructionFailure { order: usize, index: usize },
}

/// One interpolation constraint `φ^{(derivative)}(node) = value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub node: i64,
    pub derivative: u32,
    pub value: Rational,
}

impl Condition {
    fn new(node: i64, derivative: u32, value: i64) -> Self {
        Self {
            node,
            derivative,
            value: int(value),
        }
    }

    pub fn holds_for(&self, p: &Polynomial) -> bool {
        let d = p.differentiate(Var::X, self.derivative);
        d.evaluate(&int(self.node), &Rational::zero()) == self.value
    }
}

/// Constraint list defining `φ_index` in `Φ_order[x]` (1-based index).
///
/// For `order == 1` the two linear functions are pinned by their values at
/// `±1` only. For `order >= 2` each function gets the three nodal values
/// plus the derivatives of orders `1..=order-2` at the midpoint, with the
/// function of index `i` in `3..=order` carrying the unit derivative of
/// order `i - 2` and every other derivative zero.
pub fn interpolating_conditions(
    order: usize,
    index: usize,
) -> Result<Vec<Condition>, Basis1dError> {
    if order == 0 {
        return Err(Basis1dError::InvalidOrder(order));
    }
    if index == 0 || index > order + 1 {
        return Err(Basis1dError::InvalidIndex {
            order,
            index,
            max: order + 1,
        });
    }
    if order == 1 {
        let left = i64::from(index == 1);
        return Ok(vec![
            Condition::new(-1, 0, left),
            Condition::new(1, 0, 1 - left),
        ]);
    }
    let nodal_target = match index {
        1 => Some(-1),
        2 => Some(0),
        i if i == order + 1 => Some(1),
        _ => None,
    };
    let mut conds: Vec<Condition> = [-1, 0, 1]
        .into_iter()
        .map(|node| Condition::new(node, 0, i64::from(nodal_target == Some(node))))
        .collect();
    let unit_derivative = if nodal_target.is_none() {
        Some(index as u32 - 2)
    } else {
        None
    };
    for k in 1..=(order as u32 - 2) {
        conds.push(Condition::new(0, k, i64::from(unit_derivative == Some(k))));
    }
    Ok(conds)
}

/// Lowest-degree polynomial satisfying `conds`, searching degrees from
/// `conds.len() - 1` up to `max_degree`. Returns the polynomial and the degree bound used.
pub fn lowest_degree_interpolant(
    conds: &[Condition],
    max_degree: usize,
) -> Option<(Polynomial, usize)> {
    let start = conds.len().saturating_sub(1);
    for degree in start..=max_degree.max(start) {
        if degree > max_degree {
            break;
        }
        let rows: Vec<Vec<Rational>> = conds.iter().map(|c| condition_row(c, degree)).collect();
        let rhs: Vec<Rational> = conds.iter().map(|c| c.value.clone()).collect();
        if let Ok(sol) = solve_general(&rows, &rhs) {
            return Some((Polynomial::from_coeffs_x(&sol.solution), degree));
        }
    }
    None
}

/// Row of the monomial-basis collocation matrix for one condition.
fn condition_row(cond: &Condition, degree: usize) -> Vec<Rational> {
    let node = int(cond.node);
    (0..=degree as u32)
        .map(|e| {
            let m = Polynomial::monomial(Rational::one(), e, 0);
            m.differentiate(Var::X, cond.derivative)
                .evaluate(&node, &Rational::zero())
        })
        .collect()
}

/// The set `Φ_p[x]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phi1D {
    order: usize,
    functions: Vec<Polynomial>,
    degrees_used: Vec<usize>,
}

impl Phi1D {
    pub fn order(&self) -> usize {
        self.order
    }

    /// All `p + 1` functions, `functions()[0]` being `φ_1`.
    pub fn functions(&self) -> &[Polynomial] {
        &self.functions
    }

    /// `φ_index` with the 1-based index used throughout the crate.
    pub fn phi(&self, index: usize) -> &Polynomial {
        &self.functions[index - 1]
    }

    /// Degree bound at which each interpolation system first became solvable.
    pub fn degrees_used(&self) -> &[usize] {
        &self.degrees_used
    }
}

pub fn generate_phi(order: usize) -> Result<Phi1D, Basis1dError> {
    if order == 0 {
        return Err(Basis1dError::InvalidOrder(order));
    }
    let mut functions = Vec::with_capacity(order + 1);
    let mut degrees_used = Vec::with_capacity(order + 1);
    for index in 1..=order + 1 {
        let conds = interpolating_conditions(order, index)?;
        let (poly, degree) = lowest_degree_interpolant(&conds, order)
            .ok_or(Basis1dError::ConstructionFailure { order, index })?;
        functions.push(poly);
        degrees_used.push(degree);
    }
    Ok(Phi1D {
        order,
        functions,
        degrees_used,
    })
}
