//! Exact rational polynomials in one or two variables.
//!
//! Every basis function in the crate lives here as a sparse map from
//! exponent pairs `(i, j)` (for `x^i y^j`) to a reduced [`Rational`].
//! A univariate polynomial is simply one with every `j == 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Builds `num / den` as a [`Rational`].
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer `n` as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Round-to-nearest conversion of an exact rational to `f64`.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinearSystemError {
    #[error("system is singular (rank {rank} < {size})")]
    SingularSystem { rank: usize, size: usize },
    #[error("matrix is {rows}x{cols} but right-hand side has length {rhs}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        rhs: usize,
    },
    #[error("system is inconsistent")]
    Inconsistent,
}

/// Independent variable of a bivariate polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

/// Sparse bivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// `c * x^i * y^j`.
    pub fn monomial(c: Rational, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    /// Univariate polynomial in `x` from ascending coefficients.
    pub fn from_coeffs_x(coeffs: &[Rational]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| ((i as u32, 0), c.clone())),
        )
    }

    /// Collects `(exponents, coefficient)` pairs, summing duplicates and dropping zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Rational)>,
    {
        let mut p = Self::zero();
        for (exp, c) in terms {
            p.add_term(exp, c);
        }
        p
    }

    fn add_term(&mut self, exp: (u32, u32), c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates over the nonzero terms in ascending `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Highest power of `x` present, `None` for the zero polynomial.
    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Exchanges the roles of `x` and `y`.
    pub fn swap_xy(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((j, i), c.clone()))
                .collect(),
        }
    }

    /// Univariate polynomial in `x` re-expressed in `y`.
    pub fn in_y(&self) -> Self {
        self.swap_xy()
    }

    /// `order`-th partial derivative with respect to `var`.
    pub fn differentiate(&self, var: Var, order: u32) -> Self {
        if order == 0 {
            return self.clone();
        }
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            let e = match var {
                Var::X => i,
                Var::Y => j,
            };
            if e < order {
                continue;
            }
            let falling: i64 = (0..order).map(|t| i64::from(e - t)).product();
            let exp = match var {
                Var::X => (i - order, j),
                Var::Y => (i, j - order),
            };
            out.add_term(exp, c * int(falling));
        }
        out
    }

    /// Exact integral over the reference square `[-1, 1]^2`.
    pub fn integrate_box(&self) -> Rational {
        let mut total = Rational::zero();
        for (&(i, j), c) in &self.terms {
            if i % 2 == 1 || j % 2 == 1 {
                continue;
            }
            total += c * rat(4, (i64::from(i) + 1) * (i64::from(j) + 1));
        }
        total
    }

    /// `∫∫ self * other` over `[-1, 1]^2` without forming the product.
    pub fn box_inner(&self, other: &Polynomial) -> Rational {
        let mut total = Rational::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &other.terms {
                let (i, j) = (i1 + i2, j1 + j2);
                if i % 2 == 0 && j % 2 == 0 {
                    total += a * b * rat(4, (i64::from(i) + 1) * (i64::from(j) + 1));
                }
            }
        }
        total
    }

    pub fn evaluate(&self, x0: &Rational, y0: &Rational) -> Rational {
        let mut total = Rational::zero();
        for (&(i, j), c) in &self.terms {
            total += c * pow(x0, i) * pow(y0, j);
        }
        total
    }

    /// Floating-point evaluation, used for sampling traces and plots.
    pub fn evaluate_f64(&self, x0: f64, y0: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| to_f64(c) * x0.powi(i as i32) * y0.powi(j as i32))
            .sum()
    }

    /// Substitutes a constant for one variable.
    pub fn restrict(&self, var: Var, value: &Rational) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            match var {
                Var::X => out.add_term((0, j), c * pow(value, i)),
                Var::Y => out.add_term((i, 0), c * pow(value, j)),
            }
        }
        out
    }
}

fn pow(base: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v.clone());
        }
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), a * b);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

/// Expanded form, highest total degree first, e.g. `-1/2*x^2*y + x - 1`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1).cmp(&(a.0 + a.1)).then(b.cmp(a)));
        for (n, key) in keys.iter().enumerate() {
            let c = &self.terms[key];
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors = Vec::new();
            if !mag.is_one() || *key == (0, 0) {
                factors.push(mag.to_string());
            }
            for (name, e) in [("x", key.0), ("y", key.1)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Outcome of row-reducing a possibly rectangular system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedSolution {
    /// A particular solution with every free variable set to zero.
    pub solution: Vec<Rational>,
    pub rank: usize,
}

impl ReducedSolution {
    pub fn is_unique(&self) -> bool {
        self.rank == self.solution.len()
    }
}

/// Gauss-Jordan elimination over the rationals for an arbitrary `m x n` system.
///
/// Returns a particular solution (free variables zero) or
/// [`LinearSystemError::Inconsistent`].
pub fn solve_general(
    a: &[Vec<Rational>],
    b: &[Rational],
) -> Result<ReducedSolution, LinearSystemError> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if b.len() != rows || a.iter().any(|r| r.len() != cols) {
        return Err(LinearSystemError::DimensionMismatch {
            rows,
            cols,
            rhs: b.len(),
        });
    }
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&k| !aug[k][c].is_zero()) else {
            continue;
        };
        aug.swap(r, piv);
        let inv = aug[r][c].recip();
        for v in aug[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = aug[r].clone();
        for (k, row) in aug.iter_mut().enumerate() {
            if k == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (dst, src) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *dst -= &factor * src;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if aug[r..].iter().any(|row| !row[cols].is_zero()) {
        return Err(LinearSystemError::Inconsistent);
    }
    let mut solution = vec![Rational::zero(); cols];
    for (row, &c) in pivots.iter().enumerate() {
        solution[c] = aug[row][cols].clone();
    }
    Ok(ReducedSolution {
        solution,
        rank: pivots.len(),
    })
}

/// Solves a square nonsingular system exactly.
pub fn solve_rational_system(
    a: &[Vec<Rational>],
    b: &[Rational],
) -> Result<Vec<Rational>, LinearSystemError> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(LinearSystemError::DimensionMismatch {
            rows: n,
            cols: a.first().map_or(0, Vec::len),
            rhs: b.len(),
        });
    }
    match solve_general(a, b) {
        Ok(sol) if sol.is_unique() => Ok(sol.solution),
        Ok(sol) => Err(LinearSystemError::SingularSystem {
            rank: sol.rank,
            size: n,
        }),
        Err(LinearSystemError::Inconsistent) => {
            let zeros = vec![Rational::zero(); n];
            let rank = solve_general(a, &zeros).map(|s| s.rank).unwrap_or(0);
            Err(LinearSystemError::SingularSystem { rank, size: n })
        }
        Err(e) => Err(e),
    }
}

/// Exact rank of a rational matrix.
pub fn rank(a: &[Vec<Rational>]) -> usize {
    let zeros = vec![Rational::zero(); a.len()];
    solve_general(a, &zeros).map(|s| s.rank).unwrap_or(0)
}
