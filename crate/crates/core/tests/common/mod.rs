//! Shared test support: a small polynomial expression parser for golden
//! data, plus independent floating-point oracles.

#![allow(dead_code)]

use srdp_eig::polynomial::{int, Polynomial};

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

/// Parses expressions such as `-1/4(x-1)(y+1)(x^2+y^2-1)` with implicit
/// multiplication, `^` with integer exponents, unary minus and parentheses.
/// Division is only allowed by constants.
pub fn parse_poly(src: &str) -> Polynomial {
    let tokens: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { tokens, pos: 0 };
    let out = p.expr();
    assert_eq!(p.pos, p.tokens.len(), "trailing input in {src:?}");
    out
}

struct Parser {
    tokens: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.tokens.get(self.pos).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.tokens[self.pos];
        self.pos += 1;
        c
    }

    fn expr(&mut self) -> Polynomial {
        let mut acc = self.term();
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.bump();
            let rhs = self.term();
            acc = if c == '+' { acc + rhs } else { acc - rhs };
        }
        acc
    }

    fn term(&mut self) -> Polynomial {
        let mut acc = self.unary();
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    acc = acc * self.unary();
                }
                Some('/') => {
                    self.bump();
                    let d = self.unary();
                    assert_eq!(d.total_degree(), Some(0), "division by a non-constant");
                    acc = acc.scale(&(int(1) / d.coeff(0, 0)));
                }
                Some(c) if c.is_ascii_digit() || c == 'x' || c == 'y' || c == '(' => {
                    acc = acc * self.power();
                }
                _ => return acc,
            }
        }
    }

    fn unary(&mut self) -> Polynomial {
        if self.peek() == Some('-') {
            self.bump();
            return -self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Polynomial {
        let base = self.atom();
        if self.peek() != Some('^') {
            return base;
        }
        self.bump();
        let e = self.integer();
        (0..e).fold(Polynomial::one(), |acc, _| acc * base.clone())
    }

    fn integer(&mut self) -> i64 {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        assert!(self.pos > start, "expected an integer at {start}");
        self.tokens[start..self.pos]
            .iter()
            .collect::<String>()
            .parse()
            .unwrap()
    }

    fn atom(&mut self) -> Polynomial {
        match self.peek() {
            Some('x') => {
                self.bump();
                Polynomial::x()
            }
            Some('y') => {
                self.bump();
                Polynomial::y()
            }
            Some('(') => {
                self.bump();
                let inner = self.expr();
                assert_eq!(self.bump(), ')', "unbalanced parentheses");
                inner
            }
            Some(c) if c.is_ascii_digit() => Polynomial::constant(int(self.integer())),
            other => panic!("unexpected token {other:?} at {}", self.pos),
        }
    }
}

// ---------------------------------------------------------------------------
// Golden data
// ---------------------------------------------------------------------------

/// The 1D sets for p = 1..=5, listed as φ_1 .. φ_{p+1}.
pub const PHI_TABLE: [&[&str]; 5] = [
    &["-1/2(x-1)", "1/2(1+x)"],
    &["1/2(x-1)x", "1-x^2", "1/2x(x+1)"],
    &["-1/2(x-1)x^2", "1-x^2", "x-x^3", "1/2x^2(x+1)"],
    &[
        "1/2(x-1)x^3",
        "1-x^4",
        "x-x^3",
        "-1/2(x-1)x^2(x+1)",
        "1/2x^3(x+1)",
    ],
    &[
        "-1/2(x-1)x^4",
        "1-x^4",
        "x-x^5",
        "-1/2(x-1)x^2(x+1)",
        "-1/6(x-1)x^3(x+1)",
        "1/2x^4(x+1)",
    ],
];

/// Serendipity arrays for p = 1..=4. Row `i`, column `j` is slot `(i, j)`.
pub const SERENDIPITY_ARRAYS: [&[&[&str]]; 4] = [
    &[
        &["1/4(1-x)(1-y)", "1/4(1-x)(y+1)"],
        &["1/4(x+1)(1-y)", "1/4(x+1)(y+1)"],
    ],
    &[
        &[
            "-1/4(x-1)(y-1)(x+y+1)",
            "1/2(x-1)(y^2-1)",
            "1/4(x-1)(x-y+1)(y+1)",
        ],
        &["1/2(x^2-1)(y-1)", "0", "-1/2(x^2-1)(y+1)"],
        &[
            "1/4(y-1)(-x^2+y x+y+1)",
            "-1/2(x+1)(y^2-1)",
            "1/4(x+1)(y+1)(x+y-1)",
        ],
    ],
    &[
        &[
            "1/4(x-1)(y-1)(x^2+y^2-1)",
            "1/2(x-1)(y^2-1)",
            "1/2(x-1)y(y^2-1)",
            "-1/4(x-1)(y+1)(x^2+y^2-1)",
        ],
        &["1/2(x^2-1)(y-1)", "0", "0", "-1/2(x^2-1)(y+1)"],
        &["1/2x(x^2-1)(y-1)", "0", "0", "1/2(x-x^3)(y+1)"],
        &[
            "-1/4(x+1)(y-1)(x^2+y^2-1)",
            "-1/2(x+1)(y^2-1)",
            "1/2(x+1)(y-y^3)",
            "1/4(x+1)(y+1)(x^2+y^2-1)",
        ],
    ],
    &[
        &[
            "-1/4(x-1)(y-1)(x^3-(y+1)x+y(y^2-1))",
            "1/2(y^2-1)(-x^2+y^2x+x-y^2)",
            "1/2(x-1)y(y^2-1)",
            "1/4(x-1)(y-1)y^2(y+1)",
            "1/4(x-1)(y+1)(x^3+(y-1)x-y^3+y)",
        ],
        &[
            "1/2(x^2-1)(x^2-y)(y-1)",
            "(x^2-1)(y^2-1)",
            "0",
            "0",
            "-1/2(x^2-1)(y+1)(x^2+y)",
        ],
        &["1/2x(x^2-1)(y-1)", "0", "0", "0", "1/2(x-x^3)(y+1)"],
        &[
            "1/4(x-1)x^2(x+1)(y-1)",
            "0",
            "0",
            "0",
            "-1/4(x-1)x^2(x+1)(y+1)",
        ],
        &[
            "1/4(x+1)(y-1)(-x^3+y x+x+y^3-y)",
            "-1/2(y^2-1)(x^2+y^2x+x+y^2)",
            "1/2(x+1)(y-y^3)",
            "-1/4(x+1)(y-1)y^2(y+1)",
            "1/4(x+1)(y+1)(x^3+(y-1)x+y(y^2-1))",
        ],
    ],
];

// ---------------------------------------------------------------------------
// Dense symmetric eigenvalue oracle: Cholesky, Householder, Sturm bisection
// ---------------------------------------------------------------------------

pub type Dense = Vec<Vec<f64>>;

fn cholesky(m: &Dense) -> Dense {
    let n = m.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| c[i][k] * c[j][k]).sum();
            if i == j {
                let d = m[i][i] - s;
                assert!(d > 0.0, "mass matrix not positive definite");
                c[i][i] = d.sqrt();
            } else {
                c[i][j] = (m[i][j] - s) / c[j][j];
            }
        }
    }
    c
}

/// `C⁻¹ A C⁻ᵀ` for lower-triangular `C`.
fn congruence(c: &Dense, a: &Dense) -> Dense {
    let n = a.len();
    // X = C⁻¹ A, column by column
    let mut x = vec![vec![0.0; n]; n];
    for col in 0..n {
        for i in 0..n {
            let s: f64 = (0..i).map(|k| c[i][k] * x[k][col]).sum();
            x[i][col] = (a[i][col] - s) / c[i][i];
        }
    }
    // B = C⁻¹ Xᵀ, and B = C⁻¹ A C⁻ᵀ since A is symmetric
    let mut b = vec![vec![0.0; n]; n];
    for col in 0..n {
        for i in 0..n {
            let s: f64 = (0..i).map(|k| c[i][k] * b[k][col]).sum();
            b[i][col] = (x[col][i] - s) / c[i][i];
        }
    }
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (b[i][j] + b[j][i]);
            b[i][j] = avg;
            b[j][i] = avg;
        }
    }
    b
}

/// Householder reduction to tridiagonal form: `(diagonal, off-diagonal)`.
fn tridiagonalize(mut a: Dense) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let alpha = -a[k + 1][k].signum() * alpha_sq.sqrt();
        let mut v = vec![0.0; n];
        v[k + 1] = a[k + 1][k] - alpha;
        for i in k + 2..n {
            v[i] = a[i][k];
        }
        let vnorm_sq: f64 = v.iter().map(|t| t * t).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        // A ← H A H with H = I − 2 v vᵀ / (vᵀ v)
        let p: Vec<f64> = (0..n)
            .map(|i| 2.0 * (0..n).map(|j| a[i][j] * v[j]).sum::<f64>() / vnorm_sq)
            .collect();
        let kcoef: f64 = (0..n).map(|i| v[i] * p[i]).sum::<f64>() / vnorm_sq;
        let q: Vec<f64> = (0..n).map(|i| p[i] - kcoef * v[i]).collect();
        for i in 0..n {
            for j in 0..n {
                a[i][j] -= v[i] * q[j] + q[i] * v[j];
            }
        }
    }
    let d = (0..n).map(|i| a[i][i]).collect();
    let e = (1..n).map(|i| a[i][i - 1]).collect();
    (d, e)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &Dense) -> Vec<f64> {
    let n = a.len();
    let (d, e) = tridiagonalize(a.clone());
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let span = (hi - lo).max(1.0);
    lo -= 1e-3 * span;
    hi += 1e-3 * span;
    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(&d, &e, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Eigenvalues of `L v = λ M v`, ascending.
pub fn generalized_eigenvalues(l: &Dense, m: &Dense) -> Vec<f64> {
    symmetric_eigenvalues(&congruence(&cholesky(m), l))
}

pub fn to_dense(m: &nalgebra::DMatrix<f64>) -> Dense {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// 1D continuous piecewise-polynomial FEM on [0, 1]
// ---------------------------------------------------------------------------

/// Coefficients in `s ∈ [−1, 1]`, lowest degree first.
type Poly1 = Vec<f64>;

fn legendre(k: usize) -> Poly1 {
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for n in 1..k {
        // (n+1) P_{n+1} = (2n+1) s P_n − n P_{n−1}
        let mut next = vec![0.0; n + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += (2 * n + 1) as f64 * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= n as f64 * c;
        }
        for c in &mut next {
            *c /= (n + 1) as f64;
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn antiderivative_from_minus_one(p: &Poly1) -> Poly1 {
    let mut out = vec![0.0; p.len() + 1];
    for (i, &c) in p.iter().enumerate() {
        out[i + 1] = c / (i + 1) as f64;
    }
    let at_minus_one: f64 = out
        .iter()
        .enumerate()
        .map(|(i, c)| c * (-1f64).powi(i as i32))
        .sum();
    out[0] -= at_minus_one;
    out
}

fn derivative(p: &Poly1) -> Poly1 {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

fn integral_product(a: &Poly1, b: &Poly1) -> f64 {
    let mut s = 0.0;
    for (i, &ca) in a.iter().enumerate() {
        for (j, &cb) in b.iter().enumerate() {
            if (i + j) % 2 == 0 {
                s += ca * cb * 2.0 / (i + j + 1) as f64;
            }
        }
    }
    s
}

/// Eigenvalues of the 1D Laplacian with degree-`p` continuous elements on `n`
/// equal cells of `[0, 1]`. Hierarchic basis: two hats plus integrated
/// Legendre bubbles.
pub fn fem_1d_eigenvalues(p: usize, n: usize, dirichlet: bool) -> Vec<f64> {
    let mut shapes: Vec<Poly1> = vec![vec![0.5, -0.5], vec![0.5, 0.5]];
    for k in 1..p {
        shapes.push(antiderivative_from_minus_one(&legendre(k)));
    }
    let dshapes: Vec<Poly1> = shapes.iter().map(derivative).collect();
    let h = 1.0 / n as f64;
    let nloc = p + 1;
    let total = n + 1 + n * (p - 1);
    let mut mass = vec![vec![0.0; total]; total];
    let mut stiff = vec![vec![0.0; total]; total];
    for el in 0..n {
        let mut map = vec![el, el + 1];
        map.extend((0..p - 1).map(|k| n + 1 + el * (p - 1) + k));
        for a in 0..nloc {
            for b in 0..nloc {
                mass[map[a]][map[b]] += 0.5 * h * integral_product(&shapes[a], &shapes[b]);
                stiff[map[a]][map[b]] += 2.0 / h * integral_product(&dshapes[a], &dshapes[b]);
            }
        }
    }
    let keep: Vec<usize> = (0..total)
        .filter(|&i| !(dirichlet && (i == 0 || i == n)))
        .collect();
    let restrict = |m: &Dense| -> Dense {
        keep.iter()
            .map(|&i| keep.iter().map(|&j| m[i][j]).collect())
            .collect()
    };
    generalized_eigenvalues(&restrict(&stiff), &restrict(&mass))
}

/// Closed-form lowest Dirichlet eigenvalue of the consistent-mass bilinear
/// scheme on an `n × n` unit-square grid, by separation of variables.
pub fn bilinear_dirichlet_lowest(n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let c = (std::f64::consts::PI * h).cos();
    2.0 * (6.0 / (h * h)) * (1.0 - c) / (2.0 + c)
}

/// Deterministic permutation of `0..n` (a multiplicative shuffle).
pub fn shuffle(n: usize) -> Vec<usize> {
    let mut mult = (n / 2 + 1).max(1);
    while gcd(mult, n) != 1 {
        mult += 1;
    }
    (0..n).map(|i| (i * mult + 3) % n.max(1)).collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
