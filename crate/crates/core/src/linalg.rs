//! Exact linear algebra over the complex rationals.
//!
//! Elimination runs fraction-free: each row is scaled to Gaussian-integer
//! entries, cross-multiplication updates keep it that way, and rows are
//! divided by their content (gcd of all components) after every update so
//! coefficients stay small. Pivots are chosen by smallest bit size, ties
//! broken by row sparsity; the reduced echelon form, and hence the nullspace
//! basis extracted from it, does not depend on that choice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::GaussianRational;

/// Dense row-major matrix of exact complex rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![GaussianRational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend(row);
        }
        Self {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &GaussianRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GaussianRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[GaussianRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Applies the matrix to a vector.
    pub fn apply(&self, x: &[GaussianRational]) -> Vec<GaussianRational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = GaussianRational::zero();
                for c in 0..self.cols {
                    let m = self.get(r, c);
                    if !m.is_zero() && !x[c].is_zero() {
                        acc = &acc + &(m * &x[c]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let int_rows = (0..self.rows).map(|r| int_scale_row(self.row(r), &[])).collect();
        reduced_echelon(int_rows, self.cols).pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Canonical nullspace basis: one vector per free column of the reduced
    /// echelon form, in increasing free-column order, with a one in the free
    /// slot. Identical matrices always produce identical bases.
    pub fn nullspace(&self) -> Vec<Vec<GaussianRational>> {
        let int_rows = (0..self.rows).map(|r| int_scale_row(self.row(r), &[])).collect();
        let ech = reduced_echelon(int_rows, self.cols);
        let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::with_capacity(self.cols - pivot_cols.len());
        for f in 0..self.cols {
            if pivot_cols.contains(&f) {
                continue;
            }
            let mut v = vec![GaussianRational::zero(); self.cols];
            v[f] = GaussianRational::one();
            for &(pr, pc) in &ech.pivots {
                let entry = &ech.rows[pr][f];
                if !entry.is_zero() {
                    v[pc] = -&gi_div_rational(entry, &ech.rows[pr][pc]);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `M x = rhs` with every free variable zero, or `None`
    /// when the system is inconsistent.
    pub fn solve(&self, rhs: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
        assert_eq!(rhs.len(), self.rows);
        let int_rows = (0..self.rows)
            .map(|r| int_scale_row(self.row(r), &[rhs[r].clone()]))
            .collect();
        // The augmented column is excluded from pivoting.
        let ech = reduced_echelon(int_rows, self.cols);
        for (r, row) in ech.rows.iter().enumerate() {
            let is_pivot_row = ech.pivots.iter().any(|&(pr, _)| pr == r);
            if !is_pivot_row && !row[self.cols].is_zero() {
                return None;
            }
        }
        let mut x = vec![GaussianRational::zero(); self.cols];
        for &(pr, pc) in &ech.pivots {
            let aug = &ech.rows[pr][self.cols];
            if !aug.is_zero() {
                x[pc] = gi_div_rational(aug, &ech.rows[pr][pc]);
            }
        }
        Some(x)
    }
}

impl std::fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ExactMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Gaussian integer, the working scalar during elimination.
#[derive(Clone, PartialEq, Eq)]
struct GInt {
    re: BigInt,
    im: BigInt,
}

impl GInt {
    fn zero() -> Self {
        Self {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, rhs: &Self) -> Self {
        Self {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        Self {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }

    fn bit_size(&self) -> u64 {
        self.re.magnitude().bits() + self.im.magnitude().bits()
    }
}

/// Scales a rational row (plus optional extra entries) by the lcm of all
/// denominators, producing Gaussian-integer entries.
fn int_scale_row(row: &[GaussianRational], extra: &[GaussianRational]) -> Vec<GInt> {
    let mut l = BigInt::one();
    for v in row.iter().chain(extra) {
        l = l.lcm(v.re().denom());
        l = l.lcm(v.im().denom());
    }
    let scale = BigRational::from_integer(l);
    row.iter()
        .chain(extra)
        .map(|v| {
            let re = v.re() * &scale;
            let im = v.im() * &scale;
            debug_assert!(re.is_integer() && im.is_integer());
            GInt {
                re: re.to_integer(),
                im: im.to_integer(),
            }
        })
        .collect()
}

/// Divides a row by the gcd of all its integer components.
fn reduce_content(row: &mut [GInt]) {
    let mut g = BigInt::zero();
    for v in row.iter() {
        g = g.gcd(&v.re);
        g = g.gcd(&v.im);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for v in row.iter_mut() {
        v.re = &v.re / &g;
        v.im = &v.im / &g;
    }
}

struct Echelon {
    rows: Vec<Vec<GInt>>,
    /// `(row, col)` per pivot, in increasing column order.
    pivots: Vec<(usize, usize)>,
}

/// Gauss-Jordan elimination over the first `pivot_cols` columns. Columns
/// beyond that (augmented right-hand sides) are carried along but never
/// pivoted on. After return, every pivot column is zero outside its pivot.
fn reduced_echelon(mut rows: Vec<Vec<GInt>>, pivot_cols: usize) -> Echelon {
    for row in rows.iter_mut() {
        reduce_content(row);
    }
    let nrows = rows.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0usize;
    for col in 0..pivot_cols {
        let mut best: Option<(u64, usize, usize)> = None;
        for r in next..nrows {
            if rows[r][col].is_zero() {
                continue;
            }
            let nnz = rows[r].iter().filter(|v| !v.is_zero()).count();
            let key = (rows[r][col].bit_size(), nnz, r);
            let better = match &best {
                None => true,
                Some((b, n, _)) => (key.0, key.1) < (*b, *n),
            };
            if better {
                best = Some(key);
            }
        }
        let Some((_, _, chosen)) = best else { continue };
        rows.swap(next, chosen);
        for k in 0..nrows {
            if k == next || rows[k][col].is_zero() {
                continue;
            }
            let (piv_row, row_k) = if k < next {
                let (a, b) = rows.split_at_mut(next);
                (&b[0], &mut a[k])
            } else {
                let (a, b) = rows.split_at_mut(k);
                (&a[next], &mut b[0])
            };
            let piv = piv_row[col].clone();
            let factor = row_k[col].clone();
            for c in 0..row_k.len() {
                let from_k = if row_k[c].is_zero() {
                    GInt::zero()
                } else {
                    row_k[c].mul(&piv)
                };
                let from_piv = if piv_row[c].is_zero() {
                    GInt::zero()
                } else {
                    piv_row[c].mul(&factor)
                };
                row_k[c] = from_k.sub(&from_piv);
            }
            debug_assert!(row_k[col].is_zero());
            reduce_content(row_k);
        }
        pivots.push((next, col));
        next += 1;
    }
    Echelon { rows, pivots }
}

/// Exact Gaussian-integer division `a / b` as a complex rational.
fn gi_div_rational(a: &GInt, b: &GInt) -> GaussianRational {
    let norm = &b.re * &b.re + &b.im * &b.im;
    assert!(!norm.is_zero(), "division by zero pivot");
    let re = &a.re * &b.re + &a.im * &b.im;
    let im = &a.im * &b.re - &a.re * &b.im;
    GaussianRational::new(
        BigRational::new(re, norm.clone()),
        BigRational::new(im, norm),
    )
}

/// Outcome of evaluating a quadratic form over a whole span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpanEvaluation {
    /// The form is zero at every point of the span.
    VanishesIdentically,
    /// A span vector where the form is nonzero.
    Witness(Vec<GaussianRational>),
}

/// Sparse quadratic form `sum c * x_a * x_b` on coordinate vectors.
#[derive(Clone, Debug)]
pub struct QuadraticForm {
    dim: usize,
    terms: Vec<(usize, usize, GaussianRational)>,
}

impl QuadraticForm {
    pub fn new(dim: usize, terms: Vec<(usize, usize, GaussianRational)>) -> Self {
        for (a, b, _) in &terms {
            assert!(*a < dim && *b < dim, "index out of range");
        }
        Self { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[GaussianRational]) -> GaussianRational {
        assert_eq!(x.len(), self.dim);
        let mut acc = GaussianRational::zero();
        for (a, b, c) in &self.terms {
            if x[*a].is_zero() || x[*b].is_zero() {
                continue;
            }
            acc = &acc + &(c * &(&x[*a] * &x[*b]));
        }
        acc
    }

    /// Decides whether the form vanishes on the whole span of `basis`.
    ///
    /// Over a field of characteristic zero a quadratic form vanishes on a
    /// span exactly when it vanishes on every basis vector and on every
    /// pairwise sum, so the search is finite. Candidates are tried in a
    /// fixed order (basis vectors first, then sums `v_i + v_j` for `i < j`
    /// lexicographically) so the returned witness is deterministic.
    ///
    /// Only the coordinates the form actually reads are materialized per
    /// candidate; the full vector is built once for the returned witness.
    pub fn evaluate_on_span(&self, basis: &[Vec<GaussianRational>]) -> SpanEvaluation {
        let mut support: Vec<usize> = self
            .terms
            .iter()
            .flat_map(|(a, b, _)| [*a, *b])
            .collect();
        support.sort_unstable();
        support.dedup();
        let proj: Vec<Vec<GaussianRational>> = basis
            .iter()
            .map(|v| {
                assert_eq!(v.len(), self.dim);
                support.iter().map(|&s| v[s].clone()).collect()
            })
            .collect();
        let eval_proj = |x: &[GaussianRational]| {
            let mut acc = GaussianRational::zero();
            for (a, b, c) in &self.terms {
                let xa = &x[support.binary_search(a).unwrap()];
                let xb = &x[support.binary_search(b).unwrap()];
                if !xa.is_zero() && !xb.is_zero() {
                    acc = &acc + &(c * &(xa * xb));
                }
            }
            acc
        };
        for (i, pv) in proj.iter().enumerate() {
            if !eval_proj(pv).is_zero() {
                return SpanEvaluation::Witness(basis[i].clone());
            }
        }
        for i in 0..proj.len() {
            for k in (i + 1)..proj.len() {
                let sum: Vec<GaussianRational> = proj[i]
                    .iter()
                    .zip(&proj[k])
                    .map(|(a, b)| a + b)
                    .collect();
                if !eval_proj(&sum).is_zero() {
                    let full: Vec<GaussianRational> = basis[i]
                        .iter()
                        .zip(&basis[k])
                        .map(|(a, b)| a + b)
                        .collect();
                    return SpanEvaluation::Witness(full);
                }
            }
        }
        SpanEvaluation::VanishesIdentically
    }
}
