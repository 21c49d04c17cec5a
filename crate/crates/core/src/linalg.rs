//! Exact linear algebra over the integers.
//!
//! Everything downstream reduces to three operations implemented here:
//! Smith normal form with unimodular transforms, integer linear system
//! solving, and homology of a pair of composable integer matrices. Entries
//! are arbitrary-precision; machine integers overflow on Smith reduction of
//! even modest inputs.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense matrix over Z, row-major. Zero rows or columns are legal; the
/// 0 by n and n by 0 matrices act as identities for block operations and
/// show up constantly as boundary maps at the ends of complexes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {} by {} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Convenience constructor from machine integers, row-major.
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        IntMatrix {
            rows,
            cols,
            entries: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.shape_eq(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.shape_eq(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn neg(&self) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {} by {} with {} by {}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j) + a * b;
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product: block (i, j) is `self[i][j] * other`.
    pub fn kronecker(&self, other: &Self) -> Self {
        let mut out = IntMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out.set(i * other.rows + p, j * other.cols + q, a * other.get(p, q));
                    }
                }
            }
        }
        out
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(IntMatrix { rows: self.rows + other.rows, cols: self.cols, entries })
    }

    /// Places `self` to the left of `other`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row mismatch".into()));
        }
        let mut out = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn block_diag(blocks: &[&IntMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = IntMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Copy of the block with the given half-open row and column ranges.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut out = IntMatrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "trace of a {} by {} matrix",
                self.rows, self.cols
            )));
        }
        let mut t = BigInt::zero();
        for i in 0..self.rows {
            t += self.get(i, i);
        }
        Ok(t)
    }

    /// Columns of the matrix as column vectors.
    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    fn shape_eq(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{} by {} vs {} by {}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += c * row[source]
    fn add_row(&mut self, target: usize, source: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(source, j) * c;
            let cur = self.get(target, j) + v;
            self.set(target, j, cur);
        }
    }

    /// col[target] += c * col[source]
    fn add_col(&mut self, target: usize, source: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, source) * c;
            let cur = self.get(i, target) + v;
            self.set(i, target, cur);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, c);
            self.set(i, c, v);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {} by {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Smith normal form `u * a * v == d` with `u`, `v` unimodular and `d`
/// diagonal, nonnegative, each diagonal entry dividing the next.
///
/// `u_inv` and `v_inv` are the exact inverses of `u` and `v`, tracked
/// during reduction; downstream code needs them for kernel coordinates and
/// quotient projections.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        let n = self.d.rows().min(self.d.cols());
        (0..n).filter(|&i| !self.d.get(i, i).is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.get(i, i).clone()).collect()
    }
}

/// Pivot choice is deterministic: smallest nonzero absolute value in the
/// remaining submatrix, ties broken in row-major order.
fn pick_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut best_abs: Option<BigInt> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let e = d.get(i, j);
            if e.is_zero() {
                continue;
            }
            let a = e.abs();
            match &best_abs {
                Some(b) if *b <= a => {}
                _ => {
                    best_abs = Some(a);
                    best = Some((i, j));
                }
            }
        }
    }
    best
}

pub fn smith(a: &IntMatrix) -> SmithDecomposition {
    let mut d = a.clone();
    let (m, n) = (a.rows(), a.cols());
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    // Row op L applied to d sends u to L u and u_inv to u_inv L^-1;
    // column op R sends v to v R and v_inv to R^-1 v_inv. Keeping all four
    // in lockstep is cheap and saves a separate inversion later.
    let mut t = 0;
    while let Some((pi, pj)) = pick_pivot(&d, t) {
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        v_inv.swap_rows(t, pj);

        loop {
            // Reduce column t by the pivot. Any nonzero remainder left in
            // the column becomes a strictly smaller pivot on the next pass.
            let mut dirty = false;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = div_round(d.get(i, t), d.get(t, t));
                if !q.is_zero() {
                    let c = -&q;
                    d.add_row(i, t, &c);
                    u.add_row(i, t, &c);
                    u_inv.add_col(t, i, &q);
                }
                if !d.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = div_round(d.get(t, j), d.get(t, t));
                if !q.is_zero() {
                    let c = -&q;
                    d.add_col(j, t, &c);
                    v.add_col(j, t, &c);
                    v_inv.add_row(t, j, &q);
                }
                if !d.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // Move the smallest remaining entry of row/column t into
                // the pivot position and run the reduction again.
                let mut best: Option<(usize, usize)> = None;
                let mut best_abs: Option<BigInt> = None;
                let mut consider = |i: usize, j: usize, e: &BigInt| {
                    if e.is_zero() {
                        return;
                    }
                    let a = e.abs();
                    if best_abs.as_ref().map_or(true, |b| a < *b) {
                        best_abs = Some(a);
                        best = Some((i, j));
                    }
                };
                consider(t, t, &d.get(t, t).clone());
                for i in t + 1..m {
                    consider(i, t, &d.get(i, t).clone());
                }
                for j in t + 1..n {
                    consider(t, j, &d.get(t, j).clone());
                }
                let (bi, bj) = best.expect("dirty reduction has a nonzero entry");
                d.swap_rows(t, bi);
                u.swap_rows(t, bi);
                u_inv.swap_cols(t, bi);
                d.swap_cols(t, bj);
                v.swap_cols(t, bj);
                v_inv.swap_rows(t, bj);
                continue;
            }

            // Column and row are clear. Enforce that the pivot divides the
            // whole remaining submatrix, which makes the final diagonal a
            // divisibility chain without a fix-up pass.
            let mut offender = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !d.get(i, j).mod_floor(d.get(t, t)).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    let minus_one = -BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                    u_inv.add_col(i, t, &minus_one);
                }
                None => break,
            }
        }

        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }
    SmithDecomposition { u, d, v, u_inv, v_inv }
}

/// Quotient minimizing the remainder's absolute value, so repeated
/// reduction terminates quickly.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    let babs = b.abs();
    if &r * 2 > babs {
        if b.is_negative() {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Solves `a * x == b` over Z for a matrix of right-hand columns. Returns
/// `None` when no integer solution exists. The solution is the canonical
/// one: in Smith coordinates every free parameter is set to zero.
pub fn solve(a: &IntMatrix, b: &IntMatrix) -> Result<Option<IntMatrix>> {
    if a.rows() != b.rows() {
        return Err(Error::Dimension(format!(
            "solve: coefficient matrix has {} rows, right-hand side {}",
            a.rows(),
            b.rows()
        )));
    }
    let s = smith(a);
    let c = s.u.mul(b).expect("u b");
    let n = a.cols();
    let rank = s.rank();
    let mut y = IntMatrix::zeros(n, b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let rhs = c.get(i, j);
            if i < rank {
                let di = s.d.get(i, i);
                let (q, r) = rhs.div_mod_floor(di);
                if !r.is_zero() {
                    return Ok(None);
                }
                y.set(i, j, q);
            } else if !rhs.is_zero() {
                return Ok(None);
            }
        }
    }
    Ok(Some(s.v.mul(&y).expect("v y")))
}

/// Basis of the kernel lattice of `a`, as columns. The kernel of an integer
/// matrix is a saturated sublattice, so these columns generate all integer
/// solutions of `a x == 0`.
pub fn kernel(a: &IntMatrix) -> IntMatrix {
    let s = smith(a);
    let rank = s.rank();
    let n = a.cols();
    s.v.submatrix(0, n, rank, n)
}

/// Incrementally built sparse integer linear system. Callers register
/// variables, accumulate equations as (variable, coefficient) terms, and
/// solve for one exact integer solution. The homotopy and witness searches
/// all reduce to this.
#[derive(Debug, Default)]
pub struct LinearSystem {
    n_vars: usize,
    equations: Vec<(Vec<(usize, BigInt)>, BigInt)>,
}

impl LinearSystem {
    pub fn new() -> Self {
        LinearSystem::default()
    }

    pub fn new_var(&mut self) -> usize {
        self.n_vars += 1;
        self.n_vars - 1
    }

    /// Registers `k` consecutive variables and returns the first index.
    pub fn new_vars(&mut self, k: usize) -> usize {
        let first = self.n_vars;
        self.n_vars += k;
        first
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Adds the equation `sum of coeff * var == rhs`. Repeated variables
    /// accumulate.
    pub fn add_equation(&mut self, terms: Vec<(usize, BigInt)>, rhs: BigInt) {
        for (v, _) in &terms {
            assert!(*v < self.n_vars, "equation references unregistered variable");
        }
        self.equations.push((terms, rhs));
    }

    /// One integer solution, or None when the system has no integer
    /// solution. Free variables are fixed deterministically by `solve`.
    pub fn solve(&self) -> Option<Vec<BigInt>> {
        let rows = self.equations.len();
        let mut a = IntMatrix::zeros(rows, self.n_vars);
        let mut b = IntMatrix::zeros(rows, 1);
        for (i, (terms, rhs)) in self.equations.iter().enumerate() {
            for (v, c) in terms {
                let cur = a.get(i, *v) + c;
                a.set(i, *v, cur);
            }
            b.set(i, 0, rhs.clone());
        }
        solve(&a, &b)
            .expect("shapes agree by construction")
            .map(|x| x.column(0))
    }
}

/// Finitely generated abelian group in canonical form: a free rank together
/// with invariant factors, each at least 2 and each dividing the next.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct FgAbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        for w in torsion.windows(2) {
            if !w[1].mod_floor(&w[0]).is_zero() {
                return Err(Error::Invalid(format!(
                    "invariant factor {} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        if torsion.iter().any(|t| *t < BigInt::from(2)) {
            return Err(Error::Invalid("invariant factors must be at least 2".into()));
        }
        Ok(FgAbelianGroup { free_rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { free_rank: rank, torsion: vec![] }
    }

    pub fn trivial() -> Self {
        FgAbelianGroup::free(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Canonicalizes a diagonal presentation: `total` generators, of which
    /// the ones hit by a diagonal entry are constrained by it.
    pub fn from_diagonal(diag: &[BigInt], total: usize) -> Self {
        let mut torsion: Vec<BigInt> = Vec::new();
        let mut killed = 0;
        for d in diag {
            if d.is_zero() {
                continue;
            }
            killed += 1;
            let a = d.abs();
            if a > BigInt::one() {
                torsion.push(a);
            }
        }
        FgAbelianGroup { free_rank: total - killed, torsion }
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{}", r)),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{}", t));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homology at the middle of `d_next` then `d_this`: kernel of `d_this`
/// modulo image of `d_next`. Requires `d_this * d_next == 0`.
pub fn homology(d_next: &IntMatrix, d_this: &IntMatrix) -> Result<FgAbelianGroup> {
    if d_this.cols() != d_next.rows() {
        return Err(Error::Dimension(format!(
            "homology: d_this has {} columns, d_next has {} rows",
            d_this.cols(),
            d_next.rows()
        )));
    }
    if !d_this.mul(d_next)?.is_zero() {
        return Err(Error::NotAComplex(
            "d_this composed with d_next is nonzero".into(),
        ));
    }
    let s = smith(d_this);
    let rank = s.rank();
    let n = d_this.cols();
    let kernel_dim = n - rank;
    // Kernel basis is the last columns of v; v_inv rewrites the image of
    // d_next in those coordinates. Rows above the kernel block vanish
    // because the composite is zero and the kernel lattice is saturated.
    let y = s.v_inv.mul(d_next)?;
    for i in 0..rank {
        for j in 0..y.cols() {
            if !y.get(i, j).is_zero() {
                return Err(Error::NotAComplex(
                    "image does not lie in the kernel lattice".into(),
                ));
            }
        }
    }
    let w = y.submatrix(rank, n, 0, y.cols());
    let sw = smith(&w);
    Ok(FgAbelianGroup::from_diagonal(&sw.diagonal(), kernel_dim))
}

/// Presentation of a homology group that keeps enough change-of-basis data
/// to transport endomorphisms: `H = Z^kernel_dim / image`, with `reduce`
/// mapping chain-level cycles to quotient coordinates.
#[derive(Clone, Debug)]
pub struct HomologyPresentation {
    /// Columns form a basis of the cycle lattice.
    pub kernel_basis: IntMatrix,
    /// Rewrites a cycle (column vector) in kernel-basis coordinates.
    kernel_coords: IntMatrix,
    /// Smith form of the image, in kernel-basis coordinates.
    image_smith: SmithDecomposition,
    pub group: FgAbelianGroup,
}

impl HomologyPresentation {
    pub fn new(d_next: &IntMatrix, d_this: &IntMatrix) -> Result<Self> {
        if d_this.cols() != d_next.rows() {
            return Err(Error::Dimension("homology presentation shapes".into()));
        }
        if !d_this.mul(d_next)?.is_zero() {
            return Err(Error::NotAComplex("d d != 0".into()));
        }
        let s = smith(d_this);
        let rank = s.rank();
        let n = d_this.cols();
        let kernel_basis = s.v.submatrix(0, n, rank, n);
        let kernel_coords = s.v_inv.submatrix(rank, n, 0, n);
        let y = s.v_inv.mul(d_next)?;
        let w = y.submatrix(rank, n, 0, y.cols());
        let image_smith = smith(&w);
        let group = FgAbelianGroup::from_diagonal(&image_smith.diagonal(), n - rank);
        Ok(HomologyPresentation {
            kernel_basis,
            kernel_coords,
            image_smith,
            group,
        })
    }

    /// Trace of the action induced on the free part of homology by a chain
    /// endomorphism `f` of the middle term.
    ///
    /// In Smith coordinates of the image, the torsion-free quotient is the
    /// block past the image rank, and an induced endomorphism restricts to
    /// that block.
    pub fn free_trace(&self, f: &IntMatrix) -> Result<BigInt> {
        let k = self.kernel_basis.cols();
        if k == 0 {
            return Ok(BigInt::zero());
        }
        // f maps cycles to cycles; rewrite its restriction in the kernel basis.
        let fk = f.mul(&self.kernel_basis)?;
        let on_kernel = self.kernel_coords.mul(&fk)?;
        let rank = self.image_smith.rank();
        let m = self.image_smith.u.mul(&on_kernel)?.mul(&self.image_smith.u_inv)?;
        let mut t = BigInt::zero();
        for i in rank..k {
            t += m.get(i, i);
        }
        Ok(t)
    }

    /// Chain-level cycles, one column per free generator of the homology
    /// group. Their classes form a basis of the torsion-free quotient.
    pub fn free_basis_cycles(&self) -> Result<IntMatrix> {
        let k = self.kernel_basis.cols();
        let rank = self.image_smith.rank();
        let lift = self.image_smith.u_inv.submatrix(0, k, rank, k);
        self.kernel_basis.mul(&lift)
    }

    /// Coordinates of the classes of the given cycles (columns) in the
    /// `free_basis_cycles` basis of the torsion-free quotient. Errors when
    /// a column is not a cycle; the result is independent of the choice of
    /// representative because boundaries have zero free coordinates.
    pub fn free_coords(&self, z: &IntMatrix) -> Result<IntMatrix> {
        if z.rows() != self.kernel_basis.rows() {
            return Err(Error::Dimension("cycle columns of the wrong length".into()));
        }
        let k = self.kernel_basis.cols();
        let in_kernel = self.kernel_coords.mul(z)?;
        if self.kernel_basis.mul(&in_kernel)? != *z {
            return Err(Error::Invalid("column is not a cycle".into()));
        }
        let coords = self.image_smith.u.mul(&in_kernel)?;
        let rank = self.image_smith.rank();
        Ok(coords.submatrix(rank, k, 0, coords.cols()))
    }

    /// Matrix of the map induced on torsion-free homology quotients by a
    /// chain-level map `g` that sends `src` cycles to `dst` cycles.
    pub fn induced_free_matrix(
        g: &IntMatrix,
        src: &HomologyPresentation,
        dst: &HomologyPresentation,
    ) -> Result<IntMatrix> {
        dst.free_coords(&g.mul(&src.free_basis_cycles()?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Cofactor determinant, test oracle only.
    fn det(m: &IntMatrix) -> BigInt {
        assert!(m.is_square());
        let n = m.rows();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut d = BigInt::zero();
        for j in 0..n {
            let mut minor = IntMatrix::zeros(n - 1, n - 1);
            for i in 1..n {
                let mut cj = 0;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    minor.set(i - 1, cj, m.get(i, k).clone());
                    cj += 1;
                }
            }
            let term = m.get(0, j) * det(&minor);
            if j % 2 == 0 {
                d += term;
            } else {
                d -= term;
            }
        }
        d
    }

    fn assert_smith_contract(a: &IntMatrix) {
        let s = smith(a);
        let uav = s.u.mul(a).unwrap().mul(&s.v).unwrap();
        assert_eq!(uav, s.d, "u a v == d");
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(a.rows()));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(a.cols()));
        if a.rows() <= 5 {
            assert_eq!(det(&s.u).abs(), BigInt::one(), "u unimodular");
        }
        if a.cols() <= 5 {
            assert_eq!(det(&s.v).abs(), BigInt::one(), "v unimodular");
        }
        let diag = s.diagonal();
        let mut seen_zero = false;
        for i in 0..diag.len() {
            assert!(!diag[i].is_negative(), "nonnegative diagonal");
            if diag[i].is_zero() {
                seen_zero = true;
            } else {
                assert!(!seen_zero, "zeros trail the nonzero entries");
            }
            if i + 1 < diag.len() && !diag[i].is_zero() && !diag[i + 1].is_zero() {
                assert!(
                    diag[i + 1].mod_floor(&diag[i]).is_zero(),
                    "divisibility chain at {}",
                    i
                );
            }
        }
        // Off-diagonal entries vanish.
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn smith_identity() {
        let a = IntMatrix::identity(3);
        let s = smith(&a);
        assert_eq!(s.d, IntMatrix::identity(3));
        assert_smith_contract(&a);
    }

    #[test]
    fn smith_zero_matrix() {
        let a = IntMatrix::zeros(2, 3);
        let s = smith(&a);
        assert!(s.d.is_zero());
        assert_smith_contract(&a);
    }

    #[test]
    fn smith_two_by_two() {
        let a = IntMatrix::from_i64(2, 2, &[2, 4, 6, 8]);
        let s = smith(&a);
        assert_eq!(s.d, IntMatrix::from_i64(2, 2, &[2, 0, 0, 4]));
        assert_smith_contract(&a);
    }

    #[test]
    fn smith_empty_shapes() {
        for (r, c) in [(0, 0), (0, 3), (3, 0)] {
            let a = IntMatrix::zeros(r, c);
            assert_smith_contract(&a);
        }
    }

    #[test]
    fn smith_assorted() {
        let cases: Vec<IntMatrix> = vec![
            IntMatrix::from_i64(2, 2, &[0, 1, -1, 0]),
            IntMatrix::from_i64(3, 3, &[2, 0, 0, 0, 3, 0, 0, 0, 5]),
            IntMatrix::from_i64(2, 3, &[6, 10, 15, 4, 6, 9]),
            IntMatrix::from_i64(3, 2, &[1, 2, 3, 4, 5, 6]),
            IntMatrix::from_i64(3, 3, &[-7, 11, 0, 13, -2, 9, 5, 5, 5]),
        ];
        for a in &cases {
            assert_smith_contract(a);
        }
    }

    #[test]
    fn solve_exact_and_unsolvable() {
        // 2x == 6 has x == 3; 2x == 5 has no integer solution.
        let a = IntMatrix::from_i64(1, 1, &[2]);
        let x = solve(&a, &IntMatrix::from_i64(1, 1, &[6])).unwrap().unwrap();
        assert_eq!(x, IntMatrix::from_i64(1, 1, &[3]));
        assert!(solve(&a, &IntMatrix::from_i64(1, 1, &[5])).unwrap().is_none());
    }

    #[test]
    fn solve_underdetermined_is_deterministic() {
        let a = IntMatrix::from_i64(1, 2, &[2, 3]);
        let b = IntMatrix::from_i64(1, 1, &[1]);
        let x = solve(&a, &b).unwrap().unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);
        let again = solve(&a, &b).unwrap().unwrap();
        assert_eq!(x, again);
    }

    #[test]
    fn solve_shape_mismatch_is_an_error() {
        let a = IntMatrix::from_i64(2, 2, &[1, 0, 0, 1]);
        let b = IntMatrix::from_i64(3, 1, &[1, 2, 3]);
        assert!(solve(&a, &b).is_err());
    }

    #[test]
    fn kernel_spans_solutions() {
        let a = IntMatrix::from_i64(1, 3, &[2, -4, 6]);
        let k = kernel(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn homology_free_rank_one() {
        // 0 -> Z -> 0 in the middle.
        let d_next = IntMatrix::zeros(1, 0);
        let d_this = IntMatrix::zeros(0, 1);
        let h = homology(&d_next, &d_this).unwrap();
        assert_eq!(h, FgAbelianGroup::free(1));
    }

    #[test]
    fn homology_torsion() {
        // Z --2--> Z -> 0 gives Z/2.
        let d_next = IntMatrix::from_i64(1, 1, &[2]);
        let d_this = IntMatrix::zeros(0, 1);
        let h = homology(&d_next, &d_this).unwrap();
        assert_eq!(h, FgAbelianGroup::new(0, vec![BigInt::from(2)]).unwrap());
    }

    #[test]
    fn homology_triangle_circle() {
        // Simplicial circle on three vertices: d1 is 3 by 3 of rank 2.
        let d1 = IntMatrix::from_i64(
            3,
            3,
            &[
                -1, -1, 0, //
                1, 0, -1, //
                0, 1, 1,
            ],
        );
        let h0 = homology(&d1, &IntMatrix::zeros(0, 3)).unwrap();
        assert_eq!(h0, FgAbelianGroup::free(1));
        let h1 = homology(&IntMatrix::zeros(3, 0), &d1).unwrap();
        assert_eq!(h1, FgAbelianGroup::free(1));
    }

    #[test]
    fn homology_rejects_noncomposable() {
        let d_next = IntMatrix::from_i64(1, 1, &[1]);
        let d_this = IntMatrix::from_i64(1, 1, &[1]);
        assert!(matches!(
            homology(&d_next, &d_this),
            Err(Error::NotAComplex(_))
        ));
    }

    #[test]
    fn presentation_free_trace_on_circle() {
        let d1 = IntMatrix::from_i64(
            3,
            3,
            &[
                -1, -1, 0, //
                1, 0, -1, //
                0, 1, 1,
            ],
        );
        // Identity acts as 1 on H1 = Z.
        let pres = HomologyPresentation::new(&IntMatrix::zeros(3, 0), &d1).unwrap();
        assert_eq!(pres.group, FgAbelianGroup::free(1));
        let t = pres.free_trace(&IntMatrix::identity(3)).unwrap();
        assert_eq!(t, BigInt::one());
    }

    #[test]
    fn free_basis_and_coords_invert_each_other() {
        // H = Z/2 + Z from a rank-2 kernel with image 2Z in one direction.
        let d_next = IntMatrix::from_i64(2, 1, &[2, 0]);
        let d_this = IntMatrix::zeros(0, 2);
        let pres = HomologyPresentation::new(&d_next, &d_this).unwrap();
        assert_eq!(pres.group.free_rank, 1);
        let basis = pres.free_basis_cycles().unwrap();
        assert_eq!((basis.rows(), basis.cols()), (2, 1));
        assert_eq!(pres.free_coords(&basis).unwrap(), IntMatrix::identity(1));
        // The torsion generator and its double both have zero free part.
        let torsion = IntMatrix::from_i64(2, 1, &[1, 0]);
        assert!(pres.free_coords(&torsion).unwrap().is_zero());
        // Shifting a cycle by a boundary leaves the coordinates unchanged.
        let shifted = basis.add(&IntMatrix::from_i64(2, 1, &[2, 0])).unwrap();
        assert_eq!(pres.free_coords(&shifted).unwrap(), IntMatrix::identity(1));
    }

    #[test]
    fn free_coords_rejects_non_cycles() {
        let d_this = IntMatrix::from_i64(1, 2, &[0, 1]);
        let pres = HomologyPresentation::new(&IntMatrix::zeros(2, 0), &d_this).unwrap();
        let not_cycle = IntMatrix::from_i64(2, 1, &[0, 1]);
        assert!(pres.free_coords(&not_cycle).is_err());
        let cycle = IntMatrix::from_i64(2, 1, &[3, 0]);
        assert_eq!(pres.free_coords(&cycle).unwrap(), IntMatrix::from_i64(1, 1, &[3]));
    }

    #[test]
    fn induced_free_matrix_tracks_degree() {
        // Circle-like kernel; a degree-d endomorphism of H1 = Z.
        let d1 = IntMatrix::from_i64(
            3,
            3,
            &[
                -1, -1, 0, //
                1, 0, -1, //
                0, 1, 1,
            ],
        );
        let pres = HomologyPresentation::new(&IntMatrix::zeros(3, 0), &d1).unwrap();
        let m = HomologyPresentation::induced_free_matrix(
            &IntMatrix::identity(3).scale(&BigInt::from(-3)),
            &pres,
            &pres,
        )
        .unwrap();
        assert_eq!(m, IntMatrix::from_i64(1, 1, &[-3]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = IntMatrix> {
            (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-9i64..=9, r * c)
                    .prop_map(move |es| IntMatrix::from_i64(r, c, &es))
            })
        }

        proptest! {
            #[test]
            fn smith_contract_holds(a in small_matrix()) {
                assert_smith_contract(&a);
            }

            #[test]
            fn solve_agrees_with_multiplication(a in small_matrix(), xs in proptest::collection::vec(-5i64..=5, 4)) {
                let x = IntMatrix::from_i64(a.cols(), 1, &xs[..a.cols()]);
                let b = a.mul(&x).unwrap();
                let found = solve(&a, &b).unwrap().expect("constructed system is solvable");
                prop_assert_eq!(a.mul(&found).unwrap(), b);
            }

            #[test]
            fn homology_invariant_under_row_basis_change(a in small_matrix()) {
                // H0 of the two-term complex Z^r <- Z^c computed directly
                // and after a unimodular change of target basis.
                let d_this = IntMatrix::zeros(0, a.rows());
                let h = homology(&a, &d_this).unwrap();
                let s = smith(&a);
                let a2 = s.u.mul(&a).unwrap();
                let h2 = homology(&a2, &d_this).unwrap();
                prop_assert_eq!(h, h2);
            }
        }
    }
}
