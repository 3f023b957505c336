//! Exact integer linear algebra: dense matrices over arbitrary-precision
//! integers, Smith normal form with tracked unimodular transforms, integer
//! kernels, and invariant factors of nested lattice quotients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense row-major matrix over `BigInt`.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        IntMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from row slices of machine integers; handy in tests.
    pub fn from_rows_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        for c in cols {
            assert_eq!(c.len(), rows, "column length mismatch");
        }
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "hstack of {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        }))
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "product of {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect())
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("subtraction shape".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            &self[(i, j)] - &other[(i, j)]
        }))
    }

    /// Entrywise reduction into `0..p`.
    pub fn reduce_mod(&self, p: u64) -> Self {
        let m = BigInt::from(p);
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].mod_floor(&m))
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

    /// row\[i\] += c * row\[j\]
    fn row_addmul(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.cols {
            let add = c * &self[(j, k)];
            self[(i, k)] += add;
        }
    }

    /// col\[j\] += c * col\[i\]
    fn col_addmul(&mut self, j: usize, i: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.rows {
            let add = c * &self[(k, i)];
            self[(k, j)] += add;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let v = -self[(i, k)].clone();
            self[(i, k)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for k in 0..self.rows {
            let v = -self[(k, j)].clone();
            self[(k, j)] = v;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Smith normal form `U * A * V = D` with `D` diagonal, non-negative and a
/// divisibility chain, `U` and `V` unimodular. Inverses of the transforms are
/// tracked alongside so callers can change basis in both directions.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        let n = self.d.rows().min(self.d.cols());
        (0..n).take_while(|&i| !self.d[(i, i)].is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Nonzero diagonal entries with the units dropped.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .collect()
    }
}

/// Quotient `q = round(a / b)` minimizing `|a - q b|`.
fn round_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(!b.is_zero());
    let (mut q, r) = a.div_mod_floor(b);
    if r.abs() * 2u8 > b.abs() {
        q += 1;
    }
    q
}

/// Smith normal form by smallest-nonzero pivoting. The pivot choice keeps
/// coefficient growth modest; arbitrary precision keeps it correct.
pub fn snf(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    // Elementary moves, each keeping u*a*v = d, u*u_inv = I, v*v_inv = I.
    macro_rules! row_swap {
        ($i:expr, $j:expr) => {{
            d.swap_rows($i, $j);
            u.swap_rows($i, $j);
            u_inv.swap_cols($i, $j);
        }};
    }
    macro_rules! col_swap {
        ($i:expr, $j:expr) => {{
            d.swap_cols($i, $j);
            v.swap_cols($i, $j);
            v_inv.swap_rows($i, $j);
        }};
    }
    macro_rules! row_op {
        // row[i] += c * row[j]
        ($i:expr, $j:expr, $c:expr) => {{
            let c: BigInt = $c;
            d.row_addmul($i, $j, &c);
            u.row_addmul($i, $j, &c);
            u_inv.col_addmul($j, $i, &(-c));
        }};
    }
    macro_rules! col_op {
        // col[j] += c * col[i]
        ($j:expr, $i:expr, $c:expr) => {{
            let c: BigInt = $c;
            d.col_addmul($j, $i, &c);
            v.col_addmul($j, $i, &c);
            v_inv.row_addmul($i, $j, &(-c));
        }};
    }

    let find_pivot = |d: &IntMatrix, k: usize| -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                if d[(i, j)].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some(b) => {
                        if d[(i, j)].abs() < d[b].abs() {
                            best = Some((i, j));
                        }
                    }
                }
            }
        }
        best
    };

    let rank_bound = m.min(n);
    let mut k = 0;
    while k < rank_bound {
        let Some((pi, pj)) = find_pivot(&d, k) else {
            break;
        };
        row_swap!(k, pi);
        col_swap!(k, pj);
        loop {
            // Clear the pivot column; residues smaller than the pivot may remain.
            for i in k + 1..m {
                if !d[(i, k)].is_zero() {
                    let q = round_quotient(&d[(i, k)], &d[(k, k)]);
                    row_op!(i, k, -q);
                }
            }
            if (k + 1..m).any(|i| !d[(i, k)].is_zero()) {
                let (pi, pj) = find_pivot(&d, k).expect("nonzero residue present");
                row_swap!(k, pi);
                col_swap!(k, pj);
                continue;
            }
            // Clear the pivot row.
            for j in k + 1..n {
                if !d[(k, j)].is_zero() {
                    let q = round_quotient(&d[(k, j)], &d[(k, k)]);
                    col_op!(j, k, -q);
                }
            }
            if (k + 1..n).any(|j| !d[(k, j)].is_zero()) {
                let (pi, pj) = find_pivot(&d, k).expect("nonzero residue present");
                row_swap!(k, pi);
                col_swap!(k, pj);
                continue;
            }
            // Pivot must divide the trailing submatrix for the chain to hold.
            let bad = (k + 1..m)
                .flat_map(|i| (k + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !(&d[(i, j)] % &d[(k, k)]).is_zero());
            match bad {
                Some((i, _)) => {
                    row_op!(k, i, BigInt::one());
                }
                None => break,
            }
        }
        if d[(k, k)].is_negative() {
            d.negate_row(k);
            u.negate_row(k);
            u_inv.negate_col(k);
        }
        k += 1;
    }

    SmithForm {
        d,
        u,
        v,
        u_inv,
        v_inv,
    }
}

fn check_prime(p: u64) -> Result<()> {
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    let mut f = 2u64;
    while f * f <= p {
        if p % f == 0 {
            return Err(Error::NotPrime(p));
        }
        f += 1;
    }
    Ok(())
}

fn to_mod_p(x: &BigInt, p: u64) -> u64 {
    use num_traits::ToPrimitive;
    x.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits u64")
}

/// Rank of `a` over the prime field F_p, by Gaussian elimination.
pub fn rank_mod_p(a: &IntMatrix, p: u64) -> Result<usize> {
    check_prime(p)?;
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<u64>> = (0..m)
        .map(|i| (0..n).map(|j| to_mod_p(&a[(i, j)], p)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..m).find(|&i| w[i][col] != 0) else {
            continue;
        };
        w.swap(rank, piv);
        let inv = mod_inverse(w[rank][col], p);
        for j in col..n {
            w[rank][j] = mulmod(w[rank][j], inv, p);
        }
        for i in 0..m {
            if i != rank && w[i][col] != 0 {
                let factor = w[i][col];
                for j in col..n {
                    let sub = mulmod(factor, w[rank][j], p);
                    w[i][j] = (w[i][j] + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    Ok(rank)
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0 mod p.
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mulmod(result, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    result
}

/// Rank over the rationals (equivalently the number of nonzero invariant factors).
pub fn rank_over_q(a: &IntMatrix) -> usize {
    snf(a).rank()
}

/// Row-reduced echelon data of `a` over F_p.
struct FpEchelon {
    rref: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    p: u64,
}

fn fp_echelon(a: &IntMatrix, p: u64) -> Result<FpEchelon> {
    check_prime(p)?;
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<u64>> = (0..m)
        .map(|i| (0..n).map(|j| to_mod_p(&a[(i, j)], p)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..m).find(|&i| w[i][col] != 0) else {
            continue;
        };
        w.swap(rank, piv);
        let inv = mod_inverse(w[rank][col], p);
        for j in 0..n {
            w[rank][j] = mulmod(w[rank][j], inv, p);
        }
        for i in 0..m {
            if i != rank && w[i][col] != 0 {
                let factor = w[i][col];
                for j in 0..n {
                    let sub = mulmod(factor, w[rank][j], p);
                    w[i][j] = (w[i][j] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }
    Ok(FpEchelon { rref: w, pivots, p })
}

/// Basis of the null space of `a` over F_p, entries in `0..p`.
pub fn fp_kernel_basis(a: &IntMatrix, p: u64) -> Result<IntMatrix> {
    let e = fp_echelon(a, p)?;
    let n = a.cols();
    let free: Vec<usize> = (0..n).filter(|c| !e.pivots.contains(c)).collect();
    let mut cols = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![BigInt::zero(); n];
        v[fc] = BigInt::one();
        for (row, &pc) in e.pivots.iter().enumerate() {
            let coeff = e.rref[row][fc];
            if coeff != 0 {
                v[pc] = BigInt::from(p - coeff);
            }
        }
        cols.push(v);
    }
    Ok(IntMatrix::from_columns(n, &cols))
}

/// Indices of a maximal set of linearly independent columns of `a` over F_p.
pub fn fp_pivot_columns(a: &IntMatrix, p: u64) -> Result<Vec<usize>> {
    Ok(fp_echelon(a, p)?.pivots)
}

/// Solves `a x = v` over F_p, returning entries in `0..p`.
pub fn fp_solve(a: &IntMatrix, v: &[BigInt], p: u64) -> Result<Option<Vec<BigInt>>> {
    if v.len() != a.rows() {
        return Err(Error::ShapeMismatch(format!(
            "vector of length {} against {} rows",
            v.len(),
            a.rows()
        )));
    }
    let mut rhs = IntMatrix::from_fn(a.rows(), 1, |i, _| v[i].clone());
    rhs = rhs.reduce_mod(p);
    let augmented = a.hstack(&rhs)?;
    let e = fp_echelon(&augmented, p)?;
    if e.pivots.contains(&a.cols()) {
        return Ok(None);
    }
    let mut x = vec![BigInt::zero(); a.cols()];
    for (row, &pc) in e.pivots.iter().enumerate() {
        x[pc] = BigInt::from(e.rref[row][a.cols()]);
    }
    Ok(Some(x))
}

/// Basis of the integer solution lattice `{x : A x = 0}`, as matrix columns.
pub fn integer_kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = snf(a);
    let r = s.rank();
    let cols: Vec<Vec<BigInt>> = (r..a.cols()).map(|j| s.v.column(j)).collect();
    IntMatrix::from_columns(a.cols(), &cols)
}

/// Precomputed data for membership and solving in an integer column span.
pub struct ColumnSpan {
    snf: SmithForm,
    ambient: usize,
}

impl ColumnSpan {
    pub fn new(m: &IntMatrix) -> Self {
        ColumnSpan {
            snf: snf(m),
            ambient: m.rows(),
        }
    }

    /// Solves `M x = v` over the integers, if possible.
    pub fn solve(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let y = self.snf.u.mul_vec(v).expect("shape");
        let r = self.snf.rank();
        let ncols = self.snf.v.rows();
        let mut z = vec![BigInt::zero(); ncols];
        for (i, yi) in y.iter().enumerate() {
            if i < r {
                let d = &self.snf.d[(i, i)];
                let (q, rem) = yi.div_mod_floor(d);
                if !rem.is_zero() {
                    return None;
                }
                z[i] = q;
            } else if !yi.is_zero() {
                return None;
            }
        }
        Some(self.snf.v.mul_vec(&z).expect("shape"))
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.solve(v).is_some()
    }
}

/// Isomorphism type of the quotient `L1 / L2` of integer lattices spanned by
/// the columns of `l1` and `l2`. Requires `span(l2) ⊆ span(l1)`, which is
/// checked; unit invariant factors are dropped.
pub fn lattice_quotient_invariants(
    l1: &IntMatrix,
    l2: &IntMatrix,
) -> Result<(usize, Vec<BigInt>)> {
    if l1.rows() != l2.rows() {
        return Err(Error::ShapeMismatch(format!(
            "lattices in ambient ranks {} and {}",
            l1.rows(),
            l2.rows()
        )));
    }
    let s1 = snf(l1);
    let r = s1.rank();
    // Coordinates of each l2 column in the basis {d_i * (U^-1 e_i)} of span(l1).
    let mut coords: Vec<Vec<BigInt>> = Vec::with_capacity(l2.cols());
    for j in 0..l2.cols() {
        let w = l2.column(j);
        let y = s1.u.mul_vec(&w).expect("shape");
        let mut x = vec![BigInt::zero(); r];
        for (i, yi) in y.iter().enumerate() {
            if i < r {
                let (q, rem) = yi.div_mod_floor(&s1.d[(i, i)]);
                if !rem.is_zero() {
                    return Err(Error::NonNestedLattice { column: j });
                }
                x[i] = q;
            } else if !yi.is_zero() {
                return Err(Error::NonNestedLattice { column: j });
            }
        }
        coords.push(x);
    }
    let x = IntMatrix::from_columns(r, &coords);
    let sx = snf(&x);
    let free_rank = r - sx.rank();
    Ok((free_rank, sx.invariant_factors()))
}

/// A finitely presented abelian group `Z^g / col-span(R)` rewritten in
/// invariant-factor coordinates. `to_canonical` maps generator coordinates to
/// canonical coordinates (torsion generators first, then free); a section
/// `from_canonical` lifts canonical generators back.
pub struct NormalizedQuotient {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    pub to_canonical: IntMatrix,
    pub from_canonical: IntMatrix,
}

pub fn normalize_quotient(gens: usize, relations: &IntMatrix) -> Result<NormalizedQuotient> {
    if relations.rows() != gens {
        return Err(Error::ShapeMismatch(format!(
            "{} relation rows for {gens} generators",
            relations.rows()
        )));
    }
    let s = snf(relations);
    let diag = s.diagonal();
    let order_of = |i: usize| -> BigInt {
        diag.get(i).cloned().unwrap_or_else(BigInt::zero)
    };
    let mut torsion_idx = Vec::new();
    let mut free_idx = Vec::new();
    for i in 0..gens {
        let d = order_of(i);
        if d.is_one() {
            continue;
        }
        if d.is_zero() {
            free_idx.push(i);
        } else {
            torsion_idx.push(i);
        }
    }
    let kept: Vec<usize> = torsion_idx.iter().chain(free_idx.iter()).copied().collect();
    let torsion: Vec<BigInt> = torsion_idx.iter().map(|&i| order_of(i)).collect();
    let to_canonical = IntMatrix::from_fn(kept.len(), gens, |i, j| s.u[(kept[i], j)].clone());
    let from_canonical = IntMatrix::from_fn(gens, kept.len(), |i, j| s.u_inv[(i, kept[j])].clone());
    Ok(NormalizedQuotient {
        free_rank: free_idx.len(),
        torsion,
        to_canonical,
        from_canonical,
    })
}
