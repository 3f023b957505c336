//! Constructible modules over the real line with field coefficients, their
//! rank functions `(a,b) -> dim im F(a < b - δ)` with the δ resolved exactly
//! on the critical structure, Möbius inversion into type-B persistence
//! diagrams, the diagram preorder and diagram erosion distance, and the
//! barcode/bottleneck oracle for the one-dimensional interleaving distance.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::rank_mod_p;
use crate::module::{Coefficients, PersistenceModule, RankInvariant};
use crate::poset::{DgmPoint, PosetPoint};
use crate::rational::ExtRat;

/// A constructible module `R -> Vect`: zero before the first critical value,
/// transitions isomorphisms away from the critical set. Stored as a finite
/// grid module on its critical values; the step extension supplies the rest.
pub struct ConstructibleModule {
    module: PersistenceModule,
    prime: u64,
}

impl ConstructibleModule {
    pub fn new(module: PersistenceModule) -> Result<Self> {
        if module.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: module.dim(),
            });
        }
        let Coefficients::Field(prime) = module.coefficients() else {
            return Err(Error::InvalidModule(
                "constructible modules need field coefficients".into(),
            ));
        };
        Ok(ConstructibleModule { module, prime })
    }

    pub fn critical_values(&self) -> &[BigRational] {
        &self.module.axes()[0]
    }

    pub fn module(&self) -> &PersistenceModule {
        &self.module
    }

    pub fn rank_invariant(&self) -> RankInvariant {
        RankInvariant::new(self.module.clone())
    }

    fn rank_between(&self, i: usize, j: usize) -> Result<usize> {
        let t = self.module.transition_map(&[i], &[j])?;
        rank_mod_p(&t, self.prime)
    }

    /// `dim im F(a < b - δ)` for δ small enough that the image has
    /// stabilized: evaluate at the largest critical value strictly below `b`.
    pub fn dgm_b_value(&self, d: &DgmPoint) -> Result<i64> {
        if d.a.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: d.a.dim(),
            });
        }
        let a = &d.a.coords[0];
        let b = &d.b.coords[0];
        let crit = self.critical_values();
        let Some(snapped_a) = self.module.step_lookup(std::slice::from_ref(a))? else {
            return Ok(0);
        };
        let below = crit.partition_point(|v| v < b);
        if below == 0 {
            return Ok(0);
        }
        let j = below - 1;
        Ok(self.rank_between(snapped_a[0], j)? as i64)
    }

    /// The type-B persistence diagram of this module.
    pub fn diagram(&self) -> Result<TypeBDiagram> {
        mobius_invert(|d| self.dgm_b_value(d), self.critical_values())
    }

    /// Barcode by inclusion-exclusion on ranks; a negative multiplicity
    /// signals invalid module data.
    pub fn barcode(&self) -> Result<Barcode> {
        let diagram = self.diagram()?;
        let mut intervals = Vec::new();
        for ((birth, death), mult) in &diagram.masses {
            if *mult < 0 {
                return Err(Error::NegativeMultiplicity {
                    birth: birth.to_string(),
                    death: death.to_string(),
                    multiplicity: *mult,
                });
            }
            intervals.push((birth.clone(), death.clone(), *mult as usize));
        }
        Ok(Barcode { intervals })
    }
}

/// A finitely supported integer-valued diagram over the extended diagram
/// domain: masses at `(birth, death)` with `birth < death <= ∞`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TypeBDiagram {
    masses: BTreeMap<(BigRational, ExtRat), i64>,
}

impl TypeBDiagram {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn add_mass(&mut self, birth: BigRational, death: ExtRat, mass: i64) -> Result<()> {
        if ExtRat::Finite(birth.clone()) >= death {
            return Err(Error::InvalidDgmPoint(format!(
                "diagram point ({birth}, {death}) is not above the diagonal"
            )));
        }
        if mass == 0 {
            return Ok(());
        }
        let entry = self.masses.entry((birth, death)).or_insert(0);
        *entry += mass;
        if *entry == 0 {
            self.masses.retain(|_, m| *m != 0);
        }
        Ok(())
    }

    pub fn support(&self) -> impl Iterator<Item = (&(BigRational, ExtRat), &i64)> {
        self.masses.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total_mass(&self) -> i64 {
        self.masses.values().sum()
    }

    /// Upper-set sum at `(α, β)`: total mass with `birth <= α` and `death >= β`.
    pub fn upper_set_sum(&self, alpha: &BigRational, beta: &ExtRat) -> i64 {
        self.masses
            .iter()
            .filter(|((b, d), _)| b <= alpha && d >= beta)
            .map(|(_, m)| m)
            .sum()
    }

    /// Erode by `ε`: move each mass toward the diagonal on both sides and
    /// kill masses that reach or cross it.
    pub fn erode(&self, eps: &BigRational) -> TypeBDiagram {
        let mut out = TypeBDiagram::empty();
        for ((birth, death), mass) in &self.masses {
            let new_birth = birth + eps;
            let new_death = match death {
                ExtRat::Finite(d) => ExtRat::Finite(d - eps),
                ExtRat::Infinite => ExtRat::Infinite,
            };
            if ExtRat::Finite(new_birth.clone()) < new_death {
                out.add_mass(new_birth, new_death, *mass).expect("above diagonal");
            }
        }
        out
    }

    fn births(&self) -> Vec<BigRational> {
        self.masses.keys().map(|(b, _)| b.clone()).collect()
    }

    fn finite_deaths(&self) -> Vec<BigRational> {
        self.masses
            .keys()
            .filter_map(|(_, d)| d.finite().cloned())
            .collect()
    }
}

/// Möbius inversion of a rank function on its critical grid: the unique
/// finitely supported diagram whose upper-set sums reproduce `dgm` exactly.
/// The input is probed at two representatives per critical cell; any
/// disagreement means no grid-supported inversion exists.
pub fn mobius_invert<F>(dgm: F, grid: &[BigRational]) -> Result<TypeBDiagram>
where
    F: Fn(&DgmPoint) -> Result<i64>,
{
    let m = grid.len();
    if m == 0 {
        return Ok(TypeBDiagram::empty());
    }
    for w in grid.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidModule(
                "critical grid is not strictly increasing".into(),
            ));
        }
    }
    let half = BigRational::new(1.into(), 2.into());
    let one = BigRational::one();
    // representatives of the a-class [s_i, s_{i+1}) and b-class (s_j, s_{j+1}]
    let a_rep = |i: usize| grid[i].clone();
    let a_rep2 = |i: usize| {
        if i + 1 < m {
            (&grid[i] + &grid[i + 1]) * &half
        } else {
            &grid[i] + &half
        }
    };
    let b_rep = |j: usize| {
        if j + 1 < m {
            grid[j + 1].clone()
        } else {
            &grid[j] + &one
        }
    };
    let b_rep2 = |j: usize| {
        if j + 1 < m {
            (&grid[j] + &grid[j + 1]) * &half
        } else {
            &grid[j] + &(&one + &one)
        }
    };
    let eval = |a: BigRational, b: BigRational| -> Result<i64> {
        let d = DgmPoint::new(PosetPoint::new(vec![a]), PosetPoint::new(vec![b]))
            .expect("class representatives are ordered");
        dgm(&d)
    };
    // rank table r[i][j] = dgm on the class pair (i, j), for i <= j; probe a
    // second representative in each coordinate to catch inputs that are not
    // constant on the critical cells
    let mut r = vec![vec![0i64; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = eval(a_rep(i), b_rep(j))?;
            let v_a = eval(a_rep2(i), b_rep(j))?;
            let v_b = eval(a_rep(i), b_rep2(j))?;
            if v != v_a || v != v_b {
                return Err(Error::InconsistentRankFunction(format!(
                    "value changes inside the critical cell ({i}, {j})"
                )));
            }
            r[i][j] = v;
        }
    }
    let rk = |i: isize, j: usize| -> i64 {
        if i < 0 {
            0
        } else {
            r[i as usize][j]
        }
    };
    let mut diagram = TypeBDiagram::empty();
    for i in 0..m {
        let ii = i as isize;
        for k in i + 1..m {
            let mass = rk(ii, k - 1) - rk(ii - 1, k - 1) - rk(ii, k) + rk(ii - 1, k);
            diagram.add_mass(grid[i].clone(), ExtRat::Finite(grid[k].clone()), mass)?;
        }
        let inf_mass = rk(ii, m - 1) - rk(ii - 1, m - 1);
        diagram.add_mass(grid[i].clone(), ExtRat::Infinite, inf_mass)?;
    }
    Ok(diagram)
}

/// Diagram preorder: upper-set sums compare at every point of the combined
/// critical grid.
pub fn diagram_leq(f: &TypeBDiagram, g: &TypeBDiagram) -> bool {
    let mut alphas: Vec<BigRational> = f.births();
    alphas.extend(g.births());
    alphas.sort();
    alphas.dedup();
    let mut deaths: Vec<BigRational> = f.finite_deaths();
    deaths.extend(g.finite_deaths());
    deaths.sort();
    deaths.dedup();
    let max_death = deaths.last().cloned();
    for alpha in &alphas {
        let mut betas: Vec<ExtRat> = deaths
            .iter()
            .filter(|d| *d > alpha)
            .map(|d| ExtRat::Finite(d.clone()))
            .collect();
        let beyond = match &max_death {
            Some(d) => d.max(alpha) + BigRational::one(),
            None => alpha + BigRational::one(),
        };
        betas.push(ExtRat::Finite(beyond));
        for beta in &betas {
            if f.upper_set_sum(alpha, beta) > g.upper_set_sum(alpha, beta) {
                return false;
            }
        }
    }
    true
}

/// Erosion distance between type-B diagrams: the least candidate `ε` with
/// `∇_{Ω_ε} F ⪯ G` and `∇_{Ω_ε} G ⪯ F` under the linear family on the line.
pub fn diagram_erosion_distance(f: &TypeBDiagram, g: &TypeBDiagram) -> ExtRat {
    let mut coords: Vec<BigRational> = f.births();
    coords.extend(g.births());
    coords.extend(f.finite_deaths());
    coords.extend(g.finite_deaths());
    let mut candidates = vec![BigRational::zero()];
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            let diff = (&coords[i] - &coords[j]).abs();
            candidates.push(diff.clone() / BigRational::from_integer(2.into()));
            candidates.push(diff);
        }
    }
    candidates.sort();
    candidates.dedup();
    for eps in candidates {
        if diagram_leq(&f.erode(&eps), g) && diagram_leq(&g.erode(&eps), f) {
            return ExtRat::Finite(eps);
        }
    }
    ExtRat::Infinite
}

/// A multiset of half-open intervals `[birth, death)` with `death` possibly
/// infinite; the matching oracle for the interleaving distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Barcode {
    intervals: Vec<(BigRational, ExtRat, usize)>,
}

impl Barcode {
    pub fn new(intervals: Vec<(BigRational, ExtRat, usize)>) -> Result<Self> {
        for (b, d, _) in &intervals {
            if ExtRat::Finite(b.clone()) >= *d {
                return Err(Error::InvalidDgmPoint(format!(
                    "interval [{b}, {d}) is empty"
                )));
            }
        }
        Ok(Barcode { intervals })
    }

    pub fn intervals(&self) -> &[(BigRational, ExtRat, usize)] {
        &self.intervals
    }

    fn expand(&self) -> Vec<(BigRational, ExtRat)> {
        let mut out = Vec::new();
        for (b, d, m) in &self.intervals {
            for _ in 0..*m {
                out.push((b.clone(), d.clone()));
            }
        }
        out
    }
}

fn interval_cost(a: &(BigRational, ExtRat), b: &(BigRational, ExtRat)) -> ExtRat {
    let birth_gap = (&a.0 - &b.0).abs();
    match (&a.1, &b.1) {
        (ExtRat::Finite(da), ExtRat::Finite(db)) => {
            ExtRat::Finite(birth_gap.max((da - db).abs()))
        }
        (ExtRat::Infinite, ExtRat::Infinite) => ExtRat::Finite(birth_gap),
        _ => ExtRat::Infinite,
    }
}

fn diagonal_cost(a: &(BigRational, ExtRat)) -> ExtRat {
    match &a.1 {
        ExtRat::Finite(d) => ExtRat::Finite((d - &a.0) / BigRational::from_integer(2.into())),
        ExtRat::Infinite => ExtRat::Infinite,
    }
}

/// Simple augmenting-path bipartite matching.
fn has_perfect_matching(n_left: usize, n_right: usize, adj: &[Vec<usize>]) -> bool {
    if n_left != n_right {
        return false;
    }
    let mut matched_right: Vec<Option<usize>> = vec![None; n_right];
    fn try_assign(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        matched_right: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if matched_right[v].is_none()
                    || try_assign(matched_right[v].unwrap(), adj, seen, matched_right)
                {
                    matched_right[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    for u in 0..n_left {
        let mut seen = vec![false; n_right];
        if !try_assign(u, adj, &mut seen, &mut matched_right) {
            return false;
        }
    }
    true
}

/// Exact bottleneck distance between barcodes: the least candidate cost at
/// which the augmented bipartite graph (each side padded with the other's
/// diagonal tokens) has a perfect matching.
pub fn bottleneck(b1: &Barcode, b2: &Barcode) -> ExtRat {
    let left = b1.expand();
    let right = b2.expand();
    let (n1, n2) = (left.len(), right.len());

    let mut candidates: Vec<BigRational> = vec![BigRational::zero()];
    for a in &left {
        if let ExtRat::Finite(c) = diagonal_cost(a) {
            candidates.push(c);
        }
    }
    for b in &right {
        if let ExtRat::Finite(c) = diagonal_cost(b) {
            candidates.push(c);
        }
    }
    for a in &left {
        for b in &right {
            if let ExtRat::Finite(c) = interval_cost(a, b) {
                candidates.push(c);
            }
        }
    }
    candidates.sort();
    candidates.dedup();

    let feasible = |c: &BigRational| -> bool {
        let cost = ExtRat::Finite(c.clone());
        // left: real intervals of b1, then diagonal tokens of b2
        // right: real intervals of b2, then diagonal tokens of b1
        let total = n1 + n2;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
        for (i, a) in left.iter().enumerate() {
            for (j, b) in right.iter().enumerate() {
                if interval_cost(a, b) <= cost {
                    adj[i].push(j);
                }
            }
            if diagonal_cost(a) <= cost {
                adj[i].push(n2 + i);
            }
        }
        for (j, b) in right.iter().enumerate() {
            if diagonal_cost(b) <= cost {
                adj[n1 + j].push(j);
            }
            for i in 0..n1 {
                adj[n1 + j].push(n2 + i);
            }
        }
        has_perfect_matching(total, total, &adj)
    };

    // feasibility is monotone in the cost: take the least feasible candidate
    let mut lo = 0usize;
    let mut hi = candidates.len();
    if hi == 0 || !feasible(&candidates[hi - 1]) {
        return ExtRat::Infinite;
    }
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if feasible(&candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let idx = if feasible(&candidates[lo]) { lo } else { hi };
    ExtRat::Finite(candidates[idx].clone())
}

/// Interleaving distance of one-dimensional field modules via the classical
/// isometry with the bottleneck distance; the oracle side of the stability
/// checks.
pub fn interleaving_distance_1d(f: &ConstructibleModule, g: &ConstructibleModule) -> Result<ExtRat> {
    Ok(bottleneck(&f.barcode()?, &g.barcode()?))
}
