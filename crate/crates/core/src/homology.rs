//! Sublevel-set filtrations of rational-valued functions on finite simplicial
//! complexes and finite discrete spaces, simplicial homology with integer and
//! prime-field coefficients including cycle representatives and induced maps,
//! the level-set invariant whose erosion distance is the sup-norm distance,
//! and the brute-force natural pseudo-distance between small size pairs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::category::{CatObject, FieldSpec};
use crate::error::{Error, Result};
use crate::matrix::{
    fp_kernel_basis, fp_pivot_columns, fp_solve, integer_kernel_basis, normalize_quotient,
    ColumnSpan, IntMatrix,
};
use crate::module::{Coefficients, PersistenceModule};
use crate::par;
use crate::rational::ExtRat;

/// A finite simplicial complex: simplices stored by dimension as sorted
/// vertex lists, closed under faces by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    simplices: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        SimplicialComplex { simplices: vec![] }
    }

    /// A discrete space on vertices `0..n`.
    pub fn discrete(n: usize) -> Self {
        Self::from_simplices((0..n).map(|v| vec![v])).expect("vertices are valid simplices")
    }

    /// Builds the downward closure of the given simplices.
    pub fn from_simplices<I>(simplices: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        for mut s in simplices {
            s.sort_unstable();
            let before = s.len();
            s.dedup();
            if s.len() != before {
                return Err(Error::InvalidModule(format!(
                    "simplex {s:?} repeats a vertex"
                )));
            }
            if s.is_empty() {
                continue;
            }
            // all non-empty subsets, so closure under faces holds by construction
            let n = s.len();
            for mask in 1u64..(1 << n) {
                let face: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                let dim = face.len() - 1;
                while by_dim.len() <= dim {
                    by_dim.push(BTreeSet::new());
                }
                by_dim[dim].insert(face);
            }
        }
        Ok(SimplicialComplex {
            simplices: by_dim
                .into_iter()
                .map(|set| set.into_iter().collect())
                .collect(),
        })
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.simplices_of_dim(0).iter().map(|s| s[0]).collect()
    }

    pub fn simplices_of_dim(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn simplex_count(&self, k: usize) -> usize {
        self.simplices_of_dim(k).len()
    }

    pub fn dimension(&self) -> Option<usize> {
        if self.simplices.is_empty() {
            None
        } else {
            Some(self.simplices.len() - 1)
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let count = s.len() as i64;
                if k % 2 == 0 {
                    count
                } else {
                    -count
                }
            })
            .sum()
    }

    fn index_of(&self, k: usize, simplex: &[usize]) -> Option<usize> {
        self.simplices_of_dim(k)
            .binary_search_by(|s| s.as_slice().cmp(simplex))
            .ok()
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.simplices.iter().enumerate().all(|(k, list)| {
            list.iter().all(|s| other.index_of(k, s).is_some())
        })
    }

    /// Boundary matrix of degree `k`: rows indexed by (k-1)-simplices,
    /// columns by k-simplices, with alternating signs on sorted vertices.
    pub fn boundary_matrix(&self, k: usize) -> IntMatrix {
        let cols = self.simplex_count(k);
        if k == 0 {
            return IntMatrix::zeros(0, cols);
        }
        let rows = self.simplex_count(k - 1);
        let mut m = IntMatrix::zeros(rows, cols);
        for (j, simplex) in self.simplices_of_dim(k).iter().enumerate() {
            for drop in 0..simplex.len() {
                let face: Vec<usize> = simplex
                    .iter()
                    .enumerate()
                    .filter(|(pos, _)| *pos != drop)
                    .map(|(_, &v)| v)
                    .collect();
                let i = self
                    .index_of(k - 1, &face)
                    .expect("closed under faces");
                m[(i, j)] = if drop % 2 == 0 {
                    BigInt::one()
                } else {
                    -BigInt::one()
                };
            }
        }
        m
    }

    /// The full subcomplex on a vertex set.
    pub fn full_subcomplex(&self, keep: &BTreeSet<usize>) -> SimplicialComplex {
        let simplices = self
            .simplices
            .iter()
            .map(|list| {
                list.iter()
                    .filter(|s| s.iter().all(|v| keep.contains(v)))
                    .cloned()
                    .collect::<Vec<_>>()
            })
            .take_while(|list| !list.is_empty())
            .collect();
        SimplicialComplex { simplices }
    }
}

/// Sublevel complex `K<φ <= a>`: the full subcomplex on the vertices whose
/// values lie componentwise below `a` (the lower-star convention: a simplex
/// enters when its last vertex does).
pub fn sublevel_complex(
    complex: &SimplicialComplex,
    values: &BTreeMap<usize, Vec<BigRational>>,
    level: &[BigRational],
) -> Result<SimplicialComplex> {
    let mut keep = BTreeSet::new();
    for v in complex.vertices() {
        let Some(val) = values.get(&v) else {
            return Err(Error::DomainMismatch(format!("vertex {v} has no value")));
        };
        if val.len() != level.len() {
            return Err(Error::DimensionMismatch {
                expected: level.len(),
                got: val.len(),
            });
        }
        if val.iter().zip(level).all(|(x, a)| x <= a) {
            keep.insert(v);
        }
    }
    Ok(complex.full_subcomplex(&keep))
}

enum CycleExpressor {
    Int {
        kernel_span: ColumnSpan,
        to_canonical: IntMatrix,
        orders: Vec<BigInt>,
    },
    Fp {
        // image basis columns first, then the homology representatives
        basis: IntMatrix,
        image_rank: usize,
        p: u64,
    },
}

/// Homology of a complex in one degree: the isomorphism type, integer cycle
/// representatives for each generator, and the change-of-basis data needed to
/// express arbitrary cycles in the generator basis.
pub struct ComplexHomology {
    complex: SimplicialComplex,
    degree: usize,
    coefficients: Coefficients,
    object: CatObject,
    representatives: IntMatrix,
    expressor: CycleExpressor,
}

impl ComplexHomology {
    pub fn compute(
        complex: &SimplicialComplex,
        degree: usize,
        coefficients: Coefficients,
    ) -> Result<Self> {
        let d_k = complex.boundary_matrix(degree);
        let d_k1 = complex.boundary_matrix(degree + 1);
        match coefficients {
            Coefficients::Int => {
                let kernel = integer_kernel_basis(&d_k);
                let kernel_span = ColumnSpan::new(&kernel);
                // boundaries in kernel coordinates
                let mut coords = Vec::with_capacity(d_k1.cols());
                for j in 0..d_k1.cols() {
                    let col = d_k1.column(j);
                    let x = kernel_span.solve(&col).ok_or_else(|| {
                        Error::InvalidModule("boundary is not a cycle".into())
                    })?;
                    coords.push(x);
                }
                let x = IntMatrix::from_columns(kernel.cols(), &coords);
                let norm = normalize_quotient(kernel.cols(), &x)?;
                let object = CatObject::Ab {
                    free_rank: norm.free_rank,
                    torsion: norm.torsion.clone(),
                };
                let representatives = kernel.mul(&norm.from_canonical)?;
                let mut orders = norm.torsion.clone();
                orders.extend(std::iter::repeat(BigInt::zero()).take(norm.free_rank));
                Ok(ComplexHomology {
                    complex: complex.clone(),
                    degree,
                    coefficients,
                    object,
                    representatives,
                    expressor: CycleExpressor::Int {
                        kernel_span,
                        to_canonical: norm.to_canonical,
                        orders,
                    },
                })
            }
            Coefficients::Field(p) => {
                let kernel = fp_kernel_basis(&d_k, p)?;
                // image basis: independent boundary columns
                let pivot_cols = fp_pivot_columns(&d_k1, p)?;
                let image_cols: Vec<Vec<BigInt>> =
                    pivot_cols.iter().map(|&j| d_k1.column(j)).collect();
                let image = IntMatrix::from_columns(d_k1.rows(), &image_cols);
                // extend the image basis to the kernel by greedily keeping
                // kernel generators that increase the rank
                let mut basis = image.clone();
                let mut reps: Vec<Vec<BigInt>> = Vec::new();
                for j in 0..kernel.cols() {
                    let cand = kernel.column(j);
                    let trial = basis.hstack(&IntMatrix::from_columns(kernel.rows(), &[cand.clone()]))?;
                    if fp_pivot_columns(&trial, p)?.len() > fp_pivot_columns(&basis, p)?.len() {
                        basis = trial;
                        reps.push(cand);
                    }
                }
                let dim = reps.len();
                let representatives = IntMatrix::from_columns(kernel.rows(), &reps);
                Ok(ComplexHomology {
                    complex: complex.clone(),
                    degree,
                    coefficients,
                    object: CatObject::vect(dim, FieldSpec::Prime(p)),
                    representatives,
                    expressor: CycleExpressor::Fp {
                        basis,
                        image_rank: image_cols.len(),
                        p,
                    },
                })
            }
        }
    }

    pub fn object(&self) -> &CatObject {
        &self.object
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Integer cycle vectors generating the homology, one column per
    /// generator (torsion generators first for integer coefficients).
    pub fn cycle_representatives(&self) -> &IntMatrix {
        &self.representatives
    }

    /// Coordinates of a cycle in the generator basis, reduced modulo the
    /// generator orders. Failure to express a cycle signals an internal basis
    /// bug, not a user error.
    pub fn express_cycle(&self, cycle: &[BigInt]) -> Result<Vec<BigInt>> {
        match &self.expressor {
            CycleExpressor::Int {
                kernel_span,
                to_canonical,
                orders,
            } => {
                let y = kernel_span.solve(cycle).ok_or_else(|| {
                    Error::InvalidModule("cycle does not lie in the kernel basis".into())
                })?;
                let mut h = to_canonical.mul_vec(&y)?;
                for (hi, order) in h.iter_mut().zip(orders) {
                    if !order.is_zero() {
                        *hi = hi.mod_floor(order);
                    }
                }
                Ok(h)
            }
            CycleExpressor::Fp {
                basis,
                image_rank,
                p,
            } => {
                let x = fp_solve(basis, cycle, *p)?.ok_or_else(|| {
                    Error::InvalidModule("cycle is not spanned by the homology basis".into())
                })?;
                Ok(x[*image_rank..].to_vec())
            }
        }
    }
}

use num_integer::Integer;

/// Matrix of the map induced on homology by an inclusion of complexes, with
/// respect to the two stored generator bases.
pub fn induced_homology_map(sub: &ComplexHomology, sup: &ComplexHomology) -> Result<IntMatrix> {
    if sub.degree != sup.degree || sub.coefficients != sup.coefficients {
        return Err(Error::DomainMismatch(
            "induced map needs matching degree and coefficients".into(),
        ));
    }
    if !sub.complex.is_subcomplex_of(&sup.complex) {
        return Err(Error::DomainMismatch(
            "first complex is not a subcomplex of the second".into(),
        ));
    }
    let k = sub.degree;
    let small = sub.complex.simplices_of_dim(k);
    let target_count = sup.complex.simplex_count(k);
    let index_map: Vec<usize> = small
        .iter()
        .map(|s| sup.complex.index_of(k, s).expect("subcomplex checked"))
        .collect();
    let gens_sub = sub.representatives.cols();
    let gens_sup = sup.object.generator_count()?;
    let mut out = IntMatrix::zeros(gens_sup, gens_sub);
    for j in 0..gens_sub {
        let mut pushed = vec![BigInt::zero(); target_count];
        for (small_idx, &big_idx) in index_map.iter().enumerate() {
            pushed[big_idx] = sub.representatives[(small_idx, j)].clone();
        }
        let coords = sup.express_cycle(&pushed)?;
        for i in 0..gens_sup {
            out[(i, j)] = coords[i].clone();
        }
    }
    Ok(out)
}

/// A space with an `R^n`-valued function on its vertices.
#[derive(Clone, Debug)]
pub struct SizePair {
    pub complex: SimplicialComplex,
    pub values: BTreeMap<usize, Vec<BigRational>>,
}

impl SizePair {
    pub fn new(
        complex: SimplicialComplex,
        values: BTreeMap<usize, Vec<BigRational>>,
    ) -> Result<Self> {
        let mut dim = None;
        for v in complex.vertices() {
            let Some(val) = values.get(&v) else {
                return Err(Error::DomainMismatch(format!("vertex {v} has no value")));
            };
            match dim {
                None => {
                    if val.is_empty() {
                        return Err(Error::DomainMismatch("empty value vector".into()));
                    }
                    dim = Some(val.len());
                }
                Some(d) if d == val.len() => {}
                Some(d) => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: val.len(),
                    })
                }
            }
        }
        Ok(SizePair { complex, values })
    }

    pub fn value_dim(&self) -> usize {
        self.values.values().next().map_or(1, Vec::len)
    }

    pub fn is_discrete(&self) -> bool {
        self.complex.dimension().map_or(true, |d| d == 0)
    }

    /// The grid of all distinct value coordinates, per axis.
    pub fn value_grid(&self) -> Vec<Vec<BigRational>> {
        let n = self.value_dim();
        let mut axes = vec![Vec::new(); n];
        for val in self.values.values() {
            for (axis, x) in val.iter().enumerate() {
                axes[axis].push(x.clone());
            }
        }
        for axis in &mut axes {
            axis.sort();
            axis.dedup();
        }
        axes
    }
}

/// The combined value grid of two size pairs, suitable for comparing their
/// sublevel modules on a common domain.
pub fn joint_value_grid(a: &SizePair, b: &SizePair) -> Result<Vec<Vec<BigRational>>> {
    let ga = a.value_grid();
    let gb = b.value_grid();
    if ga.len() != gb.len() {
        return Err(Error::DimensionMismatch {
            expected: ga.len(),
            got: gb.len(),
        });
    }
    Ok(ga
        .into_iter()
        .zip(gb)
        .map(|(mut x, y)| {
            x.extend(y);
            x.sort();
            x.dedup();
            x
        })
        .collect())
}

/// Persistence module of the sublevel-set filtration of a size pair on the
/// given grid: objects are homology groups of sublevel complexes, edge maps
/// are induced by inclusions. Functoriality is validated before returning.
pub fn module_from_size_pair(
    pair: &SizePair,
    axes: &[Vec<BigRational>],
    degree: usize,
    coefficients: Coefficients,
) -> Result<PersistenceModule> {
    let dim = axes.len();
    if dim != pair.value_dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.value_dim(),
            got: dim,
        });
    }
    let lens: Vec<usize> = axes.iter().map(Vec::len).collect();
    let npoints: usize = lens.iter().product();

    // many grid points share a sublevel vertex set; compute homology once per
    // distinct set
    let mut subset_of_point = Vec::with_capacity(npoints);
    let mut distinct: Vec<BTreeSet<usize>> = Vec::new();
    let mut subset_index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut idx = vec![0usize; dim];
    for _ in 0..npoints {
        let level: Vec<BigRational> = idx
            .iter()
            .enumerate()
            .map(|(axis, &i)| axes[axis][i].clone())
            .collect();
        let mut keep = BTreeSet::new();
        for (v, val) in &pair.values {
            if val.iter().zip(&level).all(|(x, a)| x <= a) {
                keep.insert(*v);
            }
        }
        let key: Vec<usize> = keep.iter().copied().collect();
        let slot = *subset_index.entry(key).or_insert_with(|| {
            distinct.push(keep);
            distinct.len() - 1
        });
        subset_of_point.push(slot);
        // advance the row-major multi-index
        for axis in (0..dim).rev() {
            idx[axis] += 1;
            if idx[axis] < lens[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }

    let homologies: Vec<Result<Arc<ComplexHomology>>> = par::map_collect(&distinct, |keep| {
        let sub = pair.complex.full_subcomplex(keep);
        ComplexHomology::compute(&sub, degree, coefficients).map(Arc::new)
    });
    let mut homology_of_subset = Vec::with_capacity(homologies.len());
    for h in homologies {
        homology_of_subset.push(h?);
    }

    let objects: Vec<CatObject> = subset_of_point
        .iter()
        .map(|&s| homology_of_subset[s].object().clone())
        .collect();

    // cover edges
    let mut edge_keys = Vec::new();
    for point_idx in 0..npoints {
        let point = unflatten(point_idx, &lens);
        for axis in 0..dim {
            if point[axis] + 1 < lens[axis] {
                edge_keys.push((point.clone(), axis));
            }
        }
    }
    let maps: Vec<Result<IntMatrix>> = par::map_collect(&edge_keys, |(point, axis)| {
        let from = subset_of_point[flatten(point, &lens)];
        let mut upper = point.clone();
        upper[*axis] += 1;
        let to = subset_of_point[flatten(&upper, &lens)];
        if from == to {
            let gens = homology_of_subset[from].object().generator_count()?;
            return Ok(IntMatrix::identity(gens));
        }
        induced_homology_map(&homology_of_subset[from], &homology_of_subset[to])
    });
    let mut edges = HashMap::new();
    for ((point, axis), map) in edge_keys.into_iter().zip(maps) {
        edges.insert((point, axis), map?);
    }

    let module = PersistenceModule::new(axes.to_vec(), coefficients, objects, edges)?;
    module.validate_functoriality()?;
    Ok(module)
}

fn flatten(point: &[usize], lens: &[usize]) -> usize {
    point
        .iter()
        .zip(lens)
        .fold(0, |acc, (&i, &len)| acc * len + i)
}

fn unflatten(mut idx: usize, lens: &[usize]) -> Vec<usize> {
    let mut point = vec![0; lens.len()];
    for axis in (0..lens.len()).rev() {
        point[axis] = idx % lens[axis];
        idx /= lens[axis];
    }
    point
}

/// A function on a finite set, inducing the Set-valued level-set invariant
/// `F(a,b) = f^{-1}([a,b])` ordered by reverse inclusion.
#[derive(Clone, Debug)]
pub struct LevelSetInvariant {
    values: Vec<BigRational>,
}

impl LevelSetInvariant {
    pub fn new(values: Vec<BigRational>) -> Self {
        LevelSetInvariant { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// `f^{-1}([a, b])` as a bitmask over the domain.
    fn preimage(&self, a: &BigRational, b: &BigRational) -> u128 {
        let mut mask = 0u128;
        for (i, v) in self.values.iter().enumerate() {
            if v >= a && v <= b {
                mask |= 1 << i;
            }
        }
        mask
    }
}

/// Does `∇_ε F <= G` hold for the level-set invariants, i.e. is
/// `G(a,b) ⊆ F(a-ε, b+ε)` for every `a < b`? The invariants are step
/// functions, right-closed in `a` and left-closed in `b`, so the check is a
/// finite sweep over cell representatives.
fn levelset_dominates(f: &LevelSetInvariant, g: &LevelSetInvariant, eps: &BigRational) -> bool {
    let one = BigRational::one();
    // a-direction breakpoints: g's values and f's values shifted up by ε
    let mut a_bp: Vec<BigRational> = g.values.to_vec();
    a_bp.extend(f.values.iter().map(|v| v + eps));
    a_bp.sort();
    a_bp.dedup();
    let mut b_bp: Vec<BigRational> = g.values.to_vec();
    b_bp.extend(f.values.iter().map(|v| v - eps));
    b_bp.sort();
    b_bp.dedup();
    if a_bp.is_empty() {
        return true;
    }
    // right-closed cells in a: representatives are the breakpoints plus one
    // past the top; cell infima are the previous breakpoints
    let mut a_cells: Vec<(BigRational, Option<BigRational>)> = Vec::new();
    for (i, c) in a_bp.iter().enumerate() {
        let lower = if i == 0 { None } else { Some(a_bp[i - 1].clone()) };
        a_cells.push((c.clone(), lower));
    }
    a_cells.push((a_bp.last().unwrap() + &one, Some(a_bp.last().unwrap().clone())));
    // left-closed cells in b: representatives are the breakpoints plus one
    // below the bottom; cell suprema are the next breakpoints
    let mut b_cells: Vec<(BigRational, Option<BigRational>)> = Vec::new();
    b_cells.push((b_bp.first().unwrap() - &one, Some(b_bp.first().unwrap().clone())));
    for (i, c) in b_bp.iter().enumerate() {
        let upper = b_bp.get(i + 1).cloned();
        b_cells.push((c.clone(), upper));
    }
    for (a_rep, a_lower) in &a_cells {
        for (b_rep, b_upper) in &b_cells {
            // the pair of cells must contain a point with a < b
            let feasible = match (a_lower, b_upper) {
                (None, _) => true,
                (_, None) => true,
                (Some(lo), Some(hi)) => lo < hi,
            };
            if !feasible {
                continue;
            }
            let g_set = g.preimage(a_rep, b_rep);
            let f_set = f.preimage(&(a_rep - eps), &(b_rep + eps));
            if g_set & !f_set != 0 {
                return false;
            }
        }
    }
    true
}

/// Erosion distance of the level-set invariants of two functions on the same
/// finite set; by the sup-norm theorem this equals `max |f - g|`, which the
/// acceptance suite verifies against this computation.
pub fn levelset_invariant_distance(
    f: &LevelSetInvariant,
    g: &LevelSetInvariant,
) -> Result<BigRational> {
    if f.len() != g.len() {
        return Err(Error::DomainMismatch(format!(
            "functions on sets of size {} and {}",
            f.len(),
            g.len()
        )));
    }
    if f.is_empty() {
        return Ok(BigRational::zero());
    }
    let mut all: Vec<BigRational> = f.values.to_vec();
    all.extend(g.values.iter().cloned());
    let mut candidates = vec![BigRational::zero()];
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let diff = (&all[i] - &all[j]).abs();
            candidates.push(diff.clone() / BigRational::from_integer(2.into()));
            candidates.push(diff);
        }
    }
    candidates.sort();
    candidates.dedup();
    for eps in candidates {
        if levelset_dominates(f, g, &eps) && levelset_dominates(g, f, &eps) {
            return Ok(eps);
        }
    }
    unreachable!("the sup-norm of the difference is always a passing candidate")
}

/// Brute-force natural pseudo-distance between size pairs over finite
/// discrete spaces: the minimum over all bijections of the sup-norm matching
/// cost. Spaces of different sizes are not homeomorphic and give `∞`.
pub fn npd_bruteforce(s1: &SizePair, s2: &SizePair) -> Result<ExtRat> {
    const CAP: usize = 8;
    if !s1.is_discrete() || !s2.is_discrete() {
        return Err(Error::DomainMismatch(
            "natural pseudo-distance enumeration needs discrete spaces".into(),
        ));
    }
    let xs = s1.complex.vertices();
    let ys = s2.complex.vertices();
    if xs.len() != ys.len() {
        return Ok(ExtRat::Infinite);
    }
    if xs.len() > CAP {
        return Err(Error::SizeCap {
            got: xs.len(),
            cap: CAP,
        });
    }
    if xs.is_empty() {
        return Ok(ExtRat::zero());
    }
    if s1.value_dim() != s2.value_dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.value_dim(),
            got: s2.value_dim(),
        });
    }
    let phi: Vec<&Vec<BigRational>> = xs.iter().map(|v| &s1.values[v]).collect();
    let psi: Vec<&Vec<BigRational>> = ys.iter().map(|v| &s2.values[v]).collect();
    let n = xs.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<BigRational> = None;
    permute(&mut perm, 0, &mut |p| {
        let mut cost = BigRational::zero();
        for (x, &y) in p.iter().enumerate() {
            for (a, b) in phi[x].iter().zip(psi[y]) {
                let d = (a - b).abs();
                if d > cost {
                    cost = d;
                }
            }
        }
        match &best {
            Some(b) if *b <= cost => {}
            _ => best = Some(cost),
        }
    });
    Ok(ExtRat::Finite(best.expect("nonempty permutation set")))
}

fn permute<F: FnMut(&[usize])>(items: &mut Vec<usize>, start: usize, visit: &mut F) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};

    fn triangle_boundary() -> SimplicialComplex {
        SimplicialComplex::from_simplices([vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn filled_triangle() -> SimplicialComplex {
        SimplicialComplex::from_simplices([vec![0, 1, 2]]).unwrap()
    }

    /// The 6-vertex triangulation of the real projective plane.
    pub(crate) fn projective_plane() -> SimplicialComplex {
        SimplicialComplex::from_simplices([
            vec![0, 1, 3],
            vec![0, 1, 5],
            vec![0, 2, 3],
            vec![0, 2, 4],
            vec![0, 4, 5],
            vec![1, 2, 4],
            vec![1, 2, 5],
            vec![1, 3, 4],
            vec![2, 3, 5],
            vec![3, 4, 5],
        ])
        .unwrap()
    }

    #[test]
    fn closure_and_counts() {
        let t = filled_triangle();
        assert_eq!(t.simplex_count(0), 3);
        assert_eq!(t.simplex_count(1), 3);
        assert_eq!(t.simplex_count(2), 1);
        assert_eq!(t.euler_characteristic(), 1);
        let rp2 = projective_plane();
        assert_eq!(rp2.simplex_count(0), 6);
        assert_eq!(rp2.simplex_count(1), 15);
        assert_eq!(rp2.simplex_count(2), 10);
        assert_eq!(rp2.euler_characteristic(), 1);
        assert!(SimplicialComplex::from_simplices([vec![0, 0]]).is_err());
    }

    #[test]
    fn boundary_squares_to_zero() {
        for complex in [filled_triangle(), projective_plane()] {
            for k in 1..=2 {
                let d1 = complex.boundary_matrix(k);
                let d2 = complex.boundary_matrix(k + 1);
                assert!(d1.mul(&d2).unwrap().is_zero(), "degree {k}");
            }
        }
    }

    #[test]
    fn homology_of_standard_spaces() {
        // circle: H_1 = Z
        let h = ComplexHomology::compute(&triangle_boundary(), 1, Coefficients::Int).unwrap();
        assert_eq!(h.object(), &CatObject::ab(1, vec![]));
        // point: H_0 = Z
        let point = SimplicialComplex::discrete(1);
        let h = ComplexHomology::compute(&point, 0, Coefficients::Int).unwrap();
        assert_eq!(h.object(), &CatObject::ab(1, vec![]));
        // disk: H_1 = 0
        let h = ComplexHomology::compute(&filled_triangle(), 1, Coefficients::Int).unwrap();
        assert_eq!(h.object(), &CatObject::ab(0, vec![]));
    }

    #[test]
    fn projective_plane_torsion() {
        let rp2 = projective_plane();
        let h1 = ComplexHomology::compute(&rp2, 1, Coefficients::Int).unwrap();
        assert_eq!(h1.object(), &CatObject::ab(0, vec![2]));
        let h2 = ComplexHomology::compute(&rp2, 2, Coefficients::Int).unwrap();
        assert_eq!(h2.object(), &CatObject::ab(0, vec![]));
        let h0 = ComplexHomology::compute(&rp2, 0, Coefficients::Int).unwrap();
        assert_eq!(h0.object(), &CatObject::ab(1, vec![]));

        // over F2 the torsion class becomes a dimension, in degrees 1 and 2
        let h1 = ComplexHomology::compute(&rp2, 1, Coefficients::Field(2)).unwrap();
        assert_eq!(h1.object(), &CatObject::vect(1, FieldSpec::Prime(2)));
        let h2 = ComplexHomology::compute(&rp2, 2, Coefficients::Field(2)).unwrap();
        assert_eq!(h2.object(), &CatObject::vect(1, FieldSpec::Prime(2)));
        // over F3 the torsion is invisible
        let h1 = ComplexHomology::compute(&rp2, 1, Coefficients::Field(3)).unwrap();
        assert_eq!(h1.object(), &CatObject::vect(0, FieldSpec::Prime(3)));
    }

    #[test]
    fn induced_maps() {
        // equal complexes: identity
        let c = triangle_boundary();
        let h = ComplexHomology::compute(&c, 1, Coefficients::Int).unwrap();
        let m = induced_homology_map(&h, &h).unwrap();
        assert!(m.is_identity());

        // circle into disk: H_1 dies
        let disk = filled_triangle();
        let hd = ComplexHomology::compute(&disk, 1, Coefficients::Int).unwrap();
        let m = induced_homology_map(&h, &hd).unwrap();
        assert_eq!(m.rows(), 0);
        assert_eq!(m.cols(), 1);

        // two points into a segment: components merge, rank 1 map
        let two = SimplicialComplex::discrete(2);
        let segment = SimplicialComplex::from_simplices([vec![0, 1]]).unwrap();
        let h2 = ComplexHomology::compute(&two, 0, Coefficients::Int).unwrap();
        let hs = ComplexHomology::compute(&segment, 0, Coefficients::Int).unwrap();
        let m = induced_homology_map(&h2, &hs).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 2));
        assert_eq!(crate::matrix::rank_over_q(&m), 1);
    }

    #[test]
    fn sublevel_complexes() {
        let t = filled_triangle();
        let values: BTreeMap<usize, Vec<BigRational>> = [
            (0, vec![rint(0)]),
            (1, vec![rint(1)]),
            (2, vec![rint(2)]),
        ]
        .into_iter()
        .collect();
        let below = sublevel_complex(&t, &values, &[rint(-1)]).unwrap();
        assert_eq!(below.simplex_count(0), 0);
        let all = sublevel_complex(&t, &values, &[rint(5)]).unwrap();
        assert_eq!(all, t);
        let mid = sublevel_complex(&t, &values, &[rint(1)]).unwrap();
        assert_eq!(mid.simplex_count(0), 2);
        assert_eq!(mid.simplex_count(1), 1);
        assert_eq!(mid.simplex_count(2), 0);
    }

    #[test]
    fn size_pair_modules() {
        // height function on a segment: an interval-type H_0 module
        let segment = SimplicialComplex::from_simplices([vec![0, 1]]).unwrap();
        let values: BTreeMap<usize, Vec<BigRational>> =
            [(0, vec![rint(0)]), (1, vec![rint(1)])].into_iter().collect();
        let pair = SizePair::new(segment, values).unwrap();
        let grid = pair.value_grid();
        let module = module_from_size_pair(&pair, &grid, 0, Coefficients::Field(2)).unwrap();
        assert_eq!(module.object(&[0]), &CatObject::vect(1, FieldSpec::Prime(2)));
        assert_eq!(module.object(&[1]), &CatObject::vect(1, FieldSpec::Prime(2)));

        // constant function: constant module with identity maps
        let two = SimplicialComplex::discrete(2);
        let values: BTreeMap<usize, Vec<BigRational>> =
            [(0, vec![rint(0)]), (1, vec![rint(0)])].into_iter().collect();
        let pair = SizePair::new(two, values).unwrap();
        let module =
            module_from_size_pair(&pair, &pair.value_grid(), 0, Coefficients::Int).unwrap();
        assert_eq!(module.object(&[0]), &CatObject::ab(2, vec![]));

        // two-valued function on the projective plane picks up the torsion
        let rp2 = projective_plane();
        let values: BTreeMap<usize, Vec<BigRational>> = (0..6)
            .map(|v| (v, vec![if v < 3 { rint(0) } else { rint(1) }]))
            .collect();
        let pair = SizePair::new(rp2, values).unwrap();
        let module =
            module_from_size_pair(&pair, &pair.value_grid(), 1, Coefficients::Int).unwrap();
        assert_eq!(module.object(&[1]), &CatObject::ab(0, vec![2]));
    }

    #[test]
    fn levelset_distance_is_sup_norm() {
        let f = LevelSetInvariant::new(vec![rint(0), rint(0)]);
        let g = LevelSetInvariant::new(vec![rint(1), rint(3)]);
        assert_eq!(levelset_invariant_distance(&f, &g).unwrap(), rint(3));
        assert_eq!(levelset_invariant_distance(&f, &f).unwrap(), rint(0));
        // constant shift
        let h = LevelSetInvariant::new(vec![rat(3, 2), rat(3, 2)]);
        assert_eq!(levelset_invariant_distance(&f, &h).unwrap(), rat(3, 2));
        let sizes = LevelSetInvariant::new(vec![rint(0)]);
        assert!(levelset_invariant_distance(&f, &sizes).is_err());
    }

    #[test]
    fn npd_enumeration() {
        let pair = |vals: &[(i64, i64)]| {
            let complex = SimplicialComplex::discrete(vals.len());
            let values: BTreeMap<usize, Vec<BigRational>> = vals
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| (i, vec![rint(x), rint(y)]))
                .collect();
            SizePair::new(complex, values).unwrap()
        };
        let a = pair(&[(0, 0), (5, 0)]);
        let b = pair(&[(5, 0), (0, 0)]);
        // the swap bijection matches the values exactly
        assert_eq!(npd_bruteforce(&a, &b).unwrap(), ExtRat::zero());
        let c = pair(&[(0, 0), (1, 0)]);
        let d = pair(&[(0, 0), (4, 0)]);
        assert_eq!(npd_bruteforce(&c, &d).unwrap(), ExtRat::Finite(rint(3)));
        assert_eq!(npd_bruteforce(&a, &a).unwrap(), ExtRat::zero());
        // different sizes are never homeomorphic
        let e = pair(&[(0, 0)]);
        assert_eq!(npd_bruteforce(&a, &e).unwrap(), ExtRat::Infinite);
        // non-discrete spaces are rejected
        let seg = SizePair::new(
            SimplicialComplex::from_simplices([vec![0, 1]]).unwrap(),
            [(0, vec![rint(0)]), (1, vec![rint(0)])].into_iter().collect(),
        )
        .unwrap();
        assert!(npd_bruteforce(&seg, &seg).is_err());
    }

    #[test]
    fn universal_coefficients_spot_check() {
        // dim H_k(F_p) = free rank + p-torsion of H_k + p-torsion of H_{k-1}
        let rp2 = projective_plane();
        for k in 0..=2 {
            let hz = ComplexHomology::compute(&rp2, k, Coefficients::Int).unwrap();
            let CatObject::Ab { free_rank, torsion } = hz.object().clone() else {
                unreachable!()
            };
            let prev_torsion = if k == 0 {
                vec![]
            } else {
                let CatObject::Ab { torsion, .. } =
                    ComplexHomology::compute(&rp2, k - 1, Coefficients::Int)
                        .unwrap()
                        .object()
                        .clone()
                else {
                    unreachable!()
                };
                torsion
            };
            for p in [2u64, 3] {
                let hp = ComplexHomology::compute(&rp2, k, Coefficients::Field(p)).unwrap();
                let CatObject::Vect { dim, .. } = hp.object() else {
                    unreachable!()
                };
                let divides = |t: &BigInt| (t % BigInt::from(p)).is_zero();
                let expected = free_rank
                    + torsion.iter().filter(|t| divides(t)).count()
                    + prev_torsion.iter().filter(|t| divides(t)).count();
                assert_eq!(*dim, expected, "k={k}, p={p}");
            }
        }
    }
}
