//! The erosion operator, dominance checks over finite representative cells,
//! and the erosion distances: with respect to a superlinear family, with
//! respect to a sublinear projection, and the variant whose dominance is
//! quantified over the strictly-increasing diagram domain only.
//!
//! Step-extended rank invariants are piecewise constant on half-open cells
//! cut by the two modules' (shifted) axis coordinates, so each dominance
//! check is decided exactly on one representative per cell pair. Checks over
//! distinct cells are independent and run concurrently; witnesses are always
//! the leftmost failure, independent of scheduling.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::category::{preorder_leq, CatObject};
use crate::error::{Error, Result};
use crate::module::RankInvariant;
use crate::par;
use crate::poset::{
    family_at, projection_value, DgmPoint, PosetPoint, SublinearProjection, SuperlinearFamily,
    Translation,
};
use crate::rational::{ceil_to_i64, ExtRat};

/// Quantifier domain for dominance: all of `Dgm` (`a <= b`, `a != b`) or the
/// restricted `Dgm'` (`a_i < b_i` on every axis).
///
/// On step-constant invariants every half-open cell pair meeting `Dgm` also
/// contains a point of `Dgm'`, so both domains induce the same finite check;
/// the distinction is kept in the API because the restricted distance is a
/// separate operation with its own contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgmDomain {
    Full,
    Strict,
}

/// Outcome of an erosion-distance search: the distance, the candidate grid
/// that was scanned, and one failing diagram point per rejected candidate.
#[derive(Debug)]
pub struct ErosionReport {
    pub distance: ExtRat,
    pub witness_epsilon_grid: Vec<BigRational>,
    pub failures: Vec<(BigRational, DgmPoint)>,
}

fn check_compatible(f: &RankInvariant, g: &RankInvariant) -> Result<()> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    if f.coefficients() != g.coefficients() {
        return Err(Error::CategoryMismatch(format!(
            "modules over {:?} and {:?}",
            f.coefficients(),
            g.coefficients()
        )));
    }
    Ok(())
}

/// `∇_{Γ,K} f (a,b) = f(Γ^{-1} a, K b)`. If the eroded pair leaves the
/// diagram domain the zero object is returned so dominance holds vacuously;
/// with shift translations this cannot happen for a valid input point.
pub fn erode_at(
    f: &RankInvariant,
    gamma: &Translation,
    kappa: &Translation,
    d: &DgmPoint,
) -> Result<CatObject> {
    let a: Vec<BigRational> = d
        .a
        .coords
        .iter()
        .zip(gamma.shift())
        .map(|(c, s)| c - s)
        .collect();
    let b: Vec<BigRational> = d
        .b
        .coords
        .iter()
        .zip(kappa.shift())
        .map(|(c, s)| c + s)
        .collect();
    let inside = a.iter().zip(&b).all(|(x, y)| x <= y) && a != b;
    if !inside {
        return Ok(f.zero_object());
    }
    f.eval_rational(&a, &b)
}

/// One half-open cell of an axis subdivision. `rep` is a point of the cell
/// at which step-constant functions take their cell value.
#[derive(Clone, Debug)]
struct AxisCell {
    rep: BigRational,
    lower_unbounded: bool,
    upper: Option<BigRational>,
}

fn axis_cells(mut breakpoints: Vec<BigRational>) -> Vec<AxisCell> {
    breakpoints.sort();
    breakpoints.dedup();
    let mut cells = Vec::with_capacity(breakpoints.len() + 1);
    cells.push(AxisCell {
        rep: &breakpoints[0] - BigRational::one(),
        lower_unbounded: true,
        upper: Some(breakpoints[0].clone()),
    });
    for (i, c) in breakpoints.iter().enumerate() {
        cells.push(AxisCell {
            rep: c.clone(),
            lower_unbounded: false,
            upper: breakpoints.get(i + 1).cloned(),
        });
    }
    cells
}

/// Does the (a-cell, b-cell) pair on one axis admit `a_i <= b_i`?
fn axis_pair_feasible(a: &AxisCell, b: &AxisCell) -> bool {
    if a.lower_unbounded {
        return true;
    }
    match &b.upper {
        None => true,
        Some(u) => a.rep < *u,
    }
}

/// A genuine diagram point inside the given cell pair, strict on every axis.
fn witness_point(a_cells: &[&AxisCell], b_cells: &[&AxisCell]) -> DgmPoint {
    let half = BigRational::new(1.into(), 2.into());
    let mut a = Vec::with_capacity(a_cells.len());
    let mut b = Vec::with_capacity(a_cells.len());
    for (ca, cb) in a_cells.iter().zip(b_cells) {
        let ai = if ca.lower_unbounded {
            match &cb.upper {
                Some(u) if *u <= ca.rep => u - BigRational::one(),
                _ => ca.rep.clone(),
            }
        } else {
            ca.rep.clone()
        };
        let lo = if cb.lower_unbounded {
            ai.clone()
        } else if cb.rep > ai {
            cb.rep.clone()
        } else {
            ai.clone()
        };
        // strictly above a_i, strictly inside the b-cell
        let bi = match &cb.upper {
            Some(u) => &lo + (u - &lo).min(BigRational::one()) * &half,
            None => &lo + BigRational::one(),
        };
        a.push(ai);
        b.push(bi);
    }
    DgmPoint::new(PosetPoint::new(a), PosetPoint::new(b)).expect("witness construction")
}

fn cartesian_indices(lens: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for &len in lens {
        let mut next = Vec::with_capacity(out.len() * len);
        for tuple in &out {
            for i in 0..len {
                let mut t = tuple.clone();
                t.push(i);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// First diagram point (in cell order) where `∇_{Γ,K} f <= g` fails, or
/// `None` if the dominance holds on the whole domain.
pub fn dominance_failure(
    f: &RankInvariant,
    g: &RankInvariant,
    gamma: &Translation,
    kappa: &Translation,
    _domain: DgmDomain,
) -> Result<Option<DgmPoint>> {
    check_compatible(f, g)?;
    let dim = f.dim();
    if gamma.dim() != dim || kappa.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: gamma.dim().max(kappa.dim()),
        });
    }
    let mut a_axes = Vec::with_capacity(dim);
    let mut b_axes = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut a_bp: Vec<BigRational> = g.axes()[i].clone();
        a_bp.extend(f.axes()[i].iter().map(|v| v + &gamma.shift()[i]));
        a_axes.push(axis_cells(a_bp));
        let mut b_bp: Vec<BigRational> = g.axes()[i].clone();
        b_bp.extend(f.axes()[i].iter().map(|v| v - &kappa.shift()[i]));
        b_axes.push(axis_cells(b_bp));
    }
    let a_tuples = cartesian_indices(&a_axes.iter().map(Vec::len).collect::<Vec<_>>());
    let b_tuples = cartesian_indices(&b_axes.iter().map(Vec::len).collect::<Vec<_>>());
    let pairs: Vec<(usize, usize)> = (0..a_tuples.len())
        .flat_map(|i| (0..b_tuples.len()).map(move |j| (i, j)))
        .collect();

    let outcome = par::find_map_first(&pairs, |&(ai, bi)| -> Option<Result<DgmPoint>> {
        let a_cells: Vec<&AxisCell> = a_tuples[ai]
            .iter()
            .enumerate()
            .map(|(axis, &c)| &a_axes[axis][c])
            .collect();
        let b_cells: Vec<&AxisCell> = b_tuples[bi]
            .iter()
            .enumerate()
            .map(|(axis, &c)| &b_axes[axis][c])
            .collect();
        if !a_cells
            .iter()
            .zip(&b_cells)
            .all(|(ca, cb)| axis_pair_feasible(ca, cb))
        {
            return None;
        }
        let a_rep: Vec<BigRational> = a_cells.iter().map(|c| c.rep.clone()).collect();
        let b_rep: Vec<BigRational> = b_cells.iter().map(|c| c.rep.clone()).collect();
        let eroded_a: Vec<BigRational> = a_rep
            .iter()
            .zip(gamma.shift())
            .map(|(c, s)| c - s)
            .collect();
        let eroded_b: Vec<BigRational> = b_rep
            .iter()
            .zip(kappa.shift())
            .map(|(c, s)| c + s)
            .collect();
        let check = (|| -> Result<bool> {
            let g_val = g.eval_rational(&a_rep, &b_rep)?;
            let f_val = f.eval_rational(&eroded_a, &eroded_b)?;
            preorder_leq(&f_val, &g_val)
        })();
        match check {
            Ok(true) => None,
            Ok(false) => Some(Ok(witness_point(&a_cells, &b_cells))),
            Err(e) => Some(Err(e)),
        }
    });
    match outcome {
        None => Ok(None),
        Some(Ok(witness)) => Ok(Some(witness)),
        Some(Err(e)) => Err(e),
    }
}

/// `∇_{Γ,K} f <= g` on the full diagram domain.
pub fn dominates(
    f: &RankInvariant,
    g: &RankInvariant,
    gamma: &Translation,
    kappa: &Translation,
) -> Result<bool> {
    Ok(dominance_failure(f, g, gamma, kappa, DgmDomain::Full)?.is_none())
}

/// Candidate epsilons for the distance search. For the linear family these
/// are the pairwise axis-coordinate differences across both modules together
/// with their halves (half-differences are where an eroded invariant pinches
/// to nothing against the diagonal); for the floor-shift family the integers
/// up to one past the grid span. The true infimum always lies in this set.
pub fn candidate_epsilons(
    f: &RankInvariant,
    g: &RankInvariant,
    family: &SuperlinearFamily,
) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = vec![BigRational::zero()];
    match family.kind {
        crate::poset::FamilyKind::Linear => {
            for axis in 0..f.dim().min(g.dim()) {
                let mut values: Vec<BigRational> = f.axes()[axis].clone();
                values.extend(g.axes()[axis].iter().cloned());
                for i in 0..values.len() {
                    for j in i + 1..values.len() {
                        let diff = (&values[i] - &values[j]).abs();
                        out.push(diff.clone() / BigRational::from_integer(2.into()));
                        out.push(diff);
                    }
                }
            }
        }
        crate::poset::FamilyKind::FloorShift => {
            let mut bound: i64 = 0;
            for axis in 0..f.dim().min(g.dim()) {
                let mut values: Vec<BigRational> = f.axes()[axis].clone();
                values.extend(g.axes()[axis].iter().cloned());
                let max = values.iter().max().cloned().unwrap();
                let min = values.iter().min().cloned().unwrap();
                bound = bound.max(ceil_to_i64(&(max - min)));
            }
            for m in 0..=bound + 1 {
                out.push(BigRational::from_integer(m.into()));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn scan_candidates<P>(candidates: Vec<BigRational>, mut probe: P) -> Result<ErosionReport>
where
    P: FnMut(&BigRational) -> Result<Option<DgmPoint>>,
{
    let mut failures = Vec::new();
    let mut distance = ExtRat::Infinite;
    for eps in &candidates {
        match probe(eps)? {
            None => {
                distance = ExtRat::Finite(eps.clone());
                break;
            }
            Some(witness) => failures.push((eps.clone(), witness)),
        }
    }
    Ok(ErosionReport {
        distance,
        witness_epsilon_grid: candidates,
        failures,
    })
}

/// Erosion distance with respect to a superlinear family:
/// `inf { ε : ∇_{Ω_ε} f <= g and ∇_{Ω_ε} g <= f }`, computed exactly as the
/// least passing candidate (the predicate is monotone for decreasing maps and
/// attained at the flip because invariants are left-closed step functions).
pub fn erosion_distance_family(
    f: &RankInvariant,
    g: &RankInvariant,
    family: &SuperlinearFamily,
) -> Result<ErosionReport> {
    check_compatible(f, g)?;
    let candidates = candidate_epsilons(f, g, family);
    scan_candidates(candidates, |eps| {
        let t = family_at(family, eps)?;
        if let Some(w) = dominance_failure(f, g, &t, &t, DgmDomain::Full)? {
            return Ok(Some(w));
        }
        dominance_failure(g, f, &t, &t, DgmDomain::Full)
    })
}

/// Restricted erosion distance: dominance is quantified over `Dgm'` only.
pub fn erosion_distance_restricted(
    f: &RankInvariant,
    g: &RankInvariant,
    family: &SuperlinearFamily,
) -> Result<ErosionReport> {
    check_compatible(f, g)?;
    let candidates = candidate_epsilons(f, g, family);
    scan_candidates(candidates, |eps| {
        let t = family_at(family, eps)?;
        if let Some(w) = dominance_failure(f, g, &t, &t, DgmDomain::Strict)? {
            return Ok(Some(w));
        }
        dominance_failure(g, f, &t, &t, DgmDomain::Strict)
    })
}

/// All axis-aligned shift translations whose components lie in the candidate
/// epsilon set; complete for step-constant invariants.
pub fn axis_shift_candidates(
    f: &RankInvariant,
    g: &RankInvariant,
    family: &SuperlinearFamily,
) -> Vec<Translation> {
    let values = candidate_epsilons(f, g, family);
    let dim = f.dim();
    let tuples = cartesian_indices(&vec![values.len(); dim]);
    tuples
        .into_iter()
        .map(|t| {
            Translation::new(t.into_iter().map(|i| values[i].clone()).collect())
                .expect("non-negative candidates")
        })
        .collect()
}

/// Erosion distance with respect to a sublinear projection, over the supplied
/// candidate translation pairs: the least `ε` such that some pair `(Γ, K)`
/// with `ω_Γ, ω_K <= ε` satisfies `∇_{Γ,K} f <= g` and `∇_{K,Γ} g <= f`.
pub fn erosion_distance_projection(
    f: &RankInvariant,
    g: &RankInvariant,
    omega: &SublinearProjection,
    candidates: &[(Translation, Translation)],
) -> Result<ErosionReport> {
    check_compatible(f, g)?;
    // group candidate pairs by cost, ascending; infinite-cost pairs can never
    // witness a finite distance
    let mut by_cost: Vec<(BigRational, Vec<&(Translation, Translation)>)> = Vec::new();
    for pair in candidates {
        let cost = projection_value(omega, &pair.0).max(projection_value(omega, &pair.1));
        let ExtRat::Finite(cost) = cost else { continue };
        match by_cost.binary_search_by(|(c, _)| c.cmp(&cost)) {
            Ok(i) => by_cost[i].1.push(pair),
            Err(i) => by_cost.insert(i, (cost, vec![pair])),
        }
    }
    let grid: Vec<BigRational> = by_cost.iter().map(|(c, _)| c.clone()).collect();
    let mut failures = Vec::new();
    let mut distance = ExtRat::Infinite;
    'levels: for (cost, pairs) in &by_cost {
        let mut level_witness = None;
        for (gamma, kappa) in pairs {
            match dominance_failure(f, g, gamma, kappa, DgmDomain::Full)? {
                Some(w) => {
                    level_witness.get_or_insert(w);
                    continue;
                }
                None => {}
            }
            match dominance_failure(g, f, kappa, gamma, DgmDomain::Full)? {
                Some(w) => {
                    level_witness.get_or_insert(w);
                }
                None => {
                    distance = ExtRat::Finite(cost.clone());
                    break 'levels;
                }
            }
        }
        if let Some(w) = level_witness {
            failures.push((cost.clone(), w));
        }
    }
    Ok(ErosionReport {
        distance,
        witness_epsilon_grid: grid,
        failures,
    })
}
