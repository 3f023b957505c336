//! Grid posets with the componentwise order, the diagram domain over them,
//! shift translations, superlinear families and sublinear projections, and
//! the adjunction relation tying the last two together.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{floor_rational, ExtRat};

/// A product poset: either the full integer lattice Z^n or a finite embedded
/// grid given by strictly increasing rational coordinates per axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GridPoset {
    IntegerLattice { dim: usize },
    Embedded { axes: Vec<Vec<BigRational>> },
}

impl GridPoset {
    pub fn integer_lattice(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(GridPoset::IntegerLattice { dim })
    }

    pub fn embedded(axes: Vec<Vec<BigRational>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        for axis in &axes {
            if axis.is_empty() {
                return Err(Error::InvalidModule("empty grid axis".into()));
            }
            for w in axis.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidModule(
                        "grid axis is not strictly increasing".into(),
                    ));
                }
            }
        }
        Ok(GridPoset::Embedded { axes })
    }

    pub fn dim(&self) -> usize {
        match self {
            GridPoset::IntegerLattice { dim } => *dim,
            GridPoset::Embedded { axes } => axes.len(),
        }
    }

    pub fn axes(&self) -> Option<&[Vec<BigRational>]> {
        match self {
            GridPoset::Embedded { axes } => Some(axes),
            GridPoset::IntegerLattice { .. } => None,
        }
    }
}

/// A point of the poset: an exact rational vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PosetPoint {
    pub coords: Vec<BigRational>,
}

impl PosetPoint {
    pub fn new(coords: Vec<BigRational>) -> Self {
        PosetPoint { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            got: b,
        });
    }
    Ok(())
}

/// Componentwise comparison `p <= q`.
pub fn leq_points(p: &PosetPoint, q: &PosetPoint) -> Result<bool> {
    check_dims(p.dim(), q.dim())?;
    Ok(p.coords.iter().zip(&q.coords).all(|(a, b)| a <= b))
}

/// A point of the diagram domain: a pair `a < b`, i.e. `a <= b` and `a != b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DgmPoint {
    pub a: PosetPoint,
    pub b: PosetPoint,
}

impl DgmPoint {
    pub fn new(a: PosetPoint, b: PosetPoint) -> Result<Self> {
        if !leq_points(&a, &b)? {
            return Err(Error::InvalidDgmPoint(format!(
                "{:?} is not below {:?}",
                a.coords, b.coords
            )));
        }
        if a == b {
            return Err(Error::InvalidDgmPoint("a = b is on the diagonal".into()));
        }
        Ok(DgmPoint { a, b })
    }

    /// Membership in the restricted domain: strict inequality in every axis.
    pub fn is_strict(&self) -> bool {
        self.a.coords.iter().zip(&self.b.coords).all(|(a, b)| a < b)
    }
}

/// A shift translation: adding a componentwise non-negative vector. The shift
/// sub-monoid covers every construction instantiated here, and inverses stay
/// exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Translation {
    shift: Vec<BigRational>,
}

impl Translation {
    pub fn new(shift: Vec<BigRational>) -> Result<Self> {
        if shift.iter().any(|s| s.is_negative()) {
            return Err(Error::InvalidDgmPoint(
                "translation shift must be non-negative".into(),
            ));
        }
        Ok(Translation { shift })
    }

    pub fn identity(dim: usize) -> Self {
        Translation {
            shift: vec![BigRational::zero(); dim],
        }
    }

    pub fn uniform(dim: usize, eps: BigRational) -> Result<Self> {
        Self::new(vec![eps; dim])
    }

    pub fn shift(&self) -> &[BigRational] {
        &self.shift
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn is_identity(&self) -> bool {
        self.shift.iter().all(Zero::is_zero)
    }

    /// Componentwise comparison of translations.
    pub fn leq(&self, other: &Translation) -> Result<bool> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.shift.iter().zip(&other.shift).all(|(a, b)| a <= b))
    }
}

/// `Γ p = p + shift`.
pub fn translate(gamma: &Translation, p: &PosetPoint) -> Result<PosetPoint> {
    check_dims(gamma.dim(), p.dim())?;
    Ok(PosetPoint::new(
        p.coords
            .iter()
            .zip(gamma.shift())
            .map(|(c, s)| c + s)
            .collect(),
    ))
}

/// `Γ^{-1} p = p - shift`.
pub fn translate_inverse(gamma: &Translation, p: &PosetPoint) -> Result<PosetPoint> {
    check_dims(gamma.dim(), p.dim())?;
    Ok(PosetPoint::new(
        p.coords
            .iter()
            .zip(gamma.shift())
            .map(|(c, s)| c - s)
            .collect(),
    ))
}

/// Composition of shift translations adds the shift vectors.
pub fn compose_translations(gamma: &Translation, kappa: &Translation) -> Result<Translation> {
    check_dims(gamma.dim(), kappa.dim())?;
    Translation::new(
        gamma
            .shift()
            .iter()
            .zip(kappa.shift())
            .map(|(a, b)| a + b)
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `Ω_ε` shifts every axis by `ε`; linear.
    Linear,
    /// `Ω_ε` shifts every axis by `⌊ε⌋`; superlinear but not linear.
    FloorShift,
}

/// A one-parameter family of translations `ε -> Ω_ε` with
/// `Ω_ε Ω_ε' <= Ω_{ε+ε'}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SuperlinearFamily {
    pub kind: FamilyKind,
    pub dim: usize,
}

impl SuperlinearFamily {
    pub fn linear(dim: usize) -> Self {
        SuperlinearFamily {
            kind: FamilyKind::Linear,
            dim,
        }
    }

    pub fn floor_shift(dim: usize) -> Self {
        SuperlinearFamily {
            kind: FamilyKind::FloorShift,
            dim,
        }
    }
}

/// Evaluates the family at `ε >= 0`.
pub fn family_at(family: &SuperlinearFamily, eps: &BigRational) -> Result<Translation> {
    if eps.is_negative() {
        return Err(Error::NegativeEpsilon);
    }
    let step = match family.kind {
        FamilyKind::Linear => eps.clone(),
        FamilyKind::FloorShift => floor_rational(eps),
    };
    Translation::uniform(family.dim, step)
}

/// A sublinear projection `Trans -> [0, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SublinearProjection {
    /// `ω_Γ` is the largest component of the shift.
    MaxShift,
    /// The adjoint `ω_Γ = min{ε : Γ <= Ω_ε}` of a superlinear family.
    AdjointOf(SuperlinearFamily),
}

/// Value of the projection on a translation.
pub fn projection_value(omega: &SublinearProjection, gamma: &Translation) -> ExtRat {
    match omega {
        SublinearProjection::MaxShift => max_component(gamma),
        SublinearProjection::AdjointOf(family) => match family.kind {
            // min{ε : s <= (ε,...,ε)} = max_i s_i
            FamilyKind::Linear => max_component(gamma),
            // min{ε : s <= (⌊ε⌋,...)} = ceil(max_i s_i)
            FamilyKind::FloorShift => match max_component(gamma) {
                ExtRat::Finite(m) => ExtRat::Finite(BigRational::from_integer(m.ceil().to_integer())),
                ExtRat::Infinite => ExtRat::Infinite,
            },
        },
    }
}

fn max_component(gamma: &Translation) -> ExtRat {
    let m = gamma
        .shift()
        .iter()
        .max()
        .cloned()
        .unwrap_or_else(BigRational::zero);
    ExtRat::Finite(m)
}

/// The adjoint projection of a supported family; the minimum in
/// `min{ε : Γ <= Ω_ε}` exists for both kinds.
pub fn derive_adjoint_projection(family: &SuperlinearFamily) -> SublinearProjection {
    SublinearProjection::AdjointOf(*family)
}

/// Checks `ω_Γ <= ε  ⟺  Γ <= Ω_ε` on each sample, with the projection given
/// as an arbitrary evaluation map so broken candidates can be probed.
pub fn check_adjunction_with<F>(
    omega_value: F,
    family: &SuperlinearFamily,
    samples: &[(Translation, BigRational)],
) -> Result<bool>
where
    F: Fn(&Translation) -> ExtRat,
{
    for (gamma, eps) in samples {
        if eps.is_negative() {
            return Err(Error::NegativeEpsilon);
        }
        let lhs = omega_value(gamma) <= ExtRat::Finite(eps.clone());
        let rhs = gamma.leq(&family_at(family, eps)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Adjunction check for a concrete projection.
pub fn check_adjunction(
    omega: &SublinearProjection,
    family: &SuperlinearFamily,
    samples: &[(Translation, BigRational)],
) -> Result<bool> {
    check_adjunction_with(|g| projection_value(omega, g), family, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};

    fn pt(coords: &[i64]) -> PosetPoint {
        PosetPoint::new(coords.iter().map(|&c| rint(c)).collect())
    }

    fn tr(shift: &[i64]) -> Translation {
        Translation::new(shift.iter().map(|&c| rint(c)).collect()).unwrap()
    }

    #[test]
    fn componentwise_order() {
        assert!(leq_points(&pt(&[0, 0]), &pt(&[1, 2])).unwrap());
        assert!(!leq_points(&pt(&[0, 3]), &pt(&[1, 2])).unwrap());
        let p = pt(&[4, -1]);
        assert!(leq_points(&p, &p).unwrap());
        assert!(leq_points(&pt(&[0]), &pt(&[0, 1])).is_err());
    }

    #[test]
    fn translations_act_by_shifts() {
        let g = tr(&[1, 2]);
        assert_eq!(translate(&g, &pt(&[0, 0])).unwrap(), pt(&[1, 2]));
        let id = Translation::identity(2);
        assert_eq!(translate(&id, &pt(&[3, 4])).unwrap(), pt(&[3, 4]));
        assert_eq!(translate_inverse(&tr(&[3]), &pt(&[5])).unwrap(), pt(&[2]));
        // p <= Γp and Γ^{-1}p <= p
        let p = pt(&[7, -2]);
        assert!(leq_points(&p, &translate(&g, &p).unwrap()).unwrap());
        assert!(leq_points(&translate_inverse(&g, &p).unwrap(), &p).unwrap());
        // round trip
        let back = translate(&g, &translate_inverse(&g, &p).unwrap()).unwrap();
        assert_eq!(back, p);
        // negative shifts are rejected
        assert!(Translation::new(vec![rint(-1)]).is_err());
    }

    #[test]
    fn composition_adds_shifts() {
        assert_eq!(
            compose_translations(&tr(&[1, 0]), &tr(&[0, 2])).unwrap(),
            tr(&[1, 2])
        );
        let g = tr(&[5, 7]);
        assert_eq!(
            compose_translations(&g, &Translation::identity(2)).unwrap(),
            g
        );
        assert_eq!(compose_translations(&tr(&[2]), &tr(&[3])).unwrap(), tr(&[5]));
    }

    #[test]
    fn inverse_order_lemma() {
        // Γ <= K implies K^{-1} p <= Γ^{-1} p
        let g = tr(&[1, 2]);
        let k = tr(&[3, 2]);
        assert!(g.leq(&k).unwrap());
        for coords in [[0i64, 0], [5, -3], [2, 2]] {
            let p = pt(&coords);
            let ginv = translate_inverse(&g, &p).unwrap();
            let kinv = translate_inverse(&k, &p).unwrap();
            assert!(leq_points(&kinv, &ginv).unwrap());
        }
    }

    #[test]
    fn family_evaluation() {
        let lin = SuperlinearFamily::linear(2);
        let t = family_at(&lin, &rat(3, 2)).unwrap();
        assert_eq!(t.shift(), &[rat(3, 2), rat(3, 2)]);

        let fl = SuperlinearFamily::floor_shift(1);
        assert_eq!(family_at(&fl, &rat(3, 2)).unwrap(), tr(&[1]));
        assert!(family_at(&fl, &rat(-1, 2)).is_err());

        // floor-shift witnesses superlinear-but-not-linear:
        // Ω_{1/2} Ω_{1/2} = shift 0 <= shift 1 = Ω_1, with strict inequality
        let half = family_at(&fl, &rat(1, 2)).unwrap();
        let composed = compose_translations(&half, &half).unwrap();
        let one = family_at(&fl, &rint(1)).unwrap();
        assert_eq!(composed, tr(&[0]));
        assert_eq!(one, tr(&[1]));
        assert!(composed.leq(&one).unwrap());
        assert_ne!(composed, one);
    }

    #[test]
    fn family_is_increasing() {
        for family in [SuperlinearFamily::linear(2), SuperlinearFamily::floor_shift(2)] {
            let epsilons = [rint(0), rat(1, 2), rint(1), rat(7, 3), rint(4)];
            for pair in epsilons.windows(2) {
                let lo = family_at(&family, &pair[0]).unwrap();
                let hi = family_at(&family, &pair[1]).unwrap();
                assert!(lo.leq(&hi).unwrap());
            }
        }
    }

    #[test]
    fn superlinearity_on_sampled_pairs() {
        for family in [SuperlinearFamily::linear(1), SuperlinearFamily::floor_shift(1)] {
            for (num_a, num_b) in [(1, 1), (1, 3), (3, 5), (0, 7), (2, 2)] {
                let ea = rat(num_a, 2);
                let eb = rat(num_b, 2);
                let composed = compose_translations(
                    &family_at(&family, &ea).unwrap(),
                    &family_at(&family, &eb).unwrap(),
                )
                .unwrap();
                let together = family_at(&family, &(ea + eb)).unwrap();
                assert!(composed.leq(&together).unwrap());
            }
        }
    }

    #[test]
    fn projection_values() {
        let max = SublinearProjection::MaxShift;
        assert_eq!(
            projection_value(&max, &tr(&[1, 3])),
            ExtRat::Finite(rint(3))
        );
        assert_eq!(
            projection_value(&max, &Translation::identity(2)),
            ExtRat::zero()
        );
        let adj = derive_adjoint_projection(&SuperlinearFamily::floor_shift(1));
        assert_eq!(projection_value(&adj, &tr(&[2])), ExtRat::Finite(rint(2)));
        // non-integer shift needs the next integer of the family
        let g = Translation::new(vec![rat(3, 2)]).unwrap();
        assert_eq!(projection_value(&adj, &g), ExtRat::Finite(rint(2)));
    }

    #[test]
    fn projection_subadditive() {
        let projections = [
            SublinearProjection::MaxShift,
            derive_adjoint_projection(&SuperlinearFamily::floor_shift(2)),
            derive_adjoint_projection(&SuperlinearFamily::linear(2)),
        ];
        let samples = [
            (tr(&[1, 3]), tr(&[2, 0])),
            (tr(&[0, 0]), tr(&[4, 4])),
            (tr(&[5, 1]), tr(&[1, 5])),
        ];
        for omega in &projections {
            assert_eq!(
                projection_value(omega, &Translation::identity(2)),
                ExtRat::zero()
            );
            for (g, k) in &samples {
                let gk = compose_translations(g, k).unwrap();
                let lhs = projection_value(omega, &gk);
                let rhs = projection_value(omega, g).checked_add(&projection_value(omega, k));
                assert!(lhs <= rhs, "{omega:?} on {g:?}, {k:?}");
            }
        }
    }

    fn sample_grid_2d() -> Vec<(Translation, BigRational)> {
        let mut samples = Vec::new();
        for sx in 0..=5i64 {
            for sy in 0..=5i64 {
                for e2 in 0..=10i64 {
                    samples.push((tr(&[sx, sy]), rat(e2, 2)));
                }
            }
        }
        samples
    }

    #[test]
    fn adjunction_exhaustive_for_adjoint_pairs() {
        let lin = SuperlinearFamily::linear(2);
        assert!(check_adjunction(&SublinearProjection::MaxShift, &lin, &sample_grid_2d()).unwrap());

        let fl = SuperlinearFamily::floor_shift(2);
        let adj = derive_adjoint_projection(&fl);
        assert!(check_adjunction(&adj, &fl, &sample_grid_2d()).unwrap());
        let adj_lin = derive_adjoint_projection(&lin);
        assert!(check_adjunction(&adj_lin, &lin, &sample_grid_2d()).unwrap());
    }

    #[test]
    fn adjunction_violations_are_found() {
        // halving the max-shift projection breaks the adjunction with the
        // floor-shift family: for Γ = (1), ε = 1/2 it claims ω_Γ <= ε while
        // Γ is not below Ω_{1/2} = I
        let fl = SuperlinearFamily::floor_shift(1);
        let halved = |g: &Translation| match projection_value(&SublinearProjection::MaxShift, g) {
            ExtRat::Finite(q) => ExtRat::Finite(q / rint(2)),
            inf => inf,
        };
        let mut violating = None;
        for s in 0..=4i64 {
            for e2 in 0..=8i64 {
                let sample = vec![(tr(&[s]), rat(e2, 2))];
                if !check_adjunction_with(halved, &fl, &sample).unwrap() {
                    violating = Some(sample[0].clone());
                }
            }
        }
        let (g, eps) = violating.expect("brute force must find a violation");
        assert!(!check_adjunction_with(halved, &fl, &[(g, eps)]).unwrap());
    }
}
