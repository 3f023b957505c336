//! Persistence modules on finite embedded grids: functor data (objects on
//! grid points, morphism matrices on cover edges), functoriality validation,
//! transition-map composition, and the memoized rank invariant. Evaluation at
//! arbitrary rational points goes through the step extension: values are held
//! constant on half-open grid cells, zero below the grid and saturated above.

use num_rational::BigRational;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::category::{self, CatObject, FieldSpec};
use crate::error::{Error, Result};
use crate::matrix::{ColumnSpan, IntMatrix};
use crate::poset::{DgmPoint, GridPoset};

/// Coefficient choice for a persistence module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coefficients {
    Field(u64),
    Int,
}

impl Coefficients {
    pub fn field_spec(&self) -> Option<FieldSpec> {
        match self {
            Coefficients::Field(p) => Some(FieldSpec::Prime(*p)),
            Coefficients::Int => None,
        }
    }
}

/// A functor from a finite embedded grid to Vect or Ab.
#[derive(Clone, Debug)]
pub struct PersistenceModule {
    axes: Vec<Vec<BigRational>>,
    coefficients: Coefficients,
    objects: Vec<CatObject>,
    edges: HashMap<(usize, usize), IntMatrix>,
}

impl PersistenceModule {
    /// Structural validation: grid shape, object kinds, presence and shape of
    /// every cover-edge matrix, and well-definedness of Ab morphisms. Square
    /// commutativity is checked separately by [`validate_functoriality`].
    pub fn new(
        axes: Vec<Vec<BigRational>>,
        coefficients: Coefficients,
        objects: Vec<CatObject>,
        edges: HashMap<(Vec<usize>, usize), IntMatrix>,
    ) -> Result<Self> {
        GridPoset::embedded(axes.clone())?;
        let lens: Vec<usize> = axes.iter().map(Vec::len).collect();
        let npoints: usize = lens.iter().product();
        if objects.len() != npoints {
            return Err(Error::InvalidModule(format!(
                "{} objects for a grid with {npoints} points",
                objects.len()
            )));
        }
        for obj in &objects {
            obj.check_invariants()?;
            match (coefficients, obj) {
                (Coefficients::Field(p), CatObject::Vect { field, .. })
                    if *field == FieldSpec::Prime(p) => {}
                (Coefficients::Int, CatObject::Ab { .. }) => {}
                _ => {
                    return Err(Error::InvalidModule(format!(
                        "object {obj} does not match coefficients {coefficients:?}"
                    )))
                }
            }
        }
        if let Coefficients::Field(p) = coefficients {
            // reject composite "fields" up front
            crate::matrix::rank_mod_p(&IntMatrix::zeros(1, 1), p)?;
        }

        let module = PersistenceModule {
            axes,
            coefficients,
            objects,
            edges: HashMap::new(),
        };
        let mut linear_edges = HashMap::new();
        for ((point, axis), matrix) in edges {
            let idx = module.linear_index_checked(&point)?;
            if axis >= module.dim() || point[axis] + 1 >= lens[axis] {
                return Err(Error::InvalidModule(format!(
                    "edge at {point:?} along axis {axis} leaves the grid"
                )));
            }
            linear_edges.insert((idx, axis), matrix);
        }
        let module = PersistenceModule {
            edges: linear_edges,
            ..module
        };

        for idx in 0..npoints {
            let point = module.multi_index(idx);
            for axis in 0..module.dim() {
                if point[axis] + 1 >= lens[axis] {
                    continue;
                }
                let Some(m) = module.edges.get(&(idx, axis)) else {
                    return Err(Error::InvalidModule(format!(
                        "missing edge at {point:?} along axis {axis}"
                    )));
                };
                let mut target = point.clone();
                target[axis] += 1;
                let src = &module.objects[idx];
                let dst = &module.objects[module.linear_index(&target)];
                let (gs, gd) = (src.generator_count()?, dst.generator_count()?);
                if m.rows() != gd || m.cols() != gs {
                    return Err(Error::InvalidModule(format!(
                        "edge at {point:?} axis {axis} has shape {}x{}, expected {gd}x{gs}",
                        m.rows(),
                        m.cols()
                    )));
                }
                if coefficients == Coefficients::Int && !category::is_valid_hom(m, src, dst)? {
                    return Err(Error::InvalidModule(format!(
                        "edge at {point:?} axis {axis} does not carry relations into relations"
                    )));
                }
            }
        }
        Ok(module)
    }

    pub fn axes(&self) -> &[Vec<BigRational>] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn coefficients(&self) -> Coefficients {
        self.coefficients
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn linear_index(&self, point: &[usize]) -> usize {
        let mut idx = 0;
        for (axis, &i) in point.iter().enumerate() {
            idx = idx * self.axes[axis].len() + i;
        }
        idx
    }

    fn linear_index_checked(&self, point: &[usize]) -> Result<usize> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        for (axis, &i) in point.iter().enumerate() {
            if i >= self.axes[axis].len() {
                return Err(Error::InvalidModule(format!(
                    "grid point {point:?} outside the grid"
                )));
            }
        }
        Ok(self.linear_index(point))
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut point = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            let len = self.axes[axis].len();
            point[axis] = idx % len;
            idx /= len;
        }
        point
    }

    pub fn object(&self, point: &[usize]) -> &CatObject {
        &self.objects[self.linear_index(point)]
    }

    pub fn zero_object(&self) -> CatObject {
        match self.coefficients {
            Coefficients::Field(p) => CatObject::vect(0, FieldSpec::Prime(p)),
            Coefficients::Int => CatObject::Ab {
                free_rank: 0,
                torsion: vec![],
            },
        }
    }

    /// Largest grid point below `x` per axis, saturating above the maximum;
    /// `None` (the module's bottom, carrying the zero object) if any
    /// coordinate lies below its axis minimum.
    pub fn step_lookup(&self, x: &[BigRational]) -> Result<Option<Vec<usize>>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut point = Vec::with_capacity(self.dim());
        for (axis, coord) in x.iter().enumerate() {
            let col = &self.axes[axis];
            // number of grid values <= coord
            let pos = col.partition_point(|v| v <= coord);
            if pos == 0 {
                return Ok(None);
            }
            point.push(pos - 1);
        }
        Ok(Some(point))
    }

    /// Composite transition matrix `F(a <= b)` along a monotone staircase
    /// path; path independence is guaranteed once functoriality holds.
    pub fn transition_map(&self, from: &[usize], to: &[usize]) -> Result<IntMatrix> {
        let _ = self.linear_index_checked(from)?;
        let _ = self.linear_index_checked(to)?;
        if from.iter().zip(to).any(|(a, b)| a > b) {
            return Err(Error::NotComparable(format!("{from:?} is not below {to:?}")));
        }
        let mut current = from.to_vec();
        let mut acc = IntMatrix::identity(self.objects[self.linear_index(from)].generator_count()?);
        for axis in 0..self.dim() {
            while current[axis] < to[axis] {
                let step = self
                    .edges
                    .get(&(self.linear_index(&current), axis))
                    .expect("validated edge");
                acc = step.mul(&acc)?;
                if let Coefficients::Field(p) = self.coefficients {
                    acc = acc.reduce_mod(p);
                }
                current[axis] += 1;
            }
        }
        Ok(acc)
    }

    fn edge(&self, point: &[usize], axis: usize) -> &IntMatrix {
        self.edges
            .get(&(self.linear_index(point), axis))
            .expect("validated edge")
    }

    /// Checks that every unit square of cover edges commutes: exactly over a
    /// field (mod p), and up to the target's relation lattice over Z.
    pub fn validate_functoriality(&self) -> Result<()> {
        for idx in 0..self.point_count() {
            let point = self.multi_index(idx);
            for axis_a in 0..self.dim() {
                if point[axis_a] + 1 >= self.axes[axis_a].len() {
                    continue;
                }
                for axis_b in axis_a + 1..self.dim() {
                    if point[axis_b] + 1 >= self.axes[axis_b].len() {
                        continue;
                    }
                    let mut pa = point.clone();
                    pa[axis_a] += 1;
                    let mut pb = point.clone();
                    pb[axis_b] += 1;
                    let via_a = self.edge(&pa, axis_b).mul(self.edge(&point, axis_a))?;
                    let via_b = self.edge(&pb, axis_a).mul(self.edge(&point, axis_b))?;
                    let mut target = point.clone();
                    target[axis_a] += 1;
                    target[axis_b] += 1;
                    let equal = match self.coefficients {
                        Coefficients::Field(p) => {
                            via_a.reduce_mod(p) == via_b.reduce_mod(p)
                        }
                        Coefficients::Int => {
                            let diff = via_a.sub(&via_b)?;
                            let rel = self.objects[self.linear_index(&target)].relation_matrix()?;
                            let span = ColumnSpan::new(&rel);
                            (0..diff.cols()).all(|j| span.contains(&diff.column(j)))
                        }
                    };
                    if !equal {
                        return Err(Error::Functoriality {
                            point,
                            axis_a,
                            axis_b,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

type MemoKey = (Option<Vec<usize>>, Option<Vec<usize>>);

/// The rank invariant of a module: `(a, b) -> im F(a < b)`, evaluated through
/// the step extension and memoized on snapped grid points (erosion checks hit
/// the same points repeatedly). Concurrent evaluations return equal values.
pub struct RankInvariant {
    module: Arc<PersistenceModule>,
    memo: RwLock<HashMap<MemoKey, CatObject>>,
}

impl RankInvariant {
    pub fn new(module: PersistenceModule) -> Self {
        Self::from_arc(Arc::new(module))
    }

    pub fn from_arc(module: Arc<PersistenceModule>) -> Self {
        RankInvariant {
            module,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn module(&self) -> &PersistenceModule {
        &self.module
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn axes(&self) -> &[Vec<BigRational>] {
        self.module.axes()
    }

    pub fn coefficients(&self) -> Coefficients {
        self.module.coefficients()
    }

    pub fn zero_object(&self) -> CatObject {
        self.module.zero_object()
    }

    /// Image object of the transition between two snapped grid points
    /// (`None` is the bottom). Equal points are allowed and give the object
    /// itself; the diagram-domain constraint `a != b` applies to the rational
    /// points upstream, not to their snapped images.
    pub fn eval_grid(&self, a: Option<&[usize]>, b: Option<&[usize]>) -> Result<CatObject> {
        let key: MemoKey = (a.map(|s| s.to_vec()), b.map(|s| s.to_vec()));
        if let Some(hit) = self.memo.read().expect("memo poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let value = match (&key.0, &key.1) {
            (Some(ia), Some(ib)) => {
                let f = self.module.transition_map(ia, ib)?;
                let src = self.module.object(ia);
                let dst = self.module.object(ib);
                category::image_object(&f, src, dst)?
            }
            _ => self.module.zero_object(),
        };
        self.memo
            .write()
            .expect("memo poisoned")
            .insert(key, value.clone());
        Ok(value)
    }

    /// Step-extended evaluation at rational coordinates with `a <= b`.
    pub fn eval_rational(&self, a: &[BigRational], b: &[BigRational]) -> Result<CatObject> {
        let sa = self.module.step_lookup(a)?;
        let sb = self.module.step_lookup(b)?;
        if let (Some(ia), Some(ib)) = (&sa, &sb) {
            if ia.iter().zip(ib).any(|(x, y)| x > y) {
                return Err(Error::NotComparable(format!(
                    "snapped points {ia:?} and {ib:?} are not ordered"
                )));
            }
        }
        self.eval_grid(sa.as_deref(), sb.as_deref())
    }

    /// The rank invariant at a diagram point.
    pub fn at(&self, d: &DgmPoint) -> Result<CatObject> {
        if d.a.dim() != self.module.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.module.dim(),
                got: d.a.dim(),
            });
        }
        self.eval_rational(&d.a.coords, &d.b.coords)
    }
}
