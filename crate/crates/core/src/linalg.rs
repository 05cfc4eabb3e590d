//! Exact rational linear algebra over explicitly enumerated bases.
//!
//! Everything here works with [`SparseVector`]s whose indices are ordinals into
//! a basis owned by the caller. Subspaces are always kept in reduced
//! row-echelon form, which makes equality of subspaces a structural equality of
//! their [`SubspaceBasis`] values.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// The ground field: arbitrary precision rationals, always in lowest terms.
pub type Scalar = BigRational;

/// Integer-valued scalar.
pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// Ratio `n / d` as a scalar. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("basis index {index} out of range for ambient dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("ambient dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// A vector with finitely many nonzero coordinates. Zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVector {
    entries: BTreeMap<usize, Scalar>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(index: usize) -> Self {
        let mut v = Self::new();
        v.add_to(index, Scalar::one());
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Scalar)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (i, c) in pairs {
            v.add_to(i, c);
        }
        v
    }

    pub fn get(&self, index: usize) -> Scalar {
        self.entries.get(&index).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Adds `c` to coordinate `index`, dropping the entry if it cancels.
    pub fn add_to(&mut self, index: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.entries.entry(index).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.entries.remove(&index);
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: &Scalar, other: &SparseVector) {
        if factor.is_zero() {
            return;
        }
        for (&i, c) in &other.entries {
            self.add_to(i, factor * c);
        }
    }

    pub fn scale(&mut self, factor: &Scalar) {
        if factor.is_zero() {
            self.entries.clear();
            return;
        }
        for c in self.entries.values_mut() {
            *c *= factor;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest index carrying a nonzero entry.
    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.entries.iter().next().map(|(&i, c)| (i, c))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(&i, c)| (i, c))
    }

    /// Re-indexes every coordinate by `shift`.
    pub fn shifted(&self, shift: usize) -> SparseVector {
        SparseVector {
            entries: self.entries.iter().map(|(&i, c)| (i + shift, c.clone())).collect(),
        }
    }

    /// Keeps coordinates in `lo..hi`, re-indexed to start at zero.
    pub fn window(&self, lo: usize, hi: usize) -> SparseVector {
        SparseVector {
            entries: self.entries.range(lo..hi).map(|(&i, c)| (i - lo, c.clone())).collect(),
        }
    }

    pub fn dot(&self, other: &SparseVector) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, c) in &self.entries {
            if let Some(d) = other.entries.get(i) {
                acc += c * d;
            }
        }
        acc
    }

    fn check_dim(&self, dim: usize) -> Result<(), LinalgError> {
        match self.max_index() {
            Some(index) if index >= dim => Err(LinalgError::IndexOutOfRange { index, dim }),
            _ => Ok(()),
        }
    }
}

/// A subspace given by reduced row-echelon rows: nonzero, strictly increasing
/// pivots, pivot entries equal to one, and each pivot column zero in every
/// other row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient: usize,
    rows: Vec<SparseVector>,
}

impl SubspaceBasis {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, rows: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self { ambient, rows: (0..ambient).map(SparseVector::unit).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.leading().expect("rows are nonzero").0)
    }

    /// Reduces `v` against the rows; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &SparseVector) -> SparseVector {
        let mut out = v.clone();
        for row in &self.rows {
            let (p, _) = row.leading().expect("rows are nonzero");
            let c = out.get(p);
            if !c.is_zero() {
                out.add_scaled(&-c, row);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v` into the echelon form, returning whether the rank grew.
    fn absorb(&mut self, v: &SparseVector) -> bool {
        let mut r = self.reduce(v);
        let Some((p, lead)) = r.leading() else {
            return false;
        };
        let inv = lead.recip();
        r.scale(&inv);
        for row in &mut self.rows {
            let c = row.get(p);
            if !c.is_zero() {
                row.add_scaled(&-c, &r);
            }
        }
        let at = self
            .rows
            .iter()
            .position(|row| row.leading().map(|(q, _)| q > p).unwrap_or(false))
            .unwrap_or(self.rows.len());
        self.rows.insert(at, r);
        true
    }
}

/// Reduced row-echelon basis of the span of `vectors`.
pub fn row_reduce(vectors: &[SparseVector], ambient_dim: usize) -> Result<SubspaceBasis, LinalgError> {
    let mut basis = SubspaceBasis::zero(ambient_dim);
    for v in vectors {
        v.check_dim(ambient_dim)?;
        basis.absorb(v);
    }
    Ok(basis)
}

/// Rank of a list of vectors without fixing an ambient dimension.
pub fn rank(vectors: &[SparseVector]) -> usize {
    let dim = vectors.iter().filter_map(|v| v.max_index()).max().map(|m| m + 1).unwrap_or(0);
    row_reduce(vectors, dim).expect("dimension covers every index").rank()
}

pub fn sum(uu: &SubspaceBasis, ww: &SubspaceBasis) -> Result<SubspaceBasis, LinalgError> {
    if uu.ambient != ww.ambient {
        return Err(LinalgError::DimensionMismatch { left: uu.ambient, right: ww.ambient });
    }
    let mut out = uu.clone();
    for row in &ww.rows {
        out.absorb(row);
    }
    Ok(out)
}

/// Intersection by the Zassenhaus construction: rows `(u | u)` and `(w | 0)`;
/// after reduction, rows with vanishing left half span `U ∩ W` on the right.
pub fn intersect(uu: &SubspaceBasis, ww: &SubspaceBasis) -> Result<SubspaceBasis, LinalgError> {
    if uu.ambient != ww.ambient {
        return Err(LinalgError::DimensionMismatch { left: uu.ambient, right: ww.ambient });
    }
    let n = uu.ambient;
    let mut stacked = Vec::with_capacity(uu.rank() + ww.rank());
    for u in &uu.rows {
        let mut row = u.clone();
        row.add_scaled(&Scalar::one(), &u.shifted(n));
        stacked.push(row);
    }
    stacked.extend(ww.rows.iter().cloned());
    let reduced = row_reduce(&stacked, 2 * n)?;
    let tail: Vec<SparseVector> = reduced
        .rows
        .iter()
        .filter(|r| r.leading().map(|(p, _)| p >= n).unwrap_or(false))
        .map(|r| r.window(n, 2 * n))
        .collect();
    row_reduce(&tail, n)
}

pub fn quotient_dim(ambient_dim: usize, sub: &SubspaceBasis) -> usize {
    debug_assert!(sub.rank() <= ambient_dim);
    ambient_dim - sub.rank()
}

/// Kernel of the linear map sending the `k`-th domain basis vector to
/// `images[k]`; the codomain only needs to contain every image index.
pub fn kernel(images: &[SparseVector]) -> SubspaceBasis {
    let n = images.len();
    let shift = images.iter().filter_map(|v| v.max_index()).max().map(|m| m + 1).unwrap_or(0);
    let rows: Vec<SparseVector> = images
        .iter()
        .enumerate()
        .map(|(k, img)| {
            let mut row = img.clone();
            row.add_to(shift + k, Scalar::one());
            row
        })
        .collect();
    let reduced = row_reduce(&rows, shift + n).expect("dimension covers every index");
    let ker: Vec<SparseVector> = reduced
        .rows
        .iter()
        .filter(|r| r.leading().map(|(p, _)| p >= shift).unwrap_or(false))
        .map(|r| r.window(shift, shift + n))
        .collect();
    row_reduce(&ker, n).expect("window has domain dimension")
}

/// Solution set of an affine system `Σ_k x_k · columns[k] = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    /// One solution, with every free unknown set to zero.
    pub particular: Vec<Scalar>,
    /// Dimension of the solution space; zero means the solution is unique.
    pub nullity: usize,
    /// Basis of the homogeneous solutions.
    pub homogeneous: SubspaceBasis,
}

/// Solves `Σ_k x_k · columns[k] = rhs`; `None` when inconsistent.
pub fn solve_affine(columns: &[SparseVector], rhs: &SparseVector) -> Option<AffineSolution> {
    let k = columns.len();
    let mut equations: BTreeMap<usize, SparseVector> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for (r, c) in col.iter() {
            equations.entry(r).or_default().add_to(j, c.clone());
        }
    }
    for (r, c) in rhs.iter() {
        equations.entry(r).or_default().add_to(k, c.clone());
    }
    let rows: Vec<SparseVector> = equations.into_values().filter(|r| !r.is_zero()).collect();
    let reduced = row_reduce(&rows, k + 1).expect("equations are indexed by unknowns");
    let mut particular = vec![Scalar::zero(); k];
    for row in reduced.rows() {
        let (p, _) = row.leading().expect("rows are nonzero");
        if p == k {
            return None;
        }
        particular[p] = row.get(k);
    }
    let homogeneous = kernel(columns);
    Some(AffineSolution { particular, nullity: homogeneous.rank(), homogeneous })
}

/// Dense matrix helpers used by reports.
pub fn dense_rank(matrix: &[Vec<Scalar>]) -> usize {
    let rows: Vec<SparseVector> = matrix
        .iter()
        .map(|r| SparseVector::from_pairs(r.iter().cloned().enumerate()))
        .collect();
    let cols = matrix.first().map(Vec::len).unwrap_or(0);
    row_reduce(&rows, cols).expect("dense rows fit their width").rank()
}

pub fn is_integer(c: &Scalar) -> bool {
    c.is_integer()
}

pub fn abs(c: &Scalar) -> Scalar {
    c.abs()
}
