//! The group of complex divisors on a marked curve.
//!
//! A divisor carries Gaussian-rational coefficients at the marks `Q_1..Q_n`
//! and integer coefficients everywhere else; its total degree is an integer.
//! All coefficient arithmetic is exact, so group membership is decided
//! without tolerances. Points stay `f64`.
//!
//! The disk containing the marks is represented only by the mark ordering
//! and by the coordinates given for the marks: on a torus those coordinates
//! are the lift used by [`crate::curve::abel_jacobi_sum`].

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::curve::{abel_jacobi_sum, lattice_distance, reduce_to_fundamental_domain, CurveModel, CurvePoint};
use crate::literal::{self, PointLiteral};
use crate::{Error, GaussianRational, Result};

#[derive(Debug)]
struct MarkedCurveData {
    curve: CurveModel,
    marks: Vec<CurvePoint>,
}

/// A curve with an ordered set of distinct marked points. Cheap to clone.
#[derive(Debug, Clone)]
pub struct MarkedCurve {
    inner: Arc<MarkedCurveData>,
}

impl PartialEq for MarkedCurve {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.curve == other.inner.curve
                && self.inner.marks.len() == other.inner.marks.len()
                && self
                    .inner
                    .marks
                    .iter()
                    .zip(&other.inner.marks)
                    .all(|(a, b)| a.coordinate() == b.coordinate()))
    }
}

impl MarkedCurve {
    pub fn new(curve: CurveModel, marks: Vec<CurvePoint>) -> Result<Self> {
        for (i, p) in marks.iter().enumerate() {
            if p.is_infinity() {
                return Err(Error::MarkAtInfinity);
            }
            if marks[..i].iter().any(|q| curve.same_point(*p, *q)) {
                return Err(Error::DuplicateMarks);
            }
        }
        Ok(Self { inner: Arc::new(MarkedCurveData { curve, marks }) })
    }

    /// `n = 0`.
    pub fn unmarked(curve: CurveModel) -> Self {
        Self { inner: Arc::new(MarkedCurveData { curve, marks: Vec::new() }) }
    }

    pub fn curve(&self) -> &CurveModel {
        &self.inner.curve
    }

    pub fn marks(&self) -> &[CurvePoint] {
        &self.inner.marks
    }

    pub fn mark(&self, index: usize) -> Result<CurvePoint> {
        self.inner
            .marks
            .get(index)
            .copied()
            .ok_or(Error::MarkOutOfRange { index, count: self.inner.marks.len() })
    }

    pub fn mark_count(&self) -> usize {
        self.inner.marks.len()
    }

    /// Index of the mark coinciding with `p`, if any.
    pub fn mark_index_of(&self, p: CurvePoint) -> Option<usize> {
        self.inner.marks.iter().position(|m| self.inner.curve.same_point(*m, p))
    }
}

/// Where a coefficient sits: at a mark, or at an ordinary point.
#[derive(Debug, Clone, Copy)]
pub enum PointRef {
    Mark(usize),
    Point(CurvePoint),
}

/// One nonzero term `n_P * P` of a divisor.
#[derive(Debug, Clone)]
pub struct Term {
    pub point: CurvePoint,
    pub coefficient: GaussianRational,
    /// `Some(i)` when `point` is the mark `Q_(i+1)`.
    pub mark: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ComplexDivisor {
    context: MarkedCurve,
    marked: BTreeMap<usize, GaussianRational>,
    /// Sorted by the curve's canonical key; points pairwise distinct and off the marks.
    integral: Vec<(CurvePoint, i64)>,
    degree: i64,
}

impl ComplexDivisor {
    pub fn zero(mc: &MarkedCurve) -> Self {
        Self { context: mc.clone(), marked: BTreeMap::new(), integral: Vec::new(), degree: 0 }
    }

    /// Builds `sum coefficient * point`, merging repeated points.
    ///
    /// An ordinary point that coincides with a mark is booked at that mark.
    pub fn from_terms<I>(mc: &MarkedCurve, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GaussianRational, PointRef)>,
    {
        let curve = *mc.curve();
        let mut marked: BTreeMap<usize, GaussianRational> = BTreeMap::new();
        let mut others: Vec<(CurvePoint, GaussianRational)> = Vec::new();
        for (coefficient, point) in terms {
            let slot = match point {
                PointRef::Mark(i) => Some(i),
                PointRef::Point(p) => {
                    curve.check_point(p)?;
                    mc.mark_index_of(p)
                }
            };
            match (slot, point) {
                (Some(i), _) => {
                    mc.mark(i)?;
                    *marked.entry(i).or_default() += &coefficient;
                }
                (None, PointRef::Point(p)) => match others.iter_mut().find(|(q, _)| curve.same_point(p, *q)) {
                    Some((_, c)) => *c += &coefficient,
                    None => others.push((p, coefficient)),
                },
                (None, PointRef::Mark(_)) => unreachable!(),
            }
        }
        marked.retain(|_, c| !c.is_zero());
        let mut integral = Vec::with_capacity(others.len());
        for (p, c) in others {
            if c.is_zero() {
                continue;
            }
            let n = c.to_integer().ok_or(Error::NonIntegralOffMarks)?;
            integral.push((p, n.to_i64().ok_or(Error::Overflow)?));
        }
        integral.sort_by(|a, b| {
            let (ka, kb) = (curve.canonical_key(a.0), curve.canonical_key(b.0));
            ka.partial_cmp(&kb).unwrap_or(core::cmp::Ordering::Equal)
        });
        let total: GaussianRational = marked.values().sum();
        let mut degree = total.to_integer().ok_or(Error::DegreeNotIntegral)?;
        for (_, n) in &integral {
            degree += *n;
        }
        let degree = degree.to_i64().ok_or(Error::Overflow)?;
        Ok(Self { context: mc.clone(), marked, integral, degree })
    }

    /// Parses the divisor grammar of [`crate::literal`] against `mc`.
    pub fn parse(mc: &MarkedCurve, text: &str) -> Result<Self> {
        let terms = literal::parse_divisor_terms(text)?;
        let refs = terms.into_iter().map(|t| {
            let point = match t.point {
                PointLiteral::Mark(i) => PointRef::Mark(i),
                PointLiteral::Infinity => PointRef::Point(CurvePoint::Infinity),
                PointLiteral::Affine(z) => PointRef::Point(CurvePoint::Affine(z)),
            };
            (t.coefficient, point)
        });
        Self::from_terms(mc, refs)
    }

    /// Divisor supported on the marks with the given coefficients (`None` or zero entries skipped).
    pub fn on_marks(mc: &MarkedCurve, coefficients: &[GaussianRational]) -> Result<Self> {
        Self::from_terms(mc, coefficients.iter().cloned().enumerate().map(|(i, c)| (c, PointRef::Mark(i))))
    }

    pub fn context(&self) -> &MarkedCurve {
        &self.context
    }

    pub fn curve(&self) -> &CurveModel {
        self.context.curve()
    }

    /// `deg D`, exact.
    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.marked.is_empty() && self.integral.is_empty()
    }

    /// All coefficients lie in Z.
    pub fn is_integral(&self) -> bool {
        self.marked.values().all(GaussianRational::is_integer)
    }

    pub fn is_supported_on_marks(&self) -> bool {
        self.integral.is_empty()
    }

    /// `n_(Q_(i+1))`, zero when absent.
    pub fn coefficient_at_mark(&self, index: usize) -> Result<GaussianRational> {
        self.context.mark(index)?;
        Ok(self.marked.get(&index).cloned().unwrap_or_default())
    }

    /// Sum of the coefficients at marks.
    pub fn marked_degree(&self) -> GaussianRational {
        self.marked.values().sum()
    }

    /// Nonzero terms: marks in index order, then ordinary points.
    pub fn terms(&self) -> Vec<Term> {
        let marks = self.context.marks();
        self.marked
            .iter()
            .map(|(&i, c)| Term { point: marks[i], coefficient: c.clone(), mark: Some(i) })
            .chain(self.integral.iter().map(|&(p, n)| Term {
                point: p,
                coefficient: GaussianRational::from_integer(n),
                mark: None,
            }))
            .collect()
    }

    fn refs(&self) -> impl Iterator<Item = (GaussianRational, PointRef)> + '_ {
        self.marked
            .iter()
            .map(|(&i, c)| (c.clone(), PointRef::Mark(i)))
            .chain(self.integral.iter().map(|&(p, n)| (GaussianRational::from_integer(n), PointRef::Point(p))))
    }

    fn check_context(&self, other: &Self) -> Result<()> {
        if self.context == other.context {
            Ok(())
        } else {
            Err(Error::MismatchedContext)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        Self::from_terms(&self.context, self.refs().chain(other.refs()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        Self::from_terms(&self.context, self.refs().chain(other.refs().map(|(c, p)| (-c, p))))
    }

    pub fn neg(&self) -> Self {
        Self {
            context: self.context.clone(),
            marked: self.marked.iter().map(|(&i, c)| (i, -c)).collect(),
            integral: self.integral.iter().map(|&(p, n)| (p, -n)).collect(),
            degree: -self.degree,
        }
    }

    /// `alpha * D`. Non-integer `alpha` needs the support inside the marks.
    pub fn scale(&self, alpha: &GaussianRational) -> Result<Self> {
        if !alpha.is_integer() && !self.integral.is_empty() {
            return Err(Error::NonIntegralOffMarks);
        }
        Self::from_terms(&self.context, self.refs().map(|(c, p)| (alpha * &c, p)))
    }

    /// The same formal sum on another marked curve over the same curve.
    /// Points that coincide with marks of `mc` are attached to those marks.
    pub fn with_context(&self, mc: &MarkedCurve) -> Result<Self> {
        if mc.curve() != self.curve() {
            return Err(Error::MismatchedContext);
        }
        Self::from_terms(mc, self.terms().into_iter().map(|t| (t.coefficient, PointRef::Point(t.point))))
    }

    /// Coefficients replaced by their complex conjugates.
    pub fn conj(&self) -> Self {
        Self {
            context: self.context.clone(),
            marked: self.marked.iter().map(|(&i, c)| (i, c.conj())).collect(),
            integral: self.integral.clone(),
            degree: self.degree,
        }
    }
}

impl PartialEq for ComplexDivisor {
    fn eq(&self, other: &Self) -> bool {
        let curve = self.curve();
        self.context == other.context
            && self.marked == other.marked
            && self.integral.len() == other.integral.len()
            && self
                .integral
                .iter()
                .all(|(p, n)| other.integral.iter().any(|(q, m)| n == m && curve.same_point(*p, *q)))
    }
}

impl fmt::Display for ComplexDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for term in self.terms() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            let point = match (term.mark, term.point) {
                (Some(i), _) => PointLiteral::Mark(i),
                (None, CurvePoint::Infinity) => PointLiteral::Infinity,
                (None, CurvePoint::Affine(z)) => PointLiteral::Affine(z),
            };
            write!(f, "{}@{}", term.coefficient, literal::format_point(&point))?;
        }
        Ok(())
    }
}

/// Invariant of the divisor class: the degree, plus the Abel-Jacobi image on a torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDescriptor {
    pub degree: i64,
    /// Torus only: `sum n_P P` reduced to the fundamental domain.
    pub jacobian: Option<Complex64>,
    pub tau: Option<Complex64>,
}

impl ClassDescriptor {
    /// Equality with the Jacobian part compared modulo the lattice (tolerance 1e-9).
    pub fn same_class(&self, other: &Self) -> bool {
        if self.degree != other.degree || self.tau != other.tau {
            return false;
        }
        match (self.jacobian, other.jacobian, self.tau) {
            (None, None, _) => true,
            (Some(a), Some(b), Some(tau)) => lattice_distance(a - b, tau) < crate::curve::TORUS_POINT_TOL,
            _ => false,
        }
    }

    /// Component-wise sum, the Jacobian part reduced again.
    pub fn combine(&self, other: &Self) -> Self {
        let jacobian = match (self.jacobian, other.jacobian, self.tau) {
            (Some(a), Some(b), Some(tau)) => Some(reduce_to_fundamental_domain(a + b, tau)),
            _ => None,
        };
        Self { degree: self.degree + other.degree, jacobian, tau: self.tau }
    }
}

pub fn class_invariant(mc: &MarkedCurve, d: &ComplexDivisor) -> Result<ClassDescriptor> {
    if mc != d.context() {
        return Err(Error::MismatchedContext);
    }
    let curve = mc.curve();
    let jacobian = match curve {
        CurveModel::Sphere => None,
        CurveModel::Torus(_) => Some(abel_jacobi_sum(curve, d)?.reduced),
    };
    Ok(ClassDescriptor { degree: d.degree(), jacobian, tau: curve.tau() })
}
