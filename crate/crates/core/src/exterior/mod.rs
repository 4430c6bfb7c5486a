//! Sparse exterior algebra over ℝᴺ.
//!
//! Coordinates are 1-indexed throughout: a [`MultiIndex`] `[1, 3]` names the
//! basis covector `e1*∧e3*` (or the basis bivector `e1∧e3`). Forms and
//! multivectors store only their nonzero coefficients, keyed by strictly
//! increasing multi-indices, and drop anything below [`PRUNE_THRESHOLD`] after
//! arithmetic.
//!
//! The interior product is fixed as `(ξ⌟φ)(η) = φ(η∧ξ)`: the contracting
//! multivector is appended on the right of the test vector.

mod embedding;
mod simple;
pub mod text;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

pub use embedding::CoordinateEmbedding;
pub(crate) use simple::{gram_deviation, gram_schmidt};
pub use simple::{is_simple, Orientation, SimpleVector, DEFAULT_SIMPLE_TOL};

pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// A strictly increasing list of 1-based coordinate indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>, ambient_dim: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing(indices));
        }
        if let Some(&index) = indices.iter().find(|&&i| i == 0 || i > ambient_dim) {
            return Err(Error::IndexOutOfRange { index, dim: ambient_dim });
        }
        Ok(Self(indices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Sorts an arbitrary index list and returns the sign of the sorting
    /// permutation. A repeated index is an error (the wedge would vanish).
    pub fn sorted(indices: &[usize], ambient_dim: usize) -> Result<(Self, f64)> {
        let mut v = indices.to_vec();
        let mut sign = 1.0;
        // insertion sort, counting transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedIndex(w[0]));
        }
        Ok((Self::new(v, ambient_dim)?, sign))
    }

    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn max_index(&self) -> usize {
        self.0.last().copied().unwrap_or(0)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// All multi-indices of the given degree in ℝⁿ, in lexicographic order.
    pub fn combinations(n: usize, m: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        if m > n {
            return out;
        }
        let mut cur: Vec<usize> = (1..=m).collect();
        loop {
            out.push(Self(cur.clone()));
            // advance
            let mut k = m;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if cur[k] < n - (m - 1 - k) {
                    cur[k] += 1;
                    for t in k + 1..m {
                        cur[t] = cur[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Merges two sorted index lists. Returns `None` when they share an index,
/// otherwise the merged list and the sign of the shuffle `a ++ b -> sorted`.
pub(crate) fn shuffle(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut ia, mut ib) = (0, 0);
    let mut inversions = 0usize;
    while ia < a.len() && ib < b.len() {
        match a[ia].cmp(&b[ib]) {
            std::cmp::Ordering::Less => {
                out.push(a[ia]);
                ia += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[ib]);
                inversions += a.len() - ia;
                ib += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[ia..]);
    out.extend_from_slice(&b[ib..]);
    let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((out, sign))
}

/// `sup \ sub` together with the sign σ such that `e_{rest} ∧ e_{sub} = σ e_{sup}`,
/// or `None` if `sub ⊄ sup`.
fn split_off(sup: &[usize], sub: &[usize]) -> Option<(Vec<usize>, f64)> {
    let rest: Vec<usize> = sup.iter().copied().filter(|i| sub.binary_search(i).is_err()).collect();
    if rest.len() + sub.len() != sup.len() {
        return None;
    }
    let (_, sign) = shuffle(&rest, sub)?;
    Some((rest, sign))
}

type Terms = BTreeMap<MultiIndex, f64>;

fn accumulate(terms: &mut Terms, key: MultiIndex, value: f64) {
    *terms.entry(key).or_insert(0.0) += value;
}

fn prune(terms: &mut Terms) {
    terms.retain(|_, c| c.abs() > PRUNE_THRESHOLD);
}

fn wedge_terms(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (i, ca) in a {
        for (j, cb) in b {
            if let Some((k, s)) = shuffle(i.indices(), j.indices()) {
                accumulate(&mut out, MultiIndex::from_sorted(k), s * ca * cb);
            }
        }
    }
    prune(&mut out);
    out
}

macro_rules! graded_element {
    ($name:ident) => {
        impl $name {
            pub fn zero(dim: usize, degree: usize) -> Result<Self> {
                if degree > dim {
                    return Err(Error::DegreeOverflow { degree, dim });
                }
                Ok(Self { dim, degree, coeffs: BTreeMap::new() })
            }

            /// Degree-0 element with the given value.
            pub fn scalar(dim: usize, value: f64) -> Self {
                let mut coeffs = BTreeMap::new();
                if value.abs() > PRUNE_THRESHOLD {
                    coeffs.insert(MultiIndex::empty(), value);
                }
                Self { dim, degree: 0, coeffs }
            }

            /// Builds from `(indices, coefficient)` pairs. Indices may come in any
            /// order (the sorting sign is applied); duplicates are summed.
            pub fn from_terms<I, V>(dim: usize, degree: usize, terms: I) -> Result<Self>
            where
                I: IntoIterator<Item = (V, f64)>,
                V: AsRef<[usize]>,
            {
                let mut out = Self::zero(dim, degree)?;
                for (idx, c) in terms {
                    let idx = idx.as_ref();
                    if idx.len() != degree {
                        return Err(Error::DegreeMismatch { expected: degree, found: idx.len() });
                    }
                    let (key, sign) = MultiIndex::sorted(idx, dim)?;
                    accumulate(&mut out.coeffs, key, sign * c);
                }
                prune(&mut out.coeffs);
                Ok(out)
            }

            /// The single basis element on the given (strictly increasing) indices.
            pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
                let key = MultiIndex::new(indices.to_vec(), dim)?;
                let mut coeffs = BTreeMap::new();
                coeffs.insert(key, 1.0);
                Ok(Self { dim, degree: indices.len(), coeffs })
            }

            pub fn from_dense(basis: &Basis, values: &[f64]) -> Self {
                assert_eq!(values.len(), basis.len());
                let mut coeffs = BTreeMap::new();
                for (key, &v) in basis.indices().iter().zip(values) {
                    if v.abs() > PRUNE_THRESHOLD {
                        coeffs.insert(key.clone(), v);
                    }
                }
                Self { dim: basis.dim(), degree: basis.degree(), coeffs }
            }

            pub fn to_dense(&self, basis: &Basis) -> Vec<f64> {
                assert_eq!((self.dim, self.degree), (basis.dim(), basis.degree()));
                let mut out = vec![0.0; basis.len()];
                for (key, c) in &self.coeffs {
                    out[basis.position(key).expect("index in basis")] = *c;
                }
                out
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn degree(&self) -> usize {
                self.degree
            }

            pub fn coeff(&self, key: &MultiIndex) -> f64 {
                self.coeffs.get(key).copied().unwrap_or(0.0)
            }

            /// Coefficient on sorted 1-based indices; zero if absent or malformed.
            pub fn get(&self, indices: &[usize]) -> f64 {
                self.coeffs.get(&MultiIndex(indices.to_vec())).copied().unwrap_or(0.0)
            }

            pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
                self.coeffs.iter().map(|(k, c)| (k, *c))
            }

            pub fn num_terms(&self) -> usize {
                self.coeffs.len()
            }

            pub fn is_zero(&self) -> bool {
                self.coeffs.is_empty()
            }

            /// Euclidean norm of the coefficient vector.
            pub fn norm(&self) -> f64 {
                self.coeffs.values().map(|c| c * c).sum::<f64>().sqrt()
            }

            pub fn max_abs_coeff(&self) -> f64 {
                self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
            }

            pub fn scaled(&self, s: f64) -> Self {
                let mut out = self.clone();
                for c in out.coeffs.values_mut() {
                    *c *= s;
                }
                prune(&mut out.coeffs);
                out
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.axpy(1.0, other)
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.axpy(-1.0, other)
            }

            /// `self + a·other`.
            pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
                if self.dim != other.dim {
                    return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
                }
                if self.degree != other.degree {
                    return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
                }
                let mut out = self.clone();
                for (k, c) in &other.coeffs {
                    accumulate(&mut out.coeffs, k.clone(), a * c);
                }
                prune(&mut out.coeffs);
                Ok(out)
            }

            pub fn wedge(&self, other: &Self) -> Result<Self> {
                if self.dim != other.dim {
                    return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
                }
                let degree = self.degree + other.degree;
                if degree > self.dim {
                    return Err(Error::DegreeOverflow { degree, dim: self.dim });
                }
                Ok(Self { dim: self.dim, degree, coeffs: wedge_terms(&self.coeffs, &other.coeffs) })
            }

            /// Euclidean inner product of coefficient vectors.
            pub fn dot(&self, other: &Self) -> Result<f64> {
                if self.dim != other.dim {
                    return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
                }
                if self.degree != other.degree {
                    return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
                }
                Ok(pair(&self.coeffs, &other.coeffs))
            }

            /// Hodge star with respect to the standard orientation:
            /// `e_I ∧ ⋆e_I = e_1∧…∧e_N`.
            pub fn hodge_star(&self) -> Self {
                let full: Vec<usize> = (1..=self.dim).collect();
                let mut coeffs = BTreeMap::new();
                for (k, c) in &self.coeffs {
                    let (rest, _) = split_off(&full, k.indices()).expect("subset of full index set");
                    let (_, sign) = shuffle(k.indices(), &rest).expect("disjoint");
                    coeffs.insert(MultiIndex::from_sorted(rest), sign * c);
                }
                Self { dim: self.dim, degree: self.dim - self.degree, coeffs }
            }

            /// Largest coordinate index carrying a nonzero coefficient.
            pub fn support_max_index(&self) -> usize {
                self.coeffs.keys().map(|k| k.max_index()).max().unwrap_or(0)
            }
        }
    };
}

fn pair(a: &Terms, b: &Terms) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().map(|(k, c)| c * large.get(k).copied().unwrap_or(0.0)).sum()
}

/// A constant-coefficient alternating m-form on ℝᴺ.
#[derive(Clone, Debug, PartialEq)]
pub struct AlternatingForm {
    dim: usize,
    degree: usize,
    coeffs: Terms,
}

/// An element of ΛᵐℝᴺЛ in the standard basis `e_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiVector {
    dim: usize,
    degree: usize,
    coeffs: Terms,
}

graded_element!(AlternatingForm);
graded_element!(MultiVector);

impl AlternatingForm {
    /// The covector identified with a multivector through the Euclidean metric.
    pub fn dual_of(xi: &MultiVector) -> Self {
        Self { dim: xi.dim, degree: xi.degree, coeffs: xi.coeffs.clone() }
    }

    pub fn covector(v: &[f64]) -> Self {
        Self::dual_of(&MultiVector::vector(v))
    }
}

impl MultiVector {
    pub fn vector(v: &[f64]) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, &x) in v.iter().enumerate() {
            if x.abs() > PRUNE_THRESHOLD {
                coeffs.insert(MultiIndex(vec![i + 1]), x);
            }
        }
        Self { dim: v.len(), degree: 1, coeffs }
    }

    /// `v₁∧v₂∧…∧v_k`; the empty list gives the unit scalar.
    pub fn wedge_vectors(dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let mut acc = Self::scalar(dim, 1.0);
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: v.len() });
            }
            acc = acc.wedge(&Self::vector(v))?;
        }
        Ok(acc)
    }

    pub fn dual(&self) -> AlternatingForm {
        AlternatingForm::dual_of(self)
    }
}

/// Exterior product of two forms.
pub fn wedge(a: &AlternatingForm, b: &AlternatingForm) -> Result<AlternatingForm> {
    a.wedge(b)
}

/// `φ(ξ) = Σ_I φ_I ξ_I`.
pub fn evaluate(phi: &AlternatingForm, xi: &MultiVector) -> Result<f64> {
    if phi.dim != xi.dim {
        return Err(Error::DimensionMismatch { left: phi.dim, right: xi.dim });
    }
    if phi.degree != xi.degree {
        return Err(Error::DegreeMismatch { expected: phi.degree, found: xi.degree });
    }
    Ok(pair(&phi.coeffs, &xi.coeffs))
}

/// Interior product `ξ⌟φ`, defined by `(ξ⌟φ)(η) = φ(η∧ξ)`.
pub fn contract(xi: &MultiVector, phi: &AlternatingForm) -> Result<AlternatingForm> {
    if phi.dim != xi.dim {
        return Err(Error::DimensionMismatch { left: phi.dim, right: xi.dim });
    }
    if xi.degree > phi.degree {
        return Err(Error::DegreeOverflow { degree: xi.degree, dim: phi.degree });
    }
    let mut out = Terms::new();
    for (j, cx) in &xi.coeffs {
        for (i, cp) in &phi.coeffs {
            if let Some((rest, sign)) = split_off(i.indices(), j.indices()) {
                accumulate(&mut out, MultiIndex::from_sorted(rest), sign * cx * cp);
            }
        }
    }
    prune(&mut out);
    Ok(AlternatingForm { dim: phi.dim, degree: phi.degree - xi.degree, coeffs: out })
}

/// Pulls a form on the target space back along a coordinate embedding: only
/// terms lying entirely inside the embedded coordinates survive, reindexed.
pub fn pullback(phi: &AlternatingForm, embedding: &CoordinateEmbedding) -> Result<AlternatingForm> {
    if phi.dim != embedding.target_dim() {
        return Err(Error::DimensionMismatch { left: phi.dim, right: embedding.target_dim() });
    }
    let mut out = AlternatingForm::zero(embedding.source_dim(), phi.degree)?;
    for (key, c) in &phi.coeffs {
        let preimage: Option<Vec<usize>> = key.indices().iter().map(|&t| embedding.preimage(t)).collect();
        if let Some(src) = preimage {
            let (k, sign) = MultiIndex::sorted(&src, embedding.source_dim())?;
            accumulate(&mut out.coeffs, k, sign * c);
        }
    }
    prune(&mut out.coeffs);
    Ok(out)
}

/// Pushes a multivector forward along a coordinate embedding.
pub fn push_forward(xi: &MultiVector, embedding: &CoordinateEmbedding) -> Result<MultiVector> {
    if xi.dim != embedding.source_dim() {
        return Err(Error::DimensionMismatch { left: xi.dim, right: embedding.source_dim() });
    }
    let mut out = MultiVector::zero(embedding.target_dim(), xi.degree)?;
    for (key, c) in &xi.coeffs {
        let image: Vec<usize> = key.indices().iter().map(|&s| embedding.image(s)).collect();
        let (k, sign) = MultiIndex::sorted(&image, embedding.target_dim())?;
        accumulate(&mut out.coeffs, k, sign * c);
    }
    prune(&mut out.coeffs);
    Ok(out)
}

/// Extends a form on the source space to the target space by composing with
/// the coordinate projection (the reindexing adjoint to [`pullback`]).
pub fn extend_form(phi: &AlternatingForm, embedding: &CoordinateEmbedding) -> Result<AlternatingForm> {
    let as_vector = MultiVector { dim: phi.dim, degree: phi.degree, coeffs: phi.coeffs.clone() };
    Ok(push_forward(&as_vector, embedding)?.dual())
}

/// Dense coordinates for Λᵐ(ℝᴺ): multi-indices in lexicographic order.
#[derive(Clone, Debug)]
pub struct Basis {
    dim: usize,
    degree: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
}

impl Basis {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if degree > dim {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        let indices = MultiIndex::combinations(dim, degree);
        let lookup = indices.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Ok(Self { dim, degree, indices, lookup })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, key: &MultiIndex) -> Option<usize> {
        self.lookup.get(key).copied()
    }
}
