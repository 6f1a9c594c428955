//! Similarity matrices, best-match selection, and top-1 accuracy.
//!
//! A matching run scores every query descriptor against every reference
//! descriptor, picks the best reference per query, and checks it against the
//! ground truth. The resulting binary matches list is what the real-time
//! matched frames metric consumes.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::cohog::{cohog_match, CohogError, RegionalDescriptorSet};
use crate::hog::{cosine_raw, GlobalDescriptor};
use crate::math;

/// How two descriptors are scored. Higher scores always mean more similar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Metric {
    /// Cosine similarity between global vectors.
    Cosine,
    /// Negated L1 distance between global vectors (0 is a perfect match).
    L1,
    /// Regional matching between regional descriptor sets.
    Regional,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Cosine => "cosine",
            Metric::L1 => "l1",
            Metric::Regional => "regional",
        }
    }
}

impl FromStr for Metric {
    type Err = MatchingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cosine" => Ok(Metric::Cosine),
            "l1" => Ok(Metric::L1),
            "regional" => Ok(Metric::Regional),
            _ => Err(MatchingError::UnknownMetric),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One image descriptor of either kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Descriptor {
    Global(GlobalDescriptor),
    Regional(RegionalDescriptorSet),
}

impl Descriptor {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Descriptor::Global(_) => "global",
            Descriptor::Regional(_) => "regional",
        }
    }
}

/// Dense query-by-reference score matrix.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimilarityMatrix {
    n_queries: usize,
    n_refs: usize,
    metric: Metric,
    /// Row-major scores, row = query.
    scores: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>, metric: Metric) -> Result<Self, MatchingError> {
        let n_queries = rows.len();
        if n_queries == 0 {
            return Err(MatchingError::EmptySet);
        }
        let n_refs = rows[0].len();
        if n_refs == 0 {
            return Err(MatchingError::EmptySet);
        }
        let mut scores = Vec::with_capacity(n_queries * n_refs);
        for row in rows {
            if row.len() != n_refs {
                return Err(MatchingError::RaggedRows {
                    expected: n_refs,
                    got: row.len(),
                });
            }
            scores.extend_from_slice(&row);
        }
        Ok(Self {
            n_queries,
            n_refs,
            metric,
            scores,
        })
    }

    pub fn n_queries(&self) -> usize {
        self.n_queries
    }

    pub fn n_refs(&self) -> usize {
        self.n_refs
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    #[inline]
    pub fn score(&self, query: usize, reference: usize) -> f64 {
        self.scores[query * self.n_refs + reference]
    }

    pub fn row(&self, query: usize) -> &[f64] {
        &self.scores[query * self.n_refs..(query + 1) * self.n_refs]
    }
}

/// Query index -> correct reference index, with an optional +/- frame window.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroundTruth {
    mapping: Vec<usize>,
    tolerance: usize,
}

impl GroundTruth {
    pub fn new(mapping: Vec<usize>, tolerance: usize) -> Self {
        Self { mapping, tolerance }
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn tolerance(&self) -> usize {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }
}

/// Outcome of evaluating a similarity matrix against ground truth.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatchOutcome {
    /// 1 where the top-ranked reference was correct, per query.
    pub matches_list: Vec<u8>,
    /// Top-ranked reference index per query.
    pub best_indices: Vec<usize>,
    /// Fraction of correctly matched queries.
    pub accuracy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchingError {
    DimMismatch {
        left: usize,
        right: usize,
    },
    /// Descriptor kind does not fit the metric, or kinds are mixed.
    KindMismatch,
    UnknownMetric,
    EmptySet,
    RaggedRows {
        expected: usize,
        got: usize,
    },
    /// Ground truth does not cover the matrix rows.
    CoverageMismatch {
        queries: usize,
        entries: usize,
    },
    /// Ground truth references an index outside the reference list.
    RefIndexOutOfRange {
        query: usize,
        reference: usize,
    },
}

impl fmt::Display for MatchingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingError::DimMismatch { left, right } => {
                write!(f, "descriptor dimensions differ: {left} vs {right}")
            }
            MatchingError::KindMismatch => {
                write!(f, "descriptor kind does not match the requested metric")
            }
            MatchingError::UnknownMetric => write!(f, "unknown metric tag"),
            MatchingError::EmptySet => write!(f, "descriptor list is empty"),
            MatchingError::RaggedRows { expected, got } => {
                write!(f, "similarity rows differ in length: {got} vs {expected}")
            }
            MatchingError::CoverageMismatch { queries, entries } => write!(
                f,
                "ground truth has {entries} entries for {queries} queries"
            ),
            MatchingError::RefIndexOutOfRange { query, reference } => write!(
                f,
                "ground truth for query {query} references out-of-range index {reference}"
            ),
        }
    }
}

impl core::error::Error for MatchingError {}

impl From<CohogError> for MatchingError {
    fn from(e: CohogError) -> Self {
        match e {
            CohogError::EmptyDescriptorSet => MatchingError::EmptySet,
            CohogError::Hog(crate::hog::HogError::DimMismatch { left, right }) => {
                MatchingError::DimMismatch { left, right }
            }
            _ => MatchingError::KindMismatch,
        }
    }
}

/// Negated sum of absolute differences; 0 is a perfect match.
pub fn l1_similarity(a: &[f64], b: &[f64]) -> Result<f64, MatchingError> {
    if a.len() != b.len() {
        return Err(MatchingError::DimMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut sum = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        sum += math::abs(x - y);
    }
    Ok(-sum)
}

/// Scores one query descriptor against one reference descriptor.
pub fn score_pair(
    query: &Descriptor,
    reference: &Descriptor,
    metric: Metric,
) -> Result<f64, MatchingError> {
    match (metric, query, reference) {
        (Metric::Cosine, Descriptor::Global(q), Descriptor::Global(r)) => {
            if q.dim() != r.dim() {
                return Err(MatchingError::DimMismatch {
                    left: q.dim(),
                    right: r.dim(),
                });
            }
            Ok(cosine_raw(q.values(), r.values()))
        }
        (Metric::L1, Descriptor::Global(q), Descriptor::Global(r)) => {
            l1_similarity(q.values(), r.values())
        }
        (Metric::Regional, Descriptor::Regional(q), Descriptor::Regional(r)) => {
            cohog_match(q, r).map_err(MatchingError::from)
        }
        _ => Err(MatchingError::KindMismatch),
    }
}

/// One similarity-matrix row: a query scored against every reference.
pub fn similarity_row(
    query: &Descriptor,
    refs: &[Descriptor],
    metric: Metric,
) -> Result<Vec<f64>, MatchingError> {
    if refs.is_empty() {
        return Err(MatchingError::EmptySet);
    }
    let mut row = Vec::with_capacity(refs.len());
    for reference in refs {
        row.push(score_pair(query, reference, metric)?);
    }
    Ok(row)
}

/// Exhaustive query-by-reference similarity matrix.
pub fn similarity_matrix(
    queries: &[Descriptor],
    refs: &[Descriptor],
    metric: Metric,
) -> Result<SimilarityMatrix, MatchingError> {
    if queries.is_empty() || refs.is_empty() {
        return Err(MatchingError::EmptySet);
    }
    let mut rows = Vec::with_capacity(queries.len());
    for query in queries {
        rows.push(similarity_row(query, refs, metric)?);
    }
    SimilarityMatrix::from_rows(rows, metric)
}

/// Picks the best reference per query (ties break to the lowest index) and
/// marks it correct when it lies within the ground-truth tolerance window.
pub fn evaluate_matches(
    matrix: &SimilarityMatrix,
    gt: &GroundTruth,
) -> Result<MatchOutcome, MatchingError> {
    if gt.len() != matrix.n_queries() {
        return Err(MatchingError::CoverageMismatch {
            queries: matrix.n_queries(),
            entries: gt.len(),
        });
    }
    for (query, &reference) in gt.mapping().iter().enumerate() {
        if reference >= matrix.n_refs() {
            return Err(MatchingError::RefIndexOutOfRange { query, reference });
        }
    }

    let mut matches_list = Vec::with_capacity(matrix.n_queries());
    let mut best_indices = Vec::with_capacity(matrix.n_queries());
    for query in 0..matrix.n_queries() {
        let row = matrix.row(query);
        let mut best = 0usize;
        for (j, &score) in row.iter().enumerate() {
            if score > row[best] {
                best = j;
            }
        }
        let expected = gt.mapping()[query];
        let distance = best.abs_diff(expected);
        matches_list.push(u8::from(distance <= gt.tolerance()));
        best_indices.push(best);
    }
    let correct: u64 = matches_list.iter().map(|&m| u64::from(m)).sum();
    let accuracy = correct as f64 / matches_list.len() as f64;
    Ok(MatchOutcome {
        matches_list,
        best_indices,
        accuracy,
    })
}
