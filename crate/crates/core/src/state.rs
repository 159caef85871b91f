//! Multi-subsystem states: layouts, validated density matrices, partial
//! trace, partial transpose and subsystem permutation.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, vec_norm, ComplexMatrix, ZERO};
use crate::tol;

/// Ordered, labeled tensor factors of a Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemLayout {
    subsystems: Vec<(String, usize)>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(subsystems: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let subsystems: Vec<(String, usize)> =
            subsystems.into_iter().map(|(l, d)| (l.into(), d)).collect();
        if subsystems.is_empty() {
            return Err(Error::invalid("layout has no subsystems"));
        }
        let mut seen = BTreeSet::new();
        for (label, dim) in &subsystems {
            if label.is_empty() {
                return Err(Error::invalid("empty subsystem label"));
            }
            if label.contains('|') {
                return Err(Error::invalid(format!("label `{label}` contains `|`")));
            }
            if *dim < 2 {
                return Err(Error::invalid(format!(
                    "subsystem `{label}` has dimension {dim}; at least 2 is required"
                )));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::invalid(format!("duplicate subsystem label `{label}`")));
            }
        }
        Ok(Self { subsystems })
    }

    /// Layout of qubits with the given labels.
    pub fn qubits(labels: &[&str]) -> Self {
        Self::new(labels.iter().map(|&l| (l, 2))).expect("valid qubit labels")
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.subsystems.iter().map(|(l, _)| l.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|&(_, d)| d).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|&(_, d)| d).product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.subsystems.iter().any(|(l, _)| l == label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.subsystems[self.index_of(label)?].1)
    }

    /// Positions of `labels`, sorted into layout order, with duplicates rejected.
    pub(crate) fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut idx = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self.index_of(l.as_ref())?;
            if idx.contains(&i) {
                return Err(Error::invalid(format!("label `{}` listed twice", l.as_ref())));
            }
            idx.push(i);
        }
        idx.sort_unstable();
        Ok(idx)
    }

    pub(crate) fn select(&self, positions: &[usize]) -> Self {
        Self {
            subsystems: positions.iter().map(|&i| self.subsystems[i].clone()).collect(),
        }
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.len()];
        for k in (0..self.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.subsystems[k + 1].1;
        }
        strides
    }

    /// Full-space index offsets of every basis state of the subsystems at
    /// `positions`, enumerated row-major in the order given.
    pub(crate) fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &p in positions {
            let (d, stride) = (self.subsystems[p].1, strides[p]);
            out = out
                .iter()
                .flat_map(|&base| (0..d).map(move |k| base + k * stride))
                .collect();
        }
        out
    }

    pub(crate) fn complement(&self, positions: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|i| !positions.contains(i)).collect()
    }
}

impl fmt::Display for SubsystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.subsystems.iter().map(|(l, d)| format!("{l}:{d}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for SubsystemLayout {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.subsystems.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubsystemLayout {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(String, usize)> = Vec::deserialize(d)?;
        SubsystemLayout::new(raw).map_err(serde::de::Error::custom)
    }
}

/// A normalized state vector over a layout.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    layout: SubsystemLayout,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(layout: SubsystemLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::dim(format!(
                "{} amplitudes for layout {layout} of dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > tol::NORM {
            return Err(Error::invalid(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(layout: SubsystemLayout, index: usize) -> Result<Self> {
        let n = layout.total_dim();
        if index >= n {
            return Err(Error::dim(format!("basis index {index} out of range {n}")));
        }
        let mut amps = vec![ZERO; n];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(layout, amps)
    }

    pub(crate) fn from_parts(layout: SubsystemLayout, amplitudes: Vec<Complex64>) -> Self {
        Self { layout, amplitudes }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    /// |ψ⟩⟨ψ|
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_parts(
            self.layout.clone(),
            ComplexMatrix::projector(&self.amplitudes),
        )
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix over a layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    layout: SubsystemLayout,
    mat: ComplexMatrix,
}

// Sanitizing never hides eigenvalues more negative than this.
const SANITIZE_FLOOR: f64 = -1e-6;

impl DensityMatrix {
    pub fn new(layout: SubsystemLayout, mat: ComplexMatrix) -> Result<Self> {
        check_shape(&layout, &mat)?;
        let herr = mat.hermiticity_error();
        if herr > tol::HERM {
            return Err(Error::invalid(format!(
                "density matrix is not Hermitian (max deviation {herr:.3e})"
            )));
        }
        let tr = mat.trace()?;
        if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
            return Err(Error::invalid(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = hermitian_eigen(&mat)?.min_value();
        if min < tol::PSD {
            return Err(Error::invalid(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { layout, mat })
    }

    /// Builds a state from a nearly valid matrix, explicitly repairing rounding
    /// damage: the matrix is Hermitized, eigenvalues in `[-1e-6, 0)` are clamped
    /// to zero and the trace is renormalized.
    pub fn sanitize(layout: SubsystemLayout, mat: ComplexMatrix) -> Result<Self> {
        check_shape(&layout, &mat)?;
        let h = mat.hermitian_part();
        let eig = hermitian_eigen(&h)?;
        if eig.min_value() < SANITIZE_FLOOR {
            return Err(Error::invalid(format!(
                "eigenvalue {:.3e} is too negative to sanitize",
                eig.min_value()
            )));
        }
        let clamped: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("matrix has no positive spectrum"));
        }
        let n = clamped.len();
        let v = &eig.vectors;
        let repaired = ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * (clamped[k] / total) * v[(j, k)].conj())
                .sum()
        });
        Self::new(layout, repaired.hermitian_part())
    }

    /// Single-subsystem convenience constructor.
    pub fn single(label: &str, mat: ComplexMatrix) -> Result<Self> {
        let layout = SubsystemLayout::new([(label, mat.rows())])?;
        Self::new(layout, mat)
    }

    pub(crate) fn from_parts(layout: SubsystemLayout, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(layout.total_dim(), mat.rows());
        Self { layout, mat }
    }

    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let n = layout.total_dim();
        Self::from_parts(layout, ComplexMatrix::identity(n).scale_real(1.0 / n as f64))
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).expect("square").re
    }

    /// Same state under a new layout with identical dimensions.
    pub fn relabel(&self, layout: SubsystemLayout) -> Result<Self> {
        if layout.dims() != self.layout.dims() {
            return Err(Error::dim(format!(
                "cannot relabel {} as {layout}",
                self.layout
            )));
        }
        Ok(Self::from_parts(layout, self.mat.clone()))
    }

    /// `self ⊗ other`, layouts concatenated.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let layout = SubsystemLayout::new(
            self.layout
                .subsystems
                .iter()
                .chain(&other.layout.subsystems)
                .cloned(),
        )?;
        Ok(Self::from_parts(layout, self.mat.kron(&other.mat)))
    }

    /// Reduced state on `keep`; subsystem order follows the original layout.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::invalid("partial trace must keep at least one subsystem"));
        }
        let kept = self.layout.positions(keep)?;
        let traced = self.layout.complement(&kept);
        let kept_off = self.layout.offsets(&kept);
        let traced_off = self.layout.offsets(&traced);
        let n = kept_off.len();
        let out = ComplexMatrix::from_fn(n, n, |i, j| {
            traced_off
                .iter()
                .map(|&t| self.mat[(kept_off[i] + t, kept_off[j] + t)])
                .sum()
        });
        Ok(Self::from_parts(self.layout.select(&kept), out))
    }

    /// Partial transpose on the listed subsystems.
    pub fn partial_transpose<S: AsRef<str>>(&self, part: &[S]) -> Result<ComplexMatrix> {
        partial_transpose_matrix(&self.mat, &self.layout, part)
    }

    /// Reorders subsystems to `new_order`, which must be a permutation of the labels.
    pub fn permute_subsystems<S: AsRef<str>>(&self, new_order: &[S]) -> Result<DensityMatrix> {
        if new_order.len() != self.layout.len() {
            return Err(Error::invalid(format!(
                "{} labels given for a layout of {} subsystems",
                new_order.len(),
                self.layout.len()
            )));
        }
        let mut order = Vec::with_capacity(new_order.len());
        for l in new_order {
            let i = self.layout.index_of(l.as_ref())?;
            if order.contains(&i) {
                return Err(Error::invalid(format!("label `{}` listed twice", l.as_ref())));
            }
            order.push(i);
        }
        let old = self.layout.offsets(&order);
        let n = old.len();
        let out = ComplexMatrix::from_fn(n, n, |i, j| self.mat[(old[i], old[j])]);
        Ok(Self::from_parts(self.layout.select(&order), out))
    }
}

fn check_shape(layout: &SubsystemLayout, mat: &ComplexMatrix) -> Result<()> {
    let n = layout.total_dim();
    if mat.rows() != n || mat.cols() != n {
        return Err(Error::dim(format!(
            "{}x{} matrix for layout {layout} of dimension {n}",
            mat.rows(),
            mat.cols()
        )));
    }
    Ok(())
}

/// Partial transpose of an arbitrary operator laid out over `layout`.
pub fn partial_transpose_matrix<S: AsRef<str>>(
    mat: &ComplexMatrix,
    layout: &SubsystemLayout,
    part: &[S],
) -> Result<ComplexMatrix> {
    check_shape(layout, mat)?;
    let part = layout.positions(part)?;
    let rest = layout.complement(&part);
    let p_off = layout.offsets(&part);
    let q_off = layout.offsets(&rest);
    let mut out = ComplexMatrix::zeros(mat.rows(), mat.cols());
    for &rp in &p_off {
        for &rq in &q_off {
            for &cp in &p_off {
                for &cq in &q_off {
                    out[(cp + rq, rp + cq)] = mat[(rp + rq, cp + cq)];
                }
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct RawDensity {
    layout: SubsystemLayout,
    mat: ComplexMatrix,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawDensity {
            layout: self.layout.clone(),
            mat: self.mat.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDensity::deserialize(d)?;
        DensityMatrix::new(raw.layout, raw.mat).map_err(serde::de::Error::custom)
    }
}

/// Two-block partition of subsystem labels, written `"aA|t"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    left: Vec<String>,
    right: Vec<String>,
}

impl Bipartition {
    pub fn new<S: AsRef<str>>(left: &[S], right: &[S], layout: &SubsystemLayout) -> Result<Self> {
        let lpos = layout.positions(left)?;
        let rpos = layout.positions(right)?;
        if lpos.is_empty() || rpos.is_empty() {
            return Err(Error::invalid("both sides of a bipartition must be nonempty"));
        }
        if let Some(&shared) = lpos.iter().find(|p| rpos.contains(p)) {
            let label = layout.select(&[shared]).labels().next().unwrap_or("").to_string();
            return Err(Error::invalid(format!(
                "label `{label}` appears on both sides of the bipartition"
            )));
        }
        let names = |pos: &[usize]| layout.select(pos).labels().map(String::from).collect();
        Ok(Self {
            left: names(&lpos),
            right: names(&rpos),
        })
    }

    /// Parses `"aA|t"` against `layout`. Labels inside a side are matched
    /// greedily, longest label first.
    pub fn parse(s: &str, layout: &SubsystemLayout) -> Result<Self> {
        let sides: Vec<&str> = s.split('|').collect();
        if sides.len() != 2 {
            return Err(Error::invalid(format!(
                "bipartition `{s}` must have exactly one `|`"
            )));
        }
        let mut labels: Vec<&str> = layout.labels().collect();
        labels.sort_by_key(|l| std::cmp::Reverse(l.len()));
        let tokenize = |side: &str| -> Result<Vec<String>> {
            let mut rest = side.trim();
            let mut out = Vec::new();
            while !rest.is_empty() {
                match labels.iter().find(|l| rest.starts_with(**l)) {
                    Some(l) => {
                        out.push(l.to_string());
                        rest = &rest[l.len()..];
                    }
                    None => {
                        let bad: String = rest.chars().take(1).collect();
                        return Err(Error::UnknownLabel(bad));
                    }
                }
            }
            Ok(out)
        };
        let left = tokenize(sides[0])?;
        let right = tokenize(sides[1])?;
        Self::new(&left, &right, layout)
    }

    pub fn left(&self) -> &[String] {
        &self.left
    }

    pub fn right(&self) -> &[String] {
        &self.right
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.left.iter().chain(&self.right).map(String::as_str)
    }

    pub fn swapped(&self) -> Self {
        Self {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// True when the two sides together contain every label of `layout`.
    pub fn covers(&self, layout: &SubsystemLayout) -> bool {
        self.left.len() + self.right.len() == layout.len()
            && self.labels().all(|l| layout.contains(l))
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.left.concat(), self.right.concat())
    }
}
