//! Negativity, PPT tests, the up/down entanglement witnesses and two-state
//! discrimination.
//!
//! Operator norms are the standard Schatten-1 norm. Distances between
//! classical outcome distributions use the halved convention
//! `½Σ|p_m − q_m|`, so both [`trace_distance`] and
//! [`povm_classical_distance`] live on `[0, 1]` and compare directly.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuit::phi_state;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, schatten1, ComplexMatrix};
use crate::state::{partial_transpose_matrix, Bipartition, DensityMatrix, SubsystemLayout};
use crate::tol;

fn pt_spectrum(rho: &DensityMatrix, bip: &Bipartition) -> Result<Vec<f64>> {
    if !bip.covers(rho.layout()) {
        return Err(Error::invalid(format!(
            "bipartition {bip} does not cover layout {}",
            rho.layout()
        )));
    }
    hermitian_eigenvalues(&rho.partial_transpose(bip.left())?)
}

/// `(‖ρ^{T_left}‖₁ − 1)/2`, computed as the magnitude of the negative part of
/// the partial-transpose spectrum.
pub fn negativity(rho: &DensityMatrix, bip: &Bipartition) -> Result<f64> {
    Ok(-pt_spectrum(rho, bip)?
        .into_iter()
        .filter(|&l| l < 0.0)
        .sum::<f64>())
}

/// Positive partial transpose across `bip`.
pub fn is_ppt(rho: &DensityMatrix, bip: &Bipartition) -> Result<bool> {
    let spec = pt_spectrum(rho, bip)?;
    Ok(spec.last().copied().unwrap_or(0.0) >= tol::PSD)
}

/// Hermitian operator whose negative expectation certifies entanglement
/// across each of `partitions`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    op: ComplexMatrix,
    layout: SubsystemLayout,
    partitions: Vec<Bipartition>,
}

impl Witness {
    pub fn new(op: ComplexMatrix, layout: SubsystemLayout, partitions: Vec<Bipartition>) -> Result<Self> {
        if op.rows() != layout.total_dim() || !op.is_square() {
            return Err(Error::dim("witness operator does not match its layout"));
        }
        if !op.is_hermitian(tol::HERM) {
            return Err(Error::invalid("witness operator is not Hermitian"));
        }
        Ok(Self { op, layout, partitions })
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.op
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn partitions(&self) -> &[Bipartition] {
        &self.partitions
    }
}

#[derive(Serialize)]
struct WitnessOut<'a> {
    op: &'a ComplexMatrix,
    layout: &'a SubsystemLayout,
    partitions: Vec<String>,
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WitnessOut {
            op: &self.op,
            layout: &self.layout,
            partitions: self.partitions.iter().map(|b| b.to_string()).collect(),
        }
        .serialize(s)
    }
}

fn is_projector(p: &ComplexMatrix) -> Result<bool> {
    Ok(p.is_hermitian(tol::HERM) && p.matmul(p)?.max_abs_diff(p)? <= tol::EQ)
}

/// `W₁ = |Φ₊⟩⟨Φ₊|^{T_t} ⊗ Π_up`, `W₂ = |Φ₊⟩⟨Φ₊|^{T_t} ⊗ Π_down` on `[a, t, A]`,
/// with `|Φ₊⟩ = (|01⟩ + |10⟩)/√2`. Both certify `aA|t` and `a|tA`.
pub fn build_witnesses(
    d_a: usize,
    up_projector: &ComplexMatrix,
    down_projector: &ComplexMatrix,
) -> Result<(Witness, Witness)> {
    for p in [up_projector, down_projector] {
        if p.rows() != d_a || p.cols() != d_a {
            return Err(Error::dim(format!(
                "projector of shape {}x{} for Alice dimension {d_a}",
                p.rows(),
                p.cols()
            )));
        }
        if !is_projector(p)? {
            return Err(Error::invalid("up/down operators must be orthogonal projectors"));
        }
    }
    if up_projector.matmul(down_projector)?.max_abs() > tol::EQ {
        return Err(Error::invalid("up and down projectors are not orthogonal"));
    }
    if up_projector
        .add(down_projector)?
        .max_abs_diff(&ComplexMatrix::identity(d_a))?
        > tol::EQ
    {
        return Err(Error::invalid("up and down projectors do not sum to the identity"));
    }

    let at = SubsystemLayout::qubits(&["a", "t"]);
    let bell_pt = partial_transpose_matrix(&ComplexMatrix::projector(&phi_state(1.0)), &at, &["t"])?;
    let layout = SubsystemLayout::new([("a", 2), ("t", 2), ("A", d_a)])?;
    let partitions = vec![
        Bipartition::parse("aA|t", &layout)?,
        Bipartition::parse("a|tA", &layout)?,
    ];
    Ok((
        Witness::new(bell_pt.kron(up_projector), layout.clone(), partitions.clone())?,
        Witness::new(bell_pt.kron(down_projector), layout, partitions)?,
    ))
}

/// `Tr[ρW]`
pub fn witness_expectation(rho: &DensityMatrix, w: &Witness) -> Result<f64> {
    if rho.layout().dims() != w.layout.dims() {
        return Err(Error::dim(format!(
            "state layout {} does not match witness layout {}",
            rho.layout(),
            w.layout
        )));
    }
    Ok(rho.matrix().trace_product(&w.op)?.re)
}

/// `max(0, −min(Tr[ρW₁], Tr[ρW₂]))`.
///
/// A lower-bound certificate only: a positive value proves entanglement but
/// does not measure how much there is.
pub fn witness_violation(rho: &DensityMatrix, w1: &Witness, w2: &Witness) -> Result<f64> {
    let e1 = witness_expectation(rho, w1)?;
    let e2 = witness_expectation(rho, w2)?;
    Ok((-e1.min(e2)).max(0.0))
}

/// Positive effects summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::invalid("POVM has no effects"))?;
        let d = first.rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, e) in effects.iter().enumerate() {
            if e.rows() != d || e.cols() != d {
                return Err(Error::dim(format!("POVM effect {k} has the wrong shape")));
            }
            let min = hermitian_eigen(e)
                .map_err(|err| Error::invalid(format!("POVM effect {k}: {err}")))?
                .min_value();
            if min < tol::PSD {
                return Err(Error::invalid(format!(
                    "POVM effect {k} has negative eigenvalue {min:.3e}"
                )));
            }
            sum = sum.add(e)?;
        }
        let err = sum.max_abs_diff(&ComplexMatrix::identity(d))?;
        if err > tol::COMPLETENESS {
            return Err(Error::invalid(format!(
                "POVM effects do not sum to the identity (deviation {err:.3e})"
            )));
        }
        Ok(Self { effects })
    }

    /// Rank-one projectors onto the columns of an orthonormal basis.
    pub fn from_basis(basis: &ComplexMatrix) -> Result<Self> {
        Self::new(
            (0..basis.cols())
                .map(|k| ComplexMatrix::projector(&basis.column(k)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// Outcome distribution `Tr[Π_m ρ]`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::dim(format!(
                "{}-dimensional POVM on a {}-dimensional state",
                self.dim(),
                rho.dim()
            )));
        }
        self.effects
            .iter()
            .map(|e| Ok(e.trace_product(rho.matrix())?.re))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct RawPovm {
    effects: Vec<ComplexMatrix>,
}

impl Serialize for Povm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawPovm {
            effects: self.effects.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPovm::deserialize(d)?;
        Povm::new(raw.effects).map_err(serde::de::Error::custom)
    }
}

fn same_dim(tau: &DensityMatrix, upsilon: &DensityMatrix) -> Result<()> {
    if tau.dim() != upsilon.dim() {
        return Err(Error::dim(format!(
            "states of dimension {} and {}",
            tau.dim(),
            upsilon.dim()
        )));
    }
    Ok(())
}

/// `½‖τ − υ‖₁`
pub fn trace_distance(tau: &DensityMatrix, upsilon: &DensityMatrix) -> Result<f64> {
    same_dim(tau, upsilon)?;
    Ok(0.5 * schatten1(&tau.matrix().sub(upsilon.matrix())?)?)
}

/// Optimal two-outcome measurement: projectors onto the nonnegative and
/// negative eigenspaces of `τ − υ`.
pub fn helstrom_povm(tau: &DensityMatrix, upsilon: &DensityMatrix) -> Result<Povm> {
    same_dim(tau, upsilon)?;
    let eig = hermitian_eigen(&tau.matrix().sub(upsilon.matrix())?)?;
    let plus = eig.spectral_projector(|l| l >= 0.0);
    let minus = eig.spectral_projector(|l| l < 0.0);
    Ok(Povm { effects: vec![plus, minus] })
}

/// `½Σ_m |Tr[Π_m τ] − Tr[Π_m υ]|`; never exceeds [`trace_distance`].
pub fn povm_classical_distance(tau: &DensityMatrix, upsilon: &DensityMatrix, povm: &Povm) -> Result<f64> {
    same_dim(tau, upsilon)?;
    let p = povm.probabilities(tau)?;
    let q = povm.probabilities(upsilon)?;
    Ok(0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Projector onto the eigenvectors of `rho` with eigenvalue above the support cutoff.
pub fn support_projector(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eigen(rho.matrix())?.spectral_projector(|l| l > tol::SUPPORT))
}

/// True iff every pair of states has orthogonal supports.
pub fn supports_disjoint(states: &[DensityMatrix]) -> Result<bool> {
    if states.len() < 2 {
        return Err(Error::invalid("need at least two states"));
    }
    let d = states[0].dim();
    if states.iter().any(|s| s.dim() != d) {
        return Err(Error::dim("states have different dimensions"));
    }
    let supports = states
        .iter()
        .map(support_projector)
        .collect::<Result<Vec<_>>>()?;
    for i in 0..supports.len() {
        for j in i + 1..supports.len() {
            if supports[i].trace_product(&supports[j])?.re > tol::SUPPORT {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
