//! The protocol's named states and the security quantities derived from them.
//!
//! Conventions: [`PrivateBlocks`] hold the blocks that actually appear in the
//! state matrix, so at `p = ½` they are `(τ+υ)/4` and `(τ−υ)/4`, and
//! [`key_security`] is the standard trace norm of the off-diagonal block. It
//! equals the negativity across `a|tA` and is at most ½.

use crate::channel::KrausChannel;
use crate::circuit::{check_probability, memory_pair, psi_state, ud_projectors};
use crate::error::{Error, Result};
use crate::linalg::{schatten1, ComplexMatrix};
use crate::metrics::{negativity, povm_classical_distance, Povm};
use crate::state::{Bipartition, DensityMatrix, SubsystemLayout};
use crate::tol;

/// `p|Ψ₊⟩⟨Ψ₊| ⊗ |0⟩⟨0| + (1−p)|Ψ₋⟩⟨Ψ₋| ⊗ |1⟩⟨1|` on `[a, t, m]`.
pub fn alice_lab_state(p: f64) -> Result<DensityMatrix> {
    check_probability("p", p)?;
    let plus = ComplexMatrix::projector(&psi_state(1.0));
    let minus = ComplexMatrix::projector(&psi_state(-1.0));
    let mat = plus
        .kron(&ComplexMatrix::diag(&[1.0, 0.0]))
        .scale_real(p)
        .add(&minus.kron(&ComplexMatrix::diag(&[0.0, 1.0])).scale_real(1.0 - p))?;
    Ok(DensityMatrix::from_parts(
        SubsystemLayout::qubits(&["a", "t", "m"]),
        mat,
    ))
}

/// Alice's memory dimension, record overlap and the decoherence acting on her.
#[derive(Clone, Debug, PartialEq)]
pub struct AliceModel {
    d_a: usize,
    epsilon: f64,
    channel: KrausChannel,
}

impl AliceModel {
    pub fn new(d_a: usize, epsilon: f64, channel: KrausChannel) -> Result<Self> {
        check_probability("epsilon", epsilon)?;
        if d_a < 2 {
            return Err(Error::invalid(format!("Alice dimension {d_a} < 2")));
        }
        if channel.dim() != d_a {
            return Err(Error::dim(format!(
                "{}-dimensional channel for Alice of dimension {d_a}",
                channel.dim()
            )));
        }
        Ok(Self { d_a, epsilon, channel })
    }

    pub fn dim(&self) -> usize {
        self.d_a
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }
}

/// Decohered memory states `τ = 𝒩(|ξ⟩⟨ξ|)`, `υ = 𝒩(|ζ⟩⟨ζ|)` on `[A]`.
pub fn alice_state_pair(model: &AliceModel) -> Result<(DensityMatrix, DensityMatrix)> {
    let (xi, zeta) = memory_pair(model.epsilon, model.d_a)?;
    Ok((
        model.channel.apply(&xi.to_density(), "A")?,
        model.channel.apply(&zeta.to_density(), "A")?,
    ))
}

/// `p|Ψ₊⟩⟨Ψ₊| ⊗ τ + (1−p)|Ψ₋⟩⟨Ψ₋| ⊗ υ` on `[a, t, A]`.
pub fn wigner_state(p: f64, tau: &DensityMatrix, upsilon: &DensityMatrix) -> Result<DensityMatrix> {
    check_probability("p", p)?;
    if tau.dim() != upsilon.dim() {
        return Err(Error::dim(format!(
            "memory states of dimension {} and {}",
            tau.dim(),
            upsilon.dim()
        )));
    }
    let plus = ComplexMatrix::projector(&psi_state(1.0));
    let minus = ComplexMatrix::projector(&psi_state(-1.0));
    let mat = plus
        .kron(tau.matrix())
        .scale_real(p)
        .add(&minus.kron(upsilon.matrix()).scale_real(1.0 - p))?;
    let layout = SubsystemLayout::new([("a", 2), ("t", 2), ("A", tau.dim())])?;
    Ok(DensityMatrix::from_parts(layout, mat))
}

/// Key/shield block form of a state on `[a, t, A]` whose only nonzero qubit
/// blocks are `(00,00) = (11,11)` and `(00,11) = (11,00)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrivateBlocks {
    pub xi_block: ComplexMatrix,
    pub zeta_block: ComplexMatrix,
}

impl PrivateBlocks {
    pub fn shield_dim(&self) -> usize {
        self.xi_block.rows()
    }

    /// The full `4d × 4d` matrix these blocks describe.
    pub fn reassemble(&self) -> ComplexMatrix {
        let d = self.shield_dim();
        ComplexMatrix::from_fn(4 * d, 4 * d, |i, j| {
            let (bi, bj) = (i / d, j / d);
            let (r, c) = (i % d, j % d);
            match (bi, bj) {
                (0, 0) | (3, 3) => self.xi_block[(r, c)],
                (0, 3) | (3, 0) => self.zeta_block[(r, c)],
                _ => crate::linalg::ZERO,
            }
        })
    }
}

const BLOCK_NAMES: [&str; 4] = ["00", "01", "10", "11"];
const BLOCK_TOL: f64 = 1e-10;

pub fn private_blocks(rho: &DensityMatrix) -> Result<PrivateBlocks> {
    let dims = rho.layout().dims();
    if dims.len() != 3 || dims[0] != 2 || dims[1] != 2 {
        return Err(Error::dim(format!(
            "private-state form needs a layout [a:2, t:2, A:d], got {}",
            rho.layout()
        )));
    }
    let d = dims[2];
    let m = rho.matrix();
    let block = |k: usize, l: usize| ComplexMatrix::from_fn(d, d, |i, j| m[(k * d + i, l * d + j)]);
    for (k, row) in BLOCK_NAMES.iter().enumerate() {
        for (l, col) in BLOCK_NAMES.iter().enumerate() {
            if (k == 1 || k == 2 || l == 1 || l == 2) && block(k, l).max_abs() > BLOCK_TOL {
                return Err(Error::invalid(format!("qubit block ({row},{col}) is nonzero")));
            }
        }
    }
    let xi_block = block(0, 0);
    let zeta_block = block(0, 3);
    if block(3, 3).max_abs_diff(&xi_block)? > BLOCK_TOL {
        return Err(Error::invalid("qubit blocks (00,00) and (11,11) differ"));
    }
    if block(3, 0).max_abs_diff(&zeta_block)? > BLOCK_TOL {
        return Err(Error::invalid("qubit blocks (00,11) and (11,00) differ"));
    }
    Ok(PrivateBlocks { xi_block, zeta_block })
}

/// `‖ζ‖₁` for a private state at `p = ½`, cross-checked against the
/// negativity across `a|tA`.
pub fn key_security(rho: &DensityMatrix) -> Result<f64> {
    let blocks = private_blocks(rho)?;
    // Tr ζ = p − ½ for the mixture form
    let skew = blocks.zeta_block.trace()?.re;
    if skew.abs() > tol::EQ {
        return Err(Error::invalid(format!(
            "key security is defined only for the equal mixture (p = {})",
            0.5 + skew
        )));
    }
    let value = schatten1(&blocks.zeta_block)?;
    let bip = Bipartition::parse("a|tA", rho.layout()).or_else(|_| {
        let labels: Vec<&str> = rho.layout().labels().collect();
        Bipartition::new(&[labels[0]], &[labels[1], labels[2]], rho.layout())
    })?;
    let en = negativity(rho, &bip)?;
    if (en - value).abs() > tol::EQ {
        return Err(Error::Numerical(format!(
            "off-diagonal trace norm {value} disagrees with negativity {en}"
        )));
    }
    Ok(value)
}

/// `{Π_up, Π_down}` on Alice's memory.
pub fn ud_povm(d_a: usize) -> Result<Povm> {
    let (up, down) = ud_projectors(d_a)?;
    Povm::new(vec![up, down])
}

/// Key security a semi-classical analyst would assign after replacing Alice
/// by the outcome statistics of `povm`: half the classical distance
/// `½Σ|p_m − q_m|`, matching [`key_security`]'s `¼‖τ−υ‖₁` at the optimum.
pub fn semiclassical_bound(tau: &DensityMatrix, upsilon: &DensityMatrix, povm: &Povm) -> Result<f64> {
    Ok(0.5 * povm_classical_distance(tau, upsilon, povm)?)
}

/// `½‖pτ − (1−p)υ‖₁`, the negativity of the Wigner state across `a|tA`.
pub fn assisted_negativity_closed_form(p: f64, tau: &DensityMatrix, upsilon: &DensityMatrix) -> Result<f64> {
    check_probability("p", p)?;
    let diff = tau.matrix().scale_real(p).sub(&upsilon.matrix().scale_real(1.0 - p))?;
    Ok(0.5 * schatten1(&diff)?)
}

/// Negativity across `a|t` once Alice is traced out of the Wigner state built
/// from `tau`, `upsilon`; checked against `|½ − p|`.
pub fn traced_negativity_with(p: f64, tau: &DensityMatrix, upsilon: &DensityMatrix) -> Result<f64> {
    let rho = wigner_state(p, tau, upsilon)?.partial_trace(&["a", "t"])?;
    let bip = Bipartition::parse("a|t", rho.layout())?;
    let value = negativity(&rho, &bip)?;
    let expect = (0.5 - p).abs();
    if (value - expect).abs() > 1e-10 {
        return Err(Error::Numerical(format!(
            "traced negativity {value} differs from |1/2 - p| = {expect}"
        )));
    }
    Ok(value)
}

/// [`traced_negativity_with`] for orthogonal qubit memories; the value does
/// not depend on Alice's states.
pub fn traced_negativity(p: f64) -> Result<f64> {
    let (xi, zeta) = memory_pair(0.0, 2)?;
    traced_negativity_with(p, &xi.to_density(), &zeta.to_density())
}
