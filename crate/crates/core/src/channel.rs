//! CPTP maps in Kraus form.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuit::embed_operator;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::DensityMatrix;
use crate::tol;

/// Trace-preserving completely positive map `ρ ↦ Σ K ρ K†` on a `dim`-level system.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    Identity,
    Dephasing,
    Depolarizing,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::invalid("channel needs at least one Kraus operator"))?;
        let dim = first.cols();
        if let Some(k) = kraus.iter().find(|k| k.rows() != dim || k.cols() != dim) {
            return Err(Error::dim(format!(
                "Kraus operator of shape {}x{} in a {dim}-dimensional channel",
                k.rows(),
                k.cols()
            )));
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for k in &kraus {
            sum = sum.add(&k.adjoint().matmul(k)?)?;
        }
        let err = sum.max_abs_diff(&ComplexMatrix::identity(dim))?;
        if err > tol::COMPLETENESS {
            return Err(Error::invalid(format!(
                "Kraus operators are not trace preserving (|ΣK†K − I| = {err:.3e})"
            )));
        }
        Ok(Self { dim, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Applies the channel to a bare operator on the channel's own space.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = out.add(&k.matmul(rho)?.matmul(&k.adjoint())?)?;
        }
        Ok(out)
    }

    /// Applies the channel to `wire` of `rho`; the output is validated.
    pub fn apply(&self, rho: &DensityMatrix, wire: &str) -> Result<DensityMatrix> {
        let d = rho.layout().dim_of(wire)?;
        if d != self.dim {
            return Err(Error::dim(format!(
                "{}-dimensional channel on wire `{wire}` of dimension {d}",
                self.dim
            )));
        }
        let n = rho.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            let full = embed_operator(rho.layout(), k, &[wire])?;
            out = out.add(&full.matmul(rho.matrix())?.matmul(&full.adjoint())?)?;
        }
        DensityMatrix::new(rho.layout().clone(), out.hermitian_part()).map_err(|e| match e {
            Error::Invalid(msg) => Error::Numerical(format!("channel output invalid: {msg}")),
            other => other,
        })
    }

    /// `other ∘ self`
    pub fn then(&self, other: &KrausChannel) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::dim("composing channels of different dimension"));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for b in &other.kraus {
            for a in &self.kraus {
                kraus.push(b.matmul(a)?);
            }
        }
        Ok(Self { dim: self.dim, kraus })
    }
}

/// Free function form of [`KrausChannel::apply`].
pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel, wire: &str) -> Result<DensityMatrix> {
    ch.apply(rho, wire)
}

fn check_strength(dim: usize, strength: f64) -> Result<()> {
    if dim < 2 {
        return Err(Error::invalid(format!("channel dimension {dim} < 2")));
    }
    if !(0.0..=1.0).contains(&strength) {
        return Err(Error::invalid(format!(
            "channel strength {strength} is outside [0, 1]"
        )));
    }
    Ok(())
}

/// Standard channels.
///
/// Dephasing scales the off-diagonal elements in `basis` (columns; the
/// computational basis when `None`) by `1 − strength`. Depolarizing maps
/// `ρ ↦ (1 − s)ρ + s·I/dim`.
pub fn make_channel(
    kind: ChannelKind,
    dim: usize,
    strength: f64,
    basis: Option<&ComplexMatrix>,
) -> Result<KrausChannel> {
    check_strength(dim, strength)?;
    match kind {
        ChannelKind::Identity => Ok(KrausChannel::identity(dim)),
        ChannelKind::Dephasing => {
            let basis = match basis {
                Some(b) => {
                    if b.rows() != dim || b.cols() != dim {
                        return Err(Error::dim("dephasing basis has the wrong dimension"));
                    }
                    let gram = b.adjoint().matmul(b)?;
                    if gram.max_abs_diff(&ComplexMatrix::identity(dim))? > tol::UNITARY {
                        return Err(Error::invalid("dephasing basis is not orthonormal"));
                    }
                    b.clone()
                }
                None => ComplexMatrix::identity(dim),
            };
            let projectors: Vec<ComplexMatrix> = (0..dim)
                .map(|k| ComplexMatrix::projector(&basis.column(k)))
                .collect();
            block_dephasing(&projectors, strength)
        }
        ChannelKind::Depolarizing => {
            // Kraus: √(1 − s + s/d²)·I and √(s)/d · X^a Z^b (generalized Paulis, (a,b) ≠ 0)
            let d = dim as f64;
            let mut kraus = vec![ComplexMatrix::identity(dim).scale_real((1.0 - strength + strength / (d * d)).sqrt())];
            if strength > 0.0 {
                let w = strength.sqrt() / d;
                for a in 0..dim {
                    for b in 0..dim {
                        if a == 0 && b == 0 {
                            continue;
                        }
                        kraus.push(weyl(dim, a, b).scale_real(w));
                    }
                }
            }
            KrausChannel::new(kraus)
        }
    }
}

/// X^a Z^b on a `dim`-level system.
fn weyl(dim: usize, a: usize, b: usize) -> ComplexMatrix {
    let omega = 2.0 * std::f64::consts::PI / dim as f64;
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == (j + a) % dim {
            num_complex::Complex64::from_polar(1.0, omega * (b * j) as f64)
        } else {
            crate::linalg::ZERO
        }
    })
}

/// Dephasing between the ranges of orthogonal projectors that resolve the
/// identity: coherences between different blocks are scaled by `1 − strength`.
pub fn block_dephasing(projectors: &[ComplexMatrix], strength: f64) -> Result<KrausChannel> {
    let dim = projectors
        .first()
        .ok_or_else(|| Error::invalid("no dephasing projectors"))?
        .rows();
    check_strength(dim, strength)?;
    let mut kraus = vec![ComplexMatrix::identity(dim).scale_real((1.0 - strength).sqrt())];
    if strength > 0.0 {
        kraus.extend(projectors.iter().map(|p| p.scale_real(strength.sqrt())));
    }
    KrausChannel::new(kraus)
}

#[derive(Serialize, Deserialize)]
struct RawChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Serialize for KrausChannel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawChannel {
            dim: self.dim,
            kraus: self.kraus.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KrausChannel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawChannel::deserialize(d)?;
        let ch = KrausChannel::new(raw.kraus).map_err(serde::de::Error::custom)?;
        if ch.dim != raw.dim {
            return Err(serde::de::Error::custom(format!(
                "declared dim {} but Kraus operators are {}-dimensional",
                raw.dim, ch.dim
            )));
        }
        Ok(ch)
    }
}
