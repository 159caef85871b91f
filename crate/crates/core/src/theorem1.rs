//! Entanglement bounds for shielded ensembles `ρ_XYZ = Σ pᵢ σ_XY;i ⊗ σ_Z;i`.
//!
//! With negativity as the measure, the assisted value across `XZ|Y` (or
//! `X|YZ`) is bounded above by the average pair negativity and below by the
//! best post-selected pair, `max pᵢ qᵢ E(σ_XY;i)`, where `qᵢ` is the rate at
//! which shield `i` can be identified without error. `qᵢ` is only known in
//! closed form for disjoint supports (`qᵢ = 1`) and for two equally likely
//! pure shields (`qᵢ = 1 − |⟨ψ₁|ψ₂⟩|`); otherwise it is taken as 0.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::metrics::{negativity, supports_disjoint};
use crate::random::{random_density, random_pure_state};
use crate::state::{Bipartition, DensityMatrix, SubsystemLayout};
use crate::tol;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub weight: f64,
    pub pair: DensityMatrix,
    pub shield: DensityMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Instance {
    members: Vec<EnsembleMember>,
    joint: DensityMatrix,
}

const WEIGHT_TOL: f64 = 1e-10;
const PURITY_TOL: f64 = 1e-9;

impl Theorem1Instance {
    pub fn new(members: Vec<EnsembleMember>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::invalid("ensemble has no members"))?;
        let pair_layout = first.pair.layout().clone();
        let shield_layout = first.shield.layout().clone();
        if let Some(l) = shield_layout.labels().find(|l| pair_layout.contains(l)) {
            return Err(Error::invalid(format!(
                "label `{l}` used by both pair and shield"
            )));
        }
        let mut total = 0.0;
        for (i, m) in members.iter().enumerate() {
            if m.weight.is_nan() || m.weight <= 0.0 {
                return Err(Error::invalid(format!("member {i} has weight {}", m.weight)));
            }
            if m.pair.layout() != &pair_layout || m.shield.layout() != &shield_layout {
                return Err(Error::dim(format!("member {i} has a different layout")));
            }
            total += m.weight;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::invalid(format!("weights sum to {total}")));
        }
        let mut joint: Option<ComplexMatrix> = None;
        for m in &members {
            let term = m.pair.matrix().kron(m.shield.matrix()).scale_real(m.weight);
            joint = Some(match joint {
                Some(acc) => acc.add(&term)?,
                None => term,
            });
        }
        let layout = SubsystemLayout::new(
            pair_layout
                .labels()
                .zip(pair_layout.dims())
                .chain(shield_layout.labels().zip(shield_layout.dims())),
        )?;
        let joint = DensityMatrix::from_parts(layout, joint.expect("nonempty"));
        Ok(Self { members, joint })
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn joint_state(&self) -> &DensityMatrix {
        &self.joint
    }

    pub fn pair_layout(&self) -> &SubsystemLayout {
        self.members[0].pair.layout()
    }

    pub fn shield_layout(&self) -> &SubsystemLayout {
        self.members[0].shield.layout()
    }

    pub fn shields_disjoint(&self) -> Result<bool> {
        if self.members.len() < 2 {
            return Ok(true);
        }
        let shields: Vec<DensityMatrix> = self.members.iter().map(|m| m.shield.clone()).collect();
        supports_disjoint(&shields)
    }

    /// Per-member rate `qᵢ` of identifying the shield without error.
    pub fn distinguish_rates(&self) -> Result<Vec<f64>> {
        let n = self.members.len();
        if self.shields_disjoint()? {
            return Ok(vec![1.0; n]);
        }
        if n == 2 {
            let (a, b) = (&self.members[0], &self.members[1]);
            let pure = |s: &DensityMatrix| s.purity() >= 1.0 - PURITY_TOL;
            if (a.weight - b.weight).abs() <= WEIGHT_TOL && pure(&a.shield) && pure(&b.shield) {
                let overlap = a
                    .shield
                    .matrix()
                    .trace_product(b.shield.matrix())?
                    .re
                    .clamp(0.0, 1.0)
                    .sqrt();
                return Ok(vec![1.0 - overlap; 2]);
            }
        }
        Ok(vec![0.0; n])
    }
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    members: Vec<EnsembleMember>,
}

impl Serialize for Theorem1Instance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawInstance {
            members: self.members.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Theorem1Instance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawInstance::deserialize(d)?;
        Theorem1Instance::new(raw.members).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Bounds {
    pub lower: f64,
    /// Negativity across the assisted partition as given (shield with one side).
    pub value_xz_y: f64,
    /// Negativity with the shield moved to the other side.
    pub value_x_yz: f64,
    pub upper: f64,
    pub shields_disjoint: bool,
}

impl Theorem1Bounds {
    /// `lower ≤ value ≤ upper` for both assisted partitions.
    pub fn sandwich_holds(&self, tol: f64) -> bool {
        [self.value_xz_y, self.value_x_yz]
            .iter()
            .all(|&v| self.lower - tol <= v && v <= self.upper + tol)
    }

    pub fn partitions_agree(&self, tol: f64) -> bool {
        (self.value_xz_y - self.value_x_yz).abs() <= tol
    }

    /// With disjoint shields the upper bound must be attained.
    pub fn saturation_holds(&self, tol: f64) -> bool {
        !self.shields_disjoint
            || ((self.value_xz_y - self.upper).abs() <= tol
                && (self.value_x_yz - self.upper).abs() <= tol)
    }

    /// Every claim at once: sandwich, partition equality and saturation.
    pub fn verify(&self, tol: f64) -> Result<()> {
        if !self.sandwich_holds(tol) {
            return Err(Error::Numerical(format!(
                "sandwich violated: lower {} / values {}, {} / upper {}",
                self.lower, self.value_xz_y, self.value_x_yz, self.upper
            )));
        }
        if !self.partitions_agree(tol) {
            return Err(Error::Numerical(format!(
                "assisted partitions disagree: {} vs {}",
                self.value_xz_y, self.value_x_yz
            )));
        }
        if !self.saturation_holds(tol) {
            return Err(Error::Numerical(format!(
                "disjoint shields but value {} != upper {}",
                self.value_xz_y, self.upper
            )));
        }
        Ok(())
    }
}

/// Bounds for `inst` across `bip_assisted` (e.g. `xz|y`), whose restriction to
/// the pair must equal `bip_pair` (e.g. `x|y`) and which must keep all
/// shield labels on one side.
pub fn theorem1_bounds(
    inst: &Theorem1Instance,
    bip_assisted: &Bipartition,
    bip_pair: &Bipartition,
) -> Result<Theorem1Bounds> {
    let joint = inst.joint_state();
    let pair_layout = inst.pair_layout();
    let shield_labels: Vec<&str> = inst.shield_layout().labels().collect();
    if !bip_pair.covers(pair_layout) {
        return Err(Error::invalid(format!(
            "pair partition {bip_pair} does not cover {pair_layout}"
        )));
    }
    if !bip_assisted.covers(joint.layout()) {
        return Err(Error::invalid(format!(
            "assisted partition {bip_assisted} does not cover {}",
            joint.layout()
        )));
    }
    let strip = |side: &[String]| -> Vec<String> {
        side.iter()
            .filter(|l| !shield_labels.contains(&l.as_str()))
            .cloned()
            .collect()
    };
    if strip(bip_assisted.left()) != bip_pair.left() || strip(bip_assisted.right()) != bip_pair.right() {
        return Err(Error::invalid(format!(
            "{bip_assisted} does not extend {bip_pair}"
        )));
    }
    let shield_left = shield_labels
        .iter()
        .filter(|l| bip_assisted.left().iter().any(|x| x == *l))
        .count();
    if shield_left != 0 && shield_left != shield_labels.len() {
        return Err(Error::invalid("shield labels split across the partition"));
    }
    let moved = if shield_left == 0 {
        let left: Vec<&str> = bip_pair
            .left()
            .iter()
            .map(String::as_str)
            .chain(shield_labels.iter().copied())
            .collect();
        let right: Vec<&str> = bip_pair.right().iter().map(String::as_str).collect();
        Bipartition::new(&left, &right, joint.layout())?
    } else {
        let left: Vec<&str> = bip_pair.left().iter().map(String::as_str).collect();
        let right: Vec<&str> = bip_pair
            .right()
            .iter()
            .map(String::as_str)
            .chain(shield_labels.iter().copied())
            .collect();
        Bipartition::new(&left, &right, joint.layout())?
    };

    let value_xz_y = negativity(joint, bip_assisted)?;
    let value_x_yz = negativity(joint, &moved)?;
    let pair_neg = inst
        .members()
        .iter()
        .map(|m| negativity(&m.pair, bip_pair))
        .collect::<Result<Vec<_>>>()?;
    let upper = inst
        .members()
        .iter()
        .zip(&pair_neg)
        .map(|(m, n)| m.weight * n)
        .sum();
    let rates = inst.distinguish_rates()?;
    let lower = inst
        .members()
        .iter()
        .zip(&pair_neg)
        .zip(&rates)
        .map(|((m, n), q)| m.weight * q * n)
        .fold(0.0, f64::max);
    Ok(Theorem1Bounds {
        lower,
        value_xz_y,
        value_x_yz,
        upper,
        shields_disjoint: inst.shields_disjoint()?,
    })
}

/// How random shields are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShieldFamily {
    /// Independent mixed states.
    Mixed,
    /// Pure states; two-member ensembles get equal weights.
    Pure,
    /// Mixed states on mutually orthogonal blocks of the shield space.
    Disjoint,
}

impl std::str::FromStr for ShieldFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mixed" => Ok(Self::Mixed),
            "pure" => Ok(Self::Pure),
            "disjoint" => Ok(Self::Disjoint),
            other => Err(Error::invalid(format!(
                "unknown shield family `{other}` (expected mixed, pure or disjoint)"
            ))),
        }
    }
}

fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3)
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Random ensemble over labels `x`, `y` (pair) and `z` (shield).
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    dims: [usize; 3],
    members: usize,
    family: ShieldFamily,
) -> Result<Theorem1Instance> {
    if members == 0 {
        return Err(Error::invalid("ensemble needs at least one member"));
    }
    let [dx, dy, dz] = dims;
    if family == ShieldFamily::Disjoint && dz < members {
        return Err(Error::invalid(format!(
            "{members} disjoint shields do not fit in dimension {dz}"
        )));
    }
    let pair_layout = SubsystemLayout::new([("x", dx), ("y", dy)])?;
    let shield_layout = SubsystemLayout::new([("z", dz)])?;
    let weights = if family == ShieldFamily::Pure && members == 2 {
        vec![0.5, 0.5]
    } else {
        random_weights(rng, members)
    };
    let mut out = Vec::with_capacity(members);
    for (i, weight) in weights.into_iter().enumerate() {
        let pair = if family == ShieldFamily::Pure || rng.random_bool(0.5) {
            random_pure_state(rng, pair_layout.clone()).to_density()
        } else {
            random_density(rng, pair_layout.clone())
        };
        let shield = match family {
            ShieldFamily::Mixed => random_density(rng, shield_layout.clone()),
            ShieldFamily::Pure => random_pure_state(rng, shield_layout.clone()).to_density(),
            ShieldFamily::Disjoint => {
                let lo = i * dz / members;
                let hi = (i + 1) * dz / members;
                let block_dim = hi - lo;
                let block = if block_dim >= 2 {
                    let bl = SubsystemLayout::new([("b", block_dim)])?;
                    random_density(rng, bl).into_matrix()
                } else {
                    ComplexMatrix::identity(1)
                };
                let mat = ComplexMatrix::from_fn(dz, dz, |r, c| {
                    if (lo..hi).contains(&r) && (lo..hi).contains(&c) {
                        block[(r - lo, c - lo)]
                    } else {
                        crate::linalg::ZERO
                    }
                });
                DensityMatrix::from_parts(shield_layout.clone(), mat)
            }
        };
        out.push(EnsembleMember { weight, pair, shield });
    }
    Theorem1Instance::new(out)
}

/// The standard `xz|y` and `x|y` partitions for [`random_instance`] layouts.
pub fn standard_partitions(inst: &Theorem1Instance) -> Result<(Bipartition, Bipartition)> {
    Ok((
        Bipartition::parse("xz|y", inst.joint_state().layout())?,
        Bipartition::parse("x|y", inst.pair_layout())?,
    ))
}

/// Default slack for [`Theorem1Bounds::verify`].
pub const DEFAULT_TOL: f64 = tol::EQ;
