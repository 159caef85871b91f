//! Seeded random states, unitaries, channels and measurements.
//!
//! All sampling goes through [`SeededRng`], a ChaCha20 stream seeded from a
//! single 64-bit integer, so every sweep is reproducible from its seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{inner, vec_norm, ComplexMatrix};
use crate::metrics::Povm;
use crate::state::{DensityMatrix, PureState, SubsystemLayout};

pub type SeededRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..d).map(|_| gaussian(rng)).collect();
        let n = vec_norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, layout: SubsystemLayout) -> PureState {
    let v = random_unit_vector(rng, layout.total_dim());
    PureState::from_parts(layout, v)
}

/// Reduced state of a Haar-random pure state on `layout ⊗ layout`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, layout: SubsystemLayout) -> DensityMatrix {
    let d = layout.total_dim();
    let doubled = SubsystemLayout::new([("s", d), ("env", d)]).expect("valid layout");
    let psi = random_pure_state(rng, doubled).to_density();
    let reduced = psi.partial_trace(&["s"]).expect("label exists");
    DensityMatrix::from_parts(layout, reduced.matrix().hermitian_part())
}

/// `d_out × d_in` matrix with orthonormal columns (Gram–Schmidt on Gaussians).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize) -> Result<ComplexMatrix> {
    if d_in == 0 || d_out < d_in {
        return Err(Error::invalid(format!(
            "no isometry from dimension {d_in} into {d_out}"
        )));
    }
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d_in);
    while cols.len() < d_in {
        let mut v: Vec<Complex64> = (0..d_out).map(|_| gaussian(rng)).collect();
        // two passes keep the basis orthonormal to rounding
        for _ in 0..2 {
            for c in &cols {
                let overlap = inner(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= overlap * y;
                }
            }
        }
        let n = vec_norm(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    ComplexMatrix::from_columns(&cols)
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    random_isometry(rng, d, d).expect("square isometry")
}

/// Channel obtained by compressing a random isometry `C^d → C^d ⊗ C^n_kraus`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, n_kraus: usize) -> Result<KrausChannel> {
    if n_kraus == 0 {
        return Err(Error::invalid("channel needs at least one Kraus operator"));
    }
    let v = random_isometry(rng, d, d * n_kraus)?;
    let kraus = (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(d, d, |i, j| v[(k * d + i, j)]))
        .collect();
    KrausChannel::new(kraus)
}

/// POVM `{K_m† K_m}` from the Kraus operators of a random channel.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, d: usize, n_effects: usize) -> Result<Povm> {
    let ch = random_channel(rng, d, n_effects)?;
    let effects = ch
        .kraus()
        .iter()
        .map(|k| Ok(k.adjoint().matmul(k)?.hermitian_part()))
        .collect::<Result<Vec<_>>>()?;
    Povm::new(effects)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = random_unit_vector(&mut seeded(7), 5);
        let b = random_unit_vector(&mut seeded(7), 5);
        assert_eq!(a, b);
        assert_ne!(a, random_unit_vector(&mut seeded(8), 5));
    }

    #[test]
    fn random_objects_are_valid() {
        let mut rng = seeded(1);
        for d in 2..6 {
            let layout = SubsystemLayout::new([("A", d)]).unwrap();
            let rho = random_density(&mut rng, layout.clone());
            DensityMatrix::new(layout, rho.matrix().clone()).unwrap();
            let u = random_unitary(&mut rng, d);
            let err = u.adjoint().matmul(&u).unwrap().max_abs_diff(&ComplexMatrix::identity(d)).unwrap();
            assert!(err < 1e-12);
            random_channel(&mut rng, d, 3).unwrap();
            random_povm(&mut rng, d, 4).unwrap();
        }
        assert!(random_isometry(&mut rng, 3, 2).is_err());
    }
}
