//! Gates, the GHZ preparation circuit, destructive projective measurement and
//! Alice's memory states.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};
use crate::state::{DensityMatrix, PureState, SubsystemLayout};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Hadamard,
    PauliX,
    Cnot,
    Custom,
}

/// A unitary acting on one or two wires.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    mat: ComplexMatrix,
    arity: usize,
}

impl Gate {
    pub fn hadamard() -> Self {
        let h = FRAC_1_SQRT_2;
        Self {
            kind: GateKind::Hadamard,
            mat: ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).expect("2x2"),
            arity: 1,
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            kind: GateKind::PauliX,
            mat: ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2"),
            arity: 1,
        }
    }

    /// Control is the first wire.
    pub fn cnot() -> Self {
        #[rustfmt::skip]
        let m = [
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 1.0, 0.0,
        ];
        Self {
            kind: GateKind::Cnot,
            mat: ComplexMatrix::from_real(4, 4, &m).expect("4x4"),
            arity: 2,
        }
    }

    pub fn custom(mat: ComplexMatrix, arity: usize) -> Result<Self> {
        if !(1..=2).contains(&arity) {
            return Err(Error::invalid(format!("gate arity {arity} is not 1 or 2")));
        }
        if !mat.is_square() {
            return Err(Error::dim("gate matrix is not square"));
        }
        let err = mat
            .adjoint()
            .matmul(&mat)?
            .max_abs_diff(&ComplexMatrix::identity(mat.rows()))?;
        if err > tol::UNITARY {
            return Err(Error::invalid(format!(
                "gate is not unitary (|U†U − I| = {err:.3e})"
            )));
        }
        Ok(Self {
            kind: GateKind::Custom,
            mat,
            arity,
        })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }
}

/// Lifts `op`, acting on `wires` (in the given order), to the full space of
/// `layout` as `I ⊗ … ⊗ op ⊗ … ⊗ I`.
pub(crate) fn embed_operator<S: AsRef<str>>(
    layout: &SubsystemLayout,
    op: &ComplexMatrix,
    wires: &[S],
) -> Result<ComplexMatrix> {
    let mut pos = Vec::with_capacity(wires.len());
    for w in wires {
        let i = layout.index_of(w.as_ref())?;
        if pos.contains(&i) {
            return Err(Error::invalid(format!("wire `{}` listed twice", w.as_ref())));
        }
        pos.push(i);
    }
    let w_off = layout.offsets(&pos);
    if op.rows() != w_off.len() || op.cols() != w_off.len() {
        return Err(Error::dim(format!(
            "{}x{} operator on wires of total dimension {}",
            op.rows(),
            op.cols(),
            w_off.len()
        )));
    }
    let mut sorted = pos.clone();
    sorted.sort_unstable();
    let rest_off = layout.offsets(&layout.complement(&sorted));
    let n = layout.total_dim();
    let mut full = ComplexMatrix::zeros(n, n);
    for &r in &rest_off {
        for (a, &wa) in w_off.iter().enumerate() {
            for (b, &wb) in w_off.iter().enumerate() {
                let z = op[(a, b)];
                if z != ZERO {
                    full[(wa + r, wb + r)] = z;
                }
            }
        }
    }
    Ok(full)
}

/// States a gate can act on.
pub trait Evolve: Sized {
    fn apply_unitary<S: AsRef<str>>(&self, gate: &Gate, wires: &[S]) -> Result<Self>;
}

fn check_arity<S>(gate: &Gate, wires: &[S]) -> Result<()> {
    if wires.len() != gate.arity {
        return Err(Error::invalid(format!(
            "gate of arity {} applied to {} wires",
            gate.arity,
            wires.len()
        )));
    }
    Ok(())
}

impl Evolve for PureState {
    fn apply_unitary<S: AsRef<str>>(&self, gate: &Gate, wires: &[S]) -> Result<Self> {
        check_arity(gate, wires)?;
        let full = embed_operator(self.layout(), gate.matrix(), wires)?;
        Ok(PureState::from_parts(
            self.layout().clone(),
            full.mul_vec(self.amplitudes())?,
        ))
    }
}

impl Evolve for DensityMatrix {
    fn apply_unitary<S: AsRef<str>>(&self, gate: &Gate, wires: &[S]) -> Result<Self> {
        check_arity(gate, wires)?;
        let full = embed_operator(self.layout(), gate.matrix(), wires)?;
        let out = full.matmul(self.matrix())?.matmul(&full.adjoint())?;
        Ok(DensityMatrix::from_parts(self.layout().clone(), out))
    }
}

/// Four-qubit `√p|0000⟩ + √(1−p)|1111⟩` on wires `a, t, m, e`.
pub fn ghz_state(p: f64) -> Result<PureState> {
    check_probability("p", p)?;
    let mut amps = vec![ZERO; 16];
    amps[0] = Complex64::new(p.sqrt(), 0.0);
    amps[15] = Complex64::new((1.0 - p).sqrt(), 0.0);
    Ok(PureState::from_parts(
        SubsystemLayout::qubits(&["a", "t", "m", "e"]),
        amps,
    ))
}

pub(crate) fn check_probability(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("{name} = {x} is outside [0, 1]")));
    }
    Ok(())
}

/// (|00⟩ ± |11⟩)/√2
pub fn psi_state(sign: f64) -> Vec<Complex64> {
    let h = FRAC_1_SQRT_2;
    vec![
        Complex64::new(h, 0.0),
        ZERO,
        ZERO,
        Complex64::new(sign * h, 0.0),
    ]
}

/// (|01⟩ ± |10⟩)/√2
pub fn phi_state(sign: f64) -> Vec<Complex64> {
    let h = FRAC_1_SQRT_2;
    vec![
        ZERO,
        Complex64::new(h, 0.0),
        Complex64::new(sign * h, 0.0),
        ZERO,
    ]
}

/// One branch of a destructive measurement.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub outcome_index: usize,
    pub probability: f64,
    /// `None` when the outcome has zero probability.
    pub post_state: Option<DensityMatrix>,
}

// Outcomes at or below this probability carry no post-measurement state.
const NULL_OUTCOME: f64 = 1e-14;

/// Measures `wire` in the orthonormal basis given by the columns of `basis`
/// and removes the wire from every post-measurement state.
pub fn measure_projective(
    rho: &DensityMatrix,
    wire: &str,
    basis: &ComplexMatrix,
) -> Result<Vec<MeasurementOutcome>> {
    let layout = rho.layout();
    let d = layout.dim_of(wire)?;
    if basis.rows() != d || basis.cols() != d {
        return Err(Error::dim(format!(
            "{}x{} basis for wire `{wire}` of dimension {d}",
            basis.rows(),
            basis.cols()
        )));
    }
    let gram = basis.adjoint().matmul(basis)?;
    if gram.max_abs_diff(&ComplexMatrix::identity(d))? > tol::UNITARY {
        return Err(Error::invalid("measurement basis is not orthonormal"));
    }
    if layout.len() < 2 {
        return Err(Error::invalid(
            "destructive measurement needs at least one other subsystem",
        ));
    }
    let wpos = layout.index_of(wire)?;
    let rest = layout.complement(&[wpos]);
    let w_off = layout.offsets(&[wpos]);
    let r_off = layout.offsets(&rest);
    let rest_layout = layout.select(&rest);
    let m = rho.matrix();

    let mut outcomes = Vec::with_capacity(d);
    for k in 0..d {
        let v = basis.column(k);
        // (⟨v| ⊗ I) ρ (|v⟩ ⊗ I)
        let n = r_off.len();
        let block = ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for (x, &wx) in w_off.iter().enumerate() {
                for (y, &wy) in w_off.iter().enumerate() {
                    acc += v[x].conj() * m[(wx + r_off[i], wy + r_off[j])] * v[y];
                }
            }
            acc
        });
        let probability = block.trace()?.re.max(0.0);
        let post_state = if probability > NULL_OUTCOME {
            Some(DensityMatrix::from_parts(
                rest_layout.clone(),
                block.scale_real(1.0 / probability),
            ))
        } else {
            None
        };
        outcomes.push(MeasurementOutcome {
            outcome_index: k,
            probability,
            post_state,
        });
    }
    Ok(outcomes)
}

/// Number of basis vectors spanning Alice's "up" subspace.
pub fn up_rank(d_a: usize) -> usize {
    d_a / 2
}

/// Projectors onto Alice's "up" (first ⌊d/2⌋ basis vectors) and "down" subspaces.
pub fn ud_projectors(d_a: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if d_a < 2 {
        return Err(Error::invalid(format!("Alice dimension {d_a} < 2")));
    }
    let u = up_rank(d_a);
    let up: Vec<f64> = (0..d_a).map(|i| if i < u { 1.0 } else { 0.0 }).collect();
    let down: Vec<f64> = up.iter().map(|x| 1.0 - x).collect();
    Ok((ComplexMatrix::diag(&up), ComplexMatrix::diag(&down)))
}

/// Alice's two memory records with `|⟨ξ|ζ⟩| = ε`: `ξ` is the first "up"
/// vector and the orthogonal part of `ζ` is the first "down" vector.
pub fn memory_pair(epsilon: f64, d_a: usize) -> Result<(PureState, PureState)> {
    check_probability("epsilon", epsilon)?;
    if d_a < 2 {
        return Err(Error::invalid(format!("Alice dimension {d_a} < 2")));
    }
    let layout = SubsystemLayout::new([("A", d_a)])?;
    let down = up_rank(d_a);
    let mut xi = vec![ZERO; d_a];
    xi[0] = ONE;
    let mut zeta = vec![ZERO; d_a];
    zeta[0] = Complex64::new(epsilon, 0.0);
    zeta[down] = Complex64::new((1.0 - epsilon * epsilon).sqrt(), 0.0);
    Ok((
        PureState::from_parts(layout.clone(), xi),
        PureState::from_parts(layout, zeta),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn ghz_amplitudes() {
        let g = ghz_state(0.5).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!((g.amplitudes()[0] - c(h)).norm() < 1e-15);
        assert!((g.amplitudes()[15] - c(h)).norm() < 1e-15);
        assert!(g.amplitudes()[1..15].iter().all(|z| *z == ZERO));
        let one = ghz_state(1.0).unwrap();
        assert_eq!(one.amplitudes()[0], ONE);
        assert_eq!(one.amplitudes()[15], ZERO);
        for p in [0.0, 0.3, 0.5, 0.7, 1.0] {
            assert!((ghz_state(p).unwrap().norm() - 1.0).abs() < 1e-15);
        }
        assert!(ghz_state(-0.1).is_err());
        assert!(ghz_state(1.1).is_err());
    }

    #[test]
    fn single_gates() {
        let l = SubsystemLayout::qubits(&["a"]);
        let plus = PureState::basis(l, 0)
            .unwrap()
            .apply_unitary(&Gate::hadamard(), &["a"])
            .unwrap();
        let h = FRAC_1_SQRT_2;
        assert!((plus.amplitudes()[0] - c(h)).norm() < 1e-15);
        assert!((plus.amplitudes()[1] - c(h)).norm() < 1e-15);

        let l2 = SubsystemLayout::qubits(&["a", "t"]);
        let out = PureState::basis(l2.clone(), 2)
            .unwrap()
            .apply_unitary(&Gate::cnot(), &["a", "t"])
            .unwrap();
        assert_eq!(out.amplitudes()[3], ONE);
        // reversed control
        let out = PureState::basis(l2, 2)
            .unwrap()
            .apply_unitary(&Gate::cnot(), &["t", "a"])
            .unwrap();
        assert_eq!(out.amplitudes()[2], ONE);
    }

    #[test]
    fn gate_errors() {
        let l = SubsystemLayout::qubits(&["a", "t"]);
        let s = PureState::basis(l, 0).unwrap();
        assert!(s.apply_unitary(&Gate::cnot(), &["a"]).is_err());
        assert!(s.apply_unitary(&Gate::hadamard(), &["q"]).is_err());
        assert!(s.apply_unitary(&Gate::cnot(), &["a", "a"]).is_err());
        assert!(Gate::custom(ComplexMatrix::diag(&[1.0, 2.0]), 1).is_err());
        let three = PureState::basis(SubsystemLayout::new([("q", 3)]).unwrap(), 0).unwrap();
        assert!(three.apply_unitary(&Gate::hadamard(), &["q"]).is_err());
    }

    #[test]
    fn preparation_circuit_matches_closed_form() {
        for p in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let out = ghz_state(p)
                .unwrap()
                .apply_unitary(&Gate::hadamard(), &["a"])
                .unwrap()
                .apply_unitary(&Gate::cnot(), &["a", "t"])
                .unwrap();
            // √p|Ψ₊⟩|00⟩ + √(1−p)(|01⟩ − |10⟩)/√2 |11⟩ over a,t,m,e
            let (sp, sq, h) = (p.sqrt(), (1.0 - p).sqrt(), FRAC_1_SQRT_2);
            let mut expect = vec![ZERO; 16];
            expect[0b0000] = c(sp * h);
            expect[0b1100] = c(sp * h);
            expect[0b0111] = c(sq * h);
            expect[0b1011] = c(-sq * h);
            for (x, y) in out.amplitudes().iter().zip(&expect) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn measurement_of_simple_states() {
        let l = SubsystemLayout::qubits(&["a", "b"]);
        let h = FRAC_1_SQRT_2;
        // |+⟩ ⊗ |0⟩
        let s = PureState::new(l.clone(), vec![c(h), ZERO, c(h), ZERO]).unwrap().to_density();
        let out = measure_projective(&s, "a", &ComplexMatrix::identity(2)).unwrap();
        assert!((out[0].probability - 0.5).abs() < 1e-15);
        assert!((out[1].probability - 0.5).abs() < 1e-15);
        let post = out[0].post_state.as_ref().unwrap();
        assert_eq!(post.layout().labels().collect::<Vec<_>>(), vec!["b"]);

        let zero = PureState::basis(l, 0).unwrap().to_density();
        let out = measure_projective(&zero, "a", &ComplexMatrix::identity(2)).unwrap();
        assert!((out[0].probability - 1.0).abs() < 1e-15);
        assert_eq!(out[1].probability, 0.0);
        assert!(out[1].post_state.is_none());

        assert!(measure_projective(&zero, "a", &ComplexMatrix::diag(&[1.0, 2.0])).is_err());
        assert!(measure_projective(&zero, "a", &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn memory_pairs() {
        let (xi, zeta) = memory_pair(0.0, 2).unwrap();
        assert_eq!(xi.amplitudes(), &[ONE, ZERO]);
        assert_eq!(zeta.amplitudes(), &[ZERO, ONE]);
        let (xi, zeta) = memory_pair(1.0, 2).unwrap();
        assert_eq!(xi, zeta);
        let (xi, zeta) = memory_pair(0.6, 2).unwrap();
        assert!((zeta.amplitudes()[0] - c(0.6)).norm() < 1e-15);
        assert!((zeta.amplitudes()[1] - c(0.8)).norm() < 1e-15);
        assert!((inner(xi.amplitudes(), zeta.amplitudes()).norm() - 0.6).abs() < 1e-12);
        for d in 2..=8 {
            let (xi, zeta) = memory_pair(0.35, d).unwrap();
            assert!((inner(xi.amplitudes(), zeta.amplitudes()).norm() - 0.35).abs() < 1e-12);
            let (up, down) = ud_projectors(d).unwrap();
            assert!((up.mul_vec(xi.amplitudes()).unwrap()[0] - ONE).norm() < 1e-15);
            let z0 = memory_pair(0.0, d).unwrap().1;
            assert_eq!(down.mul_vec(z0.amplitudes()).unwrap(), z0.amplitudes());
        }
        assert!(memory_pair(1.5, 2).is_err());
        assert!(memory_pair(0.5, 1).is_err());
    }
}
