//! Clifford algebra of `R⁵` on the 4-dimensional spin space, over the
//! Gaussian rationals.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::exterior::{Form, DIM};
use crate::frames::ConnectionForms;
use crate::linalg::Matrix;
use crate::scalar::{rat, Field, Rational, Scalar};

pub type Gaussian = Complex<Rational>;
pub type SpinMatrix = Matrix<Gaussian>;
pub type Spinor = Vec<Gaussian>;

fn g(re: i64, im: i64) -> Gaussian {
    Complex::new(rat(re, 1), rat(im, 1))
}

fn kron(a: &SpinMatrix, b: &SpinMatrix) -> SpinMatrix {
    Matrix::from_fn(4, 4, |i, j| a.get(i / 2, j / 2).mul(b.get(i % 2, j % 2)))
}

fn pauli(k: usize) -> SpinMatrix {
    let rows = match k {
        0 => [[g(1, 0), g(0, 0)], [g(0, 0), g(1, 0)]],
        1 => [[g(0, 0), g(1, 0)], [g(1, 0), g(0, 0)]],
        2 => [[g(0, 0), g(0, -1)], [g(0, 1), g(0, 0)]],
        _ => [[g(1, 0), g(0, 0)], [g(0, 0), g(-1, 0)]],
    };
    Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

/// Generators `γ_k = i Γ_k` with `γ_i γ_j + γ_j γ_i = -2 δ_ij`.
#[derive(Debug, Clone)]
pub struct SpinorSpace {
    gammas: Vec<SpinMatrix>,
}

impl SpinorSpace {
    pub fn new() -> Result<Self> {
        let hermitian = [
            kron(&pauli(1), &pauli(1)),
            kron(&pauli(1), &pauli(2)),
            kron(&pauli(1), &pauli(3)),
            kron(&pauli(2), &pauli(0)),
            kron(&pauli(3), &pauli(0)),
        ];
        Self::from_generators(hermitian.iter().map(|h| h.scaled(&g(0, 1))).collect())
    }

    /// Checks the Clifford relations before accepting the generators.
    pub fn from_generators(gammas: Vec<SpinMatrix>) -> Result<Self> {
        if gammas.len() != DIM || gammas.iter().any(|m| m.rows() != 4 || m.cols() != 4) {
            return Err(Error::Clifford("need five 4x4 generators".into()));
        }
        let minus_two = Matrix::identity(4).scaled(&g(-2, 0));
        for i in 0..DIM {
            for j in 0..DIM {
                let anti = gammas[i].mul(&gammas[j]).add(&gammas[j].mul(&gammas[i]));
                let expected = if i == j { minus_two.clone() } else { Matrix::zeros(4, 4) };
                if anti != expected {
                    return Err(Error::Clifford(format!(
                        "generators {} and {} violate the Clifford relation",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(SpinorSpace { gammas })
    }

    pub fn gamma(&self, k: usize) -> &SpinMatrix {
        &self.gammas[k]
    }

    /// `β · ψ` for `β = Σ_{i<j} β_ij e_ij` acts as `Σ_{i<j} β_ij γ_i γ_j`.
    pub fn clifford_action(&self, beta: &Form<Rational>) -> Result<SpinMatrix> {
        if beta.degree() != 2 || !beta.is_metric() {
            return Err(Error::Clifford("Clifford action is defined for metric 2-forms".into()));
        }
        let mut m = Matrix::zeros(4, 4);
        for i in 0..DIM {
            for j in i + 1..DIM {
                let c = beta.eval(&[i, j]);
                if !Scalar::is_zero(&c) {
                    let gg = self.gammas[i].mul(&self.gammas[j]);
                    m = m.add(&gg.scaled(&Complex::new(c, rat(0, 1))));
                }
            }
        }
        Ok(m)
    }

    /// Basis of `{ψ : β · ψ = 0}`.
    pub fn kernel(&self, beta: &Form<Rational>) -> Result<Vec<Spinor>> {
        Ok(self.clifford_action(beta)?.nullspace())
    }

    /// `σ(ω) = ½ Σ_{i<j} ω_ij γ_i γ_j`, one matrix per symbol leg of the
    /// connection forms (index = symbol position).
    pub fn spin_lift(&self, omega: &ConnectionForms<Rational>, symbols: usize) -> Vec<SpinMatrix> {
        (0..symbols)
            .map(|p| {
                let mut m = Matrix::zeros(4, 4);
                for i in 0..DIM {
                    for j in i + 1..DIM {
                        let c = omega.get(i, j).coefficient(1 << p);
                        if !Scalar::is_zero(&c) {
                            let gg = self.gammas[i].mul(&self.gammas[j]);
                            m = m.add(&gg.scaled(&Complex::new(c * rat(1, 2), rat(0, 1))));
                        }
                    }
                }
                m
            })
            .collect()
    }

    /// `σ(ω) ψ = 0` on every leg.
    pub fn annihilates(&self, omega: &ConnectionForms<Rational>, symbols: usize, psi: &[Gaussian]) -> bool {
        self.spin_lift(omega, symbols)
            .iter()
            .all(|m| m.mul_vec(psi).iter().all(Scalar::is_zero))
    }
}

/// Dimension of the eigenspace of `m` for the eigenvalue `lambda`.
pub fn eigenspace_dim(m: &SpinMatrix, lambda: &Gaussian) -> usize {
    let shifted = m.sub(&Matrix::identity(m.rows()).scaled(lambda));
    shifted.nullspace().len()
}

pub fn gaussian(re: i64, im: i64) -> Gaussian {
    g(re, im)
}
