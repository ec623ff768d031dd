//! Geometry of the FPB entangling probe.
//!
//! Probe kets are expressed in the `{|+⟩, |−⟩}` basis of the target qubit.
//! Carriers are expressed in their own sending basis: `{|h⟩, |v⟩}` for
//! [`Basis::Rectilinear`] and `{|r⟩, |ℓ⟩}` for [`Basis::Diagonal`], bit 0
//! being `|h⟩` or `|r⟩`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};
use crate::linalg::{ComplexVec, C64};

pub const MAX_ERROR_RATE: f64 = 1.0 / 3.0;

/// Validated induced bit error rate `P_E ∈ [0, 1/3]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    error_rate: f64,
}

impl ProbeConfig {
    pub fn new(error_rate: f64) -> Result<Self> {
        check_range("error_rate", error_rate, 0.0, MAX_ERROR_RATE)?;
        Ok(Self { error_rate })
    }

    pub fn error_rate(&self) -> f64 {
        self.error_rate
    }

    /// `c = √(1 − 2P_E)`
    pub fn c(&self) -> f64 {
        (1.0 - 2.0 * self.error_rate).sqrt()
    }

    /// `s = √(2P_E)`
    pub fn s(&self) -> f64 {
        (2.0 * self.error_rate).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Rectilinear,
    Diagonal,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::Rectilinear, Basis::Diagonal];

    pub fn index(self) -> usize {
        match self {
            Basis::Rectilinear => 0,
            Basis::Diagonal => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub const ALL: [Bit; 2] = [Bit::Zero, Bit::One];

    pub fn index(self) -> usize {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn flipped(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl From<bool> for Bit {
    fn from(one: bool) -> Self {
        if one {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

/// Subnormalized probe outputs and the discrimination angle they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGeometry {
    pub theta: f64,
    /// `cos 2θ`, the overlap of the normalized outputs.
    pub overlap: f64,
    pub t_plus: ComplexVec,
    pub t_minus: ComplexVec,
    pub t_err: ComplexVec,
}

/// Initial probe ket `c|+⟩ + s|−⟩`.
pub fn probe_input(cfg: &ProbeConfig) -> ComplexVec {
    ComplexVec::from_real(&[cfg.c(), cfg.s()]).expect("two finite entries")
}

/// Angle `θ ∈ [0, π/4]` with `cos 2θ = (1−3P_E)/(1−P_E)` and
/// `sin 2θ = √(4P_E(1−2P_E))/(1−P_E)`.
pub fn theta_from_error_rate(cfg: &ProbeConfig) -> f64 {
    let p = cfg.error_rate;
    let cos2 = (1.0 - 3.0 * p) / (1.0 - p);
    let sin2 = (4.0 * p * (1.0 - 2.0 * p)).max(0.0).sqrt() / (1.0 - p);
    (0.5 * sin2.atan2(cos2)).clamp(0.0, FRAC_PI_4)
}

pub fn probe_geometry(cfg: &ProbeConfig) -> ProbeGeometry {
    let c = cfg.c();
    let d = cfg.s() * FRAC_1_SQRT_2;
    let theta = theta_from_error_rate(cfg);
    ProbeGeometry {
        theta,
        overlap: (2.0 * theta).cos(),
        t_plus: ComplexVec::from_real(&[c, d]).expect("finite"),
        t_minus: ComplexVec::from_real(&[c, -d]).expect("finite"),
        t_err: ComplexVec::from_real(&[0.0, d]).expect("finite"),
    }
}

/// Post-CNOT state split by carrier branch:
/// `|a_bit⟩ ⊗ kept + |a_{1−bit}⟩ ⊗ flipped`, carriers in the sending basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CnotBranches {
    pub kept: ComplexVec,
    pub flipped: ComplexVec,
}

pub fn cnot_branches(basis: Basis, bit: Bit, geom: &ProbeGeometry) -> CnotBranches {
    let kept = match bit {
        Bit::Zero => geom.t_plus.clone(),
        Bit::One => geom.t_minus.clone(),
    };
    // The diagonal basis picks up a relative minus sign on the error branch.
    let flipped = match basis {
        Basis::Rectilinear => geom.t_err.clone(),
        Basis::Diagonal => geom.t_err.scale(C64::new(-1.0, 0.0)),
    };
    CnotBranches { kept, flipped }
}

/// Two-qubit output ket, index `2·carrier + probe` with the carrier in the
/// sending basis and the probe in `{|+⟩, |−⟩}`.
pub fn cnot_action(basis: Basis, bit: Bit, cfg: &ProbeConfig) -> ComplexVec {
    let geom = probe_geometry(cfg);
    let br = cnot_branches(basis, bit, &geom);
    let (first, second) = match bit {
        Bit::Zero => (&br.kept, &br.flipped),
        Bit::One => (&br.flipped, &br.kept),
    };
    ComplexVec::new(vec![first.get(0), first.get(1), second.get(0), second.get(1)])
        .expect("four entries")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner_product, ComplexMat};
    use std::f64::consts::PI;

    fn cfg(p: f64) -> ProbeConfig {
        ProbeConfig::new(p).unwrap()
    }

    #[test]
    fn range_gate() {
        assert!(ProbeConfig::new(0.5).is_err());
        assert!(ProbeConfig::new(-1e-9).is_err());
        assert!(ProbeConfig::new(f64::NAN).is_err());
        assert!(ProbeConfig::new(1.0 / 3.0).is_ok());
    }

    #[test]
    fn input_ket() {
        let zero = probe_input(&cfg(0.0));
        assert_eq!(zero, ComplexVec::from_real(&[1.0, 0.0]).unwrap());
        assert!((probe_input(&cfg(0.18)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta_endpoints_and_value() {
        assert_eq!(theta_from_error_rate(&cfg(0.0)), 0.0);
        assert!((theta_from_error_rate(&cfg(1.0 / 3.0)) - PI / 4.0).abs() < 1e-12);
        let th = theta_from_error_rate(&cfg(0.2));
        assert!(((2.0 * th).cos() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn theta_identities_on_grid() {
        for k in 0..=1000 {
            let p = k as f64 / 3000.0;
            let th = theta_from_error_rate(&cfg(p));
            let cos2 = (1.0 - 3.0 * p) / (1.0 - p);
            let sin2 = (4.0 * p * (1.0 - 2.0 * p)).sqrt() / (1.0 - p);
            assert!(((2.0 * th).cos() - cos2).abs() < 1e-12, "p={p}");
            assert!(((2.0 * th).sin() - sin2).abs() < 1e-12, "p={p}");
            assert!((cos2 * cos2 + sin2 * sin2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn geometry_invariants() {
        for k in 0..=100 {
            let p = k as f64 / 300.0;
            let g = probe_geometry(&cfg(p));
            assert!((g.t_plus.norm_sqr() - (1.0 - p)).abs() < 1e-12);
            assert!((g.t_minus.norm_sqr() - (1.0 - p)).abs() < 1e-12);
            assert!((g.t_err.norm_sqr() - p).abs() < 1e-12);
            let ov = inner_product(&g.t_plus, &g.t_minus).unwrap();
            assert!((ov.re - (1.0 - 3.0 * p)).abs() < 1e-12 && ov.im == 0.0);
            // normalized outputs are (cos θ, ±sin θ)
            let np = g.t_plus.normalized().unwrap();
            let nm = g.t_minus.normalized().unwrap();
            let (c, s) = (g.theta.cos(), g.theta.sin());
            assert!(np.max_abs_diff(&ComplexVec::from_real(&[c, s]).unwrap()).unwrap() < 1e-12);
            assert!(nm.max_abs_diff(&ComplexVec::from_real(&[c, -s]).unwrap()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn overlap_at_point_two() {
        let g = probe_geometry(&cfg(0.2));
        let ov = inner_product(&g.t_plus, &g.t_minus).unwrap();
        assert!((ov.re - 0.4).abs() < 1e-12);
    }

    #[test]
    fn zero_error_rate_is_product_state() {
        let g = probe_geometry(&cfg(0.0));
        assert_eq!(g.t_plus, g.t_minus);
        assert_eq!(g.t_err.norm(), 0.0);
        for basis in Basis::ALL {
            for bit in Bit::ALL {
                let out = cnot_action(basis, bit, &cfg(0.0));
                let idx = 2 * bit.index();
                assert!((out.get(idx).re - 1.0).abs() < 1e-15);
                assert!((out.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn flipped_branch_weight_is_error_rate() {
        for p in [0.05, 0.2, 1.0 / 3.0] {
            for basis in Basis::ALL {
                for bit in Bit::ALL {
                    let out = cnot_action(basis, bit, &cfg(p));
                    assert!((out.norm() - 1.0).abs() < 1e-12);
                    let f = 2 * bit.flipped().index();
                    let w = out.get(f).norm_sqr() + out.get(f + 1).norm_sqr();
                    assert!((w - p).abs() < 1e-12);
                }
            }
        }
    }

    /// Build the CNOT in the gate basis `|0⟩ = cos(π/8)|h⟩ + sin(π/8)|v⟩`,
    /// `|1⟩ = −sin(π/8)|h⟩ + cos(π/8)|v⟩`, control on the carrier, and compare
    /// with the branch decomposition in every sending basis.
    #[test]
    fn cnot_matches_gate_level_expansion() {
        let (c8, s8) = ((PI / 8.0).cos(), (PI / 8.0).sin());
        let r2 = FRAC_1_SQRT_2;
        // carrier coordinates in {h, v}
        let k0 = [c8, s8];
        let k1 = [-s8, c8];
        let mut proj0 = [0.0; 4];
        let mut proj1 = [0.0; 4];
        for i in 0..2 {
            for j in 0..2 {
                proj0[i * 2 + j] = k0[i] * k0[j];
                proj1[i * 2 + j] = k1[i] * k1[j];
            }
        }
        let proj0 = ComplexMat::from_real(2, 2, &proj0).unwrap();
        let proj1 = ComplexMat::from_real(2, 2, &proj1).unwrap();
        // target in its own {|0⟩, |1⟩} basis
        let id2 = ComplexMat::identity(2).unwrap();
        let x = ComplexMat::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let gate = proj0.kron(&id2).unwrap().add(&proj1.kron(&x).unwrap()).unwrap();
        // probe |±⟩ = (|0⟩ ± |1⟩)/√2
        let pm = ComplexMat::from_real(2, 2, &[r2, r2, r2, -r2]).unwrap();
        let sending = [
            (Basis::Rectilinear, [[1.0, 0.0], [0.0, 1.0]]),
            (Basis::Diagonal, [[r2, r2], [-r2, r2]]),
        ];
        for p in [0.0, 0.1, 0.2, 0.3] {
            let c = cfg(p);
            // t_in in target {0,1} coordinates
            let t_in = pm.apply(&probe_input(&c)).unwrap();
            for (basis, kets) in sending {
                // change of basis: rows are sending kets in {h, v}
                let b = ComplexMat::from_real(2, 2, &[kets[0][0], kets[0][1], kets[1][0], kets[1][1]])
                    .unwrap();
                let to_local = b.kron(&pm.adjoint()).unwrap();
                for bit in Bit::ALL {
                    let carrier = ComplexVec::from_real(&kets[bit.index()]).unwrap();
                    let out = gate.apply(&carrier.kron(&t_in).unwrap()).unwrap();
                    let local = to_local.apply(&out).unwrap();
                    let expected = cnot_action(basis, bit, &c);
                    assert!(
                        local.max_abs_diff(&expected).unwrap() < 1e-12,
                        "{basis:?} {bit:?} p={p}: {local:?} vs {expected:?}"
                    );
                }
            }
        }
    }
}
