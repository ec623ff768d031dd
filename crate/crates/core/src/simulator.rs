//! Monte Carlo simulation of BB84 rounds under the probe attack.
//!
//! Each round: Alice picks a basis and bit, the carrier is entangled with
//! the probe, Bob measures the carrier in a random basis (collapsing the
//! probe), and Eve measures the probe with the generalized discrimination
//! POVM. Eve always measures after Bob; since the two measurements act on
//! different qubits the joint statistics do not depend on the order.
//!
//! Round `r` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `r`, so a
//! session is reproducible for a fixed seed regardless of thread count.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrimination::{born_probs_pure, build_povm, DiscriminationConfig, Povm};
use crate::entropy::{mutual_information, JointDistribution, COLS, ROWS};
use crate::error::{check_range, Error, Result};
use crate::linalg::{ComplexVec, C64};
use crate::probe::{cnot_branches, probe_geometry, Basis, Bit, ProbeConfig, MAX_ERROR_RATE};

/// Eve's outcome labels as stored in a tally: `+`, `−`, `?`.
pub const EVE_OUTCOMES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub rounds: u64,
    pub error_rate: f64,
    pub xi: f64,
    pub seed: u64,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Empty("rounds"));
        }
        check_range("error_rate", self.error_rate, 0.0, MAX_ERROR_RATE)?;
        check_range("xi", self.xi, 0.0, 1.0)?;
        Ok(())
    }
}

/// Counts indexed by `[basis_match][bob_correct][alice_bit][eve_outcome]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SessionTally {
    pub counts: [[[[u64; EVE_OUTCOMES]; 2]; 2]; 2],
    pub rounds: u64,
}

impl SessionTally {
    fn record(mut self, o: &RoundOutcome) -> Self {
        self.counts[o.basis_match as usize][o.bob_correct as usize][o.alice_bit][o.eve] += 1;
        self.rounds += 1;
        self
    }

    /// Elementwise sum; associative and commutative.
    pub fn merge(mut self, other: &SessionTally) -> Self {
        for m in 0..2 {
            for c in 0..2 {
                for a in 0..2 {
                    for e in 0..EVE_OUTCOMES {
                        self.counts[m][c][a][e] += other.counts[m][c][a][e];
                    }
                }
            }
        }
        self.rounds += other.rounds;
        self
    }

    fn sum(&self, basis_match: usize, bob_correct: Option<usize>) -> u64 {
        let mut total = 0;
        for c in 0..2 {
            if bob_correct.is_some_and(|want| want != c) {
                continue;
            }
            total += self.counts[basis_match][c].iter().flatten().sum::<u64>();
        }
        total
    }

    /// Rounds where Alice and Bob used the same basis.
    pub fn sifted(&self) -> u64 {
        self.sum(1, None)
    }

    pub fn sifted_errors(&self) -> u64 {
        self.sum(1, Some(0))
    }

    pub fn error_free_sifted(&self) -> u64 {
        self.sum(1, Some(1))
    }

    /// Observed error rate on the sifted key.
    pub fn qber(&self) -> Option<f64> {
        let n = self.sifted();
        (n > 0).then(|| self.sifted_errors() as f64 / n as f64)
    }

    /// Eve's outcome counts (`+`, `−`, `?`) on error-free sifted rounds,
    /// relabelled relative to Alice's bit: `[agree, disagree, inconclusive]`.
    pub fn eve_agreement_counts(&self) -> [u64; 3] {
        let mut out = [0; 3];
        for a in 0..2 {
            let row = &self.counts[1][1][a];
            let (agree, disagree) = if a == 0 { (row[0], row[1]) } else { (row[1], row[0]) };
            out[0] += agree;
            out[1] += disagree;
            out[2] += row[2];
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RoundOutcome {
    basis_match: bool,
    bob_correct: bool,
    alice_bit: usize,
    eve: usize,
}

/// Joint law of Bob's bit and Eve's outcome for one choice of Alice's basis
/// and bit and Bob's basis: `p[bob_bit][eve_outcome]`.
pub type RoundLaw = [[f64; EVE_OUTCOMES]; 2];

/// `⟨k_B|j_A⟩` for carrier states in two bases; `1` or `0` when they match,
/// `(−1)^{jk}/√2` otherwise.
fn carrier_amplitude(alice: Basis, j: usize, bob: Basis, k: usize) -> f64 {
    if alice == bob {
        if j == k {
            1.0
        } else {
            0.0
        }
    } else if j * k == 1 {
        -FRAC_1_SQRT_2
    } else {
        FRAC_1_SQRT_2
    }
}

/// Unnormalized probe ket given Bob's outcome; its squared norm is the
/// probability of that outcome.
pub fn conditional_probe(alice_basis: Basis, bit: Bit, bob_basis: Basis, bob_bit: Bit, probe: &ProbeConfig) -> Result<ComplexVec> {
    let br = cnot_branches(alice_basis, bit, &probe_geometry(probe));
    let (x, k) = (bit.index(), bob_bit.index());
    let a_kept = carrier_amplitude(alice_basis, x, bob_basis, k);
    let a_flip = carrier_amplitude(alice_basis, 1 - x, bob_basis, k);
    br.kept
        .scale(C64::new(a_kept, 0.0))
        .add(&br.flipped.scale(C64::new(a_flip, 0.0)))
}

/// Compute the law by collapsing the probe onto Bob's outcome and applying
/// the POVM to the normalized conditional probe state.
pub fn round_law(alice_basis: Basis, bit: Bit, bob_basis: Basis, probe: &ProbeConfig, povm: &Povm) -> Result<RoundLaw> {
    let mut law = [[0.0; EVE_OUTCOMES]; 2];
    for (row, bob_bit) in law.iter_mut().zip(Bit::ALL) {
        let state = conditional_probe(alice_basis, bit, bob_basis, bob_bit, probe)?;
        let p_bob = state.norm_sqr();
        let Some(normalized) = state.normalized() else {
            continue;
        };
        let eve = born_probs_pure(povm, &normalized)?;
        for (slot, e) in row.iter_mut().zip(eve) {
            *slot = p_bob * e;
        }
    }
    Ok(law)
}

/// Precomputed laws indexed by `[alice_basis][alice_bit][bob_basis]`.
#[derive(Debug, Clone)]
pub struct RoundModel {
    laws: [[[RoundLaw; 2]; 2]; 2],
}

impl RoundModel {
    pub fn new(cfg: &SessionConfig) -> Result<Self> {
        cfg.validate()?;
        let probe = ProbeConfig::new(cfg.error_rate)?;
        let theta = probe_geometry(&probe).theta;
        let povm = build_povm(&DiscriminationConfig::from_xi(theta, cfg.xi)?);
        let mut laws = [[[[[0.0; EVE_OUTCOMES]; 2]; 2]; 2]; 2];
        for a in Basis::ALL {
            for x in Bit::ALL {
                for b in Basis::ALL {
                    laws[a.index()][x.index()][b.index()] = round_law(a, x, b, &probe, &povm)?;
                }
            }
        }
        Ok(Self { laws })
    }

    pub fn law(&self, alice_basis: Basis, bit: Bit, bob_basis: Basis) -> &RoundLaw {
        &self.laws[alice_basis.index()][bit.index()][bob_basis.index()]
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> RoundOutcome {
        let alice_basis = rng.gen_range(0..2);
        let alice_bit = rng.gen_range(0..2);
        let bob_basis = rng.gen_range(0..2);
        let law = &self.laws[alice_basis][alice_bit][bob_basis];
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut pick = (1, EVE_OUTCOMES - 1);
        'outer: for (k, row) in law.iter().enumerate() {
            for (e, p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = (k, e);
                    break 'outer;
                }
            }
        }
        RoundOutcome {
            basis_match: alice_basis == bob_basis,
            bob_correct: pick.0 == alice_bit,
            alice_bit,
            eve: pick.1,
        }
    }
}

/// RNG for a single round.
pub fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

pub fn run_session(cfg: &SessionConfig) -> Result<SessionTally> {
    let model = RoundModel::new(cfg)?;
    Ok((0..cfg.rounds)
        .into_par_iter()
        .fold(SessionTally::default, |t, r| {
            t.record(&model.sample(&mut round_rng(cfg.seed, r)))
        })
        .reduce(SessionTally::default, |a, b| a.merge(&b)))
}

/// Empirical joint of Bob's bit and Eve's guess on error-free sifted rounds;
/// Eve's `+` maps to guess 0, `−` to guess 1.
pub fn empirical_joint(t: &SessionTally) -> Result<JointDistribution> {
    let n = t.error_free_sifted();
    if n == 0 {
        return Err(Error::Empty("no error-free sifted rounds"));
    }
    let mut table = [[0.0; COLS]; ROWS];
    for (a, row) in table.iter_mut().enumerate() {
        for (e, slot) in row.iter_mut().enumerate() {
            *slot = t.counts[1][1][a][e] as f64 / n as f64;
        }
    }
    JointDistribution::new(table)
}

pub fn empirical_mutual_information(t: &SessionTally) -> Result<f64> {
    Ok(mutual_information(&empirical_joint(t)?))
}
