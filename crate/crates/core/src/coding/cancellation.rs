//! Adaptive binary scheme for the delayed-copy noise pair.
//!
//! User 1 sends `X[i] = U[i] + X[i-1] + Y1[i-1]` with `X[0] = Y1[0] = 0`
//! while user 2 stays silent. Because `Y1[i-1]` carries `Z1[i-1] = Z2[i]`,
//! the noise that will hit user 2 at time `i` is cancelled in advance and
//! user 2 reads `U[i]` directly off `Y2[i]`.

use rand::Rng;

use crate::alphabet::{Alphabet, Symbol};
use crate::channels::AdaptiveScheme;
use crate::error::{Error, Result};
use crate::seeds::SimRng;

/// Sender; the message is the bit string `U[1..n]`, with `U[i]` stored in
/// bit `i - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancellingSender {
    n: usize,
}

/// Silent receiver that reconstructs the message bitwise from its outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReceiver {
    n: usize,
}

pub fn cancellation_scheme(q: Alphabet, n: usize) -> Result<(CancellingSender, IdentityReceiver)> {
    if q.size() != 2 {
        return Err(Error::Unsupported(format!(
            "the cancellation scheme is binary, got q = {}",
            q.size()
        )));
    }
    if n == 0 || n > usize::BITS as usize {
        return Err(Error::InvalidCode(format!(
            "blocklength {n} outside 1..={}",
            usize::BITS
        )));
    }
    Ok((CancellingSender { n }, IdentityReceiver { n }))
}

fn accepts_bits(n: usize, m: usize) -> bool {
    n >= usize::BITS as usize || m >> n == 0
}

fn sample_bits(n: usize, rng: &mut SimRng) -> usize {
    let raw: u64 = rng.gen();
    let raw = raw as usize;
    if n >= usize::BITS as usize {
        raw
    } else {
        raw & ((1usize << n) - 1)
    }
}

impl CancellingSender {
    /// Input at time `history.len() + 1`, unrolling the recursion from the
    /// zero boundary.
    fn input(&self, message: usize, history: &[Symbol]) -> Symbol {
        let mut x = 0u8;
        let mut y_prev = 0u8;
        for i in 0..=history.len() {
            let u = ((message >> i) & 1) as u8;
            x ^= u ^ y_prev;
            if i < history.len() {
                y_prev = history[i];
            }
        }
        x
    }
}

impl AdaptiveScheme for CancellingSender {
    type Message = usize;
    type Estimate = usize;

    fn alphabet(&self) -> Alphabet {
        Alphabet::binary()
    }

    fn blocklength(&self) -> usize {
        self.n
    }

    fn accepts(&self, m: usize) -> bool {
        accepts_bits(self.n, m)
    }

    fn sample_message(&self, rng: &mut SimRng) -> usize {
        sample_bits(self.n, rng)
    }

    fn transmit(&self, message: usize, history: &[Symbol]) -> Symbol {
        self.input(message, history)
    }

    /// User 2 sends nothing, so there is a single message to recover.
    fn decode(&self, _: usize, _: &[Symbol]) -> usize {
        0
    }
}

impl AdaptiveScheme for IdentityReceiver {
    type Message = usize;
    type Estimate = usize;

    fn alphabet(&self) -> Alphabet {
        Alphabet::binary()
    }

    fn blocklength(&self) -> usize {
        self.n
    }

    fn accepts(&self, m: usize) -> bool {
        m == 0
    }

    fn sample_message(&self, _: &mut SimRng) -> usize {
        0
    }

    fn transmit(&self, _: usize, _: &[Symbol]) -> Symbol {
        0
    }

    fn decode(&self, _: usize, received: &[Symbol]) -> usize {
        received
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &y)| acc | ((y as usize & 1) << i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{run_2twc, TwoWayChannel};
    use crate::noise::{DelayedCopyPair, TwoWayNoise};
    use crate::seeds::{rng, unit_rng};

    fn channel() -> TwoWayChannel {
        TwoWayChannel::new(TwoWayNoise::DelayedCopy(DelayedCopyPair))
    }

    #[test]
    fn rejects_non_binary() {
        assert!(cancellation_scheme(Alphabet::new(3).unwrap(), 4).is_err());
        assert!(cancellation_scheme(Alphabet::binary(), 0).is_err());
        assert!(cancellation_scheme(Alphabet::binary(), 65).is_err());
    }

    #[test]
    fn short_message_is_read_off_the_output() {
        let (tx, rx) = cancellation_scheme(Alphabet::binary(), 3).unwrap();
        // U = (1, 0, 1).
        let u = 0b101;
        for seed in 0..16 {
            let (z1, z2) = channel().sample_noise(3, &mut rng(seed));
            let t = run_2twc(&channel(), &tx, &rx, u, 0, &z1, &z2).unwrap();
            assert_eq!(t.y2, vec![1, 0, 1]);
            assert_eq!(t.reconstructions.w1, u);
            assert!(t.audit());
            assert!(t.causality_audit(&tx, &rx));
        }
    }

    #[test]
    fn zero_message_follows_recursion() {
        let (tx, rx) = cancellation_scheme(Alphabet::binary(), 8).unwrap();
        let (z1, z2) = channel().sample_noise(8, &mut rng(2));
        let t = run_2twc(&channel(), &tx, &rx, 0, 0, &z1, &z2).unwrap();
        assert_eq!(t.y2, vec![0; 8]);
        let mut prev_x = 0;
        let mut prev_y = 0;
        for i in 0..8 {
            assert_eq!(t.x1[i], prev_x ^ prev_y);
            prev_x = t.x1[i];
            prev_y = t.y1[i];
        }
    }

    #[test]
    fn every_output_equals_the_message_bit() {
        let (tx, rx) = cancellation_scheme(Alphabet::binary(), 64).unwrap();
        for k in 0..500 {
            let mut r = unit_rng(77, k);
            let u = tx.sample_message(&mut r);
            let (z1, z2) = channel().sample_noise(64, &mut r);
            let t = run_2twc(&channel(), &tx, &rx, u, 0, &z1, &z2).unwrap();
            for (i, &y) in t.y2.iter().enumerate() {
                assert_eq!(y as usize, (u >> i) & 1);
            }
            assert_eq!(t.reconstructions.w1, u);
        }
    }
}
