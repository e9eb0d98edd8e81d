//! Two-way schemes assembled from one-way codes.
//!
//! Every scheme here is non-adaptive: the input at time `i` is symbol `i` of
//! the user's own codeword. Decoders first subtract the user's own signal
//! from what it received and then apply the one-way decoder of the link.

use std::sync::Arc;

use rand::Rng;

use crate::alphabet::{Alphabet, Symbol};
use crate::channels::AdaptiveScheme;
use crate::coding::block::{BlockCode, Codebook};
use crate::coding::dbc::DbcCode;
use crate::coding::mac::MacCodePair;
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::seeds::SimRng;

/// Negative-control switch for the composed decoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Corruption {
    #[default]
    None,
    /// Subtract `own + 1` instead of `own`.
    OffByOne,
}

fn strip_own(
    q: Alphabet,
    received: &[Symbol],
    own: &[Symbol],
    corruption: Corruption,
) -> Vec<Symbol> {
    let bias = match corruption {
        Corruption::None => 0,
        Corruption::OffByOne => 1 % q.size(),
    };
    received
        .iter()
        .zip(own)
        .map(|(&y, &x)| q.sub(q.sub(y, x), bias))
        .collect()
}

/// User of a 2TWC that transmits its own codeword and decodes the peer's.
#[derive(Debug, Clone)]
pub struct NonAdaptiveScheme {
    own: Arc<BlockCode>,
    peer: Option<Arc<BlockCode>>,
    corruption: Corruption,
}

impl NonAdaptiveScheme {
    pub fn own_code(&self) -> &BlockCode {
        &self.own
    }

    pub fn with_corruption(mut self, corruption: Corruption) -> Self {
        self.corruption = corruption;
        self
    }
}

impl AdaptiveScheme for NonAdaptiveScheme {
    type Message = usize;
    type Estimate = usize;

    fn alphabet(&self) -> Alphabet {
        self.own.alphabet()
    }

    fn blocklength(&self) -> usize {
        self.own.blocklength()
    }

    fn accepts(&self, m: usize) -> bool {
        m < self.own.message_count()
    }

    fn sample_message(&self, rng: &mut SimRng) -> usize {
        rng.gen_range(0..self.own.message_count())
    }

    fn transmit(&self, message: usize, history: &[Symbol]) -> Symbol {
        self.own.encode(message)[history.len()]
    }

    fn decode(&self, message: usize, received: &[Symbol]) -> usize {
        match &self.peer {
            None => 0,
            Some(peer) => {
                let residual = strip_own(
                    self.alphabet(),
                    received,
                    self.own.encode(message),
                    self.corruption,
                );
                peer.decode(&residual)
            }
        }
    }
}

/// Scheme whose inputs follow `code` and ignore all received symbols. With
/// nothing to decode, it always reports message 0.
pub fn lift_nonadaptive(code: Arc<BlockCode>) -> NonAdaptiveScheme {
    NonAdaptiveScheme {
        own: code,
        peer: None,
        corruption: Corruption::None,
    }
}

/// Lifts a single fixed input sequence (a one-message code).
pub fn lift_sequence(q: Alphabet, inputs: Vec<Symbol>) -> Result<NonAdaptiveScheme> {
    let code = BlockCode::ml(Codebook::new(q, vec![inputs])?, NoiseModel::silent(q))?;
    Ok(lift_nonadaptive(Arc::new(code)))
}

fn same_shape(q: Alphabet, n: usize, other_q: Alphabet, other_n: usize) -> Result<()> {
    if q != other_q {
        return Err(Error::AlphabetMismatch {
            expected: q.size(),
            found: other_q.size(),
        });
    }
    if n != other_n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: other_n,
        });
    }
    Ok(())
}

/// Builds the 2TWC schemes from `code1` (link 1 -> 2, decoder matched to
/// `Z2`) and `code2` (link 2 -> 1, decoder matched to `Z1`).
pub fn compose_2twc(
    code1: Arc<BlockCode>,
    code2: Arc<BlockCode>,
) -> Result<(NonAdaptiveScheme, NonAdaptiveScheme)> {
    same_shape(
        code1.alphabet(),
        code1.blocklength(),
        code2.alphabet(),
        code2.blocklength(),
    )?;
    let user1 = NonAdaptiveScheme {
        own: code1.clone(),
        peer: Some(code2.clone()),
        corruption: Corruption::None,
    };
    let user2 = NonAdaptiveScheme {
        own: code2,
        peer: Some(code1),
        corruption: Corruption::None,
    };
    Ok((user1, user2))
}

/// Multiple-access sender of the MA/DBC (user 1 or 2), which also receives
/// its part of the broadcast.
#[derive(Debug, Clone)]
pub struct MacUser {
    mac: Arc<MacCodePair>,
    dbc: Arc<DbcCode>,
    index: usize,
    corruption: Corruption,
}

impl MacUser {
    pub fn with_corruption(mut self, corruption: Corruption) -> Self {
        self.corruption = corruption;
        self
    }
}

impl AdaptiveScheme for MacUser {
    type Message = usize;
    type Estimate = usize;

    fn alphabet(&self) -> Alphabet {
        self.mac.alphabet()
    }

    fn blocklength(&self) -> usize {
        self.mac.blocklength()
    }

    fn accepts(&self, m: usize) -> bool {
        m < self.mac.codebook(self.index).len()
    }

    fn sample_message(&self, rng: &mut SimRng) -> usize {
        rng.gen_range(0..self.mac.codebook(self.index).len())
    }

    fn transmit(&self, message: usize, history: &[Symbol]) -> Symbol {
        self.mac.codebook(self.index).word(message)[history.len()]
    }

    fn decode(&self, message: usize, received: &[Symbol]) -> usize {
        let own = self.mac.codebook(self.index).word(message);
        let residual = strip_own(self.alphabet(), received, own, self.corruption);
        if self.index == 0 {
            self.dbc.decode_strong(&residual)
        } else {
            self.dbc.decode_weak(&residual)
        }
    }
}

/// Broadcasting user 3 of the MA/DBC, which also receives the MAC.
#[derive(Debug, Clone)]
pub struct HubUser {
    mac: Arc<MacCodePair>,
    dbc: Arc<DbcCode>,
    corruption: Corruption,
}

impl HubUser {
    pub fn with_corruption(mut self, corruption: Corruption) -> Self {
        self.corruption = corruption;
        self
    }
}

impl AdaptiveScheme for HubUser {
    type Message = (usize, usize);
    type Estimate = (usize, usize);

    fn alphabet(&self) -> Alphabet {
        self.dbc.alphabet()
    }

    fn blocklength(&self) -> usize {
        self.dbc.blocklength()
    }

    fn accepts(&self, (m31, m32): (usize, usize)) -> bool {
        let (a, b) = self.dbc.message_counts();
        m31 < a && m32 < b
    }

    fn sample_message(&self, rng: &mut SimRng) -> (usize, usize) {
        let (a, b) = self.dbc.message_counts();
        (rng.gen_range(0..a), rng.gen_range(0..b))
    }

    fn transmit(&self, (m31, m32): (usize, usize), history: &[Symbol]) -> Symbol {
        self.dbc.encode(m31, m32)[history.len()]
    }

    fn decode(&self, (m31, m32): (usize, usize), received: &[Symbol]) -> (usize, usize) {
        let residual = strip_own(
            self.alphabet(),
            received,
            self.dbc.encode(m31, m32),
            self.corruption,
        );
        self.mac.joint_decode(&residual)
    }
}

/// Builds the three MA/DBC schemes from a MAC code pair and a DBC code.
pub fn compose_madbc(
    mac: Arc<MacCodePair>,
    dbc: Arc<DbcCode>,
) -> Result<(MacUser, MacUser, HubUser)> {
    same_shape(
        mac.alphabet(),
        mac.blocklength(),
        dbc.alphabet(),
        dbc.blocklength(),
    )?;
    let user = |index| MacUser {
        mac: mac.clone(),
        dbc: dbc.clone(),
        index,
        corruption: Corruption::None,
    };
    let hub = HubUser {
        mac: mac.clone(),
        dbc: dbc.clone(),
        corruption: Corruption::None,
    };
    Ok((user(0), user(1), hub))
}
