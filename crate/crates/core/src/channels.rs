//! Symbol-by-symbol execution of the two-way channel and the MA/DBC network.
//!
//! At every time index all users first compute their inputs from their own
//! messages and the outputs they received strictly before, then the channel
//! produces the new outputs. Noise paths are supplied by the caller so that
//! several systems can be driven by the same realization.

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::noise::{IidNoise, NoiseModel, TwoWayNoise};
use crate::seeds::SimRng;

/// Encoding maps `f_i(w, y^{i-1})` and a terminal decoder `g(w, y^n)` for one
/// user of a two-way network.
pub trait AdaptiveScheme: Send + Sync {
    type Message: Copy + PartialEq + std::fmt::Debug + Send + Sync;
    type Estimate: Copy + PartialEq + std::fmt::Debug + Send + Sync;

    fn alphabet(&self) -> Alphabet;
    fn blocklength(&self) -> usize;
    fn accepts(&self, message: Self::Message) -> bool;
    /// Uniform draw from the message set.
    fn sample_message(&self, rng: &mut SimRng) -> Self::Message;
    /// Input at time `history.len() + 1` given everything received so far.
    fn transmit(&self, message: Self::Message, history: &[Symbol]) -> Symbol;
    fn decode(&self, message: Self::Message, received: &[Symbol]) -> Self::Estimate;
}

/// Scheme for a user that sends and receives a single message index.
pub trait UserScheme: AdaptiveScheme<Message = usize, Estimate = usize> {}
impl<T: AdaptiveScheme<Message = usize, Estimate = usize>> UserScheme for T {}

/// Scheme for the broadcasting user of the MA/DBC: sends `(w31, w32)` and
/// recovers `(w13, w23)`.
pub trait HubScheme: AdaptiveScheme<Message = (usize, usize), Estimate = (usize, usize)> {}
impl<T: AdaptiveScheme<Message = (usize, usize), Estimate = (usize, usize)>> HubScheme for T {}

/// `Y1 = X1 + X2 + Z1`, `Y2 = X1 + X2 + Z2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoWayChannel {
    noise: TwoWayNoise,
}

impl TwoWayChannel {
    pub fn new(noise: TwoWayNoise) -> Self {
        Self { noise }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.noise.alphabet()
    }

    pub fn noise(&self) -> &TwoWayNoise {
        &self.noise
    }

    pub fn sample_noise(&self, n: usize, rng: &mut SimRng) -> (Vec<Symbol>, Vec<Symbol>) {
        self.noise.sample(n, rng)
    }
}

/// `Y1 = X1 + X3 + Z1`, `Y2 = X2 + X3 + Z1 + Z2`, `Y3 = X1 + X2 + X3 + Z3`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaDbcChannel {
    z1: IidNoise,
    z2: IidNoise,
    z3: NoiseModel,
}

impl MaDbcChannel {
    pub fn new(z1: IidNoise, z2: IidNoise, z3: NoiseModel) -> Result<Self> {
        let q = z1.alphabet();
        for other in [z2.alphabet(), z3.alphabet()] {
            if other != q {
                return Err(Error::AlphabetMismatch {
                    expected: q.size(),
                    found: other.size(),
                });
            }
        }
        Ok(Self { z1, z2, z3 })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.z1.alphabet()
    }

    pub fn z1(&self) -> &IidNoise {
        &self.z1
    }

    pub fn z2(&self) -> &IidNoise {
        &self.z2
    }

    pub fn z3(&self) -> &NoiseModel {
        &self.z3
    }

    pub fn sample_noise(&self, n: usize, rng: &mut SimRng) -> [Vec<Symbol>; 3] {
        let z1 = self.z1.sample_path(n, rng);
        let z2 = self.z2.sample_path(n, rng);
        let z3 = self.z3.sample_path(n, rng);
        [z1, z2, z3]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoWayMessages {
    pub w1: usize,
    pub w2: usize,
}

/// Complete record of one 2TWC block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoWayTranscript {
    pub q: u8,
    pub messages: TwoWayMessages,
    pub reconstructions: TwoWayMessages,
    pub x1: Vec<Symbol>,
    pub x2: Vec<Symbol>,
    pub y1: Vec<Symbol>,
    pub y2: Vec<Symbol>,
    pub z1: Vec<Symbol>,
    pub z2: Vec<Symbol>,
}

impl TwoWayTranscript {
    /// Re-checks both channel equations at every time index.
    pub fn audit(&self) -> bool {
        let q = match Alphabet::new(self.q) {
            Ok(q) => q,
            Err(_) => return false,
        };
        let n = self.x1.len();
        [&self.x2, &self.y1, &self.y2, &self.z1, &self.z2]
            .iter()
            .all(|v| v.len() == n)
            && (0..n).all(|i| {
                let s = q.add(self.x1[i], self.x2[i]);
                self.y1[i] == q.add(s, self.z1[i]) && self.y2[i] == q.add(s, self.z2[i])
            })
    }

    /// Recomputes every input from the recorded message and strictly earlier
    /// outputs of the same user.
    pub fn causality_audit<S1: UserScheme + ?Sized, S2: UserScheme + ?Sized>(
        &self,
        scheme1: &S1,
        scheme2: &S2,
    ) -> bool {
        (0..self.x1.len()).all(|i| {
            scheme1.transmit(self.messages.w1, &self.y1[..i]) == self.x1[i]
                && scheme2.transmit(self.messages.w2, &self.y2[..i]) == self.x2[i]
        })
    }

    pub fn errors(&self) -> (bool, bool) {
        (
            self.reconstructions.w2 != self.messages.w2,
            self.reconstructions.w1 != self.messages.w1,
        )
    }
}

fn check_scheme<S: AdaptiveScheme + ?Sized>(
    scheme: &S,
    q: Alphabet,
    n: usize,
    message: S::Message,
) -> Result<()> {
    if scheme.alphabet() != q {
        return Err(Error::AlphabetMismatch {
            expected: q.size(),
            found: scheme.alphabet().size(),
        });
    }
    if scheme.blocklength() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: scheme.blocklength(),
        });
    }
    if !scheme.accepts(message) {
        return Err(Error::InvalidCode(format!(
            "message {message:?} not in message set"
        )));
    }
    Ok(())
}

fn check_path(q: Alphabet, n: usize, path: &[Symbol]) -> Result<()> {
    if path.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: path.len(),
        });
    }
    q.check_all(path)
}

/// Runs one block of the two-user two-way channel.
pub fn run_2twc<S1, S2>(
    channel: &TwoWayChannel,
    scheme1: &S1,
    scheme2: &S2,
    w1: usize,
    w2: usize,
    z1: &[Symbol],
    z2: &[Symbol],
) -> Result<TwoWayTranscript>
where
    S1: UserScheme + ?Sized,
    S2: UserScheme + ?Sized,
{
    let q = channel.alphabet();
    let n = scheme1.blocklength();
    check_scheme(scheme1, q, n, w1)?;
    check_scheme(scheme2, q, n, w2)?;
    check_path(q, n, z1)?;
    check_path(q, n, z2)?;

    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    let mut y1 = Vec::with_capacity(n);
    let mut y2 = Vec::with_capacity(n);
    for i in 0..n {
        let a = q.check(scheme1.transmit(w1, &y1))?;
        let b = q.check(scheme2.transmit(w2, &y2))?;
        x1.push(a);
        x2.push(b);
        let sum = q.add(a, b);
        y1.push(q.add(sum, z1[i]));
        y2.push(q.add(sum, z2[i]));
    }
    let reconstructions = TwoWayMessages {
        w2: scheme1.decode(w1, &y1),
        w1: scheme2.decode(w2, &y2),
    };
    Ok(TwoWayTranscript {
        q: q.size(),
        messages: TwoWayMessages { w1, w2 },
        reconstructions,
        x1,
        x2,
        y1,
        y2,
        z1: z1.to_vec(),
        z2: z2.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaDbcMessages {
    pub w13: usize,
    pub w23: usize,
    pub w31: usize,
    pub w32: usize,
}

/// Complete record of one MA/DBC block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaDbcTranscript {
    pub q: u8,
    pub messages: MaDbcMessages,
    pub reconstructions: MaDbcMessages,
    pub x1: Vec<Symbol>,
    pub x2: Vec<Symbol>,
    pub x3: Vec<Symbol>,
    pub y1: Vec<Symbol>,
    pub y2: Vec<Symbol>,
    pub y3: Vec<Symbol>,
    pub z1: Vec<Symbol>,
    pub z2: Vec<Symbol>,
    pub z3: Vec<Symbol>,
}

impl MaDbcTranscript {
    pub fn audit(&self) -> bool {
        let q = match Alphabet::new(self.q) {
            Ok(q) => q,
            Err(_) => return false,
        };
        let n = self.x1.len();
        let lens_ok = [
            &self.x2, &self.x3, &self.y1, &self.y2, &self.y3, &self.z1, &self.z2, &self.z3,
        ]
        .iter()
        .all(|v| v.len() == n);
        lens_ok
            && (0..n).all(|i| {
                let (x1, x2, x3) = (self.x1[i], self.x2[i], self.x3[i]);
                self.y1[i] == q.add(q.add(x1, x3), self.z1[i])
                    && self.y2[i] == q.add(q.add(x2, x3), q.add(self.z1[i], self.z2[i]))
                    && self.y3[i] == q.add(q.add(q.add(x1, x2), x3), self.z3[i])
            })
    }

    pub fn causality_audit<S1, S2, S3>(&self, s1: &S1, s2: &S2, s3: &S3) -> bool
    where
        S1: UserScheme + ?Sized,
        S2: UserScheme + ?Sized,
        S3: HubScheme + ?Sized,
    {
        let m = self.messages;
        (0..self.x1.len()).all(|i| {
            s1.transmit(m.w13, &self.y1[..i]) == self.x1[i]
                && s2.transmit(m.w23, &self.y2[..i]) == self.x2[i]
                && s3.transmit((m.w31, m.w32), &self.y3[..i]) == self.x3[i]
        })
    }

    /// Error flags for the links `(1,2 -> 3)`, `3 -> 1`, `3 -> 2`.
    pub fn errors(&self) -> [bool; 3] {
        let (m, r) = (self.messages, self.reconstructions);
        [
            (m.w13, m.w23) != (r.w13, r.w23),
            m.w31 != r.w31,
            m.w32 != r.w32,
        ]
    }
}

/// Runs one block of the MA/DBC. `noise` is `[z1, z2, z3]`.
pub fn run_madbc<S1, S2, S3>(
    channel: &MaDbcChannel,
    schemes: (&S1, &S2, &S3),
    messages: MaDbcMessages,
    noise: [&[Symbol]; 3],
) -> Result<MaDbcTranscript>
where
    S1: UserScheme + ?Sized,
    S2: UserScheme + ?Sized,
    S3: HubScheme + ?Sized,
{
    let (s1, s2, s3) = schemes;
    let q = channel.alphabet();
    let n = s1.blocklength();
    let m = messages;
    check_scheme(s1, q, n, m.w13)?;
    check_scheme(s2, q, n, m.w23)?;
    check_scheme(s3, q, n, (m.w31, m.w32))?;
    for path in noise {
        check_path(q, n, path)?;
    }
    let [z1, z2, z3] = noise;

    let mut t = MaDbcTranscript {
        q: q.size(),
        messages: m,
        reconstructions: m,
        x1: Vec::with_capacity(n),
        x2: Vec::with_capacity(n),
        x3: Vec::with_capacity(n),
        y1: Vec::with_capacity(n),
        y2: Vec::with_capacity(n),
        y3: Vec::with_capacity(n),
        z1: z1.to_vec(),
        z2: z2.to_vec(),
        z3: z3.to_vec(),
    };
    for i in 0..n {
        let a = q.check(s1.transmit(m.w13, &t.y1))?;
        let b = q.check(s2.transmit(m.w23, &t.y2))?;
        let c = q.check(s3.transmit((m.w31, m.w32), &t.y3))?;
        t.x1.push(a);
        t.x2.push(b);
        t.x3.push(c);
        t.y1.push(q.add(q.add(a, c), z1[i]));
        t.y2.push(q.add(q.add(b, c), q.add(z1[i], z2[i])));
        t.y3.push(q.add(q.add(q.add(a, b), c), z3[i]));
    }
    let (w13, w23) = s3.decode((m.w31, m.w32), &t.y3);
    t.reconstructions = MaDbcMessages {
        w13,
        w23,
        w31: s1.decode(m.w13, &t.y1),
        w32: s2.decode(m.w23, &t.y2),
    };
    Ok(t)
}
