//! Monte Carlo estimation of block error probabilities.
//!
//! Trial `t` draws its messages and then its noise from stream `t` of the
//! experiment seed, so any single trial can be replayed in isolation.

use super::{add_counts, check_trials, TrialReport, CHUNK};
use crate::channels::{
    run_2twc, run_madbc, HubScheme, MaDbcChannel, MaDbcMessages, MaDbcTranscript, TwoWayChannel,
    TwoWayTranscript, UserScheme,
};
use crate::error::Result;
use crate::parallel::Execution;
use crate::seeds::unit_rng;

/// Trial `t` of [`monte_carlo_2twc`].
pub fn replay_2twc<S1, S2>(
    channel: &TwoWayChannel,
    s1: &S1,
    s2: &S2,
    seed: u64,
    t: u64,
) -> Result<TwoWayTranscript>
where
    S1: UserScheme + ?Sized,
    S2: UserScheme + ?Sized,
{
    let mut rng = unit_rng(seed, t);
    let w1 = s1.sample_message(&mut rng);
    let w2 = s2.sample_message(&mut rng);
    let (z1, z2) = channel.sample_noise(s1.blocklength(), &mut rng);
    run_2twc(channel, s1, s2, w1, w2, &z1, &z2)
}

/// Error rates of user 1 decoding `W2` (`P_e1`) and user 2 decoding `W1`
/// (`P_e2`) with uniform independent messages.
pub fn monte_carlo_2twc<S1, S2>(
    channel: &TwoWayChannel,
    s1: &S1,
    s2: &S2,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<TrialReport>
where
    S1: UserScheme + ?Sized,
    S2: UserScheme + ?Sized,
{
    check_trials(trials)?;
    let chunks = exec.map_chunks(trials, CHUNK, |range| {
        let mut counts = [0u64; 2];
        for t in range {
            let (e1, e2) = replay_2twc(channel, s1, s2, seed, t)?.errors();
            counts[0] += u64::from(e1);
            counts[1] += u64::from(e2);
        }
        Ok(counts)
    });
    let counts = add_counts(chunks)?;
    Ok(TrialReport::from_counts(
        &["pe1", "pe2"],
        &counts,
        trials,
        seed,
        None,
    ))
}

/// Trial `t` of [`monte_carlo_madbc`].
pub fn replay_madbc<S1, S2, S3>(
    channel: &MaDbcChannel,
    schemes: (&S1, &S2, &S3),
    seed: u64,
    t: u64,
) -> Result<MaDbcTranscript>
where
    S1: UserScheme + ?Sized,
    S2: UserScheme + ?Sized,
    S3: HubScheme + ?Sized,
{
    let (s1, s2, s3) = schemes;
    let mut rng = unit_rng(seed, t);
    let w13 = s1.sample_message(&mut rng);
    let w23 = s2.sample_message(&mut rng);
    let (w31, w32) = s3.sample_message(&mut rng);
    let [z1, z2, z3] = channel.sample_noise(s1.blocklength(), &mut rng);
    let messages = MaDbcMessages { w13, w23, w31, w32 };
    run_madbc(channel, schemes, messages, [&z1, &z2, &z3])
}

/// Error rates of the multiple-access pair at user 3 (`P_e3`) and of the
/// broadcast messages at users 1 and 2.
pub fn monte_carlo_madbc<S1, S2, S3>(
    channel: &MaDbcChannel,
    schemes: (&S1, &S2, &S3),
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<TrialReport>
where
    S1: UserScheme + ?Sized,
    S2: UserScheme + ?Sized,
    S3: HubScheme + ?Sized,
{
    check_trials(trials)?;
    let chunks = exec.map_chunks(trials, CHUNK, |range| {
        let mut counts = [0u64; 3];
        for t in range {
            let errs = replay_madbc(channel, schemes, seed, t)?.errors();
            for (c, e) in counts.iter_mut().zip(errs) {
                *c += u64::from(e);
            }
        }
        Ok(counts)
    });
    let counts = add_counts(chunks)?;
    Ok(TrialReport::from_counts(
        &["pe3", "w31", "w32"],
        &counts,
        trials,
        seed,
        None,
    ))
}
