//! Counter-keyed random streams.

use rand::SeedableRng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::channel::{AssociationScheme, ChannelModel, GainSample};

/// Tags separating independent uses of the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    BaseStations = 1,
    Users = 2,
    AssociationGain = 3,
    InterferenceGain = 4,
    Probes = 5,
    TypicalUsers = 6,
    Conservation = 7,
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for the stream identified by `(seed, stream, a, b, c)`.
#[inline]
pub fn stream_rng(seed: u64, stream: Stream, a: u64, b: u64, c: u64) -> Xoshiro256PlusPlus {
    let k = mix(mix(mix(mix(seed ^ (stream as u64).rotate_left(56)) ^ a) ^ b) ^ c);
    Xoshiro256PlusPlus::seed_from_u64(k)
}

/// Per-link gain draws of one trial, regenerated on demand.
#[derive(Debug, Clone)]
pub struct LinkGains<'a> {
    pub channel: &'a ChannelModel,
    pub scheme: &'a AssociationScheme,
    pub seed: u64,
    pub trial: u64,
}

impl LinkGains<'_> {
    /// Gain and weight of the `(user, bs)` link used for association and as
    /// the desired signal.
    #[inline]
    pub fn association(&self, user: usize, bs: usize) -> GainSample {
        let mut rng = stream_rng(self.seed, Stream::AssociationGain, self.trial, user as u64, bs as u64);
        let h = self.channel.sample_h(&mut rng);
        let w = self.scheme.sample_weight(h, &mut rng);
        GainSample { h, w }
    }

    /// `ln(w·h)` of the association draw, computed without leaving log space.
    #[inline]
    pub fn log_mark(&self, user: usize, bs: usize) -> f64 {
        let mut rng = stream_rng(self.seed, Stream::AssociationGain, self.trial, user as u64, bs as u64);
        let x: f64 = Exp1.sample(&mut rng);
        let ln_s = if self.channel.sigma_s() == 0.0 {
            self.channel.mu_s()
        } else {
            let z: f64 = StandardNormal.sample(&mut rng);
            self.channel.mu_s() + self.channel.sigma_s() * z
        };
        let ln_h = x.ln() + ln_s;
        match self.scheme {
            AssociationScheme::NearestBs => 0.0,
            AssociationScheme::MaxReceivedPower => ln_h,
            AssociationScheme::GeneralWeighted(law) => ln_h + law.sample(&mut rng).ln(),
        }
    }

    /// Channel gain of the `(user, bs)` link drawn independently of association.
    #[inline]
    pub fn fresh(&self, user: usize, bs: usize) -> f64 {
        let mut rng = stream_rng(self.seed, Stream::InterferenceGain, self.trial, user as u64, bs as u64);
        self.channel.sample_h(&mut rng)
    }
}
