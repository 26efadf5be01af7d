use super::assoc::AssignmentTable;
use super::ppp::PointPattern;
use super::rng::LinkGains;

/// Source of the interferer gains seen by the typical user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterferenceGains {
    /// Independent draws, separate from the association draws.
    #[default]
    Fresh,
    /// The same draws that drove the association decisions.
    Correlated,
}

/// SIR of one user, or a censored sample when no other BS is active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SirSample {
    Finite(f64),
    Censored,
}

impl SirSample {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Finite(x) => Some(x),
            Self::Censored => None,
        }
    }
}

/// SIR with the desired gain `signal` and interferer gains from `gain(bs)`;
/// void BSs and the serving BS are excluded from the interference sum.
pub fn sir_from<F: Fn(usize) -> f64>(
    pattern: &PointPattern,
    table: &AssignmentTable,
    user: usize,
    alpha: f64,
    signal: f64,
    gain: F,
) -> SirSample {
    let pu = pattern.users[user];
    let serving = table.serving()[user] as usize;
    let half_alpha = 0.5 * alpha;
    let w = &pattern.window;
    let path = |b: usize| {
        let d2 = w.dist2(pu, pattern.bs[b]);
        if half_alpha == 2.0 {
            1.0 / (d2 * d2)
        } else {
            d2.powf(-half_alpha)
        }
    };
    let mut interference = 0.0;
    for b in 0..pattern.bs.len() {
        if b == serving || table.is_void(b) {
            continue;
        }
        interference += gain(b) * path(b);
    }
    if interference > 0.0 {
        SirSample::Finite(signal * path(serving) / interference)
    } else {
        SirSample::Censored
    }
}

/// SIR of `user` toward its serving BS.
///
/// The desired link keeps the gain that was drawn for association.
pub fn sir_sample(
    pattern: &PointPattern,
    table: &AssignmentTable,
    user: usize,
    gains: &LinkGains<'_>,
    mode: InterferenceGains,
) -> SirSample {
    let serving = table.serving()[user] as usize;
    let signal = gains.association(user, serving).h;
    let alpha = gains.channel.alpha();
    match mode {
        InterferenceGains::Fresh => sir_from(pattern, table, user, alpha, signal, |b| gains.fresh(user, b)),
        InterferenceGains::Correlated => {
            sir_from(pattern, table, user, alpha, signal, |b| gains.association(user, b).h)
        }
    }
}
