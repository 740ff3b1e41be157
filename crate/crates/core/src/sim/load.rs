use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear user ramp followed by a sustained plateau.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoadProfile {
    /// Seconds.
    pub total_duration: u64,
    /// Seconds.
    pub ramp_duration: u64,
    pub peak_users: u32,
    /// Users added per second during the ramp.
    pub spawn_rate: f64,
}

impl Default for LoadProfile {
    /// 15 minute test: 600 users spawned at 2/s over the first 5 minutes,
    /// then 10 minutes at full load.
    fn default() -> Self {
        LoadProfile {
            total_duration: 900,
            ramp_duration: 300,
            peak_users: 600,
            spawn_rate: 2.0,
        }
    }
}

impl LoadProfile {
    pub fn validate(&self) -> Result<()> {
        if self.total_duration == 0 {
            return Err(Error::Config("load.total_duration must be positive".into()));
        }
        if self.ramp_duration > self.total_duration {
            return Err(Error::Config("load.ramp_duration exceeds total_duration".into()));
        }
        if self.spawn_rate.is_nan() || self.spawn_rate < 0.0 {
            return Err(Error::Config("load.spawn_rate must be non-negative".into()));
        }
        if f64::from(self.peak_users) > self.spawn_rate * self.ramp_duration as f64 {
            return Err(Error::Config(
                "load.peak_users unreachable within ramp_duration at spawn_rate".into(),
            ));
        }
        Ok(())
    }

    /// No users at all; useful for idle-cluster checks.
    pub fn idle(total_duration: u64) -> Self {
        LoadProfile {
            total_duration,
            ramp_duration: 0,
            peak_users: 0,
            spawn_rate: 0.0,
        }
    }
}

pub fn users_at(profile: &LoadProfile, t: u64) -> Result<u32> {
    if t > profile.total_duration {
        return Err(Error::TimeOutOfRange {
            t,
            total: profile.total_duration,
        });
    }
    if t < profile.ramp_duration {
        let spawned = (t as f64 * profile.spawn_rate).floor();
        Ok(spawned.min(f64::from(profile.peak_users)) as u32)
    } else {
        Ok(profile.peak_users)
    }
}
