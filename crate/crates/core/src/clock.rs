//! Injected time source.
//!
//! The core crate never reads wall time itself; callers that want stage
//! timings or millisecond budgets pass a [`Clock`]. Tests and deterministic
//! runs use [`NullClock`], under which all reported durations are zero and
//! time budgets never expire.

pub trait Clock {
    /// Milliseconds since an arbitrary fixed origin.
    fn now_millis(&self) -> u64;
}

/// A clock that never advances.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now_millis(&self) -> u64 {
        0
    }
}
