use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

/// Time source for rate limiting, backoff and record timestamps.
pub trait Clock: Send + Sync {
    /// Monotonic time since an arbitrary origin.
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
    fn unix_seconds(&self) -> u64;
}

#[derive(Debug)]
pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock {
            origin: Instant::now(),
        }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }

    fn unix_seconds(&self) -> u64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    }
}

/// A clock that only moves when slept on or advanced explicitly.
#[derive(Debug, Default)]
pub struct FakeClock {
    now: Mutex<Duration>,
    sleeps: Mutex<Vec<Duration>>,
}

impl FakeClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&self, d: Duration) {
        *self.now.lock().unwrap() += d;
    }

    pub fn sleeps(&self) -> Vec<Duration> {
        self.sleeps.lock().unwrap().clone()
    }
}

impl Clock for FakeClock {
    fn now(&self) -> Duration {
        *self.now.lock().unwrap()
    }

    fn sleep(&self, d: Duration) {
        self.sleeps.lock().unwrap().push(d);
        self.advance(d);
    }

    fn unix_seconds(&self) -> u64 {
        self.now().as_secs()
    }
}

/// Sliding-window limiter: at most `capacity` calls in any window of
/// `window`, where capacity is `max(1, floor(rate))` and the window is
/// `max(1s, capacity / rate)`.
#[derive(Debug)]
pub struct RateLimiter {
    capacity: usize,
    window: Duration,
    recent: Mutex<VecDeque<Duration>>,
}

impl RateLimiter {
    /// `rate` is in requests per second and must be positive.
    pub fn new(rate: f64) -> Self {
        assert!(rate > 0.0 && rate.is_finite(), "rate limit must be positive");
        let capacity = (rate.floor() as usize).max(1);
        let window = Duration::from_secs_f64((capacity as f64 / rate).max(1.0));
        RateLimiter {
            capacity,
            window,
            recent: Mutex::new(VecDeque::with_capacity(capacity)),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn window(&self) -> Duration {
        self.window
    }

    /// Blocks on `clock` until a call is allowed, then records it.
    pub fn acquire(&self, clock: &dyn Clock) {
        let mut recent = self.recent.lock().unwrap();
        let mut now = clock.now();
        while recent
            .front()
            .is_some_and(|&t| now.saturating_sub(t) >= self.window)
        {
            recent.pop_front();
        }
        if recent.len() == self.capacity {
            let oldest = recent.pop_front().expect("capacity is at least 1");
            let wait = self.window - now.saturating_sub(oldest);
            clock.sleep(wait);
            now = clock.now();
        }
        recent.push_back(now);
    }
}
