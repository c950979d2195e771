//! Pump events: what gets injected when.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Acid,
    Base,
}

/// One pump event: `species` injected from `start` for `duration`
/// seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Injection {
    pub start: f64,
    pub duration: f64,
    pub species: Species,
}

impl Injection {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

/// Pump events sorted by start time, durations positive.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InjectionSchedule {
    events: Vec<Injection>,
}

impl InjectionSchedule {
    pub fn new(mut events: Vec<Injection>) -> Self {
        assert!(
            events.iter().all(|e| e.duration > 0.0 && e.start >= 0.0),
            "injection durations must be positive and starts non-negative"
        );
        events.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
        InjectionSchedule { events }
    }

    pub fn events(&self) -> &[Injection] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// End time of the last event, 0 for an empty schedule.
    pub fn last_end(&self) -> f64 {
        self.events.iter().map(|e| e.end()).fold(0.0, f64::max)
    }

    /// Species actively pumping at time `t` (events may in principle
    /// overlap; both species can be live at once).
    pub fn active_at(&self, t: f64) -> (bool, bool) {
        let mut acid = false;
        let mut base = false;
        for e in &self.events {
            if e.start > t {
                break;
            }
            if t < e.end() {
                match e.species {
                    Species::Acid => acid = true,
                    Species::Base => base = true,
                }
            }
        }
        (acid, base)
    }
}

/// Frame timing in seconds, the slice of transmit framing the channel
/// backends need. Converted from the modem's frame specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTiming {
    pub injection_s: f64,
    pub symbol_s: f64,
    pub sync_injection_s: f64,
    pub sync_silence_s: f64,
}

impl FrameTiming {
    /// Time the first data symbol starts, transmitter clock.
    pub fn preamble_end(&self) -> f64 {
        self.sync_injection_s + self.sync_silence_s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn events_sort_by_start() {
        let s = InjectionSchedule::new(vec![
            Injection {
                start: 1.0,
                duration: 0.03,
                species: Species::Base,
            },
            Injection {
                start: 0.0,
                duration: 0.1,
                species: Species::Acid,
            },
        ]);
        assert_eq!(s.events()[0].start, 0.0);
        assert_eq!(s.last_end(), 1.03);
    }

    #[test]
    fn active_lookup_honors_half_open_interval() {
        let s = InjectionSchedule::new(vec![Injection {
            start: 1.0,
            duration: 0.03,
            species: Species::Acid,
        }]);
        assert_eq!(s.active_at(0.99), (false, false));
        assert_eq!(s.active_at(1.0), (true, false));
        assert_eq!(s.active_at(1.029), (true, false));
        assert_eq!(s.active_at(1.03), (false, false));
    }
}
