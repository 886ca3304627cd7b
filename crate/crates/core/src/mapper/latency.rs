//! Latency model: every layer costs one gate time, every non-local operation
//! `multiplier` gate times.

/// Nanoseconds per gate layer.
pub const GATE_NS: f64 = 300.0;

/// Multipliers reported by default.
pub const REPORT_MULTIPLIERS: [f64; 3] = [5.0, 10.0, 100.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatencyEstimate {
    /// Non-local operations performed one after another.
    pub sequential_ns: f64,
    /// Independent non-local operations overlapped; only dependent rounds add up.
    pub parallel_ns: f64,
}

impl LatencyEstimate {
    pub fn sequential_us(&self) -> f64 {
        self.sequential_ns / 1000.0
    }

    pub fn parallel_us(&self) -> f64 {
        self.parallel_ns / 1000.0
    }
}

pub fn latency_estimate(
    depth: usize,
    cost: usize,
    rounds: usize,
    multiplier: f64,
) -> LatencyEstimate {
    let base = depth as f64 * GATE_NS;
    LatencyEstimate {
        sequential_ns: base + cost as f64 * multiplier * GATE_NS,
        parallel_ns: base + rounds as f64 * multiplier * GATE_NS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_communication_is_depth_only() {
        let l = latency_estimate(10, 0, 0, 100.0);
        assert_eq!(l.sequential_ns, 3000.0);
        assert_eq!(l.parallel_ns, 3000.0);
    }

    #[test]
    fn rounds_never_exceed_cost() {
        let l = latency_estimate(4, 6, 2, 10.0);
        assert_eq!(l.sequential_ns, 1200.0 + 18000.0);
        assert_eq!(l.parallel_ns, 1200.0 + 6000.0);
        assert!(l.parallel_ns <= l.sequential_ns);
    }
}
