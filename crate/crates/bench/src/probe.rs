use std::time::Instant;

use fastcaputo::SolveOutcome;

use crate::error::Result;

/// Cost figures of one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    /// Wall-clock seconds of the solve alone.
    pub seconds: f64,
    pub retained_values: usize,
    pub quadrature_len: Option<usize>,
}

pub fn timing_and_memory_probe<F>(run: F) -> Result<(SolveOutcome, Probe)>
where
    F: FnOnce() -> fastcaputo::Result<SolveOutcome>,
{
    let start = Instant::now();
    let outcome = run()?;
    let seconds = start.elapsed().as_secs_f64();
    let probe = Probe {
        seconds,
        retained_values: outcome.retained_values,
        quadrature_len: outcome.quadrature_len,
    };
    Ok((outcome, probe))
}

/// Smallest wall-clock time over `repeats` runs; the minimum is the least
/// noisy estimate on a shared machine.
pub fn min_seconds<F>(repeats: usize, mut run: F) -> Result<f64>
where
    F: FnMut() -> fastcaputo::Result<SolveOutcome>,
{
    let mut best = f64::INFINITY;
    for _ in 0..repeats.max(1) {
        let (_, probe) = timing_and_memory_probe(&mut run)?;
        best = best.min(probe.seconds);
    }
    Ok(best)
}
