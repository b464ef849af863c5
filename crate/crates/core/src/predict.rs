//! Slope-predicted endpoint extension.
//!
//! A step of width `L` on a rasterized straight boundary constrains the
//! boundary slope to the open interval `(1/(L+1), 1/(L-1))`, so the next
//! step can only be `L-1`, `L` or `L+1` pixels wide — and once two distinct
//! widths have been seen, every further step must reuse one of them. The
//! search below exploits that: instead of walking the boundary pixel by
//! pixel it probes only the handful of positions where the next endpoint
//! can legally sit, verifying that the crossing pattern there matches the
//! original endpoint's.
//!
//! Probe accounting follows the pattern-lookup granularity: one probe
//! resolves two adjacent candidate positions (the candidates for `L-1`/`L`,
//! or for the pinned pair, are neighbors). A search with budget `N` costs
//! at most `N + 2` probes.

use crate::error::{Error, Result};
use crate::runs::{CrossingPattern, Dir, Orientation, Run, RunCache};

/// Upper limit on loop iterations (steps absorbed) per direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget(pub u32);

impl SearchBudget {
    pub fn cycles(self) -> u32 {
        self.0
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget(4)
    }
}

/// Counts boundary-pattern probes during one search. Monotone by
/// construction: it only exposes increment.
#[derive(Debug, Default, Clone)]
pub struct ProbeCounter {
    pattern_probes: u64,
}

impl ProbeCounter {
    pub fn new() -> Self {
        ProbeCounter::default()
    }

    #[inline]
    pub fn record(&mut self) {
        self.pattern_probes += 1;
    }

    pub fn count(&self) -> u64 {
        self.pattern_probes
    }
}

/// Search phase: before the second admissible width is known, candidates
/// are `{L, L-1, L+1}`; after pinning they narrow to `{L, L'}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Unpinned,
    Pinned,
}

/// Width pair tracked by an ongoing search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepWidthState {
    l: u32,
    l_prime: Option<u32>,
}

impl StepWidthState {
    pub fn new(l: u32) -> Self {
        debug_assert!(l >= 1);
        StepWidthState { l, l_prime: None }
    }

    pub fn pin(&mut self, l_prime: u32) {
        debug_assert!(l_prime.abs_diff(self.l) == 1, "pinned width must differ by 1");
        self.l_prime = Some(l_prime);
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn l_prime(&self) -> Option<u32> {
        self.l_prime
    }

    pub fn phase(&self) -> Phase {
        if self.l_prime.is_some() {
            Phase::Pinned
        } else {
            Phase::Unpinned
        }
    }
}

/// Open interval of slopes admitting a step of width `l`. For `l == 1` the
/// upper bound is unbounded; the orientation split already confines slopes
/// to one octant.
pub fn admissible_slope_interval(l: u32) -> (f64, f64) {
    assert!(l >= 1, "step width must be at least 1");
    let lower = 1.0 / (l as f64 + 1.0);
    let upper = if l == 1 { f64::INFINITY } else { 1.0 / (l as f64 - 1.0) };
    (lower, upper)
}

/// True iff one straight boundary could have produced every width in the
/// sequence: the open slope intervals of all widths share a common point.
/// Evaluated in exact integer arithmetic.
pub fn widths_consistent(widths: &[u32]) -> bool {
    assert!(!widths.is_empty(), "width sequence must be nonempty");
    let min = *widths.iter().min().unwrap() as i64;
    let max = *widths.iter().max().unwrap() as i64;
    // The tightest lower bound 1/(min+1) comes from the narrowest step and
    // the tightest upper bound 1/(max-1) from the widest; width-1 steps
    // contribute an unbounded upper limit. The open intersection is
    // nonempty iff 1/(min+1) < 1/(max-1), i.e. max - 1 < min + 1 after
    // cross-multiplying by the positive denominators.
    max == 1 || max - 1 < min + 1
}

/// One endpoint of a cached run: everything a probe needs to know about
/// where a search currently stands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunEndRef {
    pub orientation: Orientation,
    /// Perpendicular coordinate of the boundary line the run lies on.
    pub line: i64,
    /// Axis coordinate of the endpoint.
    pub pos: i64,
    /// Crossing pattern at this endpoint; probes look for its repetition.
    pub pattern: CrossingPattern,
}

impl RunEndRef {
    pub fn of(run: &Run, dir: Dir) -> RunEndRef {
        RunEndRef {
            orientation: run.orientation,
            line: run.line as i64,
            pos: run.end_pos(dir) as i64,
            pattern: run.end_pattern(dir),
        }
    }
}

/// Corrected endpoint returned by [`extend_endpoint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrectedEndpoint {
    /// Axis coordinate of the verified endpoint.
    pub position: i64,
    /// Steps absorbed; the endpoint line is the start line shifted by this
    /// many rows in the crossing direction.
    pub steps_absorbed: u32,
    /// Pattern probes spent; at most `N + 2`.
    pub probes_used: u32,
    /// Second admissible width, once observed.
    pub pinned_width: Option<u32>,
}

/// Looks for a run endpoint with the expected crossing pattern at
/// `from.pos + dir * l_candidate`, one line over in the crossing direction.
/// Always costs one probe; out-of-image positions simply fail.
pub fn probe_step_end(
    cache: &RunCache,
    from: &RunEndRef,
    l_candidate: u32,
    dir: Dir,
    expected: CrossingPattern,
    counter: &mut ProbeCounter,
) -> bool {
    counter.record();
    let Some(shift) = from.pattern.line_shift() else {
        return false;
    };
    if l_candidate == 0 {
        return false;
    }
    let line = from.line + shift;
    let pos = from.pos + dir.step() * l_candidate as i64;
    cache
        .run_ending_at(from.orientation, line, pos, dir)
        .is_some_and(|run| run.end_pattern(dir) == expected)
}

/// Pattern check shared by the paired probes: no counting, no zero widths.
#[inline]
fn end_matches(
    cache: &RunCache,
    orientation: Orientation,
    line: i64,
    pos: i64,
    dir: Dir,
    expected: CrossingPattern,
) -> bool {
    cache
        .run_ending_at(orientation, line, pos, dir)
        .is_some_and(|run| run.end_pattern(dir) == expected)
}

/// Extends a run endpoint across subsequent steps.
///
/// Phase one probes candidate widths in the order `L, L-1, L+1`; a hit on
/// `L` keeps phase one going, a hit on a neighbor width pins it as `L'` and
/// enters phase two, which probes only `{L, L'}`. The search returns at the
/// first position where no candidate matches or when the budget is spent.
/// Candidate pairs at adjacent positions share one probe, which is what
/// bounds the total at `N + 2`.
pub fn extend_endpoint(
    cache: &RunCache,
    start: &RunEndRef,
    l: u32,
    dir: Dir,
    budget: SearchBudget,
) -> CorrectedEndpoint {
    let mut counter = ProbeCounter::new();
    let n = budget.cycles();
    let done = |pos: i64, steps: u32, counter: &ProbeCounter, state: &StepWidthState| {
        let probes = counter.count() as u32;
        debug_assert!(probes <= n + 2, "probe budget exceeded: {probes} > {n} + 2");
        CorrectedEndpoint {
            position: pos,
            steps_absorbed: steps,
            probes_used: probes,
            pinned_width: state.l_prime(),
        }
    };

    let mut state = StepWidthState::new(l.max(1));
    let expected = start.pattern;
    let mut cur = *start;
    let mut steps = 0u32;

    let Some(shift) = expected.line_shift() else {
        // Open or doubled crossings give the predictor nothing to match.
        return done(cur.pos, 0, &counter, &state);
    };

    let advance = |cur: &mut RunEndRef, width: u32| {
        cur.line += shift;
        cur.pos += dir.step() * width as i64;
    };

    // Phase one: candidates L, L-1, L+1.
    while steps < n && state.phase() == Phase::Unpinned {
        let line = cur.line + shift;
        let at = |w: u32| cur.pos + dir.step() * w as i64;
        // One probe covers the adjacent candidate positions for L-1 and L.
        counter.record();
        let hit_l = end_matches(cache, cur.orientation, line, at(state.l()), dir, expected);
        let hit_lm1 = state.l() > 1
            && end_matches(cache, cur.orientation, line, at(state.l() - 1), dir, expected);
        if hit_l {
            advance(&mut cur, state.l());
            steps += 1;
            continue;
        }
        if hit_lm1 {
            let w = state.l() - 1;
            advance(&mut cur, w);
            steps += 1;
            state.pin(w);
            break;
        }
        // Second probe covers the L+1 position.
        counter.record();
        if end_matches(cache, cur.orientation, line, at(state.l() + 1), dir, expected) {
            let w = state.l() + 1;
            advance(&mut cur, w);
            steps += 1;
            state.pin(w);
            break;
        }
        return done(cur.pos, steps, &counter, &state);
    }

    // Phase two: candidates L and the pinned L', adjacent by construction.
    if let Some(l_prime) = state.l_prime() {
        while steps < n {
            let line = cur.line + shift;
            counter.record();
            let hit_l = end_matches(
                cache,
                cur.orientation,
                line,
                cur.pos + dir.step() * state.l() as i64,
                dir,
                expected,
            );
            let hit_lp = end_matches(
                cache,
                cur.orientation,
                line,
                cur.pos + dir.step() * l_prime as i64,
                dir,
                expected,
            );
            if hit_l {
                advance(&mut cur, state.l());
                steps += 1;
            } else if hit_lp {
                advance(&mut cur, l_prime);
                steps += 1;
            } else {
                break;
            }
        }
    }

    done(cur.pos, steps, &counter, &state)
}

/// Convenience wrapper: validates that the endpoint belongs to the run and
/// that prediction applies (single crossing, width above one).
pub fn extend_run_end(
    cache: &RunCache,
    run: &Run,
    dir: Dir,
    budget: SearchBudget,
) -> Result<CorrectedEndpoint> {
    if run.len() < 2 {
        return Err(Error::contract(
            "width-1 runs are excluded from slope prediction",
        ));
    }
    let end = RunEndRef::of(run, dir);
    if !end.pattern.is_single_crossing() {
        return Err(Error::contract(
            "endpoint has no single crossing to match",
        ));
    }
    Ok(extend_endpoint(cache, &end, run.len(), dir, budget))
}
