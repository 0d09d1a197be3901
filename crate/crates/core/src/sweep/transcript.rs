//! Change transcripts of unit-ball intersections under insertions and deletions.
//!
//! A state is `Option<ArcChain>`: `None` stands for `bi(∅)`, the whole plane.

use crate::arcgeom::{chain_clip_labeled, ArcChain, ChainEdit, Circle};
use crate::error::{GeomError, Result};
use crate::norm::{Gauge, Vec2};

#[derive(Debug, Clone, PartialEq)]
pub enum StepEdit {
    /// Whole plane to a chain.
    Start(ArcChain),
    /// Chain back to the whole plane.
    Release,
    Edit(ChainEdit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub point: usize,
    pub edit: StepEdit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub initial: Option<ArcChain>,
    pub steps: Vec<Step>,
    /// Index of the first step after which the chain is empty.
    pub emptied: Option<usize>,
}

impl Transcript {
    pub fn apply_step(&self, state: &Option<ArcChain>, k: usize) -> Result<Option<ArcChain>> {
        match (&self.steps[k].edit, state) {
            (StepEdit::Start(c), None) => Ok(Some(c.clone())),
            (StepEdit::Release, Some(_)) => Ok(None),
            (StepEdit::Edit(e), Some(c)) => e.apply(c).map(Some),
            _ => Err(GeomError::Internal("transcript step does not match state".into())),
        }
    }

    /// Every intermediate state, starting with `initial`.
    pub fn replay(&self) -> Result<Vec<Option<ArcChain>>> {
        let mut states = vec![self.initial.clone()];
        for k in 0..self.steps.len() {
            let next = self.apply_step(states.last().unwrap(), k)?;
            states.push(next);
        }
        Ok(states)
    }

    pub fn final_state(&self) -> Result<Option<ArcChain>> {
        let mut s = self.initial.clone();
        for k in 0..self.steps.len() {
            s = self.apply_step(&s, k)?;
        }
        Ok(s)
    }

    pub fn edit_size(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match &s.edit {
                StepEdit::Start(c) => c.arcs().len().max(1),
                StepEdit::Release => 1,
                StepEdit::Edit(e) => e.size(),
            })
            .sum()
    }
}

fn insert(g: &Gauge, state: &Option<ArcChain>, label: usize, p: Vec2) -> (Option<ArcChain>, StepEdit, StepEdit) {
    let disc = Circle { center: p, radius: 1.0 };
    match state {
        None => {
            let c = ArcChain::disc(g, disc, Some(label));
            (Some(c.clone()), StepEdit::Start(c), StepEdit::Release)
        }
        Some(c) => {
            let res = chain_clip_labeled(g, c, &disc, Some(label));
            let inv = StepEdit::Edit(res.edit.inverse(c));
            (Some(res.chain), StepEdit::Edit(res.edit), inv)
        }
    }
}

/// Incremental `bi(A, 1)` as points `(label, position)` arrive. Once the
/// chain is empty, later insertions are no-ops and are not recorded.
pub fn insertion_transcript(g: &Gauge, points: &[(usize, Vec2)]) -> Transcript {
    insertion_transcript_from(g, None, points)
}

pub fn insertion_transcript_from(g: &Gauge, initial: Option<ArcChain>, points: &[(usize, Vec2)]) -> Transcript {
    let mut state = initial.clone();
    let mut steps = Vec::with_capacity(points.len());
    let mut emptied = None;
    for &(label, p) in points {
        if matches!(state, Some(ArcChain::Empty)) {
            break;
        }
        let (next, edit, _) = insert(g, &state, label, p);
        steps.push(Step { point: label, edit });
        state = next;
        if matches!(state, Some(ArcChain::Empty)) {
            emptied = Some(steps.len() - 1);
        }
    }
    Transcript { initial, steps, emptied }
}

/// Forward transcript of `bi(D, 1)` as `deletions` leave D in order; the
/// points of `stat` are never deleted.
///
/// Built backwards: starting from `bi(stat)` the deleted points are inserted
/// in reverse order and each edit's inverse is recorded.
pub fn deletion_transcript(g: &Gauge, stat: &[(usize, Vec2)], deletions: &[(usize, Vec2)]) -> Transcript {
    let mut state: Option<ArcChain> = None;
    for &(label, p) in stat {
        state = insert(g, &state, label, p).0;
        if matches!(state, Some(ArcChain::Empty)) {
            break;
        }
    }
    if matches!(state, Some(ArcChain::Empty)) {
        // the static part alone is empty: every state is empty
        return Transcript {
            initial: Some(ArcChain::Empty),
            steps: deletions
                .iter()
                .map(|&(label, _)| Step { point: label, edit: StepEdit::Edit(ChainEdit::Unchanged) })
                .collect(),
            emptied: None,
        };
    }
    let mut inverses: Vec<Step> = Vec::with_capacity(deletions.len());
    for &(label, p) in deletions.iter().rev() {
        if matches!(state, Some(ArcChain::Empty)) {
            // inserting into an empty chain changes nothing, so neither does undoing it
            inverses.push(Step { point: label, edit: StepEdit::Edit(ChainEdit::Unchanged) });
            continue;
        }
        let (next, _, inv) = insert(g, &state, label, p);
        inverses.push(Step { point: label, edit: inv });
        state = next;
    }
    inverses.reverse();
    Transcript {
        initial: state,
        steps: inverses,
        emptied: None,
    }
}
