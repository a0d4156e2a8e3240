//! Finite non-transitive frames, valuations and (multi-agent) models.
//!
//! Two frame shapes are supported:
//!
//! * [`UniformWindowFrame`]: worlds `0..W` on a line, every world `a` sees
//!   `[a, a + m]`. It stands for the initial segment of the infinite frame
//!   with uniform intransitivity `m`, so `Next` is undefined at the last world.
//! * [`FiniteLassoFrame`]: worlds `0..W` whose `Next` chain ends with a back
//!   edge `W-1 -> L`. World `a` sees the `d_a + 1` worlds reached from `a` by
//!   `0..=d_a` steps of `Next`, wrapping through the back edge.
//!
//! Worlds are limited to [`MAX_WORLDS`] so that sets of worlds fit a `u64`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// Largest supported frame.
pub const MAX_WORLDS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("a frame needs at least one world")]
    NoWorlds,
    #[error("{0} worlds exceed the supported maximum of {MAX_WORLDS}")]
    TooManyWorlds(usize),
    #[error("the intransitivity measure must be positive")]
    ZeroMeasure,
    #[error("loop target {loop_target} is not a world of a {worlds}-world frame")]
    LoopOutOfRange { loop_target: usize, worlds: usize },
    #[error("expected {expected} reach lengths, got {got}")]
    ReachLength { expected: usize, got: usize },
    #[error("reach length at world {world} must be at least 1")]
    ReachTooShort { world: usize },
    #[error("reach length {reach} at world {world} exceeds the frame size {worlds}")]
    ReachTooLong { world: usize, reach: usize, worlds: usize },
    #[error("reach lengths must not decrease along the prefix (world {world})")]
    NotMonotone { world: usize },
    #[error("letter `{letter}` is assigned world {world}, but the frame has {worlds} worlds")]
    WorldOutOfRange { letter: String, world: usize, worlds: usize },
    #[error("a multi-agent model needs at least one agent")]
    NoAgents,
    #[error("agent `{0}` appears twice")]
    DuplicateAgent(String),
}

fn check_world_count(worlds: usize) -> Result<(), FrameError> {
    match worlds {
        0 => Err(FrameError::NoWorlds),
        w if w > MAX_WORLDS => Err(FrameError::TooManyWorlds(w)),
        _ => Ok(()),
    }
}

/// Initial segment `0..W` of the frame with uniform window length `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniformWindowFrame {
    worlds: usize,
    measure: usize,
}

impl UniformWindowFrame {
    pub fn new(worlds: usize, measure: usize) -> Result<Self, FrameError> {
        check_world_count(worlds)?;
        if measure == 0 {
            return Err(FrameError::ZeroMeasure);
        }
        Ok(UniformWindowFrame { worlds, measure })
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn measure(&self) -> usize {
        self.measure
    }

    pub fn next(&self, a: usize) -> Option<usize> {
        (a + 1 < self.worlds).then_some(a + 1)
    }

    /// `[a, min(a + m, W - 1)]`.
    pub fn window(&self, a: usize) -> Vec<usize> {
        (a..=(a + self.measure).min(self.worlds - 1)).collect()
    }
}

/// Finite lasso frame with per-world reach lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteLassoFrame {
    worlds: usize,
    loop_target: usize,
    reach: Vec<usize>,
}

impl FiniteLassoFrame {
    /// Checks `L < W`, `1 <= d_i <= W` and `d_i <= d_(i+1)` along the prefix.
    pub fn new(worlds: usize, loop_target: usize, reach: Vec<usize>) -> Result<Self, FrameError> {
        check_world_count(worlds)?;
        if loop_target >= worlds {
            return Err(FrameError::LoopOutOfRange { loop_target, worlds });
        }
        if reach.len() != worlds {
            return Err(FrameError::ReachLength {
                expected: worlds,
                got: reach.len(),
            });
        }
        for (world, &d) in reach.iter().enumerate() {
            if d == 0 {
                return Err(FrameError::ReachTooShort { world });
            }
            if d > worlds {
                return Err(FrameError::ReachTooLong {
                    world,
                    reach: d,
                    worlds,
                });
            }
        }
        if let Some(world) = reach.windows(2).position(|w| w[1] < w[0]) {
            return Err(FrameError::NotMonotone { world: world + 1 });
        }
        Ok(FiniteLassoFrame {
            worlds,
            loop_target,
            reach,
        })
    }

    /// Frame with the same reach length `d` at every world.
    pub fn constant_reach(worlds: usize, loop_target: usize, d: usize) -> Result<Self, FrameError> {
        Self::new(worlds, loop_target, vec![d; worlds])
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn loop_target(&self) -> usize {
        self.loop_target
    }

    pub fn reach(&self) -> &[usize] {
        &self.reach
    }

    pub fn next(&self, a: usize) -> usize {
        if a + 1 < self.worlds {
            a + 1
        } else {
            self.loop_target
        }
    }

    /// World reached from `a` after `j` applications of `Next`.
    pub fn path(&self, a: usize, j: usize) -> usize {
        let pos = a + j;
        if pos < self.worlds {
            pos
        } else {
            let period = self.worlds - self.loop_target;
            self.loop_target + (pos - self.loop_target) % period
        }
    }

    /// `path(a, 0), ..., path(a, d_a)`.
    pub fn window(&self, a: usize) -> Vec<usize> {
        (0..=self.reach[a]).map(|j| self.path(a, j)).collect()
    }
}

/// Every lasso frame with at most `max_worlds` worlds and reach lengths in
/// `1..=min(max_reach, W)`, ordered by `W`, then `L`, then `d` lexicographically.
pub fn enumerate_lasso_frames(max_worlds: usize, max_reach: usize) -> Vec<FiniteLassoFrame> {
    let mut out = Vec::new();
    for worlds in 1..=max_worlds.min(MAX_WORLDS) {
        let top = max_reach.min(worlds);
        if top == 0 {
            continue;
        }
        let sequences = nondecreasing_sequences(worlds, top);
        for loop_target in 0..worlds {
            for reach in &sequences {
                out.push(FiniteLassoFrame {
                    worlds,
                    loop_target,
                    reach: reach.clone(),
                });
            }
        }
    }
    out
}

/// Non-decreasing sequences of length `len` over `1..=top`, lexicographic.
fn nondecreasing_sequences(len: usize, top: usize) -> Vec<Vec<usize>> {
    fn go(len: usize, lo: usize, top: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for d in lo..=top {
            prefix.push(d);
            go(len, d, top, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(len, 1, top, &mut Vec::with_capacity(len), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Frame {
    Uniform(UniformWindowFrame),
    Lasso(FiniteLassoFrame),
}

impl Frame {
    pub fn worlds(&self) -> usize {
        match self {
            Frame::Uniform(f) => f.worlds(),
            Frame::Lasso(f) => f.worlds(),
        }
    }

    /// `None` only at the last world of a uniform frame.
    pub fn next(&self, a: usize) -> Option<usize> {
        match self {
            Frame::Uniform(f) => f.next(a),
            Frame::Lasso(f) => Some(f.next(a)),
        }
    }

    pub fn window(&self, a: usize) -> Vec<usize> {
        match self {
            Frame::Uniform(f) => f.window(a),
            Frame::Lasso(f) => f.window(a),
        }
    }
}

impl From<UniformWindowFrame> for Frame {
    fn from(f: UniformWindowFrame) -> Self {
        Frame::Uniform(f)
    }
}

impl From<FiniteLassoFrame> for Frame {
    fn from(f: FiniteLassoFrame) -> Self {
        Frame::Lasso(f)
    }
}

/// Letter -> set of worlds where it is true. Letters not mentioned are false
/// everywhere.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Valuation {
    letters: BTreeMap<String, BTreeSet<usize>>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, letter: impl Into<String>, worlds: impl IntoIterator<Item = usize>) -> Self {
        self.letters
            .entry(letter.into())
            .or_default()
            .extend(worlds);
        self
    }

    /// Builds a valuation from per-letter bitmasks over worlds.
    pub fn from_masks<'a>(letters: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        let mut v = Valuation::new();
        for (name, mask) in letters {
            let worlds = (0..MAX_WORLDS).filter(|w| mask >> w & 1 == 1);
            v = v.with(name, worlds);
        }
        v
    }

    pub fn set(&mut self, letter: &str, world: usize, value: bool) {
        let entry = self.letters.entry(letter.to_string()).or_default();
        if value {
            entry.insert(world);
        } else {
            entry.remove(&world);
        }
    }

    pub fn holds(&self, letter: &str, world: usize) -> bool {
        self.letters
            .get(letter)
            .is_some_and(|worlds| worlds.contains(&world))
    }

    pub fn worlds_of(&self, letter: &str) -> impl Iterator<Item = usize> + '_ {
        self.letters.get(letter).into_iter().flatten().copied()
    }

    /// Letters mentioned by the valuation, sorted.
    pub fn letters(&self) -> impl Iterator<Item = &str> {
        self.letters.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<usize>)> {
        self.letters.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub(crate) fn mask(&self, letter: &str) -> u64 {
        self.worlds_of(letter)
            .filter(|&w| w < MAX_WORLDS)
            .fold(0, |m, w| m | 1 << w)
    }

    fn check(&self, worlds: usize) -> Result<(), FrameError> {
        for (letter, set) in &self.letters {
            if let Some(&world) = set.iter().find(|&&w| w >= worlds) {
                return Err(FrameError::WorldOutOfRange {
                    letter: letter.clone(),
                    world,
                    worlds,
                });
            }
        }
        Ok(())
    }
}

/// A frame with one valuation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Model {
    frame: Frame,
    valuation: Valuation,
}

impl Model {
    pub fn new(frame: impl Into<Frame>, valuation: Valuation) -> Result<Self, FrameError> {
        let frame = frame.into();
        valuation.check(frame.worlds())?;
        Ok(Model { frame, valuation })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn worlds(&self) -> usize {
        self.frame.worlds()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Agent {
    pub name: String,
    pub valuation: Valuation,
}

/// A frame with one valuation per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiAgentModel {
    frame: Frame,
    agents: Vec<Agent>,
}

impl MultiAgentModel {
    pub fn new(frame: impl Into<Frame>, agents: Vec<Agent>) -> Result<Self, FrameError> {
        let frame = frame.into();
        if agents.is_empty() {
            return Err(FrameError::NoAgents);
        }
        let mut names = BTreeSet::new();
        for agent in &agents {
            if !names.insert(agent.name.as_str()) {
                return Err(FrameError::DuplicateAgent(agent.name.clone()));
            }
            agent.valuation.check(frame.worlds())?;
        }
        Ok(MultiAgentModel { frame, agents })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, name: &str) -> Option<&Agent> {
        self.agents.iter().find(|a| a.name == name)
    }

    /// The single-valuation model seen by one agent.
    pub fn agent_model(&self, name: &str) -> Option<Model> {
        self.agent(name).map(|a| Model {
            frame: self.frame.clone(),
            valuation: a.valuation.clone(),
        })
    }

    pub fn agent_models(&self) -> impl Iterator<Item = Model> + '_ {
        self.agents.iter().map(|a| Model {
            frame: self.frame.clone(),
            valuation: a.valuation.clone(),
        })
    }
}

/// Letter-wise strict-majority aggregation: `p` holds at `a` iff more than
/// half of the agents make it true there. Ties are false.
pub fn vote(mam: &MultiAgentModel) -> Model {
    let n = mam.agents.len();
    let letters: BTreeSet<&str> = mam
        .agents
        .iter()
        .flat_map(|a| a.valuation.letters())
        .collect();
    let mut valuation = Valuation::new();
    for letter in letters {
        let worlds = (0..mam.frame.worlds()).filter(|&w| {
            let votes = mam
                .agents
                .iter()
                .filter(|a| a.valuation.holds(letter, w))
                .count();
            2 * votes > n
        });
        valuation = valuation.with(letter, worlds);
    }
    Model {
        frame: mam.frame.clone(),
        valuation,
    }
}
