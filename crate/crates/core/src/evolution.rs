//! Two-objective evolution of machines: classification fitness up, state
//! count down.
//!
//! The population is a Pareto antichain under the dominance order on
//! (fitness, state count). Each generation clones one uniformly chosen
//! member, mutates it `1 + Pois(1)` times, and offers the result to the
//! population: the mutant is discarded if any member strictly dominates it,
//! otherwise it enters and every member it weakly dominates (ties included)
//! is removed.
//!
//! A run is strictly single-threaded and fully determined by the seed, the
//! sample set, and the generation count. Population members are kept sorted
//! by state count — unique within an antichain — so uniform selection is
//! well-defined regardless of insertion history.

use crate::fsm::{Fsm, Symbol};
use crate::rng::RandomSource;
use crate::sampling::SampleSet;

/// Number of correctly classified samples: accepted members plus rejected
/// non-members. Ranges from 0 to the sample-set size.
pub fn fitness(m: &Fsm, samples: &SampleSet) -> u32 {
    let good_accepts = samples.accept().iter().filter(|s| m.accepts(s)).count();
    let good_rejects = samples.reject().iter().filter(|s| !m.accepts(s)).count();
    (good_accepts + good_rejects) as u32
}

/// `a` is no worse than `b` on both objectives (fitness up, states down).
/// Scores are (fitness, state count) pairs.
pub fn weakly_dominates(a: (u32, u32), b: (u32, u32)) -> bool {
    a.0 >= b.0 && a.1 <= b.1
}

/// Weak dominance plus strictly better on at least one objective.
pub fn dominates(a: (u32, u32), b: (u32, u32)) -> bool {
    weakly_dominates(a, b) && (a.0 > b.0 || a.1 < b.1)
}

/// A machine with its cached objectives.
#[derive(Debug, Clone)]
pub struct Individual {
    pub machine: Fsm,
    pub fitness: u32,
    pub states: u32,
}

impl Individual {
    pub fn evaluate(machine: Fsm, samples: &SampleSet) -> Individual {
        let fitness = fitness(&machine, samples);
        let states = machine.state_count() as u32;
        Individual {
            machine,
            fitness,
            states,
        }
    }

    pub fn score(&self) -> (u32, u32) {
        (self.fitness, self.states)
    }

    pub fn weakly_dominates(&self, other: &Individual) -> bool {
        weakly_dominates(self.score(), other.score())
    }

    pub fn dominates(&self, other: &Individual) -> bool {
        dominates(self.score(), other.score())
    }
}

/// How the mutation operator treats the accept flag of the state it touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MutationFlip {
    /// Set the flag to a fresh uniform value (may be a no-op).
    #[default]
    Random,
    /// Invert the current flag.
    Toggle,
}

impl std::fmt::Display for MutationFlip {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MutationFlip::Random => write!(f, "random"),
            MutationFlip::Toggle => write!(f, "toggle"),
        }
    }
}

impl std::str::FromStr for MutationFlip {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(MutationFlip::Random),
            "toggle" => Ok(MutationFlip::Toggle),
            other => Err(format!("unknown mutation-flip mode {other:?}")),
        }
    }
}

/// One mutation step, in place.
///
/// Redirects a uniformly chosen arc: with probability 1/2 to a uniformly
/// chosen existing state, otherwise to a freshly appended state whose arcs
/// all self-loop and which starts non-accepting. Then picks a state uniformly
/// from the (possibly enlarged) machine and rewrites its accept flag per
/// `flip`. Draw order is fixed: source state, symbol, existing-vs-new coin,
/// target (existing branch only), flag state, flag coin (random mode only).
pub fn mutate(m: &mut Fsm, flip: MutationFlip, rng: &mut RandomSource) {
    let source = crate::fsm::StateId::new(rng.index(m.state_count()) as u32);
    let symbol = Symbol::from_index(rng.index(Symbol::COUNT)).unwrap();
    let target = if rng.coin() {
        crate::fsm::StateId::new(rng.index(m.state_count()) as u32)
    } else {
        m.add_state()
    };
    m.set_transition(source, symbol, target);

    let flagged = crate::fsm::StateId::new(rng.index(m.state_count()) as u32);
    let value = match flip {
        MutationFlip::Random => rng.coin(),
        MutationFlip::Toggle => !m.is_accepting(flagged),
    };
    m.set_accepting(flagged, value);
}

/// Pareto antichain of individuals, sorted by state count ascending.
///
/// In an antichain over integer objectives each state count appears at most
/// once and fitness increases strictly with state count, so the sort order
/// is canonical and the last member always carries the best fitness.
#[derive(Debug, Clone)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    /// The starting population: just the one-state reject-all machine.
    pub fn initial(samples: &SampleSet) -> Population {
        Population {
            members: vec![Individual::evaluate(Fsm::reject_all(), samples)],
        }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The best-fitness member (the rightmost in state-count order).
    pub fn best(&self) -> &Individual {
        self.members.last().expect("population is never empty")
    }

    /// Fitness/state pairs in state-count order.
    pub fn front(&self) -> Vec<(u32, u32)> {
        self.members.iter().map(Individual::score).collect()
    }

    pub fn select<'a>(&'a self, rng: &mut RandomSource) -> &'a Individual {
        &self.members[rng.index(self.members.len())]
    }

    /// Offer a mutant to the population. It is rejected when some member
    /// strictly dominates it; otherwise it replaces everything it weakly
    /// dominates, equal scores included.
    pub fn offer(&mut self, candidate: Individual) -> bool {
        if self.members.iter().any(|m| m.dominates(&candidate)) {
            return false;
        }
        self.members.retain(|m| !candidate.weakly_dominates(m));
        let at = self
            .members
            .partition_point(|m| m.states < candidate.states);
        self.members.insert(at, candidate);
        true
    }

    /// Whether no member dominates another; also checks the sort order.
    pub fn is_antichain(&self) -> bool {
        let sorted = self.members.windows(2).all(|w| w[0].states < w[1].states);
        let no_dominance = self.members.iter().enumerate().all(|(i, a)| {
            self.members
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || (!a.dominates(b) && !b.dominates(a)))
        });
        sorted && no_dominance
    }
}

/// Run parameters for [`evolve`].
#[derive(Debug, Clone)]
pub struct EvolveConfig {
    pub generations: u64,
    /// Sorted generation numbers (<= `generations`) at which the observer
    /// fires; generation 0 is the initial population.
    pub checkpoints: Vec<u64>,
    pub flip: MutationFlip,
}

/// Population snapshot handed to the checkpoint observer.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub generation: u64,
    pub best_fitness: u32,
    pub best_states: u32,
    pub population_size: usize,
    /// (fitness, state count) per member, state count ascending.
    pub front: Vec<(u32, u32)>,
}

impl Checkpoint {
    fn of(generation: u64, pop: &Population) -> Checkpoint {
        let best = pop.best();
        Checkpoint {
            generation,
            best_fitness: best.fitness,
            best_states: best.states,
            population_size: pop.len(),
            front: pop.front(),
        }
    }
}

/// Evolve a population against `samples` for `config.generations`
/// iterations, firing `observer` at each configured checkpoint, and return
/// the final population.
pub fn evolve(
    samples: &SampleSet,
    config: &EvolveConfig,
    rng: &mut RandomSource,
    mut observer: impl FnMut(&Checkpoint),
) -> Population {
    debug_assert!(config.checkpoints.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(config.checkpoints.iter().all(|&c| c <= config.generations));

    let mut pop = Population::initial(samples);
    let mut pending = config.checkpoints.iter().copied().peekable();
    while pending.peek() == Some(&0) {
        pending.next();
        observer(&Checkpoint::of(0, &pop));
    }

    for generation in 1..=config.generations {
        let mut mutant = pop.select(rng).machine.clone();
        let burst = 1 + rng.poisson_one();
        for _ in 0..burst {
            mutate(&mut mutant, config.flip, rng);
        }
        pop.offer(Individual::evaluate(mutant, samples));

        if generation % 4096 == 0 {
            debug_assert!(pop.is_antichain());
        }
        while pending.peek() == Some(&generation) {
            pending.next();
            observer(&Checkpoint::of(generation, &pop));
        }
    }
    debug_assert!(pop.is_antichain());
    pop
}
