//! Microscopic model: drifted Brownian agents with reflecting walls and
//! contact-triggered type changes.
//!
//! One time step of [`AbmSim`] performs, in order:
//! 1. a Euler–Maruyama position update folded back into the domain,
//! 2. a rebuild of the contact network,
//! 3. per-agent transition rates from the rule set,
//! 4. a synchronous type update with at most one change per agent.
//!
//! Draw order per step is fixed (one standard normal per agent, then the
//! type-decision uniforms in agent order), making trajectories bit-exact
//! reproducible for a given seed stream.

mod contact;

pub use contact::{build_contact_network, ContactNetwork};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{
    Domain1D, InteractionRule, PositionSpec, Scenario, StreamPurpose, SuitabilityLandscape,
};

/// Positions and discrete types of all agents; index = agent id.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub positions: Vec<f64>,
    pub types: Vec<usize>,
}

impl AgentState {
    pub fn n_agents(&self) -> usize {
        self.positions.len()
    }

    pub fn type_counts(&self, n_types: usize) -> Vec<usize> {
        let mut counts = vec![0usize; n_types];
        for &t in &self.types {
            counts[t] += 1;
        }
        counts
    }

    /// Fraction of agents currently of type `t`.
    pub fn fraction_of(&self, t: usize) -> f64 {
        if self.types.is_empty() {
            return 0.0;
        }
        self.types.iter().filter(|&&y| y == t).count() as f64 / self.types.len() as f64
    }
}

/// One explicit position update: `x ← fold(x − ∇V(x) Δt + σ √Δt ζ)` with one
/// standard normal draw `ζ` per agent.
pub fn step_positions(
    positions: &mut [f64],
    landscape: &SuitabilityLandscape,
    domain: &Domain1D,
    sigma: f64,
    dt: f64,
    noise: &[f64],
) {
    debug_assert_eq!(positions.len(), noise.len());
    let root_dt = dt.sqrt();
    for (x, &z) in positions.iter_mut().zip(noise) {
        let proposed = *x - landscape.gradient(*x) * dt + sigma * root_dt * z;
        *x = domain.reflect(proposed);
    }
}

/// Per-agent, per-rule contact rates and their per-agent totals.
#[derive(Debug, Clone, Default)]
pub struct RateTable {
    n_rules: usize,
    lambda: Vec<f64>,
    total: Vec<f64>,
}

impl RateTable {
    pub fn new(n_agents: usize, n_rules: usize) -> Self {
        Self { n_rules, lambda: vec![0.0; n_agents * n_rules], total: vec![0.0; n_agents] }
    }

    pub fn rates_of(&self, agent: usize) -> &[f64] {
        &self.lambda[agent * self.n_rules..(agent + 1) * self.n_rules]
    }

    pub fn total_of(&self, agent: usize) -> f64 {
        self.total[agent]
    }
}

/// Fill the rate table: an agent of the rule's subject type gains
/// `rate × (number of catalyst-type contacts)` for that rule, zero otherwise.
pub fn transition_rates(
    state: &AgentState,
    network: &ContactNetwork,
    rules: &[InteractionRule],
    table: &mut RateTable,
) {
    let n = state.n_agents();
    debug_assert_eq!(network.n_agents(), n);
    *table = RateTable {
        n_rules: rules.len(),
        lambda: std::mem::take(&mut table.lambda),
        total: std::mem::take(&mut table.total),
    };
    table.lambda.clear();
    table.lambda.resize(n * rules.len(), 0.0);
    table.total.clear();
    table.total.resize(n, 0.0);

    for i in 0..n {
        let s = state.types[i];
        let mut sum = 0.0;
        for (r, rule) in rules.iter().enumerate() {
            if rule.subject != s || rule.rate == 0.0 {
                continue;
            }
            let contacts = network
                .neighbors(i)
                .iter()
                .filter(|&&j| state.types[j] == rule.catalyst)
                .count();
            let lambda = rule.rate * contacts as f64;
            table.lambda[i * rules.len() + r] = lambda;
            sum += lambda;
        }
        table.total[i] = sum;
    }
}

/// Probability that an agent with total rate `lambda_total` fires within `dt`.
pub fn type_change_probability(lambda_total: f64, dt: f64) -> f64 {
    -(-lambda_total * dt).exp_m1()
}

/// Pick the firing rule from one uniform draw against the cumulative rate
/// distribution (`u` in [0, 1)).
pub fn select_rule(lambdas: &[f64], total: f64, u: f64) -> usize {
    debug_assert!(total > 0.0);
    let target = u * total;
    let mut acc = 0.0;
    for (r, &l) in lambdas.iter().enumerate() {
        acc += l;
        if target < acc {
            return r;
        }
    }
    // numerically possible when u → 1; fall back to the last active rule
    lambdas.iter().rposition(|&l| l > 0.0).unwrap_or(lambdas.len() - 1)
}

/// Synchronous type update from a precomputed rate table; at most one change
/// per agent per step. Returns the number of fired events.
pub fn step_types(
    types: &mut [usize],
    rates: &RateTable,
    rules: &[InteractionRule],
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> usize {
    let mut events = 0;
    for i in 0..types.len() {
        let total = rates.total_of(i);
        if total <= 0.0 {
            continue;
        }
        let u: f64 = rng.random();
        if u >= type_change_probability(total, dt) {
            continue;
        }
        let pick: f64 = rng.random();
        let r = select_rule(rates.rates_of(i), total, pick);
        types[i] = rules[r].product;
        events += 1;
    }
    events
}

/// Sample the block-wise initial state: agents are laid out type by type and
/// positions drawn per the type's spec (normals are rejection-resampled into
/// the domain, i.e. truncated).
pub fn sample_initial_state(scenario: &Scenario, rng: &mut ChaCha8Rng) -> Result<AgentState> {
    let n = scenario.params.n_agents;
    let mut positions = Vec::with_capacity(n);
    let mut types = Vec::with_capacity(n);
    let domain = &scenario.domain;
    for (s, init) in scenario.initial.iter().enumerate() {
        for _ in 0..init.count {
            let x = match init.position {
                PositionSpec::Uniform => domain.lower + rng.random::<f64>() * domain.length(),
                PositionSpec::Normal { mean, std } => {
                    let mut tries = 0u32;
                    loop {
                        let z: f64 = rng.sample(StandardNormal);
                        let x = mean + std * z;
                        if domain.contains(x) {
                            break x;
                        }
                        tries += 1;
                        if tries > 100_000 {
                            return Err(Error::Config(format!(
                                "initial position sampling for type {s} keeps missing the domain"
                            )));
                        }
                    }
                }
            };
            positions.push(x);
            types.push(s);
        }
    }
    Ok(AgentState { positions, types })
}

/// One seeded realization of the agent model with manual stepping.
pub struct AbmSim {
    scenario: Scenario,
    state: AgentState,
    step_idx: usize,
    rng: ChaCha8Rng,
    noise: Vec<f64>,
    network: ContactNetwork,
    rates: RateTable,
    interactions_active: bool,
}

impl AbmSim {
    pub fn new(scenario: &Scenario, realization: u64) -> Result<Self> {
        let mut init_rng = scenario.seeds.stream(realization, StreamPurpose::AgentInit);
        let state = sample_initial_state(scenario, &mut init_rng)?;
        let n = state.n_agents();
        let n_rules = scenario.params.rules.len();
        Ok(Self {
            scenario: scenario.clone(),
            state,
            step_idx: 0,
            rng: scenario.seeds.stream(realization, StreamPurpose::AgentDynamics),
            noise: vec![0.0; n],
            network: ContactNetwork::new(n),
            rates: RateTable::new(n, n_rules),
            interactions_active: scenario.params.rules.iter().any(|r| r.rate > 0.0),
        })
    }

    pub fn state(&self) -> &AgentState {
        &self.state
    }

    pub fn step_index(&self) -> usize {
        self.step_idx
    }

    pub fn time(&self) -> f64 {
        self.step_idx as f64 * self.scenario.params.dt
    }

    /// Advance one time step.
    pub fn step(&mut self) -> Result<()> {
        let p = &self.scenario.params;
        for z in &mut self.noise {
            *z = self.rng.sample(StandardNormal);
        }
        step_positions(
            &mut self.state.positions,
            &self.scenario.landscape,
            &self.scenario.domain,
            p.sigma,
            p.dt,
            &self.noise,
        );
        if self.interactions_active {
            self.network.rebuild(&self.state.positions, p.d_int, &self.scenario.domain)?;
            transition_rates(&self.state, &self.network, &p.rules, &mut self.rates);
            step_types(&mut self.state.types, &self.rates, &p.rules, p.dt, &mut self.rng);
        }
        self.step_idx += 1;
        Ok(())
    }
}

/// Run one realization to `t_end`, calling `observe(step, time, state)` after
/// initialization and after every step. Return `false` from the observer to
/// stop early; the (possibly early) final state is returned.
pub fn simulate_abm<F>(scenario: &Scenario, realization: u64, mut observe: F) -> Result<AgentState>
where
    F: FnMut(usize, f64, &AgentState) -> bool,
{
    let n_steps = scenario.params.n_steps()?;
    let mut sim = AbmSim::new(scenario, realization)?;
    if !observe(0, 0.0, sim.state()) {
        return Ok(sim.state);
    }
    for _ in 1..=n_steps {
        sim.step()?;
        if !observe(sim.step_idx, sim.time(), sim.state()) {
            break;
        }
    }
    Ok(sim.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_rule, GridSettings, ModelParams, SeedPolicy, TypeInitial};
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn test_scenario(n_agents: usize, rate: f64) -> Scenario {
        let counts = [(n_agents * 4) / 5, n_agents - (n_agents * 4) / 5];
        Scenario {
            domain: Domain1D::unit(),
            landscape: SuitabilityLandscape::double_well(0.01, 3.6, 0.1, 0.5),
            params: ModelParams {
                n_types: 2,
                n_agents,
                sigma: 0.15,
                d_int: 0.002,
                rules: vec![build_rule(0, 1, 1, rate, 2).unwrap()],
                t_end: 1.0,
                dt: 0.01,
            },
            initial: vec![
                TypeInitial { count: counts[0], position: PositionSpec::Normal { mean: 0.5, std: 0.2 } },
                TypeInitial { count: counts[1], position: PositionSpec::Normal { mean: 0.7, std: 0.1 } },
            ],
            grid: GridSettings::default(),
            seeds: SeedPolicy::new(11),
        }
    }

    #[test]
    fn drift_only_position_update() {
        let scenario = test_scenario(1, 0.1);
        let mut positions = vec![0.9];
        // frozen: V'(0.9) = 0.144*0.4*(3.6*0.16 - 0.1) = 0.0274176
        step_positions(
            &mut positions,
            &scenario.landscape,
            &scenario.domain,
            0.15,
            0.01,
            &[0.0],
        );
        assert_relative_eq!(positions[0], 0.9 - 0.000274176, max_relative = 1e-12);
    }

    #[test]
    fn noisy_updates_stay_inside() {
        let domain = Domain1D::unit();
        let flat = SuitabilityLandscape::flat();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut positions: Vec<f64> = (0..64).map(|i| i as f64 / 63.0).collect();
        let mut noise = vec![0.0; 64];
        for _ in 0..500 {
            for z in &mut noise {
                *z = rng.sample(StandardNormal);
            }
            // deliberately huge noise so reflections fold repeatedly
            step_positions(&mut positions, &flat, &domain, 3.0, 0.01, &noise);
            for &x in &positions {
                assert!(domain.contains(x), "agent escaped to {x}");
            }
        }
    }

    #[test]
    fn rates_count_catalyst_contacts() {
        // cluster of one subject with three catalysts in range, one out of range
        let state = AgentState {
            positions: vec![0.5, 0.5005, 0.4995, 0.5012, 0.9],
            types: vec![0, 1, 1, 1, 1],
        };
        let domain = Domain1D::unit();
        let rules = vec![build_rule(0, 1, 1, 0.1, 2).unwrap()];
        let network = build_contact_network(&state.positions, 0.002, &domain).unwrap();
        let mut table = RateTable::default();
        transition_rates(&state, &network, &rules, &mut table);
        assert_relative_eq!(table.total_of(0), 0.3, max_relative = 1e-12);
        // catalysts are not subjects of any rule here
        for i in 1..5 {
            assert_eq!(table.total_of(i), 0.0);
        }
    }

    #[test]
    fn rates_match_dense_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 60;
        let state = AgentState {
            positions: (0..n).map(|_| rng.random::<f64>()).collect(),
            types: (0..n).map(|_| (rng.random::<f64>() * 3.0) as usize).collect(),
        };
        let rules = vec![
            build_rule(0, 1, 1, 0.1, 3).unwrap(),
            build_rule(1, 2, 0, 0.7, 3).unwrap(),
            build_rule(0, 2, 2, 0.0, 3).unwrap(),
        ];
        let d_int = 0.07;
        let domain = Domain1D::unit();
        let network = build_contact_network(&state.positions, d_int, &domain).unwrap();
        let mut table = RateTable::default();
        transition_rates(&state, &network, &rules, &mut table);

        for i in 0..n {
            for (r, rule) in rules.iter().enumerate() {
                let mut expected = 0.0;
                if state.types[i] == rule.subject {
                    for j in 0..n {
                        if j != i
                            && (state.positions[i] - state.positions[j]).abs() <= d_int
                            && state.types[j] == rule.catalyst
                        {
                            expected += rule.rate;
                        }
                    }
                }
                assert_relative_eq!(table.rates_of(i)[r], expected, max_relative = 1e-12);
            }
            assert_relative_eq!(
                table.total_of(i),
                table.rates_of(i).iter().sum::<f64>(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn change_probability_frozen_value() {
        // 1 - exp(-0.3 * 0.01), precomputed independently
        assert_relative_eq!(
            type_change_probability(0.3, 0.01),
            2.99550449662702e-3,
            max_relative = 1e-12
        );
        assert_eq!(type_change_probability(0.0, 0.01), 0.0);
        // saturation
        assert!((type_change_probability(1e9, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rule_selection_boundary() {
        let lambdas = [0.2, 0.6];
        // rule 0 wins iff u < 0.2 / 0.8 = 0.25
        assert_eq!(select_rule(&lambdas, 0.8, 0.0), 0);
        assert_eq!(select_rule(&lambdas, 0.8, 0.2499), 0);
        assert_eq!(select_rule(&lambdas, 0.8, 0.2501), 1);
        assert_eq!(select_rule(&lambdas, 0.8, 0.999999), 1);
        // zero-rate rules are skipped even at the u -> 1 edge
        assert_eq!(select_rule(&[0.5, 0.0], 0.5, 0.9999999999999999), 0);
    }

    #[test]
    fn zero_rates_never_fire_and_huge_rates_always_fire() {
        let rules = vec![build_rule(0, 1, 1, 1.0, 2).unwrap()];
        let mut rng = ChaCha8Rng::seed_from_u64(3);

        let mut types = vec![0usize; 40];
        let zero = RateTable::new(40, 1);
        assert_eq!(step_types(&mut types, &zero, &rules, 0.01, &mut rng), 0);
        assert!(types.iter().all(|&t| t == 0));

        let mut certain = RateTable::new(40, 1);
        certain.lambda.iter_mut().for_each(|l| *l = 1e12);
        certain.total.iter_mut().for_each(|t| *t = 1e12);
        assert_eq!(step_types(&mut types, &certain, &rules, 0.01, &mut rng), 40);
        assert!(types.iter().all(|&t| t == 1));
    }

    #[test]
    fn initial_state_layout_and_domain() {
        let scenario = test_scenario(100, 0.1);
        let mut rng = scenario.seeds.stream(0, StreamPurpose::AgentInit);
        let state = sample_initial_state(&scenario, &mut rng).unwrap();
        assert_eq!(state.n_agents(), 100);
        assert_eq!(state.type_counts(2), vec![80, 20]);
        assert!(state.positions.iter().all(|&x| scenario.domain.contains(x)));
        assert!(state.types[..80].iter().all(|&t| t == 0));
        assert!(state.types[80..].iter().all(|&t| t == 1));
    }

    #[test]
    fn trajectories_are_bit_reproducible() {
        let scenario = test_scenario(50, 0.5);
        let a = simulate_abm(&scenario, 3, |_, _, _| true).unwrap();
        let b = simulate_abm(&scenario, 3, |_, _, _| true).unwrap();
        assert_eq!(a, b);
        let c = simulate_abm(&scenario, 4, |_, _, _| true).unwrap();
        assert_ne!(a.positions, c.positions);
    }

    #[test]
    fn observer_controls_the_run() {
        let scenario = test_scenario(10, 0.1);
        let mut calls = 0;
        simulate_abm(&scenario, 0, |step, time, _| {
            assert_relative_eq!(time, step as f64 * 0.01);
            calls += 1;
            step < 3
        })
        .unwrap();
        assert_eq!(calls, 4); // steps 0, 1, 2, 3
    }

    #[test]
    fn adoption_only_moves_forward_under_the_adoption_rule() {
        let scenario = test_scenario(200, 5.0);
        let mut last = 0.0;
        simulate_abm(&scenario, 1, |_, _, state| {
            let f = state.fraction_of(1);
            assert!(f >= last - 1e-12, "adopter fraction decreased: {last} -> {f}");
            last = f;
            true
        })
        .unwrap();
    }
}
