//! Random TELA generation and the nondeterminism metric used to group
//! benchmark inputs.

pub mod bench;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acceptance::AcceptanceFormula;
use crate::automaton::{Tela, Transition, DEFAULT_MAX_APS};
use crate::bitset::MarkSet;
use crate::error::{Error, Result};

/// How the acceptance condition is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccKind {
    /// Random formula tree, kept if its DNF has the requested shape.
    RandomEl,
    /// A DNF with pairwise distinct atoms.
    Dnf,
}

#[derive(Clone, Debug)]
pub struct RandomParams {
    pub n_states: u32,
    pub n_aps: usize,
    pub n_marks: u32,
    /// Probability that a triple `(q, a, q')` is a transition. `None`
    /// means `3 / n_states`.
    pub edge_density: Option<f64>,
    /// Probability that a transition carries a given mark.
    pub mark_prob: f64,
    pub acc: AccKind,
    /// Accepted DNF lengths for [`AccKind::RandomEl`].
    pub dnf_length: (usize, usize),
    /// Minimum number of DNF disjuncts for [`AccKind::RandomEl`].
    pub min_disjuncts: usize,
    /// Maximum depth of the random formula tree.
    pub max_depth: u32,
    /// Ranges (inclusive) for [`AccKind::Dnf`]: disjuncts, `Inf` atoms and
    /// `Fin` atoms per disjunct.
    pub dnf_disjuncts: (usize, usize),
    pub dnf_infs: (usize, usize),
    pub dnf_fins: (usize, usize),
    /// Keep only transition systems with some nondeterministic choice.
    pub require_nondeterminism: bool,
    pub seed: u64,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self {
            n_states: 4,
            n_aps: 1,
            n_marks: 8,
            edge_density: None,
            mark_prob: 0.2,
            acc: AccKind::RandomEl,
            dnf_length: (2, 21),
            min_disjuncts: 2,
            max_depth: 4,
            dnf_disjuncts: (2, 3),
            dnf_infs: (2, 3),
            dnf_fins: (0, 1),
            require_nondeterminism: true,
            seed: 0,
        }
    }
}

pub const MAX_STATES: u32 = 50;
pub const MAX_MARKS: u32 = 16;
const MAX_ATTEMPTS: usize = 100_000;

impl RandomParams {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invalid(m));
        if !(1..=MAX_STATES).contains(&self.n_states) {
            return bad(format!("state count must be in 1..={MAX_STATES}"));
        }
        if self.n_marks > MAX_MARKS || self.n_marks == 0 {
            return bad(format!("mark count must be in 1..={MAX_MARKS}"));
        }
        if self.n_aps > DEFAULT_MAX_APS {
            return bad(format!("at most {DEFAULT_MAX_APS} atomic propositions"));
        }
        let p = self.density();
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&self.mark_prob) {
            return bad("probabilities must lie in [0, 1]".into());
        }
        if self.acc == AccKind::Dnf {
            let need = self.dnf_disjuncts.1 * (self.dnf_infs.1 + self.dnf_fins.1);
            if need > self.n_marks as usize {
                return bad(format!("DNF shape needs up to {need} distinct marks, only {} available", self.n_marks));
            }
            if self.dnf_infs.0 == 0 || self.dnf_disjuncts.0 == 0 {
                return bad("DNF disjuncts need at least one Inf atom".into());
            }
        }
        Ok(())
    }

    fn density(&self) -> f64 {
        self.edge_density.unwrap_or((3.0 / self.n_states as f64).min(1.0))
    }
}

/// Reproducible random automaton with initial state 0.
pub fn random_tela(p: &RandomParams) -> Result<Tela> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let transitions = random_transitions(p, &mut rng)?;
    let acceptance = match p.acc {
        AccKind::RandomEl => random_el(p, &mut rng)?,
        AccKind::Dnf => random_dnf(p, &mut rng),
    };
    let aps = (0..p.n_aps).map(|i| format!("p{i}")).collect();
    Tela::new(aps, p.n_states, [0], transitions, acceptance, p.n_marks)
}

fn random_transitions(p: &RandomParams, rng: &mut ChaCha8Rng) -> Result<Vec<Transition>> {
    let letters = 1u32 << p.n_aps;
    let density = p.density();
    for _ in 0..MAX_ATTEMPTS {
        let mut out = Vec::new();
        for q in 0..p.n_states {
            for a in 0..letters {
                for d in 0..p.n_states {
                    if rng.gen_bool(density) {
                        let marks: MarkSet = (0..p.n_marks).filter(|_| rng.gen_bool(p.mark_prob)).collect();
                        out.push(Transition::new(q, a, d, marks));
                    }
                }
            }
        }
        if !p.require_nondeterminism || has_choice(&out) {
            return Ok(out);
        }
    }
    Err(Error::Invalid("no nondeterministic transition system found; raise the edge density".into()))
}

fn has_choice(ts: &[Transition]) -> bool {
    // generated in (src, letter) order
    ts.windows(2)
        .any(|w| w[0].src == w[1].src && w[0].letter == w[1].letter && w[0].dst != w[1].dst)
}

fn random_tree(p: &RandomParams, rng: &mut ChaCha8Rng, depth: u32) -> AcceptanceFormula {
    let kind = if depth >= p.max_depth { rng.gen_range(2..4) } else { rng.gen_range(0..4) };
    match kind {
        0 => AcceptanceFormula::and([random_tree(p, rng, depth + 1), random_tree(p, rng, depth + 1)]),
        1 => AcceptanceFormula::or([random_tree(p, rng, depth + 1), random_tree(p, rng, depth + 1)]),
        2 => AcceptanceFormula::inf([rng.gen_range(0..p.n_marks)]),
        _ => AcceptanceFormula::fin([rng.gen_range(0..p.n_marks)]),
    }
}

fn random_el(p: &RandomParams, rng: &mut ChaCha8Rng) -> Result<AcceptanceFormula> {
    for _ in 0..MAX_ATTEMPTS {
        let f = random_tree(p, rng, 1);
        let dnf = f.to_dnf();
        let len = dnf.length();
        if (p.dnf_length.0..=p.dnf_length.1).contains(&len) && dnf.disjuncts.len() >= p.min_disjuncts {
            return Ok(f);
        }
    }
    Err(Error::Invalid("no acceptance formula matches the DNF filter".into()))
}

fn random_dnf(p: &RandomParams, rng: &mut ChaCha8Rng) -> AcceptanceFormula {
    let mut pool: Vec<u32> = (0..p.n_marks).collect();
    pool.shuffle(rng);
    let mut pool = pool.into_iter();
    let m = rng.gen_range(p.dnf_disjuncts.0..=p.dnf_disjuncts.1);
    AcceptanceFormula::or((0..m).map(|_| {
        let k = rng.gen_range(p.dnf_infs.0..=p.dnf_infs.1);
        let f = rng.gen_range(p.dnf_fins.0..=p.dnf_fins.1);
        let mut atoms: Vec<AcceptanceFormula> = (0..k)
            .map(|_| AcceptanceFormula::inf([pool.next().expect("validated mark budget")]))
            .collect();
        atoms.extend((0..f).map(|_| AcceptanceFormula::Fin(MarkSet::singleton(pool.next().expect("validated mark budget")))));
        AcceptanceFormula::and(atoms)
    }))
}

/// Pairs of transitions `(q,a,q1), (q,a,q2)` with `q1 ≠ q2`, divided by
/// the number of states.
pub fn nondeterminism_amount(a: &Tela) -> Ratio<u64> {
    if a.num_states() == 0 {
        return Ratio::from_integer(0);
    }
    let mut pairs = 0u64;
    for q in 0..a.num_states() {
        let out = a.out(q);
        let mut i = 0;
        while i < out.len() {
            let mut j = i;
            while j < out.len() && out[j].letter == out[i].letter {
                j += 1;
            }
            let group = &out[i..j];
            for x in 0..group.len() {
                for y in x + 1..group.len() {
                    if group[x].dst != group[y].dst {
                        pairs += 1;
                    }
                }
            }
            i = j;
        }
    }
    Ratio::new(pairs, a.num_states() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::AcceptanceFormula as F;

    #[test]
    fn seeded_generation_is_reproducible() {
        let p = RandomParams {
            seed: 42,
            ..Default::default()
        };
        assert_eq!(random_tela(&p).unwrap(), random_tela(&p).unwrap());
    }

    #[test]
    fn generated_automata_are_nondeterministic_and_filtered() {
        for seed in 0..50 {
            let a = random_tela(&RandomParams {
                n_states: 6,
                seed,
                ..Default::default()
            })
            .unwrap();
            assert!(!a.is_deterministic());
            assert!(*nondeterminism_amount(&a).numer() > 0);
            let dnf = a.acceptance().to_dnf();
            assert!((2..=21).contains(&dnf.length()));
            assert!(dnf.disjuncts.len() >= 2);
        }
    }

    #[test]
    fn dnf_mode_shape() {
        for seed in 0..30 {
            let a = random_tela(&RandomParams {
                n_marks: 12,
                acc: AccKind::Dnf,
                seed,
                ..Default::default()
            })
            .unwrap();
            let dnf = a.acceptance().to_dnf();
            assert!((2..=3).contains(&dnf.disjuncts.len()));
            let mut seen = MarkSet::new();
            for d in &dnf.disjuncts {
                assert!((2..=3).contains(&d.infs.len()));
                assert!(d.fin.len() <= 1);
                assert!(!seen.intersects(&d.fin));
                seen.union_with(&d.fin);
            }
        }
    }

    #[test]
    fn parameter_errors() {
        let mut p = RandomParams {
            n_states: 51,
            ..Default::default()
        };
        assert!(random_tela(&p).is_err());
        p.n_states = 4;
        p.n_marks = 17;
        assert!(random_tela(&p).is_err());
        p.n_marks = 4;
        p.acc = AccKind::Dnf;
        assert!(random_tela(&p).is_err());
    }

    #[test]
    fn edge_density_mean_out_degree() {
        let mut total = 0usize;
        let samples = 1000;
        for seed in 0..samples {
            let a = random_tela(&RandomParams {
                n_states: 10,
                seed,
                require_nondeterminism: false,
                ..Default::default()
            })
            .unwrap();
            total += a.transitions().len();
        }
        let per_letter = total as f64 / (samples as f64 * 10.0 * 2.0);
        assert!((per_letter - 3.0).abs() < 0.3, "{per_letter}");
    }

    #[test]
    fn nondeterminism_examples() {
        let det = Tela::universal(vec!["a".into()], F::True, 0).unwrap();
        assert_eq!(nondeterminism_amount(&det), Ratio::from_integer(0));
        let one = Tela::new(
            vec![],
            2,
            [0],
            vec![Transition::new(0, 0, 0, MarkSet::new()), Transition::new(0, 0, 1, MarkSet::new())],
            F::True,
            0,
        )
        .unwrap();
        assert_eq!(nondeterminism_amount(&one), Ratio::new(1, 2));
        let fan = Tela::new(
            vec![],
            3,
            [0],
            (0..3).map(|d| Transition::new(0, 0, d, MarkSet::new())).collect(),
            F::True,
            0,
        )
        .unwrap();
        assert_eq!(nondeterminism_amount(&fan), Ratio::from_integer(1));
        let three = Tela::new(
            vec![],
            2,
            [0],
            vec![
                Transition::new(0, 0, 0, MarkSet::new()),
                Transition::new(0, 0, 1, MarkSet::new()),
                Transition::new(0, 0, 1, MarkSet::singleton(0)),
            ],
            F::True,
            1,
        )
        .unwrap();
        // (0,0), (0,1) and (0,0), (0,1)' differ in target; the two 1-targets do not
        assert_eq!(nondeterminism_amount(&three), Ratio::new(2, 2));
    }
}
