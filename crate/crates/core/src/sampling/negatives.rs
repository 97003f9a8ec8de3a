//! Negative candidate generation for reference mappings.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::derive_seed;
use crate::mapping::{Mapping, MappingSet, Relation};
use crate::model::OntologySnapshot;
use crate::sampling::index::InvertedIndex;

pub const DEFAULT_MAX_HOPS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Idf,
    Neighbour,
    Random,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Idf => "idf",
            Strategy::Neighbour => "neighbour",
            Strategy::Random => "random",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "idf" => Ok(Strategy::Idf),
            "neighbour" | "neighbor" => Ok(Strategy::Neighbour),
            "random" => Ok(Strategy::Random),
            other => Err(Error::InvalidConfig(format!("unknown strategy {}", other))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub strategies: Vec<(Strategy, usize)>,
    pub max_hops: usize,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn new(strategies: Vec<(Strategy, usize)>, max_hops: usize, seed: u64) -> Result<Self> {
        if strategies.iter().any(|(_, n)| *n == 0) {
            return Err(Error::InvalidConfig("strategy counts must be positive".into()));
        }
        if strategies.is_empty() {
            return Err(Error::InvalidConfig("sampling plan has no strategies".into()));
        }
        if max_hops == 0 {
            return Err(Error::InvalidConfig("max_hops must be positive".into()));
        }
        Ok(Self {
            strategies,
            max_hops,
            seed,
        })
    }

    /// Total number of negatives per record.
    pub fn total(&self) -> usize {
        self.strategies.iter().map(|(_, n)| n).sum()
    }
}

/// One reference mapping with its ordered negative candidates. The positive
/// candidate is `mapping.tgt`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRecord {
    pub mapping: Mapping,
    pub candidates: Vec<String>,
}

impl CandidateRecord {
    pub fn positive(&self) -> &str {
        &self.mapping.tgt
    }
}

/// Breadth-first search over the undirected subsumption graph (root
/// excluded), ring by ring, until `n` classes are collected or `max_hops`
/// rings have been expanded. A ring that would overflow `n` is subsampled
/// uniformly. Classes come out ring by ring, in IRI order within a ring.
pub fn neighbour_sample<R: Rng>(
    onto: &OntologySnapshot,
    anchor: &str,
    n: usize,
    max_hops: usize,
    rng: &mut R,
) -> Result<Vec<String>> {
    onto.class(anchor)?;
    let mut visited: BTreeSet<&str> = BTreeSet::from([anchor]);
    let mut frontier: Vec<&str> = vec![anchor];
    let mut out: Vec<String> = Vec::new();
    for _hop in 0..max_hops {
        if out.len() >= n {
            break;
        }
        let mut ring: BTreeSet<&str> = BTreeSet::new();
        for node in &frontier {
            for nb in onto.neighbours(node)? {
                if !visited.contains(nb) {
                    ring.insert(nb);
                }
            }
        }
        if ring.is_empty() {
            break;
        }
        visited.extend(ring.iter().copied());
        let need = n - out.len();
        let ring_vec: Vec<&str> = ring.into_iter().collect();
        if ring_vec.len() <= need {
            out.extend(ring_vec.iter().map(|s| s.to_string()));
        } else {
            let mut picked = sample(rng, ring_vec.len(), need).into_vec();
            picked.sort_unstable();
            out.extend(picked.into_iter().map(|i| ring_vec[i].to_string()));
            break;
        }
        frontier = ring_vec;
    }
    Ok(out)
}

/// Up to `n` distinct classes drawn uniformly without replacement from the
/// classes of `onto` outside `exclude`.
pub fn random_sample<R: Rng>(
    onto: &OntologySnapshot,
    n: usize,
    exclude: &BTreeSet<&str>,
    rng: &mut R,
) -> Vec<String> {
    let pool: Vec<&str> = onto.iris().filter(|iri| !exclude.contains(iri)).collect();
    let k = n.min(pool.len());
    sample(rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i].to_string())
        .collect()
}

/// Classes that must not serve as negatives for `m`: every reference target
/// of `m.src`, plus, for subsumption mappings, all transitive subsumers of
/// those targets and of the source's equivalence partners (when given).
pub fn compute_invalid_set(
    m: &Mapping,
    refs: &MappingSet,
    onto_tgt: &OntologySnapshot,
    equiv_partners: Option<&MappingSet>,
) -> BTreeSet<String> {
    let mut invalid: BTreeSet<String> = refs.targets_of(&m.src).map(str::to_string).collect();
    invalid.insert(m.tgt.clone());
    if m.relation == Relation::Subsumption {
        let mut anchors = invalid.clone();
        if let Some(eq) = equiv_partners {
            anchors.extend(eq.targets_of(&m.src).map(str::to_string));
        }
        for a in &anchors {
            if let Ok(ups) = onto_tgt.transitive_subsumers(a) {
                invalid.extend(ups.into_iter().map(str::to_string));
            }
        }
        invalid.extend(anchors);
    }
    invalid
}

/// Read-only inputs shared by all records of a sampling run.
#[derive(Debug, Clone, Copy)]
pub struct SamplingContext<'a> {
    /// Full reference set, used for invalid-candidate computation.
    pub refs: &'a MappingSet,
    /// Equivalence partners of subsumption sources, when available.
    pub equiv_partners: Option<&'a MappingSet>,
    pub index: &'a InvertedIndex,
    pub onto_tgt: &'a OntologySnapshot,
}

/// Draws `plan.total()` unique negatives for `m`, none of them invalid.
///
/// Each strategy in turn produces `|G| + |T| + N_i` raw samples; those
/// already collected or invalid are dropped, the rest truncated to `N_i`
/// and topped up with uniform random classes when short.
pub fn generate_negative_candidates(
    m: &Mapping,
    plan: &SamplingPlan,
    ctx: &SamplingContext<'_>,
) -> Result<CandidateRecord> {
    let onto = ctx.onto_tgt;
    onto.class(&m.tgt)?;
    let invalid = compute_invalid_set(m, ctx.refs, onto, ctx.equiv_partners);
    let available = onto.iris().filter(|iri| !invalid.contains(*iri)).count();
    if plan.total() > available {
        return Err(Error::InfeasiblePlan {
            src: m.src.clone(),
            tgt: m.tgt.clone(),
            requested: plan.total(),
            available,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(plan.seed, &["neg", &m.src, &m.tgt]));
    let empty = BTreeSet::new();
    let query: Vec<&str> = ctx
        .index
        .class_tokens(&m.tgt)
        .map(|t| t.iter().map(String::as_str).collect())
        .unwrap_or_default();

    let mut collected: Vec<String> = Vec::with_capacity(plan.total());
    let mut excluded: BTreeSet<&str> = invalid.iter().map(String::as_str).collect();
    for &(strategy, n_i) in &plan.strategies {
        let raw_n = collected.len() + invalid.len() + n_i;
        let raw = match strategy {
            Strategy::Idf => ctx.index.idf_sample(&query, raw_n),
            Strategy::Neighbour => neighbour_sample(onto, &m.tgt, raw_n, plan.max_hops, &mut rng)?,
            Strategy::Random => random_sample(onto, raw_n, &empty, &mut rng),
        };
        let mut fresh: Vec<String> = Vec::with_capacity(n_i);
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for iri in raw {
            if fresh.len() == n_i {
                break;
            }
            if !excluded.contains(iri.as_str()) && seen.insert(iri.clone()) {
                fresh.push(iri);
            }
        }
        if fresh.len() < n_i {
            let mut blocked = excluded.clone();
            blocked.extend(fresh.iter().map(String::as_str));
            let top_up = random_sample(onto, n_i - fresh.len(), &blocked, &mut rng);
            fresh.extend(top_up);
        }
        collected.extend(fresh);
        excluded = invalid.iter().map(String::as_str).collect();
        excluded.extend(collected.iter().map(String::as_str));
    }

    Ok(CandidateRecord {
        mapping: m.clone(),
        candidates: collected,
    })
}

/// Generates candidates for every mapping of `targets`, in their canonical
/// order. Output does not depend on `jobs`.
pub fn generate_all(
    targets: &MappingSet,
    plan: &SamplingPlan,
    ctx: &SamplingContext<'_>,
    jobs: usize,
) -> Result<Vec<CandidateRecord>> {
    let mappings: Vec<Mapping> = targets.iter().collect();
    crate::parallel::run(jobs, || {
        mappings
            .par_iter()
            .map(|m| generate_negative_candidates(m, plan, ctx))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClassRecord, OWL_THING, RDFS_LABEL};
    use crate::sampling::{build_inverted_index, Tokenizer};
    use std::collections::BTreeMap;

    fn onto(edges: &[(&str, &str)], isolated: &[&str]) -> OntologySnapshot {
        let mut records: BTreeMap<String, ClassRecord> = BTreeMap::new();
        for (child, parent) in edges {
            records
                .entry(parent.to_string())
                .or_insert_with(|| ClassRecord::new(*parent));
            records
                .entry(child.to_string())
                .or_insert_with(|| ClassRecord::new(*child))
                .parents
                .insert(parent.to_string());
        }
        for iri in isolated {
            records
                .entry(iri.to_string())
                .or_insert_with(|| ClassRecord::new(*iri));
        }
        OntologySnapshot::new("o", OWL_THING, records.into_values()).unwrap()
    }

    fn chain() -> OntologySnapshot {
        onto(&[("A", "B"), ("B", "C"), ("C", "D"), ("D", "E")], &[])
    }

    #[test]
    fn neighbour_first_ring() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = neighbour_sample(&chain(), "C", 2, 6, &mut rng).unwrap();
        assert_eq!(out, vec!["B", "D"]);
    }

    #[test]
    fn neighbour_overflowing_ring_is_seeded() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            neighbour_sample(&chain(), "C", 3, 6, &mut rng).unwrap()
        };
        let first = draw(5);
        assert_eq!(first.len(), 3);
        assert_eq!(&first[..2], &["B", "D"]);
        assert!(first[2] == "A" || first[2] == "E");
        assert_eq!(first, draw(5));
        let thirds: BTreeSet<String> = (0..32).map(|s| draw(s)[2].clone()).collect();
        assert_eq!(thirds.len(), 2);
    }

    #[test]
    fn neighbour_respects_root_and_hops() {
        let o = OntologySnapshot::new(
            "o",
            OWL_THING,
            [
                ClassRecord::new("A").with_parent(OWL_THING),
                ClassRecord::new("B").with_parent(OWL_THING),
            ],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(neighbour_sample(&o, "A", 5, 6, &mut rng).unwrap().is_empty());
        let out = neighbour_sample(&chain(), "A", 10, 2, &mut rng).unwrap();
        assert_eq!(out, vec!["B", "C"]);
        assert!(neighbour_sample(&chain(), "Z", 1, 1, &mut rng).is_err());
    }

    #[test]
    fn invalid_sets() {
        let o = onto(&[("T", "P"), ("P", "G")], &["U", "V"]);
        let m = Mapping::new("c", "T", Relation::Equivalence);
        let refs = MappingSet::from_pairs(Relation::Equivalence, [("c", "T")]);
        assert_eq!(
            compute_invalid_set(&m, &refs, &o, None),
            BTreeSet::from(["T".to_string()])
        );
        let refs2 = MappingSet::from_pairs(Relation::Equivalence, [("c", "T"), ("c", "U")]);
        assert_eq!(
            compute_invalid_set(&m, &refs2, &o, None),
            BTreeSet::from(["T".to_string(), "U".to_string()])
        );
        let sm = Mapping::new("c", "T", Relation::Subsumption);
        let srefs = MappingSet::from_pairs(Relation::Subsumption, [("c", "T")]);
        let t = compute_invalid_set(&sm, &srefs, &o, None);
        assert!(["T", "P", "G"].iter().all(|x| t.contains(*x)));
        assert!(!t.contains("U"));
    }

    fn toy() -> (OntologySnapshot, InvertedIndex) {
        let o = OntologySnapshot::new(
            "o",
            OWL_THING,
            [
                ClassRecord::new("a").with_label(RDFS_LABEL, "heart disease"),
                ClassRecord::new("b").with_parent("a").with_label(RDFS_LABEL, "heart attack"),
                ClassRecord::new("c").with_parent("a").with_label(RDFS_LABEL, "heart failure"),
                ClassRecord::new("d").with_parent("b").with_label(RDFS_LABEL, "lung cancer"),
                ClassRecord::new("e").with_label(RDFS_LABEL, "skin lesion"),
                ClassRecord::new("f").with_parent("e").with_label(RDFS_LABEL, "acanthoma"),
                ClassRecord::new("g").with_label(RDFS_LABEL, "bone"),
                ClassRecord::new("h").with_label(RDFS_LABEL, "liver"),
            ],
        )
        .unwrap();
        let idx = build_inverted_index(&o, &[], &Tokenizer::words());
        (o, idx)
    }

    #[test]
    fn toy_plan_gives_four_valid_unique_negatives() {
        let (o, idx) = toy();
        let refs = MappingSet::from_pairs(Relation::Equivalence, [("src", "b")]);
        let ctx = SamplingContext {
            refs: &refs,
            equiv_partners: None,
            index: &idx,
            onto_tgt: &o,
        };
        let plan = SamplingPlan::new(vec![(Strategy::Idf, 2), (Strategy::Neighbour, 2)], 6, 3).unwrap();
        let m = Mapping::new("src", "b", Relation::Equivalence);
        let rec = generate_negative_candidates(&m, &plan, &ctx).unwrap();
        assert_eq!(rec.candidates.len(), 4);
        let uniq: BTreeSet<&String> = rec.candidates.iter().collect();
        assert_eq!(uniq.len(), 4);
        assert!(!rec.candidates.contains(&"b".to_string()));
        // idf ranks a and c first (shared "heart")
        assert_eq!(&rec.candidates[..2], &["a", "c"]);
        // b's neighbours are a and d; a is taken, so d then random top-up
        assert_eq!(rec.candidates[2], "d");
        assert_eq!(rec, generate_negative_candidates(&m, &plan, &ctx).unwrap());
    }

    #[test]
    fn starved_strategy_is_topped_up() {
        let (o, idx) = toy();
        let refs = MappingSet::from_pairs(Relation::Equivalence, [("src", "g")]);
        let ctx = SamplingContext {
            refs: &refs,
            equiv_partners: None,
            index: &idx,
            onto_tgt: &o,
        };
        // g is isolated: neighbour search yields nothing
        let plan = SamplingPlan::new(vec![(Strategy::Neighbour, 5)], 6, 9).unwrap();
        let m = Mapping::new("src", "g", Relation::Equivalence);
        let rec = generate_negative_candidates(&m, &plan, &ctx).unwrap();
        assert_eq!(rec.candidates.len(), 5);
        assert!(!rec.candidates.contains(&"g".to_string()));
    }

    #[test]
    fn infeasible_plan_errors() {
        let (o, idx) = toy();
        let refs = MappingSet::from_pairs(Relation::Equivalence, [("src", "g")]);
        let ctx = SamplingContext {
            refs: &refs,
            equiv_partners: None,
            index: &idx,
            onto_tgt: &o,
        };
        let plan = SamplingPlan::new(vec![(Strategy::Random, 8)], 6, 0).unwrap();
        let m = Mapping::new("src", "g", Relation::Equivalence);
        assert!(matches!(
            generate_negative_candidates(&m, &plan, &ctx),
            Err(Error::InfeasiblePlan { .. })
        ));
        let exact = SamplingPlan::new(vec![(Strategy::Random, 7)], 6, 0).unwrap();
        assert_eq!(generate_negative_candidates(&m, &exact, &ctx).unwrap().candidates.len(), 7);
    }

    #[test]
    fn plan_validation() {
        assert!(SamplingPlan::new(vec![], 6, 0).is_err());
        assert!(SamplingPlan::new(vec![(Strategy::Idf, 0)], 6, 0).is_err());
        assert!(SamplingPlan::new(vec![(Strategy::Idf, 1)], 0, 0).is_err());
        assert_eq!("neighbor".parse::<Strategy>().unwrap(), Strategy::Neighbour);
    }
}
