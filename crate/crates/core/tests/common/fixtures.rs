//! Seeded random submissions.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xpeerd_core::argumentation::{Edge, Relations};
use xpeerd_core::belief::{hypothesis_space, LikelihoodTable};
use xpeerd_core::scoring::{DataFlag, DetectorReport, LangFlag};
use xpeerd_core::{Claim, Domain, EvidenceKind, EvidenceUnit, Manuscript, Submission};

const KINDS: [EvidenceKind; 3] = [EvidenceKind::TextSpan, EvidenceKind::Figure, EvidenceKind::Table];
const DOMAINS: [Domain; 3] = [Domain::Stem, Domain::Hum, Domain::Soc];

/// A valid submission drawn from `seed`. `anchored` is the chance that each
/// claim page carries evidence citing the claim.
pub fn random_submission(seed: u64, anchored: f64) -> Submission {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_pages: u32 = rng.gen_range(1..=6);
    let pages: Vec<u32> = (1..=n_pages).collect();
    let n_claims = rng.gen_range(1..=5);
    let mut claims = Vec::new();
    let mut evidence = Vec::new();
    for i in 1..=n_claims {
        let id = format!("c{i}");
        let k = rng.gen_range(1..=2.min(n_pages as usize));
        let claim_pages: BTreeSet<u32> = pages.choose_multiple(&mut rng, k).copied().collect();
        for p in &claim_pages {
            if rng.gen_bool(anchored) {
                let kind = *KINDS.choose(&mut rng).unwrap();
                let eid = format!("e{:02}", evidence.len() + 1);
                evidence.push(EvidenceUnit::new(eid, kind, *p, format!("Result for {id} on page {p}")).referencing([id.clone()]));
            }
        }
        let mut c = Claim::new(id.clone(), format!("Claim {i} states finding {}. It has support.", rng.gen_range(1..100)), claim_pages);
        if rng.gen_bool(0.4) {
            c = c.critical();
        }
        claims.push(c);
    }
    for _ in 0..rng.gen_range(0..3) {
        let kind = *KINDS.choose(&mut rng).unwrap();
        let eid = format!("e{:02}", evidence.len() + 1);
        let p = *pages.choose(&mut rng).unwrap();
        evidence.push(EvidenceUnit::new(eid, kind, p, "Unlinked material"));
    }
    let domain = if rng.gen_bool(0.8) { Some(*DOMAINS.choose(&mut rng).unwrap()) } else { None };
    let m = Manuscript::new(pages, claims, evidence, domain).unwrap();

    let support = hypothesis_space(&m);
    let mut likelihoods = LikelihoodTable::new();
    for e in m.evidence() {
        if rng.gen_bool(0.5) {
            for x in &support {
                likelihoods.insert(e.id.clone(), x.clone(), rng.gen_range(0.05..1.0));
            }
        }
    }
    let ids: Vec<String> = m.claims().iter().map(|c| c.id.clone()).collect();
    let mut relations = Relations::default();
    for a in &ids {
        for b in &ids {
            if a != b && rng.gen_bool(0.2) {
                relations.attacks.push(Edge { from: a.clone(), to: b.clone() });
            } else if a != b && rng.gen_bool(0.1) {
                relations.supports.push(Edge { from: a.clone(), to: b.clone() });
            }
        }
    }
    let mut detectors = DetectorReport::default();
    for f in DataFlag::ALL {
        if rng.gen_bool(0.1) {
            detectors.data_flags.insert(f);
        }
    }
    for f in LangFlag::ALL {
        if rng.gen_bool(0.1) {
            detectors.lang_flags.insert(f);
        }
    }
    let mut checklist = BTreeMap::new();
    if rng.gen_bool(0.3) {
        checklist.insert("novelty_stated".to_string(), rng.gen_bool(0.5));
    }
    Submission::new(m, likelihoods, relations, detectors, checklist).unwrap()
}
