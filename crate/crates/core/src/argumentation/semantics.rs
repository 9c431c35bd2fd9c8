use std::collections::BTreeSet;

use super::{ArgError, DungFramework, Extension, Semantics};

/// Default cap on |A| for preferred enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

/// Bitmask representation is bounded by the word size.
const MAX_BITMASK_ARGS: usize = 64;

fn extension_from_indices<I>(g: &DungFramework, idx: I, semantics: Semantics) -> Extension
where
    I: IntoIterator<Item = usize>,
{
    Extension {
        members: idx.into_iter().map(|i| g.arguments()[i].id.clone()).collect(),
        semantics,
    }
}

/// Grounded extension by label propagation: an argument is IN once every
/// attacker is OUT, and OUT once some attacker is IN.
pub fn grounded_extension(g: &DungFramework) -> Extension {
    let n = g.len();
    let mut out_edges = vec![Vec::new(); n];
    let mut live_attackers = vec![0usize; n];
    for (a, b) in g.attack_indices() {
        out_edges[a].push(b);
        live_attackers[b] += 1;
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Label {
        Undec,
        In,
        Out,
    }
    let mut label = vec![Label::Undec; n];
    let mut queue: Vec<usize> = (0..n).filter(|&i| live_attackers[i] == 0).collect();
    for &i in &queue {
        label[i] = Label::In;
    }
    while let Some(a) = queue.pop() {
        for &b in &out_edges[a] {
            if label[b] != Label::Undec {
                continue;
            }
            label[b] = Label::Out;
            for &c in &out_edges[b] {
                live_attackers[c] -= 1;
                if live_attackers[c] == 0 && label[c] == Label::Undec {
                    label[c] = Label::In;
                    queue.push(c);
                }
            }
        }
    }
    extension_from_indices(g, (0..n).filter(|&i| label[i] == Label::In), Semantics::Grounded)
}

pub fn is_conflict_free(g: &DungFramework, members: &BTreeSet<String>) -> bool {
    !g.attacks()
        .iter()
        .any(|(a, b)| members.contains(a) && members.contains(b))
}

/// Conflict-free and defends each member against every attacker.
pub fn is_admissible(g: &DungFramework, members: &BTreeSet<String>) -> bool {
    is_conflict_free(g, members)
        && g.attacks().iter().filter(|(_, b)| members.contains(b)).all(|(x, _)| {
            g.attacks()
                .iter()
                .any(|(d, y)| y == x && members.contains(d))
        })
}

struct Masks {
    /// attackers[i]: bitmask of arguments attacking i
    attackers: Vec<u64>,
    /// attacked[i]: bitmask of arguments i attacks
    attacked: Vec<u64>,
}

impl Masks {
    fn new(g: &DungFramework) -> Self {
        let n = g.len();
        let mut attackers = vec![0u64; n];
        let mut attacked = vec![0u64; n];
        for (a, b) in g.attack_indices() {
            attackers[b] |= 1 << a;
            attacked[a] |= 1 << b;
        }
        Masks { attackers, attacked }
    }

    fn union(v: &[u64], set: u64) -> u64 {
        let mut acc = 0;
        let mut rest = set;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            acc |= v[i];
            rest &= rest - 1;
        }
        acc
    }

    fn admissible(&self, set: u64) -> bool {
        Self::union(&self.attackers, set) & !Self::union(&self.attacked, set) == 0
    }
}

/// All maximal admissible sets, in canonical order (lexicographic by sorted
/// member ids).
///
/// Grounded members are forced in and their victims forced out; the remaining
/// arguments are explored by conflict-free backtracking with an admissibility
/// check at each leaf.
pub fn preferred_extensions(g: &DungFramework, limit: usize) -> Result<Vec<Extension>, ArgError> {
    let n = g.len();
    let limit = limit.min(MAX_BITMASK_ARGS);
    if n > limit {
        return Err(ArgError::TooLarge { size: n, limit });
    }
    let masks = Masks::new(g);
    let grounded = grounded_extension(g);
    let base: u64 = grounded
        .members
        .iter()
        .map(|id| 1u64 << g.index_of(id).unwrap())
        .fold(0, |a, b| a | b);
    let excluded = Masks::union(&masks.attacked, base);
    let open: Vec<usize> = (0..n)
        .filter(|&i| base & (1 << i) == 0 && excluded & (1 << i) == 0)
        .filter(|&i| masks.attacked[i] & (1 << i) == 0)
        .collect();

    let mut admissible = Vec::new();
    let mut stack: Vec<(usize, u64)> = vec![(0, base)];
    while let Some((depth, set)) = stack.pop() {
        if depth == open.len() {
            if masks.admissible(set) {
                admissible.push(set);
            }
            continue;
        }
        let a = open[depth];
        stack.push((depth + 1, set));
        let clash = masks.attackers[a] | masks.attacked[a];
        if clash & set == 0 {
            stack.push((depth + 1, set | (1 << a)));
        }
    }

    admissible.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
    let mut maximal: Vec<u64> = Vec::new();
    for s in admissible {
        if !maximal.iter().any(|m| s & !m == 0) {
            maximal.push(s);
        }
    }
    let mut out: Vec<Extension> = maximal
        .into_iter()
        .map(|s| extension_from_indices(g, (0..n).filter(|i| s & (1 << i) != 0), Semantics::Preferred))
        .collect();
    out.sort();
    Ok(out)
}
