//! Simple-path predicates behind the coupling criteria.
//!
//! Path enumeration is exponential in the worst case; the predicates here are
//! meant for universes of at most a dozen variables.

use crate::cimodel::{CiTriple, VarSet};

use super::Graph;

/// Upper bound on the universe size for the path predicates.
pub const PATH_PREDICATE_CAP: usize = 12;

/// Whether the interior node `v`, entered from `prev` and left towards
/// `next`, lets a path through given a conditioning set with ancestral
/// closure `an_c`.
fn passes(g: &Graph, an_c: VarSet, c: VarSet, prev: usize, v: usize, next: usize) -> bool {
    if g.is_collider(prev, v, next) {
        an_c.contains(v)
    } else {
        !c.contains(v)
    }
}

/// Whether the path (a node sequence along edges of `g`) is active given `c`.
pub fn path_active(g: &Graph, path: &[usize], c: VarSet) -> bool {
    let an_c = g.ancestral_closure(c);
    path.windows(3)
        .all(|w| passes(g, an_c, c, w[0], w[1], w[2]))
}

/// Depth-first enumeration of simple paths from `a` to `b`.
///
/// `admissible` sees every prefix right after it is extended and may prune
/// it. `found` sees every complete path and returns `true` to stop. Returns
/// whether the search was stopped.
pub(crate) fn search_paths<F, G>(g: &Graph, a: usize, b: usize, mut admissible: F, mut found: G) -> bool
where
    F: FnMut(&[usize]) -> bool,
    G: FnMut(&[usize]) -> bool,
{
    fn rec<F, G>(g: &Graph, b: usize, path: &mut Vec<usize>, on: VarSet, adm: &mut F, found: &mut G) -> bool
    where
        F: FnMut(&[usize]) -> bool,
        G: FnMut(&[usize]) -> bool,
    {
        let u = *path.last().expect("non-empty path");
        for w in g.neighbours(u).minus(on).iter() {
            path.push(w);
            if adm(path) {
                if w == b {
                    if found(path) {
                        return true;
                    }
                } else if rec(g, b, path, on.with(w), adm, found) {
                    return true;
                }
            }
            path.pop();
        }
        false
    }
    if a == b {
        return false;
    }
    let mut path = vec![a];
    rec(g, b, &mut path, VarSet::singleton(a), &mut admissible, &mut found)
}

/// Every simple path from `a` to `b` that is active given `c`.
pub fn active_paths(g: &Graph, a: usize, b: usize, c: VarSet) -> Vec<Vec<usize>> {
    let an_c = g.ancestral_closure(c);
    let mut out = Vec::new();
    search_paths(
        g,
        a,
        b,
        |p| {
            let k = p.len();
            k < 3 || passes(g, an_c, c, p[k - 3], p[k - 2], p[k - 1])
        },
        |p| {
            out.push(p.to_vec());
            false
        },
    );
    out
}

/// Whether some simple path from `a` to `b` is active given `c` and contains
/// no contiguous sub-path between a node of `s.x` and a node of `s.y` that is
/// active given `s.z`.
pub fn s_active_path_exists(g: &Graph, a: usize, b: usize, c: VarSet, s: &CiTriple) -> bool {
    let an_c = g.ancestral_closure(c);
    let an_z = g.ancestral_closure(s.z);
    let segment_active = |seg: &[usize]| {
        seg.windows(3)
            .all(|w| passes(g, an_z, s.z, w[0], w[1], w[2]))
    };
    search_paths(
        g,
        a,
        b,
        |p| {
            let k = p.len();
            if k >= 3 && !passes(g, an_c, c, p[k - 3], p[k - 2], p[k - 1]) {
                return false;
            }
            let w = p[k - 1];
            let other = if s.x.contains(w) {
                s.y
            } else if s.y.contains(w) {
                s.x
            } else {
                return true;
            };
            // A completed active X..Y segment stays in every extension.
            !p[..k - 1]
                .iter()
                .enumerate()
                .any(|(i, &v)| other.contains(v) && segment_active(&p[i..]))
        },
        |_| true,
    )
}

/// `a` and `b` are connected given `c`, but only through paths that carry an
/// active sub-path of `s`.
pub fn coupled_over(g: &Graph, a: usize, b: usize, c: VarSet, s: &CiTriple) -> bool {
    !g.separates(VarSet::singleton(a), VarSet::singleton(b), c) && !s_active_path_exists(g, a, b, c, s)
}
