//! Walk algebra and arm patterns.
//!
//! The arm pattern `P_m(i)` is the image under `Φ₀ᵐ` of arm `i` of `X_m`,
//! read from `v0`. Here arm `i ≤ n-2` of `X_m` is the arc of `⟨v0, v_i⟩`,
//! and arms `n-1`, `n` continue through `v_{n-1}`, `v_n` to the leaves.
//! Patterns are computed two ways: directly through the generated system,
//! and by the level recursion in which every level-`m` pattern is a wedge of
//! level-`(m-1)` patterns and their reversals.
//!
//! [`normal_form`] splits a pattern into a common prefix, palindromic blocks
//! and a fixed suffix. The block family is mined, not transcribed: the
//! interior is cut at `v0` occurrences into the fewest palindromes whose
//! center is the unique occurrence of its distinguished vertex.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{build_family, v};
use crate::graph::{Graph, VertexId, Walk};
use crate::map::SimplicialMap;
use crate::par::{self, Execution};
use crate::subdivision::{InverseSystem, DEFAULT_EDGE_GUARD};

/// Longest pattern the recursion will build, in vertices.
pub const PATTERN_LENGTH_GUARD: usize = 20_000_000;

/// `p ⋁ q`: concatenation at the shared junction vertex.
pub fn wedge(p: &Walk, q: &Walk) -> Result<Walk> {
    match (p.last(), q.first()) {
        (Some(x), Some(y)) if x == y => {
            let mut out = p.0.clone();
            out.extend_from_slice(&q.0[1..]);
            Ok(Walk(out))
        }
        (Some(x), Some(y)) => Err(Error::JunctionMismatch(x.clone(), y.clone())),
        _ => Err(Error::InvalidWalk("empty walk in wedge".into())),
    }
}

/// Pointwise image of a walk under a map that collapses none of its steps.
pub fn apply_walk(f: &SimplicialMap, p: &Walk) -> Result<Walk> {
    p.check(f.domain())?;
    let out: Vec<VertexId> = p.vertices().iter().map(|x| f.image(x).cloned()).collect::<Result<_>>()?;
    for (k, pair) in out.windows(2).enumerate() {
        if pair[0] == pair[1] {
            return Err(Error::NotLight(p.0[k].clone(), p.0[k + 1].clone()));
        }
    }
    Ok(Walk(out))
}

/// The cyclic bijection of `1..=n-2`: `p(i) = i + 1`, `p(n-2) = 1`.
pub fn permutation_p(n: usize, i: usize) -> usize {
    if i >= n - 2 {
        1
    } else {
        i + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArmPattern {
    pub n: usize,
    pub m: usize,
    pub arm: usize,
    pub walk: Walk,
}

fn check_args(n: usize, i: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Precondition(format!("n = {n}, need n >= 3")));
    }
    if i < 1 || i > n {
        return Err(Error::Precondition(format!("arm {i} outside 1..={n}")));
    }
    Ok(())
}

/// Arm `i` of `ₙX₀` as vertex indices (names `v0..` sort to their index).
fn base_arm(n: usize, i: usize) -> Vec<usize> {
    match i {
        i if i <= n - 2 => vec![0, i],
        i if i == n - 1 => vec![0, n - 1, n + 1],
        _ => vec![0, n, n + 2],
    }
}

fn to_walk(x0: &Graph, idx: &[usize]) -> Walk {
    Walk(idx.iter().map(|&k| x0.name(k).clone()).collect())
}

/// The generated system for `ₙφ`, kept to compute direct patterns at
/// several levels without regenerating.
pub struct PatternSystem {
    n: usize,
    system: InverseSystem,
}

impl PatternSystem {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_guard(n, DEFAULT_EDGE_GUARD)
    }

    pub fn with_guard(n: usize, edge_guard: usize) -> Result<Self> {
        check_args(n, 1)?;
        let f = build_family(n)?;
        Ok(PatternSystem { n, system: InverseSystem::with_guard(f.phi, f.x1_over_x0, edge_guard)? })
    }

    pub fn system(&self) -> &InverseSystem {
        &self.system
    }

    pub fn extend_to(&mut self, m: usize) -> Result<()> {
        self.system.extend_to(m)
    }

    /// Requires level `m` to be built.
    pub fn pattern(&self, m: usize, i: usize) -> Result<ArmPattern> {
        check_args(self.n, i)?;
        if m > self.system.depth() {
            return Err(Error::Precondition(format!("level {m} not generated")));
        }
        let idx = self.system.image_of_base_walk(m, &base_arm(self.n, i))?;
        let x0 = &self.system.level(0).graph;
        Ok(ArmPattern { n: self.n, m, arm: i, walk: to_walk(x0, &idx) })
    }

    pub fn patterns(&mut self, m: usize, exec: Execution) -> Result<Vec<ArmPattern>> {
        self.extend_to(m)?;
        self.system.composite(0, m)?;
        let arms: Vec<usize> = (1..=self.n).collect();
        par::map(exec, &arms, |&i| self.pattern(m, i)).into_iter().collect()
    }
}

pub fn pattern_direct(n: usize, m: usize, i: usize) -> Result<ArmPattern> {
    check_args(n, i)?;
    let mut sys = PatternSystem::new(n)?;
    sys.extend_to(m)?;
    sys.pattern(m, i)
}

fn pal(w: &[usize]) -> Vec<usize> {
    let mut out = w.to_vec();
    out.extend(w.iter().rev().skip(1));
    out
}

fn push_wedge(acc: &mut Vec<usize>, w: &[usize]) {
    debug_assert_eq!(acc.last(), w.first());
    acc.extend_from_slice(&w[1..]);
}

/// Level-`m` patterns of every arm from level `m - 1` ones.
fn recursion_step(n: usize, prev: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let x = |i: usize| prev[i - 1].as_slice();
    let last = x(n);
    let pre = &x(n - 1)[..x(n - 1).len() - 1];
    let head = pal(pre);
    let mut out = Vec::with_capacity(n);
    for i in 1..=n - 3 {
        let mut p = head.clone();
        for j in 0..=n - 3 {
            push_wedge(&mut p, &pal(x(crate::family::residue(i + j, n))));
        }
        push_wedge(&mut p, last);
        out.push(p);
    }
    out.push(x(n - 1).to_vec());
    let mut p = head.clone();
    push_wedge(&mut p, last);
    out.push(p);
    let mut p = head;
    push_wedge(&mut p, &pal(x(n - 2)));
    for j in 1..=n - 3 {
        push_wedge(&mut p, &pal(x(j)));
    }
    push_wedge(&mut p, last);
    out.push(p);
    out
}

/// Patterns of all arms for levels `0..=m` by the recursion.
pub fn patterns_recursive(n: usize, m: usize) -> Result<Vec<Vec<ArmPattern>>> {
    check_args(n, 1)?;
    let mut levels = vec![(1..=n).map(|i| base_arm(n, i)).collect::<Vec<_>>()];
    for _ in 0..m {
        let next = recursion_step(n, levels.last().unwrap());
        let total: usize = next.iter().map(Vec::len).sum();
        if total > PATTERN_LENGTH_GUARD {
            return Err(Error::SizeGuard(format!("level {} patterns total {total} vertices", levels.len())));
        }
        levels.push(next);
    }
    let names: Vec<VertexId> = (0..=n + 2).map(v).collect();
    Ok(levels
        .into_iter()
        .enumerate()
        .map(|(level, arms)| {
            arms.into_iter()
                .enumerate()
                .map(|(k, idx)| ArmPattern { n, m: level, arm: k + 1, walk: Walk(idx.iter().map(|&x| names[x].clone()).collect()) })
                .collect()
        })
        .collect())
}

pub fn pattern_recursive(n: usize, m: usize, i: usize) -> Result<ArmPattern> {
    check_args(n, i)?;
    if m == 0 {
        return Err(Error::Precondition("the recursion starts at level 1".into()));
    }
    let mut levels = patterns_recursive(n, m)?;
    Ok(levels.pop().unwrap().swap_remove(i - 1))
}

/// Whether `p` reads the same reversed, with its center for odd length.
pub fn is_palindrome(p: &Walk) -> (bool, Option<VertexId>) {
    let s = p.vertices();
    let yes = s.iter().eq(s.iter().rev());
    let center = (yes && s.len() % 2 == 1).then(|| s[s.len() / 2].clone());
    (yes, center)
}

/// `⟨v0, v_{n-1}, v0, v_{p^k(n-2)}, v0 (k = 0..n-3), v_n, v_{n+2}⟩`.
pub fn claim9_suffix(n: usize) -> Walk {
    let mut s = vec![v(0), v(n - 1), v(0)];
    let mut j = n - 2;
    for _ in 0..n - 2 {
        s.push(v(j));
        s.push(v(0));
        j = permutation_p(n, j);
    }
    s.push(v(n));
    s.push(v(n + 2));
    Walk(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalForm {
    pub n: usize,
    pub m: usize,
    pub arm: usize,
    pub prefix: Walk,
    pub blocks: Vec<Walk>,
    pub suffix: Walk,
}

/// Odd-palindrome radii: `d[c]` is the largest `r` with `s[c-r..=c+r]` a
/// palindrome, plus one.
fn manacher_odd(s: &[usize]) -> Vec<usize> {
    let len = s.len();
    let mut d = vec![0usize; len];
    let (mut l, mut r) = (0isize, -1isize);
    for i in 0..len {
        let mut k = if (i as isize) > r { 1 } else { d[(l + r - i as isize) as usize].min((r - i as isize + 1) as usize) };
        while i >= k && i + k < len && s[i - k] == s[i + k] {
            k += 1;
        }
        d[i] = k;
        if (i + k - 1) as isize > r {
            l = i as isize - k as isize + 1;
            r = (i + k - 1) as isize;
        }
    }
    d
}

/// Fewest-block factorization of `s` (from `v0` to `v0`) into admissible
/// palindromes. Ties prefer the longest first block.
fn factor_blocks(n: usize, s: &[usize]) -> Option<Vec<(usize, usize)>> {
    if s.len() == 1 {
        return (s[0] == 0).then(Vec::new);
    }
    let cuts: Vec<usize> = (0..s.len()).filter(|&k| s[k] == 0).collect();
    if cuts.first() != Some(&0) || cuts.last() != Some(&(s.len() - 1)) {
        return None;
    }
    let d = manacher_odd(s);
    let specials = [n + 1, n + 2, n];
    let mut counts = vec![vec![0usize; s.len() + 1]; 3];
    for (k, &x) in s.iter().enumerate() {
        for (t, &sp) in specials.iter().enumerate() {
            counts[t][k + 1] = counts[t][k] + usize::from(x == sp);
        }
    }
    let count = |t: usize, a: usize, b: usize| counts[t][b + 1] - counts[t][a];
    let admissible = |a: usize, b: usize| -> bool {
        if !(b - a).is_multiple_of(2) {
            return false;
        }
        let c = (a + b) / 2;
        if d[c] <= (b - a) / 2 {
            return false;
        }
        // distinguished vertex: v_{n+1}, else v_{n+2}, else v_n
        match (0..3).find(|&t| count(t, a, b) > 0) {
            Some(t) => s[c] == specials[t] && count(t, a, b) == 1,
            None => false,
        }
    };
    let p = cuts.len();
    let mut best = vec![usize::MAX; p];
    let mut next = vec![usize::MAX; p];
    best[p - 1] = 0;
    for x in (0..p - 1).rev() {
        for y in (x + 1..p).rev() {
            if best[y] == usize::MAX || best[y] + 1 >= best[x] {
                continue;
            }
            if admissible(cuts[x], cuts[y]) {
                best[x] = best[y] + 1;
                next[x] = y;
            }
        }
    }
    if best[0] == usize::MAX {
        return None;
    }
    let mut out = Vec::new();
    let mut x = 0;
    while x != p - 1 {
        out.push((cuts[x], cuts[next[x]]));
        x = next[x];
    }
    Some(out)
}

fn indices(p: &Walk, n: usize) -> Result<Vec<usize>> {
    p.vertices()
        .iter()
        .map(|x| {
            x.as_str()
                .strip_prefix('v')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k <= n + 2)
                .ok_or_else(|| Error::InvalidWalk(format!("{x} is not a vertex of X0")))
        })
        .collect()
}

/// Splits `p` as `prefix ⋁ blocks ⋁ suffix` given a prefix ending at `v0`.
pub fn normal_form_with_prefix(p: &ArmPattern, prefix: &Walk) -> Result<NormalForm> {
    let n = p.n;
    if p.m < 3 {
        return Err(Error::Precondition(format!("normal form needs level >= 3, got {}", p.m)));
    }
    let s = indices(&p.walk, n)?;
    let pre = indices(prefix, n)?;
    let suf = indices(&claim9_suffix(n), n)?;
    if !s.ends_with(&suf) {
        return Err(Error::NormalForm(format!("arm {} at level {} lacks the suffix", p.arm, p.m)));
    }
    if pre.is_empty() || !s.starts_with(&pre) || pre.last() != Some(&0) {
        return Err(Error::NormalForm(format!("arm {} at level {} does not start with the prefix", p.arm, p.m)));
    }
    let (a, b) = (pre.len() - 1, s.len() - suf.len());
    if a > b {
        return Err(Error::NormalForm("prefix overlaps suffix".into()));
    }
    let interior = &s[a..=b];
    let blocks = factor_blocks(n, interior)
        .ok_or_else(|| Error::NormalForm(format!("arm {} at level {}: interior does not split into blocks", p.arm, p.m)))?;
    let name = |xs: &[usize]| Walk(xs.iter().map(|&k| v(k)).collect());
    Ok(NormalForm {
        n,
        m: p.m,
        arm: p.arm,
        prefix: prefix.clone(),
        blocks: blocks.iter().map(|&(x, y)| name(&interior[x..=y])).collect(),
        suffix: claim9_suffix(n),
    })
}

/// Longest common prefix of all patterns, cut back to its last `v0`.
pub fn common_prefix(patterns: &[ArmPattern]) -> Walk {
    let first = patterns[0].walk.vertices();
    let mut len = first.len();
    for p in &patterns[1..] {
        len = len.min(first.iter().zip(p.walk.vertices()).take_while(|(x, y)| x == y).count());
    }
    let v0 = v(0);
    let cut = (0..len).rev().find(|&k| first[k] == v0).unwrap_or(0);
    Walk(first[..=cut].to_vec())
}

/// Normal forms for all arms of one level, mining the shared prefix: the
/// longest common `v0`-terminated prefix for which every arm factors.
pub fn normal_forms(patterns: &[ArmPattern]) -> Result<Vec<NormalForm>> {
    if patterns.is_empty() {
        return Err(Error::Precondition("no patterns".into()));
    }
    let prefix = common_prefix(patterns);
    let v0 = v(0);
    let mut last_err = None;
    for cut in (0..prefix.len()).rev().filter(|&k| prefix.0[k] == v0) {
        let candidate = Walk(prefix.0[..=cut].to_vec());
        match patterns.iter().map(|p| normal_form_with_prefix(p, &candidate)).collect::<Result<Vec<_>>>() {
            Ok(forms) => return Ok(forms),
            Err(e @ Error::Precondition(_)) => return Err(e),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::NormalForm("no admissible prefix".into())))
}

/// Normal form of one pattern, with the prefix mined across its level.
pub fn normal_form(p: &ArmPattern) -> Result<NormalForm> {
    if p.m < 3 {
        return Err(Error::Precondition(format!("normal form needs level >= 3, got {}", p.m)));
    }
    let level = patterns_recursive(p.n, p.m)?.pop().unwrap();
    if level[p.arm - 1].walk != p.walk {
        return Err(Error::NormalForm("pattern is not the arm pattern it claims to be".into()));
    }
    Ok(normal_forms(&level)?.swap_remove(p.arm - 1))
}

/// Wedge of the normal form's pieces, for round-trip checks.
pub fn reassemble(f: &NormalForm) -> Result<Walk> {
    let mut w = f.prefix.clone();
    for b in &f.blocks {
        w = wedge(&w, b)?;
    }
    wedge(&w, &f.suffix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn wedge_joins_and_rejects() {
        let ab = Walk::new(["a", "b"]);
        assert_eq!(wedge(&ab, &Walk::new(["b", "c"])).unwrap(), Walk::new(["a", "b", "c"]));
        assert!(matches!(wedge(&ab, &Walk::new(["c", "d"])), Err(Error::JunctionMismatch(_, _))));
        let p = wedge(&ab, &ab.reversed()).unwrap();
        assert!(is_palindrome(&p).0 && p.len() % 2 == 1);
    }

    #[test]
    fn apply_walk_on_phi3() {
        let f = build_family(3).unwrap();
        let w = apply_walk(&f.phi, &Walk::new(["v0", "u1", "u2"])).unwrap();
        assert_eq!(w, Walk::new(["v0", "v2", "v0"]));
        let id = SimplicialMap::identity(f.x0.graph().clone());
        let p = Walk::new(["v0", "v2", "v4"]);
        assert_eq!(apply_walk(&id, &p).unwrap(), p);
    }

    #[test]
    fn apply_walk_rejects_collapse() {
        let g = Arc::new(Graph::new(["a", "b"], [("a", "b")]).unwrap());
        let h = Arc::new(Graph::new(["c"], std::iter::empty::<(&str, &str)>()).unwrap());
        let f = SimplicialMap::new(g, h, [("a", "c"), ("b", "c")]).unwrap();
        assert!(matches!(apply_walk(&f, &Walk::new(["a", "b"])), Err(Error::NotLight(_, _))));
    }

    #[test]
    fn direct_examples() {
        assert_eq!(pattern_direct(3, 0, 3).unwrap().walk, Walk::new(["v0", "v3", "v5"]));
        assert_eq!(pattern_direct(3, 1, 3).unwrap().walk, Walk::new(["v0", "v2", "v0", "v1", "v0", "v3", "v5"]));
        assert_eq!(pattern_direct(3, 0, 1).unwrap().walk, Walk::new(["v0", "v1"]));
    }

    #[test]
    fn recursion_clause_ii() {
        assert_eq!(pattern_recursive(3, 2, 1).unwrap().walk, pattern_direct(3, 1, 2).unwrap().walk);
        assert_eq!(pattern_recursive(3, 2, 1).unwrap().walk, Walk::new(["v0", "v2", "v0", "v3", "v5"]));
    }

    #[test]
    fn permutation_cycles() {
        assert_eq!((1..=3).map(|i| permutation_p(5, i)).collect::<Vec<_>>(), [2, 3, 1]);
        assert_eq!(permutation_p(3, 1), 1);
    }

    #[test]
    fn palindromes() {
        assert_eq!(is_palindrome(&Walk::new(["v0", "v3", "v0"])), (true, Some("v3".into())));
        assert!(!is_palindrome(&Walk::new(["v0", "v2", "v4"])).0);
    }

    #[test]
    fn suffix_n3_has_single_v1() {
        assert_eq!(claim9_suffix(3), Walk::new(["v0", "v2", "v0", "v1", "v0", "v3", "v5"]));
        assert_eq!(claim9_suffix(5).to_text(), "v0,v4,v0,v3,v0,v1,v0,v2,v0,v5,v7");
    }

    #[test]
    fn normal_form_rejects_low_levels() {
        let p = pattern_recursive(3, 2, 3).unwrap();
        assert!(matches!(normal_form(&p), Err(Error::Precondition(_))));
    }

    #[test]
    fn manacher_matches_naive() {
        let s = [0, 1, 0, 2, 0, 1, 0, 3, 3];
        let d = manacher_odd(&s);
        for c in 0..s.len() {
            let mut r = 0;
            while c > r && c + r + 1 < s.len() && s[c - r - 1] == s[c + r + 1] {
                r += 1;
            }
            assert_eq!(d[c], r + 1);
        }
    }
}
