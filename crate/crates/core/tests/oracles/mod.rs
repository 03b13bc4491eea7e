//! Independent counting and relation oracles shared by the test targets.
#![allow(dead_code)]

use std::collections::HashMap;

use coloured_operads::algebra::builtin::builtin_as;
use coloured_operads::algebra::modules::BimoduleTables;
use coloured_operads::cells::{BvPoint, Q};
use coloured_operads::cosimp::SemiCosimplicialSet;
use coloured_operads::seqcore::{profile_closed, Colour, FiniteSSequence};
use coloured_operads::trees::Caps;

const C: Colour = Colour::Closed;
const O: Colour = Colour::Open;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn catalan(k: usize) -> u64 {
    let mut c = vec![1u64];
    for j in 1..=k {
        c.push((0..j).map(|i| c[i] * c[j - 1 - i]).sum());
    }
    c[k]
}

/// Little Schröder numbers by the three-term recurrence.
pub fn schroeder(n: usize) -> u64 {
    let mut s = vec![0i64, 1, 1];
    for k in 3..=n.max(2) {
        let k_ = k as i64;
        s.push(((6 * k_ - 9) * s[k - 1] - (k_ - 3) * s[k - 2]) / k_);
    }
    s[n] as u64
}

/// Uncoloured planar trees with `n` leaves and `v` vertices, arities in
/// `0..=a`, counted by a table over (leaves, vertices) rather than listed.
pub fn shape_counts(max_n: usize, max_v: usize, a: usize) -> Vec<Vec<u64>> {
    // forest[k][n][v]: ordered k-tuples of trees
    let mut t = vec![vec![0u64; max_v + 1]; max_n + 1];
    t[1][0] = 1;
    for v in 1..=max_v {
        let mut forest = vec![vec![vec![0u64; max_v + 1]; max_n + 1]; a + 1];
        forest[0][0][0] = 1;
        for k in 1..=a {
            for n in 0..=max_n {
                for w in 0..v {
                    let mut acc = 0;
                    for n1 in 0..=n {
                        for w1 in 0..=w {
                            acc += forest[k - 1][n - n1][w - w1] * t[n1][w1];
                        }
                    }
                    forest[k][n][w] = acc;
                }
            }
        }
        for n in 0..=max_n {
            t[n][v] = (0..=a).map(|k| forest[k][n][v - 1]).sum();
        }
    }
    t
}

/// Pearl trees over a closed profile with all inner-edge colourings,
/// counted from the shape: an optional vertex below the pearl whose other
/// inputs are leaves, and above each pearl input a leaf or a vertex whose
/// inputs are leaves.
pub fn pearl_oracle(m: usize, caps: Caps) -> u64 {
    let a = caps.max_arity;
    let mut total = 0;
    // (below arity or none) x pearl arity x fillings
    for below in std::iter::once(None).chain((1..=a).map(Some)) {
        let (extra_leaves, positions, vb) = match below {
            None => (0, 1, 0),
            Some(k) => (k - 1, k as u64, 1),
        };
        if extra_leaves > m {
            continue;
        }
        for r in 0..=a {
            // ways[l][u] = fillings of the slots with l leaves and u vertices,
            // weighted by the colour choices of the inner edges
            let mut ways = vec![vec![0u64; caps.max_vertices + 1]; m + 1];
            ways[0][0] = 1;
            for _ in 0..r {
                let mut next = vec![vec![0u64; caps.max_vertices + 1]; m + 1];
                for l in 0..=m {
                    for u in 0..=caps.max_vertices {
                        let w = ways[l][u];
                        if w == 0 {
                            continue;
                        }
                        if l < m {
                            next[l + 1][u] += w;
                        }
                        if u < caps.max_vertices {
                            for ar in 0..=a {
                                if l + ar <= m {
                                    next[l + ar][u + 1] += 2 * w;
                                }
                            }
                        }
                    }
                }
                ways = next;
            }
            for u in 0..=caps.max_vertices {
                if 1 + vb + u <= caps.max_vertices {
                    let colour_below = if vb == 1 { 2 } else { 1 };
                    total += positions * colour_below * ways[m - extra_leaves][u];
                }
            }
        }
    }
    total
}

/// Section trees over a closed profile: either a single pearl with fillings
/// above it, or a root whose inputs are all pearls, or the lone vertex
/// without inputs. Inner edges carry either colour.
pub fn section_oracle(m: usize, caps: Caps) -> u64 {
    let a = caps.max_arity;
    let vmax = caps.max_vertices;
    // pearl[l][u]: one pearl with its fillings, l leaves, u vertices in total
    let mut pearl = vec![vec![0u64; vmax + 1]; m + 1];
    for r in 0..=a {
        let mut ways = vec![vec![0u64; vmax + 1]; m + 1];
        ways[0][1] = 1;
        for _ in 0..r {
            let mut next = vec![vec![0u64; vmax + 1]; m + 1];
            for l in 0..=m {
                for u in 0..=vmax {
                    let w = ways[l][u];
                    if w == 0 {
                        continue;
                    }
                    if l < m {
                        next[l + 1][u] += w;
                    }
                    if u < vmax {
                        for ar in 0..=a {
                            if l + ar <= m {
                                next[l + ar][u + 1] += 2 * w;
                            }
                        }
                    }
                }
            }
            ways = next;
        }
        for l in 0..=m {
            for u in 0..=vmax {
                pearl[l][u] += ways[l][u];
            }
        }
    }
    let mut total: u64 = (0..=vmax).map(|u| pearl[m][u]).sum();
    if m == 0 {
        total += 1;
    }
    for k in 1..=a {
        let mut forest = vec![vec![0u64; vmax + 1]; m + 1];
        forest[0][1] = 1;
        for _ in 0..k {
            let mut next = vec![vec![0u64; vmax + 1]; m + 1];
            for l in 0..=m {
                for u in 0..=vmax {
                    if forest[l][u] == 0 {
                        continue;
                    }
                    for l2 in 0..=m - l {
                        for u2 in 0..=vmax - u {
                            next[l + l2][u + u2] += 2 * forest[l][u] * pearl[l2][u2];
                        }
                    }
                }
            }
            forest = next;
        }
        total += (0..=vmax).map(|u| forest[m][u]).sum::<u64>();
    }
    total
}

pub fn above(l: usize, n: usize) -> u64 {
    if n == 0 {
        return u64::from(l == 0);
    }
    let mut s = 0;
    if l >= 1 {
        s += above(l - 1, n - 1);
    }
    for a in 2..=l {
        s += above(l - a, n - 1);
    }
    s
}

/// Vertex below the pearl (none, or arity b+1 with b+1 positions), times
/// the ways to fill the pearl's inputs above.
pub fn tr_oracle(m: usize, n: usize) -> u64 {
    let mut s = above(m, n);
    for b in 1..=m {
        s += (b as u64 + 1) * above(m - b, n);
    }
    s
}

/// Barycentric coordinates of an ordered point: the gaps between 0, the
/// coordinates and 1.
pub fn barycentric(ts: &[Q]) -> Vec<Q> {
    let mut out = Vec::new();
    let mut prev = q(0, 1);
    for &t in ts {
        out.push(t - prev);
        prev = t;
    }
    out.push(q(1, 1) - prev);
    out
}

/// The generated equivalence, read literally: equal, or some position is 1
/// on both sides with equal tails after it.
pub fn tilde_related(a: &[Q], b: &[Q]) -> bool {
    a == b || (0..a.len()).any(|i| a[i] == q(1, 1) && b[i] == q(1, 1) && a[i + 1..] == b[i + 1..])
}

/// The defining relation on a fixed tree, read literally.
pub fn penta_related(a: &BvPoint, b: &BvPoint) -> bool {
    let t = a.tree();
    if t != b.tree() {
        return false;
    }
    let parents = t.parents();
    let verts = t.vertices();
    (1..t.vertex_count()).all(|v| {
        let e = v - 1;
        if verts[v].colour() == O {
            return a.lengths()[e] == b.lengths()[e];
        }
        let mut below = parents[v];
        let mut released = false;
        while let Some(u) = below {
            if u > 0
                && verts[u].colour() == C
                && a.lengths()[u - 1] == q(1, 1)
                && b.lengths()[u - 1] == q(1, 1)
            {
                released = true;
            }
            below = parents[u];
        }
        released || a.lengths()[e] == b.lengths()[e]
    })
}

/// Planar trees with `n` leaves and `v` vertices, every vertex with at least
/// two inputs, counted by splitting off the root's children.
pub struct TreeCounts {
    memo: HashMap<(usize, usize, usize), u64>,
}

impl TreeCounts {
    pub fn new() -> Self {
        TreeCounts {
            memo: HashMap::new(),
        }
    }

    pub fn trees(&mut self, n: usize, v: usize) -> u64 {
        if v == 0 || n < 2 {
            return 0;
        }
        (2..=n).map(|k| self.seq(k, n, v - 1)).sum()
    }

    pub fn item(&mut self, n: usize, v: usize) -> u64 {
        u64::from(n == 1 && v == 0) + self.trees(n, v)
    }

    pub fn seq(&mut self, k: usize, n: usize, v: usize) -> u64 {
        if k == 0 {
            return u64::from(n == 0 && v == 0);
        }
        if let Some(&c) = self.memo.get(&(k, n, v)) {
            return c;
        }
        let mut total = 0;
        for n1 in 1..=n {
            for v1 in 0..=v {
                let a = self.item(n1, v1);
                if a > 0 {
                    total += a * self.seq(k - 1, n - n1, v - v1);
                }
            }
        }
        self.memo.insert((k, n, v), total);
        total
    }
}

/// Number of classes per level by connected components of the relation
/// graph, with no union-find involved.
pub fn component_counts(x: &SemiCosimplicialSet, y: &SemiCosimplicialSet) -> Vec<usize> {
    let max = x.max_level().min(y.max_level());
    let mut out = Vec::new();
    for m in 0..=max {
        let mut nodes = Vec::new();
        for p in 0..=m {
            for a in 0..x.size(p) {
                for b in 0..y.size(m - p) {
                    nodes.push((p, a, b));
                }
            }
        }
        let idx = |t: (usize, usize, usize)| nodes.iter().position(|u| *u == t).unwrap();
        let mut adj = vec![Vec::new(); nodes.len()];
        if m > 0 {
            for p in 0..m {
                for a in 0..x.size(p) {
                    for b in 0..y.size(m - p - 1) {
                        let u = idx((p, a, y.d(m - p - 1, 0, b)));
                        let v = idx((p + 1, x.d(p, p + 1, a), b));
                        adj[u].push(v);
                        adj[v].push(u);
                    }
                }
            }
        }
        let mut seen = vec![false; nodes.len()];
        let mut count = 0;
        for s in 0..nodes.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        out.push(count);
    }
    out
}

/// Two copies of the associative operad's bimodule, plain and primed;
/// a composite is primed when any module argument is.
pub fn doubled_as(max: usize) -> BimoduleTables {
    let o = builtin_as(false, max);
    let mut seq = FiniteSSequence::new(&[Colour::Closed], max);
    for n in 0..=max {
        seq.insert(profile_closed(n), format!("*{n}")).unwrap();
        seq.insert(profile_closed(n), format!("*{n}'")).unwrap();
    }
    let mut b = BimoduleTables::new(o.clone(), seq);
    let ix = b.indexed().clone();
    let primed = |id| ix.elem(id).label.ends_with('\'');
    let name = |n: usize, p: bool| if p { format!("*{n}'") } else { format!("*{n}") };
    for a in o.indexed().ids() {
        let k = o.indexed().arity(a);
        for ms in b.tuples(&vec![Colour::Closed; k], max) {
            let n: usize = ms.iter().map(|&m| ix.arity(m)).sum();
            let p = ms.iter().any(|&m| primed(m));
            let z = ix.id_at(&profile_closed(n), &name(n, p)).unwrap();
            b.set_gamma_id(a, ms, z);
        }
    }
    for (m, _i, a) in b.right_triples() {
        let n = ix.arity(m) + o.indexed().arity(a) - 1;
        let z = ix.id_at(&profile_closed(n), &name(n, primed(m))).unwrap();
        b.set_right_id(m, _i, a, z);
    }
    b
}
