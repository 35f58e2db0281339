//! Permutations on {0..n}, orbits, and group orders by Schreier–Sims.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};

/// Images of 0..n. Products act left to right: `a.then(&b)` applies a first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// `images` must be a bijection of 0..n.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm(images))
    }

    /// From disjoint cycles on 0..n.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Option<Self> {
        let mut img: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (k, &a) in c.iter().enumerate() {
                img[a] = c[(k + 1) % c.len()];
            }
        }
        Self::from_images(img)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            if seen[i] {
                continue;
            }
            let mut c = Vec::new();
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                c.push(j);
                j = self.0[j];
            }
            out.push(c);
        }
        out
    }

    /// Sorted cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable();
        t
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let cs: Vec<String> = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                format!(
                    "({})",
                    c.iter()
                        .map(|i| (i + 1).to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                )
            })
            .collect();
        if cs.is_empty() {
            write!(f, "()")
        } else {
            write!(f, "{}", cs.join(""))
        }
    }
}

/// Serialized in 1-based cycle notation.
impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{self:?}"))
    }
}

/// Orbits of the group generated by `gens` on 0..n, each sorted, ordered by
/// least element.
pub fn orbits(n: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut orbit = vec![s];
        label[s] = id;
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            for g in gens {
                let y = g.apply(x);
                if label[y] == usize::MAX {
                    label[y] = id;
                    orbit.push(y);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

pub fn is_transitive(n: usize, gens: &[Perm]) -> bool {
    orbits(n, gens).len() <= 1
}

struct Level {
    point: usize,
    gens: Vec<Perm>,
    inv: Vec<Perm>,
    /// Schreier vector: for an orbit point b ≠ point, (generator k, b·k⁻¹).
    tree: Vec<Option<(usize, usize)>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(point: usize, n: usize) -> Self {
        let mut l = Level {
            point,
            gens: Vec::new(),
            inv: Vec::new(),
            tree: vec![None; n],
            orbit: Vec::new(),
        };
        l.rebuild();
        l
    }

    fn push(&mut self, g: Perm) {
        self.inv.push(g.inverse());
        self.gens.push(g);
        self.rebuild();
    }

    fn rebuild(&mut self) {
        let n = self.tree.len();
        self.tree = vec![None; n];
        self.orbit = vec![self.point];
        let mut seen = vec![false; n];
        seen[self.point] = true;
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k];
            for (gi, g) in self.gens.iter().enumerate() {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    self.tree[y] = Some((gi, x));
                    self.orbit.push(y);
                }
            }
            k += 1;
        }
    }

    fn contains(&self, b: usize) -> bool {
        b == self.point || self.tree[b].is_some()
    }

    /// g·u_b⁻¹ where b = point·g, which fixes the level point.
    fn reduce(&self, mut g: Perm) -> Perm {
        let mut b = g.apply(self.point);
        while b != self.point {
            let (k, pred) = self.tree[b].expect("orbit point");
            g = g.then(&self.inv[k]);
            b = pred;
        }
        g
    }

    fn path_to(&self, mut b: usize) -> Perm {
        let mut word = Vec::new();
        while b != self.point {
            let (k, pred) = self.tree[b].expect("orbit point");
            word.push(k);
            b = pred;
        }
        let mut u = Perm::identity(self.tree.len());
        for &k in word.iter().rev() {
            u = u.then(&self.gens[k]);
        }
        u
    }
}

/// Order of the group generated by `gens` (deterministic Schreier–Sims).
/// Level i holds every strong generator fixing the first i base points.
pub fn group_order(n: usize, gens: &[Perm]) -> BigUint {
    let mut levels: Vec<Level> = Vec::new();
    for g in gens.iter().filter(|g| !g.is_identity()) {
        let fixes = |levels: &[Level], g: &Perm| levels.iter().all(|l| g.apply(l.point) == l.point);
        if fixes(&levels, g) {
            let moved = (0..n).find(|&x| g.apply(x) != x).expect("non-identity");
            levels.push(Level::new(moved, n));
        }
        let depth = levels
            .iter()
            .take_while(|l| g.apply(l.point) == l.point)
            .count();
        for l in levels.iter_mut().take(depth + 1) {
            l.push(g.clone());
        }
    }
    let mut i = levels.len() as isize - 1;
    while i >= 0 {
        let iu = i as usize;
        match failing_schreier_generator(&levels, iu) {
            None => i -= 1,
            Some((r, j)) => {
                if j == levels.len() {
                    let moved = (0..n).find(|&x| r.apply(x) != x).expect("non-identity");
                    levels.push(Level::new(moved, n));
                }
                for l in levels.iter_mut().take(j + 1).skip(iu + 1) {
                    l.push(r.clone());
                }
                i = j as isize;
            }
        }
    }
    levels
        .iter()
        .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
}

/// Sift g through levels from `from`; returns the residue and the level where
/// it stopped.
fn sift(levels: &[Level], mut g: Perm, from: usize) -> (Perm, usize) {
    for (i, l) in levels.iter().enumerate().skip(from) {
        let b = g.apply(l.point);
        if !l.contains(b) {
            return (g, i);
        }
        g = l.reduce(g);
    }
    (g, levels.len())
}

/// A Schreier generator of level i that does not sift through the levels
/// below, with its residue and stopping level.
fn failing_schreier_generator(levels: &[Level], i: usize) -> Option<(Perm, usize)> {
    let l = &levels[i];
    for &b in &l.orbit {
        let ub = l.path_to(b);
        for s in &l.gens {
            let bs = s.apply(b);
            let y = ub.then(s).then(&l.path_to(bs).inverse());
            let (r, j) = sift(levels, y, i + 1);
            if !r.is_identity() {
                return Some((r, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cs: &[&[usize]]) -> Perm {
        Perm::from_cycles(n, cs).unwrap()
    }

    #[test]
    fn products_act_left_to_right() {
        let a = cyc(3, &[&[0, 1]]);
        let b = cyc(3, &[&[1, 2]]);
        assert_eq!(a.then(&b).apply(0), 2);
        assert!(a.then(&a).is_identity());
        assert_eq!(a.then(&b).cycle_type(), vec![3]);
        assert!(a.then(&b).then(&a.then(&b).inverse()).is_identity());
    }

    #[test]
    fn orbit_partition() {
        let g = cyc(5, &[&[0, 2]]);
        let h = cyc(5, &[&[3, 4]]);
        assert_eq!(orbits(5, &[g, h]), vec![vec![0, 2], vec![1], vec![3, 4]]);
    }

    #[test]
    fn symmetric_and_dihedral_orders() {
        let t = cyc(5, &[&[0, 1]]);
        let c = cyc(5, &[&[0, 1, 2, 3, 4]]);
        assert_eq!(
            group_order(5, &[t.clone(), c.clone()]),
            BigUint::from(120u32)
        );
        let r = cyc(5, &[&[1, 4], &[2, 3]]);
        assert_eq!(group_order(5, &[c.clone(), r]), BigUint::from(10u32));
        assert_eq!(group_order(5, &[c]), BigUint::from(5u32));
        assert_eq!(group_order(5, &[]), BigUint::from(1u32));
        // S₃ from the Chebyshev T₃ branching
        assert_eq!(
            group_order(3, &[cyc(3, &[&[0, 1]]), cyc(3, &[&[1, 2]])]),
            BigUint::from(6u32)
        );
    }

    #[test]
    fn larger_groups() {
        // S₁₀ and A₁₀
        let n = 10;
        let t = cyc(n, &[&[0, 1]]);
        let c = Perm::from_images((1..=n).map(|i| i % n).collect()).unwrap();
        let s10: u64 = (1..=10).product();
        assert_eq!(group_order(n, &[t, c]), BigUint::from(s10));
        let three: Vec<Perm> = (0..n - 2).map(|i| cyc(n, &[&[i, i + 1, i + 2]])).collect();
        assert_eq!(group_order(n, &three), BigUint::from(s10 / 2));
        // C₂ ≀ C₂ ≀ C₂ on 8 points, the iterated monodromy of a quadratic
        let a = cyc(8, &[&[0, 4], &[1, 5], &[2, 6], &[3, 7]]);
        let b = cyc(8, &[&[0, 2], &[1, 3]]);
        let d = cyc(8, &[&[0, 1]]);
        assert_eq!(group_order(8, &[a, b, d]), BigUint::from(128u32));
    }
}
