//! Max-Uncut Bisection: split the points into two equal halves so that the
//! weight of edges kept inside a half is as large as possible.
//!
//! A bisection viewed as a depth-two tree earns `n/2` per unit of uncut
//! weight and nothing on cut edges, so maximizing uncut weight and
//! maximizing revenue over bisections are the same problem.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{total_weight, SimilarityGraph};
use crate::weight::Weight;

/// Default largest `n` accepted by [`mub_exact`].
pub const EXACT_CAP: usize = 24;

/// Assignment of each point `1..=n` to side `false` or side `true`, with
/// side sizes `ceil(n/2)` and `floor(n/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bisection {
    side: Vec<bool>,
}

/// Intra-side weights and the weight crossing the cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SideWeights {
    pub left: Weight,
    pub right: Weight,
    pub cut: Weight,
}

impl SideWeights {
    /// `W_L + W_R`.
    pub fn uncut(&self) -> Weight {
        self.left + self.right
    }
}

impl Bisection {
    /// Bisection from per-point side bits (index `label - 1`).
    pub fn new(side: Vec<bool>) -> Result<Bisection> {
        let n = side.len();
        if n < 2 {
            return Err(Error::InvalidBisection(format!("need at least 2 points, got {n}")));
        }
        let ones = side.iter().filter(|&&s| s).count();
        if ones != n / 2 && ones != n - n / 2 {
            return Err(Error::InvalidBisection(format!(
                "unbalanced sides {} and {ones}",
                n - ones
            )));
        }
        Ok(Bisection { side })
    }

    /// The bisection whose `false` side is exactly `members`.
    pub fn from_side(n: usize, members: &[u32]) -> Result<Bisection> {
        let mut side = vec![true; n];
        for &l in members {
            if l == 0 || l as usize > n {
                return Err(Error::LeafOutOfRange { label: l, n });
            }
            if !side[l as usize - 1] {
                return Err(Error::InvalidBisection(format!("point {l} listed twice")));
            }
            side[l as usize - 1] = false;
        }
        Bisection::new(side)
    }

    /// Parses a line of `0`/`1` side bits.
    pub fn from_bits(bits: &str) -> Result<Bisection> {
        let side = bits
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBisection(format!("bad side bit {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Bisection::new(side)
    }

    /// One `0`/`1` character per point.
    pub fn to_bits(&self) -> String {
        self.side.iter().map(|&s| if s { '1' } else { '0' }).collect()
    }

    pub fn n(&self) -> usize {
        self.side.len()
    }

    pub fn side(&self, label: u32) -> bool {
        self.side[label as usize - 1]
    }

    /// Points on `side`, ascending.
    pub fn members(&self, side: bool) -> Vec<u32> {
        (1..=self.n() as u32).filter(|&l| self.side(l) == side).collect()
    }

    /// Same partition with leaf 1 on side `false`.
    pub fn canonical(&self) -> Bisection {
        if self.side[0] {
            Bisection { side: self.side.iter().map(|s| !s).collect() }
        } else {
            self.clone()
        }
    }

    /// `W_L`, `W_R` and the cut weight of `g` under this bisection.
    pub fn weights(&self, g: &SimilarityGraph) -> Result<SideWeights> {
        self.check(g)?;
        let mut w = SideWeights { left: Weight::ZERO, right: Weight::ZERO, cut: Weight::ZERO };
        for e in g.edges() {
            match (self.side(e.i), self.side(e.j)) {
                (false, false) => w.left += e.w,
                (true, true) => w.right += e.w,
                _ => w.cut += e.w,
            }
        }
        Ok(w)
    }

    pub fn uncut_weight(&self, g: &SimilarityGraph) -> Result<Weight> {
        Ok(self.weights(g)?.uncut())
    }

    fn check(&self, g: &SimilarityGraph) -> Result<()> {
        if g.n() != self.n() {
            return Err(Error::InvalidBisection(format!(
                "bisection covers {} points but the graph has {}",
                self.n(),
                g.n()
            )));
        }
        Ok(())
    }
}

fn require_even(n: usize) -> Result<()> {
    if n % 2 == 1 {
        Err(Error::OddN(n))
    } else {
        Ok(())
    }
}

/// Revenue of the depth-two bisection tree: `(n/2) (W_L + W_R)`.
pub fn bisection_revenue(g: &SimilarityGraph, b: &Bisection) -> Result<Weight> {
    require_even(g.n())?;
    Ok(b.uncut_weight(g)?.times(g.n() as i64 / 2))
}

/// Exact Max-Uncut Bisection for `n <= EXACT_CAP`.
pub fn mub_exact(g: &SimilarityGraph) -> Result<Bisection> {
    mub_exact_with_cap(g, EXACT_CAP)
}

/// Exact Max-Uncut Bisection by enumeration of the side containing leaf 1.
///
/// Sides are visited in lexicographic order of their sorted member lists and
/// only a strictly better side replaces the incumbent, so among optimal
/// bisections the one whose leaf-1 side is lexicographically smallest wins.
pub fn mub_exact_with_cap(g: &SimilarityGraph, cap: usize) -> Result<Bisection> {
    let n = g.n();
    require_even(n)?;
    if n > cap || n > 63 {
        return Err(Error::AboveCap { n, cap: cap.min(63), what: "exact max-uncut bisection" });
    }
    let edges: Vec<(u64, Weight)> = g
        .edges()
        .iter()
        .map(|e| ((1u64 << (e.i - 1)) | (1u64 << (e.j - 1)), e.w))
        .collect();
    let uncut = |mask: u64| -> Weight {
        edges
            .iter()
            .filter(|(pair, _)| {
                let inside = mask & pair;
                inside == *pair || inside == 0
            })
            .map(|&(_, w)| w)
            .sum()
    };

    // combination of positions 1..n (0-based), size n/2 - 1, lexicographic
    let k = n / 2 - 1;
    let mut idx: Vec<usize> = (1..=k).collect();
    let mut best: Option<(Weight, u64)> = None;
    loop {
        let mask = idx.iter().fold(1u64, |m, &i| m | (1u64 << i));
        let value = uncut(mask);
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, mask));
        }
        // advance to the next combination
        let mut p = k;
        loop {
            if p == 0 {
                let (_, mask) = best.unwrap();
                let side = (0..n).map(|i| mask >> i & 1 == 0).collect();
                return Bisection::new(side);
            }
            p -= 1;
            if idx[p] < n - k + p {
                idx[p] += 1;
                for q in p + 1..k {
                    idx[q] = idx[q - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Uniformly random balanced bisection, leaf 1 on side `false`.
pub fn mub_random(g: &SimilarityGraph, seed: u64) -> Result<Bisection> {
    require_even(g.n())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_bisection(g.n(), &mut rng))
}

pub(crate) fn random_bisection(n: usize, rng: &mut ChaCha8Rng) -> Bisection {
    let mut labels: Vec<u32> = (1..=n as u32).collect();
    labels.shuffle(rng);
    let mut side = vec![true; n];
    for &l in &labels[..n - n / 2] {
        side[l as usize - 1] = false;
    }
    Bisection { side }.canonical()
}

/// Swap-based local search from a seeded random balanced start.
pub fn mub_local_search(g: &SimilarityGraph, seed: u64) -> Result<Bisection> {
    let start = mub_random(g, seed)?;
    local_search_from(g, &start)
}

/// Best-improvement swap local search.
///
/// Each round evaluates every cross pair `(a, b)` and applies the swap with
/// the largest gain in `W_L + W_R`; ties go to the smallest `(a, b)` with `a`
/// on side `false`. Stops at a swap-local optimum, so the uncut weight never
/// decreases from `start`.
pub fn local_search_from(g: &SimilarityGraph, start: &Bisection) -> Result<Bisection> {
    require_even(g.n())?;
    start.check(g)?;
    let n = g.n();
    let matrix = g.weight_matrix();
    let mut side = start.side.clone();
    // internal[v]: weight from v to its own side; external[v]: to the other
    let mut internal = vec![Weight::ZERO; n];
    let mut external = vec![Weight::ZERO; n];
    for e in g.edges() {
        let (a, b) = (e.i as usize - 1, e.j as usize - 1);
        let slot = |v: usize, same: bool, int: &mut [Weight], ext: &mut [Weight]| {
            if same {
                int[v] += e.w
            } else {
                ext[v] += e.w
            }
        };
        let same = side[a] == side[b];
        slot(a, same, &mut internal, &mut external);
        slot(b, same, &mut internal, &mut external);
    }

    loop {
        let mut best: Option<(Weight, usize, usize)> = None;
        for a in (0..n).filter(|&a| !side[a]) {
            let ga = external[a] - internal[a];
            for b in (0..n).filter(|&b| side[b]) {
                let gain = ga + external[b] - internal[b] - matrix[a][b].times(2);
                if gain > Weight::ZERO && best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, a, b));
                }
            }
        }
        let Some((_, a, b)) = best else { break };
        side[a] = true;
        side[b] = false;
        for v in [a, b] {
            std::mem::swap(&mut internal[v], &mut external[v]);
        }
        // a and b stay on opposite sides, so their shared edge stays cut
        internal[a] -= matrix[a][b];
        external[a] += matrix[a][b];
        internal[b] -= matrix[a][b];
        external[b] += matrix[a][b];
        for v in (0..n).filter(|&v| v != a && v != b) {
            let (wa, wb) = (matrix[v][a], matrix[v][b]);
            // a moved to side true, b moved to side false
            if side[v] {
                internal[v] += wa - wb;
                external[v] += wb - wa;
            } else {
                internal[v] += wb - wa;
                external[v] += wa - wb;
            }
        }
    }
    Ok(Bisection { side }.canonical())
}

/// Expected uncut weight of a uniformly random bisection:
/// `total * (n/2 - 1) / (n - 1)`.
pub fn random_bisection_expected_uncut(g: &SimilarityGraph) -> f64 {
    let n = g.n() as f64;
    total_weight(g).to_f64() * (n / 2.0 - 1.0) / (n - 1.0)
}
