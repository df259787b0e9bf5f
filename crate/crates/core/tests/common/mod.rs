#![allow(dead_code)]

use hcrevenue::hctree::{HcTree, Shape};
use rand::Rng;

/// Uniformly random rooted binary tree on `1..=n`: leaf `k` is inserted on
/// one of the `2k - 3` edges of the current tree (including the edge above
/// the root), chosen uniformly.
pub fn uniform_tree(n: usize, rng: &mut impl Rng) -> HcTree {
    // nodes: leaves 0..n, internal n..; children stored for internal nodes
    let mut parent = vec![usize::MAX; 2 * n];
    let mut children = vec![(usize::MAX, usize::MAX); 2 * n];
    let mut root = 0;
    let mut present = vec![0usize];
    for k in 1..n {
        let u = present[rng.gen_range(0..present.len())];
        let p = n + k - 1;
        let up = parent[u];
        if up == usize::MAX {
            root = p;
        } else if children[up].0 == u {
            children[up].0 = p;
        } else {
            children[up].1 = p;
        }
        parent[p] = up;
        // put the new leaf on a random side
        children[p] = if rng.gen_bool(0.5) { (u, k) } else { (k, u) };
        parent[u] = p;
        parent[k] = p;
        present.push(k);
        present.push(p);
    }
    fn shape(v: usize, n: usize, children: &[(usize, usize)]) -> Shape {
        if v < n {
            Shape::leaf(v as u32 + 1)
        } else {
            Shape::join(shape(children[v].0, n, children), shape(children[v].1, n, children))
        }
    }
    HcTree::from_shape(&shape(root, n, &children)).unwrap()
}

/// Leaf sets of every internal node, straight from the recursive shape.
pub fn clusters(t: &HcTree) -> Vec<Vec<u32>> {
    fn walk(s: &Shape, out: &mut Vec<Vec<u32>>) -> Vec<u32> {
        match s {
            Shape::Leaf(l) => vec![*l],
            Shape::Join(a, b) => {
                let mut v = walk(a, out);
                v.extend(walk(b, out));
                out.push(v.clone());
                v
            }
        }
    }
    let mut out = Vec::new();
    walk(&t.shape(), &mut out);
    out
}

/// `|T_ij|` as the size of the smallest cluster holding both leaves.
pub fn lca_size_by_clusters(clusters: &[Vec<u32>], i: u32, j: u32) -> usize {
    clusters
        .iter()
        .filter(|c| c.contains(&i) && c.contains(&j))
        .map(Vec::len)
        .min()
        .unwrap()
}
