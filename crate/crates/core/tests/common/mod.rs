//! Brute-force reference implementations, independent of the library's
//! canonical forms and group algorithms.
#![allow(dead_code)]

use trigraph::{Dart, Graph};

/// Every admissible (g,b) with at most nine edges.
pub const RANGE: [(usize, usize); 15] = [
    (0, 3),
    (0, 4),
    (0, 5),
    (0, 6),
    (1, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 0),
    (2, 1),
    (2, 2),
    (2, 3),
    (3, 0),
    (3, 1),
    (4, 0),
];

/// Number of dart bijections `a → b` commuting with edge pairing and
/// preserving incidence and degrees, stopping at `limit`.
pub fn count_isomorphisms(a: &Graph, b: &Graph, limit: usize) -> usize {
    if a.num_darts() != b.num_darts() || a.num_vertices() != b.num_vertices() {
        return 0;
    }
    let mut image = vec![usize::MAX; a.num_darts()];
    let mut used = vec![false; b.num_edges()];
    let mut count = 0;
    extend(a, b, 0, &mut image, &mut used, &mut count, limit);
    count
}

fn extend(a: &Graph, b: &Graph, k: usize, image: &mut [usize], used: &mut [bool], count: &mut usize, limit: usize) {
    if *count >= limit {
        return;
    }
    if k == a.num_edges() {
        *count += 1;
        return;
    }
    for j in 0..b.num_edges() {
        if used[j] {
            continue;
        }
        for o in 0..2 {
            let (x, y) = (2 * k, 2 * k + 1);
            let (ix, iy) = (2 * j + o, 2 * j + 1 - o);
            image[x] = ix;
            image[y] = iy;
            if consistent(a, b, image, x) && consistent(a, b, image, y) {
                used[j] = true;
                extend(a, b, k + 1, image, used, count, limit);
                used[j] = false;
            }
            image[x] = usize::MAX;
            image[y] = usize::MAX;
        }
    }
}

fn consistent(a: &Graph, b: &Graph, image: &[usize], d: usize) -> bool {
    let (va, vb) = (a.vertex(Dart(d)), b.vertex(Dart(image[d])));
    if a.degree(va) != b.degree(vb) {
        return false;
    }
    (0..image.len())
        .filter(|&x| image[x] != usize::MAX)
        .all(|x| (a.vertex(Dart(x)) == va) == (b.vertex(Dart(image[x])) == vb))
}

pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    count_isomorphisms(a, b, 1) == 1
}

pub fn automorphism_count(g: &Graph) -> usize {
    count_isomorphisms(g, g, usize::MAX)
}

/// Isomorphism classes of `G_{g,b}` by generating every pairing of the
/// darts of fixed vertex cells and deduplicating with [`isomorphic`].
pub fn brute_force_classes(genus: usize, boundary: usize) -> Vec<Graph> {
    let trivalent = 2 * genus + boundary - 2;
    let slots = 3 * trivalent + boundary;
    let owner: Vec<usize> = (0..slots)
        .map(|s| {
            if s < 3 * trivalent {
                s / 3
            } else {
                trivalent + s - 3 * trivalent
            }
        })
        .collect();
    let mut classes: Vec<Graph> = Vec::new();
    let mut pairs = Vec::new();
    let mut free = vec![true; slots];
    pairings(&mut free, &mut pairs, &mut |pairs| {
        let mut cells = vec![Vec::new(); trivalent + boundary];
        for (k, &(x, y)) in pairs.iter().enumerate() {
            cells[owner[x]].push(Dart(2 * k));
            cells[owner[y]].push(Dart(2 * k + 1));
        }
        let Ok(g) = Graph::from_cells(genus, boundary, pairs.len(), cells) else {
            return;
        };
        if g.is_valid() && !classes.iter().any(|c| isomorphic(c, &g)) {
            classes.push(g);
        }
    });
    classes
}

fn pairings(free: &mut [bool], pairs: &mut Vec<(usize, usize)>, visit: &mut impl FnMut(&[(usize, usize)])) {
    let Some(x) = free.iter().position(|&f| f) else {
        visit(pairs);
        return;
    };
    free[x] = false;
    for y in x + 1..free.len() {
        if free[y] {
            free[y] = false;
            pairs.push((x, y));
            pairings(free, pairs, visit);
            pairs.pop();
            free[y] = true;
        }
    }
    free[x] = true;
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
